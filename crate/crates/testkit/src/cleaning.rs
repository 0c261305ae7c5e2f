/// Tukey fence check written from scratch: a row survives when every
/// checked column lies within [Q1 - k·IQR, Q3 + k·IQR] of that column.
pub fn fence_survivors(columns: &[Vec<f64>], k: f64) -> Vec<bool> {
    let n = columns.first().map_or(0, Vec::len);
    let mut keep = vec![true; n];
    for col in columns {
        let mut s = col.clone();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = |p: f64| {
            let h = (s.len() as f64 - 1.0) * p;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            s[lo] + (h - lo as f64) * (s[hi] - s[lo])
        };
        let (q1, q3) = (q(0.25), q(0.75));
        let iqr = q3 - q1;
        for (i, v) in col.iter().enumerate() {
            if *v < q1 - k * iqr || *v > q3 + k * iqr {
                keep[i] = false;
            }
        }
    }
    keep
}

/// Connected components of an undirected graph by boolean transitive
/// closure (Warshall). Returns a component label per node: the smallest
/// node index reachable from it.
pub fn closure_components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        reach[a][b] = true;
        reach[b][a] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n)
        .map(|i| (0..n).find(|&j| reach[i][j]).unwrap())
        .collect()
}
