//! Column-oriented tables handed to cleaning and model fitting.

use spacex_stats::DataColumn;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    /// Text columns (identifiers, group labels).
    pub labels: Vec<(String, Vec<String>)>,
    pub columns: Vec<DataColumn>,
}

impl Table {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            labels: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.labels
            .first()
            .map(|(_, v)| v.len())
            .or_else(|| self.columns.first().map(DataColumn::len))
            .unwrap_or(0)
    }

    pub fn column(&self, name: &str) -> Option<&DataColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_mut(&mut self, name: &str) -> Option<&mut DataColumn> {
        self.columns.iter_mut().find(|c| c.name == name)
    }

    pub fn label(&self, name: &str) -> Option<&[String]> {
        self.labels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn has(&self, name: &str) -> bool {
        self.column(name).is_some() || self.label(name).is_some()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    /// Keeps the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Table {
        Table {
            name: self.name.clone(),
            labels: self
                .labels
                .iter()
                .map(|(n, v)| (n.clone(), rows.iter().map(|&i| v[i].clone()).collect()))
                .collect(),
            columns: self
                .columns
                .iter()
                .map(|c| DataColumn::with_missing(c.name.clone(), rows.iter().map(|&i| c.values[i]).collect()))
                .collect(),
        }
    }
}
