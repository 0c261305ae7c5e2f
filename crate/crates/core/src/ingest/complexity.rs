//! Lightweight per-method complexity: 1 + number of branch points in the
//! method body. Methods are segmented by braces for C-family languages and by
//! indentation for Python; comments and string literals are blanked first.

use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Language {
    Rust,
    C,
    Java,
    CSharp,
    Go,
    JavaScript,
    Kotlin,
    Swift,
    Scala,
    Php,
    Python,
}

impl Language {
    /// Accepts a file extension (`"rs"`, `".py"`) or a language name.
    pub fn from_hint(hint: &str) -> Option<Self> {
        let h = hint.trim().trim_start_matches('.').to_ascii_lowercase();
        Some(match h.as_str() {
            "rs" | "rust" => Self::Rust,
            "c" | "h" | "cc" | "cpp" | "cxx" | "hpp" | "hh" | "hxx" | "c++" | "m" => Self::C,
            "java" => Self::Java,
            "cs" | "csharp" | "c#" => Self::CSharp,
            "go" | "golang" => Self::Go,
            "js" | "jsx" | "mjs" | "cjs" | "ts" | "tsx" | "javascript" | "typescript" => Self::JavaScript,
            "kt" | "kts" | "kotlin" => Self::Kotlin,
            "swift" => Self::Swift,
            "scala" | "sc" => Self::Scala,
            "php" => Self::Php,
            "py" | "pyw" | "python" => Self::Python,
            _ => return None,
        })
    }

    pub fn from_path(path: &str) -> Option<Self> {
        Path::new(path)
            .extension()
            .and_then(|e| e.to_str())
            .and_then(Self::from_hint)
    }

    fn counts_ternary(self) -> bool {
        matches!(self, Self::C | Self::Java | Self::CSharp | Self::JavaScript | Self::Php)
    }

    fn function_keywords(self) -> &'static [&'static str] {
        match self {
            Self::Rust => &["fn"],
            Self::Go | Self::Swift => &["func"],
            Self::Kotlin => &["fun"],
            Self::Scala => &["def"],
            Self::JavaScript | Self::Php => &["function"],
            _ => &[],
        }
    }
}

/// A detected method with 1-based inclusive line span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodSpan {
    pub name: String,
    pub start_line: u32,
    pub end_line: u32,
    pub complexity: u32,
}

impl MethodSpan {
    pub fn overlaps(&self, first: u32, last: u32) -> bool {
        self.start_line <= last && first <= self.end_line
    }
}

/// One complexity value per detected method. Binary text and unsupported
/// languages yield an empty list.
pub fn estimate_complexity(source_text: &str, language_hint: Option<&str>) -> Vec<u32> {
    let lang = match language_hint {
        Some(h) => match Language::from_hint(h) {
            Some(l) => l,
            None => return Vec::new(),
        },
        None => sniff(source_text),
    };
    detect_methods(source_text, lang)
        .into_iter()
        .map(|m| m.complexity)
        .collect()
}

fn sniff(src: &str) -> Language {
    if src.lines().any(|l| {
        let t = l.trim_start();
        t.starts_with("def ") || t.starts_with("async def ")
    }) {
        Language::Python
    } else if src.contains("fn ") {
        Language::Rust
    } else {
        Language::C
    }
}

pub fn detect_methods(source: &str, lang: Language) -> Vec<MethodSpan> {
    if source.contains('\0') {
        return Vec::new();
    }
    match lang {
        Language::Python => python_methods(source),
        _ => brace_methods(source, lang),
    }
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

/// Blanks comments and string/char literals, keeping newlines so line
/// numbers survive.
fn scrub_braced(src: &[char], lang: Language) -> Vec<char> {
    let mut out = src.to_vec();
    let n = src.len();
    let blank = |out: &mut Vec<char>, from: usize, to: usize| {
        for c in &mut out[from..to.min(n)] {
            if *c != '\n' {
                *c = ' ';
            }
        }
    };
    let mut i = 0;
    while i < n {
        let c = src[i];
        let next = src.get(i + 1).copied();
        if c == '/' && next == Some('/') {
            let end = (i..n).find(|&k| src[k] == '\n').unwrap_or(n);
            blank(&mut out, i, end);
            i = end;
        } else if c == '#' && lang == Language::Php {
            let end = (i..n).find(|&k| src[k] == '\n').unwrap_or(n);
            blank(&mut out, i, end);
            i = end;
        } else if c == '/' && next == Some('*') {
            let mut k = i + 2;
            while k + 1 < n && !(src[k] == '*' && src[k + 1] == '/') {
                k += 1;
            }
            let end = (k + 2).min(n);
            blank(&mut out, i, end);
            i = end;
        } else if lang == Language::Rust
            && c == 'r'
            && (i == 0 || !is_ident(src[i - 1]))
            && matches!(next, Some('"') | Some('#'))
        {
            let mut k = i + 1;
            let mut hashes = 0;
            while k < n && src[k] == '#' {
                hashes += 1;
                k += 1;
            }
            if k < n && src[k] == '"' {
                k += 1;
                'scan: while k < n {
                    if src[k] == '"' && (0..hashes).all(|h| src.get(k + 1 + h) == Some(&'#')) {
                        k += 1 + hashes;
                        break 'scan;
                    }
                    k += 1;
                }
                blank(&mut out, i, k);
                i = k;
            } else {
                i += 1;
            }
        } else if c == '"' || (c == '`' && lang == Language::JavaScript) {
            let mut k = i + 1;
            while k < n && src[k] != c {
                if src[k] == '\\' {
                    k += 1;
                }
                k += 1;
            }
            let end = (k + 1).min(n);
            blank(&mut out, i, end);
            i = end;
        } else if c == '\'' {
            // Char literal ('x', '\n') or, outside Rust, a quoted string.
            // A Rust lifetime ('a) has no closing quote right after.
            let end = if next == Some('\\') {
                (i + 2..n).find(|&k| src[k] == '\'').map(|k| k + 1)
            } else if src.get(i + 2) == Some(&'\'') {
                Some(i + 3)
            } else if lang != Language::Rust {
                let mut k = i + 1;
                while k < n && src[k] != '\'' && src[k] != '\n' {
                    if src[k] == '\\' {
                        k += 1;
                    }
                    k += 1;
                }
                Some((k + 1).min(n))
            } else {
                None
            };
            match end {
                Some(e) => {
                    blank(&mut out, i, e);
                    i = e;
                }
                None => i += 1,
            }
        } else {
            i += 1;
        }
    }
    out
}

const CONTROL: &[&str] = &[
    "if", "else", "for", "foreach", "while", "switch", "catch", "do", "try", "return", "new",
    "class", "struct", "enum", "namespace", "union", "interface", "extern", "synchronized",
    "using", "lock", "fixed", "with", "finally", "match", "loop", "record", "when", "object",
    "impl", "trait", "mod", "unsafe", "static", "defer", "select", "case", "default", "init",
];

fn tokens(text: &str) -> Vec<&str> {
    text.split(|c: char| !is_ident(c))
        .filter(|t| !t.is_empty())
        .collect()
}

/// Name of the function a header introduces, if it introduces one.
fn function_name(header: &str, lang: Language) -> Option<String> {
    let header = header.trim();
    if header.is_empty() {
        return None;
    }
    let toks = tokens(header);
    for kw in lang.function_keywords() {
        if let Some(pos) = toks.iter().position(|t| t == kw) {
            // `fn` inside a header that does not start a function body,
            // e.g. `impl Fn() for X`, is still rare enough to accept.
            return Some(toks.get(pos + 1).map_or("<anonymous>", |s| s).to_string());
        }
    }
    if lang == Language::Rust {
        return None;
    }
    if lang == Language::JavaScript && header.contains("=>") {
        let before = header.split("=>").next().unwrap_or("");
        let name = before
            .split('=')
            .next()
            .and_then(|lhs| tokens(lhs).last().copied())
            .unwrap_or("<arrow>");
        return Some(name.to_string());
    }
    let paren = header.find('(')?;
    if !header.trim_end().ends_with(')') && !trailing_qualifiers(header) {
        return None;
    }
    let before = &header[..paren];
    if before.contains('=') || before.contains('.') && lang != Language::C {
        return None;
    }
    let head_toks = tokens(before);
    let name = *head_toks.last()?;
    if head_toks.iter().any(|t| CONTROL.contains(t)) {
        return None;
    }
    if name.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return None;
    }
    Some(name.to_string())
}

/// `) const`, `) throws IOException`, `) override`, `) : base(x)` and the like.
fn trailing_qualifiers(header: &str) -> bool {
    let Some(close) = header.rfind(')') else {
        return false;
    };
    let tail = header[close + 1..].trim();
    let first = tokens(tail).first().copied().unwrap_or("");
    matches!(
        first,
        "const" | "noexcept" | "override" | "final" | "throws" | "mutable" | "volatile" | "where"
    ) || tail.starts_with("->")
        || tail.starts_with(':')
}

fn count_branches(body: &[char], lang: Language) -> u32 {
    let text: String = body.iter().collect();
    let mut count = 0u32;
    for t in tokens(&text) {
        if matches!(t, "if" | "for" | "foreach" | "while" | "case" | "catch") {
            count += 1;
        }
    }
    for w in body.windows(2) {
        if (w[0] == '&' && w[1] == '&') || (w[0] == '|' && w[1] == '|') {
            count += 1;
        }
    }
    if lang.counts_ternary() {
        for (i, &c) in body.iter().enumerate() {
            if c != '?' {
                continue;
            }
            let next = body.get(i + 1).copied();
            let prev = if i > 0 { Some(body[i - 1]) } else { None };
            if matches!(next, Some('.') | Some('?') | Some('[')) || prev == Some('?') {
                continue;
            }
            count += 1;
        }
    }
    count
}

fn brace_methods(source: &str, lang: Language) -> Vec<MethodSpan> {
    let raw: Vec<char> = source.chars().collect();
    let chars = scrub_braced(&raw, lang);
    let line_of = {
        let mut lines = Vec::with_capacity(chars.len());
        let mut line = 1u32;
        for &c in &chars {
            lines.push(line);
            if c == '\n' {
                line += 1;
            }
        }
        lines
    };

    struct Open {
        name: String,
        start_line: u32,
        depth: usize,
        body_start: usize,
    }

    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut header_start = 0usize;
    let mut open: Option<Open> = None;
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '{' => {
                if open.is_none() {
                    let header: String = chars[header_start..i].iter().collect();
                    if let Some(name) = function_name(&header, lang) {
                        let name_pos = header
                            .find(name.as_str())
                            .map(|p| header[..p].chars().count())
                            .unwrap_or(0);
                        let first_nonspace = chars[header_start..i]
                            .iter()
                            .position(|c| !c.is_whitespace())
                            .unwrap_or(0);
                        let at = header_start + name_pos.max(first_nonspace);
                        open = Some(Open {
                            name,
                            start_line: line_of.get(at).copied().unwrap_or(line_of[i]),
                            depth,
                            body_start: i + 1,
                        });
                    }
                }
                depth += 1;
                header_start = i + 1;
            }
            '}' => {
                depth = depth.saturating_sub(1);
                if open.as_ref().is_some_and(|o| o.depth == depth) {
                    let o = open.take().expect("checked above");
                    out.push(MethodSpan {
                        complexity: 1 + count_branches(&chars[o.body_start..i], lang),
                        name: o.name,
                        start_line: o.start_line,
                        end_line: line_of[i],
                    });
                }
                header_start = i + 1;
            }
            ';' => header_start = i + 1,
            _ => {}
        }
    }
    out
}

/// Blanks Python comments and string literals (including triple-quoted).
fn scrub_python(src: &[char]) -> Vec<char> {
    let mut out = src.to_vec();
    let n = src.len();
    let mut i = 0;
    while i < n {
        let c = src[i];
        if c == '#' {
            while i < n && src[i] != '\n' {
                out[i] = ' ';
                i += 1;
            }
        } else if c == '"' || c == '\'' {
            let triple = src.get(i + 1) == Some(&c) && src.get(i + 2) == Some(&c);
            let start = i;
            if triple {
                i += 3;
                while i < n && !(src[i] == c && src.get(i + 1) == Some(&c) && src.get(i + 2) == Some(&c)) {
                    if src[i] == '\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i = (i + 3).min(n);
            } else {
                i += 1;
                while i < n && src[i] != c && src[i] != '\n' {
                    if src[i] == '\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i = (i + 1).min(n);
            }
            for ch in &mut out[start..i] {
                if *ch != '\n' {
                    *ch = ' ';
                }
            }
        } else {
            i += 1;
        }
    }
    out
}

fn indent_width(line: &str) -> usize {
    let mut w = 0;
    for c in line.chars() {
        match c {
            ' ' => w += 1,
            '\t' => w = (w / 8 + 1) * 8,
            _ => break,
        }
    }
    w
}

fn python_methods(source: &str) -> Vec<MethodSpan> {
    let raw: Vec<char> = source.chars().collect();
    let scrubbed: String = scrub_python(&raw).into_iter().collect();
    let mut methods: Vec<MethodSpan> = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new(); // (indent, index into methods)
    for (idx, line) in scrubbed.lines().enumerate() {
        let lineno = idx as u32 + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = indent_width(line);
        while stack.last().is_some_and(|&(d, _)| indent <= d) {
            stack.pop();
        }
        let def = trimmed
            .strip_prefix("async ")
            .map(str::trim_start)
            .unwrap_or(trimmed)
            .strip_prefix("def ");
        if let Some(rest) = def {
            let name = tokens(rest).first().copied().unwrap_or("<anonymous>").to_string();
            methods.push(MethodSpan {
                name,
                start_line: lineno,
                end_line: lineno,
                complexity: 1,
            });
            stack.push((indent, methods.len() - 1));
        } else if let Some(&(_, top)) = stack.last() {
            let toks = tokens(trimmed);
            let mut branches = toks
                .iter()
                .filter(|t| matches!(**t, "if" | "elif" | "for" | "while" | "except" | "and" | "or"))
                .count() as u32;
            if toks.first() == Some(&"case") {
                branches += 1;
            }
            methods[top].complexity += branches;
        }
        for &(_, m) in &stack {
            methods[m].end_line = lineno;
        }
    }
    methods
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_function() {
        let src = "fn add(a: i32, b: i32) -> i32 {\n    a + b\n}\n";
        assert_eq!(estimate_complexity(src, Some("rs")), vec![1]);
    }

    #[test]
    fn two_ifs_and_a_while() {
        let src = r#"
fn walk(mut n: u32) -> u32 {
    if n == 0 {
        return 0;
    }
    while n > 10 {
        n -= 1;
    }
    if n % 2 == 0 { n } else { n + 1 }
}
"#;
        assert_eq!(estimate_complexity(src, Some("rust")), vec![4]);
    }

    #[test]
    fn binary_blob_is_unparsed() {
        let blob = "\u{0}\u{1}\u{2}PNG\u{0}";
        assert!(estimate_complexity(blob, Some("c")).is_empty());
    }

    #[test]
    fn unsupported_language() {
        assert!(estimate_complexity("anything", Some("cobol")).is_empty());
    }

    #[test]
    fn comments_and_strings_do_not_count() {
        let src = "int f(int x) {\n  // if while for\n  const char* s = \"if (a && b)\";\n  /* case */\n  return x;\n}\n";
        assert_eq!(estimate_complexity(src, Some("c")), vec![1]);
    }

    #[test]
    fn java_methods_inside_class() {
        let src = r#"
public class Foo {
    private int x;

    public int bar(int y) throws IOException {
        if (y > 0 && x > 0) {
            return y;
        }
        return x > 1 ? 1 : 2;
    }

    void baz() {
        for (int i = 0; i < 3; i++) {
            try { run(); } catch (Exception e) { log(); }
        }
    }
}
"#;
        let methods = detect_methods(src, Language::Java);
        let summary: Vec<(&str, u32, u32, u32)> = methods
            .iter()
            .map(|m| (m.name.as_str(), m.start_line, m.end_line, m.complexity))
            .collect();
        assert_eq!(summary, vec![("bar", 5, 10, 4), ("baz", 12, 16, 3)]);
    }

    #[test]
    fn rust_impl_methods_and_lifetimes() {
        let src = r#"
impl<'a> Parser<'a> {
    fn next(&mut self) -> Option<char> {
        let c = '{';
        match self.peek() {
            Some(x) if x == c => None,
            _ => Some('}'),
        }
    }

    fn id(&self) -> &'a str { self.src }
}
"#;
        let m = detect_methods(src, Language::Rust);
        assert_eq!(m.len(), 2);
        assert_eq!((m[0].name.as_str(), m[0].complexity), ("next", 2));
        assert_eq!((m[1].name.as_str(), m[1].start_line, m[1].end_line), ("id", 11, 11));
    }

    #[test]
    fn javascript_functions_and_arrows() {
        let src = "function a(x) {\n  return x ?? y?.z;\n}\nconst b = (x) => {\n  return x ? 1 : 0;\n};\n";
        let m = detect_methods(src, Language::JavaScript);
        let v: Vec<(&str, u32)> = m.iter().map(|m| (m.name.as_str(), m.complexity)).collect();
        assert_eq!(v, vec![("a", 1), ("b", 2)]);
    }

    #[test]
    fn python_indentation_segments() {
        let src = r#"
import os

def outer(x):
    """if while for"""
    if x and os.path.exists(x):
        return 1
    elif x:
        for i in range(3):
            pass
    return 0

class K:
    def m(self):
        try:
            run()
        except ValueError:
            pass

    async def n(self):
        return 1
"#;
        let m = detect_methods(src, Language::Python);
        let v: Vec<(&str, u32, u32, u32)> = m
            .iter()
            .map(|m| (m.name.as_str(), m.start_line, m.end_line, m.complexity))
            .collect();
        assert_eq!(v, vec![("outer", 4, 11, 5), ("m", 14, 18, 2), ("n", 20, 21, 1)]);
    }

    #[test]
    fn complexities_are_at_least_one() {
        for src in ["fn a() {}", "void f() {}", "def g():\n  pass\n"] {
            assert!(estimate_complexity(src, None).iter().all(|&c| c >= 1));
        }
    }
}
