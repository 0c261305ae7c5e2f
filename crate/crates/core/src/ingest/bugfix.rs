use std::collections::BTreeSet;

pub const DEFAULT_BUG_KEYWORDS: &[&str] = &[
    "fix", "fixes", "fixed", "bug", "bugfix", "hotfix", "patch", "fault", "crash", "defect",
];

/// Whole-word, case-insensitive keyword matcher for commit messages.
#[derive(Debug, Clone)]
pub struct BugFixMatcher {
    keywords: BTreeSet<String>,
}

impl Default for BugFixMatcher {
    fn default() -> Self {
        Self::new(DEFAULT_BUG_KEYWORDS.iter().copied())
    }
}

impl BugFixMatcher {
    pub fn new<I, S>(keywords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            keywords: keywords
                .into_iter()
                .map(|k| k.as_ref().trim().to_lowercase())
                .filter(|k| !k.is_empty())
                .collect(),
        }
    }

    pub fn matches(&self, message: &str) -> bool {
        crate::text::words(message).any(|w| self.keywords.contains(&w))
    }
}

/// Default-keyword bug-fix check.
pub fn detect_bug_fix(message: &str) -> bool {
    BugFixMatcher::default().matches(message)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(detect_bug_fix("Fix crash in parser"));
        assert!(!detect_bug_fix("add feature flag"));
        assert!(!detect_bug_fix(""));
    }

    #[test]
    fn whole_words_only() {
        assert!(!detect_bug_fix("prefix handling and debugger UI"));
        assert!(detect_bug_fix("HOTFIX: release"));
        assert!(detect_bug_fix("  bugfix(#12)  "));
    }

    #[test]
    fn custom_keywords() {
        let m = BugFixMatcher::new(["resolve"]);
        assert!(m.matches("Resolve race"));
        assert!(!m.matches("fix race"));
    }
}
