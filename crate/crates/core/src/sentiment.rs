//! Message sentiment behind a pluggable classifier contract, with a
//! bundled lexicon as the default model.

use std::collections::BTreeSet;
use std::io::Write;
use std::process::{Command, Stdio};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Positive => "positive",
            Self::Negative => "negative",
            Self::Neutral => "neutral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "positive" => Some(Self::Positive),
            "negative" => Some(Self::Negative),
            "neutral" => Some(Self::Neutral),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("no labels to summarize")]
    EmptyInput,
    #[error("classifier `{cmd}` failed: {detail}")]
    External { cmd: String, detail: String },
    #[error("classifier returned {found} labels for {expected} messages")]
    LabelCount { expected: usize, found: usize },
    #[error("classifier returned unknown label `{0}`")]
    UnknownLabel(String),
}

/// A deterministic message classifier.
pub trait SentimentClassifier {
    fn model_id(&self) -> &str;

    fn classify_all(&self, messages: &[&str]) -> Result<Vec<SentimentLabel>, SentimentError>;
}

const POSITIVE: &str = include_str!("../data/lexicon/positive.txt");
const NEGATIVE: &str = include_str!("../data/lexicon/negative.txt");

fn parse_word_list(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Word-count classifier: positive hits minus negative hits. Negation is
/// not handled.
#[derive(Debug, Clone)]
pub struct LexiconClassifier {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
    model_id: String,
}

pub const LEXICON_MODEL_ID: &str = "lexicon-v1";

impl Default for LexiconClassifier {
    fn default() -> Self {
        Self {
            positive: parse_word_list(POSITIVE),
            negative: parse_word_list(NEGATIVE),
            model_id: LEXICON_MODEL_ID.to_string(),
        }
    }
}

impl LexiconClassifier {
    /// Builds a classifier from two word-list files' contents.
    pub fn from_lists(positive: &str, negative: &str, model_id: impl Into<String>) -> Self {
        Self {
            positive: parse_word_list(positive),
            negative: parse_word_list(negative),
            model_id: model_id.into(),
        }
    }

    pub fn score(&self, message: &str) -> i64 {
        words(message)
            .map(|w| i64::from(self.positive.contains(&w)) - i64::from(self.negative.contains(&w)))
            .sum()
    }

    pub fn classify(&self, message: &str) -> SentimentLabel {
        match self.score(message) {
            s if s > 0 => SentimentLabel::Positive,
            s if s < 0 => SentimentLabel::Negative,
            _ => SentimentLabel::Neutral,
        }
    }
}

impl SentimentClassifier for LexiconClassifier {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn classify_all(&self, messages: &[&str]) -> Result<Vec<SentimentLabel>, SentimentError> {
        Ok(messages.iter().map(|m| self.classify(m)).collect())
    }
}

/// Classifies with the bundled lexicon.
pub fn classify_message(message: &str) -> SentimentLabel {
    thread_local! {
        static DEFAULT: LexiconClassifier = LexiconClassifier::default();
    }
    DEFAULT.with(|c| c.classify(message))
}

/// Runs an executable that reads one message per line on stdin and writes
/// one label per line on stdout.
#[derive(Debug, Clone)]
pub struct ExternalClassifier {
    pub program: String,
    pub args: Vec<String>,
    pub model_id: String,
}

impl ExternalClassifier {
    /// Splits a command line on whitespace; the first word is the program.
    pub fn from_command_line(cmd: &str, model_id: impl Into<String>) -> Option<Self> {
        let mut parts = cmd.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(Self {
            program,
            args: parts.collect(),
            model_id: model_id.into(),
        })
    }

    fn fail(&self, detail: impl ToString) -> SentimentError {
        SentimentError::External {
            cmd: self.program.clone(),
            detail: detail.to_string(),
        }
    }
}

/// Escapes a message for the line protocol.
pub fn escape_line(message: &str) -> String {
    message
        .replace('\\', "\\\\")
        .replace('\r', "\\r")
        .replace('\n', "\\n")
}

impl SentimentClassifier for ExternalClassifier {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn classify_all(&self, messages: &[&str]) -> Result<Vec<SentimentLabel>, SentimentError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| self.fail(e))?;
        let mut input = String::new();
        for m in messages {
            input.push_str(&escape_line(m));
            input.push('\n');
        }
        let mut stdin = child.stdin.take().ok_or_else(|| self.fail("no stdin"))?;
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let output = child.wait_with_output().map_err(|e| self.fail(e))?;
        writer
            .join()
            .map_err(|_| self.fail("writer thread panicked"))?
            .map_err(|e| self.fail(e))?;
        if !output.status.success() {
            return Err(self.fail(format!(
                "exit status {}: {}",
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        let labels = text
            .lines()
            .map(|l| SentimentLabel::parse(l).ok_or_else(|| SentimentError::UnknownLabel(l.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if labels.len() != messages.len() {
            return Err(SentimentError::LabelCount {
                expected: messages.len(),
                found: labels.len(),
            });
        }
        Ok(labels)
    }
}

/// 100 · (#negative / total).
pub fn negative_commit_percentage(labels: &[SentimentLabel]) -> Result<f64, SentimentError> {
    if labels.is_empty() {
        return Err(SentimentError::EmptyInput);
    }
    let neg = labels.iter().filter(|l| **l == SentimentLabel::Negative).count();
    Ok(100.0 * neg as f64 / labels.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use SentimentLabel::*;

    #[test]
    fn lexicon_examples() {
        let c = LexiconClassifier::default();
        assert_eq!(c.score("great cleanup, works nicely"), 2);
        assert_eq!(c.classify("great cleanup, works nicely"), Positive);
        assert_eq!(c.score("horrible bug, broken build"), -3);
        assert_eq!(c.classify("horrible bug, broken build"), Negative);
        assert_eq!(classify_message(""), Neutral);
        assert_eq!(c.model_id(), "lexicon-v1");
    }

    #[test]
    fn percentages() {
        let mut l = vec![Neutral; 10];
        l[3] = Negative;
        l[7] = Negative;
        assert_eq!(negative_commit_percentage(&l).unwrap(), 20.0);
        assert_eq!(negative_commit_percentage(&[Positive; 7]).unwrap(), 0.0);
        assert_eq!(negative_commit_percentage(&[Negative; 3]).unwrap(), 100.0);
        assert!(negative_commit_percentage(&[]).is_err());
    }

    #[test]
    fn escaping_keeps_one_line() {
        assert_eq!(escape_line("a\nb\\c"), "a\\nb\\\\c");
    }

    #[cfg(unix)]
    #[test]
    fn external_protocol_round_trip() {
        let c = ExternalClassifier {
            program: "sh".into(),
            args: vec!["-c".into(), "while read -r l; do echo negative; done".into()],
            model_id: "shell".into(),
        };
        let labels = c.classify_all(&["one", "two\nlines"]).unwrap();
        assert_eq!(labels, vec![Negative, Negative]);
        let bad = ExternalClassifier {
            program: "sh".into(),
            args: vec!["-c".into(), "cat >/dev/null; echo maybe".into()],
            model_id: "bad".into(),
        };
        assert!(matches!(bad.classify_all(&["x"]), Err(SentimentError::UnknownLabel(_))));
    }

    proptest! {
        #[test]
        fn case_and_punctuation_invariant(words in proptest::collection::vec("[a-zA-Z]{1,8}", 0..8), punct in "[.,!?;: ]{1,3}") {
            let plain = words.join(" ");
            let shouted = words.iter().map(|w| w.to_uppercase()).collect::<Vec<_>>().join(&punct);
            prop_assert_eq!(classify_message(&plain), classify_message(&shouted));
        }

        #[test]
        fn percentage_bounded_and_order_free(codes in proptest::collection::vec(0u8..3, 1..50)) {
            let labels: Vec<_> = codes.iter().map(|c| [Positive, Negative, Neutral][*c as usize]).collect();
            let p = negative_commit_percentage(&labels).unwrap();
            prop_assert!((0.0..=100.0).contains(&p));
            let mut rev = labels.clone();
            rev.reverse();
            prop_assert_eq!(p, negative_commit_percentage(&rev).unwrap());
        }
    }
}
