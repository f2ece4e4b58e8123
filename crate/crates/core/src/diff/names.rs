use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UNKNOWN_LABEL: &str = "Unknown";
/// Label for names in the camera's own `YYYYMMDD_HHMMSS` format.
pub const UNCHANGED_LABEL: &str = "Unchanged";

/// One row of a classifier table. Patterns are matched against the whole
/// name with any `.jpg`, `.jpeg` or `.png` extension removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamePattern {
    pub label: String,
    pub pattern: String,
}

const DEFAULT_PATTERNS: &[(&str, &str)] = &[
    (UNCHANGED_LABEL, r"\d{8}_\d{6}"),
    ("Facebook", r"\d{8}_\d{13,14}_\d{16,19}_o"),
    ("Instagram", r"\d{8}_\d{13,14}_\d{16,19}_n"),
    ("Flickr", r"\d{10,11}_[0-9a-f]{10}_o"),
    (
        "LinkedIn",
        r"[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}-original",
    ),
    ("Pinterest", r"[0-9a-f]{32}"),
    ("Telegram", r"IMG_\d{8}_\d{6}"),
    ("Tumblr", r"tumblr_[A-Za-z0-9]{19}_\d{3,4}"),
    ("Twitter", r"[A-Za-z0-9_-]{15}\.jpg-large"),
    ("Viber", r"image-0-02-05-[a-z0-9]{65}-V"),
    ("WeChat", r"mmexport\d{13}"),
    ("WhatsApp", r"IMG-\d{8}-WA\d{4}"),
    ("VK", r"[A-Za-z0-9_-]{11}"),
];

/// Regex table mapping a file name to the policy that produced it.
/// The first matching row wins.
#[derive(Debug, Clone)]
pub struct NameClassifier {
    rules: Vec<(String, Regex)>,
}

impl Default for NameClassifier {
    fn default() -> Self {
        let table: Vec<NamePattern> = DEFAULT_PATTERNS
            .iter()
            .map(|(l, p)| NamePattern {
                label: l.to_string(),
                pattern: p.to_string(),
            })
            .collect();
        Self::new(&table).expect("built-in patterns compile")
    }
}

impl NameClassifier {
    pub fn new(table: &[NamePattern]) -> Result<Self> {
        let rules = table
            .iter()
            .map(|row| {
                Regex::new(&format!("^(?:{})$", row.pattern))
                    .map(|re| (row.label.clone(), re))
                    .map_err(|e| {
                        Error::InvalidParameter(format!("name pattern for {}: {e}", row.label))
                    })
            })
            .collect::<Result<_>>()?;
        Ok(NameClassifier { rules })
    }

    pub fn default_table() -> Vec<NamePattern> {
        DEFAULT_PATTERNS
            .iter()
            .map(|(l, p)| NamePattern {
                label: l.to_string(),
                pattern: p.to_string(),
            })
            .collect()
    }

    pub fn classify(&self, filename: &str) -> &str {
        let base = filename.rsplit(['/', '\\']).next().unwrap_or(filename);
        let lower = base.to_ascii_lowercase();
        let stem = [".jpg", ".jpeg", ".png"]
            .iter()
            .find(|ext| lower.ends_with(*ext))
            .map_or(base, |ext| &base[..base.len() - ext.len()]);
        self.rules
            .iter()
            .find(|(_, re)| re.is_match(stem))
            .map_or(UNKNOWN_LABEL, |(label, _)| label.as_str())
    }
}

/// Classifies with the built-in table.
pub fn name_classify(filename: &str) -> String {
    NameClassifier::default().classify(filename).to_string()
}
