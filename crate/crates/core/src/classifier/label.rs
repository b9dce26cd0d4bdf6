use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Treatment-response class. `Respondent` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Respondent,
    NonRespondent,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 2] = [ClassLabel::Respondent, ClassLabel::NonRespondent];

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Respondent => "respondent",
            ClassLabel::NonRespondent => "non-respondent",
        }
    }

    pub fn index(self) -> usize {
        match self {
            ClassLabel::Respondent => 0,
            ClassLabel::NonRespondent => 1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == ClassLabel::Respondent
    }

    pub fn other(self) -> Self {
        match self {
            ClassLabel::Respondent => ClassLabel::NonRespondent,
            ClassLabel::NonRespondent => ClassLabel::Respondent,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "respondent" | "r" | "1" => Ok(ClassLabel::Respondent),
            "non-respondent" | "nonrespondent" | "n" | "0" => Ok(ClassLabel::NonRespondent),
            other => Err(Error::argument(format!("unknown class label '{other}'"))),
        }
    }
}

/// Parses an optional label where `none` or the empty string mean unlabeled.
pub fn parse_optional_label(s: &str) -> Result<Option<ClassLabel>> {
    match s.trim() {
        "" | "none" | "-" => Ok(None),
        other => other.parse().map(Some),
    }
}

pub fn optional_label_name(label: Option<ClassLabel>) -> &'static str {
    label.map_or("none", ClassLabel::name)
}
