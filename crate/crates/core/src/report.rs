//! Verification reports shared by the array and EPDA checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which defining condition a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Every row carries exactly `r` stars.
    A1,
    /// Every slot occurs `min{2r, K}` times, at most once per column.
    A2,
    /// Rows of every slot subarray hold at most `r` integers.
    A3,
    /// `S * g = N * (K - r)`.
    #[serde(rename = "counting")]
    Counting,
    /// EPDA: every column carries exactly `Z` stars.
    #[serde(rename = "epda-i")]
    EpdaColumnStars,
    /// EPDA: every slot occurs `g` times, at most once per column.
    #[serde(rename = "epda-ii")]
    EpdaRegularity,
    /// EPDA: condition A3 under the declared `r`.
    #[serde(rename = "epda-iii")]
    EpdaSubarray,
    /// EPDA: declared parameters out of their admissible range.
    #[serde(rename = "epda-params")]
    EpdaParams,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::A1 => "A1",
            Condition::A2 => "A2",
            Condition::A3 => "A3",
            Condition::Counting => "counting",
            Condition::EpdaColumnStars => "epda-i",
            Condition::EpdaRegularity => "epda-ii",
            Condition::EpdaSubarray => "epda-iii",
            Condition::EpdaParams => "epda-params",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub location: String,
    pub detail: String,
}

/// Outcome of a verification pass. `passed` is true exactly when
/// `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl Default for VerificationReport {
    fn default() -> Self {
        Self::new()
    }
}

impl VerificationReport {
    pub fn new() -> Self {
        Self {
            passed: true,
            violations: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        condition: Condition,
        location: impl Into<String>,
        detail: impl Into<String>,
    ) {
        self.violations.push(Violation {
            condition,
            location: location.into(),
            detail: detail.into(),
        });
        self.passed = false;
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.passed &= other.passed;
        self.violations.extend(other.violations);
    }

    /// True if any violation cites `condition`.
    pub fn fails(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            return writeln!(f, "passed");
        }
        writeln!(f, "failed ({} violations)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  [{}] {}: {}", v.condition, v.location, v.detail)?;
        }
        Ok(())
    }
}
