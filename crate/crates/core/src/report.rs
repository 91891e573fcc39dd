//! Verification reports. A check never errors because an identity fails;
//! it returns the nonzero residuals instead.

use std::collections::BTreeSet;
use std::fmt;

use crate::matrix::PolyMatrix;
use crate::poly::Poly;

/// A nonzero residual of one identity, tagged with the family it belongs
/// to and the (zero-based) frame indices it was evaluated on.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub family: String,
    pub indices: Vec<usize>,
    pub value: PolyMatrix,
}

impl Residual {
    pub fn label(&self) -> String {
        let idx: Vec<String> = self.indices.iter().map(|i| (i + 1).to_string()).collect();
        format!("{}({})", self.family, idx.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub check: String,
    pub residuals: Vec<Residual>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(check: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            residuals: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }

    /// Records `value` unless it is identically zero.
    pub fn push(&mut self, family: &str, indices: &[usize], value: PolyMatrix) {
        if !value.is_zero() {
            self.residuals.push(Residual {
                family: family.to_string(),
                indices: indices.to_vec(),
                value,
            });
        }
    }

    pub fn push_vec(&mut self, family: &str, indices: &[usize], value: &[Poly], nvars: usize) {
        if value.iter().any(|p| !p.is_zero()) {
            self.push(family, indices, PolyMatrix::column_vector(value, nvars));
        }
    }

    pub fn push_poly(&mut self, family: &str, indices: &[usize], value: Poly) {
        if !value.is_zero() {
            let n = value.nvars();
            self.push(family, indices, PolyMatrix::from_fn(1, 1, n, |_, _| value.clone()));
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Appends the residuals of `other`, prefixing their families.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut r in other.residuals {
            if !prefix.is_empty() {
                r.family = format!("{prefix}.{}", r.family);
            }
            self.residuals.push(r);
        }
        self.notes.extend(other.notes);
    }

    pub fn families(&self) -> BTreeSet<String> {
        self.residuals.iter().map(|r| r.family.clone()).collect()
    }

    pub fn failing(&self, family: &str) -> bool {
        self.residuals.iter().any(|r| r.family == family)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, if self.passed() { "pass" } else { "fail" })?;
        for r in &self.residuals {
            write!(f, "\n  {} = {}", r.label(), r.value)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The two independent computations disagree.
    Disagree,
}

/// Two independently computed verdicts for the same statement.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub check: String,
    pub v1: Report,
    pub v2: Report,
}

impl Comparison {
    pub fn new(check: impl Into<String>, v1: Report, v2: Report) -> Self {
        Comparison { check: check.into(), v1, v2 }
    }

    pub fn agree(&self) -> bool {
        self.v1.passed() == self.v2.passed()
    }

    pub fn verdict(&self) -> Verdict {
        match (self.v1.passed(), self.v2.passed()) {
            (true, true) => Verdict::Pass,
            (false, false) => Verdict::Fail,
            _ => Verdict::Disagree,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {:?}", self.check, self.verdict())?;
        writeln!(f, "  [V1] {}", self.v1)?;
        write!(f, "  [V2] {}", self.v2)
    }
}
