use std::fmt;
use std::time::Duration;

use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::engines::{rational_string, RationalJson};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// An asserted step of the argument being checked.
    Claimed,
    /// Computed here and cross-checked by an independent route.
    Consequence,
    /// Holds by construction.
    Definition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub provenance: Provenance,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim: String,
    pub checks: Vec<Check>,
    /// Only filled on request so reports stay byte-identical across runs.
    pub elapsed_ms: Option<u64>,
    #[serde(skip)]
    pub wall: Duration,
}

impl ClaimReport {
    pub fn new(claim: &str) -> Self {
        ClaimReport {
            claim: claim.to_string(),
            checks: Vec::new(),
            elapsed_ms: None,
            wall: Duration::ZERO,
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn with_timing(mut self) -> Self {
        self.elapsed_ms = Some(self.wall.as_millis() as u64);
        self
    }

    pub fn relation(
        &mut self,
        name: &str,
        expected: impl Into<String>,
        computed: impl Into<String>,
        pass: bool,
        provenance: Provenance,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            expected: expected.into(),
            computed: computed.into(),
            provenance,
            pass,
        });
    }

    /// Exact equality of two rationals.
    pub fn equal(&mut self, name: &str, expected: &BigRational, computed: &BigRational, provenance: Provenance) {
        self.relation(
            name,
            rational_string(expected),
            rational_string(computed),
            expected == computed,
            provenance,
        );
    }

    /// Strict `lhs < rhs`.
    pub fn less(&mut self, name: &str, lhs: &BigRational, rhs: &BigRational, provenance: Provenance) {
        self.relation(
            name,
            format!("{} < {}", rational_string(lhs), rational_string(rhs)),
            rational_string(&(rhs - lhs)),
            lhs < rhs,
            provenance,
        );
    }

    /// A count that must be zero, such as biconditional violations.
    pub fn zero_count(&mut self, name: &str, violations: u64, checked: u64, provenance: Provenance) {
        self.relation(
            name,
            "0 violations".to_string(),
            format!("{violations} violations in {checked} configurations"),
            violations == 0,
            provenance,
        );
    }

    /// A computed value with no independent expectation.
    pub fn report(&mut self, name: &str, value: &BigRational) {
        self.relation(name, "reported", rational_string(value), true, Provenance::Consequence);
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.claim, if self.pass() { "PASS" } else { "FAIL" })?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {} | expected {} | computed {} | {:?}",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.expected,
                c.computed,
                c.provenance
            )?;
        }
        if let Some(ms) = self.elapsed_ms {
            writeln!(f, "  elapsed {ms} ms")?;
        }
        Ok(())
    }
}

pub(crate) fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    RationalJson(r).serialize(s)
}
