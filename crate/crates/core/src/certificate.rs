use serde::{Deserialize, Serialize};

use crate::point::Point;

/// Witnesses kept per certificate; further violations are only counted.
pub const MAX_WITNESSES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    /// `d(F(x,y), F(u,v)) ≤ k/2 [d(x,u) + d(y,v)]` on product edges.
    GraphContraction,
    /// Set-valued analogue of [`Property::GraphContraction`].
    MultiGraphContraction,
    MixedMonotone,
    MixedMonotoneMulti,
    /// Edges along a convergent edge-monotone sequence reach its limit.
    LimitClosure,
    /// `d(x_n, y_n) ≤ kⁿ d(x_0, y_0)` along a trace.
    DiagonalDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Passed,
    Failed,
    /// The property's premise did not hold, so nothing was tested.
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Sample (or sequence) index of the witness.
    pub index: usize,
    pub points: Vec<Point>,
    pub measured: Vec<f64>,
    pub detail: String,
}

/// Result of a sampled hypothesis check. A passing certificate means "not
/// falsified on these samples", nothing more.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub property: Property,
    pub samples_tested: usize,
    pub outcome: Outcome,
    pub estimated_constant: Option<f64>,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    pub rng_seed: Option<u64>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Passed
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

pub(crate) struct CertificateBuilder {
    property: Property,
    rng_seed: Option<u64>,
    estimated_constant: Option<f64>,
    violation_count: usize,
    violations: Vec<Violation>,
    inapplicable: bool,
}

impl CertificateBuilder {
    pub(crate) fn new(property: Property, rng_seed: Option<u64>) -> Self {
        CertificateBuilder {
            property,
            rng_seed,
            estimated_constant: None,
            violation_count: 0,
            violations: Vec::new(),
            inapplicable: false,
        }
    }

    pub(crate) fn violation(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < MAX_WITNESSES {
            self.violations.push(v);
        }
    }

    pub(crate) fn inapplicable(&mut self, v: Violation) {
        self.inapplicable = true;
        self.violations.clear();
        self.violations.push(v);
        self.violation_count = 1;
    }

    pub(crate) fn estimate(&mut self, value: Option<f64>) {
        self.estimated_constant = value;
    }

    pub(crate) fn finish(mut self, samples_tested: usize) -> Certificate {
        self.violations.sort_by_key(|v| v.index);
        let outcome = if self.inapplicable {
            Outcome::Inapplicable
        } else if self.violations.is_empty() {
            Outcome::Passed
        } else {
            Outcome::Failed
        };
        Certificate {
            property: self.property,
            samples_tested,
            outcome,
            estimated_constant: self.estimated_constant,
            violation_count: self.violation_count,
            violations: self.violations,
            rng_seed: self.rng_seed,
        }
    }
}
