//! JSON witness bundles: inputs, result and the transcript of checks run.

use serde::Serialize;
use serde_json::{json, Value};

use super::bd::BdReport;
use super::rebase::{full_chain, rebase_automorphism, verify};
use super::FiniteFlagPoint;
use crate::error::Result;
use crate::linalg::{Field, Form, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessBundle {
    pub kind: &'static str,
    pub field: String,
    pub inputs: Value,
    pub result: Value,
    pub transcript: Vec<Check>,
}

impl WitnessBundle {
    pub fn passed(&self) -> bool {
        self.transcript.iter().all(|c| c.passed)
    }
}

pub fn rebase_bundle<F: Field>(
    chain: &FiniteFlagPoint<F>,
    e: &Matrix<F>,
    e2: &Matrix<F>,
    form: Option<&Form<F>>,
) -> Result<WitnessBundle> {
    let form = form.or(chain.form());
    let alpha = rebase_automorphism(chain, e, e2, form)?;
    let full = full_chain(chain, form)?;
    let mut transcript = vec![Check::new("E and E' are compatible with the chain", true)];
    transcript.extend(verify(&full, e, e2, form, &alpha));
    Ok(WitnessBundle {
        kind: "rebase",
        field: e.field().name(),
        inputs: json!({ "chain": chain, "E": e, "E'": e2, "form": form }),
        result: json!({ "alpha": alpha }),
        transcript,
    })
}

pub fn bd_bundle(report: &BdReport) -> WitnessBundle {
    WitnessBundle {
        kind: "bd-square",
        field: report.field.clone(),
        inputs: json!({ "n": report.n, "sample": report.sample }),
        result: json!({ "checked": report.checked, "failures": report.failures, "example": report.example }),
        transcript: vec![
            Check::new("phi lands in the chosen Lagrangian component", report.in_component),
            Check::new("phi is injective on the sample", report.injective),
            Check::new("square commutes on every sample point", report.failures.is_empty()),
        ],
    }
}
