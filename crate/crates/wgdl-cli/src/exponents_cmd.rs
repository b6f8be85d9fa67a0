//! `exponents`: criticality class and index certificates as JSON.

use serde_json::{json, Value};
use wgdl::exponents::{criticality, parse_rational, solve_index1, solve_index2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Equation {
    /// Fourth-order Schrödinger, `Δ²`.
    #[value(name = "4nls")]
    Fourth,
    /// Second-order Schrödinger, `Δ`.
    Nls,
}

impl Equation {
    fn order(self) -> u32 {
        match self {
            Equation::Fourth => 2,
            Equation::Nls => 1,
        }
    }
}

/// Criticality report plus, for `4nls` inside the window, both index certificates.
pub fn report(d: usize, n: usize, eq: Equation, p: &str) -> wgdl::Result<Value> {
    let p = parse_rational(p)?;
    let crit = criticality(d, n, eq.order(), p)?;
    let mut out = json!({ "criticality": crit });
    if eq == Equation::Fourth && crit.in_range() {
        out["index1"] = match solve_index1(d, n, p) {
            Ok(sol) => {
                let checks = sol.verify(d, p);
                json!({ "verified": checks.iter().all(|c| c.holds), "solution": sol })
            }
            Err(inf) => json!({ "infeasible": inf }),
        };
        out["index2"] = match solve_index2(d, n, p) {
            Ok(sol) => {
                let checks = sol.verify(d, p);
                json!({ "verified": checks.iter().all(|c| c.holds), "solution": sol })
            }
            Err(inf) => json!({ "infeasible": inf }),
        };
    }
    Ok(out)
}
