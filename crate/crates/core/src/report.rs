//! Machine-readable check reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gluing::{circle_gluing_check, zeta_gluing_model_check, CircleGeometry, GluingScenario};
use crate::mayer_vietoris::{build_l_sequence, torsion_l, torsion_l_forms};
use crate::scattering::chi_prime_top;

/// Bumped whenever a field changes meaning.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    /// Name of the violated invariant when the check failed on one.
    pub invariant: Option<String>,
    pub detail: String,
    /// Which operation produced the numbers.
    pub provenance: String,
}

impl CheckRecord {
    pub fn numeric(name: impl Into<String>, residual: f64, tolerance: f64, provenance: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            residual: Some(residual),
            tolerance: Some(tolerance),
            invariant: None,
            detail: String::new(),
            provenance: provenance.into(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>, provenance: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            residual: None,
            tolerance: None,
            invariant: None,
            detail: detail.into(),
            provenance: provenance.into(),
        }
    }

    pub fn failure(name: impl Into<String>, err: &Error, provenance: impl Into<String>) -> Self {
        let invariant = match err {
            Error::Invariant { name, .. } => Some(name.to_string()),
            _ => None,
        };
        Self {
            name: name.into(),
            passed: false,
            residual: None,
            tolerance: None,
            invariant,
            detail: err.to_string(),
            provenance: provenance.into(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub checks: Vec<CheckRecord>,
    /// Empirically fitted constants, by name.
    pub fitted: BTreeMap<String, f64>,
}

impl Default for Report {
    fn default() -> Self {
        Self { version: REPORT_VERSION, checks: Vec::new(), fitted: BTreeMap::new() }
    }
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.fitted.extend(other.fitted);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Report = serde_json::from_str(s).map_err(|e| Error::Domain(format!("bad report: {e}")))?;
        if r.version != REPORT_VERSION {
            return Err(Error::Domain(format!("report version {} is not {REPORT_VERSION}", r.version)));
        }
        Ok(r)
    }
}

fn scenario_checks(i: usize, s: &GluingScenario) -> Vec<CheckRecord> {
    let tag = |what: &str| format!("scenario[{i}].{what}");
    let mut out = Vec::new();
    for (side, l) in [("l1", &s.l1), ("l2", &s.l2)] {
        match l.check_lagrangian() {
            Ok(()) => out.push(CheckRecord::flag(tag(&format!("{side}.lagrangian")), true, "", "LimitingSubspace::check_lagrangian")),
            Err(e) => out.push(CheckRecord::failure(tag(&format!("{side}.lagrangian")), &e, "LimitingSubspace::check_lagrangian")),
        }
    }
    match zeta_gluing_model_check(s) {
        Ok(rows) => out.extend(rows.iter().map(|row| {
            CheckRecord::numeric(tag(&format!("zeta_gluing[R={}]", row.r)), row.abs_error, s.tolerance, "zeta_gluing_model_check")
                .with_detail(format!("lhs = {:.17e}, rhs = {:.17e}", row.lhs, row.rhs))
        })),
        Err(e) => out.push(CheckRecord::failure(tag("zeta_gluing"), &e, "zeta_gluing_model_check")),
    }
    if s.l1.is_lagrangian() && s.l2.is_lagrangian() {
        let torsion = build_l_sequence(&s.l1, &s.l2).and_then(|seq| {
            let brute = torsion_l(&seq)?;
            let forms = torsion_l_forms(&s.l1, &s.l2)?;
            let chi = chi_prime_top(&s.l1, &s.l2)?;
            Ok((seq, brute, forms, chi))
        });
        match torsion {
            Ok((seq, brute, forms, chi)) => {
                out.push(CheckRecord::numeric(
                    tag("torsion_l"),
                    (brute / forms.c12 - 1.0).abs(),
                    1e-9,
                    "torsion_l vs torsion_l_closed_form",
                ));
                out.push(CheckRecord::numeric(
                    tag("torsion_l_forms"),
                    (forms.reflections / forms.c12 - 1.0).abs(),
                    1e-10,
                    "torsion_l_forms",
                ));
                out.push(CheckRecord::flag(
                    tag("chi_prime_identity"),
                    chi == seq.chi_prime(),
                    format!("scattering {chi}, sequence {}", seq.chi_prime()),
                    "chi_prime_top vs LSequence::chi_prime",
                ));
            }
            Err(e) => out.push(CheckRecord::failure(tag("l_sequence"), &e, "build_l_sequence")),
        }
    }
    out
}

/// Runs every scenario and circle check; failures are recorded, never raised.
pub fn full_report(exec: Exec, scenarios: &[GluingScenario], circles: &[(CircleGeometry, f64)]) -> Report {
    let mut report = Report::default();
    let idx: Vec<usize> = (0..scenarios.len()).collect();
    for recs in exec.map(&idx, |&i| scenario_checks(i, &scenarios[i])) {
        report.checks.extend(recs);
    }
    for (g, r) in circles {
        let name = format!("circle[a={},b={},R={}]", g.a, g.b, r);
        report.checks.push(match circle_gluing_check(g, *r) {
            Ok(c) => CheckRecord::numeric(name, c.abs_error, crate::gluing::CIRCLE_TOLERANCE, "circle_gluing_check")
                .with_detail(format!("combination = {:.17e}", c.combination)),
            Err(e) => CheckRecord::failure(name, &e, "circle_gluing_check"),
        });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMat;
    use crate::scattering::{LimitingSubspace, YModel};

    #[test]
    fn empty_report_passes() {
        let r = full_report(Exec::Sequential, &[], &[]);
        assert!(r.checks.is_empty() && r.passed());
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn corrupted_splitting_is_named() {
        let y = YModel::new(vec![1]);
        let good = LimitingSubspace::from_abs(y.clone(), vec![CMat::identity(1, 1)]).unwrap();
        // absolute part and relative part both full: not a complement pair
        let bad = LimitingSubspace::full(y);
        let s = GluingScenario::new(bad, good, vec![1.0], 1e-10).unwrap();
        let r = full_report(Exec::Sequential, &[s], &[]);
        assert!(!r.passed());
        let f = r.failures().next().unwrap();
        assert_eq!(f.invariant.as_deref(), Some("lagrangian_complement"));
    }
}
