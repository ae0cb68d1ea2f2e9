use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use torsion_core::family::ScatteringFamily;
use torsion_core::gluing::{circle_gluing_check, zeta_gluing_model_check, CircleGeometry, GluingScenario};
use torsion_core::linalg::{from_real_diag, identity, CMat, CVec, C64};
use torsion_core::mayer_vietoris::{convergence_batch, random_l2_dims, Perturbation, ScaledDiagram};
use torsion_core::report::{full_report, CheckRecord, Report};
use torsion_core::sample::{child_seed, lagrangian, rng};
use torsion_core::scattering::YModel;
use torsion_core::spectra::{lambda_roots, Mode};
use torsion_core::suite::run_all;
use torsion_core::zeta::model_zeta_prime0;

use crate::config::{to_canonical_json, RunConfig};
use crate::output::{fmt17, write_artifact, Table};

pub enum Status {
    Passed,
    Failed { report: PathBuf },
}

pub fn parse_window(s: &str) -> Result<[f64; 2]> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| anyhow!("window must look like lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().with_context(|| format!("bad window start {lo:?}"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("bad window end {hi:?}"))?;
    Ok([lo, hi])
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| x.trim().parse::<f64>().with_context(|| format!("bad number {x:?}"))).collect()
}

fn diag_phases(p: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(p.len(), p.iter().map(|&t| C64::from_polar(1.0, t))))
}

fn parse_size(rest: Option<&str>) -> Result<usize> {
    match rest {
        None => Ok(1),
        Some(n) => n.parse().with_context(|| format!("bad size {n:?}")),
    }
}

/// Constant matrices: `identity[:n]`, `minus-identity[:n]`, `phases:t1,..`.
fn parse_constant(spec: &str) -> Result<Option<CMat>> {
    let (head, rest) = match spec.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (spec, None),
    };
    Ok(match head {
        "identity" => Some(identity(parse_size(rest)?)),
        "minus-identity" => Some(-identity(parse_size(rest)?)),
        "phases" => Some(diag_phases(&parse_list(rest.ok_or_else(|| anyhow!("phases:t1,t2,.. needs a list"))?)?)),
        _ => None,
    })
}

pub fn parse_family(spec: &str) -> Result<ScatteringFamily> {
    if let Some(c) = parse_constant(spec)? {
        return Ok(ScatteringFamily::constant(c));
    }
    if let Some(rest) = spec.strip_prefix("linear:") {
        let v = parse_list(rest)?;
        let signs: Vec<f64> = v.iter().map(|x| if x.is_sign_negative() { -1.0 } else { 1.0 }).collect();
        let rates: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        return Ok(ScatteringFamily::Exponential {
            base: from_real_diag(&signs),
            generator: from_real_diag(&rates),
            radius: f64::INFINITY,
        });
    }
    bail!("unknown family {spec:?}")
}

fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "full" => Ok(Mode::Full),
        "boundary" => Ok(Mode::Boundary),
        _ => bail!("mode must be full or boundary, got {s:?}"),
    }
}

/// Writes the report; `Failed` carries its path.
fn finish(cfg: &RunConfig, name: &str, report: &Report) -> Result<Status> {
    let path = write_artifact(&cfg.resolved_out_dir(), name, &to_canonical_json(report))?;
    Ok(if report.passed() { Status::Passed } else { Status::Failed { report: path } })
}

/// Largest residual accepted for a reported root.
const ROOT_RESIDUAL: f64 = 1e-9;

pub fn spectrum(cfg: &RunConfig) -> Result<Status> {
    let s = &cfg.spectrum;
    let family = parse_family(&s.family)?;
    let set = lambda_roots(&family, s.r, (s.window[0], s.window[1]), parse_mode(&s.mode)?)?;
    let mut table = Table::new(&["R", "branch_index", "k", "lambda", "multiplicity", "residual", "provenance"]);
    let mut report = Report::default();
    for root in &set.roots {
        table.push(vec![
            fmt17(s.r),
            root.branch.to_string(),
            root.k.to_string(),
            fmt17(root.lambda),
            root.multiplicity.to_string(),
            fmt17(root.residual),
            "lambda_roots".into(),
        ]);
        report.checks.push(CheckRecord::numeric(
            format!("root[branch={},k={}]", root.branch, root.k),
            root.residual,
            ROOT_RESIDUAL,
            "lambda_roots",
        ));
    }
    let csv = table.to_csv();
    print!("{csv}");
    write_artifact(&cfg.resolved_out_dir(), "spectrum.csv", &csv)?;
    finish(cfg, "spectrum_report.json", &report)
}

pub fn zeta(cfg: &RunConfig) -> Result<Status> {
    let c = parse_constant(&cfg.zeta.c)?.ok_or_else(|| anyhow!("unknown matrix {:?}", cfg.zeta.c))?;
    let v = model_zeta_prime0(&c, cfg.zeta.r)?;
    println!("zeta'(0) = {}", fmt17(v));
    Ok(Status::Passed)
}

pub fn mv(cfg: &RunConfig) -> Result<Status> {
    let m = &cfg.mv;
    let y = YModel::new(m.h.clone());
    let diagrams: Vec<ScaledDiagram> = (0..m.scenarios)
        .map(|i| {
            let seed = child_seed(cfg.seed, i as u64);
            let mut g = rng(seed);
            let l1 = lagrangian(&mut g, &y);
            let l2 = lagrangian(&mut g, &y);
            let (k1, k2) = random_l2_dims(&mut g, y.top_degree(), 2);
            let d = ScaledDiagram::new(l1, l2, 1.0).with_l2_parts(k1, k2);
            if m.perturbation > 0.0 {
                d.with_perturbation(Perturbation { magnitude: m.perturbation, seed: child_seed(seed, 7), decay: 1.0 })
            } else {
                d
            }
        })
        .collect();
    let mut table = Table::new(&["scenario", "R", "torsion", "rhs", "rel_error", "status", "provenance"]);
    let mut report = Report::default();
    for (i, sweep) in convergence_batch(cfg.exec, &diagrams, &m.r_grid).into_iter().enumerate() {
        let pts = sweep?;
        let monotone = pts.windows(2).all(|w| w[1].error <= w[0].error);
        let last = pts.last().map(|p| p.error).unwrap_or(0.0);
        for p in &pts {
            let status = if p.error <= m.tolerance { "ok" } else { "above_tolerance" };
            table.push(vec![
                i.to_string(),
                fmt17(p.r),
                fmt17(p.torsion),
                fmt17(p.rhs),
                fmt17(p.error),
                status.into(),
                "mv_torsion_scaled / mv_asymptotic_rhs".into(),
            ]);
        }
        report.checks.push(CheckRecord::flag(format!("scenario[{i}].monotone"), monotone, "", "convergence_sweep"));
        report.checks.push(CheckRecord::numeric(format!("scenario[{i}].last"), last, m.tolerance, "convergence_sweep"));
    }
    let csv = table.to_csv();
    print!("{csv}");
    write_artifact(&cfg.resolved_out_dir(), "mv.csv", &csv)?;
    finish(cfg, "mv_report.json", &report)
}

pub fn gluing(cfg: &RunConfig) -> Result<Status> {
    let gc = &cfg.gluing;
    let y = YModel::new(gc.h.clone());
    let scenarios: Vec<GluingScenario> = (0..gc.scenarios)
        .map(|i| {
            let mut g = rng(child_seed(cfg.seed, i as u64));
            let l1 = lagrangian(&mut g, &y);
            let l2 = lagrangian(&mut g, &y);
            GluingScenario::new(l1, l2, gc.r_grid.clone(), gc.tolerance)
        })
        .collect::<torsion_core::Result<_>>()?;
    let circles: Vec<(CircleGeometry, f64)> =
        gc.circles.iter().map(|&[a, b, r]| Ok((CircleGeometry::new(a, b)?, r))).collect::<torsion_core::Result<_>>()?;

    let mut table = Table::new(&["case", "R", "lhs", "rhs", "abs_error", "status", "provenance"]);
    let status = |ok: bool| if ok { "pass" } else { "fail" }.to_string();
    for (i, s) in scenarios.iter().enumerate() {
        for row in zeta_gluing_model_check(s)? {
            table.push(vec![
                format!("scenario[{i}]"),
                fmt17(row.r),
                fmt17(row.lhs),
                fmt17(row.rhs),
                fmt17(row.abs_error),
                status(row.passed),
                "zeta_gluing_model_check".into(),
            ]);
        }
    }
    for (g, r) in &circles {
        let c = circle_gluing_check(g, *r)?;
        table.push(vec![
            format!("circle[a={},b={}]", g.a, g.b),
            fmt17(*r),
            fmt17(c.combination),
            fmt17(c.expected),
            fmt17(c.abs_error),
            status(c.passed),
            "circle_gluing_check".into(),
        ]);
    }
    let csv = table.to_csv();
    print!("{csv}");
    write_artifact(&cfg.resolved_out_dir(), "gluing.csv", &csv)?;
    finish(cfg, "gluing_report.json", &full_report(cfg.exec, &scenarios, &circles))
}

pub fn verify(cfg: &RunConfig) -> Result<Status> {
    let mut report = Report::default();
    for o in run_all(cfg.exec, cfg.seed) {
        println!("criterion {} [{}] {}: {}", o.id, if o.passed { "PASS" } else { "FAIL" }, o.title, o.summary);
        if !o.passed && o.report.passed() {
            report.checks.push(CheckRecord::flag(
                format!("criterion[{}].runtime", o.id),
                false,
                format!("{:.2}s over a budget of {:.0}s", o.elapsed_s, o.budget_s),
                "suite",
            ));
        }
        report.extend(o.report);
    }
    finish(cfg, "report.json", &report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_parse() {
        assert_eq!(parse_family("identity:3").unwrap().dim(), 3);
        assert!(parse_family("phases:0.5,-0.5").unwrap().is_constant());
        assert!(!parse_family("linear:+0.2,-0.1").unwrap().is_constant());
        assert!(parse_family("nonsense").is_err());
        assert_eq!(parse_window("-1:2.5").unwrap(), [-1.0, 2.5]);
        assert!(parse_window("1-2").is_err());
    }

    #[test]
    fn minus_identity_zeta_is_log_two() {
        let c = parse_constant("minus-identity").unwrap().unwrap();
        let v = model_zeta_prime0(&c, 7.0).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);
    }
}
