//! Library values against frozen mpmath values and hand-computed examples.

use std::f64::consts::PI;

use serde::Deserialize;
use torsion_core::gluing::{circle_zetas, CircleGeometry};
use torsion_core::linalg::{c, from_real_rows, projection_pair_detstar, HermitianSpace, OrthoProjection};
use torsion_core::mayer_vietoris::{build_l_sequence, torsion_l, torsion_l_closed_form};
use torsion_core::scattering::{LimitingSubspace, YModel};
use torsion_core::suite::ORACLE_VALUES;
use torsion_core::zeta::{hurwitz_zeta_with_derivative, single_progression_hurwitz, single_progression_lerch};

#[derive(Deserialize)]
struct Hurwitz {
    s: f64,
    a: f64,
    value: f64,
    derivative: f64,
}

#[derive(Deserialize)]
struct Circle {
    a: f64,
    b: f64,
    r: f64,
    zeta_circle: f64,
    zeta_arc1: f64,
    zeta_arc2: f64,
}

#[derive(Deserialize)]
struct ProgressionValue {
    theta: f64,
    r: f64,
    value: f64,
}

#[derive(Deserialize)]
struct Oracles {
    hurwitz: Vec<Hurwitz>,
    circle: Vec<Circle>,
    progression: Vec<ProgressionValue>,
}

fn oracles() -> Oracles {
    serde_json::from_str(ORACLE_VALUES).unwrap()
}

#[test]
fn hurwitz_matches_mpmath() {
    for h in oracles().hurwitz {
        let (v, d) = hurwitz_zeta_with_derivative(c(h.s, 0.0), h.a).unwrap();
        // for negative s the direct sum cancels terms of size (8 + a)^{-s}
        let cond = if h.s < 0.0 { (8.0 + h.a).powf(-h.s) } else { 1.0 };
        let tol = |x: f64| 1e-14 * cond.max(100.0) * x.abs().max(1.0);
        assert!((v.re - h.value).abs() <= tol(h.value), "zeta({}, {}) = {} vs {}", h.s, h.a, v.re, h.value);
        assert!((d.re - h.derivative).abs() <= tol(h.derivative), "zeta'({}, {}) = {} vs {}", h.s, h.a, d.re, h.derivative);
        assert!(v.im.abs() < 1e-14 && d.im.abs() < 1e-14);
    }
}

#[test]
fn progression_matches_mpmath() {
    for p in oracles().progression {
        let h = single_progression_hurwitz(p.theta, p.r).unwrap();
        let l = single_progression_lerch(p.theta, p.r).unwrap();
        let tol = 1e-11 * p.value.abs().max(1.0);
        assert!((h - p.value).abs() <= tol, "theta {} R {}: {h} vs {}", p.theta, p.r, p.value);
        assert!((l - p.value).abs() <= tol, "theta {} R {}: {l} vs {}", p.theta, p.r, p.value);
    }
}

#[test]
fn circle_matches_mpmath() {
    for fx in oracles().circle {
        let g = CircleGeometry::new(fx.a, fx.b).unwrap();
        let [z, z1, z2] = circle_zetas(&g, fx.r).unwrap();
        assert!((z - fx.zeta_circle).abs() < 1e-10, "{z} vs {}", fx.zeta_circle);
        assert!((z1 - fx.zeta_arc1).abs() < 1e-10, "{z1} vs {}", fx.zeta_arc1);
        assert!((z2 - fx.zeta_arc2).abs() < 1e-10, "{z2} vs {}", fx.zeta_arc2);
    }
}

/// Two lines at angle `t` in a plane with metric `diag(1, w²)`: the
/// combination is `cos` of the angle measured in that metric.
#[test]
fn projection_pair_on_weighted_plane() {
    for (t, w) in [(0.3, 1.0), (1.1, 2.0), (PI / 2.0, 0.5), (0.0, 3.0)] {
        let space = HermitianSpace::new(from_real_rows(2, 2, &[1.0, 0.0, 0.0, w * w])).unwrap();
        let e = from_real_rows(2, 1, &[1.0, 0.0]);
        let v = from_real_rows(2, 1, &[t.cos(), t.sin()]);
        let p1 = OrthoProjection::onto_span(space.clone(), &e).unwrap();
        let p2 = OrthoProjection::onto_span(space, &v).unwrap();
        let measured = (t.cos() / (t.cos().powi(2) + (w * t.sin()).powi(2)).sqrt()).abs();
        // a right angle contributes nothing to det*
        let expected = if measured < 1e-12 { 1.0 } else { measured };
        let got = projection_pair_detstar(&p1, &p2).unwrap();
        assert!((got - expected).abs() < 1e-12, "t {t} w {w}: {got} vs {expected}");
    }
}

/// Absolute lines at angle `t` in `H⁰ = C²`: the only non-trivial map pairs
/// the two relative complements, with determinant `sin t`.
#[test]
fn torsion_of_lines_in_a_plane() {
    let y = YModel::new(vec![2]);
    for t in [0.1f64, 0.8, 1.5] {
        let l1 = LimitingSubspace::from_abs(y.clone(), vec![from_real_rows(2, 1, &[1.0, 0.0])]).unwrap();
        let l2 = LimitingSubspace::from_abs(y.clone(), vec![from_real_rows(2, 1, &[t.cos(), t.sin()])]).unwrap();
        let seq = build_l_sequence(&l1, &l2).unwrap();
        let expected = 1.0 / t.sin();
        assert!((torsion_l(&seq).unwrap() - expected).abs() < 1e-12);
        assert!((torsion_l_closed_form(&l1, &l2).unwrap() - expected).abs() < 1e-12);
    }
}
