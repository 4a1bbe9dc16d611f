//! Brute-force checks of the profiles and threshold reports.
//!
//! Areas here come from region mensuration only, never from the closed-form
//! profiles, and roots are checked by sign changes of residuals built from
//! those areas.

use std::fmt;

use serde::Serialize;

use crate::criticals::{full_report, Report, T2Criticals, T3Criticals};
use crate::error::Result;
use crate::mensuration::{region_boundary_area, region_volume, CandidateRegion, TorusProductSpec};
use crate::profiles::{default_law, Regime};
use crate::roots::RootRequest;
use crate::scalar::{rel_diff, Scalar};

/// Tolerance used by [`verify`], independent of the spec's own tolerance.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMin<T> {
    pub area: T,
    pub region: CandidateRegion<T>,
}

impl<T> CandidateMin<T> {
    pub fn regime(&self) -> Regime {
        Regime::with_circles(self.region.circle_subset.len())
    }
}

fn subset_area<T: Scalar>(spec: &TorusProductSpec<T>, subset: &[usize], v: T) -> Result<T> {
    let region = CandidateRegion::with_volume(spec, subset.to_vec(), v)?;
    region_boundary_area(spec, &region)
}

/// Smallest boundary area over the `2^k` products of circle subsets with a ball.
pub fn candidate_min_area<T: Scalar>(spec: &TorusProductSpec<T>, v: T) -> Result<CandidateMin<T>> {
    let k = spec.circles();
    let mut best: Option<CandidateMin<T>> = None;
    for mask in 0..(1usize << k) {
        let subset: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let region = CandidateRegion::with_volume(spec, subset, v)?;
        let area = region_boundary_area(spec, &region)?;
        if best.as_ref().is_none_or(|b| area < b.area) {
            best = Some(CandidateMin { area, region });
        }
    }
    Ok(best.expect("at least the ball candidate"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanReport<T> {
    /// Geometric midpoint of the bracketing pair.
    pub estimate: T,
    pub bracket: (T, T),
    /// Ratio between consecutive grid points.
    pub step: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanFailure {
    pub message: String,
}

impl fmt::Display for ScanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// First sign change of `f - g` on a log grid of `steps` intervals over `range`.
pub fn crossing_scan<T, F, G>(f: F, g: G, range: (T, T), steps: usize) -> Result<ScanReport<T>, ScanFailure>
where
    T: Scalar,
    F: Fn(T) -> T,
    G: Fn(T) -> T,
{
    let (lo, hi) = range;
    if !(lo > T::zero() && hi > lo && hi.is_finite()) || steps == 0 {
        return Err(ScanFailure {
            message: format!("bad scan range ({lo}, {hi}) with {steps} steps"),
        });
    }
    let h = (hi / lo).ln() / T::from_usize(steps).expect("step count");
    let at = |i: usize| {
        if i == steps {
            hi
        } else {
            lo * (h * T::from_usize(i).expect("index")).exp()
        }
    };
    let mut x = lo;
    let mut d = f(x) - g(x);
    for i in 1..=steps {
        let y = at(i);
        let e = f(y) - g(y);
        if d != T::zero() && (e == T::zero() || (d < T::zero()) != (e < T::zero())) {
            return Ok(ScanReport {
                estimate: (x * y).sqrt(),
                bracket: (x, y),
                step: h.exp(),
            });
        }
        x = y;
        d = e;
    }
    Err(ScanFailure {
        message: format!("no sign change of f - g on ({lo}, {hi})"),
    })
}

/// True when `residual` changes sign across `(1 +- 10 tol) root` or is
/// already within `tol` of zero at `root`.
pub fn bisect_verify<T: Scalar>(residual: impl Fn(T) -> T, root: T, tol: T) -> bool {
    let at = residual(root);
    if at.is_nan() {
        return false;
    }
    if at.abs() <= tol {
        return true;
    }
    let w = T::lit(10.0) * tol;
    let lo = residual(root * (T::one() - w));
    let hi = residual(root * (T::one() + w));
    (lo < T::zero() && hi > T::zero()) || (lo > T::zero() && hi < T::zero())
}

/// Outcome of one oracle check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Checker<T> {
    tol: T,
    prefix: String,
    checks: Vec<Check>,
}

impl<T: Scalar> Checker<T> {
    fn new(tol: T, prefix: &str) -> Self {
        Checker {
            tol,
            prefix: prefix.to_string(),
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: format!("{}{name}", self.prefix),
            passed,
            detail,
        });
    }

    fn root(&mut self, name: &str, root: T, residual: impl Fn(T) -> T) {
        let passed = bisect_verify(&residual, root, self.tol);
        let detail = format!("root {root:e}, residual {:e}", residual(root));
        self.push(name, passed, detail);
    }

    fn equal(&mut self, name: &str, got: T, want: T) {
        let passed = rel_diff(got, want) <= self.tol;
        self.push(name, passed, format!("reported {got:e}, recomputed {want:e}"));
    }

    fn holds(&mut self, name: &str, passed: bool, detail: String) {
        self.push(name, passed, detail);
    }
}

// Mensuration-only building blocks. Errors surface as NaN so the affected
// check fails instead of aborting the suite.

fn ball_area<T: Scalar>(m: u32, v: T) -> T {
    TorusProductSpec::new(Vec::new(), m)
        .and_then(|s| subset_area(&s, &[], v))
        .unwrap_or(T::nan())
}

fn circle_area<T: Scalar>(n: u32, r: T, v: T) -> T {
    TorusProductSpec::new(vec![r], n)
        .and_then(|s| candidate_min_area(&s, v))
        .map_or(T::nan(), |c| c.area)
}

fn slab_area<T: Scalar>(spec: &TorusProductSpec<T>, v: T) -> T {
    let all: Vec<usize> = (0..spec.circles()).collect();
    subset_area(spec, &all, v).unwrap_or(T::nan())
}

/// Volume where the ball and the cylinder in `S^1_r x R^n` have equal area,
/// found by bisection on the mensuration formulas.
pub fn oracle_beta<T: Scalar>(n: u32, r: T) -> T {
    let spec = match TorusProductSpec::new(vec![r], n) {
        Ok(s) => s,
        Err(_) => return T::nan(),
    };
    let gap = |v: T| {
        let ball = subset_area(&spec, &[], v).unwrap_or(T::nan());
        let cyl = subset_area(&spec, &[0], v).unwrap_or(T::nan());
        ball - cyl
    };
    let two = T::lit(2.0);
    let (mut lo, mut hi) = (T::one(), T::one());
    for _ in 0..400 {
        if gap(lo) < T::zero() {
            break;
        }
        lo = lo / two;
    }
    for _ in 0..400 {
        if gap(hi) > T::zero() {
            break;
        }
        hi = hi * two;
    }
    if !(gap(lo) < T::zero() && gap(hi) > T::zero()) {
        return T::nan();
    }
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Checks every constant of a `T^2 x R^n` report against its defining equation.
pub fn verify_t2<T: Scalar>(report: &T2Criticals<T>, tol: T) -> Vec<Check> {
    verify_t2_prefixed(report, tol, "")
}

fn verify_t2_prefixed<T: Scalar>(r: &T2Criticals<T>, tol: T, prefix: &str) -> Vec<Check> {
    let spec = &r.spec;
    let n = spec.euclid_dim();
    let (r1, r2) = (spec.radii()[0], spec.radii()[1]);
    let pi = T::PI();
    let two = T::lit(2.0);
    let beta1 = oracle_beta(n, r1);
    let beta2 = oracle_beta(n, r2);
    let mut c = Checker::new(tol, prefix);

    c.root("theta_star", r.theta_star, |t| {
        pi * r1 * ball_area(n + 1, t) + t - beta2
    });
    c.root("sigma_star", r.sigma_star, |s| {
        pi * r2 * ball_area(n + 1, s) + s - beta1
    });
    let k_len = (two * pi * r1 * ball_area(n + 1, r.theta_star)).max(two * pi * r2 * ball_area(n + 1, r.sigma_star));
    let k_bal = (two * (beta2 - r.theta_star)).max(two * (beta1 - r.sigma_star));
    c.equal("K_star", r.k_star, k_len);
    c.equal("K_star_balance", r.k_star, k_bal);
    c.root("c_n", r.c_n, |v| circle_area(n + 1, r1, v) - r.k_star);

    let v_s = {
        let cyl = CandidateRegion::new(spec, vec![0], pi * r2).and_then(|x| region_volume(spec, &x));
        let ball = CandidateRegion::new(spec, vec![], pi * r1).and_then(|x| region_volume(spec, &x));
        match (cyl, ball) {
            (Ok(a), Ok(b)) => a.min(b),
            _ => T::nan(),
        }
    };
    c.equal("v_s", r.v_s, v_s);
    c.root("v0_1", r.v0_1, |v| circle_area(n + 1, r1, v) - slab_area(spec, v));
    c.root("v0_2", r.v0_2, |v| circle_area(n + 1, r2, v) - slab_area(spec, v));
    c.equal("v_star", r.v_star, r.v_s.min(r.c_n).min(r.v0_1));
    c.root("a_n", r.a_n, |v| {
        circle_area(n + 1, r1, v) - slab_area(spec, v) - two * beta1
    });
    c.root("b_n", r.b_n, |v| {
        circle_area(n + 1, r2, v) - slab_area(spec, v) - two * beta2
    });
    c.equal("v_dstar", r.v_dstar, r.a_n.max(r.b_n));
    c.holds(
        "threshold_order",
        r.v_star <= r.v0_1 && r.v0_1 < r.v_dstar && r.v0_1 < r.a_n && r.v0_2 < r.b_n,
        format!("v_star {:e}, v0_1 {:e}, v_dstar {:e}", r.v_star, r.v0_1, r.v_dstar),
    );
    c.checks
}

/// Checks every constant of a `T^3 x R^n` report, including both `T^2` sub-reports.
pub fn verify_t3<T: Scalar>(r: &T3Criticals<T>, tol: T) -> Vec<Check> {
    let spec = &r.spec;
    let n = spec.euclid_dim();
    let radii = spec.radii();
    let (r1, r2, r3) = (radii[0], radii[1], radii[2]);
    let pi = T::PI();
    let two = T::lit(2.0);
    let mut checks = verify_t2_prefixed(&r.base, tol, "base.");
    checks.extend(verify_t2_prefixed(&r.lifted, tol, "lifted."));
    let mut c = Checker::new(tol, "");

    c.equal("w_star", r.w_star, r.base.v_star.min(oracle_beta(n + 1, r1)));
    c.root("eta_star", r.eta_star, |e| pi * r3 * ball_area(n + 2, e) + e - r.w_star);
    c.equal("C_star", r.c_star, two * (r.w_star - r.eta_star));
    c.equal("C_star_length", r.c_star, two * pi * r3 * ball_area(n + 2, r.eta_star));
    c.root("u0", r.u0, |u| circle_area(n + 2, r1, u) - r.c_star);
    let embed = CandidateRegion::new(spec, vec![0], pi * r2)
        .and_then(|x| region_volume(spec, &x))
        .unwrap_or(T::nan());
    c.equal("u_star", r.u_star, r.u0.min(r.lifted.v_star).min(embed));
    c.root("slab_gap_root", r.slab_gap_root, |u| {
        slab_area(&r.lifted.spec, u) - slab_area(spec, u) - two * r.base.v_dstar
    });
    c.equal("u_dstar", r.u_dstar, r.lifted.v_dstar.max(r.slab_gap_root));
    c.holds(
        "threshold_order",
        r.w_star <= r.base.v_star && r.c_star > T::zero() && r.u_star <= r.u0 && r.u_star <= r.u_dstar,
        format!("u_star {:e}, u0 {:e}, u_dstar {:e}", r.u_star, r.u0, r.u_dstar),
    );
    checks.extend(c.checks);
    checks
}

/// Closed-form profile against the candidate minimum on a log grid.
pub fn verify_profile<T: Scalar>(spec: &TorusProductSpec<T>, range: (T, T), points: usize, tol: T) -> Result<Check> {
    let law = default_law(spec)?;
    let (lo, hi) = range;
    let mut worst = (T::zero(), lo);
    for i in 0..points {
        let t = T::from_usize(i).expect("index") / T::from_usize(points.max(2) - 1).expect("count");
        let v = lo * (hi / lo).powf(t);
        let d = rel_diff(law.value(v), candidate_min_area(spec, v)?.area);
        if !(d <= worst.0) {
            worst = (d, v);
        }
    }
    Ok(Check {
        name: "profile".to_string(),
        passed: worst.0 <= tol,
        detail: format!("largest relative gap {:e} at v = {:e}", worst.0, worst.1),
    })
}

/// Full oracle suite for a spec with a threshold report.
///
/// The report is recomputed with the default solver request so that a
/// loose tolerance in the spec file does not leak into verification.
pub fn verify<T: Scalar>(spec: &TorusProductSpec<T>) -> Result<Vec<Check>> {
    let tol = T::lit(VERIFY_TOL);
    let report = full_report(spec, &RootRequest::default())?;
    let mut checks = match &report {
        Report::TwoTorus(r) => verify_t2(r, tol),
        Report::ThreeTorus(r) => verify_t3(r, tol),
    };
    checks.push(verify_profile(spec, (T::lit(1e-3), T::lit(1e6)), 200, tol)?);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criticals::{ball_cylinder_crossing, t2_criticals, t3_pipeline};
    use crate::profiles::{beta, scp_profile};
    use std::f64::consts::PI;

    fn example() -> TorusProductSpec<f64> {
        let s = 1.0 / PI.sqrt();
        TorusProductSpec::new(vec![s, s], 2).unwrap()
    }

    #[test]
    fn candidate_examples() {
        let c = candidate_min_area(&example(), 1.0).unwrap();
        assert_eq!(c.regime(), Regime::Ball);
        assert!((c.area - 5.9618).abs() < 1e-4);
        let c = candidate_min_area(&example(), 1e6).unwrap();
        assert_eq!(c.regime(), Regime::Slab);
        assert!(rel_diff(c.area, 4.0 * PI * 1e3) < 1e-12);
        let one = TorusProductSpec::new(vec![1.0], 2).unwrap();
        let b = beta(2, 1.0).unwrap();
        let ball = subset_area(&one, &[], b).unwrap();
        let cyl = subset_area(&one, &[0], b).unwrap();
        assert!(rel_diff(ball, cyl) < 1e-9);
    }

    #[test]
    fn scans() {
        let one = TorusProductSpec::new(vec![1.0], 2).unwrap();
        let s = crossing_scan(
            |v| subset_area(&one, &[], v).unwrap(),
            |v| subset_area(&one, &[0], v).unwrap(),
            (1.0, 1000.0),
            1_000_000,
        )
        .unwrap();
        let want = 32.0 * PI.powi(4) / 81.0;
        assert!(s.bracket.0 <= want && want <= s.bracket.1);
        assert!(crossing_scan(|v: f64| v, |v| v, (1.0, 2.0), 100).is_err());

        let spec = example();
        let b2 = 2.0 * oracle_beta(2, 1.0 / PI.sqrt());
        let gap = crossing_scan(
            |v| circle_area(3, 1.0 / PI.sqrt(), v) - slab_area(&spec, v),
            |_| b2,
            (10.0, 1000.0),
            100_000,
        )
        .unwrap();
        assert!((gap.estimate - 55.84).abs() < 0.01);
        let v = ball_cylinder_crossing(
            &TorusProductSpec::new(vec![1.0 / PI.sqrt(); 2], 1).unwrap(),
            &RootRequest::default(),
        )
        .unwrap()
        .root;
        let line = TorusProductSpec::new(vec![1.0 / PI.sqrt(); 2], 1).unwrap();
        let s = crossing_scan(
            |v| ball_area(3, v),
            |v| subset_area(&line, &[0], v).unwrap(),
            (1.0, 100.0),
            100_000,
        )
        .unwrap();
        assert!(s.bracket.0 <= v && v <= s.bracket.1);
    }

    #[test]
    fn oracle_beta_matches_closed_form() {
        for n in 2..=7 {
            for r in [0.1, 1.0 / PI.sqrt(), 1.0, 2.0] {
                assert!(rel_diff(oracle_beta(n, r), beta(n, r).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn bisect_verify_cases() {
        assert!(bisect_verify(|x: f64| x - 7.0, 7.0, 1e-9));
        assert!(!bisect_verify(|x: f64| x - 7.0, 7.07, 1e-9));
        let r = t2_criticals(&example(), &RootRequest::default()).unwrap();
        let b2 = beta(2, 1.0 / PI.sqrt()).unwrap();
        let theta = |t: f64| PI.sqrt() * ball_area(3, t) + t - b2;
        assert!(bisect_verify(theta, r.theta_star, 1e-9));
        assert!(!bisect_verify(theta, r.theta_star * 1.01, 1e-9));
    }

    #[test]
    fn reports_pass() {
        for c in verify(&example()).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        let spec = TorusProductSpec::new(vec![1.0, 1.3, 2.0], 2).unwrap();
        let checks = verify(&spec).unwrap();
        assert!(checks.len() > 20);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }

    #[test]
    fn tampered_reports_fail() {
        let mut r = t2_criticals(&example(), &RootRequest::default()).unwrap();
        r.a_n *= 1.001;
        let failed: Vec<_> = verify_t2(&r, 1e-9)
            .into_iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert_eq!(failed, ["a_n", "v_dstar"]);
        let mut t = t3_pipeline(
            &TorusProductSpec::new(vec![1.0; 3], 2).unwrap(),
            &RootRequest::default(),
        )
        .unwrap();
        t.eta_star *= 0.999;
        assert!(verify_t3(&t, 1e-9).iter().any(|c| c.name == "eta_star" && !c.passed));
    }

    #[test]
    fn profile_agreement() {
        let c = verify_profile(&example(), (1e-3, 1e6), 200, 1e-9).unwrap();
        assert!(c.passed, "{}", c.detail);
        assert!(
            rel_diff(
                scp_profile(&example(), 3.0).unwrap().area,
                candidate_min_area(&example(), 3.0).unwrap().area
            ) < 1e-12
        );
    }
}
