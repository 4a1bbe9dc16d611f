//! Threshold volumes for `T^2 x R^n` and `T^3 x R^n`.
//!
//! For `T^2 x R^n` the profile equals the `S^1_{r_1} x R^{n+1}` profile
//! below `v_star` and the slab law above `v_dstar`; every constant that
//! goes into those two thresholds is computed here, each with the residual
//! of its defining equation. The `T^3 x R^n` pipeline stacks on the
//! `T^2` reports at dimensions `n` and `n + 1`.

use serde::Serialize;

use crate::error::{Error, Guard, Result, WithConstant};
use crate::mensuration::{region_volume, CandidateRegion, TorusProductSpec};
use crate::profiles::{beta, circle_law, euclidean_law, product_law, slab2_law, slab3_law, PiecewiseProfile, Regime};
use crate::roots::{solve_increasing, solve_piecewise_gap, solve_power_gap, RootRequest, RootResult};
use crate::scalar::{rel_diff, Scalar};

/// Provenance of one reported constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRecord<T> {
    pub name: &'static str,
    pub value: T,
    /// Defining equation, in words.
    pub equation: &'static str,
    /// `lhs - rhs` of the defining equation at `value`, for solved constants.
    pub residual: Option<T>,
    /// Active candidate of the profile the constant was read off, if any.
    pub regime: Option<Regime>,
}

fn identity_tol<T: Scalar>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(1e3))
}

fn record<T: Scalar>(name: &'static str, value: T, equation: &'static str) -> ConstantRecord<T> {
    ConstantRecord {
        name,
        value,
        equation,
        residual: None,
        regime: None,
    }
}

fn solved<T: Scalar>(name: &'static str, root: &RootResult<T>, equation: &'static str) -> ConstantRecord<T> {
    ConstantRecord {
        residual: Some(root.residual),
        ..record(name, root.root, equation)
    }
}

fn on<T: Scalar>(mut rec: ConstantRecord<T>, law: &PiecewiseProfile<T>) -> ConstantRecord<T> {
    rec.regime = Some(law.segment_at(rec.value).regime);
    rec
}

/// Small-volume quantities for `T^2 x R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct T2Small<T> {
    /// Solves `pi r_1 I_{R^{n+1}}(theta) + theta = beta_n(r_2)`.
    pub theta_star: T,
    /// Solves `pi r_2 I_{R^{n+1}}(sigma) + sigma = beta_n(r_1)`.
    pub sigma_star: T,
    /// `max{2 pi r_1 I(theta*), 2 pi r_2 I(sigma*)}`.
    pub k_star: T,
    /// Same constant through the balance form `max{2(beta_n(r_2) - theta*), 2(beta_n(r_1) - sigma*)}`.
    pub k_star_balance: T,
    /// Volume where the `S^1_{r_1} x R^{n+1}` profile reaches `k_star`.
    pub c_n: T,
    /// Largest volume for which the relevant balls and cylinders still embed.
    pub v_s: T,
    /// Crossing of the `S^1_{r_1} x R^{n+1}` profile with the slab law.
    pub v0_1: T,
    /// `min{v_s, c_n, v0_1}`.
    pub v_star: T,
    pub records: Vec<ConstantRecord<T>>,
}

/// Large-volume quantities for `T^2 x R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct T2Large<T> {
    /// Solves `I_{S^1_{r_1} x R^{n+1}}(a) - f_n(a) = 2 beta_n(r_1)`.
    pub a_n: T,
    /// Solves `I_{S^1_{r_2} x R^{n+1}}(b) - f_n(b) = 2 beta_n(r_2)`.
    pub b_n: T,
    /// Crossing of the `S^1_{r_2} x R^{n+1}` profile with the slab law.
    pub v0_2: T,
    /// `max{a_n, b_n}`.
    pub v_dstar: T,
    pub records: Vec<ConstantRecord<T>>,
}

/// Full `T^2 x R^n` report.
#[derive(Debug, Clone, PartialEq)]
pub struct T2Criticals<T> {
    pub spec: TorusProductSpec<T>,
    pub theta_star: T,
    pub sigma_star: T,
    pub k_star: T,
    pub c_n: T,
    pub v_s: T,
    pub v0_1: T,
    pub v0_2: T,
    pub v_star: T,
    pub a_n: T,
    pub b_n: T,
    pub v_dstar: T,
    pub records: Vec<ConstantRecord<T>>,
}

/// Full `T^3 x R^n` report.
#[derive(Debug, Clone, PartialEq)]
pub struct T3Criticals<T> {
    pub spec: TorusProductSpec<T>,
    /// `min{v_star(r_1, r_2; n), beta_{n+1}(r_1)}`.
    pub w_star: T,
    /// Solves `pi r_3 I_{R^{n+2}}(eta) + eta = w_star`.
    pub eta_star: T,
    /// `2 (w_star - eta_star)`.
    pub c_star: T,
    /// Volume where the `S^1_{r_1} x R^{n+2}` profile reaches `c_star`.
    pub u0: T,
    /// `min{u0, v_star(r_1, r_2; n+1), V(S^1_{r_1} x B^{n+2}_{pi r_2})}`.
    pub u_star: T,
    /// Solves `f_{n+1}(u) - g_n(u) = 2 v_dstar(r_1, r_2; n)`.
    pub slab_gap_root: T,
    /// `max{v_dstar(r_1, r_2; n+1), slab_gap_root}`.
    pub u_dstar: T,
    /// `T^2` report at the same `n`.
    pub base: T2Criticals<T>,
    /// `T^2` report at `n + 1`.
    pub lifted: T2Criticals<T>,
    pub records: Vec<ConstantRecord<T>>,
}

fn two_radii<T: Scalar>(spec: &TorusProductSpec<T>) -> (T, T) {
    (spec.radii()[0], spec.radii()[1])
}

/// Small-volume half of the `T^2 x R^n` pipeline.
pub fn t2_small<T: Scalar>(spec: &TorusProductSpec<T>, req: &RootRequest<T>) -> Result<T2Small<T>> {
    spec.require(Guard::TwoTorus)?;
    let n = spec.euclid_dim();
    let (r1, r2) = two_radii(spec);
    let pi = T::PI();
    let two = T::lit(2.0);
    let ball = euclidean_law::<T>(n + 1)?;
    let beta1 = beta(n, r1)?;
    let beta2 = beta(n, r2)?;

    // slicing along S^1_{r_1} pairs its length with the threshold of S^1_{r_2}
    let theta = solve_increasing(|t| pi * r1 * ball.value(t) + t, beta2, req).constant("theta_star")?;
    let sigma = solve_increasing(|s| pi * r2 * ball.value(s) + s, beta1, req).constant("sigma_star")?;
    let (theta_star, sigma_star) = (theta.root, sigma.root);

    let k_star = (two * pi * r1 * ball.value(theta_star)).max(two * pi * r2 * ball.value(sigma_star));
    let k_star_balance = (two * (beta2 - theta_star)).max(two * (beta1 - sigma_star));
    if rel_diff(k_star, k_star_balance) > identity_tol::<T>() {
        return Err(Error::Consistency(format!(
            "k_star {k_star} disagrees with its balance form {k_star_balance}"
        )))
        .constant("K_star");
    }

    let v_s = {
        let cylinder = CandidateRegion::new(spec, vec![0], pi * r2)?;
        let sphere = CandidateRegion::new(spec, vec![], pi * r1)?;
        region_volume(spec, &cylinder)?.min(region_volume(spec, &sphere)?)
    };

    let circle = circle_law(n + 1, r1)?;
    let c_n = solve_increasing(|v| circle.value(v), k_star, req).constant("c_n")?;
    let v0_1 = solve_piecewise_gap(&circle, &slab2_law(spec)?, T::zero(), req).constant("v0_1")?;
    let v_star = v_s.min(c_n.root).min(v0_1.root);

    let records = vec![
        solved("theta_star", &theta, "pi r1 I_R^{n+1}(theta) + theta = beta_n(r2)"),
        solved("sigma_star", &sigma, "pi r2 I_R^{n+1}(sigma) + sigma = beta_n(r1)"),
        record(
            "K_star",
            k_star,
            "max{2 pi r1 I_R^{n+1}(theta*), 2 pi r2 I_R^{n+1}(sigma*)}",
        ),
        record(
            "K_star_balance",
            k_star_balance,
            "max{2 (beta_n(r2) - theta*), 2 (beta_n(r1) - sigma*)}",
        ),
        on(solved("c_n", &c_n, "I_{S1(r1) x R^{n+1}}(c) = k_star"), &circle),
        record("v_s", v_s, "min{V(S1(r1) x B^{n+1}(pi r2)), V(B^{n+2}(pi r1))}"),
        on(solved("v0_1", &v0_1, "I_{S1(r1) x R^{n+1}}(v) = f_n(v)"), &circle),
        on(record("v_star", v_star, "min{v_s, c_n, v0_1}"), &circle),
    ];
    Ok(T2Small {
        theta_star,
        sigma_star,
        k_star,
        k_star_balance,
        c_n: c_n.root,
        v_s,
        v0_1: v0_1.root,
        v_star,
        records,
    })
}

/// Large-volume half of the `T^2 x R^n` pipeline.
pub fn t2_large<T: Scalar>(spec: &TorusProductSpec<T>, req: &RootRequest<T>) -> Result<T2Large<T>> {
    spec.require(Guard::TwoTorus)?;
    let n = spec.euclid_dim();
    let (r1, r2) = two_radii(spec);
    let two = T::lit(2.0);
    let slab = slab2_law(spec)?;
    let circle1 = circle_law(n + 1, r1)?;
    let circle2 = circle_law(n + 1, r2)?;

    let a = solve_piecewise_gap(&circle1, &slab, two * beta(n, r1)?, req).constant("a_n")?;
    let b = solve_piecewise_gap(&circle2, &slab, two * beta(n, r2)?, req).constant("b_n")?;
    let v0_2 = solve_piecewise_gap(&circle2, &slab, T::zero(), req).constant("v0_2")?;
    let v_dstar = a.root.max(b.root);

    let records = vec![
        on(
            solved("a_n", &a, "I_{S1(r1) x R^{n+1}}(a) - f_n(a) = 2 beta_n(r1)"),
            &circle1,
        ),
        on(
            solved("b_n", &b, "I_{S1(r2) x R^{n+1}}(b) - f_n(b) = 2 beta_n(r2)"),
            &circle2,
        ),
        on(solved("v0_2", &v0_2, "I_{S1(r2) x R^{n+1}}(v) = f_n(v)"), &circle2),
        on(record("v_dstar", v_dstar, "max{a_n, b_n}"), &circle1),
    ];
    Ok(T2Large {
        a_n: a.root,
        b_n: b.root,
        v0_2: v0_2.root,
        v_dstar,
        records,
    })
}

/// Both halves of the `T^2 x R^n` pipeline.
pub fn t2_criticals<T: Scalar>(spec: &TorusProductSpec<T>, req: &RootRequest<T>) -> Result<T2Criticals<T>> {
    let small = t2_small(spec, req)?;
    let large = t2_large(spec, req)?;
    let mut records = small.records;
    records.extend(large.records);
    Ok(T2Criticals {
        spec: spec.clone(),
        theta_star: small.theta_star,
        sigma_star: small.sigma_star,
        k_star: small.k_star,
        c_n: small.c_n,
        v_s: small.v_s,
        v0_1: small.v0_1,
        v0_2: large.v0_2,
        v_star: small.v_star,
        a_n: large.a_n,
        b_n: large.b_n,
        v_dstar: large.v_dstar,
        records,
    })
}

/// Volume where balls and `S^1_{r_1} x B^2` cylinders in `T^2 x R` have
/// equal area. For the square torus of area `4 pi` this is `32 pi^{5/2} / 81`.
pub fn ball_cylinder_crossing<T: Scalar>(spec: &TorusProductSpec<T>, req: &RootRequest<T>) -> Result<RootResult<T>> {
    spec.require(Guard::TwoTorusLine)?;
    let r1 = spec.radii()[0];
    let ball = euclidean_law::<T>(3)?.segments()[0];
    let cylinder = product_law(T::lit(2.0) * T::PI() * r1, 2, Regime::Cylinder)?.segments()[0];
    solve_power_gap(
        ball.coeff,
        ball.exponent,
        cylinder.coeff,
        cylinder.exponent,
        T::zero(),
        req,
    )
    .constant("ball_cylinder_crossing")
}

/// The `T^3 x R^n` pipeline.
pub fn t3_pipeline<T: Scalar>(spec: &TorusProductSpec<T>, req: &RootRequest<T>) -> Result<T3Criticals<T>> {
    spec.require(Guard::ThreeTorus)?;
    let n = spec.euclid_dim();
    let r = spec.radii();
    let (r1, r2, r3) = (r[0], r[1], r[2]);
    let pi = T::PI();
    let two = T::lit(2.0);

    let base = t2_criticals(&spec.leading(2, n)?, req)?;
    let lifted_spec = spec.leading(2, n + 1)?;
    let lifted = t2_criticals(&lifted_spec, req)?;

    let w_star = base.v_star.min(beta(n + 1, r1)?);
    let ball = euclidean_law::<T>(n + 2)?;
    let eta = solve_increasing(|e| pi * r3 * ball.value(e) + e, w_star, req).constant("eta_star")?;
    let eta_star = eta.root;
    let c_star = two * (w_star - eta_star);
    let c_star_length = two * pi * r3 * ball.value(eta_star);
    if rel_diff(c_star, c_star_length) > identity_tol::<T>() {
        return Err(Error::Consistency(format!(
            "c_star {c_star} disagrees with 2 pi r3 I(eta*) = {c_star_length}"
        )))
        .constant("C_star");
    }

    let circle = circle_law(n + 2, r1)?;
    let u0 = solve_increasing(|u| circle.value(u), c_star, req).constant("u0")?;
    let embed = region_volume(spec, &embedded_cylinder(spec, r2)?)?;
    let u_star = u0.root.min(lifted.v_star).min(embed);

    let f_lifted = slab2_law(&lifted_spec)?;
    let g = slab3_law(spec)?;
    let gap = solve_piecewise_gap(&f_lifted, &g, two * base.v_dstar, req).constant("slab_gap_root")?;
    let u_dstar = lifted.v_dstar.max(gap.root);

    let records = vec![
        record("w_star", w_star, "min{v_star(r1, r2; n), beta_{n+1}(r1)}"),
        solved("eta_star", &eta, "pi r3 I_R^{n+2}(eta) + eta = w_star"),
        record("C_star", c_star, "2 (w_star - eta_star)"),
        on(solved("u0", &u0, "I_{S1(r1) x R^{n+2}}(u) = c_star"), &circle),
        record("u_embed", embed, "V(S1(r1) x B^{n+2}(pi r2))"),
        record(
            "u_star",
            u_star,
            "min{u0, v_star(r1, r2; n+1), V(S1(r1) x B^{n+2}(pi r2))}",
        ),
        solved("slab_gap_root", &gap, "f_{n+1}(u) - g_n(u) = 2 v_dstar(r1, r2; n)"),
        record("u_dstar", u_dstar, "max{v_dstar(r1, r2; n+1), slab_gap_root}"),
    ];
    Ok(T3Criticals {
        spec: spec.clone(),
        w_star,
        eta_star,
        c_star,
        u0: u0.root,
        u_star,
        slab_gap_root: gap.root,
        u_dstar,
        base,
        lifted,
        records,
    })
}

/// `S^1_{r_1} x B^{n+2}_{pi r_2}`, the largest `S^1_{r_1} x R^{n+2}`
/// cylinder that still wraps once inside `T^3 x R^n`.
fn embedded_cylinder<T: Scalar>(spec: &TorusProductSpec<T>, r2: T) -> Result<CandidateRegion<T>> {
    CandidateRegion::new(spec, vec![0], T::PI() * r2)
}

/// Threshold report for any supported product.
#[derive(Debug, Clone, PartialEq)]
pub enum Report<T> {
    TwoTorus(T2Criticals<T>),
    ThreeTorus(T3Criticals<T>),
}

impl<T: Scalar> Report<T> {
    pub fn spec(&self) -> &TorusProductSpec<T> {
        match self {
            Report::TwoTorus(r) => &r.spec,
            Report::ThreeTorus(r) => &r.spec,
        }
    }

    /// Constants with provenance. For `T^3` the `T^2` sub-reports keep their own records.
    pub fn records(&self) -> Vec<ConstantRecord<T>> {
        match self {
            Report::TwoTorus(r) => r.records.clone(),
            Report::ThreeTorus(r) => r.records.clone(),
        }
    }

    /// Small and large thresholds `(v_star, v_dstar)` or `(u_star, u_dstar)`.
    pub fn thresholds(&self) -> (T, T) {
        match self {
            Report::TwoTorus(r) => (r.v_star, r.v_dstar),
            Report::ThreeTorus(r) => (r.u_star, r.u_dstar),
        }
    }
}

pub fn full_report<T: Scalar>(spec: &TorusProductSpec<T>, req: &RootRequest<T>) -> Result<Report<T>> {
    match spec.circles() {
        2 => t2_criticals(spec, req).map(Report::TwoTorus),
        3 => t3_pipeline(spec, req).map(Report::ThreeTorus),
        _ => Err(Error::guard(
            Guard::TwoTorus,
            format!("no threshold report for k = {}", spec.circles()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{circle_profile, euclidean_profile};
    use std::f64::consts::PI;

    fn req() -> RootRequest<f64> {
        RootRequest::default()
    }

    fn example() -> TorusProductSpec<f64> {
        let s = 1.0 / PI.sqrt();
        TorusProductSpec::new(vec![s, s], 2).unwrap()
    }

    /// Fixed-step scan returning the midpoint of the first sign change.
    fn grid_root(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
        let mut x = lo;
        let mut fx = f(x);
        while x < hi {
            let y = x + step;
            let fy = f(y);
            if (fx < 0.0) != (fy < 0.0) {
                return x + step / 2.0;
            }
            x = y;
            fx = fy;
        }
        panic!("no sign change on [{lo}, {hi}]");
    }

    #[test]
    fn example_small_volumes() {
        let s = t2_small(&example(), &req()).unwrap();
        assert!((s.v_star - 2.70).abs() < 0.01, "{}", s.v_star);
        assert!((s.theta_star - 0.628).abs() < 1e-3);
        assert!((s.k_star - 12.57).abs() < 0.01);
        // grid scan of the theta equation, step 1e-6
        let ball = |t: f64| euclidean_profile(3, t).unwrap().area;
        let beta2 = beta(2, 1.0 / PI.sqrt()).unwrap();
        let scan = grid_root(|t| PI.sqrt() * ball(t) + t - beta2, 0.6, 0.7, 1e-6);
        assert!((s.theta_star - scan).abs() <= 1e-6);
        assert!(rel_diff(euclidean_profile(4, s.c_n).unwrap().area, s.k_star) < 1e-12);
    }

    #[test]
    fn example_large_volumes() {
        let l = t2_large(&example(), &req()).unwrap();
        assert!((l.v_dstar - 55.84).abs() < 0.01, "{}", l.v_dstar);
        assert_eq!(l.a_n, l.b_n);
    }

    #[test]
    fn unit_square_torus() {
        let spec = TorusProductSpec::new(vec![1.0, 1.0], 2).unwrap();
        let r = t2_criticals(&spec, &req()).unwrap();
        assert!(rel_diff(r.k_star, 70.1) < 5e-3, "{}", r.k_star);
        assert!((r.theta_star - 3.49).abs() < 0.01);
        assert!((r.v_dstar - 551.0).abs() < 1.0, "{}", r.v_dstar);
    }

    #[test]
    fn report_invariants() {
        for radii in [[0.3, 0.3], [0.5, 1.7], [1.0, 4.0], [2.0, 2.5]] {
            for n in 2..=5 {
                let spec = TorusProductSpec::new(radii.to_vec(), n).unwrap();
                let r = t2_criticals(&spec, &req()).unwrap();
                assert!(r.v_star <= r.v0_1 && r.v0_1 < r.v_dstar);
                assert!(r.v0_1 < r.a_n && r.v0_2 < r.b_n);
                assert!(r.v_star < r.v_dstar);
                assert_eq!(r.v_star, r.v_s.min(r.c_n).min(r.v0_1));
                assert_eq!(r.v_dstar, r.a_n.max(r.b_n));
                let balance = 2.0 * (beta(n, radii[1]).unwrap() - r.theta_star);
                let length = 2.0 * PI * radii[0] * euclidean_profile(n + 1, r.theta_star).unwrap().area;
                assert!(rel_diff(balance, length) < 1e-9);
                assert!(r.theta_star < beta(n, radii[1]).unwrap());
            }
        }
    }

    #[test]
    fn radius_swap_invariance() {
        // the spec sorts radii, so compare against the mirrored equations directly
        let a = TorusProductSpec::new(vec![0.7, 1.3], 3).unwrap();
        let b = TorusProductSpec::new(vec![1.3, 0.7], 3).unwrap();
        let ra = t2_criticals(&a, &req()).unwrap();
        let rb = t2_criticals(&b, &req()).unwrap();
        assert_eq!(ra.k_star, rb.k_star);
        assert_eq!(ra.v_dstar, rb.v_dstar);
        assert!(rel_diff(ra.theta_star, ra.sigma_star) > 1e-3);
    }

    #[test]
    fn active_branch_at_large_threshold() {
        let r = t2_criticals(&example(), &req()).unwrap();
        let rec = r.records.iter().find(|c| c.name == "v_dstar").unwrap();
        assert_eq!(rec.regime, Some(Regime::Cylinder));
        assert!(r.v_dstar > beta(3, 1.0 / PI.sqrt()).unwrap());
        assert_eq!(
            circle_profile(3, 1.0 / PI.sqrt(), r.v_dstar).unwrap().regime,
            Regime::Cylinder
        );
    }

    #[test]
    fn ball_cylinder_crossing_value() {
        let s = 1.0 / PI.sqrt();
        let spec = TorusProductSpec::new(vec![s, s], 1).unwrap();
        let v = ball_cylinder_crossing(&spec, &req()).unwrap().root;
        assert!(rel_diff(v, 32.0 * PI.powf(2.5) / 81.0) < 1e-9);
        for lambda in [0.5, 3.0] {
            let scaled = TorusProductSpec::new(vec![lambda * s, lambda * s], 1).unwrap();
            let w = ball_cylinder_crossing(&scaled, &req()).unwrap().root;
            assert!(rel_diff(w, lambda.powi(3) * v) < 1e-9);
        }
        assert!(ball_cylinder_crossing(&example(), &req()).is_err());
    }

    #[test]
    fn three_torus_unit() {
        let spec = TorusProductSpec::new(vec![1.0; 3], 2).unwrap();
        let r = t3_pipeline(&spec, &req()).unwrap();
        for x in [r.w_star, r.eta_star, r.c_star, r.u0, r.u_star, r.u_dstar] {
            assert!(x > 0.0);
        }
        assert!(r.w_star <= r.base.v_star);
        assert!(r.u_star <= r.u0 && r.u_star <= r.u_dstar);
        assert!(rel_diff(r.c_star, 2.0 * (r.w_star - r.eta_star)) < 1e-15);
        let length = 2.0 * PI * euclidean_profile(4, r.eta_star).unwrap().area;
        assert!(rel_diff(r.c_star, length) < 1e-9);
        // independent grid scan of the eta equation
        let scan = grid_root(
            |e| PI * euclidean_profile(4, e).unwrap().area + e - r.w_star,
            1.0,
            2.0,
            1e-6,
        );
        assert!((scan - r.eta_star).abs() <= 1e-6);
    }

    #[test]
    fn eta_star_falls_as_third_circle_grows() {
        let etas: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&r3| {
                let spec = TorusProductSpec::new(vec![1.0, 1.0, r3], 2).unwrap();
                t3_pipeline(&spec, &req()).unwrap().eta_star
            })
            .collect();
        assert!(etas[0] > etas[1] && etas[1] > etas[2], "{etas:?}");
    }

    #[test]
    fn guards() {
        let e = full_report(&TorusProductSpec::new(vec![1.0, 1.0], 6).unwrap(), &req()).unwrap_err();
        assert!(matches!(
            e,
            Error::Guard {
                guard: Guard::TwoTorus,
                ..
            }
        ));
        assert!(e.to_string().contains("2 <= n <= 5"));
        assert!(full_report(&TorusProductSpec::new(vec![1.0], 3).unwrap(), &req()).is_err());
        assert!(t3_pipeline(&TorusProductSpec::new(vec![1.0; 3], 5).unwrap(), &req()).is_err());
    }

    #[test]
    fn full_report_example() {
        match full_report(&example(), &req()).unwrap() {
            Report::TwoTorus(r) => {
                assert!((r.v_star - 2.70).abs() < 0.05);
                assert!((r.v_dstar - 55.84).abs() < 0.1);
                assert!(r.records.iter().all(|c| c.residual.is_none_or(|x| x.abs() < 1e-9)));
            }
            _ => panic!("expected a two-torus report"),
        }
        let spec = TorusProductSpec::new(vec![1.0, 1.2, 1.5], 3).unwrap();
        assert!(matches!(full_report(&spec, &req()).unwrap(), Report::ThreeTorus(_)));
    }

    #[test]
    fn single_precision_pipeline() {
        let s = 1.0 / std::f32::consts::PI.sqrt();
        let spec = TorusProductSpec::new(vec![s, s], 2).unwrap();
        let r = t2_criticals(&spec, &RootRequest::default()).unwrap();
        assert!((r.v_star - 2.70).abs() < 0.01);
        assert!((r.v_dstar - 55.84).abs() < 0.05);
    }
}
