//! Closed-form isoperimetric profiles held as exact piecewise power laws.
//!
//! Every profile the crate handles is a finite list of segments
//! `coeff * v^exponent` on consecutive volume intervals `(lo, hi]`. Keeping
//! the coefficients symbolic lets differences of profiles be root-solved
//! segment by segment.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Guard, Result};
use crate::mensuration::{circumference_product, unit_ball_volume, unit_sphere_area, TorusProductSpec};
use crate::roots::{gap_roots_between, PowerGap, RootRequest};
use crate::scalar::{rel_diff, Scalar};

/// Relative mismatch allowed between adjacent segments at a breakpoint
/// (widened to a few dozen ulps for single precision).
pub const CONTINUITY_TOL: f64 = 1e-9;

fn continuity_tol<T: Scalar>() -> T {
    T::lit(CONTINUITY_TOL).max(T::epsilon() * T::lit(64.0))
}

/// Which candidate region realises a profile value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Round ball, no circle factor.
    Ball,
    /// One circle times a ball.
    Cylinder,
    /// Two circles times a ball.
    Slab,
    /// Three circles times a ball.
    Slab3,
}

impl Regime {
    /// Regime of the region wrapping `circles` circle factors.
    pub fn with_circles(circles: usize) -> Self {
        match circles {
            0 => Regime::Ball,
            1 => Regime::Cylinder,
            2 => Regime::Slab,
            _ => Regime::Slab3,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Ball => "ball",
            Regime::Cylinder => "cylinder",
            Regime::Slab => "slab",
            Regime::Slab3 => "slab3",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `coeff * v^exponent` on `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSegment<T> {
    pub coeff: T,
    pub exponent: T,
    pub lo: T,
    /// May be `+inf`.
    pub hi: T,
    pub regime: Regime,
}

impl<T: Scalar> PowerSegment<T> {
    pub fn value(&self, v: T) -> T {
        self.coeff * v.powf(self.exponent)
    }

    fn check(&self) -> Result<()> {
        if !(self.coeff > T::zero() && self.coeff.is_finite()) {
            return Err(Error::domain(format!(
                "segment coefficient must be positive, got {}",
                self.coeff
            )));
        }
        if !(self.exponent >= T::zero() && self.exponent <= T::one()) {
            return Err(Error::domain(format!(
                "segment exponent must lie in [0, 1], got {}",
                self.exponent
            )));
        }
        if !(self.lo >= T::zero() && self.lo < self.hi) {
            return Err(Error::domain(format!(
                "empty segment domain ({}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }
}

/// Area together with the candidate that realises it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue<T> {
    pub area: T,
    pub regime: Regime,
}

/// Segments covering `(0, inf)` without gaps or overlaps, continuous at
/// every internal breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseProfile<T> {
    segments: Vec<PowerSegment<T>>,
}

impl<T: Scalar> PiecewiseProfile<T> {
    pub fn new(segments: Vec<PowerSegment<T>>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::domain("profile needs at least one segment"))?;
        if first.lo != T::zero() {
            return Err(Error::domain("profile must start at volume 0"));
        }
        if segments.last().map(|s| s.hi) != Some(T::infinity()) {
            return Err(Error::domain("profile must extend to infinite volume"));
        }
        for s in &segments {
            s.check()?;
        }
        for w in segments.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.hi != b.lo {
                return Err(Error::domain(format!("segments leave a gap or overlap at {}", a.hi)));
            }
            let (left, right) = (a.value(a.hi), b.value(a.hi));
            if rel_diff(left, right) > continuity_tol::<T>() {
                return Err(Error::domain(format!("profile jumps at {}: {left} vs {right}", a.hi)));
            }
        }
        Ok(Self { segments })
    }

    /// One power law on all of `(0, inf)`.
    pub fn single(coeff: T, exponent: T, regime: Regime) -> Result<Self> {
        Self::new(vec![PowerSegment {
            coeff,
            exponent,
            lo: T::zero(),
            hi: T::infinity(),
            regime,
        }])
    }

    pub fn segments(&self) -> &[PowerSegment<T>] {
        &self.segments
    }

    /// Internal breakpoints in increasing order.
    pub fn breakpoints(&self) -> Vec<T> {
        self.segments[..self.segments.len() - 1].iter().map(|s| s.hi).collect()
    }

    /// Segment whose interval `(lo, hi]` contains `v`.
    pub fn segment_at(&self, v: T) -> &PowerSegment<T> {
        self.segments
            .iter()
            .find(|s| v <= s.hi)
            .unwrap_or_else(|| self.segments.last().expect("non-empty"))
    }

    /// Value without domain checks.
    pub fn value(&self, v: T) -> T {
        self.segment_at(v).value(v)
    }

    pub fn eval(&self, v: T) -> Result<ProfileValue<T>> {
        check_volume(v)?;
        let s = self.segment_at(v);
        Ok(ProfileValue {
            area: s.value(v),
            regime: s.regime,
        })
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.segments.iter().all(|s| s.exponent > T::zero())
    }

    /// Volume at which the profile reaches `area`.
    pub fn inverse(&self, area: T) -> Result<T> {
        if !self.is_strictly_increasing() {
            return Err(Error::domain("only strictly increasing profiles can be inverted"));
        }
        if !(area > T::zero() && area.is_finite()) {
            return Err(Error::domain(format!("area must be positive and finite, got {area}")));
        }
        let s = self
            .segments
            .iter()
            .find(|s| s.hi.is_infinite() || area <= s.value(s.hi))
            .expect("last segment is unbounded");
        Ok((area / s.coeff).powf(T::one() / s.exponent))
    }

    /// Pointwise minimum, with crossings located exactly per segment pair.
    /// Ties go to `self`.
    pub fn min_with(&self, other: &Self) -> Result<Self> {
        let req = RootRequest::default();
        let mut cuts: Vec<T> = self.breakpoints().into_iter().chain(other.breakpoints()).collect();
        cuts.push(T::zero());
        cuts.push(T::infinity());
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("ordered breakpoints"));
        cuts.dedup();

        let two = T::lit(2.0);
        let probe = |lo: T, hi: T| {
            if hi.is_infinite() {
                lo * two + T::one()
            } else {
                lo + (hi - lo) / two
            }
        };

        let mut out: Vec<PowerSegment<T>> = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mid = probe(lo, hi);
            let a = *self.segment_at(mid);
            let b = *other.segment_at(mid);
            let mut pieces = vec![lo];
            if !(a.coeff == b.coeff && a.exponent == b.exponent) {
                let gap = PowerGap {
                    c1: a.coeff,
                    p1: a.exponent,
                    c2: b.coeff,
                    p2: b.exponent,
                };
                for r in gap_roots_between(&gap, T::zero(), lo, hi, &req)? {
                    if r.root < hi {
                        pieces.push(r.root);
                    }
                }
            }
            pieces.push(hi);
            pieces.sort_by(|x, y| x.partial_cmp(y).expect("ordered"));
            for p in pieces.windows(2) {
                if !(p[0] < p[1]) {
                    continue;
                }
                let x = probe(p[0], p[1]);
                let winner = if b.value(x) < a.value(x) { b } else { a };
                push_merged(
                    &mut out,
                    PowerSegment {
                        lo: p[0],
                        hi: p[1],
                        ..winner
                    },
                );
            }
        }
        Self::new(out)
    }
}

fn push_merged<T: Scalar>(out: &mut Vec<PowerSegment<T>>, seg: PowerSegment<T>) {
    if let Some(last) = out.last_mut() {
        if last.coeff == seg.coeff && last.exponent == seg.exponent && last.regime == seg.regime {
            last.hi = seg.hi;
            return;
        }
    }
    out.push(seg);
}

fn check_volume<T: Scalar>(v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("volume must be positive and finite, got {v}")))
    }
}

fn check_circle_dim(n: u32) -> Result<()> {
    if (2..=7).contains(&n) {
        Ok(())
    } else {
        Err(Error::guard(Guard::CircleProfile, format!("got n = {n}")))
    }
}

fn check_radius<T: Scalar>(r: T) -> Result<()> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("radius must be positive and finite, got {r}")))
    }
}

/// Area of `L x B^m_R` as a function of its volume, where `L` is a flat
/// torus factor of total volume `length` (1 for a plain ball).
pub(crate) fn product_law<T: Scalar>(length: T, m: u32, regime: Regime) -> Result<PiecewiseProfile<T>> {
    let mf = T::from_dim(m);
    let coeff = mf * (length * unit_ball_volume::<T>(m)?).powf(T::one() / mf);
    PiecewiseProfile::single(coeff, (mf - T::one()) / mf, regime)
}

/// Profile of `R^m` as a one-segment law.
pub fn euclidean_law<T: Scalar>(m: u32) -> Result<PiecewiseProfile<T>> {
    if !(2..=9).contains(&m) {
        return Err(Error::guard(Guard::Euclidean, format!("got m = {m}")));
    }
    product_law(T::one(), m, Regime::Ball)
}

/// Boundary area of the `m`-ball of volume `v`: `m b_m^{1/m} v^{(m-1)/m}`.
pub fn euclidean_profile<T: Scalar>(m: u32, v: T) -> Result<ProfileValue<T>> {
    euclidean_law(m)?.eval(v)
}

/// Volume at which balls stop being optimal in `S^1_r x R^n`:
/// `n^{(n-1)(n+1)} (2 pi r w_{n-1})^{n+1} (1+n)^{-n^2} w_n^{-n}`.
pub fn beta<T: Scalar>(n: u32, r: T) -> Result<T> {
    check_circle_dim(n)?;
    check_radius(r)?;
    let nf = T::from_dim(n);
    let length = T::lit(2.0) * T::PI() * r * unit_sphere_area::<T>(n - 1)?;
    let w_n = unit_sphere_area::<T>(n)?;
    // regrouped as (n/(n+1))^{n^2} (L/w_n)^n L / n so no factor overflows
    let ratio = nf / (nf + T::one());
    Ok(ratio.powi((n * n) as i32) * (length / w_n).powi(n as i32) * length / nf)
}

/// Profile value at [`beta`], where both branches agree.
pub fn alpha<T: Scalar>(n: u32, r: T) -> Result<T> {
    let law = circle_law(n, r)?;
    Ok(law.value(beta(n, r)?))
}

/// Profile of `S^1_r x R^n`: balls up to `beta(n, r)`, then `S^1_r x B^n`.
pub fn circle_law<T: Scalar>(n: u32, r: T) -> Result<PiecewiseProfile<T>> {
    check_circle_dim(n)?;
    check_radius(r)?;
    let nf = T::from_dim(n);
    let w_n = unit_sphere_area::<T>(n)?;
    let w_nm1 = unit_sphere_area::<T>(n - 1)?;
    let split = beta(n, r)?;
    let ball = PowerSegment {
        coeff: (T::one() + nf).powf(nf / (T::one() + nf)) * w_n.powf(T::one() / (T::one() + nf)),
        exponent: nf / (nf + T::one()),
        lo: T::zero(),
        hi: split,
        regime: Regime::Ball,
    };
    let cylinder = PowerSegment {
        coeff: nf.powf((nf - T::one()) / nf) * (T::lit(2.0) * T::PI() * r * w_nm1).powf(T::one() / nf),
        exponent: (nf - T::one()) / nf,
        lo: split,
        hi: T::infinity(),
        regime: Regime::Cylinder,
    };
    PiecewiseProfile::new(vec![ball, cylinder])
}

pub fn circle_profile<T: Scalar>(n: u32, r: T, v: T) -> Result<ProfileValue<T>> {
    circle_law(n, r)?.eval(v)
}

/// Area of `T^2 x B^n_R` as a function of its volume.
pub fn slab2_law<T: Scalar>(spec: &TorusProductSpec<T>) -> Result<PiecewiseProfile<T>> {
    if spec.circles() != 2 {
        return Err(Error::domain(format!(
            "slab profile needs two circles, got {}",
            spec.circles()
        )));
    }
    product_law(spec.torus_volume(), spec.euclid_dim(), Regime::Slab)
}

pub fn slab2_profile<T: Scalar>(spec: &TorusProductSpec<T>, v: T) -> Result<ProfileValue<T>> {
    slab2_law(spec)?.eval(v)
}

/// Area of `T^3 x B^n_R` as a function of its volume.
pub fn slab3_law<T: Scalar>(spec: &TorusProductSpec<T>) -> Result<PiecewiseProfile<T>> {
    if spec.circles() != 3 {
        return Err(Error::domain(format!(
            "three-torus slab profile needs three circles, got {}",
            spec.circles()
        )));
    }
    product_law(spec.torus_volume(), spec.euclid_dim(), Regime::Slab3)
}

pub fn slab3_profile<T: Scalar>(spec: &TorusProductSpec<T>, v: T) -> Result<ProfileValue<T>> {
    slab3_law(spec)?.eval(v)
}

/// Spheres-cylinders-planes profile of `T^2 x R^n`: the smaller of the
/// `S^1_{r_1} x R^{n+1}` profile and the slab law. An upper bound for the
/// true profile everywhere.
pub fn scp_law<T: Scalar>(spec: &TorusProductSpec<T>) -> Result<PiecewiseProfile<T>> {
    spec.require(Guard::TwoTorus)?;
    circle_law(spec.euclid_dim() + 1, spec.radii()[0])?.min_with(&slab2_law(spec)?)
}

pub fn scp_profile<T: Scalar>(spec: &TorusProductSpec<T>, v: T) -> Result<ProfileValue<T>> {
    scp_law(spec)?.eval(v)
}

/// Minimum over the nested candidates ball, `S^1_{r_1} x B`,
/// `S^1_{r_1} x S^1_{r_2} x B`, ... for any number of circles. Only the
/// smallest circles matter since every coefficient grows with the radii.
pub fn candidate_law<T: Scalar>(spec: &TorusProductSpec<T>) -> Result<PiecewiseProfile<T>> {
    let dim = spec.dim();
    let mut law = product_law(T::one(), dim, Regime::Ball)?;
    for j in 1..=spec.circles() {
        let length = circumference_product(spec.radii()[..j].iter().copied());
        law = law.min_with(&product_law(length, dim - j as u32, Regime::with_circles(j))?)?;
    }
    Ok(law)
}

/// Names one of the closed-form profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileSelector<T> {
    Euclidean(u32),
    Circle { n: u32, r: T },
    Slab2,
    Slab3,
    Scp,
    Candidates,
}

pub fn as_piecewise<T: Scalar>(
    selector: ProfileSelector<T>,
    spec: &TorusProductSpec<T>,
) -> Result<PiecewiseProfile<T>> {
    match selector {
        ProfileSelector::Euclidean(m) => euclidean_law(m),
        ProfileSelector::Circle { n, r } => circle_law(n, r),
        ProfileSelector::Slab2 => slab2_law(spec),
        ProfileSelector::Slab3 => slab3_law(spec),
        ProfileSelector::Scp => scp_law(spec),
        ProfileSelector::Candidates => candidate_law(spec),
    }
}

/// The profile reported for a spec: Euclidean for `k = 0`, the circle
/// profile for `k = 1`, spheres-cylinders-planes for `k = 2` and the nested
/// candidate minimum for `k = 3`.
pub fn default_law<T: Scalar>(spec: &TorusProductSpec<T>) -> Result<PiecewiseProfile<T>> {
    match spec.circles() {
        0 => euclidean_law(spec.euclid_dim()),
        1 => circle_law(spec.euclid_dim(), spec.radii()[0]),
        2 => scp_law(spec),
        _ => {
            spec.require(Guard::ThreeTorus)?;
            candidate_law(spec)
        }
    }
}
