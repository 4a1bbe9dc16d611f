//! Dimensional constants and the volume / boundary area of product regions
//! `S^1_{r_i} x ... x B^m_R` inside `S^1_{r_1} x ... x S^1_{r_k} x R^n`.

use crate::error::{Error, Guard, Result};
use crate::scalar::Scalar;

pub const MAX_CIRCLES: usize = 3;
pub const MAX_EUCLID_DIM: u32 = 7;

/// `Gamma(twice / 2)` for a positive integer `twice`, by the half-integer
/// recurrence from `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
pub fn half_integer_gamma<T: Scalar>(twice: u32) -> T {
    assert!(twice >= 1, "gamma argument must be positive");
    let (mut acc, mut x) = if twice.is_multiple_of(2) {
        (T::one(), T::one())
    } else {
        (T::PI().sqrt(), T::lit(0.5))
    };
    let target = T::from_dim(twice) / T::lit(2.0);
    while x < target {
        acc = acc * x;
        x = x + T::one();
    }
    acc
}

/// Area of the unit sphere `S^n`: `2 pi^{(n+1)/2} / Gamma((n+1)/2)`.
pub fn unit_sphere_area<T: Scalar>(n: u32) -> Result<T> {
    if n == 0 {
        return Err(Error::domain("unit sphere dimension must be at least 1"));
    }
    let half = T::from_dim(n + 1) / T::lit(2.0);
    Ok(T::lit(2.0) * T::PI().powf(half) / half_integer_gamma::<T>(n + 1))
}

/// Volume of the unit ball `B^m`: `pi^{m/2} / Gamma(m/2 + 1)`.
pub fn unit_ball_volume<T: Scalar>(m: u32) -> Result<T> {
    if m == 0 {
        return Err(Error::domain("unit ball dimension must be at least 1"));
    }
    let half = T::from_dim(m) / T::lit(2.0);
    Ok(T::PI().powf(half) / half_integer_gamma::<T>(m + 2))
}

/// The manifold `S^1_{r_1} x ... x S^1_{r_k} x R^n`, radii sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusProductSpec<T> {
    radii: Vec<T>,
    euclid_dim: u32,
}

impl<T: Scalar> TorusProductSpec<T> {
    pub fn new(mut radii: Vec<T>, euclid_dim: u32) -> Result<Self> {
        if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r > T::zero())) {
            return Err(Error::domain(format!(
                "circle radius must be positive and finite, got {r}"
            )));
        }
        let k = radii.len();
        if k > MAX_CIRCLES || euclid_dim == 0 || euclid_dim > MAX_EUCLID_DIM {
            // name the range of the pipeline the caller was most likely after
            let guard = match k {
                1 => Guard::CircleProfile,
                2 => Guard::TwoTorus,
                3 => Guard::ThreeTorus,
                _ => Guard::Product,
            };
            return Err(Error::guard(guard, format!("got k = {k}, n = {euclid_dim}")));
        }
        radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
        Ok(Self { radii, euclid_dim })
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    /// Number of circle factors `k`.
    pub fn circles(&self) -> usize {
        self.radii.len()
    }

    pub fn euclid_dim(&self) -> u32 {
        self.euclid_dim
    }

    /// Total dimension `k + n`.
    pub fn dim(&self) -> u32 {
        self.radii.len() as u32 + self.euclid_dim
    }

    /// Same circles, different Euclidean factor.
    pub fn with_euclid_dim(&self, euclid_dim: u32) -> Result<Self> {
        Self::new(self.radii.clone(), euclid_dim)
    }

    /// The first `count` (smallest) circles with the given Euclidean factor.
    pub fn leading(&self, count: usize, euclid_dim: u32) -> Result<Self> {
        if count > self.radii.len() {
            return Err(Error::domain("not enough circle factors"));
        }
        Self::new(self.radii[..count].to_vec(), euclid_dim)
    }

    /// Volume `prod 2 pi r_i` of the full torus factor (1 when `k = 0`).
    pub fn torus_volume(&self) -> T {
        circumference_product(self.radii.iter().copied())
    }

    pub(crate) fn require(&self, guard: Guard) -> Result<()> {
        let k = self.circles();
        let n = self.euclid_dim;
        let ok = match guard {
            Guard::Product => true,
            Guard::CircleProfile => k == 1 && (2..=7).contains(&n),
            Guard::Euclidean => k == 0 && (2..=9).contains(&n),
            Guard::TwoTorus => k == 2 && (2..=5).contains(&n),
            Guard::TwoTorusLine => k == 2 && n == 1,
            Guard::ThreeTorus => k == 3 && (2..=4).contains(&n),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::guard(guard, format!("got k = {k}, n = {n}")))
        }
    }
}

pub(crate) fn circumference_product<T: Scalar>(radii: impl IntoIterator<Item = T>) -> T {
    radii
        .into_iter()
        .fold(T::one(), |acc, r| acc * T::lit(2.0) * T::PI() * r)
}

/// A product of some of the circle factors with a round ball filling every
/// remaining dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRegion<T> {
    /// Indices into the spec's (sorted) radii.
    pub circle_subset: Vec<usize>,
    pub ball_dim: u32,
    pub ball_radius: T,
}

impl<T: Scalar> CandidateRegion<T> {
    /// Region over `circle_subset` whose ball dimension is implied by `spec`.
    pub fn new(spec: &TorusProductSpec<T>, circle_subset: Vec<usize>, ball_radius: T) -> Result<Self> {
        let region = Self {
            ball_dim: spec.dim() - circle_subset.len() as u32,
            circle_subset,
            ball_radius,
        };
        region.check(spec)?;
        Ok(region)
    }

    /// Region over `circle_subset` with radius chosen so the volume is `v`.
    pub fn with_volume(spec: &TorusProductSpec<T>, circle_subset: Vec<usize>, v: T) -> Result<Self> {
        if !(v > T::zero() && v.is_finite()) {
            return Err(Error::domain(format!("volume must be positive and finite, got {v}")));
        }
        let mut region = Self::new(spec, circle_subset, T::one())?;
        let m = region.ball_dim;
        let base = region.circle_length(spec) * unit_ball_volume::<T>(m)?;
        region.ball_radius = (v / base).powf(T::one() / T::from_dim(m));
        Ok(region)
    }

    fn check(&self, spec: &TorusProductSpec<T>) -> Result<()> {
        let k = spec.circles();
        let mut seen = [false; MAX_CIRCLES];
        for &i in &self.circle_subset {
            if i >= k || seen[i] {
                return Err(Error::domain(format!("invalid circle index {i} for k = {k}")));
            }
            seen[i] = true;
        }
        if self.ball_dim + self.circle_subset.len() as u32 != spec.dim() {
            return Err(Error::domain(format!(
                "ball dimension {} inconsistent with {} circles in a {}-dimensional product",
                self.ball_dim,
                self.circle_subset.len(),
                spec.dim()
            )));
        }
        if !(self.ball_radius > T::zero() && self.ball_radius.is_finite()) {
            return Err(Error::domain("ball radius must be positive and finite"));
        }
        Ok(())
    }

    fn circle_length(&self, spec: &TorusProductSpec<T>) -> T {
        circumference_product(self.circle_subset.iter().map(|&i| spec.radii[i]))
    }
}

/// `(prod 2 pi r) * b_m * R^m`.
pub fn region_volume<T: Scalar>(spec: &TorusProductSpec<T>, region: &CandidateRegion<T>) -> Result<T> {
    region.check(spec)?;
    if region.ball_dim == 0 {
        return Err(Error::domain("region has no ball factor"));
    }
    let m = region.ball_dim;
    Ok(region.circle_length(spec) * unit_ball_volume::<T>(m)? * region.ball_radius.powi(m as i32))
}

/// `(prod 2 pi r) * m * b_m * R^{m-1}`.
pub fn region_boundary_area<T: Scalar>(spec: &TorusProductSpec<T>, region: &CandidateRegion<T>) -> Result<T> {
    region.check(spec)?;
    if region.ball_dim == 0 {
        return Err(Error::domain("region with no ball factor has no boundary"));
    }
    let m = region.ball_dim;
    Ok(region.circle_length(spec) * T::from_dim(m) * unit_ball_volume::<T>(m)? * region.ball_radius.powi(m as i32 - 1))
}
