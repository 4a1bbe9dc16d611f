//! Bracketing solvers for the two equation shapes the threshold pipelines
//! produce: `f(x) = b` with `f` increasing, and power-law gaps
//! `c1 x^p1 - c2 x^p2 = b`, alone or composed segment by segment.
//!
//! Every solver finishes with plain bisection so results are reproducible
//! bit for bit.

use crate::error::{Error, Result};
use crate::profiles::PiecewiseProfile;
use crate::scalar::Scalar;

/// Number of times a bracket end may be doubled (or halved) while searching.
pub const MAX_DOUBLINGS: usize = 60;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootRequest<T> {
    /// Relative tolerance on the root, in `(0, 1e-6]`.
    pub tolerance: T,
    pub max_iter: usize,
    /// Optional starting bracket; must straddle the root.
    pub bracket: Option<(T, T)>,
}

impl<T: Scalar> Default for RootRequest<T> {
    fn default() -> Self {
        Self {
            tolerance: T::default_tolerance(),
            max_iter: 200,
            bracket: None,
        }
    }
}

impl<T: Scalar> RootRequest<T> {
    pub fn new(tolerance: T, max_iter: usize) -> Result<Self> {
        if !(tolerance > T::zero() && tolerance <= T::lit(1e-6)) {
            return Err(Error::domain(format!(
                "tolerance must lie in (0, 1e-6], got {tolerance}"
            )));
        }
        if max_iter == 0 {
            return Err(Error::domain("max_iter must be at least 1"));
        }
        Ok(Self {
            tolerance,
            max_iter,
            bracket: None,
        })
    }

    pub fn with_bracket(mut self, lo: T, hi: T) -> Self {
        self.bracket = Some((lo, hi));
        self
    }
}

/// A located root together with how well it satisfies its equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult<T> {
    pub root: T,
    /// `lhs(root) - target`.
    pub residual: T,
    pub iterations: usize,
    pub bracket: (T, T),
}

impl<T: Scalar> RootResult<T> {
    /// Enforces `|residual| <= tolerance * scale` and `root` inside `bracket`.
    ///
    /// `scale` is `max(1, |target|)`, widened for gap equations by the
    /// magnitudes of the two terms being subtracted.
    pub fn checked(root: T, residual: T, scale: T, iterations: usize, bracket: (T, T), tolerance: T) -> Result<Self> {
        let bound = tolerance * scale;
        if !(residual.abs() <= bound) {
            return Err(Error::Residual {
                root: root.to_f64().unwrap_or(f64::NAN),
                residual: residual.to_f64().unwrap_or(f64::NAN),
                bound: bound.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !(bracket.0 <= root && root <= bracket.1) {
            return Err(Error::Consistency(format!(
                "root {root} outside its bracket [{}, {}]",
                bracket.0, bracket.1
            )));
        }
        Ok(Self {
            root,
            residual,
            iterations,
            bracket,
        })
    }
}

fn finite<T: Scalar>(x: T, value: T) -> Result<T> {
    if value.is_nan() {
        Err(Error::domain(format!("equation not evaluable at x = {x}")))
    } else {
        Ok(value)
    }
}

/// Bisection on a bracket where `g` changes sign. `g` returns the residual
/// and the scale the residual is judged against.
fn bisect<T, G>(g: G, mut lo: T, mut hi: T, req: &RootRequest<T>, what: &str) -> Result<RootResult<T>>
where
    T: Scalar,
    G: Fn(T) -> (T, T),
{
    let tol = req.tolerance;
    let (glo, slo) = g(lo);
    let (ghi, shi) = g(hi);
    finite(lo, glo)?;
    finite(hi, ghi)?;
    if glo == T::zero() {
        return RootResult::checked(lo, glo, slo, 0, (lo, hi), tol);
    }
    if ghi == T::zero() {
        return RootResult::checked(hi, ghi, shi, 0, (lo, hi), tol);
    }
    if (glo < T::zero()) == (ghi < T::zero()) {
        return Err(Error::domain(format!(
            "{what}: bracket [{lo}, {hi}] does not straddle a root"
        )));
    }
    let rising = glo < T::zero();
    let two = T::lit(2.0);
    let mut iterations = 0;
    loop {
        let mid = lo + (hi - lo) / two;
        let (gm, sm) = g(mid);
        finite(mid, gm)?;
        iterations += 1;
        let narrow = hi - lo <= tol * mid.abs();
        if gm == T::zero() || (narrow && gm.abs() <= tol * sm) || mid <= lo || mid >= hi {
            return RootResult::checked(mid, gm, sm, iterations, (lo, hi), tol);
        }
        if iterations >= req.max_iter {
            return Err(Error::Convergence {
                what: what.to_string(),
                iterations,
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        if (gm < T::zero()) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Solves `f(x) = b` for `f` strictly increasing on `(0, inf)` with
/// `f(0+) < b`.
///
/// The bracket is grown by doubling from 1 (or shrunk by halving when
/// `f(1) >= b`) unless `req.bracket` supplies one.
pub fn solve_increasing<T, F>(f: F, b: T, req: &RootRequest<T>) -> Result<RootResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let scale = T::one().max(b.abs());
    let g = |x: T| (f(x) - b, scale);
    let below = |x: T| -> Result<bool> { Ok(finite(x, g(x).0)? < T::zero()) };

    if let Some((lo, hi)) = req.bracket {
        return bisect(g, lo, hi, req, "increasing equation");
    }
    if !below(T::zero())? {
        return Err(Error::domain(format!(
            "target {b} is not above the infimum f(0+) = {}",
            f(T::zero())
        )));
    }
    let two = T::lit(2.0);
    let (mut lo, mut hi);
    if below(T::one())? {
        lo = T::one();
        hi = two;
        let mut grown = 0;
        while below(hi)? {
            if grown == MAX_DOUBLINGS {
                return Err(Error::Convergence {
                    what: "increasing equation (bracket growth)".into(),
                    iterations: grown,
                    lo: lo.to_f64().unwrap_or(f64::NAN),
                    hi: hi.to_f64().unwrap_or(f64::NAN),
                });
            }
            lo = hi;
            hi = hi * two;
            grown += 1;
        }
    } else {
        hi = T::one();
        lo = T::lit(0.5);
        let mut shrunk = 0;
        while !below(lo)? {
            if shrunk == MAX_DOUBLINGS {
                lo = T::zero();
                break;
            }
            hi = lo;
            lo = lo / two;
            shrunk += 1;
        }
    }
    bisect(g, lo, hi, req, "increasing equation")
}

/// A two-term power-law gap `c1 x^p1 - c2 x^p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerGap<T> {
    pub c1: T,
    pub p1: T,
    pub c2: T,
    pub p2: T,
}

impl<T: Scalar> PowerGap<T> {
    pub fn terms(&self, x: T) -> (T, T) {
        (self.c1 * x.powf(self.p1), self.c2 * x.powf(self.p2))
    }

    pub fn value(&self, x: T) -> T {
        let (a, b) = self.terms(x);
        a - b
    }

    /// Residual against `b` and the magnitude it is judged against.
    fn residual(&self, x: T, b: T) -> (T, T) {
        let (u, w) = self.terms(x);
        (u - w - b, T::one().max(b.abs()).max(u.abs()).max(w.abs()))
    }

    /// Positive stationary point, when the gap has one.
    pub fn stationary_point(&self) -> Option<T> {
        let a = self.c1 * self.p1;
        let c = self.c2 * self.p2;
        if self.p1 == self.p2 || a <= T::zero() || c <= T::zero() {
            return None;
        }
        Some((c / a).powf(T::one() / (self.p1 - self.p2)))
    }

    fn identically(&self, b: T) -> bool {
        self.p1 == self.p2 && self.c1 == self.c2 && b == T::zero()
    }
}

/// Solves `c1 x^p1 - c2 x^p2 = b` for `p1 > p2 >= 0`, `b >= 0`.
///
/// The gap dips below zero on `(0, x_min)` and increases afterwards, so the
/// returned root is the unique one to the right of the analytic minimiser
/// `x_min = (c2 p2 / (c1 p1))^{1/(p1 - p2)}`. With `b = 0` this is the
/// positive crossing of the two power laws.
pub fn solve_power_gap<T: Scalar>(c1: T, p1: T, c2: T, p2: T, b: T, req: &RootRequest<T>) -> Result<RootResult<T>> {
    if !(c1 > T::zero() && c2 > T::zero()) {
        return Err(Error::domain("power gap coefficients must be positive"));
    }
    if !(p1 > p2) || p2 < T::zero() {
        return Err(Error::domain(format!(
            "power gap needs p1 > p2 >= 0, got p1 = {p1}, p2 = {p2}"
        )));
    }
    if b < T::zero() {
        return Err(Error::domain("power gap target must be non-negative"));
    }
    let gap = PowerGap { c1, p1, c2, p2 };
    let x_min = gap.stationary_point().unwrap_or(T::zero());
    let g = |x: T| gap.residual(x, b);
    let (lo, hi) = match req.bracket {
        Some(bracket) => bracket,
        None => {
            let two = T::lit(2.0);
            let mut lo = x_min;
            let mut hi = T::one().max(x_min * two);
            let mut grown = 0;
            while g(hi).0 < T::zero() {
                if grown == MAX_DOUBLINGS {
                    return Err(Error::Convergence {
                        what: "power gap (bracket growth)".into(),
                        iterations: grown,
                        lo: lo.to_f64().unwrap_or(f64::NAN),
                        hi: hi.to_f64().unwrap_or(f64::NAN),
                    });
                }
                lo = hi;
                hi = hi * two;
                grown += 1;
            }
            (lo, hi)
        }
    };
    bisect(g, lo, hi, req, "power gap")
}

/// Roots of `gap(x) = b` on the interval `(lo, hi]` (`hi` may be infinite).
///
/// Splits at the stationary point so each piece is monotone, then bisects
/// every piece with a sign change. Roots beyond `2^60` times the piece start
/// are not searched for. Errors with [`Error::Consistency`] when the gap
/// equals `b` identically.
pub(crate) fn gap_roots_between<T: Scalar>(
    gap: &PowerGap<T>,
    b: T,
    lo: T,
    hi: T,
    req: &RootRequest<T>,
) -> Result<Vec<RootResult<T>>> {
    if gap.identically(b) {
        return Err(Error::Consistency(
            "the two power laws coincide on a whole interval".into(),
        ));
    }
    let mut cuts = vec![lo];
    if let Some(s) = gap.stationary_point() {
        if s > lo && s < hi {
            cuts.push(s);
        }
    }
    cuts.push(hi);

    let g = |x: T| gap.residual(x, b);
    let sign = |x: T| {
        let v = g(x).0;
        if v > T::zero() {
            1
        } else if v < T::zero() {
            -1
        } else {
            0
        }
    };
    let two = T::lit(2.0);
    let mut roots: Vec<RootResult<T>> = Vec::new();
    for w in cuts.windows(2) {
        let a = w[0];
        let mut c = w[1];
        let sa = sign(a);
        if c.is_infinite() {
            // push the right end out until it matches the far-field sign
            let mut end = T::one().max(a * two);
            let mut grown = 0;
            while sign(end) == sa && sa != 0 && grown < MAX_DOUBLINGS {
                end = end * two;
                grown += 1;
            }
            c = end;
        }
        let sc = sign(c);
        let root = if sa != 0 && sc != 0 && sa != sc {
            Some(bisect(g, a, c, req, "power gap segment")?)
        } else if sc == 0 && c.is_finite() {
            let (r, s) = g(c);
            Some(RootResult::checked(c, r, s, 0, (c, c), req.tolerance)?)
        } else if sa == 0 && a != lo {
            let (r, s) = g(a);
            Some(RootResult::checked(a, r, s, 0, (a, a), req.tolerance)?)
        } else {
            None
        };
        if let Some(r) = root {
            if r.root > lo && r.root <= hi && !roots.iter().any(|q| q.root == r.root) {
                roots.push(r);
            }
        }
    }
    Ok(roots)
}

/// Solves `F(v) - G(v) = b` for piecewise power-law profiles, returning the
/// terminal root: the largest crossing, past which `F - G` stays above `b`.
///
/// Every pair of overlapping segments is handled by the two-term gap solver.
/// Fails with [`Error::Domain`] when `F - G` never ends up above `b`, and
/// with [`Error::Consistency`] when `F - G` equals `b` on an interval or the
/// largest crossing is not terminal.
pub fn solve_piecewise_gap<T: Scalar>(
    f: &PiecewiseProfile<T>,
    g: &PiecewiseProfile<T>,
    b: T,
    req: &RootRequest<T>,
) -> Result<RootResult<T>> {
    let mut cuts: Vec<T> = f.breakpoints().into_iter().chain(g.breakpoints()).collect();
    cuts.push(T::zero());
    cuts.push(T::infinity());
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("ordered breakpoints"));
    cuts.dedup();

    let mut best: Option<RootResult<T>> = None;
    let mut tail = None;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let probe = if hi.is_infinite() {
            lo * T::lit(2.0) + T::one()
        } else {
            lo + (hi - lo) / T::lit(2.0)
        };
        let sf = f.segment_at(probe);
        let sg = g.segment_at(probe);
        let gap = PowerGap {
            c1: sf.coeff,
            p1: sf.exponent,
            c2: sg.coeff,
            p2: sg.exponent,
        };
        for r in gap_roots_between(&gap, b, lo, hi, req)? {
            if best.is_none_or(|q| r.root > q.root) {
                best = Some(r);
            }
        }
        if hi.is_infinite() {
            tail = Some(gap);
        }
    }

    let tail = tail.expect("last interval is unbounded");
    let grows = tail.p1 > T::zero() && (tail.p1 > tail.p2 || (tail.p1 == tail.p2 && tail.c1 > tail.c2));
    if !grows {
        return Err(Error::domain(
            "no admissible root: F - G does not eventually exceed the target",
        ));
    }
    let found = best.ok_or_else(|| Error::domain("no admissible root: F - G never crosses the target"))?;

    let diff = |x: T| f.value(x) - g.value(x);
    let x = found.root;
    if !(diff(x * T::lit(2.0)) > b) {
        return Err(Error::Consistency(format!(
            "largest crossing {x} is not terminal: F - G <= target at twice the root"
        )));
    }
    let (fa, ga) = (f.value(x), g.value(x));
    let scale = T::one().max(b.abs()).max(fa.abs()).max(ga.abs());
    RootResult::checked(x, fa - ga - b, scale, found.iterations, found.bracket, req.tolerance)
}
