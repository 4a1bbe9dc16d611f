//! Upper and lower envelopes for the profile between the two thresholds.
//!
//! The upper envelope is the closed-form candidate profile. Lower bounds
//! come from concavity of the true profile: chords between the exactly
//! known end points, lines from one end point through a certified external
//! curve, and for two circles the slice-gap bound.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::criticals::{full_report, Report};
use crate::error::{Error, Guard, Result};
use crate::mensuration::TorusProductSpec;
use crate::profiles::{beta, circle_law, default_law, PiecewiseProfile, Regime};
use crate::roots::RootRequest;
use crate::scalar::{rel_diff, Scalar};

/// Sampled profile of some comparison space, trusted to lie below the true profile.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve<T> {
    points: Vec<(T, T)>,
    label: String,
}

impl<T: Scalar> TabulatedCurve<T> {
    pub fn new(points: Vec<(T, T)>, label: impl Into<String>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain("a tabulated curve needs at least 2 points"));
        }
        for (i, &(v, a)) in points.iter().enumerate() {
            if !(v > T::zero() && v.is_finite()) || !(a > T::zero() && a.is_finite()) {
                return Err(Error::domain(format!(
                    "point {i}: volume and area must be positive and finite"
                )));
            }
            if i > 0 && v <= points[i - 1].0 {
                return Err(Error::domain(format!("point {i}: volumes must be strictly increasing")));
            }
        }
        Ok(TabulatedCurve {
            points,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Reads the CSV form:
    ///
    /// ```text
    /// # label: <text>
    /// # certified_lower_bound: yes
    /// v,area
    /// 1.0,4.5
    /// ```
    pub fn parse_csv(text: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut label = String::new();
        let mut certified = false;
        let mut header_seen = false;
        let mut points = Vec::new();
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once(':') {
                    match key.trim() {
                        "label" => label = value.trim().to_string(),
                        "certified_lower_bound" => {
                            if value.trim() != "yes" {
                                return Err(parse_err(line_no, "certified_lower_bound must be `yes`".into()));
                            }
                            certified = true;
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["v", "area"] {
                    return Err(parse_err(line_no, format!("expected header `v,area`, found `{line}`")));
                }
                header_seen = true;
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(parse_err(line_no, format!("expected 2 columns, found {}", cols.len())));
            }
            let num = |s: &str| -> Result<T> {
                let x = f64::from_str(s).map_err(|e| parse_err(line_no, format!("`{s}`: {e}")))?;
                T::from_f64(x).ok_or_else(|| parse_err(line_no, format!("`{s}` out of range")))
            };
            let (v, a) = (num(cols[0])?, num(cols[1])?);
            if !(v > T::zero() && v.is_finite() && a > T::zero() && a.is_finite()) {
                return Err(parse_err(line_no, "volume and area must be positive and finite".into()));
            }
            if let Some(&(prev, _)) = points.last() {
                if v <= prev {
                    return Err(parse_err(line_no, "volumes must be strictly increasing".into()));
                }
            }
            points.push((v, a));
        }

        if !certified {
            return Err(parse_err(last_line, "missing `# certified_lower_bound: yes`".into()));
        }
        if !header_seen {
            return Err(parse_err(last_line, "missing header `v,area`".into()));
        }
        if points.len() < 2 {
            return Err(parse_err(last_line, "a tabulated curve needs at least 2 points".into()));
        }
        TabulatedCurve::new(points, label)
    }
}

/// Which construction produced a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerSource {
    Chord,
    TangentLeft,
    TangentRight,
    SliceGap,
    Exact,
}

impl LowerSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            LowerSource::Chord => "chord",
            LowerSource::TangentLeft => "tangent-left",
            LowerSource::TangentRight => "tangent-right",
            LowerSource::SliceGap => "slice-gap",
            LowerSource::Exact => "exact",
        }
    }
}

impl fmt::Display for LowerSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow<T> {
    pub v: T,
    pub upper: T,
    pub lower: T,
    pub upper_regime: Regime,
    pub lower_source: LowerSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundBand<T> {
    pub rows: Vec<BoundRow<T>>,
    /// Below this volume the profile is known exactly.
    pub exact_below: T,
    /// Above this volume the profile is known exactly.
    pub exact_above: T,
}

/// End points of the unknown stretch, with their exact areas.
struct Anchors<T> {
    lo: (T, T),
    hi: (T, T),
}

fn anchors<T: Scalar>(report: &Report<T>, law: &PiecewiseProfile<T>) -> Anchors<T> {
    let (lo, hi) = report.thresholds();
    Anchors {
        lo: (lo, law.value(lo)),
        hi: (hi, law.value(hi)),
    }
}

fn line_through<T: Scalar>(a: (T, T), b: (T, T), v: T) -> T {
    if v == a.0 {
        return a.1;
    }
    if v == b.0 {
        return b.1;
    }
    a.1 + (b.1 - a.1) * ((v - a.0) / (b.0 - a.0))
}

/// Chord between the exact profile values at the small and large thresholds.
pub fn chord_bound<T: Scalar>(report: &Report<T>, v: T) -> Result<T> {
    let law = default_law(report.spec())?;
    chord(&anchors(report, &law), v)
}

fn chord<T: Scalar>(a: &Anchors<T>, v: T) -> Result<T> {
    if !(a.lo.0 <= v && v <= a.hi.0) {
        return Err(Error::domain(format!(
            "chord bound needs {} <= v <= {}, got {v}",
            a.lo.0, a.hi.0
        )));
    }
    Ok(line_through(a.lo, a.hi, v))
}

/// Best line from `anchor` through a curve sample on the far side of `v`.
///
/// `anchor` must be an exactly known profile point and `curve` a certified
/// lower bound; neither is checked here.
pub fn tangent_bound<T: Scalar>(anchor: (T, T), curve: &TabulatedCurve<T>, v: T) -> Result<T> {
    if v == anchor.0 {
        return Ok(anchor.1);
    }
    let right = v > anchor.0;
    curve
        .points()
        .iter()
        .filter(|&&(w, _)| if right { w >= v } else { w <= v })
        .map(|&p| line_through(anchor, p, v))
        .fold(None, |best: Option<T>, x| Some(best.map_or(x, |b| b.max(x))))
        .ok_or_else(|| Error::domain(format!("no curve sample on the far side of v = {v} from the anchor")))
}

/// `max{I_{S^1_{r_2} x R^{n+1}}(v) - 2 beta_n(r_2), I_{S^1_{r_1} x R^{n+1}}(v) - 2 beta_n(r_1), 0}`.
///
/// This is a lower bound for the profile only on isoperimetric regions in
/// the mixed slicing case; `band` therefore caps it by the upper envelope.
pub fn slice_gap_bound<T: Scalar>(spec: &TorusProductSpec<T>, v: T) -> Result<T> {
    spec.require(Guard::TwoTorus)?;
    if !(v > T::zero()) {
        return Err(Error::domain(format!("volume must be positive, got {v}")));
    }
    let n = spec.euclid_dim();
    let two = T::lit(2.0);
    let mut best = T::zero();
    for &r in spec.radii() {
        best = best.max(circle_law(n + 1, r)?.value(v) - two * beta(n, r)?);
    }
    Ok(best)
}

/// Upper and lower envelopes on `grid`, using the threshold report of `spec`.
/// Each curve contributes tangent lines from both exact end points.
pub fn band<T: Scalar>(
    spec: &TorusProductSpec<T>,
    grid: &[T],
    curves: &[TabulatedCurve<T>],
    req: &RootRequest<T>,
) -> Result<BoundBand<T>> {
    let report = full_report(spec, req)?;
    band_for_report(&report, grid, curves)
}

pub fn band_for_report<T: Scalar>(
    report: &Report<T>,
    grid: &[T],
    curves: &[TabulatedCurve<T>],
) -> Result<BoundBand<T>> {
    if grid.is_empty() {
        return Err(Error::domain("empty volume grid"));
    }
    if grid.iter().any(|&v| !(v > T::zero() && v.is_finite())) {
        return Err(Error::domain("grid volumes must be positive and finite"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("grid volumes must be sorted"));
    }
    let spec = report.spec();
    let law = default_law(spec)?;
    let a = anchors(report, &law);
    for c in curves {
        for &(w, area) in c.points() {
            if area > law.value(w) * (T::one() + T::lit(1e-12)) {
                return Err(Error::domain(format!(
                    "curve `{}` exceeds the upper envelope at v = {w}",
                    c.label()
                )));
            }
        }
    }

    let mut rows = Vec::with_capacity(grid.len());
    for &v in grid {
        let seg = law.segment_at(v);
        let upper = seg.value(v);
        let mut best = (upper, LowerSource::Exact);
        if a.lo.0 < v && v < a.hi.0 {
            best = (chord(&a, v)?, LowerSource::Chord);
            let mut offer = |x: T, src: LowerSource| {
                if x > best.0 {
                    best = (x, src);
                }
            };
            if spec.circles() == 2 {
                offer(slice_gap_bound(spec, v)?.min(upper), LowerSource::SliceGap);
            }
            for c in curves {
                if let Ok(x) = tangent_bound(a.lo, c, v) {
                    offer(x, LowerSource::TangentLeft);
                }
                if let Ok(x) = tangent_bound(a.hi, c, v) {
                    offer(x, LowerSource::TangentRight);
                }
            }
        }
        let (mut lower, source) = best;
        if lower > upper {
            // concave upper envelope: only rounding can get here
            if rel_diff(lower, upper) > T::lit(1e-12).max(T::epsilon() * T::lit(16.0)) {
                return Err(Error::Consistency(format!(
                    "lower bound {lower} exceeds upper bound {upper} at v = {v}"
                )));
            }
            lower = upper;
        }
        rows.push(BoundRow {
            v,
            upper,
            lower,
            upper_regime: seg.regime,
            lower_source: source,
        });
    }
    Ok(BoundBand {
        rows,
        exact_below: a.lo.0,
        exact_above: a.hi.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criticals::t2_criticals;
    use crate::profiles::{scp_profile, slab2_profile};
    use std::f64::consts::PI;

    fn example() -> TorusProductSpec<f64> {
        let s = 1.0 / PI.sqrt();
        TorusProductSpec::new(vec![s, s], 2).unwrap()
    }

    fn report() -> Report<f64> {
        full_report(&example(), &RootRequest::default()).unwrap()
    }

    fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (count - 1) as f64).exp())
            .collect()
    }

    /// Concave power law safely below the upper envelope of the example spec.
    fn synthetic_curve(scale: f64) -> TabulatedCurve<f64> {
        let pts = log_grid(0.5, 150.0, 60)
            .into_iter()
            .map(|v| (v, scale * scp_profile(&example(), v).unwrap().area))
            .collect();
        TabulatedCurve::new(pts, "synthetic").unwrap()
    }

    #[test]
    fn chord_end_points() {
        let r = report();
        let (lo, hi) = r.thresholds();
        let at_lo = chord_bound(&r, lo).unwrap();
        let at_hi = chord_bound(&r, hi).unwrap();
        assert_eq!(at_lo, scp_profile(&example(), lo).unwrap().area);
        assert!((at_lo - 12.57).abs() < 0.01);
        assert!(rel_diff(at_hi, 4.0 * PI * hi.sqrt()) < 1e-12);
        assert!((at_hi - 93.9).abs() < 0.05);
        let mid = chord_bound(&r, 0.5 * (lo + hi)).unwrap();
        assert!(rel_diff(mid, 0.5 * (at_lo + at_hi)) < 1e-12);
        assert!(chord_bound(&r, 0.5 * lo).is_err());
        assert!(chord_bound(&r, 2.0 * hi).is_err());
    }

    #[test]
    fn tangent_through_end_points_is_the_chord() {
        let r = report();
        let (lo, hi) = r.thresholds();
        let law = default_law(&example()).unwrap();
        let ends = TabulatedCurve::new(vec![(lo, law.value(lo)), (hi, law.value(hi))], "ends").unwrap();
        for v in [lo * 1.5, 10.0, 40.0] {
            let c = chord_bound(&r, v).unwrap();
            assert!(rel_diff(tangent_bound((lo, law.value(lo)), &ends, v).unwrap(), c) < 1e-12);
            assert!(rel_diff(tangent_bound((hi, law.value(hi)), &ends, v).unwrap(), c) < 1e-12);
        }
        assert_eq!(tangent_bound((hi, 7.0), &ends, hi).unwrap(), 7.0);
        assert!(tangent_bound((lo, law.value(lo)), &ends, 2.0 * hi).is_err());
    }

    #[test]
    fn tangent_beats_chord_with_a_good_curve() {
        let r = report();
        let (_, hi) = r.thresholds();
        let anchor = (hi, default_law(&example()).unwrap().value(hi));
        let curve = synthetic_curve(0.97);
        for v in [5.0, 20.0, 40.0] {
            let t = tangent_bound(anchor, &curve, v).unwrap();
            // direct maximum over the admissible samples
            let direct = curve
                .points()
                .iter()
                .filter(|p| p.0 <= v)
                .map(|&(w, a)| anchor.1 + (a - anchor.1) * (v - hi) / (w - hi))
                .fold(f64::MIN, f64::max);
            assert!(rel_diff(t, direct) < 1e-14);
            assert!(t >= chord_bound(&r, v).unwrap());
        }
    }

    #[test]
    fn slice_gap_values() {
        let spec = example();
        let rep = t2_criticals(&spec, &RootRequest::default()).unwrap();
        let at = slice_gap_bound(&spec, rep.v_dstar).unwrap();
        assert!(rel_diff(at, slab2_profile(&spec, rep.v_dstar).unwrap().area) < 1e-9);
        assert_eq!(slice_gap_bound(&spec, 0.5).unwrap(), 0.0);
        let mid = slice_gap_bound(&spec, 30.0).unwrap();
        assert!(mid > 0.0 && mid < scp_profile(&spec, 30.0).unwrap().area);
        let three = TorusProductSpec::new(vec![1.0; 3], 2).unwrap();
        assert!(slice_gap_bound(&three, 1.0).is_err());
    }

    #[test]
    fn example_band_structure() {
        let grid = log_grid(0.1, 200.0, 300);
        let b = band(&example(), &grid, &[], &RootRequest::default()).unwrap();
        assert!((b.exact_below - 2.70).abs() < 0.01 && (b.exact_above - 55.84).abs() < 0.01);
        for row in &b.rows {
            assert!(row.lower <= row.upper);
            assert_eq!(row.upper, scp_profile(&example(), row.v).unwrap().area);
            if row.v <= b.exact_below || row.v >= b.exact_above {
                assert_eq!(row.lower, row.upper);
                assert_eq!(row.lower_source, LowerSource::Exact);
            } else {
                assert_ne!(row.lower_source, LowerSource::Exact);
                assert!(row.lower < row.upper);
            }
        }
        assert!(b.rows.iter().any(|r| r.lower_source == LowerSource::SliceGap));
    }

    #[test]
    fn curve_only_raises_the_lower_envelope() {
        let grid = log_grid(0.5, 100.0, 120);
        let plain = band(&example(), &grid, &[], &RootRequest::default()).unwrap();
        let curve = synthetic_curve(0.97);
        let with = band(&example(), &grid, std::slice::from_ref(&curve), &RootRequest::default()).unwrap();
        let mut improved = false;
        for (p, w) in plain.rows.iter().zip(&with.rows) {
            assert!(w.lower >= p.lower);
            assert!(w.lower <= w.upper);
            improved |= w.lower > p.lower;
        }
        assert!(improved);
        let too_high = synthetic_curve(1.1);
        assert!(band(&example(), &grid, &[too_high], &RootRequest::default()).is_err());
    }

    #[test]
    fn single_point_and_bad_grids() {
        let b = band(&example(), &[1.0], &[], &RootRequest::default()).unwrap();
        assert_eq!(b.rows[0].lower, b.rows[0].upper);
        assert!(rel_diff(b.rows[0].upper, 5.9618) < 1e-4);
        assert_eq!(b.rows[0].upper_regime, Regime::Ball);
        assert!(band(&example(), &[], &[], &RootRequest::default()).is_err());
        assert!(band(&example(), &[2.0, 1.0], &[], &RootRequest::default()).is_err());
        assert!(band(&example(), &[-1.0], &[], &RootRequest::default()).is_err());
    }

    #[test]
    fn three_torus_band() {
        let spec = TorusProductSpec::new(vec![1.0; 3], 2).unwrap();
        let b = band(&spec, &log_grid(1.0, 1e4, 100), &[], &RootRequest::default()).unwrap();
        for row in &b.rows {
            assert!(row.lower <= row.upper);
            assert_ne!(row.lower_source, LowerSource::SliceGap);
        }
    }

    #[test]
    fn curve_csv() {
        let text = "# label: test curve\n# certified_lower_bound: yes\nv,area\n1,2\n2,3\n\n4,3.5\n";
        let c = TabulatedCurve::<f64>::parse_csv(text).unwrap();
        assert_eq!(c.label(), "test curve");
        assert_eq!(c.points(), &[(1.0, 2.0), (2.0, 3.0), (4.0, 3.5)]);

        let line_of = |t: &str| match TabulatedCurve::<f64>::parse_csv(t).unwrap_err() {
            Error::Parse { line, .. } => line,
            e => panic!("unexpected {e}"),
        };
        assert_eq!(line_of("# certified_lower_bound: yes\nv,area\n1,2\n1,3\n"), 4);
        assert_eq!(line_of("# certified_lower_bound: yes\nv,area\n1,2\nx,3\n"), 4);
        assert_eq!(line_of("# certified_lower_bound: yes\nvol,a\n1,2\n"), 2);
        assert_eq!(line_of("# certified_lower_bound: no\nv,area\n1,2\n2,3\n"), 1);
        assert_eq!(line_of("v,area\n1,2\n2,3\n"), 3);
        assert_eq!(line_of("# certified_lower_bound: yes\nv,area\n1,2,3\n"), 3);
        assert_eq!(line_of("# certified_lower_bound: yes\nv,area\n1,-2\n"), 3);
    }
}
