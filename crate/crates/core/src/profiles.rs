//! Piecewise-linear profiles on `[0, 1]`.
//!
//! A [`Profile`] is the graph of a continuous piecewise-linear function given
//! by its ordinates at strictly increasing knots `0 = x_0 < ... < x_n = 1`.
//! The admissible class consists of nonnegative concave profiles; normalized
//! members additionally have unit integral. Thin planar domains are built from
//! such profiles and their one-dimensional eigenvalue problems are solved in
//! [`crate::sl1d`].

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on slope differences and on negative ordinates.
pub const CONCAVITY_TOL: f64 = 1e-12;

/// Tolerance on `|integral - 1|` for a profile to count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Continuous piecewise-linear function on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct Profile {
    knots: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawProfile> for Profile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        Profile::new(raw.knots, raw.values)
    }
}

impl From<Profile> for RawProfile {
    fn from(p: Profile) -> Self {
        RawProfile {
            knots: p.knots,
            values: p.values,
        }
    }
}

/// One failed membership condition.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// Slope increases across interior knot `knot` by `excess`.
    NotConcave { knot: usize, excess: f64 },
    /// Ordinate at `knot` is below `-CONCAVITY_TOL`.
    Negative { knot: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotConcave { knot, excess } => {
                write!(
                    f,
                    "concavity violated at knot {knot} (slope increase {excess:.3e})"
                )
            }
            Violation::Negative { knot, value } => {
                write!(f, "negative ordinate {value:.3e} at knot {knot}")
            }
        }
    }
}

/// Outcome of [`Profile::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
    pub integral: f64,
    pub normalized: bool,
}

impl ValidityReport {
    /// True when the profile is nonnegative and concave (normalization aside).
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Profile {
    /// Builds a profile from knots and ordinates.
    ///
    /// Only structural requirements are checked here: at least two knots,
    /// matching lengths, finite entries, strictly increasing knots from 0 to 1.
    /// Ordinates in `(-CONCAVITY_TOL, 0)` are snapped to zero. Concavity and
    /// sign are checked by [`Profile::validate`].
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::Malformed("empty knot list".into()));
        }
        if knots.len() != values.len() {
            return Err(Error::Malformed(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.len() < 2 {
            return Err(Error::Malformed(
                "a profile needs at least two knots".into(),
            ));
        }
        if knots.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite knot or value".into()));
        }
        if knots[0] != 0.0 || knots[knots.len() - 1] != 1.0 {
            return Err(Error::Malformed(
                "knots must start at 0 and end at 1".into(),
            ));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Malformed(format!(
                "knots not strictly increasing at index {}",
                i + 1
            )));
        }
        let values = values
            .into_iter()
            .map(|v| {
                if v < 0.0 && v > -CONCAVITY_TOL {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        Ok(Profile { knots, values })
    }

    /// Constant profile `h = c`.
    pub fn constant(c: f64) -> Self {
        Profile {
            knots: vec![0.0, 1.0],
            values: vec![c, c],
        }
    }

    /// Triangular profile with unit peak at `x0` and zeros at both endpoints.
    pub fn triangular(x0: f64) -> Result<Self> {
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tent peak {x0} outside (0, 1)"
            )));
        }
        Profile::new(vec![0.0, x0, 1.0], vec![0.0, 1.0, 0.0])
    }

    /// `6x(1-x)` sampled on `samples` uniform knots and normalized.
    pub fn parabolic_star(samples: usize) -> Result<Self> {
        if samples < 3 {
            return Err(Error::InvalidArgument(
                "parabolic profile needs at least 3 samples".into(),
            ));
        }
        Profile::sampled(samples, |x| 6.0 * x * (1.0 - x))?.normalize()
    }

    /// Interpolant of `f` on `samples` uniform knots.
    pub fn sampled(samples: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if samples < 2 {
            return Err(Error::InvalidArgument("need at least two samples".into()));
        }
        let knots = uniform_knots(samples);
        Profile::from_fn(knots, f)
    }

    /// Interpolant of `f` on the given knots.
    pub fn from_fn(knots: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = knots.iter().map(|&x| f(x)).collect();
        Profile::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Piece index `i` such that `knots[i] <= x <= knots[i+1]`.
    fn piece(&self, x: f64) -> usize {
        let n = self.knots.len();
        match self.knots.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Value at `x`; clamps `x` into `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let i = self.piece(x);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let s = (x - x0) / (x1 - x0);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    /// Slopes of the linear pieces.
    pub fn slopes(&self) -> Vec<f64> {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    /// Exact integral over `[0, 1]` (trapezoid rule on the knots).
    pub fn integral(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }

    /// Exact integral over `[a, b]`, `0 <= a <= b <= 1`.
    pub fn integral_over(&self, a: f64, b: f64) -> f64 {
        self.breakpoints(a, b)
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]) * (self.eval(w[0]) + self.eval(w[1])))
            .sum()
    }

    /// `a`, every knot strictly inside `(a, b)`, and `b`.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = Vec::with_capacity(4);
        pts.push(a);
        let start = self.knots.partition_point(|&k| k <= a);
        for &k in &self.knots[start..] {
            if k >= b {
                break;
            }
            pts.push(k);
        }
        pts.push(b);
        pts
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks concavity, nonnegativity and normalization.
    pub fn validate(&self) -> ValidityReport {
        let mut violations = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            if v < -CONCAVITY_TOL {
                violations.push(Violation::Negative { knot: i, value: v });
            }
        }
        let slopes = self.slopes();
        for i in 1..slopes.len() {
            let excess = slopes[i] - slopes[i - 1];
            if excess > CONCAVITY_TOL {
                violations.push(Violation::NotConcave { knot: i, excess });
            }
        }
        violations.sort_by_key(|v| match v {
            Violation::NotConcave { knot, .. } | Violation::Negative { knot, .. } => *knot,
        });
        let integral = self.integral();
        ValidityReport {
            violations,
            integral,
            normalized: (integral - 1.0).abs() <= NORMALIZATION_TOL,
        }
    }

    /// Member of the admissible class up to normalization.
    pub fn is_admissible(&self) -> bool {
        self.validate().is_valid()
    }

    /// Same profile scaled to unit integral.
    pub fn normalize(&self) -> Result<Profile> {
        let total = self.integral();
        if !(total > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize profile with integral {total}"
            )));
        }
        Ok(self.scaled(1.0 / total))
    }

    pub fn scaled(&self, k: f64) -> Profile {
        Profile {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| v * k).collect(),
        }
    }

    /// `a * self + b * other` on the union of both knot sets.
    pub fn combine(&self, a: f64, other: &Profile, b: f64) -> Profile {
        let knots = merge_knots(&self.knots, &other.knots);
        let values = knots
            .iter()
            .map(|&x| a * self.eval(x) + b * other.eval(x))
            .collect();
        Profile { knots, values }
    }

    /// Sum of two profiles, e.g. the total height `h+ + h-` of a thin domain.
    pub fn sum(&self, other: &Profile) -> Profile {
        self.combine(1.0, other, 1.0)
    }

    /// `self + t * phi`, with no admissibility check.
    pub fn perturbed(&self, phi: &Profile, t: f64) -> Profile {
        self.combine(1.0, phi, t)
    }

    /// Largest `K` with `h(x) >= K x (1 - x)` at every interior knot.
    ///
    /// `None` when the profile has no interior knot.
    pub fn lower_k(&self) -> Option<f64> {
        let n = self.knots.len();
        (1..n - 1)
            .map(|i| {
                let x = self.knots[i];
                self.values[i] / (x * (1.0 - x))
            })
            .reduce(f64::min)
    }

    /// Parses a profile designator: `const`, `parabolic`, `parabolic:<n>`,
    /// `tent:<x0>`, or a path to a JSON file with `knots` and `values`.
    pub fn from_spec(spec: &str) -> Result<Profile> {
        let spec = spec.trim();
        match spec {
            "const" | "constant" => return Ok(Profile::constant(1.0)),
            "parabolic" => return Profile::parabolic_star(2001),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("tent:") {
            let x0: f64 = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad tent peak `{rest}`")))?;
            return Profile::triangular(x0);
        }
        if let Some(rest) = spec.strip_prefix("parabolic:") {
            let n: usize = rest
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad sample count `{rest}`")))?;
            return Profile::parabolic_star(n);
        }
        Profile::load(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Profile> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// `n` uniform knots on `[0, 1]`, exactly 0 and 1 at the ends.
pub fn uniform_knots(n: usize) -> Vec<f64> {
    let m = (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { 1.0 } else { i as f64 / m })
        .collect()
}

fn merge_knots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
    // dedup keeps the first of a run; make sure the ends are exact
    let last = out.len() - 1;
    out[0] = 0.0;
    out[last] = 1.0;
    out
}

/// Rows of the cone `{v : C v <= 0}` describing concave nonnegative ordinate
/// sequences on `knots`, each row normalized to unit length.
fn concave_cone_rows(knots: &[f64]) -> Vec<Vec<(usize, f64)>> {
    let n = knots.len();
    let mut rows = Vec::with_capacity(2 * n);
    for i in 1..n - 1 {
        let dl = knots[i] - knots[i - 1];
        let dr = knots[i + 1] - knots[i];
        // slope(i, i+1) - slope(i-1, i) <= 0
        let row = [
            (i - 1, 1.0 / dl),
            (i, -1.0 / dl - 1.0 / dr),
            (i + 1, 1.0 / dr),
        ];
        let norm = row.iter().map(|(_, c)| c * c).sum::<f64>().sqrt();
        rows.push(row.iter().map(|&(j, c)| (j, c / norm)).collect());
    }
    for i in 0..n {
        rows.push(vec![(i, -1.0)]);
    }
    rows
}

/// Euclidean projection of `raw` onto the cone of concave nonnegative
/// ordinate sequences over `knots`.
///
/// Solved through the dual nonnegative least-squares problem
/// `min_{l >= 0} |C^T l - raw|`, whose solution gives `raw - C^T l`.
pub fn concave_regression(knots: &[f64], raw: &[f64]) -> Result<Vec<f64>> {
    let n = knots.len();
    if n < 2 || raw.len() != n {
        return Err(Error::Malformed(
            "knots and values must have equal length >= 2".into(),
        ));
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Malformed("non-finite ordinate".into()));
    }
    let rows = concave_cone_rows(knots);
    let m = rows.len();
    let mut e = DMatrix::<f64>::zeros(n, m);
    for (j, row) in rows.iter().enumerate() {
        for &(i, c) in row {
            e[(i, j)] = c;
        }
    }
    let y = DVector::from_column_slice(raw);
    let lambda = nnls(&e, &y);
    let v = &y - &e * lambda;
    Ok(v.iter()
        .map(|&x| {
            if x < 0.0 && x > -1e-13 {
                0.0
            } else {
                x.max(0.0)
            }
        })
        .collect())
}

/// Nearest concave nonnegative profile to `raw` on `knots`, normalized.
pub fn project_concave(knots: &[f64], raw: &[f64]) -> Result<Profile> {
    let v = concave_regression(knots, raw)?;
    let p = Profile::new(knots.to_vec(), v)?;
    if !(p.integral() > 0.0) {
        return Err(Error::InvalidArgument(
            "projection is identically zero".into(),
        ));
    }
    p.normalize()
}

/// Lawson-Hanson active-set solver for `min |E x - y|` with `x >= 0`.
fn nnls(e: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let m = e.ncols();
    let mut x = DVector::<f64>::zeros(m);
    let mut passive = vec![false; m];
    let scale = y.norm().max(1.0);
    let tol = 1e-13 * scale;
    let max_outer = 3 * m + 10;

    for _ in 0..max_outer {
        let w = e.transpose() * (y - e * &x);
        let candidate = (0..m)
            .filter(|&j| !passive[j])
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = candidate else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;

        loop {
            let cols: Vec<usize> = (0..m).filter(|&k| passive[k]).collect();
            let z_p = least_squares(e, y, &cols);
            if cols.iter().zip(z_p.iter()).all(|(_, &z)| z > 0.0) {
                x.fill(0.0);
                for (&k, &z) in cols.iter().zip(z_p.iter()) {
                    x[k] = z;
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (&k, &z) in cols.iter().zip(z_p.iter()) {
                if z <= 0.0 {
                    let a = x[k] / (x[k] - z);
                    alpha = alpha.min(a);
                }
            }
            for (&k, &z) in cols.iter().zip(z_p.iter()) {
                x[k] += alpha * (z - x[k]);
            }
            for &k in &cols {
                if x[k] <= 1e-15 * scale {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
        }
    }
    x
}

fn least_squares(e: &DMatrix<f64>, y: &DVector<f64>, cols: &[usize]) -> Vec<f64> {
    let sub = DMatrix::from_fn(e.nrows(), cols.len(), |i, j| e[(i, cols[j])]);
    let svd = sub.svd(true, true);
    let sol = svd.solve(y, 1e-12).expect("svd computed with both factors");
    sol.iter().copied().collect()
}

/// Random normalized member of the admissible class.
///
/// Knots are uniform in number (`3..=max_knots`) with random interior
/// positions; slopes are drawn and sorted decreasingly so the result is
/// concave. With `strictly_positive` the profile is bounded away from zero,
/// otherwise it may vanish at one or both endpoints.
pub fn random_concave<R: Rng + ?Sized>(
    rng: &mut R,
    max_knots: usize,
    strictly_positive: bool,
) -> Profile {
    let n = rng.gen_range(3..=max_knots.max(3));
    let mut knots: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(0.02..0.98)).collect();
    knots.push(0.0);
    knots.push(1.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let n = knots.len();

    let spread = rng.gen_range(0.0..8.0_f64);
    let mut slopes: Vec<f64> = (0..n - 1)
        .map(|_| spread * (rng.gen::<f64>() * 2.0 - 1.0))
        .collect();
    slopes.sort_by(|a, b| b.total_cmp(a));
    let mut values = vec![0.0; n];
    for i in 1..n {
        values[i] = values[i - 1] + slopes[i - 1] * (knots[i] - knots[i - 1]);
    }
    let base = values[0].min(values[n - 1]);
    for v in &mut values {
        *v -= base;
    }
    let peak = values.iter().copied().fold(0.0, f64::max);
    let offset = if strictly_positive || rng.gen_bool(0.5) {
        rng.gen_range(0.05..1.0) * peak.max(0.1)
    } else {
        0.0
    };
    for v in &mut values {
        *v += offset;
    }
    let p = Profile::new(knots, values).expect("constructed from sorted knots");
    p.normalize().expect("positive integral")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_is_valid_and_normalized() {
        let r = Profile::constant(1.0).validate();
        assert!(r.is_valid());
        assert!(r.normalized);
    }

    #[test]
    fn tent_is_valid_with_half_integral() {
        let p = Profile::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let r = p.validate();
        assert!(r.is_valid());
        assert!(!r.normalized);
        assert!((r.integral - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dent_reports_concavity_violation_at_middle_knot() {
        let p = Profile::new(uniform_knots(5), vec![0.0, 1.0, 0.9, 1.0, 0.0]).unwrap();
        let r = p.validate();
        assert_eq!(r.violations.len(), 1);
        assert!(matches!(
            r.violations[0],
            Violation::NotConcave { knot: 2, .. }
        ));
    }

    #[test]
    fn negative_ordinate_reported() {
        let p = Profile::new(vec![0.0, 0.5, 1.0], vec![-0.1, 1.0, 0.0]).unwrap();
        assert!(matches!(
            p.validate().violations[0],
            Violation::Negative { knot: 0, .. }
        ));
    }

    #[test]
    fn tiny_negatives_are_snapped() {
        let p = Profile::new(vec![0.0, 1.0], vec![-1e-14, 1.0]).unwrap();
        assert_eq!(p.values()[0], 0.0);
    }

    #[test]
    fn malformed_inputs_rejected() {
        assert!(matches!(
            Profile::new(vec![], vec![]),
            Err(Error::Malformed(_))
        ));
        assert!(Profile::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Profile::new(vec![0.0, 0.6, 0.5, 1.0], vec![1.0; 4]).is_err());
        assert!(Profile::new(vec![0.1, 1.0], vec![1.0; 2]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let tent = Profile::triangular(0.5).unwrap().normalize().unwrap();
        assert_eq!(tent.values(), &[0.0, 2.0, 0.0]);
        let c = Profile::constant(3.0).normalize().unwrap();
        assert!(c.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(Profile::constant(0.0).normalize().is_err());
    }

    #[test]
    fn normalize_sampled_parabola() {
        let raw = Profile::sampled(101, |x| 6.0 * x * (1.0 - x)).unwrap();
        // independent trapezoid sum of the sampled polyline
        let h = 0.01;
        let exact: f64 = (0..100)
            .map(|i| {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                0.5 * h * (6.0 * a * (1.0 - a) + 6.0 * b * (1.0 - b))
            })
            .sum();
        let p = raw.normalize().unwrap();
        assert!((p.integral() - 1.0).abs() < 1e-12);
        for (v, w) in p.values().iter().zip(raw.values()) {
            assert!((v - w / exact).abs() < 1e-6);
        }
    }

    #[test]
    fn triangular_slopes() {
        let t = Profile::triangular(0.25).unwrap();
        let s = t.slopes();
        assert!((s[0] - 4.0).abs() < 1e-14);
        assert!((s[1] + 4.0 / 3.0).abs() < 1e-14);
        for x0 in [0.1, 0.5, 0.77] {
            assert!((Profile::triangular(x0).unwrap().integral() - 0.5).abs() < 1e-15);
        }
        assert!(Profile::triangular(0.0).is_err());
        assert!(Profile::triangular(1.2).is_err());
    }

    #[test]
    fn parabolic_star_shape() {
        let p = Profile::parabolic_star(2001).unwrap();
        assert!((p.eval(0.5) - 1.5).abs() < 1e-6);
        assert_eq!(p.values()[0], 0.0);
        assert_eq!(*p.values().last().unwrap(), 0.0);
        assert!(p.validate().is_valid());
        assert!(Profile::parabolic_star(2).is_err());
    }

    #[test]
    fn regression_of_convex_triple_is_flat() {
        let v = concave_regression(&[0.0, 0.5, 1.0], &[1.0, 0.0, 1.0]).unwrap();
        for x in v {
            assert!((x - 2.0 / 3.0).abs() < 1e-12);
        }
        let p = project_concave(&[0.0, 0.5, 1.0], &[1.0, 0.0, 1.0]).unwrap();
        assert!(p.values().iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn projection_is_identity_on_concave_input() {
        let knots = uniform_knots(11);
        let raw: Vec<f64> = knots.iter().map(|&x| 6.0 * x * (1.0 - x) + 0.2).collect();
        let v = concave_regression(&knots, &raw).unwrap();
        for (a, b) in v.iter().zip(&raw) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_rejects_all_negative() {
        assert!(project_concave(&[0.0, 0.5, 1.0], &[-1.0, -2.0, -1.0]).is_err());
    }

    #[test]
    fn lower_k_of_parabola() {
        let p = Profile::sampled(11, |x| 6.0 * x * (1.0 - x)).unwrap();
        assert!((p.lower_k().unwrap() - 6.0).abs() < 1e-12);
        assert!(Profile::constant(1.0).lower_k().is_none());
    }

    #[test]
    fn spec_strings() {
        assert_eq!(Profile::from_spec("const").unwrap(), Profile::constant(1.0));
        assert_eq!(
            Profile::from_spec("tent:0.3").unwrap(),
            Profile::triangular(0.3).unwrap()
        );
        assert_eq!(Profile::from_spec("parabolic:11").unwrap().len(), 11);
        assert!(Profile::from_spec("tent:abc").is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let p = Profile::triangular(0.4).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Profile>(&s).unwrap(), p);
        assert!(serde_json::from_str::<Profile>(r#"{"knots":[],"values":[]}"#).is_err());
    }

    #[test]
    fn integral_over_subinterval() {
        let t = Profile::triangular(0.5).unwrap();
        assert!((t.integral_over(0.0, 0.5) - 0.25).abs() < 1e-15);
        assert!((t.integral_over(0.25, 0.75) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn random_profiles_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let p = random_concave(&mut rng, 12, false);
            let r = p.validate();
            assert!(r.is_valid() && r.normalized, "{:?}", r);
            assert!(p.max_value() <= 2.0 + 1e-12);
        }
    }
}
