//! Exact calculus of piecewise-constant functions on `[0,1]`.
//!
//! A [`StepFunction`] is constant on finitely many half-open cells `[l, r)`
//! partitioning the unit interval. Every lattice operation, rearrangement and
//! norm in this crate reduces to finite arithmetic over those cells, so there
//! is no quadrature error anywhere downstream.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Absolute tolerance on cell boundaries when comparing two functions.
/// Values are always compared exactly.
pub const BREAKPOINT_TOL: f64 = 1e-12;

const MEASURE_SUM_TOL: f64 = 1e-12;

/// A piecewise-constant function on `[0,1]`.
///
/// Invariants: breakpoints strictly increasing from exactly `0.0` to exactly
/// `1.0`; one finite value per cell; adjacent cells carry distinct values
/// (constructors merge equal neighbours).
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// A finite union of disjoint subintervals of `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurableSet {
    intervals: Vec<(f64, f64)>,
}

impl MeasurableSet {
    /// Builds a set from intervals `(left, right)`. Intervals may touch (they
    /// are merged) but must not overlap; zero-length intervals are dropped.
    pub fn from_intervals<I>(intervals: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut iv: Vec<(f64, f64)> = Vec::new();
        for (l, r) in intervals {
            if !l.is_finite() || !r.is_finite() || l < 0.0 || r > 1.0 || l > r {
                return Err(Error::InvalidInterval { left: l, right: r });
            }
            if l < r {
                iv.push((l, r));
            }
        }
        iv.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (l, r) in iv {
            match merged.last_mut() {
                Some(last) if l < last.1 => return Err(Error::OverlappingIntervals(l)),
                Some(last) if l == last.1 => last.1 = r,
                _ => merged.push((l, r)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    /// The prefix interval `[0, tau]`.
    pub fn prefix(tau: f64) -> Result<Self> {
        if !tau.is_finite() || !(0.0..=1.0).contains(&tau) {
            return Err(Error::TauOutOfRange(tau));
        }
        Self::from_intervals([(0.0, tau)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(l, r)| l <= t && t < r)
    }
}

fn merge_equal_adjacent(breakpoints: &mut Vec<f64>, values: &mut Vec<f64>) {
    let mut i = 0;
    while i + 1 < values.len() {
        if values[i] == values[i + 1] {
            values.remove(i + 1);
            breakpoints.remove(i + 1);
        } else {
            i += 1;
        }
    }
}

impl StepFunction {
    /// Builds a step function from breakpoints and per-cell values.
    ///
    /// Requires strictly increasing breakpoints running from exactly 0 to
    /// exactly 1 and one finite value per cell. Adjacent equal values are
    /// merged.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::EmptyPartition);
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(Error::CountMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::EndpointMismatch {
                first: breakpoints[0],
                last: *breakpoints.last().unwrap(),
            });
        }
        for i in 0..breakpoints.len() - 1 {
            if !breakpoints[i].is_finite() || !(breakpoints[i] < breakpoints[i + 1]) {
                return Err(Error::NonMonotoneBreakpoints(i + 1));
            }
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue(i));
            }
        }
        let total: f64 = breakpoints.windows(2).map(|w| w[1] - w[0]).sum();
        if (total - 1.0).abs() > MEASURE_SUM_TOL {
            return Err(Error::MeasureMismatch(total));
        }
        let mut breakpoints = breakpoints;
        let mut values = values;
        merge_equal_adjacent(&mut breakpoints, &mut values);
        Ok(Self { breakpoints, values })
    }

    /// Internal constructor for callers that already guarantee the invariants
    /// (common refinements, cellwise maps). Merging is *not* applied so the
    /// partition is preserved.
    fn from_parts_unmerged(breakpoints: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len() + 1, breakpoints.len());
        Self { breakpoints, values }
    }

    /// Builds a function from `(value, measure)` cells laid out left to right.
    /// Measures must be positive and sum to 1; the last breakpoint is pinned
    /// to exactly 1.0.
    fn from_cells(cells: &[(f64, f64)]) -> Self {
        debug_assert!(!cells.is_empty());
        let mut breakpoints = Vec::with_capacity(cells.len() + 1);
        let mut values = Vec::with_capacity(cells.len());
        breakpoints.push(0.0);
        let mut cum = 0.0;
        for &(v, m) in cells {
            debug_assert!(m > 0.0);
            cum += m;
            breakpoints.push(cum);
            values.push(v);
        }
        *breakpoints.last_mut().unwrap() = 1.0;
        merge_equal_adjacent(&mut breakpoints, &mut values);
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        Self { breakpoints, values }
    }

    pub fn zero() -> Self {
        Self { breakpoints: vec![0.0, 1.0], values: vec![0.0] }
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(vec![0.0, 1.0], vec![c])
    }

    /// Indicator function of a measurable set.
    pub fn indicator(set: &MeasurableSet) -> Self {
        if set.intervals().is_empty() {
            return Self::zero();
        }
        let mut pts = vec![0.0, 1.0];
        for &(l, r) in set.intervals() {
            pts.push(l);
            pts.push(r);
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        let mut values = Vec::with_capacity(pts.len() - 1);
        for w in pts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            values.push(if set.contains(mid) { 1.0 } else { 0.0 });
        }
        let mut breakpoints = pts;
        merge_equal_adjacent(&mut breakpoints, &mut values);
        Self { breakpoints, values }
    }

    /// Indicator of the prefix `[0, tau)`.
    pub fn prefix_indicator(tau: f64) -> Result<Self> {
        Ok(Self::indicator(&MeasurableSet::prefix(tau)?))
    }

    /// Deterministic test-input generator: uniform partition into `cells`
    /// cells, values uniform in `[-amplitude, amplitude]`.
    pub fn random(seed: u64, cells: usize, amplitude: f64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::EmptyPartition);
        }
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::InvalidParameter { name: "amplitude", value: amplitude });
        }
        let breakpoints: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..cells)
            .map(|_| {
                if amplitude == 0.0 {
                    0.0
                } else {
                    rng.gen_range(-amplitude..=amplitude)
                }
            })
            .collect();
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    pub fn measures(&self) -> Vec<f64> {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Value at a point; `eval(1.0)` returns the last cell's value.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let idx = self.breakpoints[1..self.breakpoints.len() - 1]
            .partition_point(|b| *b <= t);
        self.values[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Total measure of `{t : f(t) != 0}`.
    pub fn support_measure(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .filter(|(_, v)| **v != 0.0)
            .map(|(w, _)| w[1] - w[0])
            .sum()
    }

    /// Decreasing rearrangement: nonincreasing, nonnegative, equimeasurable
    /// with `|f|`. Cells are sorted by absolute value (stable on ties) and
    /// their measures are carried along unchanged.
    pub fn rearrange(&self) -> StepFunction {
        let measures = self.measures();
        let mut cells: Vec<(f64, f64)> = self
            .values
            .iter()
            .zip(&measures)
            .map(|(v, m)| (v.abs(), *m))
            .collect();
        cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        Self::from_cells(&cells)
    }

    fn zip_with(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        let (a, b) = refine_common(self, other);
        let values: Vec<f64> = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| op(*x, *y))
            .collect();
        let mut breakpoints = a.breakpoints;
        let mut values = values;
        merge_equal_adjacent(&mut breakpoints, &mut values);
        StepFunction { breakpoints, values }
    }

    pub fn add(&self, other: &StepFunction) -> StepFunction {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        self.zip_with(other, |x, y| x - y)
    }

    /// Exact cellwise product.
    pub fn mul(&self, other: &StepFunction) -> StepFunction {
        self.zip_with(other, |x, y| x * y)
    }

    pub fn scale(&self, c: f64) -> StepFunction {
        debug_assert!(c.is_finite());
        let mut breakpoints = self.breakpoints.clone();
        let mut values: Vec<f64> = self.values.iter().map(|v| v * c).collect();
        merge_equal_adjacent(&mut breakpoints, &mut values);
        StepFunction { breakpoints, values }
    }

    pub fn abs(&self) -> StepFunction {
        let mut breakpoints = self.breakpoints.clone();
        let mut values: Vec<f64> = self.values.iter().map(|v| v.abs()).collect();
        merge_equal_adjacent(&mut breakpoints, &mut values);
        StepFunction { breakpoints, values }
    }

    /// The bounded part of the truncation decomposition:
    /// `sign(f) * min(|f|, c)`.
    pub fn truncate(&self, c: f64) -> Result<StepFunction> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidParameter { name: "c", value: c });
        }
        let mut breakpoints = self.breakpoints.clone();
        let mut values: Vec<f64> = self
            .values
            .iter()
            .map(|v| v.signum() * v.abs().min(c))
            .map(|v| if v == 0.0 { 0.0 } else { v })
            .collect();
        merge_equal_adjacent(&mut breakpoints, &mut values);
        Ok(StepFunction { breakpoints, values })
    }

    /// True iff `|self|` and `|other|` induce the same distribution, i.e.
    /// their decreasing rearrangements coincide (values exactly, boundaries
    /// within [`BREAKPOINT_TOL`]).
    pub fn equimeasurable(&self, other: &StepFunction) -> bool {
        self.rearrange().approx_eq(&other.rearrange(), BREAKPOINT_TOL)
    }

    /// Structural comparison: identical values, boundaries within `bp_tol`.
    pub fn approx_eq(&self, other: &StepFunction, bp_tol: f64) -> bool {
        self.values == other.values
            && self.breakpoints.len() == other.breakpoints.len()
            && self
                .breakpoints
                .iter()
                .zip(&other.breakpoints)
                .all(|(a, b)| (a - b).abs() <= bp_tol)
    }

    /// Conditional expectation onto a coarser (or any valid) partition:
    /// on each target cell the value is the measure-weighted mean of `self`.
    pub fn average_onto(&self, partition: &[f64]) -> Result<StepFunction> {
        // Validate the target partition by building a throwaway function on it.
        let probe = vec![0.0; partition.len().saturating_sub(1)];
        StepFunction::new(partition.to_vec(), probe)?;
        let mut values = Vec::with_capacity(partition.len() - 1);
        for w in partition.windows(2) {
            let (l, r) = (w[0], w[1]);
            let mut integral = 0.0;
            for (cw, v) in self.breakpoints.windows(2).zip(&self.values) {
                let lo = cw[0].max(l);
                let hi = cw[1].min(r);
                if lo < hi {
                    integral += v * (hi - lo);
                }
            }
            values.push(integral / (r - l));
        }
        let mut breakpoints = partition.to_vec();
        merge_equal_adjacent(&mut breakpoints, &mut values);
        Ok(StepFunction { breakpoints, values })
    }
}

/// Re-expresses both functions on the merged breakpoint set. Outputs are
/// pointwise equal to the inputs and share one partition (no value merging).
pub fn refine_common(f: &StepFunction, g: &StepFunction) -> (StepFunction, StepFunction) {
    let mut pts: Vec<f64> = f
        .breakpoints
        .iter()
        .chain(g.breakpoints.iter())
        .copied()
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let resample = |h: &StepFunction| -> Vec<f64> {
        let mut out = Vec::with_capacity(pts.len() - 1);
        let mut idx = 0;
        for w in pts.windows(2) {
            while h.breakpoints[idx + 1] <= w[0] {
                idx += 1;
            }
            out.push(h.values[idx]);
        }
        out
    };
    let fv = resample(f);
    let gv = resample(g);
    (
        StepFunction::from_parts_unmerged(pts.clone(), fv),
        StepFunction::from_parts_unmerged(pts, gv),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thirds(values: [f64; 3]) -> StepFunction {
        StepFunction::new(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], values.to_vec()).unwrap()
    }

    #[test]
    fn make_step_constant() {
        let f = StepFunction::new(vec![0.0, 1.0], vec![1.0]).unwrap();
        assert_eq!(f.values(), &[1.0]);
        assert_eq!(f.eval(0.5), 1.0);
    }

    #[test]
    fn make_step_indicator_of_interval() {
        let f = StepFunction::new(vec![0.0, 0.3, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.eval(0.4), 1.0);
        assert_eq!(f.eval(0.2), 0.0);
        assert_eq!(f.eval(0.7), 0.0);
        assert!((f.support_measure() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn make_step_rejects_degenerate_cell() {
        let err = StepFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 2.0, 3.0]);
        assert!(matches!(err, Err(Error::NonMonotoneBreakpoints(_))));
    }

    #[test]
    fn make_step_rejects_bad_endpoints_and_counts() {
        assert!(matches!(
            StepFunction::new(vec![0.1, 1.0], vec![1.0]),
            Err(Error::EndpointMismatch { .. })
        ));
        assert!(matches!(
            StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0]),
            Err(Error::CountMismatch { .. })
        ));
        assert!(matches!(
            StepFunction::new(vec![0.0, 1.0], vec![f64::NAN]),
            Err(Error::NonFiniteValue(0))
        ));
    }

    #[test]
    fn indicator_examples() {
        let e = MeasurableSet::prefix(0.4).unwrap();
        let f = StepFunction::indicator(&e);
        assert_eq!(f.eval(0.1), 1.0);
        assert_eq!(f.eval(0.5), 0.0);

        assert!(StepFunction::indicator(&MeasurableSet::empty()).is_zero());

        let u = MeasurableSet::from_intervals([(0.2, 0.4), (0.6, 0.7)]).unwrap();
        let g = StepFunction::indicator(&u);
        assert_eq!(g.values(), &[0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!((u.measure() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn measurable_set_rejects_overlap() {
        assert!(matches!(
            MeasurableSet::from_intervals([(0.0, 0.5), (0.4, 0.8)]),
            Err(Error::OverlappingIntervals(_))
        ));
        // touching intervals merge
        let s = MeasurableSet::from_intervals([(0.0, 0.2), (0.2, 0.4)]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 0.4)]);
    }

    #[test]
    fn refine_common_on_indicators() {
        let f = StepFunction::prefix_indicator(0.5).unwrap();
        let g = StepFunction::indicator(&MeasurableSet::from_intervals([(0.3, 1.0)]).unwrap());
        let (a, b) = refine_common(&f, &g);
        assert_eq!(a.breakpoints(), &[0.0, 0.3, 0.5, 1.0]);
        assert_eq!(b.breakpoints(), &[0.0, 0.3, 0.5, 1.0]);
        assert_eq!(a.values(), &[1.0, 1.0, 0.0]);
        assert_eq!(b.values(), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn refine_common_identity_and_constant() {
        let f = thirds([1.0, 2.0, 3.0]);
        let (a, b) = refine_common(&f, &f);
        assert_eq!(a, f);
        assert_eq!(b, f);

        let c = StepFunction::constant(1.0).unwrap();
        let (cc, ff) = refine_common(&c, &f);
        assert_eq!(cc.breakpoints(), f.breakpoints());
        assert_eq!(cc.values(), &[1.0, 1.0, 1.0]);
        assert_eq!(ff, f);
    }

    #[test]
    fn rearrange_sorts_by_absolute_value() {
        let f = thirds([1.0, 3.0, 2.0]);
        let r = f.rearrange();
        assert_eq!(r.values(), &[3.0, 2.0, 1.0]);
        assert_eq!(r.breakpoints().len(), 4);
    }

    #[test]
    fn rearrange_moves_mass_left() {
        let f = StepFunction::indicator(&MeasurableSet::from_intervals([(0.3, 0.5)]).unwrap());
        let r = f.rearrange();
        let expected = StepFunction::prefix_indicator(0.2).unwrap();
        assert!(r.approx_eq(&expected, BREAKPOINT_TOL));
    }

    #[test]
    fn rearrange_idempotent() {
        let f = StepFunction::random(3, 9, 2.0).unwrap();
        let r = f.rearrange();
        assert_eq!(r.rearrange(), r);
    }

    #[test]
    fn support_measure_examples() {
        assert_eq!(StepFunction::zero().support_measure(), 0.0);
        let f = StepFunction::prefix_indicator(0.7).unwrap();
        assert!((f.support_measure() - 0.7).abs() < 1e-15);
        let g = thirds([1.0, 0.0, 2.0]);
        assert!((g.support_measure() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lattice_ops() {
        let f = thirds([1.0, 3.0, 2.0]);
        let t = f.truncate(2.0).unwrap();
        assert_eq!(t.eval(0.1), 1.0);
        assert_eq!(t.eval(0.5), 2.0);
        assert_eq!(t.eval(0.9), 2.0);

        assert!(f.add(&f.scale(-1.0)).is_zero());

        let g = StepFunction::new(vec![0.0, 0.5, 1.0], vec![-1.0, 2.0]).unwrap();
        assert_eq!(g.abs().values(), &[1.0, 2.0]);

        // truncation splits f into head + tail exactly
        let head = f.sub(&t);
        assert!(head.add(&t).approx_eq(&f, 0.0));
    }

    #[test]
    fn truncate_rejects_negative_cutoff() {
        let f = thirds([1.0, 3.0, 2.0]);
        assert!(f.truncate(-1.0).is_err());
    }

    #[test]
    fn equimeasurable_translation_and_scaling() {
        let f = StepFunction::prefix_indicator(0.3).unwrap();
        let g = StepFunction::indicator(&MeasurableSet::from_intervals([(0.7, 1.0)]).unwrap());
        assert!(f.equimeasurable(&g));
        assert!(!f.equimeasurable(&f.scale(2.0)));
        assert!(f.equimeasurable(&f.rearrange()));
    }

    #[test]
    fn random_step_is_deterministic() {
        let a = StepFunction::random(7, 4, 1.0).unwrap();
        let b = StepFunction::random(7, 4, 1.0).unwrap();
        assert_eq!(a, b);
        assert!(StepFunction::random(7, 4, 0.0).unwrap().is_zero());
        let c = StepFunction::random(8, 4, 1.0).unwrap();
        assert_ne!(a, c);
        assert!(StepFunction::random(7, 0, 1.0).is_err());
    }

    #[test]
    fn eval_at_right_endpoint() {
        let f = thirds([1.0, 2.0, 3.0]);
        assert_eq!(f.eval(1.0), 3.0);
        assert_eq!(f.eval(0.0), 1.0);
    }

    #[test]
    fn rearrange_of_disjoint_sum_depends_only_on_multisets() {
        // brute-force oracle: pool both multisets of (|value|, measure)
        // cells, sort descending, lay out from 0
        for seed in 0..20u64 {
            let f = StepFunction::random(seed, 4, 2.0).unwrap();
            // g lives where f is zeroed: split [0,1] into alternating halves
            let mask_f = StepFunction::indicator(
                &MeasurableSet::from_intervals([(0.0, 0.5)]).unwrap(),
            );
            let mask_g = StepFunction::indicator(
                &MeasurableSet::from_intervals([(0.5, 1.0)]).unwrap(),
            );
            let g = StepFunction::random(seed + 100, 4, 2.0).unwrap();
            let fd = f.mul(&mask_f);
            let gd = g.mul(&mask_g);
            assert!(fd.mul(&gd).is_zero());
            let sum = fd.add(&gd);
            let r = sum.rearrange();

            let mut cells: Vec<(f64, f64)> = fd
                .values()
                .iter()
                .zip(fd.measures())
                .chain(gd.values().iter().zip(gd.measures()))
                .map(|(v, m)| (v.abs(), m))
                .collect();
            cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            // oracle distribution: m({ |sum| >= c }) for each level c
            for &(level, _) in &cells {
                if level == 0.0 {
                    continue;
                }
                let oracle_mass: f64 = cells
                    .iter()
                    .filter(|(v, _)| *v >= level)
                    .map(|(_, m)| m)
                    .sum();
                let got_mass: f64 = r
                    .values()
                    .iter()
                    .zip(r.measures())
                    .filter(|(v, _)| **v >= level)
                    .map(|(_, m)| m)
                    .sum();
                assert!((oracle_mass - got_mass).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn average_onto_is_exact_on_refinements() {
        let f = StepFunction::new(vec![0.0, 0.25, 0.5, 1.0], vec![4.0, 0.0, 2.0]).unwrap();
        let avg = f.average_onto(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(avg.eval(0.25), 2.0);
        assert_eq!(avg.eval(0.75), 2.0);
        // averaging onto its own partition is the identity
        let same = f.average_onto(f.breakpoints()).unwrap();
        assert!(same.approx_eq(&f, 0.0));
    }
}
