//! The K-functional `k(f; a, b) = inf { a ||u||_E + b ||v||_F : u + v = f }`
//! computed three ways: a truncation-family search (provably exact for the
//! `(L1, Linf)` couple), a projected-subgradient convex minimizer, and an
//! exhaustive small-grid search with a certified granularity bound.
//!
//! For `f >= 0` and ideal norms the infimum is attained among decompositions
//! with `0 <= v <= f` cellwise, and `k(f;.) = k(|f|;.)`, so every method works
//! on the box `[0, |f|]` over the cells of `f`'s partition.

use crate::error::{Error, Result};
use crate::exec;
use crate::spaces::{l1_cells, SpaceSpec};
use crate::step::StepFunction;

/// Which method produced a [`KValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMethod {
    Truncation,
    General,
    Oracle,
}

/// A K-functional evaluation: the objective of an explicitly stored feasible
/// decomposition `u + v = f`, together with a certified bracket.
#[derive(Debug, Clone)]
pub struct KValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: KMethod,
    pub u: StepFunction,
    pub v: StepFunction,
}

/// Solver knobs shared by the truncation scan and the subgradient method.
#[derive(Debug, Clone)]
pub struct KSettings {
    /// Dense-scan sample count for the truncation family.
    pub scan_samples: usize,
    /// Projected-subgradient iteration budget.
    pub iterations: usize,
    /// Early-exit tolerance for the subgradient method.
    pub tol: f64,
}

impl Default for KSettings {
    fn default() -> Self {
        Self { scan_samples: 512, iterations: 2000, tol: 1e-9 }
    }
}

const ORACLE_MAX_CELLS: usize = 8;
const ORACLE_MAX_LEVELS: usize = 33;
const POLISH_SWEEPS: usize = 2;

fn check_ab(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "a", value: a });
    }
    if !b.is_finite() || b <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "b", value: b });
    }
    Ok(())
}

fn is_l1_linf(e: &SpaceSpec, f_space: &SpaceSpec) -> bool {
    matches!(e, SpaceSpec::Lp { p } if *p == 1.0) && matches!(f_space, SpaceSpec::LInfinity)
}

fn zero_kvalue(method: KMethod) -> KValue {
    KValue {
        value: 0.0,
        lower: 0.0,
        upper: 0.0,
        method,
        u: StepFunction::zero(),
        v: StepFunction::zero(),
    }
}

/// Cell view of `|f|` plus the original signs, shared by all solvers.
struct Problem<'a> {
    g: Vec<f64>,
    measures: Vec<f64>,
    signs: Vec<f64>,
    a: f64,
    b: f64,
    e: &'a SpaceSpec,
    f_space: &'a SpaceSpec,
}

impl<'a> Problem<'a> {
    fn new(f: &StepFunction, a: f64, b: f64, e: &'a SpaceSpec, f_space: &'a SpaceSpec) -> Self {
        let g: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
        let signs: Vec<f64> = f
            .values()
            .iter()
            .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        Self { g, measures: f.measures(), signs, a, b, e, f_space }
    }

    fn objective(&self, v: &[f64]) -> f64 {
        let u: Vec<f64> = self.g.iter().zip(v).map(|(g, v)| g - v).collect();
        self.a * self.e.norm_cells(&u, &self.measures)
            + self.b * self.f_space.norm_cells(v, &self.measures)
    }

    fn objective_at_cut(&self, c: f64) -> f64 {
        let v: Vec<f64> = self.g.iter().map(|g| g.min(c)).collect();
        self.objective(&v)
    }

    /// A lower bound valid for every couple: both norms dominate `L1` under
    /// the `phi(1) = 1` normalization, and the `(L1, L1)` infimum is
    /// `min(a,b) ||f||_1`.
    fn universal_lower(&self) -> f64 {
        self.a.min(self.b) * l1_cells(&self.g, &self.measures)
    }

    /// When `F = Linf`, relaxing `E` to `L1` gives the classical
    /// `a * integral of the rearrangement up to b/a`, still a valid lower
    /// bound because `||.||_1 <= ||.||_E`.
    fn l1_linf_relaxation_lower(&self) -> f64 {
        if !matches!(self.f_space, SpaceSpec::LInfinity) {
            return 0.0;
        }
        let mut cells: Vec<(f64, f64)> = self
            .g
            .iter()
            .zip(&self.measures)
            .map(|(v, m)| (*v, *m))
            .collect();
        cells.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
        let mut budget = (self.b / self.a).min(1.0);
        let mut integral = 0.0;
        for (v, m) in cells {
            if budget <= 0.0 {
                break;
            }
            let take = m.min(budget);
            integral += v * take;
            budget -= take;
        }
        self.a * integral
    }

    fn certified_lower(&self) -> f64 {
        self.universal_lower().max(self.l1_linf_relaxation_lower())
    }

    /// Packages a cellwise `v` into the signed decomposition on `f`'s
    /// partition and re-evaluates the objective on the stored pair.
    fn finish(&self, f: &StepFunction, v: &[f64], lower: f64, method: KMethod) -> KValue {
        let v_signed: Vec<f64> = v.iter().zip(&self.signs).map(|(v, s)| s * v).collect();
        let v_fn = StepFunction::new(f.breakpoints().to_vec(), v_signed).unwrap();
        let u_fn = f.sub(&v_fn);
        let value = self.a * self.e.norm(&u_fn) + self.b * self.f_space.norm(&v_fn);
        KValue {
            value,
            lower: lower.min(value).max(0.0),
            upper: value,
            method,
            u: u_fn,
            v: v_fn,
        }
    }
}

fn golden_min(mut lo: f64, mut hi: f64, eval: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..80 {
        if hi - lo <= 1e-13 * (1.0 + hi.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// K-functional upper bound from the truncation family
/// `v_c = sign(f) min(|f|, c)`, minimized over the cut level `c` by a dense
/// scan (including all kinks `|f_i|`) plus golden-section refinement.
///
/// For `(E, F) = (L1, Linf)` the objective is piecewise linear in `c` with
/// kinks exactly at the cell values, so the scan attains the true infimum.
pub fn k_truncation(
    f: &StepFunction,
    a: f64,
    b: f64,
    e: &SpaceSpec,
    f_space: &SpaceSpec,
) -> Result<KValue> {
    k_truncation_with(f, a, b, e, f_space, &KSettings::default())
}

pub fn k_truncation_with(
    f: &StepFunction,
    a: f64,
    b: f64,
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    settings: &KSettings,
) -> Result<KValue> {
    check_ab(a, b)?;
    if f.is_zero() {
        return Ok(zero_kvalue(KMethod::Truncation));
    }
    let p = Problem::new(f, a, b, e, f_space);
    let m = p.g.iter().fold(0.0_f64, |acc, g| acc.max(*g));

    let mut candidates: Vec<f64> = Vec::with_capacity(settings.scan_samples + p.g.len() + 2);
    candidates.push(0.0);
    candidates.push(m);
    candidates.extend(p.g.iter().copied());
    let samples = settings.scan_samples.max(2);
    for j in 0..samples {
        candidates.push(m * j as f64 / (samples - 1) as f64);
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();

    let mut best_idx = 0;
    let mut best = f64::INFINITY;
    for (i, c) in candidates.iter().enumerate() {
        let val = p.objective_at_cut(*c);
        if val < best {
            best = val;
            best_idx = i;
        }
    }
    let lo = if best_idx == 0 { candidates[0] } else { candidates[best_idx - 1] };
    let hi = if best_idx + 1 == candidates.len() {
        candidates[best_idx]
    } else {
        candidates[best_idx + 1]
    };
    let (c_ref, val_ref) = golden_min(lo, hi, |c| p.objective_at_cut(c));
    let c_star = if val_ref < best { c_ref } else { candidates[best_idx] };

    let v: Vec<f64> = p.g.iter().map(|g| g.min(c_star)).collect();
    let lower = if is_l1_linf(e, f_space) {
        // kink-inclusive scan of a piecewise-linear convex objective
        let val = p.objective(&v);
        (val - 1e-12 * (1.0 + val)).max(p.universal_lower())
    } else {
        p.certified_lower()
    };
    Ok(p.finish(f, &v, lower, KMethod::Truncation))
}

/// K-functional by projected subgradient over the box `0 <= v <= |f|`,
/// with diminishing steps `max|f| / sqrt(t)`, followed by a deterministic
/// coordinatewise golden-section polish. The lower bracket combines the
/// standard subgradient convergence certificate with the universal
/// `min(a,b) ||f||_1` bound.
pub fn k_general(
    f: &StepFunction,
    a: f64,
    b: f64,
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    iterations: usize,
    tol: f64,
) -> Result<KValue> {
    check_ab(a, b)?;
    if iterations == 0 {
        return Err(Error::InvalidParameter { name: "iterations", value: 0.0 });
    }
    if !tol.is_finite() || tol < 0.0 {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    if f.is_zero() {
        return Ok(zero_kvalue(KMethod::General));
    }
    let p = Problem::new(f, a, b, e, f_space);
    let n = p.g.len();
    let d = p.g.iter().fold(0.0_f64, |acc, g| acc.max(*g));
    let universal = p.universal_lower();

    let mut best = f64::INFINITY;
    let mut best_v = vec![0.0; n];
    for v in [
        vec![0.0; n],
        p.g.clone(),
        p.g.iter().map(|g| 0.5 * g).collect::<Vec<f64>>(),
    ] {
        let val = p.objective(&v);
        if val < best {
            best = val;
            best_v = v;
        }
    }

    let mut v: Vec<f64> = p.g.iter().map(|g| 0.5 * g).collect();
    let mut sum_alpha = 0.0;
    let mut sum_alpha2_grad2 = 0.0;
    let mut best_on_path = best;
    for t in 1..=iterations {
        let u: Vec<f64> = p.g.iter().zip(&v).map(|(g, v)| g - v).collect();
        let ge = p.e.norm_subgradient(&u, &p.measures);
        let gf = p.f_space.norm_subgradient(&v, &p.measures);
        let mut grad2 = 0.0;
        let alpha = d / (t as f64).sqrt();
        for i in 0..n {
            let gi = p.b * gf[i] - p.a * ge[i];
            grad2 += gi * gi;
            v[i] = (v[i] - alpha * gi).clamp(0.0, p.g[i]);
        }
        sum_alpha += alpha;
        sum_alpha2_grad2 += alpha * alpha * grad2;
        let val = p.objective(&v);
        if val < best_on_path {
            best_on_path = val;
        }
        if val < best {
            best = val;
            best_v.copy_from_slice(&v);
        }
        if best <= universal + tol * best.max(1.0) {
            break;
        }
    }

    // certified gap for the subgradient trajectory: ||v0 - v*||^2 <= sum (g_i/2)^2
    let r2: f64 = p.g.iter().map(|g| 0.25 * g * g).sum();
    let gap = if sum_alpha > 0.0 {
        (r2 + sum_alpha2_grad2) / (2.0 * sum_alpha)
    } else {
        f64::INFINITY
    };
    let lower = (best_on_path - gap).max(p.certified_lower()).max(0.0);

    // coordinate polish: convex along each coordinate, only ever improves
    for _ in 0..POLISH_SWEEPS {
        for i in 0..n {
            if p.g[i] == 0.0 {
                continue;
            }
            let (x, val) = golden_min(0.0, p.g[i], |x| {
                let mut w = best_v.clone();
                w[i] = x;
                p.objective(&w)
            });
            if val < best {
                best = val;
                best_v[i] = x;
            }
        }
    }

    Ok(p.finish(f, &best_v, lower, KMethod::General))
}

/// Exhaustive K-functional search over the per-cell grid
/// `v_i in {0, |f_i|/levels, ..., |f_i|}`, organized as a depth-first search
/// with sound monotone-norm pruning (the reported minimum is exactly the grid
/// minimum). The lower bracket subtracts the Lipschitz granularity bound
/// `a ||delta/2||_E + b ||delta/2||_F`, `delta_i = |f_i|/levels`.
pub fn k_exact_oracle(
    f: &StepFunction,
    a: f64,
    b: f64,
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    levels: usize,
) -> Result<KValue> {
    check_ab(a, b)?;
    if levels == 0 {
        return Err(Error::InvalidParameter { name: "levels", value: 0.0 });
    }
    if levels > ORACLE_MAX_LEVELS {
        return Err(Error::TooManyLevels { levels, max: ORACLE_MAX_LEVELS });
    }
    let n = f.cell_count();
    if n > ORACLE_MAX_CELLS {
        return Err(Error::TooManyCells { cells: n, max: ORACLE_MAX_CELLS });
    }
    if f.is_zero() {
        return Ok(zero_kvalue(KMethod::Oracle));
    }
    let p = Problem::new(f, a, b, e, f_space);

    let grids: Vec<Vec<f64>> = p
        .g
        .iter()
        .map(|g| {
            if *g == 0.0 {
                vec![0.0]
            } else {
                (0..=levels).map(|l| g * (l as f64 / levels as f64)).collect()
            }
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        (p.g[j] * p.measures[j]).partial_cmp(&(p.g[i] * p.measures[i])).unwrap()
    });
    // suffix L1 mass of the unassigned cells, in search order
    let mut rem = vec![0.0; n + 1];
    for d in (0..n).rev() {
        rem[d] = rem[d + 1] + p.g[order[d]] * p.measures[order[d]];
    }

    // incumbent: proportional decompositions v = (l/levels) f are grid points
    let mut best = f64::INFINITY;
    let mut best_v = vec![0.0; n];
    for l in 0..=levels {
        let frac = l as f64 / levels as f64;
        let v: Vec<f64> = p.g.iter().map(|g| g * frac).collect();
        let val = p.objective(&v);
        if val < best {
            best = val;
            best_v = v;
        }
    }

    struct Dfs<'a, 'b> {
        p: &'b Problem<'a>,
        grids: &'b [Vec<f64>],
        order: &'b [usize],
        rem: &'b [f64],
        min_ab: f64,
        u_buf: Vec<f64>,
        v_buf: Vec<f64>,
        best: f64,
        best_v: Vec<f64>,
    }

    impl Dfs<'_, '_> {
        fn run(&mut self, depth: usize) {
            let partial = self.p.a * self.p.e.norm_cells(&self.u_buf, &self.p.measures)
                + self.p.b * self.p.f_space.norm_cells(&self.v_buf, &self.p.measures);
            if depth == self.order.len() {
                if partial < self.best {
                    self.best = partial;
                    self.best_v.copy_from_slice(&self.v_buf);
                }
                return;
            }
            let l1_part = self.p.a * l1_cells(&self.u_buf, &self.p.measures)
                + self.p.b * l1_cells(&self.v_buf, &self.p.measures)
                + self.min_ab * self.rem[depth];
            if partial.max(l1_part) >= self.best {
                return;
            }
            let cell = self.order[depth];
            for idx in 0..self.grids[cell].len() {
                let val = self.grids[cell][idx];
                self.v_buf[cell] = val;
                self.u_buf[cell] = self.p.g[cell] - val;
                self.run(depth + 1);
            }
            self.v_buf[cell] = 0.0;
            self.u_buf[cell] = 0.0;
        }
    }

    let mut dfs = Dfs {
        p: &p,
        grids: &grids,
        order: &order,
        rem: &rem,
        min_ab: a.min(b),
        u_buf: vec![0.0; n],
        v_buf: vec![0.0; n],
        best,
        best_v: best_v.clone(),
    };
    dfs.run(0);
    best = dfs.best;
    best_v = dfs.best_v;

    let half_delta: Vec<f64> = p.g.iter().map(|g| 0.5 * g / levels as f64).collect();
    let granularity = a * e.norm_cells(&half_delta, &p.measures)
        + b * f_space.norm_cells(&half_delta, &p.measures);
    let lower = (best - granularity).max(p.certified_lower()).max(0.0);
    Ok(p.finish(f, &best_v, lower, KMethod::Oracle))
}

/// Dispatcher: the truncation scan alone for `(L1, Linf)` (exact there);
/// otherwise the minimum of the truncation scan and the general solver, with
/// the tightest certified bracket of the two.
pub fn k_functional(
    f: &StepFunction,
    a: f64,
    b: f64,
    e: &SpaceSpec,
    f_space: &SpaceSpec,
) -> Result<KValue> {
    k_functional_with(f, a, b, e, f_space, &KSettings::default())
}

pub fn k_functional_with(
    f: &StepFunction,
    a: f64,
    b: f64,
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    settings: &KSettings,
) -> Result<KValue> {
    if is_l1_linf(e, f_space) {
        return k_truncation_with(f, a, b, e, f_space, settings);
    }
    let t = k_truncation_with(f, a, b, e, f_space, settings)?;
    let g = k_general(f, a, b, e, f_space, settings.iterations, settings.tol)?;
    let (mut winner, other) = if g.value <= t.value { (g, t) } else { (t, g) };
    winner.lower = winner.lower.max(other.lower).min(winner.value);
    Ok(winner)
}

/// Evaluates the K-functional over a batch of `(a, b)` pairs; data-parallel
/// when the `parallel` feature is enabled.
pub fn k_functional_batch(
    f: &StepFunction,
    pairs: &[(f64, f64)],
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    settings: &KSettings,
) -> Result<Vec<KValue>> {
    exec::map_collect(pairs, |(a, b)| k_functional_with(f, *a, *b, e, f_space, settings))
        .into_iter()
        .collect()
}

/// Sequential twin of [`k_functional_batch`] (for benchmarks and as the
/// fallback path).
pub fn k_functional_batch_seq(
    f: &StepFunction,
    pairs: &[(f64, f64)],
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    settings: &KSettings,
) -> Result<Vec<KValue>> {
    exec::map_collect_seq(pairs, |(a, b)| k_functional_with(f, *a, *b, e, f_space, settings))
        .into_iter()
        .collect()
}
