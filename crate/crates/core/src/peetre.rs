//! The Peetre interpolation norm built from a couple `(E, F)`, a sequence
//! space `W` with a 1-unconditional coordinatewise-monotone norm, and weight
//! sequences `(a_i)` nondecreasing to infinity and `(b_i)` nonincreasing and
//! summable:
//!
//! the unnormalized value is `|| (k(f; a_i, b_i))_i ||_W`, truncated after `N`
//! terms with the certified tail bound `||f||_F * ||(b_i)_{i>N}||_W` (valid
//! because `k(f; a_i, b_i) <= b_i ||f||_F` and the `W`-norm is monotone); the
//! reported norm divides by the cached unnormalized value of the constant 1,
//! which pins the fundamental function at 1.

use crate::error::{Error, Result};
use crate::kfun::{k_functional_batch, KSettings, KValue};
use crate::spaces::SpaceSpec;
use crate::step::StepFunction;

/// A sequence space with a 1-unconditional, coordinatewise-monotone norm.
/// Coefficients are indexed from 1 (relevant for the weighted variant).
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSpaceSpec {
    Lp { p: f64 },
    Sup,
    /// `|| c || = (sum_i gamma^i |c_i|^p)^(1/p)`.
    WeightedLp { p: f64, gamma: f64 },
}

impl std::fmt::Display for SequenceSpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequenceSpaceSpec::Lp { p } => write!(f, "l{p}"),
            SequenceSpaceSpec::Sup => write!(f, "sup"),
            SequenceSpaceSpec::WeightedLp { p, gamma } => write!(f, "l{p}[gamma={gamma}]"),
        }
    }
}

impl SequenceSpaceSpec {
    pub fn lp(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidSpace(format!("sequence lp requires p >= 1 (got {p})")));
        }
        Ok(SequenceSpaceSpec::Lp { p })
    }

    pub fn sup() -> Self {
        SequenceSpaceSpec::Sup
    }

    pub fn weighted_lp(p: f64, gamma: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidSpace(format!("sequence lp requires p >= 1 (got {p})")));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidSpace(format!("weight base must be positive (got {gamma})")));
        }
        Ok(SequenceSpaceSpec::WeightedLp { p, gamma })
    }

    /// Norm of a finite coefficient sequence `(c_1, ..., c_n)`.
    pub fn norm(&self, coeffs: &[f64]) -> f64 {
        match self {
            SequenceSpaceSpec::Lp { p } if *p == 1.0 => coeffs.iter().map(|c| c.abs()).sum(),
            SequenceSpaceSpec::Lp { p } => {
                let s: f64 = coeffs.iter().map(|c| c.abs().powf(*p)).sum();
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(1.0 / p)
                }
            }
            SequenceSpaceSpec::Sup => coeffs.iter().fold(0.0, |a, c| a.max(c.abs())),
            SequenceSpaceSpec::WeightedLp { p, gamma } => {
                let s: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(idx, c)| gamma.powi(idx as i32 + 1) * c.abs().powf(*p))
                    .sum();
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(1.0 / p)
                }
            }
        }
    }

    /// Norm of the i-th coordinate unit vector (i >= 1).
    pub fn unit_vector_norm(&self, i: usize) -> f64 {
        match self {
            SequenceSpaceSpec::Lp { .. } | SequenceSpaceSpec::Sup => 1.0,
            SequenceSpaceSpec::WeightedLp { p, gamma } => gamma.powi(i as i32).powf(1.0 / p),
        }
    }
}

/// Closed-form weight sequences: `(a_i)` nondecreasing with `a_i -> inf`,
/// `(b_i)` nonincreasing and summable, indexed from 1, with analytic partial
/// sums `A_n` and exact `W`-norm tails of `(b_i)_{i>N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightScheme {
    kind: WeightKind,
}

#[derive(Debug, Clone, PartialEq)]
enum WeightKind {
    Geometric { a0: f64, rho: f64, b0: f64, sigma: f64 },
    Prefixed {
        a_prefix: Vec<f64>,
        b_prefix: Vec<f64>,
        a0: f64,
        rho: f64,
        b0: f64,
        sigma: f64,
    },
}

fn check_geometric(a0: f64, rho: f64, b0: f64, sigma: f64) -> Result<()> {
    if !a0.is_finite() || a0 <= 0.0 || !rho.is_finite() || rho <= 1.0 {
        return Err(Error::InvalidWeights(format!(
            "need a0 > 0 and rho > 1 so that a_i grows to infinity (got a0={a0}, rho={rho})"
        )));
    }
    if !b0.is_finite() || b0 <= 0.0 || !sigma.is_finite() || sigma <= 0.0 || sigma >= 1.0 {
        return Err(Error::InvalidWeights(format!(
            "need b0 > 0 and 0 < sigma < 1 so that b_i is summable (got b0={b0}, sigma={sigma})"
        )));
    }
    Ok(())
}

impl WeightScheme {
    /// `a_i = a0 rho^i`, `b_i = b0 sigma^i` for `i >= 1`.
    pub fn geometric(a0: f64, rho: f64, b0: f64, sigma: f64) -> Result<Self> {
        check_geometric(a0, rho, b0, sigma)?;
        Ok(Self { kind: WeightKind::Geometric { a0, rho, b0, sigma } })
    }

    /// Explicit finite prefixes followed by geometric continuations (the
    /// continuation value at index `i` is still `a0 rho^i` / `b0 sigma^i`).
    pub fn prefixed(
        a_prefix: Vec<f64>,
        b_prefix: Vec<f64>,
        a0: f64,
        rho: f64,
        b0: f64,
        sigma: f64,
    ) -> Result<Self> {
        check_geometric(a0, rho, b0, sigma)?;
        for w in a_prefix.windows(2) {
            if !(w[0] <= w[1]) {
                return Err(Error::InvalidWeights("a-prefix must be nondecreasing".into()));
            }
        }
        for w in b_prefix.windows(2) {
            if !(w[0] >= w[1]) {
                return Err(Error::InvalidWeights("b-prefix must be nonincreasing".into()));
            }
        }
        if a_prefix.iter().any(|x| !x.is_finite() || *x <= 0.0)
            || b_prefix.iter().any(|x| !x.is_finite() || *x <= 0.0)
        {
            return Err(Error::InvalidWeights("prefix entries must be positive and finite".into()));
        }
        if let Some(last) = a_prefix.last() {
            if *last > a0 * rho.powi(a_prefix.len() as i32 + 1) {
                return Err(Error::InvalidWeights(
                    "a-prefix must not exceed its geometric continuation".into(),
                ));
            }
        }
        if let Some(last) = b_prefix.last() {
            if *last < b0 * sigma.powi(b_prefix.len() as i32 + 1) {
                return Err(Error::InvalidWeights(
                    "b-prefix must not drop below its geometric continuation".into(),
                ));
            }
        }
        Ok(Self { kind: WeightKind::Prefixed { a_prefix, b_prefix, a0, rho, b0, sigma } })
    }

    pub fn a(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        match &self.kind {
            WeightKind::Geometric { a0, rho, .. } => a0 * rho.powi(i as i32),
            WeightKind::Prefixed { a_prefix, a0, rho, .. } => {
                if i <= a_prefix.len() {
                    a_prefix[i - 1]
                } else {
                    a0 * rho.powi(i as i32)
                }
            }
        }
    }

    pub fn b(&self, i: usize) -> f64 {
        debug_assert!(i >= 1);
        match &self.kind {
            WeightKind::Geometric { b0, sigma, .. } => b0 * sigma.powi(i as i32),
            WeightKind::Prefixed { b_prefix, b0, sigma, .. } => {
                if i <= b_prefix.len() {
                    b_prefix[i - 1]
                } else {
                    b0 * sigma.powi(i as i32)
                }
            }
        }
    }

    /// `A_n = sum_{k=1}^{n} a_k`, in closed form for the geometric part.
    pub fn partial_sum_a(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match &self.kind {
            WeightKind::Geometric { a0, rho, .. } => {
                a0 * rho * (rho.powi(n as i32) - 1.0) / (rho - 1.0)
            }
            WeightKind::Prefixed { a_prefix, a0, rho, .. } => {
                let l = a_prefix.len();
                let head: f64 = a_prefix.iter().take(n).sum();
                if n <= l {
                    head
                } else {
                    head + a0 * (rho.powi(n as i32 + 1) - rho.powi(l as i32 + 1)) / (rho - 1.0)
                }
            }
        }
    }

    fn tail_params(&self) -> (f64, f64, &[f64]) {
        match &self.kind {
            WeightKind::Geometric { b0, sigma, .. } => (*b0, *sigma, &[]),
            WeightKind::Prefixed { b_prefix, b0, sigma, .. } => (*b0, *sigma, b_prefix),
        }
    }

    /// The geometric decay ratio of the `b` tail.
    pub fn sigma(&self) -> f64 {
        self.tail_params().1
    }

    /// Exact `W`-norm of the tail `(b_i)_{i>n}`. Returns infinity when the
    /// weighted-`lp` combination diverges (`gamma sigma^p >= 1`).
    pub fn b_tail_norm(&self, w: &SequenceSpaceSpec, n: usize) -> f64 {
        let (b0, sigma, prefix) = self.tail_params();
        let l = prefix.len();
        match w {
            SequenceSpaceSpec::Sup => self.b(n + 1),
            SequenceSpaceSpec::Lp { p } => {
                let mut s = 0.0;
                for i in (n + 1)..=l {
                    s += prefix[i - 1].powf(*p);
                }
                let start = l.max(n);
                let q = sigma.powf(*p);
                s += b0.powf(*p) * q.powi(start as i32 + 1) / (1.0 - q);
                s.powf(1.0 / p)
            }
            SequenceSpaceSpec::WeightedLp { p, gamma } => {
                let q = gamma * sigma.powf(*p);
                if q >= 1.0 {
                    return f64::INFINITY;
                }
                let mut s = 0.0;
                for i in (n + 1)..=l {
                    s += gamma.powi(i as i32) * prefix[i - 1].powf(*p);
                }
                let start = l.max(n);
                s += b0.powf(*p) * q.powi(start as i32 + 1) / (1.0 - q);
                s.powf(1.0 / p)
            }
        }
    }
}

/// Least `j` with `2 A_{n0} / a_j < epsilon0`; exists because `a_i -> inf`.
pub fn head_index(epsilon0: f64, n0: usize, weights: &WeightScheme) -> Result<usize> {
    if !epsilon0.is_finite() || epsilon0 <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "epsilon0", value: epsilon0 });
    }
    if n0 == 0 {
        return Err(Error::InvalidParameter { name: "n0", value: 0.0 });
    }
    let target = 2.0 * weights.partial_sum_a(n0) / epsilon0;
    let mut j = 1usize;
    // geometric growth makes this loop short; guard anyway
    for _ in 0..1_000_000 {
        if weights.a(j) > target {
            return Ok(j);
        }
        j += 1;
    }
    Err(Error::InvalidParameter { name: "head_index", value: j as f64 })
}

/// Least `N >= 1` with `f_norm * ||(b_i)_{i>N}||_W <= epsilon0`.
pub fn tail_index(
    epsilon0: f64,
    f_norm: f64,
    weights: &WeightScheme,
    w: &SequenceSpaceSpec,
) -> Result<usize> {
    if !epsilon0.is_finite() || epsilon0 <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "epsilon0", value: epsilon0 });
    }
    if !f_norm.is_finite() || f_norm < 0.0 {
        return Err(Error::InvalidParameter { name: "f_norm", value: f_norm });
    }
    let mut n = 1usize;
    for _ in 0..1_000_000 {
        if f_norm * weights.b_tail_norm(w, n) <= epsilon0 {
            return Ok(n);
        }
        n += 1;
    }
    Err(Error::InvalidParameter { name: "tail_index", value: n as f64 })
}

/// Solver configuration for a [`PeetreSpec`].
#[derive(Debug, Clone)]
pub struct PeetreSettings {
    pub k: KSettings,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// Relative bracket tolerance for the cached normalizer.
    pub normalizer_tol: f64,
    /// Default tolerance used by the experiment drivers.
    pub peetre_tol: f64,
}

impl Default for PeetreSettings {
    fn default() -> Self {
        Self {
            k: KSettings::default(),
            max_terms: 4096,
            normalizer_tol: 1e-9,
            peetre_tol: 1e-8,
        }
    }
}

/// Cached unnormalized norm of the constant 1, with its bracket.
#[derive(Debug, Clone, Copy)]
pub struct Normalizer {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub terms: usize,
}

/// The bundle `(E, F, W, (a_i), (b_i))` plus solver settings and the cached
/// normalizer. Immutable after construction; evaluations are pure.
#[derive(Debug, Clone)]
pub struct PeetreSpec {
    e: SpaceSpec,
    f: SpaceSpec,
    w: SequenceSpaceSpec,
    weights: WeightScheme,
    settings: PeetreSettings,
    normalizer: Normalizer,
}

/// Two-sided bracket of the unnormalized Peetre value at a finite truncation.
///
/// `lo`/`hi` are running intersections over all shorter truncations, so
/// brackets at larger `N` nest inside brackets at smaller `N` by construction.
#[derive(Debug, Clone, Copy)]
pub struct UnnormalizedBracket {
    pub lo: f64,
    pub hi: f64,
    /// `W`-norm of the lower k-brackets of the head.
    pub head_lower: f64,
    /// `W`-norm of the k-values of the head (no tail).
    pub head_value: f64,
    /// `W`-norm of the upper k-brackets of the head.
    pub head_upper: f64,
    /// `||f||_F * ||(b_i)_{i>N}||_W`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// A normalized Peetre-norm evaluation with its certified bracket.
#[derive(Debug, Clone, Copy)]
pub struct KEvaluation {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub terms: usize,
    pub converged: bool,
}

fn pairs_for(weights: &WeightScheme, from: usize, to: usize) -> Vec<(f64, f64)> {
    (from..=to).map(|i| (weights.a(i), weights.b(i))).collect()
}

fn bracket_from_kvalues(
    ks: &[KValue],
    f_f_norm: f64,
    w: &SequenceSpaceSpec,
    weights: &WeightScheme,
) -> UnnormalizedBracket {
    let n = ks.len();
    let lowers: Vec<f64> = ks.iter().map(|k| k.lower).collect();
    let values: Vec<f64> = ks.iter().map(|k| k.value).collect();
    let uppers: Vec<f64> = ks.iter().map(|k| k.upper).collect();
    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for m in 1..=n {
        let raw_lo = w.norm(&lowers[..m]);
        let raw_hi = w.norm(&uppers[..m]) + f_f_norm * weights.b_tail_norm(w, m);
        lo = lo.max(raw_lo);
        hi = hi.min(raw_hi);
    }
    lo = lo.min(hi);
    UnnormalizedBracket {
        lo,
        hi,
        head_lower: w.norm(&lowers),
        head_value: w.norm(&values),
        head_upper: w.norm(&uppers),
        tail_bound: f_f_norm * weights.b_tail_norm(w, n),
        terms: n,
    }
}

struct AdaptiveOutcome {
    bracket: UnnormalizedBracket,
    converged: bool,
}

fn adaptive_unnormalized(
    f: &StepFunction,
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    w: &SequenceSpaceSpec,
    weights: &WeightScheme,
    settings: &PeetreSettings,
    tol: f64,
) -> Result<AdaptiveOutcome> {
    let f_f_norm = f_space.norm(f);
    let mut ks: Vec<KValue> = Vec::new();
    let mut n = 4usize.min(settings.max_terms.max(1));
    let mut prev_width: Option<f64> = None;
    loop {
        if ks.len() < n {
            // stop extending where a_i overflows; the bracket so far stays valid
            let mut pairs = Vec::with_capacity(n - ks.len());
            for i in ks.len() + 1..=n {
                let (a, b) = (weights.a(i), weights.b(i));
                if !a.is_finite() {
                    break;
                }
                pairs.push((a, b));
            }
            let new = k_functional_batch(f, &pairs, e, f_space, &settings.k)?;
            ks.extend(new);
        }
        let capped = ks.len() < n;
        let bracket = bracket_from_kvalues(&ks, f_f_norm, w, weights);
        let mid = 0.5 * (bracket.lo + bracket.hi);
        let width = bracket.hi - bracket.lo;
        if width <= tol * mid.max(1e-6) {
            return Ok(AdaptiveOutcome { bracket, converged: true });
        }
        // the running intersection makes widths nonincreasing; once the tail
        // is negligible the k-solver gaps set a floor no truncation removes
        let stalled = prev_width.is_some_and(|pw| width > 0.99 * pw);
        if n >= settings.max_terms || capped || stalled {
            return Ok(AdaptiveOutcome { bracket, converged: false });
        }
        prev_width = Some(width);
        n = (n * 2).min(settings.max_terms);
    }
}

impl PeetreSpec {
    pub fn new(
        e: SpaceSpec,
        f: SpaceSpec,
        w: SequenceSpaceSpec,
        weights: WeightScheme,
    ) -> Result<Self> {
        Self::with_settings(e, f, w, weights, PeetreSettings::default())
    }

    pub fn with_settings(
        e: SpaceSpec,
        f: SpaceSpec,
        w: SequenceSpaceSpec,
        weights: WeightScheme,
        settings: PeetreSettings,
    ) -> Result<Self> {
        if let SequenceSpaceSpec::WeightedLp { p, gamma } = &w {
            if gamma * weights.sigma().powf(*p) >= 1.0 {
                return Err(Error::InvalidWeights(
                    "gamma * sigma^p must be < 1 so the weighted tail is summable".into(),
                ));
            }
        }
        let one = StepFunction::constant(1.0).unwrap();
        let outcome =
            adaptive_unnormalized(&one, &e, &f, &w, &weights, &settings, settings.normalizer_tol)?;
        if !outcome.converged {
            return Err(Error::InvalidWeights(
                "normalizer bracket failed to reach the configured tolerance".into(),
            ));
        }
        let b = outcome.bracket;
        let normalizer = Normalizer {
            value: 0.5 * (b.lo + b.hi),
            lower: b.lo,
            upper: b.hi,
            terms: b.terms,
        };
        if !(normalizer.value > 0.0) {
            return Err(Error::InvalidWeights("normalizer must be positive".into()));
        }
        Ok(Self { e, f, w, weights, settings, normalizer })
    }

    pub fn space_e(&self) -> &SpaceSpec {
        &self.e
    }

    pub fn space_f(&self) -> &SpaceSpec {
        &self.f
    }

    pub fn sequence_space(&self) -> &SequenceSpaceSpec {
        &self.w
    }

    pub fn weights(&self) -> &WeightScheme {
        &self.weights
    }

    pub fn settings(&self) -> &PeetreSettings {
        &self.settings
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    pub fn head_index(&self, epsilon0: f64, n0: usize) -> Result<usize> {
        head_index(epsilon0, n0, &self.weights)
    }

    pub fn tail_index(&self, epsilon0: f64, f_norm: f64) -> Result<usize> {
        tail_index(epsilon0, f_norm, &self.weights, &self.w)
    }

    /// K-functional values `k(f; a_i, b_i)` for `i` in `from..=to`.
    pub fn k_sequence(&self, f: &StepFunction, from: usize, to: usize) -> Result<Vec<KValue>> {
        if from == 0 || to < from {
            return Err(Error::InvalidParameter { name: "k_sequence range", value: from as f64 });
        }
        k_functional_batch(f, &pairs_for(&self.weights, from, to), &self.e, &self.f, &self.settings.k)
    }
}

/// Bracket of the unnormalized Peetre value after `n` series terms.
pub fn peetre_norm_unnormalized(
    f: &StepFunction,
    spec: &PeetreSpec,
    n: usize,
) -> Result<UnnormalizedBracket> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "n", value: 0.0 });
    }
    if f.is_zero() {
        return Ok(UnnormalizedBracket {
            lo: 0.0,
            hi: 0.0,
            head_lower: 0.0,
            head_value: 0.0,
            head_upper: 0.0,
            tail_bound: 0.0,
            terms: n,
        });
    }
    let ks = spec.k_sequence(f, 1, n)?;
    Ok(bracket_from_kvalues(&ks, spec.space_f().norm(f), &spec.w, &spec.weights))
}

/// Normalized Peetre norm with a certified bracket; increases the truncation
/// until the bracket width is below `tol` relative to the value (absolute for
/// values near zero). Constant functions short-circuit to their exact norm,
/// which pins `||chi_[0,1]||_K = 1`.
pub fn peetre_norm(f: &StepFunction, spec: &PeetreSpec, tol: f64) -> Result<KEvaluation> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "tol", value: tol });
    }
    if f.is_zero() {
        return Ok(KEvaluation { value: 0.0, lower: 0.0, upper: 0.0, terms: 0, converged: true });
    }
    if f.cell_count() == 1 {
        // homogeneity makes constants exact: U(c) = |c| U(1)
        let c = f.values()[0].abs();
        return Ok(KEvaluation { value: c, lower: c, upper: c, terms: 0, converged: true });
    }
    let outcome = adaptive_unnormalized(
        f,
        &spec.e,
        &spec.f,
        &spec.w,
        &spec.weights,
        &spec.settings,
        tol,
    )?;
    let b = outcome.bracket;
    let nz = spec.normalizer;
    Ok(KEvaluation {
        value: 0.5 * (b.lo + b.hi) / nz.value,
        lower: b.lo / nz.upper,
        upper: b.hi / nz.lower,
        terms: b.terms,
        converged: outcome.converged,
    })
}
