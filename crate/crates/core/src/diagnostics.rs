//! Concentration moduli over small sets and inclusion diagnostics.
//!
//! Two normalizations are deliberately kept apart. `eta_point`/`eta_family`
//! divide by the norm of `x` in the *host* space `E`; with indicator
//! functions in the family that ratio is identically 1, so it cannot decay.
//! The modulus `s_tau` divides by the norm in the *included* space `F`
//! instead; that is the quantity whose decay as `tau -> 0` witnesses an
//! absolutely continuous inclusion, and the one the head/tail experiments
//! consume.

use crate::error::{Error, Result};
use crate::exec;
use crate::spaces::SpaceSpec;
use crate::step::StepFunction;

/// A named finite collection of nonzero step functions standing in for an
/// infinite ball: every reported supremum over a family is a lower bound of
/// the corresponding supremum over the ball.
#[derive(Debug, Clone)]
pub struct TestFamily {
    name: String,
    members: Vec<StepFunction>,
}

impl TestFamily {
    pub fn new(name: impl Into<String>, members: Vec<StepFunction>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for (i, m) in members.iter().enumerate() {
            if m.is_zero() {
                return Err(Error::ZeroFamilyMember(i));
            }
        }
        Ok(Self { name: name.into(), members })
    }

    /// Indicators `chi_[0, tau]` for each tau in the grid.
    pub fn indicators(taus: &[f64]) -> Result<Self> {
        let members = taus
            .iter()
            .map(|t| StepFunction::prefix_indicator(*t))
            .collect::<Result<Vec<_>>>()?;
        Self::new("indicators", members)
    }

    /// Witnesses `tau^(-1/q) chi_[0, tau]`; these attain the Holder bound for
    /// an `(L_p, L_q)` pair. Pass `q = f64::INFINITY` for plain indicators.
    pub fn scaled_indicators(taus: &[f64], q: f64) -> Result<Self> {
        let members = taus
            .iter()
            .map(|t| {
                let base = StepFunction::prefix_indicator(*t)?;
                let scale = if q.is_finite() { t.powf(-1.0 / q) } else { 1.0 };
                if !scale.is_finite() {
                    return Err(Error::InvalidParameter { name: "tau", value: *t });
                }
                Ok(base.scale(scale))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new("scaled_indicators", members)
    }

    /// Step profiles approximating `t^(-alpha)` on a dyadic partition.
    pub fn power_profiles(alphas: &[f64], levels: u32) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParameter { name: "levels", value: 0.0 });
        }
        let mut members = Vec::new();
        for alpha in alphas {
            if !alpha.is_finite() || *alpha <= 0.0 || *alpha >= 1.0 {
                return Err(Error::InvalidParameter { name: "alpha", value: *alpha });
            }
            let mut breakpoints = vec![0.0];
            for k in (0..=levels).rev() {
                breakpoints.push(0.5f64.powi(k as i32));
            }
            let mut values = vec![0.0; breakpoints.len() - 1];
            for i in 1..breakpoints.len() - 1 {
                let mid = 0.5 * (breakpoints[i] + breakpoints[i + 1]);
                values[i] = mid.powf(-alpha);
            }
            // deepest dyadic cell continues the profile rather than dropping to 0
            values[0] = (0.75 * breakpoints[1]).powf(-alpha);
            members.push(StepFunction::new(breakpoints, values)?);
        }
        Self::new("power_profiles", members)
    }

    /// Deterministic random members.
    pub fn random(seed: u64, count: usize, cells: usize, amplitude: f64) -> Result<Self> {
        let mut members = Vec::new();
        let mut s = seed;
        while members.len() < count {
            let f = StepFunction::random(s, cells, amplitude)?;
            if !f.is_zero() {
                members.push(f);
            }
            s = s.wrapping_add(1);
        }
        Self::new("random", members)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &[StepFunction] {
        &self.members
    }

    pub fn merged(mut self, other: TestFamily) -> Self {
        self.members.extend(other.members);
        self.name = format!("{}+{}", self.name, other.name);
        self
    }
}

/// `sup { ||f chi_e||_E / ||f||_E : mes(e) = tau }`, attained on the set where
/// `|f|` is largest, hence computed from the decreasing rearrangement.
pub fn eta_point(e: &SpaceSpec, f: &StepFunction, tau: f64) -> Result<f64> {
    if !tau.is_finite() || !(0.0..=1.0).contains(&tau) {
        return Err(Error::TauOutOfRange(tau));
    }
    let denom = e.norm(f);
    if denom == 0.0 {
        return Err(Error::ZeroFunction);
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let restricted = f.rearrange().mul(&StepFunction::prefix_indicator(tau)?);
    Ok(e.norm(&restricted) / denom)
}

/// Family version: the maximum of [`eta_point`] over the members, a lower
/// bound for the supremum over the ball the family stands in for.
pub fn eta_family(e: &SpaceSpec, family: &TestFamily, tau: f64) -> Result<f64> {
    let vals: Result<Vec<f64>> = exec::map_collect(family.members(), |m| eta_point(e, m, tau))
        .into_iter()
        .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}

/// The proof modulus: `max over the family of ||x* chi_[0,tau]||_E / ||x||_F`.
pub fn s_tau(e: &SpaceSpec, f_space: &SpaceSpec, tau: f64, family: &TestFamily) -> Result<f64> {
    if !tau.is_finite() || tau <= 0.0 || tau > 1.0 {
        return Err(Error::TauOutOfRange(tau));
    }
    let chi = StepFunction::prefix_indicator(tau)?;
    let vals: Result<Vec<f64>> = exec::map_collect(family.members(), |m| {
        let denom = f_space.norm(m);
        if denom == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(e.norm(&m.rearrange().mul(&chi)) / denom)
    })
    .into_iter()
    .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}

fn lp_exponent(space: &SpaceSpec) -> Option<f64> {
    match space {
        SpaceSpec::Lp { p } => Some(1.0 / p),
        SpaceSpec::LInfinity => Some(0.0),
        _ => None,
    }
}

/// Exponent `e` such that the true modulus is `s(tau) = tau^e`, available for
/// `(L_p, L_q)` pairs with `p <= q` (Holder; the scaled indicator attains it).
/// `e = 0` covers `E = F`, where the modulus is identically 1.
pub fn closed_form_modulus_exponent(e: &SpaceSpec, f_space: &SpaceSpec) -> Option<f64> {
    let (ae, af) = (lp_exponent(e)?, lp_exponent(f_space)?);
    if ae >= af {
        Some(ae - af)
    } else {
        None
    }
}

/// Closed-form modulus value where available.
pub fn closed_form_modulus(e: &SpaceSpec, f_space: &SpaceSpec, tau: f64) -> Option<f64> {
    closed_form_modulus_exponent(e, f_space).map(|expo| tau.powf(expo))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InclusionVerdict {
    /// The sampled profile drops below the threshold: consistent with an
    /// absolutely continuous inclusion. Says nothing about the actual limit.
    Consistent,
    Inconsistent,
}

impl std::fmt::Display for InclusionVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InclusionVerdict::Consistent => f.write_str("consistent with absolutely continuous inclusion"),
            InclusionVerdict::Inconsistent => f.write_str("inconsistent with absolutely continuous inclusion"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InclusionProfile {
    pub rows: Vec<(f64, f64)>,
    pub threshold: f64,
    pub verdict: InclusionVerdict,
}

/// Samples `s(tau)` on a grid decreasing toward 0 and reports whether the
/// profile dropped below the threshold at its smallest point.
pub fn inclusion_profile(
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    tau_grid: &[f64],
    family: &TestFamily,
    threshold: f64,
) -> Result<InclusionProfile> {
    if tau_grid.is_empty() {
        return Err(Error::InvalidParameter { name: "tau_grid", value: 0.0 });
    }
    for w in tau_grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidParameter { name: "tau_grid", value: w[1] });
        }
    }
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "threshold", value: threshold });
    }
    let rows: Result<Vec<(f64, f64)>> = tau_grid
        .iter()
        .map(|t| Ok((*t, s_tau(e, f_space, *t, family)?)))
        .collect();
    let rows = rows?;
    let last = rows.last().unwrap().1;
    let verdict = if last <= threshold {
        InclusionVerdict::Consistent
    } else {
        InclusionVerdict::Inconsistent
    };
    Ok(InclusionProfile { rows, threshold, verdict })
}

/// Lower bound on the inclusion constant `||i(F,E)||`: the maximum of
/// `||x||_E / ||x||_F` over the family.
pub fn inclusion_constant_estimate(
    e: &SpaceSpec,
    f_space: &SpaceSpec,
    family: &TestFamily,
) -> Result<f64> {
    let vals: Result<Vec<f64>> = exec::map_collect(family.members(), |m| {
        let denom = f_space.norm(m);
        if denom == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(e.norm(m) / denom)
    })
    .into_iter()
    .collect();
    Ok(vals?.into_iter().fold(0.0, f64::max))
}
