use statrs::distribution::{Beta, Continuous, ContinuousCDF, Normal, Uniform};

use super::intervals::{constraint_set, support, Interval, IntervalSet};
use super::MeasureError;
use crate::syntax::{ConstraintExpr, DistributionExpr, Relation};

pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
pub const QUADRATURE_MAX_DEPTH: u32 = 50;

/// How the measure of an interval under a continuous distribution is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasureMethod {
    /// Difference of CDF values (regularized incomplete beta, erf, linear).
    #[default]
    ClosedForm,
    /// Adaptive Simpson integration of the density.
    Quadrature,
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a >= b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f((a + b) / 2.0), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn bad(e: impl std::fmt::Display) -> MeasureError {
    MeasureError::InvalidDistribution(e.to_string())
}

fn interval_cdf(d: &DistributionExpr, lo: f64, hi: f64) -> Result<f64, MeasureError> {
    let cdf = |x: f64| -> Result<f64, MeasureError> {
        Ok(match *d {
            DistributionExpr::Beta(a, b) => Beta::new(a.0, b.0).map_err(bad)?.cdf(x.clamp(0.0, 1.0)),
            DistributionExpr::Normal(m, s) => Normal::new(m.0, s.0).map_err(bad)?.cdf(x),
            DistributionExpr::Uniform(l, h) => Uniform::new(l.0, h.0).map_err(bad)?.cdf(x.clamp(l.0, h.0)),
            DistributionExpr::Flip(_) => unreachable!("flip is discrete"),
        })
    };
    Ok(cdf(hi)? - cdf(lo)?)
}

/// Beta densities blow up at 0 (a < 1) or 1 (b < 1). Near such an end the integral is
/// taken in t = x^a (or t = (1-x)^b), which turns the integrand into a bounded function.
fn beta_quadrature(a: f64, b: f64, lo: f64, hi: f64) -> Result<f64, MeasureError> {
    let dist = Beta::new(a, b).map_err(bad)?;
    let ln_b = statrs::function::beta::ln_beta(a, b);
    let (lo, hi) = (lo.max(0.0), hi.min(1.0));
    let mid = lo.max(hi.min(0.5));
    let left = if a < 1.0 {
        let g = |t: f64| {
            let x = t.powf(1.0 / a);
            ((b - 1.0) * (1.0 - x).ln() - ln_b).exp() / a
        };
        adaptive_simpson(&g, lo.powf(a), mid.powf(a), QUADRATURE_TOLERANCE / 2.0, QUADRATURE_MAX_DEPTH)
    } else {
        adaptive_simpson(&|x| dist.pdf(x), lo, mid, QUADRATURE_TOLERANCE / 2.0, QUADRATURE_MAX_DEPTH)
    };
    let right = if b < 1.0 {
        let g = |t: f64| {
            let x = 1.0 - t.powf(1.0 / b);
            ((a - 1.0) * x.ln() - ln_b).exp() / b
        };
        adaptive_simpson(&g, (1.0 - hi).powf(b), (1.0 - mid).powf(b), QUADRATURE_TOLERANCE / 2.0, QUADRATURE_MAX_DEPTH)
    } else {
        adaptive_simpson(&|x| dist.pdf(x), mid, hi, QUADRATURE_TOLERANCE / 2.0, QUADRATURE_MAX_DEPTH)
    };
    Ok(left + right)
}

fn interval_quadrature(d: &DistributionExpr, lo: f64, hi: f64) -> Result<f64, MeasureError> {
    match *d {
        DistributionExpr::Beta(a, b) => beta_quadrature(a.0, b.0, lo, hi),
        DistributionExpr::Normal(m, s) => {
            // beyond 12 standard deviations the tail mass is below 1e-32
            let n = Normal::new(m.0, s.0).map_err(bad)?;
            let (lo, hi) = (lo.max(m.0 - 12.0 * s.0), hi.min(m.0 + 12.0 * s.0));
            Ok(adaptive_simpson(&|x| n.pdf(x), lo, hi, QUADRATURE_TOLERANCE, QUADRATURE_MAX_DEPTH))
        }
        DistributionExpr::Uniform(l, h) => {
            if !(l.0 < h.0) {
                return Err(bad(format!("uniform bounds ({}, {})", l.0, h.0)));
            }
            let density = 1.0 / (h.0 - l.0);
            Ok(adaptive_simpson(&|_| density, lo.max(l.0), hi.min(h.0), QUADRATURE_TOLERANCE, QUADRATURE_MAX_DEPTH))
        }
        DistributionExpr::Flip(_) => unreachable!("flip is discrete"),
    }
}

/// Probability that a variable drawn from `d` lies in `set`.
pub fn measure(d: &DistributionExpr, set: &IntervalSet, method: MeasureMethod) -> Result<f64, MeasureError> {
    d.validate().map_err(MeasureError::InvalidDistribution)?;
    if let DistributionExpr::Flip(p) = *d {
        let mut total = 0.0;
        if set.contains(0.0) {
            total += 1.0 - p.0;
        }
        if set.contains(1.0) {
            total += p.0;
        }
        return Ok(total);
    }
    let mut total = 0.0;
    for Interval { lo, hi, .. } in set.intervals().iter().copied() {
        if lo >= hi {
            continue; // single points carry no mass
        }
        total += match method {
            MeasureMethod::ClosedForm => interval_cdf(d, lo, hi)?,
            MeasureMethod::Quadrature => interval_quadrature(d, lo, hi)?,
        };
    }
    Ok(total.clamp(0.0, 1.0))
}

pub fn indicator_probability(d: &DistributionExpr, c: &ConstraintExpr) -> Result<f64, MeasureError> {
    indicator_probability_with(d, c, MeasureMethod::ClosedForm)
}

/// μ_d({x : c(x)}). Equality on a continuous variable has measure zero; it is allowed but
/// logged, since it is almost always a modelling mistake.
pub fn indicator_probability_with(
    d: &DistributionExpr,
    c: &ConstraintExpr,
    method: MeasureMethod,
) -> Result<f64, MeasureError> {
    if c.relation == Relation::Eq && !matches!(d, DistributionExpr::Flip(_)) {
        log::warn!("equality constraint on continuous {} variable has probability zero", d.name());
    }
    measure(d, &constraint_set(d, c), method)
}

/// Total mass of the support; 1 up to rounding.
pub fn total_mass(d: &DistributionExpr, method: MeasureMethod) -> Result<f64, MeasureError> {
    measure(d, &support(d), method)
}
