//! Sphere volumes, the radial cap integral `I_m(σ)`, and projective cap measures.
//!
//! `I_m(σ) = ∫_0^σ r^{m-1} (1 - r²)^{-1/2} dr = ½·B(σ²; m/2, ½)`.
//!
//! Three independent evaluation routes are provided: the incomplete beta
//! continued fraction ([`cap_integral`], the primary backend, evaluated in log
//! space), adaptive quadrature on the arcsin-substituted integrand
//! ([`cap_integral_quadrature`]), and the Wallis recurrence for integer orders
//! ([`cap_integral_wallis`]).

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::quadrature;
use crate::special::{ln_gamma, ln_inc_beta};

const QUAD_REL_TOL: f64 = 1e-13;
const QUAD_MAX_INTERVALS: usize = 4000;

/// `ln O_n`, the log of the volume of the unit sphere `S^n ⊂ R^{n+1}`.
pub fn ln_sphere_volume(n: u32) -> f64 {
    let h = 0.5 * (f64::from(n) + 1.0);
    LN_2 + h * PI.ln() - ln_gamma(h)
}

/// `O_n = 2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: u32) -> f64 {
    ln_sphere_volume(n).exp()
}

fn check_order(m: f64) -> Result<()> {
    if m.is_finite() && m > 0.0 {
        Ok(())
    } else {
        Err(domain("m", m, "(0, ∞)"))
    }
}

fn check_radius(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma <= 1.0 {
        Ok(())
    } else {
        Err(domain("sigma", sigma, "(0, 1]"))
    }
}

/// `ln I_m(ρ)` for `ρ ∈ [0, 1]`; `-∞` at `ρ = 0`. Inputs are not validated.
pub(crate) fn ln_cap_integral_unchecked(m: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let x = rho * rho;
    let xc = (1.0 - rho) * (1.0 + rho);
    -LN_2 + ln_inc_beta(x, xc, 0.5 * m, 0.5)
}

/// `ln I_m(σ)`. Use this (and differences of it) whenever `σ^m` may underflow.
pub fn ln_cap_integral(m: f64, sigma: f64) -> Result<f64> {
    check_order(m)?;
    check_radius(sigma)?;
    Ok(ln_cap_integral_unchecked(m, sigma))
}

/// `I_m(σ)` for real order `m > 0` and `σ ∈ (0, 1]`.
pub fn cap_integral(m: f64, sigma: f64) -> Result<f64> {
    Ok(ln_cap_integral(m, sigma)?.exp())
}

fn sin_ratio(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// `ln ∫_0^ρ w(r) r^{m-1} (1-r²)^{-1/2} dr` by quadrature.
///
/// With `r = sin θ` and `θ = α v^{1/m}` (`α = arcsin ρ`) the integral becomes
/// `(α^m / m) ∫_0^1 w(sin θ) (sin θ / θ)^{m-1} dv`, which is bounded at both
/// ends for every `m > 0`, including the `σ = 1` endpoint and orders below one.
pub(crate) fn ln_radial_integral_from_zero<W: Fn(f64) -> f64>(w: W, m: f64, rho: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let alpha = rho.asin();
    let inv_m = 1.0 / m;
    let q = quadrature::integrate(
        |v: f64| {
            let theta = alpha * v.powf(inv_m);
            w(theta.sin()) * ((m - 1.0) * sin_ratio(theta).ln()).exp()
        },
        0.0,
        1.0,
        QUAD_REL_TOL,
        0.0,
        QUAD_MAX_INTERVALS,
    );
    if !q.converged && q.abs_error > 1e-9 * q.value.abs() {
        return Err(Error::NotConverged("radial quadrature"));
    }
    if !(q.value > 0.0) || !q.value.is_finite() {
        return Err(Error::Profile(alloc::format!(
            "radial integral is not positive and finite ({})",
            q.value
        )));
    }
    Ok(m * alpha.ln() - m.ln() + q.value.ln())
}

/// `∫_lo^hi w(r) r^{m-1} (1-r²)^{-1/2} dr` for `0 < lo ≤ hi ≤ 1`, integrated
/// in `θ = arcsin r` where the integrand is smooth.
pub(crate) fn radial_integral_between<W: Fn(f64) -> f64>(w: W, m: f64, lo: f64, hi: f64) -> Result<f64> {
    let (ta, tb) = (lo.asin(), hi.asin());
    let q = quadrature::integrate(
        |theta: f64| {
            let s = theta.sin();
            w(s) * s.powf(m - 1.0)
        },
        ta,
        tb,
        QUAD_REL_TOL,
        0.0,
        QUAD_MAX_INTERVALS,
    );
    if !q.converged && q.abs_error > 1e-9 * q.value.abs() {
        return Err(Error::NotConverged("radial quadrature"));
    }
    Ok(q.value)
}

/// `I_m(σ)` by adaptive quadrature of `∫_0^{arcsin σ} sin^{m-1}θ dθ`.
/// Independent of the incomplete beta backend; used as a cross-check.
pub fn cap_integral_quadrature(m: f64, sigma: f64) -> Result<f64> {
    check_order(m)?;
    check_radius(sigma)?;
    Ok(ln_radial_integral_from_zero(|_| 1.0, m, sigma)?.exp())
}

/// `I_m(σ)` for integer `m ≥ 1` via the Wallis recurrence on
/// `J_k(α) = ∫_0^α sin^k θ dθ`, `α = arcsin σ`, `I_m(σ) = J_{m-1}(α)`.
///
/// The recurrence `k·J_k = -cos α · sin^{k-1} α + (k-1)·J_{k-2}` is run
/// upward when `sin² α ≥ 0.8` and downward from a far start otherwise, the
/// direction in which it is stable.
pub fn cap_integral_wallis(m: u32, sigma: f64) -> Result<f64> {
    if m == 0 {
        return Err(domain("m", 0.0, "integer ≥ 1"));
    }
    check_radius(sigma)?;
    let k_target = (m - 1) as usize;
    let alpha = sigma.asin();
    let s = sigma;
    let c = ((1.0 - sigma) * (1.0 + sigma)).sqrt();
    if s * s >= 0.8 {
        let mut j = if k_target % 2 == 0 { alpha } else { 1.0 - c };
        let mut k = k_target % 2;
        while k < k_target {
            k += 2;
            let kf = k as f64;
            j = (-c * s.powi(k as i32 - 1) + (kf - 1.0) * j) / kf;
        }
        Ok(j)
    } else {
        // Start far above the target with J ≈ 0; the start error shrinks by
        // roughly sin² α per step on the way down.
        let mut k = k_target + 400;
        if (k - k_target) % 2 == 1 {
            k += 1;
        }
        let mut j = 0.0;
        while k > k_target {
            let kf = k as f64;
            // J_{k-2} = (k·J_k + cos α · sin^{k-1} α) / (k-1)
            j = (kf * j + c * s.powi(k as i32 - 1)) / (kf - 1.0);
            k -= 2;
        }
        Ok(j)
    }
}

/// Which option of the upper sandwich bound attains the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperBranch {
    /// `(1 - σ²)^{-1/2} · σ^m / m`
    Secant,
    /// `sqrt(π m / 2) · σ^m / m`
    PiHalf,
}

/// `σ^m/m ≤ I_m(σ) ≤ min{(1-σ²)^{-1/2}, sqrt(πm/2)}·σ^m/m`, as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapBounds {
    pub lower: f64,
    pub upper: f64,
    pub branch: UpperBranch,
}

pub fn cap_integral_bounds(m: f64, sigma: f64) -> Result<CapBounds> {
    check_order(m)?;
    check_radius(sigma)?;
    let base = sigma.powf(m) / m;
    let secant = if sigma < 1.0 {
        1.0 / ((1.0 - sigma) * (1.0 + sigma)).sqrt()
    } else {
        f64::INFINITY
    };
    let pi_half = (PI * m / 2.0).sqrt();
    let (factor, branch) = if secant <= pi_half {
        (secant, UpperBranch::Secant)
    } else {
        (pi_half, UpperBranch::PiHalf)
    };
    Ok(CapBounds {
        lower: base,
        upper: factor * base,
        branch,
    })
}

/// `ν(B_P(a, σ)) = O_{n-1} · I_n(σ)`.
pub fn cap_measure(n: u32, sigma: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("n", 0.0, "integer ≥ 1"));
    }
    Ok((ln_sphere_volume(n - 1) + ln_cap_integral(f64::from(n), sigma)?).exp())
}

/// `ln ν_{a,σ}(B_P(a, ρ)) = ln I_n(ρ) - ln I_n(σ)`.
pub fn ln_uniform_cap_fraction(n: u32, sigma: f64, rho: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("n", 0.0, "integer ≥ 1"));
    }
    check_radius(sigma)?;
    if !(0.0..=sigma).contains(&rho) {
        return Err(domain("rho", rho, "[0, sigma]"));
    }
    let m = f64::from(n);
    Ok((ln_cap_integral_unchecked(m, rho) - ln_cap_integral_unchecked(m, sigma)).min(0.0))
}

/// Uniform cap measure of the concentric ball: `I_n(ρ) / I_n(σ)`.
pub fn uniform_cap_fraction(n: u32, sigma: f64, rho: f64) -> Result<f64> {
    Ok(ln_uniform_cap_fraction(n, sigma, rho)?.exp())
}

/// One grid point of the sandwich-bound validity scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichRow {
    pub m: f64,
    pub sigma: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub branch: UpperBranch,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// Whether `sqrt(πm/2)·σ^m/m` alone bounds `I_m(σ)` from above.
    pub pi_half_holds: bool,
}

/// Evaluates both sides of the sandwich bound on a grid, with additive slack
/// `1e-12·upper`.
pub fn sandwich_scan(orders: &[f64], sigmas: &[f64]) -> Result<Vec<SandwichRow>> {
    let mut rows = Vec::with_capacity(orders.len() * sigmas.len());
    for &m in orders {
        for &sigma in sigmas {
            let value = cap_integral(m, sigma)?;
            let b = cap_integral_bounds(m, sigma)?;
            let slack = 1e-12 * b.upper;
            let pi_half = (PI * m / 2.0).sqrt() * sigma.powf(m) / m;
            rows.push(SandwichRow {
                m,
                sigma,
                value,
                lower: b.lower,
                upper: b.upper,
                branch: b.branch,
                lower_holds: b.lower <= value + slack,
                upper_holds: value <= b.upper + slack,
                pi_half_holds: value <= pi_half * (1.0 + 1e-12),
            });
        }
    }
    Ok(rows)
}

/// `I_m(1) = ½·B(m/2, ½)`.
pub fn full_cap_integral(m: f64) -> Result<f64> {
    check_order(m)?;
    Ok((-LN_2 + crate::special::ln_beta(0.5 * m, 0.5)).exp())
}

#[cfg(test)]
mod tests {
    #![allow(clippy::approx_constant)] // literals are tabulated values, not constants
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(0) - 2.0).abs() < 1e-14);
        assert!(rel(sphere_volume(1), 6.2831853072) < 1e-10);
        assert!(rel(sphere_volume(2), 12.5663706144) < 1e-10);
    }

    #[test]
    fn closed_forms() {
        assert!(rel(cap_integral(1.0, 0.5).unwrap(), PI / 6.0) < 1e-13);
        assert!(rel(cap_integral(2.0, 0.6).unwrap(), 0.2) < 1e-13);
        assert!(rel(cap_integral(4.0, 1.0).unwrap(), 2.0 / 3.0) < 1e-13);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(cap_integral(0.0, 0.5).is_err());
        assert!(cap_integral(-1.0, 0.5).is_err());
        assert!(cap_integral(2.0, 0.0).is_err());
        assert!(cap_integral(2.0, 1.5).is_err());
        assert!(uniform_cap_fraction(2, 0.5, 0.6).is_err());
    }

    #[test]
    fn bounds_examples() {
        let b = cap_integral_bounds(2.0, 0.6).unwrap();
        assert!((b.lower - 0.18).abs() < 1e-15);
        assert!((b.upper - 0.225).abs() < 1e-15);
        assert_eq!(b.branch, UpperBranch::Secant);
        let b = cap_integral_bounds(1.0, 1.0).unwrap();
        assert_eq!(b.lower, 1.0);
        assert!((b.upper - (PI / 2.0).sqrt()).abs() < 1e-15);
        assert_eq!(b.branch, UpperBranch::PiHalf);
        // the printed upper bound does not bracket arcsin(1) = π/2
        assert!(cap_integral(1.0, 1.0).unwrap() > b.upper);
        let b = cap_integral_bounds(3.0, 1e-4).unwrap();
        assert!((b.upper / b.lower - 1.0).abs() < 1e-7);
    }

    #[test]
    fn cap_measure_examples() {
        assert!(rel(cap_measure(2, 0.6).unwrap(), 2.0 * PI * 0.2) < 1e-12);
        for n in 1..=10 {
            assert!(rel(cap_measure(n, 1.0).unwrap(), sphere_volume(n) / 2.0) < 1e-12);
        }
        assert!(cap_measure(3, 1e-5).unwrap() < 1e-14);
    }

    #[test]
    fn fraction_examples() {
        assert_eq!(uniform_cap_fraction(3, 0.7, 0.7).unwrap(), 1.0);
        assert_eq!(uniform_cap_fraction(3, 0.7, 0.0).unwrap(), 0.0);
        assert!((uniform_cap_fraction(2, 1.0, 0.6).unwrap() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn wallis_small_orders() {
        assert!(rel(cap_integral_wallis(1, 0.5).unwrap(), PI / 6.0) < 1e-14);
        assert!(rel(cap_integral_wallis(2, 0.6).unwrap(), 0.2) < 1e-14);
        assert!(rel(cap_integral_wallis(4, 1.0).unwrap(), 2.0 / 3.0) < 1e-14);
        assert!(rel(cap_integral_wallis(3, 0.1).unwrap(), cap_integral(3.0, 0.1).unwrap()) < 1e-12);
    }

    #[test]
    fn quadrature_handles_fractional_orders() {
        for &m in &[0.3, 0.5, 1.5, 2.5, 7.25] {
            for &s in &[0.05, 0.5, 0.99, 1.0] {
                let a = cap_integral(m, s).unwrap();
                let b = cap_integral_quadrature(m, s).unwrap();
                assert!(rel(a, b) < 1e-10, "m={m} s={s}: {a} vs {b}");
            }
        }
    }
}
