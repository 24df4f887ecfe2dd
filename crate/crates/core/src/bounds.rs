//! Evaluators and checkers for the smoothed-analysis bounds.
//!
//! Uniform cap law `ν_{a,σ}`: for `t ≥ t₀ = (2d+1)n/σ`,
//! `Prob{C ≥ t} ≤ 13dn/(σt)`, and `E[ln C] ≤ 2 ln n + 2 ln d + 2 ln(1/σ) + 5`.
//!
//! Adversarial law `μ` with pole order `β` and profile sup `H`: the smoothness
//! parameter is `α = 1 - β/n`; sets with `ν_{a,σ}(B) ≤ δ_ε` satisfy
//! `μ(B) ≤ ν_{a,σ}(B)^{α-ε}`, which boosts the uniform tail to
//! `Prob_μ{ln C > t} ≤ (13dn/σ · e^{-t})^{α/2}` for `t ≥ t_ε`, and yields the
//! expectation bound in [`adversarial_expectation_bound`].
//!
//! All evaluators reject arguments outside their hypotheses instead of clamping.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use num_traits::Float;

use crate::distributions::AdversarialLaw;
use crate::error::{domain, Result};
use crate::volumes::{ln_cap_integral_unchecked, ln_uniform_cap_fraction};

fn check_nd_sigma(n: u32, d: u32, sigma: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("n", 0.0, "integer ≥ 1"));
    }
    if d == 0 {
        return Err(domain("d", 0.0, "integer ≥ 1"));
    }
    check_sigma(sigma)
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma <= 1.0 {
        Ok(())
    } else {
        Err(domain("sigma", sigma, "(0, 1]"))
    }
}

fn check_beta(n: u32, beta: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("n", 0.0, "integer ≥ 1"));
    }
    if beta >= 0.0 && beta < f64::from(n) {
        Ok(())
    } else {
        Err(domain("beta", beta, "[0, n)"))
    }
}

fn check_h(h_sup: f64) -> Result<()> {
    if h_sup >= 1.0 && h_sup.is_finite() {
        Ok(())
    } else {
        Err(domain("H", h_sup, "[1, ∞)"))
    }
}

/// Threshold of the uniform tail bound on `C`: `t₀ = (2d+1)·n/σ`.
pub fn t0(n: u32, d: u32, sigma: f64) -> Result<f64> {
    check_nd_sigma(n, d, sigma)?;
    Ok((2.0 * f64::from(d) + 1.0) * f64::from(n) / sigma)
}

/// Threshold of the same bound restated for `ln C`: `ln((1+2d)·n/σ)`.
pub fn t0_log(n: u32, d: u32, sigma: f64) -> Result<f64> {
    Ok(t0(n, d, sigma)?.ln())
}

/// `13dn/(σt)` for `t ≥ t₀`.
pub fn uniform_tail_bound(n: u32, d: u32, sigma: f64, t: f64) -> Result<f64> {
    let start = t0(n, d, sigma)?;
    if !(t >= start) {
        return Err(domain("t", t, "[t0, ∞)"));
    }
    Ok(13.0 * f64::from(d) * f64::from(n) / (sigma * t))
}

/// `13dn/σ · e^{-t}`, the tail of `ln C` under `ν_{a,σ}`, for `t ≥ ln t₀`.
pub fn uniform_log_tail_bound(n: u32, d: u32, sigma: f64, t: f64) -> Result<f64> {
    let start = t0_log(n, d, sigma)?;
    if !(t >= start) {
        return Err(domain("t", t, "[ln t0, ∞)"));
    }
    Ok(((13.0 * f64::from(d) * f64::from(n) / sigma).ln() - t).exp())
}

/// `2 ln n + 2 ln d + 2 ln(1/σ) + 5`.
pub fn uniform_expectation_bound(n: u32, d: u32, sigma: f64) -> Result<f64> {
    check_nd_sigma(n, d, sigma)?;
    Ok(2.0 * f64::from(n).ln() + 2.0 * f64::from(d).ln() - 2.0 * sigma.ln() + 5.0)
}

/// `α = 1 - β/n`.
pub fn smoothness_alpha(n: u32, beta: f64) -> Result<f64> {
    check_beta(n, beta)?;
    Ok(1.0 - beta / f64::from(n))
}

/// `ln μ(B_P(a,ρ)) / ln ν_{a,σ}(B_P(a,ρ))`, which tends to `α` as `ρ → 0`.
pub fn smoothness_ratio(law: &AdversarialLaw, rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < law.sigma()) {
        return Err(domain("rho", rho, "(0, sigma)"));
    }
    let ln_mu = law.ln_radial_cdf(rho)?;
    let ln_nu = ln_uniform_cap_fraction(law.n(), law.sigma(), rho)?;
    if !(ln_mu < 0.0 && ln_nu < 0.0) {
        return Err(domain("rho", rho, "small enough that both ball measures are below 1"));
    }
    Ok(ln_mu / ln_nu)
}

/// `ρ_ε = σ·((1/H)·sqrt(1 - (2/πn)^k))^{1/(εn)} · (sqrt(2/πn))^k` with
/// `k = (1 - β/n - ε)/(εn)`.
pub fn rho_eps(n: u32, beta: f64, sigma: f64, h_sup: f64, eps: f64) -> Result<f64> {
    check_beta(n, beta)?;
    check_sigma(sigma)?;
    check_h(h_sup)?;
    let nf = f64::from(n);
    let alpha = 1.0 - beta / nf;
    if !(eps > 0.0 && eps < alpha) {
        return Err(domain("eps", eps, "(0, 1 - beta/n)"));
    }
    let k = (alpha - eps) / (nf * eps);
    let q = 2.0 / (PI * nf);
    // ln of each factor, so that tiny radii do not underflow prematurely
    let inner = -h_sup.ln() + 0.5 * (-(k * q.ln()).exp_m1()).ln();
    let ln_rho = sigma.ln() + inner / (eps * nf) + k * 0.5 * q.ln();
    Ok(ln_rho.exp())
}

/// `ρ_ε`, `δ_ε = I_n(ρ_ε)/I_n(σ)` and `t_ε = ln(13dn/(σ δ_ε))` for one
/// parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostParams {
    pub n: u32,
    pub d: u32,
    pub beta: f64,
    pub sigma: f64,
    pub h_sup: f64,
    pub eps: f64,
    pub rho_eps: f64,
    pub delta_eps: f64,
    pub t_eps: f64,
}

impl BoostParams {
    pub fn new(n: u32, d: u32, beta: f64, sigma: f64, h_sup: f64, eps: f64) -> Result<Self> {
        check_nd_sigma(n, d, sigma)?;
        let rho = rho_eps(n, beta, sigma, h_sup, eps)?;
        let delta = delta_eps(n, sigma, rho)?;
        let t = t_eps(n, d, sigma, delta)?;
        Ok(Self {
            n,
            d,
            beta,
            sigma,
            h_sup,
            eps,
            rho_eps: rho,
            delta_eps: delta,
            t_eps: t,
        })
    }

    /// Parameters at `ε* = ½(1 - β/n)`, the choice behind the expectation bound.
    pub fn at_half_alpha(n: u32, d: u32, beta: f64, sigma: f64, h_sup: f64) -> Result<Self> {
        let alpha = smoothness_alpha(n, beta)?;
        Self::new(n, d, beta, sigma, h_sup, 0.5 * alpha)
    }

    /// Exponent `α - ε` of the boosted bounds.
    pub fn boost_exponent(&self) -> f64 {
        1.0 - self.beta / f64::from(self.n) - self.eps
    }
}

/// `δ_ε = I_n(ρ_ε) / I_n(σ)`.
pub fn delta_eps(n: u32, sigma: f64, rho_eps: f64) -> Result<f64> {
    if !(rho_eps > 0.0) {
        return Err(domain("rho_eps", rho_eps, "(0, sigma]"));
    }
    ln_uniform_cap_fraction(n, sigma, rho_eps).map(f64::exp)
}

/// `t_ε = ln(13dn / (σ δ_ε))`.
pub fn t_eps(n: u32, d: u32, sigma: f64, delta_eps: f64) -> Result<f64> {
    check_nd_sigma(n, d, sigma)?;
    if !(delta_eps > 0.0 && delta_eps <= 1.0) {
        return Err(domain("delta_eps", delta_eps, "(0, 1]"));
    }
    Ok((13.0 * f64::from(d) * f64::from(n) / sigma).ln() - delta_eps.ln())
}

/// `(13dn/σ · e^{-t})^{α-ε}` for `t ≥ t_ε`.
pub fn boosted_tail_bound_with(params: &BoostParams, t: f64) -> Result<f64> {
    if !(t >= params.t_eps) {
        return Err(domain("t", t, "[t_eps, ∞)"));
    }
    let ln_base = (13.0 * f64::from(params.d) * f64::from(params.n) / params.sigma).ln() - t;
    Ok((params.boost_exponent() * ln_base).exp())
}

/// `(13dn/σ · e^{-t})^{½(1-β/n)}` for `t ≥ t_ε` at `ε* = ½(1 - β/n)`.
pub fn boosted_tail_bound(n: u32, d: u32, sigma: f64, beta: f64, h_sup: f64, t: f64) -> Result<f64> {
    boosted_tail_bound_with(&BoostParams::at_half_alpha(n, d, beta, sigma, h_sup)?, t)
}

fn check_expectation_args(n: u32, d: u32, sigma: f64, beta: f64, h_sup: f64) -> Result<()> {
    check_nd_sigma(n, d, sigma)?;
    check_beta(n, beta)?;
    check_h(h_sup)
}

/// Expectation bound for the adversarial law:
/// `2 ln n + ln d + ln(1/σ) + ln(13π/2) + (1/(1-β/n))·ln(2eH²n / ln(πn/2))`.
pub fn adversarial_expectation_bound(n: u32, d: u32, sigma: f64, beta: f64, h_sup: f64) -> Result<f64> {
    check_expectation_args(n, d, sigma, beta, h_sup)?;
    let nf = f64::from(n);
    let alpha = 1.0 - beta / nf;
    let common = 2.0 * nf.ln() + f64::from(d).ln() - sigma.ln() + (13.0 * PI / 2.0).ln();
    Ok(common + (2.0 * E * h_sup * h_sup * nf / (PI * nf / 2.0).ln()).ln() / alpha)
}

/// The same bound before the final simplification:
/// `… + (2/(1-β/n))·(ln(H/s) + s/H)` with `s = sqrt(1 - (2/πn)^{1/n})`.
pub fn adversarial_expectation_bound_chain(n: u32, d: u32, sigma: f64, beta: f64, h_sup: f64) -> Result<f64> {
    check_expectation_args(n, d, sigma, beta, h_sup)?;
    let nf = f64::from(n);
    let alpha = 1.0 - beta / nf;
    let s = small_calc_root(n);
    let common = 2.0 * nf.ln() + f64::from(d).ln() - sigma.ln() + (13.0 * PI / 2.0).ln();
    Ok(common + 2.0 / alpha * ((h_sup / s).ln() + s / h_sup))
}

/// Both forms of the adversarial expectation bound side by side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationBoundComparison {
    pub stated: f64,
    pub chain: f64,
    /// `stated < chain`: the simplified form undercuts the chain it came from.
    pub stated_below_chain: bool,
}

pub fn compare_expectation_bounds(n: u32, d: u32, sigma: f64, beta: f64, h_sup: f64) -> Result<ExpectationBoundComparison> {
    let stated = adversarial_expectation_bound(n, d, sigma, beta, h_sup)?;
    let chain = adversarial_expectation_bound_chain(n, d, sigma, beta, h_sup)?;
    Ok(ExpectationBoundComparison {
        stated,
        chain,
        stated_below_chain: stated < chain,
    })
}

/// One evaluation of the boosting inequality
/// `H·I_{n-β}(ρ)/I_{n-β}(σ) ≤ (I_n(ρ)/I_n(σ))^{1-β/n-ε}`, in logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostingRow {
    pub rho: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub holds: bool,
}

pub fn boosting_row(n: u32, beta: f64, sigma: f64, h_sup: f64, eps: f64, rho: f64) -> Result<BoostingRow> {
    let limit = rho_eps(n, beta, sigma, h_sup, eps)?;
    if !(rho > 0.0 && rho <= limit * (1.0 + 1e-12)) {
        return Err(domain("rho", rho, "(0, rho_eps]"));
    }
    let rho = rho.min(limit);
    let nf = f64::from(n);
    let m = nf - beta;
    let ln_lhs = h_sup.ln() + ln_cap_integral_unchecked(m, rho) - ln_cap_integral_unchecked(m, sigma);
    let ln_rhs = (1.0 - beta / nf - eps) * (ln_cap_integral_unchecked(nf, rho) - ln_cap_integral_unchecked(nf, sigma));
    // relative slack 1e-12 on the linear scale
    let holds = ln_lhs <= ln_rhs + 1e-12;
    Ok(BoostingRow {
        rho,
        ln_lhs,
        ln_rhs,
        holds,
    })
}

/// True iff the boosting inequality holds at `ρ ≤ ρ_ε` with relative slack `1e-12`.
pub fn boosting_check(n: u32, beta: f64, sigma: f64, h_sup: f64, eps: f64, rho: f64) -> Result<bool> {
    Ok(boosting_row(n, beta, sigma, h_sup, eps, rho)?.holds)
}

/// `s = sqrt(1 - (2/πn)^{1/n})`, formed with `expm1` to stay accurate for large `n`.
fn small_calc_root(n: u32) -> f64 {
    let nf = f64::from(n);
    (-((2.0 / (PI * nf)).ln() / nf).exp_m1()).sqrt()
}

/// `(1 - (2/πn)^{1/n})^{-1/2} ≤ sqrt(2n / ln(πn/2))` at one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallCalcRow {
    pub n: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn small_calc_row(n: u32) -> Result<SmallCalcRow> {
    if n == 0 {
        return Err(domain("n", 0.0, "integer ≥ 1"));
    }
    let nf = f64::from(n);
    let lhs = 1.0 / small_calc_root(n);
    let rhs = (2.0 * nf / (PI * nf / 2.0).ln()).sqrt();
    Ok(SmallCalcRow {
        n,
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

pub fn small_calc_check(n: u32) -> Result<bool> {
    Ok(small_calc_row(n)?.holds)
}

/// Comparison of a radial set `S` (union of shells) against the centered ball
/// of equal uniform measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallComparison {
    pub nu_set: f64,
    pub mu_set: f64,
    pub ball_radius: f64,
    pub mu_ball: f64,
    pub holds: bool,
}

/// For `S = ∪ [a_i, b_i)` (disjoint shells inside `[0, σ]`), finds `ρ` with
/// `ν_{a,σ}(B_P(a,ρ)) = ν_{a,σ}(S)` and checks `μ(S) ≤ μ(B_P(a,ρ)) + 1e-12`.
pub fn ball_maximizer_comparison(law: &AdversarialLaw, shells: &[(f64, f64)]) -> Result<BallComparison> {
    let sigma = law.sigma();
    let mut sorted: Vec<(f64, f64)> = shells.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        if w[1].0 < w[0].1 {
            return Err(domain("shell", w[1].0, "disjoint shells"));
        }
    }
    for &(a, b) in &sorted {
        if !(0.0 <= a && a <= b && b <= sigma) {
            return Err(domain("shell", b, "[0, sigma]"));
        }
    }
    let uniform = AdversarialLaw::uniform(law.cap().clone())?;
    let mut nu_set = 0.0;
    let mut mu_set = 0.0;
    for &(a, b) in &sorted {
        nu_set += uniform.radial_cdf(b)? - uniform.radial_cdf(a)?;
        mu_set += law.radial_cdf(b)? - law.radial_cdf(a)?;
    }
    let nu_set = nu_set.clamp(0.0, 1.0);
    let ball_radius = uniform.inverse_radial_cdf(nu_set)?;
    let mu_ball = law.radial_cdf(ball_radius)?;
    Ok(BallComparison {
        nu_set,
        mu_set,
        ball_radius,
        mu_ball,
        holds: mu_set <= mu_ball + 1e-12,
    })
}

pub fn ball_maximizer_check(law: &AdversarialLaw, shells: &[(f64, f64)]) -> Result<bool> {
    Ok(ball_maximizer_comparison(law, shells)?.holds)
}

/// Default sweep grid for the deterministic checkers.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckGrid {
    pub ns: Vec<u32>,
    /// β as a fraction of n
    pub beta_fractions: Vec<f64>,
    pub h_sups: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// ε as a fraction of 1 - β/n
    pub eps_fractions: Vec<f64>,
}

impl Default for CheckGrid {
    fn default() -> Self {
        Self {
            ns: alloc::vec![2, 3, 4, 8, 16, 32],
            beta_fractions: alloc::vec![0.0, 0.25, 0.5, 0.75],
            h_sups: alloc::vec![1.0, 2.0, 10.0],
            sigmas: alloc::vec![0.1, 0.5, 1.0],
            eps_fractions: alloc::vec![0.25, 0.5, 0.75],
        }
    }
}

/// A point of the check grid with concrete `β` and `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub n: u32,
    pub beta: f64,
    pub h_sup: f64,
    pub sigma: f64,
    pub eps: f64,
}

impl CheckGrid {
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &n in &self.ns {
            for &bf in &self.beta_fractions {
                let beta = bf * f64::from(n);
                let alpha = 1.0 - bf;
                for &h_sup in &self.h_sups {
                    for &sigma in &self.sigmas {
                        for &ef in &self.eps_fractions {
                            out.push(GridPoint {
                                n,
                                beta,
                                h_sup,
                                sigma,
                                eps: ef * alpha,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// The two-sided estimate of `δ_{ε*}` at `ε* = ½(1 - β/n)`:
/// `(2/πn)·Y ≤ δ_{ε*} ≤ Y` with `Y = ((1/H)·sqrt(1 - (2/πn)^{1/n}))^{2/(1-β/n)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSandwich {
    pub lower: f64,
    pub delta: f64,
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn delta_sandwich(n: u32, beta: f64, sigma: f64, h_sup: f64) -> Result<DeltaSandwich> {
    let p = BoostParams::at_half_alpha(n, 1, beta, sigma, h_sup)?;
    let nf = f64::from(n);
    let alpha = 1.0 - beta / nf;
    let ln_y = 2.0 / alpha * (small_calc_root(n).ln() - h_sup.ln());
    let upper = ln_y.exp();
    let lower = (ln_y + (2.0 / (PI * nf)).ln()).exp();
    Ok(DeltaSandwich {
        lower,
        delta: p.delta_eps,
        upper,
        lower_holds: lower <= p.delta_eps * (1.0 + 1e-12),
        upper_holds: p.delta_eps <= upper * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Cap;
    use crate::geometry::ProjPoint;

    #[test]
    fn t0_examples() {
        assert_eq!(t0(3, 1, 0.5).unwrap(), 18.0);
        assert_eq!(t0(1, 1, 1.0).unwrap(), 3.0);
        assert!(t0(3, 0, 0.5).is_err());
    }

    #[test]
    fn uniform_tail_examples() {
        assert!((uniform_tail_bound(3, 1, 0.5, 100.0).unwrap() - 0.78).abs() < 1e-15);
        // vacuous at t0: 13·3/(0.5·18) = 13/3
        assert!((uniform_tail_bound(3, 1, 0.5, 18.0).unwrap() - 13.0 / 3.0).abs() < 1e-15);
        assert!(uniform_tail_bound(3, 1, 0.5, 17.9).is_err());
        assert!(uniform_tail_bound(3, 1, 0.5, 1e300).unwrap() < 1e-297);
    }

    #[test]
    fn uniform_expectation_examples() {
        assert_eq!(uniform_expectation_bound(1, 1, 1.0).unwrap(), 5.0);
        let v = uniform_expectation_bound(3, 1, 0.5).unwrap();
        assert!((v - (2.0 * 3f64.ln() + 2.0 * 2f64.ln() + 5.0)).abs() < 1e-14);
        assert!((v - 8.5835).abs() < 1e-4);
        let w = uniform_expectation_bound(3, 1, 1.0).unwrap();
        assert!((v - w - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(smoothness_alpha(5, 0.0).unwrap(), 1.0);
        assert_eq!(smoothness_alpha(4, 2.0).unwrap(), 0.5);
        assert!(smoothness_alpha(4, 4.0 - 1e-9).unwrap() < 1e-9);
        assert!(smoothness_alpha(4, 4.0).is_err());
    }

    #[test]
    fn rho_eps_examples() {
        let r1 = rho_eps(4, 0.0, 1.0, 1.0, 0.5).unwrap();
        assert!((r1 - 0.6192).abs() < 5e-5, "{r1}");
        let r_half = rho_eps(4, 0.0, 0.5, 1.0, 0.5).unwrap();
        assert!((r_half - 0.5 * r1).abs() < 1e-15);
        assert!(rho_eps(4, 0.0, 1.0, 1e100, 0.5).unwrap() < 1e-20);
        assert!(rho_eps(4, 2.0, 1.0, 1.0, 0.5).is_err());
        assert!(rho_eps(4, 2.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn t_eps_examples() {
        assert!((t_eps(3, 1, 0.5, 0.01).unwrap() - 7800f64.ln()).abs() < 1e-12);
        assert!((t_eps(3, 1, 0.5, 0.01).unwrap() - 8.9619).abs() < 1e-4);
        let small = 13.0 * (-3.0f64).exp();
        assert!((t_eps(1, 1, 1.0, small).unwrap() - 3.0).abs() < 1e-12);
        assert!(t_eps(3, 1, 0.5, 1.5).is_err());
        let a = t_eps(3, 1, 0.5, 0.01).unwrap();
        let b = t_eps(3, 4, 0.5, 0.01).unwrap();
        assert!((b - a - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn boosted_tail_examples() {
        let v = boosted_tail_bound(3, 1, 0.5, 1.5, 1.0, 12.0).unwrap();
        assert!((v - (78.0 * (-12.0f64).exp()).powf(0.25)).abs() < 1e-15);
        let u = boosted_tail_bound(3, 1, 0.5, 0.0, 1.0, 12.0).unwrap();
        assert!((u - (78.0 * (-12.0f64).exp()).sqrt()).abs() < 1e-15);
        assert_eq!(boosted_tail_bound(3, 1, 0.5, 1.5, 1.0, 1e4).unwrap(), 0.0);
        let p = BoostParams::at_half_alpha(3, 1, 1.5, 0.5, 1.0).unwrap();
        assert!(boosted_tail_bound(3, 1, 0.5, 1.5, 1.0, p.t_eps - 1e-9).is_err());
    }

    #[test]
    fn adversarial_expectation_examples() {
        let v = adversarial_expectation_bound(4, 2, 1.0, 0.0, 1.0).unwrap();
        let by_terms = 2.0 * 4f64.ln()
            + 2f64.ln()
            + (13.0 * PI / 2.0).ln()
            + (2.0 * E * 4.0 / (2.0 * PI).ln()).ln();
        assert!((v - by_terms).abs() < 1e-13);
        assert!((v - 8.953).abs() < 1e-3);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..40 {
            let b = adversarial_expectation_bound(4, 2, 1.0, 0.1 * i as f64, 1.0).unwrap();
            assert!(b >= prev);
            prev = b;
        }
        assert!(adversarial_expectation_bound(4, 2, 1.0, 1.0, 3.0).unwrap() > adversarial_expectation_bound(4, 2, 1.0, 1.0, 2.0).unwrap());
        assert!(adversarial_expectation_bound(4, 2, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn boosting_examples() {
        for &rho in &[1e-3, 0.1, 0.3] {
            let limit = rho_eps(5, 0.0, 1.0, 1.0, 0.2).unwrap();
            if rho <= limit {
                assert!(boosting_check(5, 0.0, 1.0, 1.0, 0.2, rho).unwrap());
            }
        }
        let eps = 0.25 * 0.75;
        let r = rho_eps(4, 1.0, 1.0, 1.0, eps).unwrap();
        assert!(boosting_check(4, 1.0, 1.0, 1.0, eps, r).unwrap());
        assert!(boosting_check(4, 1.0, 1.0, 1.0, eps, 1.01 * r).is_err());
    }

    #[test]
    fn small_calc_examples() {
        let row = small_calc_row(1).unwrap();
        assert!(row.lhs.is_finite() && row.rhs.is_finite());
        assert!(small_calc_check(100).unwrap());
    }

    #[test]
    fn smoothness_ratio_examples() {
        let cap = Cap::new(ProjPoint::basis(4, 0), 1.0).unwrap();
        let uni = AdversarialLaw::uniform(cap.clone()).unwrap();
        for &rho in &[1e-2, 1e-4, 1e-6] {
            assert!((smoothness_ratio(&uni, rho).unwrap() - 1.0).abs() < 1e-12);
        }
        let adv = AdversarialLaw::with_constant_profile(cap, 2.0).unwrap();
        let ratios: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&r| smoothness_ratio(&adv, r).unwrap()).collect();
        assert!((ratios[2] - 0.5).abs() < 0.02);
        assert!((ratios[0] - 0.5).abs() > (ratios[1] - 0.5).abs());
        assert!((ratios[1] - 0.5).abs() > (ratios[2] - 0.5).abs());
        assert!(smoothness_ratio(&adv, 1.0).is_err());
    }

    #[test]
    fn ball_maximizer_examples() {
        let cap = Cap::new(ProjPoint::basis(4, 0), 1.0).unwrap();
        let adv = AdversarialLaw::with_constant_profile(cap.clone(), 2.0).unwrap();
        let ball = ball_maximizer_comparison(&adv, &[(0.0, 0.4)]).unwrap();
        assert!((ball.mu_set - ball.mu_ball).abs() < 1e-12);
        let uni = AdversarialLaw::uniform(cap).unwrap();
        let eq = ball_maximizer_comparison(&uni, &[(0.2, 0.3), (0.5, 0.9)]).unwrap();
        assert!((eq.mu_set - eq.mu_ball).abs() < 1e-12);
        let outer = ball_maximizer_comparison(&adv, &[(0.7, 1.0)]).unwrap();
        assert!(outer.holds && outer.mu_set < outer.mu_ball - 1e-3);
        assert!(ball_maximizer_comparison(&adv, &[(0.1, 0.5), (0.4, 0.6)]).is_err());
    }

    #[test]
    fn grid_size() {
        assert_eq!(CheckGrid::default().points().len(), 6 * 4 * 3 * 3 * 3);
    }
}
