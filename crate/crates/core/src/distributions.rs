//! Radially symmetric laws on a projective cap `B_P(a, σ)`.
//!
//! The adversarial law `μ` has density `f(x) = g(d_P(x, a))` with respect to
//! the uniform cap law `ν_{a,σ}`, where `g(r) = C_{β,σ}·r^{-β}·h(r)` and
//! `C_{β,σ} = I_n(σ) / I_{n-β}(σ)`. The profile `h` is normalized so that
//! `∫_0^σ h(r) r^{n-β-1} (1-r²)^{-1/2} dr = I_{n-β}(σ)`. With `β = 0` and
//! `h ≡ 1` the law is `ν_{a,σ}` itself.
//!
//! The radial coordinate `r = d_P(x, a)` of `μ` has CDF
//! `μ(B_P(a, ρ)) = ∫_0^ρ h(r) r^{n-β-1} (1-r²)^{-1/2} dr / I_{n-β}(σ)`,
//! and sampling composes an inverse-CDF draw of `r` with a uniform tangent
//! direction.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::geometry::{geodesic_point, proj_distance, tangent_direction, ProjPoint};
use crate::volumes::{ln_cap_integral_unchecked, ln_radial_integral_from_zero, radial_integral_between};

/// Number of nodes used when a profile is given as a function.
pub const PROFILE_GRID: usize = 1024;
/// Number of points on which monotonicity of `g` is validated.
pub const MONOTONICITY_GRID: usize = 4096;

const CDF_TOL: f64 = 1e-14;
const INVERSE_REL_TOL: f64 = 1e-15;
const INVERSE_MAX_ITER: usize = 400;

/// The projective ball `B_P(center, σ)` in `P^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cap {
    center: ProjPoint,
    sigma: f64,
}

impl Cap {
    pub fn new(center: ProjPoint, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma <= 1.0) {
            return Err(domain("sigma", sigma, "(0, 1]"));
        }
        if center.dim() == 0 {
            return Err(domain("n", 0.0, "integer ≥ 1"));
        }
        Ok(Self { center, sigma })
    }

    pub fn center(&self) -> &ProjPoint {
        &self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Projective dimension `n`.
    pub fn n(&self) -> u32 {
        self.center.dim() as u32
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Table {
    r: Vec<f64>,
    /// normalized h at the nodes
    h: Vec<f64>,
    /// cum[k] = ∫_0^{r_k} h(r) r^{m-1} (1-r²)^{-1/2} dr
    cum: Vec<f64>,
}

impl Table {
    fn segment(&self, r: f64) -> usize {
        // last k with r_k <= r, capped to the final segment
        let k = self.r.partition_point(|&x| x <= r);
        k.saturating_sub(1).min(self.r.len() - 2)
    }

    fn eval(&self, r: f64) -> f64 {
        let k = self.segment(r);
        lerp(self.r[k], self.h[k], self.r[k + 1], self.h[k + 1], r)
    }

    fn sup(&self) -> f64 {
        self.h.iter().fold(0.0_f64, |m, &v| m.max(v))
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// ∫_{r_k}^{rho} h(r) r^{m-1} (1-r²)^{-1/2} dr within segment k.
    fn partial(&self, k: usize, m: f64, rho: f64) -> Result<f64> {
        let (r0, h0, r1, h1) = (self.r[k], self.h[k], self.r[k + 1], self.h[k + 1]);
        let w = |r: f64| lerp(r0, h0, r1, h1, r);
        if rho <= r0 {
            Ok(0.0)
        } else if r0 == 0.0 {
            Ok(ln_radial_integral_from_zero(w, m, rho)?.exp())
        } else {
            radial_integral_between(w, m, r0, rho)
        }
    }
}

fn lerp(r0: f64, h0: f64, r1: f64, h1: f64, r: f64) -> f64 {
    let t = ((r - r0) / (r1 - r0)).clamp(0.0, 1.0);
    h0 + (h1 - h0) * t
}

#[derive(Debug, Clone, PartialEq)]
enum ProfileKind {
    ConstantOne,
    Tabulated(Table),
}

/// The radial modulation `h` of an adversarial law, normalized for a fixed
/// `(n, β, σ)`.
///
/// Tabulated profiles are piecewise linear between their nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    kind: ProfileKind,
    n: u32,
    beta: f64,
    sigma: f64,
    sup: f64,
    normalization_residual: f64,
}

fn check_law_params(n: u32, beta: f64, sigma: f64) -> Result<()> {
    if n == 0 {
        return Err(domain("n", 0.0, "integer ≥ 1"));
    }
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(domain("sigma", sigma, "(0, 1]"));
    }
    if !(beta >= 0.0 && beta < f64::from(n)) {
        return Err(domain("beta", beta, "[0, n)"));
    }
    Ok(())
}

impl RadialProfile {
    /// `h ≡ 1`, for which `H = 1` and the normalization is exact.
    pub fn constant_one(n: u32, beta: f64, sigma: f64) -> Result<Self> {
        check_law_params(n, beta, sigma)?;
        Ok(Self {
            kind: ProfileKind::ConstantOne,
            n,
            beta,
            sigma,
            sup: 1.0,
            normalization_residual: 0.0,
        })
    }

    /// Tabulates `raw_h` on [`PROFILE_GRID`] equally spaced nodes of `[0, σ]`
    /// and normalizes the interpolant.
    pub fn from_fn<F: Fn(f64) -> f64>(raw_h: F, n: u32, beta: f64, sigma: f64) -> Result<Self> {
        check_law_params(n, beta, sigma)?;
        let k = PROFILE_GRID - 1;
        let points: Vec<(f64, f64)> = (0..=k)
            .map(|i| {
                let r = if i == k { sigma } else { sigma * i as f64 / k as f64 };
                (r, raw_h(r))
            })
            .collect();
        Self::from_table(&points, n, beta, sigma)
    }

    /// Normalizes a piecewise-linear profile given by `(r, h)` nodes.
    ///
    /// Nodes must start at `r = 0`, increase strictly and reach `σ`; nodes past
    /// `σ` are cut off. Constant tables collapse to [`RadialProfile::constant_one`].
    pub fn from_table(points: &[(f64, f64)], n: u32, beta: f64, sigma: f64) -> Result<Self> {
        check_law_params(n, beta, sigma)?;
        if points.len() < 2 {
            return Err(Error::Profile("need at least two nodes".into()));
        }
        if points.iter().any(|(r, h)| !r.is_finite() || !h.is_finite()) {
            return Err(Error::NonFinite);
        }
        if points[0].0 != 0.0 {
            return Err(Error::Profile(format!("first node at r = {}, expected 0", points[0].0)));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Profile("node radii must increase strictly".into()));
        }
        if points.iter().any(|&(_, h)| h < 0.0) {
            return Err(Error::Profile("h must be nonnegative".into()));
        }
        if !(points[0].1 > 0.0) {
            return Err(Error::Profile("h(0) must be positive".into()));
        }
        let last = points[points.len() - 1].0;
        if last < sigma * (1.0 - 1e-12) {
            return Err(Error::Profile(format!("nodes end at r = {last}, before sigma = {sigma}")));
        }

        let mut r: Vec<f64> = Vec::with_capacity(points.len());
        let mut h: Vec<f64> = Vec::with_capacity(points.len());
        for w in points.windows(2) {
            let (r0, h0) = w[0];
            let (r1, h1) = w[1];
            if r0 >= sigma {
                break;
            }
            r.push(r0);
            h.push(h0);
            if r1 >= sigma {
                r.push(sigma);
                h.push(lerp(r0, h0, r1, h1, sigma));
            }
        }
        if *r.last().unwrap() < sigma {
            // table ends within 1e-12 below sigma
            r.push(sigma);
            h.push(points[points.len() - 1].1);
        }

        if h.iter().all(|&v| v == h[0]) {
            return Self::constant_one(n, beta, sigma);
        }

        let m = f64::from(n) - beta;
        let mut table = Table {
            cum: alloc::vec![0.0; r.len()],
            r,
            h,
        };
        for k in 0..table.r.len() - 1 {
            let seg = table.partial(k, m, table.r[k + 1])?;
            table.cum[k + 1] = table.cum[k] + seg;
        }
        let raw_total = table.total();
        if !(raw_total > 0.0) || !raw_total.is_finite() {
            return Err(Error::Profile(format!("raw normalization integral is {raw_total}")));
        }
        let target = ln_cap_integral_unchecked(m, sigma).exp();
        let scale = target / raw_total;
        table.h.iter_mut().for_each(|v| *v *= scale);
        table.cum.iter_mut().for_each(|v| *v *= scale);
        let normalization_residual = ((table.total() - target) / target).abs();
        let sup = table.sup();

        let profile = Self {
            kind: ProfileKind::Tabulated(table),
            n,
            beta,
            sigma,
            sup,
            normalization_residual,
        };
        profile.validate_monotone()?;
        Ok(profile)
    }

    /// Rejects profiles for which `g(r) ∝ r^{-β} h(r)` increases somewhere on
    /// a [`MONOTONICITY_GRID`]-point grid of `(0, σ]`.
    fn validate_monotone(&self) -> Result<()> {
        let grid = MONOTONICITY_GRID;
        let g = |r: f64| r.powf(-self.beta) * self.eval(r);
        let mut prev = g(self.sigma / grid as f64);
        for j in 2..=grid {
            let r = self.sigma * j as f64 / grid as f64;
            let cur = g(r);
            if cur > prev * (1.0 + 1e-12) {
                return Err(Error::Profile(format!(
                    "g(r) = r^-beta h(r) increases near r = {r} ({prev} -> {cur})"
                )));
            }
            prev = cur;
        }
        Ok(())
    }

    /// Normalized `h(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::ConstantOne => 1.0,
            ProfileKind::Tabulated(t) => t.eval(r),
        }
    }

    /// `H = sup_{[0, σ]} h`.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    /// Relative defect of `∫ h(r) r^{m-1} (1-r²)^{-1/2} dr` against `I_{n-β}(σ)`.
    pub fn normalization_residual(&self) -> f64 {
        self.normalization_residual
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(self.kind, ProfileKind::ConstantOne)
    }

    /// `inf_{[0, ρ]} h` and `sup_{[0, ρ]} h`.
    pub fn range_on(&self, rho: f64) -> (f64, f64) {
        match &self.kind {
            ProfileKind::ConstantOne => (1.0, 1.0),
            ProfileKind::Tabulated(t) => {
                let end = t.eval(rho);
                let inner = t.r.iter().zip(&t.h).take_while(|(r, _)| **r <= rho).map(|(_, h)| *h);
                inner.fold((end, end), |(lo, hi), v| (lo.min(v), hi.max(v)))
            }
        }
    }

    /// Nodes `(r, h(r))` of a tabulated profile; empty for `h ≡ 1`.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            ProfileKind::ConstantOne => Vec::new(),
            ProfileKind::Tabulated(t) => t.r.iter().copied().zip(t.h.iter().copied()).collect(),
        }
    }
}

/// The law `μ` on `B_P(a, σ)` with density `C_{β,σ}·r^{-β}·h(r)` against `ν_{a,σ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialLaw {
    cap: Cap,
    beta: f64,
    profile: RadialProfile,
    c_beta_sigma: f64,
    /// m = n - β
    order: f64,
    ln_i_order_sigma: f64,
}

impl AdversarialLaw {
    pub fn new(cap: Cap, beta: f64, profile: RadialProfile) -> Result<Self> {
        let n = cap.n();
        check_law_params(n, beta, cap.sigma())?;
        if profile.n != n || profile.beta != beta || profile.sigma != cap.sigma() {
            return Err(Error::Profile(format!(
                "profile normalized for (n, beta, sigma) = ({}, {}, {}), law has ({n}, {beta}, {})",
                profile.n,
                profile.beta,
                profile.sigma,
                cap.sigma()
            )));
        }
        let order = f64::from(n) - beta;
        let ln_i_order_sigma = ln_cap_integral_unchecked(order, cap.sigma());
        let c_beta_sigma = (ln_cap_integral_unchecked(f64::from(n), cap.sigma()) - ln_i_order_sigma).exp();
        Ok(Self {
            cap,
            beta,
            profile,
            c_beta_sigma,
            order,
            ln_i_order_sigma,
        })
    }

    /// Pole of order `β` with `h ≡ 1`.
    pub fn with_constant_profile(cap: Cap, beta: f64) -> Result<Self> {
        let profile = RadialProfile::constant_one(cap.n(), beta, cap.sigma())?;
        Self::new(cap, beta, profile)
    }

    /// The uniform cap law `ν_{a,σ}`.
    pub fn uniform(cap: Cap) -> Result<Self> {
        Self::with_constant_profile(cap, 0.0)
    }

    pub fn cap(&self) -> &Cap {
        &self.cap
    }

    pub fn n(&self) -> u32 {
        self.cap.n()
    }

    pub fn sigma(&self) -> f64 {
        self.cap.sigma()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// `H = sup h`.
    pub fn h_sup(&self) -> f64 {
        self.profile.sup()
    }

    /// `C_{β,σ} = I_n(σ) / I_{n-β}(σ)`.
    pub fn c_beta_sigma(&self) -> f64 {
        self.c_beta_sigma
    }

    /// True when the law is `ν_{a,σ}` (`β = 0`, `h ≡ 1`).
    pub fn is_uniform(&self) -> bool {
        self.beta == 0.0 && self.profile.is_constant_one()
    }

    /// `g(r) = C_{β,σ}·r^{-β}·h(r)`; `+∞` at `r = 0` when `β > 0`.
    pub fn radial_density(&self, r: f64) -> f64 {
        let pole = if self.beta == 0.0 { 1.0 } else { r.powf(-self.beta) };
        self.c_beta_sigma * pole * self.profile.eval(r)
    }

    /// Density of `μ` with respect to `ν_{a,σ}` at `x`.
    pub fn density(&self, x: &ProjPoint) -> Result<f64> {
        let r = proj_distance(x, self.cap.center())?;
        if r > self.sigma() * (1.0 + 1e-12) {
            return Err(Error::OutsideCap {
                distance: r,
                sigma: self.sigma(),
            });
        }
        Ok(self.radial_density(r.min(self.sigma())))
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if rho >= 0.0 && rho <= self.sigma() {
            Ok(())
        } else {
            Err(domain("rho", rho, "[0, sigma]"))
        }
    }

    /// `ln μ(B_P(a, ρ))`, finite for every `ρ > 0` even when `ρ^{n-β}` underflows.
    pub fn ln_radial_cdf(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        if rho == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if rho == self.sigma() {
            return Ok(0.0);
        }
        let v = match &self.profile.kind {
            ProfileKind::ConstantOne => ln_cap_integral_unchecked(self.order, rho) - self.ln_i_order_sigma,
            ProfileKind::Tabulated(t) => {
                let k = t.segment(rho);
                if k == 0 {
                    let w = |r: f64| lerp(t.r[0], t.h[0], t.r[1], t.h[1], r);
                    ln_radial_integral_from_zero(w, self.order, rho)? - t.total().ln()
                } else {
                    ((t.cum[k] + t.partial(k, self.order, rho)?) / t.total()).ln()
                }
            }
        };
        Ok(v.min(0.0))
    }

    /// `μ(B_P(a, ρ))` for `ρ ∈ [0, σ]`.
    pub fn radial_cdf(&self, rho: f64) -> Result<f64> {
        Ok(self.ln_radial_cdf(rho)?.exp())
    }

    /// Derivative of [`AdversarialLaw::radial_cdf`] in `ρ`.
    pub fn radial_pdf(&self, rho: f64) -> f64 {
        if rho <= 0.0 || rho > self.sigma() {
            return if rho == 0.0 && self.order < 1.0 { f64::INFINITY } else { 0.0 };
        }
        let ln_total = match &self.profile.kind {
            ProfileKind::ConstantOne => self.ln_i_order_sigma,
            ProfileKind::Tabulated(t) => t.total().ln(),
        };
        let ln_w = (self.order - 1.0) * rho.ln() - 0.5 * ((1.0 - rho) * (1.0 + rho)).ln();
        self.profile.eval(rho) * (ln_w - ln_total).exp()
    }

    /// The radius `r ∈ [0, σ]` with `μ(B_P(a, r)) = p`.
    ///
    /// Newton iteration on the CDF inside a bisection bracket: a Newton step
    /// that leaves the bracket or fails to halve it is replaced by bisection.
    pub fn inverse_radial_cdf(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("p", p, "[0, 1]"));
        }
        let sigma = self.sigma();
        if p == 0.0 {
            return Ok(0.0);
        }
        if p == 1.0 {
            return Ok(sigma);
        }
        let (mut lo, mut hi) = (0.0_f64, sigma);
        // Small-radius approximation μ(B(r)) ≈ h(0) r^m / (m I_m(σ)) as a start.
        let guess = ((p.ln() + self.order.ln() + self.ln_i_order_sigma - self.profile.eval(0.0).ln())
            / self.order)
            .exp();
        let mut r = if guess > 0.0 && guess < sigma { guess } else { 0.5 * sigma };
        let mut step_before_last = hi - lo;
        let mut last_step = step_before_last;
        for _ in 0..INVERSE_MAX_ITER {
            let f = self.radial_cdf(r)? - p;
            if f.abs() <= CDF_TOL {
                return Ok(r);
            }
            if f < 0.0 {
                lo = r;
            } else {
                hi = r;
            }
            if hi - lo <= INVERSE_REL_TOL * hi {
                return Ok(0.5 * (lo + hi));
            }
            let slope = self.radial_pdf(r);
            let newton = r - f / slope;
            let newton_ok = slope.is_finite()
                && slope > 0.0
                && newton > lo
                && newton < hi
                && (f / slope).abs() < 0.5 * step_before_last;
            step_before_last = last_step;
            if newton_ok {
                last_step = (f / slope).abs();
                r = newton;
                if last_step <= INVERSE_REL_TOL * r {
                    return Ok(r);
                }
            } else {
                last_step = 0.5 * (hi - lo);
                r = lo + last_step;
            }
        }
        Err(Error::NotConverged("inverse radial CDF"))
    }

    /// Draws `(z, d_P(z, a))` from the law.
    pub fn sample_with_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> (ProjPoint, f64) {
        let p: f64 = rng.random();
        let r = self
            .inverse_radial_cdf(p)
            .expect("radial CDF inversion on a validated law");
        let u = tangent_direction(self.cap.center(), rng);
        let z = geodesic_point(self.cap.center(), &u, r).expect("unit tangent and r in [0, 1]");
        (z, r)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ProjPoint {
        self.sample_with_radius(rng).0
    }
}

/// One draw from the uniform law on `cap`.
pub fn sample_uniform<R: Rng + ?Sized>(cap: &Cap, rng: &mut R) -> Result<ProjPoint> {
    Ok(AdversarialLaw::uniform(cap.clone())?.sample(rng))
}
