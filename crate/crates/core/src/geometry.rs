//! Points of real projective space `P^n` and the moves used by the samplers.
//!
//! A projective point is stored as one of its two unit representatives on
//! `S^n`. The sign is never canonicalized; every quantity computed from a
//! [`ProjPoint`] is invariant under `x -> -x`.

use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// Unit representative of a point of `P^n`, with `n + 1` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    coords: Vec<f64>,
}

impl ProjPoint {
    /// Scales `v` to unit length.
    pub fn normalize(v: &[f64]) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = norm(v);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            coords: v.iter().map(|x| x / norm).collect(),
        })
    }

    /// Wraps coordinates that are already unit length (within `1e-12`).
    pub fn from_unit(coords: Vec<f64>) -> Result<Self> {
        let norm = norm(&coords);
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(domain("norm", norm, "1 within 1e-12"));
        }
        Ok(Self { coords })
    }

    /// The standard basis point `e_i` of `P^n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut coords = alloc::vec![0.0; n + 1];
        coords[i] = 1.0;
        Self { coords }
    }

    /// Draws a point uniformly from `P^n` (normalized isotropic Gaussian).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        loop {
            let g: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(p) = Self::normalize(&g) {
                return p;
            }
        }
    }

    /// Projective dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// The other unit representative of the same projective point.
    pub fn antipode(&self) -> Self {
        Self {
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    // Scaled accumulation so that large or tiny entries neither overflow nor underflow.
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

/// Norm of the component of `x` orthogonal to the unit vector `y`.
fn orthogonal_residual(x: &[f64], y: &[f64]) -> f64 {
    let c = dot(x, y);
    let s: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = a - c * b;
            r * r
        })
        .sum();
    s.sqrt()
}

/// Projective distance `d_P(x, y) = sin ∠(x, y)`, in `[0, 1]`.
///
/// Evaluated as the orthogonal residual rather than `sqrt(1 - <x,y>^2)`, which
/// loses all accuracy for nearby points. Averaging both residuals makes the
/// result exactly symmetric.
pub fn proj_distance(x: &ProjPoint, y: &ProjPoint) -> Result<f64> {
    if x.coords.len() != y.coords.len() {
        return Err(Error::DimensionMismatch {
            left: x.coords.len(),
            right: y.coords.len(),
        });
    }
    let d = 0.5 * (orthogonal_residual(&x.coords, &y.coords) + orthogonal_residual(&y.coords, &x.coords));
    Ok(d.clamp(0.0, 1.0))
}

/// Uniformly distributed unit vector in the tangent space of `S^n` at `a`.
///
/// An isotropic Gaussian in `R^{n+1}` is projected onto `a^⊥` and normalized.
/// The projection is applied twice so the residual `<u, a>` sits at roundoff.
pub fn tangent_direction<R: Rng + ?Sized>(a: &ProjPoint, rng: &mut R) -> Vec<f64> {
    let ac = &a.coords;
    loop {
        let mut g: Vec<f64> = (0..ac.len()).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            let c = dot(&g, ac);
            for (gi, ai) in g.iter_mut().zip(ac) {
                *gi -= c * ai;
            }
        }
        let nrm = norm(&g);
        // The zero residual is a null event; redraw when it (nearly) happens.
        if nrm > 1e-8 {
            g.iter_mut().for_each(|gi| *gi /= nrm);
            return g;
        }
    }
}

/// The point `sqrt(1 - r²)·a + r·u` at projective distance `r` from `a`.
pub fn geodesic_point(a: &ProjPoint, u: &[f64], r: f64) -> Result<ProjPoint> {
    if u.len() != a.coords.len() {
        return Err(Error::DimensionMismatch {
            left: a.coords.len(),
            right: u.len(),
        });
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(domain("r", r, "[0, 1]"));
    }
    let un = norm(u);
    if (un - 1.0).abs() > 1e-10 {
        return Err(domain("|u|", un, "1"));
    }
    let c = dot(u, &a.coords);
    if c.abs() > 1e-10 {
        return Err(domain("<u, a>", c, "0"));
    }
    let along = ((1.0 - r) * (1.0 + r)).sqrt();
    let z: Vec<f64> = a.coords.iter().zip(u).map(|(ai, ui)| along * ai + r * ui).collect();
    ProjPoint::normalize(&z)
}

#[cfg(test)]
mod tests {
    #![allow(clippy::approx_constant)] // literals are tabulated values, not constants
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalize_scales_to_unit() {
        let p = ProjPoint::normalize(&[2.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.0, 0.0]);
        let q = ProjPoint::normalize(&[1.0, 1.0]).unwrap();
        let h = core::f64::consts::FRAC_1_SQRT_2;
        assert!((q.coords()[0] - h).abs() < 1e-15 && (q.coords()[1] - h).abs() < 1e-15);
    }

    #[test]
    fn normalize_rejects_zero_and_nan() {
        assert_eq!(ProjPoint::normalize(&[0.0, 0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(ProjPoint::normalize(&[f64::NAN, 1.0]), Err(Error::NonFinite));
    }

    #[test]
    fn distance_examples() {
        let x = ProjPoint::normalize(&[1.0, 0.0, 0.0]).unwrap();
        let y = ProjPoint::normalize(&[1.0, 1.0, 0.0]).unwrap();
        let z = ProjPoint::normalize(&[0.0, 0.0, 3.0]).unwrap();
        assert_eq!(proj_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(proj_distance(&x, &z).unwrap(), 1.0);
        let d = proj_distance(&x, &y).unwrap();
        assert!((d - 0.7071067812).abs() < 1e-10);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let x = ProjPoint::basis(2, 0);
        let y = ProjPoint::basis(3, 0);
        assert!(matches!(proj_distance(&x, &y), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tangent_in_one_dimension_is_perpendicular() {
        let a = ProjPoint::basis(1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = tangent_direction(&a, &mut rng);
            assert!(u[0].abs() < 1e-15);
            assert!((u[1].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn geodesic_endpoints() {
        let a = ProjPoint::basis(2, 0);
        let u = [0.0, 1.0, 0.0];
        assert_eq!(geodesic_point(&a, &u, 0.0).unwrap(), a);
        assert_eq!(geodesic_point(&a, &u, 1.0).unwrap().coords(), &u);
        let z = geodesic_point(&a, &u, 0.5).unwrap();
        assert!((proj_distance(&z, &a).unwrap() - 0.5).abs() < 1e-12);
        assert!(geodesic_point(&a, &u, 1.5).is_err());
        assert!(geodesic_point(&a, &[1.0, 0.0, 0.0], 0.2).is_err());
    }

    #[test]
    fn distance_resolves_tiny_radii() {
        let a = ProjPoint::basis(3, 0);
        let u = [0.0, 0.0, 1.0, 0.0];
        for r in [1e-6, 1e-9, 1e-12] {
            let z = geodesic_point(&a, &u, r).unwrap();
            let d = proj_distance(&z, &a).unwrap();
            assert!((d - r).abs() <= 1e-10 * r, "r={r} d={d}");
        }
    }
}
