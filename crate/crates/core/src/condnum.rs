//! Conic condition numbers `C(a) = ‖a‖ / dist(a, Σ) = 1 / d_P(a, Σ)`.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::geometry::{dot, norm, ProjPoint};

/// A conic condition number on `P^n` whose ill-posed set lies in a
/// hypersurface of degree at most [`ConditionNumber::degree`].
pub trait ConditionNumber {
    /// Projective dimension `n` of the input space.
    fn dim(&self) -> usize;
    /// Degree `d` of a hypersurface containing `Σ`.
    fn degree(&self) -> u32;
    /// `C(x) ∈ [1, ∞]`; `+∞` on `Σ`.
    fn evaluate(&self, x: &ProjPoint) -> f64;
    /// A point of `Σ`, the worst-case center for tail experiments.
    fn ill_posed_point(&self) -> ProjPoint;
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// Σ = {x_0 = 0}
    Hyperplane,
    /// Σ = ∪ {<u_i, x> = 0}
    Union(Vec<Vec<f64>>),
    /// Σ = singular m×m matrices, coordinates read row-major
    Matrix(usize),
}

/// The condition-number instances shipped with the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProblem {
    n: usize,
    degree: u32,
    kind: Kind,
}

impl ConicProblem {
    /// `Σ = {x_0 = 0}`, degree 1, `C(a) = 1/|a_0|`.
    pub fn hyperplane(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("n", 0.0, "integer ≥ 1"));
        }
        Ok(Self {
            n,
            degree: 1,
            kind: Kind::Hyperplane,
        })
    }

    /// Union of the hyperplanes `⟨u_i, x⟩ = 0`, the zero set of a degree-`k`
    /// product polynomial. `C(a) = 1 / min_i |⟨u_i, a⟩|`.
    pub fn union_of_hyperplanes(normals: Vec<Vec<f64>>) -> Result<Self> {
        let first = normals.first().ok_or(domain("k", 0.0, "at least one normal"))?;
        let len = first.len();
        if len < 2 {
            return Err(domain("n", 0.0, "integer ≥ 1"));
        }
        for u in &normals {
            if u.len() != len {
                return Err(Error::DimensionMismatch { left: len, right: u.len() });
            }
            let un = norm(u);
            if (un - 1.0).abs() > 1e-12 {
                return Err(domain("|u_i|", un, "1"));
            }
        }
        Ok(Self {
            n: len - 1,
            degree: normals.len() as u32,
            kind: Kind::Union(normals),
        })
    }

    /// The coordinate hyperplanes `x_0 = 0, …, x_{k-1} = 0` in `P^n`.
    pub fn coordinate_hyperplanes(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n + 1 {
            return Err(domain("k", k as f64, "1 ≤ k ≤ n + 1"));
        }
        let normals = (0..k).map(|i| ProjPoint::basis(n, i).into_coords()).collect();
        Self::union_of_hyperplanes(normals)
    }

    /// Matrix inversion on `m×m` matrices with the Frobenius inner product:
    /// `Σ` is the determinant hypersurface (degree `m`), `n = m² - 1`, and by
    /// Eckart–Young `C(A) = ‖A‖_F / σ_min(A)`.
    pub fn matrix(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(domain("m", m as f64, "integer ≥ 2"));
        }
        Ok(Self {
            n: m * m - 1,
            degree: m as u32,
            kind: Kind::Matrix(m),
        })
    }
}

impl ConditionNumber for ConicProblem {
    fn dim(&self) -> usize {
        self.n
    }

    fn degree(&self) -> u32 {
        self.degree
    }

    fn evaluate(&self, x: &ProjPoint) -> f64 {
        let c = x.coords();
        debug_assert_eq!(c.len(), self.n + 1);
        match &self.kind {
            Kind::Hyperplane => 1.0 / c[0].abs(),
            Kind::Union(normals) => {
                let closest = normals.iter().map(|u| dot(u, c).abs()).fold(f64::INFINITY, f64::min);
                1.0 / closest
            }
            Kind::Matrix(m) => {
                let frob = norm(c);
                match smallest_singular_value(c, *m) {
                    Ok(smin) if smin > singular_threshold(*m) * frob => frob / smin,
                    _ => f64::INFINITY,
                }
            }
        }
    }

    fn ill_posed_point(&self) -> ProjPoint {
        match &self.kind {
            // e_1 is orthogonal to e_0; for general unions take a unit vector
            // orthogonal to the first normal.
            Kind::Hyperplane => ProjPoint::basis(self.n, 1),
            Kind::Union(normals) => {
                let u = &normals[0];
                let j = (0..u.len())
                    .min_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))
                    .unwrap_or(0);
                let mut e = alloc::vec![0.0; u.len()];
                e[j] = 1.0;
                let c = dot(&e, u);
                let v: Vec<f64> = e.iter().zip(u).map(|(ei, ui)| ei - c * ui).collect();
                ProjPoint::normalize(&v).expect("nonzero residual")
            }
            // diag(1, …, 1, 0)
            Kind::Matrix(m) => {
                let mut a = alloc::vec![0.0; m * m];
                for i in 0..m - 1 {
                    a[i * m + i] = 1.0;
                }
                ProjPoint::normalize(&a).expect("nonzero matrix")
            }
        }
    }
}

/// Relative size below which `σ_min` is indistinguishable from zero.
fn singular_threshold(m: usize) -> f64 {
    4.0 * m as f64 * f64::EPSILON
}

/// Smallest singular value of the row-major `m×m` matrix `a`.
///
/// One-sided Jacobi: plane rotations orthogonalize the columns, whose norms
/// are then the singular values. Accurate to high relative precision.
pub fn smallest_singular_value(a: &[f64], m: usize) -> Result<f64> {
    Ok(singular_values(a, m)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// All singular values of the row-major `m×m` matrix `a`, unordered.
pub fn singular_values(a: &[f64], m: usize) -> Result<Vec<f64>> {
    if a.len() != m * m {
        return Err(Error::DimensionMismatch { left: m * m, right: a.len() });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    // column-major working copy
    let mut cols: Vec<Vec<f64>> = (0..m).map(|j| (0..m).map(|i| a[i * m + j]).collect()).collect();
    const MAX_SWEEPS: usize = 60;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in p + 1..m {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                // signum(0) = 1 gives the 45° rotation
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            return Ok(cols.iter().map(|c| norm(c)).collect());
        }
    }
    Err(Error::NotConverged("Jacobi SVD"))
}
