//! Library routines checked against independent reference computations.

use capsmooth_core::condnum::{singular_values, smallest_singular_value, ConditionNumber, ConicProblem};
use capsmooth_core::geometry::ProjPoint;
use capsmooth_core::volumes::{
    cap_integral, cap_integral_quadrature, cap_integral_wallis, full_cap_integral, sphere_volume,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `∫_0^σ r^{m-1}(1-r²)^{-1/2} dr` by expanding `(1-r²)^{-1/2} = Σ c_k r^{2k}`,
/// `c_k = C(2k,k)/4^k`. Converges geometrically for `σ < 1`.
fn series_oracle(m: u32, sigma: f64) -> f64 {
    let mut c = 1.0;
    let mut sum = 0.0;
    let s2 = sigma * sigma;
    let mut pow = sigma.powi(m as i32);
    for k in 0..20_000u32 {
        let term = c * pow / f64::from(m + 2 * k);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        c *= (2.0 * f64::from(k) + 1.0) / (2.0 * f64::from(k) + 2.0);
        pow *= s2;
    }
    sum
}

/// `∫_0^{π/2} sin^{m-1}θ dθ` from the Wallis products.
fn wallis_product(m: u32) -> f64 {
    let k = m - 1;
    let (mut v, start) = if k % 2 == 0 { (std::f64::consts::FRAC_PI_2, 2) } else { (1.0, 3) };
    let mut j = start;
    while j <= k {
        v *= f64::from(j - 1) / f64::from(j);
        j += 2;
    }
    v
}

fn sigma_grid() -> Vec<f64> {
    (1..=10).map(|i| f64::from(i) / 10.0).collect()
}

#[test]
fn cap_integral_low_order_closed_forms() {
    for sigma in sigma_grid() {
        let arcsin = sigma.asin();
        assert!(rel_err(cap_integral(1.0, sigma).unwrap(), arcsin) < 1e-13);
        let two = 1.0 - (1.0 - sigma * sigma).sqrt();
        assert!(rel_err(cap_integral(2.0, sigma).unwrap(), two) < 1e-13);
    }
}

#[test]
fn cap_integral_matches_series_and_wallis_products() {
    for m in 1..=20u32 {
        for sigma in sigma_grid() {
            let reference = if sigma < 1.0 { series_oracle(m, sigma) } else { wallis_product(m) };
            let got = cap_integral(f64::from(m), sigma).unwrap();
            assert!(rel_err(got, reference) < 1e-12, "m={m} sigma={sigma}: {got} vs {reference}");
            let w = cap_integral_wallis(m, sigma).unwrap();
            assert!(rel_err(w, reference) < 1e-12, "wallis m={m} sigma={sigma}: {w} vs {reference}");
        }
        assert!(rel_err(full_cap_integral(f64::from(m)).unwrap(), wallis_product(m)) < 1e-13);
    }
}

#[test]
fn quadrature_agrees_with_incomplete_beta_for_real_orders() {
    for &m in &[0.25, 0.5, 1.0, 1.5, 2.7, 3.0, 5.5, 10.0, 17.25, 40.0] {
        for &sigma in &[1e-3, 0.05, 0.3, 0.7, 0.95, 0.999, 1.0] {
            let a = cap_integral(m, sigma).unwrap();
            let b = cap_integral_quadrature(m, sigma).unwrap();
            assert!(rel_err(a, b) < 1e-9, "m={m} sigma={sigma}: {a} vs {b}");
        }
    }
}

#[test]
fn sphere_volume_recurrence() {
    // O_0 = 2, O_1 = 2π, O_n = 2π/(n-1)·O_{n-2}
    let mut o = vec![2.0, 2.0 * std::f64::consts::PI];
    for n in 2..=101usize {
        let next = 2.0 * std::f64::consts::PI / (n as f64 - 1.0) * o[n - 2];
        o.push(next);
    }
    for (n, &v) in o.iter().enumerate() {
        assert!(rel_err(sphere_volume(n as u32), v) < 1e-12, "n={n}");
    }
    for n in 1..=100u32 {
        let lhs = o[n as usize - 1] * cap_integral(f64::from(n), 1.0).unwrap();
        assert!(rel_err(lhs, o[n as usize] / 2.0) < 1e-10, "n={n}");
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m * m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}

#[test]
fn smallest_singular_value_matches_eigen_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let m = 3;
        let a = random_matrix(&mut rng, m);
        let mat = DMatrix::from_row_slice(m, m, &a);
        // σ_min² is the smallest eigenvalue of AᵀA
        let gram = mat.transpose() * &mat;
        let eig = gram.symmetric_eigen();
        let lam_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
        let oracle = lam_min.sqrt();
        let got = smallest_singular_value(&a, m).unwrap();
        assert!((got - oracle).abs() < 1e-8, "trial {trial}: {got} vs {oracle}");
    }
}

#[test]
fn singular_values_match_nalgebra_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in 2..=6 {
        let a = random_matrix(&mut rng, m);
        let mut ours = singular_values(&a, m).unwrap();
        ours.sort_by(f64::total_cmp);
        let mut theirs: Vec<f64> = DMatrix::from_row_slice(m, m, &a).singular_values().iter().cloned().collect();
        theirs.sort_by(f64::total_cmp);
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-12 * theirs[m - 1], "{ours:?} vs {theirs:?}");
        }
    }
}

#[test]
fn matrix_condition_is_reciprocal_distance_to_singular_set() {
    // Eckart–Young: removing the smallest singular triple gives the nearest
    // singular matrix, at Frobenius distance σ_min.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let problem = ConicProblem::matrix(3).unwrap();
    for _ in 0..200 {
        let a = ProjPoint::normalize(&random_matrix(&mut rng, 3)).unwrap();
        let mat = DMatrix::from_row_slice(3, 3, a.coords());
        let svd = mat.clone().svd(true, true);
        let (k, smin) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(k, s)| (k, *s))
            .unwrap();
        let u = svd.u.as_ref().unwrap().column(k).into_owned();
        let vt = svd.v_t.as_ref().unwrap().row(k).into_owned();
        let nearest = &mat - (u * vt) * smin;
        let dist = (&mat - &nearest).norm();
        assert!((dist - smin).abs() < 1e-12);
        let c = problem.evaluate(&a);
        assert!(rel_err(c, 1.0 / dist) < 1e-9, "{c} vs {}", 1.0 / dist);
        let near_row: Vec<f64> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| nearest[(i, j)]).collect();
        let on_sigma = ProjPoint::normalize(&near_row).unwrap();
        assert_eq!(problem.evaluate(&on_sigma), f64::INFINITY);
    }
}

#[test]
fn hyperplane_condition_is_reciprocal_sine_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let problem = ConicProblem::hyperplane(4).unwrap();
    for _ in 0..500 {
        let a = ProjPoint::random(4, &mut rng);
        // nearest point of {x_0 = 0}: drop the first coordinate
        let mut proj = a.coords().to_vec();
        proj[0] = 0.0;
        let p = ProjPoint::normalize(&proj).unwrap();
        let d = capsmooth_core::geometry::proj_distance(&a, &p).unwrap();
        assert!(rel_err(problem.evaluate(&a), 1.0 / d) < 1e-9);
    }
}
