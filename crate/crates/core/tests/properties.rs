use kv_core::diffusion_dispersion::{kappa_roots, DDConfig, RootChoice};
use kv_core::matrix::Mat;
use kv_core::oracles::dispersion_roots;
use kv_core::spectral::{curl, divergence, gradient, laplacian, Grid, Shape, SpectralField, SpectralTransform, C64};
use kv_core::stored_energy::{check_gradient_consistency, check_semiconvexity, StoredEnergyModel};
use proptest::prelude::*;

/// A real field: random coefficients on |k_i| ≤ n, symmetrized.
fn field(dim: usize, shape: Shape) -> impl Strategy<Value = SpectralField> {
    (1usize..=5).prop_flat_map(move |n| {
        let len = shape.components(dim) * (2 * n + 1).pow(dim as u32);
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |pairs| {
            let coeffs = pairs.into_iter().map(|(re, im)| C64::new(re, im)).collect();
            let mut f = SpectralField::from_coeffs(dim, n, shape, coeffs).unwrap();
            f.enforce_hermitian();
            f
        })
    })
}

fn transform(f: &SpectralField) -> SpectralTransform {
    SpectralTransform::new(Grid::new(f.dim(), f.n(), 3 * f.n() + 2).unwrap())
}

fn matrix(dim: usize, range: f64) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-range..range, dim * dim).prop_map(move |e| Mat::from_row_major(dim, &e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(f in prop_oneof![field(1, Shape::Vector), field(2, Shape::Vector)]) {
        let mut tr = transform(&f);
        let values = tr.to_physical(&f);
        let back = tr.from_physical(Shape::Vector, &values).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn parseval(f in prop_oneof![field(1, Shape::Scalar), field(2, Shape::Scalar)]) {
        let mut tr = transform(&f);
        let grid = *tr.grid();
        let values = tr.to_physical(&f);
        let physical: f64 = values[0].iter().map(|u| u * u).sum::<f64>() * grid.cell_volume();
        let spectral = grid.volume() * f.weighted_energy(|_| 1.0);
        prop_assert!((physical - spectral).abs() <= 1e-12 * spectral.max(1.0));
    }

    #[test]
    fn transform_is_linear(f in field(2, Shape::Scalar), a in -3.0f64..3.0) {
        let mut tr = transform(&f);
        let g = f.scaled(a);
        let (uf, ug) = (tr.to_physical(&f), tr.to_physical(&g));
        for (x, y) in uf[0].iter().zip(&ug[0]) {
            prop_assert!((a * x - y).abs() < 1e-13 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn gradients_are_curl_free(f in field(2, Shape::Vector)) {
        let c = curl(&gradient(&f).unwrap()).unwrap();
        prop_assert!(c.coeffs().iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn divergence_of_gradient_is_laplacian(f in field(2, Shape::Scalar)) {
        let dg = divergence(&gradient(&f).unwrap()).unwrap();
        prop_assert!(dg.max_abs_diff(&laplacian(&f)) < 1e-12);
    }

    #[test]
    fn vieta_identities(n in 1u32..64, kappa in 0.01f64..16.0) {
        let roots = dispersion_roots(n, kappa).unwrap();
        let (sum, product) = roots.vieta_residuals();
        prop_assert!(sum <= 1e-13 && product <= 1e-13, "n = {n}, kappa = {kappa}: {sum:e} {product:e}");
        // the slow root decays no faster than the fast one
        prop_assert!(roots.lambda_plus >= roots.lambda_minus && roots.lambda_plus < 0.0);
    }

    #[test]
    fn capillarity_roots(eps in 0.01f64..1.0, frac in 0.0f64..0.999, a in 0.1f64..4.0) {
        // δA below the double-root threshold ε²/4
        let delta = frac * eps * eps / (4.0 * a);
        let (minus, plus) = kappa_roots(eps, delta, a).unwrap();
        prop_assert!(0.0 <= minus && minus <= plus && plus <= eps);
        prop_assert!((minus + plus - eps).abs() <= 1e-13 * eps);
        prop_assert!((minus * plus - delta * a).abs() <= 1e-13 * eps * eps);
        let cfg = DDConfig::new(eps, delta, a, RootChoice::Minus).unwrap();
        prop_assert!(cfg.quadratic_residual() < 1e-12);
    }

    #[test]
    fn inadmissible_capillarity_has_no_root(eps in 0.01f64..1.0, excess in 1.01f64..10.0, a in 0.1f64..4.0) {
        let delta = excess * eps * eps / (4.0 * a);
        prop_assert!(kappa_roots(eps, delta, a).is_err());
    }

    #[test]
    fn stress_is_the_energy_gradient(f in matrix(2, 2.0), alpha in 0.0f64..2.0) {
        for model in [StoredEnergyModel::quartic(2, alpha), StoredEnergyModel::quadratic(2, 1.0 + alpha)] {
            let scale = 1.0 + f.norm().powi(3);
            prop_assert!(check_gradient_consistency(&model, &[f], 1e-5) < 1e-6 * scale);
        }
    }

    #[test]
    fn quartic_is_semiconvex_with_its_constant(f in matrix(2, 3.0), alpha in 0.0f64..3.0) {
        let model = StoredEnergyModel::quartic(2, alpha);
        prop_assert!(check_semiconvexity(&model, &[f]).unwrap().pass);
    }
}
