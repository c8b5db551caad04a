mod common;

use cellhodge::boundary::{boundary_matrix_1, boundary_matrix_2, Cochain};
use cellhodge::spectral::{
    betti_numbers, betti_numbers_numerical, eigendecompose, hodge_decompose, hodge_laplacian, lambda_max, HodgeDecomposer,
    DEFAULT_ZERO_TOL,
};
use common::*;
use nalgebra::{DMatrix, DVector};

#[test]
fn l0_is_the_graph_laplacian() {
    let mut all = fixtures().into_iter().map(|(_, c)| c).collect::<Vec<_>>();
    all.extend((0..20).map(random_patch));
    for c in all {
        assert_eq!(hodge_laplacian(&c, 0).unwrap().full, graph_laplacian_oracle(&c));
    }
}

#[test]
fn laplacians_are_symmetric_psd_and_split() {
    for (name, c) in fixtures() {
        for k in 0..=2 {
            let l = hodge_laplacian(&c, k).unwrap();
            assert_eq!(l.full, &l.lower + &l.upper);
            assert_eq!(l.full, l.full.transpose(), "{name} L{k}");
            let s = eigendecompose(&l.full, DEFAULT_ZERO_TOL).unwrap();
            assert!(s.eigenvalues.iter().all(|&v| v > -1e-9), "{name} L{k}");
            assert!(max_abs_diff(&s.reconstruct(), &l.full) < 1e-9);
        }
    }
    assert!(hodge_laplacian(&fixtures()[0].1, 3).is_err());
}

#[test]
fn exact_and_numerical_betti_numbers_agree() {
    for (name, c) in fixtures() {
        assert_eq!(betti_numbers(&c).unwrap(), betti_numbers_numerical(&c, DEFAULT_ZERO_TOL).unwrap(), "{name}");
    }
    for seed in 0..50 {
        let c = random_patch(seed);
        assert_eq!(betti_numbers(&c).unwrap(), (1, 0, 0));
        assert_eq!(betti_numbers_numerical(&c, DEFAULT_ZERO_TOL).unwrap(), (1, 0, 0));
    }
}

#[test]
fn betti_numbers_match_rank_oracle() {
    let mut all = fixtures().into_iter().map(|(_, c)| c).collect::<Vec<_>>();
    all.extend((0..10).map(random_patch));
    for c in all {
        let r1 = svd_rank(&boundary_matrix_1(&c).to_dense());
        let r2 = svd_rank(&boundary_matrix_2(&c).to_dense());
        let (n0, n1, n2) = c.counts();
        let expected = (n0 - r1, n1 - r1 - r2, n2 - r2);
        assert_eq!(betti_numbers(&c).unwrap(), expected);
        let (b0, b1, b2) = expected;
        assert_eq!(b0 as i64 - b1 as i64 + b2 as i64, c.euler_characteristic());
    }
}

#[test]
fn torus_topology() {
    let c = cellhodge::fixtures::Fixture::TorusCc.build();
    assert_eq!(betti_numbers(&c).unwrap(), (1, 2, 1));
    assert_eq!(c.euler_characteristic(), 0);
}

#[test]
fn decomposition_properties_on_random_flows() {
    for (name, c) in fixtures() {
        let d = HodgeDecomposer::new(&c);
        let mut r = rng(11);
        for _ in 0..100 {
            let f = Cochain::new(1, random_vec(c.num_edges(), &mut r));
            let p = d.decompose(&f).unwrap();
            let (g, cu, h) = (p.gradient.to_vector(), p.curl.to_vector(), p.harmonic.to_vector());
            let fv = f.to_vector();
            assert!((&g + &cu + &h - &fv).norm() <= 1e-8 * fv.norm().max(1.0), "{name}");
            assert!(g.dot(&cu).abs() <= 1e-8 && g.dot(&h).abs() <= 1e-8 && cu.dot(&h).abs() <= 1e-8, "{name}");
            // idempotence: each part decomposes into itself
            let again = d.decompose(&p.gradient).unwrap();
            assert!((again.gradient.to_vector() - &g).norm() <= 1e-8);
            let again = d.decompose(&p.curl).unwrap();
            assert!((again.curl.to_vector() - &cu).norm() <= 1e-8);
            let again = d.decompose(&p.harmonic).unwrap();
            assert!((again.harmonic.to_vector() - &h).norm() <= 1e-8);
        }
    }
}

#[test]
fn pure_gradient_and_curl_inputs() {
    for (name, c) in fixtures() {
        let b1 = boundary_matrix_1(&c).to_dense();
        let b2 = boundary_matrix_2(&c).to_dense();
        let mut r = rng(5);
        let phi = DVector::from_vec(random_vec(c.num_nodes(), &mut r));
        let grad = Cochain::from_vector(1, &(b1.transpose() * phi));
        let p = hodge_decompose(&c, &grad).unwrap();
        assert!(p.curl.norm() <= 1e-8 && p.harmonic.norm() <= 1e-8, "{name}");
        assert!((p.gradient.to_vector() - grad.to_vector()).norm() <= 1e-8);
        if c.num_two_cells() > 0 {
            let eta = DVector::from_vec(random_vec(c.num_two_cells(), &mut r));
            let curl = Cochain::from_vector(1, &(b2 * eta));
            let p = hodge_decompose(&c, &curl).unwrap();
            assert!(p.gradient.norm() <= 1e-8 && p.harmonic.norm() <= 1e-8, "{name}");
        }
    }
}

#[test]
fn harmonic_part_lies_in_the_kernel() {
    for (name, c) in fixtures() {
        let l1 = hodge_laplacian(&c, 1).unwrap().full;
        let f = Cochain::new(1, random_vec(c.num_edges(), &mut rng(3)));
        let h = hodge_decompose(&c, &f).unwrap().harmonic.to_vector();
        assert!((&l1 * h).norm() <= 1e-8, "{name}");
    }
}

#[test]
fn eigenvectors_split_into_gradient_curl_or_harmonic() {
    for (name, c) in fixtures() {
        let l1 = hodge_laplacian(&c, 1).unwrap();
        let s = eigendecompose(&l1.full, DEFAULT_ZERO_TOL).unwrap();
        let d = HodgeDecomposer::new(&c);
        assert_eq!(s.kernel_dim(), betti_numbers(&c).unwrap().1, "{name}");
        for (i, &lambda) in s.eigenvalues.iter().enumerate() {
            let v = Cochain::from_vector(1, &s.eigenvectors.column(i).into_owned());
            let p = d.decompose(&v).unwrap();
            let norms = [p.gradient.norm(), p.curl.norm(), p.harmonic.norm()];
            if lambda.abs() <= DEFAULT_ZERO_TOL {
                assert!(norms[0] < 1e-8 && norms[1] < 1e-8, "{name}: kernel vector {i}");
            } else {
                assert!(norms[2] < 1e-8, "{name}: eigenvector {i} has a harmonic part");
                // a repeated eigenvalue may mix the two subspaces; only check simple ones
                let simple = s.eigenvalues.iter().filter(|&&m| (m - lambda).abs() < 1e-7).count() == 1;
                if simple {
                    assert!(norms[0].min(norms[1]) < 1e-8, "{name}: eigenvector {i} mixes gradient and curl");
                }
            }
        }
    }
}

#[test]
fn lambda_max_matches_dense_eigensolver() {
    let mut all = fixtures().into_iter().map(|(_, c)| c).collect::<Vec<_>>();
    all.extend((0..20).map(random_patch));
    for (i, c) in all.iter().enumerate() {
        for k in 0..=2 {
            let l = hodge_laplacian(c, k).unwrap().full;
            if l.nrows() == 0 {
                continue;
            }
            let dense = l.clone().symmetric_eigenvalues().max();
            let est = lambda_max(&l, 1e-6, 10_000, i as u64).unwrap();
            assert!((est - dense).abs() <= 1e-5 * dense.max(1.0), "complex {i} L{k}: {est} vs {dense}");
        }
    }
}

#[test]
fn lambda_max_of_zero_matrix() {
    assert_eq!(lambda_max(&DMatrix::zeros(3, 3), 1e-6, 100, 0).unwrap(), 0.0);
}

#[test]
fn asymmetric_input_is_rejected() {
    let mut m = DMatrix::identity(3, 3);
    m[(0, 1)] = 1.0;
    assert!(eigendecompose(&m, DEFAULT_ZERO_TOL).is_err());
}
