mod common;

use cellhodge::boundary::{boundary_matrix_1, boundary_matrix_2, boundary_product, orientation_flip_transform};
use cellhodge::complex::{canonicalize_two_cell, parse_complex_json, ComplexJson, EdgeId, RotationJson, SignedEdgeRef, TwoCell};
use cellhodge::fixtures::{Fixture, SIOUX_FALLS_ROTATION};
use cellhodge::Error;
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn signed_walk() -> impl Strategy<Value = Vec<SignedEdgeRef>> {
    proptest::collection::btree_set(0usize..60, 2..9)
        .prop_flat_map(|edges| {
            let n = edges.len();
            (Just(edges), proptest::collection::vec(any::<bool>(), n))
        })
        .prop_map(|(edges, signs)| {
            edges
                .into_iter()
                .zip(signs)
                .map(|(e, plus)| if plus { SignedEdgeRef::plus(e) } else { SignedEdgeRef::minus(e) })
                .collect::<Vec<_>>()
        })
        .prop_shuffle()
}

proptest! {
    #[test]
    fn canonical_form_is_idempotent(walk in signed_walk()) {
        let c = canonicalize_two_cell(&TwoCell::new(walk));
        prop_assert_eq!(canonicalize_two_cell(&c), c);
    }

    #[test]
    fn canonical_form_ignores_starting_point(walk in signed_walk(), shift in 0usize..16) {
        let mut rotated = walk.clone();
        let k = shift % rotated.len();
        rotated.rotate_left(k);
        prop_assert_eq!(TwoCell::new(walk).canonical(), TwoCell::new(rotated).canonical());
    }

    #[test]
    fn canonical_form_keeps_the_cyclic_sequence(walk in signed_walk()) {
        let c = TwoCell::new(walk.clone()).canonical();
        let first = c.boundary()[0];
        prop_assert_eq!(first, *walk.iter().min().unwrap());
        let at = walk.iter().position(|&s| s == first).unwrap();
        let mut expected = walk;
        expected.rotate_left(at);
        prop_assert_eq!(c.boundary(), &expected[..]);
    }
}

#[test]
fn random_planar_patches_are_exact() {
    for seed in 0..100 {
        let c = random_patch(seed);
        assert!(boundary_product(&c).iter().flatten().all(|&v| v == 0), "seed {seed}");
        assert_eq!(c.euler_characteristic(), 1, "seed {seed}: a disk has χ = 1");
    }
}

#[test]
fn fixtures_are_exact_with_expected_counts() {
    let expected = [(4, 8, 4), (4, 4, 1), (4, 4, 0), (24, 38, 15)];
    for (f, n) in Fixture::ALL.iter().zip(expected) {
        let c = f.build();
        assert_eq!(c.counts(), n, "{}", f.name());
        assert!(boundary_product(&c).iter().flatten().all(|&v| v == 0));
    }
}

#[test]
fn boundary_column_sums_vanish() {
    // each edge has one tail and one head
    for (name, c) in fixtures() {
        let b1 = boundary_matrix_1(&c).to_dense_int();
        for j in 0..c.num_edges() {
            let s: i64 = b1.iter().map(|row| row[j]).sum();
            assert_eq!(s, 0, "{name} edge {j}");
        }
    }
}

#[test]
fn shipped_fixture_files_match_builtins() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for f in Fixture::ALL {
        let text = std::fs::read_to_string(dir.join(f.file_name())).unwrap();
        assert_eq!(parse_complex_json(&text).unwrap(), f.build(), "{}", f.name());
    }
    let rotation = std::fs::read_to_string(dir.join("sioux_falls_rotation.json")).unwrap();
    assert_eq!(rotation, SIOUX_FALLS_ROTATION);
}

#[test]
fn json_round_trip() {
    let mut all = fixtures().into_iter().map(|(_, c)| c).collect::<Vec<_>>();
    all.extend((0..20).map(random_patch));
    for c in all {
        assert_eq!(parse_complex_json(&c.to_json()).unwrap(), c);
        let raw = ComplexJson::from(&c);
        assert_eq!(raw.build().unwrap(), c);
    }
}

#[test]
fn json_rejects_unknown_fields_and_open_cells() {
    let extra = r#"{"nodes": 2, "edges": [[0, 1]], "two_cells": [], "colour": 1}"#;
    assert!(matches!(parse_complex_json(extra), Err(Error::Json(_))));
    let open = r#"{"nodes": 4, "edges": [[0,1],[1,2],[2,3],[3,0]], "two_cells": [[[0,1],[1,1],[2,1]]]}"#;
    let err = parse_complex_json(open).unwrap_err();
    assert!(matches!(err, Error::OpenPath { cell: 0, .. }), "{err}");
}

#[test]
fn rotation_json_reproduces_sioux_falls() {
    let c = RotationJson::parse(SIOUX_FALLS_ROTATION).unwrap().to_complex().unwrap();
    assert_eq!(c, Fixture::SiouxFalls.build());
    assert_eq!(c.euler_characteristic(), 1);
}

#[test]
fn reorienting_edges_conjugates_boundaries() {
    for seed in 0..20 {
        let c = random_patch(seed);
        let mut r = rng(1000 + seed);
        let flips: Vec<EdgeId> = (0..c.num_edges()).filter(|_| r.gen_bool(0.5)).map(EdgeId).collect();
        let flipped = c.with_flipped_edges(&flips).unwrap();
        let d = orientation_flip_transform(&c, &flips).unwrap();
        let b1 = boundary_matrix_1(&c).to_dense();
        let b2 = boundary_matrix_2(&c).to_dense();
        assert_eq!(boundary_matrix_1(&flipped).to_dense(), &b1 * &d);
        assert_eq!(boundary_matrix_2(&flipped).to_dense(), &d * &b2);
        assert!(boundary_product(&flipped).iter().flatten().all(|&v| v == 0));
    }
}

#[test]
fn relabeling_permutes_boundaries() {
    for (name, c) in fixtures() {
        let rl = relabel(&c, &mut rng(7));
        let pn = permutation_matrix(&rl.node);
        let pe = permutation_matrix(&rl.edge);
        let pc = permutation_matrix(&rl.cell);
        let b1 = boundary_matrix_1(&c).to_dense();
        let b2 = boundary_matrix_2(&c).to_dense();
        assert_eq!(boundary_matrix_1(&rl.complex).to_dense(), &pn * b1 * pe.transpose(), "{name}");
        assert_eq!(boundary_matrix_2(&rl.complex).to_dense(), &pe * b2 * pc.transpose(), "{name}");
    }
}
