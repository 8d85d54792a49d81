use std::sync::OnceLock;

use proptest::prelude::*;
use stabwire::classify::depth_violations;
use stabwire::symplectic::symplectic_form;
use stabwire::tensor::{enumerate_tensors, GaugeElement};
use stabwire::wire::{
    capacity_profile, cylinder_group, omega1, omega_standard_form, omega_vector, phi_class,
    OmegaMatrix,
};
use stabwire::{capacity, BinaryMatrix, BitVec, PauliVector, StabilizerTensor, UpdateRule};

fn pool() -> &'static [StabilizerTensor] {
    static POOL: OnceLock<Vec<StabilizerTensor>> = OnceLock::new();
    POOL.get_or_init(enumerate_tensors)
}

fn tensor() -> impl Strategy<Value = StabilizerTensor> {
    (0..pool().len()).prop_map(|i| pool()[i])
}

fn gauge() -> impl Strategy<Value = GaugeElement> {
    (0usize..36).prop_map(|i| GaugeElement::all()[i])
}

fn combination(generators: &[PauliVector], n: usize, bits: u64) -> PauliVector {
    let mut out = PauliVector::identity(n);
    for (k, g) in generators.iter().enumerate() {
        if bits >> k & 1 == 1 {
            out.mul_assign(g);
        }
    }
    out
}

/// Random moves that leave an Ω matrix's class unchanged: row additions,
/// b-column additions, adding a b column into a pair column, and
/// symplectic changes of the pair columns.
fn shuffle_omega(omega: &OmegaMatrix, moves: &[(u8, usize, usize)]) -> OmegaMatrix {
    let mut m = omega.m.clone();
    let rows = omega.rows();
    let p = omega.p;
    for &(kind, i, j) in moves {
        match kind % 6 {
            0 if rows > 1 && i % rows != j % rows => m.add_row(i % rows, j % rows),
            1 if rows > 1 && i % rows != j % rows => m.add_col(i % rows, j % rows),
            2 if rows > 0 && p > 0 => m.add_col(i % rows, rows + j % (2 * p)),
            3 if p > 0 => {
                let k = rows + 2 * (i % p);
                m.swap_cols(k, k + 1);
            }
            4 if p > 0 => {
                let k = rows + 2 * (i % p);
                m.add_col(k, k + 1);
            }
            5 if p > 1 && i % p != j % p => {
                // g_a -> g_a g_b and ḡ_b -> ḡ_b ḡ_a, as column operations.
                let (a, b) = (rows + 2 * (i % p), rows + 2 * (j % p));
                m.add_col(b, a);
                m.add_col(a + 1, b + 1);
            }
            _ => {}
        }
    }
    OmegaMatrix { m, ..omega.clone() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn capacity_is_gauge_invariant(t in tensor(), g in gauge(), n in 1usize..=5, d in 1usize..=5) {
        let moved = t.gauge(&g);
        prop_assert_eq!(capacity(&t, n, d), capacity(&moved, n, d));
        prop_assert_eq!(phi_class(&t).unwrap().letter, phi_class(&moved).unwrap().letter);
    }

    #[test]
    fn omega_class_is_gauge_invariant(t in tensor(), g in gauge()) {
        prop_assert_eq!(omega_vector(&t, 5), omega_vector(&t.gauge(&g), 5));
    }

    #[test]
    fn omega_standard_form_ignores_moves(
        t in tensor(),
        n in 1usize..=6,
        moves in prop::collection::vec((any::<u8>(), 0usize..16, 0usize..16), 0..100),
    ) {
        let omega = omega1(&t, n);
        let moved = shuffle_omega(&omega, &moves);
        prop_assert_eq!(omega_standard_form(&omega), omega_standard_form(&moved));
    }

    #[test]
    fn update_preserves_commutation(t in tensor(), n in 1usize..=6, x_bits in any::<u64>(), y_bits in any::<u64>()) {
        let rule = UpdateRule::for_layer(&t, n);
        let sources = rule.phi().left_generators();
        let x = combination(&sources, n, x_bits);
        let y = combination(&sources, n, y_bits);
        let (tx, ty) = (rule.apply(&x).unwrap(), rule.apply(&y).unwrap());
        prop_assert_eq!(symplectic_form(&x, &y), symplectic_form(&tx, &ty));
    }

    #[test]
    fn update_commutes_with_translation(t in tensor(), n in 2usize..=6, x_bits in any::<u64>(), shift in 1usize..6) {
        let rule = UpdateRule::for_layer(&t, n);
        let x = combination(&rule.phi().left_generators(), n, x_bits);
        let shifted = x.translate(shift % n);
        let image = rule.apply(&shifted).expect("domain is translation invariant");
        let mut diff = rule.apply(&x).unwrap().translate(shift % n);
        diff.mul_assign(&image);
        let right_center = BinaryMatrix::from_paulis(n, &rule.phi().b);
        prop_assert!(diff.is_identity() || right_center.contains(&diff.to_row()));
    }

    #[test]
    fn chain_matches_direct_contraction(t in tensor(), n in 1usize..=4, d in 1usize..=4) {
        prop_assert_eq!(capacity(&t, n, d), cylinder_group(&t, n, d).pairs());
    }

    #[test]
    fn depth_properties_hold(t in tensor(), n in 1usize..=7) {
        let violations = depth_violations(&t, n, 12, 3);
        prop_assert!(violations.is_empty(), "{}", violations[0]);
    }

    #[test]
    fn capacities_are_bounded_and_monotone(t in tensor(), n in 1usize..=8) {
        let profile = capacity_profile(&UpdateRule::for_layer(&t, n), 10);
        prop_assert!(profile.iter().all(|&c| c <= n));
        prop_assert!(profile.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn tensors_survive_text(t in tensor()) {
        prop_assert_eq!(StabilizerTensor::parse_file(&t.to_file_text()).unwrap(), t);
        prop_assert_eq!(t.to_string().parse::<StabilizerTensor>().unwrap(), t);
        let key_bits = BitVec::from_bits((0..50).map(|k| t.key() >> k & 1 == 1));
        prop_assert_eq!(key_bits.count_ones() as u32, t.key().count_ones());
    }
}
