//! Invariants checked through the public API only.

use gtclab::codes::{build_cyclic, cyclic_to_gtc, gtc_to_cyclic, CodeSpec, CyclicCode, GtcCode};
use gtclab::distance::{effective_distance_geometric, effective_distance_oracle};
use gtclab::lattice::{hnf_canonicalize, Vec2};
use gtclab::noise::{eta_from_omega, omega_from_eta, EffectiveWeight, NoiseKind, NoiseModel};
use gtclab::paulialg::{symplectic_product, Pauli, PauliOperator};
use gtclab::Execution;
use proptest::prelude::*;

fn basis(max_n: i64) -> impl Strategy<Value = (Vec2, Vec2)> {
    (-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6)
        .prop_map(|(a, b, c, d)| (Vec2::new(a, b), Vec2::new(c, d)))
        .prop_filter("non-degenerate, small", move |(l1, l2)| {
            let det = l1.cross(*l2).abs();
            det >= 2 && det <= max_n
        })
}

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gtc_groups_are_abelian_with_commuting_logicals((l1, l2) in basis(40)) {
        let code = GtcCode::new(l1, l2).unwrap();
        prop_assert_eq!(code.n() as i64, l1.cross(l2).abs());
        let s = code.stabilizers();
        prop_assert!(code.k() >= 1);
        for g in s.generators() {
            prop_assert!(s.commutes_with_all(g).is_ok());
        }
        for (x, z) in s.logicals() {
            prop_assert!(s.commutes_with_all(x).is_ok());
            prop_assert!(s.commutes_with_all(z).is_ok());
            prop_assert!(symplectic_product(x, z).unwrap());
        }
    }

    #[test]
    fn code_spec_survives_json((l1, l2) in basis(40)) {
        let code = GtcCode::new(l1, l2).unwrap();
        let spec = code.spec();
        let text = serde_json::to_string(&spec).unwrap();
        let back: CodeSpec = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        let rebuilt = back.build().unwrap();
        prop_assert_eq!((rebuilt.n(), rebuilt.k()), (code.n(), code.k()));
    }

    #[test]
    fn hnf_is_idempotent((l1, l2) in basis(60)) {
        let once = hnf_canonicalize([l1, l2]).unwrap();
        prop_assert_eq!(once.det().abs(), l1.cross(l2).abs());
        let twice = hnf_canonicalize(once.basis()).unwrap();
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn syndrome_is_linear(
        (l1, l2) in basis(30),
        p in prop::collection::vec(pauli(), 30),
        q in prop::collection::vec(pauli(), 30),
    ) {
        let code = GtcCode::new(l1, l2).unwrap();
        let n = code.n();
        let s = code.stabilizers();
        let p = PauliOperator::from_paulis(&p[..n]);
        let q = PauliOperator::from_paulis(&q[..n]);
        let sp = s.syndrome(&p).unwrap();
        let sq = s.syndrome(&q).unwrap();
        let spq = s.syndrome(&p.try_mul(&q).unwrap()).unwrap();
        let xor: Vec<bool> = sp.iter().zip(&sq).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(spq, xor);
    }

    #[test]
    fn geometric_distance_bounds_the_oracle((l1, l2) in basis(15), omega in 1.0f64..4.0) {
        let code = GtcCode::new(l1, l2).unwrap();
        let geo = effective_distance_geometric(&code, omega).unwrap();
        let oracle = effective_distance_oracle(
            code.stabilizers(),
            EffectiveWeight::independent(omega),
            Execution::Sequential,
        )
        .unwrap();
        prop_assert!(oracle.d_prime <= geo.d_prime + 1e-9, "{} > {}", oracle.d_prime, geo.d_prime);
    }

    #[test]
    fn cyclic_codes_map_to_gtc(n in 4usize..30, a in 1usize..30, b in 1usize..30) {
        prop_assume!(a < n && b < n);
        let Ok(c) = CyclicCode::new(n, a, b) else { return Ok(()) };
        let Ok(group) = build_cyclic(n, a, b) else { return Ok(()) };
        let lat = cyclic_to_gtc(&c).unwrap();
        let [l1, l2] = lat.basis();
        let code = GtcCode::new(l1, l2).unwrap();
        prop_assert_eq!((code.n(), code.k()), (n, group.k()));
        let back = gtc_to_cyclic(&code);
        prop_assert!(back.is_some());
        prop_assert_eq!(back.unwrap().n, n);
    }

    #[test]
    fn total_probability_is_respected(
        k in 0usize..6,
        p in 0.001f64..0.3,
        omega in 1.0f64..5.0,
    ) {
        let kind = NoiseKind::ALL[k];
        let m = NoiseModel::with_total(kind, p, omega).unwrap();
        prop_assert!((m.p() - p).abs() < 1e-9);
        prop_assert!((m.p_x() + m.p_y() + m.p_z() - m.p()).abs() < 1e-12);
    }

    #[test]
    fn eta_and_omega_are_inverse(eta in 0.5f64..1e4, pz in 0.001f64..0.4) {
        let omega = omega_from_eta(eta, pz).unwrap();
        let back = eta_from_omega(omega, pz).unwrap();
        prop_assert!((back - eta).abs() < 1e-8 * eta);
    }
}
