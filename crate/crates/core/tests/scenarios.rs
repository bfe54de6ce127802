use stackydeg_core::blowup::{contract_singularity, AnSing};
use stackydeg_core::curve::{arithmetic_genus, quasi_stability_check, Stability};
use stackydeg_core::degenerate;
use stackydeg_core::engine::Step;
use stackydeg_core::field::Rat;
use stackydeg_core::scenarios::*;

#[test]
fn bridge_inserts_one_schematic_line() {
    let input = two_genus2_bridge();
    let out = degenerate(&input).unwrap();
    let new = out.inserted_components();
    assert_eq!(new.len(), 1);
    let e = new[0];
    assert_eq!(out.limit_multidegree.get(0, e), Rat::one());
    assert_eq!(out.limit_multidegree.get(0, 1), Rat::from_int(-1));
    assert_eq!(out.limit_multidegree.totals(), vec![Rat::zero()]);
    assert!(out.limit_curve.nodes_at(e).iter().all(|n| n.stab == 1));
    let inserted_at: Vec<u32> = out
        .log
        .iter()
        .filter_map(|s| match s {
            Step::Insert { node, .. } => Some(*node),
            _ => None,
        })
        .collect();
    assert_eq!(inserted_at, vec![1]);
    assert_eq!(arithmetic_genus(&out.limit_curve).unwrap(), 5);
    assert!(out.validation.is_ok());
}

#[test]
fn example_one_is_already_a_limit() {
    let input = theta_example_1(3);
    let out = degenerate(&input).unwrap();
    assert_eq!(out.limit_curve, input.curve);
}

#[test]
fn example_two_sweep() {
    for k in 2..=4 {
        for d in 2..=4 {
            let out = degenerate(&theta_example_2(k, d, 1)).unwrap();
            let new = out.inserted_components();
            assert_eq!(new.len(), 1);
            assert_eq!(out.limit_multidegree.get(0, new[0]), Rat::new(1, (d * k) as i64));
            let mut orders: Vec<u32> = out.limit_curve.nodes_at(new[0]).iter().map(|n| n.stab).collect();
            orders.sort_unstable();
            let mut want = vec![k, k_prime(k, d) * d];
            want.sort_unstable();
            assert_eq!(orders, want, "k={k} d={d}");
        }
    }
}

#[test]
fn example_three_single_destabilizing_line() {
    for (k, d, m1, m2) in [(2, 2, 2, 1), (3, 2, 5, 1), (2, 3, 1, 4), (4, 3, 7, 2)] {
        let out = degenerate(&theta_example_3(k, d, m1, m2)).unwrap();
        let destab: Vec<u32> = quasi_stability_check(&out.limit_curve, &out.ample_degree)
            .into_iter()
            .filter(|e| e.class == Stability::DestabilizingP1)
            .map(|e| e.comp)
            .collect();
        assert_eq!(destab.len(), 1, "{k} {d} {m1} {m2}");
        let contract = out
            .log
            .iter()
            .find_map(|s| match s {
                Step::Contract { singularity, order, .. } => Some((*singularity, *order)),
                _ => None,
            })
            .expect("one contraction");
        let q = k_prime(k, d) * d;
        let m = m1 as i64 - m2 as i64;
        let m = if m >= 0 {
            m
        } else {
            m + k as i64 * ((-m + k as i64 - 1) / k as i64)
        } as u64;
        let expected = contract_singularity(AnSing::from_stack(m, q), AnSing::from_stack(1, q)).unwrap();
        assert_eq!(contract, (expected, q));
        assert_eq!(expected.a, q as u64 * (m + 1));
    }
}
