mod common;

use common::{brute_force_eps, brute_force_nondominated};
use flexhand_core::indicator::{eps_indicator, normalize, NormalizationContext};
use proptest::prelude::*;

fn front(k: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-100.0f64..100.0, k), 1..=max)
}

fn pair(max: usize) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    (1usize..=4).prop_flat_map(move |k| (front(k, max), front(k, max)))
}

proptest! {
    #[test]
    fn matches_triple_loop((p1, p2) in pair(50)) {
        let r = eps_indicator(&p1, &p2).unwrap();
        prop_assert_eq!(r.epsilon, brute_force_eps(&p1, &p2));
        prop_assert_eq!(r.recompute(&p1, &p2), r.epsilon);
    }

    #[test]
    fn self_distance_is_zero(p in (1usize..=4).prop_flat_map(|k| front(k, 30))) {
        let p = brute_force_nondominated(&p);
        prop_assert_eq!(eps_indicator(&p, &p).unwrap().epsilon, 0.0);
    }

    #[test]
    fn monotone_in_both_arguments((p1, p2) in pair(20), extra in prop::collection::vec(-100.0f64..100.0, 4)) {
        let k = p1[0].len();
        let e = eps_indicator(&p1, &p2).unwrap().epsilon;
        let mut more1 = p1.clone();
        more1.push(extra[..k].to_vec());
        prop_assert!(eps_indicator(&more1, &p2).unwrap().epsilon <= e);
        let mut more2 = p2.clone();
        more2.push(extra[..k].to_vec());
        prop_assert!(eps_indicator(&p1, &more2).unwrap().epsilon >= e);
    }

    #[test]
    fn translation_covariant((p1, p2) in pair(20), c in -10i32..10) {
        // integer-valued data keeps the shift exact in floating point
        let round = |f: &Vec<Vec<f64>>| f.iter().map(|p| p.iter().map(|v| v.round()).collect()).collect::<Vec<Vec<f64>>>();
        let (p1, p2) = (round(&p1), round(&p2));
        let c = c as f64;
        let shifted: Vec<Vec<f64>> = p1.iter().map(|p| p.iter().map(|v| v + c).collect()).collect();
        let e = eps_indicator(&p1, &p2).unwrap().epsilon;
        prop_assert_eq!(eps_indicator(&shifted, &p2).unwrap().epsilon, e + c);
    }

    #[test]
    fn normalized_values_span_unit_interval(p in front(2, 20)) {
        let ctx = NormalizationContext::from_points(&p, "s").unwrap();
        for q in &p {
            for i in 0..2 {
                let v = normalize(q[i], i, &ctx);
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
