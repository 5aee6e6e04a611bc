use proptest::prelude::*;

use ctpotts::duality::{dual_beta, dual_point, p_star, CoupledParams};
use ctpotts::mc::{ChainParams, ChainState};
use ctpotts::triangulation::text::{parse_text, to_text};
use ctpotts::triangulation::{CausalTriangulation, Orientation, Strip, TorusComplex};
use ctpotts::Side;

/// A word with `lower` U's and `upper` D's in an order fixed by `keys`.
fn word(lower: usize, upper: usize, keys: &[u32]) -> Vec<Orientation> {
    let mut w: Vec<(u32, Orientation)> = (0..lower)
        .map(|_| Orientation::Up)
        .chain((0..upper).map(|_| Orientation::Down))
        .zip(keys.iter().copied())
        .map(|(o, k)| (k, o))
        .collect();
    w.sort_by_key(|&(k, _)| k);
    w.into_iter().map(|(_, o)| o).collect()
}

fn first_up(w: &[Orientation], skip: usize) -> usize {
    let ups: Vec<usize> = (0..w.len()).filter(|&i| w[i] == Orientation::Up).collect();
    ups[skip % ups.len()]
}

prop_compose! {
    fn triangulation()(widths in prop::collection::vec(1usize..4, 1..4))
        (keys in prop::collection::vec(prop::collection::vec(any::<u32>(), 8), widths.len()),
         marks in prop::collection::vec(any::<usize>(), widths.len()),
         widths in Just(widths)) -> CausalTriangulation {
        let n = widths.len();
        let strips = (0..n)
            .map(|i| {
                let w = word(widths[i], widths[(i + 1) % n], &keys[i]);
                let m = first_up(&w, marks[i]);
                Strip::new(w, m).unwrap()
            })
            .collect();
        CausalTriangulation::build(strips).unwrap()
    }
}

proptest! {
    #[test]
    fn temperature_map_is_an_involution(beta in 0.01f64..8.0, q in 2.0f64..12.0) {
        let back = dual_beta(dual_beta(beta, q).unwrap(), q).unwrap();
        prop_assert!((back - beta).abs() <= 1e-9 * beta.max(1.0));
    }

    #[test]
    fn bond_duality_is_an_involution(p in 0.001f64..0.999, q in 2.0f64..12.0) {
        let back = p_star(p_star(p, q).unwrap(), q).unwrap();
        prop_assert!((back - p).abs() <= 1e-12);
    }

    #[test]
    fn dual_point_round_trips(beta in 0.05f64..5.0, mu in -5.0f64..5.0, q in 2.0f64..8.0) {
        let start = CoupledParams::primal(beta, mu, q).unwrap();
        let star = dual_point(start).unwrap();
        prop_assert_eq!(star.side, Side::Dual);
        let back = dual_point(star).unwrap();
        prop_assert_eq!(back.side, Side::Primal);
        prop_assert!((back.beta - beta).abs() <= 1e-9 * beta.max(1.0));
        prop_assert!((back.mu - mu).abs() <= 1e-8 * mu.abs().max(1.0));
    }

    #[test]
    fn canonical_form_is_rotation_invariant(lower in 1usize..5, upper in 1usize..5,
                                             keys in prop::collection::vec(any::<u32>(), 8),
                                             mark in any::<usize>(), shift in 0usize..8) {
        let w = word(lower, upper, &keys);
        let s = Strip::new(w.clone(), first_up(&w, mark)).unwrap();
        let c = s.canonical();
        prop_assert_eq!(c.mark(), 0);
        prop_assert_eq!(c.word()[0], Orientation::Up);
        prop_assert_eq!(&c, &s);
        // rotating the stored word together with the mark names the same strip
        let k = shift % w.len();
        let mut rotated = w.clone();
        rotated.rotate_left(k);
        let m = (s.mark() + w.len() - k) % w.len();
        prop_assert_eq!(Strip::new(rotated, m).unwrap(), s);
    }

    #[test]
    fn triangulations_are_tori(t in triangulation()) {
        prop_assert!(t.check_invariants().is_ok());
        // volume counts triangles; V - E + F = 0 on the torus
        let v: usize = t.widths().iter().sum();
        let g = t.graph();
        prop_assert_eq!(t.volume(), 2 * v);
        prop_assert_eq!(g.num_vertices(), v);
        prop_assert_eq!(g.num_edges(), 3 * v);
        prop_assert_eq!(t.faces().len(), 2 * v);
        let c = TorusComplex::new(t);
        prop_assert!(c.dual.back_map_is_bijection());
        prop_assert_eq!(c.dual.graph().num_vertices(), 2 * v);
        prop_assert_eq!(c.dual.graph().num_edges(), 3 * v);
    }

    #[test]
    fn text_dump_round_trips(t in triangulation()) {
        let k = t.widths().iter().copied().max().unwrap();
        let text = to_text([&t], k);
        let parsed = parse_text(&text).unwrap();
        prop_assert_eq!(parsed.len(), 1);
        prop_assert_eq!(parsed[0].0.strips(), t.strips());
        prop_assert_eq!(parsed[0].1, k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn checkpoint_resumes_the_same_chain(n in 1usize..4, seed in any::<u64>(), steps in 1usize..200) {
        let params = ChainParams { beta: 0.7, mu: 1.2, q: 3, k_max: 4 };
        let mut a = ChainState::new(n, params, seed).unwrap();
        for _ in 0..steps {
            a.step().unwrap();
        }
        let mut b = ChainState::from_checkpoint(&a.to_checkpoint().unwrap()).unwrap();
        for _ in 0..50 {
            a.step().unwrap();
            b.step().unwrap();
        }
        prop_assert_eq!(a.word_strings(), b.word_strings());
        prop_assert_eq!(a.energy(), b.energy());
        prop_assert_eq!(a.steps(), b.steps());
    }
}
