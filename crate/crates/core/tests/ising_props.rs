use gibbs_qaoa::ising::{
    classical_energy, gibbs_distribution, ground_set, parse_instance, toy_instance, toy_state_pairs,
    IsingInstance, SpinConfig,
};
use proptest::prelude::*;

const PAIRS: [(usize, usize); 10] = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

fn instance_strategy(max_n: usize, integral: bool) -> impl Strategy<Value = IsingInstance> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        let value = if integral {
            (-2i32..=2).prop_map(f64::from).boxed()
        } else {
            (-2.0f64..2.0).boxed()
        };
        (
            Just(n),
            proptest::collection::vec(value.clone(), pairs),
            proptest::collection::vec(value, n),
        )
            .prop_map(|(n, js, hs)| {
                let mut inst = IsingInstance::new(n).unwrap();
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if js[k] != 0.0 {
                            inst.set_coupling(i, j, js[k]).unwrap();
                        }
                        k += 1;
                    }
                }
                for (i, &h) in hs.iter().enumerate() {
                    if h != 0.0 {
                        inst.set_field(i, h).unwrap();
                    }
                }
                inst
            })
    })
}

fn zero_field(inst: &IsingInstance) -> IsingInstance {
    let mut out = IsingInstance::new(inst.n()).unwrap();
    for (&(i, j), &v) in inst.couplings() {
        out.set_coupling(i, j, v).unwrap();
    }
    out
}

proptest! {
    #[test]
    fn flip_symmetry_without_fields(inst in instance_strategy(12, false)) {
        let inst = zero_field(&inst);
        for idx in 0..inst.dim() {
            let s = SpinConfig(idx);
            prop_assert_eq!(classical_energy(&inst, s), classical_energy(&inst, s.flipped(inst.n())));
        }
    }

    #[test]
    fn ground_set_is_strict_minimum(inst in instance_strategy(8, true)) {
        let gs = ground_set(&inst).unwrap();
        prop_assert!(!gs.states.is_empty());
        prop_assert!(gs.states.windows(2).all(|w| w[0] < w[1]));
        for idx in 0..inst.dim() {
            let e = classical_energy(&inst, SpinConfig(idx));
            if gs.contains(SpinConfig(idx)) {
                prop_assert_eq!(e, gs.e0);
            } else {
                prop_assert!(e > gs.e0);
            }
        }
        if let Some(orbits) = &gs.orbits {
            let mut union: Vec<_> = orbits.iter().flatten().copied().collect();
            union.sort();
            prop_assert_eq!(&union, &gs.states);
            for orbit in orbits {
                prop_assert_eq!(orbit.len(), 2);
                prop_assert_eq!(orbit[1], orbit[0].flipped(inst.n()));
            }
        }
    }

    #[test]
    fn gibbs_normalized(inst in instance_strategy(8, false), log_t in -3.0f64..6.0) {
        let g = gibbs_distribution(&inst, 10f64.powf(log_t)).unwrap();
        prop_assert!((g.distribution.total() - 1.0).abs() <= 1e-12);
        prop_assert!(g.distribution.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn gibbs_ground_weight_monotone(inst in instance_strategy(7, true)) {
        let gs = ground_set(&inst).unwrap();
        let temps = [0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0, 10.0];
        let weights: Vec<f64> = temps
            .iter()
            .map(|&t| {
                let g = gibbs_distribution(&inst, t).unwrap();
                gs.states.iter().map(|&s| g.distribution.get(s)).sum()
            })
            .collect();
        for w in weights.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{:?}", weights);
        }
    }

    #[test]
    fn render_parse_round_trip(inst in instance_strategy(10, false)) {
        let text = inst.render();
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }
}

fn toy_ground_states() -> Vec<SpinConfig> {
    let mut v: Vec<_> = toy_state_pairs().iter().flatten().copied().collect();
    v.sort();
    v
}

#[test]
fn toy_edge_set_oracle() {
    // every 5-spin assignment with J in {-1, 0, 1} whose ground set is the
    // six published states at E0 = -4
    let target = toy_ground_states();
    let mut solutions = Vec::new();
    for code in 0..3usize.pow(10) {
        let mut inst = IsingInstance::new(5).unwrap();
        let mut c = code;
        for &(i, j) in &PAIRS {
            let v = (c % 3) as f64 - 1.0;
            c /= 3;
            if v != 0.0 {
                inst.set_coupling(i, j, v).unwrap();
            }
        }
        let gs = ground_set(&inst).unwrap();
        if gs.e0 == -4.0 && gs.states == target {
            solutions.push(inst);
        }
    }
    assert_eq!(solutions.len(), 2);
    assert!(solutions.contains(&toy_instance()));

    // the other solution is the toy with spins 4 and 5 swapped
    let mut swapped = IsingInstance::new(5).unwrap();
    let relabel = |k: usize| match k {
        3 => 4,
        4 => 3,
        k => k,
    };
    for (&(i, j), &v) in toy_instance().couplings() {
        let (a, b) = (relabel(i), relabel(j));
        swapped.set_coupling(a.min(b), a.max(b), v).unwrap();
    }
    assert!(solutions.contains(&swapped));

    for inst in &solutions {
        let ferro = inst.couplings().values().filter(|&&v| v == 1.0).count();
        let anti = inst.couplings().values().filter(|&&v| v == -1.0).count();
        assert_eq!((ferro, anti), (6, 2));
        let g = gibbs_distribution(inst, 1.0).unwrap();
        let pgs: f64 = target.iter().map(|&s| g.distribution.get(s)).sum();
        assert!((pgs - 0.835912).abs() < 1e-6);
    }
}

#[test]
fn toy_energy_table() {
    let toy = toy_instance();
    let table = toy.energy_table();
    let mut counts = std::collections::BTreeMap::new();
    for &e in &table {
        *counts.entry(e as i64).or_insert(0) += 1;
    }
    let expected: Vec<(i64, i32)> = vec![(-4, 6), (-2, 8), (0, 4), (2, 8), (4, 6)];
    assert_eq!(counts.into_iter().collect::<Vec<_>>(), expected);

    let s = SpinConfig::from_ket("uuudu").unwrap();
    assert_eq!(classical_energy(&toy, s), table[s.index()]);
    // flipping spin 4 breaks 3-4 and 4-5 and satisfies 2-4; 1-5 stays broken
    assert_eq!(classical_energy(&toy, s), -2.0);
}

#[test]
fn toy_gibbs_values() {
    let toy = toy_instance();
    let g = gibbs_distribution(&toy, 1.0).unwrap();
    let e = std::f64::consts::E;
    let z = 6.0 * e.powi(4) + 8.0 * e.powi(2) + 4.0 + 8.0 * e.powi(-2) + 6.0 * e.powi(-4);
    assert!((g.partition_function() - z).abs() < 1e-9 * z);
    assert!((g.partition_function() - 391.894).abs() < 1e-3);

    let hot = gibbs_distribution(&toy, 1e6).unwrap();
    assert!(hot.distribution.probs().iter().all(|&p| (p - 1.0 / 32.0).abs() < 1e-4));

    let one = IsingInstance::new(1).unwrap();
    for t in [0.01, 1.0, 100.0] {
        assert_eq!(gibbs_distribution(&one, t).unwrap().distribution.probs(), &[0.5, 0.5]);
    }
    assert!(gibbs_distribution(&toy, 0.0).is_err());
    assert!(gibbs_distribution(&toy, -1.0).is_err());
}

#[test]
fn toy_file_matches_builtin() {
    let text = "# toy\nn 5\nj 1 2 1\nj 1 3 1\nj 2 3 1\nj 3 4 1\nj 3 5 1\nj 4 5 1\nj 1 5 -1\nj 2 4 -1\n";
    let inst = parse_instance(text).unwrap();
    assert_eq!(inst, toy_instance());
    assert_eq!(inst.couplings().len(), 8);
}
