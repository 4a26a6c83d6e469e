mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use common::{bits, bitstring, enumerate_min, random_bits, rel_close, Dense};
use qubo_tabu::angle_opt::{optimize_angles, subproblem_quality_ratio, OptBudget};
use qubo_tabu::bench::{compute_ecdf, EcdfRun};
use qubo_tabu::qaoa::{penalty_diagonal, PenaltySpec, QaoaSimulator};
use qubo_tabu::qubo::orlib::{parse_orlib, write_orlib};
use qubo_tabu::samplers::{
    brute_force_best, BruteForce, NeighborhoodSampler, SaConfig, SamplerContext, SamplerError,
    SimulatedAnnealing,
};
use qubo_tabu::tabu::{
    basic_tabu_search, sampler_tabu_search, select_variables, RunTrace, SelectionMode, TabuError,
    TabuParams,
};
use qubo_tabu::{seeded_rng, BitString, MoveTable, SearchRng, SubProblem};

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn selection(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut r = rng(seed);
    let mut s = rand::seq::index::sample(&mut r, n, k).into_vec();
    s.sort_unstable();
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn move_values_match_two_point_evaluation(n in 1usize..=12, density in 0.0f64..=1.0, seed: u64) {
        let d = Dense::random(n, density, 10.0, false, seed);
        let x = random_bits(n, &mut rng(seed ^ 1));
        let table = MoveTable::new(&d.qubo(), &bitstring(&x)).unwrap();
        let base = d.eval(&x);
        for i in 0..n {
            let mut y = x.clone();
            y[i] = !y[i];
            prop_assert!(rel_close(table.get(i), d.eval(&y) - base, 1e-9));
        }
    }

    #[test]
    fn flip_sequences_track_fresh_tables(n in 1usize..=64, density in 0.0f64..=1.0, seed: u64, len in 1usize..100) {
        let d = Dense::random(n, density, 10.0, false, seed);
        let q = d.qubo();
        let mut r = rng(seed ^ 2);
        let mut x = bitstring(&random_bits(n, &mut r));
        let mut table = MoveTable::new(&q, &x).unwrap();
        for _ in 0..len {
            table.apply_flip(&q, &mut x, r.gen_range(0..n)).unwrap();
        }
        let fresh = MoveTable::new(&q, &x).unwrap();
        for i in 0..n {
            prop_assert!(rel_close(table.get(i), fresh.get(i), 1e-9));
        }
    }

    #[test]
    fn ising_conversion_roundtrip(n in 1usize..=10, density in 0.0f64..=1.0, seed: u64) {
        let d = Dense::random(n, density, 10.0, false, seed);
        let ising = d.qubo().to_ising();
        for b in 0..1usize << n {
            let x = bits(b, n);
            // spin +1 is bit 0
            let s: Vec<f64> = x.iter().map(|&v| if v { -1.0 } else { 1.0 }).collect();
            prop_assert!(rel_close(ising.energy(&s) + ising.offset, d.eval(&x), 1e-9));
        }
    }

    #[test]
    fn clamped_subproblems_agree_with_parent(n in 1usize..=12, density in 0.0f64..=1.0, seed: u64, kf in 0.0f64..1.0) {
        let k = 1 + ((n.min(10) as f64 - 1.0) * kf).round() as usize;
        let d = Dense::random(n, density, 10.0, false, seed);
        let reference = random_bits(n, &mut rng(seed ^ 3));
        let selected = selection(n, k, seed ^ 4);
        let sub = d.qubo().clamp(&bitstring(&reference), &selected).unwrap();
        for b in 0..1usize << k {
            let y = bits(b, k);
            let mut x = reference.clone();
            for (l, &p) in selected.iter().enumerate() {
                x[p] = y[l];
            }
            prop_assert!(rel_close(sub.reduced().evaluate(&bitstring(&y)).unwrap(), d.eval(&x), 1e-9));
        }
    }

    #[test]
    fn orlib_writer_roundtrips(n in 1usize..=30, density in 0.0f64..=1.0, seed: u64) {
        let a = Dense::random(n, density, 50.0, true, seed).qubo();
        let b = Dense::random(n, density, 50.0, true, seed ^ 5).qubo();
        let parsed = parse_orlib(&write_orlib(&[a.clone(), b.clone()])).unwrap();
        prop_assert_eq!(parsed.len(), 2);
        for (orig, back) in [a, b].iter().zip(&parsed) {
            let t1: Vec<_> = orig.terms().collect();
            let t2: Vec<_> = back.terms().collect();
            prop_assert_eq!(t1, t2);
        }
    }
}

/// Replays a trace with independent tabu bookkeeping (rTT = 0) and checks
/// that every flipped variable was admissible, returning the replayed states.
fn replay(d: &Dense, trace: &RunTrace, tenure: usize) -> Result<(), TestCaseError> {
    let n = d.n;
    let mut x = vec![false; n];
    let mut tabu = vec![0usize; n];
    let mut best = d.eval(&x);
    for w in trace.records.windows(2) {
        let (prev, rec) = (&w[0], &w[1]);
        let new_best = rec.f_best < prev.f_best;
        // the engine may take a tabu move only when it produces a new best
        for &j in &rec.flipped {
            prop_assert!(
                tabu[j] == 0 || new_best || rec.accepted,
                "tabu variable {} flipped",
                j
            );
        }
        for &j in &rec.flipped {
            x[j] = !x[j];
        }
        prop_assert!(rel_close(d.eval(&x), rec.f_ts, 1e-9));
        best = best.min(d.eval(&x));
        prop_assert!(rel_close(best, rec.f_best, 1e-9));
        for t in tabu.iter_mut().filter(|t| **t > 0) {
            *t -= 1;
        }
        for &j in &rec.flipped {
            tabu[j] = if new_best { 0 } else { tenure };
        }
    }
    Ok(())
}

/// Always proposes the worst assignment of the subproblem.
struct Worst;

impl NeighborhoodSampler for Worst {
    fn sample_best(
        &mut self,
        sub: &SubProblem,
        _: &SamplerContext,
        _: &mut SearchRng,
    ) -> Result<BitString, SamplerError> {
        let k = sub.k();
        let (b, _) = enumerate_min(|y| -sub.reduced().evaluate(&bitstring(y)).unwrap(), k);
        Ok(BitString::from_index(b, k))
    }

    fn label(&self) -> String {
        "worst".into()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basic_search_obeys_tabu_and_tracks_best(n in 4usize..=30, density in 0.1f64..=1.0, seed: u64, tenure in 0usize..4) {
        let d = Dense::random(n, density, 10.0, true, seed);
        let q = d.qubo();
        let params = TabuParams { tenure, max_iters: 60, ..Default::default() };
        let out = basic_tabu_search(&q, &BitString::zeros(n), &params).unwrap();
        let series = out.trace.best_series();
        prop_assert!(series.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(out.best_value, q.evaluate(&out.best).unwrap());
        prop_assert_eq!(*series.last().unwrap(), out.best_value);
        replay(&d, &out.trace, tenure)?;
    }

    #[test]
    fn brute_force_driven_never_worse_than_one_flip(n in 4usize..=14, density in 0.1f64..=1.0, seed: u64, k in 1usize..=6) {
        let d = Dense::random(n, density, 10.0, true, seed);
        let q = d.qubo();
        let tenure = 1;
        let params = TabuParams { tenure, max_iters: 25, k: Some(k.min(n)), ..Default::default() };
        let out = sampler_tabu_search(&q, &BitString::zeros(n), &params, &mut BruteForce).unwrap();
        replay(&d, &out.trace, tenure)?;
        // reconstruct states and compare with the admissible one-flip value
        let mut x = vec![false; n];
        let mut tabu = vec![0usize; n];
        for w in out.trace.records.windows(2) {
            let (prev, rec) = (&w[0], &w[1]);
            let fx = d.eval(&x);
            let one_flip = (0..n)
                .filter(|&i| tabu[i] == 0)
                .map(|i| {
                    let mut y = x.clone();
                    y[i] = !y[i];
                    d.eval(&y)
                })
                .fold(f64::INFINITY, f64::min);
            if one_flip.is_finite() {
                prop_assert!(rec.f_ts <= one_flip + 1e-9 * fx.abs().max(1.0));
            }
            for &j in &rec.flipped {
                x[j] = !x[j];
            }
            let new_best = rec.f_best < prev.f_best;
            for t in tabu.iter_mut().filter(|t| **t > 0) {
                *t -= 1;
            }
            for &j in &rec.flipped {
                tabu[j] = if new_best { 0 } else { tenure };
            }
        }
    }

    #[test]
    fn losing_sampler_reproduces_basic_search(n in 3usize..=16, density in 0.1f64..=1.0, seed: u64, rtt in 0usize..3, k in 1usize..=4) {
        let q = Dense::random(n, density, 10.0, true, seed).qubo();
        let params = TabuParams { tenure: 1, rand_tenure: rtt, max_iters: 30, seed, k: Some(k.min(n)), ..Default::default() };
        let x0 = BitString::zeros(n);
        let basic = basic_tabu_search(&q, &x0, &params);
        let driven = sampler_tabu_search(&q, &x0, &params, &mut Worst);
        match (basic, driven) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.trace.records.len(), b.trace.records.len());
                for (ra, rb) in a.trace.records.iter().zip(&b.trace.records) {
                    prop_assert_eq!(ra.f_ts, rb.f_ts);
                    prop_assert_eq!(ra.f_best, rb.f_best);
                    prop_assert_eq!(&ra.flipped, &rb.flipped);
                    prop_assert!(!rb.accepted);
                }
            }
            (Err(TabuError::AllTabu { iteration: i, .. }), Err(TabuError::AllTabu { iteration: j, .. })) => prop_assert_eq!(i, j),
            (a, b) => prop_assert!(false, "outcomes differ: {:?} vs {:?}", a.map(|o| o.best_value), b.map(|o| o.best_value)),
        }
    }

    #[test]
    fn oversized_tenure_is_reported(n in 1usize..=10, density in 0.0f64..=1.0, seed: u64) {
        let q = Dense::random(n, density, 10.0, true, seed).qubo();
        let params = TabuParams { tenure: 1000, max_iters: 5000, ..Default::default() };
        let out = basic_tabu_search(&q, &BitString::zeros(n), &params);
        prop_assert!(matches!(out, Err(TabuError::AllTabu { .. })), "{:?}", out.map(|o| o.trace.iterations()));
    }

    #[test]
    fn searches_are_deterministic(n in 8usize..=16, seed: u64) {
        let q = Dense::random(n, 0.5, 10.0, true, seed).qubo();
        let params = TabuParams { tenure: 2, rand_tenure: 2, max_iters: 20, seed, k: Some(3), selection: SelectionMode::WeightedRandom, ..Default::default() };
        let x0 = BitString::zeros(n);
        let sa = SaConfig { steps: 30, restarts: 2, ..Default::default() };
        let a = sampler_tabu_search(&q, &x0, &params, &mut SimulatedAnnealing(sa)).unwrap();
        let b = sampler_tabu_search(&q, &x0, &params, &mut SimulatedAnnealing(sa)).unwrap();
        prop_assert_eq!(a.trace, b.trace);
        let a = basic_tabu_search(&q, &x0, &params).unwrap();
        let b = basic_tabu_search(&q, &x0, &params).unwrap();
        prop_assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn weighted_selection_is_seeded_and_admissible(n in 1usize..=30, seed: u64, kf in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let deltas: Vec<f64> = (0..n).map(|_| r.gen_range(-10.0..10.0)).collect();
        let tabu: Vec<usize> = (0..n).map(|_| if r.gen_bool(0.3) { 2 } else { 0 }).collect();
        let free = tabu.iter().filter(|&&t| t == 0).count();
        let k = ((free as f64) * kf).floor() as usize;
        prop_assume!(k >= 1);
        let a = select_variables(&deltas, &tabu, k, SelectionMode::WeightedRandom, &mut seeded_rng(seed, 0)).unwrap();
        let b = select_variables(&deltas, &tabu, k, SelectionMode::WeightedRandom, &mut seeded_rng(seed, 0)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), k);
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(a.iter().all(|&i| tabu[i] == 0));
    }
}

fn random_angles(p: usize, r: &mut ChaCha20Rng) -> (Vec<f64>, Vec<f64>) {
    let g = (0..p).map(|_| r.gen_range(-4.0..4.0)).collect();
    let b = (0..p).map(|_| r.gen_range(-4.0..4.0)).collect();
    (g, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn layers_preserve_norm_and_compose(k in 1usize..=10, p in 1usize..=4, seed: u64, penalized: bool) {
        let q = Dense::random(k, 0.6, 5.0, false, seed).qubo();
        let mut r = rng(seed);
        let mut sim = QaoaSimulator::for_qubo(&q).unwrap();
        if penalized {
            let w: Vec<f64> = (0..k).map(|_| r.gen_range(-3.0..3.0)).collect();
            let spec = PenaltySpec::new(w, bitstring(&random_bits(k, &mut r)), 1.5).unwrap();
            sim = sim.with_penalty(&spec).unwrap();
        }
        let (g, b) = random_angles(p, &mut r);
        let mut st = sim.uniform_state();
        for i in 0..p {
            st.apply_layer(g[i], b[i], sim.penalty());
            prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-10);
        }
        let direct = sim.evolve(&g, &b).unwrap();
        for (a, c) in st.amplitudes().iter().zip(direct.amplitudes()) {
            prop_assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_phases_commute(k in 1usize..=8, seed: u64) {
        let q = Dense::random(k, 0.6, 5.0, false, seed).qubo();
        let mut r = rng(seed);
        let w: Vec<f64> = (0..k).map(|_| r.gen_range(-3.0..3.0)).collect();
        let pen = penalty_diagonal(&PenaltySpec::new(w, bitstring(&random_bits(k, &mut r)), 0.7).unwrap()).unwrap();
        let sim = QaoaSimulator::for_qubo(&q).unwrap();
        // a mixed start state so the phases are not trivially global
        let mut start = sim.uniform_state();
        start.apply_mixer(0.3);
        start.apply_phase(0.9, sim.energies());
        start.apply_mixer(1.1);
        let gamma = r.gen_range(-3.0..3.0);
        let mut a = start.clone();
        a.apply_phase(gamma, sim.energies());
        a.apply_phase(gamma, &pen);
        let mut b = start;
        b.apply_phase(gamma, &pen);
        b.apply_phase(gamma, sim.energies());
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn penalty_difference_identity(k in 1usize..=6, seed: u64, scale in 0.0f64..5.0) {
        let mut r = rng(seed);
        let w: Vec<f64> = (0..k).map(|_| r.gen_range(-5.0..5.0)).collect();
        let reference = random_bits(k, &mut r);
        let diag = penalty_diagonal(&PenaltySpec::new(w.clone(), bitstring(&reference), scale).unwrap()).unwrap();
        let b_ts = bitstring(&reference).to_index();
        for b in 0..1usize << k {
            let flipped: f64 = (0..k).filter(|&j| ((b ^ b_ts) >> j) & 1 == 1).map(|j| w[j]).sum();
            prop_assert!((diag[b] - diag[b_ts] - scale * flipped).abs() < 1e-12);
        }
    }

    #[test]
    fn improvement_probability_is_a_monotone_probability(k in 1usize..=8, seed: u64) {
        let q = Dense::random(k, 0.6, 5.0, true, seed).qubo();
        let sim = QaoaSimulator::for_qubo(&q).unwrap();
        let (g, b) = random_angles(2, &mut rng(seed));
        let st = sim.evolve(&g, &b).unwrap();
        let mut levels: Vec<f64> = st.energies().to_vec();
        levels.sort_by(f64::total_cmp);
        let mut last = 0.0;
        for f in levels {
            let p = st.improvement_probability(f + 0.5);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
            prop_assert!(p >= last - 1e-15);
            last = p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn optimizer_contract(seed: u64, p in 1usize..=3, max_evals in 1usize..300) {
        let target: Vec<f64> = (0..2 * p).map(|i| 0.3 * i as f64 + 0.5).collect();
        let f = |x: &[f64]| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        let budget = OptBudget { max_evals, seed, ..Default::default() };
        let a = optimize_angles(f, p, &budget).unwrap();
        let b = optimize_angles(f, p, &budget).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.evals_used <= max_evals);
        prop_assert_eq!(a.evals_used, a.history.len());
        let min = a.history.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(a.best_value, min);
        // the first evaluation is the zero vector
        prop_assert!(a.history[0].angles.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn optimized_state_never_worse_than_uniform(seed: u64) {
        let q = Dense::random(4, 0.8, 5.0, false, seed).qubo();
        let sim = QaoaSimulator::for_qubo(&q).unwrap();
        let mean = sim.uniform_state().exact_expectation();
        let budget = OptBudget { max_evals: 60, seed, ..Default::default() };
        let r = optimize_angles(|a: &[f64]| sim.evolve_flat(a).unwrap().exact_expectation(), 1, &budget).unwrap();
        prop_assert!(r.best_value <= mean + 1e-12);
    }

    #[test]
    fn quality_ratio_in_unit_interval(seed: u64) {
        let d = Dense::random(4, 0.8, 5.0, true, seed);
        let sub = d.qubo().clamp(&BitString::zeros(4), &[0, 1, 2, 3]).unwrap();
        let best = brute_force_best(&sub).unwrap();
        let opt = sub.reduced().evaluate(&best).unwrap();
        prop_assert_eq!(subproblem_quality_ratio(&sub, opt).unwrap(), 1.0);
        for b in 0..16 {
            let v = d.eval(&bits(b, 4));
            let r = subproblem_quality_ratio(&sub, v).unwrap();
            prop_assert!(r > 0.0 && r <= 1.0);
        }
    }

    #[test]
    fn ecdf_curves_are_monotone(seed: u64, runs in 1usize..6, targets in 2usize..20) {
        let mut r = rng(seed);
        let runs: Vec<EcdfRun> = (0..runs)
            .map(|i| {
                let len = r.gen_range(1..40);
                let mut v = r.gen_range(-10.0..10.0);
                let best = (0..len)
                    .map(|_| {
                        v -= r.gen_range(0.0..1.0) * r.gen_range(0.0..2.0f64).floor();
                        v
                    })
                    .collect();
                EcdfRun { problem: format!("p{}", i % 2), best }
            })
            .collect();
        let report = compute_ecdf(&runs, &BTreeMap::new(), targets).unwrap();
        prop_assert!(report.curve.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(report.curve.iter().all(|v| (0.0..=1.0).contains(v)));
        // every run's start meets its problem's highest target
        prop_assert!(report.curve[0] > 0.0);
    }
}
