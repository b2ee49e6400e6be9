//! Random-circuit experiments checked against direct simulation.

use dualcode::circuits::{
    gen_random_monitored_circuit, random_circuit, simulate_interleaved, Boundary, CircuitOp,
    CircuitSpec,
};
use dualcode::distill::distill_reference_qubit;
use dualcode::experiments::{
    decoupling_profile, derive_seed, observe_sample, spec_hash, state_independence_check,
    sweep_measurement_rate, write_csv, SweepConfig,
};
use dualcode::tableau::OutcomePolicy;
use dualcode::{Letter, PauliString, StabilizerTableau, SubsystemMask};
use num_traits::One;

fn spec(n: usize, depth: usize, p: f64, seed: u64) -> CircuitSpec {
    CircuitSpec::new(n, depth, p, Boundary::Open, seed).unwrap()
}

fn same_signed_state(a: &StabilizerTableau, b: &StabilizerTableau) -> bool {
    a.generators().len() == b.generators().len()
        && a.generators()
            .iter()
            .all(|g| b.expectation(g).unwrap() == 1)
}

#[test]
fn schedule_reproduces_interleaved_simulation() {
    let n = 8;
    for seed in 0..200 {
        let p = [0.1, 0.3, 0.6][seed as usize % 3];
        let circuit = random_circuit(&spec(n, 8, p, seed)).unwrap();
        let positions: Vec<usize> = (0..n).collect();

        let mut direct = StabilizerTableau::new_with_reference(n).with_seed(seed);
        let rec =
            simulate_interleaved(&mut direct, &circuit, &positions, OutcomePolicy::Sample).unwrap();

        let schedule = circuit.to_schedule();
        let mut evolved = StabilizerTableau::new_with_reference(n);
        evolved.apply_gates(&circuit.gates()).unwrap();
        let forced = evolved
            .run_schedule(&schedule, OutcomePolicy::Forced(&rec.outcomes))
            .unwrap();
        assert_eq!(forced.log2_prob, rec.log2_prob, "seed {seed}");
        assert!(same_signed_state(&direct, &evolved), "seed {seed}");
        for len in 1..=n {
            let cut = SubsystemMask::interval(2 * n, 0, len).unwrap();
            assert_eq!(
                direct.subsystem_entropy(&cut).unwrap(),
                evolved.subsystem_entropy(&cut).unwrap()
            );
        }
    }
}

#[test]
fn unmonitored_circuit_gives_empty_schedule() {
    assert!(gen_random_monitored_circuit(&spec(6, 6, 0.0, 3))
        .unwrap()
        .is_empty());
    let all = gen_random_monitored_circuit(&spec(6, 4, 1.0, 3)).unwrap();
    assert_eq!(all.len(), 24);
}

#[test]
fn product_and_mixed_starts_agree_on_single_sites() {
    let (n, samples) = (64, 40);
    let a = SubsystemMask::new(n, [n / 2]).unwrap();
    let (mut equal, mut entangled) = (0, 0);
    for sample in 0..samples {
        let r = state_independence_check(&spec(n, 2 * n, 0.05, 100 + sample), &a).unwrap();
        if r.entropy_equal && r.fidelity_equal {
            equal += 1;
        }
        if r.s_cond_mixed == -1 && r.s_cond_product == -1 {
            entangled += 1;
        }
        if r.i_ar == 0 {
            assert!(r.entropy_equal && r.fidelity_equal, "sample {sample}");
            assert!([-1, 0].contains(&r.s_cond_mixed), "sample {sample}");
        }
    }
    println!("equal {equal}/{samples}, S_A|B = -1 in {entangled}/{samples}");
    assert!(equal as f64 >= 0.95 * samples as f64, "{equal}/{samples}");
}

#[test]
fn reference_qubit_survives_weak_monitoring() {
    let (n, runs) = (16, 200);
    let mut perfect = 0;
    for r in 0..runs {
        let seed = derive_seed(77, r);
        let encoding = random_circuit(&spec(n, n, 0.0, seed)).unwrap().gates();
        let circuit = random_circuit(&spec(n, n, 0.02, derive_seed(seed, 1))).unwrap();
        let res = distill_reference_qubit(n, &encoding, circuit.ops(), seed).unwrap();
        if res.fidelity().is_one() {
            perfect += 1;
        }
    }
    assert!(perfect as f64 >= 0.99 * runs as f64, "{perfect}/{runs}");
}

#[test]
fn reference_qubit_examples() {
    let n = 4;
    let encoding = random_circuit(&spec(n, n, 0.0, 5)).unwrap().gates();
    let res = distill_reference_qubit(n, &encoding, &[], 1).unwrap();
    assert!(res.fidelity().is_one());
    assert!(res.feedback.is_identity());
    let measure_all: Vec<CircuitOp> = (0..n)
        .map(|q| CircuitOp::Measure(PauliString::single(n, q, Letter::Z)))
        .collect();
    for seed in 0..8 {
        let res = distill_reference_qubit(n, &encoding, &measure_all, seed).unwrap();
        assert!(res.fidelity() <= dualcode::distill::Dyadic::new(1, 2));
    }
}

#[test]
fn profile_without_measurements_is_fully_entangled() {
    let n = 12;
    let profile = decoupling_profile(&spec(n, n, 0.0, 9), 3).unwrap();
    for row in &profile.rows {
        assert_eq!(row.i_ar, 2.0 * row.len as f64);
    }
}

#[test]
fn final_full_measurement_decouples_everything() {
    let n = 10;
    let circuit = random_circuit(&spec(n, n, 0.0, 4)).unwrap();
    let mut t = StabilizerTableau::new_with_reference(n).with_seed(4);
    let positions: Vec<usize> = (0..n).collect();
    simulate_interleaved(&mut t, &circuit, &positions, OutcomePolicy::Sample).unwrap();
    for q in 0..n {
        t.measure(&PauliString::single(2 * n, q, Letter::Z), None)
            .unwrap();
    }
    let r = SubsystemMask::interval(2 * n, n, n).unwrap();
    let s_r = t.subsystem_entropy(&r).unwrap();
    for len in 1..=n {
        let a = SubsystemMask::interval(2 * n, 0, len).unwrap();
        let ar = SubsystemMask::new(2 * n, (0..len).chain(n..2 * n)).unwrap();
        let i_ar = t.subsystem_entropy(&a).unwrap() + s_r - t.subsystem_entropy(&ar).unwrap();
        assert_eq!(i_ar, 0);
    }
}

#[test]
fn sweep_limits() {
    let cfg = SweepConfig {
        ns: vec![8, 16],
        ps: vec![0.0, 1.0],
        samples: 2,
        depth: None,
        boundary: Boundary::Periodic,
        seed: 11,
    };
    let records = sweep_measurement_rate(&cfg).unwrap();
    assert_eq!(records.len(), 8);
    for r in &records {
        if r.p == 0.0 {
            assert_eq!(r.s_half_final as usize, r.n / 2);
        } else {
            assert!(r.s_half_final <= 1);
            assert_eq!(r.s_r, 0);
        }
    }
}

#[test]
fn sweep_records_regenerate_from_their_seeds() {
    let cfg = SweepConfig {
        ns: vec![12],
        ps: vec![0.1, 0.2],
        samples: 3,
        depth: Some(12),
        boundary: Boundary::Open,
        seed: 5,
    };
    let first = sweep_measurement_rate(&cfg).unwrap();
    let second = sweep_measurement_rate(&cfg).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    write_csv(&first, &mut a).unwrap();
    write_csv(&second, &mut b).unwrap();
    assert_eq!(a, b);
    for r in &first {
        let s = CircuitSpec::new(r.n, r.depth, r.p, r.boundary, r.seed).unwrap();
        assert_eq!(spec_hash(&s), r.spec_hash);
        let obs = observe_sample(&s).unwrap();
        assert_eq!(obs.s_half_final, r.s_half_final);
        assert_eq!(obs.s_r, r.s_r);
        assert_eq!(obs.decoupled_sites, r.decoupled_sites);
    }
}
