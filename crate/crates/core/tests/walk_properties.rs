use proptest::prelude::*;

use unitriwalk::east::EastFlavor;
use unitriwalk::exact::{east_generator, discrete_distribution, transient, walk_generator, identity_index, DistVector};
use unitriwalk::gfq::{FieldVector, Matrix, Modulus, UnitriMatrix};
use unitriwalk::walk::{
    evolve_forward, evolve_forward_until, expansion_reconstruct, inner_chain, simulate_discrete_lazy_indexed,
    BackwardPath, EventLog,
};

fn m(q: u32) -> Modulus {
    Modulus::new(q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expansion_reproduces_forward(n in 3usize..=8, qi in 0usize..3, seed in 1u64..u64::MAX) {
        let q = [2, 3, 5][qi];
        let log = EventLog::sample(n, m(q), 10.0, seed).unwrap();
        prop_assert_eq!(expansion_reconstruct(&log.split()).unwrap(), evolve_forward(&log));
    }

    #[test]
    fn recursion_and_induction_forms(n in 3usize..=6, qi in 0usize..3, seed in 1u64..u64::MAX) {
        let q = [2, 3, 5][qi];
        let log = EventLog::sample(n, m(q), 4.0, seed).unwrap();
        let split = log.split();
        let path = BackwardPath::new(&split);
        let horizon = log.horizon();
        let e = Matrix::elementary(n, n - 2, n - 1, m(q)).unwrap();
        let id = Matrix::identity(n, m(q));
        let mut prev_s = 0.0;
        let mut prev_x = UnitriMatrix::identity(n, m(q));
        for (l, ev) in split.last_events().iter().enumerate() {
            let s = ev.time;
            let x = evolve_forward_until(&log, s);
            let bump = id.add(&e.scale(ev.scalar)).unwrap();
            let y = path.between(horizon - s, horizon - prev_s).unwrap();
            let recursion = bump.mul(y.as_matrix()).unwrap().mul(prev_x.as_matrix()).unwrap();
            prop_assert_eq!(&recursion, x.as_matrix());

            let mut induction = path.between(horizon - s, horizon).unwrap().into_matrix();
            for ek in &split.last_events()[..=l] {
                let term = path.between(horizon - s, horizon - ek.time).unwrap();
                induction = induction.add(&term.as_matrix().mul(&e).unwrap().scale(ek.scalar)).unwrap();
            }
            prop_assert_eq!(&induction, x.as_matrix());
            prev_s = s;
            prev_x = x;
        }
    }

    #[test]
    fn leading_block_is_the_restricted_walk(n in 3usize..=8, k in 2usize..=8, seed in 1u64..u64::MAX) {
        let k = k.min(n);
        let log = EventLog::sample(n, m(3), 5.0, seed).unwrap();
        let restricted = log.restrict(k).unwrap();
        prop_assert_eq!(evolve_forward(&log).leading_block(k), evolve_forward(&restricted));
    }

    #[test]
    fn backward_semigroup(n in 3usize..=6, seed in 1u64..u64::MAX, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let log = EventLog::sample(n, m(5), 3.0, seed).unwrap();
        let split = log.split();
        let path = BackwardPath::new(&split);
        let (t1, t2) = (3.0 * a.min(b), 3.0 * a.max(b));
        let composed = path.at(t1).unwrap().mul(&path.between(t1, t2).unwrap()).unwrap();
        prop_assert_eq!(composed, path.at(t2).unwrap());
        prop_assert!(path.at(0.0).unwrap().is_identity());
        prop_assert!(path.between(t1, t1).unwrap().is_identity());
    }

    #[test]
    fn inner_chain_frozen_coordinates(n in 3usize..=7, lead in 0usize..6, seed in 1u64..u64::MAX) {
        let lead = lead.min(n - 2);
        let q = 3;
        let mut b = vec![0u32; n];
        b[lead] = 2;
        for (i, x) in b.iter_mut().enumerate().take(n - 1).skip(lead + 1) {
            *x = (seed >> i) as u32 % q;
        }
        let log = EventLog::sample(n, m(q), 4.0, seed).unwrap();
        let z = inner_chain(&FieldVector::from_entries(b, m(q)), &log.split()).unwrap();
        prop_assert_eq!(z.leading(), lead);
        let path = z.path();
        prop_assert_eq!(path.initial()[lead], 1);
        for c in path.changes() {
            prop_assert!(c.site > lead && c.site < n - 1);
        }
    }
}

#[test]
fn logs_are_deterministic() {
    let a = EventLog::sample(6, m(3), 7.0, 99).unwrap();
    let b = EventLog::sample(6, m(3), 7.0, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(evolve_forward(&a), evolve_forward(&b));
    assert_ne!(a, EventLog::sample(6, m(3), 7.0, 100).unwrap());
}

#[test]
fn poisson_event_statistics() {
    let (n, horizon, runs) = (5usize, 3.0, 10_000u64);
    let mut total = 0.0;
    let mut per_clock = vec![0u64; n - 1];
    for j in 0..runs {
        let log = EventLog::sample_indexed(n, m(2), horizon, 17, j).unwrap();
        total += log.events().len() as f64;
        for e in log.events() {
            per_clock[e.clock] += 1;
        }
    }
    let mean = (n - 1) as f64 * horizon;
    let sigma = (mean / runs as f64).sqrt();
    assert!((total / runs as f64 - mean).abs() < 3.0 * sigma);
    let rings: u64 = per_clock.iter().sum();
    let expected = rings as f64 / (n - 1) as f64;
    let chi2: f64 = per_clock.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 3 degrees of freedom; the 0.999 quantile is 16.27.
    assert!(chi2 < 16.27, "chi2 = {chi2}");

    let runs = 100_000u64;
    let empty = (0..runs)
        .filter(|&j| EventLog::sample_indexed(2, m(2), 1.0, 18, j).unwrap().events().is_empty())
        .count() as f64;
    let p = (-1.0f64).exp();
    assert!((empty / runs as f64 - p).abs() < 3.0 * (p * (1.0 - p) / runs as f64).sqrt());
}

#[test]
fn inner_chain_law_matches_east() {
    // b = e_0 at n = 4: coordinates 0..3 of Z_T run the 3-site q-state East model.
    let (n, q, horizon, runs) = (4usize, 2u32, 10.0, 100_000u64);
    let (space, gen) = east_generator(3, EastFlavor::qstate(q).unwrap()).unwrap();
    let start = DistVector::point_mass(space.size(), space.east_index(&[1, 0, 0]));
    let exact = transient(&gen, start.as_slice(), horizon).unwrap();
    let mut counts = vec![0u64; space.size()];
    let b = FieldVector::basis(n, 0, m(q));
    for j in 0..runs {
        let log = EventLog::sample_indexed(n, m(q), horizon, 23, j).unwrap();
        let z = inner_chain(&b, &log.split()).unwrap().path().final_state();
        assert_eq!(z[n - 1], 0);
        counts[space.east_index(&z[..3])] += 1;
    }
    for (x, &c) in counts.iter().enumerate() {
        let p = exact[x];
        let sigma = (p * (1.0 - p) / runs as f64).sqrt();
        assert!((c as f64 / runs as f64 - p).abs() < 4.0 * sigma + 1e-9, "state {x}: {c} vs {p}");
    }
}

#[test]
fn discrete_walk_matches_transition_powers() {
    let (n, q, runs) = (3usize, 2u32, 100_000u64);
    let (space, gen) = walk_generator(n, q).unwrap();
    let start = DistVector::point_mass(space.size(), identity_index(&space));
    for steps in [1usize, 3, 10, 50] {
        let exact = discrete_distribution(&gen, start.as_slice(), steps, (n - 1) as f64).unwrap();
        let mut counts = vec![0u64; space.size()];
        for j in 0..runs {
            let x = simulate_discrete_lazy_indexed(n, m(q), steps, 31 + steps as u64, j).unwrap();
            counts[space.matrix_index(&x)] += 1;
        }
        for (x, &c) in counts.iter().enumerate() {
            let p = exact[x];
            let sigma = (p * (1.0 - p) / runs as f64).sqrt();
            assert!((c as f64 / runs as f64 - p).abs() < 4.0 * sigma + 1e-9, "steps {steps} state {x}");
        }
        let tv = 0.5 * counts.iter().map(|&c| (c as f64 / runs as f64 - 1.0 / 8.0).abs()).sum::<f64>();
        let exact_tv = 0.5 * exact.iter().map(|p| (p - 1.0 / 8.0).abs()).sum::<f64>();
        assert!((tv - exact_tv).abs() < 0.01, "steps {steps}: {tv} vs {exact_tv}");
    }
}
