//! The continuous-time walk on `G_n(q)`, its lazy discrete version, and the
//! backward column process used to split off the last column.
//!
//! Clock `i` (0-based, `i < n - 1`) rings at rate 1 and multiplies the state
//! on the left by `I + a E_{i,i+1}` with `a` uniform in `Z_q`.

mod backward;
mod log;

pub use backward::{expansion_reconstruct, inner_chain, sweep_backward, BackwardPath, ZTrajectory};
pub use log::{Event, EventLog, SplitLog};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gfq::{Modulus, UnitriMatrix, Unitriangular};
use crate::rng::{stream_rng, WALK_STREAM};

/// Applies the events of `log` with time `<= t` to `start`, in time order.
pub fn apply_until<M: Unitriangular>(start: &mut M, log: &EventLog, t: f64) {
    for e in log.events().iter().take_while(|e| e.time <= t) {
        start.add_row_multiple(e.clock, e.scalar);
    }
}

/// `X_T` started from the identity.
pub fn evolve_forward(log: &EventLog) -> UnitriMatrix {
    evolve_forward_until(log, f64::INFINITY)
}

/// `X_t` started from the identity, using the prefix of the log up to `t`.
pub fn evolve_forward_until(log: &EventLog, t: f64) -> UnitriMatrix {
    let mut x = UnitriMatrix::identity(log.n(), log.modulus());
    apply_until(&mut x, log, t);
    x
}

/// `Y_t` of the split log.
pub fn evolve_backward(split: &SplitLog, t: f64) -> Result<UnitriMatrix> {
    BackwardPath::new(split).at(t)
}

/// `steps` steps of the discrete walk: each picks a uniform clock and a
/// uniform scalar (zero included, which makes the `q = 2` walk lazy).
pub fn simulate_discrete_lazy(
    n: usize,
    modulus: Modulus,
    steps: usize,
    seed: u64,
) -> Result<UnitriMatrix> {
    simulate_discrete_lazy_indexed(n, modulus, steps, seed, 0)
}

pub fn simulate_discrete_lazy_indexed(
    n: usize,
    modulus: Modulus,
    steps: usize,
    seed: u64,
    index: u64,
) -> Result<UnitriMatrix> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need n >= 2, got {n}")));
    }
    let mut rng = stream_rng(seed, WALK_STREAM ^ 0xd15c, index);
    let mut x = UnitriMatrix::identity(n, modulus);
    for _ in 0..steps {
        let i = rng.random_range(0..n - 1);
        let a = rng.random_range(0..modulus.get());
        x.add_row_multiple(i, a);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfq::{FieldVector, Matrix};

    fn m(q: u32) -> Modulus {
        Modulus::new(q).unwrap()
    }

    fn ev(time: f64, clock: usize, scalar: u32) -> Event {
        Event { time, clock, scalar }
    }

    #[test]
    fn forward_examples() {
        let empty = EventLog::from_events(3, m(2), 1.0, vec![]).unwrap();
        assert!(evolve_forward(&empty).is_identity());

        let one = EventLog::from_events(2, m(2), 1.0, vec![ev(0.5, 0, 1)]).unwrap();
        assert_eq!(evolve_forward(&one).to_string(), "11/01");

        let log = EventLog::from_events(3, m(2), 1.0, vec![ev(0.2, 1, 1), ev(0.4, 0, 1)]).unwrap();
        let x = evolve_forward(&log);
        let e12 = Matrix::elementary(3, 0, 1, m(2)).unwrap();
        let e23 = Matrix::elementary(3, 1, 2, m(2)).unwrap();
        let id = Matrix::identity(3, m(2));
        let oracle = id.add(&e12).unwrap().mul(&id.add(&e23).unwrap()).unwrap();
        assert_eq!(x.as_matrix(), &oracle);
        assert_eq!(x.to_string(), "111/011/001");
    }

    #[test]
    fn backward_examples() {
        let log = EventLog::from_events(3, m(2), 1.0, vec![ev(0.5, 0, 1)]).unwrap();
        let split = log.split();
        assert!(evolve_backward(&split, 0.0).unwrap().is_identity());
        assert_eq!(evolve_backward(&split, 0.6).unwrap().to_string(), "110/010/001");
        assert!(evolve_backward(&split, 0.4).unwrap().is_identity());
        assert!(evolve_backward(&split, 1.5).is_err());
        assert!(evolve_backward(&split, -0.1).is_err());
        let path = BackwardPath::new(&split);
        assert!(path.between(0.7, 0.2).is_err());
        assert!(path.between(0.3, 0.3).unwrap().is_identity());
    }

    #[test]
    fn expansion_simple_cases() {
        let no_last = EventLog::from_events(3, m(3), 1.0, vec![ev(0.3, 0, 2)]).unwrap();
        assert_eq!(expansion_reconstruct(&no_last.split()).unwrap(), evolve_forward(&no_last));

        let only_last = EventLog::from_events(4, m(5), 1.0, vec![ev(0.3, 2, 4)]).unwrap();
        let x = expansion_reconstruct(&only_last.split()).unwrap();
        assert_eq!(x.upper_entries(), vec![0, 0, 0, 0, 0, 4]);
    }

    #[test]
    fn inner_chain_rules() {
        let q2 = m(2);
        let empty = EventLog::from_events(4, q2, 1.0, vec![]).unwrap().split();
        let z = inner_chain(&FieldVector::basis(4, 2, q2), &empty).unwrap();
        assert!(z.path().changes().is_empty());
        assert_eq!(z.path().final_state(), vec![0, 0, 1, 0]);

        let log = EventLog::from_events(4, m(3), 1.0, vec![ev(0.25, 0, 2)]).unwrap().split();
        let b = FieldVector::from_entries(vec![2, 1, 0, 0], m(3));
        let z = inner_chain(&b, &log).unwrap();
        // normalized b = (1, 2, 0, 0); Z(1) += 2 * Z(0)
        assert_eq!(z.path().initial(), &[1, 2, 0, 0]);
        assert_eq!(z.path().final_state(), vec![1, 1, 0, 0]);
        assert_eq!(z.path().changes()[0].time, 0.75);

        assert!(inner_chain(&FieldVector::zeros(4, m(3)), &log).is_err());
        assert!(inner_chain(&FieldVector::basis(4, 3, m(3)), &log).is_err());
    }

    #[test]
    fn discrete_lazy_examples() {
        assert!(simulate_discrete_lazy(4, m(2), 0, 3).unwrap().is_identity());
        let ones = (0..4000)
            .filter(|&k| simulate_discrete_lazy_indexed(2, m(2), 1, 1, k).unwrap().get(0, 1) == 1)
            .count();
        // Binomial(4000, 1/2): sd ~ 31.6
        assert!((ones as f64 - 2000.0).abs() < 4.0 * 31.7, "{ones}");
        assert!(simulate_discrete_lazy(1, m(2), 3, 0).is_err());
    }
}
