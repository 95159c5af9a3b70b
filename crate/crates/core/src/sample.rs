//! Seeded generators shared by the experiments, the selftest and the tests.
//!
//! Every random stream is `ChaCha8Rng::seed_from_u64(master)` with the
//! stream number set to a counter, so trial `i` draws the same numbers no
//! matter which thread runs it or in which order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hull2::{atom_lift, Atom, HullPoint, LiftedPoint, YBits};
use crate::oracle::Objective;

pub fn trial_rng(master: u64, counter: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(counter);
    rng
}

/// Coefficients uniform in `[-1, 1]`; `c_y12`, if given, replaces the drawn `c_Y`.
pub fn random_objective(rng: &mut impl Rng, c_y12: Option<f64>) -> Objective {
    let mut c: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
    if let Some(v) = c_y12 {
        c[7] = v;
    }
    Objective::from_coeffs(c)
}

pub fn random_atom(rng: &mut impl Rng) -> Atom {
    let ybits = YBits::ALL[rng.gen_range(0..4)];
    let y = ybits.y();
    Atom::new(ybits, [rng.gen::<f64>() * y[0], rng.gen::<f64>() * y[1]]).expect("x within y")
}

/// Convex combination of 1 to 6 lifted atoms, carrying `β`.
pub fn disjunctive_mixture(rng: &mut impl Rng) -> LiftedPoint {
    let k = rng.gen_range(1..=6);
    let mut parts: Vec<(f64, LiftedPoint)> = (0..k).map(|_| (rng.gen::<f64>() + 1e-3, atom_lift(&random_atom(rng)))).collect();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    for p in &mut parts {
        p.0 /= total;
    }
    LiftedPoint::combine(&parts)
}

/// `t ∈ [lo, hi]`, landing on an endpoint a fifth of the time.
fn between(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    match rng.gen_range(0..10) {
        0 => lo,
        1 => hi,
        _ => lo + rng.gen::<f64>() * (hi - lo),
    }
}

/// A point satisfying the linear conditions of the `β`-free systems and
/// nothing else. Built coordinate by coordinate, retrying when the `X12`
/// range comes out empty.
pub fn linear_feasible(rng: &mut impl Rng) -> LiftedPoint {
    loop {
        let y = [between(rng, 0.0, 1.0), between(rng, 0.0, 1.0)];
        let y12 = between(rng, (y[0] + y[1] - 1.0).max(0.0), y[0].min(y[1]));
        let x = [between(rng, 0.0, y[0]), between(rng, 0.0, y[1])];
        let a = [between(rng, 0.0, x[0].min(y[0] - y12)), between(rng, 0.0, x[1].min(y[1] - y12))];
        let lo = (x[0] - a[0] + x[1] - a[1] - y12).max(0.0);
        let hi = (x[0] - a[0]).min(x[1] - a[1]);
        if lo > hi {
            continue;
        }
        let base = HullPoint { x, x11: between(rng, 0.0, x[0]), x12: between(rng, lo, hi), x22: between(rng, 0.0, x[1]), y, y12 };
        return LiftedPoint::new(base, a);
    }
}
