//! Commensurate repetition counts for a pair of gate periods.
//!
//! Two primitive evolutions of durations t_a and t_b compose cleanly only
//! when whole numbers of repetitions end at the same instant: find (a, b)
//! with |a·t_a - b·t_b| within a stated error, subject to optional parity
//! constraints on the counts (some sequences need an odd repetition count to
//! implement a net flip). Scanning `a` upward makes the first feasible pair
//! minimal in total duration a·t_a, so the search needs no global pass.

use serde::{Deserialize, Serialize};

use crate::{real, Error, Real, Result};

/// Search parameters. Durations in nanoseconds.
#[derive(Debug, Clone, Copy)]
pub struct ClockSpec<T: Real> {
    pub t_a_ns: T,
    pub t_b_ns: T,
    /// Require an odd repetition count for the first period.
    pub odd_a: bool,
    /// Require an odd repetition count for the second period.
    pub odd_b: bool,
    /// Largest tolerated |a·t_a - b·t_b|, in nanoseconds.
    pub error_ns: T,
    /// Give up once `a` exceeds this bound.
    pub max_a: u64,
}

impl<T: Real> ClockSpec<T> {
    pub fn new(t_a_ns: T, t_b_ns: T, error_ns: T) -> Self {
        ClockSpec { t_a_ns, t_b_ns, odd_a: false, odd_b: false, error_ns, max_a: 10_000_000 }
    }
}

/// A feasible repetition pair; the solver returns the one minimizing total time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ClockSolution<T: Real> {
    pub a: u64,
    pub b: u64,
    pub total_time_us: T,
    /// Squared timing mismatch (a·t_a - b·t_b)², in ns²; at most error².
    pub residual: T,
}

impl<T: Real> ClockSolution<T> {
    pub fn total_time_ns(&self) -> T {
        self.total_time_us * real::<T>(1000.0)
    }
}

/// Nearest integer to `x` that respects the parity constraint and is >= 1.
fn nearest_count<T: Real>(x: T, odd: bool) -> u64 {
    if odd {
        let k = ((x - T::one()) / real::<T>(2.0)).round().max(T::zero());
        1 + 2 * k.to_u64().unwrap_or(0)
    } else {
        x.round().max(T::one()).to_u64().unwrap_or(1)
    }
}

/// Minimal-duration commensurate pair for the spec, or `NoClockSolution` if
/// none exists with a <= max_a.
pub fn solve<T: Real>(spec: &ClockSpec<T>) -> Result<ClockSolution<T>> {
    if spec.t_a_ns <= T::zero() || spec.t_b_ns <= T::zero() {
        return Err(Error::InvalidInput("clock periods must be positive".into()));
    }
    if spec.error_ns < T::zero() {
        return Err(Error::InvalidInput("clock error must be non-negative".into()));
    }
    let (start, step) = if spec.odd_a { (1u64, 2u64) } else { (1u64, 1u64) };
    let mut a = start;
    while a <= spec.max_a {
        let total_a = real::<T>(a as f64) * spec.t_a_ns;
        // the nearest admissible b minimizes the residual for this a, so if
        // it misses, every other b misses too
        let b = nearest_count(total_a / spec.t_b_ns, spec.odd_b);
        let mismatch = total_a - real::<T>(b as f64) * spec.t_b_ns;
        let residual = mismatch * mismatch;
        if residual <= spec.error_ns * spec.error_ns {
            return Ok(ClockSolution {
                a,
                b,
                total_time_us: total_a / real::<T>(1000.0),
                residual,
            });
        }
        a += step;
    }
    Err(Error::NoClockSolution { search_bound: spec.max_a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive scan over both counts, independent of the solver's
    /// nearest-integer shortcut.
    fn brute_force(spec: &ClockSpec<f64>) -> Option<(u64, f64)> {
        let mut a = 1;
        while a <= spec.max_a {
            if !spec.odd_a || a % 2 == 1 {
                let total_a = a as f64 * spec.t_a_ns;
                let b_max = ((total_a + spec.error_ns) / spec.t_b_ns).ceil() as u64 + 1;
                for b in 1..=b_max {
                    if spec.odd_b && b % 2 == 0 {
                        continue;
                    }
                    if (total_a - b as f64 * spec.t_b_ns).abs() <= spec.error_ns {
                        return Some((a, total_a));
                    }
                }
            }
            a += 1;
        }
        None
    }

    #[test]
    fn solver_agrees_with_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let spec = ClockSpec {
                t_a_ns: 50.0 + 350.0 * rng.random::<f64>(),
                t_b_ns: 50.0 + 350.0 * rng.random::<f64>(),
                odd_a: rng.random::<f64>() < 0.5,
                odd_b: rng.random::<f64>() < 0.5,
                error_ns: 0.005 + 0.1 * rng.random::<f64>(),
                max_a: 300,
            };
            match (solve(&spec), brute_force(&spec)) {
                (Ok(sol), Some((a, total))) => {
                    assert_eq!(sol.a, a, "solver missed the minimal count for {spec:?}");
                    assert_relative_eq!(sol.total_time_ns(), total, epsilon = 1e-9);
                    assert!(sol.residual <= spec.error_ns * spec.error_ns);
                    assert!(!spec.odd_a || sol.a % 2 == 1);
                    assert!(!spec.odd_b || sol.b % 2 == 1);
                    assert!(sol.b >= 1);
                }
                (Err(Error::NoClockSolution { .. }), None) => {}
                (got, want) => panic!("solver {got:?} vs oracle {want:?} for {spec:?}"),
            }
        }
    }

    #[test]
    fn rounded_periods_have_a_unique_exact_lock() {
        // 331 * 698.1 = 6981 * 33.1 exactly (both equal 231071.1); with a
        // 0.01 ns window and coprime scaled integers (331, 6981), multiples
        // of that pair are the only hits and the first is odd as required
        let spec = ClockSpec {
            t_a_ns: 33.1,
            t_b_ns: 698.1,
            odd_a: true,
            odd_b: false,
            error_ns: 0.01,
            max_a: 10_000,
        };
        let sol = solve(&spec).unwrap();
        assert_eq!((sol.a, sol.b), (6981, 331));
        assert_relative_eq!(sol.total_time_us, 231.0711, epsilon = 1e-9);
    }

    #[test]
    fn irrational_periods_with_rational_ratio_lock_at_the_reduced_fraction() {
        // t_a/t_b = 9/95 exactly, so 95 repetitions of t_a meet 9 of t_b with
        // zero residual; both counts are odd, and no smaller odd a comes
        // within the window because 9a/95 is then at least 1/95 from an integer
        let t_a = 1000.0 * std::f64::consts::PI / 95.0;
        let t_b = 1000.0 * std::f64::consts::PI / 9.0;
        let spec = ClockSpec { t_a_ns: t_a, t_b_ns: t_b, odd_a: true, odd_b: true, error_ns: 0.01, max_a: 10_000 };
        let sol = solve(&spec).unwrap();
        assert_eq!((sol.a, sol.b), (95, 9));
        assert_relative_eq!(sol.total_time_ns(), 1000.0 * std::f64::consts::PI, epsilon = 1e-9);
    }

    #[test]
    fn exhausted_bound_reports_no_solution() {
        let spec = ClockSpec {
            t_a_ns: 33.1,
            t_b_ns: 698.1,
            odd_a: true,
            odd_b: false,
            error_ns: 0.0001,
            max_a: 100,
        };
        assert!(matches!(solve(&spec), Err(Error::NoClockSolution { search_bound: 100 })));
    }

    #[test]
    fn zero_error_still_finds_exact_integer_ratios() {
        let spec = ClockSpec { t_a_ns: 25.0, t_b_ns: 100.0, odd_a: false, odd_b: false, error_ns: 0.0, max_a: 100 };
        let sol = solve(&spec).unwrap();
        assert_eq!((sol.a, sol.b), (4, 1));
    }
}
