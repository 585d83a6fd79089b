//! 2x2 recurrences `(T_yes(h), T_no(h)) <= M (T_yes(h-1), T_no(h-1))` for the
//! randomized solvers and the closed-form constants they produce.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::matching::CostPair;

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceMatrix {
    /// Rows are (yes, no); columns weight (T_yes(h-1), T_no(h-1)).
    pub entries: [[BigRational; 2]; 2],
    pub spectral_radius: f64,
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Largest eigenvalue of a non-negative 2x2 matrix.
pub fn spectral_radius_2x2(m: [[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = m;
    let tr = a + d;
    let disc = (a - d) * (a - d) + 4.0 * b * c;
    (tr + disc.max(0.0).sqrt()) / 2.0
}

impl RecurrenceMatrix {
    pub fn new(entries: [[BigRational; 2]; 2]) -> Self {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        let spectral_radius = spectral_radius_2x2([
            [f(&entries[0][0]), f(&entries[0][1])],
            [f(&entries[1][0]), f(&entries[1][1])],
        ]);
        RecurrenceMatrix {
            entries,
            spectral_radius,
        }
    }

    /// Rows taken from a worst yes-instance and a worst no-instance.
    pub fn from_rows(yes_row: &CostPair, no_row: &CostPair) -> Self {
        RecurrenceMatrix::new([
            [yes_row.yes_calls.clone(), yes_row.no_calls.clone()],
            [no_row.yes_calls.clone(), no_row.no_calls.clone()],
        ])
    }

    /// The binary-tree recurrence `[[9/4, 1/2], [1, 2]]`.
    pub fn binary() -> Self {
        RecurrenceMatrix::new([[r(9, 4), r(1, 2)], [r(1, 1), r(2, 1)]])
    }

    /// The ternary recurrence `[[133/36, 5/3], [26/9, 37/9]]`.
    pub fn ternary() -> Self {
        RecurrenceMatrix::new([[r(133, 36), r(5, 3)], [r(26, 9), r(37, 9)]])
    }

    pub fn as_f64(&self) -> [[f64; 2]; 2] {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        [
            [f(&self.entries[0][0]), f(&self.entries[0][1])],
            [f(&self.entries[1][0]), f(&self.entries[1][1])],
        ]
    }

    /// `M^levels (1, 1)^T`, exactly.
    pub fn bound_after(&self, levels: u32) -> CostPair {
        let mut v = [BigRational::from_integer(1.into()), BigRational::from_integer(1.into())];
        for _ in 0..levels {
            let next = [
                &self.entries[0][0] * &v[0] + &self.entries[0][1] * &v[1],
                &self.entries[1][0] * &v[0] + &self.entries[1][1] * &v[1],
            ];
            v = next;
        }
        let [yes, no] = v;
        CostPair::new(yes, no)
    }

    /// Positive right eigenvector for the spectral radius, normalized to sum 1.
    pub fn perron_vector(&self) -> (f64, f64) {
        let [[a, b], [c, _]] = self.as_f64();
        let rho = self.spectral_radius;
        // (a - rho) x + b y = 0
        let (x, y) = if b > 1e-300 {
            (b, rho - a)
        } else if c > 1e-300 {
            (rho - self.as_f64()[1][1], c)
        } else {
            (1.0, 1.0)
        };
        let (x, y) = (x.abs(), y.abs());
        let s = x + y;
        if s.is_zero() {
            (0.5, 0.5)
        } else {
            (x / s, y / s)
        }
    }
}

/// Closed-form constants of the binary and ternary recurrences.
#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceConstants {
    /// (17 + sqrt 33) / 8
    pub binary_growth: f64,
    /// (281 + sqrt 25185) / 72
    pub ternary_growth: f64,
    /// log 4 / log binary_growth: trees of height below this multiple of
    /// log2 n are solved in strongly subquadratic time.
    pub subquadratic_height_factor: f64,
    /// log2 binary_growth: exponent of n for trees of height ~ log2 n.
    pub balanced_exponent: f64,
    /// Spectral radii of the two matrices, computed numerically.
    pub binary_matrix_radius: f64,
    pub ternary_matrix_radius: f64,
}

impl RecurrenceConstants {
    /// (name, computed, expected, tolerance)
    pub fn checks(&self) -> Vec<(&'static str, f64, f64, f64)> {
        vec![
            ("binary growth (17+sqrt33)/8", self.binary_growth, 2.8431, 1e-4),
            ("ternary growth (281+sqrt25185)/72", self.ternary_growth, 6.107, 1e-3),
            ("subquadratic height factor", self.subquadratic_height_factor, 1.3266, 1e-3),
            ("balanced-tree exponent", self.balanced_exponent, 1.5075, 1e-3),
            ("binary matrix spectral radius", self.binary_matrix_radius, self.binary_growth, 1e-9),
            ("ternary matrix spectral radius", self.ternary_matrix_radius, self.ternary_growth, 1e-9),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.checks()
            .iter()
            .all(|&(_, got, want, tol)| (got - want).abs() <= tol)
    }
}

pub fn recurrence_constants() -> RecurrenceConstants {
    let binary_growth = (17.0 + 33f64.sqrt()) / 8.0;
    let ternary_growth = (281.0 + 25185f64.sqrt()) / 72.0;
    RecurrenceConstants {
        binary_growth,
        ternary_growth,
        subquadratic_height_factor: 4f64.ln() / binary_growth.ln(),
        balanced_exponent: binary_growth.log2(),
        binary_matrix_radius: RecurrenceMatrix::binary().spectral_radius,
        ternary_matrix_radius: RecurrenceMatrix::ternary().spectral_radius,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let c = recurrence_constants();
        assert!((c.binary_growth - 2.84307).abs() < 1e-4);
        assert!((c.ternary_growth - 6.1069).abs() < 1e-3);
        assert!((c.subquadratic_height_factor - 1.3266).abs() < 1e-3);
        assert!((c.balanced_exponent - 1.5075).abs() < 1e-3);
        assert!(c.all_pass());
    }

    #[test]
    fn bound_after_grows_at_the_spectral_radius() {
        let m = RecurrenceMatrix::binary();
        assert_eq!(m.bound_after(0), CostPair::new(r(1, 1), r(1, 1)));
        assert_eq!(m.bound_after(1), CostPair::new(r(11, 4), r(3, 1)));
        let a = m.bound_after(40);
        let b = m.bound_after(41);
        let ratio = (b.yes_calls / a.yes_calls).to_f64().unwrap();
        assert!((ratio - m.spectral_radius).abs() < 1e-9);
    }

    #[test]
    fn perron_vector_is_an_eigenvector() {
        for m in [RecurrenceMatrix::binary(), RecurrenceMatrix::ternary()] {
            let (x, y) = m.perron_vector();
            let a = m.as_f64();
            let rho = m.spectral_radius;
            assert!((a[0][0] * x + a[0][1] * y - rho * x).abs() < 1e-9);
            assert!((a[1][0] * x + a[1][1] * y - rho * y).abs() < 1e-9);
        }
    }
}
