//! Finite-window surrogate for limits at infinity.
//!
//! No finite computation proves a limit on the whole line, so every
//! asymptotic statement is downgraded to a trend: a quantity is sampled at
//! the edges of three nested windows `X, 2X, 4X` and classified by how it
//! moves across the doublings.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrendClass {
    /// Shrinks by at least a factor of 2 across each doubling.
    Vanishing,
    /// Stays within a factor of 2 across each doubling.
    Bounded,
    /// Grows by at least a factor of 2 across each doubling.
    Diverging,
    Inconclusive,
}

/// Classify three nonnegative shell samples taken at `X, 2X, 4X`.
pub fn classify(values: [f64; 3]) -> TrendClass {
    let tiny = 1e-290;
    if values.iter().any(|v| !v.is_finite() && !v.is_infinite()) {
        return TrendClass::Inconclusive;
    }
    if values.iter().all(|&v| v.abs() <= tiny) {
        return TrendClass::Vanishing;
    }
    let ratio = |a: f64, b: f64| -> f64 {
        if a.abs() <= tiny {
            if b.abs() <= tiny {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            b / a
        }
    };
    let r1 = ratio(values[0], values[1]);
    let r2 = ratio(values[1], values[2]);
    // slack so that exact factor-2 behaviour does not flip on fp noise
    let halve = 0.5 * (1.0 + 1e-6);
    let double = 2.0 * (1.0 - 1e-6);
    if r1 <= halve && r2 <= halve {
        TrendClass::Vanishing
    } else if r1 >= double && r2 >= double {
        TrendClass::Diverging
    } else if r1 > halve && r1 < double && r2 > halve && r2 < double {
        TrendClass::Bounded
    } else {
        TrendClass::Inconclusive
    }
}

/// Shell samples of a functional on both half-axes.
#[derive(Debug, Clone, Serialize)]
pub struct ShellTrend {
    /// The shell abscissas `[X, 2X, 4X]`.
    pub shells: [f64; 3],
    /// Samples at `-X, -2X, -4X` (None when the solver failed there).
    pub minus: [Option<f64>; 3],
    /// Samples at `+X, +2X, +4X`.
    pub plus: [Option<f64>; 3],
    pub class_minus: Option<TrendClass>,
    pub class_plus: Option<TrendClass>,
}

impl ShellTrend {
    pub fn from_samples(shells: [f64; 3], minus: [Option<f64>; 3], plus: [Option<f64>; 3]) -> Self {
        let class_of = |side: &[Option<f64>; 3]| {
            if side.iter().all(|v| v.is_some()) {
                Some(classify([
                    side[0].unwrap(),
                    side[1].unwrap(),
                    side[2].unwrap(),
                ]))
            } else {
                None
            }
        };
        ShellTrend {
            shells,
            class_minus: class_of(&minus),
            class_plus: class_of(&plus),
            minus,
            plus,
        }
    }

    /// Evaluate a pointwise functional at all six shell points.
    pub fn evaluate<F: Fn(f64) -> Option<f64>>(base: f64, eval: F) -> Self {
        let shells = [base, 2.0 * base, 4.0 * base];
        let minus = [eval(-shells[0]), eval(-shells[1]), eval(-shells[2])];
        let plus = [eval(shells[0]), eval(shells[1]), eval(shells[2])];
        Self::from_samples(shells, minus, plus)
    }

    /// Both tails classified and vanishing.
    pub fn vanishing_both(&self) -> bool {
        self.class_minus == Some(TrendClass::Vanishing)
            && self.class_plus == Some(TrendClass::Vanishing)
    }

    /// Either tail diverges.
    pub fn any_diverging(&self) -> bool {
        self.class_minus == Some(TrendClass::Diverging)
            || self.class_plus == Some(TrendClass::Diverging)
    }

    /// Both tails classified, neither diverging: evidence the global
    /// supremum is finite.
    pub fn finite_evidence(&self) -> bool {
        matches!(
            self.class_minus,
            Some(TrendClass::Vanishing) | Some(TrendClass::Bounded)
        ) && matches!(
            self.class_plus,
            Some(TrendClass::Vanishing) | Some(TrendClass::Bounded)
        )
    }

    /// Both tails classified, at least one staying bounded away from zero.
    pub fn bounded_away(&self) -> bool {
        self.finite_evidence()
            && (self.class_minus == Some(TrendClass::Bounded)
                || self.class_plus == Some(TrendClass::Bounded))
    }

    pub fn diverging_both(&self) -> bool {
        self.class_minus == Some(TrendClass::Diverging)
            && self.class_plus == Some(TrendClass::Diverging)
    }

    pub fn complete(&self) -> bool {
        self.class_minus.is_some() && self.class_plus.is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes() {
        assert_eq!(classify([1.0, 0.4, 0.11]), TrendClass::Vanishing);
        assert_eq!(classify([1.0, 1.1, 0.95]), TrendClass::Bounded);
        assert_eq!(classify([1.0, 8.0, 64.0]), TrendClass::Diverging);
        assert_eq!(classify([1.0, 8.0, 8.5]), TrendClass::Inconclusive);
        assert_eq!(classify([0.0, 0.0, 0.0]), TrendClass::Vanishing);
    }

    #[test]
    fn classification_is_scale_invariant() {
        for scale in [1e-8, 1.0, 1e12] {
            assert_eq!(
                classify([scale, 0.3 * scale, 0.09 * scale]),
                TrendClass::Vanishing
            );
            assert_eq!(
                classify([scale, 3.0 * scale, 9.0 * scale]),
                TrendClass::Diverging
            );
        }
    }

    #[test]
    fn incomplete_sides_stay_unclassified() {
        let t = ShellTrend::from_samples(
            [1.0, 2.0, 4.0],
            [Some(1.0), None, Some(0.2)],
            [Some(1.0), Some(0.4), Some(0.1)],
        );
        assert!(t.class_minus.is_none());
        assert_eq!(t.class_plus, Some(TrendClass::Vanishing));
        assert!(!t.complete());
    }
}
