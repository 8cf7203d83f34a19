//! Componentwise-order vector algebra over R^n.
//!
//! The componentwise order `x <= y iff x_i <= y_i for all i` is a partial
//! order: two vectors may be incomparable. All comparisons here are exact
//! floating-point comparisons; tolerance handling belongs to the callers.

use crate::error::{Error, Result};

/// A finite real vector of dimension >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty { what: "vector" });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "vector entry" });
        }
        Ok(Vector(entries))
    }

    /// Constant vector c in every coordinate.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Componentwise `self_i <= other_i` for all i.
    pub fn leq(&self, other: &Vector) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// Componentwise strict `self_i < other_i` for all i.
    pub fn lt_strict(&self, other: &Vector) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a < b))
    }

    /// `self <= other` and `self != other` (at least one strict coordinate).
    pub fn lneq(&self, other: &Vector) -> Result<bool> {
        Ok(self.leq(other)? && self.0 != other.0)
    }

    /// Hadamard (componentwise) product.
    pub fn hadamard(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Vector::new(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }

    /// Componentwise difference `self - other`.
    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Vector::new(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.check_dim(other)?;
        Vector::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Sup-norm distance `max_i |self_i - other_i|`.
    pub fn sup_distance(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// True iff every entry is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|x| *x > 0.0)
    }

    /// Converts into a [`PositiveVector`], failing on any entry <= 0.
    pub fn into_positive(self) -> Result<PositiveVector> {
        PositiveVector::new(self.0)
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<PositiveVector> for Vector {
    fn from(p: PositiveVector) -> Vector {
        p.0
    }
}

/// An element of the open positive orthant: every entry finite and > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector(Vector);

impl PositiveVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let v = Vector::new(entries)?;
        if !v.is_positive() {
            return Err(Error::NotPositive { what: "vector entry" });
        }
        Ok(PositiveVector(v))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// The vector 1/y with components 1/y_1, ..., 1/y_n.
    ///
    /// An involution up to round-off: `y.reciprocal().reciprocal() ~ y`.
    pub fn reciprocal(&self) -> PositiveVector {
        // 1/x of a positive finite f64 is positive; it can be subnormal but
        // never 0 or infinite for finite positive x.
        PositiveVector(Vector(
            self.0 .0.iter().map(|x| 1.0 / x).collect(),
        ))
    }

    /// Hadamard product of positive vectors (overflow rejected).
    pub fn hadamard(&self, other: &PositiveVector) -> Result<PositiveVector> {
        self.0.hadamard(&other.0)?.into_positive()
    }
}

impl std::ops::Index<usize> for PositiveVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Closed ordered interval `[lower, upper] = {y | lower <= y <= upper}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedInterval {
    lower: Vector,
    upper: Vector,
}

impl OrderedInterval {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        if !lower.leq(&upper)? {
            return Err(Error::UnorderedInterval);
        }
        Ok(OrderedInterval { lower, upper })
    }

    pub fn lower(&self) -> &Vector {
        &self.lower
    }

    pub fn upper(&self) -> &Vector {
        &self.upper
    }

    pub fn contains(&self, y: &Vector) -> Result<bool> {
        Ok(self.lower.leq(y)? && y.leq(&self.upper)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::new(xs.to_vec()).unwrap()
    }

    #[test]
    fn leq_reflexive_and_paper_pairs() {
        assert!(v(&[1.0, 2.0]).leq(&v(&[1.0, 2.0])).unwrap());
        assert!(v(&[0.86, 2.05]).leq(&v(&[23.13, 21.94])).unwrap());
        // Incomparable pair: neither direction holds.
        assert!(!v(&[8.76, 0.42]).leq(&v(&[7.10, 5.36])).unwrap());
        assert!(!v(&[7.10, 5.36]).leq(&v(&[8.76, 0.42])).unwrap());
    }

    #[test]
    fn lt_strict_examples() {
        assert!(v(&[1.0, 1.0]).lt_strict(&v(&[2.0, 2.0])).unwrap());
        assert!(!v(&[1.0, 1.0]).lt_strict(&v(&[1.0, 2.0])).unwrap());
        assert!(v(&[14.45, 2.20]).lt_strict(&v(&[22.94, 20.95])).unwrap());
    }

    #[test]
    fn lneq_examples() {
        assert!(v(&[1.0, 2.0]).lneq(&v(&[1.0, 3.0])).unwrap());
        assert!(!v(&[1.0, 2.0]).lneq(&v(&[1.0, 2.0])).unwrap());
        assert!(v(&[0.86, 2.05]).lneq(&v(&[23.13, 21.94])).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = v(&[1.0]);
        let b = v(&[1.0, 2.0]);
        assert!(matches!(
            a.leq(&b),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
        assert!(a.lt_strict(&b).is_err());
        assert!(a.lneq(&b).is_err());
        assert!(a.hadamard(&b).is_err());
    }

    #[test]
    fn hadamard_examples() {
        let ones = v(&[1.0, 1.0]);
        let xy = v(&[3.5, -7.25]);
        assert_eq!(ones.hadamard(&xy).unwrap(), xy);
        assert_eq!(
            v(&[2.0, 3.0]).hadamard(&v(&[4.0, 5.0])).unwrap(),
            v(&[8.0, 15.0])
        );
        // Squaring the two-decimal dominant point from the worked circuit.
        let sq = v(&[22.94, 20.95]).hadamard(&v(&[22.94, 20.95])).unwrap();
        assert!((sq[0] - 526.24).abs() < 0.5);
        assert!((sq[1] - 438.90).abs() < 0.5);
    }

    #[test]
    fn reciprocal_examples_and_involution() {
        let y = PositiveVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(y.reciprocal().as_slice(), &[1.0, 1.0]);
        let y = PositiveVector::new(vec![2.0, 4.0]).unwrap();
        assert_eq!(y.reciprocal().as_slice(), &[0.5, 0.25]);
        let y = PositiveVector::new(vec![24.0, 24.0]).unwrap();
        for x in y.reciprocal().as_slice() {
            assert!((x - 1.0 / 24.0).abs() < 1e-15);
        }
        let y = PositiveVector::new(vec![0.3, 17.25, 3.0]).unwrap();
        let back = y.reciprocal().reciprocal();
        for (a, b) in y.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(Vector::new(vec![]).is_err());
        assert!(Vector::new(vec![f64::NAN]).is_err());
        assert!(Vector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(PositiveVector::new(vec![1.0, 0.0]).is_err());
        assert!(PositiveVector::new(vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn ordered_interval_validates() {
        assert!(OrderedInterval::new(v(&[0.0, 0.0]), v(&[1.0, 1.0])).is_ok());
        assert!(OrderedInterval::new(v(&[0.0, 2.0]), v(&[1.0, 1.0])).is_err());
        let iv = OrderedInterval::new(v(&[0.0, 0.0]), v(&[2.0, 2.0])).unwrap();
        assert!(iv.contains(&v(&[1.0, 2.0])).unwrap());
        assert!(!iv.contains(&v(&[1.0, 2.5])).unwrap());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-100.0..100.0f64, n)
        }

        proptest! {
            #[test]
            fn partial_order_laws(a in vec_strategy(4), b in vec_strategy(4), c in vec_strategy(4)) {
                let (a, b, c) = (v(&a), v(&b), v(&c));
                // reflexivity
                prop_assert!(a.leq(&a).unwrap());
                // antisymmetry
                if a.leq(&b).unwrap() && b.leq(&a).unwrap() {
                    prop_assert_eq!(&a, &b);
                }
                // transitivity
                if a.leq(&b).unwrap() && b.leq(&c).unwrap() {
                    prop_assert!(a.leq(&c).unwrap());
                }
                // strictness chain
                if a.lt_strict(&b).unwrap() {
                    prop_assert!(a.lneq(&b).unwrap());
                }
                if a.lneq(&b).unwrap() {
                    prop_assert!(a.leq(&b).unwrap());
                }
            }

            #[test]
            fn hadamard_laws(a in vec_strategy(3), b in vec_strategy(3), c in vec_strategy(3)) {
                let (a, b, c) = (v(&a), v(&b), v(&c));
                let ones = Vector::constant(3, 1.0).unwrap();
                // commutativity and the identity element hold bit-exactly
                prop_assert_eq!(a.hadamard(&b).unwrap(), b.hadamard(&a).unwrap());
                prop_assert_eq!(ones.hadamard(&a).unwrap(), a.clone());
                // associativity only up to round-off
                let lhs = a.hadamard(&b).unwrap().hadamard(&c).unwrap();
                let rhs = a.hadamard(&b.hadamard(&c).unwrap()).unwrap();
                for (x, y) in lhs.as_slice().iter().zip(rhs.as_slice()) {
                    prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
                }
            }
        }
    }
}
