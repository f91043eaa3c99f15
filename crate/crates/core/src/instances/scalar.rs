//! Nonnegative rationals under addition.

use crate::gca::{Gca, GcaError};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, Default)]
pub struct RationalGca;

impl Gca for RationalGca {
    type Elem = Rational;

    fn name(&self) -> &str {
        "rational"
    }

    fn zero(&self) -> Rational {
        Rational::zero()
    }

    fn add(&self, a: &Rational, b: &Rational) -> Result<Rational, GcaError> {
        Ok(a + b)
    }

    fn le(&self, a: &Rational, b: &Rational) -> bool {
        a <= b
    }

    fn meet(&self, a: &Rational, b: &Rational) -> Rational {
        a.min(b).clone()
    }

    fn subtract(&self, a: &Rational, b: &Rational) -> Result<Rational, GcaError> {
        a.checked_sub(b).ok_or(GcaError::NotComparable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_laws() {
        let g = RationalGca;
        let a = Rational::new(1, 3);
        let b = Rational::new(1, 2);
        assert!(g.le(&a, &b));
        assert_eq!(g.meet(&a, &b), a);
        assert_eq!(g.subtract(&b, &a), Ok(Rational::new(1, 6)));
        assert_eq!(g.subtract(&a, &b), Err(GcaError::NotComparable));
        assert_eq!(g.sum(std::iter::empty()), Ok(Rational::zero()));
    }
}
