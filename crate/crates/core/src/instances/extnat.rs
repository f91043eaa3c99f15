//! Extended naturals `{0, 1, 2, ..., ∞}` under addition.

use std::fmt;

use crate::gca::{Gca, GcaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

/// The CA of extended naturals. Not cancellative: `∞ + 1 = ∞ + 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExtNatGca;

impl Gca for ExtNatGca {
    type Elem = ExtNat;

    fn name(&self) -> &str {
        "extnat"
    }

    fn zero(&self) -> ExtNat {
        ExtNat::Fin(0)
    }

    fn add(&self, a: &ExtNat, b: &ExtNat) -> Result<ExtNat, GcaError> {
        Ok(match (a, b) {
            (ExtNat::Fin(x), ExtNat::Fin(y)) => ExtNat::Fin(x.checked_add(*y).expect("extended natural overflow")),
            _ => ExtNat::Inf,
        })
    }

    fn le(&self, a: &ExtNat, b: &ExtNat) -> bool {
        match (a, b) {
            (_, ExtNat::Inf) => true,
            (ExtNat::Inf, ExtNat::Fin(_)) => false,
            (ExtNat::Fin(x), ExtNat::Fin(y)) => x <= y,
        }
    }

    fn meet(&self, a: &ExtNat, b: &ExtNat) -> ExtNat {
        if self.le(a, b) {
            *a
        } else {
            *b
        }
    }

    fn subtract(&self, a: &ExtNat, b: &ExtNat) -> Result<ExtNat, GcaError> {
        match (a, b) {
            (ExtNat::Inf, _) => Err(GcaError::NonUniqueWitness),
            (ExtNat::Fin(_), ExtNat::Inf) => Err(GcaError::NotComparable),
            (ExtNat::Fin(x), ExtNat::Fin(y)) => x.checked_sub(*y).map(ExtNat::Fin).ok_or(GcaError::NotComparable),
        }
    }

    fn is_cancellative_instance(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gca::is_cancellative;
    use ExtNat::{Fin, Inf};

    #[test]
    fn order_and_meet() {
        let g = ExtNatGca;
        assert!(g.le(&Fin(2), &Fin(5)));
        assert!(!g.le(&Inf, &Fin(5)));
        assert!(g.le(&Fin(5), &Inf));
        assert_eq!(g.meet(&Inf, &Fin(7)), Fin(7));
        assert_eq!(g.add(&Inf, &Fin(1)).unwrap(), Inf);
    }

    #[test]
    fn subtract_cases() {
        let g = ExtNatGca;
        assert_eq!(g.subtract(&Fin(5), &Fin(2)), Ok(Fin(3)));
        assert_eq!(g.subtract(&Inf, &Fin(3)), Err(GcaError::NonUniqueWitness));
        assert_eq!(g.subtract(&Fin(2), &Fin(5)), Err(GcaError::NotComparable));
    }

    #[test]
    fn cancellation_probes() {
        let g = ExtNatGca;
        assert!(!is_cancellative(&g, &Inf, &[(Fin(1), Fin(0))]));
        assert!(is_cancellative(&g, &Fin(3), &[(Fin(2), Fin(2)), (Fin(0), Fin(1))]));
    }
}
