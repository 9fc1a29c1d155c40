use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::Rat;

/// First-order jet `value + slope·ε` with `ε² = 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Jet {
    pub value: Rat,
    pub slope: Rat,
}

impl Jet {
    pub fn new(value: Rat, slope: Rat) -> Self {
        Jet { value, slope }
    }

    pub fn constant(value: Rat) -> Self {
        Jet {
            value,
            slope: Rat::new(),
        }
    }

    /// The nilpotent generator ε itself.
    pub fn epsilon() -> Self {
        Jet {
            value: Rat::new(),
            slope: Rat::from(1),
        }
    }

    pub fn zero() -> Self {
        Jet::default()
    }

    pub fn one() -> Self {
        Jet::constant(Rat::from(1))
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0 && self.slope == 0
    }

    pub fn is_constant(&self) -> bool {
        self.slope == 0
    }

    /// Multiplicative inverse; defined iff the value part is nonzero.
    pub fn inverse(&self) -> Option<Jet> {
        if self.value == 0 {
            return None;
        }
        let inv = Rat::from(1) / &self.value;
        let slope = -Rat::from(&self.slope * &inv) * &inv;
        Some(Jet { value: inv, slope })
    }

    pub fn scale(&self, k: &Rat) -> Jet {
        Jet {
            value: Rat::from(&self.value * k),
            slope: Rat::from(&self.slope * k),
        }
    }
}

impl From<Rat> for Jet {
    fn from(value: Rat) -> Self {
        Jet::constant(value)
    }
}

impl From<i64> for Jet {
    fn from(v: i64) -> Self {
        Jet::constant(Rat::from(v))
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &'a Jet) -> Jet {
        Jet {
            value: Rat::from(&self.value + &rhs.value),
            slope: Rat::from(&self.slope + &rhs.slope),
        }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &'a Jet) -> Jet {
        Jet {
            value: Rat::from(&self.value - &rhs.value),
            slope: Rat::from(&self.slope - &rhs.slope),
        }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &'a Jet) -> Jet {
        // (a + a'ε)(b + b'ε) = ab + (ab' + a'b)ε
        let value = Rat::from(&self.value * &rhs.value);
        let slope = Rat::from(&self.value * &rhs.slope) + Rat::from(&self.slope * &rhs.value);
        Jet { value, slope }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            value: -self.value.clone(),
            slope: -self.slope.clone(),
        }
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.value += &rhs.value;
        self.slope += &rhs.slope;
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.slope == 0 {
            write!(f, "{}", self.value)
        } else if self.value == 0 {
            write!(f, "({})ε", self.slope)
        } else {
            write!(f, "({} + ({})ε)", self.value, self.slope)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;

    #[test]
    fn product_rule_is_exact() {
        let a = Jet::new(rat(2, 3), rat(-1, 5));
        let b = Jet::new(rat(7, 2), rat(3, 4));
        let p = &a * &b;
        assert_eq!(p.value, rat(7, 3));
        assert_eq!(p.slope, rat(2, 3) * rat(3, 4) + rat(-1, 5) * rat(7, 2));
    }

    #[test]
    fn epsilon_squares_to_zero() {
        let e = Jet::epsilon();
        assert!((&e * &e).is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let a = Jet::new(rat(-3, 2), rat(5, 7));
        assert_eq!(&a * &a.inverse().unwrap(), Jet::one());
        assert!(Jet::epsilon().inverse().is_none());
    }
}
