use std::cmp::Ordering;

use super::{Monomial, Rat};

/// A monomial order. All variants are total, multiplicative and (for nonnegative
/// weights) well-orders.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Total degree, ties broken by reverse lexicographic comparison from the last variable.
    #[default]
    GrevLex,
    /// Total degree, ties broken lexicographically from the first variable.
    GrLex,
    /// Weighted degree under the supplied nonnegative weights, ties broken by `GrevLex`.
    Weighted(Vec<Rat>),
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::GrLex => a
                .degree()
                .cmp(&b.degree())
                .then_with(|| a.exps().cmp(b.exps())),
            MonomialOrder::Weighted(w) => a
                .weighted_degree(w)
                .cmp(&b.weighted_degree(w))
                .then_with(|| grevlex(a, b)),
        }
    }

    /// The order used on the ε-extended ring: ε is appended as the last
    /// variable (weight 0 for weighted orders).
    pub(crate) fn extended(&self) -> MonomialOrder {
        match self {
            MonomialOrder::Weighted(w) => {
                let mut w = w.clone();
                w.push(Rat::new());
                MonomialOrder::Weighted(w)
            }
            other => other.clone(),
        }
    }

    pub(crate) fn check_arity(&self, arity: usize) -> bool {
        match self {
            MonomialOrder::Weighted(w) => w.len() == arity && w.iter().all(|x| *x >= 0),
            _ => true,
        }
    }
}

fn grevlex(a: &Monomial, b: &Monomial) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        for (x, y) in a.exps().iter().rev().zip(b.exps().iter().rev()) {
            if x != y {
                // smaller exponent in the last differing variable wins
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn grevlex_examples() {
        let o = MonomialOrder::GrevLex;
        // x^2 > yz and xy > z^2 in grevlex with x > y > z
        assert_eq!(o.cmp(&m(&[2, 0, 0]), &m(&[0, 1, 1])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 1, 0]), &m(&[0, 0, 2])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 0, 2]), &m(&[0, 2, 1])), Ordering::Less);
        assert_eq!(o.cmp(&m(&[0, 0, 3]), &m(&[2, 0, 0])), Ordering::Greater);
    }

    #[test]
    fn grlex_examples() {
        let o = MonomialOrder::GrLex;
        assert_eq!(o.cmp(&m(&[1, 0, 2]), &m(&[0, 2, 1])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[0, 0, 1]), &m(&[1, 1, 0])), Ordering::Less);
    }

    #[test]
    fn weighted_falls_back_to_grevlex() {
        let o = MonomialOrder::Weighted(vec![rat(1, 6), rat(1, 3)]);
        assert_eq!(o.cmp(&m(&[2, 0]), &m(&[0, 1])), Ordering::Greater);
        assert_eq!(o.cmp(&m(&[1, 0]), &m(&[0, 1])), Ordering::Less);
        assert_eq!(o.cmp(&m(&[6, 0]), &m(&[0, 3])), Ordering::Greater);
    }
}
