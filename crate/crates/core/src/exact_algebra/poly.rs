use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Jet, Monomial, MonomialOrder, Rat};
use crate::error::{GfnError, Result};

/// Coefficient ring for [`MultiPoly`]: ℚ or the dual numbers over ℚ.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn from_rat(r: Rat) -> Self;
}

impl Coeff for Rat {
    fn zero() -> Self {
        Rat::new()
    }
    fn one() -> Self {
        Rat::from(1)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_ref(&self, other: &Self) -> Self {
        Rat::from(self + other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        Rat::from(self - other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        Rat::from(self * other)
    }
    fn neg_ref(&self) -> Self {
        Rat::from(-self)
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
}

impl Coeff for Jet {
    fn zero() -> Self {
        Jet::zero()
    }
    fn one() -> Self {
        Jet::one()
    }
    fn is_zero(&self) -> bool {
        Jet::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn from_rat(r: Rat) -> Self {
        Jet::constant(r)
    }
}

/// Sparse multivariate polynomial. Zero coefficients are never stored, so two
/// polynomials are equal iff their term maps are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly<C = Jet> {
    arity: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: C) -> Self {
        Self::term(Monomial::one(arity), c)
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, C::one())
    }

    /// The variable with the given index.
    pub fn var(arity: usize, index: usize) -> Self {
        Self::term(Monomial::var(arity, index), C::one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let arity = m.arity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { arity, terms }
    }

    pub fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Result<Self> {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            if m.arity() != arity {
                return Err(GfnError::usage(format!(
                    "monomial {m} has arity {}, polynomial has {arity}",
                    m.arity()
                )));
            }
            p.add_term(m, &c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Adds `c·m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.arity(), self.arity);
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.add_ref(c);
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.neg_ref());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &ca.mul_ref(cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.mul_ref(k));
        }
        out
    }

    /// `c·m·self`.
    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        let mut out = Self::zero(self.arity);
        for (mm, cc) in &self.terms {
            out.add_term(mm.mul(m), &cc.mul_ref(c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.arity);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative with respect to variable `index`.
    pub fn derivative(&self, index: usize) -> Self {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.exps()[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[index] -= 1;
            out.add_term(Monomial::new(exps), &c.mul_ref(&C::from_rat(Rat::from(e))));
        }
        out
    }

    /// Leading monomial and coefficient under `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &C)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: &MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let mut out = MultiPoly::<D>::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &f(c));
        }
        out
    }

    /// Evaluates at a point using the caller's arithmetic for coefficients.
    pub fn eval_with<T: Clone>(
        &self,
        point: &[T],
        zero: T,
        coeff: impl Fn(&C) -> T,
        add: impl Fn(&T, &T) -> T,
        mul: impl Fn(&T, &T) -> T,
    ) -> T {
        let mut acc = zero;
        for (m, c) in &self.terms {
            let mut t = coeff(c);
            for (x, &e) in point.iter().zip(m.exps()) {
                for _ in 0..e {
                    t = mul(&t, x);
                }
            }
            acc = add(&acc, &t);
        }
        acc
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(GfnError::usage(format!(
                "polynomial arity mismatch: {} vs {}",
                self.arity, other.arity
            )));
        }
        Ok(())
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let order = MonomialOrder::GrevLex;
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| order.cmp(b.0, a.0));
        terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", m.display_with(names))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl MultiPoly<Rat> {
    /// Evaluates a rational polynomial exactly at a rational point.
    pub fn eval_rat(&self, point: &[Rat]) -> Rat {
        self.eval_with(
            point,
            Rat::new(),
            Clone::clone,
            |a, b| Rat::from(a + b),
            |a, b| Rat::from(a * b),
        )
    }

    pub fn to_jet(&self) -> MultiPoly<Jet> {
        self.map_coeffs(|c| Jet::constant(c.clone()))
    }
}

impl MultiPoly<Jet> {
    /// The ε⁰ part.
    pub fn value_part(&self) -> MultiPoly<Rat> {
        self.map_coeffs(|c| c.value.clone())
    }

    /// The ε¹ part.
    pub fn slope_part(&self) -> MultiPoly<Rat> {
        self.map_coeffs(|c| c.slope.clone())
    }

    pub fn has_slope(&self) -> bool {
        self.terms.values().any(|c| !c.is_constant())
    }

    /// Rewrites `Σ (a + bε) m` as the rational polynomial `Σ a·m + b·m·ε` in one more variable.
    pub fn lift_epsilon(&self) -> MultiPoly<Rat> {
        let mut out = MultiPoly::<Rat>::zero(self.arity + 1);
        for (m, c) in &self.terms {
            out.add_term(m.with_extra_var(0), &c.value);
            out.add_term(m.with_extra_var(1), &c.slope);
        }
        out
    }

    /// Inverse of [`lift_epsilon`](Self::lift_epsilon); terms with ε² or higher are dropped.
    pub fn from_lifted(p: &MultiPoly<Rat>) -> MultiPoly<Jet> {
        let mut out = MultiPoly::<Jet>::zero(p.arity - 1);
        for (m, c) in &p.terms {
            let (base, e) = m.split_last();
            match e {
                0 => out.add_term(base, &Jet::constant(c.clone())),
                1 => out.add_term(base, &Jet::new(Rat::new(), c.clone())),
                _ => {}
            }
        }
        out
    }
}

/// Exact product of two polynomials of equal arity.
pub fn poly_mul<C: Coeff>(a: &MultiPoly<C>, b: &MultiPoly<C>) -> Result<MultiPoly<C>> {
    a.try_mul(b)
}

impl<C: Coeff> Add for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    /// Panics on arity mismatch; use [`MultiPoly::try_add`] for a checked version.
    fn add(self, rhs: Self) -> MultiPoly<C> {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl<C: Coeff> Sub for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: Self) -> MultiPoly<C> {
        self.try_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl<C: Coeff> Mul for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: Self) -> MultiPoly<C> {
        self.try_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl<C: Coeff> Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        self.map_coeffs(|c| c.neg_ref())
    }
}

impl<C: Coeff> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&[]))
    }
}
