use std::collections::BTreeSet;

use super::{Jet, Monomial, MonomialOrder, MultiPoly, Rat};
use crate::error::{GfnError, Result};

/// Maximum number of S-polynomial reductions before Buchberger gives up.
pub const DEFAULT_STEP_BUDGET: usize = 20_000;

/// Full reduction of `p` modulo `basis`. If `basis` is a Gröbner basis the
/// result is the unique normal form.
pub fn normal_form(
    p: &MultiPoly<Rat>,
    basis: &[MultiPoly<Rat>],
    order: &MonomialOrder,
) -> MultiPoly<Rat> {
    let leads: Vec<(Monomial, Rat)> = basis
        .iter()
        .filter_map(|g| g.leading_term(order).map(|(m, c)| (m.clone(), c.clone())))
        .collect();
    let basis: Vec<&MultiPoly<Rat>> = basis.iter().filter(|g| !g.is_zero()).collect();
    reduce_with(p, &basis, &leads, order)
}

fn reduce_with(
    p: &MultiPoly<Rat>,
    basis: &[&MultiPoly<Rat>],
    leads: &[(Monomial, Rat)],
    order: &MonomialOrder,
) -> MultiPoly<Rat> {
    let mut rest = p.clone();
    let mut out = MultiPoly::<Rat>::zero(p.arity());
    while let Some((m, c)) = rest
        .leading_term(order)
        .map(|(m, c)| (m.clone(), c.clone()))
    {
        let hit = leads.iter().position(|(lm, _)| lm.divides(&m));
        match hit {
            Some(i) => {
                let (lm, lc) = &leads[i];
                let q = m.div(lm).expect("divisibility checked");
                let k = Rat::from(-(c / lc));
                rest = &rest + &basis[i].mul_term(&q, &k);
            }
            None => {
                rest.add_term(m.clone(), &Rat::from(-&c));
                out.add_term(m, &c);
            }
        }
    }
    out
}

fn monic(p: &MultiPoly<Rat>, order: &MonomialOrder) -> MultiPoly<Rat> {
    match p.leading_term(order) {
        Some((_, c)) => {
            let inv = Rat::from(c.recip_ref());
            p.scale(&inv)
        }
        None => p.clone(),
    }
}

fn s_poly(f: &MultiPoly<Rat>, g: &MultiPoly<Rat>, order: &MonomialOrder) -> MultiPoly<Rat> {
    let (fm, fc) = f.leading_term(order).expect("nonzero");
    let (gm, gc) = g.leading_term(order).expect("nonzero");
    let l = fm.lcm(gm);
    let a = f.mul_term(&l.div(fm).unwrap(), &Rat::from(fc.recip_ref()));
    let b = g.mul_term(&l.div(gm).unwrap(), &Rat::from(gc.recip_ref()));
    &a - &b
}

/// Buchberger's algorithm with the product and chain criteria and the normal
/// selection strategy. The output is a Gröbner basis but not necessarily reduced.
pub fn buchberger(
    generators: &[MultiPoly<Rat>],
    order: &MonomialOrder,
    budget: usize,
) -> Result<Vec<MultiPoly<Rat>>> {
    let arity = check_generators(generators, order)?;
    let mut basis: Vec<MultiPoly<Rat>> = Vec::new();
    let mut leads: Vec<Monomial> = Vec::new();
    for g in generators {
        let r = normal_form(g, &basis, order);
        if !r.is_zero() {
            let r = monic(&r, order);
            leads.push(r.leading_monomial(order).unwrap().clone());
            basis.push(r);
        }
    }
    let _ = arity;
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.insert((i, j));
        }
    }
    let mut steps = 0usize;
    while !pending.is_empty() {
        let &(i, j) = pending
            .iter()
            .min_by(|a, b| {
                let la = leads[a.0].lcm(&leads[a.1]);
                let lb = leads[b.0].lcm(&leads[b.1]);
                order.cmp(&la, &lb).then_with(|| a.cmp(b))
            })
            .unwrap();
        pending.remove(&(i, j));
        if leads[i].is_coprime(&leads[j]) {
            continue;
        }
        let l = leads[i].lcm(&leads[j]);
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && leads[k].divides(&l)
                && !pending.contains(&key(i, k))
                && !pending.contains(&key(j, k))
        });
        if chain {
            continue;
        }
        steps += 1;
        if steps > budget {
            return Err(GfnError::GroebnerBudget {
                budget,
                basis_so_far: basis.iter().map(|g| g.to_string()).collect(),
            });
        }
        let r = normal_form(&s_poly(&basis[i], &basis[j], order), &basis, order);
        if r.is_zero() {
            continue;
        }
        let r = monic(&r, order);
        let k = basis.len();
        leads.push(r.leading_monomial(order).unwrap().clone());
        basis.push(r);
        for i in 0..k {
            pending.insert((i, k));
        }
    }
    Ok(basis)
}

/// Minimalises and interreduces a Gröbner basis into the unique monic reduced
/// basis, sorted by decreasing leading monomial.
pub fn reduce(basis: &[MultiPoly<Rat>], order: &MonomialOrder) -> Vec<MultiPoly<Rat>> {
    let mut gs: Vec<MultiPoly<Rat>> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| monic(g, order))
        .collect();
    gs.sort_by(|a, b| {
        order.cmp(
            a.leading_monomial(order).unwrap(),
            b.leading_monomial(order).unwrap(),
        )
    });
    let mut minimal: Vec<MultiPoly<Rat>> = Vec::new();
    for g in gs {
        let lm = g.leading_monomial(order).unwrap();
        if minimal
            .iter()
            .all(|h| !h.leading_monomial(order).unwrap().divides(lm))
        {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for idx in 0..minimal.len() {
        let others: Vec<MultiPoly<Rat>> = minimal
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != idx)
            .map(|(_, h)| h.clone())
            .collect();
        let g = &minimal[idx];
        let (lm, lc) = g.leading_term(order).unwrap();
        let head = MultiPoly::term(lm.clone(), lc.clone());
        let tail = g - &head;
        out.push(&head + &normal_form(&tail, &others, order));
    }
    out.sort_by(|a, b| {
        order.cmp(
            b.leading_monomial(order).unwrap(),
            a.leading_monomial(order).unwrap(),
        )
    });
    out
}

/// Reduced Gröbner basis with the default step budget.
pub fn groebner_basis(
    generators: &[MultiPoly<Rat>],
    order: &MonomialOrder,
) -> Result<Vec<MultiPoly<Rat>>> {
    groebner_basis_with_budget(generators, order, DEFAULT_STEP_BUDGET)
}

pub fn groebner_basis_with_budget(
    generators: &[MultiPoly<Rat>],
    order: &MonomialOrder,
    budget: usize,
) -> Result<Vec<MultiPoly<Rat>>> {
    let basis = reduce(&buchberger(generators, order, budget)?, order);
    for g in generators {
        debug_assert!(normal_form(g, &basis, order).is_zero());
    }
    Ok(basis)
}

fn check_generators(generators: &[MultiPoly<Rat>], order: &MonomialOrder) -> Result<usize> {
    let arity = generators
        .first()
        .map(MultiPoly::arity)
        .ok_or_else(|| GfnError::usage("empty generator list"))?;
    if generators.iter().any(|g| g.arity() != arity) {
        return Err(GfnError::usage("generators have different arities"));
    }
    if generators.iter().all(MultiPoly::is_zero) {
        return Err(GfnError::usage("all generators are zero"));
    }
    if !order.check_arity(arity) {
        return Err(GfnError::usage(format!(
            "monomial order does not fit {arity} variables (weights must be nonnegative, one per variable)"
        )));
    }
    Ok(arity)
}

/// A reduced Gröbner basis of an ideal with jet coefficients. When any generator
/// has a nonzero slope, ε is adjoined as an extra last variable together with ε².
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    polys: Vec<MultiPoly<Rat>>,
    order: MonomialOrder,
    jet: bool,
    arity: usize,
}

impl GroebnerBasis {
    pub fn new(generators: &[MultiPoly<Jet>], order: &MonomialOrder) -> Result<Self> {
        Self::with_budget(generators, order, DEFAULT_STEP_BUDGET)
    }

    pub fn with_budget(
        generators: &[MultiPoly<Jet>],
        order: &MonomialOrder,
        budget: usize,
    ) -> Result<Self> {
        let arity = generators
            .first()
            .map(MultiPoly::arity)
            .ok_or_else(|| GfnError::usage("empty generator list"))?;
        if !order.check_arity(arity) {
            return Err(GfnError::usage(format!(
                "monomial order does not fit {arity} variables"
            )));
        }
        let jet = generators.iter().any(MultiPoly::has_slope);
        let (gens, order) = if jet {
            let mut gens: Vec<MultiPoly<Rat>> =
                generators.iter().map(MultiPoly::lift_epsilon).collect();
            let mut eps2 = vec![0; arity];
            eps2.push(2);
            gens.push(MultiPoly::term(Monomial::new(eps2), Rat::from(1)));
            (gens, order.extended())
        } else {
            (
                generators.iter().map(MultiPoly::value_part).collect(),
                order.clone(),
            )
        };
        let polys = groebner_basis_with_budget(&gens, &order, budget)?;
        Ok(GroebnerBasis {
            polys,
            order,
            jet,
            arity,
        })
    }

    /// Basis polynomials, in the ε-extended ring when [`is_jet`](Self::is_jet).
    pub fn polys(&self) -> &[MultiPoly<Rat>] {
        &self.polys
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn is_jet(&self) -> bool {
        self.jet
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys
            .iter()
            .map(|g| g.leading_monomial(&self.order).unwrap().clone())
            .collect()
    }

    pub fn lift(&self, p: &MultiPoly<Jet>) -> MultiPoly<Rat> {
        if self.jet {
            p.lift_epsilon()
        } else {
            p.value_part()
        }
    }

    pub fn project(&self, p: &MultiPoly<Rat>) -> MultiPoly<Jet> {
        if self.jet {
            MultiPoly::from_lifted(p)
        } else {
            p.to_jet()
        }
    }

    /// Normal form in the working ring (ε-extended when jet).
    pub fn normal_form_lifted(&self, p: &MultiPoly<Rat>) -> MultiPoly<Rat> {
        normal_form(p, &self.polys, &self.order)
    }

    pub fn normal_form(&self, p: &MultiPoly<Jet>) -> MultiPoly<Jet> {
        if !self.jet && p.has_slope() {
            // an ideal without ε acts on value and slope parts separately
            let v = normal_form(&p.value_part(), &self.polys, &self.order).to_jet();
            let s = normal_form(&p.slope_part(), &self.polys, &self.order).to_jet();
            return &v + &s.scale(&Jet::epsilon());
        }
        self.project(&self.normal_form_lifted(&self.lift(p)))
    }

    pub fn contains(&self, p: &MultiPoly<Jet>) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Monomials of the working ring not divisible by any leading monomial, in
    /// increasing order; `None` if the quotient is infinite-dimensional.
    pub fn standard_monomials(&self) -> Option<Vec<Monomial>> {
        let leads = self.leading_monomials();
        let n = self.polys.first().map_or(self.arity, MultiPoly::arity);
        for v in 0..n {
            if !leads.iter().any(|m| m.pure_power_var() == Some(v)) {
                return None;
            }
        }
        let mut seen: BTreeSet<Monomial> = BTreeSet::new();
        let mut frontier = vec![Monomial::one(n)];
        while let Some(m) = frontier.pop() {
            if leads.iter().any(|l| l.divides(&m)) || !seen.insert(m.clone()) {
                continue;
            }
            for v in 0..n {
                frontier.push(m.mul(&Monomial::var(n, v)));
            }
        }
        let mut out: Vec<Monomial> = seen.into_iter().collect();
        out.sort_by(|a, b| self.order.cmp(a, b));
        Some(out)
    }

    /// Dimension over ℚ of the quotient of the working ring.
    pub fn quotient_dimension(&self) -> Option<usize> {
        self.standard_monomials().map(|s| s.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;

    type Q = MultiPoly<Rat>;

    fn v(n: usize, i: usize) -> Q {
        Q::var(n, i)
    }

    fn c(n: usize, k: i64) -> Q {
        Q::constant(n, Rat::from(k))
    }

    #[test]
    fn monomial_ideal_is_already_reduced() {
        let gens: Vec<Q> = (0..3).map(|i| &c(3, 3) * &v(3, i).pow(2)).collect();
        let gb = groebner_basis(&gens, &MonomialOrder::GrevLex).unwrap();
        let expect: BTreeSet<String> = ["x0^2", "x1^2", "x2^2"]
            .iter()
            .map(|s| format!("1*{s}"))
            .collect();
        let got: BTreeSet<String> = gb.iter().map(|g| g.to_string()).collect();
        assert_eq!(got, expect);
        assert!(normal_form(&v(3, 0).pow(3), &gens, &MonomialOrder::GrevLex).is_zero());
    }

    #[test]
    fn y_cubed_enters_the_basis() {
        let (x, y) = (v(2, 0), v(2, 1));
        let gens = vec![&(&x * &x) + &(&y * &y), &x * &y];
        let gb = groebner_basis(&gens, &MonomialOrder::GrevLex).unwrap();
        let y3 = y.pow(3);
        assert!(gb.contains(&y3));
        // y³ = y·(x² + y²) − x·(xy)
        let cof = &(&y * &gens[0]) - &(&x * &gens[1]);
        assert_eq!(cof, y3);
    }

    #[test]
    fn budget_exhaustion_reports_partial_basis() {
        let (x, y) = (v(2, 0), v(2, 1));
        let gens = vec![&(&x * &x) + &(&y * &y), &x * &y];
        match groebner_basis_with_budget(&gens, &MonomialOrder::GrevLex, 0) {
            Err(GfnError::GroebnerBudget {
                budget,
                basis_so_far,
            }) => {
                assert_eq!(budget, 0);
                assert_eq!(basis_so_far.len(), 2);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn jet_normal_form_of_x_squared() {
        // 3x² + s·yz + ε·y etc. at s = 1
        let n = 3;
        let j = |p: Q| p.to_jet();
        let (x, y, z) = (j(v(n, 0)), j(v(n, 1)), j(v(n, 2)));
        let three = MultiPoly::constant(n, Jet::from(3));
        let eps = MultiPoly::constant(n, Jet::epsilon());
        let gens = vec![
            &(&(&three * &(&x * &x)) + &(&y * &z)) + &(&eps * &y),
            &(&(&three * &(&y * &y)) + &(&x * &z)) + &(&eps * &x),
            &(&three * &(&z * &z)) + &(&x * &y),
        ];
        let gb = GroebnerBasis::new(&gens, &MonomialOrder::GrevLex).unwrap();
        assert!(gb.is_jet());
        assert_eq!(gb.quotient_dimension(), Some(16));
        let third = MultiPoly::constant(n, Jet::constant(rat(-1, 3)));
        let expect = &(&third * &(&y * &z)) + &(&(&third * &eps) * &y);
        assert_eq!(gb.normal_form(&(&x * &x)), expect);
        for g in &gens {
            assert!(gb.contains(g));
        }
    }

    #[test]
    fn infinite_quotient_is_detected() {
        let (x, y) = (v(2, 0), v(2, 1));
        let gb = GroebnerBasis::new(&[(&x * &y).to_jet()], &MonomialOrder::GrevLex).unwrap();
        assert_eq!(gb.quotient_dimension(), None);
    }

    #[test]
    fn empty_and_mismatched_generators_are_rejected() {
        assert!(matches!(
            groebner_basis(&[], &MonomialOrder::GrevLex),
            Err(GfnError::Usage(_))
        ));
        let gens = vec![v(2, 0), v(3, 0)];
        assert!(matches!(
            groebner_basis(&gens, &MonomialOrder::GrevLex),
            Err(GfnError::Usage(_))
        ));
        let w = MonomialOrder::Weighted(vec![rat(1, 1)]);
        assert!(matches!(
            groebner_basis(&[v(2, 0)], &w),
            Err(GfnError::Usage(_))
        ));
    }
}
