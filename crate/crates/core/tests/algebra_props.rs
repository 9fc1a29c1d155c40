use gfn_core::exact_algebra::{
    groebner_basis, groebner_basis_with_budget, normal_form, GroebnerBasis,
};
use gfn_core::milnor_ring::{build_model, multiplication_table};
use gfn_core::{GfnError, Jet, ModelName, Monomial, MonomialOrder, MultiPoly, Rat, SAssignment};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| Rat::from((p, q)))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    small_rat().prop_filter("nonzero", |r| *r != 0)
}

fn poly(arity: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = MultiPoly<Rat>> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, arity), small_rat()),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        MultiPoly::from_terms(arity, terms.into_iter().map(|(e, c)| (Monomial::new(e), c))).unwrap()
    })
}

/// Jacobian generators of Ẽ6 at a nondegenerate marginal value.
fn e6_ideal(s: &Rat) -> Vec<MultiPoly<Rat>> {
    let m = build_model(ModelName::E6t);
    let point = SAssignment::marginal(&m, s.clone());
    m.jacobian_generators(&point)
        .unwrap()
        .iter()
        .map(MultiPoly::value_part)
        .collect()
}

fn e6_marginal() -> impl Strategy<Value = Rat> {
    small_rat().prop_filter("nondegenerate", |s| *s != -3)
}

fn orders() -> Vec<MonomialOrder> {
    let third = Rat::from((1, 3));
    vec![
        MonomialOrder::GrevLex,
        MonomialOrder::GrLex,
        MonomialOrder::Weighted(vec![third.clone(), third.clone(), third]),
        MonomialOrder::Weighted(vec![Rat::from(1), Rat::from(2), Rat::from(3)]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_linear(s in e6_marginal(), p in poly(3, 4, 6), q in poly(3, 4, 6), k in small_rat()) {
        let order = MonomialOrder::GrevLex;
        let gb = groebner_basis(&e6_ideal(&s), &order).unwrap();
        let nf = |x: &MultiPoly<Rat>| normal_form(x, &gb, &order);
        prop_assert_eq!(nf(&(&p + &q)), &nf(&p) + &nf(&q));
        prop_assert_eq!(nf(&p.scale(&k)), nf(&p).scale(&k));
    }

    #[test]
    fn remainder_lies_in_ideal(s in e6_marginal(), p in poly(3, 5, 6)) {
        let order = MonomialOrder::GrevLex;
        let gb = groebner_basis(&e6_ideal(&s), &order).unwrap();
        let r = normal_form(&p, &gb, &order);
        prop_assert_eq!(normal_form(&r, &gb, &order), r.clone());
        prop_assert!(normal_form(&(&p - &r), &gb, &order).is_zero());
        for lm in gb.iter().filter_map(|g| g.leading_monomial(&order)) {
            prop_assert!(r.terms().all(|(m, _)| !lm.divides(m)));
        }
    }

    #[test]
    fn membership_does_not_depend_on_order(s in e6_marginal(), p in poly(3, 3, 4), q in poly(3, 2, 3)) {
        let gens = e6_ideal(&s);
        // an element of the ideal plus a random perturbation
        let member = &(&p * &gens[0]) + &(&q * &gens[2]);
        let mut dims = Vec::new();
        for order in orders() {
            let gb = groebner_basis(&gens, &order).unwrap();
            prop_assert!(normal_form(&member, &gb, &order).is_zero());
            let nf_q = normal_form(&q, &gb, &order);
            let in_ideal = nf_q.is_zero();
            dims.push(in_ideal);
            let jet_gens: Vec<MultiPoly<Jet>> = gens.iter().map(MultiPoly::to_jet).collect();
            let dim = GroebnerBasis::new(&jet_gens, &order).unwrap().quotient_dimension();
            prop_assert_eq!(dim, Some(8));
        }
        prop_assert!(dims.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn jet_slope_is_truncated_difference(a in small_rat(), b in small_rat(), c in small_rat(), d in small_rat()) {
        let x = Jet::new(a.clone(), b.clone());
        let y = Jet::new(c.clone(), d.clone());
        let prod = &x * &y;
        // p(ε) = (a + bε)(c + dε) truncated to degree ≤ 1, sampled at ε = 0 and ε = 1
        let at0 = Rat::from(&a * &c);
        let at1 = Rat::from(&a * &c) + Rat::from(&a * &d) + Rat::from(&b * &c);
        prop_assert_eq!(prod.value.clone(), at0.clone());
        prop_assert_eq!(prod.slope, at1 - at0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Reduced bases agree however the generators are presented.
    #[test]
    fn buchberger_is_confluent(
        s in e6_marginal(),
        perm in Just([0usize, 1, 2]).prop_shuffle(),
        scales in prop::collection::vec(nonzero_rat(), 3),
        mix in small_rat(),
    ) {
        let order = MonomialOrder::GrevLex;
        let gens = e6_ideal(&s);
        let reference = groebner_basis(&gens, &order).unwrap();
        let mut shuffled: Vec<MultiPoly<Rat>> = perm.iter().zip(&scales).map(|(&i, k)| gens[i].scale(k)).collect();
        let extra = &shuffled[0] + &shuffled[1].scale(&mix);
        shuffled.push(extra);
        prop_assert_eq!(groebner_basis(&shuffled, &order).unwrap(), reference);
    }

    #[test]
    fn random_ideals_are_confluent(
        gens in prop::collection::vec(poly(2, 3, 3), 1..=3).prop_filter("nonzero", |g| g.iter().any(|p| !p.is_zero())),
        perm_seed in 0usize..6,
    ) {
        let order = MonomialOrder::GrevLex;
        let first = match groebner_basis_with_budget(&gens, &order, 2000) {
            Ok(b) => b,
            Err(GfnError::GroebnerBudget { .. }) => return Err(TestCaseError::reject("budget")),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let mut rotated = gens.clone();
        rotated.rotate_left(perm_seed % gens.len());
        rotated.reverse();
        let second = groebner_basis_with_budget(&rotated, &order, 2000).unwrap();
        prop_assert_eq!(&first, &second);
        for g in &gens {
            prop_assert!(normal_form(g, &first, &order).is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tables_are_associative(model in prop::sample::select(ModelName::ALL.to_vec()), s in small_rat(), jet in 2usize..=6) {
        let m = build_model(model);
        prop_assume!(m.discriminant_at(&s) != 0);
        let point = SAssignment::marginal(&m, s).with_jet(jet);
        let table = multiplication_table(&m, &point).unwrap();
        prop_assert_eq!(table.associativity_defects(), 0);
        prop_assert!(table.is_commutative());
        prop_assert!(table.has_unit());
    }
}
