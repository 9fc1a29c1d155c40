//! One line per acceptance criterion; exits non-zero if any fails.

use std::collections::HashMap;
use std::time::Instant;

use rug::ops::Pow;
use rug::{Complex, Float};

use gfn_core::exact_algebra::rat;
use gfn_core::flat_coords::{dt_ds_quotient, invert, linearization, t_of_s, MarginalMap};
use gfn_core::g_function::{
    coxeter_g_coefficient, d4_g_shift, dg_dt_ring, folding_g, g_closed, scaling_anomaly,
    shift_constant, FoldingSystem, RingTraces, SpectrumData,
};
use gfn_core::getzler::{getzler_scan, PolynomialG, PolynomialPrepotential};
use gfn_core::halphen::d4_oracles;
use gfn_core::milnor_ring::{build_model, multiplication_table};
use gfn_core::numeric::cabs;
use gfn_core::special_functions::{dedekind_eta, hyp2f1, theta_constants, HypParams};
use gfn_core::{ModelName, MultiPoly, Precision, Rat, Result, SAssignment};

const SEED: u64 = 20240601;

type Criterion = (&'static str, fn() -> Result<Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn prec() -> Precision {
    Precision::new(64).unwrap()
}

fn sci(x: &Float) -> String {
    format!("{:.3e}", x.to_f64())
}

fn max_of(xs: impl IntoIterator<Item = Float>) -> Float {
    xs.into_iter().fold(
        Float::with_val(prec().bits(), 0),
        |a, b| if b > a { b } else { a },
    )
}

fn grid(model: ModelName, count: usize) -> Vec<Float> {
    let bits = prec().bits();
    let (lo, hi) = MarginalMap::new(model).s_domain(prec());
    let (lo, hi) = (lo * 0.9f64, hi * 0.9f64);
    (0..count)
        .map(|k| {
            let frac = Float::with_val(bits, 2 * k + 1) / (2 * count) as u64;
            Float::with_val(bits, &hi - &lo) * frac + &lo
        })
        .collect()
}

fn fd_g(model: ModelName, t: &Float) -> Result<Float> {
    let bits = prec().bits();
    let h = Float::with_val(bits, 1e-13f64);
    let at = |k: i32| g_closed(model, &(Float::with_val(bits, &h * k) + t), prec());
    Ok((at(-2)? - at(2)? + (at(1)? - at(-1)?) * 8u32) / (h * 12u32))
}

fn criterion_1() -> Result<Outcome> {
    let model = build_model(ModelName::E6t);
    let mut errs = Vec::new();
    for s in [rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1), rat(3, 2)] {
        let sf = prec().rat(&s);
        let t = t_of_s(ModelName::E6t, &sf, prec())?;
        let lin = linearization(ModelName::E6t, &sf, prec())?;
        let ring = dg_dt_ring(&model, &lin, &RingTraces::compute(&model, &s)?, 2)?;
        errs.push((ring.value - fd_g(ModelName::E6t, &t)?).abs());
    }
    let worst = max_of(errs);
    Ok(Outcome {
        pass: worst < 1e-10,
        detail: format!("max |ring - fd| = {} (tol 1e-10, 5 points)", sci(&worst)),
    })
}

fn criterion_2() -> Result<Outcome> {
    let model = build_model(ModelName::E6t);
    let mut bad = Vec::new();
    for s in [
        rat(1, 4),
        rat(1, 2),
        rat(3, 4),
        rat(1, 1),
        rat(3, 2),
        rat(-2, 1),
        rat(2, 5),
    ] {
        let u = Rat::from(-s.clone().pow(3u32) / 27);
        let one_minus = Rat::from(1 - u);
        let s2 = Rat::from(s.clone().square_ref());
        let expect = Rat::from(-rat(2, 27) * &s2) / &one_minus;
        let t = multiplication_table(
            &model,
            &SAssignment::marginal(&model, s.clone()).with_jet(7),
        )?;
        for p in [5, 6, 8] {
            if t.get(p, 2, p).slope != expect {
                bad.push(format!("c^{p}_{p}2 at s={s}"));
            }
        }
        for p in [1, 2, 3, 4, 7] {
            if t.get(p, 2, p).slope != 0 {
                bad.push(format!("c^{p}_{p}2 at s={s}"));
            }
        }
        let mut total = Rat::new();
        for p in 1..=8 {
            total += &t.get(p, 2, p).slope;
        }
        if total != Rat::from(-rat(2, 9) * &s2) / &one_minus {
            bad.push(format!("trace at s={s}"));
        }
        if s == 1 && total != -rat(2, 9) * rat(27, 28) {
            bad.push("trace at s=1 vs -(2/9)(27/28)".into());
        }
    }
    let pass = bad.is_empty();
    let detail = if pass {
        "exact on 7 rational s".to_string()
    } else {
        format!("mismatch: {}", bad.join(", "))
    };
    Ok(Outcome { pass, detail })
}

fn criterion_3() -> Result<Outcome> {
    let bits = prec().bits();
    let map = MarginalMap::new(ModelName::E6t);
    let gp = HypParams::from_ints((1, 3), (1, 3), (2, 3));
    let (mut w, mut l, mut j) = (Vec::new(), Vec::new(), Vec::new());
    for s in grid(ModelName::E6t, 20) {
        let u = Float::with_val(bits, s.clone().pow(3u32)) / -27i32;
        let g = hyp2f1(&gp, &u, 0, prec())?;
        let one_minus = Float::with_val(bits, 1 - &u);
        let wr = Float::with_val(bits, 1) / (one_minus.clone() * g.clone().square());
        let q = dt_ds_quotient(ModelName::E6t, &s, prec())?;
        w.push(Float::with_val(bits, &wr - &q).abs());
        let dlog_dt = -map.du_ds(&s) / one_minus / &q;
        let lhs = Float::with_val(bits, s.square_ref()) * g.square();
        l.push((lhs - dlog_dt * 9u32).abs());
    }
    for s in grid(ModelName::E6t, 10) {
        let det = linearization(ModelName::E6t, &s, prec())?.jacobian_determinant();
        let ds_dt = Float::with_val(bits, 1) / dt_ds_quotient(ModelName::E6t, &s, prec())?;
        j.push((det - ds_dt.pow(4u32)).abs());
    }
    let (w, l, j) = (max_of(w), max_of(l), max_of(j));
    Ok(Outcome {
        pass: w < 1e-30 && l < 1e-30 && j < 1e-30,
        detail: format!(
            "dt/ds {} / s^2g^2 {} / jacobian {} (tol 1e-30)",
            sci(&w),
            sci(&l),
            sci(&j)
        ),
    })
}

fn criterion_4() -> Result<Outcome> {
    let mut bad = Vec::new();
    for model in ModelName::ALL {
        if scaling_anomaly(&SpectrumData::of_model(&build_model(model))) != 0 {
            bad.push(format!("{model} gamma"));
        }
    }
    for (system, gamma) in [
        (FoldingSystem::B3_11, rat(-1, 48)),
        (FoldingSystem::B2_21, rat(-1, 24)),
        (FoldingSystem::G2_11, rat(-1, 24)),
        (FoldingSystem::G2_31, rat(-1, 18)),
    ] {
        if folding_g(system).gamma != gamma {
            bad.push(format!("{} gamma", system.label()));
        }
    }
    let table: [(&str, Option<(u32, Rat)>); 9] = [
        ("An", None),
        ("Dn", None),
        ("E6", None),
        ("E7", None),
        ("E8", None),
        ("Bn", Some((4, rat(-1, 48)))),
        ("F4", Some((4, rat(-1, 48)))),
        ("H3", Some((5, rat(-1, 20)))),
        ("H4", Some((5, rat(-1, 20)))),
    ];
    for (group, expect) in table {
        let got = coxeter_g_coefficient(group)?;
        if got != expect.into_iter().collect::<Vec<_>>() {
            bad.push(format!("coxeter {group}"));
        }
    }
    let pass = bad.is_empty();
    let detail = if pass {
        "all exact".to_string()
    } else {
        format!("mismatch: {}", bad.join(", "))
    };
    Ok(Outcome { pass, detail })
}

fn criterion_5() -> Result<Outcome> {
    let p = prec();
    let cubic = getzler_scan(
        &PolynomialPrepotential::cubic(),
        &PolynomialG::zero(1),
        5,
        SEED,
        p,
    )?
    .max_residual;
    let a2 = PolynomialPrepotential::a2();
    let zero = getzler_scan(&a2, &PolynomialG::zero(2), 5, SEED, p)?.max_residual;
    let control =
        getzler_scan(&a2, &PolynomialG::new(MultiPoly::var(2, 1)), 5, SEED, p)?.max_residual;
    let (d4, detail_d4) = match d4_oracles(p) {
        Ok((f, g)) => {
            let r = getzler_scan(&f, &g, 3, SEED, p)?.max_residual;
            (r < 1e-20, format!("d4 {} under {}", sci(&r), f.convention))
        }
        Err(e) => (false, format!("d4 convention failed: {e}")),
    };
    Ok(Outcome {
        pass: cubic.is_zero() && zero < 1e-30 && control > 1e-6 && d4,
        detail: format!(
            "cubic {} / a2 {} (tol 1e-30) / control {} (> 1e-6) / {detail_d4} (tol 1e-20)",
            sci(&cubic),
            sci(&zero),
            sci(&control)
        ),
    })
}

fn criterion_6() -> Result<Outcome> {
    let bits = prec().bits();
    let mut parts = Vec::new();
    let mut pass = true;
    for model in ModelName::ALL {
        let mut errs = Vec::new();
        for s in grid(model, 20) {
            let t = t_of_s(model, &s, prec())?;
            let back = t_of_s(model, &invert(model, &t, prec())?.s, prec())?;
            errs.push(Float::with_val(bits, &back - &t).abs());
        }
        let worst = max_of(errs);
        pass &= worst < 1e-50;
        parts.push(format!("{model} {}", sci(&worst)));
    }
    let mut iters = 0;
    for s in [rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1), rat(3, 2)] {
        let t = t_of_s(ModelName::E6t, &prec().rat(&s), prec())?;
        let inv = invert(ModelName::E6t, &t, prec())?;
        iters = iters.max(inv.newton_steps + inv.bisection_steps);
    }
    pass &= iters <= 20;
    Ok(Outcome {
        pass,
        detail: format!(
            "{} (tol 1e-50) / max iterations {iters} (<= 20)",
            parts.join(", ")
        ),
    })
}

type Exps = [u32; 3];

fn monomials_of_degree(d: u32) -> Vec<Exps> {
    let mut out = Vec::new();
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push([i, j, d - i - j]);
        }
    }
    out
}

/// Degree-`d` normal forms in the span of `basis`, from the Macaulay matrix of `gens`.
fn macaulay_normal_forms(
    gens: &[Vec<(Exps, Rat)>],
    basis: &[Exps],
    d: u32,
) -> Option<HashMap<Exps, Vec<Rat>>> {
    let mut cols: Vec<Exps> = monomials_of_degree(d)
        .into_iter()
        .filter(|m| !basis.contains(m))
        .collect();
    let non_basis = cols.len();
    let basis_cols: Vec<Exps> = basis
        .iter()
        .copied()
        .filter(|m| m.iter().sum::<u32>() == d)
        .collect();
    cols.extend(basis_cols.iter().copied());
    let index: HashMap<Exps, usize> = cols.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    if d >= 2 {
        for shift in monomials_of_degree(d - 2) {
            for g in gens {
                let mut row = vec![Rat::new(); cols.len()];
                for (e, c) in g {
                    let m = [e[0] + shift[0], e[1] + shift[1], e[2] + shift[2]];
                    row[index[&m]] += c;
                }
                rows.push(row);
            }
        }
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols.len() {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rat::from(1) / rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col].clone();
                for k in 0..cols.len() {
                    let t = Rat::from(&f * &rows[r][k]);
                    rows[i][k] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots != (0..non_basis).collect::<Vec<_>>() {
        return None;
    }
    let mut out = HashMap::new();
    for (i, m) in cols.iter().enumerate() {
        let mut v = vec![Rat::new(); basis.len()];
        if i < non_basis {
            for (k, b) in basis_cols.iter().enumerate() {
                v[basis.iter().position(|x| x == b).unwrap()] = -rows[i][non_basis + k].clone();
            }
        } else {
            v[basis.iter().position(|x| x == m).unwrap()] = Rat::from(1);
        }
        out.insert(*m, v);
    }
    Some(out)
}

fn criterion_7() -> Result<Outcome> {
    // W = x³ + y³ + z³ + s·xyz at s = 1
    let gens: Vec<Vec<(Exps, Rat)>> = vec![
        vec![([2, 0, 0], rat(3, 1)), ([0, 1, 1], rat(1, 1))],
        vec![([0, 2, 0], rat(3, 1)), ([1, 0, 1], rat(1, 1))],
        vec![([0, 0, 2], rat(3, 1)), ([1, 1, 0], rat(1, 1))],
    ];
    let model = build_model(ModelName::E6t);
    let basis: Vec<Exps> = model
        .basis
        .iter()
        .map(|m| [m.exps()[0], m.exps()[1], m.exps()[2]])
        .collect();
    let mut forms = HashMap::new();
    for d in 0..=6 {
        match macaulay_normal_forms(&gens, &basis, d) {
            Some(f) => forms.extend(f),
            None => {
                return Ok(Outcome {
                    pass: false,
                    detail: format!("basis not complementary in degree {d}"),
                })
            }
        }
    }
    let table = multiplication_table(&model, &SAssignment::marginal(&model, rat(1, 1)))?;
    let mut mismatches = 0;
    for a in 0..8 {
        for b in 0..8 {
            let m = [
                basis[a][0] + basis[b][0],
                basis[a][1] + basis[b][1],
                basis[a][2] + basis[b][2],
            ];
            let oracle = &forms[&m];
            if (0..8).any(|c| table.c[a][b][c].value != oracle[c] || table.c[a][b][c].slope != 0) {
                mismatches += 1;
            }
        }
    }
    let mut defects = 0;
    let mut tables = 0;
    for name in ModelName::ALL {
        let m = build_model(name);
        for s in [rat(1, 2), rat(1, 1), rat(-3, 5)] {
            for jet in [None, Some(2), Some(m.n - 2)] {
                let mut point = SAssignment::marginal(&m, s.clone());
                point.jet = jet;
                defects += multiplication_table(&m, &point)?.associativity_defects();
                tables += 1;
            }
        }
    }
    Ok(Outcome {
        pass: mismatches == 0 && defects == 0,
        detail: format!("{mismatches}/64 products differ from Macaulay oracle / {defects} associativity defects in {tables} tables"),
    })
}

fn criterion_8() -> Result<Outcome> {
    let p = prec();
    let bits = p.bits();
    let c = |re: f64, im: f64| Complex::with_val(bits, (re, im));
    let root = Complex::with_val(bits, (0, p.pi() / 12u32)).exp();
    let shift_expect = Complex::with_val(bits, (0, -p.pi() / 24u32));
    let (mut eta, mut theta, mut shift) = (Vec::new(), Vec::new(), Vec::new());
    for tau in [c(0.0, 1.0), c(0.25, 1.5), c(-0.3, 2.0), c(0.45, 1.1)] {
        let ratio =
            dedekind_eta(&Complex::with_val(bits, &tau + 1u32), p)? / dedekind_eta(&tau, p)?;
        eta.push(cabs(&(ratio - &root)));
        let [t2, t3, t4] = theta_constants(&tau, p)?;
        let e = dedekind_eta(&tau, p)?;
        let lhs = Complex::with_val(bits, &t2 * &t3) * &t4;
        theta.push(cabs(&(lhs - Complex::with_val(bits, e.pow(3u32)) * 2u32)));
        shift.push(cabs(&(d4_g_shift(&tau, p)? - &shift_expect)));
    }
    let (eta, theta, shift) = (max_of(eta), max_of(theta), max_of(shift));
    let k = shift_constant(8);
    Ok(Outcome {
        pass: eta < 1e-40 && theta < 1e-40 && shift < 1e-30 && k == rat(-1, 6),
        detail: format!(
            "eta(t+1) {} / theta {} (tol 1e-40) / D4 shift {} (tol 1e-30) / e6t log t^n coefficient {k}",
            sci(&eta),
            sci(&theta),
            sci(&shift)
        ),
    })
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("two-route G' agreement", criterion_1),
        ("e6t jet structure constants", criterion_2),
        ("wronskian identities", criterion_3),
        ("anomalies and coefficient tables", criterion_4),
        ("getzler residual", criterion_5),
        ("inversion round trip", criterion_6),
        ("algebra kernel", criterion_7),
        ("modular data", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {} {:<34} {} [{secs:.1}s] {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
