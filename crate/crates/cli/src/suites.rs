use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Float};

use gfn_core::exact_algebra::rat;
use gfn_core::flat_coords::{
    dt_ds_quotient, dt_ds_wronskian, invert, linearization, t_of_s, MarginalMap,
};
use gfn_core::g_function::{
    coxeter_g_coefficient, d4_g_shift, dg_dt_ring, dg_dt_symmetric, folding_g, g_closed,
    scaling_anomaly, shift_constant, FoldingSystem, RingTraces, SpectrumData,
};
use gfn_core::getzler::{
    getzler_scan, wdvv_residual, PolynomialG, PolynomialPrepotential, PrepotentialOracle,
};
use gfn_core::halphen::{
    candidate_with_derivative, d4_oracles, halphen_integrate, halphen_residual, theta_candidate,
    StepControl, ETA_RELATION, HALPHEN_TOLERANCE,
};
use gfn_core::milnor_ring::{build_model, hessian_mult_det, mult_det};
use gfn_core::numeric::cabs;
use gfn_core::special_functions::{dedekind_eta, log_eta_derivative, theta_constants};
use gfn_core::{GfnError, ModelName, MultiPoly, Precision, Rat, Result, SAssignment};

use crate::config::RunConfig;
use crate::report::{Check, SuiteReport};

pub const SUITES: [&str; 10] = [
    "e6-two-route",
    "wronskian",
    "roundtrip",
    "anomalies",
    "coxeter-table",
    "folding-table",
    "getzler-a2",
    "getzler-d4",
    "halphen",
    "hessian-tau",
];

/// Default marginal grid for Ẽ6.
pub fn default_e6_grid() -> Vec<Rat> {
    vec![rat(1, 4), rat(1, 2), rat(3, 4), rat(1, 1), rat(3, 2)]
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let checks = match name {
        "e6-two-route" => e6_two_route(cfg)?,
        "wronskian" => wronskian(cfg)?,
        "roundtrip" => roundtrip(cfg)?,
        "anomalies" => anomalies(),
        "coxeter-table" => coxeter_table(cfg)?,
        "folding-table" => folding_table(cfg)?,
        "getzler-a2" => getzler_a2(cfg)?,
        "getzler-d4" => getzler_d4(cfg)?,
        "halphen" => halphen(cfg)?,
        "hessian-tau" => hessian_tau(cfg)?,
        _ => {
            return Err(GfnError::Usage(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )));
        }
    };
    Ok(SuiteReport::new(
        name,
        cfg.precision.digits(),
        cfg.seed,
        checks,
    ))
}

fn models(cfg: &RunConfig) -> Vec<ModelName> {
    cfg.model
        .map_or_else(|| ModelName::ALL.to_vec(), |m| vec![m])
}

/// Five-point central difference of `G(t)` with step `10^(−digits/5)`.
pub fn g_derivative_fd(model: ModelName, t: &Float, prec: Precision) -> Result<Float> {
    let bits = prec.bits();
    let h = prec.ten_pow_neg((prec.digits() / 5) as i32);
    let at = |k: i32| -> Result<Float> {
        let x = Float::with_val(bits, &h * k) + t;
        g_closed(model, &x, prec)
    };
    let num = at(-2)? - at(2)? + (at(1)? - at(-1)?) * 8u32;
    Ok(num / (h * 12u32))
}

fn e6_two_route(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "e6-two-route";
    if cfg.model.is_some_and(|m| m != ModelName::E6t) {
        return Err(GfnError::Usage("e6-two-route runs on e6t only".into()));
    }
    let prec = cfg.precision;
    let tol = cfg.tol_or(1e-10);
    let mut grid = cfg.s_grid.clone().unwrap_or_else(default_e6_grid);
    grid.truncate(cfg.points_or(grid.len()));
    let model = build_model(ModelName::E6t);
    let mut checks = Vec::new();
    for s in &grid {
        let sf = prec.rat(s);
        let t = t_of_s(ModelName::E6t, &sf, prec)?;
        let fd = g_derivative_fd(ModelName::E6t, &t, prec)?;
        let lin = linearization(ModelName::E6t, &sf, prec)?;
        let traces = RingTraces::compute(&model, s)?;
        let ring = dg_dt_ring(&model, &lin, &traces, 2)?;
        checks.push(Check::close(
            SUITE,
            format!("ring mu=2 s={s}"),
            &ring.value,
            &fd,
            tol,
        ));
        let sym = dg_dt_symmetric(&model, &lin, &traces)?;
        checks.push(Check::close(
            SUITE,
            format!("symmetric s={s}"),
            &sym,
            &fd,
            tol,
        ));
    }
    Ok(checks)
}

/// `count` marginal values spread over 90% of the admissible interval.
pub fn sample_grid(model: ModelName, count: usize, prec: Precision) -> Vec<Float> {
    let (lo, hi) = MarginalMap::new(model).s_domain(prec);
    let bits = prec.bits();
    let lo = lo * 0.9f64;
    let hi = hi * 0.9f64;
    let width = Float::with_val(bits, &hi - &lo);
    (0..count)
        .map(|k| {
            let frac = Float::with_val(bits, 2 * k + 1) / (2 * count) as u64;
            Float::with_val(bits, &width * &frac) + &lo
        })
        .collect()
}

fn wronskian(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "wronskian";
    let prec = cfg.precision;
    let bits = prec.bits();
    let tol = cfg.tol_or(1e-30);
    let n = cfg.points_or(20);
    let mut checks = Vec::new();
    for model in models(cfg) {
        for s in sample_grid(model, n, prec) {
            let w = dt_ds_wronskian(model, &s, prec)?;
            let q = dt_ds_quotient(model, &s, prec)?;
            checks.push(Check::close(
                SUITE,
                format!("{model} dt/ds s={}", s.to_f64()),
                &w,
                &q,
                tol,
            ));
        }
    }
    if models(cfg).contains(&ModelName::E6t) {
        let map = MarginalMap::new(ModelName::E6t);
        for s in sample_grid(ModelName::E6t, n, prec) {
            let u = map.u_of_s(&s);
            let g = map.g(&u, prec)?;
            let lhs = Float::with_val(bits, s.square_ref()) * Float::with_val(bits, g.square_ref());
            let dlog_ds = -map.du_ds(&s) / Float::with_val(bits, 1 - &u);
            let rhs = dlog_ds / dt_ds_quotient(ModelName::E6t, &s, prec)? * 9u32;
            checks.push(Check::close(
                SUITE,
                format!("e6t s^2 g^2 s={}", s.to_f64()),
                &lhs,
                &rhs,
                tol,
            ));
        }
        for s in sample_grid(ModelName::E6t, n.div_ceil(2), prec) {
            let det = linearization(ModelName::E6t, &s, prec)?.jacobian_determinant();
            let ds_dt = Float::with_val(bits, 1) / dt_ds_quotient(ModelName::E6t, &s, prec)?;
            let reference = ds_dt.pow(4u32);
            checks.push(Check::close(
                SUITE,
                format!("e6t jacobian s={}", s.to_f64()),
                &det,
                &reference,
                tol,
            ));
        }
    }
    Ok(checks)
}

fn roundtrip(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "roundtrip";
    let prec = cfg.precision;
    let tol = cfg.tol_or(1e-50);
    let n = cfg.points_or(20);
    let mut checks = Vec::new();
    for model in models(cfg) {
        let mut worst = Float::with_val(prec.bits(), 0);
        let mut max_iter = 0;
        for s in sample_grid(model, n, prec) {
            let t = t_of_s(model, &s, prec)?;
            let inv = invert(model, &t, prec)?;
            let back = t_of_s(model, &inv.s, prec)?;
            let err = Float::with_val(prec.bits(), &back - &t).abs();
            if err > worst {
                worst = err;
            }
            max_iter = max_iter.max(inv.newton_steps + inv.bisection_steps);
        }
        checks.push(Check::bound(
            SUITE,
            format!("{model} max |t(s(t)) - t|"),
            &worst,
            tol,
            false,
        ));
        checks.push(Check::flag(
            SUITE,
            format!("{model} iterations"),
            max_iter.to_string(),
            "<= 20",
            max_iter <= 20,
        ));
    }
    if cfg.model.is_none_or(|m| m == ModelName::E6t) {
        let mut max_iter = 0;
        for s in default_e6_grid() {
            let t = t_of_s(ModelName::E6t, &prec.rat(&s), prec)?;
            let inv = invert(ModelName::E6t, &t, prec)?;
            max_iter = max_iter.max(inv.newton_steps + inv.bisection_steps);
        }
        checks.push(Check::flag(
            SUITE,
            "e6t default grid iterations",
            max_iter.to_string(),
            "<= 20",
            max_iter <= 20,
        ));
    }
    Ok(checks)
}

fn anomalies() -> Vec<Check> {
    const SUITE: &str = "anomalies";
    let mut checks = Vec::new();
    for model in ModelName::ALL {
        let gamma = scaling_anomaly(&SpectrumData::of_model(&build_model(model)));
        checks.push(Check::exact(
            SUITE,
            format!("{model} gamma"),
            &gamma,
            &Rat::new(),
        ));
    }
    let expected = [
        (FoldingSystem::B3_11, rat(-1, 48)),
        (FoldingSystem::B2_21, rat(-1, 24)),
        (FoldingSystem::G2_11, rat(-1, 24)),
        (FoldingSystem::G2_31, rat(-1, 18)),
        (FoldingSystem::D4_11, Rat::new()),
    ];
    for (system, gamma) in expected {
        checks.push(Check::exact(
            SUITE,
            format!("{} gamma", system.label()),
            &folding_g(system).gamma,
            &gamma,
        ));
    }
    let d4 = gfn_core::halphen::D4Prepotential::new(
        gfn_core::halphen::HalphenConvention::IDENTITY,
        gfn_core::halphen::D4Variant::Corrected,
    );
    let e = d4.euler().expect("D4 Euler data");
    let gamma = scaling_anomaly(&SpectrumData::from_weights(e.charge.clone(), &e.weights));
    checks.push(Check::exact(
        SUITE,
        "D4^(1,1) gamma from spectrum",
        &gamma,
        &Rat::new(),
    ));
    checks
}

fn coefficient_string(list: &[(u32, Rat)]) -> String {
    if list.is_empty() {
        return "none".to_string();
    }
    list.iter()
        .map(|(n, c)| format!("N={n}:{c}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn coxeter_table(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "coxeter-table";
    let table: Vec<(&str, Vec<(u32, Rat)>)> = vec![
        ("An", vec![]),
        ("Dn", vec![]),
        ("E6", vec![]),
        ("E7", vec![]),
        ("E8", vec![]),
        ("Bn", vec![(4, rat(-1, 48))]),
        ("F4", vec![(4, rat(-1, 48))]),
        ("H3", vec![(5, rat(-1, 20))]),
        ("H4", vec![(5, rat(-1, 20))]),
        ("I2(5)", vec![(5, rat(-1, 20))]),
        ("I2(6)", vec![(6, rat(-1, 12))]),
    ];
    let mut checks = Vec::new();
    if let Some(group) = &cfg.group {
        let got = coxeter_g_coefficient(group)?;
        let found = table.iter().find(|(g, _)| g.eq_ignore_ascii_case(group));
        let reference =
            found.map_or_else(|| coefficient_string(&got), |(_, r)| coefficient_string(r));
        let value = coefficient_string(&got);
        let pass = value == reference;
        checks.push(Check::flag(SUITE, group.clone(), value, reference, pass));
        return Ok(checks);
    }
    for (group, expected) in table {
        let got = coxeter_g_coefficient(group)?;
        let (value, reference) = (coefficient_string(&got), coefficient_string(&expected));
        let pass = value == reference;
        checks.push(Check::flag(SUITE, group, value, reference, pass));
    }
    Ok(checks)
}

fn folding_table(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "folding-table";
    let systems = match &cfg.system {
        Some(s) => vec![s.parse::<FoldingSystem>()?],
        None => FoldingSystem::ALL.to_vec(),
    };
    let mut checks = Vec::new();
    for system in systems {
        let g = folding_g(system);
        let label = system.label();
        let (kappa, eta) = match system {
            FoldingSystem::B3_11 => (rat(-1, 48), rat(-1, 2)),
            FoldingSystem::B2_21 => (rat(-1, 48), rat(-1, 2)),
            FoldingSystem::G2_11 => (rat(-1, 12), rat(-1, 2)),
            FoldingSystem::D4_11 => (Rat::new(), rat(-1, 2)),
            FoldingSystem::G2_31 => (rat(-1, 12), Rat::new()),
        };
        checks.push(Check::exact(
            SUITE,
            format!("{label} log kappa"),
            &g.kappa_coefficient,
            &kappa,
        ));
        checks.push(Check::exact(
            SUITE,
            format!("{label} log eta"),
            &g.eta_coefficient,
            &eta,
        ));
        if let Some(deg) = &g.deg_kappa {
            let ratio = Rat::from(&g.gamma / deg);
            checks.push(Check::exact(
                SUITE,
                format!("{label} gamma/deg"),
                &ratio,
                &g.kappa_coefficient,
            ));
        }
        if system == FoldingSystem::G2_31 {
            let lambda = g
                .other_terms
                .iter()
                .find(|(k, _)| k == "lambda_t")
                .map(|(_, c)| c.clone())
                .unwrap_or_default();
            checks.push(Check::exact(
                SUITE,
                format!("{label} log lambda_t"),
                &lambda,
                &rat(5, 24),
            ));
        }
    }
    Ok(checks)
}

fn getzler_a2(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "getzler-a2";
    let prec = cfg.precision;
    let tol = cfg.tol_or(1e-30);
    let n = cfg.points_or(5);
    let mut checks = Vec::new();
    let cubic = PolynomialPrepotential::cubic();
    let r = getzler_scan(&cubic, &PolynomialG::zero(1), n, cfg.seed, prec)?;
    checks.push(Check::flag(
        SUITE,
        "cubic residual exactly zero",
        gfn_core::numeric::format_float(&r.max_residual, 6),
        "0",
        r.max_residual.is_zero(),
    ));
    let a2 = PolynomialPrepotential::a2();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = Float::with_val(prec.bits(), 0);
    for _ in 0..n {
        let p = a2.sample_point(&mut rng, prec);
        let w = wdvv_residual(&a2, &p, prec)?;
        if w > worst {
            worst = w;
        }
    }
    checks.push(Check::bound(SUITE, "a2 wdvv", &worst, tol, false));
    let r = getzler_scan(&a2, &PolynomialG::zero(2), n, cfg.seed, prec)?;
    checks.push(Check::bound(
        SUITE,
        "a2 residual with G=0",
        &r.max_residual,
        tol,
        false,
    ));
    let perturbed = PolynomialG::new(MultiPoly::var(2, 1));
    let r = getzler_scan(&a2, &perturbed, n, cfg.seed, prec)?;
    checks.push(Check::bound(
        SUITE,
        "a2 residual with G=t2 (negative control)",
        &r.max_residual,
        1e-6,
        true,
    ));
    Ok(checks)
}

fn getzler_d4(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "getzler-d4";
    let prec = cfg.precision;
    let tol = cfg.tol_or(1e-20);
    let n = cfg.points_or(3);
    let (f, g) = d4_oracles(prec)?;
    let mut checks = vec![Check::flag(
        SUITE,
        "halphen convention",
        f.convention.to_string(),
        "selected",
        true,
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = Float::with_val(prec.bits(), 0);
    for _ in 0..n {
        let p = f.sample_point(&mut rng, prec);
        let w = wdvv_residual(&f, &p, prec)?;
        if w > worst {
            worst = w;
        }
    }
    checks.push(Check::bound(SUITE, "d4 wdvv", &worst, tol, false));
    let r = getzler_scan(&f, &g, n, cfg.seed, prec)?;
    checks.push(Check::bound(
        SUITE,
        "d4 residual with G=-log(eta)/2",
        &r.max_residual,
        tol,
        false,
    ));
    let r = getzler_scan(&f, &PolynomialG::zero(6), 1, cfg.seed, prec)?;
    checks.push(Check::bound(
        SUITE,
        "d4 residual with G=0 (negative control)",
        &r.max_residual,
        1e-6,
        true,
    ));
    Ok(checks)
}

fn complex_err(a: &Complex, b: &Complex) -> Float {
    cabs(&Complex::with_val(a.prec().0, a - b))
}

fn halphen(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "halphen";
    let prec = cfg.precision;
    let bits = prec.bits();
    let c = |re: f64, im: f64| Complex::with_val(bits, (re, im));
    let mut checks = Vec::new();
    let tau0 = c(0.0, 2.0);
    let (state, conv) = theta_candidate(&tau0, prec)?;
    let res = halphen_residual(&tau0, conv, prec)?;
    checks.push(Check::bound(
        SUITE,
        format!("theta residual at 2i {conv}"),
        &res,
        HALPHEN_TOLERANCE,
        false,
    ));
    let eta = log_eta_derivative(&tau0, 1, prec)? * ETA_RELATION;
    checks.push(Check::bound(
        SUITE,
        "u+v+w - 6 (log eta)'",
        &complex_err(&state.sum(), &eta),
        1e-40,
        false,
    ));
    let tau1 = c(0.0, 2.5);
    let end = halphen_integrate(&state, &tau1, &StepControl::default(), prec)?;
    let (direct, _) = candidate_with_derivative(&tau1, conv, prec)?;
    let mut worst = Float::with_val(bits, 0);
    for (a, b) in end.components().iter().zip(direct.components()) {
        let e = complex_err(a, b);
        if e > worst {
            worst = e;
        }
    }
    checks.push(Check::bound(
        SUITE,
        "rk4 2i -> 2.5i vs theta",
        &worst,
        1e-15,
        false,
    ));
    let root = Complex::with_val(bits, (0, prec.pi() / 12u32)).exp();
    for tau in [c(0.0, 1.0), c(0.25, 1.5), c(-0.3, 2.0)] {
        let ratio =
            dedekind_eta(&Complex::with_val(bits, &tau + 1u32), prec)? / dedekind_eta(&tau, prec)?;
        checks.push(Check::bound(
            SUITE,
            "eta(tau+1)/eta(tau) - e^(i pi/12)",
            &complex_err(&ratio, &root),
            1e-40,
            false,
        ));
        let [t2, t3, t4] = theta_constants(&tau, prec)?;
        let lhs = Complex::with_val(bits, &t2 * &t3) * &t4;
        let e = dedekind_eta(&tau, prec)?;
        let rhs = Complex::with_val(bits, e.pow(3u32)) * 2u32;
        checks.push(Check::bound(
            SUITE,
            "theta2 theta3 theta4 - 2 eta^3",
            &complex_err(&lhs, &rhs),
            1e-40,
            false,
        ));
        let shift = d4_g_shift(&tau, prec)?;
        let expect = Complex::with_val(bits, (0, -prec.pi() / 24u32));
        checks.push(Check::bound(
            SUITE,
            "D4 G(t6+1) - G(t6) + i pi/24",
            &complex_err(&shift, &expect),
            1e-30,
            false,
        ));
    }
    checks.push(Check::exact(
        SUITE,
        "e6t inversion shift coefficient",
        &shift_constant(8),
        &rat(-1, 6),
    ));
    Ok(checks)
}

fn hessian_tau(cfg: &RunConfig) -> Result<Vec<Check>> {
    const SUITE: &str = "hessian-tau";
    let prec = cfg.precision;
    let bits = prec.bits();
    let model = build_model(ModelName::E6t);
    let mut checks = Vec::new();
    let origin = SAssignment::marginal(&model, Rat::new());
    checks.push(Check::exact(
        SUITE,
        "det m_Hess at origin",
        &hessian_mult_det(&model, &origin)?,
        &Rat::new(),
    ));
    let one = MultiPoly::one(model.arity());
    checks.push(Check::exact(
        SUITE,
        "det m_1 at s=1",
        &mult_det(&model, &SAssignment::marginal(&model, rat(1, 1)), &one)?,
        &rat(1, 1),
    ));
    let points = [
        SAssignment::marginal(&model, rat(1, 1)).with_value(2, rat(1, 2)),
        SAssignment::marginal(&model, rat(1, 2))
            .with_value(5, rat(1, 3))
            .with_value(2, rat(-1, 4)),
        SAssignment::marginal(&model, rat(3, 4))
            .with_value(3, rat(2, 7))
            .with_value(7, rat(1, 5)),
    ];
    for p in points {
        let s = p.marginal_value().clone();
        let d = hessian_mult_det(&model, &p)?;
        let label = format!(
            "s={:?}",
            p.values.iter().map(Rat::to_string).collect::<Vec<_>>()
        );
        checks.push(Check::flag(
            SUITE,
            format!("D nonzero {label}"),
            d.to_string(),
            "!= 0",
            d != 0,
        ));
        let sf = prec.rat(&s);
        let sp = Float::with_val(bits, 1) / dt_ds_quotient(ModelName::E6t, &sf, prec)?;
        let disc = Float::with_val(bits, 1) + Float::with_val(bits, sf.pow(3u32)) / 27u32;
        let tau = sp.pow(4u32) / disc.square() * &d;
        let ok = tau.is_finite() && !tau.is_zero();
        checks.push(Check::flag(
            SUITE,
            format!("tau_I^-48 finite nonzero {label}"),
            gfn_core::numeric::format_float(&tau, 20),
            "finite, != 0",
            ok,
        ));
    }
    Ok(checks)
}
