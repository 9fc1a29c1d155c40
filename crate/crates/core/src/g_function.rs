//! G-functions: closed forms for Ẽ6/Ẽ7/Ẽ8, the ring-route derivative, scaling
//! anomalies, Virasoro right-hand sides, Coxeter and folding coefficients, and the
//! inversion symmetry.

use std::fmt;
use std::str::FromStr;

use rug::{Complex, Float};
use serde::Serialize;

use crate::error::{GfnError, Result};
use crate::exact_algebra::{rat, Rat};
use crate::flat_coords::{dt_ds, s_of_t, LinearizationData, MarginalMap};
use crate::milnor_ring::{
    build_model, multiplication_table, ModelName, SAssignment, SingularityModel,
};
use crate::numeric::{complex_inverse, Precision};
use crate::special_functions::log_eta_derivative;

/// Exponents `(a, b)` in `G = −(1/24)·log(s′^a / disc^b)`.
pub fn closed_form_exponents(model: ModelName) -> (Rat, Rat) {
    match model {
        ModelName::E6t => (rat(2, 1), rat(1, 1)),
        ModelName::E7t => (rat(3, 2), rat(1, 1)),
        ModelName::E8t => (rat(1, 1), rat(5, 6)),
    }
}

/// Closed-form `G` as a function of the marginal `s` (so `G = 0` at `s = 0`).
pub fn g_closed_at_s(model: ModelName, s: &Float, prec: Precision) -> Result<Float> {
    let bits = prec.bits();
    let map = MarginalMap::new(model);
    let s = Float::with_val(bits, s);
    let sp = Float::with_val(bits, 1) / dt_ds(model, &s, prec)?;
    let disc = Float::with_val(bits, 1 - map.u_of_s(&s));
    let (a, b) = closed_form_exponents(model);
    let inner = sp.ln() * &a - disc.ln() * &b;
    Ok(-inner / 24u32)
}

/// Closed-form `G(t)`.
pub fn g_closed(model: ModelName, t: &Float, prec: Precision) -> Result<Float> {
    let s = s_of_t(model, t, prec)?;
    g_closed_at_s(model, &s, prec)
}

/// Analytic `dG/dt` of the closed form at the marginal `s`:
/// `−(u′/24)·[a·(2(1−u)gg′ − g²) + b·g²]`.
pub fn dg_dt_closed_at_s(model: ModelName, s: &Float, prec: Precision) -> Result<Float> {
    let bits = prec.bits();
    let map = MarginalMap::new(model);
    let s = Float::with_val(bits, s);
    let u = map.u_of_s(&s);
    let g = map.g(&u, prec)?;
    let gp = map.g_prime(&u, prec)?;
    let up = map.du_ds(&s);
    let (a, b) = closed_form_exponents(model);
    let g2 = Float::with_val(bits, g.square_ref());
    let one_minus = Float::with_val(bits, 1 - &u);
    let bracket = (one_minus * &g * &gp * 2u32 - &g2) * &a + g2 * &b;
    Ok(-(up * bracket) / 24u32)
}

/// Traces of multiplication by `φ_a` at `0★` and their first derivatives in the
/// non-marginal directions, all exact.
#[derive(Clone, Debug)]
pub struct RingTraces {
    pub model: ModelName,
    pub s: Rat,
    /// `T_a`, `a = 1 … n`.
    pub traces: Vec<Rat>,
    /// `slopes[b-1][a-1] = ∂T_a/∂s_b` for `b = 1 … n−1`.
    pub slopes: Vec<Vec<Rat>>,
}

impl RingTraces {
    pub fn compute(model: &SingularityModel, s: &Rat) -> Result<Self> {
        let n = model.n;
        let base = multiplication_table(model, &SAssignment::marginal(model, s.clone()))?;
        let traces = (1..=n).map(|a| base.trace(a).value).collect();
        let mut slopes = Vec::with_capacity(n - 1);
        for b in 1..n {
            let t =
                multiplication_table(model, &SAssignment::marginal(model, s.clone()).with_jet(b))?;
            slopes.push((1..=n).map(|a| t.trace(a).slope).collect());
        }
        Ok(RingTraces {
            model: model.name,
            s: s.clone(),
            traces,
            slopes,
        })
    }

    pub fn slope(&self, a: usize, b: usize) -> &Rat {
        &self.slopes[b - 1][a - 1]
    }
}

/// `Σ_ν c_{νν★μ,μ★}` at `0★`:
/// `Σ_a ∂²s^a/∂t^μ∂t^μ★ · T_a + Σ_{a,b} ∂s^a/∂t^μ · ∂s^b/∂t^μ★ · ∂T_a/∂s_b`.
pub fn ring_sum(lin: &LinearizationData, traces: &RingTraces, mu: usize) -> Result<Float> {
    let n = lin.n();
    if lin.model != traces.model {
        return Err(GfnError::usage(
            "linearization and ring data belong to different models",
        ));
    }
    if mu < 2 || mu > n - 1 {
        return Err(GfnError::usage(format!("mu must lie in 2..={}", n - 1)));
    }
    let mustar = n + 1 - mu;
    let bits = lin.s.prec();
    let mut acc = Float::with_val(bits, 0);
    for a in 1..=n {
        let cross = lin.cross_value(a, mu, mustar);
        if !cross.is_zero() {
            acc += cross * &traces.traces[a - 1];
        }
    }
    if !lin.j(n, mustar).is_zero() {
        return Err(GfnError::usage(
            "marginal component of a non-marginal flat direction must vanish at 0★",
        ));
    }
    for a in 1..=n {
        let ja = lin.j(a, mu);
        if ja.is_zero() {
            continue;
        }
        for b in 1..n {
            let jb = lin.j(b, mustar);
            if jb.is_zero() || *traces.slope(a, b) == 0 {
                continue;
            }
            acc += Float::with_val(bits, ja * jb) * traces.slope(a, b);
        }
    }
    Ok(acc)
}

/// `(5·d^μ·d^μ★ − 1)/(24·d^μ·d^μ★)`, the factor turning `Σ_ν c_{νν★μ,μ★}` into `dG/dt`.
pub fn ring_prefactor(model: &SingularityModel, mu: usize) -> Result<Rat> {
    let dd = Rat::from(model.weight(mu) * model.weight(model.partner(mu)));
    if dd == 0 {
        return Err(GfnError::usage(format!(
            "d^mu·d^mu* vanishes for mu = {mu}"
        )));
    }
    Ok((dd.clone() * 5 - 1) / (dd * 24))
}

#[derive(Clone, Debug)]
pub struct RingRoute {
    pub mu: usize,
    pub mustar: usize,
    pub prefactor: Rat,
    pub sum: Float,
    pub value: Float,
}

/// Ring-route `dG/dt` at `0★` with the admissible pair `(μ, n+1−μ)`.
pub fn dg_dt_ring(
    model: &SingularityModel,
    lin: &LinearizationData,
    traces: &RingTraces,
    mu: usize,
) -> Result<RingRoute> {
    let sum = ring_sum(lin, traces, mu)?;
    let prefactor = ring_prefactor(model, mu)?;
    let value = Float::with_val(sum.prec(), &sum * &prefactor);
    Ok(RingRoute {
        mu,
        mustar: model.partner(mu),
        prefactor,
        sum,
        value,
    })
}

/// The symmetric form: `2(Σ_μ d^μ d^μ★)·dG/dt = Σ_μ [−1/12 + (5/12) d^μ d^μ★]·Σ_ν c_{νν★μ,μ★}`.
pub fn dg_dt_symmetric(
    model: &SingularityModel,
    lin: &LinearizationData,
    traces: &RingTraces,
) -> Result<Float> {
    let n = model.n;
    let mut norm = Rat::new();
    let mut acc = Float::with_val(lin.s.prec(), 0);
    for mu in 1..=n {
        let dd = Rat::from(model.weight(mu) * model.weight(model.partner(mu)));
        norm += &dd;
        if mu == 1 || mu == n {
            continue;
        }
        let w = rat(-1, 12) + dd * rat(5, 12);
        acc += ring_sum(lin, traces, mu)? * &w;
    }
    Ok(acc / Rat::from(norm * 2))
}

/// Spectrum data entering the scaling anomaly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumData {
    pub n: usize,
    pub d_charge: Rat,
    pub q: Vec<Rat>,
    pub mu: Vec<Rat>,
}

impl SpectrumData {
    /// `μ_α = q_α − d/2`.
    pub fn from_q(d_charge: Rat, q: Vec<Rat>) -> Self {
        let half = Rat::from(&d_charge / 2);
        let mu = q.iter().map(|x| Rat::from(x - &half)).collect();
        SpectrumData {
            n: q.len(),
            d_charge,
            q,
            mu,
        }
    }

    /// `q_α = 1 − d_α` from the Euler weights.
    pub fn from_weights(d_charge: Rat, weights: &[Rat]) -> Self {
        Self::from_q(d_charge, weights.iter().map(|w| Rat::from(1 - w)).collect())
    }

    pub fn of_model(model: &SingularityModel) -> Self {
        Self::from_weights(rat(1, 1), &model.weights)
    }

    /// Whether `μ_α + μ_{n+1−α} = 0` for all `α`.
    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|a| Rat::from(&self.mu[a] + &self.mu[self.n - 1 - a]) == 0)
    }
}

/// `γ = −(1/4)Σ μ_α² + n·d/48`.
pub fn scaling_anomaly(spec: &SpectrumData) -> Rat {
    let mut sq = Rat::new();
    for m in &spec.mu {
        sq += Rat::from(m * m);
    }
    Rat::from(&spec.d_charge * spec.n as u64) / 48 - sq / 4
}

/// Dense data of a Frobenius manifold at one point.
#[derive(Clone, Debug)]
pub struct VirasoroPoint {
    pub eta: Vec<Vec<Complex>>,
    /// `c[ν][μ][σ] = c^ν_{μσ}`.
    pub c: Vec<Vec<Vec<Complex>>>,
    /// Components `E^σ` of the Euler field at the point.
    pub euler: Vec<Complex>,
    pub mu: Vec<Rat>,
    pub d_charge: Rat,
}

fn mat_mul(a: &[Vec<Complex>], b: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
    let n = a.len();
    let bits = a[0][0].prec().0;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Complex::with_val(bits, 0);
                    for k in 0..n {
                        acc += Complex::with_val(bits, &a[i][k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_vec(a: &[Vec<Complex>], v: &[Complex]) -> Vec<Complex> {
    let bits = v[0].prec().0;
    a.iter()
        .map(|row| {
            let mut acc = Complex::with_val(bits, 0);
            for (x, y) in row.iter().zip(v) {
                acc += Complex::with_val(bits, x * y);
            }
            acc
        })
        .collect()
}

/// Right-hand side of the formula for `L_{E^k} G`.
pub fn virasoro_rhs(k: u32, p: &VirasoroPoint) -> Result<Complex> {
    let n = p.eta.len();
    let bits = p.euler.first().map_or(64, |z| z.prec().0);
    if k == 0 {
        return Err(GfnError::usage("k must be at least 1"));
    }
    let mut trmu2 = Rat::new();
    for m in &p.mu {
        trmu2 += Rat::from(m * m);
    }
    let base = Rat::from(&p.d_charge * n as u64) / 48 - trmu2 / 4;
    if k == 1 {
        return Ok(Complex::with_val(bits, (&base, 0)));
    }
    let eta_inv = complex_inverse(&p.eta)?;
    let zero = || Complex::with_val(bits, 0);
    // U^ν_μ = c^ν_{μσ} E^σ
    let u: Vec<Vec<Complex>> = (0..n)
        .map(|nu| {
            (0..n)
                .map(|m| {
                    let mut acc = zero();
                    for s in 0..n {
                        acc += Complex::with_val(bits, &p.c[nu][m][s] * &p.euler[s]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mu_mat: Vec<Vec<Complex>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Complex::with_val(bits, (&p.mu[i], 0))
                    } else {
                        zero()
                    }
                })
                .collect()
        })
        .collect();
    let ident: Vec<Vec<Complex>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex::with_val(bits, (u8::from(i == j), 0)))
                .collect()
        })
        .collect();
    let mut pows = vec![ident];
    for j in 1..k as usize {
        let next = mat_mul(&pows[j - 1], &u);
        pows.push(next);
    }
    let k = k as usize;
    let mut trace = zero();
    for j in 0..k {
        let inner = mat_mul(&mat_mul(&pows[j], &mu_mat), &pows[k - 1 - j]);
        let full = mat_mul(&mu_mat, &inner);
        for i in 0..n {
            trace += &full[i][i];
        }
    }
    let mut x = vec![zero(); n];
    for j in 0..k - 1 {
        let m = mat_mul(&mat_mul(&pows[j], &mu_mat), &pows[k - 2 - j]);
        for (xi, yi) in x.iter_mut().zip(mat_vec(&m, &p.euler)) {
            *xi += yi;
        }
    }
    let tail = mat_vec(&pows[k - 2], &p.euler);
    let half_d = Rat::from(&p.d_charge / 2);
    for (xi, ti) in x.iter_mut().zip(&tail) {
        *xi -= Complex::with_val(bits, ti * &half_d);
    }
    // H^α = η^{αβ} c^ν_{νβ}
    let trc: Vec<Complex> = (0..n)
        .map(|b| {
            let mut acc = zero();
            for nu in 0..n {
                acc += &p.c[nu][nu][b];
            }
            acc
        })
        .collect();
    let h = mat_vec(&eta_inv, &trc);
    let pairing = {
        let eh = mat_vec(&p.eta, &h);
        let mut acc = zero();
        for (a, b) in x.iter().zip(&eh) {
            acc += Complex::with_val(bits, a * b);
        }
        acc
    };
    Ok(-(trace / 4u32) - pairing / 24u32)
}

/// Finite Coxeter groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoxeterGroup {
    A(u32),
    B(u32),
    D(u32),
    E(u32),
    F4,
    H3,
    H4,
    I2(u32),
}

impl FromStr for CoxeterGroup {
    type Err = GfnError;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s
            .trim()
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_uppercase();
        let bad = || GfnError::usage(format!("unknown Coxeter group {s:?}"));
        if let Some(rest) = t.strip_prefix("I2") {
            let h: u32 = rest
                .trim_start_matches(['(', '_'])
                .trim_end_matches(')')
                .parse()
                .map_err(|_| bad())?;
            return if h >= 3 {
                Ok(CoxeterGroup::I2(h))
            } else {
                Err(bad())
            };
        }
        let (head, rank) = t.split_at(1);
        let rank: Option<u32> = if rank.is_empty() || rank == "N" {
            None
        } else {
            Some(rank.parse().map_err(|_| bad())?)
        };
        match (head, rank) {
            ("A", r) if r.is_none_or(|r| r >= 1) => Ok(CoxeterGroup::A(r.unwrap_or(0))),
            ("B", r) if r.is_none_or(|r| r >= 2) => Ok(CoxeterGroup::B(r.unwrap_or(0))),
            ("D", r) if r.is_none_or(|r| r >= 4) => Ok(CoxeterGroup::D(r.unwrap_or(0))),
            ("E", Some(r)) if (6..=8).contains(&r) => Ok(CoxeterGroup::E(r)),
            ("F", Some(4)) => Ok(CoxeterGroup::F4),
            ("H", Some(3)) => Ok(CoxeterGroup::H3),
            ("H", Some(4)) => Ok(CoxeterGroup::H4),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CoxeterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rank = |r: &u32| {
            if *r == 0 {
                "n".to_string()
            } else {
                r.to_string()
            }
        };
        match self {
            CoxeterGroup::A(r) => write!(f, "A{}", rank(r)),
            CoxeterGroup::B(r) => write!(f, "B{}", rank(r)),
            CoxeterGroup::D(r) => write!(f, "D{}", rank(r)),
            CoxeterGroup::E(r) => write!(f, "E{r}"),
            CoxeterGroup::F4 => f.write_str("F4"),
            CoxeterGroup::H3 => f.write_str("H3"),
            CoxeterGroup::H4 => f.write_str("H4"),
            CoxeterGroup::I2(h) => write!(f, "I2({h})"),
        }
    }
}

/// A row of the caustic table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CausticDatum {
    pub group: String,
    pub caustic_count: usize,
    pub n_values: Vec<u32>,
}

pub fn caustic_data(group: &CoxeterGroup) -> CausticDatum {
    let n_values = match group {
        CoxeterGroup::A(_) | CoxeterGroup::D(_) | CoxeterGroup::E(_) => vec![3],
        CoxeterGroup::B(_) => vec![4, 3],
        CoxeterGroup::F4 => vec![4, 3, 3],
        CoxeterGroup::H3 | CoxeterGroup::H4 => vec![5, 3],
        CoxeterGroup::I2(h) => vec![*h],
    };
    CausticDatum {
        group: group.to_string(),
        caustic_count: n_values.len(),
        n_values,
    }
}

/// `−(1/24)(N−2)(N−3)/N`.
pub fn caustic_coefficient(n: u32) -> Rat {
    let n = i64::from(n);
    rat(-(n - 2) * (n - 3), 24 * n)
}

/// `(N_i, coefficient of log κ_i)` for every caustic with a nonzero coefficient.
pub fn coxeter_g_coefficient(group: &str) -> Result<Vec<(u32, Rat)>> {
    let g: CoxeterGroup = group.parse()?;
    Ok(caustic_data(&g)
        .n_values
        .into_iter()
        .filter(|&n| n > 3)
        .map(|n| (n, caustic_coefficient(n)))
        .collect())
}

/// Folded elliptic root systems with known G-functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FoldingSystem {
    B3_11,
    B2_21,
    G2_11,
    D4_11,
    G2_31,
}

impl FoldingSystem {
    pub const ALL: [FoldingSystem; 5] = [
        FoldingSystem::B3_11,
        FoldingSystem::B2_21,
        FoldingSystem::G2_11,
        FoldingSystem::D4_11,
        FoldingSystem::G2_31,
    ];

    pub fn label(self) -> &'static str {
        match self {
            FoldingSystem::B3_11 => "B3^(1,1)",
            FoldingSystem::B2_21 => "B2^(2,1)",
            FoldingSystem::G2_11 => "G2^(1,1)",
            FoldingSystem::D4_11 => "D4^(1,1)",
            FoldingSystem::G2_31 => "G2^(3,1)",
        }
    }
}

impl FromStr for FoldingSystem {
    type Err = GfnError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "b311" => Ok(FoldingSystem::B3_11),
            "b221" => Ok(FoldingSystem::B2_21),
            "g211" => Ok(FoldingSystem::G2_11),
            "d411" => Ok(FoldingSystem::D4_11),
            "g231" => Ok(FoldingSystem::G2_31),
            _ => Err(GfnError::usage(format!("unknown folding system {s:?}"))),
        }
    }
}

/// A row of the folding table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldingDatum {
    pub system: String,
    pub gamma: String,
    pub deg_kappa: String,
    pub sigma: String,
}

/// G-function coefficients of a folded system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldingG {
    pub system: FoldingSystem,
    pub gamma: Rat,
    pub deg_kappa: Option<Rat>,
    /// `γ / deg κ`, the coefficient of `log κ`.
    pub kappa_coefficient: Rat,
    /// Coefficient of `log η(tⁿ)`.
    pub eta_coefficient: Rat,
    /// Any further logarithmic terms, by symbol.
    pub other_terms: Vec<(String, Rat)>,
    pub sigma: &'static str,
}

pub fn folding_g(system: FoldingSystem) -> FoldingG {
    let universal = |gamma: Rat, deg: Rat, sigma| FoldingG {
        system,
        kappa_coefficient: Rat::from(&gamma / &deg),
        gamma,
        deg_kappa: Some(deg),
        eta_coefficient: rat(-1, 2),
        other_terms: Vec::new(),
        sigma,
    };
    match system {
        FoldingSystem::B3_11 => universal(rat(-1, 48), rat(1, 1), "{t4 = t5}"),
        FoldingSystem::B2_21 => universal(rat(-1, 24), rat(2, 1), "{t2 = t3, t4 = t5}"),
        FoldingSystem::G2_11 => universal(rat(-1, 24), rat(1, 2), "{t3 = t4 = t5}"),
        FoldingSystem::D4_11 => FoldingG {
            system,
            gamma: Rat::new(),
            deg_kappa: None,
            kappa_coefficient: Rat::new(),
            eta_coefficient: rat(-1, 2),
            other_terms: Vec::new(),
            sigma: "",
        },
        FoldingSystem::G2_31 => FoldingG {
            system,
            gamma: rat(-1, 18),
            deg_kappa: None,
            kappa_coefficient: rat(-1, 12),
            eta_coefficient: Rat::new(),
            other_terms: vec![("lambda_t".to_string(), rat(5, 24))],
            sigma: "{t7 = t6 = t5, t4 = t3 = t2}",
        },
    }
}

impl FoldingG {
    pub fn datum(&self) -> FoldingDatum {
        FoldingDatum {
            system: self.system.label().to_string(),
            gamma: self.gamma.to_string(),
            deg_kappa: self
                .deg_kappa
                .as_ref()
                .map_or_else(|| "-".to_string(), Rat::to_string),
            sigma: self.sigma.to_string(),
        }
    }
}

/// Image of a flat point under the inversion symmetry, with the predicted G-shift.
#[derive(Clone, Debug)]
pub struct InversionImage {
    pub point: Vec<Complex>,
    /// `n/24 − 1/2`.
    pub shift_coefficient: Rat,
    /// `(n/24 − 1/2)·log tⁿ`.
    pub g_shift: Complex,
}

/// `t_σ t^σ` for the antidiagonal pairing `η_{α,n+1−α} = 1`.
pub fn antidiagonal_square(t: &[Complex]) -> Complex {
    let n = t.len();
    let bits = t[0].prec().0;
    let mut acc = Complex::with_val(bits, 0);
    for a in 0..n {
        acc += Complex::with_val(bits, &t[a] * &t[n - 1 - a]);
    }
    acc
}

/// `t̂¹ = ½ t_σt^σ/tⁿ`, `t̂ⁱ = tⁱ/tⁿ`, `t̂ⁿ = −1/tⁿ`.
pub fn inversion(t: &[Complex]) -> Result<InversionImage> {
    let n = t.len();
    if n < 2 {
        return Err(GfnError::usage("inversion needs at least two coordinates"));
    }
    let tn = &t[n - 1];
    if tn.is_zero() {
        return Err(GfnError::usage("inversion is undefined at t^n = 0"));
    }
    let bits = tn.prec().0;
    let sq = antidiagonal_square(t);
    let mut point = Vec::with_capacity(n);
    point.push(Complex::with_val(bits, &sq / tn) / 2u32);
    for ti in &t[1..n - 1] {
        point.push(Complex::with_val(bits, ti / tn));
    }
    point.push(-(Complex::with_val(bits, 1) / tn));
    let shift_coefficient = shift_constant(n);
    let g_shift = Complex::with_val(bits, tn.ln_ref()) * &shift_coefficient;
    Ok(InversionImage {
        point,
        shift_coefficient,
        g_shift,
    })
}

/// `n/24 − 1/2`.
pub fn shift_constant(n: usize) -> Rat {
    rat(n as i64, 24) - rat(1, 2)
}

/// Inversion applied to an elliptic model's flat point.
pub fn modular_and_inversion_transform(model: ModelName, t: &[Complex]) -> Result<InversionImage> {
    if t.len() != model.dimension() {
        return Err(GfnError::usage(format!(
            "{model} points have {} coordinates",
            model.dimension()
        )));
    }
    inversion(t)
}

/// `G(τ) = −½ log η(τ)` of the D4^(1,1) manifold.
pub fn d4_g(tau: &Complex, prec: Precision) -> Result<Complex> {
    Ok(-(log_eta_derivative(tau, 0, prec)? / 2u32))
}

/// `G(τ+1) − G(τ)` for the D4^(1,1) G-function.
pub fn d4_g_shift(tau: &Complex, prec: Precision) -> Result<Complex> {
    let next = Complex::with_val(prec.bits(), tau + 1u32);
    Ok(d4_g(&next, prec)? - d4_g(tau, prec)?)
}

/// Convenience: ring-route `dG/dt` at a rational marginal value with built-in data.
pub fn dg_dt_ring_at(model: ModelName, s: &Rat, mu: usize, prec: Precision) -> Result<RingRoute> {
    let m = build_model(model);
    let lin = crate::flat_coords::linearization(model, &prec.rat(s), prec)?;
    let traces = RingTraces::compute(&m, s)?;
    dg_dt_ring(&m, &lin, &traces, mu)
}


#[cfg(test)]
mod route_tests {
    use super::*;

    #[test]
    fn e6_ring_route_matches_closed_form() {
        let p = Precision::default();
        for (a, b) in [(1, 2), (1, 1), (3, 2), (1, 4)] {
            let s = rat(a, b);
            let ring = dg_dt_ring_at(ModelName::E6t, &s, 2, p).unwrap().value;
            let closed = dg_dt_closed_at_s(ModelName::E6t, &p.rat(&s), p).unwrap();
            let d = Float::with_val(p.bits(), &ring - &closed).abs();
            assert!(d < 1e-40, "s={s}: {ring} vs {closed}");
            let m = build_model(ModelName::E6t);
            let lin = crate::flat_coords::linearization(ModelName::E6t, &p.rat(&s), p).unwrap();
            let tr = RingTraces::compute(&m, &s).unwrap();
            let sym = dg_dt_symmetric(&m, &lin, &tr).unwrap();
            let d = Float::with_val(p.bits(), &sym - &closed).abs();
            assert!(d < 1e-40, "symmetric s={s}: {sym} vs {closed}");
        }
    }
}
