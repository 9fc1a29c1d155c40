//! The Halphen system, theta-constant solutions, and the D4^(1,1) oracles.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};

use crate::error::{GfnError, Result};
use crate::exact_algebra::{Monomial, MultiPoly, Rat};
use crate::getzler::{
    signed_unit, sorted_multi_indices, wdvv_residual, EulerData, FDerivatives, GOracle,
    PrepotentialOracle, Tensor,
};
use crate::numeric::{cabs, format_complex, format_float, Precision};
use crate::special_functions::{log_eta_derivative, theta_jets};

/// `u + v + w = 6 (log η)′` for the theta solution.
pub const ETA_RELATION: i64 = 6;

/// Residual tolerance a theta candidate must meet.
pub const HALPHEN_TOLERANCE: f64 = 1e-20;

#[derive(Clone, Debug)]
pub struct HalphenState {
    pub tau: Complex,
    pub u: Complex,
    pub v: Complex,
    pub w: Complex,
}

impl HalphenState {
    pub fn new(tau: Complex, [u, v, w]: [Complex; 3]) -> Self {
        HalphenState { tau, u, v, w }
    }

    pub fn components(&self) -> [&Complex; 3] {
        [&self.u, &self.v, &self.w]
    }

    fn array(&self) -> [Complex; 3] {
        [self.u.clone(), self.v.clone(), self.w.clone()]
    }

    pub fn sum(&self) -> Complex {
        Complex::with_val(self.u.prec().0, &self.u + &self.v) + &self.w
    }
}

impl fmt::Display for HalphenState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tau = {}, u = {}, v = {}, w = {}",
            format_complex(&self.tau, 20),
            format_complex(&self.u, 20),
            format_complex(&self.v, 20),
            format_complex(&self.w, 20)
        )
    }
}

/// `(uv + uw − vw, vu + vw − uw, wu + wv − uv)`.
pub fn halphen_rhs(y: [&Complex; 3]) -> [Complex; 3] {
    let bits = y[0].prec().0;
    let [u, v, w] = y;
    let uv = Complex::with_val(bits, u * v);
    let uw = Complex::with_val(bits, u * w);
    let vw = Complex::with_val(bits, v * w);
    [
        Complex::with_val(bits, &uv + &uw) - &vw,
        Complex::with_val(bits, &uv + &vw) - &uw,
        Complex::with_val(bits, &uw + &vw) - &uv,
    ]
}

/// Taylor coefficients `u_k, v_k, w_k` for `k = 0 … order` around the state's `τ`.
pub fn taylor_coefficients(state: &HalphenState, order: usize) -> Vec<[Complex; 3]> {
    let bits = state.u.prec().0;
    let mut c: Vec<[Complex; 3]> = vec![state.array()];
    for k in 0..order {
        let mut uv = Complex::with_val(bits, 0);
        let mut uw = Complex::with_val(bits, 0);
        let mut vw = Complex::with_val(bits, 0);
        for i in 0..=k {
            let (a, b) = (&c[i], &c[k - i]);
            uv += Complex::with_val(bits, &a[0] * &b[1]);
            uw += Complex::with_val(bits, &a[0] * &b[2]);
            vw += Complex::with_val(bits, &a[1] * &b[2]);
        }
        let kk = (k + 1) as u32;
        c.push([
            (Complex::with_val(bits, &uv + &uw) - &vw) / kk,
            (Complex::with_val(bits, &uv + &vw) - &uw) / kk,
            (Complex::with_val(bits, &uw + &vw) - &uv) / kk,
        ]);
    }
    c
}

/// `k`-th `τ`-derivatives of `(u, v, w)` for `k = 0 … order`.
pub fn derivative_jets(state: &HalphenState, order: usize) -> Vec<[Complex; 3]> {
    let mut fact = 1u64;
    taylor_coefficients(state, order)
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                fact *= k as u64;
            }
            c.map(|x| x * fact)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct StepControl {
    pub tolerance: f64,
    pub initial_fraction: f64,
    pub min_fraction: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            tolerance: 1e-20,
            initial_fraction: 1.0 / 64.0,
            min_fraction: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

fn rk4_step(y: &[Complex; 3], h: &Complex) -> [Complex; 3] {
    let bits = h.prec().0;
    let axpy = |y: &[Complex; 3], k: &[Complex; 3], f: &Complex| -> [Complex; 3] {
        [0, 1, 2].map(|i| Complex::with_val(bits, &k[i] * f) + &y[i])
    };
    let half = Complex::with_val(bits, h / 2u32);
    let refs = |y: &[Complex; 3]| halphen_rhs([&y[0], &y[1], &y[2]]);
    let k1 = refs(y);
    let k2 = refs(&axpy(y, &k1, &half));
    let k3 = refs(&axpy(y, &k2, &half));
    let k4 = refs(&axpy(y, &k3, h));
    let sixth = Complex::with_val(bits, h / 6u32);
    [0, 1, 2].map(|i| {
        let mut s = Complex::with_val(bits, &k2[i] + &k3[i]) * 2u32;
        s += &k1[i];
        s += &k4[i];
        s * &sixth + &y[i]
    })
}

fn max_diff(a: &[Complex; 3], b: &[Complex; 3]) -> Float {
    let bits = a[0].prec().0;
    let mut m = Float::with_val(bits, 0);
    for i in 0..3 {
        let d = cabs(&Complex::with_val(bits, &a[i] - &b[i]));
        if d > m {
            m = d;
        }
    }
    m
}

/// Classical RK4 with step doubling along the segment from `state0.tau` to `tau1`.
pub fn halphen_integrate(
    state0: &HalphenState,
    tau1: &Complex,
    control: &StepControl,
    prec: Precision,
) -> Result<HalphenState> {
    let bits = prec.bits();
    let span = Complex::with_val(bits, tau1 - &state0.tau);
    let mut y = state0.array().map(|z| Complex::with_val(bits, z));
    let mut s = 0f64;
    let mut h = control.initial_fraction.min(1.0);
    let tol = Float::with_val(bits, control.tolerance);
    let fail = |s: f64, y: &[Complex; 3], reason: &str| {
        let tau = Complex::with_val(bits, &span * s) + &state0.tau;
        GfnError::Integration {
            tau: format_complex(&tau, 20),
            reason: format!(
                "{reason}; last good state u = {}, v = {}, w = {}",
                format_complex(&y[0], 20),
                format_complex(&y[1], 20),
                format_complex(&y[2], 20)
            ),
        }
    };
    let mut steps = 0;
    while s < 1.0 {
        if steps >= control.max_steps {
            return Err(fail(s, &y, "step limit reached"));
        }
        steps += 1;
        let h_eff = h.min(1.0 - s);
        let dt = Complex::with_val(bits, &span * h_eff);
        let half = Complex::with_val(bits, &dt / 2u32);
        let big = rk4_step(&y, &dt);
        let small = rk4_step(&rk4_step(&y, &half), &half);
        let finite = small
            .iter()
            .all(|z| z.real().is_finite() && z.imag().is_finite());
        let err = if finite {
            max_diff(&big, &small) / 15u32
        } else {
            Float::with_val(bits, f64::INFINITY)
        };
        if err <= tol {
            y = [0, 1, 2].map(|i| {
                let corr = Complex::with_val(bits, &small[i] - &big[i]) / 15u32;
                corr + &small[i]
            });
            s = if h_eff >= 1.0 - s { 1.0 } else { s + h_eff };
            let grow = if err.is_zero() {
                2.0
            } else {
                (0.9 * (tol.to_f64() / err.to_f64()).powf(0.2)).clamp(0.2, 2.0)
            };
            h = (h_eff * grow).max(control.min_fraction);
        } else {
            let shrink = if finite {
                (0.9 * (tol.to_f64() / err.to_f64()).powf(0.2)).clamp(0.1, 0.5)
            } else {
                0.25
            };
            h = h_eff * shrink;
            if h < control.min_fraction {
                return Err(fail(s, &y, "step size underflow"));
            }
        }
    }
    Ok(HalphenState::new(Complex::with_val(bits, tau1), y))
}

/// Assignment of `±2 (log θ_i)′` to `(u, v, w)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalphenConvention {
    /// `perm[k]` picks θ₂, θ₃ or θ₄ (0, 1, 2) for the `k`-th component.
    pub perm: [usize; 3],
    pub sign: i8,
}

impl HalphenConvention {
    pub const IDENTITY: HalphenConvention = HalphenConvention {
        perm: [0, 1, 2],
        sign: 1,
    };

    pub fn all() -> Vec<HalphenConvention> {
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut out = Vec::with_capacity(12);
        for sign in [1, -1] {
            for perm in PERMS {
                out.push(HalphenConvention { perm, sign });
            }
        }
        out
    }
}

impl fmt::Display for HalphenConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign > 0 { "+" } else { "-" };
        write!(
            f,
            "({s}2 log th{}', {s}2 log th{}', {s}2 log th{}')",
            self.perm[0] + 2,
            self.perm[1] + 2,
            self.perm[2] + 2
        )
    }
}

fn check_tau(tau: &Complex) -> Result<()> {
    if *tau.imag() < 1 {
        return Err(GfnError::Domain(format!(
            "Im(tau) must be at least 1, got {}",
            format_complex(tau, 12)
        )));
    }
    Ok(())
}

/// The candidate triple and its `τ`-derivative under a convention.
pub fn candidate_with_derivative(
    tau: &Complex,
    conv: HalphenConvention,
    prec: Precision,
) -> Result<(HalphenState, [Complex; 3])> {
    check_tau(tau)?;
    let bits = prec.bits();
    let [th, d1, d2] = theta_jets(tau, prec)?;
    let mut vals = Vec::with_capacity(3);
    let mut ders = Vec::with_capacity(3);
    for &i in &conv.perm {
        let l1 = Complex::with_val(bits, &d1[i] / &th[i]);
        let l2 =
            Complex::with_val(bits, &d2[i] / &th[i]) - Complex::with_val(bits, l1.square_ref());
        let k = 2 * i32::from(conv.sign);
        vals.push(l1 * k);
        ders.push(l2 * k);
    }
    let vals: [Complex; 3] = vals.try_into().expect("three components");
    let ders: [Complex; 3] = ders.try_into().expect("three components");
    Ok((HalphenState::new(Complex::with_val(bits, tau), vals), ders))
}

/// Largest `|u̇ − (uv + uw − vw)|` etc. for a convention at `τ`.
pub fn halphen_residual(tau: &Complex, conv: HalphenConvention, prec: Precision) -> Result<Float> {
    let (state, ders) = candidate_with_derivative(tau, conv, prec)?;
    Ok(max_diff(&ders, &halphen_rhs(state.components())))
}

#[derive(Clone, Debug)]
pub struct ConventionScore {
    pub convention: HalphenConvention,
    pub halphen_residual: Float,
    pub wdvv_residual: Float,
}

#[derive(Clone, Debug)]
pub struct ConventionReport {
    pub selected: HalphenConvention,
    pub scores: Vec<ConventionScore>,
}

fn convention_error(scores: &[ConventionScore]) -> GfnError {
    GfnError::Convention {
        residuals: scores
            .iter()
            .map(|s| {
                (
                    s.convention.to_string(),
                    format!(
                        "halphen {} wdvv {}",
                        format_float(&s.halphen_residual, 6),
                        format_float(&s.wdvv_residual, 6)
                    ),
                )
            })
            .collect(),
    }
}

/// Scores every convention by the Halphen residual at `probe.tau` and the WDVV residual
/// of the full D4 oracle at `probe`, and keeps the first one minimizing the latter
/// among those passing both tolerances. Residuals below tolerance count as ties.
pub fn select_convention(probe: &[Complex], prec: Precision) -> Result<ConventionReport> {
    if probe.len() != 6 {
        return Err(GfnError::usage("D4 points have 6 coordinates"));
    }
    let tol = Float::with_val(prec.bits(), HALPHEN_TOLERANCE);
    let mut scores = Vec::new();
    for conv in HalphenConvention::all() {
        let halphen_residual = halphen_residual(&probe[5], conv, prec)?;
        let oracle = D4Prepotential::new(conv, D4Variant::Corrected);
        let wdvv_residual = wdvv_residual(&oracle, probe, prec)?;
        scores.push(ConventionScore {
            convention: conv,
            halphen_residual,
            wdvv_residual,
        });
    }
    let selected = scores
        .iter()
        .filter(|s| s.halphen_residual < tol && s.wdvv_residual < tol)
        .fold(None::<&ConventionScore>, |best, s| match best {
            Some(b) if b.wdvv_residual <= s.wdvv_residual || s.wdvv_residual < tol => Some(b),
            _ => Some(s),
        })
        .map(|s| s.convention);
    match selected {
        Some(selected) => Ok(ConventionReport { selected, scores }),
        None => Err(convention_error(&scores)),
    }
}

/// Reference point used for convention selection.
pub fn default_probe(prec: Precision) -> Vec<Complex> {
    let bits = prec.bits();
    let mut p: Vec<Complex> = [0.7, -0.9, 1.1, 0.6, -1.3]
        .iter()
        .map(|&x| Complex::with_val(bits, (x, 0)))
        .collect();
    p.push(Complex::with_val(bits, (0.1, 2.0)));
    p
}

/// Theta-constant solution at `τ` under the selected convention, with its residual
/// guaranteed below the Halphen tolerance.
pub fn theta_candidate(
    tau: &Complex,
    prec: Precision,
) -> Result<(HalphenState, HalphenConvention)> {
    check_tau(tau)?;
    let mut probe = default_probe(prec);
    probe[5] = Complex::with_val(prec.bits(), tau);
    let report = select_convention(&probe, prec)?;
    let (state, _) = candidate_with_derivative(tau, report.selected, prec)?;
    Ok((state, report.selected))
}

/// Which reading of the printed prepotential to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum D4Variant {
    /// Quartic coefficient `−(1/24)(u+v+w)` and the pairwise sum as printed, with `t₂³t₄²`.
    Printed,
    /// Quartic coefficient `−(1/24)(u+v+4w)` and the pairwise sum over all six pairs.
    Corrected,
}

/// Coefficient functions of `t₆`, as linear forms in `(u, v, w)`.
const LINEAR_FORMS: usize = 3;

/// The D4^(1,1) prepotential
/// Every partial derivative of a polynomial, keyed by sorted index list.
type DerivativeTable = HashMap<Vec<usize>, MultiPoly<Rat>>;

/// `¼t₁²t₆ + ½t₁Σtᵢ² + A(t₆)Σtᵢ⁴ + B(t₆)Σtᵢ²tⱼ² + C(t₆)t₂t₃t₄t₅`.
#[derive(Clone, Debug)]
pub struct D4Prepotential {
    pub convention: HalphenConvention,
    pub variant: D4Variant,
    metric: Vec<Vec<Rat>>,
    euler: EulerData,
    /// Polynomial part free of `u, v, w`, with all its derivatives.
    base: DerivativeTable,
    /// `(polynomial, coefficients of u, v, w)` and the derivatives of each polynomial.
    pieces: Vec<([Rat; 3], DerivativeTable)>,
}

fn all_derivatives(p: &MultiPoly<Rat>) -> DerivativeTable {
    let n = p.arity();
    let mut out = DerivativeTable::new();
    out.insert(Vec::new(), p.clone());
    for k in 1..=5 {
        for idx in sorted_multi_indices(n, k) {
            let d = out[&idx[..k - 1].to_vec()].derivative(idx[k - 1]);
            out.insert(idx, d);
        }
    }
    out
}

fn mono(exps: [u32; 6], c: Rat) -> (Monomial, Rat) {
    (Monomial::new(exps.to_vec()), c)
}

impl D4Prepotential {
    pub fn new(convention: HalphenConvention, variant: D4Variant) -> Self {
        let r = |p: i64, q: i64| Rat::from((p, q));
        let mut base = vec![mono([2, 0, 0, 0, 0, 1], r(1, 4))];
        for i in 1..5 {
            let mut e = [1, 0, 0, 0, 0, 0];
            e[i] = 2;
            base.push(mono(e, r(1, 2)));
        }
        let base = MultiPoly::from_terms(6, base).expect("arity 6");
        let quartic = MultiPoly::from_terms(
            6,
            (1..5).map(|i| {
                let mut e = [0; 6];
                e[i] = 4;
                mono(e, r(1, 1))
            }),
        )
        .expect("arity 6");
        let pairs: Vec<(usize, usize, u32)> = match variant {
            D4Variant::Corrected => vec![
                (1, 2, 2),
                (1, 3, 2),
                (1, 4, 2),
                (2, 3, 2),
                (2, 4, 2),
                (3, 4, 2),
            ],
            D4Variant::Printed => vec![
                (1, 2, 2),
                (1, 3, 2),
                (1, 4, 2),
                (1, 3, 3),
                (2, 4, 2),
                (3, 4, 2),
            ],
        };
        let pairwise = MultiPoly::from_terms(
            6,
            pairs.into_iter().map(|(i, j, first)| {
                let mut e = [0; 6];
                e[i] = first;
                e[j] = 2;
                mono(e, r(1, 1))
            }),
        )
        .expect("arity 6");
        let product = MultiPoly::term(Monomial::new(vec![0, 1, 1, 1, 1, 0]), r(1, 1));
        let w_quartic = match variant {
            D4Variant::Corrected => r(-4, 24),
            D4Variant::Printed => r(-1, 24),
        };
        let pieces = vec![
            ([r(-1, 24), r(-1, 24), w_quartic], all_derivatives(&quartic)),
            ([r(-1, 4), r(-1, 4), Rat::new()], all_derivatives(&pairwise)),
            ([r(-1, 1), r(1, 1), Rat::new()], all_derivatives(&product)),
        ];
        let mut metric = vec![vec![Rat::new(); 6]; 6];
        metric[0][5] = r(1, 2);
        metric[5][0] = r(1, 2);
        for (i, row) in metric.iter_mut().enumerate().take(5).skip(1) {
            row[i] = r(1, 1);
        }
        let euler = EulerData {
            weights: vec![r(1, 1), r(1, 2), r(1, 2), r(1, 2), r(1, 2), Rat::new()],
            charge: r(1, 1),
        };
        D4Prepotential {
            convention,
            variant,
            metric,
            euler,
            base: all_derivatives(&base),
            pieces,
        }
    }

    /// `L_E` minus `(3 − d)` on each polynomial piece, with `u, v, w` of weight 0.
    pub fn scaling_defects(&self) -> Vec<MultiPoly<Rat>> {
        let target = Rat::from(3) - &self.euler.charge;
        let defect = |p: &MultiPoly<Rat>| {
            let mut out = MultiPoly::zero(6);
            for (m, c) in p.terms() {
                let mut w = Rat::new();
                for (e, d) in m.exps().iter().zip(&self.euler.weights) {
                    w += Rat::from(d * *e);
                }
                out.add_term(m.clone(), &((w - &target) * c));
            }
            out
        };
        let mut out = vec![defect(&self.base[&Vec::new()])];
        out.extend(self.pieces.iter().map(|(_, d)| defect(&d[&Vec::new()])));
        out
    }

    fn check_point(point: &[Complex]) -> Result<()> {
        if point.len() != 6 {
            return Err(GfnError::usage("D4 points have 6 coordinates"));
        }
        check_tau(&point[5])
    }

    /// `m`-th `t₆`-derivatives of the three coefficient functions.
    fn coefficient_jets(
        &self,
        tau: &Complex,
        order: usize,
        prec: Precision,
    ) -> Result<Vec<[Complex; LINEAR_FORMS]>> {
        let bits = prec.bits();
        let (state, _) = candidate_with_derivative(tau, self.convention, prec)?;
        let jets = derivative_jets(&state, order);
        Ok(jets
            .iter()
            .map(|uvw| {
                let mut out = [0; LINEAR_FORMS].map(|_| Complex::with_val(bits, 0));
                for (slot, (forms, _)) in out.iter_mut().zip(&self.pieces) {
                    for (x, c) in uvw.iter().zip(forms) {
                        if *c != 0 {
                            *slot += Complex::with_val(bits, x * c);
                        }
                    }
                }
                out
            })
            .collect())
    }

    fn dense(
        &self,
        k: usize,
        point: &[Complex],
        jets: &[[Complex; LINEAR_FORMS]],
        bits: u32,
    ) -> Tensor {
        let eval = |p: &MultiPoly<Rat>| {
            p.eval_with(
                point,
                Complex::with_val(bits, 0),
                |c| Complex::with_val(bits, (c, 0)),
                |a, b| Complex::with_val(bits, a + b),
                |a, b| Complex::with_val(bits, a * b),
            )
        };
        let mut values = HashMap::new();
        for idx in sorted_multi_indices(6, k) {
            let mut v = eval(&self.base[&idx]);
            let m = idx.iter().filter(|&&i| i == 5).count();
            let rest: Vec<usize> = idx.iter().copied().filter(|&i| i != 5).collect();
            for (slot, (_, derivs)) in self.pieces.iter().enumerate() {
                let p = &derivs[&rest];
                if p.is_zero() {
                    continue;
                }
                v += eval(p) * &jets[m][slot];
            }
            values.insert(idx, v);
        }
        let mut t = Tensor::zeros(6, k, bits);
        let all: Vec<Vec<usize>> = t.indices().collect();
        for idx in all {
            let mut key = idx.clone();
            key.sort_unstable();
            t.set(&idx, values[&key].clone());
        }
        t
    }
}

impl PrepotentialOracle for D4Prepotential {
    fn dimension(&self) -> usize {
        6
    }

    fn metric(&self) -> &[Vec<Rat>] {
        &self.metric
    }

    fn euler(&self) -> Option<&EulerData> {
        Some(&self.euler)
    }

    fn derivatives(&self, point: &[Complex], prec: Precision) -> Result<FDerivatives> {
        Self::check_point(point)?;
        let bits = prec.bits();
        let jets = self.coefficient_jets(&point[5], 5, prec)?;
        Ok(FDerivatives {
            f3: self.dense(3, point, &jets, bits),
            f4: self.dense(4, point, &jets, bits),
            f5: self.dense(5, point, &jets, bits),
        })
    }

    fn third_derivatives(&self, point: &[Complex], prec: Precision) -> Result<Tensor> {
        Self::check_point(point)?;
        let jets = self.coefficient_jets(&point[5], 3, prec)?;
        Ok(self.dense(3, point, &jets, prec.bits()))
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng, prec: Precision) -> Vec<Complex> {
        let bits = prec.bits();
        let mut p: Vec<Complex> = (0..5)
            .map(|_| Complex::with_val(bits, (signed_unit(rng), 0)))
            .collect();
        let re: f64 = rng.gen_range(-0.5..0.5);
        let im: f64 = rng.gen_range(1.5..2.5);
        p.push(Complex::with_val(bits, (re, im)));
        p
    }
}

/// `G = −½ log η(t₆)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct D4G;

impl GOracle for D4G {
    fn gradient(&self, point: &[Complex], prec: Precision) -> Result<Vec<Complex>> {
        D4Prepotential::check_point(point)?;
        let mut g: Vec<Complex> = (0..6).map(|_| prec.complex_zero()).collect();
        g[5] = -(log_eta_derivative(&point[5], 1, prec)? / 2u32);
        Ok(g)
    }

    fn hessian(&self, point: &[Complex], prec: Precision) -> Result<Vec<Vec<Complex>>> {
        D4Prepotential::check_point(point)?;
        let mut h: Vec<Vec<Complex>> = (0..6)
            .map(|_| (0..6).map(|_| prec.complex_zero()).collect())
            .collect();
        h[5][5] = -(log_eta_derivative(&point[5], 2, prec)? / 2u32);
        Ok(h)
    }
}

/// The D4^(1,1) prepotential and G oracles under the selected convention.
pub fn d4_oracles(prec: Precision) -> Result<(D4Prepotential, D4G)> {
    let report = select_convention(&default_probe(prec), prec)?;
    Ok((
        D4Prepotential::new(report.selected, D4Variant::Corrected),
        D4G,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(40).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::with_val(p().bits(), (re, im))
    }

    #[test]
    fn rhs_examples() {
        let r = halphen_rhs([&c(2.0, 0.0), &c(3.0, 0.0), &c(5.0, 0.0)]);
        assert_eq!(r, [c(1.0, 0.0), c(11.0, 0.0), c(19.0, 0.0)]);
        let r = halphen_rhs([&c(1.0, 0.0), &c(0.0, 0.0), &c(0.0, 0.0)]);
        assert!(r.iter().all(Complex::is_zero));
        let k = c(1.5, -0.5);
        let sq = Complex::with_val(p().bits(), k.square_ref());
        assert!(halphen_rhs([&k, &k, &k]).iter().all(|x| *x == sq));
    }

    #[test]
    fn theta_candidate_at_2i() {
        let (state, conv) = theta_candidate(&c(0.0, 2.0), p()).unwrap();
        assert_eq!(conv, HalphenConvention::IDENTITY);
        assert!(halphen_residual(&state.tau, conv, p()).unwrap() < HALPHEN_TOLERANCE);
        let eta = log_eta_derivative(&state.tau, 1, p()).unwrap() * ETA_RELATION;
        assert!(cabs(&(state.sum() - eta)) < 1e-35);
    }

    #[test]
    fn negative_sign_fails_halphen() {
        let conv = HalphenConvention {
            perm: [0, 1, 2],
            sign: -1,
        };
        assert!(halphen_residual(&c(0.0, 2.0), conv, p()).unwrap() > 1e-3);
    }

    #[test]
    fn deep_cusp_limits() {
        let (state, _) = theta_candidate(&c(0.0, 40.0), p()).unwrap();
        let half_pi_i = Complex::with_val(p().bits(), (0, p().pi() / 2u32));
        assert!(cabs(&(state.u.clone() - half_pi_i)) < 1e-40);
        assert!(cabs(&state.v) < 1e-40 && cabs(&state.w) < 1e-40);
    }

    #[test]
    fn printed_prepotential_fails_wdvv() {
        let probe = default_probe(p());
        let printed = D4Prepotential::new(HalphenConvention::IDENTITY, D4Variant::Printed);
        assert!(wdvv_residual(&printed, &probe, p()).unwrap() > 1e-3);
        let fixed = D4Prepotential::new(HalphenConvention::IDENTITY, D4Variant::Corrected);
        assert!(wdvv_residual(&fixed, &probe, p()).unwrap() < 1e-30);
    }

    #[test]
    fn closed_derivatives() {
        let f = D4Prepotential::new(HalphenConvention::IDENTITY, D4Variant::Corrected);
        let pt = default_probe(p());
        let d = f.derivatives(&pt, p()).unwrap();
        let (s, _) = candidate_with_derivative(&pt[5], HalphenConvention::IDENTITY, p()).unwrap();
        assert_eq!(*d.f3.get(&[0, 1, 1]), c(1.0, 0.0));
        let uv = Complex::with_val(p().bits(), &s.u - &s.v);
        assert!(cabs(&(d.f4.get(&[1, 2, 3, 4]).clone() + &uv)) < 1e-40);
        let quartic =
            Complex::with_val(p().bits(), &s.u + &s.v) + Complex::with_val(p().bits(), &s.w * 4u32);
        assert!(cabs(&(d.f4.get(&[1, 1, 1, 1]).clone() + quartic)) < 1e-40);
    }

    #[test]
    fn polynomial_pieces_scale() {
        let f = D4Prepotential::new(HalphenConvention::IDENTITY, D4Variant::Corrected);
        assert!(f.scaling_defects().iter().all(MultiPoly::is_zero));
        let printed = D4Prepotential::new(HalphenConvention::IDENTITY, D4Variant::Printed);
        assert!(!printed.scaling_defects().iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn integrate_from_fixed_point_and_theta() {
        let ctl = StepControl::default();
        let fixed = HalphenState::new(c(0.0, 2.0), [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let end = halphen_integrate(&fixed, &c(0.0, 2.5), &ctl, p()).unwrap();
        assert!(cabs(&(end.u.clone() - 1u32)) < 1e-25 && cabs(&end.v) < 1e-25);

        let (start, conv) = theta_candidate(&c(0.0, 2.0), p()).unwrap();
        let end = halphen_integrate(&start, &c(0.0, 2.5), &ctl, p()).unwrap();
        let (direct, _) = candidate_with_derivative(&c(0.0, 2.5), conv, p()).unwrap();
        for (a, b) in end.components().iter().zip(direct.components()) {
            assert!(cabs(&Complex::with_val(p().bits(), *a - b)) < 1e-15);
        }
    }

    #[test]
    fn d4_getzler_residual() {
        use crate::getzler::{getzler_scan, PolynomialG};
        let (f, g) = d4_oracles(p()).unwrap();
        let report = getzler_scan(&f, &g, 2, 1, p()).unwrap();
        assert!(report.max_residual < 1e-30, "{}", report.max_residual);
        let wrong = getzler_scan(&f, &PolynomialG::zero(6), 1, 1, p()).unwrap();
        assert!(wrong.max_residual > 1e-6);
    }
}
