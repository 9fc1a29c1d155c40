//! Residual of Getzler's rank-4 equation for a prepotential and a candidate G.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{GfnError, Result};
use crate::exact_algebra::{linalg, Monomial, MultiPoly, Rat};
use crate::numeric::{cabs, format_complex, format_float, parse_rational, Precision};

/// Dense symmetric tensor over `n` indices.
#[derive(Clone, Debug)]
pub struct Tensor {
    n: usize,
    rank: usize,
    data: Vec<Complex>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize, bits: u32) -> Self {
        Tensor {
            n,
            rank,
            data: vec![Complex::with_val(bits, 0); n.pow(rank as u32)],
        }
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Complex {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], z: Complex) {
        let o = self.offset(idx);
        self.data[o] = z;
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.data.len()).map(move |mut k| {
            let mut idx = vec![0; self.rank];
            for slot in idx.iter_mut().rev() {
                *slot = k % self.n;
                k /= self.n;
            }
            idx
        })
    }
}

/// Third, fourth and fifth derivatives of a prepotential at one point.
#[derive(Clone, Debug)]
pub struct FDerivatives {
    pub f3: Tensor,
    pub f4: Tensor,
    pub f5: Tensor,
}

/// Euler data `E = Σ d_α t^α ∂_α + …` and the charge `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerData {
    pub weights: Vec<Rat>,
    pub charge: Rat,
}

pub trait PrepotentialOracle: Sync {
    fn dimension(&self) -> usize;

    /// Constant flat metric `η_{αβ}`.
    fn metric(&self) -> &[Vec<Rat>];

    fn euler(&self) -> Option<&EulerData> {
        None
    }

    fn derivatives(&self, point: &[Complex], prec: Precision) -> Result<FDerivatives>;

    fn third_derivatives(&self, point: &[Complex], prec: Precision) -> Result<Tensor> {
        Ok(self.derivatives(point, prec)?.f3)
    }

    /// A random admissible point.
    fn sample_point(&self, rng: &mut ChaCha8Rng, prec: Precision) -> Vec<Complex> {
        (0..self.dimension())
            .map(|_| Complex::with_val(prec.bits(), (signed_unit(rng), 0)))
            .collect()
    }
}

pub trait GOracle: Sync {
    fn gradient(&self, point: &[Complex], prec: Precision) -> Result<Vec<Complex>>;
    fn hessian(&self, point: &[Complex], prec: Precision) -> Result<Vec<Vec<Complex>>>;
}

/// Uniform in `±[0.5, 1.5]`.
pub fn signed_unit(rng: &mut ChaCha8Rng) -> f64 {
    let x: f64 = rng.gen_range(0.5..1.5);
    if rng.gen::<bool>() {
        x
    } else {
        -x
    }
}

fn eval_complex(p: &MultiPoly<Rat>, point: &[Complex], bits: u32) -> Complex {
    p.eval_with(
        point,
        Complex::with_val(bits, 0),
        |c| Complex::with_val(bits, (c, 0)),
        |a, b| Complex::with_val(bits, a + b),
        |a, b| Complex::with_val(bits, a * b),
    )
}

/// Polynomial prepotential with exact symbolic derivatives.
#[derive(Clone, Debug)]
pub struct PolynomialPrepotential {
    pub f: MultiPoly<Rat>,
    pub metric: Vec<Vec<Rat>>,
    pub euler: Option<EulerData>,
    derivs: HashMap<Vec<usize>, MultiPoly<Rat>>,
}

#[derive(Debug, Deserialize, Serialize)]
struct MonomialJson {
    exps: Vec<u32>,
    coeff: String,
}

#[derive(Debug, Deserialize, Serialize)]
struct PrepotentialJson {
    monomials: Vec<MonomialJson>,
    metric: Vec<Vec<String>>,
    #[serde(default)]
    euler_weights: Option<Vec<String>>,
    #[serde(default)]
    charge: Option<String>,
}

pub(crate) fn sorted_multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

impl PolynomialPrepotential {
    pub fn new(f: MultiPoly<Rat>, metric: Vec<Vec<Rat>>, euler: Option<EulerData>) -> Result<Self> {
        let n = f.arity();
        if metric.len() != n || metric.iter().any(|r| r.len() != n) {
            return Err(GfnError::usage(format!("metric must be {n}×{n}")));
        }
        for a in 0..n {
            for b in 0..n {
                if metric[a][b] != metric[b][a] {
                    return Err(GfnError::usage("metric must be symmetric"));
                }
            }
        }
        if linalg::determinant(&metric)? == 0 {
            return Err(GfnError::usage("metric is singular"));
        }
        if let Some(e) = &euler {
            if e.weights.len() != n {
                return Err(GfnError::usage(format!("expected {n} Euler weights")));
            }
        }
        let mut derivs = HashMap::<Vec<usize>, MultiPoly<Rat>>::new();
        for k in 1..=5 {
            for idx in sorted_multi_indices(n, k) {
                let p = match k {
                    1 => f.derivative(idx[0]),
                    _ => derivs[&idx[..k - 1].to_vec()].derivative(idx[k - 1]),
                };
                derivs.insert(idx, p);
            }
        }
        let out = PolynomialPrepotential {
            f,
            metric,
            euler,
            derivs,
        };
        out.check_metric()?;
        Ok(out)
    }

    /// `∂³F/∂t¹∂t^α∂t^β` must equal the supplied `η_{αβ}` identically.
    fn check_metric(&self) -> Result<()> {
        let n = self.f.arity();
        for a in 0..n {
            for b in 0..n {
                let mut idx = vec![0, a, b];
                idx.sort_unstable();
                let p = &self.derivs[&idx];
                let expect = MultiPoly::constant(n, self.metric[a][b].clone());
                if *p != expect {
                    return Err(GfnError::usage(format!(
                        "metric entry ({},{}) disagrees with the third derivative {}",
                        a + 1,
                        b + 1,
                        p
                    )));
                }
            }
        }
        Ok(())
    }

    /// `F = ½(t¹)²t² + (t²)⁴/72` with the off-diagonal unit pairing.
    pub fn a2() -> Self {
        let f = MultiPoly::from_terms(
            2,
            [
                (Monomial::new(vec![2, 1]), Rat::from((1, 2))),
                (Monomial::new(vec![0, 4]), Rat::from((1, 72))),
            ],
        )
        .expect("arity 2");
        let one = Rat::from(1);
        let metric = vec![vec![Rat::new(), one.clone()], vec![one, Rat::new()]];
        let euler = EulerData {
            weights: vec![Rat::from(1), Rat::from((2, 3))],
            charge: Rat::from((1, 3)),
        };
        Self::new(f, metric, Some(euler)).expect("valid A2 prepotential")
    }

    /// `F = (t¹)³/6`.
    pub fn cubic() -> Self {
        let f = MultiPoly::term(Monomial::new(vec![3]), Rat::from((1, 6)));
        let euler = EulerData {
            weights: vec![Rat::from(1)],
            charge: Rat::new(),
        };
        Self::new(f, vec![vec![Rat::from(1)]], Some(euler)).expect("valid cubic prepotential")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PrepotentialJson = serde_json::from_str(text)?;
        let n = raw.metric.len();
        let mut terms = Vec::with_capacity(raw.monomials.len());
        for m in &raw.monomials {
            if m.exps.len() != n {
                return Err(GfnError::Parse(format!(
                    "monomial {:?} does not have {n} exponents",
                    m.exps
                )));
            }
            terms.push((Monomial::new(m.exps.clone()), parse_rational(&m.coeff)?));
        }
        let f = MultiPoly::from_terms(n, terms)?;
        let metric = raw
            .metric
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| parse_rational(x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let euler = match (raw.euler_weights, raw.charge) {
            (Some(w), Some(d)) => Some(EulerData {
                weights: w.iter().map(|x| parse_rational(x)).collect::<Result<_>>()?,
                charge: parse_rational(&d)?,
            }),
            (None, None) => None,
            _ => {
                return Err(GfnError::Parse(
                    "euler_weights and charge must be given together".into(),
                ))
            }
        };
        Self::new(f, metric, euler)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = PrepotentialJson {
            monomials: self
                .f
                .terms()
                .map(|(m, c)| MonomialJson {
                    exps: m.exps().to_vec(),
                    coeff: c.to_string(),
                })
                .collect(),
            metric: self
                .metric
                .iter()
                .map(|r| r.iter().map(Rat::to_string).collect())
                .collect(),
            euler_weights: self
                .euler
                .as_ref()
                .map(|e| e.weights.iter().map(Rat::to_string).collect()),
            charge: self.euler.as_ref().map(|e| e.charge.to_string()),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }

    /// `L_E F − (3 − d)F`, which must be at most quadratic.
    pub fn scaling_defect(&self) -> Option<MultiPoly<Rat>> {
        let e = self.euler.as_ref()?;
        let n = self.f.arity();
        let mut out = MultiPoly::zero(n);
        for (m, c) in self.f.terms() {
            let mut w = Rat::new();
            for (e_a, d_a) in m.exps().iter().zip(&e.weights) {
                w += Rat::from(d_a * *e_a);
            }
            let k = w - (Rat::from(3) - &e.charge);
            out.add_term(m.clone(), &(k * c));
        }
        Some(out)
    }

    fn dense(&self, k: usize, point: &[Complex], bits: u32) -> Tensor {
        let n = self.f.arity();
        let mut values = HashMap::new();
        for idx in sorted_multi_indices(n, k) {
            let v = eval_complex(&self.derivs[&idx], point, bits);
            values.insert(idx, v);
        }
        let mut t = Tensor::zeros(n, k, bits);
        let all: Vec<Vec<usize>> = t.indices().collect();
        for idx in all {
            let mut key = idx.clone();
            key.sort_unstable();
            t.set(&idx, values[&key].clone());
        }
        t
    }
}

impl PrepotentialOracle for PolynomialPrepotential {
    fn dimension(&self) -> usize {
        self.f.arity()
    }

    fn metric(&self) -> &[Vec<Rat>] {
        &self.metric
    }

    fn euler(&self) -> Option<&EulerData> {
        self.euler.as_ref()
    }

    fn derivatives(&self, point: &[Complex], prec: Precision) -> Result<FDerivatives> {
        if point.len() != self.f.arity() {
            return Err(GfnError::usage(format!(
                "point must have {} coordinates",
                self.f.arity()
            )));
        }
        let bits = prec.bits();
        Ok(FDerivatives {
            f3: self.dense(3, point, bits),
            f4: self.dense(4, point, bits),
            f5: self.dense(5, point, bits),
        })
    }
}

/// Polynomial G with exact derivatives.
#[derive(Clone, Debug)]
pub struct PolynomialG {
    pub g: MultiPoly<Rat>,
}

impl PolynomialG {
    pub fn zero(n: usize) -> Self {
        PolynomialG {
            g: MultiPoly::zero(n),
        }
    }

    pub fn new(g: MultiPoly<Rat>) -> Self {
        PolynomialG { g }
    }
}

impl GOracle for PolynomialG {
    fn gradient(&self, point: &[Complex], prec: Precision) -> Result<Vec<Complex>> {
        let n = self.g.arity();
        Ok((0..n)
            .map(|a| eval_complex(&self.g.derivative(a), point, prec.bits()))
            .collect())
    }

    fn hessian(&self, point: &[Complex], prec: Precision) -> Result<Vec<Vec<Complex>>> {
        let n = self.g.arity();
        Ok((0..n)
            .map(|a| {
                let ga = self.g.derivative(a);
                (0..n)
                    .map(|b| eval_complex(&ga.derivative(b), point, prec.bits()))
                    .collect()
            })
            .collect())
    }
}

/// The seven contributions to `Σ z z z z Δ`.
#[derive(Clone, Debug)]
pub struct GetzlerTerms {
    pub terms: [Complex; 7],
}

impl GetzlerTerms {
    pub fn total(&self) -> Complex {
        let bits = self.terms[0].prec().0;
        let mut acc = Complex::with_val(bits, 0);
        for t in &self.terms {
            acc += t;
        }
        acc
    }

    /// Sum of the two terms carrying second derivatives of G.
    pub fn hessian_part(&self) -> Complex {
        Complex::with_val(self.terms[0].prec().0, &self.terms[0] + &self.terms[1])
    }
}

/// The seven rank-4 tensors making up `Δ_{α₁α₂α₃α₄}`.
#[derive(Clone, Debug)]
pub struct DeltaTensor {
    pub parts: Vec<Tensor>,
}

fn inverse_metric(metric: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>> {
    linalg::inverse(&metric.to_vec()).map_err(|_| GfnError::usage("metric is singular"))
}

/// Raises the first index of `t` with `η⁻¹`.
fn raise(t: &Tensor, eta_inv: &[Vec<Rat>]) -> Tensor {
    let bits = t.data[0].prec().0;
    let mut out = Tensor::zeros(t.n, t.rank, bits);
    let all: Vec<Vec<usize>> = t.indices().collect();
    for idx in all {
        let mut acc = Complex::with_val(bits, 0);
        let mut src = idx.clone();
        for (nu, e) in eta_inv[idx[0]].iter().enumerate() {
            if *e == 0 {
                continue;
            }
            src[0] = nu;
            acc += Complex::with_val(bits, t.get(&src) * e);
        }
        out.set(&idx, acc);
    }
    out
}

/// Builds `Δ_{α₁α₂α₃α₄}` term by term at a point.
pub fn delta_tensor(
    f: &dyn PrepotentialOracle,
    g: &dyn GOracle,
    point: &[Complex],
    prec: Precision,
) -> Result<DeltaTensor> {
    let n = f.dimension();
    let bits = prec.bits();
    let eta_inv = inverse_metric(f.metric())?;
    let d = f.derivatives(point, prec)?;
    let c2 = raise(&d.f3, &eta_inv);
    let c3 = raise(&d.f4, &eta_inv);
    let c4 = raise(&d.f5, &eta_inv);
    let gg = g.gradient(point, prec)?;
    let gh = g.hessian(point, prec)?;
    if gg.len() != n || gh.len() != n {
        return Err(GfnError::usage(
            "G oracle dimension differs from the prepotential",
        ));
    }
    let z = || Complex::with_val(bits, 0);
    let mul = |a: &Complex, b: &Complex| Complex::with_val(bits, a * b);

    // p[a][b][ν] = c^μ_{ab} G_{μν}
    let mut p = Tensor::zeros(n, 3, bits);
    // r[c][μ][d] = c^ν_{cμ} G_{dν}
    let mut r = Tensor::zeros(n, 3, bits);
    // s[c][d][μ] = c^ν_{cdμ} G_ν
    let mut s = Tensor::zeros(n, 3, bits);
    for a in 0..n {
        for b in 0..n {
            for nu in 0..n {
                let mut acc = z();
                let mut acc_r = z();
                let mut acc_s = z();
                for m in 0..n {
                    acc += mul(c2.get(&[m, a, b]), &gh[m][nu]);
                    acc_r += mul(c2.get(&[m, a, b]), &gh[nu][m]);
                    acc_s += mul(c3.get(&[m, a, b, nu]), &gg[m]);
                }
                p.set(&[a, b, nu], acc);
                r.set(&[a, b, nu], acc_r);
                s.set(&[a, b, nu], acc_s);
            }
        }
    }
    // v[d][μ] = c^ν_{dμ} G_ν, k[d][μ] = c^ν_{dμν}, tr[μ] = c^ν_{μν}
    let mut v = vec![vec![z(); n]; n];
    let mut k = vec![vec![z(); n]; n];
    let mut tr = vec![z(); n];
    for a in 0..n {
        for m in 0..n {
            for nu in 0..n {
                v[a][m] += mul(c2.get(&[nu, a, m]), &gg[nu]);
                k[a][m] += c3.get(&[nu, a, m, nu]);
            }
        }
        for nu in 0..n {
            tr[a] += c2.get(&[nu, a, nu]);
        }
    }

    let mut parts: Vec<Tensor> = (0..7).map(|_| Tensor::zeros(n, 4, bits)).collect();
    let coeffs = [
        Rat::from(3),
        Rat::from(-4),
        Rat::from(-1),
        Rat::from(2),
        Rat::from((1, 6)),
        Rat::from((1, 24)),
        Rat::from((-1, 4)),
    ];
    let all: Vec<Vec<usize>> = parts[0].indices().collect();
    for idx in all {
        let (a, b, c, dd) = (idx[0], idx[1], idx[2], idx[3]);
        let mut t = [z(), z(), z(), z(), z(), z(), z()];
        for m in 0..n {
            let cab = c2.get(&[m, a, b]);
            t[0] += mul(p.get(&[a, b, m]), c2.get(&[m, c, dd]));
            t[1] += mul(cab, r.get(&[c, m, dd]));
            t[2] += mul(cab, s.get(&[c, dd, m]));
            let cabc = c3.get(&[m, a, b, c]);
            t[3] += mul(cabc, &v[dd][m]);
            t[4] += mul(cabc, &k[dd][m]);
            t[5] += mul(c4.get(&[m, a, b, c, dd]), &tr[m]);
            for nu in 0..n {
                t[6] += mul(c3.get(&[m, a, b, nu]), c3.get(&[nu, c, dd, m]));
            }
        }
        for (slot, (val, coef)) in t.into_iter().zip(&coeffs).enumerate() {
            parts[slot].set(&idx, val * coef);
        }
    }
    Ok(DeltaTensor { parts })
}

impl DeltaTensor {
    /// `Σ z1_{α₁} z2_{α₂} z3_{α₃} z4_{α₄} Δ_{α₁α₂α₃α₄}` per term.
    pub fn contract(&self, probes: [&[Complex]; 4]) -> Result<GetzlerTerms> {
        let n = self.parts[0].n;
        if probes.iter().any(|z| z.len() != n) {
            return Err(GfnError::usage(format!(
                "probe vectors must have {n} components"
            )));
        }
        let bits = self.parts[0].data[0].prec().0;
        let mut terms = [0; 7].map(|_| Complex::with_val(bits, 0));
        for (slot, part) in self.parts.iter().enumerate() {
            for (off, idx) in part.indices().enumerate() {
                let x = &part.data[off];
                if x.is_zero() {
                    continue;
                }
                let mut w = x.clone();
                for (z, &i) in probes.iter().zip(&idx) {
                    w *= &z[i];
                }
                terms[slot] += w;
            }
        }
        Ok(GetzlerTerms { terms })
    }
}

/// Term-by-term contraction of `Δ` with `z⊗z⊗z⊗z`.
pub fn getzler_terms(
    f: &dyn PrepotentialOracle,
    g: &dyn GOracle,
    point: &[Complex],
    z: &[Complex],
    prec: Precision,
) -> Result<GetzlerTerms> {
    delta_tensor(f, g, point, prec)?.contract([z, z, z, z])
}

/// `Σ z_{α₁}z_{α₂}z_{α₃}z_{α₄} Δ_{α₁α₂α₃α₄}`.
pub fn getzler_delta(
    f: &dyn PrepotentialOracle,
    g: &dyn GOracle,
    point: &[Complex],
    z: &[Complex],
    prec: Precision,
) -> Result<Complex> {
    Ok(getzler_terms(f, g, point, z, prec)?.total())
}

/// Largest `|F_{αβμ}η^{μν}F_{νγδ} − F_{αγμ}η^{μν}F_{νβδ}|` at a point.
pub fn wdvv_residual(
    f: &dyn PrepotentialOracle,
    point: &[Complex],
    prec: Precision,
) -> Result<Float> {
    let n = f.dimension();
    let bits = prec.bits();
    let eta_inv = inverse_metric(f.metric())?;
    let f3 = f.third_derivatives(point, prec)?;
    let c = raise(&f3, &eta_inv);
    let prod = |a: usize, b: usize, g: usize, dl: usize| {
        let mut acc = Complex::with_val(bits, 0);
        for m in 0..n {
            acc += Complex::with_val(bits, f3.get(&[a, b, m]) * c.get(&[m, g, dl]));
        }
        acc
    };
    let mut worst = Float::with_val(bits, 0);
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                for dl in 0..n {
                    let r = cabs(&(prod(a, b, g, dl) - prod(a, g, b, dl)));
                    if r > worst {
                        worst = r;
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Largest `|∂³F/∂t¹∂t^α∂t^β − η_{αβ}|` at a point.
pub fn metric_defect(
    f: &dyn PrepotentialOracle,
    point: &[Complex],
    prec: Precision,
) -> Result<Float> {
    let n = f.dimension();
    let f3 = f.third_derivatives(point, prec)?;
    let mut worst = Float::with_val(prec.bits(), 0);
    for a in 0..n {
        for b in 0..n {
            let diff = Complex::with_val(prec.bits(), f3.get(&[0, a, b]) - &f.metric()[a][b]);
            let r = cabs(&diff);
            if r > worst {
                worst = r;
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSample {
    pub point: Vec<String>,
    pub probe: Vec<String>,
    pub residual: String,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub seed: u64,
    pub samples: Vec<ScanSample>,
    pub residuals: Vec<Float>,
    pub max_residual: Float,
}

impl ScanReport {
    pub fn to_json(&self, digits: u32) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "samples": self.samples,
            "max_residual": format_float(&self.max_residual, digits),
        })
    }
}

/// Evaluates the residual at `n_points` seeded random points and probes.
pub fn getzler_scan(
    f: &dyn PrepotentialOracle,
    g: &dyn GOracle,
    n_points: usize,
    seed: u64,
    prec: Precision,
) -> Result<ScanReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = prec.bits();
    let mut samples = Vec::with_capacity(n_points);
    let mut residuals = Vec::with_capacity(n_points);
    let mut max_residual = Float::with_val(bits, 0);
    for _ in 0..n_points {
        let point = f.sample_point(&mut rng, prec);
        let probe: Vec<Complex> = (0..f.dimension())
            .map(|_| Complex::with_val(bits, (signed_unit(&mut rng), 0)))
            .collect();
        let r = cabs(&getzler_delta(f, g, &point, &probe, prec)?);
        if r > max_residual {
            max_residual = r.clone();
        }
        samples.push(ScanSample {
            point: point.iter().map(|x| format_complex(x, 20)).collect(),
            probe: probe.iter().map(|x| format_complex(x, 20)).collect(),
            residual: format_float(&r, 10),
        });
        residuals.push(r);
    }
    Ok(ScanReport {
        seed,
        samples,
        residuals,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn cvec(xs: &[f64], prec: Precision) -> Vec<Complex> {
        xs.iter()
            .map(|&x| Complex::with_val(prec.bits(), (x, 0)))
            .collect()
    }

    #[test]
    fn cubic_residual_is_exactly_zero() {
        let p = Precision::default();
        let f = PolynomialPrepotential::cubic();
        let r = getzler_delta(
            &f,
            &PolynomialG::zero(1),
            &cvec(&[0.7], p),
            &cvec(&[1.3], p),
            p,
        )
        .unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn a2_satisfies_wdvv_and_getzler() {
        let p = Precision::default();
        let f = PolynomialPrepotential::a2();
        let pt = cvec(&[0.8, -1.1], p);
        assert!(wdvv_residual(&f, &pt, p).unwrap() < 1e-60);
        assert!(metric_defect(&f, &pt, p).unwrap().is_zero());
        let r = getzler_delta(&f, &PolynomialG::zero(2), &pt, &cvec(&[1.2, -0.6], p), p).unwrap();
        assert!(cabs(&r) < 1e-60);
        assert!(f.scaling_defect().unwrap().is_zero());
    }

    #[test]
    fn perturbed_g_matches_closed_value() {
        // G = t² leaves only −c^μ_{zz}c^ν_{zzμ}G_ν + 2c^μ_{zzz}c^ν_{zμ}G_ν = (2/3)z₂⁴.
        let p = Precision::default();
        let f = PolynomialPrepotential::a2();
        let g = PolynomialG::new(MultiPoly::var(2, 1));
        let z = cvec(&[0.9, 1.25], p);
        let r = getzler_delta(&f, &g, &cvec(&[0.3, 0.7], p), &z, p).unwrap();
        let expect = Float::with_val(p.bits(), 1.25f64).pow(4u32) * 2u32 / 3u32;
        assert!(cabs(&(r - expect)) < 1e-60);
    }

    #[test]
    fn rejects_bad_metric() {
        let f = MultiPoly::term(Monomial::new(vec![3]), Rat::from((1, 6)));
        assert!(PolynomialPrepotential::new(f.clone(), vec![vec![Rat::new()]], None).is_err());
        assert!(PolynomialPrepotential::new(f, vec![vec![Rat::from(2)]], None).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = PolynomialPrepotential::a2();
        let back = PolynomialPrepotential::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back.f, f.f);
        assert_eq!(back.euler, f.euler);
    }
}
