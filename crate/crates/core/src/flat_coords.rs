//! The hypergeometric flat coordinate `t(s)` of the marginal deformation, its
//! inverse, and the first-order data of the change of variables at `0★`.

use std::path::Path;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{GfnError, Result};
use crate::exact_algebra::Rat;
use crate::milnor_ring::ModelName;
use crate::numeric::{parse_rational, Precision};
use crate::special_functions::{hyp2f1, HypParams};

/// Newton iteration cap for [`s_of_t`].
pub const MAX_NEWTON_ITERATIONS: usize = 100;

/// `t = s·F_num(u)/F_den(u)` with `u = κ·s^p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalMap {
    pub model: ModelName,
    pub num: HypParams,
    pub den: HypParams,
    pub u_coeff: Rat,
    pub u_power: u32,
}

impl MarginalMap {
    pub fn new(model: ModelName) -> Self {
        let r = |p: i64, q: i64| Rat::from((p, q));
        let (num, den, u_coeff, u_power) = match model {
            ModelName::E6t => (
                HypParams::from_ints((2, 3), (2, 3), (4, 3)),
                HypParams::from_ints((1, 3), (1, 3), (2, 3)),
                r(-1, 27),
                3,
            ),
            ModelName::E7t => (
                HypParams::from_ints((3, 4), (3, 4), (3, 2)),
                HypParams::from_ints((1, 4), (1, 4), (1, 2)),
                r(1, 4),
                2,
            ),
            ModelName::E8t => (
                HypParams::from_ints((5, 12), (11, 12), (4, 3)),
                HypParams::from_ints((1, 12), (7, 12), (2, 3)),
                r(-4, 27),
                3,
            ),
        };
        MarginalMap {
            model,
            num,
            den,
            u_coeff,
            u_power,
        }
    }

    pub fn u_of_s(&self, s: &Float) -> Float {
        Float::with_val(s.prec(), s.pow(self.u_power)) * &self.u_coeff
    }

    pub fn du_ds(&self, s: &Float) -> Float {
        Float::with_val(s.prec(), s.pow(self.u_power - 1)) * Rat::from(&self.u_coeff * self.u_power)
    }

    /// `g(u) = F_den(u)`.
    pub fn g(&self, u: &Float, prec: Precision) -> Result<Float> {
        hyp2f1(&self.den, u, 0, prec)
    }

    /// `g′(u) = dg/du`.
    pub fn g_prime(&self, u: &Float, prec: Precision) -> Result<Float> {
        hyp2f1(&self.den, u, 1, prec)
    }

    /// Closed real interval of admissible marginal values under the ₂F₁ domain policy.
    pub fn s_domain(&self, prec: Precision) -> (Float, Float) {
        let bits = prec.bits();
        let limit = Float::with_val(bits, crate::special_functions::HYP_DOMAIN_LIMIT);
        // Pfaff reaches u ≥ -limit/(1-limit) on the negative side
        let neg = Float::with_val(bits, &limit / Float::with_val(bits, 1 - &limit));
        let k = Float::with_val(bits, self.u_coeff.clone().abs());
        let root = |x: Float| -> Float {
            let y = x / &k;
            y.pow(Float::with_val(bits, 1) / self.u_power) * 0.999_999_999_999f64
        };
        if self.u_power.is_multiple_of(2) {
            let r = root(limit);
            (-r.clone(), r)
        } else if self.u_coeff < 0 {
            (-root(limit), root(neg))
        } else {
            (-root(neg), root(limit))
        }
    }

    fn check(&self, s: &Float) -> Result<Float> {
        let u = self.u_of_s(s);
        if u == 1 {
            return Err(GfnError::DegenerateRing(format!(
                "{}: discriminant vanishes at s = {}",
                self.model,
                s.to_f64()
            )));
        }
        Ok(u)
    }
}

fn prec_s(s: &Float, prec: Precision) -> Float {
    Float::with_val(prec.bits(), s)
}

/// `t(s) = s·F_num(u)/F_den(u)`.
pub fn t_of_s(model: ModelName, s: &Float, prec: Precision) -> Result<Float> {
    let map = MarginalMap::new(model);
    let s = prec_s(s, prec);
    let u = map.check(&s)?;
    let n = hyp2f1(&map.num, &u, 0, prec)?;
    let d = map.g(&u, prec)?;
    Ok(s * n / d)
}

/// `dt/ds` by the quotient rule on `s·F_num/F_den`.
pub fn dt_ds_quotient(model: ModelName, s: &Float, prec: Precision) -> Result<Float> {
    let map = MarginalMap::new(model);
    let s = prec_s(s, prec);
    let u = map.check(&s)?;
    let n = hyp2f1(&map.num, &u, 0, prec)?;
    let dn = hyp2f1(&map.num, &u, 1, prec)?;
    let d = map.g(&u, prec)?;
    let dd = map.g_prime(&u, prec)?;
    let up = map.du_ds(&s);
    let ratio = Float::with_val(prec.bits(), &n / &d);
    let deriv = (dn * &d - n * dd) / Float::with_val(prec.bits(), d.square_ref());
    Ok(ratio + s * up * deriv)
}

/// `dt/ds = 1/((1−u)·g(u)²)` from the Wronskian of the hypergeometric equation.
pub fn dt_ds_wronskian(model: ModelName, s: &Float, prec: Precision) -> Result<Float> {
    let map = MarginalMap::new(model);
    let s = prec_s(s, prec);
    let u = map.check(&s)?;
    let g = map.g(&u, prec)?;
    let one_minus = Float::with_val(prec.bits(), 1 - &u);
    Ok(Float::with_val(prec.bits(), 1) / (one_minus * g.square()))
}

/// `dt/ds`: the Wronskian form for Ẽ6, the quotient rule otherwise.
pub fn dt_ds(model: ModelName, s: &Float, prec: Precision) -> Result<Float> {
    match model {
        ModelName::E6t => dt_ds_wronskian(model, s, prec),
        _ => dt_ds_quotient(model, s, prec),
    }
}

/// Result of inverting `t(s)`.
#[derive(Clone, Debug)]
pub struct Inversion {
    pub s: Float,
    pub newton_steps: usize,
    pub bisection_steps: usize,
}

/// Inverts `t(s)` by Newton's method from `s₀ = t`, bisecting whenever a step
/// leaves the admissible interval or fails to shrink the residual.
pub fn invert(model: ModelName, t: &Float, prec: Precision) -> Result<Inversion> {
    let map = MarginalMap::new(model);
    let bits = prec.bits();
    let t = Float::with_val(bits, t);
    let (mut lo, mut hi) = map.s_domain(prec);
    let stop = prec.eps_with_slack(6);
    let mut s = t.clone().clamp(&lo, &hi);
    let (mut newton_steps, mut bisection_steps) = (0, 0);
    let mut last_res: Option<Float> = None;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let f = t_of_s(model, &s, prec)? - &t;
        if f.is_zero() {
            return Ok(Inversion {
                s,
                newton_steps,
                bisection_steps,
            });
        }
        if f < 0 {
            lo = s.clone();
        } else {
            hi = s.clone();
        }
        let res = Float::with_val(bits, f.abs_ref());
        let slope = dt_ds(model, &s, prec)?;
        let candidate = Float::with_val(bits, &s - Float::with_val(bits, &f / &slope));
        let improving = last_res.as_ref().is_none_or(|r| res < *r);
        let next = if candidate > lo && candidate < hi && improving {
            newton_steps += 1;
            candidate
        } else {
            bisection_steps += 1;
            Float::with_val(bits, &lo + &hi) / 2u32
        };
        let step = Float::with_val(bits, &next - &s).abs();
        s = next;
        last_res = Some(res);
        if step < stop {
            let (dlo, dhi) = map.s_domain(prec);
            if Float::with_val(bits, &s - &dlo).abs() < stop
                || Float::with_val(bits, &s - &dhi).abs() < stop
            {
                return Err(GfnError::Domain(format!(
                    "t = {} lies outside the image of the admissible s-interval",
                    t.to_f64()
                )));
            }
            return Ok(Inversion {
                s,
                newton_steps,
                bisection_steps,
            });
        }
    }
    Err(GfnError::Convergence {
        iterations: MAX_NEWTON_ITERATIONS,
        last: s.to_string_radix(10, Some(30)),
    })
}

/// The marginal `s` with `t(s) = t`.
pub fn s_of_t(model: ModelName, t: &Float, prec: Precision) -> Result<Float> {
    Ok(invert(model, t, prec)?.s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearizationSource {
    Builtin,
    ExternalFile,
}

/// `∂²s^a/∂t^μ∂t^μ★` at `0★`.
#[derive(Clone, Debug)]
pub struct CrossTerm {
    pub a: usize,
    pub mu: usize,
    pub mustar: usize,
    pub value: Float,
}

/// First- and second-order data of `s(t)` at the point `0★ = (0, …, 0, t)`.
#[derive(Clone, Debug)]
pub struct LinearizationData {
    pub model: ModelName,
    pub s: Float,
    /// `J[a-1][μ-1] = ∂s^a/∂t^μ`, including `∂s/∂t` in the marginal slot.
    pub jacobian: Vec<Vec<Float>>,
    pub cross: Vec<CrossTerm>,
    pub source: LinearizationSource,
}

impl LinearizationData {
    pub fn n(&self) -> usize {
        self.jacobian.len()
    }

    /// `∂s^a/∂t^a` for the non-marginal indices `a = 1 … n−1`.
    pub fn diag(&self) -> Vec<Float> {
        (0..self.n() - 1)
            .map(|a| self.jacobian[a][a].clone())
            .collect()
    }

    pub fn j(&self, a: usize, mu: usize) -> &Float {
        &self.jacobian[a - 1][mu - 1]
    }

    /// Sum of all listed `∂²s^a/∂t^μ∂t^ν` with `{μ, ν} = {mu, mustar}`.
    pub fn cross_value(&self, a: usize, mu: usize, mustar: usize) -> Float {
        let mut acc = Float::with_val(self.s.prec(), 0);
        for c in &self.cross {
            if c.a == a && ((c.mu, c.mustar) == (mu, mustar) || (c.mu, c.mustar) == (mustar, mu)) {
                acc += &c.value;
            }
        }
        acc
    }

    /// Determinant of `∂s/∂t` at `0★`.
    pub fn jacobian_determinant(&self) -> Float {
        float_det(&self.jacobian)
    }
}

fn float_det(m: &[Vec<Float>]) -> Float {
    let n = m.len();
    let prec = m[0][0].prec();
    let mut a: Vec<Vec<Float>> = m.to_vec();
    let mut det = Float::with_val(prec, 1);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .clone()
                .abs()
                .partial_cmp(&a[j][col].clone().abs())
                .unwrap()
        });
        let p = pivot.unwrap();
        if a[p][col].is_zero() {
            return Float::with_val(prec, 0);
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= &a[col][col];
        for i in col + 1..n {
            let f = Float::with_val(prec, &a[i][col] / &a[col][col]);
            for j in col..n {
                let t = Float::with_val(prec, &f * &a[col][j]);
                a[i][j] -= t;
            }
        }
    }
    det
}

/// The built-in Ẽ6 data; other models need an external file.
pub fn linearization(model: ModelName, s: &Float, prec: Precision) -> Result<LinearizationData> {
    if model != ModelName::E6t {
        return Err(GfnError::MissingData(format!(
            "no built-in linearization for {model}; supply a linearization file"
        )));
    }
    let map = MarginalMap::new(model);
    let bits = prec.bits();
    let s = prec_s(s, prec);
    let u = map.check(&s)?;
    let g = map.g(&u, prec)?;
    let gp = map.g_prime(&u, prec)?;
    let one_minus = Float::with_val(bits, 1 - &u);
    let third = Float::with_val(bits, 1) / 3u32;
    let n = 8;
    let mut jacobian = vec![vec![Float::with_val(bits, 0); n]; n];
    jacobian[0][0] = Float::with_val(bits, 1);
    for a in 2..=4 {
        jacobian[a - 1][a - 1] = Float::with_val(bits, (&one_minus).pow(&third)) * &g;
    }
    for a in 5..=7 {
        jacobian[a - 1][a - 1] =
            Float::with_val(bits, (&one_minus).pow(Float::with_val(bits, &third * 2u32))) * &g;
    }
    jacobian[n - 1][n - 1] = Float::with_val(bits, 1) / dt_ds(model, &s, prec)?;
    let value = Float::with_val(bits, s.square_ref()) * &one_minus * &g * &gp / 9u32;
    let cross = [(2, 7), (3, 6), (4, 5)]
        .iter()
        .map(|&(mu, mustar)| CrossTerm {
            a: 1,
            mu,
            mustar,
            value: value.clone(),
        })
        .collect();
    Ok(LinearizationData {
        model,
        s,
        jacobian,
        cross,
        source: LinearizationSource::Builtin,
    })
}

/// One hypergeometric factor of a linearization term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HypFactor {
    /// `"g"`, `"gprime"` or `"one"`.
    Named(String),
    Params {
        a: String,
        b: String,
        c: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HypSpec {
    One(HypFactor),
    Many(Vec<HypFactor>),
}

/// `coeff · (1−u)^pow_1mu · hyp(u) · s^spow`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinTerm {
    pub coeff: String,
    #[serde(default = "zero_string")]
    pub pow_1mu: String,
    #[serde(default)]
    pub hyp: Option<HypSpec>,
    #[serde(default)]
    pub spow: i32,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinPair {
    pub a: usize,
    pub terms: Vec<LinTerm>,
}

/// `∂s^a/∂t^index` for every listed `a`; a bare `terms` list means `a = index`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinDiag {
    pub index: usize,
    #[serde(default)]
    pub terms: Vec<LinTerm>,
    #[serde(default)]
    pub pairs: Vec<LinPair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinCross {
    pub a: usize,
    pub mu: usize,
    pub mustar: usize,
    pub terms: Vec<LinTerm>,
}

/// External linearization dataset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearizationFile {
    pub model: String,
    #[serde(default)]
    pub source: Option<String>,
    pub diag: Vec<LinDiag>,
    #[serde(default)]
    pub cross: Vec<LinCross>,
}

impl LinearizationFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: LinearizationFile = serde_json::from_str(text)?;
        f.model_name()?;
        Ok(f)
    }

    pub fn model_name(&self) -> Result<ModelName> {
        self.model.parse()
    }

    /// Evaluates the dataset at the marginal `s`. Indices not listed get `∂s^a/∂t^a = 1`
    /// for `a = 1` and `∂s/∂t` for the marginal slot.
    pub fn evaluate(&self, s: &Float, prec: Precision) -> Result<LinearizationData> {
        let model = self.model_name()?;
        let n = model.dimension();
        let map = MarginalMap::new(model);
        let bits = prec.bits();
        let s = prec_s(s, prec);
        let u = map.check(&s)?;
        let mut jacobian = vec![vec![Float::with_val(bits, 0); n]; n];
        let mut listed = vec![false; n];
        let check = |i: usize, what: &str| -> Result<()> {
            if i == 0 || i > n {
                return Err(GfnError::Parse(format!(
                    "{what} index {i} out of range 1..={n}"
                )));
            }
            Ok(())
        };
        for d in &self.diag {
            check(d.index, "diag")?;
            listed[d.index - 1] = true;
            if !d.terms.is_empty() {
                jacobian[d.index - 1][d.index - 1] = eval_terms(&d.terms, &map, &s, &u, prec)?;
            }
            for p in &d.pairs {
                check(p.a, "pair")?;
                jacobian[p.a - 1][d.index - 1] += eval_terms(&p.terms, &map, &s, &u, prec)?;
            }
        }
        if !listed[0] {
            jacobian[0][0] = Float::with_val(bits, 1);
        }
        if !listed[n - 1] {
            jacobian[n - 1][n - 1] = Float::with_val(bits, 1) / dt_ds(model, &s, prec)?;
        }
        let mut cross = Vec::with_capacity(self.cross.len());
        for c in &self.cross {
            check(c.a, "cross")?;
            check(c.mu, "cross")?;
            check(c.mustar, "cross")?;
            cross.push(CrossTerm {
                a: c.a,
                mu: c.mu,
                mustar: c.mustar,
                value: eval_terms(&c.terms, &map, &s, &u, prec)?,
            });
        }
        Ok(LinearizationData {
            model,
            s,
            jacobian,
            cross,
            source: LinearizationSource::ExternalFile,
        })
    }
}

fn eval_terms(
    terms: &[LinTerm],
    map: &MarginalMap,
    s: &Float,
    u: &Float,
    prec: Precision,
) -> Result<Float> {
    let bits = prec.bits();
    let mut acc = Float::with_val(bits, 0);
    let one_minus = Float::with_val(bits, 1 - u);
    for t in terms {
        let coeff = parse_rational(&t.coeff)?;
        let p = parse_rational(&t.pow_1mu)?;
        let mut v = Float::with_val(bits, &coeff);
        if p != 0 {
            v *= Float::with_val(bits, (&one_minus).pow(&Float::with_val(bits, &p)));
        }
        let factors: Vec<&HypFactor> = match &t.hyp {
            None => Vec::new(),
            Some(HypSpec::One(f)) => vec![f],
            Some(HypSpec::Many(fs)) => fs.iter().collect(),
        };
        for f in factors {
            v *= match f {
                HypFactor::Named(name) => match name.as_str() {
                    "g" => map.g(u, prec)?,
                    "gprime" => map.g_prime(u, prec)?,
                    "one" => Float::with_val(bits, 1),
                    other => {
                        return Err(GfnError::Parse(format!(
                            "unknown hypergeometric factor {other:?}"
                        )))
                    }
                },
                HypFactor::Params { a, b, c } => {
                    let hp =
                        HypParams::new(parse_rational(a)?, parse_rational(b)?, parse_rational(c)?)?;
                    hyp2f1(&hp, u, 0, prec)?
                }
            };
        }
        if t.spow != 0 {
            v *= Float::with_val(bits, s.pow(t.spow));
        }
        acc += v;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn f(x: f64) -> Float {
        Float::with_val(p().bits(), x)
    }

    #[test]
    fn origin_is_fixed() {
        for m in ModelName::ALL {
            assert_eq!(t_of_s(m, &f(0.0), p()).unwrap(), 0);
            assert_eq!(dt_ds_quotient(m, &f(0.0), p()).unwrap(), 1);
            assert_eq!(s_of_t(m, &f(0.0), p()).unwrap(), 0);
        }
    }

    #[test]
    fn wronskian_holds_for_all_three_maps() {
        for m in ModelName::ALL {
            for x in [0.3, -0.4, 0.9] {
                let a = dt_ds_wronskian(m, &f(x), p()).unwrap();
                let b = dt_ds_quotient(m, &f(x), p()).unwrap();
                assert!((a - b).abs() < 1e-55, "{m} at {x}");
            }
        }
    }

    #[test]
    fn roundtrip_three_quarters() {
        for m in ModelName::ALL {
            let s = Float::with_val(p().bits(), 0.75);
            let t = t_of_s(m, &s, p()).unwrap();
            let inv = invert(m, &t, p()).unwrap();
            assert!((inv.s - &s).abs() < 1e-50, "{m}");
        }
    }

    #[test]
    fn degenerate_and_out_of_domain() {
        assert!(matches!(
            t_of_s(ModelName::E6t, &f(-3.0), p()),
            Err(GfnError::DegenerateRing(_))
        ));
        assert!(matches!(
            t_of_s(ModelName::E7t, &f(1.99), p()),
            Err(GfnError::Domain(_))
        ));
        assert!(matches!(
            s_of_t(ModelName::E7t, &f(50.0), p()),
            Err(GfnError::Domain(_))
        ));
        assert!(matches!(
            linearization(ModelName::E8t, &f(0.5), p()),
            Err(GfnError::MissingData(_))
        ));
    }

    #[test]
    fn e6_linearization_at_origin() {
        let lin = linearization(ModelName::E6t, &f(0.0), p()).unwrap();
        assert!(lin.diag().iter().all(|d| *d == 1));
        assert_eq!(lin.cross_value(1, 2, 7), 0);
        assert_eq!(lin.cross_value(1, 7, 2), 0);
    }
}
