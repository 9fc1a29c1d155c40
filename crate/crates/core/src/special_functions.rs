//! Arbitrary-precision ₂F₁, Dedekind η and Jacobi theta constants.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{GfnError, Result};
use crate::exact_algebra::Rat;
use crate::numeric::Precision;

pub type BigFloat = Float;
pub type BigComplex = Complex;

/// Largest `|u|` accepted after the Pfaff transformation.
pub const HYP_DOMAIN_LIMIT: f64 = 0.98;

/// Parameters `(a, b; c)` of `₂F₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypParams {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl HypParams {
    pub fn new(a: Rat, b: Rat, c: Rat) -> Result<Self> {
        if c <= 0 && c.is_integer() {
            return Err(GfnError::Domain(format!(
                "c = {c} is a non-positive integer"
            )));
        }
        Ok(HypParams { a, b, c })
    }

    pub fn from_ints(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> Self {
        let r = |(p, q): (i64, i64)| Rat::from((p, q));
        HypParams::new(r(a), r(b), r(c)).expect("valid hypergeometric parameters")
    }

    /// Parameters of `d/du ₂F₁`, namely `(a+1, b+1; c+1)`.
    pub fn shifted(&self) -> HypParams {
        HypParams {
            a: Rat::from(&self.a + 1),
            b: Rat::from(&self.b + 1),
            c: Rat::from(&self.c + 1),
        }
    }
}

/// `₂F₁(a, b; c; u)` (order 0) or its `u`-derivative (order 1).
pub fn hyp2f1(p: &HypParams, u: &Float, order: u8, prec: Precision) -> Result<Float> {
    match order {
        0 => hyp2f1_value(p, u, prec),
        1 => {
            let k = Rat::from(&p.a * &p.b) / &p.c;
            Ok(hyp2f1_value(&p.shifted(), u, prec)? * k)
        }
        _ => Err(GfnError::usage(format!(
            "derivative order {order} not supported (0 or 1)"
        ))),
    }
}

fn hyp2f1_value(p: &HypParams, u: &Float, prec: Precision) -> Result<Float> {
    let bits = prec.bits();
    let u = Float::with_val(bits, u);
    if u < -0.5 {
        // Pfaff: F(a,b;c;u) = (1-u)^(-a) F(a, c-b; c; u/(u-1))
        let one_minus = Float::with_val(bits, 1 - &u);
        let w = Float::with_val(bits, &u / Float::with_val(bits, &u - 1));
        check_domain(&w, &u)?;
        let q = HypParams {
            a: p.a.clone(),
            b: Rat::from(&p.c - &p.b),
            c: p.c.clone(),
        };
        let pre = one_minus.pow(Float::with_val(bits, &Rat::from(-&p.a)));
        return Ok(pre * series(&q, &w, prec));
    }
    check_domain(&u, &u)?;
    Ok(series(p, &u, prec))
}

fn check_domain(w: &Float, u: &Float) -> Result<()> {
    if !w.is_finite() || w.clone().abs() > HYP_DOMAIN_LIMIT {
        return Err(GfnError::Domain(format!(
            "2F1 argument u = {} lies outside |u| <= {HYP_DOMAIN_LIMIT} after transformation",
            u.to_f64()
        )));
    }
    Ok(())
}

/// Plain Gauss series for `|u| < 1`, summed until the geometric tail bound
/// drops below the working precision.
fn series(p: &HypParams, u: &Float, prec: Precision) -> Float {
    let bits = prec.bits();
    let tol = prec.ten_pow_neg(prec.digits() as i32 + 4);
    let absu = u.to_f64().abs();
    let mut sum = Float::with_val(bits, 1);
    let mut term = Float::with_val(bits, 1);
    let mut k: u64 = 0;
    loop {
        let ratio =
            Rat::from(&p.a + k) * Rat::from(&p.b + k) / (Rat::from(&p.c + k) * Rat::from(k + 1));
        term *= &ratio;
        term *= u;
        sum += &term;
        k += 1;
        if term.is_zero() {
            break;
        }
        let rho = ratio.to_f64().abs() * absu;
        if rho < 1.0 && k > 2 {
            let next = (ratio_f64(p, k) * absu).max(rho);
            if next < 1.0 {
                let bound = Float::with_val(53, term.abs_ref()) * (next / (1.0 - next));
                if bound
                    < tol.clone() * Float::with_val(53, sum.abs_ref()).max(&Float::with_val(53, 1))
                {
                    break;
                }
            }
        }
    }
    sum
}

/// Upper bound for the term ratio at all indices ≥ k (the ratio is monotone for large k).
fn ratio_f64(p: &HypParams, k: u64) -> f64 {
    let (a, b, c) = (p.a.to_f64(), p.b.to_f64(), p.c.to_f64());
    let k = k as f64;
    let r = ((a + k) * (b + k) / ((c + k) * (k + 1.0))).abs();
    let excess = (a + b - c - 1.0).max(0.0);
    r.max(1.0 + excess / (k + 1.0))
}

fn check_tau(tau: &Complex) -> Result<()> {
    if !(tau.imag().is_finite() && *tau.imag() > 0) {
        return Err(GfnError::Domain(format!(
            "Im(tau) must be positive, got tau = {}",
            crate::numeric::format_complex(tau, 12)
        )));
    }
    Ok(())
}

/// `q = exp(2πiτ)`.
pub fn nome(tau: &Complex, prec: Precision) -> Complex {
    let bits = prec.bits();
    let two_pi_i = Complex::with_val(bits, (0, 2 * prec.pi()));
    Complex::with_val(bits, &two_pi_i * tau).exp()
}

/// Number of terms `N` with `|q|^N` below `10^(-digits-8)`.
fn cutoff(tau: &Complex, prec: Precision) -> u64 {
    let im = tau.imag().to_f64();
    let need = (f64::from(prec.digits()) + 8.0) * std::f64::consts::LN_10;
    (need / (2.0 * std::f64::consts::PI * im)).ceil() as u64 + 2
}

/// `η(τ) = q^(1/24) Π (1 − qⁿ)`.
pub fn dedekind_eta(tau: &Complex, prec: Precision) -> Result<Complex> {
    check_tau(tau)?;
    let bits = prec.bits();
    let q = nome(tau, prec);
    let pi = prec.pi();
    let pre = Complex::with_val(bits, (0, pi / 12)) * tau;
    let mut prod = Complex::with_val(bits, 1);
    let mut qn = q.clone();
    for _ in 0..cutoff(tau, prec) {
        prod *= Complex::with_val(bits, 1 - &qn);
        qn *= &q;
    }
    Ok(pre.exp() * prod)
}

fn divisor_sums(m: usize) -> Vec<u64> {
    let mut s = vec![0u64; m + 1];
    for d in 1..=m {
        for k in (d..=m).step_by(d) {
            s[k] += d as u64;
        }
    }
    s
}

/// `(d/dτ)^k log η(τ)` for `k ≥ 0`, with the branch `log η = 2πiτ/24 + Σ log(1 − qⁿ)`.
pub fn log_eta_derivative(tau: &Complex, k: u32, prec: Precision) -> Result<Complex> {
    check_tau(tau)?;
    let bits = prec.bits();
    let q = nome(tau, prec);
    let m_max = cutoff(tau, prec) as usize;
    if m_max > 10_000_000 {
        return Err(GfnError::Domain(
            "Im(tau) too small for the q-series".into(),
        ));
    }
    let sigma = divisor_sums(m_max);
    let two_pi_i = Complex::with_val(bits, (0, 2 * prec.pi()));
    let mut sum = Complex::with_val(bits, 0);
    let mut qm = q.clone();
    for m in 1..=m_max {
        let coef = if k == 0 {
            Float::with_val(bits, sigma[m]) / m as u64
        } else {
            Float::with_val(bits, sigma[m]) * Float::with_val(bits, m as u64).pow(k - 1)
        };
        sum += Complex::with_val(bits, &qm * &coef);
        qm *= &q;
    }
    let scale = Complex::with_val(bits, two_pi_i.clone().pow(k));
    let mut out = -(sum * scale);
    match k {
        0 => out += Complex::with_val(bits, &two_pi_i * tau) / 24u32,
        1 => out += two_pi_i / 24u32,
        _ => {}
    }
    Ok(out)
}

pub fn log_dedekind_eta(tau: &Complex, prec: Precision) -> Result<Complex> {
    log_eta_derivative(tau, 0, prec)
}

/// Theta constants `(θ₂, θ₃, θ₄)` with `θ₃(τ) = Σ exp(πiτn²)`.
pub fn theta_constants(tau: &Complex, prec: Precision) -> Result<[Complex; 3]> {
    Ok(theta_series(tau, prec)?.0)
}

/// Values and `τ`-derivatives of the three theta constants.
pub fn theta_with_derivatives(
    tau: &Complex,
    prec: Precision,
) -> Result<([Complex; 3], [Complex; 3])> {
    theta_series(tau, prec)
}

/// `(d/dτ) log θᵢ` for `i = 2, 3, 4`.
pub fn theta_log_derivatives(tau: &Complex, prec: Precision) -> Result<[Complex; 3]> {
    let (v, d) = theta_series(tau, prec)?;
    let bits = prec.bits();
    Ok([0, 1, 2].map(|i| Complex::with_val(bits, &d[i] / &v[i])))
}

/// Values and first two `τ`-derivatives of the three theta constants.
pub fn theta_jets(tau: &Complex, prec: Precision) -> Result<[[Complex; 3]; 3]> {
    check_tau(tau)?;
    let bits = prec.bits();
    let pi_i = Complex::with_val(bits, (0, prec.pi()));
    let n_max = {
        let im = tau.imag().to_f64();
        let need = (f64::from(prec.digits()) + 8.0) * std::f64::consts::LN_10;
        (need / (std::f64::consts::PI * im)).sqrt().ceil() as i64 + 2
    };
    // out[k][i]: k-th derivative of θ_{i+2}
    let mut out = [0, 1, 2].map(|_| [0, 1, 2].map(|_| Complex::with_val(bits, 0)));
    let mut add = |i: usize, x: &Float, sign: bool| {
        let e = Complex::with_val(bits, &pi_i * tau) * x;
        let mut term = e.exp();
        let step = Complex::with_val(bits, &pi_i * x);
        for slot in out.iter_mut() {
            if sign {
                slot[i] -= &term;
            } else {
                slot[i] += &term;
            }
            term *= &step;
        }
    };
    for n in -n_max..=n_max {
        let r2 = Float::with_val(bits, n) + 0.5f64;
        add(0, &Float::with_val(bits, r2.square_ref()), false);
        let x = Float::with_val(bits, n * n);
        add(1, &x, false);
        add(2, &x, n % 2 != 0);
    }
    Ok(out)
}

fn theta_series(tau: &Complex, prec: Precision) -> Result<([Complex; 3], [Complex; 3])> {
    let [v, d, _] = theta_jets(tau, prec)?;
    Ok((v, d))
}

/// Rounds to the nearest `f64` for diagnostics.
pub fn to_f64(x: &Float) -> f64 {
    x.to_f64_round(Round::Nearest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::parse_complex;

    fn prec() -> Precision {
        Precision::default()
    }

    fn close(a: &Complex, b: &Complex, tol: f64) -> bool {
        let d = Complex::with_val(a.prec().0, a - b);
        Float::with_val(64, d.abs_ref()) < tol
    }

    #[test]
    fn hyp_at_zero_and_log_closed_form() {
        let p = prec();
        let f = hyp2f1(
            &HypParams::from_ints((1, 3), (1, 3), (2, 3)),
            &p.zero(),
            0,
            p,
        )
        .unwrap();
        assert_eq!(f, 1);
        let half = p.rat(&Rat::from((1, 2)));
        let f = hyp2f1(&HypParams::from_ints((1, 1), (1, 1), (2, 1)), &half, 0, p).unwrap();
        let two = Float::with_val(p.bits(), 2);
        let expect = two.ln() * 2u32;
        assert!((f - expect).abs() < 1e-55);
    }

    #[test]
    fn pfaff_branch_matches_direct_series() {
        let p = prec();
        let params = HypParams::from_ints((2, 3), (2, 3), (4, 3));
        // u = -0.6 uses Pfaff; compare with the direct series, still convergent there
        let u = p.rat(&Rat::from((-3, 5)));
        let a = hyp2f1(&params, &u, 0, p).unwrap();
        let b = series(&params, &u, p);
        assert!((a - b).abs() < 1e-55);
    }

    #[test]
    fn domain_errors() {
        let p = prec();
        let params = HypParams::from_ints((1, 4), (1, 4), (1, 2));
        assert!(matches!(
            hyp2f1(&params, &p.rat(&Rat::from((99, 100))), 0, p),
            Err(GfnError::Domain(_))
        ));
        assert!(matches!(
            hyp2f1(&params, &p.rat(&Rat::from(-100)), 0, p),
            Err(GfnError::Domain(_))
        ));
        assert!(hyp2f1(&params, &p.zero(), 2, p).is_err());
        assert!(HypParams::new(Rat::from(1), Rat::from(1), Rat::from(-2)).is_err());
        let tau = parse_complex("1-0.5i", p).unwrap();
        assert!(matches!(dedekind_eta(&tau, p), Err(GfnError::Domain(_))));
    }

    #[test]
    fn eta_translation() {
        let p = prec();
        let tau = parse_complex("2i", p).unwrap();
        let tau1 = Complex::with_val(p.bits(), &tau + 1u32);
        let phase = Complex::with_val(p.bits(), (0, p.pi() / 12)).exp();
        let lhs = dedekind_eta(&tau1, p).unwrap();
        let rhs = phase * dedekind_eta(&tau, p).unwrap();
        assert!(close(&lhs, &rhs, 1e-50));
    }

    #[test]
    fn log_eta_matches_log_of_product() {
        let p = prec();
        let tau = parse_complex("0.3+1.2i", p).unwrap();
        let l = log_dedekind_eta(&tau, p).unwrap();
        let e = dedekind_eta(&tau, p).unwrap();
        assert!(close(&l.exp(), &e, 1e-50));
    }

    #[test]
    fn theta_cusp_and_shift() {
        let p = prec();
        let tau = parse_complex("40i", p).unwrap();
        let [_, t3, _] = theta_constants(&tau, p).unwrap();
        assert!(close(&t3, &Complex::with_val(p.bits(), 1), 1e-50));
        let tau = parse_complex("1.5i", p).unwrap();
        let tau1 = Complex::with_val(p.bits(), &tau + 1u32);
        let [_, t3, _] = theta_constants(&tau, p).unwrap();
        let [_, _, t4s] = theta_constants(&tau1, p).unwrap();
        assert!(close(&t4s, &t3, 1e-40));
    }
}
