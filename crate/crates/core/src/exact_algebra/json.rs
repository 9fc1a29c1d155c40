//! JSON term-list serialisation of jet polynomials.

use serde::{Deserialize, Serialize};

use super::{Jet, Monomial, MultiPoly, Rat};
use crate::error::{GfnError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub num: String,
    pub den: String,
    #[serde(default = "zero_str")]
    pub slope_num: String,
    #[serde(default = "one_str")]
    pub slope_den: String,
}

fn zero_str() -> String {
    "0".into()
}

fn one_str() -> String {
    "1".into()
}

pub fn parse_ratio(num: &str, den: &str) -> Result<Rat> {
    let n: rug::Integer = num
        .trim()
        .parse()
        .map_err(|e| GfnError::Parse(format!("bad integer {num:?}: {e}")))?;
    let d: rug::Integer = den
        .trim()
        .parse()
        .map_err(|e| GfnError::Parse(format!("bad integer {den:?}: {e}")))?;
    if d == 0 {
        return Err(GfnError::Parse("zero denominator".into()));
    }
    Ok(Rat::from((n, d)))
}

pub fn to_terms(p: &MultiPoly<Jet>) -> Vec<TermJson> {
    p.terms()
        .map(|(m, c)| TermJson {
            exps: m.exps().to_vec(),
            num: c.value.numer().to_string(),
            den: c.value.denom().to_string(),
            slope_num: c.slope.numer().to_string(),
            slope_den: c.slope.denom().to_string(),
        })
        .collect()
}

/// Rebuilds a polynomial; an empty list needs the arity from the caller.
pub fn from_terms(terms: &[TermJson], arity: Option<usize>) -> Result<MultiPoly<Jet>> {
    let arity = match (terms.first(), arity) {
        (Some(t), _) => t.exps.len(),
        (None, Some(a)) => a,
        (None, None) => return Err(GfnError::Parse("empty term list with unknown arity".into())),
    };
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        if t.exps.len() != arity {
            return Err(GfnError::Parse(format!(
                "term {:?} has wrong arity (expected {arity})",
                t.exps
            )));
        }
        let c = Jet::new(
            parse_ratio(&t.num, &t.den)?,
            parse_ratio(&t.slope_num, &t.slope_den)?,
        );
        out.push((Monomial::new(t.exps.clone()), c));
    }
    MultiPoly::from_terms(arity, out)
}

pub fn to_json(p: &MultiPoly<Jet>) -> Result<String> {
    Ok(serde_json::to_string(&to_terms(p))?)
}

pub fn from_json(s: &str, arity: Option<usize>) -> Result<MultiPoly<Jet>> {
    let terms: Vec<TermJson> = serde_json::from_str(s)?;
    from_terms(&terms, arity)
}
