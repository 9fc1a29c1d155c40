//! The Ẽ6/Ẽ7/Ẽ8 singularity models and their Jacobi rings.
//!
//! Deformation coordinates are labelled `s_1 … s_n` with `s_n` the marginal one.
//! The ring basis is `φ_a = ∂W/∂s_a`, so `φ_1 = 1` and `φ_n` is the Hessian-class
//! monomial. All public indices into tables are 1-based to match these labels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GfnError, Result};
use crate::exact_algebra::linalg::{self, Matrix};
use crate::exact_algebra::{rat, GroebnerBasis, Jet, Monomial, MonomialOrder, MultiPoly, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelName {
    E6t,
    E7t,
    E8t,
}

impl ModelName {
    pub const ALL: [ModelName; 3] = [ModelName::E6t, ModelName::E7t, ModelName::E8t];

    pub fn dimension(self) -> usize {
        match self {
            ModelName::E6t => 8,
            ModelName::E7t => 9,
            ModelName::E8t => 10,
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelName::E6t => "E6t",
            ModelName::E7t => "E7t",
            ModelName::E8t => "E8t",
        })
    }
}

impl FromStr for ModelName {
    type Err = GfnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "e6t" | "e6" | "p8" => Ok(ModelName::E6t),
            "e7t" | "e7" | "x9" => Ok(ModelName::E7t),
            "e8t" | "e8" | "j10" => Ok(ModelName::E8t),
            other => Err(GfnError::usage(format!(
                "unknown model {other:?} (expected e6t, e7t or e8t)"
            ))),
        }
    }
}

/// Static data of one simple elliptic singularity.
#[derive(Clone, Debug)]
pub struct SingularityModel {
    pub name: ModelName,
    pub variables: Vec<&'static str>,
    /// Weights of the ring variables.
    pub variable_weights: Vec<Rat>,
    /// Undeformed quasi-homogeneous part of `W`.
    pub leading_part: MultiPoly<Rat>,
    /// `φ_a = ∂W/∂s_a`, `a = 1 … n`.
    pub basis: Vec<Monomial>,
    /// Scaling dimensions `d_a` of `s_a`.
    pub weights: Vec<Rat>,
    /// `μ_a = 1/2 − d_a`.
    pub spectrum: Vec<Rat>,
    /// Coefficients of the discriminant in the marginal `s`, lowest degree first.
    pub discriminant: Vec<Rat>,
    pub n: usize,
}

fn mono(e: &[u32]) -> Monomial {
    Monomial::new(e.to_vec())
}

type ModelData = (
    Vec<&'static str>,
    Vec<Rat>,
    Vec<Monomial>,
    Vec<Monomial>,
    Vec<Rat>,
    Vec<Rat>,
);

pub fn build_model(name: ModelName) -> SingularityModel {
    let (variables, vw, leading, basis, weights, disc): ModelData = match name {
        ModelName::E6t => (
            vec!["x", "y", "z"],
            vec![rat(1, 3); 3],
            vec![mono(&[3, 0, 0]), mono(&[0, 3, 0]), mono(&[0, 0, 3])],
            [
                [0, 0, 0],
                [0, 0, 1],
                [0, 1, 0],
                [1, 0, 0],
                [0, 1, 1],
                [1, 0, 1],
                [1, 1, 0],
                [1, 1, 1],
            ]
            .iter()
            .map(|e| mono(e))
            .collect(),
            [
                (1, 1),
                (2, 3),
                (2, 3),
                (2, 3),
                (1, 3),
                (1, 3),
                (1, 3),
                (0, 1),
            ]
            .iter()
            .map(|&(p, q)| rat(p, q))
            .collect(),
            vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 27)],
        ),
        ModelName::E7t => (
            vec!["x", "y"],
            vec![rat(1, 4); 2],
            vec![mono(&[4, 0]), mono(&[0, 4])],
            [
                [0, 0],
                [0, 1],
                [1, 0],
                [0, 2],
                [1, 1],
                [2, 0],
                [1, 2],
                [2, 1],
                [2, 2],
            ]
            .iter()
            .map(|e| mono(e))
            .collect(),
            [
                (1, 1),
                (3, 4),
                (3, 4),
                (1, 2),
                (1, 2),
                (1, 2),
                (1, 4),
                (1, 4),
                (0, 1),
            ]
            .iter()
            .map(|&(p, q)| rat(p, q))
            .collect(),
            vec![rat(1, 1), rat(0, 1), rat(-1, 4)],
        ),
        ModelName::E8t => (
            vec!["x", "y"],
            vec![rat(1, 6), rat(1, 3)],
            vec![mono(&[6, 0]), mono(&[0, 3])],
            [
                [0, 0],
                [1, 0],
                [0, 1],
                [2, 0],
                [1, 1],
                [3, 0],
                [2, 1],
                [4, 0],
                [3, 1],
                [4, 1],
            ]
            .iter()
            .map(|e| mono(e))
            .collect(),
            [
                (1, 1),
                (5, 6),
                (2, 3),
                (2, 3),
                (1, 2),
                (1, 2),
                (1, 3),
                (1, 3),
                (1, 6),
                (0, 1),
            ]
            .iter()
            .map(|&(p, q)| rat(p, q))
            .collect(),
            vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(4, 27)],
        ),
    };
    let arity = variables.len();
    let leading_part = MultiPoly::from_terms(arity, leading.into_iter().map(|m| (m, Rat::from(1))))
        .expect("consistent arity");
    let spectrum = weights.iter().map(|d| rat(1, 2) - d.clone()).collect();
    let n = basis.len();
    let model = SingularityModel {
        name,
        variables,
        variable_weights: vw,
        leading_part,
        basis,
        weights,
        spectrum,
        discriminant: disc,
        n,
    };
    model
        .check_invariants()
        .expect("built-in model data is consistent");
    model
}

impl SingularityModel {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(build_model(name.parse()?))
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    /// Index (1-based) of the marginal deformation.
    pub fn marginal_index(&self) -> usize {
        self.n
    }

    /// Partner index `μ★ = n + 1 − μ`.
    pub fn partner(&self, mu: usize) -> usize {
        self.n + 1 - mu
    }

    pub fn weight(&self, a: usize) -> &Rat {
        &self.weights[a - 1]
    }

    /// Value of the discriminant at the marginal `s`.
    pub fn discriminant_at(&self, s: &Rat) -> Rat {
        let mut acc = Rat::new();
        for c in self.discriminant.iter().rev() {
            acc *= s;
            acc += c;
        }
        acc
    }

    /// `u(s) = 1 − discriminant(s)`, the hypergeometric argument.
    pub fn u_of_s(&self, s: &Rat) -> Rat {
        Rat::from(1) - self.discriminant_at(s)
    }

    /// Checks the weight, pairing, homogeneity and basis invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: &str| Err(GfnError::usage(format!("{}: {m}", self.name)));
        if self.n != self.name.dimension()
            || self.weights.len() != self.n
            || self.spectrum.len() != self.n
        {
            return bad("dimension mismatch");
        }
        if self.weights[0] != 1 || self.weights[self.n - 1] != 0 {
            return bad("d_1 must be 1 and the marginal weight 0");
        }
        for mu in 1..=self.n {
            if Rat::from(self.weight(mu) + self.weight(self.partner(mu))) != 1 {
                return bad("pairing d^μ + d^μ★ = 1 fails");
            }
        }
        for (m, _) in self.leading_part.terms() {
            if m.weighted_degree(&self.variable_weights) != 1 {
                return bad("leading part is not of weight 1");
            }
        }
        for (a, phi) in self.basis.iter().enumerate() {
            let total = phi.weighted_degree(&self.variable_weights) + &self.weights[a];
            if total != 1 {
                return bad("s_a·φ_a is not of weight 1");
            }
        }
        if !self.basis[0].is_one() {
            return bad("φ_1 must be 1");
        }
        Ok(())
    }

    /// `W(z; s)` at the given point; the jet direction gets coefficient `s_a + ε`.
    pub fn superpotential(&self, point: &SAssignment) -> Result<MultiPoly<Jet>> {
        point.check(self)?;
        let mut w = self.leading_part.to_jet();
        for (a, phi) in self.basis.iter().enumerate() {
            let mut c = Jet::constant(point.values[a].clone());
            if point.jet == Some(a + 1) {
                c.slope = Rat::from(1);
            }
            w.add_term(phi.clone(), &c);
        }
        Ok(w)
    }

    /// The Jacobian ideal generators `∂W/∂z_i`.
    pub fn jacobian_generators(&self, point: &SAssignment) -> Result<Vec<MultiPoly<Jet>>> {
        let w = self.superpotential(point)?;
        Ok((0..self.arity()).map(|i| w.derivative(i)).collect())
    }

    pub fn basis_poly(&self, a: usize) -> MultiPoly<Jet> {
        MultiPoly::term(self.basis[a - 1].clone(), Jet::one())
    }

    pub fn basis_labels(&self) -> Vec<String> {
        self.basis
            .iter()
            .map(|m| m.display_with(&self.variables))
            .collect()
    }
}

/// Values of `s_1 … s_n`, with at most one non-marginal jet direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SAssignment {
    #[serde(with = "rat_vec")]
    pub values: Vec<Rat>,
    /// 1-based index `a` of the deformation carrying `ε`.
    pub jet: Option<usize>,
}

impl SAssignment {
    /// The point `0★`: all deformations zero except the marginal one.
    pub fn marginal(model: &SingularityModel, s: Rat) -> Self {
        let mut values = vec![Rat::new(); model.n];
        values[model.n - 1] = s;
        SAssignment { values, jet: None }
    }

    pub fn with_jet(mut self, a: usize) -> Self {
        self.jet = Some(a);
        self
    }

    pub fn with_value(mut self, a: usize, v: Rat) -> Self {
        self.values[a - 1] = v;
        self
    }

    pub fn marginal_value(&self) -> &Rat {
        self.values.last().expect("nonempty assignment")
    }

    fn check(&self, model: &SingularityModel) -> Result<()> {
        if self.values.len() != model.n {
            return Err(GfnError::usage(format!(
                "{} needs {} deformation values, got {}",
                model.name,
                model.n,
                self.values.len()
            )));
        }
        if let Some(a) = self.jet {
            if a == 0 || a >= model.n {
                return Err(GfnError::usage(format!(
                    "jet direction s{a} must be a non-marginal deformation s1..s{}",
                    model.n - 1
                )));
            }
        }
        Ok(())
    }
}

/// Structure constants `c_ab^c` of the Jacobi ring in the φ-basis.
#[derive(Clone, Debug)]
pub struct RingTable {
    pub model: ModelName,
    pub basis: Vec<Monomial>,
    /// `c[a][b][c]`, 0-based.
    pub c: Vec<Vec<Vec<Jet>>>,
    pub point: SAssignment,
}

impl RingTable {
    pub fn n(&self) -> usize {
        self.basis.len()
    }

    /// `c_ab^c` with 1-based labels.
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Jet {
        &self.c[a - 1][b - 1][c - 1]
    }

    /// Matrix of multiplication by `φ_a`: entry `[c][b] = c_ab^c` (0-based).
    pub fn mult_matrix(&self, a: usize) -> Vec<Vec<Jet>> {
        let n = self.n();
        (0..n)
            .map(|c| (0..n).map(|b| self.c[a - 1][b][c].clone()).collect())
            .collect()
    }

    /// `tr(φ_a ·) = Σ_c c_ac^c`.
    pub fn trace(&self, a: usize) -> Jet {
        let mut acc = Jet::zero();
        for c in 0..self.n() {
            acc += &self.c[a - 1][c][c];
        }
        acc
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.n();
        (0..n).all(|a| (0..n).all(|b| self.c[a][b] == self.c[b][a]))
    }

    pub fn has_unit(&self) -> bool {
        let n = self.n();
        (0..n).all(|b| (0..n).all(|c| self.c[0][b][c] == Jet::from(i64::from(b == c))))
    }

    /// Number of `(a, b, c, d)` with `((φaφb)φc)^d ≠ (φa(φbφc))^d`.
    pub fn associativity_defects(&self) -> usize {
        let n = self.n();
        let mut bad = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut left = Jet::zero();
                        let mut right = Jet::zero();
                        for e in 0..n {
                            left += &(&self.c[a][b][e] * &self.c[e][c][d]);
                            right += &(&self.c[b][c][e] * &self.c[a][e][d]);
                        }
                        if left != right {
                            bad += 1;
                        }
                    }
                }
            }
        }
        bad
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.n();
        let grid = |f: &dyn Fn(&Jet) -> &Rat| -> Vec<Vec<Vec<String>>> {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| (0..n).map(|c| f(&self.c[a][b][c]).to_string()).collect())
                        .collect()
                })
                .collect()
        };
        let mut out = serde_json::json!({
            "model": self.model.to_string(),
            "basis": self.basis.iter().map(|m| m.exps().to_vec()).collect::<Vec<_>>(),
            "point": self.point.values.iter().map(Rat::to_string).collect::<Vec<_>>(),
            "jet": self.point.jet.map(|a| format!("s{a}")),
            "c": grid(&|j| &j.value),
        });
        if self.point.jet.is_some() {
            out["c_slope"] = serde_json::json!(grid(&|j| &j.slope));
        }
        out
    }
}

fn degenerate(model: &SingularityModel, point: &SAssignment) -> Result<()> {
    let s = point.marginal_value();
    if model.discriminant_at(s) == 0 {
        return Err(GfnError::DegenerateRing(format!(
            "{}: discriminant vanishes at s = {s}; the ring multiplication breaks down",
            model.name
        )));
    }
    Ok(())
}

/// Dimension over ℚ of the Jacobi ring at `point` (doubled when a jet direction is
/// present), or `None` if it is infinite. No discriminant check is made.
pub fn quotient_dimension(model: &SingularityModel, point: &SAssignment) -> Result<Option<usize>> {
    let gb = GroebnerBasis::new(&model.jacobian_generators(point)?, &MonomialOrder::GrevLex)?;
    Ok(gb.quotient_dimension())
}

struct Reducer {
    gb: GroebnerBasis,
    staircase: Vec<Monomial>,
    /// Inverse of the matrix whose columns are the φ-basis (and εφ-basis) in staircase coordinates.
    to_phi: Matrix,
    n: usize,
}

impl Reducer {
    fn new(model: &SingularityModel, point: &SAssignment) -> Result<Self> {
        degenerate(model, point)?;
        let gb = GroebnerBasis::new(&model.jacobian_generators(point)?, &MonomialOrder::GrevLex)?;
        let n = model.n;
        let expected = if gb.is_jet() { 2 * n } else { n };
        let staircase = gb.standard_monomials().ok_or_else(|| {
            GfnError::DegenerateRing(format!(
                "{}: Jacobi ring is infinite-dimensional",
                model.name
            ))
        })?;
        if staircase.len() != expected {
            return Err(GfnError::DegenerateRing(format!(
                "{}: quotient has dimension {}, expected {expected}",
                model.name,
                staircase.len()
            )));
        }
        let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(expected);
        let eps = MultiPoly::constant(model.arity(), Jet::epsilon());
        for a in 1..=n {
            let phi = model.basis_poly(a);
            columns.push(coords(&gb, &staircase, &gb.lift(&phi)));
            if gb.is_jet() {
                columns.push(coords(&gb, &staircase, &gb.lift(&(&phi * &eps))));
            }
        }
        let m: Matrix = (0..expected)
            .map(|r| columns.iter().map(|col| col[r].clone()).collect())
            .collect();
        let to_phi = linalg::inverse(&m).map_err(|_| {
            GfnError::DegenerateRing(format!(
                "{}: deformation monomials do not span the Jacobi ring",
                model.name
            ))
        })?;
        Ok(Reducer {
            gb,
            staircase,
            to_phi,
            n,
        })
    }

    /// Coordinates of `p` in the φ-basis, as jets.
    fn phi_coords(&self, p: &MultiPoly<Jet>) -> Vec<Jet> {
        let v = coords(&self.gb, &self.staircase, &self.gb.lift(p));
        let x: Vec<Rat> = self
            .to_phi
            .iter()
            .map(|row| {
                let mut acc = Rat::new();
                for (r, y) in row.iter().zip(&v) {
                    acc += Rat::from(r * y);
                }
                acc
            })
            .collect();
        if self.gb.is_jet() {
            (0..self.n)
                .map(|a| Jet::new(x[2 * a].clone(), x[2 * a + 1].clone()))
                .collect()
        } else {
            x.into_iter().map(Jet::constant).collect()
        }
    }
}

fn coords(gb: &GroebnerBasis, staircase: &[Monomial], p: &MultiPoly<Rat>) -> Vec<Rat> {
    let nf = gb.normal_form_lifted(p);
    staircase.iter().map(|m| nf.coeff(m)).collect()
}

/// Multiplication table of the Jacobi ring at `point`.
pub fn multiplication_table(model: &SingularityModel, point: &SAssignment) -> Result<RingTable> {
    let red = Reducer::new(model, point)?;
    let n = model.n;
    let mut c = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in a..n {
            let prod = &model.basis_poly(a + 1) * &model.basis_poly(b + 1);
            let row = red.phi_coords(&prod);
            c[b][a] = row.clone();
            c[a][b] = row;
        }
    }
    let table = RingTable {
        model: model.name,
        basis: model.basis.clone(),
        c,
        point: point.clone(),
    };
    debug_assert!(table.has_unit());
    Ok(table)
}

/// Coordinates of an arbitrary polynomial in the φ-basis at `point`.
pub fn reduce_to_basis(
    model: &SingularityModel,
    point: &SAssignment,
    p: &MultiPoly<Jet>,
) -> Result<Vec<Jet>> {
    Ok(Reducer::new(model, point)?.phi_coords(p))
}

/// Determinant of the Hessian `det(∂²W/∂z_i∂z_j)` as a polynomial.
pub fn hessian(model: &SingularityModel, point: &SAssignment) -> Result<MultiPoly<Jet>> {
    let w = model.superpotential(point)?;
    let k = model.arity();
    let h: Vec<Vec<MultiPoly<Jet>>> = (0..k)
        .map(|i| (0..k).map(|j| w.derivative(i).derivative(j)).collect())
        .collect();
    Ok(poly_det(&h))
}

fn poly_det(m: &[Vec<MultiPoly<Jet>>]) -> MultiPoly<Jet> {
    let k = m.len();
    if k == 1 {
        return m[0][0].clone();
    }
    let arity = m[0][0].arity();
    let mut acc = MultiPoly::zero(arity);
    for col in 0..k {
        let minor: Vec<Vec<MultiPoly<Jet>>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][col] * &poly_det(&minor);
        acc = if col % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// Determinant of multiplication by the class of `element` on the Jacobi ring.
pub fn mult_det(
    model: &SingularityModel,
    point: &SAssignment,
    element: &MultiPoly<Jet>,
) -> Result<Rat> {
    if point.jet.is_some() {
        return Err(GfnError::usage(
            "multiplication determinants are computed without a jet direction",
        ));
    }
    let red = Reducer::new(model, point)?;
    let n = model.n;
    let mut m: Matrix = vec![vec![Rat::new(); n]; n];
    for b in 0..n {
        let col = red.phi_coords(&(element * &model.basis_poly(b + 1)));
        for (cidx, v) in col.into_iter().enumerate() {
            m[cidx][b] = v.value;
        }
    }
    linalg::determinant(&m)
}

/// Determinant of multiplication by the Hessian class.
pub fn hessian_mult_det(model: &SingularityModel, point: &SAssignment) -> Result<Rat> {
    let h = hessian(model, point)?;
    mult_det(model, point, &h)
}

mod rat_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exact_algebra::Rat;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(Rat::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|s| crate::numeric::parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
