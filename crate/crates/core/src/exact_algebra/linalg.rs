//! Dense exact linear algebra over ℚ.

use super::Rat;
use crate::error::{GfnError, Result};

pub type Matrix = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| Rat::from(u8::from(i == j))).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Rat::new();
                    for k in 0..inner {
                        acc += Rat::from(&row[k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn check_square(a: &Matrix) -> Result<usize> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(GfnError::usage("matrix is not square"));
    }
    Ok(n)
}

/// Row-reduces `[a | b]` and returns the rank of `a` together with the reduced augmented rows.
fn eliminate(a: &Matrix, b: &Matrix) -> (usize, Vec<usize>, Matrix) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb).cloned().collect())
        .collect();
    let width = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::from(m[r][col].recip_ref());
        for j in col..width {
            m[r][j] *= &inv;
        }
        for i in 0..rows {
            if i != r && m[i][col] != 0 {
                let f = m[i][col].clone();
                for j in col..width {
                    let t = Rat::from(&f * &m[r][j]);
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    (r, pivots, m)
}

/// Solves `a·x = b` for a unique `x`. Accepts overdetermined consistent systems.
pub fn solve(a: &Matrix, b: &[Rat]) -> Result<Vec<Rat>> {
    if a.len() != b.len() {
        return Err(GfnError::usage(
            "right-hand side length does not match matrix rows",
        ));
    }
    let cols = a.first().map_or(0, Vec::len);
    let rhs: Matrix = b.iter().map(|x| vec![x.clone()]).collect();
    let (rank, pivots, m) = eliminate(a, &rhs);
    if rank < cols {
        return Err(GfnError::DegenerateRing(format!(
            "linear system has rank {rank} < {cols}"
        )));
    }
    if m[rank..].iter().any(|row| row[cols] != 0) {
        return Err(GfnError::DegenerateRing(
            "linear system is inconsistent".into(),
        ));
    }
    let mut x = vec![Rat::new(); cols];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = m[row][cols].clone();
    }
    Ok(x)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = check_square(a)?;
    let (rank, _, m) = eliminate(a, &identity(n));
    if rank < n {
        return Err(GfnError::DegenerateRing("matrix is singular".into()));
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn determinant(a: &Matrix) -> Result<Rat> {
    let n = check_square(a)?;
    let mut m = a.clone();
    let mut det = Rat::from(1);
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| m[i][col] != 0) else {
            return Ok(Rat::new());
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        let inv = Rat::from(m[col][col].recip_ref());
        for i in col + 1..n {
            if m[i][col] != 0 {
                let f = Rat::from(&m[i][col] * &inv);
                for j in col..n {
                    let t = Rat::from(&f * &m[col][j]);
                    m[i][j] -= t;
                }
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::rat;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| Rat::from(x)).collect())
            .collect()
    }

    #[test]
    fn determinant_with_pivoting() {
        let a = m(&[&[0, 2, 1], &[1, 0, 0], &[3, 1, 4]]);
        // expand along the second row: −1·(2·4 − 1·1)
        assert_eq!(determinant(&a).unwrap(), -7);
        assert_eq!(determinant(&identity(5)).unwrap(), 1);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn solve_overdetermined() {
        let a = m(&[&[1, 0], &[0, 2], &[1, 1]]);
        let x = solve(&a, &[rat(1, 1), rat(1, 1), rat(3, 2)]).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(1, 2)]);
        assert!(solve(&a, &[rat(1, 1), rat(1, 1), rat(0, 1)]).is_err());
    }
}
