//! Exact linear algebra over the rationals and the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{AlgebraError, Rational};

/// Solves `A x = b` exactly. `columns` holds the columns of `A`.
///
/// Returns `Ok(None)` when the system is inconsistent. When the columns are
/// linearly independent the solution, if any, is unique; otherwise one
/// solution with zeros on the free columns is returned.
pub fn solve_linear_system(
    columns: &[Vec<Rational>],
    rhs: &[Rational],
) -> Result<Option<Vec<Rational>>, AlgebraError> {
    let rows = rhs.len();
    for col in columns {
        if col.len() != rows {
            return Err(AlgebraError::DimensionMismatch(col.len(), rows));
        }
    }
    let cols = columns.len();
    // Augmented row-major matrix [A | b].
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for c2 in 0..=cols {
                    let delta = &f * &m[r][c2];
                    m[i][c2] -= delta;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    // A zero row with nonzero rhs is an inconsistency.
    for i in r..rows {
        if !m[i][cols].is_zero() {
            return Ok(None);
        }
    }
    let mut solution = vec![Rational::zero(); cols];
    for (k, &c) in pivot_cols.iter().enumerate() {
        solution[c] = m[k][cols].clone();
    }
    Ok(Some(solution))
}

/// Inverts a square rational matrix given by rows. Errors when singular.
pub fn invert_matrix(rows: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, AlgebraError> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(AlgebraError::DimensionMismatch(row.len(), n));
        }
    }
    // Gauss-Jordan on [A | I].
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                });
            }
            r
        })
        .collect();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Err(AlgebraError::SingularMatrix);
        };
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for c2 in 0..2 * n {
                    let delta = &f * &m[c][c2];
                    m[i][c2] -= delta;
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Determinant of a square integer matrix given by rows, by Bareiss
/// fraction-free elimination.
pub fn integer_determinant(rows: &[Vec<BigInt>]) -> Result<BigInt, AlgebraError> {
    let n = rows.len();
    for row in rows {
        if row.len() != n {
            return Err(AlgebraError::DimensionMismatch(row.len(), n));
        }
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                // Bareiss: the previous pivot divides exactly.
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(sign * m[n - 1][n - 1].clone())
}

/// Smith normal form `D = U * M * V` of an integer matrix.
///
/// `U` and `V` are unimodular, `D` is diagonal with `D[i][i]` dividing
/// `D[i+1][i+1]`, and all diagonal entries are non-negative.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

pub fn smith_normal_form(matrix: &[Vec<BigInt>]) -> Result<SmithDecomposition, AlgebraError> {
    let rows = matrix.len();
    let cols = if rows == 0 { 0 } else { matrix[0].len() };
    for row in matrix {
        if row.len() != cols {
            return Err(AlgebraError::DimensionMismatch(row.len(), cols));
        }
    }
    let mut d = matrix.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let rank_bound = rows.min(cols);
    for t in 0..rank_bound {
        loop {
            // Move a nonzero entry of minimal absolute value into position (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !d[i][j].is_zero()
                        && best
                            .map(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                // The remaining block is zero.
                break;
            };
            swap_rows(&mut d, &mut u, t, bi);
            swap_cols(&mut d, &mut v, t, bj);
            if d[t][t].is_negative() {
                negate_row(&mut d, &mut u, t);
            }

            let mut dirty = false;
            for i in t + 1..rows {
                if !d[i][t].is_zero() {
                    let q = div_floor_nearest(&d[i][t], &d[t][t]);
                    row_axpy(&mut d, &mut u, i, t, &q);
                    if !d[i][t].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !d[t][j].is_zero() {
                    let q = div_floor_nearest(&d[t][j], &d[t][t]);
                    col_axpy(&mut d, &mut v, j, t, &q);
                    if !d[t][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Pivot divides every entry of the trailing block, or we fold one
            // offending row in and restart the reduction for this pivot.
            let mut offender = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&d[i][j] % &d[t][t]).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    add_row(&mut d, &mut u, t, i);
                }
                None => break,
            }
        }
    }
    // Diagonal cleanup: sort zeros last is automatic; enforce divisibility.
    for t in 0..rank_bound {
        if d[t][t].is_negative() {
            negate_row(&mut d, &mut u, t);
        }
    }
    Ok(SmithDecomposition { u, d, v })
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn swap_rows(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        d.swap(a, b);
        u.swap(a, b);
    }
}

fn swap_cols(d: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for row in d.iter_mut() {
            row.swap(a, b);
        }
        for row in v.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn negate_row(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize) {
    for x in d[i].iter_mut() {
        *x = -x.clone();
    }
    for x in u[i].iter_mut() {
        *x = -x.clone();
    }
}

/// row i -= q * row t, tracked in U.
fn row_axpy(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, t: usize, q: &BigInt) {
    for j in 0..d[i].len() {
        let delta = q * &d[t][j];
        d[i][j] -= delta;
    }
    for j in 0..u[i].len() {
        let delta = q * &u[t][j];
        u[i][j] -= delta;
    }
}

/// col j -= q * col t, tracked in V (columns of V follow columns of D).
fn col_axpy(d: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    for row in d.iter_mut() {
        let delta = q * &row[t];
        row[j] -= delta;
    }
    for row in v.iter_mut() {
        let delta = q * &row[t];
        row[j] -= delta;
    }
}

/// row t += row i, tracked in U.
fn add_row(d: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], t: usize, i: usize) {
    for j in 0..d[t].len() {
        let delta = d[i][j].clone();
        d[t][j] += delta;
    }
    for j in 0..u[t].len() {
        let delta = u[i][j].clone();
        u[t][j] += delta;
    }
}

/// Quotient chosen so the remainder has minimal absolute value.
fn div_floor_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    // Round toward the nearest multiple so remainders shrink fast.
    if (&r * 2u8).abs() > b.abs() {
        if (r.sign() == b.sign()) || r.is_zero() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// A congruence class `value mod modulus` with `modulus > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub value: BigInt,
    pub modulus: BigInt,
}

impl Congruence {
    pub fn new(value: BigInt, modulus: BigInt) -> Self {
        let value = value.mod_floor(&modulus);
        Congruence { value, modulus }
    }
}

/// Intersects two congruence classes. `None` when they are incompatible.
pub fn merge_congruences(a: &Congruence, b: &Congruence) -> Option<Congruence> {
    let g = a.modulus.gcd(&b.modulus);
    let diff = &b.value - &a.value;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let lcm = (&a.modulus / &g) * &b.modulus;
    // value = a.value + a.modulus * t where t solves
    // (a.modulus / g) t = diff / g (mod b.modulus / g).
    let m = &a.modulus / &g;
    let n = &b.modulus / &g;
    let rhs = (&diff / &g).mod_floor(&n);
    let t = (modular_inverse(&m.mod_floor(&n), &n)? * rhs).mod_floor(&n);
    let value = (&a.value + &a.modulus * t).mod_floor(&lcm);
    Some(Congruence {
        value,
        modulus: lcm,
    })
}

/// Inverse of `a` modulo `n` when `gcd(a, n) = 1`. `n = 1` returns zero.
pub(crate) fn modular_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    if n.is_one() {
        return Some(BigInt::zero());
    }
    let ext = a.extended_gcd(n);
    if !ext.gcd.is_one() {
        return None;
    }
    Some(ext.x.mod_floor(n))
}
