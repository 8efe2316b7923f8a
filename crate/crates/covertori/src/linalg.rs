//! Exact integer lattice routines backing the finite abelian group layer.
//!
//! A subgroup of ∏ Z/d_i is the image of an integer lattice L with
//! D·Z^r ⊆ L ⊆ Z^r, where D = diag(d_1, …, d_r). Such a lattice has a
//! unique basis in row Hermite normal form: upper triangular, positive
//! pivots on the diagonal, and every entry above a pivot reduced modulo
//! that pivot. That basis is the canonical form used for equality,
//! hashing, and enumeration order.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Row Hermite normal form of the lattice spanned by `rows` together with
/// the rows of diag(moduli). Always returns a full-rank upper-triangular
/// r×r basis (r = moduli.len()).
pub fn hnf_with_moduli(rows: &[Vec<i128>], moduli: &[u64]) -> Vec<Vec<u64>> {
    let r = moduli.len();
    let mut work: Vec<Vec<i128>> = Vec::with_capacity(rows.len() + r);
    for row in rows {
        assert_eq!(row.len(), r, "generator length must match rank");
        work.push(row.clone());
    }
    for (i, &d) in moduli.iter().enumerate() {
        let mut row = vec![0i128; r];
        row[i] = d as i128;
        work.push(row);
    }

    let mut basis: Vec<Vec<i128>> = Vec::with_capacity(r);
    for col in 0..r {
        // Euclidean elimination in this column over the remaining rows.
        loop {
            let mut pivot: Option<usize> = None;
            for (i, row) in work.iter().enumerate() {
                if row[col] != 0 {
                    match pivot {
                        Some(p) if work[p][col].abs() <= row[col].abs() => {}
                        _ => pivot = Some(i),
                    }
                }
            }
            let p = pivot.expect("moduli rows keep every column full rank");
            let mut done = true;
            for i in 0..work.len() {
                if i != p && work[i][col] != 0 {
                    let q = work[i][col].div_euclid(work[p][col]);
                    for k in col..r {
                        let sub = q
                            .checked_mul(work[p][k])
                            .expect("lattice entry overflow");
                        work[i][k] = work[i][k].checked_sub(sub).expect("lattice entry overflow");
                    }
                    if work[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                let mut row = work.swap_remove(p);
                if row[col] < 0 {
                    for v in row.iter_mut() {
                        *v = -*v;
                    }
                }
                basis.push(row);
                break;
            }
        }
        // Rows now supported strictly to the right of `col`.
        work.retain(|row| row.iter().any(|&v| v != 0));
    }

    // Reduce entries above each pivot, left to right so earlier columns
    // stay reduced.
    for i in 0..r {
        for j in i + 1..r {
            let pivot = basis[j][j];
            let q = basis[i][j].div_euclid(pivot);
            if q != 0 {
                for k in j..r {
                    basis[i][k] -= q * basis[j][k];
                }
            }
        }
    }

    basis
        .iter()
        .map(|row| row.iter().map(|&v| u64::try_from(v).expect("reduced HNF entry")).collect())
        .collect()
}

/// Whether `x` (an integer vector) lies in the lattice with upper-triangular
/// basis `basis`.
pub fn lattice_contains(basis: &[Vec<u64>], x: &[i128]) -> bool {
    let r = basis.len();
    let mut rem: Vec<i128> = x.to_vec();
    for i in 0..r {
        let pivot = basis[i][i] as i128;
        if rem[i] % pivot != 0 {
            return false;
        }
        let q = rem[i] / pivot;
        if q != 0 {
            for k in i..r {
                rem[k] -= q * basis[i][k] as i128;
            }
        }
    }
    rem.iter().all(|&v| v == 0)
}

/// Solve z·B = target over the integers for an upper-triangular basis B.
/// Exact BigInt arithmetic; returns None when the target is not in the
/// lattice.
fn solve_row(basis: &[Vec<u64>], target: &[BigInt]) -> Option<Vec<BigInt>> {
    let r = basis.len();
    let mut rem: Vec<BigInt> = target.to_vec();
    let mut coeffs = vec![BigInt::zero(); r];
    for i in 0..r {
        let pivot = BigInt::from(basis[i][i]);
        let (q, m) = (rem[i].clone() / &pivot, rem[i].clone() % &pivot);
        if !m.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for k in i..r {
                rem[k] -= &q * BigInt::from(basis[i][k]);
            }
        }
        coeffs[i] = q;
    }
    rem.iter().all(Zero::is_zero).then_some(coeffs)
}

/// Coefficient matrix C with C·B = diag(moduli): row i expresses d_i·e_i in
/// the basis B. Integral whenever the lattice of B contains D·Z^r.
pub fn moduli_coefficients(basis: &[Vec<u64>], moduli: &[u64]) -> Vec<Vec<BigInt>> {
    let r = moduli.len();
    (0..r)
        .map(|i| {
            let mut target = vec![BigInt::zero(); r];
            target[i] = BigInt::from(moduli[i]);
            solve_row(basis, &target).expect("diag(moduli) lies in every ambient lattice")
        })
        .collect()
}

/// Smith normal form over BigInt. Returns the diagonal (nonnegative,
/// each dividing the next) and the matrix V⁻¹ for the column transform,
/// so that row k of V⁻¹ pulls the k-th cyclic generator back to the
/// original coordinates.
pub fn smith_normal_form(mat: &[Vec<BigInt>]) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let nrows = mat.len();
    let ncols = if nrows == 0 { 0 } else { mat[0].len() };
    let mut a: Vec<Vec<BigInt>> = mat.to_vec();
    let mut vinv: Vec<Vec<BigInt>> = (0..ncols)
        .map(|i| (0..ncols).map(|j| BigInt::from((i == j) as u64)).collect())
        .collect();

    // Column op on `a` mirrors a row op on vinv (the inverse transform).
    let mut t = 0usize;
    while t < nrows.min(ncols) {
        // Find a nonzero pivot of minimal absolute value in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !a[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            vinv.swap(t, pj);
        }

        let mut clean = true;
        for i in t + 1..nrows {
            if !a[i][t].is_zero() {
                let q = div_round(&a[i][t], &a[t][t]);
                for j in t..ncols {
                    let sub = &q * &a[t][j];
                    a[i][j] -= sub;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
        }
        for j in t + 1..ncols {
            if !a[t][j].is_zero() {
                let q = div_round(&a[t][j], &a[t][t]);
                for row in a.iter_mut().take(nrows).skip(t) {
                    let sub = &q * &row[t];
                    row[j] -= sub;
                }
                // column_j -= q * column_t  on a  ⟹  row_t += q * row_j on vinv
                let (head, tail) = vinv.split_at_mut(j);
                for k in 0..ncols {
                    let add = &q * &tail[0][k];
                    head[t][k] += add;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
        }
        if !clean {
            continue;
        }

        // Pivot must divide every remaining entry.
        let mut fixed = false;
        'scan: for i in t + 1..nrows {
            for j in t + 1..ncols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    for jj in t..ncols {
                        let add = a[i][jj].clone();
                        a[t][jj] += add;
                    }
                    fixed = true;
                    break 'scan;
                }
            }
        }
        if fixed {
            continue;
        }
        if a[t][t].is_negative() {
            a[t][t] = -a[t][t].clone();
        }
        t += 1;
    }

    let diag: Vec<BigInt> = (0..ncols)
        .map(|i| if i < nrows { a[i][i].abs() } else { BigInt::zero() })
        .collect();
    debug_assert!(diag.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            (&w[1] % &w[0]).is_zero()
        }
    }));
    (diag, vinv)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // Quotient minimizing the remainder's absolute value.
    let q = a / b;
    let r = a - &q * b;
    if r.abs() * 2u32 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Invariant factors (> 1, ascending divisibility) of Z^r / rowspan(mat).
pub fn cokernel_invariants(mat: &[Vec<BigInt>]) -> Vec<u64> {
    let (diag, _) = smith_normal_form(mat);
    diag.iter()
        .filter(|d| !d.is_zero() && **d != BigInt::from(1u64))
        .map(|d| d.to_u64().expect("finite cokernel fits u64"))
        .collect()
}
