use crate::error::{Error, Result};
use crate::expr::{Chart, Expr};

pub(crate) type Matrix = Vec<Vec<Expr>>;

/// Determinants of the submatrices formed by each row subset (bitmask) and
/// the first `|subset|` of `cols`, by Laplace expansion along the last
/// column. Division-free, so polynomial entries give polynomial minors.
fn minors(m: &Matrix, cols: &[usize]) -> Vec<Expr> {
    let n = m.len();
    let mut memo = vec![Expr::ZERO; 1 << n];
    memo[0] = Expr::ONE;
    let mut by_size: Vec<usize> = (1..1usize << n)
        .filter(|s| s.count_ones() as usize <= cols.len())
        .collect();
    by_size.sort_by_key(|s| s.count_ones());
    for set in by_size {
        let col = cols[set.count_ones() as usize - 1];
        let mut terms = Vec::new();
        // rows after `i` in the subset decide the cofactor sign
        let mut after = set.count_ones() as usize;
        for i in 0..n {
            if set & (1 << i) == 0 {
                continue;
            }
            after -= 1;
            let entry = &m[i][col];
            let rest = &memo[set & !(1 << i)];
            if entry.is_zero_literal() || rest.is_zero_literal() {
                continue;
            }
            let t = entry * rest;
            terms.push(if after.is_multiple_of(2) { t } else { t.negate() });
        }
        memo[set] = Expr::sum(terms).expand();
    }
    memo
}

/// Symbolic inverse `adj(M) / det(M)` with memoized cofactors. Refuses when
/// the determinant vanishes at a sample point.
pub(crate) fn invert(chart: &Chart, m: &Matrix, what: &str) -> Result<Matrix> {
    let n = m.len();
    let full = (1usize << n) - 1;
    let all: Vec<usize> = (0..n).collect();
    let det = minors(m, &all)[full].clone();
    if let Err(Error::Inadmissible { witness, .. }) = chart.require_nonvanishing(what, &det) {
        let residual = det.eval(&witness).map(f64::abs).unwrap_or(f64::NAN);
        return Err(Error::Inconsistent {
            what: format!("{what}: determinant {det} vanishes"),
            residual,
            witness,
        });
    }
    let inv_det = det.recip();
    let mut inv = vec![vec![Expr::ZERO; n]; n];
    for j in 0..n {
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        let memo = minors(m, &cols);
        for (i, row) in inv.iter_mut().enumerate() {
            // B_ji = C_ij / det with C_ij = (-1)^(i+j) M_ij
            let c = &memo[full & !(1 << i)];
            if c.is_zero_literal() {
                continue;
            }
            let c = if (i + j) % 2 == 0 { c.clone() } else { c.clone().negate() };
            row[j] = Expr::product(vec![c, inv_det.clone()]).expand();
        }
    }
    Ok(transpose(&inv))
}

/// Solves `m x = b` in floating point with partial pivoting; `None` when
/// the matrix is numerically singular.
pub(crate) fn solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = m.len();
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() <= 1e-13 * scale.max(1.0) {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for j in col..n {
                m[row][j] -= f * m[col][j];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    Some(x)
}

pub(crate) fn mat_vec(m: &Matrix, v: &[Expr]) -> Vec<Expr> {
    m.iter()
        .map(|row| {
            let terms = row
                .iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero_literal() && !b.is_zero_literal())
                .map(|(a, b)| a * b)
                .collect();
            Expr::sum(terms).expand()
        })
        .collect()
}

pub(crate) fn transpose(m: &Matrix) -> Matrix {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
}

pub(crate) fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let bt = transpose(b);
    a.iter().map(|row| mat_vec(&bt, row)).collect()
}
