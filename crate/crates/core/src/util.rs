//! Small dense linear algebra and fitting helpers.

/// Solve a dense square system by Gaussian elimination with partial
/// pivoting; returns None when the matrix is numerically singular.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.push(b[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        m.swap(col, piv);
        if m[col][col].abs() < 1e-300 {
            return None;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..=n {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Least-squares fit of v against the basis functions `basis(x)`;
/// returns (coefficients, max absolute residual).
pub fn lsq_fit(
    samples: &[(f64, f64)],
    nbasis: usize,
    basis: impl Fn(f64) -> Vec<f64>,
) -> Option<(Vec<f64>, f64)> {
    let mut ata = vec![vec![0.0f64; nbasis]; nbasis];
    let mut atb = vec![0.0f64; nbasis];
    for &(x, v) in samples {
        let row = basis(x);
        for i in 0..nbasis {
            for j in 0..nbasis {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * v;
        }
    }
    let coef = solve_dense(&ata, &atb)?;
    let res = samples
        .iter()
        .map(|&(x, v)| {
            let row = basis(x);
            (v - row.iter().zip(&coef).map(|(r, c)| r * c).sum::<f64>()).abs()
        })
        .fold(0.0, f64::max);
    Some((coef, res))
}
