//! Integer solvability of linear systems by column Hermite reduction.

/// Decides whether `A x = b` has an integer solution. `columns[j]` lists
/// the nonzero `(row, value)` entries of column `j`. Returns `None` if the
/// reduction overflows 128-bit arithmetic.
pub fn integer_solvable(columns: &[Vec<(usize, i64)>], rows: usize, rhs: &[i64]) -> Option<bool> {
    let n = columns.len();
    let mut m: Vec<Vec<i128>> = vec![vec![0; rows]; n];
    for (j, col) in columns.iter().enumerate() {
        for &(r, v) in col {
            m[j][r] += v as i128;
        }
    }
    let mut y: Vec<i128> = Vec::new();
    let mut p = 0;
    for i in 0..rows {
        loop {
            let pivot = (p..n).filter(|&k| m[k][i] != 0).min_by_key(|&k| (m[k][i].unsigned_abs(), k));
            let Some(k) = pivot else { break };
            m.swap(p, k);
            let mut done = true;
            for k in p + 1..n {
                if m[k][i] == 0 {
                    continue;
                }
                let q = m[k][i].div_euclid(m[p][i]);
                for r in i..rows {
                    let v = m[p][r].checked_mul(q)?;
                    m[k][r] = m[k][r].checked_sub(v)?;
                }
                if m[k][i] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        let mut residual = rhs[i] as i128;
        for (q, yq) in y.iter().enumerate() {
            residual = residual.checked_sub(m[q][i].checked_mul(*yq)?)?;
        }
        if p < n && m[p][i] != 0 {
            if residual % m[p][i] != 0 {
                return Some(false);
            }
            y.push(residual / m[p][i]);
            p += 1;
        } else if residual != 0 {
            return Some(false);
        }
    }
    Some(true)
}
