use alloc::vec::Vec;

/// Rank of a row-major `rows×cols` matrix by elimination with partial
/// pivoting, treating pivots below `1e-10·max|a|` as zero.
pub fn rank(a: &[f64], rows: usize, cols: usize) -> usize {
    let mut m = a.to_vec();
    let tol = 1e-10 * m.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).max_by(|&i, &k| m[i * cols + c].abs().total_cmp(&m[k * cols + c].abs())) else {
            break;
        };
        if m[p * cols + c].abs() <= tol {
            continue;
        }
        for k in 0..cols {
            m.swap(r * cols + k, p * cols + k);
        }
        for i in r + 1..rows {
            let f = m[i * cols + c] / m[r * cols + c];
            for k in c..cols {
                m[i * cols + k] -= f * m[r * cols + k];
            }
        }
        r += 1;
    }
    r
}

/// Coefficients `c_0..c_n` of `det(sI − M) = Σ c_k s^{n−k}` (so `c_0 = 1`)
/// by the Faddeev–LeVerrier recursion.
pub fn characteristic_polynomial(m: &[f64], n: usize) -> Vec<f64> {
    let mut c = alloc::vec![1.0];
    let mut k_mat = alloc::vec![0.0; n * n];
    for k in 1..=n {
        // K_k = M K_{k−1} + c_{k−1} I
        let prev = k_mat.clone();
        for i in 0..n {
            for j in 0..n {
                let mut s: f64 = (0..n).map(|l| m[i * n + l] * prev[l * n + j]).sum();
                if i == j {
                    s += c[k - 1];
                }
                k_mat[i * n + j] = s;
            }
        }
        let tr: f64 = (0..n).map(|i| (0..n).map(|l| m[i * n + l] * k_mat[l * n + i]).sum::<f64>()).sum();
        c.push(-tr / k as f64);
    }
    c
}

/// Routh–Hurwitz test on the characteristic polynomial.
pub fn is_hurwitz(m: &[f64], n: usize) -> bool {
    let c = characteristic_polynomial(m, n);
    if c.iter().any(|v| !(*v > 0.0)) {
        return false;
    }
    let cols = n / 2 + 1;
    let mut prev: Vec<f64> = (0..cols).map(|k| c.get(2 * k).copied().unwrap_or(0.0)).collect();
    let mut cur: Vec<f64> = (0..cols).map(|k| c.get(2 * k + 1).copied().unwrap_or(0.0)).collect();
    for _ in 0..n.saturating_sub(1) {
        if !(cur[0] > 0.0) {
            return false;
        }
        let next: Vec<f64> = (0..cols)
            .map(|k| {
                let a = prev.get(k + 1).copied().unwrap_or(0.0);
                let b = cur.get(k + 1).copied().unwrap_or(0.0);
                (cur[0] * a - prev[0] * b) / cur[0]
            })
            .collect();
        prev = cur;
        cur = next;
    }
    cur[0] > 0.0 || n == 0
}
