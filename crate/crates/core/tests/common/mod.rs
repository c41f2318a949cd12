#![allow(dead_code)]

use chanest::RngStream;

/// Row-major random matrix with standard normal entries.
pub fn gaussian_entries(rows: usize, cols: usize, rng: &mut RngStream) -> Vec<f64> {
    (0..rows * cols).map(|_| rng.gaussian()).collect()
}

/// Inverse of a small square matrix by Gauss–Jordan elimination with
/// partial pivoting. Row-major in and out.
pub fn gauss_jordan_inverse(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a[i * n..(i + 1) * n].to_vec();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[pivot][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some(m.into_iter().flat_map(|row| row[n..].to_vec()).collect())
}

/// `XᵀX` for row-major `X` of shape `rows × cols`.
pub fn gram(rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            g[i * cols + j] = (0..rows).map(|r| x[r * cols + i] * x[r * cols + j]).sum();
        }
    }
    g
}

/// Modified Gram–Schmidt on the columns of a row-major matrix.
pub fn orthonormalize(rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    let mut q: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|r| x[r * cols + j]).collect())
        .collect();
    for j in 0..cols {
        for k in 0..j {
            let d: f64 = q[j].iter().zip(&q[k]).map(|(a, b)| a * b).sum();
            let prev = q[k].clone();
            for (v, p) in q[j].iter_mut().zip(prev) {
                *v -= d * p;
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut out = vec![0.0; rows * cols];
    for (j, col) in q.iter().enumerate() {
        for r in 0..rows {
            out[r * cols + j] = col[r];
        }
    }
    out
}

/// Smallest `‖θ‖₁` over a zooming grid subject to
/// `‖Aᵀ(Aθ − y)‖∞ ≤ γ`, for up to three unknowns.
///
/// Starts with a dense grid over `[−radius, radius]ⁿ` and repeatedly
/// re-centres a finer grid on the best feasible point.
pub fn dantzig_grid(
    rows: usize,
    cols: usize,
    a: &[f64],
    y: &[f64],
    gamma: f64,
    radius: f64,
) -> Option<(f64, Vec<f64>)> {
    assert!((1..=3).contains(&cols));
    let q = gram(rows, cols, a);
    let b: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|r| a[r * cols + j] * y[r]).sum())
        .collect();
    let feasible = |t: &[f64]| {
        (0..cols).all(|i| {
            let qt: f64 = (0..cols).map(|j| q[i * cols + j] * t[j]).sum();
            (qt - b[i]).abs() <= gamma
        })
    };
    let mut centre = vec![0.0; cols];
    let mut half = radius;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut points: usize = if cols == 3 { 121 } else { 801 };
    while half > 1e-7 {
        let step = 2.0 * half / (points - 1) as f64;
        let total = points.pow(cols as u32);
        let mut t = vec![0.0; cols];
        for idx in 0..total {
            let mut rest = idx;
            for (d, v) in t.iter_mut().enumerate() {
                *v = centre[d] - half + (rest % points) as f64 * step;
                rest /= points;
            }
            if feasible(&t) {
                let l1: f64 = t.iter().map(|v| v.abs()).sum();
                if best.as_ref().is_none_or(|(b, _)| l1 < *b) {
                    best = Some((l1, t.clone()));
                }
            }
        }
        let (_, arg) = best.as_ref()?;
        centre = arg.clone();
        half = 4.0 * step;
        points = 41;
    }
    best
}
