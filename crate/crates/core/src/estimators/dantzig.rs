use nalgebra::{DMatrix, DVector};

use super::Estimate;
use crate::measurement::EffectiveMatrix;
use crate::{Error, Result};

/// Largest accepted KKT residual at termination.
pub const DS_KKT_TOL: f64 = 1e-7;
pub const DS_MAX_ITERS: usize = 100;

/// The solver stops early once the KKT residual falls below this.
const TARGET_KKT: f64 = 1e-10;
const STEP_FRACTION: f64 = 0.99;

/// Solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DantzigReport {
    pub iterations: usize,
    /// `max(‖r_primal‖∞, ‖r_dual‖∞, sᵀz)` at the returned iterate.
    pub kkt_residual: f64,
    /// `‖θ̂‖₁`.
    pub objective: f64,
}

/// Dantzig selector: `min ‖θ‖₁` subject to `‖Aᵀ(Aθ − y)‖∞ ≤ γ`.
pub fn dantzig_selector(a: &EffectiveMatrix, y: &DVector<f64>, gamma: f64) -> Result<Estimate> {
    dantzig_selector_with_report(a, y, gamma).map(|(est, _)| est)
}

/// Same as [`dantzig_selector`], also returning solver diagnostics.
///
/// The problem is solved as the inequality-form LP over `(θ, u)`:
///
/// ```text
/// minimize   1ᵀu
/// subject to  θ − u ≤ 0,   −θ − u ≤ 0,
///             Qθ ≤ γ + b,  −Qθ ≤ γ − b,     Q = AᵀA, b = Aᵀy
/// ```
///
/// with a Mehrotra predictor–corrector primal-dual interior-point method
/// from the infeasible start `θ = 0, u = 1, s = max(h − Gx, 1), z = 1`.
/// Primal and dual steps are taken separately at 0.99 of the distance to
/// the boundary. Each Newton system is reduced to an `N × N` positive
/// definite Schur complement and solved by Cholesky.
pub fn dantzig_selector_with_report(
    a: &EffectiveMatrix,
    y: &DVector<f64>,
    gamma: f64,
) -> Result<(Estimate, DantzigReport)> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("γ = {gamma} must be finite and ≥ 0")));
    }
    let m = a.matrix();
    let b = m.tr_mul_vec(y)?;
    let q = m.tr_mul(m.as_dmatrix());
    let lp = DantzigLp::new(q, b, gamma);
    let (theta, report) = lp.solve()?;
    let est = Estimate::new(theta, "ds", report.iterations)?;
    Ok((est, report))
}

/// Constraint rows are stored as four blocks of length `n`, in the order
/// listed on [`dantzig_selector_with_report`].
struct DantzigLp {
    q: DMatrix<f64>,
    h: DVector<f64>,
    n: usize,
}

struct Direction {
    dx: DVector<f64>,
    ds: DVector<f64>,
    dz: DVector<f64>,
}

impl DantzigLp {
    fn new(q: DMatrix<f64>, b: DVector<f64>, gamma: f64) -> Self {
        let n = b.len();
        let mut h = DVector::zeros(4 * n);
        for i in 0..n {
            h[2 * n + i] = gamma + b[i];
            h[3 * n + i] = gamma - b[i];
        }
        DantzigLp { q, h, n }
    }

    /// `G·x` for `x = (θ, u)`.
    fn g_mul(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let theta = x.rows(0, n);
        let u = x.rows(n, n);
        let qt = &self.q * theta;
        let mut out = DVector::zeros(4 * n);
        for i in 0..n {
            out[i] = theta[i] - u[i];
            out[n + i] = -theta[i] - u[i];
            out[2 * n + i] = qt[i];
            out[3 * n + i] = -qt[i];
        }
        out
    }

    /// `Gᵀ·v`.
    fn gt_mul(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let diff = DVector::from_fn(n, |i, _| v[2 * n + i] - v[3 * n + i]);
        let qd = &self.q * diff;
        let mut out = DVector::zeros(2 * n);
        for i in 0..n {
            out[i] = v[i] - v[n + i] + qd[i];
            out[n + i] = -v[i] - v[n + i];
        }
        out
    }

    fn cost(&self) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(2 * n, |i, _| if i < n { 0.0 } else { 1.0 })
    }

    /// Solves `GᵀWG·dx = rhs` with `W = diag(w)` using the block structure.
    fn solve_normal(&self, w: &DVector<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n;
        let w1 = w.rows(0, n);
        let w2 = w.rows(n, n);
        let w34 = DVector::from_fn(n, |i, _| w[2 * n + i] + w[3 * n + i]);
        let d = DVector::from_fn(n, |i, _| w1[i] + w2[i]);
        let e = DVector::from_fn(n, |i, _| w2[i] - w1[i]);

        let mut scaled = self.q.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= w34[j];
        }
        let mut schur = &scaled * &self.q;
        for i in 0..n {
            schur[(i, i)] += 4.0 * w1[i] * w2[i] / d[i];
        }
        let f_theta = rhs.rows(0, n);
        let f_u = rhs.rows(n, n);
        let reduced = DVector::from_fn(n, |i, _| f_theta[i] - e[i] * f_u[i] / d[i]);

        let d_theta = cholesky_solve(schur, &reduced)?;
        let mut dx = DVector::zeros(2 * n);
        for i in 0..n {
            dx[i] = d_theta[i];
            dx[n + i] = (f_u[i] - e[i] * d_theta[i]) / d[i];
        }
        Ok(dx)
    }

    fn direction(
        &self,
        s: &DVector<f64>,
        z: &DVector<f64>,
        r_p: &DVector<f64>,
        r_d: &DVector<f64>,
        r_c: &DVector<f64>,
    ) -> Result<Direction> {
        let w = z.component_div(s);
        let v = (z.component_mul(r_p) - r_c).component_div(s);
        let rhs = -r_d - self.gt_mul(&v);
        let dx = self.solve_normal(&w, &rhs)?;
        let g_dx = self.g_mul(&dx);
        let ds = -r_p - &g_dx;
        let dz = v + w.component_mul(&g_dx);
        Ok(Direction { dx, ds, dz })
    }

    fn solve(&self) -> Result<(DVector<f64>, DantzigReport)> {
        let n = self.n;
        let m = (4 * n) as f64;
        let c = self.cost();
        let mut x = DVector::from_fn(2 * n, |i, _| if i < n { 0.0 } else { 1.0 });
        let gx = self.g_mul(&x);
        let mut s = (&self.h - gx).map(|v| v.max(1.0));
        let mut z = DVector::from_element(4 * n, 1.0);

        for iter in 0..DS_MAX_ITERS {
            let r_p = self.g_mul(&x) + &s - &self.h;
            let r_d = self.gt_mul(&z) + &c;
            let gap = s.dot(&z);
            let kkt = r_p.amax().max(r_d.amax()).max(gap);
            if kkt <= TARGET_KKT {
                return Ok(self.finish(x, iter, kkt));
            }
            let hz = self.h.dot(&z);
            // Farkas certificate: z ≥ 0, Gᵀz = 0, hᵀz < 0.
            if hz < 0.0 && self.gt_mul(&z).amax() <= 1e-9 * -hz {
                return Err(Error::Infeasible);
            }
            let mu = gap / m;

            let sz = s.component_mul(&z);
            let affine = self.direction(&s, &z, &r_p, &r_d, &sz)?;
            let ap = max_step(&s, &affine.ds).min(1.0);
            let ad = max_step(&z, &affine.dz).min(1.0);
            let mu_aff = (&s + ap * &affine.ds).dot(&(&z + ad * &affine.dz)) / m;
            let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

            let r_c = sz + affine.ds.component_mul(&affine.dz)
                - DVector::from_element(4 * n, sigma * mu);
            let step = self.direction(&s, &z, &r_p, &r_d, &r_c)?;
            let ap = (STEP_FRACTION * max_step(&s, &step.ds)).min(1.0);
            let ad = (STEP_FRACTION * max_step(&z, &step.dz)).min(1.0);
            x += ap * &step.dx;
            s += ap * &step.ds;
            z += ad * &step.dz;
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::Convergence {
                    what: "dantzig selector interior point",
                    iterations: iter + 1,
                    last: kkt,
                });
            }
        }
        let r_p = self.g_mul(&x) + &s - &self.h;
        let r_d = self.gt_mul(&z) + &c;
        let kkt = r_p.amax().max(r_d.amax()).max(s.dot(&z));
        if kkt <= DS_KKT_TOL {
            Ok(self.finish(x, DS_MAX_ITERS, kkt))
        } else {
            Err(Error::Convergence {
                what: "dantzig selector interior point",
                iterations: DS_MAX_ITERS,
                last: kkt,
            })
        }
    }

    fn finish(&self, x: DVector<f64>, iterations: usize, kkt: f64) -> (DVector<f64>, DantzigReport) {
        let theta = x.rows(0, self.n).into_owned();
        let objective = theta.lp_norm(1);
        (
            theta,
            DantzigReport {
                iterations,
                kkt_residual: kkt,
                objective,
            },
        )
    }
}

/// Largest `α ∈ (0, ∞]` with `v + α·dv ≥ 0`, capped at `1/STEP_FRACTION`
/// so the damped step never exceeds a full Newton step.
fn max_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    let mut alpha = 1.0 / STEP_FRACTION;
    for (vi, di) in v.iter().zip(dv.iter()) {
        if *di < 0.0 {
            alpha = alpha.min(-vi / di);
        }
    }
    alpha
}

fn cholesky_solve(mut matrix: DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let scale = matrix.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut ridge = 0.0;
    for _ in 0..6 {
        if let Some(chol) = matrix.clone().cholesky() {
            return Ok(chol.solve(rhs));
        }
        let bump = if ridge == 0.0 { 1e-14 * scale } else { ridge * 99.0 };
        for i in 0..matrix.nrows() {
            matrix[(i, i)] += bump;
        }
        ridge += bump;
    }
    Err(Error::Singular("interior-point normal equations".into()))
}
