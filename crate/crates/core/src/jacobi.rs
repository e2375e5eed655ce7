//! Jacobi fields along geodesics and the kernel form of the error operator `W_k`.
//!
//! `a` and `b` solve `ÿ + κ(γ(t)) y = 0` with `(a, ȧ) = (1, 0)` and `(b, ḃ) = (0, 1)`;
//! they measure how `X_⊥` and `∂_θ` displace the geodesic transversally. From them
//! `q_k / b` is assembled and integrated in geodesic polar coordinates, which gives
//! an evaluation of `W_k` independent of the transport machinery in
//! [`apply_wk_transport`].

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geodesics::{default_max_steps, march, trace_forward, GeodesicPath, State};
use crate::grid::ScalarGrid;
use crate::hilbert::FiberFft;
use crate::metrics::{MetricModel, Point};
use crate::transforms::{perp_integrand, ray_quadrature};

/// Default launch-angle increment for `∂_θ(a/b)`.
pub const DEFAULT_DTHETA: f64 = 1e-4;

/// `a, ȧ, b, ḃ` and the direction angle at every path sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JacobiPair {
    pub dt: f64,
    pub a: Vec<f64>,
    pub adot: Vec<f64>,
    pub b: Vec<f64>,
    pub bdot: Vec<f64>,
    /// `α_{x,θ}(t)`, the angle of `γ̇(t)`.
    pub alpha: Vec<f64>,
    pub points: Vec<Point>,
}

impl JacobiPair {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn t(&self, p: usize) -> f64 {
        p as f64 * self.dt
    }

    pub fn wronskian(&self, p: usize) -> f64 {
        self.a[p] * self.bdot[p] - self.b[p] * self.adot[p]
    }

    /// `∂_t (λ∘γ) = e^{−λ} (cos α ∂_xλ + sin α ∂_yλ)`.
    pub fn lambda_dot(&self, m: &MetricModel, p: usize) -> f64 {
        let c = m.conformal(self.points[p]);
        let (sin, cos) = self.alpha[p].sin_cos();
        c.exp_neg_lambda * (cos * c.grad.x + sin * c.grad.y)
    }
}

type Augmented = [f64; 7];

#[inline]
fn augmented_rhs(m: &MetricModel, y: &Augmented) -> Augmented {
    let p = Point::new(y[0], y[1]);
    let c = m.conformal(p);
    let kappa = m.curvature(p);
    let (sin, cos) = y[2].sin_cos();
    let e = c.exp_neg_lambda;
    [e * cos, e * sin, e * (-sin * c.grad.x + cos * c.grad.y), y[4], -kappa * y[3], y[6], -kappa * y[5]]
}

fn rk4_augmented(m: &MetricModel, y: &Augmented, dt: f64) -> Augmented {
    let shift = |k: &Augmented, h: f64| -> Augmented { std::array::from_fn(|i| y[i] + h * k[i]) };
    let k1 = augmented_rhs(m, y);
    let k2 = augmented_rhs(m, &shift(&k1, 0.5 * dt));
    let k3 = augmented_rhs(m, &shift(&k2, 0.5 * dt));
    let k4 = augmented_rhs(m, &shift(&k3, dt));
    std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Integrates the geodesic together with both Jacobi fields for `samples − 1` steps.
/// The metric is evaluated wherever the geodesic goes, so a step or two past the
/// boundary is harmless.
pub fn jacobi_from(m: &MetricModel, start: State, dt: f64, samples: usize) -> JacobiPair {
    let mut jp = JacobiPair { dt, ..Default::default() };
    let mut y: Augmented = [start.x, start.y, start.theta, 1.0, 0.0, 0.0, 1.0];
    for p in 0..samples {
        if p > 0 {
            y = rk4_augmented(m, &y, dt);
        }
        jp.points.push(Point::new(y[0], y[1]));
        jp.alpha.push(y[2]);
        jp.a.push(y[3]);
        jp.adot.push(y[4]);
        jp.b.push(y[5]);
        jp.bdot.push(y[6]);
    }
    jp
}

/// Jacobi fields along `path`, with the path's step and sample count.
pub fn jacobi_fields(m: &MetricModel, path: &GeodesicPath) -> JacobiPair {
    jacobi_from(m, path.states[0], path.dt, path.states.len())
}

/// `(a, b)` at time `t` for constant curvature `κ`, with `b = sin(pt)/p` (resp. `sinh(pt)/p`)
/// where `p² = |κ|`.
pub fn const_curvature_ab(kappa: f64, t: f64) -> (f64, f64) {
    if kappa > 0.0 {
        let p = kappa.sqrt();
        ((p * t).cos(), (p * t).sin() / p)
    } else if kappa < 0.0 {
        let p = (-kappa).sqrt();
        ((p * t).cosh(), (p * t).sinh() / p)
    } else {
        (1.0, t)
    }
}

/// `q_k / b` along a geodesic, sampled at `t = dt, 2dt, …` while inside the disc.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KernelSamples {
    pub t: Vec<f64>,
    pub b: Vec<f64>,
    pub q_over_b: Vec<Complex64>,
    pub points: Vec<Point>,
}

/// `q_k/b = (−∂_θ(a/b) + ik(a−1)/b) e^{ik(α−θ)} / b` along `path`.
///
/// `∂_θ(a/b)` is a central difference over two auxiliary launches at `θ ± dθ`
/// from the same point. The `t = 0` sample, where both factors degenerate, is dropped.
pub fn kernel_qk(m: &MetricModel, path: &GeodesicPath, k: i32, dtheta: f64) -> Result<KernelSamples> {
    let start = path.states[0];
    let samples = path.exit_index;
    let jp = jacobi_from(m, start, path.dt, samples);
    let plus = jacobi_from(m, State { theta: start.theta + dtheta, ..start }, path.dt, samples);
    let minus = jacobi_from(m, State { theta: start.theta - dtheta, ..start }, path.dt, samples);
    let kf = k as f64;
    let mut out = KernelSamples::default();
    for p in 1..samples {
        let b = jp.b[p];
        if b.abs() < 1e-12 {
            return Err(Error::SingularB { t: jp.t(p) });
        }
        let d_ratio = (plus.a[p] / plus.b[p] - minus.a[p] / minus.b[p]) / (2.0 * dtheta);
        let q = Complex64::new(-d_ratio, kf * (jp.a[p] - 1.0) / b) * Complex64::cis(kf * (jp.alpha[p] - start.theta));
        out.t.push(jp.t(p));
        out.b.push(b);
        out.q_over_b.push(q / b);
        out.points.push(jp.points[p]);
    }
    Ok(out)
}

/// `W_k f(x)` from the kernel: `−(1/2π) ∮∫ q_k f(γ_{x,θ}(t)) dt dθ`.
///
/// With `X_⊥` as defined in [`MetricModel`] coordinates, `X_⊥γ = −a γ̇^⊥`, so the
/// kernel of `(X_⊥ u^f)_k` is `−q_k`. The first cell `[0, dt]` uses its midpoint
/// value `q_k(dt)/2`, the rest the left-endpoint rule.
pub fn apply_wk_kernel(m: &MetricModel, f: &ScalarGrid, k: i32, x: Point, n_theta: usize, dt: f64) -> Result<Complex64> {
    let dtheta = TAU / n_theta as f64;
    let max_steps = default_max_steps(dt);
    let mut total = Complex64::default();
    for j in 0..n_theta {
        let path = trace_forward(m, x, j as f64 * dtheta, dt, max_steps)?;
        let ks = kernel_qk(m, &path, k, DEFAULT_DTHETA)?;
        let last = ks.t.len();
        let mut line = Complex64::default();
        for (p, ((q, b), y)) in ks.q_over_b.iter().zip(&ks.b).zip(&ks.points).enumerate() {
            let weight = match p {
                0 => 1.5 * dt,
                _ if p + 1 == last => path.exit.fraction * dt,
                _ => dt,
            };
            line += q * b * f.interpolate(*y) * weight;
        }
        total += line;
    }
    Ok(-total * dtheta / TAU)
}

/// `∮∫ f(γ_{x,θ}(t)) b dt dθ`, the geodesic-polar form of `∫_M f dM`.
pub fn polar_integral<F: Fn(Point) -> f64>(m: &MetricModel, f: F, x: Point, n_theta: usize, dt: f64) -> Result<f64> {
    let dtheta = TAU / n_theta as f64;
    let max_steps = default_max_steps(dt);
    let mut total = 0.0;
    for j in 0..n_theta {
        let path = trace_forward(m, x, j as f64 * dtheta, dt, max_steps)?;
        let jp = jacobi_fields(m, &path);
        total += path.samples().enumerate().map(|(p, (s, w))| f(s.point()) * jp.b[p] * w).sum::<f64>();
    }
    Ok(total * dtheta)
}

/// `∫_M f dM = ∫ f e^{2λ} dx dy` by the midpoint rule on an `n × n` grid over the disc.
pub fn cartesian_integral<F: Fn(Point) -> f64>(m: &MetricModel, f: F, n: usize) -> f64 {
    let h = 2.0 / n as f64;
    let mut total = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let p = Point::new(-1.0 + (ix as f64 + 0.5) * h, -1.0 + (iy as f64 + 0.5) * h);
            if p.norm_sq() < 1.0 {
                total += f(p) * (2.0 * m.lambda(p)).exp();
            }
        }
    }
    total * h * h
}

/// Parameters of the transport-based error operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportParams {
    pub n_theta: usize,
    pub dt: f64,
    pub exec: Exec,
}

impl TransportParams {
    pub fn for_grid(n: usize) -> Self {
        Self { n_theta: 2 * n, dt: 1.0 / n as f64, exec: Exec::default() }
    }
}

/// `u(x, θ_j)` for every cell inside the disc, as `(cell, fiber)` rows; zero elsewhere.
fn transport_fibers<F>(m: &MetricModel, g: &ScalarGrid, params: TransportParams, integrand: F) -> (Vec<Option<Vec<Complex64>>>, usize)
where
    F: Fn(&State) -> Complex64 + Sync,
{
    let n_theta = params.n_theta;
    let dtheta = TAU / n_theta as f64;
    let max_steps = default_max_steps(params.dt);
    let rows = params.exec.map(g.n * g.n, |cell| {
        let x = g.point(cell);
        if x.norm_sq() >= 1.0 {
            return None;
        }
        let mut trapped = 0usize;
        let fiber = (0..n_theta)
            .map(|j| {
                ray_quadrature(m, State::new(x, j as f64 * dtheta), params.dt, max_steps, &integrand).unwrap_or_else(|_| {
                    trapped += 1;
                    Complex64::default()
                })
            })
            .collect::<Vec<_>>();
        Some((fiber, trapped))
    });
    let trapped = rows.iter().flatten().map(|(_, t)| t).sum();
    (rows.into_iter().map(|r| r.map(|(f, _)| f)).collect(), trapped)
}

fn fiber_coefficient(fiber: &[Complex64], k: i32) -> Complex64 {
    let dtheta = TAU / fiber.len() as f64;
    fiber.iter().enumerate().map(|(j, v)| v * Complex64::cis(-(k as f64) * j as f64 * dtheta)).sum::<Complex64>() / fiber.len() as f64
}

/// `W_k f = (X_⊥ u^f)_k` by solving the transport problem on every grid cell.
///
/// `u^f(x,θ) = ∫ f(γ) e^{ikα} dt` along the forward geodesic; `X_⊥` uses centered
/// differences in `x, y` and a spectral `∂_θ`. Returns the coefficient of `e^{ikθ}`
/// on the masked cells.
pub fn apply_wk_transport(m: &MetricModel, f: &ScalarGrid, k: i32, params: TransportParams) -> ScalarGrid {
    let kf = k as f64;
    let (u, trapped) = transport_fibers(m, f, params, |s| f.interpolate(s.point()) * Complex64::cis(kf * s.theta));
    if trapped > 0 {
        log::warn!("apply_wk_transport: {trapped} trapped rays");
    }
    let n = f.n;
    let n_theta = params.n_theta;
    let dtheta = TAU / n_theta as f64;
    let h = f.spacing();
    let fft = FiberFft::new(n_theta);
    let mut out = f.zeros_like();
    let cells = f.masked_indices();
    let values = params.exec.map(cells.len(), |c| {
        let cell = cells[c];
        let (ix, iy) = (cell % n, cell / n);
        let here = u[cell].as_ref().expect("masked cells lie inside the disc");
        let mut d_theta = here.clone();
        fft.derivative(&mut d_theta);
        let dx = |j: usize| difference(&u, cell, 1, ix, n, h, j);
        let dy = |j: usize| difference(&u, cell, n, iy, n, h, j);
        let cnf = m.conformal(f.point(cell));
        let xperp: Vec<Complex64> = (0..n_theta)
            .map(|j| {
                let (sin, cos) = (j as f64 * dtheta).sin_cos();
                -cnf.exp_neg_lambda * (-sin * dx(j) + cos * dy(j) - (cos * cnf.grad.x + sin * cnf.grad.y) * d_theta[j])
            })
            .collect();
        fiber_coefficient(&xperp, k)
    });
    for (cell, v) in cells.into_iter().zip(values) {
        out.values[cell] = v;
    }
    out
}

fn difference(u: &[Option<Vec<Complex64>>], cell: usize, stride: usize, pos: usize, n: usize, h: f64, j: usize) -> Complex64 {
    let lo = (pos > 0).then(|| u[cell - stride].as_ref()).flatten();
    let hi = (pos + 1 < n).then(|| u[cell + stride].as_ref()).flatten();
    match (lo, hi) {
        (Some(a), Some(b)) => (b[j] - a[j]) / (2.0 * h),
        (None, Some(b)) => (b[j] - u[cell].as_ref().map_or(Complex64::default(), |m| m[j])) / h,
        (Some(a), None) => (u[cell].as_ref().map_or(Complex64::default(), |m| m[j]) - a[j]) / h,
        (None, None) => Complex64::default(),
    }
}

/// `W_k^⋆ h = (u^{X_⊥ h})_k` for `h` vanishing near the boundary.
pub fn apply_wk_adjoint_transport(m: &MetricModel, h: &ScalarGrid, k: i32, params: TransportParams) -> ScalarGrid {
    let sampler = |p: Point| h.interpolate(p);
    let (u, trapped) = transport_fibers(m, h, params, |s| perp_integrand(m, &sampler, k, s, params.dt));
    if trapped > 0 {
        log::warn!("apply_wk_adjoint_transport: {trapped} trapped rays");
    }
    let mut out = h.zeros_like();
    for cell in h.masked_indices() {
        if let Some(fiber) = &u[cell] {
            out.values[cell] = fiber_coefficient(fiber, k);
        }
    }
    out
}

/// Power-iteration estimate of `‖W_k‖` on `L²(M)`, iterating `W_k^⋆ W_k`.
pub fn wk_norm_estimate(m: &MetricModel, template: &ScalarGrid, k: i32, params: TransportParams, iters: usize) -> f64 {
    // A smooth, compactly supported start with no special symmetry.
    let mut v = template.zeros_like();
    for cell in template.masked_indices() {
        let p = template.point(cell);
        let r2 = p.norm_sq();
        let envelope = (1.0 - r2 / (1.0 - template.eps_mask).powi(2)).max(0.0).powi(3);
        v.values[cell] = Complex64::new(envelope * (1.0 + 0.5 * p.x - 0.3 * p.y + 0.2 * p.x * p.y), 0.0);
    }
    let weighted_norm = |g: &ScalarGrid| g.inner_weighted(g, m).re.sqrt();
    let mut estimate = 0.0;
    for _ in 0..iters {
        let nv = weighted_norm(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.scale(Complex64::new(1.0 / nv, 0.0));
        let wv = apply_wk_transport(m, &v, k, params);
        estimate = weighted_norm(&wv);
        v = apply_wk_adjoint_transport(m, &wv, k, params);
    }
    estimate
}

/// Dumps `t, a, b, wronskian, re(q_k/b), im(q_k/b)` along the geodesic launched from `x0` at `θ0`.
pub fn write_kernel_csv<W: Write>(m: &MetricModel, x0: Point, theta0: f64, k: i32, dt: f64, mut w: W) -> Result<()> {
    let path = trace_forward(m, x0, theta0, dt, default_max_steps(dt))?;
    let jp = jacobi_fields(m, &path);
    let ks = kernel_qk(m, &path, k, DEFAULT_DTHETA)?;
    writeln!(w, "t,a,b,wronskian,qk_over_b_re,qk_over_b_im")?;
    for (i, q) in ks.q_over_b.iter().enumerate() {
        let p = i + 1;
        writeln!(w, "{},{},{},{},{},{}", jp.t(p), jp.a[p], jp.b[p], jp.wronskian(p), q.re, q.im)?;
    }
    Ok(())
}

/// Launches a geodesic through the disc center at angle `phi` from the boundary.
pub fn boundary_diameter(phi: f64) -> (Point, f64) {
    (Point::from_angle(phi), phi + PI)
}

/// `α(t)` along the geodesic from `start`, sampled every `dt` for `samples` points.
pub fn direction_samples(m: &MetricModel, start: State, dt: f64, samples: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples);
    let _ = march(m, start, dt, samples.saturating_sub(1), |_, s| out.push(s.theta));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::launch_state;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn families() -> Vec<MetricModel> {
        vec![
            MetricModel::Euclidean,
            MetricModel::const_curv_pos(2.0).unwrap(),
            MetricModel::const_curv_neg(1.6).unwrap(),
            MetricModel::lens(0.6).unwrap(),
        ]
    }

    fn random_path(m: &MetricModel, rng: &mut ChaCha8Rng, dt: f64) -> GeodesicPath {
        let beta = rng.random_range(0.0..TAU);
        let alpha = rng.random_range(-1.4..1.4);
        let s = launch_state(beta, alpha);
        trace_forward(m, s.point(), s.theta, dt, default_max_steps(dt)).unwrap()
    }

    #[test]
    fn wronskian_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in families() {
            for _ in 0..10 {
                let jp = jacobi_fields(&m, &random_path(&m, &mut rng, 1e-3));
                let worst = (0..jp.len()).map(|p| (jp.wronskian(p) - 1.0).abs()).fold(0.0, f64::max);
                assert!(worst < 1e-6, "{m}: {worst}");
            }
        }
    }

    #[test]
    fn constant_curvature_fields_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for m in [MetricModel::Euclidean, MetricModel::const_curv_pos(1.2).unwrap(), MetricModel::const_curv_neg(1.2).unwrap()] {
            let kappa = m.curvature(Point::new(0.0, 0.0));
            let jp = jacobi_fields(&m, &random_path(&m, &mut rng, 1e-3));
            for p in 0..jp.len() {
                let (a, b) = const_curvature_ab(kappa, jp.t(p));
                assert_abs_diff_eq!(jp.a[p], a, epsilon = 1e-6);
                assert_abs_diff_eq!(jp.b[p], b, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(const_curvature_ab(0.0, 1.3), (1.0, 1.3));
        let (a, b) = const_curvature_ab(1.0, PI / 2.0);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-15);
        assert_eq!(const_curvature_ab(-4.0, 0.0), (1.0, 0.0));
    }

    #[test]
    fn euclidean_kernel_vanishes() {
        let m = MetricModel::Euclidean;
        let path = trace_forward(&m, Point::new(0.2, -0.1), 0.7, 1e-3, 20_000).unwrap();
        for k in [0, 3, 6] {
            let ks = kernel_qk(&m, &path, k, DEFAULT_DTHETA).unwrap();
            assert!(ks.q_over_b.iter().all(|q| q.norm() < 1e-6));
        }
    }

    #[test]
    fn constant_curvature_kernels_match_closed_forms() {
        for (m, sign) in [(MetricModel::const_curv_pos(2.0).unwrap(), 1.0), (MetricModel::const_curv_neg(1.6).unwrap(), -1.0)] {
            let kappa = m.curvature(Point::new(0.0, 0.0));
            let p = kappa.abs().sqrt();
            let path = trace_forward(&m, Point::new(-0.3, 0.4), 5.5, 1e-3, 20_000).unwrap();
            for k in [1, 3, 6] {
                let ks = kernel_qk(&m, &path, k, DEFAULT_DTHETA).unwrap();
                for (i, (t, q)) in ks.t.iter().zip(&ks.q_over_b).enumerate() {
                    let c = if sign > 0.0 { 1.0 + (p * t).cos() } else { 1.0 + (p * t).cosh() };
                    let phase = Complex64::cis(k as f64 * (path.states[i + 1].theta - 5.5));
                    let expected = Complex64::new(0.0, -sign * k as f64 * p * p / c) * phase;
                    assert!((q - expected).norm() <= 1e-3 * expected.norm(), "{m} k={k} t={t}: {q} vs {expected}");
                }
            }
        }
    }

    #[test]
    fn alpha_derivatives_follow_jacobi_fields() {
        let (dt, eps) = (1e-3, 1e-5);
        for m in families() {
            let x = Point::new(0.1, -0.2);
            let theta = 2.2;
            let path = trace_forward(&m, x, theta, dt, 20_000).unwrap();
            let jp = jacobi_fields(&m, &path);
            let samples = path.exit_index - 2;
            // Transverse shifts along −X_⊥ = e^{−λ}(θ̂^⊥ − (θ̂·∇λ) ∂_θ).
            let c = m.conformal(x);
            let (sin, cos) = theta.sin_cos();
            let shift = |s: f64| State {
                x: x.x - s * c.exp_neg_lambda * sin,
                y: x.y + s * c.exp_neg_lambda * cos,
                theta: theta - s * c.exp_neg_lambda * (cos * c.grad.x + sin * c.grad.y),
            };
            let (ap, am) = (direction_samples(&m, shift(eps), dt, samples), direction_samples(&m, shift(-eps), dt, samples));
            let (bp, bm) = (
                direction_samples(&m, State::new(x, theta + eps), dt, samples),
                direction_samples(&m, State::new(x, theta - eps), dt, samples),
            );
            for p in (1..samples).step_by(25) {
                let ld = jp.lambda_dot(&m, p);
                assert_abs_diff_eq!((ap[p] - am[p]) / (2.0 * eps), jp.adot[p] - jp.a[p] * ld, epsilon = 1e-5);
                assert_abs_diff_eq!((bp[p] - bm[p]) / (2.0 * eps), jp.bdot[p] - jp.b[p] * ld, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn kernel_factors_stay_bounded_near_the_launch() {
        for m in families().into_iter().skip(1) {
            let path = trace_forward(&m, Point::new(0.05, 0.1), 1.0, 1e-3, 20_000).unwrap();
            let jp = jacobi_fields(&m, &path);
            let plus = jacobi_from(&m, State { theta: 1.0 + DEFAULT_DTHETA, ..path.states[0] }, 1e-3, jp.len());
            let minus = jacobi_from(&m, State { theta: 1.0 - DEFAULT_DTHETA, ..path.states[0] }, 1e-3, jp.len());
            let factors = |p: usize| {
                let d = (plus.a[p] / plus.b[p] - minus.a[p] / minus.b[p]) / (2.0 * DEFAULT_DTHETA);
                ((d / jp.b[p]).abs(), ((jp.a[p] - 1.0) / (jp.b[p] * jp.b[p])).abs())
            };
            let mid = factors(path.exit_index / 2);
            for p in 1..20 {
                let (f1, f2) = factors(p);
                assert!(f1 <= 10.0 * mid.0.max(1e-3) && f2 <= 10.0 * mid.1.max(1e-3), "{m} p={p}: {f1} {f2} vs {mid:?}");
            }
        }
    }

    #[test]
    fn zero_field_gives_zero_error_operator() {
        let m = MetricModel::const_curv_pos(2.0).unwrap();
        let g = crate::grid::cartesian_grid(16, 0.25).unwrap();
        assert_eq!(apply_wk_kernel(&m, &g, 3, Point::new(0.1, 0.0), 16, 1.0 / 32.0).unwrap(), Complex64::default());
        assert!(apply_wk_transport(&m, &g, 3, TransportParams::for_grid(16)).max_abs() == 0.0);
    }
}
