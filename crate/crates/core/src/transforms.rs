//! Forward transforms `I_k f = I[f e^{ikθ}]` and `I_{k,⊥} f = I[X_⊥(f e^{ikθ})]`.
//!
//! Each influx ray is traced with [`march`] and integrated with left-endpoint
//! weights `Δt`, the last interior sample weighted by the fraction of the cell
//! before the refined boundary crossing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geodesics::{default_max_steps, launch_state, march, InfluxGrid, State};
use crate::grid::ScalarGrid;
use crate::metrics::{MetricModel, Point};

/// Complex data on the influx grid, row-major with `β` as the row.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    pub grid: InfluxGrid,
    pub values: Vec<Complex64>,
    /// Rays that never left the disc. Their value is stored as zero.
    pub missing: Vec<bool>,
}

impl Sinogram {
    pub fn zeros(grid: &InfluxGrid) -> Self {
        let len = grid.n_beta() * grid.n_alpha();
        Self { grid: grid.clone(), values: vec![Complex64::default(); len], missing: vec![false; len] }
    }

    pub fn get(&self, ib: usize, ja: usize) -> Complex64 {
        self.values[ib * self.grid.n_alpha() + ja]
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Left-endpoint quadrature of `integrand` along the geodesic from `start`.
pub fn ray_quadrature<F>(m: &MetricModel, start: State, dt: f64, max_steps: usize, mut integrand: F) -> Result<Complex64>
where
    F: FnMut(&State) -> Complex64,
{
    let mut sum = Complex64::default();
    let mut last = Complex64::default();
    let (_, exit) = march(m, start, dt, max_steps, |_, s| {
        last = integrand(s);
        sum += last;
    })?;
    Ok((sum - last * (1.0 - exit.fraction)) * dt)
}

/// `X_⊥(f e^{ikθ})` at `s`, with the transverse derivative taken by the
/// centered difference at offsets `∓δ θ̂^⊥`.
#[inline]
pub fn perp_integrand<F>(m: &MetricModel, f: &F, k: i32, s: &State, delta: f64) -> Complex64
where
    F: Fn(Point) -> Complex64,
{
    let c = m.conformal(s.point());
    let (sin, cos) = s.theta.sin_cos();
    let plus = f(Point::new(s.x + delta * sin, s.y - delta * cos));
    let minus = f(Point::new(s.x - delta * sin, s.y + delta * cos));
    let along = cos * c.grad.x + sin * c.grad.y;
    let value = (plus - minus) / (2.0 * delta) + Complex64::new(0.0, k as f64 * along) * f(s.point());
    value * Complex64::from_polar(c.exp_neg_lambda, k as f64 * s.theta)
}

fn sweep<F>(grid: &InfluxGrid, exec: Exec, ray: F) -> Sinogram
where
    F: Fn(State) -> Result<Complex64> + Sync + Send,
{
    let na = grid.n_alpha();
    let results = exec.map(grid.n_beta() * na, |idx| ray(launch_state(grid.betas[idx / na], grid.alphas[idx % na])));
    let mut sino = Sinogram::zeros(grid);
    for (idx, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => sino.values[idx] = v,
            Err(_) => sino.missing[idx] = true,
        }
    }
    let missing = sino.missing_count();
    if missing > 0 {
        log::warn!("{missing} trapped rays marked as missing data");
    }
    sino
}

/// `I_k f` on every ray of `grid`.
pub fn forward_ik(m: &MetricModel, f: &ScalarGrid, k: i32, grid: &InfluxGrid, dt: f64, exec: Exec) -> Sinogram {
    let max_steps = default_max_steps(dt);
    let kf = k as f64;
    sweep(grid, exec, |start| {
        ray_quadrature(m, start, dt, max_steps, |s| f.interpolate(s.point()) * Complex64::cis(kf * s.theta))
    })
}

/// `I_{k,⊥} f` on every ray of `grid`.
pub fn forward_ikperp(m: &MetricModel, f: &ScalarGrid, k: i32, grid: &InfluxGrid, dt: f64, exec: Exec) -> Sinogram {
    let max_steps = default_max_steps(dt);
    let sample = |p: Point| f.interpolate(p);
    sweep(grid, exec, |start| ray_quadrature(m, start, dt, max_steps, |s| perp_integrand(m, &sample, k, s, dt)))
}

/// `Δt Σ u(x^p, θ^p)` along the ray shot from `(β, α)`: the quadrature shared by
/// the forward transforms, for an arbitrary integrand on the circle bundle.
pub fn ray_integral_general<U>(m: &MetricModel, u: U, beta: f64, alpha: f64, dt: f64) -> Result<Complex64>
where
    U: Fn(Point, f64) -> Complex64,
{
    if alpha.abs() >= std::f64::consts::FRAC_PI_2 {
        return Ok(Complex64::default());
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    ray_quadrature(m, launch_state(beta, alpha), dt, default_max_steps(dt), |s| u(s.point(), s.theta))
}
