//! Approximate inverses for `I_k` and `I_{k,⊥}` and their Neumann-series iteration.
//!
//! Both inverses read the data through `w_ψ`, the flow-invariant extension of
//! a boundary function, evaluated by tracing each `(x, θ)` back to its influx
//! point. The backward traces depend only on the metric and the discretization,
//! so [`Reconstructor`] tabulates them once and reuses them for every
//! application of the approximate inverse.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geodesics::{default_max_steps, make_influx_grid, trace_backward_to_influx, InfluxGrid};
use crate::grid::{cartesian_grid, ScalarGrid};
use crate::hilbert::{parity_extend, restrict_to_influx, shifted_hilbert, Parity};
use crate::metrics::{MetricModel, Point};
use crate::transforms::{forward_ik, forward_ikperp, Sinogram};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Recover `f` from `I_k f`.
    InvertIk,
    /// Recover `h` (vanishing on the boundary) from `I_{k,⊥} h`.
    InvertIkPerp,
}

impl Mode {
    /// Parity of the data part fed to `H_(k)`: that of `k + 1` for `I_k`
    /// data, that of `k` for `I_{k,⊥}` data.
    pub fn data_parity(self, k: i32) -> Parity {
        match self {
            Mode::InvertIk => Parity::of(k).flip(),
            Mode::InvertIkPerp => Parity::of(k),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ik" => Ok(Mode::InvertIk),
            "ikperp" => Ok(Mode::InvertIkPerp),
            other => Err(Error::Parse(format!("unknown mode '{other}' (expected ik or ikperp)"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::InvertIk => "ik",
            Mode::InvertIkPerp => "ikperp",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionConfig {
    pub k: i32,
    pub mode: Mode,
    /// Cartesian grid sidelength; the influx grid is `2n × n`.
    pub n: usize,
    pub dt: f64,
    pub iters: usize,
    /// Fiber quadrature nodes per grid point.
    pub n_theta: usize,
    /// Margin inside the unit circle where reconstructions are zeroed.
    pub eps_mask: f64,
    /// Stop once `‖s_{p+1} − s_p‖ / ‖s_1‖` drops below this value.
    pub early_stop: Option<f64>,
    pub exec: Exec,
}

impl ReconstructionConfig {
    /// Defaults: `dt = 1/n`, 10 iterations, `n_theta = 2n`, margin of two cells.
    pub fn new(k: i32, mode: Mode, n: usize) -> Self {
        Self {
            k,
            mode,
            n,
            dt: 1.0 / n as f64,
            iters: 10,
            n_theta: 2 * n,
            eps_mask: 4.0 / n as f64,
            early_stop: None,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iters < 1 {
            return Err(Error::InvalidParameter("iters must be >= 1".into()));
        }
        if self.n_theta < 2 || self.n_theta % 2 != 0 {
            return Err(Error::InvalidParameter(format!("n_theta must be even, got {}", self.n_theta)));
        }
        if self.n < 8 {
            return Err(Error::InvalidParameter(format!("n must be >= 8, got {}", self.n)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Per-iteration diagnostics of [`neumann_invert`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorHistory {
    /// Relative `L²` error of each iterate; empty without a reference.
    pub rel_l2: Vec<f64>,
    /// `‖s_p − s_{p−1}‖` (with `s_0 = 0`).
    pub update_norms: Vec<f64>,
    /// Fraction of backward traces and forward rays that were trapped.
    pub trapped_fraction: Vec<f64>,
}

/// `w(β, α)` with bilinear interpolation, `β` periodic and `α` clamped to the sample range.
pub fn interpolate_influx(w: &Sinogram, beta: f64, alpha: f64) -> Complex64 {
    let (nb, na) = (w.grid.n_beta(), w.grid.n_alpha());
    let ub = beta.rem_euclid(TAU) / w.grid.d_beta();
    let ib0 = ub.floor();
    let fb = ub - ib0;
    let ib0 = (ib0 as usize) % nb;
    let ib1 = (ib0 + 1) % nb;
    let ua = ((alpha + FRAC_PI_2) / w.grid.d_alpha() - 0.5).clamp(0.0, (na - 1) as f64);
    let ja0 = (ua.floor() as usize).min(na.saturating_sub(2));
    let fa = ua - ja0 as f64;
    let at = |ib: usize, ja: usize| {
        let idx = ib * na + ja;
        if w.missing[idx] {
            Complex64::default()
        } else {
            w.values[idx]
        }
    };
    (at(ib0, ja0) * (1.0 - fa) + at(ib0, ja0 + 1) * fa) * (1.0 - fb)
        + (at(ib1, ja0) * (1.0 - fa) + at(ib1, ja0 + 1) * fa) * fb
}

/// `w_ψ(x, θ)`: the boundary function `w` transported along the geodesic through `(x, θ)`.
/// Trapped traces evaluate to zero.
pub fn transport_value(m: &MetricModel, w: &Sinogram, x: Point, theta: f64, dt: f64) -> Complex64 {
    match trace_backward_to_influx(m, x, theta, dt, default_max_steps(dt)) {
        Ok((beta, alpha)) => interpolate_influx(w, beta, alpha),
        Err(e) => {
            log::debug!("transport_value at {x:?}, θ = {theta}: {e}");
            Complex64::default()
        }
    }
}

/// Tabulated influx points `(β, α)` for a set of grid cells and `n_theta` directions.
#[derive(Clone, Debug)]
pub struct BackprojectionTable {
    pub n_theta: usize,
    /// Grid cell indices covered by the table.
    pub cells: Vec<usize>,
    /// `(β, α)` per `(cell, direction)`, `None` when trapped.
    pub influx: Vec<Option<(f64, f64)>>,
    pub trapped: usize,
}

impl BackprojectionTable {
    pub fn build(m: &MetricModel, template: &ScalarGrid, cells: Vec<usize>, n_theta: usize, dt: f64, exec: Exec) -> Self {
        let max_steps = default_max_steps(dt);
        let dtheta = TAU / n_theta as f64;
        let influx = exec.map(cells.len() * n_theta, |idx| {
            let x = template.point(cells[idx / n_theta]);
            trace_backward_to_influx(m, x, (idx % n_theta) as f64 * dtheta, dt, max_steps).ok()
        });
        let trapped = influx.iter().filter(|v| v.is_none()).count();
        if trapped > 0 {
            log::warn!("{trapped} of {} backward traces trapped; their data access reads zero", influx.len());
        }
        Self { n_theta, cells, influx, trapped }
    }

    pub fn trapped_fraction(&self) -> f64 {
        self.trapped as f64 / self.influx.len().max(1) as f64
    }

    /// `Σ_j w_ψ(x, θ_j) e^{−ikθ_j} weight(θ_j) Δθ` for every tabulated cell and each weight.
    fn fiber_integrals<const W: usize>(&self, w: &Sinogram, k: i32, weights: [fn(f64) -> f64; W], exec: Exec) -> Vec<[Complex64; W]> {
        let n_theta = self.n_theta;
        let dtheta = TAU / n_theta as f64;
        let kernel: Vec<(Complex64, [f64; W])> = (0..n_theta)
            .map(|j| {
                let th = j as f64 * dtheta;
                (Complex64::cis(-(k as f64) * th) * dtheta, weights.map(|f| f(th)))
            })
            .collect();
        exec.map(self.cells.len(), |c| {
            let mut acc = [Complex64::default(); W];
            for (j, (phase, wts)) in kernel.iter().enumerate() {
                if let Some((beta, alpha)) = self.influx[c * n_theta + j] {
                    let v = interpolate_influx(w, beta, alpha) * phase;
                    for (a, wt) in acc.iter_mut().zip(wts) {
                        *a += v * wt;
                    }
                }
            }
            acc
        })
    }
}

/// Approximate inverse bound to one metric and discretization.
pub struct Reconstructor {
    pub metric: MetricModel,
    pub cfg: ReconstructionConfig,
    pub influx_grid: InfluxGrid,
    template: ScalarGrid,
    table: Arc<BackprojectionTable>,
}

impl Reconstructor {
    pub fn new(metric: MetricModel, cfg: ReconstructionConfig) -> Result<Self> {
        cfg.validate()?;
        let influx_grid = make_influx_grid(cfg.n)?;
        let template = cartesian_grid(cfg.n, cfg.eps_mask)?;
        // The final differentiation needs u, v one cell beyond the mask.
        let cells: Vec<usize> = (0..cfg.n * cfg.n).filter(|&i| template.point(i).norm_sq() < 1.0).collect();
        let table = BackprojectionTable::build(&metric, &template, cells, cfg.n_theta, cfg.dt, cfg.exec);
        Ok(Self { metric, cfg, influx_grid, template, table: Arc::new(table) })
    }

    /// The same metric and discretization with another `k` or mode; the trace table is shared.
    pub fn retarget(&self, k: i32, mode: Mode) -> Self {
        Self {
            metric: self.metric,
            cfg: ReconstructionConfig { k, mode, ..self.cfg.clone() },
            influx_grid: self.influx_grid.clone(),
            template: self.template.clone(),
            table: Arc::clone(&self.table),
        }
    }

    pub fn table(&self) -> &BackprojectionTable {
        &self.table
    }

    /// An all-zero grid with the reconstruction geometry.
    pub fn empty_grid(&self) -> ScalarGrid {
        self.template.clone()
    }

    /// The forward operator matching the mode.
    pub fn forward(&self, f: &ScalarGrid) -> Sinogram {
        let c = &self.cfg;
        match c.mode {
            Mode::InvertIk => forward_ik(&self.metric, f, c.k, &self.influx_grid, c.dt, c.exec),
            Mode::InvertIkPerp => forward_ikperp(&self.metric, f, c.k, &self.influx_grid, c.dt, c.exec),
        }
    }

    /// `w = H_(k)` applied to the parity part of the data, restricted to the influx half.
    ///
    /// The parity part of the transport solution's boundary trace is half of the
    /// antipodal extension, hence the factor ½.
    pub fn hilbert_data(&self, data: &Sinogram) -> Sinogram {
        let mut ext = parity_extend(data, self.cfg.mode.data_parity(self.cfg.k));
        ext.values.iter_mut().for_each(|v| *v *= 0.5);
        restrict_to_influx(&shifted_hilbert(&ext, self.cfg.k, self.cfg.exec))
    }

    pub fn approx_inverse(&self, data: &Sinogram) -> Result<ScalarGrid> {
        if data.grid != self.influx_grid {
            return Err(Error::ShapeMismatch("data grid does not match the reconstruction grid".into()));
        }
        let w = self.hilbert_data(data);
        Ok(match self.cfg.mode {
            Mode::InvertIk => self.assemble_f(&w),
            Mode::InvertIkPerp => self.assemble_h(&w),
        })
    }

    fn assemble_h(&self, w: &Sinogram) -> ScalarGrid {
        let integrals = self.table.fiber_integrals(w, self.cfg.k, [|_| 1.0], self.cfg.exec);
        let mut out = self.template.clone();
        for (&cell, [v]) in self.table.cells.iter().zip(integrals) {
            if out.mask[cell] {
                out.values[cell] = -v / TAU;
            }
        }
        out
    }

    /// `(e^{−2λ}/2π)(−∂_x(e^λ v) + ∂_y(e^λ u)) − (ik e^{−λ}/2π)(u ∂_xλ + v ∂_yλ)`.
    fn assemble_f(&self, w: &Sinogram) -> ScalarGrid {
        let n = self.cfg.n;
        let integrals = self.table.fiber_integrals(w, self.cfg.k, [f64::cos, f64::sin], self.cfg.exec);
        // e^λ u and e^λ v on every tabulated cell.
        let mut eu = vec![None; n * n];
        let mut ev = vec![None; n * n];
        let mut u = vec![Complex64::default(); n * n];
        let mut v = vec![Complex64::default(); n * n];
        for (&cell, [cu, cv]) in self.table.cells.iter().zip(integrals) {
            let el = self.metric.lambda(self.template.point(cell)).exp();
            eu[cell] = Some(cu * el);
            ev[cell] = Some(cv * el);
            u[cell] = cu;
            v[cell] = cv;
        }
        let h = self.template.spacing();
        let ik = Complex64::new(0.0, self.cfg.k as f64);
        let mut out = self.template.clone();
        for cell in self.template.masked_indices() {
            let p = self.template.point(cell);
            let c = self.metric.conformal(p);
            let dx_ev = difference(&ev, cell, 1, cell % n, n, h);
            let dy_eu = difference(&eu, cell, n, cell / n, n, h);
            let e2 = c.exp_neg_lambda * c.exp_neg_lambda;
            out.values[cell] = (e2 * (-dx_ev + dy_eu) - ik * c.exp_neg_lambda * (u[cell] * c.grad.x + v[cell] * c.grad.y)) / TAU;
        }
        out
    }

    pub fn neumann(&self, data: &Sinogram, truth: Option<&ScalarGrid>) -> Result<(ScalarGrid, ErrorHistory)> {
        self.neumann_with(data, truth, |_, _| Ok(()))
    }

    /// [`Reconstructor::neumann`], calling `on_iterate(p, s_p)` after every iterate (1-based).
    pub fn neumann_with<F>(&self, data: &Sinogram, truth: Option<&ScalarGrid>, mut on_iterate: F) -> Result<(ScalarGrid, ErrorHistory)>
    where
        F: FnMut(usize, &ScalarGrid) -> Result<()>,
    {
        let b = self.approx_inverse(data)?;
        let b_norm = b.l2_norm();
        let mut history = ErrorHistory::default();
        let table_trapped = self.table.trapped_fraction();
        let record = |s: &ScalarGrid, update: f64, forward_missing: f64, history: &mut ErrorHistory| -> Result<()> {
            if let Some(t) = truth {
                history.rel_l2.push(relative_l2_error(s, t)?);
            }
            history.update_norms.push(update);
            history.trapped_fraction.push(table_trapped.max(forward_missing));
            log::info!(
                "iteration {}: rel_l2 = {:?}, update = {update:.3e}",
                history.update_norms.len(),
                history.rel_l2.last()
            );
            Ok(())
        };
        let data_missing = data.missing_count() as f64 / data.values.len() as f64;
        let mut s = b.clone();
        record(&s, b_norm, data_missing, &mut history)?;
        on_iterate(1, &s)?;
        for _ in 1..self.cfg.iters {
            let forward = self.forward(&s);
            let missing = forward.missing_count() as f64 / forward.values.len() as f64;
            let correction = self.approx_inverse(&forward)?;
            let mut next = b.clone();
            next.axpy(Complex64::new(1.0, 0.0), &s);
            next.axpy(Complex64::new(-1.0, 0.0), &correction);
            let mut delta = next.clone();
            delta.axpy(Complex64::new(-1.0, 0.0), &s);
            let update = delta.l2_norm();
            s = next;
            record(&s, update, missing, &mut history)?;
            on_iterate(history.update_norms.len(), &s)?;
            if let Some(tol) = self.cfg.early_stop {
                if b_norm > 0.0 && update / b_norm < tol {
                    break;
                }
            }
        }
        log::info!("imaginary residue of the reconstruction: {:.3e}", s.imaginary_residue());
        Ok((s, history))
    }
}

/// Centered difference along one axis (`stride` 1 for x, `n` for y), one-sided
/// where a neighbor is unavailable.
fn difference(field: &[Option<Complex64>], cell: usize, stride: usize, pos: usize, n: usize, h: f64) -> Complex64 {
    let lo = (pos > 0).then(|| field[cell - stride]).flatten();
    let hi = (pos + 1 < n).then(|| field[cell + stride]).flatten();
    let mid = field[cell];
    match (lo, mid, hi) {
        (Some(a), _, Some(b)) => (b - a) / (2.0 * h),
        (None, Some(m), Some(b)) => (b - m) / h,
        (Some(a), Some(m), None) => (m - a) / h,
        _ => Complex64::default(),
    }
}

/// `−(X_⊥ w_ψ)_k` read as a function on the grid: the approximate inverse for `I_k` data.
pub fn approx_inverse_f(m: &MetricModel, data: &Sinogram, cfg: &ReconstructionConfig) -> Result<ScalarGrid> {
    let cfg = ReconstructionConfig { mode: Mode::InvertIk, ..cfg.clone() };
    Reconstructor::new(*m, cfg)?.approx_inverse(data)
}

/// `−(w_ψ)_k` read as a function on the grid: the approximate inverse for `I_{k,⊥}` data.
pub fn approx_inverse_h(m: &MetricModel, data: &Sinogram, cfg: &ReconstructionConfig) -> Result<ScalarGrid> {
    let cfg = ReconstructionConfig { mode: Mode::InvertIkPerp, ..cfg.clone() };
    Reconstructor::new(*m, cfg)?.approx_inverse(data)
}

/// Runs `s_{p+1} = b + s_p − A I s_p` from `s_1 = b = A(data)`.
pub fn neumann_invert(
    m: &MetricModel,
    data: &Sinogram,
    cfg: &ReconstructionConfig,
    truth: Option<&ScalarGrid>,
) -> Result<(ScalarGrid, ErrorHistory)> {
    Reconstructor::new(*m, cfg.clone())?.neumann(data, truth)
}

/// `‖a − b‖ / ‖b‖` over the masked cells.
pub fn relative_l2_error(a: &ScalarGrid, b: &ScalarGrid) -> Result<f64> {
    if a.n != b.n || a.mask != b.mask {
        return Err(Error::ShapeMismatch(format!("grids differ (n = {} vs {})", a.n, b.n)));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for ((x, y), &m) in a.values.iter().zip(&b.values).zip(&b.mask) {
        if m {
            num += (x - y).norm_sqr();
            den += y.norm_sqr();
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::launch_state;
    use crate::grid::{make_phantom, Bump, PhantomSpec};
    use crate::hilbert::FiberFft;
    use approx::assert_abs_diff_eq;

    fn constant_sinogram(n: usize, c: Complex64) -> Sinogram {
        let mut s = Sinogram::zeros(&make_influx_grid(n).unwrap());
        s.values.iter_mut().for_each(|v| *v = c);
        s
    }

    #[test]
    fn relative_error_examples() {
        let b = ScalarGrid::from_fn(16, 0.1, |p| Complex64::new(1.0 + p.x, p.y)).unwrap();
        let zero = b.zeros_like();
        let mut twice = b.clone();
        twice.scale(Complex64::new(2.0, 0.0));
        assert_eq!(relative_l2_error(&b, &b).unwrap(), 0.0);
        assert_abs_diff_eq!(relative_l2_error(&zero, &b).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(relative_l2_error(&twice, &b).unwrap(), 1.0, epsilon = 1e-14);
        assert!(matches!(relative_l2_error(&b, &zero), Err(Error::ZeroReference)));
        let other = cartesian_grid(32, 0.1).unwrap();
        assert!(matches!(relative_l2_error(&other, &b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn constant_data_transports_to_constant() {
        let c = Complex64::new(0.7, -0.2);
        let w = constant_sinogram(16, c);
        for m in [MetricModel::Euclidean, MetricModel::lens(0.6).unwrap()] {
            for (x, th) in [(Point::new(0.1, 0.2), 0.3), (Point::new(-0.5, 0.4), 4.0)] {
                assert_abs_diff_eq!((transport_value(&m, &w, x, th, 1.0 / 64.0) - c).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn euclidean_transport_is_constant_along_lines() {
        // w depends only on the oriented line: its unit normal offset and direction.
        let grid = make_influx_grid(64).unwrap();
        let mut w = Sinogram::zeros(&grid);
        for (ib, &beta) in grid.betas.iter().enumerate() {
            for (ja, &alpha) in grid.alphas.iter().enumerate() {
                let s = launch_state(beta, alpha);
                let offset = s.x * -s.theta.sin() + s.y * s.theta.cos();
                w.values[ib * grid.n_alpha() + ja] = Complex64::new(offset * offset, 0.0);
            }
        }
        let theta: f64 = 0.8;
        let dir = Point::from_angle(theta);
        let base = Point::new(-0.3, 0.1);
        let expected = (base.x * -theta.sin() + base.y * theta.cos()).powi(2);
        for step in [-0.4, 0.0, 0.5] {
            let x = Point::new(base.x + step * dir.x, base.y + step * dir.y);
            assert_abs_diff_eq!(transport_value(&MetricModel::Euclidean, &w, x, theta, 1.0 / 128.0).re, expected, epsilon = 2e-3);
        }
    }

    #[test]
    fn centered_bump_transport_is_rotation_invariant_at_origin() {
        let n = 64;
        let spec = PhantomSpec { bumps: vec![Bump { center: Point::new(0.0, 0.0), amplitude: 1.0, width: 0.2 }], n, eps_mask: 4.0 / n as f64 };
        let f = make_phantom(&spec).unwrap();
        let data = forward_ik(&MetricModel::Euclidean, &f, 0, &make_influx_grid(n).unwrap(), 1.0 / n as f64, Exec::Parallel);
        let values: Vec<f64> = (0..16)
            .map(|j| transport_value(&MetricModel::Euclidean, &data, Point::new(0.0, 0.0), j as f64 * TAU / 16.0, 1.0 / n as f64).re)
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!(mean > 0.2);
        assert!(values.iter().all(|v| (v - mean).abs() < 1e-3 * mean), "{values:?}");
    }

    #[test]
    fn zero_data_reconstructs_zero() {
        let cfg = ReconstructionConfig::new(2, Mode::InvertIk, 16);
        let m = MetricModel::const_curv_pos(2.0).unwrap();
        let zero = Sinogram::zeros(&make_influx_grid(16).unwrap());
        assert_eq!(approx_inverse_f(&m, &zero, &cfg).unwrap().max_abs(), 0.0);
        assert_eq!(approx_inverse_h(&m, &zero, &cfg).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn parity_part_keeps_matching_fiber_modes() {
        // Band-limited fiber data with every mode present; the kept part has only
        // modes of the selected parity.
        let n = 32;
        let grid = make_influx_grid(n).unwrap();
        let mut data = Sinogram::zeros(&grid);
        for (ib, &beta) in grid.betas.iter().enumerate() {
            for (ja, &alpha) in grid.alphas.iter().enumerate() {
                let v: Complex64 = (-5..=5).map(|l| Complex64::cis(l as f64 * alpha) * (1.0 + 0.1 * l as f64 + 0.05 * beta)).sum();
                data.values[ib * grid.n_alpha() + ja] = v;
            }
        }
        let fft = FiberFft::new(2 * n);
        let plan = rustfft::FftPlanner::<f64>::new().plan_fft_forward(2 * n);
        for k in 0..4i32 {
            for mode in [Mode::InvertIk, Mode::InvertIkPerp] {
                let wanted = if mode == Mode::InvertIk { (k + 1).rem_euclid(2) } else { k.rem_euclid(2) };
                let ext = parity_extend(&data, mode.data_parity(k));
                let mut modes = ext.slice(3).to_vec();
                plan.process(&mut modes);
                for (bin, c) in modes.iter().enumerate() {
                    if fft.frequency(bin).rem_euclid(2) as i32 != wanted {
                        assert!(c.norm() < 1e-9, "k={k} {mode}: mode {} = {c}", fft.frequency(bin));
                    }
                }
            }
        }
    }

    #[test]
    fn euclidean_h_inverse_recovers_bump() {
        let n = 48;
        let spec = PhantomSpec { bumps: vec![Bump { center: Point::new(0.1, -0.15), amplitude: 1.0, width: 0.15 }], n, eps_mask: 4.0 / n as f64 };
        let h = make_phantom(&spec).unwrap();
        let cfg = ReconstructionConfig::new(3, Mode::InvertIkPerp, n);
        let r = Reconstructor::new(MetricModel::Euclidean, cfg).unwrap();
        let rec = r.approx_inverse(&r.forward(&h)).unwrap();
        assert!(relative_l2_error(&rec, &h).unwrap() < 0.1);
        let f_mode = r.retarget(3, Mode::InvertIk);
        let rec_f = f_mode.approx_inverse(&f_mode.forward(&h)).unwrap();
        assert!(relative_l2_error(&rec_f, &h).unwrap() < 0.1);
    }

    #[test]
    fn neumann_history_has_one_entry_per_iteration() {
        let n = 24;
        let f = make_phantom(&PhantomSpec::default_for(n)).unwrap();
        let mut cfg = ReconstructionConfig::new(1, Mode::InvertIk, n);
        cfg.iters = 3;
        let m = MetricModel::const_curv_pos(2.0).unwrap();
        let r = Reconstructor::new(m, cfg.clone()).unwrap();
        let (_, hist) = r.neumann(&r.forward(&f), Some(&f)).unwrap();
        assert_eq!(hist.rel_l2.len(), 3);
        assert_eq!(hist.update_norms.len(), 3);
        assert_eq!(hist.trapped_fraction.len(), 3);
        let (_, no_truth) = neumann_invert(&m, &r.forward(&f), &cfg, None).unwrap();
        assert!(no_truth.rel_l2.is_empty());
        cfg.iters = 0;
        assert!(Reconstructor::new(m, cfg).is_err());
    }
}
