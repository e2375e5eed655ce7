//! Unit-speed geodesics of `e^{2λ}(dx² + dy²)` in the unit disc.
//!
//! The flow is `ẋ = e^{−λ} θ̂`, `θ̇ = e^{−λ} θ̂^⊥·∇λ` with `θ̂^⊥ = (−sin θ, cos θ)`,
//! marched with classical RK4 until the first state with `x² + y² ≥ 1`. The
//! boundary crossing is then located on the segment joining the last interior
//! state to the first exterior one.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use crate::error::{Error, Result};
use crate::metrics::{MetricModel, Point};

/// Phase-space sample `(x, y, θ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl State {
    pub fn new(p: Point, theta: f64) -> Self {
        Self { x: p.x, y: p.y, theta }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }

    fn r2(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Where a geodesic leaves the disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exit {
    pub point: Point,
    /// Direction angle at the crossing.
    pub theta: f64,
    /// Exit time `τ`.
    pub tau: f64,
    /// Position of the crossing between the last interior and first exterior sample, in `[0, 1]`.
    pub fraction: f64,
    /// Boundary angle of the crossing, in `[0, 2π)`.
    pub beta: f64,
    /// Angle of the outgoing direction relative to the outer normal, in `(−π, π]`.
    /// For the reversed geodesic this is the fan-beam angle of its influx point.
    pub alpha: f64,
}

#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub dt: f64,
    /// `states[..exit_index]` lie inside the disc; `states[exit_index]`, when
    /// present, is the first sample outside.
    pub states: Vec<State>,
    pub exit_index: usize,
    pub exit: Exit,
}

impl GeodesicPath {
    /// Quadrature nodes with left-endpoint weights; the last interior node carries
    /// the partial cell up to the refined crossing.
    pub fn samples(&self) -> impl Iterator<Item = (State, f64)> + '_ {
        let m = self.exit_index;
        let (dt, frac) = (self.dt, self.exit.fraction);
        self.states[..m]
            .iter()
            .enumerate()
            .map(move |(p, s)| (*s, if p + 1 == m { frac * dt } else { dt }))
    }

    pub fn tau(&self) -> f64 {
        self.exit.tau
    }

    /// Dumps the path as `t,x,y,theta` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,theta")?;
        for (p, s) in self.states.iter().enumerate() {
            writeln!(w, "{},{},{},{}", p as f64 * self.dt, s.x, s.y, s.theta)?;
        }
        Ok(())
    }
}

/// The `2n × n` fan-beam discretization of the influx boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluxGrid {
    pub n: usize,
    /// `2n` boundary angles `iπ/n`.
    pub betas: Vec<f64>,
    /// `n` interior shot angles `−π/2 + (j + ½)π/n`.
    pub alphas: Vec<f64>,
}

impl InfluxGrid {
    pub fn n_beta(&self) -> usize {
        self.betas.len()
    }

    pub fn n_alpha(&self) -> usize {
        self.alphas.len()
    }

    pub fn d_beta(&self) -> f64 {
        PI / self.n as f64
    }

    pub fn d_alpha(&self) -> f64 {
        PI / self.n as f64
    }
}

pub fn make_influx_grid(n: usize) -> Result<InfluxGrid> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("influx grid needs n >= 8, got {n}")));
    }
    let h = PI / n as f64;
    Ok(InfluxGrid {
        n,
        betas: (0..2 * n).map(|i| i as f64 * h).collect(),
        alphas: (0..n).map(|j| -FRAC_PI_2 + (j as f64 + 0.5) * h).collect(),
    })
}

/// Default step budget `⌈20/dt⌉`.
pub fn default_max_steps(dt: f64) -> usize {
    (20.0 / dt).ceil() as usize
}

/// Initial state of the geodesic shot from boundary angle `beta` at fan angle `alpha`.
pub fn launch_state(beta: f64, alpha: f64) -> State {
    State { x: beta.cos(), y: beta.sin(), theta: beta + PI + alpha }
}

#[inline]
fn velocity(m: &MetricModel, s: &State) -> (f64, f64, f64) {
    let c = m.conformal(Point::new(s.x, s.y));
    let (sin, cos) = s.theta.sin_cos();
    let e = c.exp_neg_lambda;
    (e * cos, e * sin, e * (-sin * c.grad.x + cos * c.grad.y))
}

/// One classical Runge-Kutta step of the geodesic flow.
#[inline]
pub fn rk4_step(m: &MetricModel, s: &State, dt: f64) -> State {
    let shift = |k: (f64, f64, f64), h: f64| State { x: s.x + h * k.0, y: s.y + h * k.1, theta: s.theta + h * k.2 };
    let k1 = velocity(m, s);
    let k2 = velocity(m, &shift(k1, 0.5 * dt));
    let k3 = velocity(m, &shift(k2, 0.5 * dt));
    let k4 = velocity(m, &shift(k3, dt));
    State {
        x: s.x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y: s.y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        theta: s.theta + dt / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2),
    }
}

/// Marches from `start`, calling `visit(p, state)` for every interior sample
/// (`p = 0` is `start` itself and is never exit-tested).
pub fn march<F>(m: &MetricModel, start: State, dt: f64, max_steps: usize, mut visit: F) -> Result<(usize, Exit)>
where
    F: FnMut(usize, &State),
{
    let mut prev = start;
    visit(0, &prev);
    for p in 1..=max_steps {
        let next = rk4_step(m, &prev, dt);
        if next.r2() >= 1.0 {
            return Ok((p, crossing(&prev, &next, p, dt)));
        }
        visit(p, &next);
        prev = next;
    }
    Err(Error::TrappedRay { steps: max_steps })
}

fn crossing(inside: &State, outside: &State, exit_index: usize, dt: f64) -> Exit {
    let (dx, dy) = (outside.x - inside.x, outside.y - inside.y);
    let a = dx * dx + dy * dy;
    let b = 2.0 * (inside.x * dx + inside.y * dy);
    let c = inside.r2() - 1.0;
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let fraction = if a > 0.0 { ((-b + disc.sqrt()) / (2.0 * a)).clamp(0.0, 1.0) } else { 0.0 };
    let point = Point::new(inside.x + fraction * dx, inside.y + fraction * dy);
    let theta = inside.theta + fraction * (outside.theta - inside.theta);
    let beta = point.y.atan2(point.x).rem_euclid(TAU);
    Exit {
        point,
        theta,
        tau: ((exit_index - 1) as f64 + fraction) * dt,
        fraction,
        beta,
        alpha: wrap_angle(theta - beta),
    }
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Traces the geodesic from `(x0, θ0)` until it leaves the disc.
///
/// A boundary launch tangent to the circle (`|α| ≥ π/2`) yields an empty path with `τ = 0`.
pub fn trace_forward(m: &MetricModel, x0: Point, theta0: f64, dt: f64, max_steps: usize) -> Result<GeodesicPath> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let start = State::new(x0, theta0);
    let r2 = x0.norm_sq();
    if r2 > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter("launch point outside the closed disc".into()));
    }
    if r2 >= 1.0 - 1e-12 {
        let beta = x0.y.atan2(x0.x);
        let alpha = wrap_angle(theta0 - beta - PI);
        if alpha.abs() >= FRAC_PI_2 {
            let exit = Exit {
                point: x0,
                theta: theta0,
                tau: 0.0,
                fraction: 0.0,
                beta: beta.rem_euclid(TAU),
                alpha: wrap_angle(theta0 - beta),
            };
            return Ok(GeodesicPath { dt, states: vec![start], exit_index: 0, exit });
        }
    }
    let mut states = Vec::with_capacity((4.0 / dt) as usize);
    let (exit_index, exit) = march(m, start, dt, max_steps, |_, s| states.push(*s))?;
    let last = *states.last().expect("march visits the start");
    states.push(rk4_step(m, &last, dt));
    Ok(GeodesicPath { dt, states, exit_index, exit })
}

/// Fan-beam coordinates `(β, α)` of the influx point of the geodesic through `(x, θ)`.
pub fn trace_backward_to_influx(m: &MetricModel, x: Point, theta: f64, dt: f64, max_steps: usize) -> Result<(f64, f64)> {
    if x.norm_sq() >= 1.0 {
        return Err(Error::InvalidParameter("backward trace needs an interior point".into()));
    }
    let (_, exit) = march(m, State::new(x, theta + PI), dt, max_steps, |_, _| {})?;
    Ok((exit.beta, exit.alpha))
}
