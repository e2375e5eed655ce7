//! Cell-centered Cartesian grids over `[−1, 1]²` and Gaussian-bump phantoms.

use crate::error::{Error, Result};
use crate::metrics::{MetricModel, Point};
use num_complex::Complex64;

/// Complex field on the `n × n` cell-centered grid, row-major with `y` as the row.
///
/// Values outside `mask` are kept at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGrid {
    pub n: usize,
    pub values: Vec<Complex64>,
    pub mask: Vec<bool>,
    pub eps_mask: f64,
}

pub fn cartesian_grid(n: usize, eps_mask: f64) -> Result<ScalarGrid> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("grid needs n >= 8, got {n}")));
    }
    if !(0.0..1.0).contains(&eps_mask) {
        return Err(Error::InvalidParameter(format!("mask margin must lie in [0, 1), got {eps_mask}")));
    }
    let rmax2 = (1.0 - eps_mask).powi(2);
    let h = 2.0 / n as f64;
    let coord = |i: usize| -1.0 + (i as f64 + 0.5) * h;
    let mask = (0..n * n)
        .map(|idx| {
            let (x, y) = (coord(idx % n), coord(idx / n));
            x * x + y * y <= rmax2
        })
        .collect();
    Ok(ScalarGrid { n, values: vec![Complex64::default(); n * n], mask, eps_mask })
}

impl ScalarGrid {
    pub fn spacing(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * self.spacing()
    }

    /// Center of cell `idx = iy·n + ix`.
    pub fn point(&self, idx: usize) -> Point {
        Point::new(self.coord(idx % self.n), self.coord(idx / self.n))
    }

    /// An all-zero grid with the same geometry.
    pub fn zeros_like(&self) -> Self {
        Self { values: vec![Complex64::default(); self.values.len()], ..self.clone() }
    }

    /// Samples `f` at the masked cell centers.
    pub fn from_fn<F: Fn(Point) -> Complex64>(n: usize, eps_mask: f64, f: F) -> Result<Self> {
        let mut g = cartesian_grid(n, eps_mask)?;
        for idx in 0..n * n {
            if g.mask[idx] {
                g.values[idx] = f(g.point(idx));
            }
        }
        Ok(g)
    }

    pub fn apply_mask(&mut self) {
        for (v, &m) in self.values.iter_mut().zip(&self.mask) {
            if !m {
                *v = Complex64::default();
            }
        }
    }

    pub fn masked_indices(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.mask[i]).collect()
    }

    /// Bilinear interpolation at `p`, treating everything beyond the grid as zero.
    #[inline]
    pub fn interpolate(&self, p: Point) -> Complex64 {
        let n = self.n;
        let inv_h = n as f64 * 0.5;
        let u = (p.x + 1.0) * inv_h - 0.5;
        let v = (p.y + 1.0) * inv_h - 0.5;
        let (i0, j0) = (u.floor(), v.floor());
        let (fu, fv) = (u - i0, v - j0);
        let (i0, j0) = (i0 as isize, j0 as isize);
        let at = |i: isize, j: isize| {
            if i < 0 || j < 0 || i >= n as isize || j >= n as isize {
                Complex64::default()
            } else {
                self.values[j as usize * n + i as usize]
            }
        };
        (at(i0, j0) * (1.0 - fu) + at(i0 + 1, j0) * fu) * (1.0 - fv)
            + (at(i0, j0 + 1) * (1.0 - fu) + at(i0 + 1, j0 + 1) * fu) * fv
    }

    /// Euclidean `ℓ²` norm over masked cells, scaled by the cell area.
    pub fn l2_norm(&self) -> f64 {
        let h2 = self.spacing().powi(2);
        self.values
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
            * h2.sqrt()
    }

    /// `Σ a · conj(b) · e^{2λ} h²`: the Riemannian `L²(M)` inner product.
    pub fn inner_weighted(&self, other: &Self, metric: &MetricModel) -> Complex64 {
        let h2 = self.spacing().powi(2);
        let mut acc = Complex64::default();
        for idx in 0..self.values.len() {
            if self.mask[idx] {
                let w = (2.0 * metric.lambda(self.point(idx))).exp() * h2;
                acc += self.values[idx] * other.values[idx].conj() * w;
            }
        }
        acc
    }

    pub fn scale(&mut self, s: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: Complex64, other: &Self) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|Im|` relative to the largest modulus: residue of a real reconstruction.
    pub fn imaginary_residue(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / m
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    pub center: Point,
    pub amplitude: f64,
    pub width: f64,
}

impl Bump {
    pub fn eval(&self, p: Point) -> f64 {
        let d2 = (p.x - self.center.x).powi(2) + (p.y - self.center.y).powi(2);
        self.amplitude * (-d2 / (2.0 * self.width * self.width)).exp()
    }

    /// `∇` of [`Bump::eval`].
    pub fn grad(&self, p: Point) -> Point {
        let v = self.eval(p);
        let s = -v / (self.width * self.width);
        Point::new(s * (p.x - self.center.x), s * (p.y - self.center.y))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSpec {
    pub bumps: Vec<Bump>,
    pub n: usize,
    pub eps_mask: f64,
}

impl PhantomSpec {
    /// Three separated bumps, the phantom used by the experiments.
    pub fn default_for(n: usize) -> Self {
        let bump = |x, y, amplitude| Bump { center: Point::new(x, y), amplitude, width: 0.12 };
        Self {
            bumps: vec![bump(-0.3, 0.25, 1.0), bump(0.25, 0.3, 0.8), bump(0.1, -0.35, 0.9)],
            n,
            eps_mask: 2.0 * 2.0 / n as f64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, b) in self.bumps.iter().enumerate() {
            if !(b.width > 0.0) {
                return Err(Error::InvalidParameter(format!("bump {i}: width must be positive")));
            }
            if b.center.norm_sq().sqrt() > 1.0 - 3.0 * b.width {
                return Err(Error::InvalidParameter(format!(
                    "bump {i}: center must lie within radius 1 - 3*width"
                )));
            }
        }
        Ok(())
    }

    /// Unmasked closed form `Σ Aᵢ exp(−|p − cᵢ|²/2wᵢ²)`.
    pub fn eval(&self, p: Point) -> f64 {
        self.bumps.iter().map(|b| b.eval(p)).sum()
    }

    pub fn grad(&self, p: Point) -> Point {
        self.bumps.iter().fold(Point::default(), |acc, b| {
            let g = b.grad(p);
            Point::new(acc.x + g.x, acc.y + g.y)
        })
    }
}

pub fn make_phantom(spec: &PhantomSpec) -> Result<ScalarGrid> {
    spec.validate()?;
    ScalarGrid::from_fn(spec.n, spec.eps_mask, |p| Complex64::new(spec.eval(p), 0.0))
}
