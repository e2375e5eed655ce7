//! Antipodal extension of influx data and the shifted fiberwise Hilbert transform.
//!
//! At boundary angle `β` the fiber angle is `θ = β + π + α`, so the Fourier
//! modes of a fiber in `θ` and in `α` coincide up to a per-slice phase. The
//! shifted transform `H_(k)` multiplies mode `l` by `−i·sgn(l − k)`, `sgn(0) = 0`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::exec::Exec;
use crate::geodesics::InfluxGrid;
use crate::transforms::Sinogram;

/// Symmetry under the antipodal map `α ↦ α + π`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Parity of the integer `k`.
    pub fn of(k: i32) -> Self {
        if k.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Influx data extended to the full fiber circle: `2n` samples per `β`-slice
/// at `α_j = −π/2 + (j + ½)π/n`, `j < 2n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedFiberData {
    pub grid: InfluxGrid,
    pub values: Vec<Complex64>,
    pub parity: Parity,
}

impl ExtendedFiberData {
    pub fn fiber_len(&self) -> usize {
        2 * self.grid.n_alpha()
    }

    pub fn alpha(&self, j: usize) -> f64 {
        -FRAC_PI_2 + (j as f64 + 0.5) * PI / self.grid.n_alpha() as f64
    }

    pub fn slice(&self, ib: usize) -> &[Complex64] {
        let len = self.fiber_len();
        &self.values[ib * len..(ib + 1) * len]
    }
}

/// Forward/inverse FFT pair for fibers of one length.
pub struct FiberFft {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FiberFft {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    /// Signed frequency of DFT bin `m`, in `{−len/2, …, len/2 − 1}`.
    pub fn frequency(&self, m: usize) -> i64 {
        if m < self.len.div_ceil(2) {
            m as i64
        } else {
            m as i64 - self.len as i64
        }
    }

    /// Multiplies every Fourier mode `l` of the equispaced periodic samples by `multiplier(l)`.
    pub fn apply_multiplier<M: Fn(i64) -> Complex64>(&self, fiber: &mut [Complex64], multiplier: M) {
        debug_assert_eq!(fiber.len(), self.len);
        self.forward.process(fiber);
        let scale = 1.0 / self.len as f64;
        for (m, v) in fiber.iter_mut().enumerate() {
            *v *= multiplier(self.frequency(m)) * scale;
        }
        self.inverse.process(fiber);
    }

    /// `H_(k)` on one fiber sampled over a full period.
    pub fn shifted_hilbert(&self, fiber: &mut [Complex64], k: i32) {
        self.apply_multiplier(fiber, |l| hilbert_multiplier(l - k as i64));
    }

    /// Spectral `∂_θ` of samples at spacing `2π/len`.
    pub fn derivative(&self, fiber: &mut [Complex64]) {
        let nyquist = (self.len % 2 == 0).then_some(-(self.len as i64) / 2);
        self.apply_multiplier(fiber, |l| if Some(l) == nyquist { Complex64::default() } else { Complex64::new(0.0, l as f64) });
    }
}

/// `−i·sgn(l)`, with `sgn(0) = 0`.
pub fn hilbert_multiplier(l: i64) -> Complex64 {
    Complex64::new(0.0, -(l.signum() as f64))
}

/// Extends each slice to the full circle with `values(β, α + π) = ±values(β, α)`.
/// Missing rays enter as zero.
pub fn parity_extend(s: &Sinogram, parity: Parity) -> ExtendedFiberData {
    let (nb, na) = (s.grid.n_beta(), s.grid.n_alpha());
    let sign = parity.sign();
    let mut values = Vec::with_capacity(nb * 2 * na);
    for ib in 0..nb {
        let row = ib * na;
        let slice = (0..na).map(|j| if s.missing[row + j] { Complex64::default() } else { s.values[row + j] });
        let influx: Vec<Complex64> = slice.collect();
        values.extend_from_slice(&influx);
        values.extend(influx.iter().map(|v| v * sign));
    }
    let missing = s.missing_count();
    if missing > 0 {
        log::info!("parity extension: {:.3}% of rays missing", 100.0 * missing as f64 / s.values.len() as f64);
    }
    ExtendedFiberData { grid: s.grid.clone(), values, parity }
}

/// `H_(k)` applied slice by slice, multiplying `α`-mode `l` by `−i·sgn(l − k)`.
pub fn shifted_hilbert(e: &ExtendedFiberData, k: i32, exec: Exec) -> ExtendedFiberData {
    let len = e.fiber_len();
    let fft = FiberFft::new(len);
    let mut out = e.clone();
    exec.for_each_chunk(&mut out.values, len, |_, fiber| fft.shifted_hilbert(fiber, k));
    out
}

/// The same operator computed as `e^{ikα} H (e^{−ikα} ·)`.
///
/// Agrees with [`shifted_hilbert`] on fibers whose modes satisfy `|l − k| < n`.
pub fn shifted_hilbert_conjugated(e: &ExtendedFiberData, k: i32) -> ExtendedFiberData {
    let len = e.fiber_len();
    let fft = FiberFft::new(len);
    let phases: Vec<Complex64> = (0..len).map(|j| Complex64::cis(k as f64 * e.alpha(j))).collect();
    let mut out = e.clone();
    for fiber in out.values.chunks_mut(len) {
        fiber.iter_mut().zip(&phases).for_each(|(v, p)| *v *= p.conj());
        fft.apply_multiplier(fiber, hilbert_multiplier);
        fiber.iter_mut().zip(&phases).for_each(|(v, p)| *v *= p);
    }
    out
}

/// The influx half `α ∈ (−π/2, π/2)` of every slice.
pub fn restrict_to_influx(e: &ExtendedFiberData) -> Sinogram {
    let na = e.grid.n_alpha();
    let mut s = Sinogram::zeros(&e.grid);
    for ib in 0..e.grid.n_beta() {
        s.values[ib * na..(ib + 1) * na].copy_from_slice(&e.slice(ib)[..na]);
    }
    s
}
