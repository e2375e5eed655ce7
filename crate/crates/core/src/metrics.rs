//! Closed-form isothermal metrics `g = e^{2λ}(dx² + dy²)` on the unit disc.
//!
//! Every family exposes the conformal exponent `λ`, its gradient and the
//! Gaussian curvature `κ = −e^{−2λ}Δλ`, all in closed form. Points outside the
//! closed disc evaluate the same expressions.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Unit vector at angle `theta`.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }
}

pub const LENS_DEFAULT_SIGMA: f64 = 0.25;
pub const LENS_DEFAULT_CENTER: Point = Point::new(0.2, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricModel {
    Euclidean,
    /// `g = 4R⁴ / (r² + R²)²`, curvature `+1/R²`.
    ConstCurvPos { radius: f64 },
    /// `g = 4R⁴ / (r² − R²)²`, curvature `−1/R²`.
    ConstCurvNeg { radius: f64 },
    /// `g = exp(ℓ exp(−|p − c|² / 2σ²))`.
    Lens { strength: f64, sigma: f64, center: Point },
}

/// `e^{−λ}` and `∇λ` at one point: everything the geodesic flow needs.
#[derive(Clone, Copy, Debug)]
pub struct Conformal {
    pub exp_neg_lambda: f64,
    pub grad: Point,
}

impl MetricModel {
    pub fn const_curv_pos(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self::ConstCurvPos { radius })
    }

    pub fn const_curv_neg(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self::ConstCurvNeg { radius })
    }

    pub fn lens(strength: f64) -> Result<Self> {
        Self::lens_with(strength, LENS_DEFAULT_SIGMA, LENS_DEFAULT_CENTER)
    }

    pub fn lens_with(strength: f64, sigma: f64, center: Point) -> Result<Self> {
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::InvalidParameter(format!("lens strength must be >= 0, got {strength}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("lens sigma must be > 0, got {sigma}")));
        }
        Ok(Self::Lens { strength, sigma, center })
    }

    pub fn lambda(&self, p: Point) -> f64 {
        match *self {
            Self::Euclidean => 0.0,
            Self::ConstCurvPos { radius } => {
                let r2 = radius * radius;
                (2.0 * r2).ln() - (p.norm_sq() + r2).ln()
            }
            Self::ConstCurvNeg { radius } => {
                let r2 = radius * radius;
                (2.0 * r2).ln() - (r2 - p.norm_sq()).abs().ln()
            }
            Self::Lens { strength, sigma, center } => 0.5 * strength * gaussian(p, center, sigma),
        }
    }

    pub fn grad_lambda(&self, p: Point) -> Point {
        self.conformal(p).grad
    }

    /// `e^{−λ}` and `∇λ` together, sharing the transcendental evaluations.
    pub fn conformal(&self, p: Point) -> Conformal {
        match *self {
            Self::Euclidean => Conformal { exp_neg_lambda: 1.0, grad: Point::default() },
            Self::ConstCurvPos { radius } => {
                let r2 = radius * radius;
                let s = p.norm_sq() + r2;
                Conformal {
                    exp_neg_lambda: s / (2.0 * r2),
                    grad: Point::new(-2.0 * p.x / s, -2.0 * p.y / s),
                }
            }
            Self::ConstCurvNeg { radius } => {
                let r2 = radius * radius;
                let s = r2 - p.norm_sq();
                Conformal {
                    exp_neg_lambda: s.abs() / (2.0 * r2),
                    grad: Point::new(2.0 * p.x / s, 2.0 * p.y / s),
                }
            }
            Self::Lens { strength, sigma, center } => {
                let g = gaussian(p, center, sigma);
                let c = -0.5 * strength * g / (sigma * sigma);
                Conformal {
                    exp_neg_lambda: (-0.5 * strength * g).exp(),
                    grad: Point::new(c * (p.x - center.x), c * (p.y - center.y)),
                }
            }
        }
    }

    /// Gaussian curvature `−e^{−2λ}Δλ`.
    pub fn curvature(&self, p: Point) -> f64 {
        match *self {
            Self::Euclidean => 0.0,
            Self::ConstCurvPos { radius } => 1.0 / (radius * radius),
            Self::ConstCurvNeg { radius } => -1.0 / (radius * radius),
            Self::Lens { strength, sigma, center } => {
                let g = gaussian(p, center, sigma);
                let s2 = sigma * sigma;
                let d2 = (p.x - center.x).powi(2) + (p.y - center.y).powi(2);
                let laplacian = 0.5 * strength * g * (d2 / (s2 * s2) - 2.0 / s2);
                -(-strength * g).exp() * laplacian
            }
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 1.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("constant-curvature radius must exceed 1, got {radius}")))
    }
}

fn gaussian(p: Point, c: Point, sigma: f64) -> f64 {
    let d2 = (p.x - c.x).powi(2) + (p.y - c.y).powi(2);
    (-d2 / (2.0 * sigma * sigma)).exp()
}

impl fmt::Display for MetricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Euclidean => write!(f, "euclidean"),
            Self::ConstCurvPos { radius } => write!(f, "cpc:{radius}"),
            Self::ConstCurvNeg { radius } => write!(f, "cnc:{radius}"),
            Self::Lens { strength, .. } => write!(f, "lens:{strength}"),
        }
    }
}

/// Parses `euclidean`, `cpc:R`, `cnc:R` or `lens:ℓ` (default lens σ and center).
impl FromStr for MetricModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("euclidean") {
            return Ok(Self::Euclidean);
        }
        let (name, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown metric '{s}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad metric parameter in '{s}'")))?;
        match name.trim().to_ascii_lowercase().as_str() {
            "cpc" => Self::const_curv_pos(value),
            "cnc" => Self::const_curv_neg(value),
            "lens" => Self::lens(value),
            _ => Err(Error::Parse(format!("unknown metric '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn families() -> Vec<MetricModel> {
        vec![
            MetricModel::Euclidean,
            MetricModel::const_curv_pos(2.0).unwrap(),
            MetricModel::const_curv_pos(1.2).unwrap(),
            MetricModel::const_curv_neg(1.2).unwrap(),
            MetricModel::const_curv_neg(2.0).unwrap(),
            MetricModel::lens(0.3).unwrap(),
            MetricModel::lens(1.2).unwrap(),
        ]
    }

    fn interior_points() -> Vec<Point> {
        let mut pts = Vec::new();
        for i in 0..12 {
            for j in 0..12 {
                let p = Point::new(-0.9 + 1.8 * i as f64 / 11.0, -0.9 + 1.8 * j as f64 / 11.0);
                if p.norm_sq() < 0.9 {
                    pts.push(p);
                }
            }
        }
        pts
    }

    #[test]
    fn lambda_examples() {
        let p = Point::new(0.3, -0.4);
        assert_eq!(MetricModel::Euclidean.lambda(p), 0.0);
        let cpc = MetricModel::const_curv_pos(2.0).unwrap();
        assert_relative_eq!(cpc.lambda(Point::default()), 0.5 * 4f64.ln(), epsilon = 1e-15);
        assert_eq!(MetricModel::lens(0.0).unwrap().lambda(p), 0.0);
    }

    #[test]
    fn gradient_examples() {
        let p = Point::new(0.3, -0.4);
        assert_eq!(MetricModel::Euclidean.grad_lambda(p), Point::default());
        let g = MetricModel::const_curv_pos(1.6).unwrap().grad_lambda(Point::default());
        assert_eq!(g.x.abs() + g.y.abs(), 0.0);
        let g = MetricModel::lens(1.2).unwrap().grad_lambda(LENS_DEFAULT_CENTER);
        assert_eq!(g.x.abs() + g.y.abs(), 0.0);
    }

    #[test]
    fn curvature_examples() {
        let p = Point::new(0.5, 0.1);
        assert_eq!(MetricModel::const_curv_pos(2.0).unwrap().curvature(p), 0.25);
        assert_relative_eq!(
            MetricModel::const_curv_neg(1.2).unwrap().curvature(p),
            -1.0 / 1.44,
            epsilon = 1e-15
        );
        assert_eq!(MetricModel::Euclidean.curvature(p), 0.0);
    }

    #[test]
    fn exp_neg_lambda_is_consistent() {
        for m in families() {
            for p in interior_points() {
                assert_relative_eq!(m.conformal(p).exp_neg_lambda, (-m.lambda(p)).exp(), max_relative = 1e-13);
            }
        }
    }

    fn max_residuals(m: &MetricModel, h: f64) -> (f64, f64) {
        let mut grad_res: f64 = 0.0;
        let mut curv_res: f64 = 0.0;
        for p in interior_points() {
            let l = |dx: f64, dy: f64| m.lambda(Point::new(p.x + dx, p.y + dy));
            let gx = (l(h, 0.0) - l(-h, 0.0)) / (2.0 * h);
            let gy = (l(0.0, h) - l(0.0, -h)) / (2.0 * h);
            let g = m.grad_lambda(p);
            grad_res = grad_res.max((g.x - gx).abs()).max((g.y - gy).abs());
            let lap = (l(h, 0.0) + l(-h, 0.0) + l(0.0, h) + l(0.0, -h) - 4.0 * l(0.0, 0.0)) / (h * h);
            let kappa = -(-2.0 * m.lambda(p)).exp() * lap;
            curv_res = curv_res.max((m.curvature(p) - kappa).abs());
        }
        (grad_res, curv_res)
    }

    #[test]
    fn closed_forms_match_finite_differences_at_second_order() {
        for m in families() {
            let (g1, c1) = max_residuals(&m, 2e-3);
            let (g2, c2) = max_residuals(&m, 1e-3);
            assert!(c1 < 1e-3 && g1 < 1e-3, "{m}: residuals {g1} {c1}");
            // Halving h must divide the residual by ~4 unless it is already at round-off level.
            if c1 > 1e-8 {
                assert!(c1 / c2 > 3.0, "{m}: curvature residual ratio {}", c1 / c2);
            }
            if g1 > 1e-9 {
                assert!(g1 / g2 > 3.0, "{m}: gradient residual ratio {}", g1 / g2);
            }
        }
    }

    #[test]
    fn constant_curvature_is_constant() {
        for m in [MetricModel::const_curv_pos(1.6).unwrap(), MetricModel::const_curv_neg(1.6).unwrap()] {
            let k0 = m.curvature(Point::default());
            for p in interior_points() {
                assert_eq!(m.curvature(p), k0);
            }
        }
    }

    #[test]
    fn parse_and_display() {
        for s in ["euclidean", "cpc:2", "cnc:1.2", "lens:0.3"] {
            let m: MetricModel = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("cpc:1.0".parse::<MetricModel>().is_err());
        assert!("cnc:0.5".parse::<MetricModel>().is_err());
        assert!("lens:-1".parse::<MetricModel>().is_err());
        assert!("sphere:2".parse::<MetricModel>().is_err());
        assert!("cpc".parse::<MetricModel>().is_err());
    }
}
