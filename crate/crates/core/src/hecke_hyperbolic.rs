//! Upper half-plane geometry for the Teichmuller disc: the Hecke group,
//! reduction to its fundamental domain, boundary points of directions,
//! and angles between directions at a point of the disc.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flat_core::V2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UHPoint {
    pub x: f64,
    pub y: f64,
}

impl UHPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() || y <= 0.0 {
            return Err(Error::NotUpperHalfPlane(y));
        }
        Ok(UHPoint { x, y })
    }

    pub fn i() -> Self {
        UHPoint { x: 0.0, y: 1.0 }
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn from_complex(z: Complex64) -> Self {
        UHPoint { x: z.re, y: z.im }
    }
}

/// The corner `cos(pi/n) + i sin(pi/n)` of the fundamental domain, where
/// the double n-gon sits.
pub fn x0(n: usize) -> UHPoint {
    let a = PI / n as f64;
    UHPoint { x: a.cos(), y: a.sin() }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    fn close_to(&self, other: &BoundaryPoint) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryGeodesic {
    pub p: BoundaryPoint,
    pub q: BoundaryPoint,
}

impl BoundaryGeodesic {
    pub fn new(p: BoundaryPoint, q: BoundaryPoint) -> Result<Self> {
        if p.close_to(&q) {
            return Err(Error::SameDirection);
        }
        Ok(BoundaryGeodesic { p, q })
    }
}

/// Boundary point of a direction `[x : y]`: the opposite of its co-slope.
pub fn psi(d: &V2) -> BoundaryPoint {
    if d.y.abs() <= 1e-15 * d.x.abs() {
        BoundaryPoint::Infinity
    } else {
        BoundaryPoint::Finite(-d.x / d.y)
    }
}

/// A direction whose boundary point is `p`.
pub fn psi_inverse(p: BoundaryPoint) -> V2 {
    match p {
        BoundaryPoint::Infinity => V2::new(1.0, 0.0),
        BoundaryPoint::Finite(t) => V2::new(-t, 1.0),
    }
}

/// Disc point of the surface `M S0`: the ratio of the images of the two
/// basis vectors, read as complex numbers. Rotations and positive scalars
/// on the left leave it unchanged.
pub fn chi(m: &Matrix2<f64>) -> Result<UHPoint> {
    let det = m.determinant();
    if det.is_nan() || det <= 0.0 {
        return Err(Error::BadMatrix(det));
    }
    let first = Complex64::new(m[(0, 0)], m[(1, 0)]);
    let second = Complex64::new(m[(0, 1)], m[(1, 1)]);
    Ok(UHPoint::from_complex(second / first))
}

/// Determinant-one upper-triangular matrix with `chi(M) = X`.
pub fn m_x(x: &UHPoint) -> Matrix2<f64> {
    let s = x.y.sqrt();
    Matrix2::new(1.0 / s, x.x / s, 0.0, x.y / s)
}

/// Sine of the unoriented angle between the directions with boundary
/// points `p` and `q`, on the surface at `x`.
pub fn sin_theta_boundary(x: &UHPoint, p: BoundaryPoint, q: BoundaryPoint) -> Result<f64> {
    use BoundaryPoint::*;
    let (xx, y) = (x.x, x.y);
    match (p, q) {
        (Infinity, Infinity) => Err(Error::SameDirection),
        (Finite(p), Infinity) | (Infinity, Finite(p)) => Ok(y / ((xx - p).powi(2) + y * y).sqrt()),
        (Finite(p), Finite(q)) => {
            if p == q {
                return Err(Error::SameDirection);
            }
            let a = (xx - p) * (xx - q) + y * y;
            Ok((y * (q - p)).abs() / (a * a + y * y * (q - p).powi(2)).sqrt())
        }
    }
}

pub fn sin_theta(x: &UHPoint, d: &V2, d2: &V2) -> Result<f64> {
    if crate::flat_core::cross(d, d2).abs() <= 1e-15 * d.norm() * d2.norm() {
        return Err(Error::SameDirection);
    }
    sin_theta_boundary(x, psi(d), psi(d2))
}

/// Hyperbolic distance from `x` to the geodesic `g`.
pub fn dist_to_geodesic(x: &UHPoint, g: &BoundaryGeodesic) -> f64 {
    let s = sin_theta_boundary(x, g.p, g.q).expect("distinct endpoints");
    (1.0 / s).max(1.0).acosh()
}

pub fn mobius(m: &Matrix2<f64>, z: Complex64) -> Complex64 {
    (z * m[(0, 0)] + m[(0, 1)]) / (z * m[(1, 0)] + m[(1, 1)])
}

pub fn mobius_boundary(m: &Matrix2<f64>, p: BoundaryPoint) -> BoundaryPoint {
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    match p {
        BoundaryPoint::Infinity => {
            if c == 0.0 {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite(a / c)
            }
        }
        BoundaryPoint::Finite(t) => {
            let den = c * t + d;
            if den.abs() <= 1e-15 * (c * t).abs().max(d.abs()) {
                BoundaryPoint::Infinity
            } else {
                BoundaryPoint::Finite((a * t + b) / den)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Generator {
    T,
    R,
}

/// Word in `T`, `T^-1` and `R`, listed in the order the letters are applied.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word(pub Vec<(Generator, i32)>);

impl Word {
    fn push(&mut self, g: Generator, k: i32) {
        if k == 0 {
            return;
        }
        if let Some(last) = self.0.last_mut() {
            if last.0 == g {
                last.1 += k;
                if last.1 == 0 || (g == Generator::R && last.1 % 4 == 0) {
                    self.0.pop();
                }
                return;
            }
        }
        self.0.push((g, k));
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product matrix: the last applied letter is the leftmost factor.
    pub fn matrix(&self, g: &HeckeGroup) -> Matrix2<f64> {
        self.0.iter().fold(Matrix2::identity(), |acc, &(gen, k)| g.power(gen, k) * acc)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(g, k)| {
                let name = match g {
                    Generator::T => "T",
                    Generator::R => "R",
                };
                if k == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{k}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug)]
pub struct HeckeGroup {
    pub n: usize,
    pub phi: f64,
    pub t: Matrix2<f64>,
    pub r: Matrix2<f64>,
}

impl HeckeGroup {
    pub fn new(n: usize) -> Result<Self> {
        crate::flat_core::check_n(n)?;
        let phi = 2.0 * (PI / n as f64).cos();
        Ok(HeckeGroup { n, phi, t: Matrix2::new(1.0, phi, 0.0, 1.0), r: Matrix2::new(0.0, -1.0, 1.0, 0.0) })
    }

    pub fn power(&self, g: Generator, k: i32) -> Matrix2<f64> {
        match g {
            Generator::T => Matrix2::new(1.0, self.phi * k as f64, 0.0, 1.0),
            Generator::R => {
                let mut m = Matrix2::identity();
                for _ in 0..k.rem_euclid(4) {
                    m = self.r * m;
                }
                m
            }
        }
    }

    /// Whether `z` lies in the closed domain `|Re z| <= phi/2, |z| >= 1`.
    pub fn in_closed_domain(&self, z: &UHPoint, tol: f64) -> bool {
        z.x.abs() <= self.phi / 2.0 + tol && z.x * z.x + z.y * z.y >= 1.0 - tol
    }
}

pub const REDUCTION_CAP: usize = 10_000;

/// Move `z` into the closed fundamental domain, returning the image and
/// the word applied. On the boundary the canonical representatives are
/// `Re z = -phi/2` and the part of the unit circle with `Re z <= 0`.
pub fn reduce_to_fundamental_domain(z: &UHPoint, g: &HeckeGroup) -> Result<(UHPoint, Word)> {
    reduce_with_cap(z, g, REDUCTION_CAP)
}

pub fn reduce_with_cap(z: &UHPoint, g: &HeckeGroup, cap: usize) -> Result<(UHPoint, Word)> {
    let tol = 1e-12;
    let half = g.phi / 2.0;
    let mut w = Word::default();
    let mut cur = z.z();
    for _ in 0..cap {
        let mut k = (cur.re / g.phi).round();
        if cur.re - k * g.phi > half - tol {
            k += 1.0;
        } else if cur.re - k * g.phi < -half - tol {
            k -= 1.0;
        }
        if k != 0.0 {
            cur -= k * g.phi;
            w.push(Generator::T, -(k as i32));
        }
        let r2 = cur.norm_sqr();
        if r2 < 1.0 - tol || (r2 <= 1.0 + tol && cur.re > tol) {
            cur = -1.0 / cur;
            w.push(Generator::R, 1);
            continue;
        }
        return Ok((UHPoint::from_complex(cur), w));
    }
    Err(Error::ReductionCap { x: z.x, y: z.y, cap })
}

/// Difference between the Euclidean angle of `M u`, `M v` and the angle
/// predicted at `chi(M)`, for `u`, `v` spanning `d`, `d2`.
pub fn angle_consistency_check(m: &Matrix2<f64>, d: &V2, d2: &V2) -> Result<f64> {
    let x = chi(m)?;
    let s = sin_theta(&x, d, d2)?;
    let (a, b) = (m * d, m * d2);
    let mut ang = crate::flat_core::cross(&a, &b).atan2(a.dot(&b)).abs();
    if ang > PI / 2.0 {
        ang = PI - ang;
    }
    Ok((ang - s.min(1.0).asin()).abs())
}
