//! KVol on the Teichmuller disc of the staircase: pair suprema over
//! enumerated saddle connections, the closed form, disc scans and the
//! parallel-intersection check.

use std::cmp::Ordering;
use std::f64::consts::PI;

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::flat_core::{build_staircase, check_n, SurfaceTemplate, V2};
use crate::hecke_hyperbolic::{m_x, UHPoint};
use crate::homology_pairing::{dot, edge_intersection_matrix, pairing_vector};
use crate::saddle_scan::{enumerate_saddle_connections, projective_angle, SaddleConnection};
use crate::tolerance::EPS_DIR;

/// Relative tolerance under which two pair values count as tied.
pub const TIE_REL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct PairMember {
    /// Index in the length-sorted enumeration.
    pub id: usize,
    pub holonomy: [f64; 2],
    pub length: f64,
    /// Edge label when the connection runs along a polygon edge.
    pub label: Option<String>,
}

impl PairMember {
    fn new(id: usize, sc: &SaddleConnection, s: &SurfaceTemplate) -> Self {
        let label = sc.is_edge(s).then(|| s.label(s.edge_id(sc.start.poly, sc.start.vertex)).to_string());
        PairMember { id, holonomy: [sc.holonomy.x, sc.holonomy.y], length: sc.length, label }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairValue {
    pub value: f64,
    pub intersection: i64,
    pub alpha: PairMember,
    pub beta: PairMember,
}

#[derive(Clone, Debug, Serialize)]
pub struct KVolReport {
    pub n: usize,
    pub point: UHPoint,
    pub closed_form: f64,
    pub empirical: f64,
    pub attaining_pair: PairValue,
    pub lmax: f64,
    pub gap: f64,
}

/// Whether the holonomy points into the upper half-plane, so that each
/// unoriented connection is kept once.
fn forward(sc: &SaddleConnection) -> bool {
    let a = sc.holonomy.y.atan2(sc.holonomy.x);
    (-EPS_DIR..PI - EPS_DIR).contains(&a)
}

fn same_direction(a: f64, b: f64) -> bool {
    let d = (a - b).abs();
    d <= EPS_DIR || PI - d <= EPS_DIR
}

fn tie_key(sc: &SaddleConnection) -> [f64; 3] {
    [sc.length, sc.holonomy.x, sc.holonomy.y]
}

fn cmp_keys(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Candidate order: larger value first, then the smaller tie key.
fn better(v: f64, key: &[f64], best: Option<(f64, &[f64])>) -> bool {
    match best {
        None => true,
        Some((bv, bk)) => {
            if (v - bv).abs() <= TIE_REL * bv.abs().max(v.abs()) {
                cmp_keys(key, bk).is_lt()
            } else {
                v > bv
            }
        }
    }
}

/// Forward-oriented connections with their index in `scs` and their
/// pairing vectors.
struct Prepared<'a> {
    items: Vec<(usize, &'a SaddleConnection, Vec<i64>)>,
}

impl<'a> Prepared<'a> {
    fn new(s: &SurfaceTemplate, scs: &'a [SaddleConnection]) -> Result<Self> {
        let b = edge_intersection_matrix(s)?;
        let items = scs.iter().enumerate().filter(|(_, sc)| forward(sc)).map(|(i, sc)| (i, sc, pairing_vector(&sc.homology, &b))).collect();
        Ok(Prepared { items })
    }
}

fn pair_value(s: &SurfaceTemplate, a: (usize, &SaddleConnection), b: (usize, &SaddleConnection), value: f64, int: i64) -> PairValue {
    PairValue { value, intersection: int, alpha: PairMember::new(a.0, a.1, s), beta: PairMember::new(b.0, b.1, s) }
}

/// Largest `|Int(a, b)| / (l(a) l(b))` over unordered pairs of the given
/// connections, with the tie-broken attaining pair.
pub fn max_intersection_ratio(s: &SurfaceTemplate, scs: &[SaddleConnection]) -> Result<PairValue> {
    Ok(max_ratio_with_ties(s, scs)?.0)
}

/// As [`max_intersection_ratio`], also returning every pair within
/// [`TIE_REL`] of the maximum.
pub fn max_ratio_with_ties(s: &SurfaceTemplate, scs: &[SaddleConnection]) -> Result<(PairValue, Vec<PairValue>)> {
    let prep = Prepared::new(s, scs)?;
    let items = &prep.items;
    let ratio = |i: usize, j: usize| -> (f64, i64) {
        let int = dot(&items[i].1.homology, &items[j].2);
        (int.abs() as f64 / (items[i].1.length * items[j].1.length), int)
    };
    let ordered = |i: usize, j: usize| if cmp_keys(&tie_key(items[i].1), &tie_key(items[j].1)).is_le() { (i, j) } else { (j, i) };
    let key = |i: usize, j: usize| [tie_key(items[i].1), tie_key(items[j].1)].concat();
    let best = (0..items.len())
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(f64, Vec<f64>, (usize, usize))> = None;
            for j in i + 1..items.len() {
                let (v, _) = ratio(i, j);
                if v == 0.0 {
                    continue;
                }
                let (a, b) = ordered(i, j);
                let k = key(a, b);
                if better(v, &k, best.as_ref().map(|(bv, bk, _)| (*bv, bk.as_slice()))) {
                    best = Some((v, k, (a, b)));
                }
            }
            best
        })
        .reduce(
            || None,
            |x, y| match (x, y) {
                (None, y) => y,
                (x, None) => x,
                (Some(x), Some(y)) => {
                    if better(y.0, &y.1, Some((x.0, x.1.as_slice()))) {
                        Some(y)
                    } else {
                        Some(x)
                    }
                }
            },
        );
    let Some((v, _, (a, b))) = best else {
        return Err(Error::NoCandidates { lmax: scs.iter().map(|s| s.length).fold(0.0, f64::max), which: "intersecting pair" });
    };
    let (_, int) = ratio(a, b);
    let top = pair_value(s, (items[a].0, items[a].1), (items[b].0, items[b].1), v, int);
    let mut ties = Vec::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let (w, int) = ratio(i, j);
            if (w - v).abs() <= TIE_REL * v {
                let (a, b) = ordered(i, j);
                ties.push(pair_value(s, (items[a].0, items[a].1), (items[b].0, items[b].1), w, if a == i { int } else { -int }));
            }
        }
    }
    Ok((top, ties))
}

/// Supremum of `|Int(a, b)| / |a ^ b|` over connections of length at most
/// `lmax` on the staircase in the directions `d` and `d2`. A lower bound
/// for the supremum over all such pairs.
pub fn k_pair(n: usize, d: &V2, d2: &V2, lmax: f64) -> Result<PairValue> {
    let s = build_staircase(n)?;
    let scs = enumerate_saddle_connections(&s, lmax)?;
    k_pair_on(&s, &scs, d, d2, lmax)
}

pub fn k_pair_on(s: &SurfaceTemplate, scs: &[SaddleConnection], d: &V2, d2: &V2, lmax: f64) -> Result<PairValue> {
    let (a1, a2) = (projective_angle(d), projective_angle(d2));
    if same_direction(a1, a2) {
        return Err(Error::SameDirection);
    }
    let prep = Prepared::new(s, scs)?;
    let pick = |a: f64| -> Vec<usize> {
        (0..prep.items.len()).filter(|&i| prep.items[i].1.length <= lmax && same_direction(prep.items[i].1.angle(), a)).collect()
    };
    let (xs, ys) = (pick(a1), pick(a2));
    if xs.is_empty() {
        return Err(Error::NoCandidates { lmax, which: "first direction" });
    }
    if ys.is_empty() {
        return Err(Error::NoCandidates { lmax, which: "second direction" });
    }
    let mut best: Option<(f64, Vec<f64>, usize, usize, i64)> = None;
    for &i in &xs {
        for &j in &ys {
            let (a, b) = (prep.items[i].1, prep.items[j].1);
            let int = dot(&a.homology, &prep.items[j].2);
            let v = int.abs() as f64 / crate::flat_core::cross(&a.holonomy, &b.holonomy).abs();
            let k = [tie_key(a), tie_key(b)].concat();
            if better(v, &k, best.as_ref().map(|(bv, bk, ..)| (*bv, bk.as_slice()))) {
                best = Some((v, k, i, j, int));
            }
        }
    }
    let (v, _, i, j, int) = best.expect("candidate sets are nonempty");
    Ok(pair_value(s, (prep.items[i].0, prep.items[i].1), (prep.items[j].0, prep.items[j].1), v, int))
}

/// `(n/2) cot(pi/n) / sin(pi/n)` divided by the hyperbolic cosine of the
/// distance from `x` to the geodesic joining 0 and infinity.
pub fn kvol_closed_form(n: usize, x: &UHPoint) -> f64 {
    let a = PI / n as f64;
    let top = n as f64 / 2.0 / a.tan() / a.sin();
    top * x.y / x.x.hypot(x.y)
}

/// [`kvol_closed_form`] evaluated in double-double arithmetic.
pub fn kvol_closed_form_extended(n: usize, x: &UHPoint) -> f64 {
    let a = twofloat::consts::PI / TwoFloat::from(n as f64);
    let (s, c) = (a.sin(), a.cos());
    let (xx, yy) = (TwoFloat::from(x.x), TwoFloat::from(x.y));
    let top = TwoFloat::from(n as f64) / 2.0 * c / (s * s);
    f64::from(top * yy / (xx * xx + yy * yy).sqrt())
}

/// Empirical KVol of the staircase moved to `x` by the upper-triangular
/// matrix with `chi = x`.
pub fn kvol_empirical(n: usize, x: &UHPoint, lmax: f64) -> Result<KVolReport> {
    let s0 = build_staircase(n)?;
    kvol_empirical_with(n, &s0, x, &m_x(x), lmax)
}

/// Empirical KVol of `m S0`, where `m` is any matrix with `chi(m) = x`.
pub fn kvol_empirical_with(n: usize, s0: &SurfaceTemplate, x: &UHPoint, m: &Matrix2<f64>, lmax: f64) -> Result<KVolReport> {
    if lmax.is_nan() || lmax <= 0.0 {
        return Err(Error::Config(format!("lmax must be positive, got {lmax}")));
    }
    let s = s0.apply_matrix(m)?;
    let scs = enumerate_saddle_connections(&s, lmax)?;
    let pair = max_intersection_ratio(&s, &scs).map_err(|e| match e {
        Error::NoCandidates { which, .. } => Error::NoCandidates { lmax, which },
        e => e,
    })?;
    let empirical = s.area() * pair.value;
    let closed_form = kvol_closed_form(n, x);
    Ok(KVolReport { n, point: *x, closed_form, empirical, attaining_pair: pair, lmax, gap: closed_form - empirical })
}

/// Ratio of the angle sine of the coordinate directions to that of the
/// directions with boundary points `d < d2`, at `x`.
pub fn ratio_f(d: f64, d2: f64, x: &UHPoint) -> Result<f64> {
    if d == d2 {
        return Err(Error::SameDirection);
    }
    Ok(g_value(d, d2, x.x, x.y).sqrt() / (d2 - d).abs())
}

/// The radicand of [`ratio_f`] times `(d2 - d)^2`.
pub fn g_value(d: f64, d2: f64, x: f64, y: f64) -> f64 {
    let a = (x - d) * (x - d2) + y * y;
    (a * a + y * y * (d2 - d).powi(2)) / (x * x + y * y)
}

/// `g_value` on the unit circle at angle `t`.
pub fn g_circle(d: f64, d2: f64, t: f64) -> f64 {
    (1.0 + d * d2 - (d + d2) * t.cos()).powi(2) + (d2 - d).powi(2) * t.sin().powi(2)
}

pub fn g_circle_derivative(d: f64, d2: f64, t: f64) -> f64 {
    2.0 * t.sin() * ((1.0 + d * d2) * (d + d2) - 4.0 * d * d2 * t.cos())
}

pub fn g_dy(d: f64, d2: f64, x: f64, y: f64) -> f64 {
    let r2 = x * x + y * y;
    2.0 * y / (r2 * r2) * (y.powi(4) + 2.0 * x * x * y * y + x.powi(4) - d * d2 * (2.0 * x - d) * (2.0 * x - d2))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub y_max: f64,
}

impl Grid {
    /// Nodes covering `0 <= x <= phi/2`, `x^2 + y^2 >= 1`, `y <= y_max`,
    /// row-major in `x`. The corner at `x = phi/2` on the unit circle is a
    /// node.
    pub fn nodes(&self, n: usize) -> Result<Vec<UHPoint>> {
        check_n(n)?;
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::Config(format!("grid needs at least 2x2 nodes, got {}x{}", self.nx, self.ny)));
        }
        let half = (PI / n as f64).cos();
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for i in 0..self.nx {
            let x = if i + 1 == self.nx { half } else { half * i as f64 / (self.nx - 1) as f64 };
            let y0 = if i + 1 == self.nx { (PI / n as f64).sin() } else { (1.0 - x * x).sqrt() };
            if self.y_max <= y0 {
                return Err(Error::Config(format!("y_max {} below the domain floor {y0}", self.y_max)));
            }
            for j in 0..self.ny {
                out.push(UHPoint { x, y: y0 + (self.y_max - y0) * j as f64 / (self.ny - 1) as f64 });
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub n: usize,
    pub grid: Grid,
    pub cells: Vec<KVolReport>,
    /// Cells whose empirical value ties the minimum.
    pub argmin: Vec<usize>,
    /// Cells whose empirical value ties the maximum.
    pub argmax: Vec<usize>,
}

pub fn scan_disc(n: usize, grid: Grid, lmax: f64) -> Result<ScanResult> {
    let nodes = grid.nodes(n)?;
    let s0 = build_staircase(n)?;
    let cells = nodes.par_iter().map(|x| kvol_empirical_with(n, &s0, x, &m_x(x), lmax)).collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = cells.iter().map(|c| c.empirical).collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmin = (0..vals.len()).filter(|&i| vals[i] - lo <= TIE_REL * lo).collect();
    let argmax = (0..vals.len()).filter(|&i| hi - vals[i] <= TIE_REL * hi).collect();
    Ok(ScanResult { n, grid, cells, argmin, argmax })
}

#[derive(Clone, Debug, Serialize)]
pub struct ParallelPair {
    pub alpha: PairMember,
    pub beta: PairMember,
    pub intersection: i64,
}

/// Parallel pairs among the connections of length at most `lmax` that
/// intersect nontrivially.
pub fn check_bounded_hypothesis(s: &SurfaceTemplate, lmax: f64) -> Result<Vec<ParallelPair>> {
    let scs = enumerate_saddle_connections(s, lmax)?;
    let prep = Prepared::new(s, &scs)?;
    let items = &prep.items;
    let mut out = Vec::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if !same_direction(items[i].1.angle(), items[j].1.angle()) {
                continue;
            }
            let int = dot(&items[i].1.homology, &items[j].2);
            if int != 0 {
                out.push(ParallelPair {
                    alpha: PairMember::new(items[i].0, items[i].1, s),
                    beta: PairMember::new(items[j].0, items[j].1, s),
                    intersection: int,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_core::{build_double_ngon, build_one_cylinder_fixture};
    use crate::hecke_hyperbolic::{reduce_to_fundamental_domain, sin_theta, x0, HeckeGroup};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phi(n: usize) -> f64 {
        2.0 * (PI / n as f64).cos()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    const V: V2 = V2::new(0.0, 1.0);
    const H: V2 = V2::new(1.0, 0.0);

    fn labels(p: &PairValue) -> [Option<String>; 2] {
        [p.alpha.label.clone(), p.beta.label.clone()]
    }

    #[test]
    fn k_of_coordinate_directions() {
        for (n, m, expected) in [(5, 2, 2.894427190999916), (7, 3, 5.311941110422722)] {
            let a = k_pair(n, &V, &H, 3.0).unwrap();
            assert!(rel(a.value, expected) < 1e-9, "n={n}: {}", a.value);
            assert!(rel(a.value, 1.0 / (PI / n as f64).sin().powi(2)) < 1e-12);
            assert_eq!(labels(&a), [Some(format!("b{m}")), Some(format!("a{m}"))]);
            let b = k_pair(n, &V, &V2::new(-phi(n), 1.0), 3.0).unwrap();
            assert!(rel(b.value, a.value / phi(n)) < 1e-9);
        }
        let b = k_pair(7, &V, &V2::new(-phi(7), 1.0), 3.0).unwrap();
        assert!(rel(b.value, 2.947904916398311) < 1e-12);
    }

    #[test]
    fn k_pair_errors() {
        assert!(matches!(k_pair(5, &V, &V2::new(0.0, -3.0), 3.0), Err(Error::SameDirection)));
        assert!(matches!(k_pair(5, &V, &H, 0.1), Err(Error::NoCandidates { .. })));
    }

    #[test]
    fn closed_form_examples() {
        assert!(rel(kvol_closed_form(5, &UHPoint::i()), 5.854101966249685) < 1e-14);
        assert!(rel(kvol_closed_form(5, &x0(5)), 3.440954801177933) < 1e-14);
        assert!(rel(kvol_closed_form(7, &x0(7)), 7.267824888003178) < 1e-14);
        for n in [5, 7, 9] {
            for x in [UHPoint::i(), x0(n), UHPoint { x: 0.3, y: 1.7 }] {
                assert!(rel(kvol_closed_form_extended(n, &x), kvol_closed_form(n, &x)) < 1e-15);
            }
        }
    }

    #[test]
    fn empirical_matches_closed_form_at_the_ends() {
        let r = kvol_empirical(5, &x0(5), 2.2).unwrap();
        assert!(rel(r.empirical, 3.440954801) < 1e-9);
        assert!(r.empirical <= r.closed_form * (1.0 + 1e-9));
        let r = kvol_empirical(5, &UHPoint::i(), 3.0).unwrap();
        assert!(rel(r.empirical, 5.854101966) < 1e-6);
        assert!(r.gap >= -r.closed_form * 1e-9);
    }

    #[test]
    fn double_ngon_supremum_is_attained_by_sides() {
        for n in [5, 7] {
            let s = build_double_ngon(n).unwrap();
            let scs = enumerate_saddle_connections(&s, 2.2).unwrap();
            let (top, ties) = max_ratio_with_ties(&s, &scs).unwrap();
            let side = 2.0 * (PI / n as f64).sin();
            assert!(rel(top.value, 1.0 / (side * side)) < 1e-9);
            assert!(rel(top.value * s.area(), n as f64 / 2.0 / (PI / n as f64).tan()) < 1e-9);
            assert!(ties.iter().all(|p| p.alpha.label.is_some() && p.beta.label.is_some()));
            // every pair of distinct sides meets at the single vertex
            assert_eq!(ties.len(), n * (n - 1) / 2);
        }
    }

    #[test]
    fn empirical_is_monotone_in_lmax() {
        let x = UHPoint { x: 0.4, y: 1.3 };
        let mut last = 0.0;
        for l in [1.5, 2.0, 3.0, 4.0] {
            let r = kvol_empirical(5, &x, l).unwrap();
            assert!(r.empirical >= last);
            assert!(r.empirical <= r.closed_form * (1.0 + 1e-9));
            last = r.empirical;
        }
        assert!(kvol_empirical(5, &x, 0.05).is_err());
        assert!(kvol_empirical(5, &x, -1.0).is_err());
    }

    #[test]
    fn empirical_is_scale_free() {
        let s0 = build_staircase(5).unwrap();
        let x = UHPoint { x: 0.25, y: 1.4 };
        let base = kvol_empirical_with(5, &s0, &x, &m_x(&x), 4.0).unwrap();
        for lam in [0.5, 2.0] {
            let r = kvol_empirical_with(5, &s0, &x, &(m_x(&x) * lam), 4.0 * lam).unwrap();
            assert!(rel(r.empirical, base.empirical) < 1e-9);
        }
    }

    #[test]
    fn k_pair_is_veech_invariant() {
        let g = HeckeGroup::new(5).unwrap();
        let s = build_staircase(5).unwrap();
        let scs = enumerate_saddle_connections(&s, 8.0).unwrap();
        for (d, d2) in [(V, H), (V, V2::new(-phi(5), 1.0)), (H, V2::new(-phi(5), 1.0))] {
            let k = k_pair_on(&s, &scs, &d, &d2, 8.0).unwrap().value;
            for m in [g.t, g.r] {
                let k2 = k_pair_on(&s, &scs, &(m * d), &(m * d2), 8.0).unwrap().value;
                assert!(rel(k2, k) < 1e-9, "{d:?} {d2:?}: {k} vs {k2}");
            }
        }
    }

    #[test]
    fn pair_reformulation_matches_empirical() {
        let n = 5;
        let s = build_staircase(n).unwrap();
        let scs = enumerate_saddle_connections(&s, 6.0).unwrap();
        let dirs = crate::saddle_scan::distinct_angles(scs.iter().filter(|c| forward(c)).take(40).map(|c| c.angle()));
        let g = HeckeGroup::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            let z = UHPoint::new(rng.random_range(-2.0..2.0), rng.random_range(0.3..3.0)).unwrap();
            let (x, _) = reduce_to_fundamental_domain(&z, &g).unwrap();
            let mut best: f64 = 0.0;
            for (i, &a) in dirs.iter().enumerate() {
                for &b in &dirs[i + 1..] {
                    let (d, d2) = (V2::new(a.cos(), a.sin()), V2::new(b.cos(), b.sin()));
                    let k = k_pair_on(&s, &scs, &d, &d2, 6.0).unwrap().value;
                    best = best.max(k * sin_theta(&x, &d, &d2).unwrap());
                }
            }
            let r = kvol_empirical(n, &x, 6.0).unwrap();
            let s_x = s.apply_matrix(&m_x(&x)).unwrap();
            assert!(rel(best, r.empirical / s_x.area()) < 0.02, "{x:?}");
        }
    }

    #[test]
    fn ratio_f_examples() {
        let f = ratio_f(0.0, phi(5), &x0(5)).unwrap();
        assert!((f - 0.6180339887498949).abs() < 1e-12);
        assert!(ratio_f(1.0, 1.0, &x0(5)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let d = rng.random_range(-3.0..3.0);
            let d2 = d + rng.random_range(0.01..4.0);
            let x = UHPoint::new(rng.random_range(-2.0..2.0), rng.random_range(0.1..4.0)).unwrap();
            let direct = sin_theta(&x, &V, &H).unwrap() / sin_theta(&x, &V2::new(-d, 1.0), &V2::new(-d2, 1.0)).unwrap();
            assert!(rel(ratio_f(d, d2, &x).unwrap(), direct) < 1e-12);
        }
    }

    fn admissible(rng: &mut ChaCha8Rng, p: f64, sum_above_phi: bool) -> (f64, f64) {
        loop {
            let d = rng.random_range(0.0..p / 2.0);
            let d2 = rng.random_range(p / 2.0 + 1e-6..3.0 * p);
            if !sum_above_phi || d + d2 > p {
                return (d, d2);
            }
        }
    }

    #[test]
    fn ratio_f_increases_up_the_right_side() {
        let p = phi(5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let (d, d2) = admissible(&mut rng, p, false);
            let mut last = 0.0;
            for j in 0..50 {
                let y = (PI / 5.0).sin() + 0.06 * j as f64;
                let f = ratio_f(d, d2, &UHPoint { x: p / 2.0, y }).unwrap();
                assert!(f > last);
                last = f;
            }
        }
    }

    #[test]
    fn ratio_f_is_minimal_at_the_corner() {
        let n = 5;
        let nodes = Grid { nx: 50, ny: 50, y_max: 3.0 }.nodes(n).unwrap();
        let corner = x0(n);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (d, d2) = admissible(&mut rng, phi(n), true);
            let at = ratio_f(d, d2, &corner).unwrap();
            for x in &nodes {
                assert!(ratio_f(d, d2, x).unwrap() >= at * (1.0 - 1e-12), "({d}, {d2}) at {x:?}");
            }
        }
    }

    #[test]
    fn circle_restriction_and_its_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = phi(5);
        for _ in 0..50 {
            let (d, d2) = admissible(&mut rng, p, false);
            let mut last = 0.0;
            for k in 0..=100 {
                let t = PI / 5.0 + (PI / 2.0 - PI / 5.0) * k as f64 / 100.0;
                let g = g_circle(d, d2, t);
                assert!((g - g_value(d, d2, t.cos(), t.sin())).abs() < 1e-12 * g.max(1.0));
                assert!(g >= last - 1e-14 && g_circle_derivative(d, d2, t) >= 0.0);
                last = g;
                let h = 1e-5;
                let fd = (g_circle(d, d2, t + h) - g_circle(d, d2, t - h)) / (2.0 * h);
                let an = g_circle_derivative(d, d2, t);
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn vertical_derivative_matches_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = phi(5) / 2.0;
        for _ in 0..50 {
            let (d, d2) = admissible(&mut rng, 2.0 * x, false);
            for y in [0.6, 1.0, 1.7, 2.9] {
                let h = 1e-5 * y;
                let fd = (g_value(d, d2, x, y + h) - g_value(d, d2, x, y - h)) / (2.0 * h);
                let an = g_dy(d, d2, x, y);
                assert!(an > 0.0 && rel(fd, an) < 1e-6, "({d}, {d2}) y={y}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn bounded_hypothesis() {
        for n in [5, 7] {
            assert!(check_bounded_hypothesis(&build_staircase(n).unwrap(), 3.0).unwrap().is_empty());
        }
        assert!(check_bounded_hypothesis(&build_double_ngon(7).unwrap(), 2.0).unwrap().is_empty());
        let bad = check_bounded_hypothesis(&build_one_cylinder_fixture().unwrap(), 3.0).unwrap();
        assert!(!bad.is_empty());
        assert!(bad.iter().all(|p| p.intersection != 0));
    }

    #[test]
    fn grid_nodes() {
        let g = Grid { nx: 4, ny: 3, y_max: 2.0 };
        let nodes = g.nodes(5).unwrap();
        assert_eq!(nodes.len(), 12);
        assert_eq!(nodes[9], x0(5));
        assert!(nodes.iter().all(|z| z.x >= 0.0 && z.x <= phi(5) / 2.0 && z.x * z.x + z.y * z.y >= 1.0 - 1e-12 && z.y <= 2.0));
        assert!(Grid { nx: 1, ny: 3, y_max: 2.0 }.nodes(5).is_err());
        assert!(Grid { nx: 3, ny: 3, y_max: 0.5 }.nodes(5).is_err());
    }

    #[test]
    fn small_scan() {
        let grid = Grid { nx: 5, ny: 5, y_max: 2.5 };
        let r = scan_disc(5, grid, 6.0).unwrap();
        assert_eq!(r.argmin, vec![20]);
        assert_eq!(r.argmax, (0..5).collect::<Vec<_>>());
        for c in &r.cells {
            assert!(c.empirical <= c.closed_form * (1.0 + 1e-9));
            assert!(c.gap <= 0.05 * c.closed_form);
        }
    }
}
