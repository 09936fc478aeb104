use std::f64::consts::PI;

use super::template::{EdgeTag, Model, SurfaceTemplate, V2};
use crate::error::{Error, Result};

pub fn check_n(n: usize) -> Result<usize> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::InvalidN(n));
    }
    Ok((n - 1) / 2)
}

/// Two regular n-gons of circumradius 1, the second the point reflection
/// of the first, with parallel sides glued.
///
/// The right-hand polygon has a horizontal top side, labelled `e1`; its
/// top-left side is `e0` and labels increase clockwise. Each label is
/// oriented along the counterclockwise boundary of the right-hand polygon.
pub fn build_double_ngon(n: usize) -> Result<SurfaceTemplate> {
    check_n(n)?;
    let nf = n as f64;
    let right: Vec<V2> = (0..n)
        .map(|j| {
            let a = PI / 2.0 + PI / nf + 2.0 * PI * j as f64 / nf;
            V2::new(a.cos(), a.sin())
        })
        .collect();
    let centre = right[0] + right[1];
    let left: Vec<V2> = right.iter().map(|v| centre - v).collect();

    // Counterclockwise edge j of the right-hand polygon carries e_{(n - j) mod n}.
    let label_of = |j: usize| (n - j) % n;
    let mut tags = Vec::with_capacity(2 * n);
    for j in 0..n {
        tags.push(EdgeTag { name: label_of(j), orient: 1 });
    }
    for j in 0..n {
        tags.push(EdgeTag { name: label_of(j), orient: -1 });
    }
    let gluings = (0..n).map(|j| (j, n + j)).collect();
    let names = (0..n).map(|k| format!("e{k}")).collect();
    SurfaceTemplate::from_parts(n, Model::Double, vec![right, left], gluings, tags, names, n)
}

/// Lengths `sin(2 k pi / n)` for `k = 1..=m`, shared by the horizontal
/// edges `a_k` and the vertical edges `b_k` of the staircase.
pub fn staircase_lengths(n: usize) -> Result<Vec<f64>> {
    let m = check_n(n)?;
    Ok((1..=m).map(|k| (2.0 * PI * k as f64 / n as f64).sin()).collect())
}

/// Right-angled staircase with horizontal edges `a1..am` and vertical
/// edges `b1..bm`.
///
/// Row `k` (from the bottom) has height `b_{m-k+1}` and spans columns
/// `k-1` and `k`; column `j` has width `a_j`. The `a1 x bm` step has its
/// lower-left corner at the origin and the steps climb to the left. The
/// template is cut into rectangular cells; the cuts are named `c1, c2, ..`
/// and carry no homology coordinate of their own.
pub fn build_staircase(n: usize) -> Result<SurfaceTemplate> {
    let m = check_n(n)?;
    let s = staircase_lengths(n)?;
    let a = |j: usize| s[j - 1];
    let b = |j: usize| s[j - 1];

    // Column j occupies [x_lo(j), x_hi(j)].
    let mut x_hi = vec![0.0; m + 1];
    let mut x_lo = vec![0.0; m + 1];
    x_hi[1] = a(1);
    x_lo[1] = 0.0;
    for j in 2..=m {
        x_hi[j] = x_lo[j - 1];
        x_lo[j] = x_hi[j] - a(j);
    }
    // Row k occupies [y[k-1], y[k]].
    let mut y = vec![0.0; m + 1];
    for k in 1..=m {
        y[k] = y[k - 1] + b(m - k + 1);
    }

    // Cells (row, column) in a fixed order.
    let mut cells = Vec::new();
    for k in 1..=m {
        if k >= 2 {
            cells.push((k, k));
            cells.push((k, k - 1));
        } else {
            cells.push((1, 1));
        }
    }
    let cell_index = |k: usize, j: usize| cells.iter().position(|&c| c == (k, j));
    let polygons: Vec<Vec<V2>> = cells
        .iter()
        .map(|&(k, j)| vec![V2::new(x_lo[j], y[k - 1]), V2::new(x_hi[j], y[k - 1]), V2::new(x_hi[j], y[k]), V2::new(x_lo[j], y[k])])
        .collect();
    // Rectangle edge indices: 0 bottom, 1 right, 2 top, 3 left.
    let id = |cell: usize, side: usize| 4 * cell + side;

    let mut names: Vec<String> = (1..=m).map(|k| format!("a{k}")).collect();
    names.extend((1..=m).map(|k| format!("b{k}")));
    let mut tags = vec![EdgeTag { name: usize::MAX, orient: 0 }; 4 * cells.len()];
    let mut gluings = Vec::new();
    let mut cuts = 0;
    let mut cut = |lo: usize, hi: usize, tags: &mut Vec<EdgeTag>, names: &mut Vec<String>, gluings: &mut Vec<(usize, usize)>| {
        cuts += 1;
        let name = names.len();
        names.push(format!("c{cuts}"));
        tags[lo] = EdgeTag { name, orient: 1 };
        tags[hi] = EdgeTag { name, orient: -1 };
        gluings.push((lo.min(hi), lo.max(hi)));
    };

    for j in 1..=m {
        let bottom = cell_index(j, j).expect("cell");
        let top = cell_index(j + 1, j).unwrap_or(bottom);
        if top != bottom {
            cut(id(bottom, 2), id(top, 0), &mut tags, &mut names, &mut gluings);
        }
        tags[id(bottom, 0)] = EdgeTag { name: j - 1, orient: 1 };
        tags[id(top, 2)] = EdgeTag { name: j - 1, orient: -1 };
        gluings.push((id(bottom, 0), id(top, 2)));
    }
    for k in 1..=m {
        let left = cell_index(k, k).expect("cell");
        let right = if k >= 2 { cell_index(k, k - 1).expect("cell") } else { left };
        if left != right {
            cut(id(right, 3), id(left, 1), &mut tags, &mut names, &mut gluings);
        }
        let name = m + (m - k + 1) - 1;
        tags[id(right, 1)] = EdgeTag { name, orient: 1 };
        tags[id(left, 3)] = EdgeTag { name, orient: -1 };
        gluings.push((id(right, 1).min(id(left, 3)), id(right, 1).max(id(left, 3))));
    }
    gluings.sort();
    SurfaceTemplate::from_parts(n, Model::Staircase, polygons, gluings, tags, names, 2 * m)
}

/// Three unit squares forming one horizontal cylinder of width 3, with
/// tops glued to bottoms by the permutation (1 2)(3). The result lies in
/// genus 2 with a single cone point of angle 6 pi.
pub fn build_one_cylinder_fixture() -> Result<SurfaceTemplate> {
    let polygons: Vec<Vec<V2>> = (0..3)
        .map(|i| {
            let x = i as f64;
            vec![V2::new(x, 0.0), V2::new(x + 1.0, 0.0), V2::new(x + 1.0, 1.0), V2::new(x, 1.0)]
        })
        .collect();
    let up = [1usize, 0, 2];
    let id = |sq: usize, side: usize| 4 * sq + side;
    let mut tags = vec![EdgeTag { name: 0, orient: 0 }; 12];
    let mut gluings = Vec::new();
    for i in 0..3 {
        // h_i is the bottom of square i, v_i its left side.
        tags[id(i, 0)] = EdgeTag { name: i, orient: 1 };
        tags[id(up.iter().position(|&u| u == i).expect("perm"), 2)] = EdgeTag { name: i, orient: -1 };
        tags[id(i, 3)] = EdgeTag { name: 3 + i, orient: -1 };
        tags[id((i + 2) % 3, 1)] = EdgeTag { name: 3 + i, orient: 1 };
        let t = id(up.iter().position(|&u| u == i).expect("perm"), 2);
        gluings.push((id(i, 0).min(t), id(i, 0).max(t)));
        let r = id((i + 2) % 3, 1);
        gluings.push((id(i, 3).min(r), id(i, 3).max(r)));
    }
    gluings.sort();
    let names = ["h1", "h2", "h3", "v1", "v2", "v3"].iter().map(|s| s.to_string()).collect();
    SurfaceTemplate::from_parts(0, Model::Fixture, polygons, gluings, tags, names, 6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_n() {
        for n in [0, 3, 4, 6, 8] {
            assert!(build_double_ngon(n).is_err());
            assert!(build_staircase(n).is_err());
        }
    }

    #[test]
    fn double_pentagon_area_and_side() {
        let s = build_double_ngon(5).unwrap();
        assert!((s.area() - 4.755282581475768).abs() < 1e-12);
        for e in 0..s.edge_count() {
            assert!((s.edge_vec(e).norm() - 1.1755705045849463).abs() < 1e-12);
        }
    }

    #[test]
    fn double_heptagon_cone_angle() {
        let s = build_double_ngon(7).unwrap();
        assert_eq!(s.singularities.len(), 1);
        assert!((s.cone_angle() - 10.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn e1_is_the_horizontal_top_side() {
        let s = build_double_ngon(7).unwrap();
        let e1 = (0..7).find(|&e| s.label(e) == "e1").unwrap();
        let v = s.edge_vec(e1);
        assert!(v.y.abs() < 1e-12 && v.x < 0.0);
        assert!(s.vertex(0, 0).y > 0.9);
        // e0 runs down and to the left from the top-left corner.
        let e0 = (0..7).find(|&e| s.label(e) == "e0").unwrap();
        assert!(s.edge_vec(e0).x < 0.0 && s.edge_vec(e0).y < 0.0);
    }

    #[test]
    fn staircase_lengths_match() {
        let l = staircase_lengths(5).unwrap();
        assert!((l[0] - 0.9510565162951535).abs() < 1e-12);
        assert!((l[1] - 0.5877852522924731).abs() < 1e-12);
        let l7 = staircase_lengths(7).unwrap();
        assert!((l7[2] - 0.4338837391175581).abs() < 1e-12);
    }

    #[test]
    fn staircase_area_and_cone_angle() {
        for n in [5, 7, 9, 11, 13] {
            let s = build_staircase(n).unwrap();
            let nf = n as f64;
            assert!((s.area() - nf / 2.0 * (PI / nf).cos()).abs() < 1e-12, "n = {n}");
            assert!((s.cone_angle() - 2.0 * PI * (nf - 2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn staircase_origin_step() {
        let s = build_staircase(7).unwrap();
        let l = staircase_lengths(7).unwrap();
        let first = &s.polygons[0];
        assert_eq!(first[0], V2::new(0.0, 0.0));
        assert!((first[2] - V2::new(l[0], l[2])).norm() < 1e-15);
        // Every other cell lies to the left of x = a1.
        assert!(s.polygons.iter().flatten().all(|v| v.x <= l[0] + 1e-15 && v.y >= 0.0));
    }

    #[test]
    fn fixture_has_one_vertex() {
        let s = build_one_cylinder_fixture().unwrap();
        assert!((s.cone_angle() - 6.0 * PI).abs() < 1e-12);
        assert_eq!(s.area(), 3.0);
    }

    #[test]
    fn cut_classes_reproduce_holonomy() {
        for n in [5, 7, 9] {
            let s = build_staircase(n).unwrap();
            let hol: Vec<V2> = (0..s.basis_len)
                .map(|k| {
                    let e = (0..s.edge_count()).find(|&e| s.edge_labels[e].name == k && s.edge_labels[e].orient == 1).unwrap();
                    s.edge_vec(e)
                })
                .collect();
            for e in 0..s.edge_count() {
                let v: V2 = s.edge_class(e).iter().zip(&hol).map(|(c, h)| h * (*c as f64)).sum();
                assert!((v - s.edge_vec(e)).norm() < 1e-12);
            }
        }
    }
}
