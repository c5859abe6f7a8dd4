//! Polytopes in R^1, R^2, R^3: hulls of point sets and bounded
//! intersections of half-spaces, with facet areas, centroids and ridge
//! adjacency.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

const BOX_LABEL: usize = usize::MAX;
const UNKNOWN_LABEL: usize = usize::MAX - 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Outer unit normal.
    pub normal: Vec<f64>,
    /// Support value h_P(normal).
    pub offset: f64,
    /// (d-1)-dimensional volume.
    pub area: f64,
    /// Area centroid of the facet.
    pub centroid: Vec<f64>,
    /// Index of the generating half-space, or of the facet itself for hulls.
    pub label: usize,
}

/// Two facets sharing a (d-2)-face of the given measure (1 in the plane).
#[derive(Debug, Clone, PartialEq)]
pub struct Ridge {
    pub facets: (usize, usize),
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
    ridges: Vec<Ridge>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3(sub3(a, b))
}

fn to3(p: &[f64]) -> [f64; 3] {
    let mut q = [0.0; 3];
    q[..p.len()].copy_from_slice(p);
    q
}

/// Clips a closed loop against a·x ≤ b. Edge k runs from pts[k] to
/// pts[k+1] and carries labels[k]; the new edge along the plane gets `new`.
fn clip_loop(
    pts: &[[f64; 3]],
    labels: &[usize],
    a: [f64; 3],
    b: f64,
    new: usize,
    eps: f64,
) -> (Vec<[f64; 3]>, Vec<usize>) {
    let n = pts.len();
    let dist: Vec<f64> = pts.iter().map(|p| dot3(a, *p) - b).collect();
    let mut out = Vec::with_capacity(n + 1);
    let mut lab = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        let (di, dj) = (dist[i], dist[j]);
        let cut = |t: f64| {
            let (p, q) = (pts[i], pts[j]);
            [
                p[0] + t * (q[0] - p[0]),
                p[1] + t * (q[1] - p[1]),
                p[2] + t * (q[2] - p[2]),
            ]
        };
        if di <= eps {
            out.push(pts[i]);
            if dj > eps {
                let t = if di < 0.0 { di / (di - dj) } else { 0.0 };
                lab.push(labels[i]);
                out.push(cut(t));
                lab.push(new);
            } else {
                lab.push(labels[i]);
            }
        } else if dj <= eps {
            let t = if dj < 0.0 { di / (di - dj) } else { 1.0 };
            out.push(cut(t));
            lab.push(labels[i]);
        }
    }
    dedupe_loop(out, lab, eps)
}

/// Removes zero-length edges, keeping the label of the surviving edge.
fn dedupe_loop(
    mut pts: Vec<[f64; 3]>,
    mut lab: Vec<usize>,
    eps: f64,
) -> (Vec<[f64; 3]>, Vec<usize>) {
    let mut changed = true;
    while changed && pts.len() > 1 {
        changed = false;
        let n = pts.len();
        for k in 0..n {
            if dist3(pts[k], pts[(k + 1) % n]) <= eps {
                pts.remove(k);
                lab.remove(k);
                changed = true;
                break;
            }
        }
    }
    (pts, lab)
}

fn newell(pts: &[[f64; 3]]) -> [f64; 3] {
    let mut s = [0.0; 3];
    for k in 0..pts.len() {
        let c = cross(pts[k], pts[(k + 1) % pts.len()]);
        s = [s[0] + c[0], s[1] + c[1], s[2] + c[2]];
    }
    s
}

/// Area and area centroid of a planar polygon in R^3.
fn polygon_area_centroid(pts: &[[f64; 3]]) -> (f64, [f64; 3]) {
    let n = newell(pts);
    let area = 0.5 * norm3(n);
    if area <= 0.0 {
        let m = pts.len() as f64;
        let c = pts.iter().fold([0.0; 3], |s, p| {
            [s[0] + p[0] / m, s[1] + p[1] / m, s[2] + p[2] / m]
        });
        return (0.0, c);
    }
    let u = [
        n[0] / (2.0 * area),
        n[1] / (2.0 * area),
        n[2] / (2.0 * area),
    ];
    let o = pts[0];
    let mut c = [0.0; 3];
    let mut total = 0.0;
    for k in 1..pts.len() - 1 {
        let t = 0.5 * dot3(cross(sub3(pts[k], o), sub3(pts[k + 1], o)), u);
        for a in 0..3 {
            c[a] += t * (o[a] + pts[k][a] + pts[k + 1][a]) / 3.0;
        }
        total += t;
    }
    (area, [c[0] / total, c[1] / total, c[2] / total])
}

struct Face {
    label: usize,
    pts: Vec<[f64; 3]>,
    nbr: Vec<usize>,
}

fn unit_normals(normals: &[Vec<f64>], offsets: &[f64]) -> Result<(Vec<[f64; 3]>, Vec<f64>)> {
    let mut ns = Vec::with_capacity(normals.len());
    let mut bs = Vec::with_capacity(normals.len());
    for (a, b) in normals.iter().zip(offsets) {
        let r = dot(a, a).sqrt();
        if !(r > 0.0) || !r.is_finite() || !b.is_finite() {
            return invalid("half-space normals must be finite and nonzero");
        }
        let a3 = to3(a);
        ns.push([a3[0] / r, a3[1] / r, a3[2] / r]);
        bs.push(b / r);
    }
    Ok((ns, bs))
}

impl Polytope {
    /// Convex hull of a finite point set.
    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("polytopes in dimension {dim}")));
        }
        if points
            .iter()
            .any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite()))
        {
            return invalid("polytope vertices must be finite points of the right dimension");
        }
        if points.len() < dim + 1 {
            return Err(Error::Degenerate(format!(
                "{} points cannot span R^{dim}",
                points.len()
            )));
        }
        let scale = points
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1e-300);
        match dim {
            1 => {
                let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = points
                    .iter()
                    .map(|p| p[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                if hi - lo <= 1e-12 * scale {
                    return Err(Error::Degenerate("segment of zero length".into()));
                }
                Ok(Polytope {
                    dim: 1,
                    vertices: vec![vec![lo], vec![hi]],
                    facets: vec![
                        Facet {
                            normal: vec![-1.0],
                            offset: -lo,
                            area: 1.0,
                            centroid: vec![lo],
                            label: 0,
                        },
                        Facet {
                            normal: vec![1.0],
                            offset: hi,
                            area: 1.0,
                            centroid: vec![hi],
                            label: 1,
                        },
                    ],
                    ridges: vec![],
                })
            }
            2 => {
                let hull = hull2(points, 1e-12 * scale);
                if hull.len() < 3 {
                    return Err(Error::Degenerate("points are collinear".into()));
                }
                let pts: Vec<[f64; 3]> = hull.iter().map(|p| [p[0], p[1], 0.0]).collect();
                let labels: Vec<usize> = (0..pts.len()).collect();
                let p = Self::from_loop2(&pts, &labels)?;
                if p.volume() <= 1e-12 * scale * scale {
                    return Err(Error::Degenerate("polygon area below 1e-12".into()));
                }
                Ok(p)
            }
            _ => {
                let (normals, offsets) = hull3_planes(points, 1e-10 * scale)?;
                let p = Self::from_halfspaces(3, &normals, &offsets)?;
                if p.volume() <= 1e-12 * scale.powi(3) {
                    return Err(Error::Degenerate("polytope volume below 1e-12".into()));
                }
                Ok(p)
            }
        }
    }

    /// Bounded intersection of half-spaces aᵢ·x ≤ bᵢ. Facet labels are the
    /// indices of the half-spaces that support a facet of positive area.
    pub fn from_halfspaces(dim: usize, normals: &[Vec<f64>], offsets: &[f64]) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("polytopes in dimension {dim}")));
        }
        if normals.len() != offsets.len() || normals.iter().any(|a| a.len() != dim) {
            return invalid("half-space normals and offsets are inconsistent");
        }
        let (ns, bs) = unit_normals(normals, offsets)?;
        let scale = bs.iter().fold(0.0f64, |m, b| m.max(b.abs())).max(1e-12);
        let big = 1e4 * scale;
        let eps = 1e-11 * scale;
        match dim {
            1 => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                let (mut llo, mut lhi) = (BOX_LABEL, BOX_LABEL);
                for (i, (a, b)) in ns.iter().zip(&bs).enumerate() {
                    if a[0] > 0.0 && *b < hi {
                        hi = *b;
                        lhi = i;
                    } else if a[0] < 0.0 && -*b > lo {
                        lo = -*b;
                        llo = i;
                    }
                }
                if llo == BOX_LABEL || lhi == BOX_LABEL {
                    return Err(Error::Degenerate("unbounded intersection".into()));
                }
                if hi - lo <= eps {
                    return Err(Error::Degenerate("empty or flat intersection".into()));
                }
                Ok(Polytope {
                    dim: 1,
                    vertices: vec![vec![lo], vec![hi]],
                    facets: vec![
                        Facet {
                            normal: vec![-1.0],
                            offset: -lo,
                            area: 1.0,
                            centroid: vec![lo],
                            label: llo,
                        },
                        Facet {
                            normal: vec![1.0],
                            offset: hi,
                            area: 1.0,
                            centroid: vec![hi],
                            label: lhi,
                        },
                    ],
                    ridges: vec![],
                })
            }
            2 => {
                let mut pts = vec![
                    [-big, -big, 0.0],
                    [big, -big, 0.0],
                    [big, big, 0.0],
                    [-big, big, 0.0],
                ];
                let mut labels = vec![BOX_LABEL; 4];
                for (i, (a, b)) in ns.iter().zip(&bs).enumerate() {
                    if pts.iter().all(|p| dot3(*a, *p) - b <= eps) {
                        continue;
                    }
                    let (p, l) = clip_loop(&pts, &labels, *a, *b, i, eps);
                    pts = p;
                    labels = l;
                    if pts.len() < 3 {
                        return Err(Error::Degenerate("empty or flat intersection".into()));
                    }
                }
                if labels.contains(&BOX_LABEL) {
                    return Err(Error::Degenerate("unbounded intersection".into()));
                }
                Self::from_loop2(&pts, &labels)
            }
            _ => Self::clip3(&ns, &bs, big, eps),
        }
    }

    /// Polygon from a counter-clockwise loop whose edge k carries labels[k].
    fn from_loop2(pts: &[[f64; 3]], labels: &[usize]) -> Result<Self> {
        // merge consecutive edges with equal labels
        let n = pts.len();
        let mut start = 0;
        while n > 1 && labels[(start + n - 1) % n] == labels[start] && start < n {
            start += 1;
            if start == n {
                return Err(Error::Degenerate("polygon with a single edge label".into()));
            }
        }
        let mut verts: Vec<[f64; 3]> = Vec::new();
        let mut labs: Vec<usize> = Vec::new();
        for k in 0..n {
            let i = (start + k) % n;
            if k > 0 && labels[i] == *labs.last().unwrap() {
                continue;
            }
            verts.push(pts[i]);
            labs.push(labels[i]);
        }
        let m = verts.len();
        if m < 3 {
            return Err(Error::Degenerate(
                "polygon has fewer than three edges".into(),
            ));
        }
        let mut facets = Vec::with_capacity(m);
        for k in 0..m {
            let (p, q) = (verts[k], verts[(k + 1) % m]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len = (dx * dx + dy * dy).sqrt();
            if len <= 0.0 {
                return Err(Error::Degenerate("zero-length polygon edge".into()));
            }
            let nrm = vec![dy / len, -dx / len];
            let offset = nrm[0] * p[0] + nrm[1] * p[1];
            facets.push(Facet {
                normal: nrm,
                offset,
                area: len,
                centroid: vec![0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])],
                label: labs[k],
            });
        }
        let ridges = (0..m)
            .map(|k| Ridge {
                facets: ((k + m - 1) % m, k),
                measure: 1.0,
            })
            .collect();
        Ok(Polytope {
            dim: 2,
            vertices: verts.iter().map(|p| vec![p[0], p[1]]).collect(),
            facets,
            ridges,
        })
    }

    fn clip3(ns: &[[f64; 3]], bs: &[f64], big: f64, eps: f64) -> Result<Self> {
        let c = |x: f64, y: f64, z: f64| [x * big, y * big, z * big];
        let quad = |label: usize, p: [[f64; 3]; 4]| Face {
            label,
            pts: p.to_vec(),
            nbr: vec![BOX_LABEL; 4],
        };
        let mut faces = vec![
            quad(
                BOX_LABEL,
                [
                    c(-1., -1., -1.),
                    c(-1., 1., -1.),
                    c(1., 1., -1.),
                    c(1., -1., -1.),
                ],
            ),
            quad(
                BOX_LABEL,
                [
                    c(-1., -1., 1.),
                    c(1., -1., 1.),
                    c(1., 1., 1.),
                    c(-1., 1., 1.),
                ],
            ),
            quad(
                BOX_LABEL,
                [
                    c(-1., -1., -1.),
                    c(1., -1., -1.),
                    c(1., -1., 1.),
                    c(-1., -1., 1.),
                ],
            ),
            quad(
                BOX_LABEL,
                [
                    c(-1., 1., -1.),
                    c(-1., 1., 1.),
                    c(1., 1., 1.),
                    c(1., 1., -1.),
                ],
            ),
            quad(
                BOX_LABEL,
                [
                    c(-1., -1., -1.),
                    c(-1., -1., 1.),
                    c(-1., 1., 1.),
                    c(-1., 1., -1.),
                ],
            ),
            quad(
                BOX_LABEL,
                [
                    c(1., -1., -1.),
                    c(1., 1., -1.),
                    c(1., 1., 1.),
                    c(1., -1., 1.),
                ],
            ),
        ];
        for (i, (a, b)) in ns.iter().zip(bs).enumerate() {
            let outside = faces
                .iter()
                .any(|f| f.pts.iter().any(|p| dot3(*a, *p) - b > eps));
            if !outside {
                continue;
            }
            let mut next = Vec::with_capacity(faces.len() + 1);
            let mut segments: Vec<([f64; 3], [f64; 3], usize)> = Vec::new();
            for f in &faces {
                let (pts, nbr) = clip_loop(&f.pts, &f.nbr, *a, *b, i, eps);
                if pts.len() < 3 {
                    continue;
                }
                for k in 0..pts.len() {
                    if nbr[k] == i {
                        segments.push((pts[k], pts[(k + 1) % pts.len()], f.label));
                    }
                }
                next.push(Face {
                    label: f.label,
                    pts,
                    nbr,
                });
            }
            if let Some(cap) = cap_face(&segments, *a, i, eps) {
                next.push(cap);
            }
            faces = next;
            if faces.len() < 4 {
                return Err(Error::Degenerate("empty or flat intersection".into()));
            }
        }
        let mut kept: Vec<(Face, f64, [f64; 3])> = Vec::new();
        for f in faces {
            let (area, cen) = polygon_area_centroid(&f.pts);
            if area > eps * eps {
                kept.push((f, area, cen));
            }
        }
        if kept.iter().any(|(f, _, _)| f.label == BOX_LABEL) {
            return Err(Error::Degenerate("unbounded intersection".into()));
        }
        let index: BTreeMap<usize, usize> = kept
            .iter()
            .enumerate()
            .map(|(k, (f, _, _))| (f.label, k))
            .collect();
        let mut ridge_len: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut vertices: Vec<[f64; 3]> = Vec::new();
        for (k, (f, _, _)) in kept.iter().enumerate() {
            for e in 0..f.pts.len() {
                let p = f.pts[e];
                if !vertices.iter().any(|v| dist3(*v, p) <= 10.0 * eps) {
                    vertices.push(p);
                }
                if let Some(&j) = index.get(&f.nbr[e]) {
                    let len = dist3(p, f.pts[(e + 1) % f.pts.len()]);
                    *ridge_len.entry((k.min(j), k.max(j))).or_insert(0.0) += 0.5 * len;
                }
            }
        }
        let facets = kept
            .iter()
            .map(|(f, area, cen)| {
                let a = ns[f.label];
                Facet {
                    normal: a.to_vec(),
                    offset: bs[f.label],
                    area: *area,
                    centroid: cen.to_vec(),
                    label: f.label,
                }
            })
            .collect();
        let ridges = ridge_len
            .into_iter()
            .filter(|(_, m)| *m > 0.0)
            .map(|((i, j), m)| Ridge {
                facets: (i, j),
                measure: m,
            })
            .collect();
        Ok(Polytope {
            dim: 3,
            vertices: vertices.iter().map(|v| v.to_vec()).collect(),
            facets,
            ridges,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn ridges(&self) -> &[Ridge] {
        &self.ridges
    }

    /// h_P(u) = max over vertices of u·x.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn scale(&self) -> f64 {
        self.vertices
            .iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1e-300)
    }

    pub fn contains_origin_interior(&self) -> bool {
        let tol = 1e-12 * self.scale();
        self.facets.iter().all(|f| f.offset > tol)
    }

    /// ‖x‖_P = max over facets of (x·n)/h_P(n); needs the origin inside.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        if !self.contains_origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        Ok(self.gauge_unchecked(x))
    }

    pub(crate) fn gauge_unchecked(&self, x: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| dot(&f.normal, x) / f.offset)
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }

    /// Exact volume by the cone decomposition Σ area·offset/d.
    pub fn volume(&self) -> f64 {
        self.facets.iter().map(|f| f.area * f.offset).sum::<f64>() / self.dim as f64
    }

    /// Surface area (perimeter in the plane).
    pub fn surface_area(&self) -> f64 {
        self.facets.iter().map(|f| f.area).sum()
    }

    pub fn centroid(&self) -> Vec<f64> {
        let d = self.dim as f64;
        let mut c = vec![0.0; self.dim];
        let mut vol = 0.0;
        for f in &self.facets {
            let v = f.area * f.offset / d;
            vol += v;
            for (ci, fi) in c.iter_mut().zip(&f.centroid) {
                *ci += v * d / (d + 1.0) * fi;
            }
        }
        c.iter_mut().for_each(|x| *x /= vol);
        c
    }

    /// Image under x ↦ Ax.
    pub fn transform(&self, a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return invalid("matrix size does not match polytope dimension");
        }
        let pts: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| {
                (0..self.dim)
                    .map(|i| (0..self.dim).map(|j| a[(i, j)] * v[j]).sum())
                    .collect()
            })
            .collect();
        Self::from_points(self.dim, &pts)
    }

    pub fn translate(&self, t: &[f64]) -> Result<Self> {
        let pts: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(t).map(|(x, s)| x + s).collect())
            .collect();
        Self::from_points(self.dim, &pts)
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        let pts: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * s).collect())
            .collect();
        Self::from_points(self.dim, &pts)
    }

    /// Polar body {y : y·v ≤ 1 for all vertices v}.
    pub fn polar(&self) -> Result<Self> {
        if !self.contains_origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        let offsets = vec![1.0; self.vertices.len()];
        Self::from_halfspaces(self.dim, &self.vertices, &offsets)
    }
}

/// Cap polygon closing a clipped polyhedron; edges are the reversed cut
/// segments of the neighbouring faces.
fn cap_face(
    segments: &[([f64; 3], [f64; 3], usize)],
    a: [f64; 3],
    label: usize,
    eps: f64,
) -> Option<Face> {
    if segments.len() < 3 {
        return None;
    }
    let tol = 10.0 * eps;
    let mut pts: Vec<[f64; 3]> = Vec::new();
    for (s, e, _) in segments {
        for p in [s, e] {
            if !pts.iter().any(|q| dist3(*q, *p) <= tol) {
                pts.push(*p);
            }
        }
    }
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let cen = pts.iter().fold([0.0; 3], |s, p| {
        [s[0] + p[0] / m, s[1] + p[1] / m, s[2] + p[2] / m]
    });
    let helper = if a[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = cross(helper, a);
    let e1 = [e1[0] / norm3(e1), e1[1] / norm3(e1), e1[2] / norm3(e1)];
    let e2 = cross(a, e1);
    let mut ang: Vec<(f64, [f64; 3])> = pts
        .iter()
        .map(|p| {
            let r = sub3(*p, cen);
            (dot3(r, e2).atan2(dot3(r, e1)), *p)
        })
        .collect();
    ang.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let pts: Vec<[f64; 3]> = ang.into_iter().map(|(_, p)| p).collect();
    let n = pts.len();
    let nbr = (0..n)
        .map(|k| {
            let (u, v) = (pts[k], pts[(k + 1) % n]);
            segments
                .iter()
                .map(|(s, e, f)| {
                    (
                        (dist3(*s, v) + dist3(*e, u)).min(dist3(*s, u) + dist3(*e, v)),
                        *f,
                    )
                })
                .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
                .filter(|(d, _)| *d <= 2.0 * tol)
                .map(|(_, f)| f)
                .unwrap_or(UNKNOWN_LABEL)
        })
        .collect();
    Some(Face { label, pts, nbr })
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// collinear points.
fn hull2(points: &[Vec<f64>], eps: f64) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = points.iter().map(|v| [v[0], v[1]]).collect();
    p.sort_by(|a, b| a.partial_cmp(b).unwrap());
    p.dedup_by(|a, b| (a[0] - b[0]).abs() <= eps && (a[1] - b[1]).abs() <= eps);
    if p.len() < 3 {
        return p;
    }
    let turn = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let len = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let left =
        |o: [f64; 2], a: [f64; 2], b: [f64; 2]| turn(o, a, b) > 1e-12 * len(o, a) * len(o, b);
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && !left(lower[lower.len() - 2], lower[lower.len() - 1], q) {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && !left(upper[upper.len() - 2], upper[upper.len() - 1], q) {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Supporting planes of the hull of a 3-D point set by exhaustive search.
fn hull3_planes(points: &[Vec<f64>], eps: f64) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let p: Vec<[f64; 3]> = points.iter().map(|v| to3(v)).collect();
    let n = p.len();
    let mut planes: Vec<([f64; 3], f64)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (e1, e2) = (sub3(p[j], p[i]), sub3(p[k], p[i]));
                let nrm = cross(e1, e2);
                let r = norm3(nrm);
                if r <= 1e-10 * norm3(e1) * norm3(e2) {
                    continue;
                }
                let u = [nrm[0] / r, nrm[1] / r, nrm[2] / r];
                let c = dot3(u, p[i]);
                let above = p.iter().any(|q| dot3(u, *q) - c > eps);
                let below = p.iter().any(|q| dot3(u, *q) - c < -eps);
                let (u, c) = match (above, below) {
                    (false, false) => return Err(Error::Degenerate("points are coplanar".into())),
                    (false, true) => (u, c),
                    (true, false) => ([-u[0], -u[1], -u[2]], -c),
                    (true, true) => continue,
                };
                if !planes
                    .iter()
                    .any(|(v, d)| dist3(*v, u) < 1e-9 && (d - c).abs() <= eps)
                {
                    planes.push((u, c));
                }
            }
        }
    }
    if planes.len() < 4 {
        return Err(Error::Degenerate("points do not span R^3".into()));
    }
    Ok((
        planes.iter().map(|(u, _)| u.to_vec()).collect(),
        planes.iter().map(|(_, c)| *c).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square(a: f64) -> Polytope {
        Polytope::from_points(
            2,
            &[
                vec![-a, -a],
                vec![a, -a],
                vec![a, a],
                vec![-a, a],
                vec![0.0, 0.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn square_facets() {
        let s = square(1.0);
        assert_eq!(s.facets().len(), 4);
        assert_relative_eq!(s.volume(), 4.0);
        for f in s.facets() {
            assert_relative_eq!(f.area, 2.0);
            assert_relative_eq!(f.offset, 1.0);
        }
        assert_eq!(s.ridges().len(), 4);
        assert_relative_eq!(s.gauge(&[2.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn triangle_normals() {
        let t =
            Polytope::from_points(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mut areas: Vec<f64> = t.facets().iter().map(|f| f.area).collect();
        areas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(areas[0], 1.0);
        assert_relative_eq!(areas[2], 2f64.sqrt());
        assert!(!t.contains_origin_interior());
        let c = t.centroid();
        assert_relative_eq!(c[0], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let c = square(1.0).polar().unwrap();
        assert_eq!(c.vertices().len(), 4);
        assert_relative_eq!(c.volume(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(c.support(&[1.0, 1.0]), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn cube_and_octahedron() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push(vec![
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        let cube = Polytope::from_points(3, &pts).unwrap();
        assert_eq!(cube.facets().len(), 6);
        for f in cube.facets() {
            assert_relative_eq!(f.area, 4.0, max_relative = 1e-10);
        }
        assert_relative_eq!(cube.volume(), 8.0, max_relative = 1e-10);
        assert_eq!(cube.vertices().len(), 8);
        assert_eq!(cube.ridges().len(), 12);
        for r in cube.ridges() {
            assert_relative_eq!(r.measure, 2.0, max_relative = 1e-10);
        }
        let oct = cube.polar().unwrap();
        assert_eq!(oct.facets().len(), 8);
        assert_eq!(oct.vertices().len(), 6);
        assert_relative_eq!(oct.volume(), 4.0 / 3.0, max_relative = 1e-10);
        let back = oct.polar().unwrap();
        assert_relative_eq!(back.volume(), 8.0, max_relative = 1e-10);
    }

    #[test]
    fn tetrahedron_centroid_and_volume() {
        let t = Polytope::from_points(
            3,
            &[
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.1, 0.1, 0.1],
            ],
        )
        .unwrap();
        assert_eq!(t.facets().len(), 4);
        assert_relative_eq!(t.volume(), 1.0 / 6.0, max_relative = 1e-12);
        for c in t.centroid() {
            assert_relative_eq!(c, 0.25, max_relative = 1e-12);
        }
    }

    #[test]
    fn halfspaces_with_redundancy_and_labels() {
        let normals = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![-1.0, 0.0],
            vec![0.0, -1.0],
            vec![1.0, 1.0],
        ];
        let offsets = vec![1.0, 1.0, 1.0, 1.0, 5.0];
        let p = Polytope::from_halfspaces(2, &normals, &offsets).unwrap();
        let mut labels: Vec<usize> = p.facets().iter().map(|f| f.label).collect();
        labels.sort();
        assert_eq!(labels, vec![0, 1, 2, 3]);
        assert!(Polytope::from_halfspaces(2, &normals[..2], &offsets[..2]).is_err());
    }

    #[test]
    fn degenerate_inputs() {
        assert!(
            Polytope::from_points(2, &[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_err()
        );
        assert!(Polytope::from_points(
            3,
            &[
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![1.0, 1.0, 0.0]
            ]
        )
        .is_err());
        assert!(Polytope::from_points(4, &vec![vec![0.0; 4]; 5]).is_err());
    }
}
