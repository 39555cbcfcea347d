//! Hexagonal-lattice constellation construction, neighbour statistics, and
//! maximum-likelihood decision regions.
//!
//! Symbols live on the triangular grid spanned by v1 = [d/2, sqrt(3) d/2] and
//! v2 = [d/2, -sqrt(3) d/2]. A constellation is a finite subset of the grid,
//! re-centred on its centroid and scaled to unit average symbol energy.
//!
//! Shape selection:
//! * irregular: the M grid points nearest to the best of three canonical
//!   trial centres (triangle centre, edge midpoint, grid point), judged by
//!   the moment of inertia of the resulting set;
//! * regular, M in {4, 8, 16, 32}: fixed documented shapes (the 8-point
//!   shape is a centred hexagon plus one satellite and is the only one that
//!   is not point-symmetric);
//! * regular, M >= 64: greedy orbit selection about an edge midpoint,
//!   constrained to point symmetry.

use crate::error::{Error, Result};
use crate::geom::{HalfPlane, TaggedPolygon, Vec2};

/// Integer coordinates on the hexagonal grid; the plane position is
/// `n1 * v1 + n2 * v2` (plus the shape offset).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeIndex {
    pub n1: i32,
    pub n2: i32,
}

impl LatticeIndex {
    /// Plane position for grid pitch `d`.
    pub fn position(&self, d: f64) -> Vec2 {
        let s = (self.n1 + self.n2) as f64;
        let t = (self.n1 - self.n2) as f64;
        Vec2::new(0.5 * d * s, 0.5 * 3f64.sqrt() * d * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    RegularHqam,
    IrregularHqam,
    ThreePsk,
}

impl ConstellationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstellationKind::RegularHqam => "regular",
            ConstellationKind::IrregularHqam => "irregular",
            ConstellationKind::ThreePsk => "3psk",
        }
    }
}

/// Energy-normalized symbol set.
#[derive(Debug, Clone)]
pub struct Constellation {
    pub kind: ConstellationKind,
    /// Symbol coordinates, zero-mean, unit average squared norm.
    pub points: Vec<Vec2>,
    /// Minimum pairwise distance after normalization.
    pub d_min: f64,
    /// Mean squared norm (1 up to rounding).
    pub avg_energy: f64,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.points.len()
    }
}

/// Average neighbour counts and the SNR scale factor of a symbol set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborStats {
    /// Average number of nearest neighbours.
    pub a: f64,
    /// Average number of adjacent nearest-neighbour pairs (pairs of NNs of a
    /// symbol that are also NNs of each other).
    pub a_c: f64,
    /// d_min^2 / (2 * average energy).
    pub alpha: f64,
}

pub const SUPPORTED_ORDERS: &[usize] = &[3, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048];

const DIST_TOL_FACTOR: f64 = 1e-9;

// Documented shapes, as grid indices (pitch d = 1).
const SHAPE_3PSK: &[(i32, i32)] = &[(0, 0), (1, 0), (1, 1)];
const SHAPE_R4: &[(i32, i32)] = &[(0, 0), (1, 1), (1, 0), (2, 1)];
const SHAPE_R8: &[(i32, i32)] = &[
    (0, 0),
    (1, 0),
    (0, 1),
    (1, 1),
    (-1, 0),
    (0, -1),
    (-1, -1),
    (2, 1),
];
const SHAPE_R16: &[(i32, i32)] = &[
    (0, 0),
    (1, 1),
    (2, 2),
    (3, 3),
    (1, 0),
    (2, 1),
    (3, 2),
    (4, 3),
    (1, -1),
    (2, 0),
    (3, 1),
    (4, 2),
    (2, -1),
    (3, 0),
    (4, 1),
    (5, 2),
];
const SHAPE_R32: &[(i32, i32)] = &[
    (-3, -1),
    (-2, -2),
    (-2, -1),
    (-2, 0),
    (-2, 1),
    (-1, -2),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (-1, 2),
    (0, -2),
    (0, -1),
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, -2),
    (1, -1),
    (1, 0),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, -1),
    (2, 0),
    (2, 1),
    (2, 2),
    (2, 3),
    (3, 0),
    (3, 1),
    (3, 2),
    (3, 3),
    (4, 2),
];

/// Build a constellation of order `m`.
pub fn build_constellation(m: usize, kind: ConstellationKind) -> Result<Constellation> {
    if !SUPPORTED_ORDERS.contains(&m) {
        return Err(Error::UnsupportedOrder(m));
    }
    let raw: Vec<Vec2> = match kind {
        ConstellationKind::ThreePsk => {
            if m != 3 {
                return Err(Error::UnsupportedOrder(m));
            }
            shape_points(SHAPE_3PSK)
        }
        ConstellationKind::RegularHqam => match m {
            3 => return Err(Error::ShapeUnavailable { order: m }),
            4 => shape_points(SHAPE_R4),
            8 => shape_points(SHAPE_R8),
            16 => shape_points(SHAPE_R16),
            32 => shape_points(SHAPE_R32),
            _ => select_symmetric(m)?,
        },
        ConstellationKind::IrregularHqam => select_greedy(m),
    };
    Ok(finalize(kind, raw))
}

fn shape_points(shape: &[(i32, i32)]) -> Vec<Vec2> {
    shape
        .iter()
        .map(|&(n1, n2)| LatticeIndex { n1, n2 }.position(1.0))
        .collect()
}

/// Re-centre on the centroid, scale to unit average energy, sort canonically.
fn finalize(kind: ConstellationKind, raw: Vec<Vec2>) -> Constellation {
    let m = raw.len() as f64;
    let mut centroid = Vec2::ZERO;
    for p in &raw {
        centroid = centroid + *p;
    }
    centroid = centroid * (1.0 / m);
    let centred: Vec<Vec2> = raw.iter().map(|&p| p - centroid).collect();
    let energy: f64 = centred.iter().map(|p| p.norm_sq()).sum::<f64>() / m;
    let scale = 1.0 / energy.sqrt();
    let mut points: Vec<Vec2> = centred.iter().map(|&p| p * scale).collect();
    points.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    let d_min = min_pairwise_distance(&points);
    let avg_energy = points.iter().map(|p| p.norm_sq()).sum::<f64>() / m;
    Constellation {
        kind,
        points,
        d_min,
        avg_energy,
    }
}

fn min_pairwise_distance(points: &[Vec2]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].distance(points[j]);
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Grid points (pitch 1) within `radius` of the origin neighbourhood,
/// as (index, position) pairs.
fn grid_candidates(radius: f64) -> Vec<(LatticeIndex, Vec2)> {
    let n_max = (2.0 * radius) as i32 + 3;
    let r_sq = (radius + 1.5) * (radius + 1.5);
    let mut out = Vec::new();
    for n1 in -n_max..=n_max {
        for n2 in -n_max..=n_max {
            let idx = LatticeIndex { n1, n2 };
            let p = idx.position(1.0);
            if p.norm_sq() <= r_sq {
                out.push((idx, p));
            }
        }
    }
    out
}

fn selection_radius(m: usize) -> f64 {
    0.62 * (m as f64).sqrt() + 4.0
}

/// Sort candidates by squared distance from `center`, breaking ties by angle
/// about the centre, then by n1, then by n2.
fn sort_candidates(cands: &mut [(LatticeIndex, Vec2)], center: Vec2) {
    cands.sort_by(|(ia, pa), (ib, pb)| {
        let da = (*pa - center).norm_sq();
        let db = (*pb - center).norm_sq();
        da.total_cmp(&db)
            .then_with(|| (*pa - center).angle().total_cmp(&(*pb - center).angle()))
            .then(ia.n1.cmp(&ib.n1))
            .then(ia.n2.cmp(&ib.n2))
    });
}

fn moment_about_centroid(points: &[Vec2]) -> f64 {
    let m = points.len() as f64;
    let mut c = Vec2::ZERO;
    for p in points {
        c = c + *p;
    }
    c = c * (1.0 / m);
    points.iter().map(|p| (*p - c).norm_sq()).sum()
}

/// Energy-minimal greedy selection: take the `m` grid points nearest to each
/// canonical trial centre and keep the set with the smallest moment of
/// inertia about its own centroid.
fn select_greedy(m: usize) -> Vec<Vec2> {
    let h = 3f64.sqrt() / 2.0;
    // triangle centre (deep hole), edge midpoint, grid point
    let centers = [
        Vec2::new(0.5, h / 3.0),
        Vec2::new(0.5, 0.0),
        Vec2::new(0.0, 0.0),
    ];
    let mut best: Option<(f64, Vec<Vec2>)> = None;
    for &c in &centers {
        let mut cands = grid_candidates(selection_radius(m));
        sort_candidates(&mut cands, c);
        let sel: Vec<Vec2> = cands.iter().take(m).map(|(_, p)| *p).collect();
        let mom = moment_about_centroid(&sel);
        let better = match &best {
            None => true,
            Some((best_mom, _)) => mom < best_mom - 1e-9,
        };
        if better {
            best = Some((mom, sel));
        }
    }
    best.unwrap().1
}

/// Greedy selection constrained to point symmetry: grid points come in
/// reflection orbits about an edge midpoint; whole orbits are taken in order
/// of distance until `m` points are chosen.
fn select_symmetric(m: usize) -> Result<Vec<Vec2>> {
    if m % 2 != 0 {
        return Err(Error::ShapeUnavailable { order: m });
    }
    let center = Vec2::new(0.5, 0.0);
    let mut cands = grid_candidates(selection_radius(m));
    sort_candidates(&mut cands, center);
    let mut chosen: Vec<Vec2> = Vec::with_capacity(m);
    let mut used: Vec<LatticeIndex> = Vec::new();
    for (idx, p) in cands {
        if chosen.len() >= m {
            break;
        }
        if used.contains(&idx) {
            continue;
        }
        // reflection through (1/2, 0): (x, y) -> (1 - x, -y), i.e.
        // (n1, n2) -> (1 - n1, 1 - n2) on grid indices
        let ridx = LatticeIndex {
            n1: 1 - idx.n1,
            n2: 1 - idx.n2,
        };
        if ridx == idx {
            continue; // a fixed point cannot occur on the grid, but be safe
        }
        used.push(idx);
        used.push(ridx);
        chosen.push(p);
        chosen.push(ridx.position(1.0));
    }
    if chosen.len() != m {
        return Err(Error::ShapeUnavailable { order: m });
    }
    Ok(chosen)
}

/// Neighbour statistics of a constellation.
pub fn neighbor_stats(c: &Constellation) -> NeighborStats {
    NeighborStats::from_points(&c.points)
}

impl NeighborStats {
    /// Neighbour statistics of an arbitrary symbol set (not necessarily
    /// normalized). Distances equal to the minimum within a relative
    /// tolerance of 1e-9 count as nearest-neighbour pairs.
    pub fn from_points(points: &[Vec2]) -> NeighborStats {
        let m = points.len();
        let d_min = min_pairwise_distance(points);
        let tol = DIST_TOL_FACTOR * d_min;
        let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); m];
        for i in 0..m {
            for j in i + 1..m {
                if points[i].distance(points[j]) <= d_min + tol {
                    neighbours[i].push(j);
                    neighbours[j].push(i);
                }
            }
        }
        let total_nn: usize = neighbours.iter().map(Vec::len).sum();
        let mut adjacent_pairs = 0usize;
        for nb in &neighbours {
            for (k, &j) in nb.iter().enumerate() {
                for &l in &nb[k + 1..] {
                    if points[j].distance(points[l]) <= d_min + tol {
                        adjacent_pairs += 1;
                    }
                }
            }
        }
        let energy = points.iter().map(|p| p.norm_sq()).sum::<f64>() / m as f64;
        NeighborStats {
            a: total_nn as f64 / m as f64,
            a_c: adjacent_pairs as f64 / m as f64,
            alpha: d_min * d_min / (2.0 * energy),
        }
    }
}

// ---------------------------------------------------------------------------
// Decision regions
// ---------------------------------------------------------------------------

/// Convex maximum-likelihood cell of one symbol. Open cells carry the two
/// ray directions that close the boundary at infinity:
/// `(from vertices[0] outward, from vertices[last] outward)`.
#[derive(Debug, Clone)]
pub struct DecisionRegion {
    pub symbol_index: usize,
    /// Finite vertices, counter-clockwise.
    pub vertices: Vec<Vec2>,
    pub unbounded_dirs: Option<(Vec2, Vec2)>,
    supports: Vec<HalfPlane>,
}

impl DecisionRegion {
    pub fn is_bounded(&self) -> bool {
        self.unbounded_dirs.is_none()
    }

    /// Supporting bisector half-planes (unit normals).
    pub fn supports(&self) -> &[HalfPlane] {
        &self.supports
    }

    /// Membership in the constructed cell, within absolute distance `tol`
    /// of the boundary.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.supports.iter().all(|h| h.signed_excess(p) <= tol)
    }
}

/// Voronoi cells of all symbols, by half-plane intersection against a large
/// working box; box contact identifies open cells.
pub fn decision_regions(c: &Constellation) -> Vec<DecisionRegion> {
    let m = c.points.len();
    let coord_scale = c
        .points
        .iter()
        .map(|p| p.norm())
        .fold(0.0f64, f64::max)
        .max(c.d_min);
    let box_r = 1e6 * (coord_scale + 1.0);
    let on_box = |v: Vec2| v.x.abs().max(v.y.abs()) >= box_r * (1.0 - 1e-6);

    (0..m)
        .map(|i| {
            let mut poly = TaggedPolygon::rectangle(Vec2::ZERO, box_r, box_r, m);
            let mut planes: Vec<Option<HalfPlane>> = vec![None; m];
            for j in 0..m {
                if j == i {
                    continue;
                }
                let h = HalfPlane::bisector(c.points[i], c.points[j]);
                planes[j] = Some(h);
                poly = poly.clip(&h, j);
            }
            poly.dedup(1e-7 * c.d_min);
            assert!(!poly.is_empty(), "cell {i} collapsed");

            let n = poly.vertices.len();
            let artificial: Vec<bool> = poly.vertices.iter().map(|&v| on_box(v)).collect();
            let n_real = artificial.iter().filter(|a| !**a).count();

            let normalize = |h: HalfPlane| {
                let s = 1.0 / h.normal.norm();
                HalfPlane {
                    normal: h.normal * s,
                    offset: h.offset * s,
                }
            };
            let mut supports: Vec<HalfPlane> = Vec::new();
            let mut seen: Vec<usize> = Vec::new();
            for &t in &poly.edge_tags {
                if t < m && !seen.contains(&t) {
                    seen.push(t);
                    supports.push(normalize(planes[t].unwrap()));
                }
            }

            if n_real == n {
                return DecisionRegion {
                    symbol_index: i,
                    vertices: poly.vertices,
                    unbounded_dirs: None,
                    supports,
                };
            }
            assert!(n_real >= 1, "cell {i} has no finite vertex");

            // rotate so real vertices are contiguous starting at index 0
            let start = (0..n)
                .find(|&k| !artificial[k] && artificial[(k + n - 1) % n])
                .expect("open cell must alternate");
            let real: Vec<usize> = (0..n_real).map(|o| (start + o) % n).collect();
            debug_assert!(real.iter().all(|&k| !artificial[k]));

            let ray_dir = |tag: usize, from: Vec2, toward: Vec2| -> Vec2 {
                debug_assert!(tag < m, "ray must follow a bisector edge");
                let along = planes[tag].unwrap().normal.perp().normalized();
                if along.dot(toward - from) >= 0.0 {
                    along
                } else {
                    -along
                }
            };
            let first = real[0];
            let last = *real.last().unwrap();
            let prev = (first + n - 1) % n;
            let next = (last + 1) % n;
            // edge arriving at the first real vertex and edge leaving the last
            let dir_start = ray_dir(poly.edge_tags[prev], poly.vertices[first], poly.vertices[prev]);
            let dir_end = ray_dir(poly.edge_tags[last], poly.vertices[last], poly.vertices[next]);

            DecisionRegion {
                symbol_index: i,
                vertices: real.iter().map(|&k| poly.vertices[k]).collect(),
                unbounded_dirs: Some((dir_start, dir_end)),
                supports,
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// CSV payloads
// ---------------------------------------------------------------------------

/// `index,x,y` rows for a constellation.
pub fn points_csv(c: &Constellation) -> String {
    let mut out = String::from("index,x,y\n");
    for (i, p) in c.points.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", i, p.x, p.y));
    }
    out
}

/// `symbol_index,vertex_ordinal,x,y` rows for decision regions; open cells
/// append two sentinel rows (`vertex_ordinal = -1`) holding the unbounded
/// edge directions.
pub fn regions_csv(regions: &[DecisionRegion]) -> String {
    let mut out = String::from("symbol_index,vertex_ordinal,x,y\n");
    for r in regions {
        for (k, v) in r.vertices.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", r.symbol_index, k, v.x, v.y));
        }
        if let Some((d0, d1)) = r.unbounded_dirs {
            out.push_str(&format!("{},-1,{},{}\n", r.symbol_index, d0.x, d0.y));
            out.push_str(&format!("{},-1,{},{}\n", r.symbol_index, d1.x, d1.y));
        }
    }
    out
}
