//! Lattice polytopes in Z^n for n <= 4: facets, polar duals, reflexivity,
//! lattice points and vertex-matrix kernels.
//!
//! Facets are found by exhaustive hyperplane candidates through `n`-subsets of
//! vertices, each validated against every vertex. With at most a few dozen
//! vertices this is exact and fast enough for the reflexive databases.

mod io;
mod iso;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::intmat::{self, cofactor_normal, dot, primitive};

pub use io::{format_polytopes, parse_polytopes, ParseError};
pub use iso::{
    combinatorially_equivalent, double_kernel_pair, find_isomorphism, for_each_isomorphism, is_kernel_pair, is_mirror_kernel_pair,
    lattice_isomorphism, mirror_kernel_witness, Isomorphism, MirrorWitness,
};

pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("polytope dimension {0} is outside the supported range 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("vertex {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("vertex {0} is listed twice")]
    DuplicateVertex(usize),
    #[error("vertices do not span a full-dimensional polytope")]
    Degenerate,
    #[error("point {0} is not a vertex of the convex hull")]
    NotAVertex(usize),
    #[error("the origin is not strictly interior")]
    NotInteriorOrigin,
    #[error("the polar dual has a non-integral vertex (polytope is not reflexive)")]
    NonLatticeDual,
}

/// A point of Z^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn pairing(&self, other: &LatticePoint) -> i64 {
        dot(&self.0, &other.0)
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

impl From<&[i64]> for LatticePoint {
    fn from(v: &[i64]) -> Self {
        LatticePoint(v.to_vec())
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `<normal, x> >= -offset` on the polytope, with `normal` primitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FacetInequality {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl FacetInequality {
    /// `<normal, x> + offset`: zero on the facet, nonnegative on the polytope.
    pub fn slack(&self, x: &[i64]) -> i64 {
        dot(&self.normal, x) + self.offset
    }
}

#[derive(Debug, Clone)]
pub struct Facet {
    pub inequality: FacetInequality,
    /// Indices of the vertices on this facet, ascending.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<LatticePoint>,
    id: Option<u32>,
    facets: Vec<Facet>,
}

/// Canonical basis (row HNF) of `{a in Z^k : sum a_i v_i = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct KernelLattice {
    pub ambient_rank: usize,
    pub basis: Vec<Vec<i64>>,
}

impl KernelLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Kernel of the matrix whose columns are `columns`.
    pub fn of_columns(columns: &[&[i64]]) -> Self {
        let k = columns.len();
        let n = columns.first().map_or(0, |c| c.len());
        let rows: Vec<Vec<i64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        KernelLattice {
            ambient_rank: k,
            basis: intmat::integer_kernel(&rows, k),
        }
    }
}

impl PartialEq for LatticePolytope {
    /// Same dimension and the same vertices in the same order.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

impl LatticePolytope {
    /// Build from an explicit vertex list, checking that every point is a vertex.
    pub fn new(dim: usize, vertices: Vec<LatticePoint>) -> Result<Self, PolytopeError> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(PolytopeError::UnsupportedDimension(dim));
        }
        for (index, v) in vertices.iter().enumerate() {
            if v.dim() != dim {
                return Err(PolytopeError::DimensionMismatch {
                    index,
                    expected: dim,
                    found: v.dim(),
                });
            }
            if vertices[..index].contains(v) {
                return Err(PolytopeError::DuplicateVertex(index));
            }
        }
        if vertices.len() <= dim {
            return Err(PolytopeError::Degenerate);
        }
        let diffs: Vec<Vec<i64>> = vertices[1..]
            .iter()
            .map(|v| v.0.iter().zip(&vertices[0].0).map(|(a, b)| a - b).collect())
            .collect();
        if intmat::rank(&diffs) < dim {
            return Err(PolytopeError::Degenerate);
        }
        let facets = enumerate_facets(dim, &vertices);
        for i in 0..vertices.len() {
            let normals: Vec<Vec<i64>> = facets
                .iter()
                .filter(|f| f.vertices.contains(&i))
                .map(|f| f.inequality.normal.clone())
                .collect();
            if intmat::rank(&normals) < dim {
                return Err(PolytopeError::NotAVertex(i));
            }
        }
        Ok(LatticePolytope {
            dim,
            vertices,
            id: None,
            facets,
        })
    }

    /// Convenience constructor from coordinate rows.
    pub fn from_rows(rows: &[&[i64]]) -> Result<Self, PolytopeError> {
        let dim = rows.first().map_or(0, |r| r.len());
        LatticePolytope::new(dim, rows.iter().map(|r| LatticePoint::from(*r)).collect())
    }

    /// Convex hull of arbitrary points: non-vertices are dropped, order preserved.
    pub fn hull(dim: usize, points: Vec<LatticePoint>) -> Result<Self, PolytopeError> {
        let mut unique: Vec<LatticePoint> = Vec::new();
        for p in points {
            if !unique.contains(&p) {
                unique.push(p);
            }
        }
        loop {
            match LatticePolytope::new(dim, unique.clone()) {
                Err(PolytopeError::NotAVertex(i)) => {
                    unique.remove(i);
                }
                other => return other,
            }
        }
    }

    pub fn with_id(mut self, id: u32) -> Self {
        self.id = Some(id);
        self
    }

    pub fn id(&self) -> Option<u32> {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    /// Vertex matrix with the vertices as columns, given by rows.
    pub fn vertex_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v.0[i]).collect())
            .collect()
    }

    /// The same polytope with its vertices listed as `order[0], order[1], ...`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        let vertices: Vec<LatticePoint> = order.iter().map(|&i| self.vertices[i].clone()).collect();
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let mut vs: Vec<usize> = f.vertices.iter().map(|&v| inverse[v]).collect();
                vs.sort_unstable();
                Facet {
                    inequality: f.inequality.clone(),
                    vertices: vs,
                }
            })
            .collect();
        LatticePolytope {
            dim: self.dim,
            vertices,
            id: self.id,
            facets,
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.facets.iter().all(|f| f.inequality.slack(x) >= 0)
    }

    pub fn origin_is_interior(&self) -> bool {
        self.facets.iter().all(|f| f.inequality.offset > 0)
    }

    pub fn is_reflexive(&self) -> Result<bool, PolytopeError> {
        if !self.origin_is_interior() {
            return Err(PolytopeError::NotInteriorOrigin);
        }
        Ok(self.facets.iter().all(|f| f.inequality.offset == 1))
    }

    /// Polar dual, vertices in lexicographic order.
    pub fn polar_dual(&self) -> Result<LatticePolytope, PolytopeError> {
        self.polar_dual_indexed().map(|(d, _)| d)
    }

    /// Polar dual together with `facet_to_vertex[f]`: the dual vertex that
    /// corresponds to facet `f` of `self`.
    pub fn polar_dual_indexed(&self) -> Result<(LatticePolytope, Vec<usize>), PolytopeError> {
        if !self.origin_is_interior() {
            return Err(PolytopeError::NotInteriorOrigin);
        }
        if self.facets.iter().any(|f| f.inequality.offset != 1) {
            return Err(PolytopeError::NonLatticeDual);
        }
        let mut order: Vec<usize> = (0..self.facets.len()).collect();
        order.sort_by(|&a, &b| self.facets[a].inequality.normal.cmp(&self.facets[b].inequality.normal));
        let vertices: Vec<LatticePoint> = order
            .iter()
            .map(|&f| LatticePoint(self.facets[f].inequality.normal.clone()))
            .collect();
        let mut facet_to_vertex = vec![0; order.len()];
        for (vi, &f) in order.iter().enumerate() {
            facet_to_vertex[f] = vi;
        }
        let dual = LatticePolytope::new(self.dim, vertices)?;
        Ok((dual, facet_to_vertex))
    }

    /// All lattice points, boundary included, in lexicographic order.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let lo: Vec<i64> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v.0[i]).min().unwrap())
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v.0[i]).max().unwrap())
            .collect();
        let mut out = Vec::new();
        let mut x = lo.clone();
        'scan: loop {
            if self.contains(&x) {
                out.push(LatticePoint(x.clone()));
            }
            let mut i = self.dim;
            loop {
                if i == 0 {
                    break 'scan;
                }
                i -= 1;
                if x[i] < hi[i] {
                    x[i] += 1;
                    for j in i + 1..self.dim {
                        x[j] = lo[j];
                    }
                    break;
                }
            }
        }
        out
    }

    pub fn vertex_kernel(&self) -> KernelLattice {
        let cols: Vec<&[i64]> = self.vertices.iter().map(|v| v.coords()).collect();
        KernelLattice::of_columns(&cols)
    }

    /// Vertex indices incident to each facet, as bitmasks.
    pub(crate) fn facet_masks(&self) -> Vec<u64> {
        self.facets
            .iter()
            .map(|f| f.vertices.iter().fold(0u64, |m, &v| m | 1 << v))
            .collect()
    }
}

impl fmt::Display for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

fn enumerate_facets(dim: usize, vertices: &[LatticePoint]) -> Vec<Facet> {
    let mut facets: Vec<Facet> = Vec::new();
    for_each_subset(vertices.len(), dim, &mut |subset| {
        let base = &vertices[subset[0]].0;
        let diffs: Vec<Vec<i64>> = subset[1..]
            .iter()
            .map(|&i| vertices[i].0.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        let normal = cofactor_normal(&diffs);
        if normal.iter().all(|&c| c == 0) {
            return;
        }
        let normal = primitive(&normal);
        let level = dot(&normal, base);
        let (mut above, mut below) = (false, false);
        for v in vertices {
            let s = dot(&normal, &v.0) - level;
            above |= s > 0;
            below |= s < 0;
        }
        if above && below {
            return;
        }
        let (normal, level) = if below {
            (normal.iter().map(|c| -c).collect::<Vec<_>>(), -level)
        } else {
            (normal, level)
        };
        if facets.iter().any(|f| f.inequality.normal == normal) {
            return;
        }
        let on: Vec<usize> = (0..vertices.len())
            .filter(|&i| dot(&normal, &vertices[i].0) == level)
            .collect();
        facets.push(Facet {
            inequality: FacetInequality {
                normal,
                offset: -level,
            },
            vertices: on,
        });
    });
    facets.sort_by(|a, b| a.inequality.normal.cmp(&b.inequality.normal));
    facets
}
