//! Combinatorial isomorphisms, lattice isomorphisms and kernel pairs.
//!
//! Two polytopes have isomorphic face lattices iff some vertex bijection maps
//! the vertex sets of facets onto vertex sets of facets. The search below
//! assigns vertices one at a time and prunes with facet bitmasks: each facet of
//! the source must still fit inside a target facet of the same size that avoids
//! the images of the assigned vertices off that facet.

use serde::Serialize;

use super::{KernelLattice, LatticePolytope, PolytopeError};
use crate::arith::intmat::row_hnf;

/// A face-lattice isomorphism `P -> Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Isomorphism {
    /// `vertex_map[i]` is the vertex of Q matched with vertex `i` of P.
    pub vertex_map: Vec<usize>,
    /// `facet_map[f]` is the facet of Q matched with facet `f` of P.
    pub facet_map: Vec<usize>,
}

/// Evidence for a mirror kernel pair `(P, Q)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MirrorWitness {
    /// `Q` written in the vertex order `dual_order` is `U * (vertex matrix of P°)`
    /// for some `U` in GL(n, Z); `dual_order[i]` is the Q vertex matched with
    /// vertex `i` of P°.
    pub dual_order: Vec<usize>,
    /// The vertex bijection `P -> Q` carrying both kernel conditions.
    pub isomorphism: Isomorphism,
}

struct Search<'a> {
    p_masks: Vec<u64>,
    q_masks: Vec<u64>,
    p_deg: Vec<u32>,
    q_deg: Vec<u32>,
    order: Vec<usize>,
    map: Vec<usize>,
    used: u64,
    assigned: u64,
    accept: &'a mut dyn FnMut(&Isomorphism) -> bool,
}

fn degrees(n: usize, masks: &[u64]) -> Vec<u32> {
    (0..n)
        .map(|v| masks.iter().filter(|&&m| m >> v & 1 == 1).count() as u32)
        .collect()
}

/// Vertex visiting order: each next vertex shares as many facets as possible
/// with those already placed, so constraints bite early.
fn visiting_order(n: usize, masks: &[u64]) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let mut placed = 0u64;
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| placed >> v & 1 == 0)
            .max_by_key(|&v| {
                let shared = masks
                    .iter()
                    .filter(|&&m| m >> v & 1 == 1 && m & placed != 0)
                    .count();
                (shared, std::cmp::Reverse(v))
            })
            .expect("unplaced vertex");
        placed |= 1 << next;
        order.push(next);
    }
    order
}

impl Search<'_> {
    fn image(&self, mask: u64) -> u64 {
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            out |= 1 << self.map[v];
            m &= m - 1;
        }
        out
    }

    fn consistent(&self) -> bool {
        self.p_masks.iter().all(|&f| {
            let inside = self.image(f & self.assigned);
            let outside = self.image(!f & self.assigned);
            let size = f.count_ones();
            self.q_masks
                .iter()
                .any(|&g| g.count_ones() == size && inside & !g == 0 && outside & g == 0)
        })
    }

    /// Returns true when the caller accepted an isomorphism and the search stops.
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            let facet_map: Vec<usize> = self
                .p_masks
                .iter()
                .map(|&f| {
                    let img = self.image(f);
                    self.q_masks.iter().position(|&g| g == img).expect("pruning guarantees a match")
                })
                .collect();
            let iso = Isomorphism {
                vertex_map: self.map.clone(),
                facet_map,
            };
            return (self.accept)(&iso);
        }
        let v = self.order[depth];
        for w in 0..self.q_deg.len() {
            if self.used >> w & 1 == 1 || self.q_deg[w] != self.p_deg[v] {
                continue;
            }
            self.map[v] = w;
            self.used |= 1 << w;
            self.assigned |= 1 << v;
            if self.consistent() && self.run(depth + 1) {
                return true;
            }
            self.used &= !(1 << w);
            self.assigned &= !(1 << v);
        }
        false
    }
}

fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// First face-lattice isomorphism `P -> Q` accepted by `accept`, in search order.
pub fn find_isomorphism(
    p: &LatticePolytope,
    q: &LatticePolytope,
    mut accept: impl FnMut(&Isomorphism) -> bool,
) -> Option<Isomorphism> {
    if p.dim() != q.dim() || p.num_vertices() != q.num_vertices() || p.num_facets() != q.num_facets() {
        return None;
    }
    let p_masks = p.facet_masks();
    let q_masks = q.facet_masks();
    let sizes = |m: &[u64]| sorted(&m.iter().map(|x| x.count_ones()).collect::<Vec<_>>());
    if sizes(&p_masks) != sizes(&q_masks) {
        return None;
    }
    let n = p.num_vertices();
    let p_deg = degrees(n, &p_masks);
    let q_deg = degrees(n, &q_masks);
    if sorted(&p_deg) != sorted(&q_deg) {
        return None;
    }
    let mut found = None;
    let mut wrapped = |iso: &Isomorphism| {
        if accept(iso) {
            found = Some(iso.clone());
            true
        } else {
            false
        }
    };
    let mut search = Search {
        order: visiting_order(n, &p_masks),
        p_masks,
        q_masks,
        p_deg,
        q_deg,
        map: vec![usize::MAX; n],
        used: 0,
        assigned: 0,
        accept: &mut wrapped,
    };
    search.run(0);
    found
}

/// Calls `visit` on every face-lattice isomorphism `P -> Q`.
pub fn for_each_isomorphism(p: &LatticePolytope, q: &LatticePolytope, mut visit: impl FnMut(&Isomorphism)) {
    find_isomorphism(p, q, |iso| {
        visit(iso);
        false
    });
}

pub fn combinatorially_equivalent(p: &LatticePolytope, q: &LatticePolytope) -> Option<Isomorphism> {
    find_isomorphism(p, q, |_| true)
}

/// Facet map induced by a vertex bijection, if it is a face-lattice isomorphism.
fn induced_isomorphism(p: &LatticePolytope, q: &LatticePolytope, vertex_map: &[usize]) -> Option<Isomorphism> {
    let n = p.num_vertices();
    if p.dim() != q.dim() || q.num_vertices() != n || vertex_map.len() != n || p.num_facets() != q.num_facets() {
        return None;
    }
    let mut seen = 0u64;
    for &w in vertex_map {
        if w >= n || seen >> w & 1 == 1 {
            return None;
        }
        seen |= 1 << w;
    }
    let q_masks = q.facet_masks();
    let facet_map = p
        .facet_masks()
        .iter()
        .map(|&f| {
            let img = (0..n).filter(|&v| f >> v & 1 == 1).fold(0u64, |m, v| m | 1 << vertex_map[v]);
            q_masks.iter().position(|&g| g == img)
        })
        .collect::<Option<Vec<usize>>>()?;
    Some(Isomorphism {
        vertex_map: vertex_map.to_vec(),
        facet_map,
    })
}

fn kernel_under(q: &LatticePolytope, vertex_map: &[usize]) -> KernelLattice {
    let cols: Vec<&[i64]> = vertex_map.iter().map(|&w| q.vertices()[w].coords()).collect();
    KernelLattice::of_columns(&cols)
}

/// Kernel pair test. With `vertex_map` given only that bijection is tried;
/// otherwise every face-lattice isomorphism is searched and the first one
/// matching the kernels is returned.
pub fn is_kernel_pair(
    p: &LatticePolytope,
    q: &LatticePolytope,
    vertex_map: Option<&[usize]>,
) -> Option<Isomorphism> {
    let target = p.vertex_kernel();
    match vertex_map {
        Some(map) => induced_isomorphism(p, q, map).filter(|iso| kernel_under(q, &iso.vertex_map) == target),
        None => find_isomorphism(p, q, |iso| kernel_under(q, &iso.vertex_map) == target),
    }
}

/// A vertex bijection `a -> b` realised by some `U` in GL(n, Z), i.e. `U a_i = b_{sigma(i)}`.
pub fn lattice_isomorphism(a: &LatticePolytope, b: &LatticePolytope) -> Option<Vec<usize>> {
    let target = row_hnf(&a.vertex_matrix());
    find_isomorphism(a, b, |iso| {
        let m: Vec<Vec<i64>> = (0..b.dim())
            .map(|r| iso.vertex_map.iter().map(|&w| b.vertices()[w].coords()[r]).collect())
            .collect();
        row_hnf(&m) == target
    })
    .map(|iso| iso.vertex_map)
}

/// A kernel pair `P -> Q` whose induced facet bijection also makes the duals
/// a kernel pair; both polytopes must be reflexive.
pub fn double_kernel_pair(p: &LatticePolytope, q: &LatticePolytope) -> Result<Option<Isomorphism>, PolytopeError> {
    let (p_dual, p_f2v) = p.polar_dual_indexed()?;
    let (q_dual, q_f2v) = q.polar_dual_indexed()?;
    let p_kernel = p.vertex_kernel();
    // Dual vertices listed facet by facet of P.
    let p_dual_cols: Vec<&[i64]> = p_f2v.iter().map(|&v| p_dual.vertices()[v].coords()).collect();
    let p_dual_kernel = KernelLattice::of_columns(&p_dual_cols);
    Ok(find_isomorphism(p, q, |iso| {
        if kernel_under(q, &iso.vertex_map) != p_kernel {
            return false;
        }
        let cols: Vec<&[i64]> = iso
            .facet_map
            .iter()
            .map(|&g| q_dual.vertices()[q_f2v[g]].coords())
            .collect();
        KernelLattice::of_columns(&cols) == p_dual_kernel
    }))
}

/// Full mirror kernel pair test; both polytopes must be reflexive.
pub fn mirror_kernel_witness(
    p: &LatticePolytope,
    q: &LatticePolytope,
) -> Result<Option<MirrorWitness>, PolytopeError> {
    let p_dual = p.polar_dual()?;
    q.polar_dual()?;
    let Some(dual_order) = lattice_isomorphism(&p_dual, q) else {
        return Ok(None);
    };
    Ok(double_kernel_pair(p, q)?.map(|isomorphism| MirrorWitness {
        dual_order,
        isomorphism,
    }))
}

pub fn is_mirror_kernel_pair(p: &LatticePolytope, q: &LatticePolytope) -> Result<bool, PolytopeError> {
    Ok(mirror_kernel_witness(p, q)?.is_some())
}
