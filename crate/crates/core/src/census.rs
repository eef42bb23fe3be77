//! Reflexive polytope census: loading fixtures, grouping polytopes into
//! kernel types and finding the mirror kernel pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::family::FamilyTag;
use crate::lattice_polytope::{
    is_kernel_pair, is_mirror_kernel_pair, parse_polytopes, KernelLattice, LatticePolytope, ParseError, PolytopeError,
};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("polytope {0} is not reflexive")]
    NotReflexive(u32),
    #[error("polytope id {0} occurs twice")]
    DuplicateId(u32),
    #[error("unknown report format `{0}` (expected json, csv or markdown)")]
    UnknownFormat(String),
    #[error("polytope {id}: {source}")]
    Polytope { id: u32, source: PolytopeError },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolytopeRecord {
    pub id: u32,
    pub polytope: LatticePolytope,
    pub source: String,
}

/// Parse records from text; records without an id take their position.
pub fn parse_records(text: &str, source: &str) -> Result<Vec<PolytopeRecord>, CensusError> {
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, p) in parse_polytopes(text)?.into_iter().enumerate() {
        let id = p.id().unwrap_or(i as u32);
        if !seen.insert(id) {
            return Err(CensusError::DuplicateId(id));
        }
        if !p.is_reflexive().map_err(|source| CensusError::Polytope { id, source })? {
            return Err(CensusError::NotReflexive(id));
        }
        records.push(PolytopeRecord {
            id,
            polytope: p.with_id(id),
            source: source.to_string(),
        });
    }
    records.sort_by_key(|r| r.id);
    Ok(records)
}

pub fn load_polytopes(path: &Path) -> Result<Vec<PolytopeRecord>, CensusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CensusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    parse_records(&text, &name)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum TypeLabel {
    /// Sorted kernel generator of a simplex.
    Weights(Vec<i64>),
    GroupI,
    GroupII,
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::Weights(w) => {
                let w: Vec<String> = w.iter().map(i64::to_string).collect();
                write!(f, "({})", w.join(","))
            }
            TypeLabel::GroupI => f.write_str("Group I"),
            TypeLabel::GroupII => f.write_str("Group II"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelType {
    /// Kernel of the first member; the others match it under some face-lattice isomorphism.
    pub kernel: KernelLattice,
    pub members: BTreeSet<u32>,
    pub label: Option<TypeLabel>,
}

/// Cheap invariants of the face lattice and lattice points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Signature {
    vertices: usize,
    facets: usize,
    facet_sizes: Vec<usize>,
    vertex_degrees: Vec<usize>,
    points: usize,
}

fn combinatorial_signature(p: &LatticePolytope) -> (usize, usize, Vec<usize>, Vec<usize>) {
    let mut facet_sizes: Vec<usize> = p.facets().iter().map(|f| f.vertices.len()).collect();
    facet_sizes.sort_unstable();
    let mut degrees = vec![0; p.num_vertices()];
    for f in p.facets() {
        for &v in &f.vertices {
            degrees[v] += 1;
        }
    }
    degrees.sort_unstable();
    (p.num_vertices(), p.num_facets(), facet_sizes, degrees)
}

fn signature(p: &LatticePolytope) -> Signature {
    let (vertices, facets, facet_sizes, vertex_degrees) = combinatorial_signature(p);
    Signature {
        vertices,
        facets,
        facet_sizes,
        vertex_degrees,
        points: p.lattice_points().len(),
    }
}

fn label_for(p: &LatticePolytope, kernel: &KernelLattice) -> Option<TypeLabel> {
    if p.num_vertices() == p.dim() + 1 && kernel.rank() == 1 {
        let mut w: Vec<i64> = kernel.basis[0].iter().map(|x| x.abs()).collect();
        w.sort_unstable();
        return Some(TypeLabel::Weights(w));
    }
    [(FamilyTag::GroupI, TypeLabel::GroupI), (FamilyTag::GroupII, TypeLabel::GroupII)]
        .into_iter()
        .find(|(f, _)| {
            let rep = f.representative();
            rep.dim() == p.dim() && is_kernel_pair(&rep, p, None).is_some()
        })
        .map(|(_, l)| l)
}

/// Partition records into kernel types: combinatorially equivalent with the
/// same kernel under some face-lattice isomorphism.
pub fn classify_kernel_types(records: &[PolytopeRecord]) -> Vec<KernelType> {
    let mut buckets: BTreeMap<_, Vec<&PolytopeRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.polytope.dim(), combinatorial_signature(&r.polytope), r.polytope.vertex_kernel().rank());
        buckets.entry(key).or_default().push(r);
    }
    let mut types: Vec<(u32, KernelType)> = Vec::new();
    for bucket in buckets.values() {
        let mut reps: Vec<(&PolytopeRecord, usize)> = Vec::new();
        for r in bucket {
            match reps.iter().find(|(rep, _)| is_kernel_pair(&rep.polytope, &r.polytope, None).is_some()) {
                Some(&(_, t)) => {
                    types[t].1.members.insert(r.id);
                }
                None => {
                    let kernel = r.polytope.vertex_kernel();
                    let label = label_for(&r.polytope, &kernel);
                    reps.push((r, types.len()));
                    types.push((
                        r.id,
                        KernelType {
                            kernel,
                            members: BTreeSet::from([r.id]),
                            label,
                        },
                    ));
                }
            }
        }
    }
    types.sort_by(|a, b| a.1.label.is_none().cmp(&b.1.label.is_none()).then(a.1.label.cmp(&b.1.label)).then(a.0.cmp(&b.0)));
    types.into_iter().map(|(_, t)| t).collect()
}

/// All unordered mirror kernel pairs `(a, b)` with `a <= b`, sorted.
pub fn find_mirror_kernel_pairs(records: &[PolytopeRecord]) -> Result<Vec<(u32, u32)>, CensusError> {
    let mut by_sig: BTreeMap<Signature, Vec<&PolytopeRecord>> = BTreeMap::new();
    for r in records {
        by_sig.entry(signature(&r.polytope)).or_default().push(r);
    }
    let mut jobs: Vec<(&PolytopeRecord, &PolytopeRecord)> = Vec::new();
    for r in records {
        let dual = r
            .polytope
            .polar_dual()
            .map_err(|source| CensusError::Polytope { id: r.id, source })?;
        for q in by_sig.get(&signature(&dual)).into_iter().flatten() {
            if r.id <= q.id {
                jobs.push((r, q));
            }
        }
    }
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    let chunk = jobs.len().div_ceil(workers).max(1);
    let results: Vec<Result<Vec<(u32, u32)>, CensusError>> = thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    let mut found = Vec::new();
                    for (p, q) in part {
                        let hit = is_mirror_kernel_pair(&p.polytope, &q.polytope)
                            .map_err(|source| CensusError::Polytope { id: p.id, source })?;
                        if hit {
                            found.push((p.id, q.id));
                        }
                    }
                    Ok(found)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("census worker panicked")).collect()
    });
    let mut pairs = Vec::new();
    for r in results {
        pairs.extend(r?);
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusResult {
    pub records: usize,
    pub types: Vec<KernelType>,
    pub pairs: Vec<(u32, u32)>,
}

impl CensusResult {
    pub fn self_dual(&self) -> usize {
        self.pairs.iter().filter(|(a, b)| a == b).count()
    }

    /// Pairs whose first entry belongs to the given type.
    pub fn pairs_of(&self, t: &KernelType) -> Vec<(u32, u32)> {
        self.pairs.iter().copied().filter(|(a, _)| t.members.contains(a)).collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "There are {} mirror kernel pairs, of which {} are self-dual, in {} kernel types.",
            self.pairs.len(),
            self.self_dual(),
            self.types.len()
        )
    }
}

pub fn run_census(records: &[PolytopeRecord]) -> Result<CensusResult, CensusError> {
    Ok(CensusResult {
        records: records.len(),
        types: classify_kernel_types(records),
        pairs: find_mirror_kernel_pairs(records)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = CensusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(CensusError::UnknownFormat(s.to_string())),
        }
    }
}

fn label_string(t: &KernelType) -> String {
    t.label.as_ref().map_or_else(|| "-".to_string(), ToString::to_string)
}

fn pair_string((a, b): (u32, u32)) -> String {
    format!("({a}, {b})")
}

pub fn report(result: &CensusResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let types: Vec<_> = result
                .types
                .iter()
                .map(|t| {
                    json!({
                        "label": t.label.as_ref().map(ToString::to_string),
                        "kernel": t.kernel.basis,
                        "members": t.members,
                        "pairs": result.pairs_of(t),
                    })
                })
                .collect();
            let doc = json!({
                "counts": {
                    "records": result.records,
                    "pairs": result.pairs.len(),
                    "self_dual": result.self_dual(),
                    "types": result.types.len(),
                },
                "pairs": result.pairs,
                "types": types,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["label", "first", "second", "self_dual"]).expect("in-memory csv");
            for t in &result.types {
                for (a, b) in result.pairs_of(t) {
                    w.write_record([label_string(t), a.to_string(), b.to_string(), (a == b).to_string()])
                        .expect("in-memory csv");
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
        }
        ReportFormat::Markdown => {
            let mut out = String::from("| Type | Members | Polytope pairs |\n|---|---|---|\n");
            for t in &result.types {
                let members: Vec<String> = t.members.iter().map(u32::to_string).collect();
                let pairs: Vec<String> = result.pairs_of(t).into_iter().map(pair_string).collect();
                out.push_str(&format!("| {} | {} | {} |\n", label_string(t), members.join(", "), pairs.join(", ")));
            }
            out.push('\n');
            out.push_str(&result.summary());
            out.push('\n');
            out
        }
    }
}
