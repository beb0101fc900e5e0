//! Finite multicomplexes (regular unordered Δ-complexes) and algebraic simplices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = String;
pub type SimplexId = String;

/// Face-table key: sorted vertex ids joined by `|`.
pub fn facet_key<S: AsRef<str>>(vertices: &[S]) -> String {
    let mut v: Vec<&str> = vertices.iter().map(|s| s.as_ref()).collect();
    v.sort_unstable();
    v.join("|")
}

/// Read access shared by explicit complexes and lazily resolved windows.
pub trait Complex {
    /// Sorted vertex ids of a simplex, or `None` if the id is unknown.
    fn simplex_vertices(&self, id: &str) -> Option<Vec<VertexId>>;

    /// The face of `id` spanned by `face_vertices` (sorted, one fewer than `id`'s).
    fn facet(&self, id: &str, face_vertices: &[VertexId]) -> Option<SimplexId>;

    /// The 0-simplex of a vertex.
    fn vertex_simplex(&self, vertex: &str) -> Option<SimplexId>;

    fn contains_simplex(&self, id: &str) -> bool {
        self.simplex_vertices(id).is_some()
    }

    fn simplex_dim(&self, id: &str) -> Option<usize> {
        self.simplex_vertices(id).map(|v| v.len() - 1)
    }
}

/// A simplex paired with an ordered vertex tuple whose underlying set is the simplex's vertex set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AlgebraicSimplex {
    pub simplex: SimplexId,
    pub tuple: Vec<VertexId>,
}

impl AlgebraicSimplex {
    pub fn new(simplex: impl Into<String>, tuple: Vec<VertexId>) -> Self {
        AlgebraicSimplex {
            simplex: simplex.into(),
            tuple,
        }
    }

    /// Convenience constructor from string slices.
    pub fn of(simplex: &str, tuple: &[&str]) -> Self {
        AlgebraicSimplex::new(simplex, tuple.iter().map(|s| s.to_string()).collect())
    }

    pub fn degree(&self) -> usize {
        self.tuple.len().saturating_sub(1)
    }

    pub fn has_repeats(&self) -> bool {
        self.vertex_set().len() < self.tuple.len()
    }

    pub fn vertex_set(&self) -> BTreeSet<&str> {
        self.tuple.iter().map(|s| s.as_str()).collect()
    }
}

impl fmt::Display for AlgebraicSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},({}))", self.simplex, self.tuple.join(","))
    }
}

/// Checks that `sigma` names a simplex of `k` and its tuple covers exactly that simplex's vertices.
pub fn check_algebraic(k: &dyn Complex, sigma: &AlgebraicSimplex) -> Result<()> {
    let verts = k
        .simplex_vertices(&sigma.simplex)
        .ok_or_else(|| Error::invalid(format!("unknown simplex `{}`", sigma.simplex)))?;
    if sigma.tuple.is_empty() {
        return Err(Error::invalid(format!("empty tuple on `{}`", sigma.simplex)));
    }
    let set: BTreeSet<&str> = sigma.vertex_set();
    let want: BTreeSet<&str> = verts.iter().map(|s| s.as_str()).collect();
    if set != want {
        return Err(Error::invalid(format!(
            "tuple of {sigma} does not match vertex set {{{}}}",
            verts.join(",")
        )));
    }
    Ok(())
}

/// The i-th face: delete `tuple[i]`; keep the simplex if the vertex set is unchanged.
pub fn face(k: &dyn Complex, sigma: &AlgebraicSimplex, i: usize) -> Result<AlgebraicSimplex> {
    let len = sigma.tuple.len();
    if i >= len || len < 2 {
        return Err(Error::FaceIndex { index: i, len });
    }
    let mut tuple = sigma.tuple.clone();
    let removed = tuple.remove(i);
    if tuple.contains(&removed) {
        return Ok(AlgebraicSimplex::new(sigma.simplex.clone(), tuple));
    }
    let mut sub: Vec<VertexId> = tuple.clone();
    sub.sort();
    sub.dedup();
    let f = k.facet(&sigma.simplex, &sub).ok_or_else(|| {
        Error::invalid(format!(
            "simplex `{}` has no face on {{{}}}",
            sigma.simplex,
            sub.join(",")
        ))
    })?;
    Ok(AlgebraicSimplex::new(f, tuple))
}

/// One simplex record with its explicit face table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexRecord {
    pub id: SimplexId,
    pub vertices: Vec<VertexId>,
    #[serde(default)]
    pub faces: BTreeMap<String, SimplexId>,
}

impl SimplexRecord {
    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MulticomplexFile {
    vertices: Vec<VertexId>,
    simplices: Vec<SimplexRecord>,
}

/// A finite multicomplex with explicit face tables. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multicomplex {
    vertices: BTreeSet<VertexId>,
    simplices: BTreeMap<SimplexId, SimplexRecord>,
    vertex_index: BTreeMap<VertexId, SimplexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("simplex `{simplex}` has no vertices")]
    EmptySimplex { simplex: SimplexId },
    #[error("simplex `{simplex}` has non-distinct vertices")]
    NonDistinctVertices { simplex: SimplexId },
    #[error("simplex `{simplex}` uses unknown vertex `{vertex}`")]
    UnknownVertex { simplex: SimplexId, vertex: VertexId },
    #[error("simplex `{simplex}` has no face for `{key}`")]
    MissingFace { simplex: SimplexId, key: String },
    #[error("simplex `{simplex}` lists `{key}`, which is not one of its facets")]
    ExtraFace { simplex: SimplexId, key: String },
    #[error("simplex `{simplex}` references unknown face `{face}`")]
    DanglingFace { simplex: SimplexId, face: SimplexId },
    #[error("face `{face}` of `{simplex}` does not have vertex set `{key}`")]
    FaceVertexMismatch {
        simplex: SimplexId,
        face: SimplexId,
        key: String,
    },
    #[error("faces `{first}` and `{second}` of `{simplex}` disagree on `{key}`")]
    IncoherentFaces {
        simplex: SimplexId,
        first: SimplexId,
        second: SimplexId,
        key: String,
    },
    #[error("vertex `{vertex}` has no 0-simplex")]
    MissingVertexSimplex { vertex: VertexId },
    #[error("vertex `{vertex}` has two 0-simplices `{first}` and `{second}`")]
    DuplicateVertexSimplex {
        vertex: VertexId,
        first: SimplexId,
        second: SimplexId,
    },
}

impl Violation {
    /// Ids of the simplices (or vertices) involved.
    pub fn offending(&self) -> Vec<String> {
        use Violation::*;
        match self {
            EmptySimplex { simplex }
            | NonDistinctVertices { simplex }
            | MissingFace { simplex, .. }
            | ExtraFace { simplex, .. } => vec![simplex.clone()],
            UnknownVertex { simplex, vertex } => vec![simplex.clone(), vertex.clone()],
            DanglingFace { simplex, face } | FaceVertexMismatch { simplex, face, .. } => {
                vec![simplex.clone(), face.clone()]
            }
            IncoherentFaces {
                simplex,
                first,
                second,
                ..
            } => vec![simplex.clone(), first.clone(), second.clone()],
            MissingVertexSimplex { vertex } => vec![vertex.clone()],
            DuplicateVertexSimplex { first, second, .. } => vec![first.clone(), second.clone()],
        }
    }
}

impl Multicomplex {
    /// Builds from raw records. Only fails on duplicate simplex ids; everything else is left to [`validate`].
    pub fn from_records(vertices: Vec<VertexId>, records: Vec<SimplexRecord>) -> Result<Self> {
        let vertices: BTreeSet<VertexId> = vertices.into_iter().collect();
        let mut simplices = BTreeMap::new();
        for r in records {
            if simplices.contains_key(&r.id) {
                return Err(Error::invalid(format!("duplicate simplex id `{}`", r.id)));
            }
            simplices.insert(r.id.clone(), r);
        }
        let mut vertex_index = BTreeMap::new();
        for r in simplices.values() {
            if r.vertices.len() == 1 {
                vertex_index
                    .entry(r.vertices[0].clone())
                    .or_insert_with(|| r.id.clone());
            }
        }
        Ok(Multicomplex {
            vertices,
            simplices,
            vertex_index,
        })
    }

    /// The simplicial complex generated by `facets`. Simplex ids are facet keys.
    pub fn simplicial<S: AsRef<str>>(facets: &[Vec<S>]) -> Self {
        let mut all: BTreeSet<Vec<String>> = BTreeSet::new();
        for f in facets {
            let mut v: Vec<String> = f.iter().map(|s| s.as_ref().to_string()).collect();
            v.sort();
            v.dedup();
            let n = v.len();
            for mask in 1u64..(1u64 << n) {
                let sub: Vec<String> = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| v[i].clone())
                    .collect();
                all.insert(sub);
            }
        }
        let mut b = MulticomplexBuilder::new();
        let mut by_size: Vec<&Vec<String>> = all.iter().collect();
        by_size.sort_by_key(|s| s.len());
        for s in by_size {
            if s.len() == 1 {
                b.vertex(&s[0]);
            } else {
                b.simplex_auto(&facet_key(s), s)
                    .expect("faces of a simplicial closure exist");
            }
        }
        b.build().expect("ids are distinct facet keys")
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.contains(v)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &SimplexRecord> {
        self.simplices.values()
    }

    pub fn simplex_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn get(&self, id: &str) -> Option<&SimplexRecord> {
        self.simplices.get(id)
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.simplices.values().map(|r| r.dim()).max()
    }

    /// Ids of all simplices of dimension `k`, sorted.
    pub fn simplices_of_dim(&self, k: usize) -> Vec<&SimplexId> {
        self.simplices
            .values()
            .filter(|r| r.dim() == k && !r.vertices.is_empty())
            .map(|r| &r.id)
            .collect()
    }

    /// True if no two simplices share a vertex set.
    pub fn is_simplicial(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.simplices
            .values()
            .all(|r| seen.insert(facet_key(&r.vertices)))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: MulticomplexFile = serde_json::from_str(s)?;
        Multicomplex::from_records(f.vertices, f.simplices)
    }

    /// Canonical JSON: vertices and simplices sorted by id, vertex lists sorted.
    pub fn to_json_value(&self) -> serde_json::Value {
        let f = MulticomplexFile {
            vertices: self.vertices.iter().cloned().collect(),
            simplices: self
                .simplices
                .values()
                .map(|r| {
                    let mut r = r.clone();
                    r.vertices.sort();
                    r
                })
                .collect(),
        };
        serde_json::to_value(f).expect("plain data serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("plain data serializes")
    }
}

impl Complex for Multicomplex {
    fn simplex_vertices(&self, id: &str) -> Option<Vec<VertexId>> {
        self.simplices.get(id).map(|r| {
            let mut v = r.vertices.clone();
            v.sort();
            v
        })
    }

    fn facet(&self, id: &str, face_vertices: &[VertexId]) -> Option<SimplexId> {
        self.simplices
            .get(id)?
            .faces
            .get(&facet_key(face_vertices))
            .cloned()
    }

    fn vertex_simplex(&self, vertex: &str) -> Option<SimplexId> {
        self.vertex_index.get(vertex).cloned()
    }

    fn contains_simplex(&self, id: &str) -> bool {
        self.simplices.contains_key(id)
    }
}

/// Incremental construction of a [`Multicomplex`].
#[derive(Default, Debug, Clone)]
pub struct MulticomplexBuilder {
    vertices: Vec<VertexId>,
    records: Vec<SimplexRecord>,
}

impl MulticomplexBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex together with its 0-simplex (same id).
    pub fn vertex(&mut self, v: &str) -> &mut Self {
        self.vertices.push(v.to_string());
        self.records.push(SimplexRecord {
            id: v.to_string(),
            vertices: vec![v.to_string()],
            faces: BTreeMap::new(),
        });
        self
    }

    pub fn simplex(
        &mut self,
        id: &str,
        vertices: &[impl AsRef<str>],
        faces: &[(&[&str], &str)],
    ) -> &mut Self {
        let faces = faces
            .iter()
            .map(|(k, f)| (facet_key(k), f.to_string()))
            .collect();
        self.records.push(SimplexRecord {
            id: id.to_string(),
            vertices: vertices.iter().map(|v| v.as_ref().to_string()).collect(),
            faces,
        });
        self
    }

    /// Adds a simplex whose faces are resolved by vertex set among the simplices added so far.
    pub fn simplex_auto(&mut self, id: &str, vertices: &[impl AsRef<str>]) -> Result<&mut Self> {
        let verts: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut faces = BTreeMap::new();
        if verts.len() > 1 {
            for i in 0..verts.len() {
                let mut sub = verts.clone();
                sub.remove(i);
                let key = facet_key(&sub);
                let hits: Vec<&SimplexRecord> = self
                    .records
                    .iter()
                    .filter(|r| facet_key(&r.vertices) == key)
                    .collect();
                match hits.as_slice() {
                    [one] => {
                        faces.insert(key, one.id.clone());
                    }
                    [] => return Err(Error::invalid(format!("no face `{key}` for `{id}`"))),
                    _ => return Err(Error::invalid(format!("ambiguous face `{key}` for `{id}`"))),
                }
            }
        }
        self.records.push(SimplexRecord {
            id: id.to_string(),
            vertices: verts,
            faces,
        });
        Ok(self)
    }

    pub fn build(&self) -> Result<Multicomplex> {
        Multicomplex::from_records(self.vertices.clone(), self.records.clone())
    }
}

/// Checks regularity, closure and face coherence; returns the first violation.
pub fn validate(k: &Multicomplex) -> std::result::Result<(), Violation> {
    for r in k.simplices.values() {
        if r.vertices.is_empty() {
            return Err(Violation::EmptySimplex {
                simplex: r.id.clone(),
            });
        }
        let set: BTreeSet<&String> = r.vertices.iter().collect();
        if set.len() != r.vertices.len() {
            return Err(Violation::NonDistinctVertices {
                simplex: r.id.clone(),
            });
        }
        if let Some(v) = r.vertices.iter().find(|v| !k.vertices.contains(*v)) {
            return Err(Violation::UnknownVertex {
                simplex: r.id.clone(),
                vertex: v.clone(),
            });
        }
    }
    for v in &k.vertices {
        let zeros: Vec<&SimplexRecord> = k
            .simplices
            .values()
            .filter(|r| r.vertices.len() == 1 && &r.vertices[0] == v)
            .collect();
        match zeros.as_slice() {
            [] => {
                return Err(Violation::MissingVertexSimplex { vertex: v.clone() });
            }
            [_] => {}
            [a, b, ..] => {
                return Err(Violation::DuplicateVertexSimplex {
                    vertex: v.clone(),
                    first: a.id.clone(),
                    second: b.id.clone(),
                })
            }
        }
    }
    for r in k.simplices.values() {
        let mut verts = r.vertices.clone();
        verts.sort();
        let n = verts.len();
        let expected: BTreeSet<String> = if n > 1 {
            (0..n)
                .map(|i| {
                    let mut sub = verts.clone();
                    sub.remove(i);
                    facet_key(&sub)
                })
                .collect()
        } else {
            BTreeSet::new()
        };
        for key in &expected {
            let Some(fid) = r.faces.get(key) else {
                return Err(Violation::MissingFace {
                    simplex: r.id.clone(),
                    key: key.clone(),
                });
            };
            let Some(f) = k.simplices.get(fid) else {
                return Err(Violation::DanglingFace {
                    simplex: r.id.clone(),
                    face: fid.clone(),
                });
            };
            if &facet_key(&f.vertices) != key {
                return Err(Violation::FaceVertexMismatch {
                    simplex: r.id.clone(),
                    face: fid.clone(),
                    key: key.clone(),
                });
            }
        }
        if let Some(key) = r.faces.keys().find(|key| !expected.contains(*key)) {
            return Err(Violation::ExtraFace {
                simplex: r.id.clone(),
                key: key.clone(),
            });
        }
        if n < 3 {
            continue;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let drop = |a: usize| {
                    let mut s = verts.clone();
                    s.remove(a);
                    facet_key(&s)
                };
                let mut both = verts.clone();
                both.remove(j);
                both.remove(i);
                let key2 = facet_key(&both);
                let fi = &r.faces[&drop(i)];
                let fj = &r.faces[&drop(j)];
                let a = k.simplices[fi].faces.get(&key2);
                let b = k.simplices[fj].faces.get(&key2);
                if let (Some(a), Some(b)) = (a, b) {
                    if a != b {
                        return Err(Violation::IncoherentFaces {
                            simplex: r.id.clone(),
                            first: a.clone(),
                            second: b.clone(),
                            key: key2,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// All tuples of length `len` over `verts` that hit every vertex, in lexicographic order.
pub fn surjective_tuples(verts: &[VertexId], len: usize) -> Vec<Vec<VertexId>> {
    let k = verts.len();
    if k == 0 || len < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; len];
    loop {
        let mut hit = vec![false; k];
        for &i in &idx {
            hit[i] = true;
        }
        if hit.iter().all(|&h| h) {
            out.push(idx.iter().map(|&i| verts[i].clone()).collect());
        }
        let mut p = len;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < k {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// Θ(n): every algebraic n-simplex, ordered by simplex id then tuple.
pub fn algebraic_simplices(k: &Multicomplex, n: usize) -> Vec<AlgebraicSimplex> {
    let mut out = Vec::new();
    for r in k.simplices.values() {
        if r.vertices.is_empty() || r.dim() > n {
            continue;
        }
        let mut verts = r.vertices.clone();
        verts.sort();
        for t in surjective_tuples(&verts, n + 1) {
            out.push(AlgebraicSimplex::new(r.id.clone(), t));
        }
    }
    out
}

/// A face-closed set of simplices of a parent complex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Submulticomplex {
    pub simplices: BTreeSet<SimplexId>,
}

impl Submulticomplex {
    pub fn contains(&self, id: &str) -> bool {
        self.simplices.contains(id)
    }

    pub fn is_face_closed(&self, k: &Multicomplex) -> bool {
        self.simplices.iter().all(|id| {
            k.get(id)
                .map(|r| r.faces.values().all(|f| self.simplices.contains(f)))
                .unwrap_or(false)
        })
    }

    pub fn is_subset_of(&self, other: &Submulticomplex) -> bool {
        self.simplices.is_subset(&other.simplices)
    }

    /// Vertices spanned by the member simplices.
    pub fn vertices(&self, k: &Multicomplex) -> BTreeSet<VertexId> {
        self.simplices
            .iter()
            .filter_map(|id| k.get(id))
            .flat_map(|r| r.vertices.iter().cloned())
            .collect()
    }

    /// The member simplices as a standalone multicomplex.
    pub fn to_multicomplex(&self, k: &Multicomplex) -> Result<Multicomplex> {
        let recs: Vec<SimplexRecord> = self
            .simplices
            .iter()
            .filter_map(|id| k.get(id).cloned())
            .collect();
        Multicomplex::from_records(self.vertices(k).into_iter().collect(), recs)
    }
}

/// Smallest face-closed set containing every simplex whose vertex set contains `v`.
pub fn closed_star(t: &Multicomplex, v: &str) -> Result<Submulticomplex> {
    if !t.has_vertex(v) {
        return Err(Error::invalid(format!("`{v}` is not a vertex")));
    }
    let mut out = BTreeSet::new();
    let mut stack: Vec<SimplexId> = t
        .simplices()
        .filter(|r| r.vertices.iter().any(|x| x == v))
        .map(|r| r.id.clone())
        .collect();
    while let Some(id) = stack.pop() {
        if !out.insert(id.clone()) {
            continue;
        }
        if let Some(r) = t.get(&id) {
            stack.extend(r.faces.values().cloned());
        }
    }
    Ok(Submulticomplex { simplices: out })
}

/// Materializes the face closure of `ids` in any [`Complex`] as an explicit multicomplex.
pub fn face_closure<'a>(
    k: &dyn Complex,
    ids: impl IntoIterator<Item = &'a SimplexId>,
) -> Result<Multicomplex> {
    let mut records: BTreeMap<SimplexId, SimplexRecord> = BTreeMap::new();
    let mut vertices = BTreeSet::new();
    let mut stack: Vec<SimplexId> = ids.into_iter().cloned().collect();
    while let Some(id) = stack.pop() {
        if records.contains_key(&id) {
            continue;
        }
        let verts = k
            .simplex_vertices(&id)
            .ok_or_else(|| Error::invalid(format!("unknown simplex `{id}`")))?;
        let mut faces = BTreeMap::new();
        if verts.len() > 1 {
            for i in 0..verts.len() {
                let mut sub = verts.clone();
                sub.remove(i);
                let f = k
                    .facet(&id, &sub)
                    .ok_or_else(|| Error::invalid(format!("`{id}` lacks face {sub:?}")))?;
                faces.insert(facet_key(&sub), f.clone());
                stack.push(f);
            }
        } else {
            vertices.insert(verts[0].clone());
        }
        records.insert(
            id.clone(),
            SimplexRecord {
                id,
                vertices: verts,
                faces,
            },
        );
    }
    Multicomplex::from_records(vertices.into_iter().collect(), records.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Multicomplex {
        Multicomplex::simplicial(&[vec!["a", "b", "c"]])
    }

    fn bigon() -> Multicomplex {
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v");
        b.simplex("e1", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.simplex("e2", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.build().unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate(&tri()), Ok(()));
        assert_eq!(validate(&bigon()), Ok(()));
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v");
        b.simplex("bad", &["u", "u", "v"], &[]);
        let v = validate(&b.build().unwrap()).unwrap_err();
        assert!(matches!(v, Violation::NonDistinctVertices { .. }));
        assert!(v.to_string().contains("non-distinct vertices"));
        assert_eq!(v.offending(), vec!["bad".to_string()]);
    }

    #[test]
    fn validate_catches_broken_faces() {
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v").vertex("w");
        b.simplex("e", &["u", "v"], &[(&["u"], "u"), (&["v"], "w")]);
        assert!(matches!(
            validate(&b.build().unwrap()),
            Err(Violation::FaceVertexMismatch { .. })
        ));
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v");
        b.simplex("e", &["u", "v"], &[(&["u"], "u")]);
        assert!(matches!(
            validate(&b.build().unwrap()),
            Err(Violation::MissingFace { .. })
        ));
    }

    #[test]
    fn validate_catches_incoherent_faces() {
        let mut b = MulticomplexBuilder::new();
        for v in ["a", "b", "c", "d"] {
            b.vertex(v);
        }
        for (id, x, y) in [
            ("ab1", "a", "b"),
            ("ab2", "a", "b"),
            ("ac", "a", "c"),
            ("ad", "a", "d"),
            ("bc", "b", "c"),
            ("bd", "b", "d"),
            ("cd", "c", "d"),
        ] {
            b.simplex(id, &[x, y], &[(&[x], x), (&[y], y)]);
        }
        b.simplex("abc", &["a", "b", "c"], &[(&["a", "b"], "ab1"), (&["a", "c"], "ac"), (&["b", "c"], "bc")]);
        b.simplex("abd", &["a", "b", "d"], &[(&["a", "b"], "ab2"), (&["a", "d"], "ad"), (&["b", "d"], "bd")]);
        b.simplex("acd", &["a", "c", "d"], &[(&["a", "c"], "ac"), (&["a", "d"], "ad"), (&["c", "d"], "cd")]);
        b.simplex("bcd", &["b", "c", "d"], &[(&["b", "c"], "bc"), (&["b", "d"], "bd"), (&["c", "d"], "cd")]);
        b.simplex(
            "abcd",
            &["a", "b", "c", "d"],
            &[(&["a", "b", "c"], "abc"), (&["a", "b", "d"], "abd"), (&["a", "c", "d"], "acd"), (&["b", "c", "d"], "bcd")],
        );
        let v = validate(&b.build().unwrap()).unwrap_err();
        assert!(matches!(v, Violation::IncoherentFaces { ref simplex, .. } if simplex == "abcd"));
    }

    #[test]
    fn face_examples() {
        let k = Multicomplex::simplicial(&[vec!["a", "b"]]);
        let e = AlgebraicSimplex::of("a|b", &["a", "b"]);
        assert_eq!(face(&k, &e, 0).unwrap(), AlgebraicSimplex::of("b", &["b"]));
        let aa = AlgebraicSimplex::of("a", &["a", "a"]);
        assert_eq!(face(&k, &aa, 0).unwrap(), AlgebraicSimplex::of("a", &["a"]));
        let t = tri();
        let s = AlgebraicSimplex::of("a|b|c", &["a", "b", "c"]);
        assert_eq!(
            face(&t, &s, 1).unwrap(),
            AlgebraicSimplex::of("a|c", &["a", "c"])
        );
        assert!(matches!(face(&t, &s, 3), Err(Error::FaceIndex { .. })));
    }

    #[test]
    fn theta_examples() {
        let mut b = MulticomplexBuilder::new();
        b.vertex("v");
        let point = b.build().unwrap();
        assert_eq!(
            algebraic_simplices(&point, 1),
            vec![AlgebraicSimplex::of("v", &["v", "v"])]
        );
        let e = Multicomplex::simplicial(&[vec!["a", "b"]]);
        let th = algebraic_simplices(&e, 1);
        assert_eq!(th.len(), 4);
        assert_eq!(th[0], AlgebraicSimplex::of("a", &["a", "a"]));
        assert_eq!(th[1], AlgebraicSimplex::of("a|b", &["a", "b"]));
        assert_eq!(algebraic_simplices(&tri(), 2).len(), 27);
    }

    #[test]
    fn closed_star_examples() {
        let path = Multicomplex::simplicial(&[vec!["a", "b"], vec!["b", "c"]]);
        let all: BTreeSet<String> = path.simplices().map(|r| r.id.clone()).collect();
        assert_eq!(closed_star(&path, "b").unwrap().simplices, all);
        let sa = closed_star(&path, "a").unwrap();
        let want: BTreeSet<String> = ["a", "b", "a|b"].iter().map(|s| s.to_string()).collect();
        assert_eq!(sa.simplices, want);
        let bd = Multicomplex::simplicial(&[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"]]);
        let st = closed_star(&bd, "a").unwrap();
        assert!(!st.contains("b|c"));
        assert!(st.contains("c") && st.contains("a|c"));
        assert!(st.is_face_closed(&bd));
        assert!(closed_star(&bd, "z").is_err());
    }

    #[test]
    fn json_round_trip() {
        let k = bigon();
        let back = Multicomplex::from_json_str(&k.to_json_string()).unwrap();
        assert_eq!(back, k);
        assert!(!k.is_simplicial());
        assert!(tri().is_simplicial());
    }

    #[test]
    fn closure_materializes_faces() {
        let t = tri();
        let c = face_closure(&t, [&"a|b".to_string()]).unwrap();
        assert_eq!(c.simplex_count(), 3);
        assert_eq!(validate(&c), Ok(()));
    }
}
