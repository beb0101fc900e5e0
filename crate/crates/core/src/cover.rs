//! Covers of a triangulation by vertex sets: multiplicity, star-subordinate colorings,
//! barycentric subdivision with cover pullback, and the pigeonhole repeated-color witness.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multicomplex::{closed_star, facet_key, Complex, Multicomplex, SimplexId, SimplexRecord, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverMember {
    pub id: String,
    pub vertices: BTreeSet<VertexId>,
    /// Declared, never computed.
    pub amenable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub members: Vec<CoverMember>,
}

impl Cover {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    /// True if every vertex of `t` lies in some member.
    pub fn covers(&self, t: &Multicomplex) -> bool {
        t.vertices().all(|v| self.members.iter().any(|m| m.vertices.contains(v)))
    }

    pub fn all_amenable(&self) -> bool {
        self.members.iter().all(|m| m.amenable)
    }
}

/// Largest number of members with a common vertex.
pub fn multiplicity(c: &Cover) -> Result<usize> {
    if c.members.is_empty() {
        return Err(Error::invalid("empty cover"));
    }
    let all: BTreeSet<&VertexId> = c.members.iter().flat_map(|m| m.vertices.iter()).collect();
    Ok(all
        .into_iter()
        .map(|v| c.members.iter().filter(|m| m.vertices.contains(v)).count())
        .max()
        .unwrap_or(0))
}

/// Multiplicity by enumerating all subfamilies; exponential, for cross-checks.
pub fn multiplicity_brute_force(c: &Cover) -> Result<usize> {
    let n = c.members.len();
    if n == 0 {
        return Err(Error::invalid("empty cover"));
    }
    if n > 20 {
        return Err(Error::invalid("brute force limited to 20 members"));
    }
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let mut common: Option<BTreeSet<&VertexId>> = None;
        for (i, m) in c.members.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let s: BTreeSet<&VertexId> = m.vertices.iter().collect();
            common = Some(match common {
                None => s,
                Some(prev) => prev.intersection(&s).cloned().collect(),
            });
        }
        if common.map_or(false, |s| !s.is_empty()) {
            best = best.max(mask.count_ones() as usize);
        }
    }
    Ok(best)
}

/// Vertex coloring by member index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub colors: BTreeMap<VertexId, usize>,
}

fn star_vertices(t: &Multicomplex, v: &str) -> Result<BTreeSet<VertexId>> {
    Ok(closed_star(t, v)?.vertices(t))
}

/// Smallest admissible member per vertex, or `None` if some star fits in no member.
pub fn find_coloring(t: &Multicomplex, c: &Cover) -> Result<Option<Coloring>> {
    let mut colors = BTreeMap::new();
    for v in t.vertices() {
        let star = star_vertices(t, v)?;
        match c.members.iter().position(|m| star.is_subset(&m.vertices)) {
            Some(i) => {
                colors.insert(v.clone(), i);
            }
            None => return Ok(None),
        }
    }
    Ok(Some(Coloring { colors }))
}

/// Replays the star condition.
pub fn is_admissible(t: &Multicomplex, c: &Cover, col: &Coloring) -> Result<bool> {
    for v in t.vertices() {
        let Some(&i) = col.colors.get(v) else { return Ok(false) };
        let Some(m) = c.members.get(i) else { return Ok(false) };
        if !star_vertices(t, v)?.is_subset(&m.vertices) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// How a member is pulled back to barycenters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pullback {
    /// `<σ>` lies in U iff every vertex of σ does.
    Carrier,
    /// `<σ>` lies in U iff some vertex of σ does (open stars of U's vertices).
    OpenStar,
}

#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: Multicomplex,
    /// New vertex → carrier simplex of the old complex.
    pub carrier: BTreeMap<VertexId, SimplexId>,
    pub cover: Option<Cover>,
}

/// New vertex name for the barycenter of `id`.
pub fn barycenter(id: &str) -> VertexId {
    format!("<{id}>")
}

/// Standard barycentric subdivision: vertices are simplices, simplices are face flags.
pub fn barycentric_subdivide(t: &Multicomplex, c: Option<&Cover>, rule: Pullback) -> Result<Subdivision> {
    let mut below: BTreeMap<SimplexId, BTreeSet<SimplexId>> = BTreeMap::new();
    let mut by_dim: Vec<&SimplexRecord> = t.simplices().collect();
    by_dim.sort_by_key(|r| r.vertices.len());
    for r in &by_dim {
        let mut s = BTreeSet::new();
        for f in r.faces.values() {
            s.insert(f.clone());
            s.extend(below[f].iter().cloned());
        }
        below.insert(r.id.clone(), s);
    }
    let carrier: BTreeMap<VertexId, SimplexId> = t.simplices().map(|r| (barycenter(&r.id), r.id.clone())).collect();
    let mut flags: Vec<Vec<SimplexId>> = Vec::new();
    let mut stack: Vec<Vec<SimplexId>> = by_dim.iter().map(|r| vec![r.id.clone()]).collect();
    while let Some(flag) = stack.pop() {
        let top = flag.last().expect("nonempty flag").clone();
        for r in &by_dim {
            if below[&r.id].contains(&top) {
                let mut next = flag.clone();
                next.push(r.id.clone());
                stack.push(next);
            }
        }
        flags.push(flag);
    }
    let mut tops: Vec<Vec<VertexId>> = flags
        .into_iter()
        .map(|f| {
            let mut v: Vec<VertexId> = f.iter().map(|id| barycenter(id)).collect();
            v.sort();
            v
        })
        .collect();
    tops.sort();
    tops.dedup();
    let complex = Multicomplex::simplicial(&tops);
    let cover = c.map(|c| Cover {
        members: c
            .members
            .iter()
            .map(|m| CoverMember {
                id: m.id.clone(),
                amenable: m.amenable,
                vertices: carrier
                    .iter()
                    .filter(|(_, old)| {
                        let verts = t.simplex_vertices(old).expect("carrier simplex");
                        match rule {
                            Pullback::Carrier => verts.iter().all(|v| m.vertices.contains(v)),
                            Pullback::OpenStar => verts.iter().any(|v| m.vertices.contains(v)),
                        }
                    })
                    .map(|(new, _)| new.clone())
                    .collect(),
            })
            .collect(),
    });
    Ok(Subdivision { complex, carrier, cover })
}

/// Two vertices of Δ with the same color, which exist by pigeonhole when dim Δ ≥ mult.
pub fn repeated_color_witness(
    t: &Multicomplex,
    col: &Coloring,
    delta: &str,
    mult: usize,
) -> std::result::Result<(VertexId, VertexId), String> {
    let verts = t
        .simplex_vertices(delta)
        .ok_or_else(|| format!("`{delta}` is not a simplex"))?;
    let n = verts.len() - 1;
    if n < mult {
        return Err(format!("dimension {n} of `{delta}` is below the multiplicity {mult}"));
    }
    for (i, a) in verts.iter().enumerate() {
        for b in &verts[i + 1..] {
            if col.colors.get(a).is_some() && col.colors.get(a) == col.colors.get(b) {
                return Ok((a.clone(), b.clone()));
            }
        }
    }
    Err(format!(
        "all {} vertices of `{delta}` carry distinct colors although the multiplicity is {mult}: the coloring is not admissible",
        n + 1
    ))
}

/// Facet key of a vertex pair, for reporting.
pub fn pair_key(a: &str, b: &str) -> String {
    facet_key(&[a, b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology_lp::homology;

    fn member(id: &str, vs: &[&str]) -> CoverMember {
        CoverMember {
            id: id.into(),
            vertices: vs.iter().map(|s| s.to_string()).collect(),
            amenable: true,
        }
    }

    fn hexagon() -> Multicomplex {
        let edges: Vec<Vec<String>> = (0..6)
            .map(|i| {
                let mut v = vec![format!("c{i}"), format!("c{}", (i + 1) % 6)];
                v.sort();
                v
            })
            .collect();
        Multicomplex::simplicial(&edges)
    }

    #[test]
    fn multiplicity_examples() {
        let one = Cover { members: vec![member("A", &["a", "b"])] };
        assert_eq!(multiplicity(&one).unwrap(), 1);
        let two = Cover { members: vec![member("A", &["a", "b"]), member("B", &["b", "c"])] };
        assert_eq!(multiplicity(&two).unwrap(), 2);
        let arcs = Cover {
            members: vec![member("A", &["c0", "c1", "c2"]), member("B", &["c2", "c3", "c4"]), member("C", &["c4", "c5", "c0"])],
        };
        assert_eq!(multiplicity(&arcs).unwrap(), 2);
        assert_eq!(multiplicity_brute_force(&arcs).unwrap(), 2);
        assert!(multiplicity(&Cover { members: vec![] }).is_err());
    }

    #[test]
    fn colorings() {
        let t = hexagon();
        let all: Vec<String> = t.vertices().cloned().collect();
        let refs: Vec<&str> = all.iter().map(|s| s.as_str()).collect();
        let whole = Cover { members: vec![member("X", &refs)] };
        let col = find_coloring(&t, &whole).unwrap().unwrap();
        assert!(col.colors.values().all(|&i| i == 0));
        let arcs = Cover {
            members: vec![member("A", &["c0", "c1", "c2", "c3"]), member("B", &["c3", "c4", "c5", "c0"])],
        };
        assert!(find_coloring(&t, &arcs).unwrap().is_none());
        let carrier = barycentric_subdivide(&t, Some(&arcs), Pullback::Carrier).unwrap();
        assert!(find_coloring(&carrier.complex, carrier.cover.as_ref().unwrap()).unwrap().is_none());
        let open = barycentric_subdivide(&t, Some(&arcs), Pullback::OpenStar).unwrap();
        let c2 = open.cover.unwrap();
        let col2 = find_coloring(&open.complex, &c2).unwrap().unwrap();
        assert!(is_admissible(&open.complex, &c2, &col2).unwrap());
    }

    #[test]
    fn subdivision_counts_and_homology() {
        let edge = Multicomplex::simplicial(&[vec!["a", "b"]]);
        let sd = barycentric_subdivide(&edge, None, Pullback::Carrier).unwrap();
        assert_eq!(sd.complex.vertex_count(), 3);
        assert_eq!(sd.complex.simplices_of_dim(1).len(), 2);
        let tri = Multicomplex::simplicial(&[vec!["a", "b", "c"]]);
        let sd = barycentric_subdivide(&tri, None, Pullback::Carrier).unwrap();
        assert_eq!(sd.complex.vertex_count(), 7);
        assert_eq!(sd.complex.simplices_of_dim(2).len(), 6);
        let chi: i64 = (0..3).map(|d| (if d % 2 == 0 { 1 } else { -1 }) * sd.complex.simplices_of_dim(d).len() as i64).sum();
        assert_eq!(chi, 1);
        let t = hexagon();
        let sd = barycentric_subdivide(&t, None, Pullback::Carrier).unwrap();
        for n in 0..2 {
            assert_eq!(homology(&t, n).unwrap().dimension, homology(&sd.complex, n).unwrap().dimension);
        }
    }

    #[test]
    fn pigeonhole() {
        let tri = Multicomplex::simplicial(&[vec!["a", "b", "c"]]);
        let one = Cover { members: vec![member("A", &["a", "b", "c"])] };
        let col = find_coloring(&tri, &one).unwrap().unwrap();
        assert!(repeated_color_witness(&tri, &col, "a|b|c", 1).is_ok());
        let bad = Coloring { colors: [("a", 0), ("b", 1), ("c", 2)].iter().map(|(v, i)| (v.to_string(), *i)).collect() };
        let err = repeated_color_witness(&tri, &bad, "a|b|c", 2).unwrap_err();
        assert!(err.contains("not admissible"));
        let t = hexagon();
        let sd = barycentric_subdivide(&t, None, Pullback::Carrier).unwrap();
        let all: Vec<String> = sd.complex.vertices().cloned().collect();
        let whole = Cover { members: vec![CoverMember { id: "X".into(), vertices: all.into_iter().collect(), amenable: true }] };
        let col = find_coloring(&sd.complex, &whole).unwrap().unwrap();
        for e in sd.complex.simplices_of_dim(1) {
            let (a, b) = repeated_color_witness(&sd.complex, &col, e, 1).unwrap();
            assert_eq!(pair_key(&a, &b), *e);
        }
    }
}
