//! Simplicial automorphisms, group actions on algebraic simplices, orbits, odd stabilizers
//! and chain-homotopy witnesses.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chains::{boundary, boundary_of, is_cycle, permutation_sign, Chain, ChainTerm};
use crate::error::{Error, Result};
use crate::models::circle::{self, LiftMap};
use crate::multicomplex::{
    algebraic_simplices, facet_key, AlgebraicSimplex, Complex, Multicomplex, SimplexId, VertexId,
};
use crate::rational::{fmt_q, parse_q, qi, Q};

/// One letter `gen^exp` of a word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: String,
    pub exp: i64,
}

/// A word in the generators, read as a composition: `a b` means apply `b` first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(label: &str) -> Self {
        Word::power(label, 1)
    }

    pub fn power(label: &str, exp: i64) -> Self {
        Word(Vec::new()).times(&Word(vec![Letter {
            gen: label.to_string(),
            exp,
        }]))
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letter_count(&self) -> usize {
        self.0.len()
    }

    /// Concatenation with free reduction of adjacent powers of one generator.
    pub fn times(&self, other: &Word) -> Word {
        let mut out: Vec<Letter> = self.0.clone();
        for l in &other.0 {
            if l.exp == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.gen == l.gen => {
                    last.exp += l.exp;
                    if last.exp == 0 {
                        out.pop();
                    }
                }
                _ => out.push(l.clone()),
            }
        }
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(
            self.0
                .iter()
                .rev()
                .map(|l| Letter {
                    gen: l.gen.clone(),
                    exp: -l.exp,
                })
                .collect(),
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| {
                if l.exp == 1 {
                    l.gen.clone()
                } else {
                    format!("{}^{}", l.gen, l.exp)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let mut w = Word::identity();
        for tok in s.split_whitespace() {
            if tok == "e" {
                continue;
            }
            let (gen, exp) = match tok.split_once('^') {
                Some((g, e)) => (
                    g,
                    e.parse::<i64>()
                        .map_err(|_| Error::invalid(format!("bad exponent in `{tok}`")))?,
                ),
                None => (tok, 1),
            };
            if gen.is_empty() {
                return Err(Error::invalid(format!("bad letter `{tok}`")));
            }
            w = w.times(&Word::power(gen, exp));
        }
        Ok(w)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Explicit (possibly partial) vertex and simplex tables.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TableMap {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub simplex_map: BTreeMap<SimplexId, SimplexId>,
}

impl TableMap {
    pub fn identity_on(k: &Multicomplex) -> Self {
        TableMap {
            vertex_map: k.vertices().map(|v| (v.clone(), v.clone())).collect(),
            simplex_map: k.simplices().map(|r| (r.id.clone(), r.id.clone())).collect(),
        }
    }

    /// `self ∘ inner`, defined where both steps are.
    pub fn compose(&self, inner: &TableMap) -> TableMap {
        TableMap {
            vertex_map: inner
                .vertex_map
                .iter()
                .filter_map(|(a, b)| self.vertex_map.get(b).map(|c| (a.clone(), c.clone())))
                .collect(),
            simplex_map: inner
                .simplex_map
                .iter()
                .filter_map(|(a, b)| self.simplex_map.get(b).map(|c| (a.clone(), c.clone())))
                .collect(),
        }
    }

    pub fn inverse(&self) -> Result<TableMap> {
        let mut vm = BTreeMap::new();
        for (a, b) in &self.vertex_map {
            if vm.insert(b.clone(), a.clone()).is_some() {
                return Err(Error::invalid(format!("vertex map is not injective at `{b}`")));
            }
        }
        let mut sm = BTreeMap::new();
        for (a, b) in &self.simplex_map {
            if sm.insert(b.clone(), a.clone()).is_some() {
                return Err(Error::invalid(format!("simplex map is not injective at `{b}`")));
            }
        }
        Ok(TableMap {
            vertex_map: vm,
            simplex_map: sm,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().all(|(a, b)| a == b) && self.simplex_map.iter().all(|(a, b)| a == b)
    }
}

/// A simplicial automorphism, given by tables or by a circle lift map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Automorphism {
    Table(TableMap),
    Lift(LiftMap),
}

impl Automorphism {
    pub fn is_identity(&self) -> bool {
        match self {
            Automorphism::Table(t) => t.is_identity(),
            Automorphism::Lift(l) => l.is_identity(),
        }
    }

    pub fn map_vertex(&self, v: &str) -> Option<VertexId> {
        match self {
            Automorphism::Table(t) => t.vertex_map.get(v).cloned(),
            Automorphism::Lift(l) => l.vertex_image(v),
        }
    }

    pub fn map_simplex(&self, k: &dyn Complex, id: &str) -> Option<SimplexId> {
        match self {
            Automorphism::Table(t) => t.simplex_map.get(id).cloned(),
            Automorphism::Lift(l) => {
                let lifts = circle::parse_id(id, l.modulus)?;
                let img: Vec<i64> = lifts.iter().map(|&x| l.apply(x)).collect();
                let canon = circle::canonicalize(&img, l.modulus)?;
                let out = circle::lifts_id(&canon, l.modulus);
                k.contains_simplex(&out).then_some(out)
            }
        }
    }

    /// g·(Δ,(v₀..vₙ)) = (g(Δ),(g(v₀)..g(vₙ))).
    pub fn apply_simplex(
        &self,
        k: &dyn Complex,
        sigma: &AlgebraicSimplex,
        label: &dyn fmt::Display,
    ) -> Result<AlgebraicSimplex> {
        let exhausted = || Error::WindowExhausted {
            element: label.to_string(),
            simplex: sigma.simplex.clone(),
        };
        let simplex = self.map_simplex(k, &sigma.simplex).ok_or_else(exhausted)?;
        let tuple = sigma
            .tuple
            .iter()
            .map(|v| self.map_vertex(v))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(exhausted)?;
        Ok(AlgebraicSimplex::new(simplex, tuple))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Automorphism) -> Result<Automorphism> {
        match (self, inner) {
            (Automorphism::Table(a), Automorphism::Table(b)) => Ok(Automorphism::Table(a.compose(b))),
            (Automorphism::Lift(a), Automorphism::Lift(b)) if a.modulus == b.modulus => {
                Ok(Automorphism::Lift(a.compose(b)))
            }
            _ => Err(Error::ComplexMismatch(
                "composing automorphisms of different models".into(),
            )),
        }
    }

    pub fn inverse(&self) -> Result<Automorphism> {
        match self {
            Automorphism::Table(t) => Ok(Automorphism::Table(t.inverse()?)),
            Automorphism::Lift(l) => Ok(Automorphism::Lift(l.inverse())),
        }
    }

    pub fn pow(&self, e: i64, identity: &Automorphism) -> Result<Automorphism> {
        match self {
            Automorphism::Lift(l) => Ok(Automorphism::Lift(l.pow(e))),
            Automorphism::Table(_) => {
                let base = if e < 0 { self.inverse()? } else { self.clone() };
                let mut acc = identity.clone();
                for _ in 0..e.unsigned_abs() {
                    acc = acc.compose(&base)?;
                }
                Ok(acc)
            }
        }
    }

    fn same_model(&self, other: &Automorphism) -> bool {
        match (self, other) {
            (Automorphism::Table(_), Automorphism::Table(_)) => true,
            (Automorphism::Lift(a), Automorphism::Lift(b)) => a.modulus == b.modulus,
            _ => false,
        }
    }
}

/// Linear extension of the basis action.
pub fn apply(
    k: &dyn Complex,
    g: &Automorphism,
    label: &dyn fmt::Display,
    c: &Chain,
) -> Result<Chain> {
    c.map_basis(|s| g.apply_simplex(k, s, label))
}

/// Checks that a table map is a (partial) automorphism of `k`: bijective where defined,
/// dimension and vertex-set preserving, and compatible with faces.
pub fn check_table_automorphism(k: &Multicomplex, t: &TableMap) -> Result<()> {
    t.inverse()?;
    for (a, b) in &t.vertex_map {
        if !k.has_vertex(a) || !k.has_vertex(b) {
            return Err(Error::invalid(format!("vertex map `{a}` -> `{b}` leaves the complex")));
        }
    }
    for (a, b) in &t.simplex_map {
        let (Some(ra), Some(rb)) = (k.get(a), k.get(b)) else {
            return Err(Error::invalid(format!("simplex map `{a}` -> `{b}` leaves the complex")));
        };
        let img: Option<Vec<VertexId>> = ra.vertices.iter().map(|v| t.vertex_map.get(v).cloned()).collect();
        let Some(img) = img else {
            return Err(Error::invalid(format!("vertex map undefined on `{a}`")));
        };
        if facet_key(&img) != facet_key(&rb.vertices) {
            return Err(Error::invalid(format!(
                "simplex map `{a}` -> `{b}` disagrees with the vertex map"
            )));
        }
        for (key, f) in &ra.faces {
            let fv: Vec<&str> = key.split('|').collect();
            let gf: Vec<VertexId> = fv.iter().map(|v| t.vertex_map[*v].clone()).collect();
            let want = rb.faces.get(&facet_key(&gf));
            if let Some(img_f) = t.simplex_map.get(f) {
                if Some(img_f) != want {
                    return Err(Error::invalid(format!(
                        "simplex map is not compatible with the face `{f}` of `{a}`"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Supported amenable families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Finite group, closure enumerated.
    Finite,
    /// Lift maps of the circle model; orbits and stabilizers are constructive.
    Lift,
    /// Window-limited partial tables, searched up to a word budget.
    Window,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub map: Automorphism,
}

/// An element fixing a simplex while permuting its vertices oddly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerHit {
    pub word: Word,
    pub map: Automorphism,
    pub sign: i64,
}

const MAX_FINITE_ORDER: usize = 5040;

#[derive(Clone, Debug)]
pub struct GroupAction {
    pub generators: Vec<Generator>,
    pub family: Family,
    pub witnesses: BTreeMap<String, HomotopyWitness>,
    pub word_budget: usize,
    identity: Automorphism,
    closure: Option<Vec<(Word, Automorphism)>>,
}

impl GroupAction {
    /// Finite group generated by `generators`; the closure is enumerated breadth-first.
    pub fn finite(
        k: &Multicomplex,
        generators: Vec<Generator>,
        witnesses: BTreeMap<String, HomotopyWitness>,
    ) -> Result<Self> {
        let identity = Automorphism::Table(TableMap::identity_on(k));
        for g in &generators {
            match &g.map {
                Automorphism::Table(t) => check_table_automorphism(k, t)?,
                Automorphism::Lift(_) => {
                    return Err(Error::UnsupportedFamily("finite actions use tables".into()))
                }
            }
        }
        let mut closure: Vec<(Word, Automorphism)> = vec![(Word::identity(), identity.clone())];
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in &generators {
                let next = g.map.compose(&closure[i].1)?;
                if closure.iter().any(|(_, e)| *e == next) {
                    continue;
                }
                if closure.len() >= MAX_FINITE_ORDER {
                    return Err(Error::UnsupportedFamily(format!(
                        "closure exceeds {MAX_FINITE_ORDER} elements"
                    )));
                }
                let w = Word::gen(&g.label).times(&closure[i].0);
                closure.push((w, next));
                queue.push_back(closure.len() - 1);
            }
        }
        Ok(GroupAction {
            generators,
            family: Family::Finite,
            witnesses,
            word_budget: 0,
            identity,
            closure: Some(closure),
        })
    }

    /// The trivial group acting on `k`.
    pub fn trivial(k: &Multicomplex) -> Self {
        GroupAction::finite(k, Vec::new(), BTreeMap::new()).expect("identity closure")
    }

    /// Action by circle lift maps of modulus `m`.
    pub fn lift(m: usize, generators: Vec<Generator>) -> Result<Self> {
        for g in &generators {
            match &g.map {
                Automorphism::Lift(l) if l.modulus == m => {}
                _ => {
                    return Err(Error::UnsupportedFamily(format!(
                        "generator `{}` is not a lift map mod {m}",
                        g.label
                    )))
                }
            }
        }
        let mut action = GroupAction {
            generators,
            family: Family::Lift,
            witnesses: BTreeMap::new(),
            word_budget: 4,
            identity: Automorphism::Lift(LiftMap::identity(m)),
            closure: None,
        };
        let labels: Vec<String> = action.generators.iter().map(|g| g.label.clone()).collect();
        for l in labels {
            let w = action.witness_for(&Word::gen(&l))?;
            action.witnesses.insert(l, w);
        }
        Ok(action)
    }

    /// Window-limited action by partial tables, explored up to `word_budget` letters.
    pub fn window(
        k: &Multicomplex,
        generators: Vec<Generator>,
        witnesses: BTreeMap<String, HomotopyWitness>,
        word_budget: usize,
    ) -> Result<Self> {
        for g in &generators {
            if let Automorphism::Table(t) = &g.map {
                check_table_automorphism(k, t)?;
            }
        }
        Ok(GroupAction {
            generators,
            family: Family::Window,
            witnesses,
            word_budget,
            identity: Automorphism::Table(TableMap::identity_on(k)),
            closure: None,
        })
    }

    pub fn identity(&self) -> &Automorphism {
        &self.identity
    }

    pub fn closure(&self) -> Option<&[(Word, Automorphism)]> {
        self.closure.as_deref()
    }

    pub fn generator(&self, label: &str) -> Option<&Generator> {
        self.generators.iter().find(|g| g.label == label)
    }

    pub fn modulus(&self) -> Option<usize> {
        match &self.identity {
            Automorphism::Lift(l) => Some(l.modulus),
            Automorphism::Table(_) => None,
        }
    }

    /// Evaluates a word.
    pub fn element(&self, w: &Word) -> Result<Automorphism> {
        let mut acc = self.identity.clone();
        for l in &w.0 {
            let g = self
                .generator(&l.gen)
                .ok_or_else(|| Error::invalid(format!("unknown generator `{}`", l.gen)))?;
            acc = acc.compose(&g.map.pow(l.exp, &self.identity)?)?;
        }
        Ok(acc)
    }

    /// Generators together with their inverses, as single-letter words.
    fn letters(&self) -> Vec<(Word, Automorphism)> {
        let mut out = Vec::new();
        for g in &self.generators {
            out.push((Word::gen(&g.label), g.map.clone()));
            if let Ok(inv) = g.map.inverse() {
                if inv != g.map {
                    out.push((Word::power(&g.label, -1), inv));
                }
            }
        }
        out
    }

    /// Partition of the given support into orbits, each sorted, ordered by minimal element.
    pub fn orbits(&self, k: &dyn Complex, support: &[AlgebraicSimplex]) -> Result<Vec<Vec<AlgebraicSimplex>>> {
        let support: BTreeSet<AlgebraicSimplex> = support.iter().cloned().collect();
        let mut groups: BTreeMap<String, Vec<AlgebraicSimplex>> = BTreeMap::new();
        match self.family {
            Family::Finite => {
                let closure = self.closure.as_ref().expect("finite closure");
                for s in &support {
                    let mut best: Option<AlgebraicSimplex> = None;
                    for (w, g) in closure {
                        let img = g.apply_simplex(k, s, w)?;
                        if best.as_ref().map_or(true, |b| img < *b) {
                            best = Some(img);
                        }
                    }
                    groups.entry(best.expect("identity").to_string()).or_default().push(s.clone());
                }
            }
            Family::Lift => {
                for s in &support {
                    let key: Vec<usize> = s
                        .tuple
                        .iter()
                        .map(|v| s.tuple.iter().position(|x| x == v).unwrap())
                        .collect();
                    groups.entry(format!("{key:?}")).or_default().push(s.clone());
                }
            }
            Family::Window => {
                let items: Vec<AlgebraicSimplex> = support.iter().cloned().collect();
                let index: BTreeMap<&AlgebraicSimplex, usize> =
                    items.iter().enumerate().map(|(i, s)| (s, i)).collect();
                let mut parent: Vec<usize> = (0..items.len()).collect();
                fn find(p: &mut Vec<usize>, x: usize) -> usize {
                    let mut r = x;
                    while p[r] != r {
                        r = p[r];
                    }
                    p[x] = r;
                    r
                }
                let letters = self.letters();
                for (i, s) in items.iter().enumerate() {
                    let mut seen: BTreeSet<AlgebraicSimplex> = BTreeSet::from([s.clone()]);
                    let mut frontier = vec![s.clone()];
                    for _ in 0..self.word_budget {
                        let mut next = Vec::new();
                        for t in &frontier {
                            for (w, g) in &letters {
                                let Ok(img) = g.apply_simplex(k, t, w) else { continue };
                                if seen.insert(img.clone()) {
                                    if let Some(&j) = index.get(&img) {
                                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                                        parent[a] = b;
                                    }
                                    next.push(img);
                                }
                            }
                        }
                        frontier = next;
                    }
                }
                for (i, s) in items.iter().enumerate() {
                    let r = find(&mut parent, i);
                    groups.entry(format!("{r:08}")).or_default().push(s.clone());
                }
            }
        }
        let mut out: Vec<Vec<AlgebraicSimplex>> = groups.into_values().collect();
        for o in &mut out {
            o.sort();
        }
        out.sort_by(|a, b| a[0].cmp(&b[0]));
        Ok(out)
    }

    /// An element fixing `delta` and inducing an odd permutation of its vertices.
    pub fn stabilizer_sign_search(&self, k: &dyn Complex, delta: &str) -> Result<Option<StabilizerHit>> {
        let verts = k
            .simplex_vertices(delta)
            .ok_or_else(|| Error::invalid(format!("unknown simplex `{delta}`")))?;
        if verts.len() < 2 {
            return Ok(None);
        }
        let check = |g: &Automorphism| -> Option<i64> {
            if g.map_simplex(k, delta)? != delta {
                return None;
            }
            let perm: Option<Vec<usize>> = verts
                .iter()
                .map(|v| {
                    let img = g.map_vertex(v)?;
                    verts.iter().position(|x| *x == img)
                })
                .collect();
            let sign = permutation_sign(&perm?);
            (sign < 0).then_some(sign)
        };
        match self.family {
            Family::Finite => {
                for (w, g) in self.closure.as_ref().expect("finite closure") {
                    if let Some(sign) = check(g) {
                        return Ok(Some(StabilizerHit {
                            word: w.clone(),
                            map: g.clone(),
                            sign,
                        }));
                    }
                }
                Ok(None)
            }
            Family::Lift => {
                let m = self.modulus().expect("lift modulus");
                let lifts = circle::parse_id(delta, m)
                    .ok_or_else(|| Error::invalid(format!("`{delta}` is not a circle simplex")))?;
                let swap = circle::edge_swap(m, lifts[0], lifts[1]);
                let letters: Vec<(String, i64)> = circle::decompose(&swap);
                let word = Word(
                    letters
                        .into_iter()
                        .map(|(gen, exp)| Letter { gen, exp })
                        .collect(),
                );
                let fits = word.0.iter().all(|l| self.generator(&l.gen).is_some())
                    && self.element(&word).ok() == Some(Automorphism::Lift(swap.clone()));
                if fits {
                    let g = Automorphism::Lift(swap);
                    if let Some(sign) = check(&g) {
                        return Ok(Some(StabilizerHit { word, map: g, sign }));
                    }
                    return Err(Error::WindowExhausted {
                        element: word.to_string(),
                        simplex: delta.to_string(),
                    });
                }
                self.search_words(check)
            }
            Family::Window => self.search_words(check),
        }
    }

    fn search_words(&self, check: impl Fn(&Automorphism) -> Option<i64>) -> Result<Option<StabilizerHit>> {
        let letters = self.letters();
        let mut frontier: Vec<(Word, Automorphism)> = vec![(Word::identity(), self.identity.clone())];
        let mut seen: Vec<Automorphism> = vec![self.identity.clone()];
        for _ in 0..self.word_budget {
            let mut next = Vec::new();
            for (w, g) in &frontier {
                for (lw, l) in &letters {
                    let e = l.compose(g)?;
                    if seen.contains(&e) {
                        continue;
                    }
                    let word = lw.times(w);
                    if let Some(sign) = check(&e) {
                        return Ok(Some(StabilizerHit { word, map: e, sign }));
                    }
                    seen.push(e.clone());
                    next.push((word, e));
                }
            }
            frontier = next;
        }
        Ok(None)
    }

    /// Homotopy witness for a word: constructive for lift actions, composed from generator
    /// witnesses otherwise.
    pub fn witness_for(&self, w: &Word) -> Result<HomotopyWitness> {
        let map = self.element(w)?;
        if let Automorphism::Lift(l) = &map {
            return Ok(HomotopyWitness {
                element: w.clone(),
                map: map.clone(),
                degree_cap: 1,
                bounds: circle::filling_bounds(),
                kind: WitnessKind::Filling(l.clone()),
            });
        }
        let mut acc: Option<HomotopyWitness> = None;
        for letter in w.0.iter().rev() {
            let base = self.witnesses.get(&letter.gen).ok_or_else(|| {
                Error::Witness(format!("no witness for generator `{}`", letter.gen))
            })?;
            let unit = if letter.exp < 0 { inverse_witness(base)? } else { base.clone() };
            for _ in 0..letter.exp.unsigned_abs() {
                acc = Some(match acc {
                    None => unit.clone(),
                    Some(prev) => compose_witness(&unit, &prev)?,
                });
            }
        }
        Ok(acc.unwrap_or_else(|| HomotopyWitness::zero(self.identity.clone(), crate::DEFAULT_DEGREE_CAP)))
    }
}

/// Realizations of the chain homotopy h.
#[derive(Clone, Debug)]
pub enum WitnessKind {
    Zero,
    /// Tabulated images; a missing entry is zero unless the table is partial.
    Table {
        images: BTreeMap<AlgebraicSimplex, Chain>,
        partial: bool,
    },
    Prism(LiftMap),
    Filling(LiftMap),
    /// `h_{γδ} = h_γ + γ∘h_δ` with `γ` first.
    Composed(Box<HomotopyWitness>, Box<HomotopyWitness>),
    /// `h_{g⁻¹} = −g⁻¹∘h_g`.
    Inverse(Box<HomotopyWitness>),
}

/// A chain homotopy `∂h + h∂ = g − id` with a per-degree norm bound.
#[derive(Clone, Debug)]
pub struct HomotopyWitness {
    pub element: Word,
    pub map: Automorphism,
    pub degree_cap: usize,
    /// `bounds[n] ≥ max ‖h_n(σ)‖₁`.
    pub bounds: Vec<Q>,
    pub kind: WitnessKind,
}

impl HomotopyWitness {
    pub fn zero(identity: Automorphism, cap: usize) -> Self {
        HomotopyWitness {
            element: Word::identity(),
            map: identity,
            degree_cap: cap,
            bounds: vec![Q::zero(); cap + 1],
            kind: WitnessKind::Zero,
        }
    }

    pub fn prism(element: Word, lift: LiftMap, cap: usize) -> Self {
        HomotopyWitness {
            element,
            map: Automorphism::Lift(lift.clone()),
            degree_cap: cap,
            bounds: (0..=cap).map(|n| qi(n as i64 + 1)).collect(),
            kind: WitnessKind::Prism(lift),
        }
    }

    pub fn bound(&self, n: usize) -> Q {
        self.bounds.get(n).cloned().unwrap_or_else(Q::zero)
    }

    /// True if h may be undefined on some simplices of a finite complex.
    pub fn is_partial(&self) -> bool {
        match &self.kind {
            WitnessKind::Zero => false,
            WitnessKind::Table { partial, .. } => *partial,
            WitnessKind::Prism(_) | WitnessKind::Filling(_) => true,
            WitnessKind::Composed(a, b) => a.is_partial() || b.is_partial(),
            WitnessKind::Inverse(a) => a.is_partial(),
        }
    }

    fn undefined(&self, sigma: &AlgebraicSimplex) -> Error {
        Error::WindowExhausted {
            element: self.element.to_string(),
            simplex: sigma.simplex.clone(),
        }
    }

    /// h_n(σ), a chain of degree n+1.
    pub fn h(&self, k: &dyn Complex, sigma: &AlgebraicSimplex) -> Result<Chain> {
        let n = sigma.degree();
        if n > self.degree_cap {
            return Err(Error::Witness(format!(
                "degree {n} exceeds witness cap {} for `{}`",
                self.degree_cap, self.element
            )));
        }
        let out = match &self.kind {
            WitnessKind::Zero => Chain::zero(n + 1),
            WitnessKind::Table { images, partial } => match images.get(sigma) {
                Some(c) => c.clone(),
                None if *partial => return Err(self.undefined(sigma)),
                None => Chain::zero(n + 1),
            },
            WitnessKind::Prism(l) => circle::prism_chain(k, l, sigma).map_err(|_| self.undefined(sigma))?,
            WitnessKind::Filling(l) => {
                circle::filling_chain(k, l, sigma).map_err(|_| self.undefined(sigma))?
            }
            WitnessKind::Composed(a, b) => {
                let first = a.h(k, sigma)?;
                let second = b.h(k, sigma)?;
                first.add(&apply(k, &a.map, &a.element, &second)?)
            }
            WitnessKind::Inverse(a) => {
                let inv = a.map.inverse()?;
                apply(k, &inv, &self.element, &a.h(k, sigma)?)?.neg()
            }
        };
        if out.l1_norm() > self.bound(n) {
            return Err(Error::Witness(format!(
                "‖h({sigma})‖ = {} exceeds the bound {} of `{}`",
                fmt_q(&out.l1_norm()),
                fmt_q(&self.bound(n)),
                self.element
            )));
        }
        Ok(out)
    }
}

/// Where a witness check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessFailure {
    pub sigma: AlgebraicSimplex,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WitnessReport {
    pub checked: usize,
    pub skipped: usize,
    pub failure: Option<WitnessFailure>,
}

impl WitnessReport {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `∂h(σ) + h(∂σ) = gσ − σ` and the norm bound on one simplex.
/// `Ok(false)` means σ lies outside a partial witness's domain.
fn check_identity(k: &dyn Complex, w: &HomotopyWitness, sigma: &AlgebraicSimplex) -> std::result::Result<bool, String> {
    let n = sigma.degree();
    let outside = |e: &Error| e.is_window_exhaustion() && w.is_partial();
    let h = match w.h(k, sigma) {
        Ok(h) => h,
        Err(e) if outside(&e) => return Ok(false),
        Err(e) => return Err(e.to_string()),
    };
    let gs = match w.map.apply_simplex(k, sigma, &w.element) {
        Ok(s) => s,
        Err(e) if outside(&e) => return Ok(false),
        Err(e) => return Err(e.to_string()),
    };
    let mut lhs = if h.is_zero() { Chain::zero(n) } else { boundary(k, &h).map_err(|e| e.to_string())? };
    if n > 0 {
        let bd = boundary_of(k, sigma).map_err(|e| e.to_string())?;
        let hb = bd.map_linear(n, |f| w.h(k, f));
        match hb {
            Ok(hb) => lhs = lhs.add(&hb),
            Err(e) if outside(&e) => return Ok(false),
            Err(e) => return Err(e.to_string()),
        }
    }
    let rhs = Chain::single(gs, qi(1)).sub(&Chain::single(sigma.clone(), qi(1)));
    if lhs != rhs {
        return Err("chain-homotopy identity fails".into());
    }
    Ok(true)
}

/// Verifies the witness on the given simplices.
pub fn verify_witness_on<'a>(
    k: &dyn Complex,
    w: &HomotopyWitness,
    sigmas: impl IntoIterator<Item = &'a AlgebraicSimplex>,
) -> WitnessReport {
    let mut rep = WitnessReport::default();
    for s in sigmas {
        match check_identity(k, w, s) {
            Ok(true) => rep.checked += 1,
            Ok(false) => rep.skipped += 1,
            Err(reason) => {
                rep.failure = Some(WitnessFailure {
                    sigma: s.clone(),
                    reason,
                });
                return rep;
            }
        }
    }
    rep
}

/// Verifies the witness on all of Θ(n), n ≤ cap. Partial witnesses are checked on their domain.
pub fn verify_witness(k: &Multicomplex, w: &HomotopyWitness) -> WitnessReport {
    let mut all = Vec::new();
    for n in 0..=w.degree_cap {
        all.extend(algebraic_simplices(k, n));
    }
    verify_witness_on(k, w, all.iter())
}

/// Witness for `γδ` from witnesses for `γ` (first) and `δ` (second).
pub fn compose_witness(w1: &HomotopyWitness, w2: &HomotopyWitness) -> Result<HomotopyWitness> {
    if !w1.map.same_model(&w2.map) {
        return Err(Error::ComplexMismatch("witnesses live on different complexes".into()));
    }
    let cap = w1.degree_cap.min(w2.degree_cap);
    let bounds: Vec<Q> = (0..=cap).map(|n| w1.bound(n) + w2.bound(n)).collect();
    let element = w1.element.times(&w2.element);
    let map = w1.map.compose(&w2.map)?;
    let kind = match (&w1.kind, &w2.kind) {
        (WitnessKind::Zero, _) => w2.kind.clone(),
        (_, WitnessKind::Zero) => w1.kind.clone(),
        _ => WitnessKind::Composed(Box::new(w1.clone()), Box::new(w2.clone())),
    };
    Ok(HomotopyWitness {
        element,
        map,
        degree_cap: cap,
        bounds,
        kind,
    })
}

/// Witness for `g⁻¹` from a witness for `g`.
pub fn inverse_witness(w: &HomotopyWitness) -> Result<HomotopyWitness> {
    let kind = match &w.kind {
        WitnessKind::Zero => WitnessKind::Zero,
        _ => WitnessKind::Inverse(Box::new(w.clone())),
    };
    Ok(HomotopyWitness {
        element: w.element.inverse(),
        map: w.map.inverse()?,
        degree_cap: w.degree_cap,
        bounds: w.bounds.clone(),
        kind,
    })
}

/// b = h(c), with ∂b = g·c − c for a cycle c and ‖b‖₁ ≤ B·‖c‖₁.
pub fn bounding_chain(k: &dyn Complex, w: &HomotopyWitness, c: &Chain) -> Result<Chain> {
    let n = c.degree();
    if n > 0 && !is_cycle(k, c)? {
        return Err(Error::NotACycle);
    }
    let b = c.map_linear(n + 1, |s| w.h(k, s))?;
    if b.l1_norm() > w.bound(n) * c.l1_norm() {
        return Err(Error::Witness(format!("bounding chain of `{}` exceeds its bound", w.element)));
    }
    Ok(b)
}

/// One tabulated witness image in the action file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessImage {
    pub simplex: SimplexId,
    pub tuple: Vec<VertexId>,
    pub image_chain: Vec<ChainTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub label: String,
    pub degree_cap: usize,
    pub h: Vec<WitnessImage>,
    pub bound: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub partial: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub label: String,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub simplex_map: BTreeMap<SimplexId, SimplexId>,
}

/// Lift descriptor: when present, generators act as circle lift maps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftModel {
    pub modulus: usize,
    pub displacements: BTreeMap<String, Vec<i64>>,
}

/// The action file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default)]
    pub witnesses: Vec<WitnessEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_model: Option<LiftModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_budget: Option<usize>,
}

impl WitnessEntry {
    pub fn from_witness(label: &str, k: &Multicomplex, w: &HomotopyWitness) -> Result<Self> {
        let mut h = Vec::new();
        let mut partial = false;
        for n in 0..=w.degree_cap {
            for s in algebraic_simplices(k, n) {
                match w.h(k, &s) {
                    Ok(c) if c.is_zero() => {}
                    Ok(c) => h.push(WitnessImage {
                        simplex: s.simplex.clone(),
                        tuple: s.tuple.clone(),
                        image_chain: c.to_terms(),
                    }),
                    Err(e) if e.is_window_exhaustion() => partial = true,
                    Err(e) => return Err(e),
                }
            }
        }
        let bound = w.bounds.iter().cloned().max().unwrap_or_else(Q::zero);
        Ok(WitnessEntry {
            label: label.to_string(),
            degree_cap: w.degree_cap,
            h,
            bound: fmt_q(&bound),
            bounds: Some(w.bounds.iter().map(fmt_q).collect()),
            partial: partial || w.is_partial(),
        })
    }

    /// A tabulated witness for `map`; a partial table is only defined on listed simplices.
    pub fn to_witness(&self, map: Automorphism) -> Result<HomotopyWitness> {
        let mut images = BTreeMap::new();
        for im in &self.h {
            let sigma = AlgebraicSimplex::new(im.simplex.clone(), im.tuple.clone());
            let c = Chain::from_chain_terms(&im.image_chain, Some(sigma.degree() + 1))?;
            images.insert(sigma, c);
        }
        let bound = parse_q(&self.bound)?;
        let bounds = match &self.bounds {
            Some(b) => b.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>()?,
            None => vec![bound; self.degree_cap + 1],
        };
        if bounds.len() != self.degree_cap + 1 {
            return Err(Error::invalid(format!("witness `{}` needs one bound per degree", self.label)));
        }
        Ok(HomotopyWitness {
            element: Word::gen(&self.label),
            map,
            degree_cap: self.degree_cap,
            bounds,
            kind: WitnessKind::Table {
                images,
                partial: self.partial,
            },
        })
    }
}

impl ActionFile {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    /// Tabulated witnesses keyed by label, attached to the given generator maps.
    pub fn tabulated_witnesses(&self, generators: &[Generator]) -> Result<BTreeMap<String, HomotopyWitness>> {
        let mut out = BTreeMap::new();
        for w in &self.witnesses {
            let g = generators
                .iter()
                .find(|g| g.label == w.label)
                .ok_or_else(|| Error::invalid(format!("witness for unknown generator `{}`", w.label)))?;
            out.insert(w.label.clone(), w.to_witness(g.map.clone())?);
        }
        Ok(out)
    }

    pub fn table_generators(&self) -> Vec<Generator> {
        self.generators
            .iter()
            .map(|g| Generator {
                label: g.label.clone(),
                map: Automorphism::Table(TableMap {
                    vertex_map: g.vertex_map.clone(),
                    simplex_map: g.simplex_map.clone(),
                }),
            })
            .collect()
    }

    /// The lift action described by `lift_model`, if present; needs no explicit complex.
    pub fn lift_action(&self) -> Option<Result<GroupAction>> {
        let lm = self.lift_model.as_ref()?;
        Some((|| {
            let mut gens = Vec::new();
            for g in &self.generators {
                let d = lm
                    .displacements
                    .get(&g.label)
                    .ok_or_else(|| Error::invalid(format!("no displacement for `{}`", g.label)))?;
                gens.push(Generator {
                    label: g.label.clone(),
                    map: Automorphism::Lift(LiftMap::new(lm.modulus, d.clone())?),
                });
            }
            GroupAction::lift(lm.modulus, gens)
        })())
    }

    /// Builds the group action on `k`.
    pub fn to_action(&self, k: &Multicomplex) -> Result<GroupAction> {
        if let Some(a) = self.lift_action() {
            return a;
        }
        let gens = self.table_generators();
        let witnesses = self.tabulated_witnesses(&gens)?;
        match self.family.unwrap_or(Family::Finite) {
            Family::Finite => GroupAction::finite(k, gens, witnesses),
            Family::Window => GroupAction::window(k, gens, witnesses, self.word_budget.unwrap_or(4)),
            Family::Lift => Err(Error::invalid("lift family needs a lift_model")),
        }
    }
}
