//! Finite-group instances: `k` sheets glued along the boundary of a d-simplex, coned off, with
//! the symmetric group of the base vertices acting (ℤ/2 for d = 1, S₃ for d = 2).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{
    verify_witness, ActionFile, Automorphism, Family, GeneratorEntry, Generator, GroupAction,
    HomotopyWitness, TableMap, WitnessEntry, WitnessKind, Word,
};
use crate::chains::{alt, boundary_of, is_alternating, is_cycle, Chain};
use crate::error::{Error, Result};
use crate::homology_lp::Basis;
use crate::lp::Echelon;
use crate::multicomplex::{facet_key, validate, AlgebraicSimplex, Multicomplex, MulticomplexBuilder};
use crate::rational::{qi, Q};

#[derive(Clone, Debug)]
pub struct SyntheticInstance {
    pub name: String,
    pub complex: Multicomplex,
    pub action: GroupAction,
    pub action_file: ActionFile,
    pub cycle: Chain,
}

const APEX: &str = "w";

fn base_vertex(i: usize) -> String {
    format!("x{i}")
}

/// All nonempty proper subsets of `0..=d`, by size.
fn proper_faces(d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << (d + 1)) - 1)
        .map(|mask| (0..=d).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort_by_key(|f: &Vec<usize>| (f.len(), f.clone()));
    out
}

fn names(f: &[usize]) -> Vec<String> {
    f.iter().map(|&i| base_vertex(i)).collect()
}

fn sheet_id(i: usize) -> String {
    format!("S{i}")
}

fn cone_id(i: usize) -> String {
    format!("C{i}")
}

/// The coned multi-sheet complex.
pub fn sheets_complex(d: usize, sheets: usize) -> Result<Multicomplex> {
    let mut b = MulticomplexBuilder::new();
    for i in 0..=d {
        b.vertex(&base_vertex(i));
    }
    b.vertex(APEX);
    for f in proper_faces(d) {
        let v = names(&f);
        if v.len() > 1 {
            b.simplex_auto(&facet_key(&v), &v)?;
        }
    }
    for f in proper_faces(d) {
        let mut v = names(&f);
        v.push(APEX.to_string());
        b.simplex_auto(&facet_key(&v), &v)?;
    }
    let all: Vec<String> = names(&(0..=d).collect::<Vec<_>>());
    for s in 0..sheets {
        let facets: Vec<(Vec<String>, String)> = (0..=d)
            .map(|j| {
                let mut f = all.clone();
                f.remove(j);
                let id = if f.len() == 1 { f[0].clone() } else { facet_key(&f) };
                (f, id)
            })
            .collect();
        add_explicit(&mut b, &sheet_id(s), &all, &facets);
        let mut cone_verts = all.clone();
        cone_verts.push(APEX.to_string());
        let mut cfacets = vec![(all.clone(), sheet_id(s))];
        for j in 0..=d {
            let mut f = all.clone();
            f.remove(j);
            f.push(APEX.to_string());
            cfacets.push((f.clone(), facet_key(&f)));
        }
        add_explicit(&mut b, &cone_id(s), &cone_verts, &cfacets);
    }
    let k = b.build()?;
    validate(&k).map_err(|v| Error::invalid(v.to_string()))?;
    Ok(k)
}

fn add_explicit(b: &mut MulticomplexBuilder, id: &str, verts: &[String], facets: &[(Vec<String>, String)]) {
    let keys: Vec<Vec<&str>> = facets.iter().map(|(f, _)| f.iter().map(|s| s.as_str()).collect()).collect();
    let faces: Vec<(&[&str], &str)> = keys
        .iter()
        .zip(facets)
        .map(|(k, (_, id))| (k.as_slice(), id.as_str()))
        .collect();
    b.simplex(id, verts, &faces);
}

/// The transposition of base vertices `j` and `j+1` as a table.
fn transposition(k: &Multicomplex, j: usize) -> TableMap {
    let swap = |v: &str| -> String {
        if v == base_vertex(j) {
            base_vertex(j + 1)
        } else if v == base_vertex(j + 1) {
            base_vertex(j)
        } else {
            v.to_string()
        }
    };
    let vertex_map = k.vertices().map(|v| (v.clone(), swap(v))).collect();
    let simplex_map = k
        .simplices()
        .map(|r| {
            let img = if r.id.starts_with('S') || r.id.starts_with('C') {
                r.id.clone()
            } else {
                let v: Vec<String> = r.vertices.iter().map(|x| swap(x)).collect();
                if v.len() == 1 {
                    v[0].clone()
                } else {
                    facet_key(&v)
                }
            };
            (r.id.clone(), img)
        })
        .collect();
    TableMap { vertex_map, simplex_map }
}

/// Cyclic shift of the sheets and their cones, fixing the shared boundary.
fn sheet_shift(k: &Multicomplex, sheets: usize) -> TableMap {
    let vertex_map = k.vertices().map(|v| (v.clone(), v.clone())).collect();
    let shift = |id: &str| -> String {
        for (prefix, make) in [("S", sheet_id as fn(usize) -> String), ("C", cone_id)] {
            if let Some(i) = id.strip_prefix(prefix).and_then(|x| x.parse::<usize>().ok()) {
                return make((i + 1) % sheets);
            }
        }
        id.to_string()
    };
    let simplex_map = k.simplices().map(|r| (r.id.clone(), shift(&r.id))).collect();
    TableMap { vertex_map, simplex_map }
}

/// Solves ∂h + h∂ = g − id degree by degree on Θ(0..=cap).
pub fn solve_witness(k: &Multicomplex, label: &str, map: &Automorphism, cap: usize) -> Result<HomotopyWitness> {
    let mut images: BTreeMap<AlgebraicSimplex, Chain> = BTreeMap::new();
    let mut bounds = Vec::new();
    for n in 0..=cap {
        let theta = Basis::of(k, n);
        let upper = Basis::of(k, n + 1);
        let mut ech = Echelon::new();
        for s in &upper.elements {
            ech.insert(&theta.vector(&boundary_of(k, s)?)?);
        }
        let mut bound = Q::from_integer(0.into());
        for s in &theta.elements {
            let gs = map.apply_simplex(k, s, &label)?;
            let mut rhs = Chain::single(gs, qi(1)).sub(&Chain::single(s.clone(), qi(1)));
            if n > 0 {
                let hb = boundary_of(k, s)?.map_linear(n, |f| Ok(images.get(f).cloned().unwrap_or_else(|| Chain::zero(n))))?;
                rhs = rhs.sub(&hb);
            }
            let comb = ech
                .solve(&theta.vector(&rhs)?)
                .ok_or_else(|| Error::Witness(format!("no homotopy image for {s}")))?;
            let h = upper.chain(n + 1, &comb);
            if h.l1_norm() > bound {
                bound = h.l1_norm();
            }
            if !h.is_zero() {
                images.insert(s.clone(), h);
            }
        }
        bounds.push(bound);
    }
    Ok(HomotopyWitness {
        element: Word::gen(label),
        map: map.clone(),
        degree_cap: cap,
        bounds,
        kind: WitnessKind::Table { images, partial: false },
    })
}

/// Deterministic instance: even seeds give ℤ/2 on coned multi-edges, odd seeds S₃ on coned
/// multi-triangles; `sheets ≥ 2` copies of the top simplex carry random coefficients summing to 0.
pub fn gen_synthetic(seed: u64, sheets: usize) -> Result<SyntheticInstance> {
    let sheets = sheets.max(2);
    let d = if seed % 2 == 0 { 1 } else { 2 };
    let k = sheets_complex(d, sheets)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<i64> = (0..sheets - 1).map(|_| {
        let x: i64 = rng.gen_range(1..=5);
        if rng.gen_bool(0.5) { x } else { -x }
    }).collect();
    let s: i64 = coeffs.iter().sum();
    if s == 0 {
        coeffs[0] += 1;
    }
    coeffs.push(-coeffs.iter().sum::<i64>());
    let top: Vec<String> = names(&(0..=d).collect::<Vec<_>>());
    let cycle = alt(&Chain::from_terms(
        d,
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (AlgebraicSimplex::new(sheet_id(i), top.clone()), qi(*c))),
    ));
    let mut gens = Vec::new();
    let mut entries = Vec::new();
    let mut witnesses = BTreeMap::new();
    for j in 0..d {
        let label = format!("t{j}");
        let t = transposition(&k, j);
        let map = Automorphism::Table(t.clone());
        let w = solve_witness(&k, &label, &map, d)?;
        let rep = verify_witness(&k, &w);
        if let Some(f) = rep.failure {
            return Err(Error::Witness(format!("synthetic witness fails at {}: {}", f.sigma, f.reason)));
        }
        entries.push(WitnessEntry::from_witness(&label, &k, &w)?);
        witnesses.insert(label.clone(), w);
        gens.push(Generator { label: label.clone(), map });
    }
    let action_file = ActionFile {
        family: Some(Family::Finite),
        generators: gens
            .iter()
            .map(|g| match &g.map {
                Automorphism::Table(t) => GeneratorEntry {
                    label: g.label.clone(),
                    vertex_map: t.vertex_map.clone(),
                    simplex_map: t.simplex_map.clone(),
                },
                Automorphism::Lift(_) => unreachable!("tables only"),
            })
            .collect(),
        witnesses: entries,
        lift_model: None,
        word_budget: None,
    };
    let action = GroupAction::finite(&k, gens, witnesses)?;
    if !is_alternating(&cycle) || !is_cycle(&k, &cycle)? {
        return Err(Error::invalid("synthetic chain is not an alternating cycle"));
    }
    Ok(SyntheticInstance {
        name: format!("{}-seed{seed}-sheets{sheets}", if d == 1 { "z2" } else { "s3" }),
        complex: k,
        action,
        action_file,
        cycle,
    })
}

/// Instance whose cycle lies in a single orbit: the symmetric group of the base vertices times
/// the cyclic group of the sheets, acting on `sheets ≥ 2` coned sheets over ∂Δ^d.
pub fn gen_transitive(d: usize, sheets: usize) -> Result<SyntheticInstance> {
    if !(1..=2).contains(&d) || sheets < 2 {
        return Err(Error::invalid("transitive instances need d in {1, 2} and at least 2 sheets"));
    }
    let k = sheets_complex(d, sheets)?;
    let mut tables: Vec<(String, TableMap)> = (0..d).map(|j| (format!("t{j}"), transposition(&k, j))).collect();
    tables.push(("r".to_string(), sheet_shift(&k, sheets)));
    let mut gens = Vec::new();
    let mut entries = Vec::new();
    let mut witnesses = BTreeMap::new();
    for (label, t) in tables {
        let map = Automorphism::Table(t);
        let w = solve_witness(&k, &label, &map, d)?;
        if let Some(f) = verify_witness(&k, &w).failure {
            return Err(Error::Witness(format!("witness for {label} fails at {}: {}", f.sigma, f.reason)));
        }
        entries.push(WitnessEntry::from_witness(&label, &k, &w)?);
        witnesses.insert(label.clone(), w);
        gens.push(Generator { label, map });
    }
    let top: Vec<String> = names(&(0..=d).collect::<Vec<_>>());
    let cycle = alt(&Chain::from_terms(
        d,
        [(AlgebraicSimplex::new(sheet_id(0), top.clone()), qi(1)), (AlgebraicSimplex::new(sheet_id(1), top), qi(-1))],
    ));
    let action_file = ActionFile {
        family: Some(Family::Finite),
        generators: gens
            .iter()
            .map(|g| match &g.map {
                Automorphism::Table(t) => GeneratorEntry {
                    label: g.label.clone(),
                    vertex_map: t.vertex_map.clone(),
                    simplex_map: t.simplex_map.clone(),
                },
                Automorphism::Lift(_) => unreachable!("tables only"),
            })
            .collect(),
        witnesses: entries,
        lift_model: None,
        word_budget: None,
    };
    let action = GroupAction::finite(&k, gens, witnesses)?;
    if !is_cycle(&k, &cycle)? {
        return Err(Error::invalid("transitive chain is not a cycle"));
    }
    Ok(SyntheticInstance {
        name: format!("transitive-d{d}-sheets{sheets}"),
        complex: k,
        action,
        action_file,
        cycle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::{certify, verify_certificate};

    #[test]
    fn instances_pass_invariants_and_annihilate() {
        for seed in 0..2 {
            let inst = gen_synthetic(seed, 3).unwrap();
            assert!(validate(&inst.complex).is_ok());
            assert_eq!(inst.action.closure().unwrap().len(), if seed == 0 { 2 } else { 6 });
            let av = inst.action_file.to_json_value();
            let reloaded = ActionFile::from_json_str(&av.to_string()).unwrap().to_action(&inst.complex).unwrap();
            for w in reloaded.witnesses.values() {
                assert!(verify_witness(&inst.complex, w).is_ok());
            }
            let mut cert = certify(&inst.complex, &inst.action, &inst.cycle, 1).unwrap();
            assert!(cert.residual.is_zero());
            cert.seal(&inst.complex, &av, false);
            assert!(verify_certificate(&cert, &inst.complex, Some((&av, &reloaded))).is_ok());
        }
        for d in 1..=2 {
            let inst = gen_transitive(d, 3).unwrap();
            let support: Vec<_> = inst.cycle.terms().map(|(s, _)| s.clone()).collect();
            assert_eq!(inst.action.orbits(&inst.complex, &support).unwrap().len(), 1);
            let cert = certify(&inst.complex, &inst.action, &inst.cycle, 1).unwrap();
            assert!(cert.residual.is_zero());
        }
        let a = gen_synthetic(4, 3).unwrap();
        let b = gen_synthetic(4, 3).unwrap();
        assert_eq!(a.cycle, b.cycle);
        assert_eq!(a.action_file.to_json_value(), b.action_file.to_json_value());
    }
}
