//! Sparse exact-rational chains over algebraic simplices.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multicomplex::{check_algebraic, face, AlgebraicSimplex, Complex, SimplexId};
use crate::rational::{fmt_q, parse_q, qi, Q};

/// A finite linear combination of algebraic n-simplices. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<AlgebraicSimplex, Q>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(sigma: AlgebraicSimplex, coeff: Q) -> Self {
        let mut c = Chain::zero(sigma.degree());
        c.add_term(sigma, coeff);
        c
    }

    /// Sums the given terms (repeated keys accumulate).
    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (AlgebraicSimplex, Q)>) -> Self {
        let mut c = Chain::zero(degree);
        for (s, q) in terms {
            c.add_term(s, q);
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Re-labels the degree of an empty chain (used when loading empty term lists).
    pub fn with_degree(mut self, degree: usize) -> Result<Self> {
        if !self.terms.is_empty() && self.degree != degree {
            return Err(Error::invalid(format!(
                "chain has degree {} but {} was expected",
                self.degree, degree
            )));
        }
        self.degree = degree;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AlgebraicSimplex, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, sigma: &AlgebraicSimplex) -> Q {
        self.terms.get(sigma).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, sigma: AlgebraicSimplex, coeff: Q) {
        assert_eq!(
            sigma.tuple.len(),
            self.degree + 1,
            "term {sigma} does not have degree {}",
            self.degree
        );
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(sigma) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Chain, factor: &Q) {
        if factor.is_zero() {
            return;
        }
        self.check_same_degree(other);
        for (s, q) in &other.terms {
            self.add_term(s.clone(), q * factor);
        }
    }

    pub fn add(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        out.add_scaled(other, &qi(1));
        out
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        let mut out = self.clone();
        out.add_scaled(other, &qi(-1));
        out
    }

    pub fn scale(&self, factor: &Q) -> Chain {
        let mut out = Chain::zero(self.degree);
        out.add_scaled(self, factor);
        out
    }

    pub fn neg(&self) -> Chain {
        self.scale(&qi(-1))
    }

    fn check_same_degree(&self, other: &Chain) {
        if !other.terms.is_empty() && !self.terms.is_empty() {
            assert_eq!(self.degree, other.degree, "adding chains of different degree");
        }
    }

    /// Σ |a_σ|.
    pub fn l1_norm(&self) -> Q {
        self.terms.values().map(|q| q.abs()).sum()
    }

    /// Σ a_σ.
    pub fn coefficient_sum(&self) -> Q {
        self.terms.values().cloned().sum()
    }

    /// Underlying simplex ids of the support.
    pub fn support_simplices(&self) -> BTreeSet<SimplexId> {
        self.terms.keys().map(|s| s.simplex.clone()).collect()
    }

    /// Linear extension of a basis map of the same degree.
    pub fn map_basis(
        &self,
        mut f: impl FnMut(&AlgebraicSimplex) -> Result<AlgebraicSimplex>,
    ) -> Result<Chain> {
        let mut out = Chain::zero(self.degree);
        for (s, q) in &self.terms {
            out.add_term(f(s)?, q.clone());
        }
        Ok(out)
    }

    /// Linear extension of a map from basis elements to chains of degree `degree`.
    pub fn map_linear(
        &self,
        degree: usize,
        mut f: impl FnMut(&AlgebraicSimplex) -> Result<Chain>,
    ) -> Result<Chain> {
        let mut out = Chain::zero(degree);
        for (s, q) in &self.terms {
            let img = f(s)?;
            out.add_scaled(&img, q);
        }
        Ok(out)
    }

    /// Checks every key is a valid algebraic simplex of `k`.
    pub fn check_on(&self, k: &dyn Complex) -> Result<()> {
        for s in self.terms.keys() {
            check_algebraic(k, s)?;
        }
        Ok(())
    }

    pub fn to_terms(&self) -> Vec<ChainTerm> {
        self.terms
            .iter()
            .map(|(s, q)| ChainTerm {
                simplex: s.simplex.clone(),
                tuple: s.tuple.clone(),
                coeff: fmt_q(q),
            })
            .collect()
    }

    /// Builds from file terms; the degree is read off the tuples (or `degree` for an empty list).
    pub fn from_chain_terms(terms: &[ChainTerm], degree: Option<usize>) -> Result<Chain> {
        let d = match (terms.first(), degree) {
            (Some(t), _) if t.tuple.is_empty() => {
                return Err(Error::invalid("chain term with empty tuple"))
            }
            (Some(t), _) => t.tuple.len() - 1,
            (None, Some(d)) => d,
            (None, None) => 0,
        };
        if let Some(want) = degree {
            if want != d {
                return Err(Error::invalid(format!(
                    "chain has degree {d} but {want} was expected"
                )));
            }
        }
        let mut c = Chain::zero(d);
        for t in terms {
            if t.tuple.len() != d + 1 {
                return Err(Error::invalid("chain terms of mixed degree"));
            }
            let q = parse_q(&t.coeff)?;
            c.add_term(AlgebraicSimplex::new(t.simplex.clone(), t.tuple.clone()), q);
        }
        Ok(c)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_terms()).expect("plain data serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Chain> {
        let terms: Vec<ChainTerm> = serde_json::from_str(s)?;
        Chain::from_chain_terms(&terms, None)
    }
}

/// One serialized chain term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTerm {
    pub simplex: SimplexId,
    pub tuple: Vec<String>,
    pub coeff: String,
}

impl Serialize for Chain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<ChainTerm>::deserialize(d)?;
        Chain::from_chain_terms(&terms, None).map_err(serde::de::Error::custom)
    }
}

/// ∂ = Σ (−1)^i ∂^i.
pub fn boundary(k: &dyn Complex, c: &Chain) -> Result<Chain> {
    if c.degree() == 0 {
        return Err(Error::DegreeZero);
    }
    let mut out = Chain::zero(c.degree() - 1);
    for (s, q) in c.terms() {
        for i in 0..s.tuple.len() {
            let f = face(k, s, i)?;
            let coeff = if i % 2 == 0 { q.clone() } else { -q.clone() };
            out.add_term(f, coeff);
        }
    }
    Ok(out)
}

/// Boundary of one basis element.
pub fn boundary_of(k: &dyn Complex, sigma: &AlgebraicSimplex) -> Result<Chain> {
    boundary(k, &Chain::single(sigma.clone(), qi(1)))
}

pub fn is_cycle(k: &dyn Complex, c: &Chain) -> Result<bool> {
    Ok(boundary(k, c)?.is_zero())
}

/// All permutations of `0..n` paired with their sign.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut p, &mut out);
    out.sort();
    out.into_iter().map(|p| {
        let s = permutation_sign(&p);
        (p, s)
    }).collect()
}

fn heap_permute(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, p, out);
        if k % 2 == 0 {
            p.swap(i, k - 1);
        } else {
            p.swap(0, k - 1);
        }
    }
}

pub fn permutation_sign(p: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// alt(Δ,(v₀..vⱼ)) = (1/(j+1)!) Σ_τ ε(τ)(Δ,(v_τ(0)..v_τ(j))), extended linearly.
pub fn alt(c: &Chain) -> Chain {
    let n = c.degree() + 1;
    let perms = signed_permutations(n);
    let norm = Q::new(1.into(), factorial(n).into());
    let mut out = Chain::zero(c.degree());
    for (s, q) in c.terms() {
        if s.has_repeats() {
            continue;
        }
        let base = q * &norm;
        for (p, sign) in &perms {
            let tuple = p.iter().map(|&i| s.tuple[i].clone()).collect();
            let coeff = if *sign > 0 { base.clone() } else { -base.clone() };
            out.add_term(AlgebraicSimplex::new(s.simplex.clone(), tuple), coeff);
        }
    }
    out
}

/// True iff a_{τσ} = ε(τ)·a_σ for all σ and all permutations τ.
pub fn is_alternating(c: &Chain) -> bool {
    let perms = signed_permutations(c.degree() + 1);
    for (s, q) in c.terms() {
        if s.has_repeats() {
            return false;
        }
        for (p, sign) in &perms {
            let tuple: Vec<String> = p.iter().map(|&i| s.tuple[i].clone()).collect();
            let other = c.coeff(&AlgebraicSimplex::new(s.simplex.clone(), tuple));
            let want = if *sign > 0 { q.clone() } else { -q.clone() };
            if other != want {
                return false;
            }
        }
    }
    true
}
