//! Windowed circle model in lift coordinates.
//!
//! Vertices are the residues `v0..v{m-1}`. A simplex is a finite set of integer lifts with
//! pairwise distinct residues, taken modulo the deck translation `x ↦ x + m`; its edge from
//! lift `x` to lift `y` has winding `(y − x)/m`. The window keeps simplices whose lift
//! diameter is at most `⌊W·m⌋` and whose dimension is at most the degree cap.
//!
//! Lift maps `φ(x) = x + d_{x mod m}` commute with the deck translation and act on the model
//! by relabeling path classes.

use std::collections::BTreeSet;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::multicomplex::{face_closure, AlgebraicSimplex, Complex, Multicomplex, SimplexId, VertexId};
use crate::rational::{qi, Q};

pub fn res(x: i64, m: usize) -> usize {
    x.rem_euclid(m as i64) as usize
}

pub fn vertex_name(r: usize) -> String {
    format!("v{r}")
}

pub fn vertex_residue(v: &str, m: usize) -> Option<usize> {
    let r: usize = v.strip_prefix('v')?.parse().ok()?;
    if r < m && vertex_name(r) == v {
        Some(r)
    } else {
        None
    }
}

/// A lift of a circle self-map permuting the marked points: `φ(x) = x + disp[x mod m]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LiftMap {
    pub modulus: usize,
    pub disp: Vec<i64>,
}

impl LiftMap {
    pub fn new(modulus: usize, disp: Vec<i64>) -> Result<Self> {
        if modulus == 0 || disp.len() != modulus {
            return Err(Error::invalid("lift map needs one displacement per residue"));
        }
        let images: BTreeSet<usize> = (0..modulus)
            .map(|r| res(r as i64 + disp[r], modulus))
            .collect();
        if images.len() != modulus {
            return Err(Error::invalid(format!(
                "displacements {disp:?} do not permute residues mod {modulus}"
            )));
        }
        Ok(LiftMap { modulus, disp })
    }

    pub fn identity(modulus: usize) -> Self {
        LiftMap {
            modulus,
            disp: vec![0; modulus],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.disp.iter().all(|&d| d == 0)
    }

    pub fn apply(&self, x: i64) -> i64 {
        x + self.disp[res(x, self.modulus)]
    }

    pub fn residue_image(&self, r: usize) -> usize {
        res(r as i64 + self.disp[r], self.modulus)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LiftMap) -> LiftMap {
        let m = self.modulus;
        let disp = (0..m)
            .map(|r| inner.disp[r] + self.disp[res(r as i64 + inner.disp[r], m)])
            .collect();
        LiftMap { modulus: m, disp }
    }

    pub fn inverse(&self) -> LiftMap {
        let m = self.modulus;
        let mut disp = vec![0; m];
        for r in 0..m {
            disp[self.residue_image(r)] = -self.disp[r];
        }
        LiftMap { modulus: m, disp }
    }

    pub fn pow(&self, e: i64) -> LiftMap {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = LiftMap::identity(self.modulus);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity() && self.compose(self).is_identity()
    }

    pub fn vertex_image(&self, v: &str) -> Option<VertexId> {
        vertex_residue(v, self.modulus).map(|r| vertex_name(self.residue_image(r)))
    }
}

/// Sorts distinct lifts by residue and shifts so the smallest-residue lift lies in `[0, m)`.
/// `None` if two distinct lifts share a residue.
pub fn canonicalize(lifts: &[i64], m: usize) -> Option<Vec<i64>> {
    let mut set: Vec<i64> = lifts.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return None;
    }
    set.sort_by_key(|&x| res(x, m));
    for w in set.windows(2) {
        if res(w[0], m) == res(w[1], m) {
            return None;
        }
    }
    let shift = set[0] - res(set[0], m) as i64;
    Some(set.into_iter().map(|x| x - shift).collect())
}

/// Id of a canonical lift set.
pub fn lifts_id(canon: &[i64], m: usize) -> SimplexId {
    if canon.len() == 1 {
        vertex_name(res(canon[0], m))
    } else {
        let parts: Vec<String> = canon.iter().map(|x| x.to_string()).collect();
        format!("L[{}]", parts.join(","))
    }
}

/// Canonical lifts (residue order) encoded in a simplex id.
pub fn parse_id(id: &str, m: usize) -> Option<Vec<i64>> {
    if let Some(r) = vertex_residue(id, m) {
        return Some(vec![r as i64]);
    }
    let inner = id.strip_prefix("L[")?.strip_suffix(']')?;
    let lifts: Vec<i64> = inner
        .split(',')
        .map(|p| p.parse().ok())
        .collect::<Option<_>>()?;
    if lifts.len() < 2 {
        return None;
    }
    let canon = canonicalize(&lifts, m)?;
    if canon != lifts {
        return None;
    }
    Some(canon)
}

pub fn diameter(lifts: &[i64]) -> i64 {
    let lo = lifts.iter().min().copied().unwrap_or(0);
    let hi = lifts.iter().max().copied().unwrap_or(0);
    hi - lo
}

/// The lazily resolved window `K_W` of the circle model with `m` marked points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircleWindow {
    pub m: usize,
    pub windings: Q,
    pub diameter: i64,
    pub cap: usize,
}

impl CircleWindow {
    pub fn new(m: usize, windings: Q, cap: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::invalid("circle model needs m >= 3"));
        }
        if windings <= Q::zero() {
            return Err(Error::invalid("window must be positive"));
        }
        let diameter = (&windings * qi(m as i64))
            .floor()
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::invalid("window too large"))?;
        Ok(CircleWindow {
            m,
            windings,
            diameter,
            cap,
        })
    }

    pub fn admits(&self, canon: &[i64]) -> bool {
        canon.len() <= self.cap + 1 && diameter(canon) <= self.diameter
    }

    pub fn lifts_of(&self, id: &str) -> Option<Vec<i64>> {
        let l = parse_id(id, self.m)?;
        self.admits(&l).then_some(l)
    }

    /// All simplex ids of the window, by brute-force enumeration (small windows only).
    pub fn enumerate(&self) -> Vec<SimplexId> {
        let m = self.m as i64;
        let d = self.diameter;
        let mut out = Vec::new();
        for r0 in 0..self.m {
            out.push(vertex_name(r0));
            let mut stack: Vec<Vec<i64>> = vec![vec![r0 as i64]];
            while let Some(cur) = stack.pop() {
                if cur.len() > self.cap {
                    continue;
                }
                let last_res = res(*cur.last().unwrap(), self.m);
                for r in (last_res + 1)..self.m {
                    let lo = cur.iter().max().unwrap() - d;
                    let hi = cur.iter().min().unwrap() + d;
                    let mut x = lo + (r as i64 - lo).rem_euclid(m);
                    while x <= hi {
                        let mut next = cur.clone();
                        next.push(x);
                        if diameter(&next) <= d {
                            out.push(lifts_id(&next, self.m));
                            stack.push(next);
                        }
                        x += m;
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// The window as an explicit multicomplex.
    pub fn to_multicomplex(&self) -> Result<Multicomplex> {
        let ids = self.enumerate();
        face_closure(self, ids.iter())
    }
}

impl Complex for CircleWindow {
    fn simplex_vertices(&self, id: &str) -> Option<Vec<VertexId>> {
        let l = self.lifts_of(id)?;
        let mut v: Vec<VertexId> = l.iter().map(|&x| vertex_name(res(x, self.m))).collect();
        v.sort();
        Some(v)
    }

    fn facet(&self, id: &str, face_vertices: &[VertexId]) -> Option<SimplexId> {
        let l = self.lifts_of(id)?;
        let keep: BTreeSet<usize> = face_vertices
            .iter()
            .map(|v| vertex_residue(v, self.m))
            .collect::<Option<_>>()?;
        let sub: Vec<i64> = l.into_iter().filter(|&x| keep.contains(&res(x, self.m))).collect();
        if sub.len() != face_vertices.len() {
            return None;
        }
        let canon = canonicalize(&sub, self.m)?;
        Some(lifts_id(&canon, self.m))
    }

    fn vertex_simplex(&self, vertex: &str) -> Option<SimplexId> {
        vertex_residue(vertex, self.m).map(vertex_name)
    }

    fn contains_simplex(&self, id: &str) -> bool {
        self.lifts_of(id).is_some()
    }
}

/// Lifts of an algebraic simplex's tuple, in a common frame.
pub fn lifted_tuple(sigma: &AlgebraicSimplex, m: usize) -> Option<Vec<i64>> {
    let lifts = parse_id(&sigma.simplex, m)?;
    sigma
        .tuple
        .iter()
        .map(|v| {
            let r = vertex_residue(v, m)?;
            lifts.iter().copied().find(|&x| res(x, m) == r)
        })
        .collect()
}

/// The algebraic simplex spanned by a lifted tuple, if the window contains it.
pub fn algebraic_from_lifts(
    k: &dyn Complex,
    m: usize,
    tuple: &[i64],
) -> std::result::Result<AlgebraicSimplex, String> {
    let canon = canonicalize(tuple, m).ok_or_else(|| format!("lifts {tuple:?} collide mod {m}"))?;
    let id = lifts_id(&canon, m);
    if !k.contains_simplex(&id) {
        return Err(id);
    }
    let names = tuple.iter().map(|&x| vertex_name(res(x, m))).collect();
    Ok(AlgebraicSimplex::new(id, names))
}

fn missing(id: &str) -> String {
    id.to_string()
}

/// g·σ for a lift map.
pub fn apply_lift(
    k: &dyn Complex,
    phi: &LiftMap,
    sigma: &AlgebraicSimplex,
) -> std::result::Result<AlgebraicSimplex, String> {
    let t = lifted_tuple(sigma, phi.modulus).ok_or_else(|| missing(&sigma.simplex))?;
    let img: Vec<i64> = t.iter().map(|&x| phi.apply(x)).collect();
    algebraic_from_lifts(k, phi.modulus, &img)
}

/// Smallest `L ≥ 1` with `φ^L` fixing every residue.
pub fn residue_period(phi: &LiftMap) -> i64 {
    let m = phi.modulus;
    let mut l = 1;
    let mut p = phi.clone();
    while (0..m).any(|r| p.residue_image(r) != r) {
        p = p.compose(phi);
        l += 1;
    }
    l
}

/// Exponents `q` with `φ^q(s) = t` up to a deck shift, for lifted tuples `s`, `t`.
/// `isolated` lists single solutions; `classes` lists residues `b` mod `period` for which every
/// `q ≡ b` is a solution.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PowerMatches {
    pub isolated: Vec<i64>,
    pub classes: Vec<i64>,
}

pub fn power_matches(phi: &LiftMap, period: i64, s: &[i64], t: &[i64]) -> PowerMatches {
    let m = phi.modulus as i64;
    let step = phi.pow(period);
    let mut out = PowerMatches::default();
    if s.len() != t.len() {
        return out;
    }
    let mut y = s.to_vec();
    for b in 0..period {
        if b > 0 {
            y.iter_mut().for_each(|x| *x = phi.apply(*x));
        }
        if y.iter().zip(t).any(|(a, c)| res(*a, phi.modulus) != res(*c, phi.modulus)) {
            continue;
        }
        let delta: Vec<i64> = y.iter().zip(t).map(|(a, c)| (c - a) / m).collect();
        let e: Vec<i64> = y.iter().map(|a| step.disp[res(*a, phi.modulus)] / m).collect();
        match (0..e.len()).find(|&i| e[i] != e[0]) {
            None => {
                if delta.iter().all(|d| *d == delta[0]) {
                    out.classes.push(b);
                }
            }
            Some(i) => {
                let (num, den) = (delta[i] - delta[0], e[i] - e[0]);
                if num % den != 0 {
                    continue;
                }
                let a = num / den;
                let shift = delta[0] - a * e[0];
                if (0..e.len()).all(|j| delta[j] - a * e[j] == shift) {
                    out.isolated.push(a * period + b);
                }
            }
        }
    }
    out
}

/// Accumulates lifted algebraic simplices and projects them to a chain.
struct LiftedChain<'a> {
    k: &'a dyn Complex,
    m: usize,
    chain: Chain,
}

impl<'a> LiftedChain<'a> {
    fn new(k: &'a dyn Complex, m: usize, degree: usize) -> Self {
        LiftedChain {
            k,
            m,
            chain: Chain::zero(degree),
        }
    }

    fn add(&mut self, tuple: &[i64], coeff: i64) -> std::result::Result<(), String> {
        let s = algebraic_from_lifts(self.k, self.m, tuple)?;
        self.chain.add_term(s, qi(coeff));
        Ok(())
    }

    /// `(p,q,p) + (p,p,p)`, whose boundary is `(p,q) + (q,p)`.
    fn add_reversal(&mut self, p: i64, q: i64, coeff: i64) -> std::result::Result<(), String> {
        self.add(&[p, q, p], coeff)?;
        self.add(&[p, p, p], coeff)
    }
}

/// Standard prism h(σ) = Σᵢ (−1)ⁱ (u₀..uᵢ, φuᵢ..φuₙ), computed in lift coordinates.
pub fn prism_chain(
    k: &dyn Complex,
    phi: &LiftMap,
    sigma: &AlgebraicSimplex,
) -> std::result::Result<Chain, String> {
    let m = phi.modulus;
    let t = lifted_tuple(sigma, m).ok_or_else(|| missing(&sigma.simplex))?;
    let n = t.len() - 1;
    let mut out = LiftedChain::new(k, m, n + 1);
    for i in 0..=n {
        let mut p: Vec<i64> = t[..=i].to_vec();
        p.extend(t[i..].iter().map(|&x| phi.apply(x)));
        out.add(&p, if i % 2 == 0 { 1 } else { -1 })?;
    }
    Ok(out.chain)
}

/// Lifted edge path from `x` to `φ(x)`: direct edge, or two edges through the next residue
/// when `φ(x)` is a different lift of the same point.
fn vertex_path(phi: &LiftMap, x: i64) -> Vec<i64> {
    let m = phi.modulus;
    let y = phi.apply(x);
    if y == x {
        vec![x]
    } else if res(y, m) != res(x, m) {
        vec![x, y]
    } else {
        let lo = x.min(y);
        let r = (res(x, m) + 1) % m;
        let w = lo + (r as i64 - lo).rem_euclid(m as i64);
        vec![x, w, y]
    }
}

/// Norm bounds of the filling homotopy in degrees 0 and 1.
pub fn filling_bounds() -> Vec<Q> {
    vec![qi(2), qi(38)]
}

/// Chain homotopy from the identity to φ in degrees ≤ 1, built by filling lifted loops.
pub fn filling_chain(
    k: &dyn Complex,
    phi: &LiftMap,
    sigma: &AlgebraicSimplex,
) -> std::result::Result<Chain, String> {
    let m = phi.modulus;
    let t = lifted_tuple(sigma, m).ok_or_else(|| missing(&sigma.simplex))?;
    match t.len() {
        1 => {
            let path = vertex_path(phi, t[0]);
            let mut out = LiftedChain::new(k, m, 1);
            for w in path.windows(2) {
                out.add(&[w[0], w[1]], 1)?;
            }
            Ok(out.chain)
        }
        2 => fill_edge(k, phi, t[0], t[1]),
        _ => Err(format!("filling homotopy is limited to degree 1, got {sigma}")),
    }
}

fn fill_edge(k: &dyn Complex, phi: &LiftMap, a: i64, b: i64) -> std::result::Result<Chain, String> {
    let m = phi.modulus;
    let mut out = LiftedChain::new(k, m, 2);
    let (fa, fb) = (phi.apply(a), phi.apply(b));
    if a == b {
        if fa == a || res(fa, m) == res(a, m) {
            return Ok(out.chain);
        }
        out.add(&[a, fa, fa], 1)?;
        out.add(&[a, a, fa], -1)?;
        return Ok(out.chain);
    }
    // h(σ) = R − H where the loop L = σ + P_b − φσ − P_a equals Q − ∂R and ∂H = Q.
    let pa = vertex_path(phi, a);
    let pb = vertex_path(phi, b);
    out.add_reversal(fa, fb, 1)?;
    for w in pa.windows(2) {
        out.add_reversal(w[0], w[1], 1)?;
    }
    let mut q: Vec<i64> = vec![a];
    q.extend(pb.iter().copied());
    q.push(fa);
    q.extend(pa.iter().rev().skip(1).take(pa.len().saturating_sub(2)).copied());
    q.dedup();
    while q.len() > 1 && q.first() == q.last() {
        q.pop();
    }
    fill_loop(&mut out, q, -1)?;
    Ok(out.chain)
}

/// Adds `sign·H` with `∂H` = the closed lifted edge path through `q` (cyclic).
fn fill_loop(out: &mut LiftedChain<'_>, mut q: Vec<i64>, sign: i64) -> std::result::Result<(), String> {
    let m = out.m;
    if q.len() < 2 {
        return Ok(());
    }
    let z = q[0];
    let c = res(z, m);
    loop {
        let Some(i) = (1..q.len()).find(|&i| res(q[i], m) == c && q[i] != z) else {
            break;
        };
        let n = q.len();
        let x = q[i];
        let u = q[i - 1];
        let wi = (i + 1) % n;
        let w = q[wi];
        if u == w {
            // Backtrack u → x → u; u ≠ z since z and x share a residue.
            out.add_reversal(u, x, sign)?;
            q.drain(i..=wi);
        } else if res(u, m) != res(w, m) {
            out.add(&[u, x, w], sign)?;
            q.remove(i);
        } else {
            let used = [c, res(u, m)];
            let rho = (0..m).find(|r| !used.contains(r)).expect("m >= 3");
            let mut delta = (rho as i64 - c as i64).rem_euclid(m as i64);
            if 2 * delta > m as i64 {
                delta -= m as i64;
            }
            let y = x + delta;
            out.add(&[u, x, y], sign)?;
            out.add(&[y, x, w], sign)?;
            out.add_reversal(x, y, -sign)?;
            q[i] = y;
        }
        if q.len() < 2 {
            return Ok(());
        }
    }
    let n = q.len();
    for i in 0..n {
        let (p, r) = (q[i], q[(i + 1) % n]);
        if p == r {
            continue;
        }
        if p != z && r != z {
            out.add(&[z, p, r], sign)?;
        } else if r == z {
            out.add_reversal(z, p, sign)?;
        }
    }
    Ok(())
}

/// The standard generators: transpositions `g_k`, shifts `s_k`, based loops `l_k`.
pub fn circle_generators(m: usize) -> Vec<(String, LiftMap)> {
    let mut out = Vec::new();
    for k in 0..m {
        let mut d = vec![0; m];
        d[k] = 1;
        d[(k + 1) % m] = -1;
        out.push((format!("g{k}"), LiftMap { modulus: m, disp: d }));
    }
    for k in 0..m {
        let mut d = vec![0; m];
        d[k] = 1;
        d[(k + 1) % m] = m as i64 - 1;
        out.push((format!("s{k}"), LiftMap { modulus: m, disp: d }));
    }
    for k in 0..m {
        let mut d = vec![0; m];
        d[k] = m as i64;
        out.push((format!("l{k}"), LiftMap { modulus: m, disp: d }));
    }
    out
}

/// The element swapping the endpoints of the edge `{x, y}` along that edge, fixing the rest.
pub fn edge_swap(m: usize, x: i64, y: i64) -> LiftMap {
    let mut d = vec![0; m];
    d[res(x, m)] = y - x;
    d[res(y, m)] = x - y;
    LiftMap { modulus: m, disp: d }
}

/// Writes `phi` as a word `l^a … g g …` over the generator labels of [`circle_generators`].
/// Letters are applied right to left.
pub fn decompose(phi: &LiftMap) -> Vec<(String, i64)> {
    let m = phi.modulus;
    let gens = circle_generators(m);
    if phi.is_identity() {
        return Vec::new();
    }
    if let Some((label, _)) = gens.iter().find(|(_, g)| g == phi) {
        return vec![(label.clone(), 1)];
    }
    // Bubble-sort the residue permutation with g_0..g_{m-2}.
    let mut perm: Vec<usize> = (0..m).map(|r| phi.residue_image(r)).collect();
    let mut swaps: Vec<usize> = Vec::new();
    loop {
        let Some(k) = (0..m - 1).find(|&k| perm[k] > perm[k + 1]) else {
            break;
        };
        perm.swap(k, k + 1);
        swaps.push(k);
    }
    // rho = g_{k1} ∘ g_{k2} ∘ … realizes the permutation; then phi = loops ∘ rho.
    let mut rho = LiftMap::identity(m);
    let mut word: Vec<(String, i64)> = Vec::new();
    for &k in swaps.iter() {
        rho = rho.compose(&gens[k].1);
        word.push((format!("g{k}"), 1));
    }
    let loops = phi.compose(&rho.inverse());
    let mut prefix = Vec::new();
    for r in 0..m {
        let a = loops.disp[r] / m as i64;
        if a != 0 {
            prefix.push((format!("l{r}"), a));
        }
    }
    prefix.extend(word);
    prefix
}

/// Evaluates a word over [`circle_generators`] labels.
pub fn evaluate(m: usize, word: &[(String, i64)]) -> Option<LiftMap> {
    let gens = circle_generators(m);
    let mut acc = LiftMap::identity(m);
    for (label, e) in word {
        let g = gens.iter().find(|(l, _)| l == label)?;
        acc = acc.compose(&g.1.pow(*e));
    }
    Some(acc)
}

/// alt of the sum of the `m` short arcs, as an alternating 1-cycle.
pub fn fundamental_cycle(k: &dyn Complex, m: usize) -> Result<Chain> {
    let mut c = Chain::zero(1);
    for j in 0..m {
        let (x, y) = (j as i64, j as i64 + 1);
        let s = algebraic_from_lifts(k, m, &[x, y])
            .map_err(|id| Error::invalid(format!("short arc `{id}` missing from window")))?;
        c.add_term(s, qi(1));
    }
    Ok(crate::chains::alt(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{boundary, is_alternating};
    use crate::multicomplex::validate;

    fn window(m: usize, w: i64) -> CircleWindow {
        CircleWindow::new(m, qi(w), 2).unwrap()
    }

    #[test]
    fn power_matches_agree_with_iteration() {
        let m = 3;
        let tuples: Vec<Vec<i64>> = vec![vec![0], vec![1], vec![0, 1], vec![1, 0], vec![0, 4], vec![2, 6], vec![0, 1, 2], vec![2, 4, 6], vec![1, 3]];
        for (_, phi) in circle_generators(m) {
            let period = residue_period(&phi);
            for s in &tuples {
                for t in &tuples {
                    let pm = power_matches(&phi, period, s, t);
                    let mut y = s.clone();
                    for q in 1..=60i64 {
                        y.iter_mut().for_each(|x| *x = phi.apply(*x));
                        let diffs: Vec<i64> = y.iter().zip(t.iter()).map(|(a, b)| b - a).collect();
                        let hit = s.len() == t.len() && diffs.iter().all(|d| *d == diffs[0] && d % m as i64 == 0);
                        let predicted = pm.isolated.contains(&q) || pm.classes.contains(&q.rem_euclid(period));
                        assert_eq!(hit, predicted, "{phi:?} {s:?} -> {t:?} at q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn codec_round_trip() {
        let m = 3;
        let c = canonicalize(&[4, 3], m).unwrap();
        assert_eq!(c, vec![0, 1]);
        assert_eq!(canonicalize(&[3, 4], m).unwrap(), vec![0, 1]);
        let c = canonicalize(&[5, 3], m).unwrap();
        assert_eq!(c, vec![0, 2]);
        assert_eq!(lifts_id(&c, m), "L[0,2]");
        assert_eq!(parse_id("L[0,2]", m), Some(vec![0, 2]));
        assert_eq!(parse_id("L[3,2]", m), None);
        assert_eq!(canonicalize(&[0, 3], m), None);
        assert_eq!(lifts_id(&[1], m), "v1");
    }

    #[test]
    fn lift_map_algebra() {
        let m = 3;
        let gens = circle_generators(m);
        let g0 = &gens[0].1;
        let s0 = &gens[3].1;
        let l0 = &gens[6].1;
        assert!(g0.is_involution());
        assert_eq!(l0.compose(g0), *s0);
        assert!(s0.compose(&s0.inverse()).is_identity());
        assert_eq!(s0.pow(5), s0.compose(&s0.pow(4)));
        assert_eq!(s0.pow(-3), s0.pow(3).inverse());
        assert_eq!(s0.pow(2), LiftMap { modulus: 3, disp: vec![3, 3, 0] });
    }

    #[test]
    fn decompose_round_trips() {
        let m = 4;
        for disp in [vec![1, -1, 0, 0], vec![5, 2, -3, 4], vec![2, 2, 2, -6], vec![0, 0, 0, 0]] {
            let Ok(phi) = LiftMap::new(m, disp) else { continue };
            let w = decompose(&phi);
            assert_eq!(evaluate(m, &w).unwrap(), phi);
        }
        let swap = edge_swap(3, 0, 5);
        assert_eq!(evaluate(3, &decompose(&swap)).unwrap(), swap);
    }

    #[test]
    fn window_is_a_valid_multicomplex() {
        let w = window(3, 1);
        let k = w.to_multicomplex().unwrap();
        assert_eq!(validate(&k), Ok(()));
        assert_eq!(k.simplices_of_dim(0).len(), 3);
        assert!(k.simplex_count() > 3);
        let z = fundamental_cycle(&w, 3).unwrap();
        assert!(is_alternating(&z));
        assert!(boundary(&w, &z).unwrap().is_zero());
        assert_eq!(z.l1_norm(), qi(3));
    }

    #[test]
    fn prism_identity_on_short_edges() {
        let w = window(3, 3);
        let g0 = circle_generators(3)[0].1.clone();
        let e = algebraic_from_lifts(&w, 3, &[0, 1]).unwrap();
        let h = prism_chain(&w, &g0, &e).unwrap();
        let h0 = |x: i64| {
            let v = algebraic_from_lifts(&w, 3, &[x]).unwrap();
            prism_chain(&w, &g0, &v).unwrap()
        };
        let lhs = boundary(&w, &h).unwrap().add(&h0(1)).sub(&h0(0));
        let ge = apply_lift(&w, &g0, &e).unwrap();
        let rhs = Chain::single(ge, qi(1)).sub(&Chain::single(e, qi(1)));
        assert_eq!(lhs, rhs);
        assert!(h.l1_norm() <= qi(2));
    }

    #[test]
    fn prism_fails_on_long_edges() {
        let w = window(3, 8);
        let g0 = circle_generators(3)[0].1.clone();
        let e = algebraic_from_lifts(&w, 3, &[0, 4]).unwrap();
        assert!(prism_chain(&w, &g0, &e).is_err());
    }

    fn check_filling(w: &CircleWindow, phi: &LiftMap, lifts: &[i64]) {
        let m = w.m;
        let s = algebraic_from_lifts(w, m, lifts).unwrap();
        let h = filling_chain(w, phi, &s).unwrap();
        let mut lhs = if h.is_zero() { Chain::zero(s.degree()) } else { boundary(w, &h).unwrap() };
        if s.degree() == 1 {
            let bd = boundary(w, &Chain::single(s.clone(), qi(1))).unwrap();
            let hb = bd
                .map_linear(1, |f| filling_chain(w, phi, f).map_err(Error::invalid))
                .unwrap();
            lhs = lhs.add(&hb);
        }
        let gs = apply_lift(w, phi, &s).unwrap();
        let rhs = Chain::single(gs, qi(1)).sub(&Chain::single(s.clone(), qi(1)));
        assert_eq!(lhs, rhs, "filling identity for {phi:?} on {s}");
        let b = filling_bounds();
        assert!(h.l1_norm() <= b[s.degree()], "bound for {phi:?} on {s}: {}", h.l1_norm());
    }

    #[test]
    fn filling_identity_exhaustive_small() {
        let w = window(3, 40);
        let gens = circle_generators(3);
        let mut elems: Vec<LiftMap> = gens.iter().map(|g| g.1.clone()).collect();
        elems.push(gens[3].1.pow(7));
        elems.push(gens[3].1.pow(8));
        elems.push(gens[4].1.pow(-5).compose(&gens[2].1));
        elems.push(LiftMap::new(3, vec![10, -4, 0]).unwrap());
        for phi in &elems {
            for lifts in [
                vec![0],
                vec![1],
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 4],
                vec![5, 0],
                vec![0, 2],
                vec![2, -3],
                vec![1, 11],
                vec![0, -13],
            ] {
                check_filling(&w, phi, &lifts);
            }
        }
    }

    #[test]
    fn filling_identity_m4() {
        let w = window(4, 40);
        let gens = circle_generators(4);
        for (_, phi) in &gens {
            for lifts in [vec![0, 1], vec![0, 6], vec![3, -2], vec![1, 2], vec![2, 2]] {
                check_filling(&w, phi, &lifts);
            }
        }
        check_filling(&w, &gens[5].1.pow(9), &[0, 7]);
    }
}
