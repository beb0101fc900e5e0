//! Finitely supported probability measures on the acting group, diffusion of chains,
//! convolution, and measure synthesis for the near-cancellation bound.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use std::collections::BTreeMap;

use crate::action::{apply, Automorphism, Family, GroupAction, Word};
use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::models::circle;
use crate::multicomplex::Complex;
use crate::rational::{abs, fmt_q, serde_q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub element: Word,
    #[serde(with = "serde_q")]
    pub weight: Q,
}

/// A probability measure with finite support, stored as weighted words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Measure {
    entries: Vec<MeasureEntry>,
}

impl Measure {
    pub fn delta(element: Word) -> Self {
        Measure {
            entries: vec![MeasureEntry {
                element,
                weight: Q::one(),
            }],
        }
    }

    pub fn delta_e() -> Self {
        Measure::delta(Word::identity())
    }

    /// Uniform measure on distinct words.
    pub fn uniform(words: Vec<Word>) -> Result<Self> {
        let n = words.len() as i64;
        Measure::from_entries(
            words
                .into_iter()
                .map(|element| MeasureEntry {
                    element,
                    weight: Q::new(1.into(), n.into()),
                })
                .collect(),
        )
    }

    pub fn from_entries(entries: Vec<MeasureEntry>) -> Result<Self> {
        let m = Measure { entries };
        m.validate()?;
        Ok(m)
    }

    pub fn entries(&self) -> &[MeasureEntry] {
        &self.entries
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Weights positive and summing to 1, elements distinct.
    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::invalid("measure has empty support"));
        }
        let mut total = Q::zero();
        for (i, e) in self.entries.iter().enumerate() {
            if !e.weight.is_positive() {
                return Err(Error::invalid(format!(
                    "non-positive weight {} at `{}`",
                    fmt_q(&e.weight),
                    e.element
                )));
            }
            if self.entries[..i].iter().any(|f| f.element == e.element) {
                return Err(Error::invalid(format!("repeated element `{}`", e.element)));
            }
            total += &e.weight;
        }
        if !total.is_one() {
            return Err(Error::invalid(format!("weights sum to {}", fmt_q(&total))));
        }
        Ok(())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let m: Measure = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }
}

/// Evaluates the support words of `mu` in `g`.
pub fn resolve(g: &GroupAction, mu: &Measure) -> Result<Vec<(Word, Automorphism, Q)>> {
    mu.entries
        .iter()
        .map(|e| {
            let map = g.element(&e.element).map_err(|_| {
                Error::ComplexMismatch(format!("`{}` is not a word in the action's generators", e.element))
            })?;
            Ok((e.element.clone(), map, e.weight.clone()))
        })
        .collect()
}

fn diffuse_resolved(k: &dyn Complex, elems: &[(Word, Automorphism, Q)], c: &Chain) -> Result<Chain> {
    let mut out = Chain::zero(c.degree());
    for (w, g, weight) in elems {
        out.add_scaled(&apply(k, g, w, c)?, weight);
    }
    Ok(out)
}

/// μ∗c = Σ_γ μ(γ)·(γ·c).
pub fn diffuse(k: &dyn Complex, g: &GroupAction, mu: &Measure, c: &Chain) -> Result<Chain> {
    diffuse_resolved(k, &resolve(g, mu)?, c)
}

/// Representative word for an element: its closure word for finite groups.
fn representative(g: &GroupAction, w: Word, map: &Automorphism) -> Word {
    if let Some(cl) = g.closure() {
        if let Some((rep, _)) = cl.iter().find(|(_, e)| e == map) {
            return rep.clone();
        }
    }
    w
}

/// (μ₁⋆μ₂)(x) = Σ μ₁(h)μ₂(k) over hk = x, so that diffusing by it is diffusing by μ₂ then μ₁.
pub fn convolve(g: &GroupAction, mu1: &Measure, mu2: &Measure) -> Result<Measure> {
    let a = resolve(g, mu1)?;
    let b = resolve(g, mu2)?;
    let mut out: Vec<(Word, Automorphism, Q)> = Vec::new();
    for (wh, h, ph) in &a {
        for (wk, k, pk) in &b {
            let map = h.compose(k)?;
            let weight = ph * pk;
            match out.iter_mut().find(|(_, e, _)| *e == map) {
                Some(slot) => slot.2 += weight,
                None => {
                    let word = representative(g, wh.times(wk), &map);
                    out.push((word, map, weight));
                }
            }
        }
    }
    Measure::from_entries(
        out.into_iter()
            .map(|(element, _, weight)| MeasureEntry { element, weight })
            .collect(),
    )
}

/// A synthesized measure together with its factors.
#[derive(Clone, Debug)]
pub struct Synthesis {
    /// Factors in application order.
    pub factors: Vec<Measure>,
    /// Their convolution.
    pub measure: Measure,
    /// μ∗f.
    pub result: Chain,
}

/// Largest Følner box length tried.
pub const MAX_BOX: usize = 16;
/// Largest box step tried for lift actions.
pub const MAX_STEP_LIFT: i64 = 4096;
/// Largest box step tried for table actions.
pub const MAX_STEP_TABLE: i64 = 64;

/// Overlap masses `M(q) = Σ min(|f(σ)|, |f(τ)|)` over support pairs of opposite sign with
/// `γ^q σ = τ`, `q ≥ 1`.
/// Since `‖Σ_j γ^{jp} f‖ ≥ (N+1)‖f‖ − 2 Σ_{d=1}^{N} (N+1−d) M(dp)`, boxes whose bound already
/// exceeds the target are skipped without diffusing.
struct OverlapProfile {
    norm: Q,
    period: i64,
    isolated: BTreeMap<i64, Q>,
    classes: Vec<Q>,
}

impl OverlapProfile {
    fn build(gamma: &Automorphism, f: &Chain) -> Option<Self> {
        let Automorphism::Lift(phi) = gamma else {
            return None;
        };
        let m = phi.modulus;
        let support: Vec<(Vec<i64>, Q)> = f
            .terms()
            .map(|(s, a)| Some((circle::lifted_tuple(s, m)?, a.clone())))
            .collect::<Option<_>>()?;
        let period = circle::residue_period(phi);
        let mut isolated: BTreeMap<i64, Q> = BTreeMap::new();
        let mut classes = vec![Q::zero(); period as usize];
        for (s, a) in &support {
            for (t, b) in &support {
                if a.is_positive() == b.is_positive() {
                    continue;
                }
                let pm = circle::power_matches(phi, period, s, t);
                let w = if abs(a) < abs(b) { abs(a) } else { abs(b) };
                for q in pm.isolated.into_iter().filter(|q| *q >= 1) {
                    *isolated.entry(q).or_insert_with(Q::zero) += &w;
                }
                for c in pm.classes {
                    classes[c as usize] += &w;
                }
            }
        }
        Some(OverlapProfile {
            norm: f.l1_norm(),
            period,
            isolated,
            classes,
        })
    }

    fn mass(&self, q: i64) -> Q {
        let c = &self.classes[q.rem_euclid(self.period) as usize];
        match self.isolated.get(&q) {
            Some(x) => x + c,
            None => c.clone(),
        }
    }

    fn may_meet(&self, n: usize, p: i64, target: &Q) -> bool {
        let mut cancel = Q::zero();
        for d in 1..=n {
            let mq = self.mass(d as i64 * p);
            if !mq.is_zero() {
                cancel += mq * Q::from_integer(((n + 1 - d) as i64).into());
            }
        }
        let size = Q::from_integer(((n + 1) as i64).into());
        &self.norm * &size - cancel * Q::from_integer(2.into()) <= target * size
    }
}

fn meets(r: &Chain, target: &Q) -> bool {
    r.l1_norm() <= *target
}

/// Finds μ with ‖μ∗f‖₁ ≤ |Σf| + η, verified by evaluation. Returns the factors as well.
pub fn synthesize(k: &dyn Complex, g: &GroupAction, f: &Chain, eta: &Q) -> Result<Synthesis> {
    if !eta.is_positive() && !eta.is_zero() {
        return Err(Error::precondition("η must be non-negative"));
    }
    let support: Vec<_> = f.terms().map(|(s, _)| s.clone()).collect();
    if !support.is_empty() && g.orbits(k, &support)?.len() > 1 {
        return Err(Error::precondition("chain is not supported on a single orbit"));
    }
    let target = abs(&f.coefficient_sum()) + eta;
    match g.family {
        Family::Finite => {
            let words: Vec<Word> = g.closure().expect("finite closure").iter().map(|(w, _)| w.clone()).collect();
            let mu = Measure::uniform(words)?;
            let result = diffuse(k, g, &mu, f)?;
            if !meets(&result, &target) {
                return Err(Error::SynthesisFailed(format!(
                    "uniform measure leaves norm {} above {}",
                    fmt_q(&result.l1_norm()),
                    fmt_q(&target)
                )));
            }
            Ok(Synthesis {
                factors: vec![mu.clone()],
                measure: mu,
                result,
            })
        }
        Family::Lift | Family::Window => box_search(k, g, f, &target),
    }
}

/// The ℓ¹ target alone: μ with ‖μ∗f‖₁ ≤ |Σf| + η.
pub fn synthesize_measure(k: &dyn Complex, g: &GroupAction, f: &Chain, eta: &Q) -> Result<Measure> {
    Ok(synthesize(k, g, f, eta)?.measure)
}

/// Balancing measure ν then a Følner box uniform{γ^0, γ^p, …, γ^{Np}}. Search order: γ, then N,
/// then ν, then p.
fn box_search(k: &dyn Complex, g: &GroupAction, f: &Chain, target: &Q) -> Result<Synthesis> {
    if meets(f, target) {
        let mu = Measure::delta_e();
        return Ok(Synthesis {
            factors: vec![mu.clone()],
            measure: mu,
            result: f.clone(),
        });
    }
    let identity = g.identity().clone();
    let mut balancers: Vec<Measure> = vec![Measure::delta_e()];
    for gen in &g.generators {
        if !gen.map.is_identity() && gen.map.compose(&gen.map)? == identity {
            balancers.push(Measure::uniform(vec![Word::identity(), Word::gen(&gen.label)])?);
        }
    }
    let movers: Vec<&str> = g
        .generators
        .iter()
        .filter(|gen| gen.map.compose(&gen.map).map_or(false, |sq| sq != identity))
        .map(|gen| gen.label.as_str())
        .collect();
    let max_step = if g.family == Family::Lift { MAX_STEP_LIFT } else { MAX_STEP_TABLE };
    let mut exhausted: Option<Error> = None;
    let mut balanced: Vec<Option<(Measure, Chain)>> = Vec::new();
    for nu in &balancers {
        match diffuse(k, g, nu, f) {
            Ok(c) => balanced.push(Some((nu.clone(), c))),
            Err(e) if e.is_window_exhaustion() => {
                exhausted.get_or_insert(e);
                balanced.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    for gamma in &movers {
        let gamma_map = g.element(&Word::gen(gamma))?;
        let profiles: Vec<Option<OverlapProfile>> = balanced
            .iter()
            .map(|b| b.as_ref().and_then(|(_, f1)| OverlapProfile::build(&gamma_map, f1)))
            .collect();
        let mut n = 1;
        while n <= MAX_BOX {
            for ((nu, f1), profile) in balanced.iter().zip(&profiles).filter_map(|(b, p)| Some((b.as_ref()?, p))) {
                for p in 1..=max_step {
                    if profile.as_ref().is_some_and(|pr| !pr.may_meet(n, p, target)) {
                        continue;
                    }
                    let words: Vec<Word> = (0..=n as i64).map(|j| Word::power(gamma, j * p)).collect();
                    let boxm = Measure::uniform(words)?;
                    let r = match diffuse(k, g, &boxm, f1) {
                        Ok(r) => r,
                        Err(e) if e.is_window_exhaustion() => {
                            exhausted.get_or_insert(e);
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    if meets(&r, target) {
                        let mut factors = Vec::new();
                        if nu.entries().len() > 1 {
                            factors.push(nu.clone());
                        }
                        factors.push(boxm.clone());
                        let measure = convolve(g, &boxm, nu)?;
                        return Ok(Synthesis {
                            factors,
                            measure,
                            result: r,
                        });
                    }
                }
            }
            n *= 2;
        }
    }
    Err(exhausted.unwrap_or_else(|| {
        Error::SynthesisFailed(format!(
            "no Følner box up to length {MAX_BOX} and step {max_step} meets the bound {}",
            fmt_q(target)
        ))
    }))
}

/// Weight of the identity element.
pub fn identity_weight(mu: &Measure) -> Q {
    mu.entries
        .iter()
        .filter(|e| e.element.is_identity())
        .map(|e| e.weight.clone())
        .fold(Q::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Generator, TableMap};
    use crate::chains::{alt, boundary, is_alternating};
    use crate::models::circle;
    use crate::multicomplex::{AlgebraicSimplex, Multicomplex, MulticomplexBuilder};
    use crate::rational::{q, qi};
    use std::collections::BTreeMap;

    fn sx(s: &str, t: &[&str]) -> AlgebraicSimplex {
        AlgebraicSimplex::of(s, t)
    }

    /// One edge with the vertex swap.
    fn flip_edge() -> (Multicomplex, GroupAction) {
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v");
        b.simplex("e", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        let k = b.build().unwrap();
        let t = TableMap {
            vertex_map: [("u", "v"), ("v", "u")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            simplex_map: [("u", "v"), ("v", "u"), ("e", "e")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        };
        let g = GroupAction::finite(&k, vec![Generator { label: "g".into(), map: Automorphism::Table(t) }], BTreeMap::new()).unwrap();
        (k, g)
    }

    #[test]
    fn delta_and_odd_pair() {
        let (k, g) = flip_edge();
        let c = Chain::single(sx("e", &["u", "v"]), qi(1));
        assert_eq!(diffuse(&k, &g, &Measure::delta_e(), &c).unwrap(), c);
        let pair = alt(&c);
        let uni = Measure::uniform(vec![Word::identity(), Word::gen("g")]).unwrap();
        assert!(diffuse(&k, &g, &uni, &pair).unwrap().is_zero());
    }

    #[test]
    fn convolution_on_z2() {
        let (_, g) = flip_edge();
        let uni = Measure::uniform(vec![Word::identity(), Word::gen("g")]).unwrap();
        let sq = convolve(&g, &uni, &uni).unwrap();
        assert_eq!(sq.support_len(), 2);
        assert!(sq.entries().iter().all(|e| e.weight == q(1, 2)));
        assert_eq!(convolve(&g, &Measure::delta_e(), &uni).unwrap(), uni);
        let bad = Measure::delta(Word::gen("h"));
        assert!(matches!(convolve(&g, &bad, &uni), Err(Error::ComplexMismatch(_))));
    }

    #[test]
    fn measure_validation() {
        let e = |w: &str, p: Q| MeasureEntry { element: w.parse().unwrap(), weight: p };
        assert!(Measure::from_entries(vec![e("e", q(1, 2)), e("g", q(1, 3))]).is_err());
        assert!(Measure::from_entries(vec![e("e", q(1, 2)), e("e", q(1, 2))]).is_err());
        assert!(Measure::from_entries(vec![e("e", qi(2)), e("g", qi(-1))]).is_err());
        let m = Measure::from_entries(vec![e("e", q(1, 2)), e("s0^3 g0", q(1, 2))]).unwrap();
        let back = Measure::from_json_str(&m.to_json_value().to_string()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn finite_uniform_achieves_sum() {
        let (k, g) = flip_edge();
        let f = Chain::from_terms(1, [(sx("e", &["u", "v"]), qi(3)), (sx("e", &["v", "u"]), qi(-1))]);
        let s = synthesize(&k, &g, &f, &Q::zero()).unwrap();
        assert_eq!(s.result.l1_norm(), abs(&f.coefficient_sum()));
    }

    #[test]
    fn circle_box_meets_bound() {
        let m = 3;
        let kw = circle::CircleWindow::new(m, qi(4096), 2).unwrap();
        let gens: Vec<Generator> = circle::circle_generators(m)
            .into_iter()
            .map(|(label, l)| Generator { label, map: Automorphism::Lift(l) })
            .collect();
        let g = GroupAction::lift(m, gens).unwrap();
        let c = circle::fundamental_cycle(&kw, m).unwrap();
        let eta = c.l1_norm() / qi(2);
        let s = synthesize(&kw, &g, &c, &eta).unwrap();
        assert!(s.result.l1_norm() <= eta);
        assert!(is_alternating(&s.result));
        assert!(boundary(&kw, &s.result).unwrap().is_zero());
        assert_eq!(diffuse(&kw, &g, &s.measure, &c).unwrap(), s.result);
    }
}
