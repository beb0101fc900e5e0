//! Norm halving by per-orbit diffusion, iterated into invisibility certificates, and exact
//! verification of those certificates.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::action::{bounding_chain, Family, GroupAction};
use crate::chains::{boundary, is_alternating, is_cycle, Chain};
use crate::diffusion::{convolve, diffuse, synthesize, Measure};
use crate::error::{Error, Result};
use crate::hashing::json_hash;
use crate::multicomplex::{face_closure, AlgebraicSimplex, Complex, Multicomplex, SimplexId};
use crate::rational::{fmt_q, pow2_inv, qi, serde_q, serde_q_vec, Q};

/// Simplices of supp(c) (plus, for window actions, those reachable within the word budget)
/// lacking an orientation-reversing stabilizer.
pub fn check_odd_stabilizers(k: &dyn Complex, g: &GroupAction, c: &Chain) -> Result<Vec<SimplexId>> {
    let mut simplices: BTreeSet<SimplexId> = c.support_simplices();
    if g.family == Family::Window {
        let mut frontier: Vec<SimplexId> = simplices.iter().cloned().collect();
        for _ in 0..g.word_budget {
            let mut next = Vec::new();
            for id in &frontier {
                for gen in &g.generators {
                    let mut maps = vec![gen.map.clone()];
                    if let Ok(inv) = gen.map.inverse() {
                        maps.push(inv);
                    }
                    for m in maps {
                        if let Some(img) = m.map_simplex(k, id) {
                            if simplices.insert(img.clone()) {
                                next.push(img);
                            }
                        }
                    }
                }
            }
            frontier = next;
        }
    }
    let mut bad = Vec::new();
    for id in simplices {
        if g.stabilizer_sign_search(k, &id)?.is_none() {
            bad.push(id);
        }
    }
    Ok(bad)
}

/// One norm-halving step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalvingStep {
    #[serde(with = "serde_q")]
    pub input_norm: Q,
    pub orbit_count: usize,
    #[serde(with = "serde_q")]
    pub eta: Q,
    /// Measure factors synthesized for each orbit, in processing order.
    pub orbit_measures: Vec<Vec<Measure>>,
    /// Chain norms before each diffusion stage.
    #[serde(with = "serde_q_vec")]
    pub stages: Vec<Q>,
    /// Convolution of all factors.
    pub measure: Measure,
    pub output: Chain,
    /// ∂b = output − input.
    pub bounding: Chain,
    #[serde(with = "serde_q")]
    pub output_norm: Q,
    #[serde(with = "serde_q")]
    pub bounding_norm: Q,
    /// B with ‖b‖₁ ≤ B·‖input‖₁.
    #[serde(with = "serde_q")]
    pub witness_bound: Q,
}

impl HalvingStep {
    pub fn factors(&self) -> impl Iterator<Item = &Measure> {
        self.orbit_measures.iter().flatten()
    }
}

fn restrict(c: &Chain, orbit: &[AlgebraicSimplex]) -> Chain {
    Chain::from_terms(c.degree(), orbit.iter().map(|s| (s.clone(), c.coeff(s))))
}

fn sum_chains(degree: usize, pieces: &[Chain]) -> Chain {
    let mut out = Chain::zero(degree);
    for p in pieces {
        out = out.add(p);
    }
    out
}

/// ‖μ∗c‖₁ ≤ ‖c‖₁/2 with η = ‖c‖₁/(2s), orbits processed sequentially.
pub fn halve(k: &dyn Complex, g: &GroupAction, c: &Chain) -> Result<HalvingStep> {
    if c.is_zero() {
        return Err(Error::precondition("cannot halve the zero chain"));
    }
    if !is_alternating(c) {
        return Err(Error::precondition("chain is not alternating"));
    }
    if c.degree() == 0 || !is_cycle(k, c)? {
        return Err(Error::precondition("chain is not a cycle of positive degree"));
    }
    let bad = check_odd_stabilizers(k, g, c)?;
    if !bad.is_empty() {
        return Err(Error::precondition(format!(
            "no odd stabilizer for {}",
            bad.join(", ")
        )));
    }
    let n = c.degree();
    let support: Vec<AlgebraicSimplex> = c.terms().map(|(s, _)| s.clone()).collect();
    let orbits = g.orbits(k, &support)?;
    let s = orbits.len();
    let input_norm = c.l1_norm();
    let eta = &input_norm / qi(2 * s as i64);
    let mut pieces: Vec<Chain> = orbits.iter().map(|o| restrict(c, o)).collect();
    let mut orbit_measures = Vec::new();
    let mut stages = Vec::new();
    let mut bounding = Chain::zero(n + 1);
    let mut witness_bound = Q::zero();
    let mut composed = Measure::delta_e();
    for j in 0..s {
        if pieces[j].is_zero() {
            orbit_measures.push(vec![Measure::delta_e()]);
            continue;
        }
        let syn = synthesize(k, g, &pieces[j], &eta)?;
        for factor in &syn.factors {
            let current = sum_chains(n, &pieces);
            stages.push(current.l1_norm());
            let mut stage_bound = Q::zero();
            for e in factor.entries() {
                let w = g.witness_for(&e.element)?;
                if w.bound(n) > stage_bound {
                    stage_bound = w.bound(n);
                }
                bounding.add_scaled(&bounding_chain(k, &w, &current)?, &e.weight);
            }
            witness_bound += stage_bound;
            for p in pieces.iter_mut() {
                *p = diffuse(k, g, factor, p)?;
            }
            composed = convolve(g, factor, &composed)?;
        }
        orbit_measures.push(syn.factors);
    }
    let output = sum_chains(n, &pieces);
    let output_norm = output.l1_norm();
    if output_norm.clone() * qi(2) > input_norm {
        return Err(Error::SynthesisFailed(format!(
            "halving missed: {} > {}/2",
            fmt_q(&output_norm),
            fmt_q(&input_norm)
        )));
    }
    if boundary(k, &bounding)? != output.sub(c) {
        return Err(Error::Witness("∂b differs from μ∗c − c".into()));
    }
    let bounding_norm = bounding.l1_norm();
    Ok(HalvingStep {
        input_norm,
        orbit_count: s,
        eta,
        orbit_measures,
        stages,
        measure: composed,
        output,
        bounding,
        output_norm,
        bounding_norm,
        witness_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundLedger {
    #[serde(with = "serde_q_vec")]
    pub bounding_norms: Vec<Q>,
    #[serde(with = "serde_q")]
    pub total: Q,
    #[serde(with = "serde_q")]
    pub witness_bound_max: Q,
    /// B_max·Σ_{i<N} 2⁻ⁱ‖c₀‖₁, an upper bound for `total`.
    #[serde(with = "serde_q")]
    pub series_bound: Q,
}

/// An ℓ¹-invisibility certificate: c₀ − c_N = ∂b_partial with ‖c_i‖₁ ≤ 2⁻ⁱ‖c₀‖₁.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub complex_hash: String,
    pub action_hash: String,
    pub degree: usize,
    pub initial: Chain,
    pub steps: Vec<HalvingStep>,
    pub partial_bounding: Chain,
    pub residual: Chain,
    #[serde(with = "serde_q")]
    pub residual_bound: Q,
    pub ledger: BoundLedger,
    /// Sub-multicomplex carrying every chain, for models whose window is never materialized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<serde_json::Value>,
}

/// Iterates `halve` up to `steps` times, stopping early at zero.
pub fn certify(k: &dyn Complex, g: &GroupAction, c: &Chain, steps: usize) -> Result<Certificate> {
    if !is_alternating(c) {
        return Err(Error::precondition("chain is not alternating (apply alt first)"));
    }
    let n = c.degree();
    if !c.is_zero() && (n == 0 || !is_cycle(k, c)?) {
        return Err(Error::precondition("chain is not a cycle of positive degree"));
    }
    let mut records = Vec::new();
    let mut current = c.clone();
    let mut partial = Chain::zero(n + 1);
    for _ in 0..steps {
        if current.is_zero() {
            break;
        }
        let step = halve(k, g, &current)?;
        partial = partial.sub(&step.bounding);
        current = step.output.clone();
        records.push(step);
    }
    let norms: Vec<Q> = records.iter().map(|s| s.bounding_norm.clone()).collect();
    let total = norms.iter().fold(Q::zero(), |a, b| a + b);
    let bmax = records
        .iter()
        .map(|s| s.witness_bound.clone())
        .max()
        .unwrap_or_else(Q::zero);
    let c0 = c.l1_norm();
    let series: Q = (0..records.len()).map(|i| pow2_inv(i) * &c0).fold(Q::zero(), |a, b| a + b);
    Ok(Certificate {
        complex_hash: String::new(),
        action_hash: String::new(),
        degree: n,
        initial: c.clone(),
        steps: records,
        partial_bounding: partial,
        residual_bound: current.l1_norm(),
        residual: current,
        ledger: BoundLedger {
            bounding_norms: norms,
            total,
            series_bound: &bmax * series,
            witness_bound_max: bmax,
        },
        complex: None,
    })
}

impl Certificate {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    /// Every simplex id appearing in the certificate's chains.
    pub fn simplex_ids(&self) -> BTreeSet<SimplexId> {
        let mut ids = self.initial.support_simplices();
        ids.extend(self.partial_bounding.support_simplices());
        ids.extend(self.residual.support_simplices());
        for s in &self.steps {
            ids.extend(s.output.support_simplices());
            ids.extend(s.bounding.support_simplices());
        }
        ids
    }

    /// The face closure of every simplex the certificate mentions.
    pub fn carrier(&self, k: &dyn Complex) -> Result<Multicomplex> {
        face_closure(k, self.simplex_ids().iter())
    }

    /// Records content hashes; `embed` stores the complex inside the certificate.
    pub fn seal(&mut self, complex: &Multicomplex, action: &serde_json::Value, embed: bool) {
        let cv = complex.to_json_value();
        self.complex_hash = json_hash(&cv);
        self.action_hash = json_hash(action);
        self.complex = embed.then_some(cv);
    }

    /// Loads the embedded complex, if any.
    pub fn embedded_complex(&self) -> Result<Option<Multicomplex>> {
        match &self.complex {
            None => Ok(None),
            Some(v) => Ok(Some(Multicomplex::from_json_str(&v.to_string())?)),
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Which verification check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    ComplexHash,
    ActionHash,
    Chains,
    Initial,
    StepInput(usize),
    StepNorms(usize),
    StepEta(usize),
    StepHalving(usize),
    StepBoundary(usize),
    StepWitnessBound(usize),
    StepMeasure(usize),
    StepConvolution(usize),
    Decay(usize),
    Residual,
    PartialBoundary,
    ResidualBound,
    Ledger,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub check: Check,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub failures: Vec<Failure>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first(&self) -> Option<&Failure> {
        self.failures.first()
    }

    fn fail(&mut self, check: Check, detail: impl Into<String>) {
        self.failures.push(Failure {
            check,
            detail: detail.into(),
        });
    }
}

/// Exact re-check of every recorded equality and bound. `action` (the parsed action file and
/// its group) enables the hash check and the convolution re-check.
pub fn verify_certificate(
    cert: &Certificate,
    k: &Multicomplex,
    action: Option<(&serde_json::Value, &GroupAction)>,
) -> VerifyReport {
    let mut rep = VerifyReport::default();
    if json_hash(&k.to_json_value()) != cert.complex_hash {
        rep.fail(Check::ComplexHash, "complex does not match the recorded hash");
        return rep;
    }
    if let Some((v, _)) = action {
        if json_hash(v) != cert.action_hash {
            rep.fail(Check::ActionHash, "action does not match the recorded hash");
            return rep;
        }
    }
    let n = cert.degree;
    let fix = |c: &Chain, d: usize| c.clone().with_degree(d);
    let chains = (|| -> Result<(Chain, Chain, Chain, Vec<(Chain, Chain)>)> {
        let steps = cert
            .steps
            .iter()
            .map(|s| Ok((fix(&s.output, n)?, fix(&s.bounding, n + 1)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((fix(&cert.initial, n)?, fix(&cert.partial_bounding, n + 1)?, fix(&cert.residual, n)?, steps))
    })();
    let (c0, partial, residual, steps) = match chains {
        Ok(x) => x,
        Err(e) => {
            rep.fail(Check::Chains, e.to_string());
            return rep;
        }
    };
    for c in std::iter::once(&c0).chain(std::iter::once(&residual)).chain(steps.iter().map(|s| &s.0)) {
        if let Err(e) = c.check_on(k) {
            rep.fail(Check::Chains, e.to_string());
            return rep;
        }
    }
    if let Err(e) = partial.check_on(k) {
        rep.fail(Check::Chains, e.to_string());
        return rep;
    }
    let bd = |c: &Chain| boundary(k, c).map_err(|e| e.to_string());
    if !is_alternating(&c0) || (!c0.is_zero() && (n == 0 || bd(&c0).map_or(true, |b| !b.is_zero()))) {
        rep.fail(Check::Initial, "initial chain is not an alternating cycle");
    }
    let c0n = c0.l1_norm();
    let mut prev = c0.clone();
    for (i, (rec, (out, b))) in cert.steps.iter().zip(&steps).enumerate() {
        if rec.input_norm != prev.l1_norm() {
            rep.fail(Check::StepInput(i), "recorded input norm differs from the previous chain");
        }
        if rec.output_norm != out.l1_norm() || rec.bounding_norm != b.l1_norm() {
            rep.fail(Check::StepNorms(i), "recorded norms differ from the chains");
        }
        if rec.orbit_count == 0
            || rec.orbit_measures.len() != rec.orbit_count
            || rec.eta != prev.l1_norm() / qi(2 * rec.orbit_count as i64)
        {
            rep.fail(Check::StepEta(i), "η is not ‖c‖/(2s)");
        }
        if out.l1_norm() * qi(2) > prev.l1_norm() {
            rep.fail(Check::StepHalving(i), "output norm exceeds half the input norm");
        }
        if !is_alternating(out) {
            rep.fail(Check::StepHalving(i), "output is not alternating");
        }
        match bd(b) {
            Ok(db) if db == out.sub(&prev) => {}
            Ok(_) => rep.fail(Check::StepBoundary(i), "∂b_i ≠ c_{i+1} − c_i"),
            Err(e) => rep.fail(Check::StepBoundary(i), e),
        }
        if b.l1_norm() > &rec.witness_bound * prev.l1_norm() {
            rep.fail(Check::StepWitnessBound(i), "‖b_i‖ exceeds B·‖c_i‖");
        }
        if let Some(e) = std::iter::once(&rec.measure).chain(rec.factors()).find_map(|m| m.validate().err()) {
            rep.fail(Check::StepMeasure(i), e.to_string());
        }
        if let Some((_, g)) = action {
            let mut acc = Measure::delta_e();
            let mut ok = true;
            for f in rec.factors() {
                match convolve(g, f, &acc) {
                    Ok(m) => acc = m,
                    Err(_) => ok = false,
                }
            }
            if !ok || acc != rec.measure {
                rep.fail(Check::StepConvolution(i), "measure is not the convolution of its factors");
            }
        }
        if out.l1_norm() > pow2_inv(i + 1) * &c0n {
            rep.fail(Check::Decay(i + 1), "‖c_i‖ exceeds 2⁻ⁱ‖c₀‖");
        }
        prev = out.clone();
    }
    if prev != residual {
        rep.fail(Check::Residual, "residual differs from the last step output");
    }
    match bd(&partial) {
        Ok(db) if db == c0.sub(&residual) => {}
        Ok(_) => rep.fail(Check::PartialBoundary, "∂b_partial ≠ c₀ − c_N"),
        Err(e) if c0.is_zero() && partial.is_zero() => drop(e),
        Err(e) => rep.fail(Check::PartialBoundary, e),
    }
    if cert.residual_bound < residual.l1_norm() || cert.residual_bound > pow2_inv(cert.steps.len()) * &c0n {
        if !(residual.is_zero() && cert.residual_bound.is_zero()) {
            rep.fail(Check::ResidualBound, "residual bound is not in [‖c_N‖, 2⁻ᴺ‖c₀‖]");
        }
    }
    let norms: Vec<Q> = steps.iter().map(|(_, b)| b.l1_norm()).collect();
    let total = norms.iter().fold(Q::zero(), |a, b| a + b);
    let bmax = cert.steps.iter().map(|s| s.witness_bound.clone()).max().unwrap_or_else(Q::zero);
    let series: Q = (0..cert.steps.len()).map(|i| pow2_inv(i) * &c0n).fold(Q::zero(), |a, b| a + b);
    if cert.ledger.bounding_norms != norms
        || cert.ledger.total != total
        || cert.ledger.witness_bound_max != bmax
        || cert.ledger.series_bound != &bmax * series
        || total > cert.ledger.series_bound
    {
        rep.fail(Check::Ledger, "bound ledger is inconsistent");
    }
    rep
}

/// ‖c_N‖₁ from a certificate that verifies; an upper bound for the seminorm of [c₀].
pub fn seminorm_bound_from_certificate(cert: &Certificate, report: &VerifyReport) -> Result<Q> {
    if !report.is_ok() {
        return Err(Error::precondition("certificate did not verify"));
    }
    Ok(cert.residual.l1_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Automorphism, Generator, TableMap};
    use crate::chains::alt;
    use crate::multicomplex::MulticomplexBuilder;
    use std::collections::BTreeMap;

    fn sx(s: &str, t: &[&str]) -> AlgebraicSimplex {
        AlgebraicSimplex::of(s, t)
    }

    fn bigon() -> Multicomplex {
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v");
        b.simplex("e1", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.simplex("e2", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.build().unwrap()
    }

    fn loop_cycle() -> Chain {
        alt(&Chain::from_terms(1, [(sx("e1", &["u", "v"]), qi(1)), (sx("e2", &["u", "v"]), qi(-1))]))
    }

    #[test]
    fn trivial_group_violates_everywhere() {
        let k = bigon();
        let g = GroupAction::trivial(&k);
        let bad = check_odd_stabilizers(&k, &g, &loop_cycle()).unwrap();
        assert_eq!(bad, vec!["e1".to_string(), "e2".to_string()]);
    }

    #[test]
    fn edge_swap_is_not_a_stabilizer() {
        let k = bigon();
        let t = TableMap {
            vertex_map: [("u", "u"), ("v", "v")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            simplex_map: [("u", "u"), ("v", "v"), ("e1", "e2"), ("e2", "e1")]
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        };
        let g = GroupAction::finite(&k, vec![Generator { label: "g".into(), map: Automorphism::Table(t) }], BTreeMap::new()).unwrap();
        let c = alt(&Chain::single(sx("e1", &["u", "v"]), qi(1)));
        assert_eq!(check_odd_stabilizers(&k, &g, &c).unwrap(), vec!["e1".to_string()]);
        assert!(matches!(halve(&k, &g, &loop_cycle()), Err(Error::Precondition(_))));
    }

    #[test]
    fn zero_chain() {
        let k = bigon();
        let g = GroupAction::trivial(&k);
        assert!(matches!(halve(&k, &g, &Chain::zero(1)), Err(Error::Precondition(_))));
        let mut cert = certify(&k, &g, &Chain::zero(1), 5).unwrap();
        assert_eq!(cert.step_count(), 0);
        assert!(cert.residual.is_zero());
        cert.seal(&k, &serde_json::json!({}), false);
        let rep = verify_certificate(&cert, &k, None);
        assert!(rep.is_ok(), "{rep:?}");
        assert_eq!(seminorm_bound_from_certificate(&cert, &rep).unwrap(), Q::zero());
    }
}
