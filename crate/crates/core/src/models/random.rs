//! Seeded random complexes, chains and measures for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::action::GroupAction;
use crate::chains::Chain;
use crate::diffusion::{Measure, MeasureEntry};
use crate::error::Result;
use crate::multicomplex::{algebraic_simplices, Multicomplex, SimplexRecord};
use crate::rational::{q, Q};

/// A random multicomplex with at most `max_simplices` simplices of dimension at most `max_dim`.
/// Some top simplices are doubled, so distinct simplices share vertex sets.
pub fn random_multicomplex<R: Rng>(rng: &mut R, max_simplices: usize, max_dim: usize) -> Result<Multicomplex> {
    let nverts = rng.gen_range(2..=5);
    let names: Vec<String> = (0..nverts).map(|i| format!("p{i}")).collect();
    loop {
        let tops: Vec<Vec<String>> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let size = rng.gen_range(1..=(max_dim + 1).min(nverts));
                let mut v: Vec<String> = names.choose_multiple(rng, size).cloned().collect();
                v.sort();
                v
            })
            .collect();
        let base = Multicomplex::simplicial(&tops);
        if base.simplex_count() > max_simplices {
            continue;
        }
        let mut records: Vec<SimplexRecord> = base.simplices().cloned().collect();
        let maximal: Vec<SimplexRecord> = records
            .iter()
            .filter(|r| r.vertices.len() > 1 && !records.iter().any(|o| o.faces.values().any(|f| *f == r.id)))
            .cloned()
            .collect();
        let mut copies = 0;
        for r in &maximal {
            if records.len() < max_simplices && rng.gen_bool(0.4) {
                let mut c = r.clone();
                copies += 1;
                c.id = format!("{}#{copies}", r.id);
                records.push(c);
            }
        }
        let verts: Vec<String> = base.vertices().cloned().collect();
        return Multicomplex::from_records(verts, records);
    }
}

/// A random small rational.
pub fn random_q<R: Rng>(rng: &mut R) -> Q {
    let num = rng.gen_range(-6..=6);
    let den = rng.gen_range(1..=4);
    q(num, den)
}

/// A chain with up to `terms` random terms on Θ(n).
pub fn random_chain<R: Rng>(rng: &mut R, k: &Multicomplex, n: usize, terms: usize) -> Chain {
    let theta = algebraic_simplices(k, n);
    let mut c = Chain::zero(n);
    if theta.is_empty() {
        return c;
    }
    for _ in 0..terms {
        let s = theta.choose(rng).expect("nonempty").clone();
        c.add_term(s, random_q(rng));
    }
    c
}

/// A random probability measure on a finite group's closure.
pub fn random_measure<R: Rng>(rng: &mut R, g: &GroupAction) -> Measure {
    let closure = g.closure().expect("finite action");
    let size = rng.gen_range(1..=closure.len().min(4));
    let picks: Vec<_> = closure.choose_multiple(rng, size).collect();
    let raw: Vec<i64> = picks.iter().map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    Measure::from_entries(
        picks
            .iter()
            .zip(raw)
            .map(|((w, _), r)| MeasureEntry {
                element: w.clone(),
                weight: q(r, total),
            })
            .collect(),
    )
    .expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multicomplex::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_complexes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let k = random_multicomplex(&mut rng, 30, 3).unwrap();
            assert!(k.simplex_count() <= 30);
            assert!(validate(&k).is_ok());
        }
    }
}
