//! Exact homology of a multicomplex and an exact LP for the ℓ¹-seminorm of a class.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::chains::{alt, boundary_of, is_alternating, is_cycle, Chain};
use crate::error::{Error, Result};
use crate::lp::{kernel, l1_fit_certified, simplex, Echelon, SparseVec};
use crate::multicomplex::{algebraic_simplices, AlgebraicSimplex, Complex, Multicomplex};
use crate::rational::{qi, serde_q, Q};

/// Θ(n) with its index.
#[derive(Clone, Debug)]
pub struct Basis {
    pub elements: Vec<AlgebraicSimplex>,
    index: BTreeMap<AlgebraicSimplex, usize>,
}

impl Basis {
    pub fn of(k: &Multicomplex, n: usize) -> Self {
        let elements = algebraic_simplices(k, n);
        let index = elements.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Basis { elements, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn vector(&self, c: &Chain) -> Result<SparseVec> {
        c.terms()
            .map(|(s, x)| {
                self.index
                    .get(s)
                    .map(|i| (*i, x.clone()))
                    .ok_or_else(|| Error::invalid(format!("{s} is not an algebraic simplex of the complex")))
            })
            .collect()
    }

    pub fn chain(&self, degree: usize, v: &SparseVec) -> Chain {
        Chain::from_terms(degree, v.iter().map(|(i, x)| (self.elements[*i].clone(), x.clone())))
    }
}

/// Columns of ∂ₙ in the Θ bases.
fn boundary_columns(k: &Multicomplex, dom: &Basis, cod: &Basis) -> Result<Vec<SparseVec>> {
    dom.elements
        .iter()
        .map(|s| cod.vector(&boundary_of(k, s)?))
        .collect()
}

/// Cycle, boundary and quotient bases in degree n.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: usize,
    pub cycles: Vec<Chain>,
    pub boundaries: Vec<Chain>,
    /// Cycles whose classes form a basis of the quotient.
    pub representatives: Vec<Chain>,
    pub dimension: usize,
    basis: Basis,
    quotient: Echelon,
    boundary_rank: usize,
    rep_labels: BTreeMap<usize, usize>,
}

pub fn homology(k: &Multicomplex, n: usize) -> Result<HomologyBasis> {
    let theta = Basis::of(k, n);
    let cycle_vecs: Vec<SparseVec> = if n == 0 {
        (0..theta.len()).map(|i| SparseVec::from([(i, qi(1))])).collect()
    } else {
        let lower = Basis::of(k, n - 1);
        kernel(&boundary_columns(k, &theta, &lower)?)
    };
    let upper = Basis::of(k, n + 1);
    let mut image = Echelon::new();
    let mut boundary_vecs = Vec::new();
    for col in boundary_columns(k, &upper, &theta)? {
        if image.insert(&col).is_none() {
            boundary_vecs.push(col);
        }
    }
    let mut quotient = Echelon::new();
    for b in &boundary_vecs {
        quotient.insert(b);
    }
    let boundary_rank = boundary_vecs.len();
    let mut reps = Vec::new();
    let mut rep_labels = BTreeMap::new();
    for (i, z) in cycle_vecs.iter().enumerate() {
        if quotient.insert(z).is_none() {
            rep_labels.insert(boundary_rank + i, reps.len());
            reps.push(z.clone());
        }
    }
    Ok(HomologyBasis {
        degree: n,
        cycles: cycle_vecs.iter().map(|v| theta.chain(n, v)).collect(),
        boundaries: boundary_vecs.iter().map(|v| theta.chain(n, v)).collect(),
        dimension: reps.len(),
        representatives: reps.iter().map(|v| theta.chain(n, v)).collect(),
        basis: theta,
        quotient,
        boundary_rank,
        rep_labels,
    })
}

/// Coordinates of [z] against `h.representatives`; all zero iff z is a boundary.
pub fn class_of(k: &Multicomplex, h: &HomologyBasis, z: &Chain) -> Result<Vec<Q>> {
    if z.degree() != h.degree {
        return Err(Error::invalid("degree mismatch"));
    }
    if h.degree > 0 && !is_cycle(k, z)? {
        return Err(Error::NotACycle);
    }
    let v = h.basis.vector(z)?;
    let comb = h
        .quotient
        .solve(&v)
        .ok_or_else(|| Error::invalid("cycle outside the cycle space"))?;
    let mut out = vec![Q::zero(); h.dimension];
    for (label, x) in comb {
        if label < h.boundary_rank {
            continue;
        }
        if let Some(r) = h.rep_labels.get(&label) {
            out[*r] = x;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeminormResult {
    #[serde(with = "serde_q")]
    pub value: Q,
    /// b* of degree n+1.
    pub minimizer: Chain,
    /// z − ∂b*.
    pub representative: Chain,
    pub pivots: usize,
}

/// Tableau size above which the float-guided certified solve is tried first.
pub const DENSE_LIMIT: usize = 200_000;

/// min Σ|z_i − (Σ_j y_j D_j)_i| over free y, as a standard-form LP.
fn l1_fit(columns: &[SparseVec], z: &[Q]) -> Result<(Vec<Q>, Q, usize)> {
    let m = z.len();
    let p = columns.len();
    if m * (2 * p + 2 * m) > DENSE_LIMIT {
        if let Some((y, value)) = l1_fit_certified(columns, z) {
            return Ok((y, value, 0));
        }
    }
    let mut rows: Vec<SparseVec> = vec![SparseVec::new(); m];
    for (j, col) in columns.iter().enumerate() {
        for (i, x) in col {
            rows[*i].insert(j, x.clone());
            rows[*i].insert(p + j, -x.clone());
        }
    }
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, row) in rows.iter_mut().enumerate() {
        row.insert(2 * p + i, qi(1));
        row.insert(2 * p + m + i, qi(-1));
        if z[i].is_negative() {
            for x in row.values_mut() {
                *x = -x.clone();
            }
            rhs.push(-z[i].clone());
            basis.push(2 * p + m + i);
        } else {
            rhs.push(z[i].clone());
            basis.push(2 * p + i);
        }
    }
    let mut cost = vec![Q::zero(); 2 * p];
    cost.extend(std::iter::repeat(qi(1)).take(2 * m));
    let sol = simplex(&rows, &rhs, &cost, basis)?;
    let y: Vec<Q> = (0..p).map(|j| &sol.x[j] - &sol.x[p + j]).collect();
    Ok((y, sol.value, sol.pivots))
}

fn finish(k: &Multicomplex, z: &Chain, minimizer: Chain, value: Q, pivots: usize) -> Result<SeminormResult> {
    let db = if minimizer.is_zero() {
        Chain::zero(z.degree())
    } else {
        crate::chains::boundary(k, &minimizer)?
    };
    let representative = z.sub(&db);
    if representative.l1_norm() != value {
        return Err(Error::invalid("LP optimum does not reproduce on substitution"));
    }
    Ok(SeminormResult {
        value,
        minimizer,
        representative,
        pivots,
    })
}

/// LP over all algebraic simplices, degenerate tuples included.
pub fn seminorm_lp_full(k: &Multicomplex, z: &Chain) -> Result<SeminormResult> {
    let n = z.degree();
    if n > 0 && !is_cycle(k, z)? {
        return Err(Error::NotACycle);
    }
    let theta = Basis::of(k, n);
    let upper = Basis::of(k, n + 1);
    let cols = boundary_columns(k, &upper, &theta)?;
    let zv = theta.vector(z)?;
    let dense: Vec<Q> = (0..theta.len()).map(|i| zv.get(&i).cloned().unwrap_or_else(Q::zero)).collect();
    let (y, value, pivots) = l1_fit(&cols, &dense)?;
    let b = Chain::from_terms(n + 1, upper.elements.iter().cloned().zip(y));
    finish(k, z, b, value, pivots)
}

/// Oriented simplices of dimension n, as (simplex with sorted tuple).
fn oriented(k: &Multicomplex, n: usize) -> Vec<AlgebraicSimplex> {
    k.simplices_of_dim(n)
        .into_iter()
        .map(|id| {
            let mut v = k.simplex_vertices(id).expect("listed simplex");
            v.sort();
            AlgebraicSimplex::new(id.clone(), v)
        })
        .collect()
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(qi(1), |a, b| a * qi(b))
}

/// LP over alternating chains; equal to the full LP for alternating z.
pub fn seminorm_lp_alt(k: &Multicomplex, z: &Chain) -> Result<SeminormResult> {
    let n = z.degree();
    if !is_alternating(z) {
        return Err(Error::precondition("chain is not alternating"));
    }
    if n > 0 && !is_cycle(k, z)? {
        return Err(Error::NotACycle);
    }
    let rows = oriented(k, n);
    let index: BTreeMap<&AlgebraicSimplex, usize> = rows.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let upper = oriented(k, n + 1);
    let scale = factorial(n + 1);
    let mut cols = Vec::with_capacity(upper.len());
    for s in &upper {
        let mut col = SparseVec::new();
        for i in 0..=n + 1 {
            let mut fv = s.tuple.clone();
            fv.remove(i);
            let face = k
                .facet(&s.simplex, &fv)
                .ok_or_else(|| Error::invalid(format!("missing face of `{}`", s.simplex)))?;
            let key = AlgebraicSimplex::new(face, fv);
            let sign = if i % 2 == 0 { qi(1) } else { qi(-1) };
            let e = col.entry(index[&key]).or_insert_with(Q::zero);
            *e += sign;
        }
        col.retain(|_, x| !x.is_zero());
        cols.push(col);
    }
    let dense: Vec<Q> = rows.iter().map(|s| z.coeff(s) * &scale).collect();
    let (y, value, pivots) = l1_fit(&cols, &dense)?;
    let b = alt(&Chain::from_terms(n + 1, upper.into_iter().zip(y)));
    finish(k, z, b, value, pivots)
}

/// Exact ℓ¹-seminorm of [z] on a finite complex.
pub fn seminorm_lp(k: &Multicomplex, z: &Chain) -> Result<SeminormResult> {
    if is_alternating(z) {
        seminorm_lp_alt(k, z)
    } else {
        seminorm_lp_full(k, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::brute_force_lp;
    use crate::multicomplex::MulticomplexBuilder;

    fn sx(s: &str, t: &[&str]) -> AlgebraicSimplex {
        AlgebraicSimplex::of(s, t)
    }

    pub(crate) fn bigon() -> Multicomplex {
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v");
        b.simplex("e1", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.simplex("e2", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.build().unwrap()
    }

    fn bigon_cycle() -> Chain {
        alt(&Chain::from_terms(1, [(sx("e1", &["u", "v"]), qi(1)), (sx("e2", &["u", "v"]), qi(-1))]))
    }

    #[test]
    fn certified_float_path_matches_simplex() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut certified = 0;
        for _ in 0..40 {
            let m = rng.gen_range(2..7);
            let p = rng.gen_range(1..6);
            let cols: Vec<SparseVec> = (0..p)
                .map(|_| {
                    let mut col = SparseVec::new();
                    for i in 0..m {
                        if rng.gen_bool(0.5) {
                            col.insert(i, qi(if rng.gen_bool(0.5) { 1 } else { -1 }));
                        }
                    }
                    col
                })
                .collect();
            let z: Vec<Q> = (0..m).map(|_| crate::rational::q(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect();
            let (_, exact, _) = l1_fit(&cols, &z).unwrap();
            if let Some((y, value)) = crate::lp::l1_fit_certified(&cols, &z) {
                certified += 1;
                assert_eq!(value, exact);
                let mut r = z.clone();
                for (j, col) in cols.iter().enumerate() {
                    for (i, x) in col {
                        r[*i] -= &y[j] * x;
                    }
                }
                assert_eq!(r.iter().map(|x| x.abs()).fold(Q::zero(), |a, b| a + b), value);
            }
        }
        assert!(certified >= 30, "only {certified} certified");
    }

    fn sphere() -> Multicomplex {
        let faces: Vec<Vec<&str>> = vec![vec!["a", "b", "c"], vec!["a", "b", "d"], vec!["a", "c", "d"], vec!["b", "c", "d"]];
        Multicomplex::simplicial(&faces)
    }

    fn sphere_class() -> Chain {
        let mut c = Chain::zero(2);
        for (id, t, s) in [("a|b|c", ["a", "b", "c"], 1), ("a|b|d", ["a", "b", "d"], -1), ("a|c|d", ["a", "c", "d"], 1), ("b|c|d", ["b", "c", "d"], -1)] {
            c.add_term(sx(id, &t), qi(s));
        }
        alt(&c)
    }

    #[test]
    fn homology_dimensions() {
        let tri = Multicomplex::simplicial(&[vec!["a", "b", "c"]]);
        assert_eq!(homology(&tri, 1).unwrap().dimension, 0);
        assert_eq!(homology(&tri, 0).unwrap().dimension, 1);
        assert_eq!(homology(&sphere(), 2).unwrap().dimension, 1);
        assert_eq!(homology(&sphere(), 1).unwrap().dimension, 0);
        assert_eq!(homology(&bigon(), 1).unwrap().dimension, 1);
    }

    #[test]
    fn classes() {
        let k = bigon();
        let h = homology(&k, 1).unwrap();
        let z = bigon_cycle();
        assert!(class_of(&k, &h, &z).unwrap().iter().any(|x| !x.is_zero()));
        let w = z.scale(&qi(3)).sub(&z.scale(&qi(2)).add(&z));
        assert!(class_of(&k, &h, &w).unwrap().iter().all(|x| x.is_zero()));
        assert!(matches!(class_of(&k, &h, &Chain::single(sx("e1", &["u", "v"]), qi(1))), Err(Error::NotACycle)));
        let tri = Multicomplex::simplicial(&[vec!["a", "b", "c"]]);
        let bd = boundary_of(&tri, &sx("a|b|c", &["a", "b", "c"])).unwrap();
        let ht = homology(&tri, 1).unwrap();
        assert!(class_of(&tri, &ht, &bd).unwrap().is_empty());
    }

    #[test]
    fn seminorm_examples() {
        let k = bigon();
        let z = bigon_cycle();
        assert_eq!(seminorm_lp(&k, &z).unwrap().value, z.l1_norm());
        let tri = Multicomplex::simplicial(&[vec!["a", "b", "c"]]);
        let bd = alt(&boundary_of(&tri, &sx("a|b|c", &["a", "b", "c"])).unwrap());
        assert_eq!(seminorm_lp(&tri, &bd).unwrap().value, Q::zero());
        assert_eq!(seminorm_lp_full(&tri, &bd).unwrap().value, Q::zero());
    }

    /// The dual cocycle taking value 1 on every oriented face certifies the lower bound 4.
    #[test]
    fn sphere_value_and_full_agreement() {
        let k = sphere();
        let z = sphere_class();
        let a = seminorm_lp_alt(&k, &z).unwrap();
        assert_eq!(a.value, qi(4));
        let f = seminorm_lp_full(&k, &z).unwrap();
        assert_eq!(f.value, qi(4));
    }

    #[test]
    fn brute_force_on_half_filled_bigon() {
        let mut b = MulticomplexBuilder::new();
        b.vertex("u").vertex("v").vertex("w");
        b.simplex("e1", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.simplex("e2", &["u", "v"], &[(&["u"], "u"), (&["v"], "v")]);
        b.simplex_auto("u|w", &["u", "w"]).unwrap();
        b.simplex_auto("v|w", &["v", "w"]).unwrap();
        b.simplex("t", &["u", "v", "w"], &[(&["u", "v"], "e1"), (&["u", "w"], "u|w"), (&["v", "w"], "v|w")]);
        let k = b.build().unwrap();
        let z = alt(&Chain::from_terms(1, [(sx("e1", &["u", "v"]), qi(3)), (sx("e2", &["u", "v"]), qi(-3))]));
        let res = seminorm_lp_alt(&k, &z).unwrap();
        let rows = oriented(&k, 1);
        let scale = factorial(2);
        let dense: Vec<Q> = rows.iter().map(|s| z.coeff(s) * &scale).collect();
        let col: SparseVec = [(0usize, qi(1)), (2, qi(-1)), (3, qi(1))].into_iter().collect();
        let mut lp_rows: Vec<SparseVec> = vec![SparseVec::new(); rows.len()];
        for (i, x) in &col {
            lp_rows[*i].insert(0, x.clone());
            lp_rows[*i].insert(1, -x.clone());
        }
        let m = rows.len();
        for (i, r) in lp_rows.iter_mut().enumerate() {
            r.insert(2 + i, qi(1));
            r.insert(2 + m + i, qi(-1));
        }
        let mut cost = vec![Q::zero(); 2];
        cost.extend(std::iter::repeat(qi(1)).take(2 * m));
        assert_eq!(rows[0], sx("e1", &["u", "v"]));
        assert_eq!(brute_force_lp(&lp_rows, &dense, &cost), Some(res.value.clone()));
        assert_eq!(res.value, qi(6));
        assert_eq!(seminorm_lp_full(&k, &z).unwrap().value, qi(6));
    }
}
