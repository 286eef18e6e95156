//! Finite abelian groups presented as subquotients of integer lattices,
//! with explicit generator witnesses and class-coordinate reduction.
//!
//! Every cohomology group, image and kernel the crate reports is one of
//! these: invariant factors `d1 | d2 | ...` (each >= 2), plus enough data to
//! send an ambient vector to its class coordinates.

use crate::matrix::{self, IntMat, Snf, SnfTransforms, Solver};
use crate::Error;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::sync::Arc;

/// How an ambient vector reaches the working coordinates of the subquotient.
#[derive(Clone)]
enum Pre {
    /// Working space equals the ambient space.
    Id,
    /// Pick the listed ambient coordinates (cocycle restriction to
    /// generator coordinates).
    Select(Arc<Vec<usize>>),
}

/// Reduction procedure: pre-map, solve in the lattice basis, transform, mod.
#[derive(Clone)]
struct Reducer {
    pre: Pre,
    /// Solver for the basis matrix L of the covering lattice.
    basis: Arc<Solver>,
    /// Unimodular change of coordinates from basis coefficients.
    u: Arc<IntMat>,
    /// Full diagonal (including 1s), length = number of basis columns.
    moduli: Arc<Vec<BigInt>>,
    /// Indices with modulus >= 2, i.e. the reported invariant factors.
    keep: Arc<Vec<usize>>,
}

/// A finite abelian group L/R together with witnesses and a reduction map.
#[derive(Clone)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<BigInt>,
    ambient_dim: usize,
    /// One ambient vector per invariant factor.
    generator_witnesses: Vec<Vec<BigInt>>,
    reducer: Option<Reducer>,
}

impl std::fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteAbelianGroup({})", self.text())
    }
}

impl PartialEq for FiniteAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.invariant_factors == other.invariant_factors
    }
}

/// Serialized view: `{"invariant_factors": [...], "order": n}`.
#[derive(Serialize)]
pub struct FabView {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
}

impl FiniteAbelianGroup {
    pub fn trivial(ambient_dim: usize) -> Self {
        FiniteAbelianGroup {
            invariant_factors: vec![],
            ambient_dim,
            generator_witnesses: vec![],
            reducer: None,
        }
    }

    /// From invariant factors only (used for direct sums in class
    /// coordinates, where the ambient is the class-coordinate space itself).
    pub fn from_invariant_factors(factors: Vec<BigInt>) -> Self {
        let k = factors.len();
        let witnesses = (0..k)
            .map(|i| {
                let mut v = vec![BigInt::zero(); k];
                v[i] = BigInt::one();
                v
            })
            .collect();
        let l = IntMat::identity(k);
        let moduli = factors.clone();
        let keep: Vec<usize> = (0..k).collect();
        FiniteAbelianGroup {
            invariant_factors: factors,
            ambient_dim: k,
            generator_witnesses: witnesses,
            reducer: Some(Reducer {
                pre: Pre::Id,
                basis: Arc::new(Solver::new(&l)),
                u: Arc::new(IntMat::identity(k)),
                moduli: Arc::new(moduli),
                keep: Arc::new(keep),
            }),
        }
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generator_witnesses(&self) -> &[Vec<BigInt>] {
        &self.generator_witnesses
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors
            .iter()
            .fold(BigInt::one(), |acc, d| acc * d)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Number of class coordinates.
    pub fn num_generators(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Class coordinates of an ambient vector. Errors when the vector does
    /// not lie in the covering lattice L.
    pub fn reduce(&self, v: &[BigInt]) -> Result<Vec<BigInt>, Error> {
        if v.len() != self.ambient_dim {
            return Err(Error::Internal(format!(
                "reduce: ambient dim {} expected {}",
                v.len(),
                self.ambient_dim
            )));
        }
        let Some(r) = &self.reducer else {
            return Ok(vec![]);
        };
        let w: Vec<BigInt> = match &r.pre {
            Pre::Id => v.to_vec(),
            Pre::Select(idx) => idx.iter().map(|&i| v[i].clone()).collect(),
        };
        let x = r
            .basis
            .solve(&w)
            .ok_or_else(|| Error::Internal("reduce: vector outside covering lattice".into()))?;
        let y = r.u.mul_vec(&x);
        Ok(r.keep
            .iter()
            .map(|&i| {
                let m = &r.moduli[i];
                let rem = &y[i] % m;
                if rem.sign() == num_bigint::Sign::Minus {
                    rem + m
                } else {
                    rem
                }
            })
            .collect())
    }

    /// Re-house the group in a larger ambient space: replace witnesses and
    /// prepend a coordinate selection to the reduction. Used by the cocycle
    /// model, where kernels live in generator coordinates but classes are
    /// reported over the full element set.
    pub fn relocate(
        mut self,
        ambient_dim: usize,
        witnesses: Vec<Vec<BigInt>>,
        select: Vec<usize>,
    ) -> Self {
        assert_eq!(witnesses.len(), self.invariant_factors.len());
        self.ambient_dim = ambient_dim;
        self.generator_witnesses = witnesses;
        if let Some(r) = &mut self.reducer {
            r.pre = Pre::Select(Arc::new(select));
        }
        self
    }

    /// Text rendering: "Z/2 x Z/4", or "0" for the trivial group.
    pub fn text(&self) -> String {
        if self.invariant_factors.is_empty() {
            "0".to_string()
        } else {
            self.invariant_factors
                .iter()
                .map(|d| format!("Z/{}", d))
                .collect::<Vec<_>>()
                .join(" x ")
        }
    }

    pub fn view(&self) -> FabView {
        FabView {
            invariant_factors: self
                .invariant_factors
                .iter()
                .map(|d| u64::try_from(d).expect("invariant factor exceeds u64"))
                .collect(),
            order: u64::try_from(&self.order()).expect("group order exceeds u64"),
        }
    }
}

/// Options for [`subquotient`].
pub struct SubquotientInput<'a> {
    /// Basis of the covering lattice L, columns, full column rank.
    pub l_basis: &'a IntMat,
    /// Generators of the relation lattice R (columns), R within L.
    pub relations: &'a IntMat,
    /// Ambient dimension of the reported witnesses.
    pub ambient_dim: usize,
    /// Lift from working coordinates back to ambient coordinates
    /// (None when working space == ambient space).
    pub witness_lift: Option<&'a IntMat>,
    /// Coordinate selection applied before reduction.
    pub pre_select: Option<Vec<usize>>,
}

/// L/R as a finite abelian group. Errors when the quotient is infinite,
/// when R is not contained in L, or when L is not a basis.
pub fn subquotient(input: SubquotientInput<'_>) -> Result<FiniteAbelianGroup, Error> {
    let l = input.l_basis;
    let nbasis = l.cols();
    if nbasis == 0 {
        return Ok(FiniteAbelianGroup::trivial(input.ambient_dim));
    }
    let solver = Solver::new(l);
    let x = solver
        .solve_mat(input.relations)
        .ok_or_else(|| Error::Internal("subquotient: relations not inside lattice".into()))?;
    let s: Snf = matrix::snf(
        &x,
        SnfTransforms {
            u: true,
            uinv: true,
            ..Default::default()
        },
    );
    if s.rank != nbasis {
        return Err(Error::Internal(
            "subquotient: quotient has free part".into(),
        ));
    }
    let mut moduli = vec![BigInt::zero(); nbasis];
    for (i, m) in moduli.iter_mut().enumerate() {
        *m = s.d.get(i, i).clone();
    }
    let keep: Vec<usize> = (0..nbasis).filter(|&i| moduli[i] > BigInt::one()).collect();
    let uinv = s.uinv.as_ref().unwrap();
    // generators in working coordinates: columns of L * U^{-1}
    let gen_work = l.mul(uinv);
    let witnesses: Vec<Vec<BigInt>> = keep
        .iter()
        .map(|&i| {
            let col = gen_work.column(i);
            match input.witness_lift {
                Some(e) => e.mul_vec(&col),
                None => col,
            }
        })
        .collect();
    let invariant_factors: Vec<BigInt> = keep.iter().map(|&i| moduli[i].clone()).collect();
    let pre = match input.pre_select {
        Some(idx) => Pre::Select(Arc::new(idx)),
        None => Pre::Id,
    };
    Ok(FiniteAbelianGroup {
        invariant_factors,
        ambient_dim: input.ambient_dim,
        generator_witnesses: witnesses,
        reducer: Some(Reducer {
            pre,
            basis: Arc::new(solver),
            u: Arc::new(s.u.unwrap()),
            moduli: Arc::new(moduli),
            keep: Arc::new(keep),
        }),
    })
}

/// A homomorphism between finite abelian groups, recorded by its matrix in
/// class coordinates (one column per source generator).
#[derive(Clone, Debug)]
pub struct AbelianHom {
    pub source: FiniteAbelianGroup,
    pub target: FiniteAbelianGroup,
    pub matrix: IntMat,
}

impl AbelianHom {
    pub fn zero(source: FiniteAbelianGroup, target: FiniteAbelianGroup) -> Self {
        let m = IntMat::zeros(target.num_generators(), source.num_generators());
        AbelianHom {
            source,
            target,
            matrix: m,
        }
    }

    pub fn identity(g: &FiniteAbelianGroup) -> Self {
        AbelianHom {
            source: g.clone(),
            target: g.clone(),
            matrix: IntMat::identity(g.num_generators()),
        }
    }

    pub fn is_zero(&self) -> bool {
        let k = self.target.num_generators();
        (0..k).all(|i| {
            (0..self.source.num_generators()).all(|j| {
                let d = &self.target.invariant_factors()[i];
                (self.matrix.get(i, j) % d).is_zero()
            })
        })
    }

    /// self ∘ other (apply `other` first).
    pub fn compose(&self, other: &AbelianHom) -> AbelianHom {
        assert_eq!(
            other.target.invariant_factors(),
            self.source.invariant_factors(),
            "compose: middle groups disagree"
        );
        AbelianHom {
            source: other.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    /// Equal as maps, i.e. matrices agree modulo the target relations.
    pub fn same_map(&self, other: &AbelianHom) -> bool {
        if self.matrix.rows() != other.matrix.rows() || self.matrix.cols() != other.matrix.cols() {
            return false;
        }
        (0..self.matrix.rows()).all(|i| {
            let d = &self.target.invariant_factors()[i];
            (0..self.matrix.cols()).all(|j| ((self.matrix.get(i, j) - other.matrix.get(i, j)) % d).is_zero())
        })
    }
}

/// Presentation of a target group as Z^k modulo diag(invariant factors).
fn relation_diagonal(g: &FiniteAbelianGroup) -> IntMat {
    let k = g.num_generators();
    let mut d = IntMat::zeros(k, k);
    for (i, f) in g.invariant_factors().iter().enumerate() {
        d.set(i, i, f.clone());
    }
    d
}

/// Subgroup of `target` generated by the columns of `gens` (class coords).
pub fn subgroup_of(target: &FiniteAbelianGroup, gens: &IntMat) -> Result<FiniteAbelianGroup, Error> {
    let d = relation_diagonal(target);
    let l = matrix::column_hnf(&gens.hstack(&d));
    subquotient(SubquotientInput {
        l_basis: &l,
        relations: &d,
        ambient_dim: target.num_generators(),
        witness_lift: None,
        pre_select: None,
    })
}

/// Quotient of two nested subgroups of `target`, both given by generating
/// columns in class coordinates: span(big)/span(small).
pub fn subgroup_quotient(
    target: &FiniteAbelianGroup,
    big: &IntMat,
    small: &IntMat,
) -> Result<FiniteAbelianGroup, Error> {
    let d = relation_diagonal(target);
    let l = matrix::column_hnf(&big.hstack(&d));
    let r = small.hstack(&d);
    subquotient(SubquotientInput {
        l_basis: &l,
        relations: &r,
        ambient_dim: target.num_generators(),
        witness_lift: None,
        pre_select: None,
    })
}

/// Kernel of a hom, as a group in the source's class coordinates.
pub fn kernel_of_hom(h: &AbelianHom) -> Result<FiniteAbelianGroup, Error> {
    let ks = h.source.num_generators();
    if ks == 0 {
        return Ok(FiniteAbelianGroup::trivial(0));
    }
    let dt = relation_diagonal(&h.target);
    let ds = relation_diagonal(&h.source);
    // x in ker iff C x = D_t y for some y
    let stacked = h.matrix.hstack(&dt);
    let ker = matrix::kernel(&stacked);
    let idx: Vec<usize> = (0..ks).collect();
    let proj = ker.select_rows(&idx);
    let l = matrix::column_hnf(&proj.hstack(&ds));
    subquotient(SubquotientInput {
        l_basis: &l,
        relations: &ds,
        ambient_dim: ks,
        witness_lift: None,
        pre_select: None,
    })
}

/// Image of a hom as a subgroup of the target.
pub fn image_of_hom(h: &AbelianHom) -> Result<FiniteAbelianGroup, Error> {
    subgroup_of(&h.target, &h.matrix)
}

/// Direct sum presented in concatenated class coordinates.
pub fn direct_sum(groups: &[&FiniteAbelianGroup]) -> FiniteAbelianGroup {
    let mut factors: Vec<BigInt> = Vec::new();
    for g in groups {
        factors.extend(g.invariant_factors().iter().cloned());
    }
    // reuse subquotient to renormalize into a divisibility chain
    let k = factors.len();
    if k == 0 {
        return FiniteAbelianGroup::trivial(0);
    }
    let mut d = IntMat::zeros(k, k);
    for (i, f) in factors.iter().enumerate() {
        d.set(i, i, f.clone());
    }
    subquotient(SubquotientInput {
        l_basis: &IntMat::identity(k),
        relations: &d,
        ambient_dim: k,
        witness_lift: None,
        pre_select: None,
    })
    .expect("direct sum is always finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fab(fs: &[i64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_invariant_factors(fs.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn subquotient_basic() {
        // Z^2 / <(2,0),(0,4)> = Z/2 x Z/4
        let l = IntMat::identity(2);
        let r = IntMat::from_rows(&[vec![2, 0], vec![0, 4]]);
        let g = subquotient(SubquotientInput {
            l_basis: &l,
            relations: &r,
            ambient_dim: 2,
            witness_lift: None,
            pre_select: None,
        })
        .unwrap();
        assert_eq!(g.text(), "Z/2 x Z/4");
        assert_eq!(g.order(), BigInt::from(8));
        // each witness has the stated order
        for (w, d) in g.generator_witnesses().iter().zip(g.invariant_factors()) {
            let scaled: Vec<BigInt> = w.iter().map(|x| x * d).collect();
            let c = g.reduce(&scaled).unwrap();
            assert!(c.iter().all(|x| x.is_zero()));
            let c1 = g.reduce(w).unwrap();
            assert!(c1.iter().any(|x| !x.is_zero()));
        }
    }

    #[test]
    fn subquotient_rejects_free_part() {
        let l = IntMat::identity(2);
        let r = IntMat::from_rows(&[vec![2], vec![0]]);
        assert!(subquotient(SubquotientInput {
            l_basis: &l,
            relations: &r,
            ambient_dim: 2,
            witness_lift: None,
            pre_select: None,
        })
        .is_err());
    }

    #[test]
    fn kernel_and_image() {
        // hom Z/4 -> Z/4, x -> 2x: kernel Z/2, image Z/2
        let g = fab(&[4]);
        let h = AbelianHom {
            source: g.clone(),
            target: g.clone(),
            matrix: IntMat::from_rows(&[vec![2]]),
        };
        assert_eq!(kernel_of_hom(&h).unwrap().text(), "Z/2");
        assert_eq!(image_of_hom(&h).unwrap().text(), "Z/2");
    }

    #[test]
    fn direct_sum_normalizes() {
        let a = fab(&[2]);
        let b = fab(&[4]);
        let s = direct_sum(&[&a, &b]);
        assert_eq!(s.text(), "Z/2 x Z/4");
        let c = fab(&[2, 2]);
        let s2 = direct_sum(&[&c, &b]);
        assert_eq!(s2.order(), BigInt::from(16));
    }

    #[test]
    fn quotient_of_subgroups() {
        // inside Z/8: <2>/<4> = Z/2
        let g = fab(&[8]);
        let big = IntMat::from_rows(&[vec![2]]);
        let small = IntMat::from_rows(&[vec![4]]);
        assert_eq!(subgroup_quotient(&g, &big, &small).unwrap().text(), "Z/2");
    }
}
