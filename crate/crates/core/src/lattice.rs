//! Galois lattices: finite-rank integer lattices with an action of a finite
//! group, plus the constructions the resolution machinery needs
//! (permutation modules, duals, direct sums, fixed sublattices, quotients).

use crate::group::{FiniteGroup, Subgroup};
use crate::matrix::{self, IntMat, SnfTransforms};
use crate::Error;
use num_bigint::BigInt;
use num_traits::One;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

struct LatticeData {
    group: FiniteGroup,
    rank: usize,
    /// Action matrices of the group generators, in the group's generator order.
    gen_actions: Vec<IntMat>,
    /// Lazily extended per-element actions (index -> matrix).
    cache: Mutex<HashMap<usize, Arc<IntMat>>>,
    /// Marks a permutation basis when one exists (e.g. coset labels).
    permutation_basis: bool,
}

/// A finite-rank integer lattice with a group action by unimodular matrices.
#[derive(Clone)]
pub struct GaloisLattice {
    data: Arc<LatticeData>,
}

impl std::fmt::Debug for GaloisLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "GaloisLattice(rank {}, |g| = {})",
            self.rank(),
            self.group().order()
        )
    }
}

/// An equivariant map of lattices, as a target.rank x source.rank matrix.
#[derive(Clone, Debug)]
pub struct LatticeMap {
    pub source: GaloisLattice,
    pub target: GaloisLattice,
    pub matrix: IntMat,
}

impl LatticeMap {
    /// matrix . action_source(s) = action_target(s) . matrix on generators.
    pub fn is_equivariant(&self) -> bool {
        let g = self.source.group();
        g.generators().iter().all(|&s| {
            self.matrix.mul(&self.source.action(s)) == self.target.action(s).mul(&self.matrix)
        })
    }
}

impl GaloisLattice {
    /// Build from generator actions; validates the homomorphism property
    /// against every Cayley relation and unimodularity of each generator.
    pub fn new(group: FiniteGroup, rank: usize, gen_actions: Vec<IntMat>) -> Result<Self, Error> {
        if gen_actions.len() != group.generators().len() {
            return Err(Error::BadLattice(format!(
                "expected {} generator matrices, got {}",
                group.generators().len(),
                gen_actions.len()
            )));
        }
        for m in &gen_actions {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::BadLattice("action matrix has wrong shape".into()));
            }
            if matrix::inverse_unimodular(m).is_none() {
                return Err(Error::BadLattice(
                    "action matrix is not unimodular".into(),
                ));
            }
        }
        let lat = GaloisLattice {
            data: Arc::new(LatticeData {
                group,
                rank,
                gen_actions,
                cache: Mutex::new(HashMap::new()),
                permutation_basis: false,
            }),
        };
        lat.check_homomorphism()?;
        Ok(lat)
    }

    pub(crate) fn new_trusted(
        group: FiniteGroup,
        rank: usize,
        gen_actions: Vec<IntMat>,
        perm: bool,
    ) -> Self {
        GaloisLattice {
            data: Arc::new(LatticeData {
                group,
                rank,
                gen_actions,
                cache: Mutex::new(HashMap::new()),
                permutation_basis: perm,
            }),
        }
    }

    fn check_homomorphism(&self) -> Result<(), Error> {
        let g = self.group().clone();
        // action extends consistently iff A(s)A(t) depends only on st;
        // verify over all Cayley relations among elements reached from
        // the generators (i.e. the whole group).
        let n = g.order();
        let mut acts: Vec<Option<Arc<IntMat>>> = vec![None; n];
        acts[0] = Some(Arc::new(IntMat::identity(self.rank())));
        // BFS assignment
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            let ax = acts[x].clone().unwrap();
            for (gi, &s) in g.generators().iter().enumerate() {
                let y = g.mul(s, x);
                let m = self.data.gen_actions[gi].mul(&ax);
                match &acts[y] {
                    None => {
                        acts[y] = Some(Arc::new(m));
                        frontier.push(y);
                    }
                    Some(existing) => {
                        if **existing != m {
                            return Err(Error::BadLattice(
                                "generator actions violate a Cayley relation".into(),
                            ));
                        }
                    }
                }
            }
        }
        if acts.iter().any(|a| a.is_none()) {
            return Err(Error::BadLattice("generators do not reach the group".into()));
        }
        // full verification: A(s)A(t) = A(st) over the whole table
        for s in 0..n {
            for t in 0..n {
                let st = g.mul(s, t);
                let lhs = acts[s].as_ref().unwrap().mul(acts[t].as_ref().unwrap());
                if lhs != **acts[st].as_ref().unwrap() {
                    return Err(Error::BadLattice(
                        "action is not a group homomorphism".into(),
                    ));
                }
            }
        }
        let mut cache = self.data.cache.lock().unwrap();
        for (i, a) in acts.into_iter().enumerate() {
            cache.insert(i, a.unwrap());
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.data.group
    }

    pub fn rank(&self) -> usize {
        self.data.rank
    }

    pub fn has_permutation_basis(&self) -> bool {
        self.data.permutation_basis
    }

    pub fn generator_actions(&self) -> &[IntMat] {
        &self.data.gen_actions
    }

    /// Action matrix of an arbitrary element, extended along the Cayley
    /// table from the generators and memoized.
    pub fn action(&self, elem: usize) -> Arc<IntMat> {
        {
            let cache = self.data.cache.lock().unwrap();
            if let Some(m) = cache.get(&elem) {
                return m.clone();
            }
        }
        if elem == 0 {
            let m = Arc::new(IntMat::identity(self.rank()));
            self.data.cache.lock().unwrap().insert(0, m.clone());
            return m;
        }
        // BFS from identity until the element is reached
        let g = self.group();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; g.order()];
        let mut seen = vec![false; g.order()];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(0usize);
        'bfs: while let Some(x) = queue.pop_front() {
            for (gi, &s) in g.generators().iter().enumerate() {
                let y = g.mul(s, x);
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, gi));
                    if y == elem {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        // unwind the path: elem = s_k ... s_1, A(elem) = A(s_k) ... A(s_1)
        let mut path: Vec<usize> = Vec::new();
        let mut cur = elem;
        while cur != 0 {
            let (p, gi) = prev[cur].expect("generators generate the group");
            path.push(gi);
            cur = p;
        }
        // path is outermost-first, so accumulate from the innermost factor
        let mut m = IntMat::identity(self.rank());
        for &gi in path.iter().rev() {
            m = self.data.gen_actions[gi].mul(&m);
        }
        let m = Arc::new(m);
        self.data.cache.lock().unwrap().insert(elem, m.clone());
        m
    }

    /// Norm matrix of a subgroup: sum of the actions of its elements.
    pub fn norm_matrix(&self, h: &Subgroup) -> IntMat {
        let mut n = IntMat::zeros(self.rank(), self.rank());
        for &s in h.elements() {
            n = n.add(&self.action(s));
        }
        n
    }

    /// Trivial action of rank n.
    pub fn trivial(group: FiniteGroup, rank: usize) -> GaloisLattice {
        let gens = group.generators().len();
        let acts = vec![IntMat::identity(rank); gens];
        GaloisLattice::new_trusted(group, rank, acts, true)
    }

    /// Direct sum with blockwise action.
    pub fn direct_sum(parts: &[&GaloisLattice]) -> GaloisLattice {
        assert!(!parts.is_empty());
        let group = parts[0].group().clone();
        for p in parts {
            assert!(p.group().same_group(&group));
        }
        let rank = parts.iter().map(|p| p.rank()).sum();
        let acts: Vec<IntMat> = (0..group.generators().len())
            .map(|gi| {
                let blocks: Vec<IntMat> = parts
                    .iter()
                    .map(|p| p.generator_actions()[gi].clone())
                    .collect();
                IntMat::block_diag(&blocks)
            })
            .collect();
        let perm = parts.iter().all(|p| p.has_permutation_basis());
        GaloisLattice::new_trusted(group, rank, acts, perm)
    }

    /// Contragredient: action(s) of the dual is transpose(action(s^{-1})).
    pub fn dual(&self) -> GaloisLattice {
        let g = self.group().clone();
        let acts: Vec<IntMat> = g
            .generators()
            .iter()
            .map(|&s| self.action(g.inv(s)).transpose())
            .collect();
        GaloisLattice::new_trusted(g, self.rank(), acts, self.data.permutation_basis)
    }

    /// Conjugate lattice with action u^{-1} A(s) u (same module, new basis).
    pub fn conjugate(&self, u: &IntMat) -> Result<GaloisLattice, Error> {
        let uinv = matrix::inverse_unimodular(u)
            .ok_or_else(|| Error::BadLattice("conjugating matrix is not unimodular".into()))?;
        let acts: Vec<IntMat> = self
            .generator_actions()
            .iter()
            .map(|a| uinv.mul(a).mul(u))
            .collect();
        Ok(GaloisLattice::new_trusted(
            self.group().clone(),
            self.rank(),
            acts,
            false,
        ))
    }
}

/// The induced lattice Z[g/h]: basis = left cosets, action by translation.
pub fn permutation_lattice(g: &FiniteGroup, h: &Subgroup) -> GaloisLattice {
    assert!(g.same_group(h.parent()));
    let cosets = left_cosets(g, h);
    let coset_index: HashMap<usize, usize> = cosets
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&x| (x, i)))
        .collect();
    let rank = cosets.len();
    let acts: Vec<IntMat> = g
        .generators()
        .iter()
        .map(|&s| {
            let mut m = IntMat::zeros(rank, rank);
            for (j, c) in cosets.iter().enumerate() {
                let image = coset_index[&g.mul(s, c[0])];
                m.set(image, j, BigInt::one());
            }
            m
        })
        .collect();
    GaloisLattice::new_trusted(g.clone(), rank, acts, true)
}

/// Left cosets of h in g, each sorted, ordered by smallest element
/// (so the identity coset comes first).
pub fn left_cosets(g: &FiniteGroup, h: &Subgroup) -> Vec<Vec<usize>> {
    let mut assigned = vec![false; g.order()];
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for x in 0..g.order() {
        if assigned[x] {
            continue;
        }
        let mut c: Vec<usize> = h.elements().iter().map(|&s| g.mul(x, s)).collect();
        c.sort_unstable();
        for &m in &c {
            assigned[m] = true;
        }
        cosets.push(c);
    }
    cosets.sort();
    cosets
}

/// The regular lattice Z[g].
pub fn regular_lattice(g: &FiniteGroup) -> GaloisLattice {
    permutation_lattice(g, &g.trivial_subgroup())
}

/// Quotient of `l` by the saturated, stable sublattice spanned by the
/// columns of `embedding`. Returns the quotient and the projection map,
/// realized by Hermite/Smith completion of the sublattice to a basis.
pub fn quotient_lattice(
    l: &GaloisLattice,
    embedding: &IntMat,
) -> Result<(GaloisLattice, LatticeMap), Error> {
    let n = l.rank();
    assert_eq!(embedding.rows(), n);
    let m = embedding.cols();
    let s = matrix::snf(
        embedding,
        SnfTransforms {
            u: true,
            uinv: true,
            ..Default::default()
        },
    );
    if s.rank != m || !s.invariant_factors().iter().all(|d| d.is_one()) {
        return Err(Error::BadLattice(
            "quotient: sublattice is not saturated or not full column rank".into(),
        ));
    }
    let u = s.u.unwrap();
    let uinv = s.uinv.unwrap();
    // image of embedding = span of first m columns of uinv; quotient
    // coordinates are the last n-m rows of u.
    let proj_rows: Vec<usize> = (m..n).collect();
    let proj = u.select_rows(&proj_rows);
    let sect = uinv.select_columns(&proj_rows);
    let acts: Vec<IntMat> = l
        .generator_actions()
        .iter()
        .map(|a| proj.mul(a).mul(&sect))
        .collect();
    // stability check: the projected action must intertwine with proj
    let q = GaloisLattice::new_trusted(l.group().clone(), n - m, acts, false);
    for (gi, a) in l.generator_actions().iter().enumerate() {
        if proj.mul(a) != q.generator_actions()[gi].mul(&proj) {
            return Err(Error::BadLattice(
                "quotient: sublattice is not stable under the action".into(),
            ));
        }
    }
    let map = LatticeMap {
        source: l.clone(),
        target: q.clone(),
        matrix: proj,
    };
    Ok((q, map))
}

/// Character lattice of the norm-one torus: Z[g]/(norm element), together
/// with the defining surjection Z[g] -> T_hat.
pub fn norm_one_torus_lattice(g: &FiniteGroup) -> (GaloisLattice, LatticeMap) {
    let reg = regular_lattice(g);
    let norm = IntMat::from_fn(g.order(), 1, |_, _| BigInt::one());
    quotient_lattice(&reg, &norm).expect("norm vector is saturated and stable")
}

/// Z-basis of the h-fixed sublattice, as columns; saturated and
/// HNF-canonical for reproducibility.
pub fn fixed_sublattice(l: &GaloisLattice, h: &Subgroup) -> IntMat {
    assert!(l.group().same_group(h.parent()));
    let gens = h.generating_set();
    if gens.is_empty() {
        return IntMat::identity(l.rank());
    }
    let stacked = IntMat::vstack_all(
        &gens
            .iter()
            .map(|&s| l.action(s).sub(&IntMat::identity(l.rank())))
            .collect::<Vec<_>>(),
    );
    matrix::column_hnf(&matrix::kernel(&stacked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{subgroup_classes, FiniteGroup};

    fn klein_four() -> FiniteGroup {
        FiniteGroup::from_cycle_strings(&["(1 2)".into(), "(3 4)".into()]).unwrap()
    }

    fn s3() -> FiniteGroup {
        FiniteGroup::from_cycle_strings(&["(1 2 3)".into(), "(1 2)".into()]).unwrap()
    }

    #[test]
    fn permutation_lattice_ranks() {
        let g = s3();
        for h in subgroup_classes(&g) {
            let l = permutation_lattice(&g, &h);
            assert_eq!(l.rank() * h.order(), g.order());
            assert!(l.has_permutation_basis());
            // action matrices are permutation matrices
            for &s in g.generators() {
                let a = l.action(s);
                for j in 0..l.rank() {
                    let ones = (0..l.rank()).filter(|&i| a.get(i, j).is_one()).count();
                    assert_eq!(ones, 1);
                }
            }
        }
        let h2 = subgroup_classes(&g).into_iter().find(|h| h.order() == 2).unwrap();
        assert_eq!(permutation_lattice(&g, &h2).rank(), 3);
    }

    #[test]
    fn regular_lattice_of_klein_four() {
        let g = klein_four();
        let l = regular_lattice(&g);
        assert_eq!(l.rank(), 4);
    }

    #[test]
    fn norm_one_ranks_and_sign_action() {
        let g1 = FiniteGroup::trivial();
        let (l1, _) = norm_one_torus_lattice(&g1);
        assert_eq!(l1.rank(), 0);

        let g2 = FiniteGroup::from_cycle_strings(&["(1 2)".into()]).unwrap();
        let (l2, surj) = norm_one_torus_lattice(&g2);
        assert_eq!(l2.rank(), 1);
        assert!(surj.is_equivariant());
        // the generator acts as -1
        let a = l2.action(1);
        assert_eq!(*a.get(0, 0), BigInt::from(-1));

        let g4 = klein_four();
        let (l4, surj4) = norm_one_torus_lattice(&g4);
        assert_eq!(l4.rank(), 3);
        assert!(surj4.is_equivariant());
        for s in 0..4 {
            let a = l4.action(s);
            let a2 = a.mul(&a);
            assert!(a2.is_identity(), "order dividing 2");
            assert!(matrix::inverse_unimodular(&a).is_some());
        }
    }

    #[test]
    fn dual_is_involution() {
        let g = s3();
        let h2 = subgroup_classes(&g).into_iter().find(|h| h.order() == 2).unwrap();
        let l = permutation_lattice(&g, &h2);
        let dd = l.dual().dual();
        for (a, b) in l.generator_actions().iter().zip(dd.generator_actions()) {
            assert_eq!(a, b);
        }
        // trivial lattice is self-dual
        let t = GaloisLattice::trivial(g.clone(), 3);
        for (a, b) in t.generator_actions().iter().zip(t.dual().generator_actions()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn sign_lattice_self_dual() {
        let g = FiniteGroup::from_cycle_strings(&["(1 2)".into()]).unwrap();
        let (sign, _) = norm_one_torus_lattice(&g);
        let d = sign.dual();
        assert_eq!(sign.generator_actions()[0], d.generator_actions()[0]);
    }

    #[test]
    fn fixed_sublattices() {
        let g = klein_four();
        let reg = regular_lattice(&g);
        // trivial subgroup: everything fixed
        let f = fixed_sublattice(&reg, &g.trivial_subgroup());
        assert_eq!(f.cols(), 4);
        // full group on the regular lattice: the norm line
        let f = fixed_sublattice(&reg, &g.full_subgroup());
        assert_eq!(f.cols(), 1);
        assert!((0..4).all(|i| f.get(i, 0).is_one()));
        assert!(matrix::is_saturated(&f));
        // sign lattice over Z/2 has no fixed vectors
        let c2 = FiniteGroup::from_cycle_strings(&["(1 2)".into()]).unwrap();
        let (sign, _) = norm_one_torus_lattice(&c2);
        let f = fixed_sublattice(&sign, &c2.full_subgroup());
        assert_eq!(f.cols(), 0);
    }

    #[test]
    fn action_homomorphism_checked() {
        let g = klein_four();
        // bogus: both generators act as a single swap on rank 2, fails the
        // relation (s t)^2 = 1? actually swap^2 = id, so this IS a valid
        // non-faithful action; check it is accepted
        let swap = IntMat::from_rows(&[vec![0, 1], vec![1, 0]]);
        let ok = GaloisLattice::new(g.clone(), 2, vec![swap.clone(), swap.clone()]);
        assert!(ok.is_ok());
        // order-3-ish matrix over Klein four violates s^2 = 1
        let bad = IntMat::from_rows(&[vec![0, -1], vec![1, -1]]);
        assert!(GaloisLattice::new(g, 2, vec![bad.clone(), bad]).is_err());
    }

    #[test]
    fn lazy_action_is_a_homomorphism_over_s3() {
        // norm-one over a non-abelian group: the quotient construction
        // yields a trusted lattice whose non-generator actions are built
        // lazily; composition order matters here
        let g = FiniteGroup::from_cycle_strings(&["(1 2)".into(), "(1 2 3)".into()]).unwrap();
        let (t, _) = norm_one_torus_lattice(&g);
        let n = g.order();
        for s in 0..n {
            for u in 0..n {
                assert_eq!(*t.action(g.mul(s, u)), t.action(s).mul(&t.action(u)));
            }
        }
    }

    #[test]
    fn quotient_rejects_unsaturated() {
        let g = FiniteGroup::trivial();
        let l = GaloisLattice::trivial(g, 2);
        let e = IntMat::from_rows(&[vec![2], vec![0]]);
        assert!(quotient_lattice(&l, &e).is_err());
    }
}
