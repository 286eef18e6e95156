//! Tate cohomology of Galois lattices in degrees -1, 0, 1, 2, with explicit
//! class representatives and restriction maps.
//!
//! Degree 1 uses the inhomogeneous cocycle model over the full element set
//! of the subgroup; kernels are cut in generator coordinates (a cocycle is
//! determined by its values on generators) and classes are reported in
//! full-element coordinates, so restriction is a coordinate projection.
//! Degree 2 is computed as degree 1 of a one-step dimension shift.

use crate::abelian::{subquotient, AbelianHom, FiniteAbelianGroup, SubquotientInput};
use crate::group::Subgroup;
use crate::lattice::{quotient_lattice, GaloisLattice, LatticeMap};
use crate::matrix::{self, IntMat, SnfTransforms};
use crate::Error;
use num_bigint::BigInt;
use std::collections::HashMap;

/// Degree-1 cohomology together with the data restriction maps need.
pub struct H1Model {
    pub subgroup: Subgroup,
    pub lattice: GaloisLattice,
    pub group: FiniteAbelianGroup,
}

/// Tate cohomology of `m` over the subgroup `h`.
pub fn tate(degree: i32, h: &Subgroup, m: &GaloisLattice) -> Result<FiniteAbelianGroup, Error> {
    match degree {
        -1 => tate_minus_one(h, m),
        0 => tate_zero(h, m),
        1 => Ok(h1(h, m)?.group),
        2 => {
            let (shifted, _) = dimension_shift(m)?;
            Ok(h1(h, &shifted)?.group)
        }
        d => Err(Error::BadDegree(d)),
    }
}

/// H^{-1}(h, M) = ker(N_h) / I_h M.
///
/// I_h M and ker(N_h) have the same rational span and ker(N_h) is exactly
/// the saturation of I_h M, so the group is the torsion of the augmentation
/// image: the nontrivial invariant factors of [a(s) - 1 | s in gens(h)].
fn tate_minus_one(h: &Subgroup, m: &GaloisLattice) -> Result<FiniteAbelianGroup, Error> {
    let r = m.rank();
    let gens = h.generating_set();
    if r == 0 || gens.is_empty() {
        return Ok(FiniteAbelianGroup::trivial(r));
    }
    let blocks: Vec<IntMat> = gens
        .iter()
        .map(|&s| m.action(s).sub(&IntMat::identity(r)))
        .collect();
    let j = IntMat::hstack_all(&blocks);
    let s = matrix::snf_owned(
        j.clone(),
        SnfTransforms {
            uinv: true,
            ..Default::default()
        },
    );
    let uinv = s.uinv.unwrap();
    let sat_idx: Vec<usize> = (0..s.rank).collect();
    let sat_basis = uinv.select_columns(&sat_idx);
    subquotient(SubquotientInput {
        l_basis: &sat_basis,
        relations: &j,
        ambient_dim: r,
        witness_lift: None,
        pre_select: None,
    })
}

/// H^0(h, M) = M^h / N_h M.
fn tate_zero(h: &Subgroup, m: &GaloisLattice) -> Result<FiniteAbelianGroup, Error> {
    let r = m.rank();
    if r == 0 {
        return Ok(FiniteAbelianGroup::trivial(0));
    }
    let fixed = crate::lattice::fixed_sublattice(m, h);
    let norm = m.norm_matrix(h);
    subquotient(SubquotientInput {
        l_basis: &fixed,
        relations: &norm,
        ambient_dim: r,
        witness_lift: None,
        pre_select: None,
    })
}

/// Cocycle-model H^1(h, M), with classes in full-element coordinates
/// (ambient dimension |h| * rank, blocks ordered by the sorted element
/// list of h).
pub fn h1(h: &Subgroup, m: &GaloisLattice) -> Result<H1Model, Error> {
    assert!(m.group().same_group(h.parent()));
    let r = m.rank();
    let elements = h.elements().to_vec();
    let ambient = elements.len() * r;
    let gens = h.generating_set();
    if r == 0 || gens.is_empty() {
        return Ok(H1Model {
            subgroup: h.clone(),
            lattice: m.clone(),
            group: FiniteAbelianGroup::trivial(ambient),
        });
    }
    let pos: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let gen_dim = gens.len() * r;

    // E[x]: rank x gen_dim matrix expressing c(x) from the generator values,
    // by breadth-first extension c(s x) = c(s) + a(s) c(x).
    let g = h.parent();
    let mut expand: HashMap<usize, IntMat> = HashMap::new();
    expand.insert(0, IntMat::zeros(r, gen_dim));
    let mut queue: std::collections::VecDeque<usize> = [0usize].into();
    while let Some(x) = queue.pop_front() {
        let ex = expand[&x].clone();
        for (gi, &s) in gens.iter().enumerate() {
            let y = g.mul(s, x);
            if expand.contains_key(&y) {
                continue;
            }
            let mut block = m.action(s).mul(&ex);
            // add the selector for c(s)
            for i in 0..r {
                let v = block.get(i, gi * r + i) + 1;
                block.set(i, gi * r + i, v);
            }
            expand.insert(y, block);
            queue.push_back(y);
        }
    }
    debug_assert_eq!(expand.len(), elements.len());

    // cocycle conditions c(st) = c(s) + a(s) c(t) for s in gens, t in h
    let mut cond_blocks: Vec<IntMat> = Vec::new();
    for &s in &gens {
        let es = &expand[&s];
        let act = m.action(s);
        for &t in &elements {
            if t == 0 {
                continue;
            }
            let st = g.mul(s, t);
            let block = expand[&st].sub(es).sub(&act.mul(&expand[&t]));
            if !block.is_zero() {
                cond_blocks.push(block);
            }
        }
    }
    let z_basis = if cond_blocks.is_empty() {
        IntMat::identity(gen_dim)
    } else {
        matrix::kernel_owned(IntMat::vstack_all(&cond_blocks))
    };
    drop(cond_blocks);

    // coboundaries in generator coordinates: m |-> ((a(s) - 1) m)_s
    let b_blocks: Vec<IntMat> = gens
        .iter()
        .map(|&s| m.action(s).sub(&IntMat::identity(r)))
        .collect();
    let b = IntMat::vstack_all(&b_blocks);

    let gen_group = subquotient(SubquotientInput {
        l_basis: &z_basis,
        relations: &b,
        ambient_dim: gen_dim,
        witness_lift: None,
        pre_select: None,
    })?;

    // lift witnesses to full-element coordinates and select generator
    // coordinates for reduction
    let witnesses: Vec<Vec<BigInt>> = gen_group
        .generator_witnesses()
        .iter()
        .map(|w| {
            let mut full = vec![BigInt::from(0); ambient];
            for (i, &e) in elements.iter().enumerate() {
                let c = expand[&e].mul_vec(w);
                full[i * r..(i + 1) * r].clone_from_slice(&c);
            }
            full
        })
        .collect();
    let select: Vec<usize> = gens
        .iter()
        .flat_map(|s| {
            let p = pos[s];
            (p * r..(p + 1) * r).collect::<Vec<_>>()
        })
        .collect();
    let group = gen_group.relocate(ambient, witnesses, select);
    Ok(H1Model {
        subgroup: h.clone(),
        lattice: m.clone(),
        group,
    })
}

/// Restriction H^1(h_big, M) -> H^1(h_small, M): projection of cocycle
/// coordinates onto the elements of the smaller subgroup.
pub fn restriction(big: &H1Model, small: &H1Model) -> Result<AbelianHom, Error> {
    if !big.subgroup.contains(&small.subgroup) {
        return Err(Error::BadSubgroup(
            "restriction: subgroup is not contained in the source".into(),
        ));
    }
    let r = big.lattice.rank();
    let big_pos: HashMap<usize, usize> = big
        .subgroup
        .elements()
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    let k_src = big.group.num_generators();
    let k_tgt = small.group.num_generators();
    let mut mat = IntMat::zeros(k_tgt, k_src);
    for (j, w) in big.group.generator_witnesses().iter().enumerate() {
        let mut v = vec![BigInt::from(0); small.subgroup.order() * r];
        for (i, &e) in small.subgroup.elements().iter().enumerate() {
            let p = big_pos[&e];
            v[i * r..(i + 1) * r].clone_from_slice(&w[p * r..(p + 1) * r]);
        }
        let c = small.group.reduce(&v)?;
        for (i, ci) in c.into_iter().enumerate() {
            mat.set(i, j, ci);
        }
    }
    Ok(AbelianHom {
        source: big.group.clone(),
        target: small.group.clone(),
        matrix: mat,
    })
}

/// One-step dimension shift: 0 -> M -> Z[g] (x) M -> M1 -> 0 with the middle
/// term free over every subgroup, so H^2(h, M) = H^1(h, M1) for all h.
/// Returns M1 and the embedding.
pub fn dimension_shift(m: &GaloisLattice) -> Result<(GaloisLattice, LatticeMap), Error> {
    let g = m.group().clone();
    let n = g.order();
    let r = m.rank();
    if r == 0 {
        let zero = GaloisLattice::trivial(g.clone(), 0);
        let map = LatticeMap {
            source: m.clone(),
            target: zero.clone(),
            matrix: IntMat::zeros(0, 0),
        };
        return Ok((zero, map));
    }
    // middle term: blocks indexed by group elements, action permutes blocks
    let mid_rank = n * r;
    let acts: Vec<IntMat> = g
        .generators()
        .iter()
        .map(|&s| {
            let mut a = IntMat::zeros(mid_rank, mid_rank);
            for x in 0..n {
                let y = g.mul(s, x);
                for i in 0..r {
                    a.set(y * r + i, x * r + i, BigInt::from(1));
                }
            }
            a
        })
        .collect();
    let mid = GaloisLattice::new_trusted(g.clone(), mid_rank, acts, true);
    // embedding m |-> sum_s s (x) s^{-1} m: block s is a(s^{-1})
    let blocks: Vec<IntMat> = (0..n).map(|s| (*m.action(g.inv(s))).clone()).collect();
    let embed = IntMat::vstack_all(&blocks);
    let (m1, _proj) = quotient_lattice(&mid, &embed)?;
    let map = LatticeMap {
        source: m.clone(),
        target: mid,
        matrix: embed,
    };
    Ok((m1, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{subgroup_classes, FiniteGroup};
    use crate::lattice::{norm_one_torus_lattice, permutation_lattice, regular_lattice};
    use num_bigint::BigInt;
    use num_traits::Zero;

    fn klein_four() -> FiniteGroup {
        FiniteGroup::from_cycle_strings(&["(1 2)".into(), "(3 4)".into()]).unwrap()
    }

    fn c2() -> FiniteGroup {
        FiniteGroup::from_cycle_strings(&["(1 2)".into()]).unwrap()
    }

    #[test]
    fn h0_of_trivial_lattice_is_z_mod_order() {
        for g in [klein_four(), FiniteGroup::from_cycle_strings(&["(1 2 3)".into()]).unwrap()] {
            let l = GaloisLattice::trivial(g.clone(), 1);
            let t = tate(0, &g.full_subgroup(), &l).unwrap();
            assert_eq!(t.order(), BigInt::from(g.order()));
        }
    }

    #[test]
    fn h_minus_one_of_sign_lattice() {
        let g = c2();
        let (sign, _) = norm_one_torus_lattice(&g);
        let t = tate(-1, &g.full_subgroup(), &sign).unwrap();
        assert_eq!(t.text(), "Z/2");
        // cyclic periodicity: H^1 agrees with H^{-1}
        let t1 = tate(1, &g.full_subgroup(), &sign).unwrap();
        assert_eq!(t1.text(), "Z/2");
    }

    #[test]
    fn h1_of_z_over_c2_is_trivial_and_h1_sign_dual() {
        // H^1(Z/2, Z) = Hom(Z/2, Z) = 0; H^1(Z/2, sign) = Z/2
        let g = c2();
        let t = tate(1, &g.full_subgroup(), &GaloisLattice::trivial(g.clone(), 1)).unwrap();
        assert!(t.is_trivial());
        let (sign, _) = norm_one_torus_lattice(&g);
        // H^1(Z/2, sign) = Z/2 (periodicity with H^{-1})
        let d = sign.dual();
        let t1 = tate(1, &g.full_subgroup(), &d).unwrap();
        assert_eq!(t1.text(), "Z/2");
    }

    #[test]
    fn shapiro_vanishing_on_klein_four() {
        let g = klein_four();
        let classes = subgroup_classes(&g);
        for hprime in &classes {
            let l = permutation_lattice(&g, hprime);
            for h in &classes {
                let t = tate(1, h, &l).unwrap();
                assert!(t.is_trivial(), "H^1({:?}, Z[g/{:?}]) nontrivial", h.elements(), hprime.elements());
            }
        }
    }

    #[test]
    fn regular_lattice_acyclic_all_degrees() {
        let g = klein_four();
        let l = regular_lattice(&g);
        for h in subgroup_classes(&g) {
            for d in [-1, 0, 1, 2] {
                let t = tate(d, &h, &l).unwrap();
                assert!(t.is_trivial(), "degree {d} over {:?}", h.elements());
            }
        }
    }

    #[test]
    fn h2_of_z_over_klein_four() {
        // H^2(V4, Z) = Hom(V4, Q/Z) = (Z/2)^2
        let g = klein_four();
        let l = GaloisLattice::trivial(g.clone(), 1);
        let t = tate(2, &g.full_subgroup(), &l).unwrap();
        assert_eq!(t.text(), "Z/2 x Z/2");
    }

    #[test]
    fn h2_of_z_over_cyclic_is_z_mod_n() {
        // periodicity: H^2(Z/n, Z) = H^0 = Z/n
        let g = FiniteGroup::from_cycle_strings(&["(1 2 3 4)".into()]).unwrap();
        let l = GaloisLattice::trivial(g.clone(), 1);
        let t = tate(2, &g.full_subgroup(), &l).unwrap();
        assert_eq!(t.text(), "Z/4");
    }

    #[test]
    fn dimension_shift_shape() {
        let g = klein_four();
        let (norm_one, _) = norm_one_torus_lattice(&g);
        let (m1, emb) = dimension_shift(&norm_one).unwrap();
        assert_eq!(m1.rank(), (g.order() - 1) * norm_one.rank());
        assert!(emb.is_equivariant());
        assert!(matrix::is_saturated(&emb.matrix));
    }

    #[test]
    fn restriction_identity_and_to_trivial() {
        let g = klein_four();
        let l = GaloisLattice::trivial(g.clone(), 1);
        let (m1, _) = dimension_shift(&l).unwrap();
        let full = g.full_subgroup();
        let big = h1(&full, &m1).unwrap();
        let same = h1(&full, &m1).unwrap();
        let id = restriction(&big, &same).unwrap();
        assert!(id.same_map(&AbelianHom::identity(&big.group)));
        let triv = h1(&g.trivial_subgroup(), &m1).unwrap();
        let z = restriction(&big, &triv).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn restriction_functorial_on_chain() {
        // V4 >= <a> >= 1 with a nontrivial module
        let g = klein_four();
        let (norm_one, _) = norm_one_torus_lattice(&g);
        let (m1, _) = dimension_shift(&norm_one).unwrap();
        let full = g.full_subgroup();
        let mid = g.subgroup(&[0, 1]).unwrap();
        let triv = g.trivial_subgroup();
        let h_full = h1(&full, &m1).unwrap();
        let h_mid = h1(&mid, &m1).unwrap();
        let h_triv = h1(&triv, &m1).unwrap();
        let a = restriction(&h_full, &h_mid).unwrap();
        let b = restriction(&h_mid, &h_triv).unwrap();
        let direct = restriction(&h_full, &h_triv).unwrap();
        assert!(b.compose(&a).same_map(&direct));
    }

    #[test]
    fn bad_degree_rejected() {
        let g = c2();
        let l = GaloisLattice::trivial(g.clone(), 1);
        assert!(tate(3, &g.full_subgroup(), &l).is_err());
        assert!(tate(-2, &g.full_subgroup(), &l).is_err());
    }

    #[test]
    fn witnesses_are_cocycles_with_stated_order() {
        let g = klein_four();
        let (norm_one, _) = norm_one_torus_lattice(&g);
        let (m1, _) = dimension_shift(&norm_one).unwrap();
        let model = h1(&g.full_subgroup(), &m1).unwrap();
        for (w, d) in model
            .group
            .generator_witnesses()
            .iter()
            .zip(model.group.invariant_factors())
        {
            let c = model.group.reduce(w).unwrap();
            assert!(c.iter().any(|x| !x.is_zero()));
            let scaled: Vec<BigInt> = w.iter().map(|x| x * d).collect();
            let c0 = model.group.reduce(&scaled).unwrap();
            assert!(c0.iter().all(|x| x.is_zero()));
        }
    }
}
