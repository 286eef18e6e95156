//! Seeded random inputs for the verification suites: groups drawn from a
//! fixed menu of permutation presentations, lattices assembled from
//! cohomologically interesting blocks and conjugated by random unimodular
//! matrices, and random place lists.

use crate::arithmetic::{BadPlace, PlacesSpec};
use crate::group::{subgroup_classes, FiniteGroup};
use crate::lattice::{left_cosets, permutation_lattice, quotient_lattice, GaloisLattice};
use crate::matrix::IntMat;
use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Fixed menu of groups by order. (Z/2)^4 is deliberately absent: its
/// subgroup lattice is far larger than anything else of order 16.
pub fn group_menu() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("Z/4", vec!["(1 2 3 4)"]),
        ("V4", vec!["(1 2)", "(3 4)"]),
        ("Z/6", vec!["(1 2 3 4 5 6)"]),
        ("S3", vec!["(1 2)", "(1 2 3)"]),
        ("Z/8", vec!["(1 2 3 4 5 6 7 8)"]),
        ("D4", vec!["(1 2 3 4)", "(1 3)"]),
        ("Q8", vec!["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"]),
        ("Z/2xZ/4", vec!["(1 2)", "(3 4 5 6)"]),
        ("Z/12", vec!["(1 2 3 4 5 6 7 8 9 10 11 12)"]),
        ("A4", vec!["(1 2 3)", "(1 2)(3 4)"]),
        ("D6", vec!["(1 2 3 4 5 6)", "(2 6)(3 5)"]),
        ("Z/16", vec!["(1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16)"]),
        ("D8", vec!["(1 2 3 4 5 6 7 8)", "(2 8)(3 7)(4 6)"]),
        ("Z/4xZ/4", vec!["(1 2 3 4)", "(5 6 7 8)"]),
        ("Z/2xZ/8", vec!["(1 2)", "(3 4 5 6 7 8 9 10)"]),
        ("Z/2xD4", vec!["(1 2)", "(3 4 5 6)", "(3 5)"]),
    ]
}

pub fn random_group<R: Rng>(rng: &mut R, orders: &[usize]) -> (String, FiniteGroup) {
    let menu: Vec<(String, FiniteGroup)> = group_menu()
        .into_iter()
        .map(|(name, gens)| {
            let strings: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
            let g = FiniteGroup::from_cycle_strings(&strings).expect("menu entry is valid");
            (name.to_string(), g)
        })
        .filter(|(_, g)| orders.contains(&g.order()))
        .collect();
    assert!(!menu.is_empty(), "no menu group with the requested orders");
    let i = rng.gen_range(0..menu.len());
    menu[i].clone()
}

/// Random unimodular matrix: a short word in elementary shears and signed
/// permutations, kept short so entries stay small.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMat {
    let mut u = IntMat::identity(n);
    if n < 2 {
        return u;
    }
    for _ in 0..(2 * n) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..4) {
            0 | 1 => {
                // row_i += +-row_j
                let plus = rng.gen_bool(0.5);
                for c in 0..n {
                    let v = if plus {
                        u.get(i, c) + u.get(j, c)
                    } else {
                        u.get(i, c) - u.get(j, c)
                    };
                    u.set(i, c, v);
                }
            }
            2 => {
                for c in 0..n {
                    let a = u.get(i, c).clone();
                    let b = u.get(j, c).clone();
                    u.set(i, c, b);
                    u.set(j, c, a);
                }
            }
            _ => {
                for c in 0..n {
                    let v = -u.get(i, c);
                    u.set(i, c, v);
                }
            }
        }
    }
    u
}

/// The norm-line quotient of Z[g/h]: the cokernel of the all-ones fixed
/// vector, rank index - 1.
fn coset_quotient_block(g: &FiniteGroup, h_elems: &[usize]) -> GaloisLattice {
    let h = g.subgroup(h_elems).expect("class element set is closed");
    let perm = permutation_lattice(g, &h);
    let ones = IntMat::from_fn(perm.rank(), 1, |_, _| BigInt::from(1));
    quotient_lattice(&perm, &ones)
        .expect("norm line is stable and saturated")
        .0
}

/// Rank-1 lattices with action by signs (quadratic characters of g).
fn sign_characters(g: &FiniteGroup) -> Vec<GaloisLattice> {
    let k = g.generators().len();
    let mut out = vec![];
    for mask in 1..(1usize << k) {
        let acts: Vec<IntMat> = (0..k)
            .map(|i| {
                let s = if mask >> i & 1 == 1 { -1 } else { 1 };
                IntMat::from_rows(&[vec![s]])
            })
            .collect();
        if let Ok(l) = GaloisLattice::new(g.clone(), 1, acts) {
            out.push(l);
        }
    }
    out
}

/// Random lattice of rank <= max_rank: a direct sum of blocks (trivial
/// lines, quadratic characters, coset permutation lattices and their
/// norm-line quotients), conjugated by a random unimodular matrix.
pub fn random_lattice<R: Rng>(rng: &mut R, g: &FiniteGroup, max_rank: usize) -> GaloisLattice {
    assert!(max_rank >= 1);
    let target = rng.gen_range(1..=max_rank);
    let classes = subgroup_classes(g);
    let signs = sign_characters(g);
    let mut blocks: Vec<GaloisLattice> = vec![];
    let mut used = 0usize;
    while used < target {
        let budget = target - used;
        // candidate block kinds that fit the remaining budget
        let mut cands: Vec<GaloisLattice> = vec![GaloisLattice::trivial(g.clone(), 1)];
        if !signs.is_empty() {
            cands.push(signs[rng.gen_range(0..signs.len())].clone());
        }
        for h in &classes {
            let index = left_cosets(g, h).len();
            if index >= 2 && index <= budget {
                cands.push(permutation_lattice(g, h));
            }
            if index >= 2 && index - 1 <= budget {
                cands.push(coset_quotient_block(g, h.elements()));
            }
        }
        let pick = cands.swap_remove(rng.gen_range(0..cands.len()));
        used += pick.rank();
        blocks.push(pick);
    }
    let refs: Vec<&GaloisLattice> = blocks.iter().collect();
    let sum = GaloisLattice::direct_sum(&refs);
    let u = random_unimodular(rng, sum.rank());
    sum.conjugate(&u).expect("conjugation by unimodular basis change")
}

/// Random place list: a subset of the non-cyclic subgroup classes, plus
/// occasionally a redundant cyclic place.
pub fn random_places<R: Rng>(rng: &mut R, g: &FiniteGroup) -> PlacesSpec {
    let mut bad_places = vec![];
    let mut idx = 0;
    for h in subgroup_classes(g) {
        let keep = if h.is_cyclic() {
            rng.gen_bool(0.1)
        } else {
            rng.gen_bool(0.5)
        };
        if keep {
            bad_places.push(BadPlace {
                label: format!("v{}", idx),
                subgroup: h,
            });
            idx += 1;
        }
    }
    PlacesSpec { bad_places }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix;

    #[test]
    fn menu_orders_and_structure() {
        let mut orders = std::collections::HashSet::new();
        for (name, gens) in group_menu() {
            let strings: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
            let g = FiniteGroup::from_cycle_strings(&strings).unwrap();
            orders.insert(g.order());
            if name == "Q8" {
                assert_eq!(g.order(), 8);
                let involutions = (1..8).filter(|&x| g.element_order(x) == 2).count();
                assert_eq!(involutions, 1, "Q8 has a unique involution");
            }
            if name == "A4" {
                assert_eq!(g.order(), 12);
            }
        }
        for o in [4usize, 6, 8, 12, 16] {
            assert!(orders.contains(&o));
        }
    }

    #[test]
    fn random_unimodular_has_det_pm_one() {
        let mut r = rng(7);
        for n in 1..=6 {
            let u = random_unimodular(&mut r, n);
            assert!(matrix::inverse_unimodular(&u).is_some());
        }
    }

    #[test]
    fn random_lattices_are_valid_and_bounded() {
        let mut r = rng(11);
        for seed_round in 0..6 {
            let (_, g) = random_group(&mut r, &[4, 6, 8, 12, 16]);
            let l = random_lattice(&mut r, &g, 6);
            assert!(l.rank() >= 1 && l.rank() <= 6, "round {seed_round}");
            // revalidate the action as a homomorphism
            GaloisLattice::new(g.clone(), l.rank(), l.generator_actions().to_vec()).unwrap();
        }
    }

    #[test]
    fn sampling_is_deterministic_for_a_seed() {
        let draw = |seed| {
            let mut r = rng(seed);
            let (name, g) = random_group(&mut r, &[8]);
            let l = random_lattice(&mut r, &g, 4);
            (name, l.generator_actions().to_vec())
        };
        assert_eq!(draw(3).0, draw(3).0);
        assert_eq!(draw(3).1, draw(3).1);
    }

    #[test]
    fn random_places_validate() {
        let mut r = rng(5);
        for _ in 0..5 {
            let (_, g) = random_group(&mut r, &[8, 12, 16]);
            let p = random_places(&mut r, &g);
            p.validate(&g).unwrap();
        }
    }
}
