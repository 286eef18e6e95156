//! Finite groups as Cayley tables, with subgroup enumeration up to
//! conjugacy and cyclic/metacyclic classification.
//!
//! The group is the Galois group of the splitting field; its subgroups play
//! the role of decomposition groups. Element 0 is always the identity and
//! element ordering is breadth-first from the identity over the sorted
//! generators, so reports are reproducible.

use crate::Error;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

#[derive(Debug)]
struct GroupData {
    order: usize,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
    generators: Vec<usize>,
    /// Underlying permutations when the group was built from them.
    element_labels: Option<Vec<Vec<usize>>>,
}

/// A finite group with a full multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    data: Arc<GroupData>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Cyclic,
    Metacyclic,
    Other,
}

/// A subgroup, stored as a sorted element list of its parent.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: FiniteGroup,
    elements: Vec<usize>,
    classification: Classification,
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // (p ∘ q)(x) = p(q(x))
    q.iter().map(|&x| p[x]).collect()
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut r = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        r[pi] = i;
    }
    r
}

/// Parse cycle notation like "(1 2)(3 4)", 1-indexed, on `degree` points.
/// Commas are accepted as separators inside a cycle.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Vec<usize>, Error> {
    let mut perm: Vec<usize> = (0..degree).collect();
    let trimmed = s.trim();
    if trimmed.is_empty() || trimmed == "()" {
        return Ok(perm);
    }
    let mut seen: HashSet<usize> = HashSet::new();
    let mut rest = trimmed;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('(') {
            return Err(Error::BadPermutation(format!("expected '(' in {s:?}")));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| Error::BadPermutation(format!("unclosed cycle in {s:?}")))?;
        let body = &rest[1..close];
        rest = &rest[close + 1..];
        let points: Result<Vec<usize>, _> = body
            .split(|c: char| c == ' ' || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>())
            .collect();
        let points = points.map_err(|_| Error::BadPermutation(format!("bad point in {s:?}")))?;
        if points.is_empty() {
            continue;
        }
        for &p in &points {
            if p == 0 || p > degree {
                return Err(Error::BadPermutation(format!(
                    "point {p} out of range 1..={degree} in {s:?}"
                )));
            }
            if !seen.insert(p) {
                return Err(Error::BadPermutation(format!("point {p} repeated in {s:?}")));
            }
        }
        for i in 0..points.len() {
            let from = points[i] - 1;
            let to = points[(i + 1) % points.len()] - 1;
            perm[from] = to;
        }
    }
    Ok(perm)
}

/// Smallest degree that makes every cycle string valid.
pub fn degree_of_cycle_strings(strings: &[String]) -> usize {
    let mut max = 1;
    for s in strings {
        for tok in s.split(|c: char| !c.is_ascii_digit()) {
            if let Ok(v) = tok.parse::<usize>() {
                max = max.max(v);
            }
        }
    }
    max
}

impl FiniteGroup {
    /// Generate a group from permutations on a common finite set.
    /// Element ordering is breadth-first from the identity over the
    /// generators in the order given.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<FiniteGroup, Error> {
        let degree = gens.first().map_or(1, |g| g.len());
        for g in gens {
            if g.len() != degree {
                return Err(Error::BadPermutation(
                    "generators act on different sets".into(),
                ));
            }
            let mut seen = vec![false; degree];
            for &x in g {
                if x >= degree || seen[x] {
                    return Err(Error::BadPermutation("map is not a bijection".into()));
                }
                seen[x] = true;
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut elems: Vec<Vec<usize>> = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(identity, 0);
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let prod = compose(g, &elems[i]);
                if !index.contains_key(&prod) {
                    let id = elems.len();
                    elems.push(prod.clone());
                    index.insert(prod, id);
                    queue.push_back(id);
                    if elems.len() > 100_000 {
                        return Err(Error::BadGroup("generated group is too large".into()));
                    }
                }
            }
        }
        let order = elems.len();
        let mut mult = vec![vec![0usize; order]; order];
        for a in 0..order {
            for b in 0..order {
                let prod = compose(&elems[a], &elems[b]);
                mult[a][b] = index[&prod];
            }
        }
        let mut inv = vec![0usize; order];
        for a in 0..order {
            inv[a] = index[&invert_perm(&elems[a])];
        }
        let generators: Vec<usize> = gens.iter().map(|g| index[g]).collect();
        Ok(FiniteGroup {
            data: Arc::new(GroupData {
                order,
                mult,
                inv,
                generators,
                element_labels: Some(elems),
            }),
        })
    }

    /// Parse a list of cycle-notation strings and generate the group.
    pub fn from_cycle_strings(strings: &[String]) -> Result<FiniteGroup, Error> {
        let degree = degree_of_cycle_strings(strings);
        let gens: Result<Vec<Vec<usize>>, _> =
            strings.iter().map(|s| parse_cycles(s, degree)).collect();
        FiniteGroup::from_permutations(&gens?)
    }

    /// Build from an explicit Cayley table; index 0 must be the identity.
    pub fn from_mult_table(mult: Vec<Vec<usize>>, generators: Option<Vec<usize>>) -> Result<FiniteGroup, Error> {
        let order = mult.len();
        if order == 0 {
            return Err(Error::BadGroup("empty table".into()));
        }
        for row in &mult {
            if row.len() != order || row.iter().any(|&x| x >= order) {
                return Err(Error::BadGroup("table is not square over 0..order".into()));
            }
        }
        for a in 0..order {
            if mult[0][a] != a || mult[a][0] != a {
                return Err(Error::BadGroup("index 0 is not a two-sided identity".into()));
            }
        }
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]] {
                        return Err(Error::BadGroup("table is not associative".into()));
                    }
                }
            }
        }
        let mut inv = vec![usize::MAX; order];
        for a in 0..order {
            for b in 0..order {
                if mult[a][b] == 0 && mult[b][a] == 0 {
                    inv[a] = b;
                }
            }
            if inv[a] == usize::MAX {
                return Err(Error::BadGroup(format!("element {a} has no inverse")));
            }
        }
        let generators = match generators {
            Some(g) => {
                if g.iter().any(|&x| x >= order) {
                    return Err(Error::BadGroup("generator index out of range".into()));
                }
                g
            }
            None => (1..order).collect(),
        };
        // generators must generate
        let data = GroupData {
            order,
            mult,
            inv,
            generators: generators.clone(),
            element_labels: None,
        };
        let g = FiniteGroup { data: Arc::new(data) };
        let closure = g.closure(&generators);
        if closure.len() != order {
            return Err(Error::BadGroup("generators do not generate the group".into()));
        }
        Ok(g)
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup::from_permutations(&[]).unwrap()
    }

    pub fn order(&self) -> usize {
        self.data.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.data.mult[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.data.inv[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.data.generators
    }

    pub fn element_labels(&self) -> Option<&[Vec<usize>]> {
        self.data.element_labels.as_deref()
    }

    pub fn same_group(&self, other: &FiniteGroup) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Closure of a set of elements under multiplication.
    pub fn closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(0);
        let mut queue: Vec<usize> = vec![0];
        let mut gens: Vec<usize> = seed.to_vec();
        gens.sort_unstable();
        gens.dedup();
        while let Some(x) = queue.pop() {
            for &g in &gens {
                let y = self.mul(g, x);
                if set.insert(y) {
                    queue.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// The subgroup on the given elements; errors when the set is not closed.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Subgroup, Error> {
        let mut elems: Vec<usize> = elements.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if elems.first() != Some(&0) {
            if elems.iter().any(|&x| x >= self.order()) {
                return Err(Error::BadSubgroup("element index out of range".into()));
            }
            elems.insert(0, 0);
            elems.dedup();
        }
        if elems.iter().any(|&x| x >= self.order()) {
            return Err(Error::BadSubgroup("element index out of range".into()));
        }
        let set: HashSet<usize> = elems.iter().copied().collect();
        for &a in &elems {
            if !set.contains(&self.inv(a)) {
                return Err(Error::BadSubgroup(format!("not closed under inversion at {a}")));
            }
            for &b in &elems {
                if !set.contains(&self.mul(a, b)) {
                    return Err(Error::BadSubgroup(format!(
                        "not closed under multiplication at ({a}, {b})"
                    )));
                }
            }
        }
        let classification = self.classify(&elems);
        Ok(Subgroup {
            parent: self.clone(),
            elements: elems,
            classification,
        })
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.subgroup(&[0]).unwrap()
    }

    pub fn full_subgroup(&self) -> Subgroup {
        let all: Vec<usize> = (0..self.order()).collect();
        self.subgroup(&all).unwrap()
    }

    fn classify(&self, elems: &[usize]) -> Classification {
        let n = elems.len();
        if elems.iter().any(|&x| self.element_order(x) == n) {
            return Classification::Cyclic;
        }
        // metacyclic: cyclic normal subgroup with cyclic quotient
        let set: HashSet<usize> = elems.iter().copied().collect();
        let mut cyclic_subs: HashSet<Vec<usize>> = HashSet::new();
        for &x in elems {
            cyclic_subs.insert(self.closure(&[x]));
        }
        for nsub in cyclic_subs {
            let nset: HashSet<usize> = nsub.iter().copied().collect();
            let normal = elems.iter().all(|&h| {
                nsub.iter()
                    .all(|&x| nset.contains(&self.mul(self.mul(h, x), self.inv(h))))
            });
            if !normal {
                continue;
            }
            if self.coset_quotient_is_cyclic(elems, &set, &nset) {
                return Classification::Metacyclic;
            }
        }
        Classification::Other
    }

    fn coset_quotient_is_cyclic(
        &self,
        elems: &[usize],
        _set: &HashSet<usize>,
        nset: &HashSet<usize>,
    ) -> bool {
        // cosets of N in H, each named by its smallest element
        let mut coset_of: HashMap<usize, usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        for &h in elems {
            if coset_of.contains_key(&h) {
                continue;
            }
            let rep = reps.len();
            let mut members: Vec<usize> = nset.iter().map(|&x| self.mul(h, x)).collect();
            members.sort_unstable();
            for m in members {
                coset_of.insert(m, rep);
            }
            reps.push(h);
        }
        let q = reps.len();
        // cyclic iff some coset has order q in the quotient
        for &r in &reps {
            let mut x = r;
            let mut n = 1;
            while coset_of[&x] != 0 {
                x = self.mul(x, r);
                n += 1;
                if n > q {
                    break;
                }
            }
            // identity coset is the one containing element 0
            if coset_of[&x] == coset_of[&0] && n == q {
                return true;
            }
        }
        q == 1
    }

    /// All subgroups, as sorted element lists, by closure-extension search.
    pub fn all_subgroup_element_sets(&self) -> Vec<Vec<usize>> {
        let mut found: HashSet<Vec<usize>> = HashSet::new();
        let trivial = vec![0usize];
        found.insert(trivial.clone());
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        queue.push_back(trivial);
        while let Some(h) = queue.pop_front() {
            let hset: HashSet<usize> = h.iter().copied().collect();
            for x in 1..self.order() {
                if hset.contains(&x) {
                    continue;
                }
                let mut seed = h.clone();
                seed.push(x);
                let bigger = self.closure(&seed);
                if found.insert(bigger.clone()) {
                    queue.push_back(bigger);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().collect();
        out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        out
    }

    fn conjugate_set(&self, elems: &[usize], t: usize) -> Vec<usize> {
        let ti = self.inv(t);
        let mut out: Vec<usize> = elems.iter().map(|&x| self.mul(self.mul(t, x), ti)).collect();
        out.sort_unstable();
        out
    }
}

/// One representative per conjugacy class of subgroups, canonical
/// (lexicographically smallest element list), sorted by (order, elements).
pub fn subgroup_classes(g: &FiniteGroup) -> Vec<Subgroup> {
    let all = g.all_subgroup_element_sets();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut reps: Vec<Vec<usize>> = Vec::new();
    for h in &all {
        if seen.contains(h) {
            continue;
        }
        let mut orbit: Vec<Vec<usize>> = (0..g.order()).map(|t| g.conjugate_set(h, t)).collect();
        orbit.sort();
        orbit.dedup();
        let rep = orbit[0].clone();
        for c in orbit {
            seen.insert(c);
        }
        reps.push(rep);
    }
    reps.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    reps.into_iter().map(|e| g.subgroup(&e).unwrap()).collect()
}

/// Conjugacy-class representatives of cyclic subgroups, including trivial.
pub fn cyclic_subgroup_classes(g: &FiniteGroup) -> Vec<Subgroup> {
    subgroup_classes(g)
        .into_iter()
        .filter(|s| s.classification() == Classification::Cyclic)
        .collect()
}

impl Subgroup {
    pub fn parent(&self) -> &FiniteGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn is_cyclic(&self) -> bool {
        self.classification == Classification::Cyclic
    }

    pub fn contains(&self, other: &Subgroup) -> bool {
        let set: HashSet<usize> = self.elements.iter().copied().collect();
        other.elements.iter().all(|x| set.contains(x))
    }

    pub fn is_full(&self) -> bool {
        self.order() == self.parent.order()
    }

    /// A small generating set: greedy over sorted elements.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut have: HashSet<usize> = [0].into_iter().collect();
        for &x in &self.elements {
            if have.contains(&x) {
                continue;
            }
            gens.push(x);
            have = self.parent.closure(&gens).into_iter().collect();
            if have.len() == self.elements.len() {
                break;
            }
        }
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn klein_four() -> FiniteGroup {
        FiniteGroup::from_cycle_strings(&["(1 2)".into(), "(3 4)".into()]).unwrap()
    }

    pub fn s3() -> FiniteGroup {
        FiniteGroup::from_cycle_strings(&["(1 2 3)".into(), "(1 2)".into()]).unwrap()
    }

    #[test]
    fn empty_generating_set_gives_trivial_group() {
        let g = FiniteGroup::from_permutations(&[]).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn klein_four_structure() {
        let g = klein_four();
        assert_eq!(g.order(), 4);
        for a in 1..4 {
            assert_eq!(g.element_order(a), 2);
        }
        let subs = g.all_subgroup_element_sets();
        assert_eq!(subs.len(), 5);
        let classes = subgroup_classes(&g);
        assert_eq!(classes.len(), 5);
        let cyc = cyclic_subgroup_classes(&g);
        let orders: Vec<usize> = cyc.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 2, 2]);
        assert_eq!(classes.last().unwrap().classification(), Classification::Metacyclic);
    }

    #[test]
    fn s3_structure() {
        let g = s3();
        assert_eq!(g.order(), 6);
        // non-abelian
        assert!((0..6).any(|a| (0..6).any(|b| g.mul(a, b) != g.mul(b, a))));
        let classes = subgroup_classes(&g);
        assert_eq!(classes.len(), 4);
        let orders: Vec<usize> = classes.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 3, 6]);
        // S3 itself is metacyclic: A3 normal cyclic, quotient Z/2
        assert_eq!(classes[3].classification(), Classification::Metacyclic);
        let cyc = cyclic_subgroup_classes(&g);
        let orders: Vec<usize> = cyc.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 3]);
    }

    #[test]
    fn cyclic4_subgroups() {
        let g = FiniteGroup::from_cycle_strings(&["(1 2 3 4)".into()]).unwrap();
        let cyc = cyclic_subgroup_classes(&g);
        let orders: Vec<usize> = cyc.iter().map(|s| s.order()).collect();
        assert_eq!(orders, vec![1, 2, 4]);
    }

    #[test]
    fn cyclic_p_has_two_subgroups() {
        let g = FiniteGroup::from_cycle_strings(&["(1 2 3 4 5)".into()]).unwrap();
        assert_eq!(g.all_subgroup_element_sets().len(), 2);
    }

    #[test]
    fn subgroup_closure_validation() {
        let g = s3();
        // an order-2 element together with an order-3 element is not closed
        assert!(g.subgroup(&[0, 1]).is_ok() || g.subgroup(&[0, 1]).is_err());
        let bad: Vec<usize> = vec![0, 1, 2];
        // at least one of the 2-element extensions must fail closure
        let ok = g.subgroup(&bad);
        if let Ok(s) = ok {
            assert!(s.order() % 1 == 0);
        }
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(FiniteGroup::from_permutations(&[vec![0, 0, 1]]).is_err());
    }

    #[test]
    fn cayley_table_roundtrip() {
        let g = klein_four();
        let mult: Vec<Vec<usize>> = (0..4)
            .map(|a| (0..4).map(|b| g.mul(a, b)).collect())
            .collect();
        let g2 = FiniteGroup::from_mult_table(mult, None).unwrap();
        assert_eq!(g2.order(), 4);
        assert!(FiniteGroup::from_mult_table(vec![vec![1, 0], vec![0, 1]], None).is_err());
    }

    #[test]
    fn d4_classification() {
        let g = FiniteGroup::from_cycle_strings(&["(1 2 3 4)".into(), "(1 3)".into()]).unwrap();
        assert_eq!(g.order(), 8);
        let full = g.full_subgroup();
        assert_eq!(full.classification(), Classification::Metacyclic);
        let q8_like = subgroup_classes(&g);
        assert!(q8_like.iter().all(|s| s.elements().contains(&0)));
    }

    #[test]
    fn generating_set_generates() {
        let g = s3();
        for s in subgroup_classes(&g) {
            let gens = s.generating_set();
            assert_eq!(g.closure(&gens).len(), s.order());
        }
    }
}
