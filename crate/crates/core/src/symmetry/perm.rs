use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group `group_closure` will materialize.
pub const MAX_GROUP_ORDER: usize = 200_000;

/// A bijection of `{0, …, n−1}` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection of 0..{n}")));
            }
            seen[x] = true;
        }
        Ok(Self(images))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Product of disjoint cycles on `n` points.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                if x >= n || next >= n {
                    return Err(Error::InvalidPermutation(format!("cycle {cycle:?} exceeds {n} points")));
                }
                images[x] = next;
            }
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "permutation degrees differ");
        Self(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x] = i;
        }
        Self(out)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(d)?;
        Permutation::new(images).map_err(serde::de::Error::custom)
    }
}

/// A finite permutation group with its elements in lexicographic order,
/// so the identity always has id 0.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl PermGroup {
    pub fn generate(degree: usize, gens: &[Permutation]) -> Result<Self> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(Error::InvalidPermutation(format!("{g} does not act on {degree} points")));
        }
        let identity = Permutation::identity(degree);
        let mut seen: HashMap<Permutation, ()> = HashMap::new();
        seen.insert(identity.clone(), ());
        let mut frontier = vec![identity];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for x in &frontier {
                for g in gens {
                    let y = g.compose(x);
                    if !seen.contains_key(&y) {
                        if seen.len() >= MAX_GROUP_ORDER {
                            return Err(Error::GroupTooLarge(MAX_GROUP_ORDER));
                        }
                        seen.insert(y.clone(), ());
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        let mut elements: Vec<Permutation> = seen.into_keys().collect();
        elements.sort();
        let index = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Self { degree, elements, index })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, id: usize) -> Option<&Permutation> {
        self.elements.get(id)
    }

    pub fn id_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Same element set.
    pub fn same_elements(&self, other: &Self) -> bool {
        self.elements == other.elements
    }
}

/// Smallest group containing `gens`, sorted lexicographically.
pub fn group_closure(degree: usize, gens: &[Permutation]) -> Result<Vec<Permutation>> {
    Ok(PermGroup::generate(degree, gens)?.elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Adds pairwise products and inverses until nothing new appears.
    fn brute_force_closure(n: usize, gens: &[Permutation]) -> Vec<Permutation> {
        let mut set: BTreeSet<Permutation> = gens.iter().cloned().collect();
        set.insert(Permutation::identity(n));
        loop {
            let current: Vec<_> = set.iter().cloned().collect();
            let mut grown = set.clone();
            for a in &current {
                grown.insert(a.inverse());
                for b in &current {
                    grown.insert(a.compose(b));
                }
            }
            if grown.len() == set.len() {
                return set.into_iter().collect();
            }
            set = grown;
        }
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(serde_json::from_str::<Permutation>("[1, 1, 0]").is_err());
        let p: Permutation = serde_json::from_str("[1, 2, 0]").unwrap();
        assert_eq!(p, Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap());
    }

    #[test]
    fn composition_convention() {
        let p = Permutation::new(vec![1, 0, 2]).unwrap();
        let q = Permutation::new(vec![0, 2, 1]).unwrap();
        // (p∘q)(1) = p(q(1)) = p(2) = 2
        assert_eq!(p.compose(&q).apply(1), 2);
        assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn closure_examples() {
        assert_eq!(group_closure(3, &[]).unwrap(), vec![Permutation::identity(3)]);
        let c3 = Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap();
        assert_eq!(group_closure(3, std::slice::from_ref(&c3)).unwrap().len(), 3);
        let t01 = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let t12 = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let s3 = group_closure(3, &[t01.clone(), t12.clone()]).unwrap();
        assert_eq!(s3.len(), 6);
        assert_eq!(s3, brute_force_closure(3, &[t01, t12]));
        assert!(s3[0].is_identity());
        assert!(group_closure(3, &[Permutation::identity(4)]).is_err());
    }

    #[test]
    fn closure_matches_brute_force_on_larger_sets() {
        let gens = vec![
            Permutation::from_cycles(6, &[&[0, 1, 2], &[3, 4, 5]]).unwrap(),
            Permutation::new(vec![4, 0, 5, 2, 1, 3]).unwrap(),
        ];
        let g = group_closure(6, &gens).unwrap();
        assert_eq!(g.len(), 60);
        assert_eq!(g, brute_force_closure(6, &gens));
    }

    #[test]
    fn closure_cap() {
        let gens = vec![
            Permutation::from_cycles(10, &[&[0, 1]]).unwrap(),
            Permutation::from_cycles(10, &[&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]]).unwrap(),
        ];
        assert!(matches!(group_closure(10, &gens), Err(Error::GroupTooLarge(_))));
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closure_is_order_independent_and_idempotent(gens in prop::collection::vec(perm_strategy(5), 0..3)) {
            let g = group_closure(5, &gens).unwrap();
            let mut reversed = gens.clone();
            reversed.reverse();
            prop_assert_eq!(&g, &group_closure(5, &reversed).unwrap());
            prop_assert_eq!(&g, &group_closure(5, &g).unwrap());
            prop_assert_eq!(&g, &brute_force_closure(5, &gens));
        }

        #[test]
        fn inverse_and_associativity(p in perm_strategy(6), q in perm_strategy(6), r in perm_strategy(6)) {
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
            prop_assert_eq!(p.compose(&q).inverse(), q.inverse().compose(&p.inverse()));
        }
    }
}
