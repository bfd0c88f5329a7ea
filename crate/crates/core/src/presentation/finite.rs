//! Small finite groups as multiplication tables, and homomorphism counts
//! `#Hom(⟨gens | rels⟩, G)` as a presentation-independent invariant.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Presentation, Sign, Word};

/// Largest number of generator assignments `|G|^n` we agree to enumerate.
pub const HOM_ENUMERATION_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("multiplication table has {len} entries, expected {order}²")]
    BadShape { order: usize, len: usize },
    #[error("table entry out of range")]
    EntryOutOfRange,
    #[error("no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HomCountError {
    #[error("enumeration needs {required} assignments, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

/// A finite group given by its Cayley table over elements `0..order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    name: String,
    order: usize,
    table: Vec<u32>,
    identity: u32,
    inverses: Vec<u32>,
}

impl FiniteGroupTable {
    /// Checks every group axiom; associativity is checked exhaustively.
    pub fn from_table(name: &str, order: usize, table: Vec<u32>) -> Result<Self, GroupError> {
        if table.len() != order * order || order == 0 {
            return Err(GroupError::BadShape { order, len: table.len() });
        }
        if table.iter().any(|&x| x as usize >= order) {
            return Err(GroupError::EntryOutOfRange);
        }
        let mul = |a: usize, b: usize| table[a * order + b] as usize;
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverses = vec![0u32; order];
        for (x, inv) in inverses.iter_mut().enumerate() {
            let y = (0..order)
                .find(|&y| mul(x, y) == identity && mul(y, x) == identity)
                .ok_or(GroupError::NoInverse(x))?;
            *inv = y as u32;
        }
        for a in 0..order {
            for b in 0..order {
                let ab = mul(a, b);
                for c in 0..order {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(Self { name: name.into(), order, table, identity: identity as u32, inverses })
    }

    /// Closure of a set of permutations of `0..degree` under composition.
    pub fn from_permutations(name: &str, degree: usize, generators: &[Vec<usize>]) -> Result<Self, GroupError> {
        let identity: Vec<usize> = (0..degree).collect();
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut elements = vec![identity.clone()];
        index.insert(identity, 0);
        let mut frontier = 0;
        while frontier < elements.len() {
            let current = elements[frontier].clone();
            for g in generators {
                let next = compose(g, &current);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
            frontier += 1;
        }
        let order = elements.len();
        let mut table = vec![0u32; order * order];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                table[a * order + b] = index[&compose(pa, pb)] as u32;
            }
        }
        Self::from_table(name, order, table)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
        Self::from_table(&alloc::format!("Z/{n}"), n, table).expect("cyclic group table is valid")
    }

    /// Symmetric group on `k` points, `k ≤ 6`.
    pub fn symmetric(k: usize) -> Self {
        assert!((1..=6).contains(&k), "symmetric groups above S6 are too large to tabulate here");
        let mut gens = Vec::new();
        if k >= 2 {
            let mut swap: Vec<usize> = (0..k).collect();
            swap.swap(0, 1);
            let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
            gens.push(swap);
            gens.push(cycle);
        }
        Self::from_permutations(&alloc::format!("S{k}"), k, &gens).expect("permutation closure is a group")
    }

    /// Symmetries of the regular `m`-gon (order `2m`); `dihedral(4)` is D₄.
    pub fn dihedral(m: usize) -> Self {
        assert!(m >= 3);
        let rotation: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
        let reflection: Vec<usize> = (0..m).map(|i| (m - i) % m).collect();
        Self::from_permutations(&alloc::format!("D{m}"), m, &[rotation, reflection])
            .expect("permutation closure is a group")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    /// Image of `word` when generator `i` maps to `images[i - 1]`.
    pub fn evaluate(&self, word: &Word, images: &[u32]) -> u32 {
        word.letters().iter().fold(self.identity, |acc, l| {
            let x = images[l.generator.index() - 1];
            let x = match l.sign {
                Sign::Plus => x,
                Sign::Minus => self.inv(x),
            };
            self.mul(acc, x)
        })
    }
}

/// `(p ∘ q)(i) = p[q[i]]`
fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&i| p[i]).collect()
}

/// Counts maps `generators → G` that send every relator to the identity.
///
/// Generators are assigned in index order; a relator is checked as soon as
/// its largest generator has been assigned, which prunes whole subtrees.
pub fn count_homomorphisms(p: &Presentation, group: &FiniteGroupTable) -> Result<u64, HomCountError> {
    let n = p.generator_count();
    let required = (group.order() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > HOM_ENUMERATION_BUDGET as u128 {
        return Err(HomCountError::BudgetExceeded { required, budget: HOM_ENUMERATION_BUDGET });
    }

    let mut by_depth: Vec<Vec<&Word>> = vec![Vec::new(); n + 1];
    for r in p.relators() {
        by_depth[r.max_generator()].push(r);
    }
    // An empty relator is trivially satisfied; nothing else lives at depth 0.
    let mut images = vec![group.identity(); n];
    Ok(extend(group, &by_depth, &mut images, 0))
}

fn extend(group: &FiniteGroupTable, by_depth: &[Vec<&Word>], images: &mut [u32], assigned: usize) -> u64 {
    if assigned == images.len() {
        return 1;
    }
    let mut total = 0;
    for x in 0..group.order() as u32 {
        images[assigned] = x;
        let ok = by_depth[assigned + 1].iter().all(|r| group.evaluate(r, images) == group.identity());
        if ok {
            total += extend(group, by_depth, images, assigned + 1);
        }
    }
    total
}
