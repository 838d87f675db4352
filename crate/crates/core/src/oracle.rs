//! Reference evaluators that share no code with the key algebra: continued
//! fractions evaluated directly in exact rational arithmetic, the plain
//! (Tropashko) continued fraction over the same ordinals, and an explicit
//! child-count tree model for preorder ground truth.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::path::TreePath;

/// Exact reduced fraction.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("an empty term sequence has no value")]
    NoValue,

    #[error("continued fraction terms must be positive")]
    NonPositiveTerm,

    #[error("parent of {0} is not in the tree")]
    MissingParent(String),

    #[error("children of {0} are not numbered 1..k")]
    NonContiguous(String),
}

fn ordinal_terms(path: &TreePath) -> Vec<Rational> {
    path.ordinals()
        .iter()
        .map(|o| Rational::from_integer(BigInt::from(o.clone())))
        .collect()
}

/// `N1 + 1/(1 + 1/(N2 + 1/(1 + … + 1/(1 + 1/Nm))))`: every second term is 1.
pub fn eval_cf(path: &TreePath) -> Result<Rational, OracleError> {
    eval_cf_terms(&ordinal_terms(path))
}

/// [`eval_cf`] over arbitrary positive rational terms.
pub fn eval_cf_terms(terms: &[Rational]) -> Result<Rational, OracleError> {
    check_terms(terms)?;
    let (last, rest) = terms.split_last().ok_or(OracleError::NoValue)?;
    let one = Rational::one();
    Ok(rest.iter().rev().fold(last.clone(), |tail, term| {
        term + (&one / (&one + &one / tail))
    }))
}

/// `N1 + 1/(N2 + 1/(… + 1/Nm))`.
pub fn trop_eval(path: &TreePath) -> Result<Rational, OracleError> {
    trop_eval_terms(&ordinal_terms(path))
}

pub fn trop_eval_terms(terms: &[Rational]) -> Result<Rational, OracleError> {
    check_terms(terms)?;
    let (last, rest) = terms.split_last().ok_or(OracleError::NoValue)?;
    Ok(rest
        .iter()
        .rev()
        .fold(last.clone(), |tail, term| term + tail.recip()))
}

fn check_terms(terms: &[Rational]) -> Result<(), OracleError> {
    if terms.iter().any(|t| *t <= Rational::zero()) {
        return Err(OracleError::NonPositiveTerm);
    }
    Ok(())
}

/// Explicit tree: every present path mapped to its number of children.
/// The super-root (empty path) is always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveTree {
    nodes: BTreeMap<TreePath, u64>,
}

impl Default for NaiveTree {
    fn default() -> Self {
        NaiveTree::new()
    }
}

impl NaiveTree {
    pub fn new() -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(TreePath::root(), 0);
        NaiveTree { nodes }
    }

    /// Validates an explicit child-count map.
    pub fn from_counts(counts: BTreeMap<TreePath, u64>) -> Result<Self, OracleError> {
        let mut nodes = counts;
        nodes.entry(TreePath::root()).or_insert(0);
        for (path, &count) in &nodes {
            if let (Some(parent), Some(last)) = (path.parent(), path.last()) {
                match nodes.get(&parent) {
                    None => return Err(OracleError::MissingParent(path.to_string())),
                    Some(&siblings) if *last > BigUint::from(siblings) => {
                        return Err(OracleError::NonContiguous(parent.to_string()))
                    }
                    Some(_) => {}
                }
            }
            for c in 1..=count {
                let child = path.child(c).expect("ordinal is positive");
                if !nodes.contains_key(&child) {
                    return Err(OracleError::NonContiguous(path.to_string()));
                }
            }
        }
        Ok(NaiveTree { nodes })
    }

    /// Builds the smallest tree containing every listed path. Earlier siblings
    /// missing from the list are filled in as leaves.
    pub fn from_paths<'a, I>(paths: I) -> Result<Self, OracleError>
    where
        I: IntoIterator<Item = &'a TreePath>,
    {
        let mut counts: BTreeMap<TreePath, u64> = BTreeMap::new();
        for path in paths {
            let mut prefix = TreePath::root();
            for ordinal in path.ordinals() {
                let child = prefix
                    .child(ordinal.clone())
                    .expect("path ordinals are positive");
                let count = counts.entry(prefix).or_insert(0);
                let ordinal = u64::try_from(ordinal)
                    .map_err(|_| OracleError::NonContiguous(child.to_string()))?;
                *count = (*count).max(ordinal);
                counts.entry(child.clone()).or_insert(0);
                prefix = child;
            }
        }
        let mut filled = counts.clone();
        for (path, &count) in &counts {
            for c in 1..=count {
                filled
                    .entry(path.child(c).expect("ordinal is positive"))
                    .or_insert(0);
            }
        }
        NaiveTree::from_counts(filled)
    }

    /// Appends a new last child under `parent` and returns its path.
    pub fn add_child(&mut self, parent: &TreePath) -> Result<TreePath, OracleError> {
        let count = self
            .nodes
            .get_mut(parent)
            .ok_or_else(|| OracleError::MissingParent(parent.to_string()))?;
        *count += 1;
        let child = parent.child(*count).expect("ordinal is positive");
        self.nodes.insert(child.clone(), 0);
        Ok(child)
    }

    /// Random tree with `size` nodes below the super-root; each new node picks
    /// its parent uniformly among the nodes already present.
    pub fn random<R: Rng>(rng: &mut R, size: usize) -> Self {
        let mut tree = NaiveTree::new();
        let mut present = vec![TreePath::root()];
        for _ in 0..size {
            let parent = present[rng.gen_range(0..present.len())].clone();
            let child = tree.add_child(&parent).expect("parent is present");
            present.push(child);
        }
        tree
    }

    pub fn child_count(&self, path: &TreePath) -> Option<u64> {
        self.nodes.get(path).copied()
    }

    pub fn contains(&self, path: &TreePath) -> bool {
        self.nodes.contains_key(path)
    }

    /// Number of nodes, not counting the super-root.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every node except the super-root, in no particular order.
    pub fn paths(&self) -> impl Iterator<Item = &TreePath> {
        self.nodes.keys().filter(|p| !p.is_empty())
    }
}

/// Depth-first preorder, siblings by ascending ordinal; the super-root is
/// not listed.
pub fn naive_preorder(tree: &NaiveTree) -> Vec<TreePath> {
    let mut out = Vec::with_capacity(tree.len());
    let mut stack = vec![TreePath::root()];
    while let Some(path) = stack.pop() {
        let count = tree.child_count(&path).unwrap_or(0);
        for c in (1..=count).rev() {
            stack.push(path.child(c).expect("ordinal is positive"));
        }
        if !path.is_empty() {
            out.push(path);
        }
    }
    out
}
