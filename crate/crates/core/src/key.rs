//! Node key quadruples and the integer-only operations over them.
//!
//! A node's key is `(nv, dv, snv, sdv)`: its own rational `nv/dv` and the
//! rational `snv/sdv` of its next sibling. Read as the matrix
//! `[[nv, snv], [dv, sdv]]`, the key of the `c`-th child is the parent's
//! matrix times `[[1, 1], [c, c + 1]]`, and the super-root is `[[0, 1], [1, 0]]`.
//! Every key therefore has determinant -1, which keeps both pairs in lowest
//! terms and puts each node strictly before its next sibling.
//!
//! Comparisons never divide: `a/b < c/d` is evaluated as `a·d < c·b`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::KeyError;
use crate::path::{parse_decimal, TreePath};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeKey {
    nv: BigUint,
    dv: BigUint,
    snv: BigUint,
    sdv: BigUint,
}

impl NodeKey {
    /// Builds a key from its four components, accepting only quadruples that
    /// some tree position actually encodes (or the super-root).
    pub fn new(nv: BigUint, dv: BigUint, snv: BigUint, sdv: BigUint) -> Result<Self, KeyError> {
        let candidate = NodeKey { nv, dv, snv, sdv };
        if candidate.is_root() {
            return Ok(candidate);
        }
        if !candidate.has_unit_determinant() {
            return Err(KeyError::CorruptKey(format!(
                "{candidate}: nv·sdv − dv·snv is {}, expected -1",
                candidate.determinant()
            )));
        }
        let encoded = walk(&candidate.nv, &candidate.dv, |_, _| ())?;
        if encoded != candidate {
            return Err(KeyError::CorruptKey(format!(
                "{candidate}: sibling pair should be {}/{}",
                encoded.snv, encoded.sdv
            )));
        }
        Ok(candidate)
    }

    pub(crate) fn from_parts_unchecked(
        nv: BigUint,
        dv: BigUint,
        snv: BigUint,
        sdv: BigUint,
    ) -> Self {
        NodeKey { nv, dv, snv, sdv }
    }

    pub fn root() -> Self {
        NodeKey {
            nv: BigUint::zero(),
            dv: BigUint::one(),
            snv: BigUint::one(),
            sdv: BigUint::zero(),
        }
    }

    pub fn nv(&self) -> &BigUint {
        &self.nv
    }

    pub fn dv(&self) -> &BigUint {
        &self.dv
    }

    pub fn snv(&self) -> &BigUint {
        &self.snv
    }

    pub fn sdv(&self) -> &BigUint {
        &self.sdv
    }

    pub fn into_parts(self) -> (BigUint, BigUint, BigUint, BigUint) {
        (self.nv, self.dv, self.snv, self.sdv)
    }

    pub fn is_root(&self) -> bool {
        self.nv.is_zero() && self.dv.is_one() && self.snv.is_one() && self.sdv.is_zero()
    }

    /// `nv·sdv − dv·snv`; -1 for every well-formed key.
    pub fn determinant(&self) -> BigInt {
        BigInt::from(&self.nv * &self.sdv) - BigInt::from(&self.dv * &self.snv)
    }

    fn has_unit_determinant(&self) -> bool {
        &self.nv * &self.sdv + 1u32 == &self.dv * &self.snv
    }

    /// The tree position this key encodes.
    pub fn path(&self) -> TreePath {
        if self.is_root() {
            return TreePath::root();
        }
        let mut ordinals = Vec::new();
        walk(&self.nv, &self.dv, |ordinal, _| {
            ordinals.push(ordinal.clone())
        })
        .expect("NodeKey always holds a decodable rational");
        TreePath::new(ordinals).expect("decoded ordinals are positive")
    }

    /// Key of the parent node; `None` for the super-root.
    pub fn parent(&self) -> Option<NodeKey> {
        if self.is_root() {
            return None;
        }
        let mut chain = Vec::new();
        walk(&self.nv, &self.dv, |_, key| chain.push(key.clone()))
            .expect("NodeKey always holds a decodable rational");
        chain.pop();
        Some(chain.pop().unwrap_or_else(NodeKey::root))
    }

    fn child_unchecked(&self, c: &BigUint) -> NodeKey {
        let nv = &self.nv + c * &self.snv;
        let dv = &self.dv + c * &self.sdv;
        let snv = &nv + &self.snv;
        let sdv = &dv + &self.sdv;
        NodeKey { nv, dv, snv, sdv }
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}:{}/{}", self.nv, self.dv, self.snv, self.sdv)
    }
}

/// Parses the canonical text form `nv/dv:snv/sdv`.
impl FromStr for NodeKey {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KeyError::parse("node key", s);
        let (own, sibling) = s.split_once(':').ok_or_else(bad)?;
        let (nv, dv) = own.split_once('/').ok_or_else(bad)?;
        let (snv, sdv) = sibling.split_once('/').ok_or_else(bad)?;
        let num = |t: &str| parse_decimal(t).ok_or_else(bad);
        NodeKey::new(num(nv)?, num(dv)?, num(snv)?, num(sdv)?)
    }
}

pub fn root_key() -> NodeKey {
    NodeKey::root()
}

/// Key of the `c`-th child (1-based) of `parent`.
pub fn child_key<C: Into<BigUint>>(parent: &NodeKey, c: C) -> Result<NodeKey, KeyError> {
    let c = c.into();
    if c.is_zero() {
        return Err(KeyError::InvalidOrdinal(c.to_string()));
    }
    Ok(parent.child_unchecked(&c))
}

pub fn next_sibling_key(key: &NodeKey) -> Result<NodeKey, KeyError> {
    if key.is_root() {
        return Err(KeyError::NoSibling);
    }
    // snv >= nv and sdv >= dv hold for every non-root key.
    let snv = &key.snv * 2u32 - &key.nv;
    let sdv = &key.sdv * 2u32 - &key.dv;
    Ok(NodeKey {
        nv: key.snv.clone(),
        dv: key.sdv.clone(),
        snv,
        sdv,
    })
}

pub fn encode_path(path: &TreePath) -> NodeKey {
    path.ordinals()
        .iter()
        .fold(NodeKey::root(), |key, c| key.child_unchecked(c))
}

/// A decoded key: its position and the keys of every node on the way down,
/// the node itself last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub path: TreePath,
    pub chain: Vec<NodeKey>,
}

impl Decoded {
    /// The chain without the node itself.
    pub fn ancestors(&self) -> &[NodeKey] {
        &self.chain[..self.chain.len().saturating_sub(1)]
    }
}

/// Recovers the position and ancestor keys of the node keyed `nv/dv` without
/// any other information.
///
/// Each step peels one ordinal off the continued fraction: the integer part
/// of `num/den` is the ordinal, and a remainder `r` leaves the tail `r/(den − r)`.
pub fn decode_key(nv: &BigUint, dv: &BigUint) -> Result<Decoded, KeyError> {
    let mut ordinals = Vec::new();
    let mut chain = Vec::new();
    walk(nv, dv, |ordinal, key| {
        ordinals.push(ordinal.clone());
        chain.push(key.clone());
    })?;
    let path = TreePath::new(ordinals).expect("decoded ordinals are positive");
    Ok(Decoded { path, chain })
}

fn walk<F>(nv: &BigUint, dv: &BigUint, mut visit: F) -> Result<NodeKey, KeyError>
where
    F: FnMut(&BigUint, &NodeKey),
{
    let not_a_node = || KeyError::NotANode {
        nv: nv.clone(),
        dv: dv.clone(),
    };
    if !nv.gcd(dv).is_one() {
        return Err(KeyError::NotCanonical {
            nv: nv.clone(),
            dv: dv.clone(),
        });
    }
    if dv.is_zero() || nv < dv {
        return Err(not_a_node());
    }

    let mut num = nv.clone();
    let mut den = dv.clone();
    let mut ancestor = NodeKey::root();
    loop {
        let (ordinal, rem) = num.div_rem(&den);
        // A zero quotient would be a 0th child: the rational is not on the tree.
        if ordinal.is_zero() {
            return Err(not_a_node());
        }
        ancestor = ancestor.child_unchecked(&ordinal);
        visit(&ordinal, &ancestor);
        if rem.is_zero() {
            return Ok(ancestor);
        }
        den -= &rem;
        num = rem;
    }
}

/// Orders two keys by their rationals using cross-multiplication.
pub fn compare_keys(a: &NodeKey, b: &NodeKey) -> Result<Ordering, KeyError> {
    if a.is_root() || b.is_root() {
        return Err(KeyError::RootKey);
    }
    Ok(cmp_values(a, b))
}

pub(crate) fn cmp_values(a: &NodeKey, b: &NodeKey) -> Ordering {
    (&a.nv * &b.dv).cmp(&(&b.nv * &a.dv))
}

/// True iff `candidate` lies strictly inside the interval `(nv/dv, snv/sdv)`
/// owned by `me`.
pub fn is_descendant(me: &NodeKey, candidate: &NodeKey) -> Result<bool, KeyError> {
    if me.is_root() || candidate.is_root() {
        return Err(KeyError::RootKey);
    }
    Ok(strictly_inside(candidate, me))
}

/// True iff `me` lies strictly inside the interval owned by `candidate`.
pub fn is_ancestor(me: &NodeKey, candidate: &NodeKey) -> Result<bool, KeyError> {
    if me.is_root() || candidate.is_root() {
        return Err(KeyError::RootKey);
    }
    Ok(strictly_inside(me, candidate))
}

fn strictly_inside(inner: &NodeKey, outer: &NodeKey) -> bool {
    let above_lower = &inner.nv * &outer.dv > &outer.nv * &inner.dv;
    let below_upper = &inner.nv * &outer.sdv < &outer.snv * &inner.dv;
    above_lower && below_upper
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(nv: u64, dv: u64, snv: u64, sdv: u64) -> NodeKey {
        NodeKey::from_parts_unchecked(nv.into(), dv.into(), snv.into(), sdv.into())
    }

    fn path(ordinals: &[u64]) -> TreePath {
        TreePath::from_ordinals(ordinals).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn root_and_top_level_children() {
        assert_eq!(root_key(), key(0, 1, 1, 0));
        assert_eq!(child_key(&root_key(), 1u32).unwrap(), key(1, 1, 2, 1));
        assert_eq!(child_key(&root_key(), 2u32).unwrap(), key(2, 1, 3, 1));
    }

    #[test]
    fn child_key_worked_examples() {
        assert_eq!(
            child_key(&key(14, 5, 17, 6), 3u32).unwrap(),
            key(65, 23, 82, 29)
        );
        assert_eq!(
            child_key(&key(2, 1, 3, 1), 4u32).unwrap(),
            key(14, 5, 17, 6)
        );
        assert_eq!(
            child_key(&key(2, 1, 3, 1), 0u32),
            Err(KeyError::InvalidOrdinal("0".into()))
        );
    }

    #[test]
    fn next_sibling_examples() {
        assert_eq!(
            next_sibling_key(&key(65, 23, 82, 29)).unwrap(),
            key(82, 29, 99, 35)
        );
        assert_eq!(
            next_sibling_key(&key(65, 23, 82, 29)).unwrap(),
            child_key(&key(14, 5, 17, 6), 4u32).unwrap()
        );
        assert_eq!(next_sibling_key(&key(2, 1, 3, 1)).unwrap(), key(3, 1, 4, 1));
        assert_eq!(next_sibling_key(&key(1, 1, 2, 1)).unwrap(), key(2, 1, 3, 1));
        assert_eq!(next_sibling_key(&root_key()), Err(KeyError::NoSibling));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_path(&path(&[2, 4, 3])), key(65, 23, 82, 29));
        assert_eq!(encode_path(&TreePath::root()), root_key());
        assert_eq!(encode_path(&path(&[2, 4, 1])), key(31, 11, 48, 17));
    }

    #[test]
    fn decode_examples() {
        let d = decode_key(&big(65), &big(23)).unwrap();
        assert_eq!(d.path, path(&[2, 4, 3]));
        assert_eq!(
            d.chain,
            vec![key(2, 1, 3, 1), key(14, 5, 17, 6), key(65, 23, 82, 29)]
        );
        assert_eq!(d.ancestors(), &[key(2, 1, 3, 1), key(14, 5, 17, 6)]);

        let d = decode_key(&big(1), &big(1)).unwrap();
        assert_eq!(d.path, path(&[1]));
        assert_eq!(d.chain, vec![key(1, 1, 2, 1)]);

        let d = decode_key(&big(40), &big(11)).unwrap();
        assert_eq!(d.path, path(&[3, 1, 3]));
        assert_eq!(
            d.chain,
            vec![key(3, 1, 4, 1), key(7, 2, 11, 3), key(40, 11, 51, 14)]
        );
    }

    #[test]
    fn decode_rejects_bad_input() {
        assert!(matches!(
            decode_key(&big(130), &big(46)),
            Err(KeyError::NotCanonical { .. })
        ));
        assert!(matches!(
            decode_key(&big(2), &big(3)),
            Err(KeyError::NotANode { .. })
        ));
        assert!(matches!(
            decode_key(&big(1), &big(0)),
            Err(KeyError::NotANode { .. })
        ));
        assert!(matches!(
            decode_key(&big(0), &big(1)),
            Err(KeyError::NotANode { .. })
        ));
        // 4/3 = 1 + 1/(1 + 1/(1/2)): the tail has integer part 0.
        assert!(matches!(
            decode_key(&big(4), &big(3)),
            Err(KeyError::NotANode { .. })
        ));
    }

    #[test]
    fn comparisons() {
        assert_eq!(
            compare_keys(&key(2, 1, 3, 1), &key(14, 5, 17, 6)),
            Ok(Ordering::Less)
        );
        assert_eq!(
            compare_keys(&key(65, 23, 82, 29), &key(65, 23, 82, 29)),
            Ok(Ordering::Equal)
        );
        assert_eq!(
            compare_keys(&key(14, 5, 17, 6), &key(17, 6, 20, 7)),
            Ok(Ordering::Less)
        );
        assert_eq!(
            compare_keys(&root_key(), &key(1, 1, 2, 1)),
            Err(KeyError::RootKey)
        );
    }

    #[test]
    fn interval_predicates() {
        assert_eq!(
            is_descendant(&key(2, 1, 3, 1), &key(65, 23, 82, 29)),
            Ok(true)
        );
        assert_eq!(
            is_descendant(&key(65, 23, 82, 29), &key(65, 23, 82, 29)),
            Ok(false)
        );
        assert_eq!(
            is_descendant(&key(14, 5, 17, 6), &key(17, 6, 20, 7)),
            Ok(false)
        );

        assert_eq!(
            is_ancestor(&key(65, 23, 82, 29), &key(14, 5, 17, 6)),
            Ok(true)
        );
        assert_eq!(
            is_ancestor(&key(65, 23, 82, 29), &key(65, 23, 82, 29)),
            Ok(false)
        );
        assert_eq!(
            is_ancestor(&key(31, 11, 48, 17), &key(2, 1, 3, 1)),
            Ok(true)
        );

        assert_eq!(
            is_ancestor(&root_key(), &key(2, 1, 3, 1)),
            Err(KeyError::RootKey)
        );
        assert_eq!(
            is_descendant(&root_key(), &key(2, 1, 3, 1)),
            Err(KeyError::RootKey)
        );
    }

    #[test]
    fn text_form_round_trips() {
        let k: NodeKey = "65/23:82/29".parse().unwrap();
        assert_eq!(k, key(65, 23, 82, 29));
        assert_eq!(k.to_string(), "65/23:82/29");
        assert_eq!("0/1:1/0".parse::<NodeKey>().unwrap(), root_key());
    }

    #[test]
    fn text_form_rejects_malformed_and_invalid() {
        for bad in [
            "65/23",
            "65/23:82",
            "65/23:82/29:1",
            "065/23:82/29",
            "a/b:c/d",
            "",
        ] {
            assert!(
                matches!(bad.parse::<NodeKey>(), Err(KeyError::Parse { .. })),
                "{bad}"
            );
        }
        // Right rational, wrong sibling pair (determinant still -1).
        assert!(matches!(
            "1/1:3/2".parse::<NodeKey>(),
            Err(KeyError::CorruptKey(_))
        ));
        assert!(matches!(
            "65/23:82/30".parse::<NodeKey>(),
            Err(KeyError::CorruptKey(_))
        ));
        assert!(matches!(
            "4/3:5/4".parse::<NodeKey>(),
            Err(KeyError::CorruptKey(_)) | Err(KeyError::NotANode { .. })
        ));
        assert!(matches!(
            "5/1:1/0".parse::<NodeKey>(),
            Err(KeyError::CorruptKey(_))
        ));
    }

    #[test]
    fn path_and_parent_of_key() {
        let k = key(65, 23, 82, 29);
        assert_eq!(k.path(), path(&[2, 4, 3]));
        assert_eq!(k.parent(), Some(key(14, 5, 17, 6)));
        assert_eq!(key(3, 1, 4, 1).parent(), Some(root_key()));
        assert_eq!(root_key().parent(), None);
        assert_eq!(k.determinant(), BigInt::from(-1));
    }
}
