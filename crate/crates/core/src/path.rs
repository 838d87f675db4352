//! Tree positions as sequences of 1-based sibling ordinals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::KeyError;

/// A position in the tree: the ordinal of each ancestor among its siblings,
/// from the top level down. The empty path is the virtual super-root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreePath(Vec<BigUint>);

impl TreePath {
    pub fn root() -> Self {
        TreePath(Vec::new())
    }

    pub fn new(ordinals: Vec<BigUint>) -> Result<Self, KeyError> {
        if let Some(zero) = ordinals.iter().find(|o| o.is_zero()) {
            return Err(KeyError::InvalidOrdinal(zero.to_string()));
        }
        Ok(TreePath(ordinals))
    }

    pub fn from_ordinals(ordinals: &[u64]) -> Result<Self, KeyError> {
        TreePath::new(ordinals.iter().map(|&o| BigUint::from(o)).collect())
    }

    pub fn ordinals(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&BigUint> {
        self.0.last()
    }

    pub fn parent(&self) -> Option<TreePath> {
        self.0.split_last().map(|(_, rest)| TreePath(rest.to_vec()))
    }

    pub fn child<C: Into<BigUint>>(&self, ordinal: C) -> Result<TreePath, KeyError> {
        let ordinal = ordinal.into();
        if ordinal.is_zero() {
            return Err(KeyError::InvalidOrdinal(ordinal.to_string()));
        }
        let mut ordinals = self.0.clone();
        ordinals.push(ordinal);
        Ok(TreePath(ordinals))
    }

    /// The position of the next sibling. `None` for the super-root.
    pub fn next_sibling(&self) -> Option<TreePath> {
        let mut ordinals = self.0.clone();
        let last = ordinals.last_mut()?;
        *last += 1u32;
        Some(TreePath(ordinals))
    }

    /// `self` followed by every ordinal of `tail`.
    pub fn join(&self, tail: &TreePath) -> TreePath {
        let mut ordinals = self.0.clone();
        ordinals.extend(tail.0.iter().cloned());
        TreePath(ordinals)
    }

    pub fn starts_with(&self, prefix: &TreePath) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Bracket notation, e.g. `[◦ 2 ◦ 4 ◦ 3]`.
    pub fn to_bracket_string(&self) -> String {
        let mut out = String::from("[");
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str("◦ ");
            out.push_str(&o.to_string());
        }
        out.push(']');
        out
    }
}

impl From<TreePath> for Vec<BigUint> {
    fn from(path: TreePath) -> Self {
        path.0
    }
}

/// Dotted decimal form, e.g. `2.4.3`. The super-root prints as the empty string.
impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

/// Accepts the dotted form (`2.4.3`) or the bracket form (`[◦ 2 ◦ 4 ◦ 3]`).
impl FromStr for TreePath {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let terms: Vec<&str> = if let Some(inner) = trimmed
            .strip_prefix('[')
            .and_then(|rest| rest.strip_suffix(']'))
        {
            inner
                .split(|c: char| c == '◦' || c == '∘' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect()
        } else if trimmed.is_empty() {
            Vec::new()
        } else {
            trimmed.split('.').collect()
        };

        let mut ordinals = Vec::with_capacity(terms.len());
        for term in terms {
            let o = parse_decimal(term).ok_or_else(|| KeyError::parse("tree path", s))?;
            ordinals.push(o);
        }
        TreePath::new(ordinals)
    }
}

/// Canonical unsigned decimal: digits only, no sign, no leading zeros.
pub(crate) fn parse_decimal(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if s.len() > 1 && s.starts_with('0') {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}
