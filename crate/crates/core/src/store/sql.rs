//! SQL `WHERE` fragments for ancestor and descendant filtering.
//!
//! Rationals never reach the database: every comparison is cross-multiplied
//! so the predicate stays in integer arithmetic. Ordering by key cannot be
//! written that way, so result sets still have to be sorted client-side.

use std::fmt;
use std::str::FromStr;

use crate::error::KeyError;
use crate::key::NodeKey;

use super::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKind {
    Ancestors,
    Descendants,
}

impl FromStr for PredicateKind {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ancestors" => Ok(PredicateKind::Ancestors),
            "descendants" => Ok(PredicateKind::Descendants),
            _ => Err(KeyError::parse("predicate kind", s)),
        }
    }
}

impl fmt::Display for PredicateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredicateKind::Ancestors => "ancestors",
            PredicateKind::Descendants => "descendants",
        })
    }
}

/// Column names holding the four key components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqlColumns {
    pub nv: String,
    pub dv: String,
    pub snv: String,
    pub sdv: String,
}

impl Default for SqlColumns {
    fn default() -> Self {
        SqlColumns {
            nv: "nv".into(),
            dv: "dv".into(),
            snv: "snv".into(),
            sdv: "sdv".into(),
        }
    }
}

impl SqlColumns {
    fn validate(&self) -> Result<(), StoreError> {
        for name in [&self.nv, &self.dv, &self.snv, &self.sdv] {
            if !is_identifier(name) {
                return Err(StoreError::BadColumn(name.clone()));
            }
        }
        Ok(())
    }
}

/// Plain or dotted (`t.nv`) identifiers only.
fn is_identifier(name: &str) -> bool {
    !name.is_empty()
        && name.split('.').all(|part| {
            let mut chars = part.chars();
            matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

/// Emits the filter selecting rows that are ancestors or descendants of `key`.
///
/// Descendants of `(nv, dv, snv, sdv)`:
/// `(<nv> * dv > nv * <dv>) AND (<nv> * sdv < snv * <dv>)`.
///
/// Ancestors test the row's own interval against `nv/dv`, so they also read
/// the sibling columns:
/// `(<nv> * dv < nv * <dv>) AND (<snv> * dv > nv * <sdv>)`.
pub fn emit_sql_predicate(
    kind: PredicateKind,
    key: &NodeKey,
    columns: &SqlColumns,
) -> Result<String, StoreError> {
    columns.validate()?;
    let c = columns;
    match kind {
        PredicateKind::Descendants => Ok(format!(
            "({nvc} * {dv} > {nv} * {dvc}) AND ({nvc} * {sdv} < {snv} * {dvc})",
            nvc = c.nv,
            dvc = c.dv,
            nv = key.nv(),
            dv = key.dv(),
            snv = key.snv(),
            sdv = key.sdv(),
        )),
        PredicateKind::Ancestors => {
            if key.is_root() {
                return Err(KeyError::RootKey.into());
            }
            Ok(format!(
                "({nvc} * {dv} < {nv} * {dvc}) AND ({snvc} * {dv} > {nv} * {sdvc})",
                nvc = c.nv,
                dvc = c.dv,
                snvc = c.snv,
                sdvc = c.sdv,
                nv = key.nv(),
                dv = key.dv(),
            ))
        }
    }
}
