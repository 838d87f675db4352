//! In-memory node table ordered by key, persisted as one text line per record.
//!
//! Records are kept in a `BTreeMap` under the rational order of their keys,
//! so iteration is preorder and a subtree is one contiguous range. Mutation
//! needs `&mut TreeStore`; any number of readers may share `&TreeStore`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::ops::Bound;
use std::path::Path;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::error::KeyError;
use crate::key::{child_key, cmp_values, decode_key, is_descendant, next_sibling_key, NodeKey};
use crate::matrix::{apply_relocation, relocation_map};

pub mod format;
pub mod sql;

pub use sql::{emit_sql_predicate, PredicateKind, SqlColumns};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Key(#[from] KeyError),

    #[error("parent {0} is not in the store")]
    MissingParent(String),

    #[error("no node {0} in the store")]
    MissingChild(String),

    #[error("slot {requested} under {parent} is not free; next free ordinal is {next_free}")]
    SlotConflict {
        parent: String,
        requested: BigUint,
        next_free: BigUint,
    },

    #[error("cannot move {0} underneath itself")]
    IntoOwnSubtree(String),

    #[error("key {0} appears more than once")]
    DuplicateKey(String),

    #[error("invalid column name {0:?}")]
    BadColumn(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub key: NodeKey,
    pub payload: String,
}

/// Orders non-root keys by their rational value.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ByValue(NodeKey);

impl Ord for ByValue {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_values(&self.0, &other.0)
    }
}

impl PartialOrd for ByValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    payload: String,
    /// Highest ordinal ever handed out below this node.
    children: BigUint,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeStore {
    records: BTreeMap<ByValue, Entry>,
    top_level_children: BigUint,
}

impl TreeStore {
    pub fn new() -> Self {
        TreeStore::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains(&self, key: &NodeKey) -> bool {
        !key.is_root() && self.records.contains_key(&ByValue(key.clone()))
    }

    pub fn get(&self, key: &NodeKey) -> Option<NodeRecord> {
        if key.is_root() {
            return None;
        }
        self.records.get(&ByValue(key.clone())).map(|e| NodeRecord {
            key: key.clone(),
            payload: e.payload.clone(),
        })
    }

    /// Every record in key order, which is the preorder of the tree.
    pub fn iter(&self) -> impl Iterator<Item = NodeRecord> + '_ {
        self.records.iter().map(|(k, e)| NodeRecord {
            key: k.0.clone(),
            payload: e.payload.clone(),
        })
    }

    /// Number of child ordinals allocated below `parent` so far.
    pub fn child_count(&self, parent: &NodeKey) -> Option<BigUint> {
        if parent.is_root() {
            Some(self.top_level_children.clone())
        } else {
            self.records
                .get(&ByValue(parent.clone()))
                .map(|e| e.children.clone())
        }
    }

    fn children_mut(&mut self, parent: &NodeKey) -> Option<&mut BigUint> {
        if parent.is_root() {
            Some(&mut self.top_level_children)
        } else {
            self.records
                .get_mut(&ByValue(parent.clone()))
                .map(|e| &mut e.children)
        }
    }

    /// Adds a new last child below `parent` (the super-root for a top-level
    /// node). Writes exactly one record.
    pub fn insert_child(
        &mut self,
        parent: &NodeKey,
        payload: impl Into<String>,
    ) -> Result<NodeRecord, StoreError> {
        let counter = self
            .children_mut(parent)
            .ok_or_else(|| StoreError::MissingParent(parent.to_string()))?;
        *counter += 1u32;
        let key = child_key(parent, counter.clone())?;
        let payload = payload.into();
        self.records.insert(
            ByValue(key.clone()),
            Entry {
                payload: payload.clone(),
                children: BigUint::zero(),
            },
        );
        Ok(NodeRecord { key, payload })
    }

    /// Records strictly between `key` and its next sibling, in key order.
    /// The super-root's subtree is the whole store.
    pub fn subtree(&self, key: &NodeKey) -> Vec<NodeRecord> {
        self.subtree_keys(key)
            .into_iter()
            .map(|k| self.get(&k).expect("key was just listed"))
            .collect()
    }

    fn subtree_keys(&self, key: &NodeKey) -> Vec<NodeKey> {
        if key.is_root() {
            return self.records.keys().map(|k| k.0.clone()).collect();
        }
        let lower = ByValue(key.clone());
        let upper = ByValue(next_sibling_key(key).expect("non-root key has a sibling"));
        self.records
            .range((Bound::Excluded(&lower), Bound::Excluded(&upper)))
            .map(|(k, _)| k.0.clone())
            .collect()
    }

    /// Keys of every ancestor of `key`, top level first, excluding `key`.
    /// Computed from the key alone; the table is not consulted.
    pub fn ancestors(&self, key: &NodeKey) -> Result<Vec<NodeKey>, StoreError> {
        if key.is_root() {
            return Ok(Vec::new());
        }
        let decoded = decode_key(key.nv(), key.dv())?;
        Ok(decoded.ancestors().to_vec())
    }

    /// Moves the `n`-th child of `from_parent`, with its whole subtree, to
    /// become the `m`-th child of `to_parent`. `m` must be the next free
    /// ordinal under `to_parent`, except for the no-op move onto itself.
    /// Returns the number of records rewritten.
    pub fn move_subtree<N, M>(
        &mut self,
        from_parent: &NodeKey,
        n: N,
        to_parent: &NodeKey,
        m: M,
    ) -> Result<usize, StoreError>
    where
        N: Into<BigUint>,
        M: Into<BigUint>,
    {
        let (n, m) = (n.into(), m.into());
        let moved = child_key(from_parent, n.clone())?;
        if !self.contains(&moved) {
            return Err(StoreError::MissingChild(moved.to_string()));
        }
        let destination = child_key(to_parent, m.clone())?;
        let next_free = self
            .child_count(to_parent)
            .ok_or_else(|| StoreError::MissingParent(to_parent.to_string()))?
            + BigUint::one();

        let in_place = destination == moved;
        if !in_place {
            if *to_parent == moved || (!to_parent.is_root() && is_descendant(&moved, to_parent)?) {
                return Err(StoreError::IntoOwnSubtree(moved.to_string()));
            }
            if m != next_free {
                return Err(StoreError::SlotConflict {
                    parent: to_parent.to_string(),
                    requested: m,
                    next_free,
                });
            }
        }

        let map = relocation_map(from_parent, n, to_parent, m.clone())?;
        let mut old_keys = vec![moved.clone()];
        old_keys.extend(self.subtree_keys(&moved));

        // Compute every new key before touching the table.
        let mut rewritten = Vec::with_capacity(old_keys.len());
        for old in &old_keys {
            rewritten.push(apply_relocation(&map, old)?);
        }

        let mut entries = Vec::with_capacity(old_keys.len());
        for old in &old_keys {
            entries.push(
                self.records
                    .remove(&ByValue(old.clone()))
                    .expect("listed key is present"),
            );
        }
        for (new, entry) in rewritten.into_iter().zip(entries) {
            self.records.insert(ByValue(new), entry);
        }
        if !in_place {
            *self
                .children_mut(to_parent)
                .expect("destination checked above") = m;
        }
        Ok(old_keys.len())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for record in self.iter() {
            out.write_all(format::encode_record(&record).as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("records are UTF-8")
    }

    /// Reads records in any order and checks that keys are unique and every
    /// non-top-level record's parent is present.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self, StoreError> {
        let mut store = TreeStore::new();
        for (i, line) in input.split(b'\n').enumerate() {
            let line = line?;
            let text = String::from_utf8(line).map_err(|_| StoreError::Format {
                line: i + 1,
                message: "not UTF-8".to_owned(),
            })?;
            let record = format::decode_record(&text, i + 1)?;
            let slot = ByValue(record.key.clone());
            if store.records.contains_key(&slot) {
                return Err(StoreError::DuplicateKey(record.key.to_string()));
            }
            store.records.insert(
                slot,
                Entry {
                    payload: record.payload,
                    children: BigUint::zero(),
                },
            );
        }

        let keys: Vec<NodeKey> = store.records.keys().map(|k| k.0.clone()).collect();
        for key in keys {
            let path = key.path();
            let ordinal = path
                .last()
                .expect("stored keys are not the super-root")
                .clone();
            let parent = key.parent().expect("stored keys are not the super-root");
            let counter = store
                .children_mut(&parent)
                .ok_or_else(|| StoreError::MissingParent(parent.to_string()))?;
            if *counter < ordinal {
                *counter = ordinal;
            }
        }
        Ok(store)
    }

    pub fn from_text(text: &str) -> Result<Self, StoreError> {
        TreeStore::read_from(text.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let file = fs::File::open(path)?;
        TreeStore::read_from(io::BufReader::new(file))
    }

    /// Replaces the file at `path` by writing a sibling temporary and renaming it.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let path = path.as_ref();
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        {
            let file = fs::File::create(&tmp)?;
            self.write_to(io::BufWriter::new(file))?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
