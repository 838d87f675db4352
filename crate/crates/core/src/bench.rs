//! Write-cost comparison between classic left/right-value nested sets and
//! rational keys.
//!
//! The same random workload drives both encodings. After every operation the
//! persisted form of every row is compared with the one before it; a row
//! counts as touched when it is new or its bytes changed.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::key::{root_key, NodeKey};
use crate::oracle::NaiveTree;
use crate::path::TreePath;
use crate::store::{StoreError, TreeStore};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid workload: {0}")]
    InvalidSpec(String),

    #[error("no node at {0}")]
    MissingParent(String),

    #[error("position {position} is out of range under {parent}")]
    BadPosition { parent: String, position: usize },

    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Left and right value of a node in a classic nested set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LvRvNode {
    pub lv: u64,
    pub rv: u64,
    pub path: TreePath,
}

/// Numbers every node of `tree` by a depth-first walk: `lv` on the way
/// down, `rv` on the way back up, starting at 1.
pub fn lvrv_encode(tree: &NaiveTree) -> BTreeMap<TreePath, LvRvNode> {
    LvRvTree::from_tree(tree).encode()
}

#[derive(Debug, Clone)]
struct Slot {
    parent: Option<usize>,
    children: Vec<usize>,
    lv: u64,
    rv: u64,
}

/// Mutable nested-set table. Slot 0 is the super-root, which holds no values.
#[derive(Debug, Clone)]
pub struct LvRvTree {
    slots: Vec<Slot>,
}

impl Default for LvRvTree {
    fn default() -> Self {
        LvRvTree::new()
    }
}

impl LvRvTree {
    pub fn new() -> Self {
        LvRvTree {
            slots: vec![Slot {
                parent: None,
                children: Vec::new(),
                lv: 0,
                rv: 1,
            }],
        }
    }

    pub fn from_tree(tree: &NaiveTree) -> Self {
        let mut out = LvRvTree::new();
        let mut stack = vec![(TreePath::root(), 0usize)];
        while let Some((path, id)) = stack.pop() {
            let count = tree.child_count(&path).unwrap_or(0);
            for c in 1..=count {
                let child = out.attach(id);
                stack.push((path.child(c).expect("ordinal is positive"), child));
            }
        }
        out.renumber();
        out
    }

    fn attach(&mut self, parent: usize) -> usize {
        let id = self.slots.len();
        self.slots.push(Slot {
            parent: Some(parent),
            children: Vec::new(),
            lv: 0,
            rv: 0,
        });
        self.slots[parent].children.push(id);
        id
    }

    /// Assigns fresh values by a full depth-first walk.
    fn renumber(&mut self) {
        let mut counter = 0u64;
        let mut stack = vec![(0usize, false)];
        while let Some((id, done)) = stack.pop() {
            if done {
                counter += 1;
                self.slots[id].rv = counter;
                continue;
            }
            if id != 0 {
                counter += 1;
            }
            self.slots[id].lv = counter;
            stack.push((id, true));
            for &child in self.slots[id].children.iter().rev() {
                stack.push((child, false));
            }
        }
        // The super-root spans everything and is not a row.
        self.slots[0].lv = 0;
    }

    /// Number of nodes, not counting the super-root.
    pub fn len(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn find(&self, path: &TreePath) -> Option<usize> {
        let mut id = 0;
        for ordinal in path.ordinals() {
            let index = usize::try_from(ordinal).ok()?.checked_sub(1)?;
            id = *self.slots[id].children.get(index)?;
        }
        Some(id)
    }

    pub fn path_of(&self, mut id: usize) -> TreePath {
        let mut ordinals = Vec::new();
        while let Some(parent) = self.slots[id].parent {
            let index = self.slots[parent]
                .children
                .iter()
                .position(|&c| c == id)
                .expect("child is listed under its parent");
            ordinals.push(BigUint::from(index + 1));
            id = parent;
        }
        ordinals.reverse();
        TreePath::new(ordinals).expect("ordinals are positive")
    }

    pub fn depth(&self, mut id: usize) -> usize {
        let mut depth = 0;
        while let Some(parent) = self.slots[id].parent {
            depth += 1;
            id = parent;
        }
        depth
    }

    pub fn values(&self, id: usize) -> (u64, u64) {
        (self.slots[id].lv, self.slots[id].rv)
    }

    pub fn encode(&self) -> BTreeMap<TreePath, LvRvNode> {
        (1..self.slots.len())
            .map(|id| {
                let path = self.path_of(id);
                let node = LvRvNode {
                    lv: self.slots[id].lv,
                    rv: self.slots[id].rv,
                    path: path.clone(),
                };
                (path, node)
            })
            .collect()
    }

    /// Node ids in preorder (ascending `lv`).
    pub fn preorder(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (1..self.slots.len()).collect();
        ids.sort_by_key(|&id| self.slots[id].lv);
        ids
    }

    fn is_within(&self, mut id: usize, ancestor: usize) -> bool {
        loop {
            if id == ancestor {
                return true;
            }
            match self.slots[id].parent {
                Some(parent) => id = parent,
                None => return false,
            }
        }
    }

    /// Inserts a new node as the `position`-th (1-based) child of `parent`,
    /// opening a gap of two at the insertion point. Returns the new node's id
    /// and how many existing nodes had a value renumbered.
    pub fn insert_at(
        &mut self,
        parent: usize,
        position: usize,
    ) -> Result<(usize, usize), BenchError> {
        let siblings = &self.slots[parent].children;
        if position == 0 || position > siblings.len() + 1 {
            return Err(BenchError::BadPosition {
                parent: self.path_of(parent).to_string(),
                position,
            });
        }
        let gap = if position == 1 {
            self.slots[parent].lv + 1
        } else {
            self.slots[siblings[position - 2]].rv + 1
        };

        let mut renumbered = 0;
        for slot in self.slots.iter_mut().skip(1) {
            let mut changed = false;
            if slot.lv >= gap {
                slot.lv += 2;
                changed = true;
            }
            if slot.rv >= gap {
                slot.rv += 2;
                changed = true;
            }
            renumbered += usize::from(changed);
        }
        self.slots[0].rv += 2;

        let id = self.slots.len();
        self.slots.push(Slot {
            parent: Some(parent),
            children: Vec::new(),
            lv: gap,
            rv: gap + 1,
        });
        self.slots[parent].children.insert(position - 1, id);
        Ok((id, renumbered))
    }

    /// Re-hangs `node` with its subtree as the last child of `new_parent`
    /// and renumbers. Returns how many nodes had a value changed.
    pub fn move_subtree(&mut self, node: usize, new_parent: usize) -> Result<usize, BenchError> {
        if node == 0 || self.is_within(new_parent, node) {
            return Err(BenchError::InvalidSpec(format!(
                "cannot move {} under {}",
                self.path_of(node),
                self.path_of(new_parent)
            )));
        }
        let before: Vec<(u64, u64)> = self.slots.iter().map(|s| (s.lv, s.rv)).collect();
        let old_parent = self.slots[node].parent.expect("non-root node has a parent");
        self.slots[old_parent].children.retain(|&c| c != node);
        self.slots[new_parent].children.push(node);
        self.slots[node].parent = Some(new_parent);
        self.renumber();
        Ok(self
            .slots
            .iter()
            .zip(before)
            .skip(1)
            .filter(|(s, old)| (s.lv, s.rv) != *old)
            .count())
    }

    /// Checks that values are exactly `1..=2N`, that `lv < rv`, and that for
    /// every pair the intervals nest iff one node is an ancestor of the other
    /// and are disjoint otherwise.
    pub fn is_valid_nested_set(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; 2 * n + 1];
        for slot in &self.slots[1..] {
            for v in [slot.lv, slot.rv] {
                let Some(flag) = usize::try_from(v).ok().and_then(|v| seen.get_mut(v)) else {
                    return false;
                };
                if v == 0 || *flag {
                    return false;
                }
                *flag = true;
            }
            if slot.lv >= slot.rv {
                return false;
            }
        }
        for a in 1..self.slots.len() {
            for b in 1..self.slots.len() {
                if a == b {
                    continue;
                }
                let (sa, sb) = (&self.slots[a], &self.slots[b]);
                let nested = sa.lv < sb.lv && sb.rv < sa.rv;
                let disjoint = sa.rv < sb.lv || sb.rv < sa.lv;
                let reverse = sb.lv < sa.lv && sa.rv < sb.rv;
                let b_under_a = self.is_within(b, a);
                if nested != b_under_a || !(nested || disjoint || reverse) {
                    return false;
                }
            }
        }
        true
    }
}

/// Inserts a node as the `position`-th child of the node at `parent_path`;
/// returns how many existing nodes were renumbered.
pub fn lvrv_insert(
    tree: &mut LvRvTree,
    parent_path: &TreePath,
    position: usize,
) -> Result<usize, BenchError> {
    let parent = tree
        .find(parent_path)
        .ok_or_else(|| BenchError::MissingParent(parent_path.to_string()))?;
    tree.insert_at(parent, position)
        .map(|(_, renumbered)| renumbered)
}

/// How insert parents are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Parent uniform over all existing nodes and the super-root.
    Uniform,
    /// Parent drawn from the front of the preorder, which forces LV/RV to
    /// renumber most of the table.
    LeftHeavy,
    /// Always the first child of the node inserted last.
    Chain,
}

impl FromStr for Shape {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Shape::Uniform),
            "left-heavy" => Ok(Shape::LeftHeavy),
            "chain" => Ok(Shape::Chain),
            _ => Err(BenchError::InvalidSpec(format!("unknown shape {s:?}"))),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Uniform => "uniform",
            Shape::LeftHeavy => "left-heavy",
            Shape::Chain => "chain",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workload {
    pub inserts: usize,
    pub moves: usize,
    pub shape: Shape,
    pub seed: u64,
}

impl Workload {
    pub const MAX_OPS: usize = 100_000;

    fn validate(&self) -> Result<(), BenchError> {
        if self.inserts + self.moves > Workload::MAX_OPS {
            return Err(BenchError::InvalidSpec(format!(
                "at most {} operations",
                Workload::MAX_OPS
            )));
        }
        if self.moves > 0 && self.inserts < 2 {
            return Err(BenchError::InvalidSpec(
                "moves need at least two inserted nodes".into(),
            ));
        }
        if self.moves > 0 && self.shape == Shape::Chain {
            return Err(BenchError::InvalidSpec(
                "chain workloads are insert-only".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Encoding {
    LvRv,
    Rational,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::LvRv => "lvrv",
            Encoding::Rational => "rational",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Insert,
    Move,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Insert => "insert",
            OpKind::Move => "move",
        })
    }
}

/// Rows touched per operation: histogram plus running totals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpStats {
    pub histogram: BTreeMap<usize, usize>,
    pub ops: usize,
    pub rows_total: usize,
    pub rows_max: usize,
}

impl OpStats {
    fn record(&mut self, rows: usize) {
        *self.histogram.entry(rows).or_default() += 1;
        self.ops += 1;
        self.rows_total += rows;
        self.rows_max = self.rows_max.max(rows);
    }

    pub fn mean(&self) -> f64 {
        if self.ops == 0 {
            0.0
        } else {
            self.rows_total as f64 / self.ops as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub workload: Workload,
    pub stats: BTreeMap<(Encoding, OpKind), OpStats>,
    /// Largest `nv` bit length among rational keys at each depth (top level = 1).
    pub nv_bits_by_depth: BTreeMap<usize, u64>,
    /// Rows touched by each rational-key move, paired with the size of the
    /// moved subtree.
    pub move_sizes: Vec<(usize, usize)>,
    /// Whether sorting by `lv` and sorting by rational key list the nodes in
    /// the same order after the workload.
    pub preorder_agrees: bool,
}

impl BenchReport {
    pub fn stats(&self, encoding: Encoding, op: OpKind) -> Option<&OpStats> {
        self.stats.get(&(encoding, op))
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Deterministic tab-separated rendering.
    pub fn to_tsv(&self) -> String {
        let w = &self.workload;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# workload\tshape={}\tinserts={}\tmoves={}\tseed={}",
            w.shape, w.inserts, w.moves, w.seed
        );
        out.push_str("encoding\top\tops\trows_total\trows_mean\trows_max\n");
        for ((encoding, op), s) in &self.stats {
            let _ = writeln!(
                out,
                "{encoding}\t{op}\t{}\t{}\t{:.3}\t{}",
                s.ops,
                s.rows_total,
                s.mean(),
                s.rows_max
            );
        }
        out.push_str("\nencoding\top\trows_touched\tops\n");
        for ((encoding, op), s) in &self.stats {
            for (rows, ops) in &s.histogram {
                let _ = writeln!(out, "{encoding}\t{op}\t{rows}\t{ops}");
            }
        }
        out.push_str("\ndepth\tmax_nv_bits\n");
        for (depth, bits) in &self.nv_bits_by_depth {
            let _ = writeln!(out, "{depth}\t{bits}");
        }
        let _ = writeln!(out, "\npreorder_agrees\t{}", self.preorder_agrees);
        out
    }
}

struct Run {
    rng: ChaCha8Rng,
    lvrv: LvRvTree,
    store: TreeStore,
    /// Current rational key of every node id (ids shared with `lvrv`).
    keys: HashMap<usize, NodeKey>,
    last_inserted: usize,
}

impl Run {
    fn key_of(&self, id: usize) -> NodeKey {
        if id == 0 {
            root_key()
        } else {
            self.keys[&id].clone()
        }
    }

    fn lvrv_snapshot(&self) -> HashMap<usize, (u64, u64)> {
        (1..=self.lvrv.len())
            .map(|id| (id, self.lvrv.values(id)))
            .collect()
    }

    fn store_snapshot(&self) -> HashMap<String, NodeKey> {
        self.store.iter().map(|r| (r.payload, r.key)).collect()
    }

    fn choose_parent(&mut self, shape: Shape) -> usize {
        let n = self.lvrv.len();
        match shape {
            Shape::Uniform => self.rng.gen_range(0..=n),
            Shape::Chain => self.last_inserted,
            Shape::LeftHeavy => {
                // Cubing a uniform draw concentrates picks at the front.
                let u: f64 = self.rng.gen();
                let index = ((n + 1) as f64 * u * u * u) as usize;
                if index == 0 {
                    0
                } else {
                    self.lvrv.preorder()[index.min(n) - 1]
                }
            }
        }
    }

    fn insert(&mut self, shape: Shape, report: &mut BenchReport) -> Result<(), BenchError> {
        let parent = self.choose_parent(shape);

        let before = self.lvrv_snapshot();
        let position = self.lvrv.slots[parent].children.len() + 1;
        let (id, _) = self.lvrv.insert_at(parent, position)?;
        let touched = diff_count(&before, &self.lvrv_snapshot());
        report
            .stats
            .entry((Encoding::LvRv, OpKind::Insert))
            .or_default()
            .record(touched);

        let before = self.store_snapshot();
        let record = self
            .store
            .insert_child(&self.key_of(parent), id.to_string())?;
        let touched = diff_count(&before, &self.store_snapshot());
        report
            .stats
            .entry((Encoding::Rational, OpKind::Insert))
            .or_default()
            .record(touched);

        self.keys.insert(id, record.key);
        self.last_inserted = id;
        Ok(())
    }

    fn relocate(&mut self, report: &mut BenchReport) -> Result<(), BenchError> {
        let n = self.lvrv.len();
        let node = self.rng.gen_range(1..=n);
        // Any destination outside the moved subtree, super-root included.
        let candidates: Vec<usize> = (0..=n).filter(|&d| !self.lvrv.is_within(d, node)).collect();
        let dest = candidates[self.rng.gen_range(0..candidates.len())];

        let before = self.lvrv_snapshot();
        self.lvrv.move_subtree(node, dest)?;
        let touched = diff_count(&before, &self.lvrv_snapshot());
        report
            .stats
            .entry((Encoding::LvRv, OpKind::Move))
            .or_default()
            .record(touched);

        let moved_key = self.key_of(node);
        let from_parent = moved_key.parent().expect("non-root key has a parent");
        let ordinal = moved_key.path().last().expect("non-root path").clone();
        let to_parent = self.key_of(dest);
        let slot = self
            .store
            .child_count(&to_parent)
            .expect("destination is stored")
            + 1u32;

        let before = self.store_snapshot();
        let rewritten = self
            .store
            .move_subtree(&from_parent, ordinal, &to_parent, slot.clone())?;
        let after = self.store_snapshot();
        let touched = diff_count(&before, &after);
        report
            .stats
            .entry((Encoding::Rational, OpKind::Move))
            .or_default()
            .record(touched);
        report.move_sizes.push((touched, rewritten));

        for (payload, key) in after {
            let id: usize = payload.parse().expect("payloads are node ids");
            self.keys.insert(id, key);
        }
        Ok(())
    }
}

fn diff_count<K, V>(before: &HashMap<K, V>, after: &HashMap<K, V>) -> usize
where
    K: std::hash::Hash + Eq,
    V: PartialEq,
{
    after
        .iter()
        .filter(|(k, v)| before.get(k) != Some(v))
        .count()
}

/// Runs the workload against both encodings. Deterministic for a fixed seed.
pub fn run_workload(workload: &Workload) -> Result<BenchReport, BenchError> {
    workload.validate()?;
    let mut report = BenchReport {
        workload: workload.clone(),
        stats: BTreeMap::new(),
        nv_bits_by_depth: BTreeMap::new(),
        move_sizes: Vec::new(),
        preorder_agrees: true,
    };
    let mut run = Run {
        rng: ChaCha8Rng::seed_from_u64(workload.seed),
        lvrv: LvRvTree::new(),
        store: TreeStore::new(),
        keys: HashMap::new(),
        last_inserted: 0,
    };

    let (mut inserts_left, mut moves_left) = (workload.inserts, workload.moves);
    while inserts_left + moves_left > 0 {
        let can_move = run.lvrv.len() >= 2;
        let do_move = moves_left > 0
            && (inserts_left == 0
                || (can_move && run.rng.gen_range(0..inserts_left + moves_left) < moves_left));
        if do_move {
            run.relocate(&mut report)?;
            moves_left -= 1;
        } else {
            run.insert(workload.shape, &mut report)?;
            inserts_left -= 1;
        }
    }

    for (id, key) in &run.keys {
        let bits = report
            .nv_bits_by_depth
            .entry(run.lvrv.depth(*id))
            .or_default();
        *bits = (*bits).max(key.nv().bits());
    }
    let by_key: Vec<usize> = run
        .store
        .iter()
        .map(|r| r.payload.parse().expect("payloads are node ids"))
        .collect();
    report.preorder_agrees = by_key == run.lvrv.preorder();
    Ok(report)
}
