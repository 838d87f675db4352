//! Rational-number keys for nested-set tree hierarchies.
//!
//! Every node carries four integers `(nv, dv, snv, sdv)`: its own rational
//! key `nv/dv` and the key of its next sibling `snv/sdv`. Sorting by `nv/dv`
//! yields the depth-first preorder of the tree, a node's descendants are
//! exactly the keys strictly inside `(nv/dv, snv/sdv)`, a node's ancestors can
//! be recomputed from `nv/dv` alone, and whole subtrees move under a single
//! unimodular integer matrix.
//!
//! ```
//! use nestkey::{decode_key, encode_path, TreePath};
//!
//! let path: TreePath = "2.4.3".parse().unwrap();
//! let key = encode_path(&path);
//! assert_eq!(key.to_string(), "65/23:82/29");
//! assert_eq!(decode_key(key.nv(), key.dv()).unwrap().path, path);
//! ```

pub mod bench;
pub mod error;
pub mod fast;
pub mod key;
pub mod matrix;
pub mod oracle;
pub mod path;
pub mod store;

pub use error::KeyError;
pub use key::{
    child_key, compare_keys, decode_key, encode_path, is_ancestor, is_descendant, next_sibling_key,
    root_key, Decoded, NodeKey,
};
pub use matrix::{apply_relocation, invert_key, relocation_map, RelocationMap};
pub use path::TreePath;
pub use store::{NodeRecord, StoreError, TreeStore};
