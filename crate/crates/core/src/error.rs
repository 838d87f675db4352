use num_bigint::BigUint;
use thiserror::Error;

/// Failures of the key algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KeyError {
    #[error("invalid ordinal {0}: sibling ordinals start at 1")]
    InvalidOrdinal(String),

    #[error("{nv}/{dv} is not in lowest terms")]
    NotCanonical { nv: BigUint, dv: BigUint },

    #[error("{nv}/{dv} is not the key of any tree node")]
    NotANode { nv: BigUint, dv: BigUint },

    #[error("the super-root has no siblings")]
    NoSibling,

    #[error("the super-root has no rational value")]
    RootKey,

    #[error("corrupt key: {0}")]
    CorruptKey(String),

    #[error("relocated key falls outside the tree: {0}")]
    RelocationDomain(String),

    #[error("64-bit key arithmetic overflowed")]
    Overflow,

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

impl KeyError {
    pub(crate) fn parse(what: &'static str, input: &str) -> Self {
        KeyError::Parse {
            what,
            input: input.to_owned(),
        }
    }
}
