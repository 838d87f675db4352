//! Fixed-width keys for shallow trees. Every operation is checked and reports
//! [`KeyError::Overflow`] instead of wrapping.

use crate::error::KeyError;
use crate::key::NodeKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FastKey {
    pub nv: u64,
    pub dv: u64,
    pub snv: u64,
    pub sdv: u64,
}

impl FastKey {
    pub const ROOT: FastKey = FastKey {
        nv: 0,
        dv: 1,
        snv: 1,
        sdv: 0,
    };

    pub fn child(&self, c: u64) -> Result<FastKey, KeyError> {
        if c == 0 {
            return Err(KeyError::InvalidOrdinal("0".into()));
        }
        let step = |base: u64, sib: u64| {
            sib.checked_mul(c)
                .and_then(|x| x.checked_add(base))
                .ok_or(KeyError::Overflow)
        };
        let nv = step(self.nv, self.snv)?;
        let dv = step(self.dv, self.sdv)?;
        let snv = nv.checked_add(self.snv).ok_or(KeyError::Overflow)?;
        let sdv = dv.checked_add(self.sdv).ok_or(KeyError::Overflow)?;
        Ok(FastKey { nv, dv, snv, sdv })
    }

    pub fn encode(ordinals: &[u64]) -> Result<FastKey, KeyError> {
        ordinals
            .iter()
            .try_fold(FastKey::ROOT, |key, &c| key.child(c))
    }

    pub fn to_key(self) -> NodeKey {
        NodeKey::from_parts_unchecked(
            self.nv.into(),
            self.dv.into(),
            self.snv.into(),
            self.sdv.into(),
        )
    }
}

impl TryFrom<&NodeKey> for FastKey {
    type Error = KeyError;

    fn try_from(key: &NodeKey) -> Result<Self, Self::Error> {
        let narrow = |x: &num_bigint::BigUint| u64::try_from(x).map_err(|_| KeyError::Overflow);
        Ok(FastKey {
            nv: narrow(key.nv())?,
            dv: narrow(key.dv())?,
            snv: narrow(key.snv())?,
            sdv: narrow(key.sdv())?,
        })
    }
}
