//! Unimodular 2×2 maps for inverting keys and relocating subtrees.

use std::fmt;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use crate::error::KeyError;
use crate::key::NodeKey;

/// Integer matrix `[[a, b], [c, d]]` with determinant ±1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelocationMap {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl RelocationMap {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self, KeyError> {
        let m = RelocationMap { a, b, c, d };
        if m.determinant().abs().is_one() {
            Ok(m)
        } else {
            Err(KeyError::CorruptKey(format!(
                "matrix {m} has determinant {}",
                m.determinant()
            )))
        }
    }

    pub fn identity() -> Self {
        RelocationMap {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    /// The key's matrix `[[nv, snv], [dv, sdv]]`.
    pub fn of_key(key: &NodeKey) -> Self {
        RelocationMap {
            a: BigInt::from(key.nv().clone()),
            b: BigInt::from(key.snv().clone()),
            c: BigInt::from(key.dv().clone()),
            d: BigInt::from(key.sdv().clone()),
        }
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn determinant(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_identity(&self) -> bool {
        *self == RelocationMap::identity()
    }

    /// Exact integer inverse (determinant is ±1).
    pub fn inverse(&self) -> RelocationMap {
        let det = self.determinant();
        RelocationMap {
            a: &self.d * &det,
            b: -&self.b * &det,
            c: -&self.c * &det,
            d: &self.a * &det,
        }
    }

    fn mul_raw(&self, rhs: &RelocationMap) -> RelocationMap {
        RelocationMap {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

impl Mul for &RelocationMap {
    type Output = RelocationMap;

    fn mul(self, rhs: &RelocationMap) -> RelocationMap {
        self.mul_raw(rhs)
    }
}

impl fmt::Display for RelocationMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Inverse of the key's matrix, `[[-sdv, snv], [dv, -nv]]`.
pub fn invert_key(key: &NodeKey) -> Result<RelocationMap, KeyError> {
    if key.determinant() != BigInt::from(-1) {
        return Err(KeyError::CorruptKey(format!(
            "{key} has determinant {}",
            key.determinant()
        )));
    }
    Ok(RelocationMap {
        a: -BigInt::from(key.sdv().clone()),
        b: BigInt::from(key.snv().clone()),
        c: BigInt::from(key.dv().clone()),
        d: -BigInt::from(key.nv().clone()),
    })
}

/// Map that rewrites every key under the `n`-th child of `from_parent` to the
/// corresponding key under the `m`-th child of `to_parent`:
/// `to_parent · [[1, 0], [m − n, 1]] · from_parent⁻¹`.
pub fn relocation_map<N, M>(
    from_parent: &NodeKey,
    n: N,
    to_parent: &NodeKey,
    m: M,
) -> Result<RelocationMap, KeyError>
where
    N: Into<BigUint>,
    M: Into<BigUint>,
{
    let (n, m) = (n.into(), m.into());
    for ordinal in [&n, &m] {
        if ordinal.is_zero() {
            return Err(KeyError::InvalidOrdinal(ordinal.to_string()));
        }
    }
    let shift = RelocationMap {
        a: BigInt::one(),
        b: BigInt::zero(),
        c: BigInt::from(m) - BigInt::from(n),
        d: BigInt::one(),
    };
    let from_inverse = invert_key(from_parent)?;
    let to = RelocationMap::of_key(to_parent);
    Ok(&(&to * &shift) * &from_inverse)
}

/// Applies `map` to the matrix of `key`. Fails when the product is not the
/// key of any tree node, which happens when `key` was not inside the moved
/// subtree.
pub fn apply_relocation(map: &RelocationMap, key: &NodeKey) -> Result<NodeKey, KeyError> {
    let moved = map * &RelocationMap::of_key(key);
    let domain = |why: &str| KeyError::RelocationDomain(format!("{key} maps to {moved}: {why}"));
    let [nv, snv, dv, sdv] = [&moved.a, &moved.b, &moved.c, &moved.d].map(non_negative);
    match (nv, dv, snv, sdv) {
        (Some(nv), Some(dv), Some(snv), Some(sdv)) => {
            NodeKey::new(nv, dv, snv, sdv).map_err(|e| domain(&e.to_string()))
        }
        _ => Err(domain("negative component")),
    }
}

fn non_negative(x: &BigInt) -> Option<BigUint> {
    match x.sign() {
        Sign::Minus => None,
        _ => x.to_biguint(),
    }
}
