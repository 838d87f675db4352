//! Line format: `nv<TAB>dv<TAB>snv<TAB>sdv<TAB>payload`, LF-terminated, with
//! TAB, LF and backslash in the payload written as `\t`, `\n` and `\\`.

use num_bigint::BigUint;

use crate::key::NodeKey;
use crate::path::parse_decimal;

use super::{NodeRecord, StoreError};

pub fn escape_payload(payload: &str) -> String {
    let mut out = String::with_capacity(payload.len());
    for ch in payload.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out
}

pub fn unescape_payload(text: &str) -> Option<String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(ch) = chars.next() {
        match ch {
            '\\' => match chars.next()? {
                '\\' => out.push('\\'),
                't' => out.push('\t'),
                'n' => out.push('\n'),
                _ => return None,
            },
            '\t' | '\n' => return None,
            _ => out.push(ch),
        }
    }
    Some(out)
}

/// One record as it is persisted, without the trailing LF.
pub fn encode_record(record: &NodeRecord) -> String {
    let k = &record.key;
    format!(
        "{}\t{}\t{}\t{}\t{}",
        k.nv(),
        k.dv(),
        k.snv(),
        k.sdv(),
        escape_payload(&record.payload)
    )
}

/// Parses one line (without its LF); `line_no` is 1-based and only used for errors.
pub fn decode_record(line: &str, line_no: usize) -> Result<NodeRecord, StoreError> {
    let bad = |message: String| StoreError::Format {
        line: line_no,
        message,
    };
    let fields: Vec<&str> = line.splitn(5, '\t').collect();
    if fields.len() != 5 {
        return Err(bad(format!(
            "expected 5 tab-separated fields, found {}",
            fields.len()
        )));
    }
    let mut numbers: Vec<BigUint> = Vec::with_capacity(4);
    for field in &fields[..4] {
        numbers.push(parse_decimal(field).ok_or_else(|| bad(format!("bad integer {field:?}")))?);
    }
    let payload =
        unescape_payload(fields[4]).ok_or_else(|| bad("bad escape in payload".to_owned()))?;
    let mut numbers = numbers.into_iter();
    let mut next = || numbers.next().expect("four numbers parsed");
    let key = NodeKey::new(next(), next(), next(), next()).map_err(|e| bad(e.to_string()))?;
    if key.is_root() {
        return Err(bad("the super-root cannot be stored".to_owned()));
    }
    Ok(NodeRecord { key, payload })
}
