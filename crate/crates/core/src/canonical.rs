//! Canonical JSON: sorted object keys, 2-space indentation, LF line endings,
//! trailing newline.

use serde::Serialize;

/// Pretty canonical form used for files and reports.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    // Going through `Value` sorts every object's keys (BTreeMap-backed map).
    let value = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

/// Compact canonical bytes, used as checksum input.
pub fn to_canonical_bytes<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let value = serde_json::to_value(value)?;
    serde_json::to_vec(&value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Unsorted {
        zeta: u8,
        alpha: Inner,
    }

    #[derive(Serialize)]
    struct Inner {
        y: u8,
        b: u8,
    }

    #[test]
    fn keys_sorted_at_every_depth() {
        let s = to_canonical_string(&Unsorted { zeta: 1, alpha: Inner { y: 2, b: 3 } }).unwrap();
        assert_eq!(s, "{\n  \"alpha\": {\n    \"b\": 3,\n    \"y\": 2\n  },\n  \"zeta\": 1\n}\n");
        let b = to_canonical_bytes(&Unsorted { zeta: 1, alpha: Inner { y: 2, b: 3 } }).unwrap();
        assert_eq!(b, br#"{"alpha":{"b":3,"y":2},"zeta":1}"#);
    }
}
