//! Text and JSON family formats.
//!
//! Text: a header line `n=<int>`, then one member per line as either a
//! brace list `{1,3,4}` or a bitstring of length `n` (element 1 first).
//! Blank lines and `#` comments are ignored.
//!
//! JSON: `{"n": 6, "members": [[1,2],[3]], "metadata": {...}}`, where
//! `metadata` is optional and free-form.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::family::{GroundSize, SetFamily, SetMask};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilyJson {
    n: usize,
    members: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Value>,
}

pub fn parse_text(src: &str) -> Result<SetFamily> {
    let mut n: Option<GroundSize> = None;
    let mut masks = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse { line: line_no, msg };
        let Some(ground) = n else {
            let value = line
                .strip_prefix("n=")
                .or_else(|| line.strip_prefix("n ="))
                .ok_or_else(|| perr("expected header line n=<int>".into()))?;
            let v: usize = value.trim().parse().map_err(|_| perr(format!("bad ground size {value:?}")))?;
            n = Some(GroundSize::new(v).map_err(|e| perr(e.to_string()))?);
            continue;
        };
        let mask = if let Some(body) = line.strip_prefix('{') {
            let body = body
                .strip_suffix('}')
                .ok_or_else(|| perr("unterminated brace list".into()))?;
            let mut elems = Vec::new();
            for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                elems.push(tok.parse::<usize>().map_err(|_| perr(format!("bad element {tok:?}")))?);
            }
            SetMask::from_elements(ground, elems).map_err(|e| perr(e.to_string()))?
        } else if line.chars().all(|c| c == '0' || c == '1') {
            if line.len() != ground.get() {
                return Err(perr(format!("bitstring length {} != n = {}", line.len(), ground)));
            }
            line.chars()
                .enumerate()
                .filter(|(_, c)| *c == '1')
                .fold(SetMask::EMPTY, |m, (i, _)| m.with(i + 1))
        } else {
            return Err(perr(format!("cannot parse member {line:?}")));
        };
        masks.push(mask);
    }
    let n = n.ok_or(Error::Parse { line: 0, msg: "missing header n=<int>".into() })?;
    SetFamily::new(n, masks)
}

pub fn to_text(f: &SetFamily) -> String {
    let mut out = format!("n={}\n", f.n());
    for m in f {
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_json(src: &str) -> Result<SetFamily> {
    let (fam, _) = parse_json_with_metadata(src)?;
    Ok(fam)
}

pub fn parse_json_with_metadata(src: &str) -> Result<(SetFamily, Option<Value>)> {
    let raw: FamilyJson =
        serde_json::from_str(src).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
    let n = GroundSize::new(raw.n)?;
    let masks = raw
        .members
        .iter()
        .map(|m| SetMask::from_elements(n, m.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    Ok((SetFamily::new(n, masks)?, raw.metadata))
}

/// JSON value for a family; members as sorted element lists.
pub fn to_json_value(f: &SetFamily, metadata: Option<Value>) -> Value {
    let doc = FamilyJson {
        n: f.n().get(),
        members: f.iter().map(|m| m.elements().collect()).collect(),
        metadata,
    };
    serde_json::to_value(doc).expect("family serializes")
}

pub fn to_json(f: &SetFamily, metadata: Option<Value>) -> String {
    serde_json::to_string_pretty(&to_json_value(f, metadata)).expect("family serializes")
}

/// Reads either format, deciding by the first non-blank character.
pub fn parse_any(src: &str) -> Result<SetFamily> {
    if src.trim_start().starts_with('{') && src.contains("\"n\"") {
        parse_json(src)
    } else {
        parse_text(src)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_mixed_forms() {
        let src = "# a family\nn=4\n\n{1,3,4}\n0100  # element 2\n{}\n";
        let f = parse_text(src).unwrap();
        assert_eq!(f, SetFamily::from_sets(4, &[&[1, 3, 4], &[2], &[]]).unwrap());
        assert_eq!(parse_text(&to_text(&f)).unwrap(), f);
    }

    #[test]
    fn text_rejects_duplicates_and_bad_lengths() {
        assert!(matches!(parse_text("n=3\n{1}\n100\n"), Err(Error::DuplicateMember(_))));
        assert!(matches!(parse_text("n=3\n10\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_text("{1}\n").is_err());
        assert!(parse_text("n=3\n{4}\n").is_err());
    }

    #[test]
    fn json_round_trip_and_duplicates() {
        let f = SetFamily::from_sets(5, &[&[], &[1, 2], &[5]]).unwrap();
        let s = to_json(&f, Some(serde_json::json!({"kind": "K"})));
        let (g, meta) = parse_json_with_metadata(&s).unwrap();
        assert_eq!(g, f);
        assert_eq!(meta.unwrap()["kind"], "K");
        assert!(parse_json(r#"{"n": 3, "members": [[1,2],[2,1]]}"#).is_err());
        assert_eq!(parse_any(&s).unwrap(), f);
        assert_eq!(parse_any("n=5\n{}\n{1,2}\n{5}").unwrap(), f);
    }
}
