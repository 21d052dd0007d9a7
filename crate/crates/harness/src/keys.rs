//! Strict key checking for TOML trees against a reference tree.

use toml::Value;

use crate::error::{HarnessError, Result};

/// Every leaf path of `schema`, dotted. Arrays of tables contribute `name.N.key`
/// with N rendered as `0`.
pub fn leaf_paths(schema: &Value) -> Vec<String> {
    let mut out = Vec::new();
    collect(schema, String::new(), &mut out);
    out
}

fn collect(v: &Value, prefix: String, out: &mut Vec<String>) {
    match v {
        Value::Table(t) => {
            for (k, child) in t {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                collect(child, p, out);
            }
        }
        Value::Array(a) if a.first().is_some_and(Value::is_table) => collect(&a[0], format!("{prefix}.0"), out),
        _ => out.push(prefix),
    }
}

/// Closest known path to `key`, comparing against both full paths and their last segment.
pub fn nearest<'a>(key: &str, candidates: &'a [String]) -> Option<&'a str> {
    let leaf = key.rsplit('.').next().unwrap_or(key);
    candidates
        .iter()
        .map(|c| {
            let last = c.rsplit('.').next().unwrap_or(c);
            let d = strsim::levenshtein(key, c).min(strsim::levenshtein(leaf, last));
            (d, c.as_str())
        })
        .min_by_key(|(d, c)| (*d, c.len()))
        .map(|(_, c)| c)
}

pub fn unknown_key(key: &str, candidates: &[String]) -> HarnessError {
    match nearest(key, candidates) {
        Some(n) => HarnessError::config(format!("unknown key `{key}` (nearest valid key: `{n}`)")),
        None => HarnessError::config(format!("unknown key `{key}`")),
    }
}

/// Rejects keys of `value` absent from `schema`, and widens integers to floats
/// where the schema holds a float.
pub fn conform(value: &mut Value, schema: &Value, path: &str, candidates: &[String]) -> Result<()> {
    match (value, schema) {
        (Value::Table(t), Value::Table(s)) => {
            for (k, v) in t.iter_mut() {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match s.get(k) {
                    Some(child) => conform(v, child, &p, candidates)?,
                    None => return Err(unknown_key(&p, candidates)),
                }
            }
            Ok(())
        }
        (Value::Array(items), Value::Array(s)) => {
            if let Some(first) = s.first() {
                for (i, v) in items.iter_mut().enumerate() {
                    conform(v, first, &format!("{path}.{i}"), candidates)?;
                }
            }
            Ok(())
        }
        (v @ Value::Integer(_), Value::Float(_)) => {
            if let Value::Integer(i) = *v {
                *v = Value::Float(i as f64);
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Sets `path` (dotted, numeric segments index arrays) inside `root`. The path
/// must already exist.
pub fn set_path(root: &mut Value, path: &str, new: Value, candidates: &[String]) -> Result<()> {
    let mut cur = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (depth, seg) in segments.iter().enumerate() {
        let last = depth + 1 == segments.len();
        let next = match cur {
            Value::Table(t) => t.get_mut(*seg),
            Value::Array(a) => seg.parse::<usize>().ok().and_then(|i| a.get_mut(i)),
            _ => None,
        };
        let Some(next) = next else {
            return Err(unknown_key(path, candidates));
        };
        if last {
            if next.is_table() || (next.is_array() && !new.is_array()) {
                return Err(HarnessError::config(format!("`{path}` is a section, not a value")));
            }
            *next = match (&*next, new) {
                (Value::Float(_), Value::Integer(i)) => Value::Float(i as f64),
                (_, v) => v,
            };
            return Ok(());
        }
        cur = next;
    }
    Err(unknown_key(path, candidates))
}

/// Parses `text` as a TOML value, falling back to a bare string.
pub fn parse_scalar(text: &str) -> Value {
    let doc = format!("v = {text}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(text.to_string())),
        Err(_) => Value::String(text.to_string()),
    }
}

/// Flattens nested tables to dotted keys (arrays are kept as values).
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Table(t) => {
            for (k, child) in t {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, child, out);
            }
        }
        other => out.push((prefix.to_string(), other.clone())),
    }
}

/// 1-based line of byte offset `pos` in `text`.
pub fn line_of(text: &str, pos: usize) -> usize {
    text[..pos.min(text.len())].bytes().filter(|b| *b == b'\n').count() + 1
}

pub fn parse_document(text: &str, origin: &str) -> Result<Value> {
    text.parse::<toml::Table>().map(Value::Table).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start));
        let msg = e.message().to_string();
        match line {
            Some(l) => HarnessError::config(format!("{origin}: parse error at line {l}: {msg}")),
            None => HarnessError::config(format!("{origin}: parse error: {msg}")),
        }
    })
}
