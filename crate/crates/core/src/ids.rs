//! Parsing of `name[:key=value,...]` identifiers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedId {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl ParsedId {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn require(&self, key: &str) -> Result<f64> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("`{}` needs parameter `{key}`", self.name)))
    }

    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for k in self.params.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Config(format!("`{}` has no parameter `{k}`", self.name)));
            }
        }
        Ok(())
    }
}

pub fn parse_id(id: &str) -> Result<ParsedId> {
    let id = id.trim();
    let (name, rest) = match id.split_once(':') {
        Some((n, r)) => (n, Some(r)),
        None => (id, None),
    };
    if name.is_empty() {
        return Err(Error::Config("empty identifier".into()));
    }
    let mut params = BTreeMap::new();
    if let Some(rest) = rest {
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("`{part}` is not key=value in `{id}`")))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("parameter `{}` in `{id}` is not a number", k.trim())))?;
            if !value.is_finite() {
                return Err(Error::Config(format!("parameter `{}` in `{id}` is not finite", k.trim())));
            }
            params.insert(k.trim().to_string(), value);
        }
    }
    Ok(ParsedId { name: name.to_string(), params })
}
