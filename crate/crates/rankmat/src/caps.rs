//! Size caps for the exponential searches.
//!
//! Defaults can be overridden through the `RANKMAT_CAPS` environment
//! variable, a comma separated list of `key=value` pairs, for example
//! `RANKMAT_CAPS=type_matrix_cells=20000000,monadic_universe=8`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub type_matrix_cells: u128,
    pub monadic_universe: usize,
    pub monadic_table: u128,
    pub rankwidth_leaves: usize,
    pub matrix_cells: u128,
    pub hypergraph_vertices: usize,
    pub relation_cells: u128,
    pub search_nodes: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            type_matrix_cells: 10_000_000,
            monadic_universe: 10,
            monadic_table: 1 << 22,
            rankwidth_leaves: 7,
            matrix_cells: 4_000_000,
            hypergraph_vertices: 16,
            relation_cells: 1 << 26,
            search_nodes: 50_000_000,
        }
    }
}

impl Caps {
    /// Defaults with `RANKMAT_CAPS` applied. Malformed entries are ignored
    /// here; use [`Caps::parse`] to see the error.
    pub fn get() -> Caps {
        match std::env::var("RANKMAT_CAPS") {
            Ok(spec) => Caps::parse(&spec).unwrap_or_default(),
            Err(_) => Caps::default(),
        }
    }

    pub fn parse(spec: &str) -> Result<Caps> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("cap entry `{item}` is not key=value")))?;
            let value: u128 = parse_number(value.trim())
                .ok_or_else(|| Error::Invalid(format!("cap value `{value}` is not a number")))?;
            match key.trim() {
                "type_matrix_cells" => caps.type_matrix_cells = value,
                "monadic_universe" => caps.monadic_universe = value as usize,
                "monadic_table" => caps.monadic_table = value,
                "rankwidth_leaves" => caps.rankwidth_leaves = value as usize,
                "matrix_cells" => caps.matrix_cells = value,
                "hypergraph_vertices" => caps.hypergraph_vertices = value as usize,
                "relation_cells" => caps.relation_cells = value,
                "search_nodes" => caps.search_nodes = value as u64,
                other => return Err(Error::Invalid(format!("unknown cap `{other}`"))),
            }
        }
        Ok(caps)
    }
}

// Accepts plain integers and the `1e7` shorthand.
fn parse_number(s: &str) -> Option<u128> {
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let mant: u128 = mant.parse().ok()?;
        let exp: u32 = exp.parse().ok()?;
        mant.checked_mul(10u128.checked_pow(exp)?)
    } else {
        s.replace('_', "").parse().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        let caps = Caps::parse("type_matrix_cells=1e3, rankwidth_leaves=5").unwrap();
        assert_eq!(caps.type_matrix_cells, 1000);
        assert_eq!(caps.rankwidth_leaves, 5);
        assert_eq!(caps.monadic_universe, 10);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(Caps::parse("bogus=3").is_err());
        assert!(Caps::parse("type_matrix_cells").is_err());
    }
}
