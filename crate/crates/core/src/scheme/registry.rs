use super::{OnionScheme, SchemeError, SphinxScheme};
use crate::extensions::{Broken1, ChainScheme, WrapResistant};
use crate::primitives::SuiteParams;
use crate::sphinx::Variant;
use std::sync::Arc;

pub const SCHEME_NAMES: &[&str] = &[
    "sphinx-flawed",
    "sphinx-fixed",
    "sphinx-ae",
    "sphinx-malleable",
    "sphinx-tagged",
    "broken1",
    "broken2",
    "wr(<inner>)",
    "oi(<inner>)",
];

const DEFAULT_INNER: &str = "sphinx-ae";

/// Resolve a scheme name such as `sphinx-ae`, `broken2` or `wr(oi(sphinx-ae))`.
/// `broken1` and `broken2` default to an adapted-Sphinx inner scheme.
pub fn scheme_by_name(name: &str, params: &SuiteParams) -> Result<Arc<dyn OnionScheme>, SchemeError> {
    let name = name.trim();
    if let Some(v) = Variant::from_name(name) {
        return Ok(Arc::new(SphinxScheme::new(*params, v)));
    }
    let (head, inner) = match name.find('(') {
        Some(open) if name.ends_with(')') => (&name[..open], Some(&name[open + 1..name.len() - 1])),
        Some(_) => return Err(SchemeError::UnknownScheme(name.to_string())),
        None => (name, None),
    };
    let k = params.k();
    let inner_scheme = |default: Option<&str>| -> Result<Arc<dyn OnionScheme>, SchemeError> {
        match inner.or(default) {
            Some(i) => scheme_by_name(i, params),
            None => Err(SchemeError::UnknownScheme(name.to_string())),
        }
    };
    match head {
        "broken1" => Ok(Arc::new(Broken1::new(inner_scheme(Some(DEFAULT_INNER))?, k))),
        "broken2" => {
            let i = inner_scheme(Some(DEFAULT_INNER))?;
            let n = i.max_path_len() - 1;
            Ok(Arc::new(ChainScheme::with_identifier(i, k, n)))
        }
        "wr" => Ok(Arc::new(WrapResistant::new(inner_scheme(None)?, k))),
        "oi" => {
            let i = inner_scheme(None)?;
            let n = i.max_path_len() - 1;
            Ok(Arc::new(ChainScheme::integrity(i, k, n)))
        }
        _ => Err(SchemeError::UnknownScheme(name.to_string())),
    }
}
