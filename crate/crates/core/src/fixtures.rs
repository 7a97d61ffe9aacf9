//! The bundled fixture models. Setting `DEFORMA_FIXTURES` to a directory makes
//! [`source`] read `<dir>/<name>.json` instead of the embedded copy.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::model::Model;

pub const ENV_VAR: &str = "DEFORMA_FIXTURES";

const EMBEDDED: &[(&str, &str)] = &[
    ("abelian_line", include_str!("../fixtures/abelian_line.json")),
    ("gl2", include_str!("../fixtures/gl2.json")),
    ("interval_end", include_str!("../fixtures/interval_end.json")),
    ("torus", include_str!("../fixtures/torus.json")),
    ("jets", include_str!("../fixtures/jets.json")),
    ("elliptic", include_str!("../fixtures/elliptic.json")),
    ("obstructed", include_str!("../fixtures/obstructed.json")),
];

const MUTATIONS: &[(&str, &str)] = &[
    ("gl2_corrupted", include_str!("../fixtures/mutations/gl2_corrupted.json")),
    ("gl2_scaled_root", include_str!("../fixtures/mutations/gl2_scaled_root.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    EMBEDDED.iter().map(|(n, _)| *n)
}

pub fn mutation_names() -> impl Iterator<Item = &'static str> {
    MUTATIONS.iter().map(|(n, _)| *n)
}

/// Directory named by `DEFORMA_FIXTURES`, if set.
pub fn override_dir() -> Option<PathBuf> {
    std::env::var_os(ENV_VAR).map(PathBuf::from)
}

pub fn source(name: &str) -> Result<String> {
    if let Some(dir) = override_dir() {
        let path = dir.join(format!("{name}.json"));
        if path.is_file() {
            return std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())));
        }
    }
    EMBEDDED
        .iter()
        .chain(MUTATIONS)
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| Error::Dangling { path: "fixtures".into(), name: name.into() })
}

pub fn load(name: &str) -> Result<Model> {
    Model::from_json(&source(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelDocument;

    #[test]
    fn every_fixture_resolves_and_round_trips() {
        for name in names().chain(mutation_names()) {
            let text = source(name).unwrap();
            let doc = ModelDocument::from_json(&text).unwrap();
            assert_eq!(ModelDocument::from_json(&doc.to_json()).unwrap(), doc, "{name}");
            let model = Model::resolve(doc).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(model.name(), name);
        }
    }

    #[test]
    fn fixture_dglas_validate_and_mutations_fail() {
        for name in names() {
            let m = load(name).unwrap();
            for (g, d) in &m.dglas {
                assert!(d.validate().is_valid(), "{name}/{g}");
            }
            for (c, o) in &m.cdgas {
                assert!(o.validate().is_valid(), "{name}/{c}");
            }
            for (f, phi) in &m.morphisms {
                assert!(phi.validate().is_valid(), "{name}/{f}");
            }
        }
        for name in mutation_names() {
            let m = load(name).unwrap();
            let broken = m.dglas.values().any(|d| !d.validate().is_valid())
                || m.morphisms.values().any(|f| !f.validate().is_valid());
            assert!(broken, "{name}");
        }
    }
}
