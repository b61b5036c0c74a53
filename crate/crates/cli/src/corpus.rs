//! Schemas and named instances shipped with the tool.

use std::sync::Arc;

use decat_core::format::{parse_document, parse_schema};
use decat_core::{presets, Schema};

use crate::expr::Defs;

pub const SCHEMA_FILES: &[(&str, &str)] = &[
    ("c2.schema", include_str!("../corpus/c2.schema")),
    ("c3.schema", include_str!("../corpus/c3.schema")),
    ("digraph.schema", include_str!("../corpus/digraph.schema")),
    ("endo.schema", include_str!("../corpus/endo.schema")),
    ("s3.schema", include_str!("../corpus/s3.schema")),
];

pub const INSTANCE_FILES: &[(&str, &str)] = &[
    ("a2.inst", include_str!("../corpus/a2.inst")),
    ("c2_fix.inst", include_str!("../corpus/c2_fix.inst")),
    ("c2_free.inst", include_str!("../corpus/c2_free.inst")),
    ("c3.inst", include_str!("../corpus/c3.inst")),
    ("c3_fix.inst", include_str!("../corpus/c3_fix.inst")),
    ("c3_free.inst", include_str!("../corpus/c3_free.inst")),
    ("c3_plus_k1.inst", include_str!("../corpus/c3_plus_k1.inst")),
    ("d2.inst", include_str!("../corpus/d2.inst")),
    ("f_fix.inst", include_str!("../corpus/f_fix.inst")),
    ("f_swap.inst", include_str!("../corpus/f_swap.inst")),
    ("f_tail.inst", include_str!("../corpus/f_tail.inst")),
    ("fork.inst", include_str!("../corpus/fork.inst")),
    ("i2.inst", include_str!("../corpus/i2.inst")),
    ("join.inst", include_str!("../corpus/join.inst")),
    ("k1.inst", include_str!("../corpus/k1.inst")),
    ("l1.inst", include_str!("../corpus/l1.inst")),
    ("m2.inst", include_str!("../corpus/m2.inst")),
    ("p3.inst", include_str!("../corpus/p3.inst")),
    ("s3_fix.inst", include_str!("../corpus/s3_fix.inst")),
    ("s3_free.inst", include_str!("../corpus/s3_free.inst")),
    ("s3_line.inst", include_str!("../corpus/s3_line.inst")),
    ("s3_sign.inst", include_str!("../corpus/s3_sign.inst")),
];

/// A bundled schema file by schema name, falling back to the built-in presets.
pub fn schema(name: &str) -> Option<Arc<Schema>> {
    SCHEMA_FILES
        .iter()
        .find(|(file, _)| file.strip_suffix(".schema") == Some(name))
        .map(|(_, text)| parse_schema(text).expect("bundled schema parses"))
        .or_else(|| presets::by_name(name))
        .map(Arc::new)
}

/// Every bundled instance under its declared name.
pub fn defs() -> Defs {
    let mut defs = Defs::default();
    for (_, text) in INSTANCE_FILES {
        let doc = parse_document(text, &schema).expect("bundled instance parses");
        for (name, inst) in doc.instances {
            defs.insert(&name, inst);
        }
    }
    defs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_schemas_match_presets() {
        for (file, _) in SCHEMA_FILES {
            let name = file.strip_suffix(".schema").unwrap();
            let preset = presets::by_name(name).expect("preset of the same name");
            assert_eq!(*schema(name).unwrap(), preset, "{name}");
        }
    }

    #[test]
    fn every_bundled_instance_loads() {
        assert_eq!(defs().names().count(), INSTANCE_FILES.len());
    }
}
