//! The coproduct construction the suites exercise, with a deliberately broken
//! variant for checking that the harness notices.

use std::collections::BTreeMap;
use std::sync::Arc;

use decat_core::construct::{coproduct, Coproduct};
use decat_core::{Error, Instance, Morphism, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Standard,
    /// Summands are not tagged: equally named elements are merged, and the
    /// first summand's action wins on shared elements.
    SharedTag,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Standard => "standard",
            Engine::SharedTag => "shared-tag",
        }
    }

    pub fn from_name(name: &str) -> Option<Engine> {
        match name {
            "standard" => Some(Engine::Standard),
            "shared-tag" => Some(Engine::SharedTag),
            _ => None,
        }
    }

    pub fn coproduct(self, f: &Arc<Instance>, g: &Arc<Instance>) -> Result<Coproduct> {
        match self {
            Engine::Standard => coproduct(f, g),
            Engine::SharedTag => shared_tag_coproduct(f, g),
        }
    }
}

fn shared_tag_coproduct(f: &Arc<Instance>, g: &Arc<Instance>) -> Result<Coproduct> {
    if !f.same_schema(g) {
        return Err(Error::SchemaMismatch);
    }
    let schema = f.schema();
    let carriers: Vec<Vec<String>> = (0..schema.node_count())
        .map(|d| {
            let mut c: Vec<String> = f.carrier(d).iter().chain(g.carrier(d)).cloned().collect();
            c.sort();
            c.dedup();
            c
        })
        .collect();
    let index = |d: usize, name: &str| carriers[d].binary_search_by(|e| e.as_str().cmp(name)).expect("merged name");
    let actions = schema
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            let mut table: BTreeMap<usize, usize> = BTreeMap::new();
            for part in [f, g] {
                for (x, &y) in part.action(ai).iter().enumerate() {
                    let key = index(a.source, &part.carrier(a.source)[x]);
                    table.entry(key).or_insert_with(|| index(a.target, &part.carrier(a.target)[y]));
                }
            }
            table.into_values().collect()
        })
        .collect();
    let object = Arc::new(Instance::from_tables_unchecked(schema.clone(), carriers.clone(), actions));
    let leg = |part: &Arc<Instance>| {
        let comps = (0..schema.node_count()).map(|d| part.carrier(d).iter().map(|x| index(d, x)).collect()).collect();
        Morphism::new_unchecked(part.clone(), object.clone(), comps)
    };
    Ok(Coproduct { left: leg(f), right: leg(g), object: object.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use decat_core::presets;

    #[test]
    fn shared_tag_merges_equal_names() {
        let g = Arc::new(presets::digraph());
        let k = Arc::new(Instance::from_names(g.clone(), &[("V", &["v"])], &[]).unwrap());
        assert_eq!(Engine::SharedTag.coproduct(&k, &k).unwrap().object.total_size(), 1);
        assert_eq!(Engine::Standard.coproduct(&k, &k).unwrap().object.total_size(), 2);
        assert_eq!(Engine::from_name("shared-tag"), Some(Engine::SharedTag));
    }
}
