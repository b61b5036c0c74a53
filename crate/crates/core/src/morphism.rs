//! Natural transformations between instances of one schema.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result, Violation};
use crate::instance::Instance;

/// A family of per-node functions from `source` to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: Arc<Instance>,
    target: Arc<Instance>,
    components: Vec<Vec<usize>>,
}

impl Morphism {
    pub fn new(source: Arc<Instance>, target: Arc<Instance>, components: Vec<Vec<usize>>) -> Result<Morphism> {
        let m = Morphism { source, target, components };
        validate_morphism(&m).map_err(Error::InvalidMorphism)?;
        Ok(m)
    }

    /// No checks. The hom search and the constructions use this for families
    /// that are natural by construction.
    pub fn new_unchecked(source: Arc<Instance>, target: Arc<Instance>, components: Vec<Vec<usize>>) -> Morphism {
        Morphism { source, target, components }
    }

    /// Builds a morphism from `(node, [(element, image)])` lists.
    pub fn from_names(
        source: Arc<Instance>,
        target: Arc<Instance>,
        components: &[(String, Vec<(String, String)>)],
    ) -> Result<Morphism> {
        let schema = source.schema().clone();
        let mut tables: Vec<Vec<Option<usize>>> = source.sizes().iter().map(|&n| vec![None; n]).collect();
        let mut problems = Vec::new();
        for (node, map) in components {
            let Some(d) = schema.node_index(node) else {
                problems.push(Violation::UnknownNode { node: node.clone() });
                continue;
            };
            let lookup: HashMap<&str, usize> =
                target.carrier(d).iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
            for (x, y) in map {
                match (source.element_index(d, x), lookup.get(y.as_str())) {
                    (Some(xi), Some(&yi)) => tables[d][xi] = Some(yi),
                    _ => problems.push(Violation::ComponentShape { node: node.clone() }),
                }
            }
        }
        let mut comps = Vec::with_capacity(tables.len());
        for (d, t) in tables.into_iter().enumerate() {
            let mut row = Vec::with_capacity(t.len());
            for y in t {
                match y {
                    Some(y) => row.push(y),
                    None => {
                        problems.push(Violation::ComponentShape { node: schema.nodes()[d].clone() });
                        row.push(0);
                    }
                }
            }
            comps.push(row);
        }
        if !problems.is_empty() {
            return Err(Error::InvalidMorphism(problems));
        }
        Morphism::new(source, target, comps)
    }

    pub fn identity(inst: &Arc<Instance>) -> Morphism {
        let components = inst.sizes().into_iter().map(|n| (0..n).collect()).collect();
        Morphism { source: inst.clone(), target: inst.clone(), components }
    }

    pub fn source(&self) -> &Arc<Instance> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Instance> {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, node: usize) -> &[usize] {
        &self.components[node]
    }

    #[inline]
    pub fn apply(&self, node: usize, x: usize) -> usize {
        self.components[node][x]
    }

    /// Diagrammatic composite: first `self`, then `next`.
    pub fn then(&self, next: &Morphism) -> Result<Morphism> {
        if *self.target != *next.source {
            return Err(Error::Domain("composite of non-composable morphisms".into()));
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(d, comp)| comp.iter().map(|&y| next.components[d][y]).collect())
            .collect();
        Ok(Morphism { source: self.source.clone(), target: next.target.clone(), components })
    }

    /// Bijective on every node. A bijective natural family has a natural inverse.
    pub fn is_iso(&self) -> bool {
        self.components.iter().enumerate().all(|(d, comp)| {
            if comp.len() != self.target.size(d) {
                return false;
            }
            let mut hit = vec![false; comp.len()];
            comp.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
        })
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().enumerate().all(|(d, comp)| {
            let mut hit = vec![false; self.target.size(d)];
            comp.iter().all(|&y| !std::mem::replace(&mut hit[y], true))
        })
    }

    pub fn inverse(&self) -> Option<Morphism> {
        if !self.is_iso() {
            return None;
        }
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut inv = vec![0; comp.len()];
                for (x, &y) in comp.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Some(Morphism { source: self.target.clone(), target: self.source.clone(), components })
    }
}

/// Checks shape and naturality on every generating arrow.
pub fn validate_morphism(m: &Morphism) -> std::result::Result<(), Vec<Violation>> {
    if !m.source.same_schema(&m.target) {
        return Err(vec![Violation::SchemaMismatch]);
    }
    let schema = m.source.schema();
    let mut violations = Vec::new();
    if m.components.len() != schema.node_count() {
        return Err(vec![Violation::ComponentShape { node: "*".into() }]);
    }
    for (d, comp) in m.components.iter().enumerate() {
        if comp.len() != m.source.size(d) || comp.iter().any(|&y| y >= m.target.size(d)) {
            violations.push(Violation::ComponentShape { node: schema.nodes()[d].clone() });
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    for (ai, a) in schema.arrows().iter().enumerate() {
        for x in 0..m.source.size(a.source) {
            let down_then_across = m.components[a.target][m.source.apply(ai, x)];
            let across_then_down = m.target.apply(ai, m.components[a.source][x]);
            if down_then_across != across_then_down {
                violations.push(Violation::Naturality {
                    arrow: a.name.clone(),
                    element: m.source.carrier(a.source)[x].clone(),
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::presets;

    fn edge() -> Arc<Instance> {
        let g = Arc::new(presets::digraph());
        Arc::new(
            Instance::from_names(
                g,
                &[("V", &["v1", "v2"]), ("E", &["e1"])],
                &[("s", &[("e1", "v1")]), ("t", &[("e1", "v2")])],
            )
            .unwrap(),
        )
    }

    #[test]
    fn identity_is_natural() {
        let a = edge();
        assert_eq!(validate_morphism(&Morphism::identity(&a)), Ok(()));
    }

    #[test]
    fn vertex_swap_breaks_naturality() {
        let a = edge();
        let m = Morphism::new_unchecked(a.clone(), a.clone(), vec![vec![1, 0], vec![0]]);
        let errs = validate_morphism(&m).unwrap_err();
        assert!(errs.iter().any(|v| matches!(v, Violation::Naturality { arrow, .. } if arrow == "s")));
        assert!(errs.iter().any(|v| matches!(v, Violation::Naturality { arrow, .. } if arrow == "t")));
    }

    #[test]
    fn empty_family_from_empty_instance_is_natural() {
        let a = edge();
        let empty =
            Arc::new(Instance::from_tables(a.schema().clone(), vec![vec![], vec![]], vec![vec![], vec![]]).unwrap());
        let m = Morphism::new(empty, a, vec![vec![], vec![]]);
        assert!(m.is_ok());
    }

    #[test]
    fn composite_and_inverse() {
        let a = edge();
        let id = Morphism::identity(&a);
        let twice = id.then(&id).unwrap();
        assert_eq!(twice, id);
        assert!(id.is_iso());
        assert_eq!(id.inverse().unwrap(), id);
    }
}
