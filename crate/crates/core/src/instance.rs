//! Finite set-valued functors on a schema.
//!
//! Elements are opaque strings. Each carrier is kept sorted so that iteration
//! order is reproducible; actions are stored as index tables into the target
//! carrier.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result, Violation};
use crate::schema::{Path, Schema};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    schema: Arc<Schema>,
    carriers: Vec<Vec<String>>,
    actions: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance from carriers in any order and index tables relative
    /// to that order. Carriers are sorted and the tables remapped, then all
    /// invariants are checked.
    pub fn from_tables(schema: Arc<Schema>, carriers: Vec<Vec<String>>, actions: Vec<Vec<usize>>) -> Result<Instance> {
        let raw = Instance { schema, carriers, actions };
        shape_violations(&raw).map_err(Error::InvalidInstance)?;
        let (inst, _) = normalize(raw.schema, raw.carriers, raw.actions);
        validate_instance(&inst).map_err(Error::InvalidInstance)?;
        Ok(inst)
    }

    /// Stores the data as given. Intended for exercising [`validate_instance`].
    pub fn from_tables_unchecked(
        schema: Arc<Schema>,
        carriers: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Instance {
        Instance { schema, carriers, actions }
    }

    /// Builds an instance from element names.
    ///
    /// `carriers` lists `(node, elements)` and `actions` lists
    /// `(arrow, [(element, image)])`. Missing nodes get empty carriers.
    pub fn from_names(
        schema: Arc<Schema>,
        carriers: &[(&str, &[&str])],
        actions: &[(&str, &[(&str, &str)])],
    ) -> Result<Instance> {
        let carriers: Vec<(String, Vec<String>)> =
            carriers.iter().map(|(n, es)| (n.to_string(), es.iter().map(|e| e.to_string()).collect())).collect();
        let actions: Vec<(String, Vec<(String, String)>)> = actions
            .iter()
            .map(|(a, m)| (a.to_string(), m.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()))
            .collect();
        Instance::from_named_maps(schema, &carriers, &actions)
    }

    pub fn from_named_maps(
        schema: Arc<Schema>,
        carriers: &[(String, Vec<String>)],
        actions: &[(String, Vec<(String, String)>)],
    ) -> Result<Instance> {
        let mut violations = Vec::new();
        let mut sets: Vec<Vec<String>> = vec![Vec::new(); schema.node_count()];
        let mut assigned = vec![false; schema.node_count()];
        for (node, elems) in carriers {
            match schema.node_index(node) {
                Some(d) if !assigned[d] => {
                    assigned[d] = true;
                    sets[d] = elems.clone();
                }
                Some(_) => violations.push(Violation::DuplicateIdentifier { kind: "carrier", id: node.clone() }),
                None => violations.push(Violation::UnknownNode { node: node.clone() }),
            }
        }
        for (d, set) in sets.iter_mut().enumerate() {
            set.sort();
            for pair in set.windows(2) {
                if pair[0] == pair[1] {
                    violations.push(Violation::DuplicateElement {
                        node: schema.nodes()[d].clone(),
                        element: pair[0].clone(),
                    });
                }
            }
            set.dedup();
        }
        let index: Vec<HashMap<&str, usize>> =
            sets.iter().map(|s| s.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect()).collect();

        let mut tables: Vec<Vec<Option<usize>>> =
            schema.arrows().iter().map(|a| vec![None; sets[a.source].len()]).collect();
        let mut seen_arrow = vec![false; schema.arrows().len()];
        for (arrow, map) in actions {
            let Some(ai) = schema.arrow_index(arrow) else {
                violations.push(Violation::DuplicateIdentifier { kind: "unknown arrow", id: arrow.clone() });
                continue;
            };
            if std::mem::replace(&mut seen_arrow[ai], true) {
                violations.push(Violation::DuplicateIdentifier { kind: "action", id: arrow.clone() });
                continue;
            }
            let a = &schema.arrows()[ai];
            for (x, y) in map {
                let Some(&xi) = index[a.source].get(x.as_str()) else {
                    violations.push(Violation::OutOfCarrier { arrow: arrow.clone(), element: x.clone() });
                    continue;
                };
                match index[a.target].get(y.as_str()) {
                    Some(&yi) => tables[ai][xi] = Some(yi),
                    None => violations.push(Violation::OutOfCarrier { arrow: arrow.clone(), element: x.clone() }),
                }
            }
        }
        let mut actions_out = Vec::with_capacity(tables.len());
        for (ai, table) in tables.into_iter().enumerate() {
            let a = &schema.arrows()[ai];
            let mut row = Vec::with_capacity(table.len());
            for (xi, y) in table.into_iter().enumerate() {
                match y {
                    Some(y) => row.push(y),
                    None => {
                        violations
                            .push(Violation::NotTotal { arrow: a.name.clone(), element: sets[a.source][xi].clone() });
                        row.push(0);
                    }
                }
            }
            actions_out.push(row);
        }
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        let inst = Instance { schema, carriers: sets, actions: actions_out };
        validate_instance(&inst).map_err(Error::InvalidInstance)?;
        Ok(inst)
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn carrier(&self, node: usize) -> &[String] {
        &self.carriers[node]
    }

    pub fn carriers(&self) -> &[Vec<String>] {
        &self.carriers
    }

    pub fn size(&self, node: usize) -> usize {
        self.carriers[node].len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.carriers.iter().map(Vec::len).collect()
    }

    /// Total element count over all nodes.
    pub fn total_size(&self) -> usize {
        self.carriers.iter().map(Vec::len).sum()
    }

    /// True when every carrier is empty, i.e. this is the initial instance.
    pub fn is_initial(&self) -> bool {
        self.carriers.iter().all(Vec::is_empty)
    }

    pub fn action(&self, arrow: usize) -> &[usize] {
        &self.actions[arrow]
    }

    pub fn actions(&self) -> &[Vec<usize>] {
        &self.actions
    }

    #[inline]
    pub fn apply(&self, arrow: usize, x: usize) -> usize {
        self.actions[arrow][x]
    }

    pub fn element_index(&self, node: usize, name: &str) -> Option<usize> {
        self.carriers[node].binary_search_by(|e| e.as_str().cmp(name)).ok()
    }

    pub fn same_schema(&self, other: &Instance) -> bool {
        Arc::ptr_eq(&self.schema, &other.schema) || self.schema == other.schema
    }

    /// Elements in the fixed global order: node order, then element order.
    pub fn elements(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.carriers.iter().enumerate().flat_map(|(d, c)| (0..c.len()).map(move |x| (d, x)))
    }
}

/// Evaluates a path at element `x` of its start node.
pub fn eval_path(inst: &Instance, path: &Path, x: usize) -> Result<usize> {
    if x >= inst.size(path.start) {
        return Err(Error::Domain(format!(
            "element index {x} outside the carrier of `{}`",
            inst.schema.nodes()[path.start]
        )));
    }
    Ok(path.arrows.iter().fold(x, |e, &a| inst.apply(a, e)))
}

fn shape_violations(inst: &Instance) -> std::result::Result<(), Vec<Violation>> {
    let schema = &inst.schema;
    let mut violations = Vec::new();
    if inst.carriers.len() != schema.node_count() {
        violations.push(Violation::CarrierShape { node: "*".into() });
        return Err(violations);
    }
    if inst.actions.len() != schema.arrows().len() {
        violations.push(Violation::CarrierShape { node: "*".into() });
        return Err(violations);
    }
    for (ai, a) in schema.arrows().iter().enumerate() {
        let table = &inst.actions[ai];
        let src = &inst.carriers[a.source];
        if table.len() != src.len() {
            let missing = src.get(table.len()).cloned().unwrap_or_default();
            violations.push(Violation::NotTotal { arrow: a.name.clone(), element: missing });
            continue;
        }
        for (x, &y) in table.iter().enumerate() {
            if y >= inst.carriers[a.target].len() {
                violations.push(Violation::OutOfCarrier { arrow: a.name.clone(), element: src[x].clone() });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Checks all instance invariants: carrier shape and ordering, totality,
/// typing of actions, and every relation at every element.
pub fn validate_instance(inst: &Instance) -> std::result::Result<(), Vec<Violation>> {
    shape_violations(inst)?;
    let schema = &inst.schema;
    let mut violations = Vec::new();
    for (d, carrier) in inst.carriers.iter().enumerate() {
        for pair in carrier.windows(2) {
            if pair[0] >= pair[1] {
                violations
                    .push(Violation::DuplicateElement { node: schema.nodes()[d].clone(), element: pair[1].clone() });
            }
        }
    }
    for (ri, rel) in schema.relations().iter().enumerate() {
        for x in 0..inst.size(rel.lhs.start) {
            let l = rel.lhs.arrows.iter().fold(x, |e, &a| inst.apply(a, e));
            let r = rel.rhs.arrows.iter().fold(x, |e, &a| inst.apply(a, e));
            if l != r {
                violations.push(Violation::RelationFailure {
                    relation: ri,
                    element: inst.carriers[rel.lhs.start][x].clone(),
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

/// Sorts each carrier and remaps the action tables accordingly.
///
/// Returns the normalized instance and, per node, the map from input index
/// to output index.
pub(crate) fn normalize(
    schema: Arc<Schema>,
    carriers: Vec<Vec<String>>,
    actions: Vec<Vec<usize>>,
) -> (Instance, Vec<Vec<usize>>) {
    let mut perms = Vec::with_capacity(carriers.len());
    let mut sorted = Vec::with_capacity(carriers.len());
    for carrier in carriers {
        let mut order: Vec<usize> = (0..carrier.len()).collect();
        order.sort_by(|&i, &j| carrier[i].cmp(&carrier[j]));
        let mut perm = vec![0; carrier.len()];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let mut carrier = carrier;
        let names: Vec<String> = order.iter().map(|&old| std::mem::take(&mut carrier[old])).collect();
        sorted.push(names);
        perms.push(perm);
    }
    let new_actions = schema
        .arrows()
        .iter()
        .zip(actions)
        .map(|(a, table)| {
            let mut out = vec![0; table.len()];
            for (old_x, y) in table.into_iter().enumerate() {
                out[perms[a.source][old_x]] = perms[a.target][y];
            }
            out
        })
        .collect();
    (Instance { schema, carriers: sorted, actions: new_actions }, perms)
}

/// Zero-padded element names `prefix0, prefix1, ...` that sort in index order.
pub(crate) fn indexed_names(prefix: &str, n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{presets, PathDef};

    fn c2() -> Arc<Schema> {
        Arc::new(presets::c2())
    }

    #[test]
    fn swap_is_a_valid_c2_set() {
        let inst = Instance::from_names(c2(), &[("X", &["1", "2"])], &[("a", &[("1", "2"), ("2", "1")])]);
        assert!(inst.is_ok());
    }

    #[test]
    fn non_involution_fails_at_first_element() {
        let raw = Instance::from_tables_unchecked(c2(), vec![vec!["1".into(), "2".into()]], vec![vec![1, 1]]);
        let errs = validate_instance(&raw).unwrap_err();
        assert_eq!(errs, vec![Violation::RelationFailure { relation: 0, element: "1".into() }]);
    }

    #[test]
    fn relation_free_schema_accepts_typed_actions() {
        let g = Arc::new(presets::digraph());
        let inst = Instance::from_names(
            g,
            &[("V", &["v1", "v2"]), ("E", &["e1"])],
            &[("s", &[("e1", "v1")]), ("t", &[("e1", "v2")])],
        );
        assert!(inst.is_ok());
    }

    #[test]
    fn missing_action_entry_is_not_total() {
        let g = Arc::new(presets::digraph());
        let err = Instance::from_names(g, &[("V", &["v"]), ("E", &["e"])], &[("s", &[("e", "v")])]).unwrap_err();
        match err {
            Error::InvalidInstance(vs) => {
                assert_eq!(vs, vec![Violation::NotTotal { arrow: "t".into(), element: "e".into() }])
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn eval_path_cases() {
        let g = Arc::new(presets::digraph());
        let inst = Instance::from_names(
            g.clone(),
            &[("V", &["v1", "v2"]), ("E", &["e1"])],
            &[("s", &[("e1", "v1")]), ("t", &[("e1", "v2")])],
        )
        .unwrap();
        let id_v = g.path(&PathDef::parse("id@V")).unwrap();
        assert_eq!(eval_path(&inst, &id_v, 0).unwrap(), 0);
        let s = g.path(&PathDef::parse("s")).unwrap();
        assert_eq!(inst.carrier(0)[eval_path(&inst, &s, 0).unwrap()], "v1");
        assert!(eval_path(&inst, &s, 5).is_err());

        let swap = Instance::from_names(c2(), &[("X", &["1", "2"])], &[("a", &[("1", "2"), ("2", "1")])]).unwrap();
        let aa = swap.schema().path(&PathDef::parse("a.a")).unwrap();
        assert_eq!(eval_path(&swap, &aa, 0).unwrap(), 0);
    }

    #[test]
    fn from_tables_sorts_carriers() {
        let inst = Instance::from_tables(c2(), vec![vec!["b".into(), "a".into()]], vec![vec![0, 1]]).unwrap();
        assert_eq!(inst.carrier(0), &["a".to_string(), "b".to_string()]);
        assert_eq!(inst.action(0), &[0, 1]);
    }

    #[test]
    fn indexed_names_sort_in_index_order() {
        let names = indexed_names("x", 12);
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names[0], "x00");
    }
}
