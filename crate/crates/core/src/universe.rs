//! Exhaustive enumeration of instances up to isomorphism within carrier bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::canon::{canonical_form, CanonicalForm};
use crate::error::{Error, Result};
use crate::instance::{indexed_names, Instance};
use crate::schema::Schema;

const UNSET: usize = usize::MAX;

/// Maximum carrier size per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bounds(pub Vec<usize>);

impl Bounds {
    pub fn uniform(schema: &Schema, n: usize) -> Bounds {
        Bounds(vec![n; schema.node_count()])
    }

    /// Parses `V=3,E=3`, or a single number applied to every node. Every node
    /// must be bounded.
    pub fn parse(schema: &Schema, text: &str) -> Result<Bounds> {
        let text = text.trim();
        let bad = |msg: String| Error::Parse { line: 1, column: 1, message: msg };
        if let Ok(n) = text.parse::<usize>() {
            return Ok(Bounds::uniform(schema, n));
        }
        let mut bounds = vec![None; schema.node_count()];
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (node, value) = item.split_once('=').ok_or_else(|| bad(format!("expected NODE=N, got `{item}`")))?;
            let d = schema.node_index(node.trim()).ok_or_else(|| Error::Unresolved(node.trim().to_string()))?;
            let n: usize = value.trim().parse().map_err(|_| bad(format!("bad bound `{value}`")))?;
            if bounds[d].replace(n).is_some() {
                return Err(bad(format!("node `{node}` bounded twice")));
            }
        }
        bounds
            .into_iter()
            .enumerate()
            .map(|(d, b)| b.ok_or_else(|| bad(format!("no bound for node `{}`", schema.nodes()[d]))))
            .collect::<Result<Vec<_>>>()
            .map(Bounds)
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> impl fmt::Display + 'a {
        BoundsDisplay(self, schema)
    }

    /// All size vectors componentwise at most the bounds, in lexicographic order.
    pub fn size_vectors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &b in &self.0 {
            out = out.into_iter().flat_map(|prefix| (0..=b).map(move |n| [prefix.clone(), vec![n]].concat())).collect();
        }
        out
    }
}

struct BoundsDisplay<'a>(&'a Bounds, &'a Schema);

impl fmt::Display for BoundsDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.1.nodes().iter().zip(&self.0 .0).map(|(n, b)| format!("{n}={b}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// One isomorphism class: its form and the canonical representative.
#[derive(Debug, Clone)]
pub struct Member {
    pub form: CanonicalForm,
    pub instance: Arc<Instance>,
}

/// Number of raw action tables the enumeration would face without pruning,
/// summed over all size vectors. Saturates at `u128::MAX`.
pub fn raw_candidates(schema: &Schema, bounds: &Bounds) -> u128 {
    bounds
        .size_vectors()
        .iter()
        .map(|sizes| {
            schema.arrows().iter().fold(1u128, |acc, a| {
                let per = (sizes[a.target] as u128).checked_pow(sizes[a.source] as u32).unwrap_or(u128::MAX);
                acc.saturating_mul(per)
            })
        })
        .fold(0u128, |acc, n| acc.saturating_add(n))
}

/// Calls `visit` on every valid instance with exactly these carrier sizes.
/// Action tables are filled in arrow order; a partial table is rejected as
/// soon as some relation can be evaluated on both sides and disagrees.
pub fn for_each_instance<F: FnMut(Instance)>(schema: &Arc<Schema>, sizes: &[usize], mut visit: F) {
    let positions: Vec<(usize, usize)> =
        schema.arrows().iter().enumerate().flat_map(|(ai, a)| (0..sizes[a.source]).map(move |x| (ai, x))).collect();
    // A position must have somewhere to map to.
    if positions.iter().any(|&(ai, _)| sizes[schema.arrows()[ai].target] == 0) {
        return;
    }
    let mut tables: Vec<Vec<usize>> = schema.arrows().iter().map(|a| vec![UNSET; sizes[a.source]]).collect();
    let carriers: Vec<Vec<String>> =
        schema.nodes().iter().zip(sizes).map(|(n, &k)| indexed_names(&n.to_lowercase(), k)).collect();
    let relevant: Vec<Vec<usize>> = (0..schema.arrows().len())
        .map(|ai| {
            schema
                .relations()
                .iter()
                .enumerate()
                .filter(|(_, r)| r.lhs.arrows.contains(&ai) || r.rhs.arrows.contains(&ai))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    fill(schema, sizes, &positions, 0, &mut tables, &relevant, &carriers, &mut visit);
}

#[allow(clippy::too_many_arguments)]
fn fill<F: FnMut(Instance)>(
    schema: &Arc<Schema>,
    sizes: &[usize],
    positions: &[(usize, usize)],
    pos: usize,
    tables: &mut Vec<Vec<usize>>,
    relevant: &[Vec<usize>],
    carriers: &[Vec<String>],
    visit: &mut F,
) {
    let Some(&(ai, x)) = positions.get(pos) else {
        visit(Instance::from_tables_unchecked(schema.clone(), carriers.to_vec(), tables.clone()));
        return;
    };
    let target = schema.arrows()[ai].target;
    for y in 0..sizes[target] {
        tables[ai][x] = y;
        if consistent(schema, sizes, tables, &relevant[ai]) {
            fill(schema, sizes, positions, pos + 1, tables, relevant, carriers, visit);
        }
    }
    tables[ai][x] = UNSET;
}

fn eval_partial(tables: &[Vec<usize>], arrows: &[usize], x: usize) -> Option<usize> {
    arrows.iter().try_fold(x, |e, &a| {
        let v = tables[a][e];
        (v != UNSET).then_some(v)
    })
}

fn consistent(schema: &Schema, sizes: &[usize], tables: &[Vec<usize>], relations: &[usize]) -> bool {
    relations.iter().all(|&ri| {
        let rel = &schema.relations()[ri];
        (0..sizes[rel.lhs.start]).all(|z| {
            match (eval_partial(tables, &rel.lhs.arrows, z), eval_partial(tables, &rel.rhs.arrows, z)) {
                (Some(l), Some(r)) => l == r,
                _ => true,
            }
        })
    })
}

/// Isomorphism classes with exactly the given carrier sizes, in canonical order.
pub fn enumerate_exact(schema: &Arc<Schema>, sizes: &[usize]) -> Vec<Member> {
    let mut classes: BTreeMap<CanonicalForm, ()> = BTreeMap::new();
    for_each_instance(schema, sizes, |inst| {
        classes.insert(canonical_form(&inst), ());
    });
    classes
        .into_keys()
        .map(|form| {
            let instance = Arc::new(form.to_instance());
            Member { form, instance }
        })
        .collect()
}

/// All isomorphism classes within the bounds, ordered by canonical form
/// (hence first by size vector).
pub fn enumerate_instances(schema: &Arc<Schema>, bounds: &Bounds) -> Vec<Member> {
    let mut out: Vec<Member> = bounds.size_vectors().iter().flat_map(|sizes| enumerate_exact(schema, sizes)).collect();
    out.sort_by(|a, b| a.form.cmp(&b.form));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::presets;

    #[test]
    fn single_edge_on_two_vertices() {
        let g = Arc::new(presets::digraph());
        assert_eq!(enumerate_exact(&g, &[2, 1]).len(), 2);
    }

    #[test]
    fn involutions_on_two_points() {
        let c2 = Arc::new(presets::c2());
        assert_eq!(enumerate_exact(&c2, &[2]).len(), 2);
    }

    #[test]
    fn zero_bounds_give_the_initial_instance() {
        for name in presets::NAMES {
            let s = Arc::new(presets::by_name(name).unwrap());
            let all = enumerate_instances(&s, &Bounds::uniform(&s, 0));
            assert_eq!(all.len(), 1);
            assert!(all[0].instance.is_initial());
        }
    }

    #[test]
    fn bounds_parsing() {
        let g = presets::digraph();
        assert_eq!(Bounds::parse(&g, "V=3,E=2").unwrap(), Bounds(vec![3, 2]));
        assert_eq!(Bounds::parse(&g, "E=2, V=1").unwrap(), Bounds(vec![1, 2]));
        assert_eq!(Bounds::parse(&g, "2").unwrap(), Bounds(vec![2, 2]));
        assert!(Bounds::parse(&g, "V=3").is_err());
        assert!(Bounds::parse(&g, "V=3,E=x").is_err());
        assert!(Bounds::parse(&g, "V=3,E=1,W=2").is_err());
        assert_eq!(Bounds(vec![3, 2]).display(&g).to_string(), "V=3,E=2");
    }

    #[test]
    fn raw_candidate_count() {
        let g = presets::digraph();
        // Sum over v<=1, e<=1 of v^(2e): (0,0)=1, (0,1)=0, (1,0)=1, (1,1)=1.
        assert_eq!(raw_candidates(&g, &Bounds(vec![1, 1])), 3);
    }

    #[test]
    fn members_are_sorted_and_distinct() {
        let g = Arc::new(presets::digraph());
        let all = enumerate_instances(&g, &Bounds(vec![2, 2]));
        for pair in all.windows(2) {
            assert!(pair[0].form < pair[1].form);
        }
    }
}
