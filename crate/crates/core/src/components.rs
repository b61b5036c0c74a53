//! Connected components via union-find over the element universe.

use std::sync::Arc;

use crate::canon::{canonical_form, CanonicalForm};
use crate::construct::{copair_all, subinstance, Selection};
use crate::error::Result;
use crate::instance::Instance;
use crate::morphism::Morphism;

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Element classes as selections, ordered by their least element in the
/// global order.
pub(crate) fn component_selections(inst: &Instance) -> Vec<Selection> {
    let schema = inst.schema();
    let mut offset = Vec::with_capacity(schema.node_count());
    let mut total = 0;
    for d in 0..schema.node_count() {
        offset.push(total);
        total += inst.size(d);
    }
    let mut sets = DisjointSets::new(total);
    for (ai, a) in schema.arrows().iter().enumerate() {
        for x in 0..inst.size(a.source) {
            sets.union(offset[a.source] + x, offset[a.target] + inst.apply(ai, x));
        }
    }
    let mut class_of_root = vec![usize::MAX; total];
    let mut selections: Vec<Selection> = Vec::new();
    for (d, x) in inst.elements() {
        let root = sets.find(offset[d] + x);
        if class_of_root[root] == usize::MAX {
            class_of_root[root] = selections.len();
            selections.push(inst.sizes().into_iter().map(|n| vec![false; n]).collect());
        }
        selections[class_of_root[root]][d][x] = true;
    }
    selections
}

/// Connected components as plain sub-instances, ordered by least element.
pub fn connected_components_raw(inst: &Instance) -> Vec<Instance> {
    let shared = Arc::new(inst.clone());
    component_selections(inst)
        .iter()
        .map(|sel| (*subinstance(&shared, sel).expect("components are closed").object).clone())
        .collect()
}

/// A decomposition into connected components with its witness isomorphism
/// from the coproduct of the components onto the original.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub components: Vec<Arc<Instance>>,
    pub forms: Vec<CanonicalForm>,
    pub inclusions: Vec<Morphism>,
    pub witness: Morphism,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Splits an instance into connected components ordered by canonical form,
/// ties broken by least original element.
pub fn connected_components(inst: &Arc<Instance>) -> Result<Decomposition> {
    let mut parts: Vec<(CanonicalForm, usize, Arc<Instance>, Morphism)> = component_selections(inst)
        .iter()
        .enumerate()
        .map(|(order, sel)| {
            let sub = subinstance(inst, sel).expect("components are closed");
            (canonical_form(&sub.object), order, sub.object, sub.inclusion)
        })
        .collect();
    parts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut components = Vec::with_capacity(parts.len());
    let mut forms = Vec::with_capacity(parts.len());
    let mut inclusions = Vec::with_capacity(parts.len());
    for (form, _, object, inclusion) in parts {
        forms.push(form);
        components.push(object);
        inclusions.push(inclusion);
    }
    let witness = copair_all(inst.schema(), &components, &inclusions, inst)?;
    Ok(Decomposition { components, forms, inclusions, witness })
}

/// True iff the instance has exactly one component.
pub fn is_connected(inst: &Instance) -> bool {
    component_selections(inst).len() == 1
}

pub fn component_count(inst: &Instance) -> usize {
    component_selections(inst).len()
}
