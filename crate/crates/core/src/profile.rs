//! Hom-count profiles over a truncated family of connected test objects.

use std::sync::Arc;

use crate::canon::CanonicalForm;
use crate::components::is_connected;
use crate::error::{Error, Result};
use crate::hom::count_homs;
use crate::instance::Instance;
use crate::ring::{class_of, DecClass, RingElement};
use crate::schema::Schema;
use crate::universe::{enumerate_instances, Bounds, Member};

/// Connected test objects, pairwise non-isomorphic, in canonical order.
#[derive(Debug, Clone)]
pub struct TestBasis {
    schema: Arc<Schema>,
    members: Vec<Member>,
}

impl TestBasis {
    /// Checks that the members are connected, share the schema and are
    /// pairwise distinct. Keeps the given order.
    pub fn new(schema: &Arc<Schema>, members: Vec<Member>) -> Result<TestBasis> {
        for (i, m) in members.iter().enumerate() {
            if m.form.schema() != schema {
                return Err(Error::SchemaMismatch);
            }
            if !is_connected(&m.instance) {
                return Err(Error::Domain(format!("basis member {i} is not connected")));
            }
            if members[..i].iter().any(|p| p.form == m.form) {
                return Err(Error::Domain(format!("basis member {i} repeats an earlier one")));
            }
        }
        Ok(TestBasis { schema: schema.clone(), members })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn forms(&self) -> impl Iterator<Item = &CanonicalForm> {
        self.members.iter().map(|m| &m.form)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Connected members of the bounded universe, in canonical order.
pub fn build_basis(schema: &Arc<Schema>, bounds: &Bounds) -> TestBasis {
    let members = enumerate_instances(schema, bounds).into_iter().filter(|m| is_connected(&m.instance)).collect();
    TestBasis { schema: schema.clone(), members }
}

/// One entry per basis member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Profile(pub Vec<i128>);

impl Profile {
    pub fn entries(&self) -> &[i128] {
        &self.0
    }

    pub fn add(&self, other: &Profile) -> Profile {
        Profile(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn mul(&self, other: &Profile) -> Profile {
        Profile(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
}

/// Homs from each basis member into the class, summed over its components.
pub fn profile(x: &DecClass, basis: &TestBasis) -> Result<Profile> {
    if x.schema() != basis.schema() {
        return Err(Error::SchemaMismatch);
    }
    let parts: Vec<(Instance, i128)> = x.parts().iter().map(|(f, &m)| (f.to_instance(), m as i128)).collect();
    weighted(&parts, basis)
}

pub fn profile_instance(inst: &Arc<Instance>, basis: &TestBasis) -> Result<Profile> {
    profile(&class_of(inst)?, basis)
}

/// Direct counts into the instance itself, bypassing decomposition.
pub fn profile_direct(inst: &Instance, basis: &TestBasis) -> Result<Profile> {
    basis.members.iter().map(|m| count_homs(&m.instance, inst).map(i128::from)).collect::<Result<_>>().map(Profile)
}

/// The linear extension of `profile` to integer combinations.
pub fn ring_profile(r: &RingElement, basis: &TestBasis) -> Result<Profile> {
    if r.schema() != basis.schema() {
        return Err(Error::SchemaMismatch);
    }
    let parts: Vec<(Instance, i128)> = r.coeffs().iter().map(|(f, &c)| (f.to_instance(), c as i128)).collect();
    weighted(&parts, basis)
}

fn weighted(parts: &[(Instance, i128)], basis: &TestBasis) -> Result<Profile> {
    let mut out = vec![0i128; basis.len()];
    for (i, m) in basis.members.iter().enumerate() {
        for (inst, w) in parts {
            out[i] += w * i128::from(count_homs(&m.instance, inst)?);
        }
    }
    Ok(Profile(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{coproduct, initial};
    use crate::ring::to_ring;
    use crate::schema::presets;

    fn c3(s: &Arc<Schema>) -> Arc<Instance> {
        Arc::new(
            Instance::from_names(
                s.clone(),
                &[("V", &["0", "1", "2"]), ("E", &["a", "b", "c"])],
                &[("s", &[("a", "0"), ("b", "1"), ("c", "2")]), ("t", &[("a", "1"), ("b", "2"), ("c", "0")])],
            )
            .unwrap(),
        )
    }

    #[test]
    fn small_digraph_basis() {
        let g = Arc::new(presets::digraph());
        let b = build_basis(&g, &Bounds(vec![1, 1]));
        assert_eq!(b.len(), 2);
        assert_eq!(b.members()[0].instance.sizes(), vec![1, 0]);
        assert_eq!(b.members()[1].instance.sizes(), vec![1, 1]);
        assert!(build_basis(&g, &Bounds(vec![0, 0])).is_empty());
    }

    #[test]
    fn c2_basis() {
        let c2 = Arc::new(presets::c2());
        let b = build_basis(&c2, &Bounds(vec![2]));
        let sizes: Vec<usize> = b.members().iter().map(|m| m.instance.total_size()).collect();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn cycle_profile() {
        let g = Arc::new(presets::digraph());
        let b = build_basis(&g, &Bounds(vec![1, 1]));
        assert_eq!(profile_instance(&c3(&g), &b).unwrap(), Profile(vec![3, 0]));
        assert_eq!(profile(&DecClass::zero(&g), &b).unwrap(), Profile(vec![0, 0]));
        assert_eq!(profile_instance(&initial(&g), &b).unwrap(), Profile(vec![0, 0]));
    }

    #[test]
    fn additive_and_matches_direct() {
        let g = Arc::new(presets::digraph());
        let b = build_basis(&g, &Bounds(vec![2, 2]));
        let x = c3(&g);
        let k = Arc::new(Instance::from_names(g.clone(), &[("V", &["v"])], &[]).unwrap());
        let sum = coproduct(&x, &k).unwrap().object;
        let px = profile_instance(&x, &b).unwrap();
        let pk = profile_instance(&k, &b).unwrap();
        assert_eq!(profile_instance(&sum, &b).unwrap(), px.add(&pk));
        assert_eq!(profile_direct(&sum, &b).unwrap(), px.add(&pk));
        let r = to_ring(&class_of(&sum).unwrap());
        assert_eq!(ring_profile(&r, &b).unwrap(), px.add(&pk));
        assert_eq!(ring_profile(&r.neg(), &b).unwrap().0, px.add(&pk).0.iter().map(|v| -v).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_disconnected_members() {
        let g = Arc::new(presets::digraph());
        let k = Arc::new(Instance::from_names(g.clone(), &[("V", &["a", "b"])], &[]).unwrap());
        let m = Member { form: crate::canon::canonical_form(&k), instance: k };
        assert!(TestBasis::new(&g, vec![m]).is_err());
    }
}
