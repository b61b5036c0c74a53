//! The semi-ring of isomorphism classes and its ring completion.
//!
//! Every instance is a coproduct of connected instances in an essentially
//! unique way, so an isomorphism class is a finite multiset of connected
//! canonical forms. Addition is multiset union. Multiplication expands
//! bilinearly: each pair of components is multiplied as instances and the
//! product decomposed again.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::canon::CanonicalForm;
use crate::components::connected_components;
use crate::construct::{coproduct_all, product, terminal};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::schema::Schema;

/// An element of the semi-ring: connected forms with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecClass {
    schema: Arc<Schema>,
    parts: BTreeMap<CanonicalForm, u64>,
}

fn same(a: &Arc<Schema>, b: &Arc<Schema>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SchemaMismatch)
    }
}

/// Class of an instance: its connected components counted up to isomorphism.
pub fn class_of(inst: &Arc<Instance>) -> Result<DecClass> {
    let dec = connected_components(inst)?;
    let mut parts = BTreeMap::new();
    for form in dec.forms {
        *parts.entry(form).or_insert(0) += 1;
    }
    Ok(DecClass { schema: inst.schema().clone(), parts })
}

impl DecClass {
    pub fn zero(schema: &Arc<Schema>) -> DecClass {
        DecClass { schema: schema.clone(), parts: BTreeMap::new() }
    }

    pub fn one(schema: &Arc<Schema>) -> DecClass {
        class_of(&terminal(schema)).expect("terminal instance decomposes")
    }

    /// Builds a class from `(form, multiplicity)` pairs. Forms must be
    /// connected; zero multiplicities are dropped.
    pub fn from_parts(schema: &Arc<Schema>, parts: impl IntoIterator<Item = (CanonicalForm, u64)>) -> Result<DecClass> {
        let mut out = BTreeMap::new();
        for (form, m) in parts {
            same(schema, form.schema())?;
            if !crate::components::is_connected(&form.to_instance()) {
                return Err(Error::Domain("class parts must be connected".into()));
            }
            if m > 0 {
                *out.entry(form).or_insert(0) += m;
            }
        }
        Ok(DecClass { schema: schema.clone(), parts: out })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn parts(&self) -> &BTreeMap<CanonicalForm, u64> {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn multiplicity(&self, form: &CanonicalForm) -> u64 {
        self.parts.get(form).copied().unwrap_or(0)
    }

    /// Number of connected components, with multiplicity.
    pub fn component_count(&self) -> u64 {
        self.parts.values().sum()
    }

    pub fn add(&self, other: &DecClass) -> Result<DecClass> {
        same(&self.schema, &other.schema)?;
        let mut parts = self.parts.clone();
        for (f, m) in &other.parts {
            *parts.entry(f.clone()).or_insert(0) += m;
        }
        Ok(DecClass { schema: self.schema.clone(), parts })
    }

    pub fn mul(&self, other: &DecClass) -> Result<DecClass> {
        same(&self.schema, &other.schema)?;
        let mut parts: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
        for (c, m) in &self.parts {
            for (d, n) in &other.parts {
                for (form, k) in multiply_forms(c, d)? {
                    *parts.entry(form).or_insert(0) += k * m * n;
                }
            }
        }
        Ok(DecClass { schema: self.schema.clone(), parts })
    }

    /// A representative: the coproduct of the decoded components, in form order.
    pub fn representative(&self) -> Arc<Instance> {
        let pieces: Vec<Arc<Instance>> = self
            .parts
            .iter()
            .flat_map(|(f, &m)| {
                let inst = Arc::new(f.to_instance());
                std::iter::repeat_n(inst, m as usize)
            })
            .collect();
        coproduct_all(&self.schema, &pieces).expect("parts share the schema").0
    }
}

/// Class of the product of two connected representatives.
fn multiply_forms(c: &CanonicalForm, d: &CanonicalForm) -> Result<BTreeMap<CanonicalForm, u64>> {
    let a = Arc::new(c.to_instance());
    let b = Arc::new(d.to_instance());
    Ok(class_of(&product(&a, &b)?.object)?.parts)
}

/// An element of the ring completion: connected forms with nonzero integer
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    schema: Arc<Schema>,
    coeffs: BTreeMap<CanonicalForm, i64>,
}

pub fn to_ring(x: &DecClass) -> RingElement {
    RingElement {
        schema: x.schema.clone(),
        coeffs: x.parts.iter().map(|(f, &m)| (f.clone(), i64::try_from(m).expect("multiplicity fits i64"))).collect(),
    }
}

impl RingElement {
    pub fn zero(schema: &Arc<Schema>) -> RingElement {
        RingElement { schema: schema.clone(), coeffs: BTreeMap::new() }
    }

    pub fn one(schema: &Arc<Schema>) -> RingElement {
        to_ring(&DecClass::one(schema))
    }

    pub fn from_coeffs(
        schema: &Arc<Schema>,
        coeffs: impl IntoIterator<Item = (CanonicalForm, i64)>,
    ) -> Result<RingElement> {
        let mut out = RingElement::zero(schema);
        for (form, c) in coeffs {
            same(schema, form.schema())?;
            out.bump(form, c);
        }
        Ok(out)
    }

    fn bump(&mut self, form: CanonicalForm, c: i64) {
        let e = self.coeffs.entry(form.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&form);
        }
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn coeffs(&self) -> &BTreeMap<CanonicalForm, i64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, form: &CanonicalForm) -> i64 {
        self.coeffs.get(form).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        same(&self.schema, &other.schema)?;
        let mut out = self.clone();
        for (f, &c) in &other.coeffs {
            out.bump(f.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> RingElement {
        RingElement { schema: self.schema.clone(), coeffs: self.coeffs.iter().map(|(f, &c)| (f.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> RingElement {
        let coeffs =
            if k == 0 { BTreeMap::new() } else { self.coeffs.iter().map(|(f, &c)| (f.clone(), c * k)).collect() };
        RingElement { schema: self.schema.clone(), coeffs }
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        same(&self.schema, &other.schema)?;
        let mut out = RingElement::zero(&self.schema);
        for (c, &m) in &self.coeffs {
            for (d, &n) in &other.coeffs {
                for (form, k) in multiply_forms(c, d)? {
                    out.bump(form, m * n * k as i64);
                }
            }
        }
        Ok(out)
    }

    /// The semi-ring class this element comes from, if all coefficients are positive.
    pub fn to_class(&self) -> Option<DecClass> {
        if self.coeffs.values().any(|&c| c < 0) {
            return None;
        }
        Some(DecClass {
            schema: self.schema.clone(),
            parts: self.coeffs.iter().map(|(f, &c)| (f.clone(), c as u64)).collect(),
        })
    }
}

pub fn ring_add(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    a.add(b)
}

pub fn ring_neg(a: &RingElement) -> RingElement {
    a.neg()
}

pub fn ring_mul(a: &RingElement, b: &RingElement) -> Result<RingElement> {
    a.mul(b)
}
