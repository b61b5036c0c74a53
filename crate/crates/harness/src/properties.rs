//! Individual checks. Each one takes its inputs as plain data so that a
//! failure can be written out and re-run in isolation.

use std::collections::{HashMap, HashSet};
use std::fmt::Display;
use std::ops::ControlFlow;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use decat_core::construct::{copair, image_selection, initial, preimage, product, pullback, relabel};
use decat_core::hom::for_each_hom;
use decat_core::profile::profile_direct;
use decat_core::{
    build_basis, canonical_form, check_conn_bijection, class_of, connected_components, count_homs_direct, is_connected,
    profile, ring_profile, sample_hom, table_of_marks, to_ring, validate_instance, validate_morphism, Bounds,
    CanonicalForm, DecClass, Instance, Morphism, RingElement, Schema, TestBasis,
};

use crate::engine::Engine;

pub type Check = Result<(), String>;

/// Inputs to one check.
#[derive(Debug, Clone)]
pub struct Args {
    pub schema: Arc<Schema>,
    pub instances: Vec<Arc<Instance>>,
    pub morphisms: Vec<Morphism>,
    pub seed: u64,
    pub bounds: Option<Bounds>,
}

impl Args {
    pub fn new(schema: &Arc<Schema>, instances: Vec<Arc<Instance>>) -> Args {
        Args { schema: schema.clone(), instances, morphisms: Vec::new(), seed: 0, bounds: None }
    }

    pub fn with_seed(mut self, seed: u64) -> Args {
        self.seed = seed;
        self
    }

    pub fn with_bounds(mut self, bounds: &Bounds) -> Args {
        self.bounds = Some(bounds.clone());
        self
    }

    pub fn with_morphisms(mut self, morphisms: Vec<Morphism>) -> Args {
        self.morphisms = morphisms;
        self
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn inst(&self, i: usize) -> Result<&Arc<Instance>, String> {
        self.instances.get(i).ok_or_else(|| format!("check expects at least {} instances", i + 1))
    }

    fn basis(&self) -> Result<TestBasis, String> {
        let bounds = self.bounds.as_ref().ok_or("check needs universe bounds")?;
        Ok(build_basis(&self.schema, bounds))
    }
}

pub struct Property {
    pub id: &'static str,
    pub check: fn(Engine, &Args) -> Check,
}

pub const PROPERTIES: &[Property] = &[
    Property { id: "coproduct-universal", check: coproduct_universal },
    Property { id: "coprojection-mono", check: coprojection_mono },
    Property { id: "coprojections-disjoint", check: coprojections_disjoint },
    Property { id: "strict-initial", check: strict_initial },
    Property { id: "pullback-decomposition", check: pullback_decomposition },
    Property { id: "decomposition-witness", check: decomposition_witness },
    Property { id: "unique-factorization", check: unique_factorization },
    Property { id: "cancellation", check: cancellation },
    Property { id: "component-bound", check: component_bound },
    Property { id: "connected-agreement", check: connected_agreement },
    Property { id: "dichotomy", check: dichotomy },
    Property { id: "hom-additive", check: hom_additive },
    Property { id: "hom-multiplicative", check: hom_multiplicative },
    Property { id: "distributive", check: distributive },
    Property { id: "class-product", check: class_product },
    Property { id: "profile-homomorphism", check: profile_homomorphism },
    Property { id: "semiring-laws", check: semiring_laws },
    Property { id: "ring-laws", check: ring_laws },
    Property { id: "to-ring-roundtrip", check: to_ring_roundtrip },
    Property { id: "profile-separation", check: profile_separation },
    Property { id: "profile-invariance", check: profile_invariance },
    Property { id: "marks-triangular", check: marks_triangular },
    Property { id: "ghost-injective", check: ghost_injective },
];

pub fn lookup(id: &str) -> Option<&'static Property> {
    PROPERTIES.iter().find(|p| p.id == id)
}

pub fn property_index(id: &str) -> u64 {
    PROPERTIES.iter().position(|p| p.id == id).expect("known property") as u64
}

/// Runs a check, turning panics inside it into violations.
pub fn evaluate(prop: &Property, engine: Engine, args: &Args) -> Check {
    std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (prop.check)(engine, args))).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".to_string());
        Err(format!("check panicked: {msg}"))
    })
}

fn e<E: Display>(err: E) -> String {
    err.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn valid_instance(inst: &Instance, what: &str) -> Check {
    validate_instance(inst).map_err(|vs| format!("{what} is not a valid instance: {}", vs[0]))
}

fn valid_morphism(m: &Morphism, what: &str) -> Check {
    validate_morphism(m).map_err(|vs| format!("{what} is not natural: {}", vs[0]))
}

/// Enumerated hom-sets above this size are skipped by the exhaustive
/// injectivity and disjointness checks.
pub const HOM_ENUMERATION_CAP: u64 = 10_000;

/// Composites `h ; leg` for every `h: z -> leg.source()`, or `None` above the cap.
fn composites(z: &Instance, leg: &Morphism) -> Result<Option<Vec<Vec<Vec<usize>>>>, String> {
    if count_homs_direct(z, leg.source()).map_err(e)? > HOM_ENUMERATION_CAP {
        return Ok(None);
    }
    let mut out = Vec::new();
    for_each_hom(z, leg.source(), |comps| {
        out.push(comps.iter().enumerate().map(|(d, c)| c.iter().map(|&x| leg.apply(d, x)).collect()).collect());
        ControlFlow::Continue(())
    })
    .map_err(e)?;
    Ok(Some(out))
}

fn coproduct_universal(engine: Engine, a: &Args) -> Check {
    let (x, y, t) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    let cop = engine.coproduct(x, y).map_err(e)?;
    valid_instance(&cop.object, "the coproduct")?;
    valid_morphism(&cop.left, "the left coprojection")?;
    valid_morphism(&cop.right, "the right coprojection")?;
    let mut rng = a.rng();
    if let (Some(u), Some(v)) = (sample_hom(x, t, &mut rng).map_err(e)?, sample_hom(y, t, &mut rng).map_err(e)?) {
        let w = copair(&cop, &u, &v).map_err(e)?;
        valid_morphism(&w, "the copairing")?;
        ensure(cop.left.then(&w).map_err(e)?.components() == u.components(), || {
            "copairing does not restrict to the left leg".into()
        })?;
        ensure(cop.right.then(&w).map_err(e)?.components() == v.components(), || {
            "copairing does not restrict to the right leg".into()
        })?;
    }
    let total = count_homs_direct(&cop.object, t).map_err(e)?;
    let pairs = count_homs_direct(x, t).map_err(e)? * count_homs_direct(y, t).map_err(e)?;
    ensure(total == pairs, || format!("{total} maps out of the coproduct but {pairs} pairs of legs"))
}

fn coprojection_mono(engine: Engine, a: &Args) -> Check {
    let (z, x, y) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    let cop = engine.coproduct(x, y).map_err(e)?;
    for (leg, side) in [(&cop.left, "left"), (&cop.right, "right")] {
        if let Some(list) = composites(z, leg)? {
            let distinct: HashSet<&Vec<Vec<usize>>> = list.iter().collect();
            ensure(distinct.len() == list.len(), || format!("two maps agree after the {side} coprojection"))?;
        }
        let pb = pullback(leg, leg).map_err(e)?;
        ensure(pb.left.components() == pb.right.components() && pb.left.is_iso(), || {
            format!("the kernel pair of the {side} coprojection is not the diagonal")
        })?;
    }
    Ok(())
}

fn coprojections_disjoint(engine: Engine, a: &Args) -> Check {
    let (z, x, y) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    let cop = engine.coproduct(x, y).map_err(e)?;
    let pb = pullback(&cop.left, &cop.right).map_err(e)?;
    ensure(pb.object.is_initial(), || format!("the coprojections meet in {} elements", pb.object.total_size()))?;
    if z.is_initial() {
        return Ok(());
    }
    if let (Some(l), Some(r)) = (composites(z, &cop.left)?, composites(z, &cop.right)?) {
        let left: HashSet<Vec<Vec<usize>>> = l.into_iter().collect();
        ensure(!r.iter().any(|m| left.contains(m)), || "a nonempty source maps into both summands compatibly".into())?;
    }
    Ok(())
}

fn strict_initial(_: Engine, a: &Args) -> Check {
    let x = a.inst(0)?;
    let zero = initial(&a.schema);
    let n = count_homs_direct(x, &zero).map_err(e)?;
    let expected = u64::from(x.is_initial());
    ensure(n == expected, || format!("{n} maps into the initial instance, expected {expected}"))
}

fn pullback_decomposition(engine: Engine, a: &Args) -> Check {
    let (src, x, y) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    let f = a.morphisms.first().ok_or("check expects a morphism")?;
    let cop = engine.coproduct(x, y).map_err(e)?;
    ensure(**f.source() == **src && **f.target() == *cop.object, || {
        "the morphism does not run into the coproduct".into()
    })?;
    valid_morphism(f, "the sampled morphism")?;
    let mut parts = Vec::new();
    for (leg, side) in [(&cop.left, "left"), (&cop.right, "right")] {
        let sub = preimage(f, &image_selection(leg)).map_err(e)?;
        valid_instance(&sub.object, "a preimage")?;
        let pb = pullback(f, leg).map_err(e)?;
        valid_instance(&pb.object, "a pullback")?;
        ensure(canonical_form(&pb.object) == canonical_form(&sub.object), || {
            format!("the pullback along the {side} coprojection differs from the preimage")
        })?;
        ensure(pb.left.is_mono() && image_selection(&pb.left) == image_selection(&sub.inclusion), || {
            format!("the pullback along the {side} coprojection does not sit inside the source as the preimage")
        })?;
        parts.push(sub);
    }
    let sum = engine.coproduct(&parts[0].object, &parts[1].object).map_err(e)?;
    let w = copair(&sum, &parts[0].inclusion, &parts[1].inclusion).map_err(e)?;
    valid_morphism(&w, "the comparison map")?;
    ensure(w.is_iso(), || {
        format!(
            "the preimages ({} + {} elements) do not recompose the source ({} elements)",
            parts[0].object.total_size(),
            parts[1].object.total_size(),
            src.total_size()
        )
    })
}

fn fold_coproduct(engine: Engine, schema: &Arc<Schema>, parts: &[Arc<Instance>]) -> Result<Arc<Instance>, String> {
    let mut acc = match parts.first() {
        Some(p) => p.clone(),
        None => return Ok(initial(schema)),
    };
    for p in &parts[1..] {
        acc = engine.coproduct(&acc, p).map_err(e)?.object;
    }
    Ok(acc)
}

/// Coproduct of `parts` under a random binary bracketing.
fn bracketed<R: Rng>(
    engine: Engine,
    schema: &Arc<Schema>,
    parts: &[Arc<Instance>],
    rng: &mut R,
) -> Result<Arc<Instance>, String> {
    match parts.len() {
        0 => Ok(initial(schema)),
        1 => Ok(parts[0].clone()),
        n => {
            let k = rng.gen_range(1..n);
            let l = bracketed(engine, schema, &parts[..k], rng)?;
            let r = bracketed(engine, schema, &parts[k..], rng)?;
            Ok(engine.coproduct(&l, &r).map_err(e)?.object)
        }
    }
}

fn sorted_forms(inst: &Arc<Instance>) -> Result<Vec<CanonicalForm>, String> {
    let mut forms = connected_components(inst).map_err(e)?.forms;
    forms.sort();
    Ok(forms)
}

fn decomposition_witness(engine: Engine, a: &Args) -> Check {
    let x = a.inst(0)?;
    let dec = connected_components(x).map_err(e)?;
    for (i, c) in dec.components.iter().enumerate() {
        ensure(is_connected(c), || format!("component {i} is not connected"))?;
    }
    valid_morphism(&dec.witness, "the decomposition witness")?;
    ensure(dec.witness.is_iso(), || "the decomposition witness is not invertible".into())?;
    ensure(dec.is_empty() == x.is_initial(), || "empty decomposition does not match emptiness".into())?;
    let again = fold_coproduct(engine, &a.schema, &dec.components)?;
    ensure(canonical_form(&again) == canonical_form(x), || "the components do not recompose the instance".into())
}

fn unique_factorization(engine: Engine, a: &Args) -> Check {
    let x = a.inst(0)?;
    let base = sorted_forms(x)?;
    let (moved, _) = relabel(x, a.seed);
    let dec = connected_components(&moved).map_err(e)?;
    valid_morphism(&dec.witness, "the witness after relabeling")?;
    ensure(dec.witness.is_iso(), || "the witness after relabeling is not invertible".into())?;
    let mut forms = dec.forms.clone();
    forms.sort();
    ensure(forms == base, || "relabeling changed the component multiset".into())?;
    let mut rng = a.rng();
    let mut parts = connected_components(x).map_err(e)?.components;
    rand::seq::SliceRandom::shuffle(parts.as_mut_slice(), &mut rng);
    let rebuilt = bracketed(engine, &a.schema, &parts, &mut rng)?;
    ensure(sorted_forms(&rebuilt)? == base, || "re-bracketing the components changed the multiset".into())
}

fn cancellation(engine: Engine, a: &Args) -> Check {
    let (c, x, x2) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    if !is_connected(c) {
        return Ok(());
    }
    let left = canonical_form(&engine.coproduct(c, x).map_err(e)?.object);
    let right = canonical_form(&engine.coproduct(c, x2).map_err(e)?.object);
    ensure(left != right || canonical_form(x) == canonical_form(x2), || {
        "adding the same connected summand identified two different instances".into()
    })
}

fn component_bound(engine: Engine, a: &Args) -> Check {
    let x = a.inst(0)?;
    let dec = connected_components(x).map_err(e)?;
    let doubled = engine.coproduct(x, x).map_err(e)?.object;
    let direct = count_homs_direct(x, &doubled).map_err(e)?;
    let mut product_count = 1u64;
    for c in &dec.components {
        product_count *= count_homs_direct(c, &doubled).map_err(e)?;
    }
    ensure(direct == product_count, || format!("{direct} maps into X+X but the components give {product_count}"))?;
    let n = dec.len() as u32;
    ensure(direct >= 1u64 << n, || format!("{direct} maps into X+X, fewer than 2^{n}"))
}

fn connected_agreement(_: Engine, a: &Args) -> Check {
    let f = a.inst(0)?;
    let by_components = is_connected(f);
    let mut all_bijective = true;
    let mut first_failure = None;
    for (k, pair) in a.instances[1..].chunks(2).enumerate() {
        let [x, y] = pair else { return Err("pairs are incomplete".into()) };
        if !check_conn_bijection(f, x, y).map_err(e)? {
            all_bijective = false;
            first_failure.get_or_insert(k);
        }
    }
    ensure(by_components == all_bijective, || {
        if by_components {
            format!("connected by components, but pair {} is not bijective", first_failure.unwrap_or(0))
        } else {
            "not connected by components, yet every sampled pair is bijective".into()
        }
    })
}

fn dichotomy(engine: Engine, a: &Args) -> Check {
    let f = a.inst(0)?;
    if is_connected(f) || f.is_initial() {
        return Ok(());
    }
    let dec = connected_components(f).map_err(e)?;
    let u = dec.components[0].clone();
    let v = fold_coproduct(engine, &a.schema, &dec.components[1..])?;
    ensure(!u.is_initial() && !v.is_initial(), || "a split has an empty side".into())?;
    let sum = engine.coproduct(&u, &v).map_err(e)?.object;
    ensure(canonical_form(&sum) == canonical_form(f), || "U + V is not the instance".into())
}

fn hom_additive(engine: Engine, a: &Args) -> Check {
    let (c, x, y) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    if !is_connected(c) {
        return Ok(());
    }
    let sum = engine.coproduct(x, y).map_err(e)?.object;
    let lhs = count_homs_direct(c, &sum).map_err(e)?;
    let rhs = count_homs_direct(c, x).map_err(e)? + count_homs_direct(c, y).map_err(e)?;
    ensure(lhs == rhs, || format!("{lhs} maps into the sum, {rhs} into the summands"))
}

fn hom_multiplicative(_: Engine, a: &Args) -> Check {
    let (d, x, y) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    let prod = product(x, y).map_err(e)?.object;
    let lhs = count_homs_direct(d, &prod).map_err(e)?;
    let rhs = count_homs_direct(d, x).map_err(e)? * count_homs_direct(d, y).map_err(e)?;
    ensure(lhs == rhs, || format!("{lhs} maps into the product, {rhs} pairs"))
}

fn distributive(engine: Engine, a: &Args) -> Check {
    let (x, y, z) = (a.inst(0)?, a.inst(1)?, a.inst(2)?);
    let lhs = product(x, &engine.coproduct(y, z).map_err(e)?.object).map_err(e)?.object;
    let xy = product(x, y).map_err(e)?.object;
    let xz = product(x, z).map_err(e)?.object;
    let rhs = engine.coproduct(&xy, &xz).map_err(e)?.object;
    ensure(class_of(&lhs).map_err(e)? == class_of(&rhs).map_err(e)?, || "A x (B + C) differs from A x B + A x C".into())
}

fn class_product(_: Engine, a: &Args) -> Check {
    let (x, y) = (a.inst(0)?, a.inst(1)?);
    let direct = class_of(&product(x, y).map_err(e)?.object).map_err(e)?;
    let via_ring = class_of(x).map_err(e)?.mul(&class_of(y).map_err(e)?).map_err(e)?;
    ensure(direct == via_ring, || "the class of the product differs from the product of classes".into())
}

fn profile_homomorphism(engine: Engine, a: &Args) -> Check {
    let (x, y) = (a.inst(0)?, a.inst(1)?);
    let basis = a.basis()?;
    let (cx, cy) = (class_of(x).map_err(e)?, class_of(y).map_err(e)?);
    let (px, py) = (profile(&cx, &basis).map_err(e)?, profile(&cy, &basis).map_err(e)?);
    ensure(profile_direct(x, &basis).map_err(e)? == px, || "profile by components differs from direct counts".into())?;
    let sum = engine.coproduct(x, y).map_err(e)?.object;
    ensure(profile_direct(&sum, &basis).map_err(e)? == px.add(&py), || "the profile is not additive".into())?;
    ensure(profile(&cx.add(&cy).map_err(e)?, &basis).map_err(e)? == px.add(&py), || {
        "the profile of a class sum is not additive".into()
    })?;
    ensure(profile(&cx.mul(&cy).map_err(e)?, &basis).map_err(e)? == px.mul(&py), || {
        "the profile is not multiplicative".into()
    })?;
    ensure(ring_profile(&to_ring(&cx), &basis).map_err(e)? == px, || "the ring profile disagrees on classes".into())
}

fn semiring_laws(_: Engine, a: &Args) -> Check {
    let cls = |i| -> Result<DecClass, String> { class_of(a.inst(i)?).map_err(e) };
    let (x, y, z) = (cls(0)?, cls(1)?, cls(2)?);
    let s = &a.schema;
    let add = |p: &DecClass, q: &DecClass| p.add(q).map_err(e);
    let mul = |p: &DecClass, q: &DecClass| p.mul(q).map_err(e);
    let laws: [(&str, bool); 8] = [
        ("addition is associative", add(&add(&x, &y)?, &z)? == add(&x, &add(&y, &z)?)?),
        ("addition is commutative", add(&x, &y)? == add(&y, &x)?),
        ("multiplication is associative", mul(&mul(&x, &y)?, &z)? == mul(&x, &mul(&y, &z)?)?),
        ("multiplication is commutative", mul(&x, &y)? == mul(&y, &x)?),
        ("multiplication distributes", mul(&x, &add(&y, &z)?)? == add(&mul(&x, &y)?, &mul(&x, &z)?)?),
        ("zero is neutral", add(&x, &DecClass::zero(s))? == x),
        ("one is neutral", mul(&x, &DecClass::one(s))? == x),
        ("zero annihilates", mul(&x, &DecClass::zero(s))?.is_zero()),
    ];
    match laws.iter().find(|(_, ok)| !ok) {
        Some((law, _)) => Err(format!("{law} fails")),
        None => Ok(()),
    }
}

fn ring_laws(_: Engine, a: &Args) -> Check {
    let cls = |i| -> Result<DecClass, String> { class_of(a.inst(i)?).map_err(e) };
    let (x, y, z) = (cls(0)?, cls(1)?, cls(2)?);
    let s = &a.schema;
    let one = RingElement::one(s);
    let p = to_ring(&x).sub(&to_ring(&y)).map_err(e)?;
    let q = to_ring(&z).sub(&one).map_err(e)?;
    let r = to_ring(&y).scale(2).sub(&to_ring(&x)).map_err(e)?;
    let add = |u: &RingElement, v: &RingElement| u.add(v).map_err(e);
    let mul = |u: &RingElement, v: &RingElement| u.mul(v).map_err(e);
    let laws: [(&str, bool); 10] = [
        ("addition is associative", add(&add(&p, &q)?, &r)? == add(&p, &add(&q, &r)?)?),
        ("addition is commutative", add(&p, &q)? == add(&q, &p)?),
        ("negation is inverse", add(&p, &p.neg())?.is_zero()),
        ("multiplication is associative", mul(&mul(&p, &q)?, &r)? == mul(&p, &mul(&q, &r)?)?),
        ("multiplication is commutative", mul(&p, &q)? == mul(&q, &p)?),
        ("multiplication distributes", mul(&p, &add(&q, &r)?)? == add(&mul(&p, &q)?, &mul(&p, &r)?)?),
        ("one is neutral", mul(&p, &one)? == p),
        ("embedding preserves sums", to_ring(&x.add(&y).map_err(e)?) == add(&to_ring(&x), &to_ring(&y))?),
        ("embedding preserves products", to_ring(&x.mul(&y).map_err(e)?) == mul(&to_ring(&x), &to_ring(&y))?),
        ("embedding round-trips", to_ring(&x).to_class().as_ref() == Some(&x)),
    ];
    match laws.iter().find(|(_, ok)| !ok) {
        Some((law, _)) => Err(format!("{law} fails")),
        None => Ok(()),
    }
}

fn to_ring_roundtrip(_: Engine, a: &Args) -> Check {
    let x = class_of(a.inst(0)?).map_err(e)?;
    let r = to_ring(&x);
    ensure(x.is_zero() || r.coeffs().values().all(|&c| c > 0), || {
        "embedded class has a non-positive coefficient".into()
    })?;
    ensure(r.to_class().as_ref() == Some(&x), || "class does not survive the round trip".into())
}

fn profile_separation(_: Engine, a: &Args) -> Check {
    let (x, y) = (a.inst(0)?, a.inst(1)?);
    let basis = a.basis()?;
    let same = profile_direct(x, &basis).map_err(e)? == profile_direct(y, &basis).map_err(e)?;
    ensure(!same || canonical_form(x) == canonical_form(y), || "non-isomorphic instances share a profile".into())
}

fn profile_invariance(_: Engine, a: &Args) -> Check {
    let x = a.inst(0)?;
    let basis = a.basis()?;
    let (moved, _) = relabel(x, a.seed);
    ensure(profile_direct(x, &basis).map_err(e)? == profile_direct(&moved, &basis).map_err(e)?, || {
        "relabeling changed the profile".into()
    })
}

fn marks_triangular(_: Engine, a: &Args) -> Check {
    let bounds = a.bounds.as_ref().ok_or("check needs universe bounds")?;
    let table = table_of_marks(&a.schema, bounds).map_err(e)?;
    ensure(table.is_lower_triangular(), || format!("marks {:?} are not lower triangular", table.matrix))?;
    ensure(table.diagonal_positive(), || format!("marks {:?} have a zero on the diagonal", table.matrix))
}

/// Upper limit on the number of coefficient vectors the ghost check visits.
pub const GHOST_BOX_LIMIT: usize = 1_000_000;

fn ghost_injective(_: Engine, a: &Args) -> Check {
    let bounds = a.bounds.as_ref().ok_or("check needs universe bounds")?;
    let table = table_of_marks(&a.schema, bounds).map_err(e)?;
    let basis = TestBasis::new(&a.schema, table.transitive.clone()).map_err(e)?;
    for (i, t) in table.transitive.iter().enumerate() {
        let row = ring_profile(&to_ring(&class_of(&t.instance).map_err(e)?), &basis).map_err(e)?;
        let expected: Vec<i128> = table.matrix[i].iter().map(|&v| i128::from(v)).collect();
        ensure(row.0 == expected, || format!("profile of transitive instance {i} differs from its row of marks"))?;
    }
    let k = basis.len();
    let size = 5usize.checked_pow(k as u32).filter(|&n| n <= GHOST_BOX_LIMIT).ok_or("coefficient box too large")?;
    let mut seen: HashMap<Vec<i128>, Vec<i64>> = HashMap::with_capacity(size);
    for code in 0..size {
        let coeffs: Vec<i64> = (0..k).map(|j| (code / 5usize.pow(j as u32) % 5) as i64 - 2).collect();
        let elem =
            RingElement::from_coeffs(&a.schema, basis.forms().cloned().zip(coeffs.iter().copied())).map_err(e)?;
        let p = ring_profile(&elem, &basis).map_err(e)?;
        if let Some(prev) = seen.insert(p.0, coeffs.clone()) {
            return Err(format!("coefficients {prev:?} and {coeffs:?} share a profile"));
        }
    }
    Ok(())
}
