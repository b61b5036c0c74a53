//! Initial and terminal objects, coproducts, products, pullbacks,
//! sub-instances, preimages and random relabelings.
//!
//! Coproduct elements are tagged `0:x` / `1:y`; products and fiber products
//! use `(x|y)`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{normalize, Instance};
use crate::morphism::Morphism;
use crate::schema::Schema;

/// Per-node membership flags over a carrier.
pub type Selection = Vec<Vec<bool>>;

pub fn initial(schema: &Arc<Schema>) -> Arc<Instance> {
    let carriers = vec![Vec::new(); schema.node_count()];
    let actions = vec![Vec::new(); schema.arrows().len()];
    Arc::new(Instance::from_tables_unchecked(schema.clone(), carriers, actions))
}

pub fn terminal(schema: &Arc<Schema>) -> Arc<Instance> {
    let carriers = vec![vec!["*".to_string()]; schema.node_count()];
    let actions = vec![vec![0]; schema.arrows().len()];
    Arc::new(Instance::from_tables_unchecked(schema.clone(), carriers, actions))
}

/// The unique morphism out of the initial instance.
pub fn from_initial(target: &Arc<Instance>) -> Morphism {
    let schema = target.schema();
    Morphism::new_unchecked(initial(schema), target.clone(), vec![Vec::new(); schema.node_count()])
}

/// The unique morphism into the terminal instance.
pub fn to_terminal(source: &Arc<Instance>) -> Morphism {
    let comps = source.sizes().into_iter().map(|n| vec![0; n]).collect();
    Morphism::new_unchecked(source.clone(), terminal(source.schema()), comps)
}

#[derive(Debug, Clone)]
pub struct Coproduct {
    pub object: Arc<Instance>,
    pub left: Morphism,
    pub right: Morphism,
}

pub fn coproduct(f: &Arc<Instance>, g: &Arc<Instance>) -> Result<Coproduct> {
    if !f.same_schema(g) {
        return Err(Error::SchemaMismatch);
    }
    let schema = f.schema();
    let mut carriers = Vec::with_capacity(schema.node_count());
    for d in 0..schema.node_count() {
        let mut c: Vec<String> = f.carrier(d).iter().map(|x| format!("0:{x}")).collect();
        c.extend(g.carrier(d).iter().map(|y| format!("1:{y}")));
        carriers.push(c);
    }
    let actions = schema
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            let offset = f.size(a.target);
            let mut t = f.action(ai).to_vec();
            t.extend(g.action(ai).iter().map(|&y| y + offset));
            t
        })
        .collect();
    // Tags keep the union sorted: every `0:` name precedes every `1:` name.
    let object = Arc::new(Instance::from_tables_unchecked(schema.clone(), carriers, actions));
    let left =
        Morphism::new_unchecked(f.clone(), object.clone(), f.sizes().into_iter().map(|n| (0..n).collect()).collect());
    let right = Morphism::new_unchecked(
        g.clone(),
        object.clone(),
        (0..schema.node_count()).map(|d| (0..g.size(d)).map(|y| y + f.size(d)).collect()).collect(),
    );
    Ok(Coproduct { object, left, right })
}

/// The unique `w: F+G -> T` with `w . i_F = u` and `w . i_G = v`.
pub fn copair(cop: &Coproduct, u: &Morphism, v: &Morphism) -> Result<Morphism> {
    if *u.source() != *cop.left.source() || *v.source() != *cop.right.source() {
        return Err(Error::Domain("copairing legs do not match the summands".into()));
    }
    if *u.target() != *v.target() {
        return Err(Error::TargetMismatch);
    }
    let comps = u.components().iter().zip(v.components()).map(|(a, b)| a.iter().chain(b).copied().collect()).collect();
    Ok(Morphism::new_unchecked(cop.object.clone(), u.target().clone(), comps))
}

/// Left-folded coproduct of a sequence, with one injection per summand.
/// The empty sequence gives the initial instance.
pub fn coproduct_all(schema: &Arc<Schema>, parts: &[Arc<Instance>]) -> Result<(Arc<Instance>, Vec<Morphism>)> {
    let Some((first, rest)) = parts.split_first() else {
        return Ok((initial(schema), Vec::new()));
    };
    if !first.schema().as_ref().eq(schema.as_ref()) {
        return Err(Error::SchemaMismatch);
    }
    let mut object = first.clone();
    let mut injections = vec![Morphism::identity(first)];
    for part in rest {
        let cop = coproduct(&object, part)?;
        injections = injections.iter().map(|i| i.then(&cop.left)).collect::<Result<_>>()?;
        injections.push(cop.right.clone());
        object = cop.object;
    }
    Ok((object, injections))
}

/// Mediating map out of the left-folded coproduct of `parts`, given one leg
/// `parts[i] -> target` per summand.
pub fn copair_all(
    schema: &Arc<Schema>,
    parts: &[Arc<Instance>],
    legs: &[Morphism],
    target: &Arc<Instance>,
) -> Result<Morphism> {
    if parts.len() != legs.len() {
        return Err(Error::Domain("one leg per summand is required".into()));
    }
    let (object, injections) = coproduct_all(schema, parts)?;
    let mut comps: Vec<Vec<usize>> = object.sizes().into_iter().map(|n| vec![0; n]).collect();
    for (inj, leg) in injections.iter().zip(legs) {
        if **leg.target() != **target || **leg.source() != **inj.source() {
            return Err(Error::Domain("copairing leg does not match its summand".into()));
        }
        for (d, comp) in comps.iter_mut().enumerate() {
            for x in 0..inj.source().size(d) {
                comp[inj.apply(d, x)] = leg.apply(d, x);
            }
        }
    }
    Ok(Morphism::new_unchecked(object, target.clone(), comps))
}

#[derive(Debug, Clone)]
pub struct Product {
    pub object: Arc<Instance>,
    pub left: Morphism,
    pub right: Morphism,
}

pub fn product(f: &Arc<Instance>, g: &Arc<Instance>) -> Result<Product> {
    if !f.same_schema(g) {
        return Err(Error::SchemaMismatch);
    }
    let schema = f.schema();
    let mut carriers = Vec::new();
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::new();
    for d in 0..schema.node_count() {
        let mut names = Vec::new();
        let mut ps = Vec::new();
        for (x, xn) in f.carrier(d).iter().enumerate() {
            for (y, yn) in g.carrier(d).iter().enumerate() {
                names.push(format!("({xn}|{yn})"));
                ps.push((x, y));
            }
        }
        carriers.push(names);
        pairs.push(ps);
    }
    let actions = schema
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            let width = g.size(a.target);
            pairs[a.source].iter().map(|&(x, y)| f.apply(ai, x) * width + g.apply(ai, y)).collect()
        })
        .collect();
    let (object, perms) = normalize(schema.clone(), carriers, actions);
    let object = Arc::new(object);
    let mut lcomp = Vec::new();
    let mut rcomp = Vec::new();
    for d in 0..schema.node_count() {
        let mut l = vec![0; pairs[d].len()];
        let mut r = vec![0; pairs[d].len()];
        for (old, &(x, y)) in pairs[d].iter().enumerate() {
            l[perms[d][old]] = x;
            r[perms[d][old]] = y;
        }
        lcomp.push(l);
        rcomp.push(r);
    }
    let left = Morphism::new_unchecked(object.clone(), f.clone(), lcomp);
    let right = Morphism::new_unchecked(object.clone(), g.clone(), rcomp);
    Ok(Product { object, left, right })
}

/// The unique `<u, v>: D -> F x G` with both projections recovering `u`, `v`.
pub fn pair(prod: &Product, u: &Morphism, v: &Morphism) -> Result<Morphism> {
    if *u.target() != *prod.left.target() || *v.target() != *prod.right.target() {
        return Err(Error::Domain("pairing legs do not match the factors".into()));
    }
    if *u.source() != *v.source() {
        return Err(Error::Domain("pairing legs have different sources".into()));
    }
    let obj = &prod.object;
    let comps = (0..obj.schema().node_count())
        .map(|d| {
            let width = prod.right.target().size(d);
            let mut lookup = vec![0; obj.size(d)];
            for p in 0..obj.size(d) {
                lookup[prod.left.apply(d, p) * width + prod.right.apply(d, p)] = p;
            }
            (0..u.source().size(d)).map(|x| lookup[u.apply(d, x) * width + v.apply(d, x)]).collect()
        })
        .collect();
    Ok(Morphism::new_unchecked(u.source().clone(), obj.clone(), comps))
}

#[derive(Debug, Clone)]
pub struct Pullback {
    pub object: Arc<Instance>,
    pub left: Morphism,
    pub right: Morphism,
}

/// Node-wise fiber product of a cospan `f: A -> C <- B: g`.
pub fn pullback(f: &Morphism, g: &Morphism) -> Result<Pullback> {
    if *f.target() != *g.target() {
        return Err(Error::TargetMismatch);
    }
    let a = f.source();
    let b = g.source();
    let schema = a.schema();
    let mut carriers = Vec::new();
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::new();
    for d in 0..schema.node_count() {
        let mut names = Vec::new();
        let mut ps = Vec::new();
        for x in 0..a.size(d) {
            for y in 0..b.size(d) {
                if f.apply(d, x) == g.apply(d, y) {
                    names.push(format!("({}|{})", a.carrier(d)[x], b.carrier(d)[y]));
                    ps.push((x, y));
                }
            }
        }
        carriers.push(names);
        pairs.push(ps);
    }
    let actions = schema
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, arrow)| {
            pairs[arrow.source]
                .iter()
                .map(|&(x, y)| {
                    let image = (a.apply(ai, x), b.apply(ai, y));
                    pairs[arrow.target].binary_search(&image).expect("naturality keeps fibers closed")
                })
                .collect()
        })
        .collect();
    let (object, perms) = normalize(schema.clone(), carriers, actions);
    let object = Arc::new(object);
    let mut lcomp = Vec::new();
    let mut rcomp = Vec::new();
    for d in 0..schema.node_count() {
        let mut l = vec![0; pairs[d].len()];
        let mut r = vec![0; pairs[d].len()];
        for (old, &(x, y)) in pairs[d].iter().enumerate() {
            l[perms[d][old]] = x;
            r[perms[d][old]] = y;
        }
        lcomp.push(l);
        rcomp.push(r);
    }
    Ok(Pullback {
        left: Morphism::new_unchecked(object.clone(), a.clone(), lcomp),
        right: Morphism::new_unchecked(object.clone(), b.clone(), rcomp),
        object,
    })
}

#[derive(Debug, Clone)]
pub struct Subinstance {
    pub object: Arc<Instance>,
    pub inclusion: Morphism,
}

/// First `(arrow, element)` that leaves the selection, if any.
fn escaping(inst: &Instance, selection: &Selection) -> Option<(usize, usize)> {
    let schema = inst.schema();
    for (ai, a) in schema.arrows().iter().enumerate() {
        for x in 0..inst.size(a.source) {
            if selection[a.source][x] && !selection[a.target][inst.apply(ai, x)] {
                return Some((ai, x));
            }
        }
    }
    None
}

fn check_selection_shape(inst: &Instance, selection: &Selection) -> Result<()> {
    let ok = selection.len() == inst.schema().node_count()
        && selection.iter().enumerate().all(|(d, s)| s.len() == inst.size(d));
    if ok {
        Ok(())
    } else {
        Err(Error::Domain("selection does not match the carriers".into()))
    }
}

/// Restricts `inst` to an action-closed selection of elements.
pub fn subinstance(inst: &Arc<Instance>, selection: &Selection) -> Result<Subinstance> {
    check_selection_shape(inst, selection)?;
    let schema = inst.schema();
    if let Some((ai, x)) = escaping(inst, selection) {
        let a = &schema.arrows()[ai];
        return Err(Error::Domain(format!(
            "selection is not closed: `{}` sends `{}` outside it",
            a.name,
            inst.carrier(a.source)[x]
        )));
    }
    let kept: Vec<Vec<usize>> =
        selection.iter().map(|s| s.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| i).collect()).collect();
    let mut new_index: Vec<Vec<usize>> = selection.iter().map(|s| vec![usize::MAX; s.len()]).collect();
    for (d, ks) in kept.iter().enumerate() {
        for (new, &old) in ks.iter().enumerate() {
            new_index[d][old] = new;
        }
    }
    let carriers =
        kept.iter().enumerate().map(|(d, ks)| ks.iter().map(|&x| inst.carrier(d)[x].clone()).collect()).collect();
    let actions = schema
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| kept[a.source].iter().map(|&x| new_index[a.target][inst.apply(ai, x)]).collect())
        .collect();
    let object = Arc::new(Instance::from_tables_unchecked(schema.clone(), carriers, actions));
    let inclusion = Morphism::new_unchecked(object.clone(), inst.clone(), kept);
    Ok(Subinstance { object, inclusion })
}

/// Node-wise preimage of an action-closed selection of the target of `f`.
pub fn preimage(f: &Morphism, selection: &Selection) -> Result<Subinstance> {
    check_selection_shape(f.target(), selection)?;
    if let Some((ai, x)) = escaping(f.target(), selection) {
        let schema = f.target().schema();
        let a = &schema.arrows()[ai];
        return Err(Error::Domain(format!(
            "target selection is not closed: `{}` sends `{}` outside it",
            a.name,
            f.target().carrier(a.source)[x]
        )));
    }
    let source_sel: Selection = (0..f.source().schema().node_count())
        .map(|d| (0..f.source().size(d)).map(|x| selection[d][f.apply(d, x)]).collect())
        .collect();
    subinstance(f.source(), &source_sel)
}

/// Selection of the elements lying in the image of a morphism.
pub fn image_selection(f: &Morphism) -> Selection {
    let t = f.target();
    (0..t.schema().node_count())
        .map(|d| {
            let mut sel = vec![false; t.size(d)];
            for &y in f.component(d) {
                sel[y] = true;
            }
            sel
        })
        .collect()
}

/// Permutes every carrier with a seeded permutation. Returns the permuted
/// instance `G` and the isomorphism `F -> G`.
pub fn relabel(inst: &Arc<Instance>, seed: u64) -> (Arc<Instance>, Morphism) {
    let schema = inst.schema();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perms: Vec<Vec<usize>> = inst
        .sizes()
        .into_iter()
        .map(|n| {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    let actions = schema
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            let mut t = vec![0; inst.size(a.source)];
            for x in 0..inst.size(a.source) {
                t[perms[a.source][x]] = perms[a.target][inst.apply(ai, x)];
            }
            t
        })
        .collect();
    let relabeled = Arc::new(Instance::from_tables_unchecked(schema.clone(), inst.carriers().to_vec(), actions));
    let iso = Morphism::new_unchecked(inst.clone(), relabeled.clone(), perms);
    (relabeled, iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;
    use crate::morphism::validate_morphism;
    use crate::schema::presets;

    fn digraph() -> Arc<Schema> {
        Arc::new(presets::digraph())
    }

    fn c3(g: &Arc<Schema>) -> Arc<Instance> {
        Arc::new(
            Instance::from_names(
                g.clone(),
                &[("V", &["0", "1", "2"]), ("E", &["a", "b", "c"])],
                &[("s", &[("a", "0"), ("b", "1"), ("c", "2")]), ("t", &[("a", "1"), ("b", "2"), ("c", "0")])],
            )
            .unwrap(),
        )
    }

    fn k1(g: &Arc<Schema>) -> Arc<Instance> {
        Arc::new(Instance::from_names(g.clone(), &[("V", &["v"])], &[]).unwrap())
    }

    fn a2(g: &Arc<Schema>) -> Arc<Instance> {
        Arc::new(
            Instance::from_names(
                g.clone(),
                &[("V", &["0", "1"]), ("E", &["e"])],
                &[("s", &[("e", "0")]), ("t", &[("e", "1")])],
            )
            .unwrap(),
        )
    }

    #[test]
    fn terminal_digraph_is_a_loop() {
        let g = digraph();
        let t = terminal(&g);
        assert_eq!(t.sizes(), vec![1, 1]);
        assert_eq!(validate_instance(&t), Ok(()));
        assert!(initial(&g).is_initial());
        let c2 = Arc::new(presets::c2());
        assert_eq!(terminal(&c2).action(0), &[0]);
    }

    #[test]
    fn coproduct_sizes_add() {
        let g = digraph();
        let cop = coproduct(&c3(&g), &k1(&g)).unwrap();
        assert_eq!(cop.object.sizes(), vec![4, 3]);
        assert_eq!(validate_instance(&cop.object), Ok(()));
        assert_eq!(validate_morphism(&cop.left), Ok(()));
        assert_eq!(validate_morphism(&cop.right), Ok(()));
        let unit = coproduct(&c3(&g), &initial(&g)).unwrap();
        assert_eq!(unit.object.sizes(), c3(&g).sizes());
        assert!(unit.left.is_iso());
    }

    #[test]
    fn product_of_edges() {
        let g = digraph();
        let p = product(&a2(&g), &a2(&g)).unwrap();
        assert_eq!(p.object.sizes(), vec![4, 1]);
        assert_eq!(validate_instance(&p.object), Ok(()));
        assert_eq!(validate_morphism(&p.left), Ok(()));
        assert_eq!(validate_morphism(&p.right), Ok(()));
        assert!(product(&a2(&g), &initial(&g)).unwrap().object.is_initial());
        let unit = product(&a2(&g), &terminal(&g)).unwrap();
        assert!(unit.left.is_iso());
    }

    #[test]
    fn pairing_recovers_legs() {
        let g = digraph();
        let a = a2(&g);
        let p = product(&a, &a).unwrap();
        let id = Morphism::identity(&a);
        let diag = pair(&p, &id, &id).unwrap();
        assert_eq!(validate_morphism(&diag), Ok(()));
        assert_eq!(diag.then(&p.left).unwrap(), id);
    }

    #[test]
    fn pullback_of_coprojections_is_empty() {
        let g = digraph();
        let cop = coproduct(&a2(&g), &k1(&g)).unwrap();
        let pb = pullback(&cop.left, &cop.right).unwrap();
        assert!(pb.object.is_initial());
        let a = a2(&g);
        let id = Morphism::identity(&a);
        let pb = pullback(&id, &id).unwrap();
        assert_eq!(pb.object.sizes(), a.sizes());
        assert!(pb.left.is_iso());
    }

    #[test]
    fn subinstance_cases() {
        let g = digraph();
        let a = a2(&g);
        let all: Selection = vec![vec![true, true], vec![true]];
        assert_eq!(*subinstance(&a, &all).unwrap().object, *a);
        let only_source: Selection = vec![vec![true, false], vec![false]];
        let sub = subinstance(&a, &only_source).unwrap();
        assert_eq!(sub.object.sizes(), vec![1, 0]);
        let edge_only: Selection = vec![vec![false, false], vec![true]];
        assert!(subinstance(&a, &edge_only).is_err());
    }

    #[test]
    fn preimage_cases() {
        let g = digraph();
        let x = coproduct(&c3(&g), &k1(&g)).unwrap().object;
        let id = Morphism::identity(&x);
        let whole: Selection = x.sizes().iter().map(|&n| vec![true; n]).collect();
        assert_eq!(*preimage(&id, &whole).unwrap().object, *x);
        let none: Selection = x.sizes().iter().map(|&n| vec![false; n]).collect();
        assert!(preimage(&id, &none).unwrap().object.is_initial());
        let k1_part: Selection = vec![vec![false, false, false, true], vec![false, false, false]];
        let pre = preimage(&id, &k1_part).unwrap();
        assert_eq!(pre.object.sizes(), vec![1, 0]);
    }

    #[test]
    fn relabel_is_deterministic_iso() {
        let g = digraph();
        let x = coproduct(&c3(&g), &k1(&g)).unwrap().object;
        let (r1, iso1) = relabel(&x, 9);
        let (r2, _) = relabel(&x, 9);
        assert_eq!(r1, r2);
        assert_eq!(validate_instance(&r1), Ok(()));
        assert_eq!(validate_morphism(&iso1), Ok(()));
        assert!(iso1.is_iso());
        let (e, _) = relabel(&initial(&g), 3);
        assert!(e.is_initial());
    }

    #[test]
    fn copair_is_the_mediating_map() {
        let g = digraph();
        let a = a2(&g);
        let cop = coproduct(&a, &a).unwrap();
        let id = Morphism::identity(&a);
        let fold = copair(&cop, &id, &id).unwrap();
        assert_eq!(validate_morphism(&fold), Ok(()));
        assert_eq!(cop.left.then(&fold).unwrap(), id);
        assert_eq!(cop.right.then(&fold).unwrap(), id);
    }

    #[test]
    fn nary_coproduct_injections() {
        let g = digraph();
        let parts = vec![k1(&g), a2(&g), c3(&g)];
        let (obj, inj) = coproduct_all(&g, &parts).unwrap();
        assert_eq!(obj.sizes(), vec![6, 4]);
        assert_eq!(inj.len(), 3);
        for i in &inj {
            assert_eq!(validate_morphism(i), Ok(()));
            assert!(i.is_mono());
        }
        let (empty, none) = coproduct_all(&g, &[]).unwrap();
        assert!(empty.is_initial() && none.is_empty());
    }
}
