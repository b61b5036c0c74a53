//! Backtracking enumeration of natural transformations.
//!
//! Variables are the elements of the source in the fixed global order (node
//! order, then element order). Assigning an image to `x` immediately forces the
//! images of `a(x)` along every outgoing arrow `a`, transitively, and checks
//! every incoming arrow whose source is already assigned. A contradiction
//! prunes the branch. Elements that were forced are skipped when the search
//! reaches them.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::components::connected_components_raw;
use crate::construct::coproduct;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::morphism::Morphism;

const UNSET: usize = usize::MAX;

/// Hom-sets up to this size are sampled by full enumeration.
pub const SAMPLE_ENUMERATION_LIMIT: u64 = 10_000;

/// All morphisms from `source` to `target` in search order.
#[derive(Debug, Clone)]
pub struct HomSet {
    pub source: Arc<Instance>,
    pub target: Arc<Instance>,
    pub morphisms: Vec<Morphism>,
}

impl HomSet {
    pub fn count(&self) -> usize {
        self.morphisms.len()
    }
}

struct Search<'a> {
    src: &'a Instance,
    tgt: &'a Instance,
    image: Vec<Vec<usize>>,
    /// Per arrow, per element of the arrow's target: elements mapped onto it.
    preimages: Vec<Vec<Vec<usize>>>,
    trail: Vec<(usize, usize)>,
    injective: bool,
    used: Vec<Vec<bool>>,
    order: Vec<(usize, usize)>,
    work: Vec<(usize, usize, usize)>,
}

impl<'a> Search<'a> {
    fn new(src: &'a Instance, tgt: &'a Instance, injective: bool) -> Self {
        let schema = src.schema();
        let preimages = schema
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| {
                let mut pre = vec![Vec::new(); src.size(a.target)];
                for x in 0..src.size(a.source) {
                    pre[src.apply(ai, x)].push(x);
                }
                pre
            })
            .collect();
        Search {
            src,
            tgt,
            image: src.sizes().into_iter().map(|n| vec![UNSET; n]).collect(),
            preimages,
            trail: Vec::new(),
            injective,
            used: tgt.sizes().into_iter().map(|n| vec![false; n]).collect(),
            order: src.elements().collect(),
            work: Vec::new(),
        }
    }

    /// Assigns `x -> y` at node `d` and closes under forcing. On `false` the
    /// caller must undo to its mark.
    fn assign(&mut self, d: usize, x: usize, y: usize) -> bool {
        let src: &'a Instance = self.src;
        let schema = src.schema();
        self.work.clear();
        self.work.push((d, x, y));
        while let Some((d, x, y)) = self.work.pop() {
            let current = self.image[d][x];
            if current != UNSET {
                if current != y {
                    return false;
                }
                continue;
            }
            if self.injective && self.used[d][y] {
                return false;
            }
            for &ai in schema.in_arrows(d) {
                let src_node = schema.arrows()[ai].source;
                for &xp in &self.preimages[ai][x] {
                    let yp = self.image[src_node][xp];
                    if yp != UNSET && self.tgt.apply(ai, yp) != y {
                        return false;
                    }
                }
            }
            self.image[d][x] = y;
            if self.injective {
                self.used[d][y] = true;
            }
            self.trail.push((d, x));
            for &ai in schema.out_arrows(d) {
                let t = schema.arrows()[ai].target;
                self.work.push((t, self.src.apply(ai, x), self.tgt.apply(ai, y)));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (d, x) = self.trail.pop().expect("trail above mark");
            if self.injective {
                self.used[d][self.image[d][x]] = false;
            }
            self.image[d][x] = UNSET;
        }
    }

    fn run<F>(&mut self, pos: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[Vec<usize>]) -> ControlFlow<()>,
    {
        let Some(&(d, x)) = self.order.get(pos) else {
            return visit(&self.image);
        };
        if self.image[d][x] != UNSET {
            return self.run(pos + 1, visit);
        }
        for y in 0..self.tgt.size(d) {
            let mark = self.trail.len();
            if self.assign(d, x, y) {
                self.run(pos + 1, visit)?;
            }
            self.undo(mark);
        }
        ControlFlow::Continue(())
    }

    fn run_random<R: Rng>(&mut self, pos: usize, rng: &mut R) -> bool {
        let Some(&(d, x)) = self.order.get(pos) else {
            return true;
        };
        if self.image[d][x] != UNSET {
            return self.run_random(pos + 1, rng);
        }
        let mut candidates: Vec<usize> = (0..self.tgt.size(d)).collect();
        candidates.shuffle(rng);
        for y in candidates {
            let mark = self.trail.len();
            if self.assign(d, x, y) && self.run_random(pos + 1, rng) {
                return true;
            }
            self.undo(mark);
        }
        false
    }
}

fn check_schemas(x: &Instance, y: &Instance) -> Result<()> {
    if x.same_schema(y) {
        Ok(())
    } else {
        Err(Error::SchemaMismatch)
    }
}

/// Visits every morphism `x -> y` as raw component tables, in search order.
pub fn for_each_hom<F>(x: &Instance, y: &Instance, mut visit: F) -> Result<()>
where
    F: FnMut(&[Vec<usize>]) -> ControlFlow<()>,
{
    check_schemas(x, y)?;
    let mut search = Search::new(x, y, false);
    let _ = search.run(0, &mut visit);
    Ok(())
}

pub fn enumerate_homs(x: &Arc<Instance>, y: &Arc<Instance>) -> Result<HomSet> {
    let mut morphisms = Vec::new();
    for_each_hom(x, y, |comps| {
        morphisms.push(Morphism::new_unchecked(x.clone(), y.clone(), comps.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(HomSet { source: x.clone(), target: y.clone(), morphisms })
}

/// Counts by running the search over the whole source.
pub fn count_homs_direct(x: &Instance, y: &Instance) -> Result<u64> {
    let mut n = 0u64;
    for_each_hom(x, y, |_| {
        n += 1;
        ControlFlow::Continue(())
    })?;
    Ok(n)
}

/// Counts morphisms as the product of the counts out of each connected
/// component of the source.
pub fn count_homs(x: &Instance, y: &Instance) -> Result<u64> {
    check_schemas(x, y)?;
    let mut total = 1u64;
    for part in connected_components_raw(x) {
        if total == 0 {
            break;
        }
        let c = count_homs_direct(&part, y)?;
        total = total.checked_mul(c).ok_or_else(|| Error::Domain("hom count overflows u64".into()))?;
    }
    Ok(total)
}

/// Searches for an isomorphism among node-wise bijections.
pub fn find_iso(x: &Arc<Instance>, y: &Arc<Instance>) -> Result<Option<Morphism>> {
    check_schemas(x, y)?;
    if x.sizes() != y.sizes() {
        return Ok(None);
    }
    let mut search = Search::new(x, y, true);
    let mut found = None;
    let _ = search.run(0, &mut |comps: &[Vec<usize>]| {
        found = Some(comps.to_vec());
        ControlFlow::Break(())
    });
    Ok(found.map(|c| Morphism::new_unchecked(x.clone(), y.clone(), c)))
}

/// Tests whether `Hom(C,A) ⊔ Hom(C,B) -> Hom(C,A+B)`, given by
/// post-composition with the coprojections, is a bijection.
pub fn check_conn_bijection(c: &Arc<Instance>, a: &Arc<Instance>, b: &Arc<Instance>) -> Result<bool> {
    check_schemas(c, a)?;
    check_schemas(c, b)?;
    let cop = coproduct(a, b)?;
    let mut images: HashSet<Vec<Vec<usize>>> = HashSet::new();
    let mut injective = true;
    for (summand, inj) in [(a, &cop.left), (b, &cop.right)] {
        for_each_hom(c, summand, |comps| {
            let pushed: Vec<Vec<usize>> =
                comps.iter().enumerate().map(|(d, comp)| comp.iter().map(|&y| inj.apply(d, y)).collect()).collect();
            if !images.insert(pushed) {
                injective = false;
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        })?;
        if !injective {
            return Ok(false);
        }
    }
    let total = count_homs_direct(c, &cop.object)?;
    Ok(total == images.len() as u64)
}

/// Draws one morphism `x -> y`, or `None` when the hom-set is empty.
///
/// Uniform over the hom-set when it has at most
/// [`SAMPLE_ENUMERATION_LIMIT`] members; otherwise a randomized descent.
pub fn sample_hom<R: Rng>(x: &Arc<Instance>, y: &Arc<Instance>, rng: &mut R) -> Result<Option<Morphism>> {
    check_schemas(x, y)?;
    let n = count_homs(x, y)?;
    if n == 0 {
        return Ok(None);
    }
    if n <= SAMPLE_ENUMERATION_LIMIT {
        let pick = rng.gen_range(0..n);
        let mut seen = 0u64;
        let mut chosen = None;
        for_each_hom(x, y, |comps| {
            if seen == pick {
                chosen = Some(comps.to_vec());
                return ControlFlow::Break(());
            }
            seen += 1;
            ControlFlow::Continue(())
        })?;
        return Ok(chosen.map(|c| Morphism::new_unchecked(x.clone(), y.clone(), c)));
    }
    let mut search = Search::new(x, y, false);
    if search.run_random(0, rng) {
        Ok(Some(Morphism::new_unchecked(x.clone(), y.clone(), search.image)))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{coproduct, initial};
    use crate::morphism::validate_morphism;
    use crate::schema::{presets, Schema};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g() -> Arc<Schema> {
        Arc::new(presets::digraph())
    }

    fn graph(s: &Arc<Schema>, v: &[&str], edges: &[(&str, &str, &str)]) -> Arc<Instance> {
        let e: Vec<&str> = edges.iter().map(|t| t.0).collect();
        let src: Vec<(&str, &str)> = edges.iter().map(|t| (t.0, t.1)).collect();
        let tgt: Vec<(&str, &str)> = edges.iter().map(|t| (t.0, t.2)).collect();
        Arc::new(Instance::from_names(s.clone(), &[("V", v), ("E", &e)], &[("s", &src), ("t", &tgt)]).unwrap())
    }

    #[test]
    fn vertex_into_anything_counts_vertices() {
        let s = g();
        let k1 = graph(&s, &["v"], &[]);
        let c3 = graph(&s, &["0", "1", "2"], &[("a", "0", "1"), ("b", "1", "2"), ("c", "2", "0")]);
        assert_eq!(enumerate_homs(&k1, &c3).unwrap().count(), 3);
        let both = coproduct(&c3, &k1).unwrap().object;
        assert_eq!(count_homs(&k1, &both).unwrap(), 4);
    }

    #[test]
    fn cycle_into_itself_has_three_rotations() {
        let s = g();
        let c3 = graph(&s, &["0", "1", "2"], &[("a", "0", "1"), ("b", "1", "2"), ("c", "2", "0")]);
        let homs = enumerate_homs(&c3, &c3).unwrap();
        assert_eq!(homs.count(), 3);
        for m in &homs.morphisms {
            assert_eq!(validate_morphism(m), Ok(()));
        }
    }

    #[test]
    fn path_into_fork_and_path() {
        let s = g();
        let p3 = graph(&s, &["a", "b", "c"], &[("x", "a", "b"), ("y", "b", "c")]);
        let fork = graph(&s, &["1", "2", "3"], &[("p", "1", "2"), ("q", "1", "3")]);
        let path = graph(&s, &["1", "2", "3"], &[("p", "1", "2"), ("q", "2", "3")]);
        assert_eq!(count_homs(&p3, &fork).unwrap(), 0);
        assert_eq!(count_homs(&p3, &path).unwrap(), 1);
        assert_eq!(count_homs_direct(&p3, &path).unwrap(), 1);
    }

    #[test]
    fn initial_and_strictness() {
        let s = g();
        let k1 = graph(&s, &["v"], &[]);
        let empty = initial(&s);
        assert_eq!(count_homs(&empty, &k1).unwrap(), 1);
        assert_eq!(count_homs(&empty, &empty).unwrap(), 1);
        assert_eq!(count_homs(&k1, &empty).unwrap(), 0);
    }

    #[test]
    fn iso_search() {
        let s = g();
        let k1 = graph(&s, &["v"], &[]);
        let two = coproduct(&k1, &k1).unwrap().object;
        assert!(find_iso(&two, &k1).unwrap().is_none());
        let loop_iso = graph(&s, &["u", "v"], &[("e", "u", "u")]);
        let edge = graph(&s, &["u", "v"], &[("e", "u", "v")]);
        assert!(find_iso(&loop_iso, &edge).unwrap().is_none());
        let iso = find_iso(&edge, &edge).unwrap().unwrap();
        assert!(iso.is_iso());
    }

    #[test]
    fn connectedness_bijection_cases() {
        let s = g();
        let k1 = graph(&s, &["v"], &[]);
        let c3 = graph(&s, &["0", "1", "2"], &[("a", "0", "1"), ("b", "1", "2"), ("c", "2", "0")]);
        assert!(check_conn_bijection(&k1, &c3, &k1).unwrap());
        let two = coproduct(&k1, &k1).unwrap().object;
        assert!(!check_conn_bijection(&two, &k1, &k1).unwrap());
        let empty = initial(&s);
        assert!(!check_conn_bijection(&empty, &c3, &k1).unwrap());
    }

    #[test]
    fn schema_mismatch_is_an_error() {
        let k1 = graph(&g(), &["v"], &[]);
        let c2 = Arc::new(presets::c2());
        let pt = crate::construct::terminal(&c2);
        assert!(matches!(count_homs(&k1, &pt), Err(Error::SchemaMismatch)));
    }

    #[test]
    fn sampling_returns_members() {
        let s = g();
        let c3 = graph(&s, &["0", "1", "2"], &[("a", "0", "1"), ("b", "1", "2"), ("c", "2", "0")]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let m = sample_hom(&c3, &c3, &mut rng).unwrap().unwrap();
            assert_eq!(validate_morphism(&m), Ok(()));
        }
        let k1 = graph(&s, &["v"], &[]);
        assert!(sample_hom(&c3, &k1, &mut rng).unwrap().is_none());
    }
}
