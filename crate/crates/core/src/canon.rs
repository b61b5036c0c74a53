//! Canonical forms by pruned exhaustive search.
//!
//! An encoding lists the carrier sizes node by node and then every action
//! table in arrow order, with elements replaced by their rank under a chosen
//! per-node ordering. Each number is a big-endian `u16`, so byte order agrees
//! with numeric order. The canonical form is the least encoding over all
//! orderings.
//!
//! The search fills encoding positions left to right and only ever takes a
//! least achievable value at each position, which is exact because every
//! choice extends to some ordering. When the element of the next source rank
//! is not yet fixed, it branches over the unranked elements reaching that
//! value. An unranked image always takes the smallest free rank. Branches
//! whose prefix exceeds the best encoding so far are cut.
//!
//! Elements of a node no arrow points into are never images, so their order
//! matters only through their own columns. They are kept in cells of
//! interchangeable ranks that each column splits by image rank; only a choice
//! between unranked images branches.
//!
//! Two leaves with equal encodings give an automorphism. The automorphisms of
//! each component, exchanges of isomorphic components, and exchanges of
//! isomorphic trees hanging from one element are known before the search
//! starts. Known automorphisms that preserve the current state prune
//! candidates lying in the orbit of one already tried, and the search backs
//! up to the branch where the two leaves parted.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::components::component_selections;
use crate::construct::subinstance;
use crate::error::{Error, Result};
use crate::instance::{indexed_names, Instance};
use crate::morphism::Morphism;
use crate::schema::Schema;

const UNSET: usize = usize::MAX;

#[derive(Clone)]
pub struct CanonicalForm {
    schema: Arc<Schema>,
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Carrier sizes read back from the encoding.
    pub fn sizes(&self) -> Vec<usize> {
        (0..self.schema.node_count()).map(|d| self.word(d)).collect()
    }

    pub fn total_size(&self) -> usize {
        self.sizes().iter().sum()
    }

    fn word(&self, i: usize) -> usize {
        u16::from_be_bytes([self.bytes[2 * i], self.bytes[2 * i + 1]]) as usize
    }

    /// Short hex digest of the encoding, used as a printable label.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.schema.name().as_bytes());
        h.update([0u8]);
        h.update(&self.bytes);
        hex::encode(h.finalize())[..12].to_string()
    }

    /// Rebuilds the representative whose element `k` of each node has rank `k`.
    /// Elements are named after their node, e.g. `v0, v1, ...` at node `V`.
    pub fn to_instance(&self) -> Instance {
        let schema = &self.schema;
        let sizes = self.sizes();
        let carriers: Vec<Vec<String>> =
            schema.nodes().iter().zip(&sizes).map(|(n, &k)| indexed_names(&n.to_lowercase(), k)).collect();
        let mut pos = schema.node_count();
        let actions = schema
            .arrows()
            .iter()
            .map(|a| {
                (0..sizes[a.source])
                    .map(|_| {
                        let v = self.word(pos);
                        pos += 1;
                        v
                    })
                    .collect()
            })
            .collect();
        Instance::from_tables_unchecked(schema.clone(), carriers, actions)
    }

    /// Reconstructs a form from raw bytes, checking that they decode to a
    /// valid instance in canonical position.
    pub fn from_bytes(schema: Arc<Schema>, bytes: Vec<u8>) -> Result<CanonicalForm> {
        let bad = || Error::Domain("byte string is not a canonical form".into());
        if !bytes.len().is_multiple_of(2) || bytes.len() < 2 * schema.node_count() {
            return Err(bad());
        }
        let form = CanonicalForm { schema, bytes };
        let sizes = form.sizes();
        let expected: usize =
            form.schema.node_count() + form.schema.arrows().iter().map(|a| sizes[a.source]).sum::<usize>();
        if form.bytes.len() != 2 * expected {
            return Err(bad());
        }
        let inst = form.to_instance();
        crate::instance::validate_instance(&inst).map_err(|_| bad())?;
        if canonical_form(&inst) != form {
            return Err(bad());
        }
        Ok(form)
    }
}

impl PartialEq for CanonicalForm {
    fn eq(&self, other: &Self) -> bool {
        self.bytes == other.bytes && (Arc::ptr_eq(&self.schema, &other.schema) || self.schema == other.schema)
    }
}

impl Eq for CanonicalForm {}

impl Hash for CanonicalForm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bytes.hash(state);
    }
}

impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bytes.cmp(&other.bytes).then_with(|| self.schema.name().cmp(other.schema.name()))
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({}:{})", self.schema.name(), self.digest())
    }
}

/// Consecutive ranks set aside for interchangeable unranked elements of one
/// node. Members take the free ranks in order, as they are needed.
#[derive(Clone, Copy)]
struct Block {
    node: usize,
    start: usize,
    len: usize,
}

/// A leaf cell grouped by the images of its elements under an earlier arrow.
/// Those images hold consecutive reserved ranks, and group `g` goes with
/// rank `rank + g` whichever element ends up there.
#[derive(Clone, Copy)]
struct Pending {
    arrow: usize,
    target: usize,
    group: usize,
    rank: usize,
    groups: usize,
}

struct Labeler<'a> {
    inst: &'a Instance,
    /// Encoding positions after the size prefix: (arrow, source rank).
    positions: Vec<(usize, usize)>,
    /// Nodes no arrow points into.
    leaf: Vec<bool>,
    rank_of: Vec<Vec<usize>>,
    /// Elements in rank order. Leaf nodes keep all their elements here from
    /// the start, grouped into cells. Elsewhere reserved ranks not yet given
    /// to an element hold `UNSET`.
    elem_at: Vec<Vec<usize>>,
    /// Leaf nodes only: which ranks open a cell, and which cells are pending.
    cell_start: Vec<Vec<bool>>,
    pending: Vec<Vec<Option<Pending>>>,
    /// Unranked elements outside blocks take fresh ranks in increasing key order.
    class_key: Vec<Vec<usize>>,
    blocks: Vec<Block>,
    block_of: Vec<Vec<usize>>,
    partial: Vec<u16>,
    best: Option<Vec<u16>>,
    best_ranks: Vec<Vec<usize>>,
    /// Bumped whenever `best` is replaced.
    generation: u64,
    /// Element chosen at each open branch point.
    choices: Vec<usize>,
    best_choices: Vec<usize>,
    /// Automorphisms found so far, as per-node permutations.
    automorphisms: Vec<Vec<Vec<usize>>>,
    /// Branch level to unwind to after an automorphism was found.
    unwind_to: Option<usize>,
    /// Set while following a greedy path to rank sibling candidates.
    diving: bool,
    dive: Option<Vec<u16>>,
}

impl<'a> Labeler<'a> {
    fn new(inst: &'a Instance) -> Self {
        let schema = inst.schema();
        let positions = schema
            .arrows()
            .iter()
            .enumerate()
            .flat_map(|(ai, a)| (0..inst.size(a.source)).map(move |i| (ai, i)))
            .collect();
        let mut leaf = vec![true; schema.node_count()];
        for a in schema.arrows() {
            leaf[a.target] = false;
        }
        let sizes = inst.sizes();
        let elem_at =
            sizes.iter().zip(&leaf).map(|(&n, &l)| if l { (0..n).collect() } else { Vec::with_capacity(n) }).collect();
        let cell_start = sizes
            .iter()
            .zip(&leaf)
            .map(|(&n, &l)| if l { (0..n).map(|r| r == 0).collect() } else { Vec::new() })
            .collect();
        Labeler {
            inst,
            positions,
            rank_of: sizes.iter().map(|&n| vec![UNSET; n]).collect(),
            elem_at,
            cell_start,
            pending: sizes.iter().zip(&leaf).map(|(&n, &l)| vec![None; if l { n } else { 0 }]).collect(),
            leaf,
            class_key: sizes.iter().map(|&n| vec![0; n]).collect(),
            blocks: Vec::new(),
            block_of: sizes.iter().map(|&n| vec![UNSET; n]).collect(),
            partial: Vec::new(),
            best: None,
            best_ranks: Vec::new(),
            generation: 0,
            choices: Vec::new(),
            best_choices: Vec::new(),
            automorphisms: evident_automorphisms(inst),
            unwind_to: None,
            diving: false,
            dive: None,
        }
    }

    /// Unranked and outside every block.
    fn is_free(&self, d: usize, x: usize) -> bool {
        self.rank_of[d][x] == UNSET && self.block_of[d][x] == UNSET
    }

    fn first_free_rank(&self, b: usize) -> usize {
        let Block { node, start, len } = self.blocks[b];
        (start..start + len).find(|&r| self.elem_at[node][r] == UNSET).expect("a free reserved rank")
    }

    fn block_at(&self, d: usize, r: usize) -> usize {
        self.blocks.iter().position(|b| b.node == d && b.start <= r && r < b.start + b.len).expect("a reserved rank")
    }

    fn members(&self, d: usize, b: usize) -> Vec<usize> {
        (0..self.inst.size(d)).filter(|&x| self.block_of[d][x] == b && self.rank_of[d][x] == UNSET).collect()
    }

    fn place(&mut self, d: usize, x: usize, r: usize) {
        self.elem_at[d][r] = x;
        self.rank_of[d][x] = r;
    }

    fn unplace(&mut self, d: usize, r: usize) {
        let x = std::mem::replace(&mut self.elem_at[d][r], UNSET);
        self.rank_of[d][x] = UNSET;
    }

    /// Gives unranked `y` the least rank open to it.
    fn rank_fresh(&mut self, d: usize, y: usize) {
        match self.block_of[d][y] {
            UNSET => {
                self.rank_of[d][y] = self.elem_at[d].len();
                self.elem_at[d].push(y);
            }
            b => {
                let r = self.first_free_rank(b);
                self.place(d, y, r);
            }
        }
    }

    fn unrank(&mut self, d: usize, y: usize) {
        if self.block_of[d][y] == UNSET {
            let x = self.elem_at[d].pop().expect("rank to release");
            debug_assert_eq!(x, y);
            self.rank_of[d][x] = UNSET;
        } else {
            self.unplace(d, self.rank_of[d][y]);
        }
    }

    /// The rank `y` has or would take next. `UNSET` if it may not take one yet.
    fn prospective(&self, d: usize, y: usize) -> usize {
        match (self.rank_of[d][y], self.block_of[d][y]) {
            (UNSET, UNSET) if self.first_key(d) == Some(self.class_key[d][y]) => self.elem_at[d].len(),
            (UNSET, UNSET) => UNSET,
            (UNSET, b) => self.first_free_rank(b),
            (r, _) => r,
        }
    }

    /// Compares a run of `k` equal values at `pos` against the best encoding.
    /// `None` means the run makes the prefix larger.
    fn compare_run(&self, pos: usize, value: u16, k: usize, tight: bool) -> Option<bool> {
        let Some(best) = self.best.as_ref().filter(|_| tight) else {
            return Some(false);
        };
        for &b in &best[pos..pos + k] {
            match value.cmp(&b) {
                Ordering::Greater => return None,
                Ordering::Less => return Some(false),
                Ordering::Equal => {}
            }
        }
        Some(true)
    }

    /// Explores one child of a branch point. Returns false when the caller
    /// should stop iterating because the search is unwinding past it.
    fn branch(&mut self, level: usize, tight: &mut bool, child: impl FnOnce(&mut Self, bool)) -> bool {
        let generation = self.generation;
        child(self, *tight);
        // A new best extends the current prefix, so siblings are tight again.
        if self.generation != generation {
            *tight = true;
        }
        match self.unwind_to {
            Some(k) if k < level => false,
            Some(_) => {
                self.unwind_to = None;
                true
            }
            None => true,
        }
    }

    fn search(&mut self, pos: usize, mut tight: bool) {
        if pos == self.positions.len() {
            self.finish(tight);
            return;
        }
        if tight && self.bound_exceeds_best(pos) {
            return;
        }
        let (ai, i) = self.positions[pos];
        let arrow = &self.inst.schema().arrows()[ai];
        let (s, t) = (arrow.source, arrow.target);
        if self.leaf[s] {
            self.refine(pos, tight, ai, s, t, i);
            return;
        }
        if let Some(&x) = self.elem_at[s].get(i).filter(|&&x| x != UNSET) {
            self.step(pos, tight, ai, t, x);
            return;
        }
        // Rank i is reserved for a block, or else the next fresh rank.
        let reserved = i < self.elem_at[s].len();
        let open: Vec<usize> = if reserved {
            self.members(s, self.block_at(s, i))
        } else {
            debug_assert_eq!(self.elem_at[s].len(), i);
            let first = self.first_key(s);
            (0..self.inst.size(s)).filter(|&x| self.is_free(s, x) && Some(self.class_key[s][x]) == first).collect()
        };
        // Only candidates reaching the least value here can start a least encoding.
        let values: Vec<usize> = open
            .iter()
            .map(|&x| {
                self.take(s, x, i, reserved);
                let v = self.prospective(t, self.inst.apply(ai, x));
                self.release(s, i, reserved);
                v
            })
            .collect();
        let least = values.iter().copied().min().expect("an unranked element");
        let open: Vec<usize> = open.into_iter().zip(values).filter(|&(_, v)| v == least).map(|(x, _)| x).collect();
        let open = self.order_by_dive(open, |me, x| {
            me.take(s, x, i, reserved);
            me.step(pos, false, ai, t, x);
            me.release(s, i, reserved);
        });
        let level = self.choices.len();
        let mut tried = Vec::new();
        for x in open {
            if !self.diving && self.in_tried_orbit(s, x, &tried) {
                continue;
            }
            tried.push(x);
            self.take(s, x, i, reserved);
            self.choices.push(x);
            let go_on = self.branch(level, &mut tight, |me, tight| me.step(pos, tight, ai, t, x));
            self.choices.pop();
            self.release(s, i, reserved);
            if !go_on || (self.diving && self.dive.is_some()) {
                return;
            }
        }
    }

    /// Candidates ordered by the encoding a greedy descent from each reaches,
    /// so that good encodings are met early and bound the rest. While diving
    /// only the first candidate that reaches a leaf is kept.
    fn order_by_dive(&mut self, open: Vec<usize>, descend: impl Fn(&mut Self, usize)) -> Vec<usize> {
        if self.diving || open.len() < 2 {
            return open;
        }
        let mut keyed: Vec<(Option<Vec<u16>>, usize)> = open
            .into_iter()
            .map(|x| {
                self.diving = true;
                descend(self, x);
                self.diving = false;
                (self.dive.take(), x)
            })
            .collect();
        keyed.sort_by(|a, b| match (&a.0, &b.0) {
            (Some(p), Some(q)) => p.cmp(q),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        });
        keyed.into_iter().map(|(_, x)| x).collect()
    }

    fn take(&mut self, d: usize, x: usize, r: usize, reserved: bool) {
        if reserved {
            self.place(d, x, r);
        } else {
            self.rank_of[d][x] = r;
            self.elem_at[d].push(x);
        }
    }

    fn release(&mut self, d: usize, r: usize, reserved: bool) {
        if reserved {
            self.unplace(d, r);
        } else {
            let x = self.elem_at[d].pop().expect("rank to release");
            self.rank_of[d][x] = UNSET;
        }
    }

    /// Emits the value for position `pos` given source element `x`, then recurses.
    fn step(&mut self, pos: usize, tight: bool, ai: usize, t: usize, x: usize) {
        let y = self.inst.apply(ai, x);
        let fresh = self.rank_of[t][y] == UNSET;
        if fresh {
            if self.block_of[t][y] == UNSET && self.first_key(t) != Some(self.class_key[t][y]) {
                return;
            }
            self.rank_fresh(t, y);
        }
        let value = self.rank_of[t][y] as u16;
        if let Some(still_tight) = self.compare_run(pos, value, 1, tight) {
            self.partial.push(value);
            self.search(pos + 1, still_tight);
            self.partial.pop();
        }
        if fresh {
            self.unrank(t, y);
        }
    }

    /// Leaf node `s`, arrow `ai`, at the cell opening at rank `i`. The cell's
    /// elements agree on every value emitted so far, so the ones with the
    /// least image come first as a sub-cell. When several unranked images
    /// tie for the least ranks, those ranks are reserved for them as a block
    /// and the choice is put off.
    fn refine(&mut self, pos: usize, tight: bool, ai: usize, s: usize, t: usize, i: usize) {
        let end = (i + 1..self.elem_at[s].len()).find(|&r| self.cell_start[s][r]).unwrap_or(self.elem_at[s].len());
        if let Some(p) = self.pending[s][i] {
            self.resolve(pos, tight, ai, s, t, i, end, p);
            return;
        }
        let images: Vec<usize> = self.elem_at[s][i..end].iter().map(|&x| self.inst.apply(ai, x)).collect();
        let ranked =
            images.iter().copied().filter(|&y| self.rank_of[t][y] != UNSET).min_by_key(|&y| self.rank_of[t][y]);
        let reserved = images
            .iter()
            .filter(|&&y| self.rank_of[t][y] == UNSET && self.block_of[t][y] != UNSET)
            .map(|&y| (self.first_free_rank(self.block_of[t][y]), self.block_of[t][y]))
            .min();
        match (ranked, reserved) {
            (Some(y), None) => self.split(pos, tight, ai, s, t, i, end, y),
            (Some(y), Some((slot, _))) if self.rank_of[t][y] < slot => self.split(pos, tight, ai, s, t, i, end, y),
            (_, Some((slot, b))) => {
                let (targets, top) =
                    self.most_frequent(&images, |me, y| me.rank_of[t][y] == UNSET && me.block_of[t][y] == b);
                if let [y] = targets[..] {
                    self.place(t, y, slot);
                    self.split(pos, tight, ai, s, t, i, end, y);
                    self.unplace(t, slot);
                } else {
                    self.pend(pos, tight, ai, s, t, i, end, &targets, top, Some(b));
                }
            }
            (None, None) => {
                // Fresh ranks go to the first class, and within it to the
                // images with the most preimages here, since those give the
                // longest runs.
                let Some(first) = self.first_key(t) else { return };
                let (targets, top) =
                    self.most_frequent(&images, |me, y| me.is_free(t, y) && me.class_key[t][y] == first);
                if targets.is_empty() {
                    return;
                }
                let mut mult = vec![0usize; self.inst.size(t)];
                for &y in &images {
                    mult[y] += 1;
                }
                let saved = self.class_key[t].clone();
                let keys: Vec<(usize, usize)> = saved
                    .iter()
                    .enumerate()
                    .map(|(y, &k)| (k, if k == first && self.is_free(t, y) { top - mult[y] } else { 0 }))
                    .collect();
                let mut distinct = keys.clone();
                distinct.sort_unstable();
                distinct.dedup();
                self.class_key[t] = keys.iter().map(|k| distinct.binary_search(k).expect("own key")).collect();
                if let [y] = targets[..] {
                    self.rank_fresh(t, y);
                    self.split(pos, tight, ai, s, t, i, end, y);
                    self.unrank(t, y);
                } else {
                    self.pend(pos, tight, ai, s, t, i, end, &targets, top, None);
                }
                self.class_key[t] = saved;
            }
        }
    }

    /// Images passing `keep` with the most preimages in the cell, and that count.
    fn most_frequent(&self, images: &[usize], keep: impl Fn(&Self, usize) -> bool) -> (Vec<usize>, usize) {
        let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
        for &y in images {
            if keep(self, y) {
                *mult.entry(y).or_insert(0) += 1;
            }
        }
        let top = mult.values().copied().max().unwrap_or(0);
        (mult.into_iter().filter(|&(_, m)| m == top).map(|(y, _)| y).collect(), top)
    }

    /// Moves the elements of cell `i..end` mapping to `y` to its front,
    /// emits their common value and recurses.
    #[allow(clippy::too_many_arguments)]
    fn split(&mut self, pos: usize, tight: bool, ai: usize, s: usize, t: usize, i: usize, end: usize, y: usize) {
        let saved: Vec<usize> = self.elem_at[s][i..end].to_vec();
        let (hit, rest): (Vec<usize>, Vec<usize>) = saved.iter().partition(|&&x| self.inst.apply(ai, x) == y);
        let k = hit.len();
        for (slot, x) in self.elem_at[s][i..end].iter_mut().zip(hit.into_iter().chain(rest)) {
            *slot = x;
        }
        let opened = i + k < end;
        if opened {
            self.cell_start[s][i + k] = true;
        }
        let value = self.rank_of[t][y] as u16;
        if let Some(still_tight) = self.compare_run(pos, value, k, tight) {
            self.partial.extend(std::iter::repeat_n(value, k));
            self.search(pos + k, still_tight);
            self.partial.truncate(self.partial.len() - k);
        }
        if opened {
            self.cell_start[s][i + k] = false;
        }
        self.elem_at[s][i..end].copy_from_slice(&saved);
    }

    /// Reserves the next ranks of `t` for `targets`, each hit `k` times by the
    /// cell, carving them out of block `from` or appending them. The cell's
    /// elements mapping into `targets` become a pending cell whose values are
    /// already known.
    #[allow(clippy::too_many_arguments)]
    fn pend(
        &mut self,
        pos: usize,
        tight: bool,
        ai: usize,
        s: usize,
        t: usize,
        i: usize,
        end: usize,
        targets: &[usize],
        k: usize,
        from: Option<usize>,
    ) {
        let count = targets.len();
        let (start, carved) = match from {
            None => {
                let start = self.elem_at[t].len();
                self.elem_at[t].extend(std::iter::repeat_n(UNSET, count));
                (start, None)
            }
            Some(b) => {
                let start = self.first_free_rank(b);
                let old = self.blocks[b];
                debug_assert!((start..old.start + old.len).all(|r| self.elem_at[t][r] == UNSET));
                self.blocks[b] = Block { node: t, start: start + count, len: old.start + old.len - start - count };
                (start, Some((b, old)))
            }
        };
        let nb = self.blocks.len();
        self.blocks.push(Block { node: t, start, len: count });
        let old_blocks: Vec<usize> = targets.iter().map(|&y| std::mem::replace(&mut self.block_of[t][y], nb)).collect();

        let saved: Vec<usize> = self.elem_at[s][i..end].to_vec();
        let (hit, rest): (Vec<usize>, Vec<usize>) =
            saved.iter().partition(|&&x| self.block_of[t][self.inst.apply(ai, x)] == nb);
        let h = hit.len();
        debug_assert_eq!(h, k * count);
        for (slot, x) in self.elem_at[s][i..end].iter_mut().zip(hit.into_iter().chain(rest)) {
            *slot = x;
        }
        let opened = i + h < end;
        if opened {
            self.cell_start[s][i + h] = true;
        }
        self.pending[s][i] = Some(Pending { arrow: ai, target: t, group: k, rank: start, groups: count });

        let mut still = Some(tight);
        for g in 0..count {
            if let Some(tt) = still {
                still = self.compare_run(pos + g * k, (start + g) as u16, k, tt);
            }
        }
        if let Some(still_tight) = still {
            for g in 0..count {
                self.partial.extend(std::iter::repeat_n((start + g) as u16, k));
            }
            self.search(pos + h, still_tight);
            self.partial.truncate(self.partial.len() - h);
        }

        self.pending[s][i] = None;
        if opened {
            self.cell_start[s][i + h] = false;
        }
        self.elem_at[s][i..end].copy_from_slice(&saved);
        for (&y, b) in targets.iter().zip(old_blocks) {
            self.block_of[t][y] = b;
        }
        self.blocks.pop();
        match carved {
            None => self.elem_at[t].truncate(start),
            Some((b, old)) => self.blocks[b] = old,
        }
    }

    /// Splits off the first group of a pending cell, choosing the element of
    /// its reserved rank if that is still open.
    #[allow(clippy::too_many_arguments)]
    fn resolve(
        &mut self,
        pos: usize,
        mut tight: bool,
        ai: usize,
        s: usize,
        t: usize,
        i: usize,
        end: usize,
        p: Pending,
    ) {
        let z = self.elem_at[p.target][p.rank];
        if z != UNSET {
            self.peel(pos, tight, ai, s, t, i, end, p, z);
            return;
        }
        let b = self.block_at(p.target, p.rank);
        debug_assert_eq!(self.first_free_rank(b), p.rank);
        // As in `search`, only the members giving the group its least value.
        let open = self.members(p.target, b);
        let values: Vec<usize> = open
            .iter()
            .map(|&z| {
                self.place(p.target, z, p.rank);
                let v = self.elem_at[s][i..end]
                    .iter()
                    .filter(|&&x| self.inst.apply(p.arrow, x) == z)
                    .map(|&x| self.prospective(t, self.inst.apply(ai, x)))
                    .min()
                    .unwrap_or(UNSET);
                self.unplace(p.target, p.rank);
                v
            })
            .collect();
        let least = values.iter().copied().min().unwrap_or(UNSET);
        let open: Vec<usize> = open.into_iter().zip(values).filter(|&(_, v)| v == least).map(|(z, _)| z).collect();
        let open = self.order_by_dive(open, |me, z| {
            me.place(p.target, z, p.rank);
            me.peel(pos, false, ai, s, t, i, end, p, z);
            me.unplace(p.target, p.rank);
        });
        let level = self.choices.len();
        let mut tried = Vec::new();
        for z in open {
            if !self.diving && self.in_tried_orbit(p.target, z, &tried) {
                continue;
            }
            tried.push(z);
            self.place(p.target, z, p.rank);
            self.choices.push(z);
            let go_on = self.branch(level, &mut tight, |me, tight| me.peel(pos, tight, ai, s, t, i, end, p, z));
            self.choices.pop();
            self.unplace(p.target, p.rank);
            if !go_on || (self.diving && self.dive.is_some()) {
                return;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn peel(
        &mut self,
        pos: usize,
        tight: bool,
        ai: usize,
        s: usize,
        t: usize,
        i: usize,
        end: usize,
        p: Pending,
        z: usize,
    ) {
        let saved: Vec<usize> = self.elem_at[s][i..end].to_vec();
        let (hit, rest): (Vec<usize>, Vec<usize>) = saved.iter().partition(|&&x| self.inst.apply(p.arrow, x) == z);
        debug_assert_eq!(hit.len(), p.group);
        for (slot, x) in self.elem_at[s][i..end].iter_mut().zip(hit.into_iter().chain(rest)) {
            *slot = x;
        }
        let k = p.group;
        let more = p.groups > 1;
        self.pending[s][i] = None;
        if more {
            self.cell_start[s][i + k] = true;
            self.pending[s][i + k] = Some(Pending { rank: p.rank + 1, groups: p.groups - 1, ..p });
        }
        self.refine(pos, tight, ai, s, t, i);
        if more {
            self.pending[s][i + k] = None;
            self.cell_start[s][i + k] = false;
        }
        self.pending[s][i] = Some(p);
        self.elem_at[s][i..end].copy_from_slice(&saved);
    }

    fn first_key(&self, d: usize) -> Option<usize> {
        (0..self.inst.size(d)).filter(|&x| self.is_free(d, x)).map(|x| self.class_key[d][x]).min()
    }

    /// Whether every completion of the current state is larger than the best
    /// encoding. Builds a sequence that no completion can undercut in
    /// lexicographic order and compares it with the best.
    ///
    /// Unranked elements of one class or block fill a fixed range of ranks.
    /// Until the first position whose source is still unknown, a completion
    /// that has matched the sequence so far has given the unranked images
    /// seen so far exactly the ranks charged to them, so new images are
    /// charged the next free rank of their range in order of appearance. A
    /// leaf cell is charged its sorted values, with distinct new images
    /// charged most frequent first; new images of equal frequency share the
    /// least of their ranks as a floor. After an unknown source only floors
    /// are used.
    fn bound_exceeds_best(&self, pos: usize) -> bool {
        let Some(best) = self.best.as_ref() else {
            return false;
        };
        let mut floors = Floors::new(self);
        let mut p = pos;
        let mut exact = true;
        let verdict = |v: usize, p: &mut usize| -> Option<bool> {
            let b = best[*p] as usize;
            *p += 1;
            match v.cmp(&b) {
                Ordering::Less => Some(false),
                Ordering::Greater => Some(true),
                Ordering::Equal => None,
            }
        };
        let (first_arrow, first_rank) = self.positions[pos];
        for (ai, arrow) in self.inst.schema().arrows().iter().enumerate().skip(first_arrow) {
            let (s, t) = (arrow.source, arrow.target);
            let from = if ai == first_arrow { first_rank } else { 0 };
            let n = self.inst.size(s);
            if self.leaf[s] {
                let mut c0 = from;
                while c0 < n {
                    let c1 = (c0 + 1..n).find(|&r| self.cell_start[s][r]).unwrap_or(n);
                    let images: Vec<usize> = self.elem_at[s][c0..c1].iter().map(|&x| self.inst.apply(ai, x)).collect();
                    for v in floors.cell(t, &images, exact) {
                        if let Some(out) = verdict(v, &mut p) {
                            return out;
                        }
                    }
                    c0 = c1;
                }
            } else {
                for i in from..n {
                    let v = match self.elem_at[s].get(i) {
                        Some(&x) if x != UNSET => floors.single(t, self.inst.apply(ai, x), exact),
                        _ => {
                            exact = false;
                            (0..n)
                                .filter(|&x| self.rank_of[s][x] == UNSET)
                                .map(|x| floors.single(t, self.inst.apply(ai, x), false))
                                .min()
                                .unwrap_or(0)
                        }
                    };
                    if let Some(out) = verdict(v, &mut p) {
                        return out;
                    }
                }
            }
        }
        false
    }

    /// Cell index of every element of a leaf node.
    fn cells(&self, d: usize) -> Vec<usize> {
        let mut id = vec![0; self.elem_at[d].len()];
        let mut cell = 0;
        for (r, &x) in self.elem_at[d].iter().enumerate() {
            if r > 0 && self.cell_start[d][r] {
                cell += 1;
            }
            id[x] = cell;
        }
        id
    }

    /// Whether some known automorphism preserving the current state carries
    /// an already tried candidate to `x`. Preserving the state means fixing
    /// every ranked element, mapping every leaf cell and block onto itself
    /// and keeping the class of every other element.
    fn in_tried_orbit(&self, d: usize, x: usize, tried: &[usize]) -> bool {
        if tried.is_empty() || self.automorphisms.is_empty() {
            return false;
        }
        let cells: Vec<Option<Vec<usize>>> =
            (0..self.leaf.len()).map(|n| self.leaf[n].then(|| self.cells(n))).collect();
        let preserves = |g: &Vec<Vec<usize>>| {
            (0..self.leaf.len()).all(|n| match &cells[n] {
                Some(id) => (0..id.len()).all(|e| id[g[n][e]] == id[e]),
                None => (0..g[n].len()).all(|e| {
                    let f = g[n][e];
                    if self.rank_of[n][e] != UNSET {
                        f == e
                    } else {
                        self.block_of[n][f] == self.block_of[n][e]
                            && (self.block_of[n][e] != UNSET || self.class_key[n][f] == self.class_key[n][e])
                    }
                }),
            })
        };
        let fixing: Vec<&Vec<Vec<usize>>> = self.automorphisms.iter().filter(|g| preserves(g)).collect();
        if fixing.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.inst.size(d)];
        let mut stack = vec![x];
        seen[x] = true;
        while let Some(e) = stack.pop() {
            if tried.contains(&e) {
                return true;
            }
            for g in &fixing {
                let f = g[d][e];
                if !seen[f] {
                    seen[f] = true;
                    stack.push(f);
                }
            }
        }
        false
    }

    /// Completes the current state to a ranking. Open reserved ranks and
    /// left-over elements are filled in index order, and pending cells are
    /// ordered by the ranks of their groups.
    fn full_ranks(&self) -> Vec<Vec<usize>> {
        let mut ranks = self.rank_of.clone();
        for (d, node) in ranks.iter_mut().enumerate() {
            if self.leaf[d] {
                continue;
            }
            for (b, block) in self.blocks.iter().enumerate().filter(|(_, bl)| bl.node == d) {
                let open = (block.start..block.start + block.len).filter(|&r| self.elem_at[d][r] == UNSET);
                for (r, x) in open.zip(self.members(d, b)) {
                    node[x] = r;
                }
            }
            let mut next = self.elem_at[d].len();
            for r in node.iter_mut() {
                if *r == UNSET {
                    *r = next;
                    next += 1;
                }
            }
        }
        for d in (0..self.leaf.len()).filter(|&d| self.leaf[d]) {
            let n = self.elem_at[d].len();
            let mut order = self.elem_at[d].clone();
            let mut c0 = 0;
            while c0 < n {
                let c1 = (c0 + 1..n).find(|&r| self.cell_start[d][r]).unwrap_or(n);
                if let Some(p) = self.pending[d][c0] {
                    order[c0..c1].sort_by_key(|&x| ranks[p.target][self.inst.apply(p.arrow, x)]);
                }
                c0 = c1;
            }
            for (r, &x) in order.iter().enumerate() {
                ranks[d][x] = r;
            }
        }
        ranks
    }

    fn finish(&mut self, tight: bool) {
        if self.diving {
            if self.dive.is_none() {
                self.dive = Some(self.partial.clone());
            }
            return;
        }
        let ranks = self.full_ranks();
        if self.best.is_some() && tight {
            // Same encoding: best element of rank r maps to ours of rank r.
            let at: Vec<Vec<usize>> = ranks
                .iter()
                .map(|node| {
                    let mut inv = vec![0; node.len()];
                    for (e, &r) in node.iter().enumerate() {
                        inv[r] = e;
                    }
                    inv
                })
                .collect();
            let g: Vec<Vec<usize>> =
                self.best_ranks.iter().enumerate().map(|(d, node)| node.iter().map(|&r| at[d][r]).collect()).collect();
            if g.iter().any(|node| node.iter().enumerate().any(|(e, &f)| e != f)) {
                self.automorphisms.push(g);
            }
            self.unwind_to = self.choices.iter().zip(&self.best_choices).position(|(a, b)| a != b);
            return;
        }
        self.best = Some(self.partial.clone());
        self.best_ranks = ranks;
        self.best_choices = self.choices.clone();
        self.generation += 1;
    }
}

/// Ranks charged to unranked images while bounding.
struct Floors<'l, 'a> {
    labeler: &'l Labeler<'a>,
    /// For each unranked element, the first free rank of its range and a key
    /// naming the range: a class, or a block.
    range: Vec<Vec<(usize, (bool, usize))>>,
    /// Ranks of a range already charged.
    used: BTreeMap<(usize, (bool, usize)), usize>,
    /// Ranks charged to unranked images. Images that tied in a leaf cell
    /// share the least rank of their tie, which is then only a floor.
    charged: Vec<BTreeMap<usize, usize>>,
}

impl<'l, 'a> Floors<'l, 'a> {
    fn new(labeler: &'l Labeler<'a>) -> Self {
        let range = (0..labeler.rank_of.len())
            .map(|d| {
                let n = labeler.rank_of[d].len();
                let mut per_key: BTreeMap<usize, usize> = BTreeMap::new();
                for x in (0..n).filter(|&x| labeler.is_free(d, x)) {
                    *per_key.entry(labeler.class_key[d][x]).or_insert(0) += 1;
                }
                let mut start = BTreeMap::new();
                let mut next = labeler.elem_at[d].len();
                for (k, c) in per_key {
                    start.insert(k, next);
                    next += c;
                }
                (0..n)
                    .map(|x| match (labeler.rank_of[d][x], labeler.block_of[d][x]) {
                        (UNSET, UNSET) => (start[&labeler.class_key[d][x]], (false, labeler.class_key[d][x])),
                        (UNSET, b) => (labeler.first_free_rank(b), (true, b)),
                        (r, _) => (r, (false, UNSET)),
                    })
                    .collect()
            })
            .collect();
        Floors { labeler, range, used: BTreeMap::new(), charged: vec![BTreeMap::new(); labeler.rank_of.len()] }
    }

    fn next_free(&self, t: usize, y: usize) -> usize {
        let (base, key) = self.range[t][y];
        base + self.used.get(&(t, key)).copied().unwrap_or(0)
    }

    fn known(&self, t: usize, y: usize) -> Option<usize> {
        match self.labeler.rank_of[t][y] {
            UNSET => self.charged[t].get(&y).copied(),
            r => Some(r),
        }
    }

    fn single(&mut self, t: usize, y: usize, exact: bool) -> usize {
        if let Some(r) = self.known(t, y) {
            return r;
        }
        let r = self.next_free(t, y);
        if exact {
            self.charged[t].insert(y, r);
            *self.used.entry((t, self.range[t][y].1)).or_insert(0) += 1;
        }
        r
    }

    fn cell(&mut self, t: usize, images: &[usize], exact: bool) -> Vec<usize> {
        let mut out = Vec::with_capacity(images.len());
        let mut fresh: BTreeMap<usize, usize> = BTreeMap::new();
        for &y in images {
            match self.known(t, y) {
                Some(r) => out.push(r),
                None => *fresh.entry(y).or_insert(0) += 1,
            }
        }
        let mut by_range: BTreeMap<(bool, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (y, m) in fresh {
            by_range.entry(self.range[t][y].1).or_default().push((m, y));
        }
        for (key, mut group) in by_range {
            let floor = self.next_free(t, group[0].1);
            group.sort_unstable_by_key(|g| Reverse(g.0));
            for (j, &(m, _)) in group.iter().enumerate() {
                out.extend(std::iter::repeat_n(floor + j, m));
            }
            if exact {
                let mut j = 0;
                while j < group.len() {
                    let run = group[j..].iter().take_while(|g| g.0 == group[j].0).count();
                    for &(_, y) in &group[j..j + run] {
                        self.charged[t].insert(y, floor + j);
                    }
                    j += run;
                }
                *self.used.entry((t, key)).or_insert(0) += group.len();
            }
        }
        out.sort_unstable();
        out
    }
}

fn identity(inst: &Instance) -> Vec<Vec<usize>> {
    inst.sizes().into_iter().map(|n| (0..n).collect()).collect()
}

/// Automorphisms visible without searching: those of each connected
/// component, exchanges of isomorphic components, and exchanges of
/// isomorphic trees hanging from elements with equal images.
fn evident_automorphisms(inst: &Instance) -> Vec<Vec<Vec<usize>>> {
    let mut found = component_symmetries(inst);
    found.extend(tree_exchanges(inst));
    found
}

fn component_symmetries(inst: &Instance) -> Vec<Vec<Vec<usize>>> {
    let selections = component_selections(inst);
    if selections.len() < 2 {
        return Vec::new();
    }
    let shared = Arc::new(inst.clone());
    let mut found = Vec::new();
    // Each component as its elements listed in canonical rank order.
    let mut by_form: BTreeMap<CanonicalForm, Vec<Vec<Vec<usize>>>> = BTreeMap::new();
    for sel in &selections {
        let sub = subinstance(&shared, sel).expect("components are closed");
        let (form, ranks, automorphisms) = label(&sub.object);
        let outer = |d: usize, e: usize| sub.inclusion.apply(d, e);
        for g in automorphisms {
            let mut lifted = identity(inst);
            for (d, node) in g.iter().enumerate() {
                for (e, &f) in node.iter().enumerate() {
                    lifted[d][outer(d, e)] = outer(d, f);
                }
            }
            found.push(lifted);
        }
        let at = ranks
            .iter()
            .enumerate()
            .map(|(d, node)| {
                let mut at = vec![0; node.len()];
                for (e, &r) in node.iter().enumerate() {
                    at[r] = outer(d, e);
                }
                at
            })
            .collect();
        by_form.entry(form).or_default().push(at);
    }
    for group in by_form.values() {
        for pair in group.windows(2) {
            let mut g = identity(inst);
            for (d, node) in g.iter_mut().enumerate() {
                for (&x, &y) in pair[0][d].iter().zip(&pair[1][d]) {
                    node[x] = y;
                    node[y] = x;
                }
            }
            found.push(g);
        }
    }
    found
}

#[derive(Clone, Copy)]
enum Shape {
    Todo,
    Busy,
    Done(Option<usize>),
}

/// Everything reaching `x` along arrows, when that is a tree: every element
/// but `x` sits in a node with a single outgoing arrow and there is no cycle.
/// Such trees are attached to the rest only through `x`.
struct Trees<'a> {
    inst: &'a Instance,
    preimages: Vec<Vec<Vec<(usize, usize)>>>,
    single: Vec<bool>,
    codes: BTreeMap<(usize, Vec<(usize, usize)>), usize>,
    shape: Vec<Vec<Shape>>,
}

impl<'a> Trees<'a> {
    fn new(inst: &'a Instance) -> Self {
        let schema = inst.schema();
        let mut preimages: Vec<Vec<Vec<(usize, usize)>>> = inst.sizes().iter().map(|&n| vec![Vec::new(); n]).collect();
        for (ai, a) in schema.arrows().iter().enumerate() {
            for y in 0..inst.size(a.source) {
                preimages[a.target][inst.apply(ai, y)].push((ai, y));
            }
        }
        Trees {
            inst,
            preimages,
            single: (0..schema.node_count()).map(|d| schema.out_arrows(d).len() == 1).collect(),
            codes: BTreeMap::new(),
            shape: inst.sizes().iter().map(|&n| vec![Shape::Todo; n]).collect(),
        }
    }

    /// Isomorphism class of the tree hanging from `x`, if it is one.
    fn code(&mut self, d: usize, x: usize) -> Option<usize> {
        match self.shape[d][x] {
            Shape::Done(c) => return c,
            Shape::Busy => return None,
            Shape::Todo => {}
        }
        self.shape[d][x] = Shape::Busy;
        let code = self.children(d, x).map(|children| {
            let next = self.codes.len();
            *self.codes.entry((d, children)).or_insert(next)
        });
        self.shape[d][x] = Shape::Done(code);
        code
    }

    fn children(&mut self, d: usize, x: usize) -> Option<Vec<(usize, usize)>> {
        let mut children = Vec::with_capacity(self.preimages[d][x].len());
        for i in 0..self.preimages[d][x].len() {
            let (ai, y) = self.preimages[d][x][i];
            let s = self.inst.schema().arrows()[ai].source;
            if !self.single[s] {
                return None;
            }
            children.push((ai, self.code(s, y)?));
        }
        children.sort_unstable();
        Some(children)
    }

    /// Extends `g` to swap the equally shaped trees hanging from `x` and `y`.
    fn swap(&self, d: usize, x: usize, y: usize, g: &mut [Vec<usize>]) {
        g[d][x] = y;
        g[d][y] = x;
        let sorted = |e: usize| {
            let mut v: Vec<(usize, usize, usize)> = self.preimages[d][e]
                .iter()
                .map(|&(ai, c)| {
                    let s = self.inst.schema().arrows()[ai].source;
                    let Shape::Done(Some(code)) = self.shape[s][c] else {
                        unreachable!("children of a tree are trees")
                    };
                    (ai, code, c)
                })
                .collect();
            v.sort_unstable();
            v
        };
        for (&(ai, _, p), &(_, _, q)) in sorted(x).iter().zip(&sorted(y)) {
            self.swap(self.inst.schema().arrows()[ai].source, p, q, g);
        }
    }
}

fn tree_exchanges(inst: &Instance) -> Vec<Vec<Vec<usize>>> {
    let schema = inst.schema();
    let mut trees = Trees::new(inst);
    let mut twins: BTreeMap<(usize, Vec<usize>, usize), Vec<usize>> = BTreeMap::new();
    for (d, x) in inst.elements() {
        if let Some(code) = trees.code(d, x) {
            let images = schema.out_arrows(d).iter().map(|&ai| inst.apply(ai, x)).collect();
            twins.entry((d, images, code)).or_default().push(x);
        }
    }
    let mut found = Vec::new();
    for ((d, _, _), group) in &twins {
        for pair in group.windows(2) {
            let mut g = identity(inst);
            trees.swap(*d, pair[0], pair[1], &mut g);
            found.push(g);
        }
    }
    found
}

/// Canonical form, the ranking realizing it, and the automorphisms met on the way.
fn label(inst: &Instance) -> (CanonicalForm, Vec<Vec<usize>>, Vec<Vec<Vec<usize>>>) {
    let mut labeler = Labeler::new(inst);
    labeler.search(0, true);
    let tables = labeler.best.take().unwrap_or_default();
    let mut bytes = Vec::with_capacity(2 * (inst.schema().node_count() + tables.len()));
    for n in inst.sizes() {
        let n = u16::try_from(n).expect("carrier sizes fit in u16");
        bytes.extend_from_slice(&n.to_be_bytes());
    }
    for v in tables {
        bytes.extend_from_slice(&v.to_be_bytes());
    }
    let ranks = if labeler.best_ranks.is_empty() { identity(inst) } else { labeler.best_ranks };
    (CanonicalForm { schema: inst.schema().clone(), bytes }, ranks, labeler.automorphisms)
}

/// Canonical form together with the ranking (element index to canonical rank)
/// realizing it.
pub fn canonical_labeling(inst: &Instance) -> (CanonicalForm, Vec<Vec<usize>>) {
    let (form, ranks, _) = label(inst);
    (form, ranks)
}

pub fn canonical_form(inst: &Instance) -> CanonicalForm {
    canonical_labeling(inst).0
}

/// The canonical representative and the isomorphism onto it.
pub fn canonical_relabeling(inst: &Arc<Instance>) -> (Arc<Instance>, Morphism) {
    let (form, ranks) = canonical_labeling(inst);
    let canon = Arc::new(form.to_instance());
    let iso = Morphism::new_unchecked(inst.clone(), canon.clone(), ranks);
    (canon, iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{initial, relabel};
    use crate::instance::validate_instance;
    use crate::morphism::validate_morphism;
    use crate::schema::presets;

    fn g() -> Arc<Schema> {
        Arc::new(presets::digraph())
    }

    fn graph(s: &Arc<Schema>, v: &[&str], edges: &[(&str, &str, &str)]) -> Arc<Instance> {
        let e: Vec<&str> = edges.iter().map(|t| t.0).collect();
        let src: Vec<(&str, &str)> = edges.iter().map(|t| (t.0, t.1)).collect();
        let tgt: Vec<(&str, &str)> = edges.iter().map(|t| (t.0, t.2)).collect();
        Arc::new(Instance::from_names(s.clone(), &[("V", v), ("E", &e)], &[("s", &src), ("t", &tgt)]).unwrap())
    }

    fn is_automorphism(inst: &Instance, g: &[Vec<usize>]) -> bool {
        inst.schema().arrows().iter().enumerate().all(|(ai, a)| {
            (0..inst.size(a.source)).all(|x| g[a.target][inst.apply(ai, x)] == inst.apply(ai, g[a.source][x]))
        }) && g.iter().all(|node| {
            let mut seen = vec![false; node.len()];
            node.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    #[test]
    fn evident_exchanges_are_automorphisms() {
        use crate::construct::{coproduct, product};
        use crate::universe::{enumerate_instances, Bounds};
        for (schema, n) in [(Arc::new(presets::endo()), 3), (g(), 2), (Arc::new(presets::s3()), 6)] {
            let all: Vec<Arc<Instance>> =
                enumerate_instances(&schema, &Bounds::uniform(&schema, n)).into_iter().map(|m| m.instance).collect();
            for (i, a) in all.iter().enumerate() {
                let b = &all[(i * 7 + 3) % all.len()];
                let p = product(a, b).unwrap().object;
                let c = coproduct(&p, a).unwrap().object;
                for inst in [a, &p, &c] {
                    for g in evident_automorphisms(inst) {
                        assert!(is_automorphism(inst, &g), "{inst:?} {g:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn loop_and_edge_differ() {
        let s = g();
        let lp = graph(&s, &["u", "v"], &[("e", "u", "u")]);
        let edge = graph(&s, &["u", "v"], &[("e", "u", "v")]);
        assert_ne!(canonical_form(&lp), canonical_form(&edge));
    }

    #[test]
    fn initial_encodes_sizes_only() {
        let s = g();
        let f = canonical_form(&initial(&s));
        assert_eq!(f.bytes(), &[0, 0, 0, 0]);
    }

    #[test]
    fn invariant_under_relabeling() {
        let s = g();
        let x = graph(&s, &["0", "1", "2", "3"], &[("a", "0", "1"), ("b", "1", "2"), ("c", "2", "0"), ("d", "3", "3")]);
        let base = canonical_form(&x);
        for seed in 0..20 {
            let (r, _) = relabel(&x, seed);
            assert_eq!(canonical_form(&r), base);
        }
    }

    #[test]
    fn relabeling_is_an_iso_onto_the_decoded_form() {
        let s = g();
        let x = graph(&s, &["a", "b", "c"], &[("p", "a", "b"), ("q", "a", "c"), ("r", "c", "c")]);
        let (canon, iso) = canonical_relabeling(&x);
        assert_eq!(validate_instance(&canon), Ok(()));
        assert_eq!(validate_morphism(&iso), Ok(()));
        assert!(iso.is_iso());
        assert_eq!(canonical_form(&canon), canonical_form(&x));
        let form = canonical_form(&x);
        let again = CanonicalForm::from_bytes(s.clone(), form.bytes().to_vec()).unwrap();
        assert_eq!(again, form);
    }

    #[test]
    fn non_canonical_bytes_are_rejected() {
        let s = g();
        // One edge from v1 to v0: the canonical form puts the source first.
        let bytes = vec![0, 2, 0, 1, 0, 1, 0, 0];
        assert!(CanonicalForm::from_bytes(s, bytes).is_err());
    }
}
