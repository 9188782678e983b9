//! Streaming the solution space.
//!
//! A solution is a multiset of DSPs plus an order. Multisets are drawn from
//! the pools of compatible DSPs of the objectives, with at most `sigma` DSPs
//! per objective; orders are the precedence-respecting permutations of the
//! multiset, produced in lexicographic order by prefix pruning.
//!
//! [`SolutionIter`] walks the space without materializing it: it starts from a
//! seed solution, yields every valid order of the current multiset, then
//! fuzzes the multiset with one seeded mutation, falling back to a linear scan
//! of the multisets when fuzzing runs dry. Visited multisets are remembered,
//! so no solution is produced twice.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kb::{KnowledgeBase, Precedence};
use crate::model::ApplicationModel;
use crate::overhead::within_thresholds;
use crate::prep::{compatible_dsps, CodeCorrelationSet};
use crate::solution::{DeployedProtection, Solution};

/// Upper bound on the estimated size of an exhaustive enumeration.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceConfig {
    /// Maximum number of DSPs per protection objective.
    pub sigma: u32,
    /// Also reject orders that place a pair in a discouraged order.
    pub skip_discouraged: bool,
    /// Mutations applied per fuzzing step.
    pub mutations_per_step: u32,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        SpaceConfig {
            sigma: 3,
            skip_discouraged: false,
            mutations_per_step: 1,
        }
    }
}

/// True when, on every artifact, no DSP follows one whose protection it may
/// not follow and every required predecessor appears earlier.
pub fn is_valid_sequence(s: &Solution, kb: &KnowledgeBase) -> bool {
    sequence_check(s, kb, false)
}

fn sequence_check(s: &Solution, kb: &KnowledgeBase, skip_discouraged: bool) -> bool {
    let mut items = Vec::with_capacity(s.len());
    for d in s.dsps() {
        let Some(cp) = kb.cp_position(d.cp.as_str()) else {
            return false;
        };
        items.push((d.artifact.as_str(), kb.cp_asp_position(cp)));
    }
    for (i, &(art, asp)) in items.iter().enumerate() {
        let earlier = || {
            items[..i]
                .iter()
                .filter(|(a, _)| *a == art)
                .map(|&(_, p)| p)
        };
        if !placement_ok(kb, asp, earlier(), skip_discouraged) {
            return false;
        }
    }
    true
}

/// Can a DSP of protection `asp` follow the protections `earlier` (already on
/// the same artifact)?
fn placement_ok(
    kb: &KnowledgeBase,
    asp: usize,
    earlier: impl Iterator<Item = usize> + Clone,
    skip_discouraged: bool,
) -> bool {
    for prev in earlier.clone() {
        match kb.precedence_at(prev, asp) {
            Precedence::Forbidden => return false,
            Precedence::Discouraged if skip_discouraged => return false,
            _ => {}
        }
    }
    kb.required_before(asp)
        .iter()
        .all(|&q| earlier.clone().any(|p| p == q))
}

/// Lexicographic stream of the valid orders of a multiset.
///
/// Items are identified by their rank; `artifact[k]`/`asp[k]` describe item
/// kind `k`. A prefix that breaks a precedence rule is never extended.
struct Orderings<'k> {
    kb: &'k KnowledgeBase,
    artifact: &'k [usize],
    asp: &'k [usize],
    remaining: Vec<u32>,
    total: usize,
    stack: Vec<usize>,
    /// Next kind to try at each depth.
    cursor: Vec<usize>,
    skip_discouraged: bool,
    done: bool,
}

impl<'k> Orderings<'k> {
    fn new(
        kb: &'k KnowledgeBase,
        artifact: &'k [usize],
        asp: &'k [usize],
        counts: Vec<u32>,
        skip_discouraged: bool,
    ) -> Self {
        let total = counts.iter().map(|&c| c as usize).sum();
        Orderings {
            kb,
            artifact,
            asp,
            remaining: counts,
            total,
            stack: Vec::with_capacity(total),
            cursor: vec![0; total + 1],
            skip_discouraged,
            done: false,
        }
    }

    fn fits(&self, k: usize) -> bool {
        let art = self.artifact[k];
        let earlier = self
            .stack
            .iter()
            .filter(move |&&j| self.artifact[j] == art)
            .map(|&j| self.asp[j]);
        placement_ok(self.kb, self.asp[k], earlier, self.skip_discouraged)
    }
}

impl Iterator for Orderings<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.total == 0 {
            self.done = true;
            return Some(Vec::new());
        }
        loop {
            let depth = self.stack.len();
            if depth == self.total {
                let out = self.stack.clone();
                // backtrack one level so the next call continues the search
                let k = self.stack.pop().expect("nonempty");
                self.remaining[k] += 1;
                self.cursor[depth - 1] = k + 1;
                return Some(out);
            }
            let mut placed = false;
            let start = self.cursor[depth];
            for k in start..self.remaining.len() {
                if self.remaining[k] > 0 && self.fits(k) {
                    self.remaining[k] -= 1;
                    self.stack.push(k);
                    self.cursor[depth] = k + 1;
                    self.cursor[depth + 1] = 0;
                    placed = true;
                    break;
                }
            }
            if !placed {
                if depth == 0 {
                    self.done = true;
                    return None;
                }
                let k = self.stack.pop().expect("nonempty");
                self.remaining[k] += 1;
                self.cursor[depth - 1] = k + 1;
            }
        }
    }
}

/// Valid orders of an arbitrary multiset of DSPs, in lexicographic order of
/// the DSPs.
pub fn valid_orderings(dsps: &[DeployedProtection], kb: &KnowledgeBase) -> Result<Vec<Solution>> {
    let mut kinds: Vec<DeployedProtection> = dsps.to_vec();
    kinds.sort();
    kinds.dedup();
    let mut counts = vec![0u32; kinds.len()];
    for d in dsps {
        let k = kinds.binary_search(d).expect("present");
        counts[k] += 1;
    }
    let mut artifacts: Vec<&str> = kinds.iter().map(|d| d.artifact.as_str()).collect();
    artifacts.sort_unstable();
    artifacts.dedup();
    let mut art = Vec::with_capacity(kinds.len());
    let mut asp = Vec::with_capacity(kinds.len());
    for d in &kinds {
        let cp = kb
            .cp_position(d.cp.as_str())
            .ok_or_else(|| Error::validation(format!("unknown cp `{}`", d.cp)))?;
        asp.push(kb.cp_asp_position(cp));
        art.push(
            artifacts
                .binary_search(&d.artifact.as_str())
                .expect("present"),
        );
    }
    Ok(Orderings::new(kb, &art, &asp, counts, false)
        .map(|order| order.into_iter().map(|k| kinds[k].clone()).collect())
        .collect())
}

/// The DSPs available to a set of objectives, with the per-objective cap.
#[derive(Debug, Clone)]
pub struct DspSpace {
    universe: Vec<DeployedProtection>,
    artifact: Vec<usize>,
    asp: Vec<usize>,
    /// Per objective, the universe indices of its pool.
    pools: Vec<Vec<usize>>,
    /// Per universe item, the pools containing it.
    pools_of: Vec<Vec<usize>>,
    /// Per artifact group, its universe indices.
    groups: Vec<Vec<usize>>,
    /// Per artifact group, every admissible count vector (vanilla first).
    options: Vec<Vec<Vec<u32>>>,
    sigma: u32,
    skip_discouraged: bool,
    mutations_per_step: u32,
    /// Sets whose thresholds filter solutions.
    ccs: Vec<CodeCorrelationSet>,
}

impl DspSpace {
    /// Space of the objectives at `po_indices`. Solutions must stay within
    /// the thresholds of every set in `ccs`.
    pub fn new(
        po_indices: &[usize],
        ccs: &[CodeCorrelationSet],
        model: &ApplicationModel,
        kb: &KnowledgeBase,
        cfg: &SpaceConfig,
    ) -> Result<Self> {
        if cfg.sigma < 1 {
            return Err(Error::config("sigma must be at least 1"));
        }
        if cfg.sigma > u32::from(u8::MAX) {
            return Err(Error::config("sigma must be at most 255"));
        }
        let mut pool_dsps = Vec::with_capacity(po_indices.len());
        let mut all: Vec<(usize, usize, DeployedProtection)> = Vec::new();
        for &i in po_indices {
            let po = &model.pos()[i];
            let dsps = compatible_dsps(po, model, kb);
            for d in &dsps {
                let a = model
                    .artifact_position(d.artifact.as_str())
                    .expect("resolved");
                let c = kb.cp_position(d.cp.as_str()).expect("resolved");
                all.push((a, c, d.clone()));
            }
            pool_dsps.push(dsps);
        }
        all.sort_by_key(|(a, c, _)| (*a, *c));
        all.dedup_by_key(|(a, c, _)| (*a, *c));

        let universe: Vec<DeployedProtection> = all.iter().map(|(_, _, d)| d.clone()).collect();
        let artifact: Vec<usize> = all.iter().map(|(a, _, _)| *a).collect();
        let asp: Vec<usize> = all.iter().map(|(_, c, _)| kb.cp_asp_position(*c)).collect();
        let position =
            |d: &DeployedProtection| universe.iter().position(|u| u == d).expect("present");
        let pools: Vec<Vec<usize>> = pool_dsps
            .iter()
            .map(|ds| ds.iter().map(position).collect())
            .collect();
        let mut pools_of = vec![Vec::new(); universe.len()];
        for (p, pool) in pools.iter().enumerate() {
            for &u in pool {
                pools_of[u].push(p);
            }
        }

        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (u, &a) in artifact.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if artifact[g[0]] == a => g.push(u),
                _ => groups.push(vec![u]),
            }
        }
        let mut space = DspSpace {
            universe,
            artifact,
            asp,
            pools,
            pools_of,
            groups,
            options: Vec::new(),
            sigma: cfg.sigma,
            skip_discouraged: cfg.skip_discouraged,
            mutations_per_step: cfg.mutations_per_step.max(1),
            ccs: ccs
                .iter()
                .filter(|c| c.thresholds.values().any(|t| t.is_finite()))
                .cloned()
                .collect(),
        };
        space.options = (0..space.groups.len())
            .map(|g| space.group_options(g))
            .collect();
        Ok(space)
    }

    pub fn universe(&self) -> &[DeployedProtection] {
        &self.universe
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    /// Number of multisets respecting the per-objective cap.
    pub fn multiset_count(&self) -> f64 {
        self.options.iter().map(|o| o.len() as f64).product()
    }

    fn group_options(&self, g: usize) -> Vec<Vec<u32>> {
        let items = &self.groups[g];
        let mut out = Vec::new();
        let mut counts = vec![0u32; items.len()];
        loop {
            let mut full = vec![0u32; self.universe.len()];
            for (k, &u) in items.iter().enumerate() {
                full[u] = counts[k];
            }
            if self.caps_ok(&full) {
                out.push(counts.clone());
            }
            // odometer over [0, sigma]^len
            let mut k = items.len();
            loop {
                if k == 0 {
                    out.sort_by(|a, b| {
                        let sa: u32 = a.iter().sum();
                        let sb: u32 = b.iter().sum();
                        sa.cmp(&sb).then_with(|| b.cmp(a))
                    });
                    return out;
                }
                k -= 1;
                if counts[k] < self.sigma {
                    counts[k] += 1;
                    for c in &mut counts[k + 1..] {
                        *c = 0;
                    }
                    break;
                }
            }
        }
    }

    fn caps_ok(&self, counts: &[u32]) -> bool {
        self.pools
            .iter()
            .all(|pool| pool.iter().map(|&u| counts[u]).sum::<u32>() <= self.sigma)
    }

    fn compose(&self, option_idx: &[usize]) -> Vec<u8> {
        let mut counts = vec![0u8; self.universe.len()];
        for (g, &o) in option_idx.iter().enumerate() {
            for (k, &u) in self.groups[g].iter().enumerate() {
                counts[u] = self.options[g][o][k] as u8;
            }
        }
        counts
    }

    fn orderings<'s>(&'s self, kb: &'s KnowledgeBase, counts: &[u8]) -> Orderings<'s> {
        let counts = counts.iter().map(|&c| u32::from(c)).collect();
        Orderings::new(kb, &self.artifact, &self.asp, counts, self.skip_discouraged)
    }

    fn solution(&self, order: &[usize]) -> Solution {
        order.iter().map(|&u| self.universe[u].clone()).collect()
    }

    fn order_of(&self, s: &Solution) -> Option<Vec<usize>> {
        s.dsps()
            .iter()
            .map(|d| self.universe.iter().position(|x| x == d))
            .collect()
    }

    fn counts_of(&self, s: &Solution) -> Option<Vec<u8>> {
        let mut counts = vec![0u32; self.universe.len()];
        for u in self.order_of(s)? {
            counts[u] += 1;
        }
        if !self.caps_ok(&counts) {
            return None;
        }
        Some(counts.into_iter().map(|c| c as u8).collect())
    }

    /// Whether `s` uses only DSPs of this space and respects the caps.
    pub fn contains(&self, s: &Solution) -> bool {
        self.counts_of(s).is_some()
    }

    fn feasible(&self, s: &Solution, model: &ApplicationModel, kb: &KnowledgeBase) -> bool {
        self.ccs.iter().all(|c| within_thresholds(s, c, model, kb))
    }

    /// Whether `s` would be produced by a walk of this space.
    pub fn admits(&self, s: &Solution, model: &ApplicationModel, kb: &KnowledgeBase) -> bool {
        self.contains(s)
            && sequence_check(s, kb, self.skip_discouraged)
            && self.feasible(s, model, kb)
    }

    fn can_add(&self, counts: &[u8], u: usize) -> bool {
        u32::from(counts[u]) < self.sigma
            && self.pools_of[u].iter().all(|&p| {
                self.pools[p]
                    .iter()
                    .map(|&x| u32::from(counts[x]))
                    .sum::<u32>()
                    < self.sigma
            })
    }

    /// Legal single mutations of `counts`, grouped by kind (add, remove,
    /// replace on the same artifact).
    fn mutations(&self, counts: &[u8]) -> [Vec<Vec<u8>>; 3] {
        let mut add = Vec::new();
        let mut remove = Vec::new();
        let mut replace = Vec::new();
        for u in 0..self.universe.len() {
            if self.can_add(counts, u) {
                let mut c = counts.to_vec();
                c[u] += 1;
                add.push(c);
            }
            if counts[u] > 0 {
                let mut c = counts.to_vec();
                c[u] -= 1;
                for &v in &self.groups[self.group_of(u)] {
                    if v != u && self.can_add(&c, v) {
                        let mut r = c.clone();
                        r[v] += 1;
                        replace.push(r);
                    }
                }
                remove.push(c);
            }
        }
        [add, remove, replace]
    }

    fn group_of(&self, u: usize) -> usize {
        self.groups
            .iter()
            .position(|g| g.contains(&u))
            .expect("every item is in a group")
    }

    /// Upper bound on the number of solutions: the sum over multisets of the
    /// number of distinct permutations, saturating past `limit`.
    fn estimate(&self, limit: f64) -> f64 {
        if self.multiset_count() > limit {
            return self.multiset_count();
        }
        let mut total = 0.0;
        let mut scan = Scan::new(self);
        while let Some(counts) = scan.next_counts(self) {
            total += multinomial(&counts);
            if total > limit {
                break;
            }
        }
        total
    }

    /// Starts a walk from `seed` (vanilla when `None`).
    pub fn iter<'a>(
        &'a self,
        model: &'a ApplicationModel,
        kb: &'a KnowledgeBase,
        seed: Option<&Solution>,
        rng_seed: u64,
    ) -> Result<SolutionIter<'a>> {
        let seed = seed.cloned().unwrap_or_default();
        if !self.contains(&seed) {
            return Err(Error::config(format!(
                "seed solution {seed} is not part of the solution space"
            )));
        }
        if !self.admits(&seed, model, kb) {
            return Err(Error::config(format!(
                "seed solution {seed} breaks precedence or overhead constraints"
            )));
        }
        Ok(SolutionIter {
            space: self,
            kb,
            model,
            rng: ChaCha8Rng::seed_from_u64(rng_seed),
            visited: HashSet::new(),
            current: Vec::new(),
            pending: None,
            seed: Some(seed),
            scan: Scan::new(self),
            done: false,
        })
    }
}

/// `n! / prod(c_i!)` as a float.
fn multinomial(counts: &[u8]) -> f64 {
    let mut result = 1.0;
    let mut n = 0u32;
    for &c in counts {
        for k in 1..=u32::from(c) {
            n += 1;
            result *= f64::from(n) / f64::from(k);
        }
    }
    result
}

/// Odometer over the per-artifact count options; the last artifact varies
/// fastest.
#[derive(Debug, Clone)]
struct Scan {
    cursor: Option<Vec<usize>>,
}

impl Scan {
    fn new(space: &DspSpace) -> Self {
        Scan {
            cursor: Some(vec![0; space.groups.len()]),
        }
    }

    fn next_counts(&mut self, space: &DspSpace) -> Option<Vec<u8>> {
        let cursor = self.cursor.as_mut()?;
        let out = space.compose(cursor);
        let mut g = cursor.len();
        loop {
            if g == 0 {
                self.cursor = None;
                break;
            }
            g -= 1;
            cursor[g] += 1;
            if cursor[g] < space.options[g].len() {
                break;
            }
            cursor[g] = 0;
        }
        Some(out)
    }
}

/// Seeded walk of a [`DspSpace`]; see the module documentation.
pub struct SolutionIter<'a> {
    space: &'a DspSpace,
    kb: &'a KnowledgeBase,
    model: &'a ApplicationModel,
    rng: ChaCha8Rng,
    visited: HashSet<Vec<u8>>,
    current: Vec<u8>,
    pending: Option<(Orderings<'a>, Option<Vec<usize>>)>,
    seed: Option<Solution>,
    scan: Scan,
    done: bool,
}

impl SolutionIter<'_> {
    /// Number of multisets entered so far.
    pub fn multisets_visited(&self) -> usize {
        self.visited.len()
    }

    fn enter(&mut self, counts: Vec<u8>, skip: Option<Vec<usize>>) {
        self.visited.insert(counts.clone());
        let orders = self.space.orderings(self.kb, &counts);
        self.current = counts;
        self.pending = Some((orders, skip));
    }

    fn fuzz(&mut self) -> Option<Vec<u8>> {
        let mut counts = self.current.clone();
        for _ in 1..self.space.mutations_per_step {
            let kinds = self.space.mutations(&counts);
            let nonempty: Vec<&Vec<Vec<u8>>> = kinds.iter().filter(|k| !k.is_empty()).collect();
            let Some(kind) = nonempty.choose(&mut self.rng) else {
                break;
            };
            counts = kind[self.rng.gen_range(0..kind.len())].clone();
        }
        let kinds = self.space.mutations(&counts).map(|k| {
            k.into_iter()
                .filter(|c| !self.visited.contains(c))
                .collect::<Vec<_>>()
        });
        let nonempty: Vec<&Vec<Vec<u8>>> = kinds.iter().filter(|k| !k.is_empty()).collect();
        let kind = nonempty.choose(&mut self.rng)?;
        Some(kind[self.rng.gen_range(0..kind.len())].clone())
    }

    fn rescan(&mut self) -> Option<Vec<u8>> {
        while let Some(c) = self.scan.next_counts(self.space) {
            if !self.visited.contains(&c) {
                return Some(c);
            }
        }
        None
    }
}

impl Iterator for SolutionIter<'_> {
    type Item = Solution;

    fn next(&mut self) -> Option<Solution> {
        if self.done {
            return None;
        }
        if let Some(seed) = self.seed.take() {
            let counts = self
                .space
                .counts_of(&seed)
                .expect("checked at construction");
            let order = self.space.order_of(&seed).expect("checked at construction");
            self.enter(counts, Some(order));
            return Some(seed);
        }
        loop {
            if let Some((orders, skip)) = &mut self.pending {
                match orders.next() {
                    Some(order) => {
                        if skip.as_ref() == Some(&order) {
                            continue;
                        }
                        let s = self.space.solution(&order);
                        if self.space.feasible(&s, self.model, self.kb) {
                            return Some(s);
                        }
                        continue;
                    }
                    None => self.pending = None,
                }
            }
            let all_seen = (self.visited.len() as f64) >= self.space.multiset_count();
            let next = if all_seen {
                None
            } else {
                self.fuzz().or_else(|| self.rescan())
            };
            match next {
                Some(counts) => self.enter(counts, None),
                None => {
                    self.done = true;
                    return None;
                }
            }
        }
    }
}

/// Every admissible solution of the space exactly once: multisets in
/// odometer order, each followed by its valid orders in lexicographic order.
pub fn enumerate_all(
    space: &DspSpace,
    model: &ApplicationModel,
    kb: &KnowledgeBase,
) -> Result<Vec<Solution>> {
    let limit = ENUMERATION_LIMIT as f64;
    let estimated = space.estimate(limit);
    if estimated > limit {
        return Err(Error::SpaceTooLarge {
            estimated,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::new();
    let mut scan = Scan::new(space);
    while let Some(counts) = scan.next_counts(space) {
        for order in space.orderings(kb, &counts) {
            let s = space.solution(&order);
            if space.feasible(&s, model, kb) {
                out.push(s);
            }
        }
    }
    Ok(out)
}
