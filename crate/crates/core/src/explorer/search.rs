//! The mini-max engines.
//!
//! The defender moves once, at the root, by picking a solution from the
//! source; the attacker then appends one move per turn for `depth - 1`
//! turns and minimizes. Both engines count a node on every entry, root
//! included.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::config::{Engine, SearchConfig, Toggles};
use super::game::{Game, Line, Move};
use super::source::SolutionSource;
use super::trace::Trace;
use super::tt::{Bound, Key, TranspositionTable};
use crate::error::{Error, Result};
use crate::index::State;
use crate::model::{ApplicationModel, ConcreteAttackPath};
use crate::solution::Solution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedSolution {
    pub solution: Solution,
    /// Display name, when the game knows one.
    pub label: Option<String>,
    /// Value after the attacker's best reply.
    pub residual: f64,
    /// Value of the solution before any attack.
    pub base: f64,
    /// The attacker's best reply.
    pub attack: Vec<Move>,
    /// Position in the solution stream.
    pub ordinal: usize,
}

/// Ranking order: residual descending, then fewer DSPs, then lower canonical
/// hash, then stream position.
pub fn rank_order(a: &RankedSolution, b: &RankedSolution) -> Ordering {
    b.residual
        .partial_cmp(&a.residual)
        .unwrap_or(Ordering::Equal)
        .then(a.solution.len().cmp(&b.solution.len()))
        .then(
            a.solution
                .canonical_hash()
                .cmp(&b.solution.canonical_hash()),
        )
        .then(a.ordinal.cmp(&b.ordinal))
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub best: RankedSolution,
    /// Top solutions in ranking order; `ranked[0] == best`.
    pub ranked: Vec<RankedSolution>,
    /// Labels of the winning attack moves.
    pub attack_labels: Vec<String>,
    /// Model attack path indices appended by the winning attack, in order.
    pub attack_paths: Vec<usize>,
    pub nodes_visited: u64,
    pub tt_hits: u64,
    pub solutions_explored: u64,
    #[serde(serialize_with = "ser_duration_ms")]
    pub wall_time: Duration,
    /// Forward pruning fired on a game where it is not known to be sound.
    pub approximate: bool,
    #[serde(skip)]
    pub trace: Option<Trace>,
}

fn ser_duration_ms<S: serde::Serializer>(
    d: &Duration,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl SearchResult {
    pub fn residual(&self) -> f64 {
        self.best.residual
    }

    /// The winning solution with the winning attack as unit-effort paths.
    pub fn optimal_state(&self, model: &ApplicationModel) -> State {
        let paths = self
            .attack_paths
            .iter()
            .map(|&p| ConcreteAttackPath::unit(&model.attack_paths()[p]))
            .collect();
        State::new(self.best.solution.clone(), paths)
    }
}

/// Runs the configured engine over every solution of `source`.
pub fn explore(
    game: &dyn Game,
    source: &dyn SolutionSource,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    run(game, source, cfg, false)
}

/// Like [`explore`] on a single worker, also recording the searched tree.
pub fn explore_traced(
    game: &dyn Game,
    source: &dyn SolutionSource,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    run(game, source, cfg, true)
}

struct WorkerOut {
    top: Vec<RankedSolution>,
    nodes: u64,
    tt_hits: u64,
    pruned: bool,
    explored: u64,
    trace: Option<Trace>,
}

fn run(
    game: &dyn Game,
    source: &dyn SolutionSource,
    cfg: &SearchConfig,
    traced: bool,
) -> Result<SearchResult> {
    cfg.validate()?;
    let start = Instant::now();
    let workers = if traced { 1 } else { cfg.workers };
    let outs: Vec<WorkerOut> = if workers == 1 {
        vec![Worker::new(game, cfg, traced).run(source, 0, 1)?]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| scope.spawn(move || Worker::new(game, cfg, false).run(source, w, workers)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect::<Result<Vec<_>>>()
        })?
    };

    // the root
    let mut nodes = 1;
    let mut tt_hits = 0;
    let mut pruned = false;
    let mut explored = 0;
    let mut ranked = Vec::new();
    let mut trace = None;
    for o in outs {
        nodes += o.nodes;
        tt_hits += o.tt_hits;
        pruned |= o.pruned;
        explored += o.explored;
        ranked.extend(o.top);
        if o.trace.is_some() {
            trace = o.trace;
        }
    }
    ranked.sort_by(rank_order);
    ranked.truncate(cfg.top_n);
    let best = ranked.first().cloned().ok_or(Error::EmptySolutionSpace)?;
    if let Some(t) = trace.as_mut() {
        t.nodes[0].value = best.residual;
        t.mark(best.ordinal, &best.attack);
    }
    let attack_labels = best.attack.iter().map(|&m| game.move_label(m)).collect();
    let attack_paths = best
        .attack
        .iter()
        .flat_map(|&m| game.move_paths(m).into_owned())
        .collect();
    Ok(SearchResult {
        best,
        ranked,
        attack_labels,
        attack_paths,
        nodes_visited: nodes,
        tt_hits,
        solutions_explored: explored,
        wall_time: start.elapsed(),
        approximate: pruned && !game.monotone(),
        trace,
    })
}

/// Largest float below `x`.
fn next_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        x
    } else if x == 0.0 {
        -f64::from_bits(1)
    } else if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// Solutions read ahead and reordered at the root under alpha-beta.
const ROOT_BATCH: usize = 64;

struct Pending<'g> {
    ordinal: usize,
    solution: Solution,
    line: Box<dyn Line + 'g>,
    base: f64,
}

struct Worker<'g> {
    game: &'g dyn Game,
    cfg: &'g SearchConfig,
    toggles: Toggles,
    tt: Option<TranspositionTable>,
    nodes: u64,
    tt_hits: u64,
    pruned: bool,
    /// Triangular principal-variation rows, one per ply.
    pv: Vec<Vec<Move>>,
    /// Per ply, the attacker reply that was most damaging last time; tried
    /// first under alpha-beta.
    killers: Vec<Option<Move>>,
    trace: Option<Trace>,
    /// Label and ordinal of the solution being searched, for the trace.
    current: (String, usize),
}

impl<'g> Worker<'g> {
    fn new(game: &'g dyn Game, cfg: &'g SearchConfig, traced: bool) -> Self {
        let toggles = match cfg.engine {
            Engine::Plain => Toggles::NONE,
            Engine::Optimized => cfg.toggles,
        };
        Worker {
            game,
            cfg,
            toggles,
            tt: toggles.tt.then(|| TranspositionTable::new(cfg.tt_capacity)),
            nodes: 0,
            tt_hits: 0,
            pruned: false,
            pv: vec![Vec::new(); cfg.depth as usize + 1],
            killers: vec![None; cfg.depth as usize + 1],
            trace: traced.then(|| Trace::new("root")),
            current: (String::new(), 0),
        }
    }

    fn run(
        mut self,
        source: &dyn SolutionSource,
        worker: usize,
        workers: usize,
    ) -> Result<WorkerOut> {
        let ab = self.toggles.alpha_beta;
        let aspiration = ab && self.toggles.aspiration;
        let half = self.cfg.aspiration_half_width;
        let mut center = self.cfg.aspiration_center;
        let mut top: Vec<RankedSolution> = Vec::new();
        let mut deferred: Vec<(usize, Solution)> = Vec::new();
        let mut explored = 0;

        let mut batch: Vec<Pending> = Vec::new();
        let mut stream = source.stream()?.enumerate();
        loop {
            let next = stream.next();
            let done = match &next {
                None => true,
                Some((ordinal, _)) => self.cfg.max_solutions.is_some_and(|max| *ordinal >= max),
            };
            if let Some((ordinal, s)) = next.filter(|_| !done) {
                if ordinal % workers != worker {
                    continue;
                }
                explored += 1;
                let line = self.game.bind(&s)?;
                let base = line.value(&[], &vec![0; self.game.move_count()]);
                batch.push(Pending {
                    ordinal,
                    solution: s,
                    line,
                    base,
                });
                if batch.len() < ROOT_BATCH && self.cfg.engine != Engine::Plain {
                    continue;
                }
            }
            if ab {
                // Root move ordering: the best static value first tightens
                // the threshold early. Stable, so ties keep stream order.
                batch.sort_by(|a, b| b.base.partial_cmp(&a.base).unwrap_or(Ordering::Equal));
            }
            for Pending {
                ordinal,
                solution: s,
                line,
                base,
            } in batch.drain(..)
            {
                self.current = (self.solution_label(&s, ordinal), ordinal);

                if self.cfg.engine == Engine::Plain {
                    let (residual, attack) = self.plain(&*line, 0);
                    self.insert(&mut top, s, base, residual, attack, ordinal);
                    continue;
                }

                let threshold = if ab {
                    self.threshold(&top)
                } else {
                    f64::NEG_INFINITY
                };
                let (lo, hi) = match center {
                    Some(c) if aspiration => (c - half, c + half),
                    _ => (f64::NEG_INFINITY, f64::INFINITY),
                };
                let alpha = lo.max(threshold);
                let mut v = self.search_solution(&*line, &s, alpha, hi);
                if v >= hi {
                    v = self.search_solution(&*line, &s, threshold, f64::INFINITY);
                } else if v <= alpha {
                    // Below the aspiration window the value is only an upper
                    // bound; it matters if it may still reach the top list.
                    if lo > threshold && v > threshold {
                        deferred.push((ordinal, s));
                    }
                    continue;
                }
                let attack = self.pv[0].clone();
                self.insert(&mut top, s, base, v, attack, ordinal);
                if aspiration && center.is_none() {
                    center = Some(v);
                }
            }
            if done {
                break;
            }
        }

        for (ordinal, s) in deferred {
            let threshold = self.threshold(&top);
            let line = self.game.bind(&s)?;
            self.current = (self.solution_label(&s, ordinal), ordinal);
            let base = line.value(&[], &vec![0; self.game.move_count()]);
            let v = self.search_solution(&*line, &s, threshold, f64::INFINITY);
            if v > threshold {
                let attack = self.pv[0].clone();
                self.insert(&mut top, s, base, v, attack, ordinal);
            }
        }

        Ok(WorkerOut {
            top,
            nodes: self.nodes,
            tt_hits: self.tt_hits,
            pruned: self.pruned,
            explored,
            trace: self.trace,
        })
    }

    fn solution_label(&self, s: &Solution, ordinal: usize) -> String {
        self.game
            .solution_label(s)
            .unwrap_or_else(|| format!("S{}", ordinal + 1))
    }

    /// Values at or below this cannot enter the top list.
    fn threshold(&self, top: &[RankedSolution]) -> f64 {
        if top.len() >= self.cfg.top_n {
            next_down(top[self.cfg.top_n - 1].residual)
        } else {
            f64::NEG_INFINITY
        }
    }

    fn insert(
        &self,
        top: &mut Vec<RankedSolution>,
        solution: Solution,
        base: f64,
        residual: f64,
        attack: Vec<Move>,
        ordinal: usize,
    ) {
        let r = RankedSolution {
            label: self.game.solution_label(&solution),
            solution,
            residual,
            base,
            attack,
            ordinal,
        };
        let at = top.partition_point(|x| rank_order(x, &r) == Ordering::Less);
        top.insert(at, r);
        top.truncate(self.cfg.top_n);
    }

    fn trace_enter(
        &mut self,
        line: &dyn Line,
        seq: &[Move],
        counts: &[u32],
        parent: usize,
    ) -> Option<usize> {
        let trace = self.trace.as_mut()?;
        let static_value = line.value(seq, counts);
        let id = match seq.last() {
            None => trace.push(
                parent,
                self.current.0.clone(),
                static_value,
                None,
                Some(self.current.1),
            ),
            Some(&m) => trace.push(parent, self.game.move_label(m), static_value, Some(m), None),
        };
        Some(id)
    }

    fn trace_leave(&mut self, id: Option<usize>, value: f64) {
        if let (Some(t), Some(id)) = (self.trace.as_mut(), id) {
            t.nodes[id].value = value;
        }
    }

    /// Literal mini-max: every attacker node takes the first minimum of its
    /// children. Returns the value and the attack sequence reaching it.
    fn plain(&mut self, line: &dyn Line, parent: usize) -> (f64, Vec<Move>) {
        let mut seq = Vec::new();
        let mut counts = vec![0u32; self.game.move_count()];
        self.plain_node(line, &mut seq, &mut counts, self.cfg.depth - 1, parent)
    }

    fn plain_node(
        &mut self,
        line: &dyn Line,
        seq: &mut Vec<Move>,
        counts: &mut Vec<u32>,
        remaining: u32,
        parent: usize,
    ) -> (f64, Vec<Move>) {
        self.nodes += 1;
        let tid = self.trace_enter(line, seq, counts, parent);
        let moves = line.moves(seq);
        let out = if remaining == 0 || moves.is_empty() {
            (line.value(seq, counts), seq.clone())
        } else {
            let mut best = (f64::INFINITY, Vec::new());
            for &m in moves.iter() {
                seq.push(m);
                counts[m] += 1;
                let child = self.plain_node(line, seq, counts, remaining - 1, tid.unwrap_or(0));
                seq.pop();
                counts[m] -= 1;
                if child.0 < best.0 {
                    best = child;
                }
            }
            best
        };
        self.trace_leave(tid, out.0);
        out
    }

    fn search_solution(&mut self, line: &dyn Line, s: &Solution, alpha: f64, beta: f64) -> f64 {
        let mut seq = Vec::new();
        let mut counts = vec![0u32; self.game.move_count()];
        let hash = s.canonical_hash();
        self.min_node(
            line,
            hash,
            &mut seq,
            &mut counts,
            self.cfg.depth - 1,
            alpha,
            beta,
            0,
        )
    }

    /// Fail-soft alpha-beta at an attacker (minimizing) node. The principal
    /// variation from this node is left in `pv[seq.len()]`.
    #[allow(clippy::too_many_arguments)]
    fn min_node(
        &mut self,
        line: &dyn Line,
        solution: u64,
        seq: &mut Vec<Move>,
        counts: &mut Vec<u32>,
        remaining: u32,
        alpha: f64,
        beta: f64,
        parent: usize,
    ) -> f64 {
        self.nodes += 1;
        let tid = self.trace_enter(line, seq, counts, parent);
        let v = self.min_body(
            line,
            solution,
            seq,
            counts,
            remaining,
            alpha,
            beta,
            tid.unwrap_or(0),
        );
        self.trace_leave(tid, v);
        v
    }

    #[allow(clippy::too_many_arguments)]
    fn min_body(
        &mut self,
        line: &dyn Line,
        solution: u64,
        seq: &mut Vec<Move>,
        counts: &mut Vec<u32>,
        remaining: u32,
        alpha: f64,
        beta: f64,
        tid: usize,
    ) -> f64 {
        let ply = seq.len();
        self.pv[ply].clear();
        if remaining == 0 {
            return line.value(seq, counts);
        }
        let moves = line.moves(seq);
        if moves.is_empty() {
            return line.value(seq, counts);
        }

        let key_moves: Vec<u32> = if self.tt.is_some() {
            if self.game.order_sensitive() {
                seq.iter().map(|&m| m as u32).collect()
            } else {
                counts.clone()
            }
        } else {
            Vec::new()
        };
        if let Some(tt) = self.tt.as_mut() {
            let key = Key {
                solution,
                moves: &key_moves,
                remaining,
            };
            if let Some(p) = tt.probe(&key) {
                let usable = match p.bound {
                    Bound::Exact => true,
                    Bound::Lower => p.value >= beta,
                    Bound::Upper => p.value <= alpha,
                };
                if usable {
                    let v = p.value;
                    let pv = p.pv.to_vec();
                    self.tt_hits += 1;
                    self.pv[ply] = pv;
                    return v;
                }
            }
        }

        if self.toggles.forward_pruning() {
            let s = line.value(seq, counts);
            let m = self.cfg.margins;
            let t = self.toggles;
            let prune = (t.razoring && remaining <= 3 && s < alpha - m.razor)
                || (t.futility && remaining == 1 && s + m.futility <= alpha)
                || (t.ext_futility && remaining == 2 && s + m.ext_futility <= alpha);
            if prune {
                self.pruned = true;
                return s;
            }
        }

        let ab = self.toggles.alpha_beta;
        let mut order: Vec<usize> = (0..moves.len()).collect();
        if ab {
            if let Some(k) = self.killers[ply].and_then(|k| moves.iter().position(|&m| m == k)) {
                order[..=k].rotate_right(1);
            }
        }
        let mut best = f64::INFINITY;
        let mut best_at = usize::MAX;
        let mut b = beta;
        for i in order {
            let m = moves[i];
            seq.push(m);
            counts[m] += 1;
            let v = self.min_node(line, solution, seq, counts, remaining - 1, alpha, b, tid);
            seq.pop();
            counts[m] -= 1;
            // Ties go to the earlier move, as in the plain engine.
            if v < best || (v == best && i < best_at) {
                best = v;
                best_at = i;
                if ab {
                    self.killers[ply] = Some(m);
                }
                let (head, tail) = self.pv.split_at_mut(ply + 1);
                head[ply].clear();
                head[ply].push(m);
                head[ply].extend_from_slice(&tail[0]);
                if ab {
                    b = b.min(best);
                    if best <= alpha {
                        break;
                    }
                }
            }
        }

        if let Some(tt) = self.tt.as_mut() {
            let bound = if best <= alpha {
                Bound::Upper
            } else if best >= beta {
                Bound::Lower
            } else {
                Bound::Exact
            };
            let key = Key {
                solution,
                moves: &key_moves,
                remaining,
            };
            tt.store(&key, best, bound, &self.pv[ply]);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_down_is_adjacent() {
        for x in [1.0, -1.0, 0.0, 8.0, 1e-300, -3.5] {
            let d = next_down(x);
            assert!(d < x);
            assert!(!(d < x && x - d > 0.0 && (d + x) / 2.0 != d && (d + x) / 2.0 != x));
        }
        assert_eq!(next_down(f64::INFINITY), f64::MAX);
    }
}
