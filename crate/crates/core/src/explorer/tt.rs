//! Transposition table keyed by solution, attack multiset and remaining depth.

use super::game::Move;
use crate::hash::Fnv64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Bound {
    Exact,
    /// The true value is at least the stored one.
    Lower,
    /// The true value is at most the stored one.
    Upper,
}

#[derive(Debug, Clone)]
struct Entry {
    solution: u64,
    moves: Vec<u32>,
    remaining: u32,
    value: f64,
    bound: Bound,
    pv: Vec<Move>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Key<'a> {
    pub solution: u64,
    /// Move counts, or the move sequence when order matters.
    pub moves: &'a [u32],
    pub remaining: u32,
}

impl Key<'_> {
    fn hash(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_u64(self.solution);
        for &m in self.moves {
            h.write(&m.to_le_bytes());
        }
        h.write(&self.remaining.to_le_bytes());
        h.finish()
    }
}

pub(crate) struct Probe<'e> {
    pub value: f64,
    pub bound: Bound,
    pub pv: &'e [Move],
}

/// Fixed-capacity table, one entry per slot; deeper entries win a slot.
pub(crate) struct TranspositionTable {
    slots: Vec<Option<Entry>>,
    mask: usize,
    pub hits: u64,
}

impl TranspositionTable {
    pub fn new(capacity: usize) -> Self {
        let size = capacity.max(1).next_power_of_two();
        TranspositionTable {
            slots: vec![None; size],
            mask: size - 1,
            hits: 0,
        }
    }

    pub fn probe(&mut self, key: &Key<'_>) -> Option<Probe<'_>> {
        let slot = (key.hash() as usize) & self.mask;
        let e = self.slots[slot].as_ref()?;
        if e.solution == key.solution && e.remaining == key.remaining && e.moves == key.moves {
            self.hits += 1;
            Some(Probe {
                value: e.value,
                bound: e.bound,
                pv: &e.pv,
            })
        } else {
            None
        }
    }

    pub fn store(&mut self, key: &Key<'_>, value: f64, bound: Bound, pv: &[Move]) {
        let slot = (key.hash() as usize) & self.mask;
        if let Some(old) = &self.slots[slot] {
            let same = old.solution == key.solution && old.moves == key.moves;
            if !same && old.remaining > key.remaining {
                return;
            }
        }
        self.slots[slot] = Some(Entry {
            solution: key.solution,
            moves: key.moves.to_vec(),
            remaining: key.remaining,
            value,
            bound,
            pv: pv.to_vec(),
        });
    }
}
