//! Shared setup for the criterion benchmarks: a synthetic instance with its
//! solution space prepared once, searched many times.

use spmiti_core::explorer::{SpaceSource, Walk};
use spmiti_core::solspace::{DspSpace, SpaceConfig};
use spmiti_core::synth::{bench_instance, Instance};
use spmiti_core::CodeCorrelationSet;

/// A bench instance with `po` objectives and `paths` attack paths.
pub fn instance(po: usize, paths: usize) -> Instance {
    bench_instance(po, paths, 1)
}

/// One DSP per objective over the whole model, walked from `seed`.
pub fn source(inst: &Instance, seed: u64) -> SpaceSource<'_> {
    let pos: Vec<usize> = (0..inst.model.pos().len()).collect();
    let whole = CodeCorrelationSet::whole(&inst.model);
    let cfg = SpaceConfig {
        sigma: 1,
        ..SpaceConfig::default()
    };
    let space = DspSpace::new(
        &pos,
        std::slice::from_ref(&whole),
        &inst.model,
        &inst.kb,
        &cfg,
    )
    .expect("bench space");
    SpaceSource::new(
        space,
        Walk::Generated {
            seed: None,
            rng_seed: seed,
        },
        &inst.model,
        &inst.kb,
    )
}
