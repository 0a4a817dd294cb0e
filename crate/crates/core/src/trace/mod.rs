//! Brush fire tracing of motorcycle walls.

pub mod hex;
pub mod param;
pub mod refine;

pub use hex::{trace_hex, trace_hex_sparse};

use crate::topology::NONE;

/// Tagged facets of a traced wall field with their propagation distance and
/// the singular edge whose fire reached them first.
#[derive(Clone, Debug, PartialEq)]
pub struct WallField {
    pub tagged: Vec<bool>,
    pub d: Vec<f64>,
    pub origin: Vec<u32>,
    /// Distances in the order entries were popped from the queue.
    pub pop_order: Vec<f64>,
    pub ignitions: usize,
}

impl WallField {
    pub fn new(n_facets: usize) -> WallField {
        WallField {
            tagged: vec![false; n_facets],
            d: vec![0.0; n_facets],
            origin: vec![NONE; n_facets],
            pop_order: Vec::new(),
            ignitions: 0,
        }
    }

    pub fn tagged_facets(&self) -> Vec<u32> {
        (0..self.tagged.len() as u32).filter(|&f| self.tagged[f as usize]).collect()
    }

    pub fn n_tagged(&self) -> usize {
        self.tagged.iter().filter(|&&t| t).count()
    }
}

/// Options shared by the tracers.
#[derive(Clone, Copy, Debug, Default)]
pub struct TraceOptions {
    /// Permute the ignition order with this seed.
    pub seed: Option<u64>,
    /// Never stop at burnt terrain; yields the base complex.
    pub ignore_alive: bool,
}

pub(crate) fn permute<T>(items: &mut [T], seed: Option<u64>) {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    if let Some(s) = seed {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
        items.shuffle(&mut rng);
    }
}
