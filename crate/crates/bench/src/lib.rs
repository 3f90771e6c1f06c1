//! Shared inputs for the benchmarks.

use mifkit_core::cayley::{bfs_closure, CayleyGraph, FiniteGroupTable};
use mifkit_core::groups::free_pair;
use mifkit_core::modp::{reduce_generators, Specialization};

/// The free pair's image in `SL_2(F_p)`.
pub fn sl2_table(p: u64) -> FiniteGroupTable {
    let spec = free_pair();
    let phi = Specialization::new(p, vec![], &spec).expect("odd prime");
    bfs_closure(&reduce_generators(&spec, &phi).expect("reducible"), 100_000).expect("fits")
}

pub fn sl2_graph(p: u64) -> CayleyGraph {
    sl2_table(p).graph()
}
