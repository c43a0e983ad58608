//! Causal structures of a system: the length function, the graph of causal
//! steps with its Lorentzian distance, the causal order, the orthogonality
//! lattice, and tangent cone histograms.

mod cone;
mod graph;
mod order;
mod scales;

pub use cone::{tangent_cone_histogram, tangent_cone_table, tangent_map, ConeBin, ConeHistogram};
pub use graph::{build_causal_graph, pair_records, CausalGraph, Edge, GraphConfig, PairRecord};
pub use order::{
    enumerate_lattice, full_mask, mask_to_set, ortho_complement, partial_order, perp_of_mask,
    set_to_mask, CausalOrder, Lattice, LATTICE_DEFAULT_CAP, LATTICE_HARD_CAP,
};
pub use scales::{ell, ell_from_norm, product_norm, LengthScales, ProductNorm};
