//! Fixtures shared by the criterion benches: the corner-to-corner scale
//! ladder at a fixed seed.

use std::sync::Arc;

use apulse_core::{generate_terrain, make_instance, GridSpec, Instance, NodeId};

pub const LADDER: [u32; 6] = [10, 20, 30, 50, 70, 100];
pub const SEED: u64 = 7;

/// Corner-to-corner instance on a `side` x `side` grid.
pub fn corner_instance(side: u32, alpha: f64) -> Instance {
    let graph = Arc::new(generate_terrain(&GridSpec::new(side, side, SEED)).expect("grid generates"));
    make_instance(graph, NodeId(0), NodeId(side * side - 1), alpha).expect("corner pair is feasible")
}

pub fn ladder(alpha: f64) -> Vec<Instance> {
    LADDER.iter().map(|&side| corner_instance(side, alpha)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_feasible_and_ordered() {
        let instances = ladder(0.2);
        assert_eq!(instances.len(), LADDER.len());
        assert!(instances.windows(2).all(|w| w[0].node_count() < w[1].node_count()));
        for inst in &instances {
            assert!((inst.budget - inst.t_min * 1.2).abs() <= 1e-9 * inst.budget);
        }
    }
}
