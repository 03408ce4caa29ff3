//! Structural property tests over randomly generated hypergraphs.

use proptest::prelude::*;

use hypercollapse::collapse::{collapse, identifiable_oracle, OrderPolicy};
use hypercollapse::Hypergraph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A vertex count together with a batch of valid edges over it.
fn instance() -> impl Strategy<Value = (usize, Vec<Vec<u32>>, Vec<u32>)> {
    (1usize..20).prop_flat_map(|n| {
        let edge = prop::collection::btree_set(0..n as u32, 0..=n.min(4))
            .prop_map(|s| s.into_iter().collect::<Vec<u32>>());
        (
            Just(n),
            prop::collection::vec(edge.clone(), 0..12),
            edge,
        )
    })
}

proptest! {
    #[test]
    fn adding_an_edge_never_shrinks_the_identifiable_set(
        (n, edges, extra) in instance()
    ) {
        let base = Hypergraph::from_edges(n, edges.clone()).unwrap();
        let mut grown_edges = edges;
        grown_edges.push(extra);
        let grown = Hypergraph::from_edges(n, grown_edges).unwrap();

        let v_base = identifiable_oracle(&base);
        let v_grown = identifiable_oracle(&grown);
        for v in &v_base {
            prop_assert!(v_grown.contains(v), "vertex {v} lost after adding an edge");
        }

        // The engine agrees with the oracle on both instances.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for (h, expected) in [(&base, &v_base), (&grown, &v_grown)] {
            let mut h = h.clone();
            let trace = collapse(&mut h, &OrderPolicy::LowestVertexFirst, &mut rng).unwrap();
            let mut got = trace.identifiable.clone();
            got.sort_unstable();
            prop_assert_eq!(&got, expected);
        }
    }

    #[test]
    fn edge_list_serialization_roundtrips((n, edges, _) in instance()) {
        let h = Hypergraph::from_edges(n, edges).unwrap();
        let mut buf = Vec::new();
        h.write_to(&mut buf).unwrap();
        let back = Hypergraph::read_from(&buf[..]).unwrap();
        prop_assert_eq!(back.n_vertices(), h.n_vertices());
        prop_assert_eq!(back.edge_sets(), h.edge_sets());
    }
}
