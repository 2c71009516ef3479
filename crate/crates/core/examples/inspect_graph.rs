//! Builds the typed graph of a small sample and prints its pseudo-alignment
//! windows and edge-type histogram.
//!
//! cargo run --example inspect_graph -- [audio_len] [video_len] [text_len]

use std::collections::BTreeMap;

use mtgat::graph::{pseudo_align, MultimodalGraph};

fn main() -> mtgat::Result<()> {
    let lens: Vec<usize> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let lengths = match lens[..] {
        [a, v, t] => [a, v, t],
        _ => [5, 3, 7],
    };
    let g = MultimodalGraph::from_lengths(lengths)?;
    println!("lengths {lengths:?}: {} nodes, {} edges", g.node_count(), g.edges.len());

    for pair in g.alignments.pairs() {
        let p = &pair.plan;
        println!(
            "{} buckets over {} (M={}, N={}, S={}, W={}): {:?}",
            pair.bucket, pair.long, p.long_len, p.short_len, p.stride, p.width, p.windows
        );
    }

    let mut histogram: BTreeMap<String, [usize; 3]> = BTreeMap::new();
    for e in &g.edges {
        histogram.entry(e.phi.to_string()).or_default()[e.tau.index()] += 1;
    }
    println!("{:<5} {:>5} {:>8} {:>7}", "phi", "past", "present", "future");
    for (phi, c) in &histogram {
        println!("{phi:<5} {:>5} {:>8} {:>7}", c[0], c[1], c[2]);
    }

    let plan = pseudo_align(7, 3)?;
    println!("pseudo_align(7, 3): S={} W={} windows {:?}", plan.stride, plan.width, plan.windows);
    Ok(())
}
