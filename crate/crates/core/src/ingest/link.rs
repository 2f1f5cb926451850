//! Chaining edge pixels into ordered curves.
//!
//! Every edge pixel ends up in exactly one chain. Open curves are walked
//! from their endpoints, junction pixels (three or more edge neighbors)
//! close whichever chain reaches them first so crossings don't get welded
//! into zig-zags, and whatever remains — closed loops, fragments isolated
//! by junction handling — is picked up by a second row-major sweep. All
//! choices (seed order, neighbor preference) are deterministic.

use super::canny::neighbors8;
use super::EdgeMap;

/// An ordered run of 8-connected edge pixels, `(x, y)`.
pub type PixelChain = Vec<(usize, usize)>;

/// Edge neighbors of `(x, y)` that the chain graph connects to.
///
/// A diagonal neighbor is skipped when either orthogonal pixel bridging to
/// it is itself an edge: the connection already exists through that pixel,
/// and counting it twice would turn every staircase corner into a fake
/// junction.
fn linked_neighbors(
    edges: &EdgeMap,
    x: usize,
    y: usize,
) -> impl Iterator<Item = (usize, usize)> + '_ {
    neighbors8(x, y, edges.width(), edges.height()).filter(move |&(nx, ny)| {
        if !edges.is_edge(nx, ny) {
            return false;
        }
        if nx == x || ny == y {
            return true;
        }
        !edges.is_edge(nx, y) && !edges.is_edge(x, ny)
    })
}

/// Partitions the edge pixels of `edges` into ordered chains.
pub fn link_edges(edges: &EdgeMap) -> Vec<PixelChain> {
    let (w, h) = (edges.width(), edges.height());
    let degree = |x: usize, y: usize| linked_neighbors(edges, x, y).count();

    let mut visited = vec![false; w * h];
    let mut chains = Vec::new();

    // pass 1: open curves, walked from their free ends
    for y in 0..h {
        for x in 0..w {
            if edges.is_edge(x, y) && !visited[y * w + x] && degree(x, y) <= 1 {
                chains.push(walk(edges, &mut visited, (x, y)));
            }
        }
    }
    // pass 2: loops and leftovers have no free end; start anywhere
    for y in 0..h {
        for x in 0..w {
            if edges.is_edge(x, y) && !visited[y * w + x] {
                chains.push(walk(edges, &mut visited, (x, y)));
            }
        }
    }
    chains
}

/// Walks a chain starting at `start`, marking pixels visited. At each step
/// the unvisited neighbor that best continues the current direction is
/// taken; the walk stops at junction pixels and dead ends.
fn walk(edges: &EdgeMap, visited: &mut [bool], start: (usize, usize)) -> PixelChain {
    let w = edges.width();
    let mut chain = vec![start];
    visited[start.1 * w + start.0] = true;

    loop {
        let (cx, cy) = *chain.last().unwrap();
        // stop *after* entering a junction so the junction pixel itself
        // belongs to exactly one chain
        if chain.len() > 1 && degree_of(edges, cx, cy) >= 3 {
            break;
        }

        let prev = if chain.len() >= 2 {
            Some(chain[chain.len() - 2])
        } else {
            None
        };
        let mut best: Option<(usize, usize)> = None;
        let mut best_dot = f64::NEG_INFINITY;
        for (nx, ny) in linked_neighbors(edges, cx, cy) {
            if visited[ny * w + nx] {
                continue;
            }
            let dot = match prev {
                None => 0.0,
                Some((px, py)) => {
                    let inx = (cx as f64 - px as f64, cy as f64 - py as f64);
                    let out = (nx as f64 - cx as f64, ny as f64 - cy as f64);
                    inx.0 * out.0 + inx.1 * out.1
                }
            };
            // strict improvement keeps the earliest neighbor on ties,
            // making the walk order-stable
            if dot > best_dot {
                best_dot = dot;
                best = Some((nx, ny));
            }
        }
        match best {
            Some((nx, ny)) => {
                visited[ny * w + nx] = true;
                chain.push((nx, ny));
            }
            None => break,
        }
    }
    chain
}

fn degree_of(edges: &EdgeMap, x: usize, y: usize) -> usize {
    linked_neighbors(edges, x, y).count()
}
