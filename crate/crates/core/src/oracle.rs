//! Exhaustive references for differential testing.
//!
//! Nothing here touches the incremental `(v1, v2)` machinery or the sweep:
//! each vertex is evaluated from scratch and cliques are found by plain
//! search over the explicit edge list.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::intgraph::EdgeList;
use crate::model::{Instance, SignVector};
use crate::variance::variance_of;

pub const BRUTE_FORCE_MAX_N: usize = 25;
pub const BRUTE_FORCE_CLIQUE_N: usize = 20;

/// Maximum variance over all `2^n` vertices. Ties go to the lexicographically
/// smallest sign vector (`-1 < +1`).
pub fn brute_force_max(instance: &Instance) -> Result<(f64, SignVector)> {
    let n = instance.len();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_MAX_N,
        });
    }
    let total = 1u64 << n;
    let scan = |range: std::ops::Range<u64>| {
        let mut buf = vec![0.0; n];
        let mut best = (f64::NEG_INFINITY, u64::MAX);
        for bits in range {
            for (i, x) in buf.iter_mut().enumerate() {
                *x = if bits >> (n - 1 - i) & 1 == 1 {
                    instance.upper()[i]
                } else {
                    instance.lower()[i]
                };
            }
            let v = variance_of(&buf);
            if v > best.0 {
                best = (v, bits);
            }
        }
        best
    };

    const CHUNK: u64 = 1 << 14;
    let (value, bits) = if total <= CHUNK {
        scan(0..total)
    } else {
        (0..total / CHUNK)
            .into_par_iter()
            .map(|c| scan(c * CHUNK..(c + 1) * CHUNK))
            .reduce(
                || (f64::NEG_INFINITY, u64::MAX),
                |a, b| {
                    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                        b
                    } else {
                        a
                    }
                },
            )
    };
    Ok((value, SignVector::from_lex_index(n, bits)))
}

/// Clique number of the graph on `0..n` with the given edges.
pub fn brute_force_clique(edges: &EdgeList, n: usize) -> Result<usize> {
    if n > BRUTE_FORCE_CLIQUE_N {
        return Err(Error::TooLarge {
            n,
            limit: BRUTE_FORCE_CLIQUE_N,
        });
    }
    let mut adj = vec![0u32; n];
    for (i, j) in edges.iter() {
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange { index: i.max(j), n });
        }
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    Ok(grow(&adj, 0, all))
}

fn grow(adj: &[u32], size: usize, candidates: u32) -> usize {
    if candidates == 0 {
        return size;
    }
    let mut best = size;
    let mut rest = candidates;
    while rest != 0 {
        if size + rest.count_ones() as usize <= best {
            break;
        }
        let v = rest.trailing_zeros() as usize;
        rest &= !(1 << v);
        best = best.max(grow(adj, size + 1, rest & adj[v]));
    }
    best
}
