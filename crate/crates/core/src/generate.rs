//! Synthetic instance generators.

use rand::seq::index;
use rand::Rng;

use crate::instance::ScpInstance;

/// Shape of a random instance.
#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub rows: usize,
    pub cols: usize,
    pub density: f64,
    /// Inclusive integer cost range.
    pub cost_min: u32,
    pub cost_max: u32,
}

/// Random instance in the style of the OR-Library generator: each row gets
/// about `density * cols` distinct columns (at least two when possible),
/// then every still-empty column is attached to a random row.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> ScpInstance {
    let RandomSpec {
        rows: m,
        cols: n,
        density,
        cost_min,
        cost_max,
    } = *spec;
    assert!(m > 0 && n > 0, "instance dimensions must be positive");
    assert!(cost_min <= cost_max);

    let mean = (density * n as f64).max(1.0);
    let floor = n.min(2);
    let mut entries = Vec::with_capacity((mean as usize + 1) * m);
    let mut used = vec![false; n];
    for k in 0..m {
        // Row lengths spread uniformly over [mean/2, 3*mean/2].
        let lo = (mean * 0.5).round() as usize;
        let hi = (mean * 1.5).round() as usize;
        let len = rng.gen_range(lo..=hi.max(lo)).clamp(floor, n);
        for i in index::sample(rng, n, len) {
            used[i] = true;
            entries.push((k, i));
        }
    }
    for (i, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
        entries.push((rng.gen_range(0..m), i));
    }
    let costs = (0..n)
        .map(|_| f64::from(rng.gen_range(cost_min..=cost_max)))
        .collect();
    ScpInstance::new(m, n, costs, entries).expect("generator yields covered rows")
}

/// Unicost instance whose rows are the 4-cycles of the `dim`-dimensional
/// hypercube and whose columns are its edges.
///
/// `dim = 6` gives the 240 x 192 cycle-covering problem.
pub fn hypercube_cycles(dim: u32) -> ScpInstance {
    assert!((2..=20).contains(&dim), "dimension must be in 2..=20");
    let vertices = 1usize << dim;
    // Edge (x, b) joins x and x ^ (1 << b) where bit b of x is clear.
    let edge = |x: usize, b: u32| -> usize {
        let low = x & ((1 << b) - 1);
        let high = x >> (b + 1);
        b as usize * (vertices / 2) + ((high << b) | low)
    };
    let n_cols = dim as usize * vertices / 2;
    let mut entries = Vec::new();
    let mut k = 0;
    for a in 0..dim {
        for b in (a + 1)..dim {
            for x in 0..vertices {
                if x & (1 << a) != 0 || x & (1 << b) != 0 {
                    continue;
                }
                let (xa, xb) = (x | (1 << a), x | (1 << b));
                for e in [edge(x, a), edge(x, b), edge(xa, b), edge(xb, a)] {
                    entries.push((k, e));
                }
                k += 1;
            }
        }
    }
    ScpInstance::new(k, n_cols, vec![1.0; n_cols], entries).expect("cycles are covered")
}
