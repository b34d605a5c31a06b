//! Classical random walk return probability on the carpet.
//!
//! The default move rule mirrors the quantum shift's self-loop convention:
//! each step the walker picks one of the 4 directions uniformly and stays put
//! when the link is blocked. The stay option breaks bipartite parity, so the
//! return probability is positive at all large t and the whole series can be
//! fit. A uniform-over-open-neighbors variant is available for sensitivity
//! checks.

use crate::lattice::CarpetLattice;
use crate::series::TimeSeries;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("steps must be >= 1")]
    NoSteps,
    #[error("walker count must be >= 1 for the monte-carlo method")]
    NoWalkers,
}

/// Move rule for the classical walker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveRule {
    /// Uniform over the 4 directions; blocked directions keep the walker in place.
    Stay,
    /// Uniform over the open links only (isolated vertices stay put).
    Neighbor,
}

const PAR_THRESHOLD: usize = 1 << 13;

/// Probability mass over vertices.
pub struct Distribution {
    probs: Vec<f64>,
    scratch: Vec<f64>,
}

impl Distribution {
    /// Point mass at `start`.
    pub fn point_mass(lattice: &CarpetLattice, start: usize) -> Self {
        let mut probs = vec![0.0; lattice.vertex_count()];
        probs[start] = 1.0;
        Distribution {
            scratch: vec![0.0; probs.len()],
            probs,
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// One transition of the walk. Gather form: with the stay rule each open
    /// link contributes a quarter of the neighbor's mass and each blocked link
    /// a quarter of the vertex's own mass.
    pub fn step(&mut self, lattice: &CarpetLattice, rule: MoveRule) {
        let probs = &self.probs;
        match rule {
            MoveRule::Stay => {
                let gather = |v: usize, out: &mut f64| {
                    let nbrs = lattice.neighbors_of(v);
                    let mut acc = 0.0;
                    for &w in &nbrs {
                        acc += probs[w as usize];
                    }
                    *out = acc * 0.25;
                };
                if probs.len() >= PAR_THRESHOLD {
                    self.scratch
                        .par_iter_mut()
                        .enumerate()
                        .for_each(|(v, out)| gather(v, out));
                } else {
                    for (v, out) in self.scratch.iter_mut().enumerate() {
                        gather(v, out);
                    }
                }
            }
            MoveRule::Neighbor => {
                let gather = |v: usize, out: &mut f64| {
                    let nbrs = lattice.neighbors_of(v);
                    let mut acc = 0.0;
                    for &w in &nbrs {
                        let w = w as usize;
                        if w != v {
                            acc += probs[w] / lattice.degree(w) as f64;
                        }
                    }
                    if lattice.degree(v) == 0 {
                        acc += probs[v];
                    }
                    *out = acc;
                };
                if probs.len() >= PAR_THRESHOLD {
                    self.scratch
                        .par_iter_mut()
                        .enumerate()
                        .for_each(|(v, out)| gather(v, out));
                } else {
                    for (v, out) in self.scratch.iter_mut().enumerate() {
                        gather(v, out);
                    }
                }
            }
        }
        std::mem::swap(&mut self.probs, &mut self.scratch);
    }
}

/// Exact return-probability series P_c(start, t) for t = 0..=steps.
pub fn return_series_exact(
    lattice: &CarpetLattice,
    start: usize,
    steps: u64,
    rule: MoveRule,
) -> Result<TimeSeries, ClassicalError> {
    if steps == 0 {
        return Err(ClassicalError::NoSteps);
    }
    let mut dist = Distribution::point_mass(lattice, start);
    let mut values = Vec::with_capacity(steps as usize + 1);
    values.push(1.0);
    for _ in 0..steps {
        dist.step(lattice, rule);
        values.push(dist.probabilities()[start]);
    }
    Ok(TimeSeries::new(0, 1, values).expect("non-empty"))
}

/// Monte Carlo estimate of the same series. Each walker owns a stream derived
/// from (seed, walker index), so the result is independent of the worker count.
pub fn return_series_mc(
    lattice: &CarpetLattice,
    start: usize,
    steps: u64,
    walkers: u64,
    seed: u64,
    rule: MoveRule,
) -> Result<TimeSeries, ClassicalError> {
    if steps == 0 {
        return Err(ClassicalError::NoSteps);
    }
    if walkers == 0 {
        return Err(ClassicalError::NoWalkers);
    }
    let len = steps as usize + 1;
    let counts = (0..walkers)
        .into_par_iter()
        .fold(
            || vec![0u64; len],
            |mut counts, w| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(w);
                let mut pos = start;
                counts[0] += 1;
                for t in 1..len {
                    pos = match rule {
                        MoveRule::Stay => lattice.neighbor(pos, rng.gen_range(0..4)),
                        MoveRule::Neighbor => {
                            let nbrs = lattice.neighbors_of(pos);
                            let open: Vec<usize> = nbrs
                                .iter()
                                .map(|&w| w as usize)
                                .filter(|&w| w != pos)
                                .collect();
                            if open.is_empty() {
                                pos
                            } else {
                                open[rng.gen_range(0..open.len())]
                            }
                        }
                    };
                    if pos == start {
                        counts[t] += 1;
                    }
                }
                counts
            },
        )
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let values = counts
        .into_iter()
        .map(|c| c as f64 / walkers as f64)
        .collect();
    Ok(TimeSeries::new(0, 1, values).expect("non-empty"))
}

/// Bytes needed for exact propagation (two mass buffers).
pub fn distribution_bytes(vertex_count: u64) -> u64 {
    vertex_count * 8 * 2
}
