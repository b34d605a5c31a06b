//! Flip-flop quantum walk search on a carpet lattice.
//!
//! One search step applies the oracle (sign flip of all coin amplitudes at the
//! marked vertex), the Grover coin on every unmarked vertex, and the flip-flop
//! shift. Blocked links keep their amplitude in place with the link label
//! unchanged, so the shift stays an involution.

use crate::lattice::{CarpetLattice, CellCoord, reverse_slot};
use crate::series::TimeSeries;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("norm drifted to |psi|^2 = {norm_sq} at step {step} (|drift| > {limit}); this signals an implementation bug")]
    NormDrift { step: u64, norm_sq: f64, limit: f64 },
    #[error("steps must be >= 1")]
    NoSteps,
}

/// Norm-squared drift that aborts an evolution.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Vertex count at and above which per-step passes run on the rayon pool.
const PAR_THRESHOLD: usize = 1 << 13;

/// Complex amplitudes over (vertex, link) pairs, stored vertex-major with 4
/// coin slots per vertex.
pub struct WalkState<'a> {
    lattice: &'a CarpetLattice,
    amps: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl<'a> WalkState<'a> {
    /// Uniform superposition: every amplitude (N k)^{-1/2} with k = 4.
    pub fn uniform(lattice: &'a CarpetLattice) -> Self {
        let n = lattice.vertex_count();
        let amp = Complex64::new(1.0 / ((n * 4) as f64).sqrt(), 0.0);
        WalkState {
            lattice,
            amps: vec![amp; n * 4],
            scratch: vec![Complex64::default(); n * 4],
        }
    }

    pub fn lattice(&self) -> &CarpetLattice {
        self.lattice
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Negates the 4 coin amplitudes at the marked vertex.
    pub fn apply_oracle(&mut self) {
        let m = self.lattice.marked() * 4;
        for a in &mut self.amps[m..m + 4] {
            *a = -*a;
        }
    }

    /// Grover diffusion per vertex, c -> (2/4)(sum c) - c, skipping the marked
    /// vertex where the coin acts as identity.
    pub fn apply_coin(&mut self) {
        let marked = self.lattice.marked();
        let coin = |v: usize, c: &mut [Complex64]| {
            if v == marked {
                return;
            }
            let half_sum = (c[0] + c[1] + c[2] + c[3]) * 0.5;
            for a in c {
                *a = half_sum - *a;
            }
        };
        if self.lattice.vertex_count() >= PAR_THRESHOLD {
            self.amps
                .par_chunks_mut(4)
                .enumerate()
                .for_each(|(v, c)| coin(v, c));
        } else {
            for (v, c) in self.amps.chunks_mut(4).enumerate() {
                coin(v, c);
            }
        }
    }

    /// Flip-flop shift: amplitude at (v, l) moves to (neighbor, reverse(l));
    /// blocked links are fixed points. Implemented as a gather into the
    /// scratch buffer, so it is a pure permutation of the basis.
    pub fn apply_shift(&mut self) {
        let lattice = self.lattice;
        let amps = &self.amps;
        let gather = |v: usize, out: &mut [Complex64]| {
            let nbrs = lattice.neighbors_of(v);
            for (l, slot) in out.iter_mut().enumerate() {
                let w = nbrs[l] as usize;
                *slot = if w == v {
                    amps[v * 4 + l]
                } else {
                    amps[w * 4 + reverse_slot(l)]
                };
            }
        };
        if lattice.vertex_count() >= PAR_THRESHOLD {
            self.scratch
                .par_chunks_mut(4)
                .enumerate()
                .for_each(|(v, out)| gather(v, out));
        } else {
            for (v, out) in self.scratch.chunks_mut(4).enumerate() {
                gather(v, out);
            }
        }
        std::mem::swap(&mut self.amps, &mut self.scratch);
    }

    /// One search step: oracle, then coin, then shift.
    pub fn search_step(&mut self) {
        self.apply_oracle();
        self.apply_coin();
        self.apply_shift();
    }

    /// P(v, t) = sum over links of |a_{v,l}|^2.
    pub fn vertex_probability(&self, v: usize) -> f64 {
        self.amps[v * 4..v * 4 + 4]
            .iter()
            .map(|a| a.norm_sqr())
            .sum()
    }

    pub fn marked_probability(&self) -> f64 {
        self.vertex_probability(self.lattice.marked())
    }

    /// Per-vertex probabilities; sums to the squared norm.
    pub fn probability_distribution(&self) -> Vec<f64> {
        self.amps
            .chunks(4)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    pub steps: u64,
    /// Recording stride for the probability series; period analysis needs 1.
    pub record_stride: u64,
    /// Step at which to capture the full spatial distribution, if any.
    pub snapshot_step: Option<u64>,
}

impl SearchConfig {
    pub fn new(steps: u64) -> Self {
        SearchConfig {
            steps,
            record_stride: 1,
            snapshot_step: None,
        }
    }
}

/// Result of one search evolution.
pub struct SearchRun {
    pub stage_level: u32,
    pub vertex_count: usize,
    pub marked: CellCoord,
    pub steps: u64,
    pub series: TimeSeries,
    pub final_norm_sq: f64,
    /// Spatial distribution captured at `snapshot_step`, when requested.
    pub snapshot: Option<Vec<f64>>,
}

/// Evolves |psi(t)> = (W R)^t |psi(0)> from the uniform state, recording the
/// marked-vertex probability at t = 0 and after every `record_stride` steps.
pub fn evolve(lattice: &CarpetLattice, config: &SearchConfig) -> Result<SearchRun, WalkError> {
    if config.steps == 0 {
        return Err(WalkError::NoSteps);
    }
    let stride = config.record_stride.max(1);
    let mut state = WalkState::uniform(lattice);
    let mut values = Vec::with_capacity((config.steps / stride + 1) as usize);
    values.push(state.marked_probability());
    let mut norm_sq = 1.0;
    let mut snapshot = match config.snapshot_step {
        Some(0) => Some(state.probability_distribution()),
        _ => None,
    };
    for t in 1..=config.steps {
        state.search_step();
        if config.snapshot_step == Some(t) {
            snapshot = Some(state.probability_distribution());
        }
        if t % stride == 0 {
            values.push(state.marked_probability());
            norm_sq = state.norm_sq();
            if (norm_sq - 1.0).abs() > NORM_DRIFT_LIMIT {
                return Err(WalkError::NormDrift {
                    step: t,
                    norm_sq,
                    limit: NORM_DRIFT_LIMIT,
                });
            }
        }
    }
    Ok(SearchRun {
        stage_level: lattice.stage().level(),
        vertex_count: lattice.vertex_count(),
        marked: lattice.marked_coord(),
        steps: config.steps,
        series: TimeSeries::new(0, stride, values).expect("non-empty by construction"),
        final_norm_sq: norm_sq,
        snapshot,
    })
}

/// State-vector bytes needed for a search at the given vertex count (two
/// buffers of 4 complex slots per vertex).
pub fn state_bytes(vertex_count: u64) -> u64 {
    vertex_count * 4 * 16 * 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Stage;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn lattice(level: u32) -> CarpetLattice {
        CarpetLattice::build(Stage::new(level).unwrap(), None).unwrap()
    }

    fn random_unit_state<'a>(lat: &'a CarpetLattice, rng: &mut ChaCha8Rng) -> WalkState<'a> {
        let mut state = WalkState::uniform(lat);
        for a in state.amplitudes_mut() {
            *a = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let norm = state.norm_sq().sqrt();
        for a in state.amplitudes_mut() {
            *a /= norm;
        }
        state
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn uniform_state_values() {
        let lat = lattice(1);
        let state = WalkState::uniform(&lat);
        assert_eq!(state.amplitudes().len(), 32);
        for a in state.amplitudes() {
            assert!((a.re - 1.0 / 32f64.sqrt()).abs() < 1e-15);
            assert_eq!(a.im, 0.0);
        }
        assert!((state.norm_sq() - 1.0).abs() < 1e-12);

        let lat0 = lattice(0);
        let state0 = WalkState::uniform(&lat0);
        for a in state0.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn oracle_negates_only_marked() {
        let lat = lattice(1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut state = random_unit_state(&lat, &mut rng);
        let before = state.amplitudes().to_vec();
        state.apply_oracle();
        let m = lat.marked() * 4;
        for (idx, (a, b)) in state.amplitudes().iter().zip(&before).enumerate() {
            if (m..m + 4).contains(&idx) {
                assert_eq!(*a, -*b);
            } else {
                assert_eq!(*a, *b);
            }
        }
        state.apply_oracle();
        assert_eq!(state.amplitudes(), &before[..]);
    }

    #[test]
    fn coin_formula_and_fixed_point() {
        let lat = lattice(1);
        let mut state = WalkState::uniform(&lat);
        // put (1, 0, 0, 0) on an unmarked vertex, zero elsewhere
        for a in state.amplitudes_mut() {
            *a = Complex64::default();
        }
        let v = 3;
        assert_ne!(v, lat.marked());
        state.amplitudes_mut()[v * 4] = Complex64::new(1.0, 0.0);
        state.apply_coin();
        let c = &state.amplitudes()[v * 4..v * 4 + 4];
        assert!((c[0].re + 0.5).abs() < 1e-15);
        for l in 1..4 {
            assert!((c[l].re - 0.5).abs() < 1e-15);
        }
        // uniform coin vector is a fixed point
        let mut uniform = WalkState::uniform(&lat);
        let before = uniform.amplitudes().to_vec();
        uniform.apply_coin();
        assert!(max_diff(uniform.amplitudes(), &before) < 1e-15);
    }

    #[test]
    fn involutions_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for level in 0..=3 {
            let lat = lattice(level);
            for _ in 0..20 {
                let mut state = random_unit_state(&lat, &mut rng);
                let before = state.amplitudes().to_vec();
                state.apply_oracle();
                state.apply_oracle();
                assert!(max_diff(state.amplitudes(), &before) < 1e-12);
                state.apply_coin();
                state.apply_coin();
                assert!(max_diff(state.amplitudes(), &before) < 1e-12);
                state.apply_shift();
                state.apply_shift();
                assert!(max_diff(state.amplitudes(), &before) < 1e-12);
            }
        }
    }

    #[test]
    fn shift_moves_and_reverses() {
        let lat = lattice(1);
        let mut state = WalkState::uniform(&lat);
        for a in state.amplitudes_mut() {
            *a = Complex64::default();
        }
        let origin = lat.index_of(crate::lattice::CellCoord::new(0, 0)).unwrap();
        // +x slot at the origin moves to (1,0) with slot -x
        state.amplitudes_mut()[origin * 4] = Complex64::new(1.0, 0.0);
        state.apply_shift();
        let target = lat.index_of(crate::lattice::CellCoord::new(1, 0)).unwrap();
        assert_eq!(state.amplitudes()[target * 4 + 1], Complex64::new(1.0, 0.0));
        assert_eq!(state.amplitudes()[origin * 4], Complex64::default());

        // -x at the origin is blocked: stays put, label unchanged
        for a in state.amplitudes_mut() {
            *a = Complex64::default();
        }
        state.amplitudes_mut()[origin * 4 + 1] = Complex64::new(1.0, 0.0);
        state.apply_shift();
        assert_eq!(state.amplitudes()[origin * 4 + 1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn step_preserves_norm() {
        let lat = lattice(2);
        let mut state = WalkState::uniform(&lat);
        state.search_step();
        assert!((state.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn walk_without_oracle_fixes_uniform_state() {
        // G fixes uniform coins and S permutes the uniform state to itself
        let lat = lattice(2);
        let mut state = WalkState::uniform(&lat);
        let before = state.amplitudes().to_vec();
        let marked_coin = before[lat.marked() * 4..lat.marked() * 4 + 4].to_vec();
        state.apply_coin();
        // undo the marked-vertex exception by hand so G acts everywhere
        let m = lat.marked() * 4;
        let half_sum = (marked_coin[0] + marked_coin[1] + marked_coin[2] + marked_coin[3]) * 0.5;
        for (l, a) in state.amplitudes_mut()[m..m + 4].iter_mut().enumerate() {
            *a = half_sum - marked_coin[l];
        }
        state.apply_shift();
        assert!(max_diff(state.amplitudes(), &before) < 1e-14);
    }

    #[test]
    fn evolve_records_initial_probability() {
        let lat = lattice(1);
        let run = evolve(&lat, &SearchConfig::new(16)).unwrap();
        assert_eq!(run.series.len(), 17);
        assert!((run.series.values()[0] - 1.0 / 8.0).abs() < 1e-15);
        for &p in run.series.values() {
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn evolve_is_deterministic() {
        let lat = lattice(2);
        let a = evolve(&lat, &SearchConfig::new(64)).unwrap();
        let b = evolve(&lat, &SearchConfig::new(64)).unwrap();
        assert_eq!(a.series.to_csv(), b.series.to_csv());
    }

    #[test]
    fn distribution_sums_to_one() {
        let lat = lattice(2);
        let mut state = WalkState::uniform(&lat);
        for p in state.probability_distribution() {
            assert!((p - 1.0 / 64.0).abs() < 1e-15);
        }
        for _ in 0..50 {
            state.search_step();
        }
        let total: f64 = state.probability_distribution().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
