//! Brute-force oracle on a truncated multimode Fock space.
//!
//! Validates the coupled-mode machinery against the full bosonic
//! Hamiltonian: the single-excitation block reproduces the coupling
//! matrix entrywise, and coherent-regime observables check the
//! closed-form qubit fidelity and photon number. The Hamiltonian
//! conserves total occupation even after per-mode truncation, so
//! evolution happens block by block via dense eigensolves of the
//! occupation sectors the initial state actually reaches.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cscq::Cscq;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, Eigen, SymMatrix};
use crate::network::{build_coupling_matrix, NetworkConfig};

/// Default cap on the truncated Hilbert-space dimension.
pub const DEFAULT_DIM_LIMIT: u64 = 1_000_000;

/// Largest coherent-state tail weight tolerated when truncating.
/// At alpha = 0.5 and cutoff 3 the Poisson tail is 1.33e-4, so the limit
/// sits an order of magnitude above that reference working point.
pub const TRUNCATION_LIMIT: f64 = 1e-3;

/// Truncated product Fock space over the 3N+3 modes.
///
/// Basis index is lexicographic over per-mode occupations in mode order,
/// mode 0 most significant: index = sum_x n_x (cutoff+1)^(n_modes-1-x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    pub n_modes: usize,
    pub cutoff: usize,
    pub dim: usize,
}

impl FockSpace {
    pub fn new(n_modes: usize, cutoff: usize, dim_limit: u64) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::InvalidConfig("Fock cutoff must be >= 1".into()));
        }
        let base = (cutoff + 1) as u64;
        let mut dim: u64 = 1;
        for _ in 0..n_modes {
            dim = dim.checked_mul(base).unwrap_or(u64::MAX);
            if dim > dim_limit {
                return Err(Error::DimensionGuard { dim, limit: dim_limit });
            }
        }
        Ok(FockSpace { n_modes, cutoff, dim: dim as usize })
    }

    /// Stride of mode `x` in the basis index.
    #[inline]
    pub fn stride(&self, x: usize) -> usize {
        (self.cutoff + 1).pow((self.n_modes - 1 - x) as u32)
    }

    #[inline]
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % (self.cutoff + 1)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.n_modes).map(|x| self.occupation(index, x)).collect()
    }

    pub fn index(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .enumerate()
            .map(|(x, &n)| n * self.stride(x))
            .sum()
    }

    #[inline]
    pub fn total_occupation(&self, index: usize) -> usize {
        let mut rem = index;
        let base = self.cutoff + 1;
        let mut total = 0;
        while rem > 0 {
            total += rem % base;
            rem /= base;
        }
        total
    }
}

/// Sparse (CSR) real symmetric Hamiltonian on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct FockHamiltonian {
    pub space: FockSpace,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl FockHamiltonian {
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[span.clone()], &self.vals[span])
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

/// Second-quantize the coupling matrix on the truncated space.
///
/// Diagonal and off-diagonal entries are read from the same
/// `build_coupling_matrix` output that drives the mode-space dynamics,
/// so the single-excitation block equals it entrywise by construction.
pub fn build_fock_hamiltonian(
    config: &NetworkConfig,
    cutoff: usize,
    dim_limit: u64,
) -> Result<FockHamiltonian> {
    let m = build_coupling_matrix(config)?;
    let n_modes = m.dim();
    let space = FockSpace::new(n_modes, cutoff, dim_limit)?;

    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for x in 0..n_modes {
        for y in (x + 1)..n_modes {
            let s = m.entry(x, y);
            if s != 0.0 {
                pairs.push((x, y, s));
            }
        }
    }
    let diag: Vec<f64> = (0..n_modes).map(|x| m.entry(x, x)).collect();

    let mut row_ptr = Vec::with_capacity(space.dim + 1);
    let mut cols: Vec<u32> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    row_ptr.push(0);

    let mut occ = vec![0usize; n_modes];
    for idx in 0..space.dim {
        for (x, slot) in occ.iter_mut().enumerate() {
            *slot = space.occupation(idx, x);
        }
        let d: f64 = occ.iter().zip(&diag).map(|(&n, &w)| n as f64 * w).sum();
        if d != 0.0 {
            cols.push(idx as u32);
            vals.push(d);
        }
        // s (a_x^dag a_y + a_y^dag a_x): hop one excitation between x and y.
        for &(x, y, s) in &pairs {
            if occ[y] > 0 && occ[x] < space.cutoff {
                let j = idx + space.stride(x) - space.stride(y);
                cols.push(j as u32);
                vals.push(s * libm::sqrt((occ[y] * (occ[x] + 1)) as f64));
            }
            if occ[x] > 0 && occ[y] < space.cutoff {
                let j = idx + space.stride(y) - space.stride(x);
                cols.push(j as u32);
                vals.push(s * libm::sqrt((occ[x] * (occ[y] + 1)) as f64));
            }
        }
        row_ptr.push(cols.len());
    }

    Ok(FockHamiltonian { space, row_ptr, cols, vals })
}

/// State vector over the truncated Fock basis.
#[derive(Debug, Clone)]
pub struct FockState {
    pub amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

struct Block {
    indices: Vec<usize>,
    eigen: Eigen,
    /// Initial state projected onto the block eigenbasis.
    coefficients: Vec<Complex64>,
}

/// Eigensolved occupation sectors reachable from one initial state;
/// reusable across evolution times.
pub struct BlockPropagator {
    dim: usize,
    blocks: Vec<Block>,
}

impl BlockPropagator {
    pub fn new(h: &FockHamiltonian, psi0: &FockState) -> Self {
        let space = &h.space;
        let max_total = space.n_modes * space.cutoff;
        let mut present = vec![false; max_total + 1];
        for (idx, amp) in psi0.amplitudes.iter().enumerate() {
            if amp.norm_sqr() > 0.0 {
                present[space.total_occupation(idx)] = true;
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); max_total + 1];
        for idx in 0..space.dim {
            let t = space.total_occupation(idx);
            if present[t] {
                members[t].push(idx);
            }
        }

        let mut blocks = Vec::new();
        for indices in members.into_iter().filter(|m| !m.is_empty()) {
            let size = indices.len();
            let mut local = vec![-1i64; space.dim];
            for (li, &gi) in indices.iter().enumerate() {
                local[gi] = li as i64;
            }
            let mut dense = SymMatrix::zeros(size);
            for (li, &gi) in indices.iter().enumerate() {
                let (cols, vals) = h.row(gi);
                for (&c, &v) in cols.iter().zip(vals) {
                    let lj = local[c as usize];
                    debug_assert!(lj >= 0, "Hamiltonian left an occupation sector");
                    if lj >= li as i64 {
                        dense.set(li, lj as usize, v);
                    }
                }
            }
            let eigen = sym_eigen(&dense);
            // coefficients[k] = <v_k | psi0_block>
            let mut coefficients = vec![Complex64::new(0.0, 0.0); size];
            for (li, &gi) in indices.iter().enumerate() {
                let amp = psi0.amplitudes[gi];
                if amp != Complex64::new(0.0, 0.0) {
                    for (k, c) in coefficients.iter_mut().enumerate() {
                        *c += eigen.vector_component(li, k) * amp;
                    }
                }
            }
            blocks.push(Block { indices, eigen, coefficients });
        }
        BlockPropagator { dim: space.dim, blocks }
    }

    pub fn evolve(&self, t: f64) -> FockState {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.dim];
        for block in &self.blocks {
            let size = block.indices.len();
            let rotated: Vec<Complex64> = (0..size)
                .map(|k| {
                    block.coefficients[k]
                        * Complex64::new(0.0, -block.eigen.values[k] * t).exp()
                })
                .collect();
            for (li, &gi) in block.indices.iter().enumerate() {
                let mut s = Complex64::new(0.0, 0.0);
                for (k, &r) in rotated.iter().enumerate() {
                    s += block.eigen.vector_component(li, k) * r;
                }
                amplitudes[gi] = s;
            }
        }
        FockState { amplitudes }
    }
}

/// One-shot evolution; use `BlockPropagator` directly to reuse the
/// eigensolves across times.
pub fn evolve_state(h: &FockHamiltonian, psi0: &FockState, t: f64) -> Result<FockState> {
    if !(t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    Ok(BlockPropagator::new(h, psi0).evolve(t))
}

/// Poisson tail weight discarded by truncating |alpha> at `cutoff`.
pub fn coherent_truncation_weight(alpha: Complex64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    let mut term = libm::exp(-x);
    let mut kept = term;
    for n in 1..=cutoff {
        term *= x / n as f64;
        kept += term;
    }
    (1.0 - kept).max(0.0)
}

/// Smallest per-mode cutoff whose Poisson tail for `alpha` stays below
/// `tail_limit`. Coherent-regime oracle runs pick their cutoff with this
/// so the truncation error is negligible against the tolerance being
/// checked (e.g. `tail_limit = 1e-5` gives cutoff 4 for |alpha| = 0.5).
pub fn select_cutoff(alpha: Complex64, tail_limit: f64) -> usize {
    let mut cutoff = 0;
    while coherent_truncation_weight(alpha, cutoff) >= tail_limit && cutoff < 64 {
        cutoff += 1;
    }
    cutoff
}

fn coherent_coefficients(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut coeffs = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new(libm::exp(-alpha.norm_sqr() / 2.0), 0.0);
    coeffs.push(c);
    for n in 1..=cutoff {
        c = c * alpha / libm::sqrt(n as f64);
        coeffs.push(c);
    }
    coeffs
}

/// Prepare the qubit on one mode (vacuum elsewhere), truncated and
/// renormalized. Returns the state and the per-branch discarded weight.
pub fn prepare_cscq_state(
    q: &Cscq,
    space: &FockSpace,
    mode: usize,
) -> Result<(FockState, f64)> {
    q.normalization()?;
    let weight = coherent_truncation_weight(q.alpha, space.cutoff);
    if weight > TRUNCATION_LIMIT {
        return Err(Error::ExcessiveTruncation { weight, limit: TRUNCATION_LIMIT });
    }
    let plus = coherent_coefficients(q.alpha, space.cutoff);
    let minus = coherent_coefficients(-q.alpha, space.cutoff);
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dim];
    let stride = space.stride(mode);
    for n in 0..=space.cutoff {
        amplitudes[n * stride] = q.mu * plus[n] + q.nu * minus[n];
    }
    let mut state = FockState { amplitudes };
    let norm = state.norm();
    if norm <= 0.0 {
        return Err(Error::DegenerateQubit { normalization: 0.0 });
    }
    for a in &mut state.amplitudes {
        *a /= norm;
    }
    Ok((state, weight))
}

/// |<target|psi>|^2 against the qubit prepared on `target` with its
/// coherent amplitude multiplied by `phase` (unit modulus; 1 for the
/// strict convention).
pub fn state_fidelity(
    psi: &FockState,
    q: &Cscq,
    space: &FockSpace,
    target: usize,
    phase: Complex64,
) -> Result<f64> {
    let rotated = Cscq::new(q.mu, q.nu, q.alpha * phase);
    let (target_state, _) = prepare_cscq_state(&rotated, space, target)?;
    Ok(target_state.inner(psi).norm_sqr().clamp(0.0, 1.0))
}

/// Number-operator expectation summed over the given modes.
pub fn occupation_expectation(psi: &FockState, space: &FockSpace, modes: &[usize]) -> f64 {
    psi.amplitudes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(idx, a)| {
            let n: usize = modes.iter().map(|&x| space.occupation(idx, x)).sum();
            n as f64 * a.norm_sqr()
        })
        .sum()
}

/// Mean photon number: occupation expectation over the N+2 field modes.
pub fn mean_photons(psi: &FockState, space: &FockSpace, n_receivers: usize) -> f64 {
    occupation_expectation(psi, space, &crate::network::field_ordinals(n_receivers))
}

/// Total excitation expectation over every mode.
pub fn total_excitations(psi: &FockState, space: &FockSpace) -> f64 {
    psi.amplitudes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(idx, a)| space.total_occupation(idx) as f64 * a.norm_sqr())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ModeIndex, TernarySetParams};
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn config(n: usize, active: usize) -> NetworkConfig {
        let all = [
            TernarySetParams { g: 60.0, delta: 500.0 },
            TernarySetParams { g: 61.0, delta: 600.0 },
            TernarySetParams { g: 62.0, delta: 700.0 },
            TernarySetParams { g: 63.0, delta: 800.0 },
        ];
        NetworkConfig::new(n, all[..n].to_vec(), active)
    }

    #[test]
    fn space_dimensions_and_bijection() {
        let space = FockSpace::new(9, 2, DEFAULT_DIM_LIMIT).unwrap();
        assert_eq!(space.dim, 19683); // 3^9
        for idx in [0usize, 1, 100, 19682] {
            let occ = space.occupations(idx);
            assert_eq!(space.index(&occ), idx);
        }
        assert!(matches!(
            FockSpace::new(9, 9, DEFAULT_DIM_LIMIT),
            Err(Error::DimensionGuard { .. })
        ));
    }

    #[test]
    fn vacuum_is_stationary() {
        let h = build_fock_hamiltonian(&config(1, 1), 2, DEFAULT_DIM_LIMIT).unwrap();
        let mut amplitudes = vec![c(0.0, 0.0); h.space.dim];
        amplitudes[0] = c(1.0, 0.0);
        let psi0 = FockState { amplitudes };
        let psi = evolve_state(&h, &psi0, 3.7).unwrap();
        assert!((psi.amplitudes[0] - 1.0).norm() < 1e-12);
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_excitation_block_equals_coupling_matrix() {
        let cfg = config(2, 1);
        let m = build_coupling_matrix(&cfg).unwrap();
        let h = build_fock_hamiltonian(&cfg, 2, DEFAULT_DIM_LIMIT).unwrap();
        let space = &h.space;
        let n_modes = m.dim();
        // Basis state with a single excitation in mode x.
        let single = |x: usize| space.stride(x);
        for x in 0..n_modes {
            let (cols, vals) = h.row(single(x));
            for y in 0..n_modes {
                let expect = m.entry(x, y);
                let got = cols
                    .iter()
                    .zip(vals)
                    .find(|(&col, _)| col as usize == single(y))
                    .map(|(_, &v)| v)
                    .unwrap_or(0.0);
                assert_eq!(got, expect, "block entry ({x}, {y})");
            }
        }
    }

    #[test]
    fn single_excitation_populations_match_mode_dynamics() {
        let cfg = config(2, 1);
        let m = build_coupling_matrix(&cfg).unwrap();
        let spectral = crate::dynamics::SpectralPropagator::new(&m);
        let h = build_fock_hamiltonian(&cfg, 2, DEFAULT_DIM_LIMIT).unwrap();
        let space = h.space.clone();
        let se = ModeIndex::SenderExciton.ordinal(2).unwrap();
        let mut amplitudes = vec![c(0.0, 0.0); space.dim];
        amplitudes[space.stride(se)] = c(1.0, 0.0);
        let prop = BlockPropagator::new(&h, &FockState { amplitudes });
        for i in 0..10 {
            let t = 0.9 * i as f64;
            let psi = prop.evolve(t);
            let row = spectral.transfer_row(t, se).unwrap();
            for x in 0..m.dim() {
                let pop = occupation_expectation(&psi, &space, &[x]);
                assert!(
                    (pop - row.population(x)).abs() < 1e-8,
                    "t = {t}, mode {x}: {pop} vs {}",
                    row.population(x)
                );
            }
        }
    }

    #[test]
    fn truncation_weight_matches_poisson_tail() {
        // alpha = 0.5, cutoff 3: 1 - e^{-1/4}(1 + 1/4 + 1/32 + 1/384)
        let weight = coherent_truncation_weight(c(0.5, 0.0), 3);
        let a2 = 0.25_f64;
        let expect = 1.0
            - libm::exp(-a2) * (1.0 + a2 + a2 * a2 / 2.0 + a2 * a2 * a2 / 6.0);
        assert!((weight - expect).abs() < 1e-15);
        assert!(weight < 2e-4);
    }

    #[test]
    fn cutoff_selection_tracks_tail_limit() {
        // |alpha| = 0.5: tail beyond 3 is ~1.3e-4, beyond 4 is ~6e-6.
        assert_eq!(select_cutoff(c(0.5, 0.0), 1e-3), 3);
        assert_eq!(select_cutoff(c(0.5, 0.0), 1e-5), 4);
        assert_eq!(select_cutoff(c(0.0, 0.0), 1e-5), 0);
        let cut = select_cutoff(c(1.0, 0.0), 1e-5);
        assert!(coherent_truncation_weight(c(1.0, 0.0), cut) < 1e-5);
        assert!(coherent_truncation_weight(c(1.0, 0.0), cut - 1) >= 1e-5);
    }

    #[test]
    fn prepare_examples() {
        let space = FockSpace::new(6, 3, DEFAULT_DIM_LIMIT).unwrap();
        // alpha = 0: exact multimode vacuum.
        let q = Cscq::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let (psi, weight) = prepare_cscq_state(&q, &space, 1).unwrap();
        assert_eq!(weight, 0.0);
        assert!((psi.amplitudes[0] - 1.0).norm() < 1e-15);
        // Degenerate qubit rejected.
        let q = Cscq::new(c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            prepare_cscq_state(&q, &space, 1),
            Err(Error::DegenerateQubit { .. })
        ));
        // Excessive truncation rejected.
        let q = Cscq::new(c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0));
        assert!(matches!(
            prepare_cscq_state(&q, &space, 1),
            Err(Error::ExcessiveTruncation { .. })
        ));
    }

    #[test]
    fn fidelity_of_prepared_state_with_itself() {
        let space = FockSpace::new(6, 3, DEFAULT_DIM_LIMIT).unwrap();
        let q = Cscq::new(c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0));
        let (psi, _) = prepare_cscq_state(&q, &space, 4).unwrap();
        let f = state_fidelity(&psi, &q, &space, 4, c(1.0, 0.0)).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_state_has_zero_fidelity() {
        let space = FockSpace::new(6, 2, DEFAULT_DIM_LIMIT).unwrap();
        // Single photon in the channel field vs a vacuum qubit target.
        let mut amplitudes = vec![c(0.0, 0.0); space.dim];
        amplitudes[space.stride(2)] = c(1.0, 0.0);
        let psi = FockState { amplitudes };
        let q = Cscq::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let f = state_fidelity(&psi, &q, &space, 1, c(1.0, 0.0)).unwrap();
        assert!(f < 1e-15);
    }

    #[test]
    fn mean_photons_counts_field_modes_only() {
        let space = FockSpace::new(9, 2, DEFAULT_DIM_LIMIT).unwrap();
        let mut amplitudes = vec![c(0.0, 0.0); space.dim];
        amplitudes[space.stride(2)] = c(1.0, 0.0); // channel field photon
        let psi = FockState { amplitudes };
        assert!((mean_photons(&psi, &space, 2) - 1.0).abs() < 1e-15);
        let mut amplitudes = vec![c(0.0, 0.0); space.dim];
        amplitudes[space.stride(1)] = c(1.0, 0.0); // sender exciton
        let psi = FockState { amplitudes };
        assert_eq!(mean_photons(&psi, &space, 2), 0.0);
        assert_eq!(mean_photons(&FockState { amplitudes: {
            let mut a = vec![c(0.0, 0.0); space.dim];
            a[0] = c(1.0, 0.0);
            a
        } }, &space, 2), 0.0);
    }

    #[test]
    fn coherent_evolution_conserves_norm_and_excitations() {
        let cfg = config(1, 1);
        let h = build_fock_hamiltonian(&cfg, 3, DEFAULT_DIM_LIMIT).unwrap();
        let space = h.space.clone();
        let q = Cscq::new(c(1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0));
        let (psi0, _) = prepare_cscq_state(&q, &space, 1).unwrap();
        let n0 = total_excitations(&psi0, &space);
        let prop = BlockPropagator::new(&h, &psi0);
        for i in 1..6 {
            let psi = prop.evolve(2.0 * i as f64);
            assert!((psi.norm() - 1.0).abs() < 1e-8);
            assert!((total_excitations(&psi, &space) - n0).abs() < 1e-6);
        }
    }
}
