//! Ergotropy, passive states and spectral analysis of trajectories.
//!
//! The minimum of `Tr(UρU†H)` over unitaries pairs the eigenvalues of ρ in
//! descending order with the energies of `H` in ascending order. Ties among
//! degenerate energies do not matter: only the multiset pairing enters.

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inner, ComplexMatrix, HermitianEig};
use crate::model::DensityMatrix;

/// Default ergotropy level (units of J) above which a trajectory counts as activated.
pub const ACTIVATION_THRESHOLD: f64 = 1e-6;

/// Negative ergotropy within this of zero is rounding and is clipped.
pub const CLIP_TOL: f64 = 1e-10;

/// Gaps smaller than this are treated as degenerate when looking for
/// eigenvalue crossings.
pub const CROSSING_GAP_TOL: f64 = 1e-10;

/// Crossings between eigenvalues below this level barely move the passive
/// energy; analyses of visible effects filter them out.
pub const VISIBLE_CROSSING_LEVEL: f64 = 1e-2;

/// |ΔE| at or below this carries no sign when looking for ergotropy crossings.
pub const DIFFERENCE_NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ErgotropyRecord {
    pub time: f64,
    /// Tr(ρH)
    pub energy: f64,
    pub passive_energy: f64,
    pub ergotropy: f64,
    /// Eigenvalues of ρ, descending.
    pub rho_spectrum: Vec<f64>,
}

/// Eigendecomposition of a Hamiltonian reused across many states.
#[derive(Debug, Clone)]
pub struct EnergyBasis {
    h: ComplexMatrix,
    eig: HermitianEig,
}

impl EnergyBasis {
    pub fn new(h_matrix: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            h: h_matrix.clone(),
            eig: hermitian_eig(h_matrix)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// Energies ascending.
    pub fn energies(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.h
    }

    fn check(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} state", self.dim()),
                found: format!("{0}x{0}", rho.dim()),
            });
        }
        Ok(())
    }

    pub fn record(&self, rho: &DensityMatrix, time: f64) -> Result<ErgotropyRecord> {
        self.check(rho)?;
        let energy = rho.expectation(&self.h).re;
        let mut spectrum = rho.eigenvalues();
        spectrum.reverse();
        let passive_energy: f64 = spectrum
            .iter()
            .zip(self.energies())
            .map(|(r, e)| r * e)
            .sum();
        let mut ergotropy = energy - passive_energy;
        if ergotropy < 0.0 && ergotropy > -CLIP_TOL {
            ergotropy = 0.0;
        }
        Ok(ErgotropyRecord {
            time,
            energy,
            passive_energy,
            ergotropy,
            rho_spectrum: spectrum,
        })
    }

    pub fn passive_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check(rho)?;
        let mut spectrum = rho.eigenvalues();
        spectrum.reverse();
        let n = self.dim();
        let v = &self.eig.eigenvectors;
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * spectrum[k])
                .sum()
        });
        DensityMatrix::new(m.hermitian_part())
    }

    /// ⟨ε_k|ρ|ε_k⟩ for the ascending energy eigenbasis.
    pub fn populations(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.check(rho)?;
        Ok((0..self.dim())
            .map(|k| rho.matrix().expectation(&self.eig.vector(k)).re)
            .collect())
    }

    pub fn series(&self, traj: &Trajectory) -> Result<Vec<ErgotropyRecord>> {
        traj.times
            .iter()
            .zip(&traj.states)
            .map(|(&t, rho)| self.record(rho, t))
            .collect()
    }
}

pub fn ergotropy(rho: &DensityMatrix, h_matrix: &ComplexMatrix) -> Result<ErgotropyRecord> {
    EnergyBasis::new(h_matrix)?.record(rho, 0.0)
}

pub fn passive_state(rho: &DensityMatrix, h_matrix: &ComplexMatrix) -> Result<DensityMatrix> {
    EnergyBasis::new(h_matrix)?.passive_state(rho)
}

pub fn ergotropy_series(traj: &Trajectory, h_matrix: &ComplexMatrix) -> Result<Vec<ErgotropyRecord>> {
    EnergyBasis::new(h_matrix)?.series(traj)
}

/// First time the ergotropy exceeds `threshold`, linearly interpolated
/// against the previous grid point.
pub fn activation_time_from_records(records: &[ErgotropyRecord], threshold: f64) -> Option<f64> {
    let k = records.iter().position(|r| r.ergotropy > threshold)?;
    if k == 0 {
        return Some(records[0].time);
    }
    let (a, b) = (&records[k - 1], &records[k]);
    let frac = (threshold - a.ergotropy) / (b.ergotropy - a.ergotropy);
    Some(a.time + frac.clamp(0.0, 1.0) * (b.time - a.time))
}

pub fn activation_time(
    traj: &Trajectory,
    h_matrix: &ComplexMatrix,
    threshold: f64,
) -> Result<Option<f64>> {
    Ok(activation_time_from_records(
        &ergotropy_series(traj, h_matrix)?,
        threshold,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgotropyDifference {
    pub times: Vec<f64>,
    /// E_a(t) − E_b(t)
    pub delta: Vec<f64>,
    /// Times where ΔE changes sign, linearly interpolated.
    pub crossings: Vec<f64>,
}

/// Sign-change times of a sampled series, ignoring values within `floor` of zero.
pub fn sign_changes(times: &[f64], values: &[f64], floor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&t, &v) in times.iter().zip(values) {
        if v.abs() <= floor {
            continue;
        }
        if let Some((t0, v0)) = last {
            if v0.signum() != v.signum() {
                out.push(t0 + (t - t0) * v0 / (v0 - v));
            }
        }
        last = Some((t, v));
    }
    out
}

pub fn ergotropy_difference_from_records(
    a: &[ErgotropyRecord],
    b: &[ErgotropyRecord],
) -> Result<ErgotropyDifference> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.time != y.time) {
        return Err(Error::GridMismatch);
    }
    let times: Vec<f64> = a.iter().map(|r| r.time).collect();
    let delta: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.ergotropy - y.ergotropy).collect();
    let crossings = sign_changes(&times, &delta, DIFFERENCE_NOISE_FLOOR);
    Ok(ErgotropyDifference {
        times,
        delta,
        crossings,
    })
}

pub fn ergotropy_difference(
    traj_a: &Trajectory,
    traj_b: &Trajectory,
    h_matrix: &ComplexMatrix,
) -> Result<ErgotropyDifference> {
    if traj_a.times != traj_b.times {
        return Err(Error::GridMismatch);
    }
    let basis = EnergyBasis::new(h_matrix)?;
    ergotropy_difference_from_records(&basis.series(traj_a)?, &basis.series(traj_b)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCrossing {
    pub time: f64,
    /// Branch labels (index in the ascending spectrum at t = 0), smaller first.
    pub branches: (usize, usize),
    /// Interpolated common eigenvalue at the crossing.
    pub level: f64,
}

/// Crossings of overlap-tracked eigenvalue branches of ρ(t).
///
/// Branches are labelled by their ascending position at the first grid time
/// and followed by maximal eigenvector overlap between consecutive steps. A
/// crossing is an order swap of two branches whose gap exceeds
/// `CROSSING_GAP_TOL` on both sides of the step.
pub fn eigenvalue_crossings(traj: &Trajectory) -> Result<Vec<EigenCrossing>> {
    let Some(first) = traj.states.first() else {
        return Ok(Vec::new());
    };
    let n = first.dim();
    let mut prev = hermitian_eig(first.matrix())?;
    // branch_of[k]: branch label carried by eigenpair k of `prev`.
    let mut branch_of: Vec<usize> = (0..n).collect();
    let mut prev_values = prev.eigenvalues.clone();
    let mut crossings = Vec::new();

    for step in 1..traj.len() {
        let cur = hermitian_eig(traj.states[step].matrix())?;
        let prev_vecs: Vec<_> = (0..n).map(|k| prev.vector(k)).collect();
        let cur_vecs: Vec<_> = (0..n).map(|k| cur.vector(k)).collect();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
        for (a, pv) in prev_vecs.iter().enumerate() {
            for (b, cv) in cur_vecs.iter().enumerate() {
                pairs.push((inner(pv, cv).norm_sqr(), a, b));
            }
        }
        pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
        let mut next_branch = vec![usize::MAX; n];
        let mut used_prev = vec![false; n];
        for (_, a, b) in pairs {
            if used_prev[a] || next_branch[b] != usize::MAX {
                continue;
            }
            used_prev[a] = true;
            next_branch[b] = branch_of[a];
        }

        let mut old = vec![0.0; n];
        let mut new = vec![0.0; n];
        for k in 0..n {
            old[branch_of[k]] = prev_values[k];
            new[next_branch[k]] = cur.eigenvalues[k];
        }
        let (t0, t1) = (traj.times[step - 1], traj.times[step]);
        for i in 0..n {
            for j in i + 1..n {
                let g0 = old[i] - old[j];
                let g1 = new[i] - new[j];
                if g0.abs() > CROSSING_GAP_TOL
                    && g1.abs() > CROSSING_GAP_TOL
                    && g0.signum() != g1.signum()
                {
                    let frac = g0 / (g0 - g1);
                    crossings.push(EigenCrossing {
                        time: t0 + (t1 - t0) * frac,
                        branches: (i, j),
                        level: old[i] + frac * (new[i] - old[i]),
                    });
                }
            }
        }
        prev_values = cur.eigenvalues.clone();
        branch_of = next_branch;
        prev = cur;
    }
    crossings.sort_by(|a, b| a.time.total_cmp(&b.time));
    Ok(crossings)
}

/// Crossings whose common eigenvalue is at least `min_level`.
pub fn crossings_above(crossings: &[EigenCrossing], min_level: f64) -> Vec<EigenCrossing> {
    crossings.iter().copied().filter(|c| c.level >= min_level).collect()
}

/// Row `t` holds the populations of the ascending energy levels at time `t`.
pub fn energy_basis_populations(
    traj: &Trajectory,
    h_matrix: &ComplexMatrix,
) -> Result<Vec<Vec<f64>>> {
    let basis = EnergyBasis::new(h_matrix)?;
    traj.states.iter().map(|rho| basis.populations(rho)).collect()
}
