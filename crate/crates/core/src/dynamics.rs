//! Propagation `ρ(t) = e^{Lt} ρ(0)` on a uniform output grid.

use crate::channels::{ChannelSpec, Liouvillian};
use crate::error::{invalid, Error, Result};
use crate::linalg::{expm, ComplexMatrix, C64};
use crate::model::{DensityMatrix, ModelSpec, StateDeviation, StateTolerance};

/// Uniform output grid `t_k = k·dt`, `k = 0..=t_max/dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", dt, "must be positive"));
        }
        if dt > 1.0 {
            return Err(invalid("dt", dt, "output step must not exceed 1"));
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(invalid("t_max", t_max, "must be finite and non-negative"));
        }
        let ratio = t_max / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(invalid("t_max", t_max, "must be an integer multiple of dt"));
        }
        Ok(Self {
            t_max,
            dt,
            steps: steps as usize,
        })
    }

    /// Grid with a step size not exceeding `dt_max` that ends exactly at `t_max`.
    pub fn covering(t_max: f64, dt_max: f64) -> Result<Self> {
        let steps = (t_max / dt_max).ceil().max(1.0);
        Self::new(t_max, t_max / steps)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of steps; the grid has `steps + 1` points.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.time(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMeta {
    pub model: ModelSpec,
    pub channel: ChannelSpec,
}

/// States on a time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub metadata: Option<TrajectoryMeta>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn with_metadata(mut self, model: ModelSpec, channel: ChannelSpec) -> Self {
        self.metadata = Some(TrajectoryMeta { model, channel });
        self
    }

    /// Worst trace/Hermiticity/positivity deviation over all stored states.
    pub fn worst_deviation(&self) -> StateDeviation {
        self.states
            .iter()
            .map(DensityMatrix::deviation)
            .fold(StateDeviation::default(), StateDeviation::worst)
    }

    /// Largest elementwise difference between corresponding states.
    pub fn max_abs_diff(&self, other: &Trajectory) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.matrix().max_abs_diff(b.matrix()))
            .fold(0.0, f64::max))
    }
}

fn check_dims(liou: &Liouvillian, rho0: &DensityMatrix) -> Result<()> {
    if liou.dim_state() != rho0.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0} state", liou.dim_state()),
            found: format!("{0}x{0}", rho0.dim()),
        });
    }
    Ok(())
}

fn store(v: &[C64], dim: usize, step: usize) -> Result<DensityMatrix> {
    let m = ComplexMatrix::unvec_columns(v, dim)?.hermitian_part();
    DensityMatrix::with_tolerance(m, &StateTolerance::PROPAGATION, step)
}

/// Propagates with the exact one-step propagator `P = e^{L·dt}`.
///
/// Each stored state is re-symmetrized; positivity is only monitored.
pub fn propagate(liou: &Liouvillian, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<Trajectory> {
    check_dims(liou, rho0)?;
    let step = expm(&liou.matrix().scale_real(grid.dt()));
    let d = rho0.dim();
    let mut v = rho0.matrix().vec_columns();
    let mut states = Vec::with_capacity(grid.steps() + 1);
    states.push(rho0.clone());
    for k in 1..=grid.steps() {
        v = step.matvec(&v);
        let rho = store(&v, d, k)?;
        v = rho.matrix().vec_columns();
        states.push(rho);
    }
    Ok(Trajectory {
        times: grid.times(),
        states,
        metadata: None,
    })
}

/// Single state `e^{L t} ρ(0)`, without intermediate output.
pub fn propagate_to(liou: &Liouvillian, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_dims(liou, rho0)?;
    let p = expm(&liou.matrix().scale_real(t));
    store(&p.matvec(&rho0.matrix().vec_columns()), rho0.dim(), 1)
}

/// Classical RK4 with `substeps` internal steps per output step.
pub fn propagate_rk4(
    liou: &Liouvillian,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    substeps: usize,
) -> Result<Trajectory> {
    check_dims(liou, rho0)?;
    if substeps == 0 {
        return Err(invalid("substeps", 0.0, "must be at least 1"));
    }
    let l = liou.matrix();
    let h = grid.dt() / substeps as f64;
    let d = rho0.dim();
    let axpy = |x: &[C64], a: f64, y: &[C64]| -> Vec<C64> {
        x.iter().zip(y).map(|(xi, yi)| xi + yi * a).collect()
    };
    let mut v = rho0.matrix().vec_columns();
    let mut states = Vec::with_capacity(grid.steps() + 1);
    states.push(rho0.clone());
    for k in 1..=grid.steps() {
        for _ in 0..substeps {
            let k1 = l.matvec(&v);
            let k2 = l.matvec(&axpy(&v, h / 2.0, &k1));
            let k3 = l.matvec(&axpy(&v, h / 2.0, &k2));
            let k4 = l.matvec(&axpy(&v, h, &k3));
            for i in 0..v.len() {
                v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        let rho = store(&v, d, k)?;
        v = rho.matrix().vec_columns();
        states.push(rho);
    }
    Ok(Trajectory {
        times: grid.times(),
        states,
        metadata: None,
    })
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub state: DensityMatrix,
    pub converged: bool,
    /// Earliest grid time after which every step change stays below `tol·dt`.
    pub t_settle: f64,
}

/// Declares convergence when `‖ρ_k − ρ_{k−1}‖_F < tol·dt` over the final 10%
/// of the grid.
///
/// # Panics
/// If the trajectory is empty.
pub fn detect_steady(traj: &Trajectory, tol: f64) -> SteadyState {
    let last = traj.last().expect("trajectory must be nonempty").clone();
    let n = traj.len();
    if n == 1 {
        return SteadyState {
            state: last,
            converged: true,
            t_settle: traj.times[0],
        };
    }
    let dt = traj.dt();
    let settled: Vec<bool> = (1..n)
        .map(|k| {
            (traj.states[k].matrix() - traj.states[k - 1].matrix()).frobenius_norm() < tol * dt
        })
        .collect();
    // settled[k-1] refers to the step ending at index k.
    let first_settled = settled
        .iter()
        .rposition(|&s| !s)
        .map_or(0, |bad| bad + 1);
    let tail_start = n - ((n - 1) as f64 * 0.1).ceil().max(1.0) as usize;
    let converged = first_settled <= tail_start;
    SteadyState {
        state: last,
        converged,
        t_settle: traj.times[first_settled],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::build_liouvillian;
    use crate::model::gibbs_state;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(800.0, 0.5).is_ok());
        assert_eq!(TimeGrid::new(800.0, 0.5).unwrap().steps(), 1600);
        assert!(TimeGrid::new(10.0, 0.3).is_err());
        assert!(TimeGrid::new(10.0, 2.0).is_err());
        assert!(TimeGrid::new(10.0, 0.0).is_err());
        assert_eq!(TimeGrid::new(1.0, 0.1).unwrap().steps(), 10);
    }

    #[test]
    fn covering_grid_ends_at_t_max() {
        let g = TimeGrid::covering(2.5, 1.0).unwrap();
        assert_eq!(g.steps(), 3);
        assert!((g.time(g.steps()) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_generator_keeps_state() {
        let rho = DensityMatrix::maximally_mixed(2);
        let mut m = ComplexMatrix::from_real_diag(&[0.7, 0.3]);
        m[(0, 1)] = C64::new(0.1, 0.2);
        m[(1, 0)] = C64::new(0.1, -0.2);
        let rho2 = DensityMatrix::new(m).unwrap();
        let l = Liouvillian::from_matrix(ComplexMatrix::zeros(4, 4), 2).unwrap();
        let grid = TimeGrid::new(5.0, 0.5).unwrap();
        for r in [rho, rho2] {
            let a = propagate(&l, &r, &grid).unwrap();
            let b = propagate_rk4(&l, &r, &grid, 3).unwrap();
            assert!(a.states.iter().all(|s| s.matrix().max_abs_diff(r.matrix()) == 0.0));
            assert!(b.states.iter().all(|s| s.matrix().max_abs_diff(r.matrix()) == 0.0));
        }
    }

    #[test]
    fn rk4_rejects_zero_substeps() {
        let l = Liouvillian::from_matrix(ComplexMatrix::zeros(4, 4), 2).unwrap();
        let grid = TimeGrid::new(1.0, 0.5).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(propagate_rk4(&l, &rho, &grid, 0).is_err());
    }

    #[test]
    fn non_physical_generator_is_reported_with_step() {
        // Pure gain on the trace: violates trace preservation immediately.
        let l = Liouvillian::from_matrix(ComplexMatrix::identity(4), 2).unwrap();
        let grid = TimeGrid::new(1.0, 0.5).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let err = propagate(&l, &rho, &grid).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { step: 1, .. }), "{err}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let l = Liouvillian::from_matrix(ComplexMatrix::zeros(4, 4), 2).unwrap();
        let grid = TimeGrid::new(1.0, 0.5).unwrap();
        assert!(propagate(&l, &DensityMatrix::maximally_mixed(4), &grid).is_err());
    }

    #[test]
    fn gibbs_is_stationary_without_dissipation() {
        let model = ModelSpec::new(2, 0.1).unwrap();
        let h = model.hamiltonian();
        let l = build_liouvillian(&h, &ChannelSpec::closed(), &model).unwrap();
        let rho = gibbs_state(&h, 1.0).unwrap();
        let traj = propagate(&l, &rho, &TimeGrid::new(50.0, 0.5).unwrap()).unwrap();
        let steady = detect_steady(&traj, 1e-8);
        assert!(steady.converged);
        assert_eq!(steady.t_settle, 0.0);
    }

    #[test]
    fn unsettled_trajectory_is_not_converged() {
        let model = ModelSpec::new(1, 0.1).unwrap();
        let h = model.hamiltonian();
        let l = build_liouvillian(&h, &ChannelSpec::dissipation(0.05, 0.0).unwrap(), &model)
            .unwrap();
        let rho = DensityMatrix::basis(2, 0).unwrap();
        let traj = propagate(&l, &rho, &TimeGrid::new(10.0, 0.5).unwrap()).unwrap();
        assert!(!detect_steady(&traj, 1e-8).converged);
    }
}
