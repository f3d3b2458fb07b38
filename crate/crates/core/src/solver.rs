//! Incremental load stepping with full Newton-Raphson equilibrium iterations,
//! and the maximum-allowable-force probe built on top of it.
//!
//! Each increment adds `F_total / n_inc` to the applied load, takes a tangent
//! predictor from the converged state of the previous increment, then corrects
//! with the tangent reassembled at every iterate until the free-DOF residual
//! norm drops to the tolerance.

use log::{debug, trace};
use nalgebra::Cholesky;
use serde::{Deserialize, Serialize};

use crate::assembly::{
    apply_supports, assemble_tangent, solve_linear, update_member_data, ElementStateSet,
    GlobalVector,
};
use crate::error::{MechanicsError, SolverError};
use crate::model::{LoadCase, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub n_inc: usize,
    /// Residual norm threshold (N).
    pub tolerance: f64,
    pub maxiter: usize,
    /// Reports collapse instead of following the iterations past a limit
    /// point: an increment fails when the tangent at any iterate is not
    /// positive definite, or when the corrections travel farther than the
    /// predictor did, which is how a jump to a remote branch shows up.
    pub collapse_check: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_inc: 10,
            tolerance: 1e-3,
            maxiter: 100,
            collapse_check: true,
        }
    }
}

impl SolverConfig {
    pub fn with_increments(n_inc: usize) -> Self {
        Self {
            n_inc,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.n_inc == 0 {
            return Err(SolverError::InvalidConfig(
                "n_inc must be at least 1".into(),
            ));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.maxiter == 0 {
            return Err(SolverError::InvalidConfig(
                "maxiter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Converged (or final attempted) state at the end of one increment.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementRecord {
    /// 1-based increment index.
    pub increment: usize,
    pub displacement: GlobalVector,
    /// External load applied at the end of this increment.
    pub load: GlobalVector,
    pub members: ElementStateSet,
    /// Corrector iterations taken after the predictor.
    pub iterations: usize,
    pub residual_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceCause {
    /// Residual still above tolerance after `maxiter` corrections.
    MaxIterations {
        residual_norm: f64,
    },
    SingularMatrix {
        row: usize,
    },
    /// The tangent stopped being positive definite.
    LostStability,
    /// The iterations converged far from the predicted state.
    SnapThrough,
    DegenerateElement {
        element: usize,
    },
    /// The residual became NaN or infinite.
    NonFinite,
}

impl From<MechanicsError> for DivergenceCause {
    fn from(e: MechanicsError) -> Self {
        match e {
            MechanicsError::SingularMatrix { row, .. } => DivergenceCause::SingularMatrix { row },
            MechanicsError::DegenerateElement { element } => {
                DivergenceCause::DegenerateElement { element }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveStatus {
    Completed,
    DivergedAtIncrement {
        increment: usize,
        cause: DivergenceCause,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Converged increments in order; on divergence, those before the failing one.
    pub increments: Vec<IncrementRecord>,
    pub status: SolveStatus,
}

impl SolveResult {
    pub fn is_completed(&self) -> bool {
        self.status == SolveStatus::Completed
    }

    pub fn final_displacement(&self) -> Option<&GlobalVector> {
        self.increments.last().map(|r| &r.displacement)
    }

    /// Mean corrector iterations per recorded increment.
    pub fn mean_iterations(&self) -> f64 {
        if self.increments.is_empty() {
            return 0.0;
        }
        let total: usize = self.increments.iter().map(|r| r.iterations).sum();
        total as f64 / self.increments.len() as f64
    }
}

/// `R = F_int − F_ext` with constrained entries zeroed, and its Euclidean norm.
pub fn residual(
    f_int: &GlobalVector,
    f_ext: &GlobalVector,
    structure: &Structure,
) -> (GlobalVector, f64) {
    let mut r = f_int - f_ext;
    for &d in structure.constrained_dofs() {
        r[d] = 0.0;
    }
    let norm = r.norm();
    (r, norm)
}

enum Step {
    Converged(IncrementRecord),
    Failed(DivergenceCause),
}

/// Runs the incremental-iterative force-controlled analysis.
pub fn solve(
    structure: &Structure,
    load_case: &LoadCase,
    config: &SolverConfig,
) -> Result<SolveResult, SolverError> {
    config.validate()?;
    let f_total = load_case.f_total();
    if f_total.len() != structure.n_dof() {
        return Err(SolverError::Load(crate::error::ModelError::LoadLength {
            expected: structure.n_dof(),
            actual: f_total.len(),
        }));
    }
    let lambda = 1.0 / config.n_inc as f64;
    let d_f = f_total * lambda;

    let mut u = structure.zero_vector();
    let mut increments = Vec::with_capacity(config.n_inc);
    for n in 1..=config.n_inc {
        // Load at the end of the increment is formed from n directly so the
        // bookkeeping does not accumulate rounding.
        let f_next = f_total * (n as f64 / config.n_inc as f64);
        match increment(structure, &u, &d_f, &f_next, n, config) {
            Step::Converged(record) => {
                debug!(
                    "increment {n}: {} iterations, residual {:.3e}",
                    record.iterations, record.residual_norm
                );
                u = record.displacement.clone();
                increments.push(record);
            }
            Step::Failed(cause) => {
                debug!("increment {n} diverged: {cause:?}");
                return Ok(SolveResult {
                    increments,
                    status: SolveStatus::DivergedAtIncrement {
                        increment: n,
                        cause,
                    },
                });
            }
        }
    }
    Ok(SolveResult {
        increments,
        status: SolveStatus::Completed,
    })
}

fn increment(
    structure: &Structure,
    u_prev: &GlobalVector,
    d_f: &GlobalVector,
    f_next: &GlobalVector,
    n: usize,
    config: &SolverConfig,
) -> Step {
    // None when the stability check rejects the tangent.
    let tangent_solve = |members: &ElementStateSet,
                         rhs: &GlobalVector|
     -> Result<Option<GlobalVector>, MechanicsError> {
        let k_s = apply_supports(assemble_tangent(structure, members), structure);
        let x = solve_linear(&k_s, rhs)?;
        if config.collapse_check && Cholesky::new(k_s).is_none() {
            return Ok(None);
        }
        Ok(Some(x))
    };
    let attempt = || -> Result<Step, MechanicsError> {
        // predictor from the state at the start of the increment
        let (members, _) = update_member_data(structure, u_prev)?;
        let Some(du) = tangent_solve(&members, d_f)? else {
            return Ok(Step::Failed(DivergenceCause::LostStability));
        };
        let base = u_prev + &du;

        let (mut members, f_int) = update_member_data(structure, &base)?;
        let (mut r, mut r_norm) = residual(&f_int, f_next, structure);
        let mut correction = GlobalVector::zeros(structure.n_dof());
        let mut u = base.clone();
        let mut k = 0;
        while r_norm > config.tolerance && k < config.maxiter {
            if !r_norm.is_finite() {
                return Ok(Step::Failed(DivergenceCause::NonFinite));
            }
            let Some(dc) = tangent_solve(&members, &r)? else {
                return Ok(Step::Failed(DivergenceCause::LostStability));
            };
            correction -= dc;
            u = &base + &correction;
            let (m, f_int) = update_member_data(structure, &u)?;
            members = m;
            (r, r_norm) = residual(&f_int, f_next, structure);
            k += 1;
            trace!("increment {n} iteration {k}: residual {r_norm:.3e}");
        }
        if !r_norm.is_finite() {
            return Ok(Step::Failed(DivergenceCause::NonFinite));
        }
        if r_norm > config.tolerance {
            return Ok(Step::Failed(DivergenceCause::MaxIterations {
                residual_norm: r_norm,
            }));
        }
        if config.collapse_check && correction.norm() > du.norm() {
            return Ok(Step::Failed(DivergenceCause::SnapThrough));
        }
        Ok(Step::Converged(IncrementRecord {
            increment: n,
            displacement: u,
            load: f_next.clone(),
            members,
            iterations: k,
            residual_norm: r_norm,
            converged: true,
        }))
    };
    attempt().unwrap_or_else(|e| Step::Failed(e.into()))
}

/// Bisects on the load magnitude for the largest load that `solve` still
/// completes. `load_pattern` is scaled so that its Euclidean norm equals the
/// trial magnitude. Every trial uses the load step `f_hi / config.n_inc`, so
/// smaller trials take fewer increments along the same discretised path. The
/// result is within `resolution` below the boundary of the completed region.
pub fn probe_max_force(
    structure: &Structure,
    load_pattern: &LoadCase,
    config: &SolverConfig,
    f_lo: f64,
    f_hi: f64,
    resolution: f64,
) -> Result<f64, SolverError> {
    if !(resolution > 0.0) {
        return Err(SolverError::BracketInvalid(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    if !(f_lo >= 0.0 && f_hi > f_lo) {
        return Err(SolverError::BracketInvalid(format!(
            "need 0 <= f_lo < f_hi, got [{f_lo}, {f_hi}]"
        )));
    }
    let norm = load_pattern.magnitude();
    if norm == 0.0 {
        return Err(SolverError::BracketInvalid("load pattern is zero".into()));
    }
    config.validate()?;
    let step = f_hi / config.n_inc as f64;
    let completes = |f: f64| -> Result<bool, SolverError> {
        let load = load_pattern.scaled(f / norm);
        let trial = SolverConfig {
            n_inc: ((f / step).ceil() as usize).max(1),
            ..*config
        };
        Ok(solve(structure, &load, &trial)?.is_completed())
    };
    if !completes(f_lo)? {
        return Err(SolverError::BracketInvalid(format!(
            "solve fails at f_lo = {f_lo}"
        )));
    }
    if completes(f_hi)? {
        return Err(SolverError::BracketInvalid(format!(
            "solve still completes at f_hi = {f_hi}"
        )));
    }
    let (mut lo, mut hi) = (f_lo, f_hi);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        if completes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
