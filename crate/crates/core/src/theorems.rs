//! Executable spectral-structure checks: the shifted-matrix positivity
//! certificate for the ground state, eigenvalue interlacing under center
//! removal, upward level shifts, and monotone eigenvalue flow in the
//! binding energy.

use serde::Serialize;

use crate::eigen;
use crate::error::{Error, Result};
use crate::model::{DeltaSystem, Kappa};
use crate::phimatrix::{self, MatrixKind, SpectralMatrix};
use crate::spectrum::{self, DEFAULT_KAPPA_TOL};
use crate::wavefunction;

pub const DEFAULT_PERRON_EPSILON: f64 = 1e-6;

/// Outcome of one verification check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check's construction does not apply to the given input (wrong
    /// units, shifted matrix not entrywise positive, nothing to compare).
    Inapplicable,
}

/// One line of a verification suite: named check, status, the smallest
/// margin by which its inequalities held (negative on failure), and
/// human-readable details.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub status: CheckStatus,
    pub worst_margin: f64,
    pub details: Vec<String>,
}

impl CheckReport {
    pub fn new(
        name: impl Into<String>,
        status: CheckStatus,
        worst_margin: f64,
        details: Vec<String>,
    ) -> Self {
        CheckReport { name: name.into(), status, worst_margin, details }
    }

    pub fn failed(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// Certificate that the most-bound level inherits the structure of a
/// matrix with all entries positive: after subtracting `(1+epsilon)` times
/// the largest diagonal entry (taken at the ground-state wave number and
/// the weakest well) and negating, the matrix has a simple top eigenvalue
/// with a one-signed eigenvector.
#[derive(Debug, Clone, Serialize)]
pub struct PerronReport {
    pub kappa: f64,
    /// Diagonal offset `(1+epsilon)(1 - g_min/kappa_gr)`.
    pub shift: f64,
    pub epsilon: f64,
    pub top_eigenvalue: f64,
    /// Distance from the top eigenvalue to the next one below it.
    pub spectral_gap: f64,
    /// Top eigenvector after the canonical sign fix.
    pub top_eigenvector: Vec<f64>,
    /// Whether every component of the top eigenvector is strictly positive.
    pub all_entries_positive: bool,
}

/// Builds the shifted, negated matrix at `at_kappa` (ground-state wave
/// number when `None`) and reports its top eigenvalue, gap, and
/// eigenvector. The shift scalar is always anchored at the ground state,
/// where the construction is guaranteed to work; at other wave numbers the
/// matrix may fail entrywise positivity, reported as
/// [`Error::NotEntrywisePositive`] so callers can mark the check
/// inapplicable rather than failed.
pub fn perron_check(
    sys: &DeltaSystem,
    at_kappa: Option<Kappa>,
    epsilon: f64,
) -> Result<PerronReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::BadRange(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = sys.len();
    let kappa_gr = spectrum::find_bound_states(sys, DEFAULT_KAPPA_TOL)?.ground().kappa;
    let g_min = (0..n).map(|i| sys.well_kappa(i)).fold(f64::INFINITY, f64::min);
    let sigma = 1.0 - g_min / kappa_gr;
    let shift = (1.0 + epsilon) * sigma;
    if n == 1 && at_kappa.is_none() {
        // A 1x1 matrix needs no shift: its only eigenvalue is trivially
        // simple with eigenvector [1], and there is no competitor.
        return Ok(PerronReport {
            kappa: kappa_gr,
            shift,
            epsilon,
            top_eigenvalue: 0.0,
            spectral_gap: f64::INFINITY,
            top_eigenvector: vec![1.0],
            all_entries_positive: true,
        });
    }
    let kappa = at_kappa.map(|k| k.value()).unwrap_or(kappa_gr);
    let phi = phimatrix::build_phi(sys, Kappa::new(kappa)?);
    for i in 0..n {
        for j in 0..n {
            let entry = if i == j { shift - phi.at(i, j) } else { -phi.at(i, j) };
            if entry <= 0.0 {
                return Err(Error::NotEntrywisePositive { row: i, col: j });
            }
        }
    }
    let shifted = SpectralMatrix::from_fn(MatrixKind::Phi, kappa, n, |i, j| {
        if i == j {
            shift - phi.at(i, j)
        } else {
            -phi.at(i, j)
        }
    });
    let eig = eigen::eigen_decompose(&shifted)?;
    let values = eig.eigenvalues();
    let top = values[n - 1];
    let spectral_gap =
        if n >= 2 { top - values[n - 2] } else { f64::INFINITY };
    let top_eigenvector = eig.eigenvector(n - 1).to_vec();
    let all_entries_positive = top_eigenvector.iter().all(|&v| v > 0.0);
    Ok(PerronReport {
        kappa,
        shift,
        epsilon,
        top_eigenvalue: top,
        spectral_gap,
        top_eigenvector,
        all_entries_positive,
    })
}

/// Structure of the most-bound level: simple, separated from the next
/// level, with a strictly positive wave function on the sampling window
/// `[a_1 - 10/kappa, a_N + 10/kappa]`.
#[derive(Debug, Clone, Serialize)]
pub struct GroundStateReport {
    pub simple: bool,
    /// Distance in wave number to the next level, or to the continuum edge
    /// at zero when no second level exists.
    pub gap_in_kappa: f64,
    pub positive_wavefunction: bool,
}

pub fn ground_state_check(sys: &DeltaSystem) -> Result<GroundStateReport> {
    let spec = spectrum::find_bound_states(sys, DEFAULT_KAPPA_TOL)?;
    let ground = spec.ground();
    let simple = ground.multiplicity == 1;
    let gap_in_kappa = if spec.states().len() >= 2 {
        ground.kappa - spec.states()[1].kappa
    } else {
        ground.kappa
    };
    let wf = wavefunction::build_wavefunction(sys, ground, 0)?;
    let k = ground.kappa;
    let lo = sys.centers()[0] - 10.0 / k;
    let hi = sys.centers()[sys.len() - 1] + 10.0 / k;
    let samples = 10_000;
    let positive_wavefunction = (0..samples).all(|s| {
        let x = lo + (hi - lo) * s as f64 / (samples - 1) as f64;
        wf.evaluate(x) > 0.0
    });
    Ok(GroundStateReport { simple, gap_in_kappa, positive_wavefunction })
}

/// Eigenvalues of the full matrix and of the principal submatrix with one
/// center removed, with every broken link of the interlacing chain listed.
#[derive(Debug, Clone, Serialize)]
pub struct InterlacingReport {
    pub removed_index: usize,
    /// Ascending eigenvalues of the full matrix.
    pub full_eigenvalues: Vec<f64>,
    /// Ascending eigenvalues of the submatrix.
    pub sub_eigenvalues: Vec<f64>,
    pub violations: Vec<String>,
}

/// Checks `full_k <= sub_k <= full_{k+1}` (ascending, equalities allowed)
/// at one wave number, with slack `1e-12 * max(1, |Phi|_inf)`.
pub fn interlacing_check(
    sys: &DeltaSystem,
    at_kappa: Kappa,
    removed_index: usize,
) -> Result<InterlacingReport> {
    let n = sys.len();
    if removed_index >= n {
        return Err(Error::IndexOutOfRange { index: removed_index, order: n });
    }
    if n < 2 {
        return Err(Error::BadGeometry(
            "interlacing needs at least two centers".into(),
        ));
    }
    let full_eigenvalues = eigen::branch_values(sys, at_kappa)?;
    let sub_sys = sys.without_center(removed_index)?;
    let sub_eigenvalues = eigen::branch_values(&sub_sys, at_kappa)?;
    let tol = 1e-12 * phimatrix::build_phi(sys, at_kappa).norm_inf().max(1.0);
    let mut violations = Vec::new();
    for k in 0..n - 1 {
        if full_eigenvalues[k] > sub_eigenvalues[k] + tol {
            violations.push(format!(
                "full[{k}] = {} exceeds sub[{k}] = {}",
                full_eigenvalues[k], sub_eigenvalues[k]
            ));
        }
        if sub_eigenvalues[k] > full_eigenvalues[k + 1] + tol {
            violations.push(format!(
                "sub[{k}] = {} exceeds full[{}] = {}",
                sub_eigenvalues[k],
                k + 1,
                full_eigenvalues[k + 1]
            ));
        }
    }
    Ok(InterlacingReport { removed_index, full_eigenvalues, sub_eigenvalues, violations })
}

/// Level-by-level energy comparison after removing one center: bound
/// energies counted with multiplicity, matched in ascending order.
#[derive(Debug, Clone, Serialize)]
pub struct RemovalReport {
    pub removed_index: usize,
    /// Ascending bound energies of the full system, one per branch root.
    pub full_energies: Vec<f64>,
    /// Ascending bound energies after removal.
    pub sub_energies: Vec<f64>,
    /// `sub_energies[k] - full_energies[k]`; non-negative when no level
    /// moves down.
    pub deltas: Vec<f64>,
    /// Levels of the full system with no partner after removal.
    pub surplus: usize,
    /// Removing the only center leaves nothing to compare.
    pub empty_after_removal: bool,
}

fn sorted_level_energies(sys: &DeltaSystem) -> Result<Vec<f64>> {
    let spec = spectrum::find_bound_states(sys, DEFAULT_KAPPA_TOL)?;
    let mut energies: Vec<f64> = spec
        .states()
        .iter()
        .flat_map(|s| s.branch_roots.iter())
        .map(|&k| {
            crate::model::energy_from_kappa(
                Kappa::new(k).expect("roots are positive"),
                sys.constants(),
            )
            .value()
        })
        .collect();
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}

pub fn removal_shift_check(sys: &DeltaSystem, removed_index: usize) -> Result<RemovalReport> {
    let n = sys.len();
    if removed_index >= n {
        return Err(Error::IndexOutOfRange { index: removed_index, order: n });
    }
    let full_energies = sorted_level_energies(sys)?;
    if n == 1 {
        return Ok(RemovalReport {
            removed_index,
            surplus: full_energies.len(),
            full_energies,
            sub_energies: Vec::new(),
            deltas: Vec::new(),
            empty_after_removal: true,
        });
    }
    let sub_sys = sys.without_center(removed_index)?;
    let sub_energies = sorted_level_energies(&sub_sys)?;
    let paired = sub_energies.len().min(full_energies.len());
    let deltas = (0..paired).map(|k| sub_energies[k] - full_energies[k]).collect();
    Ok(RemovalReport {
        removed_index,
        surplus: full_energies.len() - paired,
        full_energies,
        sub_energies,
        deltas,
        empty_after_removal: false,
    })
}

/// Minima observed while checking that every eigenvalue branch rises with
/// the binding energy: Rayleigh quotients of the derivative matrix, finite
/// differences of branch values along the grid, and positive definiteness
/// of the derivative matrix itself.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    /// Smallest `v^T (dPhi/d|E|) v` over grid points and probe vectors.
    pub min_rayleigh: f64,
    /// Smallest increment of any branch value between consecutive grid
    /// points (the grid ascends in wave number, hence in binding energy).
    pub min_fd_delta: f64,
    /// Whether the derivative matrix passed a Cholesky factorization at
    /// every grid point.
    pub derivative_positive_definite: bool,
    pub samples: usize,
}

fn cholesky_positive_definite(m: &SpectralMatrix) -> bool {
    let n = m.order();
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m.at(i, j);
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return false;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    true
}

pub fn monotonicity_check(sys: &DeltaSystem, kappa_grid: &[f64]) -> Result<MonotonicityReport> {
    if kappa_grid.len() < 2 {
        return Err(Error::BadRange(format!(
            "grid needs at least two points, got {}",
            kappa_grid.len()
        )));
    }
    for w in kappa_grid.windows(2) {
        if !(w[0].is_finite() && w[0] > 0.0 && w[1] > w[0]) {
            return Err(Error::BadRange(format!(
                "grid must be positive and strictly ascending near {} , {}",
                w[0], w[1]
            )));
        }
    }
    let n = sys.len();
    let mut min_rayleigh = f64::INFINITY;
    let mut derivative_positive_definite = true;
    let mut branch_rows: Vec<Vec<f64>> = Vec::with_capacity(kappa_grid.len());
    for &k in kappa_grid {
        let kappa = Kappa::new(k)?;
        let derivative = phimatrix::build_phi_derivative(sys, kappa);
        derivative_positive_definite &= cholesky_positive_definite(&derivative);
        let eig = eigen::eigen_decompose(&phimatrix::build_phi(sys, kappa))?;
        // Eigenvectors of the matrix itself, plus deliberately non-eigen
        // probes: the canonical basis and the flat vector.
        let mut probes: Vec<Vec<f64>> = (0..n).map(|b| eig.eigenvector(b).to_vec()).collect();
        for b in 0..n {
            let mut e = vec![0.0; n];
            e[b] = 1.0;
            probes.push(e);
        }
        probes.push(vec![1.0 / (n as f64).sqrt(); n]);
        for v in &probes {
            min_rayleigh = min_rayleigh.min(derivative.quadratic_form(v, v));
        }
        branch_rows.push(eig.eigenvalues().to_vec());
    }
    let mut min_fd_delta = f64::INFINITY;
    for pair in branch_rows.windows(2) {
        for (above, below) in pair[1].iter().zip(&pair[0]) {
            min_fd_delta = min_fd_delta.min(above - below);
        }
    }
    Ok(MonotonicityReport {
        min_rayleigh,
        min_fd_delta,
        derivative_positive_definite,
        samples: kappa_grid.len(),
    })
}
