//! Bound-state spectrum: per-branch root isolation of the secular matrix,
//! closed-form fast paths (single center, twin wells via Lambert W), and the
//! discrete-Fourier route for equidistant uniform chains treated with cyclic
//! distances.

use serde::Serialize;
use std::f64::consts::TAU;

use crate::eigen;
use crate::error::{Error, Result};
use crate::lambert;
use crate::model::{energy_from_kappa, DeltaSystem, Energy, Kappa, PhysicalConstants};
use crate::phimatrix::{self, MatrixKind, SpectralMatrix};

/// Default relative interval width at which root bisection stops.
pub const DEFAULT_KAPPA_TOL: f64 = 1e-12;

/// Lower end of the root bracket, as a fraction of the upper bound `kappa*`.
const BRACKET_LO_FRACTION: f64 = 1e-9;

/// Roots closer than this fraction of `kappa*` are reported as one level.
const MERGE_FRACTION: f64 = 1e-8;

/// One bound level.
///
/// `kappa` (and `energy` derived from it) is the mean of the contributing
/// per-branch roots; `branch_roots` keeps each raw root so that merging
/// near-coincident levels never discards resolution. `null_vectors[i]` is the
/// null direction of the secular matrix evaluated at `branch_roots[i]`, with
/// `||Phi(branch_roots[i]) phi||_inf <= 1e-9`; the family is orthonormal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    pub energy: f64,
    pub kappa: f64,
    /// Branches vanishing at this level: ascending 1-based branch numbers, or
    /// Fourier mode numbers (0-based) for spectra built by
    /// [`circulant_bound_states`].
    #[serde(rename = "branches")]
    pub branch_indices: Vec<usize>,
    /// Raw root of each contributing branch, aligned with `branch_indices`.
    pub branch_roots: Vec<f64>,
    pub multiplicity: usize,
    pub null_vectors: Vec<Vec<f64>>,
}

/// All bound levels of one system, ascending in energy (deepest first).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    states: Vec<BoundState>,
    system: DeltaSystem,
}

impl Spectrum {
    pub fn states(&self) -> &[BoundState] {
        &self.states
    }

    pub fn system(&self) -> &DeltaSystem {
        &self.system
    }

    /// Number of states counting multiplicity; never exceeds the well count.
    pub fn total_multiplicity(&self) -> usize {
        self.states.iter().map(|s| s.multiplicity).sum()
    }

    /// Deepest level. Spectra are never empty: the lowest branch always
    /// crosses zero because the diagonal diverges to `-inf` as `kappa -> 0`.
    pub fn ground(&self) -> &BoundState {
        &self.states[0]
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "states": self.states,
            "kappa_star": bracket_kappa_max(&self.system).value(),
        })
    }
}

/// Upper bound `kappa*` on every root: the largest row sum
/// `(m/hbar^2) max_i sum_j sqrt(lambda_i lambda_j)`. At `kappa >= kappa*`
/// the matrix is (weakly) diagonally dominant with non-negative diagonal,
/// so no eigenvalue is negative; for a single well the root sits exactly
/// at `kappa*`.
pub fn bracket_kappa_max(sys: &DeltaSystem) -> Kappa {
    let n = sys.len();
    let g: Vec<f64> = (0..n).map(|i| sys.well_kappa(i)).collect();
    let bound = (0..n)
        .map(|i| (0..n).map(|j| (g[i] * g[j]).sqrt()).sum::<f64>())
        .fold(0.0, f64::max);
    // Saturate rather than overflow for absurdly strong wells; any value
    // above the true bound still brackets.
    Kappa::new(if bound.is_finite() { bound } else { f64::MAX })
        .expect("row sums of positive strengths are positive")
}

/// All bound states of a system.
///
/// Per branch `k`: starting from `kappa_lo = 1e-9 kappa*`, the branch value
/// is sampled on a coarse geometric ladder until it is distinguishable from
/// zero at working precision (matrix entries grow like `1/kappa`, so near
/// the lower edge an eigenvalue smaller than `eps |Phi|` has no reliable
/// sign). Branch values rise with `kappa`, so the first definite sign
/// decides: negative starts a bisection on `[there, kappa*]` to relative
/// width `kappa_tol`, refined by Newton steps on the eigenvalue (slope from
/// the Rayleigh quotient of the `|E|`-derivative matrix); positive proves
/// the branch never binds. Roots closer than `1e-8 kappa*` are reported as
/// one level with summed multiplicity.
pub fn find_bound_states(sys: &DeltaSystem, kappa_tol: f64) -> Result<Spectrum> {
    check_tolerance(kappa_tol)?;
    let kappa_star = bracket_kappa_max(sys).value();
    let lo = BRACKET_LO_FRACTION * kappa_star;
    let mut raw = Vec::new();
    for k in 1..=sys.len() {
        let start = hunt_start(
            |x| {
                let phi = phimatrix::build_phi(sys, Kappa::new(x)?);
                let value = eigen::eigen_decompose(&phi)?.eigenvalues()[k - 1];
                Ok((value, phi.norm_inf()))
            },
            lo,
            kappa_star,
        )?;
        let Some(start) = start else { continue };
        let root = scalar_root(
            |x| eigen::branch_value(sys, k, Kappa::new(x)?),
            start,
            kappa_star,
            kappa_tol,
        )?;
        if let Some(root) = root {
            let root = polish_branch_root(sys, k, root)?;
            let dec = eigen::eigen_decompose(&phimatrix::build_phi(sys, Kappa::new(root)?))?;
            raw.push(RawLevel {
                indices: vec![k],
                kappa: root,
                vectors: vec![dec.eigenvector(k - 1).to_vec()],
            });
        }
    }
    let states = assemble_states(sys, raw, MERGE_FRACTION * kappa_star)?;
    Ok(Spectrum { states, system: sys.clone() })
}

/// `E_B = -m lambda^2 / (2 hbar^2)`, the binding energy of one well.
pub fn single_center_energy(lambda: f64, constants: &PhysicalConstants) -> Result<Energy> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::NonPositiveStrength { index: 0, value: lambda });
    }
    Energy::new(-constants.mass * lambda * lambda / (2.0 * constants.hbar.powi(2)))
}

/// Twin-well roots in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwinRoots {
    /// Symmetric (node-less) root; present for every separation.
    pub kappa_plus: Kappa,
    /// Antisymmetric root; `None` at or below the threshold separation
    /// `a = hbar^2/(m lambda)`, where it collides with `kappa = 0`.
    pub kappa_minus: Option<Kappa>,
}

/// Roots for two equal wells of strength `lambda` separated by `a`:
/// `kappa_{+/-} = g + W_0[+/- a g e^{-a g}] / a` with `g = m lambda / hbar^2`.
///
/// For `a g <= 1` the principal branch gives `W_0[-a g e^{-a g}] = -a g`
/// exactly, collapsing the antisymmetric root to zero; it is reported as
/// `None` below `1e-10 g`.
pub fn twin_closed_form(
    a: f64,
    lambda: f64,
    constants: &PhysicalConstants,
) -> Result<TwinRoots> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::BadGeometry(format!("separation {a} is not strictly positive")));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::NonPositiveStrength { index: 0, value: lambda });
    }
    let g = constants.mass * lambda / constants.hbar.powi(2);
    let x = a * g * (-a * g).exp();
    let kappa_plus = Kappa::new(g + lambert::w0(x)? / a)?;
    let minus = g + lambert::w0(-x)? / a;
    let kappa_minus =
        if minus > 1e-10 * g { Some(Kappa::new(minus)?) } else { None };
    Ok(TwinRoots { kappa_plus, kappa_minus })
}

/// First row of the cyclic-distance secular matrix for an equidistant,
/// uniform chain: `c_0 = 1 - g/kappa`,
/// `c_j = -(g/kappa) exp(-kappa min(j, N-j) a)`. Cyclic distances make the
/// row mirror-symmetric, so the full matrix is circulant.
pub fn circulant_coefficients(sys: &DeltaSystem, kappa: Kappa) -> Result<Vec<f64>> {
    if !sys.is_equidistant_uniform() {
        return Err(Error::NotCirculant);
    }
    let n = sys.len();
    let k = kappa.value();
    let g = sys.well_kappa(0);
    let gap = if n > 1 { sys.centers()[1] - sys.centers()[0] } else { 0.0 };
    Ok((0..n)
        .map(|j| {
            if j == 0 {
                1.0 - g / k
            } else {
                let d = j.min(n - j) as f64 * gap;
                -(g / k) * (-k * d).exp()
            }
        })
        .collect())
}

/// Derivative of [`circulant_coefficients`] with respect to `kappa`.
fn circulant_coefficient_slopes(sys: &DeltaSystem, kappa: f64) -> Vec<f64> {
    let n = sys.len();
    let g = sys.well_kappa(0);
    let gap = if n > 1 { sys.centers()[1] - sys.centers()[0] } else { 0.0 };
    (0..n)
        .map(|j| {
            if j == 0 {
                g / (kappa * kappa)
            } else {
                let d = j.min(n - j) as f64 * gap;
                (g / kappa) * (-kappa * d).exp() * (1.0 / kappa + d)
            }
        })
        .collect()
}

/// `omega_j = c_0 + sum_k c_k cos(2 pi j k / N)` for one Fourier mode.
fn mode_value(coefficients: &[f64], j: usize) -> f64 {
    let n = coefficients.len();
    coefficients[0]
        + (1..n)
            .map(|k| coefficients[k] * (TAU * ((j * k) % n) as f64 / n as f64).cos())
            .sum::<f64>()
}

/// Eigenvalues of the circulant matrix with the given first row, indexed by
/// Fourier mode `j`. Each mirror pair `(j, N-j)` is computed once and stored
/// twice, so paired entries are bit-identical.
pub fn circulant_eigenvalues(coefficients: &[f64]) -> Result<Vec<f64>> {
    let n = coefficients.len();
    let scale = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
    for j in 1..n {
        if (coefficients[j] - coefficients[n - j]).abs() > 1e-12 * scale {
            return Err(Error::AsymmetricCoefficients(j));
        }
    }
    let mut out = vec![0.0; n];
    for j in 0..=n / 2 {
        let w = mode_value(coefficients, j);
        out[j] = w;
        if j != 0 && j != n - j {
            out[n - j] = w;
        }
    }
    Ok(out)
}

/// Coefficients, mode eigenvalues, and the mirror pairing `(j, N-j)` of an
/// equidistant uniform chain at one wave number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CirculantSpectrum {
    pub coefficients: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub pairing: Vec<(usize, usize)>,
}

pub fn circulant_spectrum(sys: &DeltaSystem, kappa: Kappa) -> Result<CirculantSpectrum> {
    let coefficients = circulant_coefficients(sys, kappa)?;
    let eigenvalues = circulant_eigenvalues(&coefficients)?;
    let pairing = mode_pairing(sys.len());
    Ok(CirculantSpectrum { coefficients, eigenvalues, pairing })
}

/// Mirror pairs `(j, N-j)` with `1 <= j < N-j`; modes `0` and `N/2` (even
/// `N`) pair with themselves and are omitted.
pub fn mode_pairing(n: usize) -> Vec<(usize, usize)> {
    (1..n).take_while(|&j| j < n - j).map(|j| (j, n - j)).collect()
}

/// Dense reassembly `M_ij = c_{(j-i) mod N}` of the cyclic-distance matrix,
/// for cross-checking the Fourier route against the dense eigensolver.
pub fn circulant_matrix(sys: &DeltaSystem, kappa: Kappa) -> Result<SpectralMatrix> {
    let c = circulant_coefficients(sys, kappa)?;
    let n = c.len();
    Ok(SpectralMatrix::from_fn(MatrixKind::Phi, kappa.value(), n, |i, j| c[(j + n - i) % n]))
}

/// Orthonormal real eigenvectors of a circulant matrix for mode `j`: the
/// uniform vector (`j = 0`), the alternating vector (`j = N/2`), or the
/// cosine/sine profile pair.
fn mode_vectors(n: usize, j: usize) -> Vec<Vec<f64>> {
    if j == 0 {
        let inv = 1.0 / (n as f64).sqrt();
        return vec![vec![inv; n]];
    }
    if j == n - j {
        let inv = 1.0 / (n as f64).sqrt();
        return vec![(0..n).map(|i| if i % 2 == 0 { inv } else { -inv }).collect()];
    }
    let amp = (2.0 / n as f64).sqrt();
    let angle = |i: usize| TAU * ((j * i) % n) as f64 / n as f64;
    vec![
        (0..n).map(|i| amp * angle(i).cos()).collect(),
        (0..n).map(|i| amp * angle(i).sin()).collect(),
    ]
}

/// Bound states of an equidistant uniform chain under cyclic distances.
///
/// Each Fourier mode is a scalar branch; the root protocol matches
/// [`find_bound_states`] (bracket on `[1e-9 kappa*, kappa*]`, root hunted
/// only when the branch is negative at the lower edge). A mirror pair shares
/// one branch function, so its level is exactly two-fold degenerate, with
/// the cosine and sine profiles as null vectors. Branch indices are Fourier
/// mode numbers (0-based).
pub fn circulant_bound_states(sys: &DeltaSystem, kappa_tol: f64) -> Result<Spectrum> {
    check_tolerance(kappa_tol)?;
    if !sys.is_equidistant_uniform() {
        return Err(Error::NotCirculant);
    }
    let n = sys.len();
    let kappa_star = bracket_kappa_max(sys).value();
    let lo = BRACKET_LO_FRACTION * kappa_star;
    let mut raw = Vec::new();
    for j in 0..=n / 2 {
        let root = scalar_root(
            |x| Ok(mode_value(&circulant_coefficients(sys, Kappa::new(x)?)?, j)),
            lo,
            kappa_star,
            kappa_tol,
        )?;
        if let Some(root) = root {
            let root = polish_mode_root(sys, j, root)?;
            let indices = if j == 0 || j == n - j { vec![j] } else { vec![j, n - j] };
            raw.push(RawLevel { indices, kappa: root, vectors: mode_vectors(n, j) });
        }
    }
    let states = assemble_states(sys, raw, MERGE_FRACTION * kappa_star)?;
    Ok(Spectrum { states, system: sys.clone() })
}

/// One row per level: energy, multiplicity, and the branches that vanish
/// there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateLevel {
    pub energy: f64,
    pub multiplicity: usize,
    pub branches: Vec<usize>,
}

/// Level table of a spectrum, ascending in energy.
pub fn degeneracy_report(spectrum: &Spectrum) -> Vec<DegenerateLevel> {
    spectrum
        .states()
        .iter()
        .map(|s| DegenerateLevel {
            energy: s.energy,
            multiplicity: s.multiplicity,
            branches: s.branch_indices.clone(),
        })
        .collect()
}

fn check_tolerance(kappa_tol: f64) -> Result<()> {
    if !(kappa_tol.is_finite() && kappa_tol > 0.0 && kappa_tol < 1.0) {
        return Err(Error::BadRange(format!(
            "relative root tolerance {kappa_tol} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Where to start hunting the root of a branch that rises with `kappa`:
/// the first point of the ladder `kappa_lo * 4^j` whose value is definite
/// at working precision -- beyond `64 eps` times the value's natural scale.
/// Definitely negative starts the hunt there (the root lies above, by
/// monotonicity); definitely positive proves there is no root. A crossing
/// hidden below the noise floor all the way up is reported unbound: its
/// wave number is smaller than double precision can certify. Only sound
/// for monotone branches; cyclic-mode values are gated at the lower edge
/// alone.
fn hunt_start(
    f: impl Fn(f64) -> Result<(f64, f64)>,
    kappa_lo: f64,
    kappa_star: f64,
) -> Result<Option<f64>> {
    let mut k = kappa_lo;
    while k < kappa_star {
        let (value, scale) = f(k)?;
        let floor = 64.0 * f64::EPSILON * scale.max(1.0);
        if value <= -floor {
            return Ok(Some(k));
        }
        if value >= floor {
            return Ok(None);
        }
        k *= 4.0;
    }
    Ok(None)
}

/// Bisection on `[lo, hi]` for a branch that is negative somewhere below its
/// root. Returns `None` when the branch is already non-negative at `lo`
/// (no crossing inside the bracket); an exact zero at an endpoint or
/// midpoint is returned as-is, keeping closed-form roots bit-exact.
fn scalar_root(
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<Option<f64>> {
    let f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(Some(lo));
    }
    if f_lo > 0.0 {
        return Ok(None);
    }
    let mut hi = hi;
    let mut f_hi = f(hi)?;
    let mut doublings = 0;
    while f_hi < 0.0 {
        // Diagonal dominance makes every branch non-negative at `kappa*`;
        // this guard only defends against rounding at the edge.
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 || !hi.is_finite() {
            return Err(Error::BadRange(format!("no sign change found up to kappa = {hi}")));
        }
        f_hi = f(hi)?;
    }
    if f_hi == 0.0 {
        return Ok(Some(hi));
    }
    let mut lo = lo;
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(Some(mid));
        }
        if f_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Newton polish of a dense-branch root: the eigenvalue slope in `kappa` is
/// the Rayleigh quotient of the `|E|`-derivative matrix times
/// `d|E|/d kappa = hbar^2 kappa / m`. Keeps the null-vector residual at
/// machine level even when bisection stops at its relative tolerance.
fn polish_branch_root(sys: &DeltaSystem, k: usize, mut kappa: f64) -> Result<f64> {
    let hbar2_over_m = sys.constants().hbar.powi(2) / sys.constants().mass;
    for _ in 0..4 {
        let at = Kappa::new(kappa)?;
        let dec = eigen::eigen_decompose(&phimatrix::build_phi(sys, at))?;
        let omega = dec.eigenvalues()[k - 1];
        if omega.abs() <= 1e-15 {
            break;
        }
        let v = dec.eigenvector(k - 1);
        let slope =
            phimatrix::build_phi_derivative(sys, at).quadratic_form(v, v) * hbar2_over_m * kappa;
        if !(slope.is_finite() && slope > 0.0) {
            break;
        }
        let next = kappa - omega / slope;
        if !(next.is_finite() && next > 0.0) {
            break;
        }
        let step = (next - kappa).abs();
        kappa = next;
        if step <= f64::EPSILON * kappa {
            break;
        }
    }
    Ok(kappa)
}

/// Newton polish of a Fourier-mode root using the analytic coefficient
/// slopes.
fn polish_mode_root(sys: &DeltaSystem, j: usize, mut kappa: f64) -> Result<f64> {
    for _ in 0..4 {
        let omega = mode_value(&circulant_coefficients(sys, Kappa::new(kappa)?)?, j);
        if omega.abs() <= 1e-15 {
            break;
        }
        let slope = mode_value(&circulant_coefficient_slopes(sys, kappa), j);
        if !(slope.is_finite() && slope > 0.0) {
            break;
        }
        let next = kappa - omega / slope;
        if !(next.is_finite() && next > 0.0) {
            break;
        }
        let step = (next - kappa).abs();
        kappa = next;
        if step <= f64::EPSILON * kappa {
            break;
        }
    }
    Ok(kappa)
}

struct RawLevel {
    indices: Vec<usize>,
    kappa: f64,
    vectors: Vec<Vec<f64>>,
}

/// Clusters raw roots closer than `merge_tol` into levels, ascending in
/// energy. Null vectors keep their own raw-root evaluation point
/// (`branch_roots`); one Gram-Schmidt pass restores exact orthonormality
/// across a merged family.
fn assemble_states(
    sys: &DeltaSystem,
    mut raw: Vec<RawLevel>,
    merge_tol: f64,
) -> Result<Vec<BoundState>> {
    raw.sort_by(|a, b| b.kappa.total_cmp(&a.kappa));
    let mut states = Vec::new();
    let mut i = 0;
    while i < raw.len() {
        let mut j = i + 1;
        while j < raw.len() && raw[j - 1].kappa - raw[j].kappa <= merge_tol {
            j += 1;
        }
        let mut members: Vec<&RawLevel> = raw[i..j].iter().collect();
        members.sort_by_key(|m| m.indices[0]);
        let mut branch_indices = Vec::new();
        let mut branch_roots = Vec::new();
        let mut null_vectors = Vec::new();
        for m in &members {
            for (idx, v) in m.indices.iter().zip(&m.vectors) {
                branch_indices.push(*idx);
                branch_roots.push(m.kappa);
                null_vectors.push(v.clone());
            }
        }
        orthonormalize(&mut null_vectors);
        let kappa = branch_roots.iter().sum::<f64>() / branch_roots.len() as f64;
        states.push(BoundState {
            energy: energy_from_kappa(Kappa::new(kappa)?, sys.constants()).value(),
            kappa,
            multiplicity: null_vectors.len(),
            branch_indices,
            branch_roots,
            null_vectors,
        });
        i = j;
    }
    Ok(states)
}

fn orthonormalize(vectors: &mut [Vec<f64>]) {
    for i in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(i);
        let v = &mut rest[0];
        for u in done.iter() {
            let dot: f64 = v.iter().zip(u.iter()).map(|(&a, &b)| a * b).sum();
            for (vi, &ui) in v.iter_mut().zip(u.iter()) {
                *vi -= dot * ui;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
        }
    }
}
