//! Assembly of the secular matrix `Phi(kappa)`, its derivative with respect
//! to `|E|`, and the strength-scaled variant `Gamma` related to `Phi` by the
//! congruence `S Gamma S^T = Phi` with `S = diag(sqrt(lambda_i))`.

use crate::eigen;
use crate::error::{Error, Result};
use crate::model::{DeltaSystem, Kappa};

/// Which matrix family a [`SpectralMatrix`] instance belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Secular matrix: bound states are its eigenvalue-zero crossings.
    Phi,
    /// Entry-wise derivative of `Phi` with respect to `|E|`.
    PhiDerivative,
    /// Strength-scaled matrix, defined in natural units only.
    Gamma,
}

/// Dense symmetric matrix evaluated at one wave number.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMatrix {
    kind: MatrixKind,
    kappa: f64,
    n: usize,
    /// Row-major storage; symmetric by construction.
    entries: Vec<f64>,
}

impl SpectralMatrix {
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Max-row-sum norm (equals the max-column-sum norm by symmetry).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `M v` for a vector of matching length.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * v[j]).sum())
            .collect()
    }

    /// `v^T M w`.
    pub fn quadratic_form(&self, v: &[f64], w: &[f64]) -> f64 {
        self.apply(w).iter().zip(v).map(|(mw, &vi)| mw * vi).sum()
    }

    /// Row-major CSV dump with 17 significant digits, one row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> =
                (0..self.n).map(|j| format!("{:.16e}", self.at(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub(crate) fn from_fn(
        kind: MatrixKind,
        kappa: f64,
        n: usize,
        f: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        SpectralMatrix { kind, kappa, n, entries }
    }

    /// Wraps raw symmetric data so solver tests can run on arbitrary matrices.
    #[cfg(test)]
    pub(crate) fn for_tests(n: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), n * n);
        SpectralMatrix { kind: MatrixKind::Phi, kappa: 1.0, n, entries }
    }
}

/// Secular matrix at wave number `kappa`:
/// `Phi_ii = 1 - g_i/kappa`, `Phi_ij = -sqrt(g_i g_j)/kappa * exp(-kappa |a_i - a_j|)`
/// with `g_i = m lambda_i / hbar^2`.
pub fn build_phi(sys: &DeltaSystem, kappa: Kappa) -> SpectralMatrix {
    let k = kappa.value();
    let centers = sys.centers();
    let g: Vec<f64> = (0..sys.len()).map(|i| sys.well_kappa(i)).collect();
    SpectralMatrix::from_fn(MatrixKind::Phi, k, sys.len(), |i, j| {
        if i == j {
            1.0 - g[i] / k
        } else {
            -(g[i] * g[j]).sqrt() / k * (-k * (centers[i] - centers[j]).abs()).exp()
        }
    })
}

/// Entry-wise derivative of `Phi` with respect to `|E|`, using
/// `d kappa / d|E| = m / (hbar^2 kappa)`. Every entry is strictly positive,
/// so `d Phi / dE` is entry-wise strictly negative.
pub fn build_phi_derivative(sys: &DeltaSystem, kappa: Kappa) -> SpectralMatrix {
    let k = kappa.value();
    let centers = sys.centers();
    let g: Vec<f64> = (0..sys.len()).map(|i| sys.well_kappa(i)).collect();
    let mh = sys.constants().mass / sys.constants().hbar.powi(2);
    SpectralMatrix::from_fn(MatrixKind::PhiDerivative, k, sys.len(), |i, j| {
        let d = (centers[i] - centers[j]).abs();
        mh * (g[i] * g[j]).sqrt() * (-k * d).exp() * (1.0 / k.powi(3) + d / k.powi(2))
    })
}

/// Strength-scaled matrix in natural units (`hbar = 1`, `mass = 1/2`, where
/// `kappa = sqrt(|E|)`): `Gamma_ii = 1/lambda_i - 1/(2 kappa)`,
/// `Gamma_ij = -exp(-kappa |a_i - a_j|) / (2 kappa)`.
pub fn build_gamma(sys: &DeltaSystem, kappa: Kappa) -> Result<SpectralMatrix> {
    let c = sys.constants();
    if !c.is_natural() {
        return Err(Error::UnitMismatch { hbar: c.hbar, mass: c.mass });
    }
    let k = kappa.value();
    let centers = sys.centers();
    let strengths = sys.strengths();
    Ok(SpectralMatrix::from_fn(MatrixKind::Gamma, k, sys.len(), |i, j| {
        if i == j {
            1.0 / strengths[i] - 1.0 / (2.0 * k)
        } else {
            -(-k * (centers[i] - centers[j]).abs()).exp() / (2.0 * k)
        }
    }))
}

/// Signature of a symmetric matrix: eigenvalue counts by sign, with a zero
/// band of half-width `1e-12 * max(1, ||M||_inf)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

fn inertia_of(m: &SpectralMatrix) -> Result<(Inertia, f64)> {
    let dec = eigen::eigen_decompose(m)?;
    let tol = 1e-12 * m.norm_inf().max(1.0);
    let mut inertia = Inertia { negative: 0, zero: 0, positive: 0 };
    let mut det = 1.0;
    for &w in dec.eigenvalues() {
        det *= w;
        if w < -tol {
            inertia.negative += 1;
        } else if w > tol {
            inertia.positive += 1;
        } else {
            inertia.zero += 1;
        }
    }
    Ok((inertia, det))
}

/// Outcome of comparing `S Gamma S^T` against `Phi` at one wave number.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPhiReport {
    /// `max |S Gamma S^T - Phi|` over entries, relative to `max(1, ||Phi||_inf)`.
    pub max_deviation: f64,
    pub phi_inertia: Inertia,
    pub gamma_inertia: Inertia,
    pub inertia_match: bool,
    pub det_phi: f64,
    pub det_gamma: f64,
    /// Literal determinant comparison; populated only when the strength
    /// product is 1, where `det S^2 = 1` makes the determinants equal.
    pub det_match: Option<bool>,
}

/// Verifies the congruence `S Gamma S^T = Phi` entry-wise and compares the
/// inertias (which congruence preserves exactly). Determinants are compared
/// literally only when `prod(lambda_i) = 1`.
pub fn gamma_phi_equivalence(sys: &DeltaSystem, kappa: Kappa) -> Result<GammaPhiReport> {
    let phi = build_phi(sys, kappa);
    let gamma = build_gamma(sys, kappa)?;
    let n = sys.len();
    let scale = phi.norm_inf().max(1.0);
    let mut max_deviation = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s = (sys.strengths()[i] * sys.strengths()[j]).sqrt();
            let dev = (s * gamma.at(i, j) - phi.at(i, j)).abs() / scale;
            max_deviation = max_deviation.max(dev);
        }
    }
    let (phi_inertia, det_phi) = inertia_of(&phi)?;
    let (gamma_inertia, det_gamma) = inertia_of(&gamma)?;
    let strength_product: f64 = sys.strengths().iter().product();
    let det_match = if (strength_product - 1.0).abs() <= 1e-12 {
        let scale = det_phi.abs().max(det_gamma.abs()).max(1e-300);
        Some((det_phi - det_gamma).abs() <= 1e-12 * scale)
    } else {
        None
    };
    Ok(GammaPhiReport {
        max_deviation,
        phi_inertia,
        gamma_inertia,
        inertia_match: phi_inertia == gamma_inertia,
        det_phi,
        det_gamma,
        det_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{energy_from_kappa, kappa_from_energy, Energy, PhysicalConstants};

    fn twin(lambda: f64, a: f64) -> DeltaSystem {
        DeltaSystem::new(PhysicalConstants::default(), vec![0.0, a], vec![lambda, lambda])
            .unwrap()
    }

    #[test]
    fn single_well_matrix_vanishes_at_its_binding_kappa() {
        let sys =
            DeltaSystem::new(PhysicalConstants::default(), vec![0.0], vec![2.0]).unwrap();
        let phi = build_phi(&sys, Kappa::new(1.0).unwrap());
        assert_eq!(phi.order(), 1);
        assert_eq!(phi.at(0, 0), 0.0);
    }

    #[test]
    fn twin_entries_follow_closed_form() {
        let sys = twin(2.0, 2.0);
        let k = 0.7;
        let phi = build_phi(&sys, Kappa::new(k).unwrap());
        let g = 1.0;
        assert!((phi.at(0, 0) - (1.0 - g / k)).abs() < 1e-15);
        assert!((phi.at(1, 1) - (1.0 - g / k)).abs() < 1e-15);
        let off = -g / k * (-k * 2.0).exp();
        assert!((phi.at(0, 1) - off).abs() < 1e-15);
        assert_eq!(phi.at(0, 1), phi.at(1, 0));
    }

    #[test]
    fn entries_increase_with_kappa() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![-1.0, 0.3, 2.0],
            vec![1.0, 2.5, 0.7],
        )
        .unwrap();
        let lo = build_phi(&sys, Kappa::new(0.4).unwrap());
        let hi = build_phi(&sys, Kappa::new(0.9).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert!(hi.at(i, j) > lo.at(i, j));
            }
        }
    }

    #[test]
    fn approaches_identity_for_large_kappa() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 0.5, 1.2],
            vec![2.0, 1.0, 3.0],
        )
        .unwrap();
        let g_max = (0..3).map(|i| sys.well_kappa(i)).fold(0.0, f64::max);
        let min_gap = 0.5;
        let k = 1e6 * g_max.max(1.0 / min_gap);
        let phi = build_phi(&sys, Kappa::new(k).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((phi.at(i, j) - target).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn diagonally_dominant_above_gershgorin_bound() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![-0.3, 0.0, 0.4, 1.0],
            vec![1.0, 4.0, 2.0, 0.5],
        )
        .unwrap();
        let kappa_star = crate::spectrum::bracket_kappa_max(&sys).value();
        let phi = build_phi(&sys, Kappa::new(1.01 * kappa_star).unwrap());
        for i in 0..4 {
            let radius: f64 =
                (0..4).filter(|&j| j != i).map(|j| phi.at(i, j).abs()).sum();
            assert!(phi.at(i, i) > radius);
        }
    }

    #[test]
    fn derivative_entries_all_positive() {
        let sys = DeltaSystem::new(
            PhysicalConstants::new(1.3, 0.8).unwrap(),
            vec![-2.0, 0.1, 0.2, 3.0],
            vec![0.3, 1.0, 2.0, 5.0],
        )
        .unwrap();
        let d = build_phi_derivative(&sys, Kappa::new(0.35).unwrap());
        for &e in d.entries() {
            assert!(e > 0.0);
        }
    }

    #[test]
    fn single_well_derivative_value() {
        // g = 1, m/hbar^2 = 1/2, kappa = 1: derivative entry = g*(m/hbar^2)/kappa^3.
        let sys =
            DeltaSystem::new(PhysicalConstants::default(), vec![0.0], vec![2.0]).unwrap();
        let d = build_phi_derivative(&sys, Kappa::new(1.0).unwrap());
        assert!((d.at(0, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_central_differences() {
        let constants = PhysicalConstants::new(0.9, 1.1).unwrap();
        let sys = DeltaSystem::new(
            constants,
            vec![-1.0, -0.2, 0.7, 1.5],
            vec![2.0, 0.8, 1.3, 3.1],
        )
        .unwrap();
        for &k in &[0.3, 0.8, 2.0, 5.0] {
            let kappa = Kappa::new(k).unwrap();
            let e = energy_from_kappa(kappa, &constants).value();
            let h = 1e-6 * e.abs();
            let above = kappa_from_energy(Energy::new(e - h).unwrap(), &constants);
            let below = kappa_from_energy(Energy::new(e + h).unwrap(), &constants);
            let phi_above = build_phi(&sys, above);
            let phi_below = build_phi(&sys, below);
            let analytic = build_phi_derivative(&sys, kappa);
            for i in 0..4 {
                for j in 0..4 {
                    let fd = (phi_above.at(i, j) - phi_below.at(i, j)) / (2.0 * h);
                    assert!(
                        (fd - analytic.at(i, j)).abs() <= 1e-6 * analytic.at(i, j).abs(),
                        "entry ({i},{j}) at kappa={k}: fd={fd}, analytic={}",
                        analytic.at(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_requires_natural_units() {
        let sys = DeltaSystem::new(
            PhysicalConstants::new(2.0, 1.0).unwrap(),
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(
            build_gamma(&sys, Kappa::new(1.0).unwrap()),
            Err(Error::UnitMismatch { .. })
        ));
    }

    #[test]
    fn congruence_reproduces_phi_exactly() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![-1.0, 0.0, 0.8, 2.2],
            vec![0.5, 2.0, 1.1, 3.0],
        )
        .unwrap();
        for &k in &[0.2, 0.9, 1.7, 4.0] {
            let report = gamma_phi_equivalence(&sys, Kappa::new(k).unwrap()).unwrap();
            assert!(report.max_deviation <= 1e-15);
            assert!(report.inertia_match);
        }
    }

    #[test]
    fn determinants_agree_when_strength_product_is_one() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 1.5],
            vec![2.0, 0.5],
        )
        .unwrap();
        for i in 0..20 {
            let k = 0.05 * 1.35f64.powi(i);
            let report = gamma_phi_equivalence(&sys, Kappa::new(k).unwrap()).unwrap();
            assert_eq!(report.det_match, Some(true), "kappa = {k}");
        }
    }

    #[test]
    fn determinants_not_compared_otherwise() {
        let sys = twin(2.0, 1.5);
        let report = gamma_phi_equivalence(&sys, Kappa::new(0.8).unwrap()).unwrap();
        assert_eq!(report.det_match, None);
        // The congruence still holds; only the literal determinants differ
        // (by the factor det S^2 = prod lambda_i = 4).
        assert!(report.max_deviation <= 1e-15);
        assert!((report.det_phi - 4.0 * report.det_gamma).abs() <= 1e-12);
    }

    #[test]
    fn inertia_matches_while_straddling_a_root() {
        // Single well: the root sits exactly at kappa = 1. Check both sides.
        let sys =
            DeltaSystem::new(PhysicalConstants::default(), vec![0.0], vec![2.0]).unwrap();
        let below = gamma_phi_equivalence(&sys, Kappa::new(0.999).unwrap()).unwrap();
        assert_eq!(below.phi_inertia, Inertia { negative: 1, zero: 0, positive: 0 });
        assert!(below.inertia_match);
        let above = gamma_phi_equivalence(&sys, Kappa::new(1.001).unwrap()).unwrap();
        assert_eq!(above.phi_inertia, Inertia { negative: 0, zero: 0, positive: 1 });
        assert!(above.inertia_match);
    }

    #[test]
    fn csv_dump_round_trips() {
        let sys = twin(2.0, 1.0);
        let phi = build_phi(&sys, Kappa::new(0.5).unwrap());
        let csv = phi.to_csv();
        let rows: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(rows.len(), 2);
        for (i, row) in rows.iter().enumerate() {
            let cols: Vec<f64> =
                row.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols.len(), 2);
            for (j, v) in cols.iter().enumerate() {
                assert_eq!(*v, phi.at(i, j));
            }
        }
    }
}
