//! Dense symmetric eigensolver (cyclic Jacobi rotations) and eigenvalue
//! branch scans of the secular matrix over a wave-number grid.

use crate::error::{Error, Result};
use crate::model::{DeltaSystem, Kappa};
use crate::phimatrix::{self, SpectralMatrix};

const MAX_SWEEPS: usize = 50;

/// Eigenvalues sorted ascending with matching orthonormal eigenvectors.
///
/// The decomposition is deterministic for identical input: eigenvalues are
/// sorted ascending, each eigenvector's first significant component is made
/// positive, and within a degenerate cluster the basis is rebuilt by
/// Gram-Schmidt against the canonical basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unit eigenvector for the k-th smallest eigenvalue (0-based).
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.eigenvectors[k]
    }
}

/// Cyclic Jacobi diagonalization of a symmetric matrix. Fails with
/// [`Error::NoConvergence`] if the off-diagonal mass has not vanished after
/// 50 sweeps.
pub fn eigen_decompose(m: &SpectralMatrix) -> Result<EigenDecomposition> {
    let n = m.order();
    let mut a = m.entries().to_vec();
    let idx = |i: usize, j: usize| i * n + j;
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[idx(i, i)] = 1.0;
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let mut sm = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                sm += a[idx(p, q)].abs();
            }
        }
        if sm == 0.0 {
            converged = true;
            break;
        }
        let tresh = if sweep < 3 { 0.2 * sm / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let g = 100.0 * a[idx(p, q)].abs();
                if sweep > 3
                    && d[p].abs() + g == d[p].abs()
                    && d[q].abs() + g == d[q].abs()
                {
                    a[idx(p, q)] = 0.0;
                } else if a[idx(p, q)].abs() > tresh {
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        a[idx(p, q)] / h
                    } else {
                        let theta = 0.5 * h / a[idx(p, q)];
                        let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            t = -t;
                        }
                        t
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * a[idx(p, q)];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[idx(p, q)] = 0.0;
                    let rot = |a: &mut [f64], i: usize, j: usize, k: usize, l: usize| {
                        let g = a[idx(i, j)];
                        let h = a[idx(k, l)];
                        a[idx(i, j)] = g - s * (h + g * tau);
                        a[idx(k, l)] = h + s * (g - h * tau);
                    };
                    for j in 0..p {
                        rot(&mut a, j, p, j, q);
                    }
                    for j in (p + 1)..q {
                        rot(&mut a, p, j, j, q);
                    }
                    for j in (q + 1)..n {
                        rot(&mut a, p, j, q, j);
                    }
                    for j in 0..n {
                        rot(&mut v, j, p, j, q);
                    }
                }
            }
        }
        for p in 0..n {
            b[p] += z[p];
            d[p] = b[p];
            z[p] = 0.0;
        }
    }
    if !converged {
        // The loop above breaks on convergence; reaching the cap without an
        // early break means a final check is still owed.
        let mut sm = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                sm += a[idx(p, q)].abs();
            }
        }
        if sm != 0.0 {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[idx(row, col)]).collect())
        .collect();

    canonicalize_clusters(&eigenvalues, &mut eigenvectors, m.norm_inf());
    for vec in &mut eigenvectors {
        fix_sign(vec);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// Rebuilds each degenerate cluster's basis deterministically: canonical
/// basis vectors are projected onto the cluster subspace in index order and
/// orthonormalized, erasing the arbitrary rotation history of the solver.
fn canonicalize_clusters(values: &[f64], vectors: &mut [Vec<f64>], scale: f64) {
    let n = values.len();
    let ctol = 1e-12 * scale.max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= ctol {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            let cluster: Vec<Vec<f64>> = vectors[start..end].to_vec();
            let mut basis: Vec<Vec<f64>> = Vec::with_capacity(size);
            for i in 0..n {
                if basis.len() == size {
                    break;
                }
                // Projection of e_i onto the cluster subspace.
                let mut w = vec![0.0; n];
                for vk in &cluster {
                    let coef = vk[i];
                    for (wj, &vj) in w.iter_mut().zip(vk) {
                        *wj += coef * vj;
                    }
                }
                for accepted in &basis {
                    let dot: f64 = w.iter().zip(accepted).map(|(&a, &b)| a * b).sum();
                    for (wj, &aj) in w.iter_mut().zip(accepted) {
                        *wj -= dot * aj;
                    }
                }
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    for wj in &mut w {
                        *wj /= norm;
                    }
                    basis.push(w);
                }
            }
            if basis.len() == size {
                for (slot, fresh) in vectors[start..end].iter_mut().zip(basis) {
                    *slot = fresh;
                }
            }
        }
        start = end;
    }
}

/// Makes the first component whose magnitude is significant positive.
fn fix_sign(v: &mut [f64]) {
    let max_abs = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if let Some(&lead) = v.iter().find(|&&x| x.abs() > 1e-10 * max_abs) {
        if lead < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// All eigenvalue branches of `Phi(kappa)`, sorted ascending.
pub fn branch_values(sys: &DeltaSystem, kappa: Kappa) -> Result<Vec<f64>> {
    let phi = phimatrix::build_phi(sys, kappa);
    Ok(eigen_decompose(&phi)?.eigenvalues().to_vec())
}

/// The k-th smallest eigenvalue of `Phi(kappa)`; `k` is 1-based to match the
/// `omega_k` column naming of the flow output.
pub fn branch_value(sys: &DeltaSystem, k: usize, kappa: Kappa) -> Result<f64> {
    let n = sys.len();
    if k == 0 || k > n {
        return Err(Error::BranchOutOfRange { index: k, order: n });
    }
    Ok(branch_values(sys, kappa)?[k - 1])
}

/// Eigenvalue branches sampled over a geometric wave-number grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenFlow {
    kappa_grid: Vec<f64>,
    /// `rows[i]` holds the sorted branch values at `kappa_grid[i]`.
    rows: Vec<Vec<f64>>,
}

impl EigenFlow {
    pub fn kappa_grid(&self) -> &[f64] {
        &self.kappa_grid
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn branch_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// CSV with header `kappa,omega_1,...,omega_N` and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.branch_count();
        let mut out = String::from("kappa");
        for k in 1..=n {
            out.push_str(&format!(",omega_{k}"));
        }
        out.push('\n');
        for (kappa, row) in self.kappa_grid.iter().zip(&self.rows) {
            out.push_str(&format!("{kappa:.16e}"));
            for w in row {
                out.push_str(&format!(",{w:.16e}"));
            }
            out.push('\n');
        }
        out
    }

    /// Grid intervals on which a branch changes sign: `(branch (1-based),
    /// kappa_left, kappa_right)`. An exact zero at a grid point yields a
    /// degenerate interval.
    pub fn sign_changes(&self) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        for j in 0..self.branch_count() {
            for i in 0..self.rows.len() {
                let cur = self.rows[i][j];
                if cur == 0.0 {
                    out.push((j + 1, self.kappa_grid[i], self.kappa_grid[i]));
                } else if i + 1 < self.rows.len() {
                    let next = self.rows[i + 1][j];
                    if cur * next < 0.0 {
                        out.push((j + 1, self.kappa_grid[i], self.kappa_grid[i + 1]));
                    }
                }
            }
        }
        out
    }
}

/// Samples every branch of `Phi` on a geometric grid from `kappa_min` to
/// `kappa_max` with `samples` points.
pub fn scan_flow(
    sys: &DeltaSystem,
    kappa_min: f64,
    kappa_max: f64,
    samples: usize,
) -> Result<EigenFlow> {
    if !(kappa_min.is_finite() && kappa_min > 0.0 && kappa_max.is_finite())
        || kappa_max <= kappa_min
    {
        return Err(Error::BadRange(format!(
            "wave-number interval [{kappa_min}, {kappa_max}] is not positive and increasing"
        )));
    }
    if samples < 2 {
        return Err(Error::BadRange(format!("{samples} samples; at least 2 required")));
    }
    let ratio = kappa_max / kappa_min;
    let mut kappa_grid = Vec::with_capacity(samples);
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let frac = i as f64 / (samples - 1) as f64;
        let k = if i + 1 == samples { kappa_max } else { kappa_min * ratio.powf(frac) };
        kappa_grid.push(k);
        rows.push(branch_values(sys, Kappa::new(k)?)?);
    }
    Ok(EigenFlow { kappa_grid, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhysicalConstants;
    use crate::phimatrix::build_phi;

    fn decompose_raw(n: usize, entries: Vec<f64>) -> EigenDecomposition {
        eigen_decompose(&SpectralMatrix::for_tests(n, entries)).unwrap()
    }

    #[test]
    fn two_by_two_known_pair() {
        let dec = decompose_raw(2, vec![2.0, 1.0, 1.0, 2.0]);
        assert!((dec.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((dec.eigenvalues()[1] - 3.0).abs() < 1e-14);
        let inv = 1.0 / 2f64.sqrt();
        let v0 = dec.eigenvector(0);
        assert!((v0[0] - inv).abs() < 1e-14 && (v0[1] + inv).abs() < 1e-14);
        let v1 = dec.eigenvector(1);
        assert!((v1[0] - inv).abs() < 1e-14 && (v1[1] - inv).abs() < 1e-14);
    }

    #[test]
    fn twin_matrix_eigenpairs_match_closed_form() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 2.0],
            vec![2.0, 2.0],
        )
        .unwrap();
        let phi = build_phi(&sys, Kappa::new(1.0).unwrap());
        let dec = eigen_decompose(&phi).unwrap();
        let e2 = (-2.0f64).exp();
        assert!((dec.eigenvalues()[0] + e2).abs() < 1e-15);
        assert!((dec.eigenvalues()[1] - e2).abs() < 1e-15);
        let inv = 1.0 / 2f64.sqrt();
        assert!((dec.eigenvector(0)[0] - inv).abs() < 1e-12);
        assert!((dec.eigenvector(0)[1] - inv).abs() < 1e-12);
        assert!((dec.eigenvector(1)[0] - inv).abs() < 1e-12);
        assert!((dec.eigenvector(1)[1] + inv).abs() < 1e-12);
    }

    #[test]
    fn already_diagonal_sorts_ascending() {
        let dec = decompose_raw(3, vec![5.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(dec.eigenvalues(), &[-1.0, 2.0, 5.0]);
        assert_eq!(dec.eigenvector(0), &[0.0, 1.0, 0.0]);
        assert_eq!(dec.eigenvector(2), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn degenerate_cluster_gets_canonical_basis() {
        let dec = decompose_raw(3, vec![2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 7.0]);
        assert_eq!(dec.eigenvalues(), &[2.0, 2.0, 7.0]);
        assert_eq!(dec.eigenvector(0), &[1.0, 0.0, 0.0]);
        assert_eq!(dec.eigenvector(1), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn residual_orthonormality_and_reconstruction() {
        // Fixed 6x6 symmetric matrix with scattered magnitudes.
        let n = 6;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = ((i * 7 + j * 3 + 1) as f64 * 0.37).sin() * (1.0 + i as f64);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        let m = SpectralMatrix::for_tests(n, entries);
        let dec = eigen_decompose(&m).unwrap();
        let scale = m.norm_inf();
        for k in 0..n {
            let v = dec.eigenvector(k);
            let mv = m.apply(v);
            for i in 0..n {
                assert!((mv[i] - dec.eigenvalues()[k] * v[i]).abs() <= 1e-12 * scale);
            }
            for l in 0..n {
                let dot: f64 =
                    v.iter().zip(dec.eigenvector(l)).map(|(&a, &b)| a * b).sum();
                let target = if k == l { 1.0 } else { 0.0 };
                assert!((dot - target).abs() <= 1e-12);
            }
        }
        for i in 0..n {
            for j in 0..n {
                let rebuilt: f64 = (0..n)
                    .map(|k| {
                        dec.eigenvalues()[k] * dec.eigenvector(k)[i] * dec.eigenvector(k)[j]
                    })
                    .sum();
                assert!((rebuilt - m.at(i, j)).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn branch_index_is_one_based_and_checked() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 1.0],
            vec![2.0, 2.0],
        )
        .unwrap();
        let k = Kappa::new(1.0).unwrap();
        assert!(matches!(
            branch_value(&sys, 0, k),
            Err(Error::BranchOutOfRange { index: 0, order: 2 })
        ));
        assert!(matches!(
            branch_value(&sys, 3, k),
            Err(Error::BranchOutOfRange { index: 3, order: 2 })
        ));
        let lo = branch_value(&sys, 1, k).unwrap();
        let hi = branch_value(&sys, 2, k).unwrap();
        assert!(lo < hi);
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let sys =
            DeltaSystem::new(PhysicalConstants::default(), vec![0.0], vec![2.0]).unwrap();
        assert!(matches!(scan_flow(&sys, 0.0, 1.0, 10), Err(Error::BadRange(_))));
        assert!(matches!(scan_flow(&sys, 2.0, 1.0, 10), Err(Error::BadRange(_))));
        assert!(matches!(scan_flow(&sys, 0.1, 1.0, 1), Err(Error::BadRange(_))));
    }

    #[test]
    fn scan_grid_is_geometric_with_exact_endpoints() {
        let sys =
            DeltaSystem::new(PhysicalConstants::default(), vec![0.0], vec![2.0]).unwrap();
        let flow = scan_flow(&sys, 0.01, 10.0, 7).unwrap();
        let grid = flow.kappa_grid();
        assert_eq!(grid.len(), 7);
        assert_eq!(grid[0], 0.01);
        assert_eq!(grid[6], 10.0);
        let r0 = grid[1] / grid[0];
        for w in grid.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-9);
        }
    }

    #[test]
    fn branches_rise_toward_one() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 1.0, 2.5],
            vec![2.0, 1.0, 1.5],
        )
        .unwrap();
        let kappa_star = crate::spectrum::bracket_kappa_max(&sys).value();
        let flow = scan_flow(&sys, 1e-3 * kappa_star, 50.0 * kappa_star, 60).unwrap();
        for j in 0..flow.branch_count() {
            for i in 1..flow.rows().len() {
                assert!(flow.rows()[i][j] >= flow.rows()[i - 1][j] - 1e-10);
            }
        }
        let last = flow.rows().last().unwrap();
        for w in last {
            assert!((w - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn sign_changes_located_per_branch() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 4.0],
            vec![2.0, 2.0],
        )
        .unwrap();
        let flow = scan_flow(&sys, 1e-3, 2.0, 400).unwrap();
        let crossings = flow.sign_changes();
        assert_eq!(crossings.len(), 2);
        let branches: Vec<usize> = crossings.iter().map(|c| c.0).collect();
        assert_eq!(branches, vec![1, 2]);
        for (_, lo, hi) in crossings {
            assert!(lo <= hi && hi <= 2.0);
        }
    }
}
