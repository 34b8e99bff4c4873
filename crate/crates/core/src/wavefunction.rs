//! Bound-state wave functions `psi(x) = sum_i c_i exp(-kappa |x - a_i|)`:
//! construction from null vectors, closed-form norms and inner products,
//! analytic node location, delta-well matching residuals, and Wronskians.

use crate::error::{Error, Result};
use crate::model::{DeltaSystem, Kappa};
use crate::spectrum::BoundState;

/// Normalized piecewise-exponential function anchored at the well centers.
///
/// Between consecutive anchors (and on both tails) the function is a pure
/// combination `A e^{kappa (x - ref)} + B e^{-kappa (x - ref)}`, with `ref`
/// the left anchor of the interval, so every stored exponent is
/// non-positive and evaluation never overflows.
#[derive(Debug, Clone)]
pub struct PiecewiseExpWaveFunction {
    kappa: f64,
    anchors: Vec<f64>,
    coefficients: Vec<f64>,
    /// L2 norm of the coefficient set the function was built from, kept from
    /// before the stored coefficients were scaled to unit norm.
    norm: f64,
}

impl PiecewiseExpWaveFunction {
    /// Validates anchors (finite, strictly ascending) and coefficients
    /// (finite, not all zero), then stores the unit-norm scaling of the
    /// given coefficients along with their original L2 norm.
    pub fn new(kappa: Kappa, anchors: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        if anchors.is_empty() || anchors.len() != coefficients.len() {
            return Err(Error::BadGeometry(format!(
                "{} anchors but {} coefficients",
                anchors.len(),
                coefficients.len()
            )));
        }
        if anchors.iter().chain(&coefficients).any(|v| !v.is_finite()) {
            return Err(Error::BadGeometry("non-finite anchor or coefficient".into()));
        }
        for w in anchors.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::BadGeometry(format!(
                    "anchors {} and {} are not strictly ascending",
                    w[0], w[1]
                )));
            }
        }
        let k = kappa.value();
        let norm2 = closed_form_overlap(k, &anchors, &coefficients, &coefficients);
        if !(norm2.is_finite() && norm2 > 0.0) {
            return Err(Error::BadGeometry(format!(
                "coefficient set has vanishing norm (norm^2 = {norm2})"
            )));
        }
        let norm = norm2.sqrt();
        let coefficients = coefficients.iter().map(|c| c / norm).collect();
        Ok(PiecewiseExpWaveFunction { kappa: k, anchors, coefficients, norm })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    /// Unit-norm coefficients.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// L2 norm of the pre-normalization coefficient set.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `(A, B, ref)` for the interval containing `x`; anchors belong to the
    /// interval on their right, so derivatives at an anchor are one-sided
    /// from the right.
    fn interval_parts(&self, x: f64) -> (f64, f64, f64) {
        let p = self.anchors.partition_point(|&a| a <= x);
        self.parts_for_interval(p as isize - 1)
    }

    /// `(A, B, ref)` for the interval whose left anchor has index `i`
    /// (`i = -1` is the left tail; `ref` is then the first anchor).
    fn parts_for_interval(&self, i: isize) -> (f64, f64, f64) {
        let k = self.kappa;
        let split = (i + 1) as usize;
        let reference = if i < 0 { self.anchors[0] } else { self.anchors[i as usize] };
        let mut a_coef = 0.0;
        let mut b_coef = 0.0;
        for (j, (&aj, &cj)) in self.anchors.iter().zip(&self.coefficients).enumerate() {
            if j < split {
                b_coef += cj * (-k * (reference - aj)).exp();
            } else {
                a_coef += cj * (-k * (aj - reference)).exp();
            }
        }
        (a_coef, b_coef, reference)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let (a_coef, b_coef, reference) = self.interval_parts(x);
        let t = x - reference;
        a_coef * (self.kappa * t).exp() + b_coef * (-self.kappa * t).exp()
    }

    /// Analytic derivative; one-sided from the right at the anchors.
    pub fn derivative(&self, x: f64) -> f64 {
        let (a_coef, b_coef, reference) = self.interval_parts(x);
        let t = x - reference;
        self.kappa * (a_coef * (self.kappa * t).exp() - b_coef * (-self.kappa * t).exp())
    }

    /// Closed-form squared L2 norm of the stored coefficients; unity up to
    /// rounding by construction.
    pub fn norm_squared(&self) -> f64 {
        closed_form_overlap(self.kappa, &self.anchors, &self.coefficients, &self.coefficients)
    }

    /// All isolated zeros, analytically per interval. Within an interval a
    /// zero requires the growing and decaying parts to carry opposite
    /// signs, and sits at `ref + ln(-B/A)/(2 kappa)`; intervals are
    /// half-open on the right, so a zero exactly at an anchor is counted
    /// once. A zero that rounding pushes a hair left of an anchor is
    /// snapped onto it (slop `1e-9/kappa`), and near-coincident reports
    /// from adjacent intervals are merged. Tails hold a single exponential
    /// and contribute no isolated zeros (a vanishing tail coefficient kills
    /// the whole tail instead).
    pub fn nodes(&self) -> Vec<f64> {
        let slop = 1e-9 / self.kappa;
        let mut out: Vec<f64> = Vec::new();
        for i in 0..self.anchors.len().saturating_sub(1) {
            let (a_coef, b_coef, reference) = self.parts_for_interval(i as isize);
            if a_coef * b_coef < 0.0 {
                let t = (-b_coef / a_coef).ln() / (2.0 * self.kappa);
                let x = reference + t.max(0.0);
                if t >= -slop && x < self.anchors[i + 1] {
                    out.push(x);
                }
            }
        }
        out.dedup_by(|current, kept| (*current - *kept).abs() <= slop);
        out
    }
}

/// `integral of f g` for two sets of exponentials at one wave number:
/// `sum_ij f_i g_j e^{-kappa d_ij} (d_ij + 1/kappa)`.
fn closed_form_overlap(kappa: f64, anchors: &[f64], f: &[f64], g: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, &fi) in f.iter().enumerate() {
        for (j, &gj) in g.iter().enumerate() {
            let d = (anchors[i] - anchors[j]).abs();
            total += fi * gj * (-kappa * d).exp() * (d + 1.0 / kappa);
        }
    }
    total
}

fn check_same_support(
    f: &PiecewiseExpWaveFunction,
    g: &PiecewiseExpWaveFunction,
    kappa_rel_tol: f64,
) -> Result<f64> {
    let scale = f.kappa.max(g.kappa);
    if (f.kappa - g.kappa).abs() > kappa_rel_tol * scale {
        return Err(Error::KappaMismatch(f.kappa, g.kappa));
    }
    if f.anchors.len() != g.anchors.len()
        || f.anchors.iter().zip(&g.anchors).any(|(&a, &b)| a != b)
    {
        return Err(Error::BadGeometry("wave functions anchored at different centers".into()));
    }
    Ok(0.5 * (f.kappa + g.kappa))
}

/// Exact L2 inner product of two functions over the same anchors. Wave
/// numbers may differ by at most 1e-6 relative (the product is then
/// evaluated at the mean), which covers members of one merged level.
pub fn inner_product(
    f: &PiecewiseExpWaveFunction,
    g: &PiecewiseExpWaveFunction,
) -> Result<f64> {
    let kappa = check_same_support(f, g, 1e-6)?;
    Ok(closed_form_overlap(kappa, &f.anchors, &f.coefficients, &g.coefficients))
}

/// Wave function for one null vector of a bound level.
///
/// The coefficients are `c_i = sqrt(lambda_i) phi_i m / (hbar^2 kappa)`,
/// which makes the unnormalized function reproduce `phi_i / sqrt(lambda_i)`
/// exactly at each center; the stored function is scaled to unit L2 norm.
/// Within a degenerate level the members are built in order and
/// orthogonalized in L2 against their predecessors (any mix of equal-energy
/// solutions is again a solution), so the returned family is orthonormal.
pub fn build_wavefunction(
    sys: &DeltaSystem,
    state: &BoundState,
    null_vector_index: usize,
) -> Result<PiecewiseExpWaveFunction> {
    if null_vector_index >= state.multiplicity {
        return Err(Error::IndexOutOfRange {
            index: null_vector_index,
            order: state.multiplicity,
        });
    }
    let mh = sys.constants().mass / sys.constants().hbar.powi(2);
    let mut family: Vec<PiecewiseExpWaveFunction> = Vec::new();
    for idx in 0..=null_vector_index {
        let kappa = state.branch_roots[idx];
        let raw: Vec<f64> = state.null_vectors[idx]
            .iter()
            .zip(sys.strengths())
            .map(|(&phi, &lambda)| lambda.sqrt() * phi * mh / kappa)
            .collect();
        let mut wf = PiecewiseExpWaveFunction::new(Kappa::new(kappa)?, sys.centers().to_vec(), raw)?;
        for prev in &family {
            let overlap = inner_product(prev, &wf)?;
            if overlap.abs() > 1e-10 {
                let mixed: Vec<f64> = wf
                    .coefficients
                    .iter()
                    .zip(&prev.coefficients)
                    .map(|(&c, &p)| c - overlap * p)
                    .collect();
                wf = PiecewiseExpWaveFunction::new(
                    Kappa::new(kappa)?,
                    sys.centers().to_vec(),
                    mixed,
                )?;
            }
        }
        family.push(wf);
    }
    Ok(family.pop().expect("family contains at least one member"))
}

/// Matching residual at every center, from the analytic one-sided
/// derivatives: `|psi'(a_i+) - psi'(a_i-) + (2 m lambda_i / hbar^2) psi(a_i)|`.
/// For a true bound state every residual is at machine level; the natural
/// scale for comparison is `max_i |c_i| * kappa`.
pub fn jump_condition_residuals(
    sys: &DeltaSystem,
    wf: &PiecewiseExpWaveFunction,
) -> Result<Vec<f64>> {
    if wf.anchors.len() != sys.len()
        || wf.anchors.iter().zip(sys.centers()).any(|(&a, &b)| a != b)
    {
        return Err(Error::BadGeometry(
            "wave function anchors do not match the system centers".into(),
        ));
    }
    let k = wf.kappa;
    let mut out = Vec::with_capacity(sys.len());
    for i in 0..sys.len() {
        let x = wf.anchors[i];
        let (ar, br, rr) = wf.parts_for_interval(i as isize);
        let tr = x - rr;
        let right = k * (ar * (k * tr).exp() - br * (-k * tr).exp());
        let (al, bl, rl) = wf.parts_for_interval(i as isize - 1);
        let tl = x - rl;
        let left = k * (al * (k * tl).exp() - bl * (-k * tl).exp());
        let jump = right - left;
        out.push((jump + 2.0 * sys.well_kappa(i) * wf.evaluate(x)).abs());
    }
    Ok(out)
}

/// Wronskian `psi_2 psi_1' - psi_1 psi_2'` at `x`; piecewise constant, equal
/// to `2 kappa (A_1 B_2 - A_2 B_1)` on each interval, and zero on both
/// tails. Requires matching anchors and wave numbers (1e-12 relative).
pub fn wronskian(
    f: &PiecewiseExpWaveFunction,
    g: &PiecewiseExpWaveFunction,
    x: f64,
) -> Result<f64> {
    let kappa = check_same_support(f, g, 1e-12)?;
    let (a1, b1, _) = f.interval_parts(x);
    let (a2, b2, _) = g.interval_parts(x);
    Ok(2.0 * kappa * (a1 * b2 - a2 * b1))
}

/// The constant Wronskian value of each interval, tails included:
/// `[left tail, between-anchor intervals.., right tail]` (length `N + 1`).
pub fn wronskian_profile(
    f: &PiecewiseExpWaveFunction,
    g: &PiecewiseExpWaveFunction,
) -> Result<Vec<f64>> {
    let kappa = check_same_support(f, g, 1e-12)?;
    let n = f.anchors.len();
    Ok((-1..n as isize)
        .map(|i| {
            let (a1, b1, _) = f.parts_for_interval(i);
            let (a2, b2, _) = g.parts_for_interval(i);
            2.0 * kappa * (a1 * b2 - a2 * b1)
        })
        .collect())
}

/// Normalized combination of two equal-energy functions vanishing at `x0`:
/// `g(x0) f - f(x0) g`. A two-fold level therefore admits a solution with a
/// zero at any chosen point; placing it at the leftmost anchor extinguishes
/// the entire left tail, since the tail is proportional to its edge value.
pub fn vanishing_combination(
    f: &PiecewiseExpWaveFunction,
    g: &PiecewiseExpWaveFunction,
    x0: f64,
) -> Result<PiecewiseExpWaveFunction> {
    let kappa = check_same_support(f, g, 1e-12)?;
    let (fx, gx) = (f.evaluate(x0), g.evaluate(x0));
    let coefficients: Vec<f64> = f
        .coefficients
        .iter()
        .zip(&g.coefficients)
        .map(|(&cf, &cg)| gx * cf - fx * cg)
        .collect();
    PiecewiseExpWaveFunction::new(Kappa::new(kappa)?, f.anchors.clone(), coefficients)
}
