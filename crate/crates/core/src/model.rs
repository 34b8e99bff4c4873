//! System description: well positions, strengths, physical constants, and
//! the change of variable between bound-state energy and wave number.

use crate::error::{Error, Result};
use serde::Deserialize;

/// Planck constant and particle mass. Defaults are the natural units
/// `hbar = 1`, `mass = 1/2`, in which `kappa = sqrt(|E|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { hbar: 1.0, mass: 0.5 }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::NonPositiveConstant { name: "hbar", value: hbar });
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NonPositiveConstant { name: "mass", value: mass });
        }
        Ok(PhysicalConstants { hbar, mass })
    }

    /// True when the constants equal the natural units `hbar = 1`, `mass = 1/2`
    /// to within 1e-12.
    pub fn is_natural(&self) -> bool {
        (self.hbar - 1.0).abs() <= 1e-12 && (self.mass - 0.5).abs() <= 1e-12
    }
}

/// Strictly positive bound-state wave number `kappa = sqrt(2m|E|)/hbar`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Kappa(f64);

impl Kappa {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveKappa(value));
        }
        Ok(Kappa(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Strictly negative bound-state energy.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Energy(f64);

impl Energy {
    pub fn new(value: f64) -> Result<Self> {
        if !(value.is_finite() && value < 0.0) {
            return Err(Error::NonNegativeEnergy(value));
        }
        Ok(Energy(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `kappa = sqrt(2m|E|)/hbar` for a bound-state energy `E < 0`.
pub fn kappa_from_energy(energy: Energy, constants: &PhysicalConstants) -> Kappa {
    let e = energy.value().abs();
    Kappa((2.0 * constants.mass * e).sqrt() / constants.hbar)
}

/// `E = -hbar^2 kappa^2 / (2m)`, the inverse of [`kappa_from_energy`].
pub fn energy_from_kappa(kappa: Kappa, constants: &PhysicalConstants) -> Energy {
    let k = kappa.value();
    Energy(-(constants.hbar * k).powi(2) / (2.0 * constants.mass))
}

/// A finite set of attractive delta wells on the line.
///
/// Centers are stored sorted ascending; strengths follow their centers.
/// All strengths are strictly positive (attractive wells).
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSystem {
    constants: PhysicalConstants,
    centers: Vec<f64>,
    strengths: Vec<f64>,
}

impl DeltaSystem {
    /// Validates and normalizes a raw description: sorts centers ascending
    /// (carrying the strengths along), rejects empty systems, non-positive or
    /// non-finite strengths, non-finite centers, and centers that coincide
    /// within 1e-12 relative to the span.
    pub fn new(
        constants: PhysicalConstants,
        centers: Vec<f64>,
        strengths: Vec<f64>,
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptySystem);
        }
        if centers.len() != strengths.len() {
            return Err(Error::BadGeometry(format!(
                "{} centers but {} strengths",
                centers.len(),
                strengths.len()
            )));
        }
        for &c in &centers {
            if !c.is_finite() {
                return Err(Error::BadGeometry(format!("center {c} is not finite")));
            }
        }
        for (i, &s) in strengths.iter().enumerate() {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::NonPositiveStrength { index: i, value: s });
            }
        }
        let mut order: Vec<usize> = (0..centers.len()).collect();
        order.sort_by(|&i, &j| centers[i].total_cmp(&centers[j]));
        let centers: Vec<f64> = order.iter().map(|&i| centers[i]).collect();
        let strengths: Vec<f64> = order.iter().map(|&i| strengths[i]).collect();
        let span = centers[centers.len() - 1] - centers[0];
        for w in centers.windows(2) {
            if w[1] - w[0] <= 1e-12 * span {
                return Err(Error::DuplicateCenter { a: w[0], b: w[1] });
            }
        }
        Ok(DeltaSystem { constants, centers, strengths })
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    /// Number of wells.
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Well positions, sorted ascending.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Well strengths, aligned with [`centers`](Self::centers).
    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    /// Distance between the outermost centers (zero for a single well).
    pub fn span(&self) -> f64 {
        self.centers[self.centers.len() - 1] - self.centers[0]
    }

    /// `m lambda_i / hbar^2`: the wave number the i-th well binds on its own.
    pub fn well_kappa(&self, i: usize) -> f64 {
        self.constants.mass * self.strengths[i] / self.constants.hbar.powi(2)
    }

    /// System with center `index` removed; errors when the index is out of
    /// range or only one well is present.
    pub fn without_center(&self, index: usize) -> Result<DeltaSystem> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange { index, order: self.len() });
        }
        let mut centers = self.centers.clone();
        let mut strengths = self.strengths.clone();
        centers.remove(index);
        strengths.remove(index);
        DeltaSystem::new(self.constants, centers, strengths)
    }

    /// True when the wells are equally spaced and equally strong to within
    /// 1e-12 relative.
    pub fn is_equidistant_uniform(&self) -> bool {
        if self.len() == 1 {
            return true;
        }
        let gap = self.centers[1] - self.centers[0];
        let lambda = self.strengths[0];
        self.centers
            .windows(2)
            .all(|w| ((w[1] - w[0]) - gap).abs() <= 1e-12 * gap)
            && self.strengths.iter().all(|&s| (s - lambda).abs() <= 1e-12 * lambda)
    }
}

/// JSON description of a system: `{"hbar", "mass", "centers", "strengths"}`,
/// with `hbar` defaulting to 1 and `mass` to 1/2.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
    pub centers: Vec<f64>,
    pub strengths: Vec<f64>,
}

fn default_hbar() -> f64 {
    1.0
}

fn default_mass() -> f64 {
    0.5
}

impl SystemConfig {
    pub fn into_system(self) -> Result<DeltaSystem> {
        let constants = PhysicalConstants::new(self.hbar, self.mass)?;
        DeltaSystem::new(constants, self.centers, self.strengths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_of_unit_binding_energy() {
        let c = PhysicalConstants::default();
        let k = kappa_from_energy(Energy::new(-1.0).unwrap(), &c);
        assert_eq!(k.value(), 1.0);
    }

    #[test]
    fn kappa_scales_as_sqrt_energy() {
        let c = PhysicalConstants::default();
        let k = kappa_from_energy(Energy::new(-4.0).unwrap(), &c);
        assert!((k.value() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn energy_kappa_round_trip() {
        let c = PhysicalConstants::new(0.7, 1.3).unwrap();
        for exp in -6..=6 {
            let kappa = Kappa::new(10f64.powi(exp)).unwrap();
            let back = kappa_from_energy(energy_from_kappa(kappa, &c), &c);
            assert!((back.value() - kappa.value()).abs() <= 1e-14 * kappa.value());
        }
    }

    #[test]
    fn rejects_non_negative_energy() {
        assert_eq!(Energy::new(0.0), Err(Error::NonNegativeEnergy(0.0)));
        assert!(Energy::new(f64::NAN).is_err());
    }

    #[test]
    fn rejects_non_positive_kappa() {
        assert_eq!(Kappa::new(0.0), Err(Error::NonPositiveKappa(0.0)));
        assert!(Kappa::new(f64::INFINITY).is_err());
    }

    #[test]
    fn sorts_centers_and_carries_strengths() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![2.0, -1.0, 0.5],
            vec![3.0, 1.0, 2.0],
        )
        .unwrap();
        assert_eq!(sys.centers(), &[-1.0, 0.5, 2.0]);
        assert_eq!(sys.strengths(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_empty_system() {
        let r = DeltaSystem::new(PhysicalConstants::default(), vec![], vec![]);
        assert_eq!(r, Err(Error::EmptySystem));
    }

    #[test]
    fn rejects_duplicate_centers() {
        let r = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        );
        assert!(matches!(r, Err(Error::DuplicateCenter { .. })));
    }

    #[test]
    fn rejects_near_duplicate_relative_to_span() {
        // Gap of 1e-14 against a span of 2 sits below the 1e-12 relative floor.
        let r = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![-1.0, 1.0, 1.0 + 1e-14],
            vec![1.0, 1.0, 1.0],
        );
        assert!(matches!(r, Err(Error::DuplicateCenter { .. })));
    }

    #[test]
    fn rejects_non_positive_strength() {
        let r = DeltaSystem::new(PhysicalConstants::default(), vec![0.0], vec![-2.0]);
        assert_eq!(r, Err(Error::NonPositiveStrength { index: 0, value: -2.0 }));
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(matches!(
            PhysicalConstants::new(0.0, 1.0),
            Err(Error::NonPositiveConstant { name: "hbar", .. })
        ));
        assert!(matches!(
            PhysicalConstants::new(1.0, f64::NAN),
            Err(Error::NonPositiveConstant { name: "mass", .. })
        ));
    }

    #[test]
    fn well_kappa_is_single_well_binding() {
        let sys = DeltaSystem::new(PhysicalConstants::default(), vec![0.0], vec![2.0]).unwrap();
        assert_eq!(sys.well_kappa(0), 1.0);
    }

    #[test]
    fn equidistant_uniform_detection() {
        let c = PhysicalConstants::default();
        let yes =
            DeltaSystem::new(c, vec![0.0, 1.0, 2.0, 3.0], vec![2.0, 2.0, 2.0, 2.0]).unwrap();
        assert!(yes.is_equidistant_uniform());
        let spacing =
            DeltaSystem::new(c, vec![0.0, 1.0, 2.5], vec![2.0, 2.0, 2.0]).unwrap();
        assert!(!spacing.is_equidistant_uniform());
        let strength = DeltaSystem::new(c, vec![0.0, 1.0, 2.0], vec![2.0, 2.0, 1.0]).unwrap();
        assert!(!strength.is_equidistant_uniform());
    }

    #[test]
    fn config_defaults_to_natural_units() {
        let cfg: SystemConfig =
            serde_json::from_str(r#"{"centers": [0.0], "strengths": [2.0]}"#).unwrap();
        let sys = cfg.into_system().unwrap();
        assert_eq!(sys.constants().hbar, 1.0);
        assert_eq!(sys.constants().mass, 0.5);
        assert!(sys.constants().is_natural());
    }

    #[test]
    fn without_center_shrinks_system() {
        let sys = DeltaSystem::new(
            PhysicalConstants::default(),
            vec![0.0, 1.0, 2.0],
            vec![1.0, 2.0, 3.0],
        )
        .unwrap();
        let sub = sys.without_center(1).unwrap();
        assert_eq!(sub.centers(), &[0.0, 2.0]);
        assert_eq!(sub.strengths(), &[1.0, 3.0]);
        assert!(matches!(
            sys.without_center(3),
            Err(Error::IndexOutOfRange { index: 3, order: 3 })
        ));
    }
}
