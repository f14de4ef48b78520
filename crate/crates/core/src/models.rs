//! Basic (nominal) Walfisch-type pathloss models.
//!
//! Units are fixed throughout: distance in km, frequency in MHz, heights and
//! widths in m, angles in degrees, losses in dB. The transmitter is assumed
//! to sit above the rooftops (`dh_tx_m > 0`), and only the street-orientation
//! range 0..=55 degrees is supported.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Per-campaign link and environment parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terrain {
    /// Operating frequency, MHz.
    pub f_mhz: f64,
    /// Street width, m.
    pub w_m: f64,
    /// Building separation, m.
    pub b_m: f64,
    /// Street orientation (angle of incidence), degrees.
    pub phi_deg: f64,
    /// Rooftop height minus mobile-station height, m.
    pub dh_rx_m: f64,
    /// Transmitter antenna height minus rooftop height, m.
    pub dh_tx_m: f64,
}

impl Terrain {
    pub fn new(
        f_mhz: f64,
        w_m: f64,
        b_m: f64,
        phi_deg: f64,
        dh_rx_m: f64,
        dh_tx_m: f64,
    ) -> Result<Self> {
        let t = Terrain {
            f_mhz,
            w_m,
            b_m,
            phi_deg,
            dh_rx_m,
            dh_tx_m,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        positive("f_mhz", self.f_mhz)?;
        positive("w_m", self.w_m)?;
        positive("b_m", self.b_m)?;
        positive("dh_rx_m", self.dh_rx_m)?;
        positive("dh_tx_m", self.dh_tx_m)?;
        check_phi(self.phi_deg)
    }

    /// Largest distance (exclusive) at which the Walfisch-Bertoni curvature
    /// term is defined: `sqrt(17·Δh_tx)` km.
    pub fn wb_limit_km(&self) -> f64 {
        (17.0 * self.dh_tx_m).sqrt()
    }
}

fn positive(quantity: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(quantity, value, "finite and > 0"))
    }
}

fn check_phi(phi_deg: f64) -> Result<()> {
    if (0.0..=55.0).contains(&phi_deg) {
        Ok(())
    } else {
        Err(Error::domain("phi_deg", phi_deg, "0 <= phi <= 55"))
    }
}

pub(crate) fn check_distance(d_km: f64) -> Result<()> {
    positive("d_km", d_km)
}

/// Which rooftop-to-street constant (and >2 GHz rule) a Walfisch-Ikegami
/// variant uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cost,
    Itu,
}

/// Multiscreen frequency-dependence class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Density {
    Metro,
    Suburban,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    CwiM,
    CwiSu,
    ItwiM,
    ItwiSu,
    WBert,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::CwiM,
        ModelKind::CwiSu,
        ModelKind::ItwiM,
        ModelKind::ItwiSu,
        ModelKind::WBert,
    ];

    pub const WALFISCH_IKEGAMI: [ModelKind; 4] = [
        ModelKind::CwiM,
        ModelKind::CwiSu,
        ModelKind::ItwiM,
        ModelKind::ItwiSu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::CwiM => "CWI-M",
            ModelKind::CwiSu => "CWI-SU",
            ModelKind::ItwiM => "ITWI-M",
            ModelKind::ItwiSu => "ITWI-SU",
            ModelKind::WBert => "W-BERT",
        }
    }

    /// Family and density for Walfisch-Ikegami variants; `None` for W-BERT.
    pub fn walfisch_ikegami(self) -> Option<(Family, Density)> {
        match self {
            ModelKind::CwiM => Some((Family::Cost, Density::Metro)),
            ModelKind::CwiSu => Some((Family::Cost, Density::Suburban)),
            ModelKind::ItwiM => Some((Family::Itu, Density::Metro)),
            ModelKind::ItwiSu => Some((Family::Itu, Density::Suburban)),
            ModelKind::WBert => None,
        }
    }

    pub fn is_walfisch_bertoni(self) -> bool {
        self == ModelKind::WBert
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown model `{s}` (expected one of CWI-M, CWI-SU, ITWI-M, ITWI-SU, W-BERT)"
                ))
            })
    }
}

/// Free-space loss `32.4 + 20·log10(d) + 20·log10(f)`.
pub fn free_space_loss(d_km: f64, f_mhz: f64) -> Result<f64> {
    check_distance(d_km)?;
    positive("f_mhz", f_mhz)?;
    Ok(32.4 + 20.0 * d_km.log10() + 20.0 * f_mhz.log10())
}

/// Leading constant of the rooftop-to-street loss.
pub fn rts_constant(family: Family) -> f64 {
    match family {
        Family::Cost => -16.9,
        Family::Itu => -8.2,
    }
}

/// Street-orientation correction. The branch boundary at 35 degrees belongs
/// to the upper branch.
pub fn orientation_term(phi_deg: f64) -> Result<f64> {
    check_phi(phi_deg)?;
    Ok(if phi_deg < 35.0 {
        -10.0 + 0.354 * phi_deg
    } else {
        2.5 + 0.075 * (phi_deg - 35.0)
    })
}

/// Roof-top-to-street diffraction and scatter loss.
pub fn rooftop_to_street_loss(t: &Terrain, family: Family) -> Result<f64> {
    t.validate()?;
    Ok(rts_constant(family) - 10.0 * t.w_m.log10()
        + 10.0 * t.f_mhz.log10()
        + 20.0 * t.dh_rx_m.log10()
        + orientation_term(t.phi_deg)?)
}

fn above_2ghz_itu(t: &Terrain, family: Family) -> bool {
    family == Family::Itu && t.f_mhz > 2000.0
}

/// Base-station-height constant of the multiscreen loss (54, or 71.4 for the
/// ITU family above 2 GHz).
pub fn k_a(t: &Terrain, family: Family) -> f64 {
    if above_2ghz_itu(t, family) {
        71.4
    } else {
        54.0
    }
}

/// Coefficient multiplying `log10(f)` in the multiscreen loss.
pub fn k_f(t: &Terrain, density: Density, family: Family) -> f64 {
    if above_2ghz_itu(t, family) {
        return -8.0;
    }
    let slope = match density {
        Density::Metro => 1.5,
        Density::Suburban => 0.7,
    };
    slope * (t.f_mhz / 925.0 - 1.0) - 4.0
}

/// Multiscreen diffraction loss.
pub fn multiscreen_loss(t: &Terrain, d_km: f64, density: Density, family: Family) -> Result<f64> {
    t.validate()?;
    check_distance(d_km)?;
    Ok(-18.0 * (1.0 + t.dh_tx_m).log10()
        + k_a(t, family)
        + 18.0 * d_km.log10()
        + k_f(t, density, family) * t.f_mhz.log10()
        - 9.0 * t.b_m.log10())
}

/// Building-geometry term `A` of the Walfisch-Bertoni excess loss. The
/// arc-tangent is taken in degrees.
pub fn building_geometry_term(t: &Terrain) -> f64 {
    let half_b = t.b_m / 2.0;
    5.0 * (half_b * half_b + t.dh_rx_m * t.dh_rx_m).log10() - 9.0 * t.b_m.log10()
        + 20.0 * (2.0 * t.dh_rx_m / t.b_m).atan().to_degrees().log10()
}

/// Earth-curvature term `-18·log10(1 - d²/(17·Δh_tx))`.
pub fn curvature_term(t: &Terrain, d_km: f64) -> Result<f64> {
    check_distance(d_km)?;
    let arg = 1.0 - d_km * d_km / (17.0 * t.dh_tx_m);
    if arg <= 0.0 {
        return Err(Error::Curvature {
            d_km,
            limit_km: t.wb_limit_km(),
        });
    }
    Ok(-18.0 * arg.log10())
}

/// Walfisch-Bertoni excess loss.
pub fn wb_excess_loss(t: &Terrain, d_km: f64) -> Result<f64> {
    t.validate()?;
    let curvature = curvature_term(t, d_km)?;
    Ok(
        57.1 + t.f_mhz.log10() + 18.0 * d_km.log10() - 18.0 * t.dh_tx_m.log10()
            + curvature
            + building_geometry_term(t),
    )
}

/// Nominal prediction of the given variant.
pub fn predict_basic(kind: ModelKind, t: &Terrain, d_km: f64) -> Result<f64> {
    let fsp = free_space_loss(d_km, t.f_mhz)?;
    match kind.walfisch_ikegami() {
        Some((family, density)) => Ok(fsp
            + rooftop_to_street_loss(t, family)?
            + multiscreen_loss(t, d_km, density, family)?),
        None => Ok(fsp + wb_excess_loss(t, d_km)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terrain() -> Terrain {
        Terrain::new(900.0, 20.0, 24.0, 30.0, 12.0, 10.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn free_space_examples() {
        close(free_space_loss(1.0, 1.0).unwrap(), 32.4, 1e-12);
        close(free_space_loss(10.0, 1000.0).unwrap(), 112.4, 1e-12);
        close(
            free_space_loss(1.0, 900.0).unwrap(),
            91.484_850_188_786_5,
            1e-9,
        );
    }

    #[test]
    fn free_space_rejects_non_positive() {
        assert!(matches!(
            free_space_loss(0.0, 900.0),
            Err(Error::Domain {
                quantity: "d_km",
                ..
            })
        ));
        assert!(free_space_loss(1.0, -1.0).is_err());
        assert!(free_space_loss(f64::NAN, 900.0).is_err());
    }

    #[test]
    fn rooftop_to_street_unit_terrain() {
        let mut t = Terrain::new(1.0, 10.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        close(
            rooftop_to_street_loss(&t, Family::Cost).unwrap(),
            -36.9,
            1e-12,
        );
        close(
            rooftop_to_street_loss(&t, Family::Itu).unwrap(),
            -28.2,
            1e-12,
        );
        t.phi_deg = 56.0;
        assert!(rooftop_to_street_loss(&t, Family::Cost).is_err());
        t.phi_deg = -0.1;
        assert!(rooftop_to_street_loss(&t, Family::Cost).is_err());
    }

    #[test]
    fn orientation_branches() {
        close(orientation_term(35.0).unwrap(), 2.5, 1e-12);
        close(orientation_term(35.0 - 1e-12).unwrap(), 2.39, 1e-9);
        close(orientation_term(55.0).unwrap(), 4.0, 1e-12);
        close(orientation_term(0.0).unwrap(), -10.0, 1e-12);
        assert!(orientation_term(55.0001).is_err());
    }

    #[test]
    fn multiscreen_at_925_mhz() {
        let t = Terrain::new(925.0, 20.0, 25.0, 0.0, 5.0, 4.0).unwrap();
        close(k_f(&t, Density::Metro, Family::Cost), -4.0, 1e-12);
        close(k_f(&t, Density::Suburban, Family::Itu), -4.0, 1e-12);
        close(k_a(&t, Family::Itu), 54.0, 0.0);
        let d1 = multiscreen_loss(&t, 1.0, Density::Metro, Family::Cost).unwrap();
        let d10 = multiscreen_loss(&t, 10.0, Density::Metro, Family::Cost).unwrap();
        close(d10 - d1, 18.0, 1e-12);
    }

    #[test]
    fn above_2ghz_rule_is_itu_only() {
        let t = Terrain::new(3400.0, 20.0, 25.0, 0.0, 5.0, 4.0).unwrap();
        close(k_a(&t, Family::Itu), 71.4, 0.0);
        close(k_f(&t, Density::Suburban, Family::Itu), -8.0, 0.0);
        close(k_a(&t, Family::Cost), 54.0, 0.0);
        close(
            k_f(&t, Density::Metro, Family::Cost),
            1.5 * (3400.0 / 925.0 - 1.0) - 4.0,
            1e-12,
        );
        // exactly 2000 MHz stays on the standard constants
        let t = Terrain { f_mhz: 2000.0, ..t };
        close(k_a(&t, Family::Itu), 54.0, 0.0);
    }

    #[test]
    fn curvature_domain() {
        let t = terrain();
        close(curvature_term(&t, 1e-9).unwrap(), 0.0, 1e-12);
        assert!(curvature_term(&t, 13.0).is_ok());
        assert!(matches!(
            wb_excess_loss(&t, 13.5),
            Err(Error::Curvature { .. })
        ));
        assert!(wb_excess_loss(&t, 170f64.sqrt()).is_err());
    }

    #[test]
    fn geometry_term_at_unit_arctangent() {
        // b = 2·Δh_rx makes the arc-tangent exactly 45 degrees
        let t = Terrain::new(900.0, 20.0, 24.0, 0.0, 12.0, 10.0).unwrap();
        let angle_part = building_geometry_term(&t) - 5.0 * 288f64.log10() + 9.0 * 24f64.log10();
        close(angle_part, 20.0 * 45f64.log10(), 1e-12);
        close(20.0 * 45f64.log10(), 33.064_250_275_506_3, 1e-9);
    }

    #[test]
    fn family_and_density_deltas() {
        let t = terrain();
        for d in [0.1, 0.5, 1.0, 3.0, 12.0] {
            let cost = predict_basic(ModelKind::CwiSu, &t, d).unwrap();
            let itu = predict_basic(ModelKind::ItwiSu, &t, d).unwrap();
            close(itu - cost, 8.7, 1e-9);
            let m = predict_basic(ModelKind::CwiM, &t, d).unwrap();
            close(m - cost, 0.8 * (900.0 / 925.0 - 1.0) * 900f64.log10(), 1e-9);
        }
    }

    #[test]
    fn model_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert_eq!(" itwi-su ".parse::<ModelKind>().unwrap(), ModelKind::ItwiSu);
        assert!("ECC-33".parse::<ModelKind>().is_err());
    }

    #[test]
    fn terrain_validation() {
        assert!(Terrain::new(900.0, 20.0, 24.0, 30.0, 12.0, 0.0).is_err());
        assert!(Terrain::new(900.0, 0.0, 24.0, 30.0, 12.0, 1.0).is_err());
        assert!(Terrain::new(900.0, 20.0, 24.0, 60.0, 12.0, 1.0).is_err());
    }
}
