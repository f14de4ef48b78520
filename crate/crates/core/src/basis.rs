//! Expansion/testing function sets.
//!
//! Each basic model is split into its additive component terms. For a fixed
//! terrain most terms are constants in distance; only `log10(d)` terms and the
//! Walfisch-Bertoni curvature term vary. The functions of a set always sum to
//! the basic model's prediction.

use std::fmt;

use faer::Mat;

use crate::error::{Error, Result};
use crate::models::{self, Density, Family, ModelKind, Terrain};

/// Default relative singular-value cutoff for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    /// Free-space loss terms.
    Fsp,
    /// Roof-top-to-street diffraction and scatter.
    Rts,
    /// Multiscreen diffraction.
    Msd,
    /// Merged free-space/excess constants and distance/frequency slopes.
    Core,
    /// Transmitter height above rooftops.
    Height,
    /// Building geometry term `A`.
    Geometry,
    /// Earth-curvature term.
    Curvature,
}

impl Group {
    pub const WALFISCH_IKEGAMI: [Group; 3] = [Group::Fsp, Group::Rts, Group::Msd];
    pub const WALFISCH_BERTONI: [Group; 4] = [
        Group::Core,
        Group::Height,
        Group::Geometry,
        Group::Curvature,
    ];

    pub fn for_kind(kind: ModelKind) -> &'static [Group] {
        if kind.is_walfisch_bertoni() {
            &Self::WALFISCH_BERTONI
        } else {
            &Self::WALFISCH_IKEGAMI
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Fsp => "fsp",
            Group::Rts => "rts",
            Group::Msd => "msd",
            Group::Core => "core",
            Group::Height => "height",
            Group::Geometry => "geometry",
            Group::Curvature => "curvature",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a basis function depends on distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Constant(f64),
    /// `coef · log10(d)`
    LogDistance(f64),
    /// `-18 · log10(1 - d²/(17·dh_tx_m))`
    Curvature {
        dh_tx_m: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    pub index: usize,
    pub label: &'static str,
    pub group: Group,
    pub shape: Shape,
}

impl BasisFunction {
    pub fn eval(&self, d_km: f64) -> Result<f64> {
        models::check_distance(d_km)?;
        match self.shape {
            Shape::Constant(c) => Ok(c),
            Shape::LogDistance(coef) => Ok(coef * d_km.log10()),
            Shape::Curvature { dh_tx_m } => {
                let arg = 1.0 - d_km * d_km / (17.0 * dh_tx_m);
                if arg <= 0.0 {
                    Err(Error::Curvature {
                        d_km,
                        limit_km: (17.0 * dh_tx_m).sqrt(),
                    })
                } else {
                    Ok(-18.0 * arg.log10())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub kind: ModelKind,
    pub terrain: Terrain,
    pub functions: Vec<BasisFunction>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn groups(&self) -> &'static [Group] {
        Group::for_kind(self.kind)
    }

    /// Indices of the functions carrying `group`.
    pub fn members(&self, group: Group) -> impl Iterator<Item = usize> + '_ {
        self.functions
            .iter()
            .filter(move |f| f.group == group)
            .map(|f| f.index)
    }

    pub fn eval_all(&self, d_km: f64) -> Result<Vec<f64>> {
        self.functions.iter().map(|f| f.eval(d_km)).collect()
    }

    /// Σ w_n·f_n(d).
    pub fn weighted_sum(&self, weights: &[f64], d_km: f64) -> Result<f64> {
        debug_assert_eq!(weights.len(), self.len());
        let values = self.eval_all(d_km)?;
        Ok(values.iter().zip(weights).map(|(v, w)| v * w).sum())
    }

    /// Σ f_n(d); equal to the basic model's prediction.
    pub fn sum(&self, d_km: f64) -> Result<f64> {
        Ok(self.eval_all(d_km)?.iter().sum())
    }

    /// Distances at which the set is undefined (Walfisch-Bertoni only).
    pub fn out_of_domain(&self, distances: &[f64]) -> Vec<f64> {
        if !self.kind.is_walfisch_bertoni() {
            return Vec::new();
        }
        let limit = self.terrain.wb_limit_km();
        distances.iter().copied().filter(|&d| d >= limit).collect()
    }

    pub fn design_matrix(&self, distances: &[f64]) -> Result<DesignMatrix> {
        if distances.is_empty() {
            return Err(Error::Empty("design matrix needs at least one distance"));
        }
        for &d in distances {
            models::check_distance(d)?;
        }
        let bad = self.out_of_domain(distances);
        if !bad.is_empty() {
            return Err(Error::CurvatureSet {
                distances: bad,
                limit_km: self.terrain.wb_limit_km(),
            });
        }
        let mut values = Mat::zeros(distances.len(), self.len());
        for (k, &d) in distances.iter().enumerate() {
            for (n, f) in self.functions.iter().enumerate() {
                values[(k, n)] = f.eval(d)?;
            }
        }
        Ok(DesignMatrix {
            distances: distances.to_vec(),
            values,
        })
    }
}

pub fn build_basis(kind: ModelKind, t: &Terrain) -> Result<BasisSet> {
    t.validate()?;
    let functions = match kind.walfisch_ikegami() {
        Some((family, density)) => walfisch_ikegami_terms(t, family, density)?,
        None => walfisch_bertoni_terms(t),
    };
    let functions = functions
        .into_iter()
        .enumerate()
        .map(|(index, (label, group, shape))| BasisFunction {
            index,
            label,
            group,
            shape,
        })
        .collect();
    Ok(BasisSet {
        kind,
        terrain: *t,
        functions,
    })
}

type Term = (&'static str, Group, Shape);

fn walfisch_ikegami_terms(t: &Terrain, family: Family, density: Density) -> Result<Vec<Term>> {
    use Group::*;
    use Shape::*;
    let lf = t.f_mhz.log10();
    Ok(vec![
        ("32.4", Fsp, Constant(32.4)),
        ("20log10(d)", Fsp, LogDistance(20.0)),
        ("20log10(f)", Fsp, Constant(20.0 * lf)),
        ("rts_constant", Rts, Constant(models::rts_constant(family))),
        ("-10log10(w)", Rts, Constant(-10.0 * t.w_m.log10())),
        ("10log10(f)", Rts, Constant(10.0 * lf)),
        ("20log10(dh_rx)", Rts, Constant(20.0 * t.dh_rx_m.log10())),
        (
            "orientation",
            Rts,
            Constant(models::orientation_term(t.phi_deg)?),
        ),
        (
            "-18log10(1+dh_tx)",
            Msd,
            Constant(-18.0 * (1.0 + t.dh_tx_m).log10()),
        ),
        ("k_a", Msd, Constant(models::k_a(t, family))),
        ("18log10(d)", Msd, LogDistance(18.0)),
        (
            "k_f*log10(f)",
            Msd,
            Constant(models::k_f(t, density, family) * lf),
        ),
        ("-9log10(b)", Msd, Constant(-9.0 * t.b_m.log10())),
    ])
}

fn walfisch_bertoni_terms(t: &Terrain) -> Vec<Term> {
    use Group::*;
    use Shape::*;
    let half_b = t.b_m / 2.0;
    let angle_deg = (2.0 * t.dh_rx_m / t.b_m).atan().to_degrees();
    vec![
        ("89.5", Core, Constant(89.5)),
        ("38log10(d)", Core, LogDistance(38.0)),
        (
            "-18log10(dh_tx)",
            Height,
            Constant(-18.0 * t.dh_tx_m.log10()),
        ),
        ("21log10(f)", Core, Constant(21.0 * t.f_mhz.log10())),
        (
            "5log10((b/2)^2+dh_rx^2)",
            Geometry,
            Constant(5.0 * (half_b * half_b + t.dh_rx_m * t.dh_rx_m).log10()),
        ),
        ("-9log10(b)", Geometry, Constant(-9.0 * t.b_m.log10())),
        (
            "20log10(atan(2dh_rx/b))",
            Geometry,
            Constant(20.0 * angle_deg.log10()),
        ),
        (
            "curvature",
            Group::Curvature,
            Shape::Curvature { dh_tx_m: t.dh_tx_m },
        ),
    ]
}

/// K×N table of basis values `f_n(d_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    pub distances: Vec<f64>,
    pub values: Mat<f64>,
}

impl DesignMatrix {
    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn column(&self, n: usize) -> Vec<f64> {
        (0..self.rows()).map(|k| self.values[(k, n)]).collect()
    }

    /// Multiplies column `n` by `factor`. The column space is unchanged for
    /// any nonzero factor.
    pub fn scale_column(&mut self, n: usize, factor: f64) {
        for k in 0..self.rows() {
            self.values[(k, n)] *= factor;
        }
    }

    /// Gram matrix `MᵀM`: the pairwise discrete inner products of the basis
    /// functions over the sample distances.
    pub fn gram(&self) -> Mat<f64> {
        self.values.transpose() * &self.values
    }
}

/// Number of singular values above `tol` times the largest one.
pub fn effective_rank(m: &DesignMatrix, tol: f64) -> Result<usize> {
    let sv = m
        .values
        .singular_values()
        .map_err(|_| Error::NoConvergence)?;
    let max = sv.iter().copied().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * max).count())
}
