//! Moment-method calibration.
//!
//! The basis functions of a model serve as both expansion and testing
//! functions, with the inner product taken as a plain sum over measurement
//! distances. The resulting Gram system `MᵀM·α = Mᵀp` is the normal equation
//! of the least-squares problem `M·α ≈ p`. For a fixed terrain most columns of
//! `M` are constants, so the Gram matrix is singular; the system is solved by
//! SVD with a relative cutoff and the minimum-norm `α` is returned. Only the
//! fitted function is unique, individual coefficients are not.

use faer::MatRef;

use crate::basis::{build_basis, BasisSet, DesignMatrix, Group, DEFAULT_RANK_TOL};
use crate::error::{Error, Result};
use crate::metrics::{self, MetricsReport};
use crate::models::{ModelKind, Terrain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub d_km: f64,
    pub pathloss_db: f64,
}

/// Measured pathloss samples. Distances need not be sorted or unique;
/// repeated distances act as weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    samples: Vec<Sample>,
    pub site: Option<String>,
}

impl MeasurementSet {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("measurement set"));
        }
        for (index, s) in samples.iter().enumerate() {
            if !s.d_km.is_finite() {
                return Err(Error::NonFinite {
                    index,
                    value: s.d_km,
                });
            }
            if s.d_km <= 0.0 {
                return Err(Error::domain("d_km", s.d_km, "> 0"));
            }
            if !s.pathloss_db.is_finite() {
                return Err(Error::NonFinite {
                    index,
                    value: s.pathloss_db,
                });
            }
            if s.pathloss_db <= 0.0 {
                return Err(Error::domain("pathloss_db", s.pathloss_db, "> 0"));
            }
        }
        Ok(MeasurementSet {
            samples,
            site: None,
        })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(d_km, pathloss_db)| Sample { d_km, pathloss_db })
                .collect(),
        )
    }

    pub fn with_site(mut self, site: impl Into<String>) -> Self {
        self.site = Some(site.into());
        self
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.d_km).collect()
    }

    pub fn pathloss(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.pathloss_db).collect()
    }
}

/// Minimum-norm least-squares solution of `m·x ≈ y`, discarding singular
/// values at or below `rel_tol` times the largest. Returns the solution and
/// the number of singular values kept.
///
/// The pseudo-inverse is applied a second time to the residual of the first
/// solve. The correction lies in the same row space, so the result stays
/// minimum-norm.
pub fn solve_min_norm(m: MatRef<'_, f64>, y: &[f64], rel_tol: f64) -> Result<(Vec<f64>, usize)> {
    debug_assert_eq!(m.nrows(), y.len());
    let svd = m.thin_svd().map_err(|_| Error::NoConvergence)?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let max = (0..s.dim()).map(|i| s[i]).fold(0.0_f64, f64::max);
    let kept: Vec<usize> = if max == 0.0 {
        Vec::new()
    } else {
        (0..s.dim()).filter(|&i| s[i] > rel_tol * max).collect()
    };
    let apply_pinv = |rhs: &[f64], x: &mut [f64]| {
        for &i in &kept {
            let coef = (0..rhs.len()).map(|k| u[(k, i)] * rhs[k]).sum::<f64>() / s[i];
            for (n, xn) in x.iter_mut().enumerate() {
                *xn += coef * v[(n, i)];
            }
        }
    };
    let mut x = vec![0.0; m.ncols()];
    apply_pinv(y, &mut x);
    if !kept.is_empty() {
        let r: Vec<f64> = (0..y.len())
            .map(|k| y[k] - (0..x.len()).map(|n| m[(k, n)] * x[n]).sum::<f64>())
            .collect();
        apply_pinv(&r, &mut x);
    }
    Ok((x, kept.len()))
}

/// Result of fitting a basis set to measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub kind: ModelKind,
    pub terrain: Terrain,
    pub basis: BasisSet,
    /// Calibration coefficients, one per basis function.
    pub alpha: Vec<f64>,
    /// Numeric rank of the design matrix at `rank_tol`.
    pub rank: usize,
    pub rank_tol: f64,
    pub distances: Vec<f64>,
    pub measured: Vec<f64>,
    pub fitted: Vec<f64>,
    /// `fitted - measured`.
    pub residuals: Vec<f64>,
}

pub fn calibrate(kind: ModelKind, t: &Terrain, meas: &MeasurementSet) -> Result<Calibration> {
    calibrate_with_tol(kind, t, meas, DEFAULT_RANK_TOL)
}

pub fn calibrate_with_tol(
    kind: ModelKind,
    t: &Terrain,
    meas: &MeasurementSet,
    rank_tol: f64,
) -> Result<Calibration> {
    let basis = build_basis(kind, t)?;
    let design = basis.design_matrix(&meas.distances())?;
    let fit = fit_design(&design, &meas.pathloss(), rank_tol)?;
    Ok(Calibration {
        kind,
        terrain: *t,
        basis,
        alpha: fit.alpha,
        rank: fit.rank,
        rank_tol,
        distances: design.distances,
        measured: meas.pathloss(),
        fitted: fit.fitted,
        residuals: fit.residuals,
    })
}

/// Coefficients and fitted values for an arbitrary design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignFit {
    pub alpha: Vec<f64>,
    pub rank: usize,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
}

pub fn fit_design(design: &DesignMatrix, measured: &[f64], rank_tol: f64) -> Result<DesignFit> {
    if measured.len() != design.rows() {
        return Err(Error::LengthMismatch {
            predicted: design.rows(),
            measured: measured.len(),
        });
    }
    if let Some((index, &value)) = measured.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    let (alpha, rank) = solve_min_norm(design.values.as_ref(), measured, rank_tol)?;
    let fitted: Vec<f64> = (0..design.rows())
        .map(|k| {
            alpha
                .iter()
                .enumerate()
                .map(|(n, a)| a * design.values[(k, n)])
                .sum()
        })
        .collect();
    let residuals = fitted.iter().zip(measured).map(|(f, m)| f - m).collect();
    Ok(DesignFit {
        alpha,
        rank,
        fitted,
        residuals,
    })
}

impl Calibration {
    /// Calibrated prediction `Σ α_n·f_n(d)`.
    pub fn predict(&self, d_km: f64) -> Result<f64> {
        self.basis.weighted_sum(&self.alpha, d_km)
    }

    pub fn rmse(&self) -> f64 {
        metrics::rmse(&self.fitted, &self.measured).expect("nonempty by construction")
    }

    pub fn mpe(&self) -> f64 {
        metrics::mpe(&self.fitted, &self.measured).expect("nonempty by construction")
    }

    /// Basic-model predictions at the measurement distances.
    pub fn basic_fitted(&self) -> Vec<f64> {
        self.distances
            .iter()
            .map(|&d| {
                self.basis
                    .sum(d)
                    .expect("distances validated at calibration")
            })
            .collect()
    }

    pub fn report(&self) -> MetricsReport {
        let basic =
            metrics::rmse(&self.basic_fitted(), &self.measured).expect("nonempty by construction");
        MetricsReport::new(&self.fitted, &self.measured)
            .expect("nonempty by construction")
            .with_basic(basic)
    }
}

/// Per-group contributions to the net prediction, for both the calibrated
/// (α-weighted) and basic (unit-weighted) model.
#[derive(Debug, Clone, PartialEq)]
pub struct DisaggregationProfile {
    pub kind: ModelKind,
    pub distances: Vec<f64>,
    pub groups: Vec<Group>,
    /// `basic[g][k]`: contribution of `groups[g]` at `distances[k]`.
    pub basic: Vec<Vec<f64>>,
    pub calibrated: Vec<Vec<f64>>,
}

impl DisaggregationProfile {
    pub fn basic_net(&self, k: usize) -> f64 {
        self.basic.iter().map(|g| g[k]).sum()
    }

    pub fn calibrated_net(&self, k: usize) -> f64 {
        self.calibrated.iter().map(|g| g[k]).sum()
    }
}

pub fn disaggregate(c: &Calibration, distances: &[f64]) -> Result<DisaggregationProfile> {
    let groups = c.basis.groups().to_vec();
    let bad = c.basis.out_of_domain(distances);
    if !bad.is_empty() {
        return Err(Error::CurvatureSet {
            distances: bad,
            limit_km: c.terrain.wb_limit_km(),
        });
    }
    let mut basic = vec![Vec::with_capacity(distances.len()); groups.len()];
    let mut calibrated = vec![Vec::with_capacity(distances.len()); groups.len()];
    for &d in distances {
        let values = c.basis.eval_all(d)?;
        for (g, &group) in groups.iter().enumerate() {
            let (mut b, mut w) = (0.0, 0.0);
            for n in c.basis.members(group) {
                b += values[n];
                w += c.alpha[n] * values[n];
            }
            basic[g].push(b);
            calibrated[g].push(w);
        }
    }
    Ok(DisaggregationProfile {
        kind: c.kind,
        distances: distances.to_vec(),
        groups,
        basic,
        calibrated,
    })
}
