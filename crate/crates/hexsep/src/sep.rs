//! Closed-form symbol-error-probability expressions for hexagonal
//! constellations, in AWGN and under flat Rayleigh fading.
//!
//! All expressions are parameterized by the triple (alpha, A, B): the SNR
//! scale factor, the average nearest-neighbour count, and the correction
//! coefficient. B is either read from the published per-order table or
//! derived geometrically as 1.3318 * A_c.
//!
//! The working forms:
//!
//! * nearest-neighbour estimate:  A Q(sqrt(alpha g))
//! * corrected (numeric):         A Q(sqrt(alpha g)) - A_c C(alpha g)
//! * closed form:                 A Q(sqrt(alpha g))
//!                                  - B Q(sqrt(10/11 alpha g)) Q(sqrt(1/3 alpha g))
//! * Rayleigh average of the closed form, integrated against the unit
//!   mean-square amplitude density 2 t exp(-t^2).
//!
//! Every public evaluator clamps to [0, 1]; `_raw` variants expose the
//! unclamped value where the overshoot itself is of interest.

use crate::error::{Error, Result};
use crate::gaussian::{
    correction_c_closed, correction_c_numeric, q_func, CorrectionMethod, QuadratureSpec,
    B_COEFFICIENT,
};
use crate::lattice::{build_constellation, neighbor_stats, ConstellationKind, NeighborStats};
use std::f64::consts::PI;

/// SNR operating point, stored linear (gamma = Es/N0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    gamma_s: f64,
}

impl SnrPoint {
    /// From a linear SNR value. Panics on negative or NaN input.
    pub fn from_linear(gamma_s: f64) -> SnrPoint {
        assert!(
            gamma_s >= 0.0 && !gamma_s.is_nan(),
            "snr must be nonnegative, got {gamma_s}"
        );
        SnrPoint { gamma_s }
    }

    /// From decibels; `-inf` maps to zero SNR.
    pub fn from_db(db: f64) -> SnrPoint {
        SnrPoint {
            gamma_s: 10f64.powf(db / 10.0),
        }
    }

    pub fn linear(&self) -> f64 {
        self.gamma_s
    }

    pub fn db(&self) -> f64 {
        10.0 * self.gamma_s.log10()
    }
}

/// Where the correction coefficient B comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BSource {
    Table1,
    Geometric,
}

/// The (alpha, A, B, A_c) parameter set of one constellation.
#[derive(Debug, Clone, Copy)]
pub struct SepParams {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub a_c: f64,
    pub source: BSource,
}

impl SepParams {
    /// Parameters from neighbour statistics with a geometric B.
    pub fn from_stats(stats: &NeighborStats) -> SepParams {
        SepParams {
            alpha: stats.alpha,
            a: stats.a,
            b: B_COEFFICIENT * stats.a_c,
            a_c: stats.a_c,
            source: BSource::Geometric,
        }
    }
}

/// Published correction coefficients per order: (M, regular, irregular).
const B_TABLE: &[(usize, f64, f64)] = &[
    (4, 1.9977, 1.9977),
    (8, 3.4960, 3.4960),
    (16, 4.4948, 4.4948),
    (32, 5.4937, 5.4937),
    (64, 6.1180, 6.2428),
    (128, 6.6174, 6.7422),
    (256, 7.0232, 7.1168),
    (512, 7.3080, 7.3704),
    (1024, 7.4992, 7.5382),
    (2048, 7.6416, 7.7168),
];

/// Tabulated B for (order, kind), if published.
pub fn b_table(m: usize, kind: ConstellationKind) -> Option<f64> {
    let row = B_TABLE.iter().find(|(order, _, _)| *order == m)?;
    match kind {
        ConstellationKind::RegularHqam => Some(row.1),
        ConstellationKind::IrregularHqam => Some(row.2),
        ConstellationKind::ThreePsk => None,
    }
}

/// Resolve the full parameter set for one (order, kind). Alpha and A always
/// come from geometry; B from the table when requested and published, else
/// geometrically (the recorded `source` reflects what was actually used).
pub fn resolve_params(m: usize, kind: ConstellationKind, b_source: BSource) -> Result<SepParams> {
    let c = build_constellation(m, kind)?;
    let stats = neighbor_stats(&c);
    let mut p = SepParams::from_stats(&stats);
    if b_source == BSource::Table1 {
        if let Some(b) = b_table(m, kind) {
            p.b = b;
            p.source = BSource::Table1;
        }
    }
    Ok(p)
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// AWGN
// ---------------------------------------------------------------------------

/// Nearest-neighbour SEP estimate A Q(sqrt(alpha gamma)), clamped.
pub fn sep_nn_awgn(p: &SepParams, snr: SnrPoint) -> f64 {
    clamp01(p.a * q_func((p.alpha * snr.linear()).sqrt()))
}

/// Unclamped closed-form SEP.
pub fn sep_hqam_closed_raw(p: &SepParams, snr: SnrPoint) -> f64 {
    let ag = p.alpha * snr.linear();
    p.a * q_func(ag.sqrt())
        - p.b * q_func((10.0 / 11.0 * ag).sqrt()) * q_func((ag / 3.0).sqrt())
}

/// Closed-form SEP, clamped to [0, 1].
pub fn sep_hqam_closed(p: &SepParams, snr: SnrPoint) -> f64 {
    clamp01(sep_hqam_closed_raw(p, snr))
}

/// Higher-fidelity analytic SEP: the nearest-neighbour term minus the
/// numerically integrated correction, A Q(sqrt(alpha g)) - A_c C.
pub fn sep_hqam_corrected(p: &SepParams, snr: SnrPoint, spec: &QuadratureSpec) -> Result<f64> {
    let ag = p.alpha * snr.linear();
    let c = correction_c_numeric(ag, spec)?;
    Ok(clamp01(p.a * q_func(ag.sqrt()) - p.a_c * c.value))
}

/// SNR scale factor of the three-symbol simplex (d_min^2 / 2 at unit energy).
pub const THREE_PSK_ALPHA: f64 = 1.5;

/// Exact simplex SEP: 2 Q(sqrt(alpha g)) minus the pairwise-overlap
/// correction, with the correction evaluated numerically or in closed form.
pub fn sep_3psk_exact(
    snr: SnrPoint,
    method: CorrectionMethod,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let ag = THREE_PSK_ALPHA * snr.linear();
    let c = match method {
        CorrectionMethod::NumericEq4 => correction_c_numeric(ag, spec)?.value,
        CorrectionMethod::ClosedEq16 => correction_c_closed(ag).value,
    };
    Ok(clamp01(2.0 * q_func(ag.sqrt()) - c))
}

// ---------------------------------------------------------------------------
// Rayleigh fading
// ---------------------------------------------------------------------------

/// Unclamped Rayleigh-average of the closed-form SEP.
pub fn sep_hqam_rayleigh_raw(p: &SepParams, mean_snr: SnrPoint) -> Result<f64> {
    let g = mean_snr.linear();
    if g < 0.0 || g.is_nan() {
        return Err(Error::DomainError(format!("mean snr {g} out of domain")));
    }
    let x = p.alpha * g;
    if x == 0.0 {
        // analytic zero-SNR limit: the square-root factors vanish and both
        // arctangents tend to pi/2
        return Ok(p.a / 2.0 - p.b / 4.0);
    }
    let first = p.a / 2.0 * (1.0 - (0.5 * x / (1.0 + 0.5 * x)).sqrt());
    let b1 = (5.0 * x / (11.0 + 5.0 * x)).sqrt()
        * ((330.0 + 150.0 * x) / (55.0 * x)).sqrt().atan();
    let b2 = (x / (6.0 + x)).sqrt() * ((66.0 + 11.0 * x) / (30.0 * x)).sqrt().atan();
    Ok(first - p.b * (0.25 - (b1 + b2) / (2.0 * PI)))
}

/// Rayleigh-average SEP, clamped to [0, 1].
pub fn sep_hqam_rayleigh(p: &SepParams, mean_snr: SnrPoint) -> Result<f64> {
    Ok(clamp01(sep_hqam_rayleigh_raw(p, mean_snr)?))
}
