//! Dielectric permittivity representations along the imaginary frequency axis.
//!
//! Four models are supported: the Drude and plasma free-electron forms, an
//! infrared-optics approximation with a frequency-dependent relaxation
//! parameter, and tabulated optical data (complex refractive index) mapped to
//! ε(iξ) through the dispersion relation
//!
//! ε(iξ) = 1 + (2/π) ∫₀^∞ ω·Im ε(ω) / (ω² + ξ²) dω.

use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::constants::{gold, EV_TO_RAD_S};
use crate::quad::{self, QuadError};

#[derive(Debug, Error)]
pub enum OpticsError {
    #[error("{what} must be positive, got {value:e}")]
    Domain { what: &'static str, value: f64 },
    #[error("infrared permittivity model invalid at xi = {xi:e} rad/s (eps = {value})")]
    ModelValidity { xi: f64, value: f64 },
    #[error("optical table tail is not decaying: Im eps rises between the last two samples (omega = {omega_last:e} rad/s)")]
    TailNotDecaying { omega_last: f64 },
    #[error("frequency {omega:e} rad/s is outside the infrared-optics regime (must be < {max:e} rad/s)")]
    Regime { omega: f64, max: f64 },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("failed to read optical data: {0}")]
    Io(#[from] std::io::Error),
    #[error("dispersion-relation quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

/// Drude model parameters: ε(iξ) = 1 + ωp² / (ξ(ξ + γ)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    /// Plasma frequency, rad/s.
    pub omega_p: f64,
    /// Relaxation parameter, rad/s.
    pub gamma: f64,
}

impl DrudeParams {
    pub fn gold() -> Self {
        DrudeParams {
            omega_p: gold::OMEGA_P,
            gamma: gold::GAMMA,
        }
    }
}

/// Infrared-optics model parameters.
///
/// The relaxation parameter in this regime is ν(ω) = ωp(c₁ + c₂ ω²/ωp²),
/// leading to ε(iξ) = 1 + ωp²/ξ² − (ωp³/ξ³)(c₁ − c₂ ξ²/ωp²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfraredParams {
    /// Plasma frequency, rad/s.
    pub omega_p: f64,
    pub c1: f64,
    pub c2: f64,
}

impl InfraredParams {
    pub fn gold() -> Self {
        InfraredParams {
            omega_p: gold::OMEGA_P,
            c1: gold::C1,
            c2: gold::C2,
        }
    }
}

/// One tabulated point: Im ε at a real frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSample {
    /// Angular frequency, rad/s.
    pub omega: f64,
    /// Im ε(ω), dimensionless, ≥ 0.
    pub eps_im: f64,
}

/// Tabulated Im ε(ω) with a Drude closure below the lowest tabulated
/// frequency and an ω⁻³ tail above the highest one.
#[derive(Debug, Clone)]
pub struct OpticalTable {
    samples: Vec<OpticalSample>,
    low_freq_extension: DrudeParams,
}

impl OpticalTable {
    /// Build from samples, validating the table invariants.
    pub fn new(
        samples: Vec<OpticalSample>,
        low_freq_extension: DrudeParams,
    ) -> Result<Self, OpticsError> {
        if samples.len() < 2 {
            return Err(OpticsError::Format {
                line: 0,
                message: format!("optical table needs at least 2 samples, got {}", samples.len()),
            });
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.omega > 0.0) {
                return Err(OpticsError::Domain {
                    what: "sample omega",
                    value: s.omega,
                });
            }
            if s.eps_im < 0.0 {
                return Err(OpticsError::Format {
                    line: i + 1,
                    message: format!("Im eps must be >= 0, got {}", s.eps_im),
                });
            }
            if i > 0 && s.omega <= samples[i - 1].omega {
                return Err(OpticsError::Format {
                    line: i + 1,
                    message: format!(
                        "omega must be strictly increasing ({:e} after {:e})",
                        s.omega,
                        samples[i - 1].omega
                    ),
                });
            }
        }
        Ok(OpticalTable {
            samples,
            low_freq_extension,
        })
    }

    pub fn samples(&self) -> &[OpticalSample] {
        &self.samples
    }

    pub fn low_freq_extension(&self) -> DrudeParams {
        self.low_freq_extension
    }

    pub fn omega_range(&self) -> (f64, f64) {
        (
            self.samples.first().unwrap().omega,
            self.samples.last().unwrap().omega,
        )
    }

    /// Piecewise interpolated Im ε(ω) inside the tabulated range: log-log
    /// linear where both endpoints are positive, linear otherwise.
    fn interp_im(&self, omega: f64) -> f64 {
        let s = &self.samples;
        let idx = match s.binary_search_by(|p| p.omega.total_cmp(&omega)) {
            Ok(i) => return s[i].eps_im,
            Err(i) => i,
        };
        debug_assert!(idx > 0 && idx < s.len());
        let (a, b) = (s[idx - 1], s[idx]);
        if a.eps_im > 0.0 && b.eps_im > 0.0 {
            let t = (omega / a.omega).ln() / (b.omega / a.omega).ln();
            (a.eps_im.ln() + t * (b.eps_im / a.eps_im).ln()).exp()
        } else {
            let t = (omega - a.omega) / (b.omega - a.omega);
            a.eps_im + t * (b.eps_im - a.eps_im)
        }
    }
}

/// ε(iξ) for the Drude model: 1 + ωp² / (ξ(ξ + γ)).
pub fn drude_eps_imaginary(xi: f64, p: &DrudeParams) -> Result<f64, OpticsError> {
    if !(xi > 0.0) {
        return Err(OpticsError::Domain {
            what: "xi",
            value: xi,
        });
    }
    Ok(1.0 + p.omega_p * p.omega_p / (xi * (xi + p.gamma)))
}

/// ε(iξ) for the plasma model: 1 + ωp²/ξ².
pub fn plasma_eps_imaginary(xi: f64, omega_p: f64) -> Result<f64, OpticsError> {
    if !(xi > 0.0) {
        return Err(OpticsError::Domain {
            what: "xi",
            value: xi,
        });
    }
    let r = omega_p / xi;
    Ok(1.0 + r * r)
}

/// ε(iξ) for the infrared-optics model:
/// 1 + ωp²/ξ² − (ωp³/ξ³)(c₁ − c₂ ξ²/ωp²).
///
/// At very small ξ the c₁ term dominates and drives the value below 1; such
/// points are outside the model's validity and are reported as errors.
pub fn infrared_eps_imaginary(xi: f64, p: &InfraredParams) -> Result<f64, OpticsError> {
    if !(xi > 0.0) {
        return Err(OpticsError::Domain {
            what: "xi",
            value: xi,
        });
    }
    let r = p.omega_p / xi;
    let value = 1.0 + r * r - r * r * r * (p.c1 - p.c2 / (r * r));
    if value <= 1.0 {
        return Err(OpticsError::ModelValidity { xi, value });
    }
    Ok(value)
}

/// Relaxation parameter ν(ω) = ωp (c₁ + c₂ ω²/ωp²) of the infrared-optics
/// regime, rad/s.
pub fn nu_infrared(p: &InfraredParams, omega: f64) -> f64 {
    p.omega_p * (p.c1 + p.c2 * (omega / p.omega_p) * (omega / p.omega_p))
}

/// Reflectance deficit D(ω) = 1 − R = κ · ν(ω)/ωp in the infrared-optics
/// regime. Enforced for ω < ωp/3 only.
pub fn reflectance_infrared(p: &InfraredParams, omega: f64, kappa: f64) -> Result<f64, OpticsError> {
    let max = p.omega_p / 3.0;
    if !(omega < max) || !(omega > 0.0) {
        return Err(OpticsError::Regime { omega, max });
    }
    Ok(kappa * nu_infrared(p, omega) / p.omega_p)
}

/// Adjusted c₁ coefficient absorbing a grain-induced reflectance deficit:
/// c̃₁ = c₁ + ΔD/4. Both inputs must be non-negative.
pub fn grain_adjusted_c1(c1: f64, reflectance_deficit_delta: f64) -> f64 {
    debug_assert!(c1 >= 0.0 && reflectance_deficit_delta >= 0.0);
    c1 + reflectance_deficit_delta / 4.0
}

/// Convert complex ε = εr + iεi to the refractive index pair (n, k).
pub fn nk_from_eps(eps_re: f64, eps_im: f64) -> (f64, f64) {
    let modulus = (eps_re * eps_re + eps_im * eps_im).sqrt();
    let n = ((modulus + eps_re) * 0.5).max(0.0).sqrt();
    let k = ((modulus - eps_re) * 0.5).max(0.0).sqrt();
    (n, k)
}

/// Build an [`OpticalTable`] from (ω, n, k) rows; each sample carries
/// Im ε = 2nk. The supplied Drude parameters close the table below its
/// lowest frequency.
pub fn table_from_nk(
    rows: &[(f64, f64, f64)],
    extension: DrudeParams,
) -> Result<OpticalTable, OpticsError> {
    let mut samples = Vec::with_capacity(rows.len());
    for (i, &(omega, n, k)) in rows.iter().enumerate() {
        if n < 0.0 || k < 0.0 {
            return Err(OpticsError::Format {
                line: i + 1,
                message: format!("n and k must be non-negative, got n = {n}, k = {k}"),
            });
        }
        samples.push(OpticalSample {
            omega,
            eps_im: 2.0 * n * k,
        });
    }
    OpticalTable::new(samples, extension)
}

// Closed form of ∫₀^{w1} ω · Im ε_Drude(ω) / (ω² + ξ²) dω with
// Im ε_Drude = ωp²γ / (ω(ω² + γ²)).
fn below_range_drude(w1: f64, xi: f64, p: &DrudeParams) -> f64 {
    let (wp2, g) = (p.omega_p * p.omega_p, p.gamma);
    if (xi - g).abs() > 1e-8 * g.max(xi) {
        wp2 * g / (xi * xi - g * g) * ((w1 / g).atan() / g - (w1 / xi).atan() / xi)
    } else {
        // ξ = γ limit: ωp²γ ∫ dω/(ω²+γ²)²
        wp2 * g * (w1 / (2.0 * g * g * (w1 * w1 + g * g)) + (w1 / g).atan() / (2.0 * g * g * g))
    }
}

// Closed form of ∫_{wN}^∞ ω · (C/ω³) / (ω² + ξ²) dω with C = Im ε_N · wN³.
fn tail_omega_cubed(w_n: f64, xi: f64, eps_n: f64) -> f64 {
    let c = eps_n * w_n * w_n * w_n;
    let x = xi / w_n;
    if x < 1e-4 {
        c / (3.0 * w_n * w_n * w_n) * (1.0 - 0.6 * x * x)
    } else {
        c / (xi * xi) * (1.0 / w_n - x.atan() / xi)
    }
}

/// ε(iξ) from tabulated data through the dispersion relation.
///
/// Below the tabulated range Im ε follows the table's Drude extension
/// (closed form); inside the range the samples are interpolated log-log;
/// above it an ω⁻³ tail is scaled to the last sample. The tail fit requires
/// a decaying table end.
pub fn kk_eps_imaginary(table: &OpticalTable, xi: f64) -> Result<f64, OpticsError> {
    if !(xi > 0.0) {
        return Err(OpticsError::Domain {
            what: "xi",
            value: xi,
        });
    }
    let s = table.samples();
    let n = s.len();
    let (w1, w_n) = table.omega_range();
    let (last, prev) = (s[n - 1], s[n - 2]);
    if last.eps_im > 0.0 {
        let rising = if prev.eps_im > 0.0 {
            last.eps_im >= prev.eps_im
        } else {
            true
        };
        if rising {
            return Err(OpticsError::TailNotDecaying { omega_last: w_n });
        }
    }

    let below = below_range_drude(w1, xi, &table.low_freq_extension);

    // In-range: adaptive quadrature in log ω seeded at the table knots.
    let integrand = |omega: f64| omega * table.interp_im(omega) / (omega * omega + xi * xi);
    let mut edges: Vec<f64> = s.iter().map(|p| p.omega.ln()).collect();
    edges.dedup();
    let in_log = |u: f64| {
        let w = u.exp();
        integrand(w) * w
    };
    let inside = quad::adaptive_segmented(&in_log, &edges, 1e-6, 0.0, 20_000)?;

    let tail = tail_omega_cubed(w_n, xi, last.eps_im);

    Ok(1.0 + std::f64::consts::FRAC_2_PI * (below + inside.value + tail))
}

// Cached ε(iξ) curve for fast repeated evaluation of tabulated models.
// Built once per table on a uniform log grid; evaluated with a cubic
// Hermite (Catmull-Rom) interpolant of ln(ε−1) against ln ξ.
#[derive(Debug, Clone)]
struct EpsCurve {
    ln_xi_min: f64,
    step: f64,
    ln_em1: Vec<f64>,
}

const CACHE_XI_MIN: f64 = 1e9;
const CACHE_XI_MAX: f64 = 1e21;
const CACHE_POINTS: usize = 768;

impl EpsCurve {
    fn build(table: &OpticalTable) -> Result<Self, OpticsError> {
        let ln_min = CACHE_XI_MIN.ln();
        let step = (CACHE_XI_MAX / CACHE_XI_MIN).ln() / (CACHE_POINTS - 1) as f64;
        let mut ln_em1 = Vec::with_capacity(CACHE_POINTS);
        for i in 0..CACHE_POINTS {
            let xi = (ln_min + step * i as f64).exp();
            let eps = kk_eps_imaginary(table, xi)?;
            ln_em1.push((eps - 1.0).ln());
        }
        Ok(EpsCurve {
            ln_xi_min: ln_min,
            step,
            ln_em1,
        })
    }

    fn eval(&self, xi: f64) -> f64 {
        let y = &self.ln_em1;
        let n = y.len();
        let u = (xi.ln() - self.ln_xi_min) / self.step;
        if u <= 0.0 {
            // power-law extrapolation from the first two points
            let slope = (y[1] - y[0]) / self.step;
            return 1.0 + (y[0] + slope * (xi.ln() - self.ln_xi_min)).exp();
        }
        if u >= (n - 1) as f64 {
            let slope = (y[n - 1] - y[n - 2]) / self.step;
            return 1.0 + (y[n - 1] + slope * (xi.ln() - self.ln_xi_min - self.step * (n - 1) as f64)).exp();
        }
        let i = (u as usize).min(n - 2);
        let t = u - i as f64;
        let y0 = y[i];
        let y1 = y[i + 1];
        let m0 = if i == 0 { y[1] - y[0] } else { 0.5 * (y[i + 1] - y[i - 1]) };
        let m1 = if i + 2 >= n {
            y[n - 1] - y[n - 2]
        } else {
            0.5 * (y[i + 2] - y[i])
        };
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        1.0 + (h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1).exp()
    }
}

/// Tabulated permittivity model with a transparent build-once ε(iξ) cache.
#[derive(Debug, Clone)]
pub struct TabulatedModel {
    table: OpticalTable,
    curve: OnceLock<EpsCurve>,
}

impl TabulatedModel {
    pub fn new(table: OpticalTable) -> Self {
        TabulatedModel {
            table,
            curve: OnceLock::new(),
        }
    }

    pub fn table(&self) -> &OpticalTable {
        &self.table
    }

    fn eps_at(&self, xi: f64) -> Result<f64, OpticsError> {
        if !(xi > 0.0) {
            return Err(OpticsError::Domain {
                what: "xi",
                value: xi,
            });
        }
        if let Some(c) = self.curve.get() {
            return Ok(c.eval(xi));
        }
        let built = EpsCurve::build(&self.table)?;
        Ok(self.curve.get_or_init(|| built).eval(xi))
    }
}

/// The dielectric models usable by the force engine.
#[derive(Debug, Clone)]
pub enum PermittivityModel {
    Drude(DrudeParams),
    Plasma { omega_p: f64 },
    Infrared(InfraredParams),
    Tabulated(TabulatedModel),
}

/// How a model behaves as ξ → 0, which fixes the zero-frequency Matsubara
/// reflectivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroFreqBehavior {
    /// ε ~ ωp²/ξ²: the perpendicular reflectivity keeps a finite limit.
    PlasmaLike { omega_p: f64 },
    /// ε ~ 1/ξ: the perpendicular reflectivity vanishes at ξ = 0.
    DrudeLike,
}

impl PermittivityModel {
    pub fn tabulated(table: OpticalTable) -> Self {
        PermittivityModel::Tabulated(TabulatedModel::new(table))
    }

    /// ε(iξ) with strict per-model semantics (the infrared model errors
    /// outside its validity region).
    pub fn eps_at(&self, xi: f64) -> Result<f64, OpticsError> {
        match self {
            PermittivityModel::Drude(p) => drude_eps_imaginary(xi, p),
            PermittivityModel::Plasma { omega_p } => plasma_eps_imaginary(xi, *omega_p),
            PermittivityModel::Infrared(p) => infrared_eps_imaginary(xi, p),
            PermittivityModel::Tabulated(t) => t.eps_at(xi),
        }
    }

    /// ε(iξ) as used inside force quadratures: identical to [`Self::eps_at`]
    /// except that the infrared model falls back to its plasma limit below
    /// the validity threshold, where the closed form would be
    /// meaningless but the integration domain still extends.
    pub fn eps_for_force(&self, xi: f64) -> Result<f64, OpticsError> {
        match self {
            PermittivityModel::Infrared(p) => match infrared_eps_imaginary(xi, p) {
                Ok(v) => Ok(v),
                Err(OpticsError::ModelValidity { .. }) => plasma_eps_imaginary(xi, p.omega_p),
                Err(e) => Err(e),
            },
            other => other.eps_at(xi),
        }
    }

    pub fn zero_freq_behavior(&self) -> ZeroFreqBehavior {
        match self {
            PermittivityModel::Plasma { omega_p } => ZeroFreqBehavior::PlasmaLike {
                omega_p: *omega_p,
            },
            PermittivityModel::Infrared(p) => ZeroFreqBehavior::PlasmaLike { omega_p: p.omega_p },
            PermittivityModel::Drude(_) | PermittivityModel::Tabulated(_) => {
                ZeroFreqBehavior::DrudeLike
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PermittivityModel::Drude(_) => "drude",
            PermittivityModel::Plasma { .. } => "plasma",
            PermittivityModel::Infrared(_) => "infrared",
            PermittivityModel::Tabulated(_) => "tabulated",
        }
    }
}

/// Parse an optical data file.
///
/// Format: `#` starts a comment; `# units: eV` or `# units: rad_s` selects
/// the first-column unit (default eV, converted with 1 eV = 1.52e15 rad/s);
/// an optional `# extension: <omega_p_rad_s> <gamma_rad_s>` directive
/// overrides the Drude closure attached below the tabulated range. Data
/// lines are `omega_or_energy, n, k`, comma-separated.
pub fn load_optical_table(
    path: impl AsRef<Path>,
    default_extension: DrudeParams,
) -> Result<OpticalTable, OpticsError> {
    let text = std::fs::read_to_string(path)?;
    parse_optical_table(&text, default_extension)
}

pub fn parse_optical_table(
    text: &str,
    default_extension: DrudeParams,
) -> Result<OpticalTable, OpticsError> {
    let mut unit_ev = true;
    let mut extension = default_extension;
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(units) = comment.strip_prefix("units:") {
                match units.trim() {
                    "eV" => unit_ev = true,
                    "rad_s" => unit_ev = false,
                    other => {
                        return Err(OpticsError::Format {
                            line: lineno + 1,
                            message: format!("unknown units directive '{other}'"),
                        })
                    }
                }
            } else if let Some(ext) = comment.strip_prefix("extension:") {
                let parts: Vec<&str> = ext.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(OpticsError::Format {
                        line: lineno + 1,
                        message: "extension directive needs '<omega_p_rad_s> <gamma_rad_s>'".into(),
                    });
                }
                let omega_p = parse_num(parts[0], lineno)?;
                let gamma = parse_num(parts[1], lineno)?;
                extension = DrudeParams { omega_p, gamma };
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(OpticsError::Format {
                line: lineno + 1,
                message: format!("expected 'omega_or_energy, n, k', got {} fields", fields.len()),
            });
        }
        let first = parse_num(fields[0], lineno)?;
        let n = parse_num(fields[1], lineno)?;
        let k = parse_num(fields[2], lineno)?;
        let omega = if unit_ev { first * EV_TO_RAD_S } else { first };
        rows.push((omega, n, k));
    }
    table_from_nk(&rows, extension)
}

fn parse_num(s: &str, lineno: usize) -> Result<f64, OpticsError> {
    s.parse::<f64>().map_err(|_| OpticsError::Format {
        line: lineno + 1,
        message: format!("not a number: '{s}'"),
    })
}
