//! Experimental-error machinery and theory-vs-experiment comparison:
//! Student-t confidence intervals, systematic/total/relative errors, RMS
//! deviation, separation-offset fitting, and the theoretical error budget.
//!
//! Internally forces are in N and separations in m; the scan-file boundary
//! uses pN and nm.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("{what}: {detail}")]
    Domain { what: &'static str, detail: String },
    #[error("scan set needs at least 2 included scans, has {0}")]
    TooFewScans(usize),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("failed to read scan data: {0}")]
    Io(#[from] std::io::Error),
    #[error("inverse t-distribution did not converge (beta = {beta}, n = {n})")]
    InverseT { beta: f64, n: usize },
}

/// Repeated force scans over a shared separation grid. Scan ids are
/// 1-based, matching the scan file columns.
#[derive(Debug, Clone)]
pub struct ScanSet {
    /// Separations, m, strictly increasing.
    separations: Vec<f64>,
    /// scans[k][i]: force of scan k at separation i, N.
    scans: Vec<Vec<f64>>,
    excluded: BTreeSet<usize>,
}

impl ScanSet {
    pub fn new(separations: Vec<f64>, scans: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        if separations.is_empty() {
            return Err(StatsError::Domain {
                what: "separations",
                detail: "empty grid".into(),
            });
        }
        if separations.windows(2).any(|w| w[1] <= w[0]) {
            return Err(StatsError::Domain {
                what: "separations",
                detail: "must be strictly increasing".into(),
            });
        }
        if scans.len() < 2 {
            return Err(StatsError::TooFewScans(scans.len()));
        }
        for (k, s) in scans.iter().enumerate() {
            if s.len() != separations.len() {
                return Err(StatsError::Domain {
                    what: "scan length",
                    detail: format!(
                        "scan {} has {} points, grid has {}",
                        k + 1,
                        s.len(),
                        separations.len()
                    ),
                });
            }
        }
        Ok(ScanSet {
            separations,
            scans,
            excluded: BTreeSet::new(),
        })
    }

    /// Remove scans by their 1-based ids before analysis.
    pub fn exclude_scans(&mut self, ids: &[usize]) -> Result<(), StatsError> {
        for &id in ids {
            if id == 0 || id > self.scans.len() {
                return Err(StatsError::Domain {
                    what: "exclusion",
                    detail: format!("scan id {id} out of range 1..={}", self.scans.len()),
                });
            }
            self.excluded.insert(id);
        }
        if self.n_scans() < 2 {
            return Err(StatsError::TooFewScans(self.n_scans()));
        }
        Ok(())
    }

    pub fn separations(&self) -> &[f64] {
        &self.separations
    }

    /// Number of scans after exclusions.
    pub fn n_scans(&self) -> usize {
        self.scans.len() - self.excluded.len()
    }

    pub fn excluded(&self) -> &BTreeSet<usize> {
        &self.excluded
    }

    fn included(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.scans
            .iter()
            .enumerate()
            .filter(move |(k, _)| !self.excluded.contains(&(k + 1)))
            .map(|(_, s)| s)
    }
}

/// Mean measured force per separation: F̄(z_i) = (1/n) Σ_k F_k(z_i), N.
pub fn mean_force(s: &ScanSet) -> Result<Vec<f64>, StatsError> {
    let n = s.n_scans();
    if n == 0 {
        return Err(StatsError::TooFewScans(0));
    }
    let m = s.separations.len();
    let mut mean = vec![0.0f64; m];
    for scan in s.included() {
        for (acc, &v) in mean.iter_mut().zip(scan) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= n as f64;
    }
    Ok(mean)
}

/// Variance of the mean per separation and its maximum over the grid.
#[derive(Debug, Clone)]
pub struct VarianceOfMean {
    /// s²_F̄(z_i), N².
    pub s_sq: Vec<f64>,
    /// max_i s_F̄(z_i), N — the conservative grid-wide estimate.
    pub s_max: f64,
}

/// s²_F̄(z_i) = Σ_k (F_k − F̄)² / (n(n−1)).
pub fn variance_of_mean(s: &ScanSet) -> Result<VarianceOfMean, StatsError> {
    let n = s.n_scans();
    if n < 2 {
        return Err(StatsError::TooFewScans(n));
    }
    let mean = mean_force(s)?;
    let m = s.separations.len();
    let mut s_sq = vec![0.0f64; m];
    for scan in s.included() {
        for i in 0..m {
            let d = scan[i] - mean[i];
            s_sq[i] += d * d;
        }
    }
    let norm = (n * (n - 1)) as f64;
    for v in &mut s_sq {
        *v /= norm;
    }
    let s_max = s_sq.iter().fold(0.0f64, |a, &v| a.max(v)).sqrt();
    Ok(VarianceOfMean { s_sq, s_max })
}

// ---- Student's t ----------------------------------------------------------

// Lanczos approximation (g = 7, 9 coefficients).
#[allow(clippy::excessive_precision)] // published coefficient values kept verbatim
fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + 7.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

// Continued fraction for the regularized incomplete beta (Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 500;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b).
fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

// CDF of Student's t with f degrees of freedom, t >= 0.
fn student_cdf(t: f64, f: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let x = f / (f + t * t);
    1.0 - 0.5 * inc_beta(0.5 * f, 0.5, x)
}

fn student_pdf(t: f64, f: f64) -> f64 {
    let ln_norm = ln_gamma(0.5 * (f + 1.0)) - ln_gamma(0.5 * f) - 0.5 * (f * std::f64::consts::PI).ln();
    (ln_norm - 0.5 * (f + 1.0) * (1.0 + t * t / f).ln()).exp()
}

/// Quantile t_p(f) with p = (1+β)/2 and f = n−1, solved from the inverse
/// regularized incomplete beta by bisection with Newton refinement
/// (absolute tolerance 1e-4, reached with wide margin).
pub fn student_threshold(beta: f64, n: usize) -> Result<f64, StatsError> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(StatsError::Domain {
            what: "beta",
            detail: format!("confidence level must be in (0, 1), got {beta}"),
        });
    }
    if n < 2 {
        return Err(StatsError::Domain {
            what: "n",
            detail: format!("need n >= 2, got {n}"),
        });
    }
    let p = 0.5 * (1.0 + beta);
    let f = (n - 1) as f64;

    // bracket the quantile
    let mut lo = 0.0f64;
    let mut hi = 2.0f64;
    let mut guard = 0;
    while student_cdf(hi, f) < p {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(StatsError::InverseT { beta, n });
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if student_cdf(mid, f) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..4 {
        let err = student_cdf(t, f) - p;
        let slope = student_pdf(t, f);
        if slope <= 0.0 {
            break;
        }
        t -= err / slope;
    }
    if !t.is_finite() {
        return Err(StatsError::InverseT { beta, n });
    }
    Ok(t)
}

/// Random absolute error Δ^rand = s_F̄ · t_p(f).
pub fn random_error(s_mean_max: f64, beta: f64, n: usize) -> Result<f64, StatsError> {
    Ok(s_mean_max * student_threshold(beta, n)?)
}

/// Systematic error: linear sum of the non-negative contributions.
pub fn systematic_error(contributions: &[f64]) -> Result<f64, StatsError> {
    for &c in contributions {
        if c < 0.0 {
            return Err(StatsError::Domain {
                what: "systematic contribution",
                detail: format!("must be non-negative, got {c}"),
            });
        }
    }
    Ok(contributions.iter().sum())
}

/// Total absolute error: conservative linear sum of random and systematic.
pub fn total_error(random: f64, systematic: f64) -> f64 {
    debug_assert!(random >= 0.0 && systematic >= 0.0);
    random + systematic
}

/// Confidence interval (mean − Δ, mean + Δ).
pub fn confidence_interval(mean: f64, total_error: f64) -> (f64, f64) {
    debug_assert!(total_error >= 0.0);
    (mean - total_error, mean + total_error)
}

/// Relative error Δ / F̄(z).
pub fn relative_error(total_error: f64, mean_at_z: f64) -> Result<f64, StatsError> {
    if mean_at_z == 0.0 {
        return Err(StatsError::Domain {
            what: "mean force",
            detail: "zero mean".into(),
        });
    }
    Ok(total_error / mean_at_z.abs())
}

/// The full confidence pipeline of one scan set.
#[derive(Debug, Clone)]
pub struct ConfidenceResult {
    /// Conservative variance of the mean, N.
    pub s_mean_max: f64,
    pub t_value: f64,
    pub random_error: f64,
    pub systematic_error: f64,
    pub total_error: f64,
    pub beta: f64,
    /// Number of scans used (after exclusions).
    pub n_scans: usize,
}

/// Compose the error pipeline: variance of the mean → Student threshold →
/// random, systematic and total errors.
pub fn confidence_analysis(
    s: &ScanSet,
    beta: f64,
    systematic_contributions: &[f64],
) -> Result<ConfidenceResult, StatsError> {
    let n = s.n_scans();
    let var = variance_of_mean(s)?;
    let t = student_threshold(beta, n)?;
    let rand = var.s_max * t;
    let syst = systematic_error(systematic_contributions)?;
    Ok(ConfidenceResult {
        s_mean_max: var.s_max,
        t_value: t,
        random_error: rand,
        systematic_error: syst,
        total_error: total_error(rand, syst),
        beta,
        n_scans: n,
    })
}

/// RMS deviation σ_M between a theory curve sampled on the experimental
/// grid and the experimental mean, over separations inside `region`
/// (inclusive, m).
pub fn rms_deviation(
    separations: &[f64],
    theory: &[f64],
    exp_mean: &[f64],
    region: (f64, f64),
) -> Result<f64, StatsError> {
    if separations.len() != theory.len() || separations.len() != exp_mean.len() {
        return Err(StatsError::Domain {
            what: "grids",
            detail: format!(
                "lengths differ: z {}, theory {}, mean {}",
                separations.len(),
                theory.len(),
                exp_mean.len()
            ),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..separations.len() {
        let z = separations[i];
        if z >= region.0 && z <= region.1 {
            let d = theory[i] - exp_mean[i];
            sum += d * d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(StatsError::Domain {
            what: "region",
            detail: format!("no grid points inside [{:e}, {:e}] m", region.0, region.1),
        });
    }
    Ok((sum / count as f64).sqrt())
}

/// A named separation region for σ reporting, bounds in m (inclusive).
pub type Region = (String, f64, f64);

/// The default σ-reporting regions: the full grid, separations up to
/// 210 nm, and separations below the plasma wavelength (136 nm).
pub fn default_regions() -> Vec<Region> {
    vec![
        ("full".to_string(), 0.0, f64::INFINITY),
        ("z <= 210 nm".to_string(), 0.0, 210e-9),
        ("z <= 136 nm".to_string(), 0.0, 136e-9),
    ]
}

/// Result of the separation-offset fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Offset d minimizing σ, m.
    pub offset_best: f64,
    /// z₀ nominal + best offset, m.
    pub z0_best: f64,
    /// σ at the best offset over the full grid, N.
    pub sigma_best: f64,
    /// Half the width of {d : σ(d) ≤ 1.1 σ_best}, m.
    pub equivalence_halfwidth: f64,
    /// σ at the best offset per region, N.
    pub sigma_by_region: Vec<(String, f64)>,
}

/// Exhaustive scan of separation offsets d ∈ [−halfwidth, +halfwidth]:
/// σ(d) is the RMS deviation between theory(z_i + d) and the experimental
/// mean; the returned fit minimizes σ over the grid of offsets.
pub fn fit_z0<F>(
    exp: &ScanSet,
    theory: F,
    z0_nominal: f64,
    halfwidth: f64,
    step: f64,
    regions: &[Region],
) -> Result<FitResult, StatsError>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(halfwidth > 0.0) || !(step > 0.0) {
        return Err(StatsError::Domain {
            what: "search window",
            detail: format!("halfwidth = {halfwidth:e}, step = {step:e}"),
        });
    }
    let mean = mean_force(exp)?;
    let z = exp.separations();
    let n_steps = (2.0 * halfwidth / step).round() as usize;
    let offsets: Vec<f64> = (0..=n_steps).map(|i| -halfwidth + i as f64 * step).collect();

    let sigmas: Vec<f64> = offsets
        .par_iter()
        .map(|&d| {
            let mut sum = 0.0;
            for i in 0..z.len() {
                let r = theory(z[i] + d) - mean[i];
                sum += r * r;
            }
            (sum / z.len() as f64).sqrt()
        })
        .collect();

    let (best_idx, &sigma_best) = sigmas
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty offset grid");
    let offset_best = offsets[best_idx];

    let threshold = 1.1 * sigma_best;
    let inside: Vec<f64> = offsets
        .iter()
        .zip(&sigmas)
        .filter(|(_, &s)| s <= threshold)
        .map(|(&d, _)| d)
        .collect();
    let equivalence_halfwidth = if inside.is_empty() {
        0.0
    } else {
        0.5 * (inside.last().unwrap() - inside.first().unwrap())
    };

    let theory_best: Vec<f64> = z.iter().map(|&zi| theory(zi + offset_best)).collect();
    let mut sigma_by_region = Vec::with_capacity(regions.len());
    for (label, lo, hi) in regions {
        let sigma = rms_deviation(z, &theory_best, &mean, (*lo, *hi))?;
        sigma_by_region.push((label.clone(), sigma));
    }

    Ok(FitResult {
        offset_best,
        z0_best: z0_nominal + offset_best,
        sigma_best,
        equivalence_halfwidth,
        sigma_by_region,
    })
}

/// A named error budget with linear combination.
#[derive(Debug, Clone)]
pub struct ErrorBudget {
    /// (label, relative contribution).
    pub contributions: Vec<(String, f64)>,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.contributions.iter().map(|c| c.1).sum()
    }
}

/// Theoretical error budget: the geometry term δ⁽¹⁾ = ΔR/R + 3Δz/z plus
/// any further named relative contributions, combined linearly.
pub fn theory_error_budget(
    z: f64,
    delta_r: f64,
    radius: f64,
    delta_z: f64,
    extra: &[(String, f64)],
) -> Result<ErrorBudget, StatsError> {
    if !(z > 0.0) || !(radius > 0.0) || delta_r < 0.0 || delta_z < 0.0 {
        return Err(StatsError::Domain {
            what: "budget inputs",
            detail: format!("z = {z:e}, R = {radius:e}, dR = {delta_r:e}, dz = {delta_z:e}"),
        });
    }
    for (label, v) in extra {
        if *v < 0.0 {
            return Err(StatsError::Domain {
                what: "budget contribution",
                detail: format!("'{label}' is negative: {v}"),
            });
        }
    }
    let mut contributions = vec![(
        "separation and radius (dR/R + 3 dz/z)".to_string(),
        delta_r / radius + 3.0 * delta_z / z,
    )];
    contributions.extend(extra.iter().cloned());
    Ok(ErrorBudget { contributions })
}

/// Parse a scan file: first non-comment line is the header
/// `z_nm, scan_1, ..., scan_n`; data rows carry the separation (nm) and one
/// force per scan (pN). `#` starts a comment.
pub fn load_scan_set(path: impl AsRef<Path>) -> Result<ScanSet, StatsError> {
    parse_scan_set(&std::fs::read_to_string(path)?)
}

pub fn parse_scan_set(text: &str) -> Result<ScanSet, StatsError> {
    let mut header: Option<usize> = None;
    let mut separations = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match header {
            None => {
                if fields.first() != Some(&"z_nm") {
                    return Err(StatsError::Format {
                        line: lineno + 1,
                        message: "header must start with 'z_nm'".into(),
                    });
                }
                if fields.len() < 3 {
                    return Err(StatsError::Format {
                        line: lineno + 1,
                        message: "need at least two scan columns".into(),
                    });
                }
                header = Some(fields.len() - 1);
                columns = vec![Vec::new(); fields.len() - 1];
            }
            Some(n_cols) => {
                if fields.len() != n_cols + 1 {
                    return Err(StatsError::Format {
                        line: lineno + 1,
                        message: format!("expected {} fields, got {}", n_cols + 1, fields.len()),
                    });
                }
                let parse = |s: &str| -> Result<f64, StatsError> {
                    s.parse().map_err(|_| StatsError::Format {
                        line: lineno + 1,
                        message: format!("not a number: '{s}'"),
                    })
                };
                separations.push(parse(fields[0])? * 1e-9);
                for (c, f) in columns.iter_mut().zip(&fields[1..]) {
                    c.push(parse(f)? * 1e-12);
                }
            }
        }
    }
    if header.is_none() {
        return Err(StatsError::Format {
            line: 0,
            message: "missing header line".into(),
        });
    }
    ScanSet::new(separations, columns)
}
