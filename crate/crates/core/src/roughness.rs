//! Surface-roughness statistics and roughness corrections to the force.
//!
//! Topography enters as a height histogram (fractions v_i of surface area at
//! heights h_i). The zero roughness level H₀ is the mean height, separations
//! are measured between zero levels, and the force is corrected either by
//! geometric averaging over all height pairs or by the multiplicative
//! stochastic-roughness factor.

use std::path::Path;

use rustfft::{num_complex::Complex, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RoughnessError {
    #[error("histogram fractions sum to {sum} (must be 1 within {tol})")]
    Normalization { sum: f64, tol: f64 },
    #[error("histogram heights must be strictly increasing (bin {index})")]
    HeightOrder { index: usize },
    #[error("histogram fraction must be non-negative, got {value} (bin {index})")]
    NegativeFraction { index: usize, value: f64 },
    #[error("histogram needs at least one bin")]
    Empty,
    #[error("bodies touch: bins ({i}, {j}) give separation {separation:e} m <= 0")]
    Contact { i: usize, j: usize, separation: f64 },
    #[error("stochastic amplitude {a_st:e} m must be smaller than the separation {z:e} m")]
    AmplitudeTooLarge { a_st: f64, z: f64 },
    #[error("z/l_corr = {x} outside the diffraction lookup range [{lo}, {hi}]")]
    LookupRange { x: f64, lo: f64, hi: f64 },
    #[error("diffraction lookup must be monotone increasing in both columns (row {index})")]
    LookupOrder { index: usize },
    #[error("height profile needs at least 16 uniformly spaced samples")]
    ProfileTooShort,
    #[error("height profile spacing is not uniform (sample {index})")]
    ProfileSpacing { index: usize },
    #[error("profile is flat: no nonzero Fourier component")]
    DegenerateProfile,
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("failed to read roughness data: {0}")]
    Io(#[from] std::io::Error),
}

/// Height histogram: ordered (height, area fraction) pairs, heights in m.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughnessHistogram {
    bins: Vec<(f64, f64)>,
}

/// Normalization tolerance for strict construction.
const NORM_TOL_STRICT: f64 = 1e-6;
/// Accepted deviation before renormalization when loading files.
pub const NORM_TOL_FILE: f64 = 1e-3;

impl RoughnessHistogram {
    /// Strict constructor: Σv = 1 within 1e-6.
    pub fn new(bins: Vec<(f64, f64)>) -> Result<Self, RoughnessError> {
        Self::validated(bins, NORM_TOL_STRICT, false)
    }

    /// Lenient constructor: Σv may deviate up to `tol`, after which the
    /// fractions are rescaled to sum to exactly one.
    pub fn new_renormalized(bins: Vec<(f64, f64)>, tol: f64) -> Result<Self, RoughnessError> {
        Self::validated(bins, tol, true)
    }

    fn validated(
        mut bins: Vec<(f64, f64)>,
        tol: f64,
        renormalize: bool,
    ) -> Result<Self, RoughnessError> {
        if bins.is_empty() {
            return Err(RoughnessError::Empty);
        }
        for (i, &(h, v)) in bins.iter().enumerate() {
            if v < 0.0 {
                return Err(RoughnessError::NegativeFraction { index: i, value: v });
            }
            if i > 0 && h <= bins[i - 1].0 {
                return Err(RoughnessError::HeightOrder { index: i });
            }
        }
        let sum: f64 = bins.iter().map(|b| b.1).sum();
        if (sum - 1.0).abs() > tol * (1.0 + 1e-9) {
            return Err(RoughnessError::Normalization { sum, tol });
        }
        if renormalize && sum != 1.0 {
            for b in &mut bins {
                b.1 /= sum;
            }
        }
        Ok(RoughnessHistogram { bins })
    }

    pub fn bins(&self) -> &[(f64, f64)] {
        &self.bins
    }

    /// Degenerate single-bin histogram at height h (a perfectly flat body).
    pub fn flat(h: f64) -> Self {
        RoughnessHistogram { bins: vec![(h, 1.0)] }
    }
}

/// The derived roughness statistics, all in m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoughnessStats {
    /// Zero roughness level H₀.
    pub h0: f64,
    /// Regular-roughness amplitude A = h_max − H₀.
    pub amplitude: f64,
    /// Standard deviation δ_st of the height distribution.
    pub delta_st: f64,
    /// Stochastic amplitude A_st = √2 δ_st.
    pub a_st: f64,
}

/// Zero roughness level H₀ = Σ h_i v_i: the level about which the mean
/// height deviation vanishes.
pub fn zero_level(h: &RoughnessHistogram) -> f64 {
    h.bins().iter().map(|&(hi, vi)| hi * vi).sum()
}

/// Regular-roughness amplitude A = max h_i − H₀.
pub fn amplitude(h: &RoughnessHistogram) -> f64 {
    let h0 = zero_level(h);
    h.bins().last().unwrap().0 - h0
}

/// Variance-based statistics: δ_st² = Σ (H₀ − h_i)² v_i, A_st = √2 δ_st.
pub fn stochastic_stats(h: &RoughnessHistogram) -> RoughnessStats {
    let h0 = zero_level(h);
    let var: f64 = h
        .bins()
        .iter()
        .map(|&(hi, vi)| (h0 - hi) * (h0 - hi) * vi)
        .sum();
    let delta_st = var.sqrt();
    RoughnessStats {
        h0,
        amplitude: h.bins().last().unwrap().0 - h0,
        delta_st,
        a_st: std::f64::consts::SQRT_2 * delta_st,
    }
}

/// Geometric roughness averaging:
/// F_r(z) = Σ_{ij} v_i v_j F(z + H₀_plate + H₀_sphere − h_i − h_j).
///
/// With one histogram passed for both bodies this is the standard
/// 2H₀ − h_i − h_j shift. Compensated summation keeps the result
/// independent of bin order.
pub fn force_rough_averaged(
    z: f64,
    h_plate: &RoughnessHistogram,
    h_sphere: &RoughnessHistogram,
    force: impl Fn(f64) -> f64,
) -> Result<f64, RoughnessError> {
    let h0 = zero_level(h_plate) + zero_level(h_sphere);
    // contact check first so the error names the offending pair
    for (i, &(hi, _)) in h_plate.bins().iter().enumerate() {
        for (j, &(hj, _)) in h_sphere.bins().iter().enumerate() {
            let sep = z + h0 - hi - hj;
            if sep <= 0.0 {
                return Err(RoughnessError::Contact {
                    i,
                    j,
                    separation: sep,
                });
            }
        }
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &(hi, vi) in h_plate.bins() {
        for &(hj, vj) in h_sphere.bins() {
            let term = vi * vj * force(z + h0 - hi - hj);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
    }
    Ok(sum)
}

/// Stochastic-roughness multiplicative factor 1 + 6(A_st/z)² + 45(A_st/z)⁴.
pub fn roughness_factor(z: f64, a_st: f64) -> Result<f64, RoughnessError> {
    if !(a_st < z) || a_st < 0.0 {
        return Err(RoughnessError::AmplitudeTooLarge { a_st, z });
    }
    let x2 = (a_st / z) * (a_st / z);
    Ok(1.0 + 6.0 * x2 + 45.0 * x2 * x2)
}

/// Multiplicative roughness correction applied to a force value.
pub fn force_rough_multiplicative(z: f64, a_st: f64, f_c: f64) -> Result<f64, RoughnessError> {
    Ok(f_c * roughness_factor(z, a_st)?)
}

/// Tabulated diffraction coefficient c_corr as a function of z/l_corr.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffractionLookup {
    rows: Vec<(f64, f64)>,
}

impl DiffractionLookup {
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self, RoughnessError> {
        if rows.len() < 2 {
            return Err(RoughnessError::LookupOrder { index: 0 });
        }
        for i in 1..rows.len() {
            if rows[i].0 <= rows[i - 1].0 || rows[i].1 < rows[i - 1].1 {
                return Err(RoughnessError::LookupOrder { index: i });
            }
        }
        Ok(DiffractionLookup { rows })
    }

    /// The built-in anchors: c_corr(0) = 1 plus the two published points
    /// c_corr(0.31) ≈ 1.1 and c_corr(0.45) ≈ 1.28. Callers may supply a
    /// denser table.
    pub fn builtin() -> Self {
        DiffractionLookup {
            rows: vec![(0.0, 1.0), (0.31, 1.1), (0.45, 1.28)],
        }
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rows.first().unwrap().0, self.rows.last().unwrap().0)
    }

    fn eval(&self, x: f64) -> Result<f64, RoughnessError> {
        let (lo, hi) = self.range();
        if x < lo || x > hi {
            return Err(RoughnessError::LookupRange { x, lo, hi });
        }
        let idx = self
            .rows
            .windows(2)
            .position(|w| x <= w[1].0)
            .expect("x within range");
        let (x0, c0) = self.rows[idx];
        let (x1, c1) = self.rows[idx + 1];
        Ok(c0 + (c1 - c0) * (x - x0) / (x1 - x0))
    }
}

/// Diffraction-corrected roughness factor 1 + 6 c_corr(z/l_corr) (A_st/z)².
pub fn diffraction_factor(
    z: f64,
    a_st: f64,
    l_corr: f64,
    lut: &DiffractionLookup,
) -> Result<f64, RoughnessError> {
    let c = lut.eval(z / l_corr)?;
    let x2 = (a_st / z) * (a_st / z);
    Ok(1.0 + 6.0 * c * x2)
}

/// Uniformly sampled surface cross-section, positions and heights in m.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightProfile {
    spacing: f64,
    heights: Vec<f64>,
}

impl HeightProfile {
    pub fn new(positions: &[f64], heights: Vec<f64>) -> Result<Self, RoughnessError> {
        if positions.len() < 16 || positions.len() != heights.len() {
            return Err(RoughnessError::ProfileTooShort);
        }
        let spacing = positions[1] - positions[0];
        if !(spacing > 0.0) {
            return Err(RoughnessError::ProfileSpacing { index: 1 });
        }
        for i in 2..positions.len() {
            let d = positions[i] - positions[i - 1];
            if ((d - spacing) / spacing).abs() > 1e-9 {
                return Err(RoughnessError::ProfileSpacing { index: i });
            }
        }
        Ok(HeightProfile { spacing, heights })
    }

    pub fn from_uniform(spacing: f64, heights: Vec<f64>) -> Result<Self, RoughnessError> {
        if heights.len() < 16 || !(spacing > 0.0) {
            return Err(RoughnessError::ProfileTooShort);
        }
        Ok(HeightProfile { spacing, heights })
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
}

/// Period of the largest-magnitude nonzero Fourier component of the
/// mean-subtracted profile, in the position unit.
pub fn dominant_period(p: &HeightProfile) -> Result<f64, RoughnessError> {
    let n = p.heights.len();
    let mean = p.heights.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = p
        .heights
        .iter()
        .map(|&h| Complex::new(h - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let mut best_k = 0usize;
    let mut best_mag = 0.0f64;
    for (k, c) in buf.iter().enumerate().take(n / 2 + 1).skip(1) {
        let mag = c.norm_sqr();
        if mag > best_mag {
            best_mag = mag;
            best_k = k;
        }
    }
    if best_k == 0 || best_mag <= 1e-24 * (n as f64) {
        return Err(RoughnessError::DegenerateProfile);
    }
    Ok(n as f64 * p.spacing / best_k as f64)
}

/// Parse a roughness histogram file: lines `height_nm, fraction`, `#`
/// comments. Fractions must sum to 1 within 1e-3 and are renormalized.
pub fn load_histogram(path: impl AsRef<Path>) -> Result<RoughnessHistogram, RoughnessError> {
    parse_histogram(&std::fs::read_to_string(path)?)
}

pub fn parse_histogram(text: &str) -> Result<RoughnessHistogram, RoughnessError> {
    let mut bins = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(RoughnessError::Format {
                line: lineno + 1,
                message: format!("expected 'height_nm, fraction', got {} fields", fields.len()),
            });
        }
        let h: f64 = fields[0].parse().map_err(|_| RoughnessError::Format {
            line: lineno + 1,
            message: format!("not a number: '{}'", fields[0]),
        })?;
        let v: f64 = fields[1].parse().map_err(|_| RoughnessError::Format {
            line: lineno + 1,
            message: format!("not a number: '{}'", fields[1]),
        })?;
        bins.push((h * 1e-9, v));
    }
    RoughnessHistogram::new_renormalized(bins, NORM_TOL_FILE)
}

/// Parse a profile file: lines `position_nm, height_nm`, `#` comments.
pub fn load_profile(path: impl AsRef<Path>) -> Result<HeightProfile, RoughnessError> {
    parse_profile(&std::fs::read_to_string(path)?)
}

pub fn parse_profile(text: &str) -> Result<HeightProfile, RoughnessError> {
    let mut positions = Vec::new();
    let mut heights = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(RoughnessError::Format {
                line: lineno + 1,
                message: format!("expected 'position_nm, height_nm', got {} fields", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64, RoughnessError> {
            s.parse().map_err(|_| RoughnessError::Format {
                line: lineno + 1,
                message: format!("not a number: '{s}'"),
            })
        };
        positions.push(parse(fields[0])? * 1e-9);
        heights.push(parse(fields[1])? * 1e-9);
    }
    HeightProfile::new(&positions, heights)
}

/// The measured height histogram of the gold coating (heights in nm
/// converted to m): seventeen levels from 0 to 16 nm.
pub fn measured_gold_histogram() -> RoughnessHistogram {
    let data: [(f64, f64); 17] = [
        (0.0, 1.06e-3),
        (1.0, 5.086e-2),
        (2.0, 0.33511),
        (3.0, 0.45863),
        (4.0, 0.13695),
        (5.0, 1.586e-2),
        (6.0, 1.24e-3),
        (7.0, 1.6e-4),
        (8.0, 4e-5),
        (9.0, 2e-5),
        (10.0, 1e-5),
        (11.0, 1e-5),
        (12.0, 1e-5),
        (13.0, 1e-5),
        (14.0, 1e-5),
        (15.0, 1.2e-5),
        (16.0, 8e-6),
    ];
    RoughnessHistogram::new(data.iter().map(|&(h, v)| (h * 1e-9, v)).collect())
        .expect("measured histogram is normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_level_of_measured_histogram() {
        let h = measured_gold_histogram();
        assert_relative_eq!(zero_level(&h), 2.734e-9, epsilon = 1e-12);
    }

    #[test]
    fn zero_level_trivial_cases() {
        assert_relative_eq!(zero_level(&RoughnessHistogram::flat(5e-9)), 5e-9);
        let two = RoughnessHistogram::new(vec![(0.0, 0.5), (10e-9, 0.5)]).unwrap();
        assert_relative_eq!(zero_level(&two), 5e-9);
    }

    #[test]
    fn amplitude_of_measured_histogram() {
        let h = measured_gold_histogram();
        assert_relative_eq!(amplitude(&h), 13.266e-9, epsilon = 1e-12);
        assert_eq!(amplitude(&RoughnessHistogram::flat(5e-9)), 0.0);
        let two = RoughnessHistogram::new(vec![(0.0, 0.5), (10e-9, 0.5)]).unwrap();
        assert_relative_eq!(amplitude(&two), 5e-9);
    }

    #[test]
    fn stochastic_stats_of_measured_histogram() {
        let s = stochastic_stats(&measured_gold_histogram());
        assert!((s.delta_st - 0.837e-9).abs() < 0.001e-9, "delta_st = {:e}", s.delta_st);
        assert!((s.a_st - 1.18e-9).abs() < 0.01e-9, "a_st = {:e}", s.a_st);
    }

    #[test]
    fn stochastic_stats_trivial() {
        assert_eq!(stochastic_stats(&RoughnessHistogram::flat(7e-9)).delta_st, 0.0);
        let two = RoughnessHistogram::new(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        assert_relative_eq!(stochastic_stats(&two).delta_st, 1.0);
    }

    #[test]
    fn averaging_degenerates_to_plain_force() {
        let flat = RoughnessHistogram::flat(3e-9);
        let f = |s: f64| -1.0 / (s * s * s);
        let got = force_rough_averaged(100e-9, &flat, &flat, f).unwrap();
        assert_relative_eq!(got, f(100e-9), max_relative = 1e-14);
    }

    #[test]
    fn averaging_matches_hand_enumerated_sum() {
        // two bins on each body -> four-term sum, enumerated independently
        let h = RoughnessHistogram::new(vec![(1e-9, 0.25), (4e-9, 0.75)]).unwrap();
        let f = |s: f64| s.powi(-3);
        let z = 50e-9;
        let h0 = 0.25 * 1e-9 + 0.75 * 4e-9;
        let mut expected = 0.0;
        for &(hi, vi) in &[(1e-9, 0.25), (4e-9, 0.75)] {
            for &(hj, vj) in &[(1e-9, 0.25), (4e-9, 0.75)] {
                expected += vi * vj * f(z + 2.0 * h0 - hi - hj);
            }
        }
        let got = force_rough_averaged(z, &h, &h, f).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
    }

    #[test]
    fn averaging_reports_contact() {
        let h = RoughnessHistogram::new(vec![(0.0, 0.5), (40e-9, 0.5)]).unwrap();
        let err = force_rough_averaged(30e-9, &h, &h, |s| s).unwrap_err();
        match err {
            RoughnessError::Contact { i: 1, j: 1, .. } => {}
            other => panic!("expected contact at (1,1), got {other}"),
        }
    }

    #[test]
    fn averaging_enhances_attraction_for_convex_force() {
        let h = measured_gold_histogram();
        let f = |s: f64| -1.0 / (s * s * s);
        let z = 62e-9;
        let avg = force_rough_averaged(z, &h, &h, f).unwrap();
        assert!(avg.abs() >= f(z).abs());
    }

    #[test]
    fn shift_invariance() {
        let h = measured_gold_histogram();
        let shifted = RoughnessHistogram::new(
            h.bins().iter().map(|&(hi, vi)| (hi + 3e-9, vi)).collect(),
        )
        .unwrap();
        let s0 = stochastic_stats(&h);
        let s1 = stochastic_stats(&shifted);
        assert_relative_eq!(s0.delta_st, s1.delta_st, max_relative = 1e-9);
        assert_relative_eq!(s0.amplitude, s1.amplitude, max_relative = 1e-9);
        assert_relative_eq!(s1.h0 - s0.h0, 3e-9, max_relative = 1e-9);
        let f = |s: f64| -1.0 / (s * s * s);
        let a = force_rough_averaged(80e-9, &h, &h, f).unwrap();
        let b = force_rough_averaged(80e-9, &shifted, &shifted, f).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn roughness_factor_values() {
        let a_st = stochastic_stats(&measured_gold_histogram()).a_st;
        assert_eq!(roughness_factor(100e-9, 0.0).unwrap(), 1.0);
        let f62 = roughness_factor(62e-9, a_st).unwrap();
        assert!((f62 - 1.0022).abs() < 2e-4, "eta_r(62) = {f62}");
        let f90 = roughness_factor(90e-9, a_st).unwrap();
        assert!((f90 - 1.0010).abs() < 2e-4, "eta_r(90) = {f90}");
        assert!(roughness_factor(1e-9, 2e-9).is_err());
    }

    #[test]
    fn quartic_term_negligible_at_measured_amplitude() {
        let a_st = 1.18e-9;
        let z = 62e-9;
        let full = roughness_factor(z, a_st).unwrap();
        let x2 = (a_st / z) * (a_st / z);
        let quadratic_only = 1.0 + 6.0 * x2;
        assert!((full - quadratic_only).abs() < 1e-5);
    }

    #[test]
    fn multiplicative_vs_averaged_agreement() {
        let h = measured_gold_histogram();
        let a_st = stochastic_stats(&h).a_st;
        let f = |s: f64| -1.0 / (s * s * s);
        for &z in &[62e-9, 70e-9, 80e-9, 90e-9] {
            let avg = force_rough_averaged(z, &h, &h, f).unwrap();
            let mult = force_rough_multiplicative(z, a_st, f(z)).unwrap();
            let rel = ((avg - mult) / mult).abs();
            assert!(rel < 2e-3, "z = {z:e}: averaged vs multiplicative {rel}");
        }
    }

    #[test]
    fn renormalization_contract() {
        let bins = vec![(0.0, 0.4995), (1e-9, 0.4995)]; // sums to 0.999
        let h = RoughnessHistogram::new_renormalized(bins.clone(), NORM_TOL_FILE).unwrap();
        let sum: f64 = h.bins().iter().map(|b| b.1).sum();
        assert_relative_eq!(sum, 1.0, epsilon = 1e-15);
        assert!(RoughnessHistogram::new(bins).is_err());
        // outputs unchanged by rescaling when heights are unchanged
        let loose = RoughnessHistogram::new_renormalized(
            vec![(0.0, 0.9990), (1e-9, 0.9990)],
            1.0,
        )
        .unwrap();
        let strict = RoughnessHistogram::new(vec![(0.0, 0.5), (1e-9, 0.5)]).unwrap();
        assert_relative_eq!(zero_level(&loose), zero_level(&strict), max_relative = 1e-12);
    }

    #[test]
    fn diffraction_factor_anchors() {
        let lut = DiffractionLookup::builtin();
        let a_st = 1.18357e-9;
        let f62 = diffraction_factor(62e-9, a_st, 200e-9, &lut).unwrap();
        assert!((f62 - 1.0024).abs() < 2e-4, "eta_r_corr(62) = {f62}");
        let f90 = diffraction_factor(90e-9, a_st, 200e-9, &lut).unwrap();
        assert!((f90 - 1.0013).abs() < 2e-4, "eta_r_corr(90) = {f90}");
        // out of range
        assert!(diffraction_factor(200e-9, a_st, 200e-9, &lut).is_err());
        // c_corr == 1 reduces to the quadratic part of roughness_factor
        let unit = DiffractionLookup::new(vec![(0.0, 1.0), (10.0, 1.0 + 1e-12)]).unwrap();
        let d = diffraction_factor(62e-9, a_st, 200e-9, &unit).unwrap();
        let x2 = (a_st / 62e-9) * (a_st / 62e-9);
        assert_relative_eq!(d, 1.0 + 6.0 * x2, max_relative = 1e-9);
    }

    #[test]
    fn dominant_period_pure_sine() {
        let n = 512;
        let dx = 5e-9;
        let period = 180e-9;
        let heights: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 * dx / period).sin() * 2e-9)
            .collect();
        let p = HeightProfile::from_uniform(dx, heights).unwrap();
        let got = dominant_period(&p).unwrap();
        // within one frequency bin
        let k = (n as f64 * dx / period).round();
        let bin_lo = n as f64 * dx / (k + 1.0);
        let bin_hi = n as f64 * dx / (k - 1.0);
        assert!(got >= bin_lo && got <= bin_hi, "period {got:e}");
    }

    #[test]
    fn dominant_period_two_sines() {
        let n = 1024;
        let dx = 2e-9;
        let f = |x: f64| {
            3e-9 * (2.0 * std::f64::consts::PI * x / 180e-9).sin()
                + 0.5e-9 * (2.0 * std::f64::consts::PI * x / 60e-9).sin()
        };
        let heights: Vec<f64> = (0..n).map(|i| f(i as f64 * dx)).collect();
        let p = HeightProfile::from_uniform(dx, heights).unwrap();
        let got = dominant_period(&p).unwrap();
        assert!((got - 180e-9).abs() / 180e-9 < 0.05, "period {got:e}");
    }

    #[test]
    fn dominant_period_matches_exhaustive_scan_on_noise() {
        // deterministic pseudo-noise; oracle is a direct O(n^2) DFT bin scan
        let n = 256;
        let dx = 1e-9;
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut rand = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let heights: Vec<f64> = (0..n).map(|_| rand() * 1e-9).collect();
        let mean = heights.iter().sum::<f64>() / n as f64;
        let mut best_k = 0;
        let mut best_mag = 0.0;
        for k in 1..=n / 2 {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (i, &h) in heights.iter().enumerate() {
                let phase = -2.0 * std::f64::consts::PI * (k * i) as f64 / n as f64;
                re += (h - mean) * phase.cos();
                im += (h - mean) * phase.sin();
            }
            let mag = re * re + im * im;
            if mag > best_mag {
                best_mag = mag;
                best_k = k;
            }
        }
        let expected = n as f64 * dx / best_k as f64;
        let p = HeightProfile::from_uniform(dx, heights).unwrap();
        assert_relative_eq!(dominant_period(&p).unwrap(), expected, max_relative = 1e-9);
    }

    #[test]
    fn flat_profile_is_degenerate() {
        let p = HeightProfile::from_uniform(1e-9, vec![2e-9; 64]).unwrap();
        match dominant_period(&p).unwrap_err() {
            RoughnessError::DegenerateProfile => {}
            other => panic!("expected degenerate profile, got {other}"),
        }
    }

    #[test]
    fn histogram_file_round_trip() {
        let text = "# heights\n0, 1.06e-3\n1, 5.086e-2\n2, 0.33511\n3, 0.45863\n4, 0.13695\n\
                    5, 1.586e-2\n6, 1.24e-3\n7, 1.6e-4\n8, 4e-5\n9, 2e-5\n10, 1e-5\n11, 1e-5\n\
                    12, 1e-5\n13, 1e-5\n14, 1e-5\n15, 1.2e-5\n16, 8e-6\n";
        let h = parse_histogram(text).unwrap();
        assert_relative_eq!(zero_level(&h), 2.734e-9, epsilon = 1e-12);
    }

    #[test]
    fn profile_file_round_trip() {
        let mut text = String::from("# cross section\n");
        for i in 0..64 {
            let x = i as f64 * 5.0;
            let h = 2.0 + (2.0 * std::f64::consts::PI * x / 180.0).sin();
            text.push_str(&format!("{x}, {h}\n"));
        }
        let p = parse_profile(&text).unwrap();
        assert_eq!(p.len(), 64);
        assert!((p.spacing() - 5e-9).abs() < 1e-18);
        let period = dominant_period(&p).unwrap();
        assert!((period - 180e-9).abs() / 180e-9 < 0.15, "period {period:e}");
    }

    #[test]
    fn profile_rejects_nonuniform_spacing() {
        let mut text = String::new();
        for i in 0..20 {
            let x = if i < 10 { i as f64 } else { i as f64 * 1.5 };
            text.push_str(&format!("{x}, 1.0\n"));
        }
        assert!(matches!(
            parse_profile(&text).unwrap_err(),
            RoughnessError::ProfileSpacing { .. }
        ));
    }

    #[test]
    fn histogram_file_errors_have_line_numbers() {
        match parse_histogram("0, 0.5\nbroken line\n").unwrap_err() {
            RoughnessError::Format { line: 2, .. } => {}
            other => panic!("expected format error on line 2, got {other}"),
        }
    }
}
