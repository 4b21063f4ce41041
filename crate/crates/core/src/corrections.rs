//! Thermal corrections, patch-potential electric force, and the finite
//! plate-size factor.
//!
//! Three thermal prescriptions are computed: the traditional one (plasma
//! permittivity in the finite-temperature Lifshitz formula) and two
//! alternatives that modify the zero-frequency perpendicular mode. The
//! patch force follows from random surface-potential variations across
//! crystallite grains with a sharp wavevector cutoff.

use thiserror::Error;

use crate::constants::{C, EPSILON_0, K_B, ZETA_3};
use crate::lifshitz::{
    casimir_force_t0, casimir_force_thermal, perp_zero_mode_integral, LifshitzError,
    SpherePlateGeometry,
};
use crate::optics::PermittivityModel;
use crate::quad::{self, QuadError};

#[derive(Debug, Error)]
pub enum CorrectionsError {
    #[error("{what} out of domain: {detail}")]
    Domain { what: &'static str, detail: String },
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

/// Which thermal-correction prescription produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalKind {
    Traditional,
    Alternative1,
    Alternative2,
}

/// Thermal correction Δ_T F = F(z, T) − F(z, 0) in absolute (N) and
/// relative form. The relative value is Δ divided by |F(z, 0)| and keeps
/// the sign of Δ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalCorrection {
    pub kind: ThermalKind,
    pub delta_abs: f64,
    pub delta_rel: f64,
}

fn plasma_model(omega_p: f64) -> PermittivityModel {
    PermittivityModel::Plasma { omega_p }
}

/// Traditional thermal correction: the plasma permittivity is used in both
/// the finite-temperature and zero-temperature force.
pub fn thermal_correction_traditional(
    g: &SpherePlateGeometry,
    temperature: f64,
    omega_p: f64,
) -> Result<ThermalCorrection, CorrectionsError> {
    let model = plasma_model(omega_p);
    let warm = casimir_force_thermal(g, &model, temperature)?;
    let cold = casimir_force_t0(g, &model)?;
    let delta_abs = warm.value - cold.value;
    Ok(ThermalCorrection {
        kind: ThermalKind::Traditional,
        delta_abs,
        delta_rel: delta_abs / cold.value.abs(),
    })
}

fn zero_mode_prefactor(g: &SpherePlateGeometry, temperature: f64) -> f64 {
    K_B * temperature * g.radius() / (8.0 * g.z() * g.z())
}

/// First alternative prescription: the plasma-model zero-frequency
/// perpendicular mode is removed from the traditional result,
/// Δ⁽¹⁾ = Δ^tr − (k_B T R / 8z²) ∫ y ln[1 − r⊥²(0,y) e^{−y}] dy.
pub fn alt_thermal_1(
    g: &SpherePlateGeometry,
    temperature: f64,
    omega_p: f64,
) -> Result<ThermalCorrection, CorrectionsError> {
    let traditional = thermal_correction_traditional(g, temperature, omega_p)?;
    let alpha = 2.0 * g.z() * omega_p / C;
    let perp = perp_zero_mode_integral(alpha)?;
    let delta_abs = traditional.delta_abs - zero_mode_prefactor(g, temperature) * perp.value;
    let cold = casimir_force_t0(g, &plasma_model(omega_p))?;
    Ok(ThermalCorrection {
        kind: ThermalKind::Alternative1,
        delta_abs,
        delta_rel: delta_abs / cold.value.abs(),
    })
}

/// Second alternative prescription: the zero-frequency perpendicular mode
/// is restored at its ideal-metal value,
/// Δ⁽²⁾ = Δ⁽¹⁾ + (k_B T R / 8z²) ∫ y ln(1 − e^{−y}) dy,
/// where the added integral equals −ζ(3) in closed form.
pub fn alt_thermal_2(
    g: &SpherePlateGeometry,
    temperature: f64,
    omega_p: f64,
) -> Result<ThermalCorrection, CorrectionsError> {
    let first = alt_thermal_1(g, temperature, omega_p)?;
    let delta_abs = first.delta_abs + zero_mode_prefactor(g, temperature) * (-ZETA_3);
    let cold = casimir_force_t0(g, &plasma_model(omega_p))?;
    Ok(ThermalCorrection {
        kind: ThermalKind::Alternative2,
        delta_abs,
        delta_rel: delta_abs / cold.value.abs(),
    })
}

/// Patch-potential parameters: potential variance σ_v (V) and the grain
/// wavevector cutoffs (1/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchParams {
    pub sigma_v: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl PatchParams {
    pub fn new(sigma_v: f64, k_min: f64, k_max: f64) -> Result<Self, CorrectionsError> {
        if !(k_min > 0.0) || !(k_max > k_min) || sigma_v < 0.0 {
            return Err(CorrectionsError::Domain {
                what: "patch parameters",
                detail: format!("sigma_v = {sigma_v}, k_min = {k_min:e}, k_max = {k_max:e}"),
            });
        }
        Ok(PatchParams {
            sigma_v,
            k_min,
            k_max,
        })
    }

    /// Defaults for the measured gold films: σ_v from the three gold work
    /// functions, cutoffs from the extremal grain sizes 68 nm and 121 nm.
    pub fn gold_defaults() -> Self {
        let sigma_v = patch_sigma(&[5.47, 5.37, 5.31]).expect("three work functions");
        let w = grain_wavevectors(68e-9, 121e-9).expect("valid grain sizes");
        PatchParams {
            sigma_v,
            k_min: w.k_min,
            k_max: w.k_max,
        }
    }
}

/// Electric force from random patch potentials between sphere and plate:
/// F_p(z) = −4πε₀ σ_v² R / (k_max² − k_min²) ∫ k² e^{−kz}/sinh(kz) dk, N.
pub fn patch_force(z: f64, radius: f64, p: &PatchParams) -> Result<f64, CorrectionsError> {
    if !(z > 0.0) || !(radius > 0.0) {
        return Err(CorrectionsError::Domain {
            what: "patch geometry",
            detail: format!("z = {z:e}, R = {radius:e}"),
        });
    }
    if p.sigma_v == 0.0 {
        return Ok(0.0);
    }
    // substitution u = kz; integrand u^2 e^{-u} / sinh u is smooth on u > 0
    let (a, b) = (p.k_min * z, p.k_max * z);
    let integral = quad::adaptive(
        &|u: f64| u * u * (-u).exp() / u.sinh(),
        a,
        b,
        1e-8,
        0.0,
        2000,
    )?;
    let prefactor = 4.0 * std::f64::consts::PI * EPSILON_0 * p.sigma_v * p.sigma_v * radius
        / (p.k_max * p.k_max - p.k_min * p.k_min);
    Ok(-prefactor * integral.value / (z * z * z))
}

/// Patch-potential variance from work functions of the exposed
/// crystallographic planes (equal areas assumed):
/// σ_v = (1/√2) [Σ (V_i − V̄)²]^{1/2}, V.
pub fn patch_sigma(work_functions: &[f64]) -> Result<f64, CorrectionsError> {
    if work_functions.len() < 2 {
        return Err(CorrectionsError::Domain {
            what: "work functions",
            detail: format!("need at least 2 values, got {}", work_functions.len()),
        });
    }
    let mean = work_functions.iter().sum::<f64>() / work_functions.len() as f64;
    let ss: f64 = work_functions.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok(ss.sqrt() / std::f64::consts::SQRT_2)
}

/// Wavevector cutoffs from the extremal grain sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrainWavevectors {
    pub k_min: f64,
    pub k_max: f64,
}

/// k_max = 2π/λ_min, k_min = 2π/λ_max for grain sizes λ_min < λ_max.
pub fn grain_wavevectors(lambda_min: f64, lambda_max: f64) -> Result<GrainWavevectors, CorrectionsError> {
    if !(lambda_min > 0.0) || !(lambda_max > lambda_min) {
        return Err(CorrectionsError::Domain {
            what: "grain sizes",
            detail: format!("lambda_min = {lambda_min:e}, lambda_max = {lambda_max:e}"),
        });
    }
    let tau = 2.0 * std::f64::consts::PI;
    Ok(GrainWavevectors {
        k_min: tau / lambda_max,
        k_max: tau / lambda_min,
    })
}

/// Finite plate-size factor β(z) ∈ (0, 1]: the force on a plate of radius
/// L is β(z) F_c(z).
///
/// The deficits 1 − β are stored directly; they are far below the f64
/// resolution around 1 for realistic geometries, so β itself would round
/// to exactly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteSizeFactor {
    /// 1 − β from the edge-gap form β = 1 − z³/(z + L²/(2R))³.
    pub deficit_exact: f64,
    /// 1 − β from the large-plate asymptotic 8 z³R³/L⁶.
    pub deficit_asymptotic: f64,
}

impl FiniteSizeFactor {
    /// β itself (saturates at 1.0 in f64 for tiny deficits).
    pub fn factor(&self) -> f64 {
        1.0 - self.deficit_exact
    }
}

/// Finite-size factor for plate radius L, sphere radius R, separation z
/// (all m, L > R > z > 0).
pub fn finite_size_factor(z: f64, radius: f64, plate: f64) -> Result<FiniteSizeFactor, CorrectionsError> {
    if !(z > 0.0) || !(radius > z) || !(plate > radius) {
        return Err(CorrectionsError::Domain {
            what: "finite-size geometry",
            detail: format!("need L > R > z > 0, got z = {z:e}, R = {radius:e}, L = {plate:e}"),
        });
    }
    let edge_gap = plate * plate / (2.0 * radius);
    let ratio = z / (z + edge_gap);
    Ok(FiniteSizeFactor {
        deficit_exact: ratio * ratio * ratio,
        deficit_asymptotic: 8.0 * (z * radius / (plate * plate)).powi(3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{gold, DEFAULT_SPHERE_RADIUS};
    use approx::assert_relative_eq;

    fn geometry(z_nm: f64) -> SpherePlateGeometry {
        SpherePlateGeometry::new(z_nm * 1e-9, DEFAULT_SPHERE_RADIUS).unwrap()
    }

    #[test]
    fn zeta3_from_series_oracle() {
        // the added integral of the second alternative is -zeta(3)
        let series: f64 = (1..200_000).map(|n| 1.0 / (n as f64).powi(3)).sum();
        assert!((ZETA_3 - series).abs() < 1e-8);
        let numeric = quad::adaptive(
            &|y: f64| y * (-(-y).exp()).ln_1p(),
            1e-12,
            60.0,
            1e-12,
            0.0,
            4000,
        )
        .unwrap();
        assert!((numeric.value + ZETA_3).abs() < 1e-8, "integral = {}", numeric.value);
    }

    #[test]
    fn perp_zero_mode_reaches_ideal_limit() {
        // omega_p -> infinity makes r_perp(0, y) -> 1, the integral -> -zeta(3)
        let q = perp_zero_mode_integral(1e9).unwrap();
        assert!((q.value + ZETA_3).abs() < 1e-5, "J = {}", q.value);
    }

    #[test]
    fn alternative_offset_is_exact() {
        let g = geometry(100.0);
        let t = 300.0;
        let first = alt_thermal_1(&g, t, gold::OMEGA_P).unwrap();
        let second = alt_thermal_2(&g, t, gold::OMEGA_P).unwrap();
        let expected = -ZETA_3 * K_B * t * g.radius() / (8.0 * g.z() * g.z());
        assert_relative_eq!(
            second.delta_abs - first.delta_abs,
            expected,
            max_relative = 1e-10
        );
    }

    #[test]
    fn traditional_correction_is_small_in_range() {
        let d100 = thermal_correction_traditional(&geometry(100.0), 300.0, gold::OMEGA_P).unwrap();
        assert!(
            d100.delta_rel.abs() > 0.35e-4 && d100.delta_rel.abs() < 1.05e-4,
            "delta_tr(100 nm) = {:e}",
            d100.delta_rel
        );
        let d300 = thermal_correction_traditional(&geometry(300.0), 300.0, gold::OMEGA_P).unwrap();
        assert!(
            d300.delta_rel.abs() > 0.5e-3 && d300.delta_rel.abs() < 1.5e-3,
            "delta_tr(300 nm) = {:e}",
            d300.delta_rel
        );
    }

    #[test]
    fn thermal_corrections_vanish_at_low_temperature() {
        let d = thermal_correction_traditional(&geometry(100.0), 1.0, gold::OMEGA_P).unwrap();
        assert!(d.delta_rel.abs() < 1e-5, "delta(1 K) = {:e}", d.delta_rel);
    }

    #[test]
    fn alternative_corrections_at_the_ends_of_the_range() {
        let d62 = alt_thermal_1(&geometry(62.0), 300.0, gold::OMEGA_P).unwrap();
        // the first alternative weakens the attraction: Delta > 0
        assert!(d62.delta_abs > 0.0);
        assert!(
            (0.77e-2..1.43e-2).contains(&d62.delta_rel.abs()),
            "|delta1|(62) = {:e}",
            d62.delta_rel
        );
        let d350 = alt_thermal_1(&geometry(350.0), 300.0, gold::OMEGA_P).unwrap();
        assert!(
            (5.6e-2..10.4e-2).contains(&d350.delta_rel.abs()),
            "|delta1|(350) = {:e}",
            d350.delta_rel
        );
        for z in [62.0, 150.0, 350.0] {
            let d2 = alt_thermal_2(&geometry(z), 300.0, gold::OMEGA_P).unwrap();
            assert!(
                (1.8e-2..2.6e-2).contains(&d2.delta_rel.abs()),
                "|delta2|({z}) = {:e}",
                d2.delta_rel
            );
        }
    }

    #[test]
    fn patch_sigma_gold_work_functions() {
        let s = patch_sigma(&[5.47, 5.37, 5.31]).unwrap();
        assert!((s - 0.0808).abs() < 2e-4, "sigma_v = {s}");
        assert_eq!(patch_sigma(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        // two-point case: (V, V + 2d) -> sqrt(2 d^2)/sqrt(2) = d... direct formula
        let d = 0.07;
        let got = patch_sigma(&[5.0, 5.0 + 2.0 * d]).unwrap();
        let mean: f64 = 5.0 + d;
        let expected = ((5.0f64 - mean).powi(2) + (5.0 + 2.0 * d - mean).powi(2)).sqrt()
            / std::f64::consts::SQRT_2;
        assert_relative_eq!(got, expected, max_relative = 1e-14);
        assert!(patch_sigma(&[5.0]).is_err());
    }

    #[test]
    fn grain_wavevector_values() {
        let w = grain_wavevectors(68e-9, 121e-9).unwrap();
        assert!((w.k_max - 0.092e9).abs() < 0.001e9, "k_max = {:e}", w.k_max);
        assert!((w.k_min - 0.052e9).abs() < 0.001e9, "k_min = {:e}", w.k_min);
        let h = grain_wavevectors(50e-9, 100e-9).unwrap();
        assert_relative_eq!(h.k_max, 2.0 * h.k_min, max_relative = 1e-14);
        assert!(grain_wavevectors(100e-9, 50e-9).is_err());
    }

    #[test]
    fn patch_force_published_values() {
        let p = PatchParams::gold_defaults();
        let f62 = patch_force(62e-9, DEFAULT_SPHERE_RADIUS, &p).unwrap();
        let per_r = f62 / DEFAULT_SPHERE_RADIUS;
        assert!(
            (per_r + 1.15e-8).abs() < 0.03 * 1.15e-8,
            "F_p/R(62) = {per_r:e}"
        );
        let f100 = patch_force(100e-9, DEFAULT_SPHERE_RADIUS, &p).unwrap();
        let per_r100 = f100 / DEFAULT_SPHERE_RADIUS;
        assert!(
            (per_r100 + 1.25e-10).abs() < 0.03 * 1.25e-10,
            "F_p/R(100) = {per_r100:e}"
        );
        // rapid decay
        assert!((f100 / f62).abs() < 0.02);
    }

    #[test]
    fn patch_force_trivial_cases() {
        let p = PatchParams::new(0.0, 1e7, 1e8).unwrap();
        assert_eq!(patch_force(62e-9, DEFAULT_SPHERE_RADIUS, &p).unwrap(), 0.0);
        assert!(PatchParams::new(0.08, 1e8, 1e7).is_err());
    }

    #[test]
    fn finite_size_factor_reference_geometry() {
        let f = finite_size_factor(350e-9, DEFAULT_SPHERE_RADIUS, 5e-3).unwrap();
        assert!(
            (1.5e-17..3.5e-17).contains(&f.deficit_exact),
            "1 - beta = {:e}",
            f.deficit_exact
        );
        assert_relative_eq!(f.deficit_exact, f.deficit_asymptotic, max_relative = 0.01);
        assert_eq!(f.factor(), 1.0); // below f64 resolution around 1
    }

    #[test]
    fn finite_size_factor_limits() {
        // L -> infinity drives the factor to 1 (deficit to 0)
        let f = finite_size_factor(350e-9, DEFAULT_SPHERE_RADIUS, 1.0).unwrap();
        assert!(f.deficit_exact < 1e-25);
        // deficit shrinks as L grows; factor stays in (0, 1]
        let mut prev = f64::INFINITY;
        for l_mm in [1.0, 2.0, 5.0, 10.0] {
            let f = finite_size_factor(350e-9, DEFAULT_SPHERE_RADIUS, l_mm * 1e-3).unwrap();
            assert!(f.deficit_exact > 0.0 && f.deficit_exact < 1.0);
            assert!(f.deficit_exact < prev);
            prev = f.deficit_exact;
        }
        assert!(finite_size_factor(350e-9, DEFAULT_SPHERE_RADIUS, 50e-6).is_err());
    }

    #[test]
    fn finite_size_branches_agree_for_large_plates() {
        for l_over_r in [10.0, 30.0, 100.0] {
            let l = DEFAULT_SPHERE_RADIUS * l_over_r;
            for z_nm in [62.0, 200.0, 350.0] {
                let f = finite_size_factor(z_nm * 1e-9, DEFAULT_SPHERE_RADIUS, l).unwrap();
                let (de, da) = (f.deficit_exact, f.deficit_asymptotic);
                assert!(
                    ((de - da) / da).abs() < 0.01,
                    "L/R = {l_over_r}, z = {z_nm} nm: {de:e} vs {da:e}"
                );
            }
        }
    }

    #[test]
    fn alt1_ideal_limit_consistency() {
        // With omega_p huge, Delta1 ~ Delta_tr + zeta(3) k_B T R/(8 z^2).
        let g = geometry(100.0);
        let t = 300.0;
        let omega_p = 1e20;
        let d1 = alt_thermal_1(&g, t, omega_p).unwrap();
        let dtr = thermal_correction_traditional(&g, t, omega_p).unwrap();
        let expected = dtr.delta_abs + ZETA_3 * K_B * t * g.radius() / (8.0 * g.z() * g.z());
        assert_relative_eq!(d1.delta_abs, expected, max_relative = 1e-3);
    }
}
