//! Sphere-plate Casimir force from the Lifshitz formula combined with the
//! proximity force theorem.
//!
//! The force is evaluated as
//!
//! F(z) = (ħR / 8πz²) ∫₀^∞ dξ ∫_{2zξ/c}^∞ y dy Σ_pol ln[1 − r²_pol e^{−y}]
//!
//! after the substitution y = 2zq, with reflection coefficients taken at
//! imaginary frequency iξ. At finite temperature the ξ integral becomes a
//! Matsubara sum with the l = 0 term weighted one half.

use std::cell::RefCell;

use rayon::prelude::*;
use thiserror::Error;

use crate::constants::{C, HBAR, K_B, ZETA_3};
use crate::optics::{OpticsError, PermittivityModel, ZeroFreqBehavior};
use crate::quad::{self, QuadError, Quadrature};

#[derive(Debug, Error)]
pub enum LifshitzError {
    #[error("invalid sphere-plate geometry: z = {z:e} m, R = {radius:e} m (need 0 < z and z/R < 0.1)")]
    Geometry { z: f64, radius: f64 },
    #[error("temperature must be positive, got {0} K")]
    Temperature(f64),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error("force quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("Matsubara sum did not converge after {terms} terms (accumulated {sum:e} N)")]
    MatsubaraDivergent { terms: usize, sum: f64 },
    #[error("force curve requires strictly increasing separations")]
    CurveOrder,
}

/// Sphere of radius `radius` at closest separation `z` above a plate (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePlateGeometry {
    z: f64,
    radius: f64,
}

impl SpherePlateGeometry {
    /// The proximity force theorem needs z ≪ R; z/R < 0.1 is enforced.
    pub fn new(z: f64, radius: f64) -> Result<Self, LifshitzError> {
        if !(z > 0.0) || !(radius > 0.0) || z / radius >= 0.1 {
            return Err(LifshitzError::Geometry { z, radius });
        }
        Ok(SpherePlateGeometry { z, radius })
    }

    pub fn with_default_radius(z: f64) -> Result<Self, LifshitzError> {
        Self::new(z, crate::constants::DEFAULT_SPHERE_RADIUS)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn at_separation(&self, z: f64) -> Result<Self, LifshitzError> {
        Self::new(z, self.radius)
    }
}

/// A force value (N) with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Force {
    pub value: f64,
    pub quad_error: f64,
}

/// One evaluated point of a force-distance curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcePoint {
    /// Separation, m.
    pub z: f64,
    /// Force, N (negative: attractive).
    pub force: f64,
    pub quad_error: f64,
}

/// Squared TM (parallel) reflection coefficient at imaginary frequency:
/// [(εq − k)/(εq + k)]² with q² = k⊥² + ξ²/c², k² = k⊥² + εξ²/c².
pub fn reflection_sq_parallel(eps: f64, xi: f64, k_perp: f64) -> f64 {
    let q = (k_perp * k_perp + xi * xi / (C * C)).sqrt();
    let k = (k_perp * k_perp + eps * xi * xi / (C * C)).sqrt();
    let r = (eps * q - k) / (eps * q + k);
    r * r
}

/// Squared TE (perpendicular) reflection coefficient: [(q − k)/(q + k)]².
pub fn reflection_sq_perp(eps: f64, xi: f64, k_perp: f64) -> f64 {
    let q = (k_perp * k_perp + xi * xi / (C * C)).sqrt();
    let k = (k_perp * k_perp + eps * xi * xi / (C * C)).sqrt();
    let r = (q - k) / (q + k);
    r * r
}

/// Ideal-metal sphere-plate force F₀(z) = −π³ħcR/(360 z³), N.
pub fn ideal_force(g: &SpherePlateGeometry) -> f64 {
    let pi3 = std::f64::consts::PI.powi(3);
    -pi3 * HBAR * C * g.radius / (360.0 * g.z * g.z * g.z)
}

/// Characteristic angular frequency ω_c = c/(2z) of separation z, rad/s.
pub fn characteristic_frequency(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    C / (2.0 * z)
}

/// Upper bound of the relative error introduced by the proximity force
/// theorem: z/R.
pub fn pft_error_bound(z: f64, radius: f64) -> f64 {
    debug_assert!(z >= 0.0 && radius > 0.0);
    z / radius
}

// In the substituted variables the polarization sum at one (ξ, y) is
// y·[ln(1 − r∥² e^{−y}) + ln(1 − r⊥² e^{−y})], with
// κ ≡ 2zk = sqrt(y² + (ε−1)a²) and a = 2zξ/c.
fn pol_sum(eps: f64, a: f64, y: f64) -> f64 {
    let kappa = (y * y + (eps - 1.0) * a * a).sqrt();
    let rp = (eps * y - kappa) / (eps * y + kappa);
    let rt = (y - kappa) / (y + kappa);
    let e = (-y).exp();
    y * ((-rp * rp * e).ln_1p() + (-rt * rt * e).ln_1p())
}

fn pol_sum_ideal(y: f64) -> f64 {
    let e = (-y).exp();
    2.0 * y * (-e).ln_1p()
}

// Inner y-integral from y0 = a to infinity, truncated where e^{-y} is
// negligible relative to the head of the integrand.
const INNER_SPAN: f64 = 45.0;
const INNER_REL_TOL: f64 = 1e-6;
// Beyond this lower limit the whole integral underflows toward subnormals;
// its contribution is zero at any relevant precision.
const INNER_DEAD: f64 = 600.0;

fn inner_edges(a: f64) -> [f64; 7] {
    [
        a,
        a + 0.5,
        a + 1.5,
        a + 3.5,
        a + 7.5,
        a + 17.5,
        a + INNER_SPAN,
    ]
}

const ZERO_QUAD: Quadrature = Quadrature {
    value: 0.0,
    abs_error: 0.0,
};

fn inner_integral(eps: f64, a: f64) -> Result<Quadrature, QuadError> {
    if a > INNER_DEAD {
        return Ok(ZERO_QUAD);
    }
    quad::adaptive_segmented(
        &|y| pol_sum(eps, a, y),
        &inner_edges(a),
        INNER_REL_TOL,
        0.0,
        400,
    )
}

fn inner_integral_ideal(a: f64) -> Result<Quadrature, QuadError> {
    if a > INNER_DEAD {
        return Ok(ZERO_QUAD);
    }
    quad::adaptive_segmented(&pol_sum_ideal, &inner_edges(a), INNER_REL_TOL, 0.0, 400)
}

/// ∫₀^∞ y ln[1 − r⊥²(0, y) e^{−y}] dy for the plasma-model zero-frequency
/// perpendicular mode, with r⊥²(0, y) = [(√(y²+α²) − y)/(√(y²+α²) + y)]²
/// and α = 2zωp/c.
pub fn perp_zero_mode_integral(alpha: f64) -> Result<Quadrature, QuadError> {
    quad::adaptive_segmented(
        &|y: f64| {
            let s = (y * y + alpha * alpha).sqrt();
            let r = (s - y) / (s + y);
            y * (-r * r * (-y).exp()).ln_1p()
        },
        &inner_edges(0.0),
        INNER_REL_TOL,
        0.0,
        400,
    )
}

enum Mirror<'a> {
    Ideal,
    Material(&'a PermittivityModel),
}

impl Mirror<'_> {
    fn inner(&self, xi: f64, a: f64) -> Result<Quadrature, LifshitzError> {
        match self {
            Mirror::Ideal => Ok(inner_integral_ideal(a)?),
            Mirror::Material(m) => {
                let eps = m.eps_for_force(xi)?;
                Ok(inner_integral(eps, a)?)
            }
        }
    }

    // Zero-frequency Matsubara term: the parallel mode reflects like an
    // ideal metal (−ζ(3) in closed form); the perpendicular mode depends on
    // the model's ξ → 0 behavior.
    fn inner_zero_freq(&self, z: f64) -> Result<Quadrature, LifshitzError> {
        match self {
            Mirror::Ideal => Ok(Quadrature {
                value: -2.0 * ZETA_3,
                abs_error: 0.0,
            }),
            Mirror::Material(m) => match m.zero_freq_behavior() {
                ZeroFreqBehavior::DrudeLike => Ok(Quadrature {
                    value: -ZETA_3,
                    abs_error: 0.0,
                }),
                ZeroFreqBehavior::PlasmaLike { omega_p } => {
                    let alpha = 2.0 * z * omega_p / C;
                    let perp = perp_zero_mode_integral(alpha)?;
                    Ok(Quadrature {
                        value: -ZETA_3 + perp.value,
                        abs_error: perp.abs_error,
                    })
                }
            },
        }
    }
}

const OUTER_XI_LOW_FACTOR: f64 = 1e-4;
const OUTER_XI_HIGH_FACTOR: f64 = 1e4;
const OUTER_REL_TOL: f64 = 1e-5;

fn force_t0(g: &SpherePlateGeometry, mirror: &Mirror) -> Result<Force, LifshitzError> {
    let z = g.z;
    let omega_c = characteristic_frequency(z);
    let xi_min = OUTER_XI_LOW_FACTOR * omega_c;
    let xi_max = OUTER_XI_HIGH_FACTOR * omega_c;

    // Errors raised inside the integrand closure are parked here and
    // surfaced after the quadrature reports the poisoned evaluation.
    let pending: RefCell<Option<LifshitzError>> = RefCell::new(None);
    let integrand = |xi: f64| -> f64 {
        match mirror.inner(xi, xi / omega_c) {
            Ok(q) => q.value,
            Err(e) => {
                pending.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let take_pending = |e: QuadError| -> LifshitzError {
        pending.borrow_mut().take().unwrap_or(LifshitzError::Quadrature(e))
    };

    // Head panel [0, ξ_min]: the integrand tends to a finite limit as ξ → 0
    // (Gauss-Kronrod nodes never touch ξ = 0 itself).
    let head = quad::adaptive(&integrand, 0.0, xi_min, 1e-6, 0.0, 60).map_err(take_pending)?;
    let outer = quad::adaptive_log(&integrand, xi_min, xi_max, 32, OUTER_REL_TOL, 0.0, 4000)
        .map_err(take_pending)?;

    let prefactor = HBAR * g.radius / (8.0 * std::f64::consts::PI * z * z);
    let value = prefactor * (head.value + outer.value);
    let quad_error =
        prefactor * (head.abs_error + outer.abs_error) + 2.0 * INNER_REL_TOL * value.abs();
    Ok(Force { value, quad_error })
}

fn force_thermal(g: &SpherePlateGeometry, mirror: &Mirror, t: f64) -> Result<Force, LifshitzError> {
    if !(t > 0.0) {
        return Err(LifshitzError::Temperature(t));
    }
    let z = g.z;
    let xi1 = 2.0 * std::f64::consts::PI * K_B * t / HBAR;
    let omega_c = characteristic_frequency(z);

    let zero = mirror.inner_zero_freq(z)?;
    let mut sum = 0.5 * zero.value;
    let mut err = 0.5 * zero.abs_error;
    let mut comp = 0.0f64; // Kahan compensation

    const TAIL_FRACTION: f64 = 1e-6;
    const MAX_TERMS: usize = 2_000_000;

    let mut prev_term: Option<f64> = None;
    let mut l = 1usize;
    loop {
        let xi = xi1 * l as f64;
        let term = mirror.inner(xi, xi / omega_c)?;
        let y = term.value - comp;
        let t_new = sum + y;
        comp = (t_new - sum) - y;
        sum = t_new;
        err += term.abs_error;

        let t_abs = term.value.abs();
        if let Some(p) = prev_term {
            if t_abs < p {
                let ratio = t_abs / p;
                let tail_bound = t_abs * ratio / (1.0 - ratio);
                if tail_bound < TAIL_FRACTION * sum.abs() {
                    break;
                }
            }
        }
        if t_abs == 0.0 {
            break;
        }
        prev_term = Some(t_abs);
        l += 1;
        if l > MAX_TERMS {
            return Err(LifshitzError::MatsubaraDivergent {
                terms: l - 1,
                sum,
            });
        }
    }

    let prefactor = K_B * t * g.radius / (4.0 * z * z);
    let value = prefactor * sum;
    let quad_error = prefactor * err
        + 2.0 * INNER_REL_TOL * value.abs()
        + TAIL_FRACTION * value.abs();
    Ok(Force { value, quad_error })
}

/// Zero-temperature Casimir force, N (negative).
pub fn casimir_force_t0(
    g: &SpherePlateGeometry,
    model: &PermittivityModel,
) -> Result<Force, LifshitzError> {
    force_t0(g, &Mirror::Material(model))
}

/// Zero-temperature force with unit reflectivities, evaluated through the
/// same quadrature as the material path; used to validate the integrator
/// against the closed-form ideal force.
pub fn ideal_force_quadrature(g: &SpherePlateGeometry) -> Result<Force, LifshitzError> {
    force_t0(g, &Mirror::Ideal)
}

/// Finite-temperature Casimir force via Matsubara summation, N.
pub fn casimir_force_thermal(
    g: &SpherePlateGeometry,
    model: &PermittivityModel,
    temperature: f64,
) -> Result<Force, LifshitzError> {
    force_thermal(g, &Mirror::Material(model), temperature)
}

/// Finite-temperature ideal-metal force via Matsubara summation, N.
pub fn ideal_force_thermal(
    g: &SpherePlateGeometry,
    temperature: f64,
) -> Result<Force, LifshitzError> {
    force_thermal(g, &Mirror::Ideal, temperature)
}

/// Finite-conductivity correction factor η_c = F_c / F₀ ∈ (0, 1).
pub fn eta_c(g: &SpherePlateGeometry, model: &PermittivityModel) -> Result<Force, LifshitzError> {
    let f = casimir_force_t0(g, model)?;
    let f0 = ideal_force(g);
    Ok(Force {
        value: f.value / f0,
        quad_error: (f.quad_error / f0).abs(),
    })
}

/// Force-distance curve over a strictly increasing separation grid, shared
/// geometry (sphere radius) and model. Points are evaluated in parallel;
/// the output ordering is fixed by the input grid.
#[derive(Debug, Clone)]
pub struct ForceCurve {
    radius: f64,
    model_label: String,
    /// 0 means the zero-temperature Lifshitz integral.
    temperature: f64,
    points: Vec<ForcePoint>,
}

impl ForceCurve {
    pub fn build(
        radius: f64,
        model: &PermittivityModel,
        temperature: f64,
        z_grid: &[f64],
    ) -> Result<Self, LifshitzError> {
        if z_grid.windows(2).any(|w| w[1] <= w[0]) || z_grid.is_empty() {
            return Err(LifshitzError::CurveOrder);
        }
        // Warm the tabulated eps cache once, outside the parallel region.
        if let PermittivityModel::Tabulated(_) = model {
            model.eps_at(1e15)?;
        }
        let points: Result<Vec<ForcePoint>, LifshitzError> = z_grid
            .par_iter()
            .map(|&z| {
                let g = SpherePlateGeometry::new(z, radius)?;
                let f = if temperature > 0.0 {
                    casimir_force_thermal(&g, model, temperature)?
                } else {
                    casimir_force_t0(&g, model)?
                };
                Ok(ForcePoint {
                    z,
                    force: f.value,
                    quad_error: f.quad_error,
                })
            })
            .collect();
        Ok(ForceCurve {
            radius,
            model_label: model.label().to_string(),
            temperature,
            points: points?,
        })
    }

    pub fn points(&self) -> &[ForcePoint] {
        &self.points
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn model_label(&self) -> &str {
        &self.model_label
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn max_relative_quad_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.quad_error / p.force).abs())
            .fold(0.0, f64::max)
    }

    /// Cubic-Hermite interpolation of ln|F| against ln z. Separations
    /// outside the grid extrapolate with the boundary slope.
    pub fn interpolate(&self, z: f64) -> f64 {
        debug_assert!(z > 0.0);
        let pts = &self.points;
        let n = pts.len();
        if n == 1 {
            return pts[0].force;
        }
        let lx: Vec<f64> = pts.iter().map(|p| p.z.ln()).collect();
        let ly: Vec<f64> = pts.iter().map(|p| p.force.abs().ln()).collect();
        let x = z.ln();
        let i = match lx.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return pts[i].force,
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let h = lx[i + 1] - lx[i];
        let t = ((x - lx[i]) / h).clamp(-1.0, 2.0);
        let m0 = if i == 0 {
            (ly[1] - ly[0]) / h
        } else {
            0.5 * ((ly[i + 1] - ly[i]) / h + (ly[i] - ly[i - 1]) / (lx[i] - lx[i - 1]))
        };
        let m1 = if i + 2 >= n {
            (ly[n - 1] - ly[n - 2]) / h
        } else {
            0.5 * ((ly[i + 2] - ly[i + 1]) / (lx[i + 2] - lx[i + 1]) + (ly[i + 1] - ly[i]) / h)
        };
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * ly[i]
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * ly[i + 1]
            + (t3 - t2) * h * m1;
        -v.exp()
    }
}
