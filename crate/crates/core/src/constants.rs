//! Physical constants (SI) and gold default parameters.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.0545718e-34;
/// Speed of light in vacuum, m/s.
pub const C: f64 = 2.99792458e8;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380649e-23;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.8541878128e-12;

/// Conversion factor from photon energy in eV to angular frequency in rad/s.
pub const EV_TO_RAD_S: f64 = 1.52e15;

/// Riemann zeta(3), the Apéry constant.
pub const ZETA_3: f64 = 1.2020569031595943;

/// Gold defaults.
pub mod gold {
    /// Plasma frequency of Au, rad/s.
    pub const OMEGA_P: f64 = 1.37e16;
    /// Drude relaxation parameter of Au (volume relaxation), rad/s.
    pub const GAMMA: f64 = 5.32e13;
    /// Constant term of the infrared-optics relaxation parameter (dimensionless).
    pub const C1: f64 = 0.0039;
    /// Quadratic (electron-electron) term of the infrared-optics relaxation
    /// parameter (dimensionless).
    pub const C2: f64 = 1.5;
}

/// Default sphere radius of the gold-coated sphere, m.
pub const DEFAULT_SPHERE_RADIUS: f64 = 95.65e-6;
