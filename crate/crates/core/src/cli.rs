//! Batch-command front end: config parsing, orchestration of the
//! computation modules, and table/report output.
//!
//! The config is flat `key = value` text with `[section]` headers, comma
//! lists, and `#` comments. Files referenced by the config are resolved
//! relative to the config file and must exist at load time. Exit codes:
//! 0 success, 1 numerical failure, 2 input/format failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::constants::{gold, DEFAULT_SPHERE_RADIUS};
use crate::corrections::{self, CorrectionsError, PatchParams};
use crate::lifshitz::{self, ForcePoint, LifshitzError, SpherePlateGeometry};
use crate::optics::{self, DrudeParams, InfraredParams, OpticsError, PermittivityModel};
use crate::quad::QuadError;
use crate::roughness::{self, DiffractionLookup, RoughnessError, RoughnessHistogram};
use crate::stats::{self, StatsError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    /// Process exit status: 1 numerical, 2 input/format.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }

    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<OpticsError> for CliError {
    fn from(e: OpticsError) -> Self {
        match e {
            OpticsError::Quadrature(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<LifshitzError> for CliError {
    fn from(e: LifshitzError) -> Self {
        match e {
            LifshitzError::Quadrature(_) | LifshitzError::MatsubaraDivergent { .. } => {
                CliError::Numerical(e.to_string())
            }
            LifshitzError::Optics(inner) => inner.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<RoughnessError> for CliError {
    fn from(e: RoughnessError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CorrectionsError> for CliError {
    fn from(e: CorrectionsError) -> Self {
        match e {
            CorrectionsError::Quadrature(_) => CliError::Numerical(e.to_string()),
            CorrectionsError::Lifshitz(inner) => inner.into(),
            CorrectionsError::Domain { .. } => CliError::Input(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::InverseT { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

// ---- config ----------------------------------------------------------------

#[derive(Debug, Clone, Default)]
struct RawConfig {
    values: BTreeMap<String, String>,
    dir: PathBuf,
}

impl RawConfig {
    fn parse(text: &str, dir: PathBuf) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_lowercase();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("config line {}: expected 'key = value'", lineno + 1))
            })?;
            values.insert(
                format!("{section}.{}", key.trim().to_lowercase()),
                value.trim().to_string(),
            );
        }
        Ok(RawConfig { values, dir })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Input(format!("config key '{key}': not a number: '{v}'")))
            })
            .transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.get_f64(key)?.unwrap_or(default))
    }

    fn get_list_f64(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) if v.trim().is_empty() => Ok(Some(Vec::new())),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        CliError::Input(format!("config key '{key}': not a number: '{s}'"))
                    })
                })
                .collect::<Result<Vec<f64>, CliError>>()
                .map(Some),
        }
    }

    fn get_list_usize(&self, key: &str) -> Result<Vec<usize>, CliError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) if v.trim().is_empty() => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim().parse::<usize>().map_err(|_| {
                        CliError::Input(format!("config key '{key}': not an integer: '{s}'"))
                    })
                })
                .collect(),
        }
    }

    /// Resolve a configured path against the config directory and require
    /// that it exists.
    fn get_path(&self, key: &str) -> Result<Option<PathBuf>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => {
                let p = self.dir.join(v);
                if !p.exists() {
                    return Err(CliError::Input(format!(
                        "config key '{key}': file not found: {}",
                        p.display()
                    )));
                }
                Ok(Some(p))
            }
        }
    }
}

/// Model selection from the `[model]` section or the `--model` flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Drude,
    Plasma,
    Infrared,
    Tabulated,
}

impl std::str::FromStr for ModelKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_lowercase().as_str() {
            "drude" => Ok(ModelKind::Drude),
            "plasma" => Ok(ModelKind::Plasma),
            "infrared" => Ok(ModelKind::Infrared),
            "tabulated" => Ok(ModelKind::Tabulated),
            other => Err(CliError::Input(format!(
                "unknown model '{other}' (expected drude|plasma|infrared|tabulated)"
            ))),
        }
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub z_list_nm: Option<Vec<f64>>,
    pub beta: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub model: Option<ModelKind>,
    pub temperature: Option<f64>,
}

/// Fully resolved run configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub radius: f64,
    pub plate_radius: f64,
    pub z0_nominal: f64,
    pub z0_halfwidth: f64,
    pub z0_step: f64,
    pub temperature: f64,
    pub beta: f64,
    pub model: PermittivityModel,
    pub z_list: Vec<f64>,
    pub histogram: Option<RoughnessHistogram>,
    pub sphere_histogram: Option<RoughnessHistogram>,
    pub profile: Option<roughness::HeightProfile>,
    pub correlation_length: f64,
    pub diffraction: DiffractionLookup,
    pub scan_file: Option<PathBuf>,
    pub excluded_scans: Vec<usize>,
    pub systematic: Vec<f64>,
    pub delta_r: f64,
    pub delta_z: f64,
    pub grain_bound: f64,
    pub patch: PatchParams,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn load(config_path: &Path, overrides: &Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(config_path).map_err(|e| {
            CliError::Input(format!("cannot read config {}: {e}", config_path.display()))
        })?;
        let dir = config_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        let raw = RawConfig::parse(&text, dir)?;

        let radius = raw.f64_or("geometry.sphere_radius_um", DEFAULT_SPHERE_RADIUS * 1e6)? * 1e-6;
        let plate_radius = raw.f64_or("geometry.plate_radius_mm", 5.0)? * 1e-3;
        let z0_nominal = raw.f64_or("geometry.z0_nominal_nm", 62.0)? * 1e-9;
        let z0_halfwidth = raw.f64_or("geometry.z0_halfwidth_nm", 1.0)? * 1e-9;
        let z0_step = raw.f64_or("geometry.z0_step_nm", 0.01)? * 1e-9;

        let temperature = overrides
            .temperature
            .map(Ok)
            .unwrap_or_else(|| raw.f64_or("thermal.temperature_k", 0.0))?;
        let beta = overrides
            .beta
            .map(Ok)
            .unwrap_or_else(|| raw.f64_or("scans.beta", 0.95))?;

        let omega_p = raw.f64_or("model.omega_p_rad_s", gold::OMEGA_P)?;
        let gamma = raw.f64_or("model.gamma_rad_s", gold::GAMMA)?;
        let c1 = raw.f64_or("model.c1", gold::C1)?;
        let c2 = raw.f64_or("model.c2", gold::C2)?;
        let kind = match overrides.model {
            Some(k) => k,
            None => raw
                .get("model.kind")
                .unwrap_or("tabulated")
                .parse::<ModelKind>()?,
        };
        let model = match kind {
            ModelKind::Drude => PermittivityModel::Drude(DrudeParams { omega_p, gamma }),
            ModelKind::Plasma => PermittivityModel::Plasma { omega_p },
            ModelKind::Infrared => {
                PermittivityModel::Infrared(InfraredParams { omega_p, c1, c2 })
            }
            ModelKind::Tabulated => {
                let path = raw.get_path("model.optical_table")?.ok_or_else(|| {
                    CliError::Input(
                        "config key 'model.optical_table' is required for the tabulated model"
                            .into(),
                    )
                })?;
                let table = optics::load_optical_table(&path, DrudeParams { omega_p, gamma })?;
                PermittivityModel::tabulated(table)
            }
        };

        let z_list = match &overrides.z_list_nm {
            Some(list) => list.iter().map(|z| z * 1e-9).collect(),
            None => raw
                .get_list_f64("run.z_nm")?
                .unwrap_or_else(|| vec![62.0, 70.0, 80.0, 90.0])
                .iter()
                .map(|z| z * 1e-9)
                .collect(),
        };

        let histogram = raw
            .get_path("roughness.histogram")?
            .map(roughness::load_histogram)
            .transpose()?;
        let sphere_histogram = raw
            .get_path("roughness.sphere_histogram")?
            .map(roughness::load_histogram)
            .transpose()?;
        let profile = raw
            .get_path("roughness.profile")?
            .map(roughness::load_profile)
            .transpose()?;
        let correlation_length = raw.f64_or("roughness.correlation_length_nm", 200.0)? * 1e-9;
        let diffraction = match raw.get_path("roughness.diffraction_lookup")? {
            Some(p) => load_diffraction_lookup(&p)?,
            None => DiffractionLookup::builtin(),
        };

        let scan_file = raw.get_path("scans.file")?;
        let excluded_scans = raw.get_list_usize("scans.exclude")?;

        let systematic = raw
            .get_list_f64("errors.systematic_pn")?
            .unwrap_or_default()
            .iter()
            .map(|v| v * 1e-12)
            .collect();
        let delta_r = raw.f64_or("errors.delta_r_um", 0.15)? * 1e-6;
        let delta_z = raw.f64_or("errors.delta_z_nm", 0.15)? * 1e-9;
        let grain_bound = raw.f64_or("errors.grain_bound_percent", 0.5)? / 100.0;

        let patch = {
            let defaults = PatchParams::gold_defaults();
            let sigma_v = match raw.get_list_f64("patch.work_functions_ev")? {
                Some(wf) if !wf.is_empty() => corrections::patch_sigma(&wf)?,
                _ => defaults.sigma_v,
            };
            let lambda_min = raw.f64_or("patch.grain_min_nm", 68.0)? * 1e-9;
            let lambda_max = raw.f64_or("patch.grain_max_nm", 121.0)? * 1e-9;
            let w = corrections::grain_wavevectors(lambda_min, lambda_max)?;
            PatchParams::new(sigma_v, w.k_min, w.k_max)?
        };

        let out_dir = overrides
            .out_dir
            .clone()
            .or_else(|| raw.get("output.dir").map(|v| raw.dir.join(v)))
            .unwrap_or_else(|| PathBuf::from("."));

        Ok(RunConfig {
            radius,
            plate_radius,
            z0_nominal,
            z0_halfwidth,
            z0_step,
            temperature,
            beta,
            model,
            z_list,
            histogram,
            sphere_histogram,
            profile,
            correlation_length,
            diffraction,
            scan_file,
            excluded_scans,
            systematic,
            delta_r,
            delta_z,
            grain_bound,
            patch,
            out_dir,
        })
    }

    fn require_histogram(&self) -> Result<&RoughnessHistogram, CliError> {
        self.histogram.as_ref().ok_or_else(|| {
            CliError::Input("config key 'roughness.histogram' is required for this command".into())
        })
    }

    fn force_at(&self, z: f64) -> Result<lifshitz::Force, CliError> {
        let g = SpherePlateGeometry::new(z, self.radius)?;
        if self.temperature > 0.0 {
            Ok(lifshitz::casimir_force_thermal(&g, &self.model, self.temperature)?)
        } else {
            Ok(lifshitz::casimir_force_t0(&g, &self.model)?)
        }
    }
}

fn load_diffraction_lookup(path: &Path) -> Result<DiffractionLookup, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::input)?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CliError::Input(format!(
                "{}:{}: expected 'z_over_lcorr, c_corr'",
                path.display(),
                lineno + 1
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| {
                CliError::Input(format!("{}:{}: not a number: '{s}'", path.display(), lineno + 1))
            })
        };
        rows.push((parse(fields[0])?, parse(fields[1])?));
    }
    Ok(DiffractionLookup::new(rows)?)
}

// ---- output helpers --------------------------------------------------------

/// Format with 4 significant digits (force columns).
pub fn sig4(v: f64) -> String {
    if v == 0.0 {
        return "0.000".to_string();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (3 - mag).max(0) as usize;
    if !(-5..=5).contains(&mag) {
        format!("{v:.3e}")
    } else {
        format!("{v:.decimals$}")
    }
}

/// Completed command: named files plus a human-readable report that is also
/// echoed to stdout. Files are only materialized after every computation
/// succeeded, so a failed command leaves nothing behind.
pub struct CommandOutput {
    pub files: Vec<(String, String)>,
    pub report: String,
}

impl CommandOutput {
    pub fn write_to(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        for (name, contents) in &self.files {
            let tmp = dir.join(format!("{name}.tmp"));
            let final_path = dir.join(name);
            std::fs::write(&tmp, contents)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", tmp.display())))?;
            std::fs::rename(&tmp, &final_path)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", final_path.display())))?;
        }
        Ok(())
    }
}

// Rough-averaged force: group equal height shifts, evaluate the distinct
// separations in parallel, then accumulate the weighted sum.
fn rough_averaged_force(
    cfg: &RunConfig,
    z: f64,
    plate: &RoughnessHistogram,
    sphere: &RoughnessHistogram,
) -> Result<(f64, f64), CliError> {
    let h0 = roughness::zero_level(plate) + roughness::zero_level(sphere);
    let mut groups: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for (i, &(hi, vi)) in plate.bins().iter().enumerate() {
        for (j, &(hj, vj)) in sphere.bins().iter().enumerate() {
            let sep = z + h0 - hi - hj;
            if sep <= 0.0 {
                return Err(RoughnessError::Contact {
                    i,
                    j,
                    separation: sep,
                }
                .into());
            }
            let e = groups.entry(sep.to_bits()).or_insert((sep, 0.0));
            e.1 += vi * vj;
        }
    }
    let seps: Vec<(f64, f64)> = groups.into_values().collect();
    let forces: Result<Vec<(f64, f64, f64)>, CliError> = seps
        .par_iter()
        .map(|&(sep, w)| cfg.force_at(sep).map(|f| (w, f.value, f.quad_error)))
        .collect();
    let mut sum = 0.0;
    let mut err = 0.0;
    for (w, f, e) in forces? {
        sum += w * f;
        err += w * e;
    }
    Ok((sum, err))
}

// ---- commands ---------------------------------------------------------------

/// Force table: (z, F_ideal, F_model, eta_c, eta_r, eta_cr, F_final, error).
pub fn cmd_force(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let hist = cfg.require_histogram()?;
    let sphere_hist = cfg.sphere_histogram.as_ref().unwrap_or(hist);
    let a_st = roughness::stochastic_stats(hist).a_st;

    let mut csv = String::from(
        "z_nm, F_ideal_pN, F_model_pN, eta_c, eta_r, eta_cr, F_final_pN, quad_error_pN\n",
    );
    let mut report = format!(
        "Casimir force table\nmodel: {}  temperature: {} K  R = {} um\n\n",
        cfg.model.label(),
        cfg.temperature,
        cfg.radius * 1e6
    );
    let _ = writeln!(
        report,
        "{:>7} {:>12} {:>12} {:>8} {:>8} {:>8} {:>12} {:>12}",
        "z_nm", "F_ideal_pN", "F_model_pN", "eta_c", "eta_r", "eta_cr", "F_final_pN", "err_pN"
    );

    for &z in &cfg.z_list {
        let g = SpherePlateGeometry::new(z, cfg.radius)?;
        let f_ideal = lifshitz::ideal_force(&g);
        let f_model = cfg.force_at(z)?;
        let eta_c = f_model.value / f_ideal;
        let eta_r = roughness::roughness_factor(z, a_st)?;
        let (f_rough, rough_err) = rough_averaged_force(cfg, z, hist, sphere_hist)?;
        let eta_cr = f_rough / f_ideal;
        let quad_err = f_model.quad_error.max(rough_err);

        let row = format!(
            "{}, {}, {}, {:.4}, {:.4}, {:.4}, {}, {}\n",
            sig4(z * 1e9),
            sig4(f_ideal * 1e12),
            sig4(f_model.value * 1e12),
            eta_c,
            eta_r,
            eta_cr,
            sig4(f_rough * 1e12),
            sig4(quad_err * 1e12),
        );
        csv.push_str(&row);
        let _ = writeln!(
            report,
            "{:>7} {:>12} {:>12} {:>8.4} {:>8.4} {:>8.4} {:>12} {:>12}",
            sig4(z * 1e9),
            sig4(f_ideal * 1e12),
            sig4(f_model.value * 1e12),
            eta_c,
            eta_r,
            eta_cr,
            sig4(f_rough * 1e12),
            sig4(quad_err * 1e12)
        );
    }

    Ok(CommandOutput {
        files: vec![
            ("force_table.csv".into(), csv),
            ("force_report.txt".into(), report.clone()),
        ],
        report,
    })
}

/// Statistical analysis of a scan set against the configured theory.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let scan_path = cfg.scan_file.as_ref().ok_or_else(|| {
        CliError::Input("config key 'scans.file' is required for analyze".into())
    })?;
    let mut scans = stats::load_scan_set(scan_path)?;
    scans.exclude_scans(&cfg.excluded_scans)?;

    let conf = stats::confidence_analysis(&scans, cfg.beta, &cfg.systematic)?;
    let mean = stats::mean_force(&scans)?;
    let z = scans.separations().to_vec();

    // Theory curve: model force on a log grid spanning the data (with the
    // fit window and roughness shifts), rough-averaged, then interpolated.
    let hist = cfg.require_histogram()?;
    let sphere_hist = cfg.sphere_histogram.as_ref().unwrap_or(hist);
    let z_lo = z.first().unwrap() - cfg.z0_halfwidth - 35e-9;
    let z_hi = z.last().unwrap() + cfg.z0_halfwidth + 10e-9;
    let n_nodes = 90;
    let grid: Vec<f64> = (0..n_nodes)
        .map(|i| z_lo * (z_hi / z_lo).powf(i as f64 / (n_nodes - 1) as f64))
        .collect();
    let base_curve =
        lifshitz::ForceCurve::build(cfg.radius, &cfg.model, cfg.temperature, &grid)?;
    let rough_points: Result<Vec<ForcePoint>, CliError> = grid
        [..]
        .par_iter()
        .filter(|&&zi| zi >= z.first().unwrap() - cfg.z0_halfwidth - 1e-12)
        .map(|&zi| {
            let f = roughness::force_rough_averaged(zi, hist, sphere_hist, |s| {
                base_curve.interpolate(s)
            })?;
            Ok(ForcePoint {
                z: zi,
                force: f,
                quad_error: 0.0,
            })
        })
        .collect();
    let rough_points = rough_points?;
    let theory_curve = ForceCurveView::new(rough_points);

    let fit = stats::fit_z0(
        &scans,
        |zi| theory_curve.interpolate(zi),
        cfg.z0_nominal,
        cfg.z0_halfwidth,
        cfg.z0_step,
        &stats::default_regions(),
    )?;

    let mut report = String::from("Scan-set analysis\n");
    let _ = writeln!(report, "scans: {} used ({} excluded)", conf.n_scans, cfg.excluded_scans.len());
    let _ = writeln!(report, "confidence level beta = {}", conf.beta);
    let _ = writeln!(report, "s_Fbar (max over grid)  = {} pN", sig4(conf.s_mean_max * 1e12));
    let _ = writeln!(report, "t_p(f)                  = {:.4}", conf.t_value);
    let _ = writeln!(report, "random error            = {} pN", sig4(conf.random_error * 1e12));
    let _ = writeln!(report, "systematic error        = {} pN", sig4(conf.systematic_error * 1e12));
    let _ = writeln!(report, "total error             = {} pN", sig4(conf.total_error * 1e12));
    let _ = writeln!(report, "\nz0 fit: nominal {} nm, window +/- {} nm, step {} nm",
        sig4(cfg.z0_nominal * 1e9), sig4(cfg.z0_halfwidth * 1e9), sig4(cfg.z0_step * 1e9));
    let _ = writeln!(report, "best offset             = {} nm", sig4(fit.offset_best * 1e9));
    let _ = writeln!(report, "z0 (fitted)             = {} nm", sig4(fit.z0_best * 1e9));
    let _ = writeln!(report, "sigma (best, full grid) = {} pN", sig4(fit.sigma_best * 1e12));
    let _ = writeln!(report, "10% equivalence halfwidth = {} nm", sig4(fit.equivalence_halfwidth * 1e9));
    let _ = writeln!(report, "\nRMS deviation by region:");
    for (label, sigma) in &fit.sigma_by_region {
        let _ = writeln!(report, "  {label:<14} sigma = {} pN", sig4(sigma * 1e12));
    }

    let _ = writeln!(report, "\nrelative measurement error at requested separations:");
    let mut csv = String::from("z_nm, mean_pN, total_error_pN, relative_error_percent\n");
    for &zq in &cfg.z_list {
        // nearest grid point
        let idx = z
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - zq).abs().total_cmp(&(b.1 - zq).abs()))
            .map(|(i, _)| i)
            .unwrap();
        let rel = stats::relative_error(conf.total_error, mean[idx])?;
        let _ = writeln!(
            report,
            "  z = {} nm: mean = {} pN, relative error = {} %",
            sig4(z[idx] * 1e9),
            sig4(mean[idx] * 1e12),
            sig4(rel * 100.0)
        );
        let _ = writeln!(
            csv,
            "{}, {}, {}, {}",
            sig4(z[idx] * 1e9),
            sig4(mean[idx] * 1e12),
            sig4(conf.total_error * 1e12),
            sig4(rel * 100.0)
        );
    }

    Ok(CommandOutput {
        files: vec![
            ("analysis.csv".into(), csv),
            ("analysis_report.txt".into(), report.clone()),
        ],
        report,
    })
}

// Interpolation view over precomputed rough-averaged points.
struct ForceCurveView {
    points: Vec<ForcePoint>,
}

impl ForceCurveView {
    fn new(points: Vec<ForcePoint>) -> Self {
        ForceCurveView { points }
    }

    fn interpolate(&self, z: f64) -> f64 {
        // log-log cubic through |F|, mirroring ForceCurve::interpolate
        let pts = &self.points;
        let n = pts.len();
        let x = z.ln();
        let lx: Vec<f64> = pts.iter().map(|p| p.z.ln()).collect();
        let ly: Vec<f64> = pts.iter().map(|p| p.force.abs().ln()).collect();
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
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * ly[i]
            + (t3 - 2.0 * t2 + t) * h * m0
            + (-2.0 * t3 + 3.0 * t2) * ly[i + 1]
            + (t3 - t2) * h * m1;
        -v.exp()
    }
}

/// Itemized theoretical error budget at each requested separation.
pub fn cmd_budget(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let hist = cfg.require_histogram()?;
    let a_st = roughness::stochastic_stats(hist).a_st;

    let mut report = String::from("Theoretical error budget\n");
    let mut csv = String::from(
        "z_nm, geometry_percent, sample_percent, pft_percent, diffraction_percent, patch_percent, finite_size_percent, total_percent\n",
    );
    for &z in &cfg.z_list {
        let pft = lifshitz::pft_error_bound(z, cfg.radius);

        let diffraction = {
            let x = z / cfg.correlation_length;
            let (lo, hi) = cfg.diffraction.range();
            if x >= lo && x <= hi {
                let with = roughness::diffraction_factor(z, a_st, cfg.correlation_length, &cfg.diffraction)?;
                let without = roughness::roughness_factor(z, a_st)?;
                Some(((with - without) / without).abs())
            } else {
                None
            }
        };

        let f_c = cfg.force_at(z)?;
        let f_p = corrections::patch_force(z, cfg.radius, &cfg.patch)?;
        let patch_fraction = (f_p / f_c.value).abs();

        let finite = corrections::finite_size_factor(z, cfg.radius, cfg.plate_radius)?;
        let finite_deficit = finite.deficit_exact;

        let mut extra = vec![
            ("sample variations (grain bound)".to_string(), cfg.grain_bound),
            ("proximity force theorem".to_string(), pft),
        ];
        if let Some(d) = diffraction {
            extra.push(("diffraction-type effects".to_string(), d));
        }
        extra.push(("patch potentials".to_string(), patch_fraction));
        extra.push(("finite plate size".to_string(), finite_deficit));

        let budget = stats::theory_error_budget(z, cfg.delta_r, cfg.radius, cfg.delta_z, &extra)?;

        let _ = writeln!(report, "\nz = {} nm", sig4(z * 1e9));
        for (label, value) in &budget.contributions {
            let _ = writeln!(report, "  {label:<38} {:>8} %", sig4(value * 100.0));
        }
        if diffraction.is_none() {
            let _ = writeln!(
                report,
                "  (diffraction skipped: z/l_corr = {} outside the lookup range)",
                sig4(z / cfg.correlation_length)
            );
        }
        let _ = writeln!(report, "  {:<38} {:>8} %", "TOTAL", sig4(budget.total() * 100.0));

        let _ = writeln!(
            csv,
            "{}, {}, {}, {}, {}, {}, {}, {}",
            sig4(z * 1e9),
            sig4(budget.contributions[0].1 * 100.0),
            sig4(cfg.grain_bound * 100.0),
            sig4(pft * 100.0),
            diffraction.map_or("n/a".to_string(), |d| sig4(d * 100.0)),
            sig4(patch_fraction * 100.0),
            sig4(finite_deficit * 100.0),
            sig4(budget.total() * 100.0)
        );
    }

    Ok(CommandOutput {
        files: vec![
            ("budget.csv".into(), csv),
            ("budget_report.txt".into(), report.clone()),
        ],
        report,
    })
}

/// Roughness statistics report (H0, A, delta_st, A_st; dominant period if a
/// profile is configured).
pub fn cmd_roughness(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let hist = cfg.require_histogram()?;
    let s = roughness::stochastic_stats(hist);

    let mut report = String::from("Roughness statistics\n");
    let _ = writeln!(report, "zero roughness level H0 = {} nm", sig4(s.h0 * 1e9));
    let _ = writeln!(report, "amplitude A             = {} nm", sig4(s.amplitude * 1e9));
    let _ = writeln!(report, "delta_st                = {} nm", sig4(s.delta_st * 1e9));
    let _ = writeln!(report, "A_st = sqrt(2) delta_st = {} nm", sig4(s.a_st * 1e9));
    if let Some(profile) = &cfg.profile {
        let period = roughness::dominant_period(profile)?;
        let _ = writeln!(report, "dominant profile period = {} nm", sig4(period * 1e9));
    }

    Ok(CommandOutput {
        files: vec![("roughness_report.txt".into(), report.clone())],
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig4_formatting() {
        assert_eq!(sig4(485.84321), "485.8");
        assert_eq!(sig4(-1096.712), "-1097");
        assert_eq!(sig4(0.00123456), "0.001235");
        assert_eq!(sig4(0.0), "0.000");
        assert_eq!(sig4(2.0566), "2.057");
    }

    #[test]
    fn config_parsing_sections_and_lists() {
        let raw = RawConfig::parse(
            "[geometry]\nsphere_radius_um = 95.65\n# comment\n[scans]\nexclude = 3, 7, 11\nbeta = 0.95\n",
            PathBuf::from("."),
        )
        .unwrap();
        assert_eq!(raw.get("geometry.sphere_radius_um"), Some("95.65"));
        assert_eq!(raw.get_list_usize("scans.exclude").unwrap(), vec![3, 7, 11]);
        assert_eq!(raw.get_f64("scans.beta").unwrap(), Some(0.95));
        assert!(raw.get("nothing.here").is_none());
    }

    #[test]
    fn config_rejects_malformed_lines() {
        assert!(RawConfig::parse("[a]\nnot a key value\n", PathBuf::from(".")).is_err());
    }

    #[test]
    fn missing_file_is_input_error() {
        let raw = RawConfig::parse(
            "[model]\noptical_table = does_not_exist.dat\n",
            PathBuf::from("."),
        )
        .unwrap();
        let err = raw.get_path("model.optical_table").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("does_not_exist.dat"));
    }
}
