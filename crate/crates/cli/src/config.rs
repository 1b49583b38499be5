//! INI-style run configuration: `key = value` lines under `[section]`
//! headers, `#` comments, strict rejection of unknown keys.

use crate::error::{CliError, Result};
use nsf_core::coeff::CoefficientFn;
use nsf_core::coupler::FixedPointConfig;
use nsf_core::hydro::HydroParams;
use nsf_core::law::VirialLaw;
use nsf_core::presets;
use nsf_core::scan::{ScanGrid, Spacing};
use nsf_core::thermal::ThermalParams;
use nsf_core::validator::{validate_structure, CheckStatus, ValidatorConfig};

/// Initial-condition selector.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    Uniform,
    Sine,
    File(String),
}

/// `[initial]` section.
#[derive(Debug, Clone)]
pub struct InitialConfig {
    pub profile: InitialProfile,
    pub rho0: f64,
    pub rho_amplitude: f64,
    pub theta0: f64,
    pub theta_amplitude: f64,
    pub u0: f64,
    pub u_amplitude: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            profile: InitialProfile::Uniform,
            rho0: 1.0,
            rho_amplitude: 0.0,
            theta0: 1.0,
            theta_amplitude: 0.0,
            u0: 0.0,
            u_amplitude: 0.0,
        }
    }
}

/// `[output]` section.
#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub dir: String,
    /// Snapshot cadence in trajectory samples; 0 writes only the final state.
    pub snapshot_every: usize,
    pub csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: "out".to_string(),
            snapshot_every: 0,
            csv: true,
        }
    }
}

/// `[mms]` section.
#[derive(Debug, Clone)]
pub struct MmsConfig {
    pub case: String,
    pub resolutions: Vec<usize>,
    pub dts: Vec<f64>,
}

impl Default for MmsConfig {
    fn default() -> Self {
        MmsConfig {
            case: "thermal".to_string(),
            resolutions: vec![32, 64, 128],
            dts: vec![4e-3, 2e-3, 1e-3],
        }
    }
}

/// Fully parsed and defaulted configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub law: VirialLaw,
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub t_final: f64,
    pub fixed_point: FixedPointConfig,
    pub hydro: HydroParams,
    pub thermal: ThermalParams,
    pub eps: f64,
    pub continuation: Vec<f64>,
    pub initial: InitialConfig,
    pub output: OutputConfig,
    pub validator: ValidatorConfig,
    pub force: bool,
    pub mms: MmsConfig,
}

struct Entry {
    line: usize,
    value: String,
    consumed: bool,
}

struct Sections {
    entries: Vec<(String, String, Entry)>, // (section, key, entry)
}

impl Sections {
    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        for (s, k, e) in self.entries.iter_mut() {
            if s == section && k == key && !e.consumed {
                e.consumed = true;
                return Some((e.line, e.value.clone()));
            }
        }
        None
    }
}

fn parse_lines(text: &str) -> Result<Sections> {
    let mut entries = Vec::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| {
                CliError::Config(format!("line {line_no}: malformed section header `{line}`"))
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {line_no}: expected `key = value`, got `{line}`"))
        })?;
        if section.is_empty() {
            return Err(CliError::Config(format!(
                "line {line_no}: key `{}` appears before any [section]",
                key.trim()
            )));
        }
        entries.push((
            section.clone(),
            key.trim().to_string(),
            Entry {
                line: line_no,
                value: value.trim().to_string(),
                consumed: false,
            },
        ));
    }
    Ok(Sections { entries })
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value.parse().map_err(|_| {
        CliError::Config(format!("line {line}: key `{key}` expects a number, got `{value}`"))
    })
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| {
        CliError::Config(format!(
            "line {line}: key `{key}` expects a non-negative integer, got `{value}`"
        ))
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::Config(format!(
            "line {line}: key `{key}` expects true/false, got `{value}`"
        ))),
    }
}

/// Parses one coefficient expression: terms joined by `+`, each
/// `constant c` | `power a p` | `ratpow a p scale damping`.
fn parse_coefficient(line: usize, key: &str, value: &str) -> Result<CoefficientFn> {
    let mut terms = Vec::new();
    for term in value.split('+') {
        let tokens: Vec<&str> = term.split_whitespace().collect();
        let bad = |msg: &str| {
            CliError::Config(format!("line {line}: key `{key}`: {msg} in `{}`", term.trim()))
        };
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| bad(&format!("`{s}` is not a number")))
        };
        match tokens.as_slice() {
            ["constant", c] => terms.push(CoefficientFn::constant(num(c)?)),
            ["power", a, p] => terms.push(CoefficientFn::power(num(a)?, num(p)?)),
            ["ratpow", a, p, s, q] => {
                terms.push(CoefficientFn::rational_power(num(a)?, num(p)?, num(s)?, num(q)?))
            }
            [] => return Err(bad("empty term")),
            [kind, ..] => {
                return Err(bad(&format!(
                    "unknown coefficient kind `{kind}` (expected constant/power/ratpow)"
                )))
            }
        }
    }
    Ok(if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        CoefficientFn::Sum(terms)
    })
}

const SECTIONS: &[&str] = &[
    "law",
    "grid",
    "time",
    "fixed_point",
    "regularization",
    "initial",
    "output",
    "validator",
    "mms",
];

/// Parses the configuration text with defaults applied. The structural law
/// inequalities are enforced here unless `lenient` (used by the `validate`
/// subcommand, whose whole point is reporting them).
pub fn parse_config_with(text: &str, lenient: bool) -> Result<RunConfig> {
    let mut sections = parse_lines(text)?;

    // Unknown sections are errors.
    for (s, _, e) in &sections.entries {
        if !SECTIONS.contains(&s.as_str()) {
            return Err(CliError::Config(format!(
                "line {}: unknown section [{s}]",
                e.line
            )));
        }
    }

    // [law] defaults to the reference law.
    let mut law = presets::reference_law();
    if let Some((l, v)) = sections.take("law", "gamma") {
        law.gamma = parse_f64(l, "gamma", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "gamma_theta") {
        law.gamma_theta = parse_f64(l, "gamma_theta", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "alpha") {
        law.alpha = parse_f64(l, "alpha", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "alpha_bar") {
        law.alpha_bar = parse_f64(l, "alpha_bar", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "mu") {
        law.mu = parse_f64(l, "mu", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "lambda") {
        law.lambda = parse_f64(l, "lambda", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "kappa_a") {
        law.kappa_a = parse_f64(l, "kappa_a", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "kappa_b") {
        law.kappa_b = parse_f64(l, "kappa_b", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "m_const") {
        law.m_const = parse_f64(l, "m_const", &v)?;
    }
    if let Some((l, v)) = sections.take("law", "n_trunc") {
        let n = parse_usize(l, "n_trunc", &v)?;
        law.n_trunc = n;
        law.b.resize(n + 1, CoefficientFn::zero());
        law.b_bar.resize(n + 1, 0.0);
    }
    for n in 0..=law.n_trunc {
        let key = format!("b{n}");
        if let Some((l, v)) = sections.take("law", &key) {
            law.b[n] = parse_coefficient(l, &key, &v)?;
        }
    }
    if let Some((l, v)) = sections.take("law", "b_bar") {
        let vals: Result<Vec<f64>> = v
            .split_whitespace()
            .map(|s| parse_f64(l, "b_bar", s))
            .collect();
        let vals = vals?;
        if vals.len() != law.n_trunc + 1 {
            return Err(CliError::Config(format!(
                "line {l}: b_bar needs {} entries (n_trunc = {}), got {}",
                law.n_trunc + 1,
                law.n_trunc,
                vals.len()
            )));
        }
        law.b_bar = vals;
    }
    law.b1_constant = if law.n_trunc >= 1 {
        law.b[1].constant_value().ok_or_else(|| {
            CliError::Config("law coefficient b1 must be constant".to_string())
        })?
    } else {
        0.0
    };
    law.check_shape().map_err(CliError::from)?;

    // [grid]
    let mut dim = 1usize;
    let mut n = 64usize;
    let mut length = 1.0;
    if let Some((l, v)) = sections.take("grid", "dim") {
        dim = parse_usize(l, "dim", &v)?;
    }
    if let Some((l, v)) = sections.take("grid", "n") {
        n = parse_usize(l, "n", &v)?;
    }
    if let Some((l, v)) = sections.take("grid", "length") {
        length = parse_f64(l, "length", &v)?;
    }
    nsf_core::grid::PeriodicGrid::new(dim, n, length).map_err(CliError::from)?;

    // [time]
    let mut t_final = 0.05;
    let mut slab_length = 0.05;
    let mut cfl = 0.4;
    let mut thermal_dt: Option<f64> = None;
    if let Some((l, v)) = sections.take("time", "t_final") {
        t_final = parse_f64(l, "t_final", &v)?;
    }
    if let Some((l, v)) = sections.take("time", "slab_length") {
        slab_length = parse_f64(l, "slab_length", &v)?;
    }
    if let Some((l, v)) = sections.take("time", "cfl") {
        cfl = parse_f64(l, "cfl", &v)?;
        if !(cfl > 0.0 && cfl < 1.0) {
            return Err(CliError::Config(format!(
                "line {l}: cfl must lie in (0, 1), got {cfl}"
            )));
        }
    }
    if let Some((l, v)) = sections.take("time", "thermal_dt") {
        thermal_dt = Some(parse_f64(l, "thermal_dt", &v)?);
    }

    // [fixed_point]
    let mut fixed_point = FixedPointConfig {
        slab_length,
        ..FixedPointConfig::default()
    };
    if let Some((l, v)) = sections.take("fixed_point", "omega") {
        fixed_point.omega = parse_f64(l, "omega", &v)?;
    }
    if let Some((l, v)) = sections.take("fixed_point", "tol") {
        fixed_point.tol = parse_f64(l, "tol", &v)?;
    }
    if let Some((l, v)) = sections.take("fixed_point", "max_iter") {
        fixed_point.max_iter = parse_usize(l, "max_iter", &v)?;
    }
    if let Some(dt) = thermal_dt {
        if !(dt > 0.0) {
            return Err(CliError::Config(format!(
                "thermal_dt must be positive, got {dt}"
            )));
        }
        fixed_point.samples_per_slab = (slab_length / dt).ceil().max(1.0) as usize;
    }
    fixed_point.check().map_err(CliError::from)?;

    // [regularization]
    let mut eps = 1e-3;
    let mut continuation = Vec::new();
    if let Some((l, v)) = sections.take("regularization", "eps") {
        eps = parse_f64(l, "eps", &v)?;
        if !(eps > 0.0) {
            return Err(CliError::Config(format!(
                "line {l}: eps must be positive for stepping, got {eps}"
            )));
        }
    }
    if let Some((l, v)) = sections.take("regularization", "continuation") {
        let vals: Result<Vec<f64>> = v
            .split_whitespace()
            .map(|s| parse_f64(l, "continuation", s))
            .collect();
        continuation = vals?;
    }

    // [initial]
    let mut initial = InitialConfig::default();
    if let Some((l, v)) = sections.take("initial", "profile") {
        initial.profile = match v.as_str() {
            "uniform" => InitialProfile::Uniform,
            "sine" | "sine-perturbation" => InitialProfile::Sine,
            other => {
                if let Some(path) = other.strip_prefix("file:") {
                    InitialProfile::File(path.trim().to_string())
                } else {
                    return Err(CliError::Config(format!(
                        "line {l}: unknown initial profile `{other}` (uniform | sine | file:<path>)"
                    )));
                }
            }
        };
    }
    for (key, slot) in [
        ("rho0", &mut initial.rho0),
        ("rho_amplitude", &mut initial.rho_amplitude),
        ("theta0", &mut initial.theta0),
        ("theta_amplitude", &mut initial.theta_amplitude),
        ("u0", &mut initial.u0),
        ("u_amplitude", &mut initial.u_amplitude),
    ] {
        if let Some((l, v)) = sections.take("initial", key) {
            *slot = parse_f64(l, key, &v)?;
        }
    }

    // [output]
    let mut output = OutputConfig::default();
    if let Some((_, v)) = sections.take("output", "dir") {
        output.dir = v;
    }
    if let Some((l, v)) = sections.take("output", "snapshot_every") {
        output.snapshot_every = parse_usize(l, "snapshot_every", &v)?;
    }
    if let Some((l, v)) = sections.take("output", "csv") {
        output.csv = parse_bool(l, "csv", &v)?;
    }

    // [validator]
    let mut vgrid = ScanGrid::default();
    let mut validator = ValidatorConfig {
        dimension: dim,
        ..ValidatorConfig::default()
    };
    let mut force = false;
    for (key, slot) in [
        ("theta_lo", &mut vgrid.theta_lo),
        ("theta_hi", &mut vgrid.theta_hi),
        ("rho_lo", &mut vgrid.rho_lo),
        ("rho_hi", &mut vgrid.rho_hi),
    ] {
        if let Some((l, v)) = sections.take("validator", key) {
            *slot = parse_f64(l, key, &v)?;
        }
    }
    if let Some((l, v)) = sections.take("validator", "points_per_axis") {
        vgrid.points_per_axis = parse_usize(l, "points_per_axis", &v)?;
    }
    if let Some((l, v)) = sections.take("validator", "spacing") {
        vgrid.spacing = match v.as_str() {
            "log" => Spacing::Log,
            "linear" => Spacing::Linear,
            other => {
                return Err(CliError::Config(format!(
                    "line {l}: spacing must be log or linear, got `{other}`"
                )))
            }
        };
    }
    if let Some((l, v)) = sections.take("validator", "theta_split") {
        validator.theta_split = parse_f64(l, "theta_split", &v)?;
    }
    if let Some((l, v)) = sections.take("validator", "eps_slack") {
        validator.eps_slack = parse_f64(l, "eps_slack", &v)?;
    }
    if let Some((l, v)) = sections.take("validator", "growth_theta_hi") {
        validator.growth_theta_hi = parse_f64(l, "growth_theta_hi", &v)?;
    }
    if let Some((l, v)) = sections.take("validator", "force") {
        force = parse_bool(l, "force", &v)?;
    }
    validator.grid = ScanGrid::new(
        vgrid.theta_lo,
        vgrid.theta_hi,
        vgrid.rho_lo,
        vgrid.rho_hi,
        vgrid.points_per_axis,
        vgrid.spacing,
    )
    .map_err(CliError::from)?;

    // [mms]
    let mut mms = MmsConfig::default();
    if let Some((l, v)) = sections.take("mms", "case") {
        match v.as_str() {
            "thermal" | "thermal-temporal" | "hydro-advective" | "hydro-diffusive" => {
                mms.case = v
            }
            other => {
                return Err(CliError::Config(format!(
                    "line {l}: unknown mms case `{other}`"
                )))
            }
        }
    }
    if let Some((l, v)) = sections.take("mms", "resolutions") {
        let vals: Result<Vec<usize>> = v
            .split_whitespace()
            .map(|s| parse_usize(l, "resolutions", s))
            .collect();
        mms.resolutions = vals?;
    }
    if let Some((l, v)) = sections.take("mms", "dts") {
        let vals: Result<Vec<f64>> = v
            .split_whitespace()
            .map(|s| parse_f64(l, "dts", s))
            .collect();
        mms.dts = vals?;
    }

    // Any unconsumed key is unknown.
    for (s, k, e) in &sections.entries {
        if !e.consumed {
            return Err(CliError::Config(format!(
                "line {}: unknown key `{k}` in section [{s}]",
                e.line
            )));
        }
    }

    let config = RunConfig {
        law,
        dim,
        n,
        length,
        t_final,
        fixed_point,
        hydro: HydroParams {
            cfl,
            ..HydroParams::default()
        },
        thermal: ThermalParams::default(),
        eps,
        continuation,
        initial,
        output,
        validator,
        force,
        mms,
    };

    if !lenient {
        let checks = validate_structure(&config.law, config.dim);
        for c in &checks {
            if c.status == CheckStatus::Fail {
                return Err(CliError::Config(format!(
                    "law fails structural check `{}`: {}",
                    c.id, c.note
                )));
            }
        }
    }
    Ok(config)
}

/// Strict parse used by `run` and `mms`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_applies_defaults() {
        let cfg = parse_config("[law]\ngamma = 5.0\n[grid]\nn = 64\n").unwrap();
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.dim, 1);
        assert_eq!(cfg.fixed_point.omega, 0.5);
        assert_eq!(cfg.eps, 1e-3);
        assert_eq!(cfg.output.dir, "out");
    }

    #[test]
    fn unknown_key_names_line() {
        let err = parse_config("[law]\ngama = 5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("gama"), "{msg}");
    }

    #[test]
    fn gamma_floor_violation_is_config_error() {
        let err = parse_config("[law]\ngamma = 4.0\n[grid]\ndim = 2\nn = 32\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("gamma-floor"), "{msg}");
    }

    #[test]
    fn lenient_parse_admits_structural_failures() {
        let cfg = parse_config_with("[law]\ngamma = 4.0\n[grid]\ndim = 2\nn = 32\n", true);
        assert!(cfg.is_ok());
    }

    #[test]
    fn type_mismatch_names_line_and_key() {
        let err = parse_config("[grid]\nn = sixty-four\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains('n'), "{msg}");
    }

    #[test]
    fn coefficient_expressions_parse() {
        let cfg = parse_config(
            "[law]\nn_trunc = 2\nb2 = ratpow -0.5 0.2 1.0 1.2\nb_bar = 0 0 -0.5\n",
        )
        .unwrap();
        let b2 = cfg.law.b[2].eval(1.0, 0).unwrap();
        assert!((b2 - (-0.25)).abs() < 1e-15);
        assert_eq!(cfg.law.b_bar[2], -0.5);
        let cfg = parse_config("[law]\nb0 = power 1.0 1.0 + constant 0.5\n").unwrap();
        assert!((cfg.law.b[0].eval(2.0, 0).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn thermal_dt_sets_samples() {
        let cfg = parse_config(
            "[law]\n[grid]\nn = 32\n[time]\nslab_length = 0.05\nthermal_dt = 0.005\n",
        )
        .unwrap();
        assert_eq!(cfg.fixed_point.samples_per_slab, 10);
    }

    #[test]
    fn nonconstant_b1_rejected() {
        let err = parse_config("[law]\nb1 = power 1.0 2.0\n").unwrap_err();
        assert!(err.to_string().contains("b1"));
    }
}
