//! Instance specifications: the JSON schema the CLI accepts, its validation
//! with field-level error attribution, and construction of ready-to-solve
//! instances.
//!
//! Three kinds are supported:
//!
//! - `hard_scaled` — the worst-case chain family scaled to prescribed
//!   smoothness `L`, optimum distance `R`, curve parameter `gamma`, and
//!   accuracy target `eps`;
//! - `hard_unscaled` — the raw chain family with explicit chain length `T`
//!   and bump weight `sigma`;
//! - `quadratic` — a diagonal quadratic with `n` eigenvalues spread over
//!   `[mu, L]` on a log or linear grid, centered at a seeded random point.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use quasar_opt::instances::{DiagonalQuadratic, HardInstanceScaled, HardInstanceUnscaled, SpectrumShape};
use quasar_opt::Objective;

/// Desk-scale cap on the dimension of any instance the CLI will build
/// (chain length for the hard families, `n` for quadratics).
pub const DESK_MAX_CHAIN_LEN: usize = 100_000;

/// Desk-scale cap on combined oracle evaluations per solver run; a run that
/// reaches it ends with the iteration-budget termination reason.
pub const DESK_MAX_EVALS: u64 = 100_000_000;

/// A spec-level validation failure, attributed to the field that caused it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    /// Dotted path of the offending field, e.g. `instance.T` or `eps`.
    pub field: String,
    pub message: String,
}

impl SpecError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for SpecError {}

/// Eigenvalue layout of a quadratic instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Log,
    Linear,
}

/// Parsed instance specification, mirroring the JSON schema exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum InstanceSpec {
    #[serde(rename = "hard_scaled")]
    HardScaled {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "R")]
        r: f64,
        gamma: f64,
        eps: f64,
    },
    #[serde(rename = "hard_unscaled")]
    HardUnscaled {
        #[serde(rename = "T")]
        t: u64,
        sigma: f64,
    },
    #[serde(rename = "quadratic")]
    Quadratic {
        n: u64,
        mu: f64,
        #[serde(rename = "L")]
        l: f64,
        spectrum: SpectrumKind,
        xstar_seed: u64,
    },
}

impl InstanceSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            InstanceSpec::HardScaled { .. } => "hard_scaled",
            InstanceSpec::HardUnscaled { .. } => "hard_unscaled",
            InstanceSpec::Quadratic { .. } => "quadratic",
        }
    }

    /// One-line human description for run summaries.
    pub fn describe(&self) -> String {
        match self {
            InstanceSpec::HardScaled { l, r, gamma, eps } => {
                format!("hard_scaled(L={l}, R={r}, gamma={gamma}, eps={eps})")
            }
            InstanceSpec::HardUnscaled { t, sigma } => {
                format!("hard_unscaled(T={t}, sigma={sigma})")
            }
            InstanceSpec::Quadratic {
                n,
                mu,
                l,
                spectrum,
                xstar_seed,
            } => {
                let shape = match spectrum {
                    SpectrumKind::Log => "log",
                    SpectrumKind::Linear => "linear",
                };
                format!("quadratic(n={n}, mu={mu}, L={l}, spectrum={shape}, xstar_seed={xstar_seed})")
            }
        }
    }
}

/// Allowed JSON keys per kind, used to produce precise unknown-field errors
/// (the tagged-enum representation would otherwise ignore strays silently).
fn allowed_fields(kind: &str) -> Option<&'static [&'static str]> {
    match kind {
        "hard_scaled" => Some(&["kind", "L", "R", "gamma", "eps"]),
        "hard_unscaled" => Some(&["kind", "T", "sigma"]),
        "quadratic" => Some(&["kind", "n", "mu", "L", "spectrum", "xstar_seed"]),
        _ => None,
    }
}

/// Parses an instance spec from JSON text, attributing every failure to the
/// JSON field responsible.
pub fn parse_instance_json(text: &str) -> Result<InstanceSpec, SpecError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| SpecError::new("instance", format!("not valid JSON: {e}")))?;
    let object = value
        .as_object()
        .ok_or_else(|| SpecError::new("instance", "expected a JSON object"))?;
    let kind = object
        .get("kind")
        .ok_or_else(|| SpecError::new("instance.kind", "missing; expected one of hard_scaled, hard_unscaled, quadratic"))?
        .as_str()
        .ok_or_else(|| SpecError::new("instance.kind", "must be a string"))?
        .to_string();
    let allowed = allowed_fields(&kind).ok_or_else(|| {
        SpecError::new(
            "instance.kind",
            format!("unknown kind `{kind}`; expected one of hard_scaled, hard_unscaled, quadratic"),
        )
    })?;
    for key in object.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(SpecError::new(
                format!("instance.{key}"),
                format!(
                    "unknown field for kind `{kind}`; expected fields: {}",
                    allowed.join(", ")
                ),
            ));
        }
    }
    let spec: InstanceSpec = serde_json::from_value(value).map_err(|e| {
        // serde reports missing/badly-typed fields by name; surface that.
        SpecError::new("instance", format!("malformed {kind} spec: {e}"))
    })?;
    validate_spec(&spec)?;
    Ok(spec)
}

/// Resolves the `--instance` argument: inline JSON when it starts with `{`,
/// otherwise a path to a JSON file.
pub fn parse_instance_arg(arg: &str) -> Result<InstanceSpec, SpecError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return parse_instance_json(trimmed);
    }
    let text = fs::read_to_string(Path::new(arg))
        .map_err(|e| SpecError::new("instance", format!("cannot read spec file `{arg}`: {e}")))?;
    parse_instance_json(&text)
}

fn require_positive(field: &str, value: f64) -> Result<(), SpecError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(SpecError::new(
            field,
            format!("must be positive and finite, got {value}"),
        ));
    }
    Ok(())
}

/// Range and desk-cap validation with field attribution. Constraints that
/// involve several fields at once are reported under `instance` with a
/// message spelling out the combination.
pub fn validate_spec(spec: &InstanceSpec) -> Result<(), SpecError> {
    match *spec {
        InstanceSpec::HardScaled { l, r, gamma, eps } => {
            require_positive("instance.L", l)?;
            require_positive("instance.R", r)?;
            require_positive("instance.gamma", gamma)?;
            require_positive("instance.eps", eps)?;
            if gamma > 1e-2 {
                return Err(SpecError::new(
                    "instance.gamma",
                    format!("must not exceed 1e-2 (the certified range of the scaled chain family), got {gamma}"),
                ));
            }
            let hardness = l.sqrt() * r / eps.sqrt();
            if !(hardness.is_finite() && hardness >= 1e3) {
                return Err(SpecError::new(
                    "instance",
                    format!(
                        "sqrt(L)*R/sqrt(eps) = {hardness:.3e} is below the certified minimum 1e3; \
                         lower eps or raise L or R"
                    ),
                ));
            }
            let chain_len = (1e-2 / gamma * hardness).ceil();
            if chain_len > DESK_MAX_CHAIN_LEN as f64 {
                return Err(SpecError::new(
                    "instance",
                    format!(
                        "derived chain length {chain_len:.0} exceeds the desk cap {DESK_MAX_CHAIN_LEN}; \
                         raise eps or gamma, or shrink sqrt(L)*R"
                    ),
                ));
            }
            Ok(())
        }
        InstanceSpec::HardUnscaled { t, sigma } => {
            if t == 0 {
                return Err(SpecError::new("instance.T", "chain length must be at least 1"));
            }
            if t > DESK_MAX_CHAIN_LEN as u64 {
                return Err(SpecError::new(
                    "instance.T",
                    format!("chain length {t} exceeds the desk cap {DESK_MAX_CHAIN_LEN}"),
                ));
            }
            require_positive("instance.sigma", sigma)?;
            // The remaining constraints (certified bump-weight range and the
            // length/weight coupling) live in the constructor; surface its
            // message under the instance field.
            HardInstanceUnscaled::new(t as usize, sigma)
                .map_err(|e| SpecError::new("instance", e.to_string()))?;
            Ok(())
        }
        InstanceSpec::Quadratic { n, mu, l, .. } => {
            if n == 0 {
                return Err(SpecError::new("instance.n", "dimension must be at least 1"));
            }
            if n > DESK_MAX_CHAIN_LEN as u64 {
                return Err(SpecError::new(
                    "instance.n",
                    format!("dimension {n} exceeds the desk cap {DESK_MAX_CHAIN_LEN}"),
                ));
            }
            require_positive("instance.mu", mu)?;
            require_positive("instance.L", l)?;
            if l < mu {
                return Err(SpecError::new(
                    "instance.L",
                    format!("smoothness constant L = {l} must be at least mu = {mu}"),
                ));
            }
            Ok(())
        }
    }
}

/// A fully constructed instance: the objective plus everything a solver run
/// needs (declared constants, the known optimum, a search radius, and the
/// canonical start point).
pub struct BuiltInstance {
    pub objective: Box<dyn Objective>,
    pub l_smooth: f64,
    pub gamma: f64,
    /// Strong-curvature modulus intrinsic to the instance: the smallest
    /// eigenvalue for quadratics, zero for the chain families.
    pub natural_mu: f64,
    pub optimum_point: Vec<f64>,
    pub optimum_value: f64,
    /// Declared bound on the start point's distance to the optimum.
    pub radius: f64,
    /// Canonical start point: the origin for chain instances (the
    /// lower-bound protocol starts with nothing revealed), a seeded point at
    /// distance `radius` from the center for quadratics.
    pub x0: Vec<f64>,
    /// Chain length for the hard families, `None` for quadratics.
    pub chain_len: Option<usize>,
}

/// Seeded uniform direction on the unit sphere (uniform cube draw,
/// normalized; retried in the measure-zero degenerate case).
fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = raw.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return raw.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Builds the instance. `seed` fixes the quadratic start direction (chain
/// starts are deterministic at the origin); `radius_override` replaces the
/// instance's own search-radius declaration.
pub fn build(
    spec: &InstanceSpec,
    seed: u64,
    radius_override: Option<f64>,
) -> Result<BuiltInstance, SpecError> {
    validate_spec(spec)?;
    if let Some(r) = radius_override {
        require_positive("R", r)?;
    }
    match *spec {
        InstanceSpec::HardScaled { l, r, gamma, eps } => {
            let inst = HardInstanceScaled::from_targets(l, r, gamma, eps)
                .map_err(|e| SpecError::new("instance", e.to_string()))?;
            let chain_len = inst.chain_len();
            if chain_len > DESK_MAX_CHAIN_LEN {
                return Err(SpecError::new(
                    "instance",
                    format!("derived chain length {chain_len} exceeds the desk cap {DESK_MAX_CHAIN_LEN}"),
                ));
            }
            Ok(BuiltInstance {
                objective: Box::new(inst.objective()),
                l_smooth: inst.l_smooth(),
                gamma: inst.gamma(),
                natural_mu: 0.0,
                optimum_point: inst.minimizer(),
                optimum_value: 0.0,
                radius: radius_override.unwrap_or_else(|| inst.radius()),
                x0: vec![0.0; chain_len],
                chain_len: Some(chain_len),
            })
        }
        InstanceSpec::HardUnscaled { t, sigma } => {
            let inst = HardInstanceUnscaled::new(t as usize, sigma)
                .map_err(|e| SpecError::new("instance", e.to_string()))?;
            let chain_len = inst.chain_len();
            // Start at the origin; the optimum is the all-ones vector.
            let measured_radius = (chain_len as f64).sqrt();
            Ok(BuiltInstance {
                objective: Box::new(inst.objective()),
                l_smooth: inst.l_smooth(),
                gamma: inst.gamma(),
                natural_mu: 0.0,
                optimum_point: vec![1.0; chain_len],
                optimum_value: 0.0,
                radius: radius_override.unwrap_or(measured_radius),
                x0: vec![0.0; chain_len],
                chain_len: Some(chain_len),
            })
        }
        InstanceSpec::Quadratic {
            n,
            mu,
            l,
            spectrum,
            xstar_seed,
        } => {
            let dim = n as usize;
            let mut center_rng = ChaCha8Rng::seed_from_u64(xstar_seed);
            let center: Vec<f64> = (0..dim).map(|_| center_rng.gen_range(-1.0..1.0)).collect();
            let shape = match spectrum {
                SpectrumKind::Log => SpectrumShape::LogSpaced,
                SpectrumKind::Linear => SpectrumShape::LinearSpaced,
            };
            let quad = DiagonalQuadratic::from_spectrum(dim, mu, l, shape, center.clone())
                .map_err(|e| SpecError::new("instance", e.to_string()))?;
            let radius = radius_override.unwrap_or(10.0);
            let mut dir_rng = ChaCha8Rng::seed_from_u64(seed);
            let direction = unit_direction(&mut dir_rng, dim);
            let x0: Vec<f64> = center
                .iter()
                .zip(direction.iter())
                .map(|(c, d)| c + radius * d)
                .collect();
            Ok(BuiltInstance {
                objective: Box::new(quad),
                l_smooth: l,
                gamma: 1.0,
                natural_mu: mu,
                optimum_point: center,
                optimum_value: 0.0,
                radius,
                x0,
                chain_len: None,
            })
        }
    }
}

/// Normalized JSON for `instance-dump`: schema fields only, deterministic
/// order, one trailing newline.
pub fn dump_json(spec: &InstanceSpec) -> String {
    let mut text = serde_json::to_string_pretty(spec).expect("instance specs always serialize");
    text.push('\n');
    text
}
