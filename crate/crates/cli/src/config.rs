//! Experiment configuration: JSON file and/or command-line flags with
//! identical key names, validated against a per-command key table.
//! Validation reports every problem it finds, not just the first.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use anticonc::dist::{Atom, DistributionSpec};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Lcd,
    Smallball,
    BoundsCompare,
    MatrixTail,
    LargestSv,
    Singularity,
    Distance,
    NormalLcd,
    Rectangular,
}

impl Command {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "lcd" => Command::Lcd,
            "smallball" => Command::Smallball,
            "bounds-compare" => Command::BoundsCompare,
            "matrix-tail" => Command::MatrixTail,
            "largest-sv" => Command::LargestSv,
            "singularity" => Command::Singularity,
            "distance" => Command::Distance,
            "normal-lcd" => Command::NormalLcd,
            "rectangular" => Command::Rectangular,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Lcd => "lcd",
            Command::Smallball => "smallball",
            Command::BoundsCompare => "bounds-compare",
            Command::MatrixTail => "matrix-tail",
            Command::LargestSv => "largest-sv",
            Command::Singularity => "singularity",
            Command::Distance => "distance",
            Command::NormalLcd => "normal-lcd",
            Command::Rectangular => "rectangular",
        }
    }

    pub const ALL: [Command; 9] = [
        Command::Lcd,
        Command::Smallball,
        Command::BoundsCompare,
        Command::MatrixTail,
        Command::LargestSv,
        Command::Singularity,
        Command::Distance,
        Command::NormalLcd,
        Command::Rectangular,
    ];
}

/// One validation problem, tagged with the key path it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Typed parameter values after validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    UInt(u64),
    Real(f64),
    RealList(Vec<f64>),
    Str(String),
    AtomList(Vec<(f64, f64)>),
}

impl ParamValue {
    pub fn as_u64(&self) -> u64 {
        match self {
            ParamValue::UInt(v) => *v,
            _ => panic!("not a uint"),
        }
    }

    pub fn as_real(&self) -> f64 {
        match self {
            ParamValue::Real(v) => *v,
            ParamValue::UInt(v) => *v as f64,
            _ => panic!("not a real"),
        }
    }

    pub fn as_list(&self) -> &[f64] {
        match self {
            ParamValue::RealList(v) => v,
            _ => panic!("not a list"),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            ParamValue::Str(v) => v,
            _ => panic!("not a string"),
        }
    }

    /// Canonical text used in the provenance echo.
    pub fn canonical(&self) -> String {
        match self {
            ParamValue::UInt(v) => v.to_string(),
            ParamValue::Real(v) => format!("{v}"),
            ParamValue::RealList(v) => v
                .iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(","),
            ParamValue::Str(v) => v.clone(),
            ParamValue::AtomList(v) => v
                .iter()
                .map(|(x, p)| format!("{x}:{p}"))
                .collect::<Vec<_>>()
                .join(","),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KeyKind {
    UInt,
    Real,
    RealList,
    Str,
    AtomList,
}

/// Range constraint attached to a key; messages name the key and bound.
#[derive(Debug, Clone, Copy)]
enum Check {
    None,
    Positive,
    NonNegative,
    OpenUnit,
    OpenHalf,
    AtLeast(u64),
    ListNonNegative,
    ListNonEmpty,
}

struct KeySpec {
    name: &'static str,
    kind: KeyKind,
    required: bool,
    default: Option<ParamValue>,
    check: Check,
}

fn k(
    name: &'static str,
    kind: KeyKind,
    required: bool,
    default: Option<ParamValue>,
    check: Check,
) -> KeySpec {
    KeySpec {
        name,
        kind,
        required,
        default,
        check,
    }
}

fn common_keys() -> Vec<KeySpec> {
    vec![
        k("seed", KeyKind::UInt, false, Some(ParamValue::UInt(0)), Check::None),
        k(
            "out",
            KeyKind::Str,
            false,
            Some(ParamValue::Str("anticonc-out".into())),
            Check::None,
        ),
        k(
            "family",
            KeyKind::Str,
            false,
            None, // per-command default filled below
            Check::None,
        ),
        k("atoms", KeyKind::AtomList, false, None, Check::None),
        k("shift", KeyKind::RealList, false, None, Check::ListNonEmpty),
    ]
}

fn key_table(command: Command) -> Vec<KeySpec> {
    let mut keys = common_keys();
    let family_default = |keys: &mut Vec<KeySpec>, fam: &str| {
        let spec = keys.iter_mut().find(|s| s.name == "family").unwrap();
        spec.default = Some(ParamValue::Str(fam.to_string()));
    };
    match command {
        Command::Lcd => {
            family_default(&mut keys, "rademacher");
            keys.extend([
                k("a", KeyKind::RealList, true, None, Check::ListNonEmpty),
                k("alpha", KeyKind::Real, false, Some(ParamValue::Real(0.1)), Check::OpenUnit),
                k("kappa", KeyKind::Real, false, Some(ParamValue::Real(0.0)), Check::NonNegative),
                k("t-max", KeyKind::Real, false, Some(ParamValue::Real(1000.0)), Check::Positive),
                k("y", KeyKind::Real, false, Some(ParamValue::Real(10.0)), Check::Positive),
            ]);
        }
        Command::Smallball => {
            family_default(&mut keys, "rademacher");
            keys.extend([
                k("a", KeyKind::RealList, true, None, Check::ListNonEmpty),
                k("eps", KeyKind::RealList, true, None, Check::ListNonNegative),
                k(
                    "method",
                    KeyKind::Str,
                    false,
                    Some(ParamValue::Str("exact".into())),
                    Check::None,
                ),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(100_000)), Check::AtLeast(100)),
                k(
                    "budget",
                    KeyKind::UInt,
                    false,
                    Some(ParamValue::UInt(anticonc::smallball::DEFAULT_ATOM_BUDGET)),
                    Check::AtLeast(1),
                ),
            ]);
        }
        Command::BoundsCompare => {
            family_default(&mut keys, "rademacher");
            keys.extend([
                k("a", KeyKind::RealList, true, None, Check::ListNonEmpty),
                k("eps", KeyKind::RealList, true, None, Check::ListNonNegative),
                k("alpha", KeyKind::Real, false, Some(ParamValue::Real(0.05)), Check::OpenUnit),
                // kappa default n/4 is resolved at run time from a.
                k("kappa", KeyKind::Real, false, None, Check::Positive),
                k("bmoment", KeyKind::Real, false, None, Check::Positive),
                k("kbound", KeyKind::Real, false, None, Check::Positive),
                k("const-c", KeyKind::Real, false, Some(ParamValue::Real(1.0)), Check::Positive),
                k("const-c-small", KeyKind::Real, false, Some(ParamValue::Real(1.0)), Check::Positive),
                k("c1", KeyKind::Real, false, Some(ParamValue::Real(0.56)), Check::Positive),
                k("t-max", KeyKind::Real, false, Some(ParamValue::Real(1e6)), Check::Positive),
                k("quad-points", KeyKind::UInt, false, Some(ParamValue::UInt(4096)), Check::AtLeast(4)),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(100_000)), Check::AtLeast(100)),
                k(
                    "budget",
                    KeyKind::UInt,
                    false,
                    Some(ParamValue::UInt(anticonc::smallball::DEFAULT_ATOM_BUDGET)),
                    Check::AtLeast(1),
                ),
            ]);
        }
        Command::MatrixTail => {
            family_default(&mut keys, "gaussian");
            keys.extend([
                k("n", KeyKind::UInt, false, Some(ParamValue::UInt(100)), Check::AtLeast(1)),
                k(
                    "eps",
                    KeyKind::RealList,
                    false,
                    Some(ParamValue::RealList(vec![0.05, 0.1, 0.2])),
                    Check::ListNonNegative,
                ),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(2000)), Check::AtLeast(100)),
            ]);
        }
        Command::LargestSv => {
            family_default(&mut keys, "gaussian");
            keys.extend([
                k("n", KeyKind::UInt, false, Some(ParamValue::UInt(400)), Check::AtLeast(1)),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(200)), Check::AtLeast(1)),
            ]);
        }
        Command::Singularity => {
            family_default(&mut keys, "rademacher");
            keys.extend([
                k("n", KeyKind::UInt, false, Some(ParamValue::UInt(2)), Check::AtLeast(1)),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(100_000)), Check::AtLeast(1)),
                k(
                    "budget",
                    KeyKind::UInt,
                    false,
                    Some(ParamValue::UInt(anticonc::randmat::DEFAULT_MATRIX_BUDGET)),
                    Check::AtLeast(1),
                ),
            ]);
        }
        Command::Distance => {
            family_default(&mut keys, "gaussian");
            keys.extend([
                k("n", KeyKind::UInt, false, Some(ParamValue::UInt(50)), Check::AtLeast(2)),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(2000)), Check::AtLeast(1)),
                k(
                    "eps",
                    KeyKind::RealList,
                    false,
                    Some(ParamValue::RealList(vec![0.01, 0.05, 0.1, 0.2, 0.3])),
                    Check::ListNonNegative,
                ),
            ]);
        }
        Command::NormalLcd => {
            family_default(&mut keys, "gaussian");
            keys.extend([
                k("n", KeyKind::UInt, false, Some(ParamValue::UInt(20)), Check::AtLeast(2)),
                k("k1", KeyKind::Real, false, Some(ParamValue::Real(0.5)), Check::Positive),
                k("k2", KeyKind::Real, false, Some(ParamValue::Real(2.0)), Check::Positive),
                k("alpha", KeyKind::Real, false, Some(ParamValue::Real(0.25)), Check::OpenUnit),
                k("beta", KeyKind::Real, false, Some(ParamValue::Real(0.1)), Check::OpenHalf),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(200)), Check::AtLeast(1)),
                k("t-max", KeyKind::Real, false, Some(ParamValue::Real(1e4)), Check::Positive),
            ]);
        }
        Command::Rectangular => {
            family_default(&mut keys, "gaussian");
            keys.extend([
                k("n", KeyKind::UInt, false, Some(ParamValue::UInt(200)), Check::AtLeast(2)),
                k("k", KeyKind::UInt, false, Some(ParamValue::UInt(20)), Check::AtLeast(1)),
                k("trials", KeyKind::UInt, false, Some(ParamValue::UInt(500)), Check::AtLeast(1)),
            ]);
        }
    }
    keys
}

/// Fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub params: BTreeMap<String, ParamValue>,
    pub master_seed: u64,
    pub out_dir: String,
}

impl ExperimentConfig {
    pub fn get(&self, key: &str) -> &ParamValue {
        self.params
            .get(key)
            .unwrap_or_else(|| panic!("validated config is missing key {key}"))
    }

    pub fn maybe(&self, key: &str) -> Option<&ParamValue> {
        self.params.get(key)
    }

    /// The entry distribution described by family/atoms/shift.
    pub fn distribution(&self) -> Result<DistributionSpec, ConfigError> {
        let family = self.get("family").as_str();
        let base = match family {
            "rademacher" => DistributionSpec::rademacher(),
            "gaussian" => DistributionSpec::gaussian(),
            "uniform" => {
                let atoms = match self.maybe("atoms") {
                    Some(ParamValue::AtomList(list)) => list
                        .iter()
                        .map(|&(value, prob)| Atom { value, prob })
                        .collect(),
                    _ => {
                        return Err(err(
                            "atoms",
                            "family \"uniform\" requires the atoms key (value:prob pairs)",
                        ))
                    }
                };
                DistributionSpec::uniform_discrete(atoms)
                    .map_err(|e| err("atoms", e.to_string()))?
            }
            other => {
                return Err(err(
                    "family",
                    format!(
                        "unknown family \"{other}\" (expected rademacher, gaussian or uniform)"
                    ),
                ))
            }
        };
        match self.maybe("shift") {
            Some(ParamValue::RealList(offsets)) => {
                DistributionSpec::shifted(base, offsets.clone())
                    .map_err(|e| err("shift", e.to_string()))
            }
            _ => Ok(base),
        }
    }

    /// Sorted `key=value` echo of every effective parameter.
    pub fn echo_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .params
            .iter()
            .map(|(key, value)| format!("{key}={}", value.canonical()))
            .collect();
        lines.insert(0, format!("command={}", self.command.name()));
        lines
    }
}

/// Scans raw JSON text for duplicate keys inside any single object.
/// serde_json silently keeps the last duplicate, so this runs first.
fn find_duplicate_keys(text: &str) -> Vec<String> {
    #[derive(PartialEq)]
    enum Frame {
        Object(HashSet<String>),
        Array,
    }
    let mut dups = Vec::new();
    let mut stack: Vec<Frame> = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            '{' => stack.push(Frame::Object(HashSet::new())),
            '[' => stack.push(Frame::Array),
            '}' | ']' => {
                stack.pop();
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                while i < bytes.len() && bytes[i] != '"' {
                    if bytes[i] == '\\' && i + 1 < bytes.len() {
                        s.push(bytes[i]);
                        i += 1;
                    }
                    s.push(bytes[i]);
                    i += 1;
                }
                // Lookahead: a string directly inside an object followed
                // by ':' is a key.
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_whitespace() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == ':' {
                    if let Some(Frame::Object(seen)) = stack.last_mut() {
                        if !seen.insert(s.clone()) {
                            dups.push(s);
                        }
                    }
                }
            }
            _ => {}
        }
        i += 1;
    }
    dups
}

fn json_to_param(key: &str, kind: KeyKind, value: &Value) -> Result<ParamValue, ConfigError> {
    match kind {
        KeyKind::UInt => value
            .as_u64()
            .map(ParamValue::UInt)
            .ok_or_else(|| err(key, "expected a non-negative integer")),
        KeyKind::Real => value
            .as_f64()
            .filter(|v| v.is_finite())
            .map(ParamValue::Real)
            .ok_or_else(|| err(key, "expected a finite number")),
        KeyKind::Str => value
            .as_str()
            .map(|s| ParamValue::Str(s.to_string()))
            .ok_or_else(|| err(key, "expected a string")),
        KeyKind::RealList => {
            let arr = value
                .as_array()
                .ok_or_else(|| err(key, "expected an array of numbers"))?;
            let mut out = Vec::with_capacity(arr.len());
            for v in arr {
                out.push(
                    v.as_f64()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| err(key, "expected an array of finite numbers"))?,
                );
            }
            Ok(ParamValue::RealList(out))
        }
        KeyKind::AtomList => {
            let arr = value
                .as_array()
                .ok_or_else(|| err(key, "expected an array of [value, prob] pairs"))?;
            let mut out = Vec::with_capacity(arr.len());
            for v in arr {
                let pair = v
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| err(key, "expected [value, prob] pairs"))?;
                let value = pair[0]
                    .as_f64()
                    .ok_or_else(|| err(key, "atom value must be a number"))?;
                let prob = pair[1]
                    .as_f64()
                    .ok_or_else(|| err(key, "atom probability must be a number"))?;
                out.push((value, prob));
            }
            Ok(ParamValue::AtomList(out))
        }
    }
}

fn flag_to_param(key: &str, kind: KeyKind, raw: &str) -> Result<ParamValue, ConfigError> {
    match kind {
        KeyKind::UInt => raw
            .parse::<u64>()
            .map(ParamValue::UInt)
            .map_err(|_| err(key, format!("expected a non-negative integer, got \"{raw}\""))),
        KeyKind::Real => raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(ParamValue::Real)
            .ok_or_else(|| err(key, format!("expected a finite number, got \"{raw}\""))),
        KeyKind::Str => Ok(ParamValue::Str(raw.to_string())),
        KeyKind::RealList => {
            let mut out = Vec::new();
            for piece in raw.split(',') {
                let v = piece.trim().parse::<f64>().ok().filter(|v| v.is_finite());
                match v {
                    Some(v) => out.push(v),
                    None => {
                        return Err(err(
                            key,
                            format!("expected comma-separated numbers, got \"{raw}\""),
                        ))
                    }
                }
            }
            Ok(ParamValue::RealList(out))
        }
        KeyKind::AtomList => {
            let mut out = Vec::new();
            for piece in raw.split(',') {
                let parts: Vec<&str> = piece.trim().split(':').collect();
                if parts.len() != 2 {
                    return Err(err(
                        key,
                        format!("expected value:prob pairs, got \"{raw}\""),
                    ));
                }
                let value = parts[0].parse::<f64>();
                let prob = parts[1].parse::<f64>();
                match (value, prob) {
                    (Ok(v), Ok(p)) => out.push((v, p)),
                    _ => {
                        return Err(err(
                            key,
                            format!("expected numeric value:prob pairs, got \"{raw}\""),
                        ))
                    }
                }
            }
            Ok(ParamValue::AtomList(out))
        }
    }
}

fn run_check(key: &str, check: Check, value: &ParamValue) -> Option<ConfigError> {
    match check {
        Check::None => None,
        Check::Positive => {
            let v = value.as_real();
            (v <= 0.0).then(|| err(key, format!("{key} must be positive, got {v}")))
        }
        Check::NonNegative => {
            let v = value.as_real();
            (v < 0.0).then(|| err(key, format!("{key} must be >= 0, got {v}")))
        }
        Check::OpenUnit => {
            let v = value.as_real();
            (!(v > 0.0 && v < 1.0)).then(|| err(key, format!("{key} must be in (0,1), got {v}")))
        }
        Check::OpenHalf => {
            let v = value.as_real();
            (!(v > 0.0 && v < 0.5))
                .then(|| err(key, format!("{key} must be in (0,1/2), got {v}")))
        }
        Check::AtLeast(min) => {
            let v = value.as_u64();
            (v < min).then(|| err(key, format!("{key} must be at least {min}, got {v}")))
        }
        Check::ListNonNegative => match value {
            ParamValue::RealList(list) => {
                if list.is_empty() {
                    Some(err(key, format!("{key} must not be empty")))
                } else {
                    list.iter()
                        .find(|v| **v < 0.0)
                        .map(|v| err(key, format!("{key} entries must be >= 0, got {v}")))
                }
            }
            _ => None,
        },
        Check::ListNonEmpty => match value {
            ParamValue::RealList(list) => {
                list.is_empty().then(|| err(key, format!("{key} must not be empty")))
            }
            _ => None,
        },
    }
}

/// Builds and validates a config from an optional JSON document and
/// command-line flag pairs; flags override file values. On failure the
/// complete list of validation errors is returned.
pub fn parse_config(
    command: Command,
    file_text: Option<&str>,
    flags: &[(String, String)],
) -> Result<ExperimentConfig, Vec<ConfigError>> {
    let table = key_table(command);
    let mut errors: Vec<ConfigError> = Vec::new();
    let mut params: BTreeMap<String, ParamValue> = BTreeMap::new();

    if let Some(text) = file_text {
        for dup in find_duplicate_keys(text) {
            errors.push(err(&dup, "duplicate key in config file"));
        }
        match serde_json::from_str::<Value>(text) {
            Ok(Value::Object(map)) => {
                for (key, value) in &map {
                    match table.iter().find(|s| s.name == key) {
                        None => errors.push(err(
                            key,
                            format!("unknown key for command {}", command.name()),
                        )),
                        Some(spec) => match json_to_param(key, spec.kind, value) {
                            Ok(v) => {
                                params.insert(key.clone(), v);
                            }
                            Err(e) => errors.push(e),
                        },
                    }
                }
            }
            Ok(_) => errors.push(err("<root>", "config file must be a JSON object")),
            Err(e) => errors.push(err("<root>", format!("config file is not valid JSON: {e}"))),
        }
    }

    let mut seen_flags: HashSet<&str> = HashSet::new();
    for (key, raw) in flags {
        if !seen_flags.insert(key.as_str()) {
            errors.push(err(key, "duplicate flag"));
            continue;
        }
        match table.iter().find(|s| s.name == key.as_str()) {
            None => errors.push(err(
                key,
                format!("unknown key for command {}", command.name()),
            )),
            Some(spec) => match flag_to_param(key, spec.kind, raw) {
                Ok(v) => {
                    params.insert(key.clone(), v);
                }
                Err(e) => errors.push(e),
            },
        }
    }

    for spec in &table {
        if !params.contains_key(spec.name) {
            if let Some(default) = &spec.default {
                params.insert(spec.name.to_string(), default.clone());
            } else if spec.required {
                errors.push(err(spec.name, "missing required key"));
            }
        }
    }

    for spec in &table {
        if let Some(value) = params.get(spec.name) {
            if let Some(e) = run_check(spec.name, spec.check, value) {
                errors.push(e);
            }
        }
    }

    // Cross-key checks that need the assembled map.
    if let Some(ParamValue::AtomList(atoms)) = params.get("atoms") {
        let total: f64 = atoms.iter().map(|(_, p)| p).sum();
        if atoms.is_empty() {
            errors.push(err("atoms", "atoms must not be empty"));
        } else if (total - 1.0).abs() > 1e-12 {
            errors.push(err(
                "atoms",
                format!("atom probabilities sum to {total}, expected 1"),
            ));
        }
        if let Some(family) = params.get("family") {
            if family.as_str() != "uniform" {
                errors.push(err(
                    "atoms",
                    format!(
                        "atoms is only meaningful with family=uniform (got family={})",
                        family.as_str()
                    ),
                ));
            }
        }
    }
    if command == Command::Rectangular {
        if let (Some(n), Some(kk)) = (params.get("n"), params.get("k")) {
            if kk.as_u64() >= n.as_u64() {
                errors.push(err("k", format!("k must be below n (k={}, n={})", kk.as_u64(), n.as_u64())));
            }
        }
    }
    if command == Command::Smallball {
        if let Some(m) = params.get("method") {
            let m = m.as_str();
            if m != "exact" && m != "mc" {
                errors.push(err("method", format!("method must be exact or mc, got \"{m}\"")));
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let master_seed = params.get("seed").map(|v| v.as_u64()).unwrap_or(0);
    let out_dir = params
        .get("out")
        .map(|v| v.as_str().to_string())
        .unwrap_or_else(|| "anticonc-out".to_string());
    Ok(ExperimentConfig {
        command,
        params,
        master_seed,
        out_dir,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_smallball_config_fills_defaults() {
        let cfg = parse_config(
            Command::Smallball,
            Some(r#"{"a": [1, 1], "eps": [0.5], "family": "rademacher"}"#),
            &[],
        )
        .unwrap();
        assert_eq!(cfg.get("method").as_str(), "exact");
        assert_eq!(cfg.get("trials").as_u64(), 100_000);
        assert_eq!(cfg.master_seed, 0);
        assert_eq!(cfg.get("a").as_list(), &[1.0, 1.0]);
    }

    #[test]
    fn alpha_out_of_range_is_reported_by_name() {
        let errs = parse_config(
            Command::Lcd,
            Some(r#"{"a": [1.0], "alpha": 1.5}"#),
            &[],
        )
        .unwrap_err();
        assert!(errs
            .iter()
            .any(|e| e.key == "alpha" && e.message.contains("(0,1)")));
    }

    #[test]
    fn duplicate_key_is_detected() {
        let errs = parse_config(
            Command::Lcd,
            Some(r#"{"a": [1.0], "alpha": 0.2, "alpha": 0.3}"#),
            &[],
        )
        .unwrap_err();
        assert!(errs
            .iter()
            .any(|e| e.key == "alpha" && e.message.contains("duplicate")));
    }

    #[test]
    fn unknown_keys_are_rejected_not_ignored() {
        let errs = parse_config(
            Command::MatrixTail,
            Some(r#"{"n": 10, "bogus": 3}"#),
            &[],
        )
        .unwrap_err();
        assert!(errs.iter().any(|e| e.key == "bogus"));
    }

    #[test]
    fn all_errors_are_collected() {
        let errs = parse_config(
            Command::NormalLcd,
            Some(r#"{"alpha": 2.0, "beta": 0.9, "mystery": 1}"#),
            &[],
        )
        .unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
    }

    #[test]
    fn flags_override_file_values() {
        let cfg = parse_config(
            Command::MatrixTail,
            Some(r#"{"n": 10, "trials": 500}"#),
            &[("n".to_string(), "25".to_string())],
        )
        .unwrap();
        assert_eq!(cfg.get("n").as_u64(), 25);
        assert_eq!(cfg.get("trials").as_u64(), 500);
    }

    #[test]
    fn missing_required_key_is_reported() {
        let errs = parse_config(Command::Smallball, Some("{}"), &[]).unwrap_err();
        assert!(errs.iter().any(|e| e.key == "a"));
        assert!(errs.iter().any(|e| e.key == "eps"));
    }

    #[test]
    fn distribution_construction_from_flags() {
        let cfg = parse_config(
            Command::Smallball,
            None,
            &[
                ("a".to_string(), "1,2".to_string()),
                ("eps".to_string(), "0".to_string()),
                ("family".to_string(), "uniform".to_string()),
                ("atoms".to_string(), "-1:0.5,1:0.5".to_string()),
                ("shift".to_string(), "3".to_string()),
            ],
        )
        .unwrap();
        let d = cfg.distribution().unwrap();
        let support = d.finite_support_at(0).unwrap();
        let values: Vec<f64> = support.iter().map(|a| a.value).collect();
        assert_eq!(values, vec![2.0, 4.0]);
    }

    #[test]
    fn atoms_without_uniform_family_is_rejected() {
        let errs = parse_config(
            Command::Smallball,
            None,
            &[
                ("a".to_string(), "1".to_string()),
                ("eps".to_string(), "0".to_string()),
                ("atoms".to_string(), "0:0.5,1:0.5".to_string()),
            ],
        )
        .unwrap_err();
        assert!(errs.iter().any(|e| e.key == "atoms" && e.message.contains("uniform")));
    }

    #[test]
    fn echo_lines_are_sorted_and_complete() {
        let cfg = parse_config(
            Command::LargestSv,
            None,
            &[("n".to_string(), "16".to_string())],
        )
        .unwrap();
        let lines = cfg.echo_lines();
        assert_eq!(lines[0], "command=largest-sv");
        assert!(lines.contains(&"n=16".to_string()));
        assert!(lines.contains(&"trials=200".to_string()));
        let mut sorted = lines[1..].to_vec();
        sorted.sort();
        assert_eq!(&lines[1..], sorted.as_slice());
    }
}
