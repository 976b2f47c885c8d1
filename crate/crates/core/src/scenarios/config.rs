//! Line-based scenario files.
//!
//! ```text
//! name = harmonic_focus
//! [grid]
//! dim = 1
//! points = 2048
//! half_width = 16
//! [potential]
//! kind = canonical          # or matrix
//! signature = harmonic      # free | harmonic | repulsive | -1 | 0 | 1, one per axis or broadcast
//! omega = 1
//! [nonlinearity]
//! lambda = -1
//! sigma = 2
//! [initial]
//! kind = gaussian           # gaussian | ground_state | concentrating
//! amplitude = 1
//! [time]
//! t_end = 1
//! ```
//!
//! Keys outside any section are top-level; list values are comma separated;
//! matrix rows are separated by `;`.

use std::collections::HashSet;
use std::path::PathBuf;

use crate::error::{NlspError, Result};
use crate::potential::Signature;
use crate::solver::Splitting;

pub const SECTIONS: [&str; 7] = [
    "grid",
    "potential",
    "nonlinearity",
    "initial",
    "time",
    "observables",
    "output",
];

const REQUIRED_SECTIONS: [&str; 4] = ["potential", "nonlinearity", "initial", "time"];

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    /// One entry per axis, or a single entry for all axes.
    pub points: Vec<usize>,
    pub half_width: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Canonical {
        signature: Vec<Signature>,
        omega: Vec<f64>,
        linear: Vec<f64>,
        constant: f64,
    },
    /// `V(x) = x^T A x + b . x + c`.
    Matrix {
        matrix: Vec<Vec<f64>>,
        linear: Vec<f64>,
        constant: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonlinearitySpec {
    pub lambda: f64,
    pub sigma: f64,
    /// Multiply `lambda` by `eps^{n sigma}` (the critical semiclassical scale).
    pub critical_scaling: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatumKind {
    Gaussian,
    GroundState,
    /// `eps^{-n/2} phi(x / eps)` with `phi` described by `profile`.
    Concentrating,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Gaussian,
    GroundState,
}

/// `amplitude exp(-|x - center|^2 / (2 width^2)) exp(i chirp |x|^2 / (2 eps)) exp(i momentum . x / eps)`
/// for Gaussians; the ground state takes the amplitude, center and phases.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialSpec {
    pub kind: DatumKind,
    pub profile: ProfileKind,
    pub epsilon: f64,
    pub amplitude: f64,
    pub width: f64,
    pub center: Vec<f64>,
    pub chirp: f64,
    pub momentum: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSpec {
    pub t_end: f64,
    pub cadence: f64,
    pub dt: f64,
    pub dt_min: Option<f64>,
    pub adaptive: bool,
    pub splitting: Splitting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    AvronHerbst,
    HarmonicLens,
    RepulsiveLens,
}

impl OracleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleKind::AvronHerbst => "avron_herbst",
            OracleKind::HarmonicLens => "harmonic_lens",
            OracleKind::RepulsiveLens => "repulsive_lens",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObservablesSpec {
    pub lp: Vec<f64>,
    pub criteria: bool,
    pub scattering: bool,
    pub scattering_tolerance: f64,
    pub oracle: Option<OracleKind>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub grid: GridSpec,
    pub potential: PotentialSpec,
    pub nonlinearity: NonlinearitySpec,
    pub initial: InitialSpec,
    pub time: TimeSpec,
    pub observables: ObservablesSpec,
    pub output: OutputSpec,
}

/// One `key = value` line.
#[derive(Clone, Debug, PartialEq)]
struct Entry {
    section: Option<String>,
    key: String,
    value: String,
    line: usize,
}

fn parse_error(line: usize, message: impl Into<String>) -> NlspError {
    NlspError::Parse {
        line,
        message: message.into(),
    }
}

/// Section names with the line that opened them.
type SectionLines = Vec<(String, usize)>;

fn entries(text: &str) -> Result<(Vec<Entry>, SectionLines)> {
    let mut out: Vec<Entry> = Vec::new();
    let mut sections: SectionLines = Vec::new();
    let mut current: Option<String> = None;
    let mut seen: HashSet<(Option<String>, String)> = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_error(line, format!("malformed section header `{content}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(parse_error(line, format!("unknown section [{name}]")));
            }
            if sections.iter().any(|(s, _)| s == name) {
                return Err(parse_error(line, format!("duplicate section [{name}]")));
            }
            sections.push((name.to_string(), line));
            current = Some(name.to_string());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(parse_error(line, "empty key"));
        }
        if !seen.insert((current.clone(), key.clone())) {
            return Err(parse_error(line, format!("duplicate key `{key}`")));
        }
        out.push(Entry {
            section: current.clone(),
            key,
            value,
            line,
        });
    }
    Ok((out, sections))
}

fn number(e: &Entry) -> Result<f64> {
    let v: f64 = e
        .value
        .parse()
        .map_err(|_| parse_error(e.line, format!("`{}`: malformed number `{}`", e.key, e.value)))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_error(e.line, format!("`{}`: non-finite value", e.key)))
    }
}

fn count(e: &Entry) -> Result<usize> {
    e.value
        .parse()
        .map_err(|_| parse_error(e.line, format!("`{}`: expected a non-negative integer, got `{}`", e.key, e.value)))
}

fn list<U>(e: &Entry, item: impl Fn(&str) -> Option<U>) -> Result<Vec<U>> {
    e.value
        .split(',')
        .map(|s| {
            let s = s.trim();
            item(s).ok_or_else(|| parse_error(e.line, format!("`{}`: malformed entry `{s}`", e.key)))
        })
        .collect()
}

fn finite(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn numbers(e: &Entry) -> Result<Vec<f64>> {
    list(e, finite)
}

fn flag(e: &Entry) -> Result<bool> {
    match e.value.as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        v => Err(parse_error(e.line, format!("`{}`: expected true or false, got `{v}`", e.key))),
    }
}

fn signature(s: &str) -> Option<Signature> {
    match s {
        "free" | "0" => Some(Signature::Free),
        "harmonic" | "1" | "+1" => Some(Signature::Harmonic),
        "repulsive" | "-1" => Some(Signature::Repulsive),
        _ => None,
    }
}

fn signature_name(s: Signature) -> &'static str {
    match s {
        Signature::Free => "free",
        Signature::Harmonic => "harmonic",
        Signature::Repulsive => "repulsive",
    }
}

fn matrix(e: &Entry) -> Result<Vec<Vec<f64>>> {
    e.value
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|s| {
                    finite(s.trim()).ok_or_else(|| parse_error(e.line, format!("`matrix`: malformed entry `{}`", s.trim())))
                })
                .collect()
        })
        .collect()
}

fn unknown(e: &Entry) -> NlspError {
    let place = e.section.as_deref().map_or("top level".to_string(), |s| format!("[{s}]"));
    parse_error(e.line, format!("unknown key `{}` in {place}", e.key))
}

/// Line number of every key, for validation messages.
#[derive(Default)]
struct Lines(Vec<(String, usize)>);

impl Lines {
    fn of(&self, path: &str) -> usize {
        self.0.iter().find(|(p, _)| p == path).map_or(0, |(_, l)| *l)
    }
}

/// Parse and validate a scenario file.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    parse_scenario_with(text, &[])
}

/// Parse a scenario file after replacing (or adding) `section.key` values.
/// Top-level keys are addressed without a section prefix.
pub fn parse_scenario_with(text: &str, overrides: &[(String, String)]) -> Result<ScenarioSpec> {
    let (mut list, mut sections) = entries(text)?;
    for (path, value) in overrides {
        let (section, key) = match path.split_once('.') {
            Some((s, k)) => (Some(s.to_string()), k.to_string()),
            None => (None, path.clone()),
        };
        if let Some(s) = &section {
            if !SECTIONS.contains(&s.as_str()) {
                return Err(parse_error(0, format!("override `{path}`: unknown section [{s}]")));
            }
            if !sections.iter().any(|(n, _)| n == s) {
                sections.push((s.clone(), 0));
            }
        }
        match list.iter_mut().find(|e| e.section == section && e.key == key) {
            Some(e) => e.value = value.clone(),
            None => list.push(Entry {
                section,
                key,
                value: value.clone(),
                line: 0,
            }),
        }
    }
    for required in REQUIRED_SECTIONS {
        if !sections.iter().any(|(s, _)| s == required) {
            return Err(parse_error(0, format!("missing section [{required}]")));
        }
    }
    interpret(&list)
}

fn interpret(entries: &[Entry]) -> Result<ScenarioSpec> {
    let mut lines = Lines::default();
    let mut name = "scenario".to_string();

    let mut dim = 1usize;
    let mut points: Option<Vec<usize>> = None;
    let mut half_width = vec![16.0];

    let mut pot_kind = "canonical".to_string();
    let mut sig: Vec<Signature> = vec![Signature::Free];
    let mut omega: Vec<f64> = vec![];
    let mut mat: Option<Vec<Vec<f64>>> = None;
    let mut linear: Vec<f64> = vec![];
    let mut constant = 0.0;

    let mut lambda = 0.0;
    let mut sigma = 1.0;
    let mut critical_scaling = false;

    let mut kind = DatumKind::Gaussian;
    let mut profile = ProfileKind::Gaussian;
    let mut epsilon = 1.0;
    let mut amplitude = 1.0;
    let mut width = 1.0;
    let mut center: Vec<f64> = vec![];
    let mut chirp = 0.0;
    let mut momentum: Vec<f64> = vec![];

    let mut t_end: Option<f64> = None;
    let mut cadence: Option<f64> = None;
    let mut dt = 1e-3;
    let mut dt_min = None;
    let mut adaptive = true;
    let mut splitting = Splitting::PotentialKinetic;

    let mut lp: Vec<f64> = vec![];
    let mut criteria = true;
    let mut scattering = false;
    let mut scattering_tolerance = crate::observables::DEFAULT_SCATTERING_TOLERANCE;
    let mut oracle = None;

    let mut dir = PathBuf::from(".");

    for e in entries {
        let path = match &e.section {
            Some(s) => format!("{s}.{}", e.key),
            None => e.key.clone(),
        };
        lines.0.push((path.clone(), e.line));
        match path.as_str() {
            "name" => {
                if e.value.is_empty() || e.value.contains(['/', '\\']) {
                    return Err(parse_error(e.line, "name must be non-empty and contain no path separators"));
                }
                name = e.value.clone();
            }
            "grid.dim" => dim = count(e)?,
            "grid.points" => points = Some(list_counts(e)?),
            "grid.half_width" => half_width = numbers(e)?,
            "potential.kind" => match e.value.as_str() {
                "canonical" | "matrix" => pot_kind = e.value.clone(),
                v => return Err(parse_error(e.line, format!("unknown potential kind `{v}`"))),
            },
            "potential.signature" => sig = list(e, signature)?,
            "potential.omega" => omega = numbers(e)?,
            "potential.matrix" => mat = Some(matrix(e)?),
            "potential.linear" => linear = numbers(e)?,
            "potential.constant" => constant = number(e)?,
            "nonlinearity.lambda" => lambda = number(e)?,
            "nonlinearity.sigma" => sigma = number(e)?,
            "nonlinearity.critical_scaling" => critical_scaling = flag(e)?,
            "initial.kind" => {
                kind = match e.value.as_str() {
                    "gaussian" => DatumKind::Gaussian,
                    "ground_state" => DatumKind::GroundState,
                    "concentrating" => DatumKind::Concentrating,
                    v => return Err(parse_error(e.line, format!("unknown datum kind `{v}`"))),
                }
            }
            "initial.profile" => {
                profile = match e.value.as_str() {
                    "gaussian" => ProfileKind::Gaussian,
                    "ground_state" => ProfileKind::GroundState,
                    v => return Err(parse_error(e.line, format!("unknown profile `{v}`"))),
                }
            }
            "initial.epsilon" => epsilon = number(e)?,
            "initial.amplitude" => amplitude = number(e)?,
            "initial.width" => width = number(e)?,
            "initial.center" => center = numbers(e)?,
            "initial.chirp" => chirp = number(e)?,
            "initial.momentum" => momentum = numbers(e)?,
            "time.t_end" => t_end = Some(number(e)?),
            "time.cadence" => cadence = Some(number(e)?),
            "time.dt" => dt = number(e)?,
            "time.dt_min" => dt_min = Some(number(e)?),
            "time.adaptive" => adaptive = flag(e)?,
            "time.splitting" => {
                splitting = match e.value.as_str() {
                    "potential_kinetic" => Splitting::PotentialKinetic,
                    "exact_linear" => Splitting::ExactLinear,
                    v => return Err(parse_error(e.line, format!("unknown splitting `{v}`"))),
                }
            }
            "observables.lp" => lp = if e.value.is_empty() { vec![] } else { numbers(e)? },
            "observables.criteria" => criteria = flag(e)?,
            "observables.scattering" => scattering = flag(e)?,
            "observables.scattering_tolerance" => scattering_tolerance = number(e)?,
            "observables.oracle" => {
                oracle = match e.value.as_str() {
                    "none" => None,
                    "avron_herbst" => Some(OracleKind::AvronHerbst),
                    "harmonic_lens" => Some(OracleKind::HarmonicLens),
                    "repulsive_lens" => Some(OracleKind::RepulsiveLens),
                    v => return Err(parse_error(e.line, format!("unknown oracle `{v}`"))),
                }
            }
            "output.dir" => dir = PathBuf::from(&e.value),
            _ => return Err(unknown(e)),
        }
    }

    let t_end = t_end.ok_or_else(|| parse_error(lines.of("time.t_end"), "[time] needs `t_end`"))?;
    let default_points = match dim {
        1 => 2048,
        2 => 256,
        _ => 64,
    };
    let potential = if pot_kind == "matrix" {
        let matrix = mat.ok_or_else(|| parse_error(lines.of("potential.kind"), "matrix potential needs `matrix`"))?;
        PotentialSpec::Matrix {
            matrix,
            linear: if linear.is_empty() { vec![0.0; dim] } else { linear },
            constant,
        }
    } else {
        if mat.is_some() {
            return Err(parse_error(lines.of("potential.matrix"), "`matrix` needs `kind = matrix`"));
        }
        let omega = if omega.is_empty() {
            vec![if sig.iter().all(|&s| s == Signature::Free) { 0.0 } else { 1.0 }]
        } else {
            omega
        };
        PotentialSpec::Canonical {
            signature: sig,
            omega,
            linear: if linear.is_empty() { vec![0.0; dim] } else { linear },
            constant,
        }
    };
    let spec = ScenarioSpec {
        name,
        grid: GridSpec {
            dim,
            points: points.unwrap_or_else(|| vec![default_points]),
            half_width,
        },
        potential,
        nonlinearity: NonlinearitySpec {
            lambda,
            sigma,
            critical_scaling,
        },
        initial: InitialSpec {
            kind,
            profile,
            epsilon,
            amplitude,
            width,
            center: if center.is_empty() { vec![0.0; dim] } else { center },
            chirp,
            momentum: if momentum.is_empty() { vec![0.0; dim] } else { momentum },
        },
        time: TimeSpec {
            t_end,
            cadence: cadence.unwrap_or(if t_end > 0.0 { t_end / 10.0 } else { 1.0 }),
            dt,
            dt_min,
            adaptive,
            splitting,
        },
        observables: ObservablesSpec {
            lp,
            criteria,
            scattering,
            scattering_tolerance,
            oracle,
        },
        output: OutputSpec { dir },
    };
    validate(&spec, &lines)?;
    Ok(spec)
}

fn list_counts(e: &Entry) -> Result<Vec<usize>> {
    list(e, |s| s.parse::<usize>().ok())
}

fn broadcast<U: Copy>(v: &[U], dim: usize) -> Option<Vec<U>> {
    match v.len() {
        1 => Some(vec![v[0]; dim]),
        n if n == dim => Some(v.to_vec()),
        _ => None,
    }
}

fn validate(spec: &ScenarioSpec, lines: &Lines) -> Result<()> {
    let dim = spec.grid.dim;
    let at = |path: &str, message: String| parse_error(lines.of(path), message);
    if !(1..=crate::grid::MAX_DIM).contains(&dim) {
        return Err(at("grid.dim", format!("dim must be 1, 2 or 3, got {dim}")));
    }
    if broadcast(&spec.grid.points, dim).is_none() {
        return Err(at("grid.points", format!("`points` needs 1 or {dim} entries")));
    }
    if broadcast(&spec.grid.half_width, dim).is_none() {
        return Err(at("grid.half_width", format!("`half_width` needs 1 or {dim} entries")));
    }
    spec.grid_axes().and_then(|axes| crate::grid::Grid::from_axes(&axes)).map_err(|e| {
        at("grid.points", e.to_string())
    })?;
    spec.potential_parts().map_err(|e| at("potential.kind", e.to_string()))?;
    let n = dim as f64;
    let nl = &spec.nonlinearity;
    if !(spec.initial.epsilon > 0.0) {
        return Err(at("initial.epsilon", "epsilon must be positive".into()));
    }
    crate::solver::Nonlinearity::new(nl.lambda, nl.sigma, dim).map_err(|e| at("nonlinearity.sigma", e.to_string()))?;
    if dim >= 3 && nl.sigma >= 2.0 / (n - 2.0) && nl.lambda != 0.0 {
        return Err(at("nonlinearity.sigma", format!("sigma must stay below 2/(n-2) = {}", 2.0 / (n - 2.0))));
    }
    let init = &spec.initial;
    if init.center.len() != dim {
        return Err(at("initial.center", format!("`center` needs {dim} entries")));
    }
    if init.momentum.len() != dim {
        return Err(at("initial.momentum", format!("`momentum` needs {dim} entries")));
    }
    if !(init.width > 0.0) {
        return Err(at("initial.width", "width must be positive".into()));
    }
    let uses_ground_state = init.kind == DatumKind::GroundState
        || (init.kind == DatumKind::Concentrating && init.profile == ProfileKind::GroundState);
    if uses_ground_state && !(nl.lambda < 0.0) {
        return Err(at("initial.kind", "the ground-state datum needs lambda < 0".into()));
    }
    let t = &spec.time;
    if !(t.t_end >= 0.0) {
        return Err(at("time.t_end", "t_end must be non-negative".into()));
    }
    if !(t.cadence > 0.0) {
        return Err(at("time.cadence", "cadence must be positive".into()));
    }
    if !(t.dt > 0.0) {
        return Err(at("time.dt", "dt must be positive".into()));
    }
    if let Some(m) = t.dt_min {
        if !(m > 0.0 && m < t.dt) {
            return Err(at("time.dt_min", "dt_min must lie in (0, dt)".into()));
        }
    }
    let obs = &spec.observables;
    if obs.lp.iter().any(|&p| !(p >= 1.0)) {
        return Err(at("observables.lp", "Lebesgue exponents must be at least 1".into()));
    }
    if !(obs.scattering_tolerance > 0.0) {
        return Err(at("observables.scattering_tolerance", "tolerance must be positive".into()));
    }
    Ok(())
}

impl ScenarioSpec {
    /// `(points, half_width)` per axis.
    pub fn grid_axes(&self) -> Result<Vec<(usize, f64)>> {
        let dim = self.grid.dim;
        let p = broadcast(&self.grid.points, dim)
            .ok_or_else(|| NlspError::Domain("points do not match dim".into()))?;
        let l = broadcast(&self.grid.half_width, dim)
            .ok_or_else(|| NlspError::Domain("half_width does not match dim".into()))?;
        Ok(p.into_iter().zip(l).collect())
    }

    /// `(A, b, c)` for matrix potentials, or the per-axis canonical data.
    pub(crate) fn potential_parts(&self) -> Result<PotentialParts> {
        let dim = self.grid.dim;
        match &self.potential {
            PotentialSpec::Canonical {
                signature,
                omega,
                linear,
                constant,
            } => {
                let s = broadcast(signature, dim)
                    .ok_or_else(|| NlspError::Domain(format!("`signature` needs 1 or {dim} entries")))?;
                let w = broadcast(omega, dim)
                    .ok_or_else(|| NlspError::Domain(format!("`omega` needs 1 or {dim} entries")))?;
                if linear.len() != dim {
                    return Err(NlspError::Domain(format!("`linear` needs {dim} entries")));
                }
                let axes = s
                    .into_iter()
                    .zip(w)
                    .map(|(s, w)| match s {
                        Signature::Free => Ok(crate::potential::AxisPotential::free()),
                        _ if !(w > 0.0) => Err(NlspError::Domain("omega must be positive on non-free axes".into())),
                        Signature::Harmonic => Ok(crate::potential::AxisPotential::harmonic(w)),
                        Signature::Repulsive => Ok(crate::potential::AxisPotential::repulsive(w)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let pot = crate::potential::QuadraticPotential::new(axes, linear.clone(), *constant)?;
                Ok(PotentialParts::Canonical(pot))
            }
            PotentialSpec::Matrix {
                matrix,
                linear,
                constant,
            } => {
                if matrix.len() != dim || linear.len() != dim {
                    return Err(NlspError::Domain(format!("`matrix` and `linear` need dimension {dim}")));
                }
                let form = crate::potential::canonicalize(matrix, linear, *constant)?;
                Ok(PotentialParts::Matrix(form))
            }
        }
    }

    /// Canonical text form; parsing it gives back an equal spec.
    pub fn to_text(&self) -> String {
        let nums = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        s.push_str(&format!("name = {}\n", self.name));
        s.push_str("\n[grid]\n");
        s.push_str(&format!("dim = {}\n", self.grid.dim));
        s.push_str(&format!(
            "points = {}\n",
            self.grid.points.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
        ));
        s.push_str(&format!("half_width = {}\n", nums(&self.grid.half_width)));
        s.push_str("\n[potential]\n");
        match &self.potential {
            PotentialSpec::Canonical {
                signature,
                omega,
                linear,
                constant,
            } => {
                s.push_str("kind = canonical\n");
                s.push_str(&format!(
                    "signature = {}\n",
                    signature.iter().map(|&g| signature_name(g)).collect::<Vec<_>>().join(", ")
                ));
                s.push_str(&format!("omega = {}\n", nums(omega)));
                s.push_str(&format!("linear = {}\n", nums(linear)));
                s.push_str(&format!("constant = {constant:?}\n"));
            }
            PotentialSpec::Matrix {
                matrix,
                linear,
                constant,
            } => {
                s.push_str("kind = matrix\n");
                let rows: Vec<String> = matrix.iter().map(|r| nums(r)).collect();
                s.push_str(&format!("matrix = {}\n", rows.join("; ")));
                s.push_str(&format!("linear = {}\n", nums(linear)));
                s.push_str(&format!("constant = {constant:?}\n"));
            }
        }
        let nl = &self.nonlinearity;
        s.push_str("\n[nonlinearity]\n");
        s.push_str(&format!("lambda = {:?}\nsigma = {:?}\n", nl.lambda, nl.sigma));
        s.push_str(&format!("critical_scaling = {}\n", nl.critical_scaling));
        let i = &self.initial;
        s.push_str("\n[initial]\n");
        let kind = match i.kind {
            DatumKind::Gaussian => "gaussian",
            DatumKind::GroundState => "ground_state",
            DatumKind::Concentrating => "concentrating",
        };
        let profile = match i.profile {
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::GroundState => "ground_state",
        };
        s.push_str(&format!("kind = {kind}\nprofile = {profile}\n"));
        s.push_str(&format!("epsilon = {:?}\namplitude = {:?}\nwidth = {:?}\n", i.epsilon, i.amplitude, i.width));
        s.push_str(&format!("center = {}\nchirp = {:?}\nmomentum = {}\n", nums(&i.center), i.chirp, nums(&i.momentum)));
        let t = &self.time;
        s.push_str("\n[time]\n");
        s.push_str(&format!("t_end = {:?}\ncadence = {:?}\ndt = {:?}\n", t.t_end, t.cadence, t.dt));
        if let Some(m) = t.dt_min {
            s.push_str(&format!("dt_min = {m:?}\n"));
        }
        s.push_str(&format!("adaptive = {}\n", t.adaptive));
        let splitting = match t.splitting {
            Splitting::PotentialKinetic => "potential_kinetic",
            Splitting::ExactLinear => "exact_linear",
        };
        s.push_str(&format!("splitting = {splitting}\n"));
        let o = &self.observables;
        s.push_str("\n[observables]\n");
        s.push_str(&format!("lp = {}\n", nums(&o.lp)));
        s.push_str(&format!("criteria = {}\nscattering = {}\n", o.criteria, o.scattering));
        s.push_str(&format!("scattering_tolerance = {:?}\n", o.scattering_tolerance));
        s.push_str(&format!("oracle = {}\n", o.oracle.map_or("none", |k| k.as_str())));
        s.push_str("\n[output]\n");
        s.push_str(&format!("dir = {}\n", self.output.dir.display()));
        s
    }
}

pub(crate) enum PotentialParts {
    Canonical(crate::potential::QuadraticPotential<f64>),
    Matrix(crate::potential::CanonicalForm<f64>),
}
