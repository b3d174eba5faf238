//! Persistence: profile and reduced-solution CSV/JSON codecs and the JSON
//! report documents. CSV numeric fields use the shortest decimal encoding
//! that round-trips, so write-then-read reproduces every value bitwise.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use domainwall::{
    cartesian_to_slowfast, hamiltonian_residual, BoundaryConditions, CartesianProfile,
    EquilibriumSpec, Mesh, ModelParams, RateStudy, ReducedSolution, ValidationReport,
};
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

pub const PROFILE_HEADER: &str = "x,u,v,du_dx,dv_dx,w1,w2,phi1,phi2,ham_residual";
pub const REDUCED_HEADER: &str = "x,phi1,phi2";

const PROFILE_META_KEYS: [&str; 6] = ["lambda", "coupling", "eps", "L", "n", "center"];

/// The ten per-node columns of a stored profile, in header order.
struct ProfileColumns {
    du_dx: Vec<f64>,
    dv_dx: Vec<f64>,
    w1: Vec<f64>,
    w2: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
    ham: Vec<f64>,
}

fn profile_columns(profile: &CartesianProfile) -> Result<ProfileColumns, CliError> {
    let sf = cartesian_to_slowfast(profile)?;
    let params = profile.params();
    let ham = profile
        .states()
        .iter()
        .map(|state| hamiltonian_residual(state, params))
        .collect();
    Ok(ProfileColumns {
        du_dx: profile.du_dx(),
        dv_dx: profile.dv_dx(),
        w1: sf.w1,
        w2: sf.w2,
        phi1: sf.phi1,
        phi2: sf.phi2,
        ham,
    })
}

/// Flat JSON image of a profile: the metadata block plus the ten columns.
#[derive(Serialize)]
struct ProfileDocument<'a> {
    lambda: f64,
    coupling: f64,
    eps: f64,
    half_length: f64,
    n: usize,
    center: f64,
    x: &'a [f64],
    u: &'a [f64],
    v: &'a [f64],
    du_dx: &'a [f64],
    dv_dx: &'a [f64],
    w1: &'a [f64],
    w2: &'a [f64],
    phi1: &'a [f64],
    phi2: &'a [f64],
    ham_residual: &'a [f64],
}

pub fn save_profile(
    path: &Path,
    profile: &CartesianProfile,
    format: Format,
) -> Result<(), CliError> {
    let cols = profile_columns(profile)?;
    let params = profile.params();
    let text = match format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!("# lambda = {}\n", params.lambda()));
            out.push_str(&format!("# coupling = {}\n", params.coupling()));
            out.push_str(&format!("# eps = {}\n", params.eps()));
            out.push_str(&format!("# L = {}\n", profile.mesh().half_length()));
            out.push_str(&format!("# n = {}\n", profile.mesh().len()));
            out.push_str(&format!("# center = {}\n", profile.center()));
            out.push_str(PROFILE_HEADER);
            out.push('\n');
            for i in 0..profile.mesh().len() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    profile.mesh().nodes()[i],
                    profile.u()[i],
                    profile.v()[i],
                    cols.du_dx[i],
                    cols.dv_dx[i],
                    cols.w1[i],
                    cols.w2[i],
                    cols.phi1[i],
                    cols.phi2[i],
                    cols.ham[i],
                ));
            }
            out
        }
        Format::Json => {
            let doc = ProfileDocument {
                lambda: params.lambda(),
                coupling: params.coupling(),
                eps: params.eps(),
                half_length: profile.mesh().half_length(),
                n: profile.mesh().len(),
                center: profile.center(),
                x: profile.mesh().nodes(),
                u: profile.u(),
                v: profile.v(),
                du_dx: &cols.du_dx,
                dv_dx: &cols.dv_dx,
                w1: &cols.w1,
                w2: &cols.w2,
                phi1: &cols.phi1,
                phi2: &cols.phi2,
                ham_residual: &cols.ham,
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            text
        }
    };
    write_text(path, &text)
}

/// Read a profile CSV written by [`save_profile`].
///
/// Only `(x, u, v)` and the metadata are authoritative: the derived columns
/// are recomputed on the next save, which reproduces them bitwise since they
/// are pure functions of the stored state.
pub fn load_profile(path: &Path) -> Result<CartesianProfile, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let malformed = |line: usize, message: String| CliError::MalformedFile {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut meta: BTreeMap<String, f64> = BTreeMap::new();
    let mut u = Vec::new();
    let mut v = Vec::new();
    let mut xs = Vec::new();
    let mut row_lines = Vec::new();
    let mut saw_header = false;
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if saw_header {
                return Err(malformed(line_no, "comment after the header".into()));
            }
            let (key, value) = rest
                .split_once('=')
                .ok_or_else(|| malformed(line_no, "metadata line without '='".into()))?;
            let key = key.trim();
            if !PROFILE_META_KEYS.contains(&key) {
                return Err(malformed(line_no, format!("unknown metadata key {key:?}")));
            }
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| malformed(line_no, format!("bad metadata value: {e}")))?;
            if meta.insert(key.to_string(), value).is_some() {
                return Err(malformed(line_no, format!("duplicate metadata key {key:?}")));
            }
            continue;
        }
        if !saw_header {
            if line != PROFILE_HEADER {
                return Err(CliError::SchemaMismatch {
                    path: path.to_path_buf(),
                    expected: PROFILE_HEADER.to_string(),
                    found: line.to_string(),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(malformed(
                line_no,
                format!("expected 10 fields, found {}", fields.len()),
            ));
        }
        let mut parsed = [0.0f64; 3];
        for (slot, field) in parsed.iter_mut().zip(&fields[..3]) {
            *slot = field
                .parse()
                .map_err(|e| malformed(line_no, format!("bad number {field:?}: {e}")))?;
        }
        // Derived columns still have to be numbers for the file to be sane.
        for field in &fields[3..] {
            field
                .parse::<f64>()
                .map_err(|e| malformed(line_no, format!("bad number {field:?}: {e}")))?;
        }
        xs.push(parsed[0]);
        u.push(parsed[1]);
        v.push(parsed[2]);
        row_lines.push(line_no);
    }
    if !saw_header {
        return Err(CliError::SchemaMismatch {
            path: path.to_path_buf(),
            expected: PROFILE_HEADER.to_string(),
            found: String::new(),
        });
    }
    for &key in &PROFILE_META_KEYS {
        if !meta.contains_key(key) {
            return Err(malformed(1, format!("missing metadata key {key:?}")));
        }
    }

    let n = meta["n"] as usize;
    if meta["n"].fract() != 0.0 || n != xs.len() {
        return Err(malformed(
            1,
            format!("metadata n = {} but file has {} rows", meta["n"], xs.len()),
        ));
    }
    let params = ModelParams::from_raw_parts(meta["lambda"], meta["coupling"], meta["eps"])?;
    let mesh = Mesh::uniform(meta["L"], n)?;
    if let Some(i) = (0..n).find(|&i| mesh.nodes()[i] != xs[i]) {
        return Err(malformed(
            row_lines[i],
            format!(
                "x = {} is not node {i} of the uniform mesh (expected {})",
                xs[i],
                mesh.nodes()[i]
            ),
        ));
    }
    let bc = BoundaryConditions {
        left: (u[0], v[0]),
        right: (u[n - 1], v[n - 1]),
    };
    Ok(CartesianProfile::new(mesh, u, v, params, bc)?)
}

#[derive(Serialize)]
struct ReducedDocument<'a> {
    lambda: f64,
    half_length: f64,
    n: usize,
    x: &'a [f64],
    phi1: &'a [f64],
    phi2: &'a [f64],
}

pub fn save_reduced(
    path: &Path,
    reduced: &ReducedSolution,
    format: Format,
) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!("# lambda = {}\n", reduced.lambda()));
            out.push_str(&format!("# L = {}\n", reduced.half_length()));
            out.push_str(&format!("# n = {}\n", reduced.x().len()));
            out.push_str(REDUCED_HEADER);
            out.push('\n');
            for i in 0..reduced.x().len() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    reduced.x()[i],
                    reduced.phi1()[i],
                    reduced.phi2()[i],
                ));
            }
            out
        }
        Format::Json => {
            let doc = ReducedDocument {
                lambda: reduced.lambda(),
                half_length: reduced.half_length(),
                n: reduced.x().len(),
                x: reduced.x(),
                phi1: reduced.phi1(),
                phi2: reduced.phi2(),
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            text
        }
    };
    write_text(path, &text)
}

/// A validation report together with the parameters it was measured at.
#[derive(Serialize)]
pub struct ReportDocument {
    pub lambda: f64,
    pub coupling: f64,
    pub eps: f64,
    #[serde(flatten)]
    pub report: ValidationReport,
}

impl ReportDocument {
    pub fn new(profile: &CartesianProfile, report: ValidationReport) -> Self {
        ReportDocument {
            lambda: profile.params().lambda(),
            coupling: profile.params().coupling(),
            eps: profile.params().eps(),
            report,
        }
    }
}

/// Eigendata document for the spectrum command.
#[derive(Serialize)]
pub struct SpectrumDocument {
    pub lambda: f64,
    pub coupling: f64,
    pub eps: f64,
    #[serde(flatten)]
    pub spec: EquilibriumSpec,
}

/// Study document for the sweep command.
#[derive(Serialize)]
pub struct StudyDocument {
    #[serde(flatten)]
    pub study: RateStudy,
    /// Profile file written for each rung, aligned with `eps_list`.
    pub profiles: Vec<PathBuf>,
}

pub fn render_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(path, &render_json(value)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let about = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(about)?;
    }
    fs::write(path, text).map_err(about)
}
