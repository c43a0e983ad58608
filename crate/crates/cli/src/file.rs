//! JSON system files. Matrices are stored as the row-major lower triangle
//! of `[re, im]` pairs; a full row-major matrix is also accepted on input.

use cfs_core::linalg::{c64, hermitian_deviation, CMatrix};
use cfs_core::operator::{Coordinates, SystemMetadata, SELF_ADJOINT_REL};
use cfs_core::{CausalFermionSystem, OperatorPoint, SystemPoint, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::{load_error, CliError, CliResult};

pub const FORMAT_VERSION: &str = "cfs-system/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub version: String,
    pub n: usize,
    pub f: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub metadata: SystemMetadata,
    pub points: Vec<PointRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRecord {
    pub id: String,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Coordinates>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub component: usize,
    pub matrix: Vec<[f64; 2]>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn lower_triangle(m: &CMatrix) -> Vec<[f64; 2]> {
    let f = m.nrows();
    let mut out = Vec::with_capacity(f * (f + 1) / 2);
    for i in 0..f {
        for j in 0..=i {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

impl SystemFile {
    pub fn from_system(system: &CausalFermionSystem) -> Self {
        Self {
            version: FORMAT_VERSION.into(),
            n: system.n(),
            f: system.f(),
            tolerances: *system.tolerances(),
            metadata: system.metadata.clone(),
            points: system
                .points()
                .iter()
                .map(|p| PointRecord {
                    id: p.id.clone(),
                    weight: p.weight,
                    coords: p.coords,
                    component: p.component,
                    matrix: lower_triangle(p.operator.matrix()),
                })
                .collect(),
        }
    }

    /// Parses the text; `source_name` labels error messages.
    pub fn parse(text: &str, source_name: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Parse {
                source_name: source_name.into(),
                message: format!(
                    "at `{path}` (line {}, column {}): {inner}",
                    inner.line(),
                    inner.column()
                ),
            }
        })
    }

    /// Compact JSON with one point per line. Numbers use the shortest
    /// representation that parses back to the same double.
    pub fn emit(&self) -> String {
        let mut s = String::from("{\n");
        s += &format!("  \"version\": {},\n", json(&self.version));
        s += &format!("  \"n\": {},\n  \"f\": {},\n", self.n, self.f);
        s += &format!("  \"tolerances\": {},\n", json(&self.tolerances));
        s += &format!("  \"metadata\": {},\n", json(&self.metadata));
        s += "  \"points\": [\n";
        for (k, p) in self.points.iter().enumerate() {
            s += "    ";
            s += &json(p);
            s += if k + 1 < self.points.len() {
                ",\n"
            } else {
                "\n"
            };
        }
        s += "  ]\n}\n";
        s
    }

    pub fn to_system(&self) -> CliResult<CausalFermionSystem> {
        if self.version != FORMAT_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported format version `{}` (expected `{FORMAT_VERSION}`)",
                self.version
            )));
        }
        let f = self.f;
        let mut points = Vec::with_capacity(self.points.len());
        for (k, p) in self.points.iter().enumerate() {
            let field = format!("points[{k}] (`{}`)", p.id);
            let m = hermitian_completion(&p.matrix, f)
                .map_err(|m| CliError::Validation(format!("{field}: {m}")))?;
            let op = OperatorPoint::new(m, &self.tolerances)
                .map_err(|e| CliError::Validation(format!("{field}: {e}")))?;
            let mut sp = SystemPoint::new(p.id.clone(), p.weight, op);
            sp.coords = p.coords;
            sp.component = p.component;
            points.push(sp);
        }
        let mut seen = std::collections::HashSet::new();
        for p in &points {
            if !seen.insert(p.id.as_str()) {
                return Err(CliError::Validation(format!(
                    "duplicate point id `{}`",
                    p.id
                )));
            }
        }
        Ok(CausalFermionSystem::new(self.n, points, self.tolerances)
            .map_err(load_error)?
            .with_metadata(self.metadata.clone()))
    }
}

/// Builds the matrix from a lower triangle (`f (f + 1) / 2` entries) or a
/// full row-major matrix (`f^2` entries), checking self-adjointness.
fn hermitian_completion(entries: &[[f64; 2]], f: usize) -> Result<CMatrix, String> {
    if entries.iter().flatten().any(|v| !v.is_finite()) {
        return Err("non-finite matrix entry".into());
    }
    let mut m = CMatrix::zeros(f, f);
    if entries.len() == f * (f + 1) / 2 {
        let mut k = 0;
        for i in 0..f {
            for j in 0..=i {
                let z = c64(entries[k][0], entries[k][1]);
                m[(i, j)] = z;
                if i != j {
                    m[(j, i)] = z.conj();
                }
                k += 1;
            }
        }
    } else if entries.len() == f * f {
        for (k, e) in entries.iter().enumerate() {
            m[(k / f, k % f)] = c64(e[0], e[1]);
        }
    } else {
        return Err(format!(
            "matrix has {} entries; expected {} (lower triangle) or {} (full) for f = {f}",
            entries.len(),
            f * (f + 1) / 2,
            f * f
        ));
    }
    let dev = hermitian_deviation(&m);
    if dev > SELF_ADJOINT_REL {
        return Err(format!(
            "matrix is not self-adjoint (relative deviation {dev:.3e})"
        ));
    }
    Ok(m)
}

pub fn read_system(path: &str) -> CliResult<CausalFermionSystem> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.into(),
        message: e.to_string(),
    })?;
    SystemFile::parse(&text, path)?.to_system()
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}
