//! JSON instance and report files.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row lists. Every
//! object rejects unknown fields.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{CStarAlgebra, LinearMap, MapKind};
use crate::corep::GroupoidRep;
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, HaarMode, HaarSystem};
use crate::kernel::{c, CMatrix, CVector};
use crate::quantum::{Legs, QuantumGroupoidData};
use crate::report::{Check, VerificationReport};
use crate::verify::{verify_bundle, verify_groupoid, verify_representation};

pub const SCHEMA_VERSION: u32 = 1;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Groupoid,
    QuantumBundle,
    Representation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub kind: InstanceKind,
    pub payload: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowEntry {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidPayload {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowEntry>,
    pub compose: Vec<[String; 3]>,
    pub identities: BTreeMap<String, String>,
    pub inverses: BTreeMap<String, String>,
    /// Haar weights per object, in object order. Normalized weights when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub haar_weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundlePayload {
    #[serde(rename = "blocksA")]
    pub blocks_a: Vec<usize>,
    #[serde(rename = "blocksB")]
    pub blocks_b: Vec<usize>,
    pub eta_s: Matrix,
    pub eta_t: Matrix,
    #[serde(rename = "S")]
    pub s: Matrix,
    #[serde(rename = "P")]
    pub p: Matrix,
    pub delta: BTreeMap<String, Vec<[Vec<Complex>; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationPayload {
    pub groupoid: GroupoidPayload,
    pub fiber_dims: BTreeMap<String, usize>,
    #[serde(rename = "U")]
    pub u: BTreeMap<String, Matrix>,
}

/// A parsed instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Groupoid { groupoid: FiniteGroupoid, haar: HaarSystem },
    Bundle(QuantumGroupoidData),
    Representation { rep: GroupoidRep, haar: HaarSystem },
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Groupoid { .. } => InstanceKind::Groupoid,
            Instance::Bundle(_) => InstanceKind::QuantumBundle,
            Instance::Representation { .. } => InstanceKind::Representation,
        }
    }

    pub fn verify(&self, tol: f64) -> VerificationReport {
        match self {
            Instance::Groupoid { groupoid, haar } => verify_groupoid(groupoid, haar, tol),
            Instance::Bundle(q) => verify_bundle(q, tol),
            Instance::Representation { rep, haar } => verify_representation(rep, haar, tol),
        }
    }

    pub fn to_file(&self) -> InstanceFile {
        let payload = match self {
            Instance::Groupoid { groupoid, haar } => to_value(&groupoid_payload(groupoid, haar)),
            Instance::Bundle(q) => to_value(&bundle_payload(q)),
            Instance::Representation { rep, haar } => to_value(&representation_payload(rep, haar)),
        };
        InstanceFile { schema_version: SCHEMA_VERSION, kind: self.kind(), payload }
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let payload = file.payload.clone();
        match file.kind {
            InstanceKind::Groupoid => {
                let p: GroupoidPayload = from_value(payload)?;
                let (groupoid, haar) = parse_groupoid(&p)?;
                Ok(Instance::Groupoid { groupoid, haar })
            }
            InstanceKind::QuantumBundle => Ok(Instance::Bundle(parse_bundle(&from_value(payload)?)?)),
            InstanceKind::Representation => {
                let p: RepresentationPayload = from_value(payload)?;
                let (rep, haar) = parse_representation(&p)?;
                Ok(Instance::Representation { rep, haar })
            }
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> serde_json::Value {
    serde_json::to_value(t).expect("payload serializes")
}

fn from_value<T: for<'de> Deserialize<'de>>(v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_str(s: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    Instance::from_file(&file)
}

pub fn emit_string(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&instance.to_file()).expect("instance serializes");
    s.push('\n');
    s
}

pub fn load(path: &Path) -> Result<Instance> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_str(&s)
}

pub fn save(instance: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, emit_string(instance)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn complex_of(z: crate::kernel::C64) -> Complex {
    [z.re, z.im]
}

pub fn matrix_to_json(m: &CMatrix) -> Matrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| complex_of(m[(i, j)])).collect()).collect()
}

/// Reads a matrix of known shape. An empty row list stands for any matrix
/// with zero rows.
pub fn matrix_from_json(m: &Matrix, rows: usize, cols: usize, what: &str) -> Result<CMatrix> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!("{what}: expected a {rows}x{cols} matrix")));
    }
    let out = CMatrix::from_fn(rows, cols, |i, j| c(m[i][j][0], m[i][j][1]));
    if !crate::kernel::is_finite(&out) {
        return Err(Error::Parse(format!("{what}: non-finite entry")));
    }
    Ok(out)
}

fn vector_from_json(v: &[Complex], n: usize, what: &str) -> Result<CVector> {
    if v.len() != n {
        return Err(Error::Parse(format!("{what}: expected {n} coefficients, found {}", v.len())));
    }
    Ok(CVector::from_iterator(n, v.iter().map(|z| c(z[0], z[1]))))
}

pub fn groupoid_payload(g: &FiniteGroupoid, haar: &HaarSystem) -> GroupoidPayload {
    let names = g.arrows();
    let objects = g.objects();
    GroupoidPayload {
        objects: objects.to_vec(),
        arrows: (0..g.n_arrows())
            .map(|x| ArrowEntry {
                id: names[x].clone(),
                src: objects[g.src(x)].clone(),
                tgt: objects[g.tgt(x)].clone(),
            })
            .collect(),
        compose: g
            .composition_entries()
            .into_iter()
            .map(|(x, y, z)| [names[x].clone(), names[y].clone(), names[z].clone()])
            .collect(),
        identities: (0..g.n_objects()).map(|q| (objects[q].clone(), names[g.identity(q)].clone())).collect(),
        inverses: (0..g.n_arrows()).map(|x| (names[x].clone(), names[g.inverse(x)].clone())).collect(),
        haar_weights: match haar.mode {
            HaarMode::Normalized => None,
            _ => Some(haar.weights.clone()),
        },
    }
}

fn index_of(names: &[String]) -> BTreeMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

fn lookup(map: &BTreeMap<&str, usize>, key: &str, what: &str) -> Result<usize> {
    map.get(key).copied().ok_or_else(|| Error::Parse(format!("unknown {what} '{key}'")))
}

pub fn parse_groupoid(p: &GroupoidPayload) -> Result<(FiniteGroupoid, HaarSystem)> {
    let arrows: Vec<String> = p.arrows.iter().map(|a| a.id.clone()).collect();
    let obj = index_of(&p.objects);
    let arr = index_of(&arrows);
    let src = p.arrows.iter().map(|a| lookup(&obj, &a.src, "object")).collect::<Result<Vec<_>>>()?;
    let tgt = p.arrows.iter().map(|a| lookup(&obj, &a.tgt, "object")).collect::<Result<Vec<_>>>()?;
    let compose = p
        .compose
        .iter()
        .map(|[x, y, z]| Ok((lookup(&arr, x, "arrow")?, lookup(&arr, y, "arrow")?, lookup(&arr, z, "arrow")?)))
        .collect::<Result<Vec<_>>>()?;
    let identity = p
        .objects
        .iter()
        .map(|q| {
            let id = p.identities.get(q).ok_or_else(|| Error::Parse(format!("object '{q}' has no identity")))?;
            lookup(&arr, id, "arrow")
        })
        .collect::<Result<Vec<_>>>()?;
    if p.identities.len() != p.objects.len() {
        return Err(Error::Parse("identities name an unknown object".into()));
    }
    let inverse = arrows
        .iter()
        .map(|x| {
            let inv = p.inverses.get(x).ok_or_else(|| Error::Parse(format!("arrow '{x}' has no inverse")))?;
            lookup(&arr, inv, "arrow")
        })
        .collect::<Result<Vec<_>>>()?;
    if p.inverses.len() != arrows.len() {
        return Err(Error::Parse("inverses name an unknown arrow".into()));
    }
    let g = FiniteGroupoid::from_parts(p.objects.clone(), arrows, src, tgt, &compose, identity, inverse)
        .map_err(|e| Error::Parse(e.to_string()))?;
    let haar = match &p.haar_weights {
        None => HaarSystem::new(&g, HaarMode::Normalized),
        Some(w) => {
            if w.len() != g.n_objects() || w.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("{} finite Haar weights needed", g.n_objects())));
            }
            HaarSystem::unchecked(w.clone())
        }
    };
    Ok((g, haar))
}

pub fn bundle_payload(q: &QuantumGroupoidData) -> BundlePayload {
    BundlePayload {
        blocks_a: q.a.block_sizes().to_vec(),
        blocks_b: q.b.block_sizes().to_vec(),
        eta_s: matrix_to_json(&q.eta_s.matrix),
        eta_t: matrix_to_json(&q.eta_t.matrix),
        s: matrix_to_json(&q.s.matrix),
        p: matrix_to_json(&q.p.matrix),
        delta: q
            .legs
            .iter()
            .enumerate()
            .map(|(k, legs)| {
                let legs = legs
                    .iter()
                    .map(|(u, v)| {
                        [u.iter().map(|z| complex_of(*z)).collect(), v.iter().map(|z| complex_of(*z)).collect()]
                    })
                    .collect();
                (k.to_string(), legs)
            })
            .collect(),
    }
}

pub fn parse_bundle(p: &BundlePayload) -> Result<QuantumGroupoidData> {
    let a = CStarAlgebra::new(p.blocks_a.clone(), "A").map_err(|e| Error::Parse(format!("blocksA: {e}")))?;
    let b = CStarAlgebra::new(p.blocks_b.clone(), "B").map_err(|e| Error::Parse(format!("blocksB: {e}")))?;
    let da = a.dim();
    let map = |m: &Matrix, dom: &CStarAlgebra, cod: &CStarAlgebra, kind: MapKind, what: &str| -> Result<LinearMap> {
        LinearMap::new(dom.clone(), cod.clone(), matrix_from_json(m, cod.dim(), dom.dim(), what)?, kind)
    };
    let eta_s = map(&p.eta_s, &b, &a, MapKind::Hom, "eta_s")?;
    let eta_t = map(&p.eta_t, &b, &a, MapKind::Antihom, "eta_t")?;
    let s = map(&p.s, &a, &a, MapKind::Antihom, "S")?;
    let pm = map(&p.p, &a, &b, MapKind::Plain, "P")?;
    let mut legs: Vec<Legs> = vec![Vec::new(); da];
    let mut seen = vec![false; da];
    for (key, entries) in &p.delta {
        let k: usize = key.parse().map_err(|_| Error::Parse(format!("delta key '{key}' is not a basis index")))?;
        if k >= da {
            return Err(Error::Parse(format!("delta key {k} out of range (dim A = {da})")));
        }
        seen[k] = true;
        for [u, v] in entries {
            legs[k].push((
                vector_from_json(u, da, &format!("delta[{k}] leg"))?,
                vector_from_json(v, da, &format!("delta[{k}] leg"))?,
            ));
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::Parse(format!("delta has no entry for basis index {k}")));
    }
    QuantumGroupoidData::new(a, b, eta_s, eta_t, pm, s, legs).map_err(|e| Error::Parse(e.to_string()))
}

pub fn representation_payload(rep: &GroupoidRep, haar: &HaarSystem) -> RepresentationPayload {
    let g = &rep.groupoid;
    RepresentationPayload {
        groupoid: groupoid_payload(g, haar),
        fiber_dims: g.objects().iter().cloned().zip(rep.fiber_dims.iter().copied()).collect(),
        u: g.arrows().iter().cloned().zip(rep.u.iter().map(matrix_to_json)).collect(),
    }
}

pub fn parse_representation(p: &RepresentationPayload) -> Result<(GroupoidRep, HaarSystem)> {
    let (g, haar) = parse_groupoid(&p.groupoid)?;
    if p.fiber_dims.len() != g.n_objects() || p.u.len() != g.n_arrows() {
        return Err(Error::Parse("fiber_dims and U must cover every object and arrow exactly once".into()));
    }
    let dims = g
        .objects()
        .iter()
        .map(|q| p.fiber_dims.get(q).copied().ok_or_else(|| Error::Parse(format!("no fiber dimension for '{q}'"))))
        .collect::<Result<Vec<_>>>()?;
    let u = (0..g.n_arrows())
        .map(|x| {
            let id = &g.arrows()[x];
            let m = p.u.get(id).ok_or_else(|| Error::Parse(format!("no matrix for arrow '{id}'")))?;
            matrix_from_json(m, dims[g.tgt(x)], dims[g.src(x)], &format!("U({id})"))
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = GroupoidRep::new(g, dims, u).map_err(|e| Error::Parse(e.to_string()))?;
    Ok((rep, haar))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: bool,
    pub checks: usize,
    pub failed: usize,
    pub max_residual: f64,
}

/// Machine-readable verification result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub instance: String,
    pub kind: InstanceKind,
    pub subject: String,
    pub tolerance: f64,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl ReportFile {
    pub fn new(instance: impl Into<String>, kind: InstanceKind, r: &VerificationReport) -> Self {
        Self {
            instance: instance.into(),
            kind,
            subject: r.subject.clone(),
            tolerance: r.tolerance,
            notes: r.notes.clone(),
            warnings: r.warnings.clone(),
            checks: r.checks.clone(),
            summary: Summary {
                pass: r.pass(),
                checks: r.checks.len(),
                failed: r.failing().count(),
                max_residual: r.max_residual(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{builtin_groupoids, builtin_reps, normalized, pair3_corrupted, s3_bundle, z2_bundle};

    #[test]
    fn groupoid_roundtrip() {
        for (name, g) in builtin_groupoids() {
            let inst = Instance::Groupoid { groupoid: g.clone(), haar: normalized(&g) };
            let back = parse_str(&emit_string(&inst)).unwrap();
            assert_eq!(back, inst, "{name}");
        }
        let g = pair3_corrupted();
        let inst = Instance::Groupoid { haar: normalized(&g), groupoid: g };
        assert_eq!(parse_str(&emit_string(&inst)).unwrap(), inst);
    }

    #[test]
    fn bundle_roundtrip_preserves_payload() {
        for q in [z2_bundle(), s3_bundle()] {
            let file = Instance::Bundle(q).to_file();
            let back = Instance::from_file(&file).unwrap().to_file();
            assert_eq!(back, file);
        }
    }

    #[test]
    fn representation_roundtrip() {
        let (name, g) = builtin_groupoids().into_iter().find(|(n, _)| n == "s3").unwrap();
        for (_, rep) in builtin_reps(&name, &g) {
            let inst = Instance::Representation { haar: normalized(&g), rep };
            assert_eq!(parse_str(&emit_string(&inst)).unwrap(), inst);
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let g = crate::groupoid::FiniteGroupoid::pair(2).unwrap();
        let mut v = serde_json::to_value(Instance::Groupoid { haar: normalized(&g), groupoid: g }.to_file()).unwrap();
        v["payload"]["extra"] = serde_json::json!(1);
        assert!(matches!(parse_str(&v.to_string()), Err(Error::Parse(_))));
        let mut w = v.clone();
        w["payload"].as_object_mut().unwrap().remove("extra");
        w["comment"] = serde_json::json!("x");
        assert!(matches!(parse_str(&w.to_string()), Err(Error::Parse(_))));
    }

    #[test]
    fn bad_inputs_are_parse_errors() {
        assert!(matches!(parse_str("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_str(r#"{"schema_version": 7, "kind": "groupoid", "payload": {}}"#),
            Err(Error::Parse(_))
        ));
        let mut v = serde_json::to_value(Instance::Bundle(z2_bundle()).to_file()).unwrap();
        v["payload"]["P"] = serde_json::json!([[[1.0, 0.0]]]);
        assert!(matches!(parse_str(&v.to_string()), Err(Error::Parse(_))));
    }
}
