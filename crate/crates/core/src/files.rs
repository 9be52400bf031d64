//! JSON artifact schemas shared by the library and the command-line tool.
//!
//! All rationals travel as `"p/q"` strings (integers are also accepted) so
//! no value ever passes through floating point. Space files carry points,
//! a triangle-function tag, a metric keyed by unordered label pairs `"p|q"`
//! (the missing mirror entry is filled in, the diagonal defaults to the top
//! step) and an optional group section. Parsed objects are fully validated:
//! axiom failures come back as forwarded reports, not exceptions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::DistFn;
use crate::lipschitz::LipMap;
use crate::monoid::{IsoWitness, MonoidIsoOracle};
use crate::report::Report;
use crate::spaces::{validate_invariant_group, validate_space, ProbGroup, ProbSpace, SpaceError};
use crate::tnorms::TriangleFn;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("json parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Shape(#[from] SpaceError),
    #[error("space axioms violated: {0}")]
    SpaceAxioms(Report),
    #[error("group axioms violated: {0}")]
    GroupAxioms(Report),
}

fn schema(msg: impl Into<String>) -> FileError {
    FileError::Schema(msg.into())
}

/// On-disk form of a space or group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub tf: TriangleFn,
    pub metric: BTreeMap<String, DistFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSection {
    pub table: Vec<Vec<String>>,
    pub identity: String,
}

/// A parsed and validated space file.
#[derive(Debug, Clone)]
pub enum Parsed {
    Space(ProbSpace),
    Group(ProbGroup),
}

impl Parsed {
    pub fn space(&self) -> &ProbSpace {
        match self {
            Parsed::Space(s) => s,
            Parsed::Group(g) => g.space(),
        }
    }

    pub fn group(&self) -> Option<&ProbGroup> {
        match self {
            Parsed::Space(_) => None,
            Parsed::Group(g) => Some(g),
        }
    }
}

/// Parses a space file and validates every axiom the object claims: space
/// axioms always, group laws and invariance when a group section is present.
pub fn parse_space(text: &str) -> Result<Parsed, FileError> {
    let file: SpaceFile = serde_json::from_str(text)?;
    build_space(&file)
}

pub fn build_space(file: &SpaceFile) -> Result<Parsed, FileError> {
    if file.points.is_empty() {
        return Err(schema("`points` must be nonempty"));
    }
    for p in &file.points {
        if p.contains('|') {
            return Err(schema(format!("point label `{p}` may not contain '|'")));
        }
    }
    let n = file.points.len();
    let index = |label: &str| -> Result<usize, FileError> {
        file.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| schema(format!("metric key references unknown point `{label}`")))
    };
    let mut metric: Vec<Vec<Option<DistFn>>> = vec![vec![None; n]; n];
    for (key, value) in &file.metric {
        let (a, b) = key
            .split_once('|')
            .ok_or_else(|| schema(format!("metric key `{key}` is not of the form `p|q`")))?;
        let (i, j) = (index(a)?, index(b)?);
        for (x, y) in [(i, j), (j, i)] {
            if let Some(existing) = &metric[x][y] {
                if existing != value {
                    return Err(schema(format!(
                        "conflicting metric entries for the pair `{a}|{b}`"
                    )));
                }
            }
            metric[x][y] = Some(value.clone());
            if x == y {
                break;
            }
        }
    }
    let metric: Vec<Vec<DistFn>> = metric
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, entry)| match entry {
                    Some(f) => Ok(f),
                    None if i == j => Ok(DistFn::top()),
                    None => Err(schema(format!(
                        "metric entry missing for the pair `{}|{}`",
                        file.points[i], file.points[j]
                    ))),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let space = ProbSpace::new(file.points.clone(), metric, file.tf)?;
    let report = validate_space(&space);
    if !report.passed {
        return Err(FileError::SpaceAxioms(report));
    }
    let Some(section) = &file.group else {
        return Ok(Parsed::Space(space));
    };
    if section.table.len() != n {
        return Err(schema(format!(
            "group table must have {n} rows, found {}",
            section.table.len()
        )));
    }
    let mut op = Vec::with_capacity(n);
    for row in &section.table {
        if row.len() != n {
            return Err(schema(format!(
                "group table rows must have {n} entries, found {}",
                row.len()
            )));
        }
        op.push(row.iter().map(|l| index(l)).collect::<Result<Vec<_>, _>>()?);
    }
    let identity = index(&section.identity)?;
    let group = ProbGroup::new(space, op, identity)?;
    let report = validate_invariant_group(&group);
    if !report.passed {
        return Err(FileError::GroupAxioms(report));
    }
    Ok(Parsed::Group(group))
}

/// Serializable form of a parsed space (metric keyed `p|q` with `p` before
/// `q` in carrier order; the diagonal is left implicit).
pub fn to_space_file(parsed: &Parsed) -> SpaceFile {
    let s = parsed.space();
    let mut metric = BTreeMap::new();
    for i in 0..s.len() {
        for j in (i + 1)..s.len() {
            metric.insert(
                format!("{}|{}", s.label(i), s.label(j)),
                s.metric(i, j).clone(),
            );
        }
    }
    SpaceFile {
        points: s.points().to_vec(),
        tf: s.tf(),
        metric,
        group: parsed.group().map(|g| GroupSection {
            table: g
                .op_table()
                .iter()
                .map(|row| row.iter().map(|&k| g.label(k).to_string()).collect())
                .collect(),
            identity: g.label(g.identity()).to_string(),
        }),
    }
}

/// On-disk form of a total or partial map: values keyed by point label.
/// The optional `space` field (a path or an inline space object) is carried
/// for self-description; commands receive the space as an argument.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<serde_json::Value>,
    pub values: BTreeMap<String, DistFn>,
}

/// Resolves a map file against a carrier: returns the listed points (in
/// carrier order) with their values. Unknown labels are schema errors.
pub fn map_from_file(file: &MapFile, s: &ProbSpace) -> Result<(Vec<usize>, Vec<DistFn>), FileError> {
    let mut entries: Vec<(usize, DistFn)> = file
        .values
        .iter()
        .map(|(label, value)| {
            s.index_of(label)
                .map(|i| (i, value.clone()))
                .map_err(|_| schema(format!("map references unknown point `{label}`")))
        })
        .collect::<Result<_, _>>()?;
    if entries.is_empty() {
        return Err(schema("map must list at least one point"));
    }
    entries.sort_by_key(|(i, _)| *i);
    Ok(entries.into_iter().unzip())
}

/// A full-carrier map or a schema error naming the missing point.
pub fn total_map_from_file(file: &MapFile, s: &ProbSpace) -> Result<LipMap, FileError> {
    let (domain, values) = map_from_file(file, s)?;
    if domain.len() != s.len() {
        let missing = (0..s.len())
            .find(|i| !domain.contains(i))
            .expect("some point is missing");
        return Err(schema(format!(
            "map must cover the whole carrier; missing `{}`",
            s.label(missing)
        )));
    }
    Ok(LipMap::new(values))
}

pub fn to_map_file(s: &ProbSpace, domain: &[usize], values: &[DistFn]) -> MapFile {
    MapFile {
        space: None,
        values: domain
            .iter()
            .zip(values)
            .map(|(&i, v)| (s.label(i).to_string(), v.clone()))
            .collect(),
    }
}

/// On-disk form of an isometric-isomorphism witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoFile {
    pub forward: BTreeMap<String, String>,
}

pub fn iso_from_file(
    file: &IsoFile,
    ga: &ProbGroup,
    gb: &ProbGroup,
) -> Result<IsoWitness, FileError> {
    let forward = ga
        .space()
        .points()
        .iter()
        .map(|p| {
            let target = file
                .forward
                .get(p)
                .ok_or_else(|| schema(format!("iso witness misses point `{p}`")))?;
            gb.space()
                .index_of(target)
                .map_err(|_| schema(format!("iso witness maps `{p}` to unknown `{target}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IsoWitness::new(forward))
}

pub fn to_iso_file(ga: &ProbGroup, gb: &ProbGroup, iso: &IsoWitness) -> IsoFile {
    IsoFile {
        forward: iso
            .forward()
            .iter()
            .enumerate()
            .map(|(a, &b)| (ga.label(a).to_string(), gb.label(b).to_string()))
            .collect(),
    }
}

/// On-disk form of a monoid-isomorphism oracle sampled on the point maps:
/// for each point of the source group, a full values table over the target
/// carrier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiFile {
    pub images: BTreeMap<String, BTreeMap<String, DistFn>>,
}

/// Table-backed oracle: defined exactly on the point maps listed in the
/// file, undefined elsewhere.
pub struct TableOracle {
    deltas: Vec<LipMap>,
    images: Vec<LipMap>,
}

impl MonoidIsoOracle for TableOracle {
    fn apply(&self, f: &LipMap) -> Option<LipMap> {
        self.deltas
            .iter()
            .position(|d| d == f)
            .map(|i| self.images[i].clone())
    }
}

pub fn phi_from_file(
    file: &PhiFile,
    ga: &ProbGroup,
    gb: &ProbGroup,
) -> Result<TableOracle, FileError> {
    let mut deltas = Vec::with_capacity(ga.len());
    let mut images = Vec::with_capacity(ga.len());
    for a in 0..ga.len() {
        let label = ga.label(a);
        let table = file
            .images
            .get(label)
            .ok_or_else(|| schema(format!("phi table misses the point map of `{label}`")))?;
        let map_file = MapFile {
            space: None,
            values: table.clone(),
        };
        deltas.push(
            crate::lipschitz::delta_embed(ga.space(), a).expect("index in range"),
        );
        images.push(total_map_from_file(&map_file, gb.space())?);
    }
    Ok(TableOracle { deltas, images })
}

pub fn to_phi_file(ga: &ProbGroup, gb: &ProbGroup, images: &[LipMap]) -> PhiFile {
    PhiFile {
        images: images
            .iter()
            .enumerate()
            .map(|(a, img)| {
                (
                    ga.label(a).to_string(),
                    img.values()
                        .iter()
                        .enumerate()
                        .map(|(y, v)| (gb.label(y).to_string(), v.clone()))
                        .collect(),
                )
            })
            .collect(),
    }
}
