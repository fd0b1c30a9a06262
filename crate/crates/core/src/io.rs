//! JSON input formats and CSV/JSON output.
//!
//! Every float written by this module uses Rust's shortest round-trip
//! formatting, so identical runs produce identical bytes and every value
//! parses back to the same `f64`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirichletDomain, Edge, Measure, WeightedGraph};
use crate::problem::{Forcing, ForcingTerm, HolderCondition, TimeProfile, WaveProblem};
use crate::rothe::RotheRun;
use crate::spectral::{SpectralState, Spectrum};

/// Shortest decimal string that parses back to exactly `x`.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Unit,
    Normalized,
    Explicit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub a: String,
    pub b: String,
    pub w: f64,
}

/// On-disk graph description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<VertexRecord>,
    #[serde(default)]
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureKind>,
}

impl GraphFile {
    /// Without a `measure` field the measure is explicit when every vertex
    /// has `mu` and unit when none does.
    pub fn build(&self) -> Result<WeightedGraph> {
        let with_mu = self.vertices.iter().filter(|v| v.mu.is_some()).count();
        let kind = match self.measure {
            Some(k) => k,
            None if with_mu == 0 => MeasureKind::Unit,
            None => MeasureKind::Explicit,
        };
        let measure = match kind {
            MeasureKind::Unit => Measure::Unit,
            MeasureKind::Normalized => Measure::Normalized,
            MeasureKind::Explicit => Measure::Explicit(
                self.vertices
                    .iter()
                    .map(|v| v.mu.ok_or_else(|| Error::MissingMeasure(v.id.clone())))
                    .collect::<Result<_>>()?,
            ),
        };
        if kind != MeasureKind::Explicit && with_mu > 0 {
            log::warn!("graph declares a {kind:?} measure; per-vertex `mu` values are ignored");
        }
        let ids = self.vertices.iter().map(|v| v.id.clone()).collect();
        let edges: Vec<Edge> = self.edges.iter().map(|e| Edge::new(&e.a, &e.b, e.w)).collect();
        WeightedGraph::new(ids, &edges, measure)
    }

    /// Explicit-measure description of an existing graph.
    pub fn from_graph(graph: &WeightedGraph) -> Self {
        GraphFile {
            vertices: (0..graph.len())
                .map(|x| VertexRecord {
                    id: graph.id(x).to_string(),
                    mu: Some(graph.mu(x)),
                })
                .collect(),
            edges: graph
                .edges()
                .map(|(a, b, w)| EdgeRecord {
                    a: graph.id(a).to_string(),
                    b: graph.id(b).to_string(),
                    w,
                })
                .collect(),
            measure: Some(MeasureKind::Explicit),
        }
    }
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    serde_json::from_str::<GraphFile>(text)?.build()
}

pub fn load_graph(path: &Path) -> Result<WeightedGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    /// Path relative to the problem file.
    Path(PathBuf),
    Inline(GraphFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileRecord {
    Constant {
        value: f64,
    },
    Poly {
        coefficients: Vec<f64>,
    },
    Sin {
        #[serde(default = "one")]
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    Samples {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl ProfileRecord {
    pub fn build(&self) -> Result<TimeProfile> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidProfile(format!("{what} must be finite")))
            }
        };
        Ok(match self {
            ProfileRecord::Constant { value } => TimeProfile::Constant(finite(*value, "value")?),
            ProfileRecord::Poly { coefficients } => {
                for &c in coefficients {
                    finite(c, "coefficient")?;
                }
                TimeProfile::Polynomial(coefficients.clone())
            }
            ProfileRecord::Sin {
                amplitude,
                frequency,
                phase,
            } => TimeProfile::Sinusoid {
                amplitude: finite(*amplitude, "amplitude")?,
                frequency: finite(*frequency, "frequency")?,
                phase: finite(*phase, "phase")?,
            },
            ProfileRecord::Samples { times, values } => TimeProfile::samples(times.clone(), values.clone())?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingRecord {
    pub amplitude: BTreeMap<String, f64>,
    pub profile: ProfileRecord,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolderRecord {
    pub alpha: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_tilde: Option<f64>,
}

/// On-disk problem description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub graph: GraphSource,
    pub omega: Vec<String>,
    #[serde(default)]
    pub g: BTreeMap<String, f64>,
    #[serde(default)]
    pub h: BTreeMap<String, f64>,
    #[serde(default)]
    pub forcing: Vec<ForcingRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holder: Option<HolderRecord>,
}

/// Interior-ordered vector from an id → value map. Ids must exist; nonzero
/// values are only allowed on interior vertices.
fn interior_vector(domain: &DirichletDomain, values: &BTreeMap<String, f64>, what: &str) -> Result<Vec<f64>> {
    let graph = domain.graph();
    let mut out = vec![0.0; domain.interior_len()];
    for (id, &v) in values {
        let x = graph.index_of(id)?;
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{what} at `{id}` is not finite")));
        }
        match domain.interior_slot(x) {
            Some(slot) => out[slot] = v,
            None if v == 0.0 => {}
            None => return Err(Error::NotInterior(id.clone())),
        }
    }
    Ok(out)
}

impl ProblemFile {
    /// `base` resolves a graph given by path; `measure` overrides the
    /// graph's own measure.
    pub fn build(&self, base: &Path, measure: Option<Measure>) -> Result<WaveProblem> {
        let mut graph = match &self.graph {
            GraphSource::Path(p) => load_graph(&base.join(p))?,
            GraphSource::Inline(g) => g.build()?,
        };
        if let Some(m) = measure {
            graph = graph.with_measure(m)?;
        }
        let domain = Arc::new(DirichletDomain::split_ids(Arc::new(graph), &self.omega)?);
        let g = interior_vector(&domain, &self.g, "g")?;
        let h = interior_vector(&domain, &self.h, "h")?;
        let terms = self
            .forcing
            .iter()
            .map(|f| {
                Ok(ForcingTerm {
                    amplitude: interior_vector(&domain, &f.amplitude, "forcing amplitude")?,
                    profile: f.profile.build()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let problem = WaveProblem::new(domain, g, h, Forcing::new(terms))?;
        match &self.holder {
            Some(hr) => problem.with_holder(HolderCondition {
                alpha: hr.alpha,
                c: hr.c,
                c_tilde: hr.c_tilde,
            }),
            None => Ok(problem),
        }
    }
}

pub fn parse_problem(text: &str, base: &Path, measure: Option<Measure>) -> Result<WaveProblem> {
    serde_json::from_str::<ProblemFile>(text)?.build(base, measure)
}

pub fn load_problem(path: &Path, measure: Option<Measure>) -> Result<WaveProblem> {
    let text = fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_problem(&text, base, measure)
}

/// Columns `k, lambda, <interior ids…>`; k counts from 1.
pub fn write_spectrum_csv<W: Write>(mut w: W, domain: &DirichletDomain, spectrum: &Spectrum) -> Result<()> {
    write!(w, "k,lambda")?;
    for id in domain.interior_ids() {
        write!(w, ",{id}")?;
    }
    writeln!(w)?;
    for (k, lambda) in spectrum.eigenvalues().iter().enumerate() {
        write!(w, "{},{}", k + 1, format_f64(*lambda))?;
        for v in spectrum.eigenfunction(k) {
            write!(w, ",{}", format_f64(*v))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// One row per (level, interior vertex). δ²u is empty at level 0.
pub fn write_rothe_csv<W: Write>(mut w: W, run: &RotheRun) -> Result<()> {
    writeln!(w, "t,vertex,u,du,d2u")?;
    let ids: Vec<&str> = run.domain().interior_ids().collect();
    for i in 0..=run.steps() {
        let t = format_f64(run.time(i));
        for (slot, id) in ids.iter().enumerate() {
            let d2u = if i == 0 {
                String::new()
            } else {
                format_f64(run.acceleration(i)[slot])
            };
            writeln!(
                w,
                "{t},{id},{},{},{d2u}",
                format_f64(run.level(i)[slot]),
                format_f64(run.velocity(i)[slot])
            )?;
        }
    }
    Ok(())
}

/// One row per (time, interior vertex).
pub fn write_solution_csv<W: Write>(mut w: W, domain: &DirichletDomain, states: &[SpectralState]) -> Result<()> {
    writeln!(w, "t,vertex,u,du")?;
    let ids: Vec<&str> = domain.interior_ids().collect();
    for s in states {
        let t = format_f64(s.t);
        for (slot, id) in ids.iter().enumerate() {
            writeln!(w, "{t},{id},{},{}", format_f64(s.u[slot]), format_f64(s.du[slot]))?;
        }
    }
    Ok(())
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rothe::solve_rothe;
    use crate::spectral::eigendecompose;

    const PATH5: &str = r#"{
        "vertices": [{"id":"a"},{"id":"b"},{"id":"c"},{"id":"d"},{"id":"e"}],
        "edges": [{"a":"a","b":"b","w":1},{"a":"b","b":"c","w":1},{"a":"c","b":"d","w":1},{"a":"d","b":"e","w":1}]
    }"#;

    fn problem_text(extra: &str) -> String {
        format!(r#"{{"graph": {PATH5}, "omega": ["b","c","d"], "g": {{"c": 1.0}}{extra}}}"#)
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(2.0), "2.0");
    }

    #[test]
    fn measure_inference() {
        let g = parse_graph(PATH5).unwrap();
        assert_eq!(g.measure(), &[1.0; 5]);
        let explicit = r#"{"vertices":[{"id":"a","mu":2},{"id":"b","mu":3}],"edges":[{"a":"a","b":"b","w":1}]}"#;
        assert_eq!(parse_graph(explicit).unwrap().measure(), &[2.0, 3.0]);
        let mixed = r#"{"vertices":[{"id":"a","mu":2},{"id":"b"}],"edges":[]}"#;
        assert!(matches!(parse_graph(mixed), Err(Error::MissingMeasure(id)) if id == "b"));
        let normalized =
            r#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[{"a":"a","b":"b","w":4}],"measure":"normalized"}"#;
        assert_eq!(parse_graph(normalized).unwrap().measure(), &[4.0, 4.0]);
    }

    #[test]
    fn json_errors_carry_position() {
        let err = parse_graph("{\n  \"vertices\": [,]\n}").unwrap_err();
        assert!(matches!(err, Error::Json { line: 2, .. }), "{err}");
    }

    #[test]
    fn problem_round_trip() {
        let p = parse_problem(&problem_text(""), Path::new("."), None).unwrap();
        assert_eq!(p.n(), 1);
        assert_eq!(p.g(), &[1.0]);
        assert!(p.forcing().is_zero());
    }

    #[test]
    fn problem_rejects_boundary_data() {
        let text = format!(r#"{{"graph": {PATH5}, "omega": ["b","c","d"], "g": {{"b": 1.0}}}}"#);
        assert!(matches!(parse_problem(&text, Path::new("."), None), Err(Error::NotInterior(id)) if id == "b"));
        let zero = format!(r#"{{"graph": {PATH5}, "omega": ["b","c","d"], "g": {{"b": 0.0}}}}"#);
        assert!(parse_problem(&zero, Path::new("."), None).is_ok());
    }

    #[test]
    fn profiles_parse() {
        let text = problem_text(
            r#", "forcing": [
                {"amplitude": {"c": -1}, "profile": {"kind": "constant", "value": 1}},
                {"amplitude": {"c": 2}, "profile": {"kind": "poly", "coefficients": [0, 1]}},
                {"amplitude": {"c": 1}, "profile": {"kind": "sin", "frequency": 2}},
                {"amplitude": {"c": 1}, "profile": {"kind": "samples", "times": [0, 1], "values": [0, 3]}}
            ]"#,
        );
        let p = parse_problem(&text, Path::new("."), None).unwrap();
        // −1 + 2·0.5 + sin(1) + 1.5
        let want = -1.0 + 1.0 + 1f64.sin() + 1.5;
        assert!((p.forcing_at(0.5).unwrap()[0] - want).abs() < 1e-15);
        let bad = problem_text(r#", "forcing": [{"amplitude": {}, "profile": {"kind": "cubic"}}]"#);
        assert!(matches!(
            parse_problem(&bad, Path::new("."), None),
            Err(Error::Json { .. })
        ));
    }

    #[test]
    fn graph_path_is_relative_to_problem() {
        let dir = std::env::temp_dir().join(format!("graphwave-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("g.json"), PATH5).unwrap();
        fs::write(dir.join("p.json"), r#"{"graph": "g.json", "omega": ["b","c","d"]}"#).unwrap();
        let p = load_problem(&dir.join("p.json"), Some(Measure::Normalized)).unwrap();
        assert_eq!(p.domain().interior_measure(), vec![2.0]);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_layouts() {
        let p = parse_problem(&problem_text(""), Path::new("."), None).unwrap();
        let s = eigendecompose(p.domain()).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, p.domain(), &s).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,lambda,c\n1,2.0,1.0\n");

        let run = solve_rothe(&p, 1.0, 1).unwrap();
        let mut buf = Vec::new();
        write_rothe_csv(&mut buf, &run).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,vertex,u,du,d2u");
        assert_eq!(lines[1], "0.0,c,1.0,0.0,");
        assert!(lines[2].starts_with("1.0,c,"));
    }

    #[test]
    fn graph_file_from_graph_rebuilds() {
        let g = parse_graph(PATH5).unwrap().with_measure(Measure::Normalized).unwrap();
        let again = GraphFile::from_graph(&g).build().unwrap();
        assert_eq!(again.measure(), g.measure());
        assert_eq!(again.edges().count(), 4);
    }
}
