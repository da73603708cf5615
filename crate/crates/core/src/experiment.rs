//! Experiment drivers shared by the command-line tool and the C interface:
//! object summaries, bias runs and output files.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use crate::config::{ElementRef, ExperimentConfig, GraphConfig};
use crate::error::{Error, Result};
use crate::functions::FunctionSpec;
use crate::graph::LabeledExpander;
use crate::group::FiniteGroup;
use crate::numfmt::{self, sig17};
use crate::rep::RepSystem;
use crate::verify::{Sweep, VerificationReport};
use crate::walk::{bias, effective_exponent, sample_bias, tensor_bound, IndexSet};

/// Parses `cayley(<group>; g1, g2, …)`, `complete_power(<group>, r)` or
/// `complete_with_loops(<group>, r)`, optionally followed by `^k` for the
/// `k`-step power graph.
pub fn parse_graph_spec(spec: &str) -> Result<(String, GraphConfig)> {
    let s = spec.trim();
    let (body, power) = match s.rsplit_once('^') {
        Some((b, p)) if !p.contains(')') => {
            let k = p.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad power '{p}' in graph spec")))?;
            (b.trim(), k)
        }
        _ => (s, 1),
    };
    let open = body.find('(').ok_or_else(|| Error::Config(format!("graph spec '{spec}' has no argument list")))?;
    if !body.ends_with(')') {
        return Err(Error::Config(format!("graph spec '{spec}' is not closed")));
    }
    let name = body[..open].trim();
    let inner = &body[open + 1..body.len() - 1];
    // Split at the last separator outside parentheses.
    let mut depth = 0i32;
    let mut split = None;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' | ';' if depth == 0 => {
                if name == "cayley" && ch == ';' {
                    split = Some(i);
                    break;
                }
                if name != "cayley" && ch == ',' {
                    split = Some(i);
                }
            }
            _ => {}
        }
    }
    let split = split.ok_or_else(|| Error::Config(format!("graph spec '{spec}' is missing its parameters")))?;
    let group = inner[..split].trim().to_string();
    let rest = inner[split + 1..].trim();
    let number = |t: &str| t.parse::<usize>().map_err(|_| Error::Config(format!("expected an integer, got '{t}'")));
    let graph = match name {
        "cayley" => GraphConfig::Cayley {
            generators: rest.split(',').map(|t| ElementRef::Label(t.trim().to_string())).collect(),
            self_loops: false,
            power,
        },
        "complete_power" => GraphConfig::CompletePower { r: number(rest)?, power },
        "complete_with_loops" if power == 1 => GraphConfig::CompleteWithLoops { r: number(rest)? },
        "complete_with_loops" => return Err(Error::Config("complete_with_loops has no power form".into())),
        other => return Err(Error::Config(format!("unknown graph family '{other}'"))),
    };
    Ok((group, graph))
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub family: String,
    pub order: usize,
    pub abelian: bool,
    pub class_sizes: Vec<usize>,
    pub irrep_dims: Vec<usize>,
    pub quasirandomness_degree: Option<usize>,
}

impl GroupSummary {
    pub fn of(g: &FiniteGroup) -> Result<Self> {
        let reps = RepSystem::of(g)?;
        Ok(GroupSummary {
            family: g.family_tag(),
            order: g.order(),
            abelian: g.is_abelian(),
            class_sizes: g.classes().sizes(),
            irrep_dims: reps.dims(),
            quasirandomness_degree: reps.quasirandomness_degree().ok(),
        })
    }
}

fn braces(v: &[usize]) -> String {
    format!("{{{}}}", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

impl fmt::Display for GroupSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {}", self.family)?;
        writeln!(f, "order {}", self.order)?;
        writeln!(f, "abelian {}", self.abelian)?;
        writeln!(f, "classes {}", braces(&self.class_sizes))?;
        writeln!(f, "irrep dims {}", braces(&self.irrep_dims))?;
        match self.quasirandomness_degree {
            Some(d) => writeln!(f, "quasirandomness degree {d}"),
            None => writeln!(f, "quasirandomness degree -"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub tag: String,
    pub group: String,
    pub vertices: usize,
    #[serde(serialize_with = "numfmt::ser")]
    pub lambda: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub signed_lambda: f64,
    /// Distinct eigenvalues, descending, with multiplicities.
    pub spectrum: Vec<SpectrumLine>,
    pub unbiased: bool,
    pub lumped_chain_states: Option<usize>,
    /// Per-irrep eigenvalues when the graph is pseudo-Cayley.
    #[serde(serialize_with = "ser_opt_vec")]
    pub pseudo_cayley: Option<Vec<f64>>,
    pub pseudo_cayley_failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumLine {
    #[serde(serialize_with = "numfmt::ser")]
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

fn group_spectrum(eigs: &[f64]) -> Vec<SpectrumLine> {
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut out: Vec<SpectrumLine> = Vec::new();
    for e in sorted {
        match out.last_mut() {
            Some(last) if (last.eigenvalue - e).abs() <= 1e-9 => last.multiplicity += 1,
            _ => out.push(SpectrumLine { eigenvalue: e, multiplicity: 1 }),
        }
    }
    out
}

fn ser_opt_vec<S: serde::Serializer>(v: &Option<Vec<f64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => numfmt::ser_vec(v, s),
        None => s.serialize_none(),
    }
}

impl GraphSummary {
    pub fn of(x: &LabeledExpander) -> Result<Self> {
        let reps = RepSystem::new(x.group_arc().clone())?;
        let chain = x.label_chain();
        let (pseudo_cayley, pseudo_cayley_failure) = match x.check_pseudo_cayley(&reps) {
            Ok(cert) => (Some(cert.lambdas), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Ok(GraphSummary {
            tag: x.tag().to_string(),
            group: x.group().family_tag(),
            vertices: x.vertex_count(),
            lambda: x.lambda(),
            signed_lambda: x.signed_lambda(),
            spectrum: group_spectrum(&x.spectrum().eigenvalues),
            unbiased: x.check_unbiased().pass,
            lumped_chain_states: chain.lumped.then(|| chain.states()),
            pseudo_cayley,
            pseudo_cayley_failure,
        })
    }
}

impl fmt::Display for GraphSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph {}", self.tag)?;
        writeln!(f, "group {}", self.group)?;
        writeln!(f, "N {}", self.vertices)?;
        writeln!(f, "lambda {} (signed {})", sig17(self.lambda), sig17(self.signed_lambda))?;
        let spec: Vec<String> =
            self.spectrum.iter().map(|l| format!("{} x{}", sig17(l.eigenvalue), l.multiplicity)).collect();
        writeln!(f, "spectrum [{}]", spec.join(", "))?;
        writeln!(f, "unbiased {}", if self.unbiased { "PASS" } else { "FAIL" })?;
        if let Some(s) = self.lumped_chain_states {
            writeln!(f, "label chain lumped to {s} states")?;
        }
        match (&self.pseudo_cayley, &self.pseudo_cayley_failure) {
            (Some(l), _) => writeln!(
                f,
                "pseudo-Cayley PASS lambdas [{}]",
                l.iter().map(|v| sig17(*v)).collect::<Vec<_>>().join(", ")
            ),
            (None, Some(e)) => writeln!(f, "pseudo-Cayley FAIL {e}"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IrrepSummary {
    pub name: String,
    pub dim: usize,
    #[serde(serialize_with = "numfmt::ser")]
    pub homomorphism_residual: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub unitarity_residual: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub irreducibility_residual: f64,
    pub dual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepsSummary {
    pub group: String,
    pub irreps: Vec<IrrepSummary>,
    #[serde(serialize_with = "numfmt::ser")]
    pub orthogonality_residual: f64,
}

impl RepsSummary {
    pub fn of(reps: &RepSystem) -> Self {
        let g = reps.group();
        RepsSummary {
            group: g.family_tag(),
            irreps: reps
                .irreps()
                .iter()
                .enumerate()
                .map(|(i, r)| IrrepSummary {
                    name: r.name.clone(),
                    dim: r.dim,
                    homomorphism_residual: r.homomorphism_residual(g),
                    unitarity_residual: r.unitarity_residual(),
                    irreducibility_residual: r.irreducibility_residual(),
                    dual: reps.irrep(reps.dual(i)).name.clone(),
                })
                .collect(),
            orthogonality_residual: reps.character_table().orthogonality_residual(),
        }
    }
}

impl fmt::Display for RepsSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {} has {} irreps", self.group, self.irreps.len())?;
        for r in &self.irreps {
            writeln!(
                f,
                "  {:<12} dim {}  dual {:<12} residuals hom {:.1e} unit {:.1e} irr {:.1e}",
                r.name, r.dim, r.dual, r.homomorphism_residual, r.unitarity_residual, r.irreducibility_residual
            )?;
        }
        writeln!(f, "character orthogonality residual {:.1e}", self.orthogonality_residual)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasRecord {
    pub function: String,
    pub n: usize,
    pub mode: Mode,
    #[serde(serialize_with = "numfmt::ser")]
    pub bias_re: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub bias_im: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub abs: f64,
    #[serde(serialize_with = "numfmt::ser_opt")]
    pub stderr: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    #[serde(serialize_with = "numfmt::ser")]
    pub l2_norm: f64,
    /// Why no exact record exists for this function.
    pub exact_unavailable: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexSetBound {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "numfmt::ser")]
    pub tensor_bound: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub coarse_cap: f64,
    #[serde(serialize_with = "numfmt::ser")]
    pub effective_exponent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BiasOutput {
    pub config_digest: String,
    pub group: String,
    pub graph: String,
    #[serde(serialize_with = "numfmt::ser")]
    pub lambda: f64,
    pub records: Vec<BiasRecord>,
    pub index_sets: Vec<IndexSetBound>,
}

impl BiasOutput {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bias output serializes")
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), sig17);
        let mut out = String::from("function,n,mode,bias_re,bias_im,abs,stderr,samples,seed\n");
        for r in &self.records {
            out.push_str(&format!(
                "\"{}\",{},{},{},{},{},{},{},{}\n",
                r.function,
                r.n,
                match r.mode {
                    Mode::Exact => "exact",
                    Mode::Sampled => "sampled",
                },
                sig17(r.bias_re),
                sig17(r.bias_im),
                sig17(r.abs),
                opt(r.stderr),
                r.samples.map_or(String::new(), |s| s.to_string()),
                r.seed.map_or(String::new(), |s| s.to_string())
            ));
        }
        out
    }
}

/// Biases of every configured function. Each function gets an exact record
/// when an exact path exists, and a sampled record when `samples` is set.
/// An infeasible exact request without sampling is an error.
pub fn run_bias(cfg: &ExperimentConfig, digest: &str) -> Result<BiasOutput> {
    let g: Arc<FiniteGroup> = cfg.group()?;
    let graph = cfg.graph.as_ref().ok_or_else(|| Error::Config("bias needs a 'graph'".into()))?;
    let x = graph.build(g.clone())?;
    let n = cfg.n.ok_or_else(|| Error::Config("bias needs 'n'".into()))?;
    let samples = if cfg.exact_only { None } else { cfg.samples };
    let mut records = Vec::new();
    for fc in &cfg.functions {
        let f = fc.build(&g, n)?;
        let exact = match bias(&x, &f, n) {
            Ok(b) => Ok(b),
            Err(e @ (Error::TooLarge(_) | Error::NoExactPath(_))) => Err(e.to_string()),
            Err(e) => return Err(e),
        };
        let unavailable = exact.as_ref().err().cloned();
        match exact {
            Ok(b) => records.push(record(&f, n, Mode::Exact, b.re, b.im, None, None, None)),
            Err(reason) if samples.is_none() => {
                return Err(Error::Config(format!(
                    "no exact path for {} ({reason}) and sampling is disabled",
                    f.tag()
                )));
            }
            Err(_) => {}
        }
        if let Some(m) = samples {
            let s = sample_bias(&x, &f, n, m, cfg.seed)?;
            let stderr = s.stderr.is_finite().then_some(s.stderr);
            let mut r = record(&f, n, Mode::Sampled, s.mean_re, s.mean_im, stderr, Some(m), Some(cfg.seed));
            r.exact_unavailable = unavailable;
            records.push(r);
        }
    }
    let lambda = x.lambda();
    let index_sets = cfg
        .index_sets
        .iter()
        .map(|idx| {
            let s = IndexSet::new(idx, cfg.n.unwrap_or(*idx.last().unwrap_or(&0)))?;
            let tb = tensor_bound(&s, lambda);
            Ok(IndexSetBound {
                indices: idx.clone(),
                tensor_bound: tb.value,
                coarse_cap: tb.coarse_cap,
                effective_exponent: effective_exponent(&s, lambda),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BiasOutput {
        config_digest: digest.to_string(),
        group: g.family_tag(),
        graph: x.tag().to_string(),
        lambda,
        records,
        index_sets,
    })
}

#[allow(clippy::too_many_arguments)]
fn record(
    f: &FunctionSpec,
    n: usize,
    mode: Mode,
    re: f64,
    im: f64,
    stderr: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> BiasRecord {
    BiasRecord {
        function: f.tag(),
        n,
        mode,
        bias_re: re,
        bias_im: im,
        abs: re.hypot(im),
        stderr,
        samples,
        seed,
        l2_norm: f.l2_norm(),
        exact_unavailable: None,
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Seconds since the Unix epoch, for metadata files only.
fn timestamp() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// `report.json`, `report.txt` and `metadata.json` (timing and timestamp,
/// kept apart so the report itself is reproducible).
pub fn write_report(dir: &Path, report: &VerificationReport) -> Result<()> {
    write(dir, "report.json", &(report.to_json() + "\n"))?;
    write(dir, "report.txt", &report.table())?;
    let runtimes: Vec<serde_json::Value> =
        report.runtimes().into_iter().map(|(id, ms)| serde_json::json!({ "claim_id": id, "runtime_ms": ms })).collect();
    let meta = serde_json::json!({ "timestamp_unix": timestamp(), "runtimes": runtimes });
    write(dir, "metadata.json", &(serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n"))
}

/// `results.json` and `results.csv`.
pub fn write_bias(dir: &Path, out: &BiasOutput) -> Result<()> {
    write(dir, "results.json", &(out.to_json() + "\n"))?;
    write(dir, "results.csv", &out.to_csv())
}

pub fn write_sweep(dir: &Path, sweep: &Sweep) -> Result<()> {
    write(dir, "sweep.csv", &sweep.to_csv())?;
    write(dir, "sweep.json", &(serde_json::to_string_pretty(sweep).expect("sweep serializes") + "\n"))
}

/// `group.json` and `character_table.csv`.
pub fn write_group(dir: &Path, g: &FiniteGroup) -> Result<()> {
    write(dir, "group.json", &(serde_json::to_string_pretty(&g.to_json()).expect("group serializes") + "\n"))?;
    write(dir, "character_table.csv", &RepSystem::of(g)?.character_table().to_csv())
}

/// `graph.json` and `spectrum.csv`.
pub fn write_graph(dir: &Path, x: &LabeledExpander) -> Result<()> {
    write(dir, "graph.json", &(serde_json::to_string(&x.to_json()).expect("graph serializes") + "\n"))?;
    write(dir, "spectrum.csv", &x.spectrum_csv())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_specs() {
        let (g, c) = parse_graph_spec("complete_power(cyclic(2),2)").unwrap();
        assert_eq!(g, "cyclic(2)");
        assert_eq!(c, GraphConfig::CompletePower { r: 2, power: 1 });
        let (g, c) = parse_graph_spec("cayley(product(cyclic(2),cyclic(3)); 1, 5)^3").unwrap();
        assert_eq!(g, "product(cyclic(2),cyclic(3))");
        assert!(matches!(c, GraphConfig::Cayley { ref generators, power: 3, .. } if generators.len() == 2));
        assert!(parse_graph_spec("hypercube(3)").is_err());
        assert!(parse_graph_spec("complete_power(cyclic(2))").is_err());
    }

    #[test]
    fn inspect_examples() {
        let s3 = FiniteGroup::parse("symmetric(3)").unwrap();
        let gs = GroupSummary::of(&s3).unwrap();
        assert_eq!((gs.order, gs.class_sizes.clone(), gs.irrep_dims.clone()), (6, vec![1, 2, 3], vec![1, 1, 2]));
        let (g, c) = parse_graph_spec("complete_power(cyclic(2),2)").unwrap();
        let x = c.build(Arc::new(FiniteGroup::parse(&g).unwrap())).unwrap();
        let xs = GraphSummary::of(&x).unwrap();
        assert_eq!(xs.vertices, 4);
        assert!((xs.lambda - 1.0 / 3.0).abs() < 1e-15);
        assert!(xs.pseudo_cayley.is_some());
        let trivial = RepsSummary::of(&RepSystem::of(&FiniteGroup::parse("cyclic(1)").unwrap()).unwrap());
        assert_eq!(trivial.irreps.len(), 1);
        assert_eq!(trivial.irreps[0].name, "triv");
    }

    #[test]
    fn bias_records() {
        let src = br#"{"group":"cyclic(2)","graph":{"kind":"complete_power","r":2},
            "functions":[{"kind":"threshold","set":[1],"t":7},{"kind":"constant","value":0.25}],"n":16,"samples":2000,"seed":9}"#;
        let loaded = ExperimentConfig::from_json(src).unwrap();
        let out = run_bias(&loaded.config, &loaded.digest).unwrap();
        assert_eq!(out.records.len(), 4);
        assert_eq!(out.records[2].bias_re, 0.0);
        assert_eq!(out.records[3].bias_re, 0.0);
        let again = run_bias(&loaded.config, &loaded.digest).unwrap();
        assert_eq!(out.to_json(), again.to_json());
    }

    #[test]
    fn infeasible_exact_without_sampling() {
        let src = br#"{"group":"symmetric(3)","graph":{"kind":"complete_power","r":1},
            "functions":[{"kind":"word","indices":[9,1],"exponents":[1,1],"target":0}],"n":9,"exact_only":true}"#;
        let loaded = ExperimentConfig::from_json(src).unwrap();
        assert!(matches!(run_bias(&loaded.config, &loaded.digest), Err(Error::Config(_))));
    }
}
