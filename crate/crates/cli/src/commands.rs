//! Subcommand implementations shared by the command line and config runs.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use hyperstab::io::{read_graph, to_hgr};
use hyperstab::lagrangian::{maximize, LagrangianOptions};
use hyperstab::morphism::{check_blowup_invariance, enumerate_levels, EnumOptions};
use hyperstab::stability::{
    chromatic_number, check_vertex_extendable, in_hull, is_krl_colorable, scan_extendability, scan_stability, ScanOptions,
    StabilityKind,
};
use hyperstab::symmetrizer::{ex_both, ex_bruteforce, ex_via_patterns, symmetrize, SymMode};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::names::{parse_class, parse_construction, parse_family, parse_q, parse_range};

/// Shared settings: the seed and the enumeration budget.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub seed: u64,
    pub max_graphs: Option<usize>,
}

impl Ctx {
    fn enum_opts(&self) -> EnumOptions {
        let mut o = EnumOptions::default();
        if let Some(m) = self.max_graphs {
            o.max_graphs = m;
        }
        o
    }
}

/// Result of one command before it is printed.
#[derive(Debug, Default)]
pub struct Output {
    pub json: Value,
    /// Key/value lines for the human summary.
    pub summary: Vec<(String, String)>,
    /// Files to write once the command has finished.
    pub files: Vec<(PathBuf, String)>,
    /// A counterexample was found while the caller asked for a clean run.
    pub failed_clean: bool,
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MakeArgs {
    /// Construction, e.g. `turan:5:2` or `turanr:7:3:3`.
    pub construction: String,
    /// Write the graph here instead of printing it.
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl MakeArgs {
    pub fn execute(&self, _ctx: &Ctx) -> Result<Output> {
        let c = parse_construction(&self.construction)?;
        let g = c.build()?;
        let mut out = Output {
            json: json!({"construction": c, "graph": g}),
            summary: vec![kv("construction", &self.construction), kv("r", g.r()), kv("n", g.n()), kv("edges", g.edge_count())],
            ..Output::default()
        };
        if let Some(p) = &self.out {
            out.files.push((p.clone(), to_hgr(&g)));
        }
        Ok(out)
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckArgs {
    pub graph: PathBuf,
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub class: Option<String>,
}

impl CheckArgs {
    pub fn execute(&self, _ctx: &Ctx) -> Result<Output> {
        let g = read_graph(&self.graph)?;
        let classes = g.equivalence_classes();
        let mut report = json!({
            "r": g.r(),
            "n": g.n(),
            "edges": g.edge_count(),
            "degrees": g.degree_profile(),
            "equivalence_classes": classes.classes(),
            "psi": g.psi(),
            "symmetrized": g.is_symmetrized(),
            "two_covered": g.is_fully_two_covered(),
        });
        let mut summary = vec![kv("r", g.r()), kv("n", g.n()), kv("edges", g.edge_count()), kv("symmetrized", g.is_symmetrized())];
        if g.r() == 2 {
            let chi = chromatic_number(&g)?;
            report["chromatic_number"] = json!(chi);
            summary.push(kv("chromatic number", chi));
        }
        if let Some(f) = &self.family {
            let fam = parse_family(f)?;
            let free = fam.spec.is_free(&g);
            report["family"] = json!({"id": fam.spec.id(), "free": free, "hom_free": fam.spec.is_hom_free(&g)});
            summary.push(kv("free", free));
        }
        if let Some(c) = &self.class {
            let class = parse_class(c)?;
            let hull = in_hull(&g, &class)?;
            let mut cj = json!({"id": class.id(), "member": class.contains(&g)?, "hull": hull});
            if let hyperstab::stability::ClassSpec::KrlBlowups { l, .. } = class {
                cj["coloring"] = json!(is_krl_colorable(&g, l)?.map(|p| p.classes()));
            }
            report["class"] = cj;
            summary.push(kv("in hull", hull));
        }
        Ok(Output { json: report, summary, ..Output::default() })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExRoute {
    Brute,
    Patterns,
    Both,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExArgs {
    /// Vertex count, or an inclusive range `A..B`.
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub family: String,
    #[arg(long, value_enum, default_value = "brute")]
    #[serde(default = "default_route")]
    pub method: ExRoute,
    /// Largest pattern size for the pattern route; defaults to n.
    #[arg(long)]
    #[serde(default)]
    pub pmax: Option<usize>,
    /// Directory receiving one HGR file per witness.
    #[arg(long)]
    #[serde(default)]
    pub witness_dir: Option<PathBuf>,
}

fn default_route() -> ExRoute {
    ExRoute::Brute
}

impl ExArgs {
    pub fn execute(&self, ctx: &Ctx) -> Result<Output> {
        let fam = parse_family(&self.family)?;
        let (a, b) = parse_range(&self.n)?;
        let opts = ctx.enum_opts();
        let mut results = Vec::new();
        let mut out = Output::default();
        for n in a..=b {
            let p = self.pmax.unwrap_or(n).min(n);
            let res = match self.method {
                ExRoute::Brute => ex_bruteforce(n, &fam.spec, &opts)?,
                ExRoute::Patterns => ex_via_patterns(n, &fam.spec, p, &opts)?,
                ExRoute::Both => ex_both(n, &fam.spec, p, &opts)?,
            };
            out.summary.push(kv(&format!("ex({n})"), format!("{} ({} witness(es))", res.value, res.witnesses.len())));
            if let Some(dir) = &self.witness_dir {
                for (i, w) in res.witnesses.iter().enumerate() {
                    out.files.push((dir.join(format!("ex_n{n}_{i}.hgr")), to_hgr(w)));
                }
            }
            results.push(res);
        }
        out.json = if results.len() == 1 { json!(results[0]) } else { json!(results) };
        Ok(out)
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LagrangianArgs {
    /// One or more HGR/JSON files.
    #[arg(required = true)]
    pub graphs: Vec<PathBuf>,
    /// Force support enumeration (exact up to numerical tolerance).
    #[arg(long)]
    #[serde(default)]
    pub supports: bool,
    /// Force multistart ascent.
    #[arg(long, conflicts_with = "supports")]
    #[serde(default)]
    pub multistart: bool,
    #[arg(long)]
    #[serde(default)]
    pub restarts: Option<usize>,
}

impl LagrangianArgs {
    pub fn execute(&self, ctx: &Ctx) -> Result<Output> {
        let mut opts = LagrangianOptions { seed: ctx.seed, ..LagrangianOptions::default() };
        if self.supports {
            opts.supports = Some(true);
        } else if self.multistart {
            opts.supports = Some(false);
        }
        if let Some(r) = self.restarts {
            opts.restarts = r;
        }
        let mut out = Output::default();
        let mut all = Vec::new();
        for path in &self.graphs {
            let g = read_graph(path)?;
            let res = maximize(&g, &opts)?;
            out.summary.push(kv(&path.display().to_string(), crate::fmt12(res.value)));
            all.push(json!({"graph": path.display().to_string(), "result": res}));
        }
        out.json = if all.len() == 1 { all.remove(0) } else { json!(all) };
        Ok(out)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Class,
    Vertex,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrizeArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub family: String,
    #[arg(long, value_enum, default_value = "class")]
    #[serde(default = "default_mode")]
    pub mode: ModeArg,
    /// Write the full step trace as JSON here.
    #[arg(long)]
    #[serde(default)]
    pub trace: Option<PathBuf>,
    /// Write the final graph as HGR here.
    #[arg(long)]
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_mode() -> ModeArg {
    ModeArg::Class
}

impl SymmetrizeArgs {
    pub fn execute(&self, _ctx: &Ctx) -> Result<Output> {
        let fam = parse_family(&self.family)?;
        let g = read_graph(&self.graph)?;
        let mode = match self.mode {
            ModeArg::Class => SymMode::Class,
            ModeArg::Vertex => SymMode::Vertex,
        };
        let t = symmetrize(&g, &fam.spec, mode)?;
        let mut out = Output {
            json: json!({
                "family": fam.spec.id(),
                "mode": mode,
                "steps": t.steps.len(),
                "edges_before": g.edge_count(),
                "edges_after": t.result.edge_count(),
                "final": t.result,
            }),
            summary: vec![kv("steps", t.steps.len()), kv("edges", format!("{} -> {}", g.edge_count(), t.result.edge_count()))],
            ..Output::default()
        };
        if let Some(p) = &self.trace {
            out.files.push((p.clone(), serde_json::to_string_pretty(&t)? + "\n"));
        }
        if let Some(p) = &self.out {
            out.files.push((p.clone(), to_hgr(&t.result)));
        }
        Ok(out)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Degree,
    Vertex,
    Edge,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub class: String,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Inclusive range `A..B`.
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub eps: String,
    #[arg(long, default_value = "0")]
    #[serde(default = "zero")]
    pub delta: String,
    /// Reference density; defaults to the family preset, then the class density.
    #[arg(long)]
    #[serde(default)]
    pub piref: Option<String>,
    /// Exit with status 4 when a counterexample is found.
    #[arg(long)]
    #[serde(default)]
    pub expect_clean: bool,
    /// Per-n table as CSV.
    #[arg(long)]
    #[serde(default)]
    pub csv: Option<PathBuf>,
}

fn zero() -> String {
    "0".into()
}

fn reference_density(piref: &Option<String>, fam: &crate::names::Family, class: &hyperstab::stability::ClassSpec) -> Result<BigRational> {
    match piref {
        Some(p) => parse_q(p),
        None => fam.pi.clone().or_else(|| class.density()).ok_or_else(|| hyperstab::Error::Parse("no reference density known; pass --piref".into()).into()),
    }
}

impl ScanArgs {
    pub fn execute(&self, ctx: &Ctx) -> Result<Output> {
        let fam = parse_family(&self.family)?;
        let class = parse_class(&self.class)?;
        let (a, b) = parse_range(&self.n)?;
        let pi = reference_density(&self.piref, &fam, &class)?;
        let kind = match self.kind {
            KindArg::Degree => StabilityKind::Degree,
            KindArg::Vertex => StabilityKind::Vertex,
            KindArg::Edge => StabilityKind::Edge,
        };
        let opts = ScanOptions { enumeration: ctx.enum_opts(), ..ScanOptions::default() };
        let v = scan_stability(&fam.spec, &class, kind, a, b, &parse_q(&self.eps)?, &parse_q(&self.delta)?, &pi, &opts)?;
        let mut out = Output {
            summary: vec![
                kv("family", &v.family),
                kv("class", &v.class),
                kv("scanned", v.scanned),
                kv("qualifying", v.qualifying),
                kv("counterexamples", v.counterexamples.len()),
                kv("verdict", &v.label),
            ],
            failed_clean: self.expect_clean && !v.clean(),
            json: json!(v),
            ..Output::default()
        };
        if let Some(p) = &self.csv {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "free_graphs", "qualifying", "max_distance", "counterexamples"])?;
            for row in &v.rows {
                w.write_record([
                    row.n.to_string(),
                    row.free_graphs.to_string(),
                    row.qualifying.to_string(),
                    row.max_distance.map_or(String::new(), |d| d.to_string()),
                    row.counterexamples.to_string(),
                ])?;
            }
            out.files.push((p.clone(), String::from_utf8(w.into_inner()?)?));
        }
        Ok(out)
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendableArgs {
    /// Single input; omit together with --family and --n to scan.
    #[serde(default)]
    pub graph: Option<PathBuf>,
    /// Vertex to test; all vertices when omitted.
    #[arg(long)]
    #[serde(default)]
    pub v: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n: Option<String>,
    #[arg(long)]
    pub class: String,
    #[arg(long)]
    pub zeta: String,
    #[arg(long)]
    #[serde(default)]
    pub piref: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub expect_clean: bool,
}

impl ExtendableArgs {
    pub fn execute(&self, ctx: &Ctx) -> Result<Output> {
        let class = parse_class(&self.class)?;
        let zeta = parse_q(&self.zeta)?;
        match (&self.graph, &self.family, &self.n) {
            (Some(path), None, None) => {
                let g = read_graph(path)?;
                let pi = match &self.piref {
                    Some(p) => parse_q(p)?,
                    None => class.density().ok_or_else(|| hyperstab::Error::Parse("no reference density known; pass --piref".into()))?,
                };
                let vs: Vec<usize> = match self.v {
                    Some(v) => vec![v],
                    None => (0..g.n()).collect(),
                };
                let reports = vs.iter().map(|&v| check_vertex_extendable(&g, v, &class, &zeta, &pi)).collect::<hyperstab::Result<Vec<_>>>()?;
                let bad = reports.iter().any(|r| r.verdict == hyperstab::stability::ExtendVerdict::Counterexample);
                let summary = reports.iter().map(|r| kv(&format!("v = {}", r.vertex), format!("{:?}", r.verdict))).collect();
                Ok(Output { json: json!({"class": class.id(), "zeta": zeta.to_string(), "pi_ref": pi.to_string(), "reports": reports}), summary, failed_clean: self.expect_clean && bad, ..Output::default() })
            }
            (None, Some(f), Some(range)) => {
                let fam = parse_family(f)?;
                let pi = reference_density(&self.piref, &fam, &class)?;
                let (a, b) = parse_range(range)?;
                let opts = ScanOptions { enumeration: ctx.enum_opts(), ..ScanOptions::default() };
                let s = scan_extendability(&fam.spec, &class, a, b, &zeta, &pi, &opts)?;
                Ok(Output {
                    summary: vec![kv("checks", s.checks), kv("vacuous", s.vacuous), kv("witness-ok", s.witness_ok), kv("verdict", &s.label)],
                    failed_clean: self.expect_clean && !s.clean(),
                    json: json!(s),
                    ..Output::default()
                })
            }
            _ => bail!(hyperstab::Error::Parse("give either a graph file, or --family with --n".into())),
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub n: usize,
    /// Only graphs free of this family.
    #[arg(long)]
    #[serde(default)]
    pub family: Option<String>,
    /// Include every representative in the output.
    #[arg(long)]
    #[serde(default)]
    pub list: bool,
}

impl EnumArgs {
    pub fn execute(&self, ctx: &Ctx) -> Result<Output> {
        let fam = self.family.as_deref().map(parse_family).transpose()?;
        let levels = enumerate_levels(self.r, self.n, |g| fam.as_ref().is_none_or(|f| f.spec.is_free(g)), &ctx.enum_opts())?;
        let counts: Vec<usize> = levels.iter().map(|l| l.len()).collect();
        let total: usize = counts.iter().sum();
        let mut j = json!({"r": self.r, "n": self.n, "family": fam.as_ref().map(|f| f.spec.id()), "per_edge_count": counts, "total": total});
        if self.list {
            j["graphs"] = json!(levels.iter().flatten().collect::<Vec<_>>());
        }
        Ok(Output { json: j, summary: vec![kv("representatives", total)], ..Output::default() })
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub nmax: usize,
}

impl InvarianceArgs {
    pub fn execute(&self, ctx: &Ctx) -> Result<Output> {
        let fam = parse_family(&self.family)?;
        let v = check_blowup_invariance(&fam.spec, self.nmax, &ctx.enum_opts())?;
        let verdict = if v.invariant_in_range() {
            format!("no counterexample up to n = {}", self.nmax)
        } else {
            format!("not blowup-invariant (counterexample on {} vertices)", v.counterexample_n.unwrap_or(0))
        };
        Ok(Output { summary: vec![kv("checked", v.checked), kv("verdict", verdict)], json: json!(v), ..Output::default() })
    }
}
