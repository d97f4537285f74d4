//! The `uvnet` command line.
//!
//! Exit status: 0 on success, 1 on usage, parse or model errors, 2 when the
//! evidence is inconsistent (the posterior is empty; `EMPTY` is printed on
//! its own line).

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimate::{point_estimate_lp, posterior_set, EstimateProblem, EstimateStatus};
use crate::filters::{
    build_localization_scenario, connected_components, naive_bayes_posterior, parse_scenario, scenario_dynamics,
    set_membership_filter,
};
use crate::fixtures;
use crate::geometry::io::write_region;
use crate::geometry::plot::{fmt_coord, region_polygons};
use crate::geometry::{Region, Sampling, Verdict};
use crate::network::io::{parse_network, NetworkFile};
use crate::network::DSepQuery;
use crate::uncertainty::{
    is_conditionally_independent, pairwise_independent_with, totally_independent_with, JointVariable, ZSamples,
};

#[derive(Debug, Parser)]
#[command(
    name = "uvnet",
    version,
    about = "Set-valued uncertainty networks: marginals, posteriors, independence, point estimates and filters"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: GlobalOpts,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Seed for every sampled check
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample count for sampled checks
    #[arg(long, global = true, default_value_t = 100_000)]
    samples: usize,
    /// Output format; `vertices` adds polygon dumps of 2-D regions
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Vertices,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pairwise,
    Total,
    Conditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    /// Corridor localization: two-component posterior
    Fig1,
    /// The dependent diamond joint
    Fig2,
    /// Two-dimensional marginals of the tetrahedron
    Fig3,
    /// Observation squares around a true state
    Fig4,
    /// Posterior set as an intersection of squares
    Fig5,
    /// Point estimate with rescaled squares
    Fig6,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Marginal region over the listed nodes
    Marginal {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        nodes: Vec<usize>,
    },
    /// Slice of the joint at the evidence, over the remaining nodes
    Condition {
        file: PathBuf,
        /// `node=v1,v2,...`; repeatable
        #[arg(long, value_parser = parse_evidence)]
        evidence: Vec<(usize, Vec<f64>)>,
        /// Keep only these nodes (default: all unobserved)
        #[arg(long, value_delimiter = ',')]
        nodes: Option<Vec<usize>>,
    },
    /// Posterior region of the query nodes given the evidence
    Posterior {
        file: PathBuf,
        #[arg(long, value_parser = parse_evidence)]
        evidence: Vec<(usize, Vec<f64>)>,
        #[arg(long, value_delimiter = ',', required = true)]
        query: Vec<usize>,
    },
    /// Whether C d-separates A and B in the file's graph
    Dsep {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<usize>,
    },
    /// Independence tests on the joint region
    Independence {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Pairwise)]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        c: Vec<usize>,
    },
    /// Scaling-variable point estimate of every unobserved node
    Estimate {
        file: PathBuf,
        #[arg(long, value_parser = parse_evidence)]
        evidence: Vec<(usize, Vec<f64>)>,
    },
    /// Set-membership filter over a scenario file
    Filter { file: PathBuf },
    /// Plot data for the built-in examples
    Figures {
        #[arg(value_enum)]
        which: Figure,
    },
}

fn parse_evidence(s: &str) -> std::result::Result<(usize, Vec<f64>), String> {
    let (node, vals) = s
        .split_once('=')
        .ok_or_else(|| format!("expected `node=v1,v2,...`, got `{s}`"))?;
    let node = node
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("invalid node id `{node}`"))?;
    let vals = vals
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("invalid number `{v}`")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((node, vals))
}

/// Parses `args` (including the program name) and runs the command, writing
/// to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut warnings = Vec::new();
    match execute(&cli, &mut warnings) {
        Ok((text, code)) => {
            for w in warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn load_network(path: &Path) -> Result<NetworkFile> {
    parse_network(&read(path)?).map_err(|e| match e {
        Error::Parse { line, message } => Error::InvalidArgument(format!("{}:{line}: {message}", path.display())),
        e => e,
    })
}

fn names(f: &NetworkFile, ids: &[usize]) -> Result<Vec<String>> {
    ids.iter()
        .map(|i| f.variables.get(i).map(|s| s.name.clone()).ok_or(Error::UnknownNode(*i)))
        .collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Command-line evidence with the file's evidence taking precedence.
fn merge_evidence(
    flags: &[(usize, Vec<f64>)],
    file: &NetworkFile,
    warnings: &mut Vec<String>,
) -> Vec<(usize, Vec<f64>)> {
    let mut merged: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, v) in flags {
        match file.evidence.iter().find(|(j, _)| j == i) {
            Some(_) => warnings.push(format!("evidence for node {i} in the file overrides the command line")),
            None => merged.push((*i, v.clone())),
        }
    }
    merged.extend(file.evidence.iter().cloned());
    merged.sort_by_key(|(i, _)| *i);
    merged
}

fn check_evidence_ids(ev: &[(usize, Vec<f64>)]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (i, _) in ev {
        if !seen.insert(*i) {
            return Err(Error::InvalidArgument(format!("node {i} observed twice")));
        }
    }
    Ok(())
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::True => "yes",
        Verdict::False => "no",
        Verdict::SampledTrue => "yes (sampled)",
    }
}

fn polygon_line(tag: &str, poly: &[[f64; 2]]) -> String {
    let pts: Vec<String> = poly
        .iter()
        .map(|p| format!("({},{})", fmt_coord(p[0]), fmt_coord(p[1])))
        .collect();
    format!("vertices {tag} {}\n", pts.join(" "))
}

fn vertices(tag: &str, r: &Region) -> String {
    region_polygons(r).iter().map(|p| polygon_line(tag, p)).collect()
}

/// Region block (or `EMPTY`), plus polygons when asked for.
fn emit(out: &mut String, r: &Region, opts: &GlobalOpts, step: usize) -> Result<bool> {
    if r.is_empty() == Verdict::True {
        out.push_str("EMPTY\n");
        return Ok(false);
    }
    out.push_str(&write_region(&r.reduced())?);
    if opts.format == Format::Vertices {
        out.push_str(&vertices(&format!("t={step}"), r));
    }
    Ok(true)
}

fn sampling(opts: &GlobalOpts) -> Sampling {
    Sampling {
        samples: opts.samples,
        seed: opts.seed,
    }
}

fn execute(cli: &Cli, warnings: &mut Vec<String>) -> Result<(String, i32)> {
    let opts = &cli.opts;
    let mut out = String::new();
    let code = match &cli.command {
        Command::Marginal { file, nodes } => {
            let f = load_network(file)?;
            let j = f.joint_variable()?;
            let ns = names(&f, nodes)?;
            let r = j.marginal_joint(&refs(&ns))?.uncertainty().clone();
            if emit(&mut out, &r, opts, 0)? {
                0
            } else {
                2
            }
        }
        Command::Condition { file, evidence, nodes } => {
            let f = load_network(file)?;
            let ev = merge_evidence(evidence, &f, warnings);
            check_evidence_ids(&ev)?;
            let j = f.joint_variable()?;
            let ev_names = names(&f, &ev.iter().map(|(i, _)| *i).collect::<Vec<_>>())?;
            let named: Vec<(&str, Vec<f64>)> = ev_names
                .iter()
                .zip(&ev)
                .map(|(n, (_, v))| (n.as_str(), v.clone()))
                .collect();
            let mut sliced = j.condition_joint(&named)?;
            if let Some(keep) = nodes {
                sliced = sliced.marginal_joint(&refs(&names(&f, keep)?))?;
            }
            if emit(&mut out, sliced.uncertainty(), opts, 0)? {
                0
            } else {
                2
            }
        }
        Command::Posterior { file, evidence, query } => {
            let f = load_network(file)?;
            let ev = merge_evidence(evidence, &f, warnings);
            check_evidence_ids(&ev)?;
            let r = if f.has_factors() {
                f.network()?.network_posterior(&ev, query)?
            } else {
                let j = f.joint_variable()?;
                let ev_names = names(&f, &ev.iter().map(|(i, _)| *i).collect::<Vec<_>>())?;
                let named: Vec<(&str, Vec<f64>)> = ev_names
                    .iter()
                    .zip(&ev)
                    .map(|(n, (_, v))| (n.as_str(), v.clone()))
                    .collect();
                j.condition_joint(&named)?
                    .marginal_joint(&refs(&names(&f, query)?))?
                    .uncertainty()
                    .clone()
            };
            if emit(&mut out, &r, opts, 0)? {
                0
            } else {
                2
            }
        }
        Command::Dsep { file, a, b, c } => {
            let f = load_network(file)?;
            let q = DSepQuery::new(a.iter().copied(), b.iter().copied(), c.iter().copied())?;
            let sep = f.dag.d_separated(&q)?;
            out.push_str(if sep { "separated\n" } else { "connected\n" });
            0
        }
        Command::Independence { file, mode, a, b, c } => {
            let f = load_network(file)?;
            let j = f.joint_variable()?;
            let s = sampling(opts);
            match mode {
                Mode::Pairwise => {
                    writeln!(out, "pairwise: {}", verdict(pairwise_independent_with(&j, &s)?)).unwrap();
                }
                Mode::Total => {
                    writeln!(out, "pairwise: {}", verdict(pairwise_independent_with(&j, &s)?)).unwrap();
                    writeln!(out, "total: {}", verdict(totally_independent_with(&j, &s)?)).unwrap();
                }
                Mode::Conditional => {
                    if a.is_empty() || b.is_empty() {
                        return Err(Error::InvalidArgument("conditional mode needs --a and --b".into()));
                    }
                    let all: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
                    let sub: JointVariable = j.marginal_joint(&refs(&names(&f, &all)?))?;
                    let (na, nb, nc) = (names(&f, a)?, names(&f, b)?, names(&f, c)?);
                    let v =
                        is_conditionally_independent(&sub, &refs(&na), &refs(&nb), &refs(&nc), &ZSamples::Auto, &s)?;
                    writeln!(out, "conditional: {}", verdict(v)).unwrap();
                }
            }
            0
        }
        Command::Estimate { file, evidence } => {
            let f = load_network(file)?;
            let ev = merge_evidence(evidence, &f, warnings);
            check_evidence_ids(&ev)?;
            let net = f.network()?;
            let observed: BTreeSet<usize> = ev.iter().map(|(i, _)| *i).collect();
            let query: Vec<usize> = net
                .dag()
                .nodes()
                .iter()
                .copied()
                .filter(|i| !observed.contains(i))
                .collect();
            let p = EstimateProblem::new(net, ev, query)?;
            let res = point_estimate_lp(&p)?;
            out.push_str(&res.to_string());
            match res.status {
                EstimateStatus::Optimal => {
                    out.push_str("posterior\n");
                    emit(&mut out, &posterior_set(&p)?, opts, 0)?;
                    0
                }
                EstimateStatus::InfeasibleEvidence => {
                    out.push_str("EMPTY\n");
                    2
                }
                EstimateStatus::Unbounded | EstimateStatus::BackendUnsupported => 1,
            }
        }
        Command::Filter { file } => {
            let s = parse_scenario(&read(file)?)?;
            let ys: Vec<Vec<f64>> = s.measurements.iter().map(|(_, v)| v.clone()).collect();
            let d = scenario_dynamics(&s, ys.len())?;
            if ys.is_empty() {
                out.push_str("step 0\n");
                emit(&mut out, d.prior(), opts, 0)?;
                return Ok((out, 0));
            }
            let res = set_membership_filter(&d, &ys)?;
            for (t, r) in res.regions.iter().enumerate() {
                writeln!(out, "step {}", t + 1).unwrap();
                emit(&mut out, r, opts, t + 1)?;
            }
            if res.inconsistent_at.is_some() {
                2
            } else {
                0
            }
        }
        Command::Figures { which } => {
            figure(*which, &mut out)?;
            0
        }
    };
    Ok((out, code))
}

/// Evidence used by the point-estimate figures: two nearby observations and
/// one far away.
pub const FAR_EVIDENCE: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [5.0, 4.0]];
/// Evidence whose squares share a common region.
pub const NEAR_EVIDENCE: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.5, 1.2]];

fn square(center: [f64; 2], half: f64) -> Region {
    Region::from_box(
        crate::geometry::AxisBox::new(
            vec![center[0] - half, center[1] - half],
            vec![center[0] + half, center[1] + half],
        )
        .expect("nonnegative half side"),
    )
}

fn star_evidence(ys: &[[f64; 2]]) -> Vec<(usize, Vec<f64>)> {
    ys.iter().enumerate().map(|(k, y)| (k + 2, y.to_vec())).collect()
}

fn figure(which: Figure, out: &mut String) -> Result<()> {
    let side = 2.0;
    match which {
        Figure::Fig1 => {
            let s = parse_scenario(fixtures::CORRIDOR_SCENARIO)?;
            let m = build_localization_scenario(&s)?;
            let ys: Vec<Vec<f64>> = s.measurements[0].1.chunks(s.dim()).map(<[f64]>::to_vec).collect();
            let post = naive_bayes_posterior(&m, &ys)?;
            for o in &s.obstacles {
                out.push_str(&polygon_line(
                    "obstacle",
                    &region_polygons(&Region::from_box(o.clone()))[0],
                ));
            }
            out.push_str(&vertices("t=1", &post));
            writeln!(out, "components {}", connected_components(&post)?).unwrap();
        }
        Figure::Fig2 => out.push_str(&vertices("t=0", &fixtures::diamond())),
        Figure::Fig3 => {
            let t = fixtures::tetrahedron();
            for keep in [[0, 1], [0, 2], [1, 2]] {
                let tag = format!("x{}x{}", keep[0] + 1, keep[1] + 1);
                out.push_str(&vertices(&tag, &t.project(&keep)?));
            }
        }
        Figure::Fig4 => {
            let truth = [2.0, 1.5];
            writeln!(out, "truth ({},{})", fmt_coord(truth[0]), fmt_coord(truth[1])).unwrap();
            for i in 2..=4 {
                out.push_str(&vertices(&format!("square{i}"), &square(truth, side / 2.0)));
            }
        }
        Figure::Fig5 | Figure::Fig6 => {
            let ys = if which == Figure::Fig5 {
                NEAR_EVIDENCE
            } else {
                FAR_EVIDENCE
            };
            let net = fixtures::square_star(side, 3);
            let p = EstimateProblem::new(net, star_evidence(&ys), vec![1])?;
            let post = posterior_set(&p)?;
            if which == Figure::Fig5 {
                for (k, y) in ys.iter().enumerate() {
                    out.push_str(&vertices(&format!("square{}", k + 2), &square(*y, side / 2.0)));
                }
                if post.is_empty() == Verdict::True {
                    out.push_str("EMPTY\n");
                } else {
                    out.push_str(&vertices("posterior", &post));
                }
            } else {
                let res = point_estimate_lp(&p)?;
                if !res.is_optimal() {
                    return Err(Error::InvalidArgument(format!("estimate failed: {}", res.status)));
                }
                for (k, y) in ys.iter().enumerate() {
                    let half = res.beta[&(k + 2)] * side / 2.0;
                    out.push_str(&vertices(&format!("scaled{}", k + 2), &square(*y, half)));
                }
                let x = &res.x_hat[&1];
                writeln!(out, "estimate ({},{})", fmt_coord(x[0]), fmt_coord(x[1])).unwrap();
                for (i, b) in &res.beta {
                    writeln!(out, "beta {i} {}", fmt_coord(*b)).unwrap();
                }
            }
        }
    }
    Ok(())
}
