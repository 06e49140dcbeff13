//! Command-line front end: every pipeline of the library behind a
//! subcommand, with reproducible, machine-readable output.
//!
//! The artifact (JSON, DOT, or SVG) goes to `--output` or standard output;
//! a run manifest with input and output digests goes to standard error.
//! Exit codes: 0 on success, 1 on domain errors (bad tables, undefined
//! sums, out-of-range parameters), 2 on usage errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use opconf::config::{normalize_config, relative_reduce, scan_1d, LabelledConfig};
use opconf::fm::{
    blow_down, cluster, little_discs_to_fm, resolve, DiscTuple, FmPoint, FmTree, GenuineConfig,
    LittleDiscs,
};
use opconf::homology::bar_homology;
use opconf::ChainComplex;
use opconf::modules::{tensor_over_operad, RightModuleTable};
use opconf::operad::{check_operad_axioms, OperadOps, SetOperad, TableOperad};
use opconf::partial::{complete_monoid, FiniteMonoid, PartialMonoid};
use opconf::scalar::Scalar;
use opconf::tree::{enumerate_trees, Tree};
use opconf::w::{f_vector, face_poset, normalize_wtree, WTree};
use opconf::Rat;

#[derive(Parser)]
#[command(
    name = "opconf",
    version,
    about = "Tree operads, configuration points, and their invariants"
)]
struct Cli {
    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Artifact format where supported.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Seed for any sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate isomorphism classes of rooted trees on {1..k}.
    Trees {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = true)]
        planar: bool,
        #[arg(long, default_value_t = 2)]
        min_valence: usize,
        #[arg(long)]
        max_vertices: Option<usize>,
    },
    /// Face counts of the k-th associahedron by dimension.
    #[command(name = "f-vector")]
    FVector {
        #[arg(long)]
        k: usize,
    },
    /// Canonical representative of a vertex-labelled, edge-length tree.
    #[command(name = "w-normalize")]
    WNormalize {
        #[arg(long)]
        operad: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// One operadic composition in a table operad.
    Compose {
        #[arg(long)]
        operad: PathBuf,
        #[arg(long)]
        arity: usize,
        #[arg(long)]
        element: usize,
        /// Arguments as "arity:index,arity:index,..".
        #[arg(long)]
        args: String,
    },
    /// Bounded completion of a partial monoid.
    #[command(name = "complete-monoid")]
    CompleteMonoid {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        max_len: u64,
    },
    /// Tensor of a right module with a partial monoid over an operad.
    Tensor {
        #[arg(long)]
        operad: PathBuf,
        /// Module table file, or "self" for the operad over itself.
        #[arg(long, default_value = "self")]
        module: String,
        #[arg(long)]
        monoid: PathBuf,
    },
    /// Collision structure of a genuine configuration at scale theta.
    Cluster {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        theta: String,
    },
    /// Genuine configuration approximating a configuration point.
    Resolve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        epsilon: String,
    },
    /// Macroscopic locations of every particle.
    #[command(name = "blow-down")]
    BlowDown {
        #[arg(long)]
        input: PathBuf,
    },
    /// Realize a tree of little discs as a configuration point.
    #[command(name = "discs-to-fm")]
    DiscsToFm {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Merge coincident summable labels and delete base points.
    #[command(name = "config-normalize")]
    ConfigNormalize {
        #[arg(long)]
        monoid: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Scanning fiber of a one-dimensional configuration at time t.
    Scan {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        t: String,
        /// Normalize against this monoid first.
        #[arg(long)]
        monoid: Option<PathBuf>,
    },
    /// Betti numbers and torsion of an integer chain complex.
    Homology {
        #[arg(long)]
        input: PathBuf,
    },
    /// Homology of the classifying space of a finite monoid.
    Bar {
        #[arg(long)]
        monoid: Option<PathBuf>,
        /// Shorthand for the cyclic monoid of this order.
        #[arg(long)]
        cyclic: Option<usize>,
        #[arg(long)]
        qmax: usize,
    },
    /// Exhaustive or seeded-sample operad law check.
    #[command(name = "check-axioms")]
    CheckAxioms {
        #[arg(long)]
        operad: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

enum CliError {
    Domain(String),
}

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError::Domain(e.to_string())
    }
}

struct Outcome {
    artifact: Vec<u8>,
    /// Short human line for standard output (printed instead of the
    /// artifact when present, or alongside it when writing to a file).
    summary: Option<String>,
    params: BTreeMap<String, String>,
    inputs: Vec<PathBuf>,
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: String,
    params: BTreeMap<String, String>,
    inputs: BTreeMap<String, String>,
    output_digest: String,
    seed: u64,
    version: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        let _ = write!(out, "{b:02x}");
    }
    out
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(format!("malformed {}: {e}", path.display())))
}

fn parse_rat(s: &str) -> Result<Rat, CliError> {
    Rat::parse_ratio(s).ok_or_else(|| CliError::Domain(format!("bad rational {s:?}")))
}

fn to_pretty(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = subcommand_name(&cli.cmd);
    match run(&cli) {
        Ok(outcome) => {
            let digest = sha256_hex(&outcome.artifact);
            let mut inputs = BTreeMap::new();
            for path in &outcome.inputs {
                match std::fs::read(path) {
                    Ok(bytes) => {
                        inputs.insert(path.display().to_string(), sha256_hex(&bytes));
                    }
                    Err(_) => {
                        inputs.insert(path.display().to_string(), "unreadable".to_string());
                    }
                }
            }
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &outcome.artifact) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                    if let Some(s) = &outcome.summary {
                        println!("{s}");
                    }
                }
                None => {
                    if let Some(s) = &outcome.summary {
                        println!("{s}");
                    } else {
                        use std::io::Write;
                        std::io::stdout().write_all(&outcome.artifact).ok();
                    }
                }
            }
            let manifest = RunManifest {
                subcommand: name,
                params: outcome.params,
                inputs,
                output_digest: digest,
                seed: cli.seed,
                version: env!("CARGO_PKG_VERSION").to_string(),
            };
            eprintln!("{}", serde_json::to_string(&manifest).expect("manifest"));
            ExitCode::SUCCESS
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn subcommand_name(cmd: &Cmd) -> String {
    match cmd {
        Cmd::Trees { .. } => "trees",
        Cmd::FVector { .. } => "f-vector",
        Cmd::WNormalize { .. } => "w-normalize",
        Cmd::Compose { .. } => "compose",
        Cmd::CompleteMonoid { .. } => "complete-monoid",
        Cmd::Tensor { .. } => "tensor",
        Cmd::Cluster { .. } => "cluster",
        Cmd::Resolve { .. } => "resolve",
        Cmd::BlowDown { .. } => "blow-down",
        Cmd::DiscsToFm { .. } => "discs-to-fm",
        Cmd::ConfigNormalize { .. } => "config-normalize",
        Cmd::Scan { .. } => "scan",
        Cmd::Homology { .. } => "homology",
        Cmd::Bar { .. } => "bar",
        Cmd::CheckAxioms { .. } => "check-axioms",
    }
    .to_string()
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let mut params = BTreeMap::new();
    params.insert("format".to_string(), cli.format.clone());
    match &cli.cmd {
        Cmd::Trees { k, planar, min_valence, max_vertices } => {
            let cap = max_vertices.unwrap_or(4 * k);
            params.insert("k".into(), k.to_string());
            params.insert("planar".into(), planar.to_string());
            params.insert("min_valence".into(), min_valence.to_string());
            params.insert("max_vertices".into(), cap.to_string());
            let trees = enumerate_trees(*k, *planar, *min_valence, cap)?;
            let artifact = match cli.format.as_str() {
                "dot" => forest_dot(&trees).into_bytes(),
                "json" => to_pretty(&serde_json::json!({
                    "k": k,
                    "count": trees.len(),
                    "trees": trees,
                })),
                other => return Err(CliError::Domain(format!("unsupported format {other}"))),
            };
            Ok(Outcome { artifact, summary: None, params, inputs: vec![] })
        }
        Cmd::FVector { k } => {
            params.insert("k".into(), k.to_string());
            let poset = face_poset(*k)?;
            let f = f_vector(&poset);
            let rendered = format!(
                "({})",
                f.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
            );
            let artifact = match cli.format.as_str() {
                "dot" => poset.to_dot().into_bytes(),
                "json" => to_pretty(&serde_json::json!({
                    "k": k,
                    "f_vector": f,
                    "total_faces": poset.len(),
                })),
                other => return Err(CliError::Domain(format!("unsupported format {other}"))),
            };
            Ok(Outcome { artifact, summary: Some(rendered), params, inputs: vec![] })
        }
        Cmd::WNormalize { operad, input } => {
            params.insert("operad".into(), operad.display().to_string());
            params.insert("input".into(), input.display().to_string());
            let table: TableOperad = read_json(operad)?;
            let tree: WTree<usize, Rat> = read_json(input)?;
            opconf::w::validate_wtree(&table, &tree)?;
            let normal = normalize_wtree(&table, &tree)?;
            Ok(Outcome {
                artifact: to_pretty(&normal),
                summary: None,
                params,
                inputs: vec![operad.clone(), input.clone()],
            })
        }
        Cmd::Compose { operad, arity, element, args } => {
            params.insert("operad".into(), operad.display().to_string());
            params.insert("arity".into(), arity.to_string());
            params.insert("element".into(), element.to_string());
            params.insert("args".into(), args.clone());
            let table: TableOperad = read_json(operad)?;
            let parsed: Result<Vec<(usize, usize)>, CliError> = args
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|pair| {
                    let (a, e) = pair
                        .split_once(':')
                        .ok_or_else(|| CliError::Domain(format!("bad argument {pair:?}")))?;
                    Ok((
                        a.trim().parse().map_err(|e| CliError::Domain(format!("{e}")))?,
                        e.trim().parse().map_err(|e| CliError::Domain(format!("{e}")))?,
                    ))
                })
                .collect();
            let parsed = parsed?;
            let result = table.compose(*arity, element, &parsed)?;
            let total: usize = parsed.iter().map(|&(i, _)| i).sum();
            Ok(Outcome {
                artifact: to_pretty(&serde_json::json!({
                    "arity": total,
                    "element": result,
                    "name": table.display(total, &result),
                })),
                summary: None,
                params,
                inputs: vec![operad.clone()],
            })
        }
        Cmd::CompleteMonoid { input, max_len } => {
            params.insert("input".into(), input.display().to_string());
            params.insert("max_len".into(), max_len.to_string());
            let monoid: PartialMonoid = read_json(input)?;
            let completion = complete_monoid(&monoid, *max_len)?;
            let render = |w: &Vec<usize>| -> Vec<String> {
                w.iter().map(|&l| monoid.name(l).to_string()).collect()
            };
            let artifact = to_pretty(&serde_json::json!({
                "normal_form_count": completion.normal_forms.len(),
                "class_count": completion.class_count(),
                "normal_forms": completion.normal_forms.iter().map(render).collect::<Vec<_>>(),
                "confluence_violations": completion.confluence_violations,
            }));
            let summary = format!("{} normal forms", completion.normal_forms.len());
            Ok(Outcome { artifact, summary: Some(summary), params, inputs: vec![input.clone()] })
        }
        Cmd::Tensor { operad, module, monoid } => {
            params.insert("operad".into(), operad.display().to_string());
            params.insert("module".into(), module.clone());
            params.insert("monoid".into(), monoid.display().to_string());
            let table: TableOperad = read_json(operad)?;
            let mut inputs = vec![operad.clone(), monoid.clone()];
            let module_table = if module == "self" {
                RightModuleTable::from_operad(&table)
            } else {
                let path = PathBuf::from(module);
                inputs.push(path.clone());
                read_json(&path)?
            };
            let labels: PartialMonoid = read_json(monoid)?;
            let tensor = tensor_over_operad(&module_table, &table, &labels)?;
            let classes: Vec<serde_json::Value> = tensor
                .classes
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "module_arity": c.rep.0,
                        "module_element": c.rep.1,
                        "labels": c.rep.2.iter().map(|&l| labels.name(l)).collect::<Vec<_>>(),
                        "filtration": c.filtration,
                    })
                })
                .collect();
            Ok(Outcome {
                artifact: to_pretty(&serde_json::json!({
                    "class_count": tensor.len(),
                    "classes": classes,
                })),
                summary: Some(format!("{} classes", tensor.len())),
                params,
                inputs,
            })
        }
        Cmd::Cluster { input, theta } => {
            params.insert("input".into(), input.display().to_string());
            params.insert("theta".into(), theta.clone());
            let config: GenuineConfig<Rat> = read_json(input)?;
            let fm = cluster(&config, &parse_rat(theta)?)?;
            let artifact = render_fm(&fm, &cli.format)?;
            Ok(Outcome { artifact, summary: None, params, inputs: vec![input.clone()] })
        }
        Cmd::Resolve { input, epsilon } => {
            params.insert("input".into(), input.display().to_string());
            params.insert("epsilon".into(), epsilon.clone());
            let fm: FmPoint<Rat> = read_json(input)?;
            let config = resolve(&fm, &parse_rat(epsilon)?)?;
            Ok(Outcome {
                artifact: to_pretty(&config),
                summary: None,
                params,
                inputs: vec![input.clone()],
            })
        }
        Cmd::BlowDown { input } => {
            params.insert("input".into(), input.display().to_string());
            let fm: FmPoint<Rat> = read_json(input)?;
            let points: Vec<Vec<String>> = blow_down(&fm)
                .iter()
                .map(|p| p.0.iter().map(Scalar::to_ratio_string).collect())
                .collect();
            Ok(Outcome {
                artifact: to_pretty(&serde_json::json!({ "points": points })),
                summary: None,
                params,
                inputs: vec![input.clone()],
            })
        }
        Cmd::DiscsToFm { input, dim } => {
            params.insert("input".into(), input.display().to_string());
            params.insert("dim".into(), dim.to_string());
            let tree: WTree<DiscTuple<Rat>, Rat> = read_json(input)?;
            let discs: LittleDiscs<Rat> = LittleDiscs::new(*dim, 64);
            let fm = little_discs_to_fm(&discs, &tree)?;
            let artifact = render_fm(&fm, &cli.format)?;
            Ok(Outcome { artifact, summary: None, params, inputs: vec![input.clone()] })
        }
        Cmd::ConfigNormalize { monoid, input } => {
            params.insert("monoid".into(), monoid.display().to_string());
            params.insert("input".into(), input.display().to_string());
            let labels: PartialMonoid = read_json(monoid)?;
            let config: LabelledConfig<Rat> = read_json(input)?;
            let normal = normalize_config(&config, &labels)?;
            let normal = relative_reduce(&normal);
            Ok(Outcome {
                artifact: to_pretty(&normal),
                summary: None,
                params,
                inputs: vec![monoid.clone(), input.clone()],
            })
        }
        Cmd::Scan { input, t, monoid } => {
            params.insert("input".into(), input.display().to_string());
            params.insert("t".into(), t.clone());
            let mut inputs = vec![input.clone()];
            let mut config: LabelledConfig<Rat> = read_json(input)?;
            if let Some(path) = monoid {
                params.insert("monoid".into(), path.display().to_string());
                let labels: PartialMonoid = read_json(path)?;
                config = normalize_config(&config, &labels)?;
                inputs.push(path.clone());
            }
            let fiber = scan_1d(&config, &parse_rat(t)?)?;
            Ok(Outcome { artifact: to_pretty(&fiber), summary: None, params, inputs })
        }
        Cmd::Homology { input } => {
            params.insert("input".into(), input.display().to_string());
            let complex: ChainComplex = read_json(input)?;
            let h = complex.homology();
            Ok(Outcome {
                artifact: to_pretty(&serde_json::json!({
                    "groups": h.groups,
                    "display": h.to_string(),
                })),
                summary: Some(h.to_string()),
                params,
                inputs: vec![input.clone()],
            })
        }
        Cmd::Bar { monoid, cyclic, qmax } => {
            params.insert("qmax".into(), qmax.to_string());
            let mut inputs = Vec::new();
            let m = match (monoid, cyclic) {
                (Some(path), None) => {
                    params.insert("monoid".into(), path.display().to_string());
                    inputs.push(path.clone());
                    read_json::<FiniteMonoid>(path)?
                }
                (None, Some(order)) => {
                    params.insert("cyclic".into(), order.to_string());
                    FiniteMonoid::cyclic(*order)
                }
                _ => {
                    return Err(CliError::Domain(
                        "pass exactly one of --monoid or --cyclic".into(),
                    ))
                }
            };
            let h = bar_homology(&m, *qmax)?;
            Ok(Outcome {
                artifact: to_pretty(&serde_json::json!({
                    "groups": h.groups,
                    "display": h.to_string(),
                })),
                summary: Some(h.to_string()),
                params,
                inputs,
            })
        }
        Cmd::CheckAxioms { operad, budget } => {
            params.insert("operad".into(), operad.display().to_string());
            params.insert("budget".into(), budget.to_string());
            params.insert("seed".into(), cli.seed.to_string());
            let table: TableOperad = read_json(operad)?;
            let report = check_operad_axioms(&table, *budget, cli.seed);
            let summary = if report.ok() {
                format!("ok: {} instances checked", report.checked_instances)
            } else {
                format!("{} violations", report.violation_count)
            };
            Ok(Outcome {
                artifact: to_pretty(&report),
                summary: Some(summary),
                params,
                inputs: vec![operad.clone()],
            })
        }
    }
}

fn render_fm(fm: &FmPoint<Rat>, format: &str) -> Result<Vec<u8>, CliError> {
    match format {
        "json" => Ok(to_pretty(fm)),
        "dot" => Ok(fm_dot(fm).into_bytes()),
        "svg" => Ok(fm_svg(fm).into_bytes()),
        other => Err(CliError::Domain(format!("unsupported format {other}"))),
    }
}

fn forest_dot(trees: &[Tree]) -> String {
    let mut out = String::from("digraph forest {\n  rankdir=BT;\n");
    for (i, t) in trees.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(out, "    label=\"{}\";", t.code(true));
        for line in t.to_dot().lines() {
            if line.starts_with("  n") {
                let _ = writeln!(out, "  {}", line.replace('n', &format!("t{i}_n")));
            }
        }
        let _ = writeln!(out, "  }}");
    }
    out.push_str("}\n");
    out
}

fn fm_dot(fm: &FmPoint<Rat>) -> String {
    let mut out = String::from("digraph fm {\n  rankdir=BT;\n");
    let mut counter = 0usize;
    for (g, (loc, tree)) in fm.groups().iter().enumerate() {
        let coords: Vec<String> = loc.0.iter().map(Scalar::to_ratio_string).collect();
        let _ = writeln!(out, "  subgraph cluster_{g} {{");
        let _ = writeln!(out, "    label=\"({})\";", coords.join(", "));
        fm_dot_tree(tree, &mut out, &mut counter, None);
        let _ = writeln!(out, "  }}");
    }
    out.push_str("}\n");
    out
}

fn fm_dot_tree(t: &FmTree<Rat>, out: &mut String, counter: &mut usize, parent: Option<usize>) {
    let id = *counter;
    *counter += 1;
    match t {
        FmTree::Twig(i) => {
            let _ = writeln!(out, "    n{id} [shape=box,label=\"{i}\"];");
        }
        FmTree::Vertex { cloud, children } => {
            let _ = writeln!(out, "    n{id} [shape=circle,label=\"{}\"];", cloud.len());
            for c in children {
                fm_dot_tree(c, out, counter, Some(id));
            }
        }
    }
    if let Some(p) = parent {
        let _ = writeln!(out, "    n{id} -> n{p};");
    }
}

/// A plain tree diagram per macroscopic location: circles for screens,
/// labelled boxes for twigs.
fn fm_svg(fm: &FmPoint<Rat>) -> String {
    const LEAF_W: f64 = 34.0;
    const LEVEL_H: f64 = 54.0;
    const GROUP_PAD: f64 = 30.0;

    struct Drawer {
        shapes: String,
    }

    impl Drawer {
        // returns (subtree width, root x)
        fn draw(&mut self, t: &FmTree<Rat>, x0: f64, depth: usize) -> (f64, f64) {
            let y = 40.0 + depth as f64 * LEVEL_H;
            match t {
                FmTree::Twig(i) => {
                    let cx = x0 + LEAF_W / 2.0;
                    let _ = write!(
                        self.shapes,
                        "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"24\" height=\"24\" fill=\"white\" stroke=\"black\"/>\
                         <text x=\"{cx:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"13\">{i}</text>",
                        cx - 12.0,
                        y - 12.0,
                        y + 5.0,
                    );
                    (LEAF_W, cx)
                }
                FmTree::Vertex { children, .. } => {
                    let mut x = x0;
                    let mut anchors = Vec::new();
                    for c in children {
                        let (w, cx) = self.draw(c, x, depth + 1);
                        anchors.push(cx);
                        x += w;
                    }
                    let width = (x - x0).max(LEAF_W);
                    let cx = x0 + width / 2.0;
                    let cy = 40.0 + (depth + 1) as f64 * LEVEL_H;
                    for &ax in &anchors {
                        let _ = write!(
                            self.shapes,
                            "<line x1=\"{cx:.1}\" y1=\"{:.1}\" x2=\"{ax:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
                            y + 9.0,
                            cy - 13.0,
                        );
                    }
                    let _ = write!(
                        self.shapes,
                        "<circle cx=\"{cx:.1}\" cy=\"{y:.1}\" r=\"9\" fill=\"white\" stroke=\"black\"/>"
                    );
                    (width, cx)
                }
            }
        }
    }

    let mut drawer = Drawer { shapes: String::new() };
    let mut x = GROUP_PAD;
    let mut max_depth = 0usize;
    for (loc, tree) in fm.groups() {
        let (w, cx) = drawer.draw(tree, x, 0);
        let coords: Vec<String> = loc.0.iter().map(Scalar::to_ratio_string).collect();
        let _ = write!(
            drawer.shapes,
            "<text x=\"{cx:.1}\" y=\"20.0\" text-anchor=\"middle\" font-size=\"12\">({})</text>",
            coords.join(", ")
        );
        x += w + GROUP_PAD;
        max_depth = max_depth.max(tree_depth(tree));
    }
    let height = 80.0 + (max_depth as f64 + 1.0) * LEVEL_H;
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{x:.0}\" height=\"{height:.0}\">{}</svg>\n",
        drawer.shapes
    )
}

fn tree_depth(t: &FmTree<Rat>) -> usize {
    match t {
        FmTree::Twig(_) => 0,
        FmTree::Vertex { children, .. } => 1 + children.iter().map(tree_depth).max().unwrap_or(0),
    }
}
