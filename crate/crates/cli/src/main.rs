//! Command-line front end: fusion tables, invariants, comparisons and the
//! crossed-product rank oracle, as text tables or JSON.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use qsys_k0::json::{
    self, BimoduleDoc, CrossedDoc, DiagramDoc, FusionTableDoc, GroupDoc, InvariantDoc, MatrixDoc, QSystemsDoc,
    SubgroupDoc, VerdictDoc,
};
use qsys_k0::{
    compare, compute_invariant_with, crossed_product_blocks, fusion_table, k0_rank, limit_rank, qsystems,
    shift_equivalent_bounded, simple_bimodules, stationary_k0, verify_witness, Error, FiniteAbelianGroup,
    FusionTable, InvariantData, QSystemSet, Result, StationarySystem, Subgroup, Verdict,
};
use qsys_k0::qsys::float_oracle_fuse;
use rayon::prelude::*;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qsys-k0", version, about = "Fusion rules and K0 invariants for Q-systems in Hilb(G)")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Refuse groups larger than this.
    #[arg(long, global = true, default_value_t = qsys_k0::DEFAULT_MAX_GROUP_ORDER, value_parser = clap::value_parser!(u64).range(1..))]
    max_group_order: u64,

    /// Lag bound for the shift-equivalence search.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    se_lag: u32,

    /// Entry bound for the shift-equivalence search.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    se_entries: u64,

    /// Fill fusion tables and invariants on all cores.
    #[arg(long, global = true)]
    parallel: bool,

    /// Suppress warnings on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Composition tables of all simple bimodules.
    FusionTable {
        group: PathBuf,
        /// Recompute every cell with the floating-point oracle.
        #[arg(long)]
        verify: bool,
    },
    /// Representatives of the Q-systems, one per subgroup.
    Qsystems { group: PathBuf },
    /// Simple bimodules between two Q-systems, given as `Q2`, `2` or generator JSON such as `[[2]]`.
    Bimodules {
        group: PathBuf,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// Objects, multipliers and pointed value of a diagram.
    Invariant { diagram: PathBuf },
    /// Decide equivalence of two diagrams over the same group.
    Compare { a: PathBuf, b: PathBuf },
    /// Crossed-product ranks against simple-bimodule counts for every subgroup pair.
    Oracle { group: PathBuf },
    /// Dimension group of a stationary system.
    K0 {
        #[arg(long)]
        matrix: PathBuf,
        /// Second matrix to test for bounded shift equivalence.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Block decomposition of C(G/K) ⋊ H.
    CrossedProduct {
        group: PathBuf,
        /// Acting subgroup H.
        #[arg(long)]
        acting: String,
        /// Subgroup K with base space G/K.
        #[arg(long)]
        base: String,
    },
}

struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let threads = if cli.parallel { 0 } else { 1 };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_group(path: &Path) -> Result<FiniteAbelianGroup> {
    json::from_str::<GroupDoc>(&read(path)?)?.build()
}

fn load_invariant(path: &Path, table: Option<&Arc<FusionTable>>, cli: &Cli) -> Result<InvariantData> {
    let d = json::from_str::<DiagramDoc>(&read(path)?)?.build()?;
    let t = match table {
        Some(t) if t.group() == d.group() => t.clone(),
        Some(_) => return Err(Error::InvalidInput("diagrams are over different groups".into())),
        None => fusion_table(d.group(), cli.max_group_order)?,
    };
    compute_invariant_with(t, &d)
}

fn warn(cli: &Cli, msg: &str) {
    if !cli.quiet {
        eprintln!("warning: {msg}");
    }
}

/// A Q-system given as `Q3`, `3` or a generator list.
fn pick_subgroup(qs: &QSystemSet, arg: &str) -> Result<Subgroup> {
    let s = arg.trim();
    let digits = s.strip_prefix('Q').unwrap_or(s);
    if let Ok(i) = digits.parse::<usize>() {
        return match i.checked_sub(1).and_then(|i| qs.get(i)) {
            Some(q) => Ok(q.subgroup().clone()),
            None => Err(Error::InvalidInput(format!("no Q-system {s}; there are {}", qs.len()))),
        };
    }
    let generators: Vec<Vec<i64>> = json::from_str(s)?;
    SubgroupDoc { generators, cocycle: None }.untwisted(qs.group())
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::FusionTable { group, verify } => {
            let t = fusion_table(&load_group(group)?, cli.max_group_order)?;
            if let Some(w) = t.qsystems().warning() {
                warn(cli, w);
            }
            if *verify {
                verify_table(&t)?;
            }
            Ok(Output::ok(match cli.format {
                Format::Json => json::to_string(&FusionTableDoc::of(&t))?,
                Format::Text => render_fusion(&t),
            }))
        }
        Command::Qsystems { group } => {
            let qs = qsystems(&load_group(group)?, cli.max_group_order)?;
            if let Some(w) = qs.warning() {
                warn(cli, w);
            }
            let doc = QSystemsDoc::of(&qs);
            Ok(Output::ok(match cli.format {
                Format::Json => json::to_string(&doc)?,
                Format::Text => {
                    let rows = doc
                        .qsystems
                        .iter()
                        .map(|q| {
                            vec![q.name.clone(), format!("{:?}", q.generators), q.order.to_string(), q.cyclic.to_string()]
                        })
                        .collect();
                    grid(&["name", "generators", "order", "cyclic"], rows)
                }
            }))
        }
        Command::Bimodules { group, source, target } => {
            let qs = qsystems(&load_group(group)?, cli.max_group_order)?;
            let (h, k) = (pick_subgroup(&qs, source)?, pick_subgroup(&qs, target)?);
            let simples = simple_bimodules(&h, &k);
            let label = |s| qs.label(s).unwrap_or_else(|_| s.to_string());
            Ok(Output::ok(match cli.format {
                Format::Json => {
                    let items: Vec<_> = simples
                        .iter()
                        .map(|s| json!({"label": label(s), "dimension": s.dimension(), "bimodule": BimoduleDoc::of(s)}))
                        .collect();
                    json::to_string(&items)?
                }
                Format::Text => {
                    let rows = simples
                        .iter()
                        .map(|s| {
                            vec![label(s), s.coset().rep().to_string(), s.character().to_string(), s.dimension().to_string()]
                        })
                        .collect();
                    grid(&["label", "coset", "character", "dim"], rows)
                }
            }))
        }
        Command::Invariant { diagram } => {
            let inv = load_invariant(diagram, None, cli)?;
            inv.check_functoriality()?;
            for o in inv.objects() {
                match &o.k0 {
                    None => warn(cli, &format!("{}: no stationary tail, K0 not identified", o.name)),
                    Some(k) if k.variant() == "opaque" => warn(cli, &format!("{}: opaque presentation", o.name)),
                    _ => {}
                }
            }
            let doc = InvariantDoc::of(&inv)?;
            Ok(Output::ok(match cli.format {
                Format::Json => json::to_string(&doc)?,
                Format::Text => render_invariant(&doc),
            }))
        }
        Command::Compare { a, b } => {
            let ia = load_invariant(a, None, cli)?;
            let ib = load_invariant(b, Some(ia.table()), cli)?;
            let verdict = compare(&ia, &ib)?;
            if let Verdict::Equivalent(w) = &verdict {
                if !verify_witness(&ia, &ib, w) {
                    return Err(Error::InternalConsistency("witness failed verification".into()));
                }
            }
            let code = verdict.exit_code() as u8;
            let text = match cli.format {
                Format::Json => json::to_string(&VerdictDoc::of(&verdict))?,
                Format::Text => format!("{verdict}\n"),
            };
            Ok(Output { text, code })
        }
        Command::Oracle { group } => {
            let g = load_group(group)?;
            let qs = qsystems(&g, cli.max_group_order)?;
            let mut rows = Vec::new();
            let mut all = true;
            for i in 0..qs.len() {
                for j in 0..qs.len() {
                    let (h, k) = (qs.subgroup(i), qs.subgroup(j));
                    let count = simple_bimodules(h, k).len();
                    let rank = k0_rank(&crossed_product_blocks(&g, k, h)?);
                    all &= count == rank;
                    rows.push((qs.name(i), qs.name(j), count, rank));
                }
            }
            let text = match cli.format {
                Format::Json => {
                    let items: Vec<_> = rows
                        .iter()
                        .map(|(h, k, c, r)| json!({"source": h, "target": k, "bimodules": c, "crossed_rank": r, "pass": c == r}))
                        .collect();
                    json::to_string(&json!({"rows": items, "pass": all}))?
                }
                Format::Text => {
                    let cells = rows
                        .iter()
                        .map(|(h, k, c, r)| {
                            vec![h.clone(), k.clone(), c.to_string(), r.to_string(), if c == r { "PASS" } else { "FAIL" }.into()]
                        })
                        .collect();
                    grid(&["H", "K", "bimodules", "crossed rank", "status"], cells)
                }
            };
            Ok(Output { text, code: if all { 0 } else { 2 } })
        }
        Command::K0 { matrix, against } => {
            let doc: MatrixDoc = json::from_str(&read(matrix)?)?;
            let m = doc.build()?;
            let sys = if doc.labels.is_empty() {
                StationarySystem::unlabelled(m.clone())?
            } else {
                StationarySystem::new(m.clone(), doc.labels.clone())?
            };
            let desc = stationary_k0(&sys);
            let rank = limit_rank(&sys);
            let se = match against {
                None => None,
                Some(p) => {
                    let b = json::from_str::<MatrixDoc>(&read(p)?)?.build()?;
                    Some(shift_equivalent_bounded(&m, &b, cli.se_lag, cli.se_entries))
                }
            };
            Ok(Output::ok(match cli.format {
                Format::Json => {
                    let mut out = json!({
                        "k0": json::K0Doc::of(&desc, &num_one()),
                        "limit_rank": rank,
                    });
                    if let Some(found) = &se {
                        out["shift_equivalence"] = match found {
                            Some(x) => json!({
                                "lag": x.lag,
                                "r": MatrixDoc::of(&x.r, Vec::new())?.rows,
                                "s": MatrixDoc::of(&x.s, Vec::new())?.rows,
                            }),
                            None => json!(null),
                        };
                    }
                    json::to_string(&out)?
                }
                Format::Text => {
                    let mut s = format!("K0: {desc}\nvariant: {}\nlimit rank: {rank}\n", desc.variant());
                    match &se {
                        Some(Some(x)) => s.push_str(&format!("shift equivalent with lag {}\nR = {}\nS = {}\n", x.lag, x.r, x.s)),
                        Some(None) => s.push_str(&format!(
                            "no shift equivalence with lag <= {} and entries <= {} (inconclusive)\n",
                            cli.se_lag, cli.se_entries
                        )),
                        None => {}
                    }
                    s
                }
            }))
        }
        Command::CrossedProduct { group, acting, base } => {
            let g = load_group(group)?;
            let qs = qsystems(&g, cli.max_group_order)?;
            let (h, k) = (pick_subgroup(&qs, acting)?, pick_subgroup(&qs, base)?);
            let b = crossed_product_blocks(&g, &k, &h)?;
            let doc = CrossedDoc::of(&b);
            Ok(Output::ok(match cli.format {
                Format::Json => json::to_string(&doc)?,
                Format::Text => {
                    let rows = b
                        .blocks
                        .iter()
                        .map(|x| vec![x.orbit.to_string(), x.character.to_string(), x.size.to_string()])
                        .collect();
                    let mut s = format!("orbits: {}\nstabilizer: {}\nrank: {}\n", b.orbits.len(), b.stabilizer, doc.rank);
                    s.push_str(&grid(&["orbit", "character", "size"], rows));
                    s
                }
            }))
        }
    }
}

fn verify_table(t: &FusionTable) -> Result<()> {
    let pairs: Vec<(usize, usize)> = t.products().keys().copied().collect();
    pairs.par_iter().try_for_each(|&(i, j)| {
        let mut exact = t.fuse(t.simple(i), t.simple(j))?;
        let mut float = float_oracle_fuse(t.simple(i), t.simple(j))?;
        exact.sort();
        float.sort();
        if exact == float {
            Ok(())
        } else {
            Err(Error::OracleFailure(format!("{} ⊠ {}", t.label(i), t.label(j))))
        }
    })
}

fn num_one() -> num_rational::BigRational {
    num_rational::BigRational::from_integer(1.into())
}

/// Left-aligned columns separated by two spaces.
fn grid(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
        let s: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        s.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&mut header.iter().copied());
    out.push_str(&line(&mut widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str)));
    for r in &rows {
        out.push_str(&line(&mut r.iter().map(String::as_str)));
    }
    out
}

fn render_fusion(t: &FusionTable) -> String {
    let qs = t.qsystems();
    let mut out = String::new();
    for m in 0..qs.len() {
        let (rows, cols) = t.middle_table(m);
        out.push_str(&format!("composition over {} = {}\n", qs.name(m), qs.subgroup(m)));
        let mut header = vec!["⊠".to_string()];
        header.extend(cols.iter().map(|&j| t.label(j)));
        let body = rows
            .iter()
            .map(|&i| {
                let mut r = vec![t.label(i)];
                for &j in &cols {
                    let cell = t.product(i, j).unwrap_or(&[]);
                    let terms: Vec<String> = cell
                        .iter()
                        .map(|&(z, k)| if k == 1 { t.label(z) } else { format!("{k}·{}", t.label(z)) })
                        .collect();
                    r.push(terms.join(" ⊕ "));
                }
                r
            })
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        out.push_str(&grid(&header, body));
        out.push('\n');
    }
    out
}

fn render_invariant(doc: &InvariantDoc) -> String {
    let objects = doc
        .objects
        .iter()
        .map(|o| {
            let k0 = match &o.k0 {
                Some(json::K0Doc::RankOne { display, .. } | json::K0Doc::DirectSum { display, .. }) => display.clone(),
                Some(json::K0Doc::Opaque { rank, .. }) => format!("opaque, rank {rank}"),
                None => "unidentified".into(),
            };
            let matrix = o.matrix.as_ref().map(|m| format!("{:?}", m.rows)).unwrap_or_default();
            vec![o.name.clone(), format!("{:?}", o.subgroup.generators), k0, matrix]
        })
        .collect();
    let mut out = grid(&["object", "generators", "K0", "connecting matrix"], objects);
    out.push('\n');
    let morphisms = doc
        .morphisms
        .iter()
        .map(|m| {
            vec![m.label.clone(), m.source.clone(), m.target.clone(), m.multiplier.clone().unwrap_or_else(|| "-".into())]
        })
        .collect();
    out.push_str(&grid(&["morphism", "source", "target", "multiplier"], morphisms));
    out.push('\n');
    let pointed = match &doc.pointed {
        json::PointedDoc::Rational(q) => q.clone(),
        json::PointedDoc::Vector(v) => format!("({})", v.join(", ")),
    };
    out.push_str(&format!("pointed class of the unit: {pointed}\n"));
    out
}
