//! Command-line front end: statistics, labelings, insertion maps and their
//! inverses, distribution polynomials, the reference table, and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 verification
//! failure. Stdout carries exactly the payload; diagnostics go to stderr.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mahonian::bijections::{
    alpha_traced, beta_star_traced, beta_traced, delta_traced, equidist_map, gamma_traced,
    phi_den_inv, phi_den_liu, phi_den_traced, phi_maj, phi_maj_inv, psi_den_inv, psi_den_traced,
    DenVariant, MapTrace, TraceEntry,
};
use mahonian::labeling::{
    ggl_insertion_letters, gl_den_labeling, liu_den_labeling, rmaj_labeling, InsertionAssignment,
    SpaceLabeling,
};
use mahonian::report::{
    from_json, render_labeling, render_polynomial, render_table1_text, to_csv, to_json,
    CheckReportsDoc, DistributionDoc, LabelingDoc, Payload, ReportDocument, StatsDoc, Table1Doc,
    TraceDoc,
};
use mahonian::stats::{classic_statistics, g_den_l, g_exc_l, r_des, r_maj};
use mahonian::verify::{
    joint_distribution, joint_distribution_parallel, reproduce_table1, run_suite_with_workers,
    suite_ids,
    CheckReport, StatSelector, SuiteGrid, DEFAULT_N_CAP,
};
use mahonian::{Error, Permutation};

#[derive(Parser)]
#[command(
    name = "mahonian",
    version,
    about = "Permutation statistics, space labelings, insertion bijections, and exhaustive checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for the payload.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Worker threads for enumeration-heavy commands.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cap on the symmetric-group size that may be enumerated.
    #[arg(long, global = true, env = "MAHONIAN_CAP", default_value_t = DEFAULT_N_CAP)]
    cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct GapLevel {
    /// Gap parameter g (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    g: Option<u32>,
    /// Level parameter ell (>= 1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    ell: Option<u32>,
    /// Descent parameter r (>= 1); defaults to g + ell - 1 where needed.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    r: Option<u32>,
}

impl GapLevel {
    fn g(&self) -> Result<u32, String> {
        self.g.ok_or_else(|| "--g is required".to_string())
    }

    fn ell(&self) -> Result<u32, String> {
        self.ell.ok_or_else(|| "--ell is required".to_string())
    }

    fn r_or_linked(&self) -> Result<u32, String> {
        match (self.r, self.g, self.ell) {
            (Some(r), _, _) => Ok(r),
            (None, Some(g), Some(ell)) => Ok(g + ell - 1),
            _ => Err("--r (or both --g and --ell) is required".to_string()),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LabelKind {
    Rmaj,
    Liu,
    Gl,
    Ggl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    PhiMaj,
    PhiDenLiu,
    PhiDen,
    PsiDen,
    Alpha,
    Beta,
    Gamma,
    Delta,
    BetaStar,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InvKind {
    PhiMaj,
    PhiDen,
    PsiDen,
}

#[derive(Subcommand)]
enum Command {
    /// All statistics of a permutation.
    Stats {
        perm: String,
        #[command(flatten)]
        params: GapLevel,
    },
    /// Render a space labeling (with insertion letters where defined).
    Label {
        perm: String,
        #[arg(long, value_enum)]
        kind: LabelKind,
        #[command(flatten)]
        params: GapLevel,
    },
    /// Apply an insertion map to (PERM, C).
    Map {
        perm: String,
        c: usize,
        #[arg(long, value_enum)]
        kind: MapKind,
        #[command(flatten)]
        params: GapLevel,
        /// Also print the intermediate words and bookkeeping values.
        #[arg(long)]
        trace: bool,
    },
    /// Invert an insertion map, recovering (parent, C).
    Invert {
        perm: String,
        #[arg(long, value_enum)]
        kind: InvKind,
        #[command(flatten)]
        params: GapLevel,
    },
    /// Run a verification suite; exits 0 iff every check passes.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        gmax: Option<u32>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        lmax: Option<u32>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        rmax: Option<u32>,
    },
    /// Reproduce the reference table over S_4.
    Table1,
    /// Joint distribution polynomial of two statistics over S_n.
    Distribution {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        st1: String,
        #[arg(long)]
        st2: String,
    },
    /// Apply the composed equidistribution bijection to PERM.
    Equidist {
        perm: String,
        #[command(flatten)]
        params: GapLevel,
        /// Which Denert statistic the image carries.
        #[arg(long, value_enum, default_value_t = Variant::DenL)]
        variant: Variant,
    },
    /// Validate a previously emitted JSON report document.
    CheckReport {
        /// Path to the JSON file, or - for stdin.
        path: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    DenL,
    DenGl,
}

enum Failure {
    Usage(String),
    Domain(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_perm(text: &str) -> Result<Permutation, Failure> {
    Permutation::parse(text).map_err(Failure::Domain)
}

fn emit_document(
    format: OutputFormat,
    parameters: BTreeMap<String, String>,
    payload: Payload,
    text: impl FnOnce() -> String,
) -> Result<(), Failure> {
    match format {
        OutputFormat::Text => println!("{}", text()),
        OutputFormat::Json => {
            let doc = ReportDocument::new(parameters, payload);
            println!("{}", to_json(&doc)?);
        }
        OutputFormat::Csv => print!("{}", to_csv(&payload)?),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Stats { perm, params } => cmd_stats(cli, perm, params),
        Command::Label { perm, kind, params } => cmd_label(cli, perm, *kind, params),
        Command::Map {
            perm,
            c,
            kind,
            params,
            trace,
        } => cmd_map(cli, perm, *c, *kind, params, *trace),
        Command::Invert { perm, kind, params } => cmd_invert(cli, perm, *kind, params),
        Command::Verify {
            suite,
            nmax,
            gmax,
            lmax,
            rmax,
        } => cmd_verify(cli, suite, *nmax, *gmax, *lmax, *rmax),
        Command::Table1 => cmd_table1(cli),
        Command::Distribution { n, st1, st2 } => cmd_distribution(cli, *n, st1, st2),
        Command::Equidist {
            perm,
            params,
            variant,
        } => cmd_equidist(cli, perm, params, *variant),
        Command::CheckReport { path } => cmd_check_report(path),
    }
}

fn cmd_stats(cli: &Cli, perm: &str, params: &GapLevel) -> Result<(), Failure> {
    let p = parse_perm(perm)?;
    let g = params.g.unwrap_or(1);
    let ell = params.ell.unwrap_or(1);
    let r = params.r.unwrap_or(g + ell - 1);
    let classic = classic_statistics(&p);
    let doc = StatsDoc {
        perm: p.to_string(),
        n: p.len(),
        inv: classic.inv,
        des: classic.des,
        maj: classic.maj,
        exc: classic.exc,
        den: classic.den,
        r,
        rdes: r_des(&p, r),
        rmaj: r_maj(&p, r),
        g,
        ell,
        gexc_l: g_exc_l(&p, g, ell),
        gden_l: g_den_l(&p, g, ell),
        gden_gl: g_den_l(&p, g, g + ell),
    };
    let parameters = BTreeMap::from([
        ("perm".to_string(), doc.perm.clone()),
        ("g".to_string(), g.to_string()),
        ("ell".to_string(), ell.to_string()),
        ("r".to_string(), r.to_string()),
    ]);
    let text = format!(
        "perm {}\nn {}\ninv {}\ndes {}\nmaj {}\nexc {}\nden {}\nrdes[r={}] {}\nrmaj[r={}] {}\ngexc[g={},ell={}] {}\ngden[g={},ell={}] {}\ngden[g={},ell={}] {}",
        doc.perm,
        doc.n,
        doc.inv,
        doc.des,
        doc.maj,
        doc.exc,
        doc.den,
        r,
        doc.rdes,
        r,
        doc.rmaj,
        g,
        ell,
        doc.gexc_l,
        g,
        ell,
        doc.gden_l,
        g,
        g + ell,
        doc.gden_gl,
    );
    emit_document(cli.format, parameters, Payload::Stats(doc), || text)
}

fn labeling_elements(kind: LabelKind, p: &Permutation) -> Vec<String> {
    match kind {
        LabelKind::Rmaj => p
            .as_slice()
            .iter()
            .map(|&v| {
                if v < 10 {
                    v.to_string()
                } else {
                    format!("({v})")
                }
            })
            .collect(),
        _ => (1..=p.len()).map(|i| i.to_string()).collect(),
    }
}

fn cmd_label(cli: &Cli, perm: &str, kind: LabelKind, params: &GapLevel) -> Result<(), Failure> {
    let p = parse_perm(perm)?;
    let mut parameters = BTreeMap::from([("perm".to_string(), p.to_string())]);
    let (labeling, letters): (SpaceLabeling, Option<InsertionAssignment>) = match kind {
        LabelKind::Rmaj => {
            let r = params.r_or_linked().map_err(usage)?;
            parameters.insert("r".to_string(), r.to_string());
            parameters.insert("kind".to_string(), "rmaj".to_string());
            (rmaj_labeling(&p, r)?, None)
        }
        LabelKind::Liu => {
            let g = params.g().map_err(usage)?;
            parameters.insert("g".to_string(), g.to_string());
            parameters.insert("kind".to_string(), "liu".to_string());
            let (labeling, letters) = liu_den_labeling(&p, g)?;
            (labeling, Some(letters))
        }
        LabelKind::Gl => {
            let (g, ell) = (params.g().map_err(usage)?, params.ell().map_err(usage)?);
            parameters.insert("g".to_string(), g.to_string());
            parameters.insert("ell".to_string(), ell.to_string());
            parameters.insert("kind".to_string(), "gl".to_string());
            (
                gl_den_labeling(&p, g, ell)?,
                Some(ggl_insertion_letters(&p, g, ell)?),
            )
        }
        LabelKind::Ggl => {
            let (g, ell) = (params.g().map_err(usage)?, params.ell().map_err(usage)?);
            parameters.insert("g".to_string(), g.to_string());
            parameters.insert("ell".to_string(), ell.to_string());
            parameters.insert("kind".to_string(), "ggl".to_string());
            (
                mahonian::labeling::ggl_den_labeling(&p, g, ell)?,
                Some(ggl_insertion_letters(&p, g, ell)?),
            )
        }
    };
    let elements = labeling_elements(kind, &p);
    let doc = LabelingDoc::new(elements.clone(), &labeling, letters.as_ref());
    emit_document(cli.format, parameters, Payload::Labeling(doc), || {
        render_labeling(&elements, &labeling, letters.as_ref())
    })
}

fn render_trace(trace: &MapTrace) -> String {
    let mut out = format!("branch {}", trace.map);
    for entry in &trace.entries {
        match entry {
            TraceEntry::Word { name, letters } => {
                let word: String = letters
                    .iter()
                    .map(|&v| {
                        if v < 10 {
                            v.to_string()
                        } else {
                            format!("({v})")
                        }
                    })
                    .collect();
                out.push_str(&format!("\n{name} {word}"));
            }
            TraceEntry::Value { name, value } => out.push_str(&format!("\n{name} {value}")),
        }
    }
    out
}

fn cmd_map(
    cli: &Cli,
    perm: &str,
    c: usize,
    kind: MapKind,
    params: &GapLevel,
    trace: bool,
) -> Result<(), Failure> {
    let p = parse_perm(perm)?;
    let mut parameters = BTreeMap::from([
        ("perm".to_string(), p.to_string()),
        ("c".to_string(), c.to_string()),
    ]);
    let need_gl = |params: &GapLevel| -> Result<(u32, u32), Failure> {
        Ok((params.g().map_err(usage)?, params.ell().map_err(usage)?))
    };
    let (child, map_trace): (Permutation, Option<MapTrace>) = match kind {
        MapKind::PhiMaj => {
            let r = params.r_or_linked().map_err(usage)?;
            parameters.insert("r".to_string(), r.to_string());
            let space = rmaj_labeling(&p, r)?.space_of_label(c)?;
            let t = MapTrace {
                map: "phi_maj",
                entries: vec![
                    TraceEntry::Value {
                        name: "space".to_string(),
                        value: space as i64,
                    },
                    TraceEntry::Value {
                        name: "insertion_letter".to_string(),
                        value: (p.len() + 1) as i64,
                    },
                ],
            };
            (phi_maj(&p, c, r)?, Some(t))
        }
        MapKind::PhiDenLiu => {
            let g = params.g().map_err(usage)?;
            parameters.insert("g".to_string(), g.to_string());
            let (labeling, letters) = liu_den_labeling(&p, g)?;
            let space = labeling.space_of_label(c)?;
            let t = MapTrace {
                map: "phi_den_liu",
                entries: vec![
                    TraceEntry::Value {
                        name: "space".to_string(),
                        value: space as i64,
                    },
                    TraceEntry::Value {
                        name: "insertion_letter".to_string(),
                        value: i64::from(letters.letter(space).expect("total")),
                    },
                ],
            };
            (phi_den_liu(&p, c, g)?, Some(t))
        }
        MapKind::PhiDen => {
            let (g, ell) = need_gl(params)?;
            parameters.insert("g".to_string(), g.to_string());
            parameters.insert("ell".to_string(), ell.to_string());
            let (child, t) = phi_den_traced(&p, c, g, ell)?;
            (child, Some(t))
        }
        MapKind::PsiDen => {
            let (g, ell) = need_gl(params)?;
            parameters.insert("g".to_string(), g.to_string());
            parameters.insert("ell".to_string(), ell.to_string());
            let (child, t) = psi_den_traced(&p, c, g, ell)?;
            (child, Some(t))
        }
        MapKind::Alpha | MapKind::Beta | MapKind::Gamma | MapKind::Delta | MapKind::BetaStar => {
            let (g, ell) = need_gl(params)?;
            parameters.insert("g".to_string(), g.to_string());
            parameters.insert("ell".to_string(), ell.to_string());
            let (child, t) = match kind {
                MapKind::Alpha => alpha_traced(&p, c, g, ell)?,
                MapKind::Beta => beta_traced(&p, c, g, ell)?,
                MapKind::Gamma => gamma_traced(&p, c, g, ell)?,
                MapKind::Delta => delta_traced(&p, c, g, ell)?,
                _ => beta_star_traced(&p, c, g, ell)?,
            };
            (child, Some(t))
        }
    };
    match (cli.format, trace, map_trace) {
        (OutputFormat::Text, true, Some(t)) => {
            println!("{child}");
            println!("{}", render_trace(&t));
            Ok(())
        }
        (OutputFormat::Text, _, _) => {
            println!("{child}");
            Ok(())
        }
        (format, _, map_trace) => {
            let trace_doc = match map_trace {
                Some(t) => TraceDoc::new(&t, child.to_string()),
                None => TraceDoc::new(
                    &MapTrace {
                        map: "insertion",
                        entries: Vec::new(),
                    },
                    child.to_string(),
                ),
            };
            emit_document(format, parameters, Payload::Trace(trace_doc), String::new)
        }
    }
}

fn cmd_invert(cli: &Cli, perm: &str, kind: InvKind, params: &GapLevel) -> Result<(), Failure> {
    let q = parse_perm(perm)?;
    let (parent, c) = match kind {
        InvKind::PhiMaj => {
            let r = params.r_or_linked().map_err(usage)?;
            phi_maj_inv(&q, r)?
        }
        InvKind::PhiDen => {
            let (g, ell) = (params.g().map_err(usage)?, params.ell().map_err(usage)?);
            phi_den_inv(&q, g, ell)?
        }
        InvKind::PsiDen => {
            let (g, ell) = (params.g().map_err(usage)?, params.ell().map_err(usage)?);
            psi_den_inv(&q, g, ell)?
        }
    };
    match cli.format {
        OutputFormat::Json => {
            let value = serde_json::json!({
                "parent": parent.to_string(),
                "label": c,
                "child": q.to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
        _ => println!("{} {}", parent, c),
    }
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    suite: &str,
    nmax: Option<usize>,
    gmax: Option<u32>,
    lmax: Option<u32>,
    rmax: Option<u32>,
) -> Result<(), Failure> {
    if !suite_ids().contains(&suite) {
        return Err(usage(format!(
            "unknown suite {suite:?}; available: {}",
            suite_ids().join(", ")
        )));
    }
    let defaults = SuiteGrid::default();
    let grid = SuiteGrid {
        n_max: nmax.unwrap_or(defaults.n_max),
        g_max: gmax.unwrap_or(defaults.g_max),
        ell_max: lmax.unwrap_or(defaults.ell_max),
        r_max: rmax.unwrap_or(defaults.r_max),
    };
    let reports = run_suite_with_workers(suite, &grid, cli.cap, cli.jobs.unwrap_or(1))?;
    let all_pass = reports.iter().all(|r| r.pass);
    emit_reports(cli.format, suite, &grid, &reports)?;
    if all_pass {
        Ok(())
    } else {
        if let Some(first) = reports.iter().find(|r| !r.pass) {
            eprintln!("first failure:\n{}", first.render_line());
        }
        Err(Failure::Verification)
    }
}

fn emit_reports(
    format: OutputFormat,
    suite: &str,
    grid: &SuiteGrid,
    reports: &[CheckReport],
) -> Result<(), Failure> {
    let parameters = BTreeMap::from([
        ("suite".to_string(), suite.to_string()),
        ("n_max".to_string(), grid.n_max.to_string()),
        ("g_max".to_string(), grid.g_max.to_string()),
        ("ell_max".to_string(), grid.ell_max.to_string()),
        ("r_max".to_string(), grid.r_max.to_string()),
    ]);
    let doc = CheckReportsDoc {
        reports: reports.iter().map(Into::into).collect(),
    };
    emit_document(format, parameters, Payload::CheckReports(doc), || {
        reports
            .iter()
            .map(CheckReport::render_line)
            .collect::<Vec<_>>()
            .join("\n")
    })
}

fn cmd_table1(cli: &Cli) -> Result<(), Failure> {
    let rows = reproduce_table1();
    let doc = Table1Doc { rows: rows.clone() };
    emit_document(cli.format, BTreeMap::new(), Payload::Table1(doc), || {
        render_table1_text(&rows).trim_end().to_string()
    })
}

fn cmd_distribution(cli: &Cli, n: usize, st1: &str, st2: &str) -> Result<(), Failure> {
    let st1 = StatSelector::parse(st1)?;
    let st2 = StatSelector::parse(st2)?;
    let dist = match cli.jobs {
        Some(jobs) if jobs > 1 => joint_distribution_parallel(n, &st1, &st2, cli.cap, jobs)?,
        _ => joint_distribution(n, &st1, &st2, cli.cap)?,
    };
    let parameters = BTreeMap::from([
        ("n".to_string(), n.to_string()),
        ("st1".to_string(), st1.label()),
        ("st2".to_string(), st2.label()),
    ]);
    let doc = DistributionDoc::from(&dist);
    emit_document(cli.format, parameters, Payload::Distribution(doc), || {
        render_polynomial(&dist)
    })
}

fn cmd_check_report(path: &str) -> Result<(), Failure> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| usage(e.to_string()))?
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?
    };
    let doc = from_json(&text)?;
    println!(
        "ok: schema {} payload {}",
        doc.schema_version,
        match doc.payload {
            Payload::Distribution(_) => "distribution",
            Payload::Labeling(_) => "labeling",
            Payload::Trace(_) => "trace",
            Payload::CheckReports(_) => "check_reports",
            Payload::Table1(_) => "table1",
            Payload::Stats(_) => "stats",
        }
    );
    Ok(())
}

fn cmd_equidist(cli: &Cli, perm: &str, params: &GapLevel, variant: Variant) -> Result<(), Failure> {
    let q = parse_perm(perm)?;
    let (g, ell) = (params.g().map_err(usage)?, params.ell().map_err(usage)?);
    let variant = match variant {
        Variant::DenL => DenVariant::DenL,
        Variant::DenGl => DenVariant::DenGl,
    };
    let image = equidist_map(&q, g, ell, variant)?;
    match cli.format {
        OutputFormat::Json => {
            let value = serde_json::json!({
                "input": q.to_string(),
                "image": image.to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
        _ => println!("{image}"),
    }
    Ok(())
}
