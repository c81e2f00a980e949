use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use xmodcat::action::{
    adjoint_action, check_compositor_coherence, validate_strict_action, ActionKind, StrictAction,
    WeakActionData,
};
use xmodcat::catalog;
use xmodcat::config::VerifyConfig;
use xmodcat::fincat::{category_from_tables, FiniteGroupoid};
use xmodcat::formats::{self, FormatError};
use xmodcat::quintet::dsl::parse_grid;
use xmodcat::quintet::{
    evaluate_grid, evaluate_grid_columns_first, verify_quintet_laws, QuintetGrid,
};
use xmodcat::report::Report;
use xmodcat::transform::{
    export_dot, export_json, horizontal_2category, nested_inclusions, suite_modes, transpose_views,
    verify_double_category, vertical_2category, TransDoubleCat,
};
use xmodcat::xmod::{validate_crossed_module, XmodError};

#[derive(Parser)]
#[command(
    name = "xmodcat",
    version,
    about = "Crossed modules, 2-group actions and transformation double categories"
)]
struct Cli {
    /// Human-readable output instead of JSON lines.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a group, crossed module, category or action file.
    Validate {
        #[arg(long, value_enum)]
        kind: Kind,
        path: PathBuf,
    },
    /// Build the transformation double category of an action.
    Build {
        #[command(flatten)]
        target: Target,
        /// Write the JSON double category here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the horizontal 2-category.
        #[arg(long)]
        h2cat: bool,
        /// Include the vertical 2-category.
        #[arg(long)]
        v2cat: bool,
        /// Write objects.dot and morphisms.dot into this directory.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Evaluate a grid of quintet squares.
    Eval {
        path: PathBuf,
        /// Also fold columns first and fail if the results differ.
        #[arg(long)]
        check_interchange: bool,
    },
    /// Run every law suite that applies to an action.
    Verify {
        #[command(flatten)]
        target: Target,
        #[arg(long, conflicts_with = "samples")]
        exhaustive: bool,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the double category as JSON or its groupoids as DOT.
    Export {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List the built-in crossed modules, or write them as fixture files.
    Catalog {
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Target {
    /// Action file.
    #[arg(required_unless_present = "adjoint", conflicts_with = "adjoint")]
    path: Option<PathBuf>,
    /// Use the adjoint action of this crossed module.
    #[arg(long)]
    adjoint: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Group,
    Xmod,
    Category,
    Action,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

struct Out {
    pretty: bool,
}

impl Out {
    fn line(&self, v: Value) {
        println!("{v}");
    }

    /// One line per law: counts, plus the first witness when it failed.
    fn report(&self, suite: &str, report: &Report) {
        if self.pretty {
            println!("[{suite}]");
            print!("{report}");
            return;
        }
        for t in report.tallies() {
            let mut v = json!({
                "suite": suite,
                "law": t.law,
                "status": if t.failed == 0 { "pass" } else { "fail" },
                "checked": t.checked,
                "failed": t.failed,
            });
            if let Some(first) = report.violations_of(t.law).next() {
                v["witness"] = serde_json::to_value(&first.witness).expect("witness");
            }
            self.line(v);
        }
    }

    fn failure(&self, suite: &str, message: String) {
        if self.pretty {
            println!("[{suite}]\nFAIL {message}");
        } else {
            self.line(json!({"suite": suite, "status": "fail", "error": message}));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("XMODCAT_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: XMODCAT_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let out = Out { pretty: cli.pretty };
    match run(cli.command, &out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let format_error = e.downcast_ref::<FormatError>();
            match format_error {
                Some(f) => eprintln!("error: {f}"),
                None => eprintln!("error: {e:#}"),
            }
            let law_failure = format_error.is_some_and(|f| !f.is_input_error());
            ExitCode::from(if law_failure { 1 } else { 2 })
        }
    }
}

fn run(command: Command, out: &Out) -> Result<bool> {
    match command {
        Command::Validate { kind, path } => validate(kind, &path, out),
        Command::Build {
            target,
            out: out_path,
            h2cat,
            v2cat,
            dot,
        } => build(
            &target,
            out_path.as_deref(),
            h2cat,
            v2cat,
            dot.as_deref(),
            out,
        ),
        Command::Eval {
            path,
            check_interchange,
        } => eval(&path, check_interchange, out),
        Command::Verify {
            target,
            exhaustive,
            samples,
            seed,
        } => {
            let cfg = match (exhaustive, samples) {
                (true, _) => VerifyConfig {
                    seed,
                    ..VerifyConfig::exhaustive()
                },
                (false, Some(n)) => VerifyConfig::sampled(n, seed),
                (false, None) => VerifyConfig {
                    seed,
                    ..VerifyConfig::default()
                },
            };
            verify(&target, &cfg, out)
        }
        Command::Export { target, format } => export(&target, format),
        Command::Catalog { write } => catalog_cmd(write.as_deref(), out),
    }
}

fn validate(kind: Kind, path: &Path, out: &Out) -> Result<bool> {
    let structural = |e: FormatError, suite: &str| -> Result<bool> {
        if e.is_input_error() {
            return Err(e.into());
        }
        out.failure(suite, e.to_string());
        Ok(false)
    };
    match kind {
        Kind::Group => match formats::load_group(path) {
            Ok(g) => {
                out.line(json!({"suite": "group", "status": "pass", "order": g.order()}));
                Ok(true)
            }
            Err(e) => structural(e, "group"),
        },
        Kind::Xmod => {
            let xm = formats::load_xmod(path)?;
            match validate_crossed_module(&xm) {
                Ok(report) => {
                    out.report("xmod", &report);
                    Ok(report.is_empty())
                }
                Err(XmodError::ComponentInvalid { component, report }) => {
                    out.report(&format!("xmod/{component}"), &report);
                    Ok(false)
                }
                Err(e) => {
                    out.failure("xmod", e.to_string());
                    Ok(false)
                }
            }
        }
        Kind::Category => match formats::load_category(path) {
            Ok(c) => {
                out.line(json!({
                    "suite": "category", "status": "pass",
                    "objects": c.n_objects(), "morphisms": c.n_morphisms(),
                }));
                Ok(true)
            }
            Err(e) => structural(e, "category"),
        },
        Kind::Action => match formats::load_action(path) {
            Ok(a) => {
                let report = validate_strict_action(&a)?;
                out.report("action", &report);
                Ok(report.is_empty())
            }
            Err(e) => structural(e, "action"),
        },
    }
}

fn load_target(target: &Target) -> Result<StrictAction> {
    match (&target.path, &target.adjoint) {
        (_, Some(x)) => Ok(adjoint_action(Arc::new(formats::load_valid_xmod(x)?))),
        (Some(p), None) => Ok(formats::load_action(p)?),
        (None, None) => bail!("either an action file or --adjoint is required"),
    }
}

fn target_name(target: &Target) -> String {
    match (&target.path, &target.adjoint) {
        (_, Some(x)) => format!("adjoint:{}", x.display()),
        (Some(p), None) => p.display().to_string(),
        (None, None) => String::new(),
    }
}

fn object_label(a: &StrictAction) -> impl Fn(usize) -> String + '_ {
    move |x| match a.kind() {
        ActionKind::Adjoint => a.xmod().g().name(x),
        _ => x.to_string(),
    }
}

fn morphism_label(a: &StrictAction) -> impl Fn(usize) -> String + '_ {
    move |f| match a.kind() {
        ActionKind::Adjoint => {
            let xm = a.xmod();
            let nh = xm.h().order();
            format!("({}, {})", xm.g().name(f / nh), xm.h().name(f % nh))
        }
        _ => f.to_string(),
    }
}

fn write_dots(d: &TransDoubleCat, dir: &Path) -> Result<usize> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let views = transpose_views(d)?;
    let a = d.action();
    let objects = export_dot(&views.object_groupoid, "objects", object_label(a));
    let morphisms = export_dot(&views.morphism_groupoid, "morphisms", morphism_label(a));
    for (name, text) in [("objects.dot", objects), ("morphisms.dot", morphisms)] {
        let p = dir.join(name);
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(views.object_groupoid.components().len())
}

fn build(
    target: &Target,
    out_path: Option<&Path>,
    h2cat: bool,
    v2cat: bool,
    dot: Option<&Path>,
    out: &Out,
) -> Result<bool> {
    let action = load_target(target)?;
    let report = validate_strict_action(&action)?;
    if !report.is_empty() {
        out.report("action", &report);
        return Ok(false);
    }
    let d = TransDoubleCat::build_unchecked(action);
    let mut doc = export_json(&d);
    if h2cat {
        doc["h2cat"] = serde_json::to_value(horizontal_2category(&d).cells)?;
    }
    if v2cat {
        doc["v2cat"] = serde_json::to_value(vertical_2category(&d).cells)?;
    }
    let components = dot.map(|dir| write_dots(&d, dir)).transpose()?;
    match out_path {
        Some(p) => {
            formats::write_json(p, &doc)?;
            let mut summary = json!({
                "objects": d.n_objects(),
                "horizontal": d.n_horizontal(),
                "vertical": d.n_vertical(),
                "squares": d.n_squares(),
            });
            if let Some(k) = components {
                summary["object_components"] = json!(k);
            }
            out.line(summary);
        }
        None => println!("{doc}"),
    }
    Ok(true)
}

fn eval(path: &Path, check_interchange: bool, out: &Out) -> Result<bool> {
    let grid: QuintetGrid = if path.extension().is_some_and(|e| e == "json") {
        match formats::load_grid_json(path) {
            Ok(g) => g,
            Err(e) if !e.is_input_error() => {
                out.failure("eval", e.to_string());
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let parsed = parse_grid(&text, |p| {
            formats::load_valid_xmod(&base.join(p))
                .map(Arc::new)
                .map_err(|e| e.to_string())
        });
        match parsed {
            Ok(p) => p.grid,
            Err(e) => {
                eprintln!("{}:{e}", path.display());
                if out.pretty {
                    println!("{e}");
                } else {
                    out.line(json!({
                        "error": e.kind, "line": e.line, "col": e.col, "message": e.message,
                    }));
                }
                return Ok(false);
            }
        }
    };
    let result = match evaluate_grid(&grid) {
        Ok(q) => q,
        Err(e) => {
            out.failure("eval", e.to_string());
            return Ok(false);
        }
    };
    if check_interchange {
        let other = evaluate_grid_columns_first(&grid);
        if other.as_ref() != Ok(&result) {
            out.failure(
                "eval",
                format!("rows-first gives {result:?}, columns-first gives {other:?}"),
            );
            return Ok(false);
        }
    }
    if out.pretty {
        println!(
            "left={} top={} right={} bottom={} face={}",
            result.left, result.top, result.right, result.bottom, result.face
        );
    } else {
        out.line(serde_json::to_value(result)?);
    }
    Ok(true)
}

fn verify(target: &Target, cfg: &VerifyConfig, out: &Out) -> Result<bool> {
    let action = load_target(target)?;
    let xm = action.xmod().clone();
    let d = TransDoubleCat::build_unchecked(action.clone());
    let modes: serde_json::Map<String, Value> = suite_modes(&d, cfg)
        .into_iter()
        .map(|(law, ex)| {
            (
                law.to_string(),
                json!(if ex { "exhaustive" } else { "sampled" }),
            )
        })
        .collect();
    let header = json!({
        "verify": target_name(target),
        "mode": cfg.mode,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "suites": modes,
    });
    if out.pretty {
        println!(
            "verify {} (mode {:?}, samples {}, seed {})",
            target_name(target),
            cfg.mode,
            cfg.samples,
            cfg.seed
        );
    } else {
        out.line(header);
    }

    let mut failed: Vec<String> = Vec::new();
    let record = |failed: &mut Vec<String>, suite: &str, report: &Report| {
        out.report(suite, report);
        failed.extend(
            report
                .failed_laws()
                .into_iter()
                .map(|law| format!("{suite}/{law}")),
        );
    };

    record(&mut failed, "xmod", &validate_crossed_module(&xm)?);
    record(&mut failed, "quintet", &verify_quintet_laws(&xm, cfg));
    record(&mut failed, "action", &validate_strict_action(&action)?);
    record(
        &mut failed,
        "compositor",
        &check_compositor_coherence(&WeakActionData::identity_compositor(action.clone())),
    );
    record(&mut failed, "double", &verify_double_category(&d, cfg));
    match transpose_views(&d) {
        Ok(views) => record(&mut failed, "transpose", &views.report),
        Err(e) => {
            out.failure("transpose", e.to_string());
            failed.push("transpose/build".into());
        }
    }
    match nested_inclusions(&d) {
        Ok(n) => record(&mut failed, "inclusions", &n.report),
        Err(e) => {
            out.failure("inclusions", e.to_string());
            failed.push("inclusions/build".into());
        }
    }
    record(&mut failed, "h2cat", &horizontal_2category(&d).report);
    record(&mut failed, "v2cat", &vertical_2category(&d).report);

    let pass = failed.is_empty();
    if out.pretty {
        println!("{}", if pass { "all laws pass" } else { "FAILED" });
    } else {
        out.line(json!({"status": if pass { "pass" } else { "fail" }, "failed_laws": failed}));
    }
    Ok(pass)
}

fn export(target: &Target, format: Format) -> Result<bool> {
    let action = load_target(target)?;
    let d = TransDoubleCat::build_unchecked(action);
    match format {
        Format::Json => println!("{}", export_json(&d)),
        Format::Dot => {
            let views = transpose_views(&d)?;
            let a = d.action();
            print!(
                "{}",
                export_dot(&views.object_groupoid, "objects", object_label(a))
            );
            print!(
                "{}",
                export_dot(&views.morphism_groupoid, "morphisms", morphism_label(a))
            );
        }
    }
    Ok(true)
}

fn groupoid_summary(g: &FiniteGroupoid) -> Value {
    json!({"objects": g.category().n_objects(), "components": g.components().len()})
}

fn catalog_cmd(write: Option<&Path>, out: &Out) -> Result<bool> {
    let Some(dir) = write else {
        for (name, xm) in catalog::crossed_modules() {
            let d = TransDoubleCat::build_unchecked(adjoint_action(Arc::new(xm.clone())));
            let objects = transpose_views(&d)?.object_groupoid;
            out.line(json!({
                "name": name,
                "G": xm.g().order(),
                "H": xm.h().order(),
                "kernel": xm.kernel(),
                "image": xm.image(),
                "adjoint_squares": d.n_squares(),
                "adjoint_objects": groupoid_summary(&objects),
            }));
        }
        return Ok(true);
    };
    write_fixtures(dir)?;
    out.line(json!({"written": dir.display().to_string()}));
    Ok(true)
}

fn write_fixtures(dir: &Path) -> Result<()> {
    for sub in ["groups", "categories", "actions"] {
        fs::create_dir_all(dir.join(sub))
            .with_context(|| format!("creating {}", dir.join(sub).display()))?;
    }
    for (name, g) in catalog::small_groups() {
        formats::write_json(
            &dir.join(format!("groups/{name}.json")),
            &formats::group_to_spec(&g),
        )?;
    }
    let refs = [
        ("xm1", catalog::xm1(), ("groups/z2.json", "groups/z3.json")),
        ("xm2", catalog::xm2(), ("groups/s3.json", "groups/s3.json")),
        (
            "xm3",
            catalog::xm3(),
            ("groups/trivial.json", "groups/z2.json"),
        ),
        ("xm4", catalog::xm4(), ("groups/z4.json", "groups/z4.json")),
        (
            "trivial",
            catalog::trivial_xmod(),
            ("groups/trivial.json", "groups/trivial.json"),
        ),
    ];
    for (name, xm, groups) in &refs {
        let spec = formats::xmod_to_spec(xm, Some(*groups));
        formats::write_json(&dir.join(format!("{name}.json")), &spec)?;
    }
    formats::write_json(
        &dir.join("bad_peiffer.json"),
        &formats::xmod_to_spec(&catalog::bad_peiffer(), None),
    )?;

    let terminal = category_from_tables(1, &[(0, 0)], &[0], &[(0, 0, 0)])?;
    formats::write_json(
        &dir.join("categories/terminal.json"),
        &formats::category_to_spec(&terminal),
    )?;
    let trivial =
        xmodcat::action::trivial_action(Arc::new(catalog::trivial_xmod()), Arc::new(terminal));
    formats::write_json(
        &dir.join("actions/trivial.json"),
        &formats::action_to_spec(
            &trivial,
            Some("../trivial.json"),
            Some("../categories/terminal.json"),
        ),
    )?;
    for (name, xm) in catalog::crossed_modules() {
        let a = adjoint_action(Arc::new(xm));
        let mut spec = formats::action_to_spec(&a, Some(format!("../{name}.json").as_str()), None);
        spec.category = formats::Ref::Path("underlying".into());
        formats::write_json(&dir.join(format!("actions/adjoint_{name}.json")), &spec)?;
    }
    Ok(())
}
