//! Subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use decat_core::format::{print_instance, print_morphism, print_schema};
use decat_core::{
    build_basis, canonical_relabeling, class_of, count_homs, enumerate_homs, enumerate_instances, profile_instance,
    table_of_marks, to_ring, CanonicalForm, Instance, Schema,
};
use decat_harness::{run_suite, Engine, Status, SuiteConfig, VerificationReport, SUITES};

use crate::expr::{eval_expr, format_element, parse_expr, Defs};
use crate::load::{bounds_for, guard, load_defs, load_document, load_instance, load_schema};
use crate::{corpus, CliError, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "decat",
    version,
    about = "Finite instances of presented schemas: homs, decompositions, ring arithmetic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate every declaration in a file.
    Validate { file: PathBuf },
    /// Count or list the homomorphisms from one instance to another.
    Hom {
        source: PathBuf,
        target: PathBuf,
        /// Print the number of homomorphisms (the default).
        #[arg(long, conflicts_with = "list")]
        count: bool,
        /// Print every homomorphism as a morphism declaration.
        #[arg(long)]
        list: bool,
    },
    /// Connected components with their multiplicities.
    Decompose {
        file: PathBuf,
        /// Directory of `.inst` files naming the components.
        #[arg(long)]
        defs: Option<PathBuf>,
    },
    /// Canonical form digest, canonical representative and the isomorphism onto it.
    Canon { file: PathBuf },
    /// Evaluate a ring expression such as `A2*A2 - A2 - 2*K1`.
    Eval {
        expr: String,
        /// Directory of `.inst` files defining the identifiers.
        #[arg(long)]
        defs: Option<PathBuf>,
        /// Schema for expressions without identifiers.
        #[arg(long)]
        schema: Option<String>,
    },
    /// Hom counts from every connected instance within the bounds.
    Profile {
        file: PathBuf,
        #[arg(long)]
        upto: Option<String>,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        defs: Option<PathBuf>,
    },
    /// One canonical representative per isomorphism class within the bounds.
    Enumerate {
        #[arg(long)]
        schema: String,
        #[arg(long)]
        upto: Option<String>,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        defs: Option<PathBuf>,
    },
    /// Table of marks of a schema presenting a finite group.
    Marks {
        #[arg(long)]
        schema: String,
        #[arg(long)]
        upto: Option<String>,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        defs: Option<PathBuf>,
    },
    /// Run verification suites. Exit 0 on PASS, 2 on FINDING, 1 on FAIL.
    Verify {
        /// A suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Bundled schema name or path to a schema file.
        #[arg(long)]
        schema: String,
        #[arg(long)]
        upto: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Write the reports as JSON to this path.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Coproduct construction under test: `standard` or `shared-tag`.
        #[arg(long, default_value = "standard")]
        engine: String,
        #[arg(long)]
        force: bool,
    },
}

pub fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Validate { file } => validate(&file),
        Command::Hom { source, target, list, .. } => hom(&source, &target, list),
        Command::Decompose { file, defs } => decompose(&file, defs.as_deref()),
        Command::Canon { file } => canon(&file),
        Command::Eval { expr, defs, schema } => eval(&expr, defs.as_deref(), schema.as_deref()),
        Command::Profile { file, upto, force, defs } => profile(&file, upto.as_deref(), force, defs.as_deref()),
        Command::Enumerate { schema, upto, force, defs } => enumerate(&schema, upto.as_deref(), force, defs.as_deref()),
        Command::Marks { schema, upto, force, defs } => marks(&schema, upto.as_deref(), force, defs.as_deref()),
        Command::Verify { suite, schema, upto, seed, trials, report, engine, force } => {
            verify(&suite, &schema, upto.as_deref(), seed, trials, report.as_deref(), &engine, force)
        }
    }
}

fn defs_or_bundled(dir: Option<&Path>) -> Result<Defs, CliError> {
    match dir {
        Some(d) => load_defs(d),
        None => Ok(corpus::defs()),
    }
}

fn sizes(inst: &Instance) -> String {
    let s = inst.schema();
    let parts: Vec<String> = s.nodes().iter().zip(inst.sizes()).map(|(n, k)| format!("{n}={k}")).collect();
    parts.join(", ")
}

/// Label of a connected form, or the ring element of a whole instance.
fn describe(inst: &Arc<Instance>, defs: &Defs) -> Result<String, CliError> {
    Ok(format_element(&to_ring(&class_of(inst)?), defs))
}

fn validate(file: &Path) -> Result<Outcome, CliError> {
    let doc = load_document(file)?;
    let mut out = String::new();
    for s in &doc.schemas {
        let _ = writeln!(
            out,
            "schema {}: {} nodes, {} arrows, {} relations",
            s.name(),
            s.node_count(),
            s.arrows().len(),
            s.relations().len()
        );
    }
    for (name, inst) in &doc.instances {
        let _ = writeln!(out, "instance {name} : {} ({})", inst.schema().name(), sizes(inst));
    }
    for (name, _) in &doc.morphisms {
        let _ = writeln!(out, "morphism {name}");
    }
    if doc.schemas.is_empty() && doc.instances.is_empty() && doc.morphisms.is_empty() {
        return Err(CliError::Usage(format!("{}: no declarations", file.display())));
    }
    Ok(Outcome::ok(out))
}

fn hom(source: &Path, target: &Path, list: bool) -> Result<Outcome, CliError> {
    let (sname, x) = load_instance(source)?;
    let (tname, y) = load_instance(target)?;
    if !x.same_schema(&y) {
        return Err(CliError::Usage(format!(
            "{} is over schema `{}` but {} over `{}`",
            source.display(),
            x.schema().name(),
            target.display(),
            y.schema().name()
        )));
    }
    if !list {
        return Ok(Outcome::ok(format!("{}\n", count_homs(&x, &y)?)));
    }
    let homs = enumerate_homs(&x, &y)?;
    let mut out = String::new();
    for (k, m) in homs.morphisms.iter().enumerate() {
        out.push_str(&print_morphism(&format!("h{k}"), &sname, &tname, m));
    }
    Ok(Outcome::ok(out))
}

fn decompose(file: &Path, defs: Option<&Path>) -> Result<Outcome, CliError> {
    let (_, inst) = load_instance(file)?;
    let defs = defs_or_bundled(defs)?;
    let class = class_of(&inst)?;
    let mut lines: Vec<(String, u64)> = class.parts().iter().map(|(f, &m)| (defs.display_label(f), m)).collect();
    lines.sort();
    let out: String = lines.into_iter().map(|(label, m)| format!("{label} ×{m}\n")).collect();
    Ok(Outcome::ok(out))
}

fn canon(file: &Path) -> Result<Outcome, CliError> {
    let (name, inst) = load_instance(file)?;
    let (rep, iso) = canonical_relabeling(&inst);
    let digest = decat_core::canonical_form(&inst).digest();
    let canon_name = format!("{name}_canon");
    let mut out = format!("# digest {digest}\n");
    out.push_str(&print_schema(inst.schema()));
    out.push_str(&print_instance(&name, &inst));
    out.push_str(&print_instance(&canon_name, &rep));
    out.push_str(&print_morphism(&format!("{name}_iso"), &name, &canon_name, &iso));
    Ok(Outcome::ok(out))
}

fn eval(text: &str, defs: Option<&Path>, schema: Option<&str>) -> Result<Outcome, CliError> {
    let e = parse_expr(text)?;
    let defs = defs_or_bundled(defs)?;
    let schema = schema.map(load_schema).transpose()?;
    let r = eval_expr(&e, &defs, schema.as_ref())?;
    Ok(Outcome::ok(format!("{}\n", format_element(&r, &defs))))
}

fn label_lines(out: &mut String, forms: impl Iterator<Item = CanonicalForm>, defs: &Defs) {
    for (k, f) in forms.enumerate() {
        let _ = writeln!(out, "# {k} {}", defs.display_label(&f));
    }
}

fn profile(file: &Path, upto: Option<&str>, force: bool, defs: Option<&Path>) -> Result<Outcome, CliError> {
    let (_, inst) = load_instance(file)?;
    let schema = inst.schema();
    let bounds = bounds_for(schema, upto)?;
    guard(schema, &bounds, force)?;
    let defs = defs_or_bundled(defs)?;
    let basis = build_basis(schema, &bounds);
    let row = profile_instance(&inst, &basis)?;
    let mut out = format!("# basis of {} connected instances, {}\n", basis.len(), bounds.display(schema));
    label_lines(&mut out, basis.forms().cloned(), &defs);
    out.push_str(&join_row(row.entries()));
    Ok(Outcome::ok(out))
}

fn join_row<T: ToString>(row: &[T]) -> String {
    let mut line = row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    line.push('\n');
    line
}

fn enumerate(schema: &str, upto: Option<&str>, force: bool, defs: Option<&Path>) -> Result<Outcome, CliError> {
    let schema: Arc<Schema> = load_schema(schema)?;
    let bounds = bounds_for(&schema, upto)?;
    guard(&schema, &bounds, force)?;
    let defs = defs_or_bundled(defs)?;
    let members = enumerate_instances(&schema, &bounds);
    let mut out =
        format!("# {} isomorphism classes of {}, {}\n", members.len(), schema.name(), bounds.display(&schema));
    for (k, m) in members.iter().enumerate() {
        let _ = writeln!(out, "# R{k} {}", describe(&m.instance, &defs)?);
        out.push_str(&print_instance(&format!("R{k}"), &m.instance));
    }
    Ok(Outcome::ok(out))
}

fn marks(schema: &str, upto: Option<&str>, force: bool, defs: Option<&Path>) -> Result<Outcome, CliError> {
    let schema: Arc<Schema> = load_schema(schema)?;
    let bounds = bounds_for(&schema, upto)?;
    guard(&schema, &bounds, force)?;
    let defs = defs_or_bundled(defs)?;
    let table = table_of_marks(&schema, &bounds)?;
    let mut out =
        format!("# {} transitive instances, largest first, {}\n", table.transitive.len(), bounds.display(&schema));
    label_lines(&mut out, table.transitive.iter().map(|m| m.form.clone()), &defs);
    for row in &table.matrix {
        out.push_str(&join_row(row));
    }
    Ok(Outcome::ok(out))
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suite: &str,
    schema: &str,
    upto: Option<&str>,
    seed: u64,
    trials: u64,
    report: Option<&Path>,
    engine: &str,
    force: bool,
) -> Result<Outcome, CliError> {
    let engine = Engine::from_name(engine)
        .ok_or_else(|| CliError::Usage(format!("unknown engine `{engine}`; expected `standard` or `shared-tag`")))?;
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => {
            return Err(CliError::Usage(format!("unknown suite `{s}`; expected `all` or one of {}", SUITES.join(", "))))
        }
    };
    let schema: Arc<Schema> = load_schema(schema)?;
    let bounds = bounds_for(&schema, upto)?;
    guard(&schema, &bounds, force)?;
    let cfg = SuiteConfig::new(&schema, bounds, seed, trials).with_engine(engine);
    let reports: Vec<VerificationReport> =
        names.iter().map(|s| run_suite(s, &cfg)).collect::<Result<_, _>>().map_err(CliError::Usage)?;
    let status = reports.iter().fold(Status::Pass, |acc, r| acc.worst(r.status));
    if let Some(path) = report {
        let json = if suite == "all" {
            serde_json::to_string_pretty(&reports).expect("reports serialize")
        } else {
            reports[0].to_json()
        } + "\n";
        fs::write(path, json).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    }
    let mut out: String = reports.iter().map(VerificationReport::to_text).collect();
    let _ = writeln!(out, "{}", status.as_str());
    Ok(Outcome { stdout: out, code: status.exit_code() })
}
