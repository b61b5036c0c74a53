//! Reading schema and instance files from disk.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use decat_core::format::{parse_document, parse_schema, Document};
use decat_core::{raw_candidates, Bounds, Instance, Schema};

use crate::corpus;
use crate::expr::Defs;
use crate::CliError;

/// Universes with more raw candidates than this need `--force`.
pub const RAW_CANDIDATE_LIMIT: u128 = 1_000_000;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}

/// Parses a file. Schemas not declared in it are looked up as
/// `<dir>/<name>.schema`, then among the bundled schemas.
pub fn load_document(path: &Path) -> Result<Document, CliError> {
    let text = read(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let failure: RefCell<Option<CliError>> = RefCell::new(None);
    let resolve = |name: &str| -> Option<Arc<Schema>> {
        let file = dir.join(format!("{name}.schema"));
        if file.is_file() {
            let parsed = read(&file).and_then(|t| parse_schema(&t).map_err(|e| CliError::in_file(&file, e)));
            return match parsed {
                Ok(s) => Some(Arc::new(s)),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    None
                }
            };
        }
        corpus::schema(name)
    };
    let doc = parse_document(&text, &resolve);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    doc.map_err(|e| CliError::in_file(path, e))
}

/// The single instance declared in a file.
pub fn load_instance(path: &Path) -> Result<(String, Arc<Instance>), CliError> {
    let doc = load_document(path)?;
    match doc.instances.len() {
        1 => Ok(doc.instances.into_iter().next().expect("one instance")),
        n => Err(CliError::Usage(format!("{}: expected one instance declaration, found {n}", path.display()))),
    }
}

/// A schema given by name (bundled) or by path to a schema file.
pub fn load_schema(name_or_path: &str) -> Result<Arc<Schema>, CliError> {
    let path = PathBuf::from(name_or_path);
    if path.is_file() {
        let text = read(&path)?;
        return parse_schema(&text).map(Arc::new).map_err(|e| CliError::in_file(&path, e));
    }
    corpus::schema(name_or_path)
        .ok_or_else(|| CliError::Usage(format!("unknown schema `{name_or_path}`: not a bundled schema or a file")))
}

/// Every instance in the `.inst` files of a directory, by declared name.
pub fn load_defs(dir: &Path) -> Result<Defs, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Io(dir.display().to_string(), e.to_string()))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "inst"))
        .collect();
    files.sort();
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    let mut defs = Defs::default();
    for file in files {
        for (name, inst) in load_document(&file)?.instances {
            if let Some(first) = seen.insert(name.clone(), file.clone()) {
                return Err(CliError::Usage(format!(
                    "instance `{name}` defined in both {} and {}",
                    first.display(),
                    file.display()
                )));
            }
            defs.insert(&name, inst);
        }
    }
    Ok(defs)
}

/// `text` parsed against the schema, or the default bounds for it.
pub fn bounds_for(schema: &Schema, text: Option<&str>) -> Result<Bounds, CliError> {
    match text {
        Some(text) => Bounds::parse(schema, text).map_err(|e| CliError::Usage(format!("bad bounds `{text}`: {e}"))),
        None => Ok(default_bounds(schema)),
    }
}

/// Bounds within the raw candidate limit at which every suite runs in
/// seconds on the bundled schemas.
pub fn default_bounds(schema: &Schema) -> Bounds {
    let n = match schema.name() {
        "c2" | "c3" | "s3" | "trivial" => 4,
        _ => 3,
    };
    Bounds::uniform(schema, n)
}

/// Refuses universes past the raw candidate limit unless forced.
pub fn guard(schema: &Schema, bounds: &Bounds, force: bool) -> Result<(), CliError> {
    let raw = raw_candidates(schema, bounds);
    if raw > RAW_CANDIDATE_LIMIT && !force {
        return Err(CliError::TooLarge { bounds: bounds.display(schema).to_string(), raw });
    }
    Ok(())
}
