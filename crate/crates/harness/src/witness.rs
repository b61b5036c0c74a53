//! Writing check inputs out as text and re-running them.

use std::sync::Arc;

use decat_core::format::{parse_document, print_instance, print_morphism, print_schema};
use decat_core::{Bounds, Instance, Schema};

use crate::engine::Engine;
use crate::properties::{evaluate, lookup, Args};
use crate::report::Witness;

/// Serializes the inputs of a failed check. Morphism endpoints missing from
/// the instance list are appended to it.
pub fn make_witness(property: &str, engine: Engine, args: &Args, message: String) -> Witness {
    let mut instances: Vec<Arc<Instance>> = args.instances.clone();
    let position = |inst: &Arc<Instance>, instances: &mut Vec<Arc<Instance>>| {
        instances.iter().position(|i| **i == **inst).unwrap_or_else(|| {
            instances.push(inst.clone());
            instances.len() - 1
        })
    };
    let ends: Vec<(usize, usize)> = args
        .morphisms
        .iter()
        .map(|m| (position(m.source(), &mut instances), position(m.target(), &mut instances)))
        .collect();
    let mut document = print_schema(&args.schema);
    for (i, inst) in instances.iter().enumerate() {
        document.push_str(&print_instance(&format!("I{i}"), inst));
    }
    for (k, (m, (s, t))) in args.morphisms.iter().zip(ends).enumerate() {
        document.push_str(&print_morphism(&format!("M{k}"), &format!("I{s}"), &format!("I{t}"), m));
    }
    Witness {
        property: property.to_string(),
        message,
        engine: engine.name().to_string(),
        seed: args.seed,
        bounds: args.bounds.as_ref().map(|b| b.display(&args.schema).to_string()),
        document,
    }
}

/// Rebuilds the inputs recorded in a witness.
pub fn witness_args(w: &Witness) -> Result<Args, String> {
    let doc = parse_document(&w.document, &|_| None).map_err(|e| format!("witness does not parse: {e}"))?;
    let schema: Arc<Schema> = doc.schemas.first().cloned().ok_or("witness has no schema")?;
    let bounds = match &w.bounds {
        Some(b) => Some(Bounds::parse(&schema, b).map_err(|e| e.to_string())?),
        None => None,
    };
    Ok(Args {
        schema,
        instances: doc.instances.into_iter().map(|(_, i)| i).collect(),
        morphisms: doc.morphisms.into_iter().map(|(_, m)| m).collect(),
        seed: w.seed,
        bounds,
    })
}

/// Re-runs the recorded check. `Ok(Some(message))` means it still fails.
pub fn replay(w: &Witness) -> Result<Option<String>, String> {
    let prop = lookup(&w.property).ok_or_else(|| format!("unknown property `{}`", w.property))?;
    let engine = Engine::from_name(&w.engine).ok_or_else(|| format!("unknown engine `{}`", w.engine))?;
    let args = witness_args(w)?;
    Ok(evaluate(prop, engine, &args).err())
}
