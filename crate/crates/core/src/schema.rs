//! Finite presentations of index categories: a quiver plus path equations.
//!
//! Paths compose left to right, so `s.t` means "apply `s`, then `t`". The empty
//! path at a node is written `id@X` and denotes the identity.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result, Violation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowDef {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// An unresolved path as written in a schema file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathDef {
    Identity(String),
    Arrows(Vec<String>),
}

/// A schema by names, before any checks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemaDef {
    pub name: String,
    pub nodes: Vec<String>,
    pub arrows: Vec<ArrowDef>,
    pub relations: Vec<(PathDef, PathDef)>,
}

impl SchemaDef {
    pub fn new(name: impl Into<String>) -> Self {
        SchemaDef { name: name.into(), ..Default::default() }
    }

    pub fn node(mut self, id: &str) -> Self {
        self.nodes.push(id.to_string());
        self
    }

    pub fn arrow(mut self, id: &str, source: &str, target: &str) -> Self {
        self.arrows.push(ArrowDef { name: id.into(), source: source.into(), target: target.into() });
        self
    }

    /// Adds a relation between two dotted paths; `id@X` is the empty path at `X`.
    pub fn relation(mut self, lhs: &str, rhs: &str) -> Self {
        self.relations.push((PathDef::parse(lhs), PathDef::parse(rhs)));
        self
    }
}

impl PathDef {
    /// Parses `a.b.c` or `id@X`. No validation beyond splitting.
    pub fn parse(text: &str) -> Self {
        let text = text.trim();
        if let Some(node) = text.strip_prefix("id@") {
            PathDef::Identity(node.trim().to_string())
        } else {
            PathDef::Arrows(text.split('.').map(|s| s.trim().to_string()).collect())
        }
    }
}

impl fmt::Display for PathDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathDef::Identity(node) => write!(f, "id@{node}"),
            PathDef::Arrows(arrows) => write!(f, "{}", arrows.join(".")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A resolved path: a start node and composable arrow indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub start: usize,
    pub arrows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Path,
    pub rhs: Path,
}

/// A validated schema with index-based arrows and relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    name: String,
    nodes: Vec<String>,
    arrows: Vec<Arrow>,
    relations: Vec<Relation>,
    out_arrows: Vec<Vec<usize>>,
    in_arrows: Vec<Vec<usize>>,
}

/// Checks every schema invariant and returns all violations found.
pub fn validate_schema(def: &SchemaDef) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();

    let mut seen = HashSet::new();
    for node in &def.nodes {
        if !seen.insert(node.as_str()) {
            violations.push(Violation::DuplicateIdentifier { kind: "node", id: node.clone() });
        }
    }
    let mut seen_arrows = HashSet::new();
    for arrow in &def.arrows {
        if !seen_arrows.insert(arrow.name.as_str()) {
            violations.push(Violation::DuplicateIdentifier { kind: "arrow", id: arrow.name.clone() });
        }
        for endpoint in [&arrow.source, &arrow.target] {
            if !seen.contains(endpoint.as_str()) {
                violations.push(Violation::DanglingEndpoint { arrow: arrow.name.clone(), node: endpoint.clone() });
            }
        }
    }

    for (index, (lhs, rhs)) in def.relations.iter().enumerate() {
        let l = resolve_path(def, index, lhs, &mut violations);
        let r = resolve_path(def, index, rhs, &mut violations);
        if let (Some(l), Some(r)) = (l, r) {
            if l != r {
                violations.push(Violation::NonParallelRelation { relation: index });
            }
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Returns the (source, target) node names of a path, recording any problems.
fn resolve_path<'a>(
    def: &'a SchemaDef,
    relation: usize,
    path: &'a PathDef,
    violations: &mut Vec<Violation>,
) -> Option<(&'a str, &'a str)> {
    match path {
        PathDef::Identity(node) => {
            if def.nodes.iter().any(|n| n == node) {
                Some((node, node))
            } else {
                violations.push(Violation::UnknownNode { node: node.clone() });
                None
            }
        }
        PathDef::Arrows(names) => {
            let mut ends: Option<(&str, &str)> = None;
            let mut ok = true;
            for (position, name) in names.iter().enumerate() {
                let Some(arrow) = def.arrows.iter().find(|a| &a.name == name) else {
                    violations.push(Violation::UnknownArrow { relation, arrow: name.clone() });
                    ok = false;
                    continue;
                };
                ends = match ends {
                    None => Some((&arrow.source, &arrow.target)),
                    Some((start, end)) => {
                        if end != arrow.source {
                            violations.push(Violation::BrokenPath { relation, position });
                            ok = false;
                        }
                        Some((start, &arrow.target))
                    }
                };
            }
            if names.is_empty() {
                violations.push(Violation::BrokenPath { relation, position: 0 });
                ok = false;
            }
            if ok {
                ends
            } else {
                None
            }
        }
    }
}

impl Schema {
    pub fn new(def: SchemaDef) -> Result<Schema> {
        validate_schema(&def).map_err(Error::InvalidSchema)?;
        let node_index = |name: &str| def.nodes.iter().position(|n| n == name).expect("validated");
        let arrows: Vec<Arrow> = def
            .arrows
            .iter()
            .map(|a| Arrow { name: a.name.clone(), source: node_index(&a.source), target: node_index(&a.target) })
            .collect();
        let arrow_index = |name: &str| arrows.iter().position(|a| a.name == name).expect("validated");
        let compile = |p: &PathDef| match p {
            PathDef::Identity(node) => Path { start: node_index(node), arrows: vec![] },
            PathDef::Arrows(names) => {
                let arrows_ix: Vec<usize> = names.iter().map(|n| arrow_index(n)).collect();
                Path { start: arrows[arrows_ix[0]].source, arrows: arrows_ix }
            }
        };
        let relations = def.relations.iter().map(|(l, r)| Relation { lhs: compile(l), rhs: compile(r) }).collect();

        let mut out_arrows = vec![Vec::new(); def.nodes.len()];
        let mut in_arrows = vec![Vec::new(); def.nodes.len()];
        for (i, a) in arrows.iter().enumerate() {
            out_arrows[a.source].push(i);
            in_arrows[a.target].push(i);
        }
        Ok(Schema { name: def.name, nodes: def.nodes, arrows, relations, out_arrows, in_arrows })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Arrows whose source is `node`, in declaration order.
    pub fn out_arrows(&self, node: usize) -> &[usize] {
        &self.out_arrows[node]
    }

    /// Arrows whose target is `node`, in declaration order.
    pub fn in_arrows(&self, node: usize) -> &[usize] {
        &self.in_arrows[node]
    }

    /// Target node of a resolved path.
    pub fn path_end(&self, path: &Path) -> usize {
        path.arrows.last().map_or(path.start, |&a| self.arrows[a].target)
    }

    /// Resolves a path against this schema.
    pub fn path(&self, def: &PathDef) -> Result<Path> {
        match def {
            PathDef::Identity(node) => {
                let start = self.node_index(node).ok_or_else(|| Error::Unresolved(node.clone()))?;
                Ok(Path { start, arrows: vec![] })
            }
            PathDef::Arrows(names) => {
                let mut arrows = Vec::with_capacity(names.len());
                for name in names {
                    arrows.push(self.arrow_index(name).ok_or_else(|| Error::Unresolved(name.clone()))?);
                }
                let Some(&first) = arrows.first() else {
                    return Err(Error::Domain("empty arrow path".into()));
                };
                for pair in arrows.windows(2) {
                    if self.arrows[pair[0]].target != self.arrows[pair[1]].source {
                        return Err(Error::Domain(format!("path {def} does not compose")));
                    }
                }
                Ok(Path { start: self.arrows[first].source, arrows })
            }
        }
    }

    pub fn path_def(&self, path: &Path) -> PathDef {
        if path.arrows.is_empty() {
            PathDef::Identity(self.nodes[path.start].clone())
        } else {
            PathDef::Arrows(path.arrows.iter().map(|&a| self.arrows[a].name.clone()).collect())
        }
    }

    pub fn to_def(&self) -> SchemaDef {
        SchemaDef {
            name: self.name.clone(),
            nodes: self.nodes.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowDef {
                    name: a.name.clone(),
                    source: self.nodes[a.source].clone(),
                    target: self.nodes[a.target].clone(),
                })
                .collect(),
            relations: self.relations.iter().map(|r| (self.path_def(&r.lhs), self.path_def(&r.rhs))).collect(),
        }
    }
}

/// Schemas used throughout the tests and bundled with the command-line tool.
pub mod presets {
    use super::*;

    /// Directed multigraphs with loops: edges `E`, vertices `V`, source `s`, target `t`.
    pub fn digraph() -> Schema {
        Schema::new(SchemaDef::new("digraph").node("V").node("E").arrow("s", "E", "V").arrow("t", "E", "V"))
            .expect("digraph schema")
    }

    /// Sets with an action of the cyclic group of order `n`, generated by `a`.
    pub fn cyclic(n: usize) -> Schema {
        assert!(n >= 1);
        let power = vec!["a"; n].join(".");
        Schema::new(SchemaDef::new(format!("c{n}")).node("X").arrow("a", "X", "X").relation(&power, "id@X"))
            .expect("cyclic schema")
    }

    pub fn c2() -> Schema {
        cyclic(2)
    }

    pub fn c3() -> Schema {
        cyclic(3)
    }

    /// Sets with an action of the symmetric group on three letters.
    pub fn s3() -> Schema {
        Schema::new(
            SchemaDef::new("s3")
                .node("X")
                .arrow("r", "X", "X")
                .arrow("s", "X", "X")
                .relation("r.r.r", "id@X")
                .relation("s.s", "id@X")
                .relation("r.s.r.s", "id@X"),
        )
        .expect("s3 schema")
    }

    /// Plain finite sets: the action of the trivial group.
    pub fn trivial() -> Schema {
        Schema::new(SchemaDef::new("trivial").node("X")).expect("trivial schema")
    }

    /// Sets with an arbitrary endofunction `f`.
    pub fn endo() -> Schema {
        Schema::new(SchemaDef::new("endo").node("X").arrow("f", "X", "X")).expect("endo schema")
    }

    /// A function `f: A -> B` between two sets.
    pub fn fun() -> Schema {
        Schema::new(SchemaDef::new("fun").node("A").node("B").arrow("f", "A", "B")).expect("fun schema")
    }

    pub fn by_name(name: &str) -> Option<Schema> {
        Some(match name {
            "digraph" => digraph(),
            "c2" => c2(),
            "c3" => c3(),
            "s3" => s3(),
            "trivial" => trivial(),
            "endo" => endo(),
            "fun" => fun(),
            _ => return None,
        })
    }

    pub const NAMES: &[&str] = &["digraph", "c2", "c3", "s3", "trivial", "endo", "fun"];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digraph_schema_is_valid() {
        let def = SchemaDef::new("digraph").node("V").node("E").arrow("s", "E", "V").arrow("t", "E", "V");
        assert_eq!(validate_schema(&def), Ok(()));
    }

    #[test]
    fn non_parallel_relation_is_rejected() {
        let def =
            SchemaDef::new("bad").node("V").node("E").arrow("s", "E", "V").arrow("l", "V", "V").relation("s", "l");
        let errs = validate_schema(&def).unwrap_err();
        assert_eq!(errs, vec![Violation::NonParallelRelation { relation: 0 }]);
    }

    #[test]
    fn c2_schema_is_valid() {
        let def = SchemaDef::new("c2").node("X").arrow("a", "X", "X").relation("a.a", "id@X");
        assert_eq!(validate_schema(&def), Ok(()));
    }

    #[test]
    fn dangling_and_duplicates_are_reported() {
        let def = SchemaDef::new("bad").node("V").node("V").arrow("s", "E", "V").arrow("s", "V", "V");
        let errs = validate_schema(&def).unwrap_err();
        assert!(errs.contains(&Violation::DuplicateIdentifier { kind: "node", id: "V".into() }));
        assert!(errs.contains(&Violation::DuplicateIdentifier { kind: "arrow", id: "s".into() }));
        assert!(errs.contains(&Violation::DanglingEndpoint { arrow: "s".into(), node: "E".into() }));
    }

    #[test]
    fn broken_path_is_reported() {
        let def =
            SchemaDef::new("bad").node("V").node("E").arrow("s", "E", "V").arrow("t", "E", "V").relation("s.t", "s.t");
        let errs = validate_schema(&def).unwrap_err();
        assert!(matches!(errs[0], Violation::BrokenPath { relation: 0, position: 1 }));
    }

    #[test]
    fn path_end_and_round_trip() {
        let s = presets::s3();
        let p = s.path(&PathDef::parse("r.s")).unwrap();
        assert_eq!(s.path_end(&p), 0);
        assert_eq!(Schema::new(s.to_def()).unwrap(), s);
    }
}
