//! Text formats for schemas, instances and morphisms.
//!
//! ```text
//! schema digraph { node V; node E; arrow s: E -> V; arrow t: E -> V; }
//! instance A2 : digraph { V = {0,1}; E = {e}; s = {e->0}; t = {e->1}; }
//! morphism f : A2 -> K1 { V = {0->v, 1->v}; E = {}; }
//! ```
//!
//! `#` starts a comment running to the end of the line. A file may hold any
//! number of declarations.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::morphism::Morphism;
use crate::schema::{PathDef, Schema, SchemaDef};

/// Characters allowed in element identifiers besides ASCII alphanumerics.
pub const ELEMENT_PUNCT: &str = "_:()|'.*";

pub fn is_element_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || ELEMENT_PUNCT.contains(c)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_path_char(c: char) -> bool {
    is_ident_char(c) || c == '.' || c == '@'
}

/// A parsed file. Declarations keep their textual order.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub schemas: Vec<Arc<Schema>>,
    pub instances: Vec<(String, Arc<Instance>)>,
    pub morphisms: Vec<(String, Morphism)>,
}

impl Document {
    pub fn schema(&self, name: &str) -> Option<&Arc<Schema>> {
        self.schemas.iter().find(|s| s.name() == name)
    }

    pub fn instance(&self, name: &str) -> Option<&Arc<Instance>> {
        self.instances.iter().find(|(n, _)| n == name).map(|(_, i)| i)
    }
}

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner { text, pos: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.line, column: self.column, message: message.into() }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.peek().is_none()
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        }
    }

    fn word(&mut self, accept: fn(char) -> bool, what: &str) -> Result<(String, (usize, usize))> {
        self.skip_trivia();
        let at = (self.line, self.column);
        let start = self.pos;
        while self.peek().is_some_and(accept) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error(format!("expected {what}, found {}", self.found())));
        }
        Ok((self.text[start..self.pos].to_string(), at))
    }

    fn ident(&mut self) -> Result<String> {
        self.word(is_ident_char, "identifier").map(|w| w.0)
    }

    fn element(&mut self) -> Result<String> {
        self.word(is_element_char, "element").map(|w| w.0)
    }

    fn symbol(&mut self, sym: &str) -> Result<()> {
        self.skip_trivia();
        if self.text[self.pos..].starts_with(sym) {
            for _ in sym.chars() {
                self.bump();
            }
            Ok(())
        } else {
            Err(self.error(format!("expected `{sym}`, found {}", self.found())))
        }
    }

    fn try_symbol(&mut self, sym: &str) -> bool {
        self.skip_trivia();
        self.text[self.pos..].starts_with(sym) && self.symbol(sym).is_ok()
    }
}

/// A braced list whose items are elements or `x->y` pairs.
enum Entries {
    Set(Vec<String>),
    Map(Vec<(String, String)>),
    Empty,
}

fn braced(sc: &mut Scanner) -> Result<Entries> {
    sc.symbol("{")?;
    if sc.try_symbol("}") {
        return Ok(Entries::Empty);
    }
    let mut set = Vec::new();
    let mut map = Vec::new();
    loop {
        let x = sc.element()?;
        if sc.try_symbol("->") {
            if !set.is_empty() {
                return Err(sc.error("mixed plain elements and `->` pairs"));
            }
            map.push((x, sc.element()?));
        } else {
            if !map.is_empty() {
                return Err(sc.error("expected `->`"));
            }
            set.push(x);
        }
        if sc.try_symbol("}") {
            break;
        }
        sc.symbol(",")?;
    }
    Ok(if map.is_empty() { Entries::Set(set) } else { Entries::Map(map) })
}

fn path(sc: &mut Scanner) -> Result<PathDef> {
    let (w, (line, column)) = sc.word(is_path_char, "path")?;
    let bad = |m: &str| Error::Parse { line, column, message: format!("{m} `{w}`") };
    if let Some(node) = w.strip_prefix("id@") {
        if node.is_empty() || !node.chars().all(is_ident_char) {
            return Err(bad("malformed identity path"));
        }
        return Ok(PathDef::Identity(node.to_string()));
    }
    let parts: Vec<String> = w.split('.').map(str::to_string).collect();
    if parts.iter().any(|p| p.is_empty() || !p.chars().all(is_ident_char)) {
        return Err(bad("malformed path"));
    }
    Ok(PathDef::Arrows(parts))
}

fn schema_body(sc: &mut Scanner) -> Result<SchemaDef> {
    let mut def = SchemaDef::new(sc.ident()?);
    sc.symbol("{")?;
    while !sc.try_symbol("}") {
        sc.skip_trivia();
        let at = (sc.line, sc.column);
        match sc.ident()?.as_str() {
            "node" => def.nodes.push(sc.ident()?),
            "arrow" => {
                let name = sc.ident()?;
                sc.symbol(":")?;
                let source = sc.ident()?;
                sc.symbol("->")?;
                let target = sc.ident()?;
                def.arrows.push(crate::schema::ArrowDef { name, source, target });
            }
            "relation" => {
                let lhs = path(sc)?;
                sc.symbol("=")?;
                let rhs = path(sc)?;
                def.relations.push((lhs, rhs));
            }
            other => {
                return Err(Error::Parse {
                    line: at.0,
                    column: at.1,
                    message: format!("expected `node`, `arrow` or `relation`, found `{other}`"),
                })
            }
        }
        sc.symbol(";")?;
    }
    Ok(def)
}

type Resolver<'r> = dyn Fn(&str) -> Option<Arc<Schema>> + 'r;

fn instance_body(sc: &mut Scanner, doc: &Document, resolve: &Resolver) -> Result<(String, Arc<Instance>)> {
    let name = sc.ident()?;
    sc.symbol(":")?;
    let (schema_name, (line, column)) = sc.word(is_ident_char, "schema name")?;
    let schema = doc.schema(&schema_name).cloned().or_else(|| resolve(&schema_name)).ok_or_else(|| Error::Parse {
        line,
        column,
        message: format!("unknown schema `{schema_name}`"),
    })?;
    sc.symbol("{")?;
    let mut carriers = Vec::new();
    let mut actions = Vec::new();
    while !sc.try_symbol("}") {
        sc.skip_trivia();
        let at = (sc.line, sc.column);
        let key = sc.ident()?;
        sc.symbol("=")?;
        let entries = braced(sc)?;
        let is_node = schema.node_index(&key).is_some();
        let is_arrow = schema.arrow_index(&key).is_some();
        match entries {
            Entries::Set(es) if is_node => carriers.push((key, es)),
            Entries::Map(m) if is_arrow => actions.push((key, m)),
            Entries::Empty if is_node => carriers.push((key, Vec::new())),
            Entries::Empty if is_arrow => actions.push((key, Vec::new())),
            _ => {
                let message = if is_node || is_arrow {
                    format!("`{key}` expects {}", if is_node { "a set of elements" } else { "a map `x->y`" })
                } else {
                    format!("`{key}` is neither a node nor an arrow of `{schema_name}`")
                };
                return Err(Error::Parse { line: at.0, column: at.1, message });
            }
        }
        sc.symbol(";")?;
    }
    Ok((name, Arc::new(Instance::from_named_maps(schema, &carriers, &actions)?)))
}

fn morphism_body(sc: &mut Scanner, doc: &Document) -> Result<(String, Morphism)> {
    let name = sc.ident()?;
    sc.symbol(":")?;
    let lookup = |sc: &mut Scanner| -> Result<Arc<Instance>> {
        let (n, (line, column)) = sc.word(is_ident_char, "instance name")?;
        doc.instance(&n).cloned().ok_or_else(|| Error::Parse {
            line,
            column,
            message: format!("unknown instance `{n}`"),
        })
    };
    let source = lookup(sc)?;
    sc.symbol("->")?;
    let target = lookup(sc)?;
    if !source.same_schema(&target) {
        return Err(Error::SchemaMismatch);
    }
    sc.symbol("{")?;
    let mut comps = Vec::new();
    while !sc.try_symbol("}") {
        let node = sc.ident()?;
        sc.symbol("=")?;
        match braced(sc)? {
            Entries::Map(m) => comps.push((node, m)),
            Entries::Empty => comps.push((node, Vec::new())),
            Entries::Set(_) => return Err(sc.error("expected a map `x->y`")),
        }
        sc.symbol(";")?;
    }
    Ok((name, Morphism::from_names(source, target, &comps)?))
}

/// Parses a whole file. Instances resolve their schema first among schemas
/// declared earlier in the same text, then through `resolve`.
pub fn parse_document(text: &str, resolve: &dyn Fn(&str) -> Option<Arc<Schema>>) -> Result<Document> {
    let mut sc = Scanner::new(text);
    let mut doc = Document::default();
    while !sc.at_end() {
        let at = (sc.line, sc.column);
        match sc.ident()?.as_str() {
            "schema" => {
                let def = schema_body(&mut sc)?;
                if doc.schema(&def.name).is_some() {
                    return Err(Error::Parse {
                        line: at.0,
                        column: at.1,
                        message: format!("schema `{}` declared twice", def.name),
                    });
                }
                doc.schemas.push(Arc::new(Schema::new(def)?));
            }
            "instance" => {
                let (name, inst) = instance_body(&mut sc, &doc, resolve)?;
                if doc.instance(&name).is_some() {
                    return Err(Error::Parse {
                        line: at.0,
                        column: at.1,
                        message: format!("instance `{name}` declared twice"),
                    });
                }
                doc.instances.push((name, inst));
            }
            "morphism" => {
                let m = morphism_body(&mut sc, &doc)?;
                doc.morphisms.push(m);
            }
            other => {
                return Err(Error::Parse {
                    line: at.0,
                    column: at.1,
                    message: format!("expected `schema`, `instance` or `morphism`, found `{other}`"),
                })
            }
        }
    }
    Ok(doc)
}

/// Parses a text holding exactly one schema.
pub fn parse_schema(text: &str) -> Result<Schema> {
    let doc = parse_document(text, &|_| None)?;
    match (doc.schemas.len(), doc.instances.len() + doc.morphisms.len()) {
        (1, 0) => Ok((*doc.schemas[0]).clone()),
        _ => Err(Error::Parse { line: 1, column: 1, message: "expected exactly one schema declaration".into() }),
    }
}

/// Parses a text holding exactly one instance (schemas may precede it).
pub fn parse_instance(text: &str, resolve: &dyn Fn(&str) -> Option<Arc<Schema>>) -> Result<(String, Arc<Instance>)> {
    let doc = parse_document(text, resolve)?;
    match doc.instances.len() {
        1 => Ok(doc.instances.into_iter().next().expect("one instance")),
        n => Err(Error::Parse { line: 1, column: 1, message: format!("expected one instance declaration, found {n}") }),
    }
}

pub fn print_schema(s: &Schema) -> String {
    let mut out = format!("schema {} {{\n", s.name());
    for n in s.nodes() {
        let _ = writeln!(out, "  node {n};");
    }
    for a in s.arrows() {
        let _ = writeln!(out, "  arrow {}: {} -> {};", a.name, s.nodes()[a.source], s.nodes()[a.target]);
    }
    for r in s.relations() {
        let _ = writeln!(out, "  relation {} = {};", s.path_def(&r.lhs), s.path_def(&r.rhs));
    }
    out.push_str("}\n");
    out
}

pub fn print_instance(name: &str, inst: &Instance) -> String {
    let s = inst.schema();
    let mut out = format!("instance {name} : {} {{\n", s.name());
    for (d, n) in s.nodes().iter().enumerate() {
        let _ = writeln!(out, "  {n} = {{{}}};", inst.carrier(d).join(", "));
    }
    for (ai, a) in s.arrows().iter().enumerate() {
        let pairs: Vec<String> = inst
            .action(ai)
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", inst.carrier(a.source)[x], inst.carrier(a.target)[y]))
            .collect();
        let _ = writeln!(out, "  {} = {{{}}};", a.name, pairs.join(", "));
    }
    out.push_str("}\n");
    out
}

pub fn print_morphism(name: &str, source_name: &str, target_name: &str, m: &Morphism) -> String {
    let s = m.source().schema();
    let mut out = format!("morphism {name} : {source_name} -> {target_name} {{\n");
    for (d, n) in s.nodes().iter().enumerate() {
        let pairs: Vec<String> = m
            .component(d)
            .iter()
            .enumerate()
            .map(|(x, &y)| format!("{}->{}", m.source().carrier(d)[x], m.target().carrier(d)[y]))
            .collect();
        let _ = writeln!(out, "  {n} = {{{}}};", pairs.join(", "));
    }
    out.push_str("}\n");
    out
}

/// Element names that cannot be printed in the text format.
pub fn unprintable_elements(inst: &Instance) -> Vec<String> {
    inst.carriers().iter().flatten().filter(|e| e.is_empty() || !e.chars().all(is_element_char)).cloned().collect()
}

/// Schema lookup by name over a fixed list.
pub fn resolver_from(schemas: &[Arc<Schema>]) -> impl Fn(&str) -> Option<Arc<Schema>> + '_ {
    let map: HashMap<&str, &Arc<Schema>> = schemas.iter().map(|s| (s.name(), s)).collect();
    move |name| map.get(name).map(|s| Arc::clone(s))
}
