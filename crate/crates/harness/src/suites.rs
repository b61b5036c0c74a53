//! Suites: which checks run on which inputs.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use decat_core::profile::profile_direct;
use decat_core::{
    build_basis, canonical_form, enumerate_instances, is_connected, sample_hom, Bounds, CanonicalForm, Instance,
    Member, Schema,
};

use crate::engine::Engine;
use crate::properties::{evaluate, lookup, property_index, Args};
use crate::report::{PropertyTally, Status, VerificationReport, Witness, MAX_WITNESSES_PER_PROPERTY};
use crate::witness::make_witness;

pub const SUITES: &[&str] =
    &["extensive", "decomposition", "connectedness", "hom-morphism", "combinatorial", "burnside"];

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub schema: Arc<Schema>,
    pub bounds: Bounds,
    pub seed: u64,
    pub trials: u64,
    pub engine: Engine,
}

impl SuiteConfig {
    pub fn new(schema: &Arc<Schema>, bounds: Bounds, seed: u64, trials: u64) -> SuiteConfig {
        SuiteConfig { schema: schema.clone(), bounds, seed, trials, engine: Engine::Standard }
    }

    pub fn with_engine(mut self, engine: Engine) -> SuiteConfig {
        self.engine = engine;
        self
    }
}

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one trial of one property; depends only on its coordinates.
pub fn trial_seed(seed: u64, property: &str, a: u64, b: u64) -> u64 {
    mix(mix(mix(seed) ^ property_index(property)) ^ a).wrapping_add(mix(b))
}

struct Run<'a> {
    cfg: &'a SuiteConfig,
    universe: Vec<Member>,
    tallies: Vec<PropertyTally>,
    failures: Vec<Witness>,
    findings: Vec<Witness>,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a SuiteConfig, universe: Vec<Member>) -> Self {
        Run { cfg, universe, tallies: Vec::new(), failures: Vec::new(), findings: Vec::new() }
    }

    fn schema(&self) -> &Arc<Schema> {
        &self.cfg.schema
    }

    fn members(&self) -> Vec<Arc<Instance>> {
        self.universe.iter().map(|m| m.instance.clone()).collect()
    }

    /// Evaluates a property on every job, in parallel, keeping job order.
    fn check_all(&mut self, id: &'static str, jobs: Vec<Args>, as_finding: bool) {
        let prop = lookup(id).expect("registered property");
        let engine = self.cfg.engine;
        let outcomes: Vec<Option<Witness>> = jobs
            .par_iter()
            .map(|args| evaluate(prop, engine, args).err().map(|msg| make_witness(id, engine, args, msg)))
            .collect();
        self.record(id, jobs.len() as u64, outcomes.into_iter().flatten().collect(), as_finding);
    }

    fn record(&mut self, id: &str, checks: u64, bad: Vec<Witness>, as_finding: bool) {
        self.tallies.push(PropertyTally { property: id.to_string(), checks, failures: bad.len() as u64 });
        let sink = if as_finding { &mut self.findings } else { &mut self.failures };
        sink.extend(bad.into_iter().take(MAX_WITNESSES_PER_PROPERTY));
    }

    /// Builds `trials` jobs, each from its own seeded stream.
    fn sampled<F>(&self, id: &str, make: F) -> Vec<Args>
    where
        F: Fn(&mut ChaCha8Rng, u64) -> Args + Sync,
    {
        (0..self.cfg.trials)
            .into_par_iter()
            .map(|t| {
                let s = trial_seed(self.cfg.seed, id, t, 0);
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                make(&mut rng, s)
            })
            .collect()
    }

    fn finish(self, suite: &str, started: Instant) -> VerificationReport {
        let status = if !self.failures.is_empty() {
            Status::Fail
        } else if !self.findings.is_empty() {
            Status::Finding
        } else {
            Status::Pass
        };
        VerificationReport {
            suite: suite.to_string(),
            schema: self.cfg.schema.name().to_string(),
            bounds: self.cfg.bounds.display(&self.cfg.schema).to_string(),
            universe_size: self.universe.len(),
            seed: self.cfg.seed,
            trials: self.cfg.trials,
            engine: self.cfg.engine.name().to_string(),
            status,
            properties: self.tallies,
            failures: self.failures,
            findings: self.findings,
            elapsed_ms: started.elapsed().as_millis() as u64,
        }
    }
}

fn pick<R: Rng>(rng: &mut R, pool: &[Arc<Instance>]) -> Arc<Instance> {
    pool[rng.gen_range(0..pool.len())].clone()
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<VerificationReport, String> {
    let started = Instant::now();
    let universe = if name == "burnside" { Vec::new() } else { enumerate_instances(&cfg.schema, &cfg.bounds) };
    let mut run = Run::new(cfg, universe);
    match name {
        "extensive" => extensive(&mut run),
        "decomposition" => decomposition(&mut run),
        "connectedness" => connectedness(&mut run),
        "hom-morphism" => hom_morphism(&mut run),
        "combinatorial" => combinatorial(&mut run),
        "burnside" => burnside(&mut run),
        other => return Err(format!("unknown suite `{other}`; expected one of {}", SUITES.join(", "))),
    }
    Ok(run.finish(name, started))
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<VerificationReport> {
    SUITES.iter().map(|s| run_suite(s, cfg).expect("known suite")).collect()
}

fn extensive(run: &mut Run) {
    let all = run.members();
    let schema = run.schema().clone();
    let nonempty: Vec<Arc<Instance>> = all.iter().filter(|i| !i.is_initial()).cloned().collect();
    let sources = if nonempty.is_empty() { all.clone() } else { nonempty };

    let jobs = run.sampled("coproduct-universal", |rng, s| {
        Args::new(&schema, vec![pick(rng, &all), pick(rng, &all), pick(rng, &all)]).with_seed(s)
    });
    run.check_all("coproduct-universal", jobs, false);

    let jobs = run.sampled("coprojection-mono", |rng, s| {
        Args::new(&schema, vec![pick(rng, &all), pick(rng, &all), pick(rng, &all)]).with_seed(s)
    });
    run.check_all("coprojection-mono", jobs, false);

    let jobs = run.sampled("coprojections-disjoint", |rng, s| {
        Args::new(&schema, vec![pick(rng, &sources), pick(rng, &all), pick(rng, &all)]).with_seed(s)
    });
    run.check_all("coprojections-disjoint", jobs, false);

    let jobs = all.iter().map(|x| Args::new(&schema, vec![x.clone()])).collect();
    run.check_all("strict-initial", jobs, false);

    // A morphism into X+Y is drawn for a fresh triple until one exists.
    let engine = run.cfg.engine;
    let jobs = run.sampled("pullback-decomposition", |rng, s| {
        for _ in 0..32 {
            let (a, x, y) = (pick(rng, &sources), pick(rng, &all), pick(rng, &all));
            let Ok(cop) = engine.coproduct(&x, &y) else { continue };
            if let Ok(Some(f)) = sample_hom(&a, &cop.object, rng) {
                return Args::new(&schema, vec![a, x, y]).with_morphisms(vec![f]).with_seed(s);
            }
        }
        let z = decat_core::construct::initial(&schema);
        let cop = engine.coproduct(&z, &z).expect("coproduct of initial instances");
        let f = decat_core::construct::from_initial(&cop.object);
        Args::new(&schema, vec![z.clone(), z.clone(), z]).with_morphisms(vec![f]).with_seed(s)
    });
    run.check_all("pullback-decomposition", jobs, false);
}

fn decomposition(run: &mut Run) {
    let all = run.members();
    let schema = run.schema().clone();
    let jobs: Vec<Args> = all.iter().map(|x| Args::new(&schema, vec![x.clone()])).collect();
    run.check_all("decomposition-witness", jobs.clone(), false);

    let cfg = run.cfg;
    let ufd: Vec<Args> = all
        .iter()
        .enumerate()
        .flat_map(|(i, x)| {
            let schema = schema.clone();
            (0..cfg.trials).map(move |t| {
                Args::new(&schema, vec![x.clone()]).with_seed(trial_seed(cfg.seed, "unique-factorization", i as u64, t))
            })
        })
        .collect();
    run.check_all("unique-factorization", ufd, false);

    cancellation(run, &all);
    run.check_all("component-bound", jobs, false);
}

/// Exhaustive over connected `C` and all pairs `X, X'`: sums are grouped by
/// canonical form and only colliding pairs are re-checked.
fn cancellation(run: &mut Run, all: &[Arc<Instance>]) {
    let schema = run.schema().clone();
    let engine = run.cfg.engine;
    let forms: Vec<CanonicalForm> = all.par_iter().map(|x| canonical_form(x)).collect();
    let connected: Vec<&Arc<Instance>> = all.iter().filter(|c| is_connected(c)).collect();
    let per_c: Vec<(u64, Vec<Args>)> = connected
        .par_iter()
        .map(|c| {
            let mut seen: HashMap<CanonicalForm, usize> = HashMap::new();
            let mut suspects = Vec::new();
            for (i, x) in all.iter().enumerate() {
                let sum = match engine.coproduct(c, x) {
                    Ok(cop) => canonical_form(&cop.object),
                    Err(_) => {
                        suspects.push(Args::new(&schema, vec![(*c).clone(), x.clone(), x.clone()]));
                        continue;
                    }
                };
                match seen.get(&sum) {
                    Some(&j) if forms[j] != forms[i] => {
                        suspects.push(Args::new(&schema, vec![(*c).clone(), all[j].clone(), x.clone()]))
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(sum, i);
                    }
                }
            }
            (all.len() as u64, suspects)
        })
        .collect();
    let checks: u64 = per_c.iter().map(|(n, _)| n).sum();
    let prop = lookup("cancellation").expect("registered");
    let bad: Vec<Witness> = per_c
        .into_iter()
        .flat_map(|(_, s)| s)
        .filter_map(|args| evaluate(prop, engine, &args).err().map(|m| make_witness("cancellation", engine, &args, m)))
        .collect();
    run.record("cancellation", checks, bad, false);
}

fn connectedness(run: &mut Run) {
    let all = run.members();
    let schema = run.schema().clone();
    let cfg = run.cfg;
    let jobs: Vec<Args> = all
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, "connected-agreement", i as u64, 0));
            let mut inst = vec![f.clone()];
            for _ in 0..cfg.trials {
                inst.push(pick(&mut rng, &all));
                inst.push(pick(&mut rng, &all));
            }
            Args::new(&schema, inst)
        })
        .collect();
    run.check_all("connected-agreement", jobs, false);
    let jobs = all.iter().map(|x| Args::new(&schema, vec![x.clone()])).collect();
    run.check_all("dichotomy", jobs, false);
}

fn hom_morphism(run: &mut Run) {
    let all = run.members();
    let schema = run.schema().clone();
    let bounds = run.cfg.bounds.clone();
    let connected: Vec<Arc<Instance>> = all.iter().filter(|c| is_connected(c)).cloned().collect();
    let testers = if connected.is_empty() { all.clone() } else { connected };
    let triple =
        |rng: &mut ChaCha8Rng, first: &[Arc<Instance>]| vec![pick(rng, first), pick(rng, &all), pick(rng, &all)];

    let jobs = run.sampled("hom-additive", |rng, s| Args::new(&schema, triple(rng, &testers)).with_seed(s));
    run.check_all("hom-additive", jobs, false);
    for id in ["hom-multiplicative", "distributive", "class-product", "semiring-laws", "ring-laws"] {
        let jobs = run.sampled(id, |rng, s| Args::new(&schema, triple(rng, &all)).with_seed(s));
        run.check_all(id, jobs, false);
    }
    let jobs = run.sampled("profile-homomorphism", |rng, s| {
        Args::new(&schema, triple(rng, &all)).with_seed(s).with_bounds(&bounds)
    });
    run.check_all("profile-homomorphism", jobs, false);
    let jobs = all.iter().map(|x| Args::new(&schema, vec![x.clone()])).collect();
    run.check_all("to-ring-roundtrip", jobs, false);
}

/// Profiles of the whole universe over its connected members; equal
/// profiles of distinct classes are findings, not failures.
fn combinatorial(run: &mut Run) {
    let all = run.members();
    let schema = run.schema().clone();
    let bounds = run.cfg.bounds.clone();
    let basis = build_basis(&schema, &bounds);
    let profiles: Vec<Vec<i128>> = all.par_iter().map(|x| profile_direct(x, &basis).expect("same schema").0).collect();
    let mut first: HashMap<&Vec<i128>, usize> = HashMap::new();
    let mut suspects = Vec::new();
    for (i, p) in profiles.iter().enumerate() {
        match first.get(p) {
            Some(&j) => suspects.push(Args::new(&schema, vec![all[j].clone(), all[i].clone()]).with_bounds(&bounds)),
            None => {
                first.insert(p, i);
            }
        }
    }
    let engine = run.cfg.engine;
    let prop = lookup("profile-separation").expect("registered");
    let bad: Vec<Witness> = suspects
        .iter()
        .filter_map(|a| evaluate(prop, engine, a).err().map(|m| make_witness("profile-separation", engine, a, m)))
        .collect();
    let pairs = (all.len() as u64) * (all.len() as u64).saturating_sub(1) / 2;
    run.record("profile-separation", pairs, bad, true);

    let seed = run.cfg.seed;
    let jobs = all
        .iter()
        .enumerate()
        .map(|(i, x)| {
            Args::new(&schema, vec![x.clone()]).with_bounds(&bounds).with_seed(trial_seed(
                seed,
                "profile-invariance",
                i as u64,
                0,
            ))
        })
        .collect();
    run.check_all("profile-invariance", jobs, false);
}

fn burnside(run: &mut Run) {
    let schema = run.schema().clone();
    let bounds = run.cfg.bounds.clone();
    // Schemas that do not present a group have no table of marks: nothing to check.
    let jobs = match decat_core::table_of_marks(&schema, &bounds) {
        Ok(table) => {
            run.universe = table.transitive;
            vec![Args::new(&schema, Vec::new()).with_bounds(&bounds)]
        }
        Err(decat_core::Error::NotAGroup(_)) => Vec::new(),
        Err(_) => vec![Args::new(&schema, Vec::new()).with_bounds(&bounds)],
    };
    for id in ["marks-triangular", "ghost-injective"] {
        run.check_all(id, jobs.clone(), false);
    }
}
