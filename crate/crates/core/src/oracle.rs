//! Exact numerical ground truth.
//!
//! A [`DiscreteSCM`] has one latent variable per bidirected edge. Each
//! observable draws its value from a conditional table indexed by its
//! observable parents and incident latents; this is a deterministic function
//! of those inputs and a private noise term with the noise summed out.
//! Distributions are computed by exact enumeration, one c-component at a
//! time, so tolerances only reflect floating point accumulation.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{Binding, Domain, EvalError, ProbExpr, ProbTerm, Tables};
use crate::graph::{NodeSet, Query, SelectionDiagram, SemiMarkovianGraph};

pub const MAX_NODES: usize = 12;
pub const MAX_TABLE_ENTRIES: usize = 10_000_000;
pub const LATENT_ARITY: usize = 4;
pub const MIN_ATOM: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Assignment of values to observables, e.g. an intervention.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    pub endpoints: (String, String),
    pub probs: Vec<f64>,
}

/// Conditional table of one observable. Row index is the mixed-radix value
/// of `(parents, latents)` with the first entry least significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    pub parents: Vec<usize>,
    pub latents: Vec<usize>,
    pub table: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSCM {
    diagram: SemiMarkovianGraph,
    arities: Vec<usize>,
    latents: Vec<Latent>,
    mechanisms: Vec<Mechanism>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModelPair {
    pub source: DiscreteSCM,
    pub target: DiscreteSCM,
}

/// Joint probability table over `vars` (mixed radix, first variable least
/// significant).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub vars: Vec<String>,
    pub arities: Vec<usize>,
    pub probs: Vec<f64>,
}

impl Table {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn index_of(&self, values: &[usize]) -> usize {
        let mut idx = 0;
        for (k, &v) in values.iter().enumerate().rev() {
            idx = idx * self.arities[k] + v;
        }
        idx
    }

    fn values_of(&self, mut idx: usize) -> Vec<usize> {
        self.arities
            .iter()
            .map(|&a| {
                let v = idx % a;
                idx /= a;
                v
            })
            .collect()
    }

    /// Probability of a full assignment to `vars`, given in the same order.
    pub fn get(&self, values: &[usize]) -> f64 {
        self.probs[self.index_of(values)]
    }

    /// Marginal over `keep`, in the order given.
    pub fn marginal(&self, keep: &[String]) -> Result<Table, OracleError> {
        let pos: Vec<usize> = keep
            .iter()
            .map(|v| {
                self.vars
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| OracleError::Input(format!("`{v}` is not in the table")))
            })
            .collect::<Result<_, _>>()?;
        let arities: Vec<usize> = pos.iter().map(|&p| self.arities[p]).collect();
        let mut out = Table { vars: keep.to_vec(), arities, probs: Vec::new() };
        out.probs = vec![0.0; out.arities.iter().product()];
        for (i, &p) in self.probs.iter().enumerate() {
            let vals = self.values_of(i);
            let kept: Vec<usize> = pos.iter().map(|&k| vals[k]).collect();
            let j = out.index_of(&kept);
            out.probs[j] += p;
        }
        Ok(out)
    }
}

fn draw_simplex(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let s: f64 = w.iter().sum();
    let free = 1.0 - floor * n as f64;
    w.iter().map(|x| floor + free * x / s).collect()
}

impl DiscreteSCM {
    pub fn diagram(&self) -> &SemiMarkovianGraph {
        &self.diagram
    }

    pub fn arity(&self, node: &str) -> Option<usize> {
        self.index(node).map(|i| self.arities[i])
    }

    pub fn latents(&self) -> &[Latent] {
        &self.latents
    }

    pub fn mechanism(&self, node: &str) -> Option<&Mechanism> {
        self.index(node).map(|i| &self.mechanisms[i])
    }

    fn index(&self, node: &str) -> Option<usize> {
        self.diagram.nodes().iter().position(|n| n == node)
    }

    fn draw_mechanism(&self, i: usize, rng: &mut ChaCha8Rng) -> Mechanism {
        let name = &self.diagram.nodes()[i];
        let parents: Vec<usize> = self.diagram.parents(name).iter().filter_map(|p| self.index(p)).collect();
        let latents: Vec<usize> = self
            .latents
            .iter()
            .enumerate()
            .filter(|(_, l)| &l.endpoints.0 == name || &l.endpoints.1 == name)
            .map(|(k, _)| k)
            .collect();
        let rows: usize =
            parents.iter().map(|&p| self.arities[p]).product::<usize>() * LATENT_ARITY.pow(latents.len() as u32);
        let a = self.arities[i];
        let floor = MIN_ATOM.min(0.5 / a as f64);
        let table = (0..rows).flat_map(|_| draw_simplex(rng, a, floor)).collect();
        Mechanism { parents, latents, table }
    }

    /// Exact distribution of the observables outside `do_values` in the
    /// submodel where each intervened variable is held constant.
    pub fn enumerate_joint(&self, do_values: &Assignment) -> Result<Table, OracleError> {
        let nodes = self.diagram.nodes();
        let mut fixed: Vec<Option<usize>> = vec![None; nodes.len()];
        for (v, &x) in do_values {
            let i = self.index(v).ok_or_else(|| OracleError::Input(format!("unknown node `{v}`")))?;
            if x >= self.arities[i] {
                return Err(OracleError::Input(format!("value {x} out of range for `{v}`")));
            }
            fixed[i] = Some(x);
        }
        let free: Vec<usize> = (0..nodes.len()).filter(|&i| fixed[i].is_none()).collect();
        let mut table = Table {
            vars: free.iter().map(|&i| nodes[i].clone()).collect(),
            arities: free.iter().map(|&i| self.arities[i]).collect(),
            probs: Vec::new(),
        };
        let size: usize = table.arities.iter().product();
        if size > MAX_TABLE_ENTRIES {
            return Err(OracleError::Budget(format!("{size} table entries")));
        }

        // Each c-component of the free nodes contributes an independent
        // factor once its latents are summed out.
        let components: Vec<(Vec<usize>, Vec<usize>)> = self
            .diagram
            .c_components()
            .into_iter()
            .map(|c| {
                let members: Vec<usize> = free.iter().copied().filter(|&i| c.members.contains(&nodes[i])).collect();
                let mut lat: Vec<usize> = members.iter().flat_map(|&i| self.mechanisms[i].latents.clone()).collect();
                lat.sort_unstable();
                lat.dedup();
                (members, lat)
            })
            .filter(|(m, _)| !m.is_empty())
            .collect();

        let mut values: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
        let mut latent_values = vec![0usize; self.latents.len()];
        table.probs = Vec::with_capacity(size);
        for idx in 0..size {
            for (k, v) in table.values_of(idx).into_iter().enumerate() {
                values[free[k]] = v;
            }
            let mut p = 1.0;
            for (members, lat) in &components {
                p *= self.component_factor(members, lat, &values, &mut latent_values);
            }
            table.probs.push(p);
        }
        Ok(table)
    }

    fn component_factor(&self, members: &[usize], lat: &[usize], values: &[usize], latent_values: &mut [usize]) -> f64 {
        let configs = LATENT_ARITY.pow(lat.len() as u32);
        let mut total = 0.0;
        for mut c in 0..configs {
            let mut weight = 1.0;
            for &l in lat {
                latent_values[l] = c % LATENT_ARITY;
                c /= LATENT_ARITY;
                weight *= self.latents[l].probs[latent_values[l]];
            }
            for &i in members {
                weight *= self.cpt(i, values, latent_values);
            }
            total += weight;
        }
        total
    }

    fn cpt(&self, i: usize, values: &[usize], latent_values: &[usize]) -> f64 {
        let m = &self.mechanisms[i];
        let mut row = 0;
        let mut scale = 1;
        for &p in &m.parents {
            row += values[p] * scale;
            scale *= self.arities[p];
        }
        for &l in &m.latents {
            row += latent_values[l] * scale;
            scale *= LATENT_ARITY;
        }
        m.table[row * self.arities[i] + values[i]]
    }
}

/// Draws a source/target model pair compatible with `d`. Nodes outside the
/// selection targets share their mechanisms across the two domains.
pub fn generate_pair(d: &SelectionDiagram, seed: u64, arity: usize) -> Result<DiscreteModelPair, OracleError> {
    let g = d.graph();
    if arity < 2 {
        return Err(OracleError::Input("arity must be at least 2".into()));
    }
    if g.len() > MAX_NODES {
        return Err(OracleError::Input(format!("{} nodes exceeds the limit of {MAX_NODES}", g.len())));
    }
    if arity.pow(g.len() as u32) > MAX_TABLE_ENTRIES {
        return Err(OracleError::Budget(format!("joint over {} nodes of arity {arity}", g.len())));
    }
    for attempt in 0u64.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let latents = g
            .bidirected_edges()
            .map(|(a, b)| Latent {
                endpoints: (a.to_string(), b.to_string()),
                probs: draw_simplex(&mut rng, LATENT_ARITY, MIN_ATOM),
            })
            .collect();
        let mut source =
            DiscreteSCM { diagram: g.clone(), arities: vec![arity; g.len()], latents, mechanisms: Vec::new() };
        source.mechanisms = (0..g.len()).map(|i| source.draw_mechanism(i, &mut rng)).collect();
        let mut target = source.clone();
        for (i, n) in g.nodes().iter().enumerate() {
            if d.s_targets().contains(n) {
                target.mechanisms[i] = target.draw_mechanism(i, &mut rng);
            }
        }
        let positive = |m: &DiscreteSCM| -> Result<bool, OracleError> {
            Ok(m.enumerate_joint(&Assignment::new())?.probs.iter().all(|&p| p > 0.0))
        };
        if positive(&source)? && positive(&target)? {
            return Ok(DiscreteModelPair { source, target });
        }
    }
    unreachable!("attempt counter is unbounded")
}

/// `P_x(y)` in `m`, as a table over `y` in sorted order.
pub fn ground_truth_effect(m: &DiscreteSCM, x: &Assignment, y: &NodeSet) -> Result<Table, OracleError> {
    if let Some(v) = y.iter().find(|v| x.contains_key(*v)) {
        return Err(OracleError::Input(format!("`{v}` is both intervened on and an outcome")));
    }
    let keep: Vec<String> = y.iter().cloned().collect();
    m.enumerate_joint(x)?.marginal(&keep)
}

type TableKey = (Domain, Vec<(String, usize)>);
type MarginalKey = (Domain, Vec<(String, usize)>, Vec<String>);

/// The target observational joint and the source experiments on subsets of
/// a controllable set, exposed to formula evaluation.
///
/// Built eagerly by [`build_distribution_set`], or lazily with
/// [`DistributionSet::lazy`], which computes each table on first use.
pub struct DistributionSet {
    pair: DiscreteModelPair,
    controllable: NodeSet,
    tables: RefCell<HashMap<TableKey, Table>>,
    marginals: RefCell<HashMap<MarginalKey, Table>>,
}

impl DistributionSet {
    pub fn lazy(pair: &DiscreteModelPair, z: &NodeSet) -> Result<Self, OracleError> {
        if let Some(v) = z.iter().find(|v| !pair.source.diagram.contains(v)) {
            return Err(OracleError::Input(format!("unknown node `{v}`")));
        }
        Ok(DistributionSet {
            pair: pair.clone(),
            controllable: z.clone(),
            tables: RefCell::new(HashMap::new()),
            marginals: RefCell::new(HashMap::new()),
        })
    }

    pub fn target_joint(&self) -> Result<Table, OracleError> {
        self.table(Domain::Target, &[])
    }

    /// The source table under `do(Z' = z')`.
    pub fn source_interventional(&self, do_values: &Assignment) -> Result<Table, OracleError> {
        let key: Vec<(String, usize)> = do_values.iter().map(|(k, &v)| (k.clone(), v)).collect();
        self.table(Domain::Source, &key)
    }

    pub fn table_count(&self) -> (usize, usize) {
        let t = self.tables.borrow();
        let target = t.keys().filter(|k| k.0 == Domain::Target).count();
        (target, t.len() - target)
    }

    fn table(&self, domain: Domain, do_values: &[(String, usize)]) -> Result<Table, OracleError> {
        let key = (domain, do_values.to_vec());
        if let Some(t) = self.tables.borrow().get(&key) {
            return Ok(t.clone());
        }
        let names: NodeSet = do_values.iter().map(|(k, _)| k.clone()).collect();
        let allowed = match domain {
            Domain::Target => names.is_empty(),
            Domain::Source => names.is_subset(&self.controllable) && names.len() < self.pair.source.diagram.len(),
        };
        if !allowed {
            return Err(EvalError::MissingTable(describe(domain, do_values)).into());
        }
        let model = match domain {
            Domain::Source => &self.pair.source,
            Domain::Target => &self.pair.target,
        };
        let assignment: Assignment = do_values.iter().cloned().collect();
        let t = model.enumerate_joint(&assignment)?;
        self.tables.borrow_mut().insert(key, t.clone());
        Ok(t)
    }

    fn marginal(&self, domain: Domain, do_values: &[(String, usize)], vars: Vec<String>) -> Result<Table, OracleError> {
        let key = (domain, do_values.to_vec(), vars);
        if let Some(t) = self.marginals.borrow().get(&key) {
            return Ok(t.clone());
        }
        let m = self.table(domain, do_values)?.marginal(&key.2)?;
        self.marginals.borrow_mut().insert(key, m.clone());
        Ok(m)
    }
}

fn describe(domain: Domain, do_values: &[(String, usize)]) -> String {
    let star = if domain == Domain::Target { "*" } else { "" };
    let d: Vec<String> = do_values.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("P{star}_{{{}}}", d.join(","))
}

fn flatten(e: OracleError) -> EvalError {
    match e {
        OracleError::Eval(e) => e,
        other => EvalError::MissingTable(other.to_string()),
    }
}

impl Tables for DistributionSet {
    fn arity(&self, var: &str) -> Result<usize, EvalError> {
        self.pair.source.arity(var).ok_or_else(|| EvalError::UnknownVariable(var.to_string()))
    }

    fn probability(
        &self,
        domain: Domain,
        do_values: &[(&str, usize)],
        event: &[(&str, usize)],
    ) -> Result<f64, EvalError> {
        for &(v, x) in do_values.iter().chain(event) {
            if x >= self.arity(v)? {
                return Err(EvalError::OutOfRange { var: v.to_string(), value: x });
            }
        }
        let mut dv: Vec<(String, usize)> = do_values.iter().map(|&(k, v)| (k.to_string(), v)).collect();
        dv.sort();
        let mut ev: Vec<(&str, usize)> = event.to_vec();
        ev.sort();
        ev.dedup();
        if ev.is_empty() {
            return Ok(1.0);
        }
        // An event on an intervened variable is certain or impossible.
        let mut remaining = Vec::with_capacity(ev.len());
        for (v, x) in ev {
            match dv.iter().find(|(k, _)| k == v) {
                Some(&(_, y)) if y == x => {}
                Some(_) => return Ok(0.0),
                None => remaining.push((v, x)),
            }
        }
        if remaining.is_empty() {
            return Ok(1.0);
        }
        let vars: Vec<String> = remaining.iter().map(|(v, _)| v.to_string()).collect();
        let values: Vec<usize> = remaining.iter().map(|&(_, x)| x).collect();
        let m = self.marginal(domain, &dv, vars).map_err(flatten)?;
        Ok(m.get(&values))
    }
}

/// Builds every table of the distribution set: the target joint, the
/// source joint, and the source under each assignment to each nonempty
/// proper subset of `z`.
pub fn build_distribution_set(p: &DiscreteModelPair, z: &NodeSet) -> Result<DistributionSet, OracleError> {
    let ds = DistributionSet::lazy(p, z)?;
    let g = &p.source.diagram;
    let zs: Vec<&String> = z.iter().collect();
    let n = g.len();
    let mut plan: Vec<Assignment> = Vec::new();
    let mut entries: usize = 0;
    for mask in 0u64..(1u64 << zs.len()) {
        let subset: Vec<&String> = (0..zs.len()).filter(|k| mask >> k & 1 == 1).map(|k| zs[k]).collect();
        if subset.len() == n && n > 0 {
            continue;
        }
        let arities: Vec<usize> = subset.iter().map(|v| p.source.arity(v).unwrap_or(1)).collect();
        let rest: usize =
            g.nodes().iter().filter(|v| !subset.contains(v)).map(|v| p.source.arity(v).unwrap_or(1)).product();
        let count: usize = arities.iter().product();
        entries = entries.saturating_add(count.saturating_mul(rest));
        if entries > MAX_TABLE_ENTRIES {
            return Err(OracleError::Budget(format!("more than {MAX_TABLE_ENTRIES} table entries")));
        }
        for mut c in 0..count {
            let mut a = Assignment::new();
            for (v, &ar) in subset.iter().zip(&arities) {
                a.insert((*v).clone(), c % ar);
                c /= ar;
            }
            plan.push(a);
        }
    }
    ds.target_joint()?;
    for a in &plan {
        ds.source_interventional(a)?;
    }
    Ok(ds)
}

/// Maximum absolute difference between `e` and the target causal effect
/// `P*_x(y)` over every assignment to `x` and `y`. Free variables of `e`
/// outside `x ∪ y` are arbitrary, so every value of them is checked too.
pub fn validate_formula(e: &ProbExpr, p: &DiscreteModelPair, q: &Query) -> Result<f64, OracleError> {
    e.validate().map_err(EvalError::from)?;
    let ds = DistributionSet::lazy(p, &q.z)?;
    let xs: Vec<String> = q.x.iter().cloned().collect();
    let ys: Vec<String> = q.y.iter().cloned().collect();
    let extra: Vec<String> = e.free_vars().into_iter().filter(|v| !q.x.contains(v) && !q.y.contains(v)).collect();
    for v in &extra {
        ds.arity(v)?;
    }
    let arity = |v: &String| p.source.arity(v).unwrap_or(1);
    let mut worst: f64 = 0.0;
    for xa in assignments(&xs, arity) {
        let truth = ground_truth_effect(&p.target, &xa, &q.y)?;
        for ya in assignments(&ys, arity) {
            let expected = truth.get(&ys.iter().map(|v| ya[v]).collect::<Vec<_>>());
            for wa in assignments(&extra, arity) {
                let mut b: Binding = xa.clone();
                b.extend(ya.clone());
                b.extend(wa);
                let got = e.evaluate(&ds, &b)?;
                worst = worst.max((got - expected).abs());
            }
        }
    }
    Ok(worst)
}

/// Well-formed expressions that differ from `e` in exactly one term: a
/// conditioning variable dropped, an intervention dropped, or the domain
/// flipped on an intervention-free term.
pub fn single_term_mutations(e: &ProbExpr) -> Vec<ProbExpr> {
    let n = e.terms().len();
    let mut out = Vec::new();
    for k in 0..n {
        let term = e.terms()[k].clone();
        let mut edits: Vec<ProbTerm> = Vec::new();
        for v in &term.given {
            let mut t = term.clone();
            t.given.remove(v);
            edits.push(t);
        }
        for v in &term.interventions {
            let mut t = term.clone();
            t.interventions.remove(v);
            edits.push(t);
        }
        if term.interventions.is_empty() {
            let mut t = term.clone();
            t.domain = match t.domain {
                Domain::Source => Domain::Target,
                Domain::Target => Domain::Source,
            };
            edits.push(t);
        }
        for t in edits {
            let mut m = e.clone();
            *m.terms_mut()[k] = t;
            if m.validate().is_ok() {
                out.push(m);
            }
        }
    }
    out
}

fn assignments<F: Fn(&String) -> usize>(vars: &[String], arity: F) -> Vec<Assignment> {
    let ar: Vec<usize> = vars.iter().map(&arity).collect();
    let total: usize = ar.iter().product();
    (0..total)
        .map(|mut c| {
            vars.iter()
                .zip(&ar)
                .map(|(v, &a)| {
                    let x = c % a;
                    c /= a;
                    (v.clone(), x)
                })
                .collect()
        })
        .collect()
}
