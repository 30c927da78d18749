//! Identification and transport of causal effects.
//!
//! * [`gid_z`] decides generalized z-identifiability: `P_x(y)` from the
//!   observational distribution plus experiments on subsets of `Z`, where `Z`
//!   may overlap `X`.
//! * [`sid_z`] decides z-transportability over a selection diagram. It
//!   factorizes the effect into c-factors and identifies each one either in
//!   the source (from experiments, when no selection variable points into the
//!   component) or in the target (from `P*` alone) through [`bi`].
//!
//! Both return a symbolic [`ProbExpr`] on success and a hedge or s-hedge
//! [`Witness`] on failure.

use thiserror::Error;

use crate::expr::{divide, multiply, sum_out, Domain, ProbExpr, ProbTerm};
use crate::graph::{CComponent, GraphError, NodeSet, SelectionDiagram, SemiMarkovianGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Experiments active in a GID^z call: those activated while covering
/// `X ∪ W` and those activated at c-component decomposition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentContext {
    pub active_line3: NodeSet,
    pub active_decomp: NodeSet,
}

/// A distribution a formula's terms are drawn from: a domain and the set of
/// variables intervened on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistLabel {
    pub domain: Domain,
    pub do_set: NodeSet,
}

impl DistLabel {
    pub fn source() -> Self {
        DistLabel { domain: Domain::Source, do_set: NodeSet::new() }
    }

    pub fn target() -> Self {
        DistLabel { domain: Domain::Target, do_set: NodeSet::new() }
    }

    pub fn experiment(do_set: NodeSet) -> Self {
        DistLabel { domain: Domain::Source, do_set }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum WitnessKind {
    Hedge,
    SHedge,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::Hedge => "hedge",
            WitnessKind::SHedge => "s-hedge",
        }
    }
}

/// The pair `<F, F'>` thrown when a c-factor cannot be identified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub f_graph: SemiMarkovianGraph,
    pub f_sub: SemiMarkovianGraph,
    pub s_targets_in_component: NodeSet,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdentResult {
    Formula(ProbExpr),
    Failure(Witness),
}

impl IdentResult {
    pub fn is_formula(&self) -> bool {
        matches!(self, IdentResult::Formula(_))
    }

    pub fn formula(&self) -> Option<&ProbExpr> {
        match self {
            IdentResult::Formula(e) => Some(e),
            IdentResult::Failure(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            IdentResult::Formula(_) => None,
            IdentResult::Failure(w) => Some(w),
        }
    }
}

/// Bookkeeping recorded while an algorithm runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    /// Times the treatment was widened to cover `X ∪ W`.
    pub interventions_added: usize,
    /// Times an effect was factorized into more than one c-factor.
    pub decompositions: usize,
    /// The first c-component partition computed at the decomposition step.
    pub partition: Option<Vec<NodeSet>>,
}

/// Result of a top-level call plus the audit channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub result: IdentResult,
    pub warnings: Vec<String>,
    pub trace: Trace,
}

/// A c-factor estimation failure raised by BI or GID^z, before it is
/// classified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fail {
    pub f_graph: SemiMarkovianGraph,
    pub f_sub: SemiMarkovianGraph,
}

#[derive(Debug)]
enum Abort {
    Fail(Box<Fail>),
    Error(IdentError),
}

impl From<IdentError> for Abort {
    fn from(e: IdentError) -> Self {
        Abort::Error(e)
    }
}

impl From<GraphError> for Abort {
    fn from(e: GraphError) -> Self {
        Abort::Error(IdentError::Graph(e))
    }
}

/// The current distribution threaded through the recursion.
#[derive(Debug, Clone)]
enum Dist {
    /// `P_do(vars)`, a marginal of an observational or experimental joint.
    Base { domain: Domain, do_set: NodeSet, vars: NodeSet },
    /// `prod_i f_i` where each `f_i` is a normalized conditional of the
    /// named variable given earlier variables only.
    Chain { factors: Vec<(String, ProbExpr)>, vars: NodeSet },
    /// Anything else, over `vars` (other free variables are fixed context).
    Expr { expr: ProbExpr, vars: NodeSet },
}

impl Dist {
    fn base(label: &DistLabel, nodes: &NodeSet) -> Self {
        Dist::Base {
            domain: label.domain,
            do_set: label.do_set.clone(),
            vars: nodes.difference(&label.do_set).cloned().collect(),
        }
    }

    fn vars(&self) -> &NodeSet {
        match self {
            Dist::Base { vars, .. } | Dist::Chain { vars, .. } | Dist::Expr { vars, .. } => vars,
        }
    }

    fn to_expr(&self) -> ProbExpr {
        match self {
            Dist::Base { domain, do_set, vars } => {
                if vars.is_empty() {
                    ProbExpr::One
                } else {
                    ProbExpr::Term(ProbTerm::new(*domain, do_set.clone(), vars.clone(), NodeSet::new()))
                }
            }
            Dist::Chain { factors, .. } => multiply(factors.iter().map(|(_, f)| f.clone())),
            Dist::Expr { expr, .. } => expr.clone(),
        }
    }

    fn marginal(&self, keep: &NodeSet) -> Dist {
        let kept: NodeSet = self.vars().intersection(keep).cloned().collect();
        match self {
            Dist::Base { domain, do_set, .. } => Dist::Base { domain: *domain, do_set: do_set.clone(), vars: kept },
            Dist::Chain { factors, vars } => {
                let mut to_sum: NodeSet = vars.difference(keep).cloned().collect();
                let mut remaining: Vec<(String, ProbExpr)> = Vec::new();
                for (v, f) in factors.iter().rev() {
                    let mentioned = remaining.iter().any(|(_, g)| g.free_vars().contains(v));
                    if to_sum.contains(v) && !mentioned {
                        to_sum.remove(v);
                    } else {
                        remaining.push((v.clone(), f.clone()));
                    }
                }
                remaining.reverse();
                if to_sum.is_empty() {
                    Dist::Chain { factors: remaining, vars: kept }
                } else {
                    let body = multiply(remaining.into_iter().map(|(_, f)| f));
                    Dist::Expr { expr: sum_out(&to_sum, body), vars: kept }
                }
            }
            Dist::Expr { expr, vars } => {
                let to_sum: NodeSet = vars.difference(keep).cloned().collect();
                Dist::Expr { expr: sum_out(&to_sum, expr.clone()), vars: kept }
            }
        }
    }

    /// `P(target | given)`. Members of `given` outside the distribution's
    /// variables are context and already fixed.
    fn conditional(&self, target: &str, given: &NodeSet) -> ProbExpr {
        let given: NodeSet = given.intersection(self.vars()).cloned().collect();
        match self {
            Dist::Base { domain, do_set, .. } => {
                ProbExpr::Term(ProbTerm::new(*domain, do_set.clone(), NodeSet::from([target.to_string()]), given))
            }
            _ => {
                let mut with_target = given.clone();
                with_target.insert(target.to_string());
                let num = self.marginal(&with_target).to_expr();
                let den = self.marginal(&given).to_expr();
                divide(num, den)
            }
        }
    }

    /// Switches a base distribution to the experiment that additionally
    /// intervenes on `extra`.
    fn activate(&self, extra: &NodeSet) -> Result<Dist, IdentError> {
        if extra.is_empty() {
            return Ok(self.clone());
        }
        match self {
            Dist::Base { domain, do_set, vars } => {
                if *domain == Domain::Target {
                    return Err(IdentError::Internal("experiments requested in the target".into()));
                }
                Ok(Dist::Base {
                    domain: *domain,
                    do_set: do_set.union(extra).cloned().collect(),
                    vars: vars.difference(extra).cloned().collect(),
                })
            }
            _ => Err(IdentError::Internal("experiments activated after a c-factor was extracted".into())),
        }
    }
}

fn union(a: &NodeSet, b: &NodeSet) -> NodeSet {
    a.union(b).cloned().collect()
}

fn minus(a: &NodeSet, b: &NodeSet) -> NodeSet {
    a.difference(b).cloned().collect()
}

fn inter(a: &NodeSet, b: &NodeSet) -> NodeSet {
    a.intersection(b).cloned().collect()
}

struct Engine<'a> {
    /// Topological order of the original graph; `v^(i-1)` in any subgraph is
    /// taken relative to this order restricted to the subgraph.
    order: &'a [String],
    depth_limit: usize,
    trace: Trace,
}

impl<'a> Engine<'a> {
    fn new(order: &'a [String]) -> Self {
        Engine { order, depth_limit: order.len() * 4 + 4, trace: Trace::default() }
    }

    fn guard(&self, depth: usize) -> Result<(), Abort> {
        if depth > self.depth_limit {
            Err(Abort::Error(IdentError::Internal("recursion depth exceeded".into())))
        } else {
            Ok(())
        }
    }

    /// Members of `c` in order, each with the nodes of `g` preceding it.
    fn ordered_with_predecessors(&self, g: &SemiMarkovianGraph, c: &NodeSet) -> Vec<(String, NodeSet)> {
        let mut seen = NodeSet::new();
        let mut out = Vec::new();
        for v in self.order.iter().filter(|v| g.contains(v)) {
            if c.contains(v) {
                out.push((v.clone(), seen.clone()));
            }
            seen.insert(v.clone());
        }
        out
    }

    /// `sum_{c \ y} prod_{V_i in C} P(v_i | v^(i-1) \ active)`.
    fn chain_factor(&self, g: &SemiMarkovianGraph, p: &Dist, c: &NodeSet, y: &NodeSet, active: &NodeSet) -> ProbExpr {
        let factors =
            self.ordered_with_predecessors(g, c).into_iter().map(|(v, pre)| p.conditional(&v, &minus(&pre, active)));
        sum_out(&minus(c, y), multiply(factors))
    }

    /// `prod_{V_i in C'} P(V_i | V^(i-1) ∩ C', v^(i-1) \ (C' ∪ active))`.
    fn restrict_to_component(&self, g: &SemiMarkovianGraph, p: &Dist, c_prime: &NodeSet, active: &NodeSet) -> Dist {
        let factors = self
            .ordered_with_predecessors(g, c_prime)
            .into_iter()
            .map(|(v, pre)| {
                let f = p.conditional(&v, &minus(&pre, active));
                (v, f)
            })
            .collect();
        Dist::Chain { factors, vars: c_prime.clone() }
    }

    #[allow(clippy::too_many_arguments)]
    fn gid(
        &mut self,
        y: &NodeSet,
        x: &NodeSet,
        z: &NodeSet,
        i_set: &NodeSet,
        j_set: &NodeSet,
        p: Dist,
        g: &SemiMarkovianGraph,
        depth: usize,
    ) -> Result<ProbExpr, Abort> {
        self.guard(depth)?;
        let v = g.node_set();
        // no treatment left
        if x.is_empty() {
            return Ok(p.marginal(y).to_expr());
        }
        // drop non-ancestors of y
        let an_y = g.ancestors(y)?;
        if an_y != v {
            let active = union(i_set, j_set);
            let p = p.marginal(&minus(&an_y, &active));
            let sub = g.induced_subgraph(&an_y)?;
            return self.gid(y, &inter(x, &an_y), z, i_set, j_set, p, &sub, depth + 1);
        }
        // widen the treatment to everything not on a path to y, activating experiments
        let cut = union(&union(x, i_set), j_set);
        let cut_in_g = inter(&cut, &v);
        let an_cut = g.mutilate(&cut_in_g, &NodeSet::new())?.ancestors(y)?;
        let w = minus(&minus(&v, &cut), &an_cut);
        let z_w = inter(z, &union(x, &w));
        if !z_w.is_empty() || !w.is_empty() {
            self.trace.interventions_added += 1;
            let new_x = minus(&union(x, &w), &z_w);
            let new_z = minus(z, &z_w);
            let new_i = union(i_set, &z_w);
            let p = p.activate(&z_w)?;
            let g2 = g.mutilate(&z_w, &NodeSet::new())?;
            return self.gid(y, &new_x, &new_z, &new_i, j_set, p, &g2, depth + 1);
        }
        // c-component factorization
        let active = union(i_set, j_set);
        let comps: Vec<NodeSet> = g.without(&union(x, &active)).c_components().into_iter().map(|c| c.members).collect();
        if self.trace.partition.is_none() {
            self.trace.partition = Some(comps.clone());
        }
        if comps.len() > 1 {
            self.trace.decompositions += 1;
            let mut factors = Vec::with_capacity(comps.len());
            for c in &comps {
                let rest = minus(&v, c);
                let sub_x = minus(&minus(&rest, z), &active);
                let sub_z = inter(z, c);
                let newly = inter(z, &rest);
                let sub_j = union(j_set, &newly);
                let p_i = p.activate(&minus(&newly, &active))?;
                let g_i = g.mutilate(&inter(&union(&active, &newly), &v), &NodeSet::new())?;
                factors.push(self.gid(c, &sub_x, &sub_z, i_set, &sub_j, p_i, &g_i, depth + 1)?);
            }
            let over = minus(&v, &union(&union(y, x), &active));
            return Ok(sum_out(&over, multiply(factors)));
        }
        let c = comps.into_iter().next().ok_or_else(|| IdentError::Internal("empty decomposition".into()))?;
        self.single_component(y, x, &c, &p, g, &active, depth, |eng, y, x, p, sub, depth| {
            eng.gid(y, x, z, i_set, j_set, p, sub, depth)
        })
    }

    /// Steps shared by GID^z and BI once a single component `c`
    /// of `G \ (X ∪ active)` is known.
    #[allow(clippy::too_many_arguments)]
    fn single_component<F>(
        &mut self,
        y: &NodeSet,
        x: &NodeSet,
        c: &NodeSet,
        p: &Dist,
        g: &SemiMarkovianGraph,
        active: &NodeSet,
        depth: usize,
        recurse: F,
    ) -> Result<ProbExpr, Abort>
    where
        F: FnOnce(&mut Self, &NodeSet, &NodeSet, Dist, &SemiMarkovianGraph, usize) -> Result<ProbExpr, Abort>,
    {
        let comps_g: Vec<CComponent> = g.c_components();
        if comps_g.len() == 1 {
            return Err(Abort::Fail(Box::new(Fail { f_graph: g.clone(), f_sub: g.induced_subgraph(c)? })));
        }
        if comps_g.iter().any(|k| &k.members == c) {
            return Ok(self.chain_factor(g, p, c, y, active));
        }
        let c_prime = comps_g
            .into_iter()
            .map(|k| k.members)
            .find(|k| c.is_subset(k))
            .ok_or_else(|| IdentError::Internal("component not contained in any c-component of G".into()))?;
        let p2 = self.restrict_to_component(g, p, &c_prime, active);
        let sub = g.induced_subgraph(&c_prime)?;
        recurse(self, y, &inter(x, &c_prime), p2, &sub, depth + 1)
    }

    fn bi(
        &mut self,
        y: &NodeSet,
        x: &NodeSet,
        p: Dist,
        g: &SemiMarkovianGraph,
        active: &NodeSet,
        depth: usize,
    ) -> Result<ProbExpr, Abort> {
        self.guard(depth)?;
        let v = g.node_set();
        // no treatment left
        if x.is_empty() {
            return Ok(p.marginal(y).to_expr());
        }
        // drop non-ancestors of y
        let an_y = g.ancestors(y)?;
        if an_y != v {
            let sub = g.induced_subgraph(&an_y)?;
            let p = p.marginal(&an_y);
            return self.bi(y, &inter(x, &an_y), p, &sub, &inter(active, &an_y), depth + 1);
        }
        // several components factorize as in GID^z
        let comps: Vec<NodeSet> = g.without(&union(x, active)).c_components().into_iter().map(|c| c.members).collect();
        if comps.len() > 1 {
            let mut factors = Vec::with_capacity(comps.len());
            for c in &comps {
                let rest = minus(&minus(&v, c), active);
                factors.push(self.bi(c, &rest, p.clone(), g, active, depth + 1)?);
            }
            let over = minus(&v, &union(&union(y, x), active));
            return Ok(sum_out(&over, multiply(factors)));
        }
        let c = comps.into_iter().next().ok_or_else(|| IdentError::Internal("empty decomposition".into()))?;
        self.single_component(y, x, &c, &p, g, active, depth, |eng, y, x, p, sub, depth| {
            let active = inter(active, &sub.node_set());
            eng.bi(y, x, p, sub, &active, depth)
        })
    }

    fn sid(
        &mut self,
        y: &NodeSet,
        x: &NodeSet,
        g: &SemiMarkovianGraph,
        z: &NodeSet,
        s_targets: &NodeSet,
        depth: usize,
    ) -> Result<ProbExpr, (Abort, Option<(bool, NodeSet)>)> {
        self.guard(depth).map_err(|e| (e, None))?;
        let v = g.node_set();
        // no treatment left
        if x.is_empty() {
            return Ok(ProbExpr::Term(ProbTerm::target(y.clone(), NodeSet::new())));
        }
        // drop non-ancestors of y
        let an_y = g.ancestors(y).map_err(|e| (e.into(), None))?;
        if an_y != v {
            let sub = g.induced_subgraph(&an_y).map_err(|e| (e.into(), None))?;
            return self.sid(y, &inter(x, &an_y), &sub, z, s_targets, depth + 1);
        }
        // widen the treatment
        let an_cut = g.mutilate(x, &NodeSet::new()).and_then(|m| m.ancestors(y)).map_err(|e| (e.into(), None))?;
        let w = minus(&minus(&v, x), &an_cut);
        if !w.is_empty() {
            self.trace.interventions_added += 1;
            return self.sid(y, &union(x, &w), g, z, s_targets, depth + 1);
        }
        // c-component factorization
        let comps: Vec<NodeSet> = g.without(x).c_components().into_iter().map(|c| c.members).collect();
        if self.trace.partition.is_none() {
            self.trace.partition = Some(comps.clone());
        }
        if comps.len() > 1 {
            self.trace.decompositions += 1;
        }
        // A factor no selection node points into is estimated in the source
        // from experiments; the rest come from the target alone.
        let mut factors = Vec::with_capacity(comps.len());
        for c in &comps {
            let direct = s_targets.is_disjoint(c);
            let rest = minus(&v, c);
            let factor = if direct {
                let active = inter(z, &rest);
                let p = Dist::base(&DistLabel::experiment(active.clone()), &v);
                let g_mut = g.mutilate(&active, &NodeSet::new()).map_err(|e| (e.into(), None))?;
                self.bi(c, &minus(&rest, z), p, &g_mut, &active, depth + 1)
            } else {
                let p = Dist::base(&DistLabel::target(), &v);
                self.bi(c, &rest, p, g, &NodeSet::new(), depth + 1)
            };
            match factor {
                Ok(f) => factors.push(f),
                Err(e) => return Err((e, Some((direct, inter(s_targets, c))))),
            }
        }
        Ok(sum_out(&minus(&v, &union(y, x)), multiply(factors)))
    }
}

fn check_sets(g: &SemiMarkovianGraph, y: &NodeSet, x: &NodeSet, z: &NodeSet) -> Result<(), IdentError> {
    for s in [y, x, z] {
        if let Some(n) = s.iter().find(|n| !g.contains(n)) {
            return Err(IdentError::Graph(GraphError::UnknownNode(n.clone())));
        }
    }
    if y.is_empty() {
        return Err(IdentError::Input("outcome set is empty".into()));
    }
    if let Some(n) = x.intersection(y).next() {
        return Err(IdentError::Input(format!("`{n}` is both treatment and outcome")));
    }
    Ok(())
}

fn drop_outcome_experiments(y: &NodeSet, z: &NodeSet, warnings: &mut Vec<String>) -> NodeSet {
    let overlap = inter(z, y);
    if !overlap.is_empty() {
        warnings.push(format!(
            "dropped outcome variables from the controllable set: {}",
            overlap.iter().cloned().collect::<Vec<_>>().join(", ")
        ));
    }
    minus(z, y)
}

/// Generalized z-identification of `P_x(y)` in `g` from `dist` plus
/// experiments on subsets of `z`. Terms of the returned formula are drawn
/// from `dist`'s domain with do-sets `dist.do_set ∪ Z'` for `Z' ⊆ z`.
pub fn gid_z(
    y: &NodeSet,
    x: &NodeSet,
    z: &NodeSet,
    ctx: &IdentContext,
    dist: &DistLabel,
    g: &SemiMarkovianGraph,
) -> Result<Identification, IdentError> {
    check_sets(g, y, x, z)?;
    let mut warnings = Vec::new();
    let z = drop_outcome_experiments(y, z, &mut warnings);
    let order = g.topological_order()?;
    let mut engine = Engine::new(&order);
    let active = union(&ctx.active_line3, &ctx.active_decomp);
    let label = DistLabel { domain: dist.domain, do_set: union(&dist.do_set, &active) };
    let p = Dist::base(&label, &g.node_set());
    let g_start = g.mutilate(&inter(&active, &g.node_set()), &NodeSet::new())?;
    let out = engine.gid(y, x, &z, &ctx.active_line3, &ctx.active_decomp, p, &g_start, 0);
    let result = match out {
        Ok(e) => IdentResult::Formula(e),
        Err(Abort::Fail(f)) => IdentResult::Failure(Witness {
            kind: WitnessKind::Hedge,
            f_graph: f.f_graph,
            f_sub: f.f_sub,
            s_targets_in_component: NodeSet::new(),
        }),
        Err(Abort::Error(e)) => return Err(e),
    };
    Ok(Identification { result, warnings, trace: engine.trace })
}

/// z-transportability of `P*_x(y)` over selection diagram `d` with
/// experiments available in the source on subsets of `z`.
pub fn sid_z(y: &NodeSet, x: &NodeSet, d: &SelectionDiagram, z: &NodeSet) -> Result<Identification, IdentError> {
    let g = d.graph();
    check_sets(g, y, x, z)?;
    let mut warnings = Vec::new();
    let z = drop_outcome_experiments(y, z, &mut warnings);
    let order = g.topological_order()?;
    let mut engine = Engine::new(&order);
    let result = match engine.sid(y, x, g, &z, d.s_targets(), 0) {
        Ok(e) => IdentResult::Formula(e),
        Err((Abort::Error(e), _)) => return Err(e),
        Err((Abort::Fail(f), origin)) => {
            let (direct, s_in) = origin.ok_or_else(|| IdentError::Internal("unclassified failure".into()))?;
            let kind = if direct { WitnessKind::Hedge } else { WitnessKind::SHedge };
            IdentResult::Failure(Witness {
                kind,
                f_graph: f.f_graph,
                f_sub: f.f_sub,
                s_targets_in_component: if direct { NodeSet::new() } else { s_in },
            })
        }
    };
    Ok(Identification { result, warnings, trace: engine.trace })
}

/// Plain transportability: [`sid_z`] with every variable controllable.
pub fn transportable(y: &NodeSet, x: &NodeSet, d: &SelectionDiagram) -> Result<Identification, IdentError> {
    sid_z(y, x, d, &d.graph().node_set())
}

/// Identifies the c-factor `P_x(y)` from `dist` in `g`, where `g` already
/// has incoming edges into `active` removed. Throws `<F, F'>` on failure.
pub fn bi(
    y: &NodeSet,
    x: &NodeSet,
    dist: &DistLabel,
    g: &SemiMarkovianGraph,
    active: &NodeSet,
) -> Result<Result<ProbExpr, Fail>, IdentError> {
    check_sets(g, y, x, active)?;
    let order = g.topological_order()?;
    let mut engine = Engine::new(&order);
    let label = DistLabel { domain: dist.domain, do_set: union(&dist.do_set, active) };
    let p = Dist::base(&label, &g.node_set());
    match engine.bi(y, x, p, g, active, 0) {
        Ok(e) => Ok(Ok(e)),
        Err(Abort::Fail(f)) => Ok(Err(*f)),
        Err(Abort::Error(e)) => Err(e),
    }
}

/// True when no selection variable points into the component.
pub fn direct_transportable(c: &CComponent, d: &SelectionDiagram) -> bool {
    d.s_targets().is_disjoint(&c.members)
}
