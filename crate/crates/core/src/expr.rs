//! Symbolic probability expressions for transport formulas.
//!
//! Variables are referenced by name only: the value slot of a variable is
//! the variable itself, bound at evaluation time by a [`Binding`] or by an
//! enclosing sum.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::NodeSet;

/// Which domain's distribution a term is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Source,
    Target,
}

/// `P_{do}(outcome | given)` in one domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProbTerm {
    pub domain: Domain,
    #[serde(rename = "do")]
    pub interventions: NodeSet,
    pub outcome: NodeSet,
    pub given: NodeSet,
}

impl ProbTerm {
    pub fn new(domain: Domain, interventions: NodeSet, outcome: NodeSet, given: NodeSet) -> Self {
        ProbTerm { domain, interventions, outcome, given }
    }

    pub fn target(outcome: NodeSet, given: NodeSet) -> Self {
        Self::new(Domain::Target, NodeSet::new(), outcome, given)
    }

    pub fn source(interventions: NodeSet, outcome: NodeSet, given: NodeSet) -> Self {
        Self::new(Domain::Source, interventions, outcome, given)
    }

    pub fn variables(&self) -> NodeSet {
        let mut v = self.interventions.clone();
        v.extend(self.outcome.iter().cloned());
        v.extend(self.given.iter().cloned());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProbExpr {
    Term(ProbTerm),
    Product {
        factors: Vec<ProbExpr>,
    },
    Sum {
        over: NodeSet,
        body: Box<ProbExpr>,
    },
    /// Ratio of two expressions. Arises when a conditional is taken of a
    /// distribution that is itself a product of factors.
    Quotient {
        numerator: Box<ProbExpr>,
        denominator: Box<ProbExpr>,
    },
    One,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("term has an empty outcome")]
    EmptyOutcome,
    #[error("variable `{0}` appears in more than one role of a term")]
    TermOverlap(String),
    #[error("target term carries interventions")]
    TargetWithDo,
    #[error("variable `{0}` is bound twice along one path")]
    DoubleBinding(String),
    #[error("empty sum index")]
    EmptySum,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no table for {0}")]
    MissingTable(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} out of range for `{var}`")]
    OutOfRange { var: String, value: usize },
    #[error("conditioning event has zero probability in {0}")]
    ZeroMarginal(String),
    #[error(transparent)]
    Structure(#[from] ExprError),
}

/// Output format for [`ProbExpr::render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

/// Assignment of values (indices into each variable's domain) to variables.
pub type Binding = BTreeMap<String, usize>;

/// Concrete distributions a formula can be evaluated against.
pub trait Tables {
    fn arity(&self, var: &str) -> Result<usize, EvalError>;

    /// Probability of `event` (a partial assignment) in the distribution of
    /// `domain` under the intervention `do_values`. An empty event has
    /// probability one.
    fn probability(
        &self,
        domain: Domain,
        do_values: &[(&str, usize)],
        event: &[(&str, usize)],
    ) -> Result<f64, EvalError>;
}

impl ProbExpr {
    pub fn term(t: ProbTerm) -> Self {
        ProbExpr::Term(t)
    }

    pub fn product(factors: Vec<ProbExpr>) -> Self {
        ProbExpr::Product { factors }
    }

    pub fn sum(over: NodeSet, body: ProbExpr) -> Self {
        ProbExpr::Sum { over, body: Box::new(body) }
    }

    pub fn quotient(numerator: ProbExpr, denominator: ProbExpr) -> Self {
        ProbExpr::Quotient { numerator: Box::new(numerator), denominator: Box::new(denominator) }
    }

    /// Variables occurring free (not bound by an enclosing sum).
    pub fn free_vars(&self) -> NodeSet {
        match self {
            ProbExpr::Term(t) => t.variables(),
            ProbExpr::Product { factors } => factors.iter().flat_map(|f| f.free_vars()).collect(),
            ProbExpr::Sum { over, body } => body.free_vars().into_iter().filter(|v| !over.contains(v)).collect(),
            ProbExpr::Quotient { numerator, denominator } => {
                let mut v = numerator.free_vars();
                v.extend(denominator.free_vars());
                v
            }
            ProbExpr::One => NodeSet::new(),
        }
    }

    /// All terms in the expression, left to right.
    pub fn terms(&self) -> Vec<&ProbTerm> {
        let mut out = Vec::new();
        self.visit_terms(&mut |t| out.push(t));
        out
    }

    fn visit_terms<'a>(&'a self, f: &mut impl FnMut(&'a ProbTerm)) {
        match self {
            ProbExpr::Term(t) => f(t),
            ProbExpr::Product { factors } => factors.iter().for_each(|e| e.visit_terms(f)),
            ProbExpr::Sum { body, .. } => body.visit_terms(f),
            ProbExpr::Quotient { numerator, denominator } => {
                numerator.visit_terms(f);
                denominator.visit_terms(f);
            }
            ProbExpr::One => {}
        }
    }

    /// Mutable access to every term, used by mutation tests.
    pub fn terms_mut(&mut self) -> Vec<&mut ProbTerm> {
        let mut out = Vec::new();
        fn go<'a>(e: &'a mut ProbExpr, out: &mut Vec<&'a mut ProbTerm>) {
            match e {
                ProbExpr::Term(t) => out.push(t),
                ProbExpr::Product { factors } => factors.iter_mut().for_each(|f| go(f, out)),
                ProbExpr::Sum { body, .. } => go(body, out),
                ProbExpr::Quotient { numerator, denominator } => {
                    go(numerator, out);
                    go(denominator, out);
                }
                ProbExpr::One => {}
            }
        }
        go(self, &mut out);
        out
    }

    /// Checks the structural invariants of the AST.
    pub fn validate(&self) -> Result<(), ExprError> {
        self.validate_in(&NodeSet::new())
    }

    fn validate_in(&self, bound: &NodeSet) -> Result<(), ExprError> {
        match self {
            ProbExpr::Term(t) => {
                if t.outcome.is_empty() {
                    return Err(ExprError::EmptyOutcome);
                }
                if t.domain == Domain::Target && !t.interventions.is_empty() {
                    return Err(ExprError::TargetWithDo);
                }
                let overlap = t
                    .outcome
                    .intersection(&t.given)
                    .chain(t.interventions.intersection(&t.outcome))
                    .chain(t.interventions.intersection(&t.given))
                    .next();
                match overlap {
                    Some(v) => Err(ExprError::TermOverlap(v.clone())),
                    None => Ok(()),
                }
            }
            ProbExpr::Product { factors } => factors.iter().try_for_each(|f| f.validate_in(bound)),
            ProbExpr::Sum { over, body } => {
                if over.is_empty() {
                    return Err(ExprError::EmptySum);
                }
                if let Some(v) = over.intersection(bound).next() {
                    return Err(ExprError::DoubleBinding(v.clone()));
                }
                let mut inner = bound.clone();
                inner.extend(over.iter().cloned());
                body.validate_in(&inner)
            }
            ProbExpr::Quotient { numerator, denominator } => {
                numerator.validate_in(bound)?;
                denominator.validate_in(bound)
            }
            ProbExpr::One => Ok(()),
        }
    }

    /// Canonical form: products flattened and sorted, `One` absorbed,
    /// chain-rule pairs `P(a|c) P(b|a,c)` merged into `P(a,b|c)`, nested
    /// sums merged and pushed inward, summed outcome variables marginalized.
    pub fn normalize(&self) -> Result<ProbExpr, ExprError> {
        self.validate()?;
        Ok(self.normalized())
    }

    fn normalized(&self) -> ProbExpr {
        match self {
            ProbExpr::Term(_) | ProbExpr::One => self.clone(),
            ProbExpr::Product { factors } => {
                let mut flat = Vec::new();
                for f in factors {
                    match f.normalized() {
                        ProbExpr::One => {}
                        ProbExpr::Product { factors } => flat.extend(factors),
                        other => flat.push(other),
                    }
                }
                merge_chains(&mut flat);
                flat.sort();
                match flat.len() {
                    0 => ProbExpr::One,
                    1 => flat.pop().unwrap(),
                    _ => ProbExpr::Product { factors: flat },
                }
            }
            ProbExpr::Sum { over, body } => {
                let mut over = over.clone();
                let mut body = body.normalized();
                while let ProbExpr::Sum { over: inner, body: b } = body {
                    over.extend(inner);
                    body = *b;
                }
                let free = body.free_vars();
                over.retain(|v| free.contains(v));
                match sum_out(&over, body.clone()) {
                    ProbExpr::Sum { over: o, body: b } if o == over && *b == body => ProbExpr::Sum { over: o, body: b },
                    changed => changed.normalized(),
                }
            }
            ProbExpr::Quotient { numerator, denominator } => {
                let n = numerator.normalized();
                match denominator.normalized() {
                    ProbExpr::One => n,
                    d => ProbExpr::quotient(n, d),
                }
            }
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let mut s = String::new();
                render_text(self, &mut s, false);
                s
            }
            Format::Latex => {
                let mut s = String::new();
                render_latex(self, &mut s, false);
                s
            }
            Format::Json => serde_json::to_string(self).expect("AST serializes"),
        }
    }

    pub fn from_json(s: &str) -> Result<ProbExpr, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Evaluates the expression. Summing over a variable the body does not
    /// mention is the identity.
    pub fn evaluate<T: Tables + ?Sized>(&self, tables: &T, binding: &Binding) -> Result<f64, EvalError> {
        let mut b = binding.clone();
        eval(self, tables, &mut b)
    }
}

fn eval<T: Tables + ?Sized>(e: &ProbExpr, tables: &T, b: &mut Binding) -> Result<f64, EvalError> {
    match e {
        ProbExpr::One => Ok(1.0),
        ProbExpr::Term(t) => eval_term(t, tables, b),
        ProbExpr::Product { factors } => {
            let mut acc = 1.0;
            for f in factors {
                acc *= eval(f, tables, b)?;
                if acc == 0.0 {
                    break;
                }
            }
            Ok(acc)
        }
        ProbExpr::Quotient { numerator, denominator } => {
            let d = eval(denominator, tables, b)?;
            if d == 0.0 {
                return Err(EvalError::ZeroMarginal(denominator.render(Format::Text)));
            }
            Ok(eval(numerator, tables, b)? / d)
        }
        ProbExpr::Sum { over, body } => {
            let free = body.free_vars();
            let vars: Vec<&String> = over.iter().filter(|v| free.contains(*v)).collect();
            let mut arities = Vec::with_capacity(vars.len());
            for v in &vars {
                arities.push(tables.arity(v)?);
            }
            let saved: Vec<Option<usize>> = vars.iter().map(|v| b.get(*v).copied()).collect();
            let mut idx = vec![0usize; vars.len()];
            let mut total = 0.0;
            'outer: loop {
                for (v, &x) in vars.iter().zip(&idx) {
                    b.insert((*v).clone(), x);
                }
                total += eval(body, tables, b)?;
                for k in 0..idx.len() {
                    idx[k] += 1;
                    if idx[k] < arities[k] {
                        continue 'outer;
                    }
                    idx[k] = 0;
                }
                break;
            }
            for (v, s) in vars.iter().zip(saved) {
                match s {
                    Some(x) => b.insert((*v).clone(), x),
                    None => b.remove(*v),
                };
            }
            Ok(total)
        }
    }
}

fn lookup<'a>(vars: &'a NodeSet, b: &Binding) -> Result<Vec<(&'a str, usize)>, EvalError> {
    vars.iter()
        .map(|v| match b.get(v) {
            Some(&x) => Ok((v.as_str(), x)),
            None => Err(EvalError::Unbound(v.clone())),
        })
        .collect()
}

fn eval_term<T: Tables + ?Sized>(t: &ProbTerm, tables: &T, b: &Binding) -> Result<f64, EvalError> {
    let do_values = lookup(&t.interventions, b)?;
    let given = lookup(&t.given, b)?;
    let mut joint = lookup(&t.outcome, b)?;
    joint.extend(given.iter().copied());
    let num = tables.probability(t.domain, &do_values, &joint)?;
    if given.is_empty() {
        return Ok(num);
    }
    let den = tables.probability(t.domain, &do_values, &given)?;
    if den == 0.0 {
        return Err(EvalError::ZeroMarginal(render_term_text(t)));
    }
    Ok(num / den)
}

fn lower_list(vars: &NodeSet) -> String {
    vars.iter().map(|v| v.to_lowercase()).collect::<Vec<_>>().join(",")
}

fn render_term_text(t: &ProbTerm) -> String {
    let mut s = String::from("P");
    if t.domain == Domain::Target {
        s.push('*');
    }
    if !t.interventions.is_empty() {
        let _ = write!(s, "_{{{}}}", lower_list(&t.interventions));
    }
    s.push('(');
    s.push_str(&lower_list(&t.outcome));
    if !t.given.is_empty() {
        s.push('|');
        s.push_str(&lower_list(&t.given));
    }
    s.push(')');
    s
}

fn render_text(e: &ProbExpr, s: &mut String, nested: bool) {
    match e {
        ProbExpr::One => s.push('1'),
        ProbExpr::Term(t) => s.push_str(&render_term_text(t)),
        ProbExpr::Product { factors } => {
            if factors.is_empty() {
                s.push('1');
            }
            for (i, f) in factors.iter().enumerate() {
                if i > 0 {
                    s.push(' ');
                }
                render_text(f, s, true);
            }
        }
        ProbExpr::Sum { over, body } => {
            if nested {
                s.push('[');
            }
            let _ = write!(s, "sum_{{{}}} ", lower_list(over));
            render_text(body, s, false);
            if nested {
                s.push(']');
            }
        }
        ProbExpr::Quotient { numerator, denominator } => {
            s.push('(');
            render_text(numerator, s, false);
            s.push_str(") / (");
            render_text(denominator, s, false);
            s.push(')');
        }
    }
}

fn latex_list(vars: &NodeSet) -> String {
    vars.iter()
        .map(|v| {
            let lower = v.to_lowercase();
            // split trailing digits into a subscript: z1 -> z_{1}
            let digits = lower.trim_start_matches(|c: char| !c.is_ascii_digit());
            if !digits.is_empty() && digits.len() < lower.len() && digits.chars().all(|c| c.is_ascii_digit()) {
                format!("{}_{{{}}}", &lower[..lower.len() - digits.len()], digits)
            } else {
                lower
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_latex(e: &ProbExpr, s: &mut String, nested: bool) {
    match e {
        ProbExpr::One => s.push('1'),
        ProbExpr::Term(t) => {
            s.push('P');
            if t.domain == Domain::Target {
                s.push_str("^{*}");
            }
            if !t.interventions.is_empty() {
                let _ = write!(s, "_{{{}}}", latex_list(&t.interventions));
            }
            let _ = write!(s, "({}", latex_list(&t.outcome));
            if !t.given.is_empty() {
                let _ = write!(s, " \\mid {}", latex_list(&t.given));
            }
            s.push(')');
        }
        ProbExpr::Product { factors } => {
            for (i, f) in factors.iter().enumerate() {
                if i > 0 {
                    s.push_str(" \\, ");
                }
                render_latex(f, s, true);
            }
        }
        ProbExpr::Sum { over, body } => {
            if nested {
                s.push_str("\\left[");
            }
            let _ = write!(s, "\\sum_{{{}}} ", latex_list(over));
            render_latex(body, s, false);
            if nested {
                s.push_str("\\right]");
            }
        }
        ProbExpr::Quotient { numerator, denominator } => {
            s.push_str("\\frac{");
            render_latex(numerator, s, false);
            s.push_str("}{");
            render_latex(denominator, s, false);
            s.push('}');
        }
    }
}

impl std::fmt::Display for ProbExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render(Format::Text))
    }
}

// ---------------------------------------------------------------------------
// Construction helpers used by the identification algorithms.

fn factors_of(e: ProbExpr) -> Vec<ProbExpr> {
    match e {
        ProbExpr::Product { factors } => factors.into_iter().flat_map(factors_of).collect(),
        ProbExpr::One => Vec::new(),
        other => vec![other],
    }
}

fn from_factors(mut fs: Vec<ProbExpr>) -> ProbExpr {
    match fs.len() {
        0 => ProbExpr::One,
        1 => fs.pop().unwrap(),
        _ => ProbExpr::Product { factors: fs },
    }
}

/// Repeatedly replaces `P_d(a|c) P_d(b|a,c)` by `P_d(a,b|c)`.
fn merge_chains(factors: &mut Vec<ProbExpr>) {
    'search: loop {
        for i in 0..factors.len() {
            for j in 0..factors.len() {
                let (ProbExpr::Term(f), ProbExpr::Term(g)) = (&factors[i], &factors[j]) else { continue };
                if i == j || f.domain != g.domain || f.interventions != g.interventions {
                    continue;
                }
                let context: NodeSet = f.given.union(&f.outcome).cloned().collect();
                if g.given == context {
                    let merged = ProbTerm::new(
                        f.domain,
                        f.interventions.clone(),
                        f.outcome.union(&g.outcome).cloned().collect(),
                        f.given.clone(),
                    );
                    factors[i] = ProbExpr::Term(merged);
                    factors.remove(j);
                    continue 'search;
                }
            }
        }
        break;
    }
}

/// Multiplies expressions, flattening nested products and dropping `One`.
pub fn multiply(parts: impl IntoIterator<Item = ProbExpr>) -> ProbExpr {
    from_factors(parts.into_iter().flat_map(factors_of).collect())
}

/// `sum_{over} e`, simplified: terms owning a summed variable as outcome
/// lose it (marginalization), sums are pushed into the only factor that
/// mentions their variable, and variables `e` does not mention are dropped.
pub fn sum_out(over: &NodeSet, e: ProbExpr) -> ProbExpr {
    let free = e.free_vars();
    let mut over: NodeSet = over.iter().filter(|v| free.contains(*v)).cloned().collect();
    if over.is_empty() {
        return e;
    }
    match e {
        ProbExpr::Term(mut t) => {
            if over.iter().all(|v| t.outcome.contains(v)) {
                t.outcome.retain(|v| !over.contains(v));
                if t.outcome.is_empty() {
                    ProbExpr::One
                } else {
                    ProbExpr::Term(t)
                }
            } else {
                ProbExpr::sum(over, ProbExpr::Term(t))
            }
        }
        ProbExpr::Sum { over: inner, body } => {
            over.extend(inner);
            sum_out(&over, *body)
        }
        ProbExpr::Product { factors } => {
            let mut fs: Vec<ProbExpr> = factors.into_iter().flat_map(factors_of).collect();
            loop {
                let mut changed = false;
                for v in over.clone() {
                    let owners: Vec<usize> = (0..fs.len()).filter(|&i| fs[i].free_vars().contains(&v)).collect();
                    match owners.as_slice() {
                        [] => {
                            over.remove(&v);
                            changed = true;
                        }
                        [i] => {
                            let f = std::mem::replace(&mut fs[*i], ProbExpr::One);
                            fs[*i] = sum_out(&NodeSet::from([v.clone()]), f);
                            over.remove(&v);
                            changed = true;
                        }
                        _ => {}
                    }
                }
                fs.retain(|f| *f != ProbExpr::One);
                if !changed || over.is_empty() {
                    break;
                }
            }
            let body = from_factors(fs);
            if over.is_empty() {
                body
            } else {
                ProbExpr::sum(over, body)
            }
        }
        other => ProbExpr::sum(over, other),
    }
}

/// `numerator / denominator` with identical factors cancelled.
pub fn divide(numerator: ProbExpr, denominator: ProbExpr) -> ProbExpr {
    let mut num = factors_of(numerator);
    let mut den = Vec::new();
    for d in factors_of(denominator) {
        match num.iter().position(|n| *n == d) {
            Some(i) => {
                num.remove(i);
            }
            None => den.push(d),
        }
    }
    let num = from_factors(num);
    if den.is_empty() {
        num
    } else {
        ProbExpr::quotient(num, from_factors(den))
    }
}
