use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::solution::Variant;

/// Numerical tolerance for constraint and integrality checks.
pub const CHECK_EPS: f64 = 1e-6;

/// Values for model variables, keyed by variable name.
pub type Assignment = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + CHECK_EPS,
            Sense::Ge => lhs >= rhs - CHECK_EPS,
            Sense::Eq => (lhs - rhs).abs() <= CHECK_EPS,
        }
    }
}

/// Sparse linear expression over variable indices. Terms are merged and kept
/// sorted by index; zero coefficients are dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinExpr {
    terms: BTreeMap<usize, f64>,
}

impl LinExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, var: usize, coef: f64) -> &mut Self {
        let c = self.terms.entry(var).or_insert(0.0);
        *c += coef;
        if *c == 0.0 {
            self.terms.remove(&var);
        }
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.terms.iter().map(|(&v, &c)| (v, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinExpr,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub name: String,
    pub variant: Variant,
    pub variables: Vec<Variable>,
    /// Stage `k` (index `k - 1`) minimizes `T_k`.
    pub objective_stages: Vec<LinExpr>,
    pub constraints: Vec<Constraint>,
    pub big_n: f64,
    index: HashMap<String, usize>,
}

impl MilpModel {
    pub fn new(name: impl Into<String>, variant: Variant, big_n: f64) -> Self {
        Self {
            name: name.into(),
            variant,
            variables: Vec::new(),
            objective_stages: Vec::new(),
            constraints: Vec::new(),
            big_n,
            index: HashMap::new(),
        }
    }

    /// Declares a variable with default bounds for its kind (`[0, 1]` for
    /// binaries, `[0, inf)` otherwise). Redeclaring returns the existing index.
    pub fn add_var(&mut self, name: String, kind: VarKind) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let upper = (kind == VarKind::Binary).then_some(1.0);
        let i = self.variables.len();
        self.index.insert(name.clone(), i);
        self.variables.push(Variable {
            name,
            kind,
            lower: 0.0,
            upper,
        });
        i
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Adds a constraint. An empty left-hand side that holds trivially is
    /// skipped; returns whether the constraint was kept.
    pub fn add_constraint(&mut self, name: String, expr: LinExpr, sense: Sense, rhs: f64) -> bool {
        if expr.is_empty() && sense.holds(0.0, rhs) {
            return false;
        }
        self.constraints.push(Constraint {
            name,
            expr,
            sense,
            rhs,
        });
        true
    }

    pub fn count_vars(&self, prefix: &str) -> usize {
        self.variables
            .iter()
            .filter(|v| v.name.split('_').next() == Some(prefix))
            .count()
    }

    pub fn count_constraints(&self, prefix: &str) -> usize {
        self.constraints.iter().filter(|c| c.name.starts_with(prefix)).count()
    }

    /// Zero value for every declared variable.
    pub fn zero_assignment(&self) -> Assignment {
        self.variables.iter().map(|v| (v.name.clone(), 0.0)).collect()
    }

    fn write_expr(&self, out: &mut String, expr: &LinExpr) {
        if expr.is_empty() {
            // LP files need at least one term on each row.
            let _ = write!(out, " 0 {}", self.variables[0].name);
            return;
        }
        for (n, (v, c)) in expr.terms().enumerate() {
            if n > 0 && n % 8 == 0 {
                out.push_str("\n   ");
            }
            let sign = if c < 0.0 { '-' } else { '+' };
            let _ = write!(out, " {sign} {} {}", c.abs(), self.variables[v].name);
        }
    }

    /// LP-format text for stage `stage` (1-based): minimize `T_stage` subject
    /// to the model plus `T_j <= fixed[j-1] + 1e-6` for every `j < stage`.
    pub fn stage_lp(&self, stage: usize, fixed: &[f64]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ {} variant {} stage {}", self.name, self.variant, stage);
        out.push_str("Minimize\n obj:");
        self.write_expr(&mut out, &self.objective_stages[stage - 1]);
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            self.write_expr(&mut out, &c.expr);
            let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
        }
        for (j, value) in fixed.iter().enumerate().take(stage - 1) {
            let _ = write!(out, " stage_fix_k{}:", j + 1);
            self.write_expr(&mut out, &self.objective_stages[j]);
            let _ = writeln!(out, " <= {}", value + CHECK_EPS);
        }
        let bounded: Vec<&Variable> = self
            .variables
            .iter()
            .filter(|v| v.kind != VarKind::Binary && (v.lower != 0.0 || v.upper.is_some()))
            .collect();
        if !bounded.is_empty() {
            out.push_str("Bounds\n");
            for v in bounded {
                match v.upper {
                    Some(u) => {
                        let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, u);
                    }
                    None => {
                        let _ = writeln!(out, " {} >= {}", v.name, v.lower);
                    }
                }
            }
        }
        for (header, kind) in [("General", VarKind::Integer), ("Binary", VarKind::Binary)] {
            let names: Vec<&str> = self
                .variables
                .iter()
                .filter(|v| v.kind == kind)
                .map(|v| v.name.as_str())
                .collect();
            if names.is_empty() {
                continue;
            }
            let _ = writeln!(out, "{header}");
            for chunk in names.chunks(8) {
                let _ = writeln!(out, " {}", chunk.join(" "));
            }
        }
        out.push_str("End\n");
        out
    }

    /// Writes one file per stage, named `<stem>.<variant>.stage<k>.lp`.
    /// `fixed` supplies the stage-fixing values for earlier objectives.
    pub fn write_stage_files(&self, dir: impl AsRef<Path>, stem: &str, fixed: &[f64]) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for k in 1..=self.objective_stages.len() {
            let path = dir.join(format!("{stem}.{}.stage{k}.lp", self.variant.as_str().to_lowercase()));
            fs::write(&path, self.stage_lp(k, fixed))?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Names of constraints violated by `assignment` (tolerance 1e-6), followed by
/// `integrality:<var>` / `bounds:<var>` entries for domain violations.
pub fn check_model(model: &MilpModel, assignment: &Assignment) -> Result<Vec<String>> {
    let mut values = Vec::with_capacity(model.variables.len());
    for v in &model.variables {
        let x = assignment
            .get(&v.name)
            .copied()
            .ok_or_else(|| Error::MissingVariable(v.name.clone()))?;
        values.push(x);
    }
    let mut violated = Vec::new();
    for c in &model.constraints {
        let lhs: f64 = c.expr.terms().map(|(v, coef)| coef * values[v]).sum();
        if !c.sense.holds(lhs, c.rhs) {
            violated.push(c.name.clone());
        }
    }
    for (v, &x) in model.variables.iter().zip(&values) {
        if v.kind != VarKind::Continuous && (x - x.round()).abs() > CHECK_EPS {
            violated.push(format!("integrality:{}", v.name));
        }
        if x < v.lower - CHECK_EPS || v.upper.is_some_and(|u| x > u + CHECK_EPS) {
            violated.push(format!("bounds:{}", v.name));
        }
    }
    Ok(violated)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MilpModel {
        let mut m = MilpModel::new("tiny", Variant::P, 10.0);
        let x = m.add_var("x_a0_m0".into(), VarKind::Binary);
        let y = m.add_var("y_a1_k1_m0".into(), VarKind::Integer);
        let t = m.add_var("T_k1".into(), VarKind::Continuous);
        let mut e = LinExpr::new();
        e.add(x, 1.0).add(y, 2.0);
        m.add_constraint("c1".into(), e, Sense::Ge, 1.0);
        let mut e = LinExpr::new();
        e.add(t, 1.0).add(x, -3.0);
        m.add_constraint("c2".into(), e, Sense::Eq, 0.0);
        let mut obj = LinExpr::new();
        obj.add(t, 1.0);
        m.objective_stages.push(obj);
        m
    }

    #[test]
    fn merged_terms_and_trivial_rows() {
        let mut e = LinExpr::new();
        e.add(3, 1.0).add(1, 2.0).add(3, -1.0);
        assert_eq!(e.terms().collect::<Vec<_>>(), vec![(1, 2.0)]);
        let mut m = tiny();
        assert!(!m.add_constraint("empty".into(), LinExpr::new(), Sense::Le, 0.0));
        assert!(m.add_constraint("bad".into(), LinExpr::new(), Sense::Eq, 1.0));
    }

    #[test]
    fn checking() {
        let m = tiny();
        let mut a = m.zero_assignment();
        assert_eq!(check_model(&m, &a).unwrap(), vec!["c1"]);
        a.insert("x_a0_m0".into(), 1.0);
        a.insert("T_k1".into(), 3.0);
        assert!(check_model(&m, &a).unwrap().is_empty());
        a.insert("y_a1_k1_m0".into(), 0.5);
        assert_eq!(check_model(&m, &a).unwrap(), vec!["integrality:y_a1_k1_m0"]);
        a.remove("T_k1");
        assert!(matches!(check_model(&m, &a), Err(Error::MissingVariable(n)) if n == "T_k1"));
    }

    #[test]
    fn lp_text() {
        let m = tiny();
        let lp = m.stage_lp(1, &[]);
        assert!(lp.contains("Minimize\n obj: + 1 T_k1\n"));
        assert!(lp.contains(" c1: + 1 x_a0_m0 + 2 y_a1_k1_m0 >= 1\n"));
        assert!(lp.contains(" c2: - 3 x_a0_m0 + 1 T_k1 = 0\n"));
        assert!(lp.contains("General\n y_a1_k1_m0\nBinary\n x_a0_m0\nEnd\n"));
        assert_eq!(m.count_vars("x"), 1);
        assert_eq!(m.count_vars("T"), 1);
    }
}
