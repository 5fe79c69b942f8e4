//! Boolean delegation functions in complete disjunctive normal form.
//!
//! A complete DNF lists every prime implicant of the function it represents.
//! That makes necessary-winner checks on partial assignments a single scan:
//! the function is forced to 1 when some cube has all of its literals
//! satisfied, and forced to 0 when every cube contains a falsified literal.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Variables are agent indices.
pub type Var = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DnfError {
    #[error("formula is a tautology")]
    Tautology,
    #[error("formula is a contradiction")]
    Contradiction,
    #[error("cube contains both a literal and its negation")]
    ContradictoryCube,
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: Var,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: Var) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: Var) -> Self {
        Literal { var, negated: true }
    }

    pub fn negate(self) -> Self {
        Literal { var: self.var, negated: !self.negated }
    }

    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

/// A conjunction of literals over distinct variables, kept sorted.
///
/// The empty cube is the constant true; it never appears inside a
/// [`CompleteDnf`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube(Vec<Literal>);

impl Cube {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Result<Self, DnfError> {
        let set: BTreeSet<Literal> = literals.into_iter().collect();
        let lits: Vec<Literal> = set.into_iter().collect();
        if lits.windows(2).any(|w| w[0].var == w[1].var) {
            return Err(DnfError::ContradictoryCube);
        }
        Ok(Cube(lits))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn literal_of(&self, var: Var) -> Option<Literal> {
        self.0
            .binary_search_by_key(&var, |l| l.var)
            .ok()
            .map(|i| self.0[i])
    }

    /// True when every literal of `self` also occurs in `other`, so `self`
    /// absorbs `other` in a disjunction.
    pub fn subsumes(&self, other: &Cube) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().all(|l| other.literal_of(l.var) == Some(*l))
    }

    /// Consensus of two cubes that clash on exactly one variable.
    pub fn consensus(&self, other: &Cube) -> Option<Cube> {
        let mut clash = None;
        for l in &self.0 {
            if let Some(m) = other.literal_of(l.var) {
                if m != *l {
                    if clash.is_some() {
                        return None;
                    }
                    clash = Some(l.var);
                }
            }
        }
        let var = clash?;
        let lits: BTreeSet<Literal> = self
            .0
            .iter()
            .chain(other.0.iter())
            .copied()
            .filter(|l| l.var != var)
            .collect();
        Some(Cube(lits.into_iter().collect()))
    }

    pub fn evaluate(&self, value: impl Fn(Var) -> bool) -> bool {
        self.0.iter().all(|l| l.satisfied_by(value(l.var)))
    }
}

/// Read access to a (partial) truth assignment over variables.
pub trait Valuation {
    fn value(&self, var: Var) -> Option<bool>;
}

impl<F: Fn(Var) -> Option<bool>> Valuation for F {
    fn value(&self, var: Var) -> Option<bool> {
        self(var)
    }
}

/// Truth assignment where each variable is true, false or unassigned.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialAssignment(Vec<Option<bool>>);

impl PartialAssignment {
    pub fn new() -> Self {
        PartialAssignment(Vec::new())
    }

    pub fn with_size(n: usize) -> Self {
        PartialAssignment(vec![None; n])
    }

    pub fn set(&mut self, var: Var, value: bool) {
        if var >= self.0.len() {
            self.0.resize(var + 1, None);
        }
        self.0[var] = Some(value);
    }

    pub fn unset(&mut self, var: Var) {
        if var < self.0.len() {
            self.0[var] = None;
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, bool)>) -> Self {
        let mut a = PartialAssignment::new();
        for (v, b) in pairs {
            a.set(v, b);
        }
        a
    }
}

impl Valuation for PartialAssignment {
    fn value(&self, var: Var) -> Option<bool> {
        self.0.get(var).copied().flatten()
    }
}

/// A contingent Boolean function given by all of its prime implicants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompleteDnf {
    cubes: Vec<Cube>,
    vars: Vec<Var>,
}

impl CompleteDnf {
    /// The single-literal function `var`.
    pub fn variable(var: Var) -> Self {
        CompleteDnf { cubes: vec![Cube(vec![Literal::pos(var)])], vars: vec![var] }
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    /// Variables occurring in the formula, ascending.
    pub fn variables(&self) -> &[Var] {
        &self.vars
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.cubes.iter().map(Cube::len).sum()
    }

    /// Returns `Some(var)` when the function is the plain positive literal.
    pub fn as_single_variable(&self) -> Option<Var> {
        match self.cubes.as_slice() {
            [c] if c.len() == 1 && !c.0[0].negated => Some(c.0[0].var),
            _ => None,
        }
    }

    pub fn necessary_winner(&self, valuation: &impl Valuation) -> Option<bool> {
        self.necessary_winner_counted(valuation).0
    }

    /// Necessary winner together with the number of literals inspected.
    pub fn necessary_winner_counted(&self, valuation: &impl Valuation) -> (Option<bool>, usize) {
        let mut scanned = 0;
        let mut all_blocked = true;
        for cube in &self.cubes {
            let mut satisfied = true;
            let mut blocked = false;
            for lit in &cube.0 {
                scanned += 1;
                match valuation.value(lit.var) {
                    Some(v) if lit.satisfied_by(v) => {}
                    Some(_) => {
                        blocked = true;
                        satisfied = false;
                        break;
                    }
                    None => satisfied = false,
                }
            }
            if satisfied {
                return (Some(true), scanned);
            }
            all_blocked &= blocked;
        }
        if all_blocked {
            (Some(false), scanned)
        } else {
            (None, scanned)
        }
    }

    pub fn evaluate(&self, value: impl Fn(Var) -> bool) -> bool {
        self.cubes.iter().any(|c| c.evaluate(&value))
    }

    /// Logical equivalence. Complete DNFs are canonical, so this is equality.
    pub fn equivalent(&self, other: &CompleteDnf) -> bool {
        self == other
    }

    /// Renders the formula using `names` for variables, e.g. `b&c | b&~d`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> DnfDisplay<'a> {
        DnfDisplay { dnf: self, names: Some(names) }
    }
}

pub struct DnfDisplay<'a> {
    dnf: &'a CompleteDnf,
    names: Option<&'a [String]>,
}

impl fmt::Display for DnfDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, cube) in self.dnf.cubes.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            for (j, lit) in cube.0.iter().enumerate() {
                if j > 0 {
                    f.write_str("&")?;
                }
                if lit.negated {
                    f.write_str("~")?;
                }
                match self.names.and_then(|n| n.get(lit.var)) {
                    Some(name) => f.write_str(name)?,
                    None => write!(f, "x{}", lit.var)?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for CompleteDnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        DnfDisplay { dnf: self, names: None }.fmt(f)
    }
}

/// Computes the complete DNF of the disjunction of `cubes` by iterated
/// consensus with absorption.
pub fn complete(cubes: impl IntoIterator<Item = Cube>) -> Result<CompleteDnf, DnfError> {
    let mut set: Vec<Cube> = Vec::new();
    for c in cubes {
        insert_absorbing(&mut set, c);
    }
    if set.is_empty() {
        return Err(DnfError::Contradiction);
    }
    if set.iter().any(Cube::is_empty) {
        return Err(DnfError::Tautology);
    }
    'outer: loop {
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                let Some(c) = set[i].consensus(&set[j]) else { continue };
                if set.iter().any(|d| d.subsumes(&c)) {
                    continue;
                }
                if c.is_empty() {
                    return Err(DnfError::Tautology);
                }
                insert_absorbing(&mut set, c);
                continue 'outer;
            }
        }
        break;
    }
    set.sort();
    let vars: BTreeSet<Var> = set.iter().flat_map(|c| c.0.iter().map(|l| l.var)).collect();
    Ok(CompleteDnf { cubes: set, vars: vars.into_iter().collect() })
}

fn insert_absorbing(set: &mut Vec<Cube>, c: Cube) {
    if set.iter().any(|d| d.subsumes(&c)) {
        return;
    }
    set.retain(|d| !c.subsumes(d));
    set.push(c);
}

/// Parses `b&c | ~d` style text into raw cubes. Variable names are resolved
/// through `resolve`; unknown names are reported as parse errors.
pub fn parse_cubes(
    text: &str,
    mut resolve: impl FnMut(&str) -> Option<Var>,
) -> Result<Vec<Cube>, DnfError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut pos = 0;
    let col = |pos: usize| -> usize {
        chars.get(pos).map(|(i, _)| text[..*i].chars().count() + 1).unwrap_or(text.chars().count() + 1)
    };
    let err = |pos: usize, message: String| DnfError::Parse { column: col(pos), message };
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].1.is_whitespace() {
            *pos += 1;
        }
    };

    let mut cubes = Vec::new();
    loop {
        let mut lits = Vec::new();
        loop {
            skip_ws(&mut pos);
            let mut negated = false;
            if pos < chars.len() && (chars[pos].1 == '~' || chars[pos].1 == '!') {
                negated = true;
                pos += 1;
                skip_ws(&mut pos);
            }
            let start = pos;
            while pos < chars.len() && (chars[pos].1.is_alphanumeric() || chars[pos].1 == '_' || chars[pos].1 == '\'') {
                pos += 1;
            }
            if start == pos {
                let found = chars.get(pos).map(|c| format!("`{}`", c.1)).unwrap_or_else(|| "end of input".into());
                return Err(err(pos, format!("expected a variable, found {found}")));
            }
            let name: String = chars[start..pos].iter().map(|c| c.1).collect();
            let var = resolve(&name).ok_or_else(|| err(start, format!("unknown variable `{name}`")))?;
            lits.push(if negated { Literal::neg(var) } else { Literal::pos(var) });
            skip_ws(&mut pos);
            if pos < chars.len() && chars[pos].1 == '&' {
                pos += 1;
                continue;
            }
            break;
        }
        let cube_start = pos;
        cubes.push(Cube::new(lits).map_err(|_| err(cube_start.saturating_sub(1), "cube contains a literal and its negation".into()))?);
        skip_ws(&mut pos);
        if pos == chars.len() {
            break;
        }
        if chars[pos].1 == '|' {
            pos += 1;
            continue;
        }
        return Err(err(pos, format!("unexpected `{}`", chars[pos].1)));
    }
    Ok(cubes)
}

/// Parses and completes a formula in one step.
pub fn parse(text: &str, resolve: impl FnMut(&str) -> Option<Var>) -> Result<CompleteDnf, DnfError> {
    complete(parse_cubes(text, resolve)?)
}
