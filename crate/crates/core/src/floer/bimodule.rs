//! Strictly unital type-DA bimodules over the torus algebra.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::algebra::{Elem, Output};
use super::FloerError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub left: Elem,
    pub right: Elem,
}

/// One summand `output ⊗ y` of `δ(x ⊗ inputs)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub x: usize,
    pub inputs: Vec<Elem>,
    pub output: Output,
    pub y: usize,
}

/// A type-DA bimodule: generators with idempotents and stored terms.
///
/// Stored terms never have idempotent inputs; `δ_2(x ⊗ 1) = 1 ⊗ x` is
/// synthesized by [`DABimodule::delta`].
#[derive(Clone, PartialEq, Eq)]
pub struct DABimodule {
    generators: Vec<Generator>,
    terms: Vec<Term>,
    index: HashMap<String, usize>,
}

impl fmt::Debug for DABimodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DABimodule {{")?;
        for t in &self.terms {
            writeln!(f, "  {}", self.describe(t))?;
        }
        write!(f, "}}")
    }
}

impl DABimodule {
    /// Validate and build. Terms are reduced mod 2 and sorted.
    pub fn new(generators: Vec<Generator>, terms: Vec<Term>) -> Result<Self, FloerError> {
        let mut index = HashMap::new();
        for (i, g) in generators.iter().enumerate() {
            if !g.left.is_idempotent() || !g.right.is_idempotent() {
                return Err(FloerError::Malformed(format!(
                    "generator {} has non-idempotent type ({}, {})",
                    g.name, g.left, g.right
                )));
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(FloerError::Malformed(format!("duplicate generator {}", g.name)));
            }
        }
        let mut parity: HashMap<Term, bool> = HashMap::new();
        for t in terms {
            *parity.entry(t).or_insert(false) ^= true;
        }
        let mut terms: Vec<Term> = parity.into_iter().filter(|&(_, odd)| odd).map(|(t, _)| t).collect();
        terms.sort();
        let m = Self {
            generators,
            terms,
            index,
        };
        for t in &m.terms {
            m.check_term(t)?;
        }
        m.check_zero_input_cycles()?;
        Ok(m)
    }

    fn check_term(&self, t: &Term) -> Result<(), FloerError> {
        let n = self.generators.len();
        if t.x >= n || t.y >= n {
            return Err(FloerError::Malformed("term refers to a missing generator".into()));
        }
        let bad = |msg: &str| FloerError::IdempotentChain {
            term: self.describe(t),
            msg: msg.to_string(),
        };
        let (x, y) = (&self.generators[t.x], &self.generators[t.y]);
        if let Some(a) = t.inputs.iter().find(|a| a.is_idempotent()) {
            return Err(FloerError::IdempotentInput {
                term: self.describe(t),
                input: a.to_string(),
            });
        }
        match t.output {
            Output::One => {
                if x.left != y.left {
                    return Err(bad("output 1 needs left(x) = left(y)"));
                }
            }
            Output::Basis(b) => {
                if b.left() != x.left {
                    return Err(bad("left(output) differs from left(x)"));
                }
                if b.right() != y.left {
                    return Err(bad("right(output) differs from left(y)"));
                }
            }
        }
        let mut cur = x.right;
        for a in &t.inputs {
            if a.left() != cur {
                return Err(bad("inputs do not chain"));
            }
            cur = a.right();
        }
        if y.right != cur {
            return Err(bad("right(y) differs from the right end of the inputs"));
        }
        let mut grades: BTreeSet<i8> = t.inputs.iter().map(|a| a.strands_grading()).collect();
        grades.insert(x.left.strands_grading());
        grades.insert(y.right.strands_grading());
        if let Output::Basis(b) = t.output {
            grades.insert(b.strands_grading());
        }
        if grades.len() > 1 {
            return Err(bad("mixes strands gradings"));
        }
        Ok(())
    }

    fn check_zero_input_cycles(&self) -> Result<(), FloerError> {
        let n = self.generators.len();
        let mut next: Vec<Vec<usize>> = vec![Vec::new(); n];
        for t in self.terms.iter().filter(|t| t.inputs.is_empty()) {
            next[t.x].push(t.y);
        }
        // 0 = unvisited, 1 = on stack, 2 = done.
        let mut state = vec![0u8; n];
        let mut stack: Vec<usize> = Vec::new();
        fn visit(
            v: usize,
            next: &[Vec<usize>],
            state: &mut [u8],
            stack: &mut Vec<usize>,
        ) -> Option<Vec<usize>> {
            state[v] = 1;
            stack.push(v);
            for &w in &next[v] {
                if state[w] == 1 {
                    let start = stack.iter().position(|&s| s == w).expect("on stack");
                    return Some(stack[start..].to_vec());
                }
                if state[w] == 0 {
                    if let Some(c) = visit(w, next, state, stack) {
                        return Some(c);
                    }
                }
            }
            stack.pop();
            state[v] = 2;
            None
        }
        for v in 0..n {
            if state[v] == 0 {
                if let Some(cycle) = visit(v, &next, &mut state, &mut stack) {
                    return Err(FloerError::ZeroInputCycle(
                        cycle.iter().map(|&i| self.generators[i].name.clone()).collect(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn generator(&self, name: &str) -> Result<usize, FloerError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| FloerError::UnknownGenerator(name.to_string()))
    }

    pub fn name(&self, g: usize) -> &str {
        &self.generators[g].name
    }

    /// `x → y: output ⊗ (inputs)`.
    pub fn describe(&self, t: &Term) -> String {
        let name = |i: usize| {
            self.generators
                .get(i)
                .map_or_else(|| format!("#{i}"), |g| g.name.clone())
        };
        let inputs: Vec<String> = t.inputs.iter().map(ToString::to_string).collect();
        format!("{} → {}: {} ⊗ ({})", name(t.x), name(t.y), t.output, inputs.join(","))
    }

    /// Terms leaving `x`.
    pub fn terms_from(&self, x: usize) -> impl Iterator<Item = &Term> {
        let start = self.terms.partition_point(|t| t.x < x);
        self.terms[start..].iter().take_while(move |t| t.x == x)
    }

    /// `δ_{1+j}(x ⊗ inputs)` as a list of `(output, y)` summands, mod 2.
    /// Includes the strictly unital `δ_2(x ⊗ 1) = 1 ⊗ x`.
    pub fn delta(&self, x: usize, inputs: &[Output]) -> Vec<(Output, usize)> {
        if inputs == [Output::One] {
            return vec![(Output::One, x)];
        }
        let mut elems = Vec::with_capacity(inputs.len());
        for &a in inputs {
            match a {
                Output::Basis(e) if !e.is_idempotent() => elems.push(e),
                Output::Basis(e) if inputs.len() == 1 && e == self.generators[x].right => {
                    // An idempotent acting as the unit on x.
                    return vec![(Output::One, x)];
                }
                _ => return Vec::new(),
            }
        }
        self.terms_from(x)
            .filter(|t| t.inputs == elems)
            .map(|t| (t.output, t.y))
            .collect()
    }

    /// Every chain of stored terms starting at `y` whose inputs, concatenated,
    /// spell `word`. Each result lists the chain's outputs and its end.
    pub fn delta_k(&self, y: usize, word: &[Elem]) -> Vec<(Vec<Output>, usize)> {
        let mut out = Vec::new();
        let mut outputs = Vec::new();
        self.chains(y, word, &mut outputs, &mut out);
        out
    }

    fn chains(
        &self,
        cur: usize,
        rest: &[Elem],
        outputs: &mut Vec<Output>,
        out: &mut Vec<(Vec<Output>, usize)>,
    ) {
        if rest.is_empty() {
            out.push((outputs.clone(), cur));
        }
        for t in self.terms_from(cur) {
            if rest.starts_with(&t.inputs) {
                outputs.push(t.output);
                self.chains(t.y, &rest[t.inputs.len()..], outputs, out);
                outputs.pop();
            }
        }
    }

    /// Generators with equal left and right idempotents.
    pub fn hochschild_generators(&self) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&i| self.generators[i].left == self.generators[i].right)
            .collect()
    }

    /// Terms as name-based records, for comparisons across bimodules.
    pub fn term_set(&self) -> BTreeSet<(String, Vec<Elem>, Output, String)> {
        self.terms
            .iter()
            .map(|t| {
                (
                    self.name(t.x).to_string(),
                    t.inputs.clone(),
                    t.output,
                    self.name(t.y).to_string(),
                )
            })
            .collect()
    }

    /// Longest input list among stored terms.
    pub fn max_inputs(&self) -> usize {
        self.terms.iter().map(|t| t.inputs.len()).max().unwrap_or(0)
    }

    pub fn to_file(&self) -> BimoduleFile {
        BimoduleFile {
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorRecord {
                    name: g.name.clone(),
                    left: g.left.name().to_string(),
                    right: g.right.name().to_string(),
                })
                .collect(),
            terms: self
                .terms
                .iter()
                .map(|t| TermRecord {
                    x: self.name(t.x).to_string(),
                    inputs: t.inputs.iter().map(|a| a.name().to_string()).collect(),
                    output: t.output.name().to_string(),
                    y: self.name(t.y).to_string(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &BimoduleFile) -> Result<Self, FloerError> {
        let parse_elem = |s: &str| s.parse::<Elem>().map_err(FloerError::Malformed);
        let generators = file
            .generators
            .iter()
            .map(|g| {
                Ok(Generator {
                    name: g.name.clone(),
                    left: parse_elem(&g.left)?,
                    right: parse_elem(&g.right)?,
                })
            })
            .collect::<Result<Vec<_>, FloerError>>()?;
        let index: HashMap<&str, usize> = generators
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.as_str(), i))
            .collect();
        let find = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| FloerError::UnknownGenerator(n.to_string()))
        };
        let terms = file
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    x: find(&t.x)?,
                    inputs: t
                        .inputs
                        .iter()
                        .map(|a| parse_elem(a))
                        .collect::<Result<_, _>>()?,
                    output: t.output.parse().map_err(FloerError::Malformed)?,
                    y: find(&t.y)?,
                })
            })
            .collect::<Result<Vec<_>, FloerError>>()?;
        Self::new(generators, terms)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("plain records serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FloerError> {
        let file: BimoduleFile =
            serde_json::from_str(text).map_err(|e| FloerError::Json(e.to_string()))?;
        Self::from_file(&file)
    }
}

/// On-disk form of a bimodule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleFile {
    pub generators: Vec<GeneratorRecord>,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub name: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub x: String,
    pub inputs: Vec<String>,
    pub output: String,
    pub y: String,
}
