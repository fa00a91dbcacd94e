//! Magnetized, conditionally convergent tensor powers of `Fun(B, F2)`.
//!
//! An [`MccWindow`] is a table on `B^{X_M}`, read as an element of the full
//! space by extension by zero. [`apply_mcc`] is the functorial action of a
//! matrix, [`staircase_position`] and [`quotient_class`] locate a window in
//! the staircase `F''_H ⊂ F'_H`, and [`cc_probe`] inspects lazily generated
//! series level by level.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::bits::BitVec;
use crate::f2cat::{strip_comment, F2Matrix, F2Vector, FunctionIndex, LabeledSet};
use crate::tower::{DyadicTower, Perm, TowerError};

/// Largest window table accepted, in entries.
pub const WINDOW_CAP: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MccError {
    #[error("basis mismatch: matrix columns {matrix} vs window basis {window}")]
    BasisMismatch { matrix: String, window: String },
    #[error("depth {depth} is beyond the tower's max level {max}")]
    DepthBeyondTower { depth: usize, max: usize },
    #[error("requested level {requested} is below the invariance level {inv_level}")]
    BelowInvarianceLevel { requested: usize, inv_level: usize },
    #[error("predicate is not stable: {witness} is allowed but {image} is not")]
    StabilityViolation { witness: String, image: String },
    #[error("lazy tower is malformed at level {level}: it does not restrict to level {below}")]
    MalformedTower { level: usize, below: usize },
    #[error("table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("window over {base} letters at depth {depth} exceeds {WINDOW_CAP} entries")]
    TooLarge { base: usize, depth: usize },
    #[error("word {word:?}: {msg}")]
    BadWord { word: String, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Size of `B^{X_depth}`, guarded by [`WINDOW_CAP`].
pub fn function_space(
    tower: &DyadicTower,
    base: usize,
    depth: usize,
) -> Result<FunctionIndex, MccError> {
    tower.check_level(depth)?;
    let space = FunctionIndex::new(base, tower.level_size(depth));
    match space.checked_size() {
        Some(n) if n <= WINDOW_CAP => Ok(space),
        _ => Err(MccError::TooLarge { base, depth }),
    }
}

/// Index in `B^{X_to}` of the pullback of `f ∈ B^{X_from}`, for `from ≤ to`.
fn pullback_index(tower: &DyadicTower, base: usize, from: usize, to: usize, f: usize) -> usize {
    let src = FunctionIndex::new(base, tower.level_size(from));
    let dst = FunctionIndex::new(base, tower.level_size(to));
    let d = src.digits(f);
    let e: Vec<usize> = (0..tower.level_size(to))
        .map(|x| d[tower.project(to, from, x)])
        .collect();
    dst.index(&e)
}

/// Least `h ≤ depth` such that `table` is invariant under the level-`h` kernel.
pub fn table_invariance_level(
    tower: &DyadicTower,
    base: usize,
    depth: usize,
    table: &BitVec,
) -> usize {
    (0..=depth)
        .find(|&h| {
            tower
                .kernel_generators(depth, h)
                .iter()
                .all(|g| is_invariant_under(&g.induced_on_functions(base), table))
        })
        .unwrap_or(depth)
}

fn is_invariant_under(p: &Perm, table: &BitVec) -> bool {
    table.ones_iter().all(|i| table.get(p.apply(i)))
}

/// A depth-`M` truncation of a conditionally convergent tensor.
#[derive(Clone, PartialEq, Eq)]
pub struct MccWindow {
    tower: Arc<DyadicTower>,
    basis: LabeledSet,
    depth: usize,
    inv_level: usize,
    table: BitVec,
}

impl fmt::Debug for MccWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MccWindow")
            .field("basis", &self.basis)
            .field("depth", &self.depth)
            .field("inv_level", &self.inv_level)
            .field("support", &self.support_words())
            .finish()
    }
}

impl MccWindow {
    /// Build a window; the invariance level is recomputed from the table.
    pub fn from_table(
        tower: Arc<DyadicTower>,
        basis: LabeledSet,
        depth: usize,
        table: BitVec,
    ) -> Result<Self, MccError> {
        let space = function_space(&tower, basis.len(), depth)?;
        if table.len() != space.size() {
            return Err(MccError::TableSize {
                expected: space.size(),
                found: table.len(),
            });
        }
        let inv_level = table_invariance_level(&tower, basis.len(), depth, &table);
        Ok(Self {
            tower,
            basis,
            depth,
            inv_level,
            table,
        })
    }

    pub fn zero(tower: Arc<DyadicTower>, basis: LabeledSet, depth: usize) -> Result<Self, MccError> {
        let space = function_space(&tower, basis.len(), depth)?;
        Self::from_table(tower, basis, depth, BitVec::zeros(space.size()))
    }

    /// The sum of the pure tensors named by `words`, each pulled back to `depth`.
    pub fn from_words(
        tower: Arc<DyadicTower>,
        basis: LabeledSet,
        depth: usize,
        words: &[&str],
    ) -> Result<Self, MccError> {
        let space = function_space(&tower, basis.len(), depth)?;
        let mut table = BitVec::zeros(space.size());
        for w in words {
            table.flip(word_index(&tower, &basis, depth, w)?);
        }
        Self::from_table(tower, basis, depth, table)
    }

    pub fn tower(&self) -> &Arc<DyadicTower> {
        &self.tower
    }

    pub fn basis(&self) -> &LabeledSet {
        &self.basis
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn inv_level(&self) -> usize {
        self.inv_level
    }

    pub fn table(&self) -> &BitVec {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_zero()
    }

    /// Value on the pure tensor named by `word`, which may be shorter than
    /// `2^depth` and is then pulled back. Words deeper than the window read 0
    /// unless they factor through `X_depth`.
    pub fn value(&self, word: &str) -> Result<bool, MccError> {
        let letters = parse_letters(&self.basis, word)?;
        let level = level_of_length(&self.tower, word, letters.len())?;
        let space = FunctionIndex::new(self.basis.len(), letters.len());
        let idx = space.index(&letters);
        if level <= self.depth {
            return Ok(self
                .table
                .get(pullback_index(&self.tower, self.basis.len(), level, self.depth, idx)));
        }
        let restricted = self.restrict_to(level)?;
        Ok(restricted.get(idx))
    }

    /// Entrywise sum of two windows of the same shape.
    pub fn add(&self, other: &MccWindow) -> Result<MccWindow, MccError> {
        if self.basis != other.basis || self.depth != other.depth || self.tower != other.tower {
            return Err(MccError::BasisMismatch {
                matrix: format!("{} at depth {}", self.basis, self.depth),
                window: format!("{} at depth {}", other.basis, other.depth),
            });
        }
        let mut table = self.table.clone();
        table.xor_assign(&other.table);
        Self::from_table(self.tower.clone(), self.basis.clone(), self.depth, table)
    }

    /// The table on `B^{X_d}`: restriction for `d ≤ depth`, extension by
    /// zero for `d > depth`.
    pub fn restrict_to(&self, d: usize) -> Result<BitVec, MccError> {
        let base = self.basis.len();
        let space = function_space(&self.tower, base, d)?;
        let mut out = BitVec::zeros(space.size());
        if d <= self.depth {
            for g in 0..space.size() {
                if self.table.get(pullback_index(&self.tower, base, d, self.depth, g)) {
                    out.set(g, true);
                }
            }
        } else {
            for f in self.table.ones_iter() {
                out.set(pullback_index(&self.tower, base, self.depth, d, f), true);
            }
        }
        Ok(out)
    }

    /// The same element presented at another depth.
    pub fn at_depth(&self, d: usize) -> Result<MccWindow, MccError> {
        let table = self.restrict_to(d)?;
        Self::from_table(self.tower.clone(), self.basis.clone(), d, table)
    }

    /// Words of the supporting pure tensors, each written at full depth.
    pub fn support_words(&self) -> Vec<String> {
        let space = FunctionIndex::new(self.basis.len(), self.tower.level_size(self.depth));
        self.table
            .ones_iter()
            .map(|i| format_word(&self.basis, &space.digits(i)))
            .collect()
    }

    /// Parse the window file format:
    ///
    /// ```text
    /// tower: dyadic 2
    /// basis: x y
    /// depth: 2
    /// xy 1
    /// xxxy 1
    /// ```
    ///
    /// `tower:` accepts `dyadic N`, `union K N`, or a tower file path,
    /// resolved against `base_dir`. Words shorter than `2^depth` are pulled
    /// back; omitted words are 0.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<MccWindow, MccError> {
        let mut tower: Option<Arc<DyadicTower>> = None;
        let mut basis: Option<LabeledSet> = None;
        let mut depth: Option<usize> = None;
        let mut table: Option<BitVec> = None;
        let mut seen: Vec<Option<usize>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| MccError::Parse { line: ln, msg };
            if let Some(rest) = line.strip_prefix("tower:") {
                tower = Some(Arc::new(resolve_tower(rest.trim(), base_dir).map_err(|e| perr(e.to_string()))?));
                continue;
            }
            if let Some(rest) = line.strip_prefix("basis:") {
                basis = Some(LabeledSet::new(rest.split_whitespace()).map_err(|e| perr(e.to_string()))?);
                continue;
            }
            if let Some(rest) = line.strip_prefix("depth:") {
                depth = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| perr(format!("bad depth {:?}", rest.trim())))?,
                );
                continue;
            }
            let (Some(t), Some(b), Some(d)) = (&tower, &basis, depth) else {
                return Err(perr("`tower:`, `basis:` and `depth:` must precede entries".into()));
            };
            if table.is_none() {
                let space = function_space(t, b.len(), d).map_err(|e| perr(e.to_string()))?;
                table = Some(BitVec::zeros(space.size()));
                seen = vec![None; space.size()];
            }
            let mut parts = line.split_whitespace();
            let (Some(word), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(perr(format!("expected `word value`, found {line:?}")));
            };
            let value = match value {
                "0" => false,
                "1" => true,
                other => return Err(perr(format!("value {other:?} is not 0 or 1"))),
            };
            let idx = word_index(t, b, d, word).map_err(|e| perr(e.to_string()))?;
            if let Some(prev) = seen[idx].replace(ln) {
                return Err(perr(format!("{word:?} names the same tensor as line {prev}")));
            }
            table.as_mut().expect("initialized").set(idx, value);
        }
        let missing = |what: &str| MccError::Parse {
            line: text.lines().count(),
            msg: format!("missing `{what}:` line"),
        };
        let tower = tower.ok_or_else(|| missing("tower"))?;
        let basis = basis.ok_or_else(|| missing("basis"))?;
        let depth = depth.ok_or_else(|| missing("depth"))?;
        let table = match table {
            Some(t) => t,
            None => BitVec::zeros(function_space(&tower, basis.len(), depth)?.size()),
        };
        MccWindow::from_table(tower, basis, depth, table)
    }

    /// Serialize in the window file format, with `tower_ref` as the tower line.
    pub fn to_text(&self, tower_ref: &str) -> String {
        let mut out = format!(
            "tower: {tower_ref}\nbasis: {}\ndepth: {}\n",
            self.basis.labels().join(" "),
            self.depth
        );
        for w in self.support_words() {
            out.push_str(&w);
            out.push_str(" 1\n");
        }
        out
    }
}

/// Builtin tower references: `dyadic N` and `union K N`; anything else is a path.
pub fn resolve_tower(source: &str, base_dir: Option<&Path>) -> Result<DyadicTower, MccError> {
    let words: Vec<&str> = source.split_whitespace().collect();
    let num = |s: &str| {
        s.parse::<usize>().map_err(|_| MccError::Parse {
            line: 0,
            msg: format!("bad number {s:?} in tower reference"),
        })
    };
    match words.as_slice() {
        ["dyadic", n] => Ok(DyadicTower::dyadic_solenoid(num(n)?)?),
        ["union", k, n] => Ok(DyadicTower::dyadic_union(num(k)?, num(n)?)?),
        [path] => {
            let p = match base_dir {
                Some(dir) => dir.join(path),
                None => Path::new(path).to_path_buf(),
            };
            let text = std::fs::read_to_string(&p).map_err(|e| MccError::Parse {
                line: 0,
                msg: format!("cannot read tower file {}: {e}", p.display()),
            })?;
            Ok(DyadicTower::parse(&text)?)
        }
        _ => Err(MccError::Parse {
            line: 0,
            msg: format!("unrecognized tower reference {source:?}"),
        }),
    }
}

/// Letters of a word. Single-character bases use plain strings like `vwuu`;
/// otherwise letters are comma separated.
fn parse_letters(basis: &LabeledSet, word: &str) -> Result<Vec<usize>, MccError> {
    let single = basis.labels().iter().all(|l| l.chars().count() == 1);
    let bad = |msg: String| MccError::BadWord {
        word: word.to_string(),
        msg,
    };
    if single && !word.contains(',') {
        word.chars()
            .map(|c| {
                basis
                    .position(&c.to_string())
                    .ok_or_else(|| bad(format!("{c:?} is not a basis letter")))
            })
            .collect()
    } else {
        word.split(',')
            .map(|l| {
                basis
                    .position(l)
                    .ok_or_else(|| bad(format!("{l:?} is not a basis letter")))
            })
            .collect()
    }
}

fn format_word(basis: &LabeledSet, digits: &[usize]) -> String {
    let single = basis.labels().iter().all(|l| l.chars().count() == 1);
    let letters: Vec<&str> = digits.iter().map(|&d| basis.label(d)).collect();
    if single {
        letters.concat()
    } else {
        letters.join(",")
    }
}

fn level_of_length(tower: &DyadicTower, word: &str, len: usize) -> Result<usize, MccError> {
    (0..=tower.max_level())
        .find(|&m| tower.level_size(m) == len)
        .ok_or_else(|| MccError::BadWord {
            word: word.to_string(),
            msg: format!("length {len} matches no tower level"),
        })
}

/// Index in `B^{X_depth}` of the pure tensor named by `word`.
pub fn word_index(
    tower: &DyadicTower,
    basis: &LabeledSet,
    depth: usize,
    word: &str,
) -> Result<usize, MccError> {
    let letters = parse_letters(basis, word)?;
    let level = level_of_length(tower, word, letters.len())?;
    if level > depth {
        return Err(MccError::BadWord {
            word: word.to_string(),
            msg: format!("needs depth {level}, window has depth {depth}"),
        });
    }
    let idx = FunctionIndex::new(basis.len(), letters.len()).index(&letters);
    Ok(pullback_index(tower, basis.len(), level, depth, idx))
}

/// The depth-`out_depth` window of `M^{(x)X}` applied to `w`.
///
/// For `g ∈ C^{X_{M'}}` the value is `Σ_f w(f) Π_x M(g(x), f(x))` over
/// `f ∈ B^{X_M}` and `x ∈ X_{max(M, M')}`.
pub fn apply_mcc(m: &F2Matrix, w: &MccWindow, out_depth: usize) -> Result<MccWindow, MccError> {
    if m.cols() != w.basis() {
        return Err(MccError::BasisMismatch {
            matrix: m.cols().to_string(),
            window: w.basis().to_string(),
        });
    }
    let tower = w.tower();
    if out_depth > tower.max_level() {
        return Err(MccError::DepthBeyondTower {
            depth: out_depth,
            max: tower.max_level(),
        });
    }
    let c_len = m.rows().len();
    let out_space = function_space(tower, c_len, out_depth)?;
    let mut out = BitVec::zeros(out_space.size());
    let top = w.depth().max(out_depth);
    let n_top = tower.level_size(top);
    let to_in = tower.projection_map(top, w.depth());
    let to_out = tower.projection_map(top, out_depth);
    let in_space = FunctionIndex::new(w.basis().len(), tower.level_size(w.depth()));
    let n_out = tower.level_size(out_depth);
    for f in w.table().ones_iter() {
        let fd = in_space.digits(f);
        // allowed[y]: letters c with M(c, f(x)) = 1 for every x over y.
        let mut allowed: Vec<Vec<bool>> = vec![vec![true; c_len]; n_out];
        for x in 0..n_top {
            let b = fd[to_in[x]];
            let y = to_out[x];
            for (c, ok) in allowed[y].iter_mut().enumerate() {
                *ok &= m.get(c, b);
            }
        }
        let choices: Vec<Vec<usize>> = allowed
            .iter()
            .map(|a| (0..c_len).filter(|&c| a[c]).collect())
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        for_each_product(&choices, |g| out.flip(out_space.index(g)));
    }
    MccWindow::from_table(tower.clone(), m.rows().clone(), out_depth, out)
}

/// Call `visit` on every tuple in the cartesian product of `choices`.
pub(crate) fn for_each_product(choices: &[Vec<usize>], mut visit: impl FnMut(&[usize])) {
    let mut pos = vec![0usize; choices.len()];
    let mut cur: Vec<usize> = choices.iter().map(|c| c[0]).collect();
    loop {
        visit(&cur);
        let mut k = choices.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            pos[k] += 1;
            if pos[k] < choices[k].len() {
                cur[k] = choices[k][pos[k]];
                break;
            }
            pos[k] = 0;
            cur[k] = choices[k][0];
        }
    }
}

/// Where a window sits in the staircase: `w ∈ F'_{H_h}`, and `w ∈ F''_{H_m}`
/// exactly when `d > m`. `d` is `None` for the zero window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StairPosition {
    pub h: usize,
    pub d: Option<usize>,
}

impl StairPosition {
    pub fn in_f_double_prime(&self, m: usize) -> bool {
        self.d.is_none_or(|d| d > m)
    }
}

impl fmt::Display for StairPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            Some(d) => write!(f, "({}, {})", self.h, d),
            None => write!(f, "({}, inf)", self.h),
        }
    }
}

pub fn staircase_position(w: &MccWindow) -> StairPosition {
    let d = (0..=w.depth()).find(|&d| {
        !w.restrict_to(d)
            .expect("levels below the window depth fit")
            .is_zero()
    });
    StairPosition {
        h: w.inv_level(),
        d,
    }
}

/// The class of `w` in `F'_H / F''_H` for `H` the level-`h'` kernel,
/// as a table on `B^{X_{h'}}`.
pub fn quotient_class(w: &MccWindow, h_prime: usize) -> Result<F2Vector, MccError> {
    if h_prime < w.inv_level() {
        return Err(MccError::BelowInvarianceLevel {
            requested: h_prime,
            inv_level: w.inv_level(),
        });
    }
    let bits = w.restrict_to(h_prime)?;
    let domain = w.basis().functions_from(w.tower().level_set(h_prime));
    Ok(F2Vector { domain, bits })
}

/// Zero `w` on every pure tensor whose composite `X -> B -> A` is not
/// allowed. `part[b]` is the part of letter `b`; `allowed` sees the composite
/// as a list of part indices over `X_M`.
pub fn sector_project(
    w: &MccWindow,
    part: &[usize],
    allowed: impl Fn(&[usize]) -> bool,
) -> Result<MccWindow, MccError> {
    if part.len() != w.basis().len() {
        return Err(MccError::TableSize {
            expected: w.basis().len(),
            found: part.len(),
        });
    }
    let tower = w.tower();
    let n = tower.level_size(w.depth());
    let space = FunctionIndex::new(w.basis().len(), n);
    let kernel = tower.kernel_generators(w.depth(), w.inv_level());
    let composite = |f: usize| -> Vec<usize> { space.digits(f).into_iter().map(|b| part[b]).collect() };
    for f in 0..space.size() {
        let a = composite(f);
        let ok = allowed(&a);
        for g in &kernel {
            let mut moved = vec![0; n];
            for (x, &ax) in a.iter().enumerate() {
                moved[g.apply(x)] = ax;
            }
            if allowed(&moved) != ok {
                let (yes, no) = if ok { (&a, &moved) } else { (&moved, &a) };
                let show = |v: &Vec<usize>| {
                    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                };
                return Err(MccError::StabilityViolation {
                    witness: show(yes),
                    image: show(no),
                });
            }
        }
    }
    let mut table = w.table().clone();
    for f in w.table().ones_iter() {
        if !allowed(&composite(f)) {
            table.set(f, false);
        }
    }
    MccWindow::from_table(tower.clone(), w.basis().clone(), w.depth(), table)
}

type LevelGenerator = dyn Fn(usize) -> BitVec + Send + Sync;

/// An element of the inverse limit, given level by level.
pub struct LazyTower {
    pub tower: Arc<DyadicTower>,
    pub basis: LabeledSet,
    generator: Box<LevelGenerator>,
}

impl fmt::Debug for LazyTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyTower")
            .field("tower", &self.tower)
            .field("basis", &self.basis)
            .finish_non_exhaustive()
    }
}

impl LazyTower {
    pub fn new(
        tower: Arc<DyadicTower>,
        basis: LabeledSet,
        generator: impl Fn(usize) -> BitVec + Send + Sync + 'static,
    ) -> Self {
        Self {
            tower,
            basis,
            generator: Box::new(generator),
        }
    }

    /// A series given by its terms: `terms(n)` lists the words of the n-th
    /// term, each of length `|X_n|`. Level `m` sums the terms with `n ≤ m`.
    pub fn from_series(
        tower: Arc<DyadicTower>,
        basis: LabeledSet,
        terms: impl Fn(usize) -> Vec<String> + Send + Sync + 'static,
    ) -> Self {
        let t = tower.clone();
        let b = basis.clone();
        Self::new(tower, basis, move |m| {
            let size = FunctionIndex::new(b.len(), t.level_size(m)).size();
            let mut table = BitVec::zeros(size);
            for n in 0..=m {
                for word in terms(n) {
                    let idx = word_index(&t, &b, m, &word).expect("series words fit their level");
                    table.flip(idx);
                }
            }
            table
        })
    }

    pub fn level(&self, m: usize) -> Result<MccWindow, MccError> {
        let table = (self.generator)(m);
        MccWindow::from_table(self.tower.clone(), self.basis.clone(), m, table)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    CcWitnessed { level: usize },
    DivergentThroughProbeDepth { depth: usize },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::CcWitnessed { level } => write!(f, "cc-witnessed at level {level}"),
            Verdict::DivergentThroughProbeDepth { depth } => write!(
                f,
                "divergent through probe depth {depth} (heuristic: finitely many levels cannot prove divergence)"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    /// `(m, h(m))` for every probed level.
    pub levels: Vec<(usize, usize)>,
    pub verdict: Verdict,
}

/// Invariance levels of `t` at levels `0..=probe_depth`.
///
/// `h(m)` is nondecreasing. The series is reported cc at `h(probe_depth)`
/// when that is below `probe_depth`, and otherwise divergent through the
/// probed levels.
pub fn cc_probe(t: &LazyTower, probe_depth: usize) -> Result<ProbeReport, MccError> {
    t.tower.check_level(probe_depth)?;
    let mut levels = Vec::new();
    let mut prev: Option<MccWindow> = None;
    for m in 0..=probe_depth {
        let w = t.level(m)?;
        if let Some(p) = &prev {
            if w.restrict_to(m - 1)? != *p.table() {
                return Err(MccError::MalformedTower {
                    level: m,
                    below: m - 1,
                });
            }
        }
        levels.push((m, w.inv_level()));
        prev = Some(w);
    }
    let h = levels.last().map_or(0, |&(_, h)| h);
    let verdict = if h < probe_depth {
        Verdict::CcWitnessed { level: h }
    } else {
        Verdict::DivergentThroughProbeDepth { depth: probe_depth }
    };
    Ok(ProbeReport { levels, verdict })
}

/// Series over the basis `{x, y}` on a dyadic tower.
pub mod series {
    use super::*;

    pub fn xy_basis() -> LabeledSet {
        LabeledSet::new(["x", "y"]).expect("two letters")
    }

    /// `x^a y x^b`.
    pub fn xyx(a: usize, b: usize) -> String {
        format!("{}y{}", "x".repeat(a), "x".repeat(b))
    }

    /// `Σ_{n ≥ 0} x^{2^n - 1} y`.
    pub fn divergent(tower: Arc<DyadicTower>) -> LazyTower {
        LazyTower::from_series(tower, xy_basis(), |n| vec![xyx((1 << n) - 1, 0)])
    }

    /// `Σ_{n ≥ 1} Σ_{i=1}^{2^n} x^{2^n - i} y x^{i-1}`.
    pub fn symmetrized(tower: Arc<DyadicTower>) -> LazyTower {
        LazyTower::from_series(tower, xy_basis(), |n| {
            if n == 0 {
                return Vec::new();
            }
            let len = 1usize << n;
            (1..=len).map(|i| xyx(len - i, i - 1)).collect()
        })
    }

    /// `Σ_{n ≥ 1} Σ_{i odd} x^{2^n - i} y x^{i-1}`.
    pub fn odd_positions(tower: Arc<DyadicTower>) -> LazyTower {
        LazyTower::from_series(tower, xy_basis(), |n| {
            if n == 0 {
                return Vec::new();
            }
            let len = 1usize << n;
            (1..=len).step_by(2).map(|i| xyx(len - i, i - 1)).collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(n: usize) -> Arc<DyadicTower> {
        Arc::new(DyadicTower::dyadic_solenoid(n).unwrap())
    }

    fn uv() -> LabeledSet {
        LabeledSet::new(["u", "v"]).unwrap()
    }

    #[test]
    fn words_pull_back_by_repetition() {
        let t = tower(2);
        let w = MccWindow::from_words(t.clone(), uv(), 2, &["uv"]).unwrap();
        assert_eq!(w.support_words(), vec!["uvuv"]);
        assert_eq!(w.inv_level(), 1);
        assert!(w.value("uv").unwrap());
        assert!(w.value("uvuv").unwrap());
        assert!(!w.value("vu").unwrap());
    }

    #[test]
    fn identity_restricts_and_extends() {
        let t = tower(2);
        let w = MccWindow::from_words(t.clone(), uv(), 1, &["uv", "u"]).unwrap();
        let id = F2Matrix::identity(uv());
        let up = apply_mcc(&id, &w, 2).unwrap();
        assert_eq!(up.support_words(), vec!["uuuu", "uvuv"]);
        let down = apply_mcc(&id, &w, 0).unwrap();
        assert_eq!(down.support_words(), vec!["u"]);
    }

    #[test]
    fn basis_preserving_map_fixes_constant_tensor() {
        let t = tower(2);
        let w = MccWindow::from_words(t.clone(), uv(), 0, &["u"]).unwrap();
        let m = F2Matrix::from_rows(uv(), uv(), &[vec![1, 1], vec![0, 1]]).unwrap();
        for d in 0..=2 {
            let out = apply_mcc(&m, &w, d).unwrap();
            assert_eq!(out.support_words(), vec!["u".repeat(1 << d)]);
        }
    }

    #[test]
    fn apply_errors() {
        let t = tower(1);
        let w = MccWindow::from_words(t, uv(), 0, &["u"]).unwrap();
        let other = F2Matrix::identity(LabeledSet::range(2));
        assert!(matches!(apply_mcc(&other, &w, 0), Err(MccError::BasisMismatch { .. })));
        let id = F2Matrix::identity(uv());
        assert!(matches!(apply_mcc(&id, &w, 2), Err(MccError::DepthBeyondTower { .. })));
    }

    #[test]
    fn empty_basis_is_zero_space() {
        let t = tower(1);
        let empty = LabeledSet::default();
        let w = MccWindow::zero(t, empty.clone(), 1).unwrap();
        assert_eq!(w.table().len(), 0);
        let out = apply_mcc(&F2Matrix::identity(empty), &w, 0).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn staircase_examples() {
        let t = tower(3);
        let xy = MccWindow::from_words(t.clone(), series::xy_basis(), 1, &["xy"]).unwrap();
        assert_eq!(staircase_position(&xy), StairPosition { h: 1, d: Some(1) });
        let zero = MccWindow::zero(t.clone(), series::xy_basis(), 2).unwrap();
        assert_eq!(staircase_position(&zero), StairPosition { h: 0, d: None });
        let elem = series::odd_positions(t.clone()).level(3).unwrap();
        let shifted = elem.add(&xy.at_depth(3).unwrap()).unwrap();
        let pos = staircase_position(&shifted);
        assert_eq!(pos, StairPosition { h: 1, d: Some(2) });
        assert!(pos.in_f_double_prime(1));
        assert!(!staircase_position(&elem).in_f_double_prime(1));
    }

    #[test]
    fn quotient_classes() {
        let t = tower(3);
        let u = MccWindow::from_words(t.clone(), uv(), 2, &["u"]).unwrap();
        let q = quotient_class(&u, 0).unwrap();
        assert_eq!(q.domain.labels(), &["(u)".to_string(), "(v)".to_string()]);
        assert!(q.get("(u)").unwrap() && !q.get("(v)").unwrap());

        let elem = series::odd_positions(t.clone()).level(3).unwrap();
        let q = quotient_class(&elem, 1).unwrap();
        let support: Vec<&str> = q.bits.ones_iter().map(|i| q.domain.label(i)).collect();
        assert_eq!(support, vec!["(x,y)"]);
        assert!(matches!(
            quotient_class(&elem, 0),
            Err(MccError::BelowInvarianceLevel { .. })
        ));
    }

    #[test]
    fn sector_example() {
        let t = tower(1);
        let w = MccWindow::from_words(t, uv(), 1, &["uv", "uu"]).unwrap();
        let part = [0, 1];
        let all = sector_project(&w, &part, |_| true).unwrap();
        assert_eq!(all, w);
        let none = sector_project(&w, &part, |_| false).unwrap();
        assert!(none.is_zero());
        let constant_zero = sector_project(&w, &part, |a| a.iter().all(|&p| p == 0)).unwrap();
        assert_eq!(constant_zero.support_words(), vec!["uu"]);
        let uu = MccWindow::from_words(w.tower().clone(), uv(), 1, &["u"]).unwrap();
        let err = sector_project(&uu, &part, |a| a[0] == 0).unwrap_err();
        assert!(matches!(err, MccError::StabilityViolation { .. }));
    }

    #[test]
    fn probes_of_the_three_series() {
        let t = tower(3);
        let div = cc_probe(&series::divergent(t.clone()), 3).unwrap();
        assert_eq!(div.levels, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(div.verdict, Verdict::DivergentThroughProbeDepth { depth: 3 });
        let sym = cc_probe(&series::symmetrized(t.clone()), 3).unwrap();
        assert!(sym.levels.iter().all(|&(_, h)| h == 0));
        assert_eq!(sym.verdict, Verdict::CcWitnessed { level: 0 });
        let odd = cc_probe(&series::odd_positions(t.clone()), 3).unwrap();
        assert_eq!(odd.levels, vec![(0, 0), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(odd.verdict, Verdict::CcWitnessed { level: 1 });
    }

    #[test]
    fn malformed_lazy_tower_is_reported() {
        let t = tower(2);
        let b = uv();
        // Level m puts a 1 on the all-u tensor only at odd m.
        let lazy = LazyTower::new(t.clone(), b.clone(), move |m| {
            let mut v = BitVec::zeros(1 << (1 << m));
            if m % 2 == 1 {
                v.set(0, true);
            }
            v
        });
        assert_eq!(
            cc_probe(&lazy, 2).unwrap_err(),
            MccError::MalformedTower { level: 1, below: 0 }
        );
    }

    #[test]
    fn window_file_round_trip() {
        let text = "tower: dyadic 2\nbasis: x y\ndepth: 2\nxy 1\nxxxy 1\nyy 0\n";
        let w = MccWindow::parse(text, None).unwrap();
        assert_eq!(w.support_words(), vec!["xxxy", "xyxy"]);
        let again = MccWindow::parse(&w.to_text("dyadic 2"), None).unwrap();
        assert_eq!(again, w);
        let dup = "tower: dyadic 2\nbasis: x y\ndepth: 2\nxy 1\nxyxy 1\n";
        match MccWindow::parse(dup, None) {
            Err(MccError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        let bad = "tower: dyadic 2\nbasis: x y\ndepth: 2\nxyz 1\n";
        assert!(matches!(MccWindow::parse(bad, None), Err(MccError::Parse { line: 4, .. })));
    }
}
