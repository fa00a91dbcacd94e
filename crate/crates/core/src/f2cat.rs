//! The category of finite labeled sets and F2 matrices.
//!
//! A morphism `B -> C` is a total 0/1 table on `C x B`, stored bit-packed by
//! row. Composition is ordinary matrix multiplication mod 2, and finite
//! tensor powers `M^{(x) X}` act on tables indexed by functions `X -> B`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bits::BitVec;

/// Default entry cap for [`F2Matrix::tensor_power`].
pub const TENSOR_POWER_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum F2Error {
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("dimension mismatch: {left} vs {right}")]
    LabelMismatch { left: String, right: String },
    #[error("table domain {found} does not match matrix columns {expected}")]
    DomainMismatch { expected: String, found: String },
    #[error("tensor power would have {entries} entries, cap is {cap}")]
    CapExceeded { entries: u128, cap: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A finite set with a fixed order on its elements.
///
/// The order determines row and column indexing everywhere downstream.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LabeledSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabeledSet {
    pub fn new<I, S>(labels: I) -> Result<Self, F2Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(char::is_whitespace) {
                return Err(F2Error::Parse {
                    line: 0,
                    msg: format!("label {l:?} must be nonempty without whitespace"),
                });
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(F2Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    /// `{0, 1, ..., n-1}` labeled by decimal strings.
    pub fn range(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string())).expect("decimal labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize, F2Error> {
        self.position(label)
            .ok_or_else(|| F2Error::UnknownLabel(label.to_string()))
    }

    /// The set of all functions `x -> self`, in lexicographic order with the
    /// first element of `x` most significant. Labels read `(b1,b2,...)`.
    pub fn functions_from(&self, x: &LabeledSet) -> LabeledSet {
        let space = FunctionIndex::new(self.len(), x.len());
        let labels = (0..space.size()).map(|i| {
            let digits = space.digits(i);
            let parts: Vec<&str> = digits.iter().map(|&d| self.label(d)).collect();
            format!("({})", parts.join(","))
        });
        LabeledSet::new(labels).expect("function labels are distinct")
    }
}

impl fmt::Debug for LabeledSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(" "))
    }
}

impl fmt::Display for LabeledSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(" "))
    }
}

/// Mixed-radix indexing of functions `{0..len} -> {0..base}`.
///
/// Position 0 is the most significant digit, so ascending indices are
/// lexicographic in the domain order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FunctionIndex {
    pub base: usize,
    pub len: usize,
}

impl FunctionIndex {
    pub fn new(base: usize, len: usize) -> Self {
        Self { base, len }
    }

    /// `base^len`, with `0^0 = 1`.
    pub fn size(&self) -> usize {
        self.checked_size().expect("function space size overflows usize")
    }

    pub fn checked_size(&self) -> Option<usize> {
        let mut n: usize = 1;
        for _ in 0..self.len {
            n = n.checked_mul(self.base)?;
        }
        Some(n)
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.len];
        for slot in out.iter_mut().rev() {
            *slot = index % self.base;
            index /= self.base;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.len);
        digits.iter().fold(0, |acc, &d| acc * self.base + d)
    }
}

/// An F2-valued table on a labeled set, i.e. an element of `Fun(B, F2)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct F2Vector {
    pub domain: LabeledSet,
    pub bits: BitVec,
}

impl F2Vector {
    pub fn zeros(domain: LabeledSet) -> Self {
        let bits = BitVec::zeros(domain.len());
        Self { domain, bits }
    }

    /// The basis vector `delta_b`.
    pub fn delta(domain: LabeledSet, b: &str) -> Result<Self, F2Error> {
        let i = domain.require(b)?;
        let bits = BitVec::unit(domain.len(), i);
        Ok(Self { domain, bits })
    }

    pub fn get(&self, label: &str) -> Result<bool, F2Error> {
        Ok(self.bits.get(self.domain.require(label)?))
    }

    pub fn add(&self, other: &F2Vector) -> Result<F2Vector, F2Error> {
        if self.domain != other.domain {
            return Err(F2Error::LabelMismatch {
                left: self.domain.to_string(),
                right: other.domain.to_string(),
            });
        }
        let mut bits = self.bits.clone();
        bits.xor_assign(&other.bits);
        Ok(F2Vector {
            domain: self.domain.clone(),
            bits,
        })
    }
}

/// A morphism `cols -> rows` in the category of finite sets and F2 matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: LabeledSet,
    cols: LabeledSet,
    data: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zero(rows: LabeledSet, cols: LabeledSet) -> Self {
        let data = vec![BitVec::zeros(cols.len()); rows.len()];
        Self { rows, cols, data }
    }

    pub fn identity(set: LabeledSet) -> Self {
        let n = set.len();
        let data = (0..n).map(|i| BitVec::unit(n, i)).collect();
        Self {
            rows: set.clone(),
            cols: set,
            data,
        }
    }

    pub fn from_rows(
        rows: LabeledSet,
        cols: LabeledSet,
        entries: &[Vec<u8>],
    ) -> Result<Self, F2Error> {
        if entries.len() != rows.len() {
            return Err(F2Error::RaggedRow {
                row: entries.len(),
                expected: rows.len(),
                found: entries.len(),
            });
        }
        let mut data = Vec::with_capacity(rows.len());
        for (r, row) in entries.iter().enumerate() {
            if row.len() != cols.len() {
                return Err(F2Error::RaggedRow {
                    row: r,
                    expected: cols.len(),
                    found: row.len(),
                });
            }
            data.push(BitVec::from_bools(row.iter().map(|&e| e & 1 == 1)));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from a predicate on `(row index, column index)`.
    pub fn from_fn(
        rows: LabeledSet,
        cols: LabeledSet,
        mut entry: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let data = (0..rows.len())
            .map(|r| BitVec::from_bools((0..cols.len()).map(|c| entry(r, c))))
            .collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> &LabeledSet {
        &self.rows
    }

    pub fn cols(&self) -> &LabeledSet {
        &self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row].get(col)
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row].set(col, value);
    }

    pub fn entry(&self, row: &str, col: &str) -> Result<bool, F2Error> {
        Ok(self.get(self.rows.require(row)?, self.cols.require(col)?))
    }

    pub fn row_bits(&self, row: usize) -> &BitVec {
        &self.data[row]
    }

    /// Column `b` as a table on the row set.
    pub fn column(&self, col: usize) -> F2Vector {
        let bits = BitVec::from_bools((0..self.rows.len()).map(|r| self.get(r, col)));
        F2Vector {
            domain: self.rows.clone(),
            bits,
        }
    }

    pub fn transpose(&self) -> F2Matrix {
        F2Matrix::from_fn(self.cols.clone(), self.rows.clone(), |r, c| self.get(c, r))
    }

    /// `self ∘ m`, i.e. `(NM)(d,b) = Σ_c N(d,c) M(c,b)`.
    pub fn compose(&self, m: &F2Matrix) -> Result<F2Matrix, F2Error> {
        if self.cols != m.rows {
            return Err(F2Error::LabelMismatch {
                left: self.cols.to_string(),
                right: m.rows.to_string(),
            });
        }
        let mut data = vec![BitVec::zeros(m.cols.len()); self.rows.len()];
        for (d, out) in data.iter_mut().enumerate() {
            for c in self.data[d].ones_iter() {
                out.xor_assign(&m.data[c]);
            }
        }
        Ok(F2Matrix {
            rows: self.rows.clone(),
            cols: m.cols.clone(),
            data,
        })
    }

    /// `(Mf)(c) = Σ_b M(c,b) f(b)`.
    pub fn apply(&self, f: &F2Vector) -> Result<F2Vector, F2Error> {
        if f.domain != self.cols {
            return Err(F2Error::DomainMismatch {
                expected: self.cols.to_string(),
                found: f.domain.to_string(),
            });
        }
        let bits = BitVec::from_bools(self.data.iter().map(|row| row.dot(&f.bits)));
        Ok(F2Vector {
            domain: self.rows.clone(),
            bits,
        })
    }

    /// `M^{(x) X}` with entry `(g, f) = Π_x M(g(x), f(x))`.
    ///
    /// Rows and columns are the function sets `C^X` and `B^X` in
    /// lexicographic order. `cap` bounds the number of matrix entries.
    pub fn tensor_power(&self, x: &LabeledSet, cap: usize) -> Result<F2Matrix, F2Error> {
        let rows_ix = FunctionIndex::new(self.rows.len(), x.len());
        let cols_ix = FunctionIndex::new(self.cols.len(), x.len());
        let (nr, nc) = match (rows_ix.checked_size(), cols_ix.checked_size()) {
            (Some(r), Some(c)) => (r, c),
            _ => {
                return Err(F2Error::CapExceeded {
                    entries: u128::MAX,
                    cap,
                })
            }
        };
        let entries = nr as u128 * nc as u128;
        if entries > cap as u128 {
            return Err(F2Error::CapExceeded { entries, cap });
        }
        let rows = self.rows.functions_from(x);
        let cols = self.cols.functions_from(x);
        let col_digits: Vec<Vec<usize>> = (0..nc).map(|j| cols_ix.digits(j)).collect();
        let data = (0..nr)
            .map(|i| {
                let g = rows_ix.digits(i);
                BitVec::from_bools(col_digits.iter().map(|f| {
                    g.iter().zip(f).all(|(&gx, &fx)| self.get(gx, fx))
                }))
            })
            .collect();
        Ok(F2Matrix { rows, cols, data })
    }

    /// Rank over F2 by row reduction.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.data.clone())
    }

    /// Inverse over F2, if the matrix is square and invertible.
    pub fn inverse(&self) -> Option<F2Matrix> {
        let n = self.rows.len();
        if n != self.cols.len() {
            return None;
        }
        // Gauss-Jordan on [M | I], rows stored as 2n-bit vectors.
        let mut aug: Vec<BitVec> = (0..n)
            .map(|r| {
                let mut v = BitVec::zeros(2 * n);
                for c in self.data[r].ones_iter() {
                    v.set(c, true);
                }
                v.set(n + r, true);
                v
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| aug[r].get(col))?;
            aug.swap(col, pivot);
            let pivot_row = aug[col].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r != col && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
        }
        // Inverse maps rows -> cols.
        let data = aug
            .iter()
            .map(|v| BitVec::from_bools((0..n).map(|c| v.get(n + c))))
            .collect();
        Some(F2Matrix {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            data,
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.rows.len() == self.cols.len() && self.rank() == self.rows.len()
    }

    /// Parse the text format:
    ///
    /// ```text
    /// rows: c1 c2
    /// cols: b1 b2 b3
    /// 1 0 1
    /// 0 1 1
    /// ```
    ///
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<F2Matrix, F2Error> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, strip_comment(l).trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, rows_line) = lines.next().ok_or(F2Error::Parse {
            line: 1,
            msg: "missing `rows:` line".into(),
        })?;
        let rows = parse_header(ln, rows_line, "rows:")?;
        let (ln, cols_line) = lines.next().ok_or(F2Error::Parse {
            line: ln + 1,
            msg: "missing `cols:` line".into(),
        })?;
        let cols = parse_header(ln, cols_line, "cols:")?;
        let mut entries = Vec::new();
        for (ln, line) in lines {
            let row: Result<Vec<u8>, F2Error> = line
                .split_whitespace()
                .map(|t| match t {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(F2Error::Parse {
                        line: ln,
                        msg: format!("entry {other:?} is not 0 or 1"),
                    }),
                })
                .collect();
            let row = row?;
            if row.len() != cols.len() {
                return Err(F2Error::Parse {
                    line: ln,
                    msg: format!("expected {} entries, found {}", cols.len(), row.len()),
                });
            }
            entries.push(row);
        }
        if entries.len() != rows.len() {
            return Err(F2Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {} rows, found {}", rows.len(), entries.len()),
            });
        }
        F2Matrix::from_rows(rows, cols, &entries)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("rows: {}\n", self.rows.labels().join(" ")));
        out.push_str(&format!("cols: {}\n", self.cols.labels().join(" ")));
        for row in &self.data {
            let cells: Vec<&str> = (0..self.cols.len())
                .map(|c| if row.get(c) { "1" } else { "0" })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_header(line_no: usize, line: &str, key: &str) -> Result<LabeledSet, F2Error> {
    let rest = line.strip_prefix(key).ok_or_else(|| F2Error::Parse {
        line: line_no,
        msg: format!("expected `{key}`"),
    })?;
    LabeledSet::new(rest.split_whitespace()).map_err(|e| F2Error::Parse {
        line: line_no,
        msg: e.to_string(),
    })
}

/// Rank of a list of row vectors over F2.
pub fn rank_of_rows(mut rows: Vec<BitVec>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, BitVec::len);
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
    }
    rank
}
