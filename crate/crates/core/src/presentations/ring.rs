//! The integral group ring `Z[F_n]` and rectangular matrices over it.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::word::Word;

/// A finite integer combination of freely reduced words.
///
/// No zero coefficients are stored; the term map is ordered shortlex so
/// iteration and display are deterministic.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupRingElement {
    rank: usize,
    terms: BTreeMap<Word, BigInt>,
}

impl GroupRingElement {
    pub fn zero(rank: usize) -> Self {
        GroupRingElement {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::from_word(Word::identity(rank))
    }

    pub fn from_word(w: Word) -> Self {
        Self::monomial(BigInt::one(), w)
    }

    pub fn monomial(coefficient: BigInt, w: Word) -> Self {
        let rank = w.rank();
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(w, coefficient);
        }
        GroupRingElement { rank, terms }
    }

    pub fn scalar(rank: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(c.into(), Word::identity(rank))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, w: &Word) -> BigInt {
        self.terms.get(w).cloned().unwrap_or_else(BigInt::zero)
    }

    fn insert(&mut self, w: Word, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// The formal adjoint: each term `c·g` becomes `c·g^{-1}`.
    pub fn adjoint(&self) -> Self {
        let mut out = GroupRingElement::zero(self.rank);
        for (w, c) in &self.terms {
            out.insert(w.inverse(), c.clone());
        }
        out
    }

    /// The augmentation `ε`: the sum of all coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Applies `f` to every word, collecting like terms.
    pub fn map_words(&self, mut f: impl FnMut(&Word) -> Word) -> Self {
        let mut out = GroupRingElement::zero(self.rank);
        for (w, c) in &self.terms {
            out.insert(f(w), c.clone());
        }
        out
    }

    /// Renders the element with the given generator names; zero prints `0`.
    pub fn format_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let sign_neg = c.is_negative();
            if i == 0 {
                if sign_neg {
                    out.push('-');
                }
            } else if sign_neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if w.is_identity() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&w.format_with(names));
            } else {
                out.push_str(&format!("{}*{}", mag, w.format_with(names)));
            }
        }
        out
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: &GroupRingElement) -> GroupRingElement {
        assert_eq!(self.rank, rhs.rank, "alphabet-size mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: &GroupRingElement) -> GroupRingElement {
        assert_eq!(self.rank, rhs.rank, "alphabet-size mismatch");
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert(w.clone(), -c.clone());
        }
        out
    }
}

impl AddAssign<&GroupRingElement> for GroupRingElement {
    fn add_assign(&mut self, rhs: &GroupRingElement) {
        assert_eq!(self.rank, rhs.rank, "alphabet-size mismatch");
        for (w, c) in &rhs.terms {
            self.insert(w.clone(), c.clone());
        }
    }
}

impl SubAssign<&GroupRingElement> for GroupRingElement {
    fn sub_assign(&mut self, rhs: &GroupRingElement) {
        assert_eq!(self.rank, rhs.rank, "alphabet-size mismatch");
        for (w, c) in &rhs.terms {
            self.insert(w.clone(), -c.clone());
        }
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        GroupRingElement {
            rank: self.rank,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

/// Bilinear convolution product.
impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: &GroupRingElement) -> GroupRingElement {
        assert_eq!(self.rank, rhs.rank, "alphabet-size mismatch");
        let mut out = GroupRingElement::zero(self.rank);
        for (u, a) in &self.terms {
            for (v, b) in &rhs.terms {
                out.insert(u.mul(v), a * b);
            }
        }
        out
    }
}

/// Free-function form of the convolution product.
pub fn ring_multiply(x: &GroupRingElement, y: &GroupRingElement) -> GroupRingElement {
    x * y
}

/// A dense rectangular matrix over `Z[F_n]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupRingMatrix {
    rank: usize,
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement>,
}

impl GroupRingMatrix {
    pub fn zero(rank: usize, rows: usize, cols: usize) -> Self {
        GroupRingMatrix {
            rank,
            rows,
            cols,
            entries: vec![GroupRingElement::zero(rank); rows * cols],
        }
    }

    pub fn identity(rank: usize, n: usize) -> Self {
        let mut m = Self::zero(rank, n, n);
        for i in 0..n {
            m.set(i, i, GroupRingElement::one(rank));
        }
        m
    }

    pub fn from_rows(rank: usize, rows: Vec<Vec<GroupRingElement>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            for e in row {
                assert_eq!(e.rank(), rank, "alphabet-size mismatch");
                entries.push(e);
            }
        }
        GroupRingMatrix {
            rank,
            rows: nrows,
            cols: ncols,
            entries,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: GroupRingElement) {
        assert_eq!(e.rank(), self.rank, "alphabet-size mismatch");
        self.entries[i * self.cols + j] = e;
    }

    /// The formal adjoint: transpose with entrywise `adjoint`.
    pub fn adjoint_transpose(&self) -> GroupRingMatrix {
        let mut out = GroupRingMatrix::zero(self.rank, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).adjoint());
            }
        }
        out
    }

    /// True when the matrix equals its formal adjoint.
    pub fn is_self_adjoint(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint_transpose()
    }

    /// Appends the rows of `other` below `self`.
    pub fn stack(&self, other: &GroupRingMatrix) -> GroupRingMatrix {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        assert_eq!(self.rank, other.rank, "alphabet-size mismatch");
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        GroupRingMatrix {
            rank: self.rank,
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl Add for &GroupRingMatrix {
    type Output = GroupRingMatrix;
    fn add(self, rhs: &GroupRingMatrix) -> GroupRingMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch");
        assert_eq!(self.rank, rhs.rank, "alphabet-size mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        GroupRingMatrix {
            rank: self.rank,
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

impl Mul for &GroupRingMatrix {
    type Output = GroupRingMatrix;
    fn mul(self, rhs: &GroupRingMatrix) -> GroupRingMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        assert_eq!(self.rank, rhs.rank, "alphabet-size mismatch");
        let mut out = GroupRingMatrix::zero(self.rank, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..rhs.cols {
                let mut acc = GroupRingElement::zero(self.rank);
                for j in 0..self.cols {
                    acc += &(self.get(i, j) * rhs.get(j, k));
                }
                out.set(i, k, acc);
            }
        }
        out
    }
}
