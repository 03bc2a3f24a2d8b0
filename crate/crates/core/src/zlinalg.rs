//! Exact integer linear algebra: Smith normal form, fraction-free rank,
//! first Betti numbers and perfectness of presentations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::foxcalc::{augment_matrix, fox_jacobian};
use crate::presentations::Presentation;

/// A dense matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        IntegerMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self::from_fn(nrows, ncols, |i, j| rows[i][j].clone().into())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> IntegerMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Matrix product, exact.
    pub fn mul(&self, rhs: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, k| {
            (0..self.cols).map(|j| self.get(i, j) * rhs.get(j, k)).sum()
        })
    }
}

/// Result of a Smith normal form computation.
///
/// `diagonal` has length `min(rows, cols)` and satisfies the divisibility
/// chain `d_i | d_{i+1}`; `torsion` lists the entries greater than one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SnfResult {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Smith normal form over the integers, exact arithmetic throughout.
///
/// Pivots are chosen by smallest nonzero absolute value to keep
/// intermediate entries small.
pub fn smith_normal_form(m: &IntegerMatrix) -> SnfResult {
    let rows = m.rows();
    let cols = m.cols();
    let dim = rows.min(cols);
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..cols).map(|j| m.get(i, j).clone()).collect())
        .collect();

    let find_pivot = |a: &Vec<Vec<BigInt>>, t: usize| -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if a[i][j].abs() < a[bi][bj].abs() {
                            best = Some((i, j));
                        }
                    }
                }
            }
        }
        best
    };

    let mut t = 0;
    while t < dim {
        let Some((pi, pj)) = find_pivot(&a, t) else {
            break;
        };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
        }

        // Clear row and column t; the pivot magnitude strictly decreases
        // whenever a remainder survives, so this terminates.
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    for j in t..cols {
                        let v = &a[t][j] * &q;
                        a[i][j] -= v;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let v = &row[t] * &q;
                        row[j] -= v;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }

        // Enforce divisibility of the remaining block by the pivot.
        let pivot = a[t][t].clone();
        let mut fixed = true;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[i][j] % &pivot).is_zero() {
                    let row = a[i].clone();
                    for (dst, src) in a[t].iter_mut().zip(row.iter()).skip(t) {
                        *dst += src;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            t += 1;
        }
    }

    let mut diagonal: Vec<BigInt> = (0..dim).map(|i| a[i][i].abs()).collect();
    let rank = diagonal.iter().filter(|d| !d.is_zero()).count();
    // Nonzero entries always precede zeros after elimination.
    debug_assert!(diagonal[..rank].iter().all(|d| !d.is_zero()));
    for i in 1..rank {
        let (lo, hi) = diagonal.split_at_mut(i);
        debug_assert!(hi[0].is_multiple_of(&lo[i - 1]), "divisibility chain broken");
    }
    let torsion: Vec<BigInt> = diagonal
        .iter()
        .filter(|d| **d > BigInt::from(1))
        .cloned()
        .collect();
    SnfResult {
        diagonal,
        rank,
        torsion,
    }
}

/// Quotient rounded to nearest, which halves remainders in SNF reduction.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Rank by fraction-free (Bareiss) elimination; independent of SNF.
pub fn rank(m: &IntegerMatrix) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..cols).map(|j| m.get(i, j).clone()).collect())
        .collect();
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for col in 0..cols {
        if r >= rows {
            break;
        }
        let Some(pivot_row) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, pivot_row);
        for i in r + 1..rows {
            for j in col + 1..cols {
                let num = &a[i][j] * &a[r][col] - &a[i][col] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division is exact");
                a[i][j] = q;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        r += 1;
    }
    r
}

/// First Betti data of a finitely presented group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Betti1 {
    /// Free rank of the abelianization.
    pub rank: usize,
    /// Torsion of the abelianization as prime-power elementary divisors.
    pub torsion: Vec<BigInt>,
}

/// First Betti number and abelianization torsion via the augmented Fox
/// Jacobian, which is the abelianized relation matrix.
pub fn betti1(p: &Presentation) -> Betti1 {
    let relation_matrix = augment_matrix(&fox_jacobian(p));
    let snf = smith_normal_form(&relation_matrix);
    let mut torsion: Vec<BigInt> = snf
        .torsion
        .iter()
        .flat_map(prime_power_factors)
        .collect();
    torsion.sort();
    Betti1 {
        rank: p.rank() - snf.rank,
        torsion,
    }
}

/// True when the abelianization is trivial.
pub fn is_perfect(p: &Presentation) -> bool {
    let b = betti1(p);
    b.rank == 0 && b.torsion.is_empty()
}

/// Splits an invariant factor into prime powers by trial division.
/// Any unfactored remainder is kept whole.
fn prime_power_factors(d: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut rest = d.clone();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000u64);
    while &p * &p <= rest && p <= limit {
        if rest.is_multiple_of(&p) {
            let mut power = BigInt::from(1);
            while rest.is_multiple_of(&p) {
                rest /= &p;
                power *= &p;
            }
            out.push(power);
        }
        p += 1;
    }
    if rest > BigInt::from(1) {
        out.push(rest);
    }
    out
}
