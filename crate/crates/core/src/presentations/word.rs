//! Freely reduced words in a free group of fixed rank.

use std::cmp::Ordering;
use std::fmt;

/// One signed generator occurrence inside a word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    /// True when the two letters cancel in a free reduction.
    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A freely reduced word over a fixed alphabet of `rank` generators.
///
/// The empty word is the identity. Two words compare in shortlex order,
/// which keeps iteration over word-keyed maps deterministic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    /// The identity of `F_rank`.
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// The single generator `x_gen`.
    pub fn generator(rank: usize, gen: usize) -> Self {
        assert!(gen < rank, "generator index {gen} out of range for rank {rank}");
        Word {
            rank,
            letters: vec![Letter::new(gen, false)],
        }
    }

    /// Builds a word from a raw letter sequence, freely reducing it.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(rank: usize, letters: I) -> Self {
        let mut reduced: Vec<Letter> = Vec::new();
        for l in letters {
            assert!(l.gen < rank, "generator index {} out of range for rank {rank}", l.gen);
            match reduced.last() {
                Some(&top) if top.cancels(l) => {
                    reduced.pop();
                }
                _ => reduced.push(l),
            }
        }
        Word {
            rank,
            letters: reduced,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Freely reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        assert_eq!(
            self.rank, other.rank,
            "alphabet-size mismatch: {} vs {}",
            self.rank, other.rank
        );
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            match letters.last() {
                Some(&top) if top.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        Word {
            rank: self.rank,
            letters,
        }
    }

    /// Product with a single letter on the right.
    pub fn mul_letter(&self, l: Letter) -> Word {
        assert!(l.gen < self.rank);
        let mut letters = self.letters.clone();
        match letters.last() {
            Some(&top) if top.cancels(l) => {
                letters.pop();
            }
            _ => letters.push(l),
        }
        Word {
            rank: self.rank,
            letters,
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// `self^n` for any integer exponent.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&b)) if self.letters.len() > 1 => !a.cancels(b),
            _ => true,
        }
    }

    /// Removes cancelling first/last letter pairs.
    pub fn cyclically_reduced(&self) -> Word {
        let mut letters = self.letters.clone();
        while letters.len() > 1 && letters.first().unwrap().cancels(*letters.last().unwrap()) {
            letters.pop();
            letters.remove(0);
        }
        Word {
            rank: self.rank,
            letters,
        }
    }

    /// Smallest period decomposition: returns `(u, k)` with `self = u^k`
    /// as a letter sequence and `k` maximal.
    pub fn syntactic_root(&self) -> (Word, usize) {
        let n = self.letters.len();
        if n == 0 {
            return (self.clone(), 1);
        }
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            if (d..n).all(|i| self.letters[i] == self.letters[i % d]) {
                let root = Word {
                    rank: self.rank,
                    letters: self.letters[..d].to_vec(),
                };
                return (root, n / d);
            }
        }
        unreachable!("a word is always a power of itself");
    }

    /// Signed exponent sum of generator `j`.
    pub fn total_degree(&self, j: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == j)
            .map(|l| if l.inverse { -1 } else { 1 })
            .sum()
    }

    /// Renders the word with the given generator names, `1` for the identity.
    pub fn format_with(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            let exp: i64 = if l.inverse { -(run as i64) } else { run as i64 };
            let name = &names[l.gen];
            if exp == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{exp}"));
            }
            i += run;
        }
        parts.join("*")
    }
}

/// Frees a raw letter sequence into a reduced [`Word`].
pub fn free_reduce<I: IntoIterator<Item = Letter>>(rank: usize, letters: I) -> Word {
    Word::from_letters(rank, letters)
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.rank.cmp(&other.rank))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.rank).map(|i| format!("x{}", i + 1)).collect();
        write!(f, "{}", self.format_with(&names))
    }
}

impl std::ops::Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        Word::mul(self, rhs)
    }
}

/// All freely reduced words of length exactly `len`, in shortlex order.
pub fn reduced_words_of_length(rank: usize, len: usize) -> Vec<Word> {
    let alphabet: Vec<Letter> = (0..rank)
        .flat_map(|g| [Letter::new(g, false), Letter::new(g, true)])
        .collect();
    let mut layer = vec![Word::identity(rank)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * (2 * rank).saturating_sub(1));
        for w in &layer {
            for &l in &alphabet {
                if w.letters.last().is_some_and(|&top| top.cancels(l)) {
                    continue;
                }
                let mut letters = w.letters.clone();
                letters.push(l);
                next.push(Word {
                    rank,
                    letters,
                });
            }
        }
        layer = next;
    }
    layer
}
