//! Free-group words, finite presentations, and the integral group ring.

pub mod parse;
pub mod ring;
pub mod word;

pub use parse::{parse_presentation, parse_word, Parsed, ParseError};
pub use ring::{GroupRingElement, GroupRingMatrix};
pub use word::{free_reduce, reduced_words_of_length, Letter, Word};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PresentationError {
    #[error("presentation has no generators")]
    NoGenerators,
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidGeneratorName(String),
    #[error("relator {index} is empty after free reduction")]
    EmptyRelator { index: usize },
    #[error("relator {index} uses an alphabet of rank {found}, presentation has rank {expected}")]
    RankMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("torsion exponent must be at least 1, got {0}")]
    InvalidExponent(i64),
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite presentation `< generators | relators >`.
///
/// Relators are stored freely and cyclically reduced and are never empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new<S: Into<String>>(
        names: Vec<S>,
        relators: Vec<Word>,
    ) -> Result<Self, PresentationError> {
        let generator_names: Vec<String> = names.into_iter().map(Into::into).collect();
        if generator_names.is_empty() {
            return Err(PresentationError::NoGenerators);
        }
        for (i, n) in generator_names.iter().enumerate() {
            if !valid_identifier(n) {
                return Err(PresentationError::InvalidGeneratorName(n.clone()));
            }
            if generator_names[..i].contains(n) {
                return Err(PresentationError::DuplicateGenerator(n.clone()));
            }
        }
        let rank = generator_names.len();
        let mut reduced = Vec::with_capacity(relators.len());
        for (index, r) in relators.into_iter().enumerate() {
            if r.rank() != rank {
                return Err(PresentationError::RankMismatch {
                    index,
                    found: r.rank(),
                    expected: rank,
                });
            }
            let r = r.cyclically_reduced();
            if r.is_identity() {
                return Err(PresentationError::EmptyRelator { index });
            }
            reduced.push(r);
        }
        Ok(Presentation {
            generator_names,
            relators: reduced,
        })
    }

    /// The free group of rank `n` on generators `x1..xn`.
    pub fn free(n: usize) -> Self {
        assert!(n >= 1);
        Presentation {
            generator_names: (1..=n).map(|i| format!("x{i}")).collect(),
            relators: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.generator_names.len()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator(&self, j: usize) -> Word {
        Word::generator(self.rank(), j)
    }

    /// Index of a generator by name.
    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generator_names.iter().position(|n| n == name)
    }

    /// Canonical textual form in the input grammar.
    pub fn to_text(&self) -> String {
        let gens = self.generator_names.join(", ");
        let rels = self
            .relators
            .iter()
            .map(|r| r.format_with(&self.generator_names))
            .collect::<Vec<_>>()
            .join(", ");
        format!("< {gens} | {rels} >")
    }
}

/// A presentation whose relators are explicit proper powers `R_i^{n_i}`.
///
/// Roots are cyclically reduced and never themselves proper powers as
/// letter sequences; syntactic powers are folded into the exponent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TorsionPresentation {
    base: Presentation,
    relators: Vec<(Word, u64)>,
}

impl TorsionPresentation {
    pub fn new<S: Into<String>>(
        names: Vec<S>,
        relators: Vec<(Word, i64)>,
    ) -> Result<Self, PresentationError> {
        let mut normalized = Vec::with_capacity(relators.len());
        let mut full = Vec::with_capacity(relators.len());
        for (index, (root, exp)) in relators.into_iter().enumerate() {
            if exp < 1 {
                return Err(PresentationError::InvalidExponent(exp));
            }
            let root = root.cyclically_reduced();
            if root.is_identity() {
                return Err(PresentationError::EmptyRelator { index });
            }
            let (root, k) = root.syntactic_root();
            let exponent = exp as u64 * k as u64;
            full.push(root.pow(exponent as i64));
            normalized.push((root, exponent));
        }
        let base = Presentation::new(names, full)?;
        Ok(TorsionPresentation {
            base,
            relators: normalized,
        })
    }

    pub fn base(&self) -> &Presentation {
        &self.base
    }

    /// The `(root, exponent)` pairs `R_i^{n_i}`.
    pub fn torsion_relators(&self) -> &[(Word, u64)] {
        &self.relators
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_generators() {
        let err = Presentation::new(vec!["a", "a"], vec![]).unwrap_err();
        assert_eq!(err, PresentationError::DuplicateGenerator("a".into()));
    }

    #[test]
    fn cyclically_reduces_relators() {
        // a b a^-1 is stored as b
        let r = Word::from_letters(
            2,
            [
                Letter::new(0, false),
                Letter::new(1, false),
                Letter::new(0, true),
            ],
        );
        let p = Presentation::new(vec!["a", "b"], vec![r]).unwrap();
        assert_eq!(p.relators()[0], Word::generator(2, 1));
    }

    #[test]
    fn rejects_empty_relator() {
        let r = Word::from_letters(1, [Letter::new(0, false), Letter::new(0, true)]);
        let err = Presentation::new(vec!["x"], vec![r]).unwrap_err();
        assert_eq!(err, PresentationError::EmptyRelator { index: 0 });
    }

    #[test]
    fn torsion_folds_syntactic_powers() {
        // (a a)^3 normalizes to root a with exponent 6
        let aa = Word::generator(1, 0).pow(2);
        let tp = TorsionPresentation::new(vec!["a"], vec![(aa, 3)]).unwrap();
        assert_eq!(tp.torsion_relators()[0], (Word::generator(1, 0), 6));
        assert_eq!(tp.base().relators()[0].len(), 6);
    }
}
