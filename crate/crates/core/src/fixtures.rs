//! The built-in presentation corpus.
//!
//! Names: `pslz`, `kt`, `free_N`, `g0_N_P` (free product of N copies of
//! Z/P), and `hn_N` (the two-parameter-family presentations on the first
//! N primes). The environment variable `L2RANK_FIXTURES` overrides the
//! corpus with a directory of `.grp` files looked up by name.
//!
//! The `hn_N` fixtures use the smallest distinct primes: the triviality
//! certificate for killing `x1` only needs distinctness of the prime
//! orders, so reports about these fixtures never claim hyperbolicity.

use std::path::PathBuf;

use thiserror::Error;

use crate::presentations::{parse_presentation, Parsed, ParseError};

pub const FIXTURES_ENV: &str = "L2RANK_FIXTURES";

/// The first `n` primes.
fn first_primes(n: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(n);
    let mut c = 2u64;
    while primes.len() < n {
        if primes.iter().all(|p| !c.is_multiple_of(*p)) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("fixture file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("fixture `{name}` failed to parse: {source}")]
    Parse { name: String, source: ParseError },
}

/// Text of a built-in fixture, if the name is in the corpus.
pub fn fixture_text(name: &str) -> Option<String> {
    match name {
        "pslz" => Some("< a, b | a^2, b^3 >".to_string()),
        "kt" => Some("< y, z | z*y*z*y^-2, y*z*y*z^-6 >".to_string()),
        _ => {
            if let Some(n) = name.strip_prefix("free_").and_then(|s| s.parse::<usize>().ok()) {
                if n == 0 {
                    return None;
                }
                let gens: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
                return Some(format!("< {} | >", gens.join(", ")));
            }
            if let Some(rest) = name.strip_prefix("g0_") {
                let mut it = rest.split('_');
                let n = it.next()?.parse::<usize>().ok()?;
                let p = it.next()?.parse::<u64>().ok()?;
                if it.next().is_some() || n == 0 || p == 0 {
                    return None;
                }
                let gens: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
                let rels: Vec<String> = (1..=n).map(|i| format!("x{i}^{p}")).collect();
                return Some(format!("< {} | {} >", gens.join(", "), rels.join(", ")));
            }
            if let Some(n) = name.strip_prefix("hn_").and_then(|s| s.parse::<usize>().ok()) {
                if n == 0 {
                    return None;
                }
                let primes = first_primes(n);
                let gens: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
                let mut rels: Vec<String> =
                    (1..=n).map(|i| format!("x{i}^{}", primes[0])).collect();
                for j in 2..=n {
                    rels.push(format!("(x1*x{j})^{}", primes[j - 1]));
                }
                return Some(format!("< {} | {} >", gens.join(", "), rels.join(", ")));
            }
            None
        }
    }
}

/// Loads a fixture by name, honoring the `L2RANK_FIXTURES` override.
pub fn load_fixture(name: &str) -> Result<Parsed, FixtureError> {
    if let Ok(dir) = std::env::var(FIXTURES_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.grp"));
        if path.exists() {
            let text = std::fs::read_to_string(&path)
                .map_err(|source| FixtureError::Io { path, source })?;
            return parse_presentation(&text).map_err(|source| FixtureError::Parse {
                name: name.to_string(),
                source,
            });
        }
    }
    let text = fixture_text(name).ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
    parse_presentation(&text).map_err(|source| FixtureError::Parse {
        name: name.to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pslz_fixture() {
        let p = load_fixture("pslz").unwrap();
        let tp = p.torsion().expect("torsion form");
        assert_eq!(tp.rank(), 2);
        assert_eq!(tp.base().relators()[0].len(), 2);
        assert_eq!(tp.base().relators()[1].len(), 3);
    }

    #[test]
    fn kt_fixture() {
        let p = load_fixture("kt").unwrap();
        let p = p.presentation();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.relators()[0].len(), 5);
        assert_eq!(p.relators()[1].len(), 9);
    }

    #[test]
    fn free_fixture() {
        let p = load_fixture("free_2").unwrap();
        assert!(p.presentation().relators().is_empty());
        assert_eq!(p.presentation().rank(), 2);
    }

    #[test]
    fn hn_fixture_uses_first_primes() {
        let p = load_fixture("hn_3").unwrap();
        let tp = p.torsion().expect("torsion form");
        let exps: Vec<u64> = tp.torsion_relators().iter().map(|r| r.1).collect();
        assert_eq!(exps, vec![2, 2, 2, 3, 5]);
    }

    #[test]
    fn g0_fixture() {
        let p = load_fixture("g0_3_5").unwrap();
        let tp = p.torsion().expect("torsion form");
        let exps: Vec<u64> = tp.torsion_relators().iter().map(|r| r.1).collect();
        assert_eq!(exps, vec![5, 5, 5]);
    }

    #[test]
    fn unknown_fixture_errors() {
        assert!(load_fixture("nope").is_err());
        assert!(load_fixture("free_0").is_err());
    }
}
