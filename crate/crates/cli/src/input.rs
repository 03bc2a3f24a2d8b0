//! Input resolution: inline text, file path, or fixture name.

use anyhow::{anyhow, bail, Context, Result};

use l2rank_core::{load_fixture, parse_presentation, Parsed};

pub enum InputSpec {
    Inline(String),
    Path(std::path::PathBuf),
    Fixture(String),
}

impl InputSpec {
    /// Combines the positional argument and `--inline`; exactly one must
    /// be present.
    pub fn new(positional: &Option<String>, inline: &Option<String>) -> Result<Self> {
        match (positional, inline) {
            (None, Some(text)) => Ok(InputSpec::Inline(text.clone())),
            (Some(_), Some(_)) => bail!("give either an input argument or --inline, not both"),
            (Some(arg), None) => Self::positional(arg),
            (None, None) => bail!("no input: pass a file, a fixture name, or --inline \"<...>\""),
        }
    }

    /// Resolves a positional argument: literal presentation text when it
    /// starts with `<`, an existing file path, or a fixture name.
    pub fn positional(arg: &str) -> Result<Self> {
        if arg.trim_start().starts_with('<') {
            return Ok(InputSpec::Inline(arg.to_string()));
        }
        let path = std::path::Path::new(arg);
        if path.exists() {
            return Ok(InputSpec::Path(path.to_path_buf()));
        }
        Ok(InputSpec::Fixture(arg.to_string()))
    }

    /// Caveat attached to reports about certain built-in fixtures.
    pub fn fixture_note(&self) -> Option<String> {
        match self {
            InputSpec::Fixture(name) if name.starts_with("hn_") => Some(
                "fixture uses the smallest distinct primes; hyperbolicity of this presentation is not claimed"
                    .to_string(),
            ),
            _ => None,
        }
    }

    pub fn load(&self) -> Result<Parsed> {
        match self {
            InputSpec::Inline(text) => {
                parse_presentation(text).map_err(|e| anyhow!("parse error: {e}"))
            }
            InputSpec::Path(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                parse_presentation(&text)
                    .map_err(|e| anyhow!("parse error in {}: {e}", path.display()))
            }
            InputSpec::Fixture(name) => load_fixture(name).map_err(|e| anyhow!(e)),
        }
    }
}
