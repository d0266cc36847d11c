//! Ground-state electron configurations of the neutral atoms.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::OnceLock;

/// Heaviest element in the embedded table.
pub const MAX_Z: u32 = 103;

const TABLE: &str = include_str!("../../data/configurations.txt");
const SPECTROSCOPIC: [char; 4] = ['s', 'p', 'd', 'f'];

/// One occupied subshell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shell {
    pub n: u32,
    pub l: u32,
    pub occupation: f64,
}

impl Shell {
    pub fn capacity(&self) -> f64 {
        (2 * (2 * self.l + 1)) as f64
    }

    /// Hund's-rule split into (spin-up, spin-down) occupations.
    pub fn spin_occupations(&self) -> (f64, f64) {
        let up = self.occupation.min((2 * self.l + 1) as f64);
        (up, self.occupation - up)
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.n, SPECTROSCOPIC.get(self.l as usize).copied().unwrap_or('?'))
    }
}

impl fmt::Display for Shell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.label(), self.occupation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub z: u32,
    pub symbol: String,
    pub shells: Vec<Shell>,
    pub source: String,
}

impl Configuration {
    /// Checks neutrality, occupation limits and `n > l`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfiguration(format!("Z = {}: {msg}", self.z)));
        if self.z == 0 {
            return bad("nuclear charge must be >= 1".into());
        }
        let mut total = 0.0;
        for (i, s) in self.shells.iter().enumerate() {
            if s.l >= s.n {
                return bad(format!("shell {} needs n > l", s.label()));
            }
            if s.l as usize >= SPECTROSCOPIC.len() {
                return bad(format!("l = {} is not supported", s.l));
            }
            if !(s.occupation > 0.0 && s.occupation <= s.capacity()) {
                return bad(format!("occupation {} of {} outside (0, {}]", s.occupation, s.label(), s.capacity()));
            }
            if self.shells[..i].iter().any(|o| o.n == s.n && o.l == s.l) {
                return bad(format!("shell {} listed twice", s.label()));
            }
            total += s.occupation;
        }
        if (total - self.z as f64).abs() > 1e-12 {
            return bad(format!("occupations sum to {total}, not Z"));
        }
        Ok(())
    }

    pub fn electrons(&self) -> f64 {
        self.shells.iter().map(|s| s.occupation).sum()
    }

    pub fn max_l(&self) -> u32 {
        self.shells.iter().map(|s| s.l).max().unwrap_or(0)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol)?;
        for s in &self.shells {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

fn parse_shell(token: &str, line: usize) -> Result<Shell> {
    let err = |m: &str| Error::Parse {
        line,
        message: format!("{m}: {token:?}"),
    };
    let pos = token.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(|| err("missing orbital letter"))?;
    let n: u32 = token[..pos].parse().map_err(|_| err("bad principal number"))?;
    let letter = token[pos..].chars().next().unwrap();
    let l = SPECTROSCOPIC.iter().position(|&c| c == letter).ok_or_else(|| err("unknown orbital letter"))? as u32;
    let occupation: f64 = token[pos + 1..].parse().map_err(|_| err("bad occupation"))?;
    Ok(Shell { n, l, occupation })
}

/// Parses a table with lines `Z symbol 1s2 2s2 ...`; `#` starts a comment.
pub fn parse_configuration_table(text: &str, source: &str) -> Result<Vec<Configuration>> {
    let mut out: Vec<Configuration> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let z: u32 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::Parse {
                line,
                message: "expected nuclear charge".into(),
            })?;
        let symbol = fields.next().ok_or_else(|| Error::Parse {
            line,
            message: "expected element symbol".into(),
        })?;
        let shells = fields.map(|t| parse_shell(t, line)).collect::<Result<Vec<_>>>()?;
        let config = Configuration {
            z,
            symbol: symbol.to_string(),
            shells,
            source: source.to_string(),
        };
        config.validate().map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if out.iter().any(|c| c.z == z) {
            return Err(Error::Parse {
                line,
                message: format!("Z = {z} listed twice"),
            });
        }
        out.push(config);
    }
    Ok(out)
}

fn table() -> &'static [Configuration] {
    static PARSED: OnceLock<Vec<Configuration>> = OnceLock::new();
    PARSED.get_or_init(|| {
        let mut t = parse_configuration_table(TABLE, "experimental ground configurations")
            .expect("embedded configuration table is valid");
        t.sort_by_key(|c| c.z);
        t
    })
}

/// Experimental ground configuration of the neutral atom `z`.
pub fn ground_configuration(z: u32) -> Result<Configuration> {
    if !(1..=MAX_Z).contains(&z) {
        return Err(Error::InvalidConfiguration(format!("Z = {z} outside 1..={MAX_Z}")));
    }
    Ok(table()[z as usize - 1].clone())
}

pub fn element_symbol(z: u32) -> Option<&'static str> {
    table().get((z as usize).checked_sub(1)?).map(|c| c.symbol.as_str())
}
