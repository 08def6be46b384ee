use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use bfvlab::bfv::{BfvParams, ParamSet, DEFAULT_SIGMA};

/// `--params` value: a named set or `d=..,q=..,t=..[,sigma=..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamChoice {
    pub name: Option<String>,
    pub params: BfvParams,
}

impl ParamChoice {
    pub fn named(set: ParamSet) -> Self {
        Self {
            name: Some(set.name().to_string()),
            params: set.params(),
        }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }
}

impl FromStr for ParamChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(set) = s.parse::<ParamSet>() {
            return Ok(Self::named(set));
        }
        if !s.contains('=') {
            let names: Vec<_> = ParamSet::ALL.iter().map(|p| p.name()).collect();
            bail!("unknown parameter set {s:?}; expected one of {names:?} or d=..,q=..,t=..");
        }
        let (mut d, mut q, mut t, mut sigma) = (None, None, None, DEFAULT_SIGMA);
        for part in s.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| anyhow!("expected key=value, got {part:?}"))?;
            let value = value.trim();
            match key.trim() {
                "d" => d = Some(value.parse().with_context(|| format!("bad d {value:?}"))?),
                "q" => q = Some(parse_u64(value)?),
                "t" => t = Some(parse_u64(value)?),
                "sigma" => {
                    sigma = value
                        .parse()
                        .with_context(|| format!("bad sigma {value:?}"))?
                }
                other => bail!("unknown parameter {other:?}"),
            }
        }
        let params = BfvParams::new(
            d.ok_or_else(|| anyhow!("missing d"))?,
            q.ok_or_else(|| anyhow!("missing q"))?,
            t.ok_or_else(|| anyhow!("missing t"))?,
            sigma,
        )?;
        Ok(Self { name: None, params })
    }
}

/// Decimal, or a power of two written `2^k`.
fn parse_u64(s: &str) -> Result<u64> {
    if let Some(exp) = s.strip_prefix("2^") {
        let exp: u32 = exp
            .parse()
            .with_context(|| format!("bad exponent in {s:?}"))?;
        return 1u64
            .checked_shl(exp)
            .filter(|_| exp < 64)
            .ok_or_else(|| anyhow!("{s} does not fit in 64 bits"));
    }
    s.parse().with_context(|| format!("bad integer {s:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_sets() {
        let p: ParamChoice = "psi-83".parse().unwrap();
        assert_eq!(p.name(), Some("psi-83"));
        assert_eq!(p.params.plain_modulus(), 83);
        assert!("psi-84".parse::<ParamChoice>().is_err());
    }

    #[test]
    fn explicit_triples() {
        let p: ParamChoice = "d=16,q=2^54,t=83".parse().unwrap();
        assert_eq!(p.name(), None);
        assert_eq!(
            (
                p.params.degree(),
                p.params.modulus(),
                p.params.plain_modulus()
            ),
            (16, 1 << 54, 83)
        );
        assert_eq!(p.params.sigma(), DEFAULT_SIGMA);
        let p: ParamChoice = "d=8, q=97, t=2, sigma=1.5".parse().unwrap();
        assert_eq!(p.params.sigma(), 1.5);
        assert!("d=16,q=2^64,t=2".parse::<ParamChoice>().is_err());
        assert!("d=16,q=97".parse::<ParamChoice>().is_err());
        assert!("d=15,q=97,t=2".parse::<ParamChoice>().is_err());
        assert!("d=16,q=97,t=2,x=1".parse::<ParamChoice>().is_err());
    }
}
