//! Run settings shared by the catalog and the command line.

use crate::error::{Error, Result};
use crate::series::{parse_rat, Rat};

pub const DEFAULT_DIGITS: u32 = 60;
pub const DEFAULT_ORDER: i64 = 150;
pub const MIN_RUN_DIGITS: u32 = 20;
pub const MIN_ORDER: i64 = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub digits: u32,
    /// Series are compared below `q^order`.
    pub order: i64,
    pub rs: Vec<Rat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            digits: DEFAULT_DIGITS,
            order: DEFAULT_ORDER,
            rs: vec![Rat::from_integer(1), Rat::from_integer(2), Rat::from_integer(3)],
        }
    }
}

impl RunConfig {
    pub fn new(digits: u32, order: i64, rs: Vec<Rat>) -> Result<Self> {
        let cfg = RunConfig { digits, order, rs };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.digits < MIN_RUN_DIGITS {
            return Err(Error::domain(format!(
                "digits must be at least {MIN_RUN_DIGITS}, got {}",
                self.digits
            )));
        }
        if self.order < MIN_ORDER {
            return Err(Error::domain(format!("order must be at least {MIN_ORDER}, got {}", self.order)));
        }
        if self.rs.is_empty() {
            return Err(Error::domain("need at least one r value"));
        }
        if let Some(r) = self.rs.iter().find(|r| **r <= Rat::from_integer(0)) {
            return Err(Error::domain(format!("r values must be positive, got {r}")));
        }
        Ok(())
    }

    pub fn order_rat(&self) -> Rat {
        Rat::from_integer(self.order)
    }
}

/// Comma-separated list of `p/q` or decimal values.
pub fn parse_r_list(s: &str) -> Result<Vec<Rat>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let r = parse_rat(t)?;
            if r <= Rat::from_integer(0) {
                return Err(Error::Parse(format!("r must be positive, got `{t}`")));
            }
            Ok(r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!((c.digits, c.order), (60, 150));
        assert_eq!(c.rs, vec![Rat::from_integer(1), Rat::from_integer(2), Rat::from_integer(3)]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn floors() {
        assert!(RunConfig::new(19, 150, vec![Rat::from_integer(1)]).is_err());
        assert!(RunConfig::new(20, 39, vec![Rat::from_integer(1)]).is_err());
        assert!(RunConfig::new(20, 40, vec![Rat::from_integer(1)]).is_ok());
    }

    #[test]
    fn r_lists() {
        assert_eq!(
            parse_r_list("1, 2,1/2,0.25").unwrap(),
            vec![Rat::from_integer(1), Rat::from_integer(2), Rat::new(1, 2), Rat::new(1, 4)]
        );
        assert!(parse_r_list("1,-2").is_err());
        assert!(parse_r_list("1,x").is_err());
    }
}
