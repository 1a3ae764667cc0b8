use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chaos::ChaoticMapKind;
use crate::normalize::Scheme;
use crate::{Error, Result};

/// Textual description of a source: `mt`, `chaos:<map>:<scheme>` or
/// `matched:<map>:<scheme>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceSpec {
    Mt,
    Chaos(ChaoticMapKind, Scheme),
    Matched(ChaoticMapKind, Scheme),
}

impl SourceSpec {
    pub fn scheme(&self) -> Option<Scheme> {
        match self {
            SourceSpec::Mt => None,
            SourceSpec::Chaos(_, s) | SourceSpec::Matched(_, s) => Some(*s),
        }
    }

    pub fn map(&self) -> Option<ChaoticMapKind> {
        match self {
            SourceSpec::Mt => None,
            SourceSpec::Chaos(m, _) | SourceSpec::Matched(m, _) => Some(*m),
        }
    }

    /// All six `chaos:<map>:<scheme>` combinations.
    pub fn all_chaotic() -> Vec<SourceSpec> {
        [ChaoticMapKind::Gingerbread, ChaoticMapKind::tinkerbell()]
            .into_iter()
            .flat_map(|m| Scheme::ALL.into_iter().map(move |s| SourceSpec::Chaos(m, s)))
            .collect()
    }
}

impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::SourceSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["mt"] => Ok(SourceSpec::Mt),
            [family @ ("chaos" | "matched"), map, scheme] => {
                let map = map.parse::<ChaoticMapKind>().map_err(|_| fail("map must be gingerbread or tinkerbell"))?;
                let scheme: Scheme = scheme
                    .parse()
                    .map_err(|_| fail("scheme must be modulo, bounds or atan2"))?;
                Ok(if *family == "chaos" {
                    SourceSpec::Chaos(map, scheme)
                } else {
                    SourceSpec::Matched(map, scheme)
                })
            }
            _ => Err(fail("expected mt, chaos:<map>:<scheme> or matched:<map>:<scheme>")),
        }
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Mt => f.write_str("mt"),
            SourceSpec::Chaos(m, s) => write!(f, "chaos:{m}:{s}"),
            SourceSpec::Matched(m, s) => write!(f, "matched:{m}:{s}"),
        }
    }
}

impl Serialize for SourceSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SourceSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
