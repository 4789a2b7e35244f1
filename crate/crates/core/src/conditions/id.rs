use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionSet {
    Buyer,
    BrokerWeb,
    Seller,
}

impl ConditionSet {
    pub const ALL: [ConditionSet; 3] = [ConditionSet::Buyer, ConditionSet::BrokerWeb, ConditionSet::Seller];

    pub fn prefix(self) -> char {
        match self {
            ConditionSet::Buyer => 'B',
            ConditionSet::BrokerWeb => 'W',
            ConditionSet::Seller => 'S',
        }
    }

    pub fn len(self) -> u8 {
        match self {
            ConditionSet::Buyer => 19,
            ConditionSet::BrokerWeb => 7,
            ConditionSet::Seller => 18,
        }
    }

    /// Conditions of this set in printed order.
    pub fn ids(self) -> impl Iterator<Item = ConditionId> {
        (1..=self.len()).map(move |index| ConditionId { set: self, index })
    }

    pub fn name(self) -> &'static str {
        match self {
            ConditionSet::Buyer => "buyer",
            ConditionSet::BrokerWeb => "broker_web",
            ConditionSet::Seller => "seller",
        }
    }
}

impl FromStr for ConditionSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "buyer" => Ok(ConditionSet::Buyer),
            "broker" | "broker_web" | "web" => Ok(ConditionSet::BrokerWeb),
            "seller" => Ok(ConditionSet::Seller),
            _ => Err(format!("unknown condition set `{s}` (expected buyer, broker or seller)")),
        }
    }
}

impl fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A condition by set and printed index, rendered `B5`, `W3`, `S14`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConditionId {
    pub set: ConditionSet,
    pub index: u8,
}

impl ConditionId {
    pub fn new(set: ConditionSet, index: u8) -> Option<Self> {
        (1..=set.len()).contains(&index).then_some(ConditionId { set, index })
    }

    /// All 44 conditions: buyer, broker web, seller.
    pub fn all() -> impl Iterator<Item = ConditionId> {
        ConditionSet::ALL.into_iter().flat_map(ConditionSet::ids)
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.set.prefix(), self.index)
    }
}

impl FromStr for ConditionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("unknown condition `{s}`");
        let mut chars = s.chars();
        let set = match chars.next() {
            Some('B') => ConditionSet::Buyer,
            Some('W') => ConditionSet::BrokerWeb,
            Some('S') => ConditionSet::Seller,
            _ => return Err(err()),
        };
        let index: u8 = chars.as_str().parse().map_err(|_| err())?;
        ConditionId::new(set, index).ok_or_else(err)
    }
}

impl Serialize for ConditionId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConditionId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}
