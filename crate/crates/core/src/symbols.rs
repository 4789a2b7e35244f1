//! Symbol table: every named quantity a scenario carries, the composite sums
//! the conditions differentiate, and the three listing states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The type group a symbol belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Group {
    Valuation,
    BrokerCosts,
    Information,
    SearchCosts,
    Utility,
    ClosingCosts,
    ListingStates,
    ClosingProbabilities,
    BrokerEffortCapital,
    PartySocialCapital,
}

macro_rules! symbols {
    ($($variant:ident => $name:literal, $group:ident;)*) => {
        /// A base quantity stored in a scenario.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Symbol {
            $($variant,)*
        }

        impl Symbol {
            pub const ALL: &'static [Symbol] = &[$(Symbol::$variant,)*];

            /// ASCII name used in scenario files and reports.
            pub fn name(self) -> &'static str {
                match self {
                    $(Symbol::$variant => $name,)*
                }
            }

            pub fn group(self) -> Group {
                match self {
                    $(Symbol::$variant => Group::$group,)*
                }
            }
        }

        impl FromStr for Symbol {
            type Err = UnknownName;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok(Symbol::$variant),)*
                    // effort is also written `e` in the capital derivatives
                    "e" => Ok(Symbol::UHat),
                    _ => Err(UnknownName(s.to_string())),
                }
            }
        }
    };
}

symbols! {
    P => "P", Valuation;
    Pb => "P_b", Valuation;
    Ps => "P_s", Valuation;
    C => "c", Valuation;
    Bb => "B_b", BrokerCosts;
    Bn => "B_n", BrokerCosts;
    Bop => "B_op", BrokerCosts;
    Bs => "B_s", BrokerCosts;
    Bi => "B_i", BrokerCosts;
    Bit => "B_it", BrokerCosts;
    I => "I", Information;
    Ip => "I_p", Information;
    Ii => "I_i", Information;
    Io => "I_o", Information;
    PsiB => "psi_b", SearchCosts;
    PsiBi => "psi_bi", SearchCosts;
    PsiS => "psi_s", SearchCosts;
    PsiSi => "psi_si", SearchCosts;
    PsiSb => "psi_sb", SearchCosts;
    Uip => "U_ip", Utility;
    Uiw => "U_iw", Utility;
    Ua => "U_a", Utility;
    Usp => "U_sp", Utility;
    Usw => "U_sw", Utility;
    Usa => "U_sa", Utility;
    PiB => "pi_b", ClosingCosts;
    PiI => "pi_i", ClosingCosts;
    PiSb => "pi_sb", ClosingCosts;
    PiS => "pi_s", ClosingCosts;
    Es => "E_s", ListingStates;
    Ep => "E_p", ListingStates;
    Em => "E_m", ListingStates;
    RhoP => "rho_p", ClosingProbabilities;
    RhoI => "rho_i", ClosingProbabilities;
    RhoS => "rho_s", ClosingProbabilities;
    UHat => "u_hat", BrokerEffortCapital;
    UHatS => "u_hat_s", BrokerEffortCapital;
    RcBr => "RC_br", BrokerEffortCapital;
    ScBr => "SC_br", BrokerEffortCapital;
    ScS => "SC_s", PartySocialCapital;
    ScB => "SC_b", PartySocialCapital;
}

impl Symbol {
    pub fn is_probability(self) -> bool {
        matches!(self, Symbol::RhoP | Symbol::RhoI | Symbol::RhoS)
    }

    pub fn is_listing_state(self) -> bool {
        self.group() == Group::ListingStates
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown symbol `{0}`")]
pub struct UnknownName(pub String);

/// Named sums that appear as a single differentiand or differentiator in
/// the condition lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Composite {
    /// U_ip + U_iw
    BuyerUtility,
    /// U_sp + U_sw
    SellerUtility,
    /// I_p + I_o
    PersonalPlusOther,
    /// I_p + I_i + pi_b
    InfoPlusClosing,
    /// pi_sb + I_p + I_i
    ClosingPlusInfo,
    /// psi_sb + pi_sb
    SellerBrokeredCost,
    /// psi_si + pi_s
    SellerDirectCost,
    /// RC_br + SC_br
    BrokerCapital,
    /// B_b + B_s + B_i + B_n, the broker's controllable cost total
    BrokerCost,
}

impl Composite {
    pub const ALL: &'static [Composite] = &[
        Composite::BuyerUtility,
        Composite::SellerUtility,
        Composite::PersonalPlusOther,
        Composite::InfoPlusClosing,
        Composite::ClosingPlusInfo,
        Composite::SellerBrokeredCost,
        Composite::SellerDirectCost,
        Composite::BrokerCapital,
        Composite::BrokerCost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Composite::BuyerUtility => "U_ip+U_iw",
            Composite::SellerUtility => "U_sp+U_sw",
            Composite::PersonalPlusOther => "I_p+I_o",
            Composite::InfoPlusClosing => "I_p+I_i+pi_b",
            Composite::ClosingPlusInfo => "pi_sb+I_p+I_i",
            Composite::SellerBrokeredCost => "psi_sb+pi_sb",
            Composite::SellerDirectCost => "psi_si+pi_s",
            Composite::BrokerCapital => "RC_br+SC_br",
            Composite::BrokerCost => "B",
        }
    }

    /// Summands, in summation order.
    pub fn terms(self) -> &'static [Symbol] {
        use Symbol::*;
        match self {
            Composite::BuyerUtility => &[Uip, Uiw],
            Composite::SellerUtility => &[Usp, Usw],
            Composite::PersonalPlusOther => &[Ip, Io],
            Composite::InfoPlusClosing => &[Ip, Ii, PiB],
            Composite::ClosingPlusInfo => &[PiSb, Ip, Ii],
            Composite::SellerBrokeredCost => &[PsiSb, PiSb],
            Composite::SellerDirectCost => &[PsiSi, PiS],
            Composite::BrokerCapital => &[RcBr, ScBr],
            Composite::BrokerCost => &[Bb, Bs, Bi, Bn],
        }
    }
}

/// Anything a response function may be declared over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    Symbol(Symbol),
    Composite(Composite),
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Symbol(s) => s.name(),
            Quantity::Composite(c) => c.name(),
        }
    }

    /// Base symbols this quantity is built from.
    pub fn terms(&self) -> &[Symbol] {
        match self {
            Quantity::Symbol(s) => std::slice::from_ref(s),
            Quantity::Composite(c) => c.terms(),
        }
    }
}

impl From<Symbol> for Quantity {
    fn from(s: Symbol) -> Self {
        Quantity::Symbol(s)
    }
}

impl From<Composite> for Quantity {
    fn from(c: Composite) -> Self {
        Quantity::Composite(c)
    }
}

impl FromStr for Quantity {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(sym) = trimmed.parse::<Symbol>() {
            return Ok(Quantity::Symbol(sym));
        }
        // I is stored as I_p + I_i, so the sum spelling names the same quantity.
        if trimmed == "I_p+I_i" || trimmed == "I_i+I_p" {
            return Ok(Quantity::Symbol(Symbol::I));
        }
        Composite::ALL
            .iter()
            .find(|c| c.name() == trimmed)
            .map(|c| Quantity::Composite(*c))
            .ok_or_else(|| UnknownName(s.to_string()))
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Listing-contract regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum State {
    /// super-exclusive
    #[serde(rename = "E_s")]
    Es,
    /// semi-exclusive
    #[serde(rename = "E_p")]
    Ep,
    /// multiple listing
    #[serde(rename = "E_m")]
    Em,
}

impl State {
    pub const ALL: [State; 3] = [State::Es, State::Ep, State::Em];

    pub fn symbol(self) -> Symbol {
        match self {
            State::Es => Symbol::Es,
            State::Ep => Symbol::Ep,
            State::Em => Symbol::Em,
        }
    }

    pub fn name(self) -> &'static str {
        self.symbol().name()
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for State {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "E_s" => Ok(State::Es),
            "E_p" => Ok(State::Ep),
            "E_m" => Ok(State::Em),
            _ => Err(UnknownName(s.to_string())),
        }
    }
}
