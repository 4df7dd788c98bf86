//! Protocol families and how a QBER maps to a channel.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{q11_interval, BellDiagonal};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "bb84")]
    Bb84,
    #[serde(rename = "six-state")]
    SixState,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Bb84 => "bb84",
            Protocol::SixState => "six-state",
        }
    }

    /// Highest QBER accepted for this protocol.
    pub fn max_qber(self) -> f64 {
        match self {
            Protocol::Bb84 => 0.5,
            Protocol::SixState => 2.0 / 3.0,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bb84" => Ok(Protocol::Bb84),
            "six-state" | "sixstate" => Ok(Protocol::SixState),
            _ => Err(Error::InvalidParameter(format!(
                "unknown protocol '{s}' (expected bb84 or six-state)"
            ))),
        }
    }
}

/// Treatment of the BB84 free parameter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Q11 {
    /// Minimize the rate over the valid interval.
    #[default]
    Minimize,
    Fixed(f64),
}

impl FromStr for Q11 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Q11::Minimize);
        }
        s.parse::<f64>()
            .map(Q11::Fixed)
            .map_err(|_| Error::InvalidParameter(format!("q11 must be 'auto' or a number, got '{s}'")))
    }
}

/// A channel description before the BB84 free parameter is fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChannelSpec {
    SixState { qber: f64 },
    Bb84 { delta_b: f64, delta_p: f64 },
    Explicit { channel: BellDiagonal },
}

impl ChannelSpec {
    pub fn from_protocol(protocol: Protocol, qber: f64) -> Result<Self> {
        if !(0.0..=protocol.max_qber()).contains(&qber) || qber.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "qber {qber} is outside [0, {}] for {protocol}",
                protocol.max_qber()
            )));
        }
        Ok(match protocol {
            Protocol::SixState => ChannelSpec::SixState { qber },
            Protocol::Bb84 => ChannelSpec::Bb84 {
                delta_b: qber,
                delta_p: qber,
            },
        })
    }

    pub fn has_free_parameter(&self) -> bool {
        matches!(self, ChannelSpec::Bb84 { .. })
    }

    /// Builds the channel; `q11` is used only for BB84.
    pub fn channel(&self, q11: f64) -> Result<BellDiagonal> {
        match *self {
            ChannelSpec::SixState { qber } => BellDiagonal::six_state(qber),
            ChannelSpec::Bb84 { delta_b, delta_p } => BellDiagonal::from_bb84(delta_b, delta_p, q11),
            ChannelSpec::Explicit { channel } => Ok(channel),
        }
    }

    pub fn q11_interval(&self) -> Option<(f64, f64)> {
        match *self {
            ChannelSpec::Bb84 { delta_b, delta_p } => Some(q11_interval(delta_b, delta_p)),
            _ => None,
        }
    }

    /// Bit error rate of the channel.
    pub fn qber(&self) -> f64 {
        match *self {
            ChannelSpec::SixState { qber } => qber,
            ChannelSpec::Bb84 { delta_b, .. } => delta_b,
            ChannelSpec::Explicit { channel } => channel.delta_b(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        assert_eq!("bb84".parse::<Protocol>().unwrap(), Protocol::Bb84);
        assert_eq!("six-state".parse::<Protocol>().unwrap(), Protocol::SixState);
        assert!("b92".parse::<Protocol>().is_err());
        assert_eq!("auto".parse::<Q11>().unwrap(), Q11::Minimize);
        assert_eq!("0.01".parse::<Q11>().unwrap(), Q11::Fixed(0.01));
        assert!("x".parse::<Q11>().is_err());
    }

    #[test]
    fn spec_channels() {
        let s = ChannelSpec::from_protocol(Protocol::Bb84, 0.1).unwrap();
        assert_eq!(s.q11_interval(), Some((0.0, 0.1)));
        assert!(s.channel(0.2).is_err());
        assert!(ChannelSpec::from_protocol(Protocol::Bb84, 0.6).is_err());
        let six = ChannelSpec::from_protocol(Protocol::SixState, 0.1).unwrap();
        assert_eq!(six.channel(123.0).unwrap(), BellDiagonal::six_state(0.1).unwrap());
    }
}
