use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tower parameters: an odd prime `p` and `s >= 1`, with `q0 = p^s` and
/// `q = p * q0^2 = p^(2s+1)`.
///
/// Only `(p, s)` is stored; everything else is derived on demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct Params {
    p: u32,
    s: u32,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    p: u32,
    s: u32,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.p, raw.s)
    }
}

impl From<Params> for RawParams {
    fn from(params: Params) -> Self {
        RawParams {
            p: params.p,
            s: params.s,
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Params {
    pub fn new(p: u32, s: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::Parameter("p must be odd (p = 2 excluded)".into()));
        }
        if !is_prime(p as u64) {
            return Err(Error::Parameter(format!("p = {p} is not prime")));
        }
        if s == 0 {
            return Err(Error::Parameter("s must be at least 1".into()));
        }
        let n = 2 * s + 1;
        if (p as u64).checked_pow(2 * n).is_none_or(|q2| q2 > (1u64 << 62)) {
            return Err(Error::Parameter(format!("p^(2(2s+1)) overflows for p = {p}, s = {s}")));
        }
        Ok(Params { p, s })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Extension degree `2s + 1` of `F_q / F_p`.
    pub fn n(&self) -> u32 {
        2 * self.s + 1
    }

    pub fn q0(&self) -> u64 {
        (self.p as u64).pow(self.s)
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.n())
    }

    /// True iff `s >= 2`, the range in which the big-action claim is made.
    pub fn paper_hypothesis(&self) -> bool {
        self.s >= 2
    }

    /// Number of F_p-lines in F_q, i.e. `(q - 1) / (p - 1)`.
    pub fn line_count(&self) -> u64 {
        (self.q() - 1) / (self.p as u64 - 1)
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(p={}, s={})", self.p, self.s)
    }
}
