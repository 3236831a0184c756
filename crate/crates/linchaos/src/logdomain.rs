//! Log-domain arithmetic for norm accumulation at extreme scales.
//!
//! Orbit norms of weighted shifts reach magnitudes like 2^(k^2), which
//! overflow binary floating point near k = 30, so every magnitude in this
//! crate is carried as its natural logarithm (`f64::NEG_INFINITY` encodes
//! an exact zero). The helpers here are the usual logsumexp family plus a
//! signed variant for coefficient arithmetic with cancellation.

/// Natural log of a magnitude; `NEG_INFINITY` means exactly zero.
pub const LOG_ZERO: f64 = f64::NEG_INFINITY;

/// log(e^a + e^b) without leaving the log domain.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == LOG_ZERO {
        return b;
    }
    if b == LOG_ZERO {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(e^a - e^b) for a >= b; returns `LOG_ZERO` when a == b.
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b, "log_sub_exp requires a >= b (got {a} < {b})");
    if b == LOG_ZERO {
        return a;
    }
    if a == b {
        return LOG_ZERO;
    }
    // ln(e^a - e^b) = a + ln(1 - e^(b-a))
    a + (-(b - a).exp()).ln_1p()
}

/// logsumexp over an iterator of log magnitudes.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(logs: I) -> f64 {
    let mut acc = LOG_ZERO;
    for l in logs {
        acc = log_add_exp(acc, l);
    }
    acc
}

/// log of the l^p combination (e^{a·p} + e^{b·p})^{1/p} of two magnitudes.
pub fn log_p_combine(a: f64, b: f64, p: f64) -> f64 {
    log_add_exp(a * p, b * p) / p
}

/// log of the l^p norm of a family of log magnitudes.
pub fn log_p_norm<I: IntoIterator<Item = f64>>(logs: I, p: f64) -> f64 {
    log_sum_exp(logs.into_iter().map(|l| l * p)) / p
}

/// Sign of a nonzero coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Neg
        } else {
            Sign::Pos
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Pos => 1.0,
            Sign::Neg => -1.0,
        }
    }
}

/// A signed real carried as (sign, log|value|); zero is represented by the
/// absence of a `SignedLog` (e.g. `None`, or a missing sparse entry).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: Sign,
    pub log_abs: f64,
}

impl SignedLog {
    /// Log-domain encoding of a finite nonzero `f64`; `None` for 0.
    pub fn from_f64(v: f64) -> Option<SignedLog> {
        if v == 0.0 {
            None
        } else {
            Some(SignedLog { sign: Sign::of(v), log_abs: v.abs().ln() })
        }
    }

    pub fn positive(log_abs: f64) -> SignedLog {
        SignedLog { sign: Sign::Pos, log_abs }
    }

    /// Back to a plain f64; may overflow to infinity or underflow to zero.
    pub fn to_f64(self) -> f64 {
        self.sign.as_f64() * self.log_abs.exp()
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        SignedLog {
            sign: if self.sign == other.sign { Sign::Pos } else { Sign::Neg },
            log_abs: self.log_abs + other.log_abs,
        }
    }

    /// Signed addition; `None` on exact cancellation.
    pub fn add(self, other: SignedLog) -> Option<SignedLog> {
        if self.sign == other.sign {
            return Some(SignedLog {
                sign: self.sign,
                log_abs: log_add_exp(self.log_abs, other.log_abs),
            });
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        if big.log_abs == small.log_abs {
            return None;
        }
        Some(SignedLog {
            sign: big.sign,
            log_abs: log_sub_exp(big.log_abs, small.log_abs),
        })
    }
}
