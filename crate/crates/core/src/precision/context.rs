use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_BITS: u32 = 192;
pub const DEFAULT_MAX_BITS: u32 = 4096;
pub const DEFAULT_ESCALATION: u32 = 2;

/// Environment variable that overrides the escalation cap.
pub const MAX_BITS_ENV: &str = "LATMESH_MAX_BITS";

static ESCALATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of precision escalations performed by this process so far.
pub fn escalation_count() -> u64 {
    ESCALATIONS.load(Ordering::Relaxed)
}

pub(crate) fn note_escalation() {
    ESCALATIONS.fetch_add(1, Ordering::Relaxed);
}

/// Working precision plus the escalation policy used on ambiguous results.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    pub bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            bits: DEFAULT_BITS,
            max_bits: DEFAULT_MAX_BITS,
            escalation_factor: DEFAULT_ESCALATION,
        }
    }
}

impl PrecisionContext {
    pub fn new(bits: u32, max_bits: u32, escalation_factor: u32) -> Result<Self> {
        if bits < 32 {
            return Err(Error::InvalidArgument(format!("bits must be >= 32, got {bits}")));
        }
        if bits > max_bits {
            return Err(Error::InvalidArgument(format!(
                "bits ({bits}) exceeds max_bits ({max_bits})"
            )));
        }
        if escalation_factor < 2 {
            return Err(Error::InvalidArgument(
                "escalation_factor must be >= 2".to_string(),
            ));
        }
        Ok(PrecisionContext {
            bits,
            max_bits,
            escalation_factor,
        })
    }

    pub fn with_bits(bits: u32) -> Self {
        PrecisionContext {
            bits,
            max_bits: DEFAULT_MAX_BITS.max(bits),
            ..Default::default()
        }
    }

    /// The same policy starting at `bits`.
    pub fn at_bits(&self, bits: u32) -> Self {
        PrecisionContext {
            bits,
            max_bits: self.max_bits.max(bits),
            ..*self
        }
    }

    /// Apply the `LATMESH_MAX_BITS` override, if set and parseable.
    pub fn with_env_override(mut self) -> Self {
        if let Some(cap) = std::env::var(MAX_BITS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u32>().ok())
        {
            self.max_bits = cap.max(self.bits);
        }
        self
    }

    /// Precisions tried in order: `bits`, `bits·f`, … capped at `max_bits`.
    pub fn ladder(&self) -> Ladder {
        Ladder {
            next: Some(self.bits),
            max_bits: self.max_bits,
            factor: self.escalation_factor,
            first: true,
        }
    }

    /// Run `attempt` on the precision ladder until it returns `Some`.
    ///
    /// Returns the final precision tried alongside `None` when every rung failed.
    pub fn escalate<T>(&self, mut attempt: impl FnMut(u32) -> Result<Option<T>>) -> Result<Result<T, u32>> {
        let mut last = self.bits;
        for bits in self.ladder() {
            last = bits;
            if let Some(v) = attempt(bits)? {
                return Ok(Ok(v));
            }
        }
        Ok(Err(last))
    }
}

#[derive(Clone, Debug)]
pub struct Ladder {
    next: Option<u32>,
    max_bits: u32,
    factor: u32,
    first: bool,
}

impl Iterator for Ladder {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let cur = self.next?;
        if !self.first {
            note_escalation();
        }
        self.first = false;
        self.next = if cur >= self.max_bits {
            None
        } else {
            Some(cur.saturating_mul(self.factor).min(self.max_bits))
        };
        Some(cur)
    }
}
