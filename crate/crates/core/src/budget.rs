/// Memory cap for enumerations (balls, tiles, profile searches).
///
/// Sizes are estimated, not measured: each enumeration declares a per-item
/// byte cost and the budget converts that into an item limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_bytes: u64,
}

impl Budget {
    pub const DEFAULT_MB: u64 = 2048;

    pub fn from_megabytes(mb: u64) -> Self {
        Budget {
            max_bytes: mb.saturating_mul(1 << 20),
        }
    }

    /// Reads `OELAB_BUDGET_MB`, falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var("OELAB_BUDGET_MB")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Budget::from_megabytes)
            .unwrap_or_default()
    }

    pub fn max_items(&self, bytes_per_item: u64) -> u64 {
        self.max_bytes / bytes_per_item.max(1)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_megabytes(Self::DEFAULT_MB)
    }
}
