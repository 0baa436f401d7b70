use alloc::vec::Vec;

/// Success probability per step, `success[m]` for `m = 0..=steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub success: Vec<f64>,
    /// Standard error of each entry, present for sampled traces.
    pub stderr: Option<Vec<f64>>,
}

impl EvolutionTrace {
    pub fn new(success: Vec<f64>) -> Self {
        Self { success, stderr: None }
    }

    pub fn steps(&self) -> usize {
        self.success.len().saturating_sub(1)
    }

    pub fn at(&self, m: usize) -> Option<f64> {
        self.success.get(m).copied()
    }

    /// `(m, p_suc(m))` pairs.
    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.success.iter().copied().enumerate()
    }

    /// Largest pointwise deviation over the common prefix.
    pub fn max_abs_diff(&self, other: &EvolutionTrace) -> f64 {
        self.success
            .iter()
            .zip(&other.success)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
