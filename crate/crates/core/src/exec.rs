//! Execution strategy for the data-parallel inner loops.
//!
//! Every helper here returns results in index order, so callers that reduce
//! the returned vector sequentially get bit-identical sums under either mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Selects how index ranges are mapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when the `parallel` feature is disabled.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Maps `f` over `0..n`, preserving order.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Maps `f` over the items of a slice, preserving order.
    pub fn map_slice<'a, S, T, F>(self, items: &'a [S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&'a S) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Splits `0..n` (u64) into contiguous chunks and maps `f` over each
    /// `(start, end)` range, preserving chunk order.
    pub fn map_chunks<T, F>(self, n: u64, chunk: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64, u64) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let count = n.div_ceil(chunk) as usize;
        self.map_range(count, |c| {
            let start = c as u64 * chunk;
            let end = (start + chunk).min(n);
            f(start, end)
        })
    }
}

/// Sums in fixed left-to-right order.
pub(crate) fn ordered_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_bitwise() {
        let f = |i: usize| (i as f64 + 0.1).sqrt().sin();
        let a = Exec::Sequential.map_range(10_000, f);
        let b = Exec::Parallel.map_range(10_000, f);
        assert_eq!(ordered_sum(a).to_bits(), ordered_sum(b).to_bits());
    }

    #[test]
    fn chunks_cover_range() {
        let parts = Exec::Parallel.map_chunks(103, 10, |s, e| (s, e));
        assert_eq!(parts.len(), 11);
        assert_eq!(parts[0], (0, 10));
        assert_eq!(parts[10], (100, 103));
    }
}
