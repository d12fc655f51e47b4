//! Data-parallel mapping. With the `parallel` feature the work is spread
//! over the rayon pool; without it, or through [`seq_map`], it runs in order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order matches input order.
#[cfg(feature = "parallel")]
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    seq_map(items, f)
}

pub fn seq_map<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

/// Whether [`par_map`] actually runs in parallel.
pub const PARALLEL: bool = cfg!(feature = "parallel");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_kept() {
        let xs: Vec<u64> = (0..1000).collect();
        assert_eq!(par_map(&xs, |x| x * x), seq_map(&xs, |x| x * x));
    }
}
