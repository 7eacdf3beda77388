//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) the helpers dispatch to rayon when
//! the caller asks for [`Exec::Parallel`]; without it every map runs on the
//! calling thread. Results are always returned in index order, so outputs do
//! not depend on the execution mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution mode for the inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether work actually fans out to a thread pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// `(0..n).map(f).collect()` in the requested mode.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// `items.iter().map(f).collect()` in the requested mode.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

const CHUNK: usize = 512;

/// Sum of `f(0..n)` over fixed-size chunks. The chunk layout does not depend
/// on the mode, so sequential and parallel results agree bit for bit.
pub fn sum_range<F>(exec: Exec, n: usize, f: F) -> crate::scalar::C64
where
    F: Fn(usize) -> crate::scalar::C64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial = map_range(exec, chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).map(&f).sum::<crate::scalar::C64>()
    });
    partial.into_iter().sum()
}

/// Caps the global worker count. Has no effect without the `parallel`
/// feature or once the global pool has been built.
pub fn configure_threads(threads: Option<usize>) -> bool {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        return rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .is_ok();
    }
    let _ = threads;
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_range(Exec::Sequential, 100, |i| i * i);
        let par = map_range(Exec::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
        let v: Vec<u64> = (0..50).collect();
        let f = |i: usize| crate::scalar::C64::new((i as f64).sin(), 1.0 / (1.0 + i as f64));
        assert_eq!(sum_range(Exec::Sequential, 5000, f), sum_range(Exec::Parallel, 5000, f));
        assert_eq!(
            map_slice(Exec::Sequential, &v, |x| x + 1),
            map_slice(Exec::Parallel, &v, |x| x + 1)
        );
    }
}
