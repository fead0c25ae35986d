//! Index-ordered execution of independent jobs.

use alloc::vec::Vec;

/// Runs `f(0), .., f(n-1)` and returns the results in index order, so that
/// parallel implementations produce exactly the sequential output.
pub trait Executor: Sync {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}
