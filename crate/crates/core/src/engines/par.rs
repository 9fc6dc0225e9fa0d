//! Chunked map-reduce used by every sweeping engine.
//!
//! Results only ever combine commutative integer sums or order-free minima,
//! so the answer does not depend on scheduling or worker count.

/// How a sweep is executed. Without the `parallel` feature both variants run
/// on the calling thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

/// Folds `fold(acc, chunk)` over `0..chunks` and merges partial results with
/// `reduce`, which must be associative and commutative.
#[cfg_attr(not(feature = "parallel"), allow(unused_variables))]
pub fn fold_chunks<A, I, F, R>(policy: ExecPolicy, chunks: u64, init: I, fold: F, reduce: R) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64) + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    match policy {
        #[cfg(feature = "parallel")]
        ExecPolicy::Parallel => {
            use rayon::prelude::*;
            (0..chunks)
                .into_par_iter()
                .fold(&init, |mut acc, c| {
                    fold(&mut acc, c);
                    acc
                })
                .reduce(&init, &reduce)
        }
        _ => {
            let mut acc = init();
            for c in 0..chunks {
                fold(&mut acc, c);
            }
            acc
        }
    }
}

/// Maps `f` over `items`, keeping input order.
pub fn map_ordered<T, U, F>(policy: ExecPolicy, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match policy {
        #[cfg(feature = "parallel")]
        ExecPolicy::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let run = |p| fold_chunks(p, 1000, || 0u64, |a, c| *a += c * c, |a, b| a + b);
        assert_eq!(run(ExecPolicy::Sequential), run(ExecPolicy::Parallel));
        let xs: Vec<u32> = (0..50).collect();
        assert_eq!(
            map_ordered(ExecPolicy::Parallel, &xs, |x| x + 1),
            map_ordered(ExecPolicy::Sequential, &xs, |x| x + 1)
        );
    }
}
