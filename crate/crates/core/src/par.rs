//! Execution policy. With the `parallel` feature the parallel policy runs on rayon;
//! without it every policy runs sequentially.

/// How batch work is scheduled. Results are always returned in input order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecPolicy {
    Sequential,
    #[default]
    Parallel,
}

impl ExecPolicy {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Applies `f` to each `chunk`-sized slice of `data` with its chunk index.
    pub fn for_each_chunk<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            ExecPolicy::Parallel => {
                use rayon::prelude::*;
                data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
            }
            _ => data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }
}

/// Sizes the global worker pool. Returns false when the pool was already built
/// or the crate was compiled without the `parallel` feature.
pub fn init_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = ExecPolicy::Sequential.map(&xs, |x| x * x);
        let b = ExecPolicy::Parallel.map(&xs, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(b[999], 999 * 999);
    }

    #[test]
    fn chunks_are_indexed() {
        let mut v = vec![0usize; 40];
        ExecPolicy::Parallel.for_each_chunk(&mut v, 10, |i, c| c.iter_mut().for_each(|x| *x = i));
        assert_eq!(v[35], 3);
    }
}
