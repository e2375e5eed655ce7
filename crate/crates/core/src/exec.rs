//! Execution policy for the data-parallel loops.
//!
//! Results never depend on the policy: every parallel map collects in index
//! order, and reductions are performed sequentially on the collected values.

/// How data-parallel loops are executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Rayon work-stealing map. Falls back to sequential without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    /// `(0..len).map(f).collect()`, in parallel when enabled.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Applies `f` to consecutive chunks of `data`, passing the chunk index.
    pub fn for_each_chunk<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
            }
            _ => data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        assert_eq!(Exec::Sequential.map(1000, f), Exec::Parallel.map(1000, f));

        let mut a = vec![0usize; 37];
        let mut b = a.clone();
        Exec::Sequential.for_each_chunk(&mut a, 5, |i, c| c.iter_mut().for_each(|v| *v = i));
        Exec::Parallel.for_each_chunk(&mut b, 5, |i, c| c.iter_mut().for_each(|v| *v = i));
        assert_eq!(a, b);
        assert_eq!(a[36], 7);
    }
}
