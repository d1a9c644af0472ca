//! Time-grid fan-out. Each sample is computed independently and results are
//! merged by index, so output is identical for every thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

pub fn map_samples<T, F>(exec: Execution, samples: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => samples.iter().map(|&t| f(t)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => samples.par_iter().map(|&t| f(t)).collect(),
    }
}

pub fn try_map_samples<T, E, F>(exec: Execution, samples: &[f64], f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(f64) -> Result<T, E> + Sync + Send,
{
    match exec {
        Execution::Sequential => samples.iter().map(|&t| f(t)).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => samples.par_iter().map(|&t| f(t)).collect(),
    }
}
