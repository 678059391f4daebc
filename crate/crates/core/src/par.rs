//! Index-driven map helpers that run on rayon under the `parallel` feature
//! and degrade to a plain loop without it. Work items must not depend on
//! execution order; simulation replications derive their RNG streams from
//! their index, so both schedules produce identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..len`, collecting in index order.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Fallible variant of [`map_indexed`]; the first error wins.
pub fn try_map_indexed<T, E, F>(len: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Always-sequential map, kept callable under every feature set so that the
/// bench suite can compare schedules in one build.
pub fn map_indexed_serial<T, F>(len: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..len).map(f).collect()
}

/// Always-sequential fallible map.
pub fn try_map_indexed_serial<T, E, F>(len: usize, f: F) -> Result<Vec<T>, E>
where
    F: Fn(usize) -> Result<T, E>,
{
    (0..len).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_serial_agree() {
        let a = map_indexed(100, |i| i * i);
        let b = map_indexed_serial(100, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn errors_propagate() {
        let r: Result<Vec<usize>, &str> =
            try_map_indexed(10, |i| if i == 7 { Err("boom") } else { Ok(i) });
        assert_eq!(r, Err("boom"));
    }
}
