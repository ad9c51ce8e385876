//! Division of a cell's capacity among its users.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadingMode {
    /// Every user gets `R_cell / U`, capped by what its own link supports.
    #[default]
    EqualRate,
    /// Every user gets a `1/U` share of airtime at its own link rate.
    EqualTime,
}

/// Per-user cellular rate with `users` sharing the cell.
pub fn loaded_cellular_rate<S: Real>(link_rate: S, cell_max: S, users: usize, mode: LoadingMode) -> Result<S> {
    if users == 0 {
        return Err(Error::Config("a loaded cell needs at least one user".into()));
    }
    let u = S::from_count(users);
    Ok(match mode {
        LoadingMode::EqualRate => (cell_max / u).min(link_rate),
        LoadingMode::EqualTime => link_rate / u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sole_user_keeps_link_rate() {
        for mode in [LoadingMode::EqualRate, LoadingMode::EqualTime] {
            assert_eq!(loaded_cellular_rate(4.0, 4.0, 1, mode).unwrap(), 4.0);
        }
    }

    #[test]
    fn equal_time_quarters() {
        assert_eq!(loaded_cellular_rate(4.0, 8.0, 4, LoadingMode::EqualTime).unwrap(), 1.0);
    }

    #[test]
    fn zero_users_is_an_error() {
        assert!(loaded_cellular_rate(4.0, 4.0, 0, LoadingMode::EqualRate).is_err());
    }

    #[test]
    fn equal_rate_conserves_cell_capacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let cell_max: f64 = rng.random_range(0.5..10.0);
            let users = rng.random_range(1..40usize);
            let total: f64 = (0..users)
                .map(|_| {
                    let own = cell_max * rng.random_range(0.05..=1.0);
                    loaded_cellular_rate(own, cell_max, users, LoadingMode::EqualRate).unwrap()
                })
                .sum();
            assert!(total <= cell_max * (1.0 + 1e-12));
        }
    }

    #[test]
    fn per_user_rate_non_increasing_in_users() {
        for mode in [LoadingMode::EqualRate, LoadingMode::EqualTime] {
            let mut last = f64::INFINITY;
            for u in 1..100 {
                let r = loaded_cellular_rate(0.3, 1.0, u, mode).unwrap();
                assert!(r <= last);
                last = r;
            }
        }
    }
}
