//! Profit sharing between cooperating providers: transferable-utility
//! games, Shapley values, and core checks.
//!
//! Players are numbered from 0 internally; coalitions are bitmasks, so
//! player `k` is bit `k`.

use crate::error::{Error, Result};

/// Largest player count for exact subset enumeration.
pub const MAX_PLAYERS: usize = 12;

/// Tolerance on core inequalities.
pub const CORE_TOL: f64 = 1e-9;

/// Value of every coalition, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFunction {
    players: usize,
    values: Vec<f64>,
}

impl CharacteristicFunction {
    /// `values[mask]` is the profit of coalition `mask`; `values[0]` must be 0.
    pub fn new(players: usize, values: Vec<f64>) -> Result<Self> {
        if players == 0 {
            return Err(Error::InvalidParameter("a game needs at least one player".into()));
        }
        if players > MAX_PLAYERS {
            return Err(Error::Capacity {
                players,
                limit: MAX_PLAYERS,
            });
        }
        if values.len() != 1 << players {
            return Err(Error::InvalidParameter(format!(
                "{players} players need {} coalition values, got {}",
                1usize << players,
                values.len()
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidParameter("the empty coalition must be worth 0".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("coalition value {v} is not finite")));
        }
        Ok(Self { players, values })
    }

    pub fn player_count(&self) -> usize {
        self.players
    }

    pub fn value(&self, coalition: usize) -> f64 {
        self.values[coalition]
    }

    pub fn grand_coalition(&self) -> usize {
        (1 << self.players) - 1
    }

    /// Pointwise sum of two games on the same players.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.players != other.players {
            return Err(Error::LengthMismatch {
                expected: self.players,
                got: other.players,
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Self::new(self.players, values)
    }
}

/// Per-player payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffAllocation {
    pub payoffs: Vec<f64>,
}

impl PayoffAllocation {
    pub fn new(payoffs: Vec<f64>) -> Self {
        Self { payoffs }
    }

    pub fn total(&self) -> f64 {
        self.payoffs.iter().sum()
    }
}

/// Player 1's payoff range in a two-player core.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoreInterval {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl CoreInterval {
    pub fn contains(&self, payoff1: f64) -> bool {
        !self.empty && payoff1 >= self.lo - CORE_TOL && payoff1 <= self.hi + CORE_TOL
    }
}

/// Two-player game from standalone profits and the bundle profit.
pub fn build_game(standalone_profits: [f64; 2], bundle_profit: f64) -> Result<CharacteristicFunction> {
    CharacteristicFunction::new(
        2,
        vec![0.0, standalone_profits[0], standalone_profits[1], bundle_profit],
    )
}

/// Shapley value: each player's marginal contribution averaged over all
/// join orders, computed by enumerating the coalitions without the player.
pub fn shapley(game: &CharacteristicFunction) -> Result<PayoffAllocation> {
    let n = game.players;
    if n > MAX_PLAYERS {
        return Err(Error::Capacity {
            players: n,
            limit: MAX_PLAYERS,
        });
    }
    let factorial: Vec<f64> = (0..=n)
        .scan(1.0, |acc, k| {
            if k > 0 {
                *acc *= k as f64;
            }
            Some(*acc)
        })
        .collect();

    let payoffs = (0..n)
        .map(|k| {
            let bit = 1 << k;
            (0..=game.grand_coalition())
                .filter(|s| s & bit == 0)
                .map(|s| {
                    let size = (s as u32).count_ones() as usize;
                    let weight = factorial[size] * factorial[n - size - 1] / factorial[n];
                    weight * (game.value(s | bit) - game.value(s))
                })
                .sum()
        })
        .collect();
    Ok(PayoffAllocation { payoffs })
}

/// Efficiency plus no coalition doing better alone, each to [`CORE_TOL`].
pub fn core_membership(game: &CharacteristicFunction, allocation: &PayoffAllocation) -> Result<bool> {
    if allocation.payoffs.len() != game.players {
        return Err(Error::LengthMismatch {
            expected: game.players,
            got: allocation.payoffs.len(),
        });
    }
    let grand = game.grand_coalition();
    if (allocation.total() - game.value(grand)).abs() > CORE_TOL {
        return Ok(false);
    }
    let stable = (1..grand).all(|s| {
        let share: f64 = (0..game.players)
            .filter(|k| s & (1 << k) != 0)
            .map(|k| allocation.payoffs[k])
            .sum();
        share >= game.value(s) - CORE_TOL
    });
    Ok(stable)
}

/// `[v({1}), v({1,2}) - v({2})]` for player 1; player 2 receives the rest.
pub fn core_interval_2p(game: &CharacteristicFunction) -> Result<CoreInterval> {
    if game.players != 2 {
        return Err(Error::InvalidParameter(format!(
            "two-player core interval needs 2 players, got {}",
            game.players
        )));
    }
    let lo = game.value(0b01);
    let hi = game.value(0b11) - game.value(0b10);
    Ok(CoreInterval { lo, hi, empty: lo > hi })
}
