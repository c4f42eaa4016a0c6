use crate::agents::Side;
use crate::error::{Result, TmdpError};

/// Cooperates from the initial state, then repeats the counterpart's
/// previous action read off a memory-1 state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TitForTat {
    side: Side,
    n_dm_actions: usize,
    n_opp_actions: usize,
    cooperate: usize,
}

impl TitForTat {
    /// `side` is the seat TFT plays in; states are always encoded from the
    /// decision maker's side as `1 + a·|B| + b`, with `0` the initial state.
    pub fn new(side: Side, n_dm_actions: usize, n_opp_actions: usize) -> Self {
        Self {
            side,
            n_dm_actions,
            n_opp_actions,
            cooperate: 0,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn act(&self, s: usize) -> Result<usize> {
        if s == 0 {
            return Ok(self.cooperate);
        }
        let n = self.n_dm_actions * self.n_opp_actions;
        if s > n {
            return Err(TmdpError::Index {
                what: "memory-1 state",
                index: s,
                bound: n + 1,
            });
        }
        let (a_prev, b_prev) = ((s - 1) / self.n_opp_actions, (s - 1) % self.n_opp_actions);
        Ok(match self.side {
            Side::Opponent => a_prev,
            Side::Dm => b_prev,
        })
    }
}
