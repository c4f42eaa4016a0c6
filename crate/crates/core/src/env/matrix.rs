use serde::{Deserialize, Serialize};

use crate::error::{check_index, invalid, Result, TmdpError};

/// Row player is the decision maker, column player the opponent.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffBimatrix {
    n_rows: usize,
    n_cols: usize,
    rewards: Vec<(f64, f64)>,
    labels: Vec<String>,
}

impl PayoffBimatrix {
    pub fn new(rows: Vec<Vec<(f64, f64)>>, labels: Vec<String>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if n_rows == 0 || n_cols == 0 {
            return Err(invalid("payoffs", "bimatrix must be nonempty"));
        }
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(invalid("payoffs", "bimatrix rows differ in length"));
        }
        if rows.iter().flatten().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(invalid("payoffs", "entries must be finite"));
        }
        if !labels.is_empty() && labels.len() != n_rows.max(n_cols) {
            return Err(invalid("labels", "one label per action"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            rewards: rows.into_iter().flatten().collect(),
            labels,
        })
    }

    fn cooperate_defect(rows: [[(f64, f64); 2]; 2]) -> Self {
        Self::new(rows.iter().map(|r| r.to_vec()).collect(), vec!["C".into(), "D".into()])
            .expect("built-in game")
    }

    pub fn prisoners_dilemma() -> Self {
        Self::cooperate_defect([[(-1.0, -1.0), (-3.0, 0.0)], [(0.0, -3.0), (-2.0, -2.0)]])
    }

    pub fn stag_hunt() -> Self {
        Self::cooperate_defect([[(2.0, 2.0), (0.0, 1.0)], [(1.0, 0.0), (1.0, 1.0)]])
    }

    pub fn chicken() -> Self {
        Self::cooperate_defect([[(0.0, 0.0), (-2.0, 1.0)], [(1.0, -2.0), (-4.0, -4.0)]])
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `(r_A, r_B)` for row action `a` and column action `b`.
    pub fn matrix_step(&self, a: usize, b: usize) -> Result<(f64, f64)> {
        check_index("row action", a, self.n_rows)?;
        check_index("column action", b, self.n_cols)?;
        Ok(self.rewards[a * self.n_cols + b])
    }
}

/// Memory-1 state space: `0` is the initial state, `1 + a·|B| + b` the
/// state after joint action `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Memory1State {
    pub n_rows: usize,
    pub n_cols: usize,
}

impl Memory1State {
    pub const INITIAL: usize = 0;

    pub fn n_states(&self) -> usize {
        1 + self.n_rows * self.n_cols
    }

    pub fn encode(&self, a: usize, b: usize) -> Result<usize> {
        check_index("row action", a, self.n_rows)?;
        check_index("column action", b, self.n_cols)?;
        Ok(1 + a * self.n_cols + b)
    }

    /// The previous joint action, or `None` for the initial state.
    pub fn decode(&self, s: usize) -> Result<Option<(usize, usize)>> {
        check_index("memory-1 state", s, self.n_states())?;
        Ok(if s == 0 { None } else { Some(((s - 1) / self.n_cols, (s - 1) % self.n_cols)) })
    }

    /// The next state depends only on the joint action just played.
    pub fn transition(&self, prev: usize, a: usize, b: usize) -> Result<usize> {
        check_index("memory-1 state", prev, self.n_states())?;
        self.encode(a, b)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Memory {
    #[default]
    None,
    Memory1,
}

/// Iterated bimatrix game, optionally with memory-1 states.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    payoffs: PayoffBimatrix,
    memory: Option<Memory1State>,
    state: usize,
}

impl MatrixGame {
    pub fn new(payoffs: PayoffBimatrix, memory: Memory) -> Self {
        let memory = match memory {
            Memory::None => None,
            Memory::Memory1 => Some(Memory1State {
                n_rows: payoffs.n_rows(),
                n_cols: payoffs.n_cols(),
            }),
        };
        Self { payoffs, memory, state: 0 }
    }

    pub fn payoffs(&self) -> &PayoffBimatrix {
        &self.payoffs
    }

    pub fn memory(&self) -> Option<Memory1State> {
        self.memory
    }

    pub fn n_states(&self) -> usize {
        self.memory.map_or(1, |m| m.n_states())
    }

    pub fn state(&self) -> usize {
        self.state
    }

    pub fn reset(&mut self) -> usize {
        self.state = 0;
        0
    }

    /// Returns `(s_next, r_A, r_B)`.
    pub fn step(&mut self, a: usize, b: usize) -> Result<(usize, f64, f64)> {
        let (ra, rb) = self.payoffs.matrix_step(a, b)?;
        if let Some(m) = self.memory {
            self.state = m.transition(self.state, a, b)?;
        }
        Ok((self.state, ra, rb))
    }
}

/// Either a named built-in game or an explicit bimatrix.
pub fn resolve_game(name: Option<&str>, payoffs: Option<&Vec<Vec<[f64; 2]>>>) -> Result<PayoffBimatrix> {
    match (name, payoffs) {
        (Some(_), Some(_)) => Err(invalid("env.game", "give either `game` or `payoffs`, not both")),
        (None, Some(rows)) => {
            PayoffBimatrix::new(rows.iter().map(|r| r.iter().map(|p| (p[0], p[1])).collect()).collect(), Vec::new())
        }
        (Some(n), None) => match n {
            "ipd" | "prisoners_dilemma" => Ok(PayoffBimatrix::prisoners_dilemma()),
            "stag_hunt" | "ish" => Ok(PayoffBimatrix::stag_hunt()),
            "chicken" => Ok(PayoffBimatrix::chicken()),
            other => Err(TmdpError::Config(format!(
                "env.game: unknown game `{other}` (known: ipd, stag_hunt, chicken)"
            ))),
        },
        (None, None) => Err(invalid("env.game", "missing; give `game` or `payoffs`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_entries() {
        assert_eq!(PayoffBimatrix::prisoners_dilemma().matrix_step(0, 1).unwrap(), (-3.0, 0.0));
        assert_eq!(PayoffBimatrix::stag_hunt().matrix_step(0, 0).unwrap(), (2.0, 2.0));
        assert_eq!(PayoffBimatrix::chicken().matrix_step(1, 0).unwrap(), (1.0, -2.0));
        assert!(PayoffBimatrix::chicken().matrix_step(2, 0).is_err());
    }

    #[test]
    fn lookup_is_pure() {
        let g = PayoffBimatrix::prisoners_dilemma();
        let first = g.matrix_step(1, 1).unwrap();
        for _ in 0..1_000_000 {
            assert_eq!(g.matrix_step(1, 1).unwrap(), first);
        }
    }

    #[test]
    fn memory1_encoding() {
        let m = Memory1State { n_rows: 2, n_cols: 2 };
        assert_eq!(m.n_states(), 5);
        let cc = m.transition(Memory1State::INITIAL, 0, 0).unwrap();
        assert_eq!(m.decode(cc).unwrap(), Some((0, 0)));
        let dc = m.encode(1, 0).unwrap();
        assert_eq!(m.transition(dc, 0, 1).unwrap(), m.encode(0, 1).unwrap());
        assert_eq!(m.decode(0).unwrap(), None);
        assert_eq!(m.n_states(), 5);
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..2 {
            for b in 0..2 {
                let s = m.encode(a, b).unwrap();
                assert_ne!(s, 0);
                assert_eq!(m.decode(s).unwrap(), Some((a, b)));
                seen.insert(s);
            }
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn rejects_ragged() {
        assert!(PayoffBimatrix::new(vec![vec![(0.0, 0.0)], vec![]], Vec::new()).is_err());
        assert!(resolve_game(Some("go"), None).is_err());
        assert!(resolve_game(None, None).is_err());
    }

    #[test]
    fn reset_and_memoryless() {
        let mut g = MatrixGame::new(PayoffBimatrix::prisoners_dilemma(), Memory::Memory1);
        g.step(1, 0).unwrap();
        assert_eq!(g.reset(), 0);
        let mut g = MatrixGame::new(PayoffBimatrix::prisoners_dilemma(), Memory::None);
        assert_eq!(g.step(1, 0).unwrap(), (0, 0.0, -3.0));
        assert_eq!(g.n_states(), 1);
    }
}
