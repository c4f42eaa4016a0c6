use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{check_index, invalid, Result, TmdpError};

pub const TARGET_REWARD: f64 = 50.0;

/// The adversary's payoff as a function of the decision maker's outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryReward {
    /// `r_B = −r_A`.
    #[default]
    ZeroSum,
    /// 1 when the decision maker misses, else 0.
    Binary,
    /// 1 when the decision maker misses, else −1.
    Sign,
}

impl AdversaryReward {
    pub fn apply(self, r_dm: f64, dm_missed: bool) -> f64 {
        match self {
            Self::ZeroSum => -r_dm,
            Self::Binary => f64::from(u8::from(dm_missed)),
            Self::Sign => if dm_missed { 1.0 } else { -1.0 },
        }
    }
}

/// One round of the stateless game: `+50` to the decision maker when she
/// picks the adversary's target, `−50` otherwise.
pub fn foe_stateless_step(adversary_target: usize, dm_choice: usize, scaling: AdversaryReward) -> Result<(f64, f64)> {
    check_index("adversary target", adversary_target, 2)?;
    check_index("target choice", dm_choice, 2)?;
    let hit = dm_choice == adversary_target;
    let r_dm = if hit { TARGET_REWARD } else { -TARGET_REWARD };
    Ok((r_dm, scaling.apply(r_dm, !hit)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Wall,
    Floor,
    Target(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Up,
    Down,
    Left,
    Right,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::Up, Move::Down, Move::Left, Move::Right];

    pub fn from_index(i: usize) -> Result<Self> {
        check_index("move", i, 4)?;
        Ok(Self::ALL[i])
    }

    fn delta(self) -> (isize, isize) {
        match self {
            Self::Up => (-1, 0),
            Self::Down => (1, 0),
            Self::Left => (0, -1),
            Self::Right => (0, 1),
        }
    }
}

/// Room with a start cell and two targets.
///
/// States number the non-wall cells in reading order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    width: usize,
    cells: Vec<Cell>,
    state_of: Vec<Option<usize>>,
    cell_of: Vec<usize>,
    start: usize,
    targets: [usize; 2],
    pub step_penalty: f64,
    pub target_reward: f64,
    pub max_steps: u32,
}

pub const DEFAULT_LAYOUT: &str = "\
#####
#1.2#
##.##
##.##
##S##
#####
";

impl GridWorld {
    /// `#` wall, `.` floor, `S` start, `1`/`2` targets. Cells outside
    /// short rows count as walls.
    pub fn parse(map: &str) -> Result<Self> {
        let rows: Vec<&str> = map.lines().map(str::trim_end).filter(|l| !l.is_empty()).collect();
        let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
        if width == 0 {
            return Err(invalid("map", "empty layout"));
        }
        let mut cells = Vec::with_capacity(width * rows.len());
        let mut start = None;
        let mut targets = [None, None];
        for (r, row) in rows.iter().enumerate() {
            let mut chars: Vec<char> = row.chars().collect();
            chars.resize(width, '#');
            for (c, ch) in chars.into_iter().enumerate() {
                let idx = r * width + c;
                let cell = match ch {
                    '#' => Cell::Wall,
                    '.' => Cell::Floor,
                    'S' => {
                        if start.replace(idx).is_some() {
                            return Err(invalid("map", "more than one start cell"));
                        }
                        Cell::Floor
                    }
                    '1' | '2' => {
                        let t = if ch == '1' { 0 } else { 1 };
                        if targets[t].replace(idx).is_some() {
                            return Err(invalid("map", format!("more than one target {ch}")));
                        }
                        Cell::Target(t)
                    }
                    other => return Err(invalid("map", format!("unknown cell `{other}` at row {r}, column {c}"))),
                };
                cells.push(cell);
            }
        }
        let start = start.ok_or_else(|| invalid("map", "no start cell"))?;
        let targets = match targets {
            [Some(a), Some(b)] => [a, b],
            _ => return Err(invalid("map", "needs exactly one target 1 and one target 2")),
        };
        let mut state_of = vec![None; cells.len()];
        let mut cell_of = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            if *c != Cell::Wall {
                state_of[i] = Some(cell_of.len());
                cell_of.push(i);
            }
        }
        let world = Self {
            width,
            cells,
            state_of,
            cell_of,
            start,
            targets,
            step_penalty: 1.0,
            target_reward: TARGET_REWARD,
            max_steps: 50,
        };
        for t in 0..2 {
            if world.shortest_path(t).is_none() {
                return Err(invalid("map", format!("target {} unreachable from start", t + 1)));
            }
        }
        Ok(world)
    }

    pub fn default_layout() -> Self {
        Self::parse(DEFAULT_LAYOUT).expect("built-in layout")
    }

    pub fn n_states(&self) -> usize {
        self.cell_of.len()
    }

    pub fn start_state(&self) -> usize {
        self.state_of[self.start].expect("start is open")
    }

    pub fn target_state(&self, t: usize) -> usize {
        self.state_of[self.targets[t]].expect("targets are open")
    }

    /// `(row, column)` of a state.
    pub fn position(&self, s: usize) -> (usize, usize) {
        let cell = self.cell_of[s];
        (cell / self.width, cell % self.width)
    }

    fn neighbor(&self, cell: usize, m: Move) -> usize {
        let height = self.cells.len() / self.width;
        let (dr, dc) = m.delta();
        let r = (cell / self.width) as isize + dr;
        let c = (cell % self.width) as isize + dc;
        if r < 0 || c < 0 || r as usize >= height || c as usize >= self.width {
            return cell;
        }
        let next = r as usize * self.width + c as usize;
        if self.cells[next] == Cell::Wall {
            cell
        } else {
            next
        }
    }

    /// Moves from start to target `t`, through non-target cells.
    pub fn shortest_path(&self, t: usize) -> Option<u32> {
        let goal = self.targets[t];
        let mut dist = vec![u32::MAX; self.cells.len()];
        let mut queue = VecDeque::from([self.start]);
        dist[self.start] = 0;
        while let Some(cell) = queue.pop_front() {
            if cell == goal {
                return Some(dist[cell]);
            }
            if matches!(self.cells[cell], Cell::Target(_)) {
                continue;
            }
            for m in Move::ALL {
                let n = self.neighbor(cell, m);
                if dist[n] == u32::MAX {
                    dist[n] = dist[cell] + 1;
                    queue.push_back(n);
                }
            }
        }
        None
    }
}

/// Outcome of one grid move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridStep {
    pub s_next: usize,
    pub r_dm: f64,
    pub r_opp: f64,
    pub terminal: bool,
    /// Target entered on this step.
    pub reached: Option<usize>,
}

/// A running episode of the spatial game.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEpisode {
    pos: usize,
    steps: u32,
    done: bool,
}

impl GridEpisode {
    pub fn new(world: &GridWorld) -> Self {
        Self {
            pos: world.start,
            steps: 0,
            done: false,
        }
    }

    pub fn state(&self, world: &GridWorld) -> usize {
        world.state_of[self.pos].expect("agent stands on an open cell")
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn grid_step(
        &mut self,
        world: &GridWorld,
        mv: Move,
        adversary_target: usize,
        scaling: AdversaryReward,
    ) -> Result<GridStep> {
        if self.done {
            return Err(TmdpError::EpisodeOver);
        }
        check_index("adversary target", adversary_target, 2)?;
        self.pos = world.neighbor(self.pos, mv);
        self.steps += 1;
        let mut r_dm = -world.step_penalty;
        let mut reached = None;
        let mut missed = false;
        if let Cell::Target(t) = world.cells[self.pos] {
            reached = Some(t);
            missed = t != adversary_target;
            r_dm += if missed { -world.target_reward } else { world.target_reward };
        }
        self.done = reached.is_some() || self.steps >= world.max_steps;
        let r_opp = match (scaling, reached) {
            (AdversaryReward::ZeroSum, _) => -r_dm,
            (_, Some(_)) => scaling.apply(r_dm, missed),
            (_, None) => 0.0,
        };
        Ok(GridStep {
            s_next: self.state(world),
            r_dm,
            r_opp,
            terminal: self.done,
            reached,
        })
    }
}
