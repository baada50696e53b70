//! Two competing decision-makers screening the same applicant.
//!
//! Both players observe the same profitability estimate and move
//! simultaneously. The applicant goes to whichever player offered the more
//! preferred action (accept over recourse over reject); on identical actions
//! the applicant picks either player with probability 1/2, so diagonal cells
//! pay each player half the corresponding solo payoff.

use crate::policy::{expected_payoffs, Action, PolicyParams, Probability};

/// Tolerance around a closed-form threshold inside which a grid point is
/// labeled [`Region::Boundary`] instead of an action.
pub const BOUNDARY_EPSILON: f64 = 1e-9;

/// The 3x3 bimatrix of the simultaneous game, indexed by (row, col) actions.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    cells: [[(f64, f64); 3]; 3],
}

impl PayoffMatrix {
    /// Raw constructor; game-structure invariants are only guaranteed for
    /// matrices produced by [`build_payoff_matrix`].
    pub fn from_cells(cells: [[(f64, f64); 3]; 3]) -> Self {
        PayoffMatrix { cells }
    }

    /// `(row payoff, column payoff)` for an action profile.
    pub fn get(&self, row: Action, col: Action) -> (f64, f64) {
        self.cells[index(row)][index(col)]
    }

    pub fn row_payoff(&self, row: Action, col: Action) -> f64 {
        self.get(row, col).0
    }

    pub fn col_payoff(&self, row: Action, col: Action) -> f64 {
        self.get(row, col).1
    }
}

fn index(action: Action) -> usize {
    match action {
        Action::Accept => 0,
        Action::Recourse => 1,
        Action::Reject => 2,
    }
}

/// Build the competition bimatrix for one applicant. Off the diagonal the
/// applicant-preferred action collects its full solo payoff and the other
/// player gets 0; on the diagonal each player collects half the solo payoff.
pub fn build_payoff_matrix(p: Probability, params: &PolicyParams) -> PayoffMatrix {
    let solo = expected_payoffs(p, params);
    let mut cells = [[(0.0, 0.0); 3]; 3];
    for row in Action::ALL {
        for col in Action::ALL {
            let cell = &mut cells[index(row)][index(col)];
            if row == col {
                let half = solo.of(row) / 2.0;
                *cell = (half, half);
            } else if row.applicant_rank() < col.applicant_rank() {
                *cell = (solo.of(row), 0.0);
            } else {
                *cell = (0.0, solo.of(col));
            }
        }
    }
    PayoffMatrix { cells }
}

/// Which player an elimination step applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    Row,
    Col,
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Player::Row => "row",
            Player::Col => "col",
        })
    }
}

/// One strict-dominance elimination step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EliminationStep {
    pub player: Player,
    pub eliminated: Action,
    pub dominated_by: Action,
}

/// Result of iterated elimination of strictly dominated actions.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub row_actions: Vec<Action>,
    pub col_actions: Vec<Action>,
    pub trace: Vec<EliminationStep>,
}

/// Repeatedly remove actions strictly dominated by another remaining action
/// for either player, recording each step. For strict dominance the surviving
/// set is independent of elimination order; this implementation scans players
/// and actions in a fixed order so the trace itself is deterministic.
pub fn iterated_elimination(matrix: &PayoffMatrix) -> Reduction {
    let mut row_actions: Vec<Action> = Action::ALL.to_vec();
    let mut col_actions: Vec<Action> = Action::ALL.to_vec();
    let mut trace = Vec::new();

    loop {
        let mut eliminated = false;
        if let Some(step) = find_dominated(matrix, Player::Row, &row_actions, &col_actions) {
            row_actions.retain(|&a| a != step.eliminated);
            trace.push(step);
            eliminated = true;
        } else if let Some(step) = find_dominated(matrix, Player::Col, &col_actions, &row_actions)
        {
            col_actions.retain(|&a| a != step.eliminated);
            trace.push(step);
            eliminated = true;
        }
        if !eliminated {
            return Reduction {
                row_actions,
                col_actions,
                trace,
            };
        }
    }
}

fn find_dominated(
    matrix: &PayoffMatrix,
    player: Player,
    own: &[Action],
    other: &[Action],
) -> Option<EliminationStep> {
    for &candidate in own {
        for &dominator in own {
            if dominator == candidate {
                continue;
            }
            let dominated = other.iter().all(|&opp| {
                let (d, c) = match player {
                    Player::Row => (
                        matrix.row_payoff(dominator, opp),
                        matrix.row_payoff(candidate, opp),
                    ),
                    Player::Col => (
                        matrix.col_payoff(opp, dominator),
                        matrix.col_payoff(opp, candidate),
                    ),
                };
                d > c
            });
            if dominated {
                return Some(EliminationStep {
                    player,
                    eliminated: candidate,
                    dominated_by: dominator,
                });
            }
        }
    }
    None
}

/// Pure-strategy equilibrium analysis of a 3x3 bimatrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    /// All profiles where each player's action is a weak best response.
    pub pure_equilibria: Vec<(Action, Action)>,
    /// Strict-dominance elimination steps for the same matrix.
    pub elimination_trace: Vec<EliminationStep>,
    /// True when some listed profile has a payoff-equal unilateral deviation.
    pub indifference: bool,
}

/// Enumerate all nine profiles and keep those where neither player has a
/// strictly improving unilateral deviation.
pub fn pure_nash(matrix: &PayoffMatrix) -> EquilibriumResult {
    let mut pure_equilibria = Vec::new();
    let mut indifference = false;
    for row in Action::ALL {
        for col in Action::ALL {
            let (rp, cp) = matrix.get(row, col);
            let mut best = true;
            let mut tied = false;
            for dev in Action::ALL {
                if dev != row {
                    let alt = matrix.row_payoff(dev, col);
                    if alt > rp {
                        best = false;
                    } else if alt == rp {
                        tied = true;
                    }
                }
                if dev != col {
                    let alt = matrix.col_payoff(row, dev);
                    if alt > cp {
                        best = false;
                    } else if alt == cp {
                        tied = true;
                    }
                }
            }
            if best {
                pure_equilibria.push((row, col));
                if tied {
                    indifference = true;
                }
            }
        }
    }
    EquilibriumResult {
        pure_equilibria,
        elimination_trace: iterated_elimination(matrix).trace,
        indifference,
    }
}

/// Closed-form thresholds of the symmetric competition game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompetitionThresholds {
    /// Above this estimate both players accepting is the unique equilibrium:
    /// `max{(1+(1-m))/(2+(1-m)+(1-u)), 1/2}`.
    pub accept_threshold: Probability,
    /// Below this estimate both players rejecting is the unique equilibrium:
    /// `m/(u+m)` when `m < u`, otherwise `1/2` (recourse never survives).
    pub reject_threshold: Probability,
}

pub fn competition_thresholds(params: &PolicyParams) -> CompetitionThresholds {
    let (u, m) = (params.u(), params.m());
    let accept = if params.recourse_viable() {
        // (1+(1-m))/(2+(1-m)+(1-u)) >= 1/2 exactly when u >= m.
        (2.0 - m) / (4.0 - u - m)
    } else {
        0.5
    };
    let reject = if params.recourse_viable() {
        m / (u + m)
    } else {
        0.5
    };
    CompetitionThresholds {
        accept_threshold: Probability::new(accept).expect("threshold out of range"),
        reject_threshold: Probability::new(reject).expect("threshold out of range"),
    }
}

/// Symmetric-equilibrium region of one profitability estimate under
/// competition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Reject,
    Recourse,
    Accept,
    /// Within [`BOUNDARY_EPSILON`] of a threshold.
    Boundary,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Reject => "reject",
            Region::Recourse => "recourse",
            Region::Accept => "accept",
            Region::Boundary => "boundary",
        }
    }

    pub fn action(self) -> Option<Action> {
        match self {
            Region::Reject => Some(Action::Reject),
            Region::Recourse => Some(Action::Recourse),
            Region::Accept => Some(Action::Accept),
            Region::Boundary => None,
        }
    }
}

/// Label one estimate by the closed-form thresholds.
pub fn competitive_region(p: Probability, params: &PolicyParams) -> Region {
    let thresholds = competition_thresholds(params);
    let accept = thresholds.accept_threshold.value();
    let reject = thresholds.reject_threshold.value();
    let v = p.value();
    if (v - accept).abs() < BOUNDARY_EPSILON || (v - reject).abs() < BOUNDARY_EPSILON {
        Region::Boundary
    } else if v > accept {
        Region::Accept
    } else if v < reject {
        Region::Reject
    } else {
        Region::Recourse
    }
}

/// Label every estimate in a grid; see [`competitive_region`].
pub fn competitive_action_regions(params: &PolicyParams, p_grid: &[Probability]) -> Vec<Region> {
    p_grid
        .iter()
        .map(|&p| competitive_region(p, params))
        .collect()
}
