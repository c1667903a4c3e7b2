//! Interactive game sessions: turn order, engine replies, finish detection.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use zeckgame::{game_rng, GameError, GameState, Move, Policy, Winner};

/// Player 1 or player 2; on the wire as `1` / `2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Seat {
    One,
    Two,
}

impl Seat {
    /// Whose turn it is after `ply` moves.
    pub fn for_ply(ply: usize) -> Seat {
        if ply.is_multiple_of(2) {
            Seat::One
        } else {
            Seat::Two
        }
    }
}

impl TryFrom<u8> for Seat {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Seat::One),
            2 => Ok(Seat::Two),
            _ => Err(format!("seat must be 1 or 2, got {v}")),
        }
    }
}

impl From<Seat> for u8 {
    fn from(s: Seat) -> u8 {
        match s {
            Seat::One => 1,
            Seat::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    HumanVsHuman,
    HumanVsEngine { policy: Policy, engine_seat: Seat },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub player: Seat,
    #[serde(rename = "move")]
    pub mv: Move,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Conflict(String),
    #[error(transparent)]
    Rule(GameError),
}

/// Short policy names accepted by `POST /games`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyName {
    #[serde(alias = "greedy_largest")]
    Greedy,
    #[serde(alias = "conjectured_longest")]
    Longest,
    #[default]
    #[serde(alias = "uniform_random")]
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    #[default]
    HumanVsHuman,
    HumanVsEngine,
}

/// Body of `POST /games`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateGame {
    pub n: u32,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub policy: PolicyName,
    #[serde(default = "default_engine_seat")]
    pub engine_seat: Seat,
    #[serde(default)]
    pub seed: u64,
}

fn default_engine_seat() -> Seat {
    Seat::Two
}

impl CreateGame {
    pub fn mode(&self) -> Mode {
        match self.mode {
            ModeName::HumanVsHuman => Mode::HumanVsHuman,
            ModeName::HumanVsEngine => {
                let policy = match self.policy {
                    PolicyName::Greedy => Policy::GreedyLargest,
                    PolicyName::Longest => Policy::ConjecturedLongest,
                    PolicyName::Random => Policy::UniformRandom { seed: self.seed },
                };
                Mode::HumanVsEngine {
                    policy,
                    engine_seat: self.engine_seat,
                }
            }
        }
    }
}

/// Body of `POST /games/{id}/moves`. `player`, when given, must be the
/// seat whose turn it is.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostMove {
    #[serde(rename = "move")]
    pub mv: Move,
    #[serde(default)]
    pub player: Option<Seat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSession {
    pub id: String,
    pub n: u32,
    pub seed: u64,
    pub mode: Mode,
    pub state: GameState,
    pub history: Vec<HistoryEntry>,
}

impl GameSession {
    /// Starts a game; an engine in seat 1 moves immediately.
    pub fn create(id: String, req: &CreateGame) -> Result<GameSession, SessionError> {
        if req.n < 2 {
            return Err(SessionError::Validation(format!(
                "n must be at least 2 to play (got {})",
                req.n
            )));
        }
        let state = GameState::initial(req.n).map_err(SessionError::Rule)?;
        let mut session = GameSession {
            id,
            n: req.n,
            seed: req.seed,
            mode: req.mode(),
            state,
            history: Vec::new(),
        };
        session.engine_reply()?;
        Ok(session)
    }

    pub fn to_move(&self) -> Option<Seat> {
        (!self.state.is_terminal()).then(|| Seat::for_ply(self.history.len()))
    }

    pub fn status(&self) -> Status {
        if self.state.is_terminal() {
            Status::Finished
        } else {
            Status::InProgress
        }
    }

    pub fn winner(&self) -> Option<Winner> {
        self.state
            .is_terminal()
            .then(|| Winner::from_length(self.history.len()))
    }

    fn engine_seat(&self) -> Option<Seat> {
        match self.mode {
            Mode::HumanVsEngine { engine_seat, .. } => Some(engine_seat),
            Mode::HumanVsHuman => None,
        }
    }

    fn push(&mut self, mv: Move) -> Result<HistoryEntry, SessionError> {
        let player = Seat::for_ply(self.history.len());
        self.state = self.state.apply(mv).map_err(SessionError::Rule)?;
        let entry = HistoryEntry { player, mv };
        self.history.push(entry);
        Ok(entry)
    }

    /// Plays the engine's move if it is the engine's turn. Each engine move
    /// draws from its own stream `(seed, ply)`, so transcripts are a pure
    /// function of the seed and the human moves.
    fn engine_reply(&mut self) -> Result<Option<HistoryEntry>, SessionError> {
        let Mode::HumanVsEngine {
            policy,
            engine_seat,
        } = self.mode
        else {
            return Ok(None);
        };
        if self.to_move() != Some(engine_seat) {
            return Ok(None);
        }
        let mut rng = game_rng(self.seed, self.history.len() as u64);
        let mv = policy
            .choose(&self.state, &mut rng)
            .map_err(SessionError::Rule)?;
        self.push(mv).map(Some)
    }

    /// Applies a human move and, when due, the engine's reply. Returns the
    /// entries appended. On error the session is unchanged.
    pub fn play(&mut self, req: &PostMove) -> Result<Vec<HistoryEntry>, SessionError> {
        let Some(turn) = self.to_move() else {
            return Err(SessionError::Conflict("game is already finished".into()));
        };
        if self.engine_seat() == Some(turn) {
            return Err(SessionError::Conflict("it is the engine's turn".into()));
        }
        if let Some(p) = req.player {
            if p != turn {
                return Err(SessionError::Conflict(format!(
                    "not player {}'s turn; player {} to move",
                    u8::from(p),
                    u8::from(turn)
                )));
            }
        }
        let mut next = self.clone();
        let mut applied = vec![next.push(req.mv)?];
        applied.extend(next.engine_reply()?);
        *self = next;
        Ok(applied)
    }

    /// Checks that `history` replays from `{1^n}` to `state`.
    pub fn verify(&self) -> Result<(), String> {
        let mut s = GameState::initial(self.n).map_err(|e| e.to_string())?;
        for (ply, e) in self.history.iter().enumerate() {
            if e.player != Seat::for_ply(ply) {
                return Err(format!("ply {ply} attributed to the wrong player"));
            }
            s = s.apply(e.mv).map_err(|err| err.to_string())?;
        }
        if s != self.state {
            return Err("history does not reach the current state".into());
        }
        Ok(())
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            n: self.n,
            seed: self.seed,
            mode: self.mode,
            state: self.state.clone(),
            label: self.state.to_string(),
            monovariant: self.state.monovariant(),
            legal_moves: self.state.legal_moves(),
            history: self.history.clone(),
            to_move: self.to_move(),
            status: self.status(),
            winner: self.winner(),
        }
    }
}

/// Read-only snapshot returned by the API.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub n: u32,
    pub seed: u64,
    pub mode: Mode,
    pub state: GameState,
    pub label: String,
    pub monovariant: f64,
    pub legal_moves: Vec<Move>,
    pub history: Vec<HistoryEntry>,
    pub to_move: Option<Seat>,
    pub status: Status,
    pub winner: Option<Winner>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn create(n: u32, mode: ModeName, policy: PolicyName, seat: Seat, seed: u64) -> GameSession {
        let req = CreateGame {
            n,
            mode,
            policy,
            engine_seat: seat,
            seed,
        };
        GameSession::create("t".into(), &req).unwrap()
    }

    fn mv(m: Move) -> PostMove {
        PostMove {
            mv: m,
            player: None,
        }
    }

    #[test]
    fn fresh_engine_game_waits_for_human() {
        let s = create(
            10,
            ModeName::HumanVsEngine,
            PolicyName::Random,
            Seat::Two,
            7,
        );
        assert_eq!(s.state.counts()[0], 10);
        assert_eq!(s.to_move(), Some(Seat::One));
        assert_eq!(s.view().legal_moves, vec![Move::MergeOnes]);
    }

    #[test]
    fn n1_rejected() {
        let req = CreateGame {
            n: 1,
            mode: ModeName::HumanVsHuman,
            policy: PolicyName::Random,
            engine_seat: Seat::Two,
            seed: 0,
        };
        assert!(matches!(
            GameSession::create("x".into(), &req),
            Err(SessionError::Validation(_))
        ));
    }

    #[test]
    fn engine_first_on_n2_finishes() {
        let s = create(2, ModeName::HumanVsEngine, PolicyName::Random, Seat::One, 0);
        assert_eq!(
            s.history,
            vec![HistoryEntry {
                player: Seat::One,
                mv: Move::MergeOnes
            }]
        );
        assert_eq!(s.status(), Status::Finished);
        assert_eq!(s.winner(), Some(Winner::Player1));
        assert!(s.view().legal_moves.is_empty());
    }

    #[test]
    fn n3_engine_reply() {
        let mut s = create(3, ModeName::HumanVsEngine, PolicyName::Greedy, Seat::Two, 0);
        let applied = s.play(&mv(Move::MergeOnes)).unwrap();
        assert_eq!(
            applied,
            vec![
                HistoryEntry {
                    player: Seat::One,
                    mv: Move::MergeOnes
                },
                HistoryEntry {
                    player: Seat::Two,
                    mv: Move::Combine(1)
                },
            ]
        );
        assert_eq!(s.winner(), Some(Winner::Player2));
        assert!(matches!(
            s.play(&mv(Move::MergeOnes)),
            Err(SessionError::Conflict(_))
        ));
    }

    #[test]
    fn illegal_and_out_of_turn() {
        let mut s = create(4, ModeName::HumanVsHuman, PolicyName::Random, Seat::Two, 0);
        let before = s.clone();
        assert!(matches!(
            s.play(&mv(Move::Combine(1))),
            Err(SessionError::Rule(GameError::IllegalMove { .. }))
        ));
        let wrong = PostMove {
            mv: Move::MergeOnes,
            player: Some(Seat::Two),
        };
        assert!(matches!(s.play(&wrong), Err(SessionError::Conflict(_))));
        assert_eq!(s, before);
        s.play(&mv(Move::MergeOnes)).unwrap();
        assert_eq!(s.state.counts(), &[2, 1, 0]);
        assert_eq!(s.to_move(), Some(Seat::Two));
    }

    #[test]
    fn transcripts_repeat_for_fixed_seed() {
        let play_out = || {
            let mut s = create(
                20,
                ModeName::HumanVsEngine,
                PolicyName::Random,
                Seat::Two,
                5,
            );
            while s.to_move().is_some() {
                let first = s.state.legal_moves()[0];
                s.play(&mv(first)).unwrap();
            }
            s.history
        };
        assert_eq!(play_out(), play_out());
    }

    #[test]
    fn wire_formats() {
        let req: CreateGame = serde_json::from_str(
            r#"{"n":10,"mode":"human_vs_engine","policy":"random","engine_seat":2,"seed":7}"#,
        )
        .unwrap();
        assert_eq!(
            req.mode(),
            Mode::HumanVsEngine {
                policy: Policy::UniformRandom { seed: 7 },
                engine_seat: Seat::Two
            }
        );
        let pm: PostMove =
            serde_json::from_str(r#"{"move":{"kind":"combine","index":1},"player":1}"#).unwrap();
        assert_eq!((pm.mv, pm.player), (Move::Combine(1), Some(Seat::One)));
        assert!(
            serde_json::from_str::<PostMove>(r#"{"move":{"kind":"merge_ones"},"player":3}"#)
                .is_err()
        );
    }
}
