use std::fmt;

use serde::{Deserialize, Serialize};

/// Coin value carried by a set of states. Heads is `1`, tails is `0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coin {
    Tails,
    Heads,
}

impl Coin {
    pub const ALL: [Coin; 2] = [Coin::Heads, Coin::Tails];

    pub fn bit(self) -> u8 {
        match self {
            Coin::Heads => 1,
            Coin::Tails => 0,
        }
    }

    pub fn opposite(self) -> Coin {
        match self {
            Coin::Heads => Coin::Tails,
            Coin::Tails => Coin::Heads,
        }
    }
}

impl fmt::Display for Coin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coin::Heads => "heads",
            Coin::Tails => "tails",
        })
    }
}

/// One of the four states Alice may announce.
///
/// `A11`/`A12` form the heads set, `A21`/`A22` the tails set. States inside a
/// set are orthogonal; states across sets overlap with probability 1/4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateLabel {
    A11,
    A12,
    A21,
    A22,
}

impl StateLabel {
    pub const ALL: [StateLabel; 4] = [
        StateLabel::A11,
        StateLabel::A12,
        StateLabel::A21,
        StateLabel::A22,
    ];

    pub fn coin(self) -> Coin {
        match self {
            StateLabel::A11 | StateLabel::A12 => Coin::Heads,
            StateLabel::A21 | StateLabel::A22 => Coin::Tails,
        }
    }

    /// Bob's basis that contains this state.
    pub fn basis(self) -> BasisLabel {
        match self.coin() {
            Coin::Heads => BasisLabel::Basis1,
            Coin::Tails => BasisLabel::Basis2,
        }
    }

    /// The basis element that certifies this claim.
    pub fn matching_outcome(self) -> OutcomeLabel {
        match self {
            StateLabel::A11 => OutcomeLabel::B11,
            StateLabel::A12 => OutcomeLabel::B12,
            StateLabel::A21 => OutcomeLabel::B21,
            StateLabel::A22 => OutcomeLabel::B22,
        }
    }

    /// The two labels encoding `coin`.
    pub fn set_of(coin: Coin) -> [StateLabel; 2] {
        match coin {
            Coin::Heads => [StateLabel::A11, StateLabel::A12],
            Coin::Tails => [StateLabel::A21, StateLabel::A22],
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StateLabel::A11 => "A11",
            StateLabel::A12 => "A12",
            StateLabel::A21 => "A21",
            StateLabel::A22 => "A22",
        }
    }

    pub fn from_name(name: &str) -> Option<StateLabel> {
        StateLabel::ALL.into_iter().find(|l| l.name() == name)
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisLabel {
    Basis1,
    Basis2,
}

impl BasisLabel {
    pub const ALL: [BasisLabel; 2] = [BasisLabel::Basis1, BasisLabel::Basis2];

    pub fn outcomes(self) -> [OutcomeLabel; 3] {
        match self {
            BasisLabel::Basis1 => [OutcomeLabel::B11, OutcomeLabel::B12, OutcomeLabel::B13],
            BasisLabel::Basis2 => [OutcomeLabel::B21, OutcomeLabel::B22, OutcomeLabel::B23],
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisLabel::Basis1 => "basis1",
            BasisLabel::Basis2 => "basis2",
        })
    }
}

/// One of Bob's six projectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutcomeLabel {
    B11,
    B12,
    B13,
    B21,
    B22,
    B23,
}

impl OutcomeLabel {
    pub const ALL: [OutcomeLabel; 6] = [
        OutcomeLabel::B11,
        OutcomeLabel::B12,
        OutcomeLabel::B13,
        OutcomeLabel::B21,
        OutcomeLabel::B22,
        OutcomeLabel::B23,
    ];

    pub fn basis(self) -> BasisLabel {
        match self {
            OutcomeLabel::B11 | OutcomeLabel::B12 | OutcomeLabel::B13 => BasisLabel::Basis1,
            _ => BasisLabel::Basis2,
        }
    }

    /// Position of this outcome inside its basis triple.
    pub fn slot(self) -> usize {
        (self as usize) % 3
    }

    /// Index in `OutcomeLabel::ALL`.
    pub fn index(self) -> usize {
        self as usize
    }

    /// `B13 = |2⟩` and `B23 = |1⟩` lie outside the plane spanned by the
    /// corresponding set of Alice's states.
    pub fn is_out_of_plane(self) -> bool {
        matches!(self, OutcomeLabel::B13 | OutcomeLabel::B23)
    }

    pub fn name(self) -> &'static str {
        match self {
            OutcomeLabel::B11 => "B11",
            OutcomeLabel::B12 => "B12",
            OutcomeLabel::B13 => "B13",
            OutcomeLabel::B21 => "B21",
            OutcomeLabel::B22 => "B22",
            OutcomeLabel::B23 => "B23",
        }
    }

    pub fn from_name(name: &str) -> Option<OutcomeLabel> {
        OutcomeLabel::ALL.into_iter().find(|l| l.name() == name)
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
