//! Fixed-excitation manifolds of the two-mode product basis `|ν, n1, n2⟩`.
//!
//! The interaction conserves `N = n1 + n2 + |x⟩⟨x|`, so every run lives in a
//! finite block of `2N + 1` states.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "g")]
    G,
    #[serde(rename = "x")]
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub level: Level,
    pub n1: usize,
    pub n2: usize,
}

impl BasisState {
    pub const fn new(level: Level, n1: usize, n2: usize) -> Self {
        BasisState { level, n1, n2 }
    }

    pub const fn ground(n1: usize, n2: usize) -> Self {
        Self::new(Level::G, n1, n2)
    }

    pub const fn excited(n1: usize, n2: usize) -> Self {
        Self::new(Level::X, n1, n2)
    }

    pub fn is_excited(&self) -> bool {
        self.level == Level::X
    }

    /// Eigenvalue of the total excitation operator on this state.
    pub fn excitation(&self) -> usize {
        self.n1 + self.n2 + usize::from(self.is_excited())
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.level {
            Level::G => 'g',
            Level::X => 'x',
        };
        write!(f, "|{},{},{}⟩", level, self.n1, self.n2)
    }
}

/// Parses `g,2,0` / `x,0,1` (optionally wrapped in `|...⟩` or `|...>`).
impl FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse basis state {s:?}, expected e.g. g,2,0"));
        let trimmed = s
            .trim()
            .trim_start_matches('|')
            .trim_end_matches('⟩')
            .trim_end_matches('>');
        let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let level = match parts[0] {
            "g" | "G" => Level::G,
            "x" | "X" | "e" | "E" => Level::X,
            _ => return Err(bad()),
        };
        let n1 = parts[1].parse().map_err(|_| bad())?;
        let n2 = parts[2].parse().map_err(|_| bad())?;
        Ok(BasisState::new(level, n1, n2))
    }
}

/// All basis states with a given total excitation number.
///
/// Ordering: ground-level states by descending `n1`, then excited-level
/// states by descending `n1`. `|g, N, 0⟩` is always index 0.
#[derive(Debug, Clone)]
pub struct Manifold {
    n_total: usize,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl Manifold {
    pub fn enumerate(n_total: usize) -> Self {
        let ground = (0..=n_total).rev().map(|n1| BasisState::ground(n1, n_total - n1));
        let excited = (0..n_total).rev().map(|n1| BasisState::excited(n1, n_total - 1 - n1));
        let states: Vec<BasisState> = ground.chain(excited).collect();
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Manifold { n_total, states, index }
    }

    /// The manifold containing `state`.
    pub fn containing(state: &BasisState) -> Self {
        Self::enumerate(state.excitation())
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> Option<&BasisState> {
        self.states.get(index)
    }

    pub fn index_of(&self, state: &BasisState) -> Result<usize> {
        if state.excitation() != self.n_total {
            return Err(Error::StateNotInManifold {
                state: *state,
                found: state.excitation(),
                expected: self.n_total,
            });
        }
        // every state with the right excitation number is present
        Ok(self.index[state])
    }

    pub fn excited_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.states.iter().enumerate().filter(|(_, s)| s.is_excited()).map(|(i, _)| i)
    }

    pub fn ground_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.states.iter().enumerate().filter(|(_, s)| !s.is_excited()).map(|(i, _)| i)
    }
}

impl PartialEq for Manifold {
    fn eq(&self, other: &Self) -> bool {
        self.n_total == other.n_total
    }
}

pub fn enumerate_manifold(n_total: usize) -> Manifold {
    Manifold::enumerate(n_total)
}

pub fn state_index(m: &Manifold, s: &BasisState) -> Result<usize> {
    m.index_of(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn brute_force(n: usize) -> HashSet<BasisState> {
        let mut out = HashSet::new();
        for level in [Level::G, Level::X] {
            for n1 in 0..=n {
                for n2 in 0..=n {
                    let s = BasisState::new(level, n1, n2);
                    if s.excitation() == n {
                        out.insert(s);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn vacuum_manifold() {
        let m = enumerate_manifold(0);
        assert_eq!(m.states(), &[BasisState::ground(0, 0)]);
    }

    #[test]
    fn two_excitation_ordering() {
        let m = enumerate_manifold(2);
        assert_eq!(
            m.states(),
            &[
                BasisState::ground(2, 0),
                BasisState::ground(1, 1),
                BasisState::ground(0, 2),
                BasisState::excited(1, 0),
                BasisState::excited(0, 1),
            ]
        );
        assert_eq!(state_index(&m, &BasisState::ground(2, 0)).unwrap(), 0);
        assert_eq!(state_index(&m, &BasisState::excited(0, 1)).unwrap(), 4);
    }

    #[test]
    fn wrong_excitation_is_rejected() {
        let m = enumerate_manifold(2);
        let err = state_index(&m, &BasisState::ground(3, 0)).unwrap_err();
        assert!(matches!(err, Error::StateNotInManifold { found: 3, expected: 2, .. }));
    }

    #[test]
    fn counts_match_brute_force() {
        for n in 0..=12 {
            let m = enumerate_manifold(n);
            let expected = brute_force(n);
            let got: HashSet<_> = m.states().iter().copied().collect();
            assert_eq!(got.len(), m.dim(), "duplicates at n = {n}");
            assert_eq!(got, expected);
            if n >= 1 {
                assert_eq!(m.dim(), 2 * n + 1);
            }
        }
        assert_eq!(brute_force(10).len(), 21);
    }

    #[test]
    fn index_round_trip() {
        let m = enumerate_manifold(7);
        for (i, s) in m.states().iter().enumerate() {
            assert_eq!(m.index_of(s).unwrap(), i);
        }
    }

    #[test]
    fn parse_states() {
        assert_eq!("g,2,0".parse::<BasisState>().unwrap(), BasisState::ground(2, 0));
        assert_eq!("|x,0,1⟩".parse::<BasisState>().unwrap(), BasisState::excited(0, 1));
        assert!("q,1,1".parse::<BasisState>().is_err());
        assert!("g,1".parse::<BasisState>().is_err());
    }
}
