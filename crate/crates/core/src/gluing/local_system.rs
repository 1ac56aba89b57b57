use serde::{Deserialize, Serialize};

use crate::exact::LaurentMatrix;

/// Sign local system on the punctured double cover, recorded through the
/// standard two-chart cover of the punctured base (delete one ray for each
/// chart) pulled back to the cover's sheets. Each chart preimage splits into
/// a `+` and a `-` component, and the four overlap components carry the
/// transition signs, ordered
///
/// ```text
/// (V1+ n V2+), (V1+ n V2-), (V1- n V2+), (V1- n V2-)
/// ```
///
/// One revolution around the puncture downstairs crosses two overlap
/// regions; read in the `+` trivializations those are the first and second
/// components, so the holonomy is the product of their signs. For a
/// holonomy `-1` system the sheet handoff over the mixed region contributes
/// a quarter-turn to the rank-2 pushforward; the orientation of that turn
/// (which mixed component carries the `+ -> -` slot) is a declared
/// convention, pinned by the gluing tests.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalSystem {
    pub signs: [i8; 4],
}

impl LocalSystem {
    /// Holonomy -1 system with signs `1, -1, -1, 1`.
    pub fn standard() -> Self {
        LocalSystem {
            signs: [1, -1, -1, 1],
        }
    }

    /// The same system with every sign flipped; the pushforward changes by
    /// an overall sign, which cancels in every gluing identity.
    pub fn sign_flipped() -> Self {
        LocalSystem {
            signs: [-1, 1, 1, -1],
        }
    }

    /// Trivial system: all transitions +1, holonomy +1.
    pub fn trivial() -> Self {
        LocalSystem { signs: [1, 1, 1, 1] }
    }

    /// Product of the transition signs met once around the puncture.
    pub fn holonomy(&self) -> i8 {
        self.signs[0] * self.signs[1]
    }

    /// Rank-2 twist contributed by the pushforward at the mixed-region
    /// chart handoff, relative to the sheet bookkeeping already carried by
    /// the semi-flat pairings: a quarter-turn for holonomy -1, nothing for
    /// holonomy +1.
    pub fn twist_insertion(&self, nvars: usize) -> LaurentMatrix {
        if self.holonomy() == 1 {
            LaurentMatrix::identity(nvars, 2)
        } else {
            let s_pm = i64::from(self.signs[1]);
            let s_mp = i64::from(self.signs[2]);
            LaurentMatrix::from_ints(nvars, [[0, s_pm], [-s_mp, 0]])
        }
    }

    /// Net monodromy of the rank-2 pushforward around the puncture: the
    /// mixed-region twist composed with the diagonal of the same-sheet
    /// signs. Squares to minus the identity exactly when the holonomy is -1.
    pub fn pushforward_monodromy(&self, nvars: usize) -> LaurentMatrix {
        let diag = LaurentMatrix::from_ints(
            nvars,
            [[i64::from(self.signs[0]), 0], [0, i64::from(self.signs[3])]],
        );
        self.twist_insertion(nvars).mul(&diag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holonomies() {
        assert_eq!(LocalSystem::standard().holonomy(), -1);
        assert_eq!(LocalSystem::sign_flipped().holonomy(), -1);
        assert_eq!(LocalSystem::trivial().holonomy(), 1);
    }

    #[test]
    fn standard_twist_is_the_quarter_turn() {
        let j = LocalSystem::standard().twist_insertion(2);
        assert_eq!(j, LaurentMatrix::from_ints(2, [[0, -1], [1, 0]]));
        let flipped = LocalSystem::sign_flipped().twist_insertion(2);
        assert_eq!(flipped, LaurentMatrix::from_ints(2, [[0, 1], [-1, 0]]));
        assert!(LocalSystem::trivial().twist_insertion(2).is_identity());
    }

    #[test]
    fn pushforward_monodromy_squares_to_minus_identity() {
        for ls in [LocalSystem::standard(), LocalSystem::sign_flipped()] {
            let m = ls.pushforward_monodromy(2);
            let mm = m.mul(&m);
            assert_eq!(mm, LaurentMatrix::from_ints(2, [[-1, 0], [0, -1]]));
        }
    }
}
