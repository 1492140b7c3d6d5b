use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::word::{Letter, ReducedWord};

/// A power `xᵢ^e` with `e ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub index: u32,
    pub exponent: i32,
}

/// A freely reduced word in F_∞ stored as syllables; adjacent syllables
/// always carry distinct generator indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InfWord {
    syllables: Vec<Syllable>,
}

impl InfWord {
    pub fn identity() -> Self {
        InfWord::default()
    }

    pub fn generator(index: u32) -> Self {
        InfWord { syllables: vec![Syllable { index, exponent: 1 }] }
    }

    pub fn power(index: u32, exponent: i32) -> Self {
        InfWord::from_syllables([(index, exponent)])
    }

    /// Normalizes arbitrary `(index, exponent)` pairs: merges equal neighbours,
    /// drops zero exponents, cascading as needed.
    pub fn from_syllables(parts: impl IntoIterator<Item = (u32, i32)>) -> Self {
        let mut out: Vec<Syllable> = Vec::new();
        for (index, exponent) in parts {
            if exponent == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.index == index => {
                    last.exponent += exponent;
                    if last.exponent == 0 {
                        out.pop();
                    }
                }
                _ => out.push(Syllable { index, exponent }),
            }
        }
        InfWord { syllables: out }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Number of letters `k` once syllables are expanded.
    pub fn letter_count(&self) -> u32 {
        self.syllables.iter().map(|s| s.exponent.unsigned_abs()).sum()
    }

    pub fn max_index(&self) -> Option<u32> {
        self.syllables.iter().map(|s| s.index).max()
    }

    /// Expanded letters `(index, sign)` with sign `+1` or `-1`, left to right.
    pub fn letters(&self) -> impl Iterator<Item = (u32, i32)> + '_ {
        self.syllables.iter().flat_map(|s| {
            std::iter::repeat_n((s.index, s.exponent.signum()), s.exponent.unsigned_abs() as usize)
        })
    }

    pub fn multiply(&self, other: &InfWord) -> InfWord {
        InfWord::from_syllables(
            self.syllables.iter().chain(other.syllables.iter()).map(|s| (s.index, s.exponent)),
        )
    }

    pub fn inverse(&self) -> InfWord {
        InfWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { index: s.index, exponent: -s.exponent })
                .collect(),
        }
    }

    /// The word with its last letter removed, together with that letter.
    pub fn split_last(&self) -> Option<(InfWord, (u32, i32))> {
        let last = *self.syllables.last()?;
        let mut syllables = self.syllables.clone();
        let sign = last.exponent.signum();
        if last.exponent.abs() == 1 {
            syllables.pop();
        } else {
            syllables.last_mut().unwrap().exponent -= sign;
        }
        Some((InfWord { syllables }, (last.index, sign)))
    }

    /// `‖embed(w)‖ = i₁ + i_k + Σ|i_j − i_{j−1}| + k`, computed on syllables.
    pub fn embedded_length(&self) -> u32 {
        let (Some(first), Some(last)) = (self.syllables.first(), self.syllables.last()) else {
            return 0;
        };
        let jumps: u32 = self.syllables.windows(2).map(|p| p[0].index.abs_diff(p[1].index)).sum();
        first.index + last.index + jumps + self.letter_count()
    }

    /// The image under `xᵢ ↦ tⁱ x t⁻ⁱ`, freely reduced.
    pub fn higman_embed(&self) -> ReducedWord {
        ReducedWord::reduce(self.letters().flat_map(|(i, sign)| {
            let x = if sign > 0 { Letter::X } else { Letter::X_INV };
            std::iter::repeat_n(Letter::T, i as usize)
                .chain(std::iter::once(x))
                .chain(std::iter::repeat_n(Letter::T_INV, i as usize))
        }))
    }

    pub fn to_pairs(&self) -> Vec<[i64; 2]> {
        self.syllables.iter().map(|s| [s.index as i64, s.exponent as i64]).collect()
    }
}

impl fmt::Display for InfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "1");
        }
        for (k, s) in self.syllables.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if s.exponent == 1 {
                write!(f, "x{}", s.index)?;
            } else {
                write!(f, "x{}^{}", s.index, s.exponent)?;
            }
        }
        Ok(())
    }
}

impl Serialize for InfWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InfWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let pairs: Vec<(u32, i32)> = Vec::deserialize(deserializer)?;
        Ok(InfWord::from_syllables(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_examples() {
        let x2 = InfWord::generator(2);
        assert_eq!(x2.higman_embed().to_string(), "ttxTT");
        assert_eq!(x2.embedded_length(), 5);

        let x0x1 = InfWord::from_syllables([(0, 1), (1, 1)]);
        assert_eq!(x0x1.higman_embed().to_string(), "xtxT");
        assert_eq!(x0x1.embedded_length(), 4);

        let x1x1 = InfWord::from_syllables([(1, 1), (1, 1)]);
        assert_eq!(x1x1.syllables(), &[Syllable { index: 1, exponent: 2 }]);
        assert_eq!(x1x1.higman_embed().to_string(), "txxT");
        assert_eq!(x1x1.embedded_length(), 4);
    }

    #[test]
    fn normalization_cascades() {
        let w = InfWord::from_syllables([(0, 1), (1, 2), (1, -2), (0, -1), (2, 1)]);
        assert_eq!(w, InfWord::generator(2));
        let g = InfWord::from_syllables([(0, 2), (3, -1)]);
        assert!(g.multiply(&g.inverse()).is_identity());
    }

    #[test]
    fn split_last_letter() {
        let w = InfWord::from_syllables([(1, 1), (0, -2)]);
        let (p, l) = w.split_last().unwrap();
        assert_eq!(p, InfWord::from_syllables([(1, 1), (0, -1)]));
        assert_eq!(l, (0, -1));
        assert!(InfWord::identity().split_last().is_none());
    }

    #[test]
    fn serde_as_pairs() {
        let w = InfWord::from_syllables([(1, 2), (0, -1)]);
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, "[[1,2],[0,-1]]");
        let back: InfWord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }
}
