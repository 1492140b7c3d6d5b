use std::collections::HashMap;

use super::infword::InfWord;

/// How many F_∞ generators may appear.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenCount {
    Finite(u32),
    /// Unbounded index; the radius alone caps it at `(R - 1) / 2`.
    Infinite,
}

impl GenCount {
    fn allows(self, index: u32) -> bool {
        match self {
            GenCount::Finite(m) => index < m,
            GenCount::Infinite => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BallEntry {
    pub word: InfWord,
    /// Embedded length `‖g‖` in F₂.
    pub length: u32,
    /// Position of `word` with its last letter removed.
    pub parent: Option<usize>,
    /// The removed letter as `(index, sign)`.
    pub last: Option<(u32, i32)>,
}

/// Every element of embedded length at most `radius`, in length-lexicographic order.
#[derive(Clone, Debug)]
pub struct Ball {
    gens: GenCount,
    radius: u32,
    entries: Vec<BallEntry>,
}

impl Ball {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn gens(&self) -> GenCount {
        self.gens
    }

    pub fn entries(&self) -> &[BallEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&InfWord, u32)> {
        self.entries.iter().map(|e| (&e.word, e.length))
    }

    /// Number of entries with length `<= r`; entries are sorted so these form a prefix.
    pub fn prefix_len(&self, r: u32) -> usize {
        self.entries.partition_point(|e| e.length <= r)
    }

    /// Counts per exact length `0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.radius as usize + 1];
        for e in &self.entries {
            sizes[e.length as usize] += 1;
        }
        sizes
    }
}

/// Enumerates reduced F_∞ words over the allowed generators with embedded
/// length `<= radius`, each exactly once, identity first.
///
/// Generation runs over syllable sequences using the closed length formula:
/// appending `x_j^e` after a syllable with index `i` adds `|j - i| + |e|`
/// before the closing `t`-run of length `j`, so partial cost plus the current
/// closing run never decreases and prunes the search.
pub fn enumerate_ball(gens: GenCount, radius: u32) -> Ball {
    let mut words: Vec<(InfWord, u32)> = vec![(InfWord::identity(), 0)];
    let max_index = radius.saturating_sub(1) / 2;
    let mut stack: Vec<(u32, i32)> = Vec::new();
    for first in 0..=max_index {
        if !gens.allows(first) {
            break;
        }
        extend(&mut stack, first, first, None, radius, gens, &mut words);
    }
    words.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));

    let position: HashMap<InfWord, usize> =
        words.iter().enumerate().map(|(k, (w, _))| (w.clone(), k)).collect();
    let entries = words
        .into_iter()
        .map(|(word, length)| {
            let (parent, last) = match word.split_last() {
                Some((p, l)) => (Some(position[&p]), Some(l)),
                None => (None, None),
            };
            BallEntry { word, length, parent, last }
        })
        .collect();
    Ball { gens, radius, entries }
}

// `partial` is i₁ + Σ|Δi| + Σ|e| over the syllables already on the stack.
fn extend(
    stack: &mut Vec<(u32, i32)>,
    index: u32,
    partial: u32,
    prev: Option<u32>,
    radius: u32,
    gens: GenCount,
    out: &mut Vec<(InfWord, u32)>,
) {
    let base = partial + prev.map_or(0, |p| p.abs_diff(index));
    let mut e: u32 = 1;
    while base + e + index <= radius {
        for sign in [1i32, -1] {
            let exponent = sign * e as i32;
            stack.push((index, exponent));
            let cost = base + e;
            out.push((InfWord::from_syllables(stack.iter().copied()), cost + index));
            let max_next = radius.saturating_sub(cost);
            for next in 0..=max_next {
                if next == index {
                    continue;
                }
                if !gens.allows(next) {
                    break;
                }
                if cost + next.abs_diff(index) + 1 + next <= radius {
                    extend(stack, next, cost, Some(index), radius, gens, out);
                }
            }
            stack.pop();
        }
        e += 1;
    }
}
