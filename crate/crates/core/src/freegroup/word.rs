use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    X,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: Gen,
    pub inverse: bool,
}

impl Letter {
    pub const X: Letter = Letter { gen: Gen::X, inverse: false };
    pub const X_INV: Letter = Letter { gen: Gen::X, inverse: true };
    pub const T: Letter = Letter { gen: Gen::T, inverse: false };
    pub const T_INV: Letter = Letter { gen: Gen::T, inverse: true };

    pub fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }

    pub fn to_char(self) -> char {
        match (self.gen, self.inverse) {
            (Gen::X, false) => 'x',
            (Gen::X, true) => 'X',
            (Gen::T, false) => 't',
            (Gen::T, true) => 'T',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'x' => Some(Letter::X),
            'X' => Some(Letter::X_INV),
            't' => Some(Letter::T),
            'T' => Some(Letter::T_INV),
            _ => None,
        }
    }
}

/// A freely reduced word in F₂; its length is the word metric `‖·‖`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord::default()
    }

    /// Free reduction with a stack; the result is the unique reduced form.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            match stack.last() {
                Some(&top) if top.cancels(l) => {
                    stack.pop();
                }
                _ => stack.push(l),
            }
        }
        ReducedWord { letters: stack }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Word length `‖w‖`.
    pub fn word_length(&self) -> usize {
        self.letters.len()
    }

    pub fn multiply(&self, other: &ReducedWord) -> ReducedWord {
        // only the junction can cancel
        let mut letters = self.letters.clone();
        let mut rest = other.letters.iter().copied().peekable();
        while let (Some(&a), Some(&b)) = (letters.last(), rest.peek()) {
            if a.cancels(b) {
                letters.pop();
                rest.next();
            } else {
                break;
            }
        }
        letters.extend(rest);
        ReducedWord { letters }
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn pow(&self, n: i32) -> ReducedWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(ReducedWord::identity(), |acc, _| acc.multiply(&base))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = Error;

    /// Parses a string over `{x, X, t, T}` and reduces it.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters: Option<Vec<Letter>> = s.chars().map(Letter::from_char).collect();
        letters.map(ReducedWord::reduce).ok_or_else(|| Error::MalformedWord(s.to_string()))
    }
}
