//! Words in the free semigroup on `n` generators.
//!
//! Letters are 1-based. The basis order of every truncated Fock space is
//! graded lexicographic: shorter words first, then letter-lex.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<usize>,
    alphabet: usize,
}

impl Word {
    pub fn new(letters: Vec<usize>, alphabet: usize) -> Result<Self> {
        for &l in &letters {
            if l == 0 || l > alphabet {
                return Err(Error::BadLetter { letter: l, n: alphabet });
            }
        }
        Ok(Word { letters, alphabet })
    }

    pub fn empty(alphabet: usize) -> Self {
        Word { letters: Vec::new(), alphabet }
    }

    pub fn letter(i: usize, alphabet: usize) -> Result<Self> {
        Word::new(vec![i], alphabet)
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.alphabet, other.alphabet, "alphabet mismatch");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters, alphabet: self.alphabet }
    }

    /// Position in the graded-lex basis of any truncation containing it.
    pub fn index(&self) -> usize {
        let n = self.alphabet;
        let m = self.letters.len();
        let offset: usize = (0..m).map(|j| n.pow(j as u32)).sum();
        let within = self.letters.iter().fold(0usize, |acc, &l| acc * n + (l - 1));
        offset + within
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.alphabet, self.letters.len(), &self.letters).cmp(&(
            other.alphabet,
            other.letters.len(),
            &other.letters,
        ))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "g{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.letters.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Number of words of length ≤ d.
pub fn word_count(n: usize, d: usize) -> usize {
    (0..=d).map(|m| n.pow(m as u32)).sum()
}

/// All words of length ≤ d in graded-lex order.
pub fn enumerate_words(n: usize, d: usize) -> Vec<Word> {
    assert!(n >= 1, "alphabet must be nonempty");
    let mut out = vec![Word::empty(n)];
    let mut layer = vec![Word::empty(n)];
    for _ in 0..d {
        let mut next = Vec::with_capacity(layer.len() * n);
        for w in &layer {
            for l in 1..=n {
                let mut letters = w.letters.clone();
                letters.push(l);
                next.push(Word { letters, alphabet: n });
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Reversal `α ↦ α^t`.
pub fn flip(w: &Word) -> Word {
    let mut letters = w.letters.clone();
    letters.reverse();
    Word { letters, alphabet: w.alphabet }
}

/// Letter counts `σ(α)`.
pub fn symmetrize(w: &Word) -> MultiIndex {
    let mut m = vec![0; w.alphabet];
    for &l in &w.letters {
        m[l - 1] += 1;
    }
    MultiIndex(m)
}

/// `|m|! / (m_1! ⋯ m_n!)`, built as a product of binomials.
pub fn multinomial_count(m: &MultiIndex) -> Result<u64> {
    let mut acc: u64 = 1;
    let mut total: u64 = 0;
    for &k in &m.0 {
        for j in 1..=k as u64 {
            total += 1;
            // acc * total / j stays integral at each step
            let g = gcd(acc, j);
            let (a, jj) = (acc / g, j / g);
            let t = total / jj;
            acc = a.checked_mul(t).ok_or(Error::Overflow)?;
        }
    }
    Ok(acc)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Canonical word with the given letter counts (letters in increasing order).
pub fn sorted_word(m: &MultiIndex) -> Word {
    let mut letters = Vec::with_capacity(m.total());
    for (i, &k) in m.0.iter().enumerate() {
        letters.extend(std::iter::repeat(i + 1).take(k));
    }
    Word { letters, alphabet: m.0.len() }
}
