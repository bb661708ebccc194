//! Polynomials in trace words: sums of terms `c * tr(w_1) * ... * tr(w_k)`
//! with each `w_i` a word over {X, Y}.
//!
//! Words are kept cyclic-minimal and factor lists sorted, so equal
//! Hamiltonians have equal representations. The empty word stands for
//! `tr(I) = n`; it shows up when Poisson brackets contract length-one words
//! and keeps the algebra closed without fixing a matrix size.
//!
//! The Poisson bracket here is the necklace bracket
//! `{H1, H2} = tr(grad_Y H1 . grad_X H2 - grad_X H1 . grad_Y H2)`,
//! the sign convention pinned by the library's convention tests.

use serde::{Deserialize, Serialize};

use crate::matrix::{C64, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
}

pub type Word = Vec<Letter>;

/// Lexicographically minimal cyclic rotation (empty and length-1 words are fixed).
fn cyclic_minimal(w: &[Letter]) -> Word {
    if w.len() <= 1 {
        return w.to_vec();
    }
    let mut best = w.to_vec();
    for shift in 1..w.len() {
        let rotated: Word = w[shift..].iter().chain(&w[..shift]).copied().collect();
        if rotated < best {
            best = rotated;
        }
    }
    best
}

fn word_string(w: &[Letter]) -> String {
    w.iter()
        .map(|l| match l {
            Letter::X => 'X',
            Letter::Y => 'Y',
        })
        .collect()
}

pub fn word_from_str(s: &str) -> Option<Word> {
    s.chars()
        .map(|c| match c {
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            _ => None,
        })
        .collect()
}

/// One additive term: `coeff * prod_i tr(factors[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub factors: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TracePolynomial {
    pub terms: Vec<Term>,
}

impl TracePolynomial {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `c * tr(word)`.
    pub fn monomial(coeff: C64, word: Word) -> Self {
        Self {
            terms: vec![Term {
                coeff,
                factors: vec![word],
            }],
        }
        .canonical()
    }

    /// `c * tr(w1) * tr(w2)`.
    pub fn product(coeff: C64, w1: Word, w2: Word) -> Self {
        Self {
            terms: vec![Term {
                coeff,
                factors: vec![w1, w2],
            }],
        }
        .canonical()
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        Self { terms }.canonical()
    }

    /// `tr X^j Y^k` for the embedding coordinates.
    pub fn power_monomial(j: usize, k: usize) -> Self {
        let mut w = vec![Letter::X; j];
        w.extend(std::iter::repeat(Letter::Y).take(k));
        Self::monomial(C64::new(1.0, 0.0), w)
    }

    /// Rotates every word to its minimal representative, sorts factor lists
    /// and terms, merges duplicates, drops exact zeros.
    pub fn canonical(mut self) -> Self {
        for t in &mut self.terms {
            for w in &mut t.factors {
                *w = cyclic_minimal(w);
            }
            t.factors.sort();
        }
        self.terms.sort_by(|a, b| a.factors.cmp(&b.factors));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match merged.last_mut() {
                Some(last) if last.factors == t.factors => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() > 0.0);
        Self { terms: merged }
    }

    /// Drops terms with coefficients below `rel` times the largest one.
    pub fn pruned(mut self, rel: f64) -> Self {
        let max = self
            .terms
            .iter()
            .map(|t| t.coeff.norm())
            .fold(0.0, f64::max);
        if max > 0.0 {
            self.terms.retain(|t| t.coeff.norm() > rel * max);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }.canonical()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * c,
                    factors: t.factors.clone(),
                })
                .collect(),
        }
        .canonical()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total word length over terms.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.factors.iter().map(Vec::len).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Largest imaginary part over coefficients; zero means the Hamiltonian is
    /// compatible with the real form.
    pub fn max_imag_coeff(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.im.abs())
            .fold(0.0, f64::max)
    }

    /// `Some(c)` when `other == c * self` termwise within `rel_tol`.
    pub fn proportional_to(&self, other: &Self, rel_tol: f64) -> Option<C64> {
        if self.terms.len() != other.terms.len() || self.terms.is_empty() {
            return None;
        }
        let c = other.terms[0].coeff / self.terms[0].coeff;
        for (a, b) in self.terms.iter().zip(&other.terms) {
            if a.factors != b.factors {
                return None;
            }
            if (a.coeff * c - b.coeff).norm() > rel_tol * (1.0 + b.coeff.norm()) {
                return None;
            }
        }
        Some(c)
    }

    /// Value at a matrix pair.
    pub fn evaluate(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
        self.terms
            .iter()
            .map(|t| {
                let mut val = t.coeff;
                for w in &t.factors {
                    val *= trace_of_word(w, x, y);
                }
                val
            })
            .sum()
    }

    /// Analytic cyclic gradient: `(grad_X, grad_Y)` with the pairing
    /// `dH(E, F) = tr(grad_X . E + grad_Y . F)`.
    pub fn cyclic_gradient(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
        let n = x.size();
        let mut gx = ComplexMatrix::zeros(n);
        let mut gy = ComplexMatrix::zeros(n);
        for t in &self.terms {
            // trace values of every factor, reused for the product rule
            let traces: Vec<C64> = t.factors.iter().map(|w| trace_of_word(w, x, y)).collect();
            for (i, w) in t.factors.iter().enumerate() {
                if w.is_empty() {
                    continue;
                }
                let mut scale = t.coeff;
                for (j, tr) in traces.iter().enumerate() {
                    if j != i {
                        scale *= *tr;
                    }
                }
                if scale.norm() == 0.0 {
                    continue;
                }
                accumulate_word_gradient(w, x, y, scale, &mut gx, &mut gy);
            }
        }
        (gx, gy)
    }

    /// The necklace Poisson bracket, computed symbolically.
    ///
    /// Contracting two length-one words produces the empty word `tr(I)`.
    pub fn poisson_bracket(&self, other: &Self) -> Self {
        let mut terms: Vec<Term> = Vec::new();
        for s in &self.terms {
            for t in &other.terms {
                bracket_terms(s, t, &mut terms);
            }
        }
        Self { terms }.canonical()
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let re = t.coeff.re;
            let neg = re < 0.0 && t.coeff.im == 0.0;
            if i > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let mag = if t.coeff.im == 0.0 {
                format!("{}", re.abs())
            } else {
                format!("({}+{}i)", re, t.coeff.im)
            };
            out.push_str(&mag);
            for w in &t.factors {
                if w.is_empty() {
                    out.push_str("*tr(I)");
                } else {
                    out.push_str(&format!("*tr({})", word_string(w)));
                }
            }
        }
        out
    }
}

/// `tr(w)` at (X, Y); the empty word contributes `tr(I) = n`.
pub fn trace_of_word(w: &[Letter], x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
    let n = x.size();
    if w.is_empty() {
        return C64::new(n as f64, 0.0);
    }
    let mut prod = letter_matrix(w[0], x, y).clone();
    for &l in &w[1..] {
        prod = prod.mul(letter_matrix(l, x, y));
    }
    prod.trace()
}

fn letter_matrix<'a>(l: Letter, x: &'a ComplexMatrix, y: &'a ComplexMatrix) -> &'a ComplexMatrix {
    match l {
        Letter::X => x,
        Letter::Y => y,
    }
}

/// Adds `scale * grad tr(w)` into (gx, gy) using prefix/suffix products:
/// the derivative of `tr(w)` against the letter at position i is the product
/// of the word rotated to start right after i.
fn accumulate_word_gradient(
    w: &[Letter],
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    scale: C64,
    gx: &mut ComplexMatrix,
    gy: &mut ComplexMatrix,
) {
    let m = w.len();
    let n = x.size();
    // prefix[i] = w[0..i], suffix[i] = w[i..m]
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(ComplexMatrix::identity(n));
    for i in 0..m {
        prefix.push(prefix[i].mul(letter_matrix(w[i], x, y)));
    }
    let mut suffix = vec![ComplexMatrix::identity(n); m + 1];
    for i in (0..m).rev() {
        suffix[i] = letter_matrix(w[i], x, y).mul(&suffix[i + 1]);
    }
    for i in 0..m {
        let rot = suffix[i + 1].mul(&prefix[i]).scale(scale);
        match w[i] {
            Letter::X => *gx = gx.add(&rot),
            Letter::Y => *gy = gy.add(&rot),
        }
    }
}

/// Rotation of `w` that removes position `i`: `w[i+1..] ++ w[..i]`.
fn rotation_without(w: &[Letter], i: usize) -> Word {
    w[i + 1..].iter().chain(&w[..i]).copied().collect()
}

/// Bracket of two single terms by the Leibniz rule over factors and the
/// necklace contraction over letter positions.
fn bracket_terms(s: &Term, t: &Term, out: &mut Vec<Term>) {
    let coeff = s.coeff * t.coeff;
    for (i, u) in s.factors.iter().enumerate() {
        for (j, v) in t.factors.iter().enumerate() {
            // spectator factors from both terms
            let mut spectators: Vec<Word> = Vec::with_capacity(s.factors.len() + t.factors.len() - 2);
            for (k, w) in s.factors.iter().enumerate() {
                if k != i {
                    spectators.push(w.clone());
                }
            }
            for (k, w) in t.factors.iter().enumerate() {
                if k != j {
                    spectators.push(w.clone());
                }
            }
            // + sum over (Y in u, X in v), - sum over (X in u, Y in v)
            for (p, &lu) in u.iter().enumerate() {
                for (q, &lv) in v.iter().enumerate() {
                    let sign = match (lu, lv) {
                        (Letter::Y, Letter::X) => 1.0,
                        (Letter::X, Letter::Y) => -1.0,
                        _ => continue,
                    };
                    let mut word = rotation_without(u, p);
                    word.extend(rotation_without(v, q));
                    let mut factors = spectators.clone();
                    factors.push(word);
                    out.push(Term {
                        coeff: coeff * sign,
                        factors,
                    });
                }
            }
        }
    }
}
