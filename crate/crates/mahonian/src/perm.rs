//! Permutations in one-line notation, words with distinct letters, inversion
//! counting, and lexicographic enumeration of symmetric groups.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A permutation of `{1, ..., n}` written in one-line notation.
///
/// Positions and values are 1-based throughout the public API; the 0-based
/// storage never leaks through an interface. The empty permutation (`n = 0`)
/// is legal and every statistic on it is zero.
///
/// ```
/// use mahonian::Permutation;
///
/// let p = Permutation::parse("8 3 6 2 9 5 4 1 7").unwrap();
/// assert_eq!(p.len(), 9);
/// assert_eq!(p.at(5), 9);
/// assert_eq!(p.to_string(), "836295417");
/// ```
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    word: Vec<u32>,
}

/// Output style for [`Permutation::format`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatStyle {
    /// Single digits juxtaposed, multi-digit values parenthesized: `9362(10)85417`.
    Compact,
    /// Space-separated values: `9 3 6 2 10 8 5 4 1 7`.
    Delimited,
}

impl Permutation {
    /// Validates that `word` is a permutation of `{1, ..., word.len()}`.
    pub fn new(word: Vec<u32>) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n];
        for &v in &word {
            if v == 0 || v as usize > n {
                return Err(Error::ValueOutOfRange { value: v, n });
            }
            if std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(Error::DuplicateValue { value: v });
            }
        }
        Ok(Self { word })
    }

    /// Wraps a word the caller has already proven valid.
    pub(crate) fn from_word_unchecked(word: Vec<u32>) -> Self {
        debug_assert!(Self::new(word.clone()).is_ok(), "invalid word {word:?}");
        Self { word }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            word: (1..=n as u32).collect(),
        }
    }

    pub fn empty() -> Self {
        Self { word: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Value at 1-based position `i`. Panics if `i` is out of `1..=n`.
    pub fn at(&self, i: usize) -> u32 {
        self.word[i - 1]
    }

    /// 1-based position of `value`, if present.
    pub fn position_of(&self, value: u32) -> Option<usize> {
        self.word.iter().position(|&v| v == value).map(|k| k + 1)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.word
    }

    pub fn into_word(self) -> Vec<u32> {
        self.word
    }

    /// Number of inversions, i.e. pairs `i < j` with `p_i > p_j`.
    pub fn inversions(&self) -> u64 {
        inversions(&self.word)
    }

    /// Parses a permutation from text.
    ///
    /// Accepts a whitespace- or comma-separated list of integers, or the
    /// compact juxtaposed style where values above 9 are parenthesized:
    /// `"9362(10)85417"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_values(text)?)
    }

    /// Renders the permutation; round-trips with [`Permutation::parse`].
    pub fn format(&self, style: FormatStyle) -> String {
        match style {
            FormatStyle::Compact => self
                .word
                .iter()
                .map(|&v| {
                    if v < 10 {
                        v.to_string()
                    } else {
                        format!("({v})")
                    }
                })
                .collect(),
            FormatStyle::Delimited => self
                .word
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format(FormatStyle::Compact))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({})", self.format(FormatStyle::Compact))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// Extracts the integer values of `text` without checking that they form a
/// permutation; intermediate words of the insertion maps use this too.
pub(crate) fn parse_values(text: &str) -> Result<Vec<u32>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    if t.contains(|c: char| c.is_whitespace() || c == ',') {
        parse_delimited(t)
    } else {
        parse_compact(t)
    }
}

fn parse_token(token: &str) -> Result<u32> {
    let inner = token
        .strip_prefix('(')
        .and_then(|rest| rest.strip_suffix(')'))
        .unwrap_or(token);
    if inner.is_empty() {
        return Err(Error::Parse {
            token: token.to_string(),
            reason: "empty token".to_string(),
        });
    }
    inner.parse::<u32>().map_err(|_| Error::Parse {
        token: token.to_string(),
        reason: "not a nonnegative integer".to_string(),
    })
}

fn parse_delimited(text: &str) -> Result<Vec<u32>> {
    let mut values = Vec::new();
    // Splitting on commas first keeps empty tokens such as "1,,2" visible.
    for group in text.split(',') {
        let group = group.trim();
        if group.is_empty() {
            return Err(Error::Parse {
                token: String::new(),
                reason: "empty token".to_string(),
            });
        }
        for token in group.split_whitespace() {
            values.push(parse_token(token)?);
        }
    }
    Ok(values)
}

fn parse_compact(text: &str) -> Result<Vec<u32>> {
    let mut values = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '0'..='9' => values.push(c.to_digit(10).unwrap()),
            '(' => {
                let mut digits = String::new();
                loop {
                    match chars.next() {
                        Some(')') => break,
                        Some(d) if d.is_ascii_digit() => digits.push(d),
                        _ => {
                            return Err(Error::Parse {
                                token: format!("({digits}"),
                                reason: "unterminated parenthesized value".to_string(),
                            })
                        }
                    }
                }
                values.push(parse_token(&digits)?);
            }
            other => {
                return Err(Error::Parse {
                    token: other.to_string(),
                    reason: "unexpected character".to_string(),
                })
            }
        }
    }
    Ok(values)
}

/// A word over the positive integers with pairwise distinct letters, such as
/// the excedance subword of a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    /// Parses a word in the same text forms as [`Permutation::parse`],
    /// requiring only distinct positive letters.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_values(text)?)
    }

    pub fn new(letters: Vec<u32>) -> Result<Self> {
        let mut sorted = letters.clone();
        sorted.sort_unstable();
        if sorted.first() == Some(&0) {
            return Err(Error::ZeroLetter);
        }
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateValue { value: pair[0] });
            }
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn inversions(&self) -> u64 {
        inversions(&self.letters)
    }
}

/// Number of pairs `i < j` with `letters[i] > letters[j]`, by merge counting.
///
/// The quadratic double loop is kept in the test suite as the oracle for this
/// implementation.
///
/// ```
/// use mahonian::perm::inversions;
///
/// assert_eq!(inversions(&[1, 2, 3]), 0);
/// assert_eq!(inversions(&[8, 6, 9]), 1);
/// assert_eq!(inversions(&[3, 2, 5, 4, 1, 7]), 6);
/// ```
pub fn inversions(letters: &[u32]) -> u64 {
    let mut work = letters.to_vec();
    let mut buf = work.clone();
    merge_count(&mut work, &mut buf)
}

fn merge_count(a: &mut [u32], buf: &mut [u32]) -> u64 {
    let n = a.len();
    if n <= 1 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (left, right) = a.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if a[i] <= a[j] {
            buf[k] = a[i];
            i += 1;
        } else {
            buf[k] = a[j];
            j += 1;
            inv += (mid - i) as u64;
        }
        k += 1;
    }
    buf[k..k + (mid - i)].copy_from_slice(&a[i..mid]);
    buf[k + (mid - i)..n].copy_from_slice(&a[j..n]);
    a.copy_from_slice(&buf[..n]);
    inv
}

/// `n!` as a `u128`; exact for `n <= 34`.
pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Iterator over all of `S_n` in lexicographic order, successor-based.
pub struct LexPermutations {
    next: Option<Vec<u32>>,
}

/// All permutations of `{1, ..., n}` in lexicographic order.
pub fn all_permutations(n: usize) -> LexPermutations {
    LexPermutations {
        next: Some((1..=n as u32).collect()),
    }
}

/// Iterator over `count` consecutive permutations of `S_n` starting at
/// lexicographic rank `start`. Used to partition enumeration across workers.
pub fn permutation_range(n: usize, start: u128, count: u128) -> impl Iterator<Item = Permutation> {
    let mut iter = LexPermutations {
        next: Some(nth_permutation(n, start).into_word()),
    };
    (0..count).map_while(move |_| iter.next())
}

impl Iterator for LexPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if advance_lex(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation::from_word_unchecked(current))
    }
}

fn advance_lex(w: &mut [u32]) -> bool {
    if w.len() < 2 {
        return false;
    }
    let mut i = w.len() - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = w.len() - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

/// The permutation of `{1, ..., n}` with lexicographic rank `rank` (0-based).
pub fn nth_permutation(n: usize, mut rank: u128) -> Permutation {
    assert!(rank < factorial(n), "rank {rank} out of range for S_{n}");
    let mut avail: Vec<u32> = (1..=n as u32).collect();
    let mut word = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let f = factorial(k);
        let idx = (rank / f) as usize;
        rank %= f;
        word.push(avail.remove(idx));
    }
    Permutation::from_word_unchecked(word)
}

/// Lexicographic rank of `p` within `S_n` (0-based); inverse of
/// [`nth_permutation`].
pub fn lex_rank(p: &Permutation) -> u128 {
    let w = p.as_slice();
    let n = w.len();
    let mut rank = 0u128;
    for i in 0..n {
        let smaller = w[i + 1..].iter().filter(|&&v| v < w[i]).count() as u128;
        rank += smaller * factorial(n - 1 - i);
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inversions_oracle(w: &[u32]) -> u64 {
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversions(&[]), 0);
        assert_eq!(inversions(&[1, 2, 3]), 0);
        assert_eq!(inversions(&[8, 6, 9]), 1);
        assert_eq!(inversions(&[3, 2, 5, 4, 1, 7]), 6);
    }

    #[test]
    fn inversion_extremes() {
        for n in 0..=12u32 {
            let id: Vec<u32> = (1..=n).collect();
            let rev: Vec<u32> = (1..=n).rev().collect();
            assert_eq!(inversions(&id), 0);
            assert_eq!(inversions(&rev), u64::from(n * (n.max(1) - 1) / 2));
        }
    }

    #[test]
    fn inversions_match_double_loop_exhaustively() {
        for n in 0..=8 {
            for p in all_permutations(n) {
                assert_eq!(p.inversions(), inversions_oracle(p.as_slice()));
            }
        }
    }

    #[test]
    fn parse_text_forms() {
        let p = Permutation::parse("8 3 6 2 9 5 4 1 7").unwrap();
        assert_eq!(p.as_slice(), &[8, 3, 6, 2, 9, 5, 4, 1, 7]);
        let q = Permutation::parse("9362(10)85417").unwrap();
        assert_eq!(q.as_slice(), &[9, 3, 6, 2, 10, 8, 5, 4, 1, 7]);
        let r = Permutation::parse("9,3,6,2,(10),8,5,4,1,7").unwrap();
        assert_eq!(q, r);
        assert_eq!(Permutation::parse("1").unwrap().as_slice(), &[1]);
        assert_eq!(Permutation::parse("").unwrap(), Permutation::empty());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            Permutation::parse("2 2"),
            Err(Error::DuplicateValue { value: 2 })
        );
        assert_eq!(
            Permutation::parse("1 7"),
            Err(Error::ValueOutOfRange { value: 7, n: 2 })
        );
        assert!(matches!(
            Permutation::parse("1,,2"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Permutation::parse("12x"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Permutation::parse("(10"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn format_styles() {
        let p = Permutation::new(vec![9, 3, 6, 2, 10, 8, 5, 4, 1, 7]).unwrap();
        assert_eq!(p.format(FormatStyle::Compact), "9362(10)85417");
        let q = Permutation::identity(3);
        assert_eq!(q.format(FormatStyle::Compact), "123");
        assert_eq!(q.format(FormatStyle::Delimited), "1 2 3");
    }

    #[test]
    fn word_validation() {
        assert!(Word::new(vec![8, 6, 9]).is_ok());
        assert_eq!(
            Word::new(vec![3, 3]),
            Err(Error::DuplicateValue { value: 3 })
        );
        assert_eq!(Word::new(vec![0, 1]), Err(Error::ZeroLetter));
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        for n in 0..=6 {
            let all: Vec<Permutation> = all_permutations(n).collect();
            assert_eq!(all.len() as u128, factorial(n));
            for pair in all.windows(2) {
                assert!(pair[0] < pair[1]);
            }
            for (rank, p) in all.iter().enumerate() {
                assert_eq!(&nth_permutation(n, rank as u128), p);
                assert_eq!(lex_rank(p), rank as u128);
            }
        }
    }

    #[test]
    fn permutation_ranges_partition_the_group() {
        let n = 5;
        let total = factorial(n);
        let mut collected = Vec::new();
        for start in (0..total).step_by(17) {
            let count = 17u128.min(total - start);
            collected.extend(permutation_range(n, start, count));
        }
        let all: Vec<Permutation> = all_permutations(n).collect();
        assert_eq!(collected, all);
    }
}
