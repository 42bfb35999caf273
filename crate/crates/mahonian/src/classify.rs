//! Grande-fixed places and the four-way classification of a symmetric group
//! into the codomains of the insertion maps.

use crate::perm::Permutation;
use crate::stats::{exc_letters, is_exc_place};
use crate::{Error, Result};

/// Where a permutation lands relative to the gap/level classification at
/// parameters `(g, ell)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassMembership {
    /// No level-`g+ell` grande-fixed place at or right of position `ell`, and
    /// the letter at position `ell` is at least `g + ell`.
    S1,
    /// As above but with a small letter at `ell`, and the descent chain from
    /// position `ell` back to the largest excedance letter stays tame.
    S2Proper,
    /// Same membership as `S2Proper` but the chain carries a witness letter
    /// that is both at least `ell` and large for its next chain position.
    S3Improper,
    /// Some level-`g+ell` grande-fixed place sits at or right of `ell`.
    OutsideSngl,
}

impl ClassMembership {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassMembership::S1 => "S1",
            ClassMembership::S2Proper => "S2-proper",
            ClassMembership::S3Improper => "S3-improper",
            ClassMembership::OutsideSngl => "outside",
        }
    }
}

/// Grande-fixed places of `word` at gap `g` and level `level` (1-based).
///
/// An index `i` qualifies when one of three clauses holds: the letter is `n`
/// and sits within the last `g - 1` positions; the letter equals
/// `i + (g - 1)` and is at least `level`; or the letter is an excedance
/// letter with no other excedance letter in the interval
/// `[i + g - 1, word[i])`.
pub(crate) fn word_grande_fixed_places(word: &[u32], g: u32, level: u32) -> Vec<usize> {
    let n = word.len();
    let excl = exc_letters(word, g, level);
    (1..=n)
        .filter(|&i| {
            let v = word[i - 1];
            let top = v as usize == n && i as u64 + u64::from(g) > n as u64 + 1;
            let diagonal = u64::from(v) == i as u64 + u64::from(g) - 1 && v >= level;
            let blocked_excedance = is_exc_place(word, i, g, level) && {
                let lo = i as u64 + u64::from(g) - 1;
                !excl.iter().any(|&e| u64::from(e) >= lo && e < v)
            };
            top || diagonal || blocked_excedance
        })
        .collect()
}

/// Grande-fixed places of `p` at gap `g` and level `level`, ascending.
///
/// ```
/// use mahonian::classify::grande_fixed_places;
/// use mahonian::Permutation;
///
/// let t = Permutation::parse("836279415").unwrap();
/// assert_eq!(grande_fixed_places(&t, 3, 6), vec![3, 5]);
/// ```
pub fn grande_fixed_places(p: &Permutation, g: u32, level: u32) -> Vec<usize> {
    assert!(g >= 1 && level >= 1, "g and level must be >= 1");
    word_grande_fixed_places(p.as_slice(), g, level)
}

/// Classifies `p` at parameters `(g, ell)`. Requires `n >= ell` so that the
/// letter at position `ell` exists.
///
/// Members outside the `S1` branch need an excedance letter left of position
/// `ell`; when none exists (which happens only for `n < g + ell` on the
/// tested grids) the situation is reported as
/// [`Error::NoExcedanceLeftOfLevel`] rather than guessed.
pub fn class_of(p: &Permutation, g: u32, ell: u32) -> Result<ClassMembership> {
    assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
    let n = p.len();
    if n < ell as usize {
        return Err(Error::LevelExceedsSize { n, ell });
    }
    let w = p.as_slice();
    let high = g + ell;
    if word_grande_fixed_places(w, g, high)
        .iter()
        .any(|&z| z >= ell as usize)
    {
        return Ok(ClassMembership::OutsideSngl);
    }
    if u64::from(p.at(ell as usize)) >= u64::from(high) {
        return Ok(ClassMembership::S1);
    }
    // Greatest excedance letter strictly left of position ell.
    let x = (1..ell as usize)
        .filter(|&i| is_exc_place(w, i, g, ell))
        .max_by_key(|&i| w[i - 1])
        .ok_or_else(|| Error::NoExcedanceLeftOfLevel {
            perm: p.to_string(),
            g,
            ell,
        })?;
    // Non-excedance positions in (x, ell], walked from ell down to x.
    let chain: Vec<usize> = (x + 1..=ell as usize)
        .rev()
        .filter(|&i| !is_exc_place(w, i, g, ell))
        .collect();
    let proper = (0..chain.len()).all(|j| {
        let next = if j + 1 < chain.len() { chain[j + 1] } else { x };
        let v = w[chain[j] - 1];
        v < ell || u64::from(v) < next as u64 + u64::from(g)
    });
    Ok(if proper {
        ClassMembership::S2Proper
    } else {
        ClassMembership::S3Improper
    })
}
