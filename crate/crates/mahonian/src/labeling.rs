//! Space labelings of words and index sequences, plus the insertion-letter
//! assignments that drive the insertion maps.
//!
//! A word (or index sequence) of length `n - 1` has `n` spaces: space `k`
//! (0-based) sits immediately before 1-based position `k + 1`, and space
//! `n - 1` trails the last element. Inserting at space `k` therefore means
//! inserting at 0-based index `k`.

use crate::perm::Permutation;
use crate::stats::{exc_letters, excedance_profile, g_exc_l, r_des};
use crate::{Error, Result};

/// What the spaces of a labeling interleave: the letters of the permutation
/// itself, or the index sequence `1 2 ... (n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceTarget {
    WordSpaces,
    IndexSpaces,
}

/// A bijection between the `n` spaces and the labels `{0, ..., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceLabeling {
    target: SpaceTarget,
    label_of_space: Vec<u32>,
    space_of_label: Vec<usize>,
}

impl SpaceLabeling {
    fn from_slots(target: SpaceTarget, slots: Vec<Option<u32>>) -> Result<Self> {
        let n = slots.len();
        let mut label_of_space = Vec::with_capacity(n);
        let mut space_of_label = vec![usize::MAX; n];
        for (space, slot) in slots.into_iter().enumerate() {
            let label =
                slot.ok_or_else(|| Error::Internal(format!("space {space} left unlabeled")))?;
            if label as usize >= n || space_of_label[label as usize] != usize::MAX {
                return Err(Error::Internal(format!(
                    "label {label} duplicated or out of range"
                )));
            }
            space_of_label[label as usize] = space;
            label_of_space.push(label);
        }
        Ok(Self {
            target,
            label_of_space,
            space_of_label,
        })
    }

    pub fn target(&self) -> SpaceTarget {
        self.target
    }

    /// Number of spaces, one more than the underlying word length.
    pub fn space_count(&self) -> usize {
        self.label_of_space.len()
    }

    /// Label of space `k`. Panics if `k` is out of range.
    pub fn label_of_space(&self, space: usize) -> u32 {
        self.label_of_space[space]
    }

    /// Space carrying label `c`.
    pub fn space_of_label(&self, label: usize) -> Result<usize> {
        self.space_of_label
            .get(label)
            .copied()
            .ok_or(Error::LabelOutOfRange {
                label,
                max: self.space_of_label.len().saturating_sub(1),
            })
    }

    /// Labels indexed by space.
    pub fn labels(&self) -> &[u32] {
        &self.label_of_space
    }
}

/// A partial assignment of insertion letters to spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionAssignment {
    letter_of_space: Vec<Option<u32>>,
}

impl InsertionAssignment {
    fn new(letter_of_space: Vec<Option<u32>>) -> Self {
        Self { letter_of_space }
    }

    pub fn space_count(&self) -> usize {
        self.letter_of_space.len()
    }

    /// Insertion letter for space `k`, when the labeling rule covers it.
    pub fn letter(&self, space: usize) -> Option<u32> {
        self.letter_of_space[space]
    }

    pub fn letters(&self) -> &[Option<u32>] {
        &self.letter_of_space
    }
}

/// Smallest letter of `letters` (ascending) whose own space block reaches the
/// space before index `x`, i.e. the smallest `e` with `x <= e - (g - 1)`;
/// spaces beyond every block get `fallback`.
fn block_letter(letters: &[u32], x: usize, g: u32, fallback: u32) -> u32 {
    letters
        .iter()
        .copied()
        .find(|&e| u64::from(e) >= x as u64 + u64::from(g) - 1)
        .unwrap_or(fallback)
}

/// The r-maj labeling of the word spaces of `p` (viewed inside `S_n` with
/// `n = p.len() + 1`): the trailing space gets 0, spaces before letters that
/// close an r-descent or exceed `n - r` get `1..` right to left, the rest
/// get the remaining labels left to right.
pub fn rmaj_labeling(p: &Permutation, r: u32) -> Result<SpaceLabeling> {
    assert!(r >= 1, "r must be >= 1");
    let m = p.len();
    let n = m + 1;
    let w = p.as_slice();
    let mut marked = vec![false; m];
    for i in 2..=m {
        if u64::from(w[i - 2]) >= u64::from(w[i - 1]) + u64::from(r) {
            marked[i - 1] = true;
        }
    }
    for i in 1..=m {
        if u64::from(w[i - 1]) + u64::from(r) > n as u64 {
            marked[i - 1] = true;
        }
    }
    let count = marked.iter().filter(|&&b| b).count() as u64;
    let expected = (r_des(p, r) + u64::from(r) - 1).min(m as u64);
    if count != expected {
        return Err(Error::Internal(format!(
            "r-maj labeling of {p}: {count} marked letters, expected {expected}"
        )));
    }
    let mut slots: Vec<Option<u32>> = vec![None; n];
    slots[n - 1] = Some(0);
    let mut next = 1u32;
    for i in (1..=m).rev() {
        if marked[i - 1] {
            slots[i - 1] = Some(next);
            next += 1;
        }
    }
    for slot in slots.iter_mut() {
        if slot.is_none() {
            *slot = Some(next);
            next += 1;
        }
    }
    SpaceLabeling::from_slots(SpaceTarget::WordSpaces, slots)
}

/// The g-gap den labeling of the index sequence of `p`: the rightmost `g`
/// spaces get `0..g-1` right to left, the space before index `e_i - (g-1)`
/// gets `g + s - i` for each excedance letter `e_i`, the rest fill in left to
/// right. Every space also receives an insertion letter.
pub fn liu_den_labeling(p: &Permutation, g: u32) -> Result<(SpaceLabeling, InsertionAssignment)> {
    assert!(g >= 1, "g must be >= 1");
    let m = p.len();
    let n = m + 1;
    let w = p.as_slice();
    let e = exc_letters(w, g, 1);
    let s = e.len();
    let mut slots: Vec<Option<u32>> = vec![None; n];
    for (j, slot) in (0..(g as usize).min(n)).zip((0..n).rev()) {
        slots[slot] = Some(j as u32);
    }
    for (i0, &ei) in e.iter().enumerate() {
        let x = ei as usize - g as usize + 1;
        slots[x - 1] = Some((g as usize + s - 1 - i0) as u32);
    }
    let mut next = (g as usize + s) as u32;
    for slot in slots.iter_mut() {
        if slot.is_none() {
            *slot = Some(next);
            next += 1;
        }
    }
    let labeling = SpaceLabeling::from_slots(SpaceTarget::IndexSpaces, slots)?;
    let letters: Vec<Option<u32>> = (0..n)
        .map(|k| {
            Some(if k == n - 1 {
                n as u32
            } else {
                block_letter(&e, k + 1, g, n as u32)
            })
        })
        .collect();
    Ok((labeling, InsertionAssignment::new(letters)))
}

fn ensure_size(what: &'static str, n: usize, g: u32, ell: u32) -> Result<()> {
    if (n as u64) < u64::from(g) + u64::from(ell) {
        return Err(Error::SizeBelowGapPlusLevel { what, n, g, ell });
    }
    Ok(())
}

/// The gap/level den labeling of the index sequence of `p` at `(g, ell)`.
/// Defined for `n = p.len() + 1 >= g + ell`.
///
/// Rules: the rightmost `g` spaces get `0..g-1` right to left; each
/// excedance letter `e_i` marks the space before index `e_i - (g-1)` when
/// `e_i >= g + ell` and the space before its own position otherwise, labeled
/// `g + s - i`; the spaces before indices in `B` fill `g+s ..` left to
/// right; the rest take the remaining labels left to right.
pub fn gl_den_labeling(p: &Permutation, g: u32, ell: u32) -> Result<SpaceLabeling> {
    assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
    let m = p.len();
    let n = m + 1;
    ensure_size("the gap/level den labeling", n, g, ell)?;
    let prof = excedance_profile(p, g, ell);
    let s = prof.letters.len();
    let high = u64::from(g) + u64::from(ell);
    let mut slots: Vec<Option<u32>> = vec![None; n];
    for j in 0..g as usize {
        slots[n - 1 - j] = Some(j as u32);
    }
    for (i0, &ei) in prof.letters.iter().enumerate() {
        let x = if u64::from(ei) >= high {
            ei as usize - g as usize + 1
        } else {
            p.position_of(ei).expect("excedance letter present")
        };
        slots[x - 1] = Some((g as usize + s - 1 - i0) as u32);
    }
    let mut next = (g as usize + s) as u32;
    for &i in &prof.set_b {
        slots[i - 1] = Some(next);
        next += 1;
    }
    debug_assert_eq!(
        u64::from(next),
        g_exc_l(p, g, ell) + u64::from(g) + u64::from(ell) - 1
    );
    for slot in slots.iter_mut() {
        if slot.is_none() {
            *slot = Some(next);
            next += 1;
        }
    }
    SpaceLabeling::from_slots(SpaceTarget::IndexSpaces, slots)
}

/// The level-`g+ell` insertion letters of the index sequence of `p`: defined
/// on the spaces before indices `x >= ell` and on the trailing space. The
/// letter is the smallest level-`g+ell` excedance letter `e` with
/// `x <= e - (g-1)`, and `n` beyond the last block (the trailing space always
/// gets `n`).
pub fn ggl_insertion_letters(p: &Permutation, g: u32, ell: u32) -> Result<InsertionAssignment> {
    assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
    let m = p.len();
    let n = m + 1;
    ensure_size("the gap/level insertion letters", n, g, ell)?;
    let high = g + ell;
    let e = exc_letters(p.as_slice(), g, high);
    let letters: Vec<Option<u32>> = (0..n)
        .map(|k| {
            if k == n - 1 {
                Some(n as u32)
            } else if k + 1 >= ell as usize {
                Some(block_letter(&e, k + 1, g, n as u32))
            } else {
                None
            }
        })
        .collect();
    Ok(InsertionAssignment::new(letters))
}

/// The level-`g+ell` den labeling of the index sequence of `p`: like
/// [`gl_den_labeling`] but ranging over the level-`g+ell` excedance letters
/// and with `B*` in place of `B`. Agrees with the gap/level labeling on
/// spaces before indices in `A` and before indices `x >= ell`.
pub fn ggl_den_labeling(p: &Permutation, g: u32, ell: u32) -> Result<SpaceLabeling> {
    assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
    let m = p.len();
    let n = m + 1;
    ensure_size("the level-(g+ell) den labeling", n, g, ell)?;
    let prof = excedance_profile(p, g, ell);
    let e = prof.high_letters();
    let s = e.len();
    let mut slots: Vec<Option<u32>> = vec![None; n];
    for j in 0..g as usize {
        slots[n - 1 - j] = Some(j as u32);
    }
    for (i0, &ei) in e.iter().enumerate() {
        let x = ei as usize - g as usize + 1;
        slots[x - 1] = Some((g as usize + s - 1 - i0) as u32);
    }
    let mut next = (g as usize + s) as u32;
    for &i in &prof.set_b_star {
        slots[i - 1] = Some(next);
        next += 1;
    }
    debug_assert_eq!(
        u64::from(next),
        g_exc_l(p, g, ell) + u64::from(g) + u64::from(ell) - 1
    );
    for slot in slots.iter_mut() {
        if slot.is_none() {
            *slot = Some(next);
            next += 1;
        }
    }
    SpaceLabeling::from_slots(SpaceTarget::IndexSpaces, slots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;

    fn p(text: &str) -> Permutation {
        Permutation::parse(text).unwrap()
    }

    #[test]
    fn rmaj_labeling_worked_example() {
        let lab = rmaj_labeling(&p("836295417"), 3).unwrap();
        assert_eq!(lab.labels(), &[6, 5, 7, 4, 3, 2, 8, 1, 9, 0]);
        assert_eq!(lab.target(), SpaceTarget::WordSpaces);
    }

    #[test]
    fn rmaj_labeling_small_cases() {
        let lab = rmaj_labeling(&p("1"), 1).unwrap();
        assert_eq!(lab.labels(), &[1, 0]);
        let lab = rmaj_labeling(&p("21"), 2).unwrap();
        assert_eq!(lab.labels(), &[1, 2, 0]);
        let lab = rmaj_labeling(&Permutation::empty(), 4).unwrap();
        assert_eq!(lab.labels(), &[0]);
    }

    #[test]
    fn liu_labeling_worked_example() {
        let (lab, ins) = liu_den_labeling(&p("836295417"), 3).unwrap();
        assert_eq!(lab.labels(), &[6, 7, 8, 5, 9, 4, 3, 2, 1, 0]);
        let letters: Vec<u32> = ins.letters().iter().map(|o| o.unwrap()).collect();
        assert_eq!(letters, vec![6, 6, 6, 6, 8, 8, 9, 10, 10, 10]);
    }

    #[test]
    fn liu_labeling_small_cases() {
        // Identity of S_2 at g = 1: no excedance letters.
        let (lab, ins) = liu_den_labeling(&p("12"), 1).unwrap();
        assert_eq!(lab.labels(), &[1, 2, 0]);
        assert_eq!(
            ins.letters().iter().map(|o| o.unwrap()).collect::<Vec<_>>(),
            vec![3, 3, 3]
        );
        // 21 at g = 1: e_1 = 2. The space before index 2 keeps insertion
        // letter 2 (its block reaches through index e_1 - (g-1)).
        let (lab, ins) = liu_den_labeling(&p("21"), 1).unwrap();
        assert_eq!(lab.labels(), &[2, 1, 0]);
        assert_eq!(
            ins.letters().iter().map(|o| o.unwrap()).collect::<Vec<_>>(),
            vec![2, 2, 3]
        );
        // Gap larger than the word: all labels run right to left.
        let (lab, _) = liu_den_labeling(&p("12"), 5).unwrap();
        assert_eq!(lab.labels(), &[2, 1, 0]);
    }

    #[test]
    fn gl_labeling_worked_examples() {
        let lab = gl_den_labeling(&p("596284317"), 3, 6).unwrap();
        assert_eq!(lab.labels(), &[6, 8, 5, 7, 4, 9, 3, 2, 1, 0]);
        let lab = gl_den_labeling(&p("7962(10)48315"), 3, 6).unwrap();
        assert_eq!(lab.labels(), &[5, 8, 6, 7, 9, 10, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn ggl_insertion_letters_worked_examples() {
        let ins = ggl_insertion_letters(&p("596284317"), 3, 6).unwrap();
        assert_eq!(
            ins.letters(),
            &[
                None,
                None,
                None,
                None,
                None,
                Some(9),
                Some(9),
                Some(10),
                Some(10),
                Some(10)
            ]
        );
        let ins = ggl_insertion_letters(&p("7962(10)48315"), 3, 6).unwrap();
        let defined: Vec<u32> = ins.letters().iter().flatten().copied().collect();
        assert_eq!(defined, vec![9, 9, 10, 11, 11, 11]);
    }

    #[test]
    fn ggl_insertion_letters_empty_high_set() {
        // No excedance letter reaches g + ell: every defined space gets n.
        let q = p("213");
        let ins = ggl_insertion_letters(&q, 1, 3).unwrap();
        assert_eq!(ins.letters(), &[None, None, Some(4), Some(4)]);
    }

    #[test]
    fn ggl_labeling_worked_example() {
        let lab = ggl_den_labeling(&p("596284317"), 3, 6).unwrap();
        assert_eq!(lab.labels(), &[4, 8, 5, 6, 7, 9, 3, 2, 1, 0]);
    }

    #[test]
    fn labeling_requires_minimum_size() {
        assert!(matches!(
            gl_den_labeling(&p("12"), 2, 2),
            Err(Error::SizeBelowGapPlusLevel { .. })
        ));
    }

    #[test]
    fn labelings_are_bijective_on_a_grid() {
        for n in 1..=7usize {
            for q in all_permutations(n - 1) {
                for r in 1..=4u32 {
                    let lab = rmaj_labeling(&q, r).unwrap();
                    assert_eq!(lab.space_count(), n);
                }
                for g in 1..=4u32 {
                    liu_den_labeling(&q, g).unwrap();
                    for ell in 1..=4u32 {
                        if (g + ell) as usize <= n {
                            gl_den_labeling(&q, g, ell).unwrap();
                            ggl_den_labeling(&q, g, ell).unwrap();
                            ggl_insertion_letters(&q, g, ell).unwrap();
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gl_reduces_to_liu_at_level_one() {
        for n in 2..=6usize {
            for q in all_permutations(n - 1) {
                for g in 1..=(n as u32 - 1) {
                    let (liu, _) = liu_den_labeling(&q, g).unwrap();
                    let gl = gl_den_labeling(&q, g, 1).unwrap();
                    assert_eq!(liu.labels(), gl.labels(), "{q} g={g}");
                }
            }
        }
    }

    #[test]
    fn ggl_letters_weakly_increase_and_bound_their_space() {
        for n in 2..=6usize {
            for q in all_permutations(n - 1) {
                for g in 1..=3u32 {
                    for ell in 1..=3u32 {
                        if (g + ell) as usize > n {
                            continue;
                        }
                        let ins = ggl_insertion_letters(&q, g, ell).unwrap();
                        let defined: Vec<u32> =
                            ins.letters().iter().flatten().copied().collect();
                        assert!(defined.windows(2).all(|w| w[0] <= w[1]));
                        let e = crate::stats::excedance_profile(&q, g, ell)
                            .high_letters()
                            .to_vec();
                        for (k, letter) in ins.letters().iter().enumerate() {
                            let (Some(letter), true) = (letter, k + 1 < n) else {
                                continue;
                            };
                            let x = k + 1;
                            // e_{y-1} - (g-1) < x <= e_y - (g-1) within the blocks.
                            if let Some(y0) = e.iter().position(|v| v == letter) {
                                assert!(x as u64 <= u64::from(e[y0]) - u64::from(g) + 1);
                                if y0 > 0 {
                                    assert!(
                                        (x as u64) > u64::from(e[y0 - 1]) - u64::from(g) + 1
                                    );
                                }
                            } else {
                                assert_eq!(u64::from(*letter), n as u64);
                                if let Some(&last) = e.last() {
                                    assert!((x as u64) > u64::from(last) - u64::from(g) + 1);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn remark_label_agreement_on_a_and_high_spaces() {
        for n in 2..=6usize {
            for q in all_permutations(n - 1) {
                for g in 1..=3u32 {
                    for ell in 1..=3u32 {
                        if (g + ell) as usize > n {
                            continue;
                        }
                        let gl = gl_den_labeling(&q, g, ell).unwrap();
                        let ggl = ggl_den_labeling(&q, g, ell).unwrap();
                        let prof = crate::stats::excedance_profile(&q, g, ell);
                        for &x in &prof.set_a {
                            assert_eq!(gl.label_of_space(x - 1), ggl.label_of_space(x - 1));
                        }
                        for x in ell as usize..=n - 1 {
                            assert_eq!(gl.label_of_space(x - 1), ggl.label_of_space(x - 1));
                        }
                        assert_eq!(gl.label_of_space(n - 1), ggl.label_of_space(n - 1));
                    }
                }
            }
        }
    }
}
