//! Permutation statistics: the descent/major-index family (`rdes`, `rmaj`)
//! and the excedance/Denert family (`g exc_ell`, `g den_ell`, `den^a`).
//!
//! Positions and values are 1-based, matching the usual combinatorial
//! conventions. All statistics on the empty permutation are zero.

use crate::perm::{inversions, Permutation};
use crate::{Error, Result};

/// The parameter pair `(g, ell)` of the gap/level statistics, with the linked
/// descent parameter `r = g + ell - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatParams {
    gap: u32,
    level: u32,
}

impl StatParams {
    pub fn new(gap: u32, level: u32) -> Result<Self> {
        if gap == 0 {
            return Err(Error::InvalidParams { what: "gap" });
        }
        if level == 0 {
            return Err(Error::InvalidParams { what: "level" });
        }
        Ok(Self { gap, level })
    }

    pub fn gap(&self) -> u32 {
        self.gap
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// The `r` for which `(rdes, rmaj)` is paired with the gap/level
    /// statistics: `r = g + ell - 1`.
    pub fn linked_r(&self) -> u32 {
        self.gap + self.level - 1
    }
}

/// `{i in [n-1] : p_i >= p_{i+1} + r}`, the r-descent set (1-based positions).
pub fn des_set(p: &Permutation, r: u32) -> Vec<usize> {
    assert!(r >= 1, "r must be >= 1");
    let w = p.as_slice();
    (1..w.len())
        .filter(|&i| u64::from(w[i - 1]) >= u64::from(w[i]) + u64::from(r))
        .collect()
}

/// Number of r-descents.
pub fn r_des(p: &Permutation, r: u32) -> u64 {
    des_set(p, r).len() as u64
}

/// Number of inversions `(i, j)` with `p_i < p_j + r`.
pub fn r_inv(p: &Permutation, r: u32) -> u64 {
    let w = p.as_slice();
    let mut count = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i] > w[j] && u64::from(w[i]) < u64::from(w[j]) + u64::from(r) {
                count += 1;
            }
        }
    }
    count
}

/// The r-major index: the sum of the r-descent positions plus the number of
/// r-inversions. Specializes to `maj` at `r = 1` and to `inv` for `r >= n`.
///
/// ```
/// use mahonian::stats::r_maj;
/// use mahonian::Permutation;
///
/// let p = Permutation::parse("321").unwrap();
/// assert_eq!(r_maj(&p, 1), 3); // maj: descents at 1 and 2
/// assert_eq!(r_maj(&p, 5), 3); // inv for r >= n
/// ```
pub fn r_maj(p: &Permutation, r: u32) -> u64 {
    des_set(p, r).iter().map(|&i| i as u64).sum::<u64>() + r_inv(p, r)
}

/// Whether 1-based position `i` of `word` is a g-gap level-`level` excedance
/// place: `word[i] >= i + g` and `word[i] >= level`.
pub(crate) fn is_exc_place(word: &[u32], i: usize, g: u32, level: u32) -> bool {
    let v = word[i - 1];
    u64::from(v) >= i as u64 + u64::from(g) && v >= level
}

/// Ascending g-gap level-`level` excedance letters of `word`.
pub(crate) fn exc_letters(word: &[u32], g: u32, level: u32) -> Vec<u32> {
    let mut letters: Vec<u32> = (1..=word.len())
        .filter(|&i| is_exc_place(word, i, g, level))
        .map(|i| word[i - 1])
        .collect();
    letters.sort_unstable();
    letters
}

/// Ascending excedance letters of `word` sitting strictly left of 1-based
/// position `bound`.
pub(crate) fn exc_letters_left_of(word: &[u32], g: u32, level: u32, bound: usize) -> Vec<u32> {
    let mut letters: Vec<u32> = (1..bound.min(word.len() + 1))
        .filter(|&i| is_exc_place(word, i, g, level))
        .map(|i| word[i - 1])
        .collect();
    letters.sort_unstable();
    letters
}

/// The excedance structure of a permutation at gap `g` and level `ell`:
/// places, letters, the threshold into the level-`g+ell` letters, and the
/// index sets `A`, `B`, `C`, `B*` partitioning the positions left of `ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcedanceProfile {
    pub gap: u32,
    pub level: u32,
    /// Ascending excedance places `i` with `p_i >= i + g` and `p_i >= ell`.
    pub places: Vec<usize>,
    /// Ascending excedance letters `e_1 < ... < e_s`.
    pub letters: Vec<u32>,
    /// 1-based index of the smallest letter `>= g + ell` within `letters`,
    /// or `s + 1` when no letter reaches `g + ell`.
    pub t_index: usize,
    /// `{i < ell : p_i is an excedance letter with p_i >= g + ell}`.
    pub set_a: Vec<usize>,
    /// `{i < ell : p_i is not an excedance letter}`.
    pub set_b: Vec<usize>,
    /// `{i < ell : p_i is an excedance letter with p_i < g + ell}`.
    pub set_c: Vec<usize>,
    /// `{i < ell : p_i < g + ell}`, the union of `B` and `C`.
    pub set_b_star: Vec<usize>,
}

impl ExcedanceProfile {
    /// The ascending level-`g+ell` excedance letters `e_t, ..., e_s`.
    pub fn high_letters(&self) -> &[u32] {
        &self.letters[self.t_index - 1..]
    }
}

/// Computes the [`ExcedanceProfile`] of `p`. For `ell > n` the sets over
/// `i < ell` are clipped to `i <= n`.
pub fn excedance_profile(p: &Permutation, g: u32, ell: u32) -> ExcedanceProfile {
    assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
    let w = p.as_slice();
    let n = w.len();
    let places: Vec<usize> = (1..=n).filter(|&i| is_exc_place(w, i, g, ell)).collect();
    let mut letters: Vec<u32> = places.iter().map(|&i| w[i - 1]).collect();
    letters.sort_unstable();
    let high = u64::from(g) + u64::from(ell);
    let t_index = letters
        .iter()
        .position(|&e| u64::from(e) >= high)
        .map(|k| k + 1)
        .unwrap_or(letters.len() + 1);
    let (mut set_a, mut set_b, mut set_c, mut set_b_star) = (vec![], vec![], vec![], vec![]);
    for i in 1..=n.min(ell as usize - 1) {
        let v = w[i - 1];
        if is_exc_place(w, i, g, ell) {
            if u64::from(v) >= high {
                set_a.push(i);
            } else {
                set_c.push(i);
            }
        } else {
            set_b.push(i);
        }
        if u64::from(v) < high {
            set_b_star.push(i);
        }
    }
    ExcedanceProfile {
        gap: g,
        level: ell,
        places,
        letters,
        t_index,
        set_a,
        set_b,
        set_c,
        set_b_star,
    }
}

/// The g-gap ell-level excedance number: `|{i : p_i >= i + g, i >= ell}|`.
pub fn g_exc_l(p: &Permutation, g: u32, ell: u32) -> u64 {
    assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
    let w = p.as_slice();
    (ell as usize..=w.len())
        .filter(|&i| u64::from(w[i - 1]) >= i as u64 + u64::from(g))
        .count() as u64
}

/// The g-gap ell-level Denert statistic: the sum of `i + g - 1` over
/// excedance places, plus the inversions of the excedance subword, plus the
/// inversions of the non-excedance subword.
///
/// ```
/// use mahonian::stats::{g_den_l, g_exc_l};
/// use mahonian::Permutation;
///
/// let p = Permutation::parse("836295417").unwrap();
/// assert_eq!(g_den_l(&p, 2, 3), 19);
/// assert_eq!(g_exc_l(&p, 2, 3), 2);
/// ```
pub fn g_den_l(p: &Permutation, g: u32, ell: u32) -> u64 {
    assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
    let w = p.as_slice();
    let mut exc = Vec::new();
    let mut nexc = Vec::new();
    let mut sum = 0u64;
    for i in 1..=w.len() {
        if is_exc_place(w, i, g, ell) {
            sum += i as u64 + u64::from(g) - 1;
            exc.push(w[i - 1]);
        } else {
            nexc.push(w[i - 1]);
        }
    }
    sum + inversions(&exc) + inversions(&nexc)
}

/// A weakly increasing integer sequence with `a_i >= i`, the parameter of
/// [`den_a`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundSequence {
    bounds: Vec<u32>,
}

impl BoundSequence {
    pub fn new(bounds: Vec<u32>) -> Result<Self> {
        for i in 1..=bounds.len() {
            if u64::from(bounds[i - 1]) < i as u64 || (i > 1 && bounds[i - 1] < bounds[i - 2]) {
                return Err(Error::BoundInvalid { index: i });
            }
        }
        Ok(Self { bounds })
    }

    /// The bounds `a_i = max(i + g - 1, ell - 1)` under which [`den_a`]
    /// coincides with [`g_den_l`] at parameters `(g, ell)`.
    pub fn den_gl_bounds(n: usize, g: u32, ell: u32) -> Self {
        let bounds = (1..=n)
            .map(|i| (i as u64 + u64::from(g) - 1).max(u64::from(ell).saturating_sub(1)) as u32)
            .collect();
        Self { bounds }
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.bounds
    }
}

/// Han's statistic `den^a`: positions with `p_i > a_i` contribute
/// `i + |{j < p_i : p_i <= a_j}|`, plus the inversions of the subword above
/// the bounds and of the subword below them.
pub fn den_a(p: &Permutation, a: &BoundSequence) -> Result<u64> {
    let n = p.len();
    if a.len() != n {
        return Err(Error::BoundLength {
            got: a.len(),
            expected: n,
        });
    }
    let w = p.as_slice();
    let b = a.as_slice();
    let mut exc = Vec::new();
    let mut nexc = Vec::new();
    let mut sum = 0u64;
    for i in 1..=n {
        let v = w[i - 1];
        if v > b[i - 1] {
            let housed = (1..v as usize).filter(|&j| b[j - 1] >= v).count() as u64;
            sum += i as u64 + housed;
            exc.push(v);
        } else {
            nexc.push(v);
        }
    }
    Ok(sum + inversions(&exc) + inversions(&nexc))
}

/// The classical statistics, i.e. the `r = 1` and `g = ell = 1`
/// specializations of the families above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicStats {
    pub inv: u64,
    pub des: u64,
    pub maj: u64,
    pub exc: u64,
    pub den: u64,
}

pub fn classic_statistics(p: &Permutation) -> ClassicStats {
    ClassicStats {
        inv: p.inversions(),
        des: r_des(p, 1),
        maj: r_maj(p, 1),
        exc: g_exc_l(p, 1, 1),
        den: g_den_l(p, 1, 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use std::collections::BTreeMap;

    fn p(text: &str) -> Permutation {
        Permutation::parse(text).unwrap()
    }

    #[test]
    fn des_set_examples() {
        assert_eq!(des_set(&p("836295417"), 3), vec![1, 3, 5, 7]);
        assert_eq!(des_set(&p("1234"), 3), Vec::<usize>::new());
        assert_eq!(des_set(&p("21"), 1), vec![1]);
    }

    #[test]
    fn r_maj_examples() {
        assert_eq!(r_maj(&p("2341"), 3), 5);
        assert_eq!(r_maj(&p("4123"), 3), 3);
        assert_eq!(r_maj(&p("321"), 1), 3);
        for q in all_permutations(4) {
            assert_eq!(r_maj(&q, 7), q.inversions());
        }
    }

    #[test]
    fn r_maj_specializations_exhaustive() {
        // rmaj reduces to inv for r >= n and to maj for r = 1.
        for n in 0..=8 {
            for q in all_permutations(n) {
                assert_eq!(r_maj(&q, n.max(1) as u32), q.inversions());
                if n >= 1 {
                    assert_eq!(r_maj(&q, n as u32 + 3), q.inversions());
                }
                let maj: u64 = des_set(&q, 1).iter().map(|&i| i as u64).sum();
                assert_eq!(r_maj(&q, 1), maj);
            }
        }
    }

    #[test]
    fn excedance_profile_examples() {
        let prof = excedance_profile(&p("836295417"), 2, 3);
        assert_eq!(prof.places, vec![1, 3, 5]);
        assert_eq!(prof.letters, vec![6, 8, 9]);

        let prof = excedance_profile(&p("596284317"), 3, 6);
        assert_eq!(prof.set_a, vec![2]);
        assert_eq!(prof.set_b, vec![1, 4]);
        assert_eq!(prof.set_c, vec![3, 5]);
        assert_eq!(prof.set_b_star, vec![1, 3, 4, 5]);
        assert_eq!(prof.letters, vec![6, 8, 9]);
        assert_eq!(prof.t_index, 3);
        assert_eq!(prof.high_letters(), &[9]);

        let id = Permutation::identity(6);
        let prof = excedance_profile(&id, 2, 3);
        assert!(prof.places.is_empty() && prof.letters.is_empty());
        assert_eq!(prof.t_index, 1);
    }

    #[test]
    fn g_exc_examples() {
        assert_eq!(g_exc_l(&p("836295417"), 2, 3), 2);
        assert_eq!(g_exc_l(&p("1423"), 2, 2), 1);
        assert_eq!(g_exc_l(&Permutation::identity(7), 3, 2), 0);
    }

    #[test]
    fn g_den_examples() {
        assert_eq!(g_den_l(&p("836295417"), 2, 3), 19);
        assert_eq!(g_den_l(&p("2431"), 2, 4), 5);
        assert_eq!(g_den_l(&Permutation::identity(6), 2, 3), 0);
        assert_eq!(g_den_l(&Permutation::empty(), 1, 1), 0);
    }

    #[test]
    fn den_a_examples() {
        let q = p("836295417");
        let bounds = BoundSequence::den_gl_bounds(9, 2, 3);
        assert_eq!(bounds.as_slice(), &[2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(den_a(&q, &bounds).unwrap(), 19);
        let id = Permutation::identity(5);
        assert_eq!(
            den_a(&id, &BoundSequence::den_gl_bounds(5, 1, 1)).unwrap(),
            0
        );
        assert!(matches!(
            den_a(&id, &BoundSequence::den_gl_bounds(4, 1, 1)),
            Err(Error::BoundLength {
                got: 4,
                expected: 5
            })
        ));
        assert!(BoundSequence::new(vec![1, 1]).is_err());
        assert!(BoundSequence::new(vec![2, 1]).is_err());
    }

    #[test]
    fn den_a_matches_g_den_l_on_s5() {
        for q in all_permutations(5) {
            let bounds = BoundSequence::den_gl_bounds(5, 2, 4);
            assert_eq!(den_a(&q, &bounds).unwrap(), g_den_l(&q, 2, 4), "{q}");
        }
    }

    #[test]
    fn classic_statistics_examples() {
        let s = classic_statistics(&p("321"));
        assert_eq!((s.inv, s.des, s.maj, s.exc), (3, 2, 3, 1));
        assert_eq!(s.den, g_den_l(&p("321"), 1, 1));
        let id = classic_statistics(&Permutation::identity(4));
        assert_eq!((id.inv, id.des, id.maj, id.exc, id.den), (0, 0, 0, 0, 0));
    }

    #[test]
    fn exc_den_matches_des_maj_on_s4() {
        // Denert's classical equidistribution at n = 4.
        let mut lhs = BTreeMap::new();
        let mut rhs = BTreeMap::new();
        for q in all_permutations(4) {
            let s = classic_statistics(&q);
            *lhs.entry((s.des, s.maj)).or_insert(0u64) += 1;
            *rhs.entry((s.exc, s.den)).or_insert(0u64) += 1;
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn profile_cardinality_identities() {
        for n in 0..=6 {
            for q in all_permutations(n) {
                for g in 1..=4u32 {
                    for ell in 1..=(n as u32 + 1).max(1) {
                        let prof = excedance_profile(&q, g, ell);
                        let s = prof.letters.len() as u64;
                        let gexc = g_exc_l(&q, g, ell);
                        assert_eq!(
                            prof.set_a.len() as u64 + prof.set_c.len() as u64 + gexc,
                            s
                        );
                        if u64::from(ell) <= n as u64 + 1 {
                            assert_eq!(
                                (prof.set_a.len() + prof.set_b.len() + prof.set_c.len()) as u64,
                                u64::from(ell) - 1
                            );
                            let s_high = prof.high_letters().len() as u64;
                            assert_eq!(
                                prof.set_b_star.len() as u64 + s_high,
                                gexc + u64::from(ell) - 1
                            );
                        }
                        let b_star: Vec<usize> = prof
                            .set_b
                            .iter()
                            .chain(&prof.set_c)
                            .copied()
                            .collect::<std::collections::BTreeSet<_>>()
                            .into_iter()
                            .collect();
                        assert_eq!(prof.set_b_star, b_star);
                        assert!(prof.set_a.iter().all(|i| !prof.set_b_star.contains(i)));
                    }
                }
            }
        }
    }

    #[test]
    fn stat_params_link() {
        let params = StatParams::new(2, 3).unwrap();
        assert_eq!(params.linked_r(), 4);
        assert!(StatParams::new(0, 1).is_err());
        assert!(StatParams::new(1, 0).is_err());
    }
}
