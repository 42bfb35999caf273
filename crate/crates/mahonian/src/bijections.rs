//! Insertion maps between symmetric groups and their inverses: the r-maj
//! insertion, the g-gap den insertion, the four branch maps of the
//! gap/level den insertion, its level-`g+ell` variant, and the composed
//! equidistribution bijection built from them.
//!
//! Every "replace" inside a map reads from a frozen snapshot of the word and
//! writes into a fresh copy, so chained replacements behave as simultaneous
//! assignments; insertions are applied last, after all replacements.

use std::collections::BTreeMap;

use crate::classify::{class_of, word_grande_fixed_places, ClassMembership};
use crate::labeling::{
    ggl_den_labeling, ggl_insertion_letters, gl_den_labeling, liu_den_labeling, rmaj_labeling,
    SpaceLabeling,
};
use crate::perm::{all_permutations, factorial, lex_rank, nth_permutation, Permutation};
use crate::stats::{exc_letters, exc_letters_left_of, excedance_profile, g_den_l, is_exc_place, r_maj};
use crate::{Error, Result};

/// One application of an insertion map: `child` is the image of
/// `(parent, label)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionStep {
    pub parent: Permutation,
    pub label: usize,
    pub child: Permutation,
}

/// Named intermediate words and bookkeeping values produced by a map, for
/// inspection and golden tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapTrace {
    pub map: &'static str,
    pub entries: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEntry {
    Word { name: String, letters: Vec<u32> },
    Value { name: String, value: i64 },
}

impl MapTrace {
    fn new(map: &'static str) -> Self {
        Self {
            map,
            entries: Vec::new(),
        }
    }

    fn push_word(&mut self, name: &str, letters: &[u32]) {
        self.entries.push(TraceEntry::Word {
            name: name.to_string(),
            letters: letters.to_vec(),
        });
    }

    fn push_value(&mut self, name: &str, value: i64) {
        self.entries.push(TraceEntry::Value {
            name: name.to_string(),
            value,
        });
    }

    /// The last recorded word named `name`.
    pub fn word(&self, name: &str) -> Option<&[u32]> {
        self.entries.iter().rev().find_map(|e| match e {
            TraceEntry::Word { name: n, letters } if n == name => Some(letters.as_slice()),
            _ => None,
        })
    }

    pub fn value(&self, name: &str) -> Option<i64> {
        self.entries.iter().rev().find_map(|e| match e {
            TraceEntry::Value { name: n, value } if n == name => Some(*value),
            _ => None,
        })
    }
}

fn pos_of(w: &[u32], value: u32) -> usize {
    w.iter()
        .position(|&v| v == value)
        .expect("letter present in word")
}

/// Simultaneously replace each `old` with `new`; reads resolve against the
/// original word.
fn replace_values(w: &[u32], pairs: &[(u32, u32)]) -> Vec<u32> {
    let mut out = w.to_vec();
    for &(old, new) in pairs {
        out[pos_of(w, old)] = new;
    }
    out
}

/// Replace `letters[j]` by `letters[j+1]` for all `j >= from` (0-based), the
/// successor of the last letter being `top`.
fn shift_letters_up(w: &[u32], letters: &[u32], from: usize, top: u32) -> Vec<u32> {
    let pairs: Vec<(u32, u32)> = (from..letters.len())
        .map(|j| {
            let next = if j + 1 < letters.len() {
                letters[j + 1]
            } else {
                top
            };
            (letters[j], next)
        })
        .collect();
    replace_values(w, &pairs)
}

/// Replace `letters[j]` by `letters[j-1]`, with `bottom` replacing
/// `letters[0]`; inverse of [`shift_letters_up`].
fn shift_letters_down(w: &[u32], letters: &[u32], bottom: u32) -> Vec<u32> {
    let pairs: Vec<(u32, u32)> = (0..letters.len())
        .map(|j| {
            let prev = if j == 0 { bottom } else { letters[j - 1] };
            (letters[j], prev)
        })
        .collect();
    replace_values(w, &pairs)
}

/// Cycle the ascending `letters` downward in place: each letter becomes its
/// predecessor and the smallest becomes the largest.
fn cycle_letters_down(w: &[u32], letters: &[u32]) -> Vec<u32> {
    if letters.len() < 2 {
        return w.to_vec();
    }
    let m = letters.len();
    let mut pairs = vec![(letters[0], letters[m - 1])];
    pairs.extend((1..m).map(|j| (letters[j], letters[j - 1])));
    replace_values(w, &pairs)
}

/// Inverse of [`cycle_letters_down`].
fn cycle_letters_up(w: &[u32], letters: &[u32]) -> Vec<u32> {
    if letters.len() < 2 {
        return w.to_vec();
    }
    let m = letters.len();
    let mut pairs: Vec<(u32, u32)> = (0..m - 1).map(|j| (letters[j], letters[j + 1])).collect();
    pairs.push((letters[m - 1], letters[0]));
    replace_values(w, &pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SpacePos {
    Trailing,
    BeforeIndex(usize),
}

fn resolve_space(labeling: &SpaceLabeling, c: usize) -> Result<SpacePos> {
    let space = labeling.space_of_label(c)?;
    Ok(if space == labeling.space_count() - 1 {
        SpacePos::Trailing
    } else {
        SpacePos::BeforeIndex(space + 1)
    })
}

fn space_description(sp: SpacePos) -> String {
    match sp {
        SpacePos::Trailing => "at the trailing space".to_string(),
        SpacePos::BeforeIndex(x) => format!("before index {x}"),
    }
}

fn domain_error(
    map: &'static str,
    p: &Permutation,
    c: usize,
    sp: SpacePos,
    g: u32,
    ell: u32,
) -> Error {
    let found = match sp {
        SpacePos::Trailing => "the trailing space".to_string(),
        SpacePos::BeforeIndex(x) => {
            if x >= ell as usize {
                format!("W (x = {x} >= ell)")
            } else {
                let prof = excedance_profile(p, g, ell);
                if prof.set_a.contains(&x) {
                    "A".to_string()
                } else if prof.set_b.contains(&x) {
                    "B".to_string()
                } else {
                    "C".to_string()
                }
            }
        }
    };
    Error::MapDomain {
        map,
        perm: p.to_string(),
        label: c,
        space: space_description(sp),
        found,
    }
}

/// Inserts `n` at the space labeled `c` in the r-maj labeling of `p`. The
/// r-major index grows by exactly `c`.
///
/// ```
/// use mahonian::bijections::phi_maj;
/// use mahonian::Permutation;
///
/// let p = Permutation::parse("836295417").unwrap();
/// assert_eq!(phi_maj(&p, 4, 3).unwrap().to_string(), "836(10)295417");
/// ```
pub fn phi_maj(p: &Permutation, c: usize, r: u32) -> Result<Permutation> {
    let labeling = rmaj_labeling(p, r)?;
    let space = labeling.space_of_label(c)?;
    let mut w = p.as_slice().to_vec();
    w.insert(space, (p.len() + 1) as u32);
    Ok(Permutation::from_word_unchecked(w))
}

/// Deletes `n` from `q` and reads back the label of the space it occupied.
pub fn phi_maj_inv(q: &Permutation, r: u32) -> Result<(Permutation, usize)> {
    let n = q.len();
    if n == 0 {
        return Err(Error::Recovery {
            step: "phi_maj_inv",
            perm: q.to_string(),
            reason: "the empty permutation has no parent".to_string(),
        });
    }
    let space = q.position_of(n as u32).expect("n present") - 1;
    let mut w = q.as_slice().to_vec();
    w.remove(space);
    let parent = Permutation::from_word_unchecked(w);
    let c = rmaj_labeling(&parent, r)?.label_of_space(space) as usize;
    Ok((parent, c))
}

/// The g-gap den insertion: looks up the space labeled `c` and its insertion
/// letter `e_y`, shifts the excedance letters from `e_y` upward, and inserts
/// `e_y` at the space. The g-gap Denert statistic grows by exactly `c`.
///
/// ```
/// use mahonian::bijections::phi_den_liu;
/// use mahonian::Permutation;
///
/// let p = Permutation::parse("836295417").unwrap();
/// assert_eq!(phi_den_liu(&p, 4, 3).unwrap().to_string(), "9362(10)85417");
/// ```
pub fn phi_den_liu(p: &Permutation, c: usize, g: u32) -> Result<Permutation> {
    let n = p.len() + 1;
    let (labeling, letters) = liu_den_labeling(p, g)?;
    let space = labeling.space_of_label(c)?;
    let w = p.as_slice();
    if space == n - 1 {
        let mut out = w.to_vec();
        out.push(n as u32);
        return Ok(Permutation::from_word_unchecked(out));
    }
    let x = space + 1;
    let e = exc_letters(w, g, 1);
    let e_y = letters.letter(space).expect("liu letters are total");
    let y0 = e.iter().position(|&v| v == e_y).unwrap_or(e.len());
    let mut out = shift_letters_up(w, &e, y0, n as u32);
    out.insert(x - 1, e_y);
    Ok(Permutation::from_word_unchecked(out))
}

/// Inverse of [`phi_den_liu`]: locates the insertion index (the greatest
/// level-`g+1` grande-fixed place, or the position of `n` when the word is
/// too short to carry excedances), removes it, and unshifts the letters.
pub fn phi_den_liu_inv(q: &Permutation, g: u32) -> Result<(Permutation, usize)> {
    let n = q.len();
    if n == 0 {
        return Err(Error::Recovery {
            step: "phi_den_liu_inv",
            perm: q.to_string(),
            reason: "the empty permutation has no parent".to_string(),
        });
    }
    let w = q.as_slice();
    let x = if n <= g as usize {
        q.position_of(n as u32).expect("n present")
    } else {
        *word_grande_fixed_places(w, g, g + 1)
            .last()
            .ok_or_else(|| Error::Recovery {
                step: "phi_den_liu_inv",
                perm: q.to_string(),
                reason: "no grande-fixed place".to_string(),
            })?
    };
    let inserted = w[x - 1];
    let mut sw = w.to_vec();
    sw.remove(x - 1);
    let shifted: Vec<u32> = exc_letters(&sw, g, g + 1)
        .into_iter()
        .filter(|&e| e > inserted)
        .collect();
    let parent_word = shift_letters_down(&sw, &shifted, inserted);
    let parent = Permutation::new(parent_word).map_err(|e| Error::Recovery {
        step: "phi_den_liu_inv",
        perm: q.to_string(),
        reason: e.to_string(),
    })?;
    let (labeling, _) = liu_den_labeling(&parent, g)?;
    let c = labeling.label_of_space(x - 1) as usize;
    Ok((parent, c))
}

/// Shared body of the chain-insertion step used by the index-set maps: with
/// the positions `chain = [i_1 < ... < i_k]` and `x = i_y`, writes
/// `replacement` at `x`, moves each chain letter one link up, and inserts the
/// last chain letter before position `ell`.
fn chain_insert(
    sigma: &[u32],
    chain: &[usize],
    x: usize,
    replacement: u32,
    ell: u32,
) -> Vec<u32> {
    let y0 = chain
        .iter()
        .position(|&i| i == x)
        .expect("x lies on the chain");
    let mut out = sigma.to_vec();
    out[x - 1] = replacement;
    for j in y0 + 1..chain.len() {
        out[chain[j] - 1] = sigma[chain[j - 1] - 1];
    }
    out.insert(ell as usize - 1, sigma[chain[chain.len() - 1] - 1]);
    out
}

fn alpha_impl(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<(Permutation, MapTrace)> {
    let n = p.len() + 1;
    let labeling = gl_den_labeling(p, g, ell)?;
    let sp = resolve_space(&labeling, c)?;
    let prof = excedance_profile(p, g, ell);
    let x = match sp {
        SpacePos::BeforeIndex(x) if prof.set_a.contains(&x) => x,
        other => return Err(domain_error("alpha", p, c, other, g, ell)),
    };
    let mut trace = MapTrace::new("alpha");
    trace.push_value("x", x as i64);
    let e = &prof.letters;
    let t0 = prof.t_index - 1;
    let e_t = e[t0];
    trace.push_value("e_t", i64::from(e_t));
    let sigma = shift_letters_up(p.as_slice(), e, t0, n as u32);
    trace.push_word("sigma", &sigma);
    let out = chain_insert(&sigma, &prof.set_a, x, e_t, ell);
    trace.push_word("result", &out);
    Ok((Permutation::from_word_unchecked(out), trace))
}

fn beta_impl(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<(Permutation, MapTrace)> {
    let n = p.len() + 1;
    let labeling = gl_den_labeling(p, g, ell)?;
    let sp = resolve_space(&labeling, c)?;
    let prof = excedance_profile(p, g, ell);
    let x = match sp {
        SpacePos::BeforeIndex(x) if prof.set_b.contains(&x) => x,
        other => return Err(domain_error("beta", p, c, other, g, ell)),
    };
    let mut trace = MapTrace::new("beta");
    trace.push_value("x", x as i64);
    let e = &prof.letters;
    let t0 = prof.t_index - 1;
    let e_t = if t0 < e.len() { e[t0] } else { n as u32 };
    trace.push_value("e_t", i64::from(e_t));
    let sigma = shift_letters_up(p.as_slice(), e, t0, n as u32);
    trace.push_word("sigma", &sigma);
    let theta = chain_insert(&sigma, &prof.set_b, x, e_t, ell);
    trace.push_word("theta", &theta);
    let high_left = exc_letters_left_of(&theta, g, g + ell, ell as usize);
    let out = cycle_letters_down(&theta, &high_left);
    trace.push_word("result", &out);
    Ok((Permutation::from_word_unchecked(out), trace))
}

fn gamma_impl(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<(Permutation, MapTrace)> {
    let n = p.len() + 1;
    let labeling = gl_den_labeling(p, g, ell)?;
    let sp = resolve_space(&labeling, c)?;
    let prof = excedance_profile(p, g, ell);
    let x = match sp {
        SpacePos::BeforeIndex(x) if prof.set_c.contains(&x) => x,
        other => return Err(domain_error("gamma", p, c, other, g, ell)),
    };
    let mut trace = MapTrace::new("gamma");
    trace.push_value("x", x as i64);
    let w = p.as_slice();
    let p_x = w[x - 1];
    let e = &prof.letters;
    let t0 = prof.t_index - 1;
    let e_t = if t0 < e.len() { e[t0] } else { n as u32 };
    trace.push_value("e_t", i64::from(e_t));
    let sigma = shift_letters_up(w, e, t0, n as u32);
    trace.push_word("sigma", &sigma);
    // Step 2: from the target letter down to its value's own index block.
    let y = p_x as usize - g as usize + 1;
    trace.push_value("y", y as i64);
    // Non-excedance positions of sigma in [y, ell), descending.
    let chain: Vec<usize> = (y..ell as usize)
        .rev()
        .filter(|&i| !is_exc_place(&sigma, i, g, ell))
        .collect();
    // Excedance positions left of y whose letter lies in [p_x, e_t).
    let jlist: Vec<usize> = (1..y)
        .filter(|&i| is_exc_place(&sigma, i, g, ell) && sigma[i - 1] >= p_x && sigma[i - 1] < e_t)
        .collect();
    let a_len = jlist.len();
    let p_idx = jlist
        .iter()
        .position(|&i| i == x)
        .expect("x lies in the j-list");
    let mut lambda: Vec<u32> = jlist.iter().map(|&i| sigma[i - 1]).collect();
    lambda.remove(p_idx);
    lambda.insert(a_len - 1 - p_idx, e_t);
    trace.push_word("lambda", &lambda);
    let mut theta = sigma.clone();
    let full_chain: Vec<usize> = chain.iter().copied().chain(std::iter::once(x)).collect();
    for j in 0..chain.len() {
        theta[full_chain[j] - 1] = sigma[full_chain[j + 1] - 1];
    }
    for (idx, &pos) in jlist.iter().enumerate() {
        theta[pos - 1] = lambda[idx];
    }
    theta.insert(ell as usize - 1, sigma[full_chain[0] - 1]);
    trace.push_word("theta", &theta);
    // Step 3: pull e_t back to its mirrored seat among the high letters left of y.
    let klist: Vec<usize> = (1..y)
        .filter(|&i| is_exc_place(&theta, i, g, g + ell))
        .collect();
    let b_len = klist.len();
    let q_idx = klist
        .iter()
        .position(|&i| theta[i - 1] == e_t)
        .expect("e_t sits left of y");
    let mut mu: Vec<u32> = klist.iter().map(|&i| theta[i - 1]).collect();
    mu.remove(q_idx);
    mu.insert(b_len - 1 - q_idx, e_t);
    trace.push_word("mu", &mu);
    let mut tau = theta.clone();
    for (idx, &pos) in klist.iter().enumerate() {
        tau[pos - 1] = mu[idx];
    }
    trace.push_word("tau", &tau);
    // Step 4
    let high_left = exc_letters_left_of(&tau, g, g + ell, ell as usize);
    let out = cycle_letters_down(&tau, &high_left);
    trace.push_word("result", &out);
    Ok((Permutation::from_word_unchecked(out), trace))
}

fn delta_impl(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<(Permutation, MapTrace)> {
    let n = p.len() + 1;
    let labeling = gl_den_labeling(p, g, ell)?;
    let sp = resolve_space(&labeling, c)?;
    let mut trace = MapTrace::new("delta");
    let w = p.as_slice();
    match sp {
        SpacePos::Trailing => {
            let mut out = w.to_vec();
            out.push(n as u32);
            trace.push_word("result", &out);
            Ok((Permutation::from_word_unchecked(out), trace))
        }
        SpacePos::BeforeIndex(x) if x >= ell as usize => {
            trace.push_value("x", x as i64);
            let letters = ggl_insertion_letters(p, g, ell)?;
            let e_y = letters.letter(x - 1).expect("space at or right of ell");
            trace.push_value("insertion_letter", i64::from(e_y));
            let high = exc_letters(w, g, g + ell);
            let y0 = high.iter().position(|&v| v == e_y).unwrap_or(high.len());
            let sigma = shift_letters_up(w, &high, y0, n as u32);
            trace.push_word("sigma", &sigma);
            let mut out = sigma;
            out.insert(x - 1, e_y);
            trace.push_word("result", &out);
            Ok((Permutation::from_word_unchecked(out), trace))
        }
        other => Err(domain_error("delta", p, c, other, g, ell)),
    }
}

fn beta_star_impl(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<(Permutation, MapTrace)> {
    let n = p.len() + 1;
    let labeling = ggl_den_labeling(p, g, ell)?;
    let sp = resolve_space(&labeling, c)?;
    let prof = excedance_profile(p, g, ell);
    let x = match sp {
        SpacePos::BeforeIndex(x) if prof.set_b_star.contains(&x) => x,
        other => return Err(domain_error("beta_star", p, c, other, g, ell)),
    };
    let mut trace = MapTrace::new("beta_star");
    trace.push_value("x", x as i64);
    let high = prof.high_letters();
    let e_1 = high.first().copied().unwrap_or(n as u32);
    trace.push_value("e_1", i64::from(e_1));
    let sigma = shift_letters_up(p.as_slice(), high, 0, n as u32);
    trace.push_word("sigma", &sigma);
    let theta = chain_insert(&sigma, &prof.set_b_star, x, e_1, ell);
    trace.push_word("theta", &theta);
    let high_left = exc_letters_left_of(&theta, g, g + ell, ell as usize);
    let out = cycle_letters_down(&theta, &high_left);
    trace.push_word("result", &out);
    Ok((Permutation::from_word_unchecked(out), trace))
}

macro_rules! map_pair {
    ($plain:ident, $traced:ident, $impl:ident, $doc:literal) => {
        #[doc = $doc]
        pub fn $plain(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<Permutation> {
            $impl(p, c, g, ell).map(|(q, _)| q)
        }

        #[doc = $doc]
        #[doc = "\n\nAlso returns the intermediate words and bookkeeping values."]
        pub fn $traced(
            p: &Permutation,
            c: usize,
            g: u32,
            ell: u32,
        ) -> Result<(Permutation, MapTrace)> {
            $impl(p, c, g, ell)
        }
    };
}

map_pair!(
    alpha,
    alpha_traced,
    alpha_impl,
    "Insertion branch for spaces before indices in `A`: raises the gap/level \
     excedance count by one and both Denert statistics by the label."
);
map_pair!(
    beta,
    beta_traced,
    beta_impl,
    "Insertion branch for spaces before indices in `B`: preserves the \
     gap/level excedance count, raises the gap/level Denert statistic by the \
     label, and lands on proper permutations."
);
map_pair!(
    gamma,
    gamma_traced,
    gamma_impl,
    "Insertion branch for spaces before indices in `C`: preserves the \
     gap/level excedance count, raises the gap/level Denert statistic by the \
     label, and lands on improper permutations."
);
map_pair!(
    delta,
    delta_traced,
    delta_impl,
    "Insertion branch for the trailing space and spaces at or right of \
     position `ell`: raises both Denert statistics by the label and lands \
     outside the grande-fixed-free class."
);
map_pair!(
    beta_star,
    beta_star_traced,
    beta_star_impl,
    "Insertion branch for spaces before indices in `B*` under the \
     level-`g+ell` labeling: preserves the gap/level excedance count and \
     raises the level-`g+ell` Denert statistic by the label."
);

/// The gap/level den insertion: dispatches on where the space labeled `c`
/// sits in the gap/level den labeling of `p`. The gap/level Denert statistic
/// of the image exceeds that of `p` by exactly `c`.
pub fn phi_den(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<Permutation> {
    phi_den_traced(p, c, g, ell).map(|(q, _)| q)
}

/// [`phi_den`] with the branch trace.
pub fn phi_den_traced(
    p: &Permutation,
    c: usize,
    g: u32,
    ell: u32,
) -> Result<(Permutation, MapTrace)> {
    let labeling = gl_den_labeling(p, g, ell)?;
    match resolve_space(&labeling, c)? {
        SpacePos::Trailing => delta_impl(p, c, g, ell),
        SpacePos::BeforeIndex(x) => {
            let prof = excedance_profile(p, g, ell);
            if prof.set_a.contains(&x) {
                alpha_impl(p, c, g, ell)
            } else if prof.set_b.contains(&x) {
                beta_impl(p, c, g, ell)
            } else if prof.set_c.contains(&x) {
                gamma_impl(p, c, g, ell)
            } else {
                delta_impl(p, c, g, ell)
            }
        }
    }
}

/// The level-`g+ell` den insertion: dispatches on the level-`g+ell` den
/// labeling of `p`. The level-`g+ell` Denert statistic of the image exceeds
/// that of `p` by exactly `c`.
pub fn psi_den(p: &Permutation, c: usize, g: u32, ell: u32) -> Result<Permutation> {
    psi_den_traced(p, c, g, ell).map(|(q, _)| q)
}

/// [`psi_den`] with the branch trace.
pub fn psi_den_traced(
    p: &Permutation,
    c: usize,
    g: u32,
    ell: u32,
) -> Result<(Permutation, MapTrace)> {
    let labeling = ggl_den_labeling(p, g, ell)?;
    // The two labelings agree on the spaces the alpha and delta branches
    // consume, so those branches can resolve `c` through their own labeling.
    match resolve_space(&labeling, c)? {
        SpacePos::Trailing => delta_impl(p, c, g, ell),
        SpacePos::BeforeIndex(x) => {
            let prof = excedance_profile(p, g, ell);
            if prof.set_a.contains(&x) {
                alpha_impl(p, c, g, ell)
            } else if prof.set_b_star.contains(&x) {
                beta_star_impl(p, c, g, ell)
            } else {
                delta_impl(p, c, g, ell)
            }
        }
    }
}

fn recovery_error(step: &'static str, q: &Permutation, reason: impl Into<String>) -> Error {
    Error::Recovery {
        step,
        perm: q.to_string(),
        reason: reason.into(),
    }
}

/// Undoes the `alpha` branch on a member of `S1`.
fn alpha_recover(q: &Permutation, g: u32, ell: u32) -> Result<Permutation> {
    let w = q.as_slice();
    let high = g + ell;
    let eh = exc_letters(w, g, high);
    let e_1 = *eh
        .first()
        .ok_or_else(|| recovery_error("alpha_recover", q, "no high excedance letter"))?;
    let x = pos_of(w, e_1) + 1;
    if x > ell as usize {
        return Err(recovery_error(
            "alpha_recover",
            q,
            "smallest high excedance letter sits right of position ell",
        ));
    }
    // High excedance positions in [x, ell]; the chain ends at ell.
    let jlist: Vec<usize> = (x..=ell as usize)
        .filter(|&i| is_exc_place(w, i, g, high))
        .collect();
    if jlist.last() != Some(&(ell as usize)) {
        return Err(recovery_error(
            "alpha_recover",
            q,
            "position ell carries no high excedance letter",
        ));
    }
    let mut sw = w.to_vec();
    for i in 1..jlist.len() {
        sw[jlist[i - 1] - 1] = w[jlist[i] - 1];
    }
    sw.remove(ell as usize - 1);
    let ep = exc_letters(&sw, g, high);
    let parent_word = shift_letters_down(&sw, &ep, e_1);
    Permutation::new(parent_word).map_err(|e| recovery_error("alpha_recover", q, e.to_string()))
}

/// Undoes the `beta` branch (`chain_level = ell`) or the `beta_star` branch
/// (`chain_level = g + ell`).
fn beta_recover(q: &Permutation, g: u32, ell: u32, chain_level: u32) -> Result<Permutation> {
    let w = q.as_slice();
    let high = g + ell;
    let f = exc_letters_left_of(w, g, high, ell as usize);
    let f_m = *f
        .last()
        .ok_or_else(|| recovery_error("beta_recover", q, "no high excedance letter left of ell"))?;
    let x = pos_of(w, f_m) + 1;
    let theta = cycle_letters_up(w, &f);
    // Non-excedance positions (at the chain level) in (x, ell].
    let jlist: Vec<usize> = (x + 1..=ell as usize)
        .filter(|&i| !is_exc_place(&theta, i, g, chain_level))
        .collect();
    if jlist.last() != Some(&(ell as usize)) {
        return Err(recovery_error(
            "beta_recover",
            q,
            "position ell carries an excedance letter",
        ));
    }
    let full: Vec<usize> = std::iter::once(x).chain(jlist.iter().copied()).collect();
    let mut sw = theta.clone();
    for i in 1..full.len() {
        sw[full[i - 1] - 1] = theta[full[i] - 1];
    }
    sw.remove(ell as usize - 1);
    let letters = exc_letters(&sw, g, high);
    let parent_word = shift_letters_down(&sw, &letters, theta[x - 1]);
    Permutation::new(parent_word).map_err(|e| recovery_error("beta_recover", q, e.to_string()))
}

/// Undoes the `gamma` branch on an improper permutation.
fn gamma_recover(q: &Permutation, g: u32, ell: u32) -> Result<Permutation> {
    let w = q.as_slice();
    let high = g + ell;
    // Step 1: rotate the high letters left of ell back.
    let ebar = exc_letters_left_of(w, g, high, ell as usize);
    let e_1 = *ebar.first().ok_or_else(|| {
        recovery_error("gamma_recover", q, "no high excedance letter left of ell")
    })?;
    let e_m = *ebar.last().unwrap();
    let z = pos_of(w, e_m) + 1;
    let tau = cycle_letters_up(w, &ebar);
    // Step 2: walk the non-excedance chain down from ell and find the
    // improperness witness, the first chain letter that is >= ell and large
    // for the next chain position.
    let cdesc: Vec<usize> = (z + 1..=ell as usize)
        .rev()
        .filter(|&i| !is_exc_place(&tau, i, g, ell))
        .collect();
    if cdesc.first() != Some(&(ell as usize)) {
        return Err(recovery_error(
            "gamma_recover",
            q,
            "position ell carries an excedance letter",
        ));
    }
    let kp = (0..cdesc.len())
        .find(|&j| {
            let next = if j + 1 < cdesc.len() { cdesc[j + 1] } else { z };
            let v = tau[cdesc[j] - 1];
            u64::from(v) >= next as u64 + u64::from(g) && u64::from(v) >= u64::from(ell)
        })
        .ok_or_else(|| recovery_error("gamma_recover", q, "no improperness witness on the chain"))?;
    let c_k = cdesc[kp];
    let y = tau[c_k - 1] as usize - g as usize + 1;
    // Undo the mu rotation among the high letters left of y.
    let dlist: Vec<usize> = (1..y)
        .filter(|&i| is_exc_place(&tau, i, g, high))
        .collect();
    let v_len = dlist.len();
    let q_idx = dlist
        .iter()
        .position(|&i| i == z)
        .ok_or_else(|| recovery_error("gamma_recover", q, "rotated letter lost left of y"))?;
    let mut mu: Vec<u32> = dlist.iter().map(|&i| tau[i - 1]).collect();
    mu.remove(q_idx);
    mu.insert(v_len - 1 - q_idx, e_1);
    let mut theta = tau.clone();
    for (idx, &pos) in dlist.iter().enumerate() {
        theta[pos - 1] = mu[idx];
    }
    // Step 3: undo the lambda rotation and the chain shift.
    let t_ck = theta[c_k - 1];
    let flist: Vec<usize> = (1..y)
        .filter(|&i| is_exc_place(&theta, i, g, ell) && theta[i - 1] > t_ck && theta[i - 1] <= e_1)
        .collect();
    let w_len = flist.len();
    let p_idx = flist
        .iter()
        .position(|&i| theta[i - 1] == e_1)
        .ok_or_else(|| recovery_error("gamma_recover", q, "pivot letter lost left of y"))?;
    let mut lambda: Vec<u32> = flist.iter().map(|&i| theta[i - 1]).collect();
    lambda.remove(p_idx);
    lambda.insert(w_len - 1 - p_idx, e_1);
    let mut sw = theta.clone();
    for (idx, &pos) in flist.iter().enumerate() {
        sw[pos - 1] = lambda[idx];
    }
    for j in 1..=kp {
        sw[cdesc[j] - 1] = theta[cdesc[j - 1] - 1];
    }
    let pivot = sw
        .iter()
        .position(|&v| v == e_1)
        .ok_or_else(|| recovery_error("gamma_recover", q, "pivot letter vanished"))?;
    sw[pivot] = t_ck;
    sw.remove(ell as usize - 1);
    // Step 4
    let eb = exc_letters(&sw, g, high);
    let parent_word = shift_letters_down(&sw, &eb, e_1);
    Permutation::new(parent_word).map_err(|e| recovery_error("gamma_recover", q, e.to_string()))
}

/// Undoes the `delta` branch using the greatest grande-fixed place.
fn delta_recover(q: &Permutation, g: u32, ell: u32) -> Result<Permutation> {
    let w = q.as_slice();
    let high = g + ell;
    let x = *word_grande_fixed_places(w, g, high)
        .last()
        .ok_or_else(|| recovery_error("delta_recover", q, "no grande-fixed place"))?;
    let inserted = w[x - 1];
    let mut sw = w.to_vec();
    sw.remove(x - 1);
    let shifted: Vec<u32> = exc_letters(&sw, g, high)
        .into_iter()
        .filter(|&e| e > inserted)
        .collect();
    let parent_word = shift_letters_down(&sw, &shifted, inserted);
    Permutation::new(parent_word).map_err(|e| recovery_error("delta_recover", q, e.to_string()))
}

fn checked_label(
    step: &'static str,
    q: &Permutation,
    child_stat: u64,
    parent_stat: u64,
) -> Result<usize> {
    child_stat
        .checked_sub(parent_stat)
        .filter(|&c| (c as usize) < q.len())
        .map(|c| c as usize)
        .ok_or_else(|| recovery_error(step, q, "statistic delta is not a valid label"))
}

/// Inverse of [`phi_den`]: classifies `q`, runs the matching recovery, and
/// reads the label off the gap/level Denert delta.
pub fn phi_den_inv(q: &Permutation, g: u32, ell: u32) -> Result<(Permutation, usize)> {
    let n = q.len();
    if (n as u64) < u64::from(g) + u64::from(ell) {
        return Err(Error::SizeBelowGapPlusLevel {
            what: "phi_den_inv",
            n,
            g,
            ell,
        });
    }
    let parent = match class_of(q, g, ell)? {
        ClassMembership::S1 => alpha_recover(q, g, ell)?,
        ClassMembership::S2Proper => beta_recover(q, g, ell, ell)?,
        ClassMembership::S3Improper => gamma_recover(q, g, ell)?,
        ClassMembership::OutsideSngl => delta_recover(q, g, ell)?,
    };
    let c = checked_label(
        "phi_den_inv",
        q,
        g_den_l(q, g, ell),
        g_den_l(&parent, g, ell),
    )?;
    Ok((parent, c))
}

/// Inverse of [`psi_den`]: classifies `q`, runs the matching recovery, and
/// reads the label off the level-`g+ell` Denert delta.
pub fn psi_den_inv(q: &Permutation, g: u32, ell: u32) -> Result<(Permutation, usize)> {
    let n = q.len();
    if (n as u64) < u64::from(g) + u64::from(ell) {
        return Err(Error::SizeBelowGapPlusLevel {
            what: "psi_den_inv",
            n,
            g,
            ell,
        });
    }
    let parent = match class_of(q, g, ell)? {
        ClassMembership::S1 => alpha_recover(q, g, ell)?,
        ClassMembership::S2Proper | ClassMembership::S3Improper => {
            beta_recover(q, g, ell, g + ell)?
        }
        ClassMembership::OutsideSngl => delta_recover(q, g, ell)?,
    };
    let high = g + ell;
    let c = checked_label(
        "psi_den_inv",
        q,
        g_den_l(q, g, high),
        g_den_l(&parent, g, high),
    )?;
    Ok((parent, c))
}

/// Which Denert statistic the equidistribution bijection targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenVariant {
    /// Transport `(rdes, rmaj)` onto `(g exc_ell, g den_ell)`.
    DenL,
    /// Transport `(rdes, rmaj)` onto `(g exc_ell, g den_{g+ell})`.
    DenGl,
}

/// Default cap on the base-case size whose symmetric group may be enumerated
/// by [`EquidistBase::new`].
pub const DEFAULT_BASE_CAP: usize = 10;

/// The size-`n0` base bijection of the equidistribution map. For the
/// level-`g+ell` variant it is the identity (both statistics reduce to the
/// inversion number below size `g + ell`); for the gap/level variant it
/// matches, value by value, the i-th lexicographic permutation with a given
/// r-major index to the i-th with the same gap/level Denert statistic.
#[derive(Debug, Clone)]
pub struct EquidistBase {
    g: u32,
    ell: u32,
    variant: DenVariant,
    n0: usize,
    table: Option<Vec<usize>>,
}

impl EquidistBase {
    pub fn new(g: u32, ell: u32, variant: DenVariant, n0: usize, cap: usize) -> Result<Self> {
        assert!(g >= 1 && ell >= 1, "g and ell must be >= 1");
        if n0 > cap {
            return Err(Error::CapExceeded { n: n0, cap });
        }
        let table = match variant {
            DenVariant::DenGl => None,
            DenVariant::DenL => {
                let r = g + ell - 1;
                let mut by_rmaj: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
                let mut by_den: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
                for (rank, p) in all_permutations(n0).enumerate() {
                    by_rmaj.entry(r_maj(&p, r)).or_default().push(rank);
                    by_den.entry(g_den_l(&p, g, ell)).or_default().push(rank);
                }
                let mut table = vec![0usize; factorial(n0) as usize];
                for (value, sources) in &by_rmaj {
                    let targets = by_den.get(value).ok_or_else(|| {
                        Error::Internal(format!("no den bucket for statistic value {value}"))
                    })?;
                    if targets.len() != sources.len() {
                        return Err(Error::Internal(format!(
                            "bucket size mismatch at statistic value {value}"
                        )));
                    }
                    for (&a, &b) in sources.iter().zip(targets) {
                        table[a] = b;
                    }
                }
                Some(table)
            }
        };
        Ok(Self {
            g,
            ell,
            variant,
            n0,
            table,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn variant(&self) -> DenVariant {
        self.variant
    }

    fn apply(&self, p: &Permutation) -> Result<Permutation> {
        if p.len() != self.n0 {
            return Err(Error::Internal(format!(
                "base map built for size {} applied to size {}",
                self.n0,
                p.len()
            )));
        }
        Ok(match &self.table {
            None => p.clone(),
            Some(table) => nth_permutation(self.n0, table[lex_rank(p) as usize] as u128),
        })
    }
}

/// The composed equidistribution bijection on `S_n`: strips the largest
/// letters with the r-maj insertion (recording their labels), maps the
/// remaining base permutation through [`EquidistBase`], and re-inserts the letters
/// with the matching den insertion. The image carries
/// `(g exc_ell, chosen den)` equal to the `(rdes, rmaj)` of the input, with
/// `r = g + ell - 1`.
pub fn equidist_map(q: &Permutation, g: u32, ell: u32, variant: DenVariant) -> Result<Permutation> {
    let r = g + ell - 1;
    let n0 = q.len().min(r as usize);
    let base = EquidistBase::new(g, ell, variant, n0, DEFAULT_BASE_CAP)?;
    equidist_map_with_base(q, g, ell, &base)
}

/// [`equidist_map`] against a prebuilt base bijection, for callers mapping
/// many permutations of the same size.
pub fn equidist_map_with_base(
    q: &Permutation,
    g: u32,
    ell: u32,
    base: &EquidistBase,
) -> Result<Permutation> {
    let r = g + ell - 1;
    if q.len().min(r as usize) != base.n0() || (g, ell) != (base.g, base.ell) {
        return Err(Error::Internal(
            "base bijection does not match the requested parameters".to_string(),
        ));
    }
    let mut labels = Vec::new();
    let mut current = q.clone();
    while current.len() > base.n0() {
        let (parent, c) = phi_maj_inv(&current, r)?;
        labels.push(c);
        current = parent;
    }
    let mut out = base.apply(&current)?;
    for &c in labels.iter().rev() {
        out = match base.variant {
            DenVariant::DenL => phi_den(&out, c, g, ell)?,
            DenVariant::DenGl => psi_den(&out, c, g, ell)?,
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::stats::{g_exc_l, r_des};

    fn p(text: &str) -> Permutation {
        Permutation::parse(text).unwrap()
    }

    /// Intermediate words are not permutations of 1..n; parse them raw.
    fn w(text: &str) -> Vec<u32> {
        crate::perm::parse_values(text).unwrap()
    }

    #[test]
    fn phi_maj_worked_examples() {
        let q = p("836295417");
        assert_eq!(phi_maj(&q, 4, 3).unwrap(), p("836(10)295417"));
        assert_eq!(phi_maj(&q, 6, 3).unwrap(), p("(10)836295417"));
        assert_eq!(phi_maj(&q, 0, 3).unwrap(), p("836295417(10)"));
        assert_eq!(phi_maj(&Permutation::empty(), 0, 2).unwrap(), p("1"));
    }

    #[test]
    fn phi_maj_round_trip_exhaustive() {
        for r in 1..=5u32 {
            for q in all_permutations(5) {
                let (parent, c) = phi_maj_inv(&q, r).unwrap();
                assert_eq!(phi_maj(&parent, c, r).unwrap(), q);
            }
        }
        assert_eq!(
            phi_maj_inv(&p("1"), 1).unwrap(),
            (Permutation::empty(), 0)
        );
    }

    #[test]
    fn phi_den_liu_worked_example() {
        let q = p("836295417");
        assert_eq!(phi_den_liu(&q, 4, 3).unwrap(), p("9362(10)85417"));
        assert_eq!(phi_den_liu(&q, 0, 3).unwrap(), p("836295417(10)"));
    }

    #[test]
    fn phi_den_liu_round_trip_exhaustive() {
        for g in 1..=6u32 {
            for n in 1..=6usize {
                for parent in all_permutations(n - 1) {
                    for c in 0..n {
                        let q = phi_den_liu(&parent, c, g).unwrap();
                        let (back, c_back) = phi_den_liu_inv(&q, g).unwrap();
                        assert_eq!((back, c_back), (parent.clone(), c), "g={g} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_worked_example() {
        let (q, trace) = alpha_traced(&p("596284317"), 8, 3, 6).unwrap();
        assert_eq!(q, p("59628(10)4317"));
        assert_eq!(trace.word("sigma").unwrap(), w("5(10)6284317"));
        let d = g_den_l(&q, 3, 6) - g_den_l(&p("596284317"), 3, 6);
        assert_eq!(d, 8);
    }

    #[test]
    fn beta_worked_example() {
        let (q, trace) = beta_traced(&p("596284317"), 6, 3, 6).unwrap();
        assert_eq!(q, p("(10)965824317"));
        assert_eq!(trace.word("theta").unwrap(), w("9(10)65824317"));
    }

    #[test]
    fn gamma_worked_example() {
        let (q, trace) = gamma_traced(&p("7962(10)48315"), 6, 3, 6).unwrap();
        assert_eq!(q, p("9(11)76(10)248315"));
        assert_eq!(trace.word("sigma").unwrap(), w("7(10)62(11)48315"));
        assert_eq!(trace.word("theta").unwrap(), w("9(10)76(11)248315"));
        assert_eq!(trace.word("tau").unwrap(), w("(10)976(11)248315"));
        assert_eq!(trace.word("lambda").unwrap(), &[9, 7]);
        assert_eq!(trace.word("mu").unwrap(), &[10, 9]);
    }

    #[test]
    fn delta_worked_example() {
        let q = p("596284317");
        let (out, trace) = delta_traced(&q, 9, 3, 6).unwrap();
        assert_eq!(out, p("5(10)62894317"));
        assert_eq!(trace.value("insertion_letter"), Some(9));
        assert_eq!(delta(&q, 0, 3, 6).unwrap(), p("596284317(10)"));
    }

    #[test]
    fn beta_star_worked_example() {
        let (q, trace) = beta_star_traced(&p("596284317"), 4, 3, 6).unwrap();
        assert_eq!(q, p("(10)956284317"));
        assert_eq!(trace.word("theta").unwrap(), w("9(10)56284317"));
    }

    #[test]
    fn labels_out_of_range_are_rejected() {
        let q = p("596284317");
        assert!(matches!(
            phi_maj(&q, 10, 3),
            Err(Error::LabelOutOfRange { label: 10, max: 9 })
        ));
        assert!(matches!(
            phi_den(&q, 42, 3, 6),
            Err(Error::LabelOutOfRange { label: 42, .. })
        ));
    }

    #[test]
    fn map_domain_errors_name_the_set() {
        // Label 6 sits before index 1, which belongs to B.
        match alpha(&p("596284317"), 6, 3, 6) {
            Err(Error::MapDomain { map, found, .. }) => {
                assert_eq!(map, "alpha");
                assert_eq!(found, "B");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn phi_den_dispatch_reproduces_branch_examples() {
        let q = p("596284317");
        assert_eq!(phi_den(&q, 8, 3, 6).unwrap(), p("59628(10)4317"));
        assert_eq!(phi_den(&q, 6, 3, 6).unwrap(), p("(10)965824317"));
        assert_eq!(phi_den(&q, 9, 3, 6).unwrap(), p("5(10)62894317"));
        assert_eq!(
            phi_den(&p("7962(10)48315"), 6, 3, 6).unwrap(),
            p("9(11)76(10)248315")
        );
    }

    #[test]
    fn psi_den_dispatch_reproduces_branch_examples() {
        let q = p("596284317");
        assert_eq!(psi_den(&q, 4, 3, 6).unwrap(), p("(10)956284317"));
        assert_eq!(psi_den(&q, 8, 3, 6).unwrap(), p("59628(10)4317"));
    }

    #[test]
    fn phi_den_bijective_with_round_trip() {
        let (g, ell, n) = (2, 3, 6);
        let mut images = std::collections::HashSet::new();
        for parent in all_permutations(n - 1) {
            for c in 0..n {
                let q = phi_den(&parent, c, g, ell).unwrap();
                assert!(images.insert(q.clone()));
                assert_eq!(phi_den_inv(&q, g, ell).unwrap(), (parent.clone(), c));
            }
        }
        assert_eq!(images.len() as u128, factorial(n));
    }

    #[test]
    fn psi_den_bijective_with_round_trip() {
        let (g, ell, n) = (2, 3, 6);
        let mut images = std::collections::HashSet::new();
        for parent in all_permutations(n - 1) {
            for c in 0..n {
                let q = psi_den(&parent, c, g, ell).unwrap();
                assert!(images.insert(q.clone()));
                assert_eq!(psi_den_inv(&q, g, ell).unwrap(), (parent.clone(), c));
            }
        }
        assert_eq!(images.len() as u128, factorial(n));
    }

    #[test]
    fn phi_den_at_level_one_matches_liu() {
        for g in 1..=3u32 {
            for n in (g as usize + 1)..=6 {
                for parent in all_permutations(n - 1) {
                    for c in 0..n {
                        assert_eq!(
                            phi_den(&parent, c, g, 1).unwrap(),
                            phi_den_liu(&parent, c, g).unwrap(),
                            "{parent} c={c} g={g}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn equidist_base_case_is_identity_for_gl_variant() {
        // Below g + ell both rmaj and the level-(g+ell) den reduce to inv.
        for q in all_permutations(4) {
            let image = equidist_map(&q, 2, 3, DenVariant::DenGl).unwrap();
            assert_eq!(image, q);
        }
    }

    #[test]
    fn equidist_image_distribution_matches_on_s4() {
        // At (g, ell) = (2, 2) the images of S_4 carry (2exc_2, 2den_4)
        // distributed exactly as (3des, 3maj) over the inputs.
        let mut lhs = std::collections::BTreeMap::new();
        let mut rhs = std::collections::BTreeMap::new();
        for q in all_permutations(4) {
            let image = equidist_map(&q, 2, 2, DenVariant::DenGl).unwrap();
            *lhs.entry((r_des(&q, 3), r_maj(&q, 3))).or_insert(0u32) += 1;
            *rhs.entry((g_exc_l(&image, 2, 2), g_den_l(&image, 2, 4)))
                .or_insert(0u32) += 1;
        }
        assert_eq!(lhs, rhs);
        assert_eq!(lhs[&(0, 2)], 5);
        assert_eq!(lhs[&(1, 4)], 2);
    }

    #[test]
    fn equidist_transports_statistics_on_s5() {
        for (g, ell) in [(1, 1), (2, 2), (1, 3), (3, 1), (2, 3)] {
            let r = g + ell - 1;
            for variant in [DenVariant::DenL, DenVariant::DenGl] {
                let n0 = 5usize.min(r as usize);
                let base = EquidistBase::new(g, ell, variant, n0, DEFAULT_BASE_CAP).unwrap();
                let mut images = std::collections::HashSet::new();
                for q in all_permutations(5) {
                    let image = equidist_map_with_base(&q, g, ell, &base).unwrap();
                    let den = match variant {
                        DenVariant::DenL => g_den_l(&image, g, ell),
                        DenVariant::DenGl => g_den_l(&image, g, g + ell),
                    };
                    assert_eq!(
                        (r_des(&q, r), r_maj(&q, r)),
                        (g_exc_l(&image, g, ell), den),
                        "q={q} g={g} ell={ell} variant={variant:?}"
                    );
                    assert!(images.insert(image));
                }
                assert_eq!(images.len() as u128, factorial(5));
            }
        }
    }

    #[test]
    fn equidist_respects_the_cap() {
        assert!(matches!(
            EquidistBase::new(6, 7, DenVariant::DenL, 12, DEFAULT_BASE_CAP),
            Err(Error::CapExceeded { n: 12, cap: 10 })
        ));
    }
}
