//! Exhaustive verification: joint distributions over symmetric groups, the
//! Mahonian and Euler-Mahonian distribution checks, and per-map check suites
//! that test every claimed statistic delta, codomain, and round trip.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bijections::{
    alpha, beta, beta_star, delta, equidist_map_with_base, gamma, phi_den, phi_den_inv,
    phi_den_liu, phi_den_liu_inv, phi_maj, phi_maj_inv, psi_den, psi_den_inv, DenVariant,
    EquidistBase, InsertionStep, DEFAULT_BASE_CAP,
};
use crate::classify::{class_of, ClassMembership};
use crate::labeling::{ggl_den_labeling, gl_den_labeling};
use crate::perm::{all_permutations, factorial, permutation_range, Permutation};
use crate::stats::{
    den_a, excedance_profile, g_den_l, g_exc_l, is_exc_place, r_des, r_maj, BoundSequence,
};
use crate::{Error, Result};

/// Default cap on the symmetric-group size enumerated by distribution
/// builders; can be raised explicitly by callers that accept the cost.
pub const DEFAULT_N_CAP: usize = 9;

/// A permutation statistic selector, parseable from the compact text forms
/// `inv`, `des`, `maj`, `exc`, `den`, `3des`, `3maj`, `2exc_2`, `2den_4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatSelector {
    Inv,
    Des,
    Maj,
    Exc,
    Den,
    RDes(u32),
    RMaj(u32),
    GExcL { g: u32, ell: u32 },
    GDenL { g: u32, ell: u32 },
}

impl StatSelector {
    pub fn parse(text: &str) -> Result<Self> {
        let err = || Error::UnknownStat(text.to_string());
        let head_end = text.find(|c: char| !c.is_ascii_digit()).ok_or_else(err)?;
        let prefix = &text[..head_end];
        let rest = &text[head_end..];
        let (name, suffix) = match rest.find('_') {
            Some(k) => (&rest[..k], Some(&rest[k + 1..])),
            None => (rest, None),
        };
        let prefix_val = if prefix.is_empty() {
            None
        } else {
            Some(prefix.parse::<u32>().map_err(|_| err())?)
        };
        let suffix_val = match suffix {
            None => None,
            Some(s) => Some(s.parse::<u32>().map_err(|_| err())?),
        };
        let sel = match (name, prefix_val, suffix_val) {
            ("inv", None, None) => StatSelector::Inv,
            ("des", None, None) => StatSelector::Des,
            ("maj", None, None) => StatSelector::Maj,
            ("exc", None, None) => StatSelector::Exc,
            ("den", None, None) => StatSelector::Den,
            ("des", Some(r), None) => StatSelector::RDes(r),
            ("maj", Some(r), None) => StatSelector::RMaj(r),
            ("exc", g, ell) => StatSelector::GExcL {
                g: g.unwrap_or(1),
                ell: ell.unwrap_or(1),
            },
            ("den", g, ell) => StatSelector::GDenL {
                g: g.unwrap_or(1),
                ell: ell.unwrap_or(1),
            },
            _ => return Err(err()),
        };
        match sel {
            StatSelector::RDes(0) | StatSelector::RMaj(0) => Err(err()),
            StatSelector::GExcL { g, ell } | StatSelector::GDenL { g, ell }
                if g == 0 || ell == 0 =>
            {
                Err(err())
            }
            other => Ok(other),
        }
    }

    /// Canonical text form, matching what [`StatSelector::parse`] accepts.
    pub fn label(&self) -> String {
        match self {
            StatSelector::Inv => "inv".to_string(),
            StatSelector::Des => "des".to_string(),
            StatSelector::Maj => "maj".to_string(),
            StatSelector::Exc => "exc".to_string(),
            StatSelector::Den => "den".to_string(),
            StatSelector::RDes(r) => format!("{r}des"),
            StatSelector::RMaj(r) => format!("{r}maj"),
            StatSelector::GExcL { g, ell } => format!("{g}exc_{ell}"),
            StatSelector::GDenL { g, ell } => format!("{g}den_{ell}"),
        }
    }

    pub fn eval(&self, p: &Permutation) -> u64 {
        match *self {
            StatSelector::Inv => p.inversions(),
            StatSelector::Des => r_des(p, 1),
            StatSelector::Maj => r_maj(p, 1),
            StatSelector::Exc => g_exc_l(p, 1, 1),
            StatSelector::Den => g_den_l(p, 1, 1),
            StatSelector::RDes(r) => r_des(p, r),
            StatSelector::RMaj(r) => r_maj(p, r),
            StatSelector::GExcL { g, ell } => g_exc_l(p, g, ell),
            StatSelector::GDenL { g, ell } => g_den_l(p, g, ell),
        }
    }
}

/// The polynomial `sum over S_n of t^{st1} q^{st2}`, stored sparsely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    pub n: usize,
    pub stat1: String,
    pub stat2: String,
    pub terms: BTreeMap<(u32, u32), BigUint>,
}

impl JointDistribution {
    pub fn new(n: usize, stat1: impl Into<String>, stat2: impl Into<String>) -> Self {
        Self {
            n,
            stat1: stat1.into(),
            stat2: stat2.into(),
            terms: BTreeMap::new(),
        }
    }

    fn add(&mut self, t: u32, q: u32) {
        *self.terms.entry((t, q)).or_insert_with(BigUint::zero) += 1u32;
    }

    fn merge(mut self, other: JointDistribution) -> JointDistribution {
        for (key, count) in other.terms {
            *self.terms.entry(key).or_insert_with(BigUint::zero) += count;
        }
        self
    }

    pub fn total(&self) -> BigUint {
        self.terms.values().sum()
    }

    /// Coefficients of the marginal in `q`, as a dense vector.
    pub fn q_marginal(&self) -> Vec<BigUint> {
        let deg = self.terms.keys().map(|&(_, q)| q).max().unwrap_or(0) as usize;
        let mut coeffs = vec![BigUint::zero(); deg + 1];
        for (&(_, q), count) in &self.terms {
            coeffs[q as usize] += count;
        }
        coeffs
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// Exact joint distribution of `(st1, st2)` over `S_n` by full enumeration.
pub fn joint_distribution(
    n: usize,
    st1: &StatSelector,
    st2: &StatSelector,
    cap: usize,
) -> Result<JointDistribution> {
    check_cap(n, cap)?;
    let mut dist = JointDistribution::new(n, st1.label(), st2.label());
    for p in all_permutations(n) {
        dist.add(st1.eval(&p) as u32, st2.eval(&p) as u32);
    }
    Ok(dist)
}

/// [`joint_distribution`] computed by `workers` parallel range workers; the
/// result is identical to the serial one.
pub fn joint_distribution_parallel(
    n: usize,
    st1: &StatSelector,
    st2: &StatSelector,
    cap: usize,
    workers: usize,
) -> Result<JointDistribution> {
    check_cap(n, cap)?;
    let workers = workers.max(1);
    let total = factorial(n);
    let chunks = (workers as u128 * 4).min(total).max(1);
    let chunk_size = total.div_ceil(chunks);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let dist = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let start = (chunk * chunk_size).min(total);
                let count = chunk_size.min(total - start);
                let mut local = JointDistribution::new(n, st1.label(), st2.label());
                if count > 0 {
                    for p in permutation_range(n, start, count) {
                        local.add(st1.eval(&p) as u32, st2.eval(&p) as u32);
                    }
                }
                local
            })
            .reduce(
                || JointDistribution::new(n, st1.label(), st2.label()),
                JointDistribution::merge,
            )
    });
    Ok(dist)
}

/// Coefficients of the q-factorial `[n]_q!  = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: usize) -> Vec<BigUint> {
    let mut coeffs = vec![BigUint::one()];
    for k in 2..=n {
        let mut next = vec![BigUint::zero(); coeffs.len() + k - 1];
        for (i, c) in coeffs.iter().enumerate() {
            for j in 0..k {
                next[i + j] += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub name: String,
    pub params: String,
    pub pass: bool,
    pub counterexample: Option<Counterexample>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

impl CheckReport {
    fn finish(name: &str, params: String, start: Instant, cex: Option<Counterexample>) -> Self {
        Self {
            name: name.to_string(),
            params,
            pass: cex.is_none(),
            counterexample: cex,
            elapsed: start.elapsed(),
        }
    }

    /// One-line rendering: `[PASS] name params (12.345ms)`.
    pub fn render_line(&self) -> String {
        let mut line = format!(
            "[{}] {} {} ({:.3}ms)",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.params,
            self.elapsed.as_secs_f64() * 1e3
        );
        if let Some(cex) = &self.counterexample {
            let _ = write!(
                line,
                "\n    input: {}\n    expected: {}\n    actual: {}",
                cex.input, cex.expected, cex.actual
            );
        }
        line
    }
}

fn cex(input: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>) -> Counterexample {
    Counterexample {
        input: input.into(),
        expected: expected.into(),
        actual: actual.into(),
    }
}

fn distribution_with(
    n: usize,
    st1: &StatSelector,
    st2: &StatSelector,
    cap: usize,
    workers: usize,
) -> Result<JointDistribution> {
    if workers > 1 {
        joint_distribution_parallel(n, st1, st2, cap, workers)
    } else {
        joint_distribution(n, st1, st2, cap)
    }
}

/// Compares the joint distribution of `(rdes, rmaj)` at `r = g + ell - 1`
/// with that of the gap/level excedance number paired against the chosen
/// Denert statistic. Exact equality is required.
pub fn check_euler_mahonian(
    n: usize,
    g: u32,
    ell: u32,
    variant: DenVariant,
    cap: usize,
) -> Result<CheckReport> {
    check_euler_mahonian_with_workers(n, g, ell, variant, cap, 1)
}

/// [`check_euler_mahonian`] with parallel enumeration.
pub fn check_euler_mahonian_with_workers(
    n: usize,
    g: u32,
    ell: u32,
    variant: DenVariant,
    cap: usize,
    workers: usize,
) -> Result<CheckReport> {
    let start = Instant::now();
    let r = g + ell - 1;
    let lhs = distribution_with(
        n,
        &StatSelector::RDes(r),
        &StatSelector::RMaj(r),
        cap,
        workers,
    )?;
    let den = match variant {
        DenVariant::DenL => StatSelector::GDenL { g, ell },
        DenVariant::DenGl => StatSelector::GDenL { g, ell: g + ell },
    };
    let rhs = distribution_with(n, &StatSelector::GExcL { g, ell }, &den, cap, workers)?;
    let counterexample = if lhs.terms == rhs.terms {
        None
    } else {
        let key = lhs
            .terms
            .keys()
            .chain(rhs.terms.keys())
            .find(|k| lhs.terms.get(k) != rhs.terms.get(k))
            .copied()
            .unwrap();
        Some(cex(
            format!("t^{} q^{}", key.0, key.1),
            format!("{}", lhs.terms.get(&key).cloned().unwrap_or_default()),
            format!("{}", rhs.terms.get(&key).cloned().unwrap_or_default()),
        ))
    };
    let variant_name = match variant {
        DenVariant::DenL => "den_l",
        DenVariant::DenGl => "den_gl",
    };
    Ok(CheckReport::finish(
        "euler-mahonian",
        format!("n={n} g={g} ell={ell} variant={variant_name}"),
        start,
        counterexample,
    ))
}

/// Checks that `sum over S_n of q^{stat}` equals the q-factorial `[n]_q!`.
pub fn check_mahonian(n: usize, stat: &StatSelector, cap: usize) -> Result<CheckReport> {
    check_mahonian_with_workers(n, stat, cap, 1)
}

/// [`check_mahonian`] with parallel enumeration.
pub fn check_mahonian_with_workers(
    n: usize,
    stat: &StatSelector,
    cap: usize,
    workers: usize,
) -> Result<CheckReport> {
    let start = Instant::now();
    let dist = distribution_with(n, &StatSelector::RDes(1), stat, cap, workers)?;
    let got = dist.q_marginal();
    let want = q_factorial(n);
    let counterexample = if got == want {
        None
    } else {
        let k = (0..got.len().max(want.len()))
            .find(|&k| got.get(k) != want.get(k))
            .unwrap();
        Some(cex(
            format!("coefficient of q^{k}"),
            format!("{}", want.get(k).cloned().unwrap_or_default()),
            format!("{}", got.get(k).cloned().unwrap_or_default()),
        ))
    };
    Ok(CheckReport::finish(
        "mahonian",
        format!("n={n} stat={}", stat.label()),
        start,
        counterexample,
    ))
}

/// Parameter grid for the check suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteGrid {
    pub n_max: usize,
    pub g_max: u32,
    pub ell_max: u32,
    pub r_max: u32,
}

impl Default for SuiteGrid {
    fn default() -> Self {
        Self {
            n_max: 8,
            g_max: 4,
            ell_max: 4,
            r_max: 6,
        }
    }
}

impl SuiteGrid {
    /// `(g, ell)` pairs with `g + ell <= n`, the range where the gap/level
    /// insertion machinery is defined.
    fn gl_pairs(&self, n: usize) -> Vec<(u32, u32)> {
        let mut pairs = Vec::new();
        for g in 1..=self.g_max {
            for ell in 1..=self.ell_max {
                if (g + ell) as usize <= n {
                    pairs.push((g, ell));
                }
            }
        }
        pairs
    }
}

/// Names of the registered suites, as accepted by [`run_suite`].
pub fn suite_ids() -> &'static [&'static str] {
    &[
        "lemma-2.1",
        "lemma-2.2",
        "lemma-3.2",
        "lemma-3.4",
        "lemma-3.6",
        "lemma-3.8",
        "lemma-3.10",
        "lemma-4.3",
        "theorem-3.1-bijectivity",
        "theorem-4.4-bijectivity",
        "remark-4.1",
        "partition",
        "euler-mahonian",
        "mahonian",
        "den-a",
        "equidist",
        "all",
    ]
}

/// Runs the named suite over `grid` and returns one report per parameter
/// tuple. `"all"` concatenates every suite.
pub fn run_suite(id: &str, grid: &SuiteGrid, cap: usize) -> Result<Vec<CheckReport>> {
    run_suite_with_workers(id, grid, cap, 1)
}

/// [`run_suite`] with parallel enumeration for the distribution-level
/// suites; the reports are identical regardless of the worker count.
pub fn run_suite_with_workers(
    id: &str,
    grid: &SuiteGrid,
    cap: usize,
    workers: usize,
) -> Result<Vec<CheckReport>> {
    match id {
        "lemma-2.1" => suite_rmaj_insertion(grid),
        "lemma-2.2" => suite_liu_insertion(grid),
        "lemma-3.2" => suite_branch_map(grid, Branch::Alpha),
        "lemma-3.4" => suite_branch_map(grid, Branch::Beta),
        "lemma-3.6" => suite_branch_map(grid, Branch::Gamma),
        "lemma-3.10" => suite_branch_map(grid, Branch::Delta),
        "lemma-4.3" => suite_branch_map(grid, Branch::BetaStar),
        "lemma-3.8" => suite_counting_identity(grid),
        "theorem-3.1-bijectivity" => suite_dispatch(grid, Dispatch::Phi),
        "theorem-4.4-bijectivity" => suite_dispatch(grid, Dispatch::Psi),
        "remark-4.1" => suite_label_agreement(grid),
        "partition" => suite_partition(grid),
        "euler-mahonian" => suite_euler_mahonian(grid, cap, workers),
        "mahonian" => suite_mahonian(grid, cap, workers),
        "den-a" => suite_den_a(grid),
        "equidist" => suite_equidist(grid),
        "all" => {
            let mut out = Vec::new();
            for id in suite_ids() {
                if *id != "all" {
                    out.extend(run_suite_with_workers(id, grid, cap, workers)?);
                }
            }
            Ok(out)
        }
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

fn suite_rmaj_insertion(grid: &SuiteGrid) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 1..=grid.n_max {
        for r in 1..=grid.r_max {
            let start = Instant::now();
            let mut counterexample = None;
            let mut images = HashSet::new();
            'outer: for parent in all_permutations(n - 1) {
                let rdes = r_des(&parent, r);
                let rmaj = r_maj(&parent, r);
                let keep_bound = rdes + u64::from(r) - 1;
                for c in 0..n {
                    let child = phi_maj(&parent, c, r)?;
                    let step = InsertionStep {
                        parent: parent.clone(),
                        label: c,
                        child: child.clone(),
                    };
                    let want_des = if (c as u64) <= keep_bound {
                        rdes
                    } else {
                        rdes + 1
                    };
                    if r_maj(&child, r) != rmaj + c as u64 || r_des(&child, r) != want_des {
                        counterexample = Some(cex(
                            format!("{:?}", step),
                            format!("rmaj {} rdes {}", rmaj + c as u64, want_des),
                            format!("rmaj {} rdes {}", r_maj(&child, r), r_des(&child, r)),
                        ));
                        break 'outer;
                    }
                    if phi_maj_inv(&child, r)? != (parent.clone(), c) {
                        counterexample =
                            Some(cex(format!("{:?}", step), "round trip", "mismatch"));
                        break 'outer;
                    }
                    if !images.insert(child) {
                        counterexample =
                            Some(cex(format!("{:?}", step), "fresh image", "duplicate"));
                        break 'outer;
                    }
                }
            }
            if counterexample.is_none() && images.len() as u128 != factorial(n) {
                counterexample = Some(cex(
                    format!("n={n} r={r}"),
                    format!("{} images", factorial(n)),
                    format!("{}", images.len()),
                ));
            }
            reports.push(CheckReport::finish(
                "lemma-2.1",
                format!("n={n} r={r}"),
                start,
                counterexample,
            ));
        }
    }
    Ok(reports)
}

fn suite_liu_insertion(grid: &SuiteGrid) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 1..=grid.n_max {
        for g in 1..=grid.r_max {
            let start = Instant::now();
            let mut counterexample = None;
            let mut images = HashSet::new();
            'outer: for parent in all_permutations(n - 1) {
                let gexc = g_exc_l(&parent, g, 1);
                let gden = g_den_l(&parent, g, 1);
                let keep_bound = gexc + u64::from(g) - 1;
                for c in 0..n {
                    let child = phi_den_liu(&parent, c, g)?;
                    let want_exc = if (c as u64) <= keep_bound {
                        gexc
                    } else {
                        gexc + 1
                    };
                    let input = format!("parent={parent} c={c} child={child}");
                    if g_den_l(&child, g, 1) != gden + c as u64
                        || g_exc_l(&child, g, 1) != want_exc
                    {
                        counterexample = Some(cex(
                            input,
                            format!("gden {} gexc {}", gden + c as u64, want_exc),
                            format!(
                                "gden {} gexc {}",
                                g_den_l(&child, g, 1),
                                g_exc_l(&child, g, 1)
                            ),
                        ));
                        break 'outer;
                    }
                    if phi_den_liu_inv(&child, g)? != (parent.clone(), c) {
                        counterexample = Some(cex(input, "round trip", "mismatch"));
                        break 'outer;
                    }
                    if !images.insert(child) {
                        counterexample = Some(cex(input, "fresh image", "duplicate"));
                        break 'outer;
                    }
                }
            }
            if counterexample.is_none() && images.len() as u128 != factorial(n) {
                counterexample = Some(cex(
                    format!("n={n} g={g}"),
                    format!("{} images", factorial(n)),
                    format!("{}", images.len()),
                ));
            }
            reports.push(CheckReport::finish(
                "lemma-2.2",
                format!("n={n} g={g}"),
                start,
                counterexample,
            ));
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Alpha,
    Beta,
    Gamma,
    Delta,
    BetaStar,
}

impl Branch {
    fn suite_name(&self) -> &'static str {
        match self {
            Branch::Alpha => "lemma-3.2",
            Branch::Beta => "lemma-3.4",
            Branch::Gamma => "lemma-3.6",
            Branch::Delta => "lemma-3.10",
            Branch::BetaStar => "lemma-4.3",
        }
    }
}

/// Checks one branch map over its domain: the statistic deltas, the codomain
/// class, and the inverse round trip through the matching dispatcher.
fn suite_branch_map(grid: &SuiteGrid, branch: Branch) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 2..=grid.n_max {
        for (g, ell) in grid.gl_pairs(n) {
            let start = Instant::now();
            let mut counterexample = None;
            'outer: for parent in all_permutations(n - 1) {
                let labeling = match branch {
                    Branch::BetaStar => ggl_den_labeling(&parent, g, ell)?,
                    _ => gl_den_labeling(&parent, g, ell)?,
                };
                let prof = excedance_profile(&parent, g, ell);
                for c in 0..n {
                    let space = labeling.space_of_label(c)?;
                    let in_domain = if space == n - 1 {
                        branch == Branch::Delta
                    } else {
                        let x = space + 1;
                        match branch {
                            Branch::Alpha => prof.set_a.contains(&x),
                            Branch::Beta => prof.set_b.contains(&x),
                            Branch::Gamma => prof.set_c.contains(&x),
                            Branch::Delta => x >= ell as usize,
                            Branch::BetaStar => prof.set_b_star.contains(&x),
                        }
                    };
                    if !in_domain {
                        continue;
                    }
                    let child = match branch {
                        Branch::Alpha => alpha(&parent, c, g, ell)?,
                        Branch::Beta => beta(&parent, c, g, ell)?,
                        Branch::Gamma => gamma(&parent, c, g, ell)?,
                        Branch::Delta => delta(&parent, c, g, ell)?,
                        Branch::BetaStar => beta_star(&parent, c, g, ell)?,
                    };
                    let input = format!("parent={parent} c={c} g={g} ell={ell} child={child}");
                    if let Some(problem) =
                        branch_expectations(branch, &parent, c, &child, g, ell)?
                    {
                        counterexample = Some(cex(input, problem.0, problem.1));
                        break 'outer;
                    }
                }
            }
            reports.push(CheckReport::finish(
                branch.suite_name(),
                format!("n={n} g={g} ell={ell}"),
                start,
                counterexample,
            ));
        }
    }
    Ok(reports)
}

fn branch_expectations(
    branch: Branch,
    parent: &Permutation,
    c: usize,
    child: &Permutation,
    g: u32,
    ell: u32,
) -> Result<Option<(String, String)>> {
    let high = g + ell;
    let exc_before = g_exc_l(parent, g, ell);
    let exc_after = g_exc_l(child, g, ell);
    let den_l_delta = g_den_l(child, g, ell) as i64 - g_den_l(parent, g, ell) as i64;
    let den_gl_delta = g_den_l(child, g, high) as i64 - g_den_l(parent, g, high) as i64;
    let class = class_of(child, g, ell)?;
    let expect_exc = match branch {
        Branch::Alpha => exc_before + 1,
        Branch::Beta | Branch::Gamma | Branch::BetaStar => exc_before,
        Branch::Delta => {
            if c as u64 <= exc_before + u64::from(high) - 2 {
                exc_before
            } else {
                exc_before + 1
            }
        }
    };
    if exc_after != expect_exc {
        return Ok(Some((
            format!("gexc {expect_exc}"),
            format!("gexc {exc_after}"),
        )));
    }
    let deltas_ok = match branch {
        Branch::Alpha | Branch::Delta => {
            den_l_delta == c as i64 && den_gl_delta == c as i64
        }
        Branch::Beta | Branch::Gamma => den_l_delta == c as i64,
        Branch::BetaStar => den_gl_delta == c as i64,
    };
    if !deltas_ok {
        return Ok(Some((
            format!("den deltas = {c}"),
            format!("den_l {den_l_delta}, den_gl {den_gl_delta}"),
        )));
    }
    let class_ok = match branch {
        Branch::Alpha => class == ClassMembership::S1,
        Branch::Beta => class == ClassMembership::S2Proper,
        Branch::Gamma => class == ClassMembership::S3Improper,
        Branch::Delta => class == ClassMembership::OutsideSngl,
        Branch::BetaStar => {
            class == ClassMembership::S2Proper || class == ClassMembership::S3Improper
        }
    };
    if !class_ok {
        return Ok(Some((
            format!("class for {branch:?}"),
            class.as_str().to_string(),
        )));
    }
    // Round trip through the dispatcher that owns the branch.
    let round = match branch {
        Branch::BetaStar => psi_den_inv(child, g, ell)?,
        _ => phi_den_inv(child, g, ell)?,
    };
    if round != (parent.clone(), c) {
        return Ok(Some((
            format!("recover ({parent}, {c})"),
            format!("({}, {})", round.0, round.1),
        )));
    }
    Ok(None)
}

/// The two-sided counting identity behind the den-delta analysis: for a
/// letter `x = tau_k` with `x >= ell` and `k <= x <= k + g - 1` whose whole
/// block `[x-(g-1), k)` consists of excedance places, no non-excedance
/// letter above `x` sits left of `k`, and exactly `p + g - 1` non-excedance
/// letters below `x` sit right of `k`, where `p` counts excedance letters
/// above `x` left of position `x - (g-1)`.
///
/// The `x >= ell` hypothesis is what the delta analyses actually supply (the
/// letter is always an excedance letter there); without it the identity
/// fails already at `tau = 321`, `g = 1`, `ell = 4`, `k = 2`.
fn suite_counting_identity(grid: &SuiteGrid) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 1..=grid.n_max {
        for g in 1..=grid.g_max {
            for ell in 1..=grid.ell_max {
                let start = Instant::now();
                let mut counterexample = None;
                'outer: for tau in all_permutations(n) {
                    let w = tau.as_slice();
                    for k in 1..=n {
                        let x = w[k - 1] as usize;
                        if x < g as usize || (x as u64) < u64::from(ell) {
                            continue;
                        }
                        if x < k || x > k + g as usize - 1 {
                            continue;
                        }
                        let lo = x - (g as usize - 1);
                        if !(lo..k).all(|i| is_exc_place(w, i, g, ell)) {
                            continue;
                        }
                        let p_count = (1..lo)
                            .filter(|&i| is_exc_place(w, i, g, ell) && w[i - 1] as usize > x)
                            .count() as u64;
                        let above_left = (1..k)
                            .filter(|&i| !is_exc_place(w, i, g, ell) && w[i - 1] as usize > x)
                            .count() as u64;
                        let below_right = (k + 1..=n)
                            .filter(|&i| !is_exc_place(w, i, g, ell) && (w[i - 1] as usize) < x)
                            .count() as u64;
                        if above_left != 0 || below_right != p_count + u64::from(g) - 1 {
                            counterexample = Some(cex(
                                format!("tau={tau} k={k} x={x} g={g} ell={ell}"),
                                format!("0 and {}", p_count + u64::from(g) - 1),
                                format!("{above_left} and {below_right}"),
                            ));
                            break 'outer;
                        }
                    }
                }
                reports.push(CheckReport::finish(
                    "lemma-3.8",
                    format!("n={n} g={g} ell={ell}"),
                    start,
                    counterexample,
                ));
            }
        }
    }
    Ok(reports)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dispatch {
    Phi,
    Psi,
}

fn suite_dispatch(grid: &SuiteGrid, dispatch: Dispatch) -> Result<Vec<CheckReport>> {
    let (name, suite) = match dispatch {
        Dispatch::Phi => ("theorem-3.1-bijectivity", "phi"),
        Dispatch::Psi => ("theorem-4.4-bijectivity", "psi"),
    };
    let mut reports = Vec::new();
    for n in 2..=grid.n_max {
        for (g, ell) in grid.gl_pairs(n) {
            let start = Instant::now();
            let mut counterexample = None;
            let mut images = HashSet::new();
            'outer: for parent in all_permutations(n - 1) {
                let exc_before = g_exc_l(&parent, g, ell);
                for c in 0..n {
                    let child = match dispatch {
                        Dispatch::Phi => phi_den(&parent, c, g, ell)?,
                        Dispatch::Psi => psi_den(&parent, c, g, ell)?,
                    };
                    let input = format!("{suite}: parent={parent} c={c} child={child}");
                    let den_delta = match dispatch {
                        Dispatch::Phi => {
                            g_den_l(&child, g, ell) as i64 - g_den_l(&parent, g, ell) as i64
                        }
                        Dispatch::Psi => {
                            g_den_l(&child, g, g + ell) as i64
                                - g_den_l(&parent, g, g + ell) as i64
                        }
                    };
                    let want_exc = if c as u64 <= exc_before + u64::from(g + ell) - 2 {
                        exc_before
                    } else {
                        exc_before + 1
                    };
                    if den_delta != c as i64 || g_exc_l(&child, g, ell) != want_exc {
                        counterexample = Some(cex(
                            input,
                            format!("den delta {c}, gexc {want_exc}"),
                            format!("den delta {den_delta}, gexc {}", g_exc_l(&child, g, ell)),
                        ));
                        break 'outer;
                    }
                    let round = match dispatch {
                        Dispatch::Phi => phi_den_inv(&child, g, ell)?,
                        Dispatch::Psi => psi_den_inv(&child, g, ell)?,
                    };
                    if round != (parent.clone(), c) {
                        counterexample = Some(cex(input, "round trip", "mismatch"));
                        break 'outer;
                    }
                    if !images.insert(child) {
                        counterexample = Some(cex(input, "fresh image", "duplicate"));
                        break 'outer;
                    }
                }
            }
            if counterexample.is_none() && images.len() as u128 != factorial(n) {
                counterexample = Some(cex(
                    format!("n={n} g={g} ell={ell}"),
                    format!("{} images", factorial(n)),
                    format!("{}", images.len()),
                ));
            }
            reports.push(CheckReport::finish(
                name,
                format!("n={n} g={g} ell={ell}"),
                start,
                counterexample,
            ));
        }
    }
    Ok(reports)
}

/// The two den labelings agree on spaces before indices in `A` and before
/// indices at or right of `ell` (and on the trailing space).
fn suite_label_agreement(grid: &SuiteGrid) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 2..=grid.n_max {
        for (g, ell) in grid.gl_pairs(n) {
            let start = Instant::now();
            let mut counterexample = None;
            'outer: for parent in all_permutations(n - 1) {
                let gl = gl_den_labeling(&parent, g, ell)?;
                let ggl = ggl_den_labeling(&parent, g, ell)?;
                let prof = excedance_profile(&parent, g, ell);
                let spaces = prof
                    .set_a
                    .iter()
                    .map(|&x| x - 1)
                    .chain((ell as usize..n).map(|x| x - 1))
                    .chain(std::iter::once(n - 1));
                for space in spaces {
                    if gl.label_of_space(space) != ggl.label_of_space(space) {
                        counterexample = Some(cex(
                            format!("parent={parent} space={space}"),
                            format!("{}", gl.label_of_space(space)),
                            format!("{}", ggl.label_of_space(space)),
                        ));
                        break 'outer;
                    }
                }
            }
            reports.push(CheckReport::finish(
                "remark-4.1",
                format!("n={n} g={g} ell={ell}"),
                start,
                counterexample,
            ));
        }
    }
    Ok(reports)
}

/// Every permutation lands in exactly one class, and the four class sizes
/// add up to `n!`.
fn suite_partition(grid: &SuiteGrid) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 2..=grid.n_max {
        for (g, ell) in grid.gl_pairs(n) {
            let start = Instant::now();
            let mut counterexample = None;
            let mut counts = [0u64; 4];
            for tau in all_permutations(n) {
                match class_of(&tau, g, ell) {
                    Ok(ClassMembership::S1) => counts[0] += 1,
                    Ok(ClassMembership::S2Proper) => counts[1] += 1,
                    Ok(ClassMembership::S3Improper) => counts[2] += 1,
                    Ok(ClassMembership::OutsideSngl) => counts[3] += 1,
                    Err(e) => {
                        counterexample = Some(cex(format!("tau={tau}"), "a class", e.to_string()));
                        break;
                    }
                }
            }
            if counterexample.is_none() && u128::from(counts.iter().sum::<u64>()) != factorial(n) {
                counterexample = Some(cex(
                    format!("n={n} g={g} ell={ell}"),
                    format!("{}", factorial(n)),
                    format!("{:?}", counts),
                ));
            }
            reports.push(CheckReport::finish(
                "partition",
                format!("n={n} g={g} ell={ell}"),
                start,
                counterexample,
            ));
        }
    }
    Ok(reports)
}

fn suite_euler_mahonian(grid: &SuiteGrid, cap: usize, workers: usize) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 1..=grid.n_max {
        for g in 1..=grid.g_max {
            for ell in 1..=grid.ell_max {
                for variant in [DenVariant::DenL, DenVariant::DenGl] {
                    reports.push(check_euler_mahonian_with_workers(
                        n, g, ell, variant, cap, workers,
                    )?);
                }
            }
        }
    }
    Ok(reports)
}

fn suite_mahonian(grid: &SuiteGrid, cap: usize, workers: usize) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 1..=grid.n_max {
        for g in 1..=grid.g_max {
            for ell in 1..=grid.ell_max {
                reports.push(check_mahonian_with_workers(
                    n,
                    &StatSelector::GDenL { g, ell },
                    cap,
                    workers,
                )?);
            }
        }
        for r in 1..=grid.r_max {
            reports.push(check_mahonian_with_workers(
                n,
                &StatSelector::RMaj(r),
                cap,
                workers,
            )?);
        }
    }
    Ok(reports)
}

/// `den^a` at the bounds `a_i = max(i+g-1, ell-1)` equals the gap/level
/// Denert statistic, computed through an independent code path.
fn suite_den_a(grid: &SuiteGrid) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    for n in 1..=grid.n_max {
        for g in 1..=grid.g_max {
            for ell in 1..=grid.ell_max {
                let start = Instant::now();
                let bounds = BoundSequence::den_gl_bounds(n, g, ell);
                let mut counterexample = None;
                for p in all_permutations(n) {
                    let lhs = den_a(&p, &bounds)?;
                    let rhs = g_den_l(&p, g, ell);
                    if lhs != rhs {
                        counterexample = Some(cex(
                            format!("p={p} g={g} ell={ell}"),
                            format!("{rhs}"),
                            format!("{lhs}"),
                        ));
                        break;
                    }
                }
                reports.push(CheckReport::finish(
                    "den-a",
                    format!("n={n} g={g} ell={ell}"),
                    start,
                    counterexample,
                ));
            }
        }
    }
    Ok(reports)
}

/// The composed bijection transports `(rdes, rmaj)` onto the excedance/Denert
/// pair pointwise and hits every permutation exactly once.
fn suite_equidist(grid: &SuiteGrid) -> Result<Vec<CheckReport>> {
    let mut reports = Vec::new();
    let n = grid.n_max;
    for g in 1..=grid.g_max {
        for ell in 1..=grid.ell_max {
            for variant in [DenVariant::DenL, DenVariant::DenGl] {
                let start = Instant::now();
                let r = g + ell - 1;
                let n0 = n.min(r as usize);
                let base = EquidistBase::new(g, ell, variant, n0, DEFAULT_BASE_CAP)?;
                let mut counterexample = None;
                let mut images = HashSet::new();
                for q in all_permutations(n) {
                    let image = equidist_map_with_base(&q, g, ell, &base)?;
                    let den = match variant {
                        DenVariant::DenL => g_den_l(&image, g, ell),
                        DenVariant::DenGl => g_den_l(&image, g, g + ell),
                    };
                    if (r_des(&q, r), r_maj(&q, r)) != (g_exc_l(&image, g, ell), den) {
                        counterexample = Some(cex(
                            format!("q={q} image={image}"),
                            format!("({}, {})", r_des(&q, r), r_maj(&q, r)),
                            format!("({}, {})", g_exc_l(&image, g, ell), den),
                        ));
                        break;
                    }
                    if !images.insert(image) {
                        counterexample =
                            Some(cex(format!("q={q}"), "fresh image", "duplicate"));
                        break;
                    }
                }
                if counterexample.is_none() && images.len() as u128 != factorial(n) {
                    counterexample = Some(cex(
                        format!("n={n} g={g} ell={ell}"),
                        format!("{} images", factorial(n)),
                        format!("{}", images.len()),
                    ));
                }
                let variant_name = match variant {
                    DenVariant::DenL => "den_l",
                    DenVariant::DenGl => "den_gl",
                };
                reports.push(CheckReport::finish(
                    "equidist",
                    format!("n={n} g={g} ell={ell} variant={variant_name}"),
                    start,
                    counterexample,
                ));
            }
        }
    }
    Ok(reports)
}

/// One row of the reference table over `S_4`: the pair `(3des, 3maj)` next
/// to `(2exc_2, 2den_4)`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Table1Row {
    pub perm: String,
    #[serde(rename = "3des")]
    pub rdes: u64,
    #[serde(rename = "3maj")]
    pub rmaj: u64,
    #[serde(rename = "2exc_2")]
    pub gexc: u64,
    #[serde(rename = "2den_4")]
    pub gden: u64,
}

/// The 24 rows of the reference table, in lexicographic order.
pub fn reproduce_table1() -> Vec<Table1Row> {
    all_permutations(4)
        .map(|p| Table1Row {
            perm: p.to_string(),
            rdes: r_des(&p, 3),
            rmaj: r_maj(&p, 3),
            gexc: g_exc_l(&p, 2, 2),
            gden: g_den_l(&p, 2, 4),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_parse_and_label() {
        for text in ["inv", "des", "maj", "exc", "den", "3des", "3maj", "2exc_2", "2den_4"] {
            let sel = StatSelector::parse(text).unwrap();
            assert_eq!(sel.label(), text);
        }
        assert_eq!(
            StatSelector::parse("exc_3").unwrap(),
            StatSelector::GExcL { g: 1, ell: 3 }
        );
        assert_eq!(
            StatSelector::parse("4den").unwrap(),
            StatSelector::GDenL { g: 4, ell: 1 }
        );
        assert!(StatSelector::parse("bogus").is_err());
        assert!(StatSelector::parse("0des").is_err());
    }

    #[test]
    fn distribution_matches_table_polynomial() {
        let dist = joint_distribution(
            4,
            &StatSelector::RDes(3),
            &StatSelector::RMaj(3),
            DEFAULT_N_CAP,
        )
        .unwrap();
        let expect: BTreeMap<(u32, u32), u32> = [
            ((0, 0), 1),
            ((0, 1), 3),
            ((0, 2), 5),
            ((0, 3), 5),
            ((0, 4), 3),
            ((0, 5), 1),
            ((1, 3), 1),
            ((1, 4), 2),
            ((1, 5), 2),
            ((1, 6), 1),
        ]
        .into_iter()
        .collect();
        let got: BTreeMap<(u32, u32), u32> = dist
            .terms
            .iter()
            .map(|(&k, v)| (k, v.try_into().unwrap()))
            .collect();
        assert_eq!(got, expect);
        let other = joint_distribution(
            4,
            &StatSelector::GExcL { g: 2, ell: 2 },
            &StatSelector::GDenL { g: 2, ell: 4 },
            DEFAULT_N_CAP,
        )
        .unwrap();
        assert_eq!(dist.terms, other.terms);
        assert_eq!(dist.total(), BigUint::from(24u32));
    }

    #[test]
    fn trivial_distribution() {
        let dist = joint_distribution(
            1,
            &StatSelector::Des,
            &StatSelector::Maj,
            DEFAULT_N_CAP,
        )
        .unwrap();
        assert_eq!(dist.terms.len(), 1);
        assert_eq!(dist.terms[&(0, 0)], BigUint::one());
    }

    #[test]
    fn parallel_matches_serial() {
        let st1 = StatSelector::RDes(2);
        let st2 = StatSelector::RMaj(2);
        let serial = joint_distribution(6, &st1, &st2, DEFAULT_N_CAP).unwrap();
        for workers in [1, 2, 3, 7] {
            let parallel =
                joint_distribution_parallel(6, &st1, &st2, DEFAULT_N_CAP, workers).unwrap();
            assert_eq!(serial, parallel);
        }
        // More workers than permutations.
        for n in [0, 1, 3] {
            let serial = joint_distribution(n, &st1, &st2, DEFAULT_N_CAP).unwrap();
            let parallel =
                joint_distribution_parallel(n, &st1, &st2, DEFAULT_N_CAP, 8).unwrap();
            assert_eq!(serial, parallel);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            joint_distribution(10, &StatSelector::Inv, &StatSelector::Inv, 9),
            Err(Error::CapExceeded { n: 10, cap: 9 })
        ));
    }

    #[test]
    fn q_factorial_small() {
        let q4 = q_factorial(4);
        let want: Vec<u32> = vec![1, 3, 5, 6, 5, 3, 1];
        assert_eq!(
            q4,
            want.into_iter().map(BigUint::from).collect::<Vec<_>>()
        );
        assert_eq!(q_factorial(0), vec![BigUint::one()]);
        assert_eq!(q_factorial(1), vec![BigUint::one()]);
    }

    #[test]
    fn mahonian_checks() {
        assert!(check_mahonian(4, &StatSelector::Inv, DEFAULT_N_CAP)
            .unwrap()
            .pass);
        assert!(check_mahonian(
            4,
            &StatSelector::GDenL { g: 2, ell: 4 },
            DEFAULT_N_CAP
        )
        .unwrap()
        .pass);
    }

    #[test]
    fn euler_mahonian_spot_checks() {
        assert!(
            check_euler_mahonian(4, 2, 2, DenVariant::DenGl, DEFAULT_N_CAP)
                .unwrap()
                .pass
        );
        assert!(
            check_euler_mahonian(4, 1, 1, DenVariant::DenL, DEFAULT_N_CAP)
                .unwrap()
                .pass
        );
        // Base case n < g + ell.
        assert!(
            check_euler_mahonian(3, 2, 3, DenVariant::DenL, DEFAULT_N_CAP)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn table1_spot_rows() {
        let rows = reproduce_table1();
        assert_eq!(rows.len(), 24);
        let find = |perm: &str| rows.iter().find(|r| r.perm == perm).unwrap();
        let r = find("1423");
        assert_eq!((r.rdes, r.rmaj, r.gexc, r.gden), (0, 2, 1, 3));
        let r = find("2341");
        assert_eq!((r.rdes, r.rmaj, r.gexc, r.gden), (1, 5, 0, 3));
        let r = find("4321");
        assert_eq!((r.rdes, r.rmaj, r.gexc, r.gden), (0, 5, 0, 5));
    }

    #[test]
    fn small_suites_pass() {
        let grid = SuiteGrid {
            n_max: 4,
            g_max: 2,
            ell_max: 2,
            r_max: 3,
        };
        for id in suite_ids() {
            if *id == "all" {
                continue;
            }
            for report in run_suite(id, &grid, DEFAULT_N_CAP).unwrap() {
                assert!(report.pass, "{}", report.render_line());
            }
        }
    }

    #[test]
    fn unknown_suite_is_reported() {
        assert!(matches!(
            run_suite("nope", &SuiteGrid::default(), DEFAULT_N_CAP),
            Err(Error::UnknownSuite(_))
        ));
    }
}
