//! Exact Cover 3 instances with a planted solution and locality-restricted
//! clauses, and Monte Carlo estimates of how often the planted string fails
//! to be the unique solution.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest `N` for the exhaustive uniqueness scan.
pub const MAX_SCAN_BITS: usize = 24;
/// Initial clause pool size.
pub const POOL_SIZE: usize = 500;
/// Pool doublings tried before a run is recorded as a shortage.
pub const MAX_POOL_DOUBLINGS: u32 = 8;
/// Normal quantile for the 95% binomial half-width.
const Z95: f64 = 1.96;

/// Clause `x_a + x_b + x_c = 1` over 1-based sites `a < b < c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause([usize; 3]);

impl Clause {
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        let mut t = [a, b, c];
        t.sort_unstable();
        if t[0] == 0 || t[0] == t[1] || t[1] == t[2] {
            return Err(Error::Domain(format!("clause needs three distinct 1-based sites, got {a} {b} {c}")));
        }
        Ok(Self(t))
    }

    pub fn sites(&self) -> [usize; 3] {
        self.0
    }

    fn mask(&self) -> u32 {
        self.0.iter().map(|s| 1u32 << (s - 1)).fold(0, |m, b| m | b)
    }

    pub fn is_satisfied_by(&self, bits: &BitString) -> bool {
        self.0.iter().filter(|&&s| bits.get(s)).count() == 1
    }

    /// Whether the three sites fit within a cyclic window of `2M + 1`
    /// consecutive sites on a ring of `n`.
    pub fn is_restricted(&self, m: usize, n: usize) -> bool {
        let [a, b, c] = self.0;
        let w = 2 * m;
        c - a <= w || a + n - b <= w || b + n - c <= w
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.0[0], self.0[1], self.0[2])
    }
}

/// Bits indexed from site 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit at 1-based `site`.
    pub fn get(&self, site: usize) -> bool {
        self.0[site - 1]
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    /// Whether at least one satisfied clause exists: one set bit and two clear bits.
    pub fn admits_clauses(&self) -> bool {
        let ones = self.ones();
        ones >= 1 && self.len() - ones >= 2
    }

    fn from_mask(mask: u32, n: usize) -> Self {
        Self((0..n).map(|i| mask >> i & 1 == 1).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| f.write_str(if *b { "1" } else { "0" }))
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bit literal contains `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// `n` independent Bernoulli(`p`) bits.
pub fn plant_bitstring<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<BitString> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("bit probability must lie in (0, 1), got {p}")));
    }
    Ok(BitString((0..n).map(|_| rng.gen_bool(p)).collect()))
}

/// Every clause satisfied by `planted`, in lexicographic order.
pub fn valid_triples(planted: &BitString) -> Vec<Clause> {
    let n = planted.len();
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                let clause = Clause([a, b, c]);
                if clause.is_satisfied_by(planted) {
                    out.push(clause);
                }
            }
        }
    }
    out
}

/// `count` distinct satisfied clauses, uniform over all of them.
pub fn sample_satisfied_clauses<R: Rng + ?Sized>(
    planted: &BitString,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Clause>> {
    let valid = valid_triples(planted);
    if count > valid.len() {
        return Err(Error::InsufficientClauses { available: valid.len(), requested: count });
    }
    let mut picked: Vec<Clause> =
        index::sample(rng, valid.len(), count).into_iter().map(|i| valid[i]).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// `draws` uniform draws with replacement from the satisfied clauses,
/// deduplicated and sorted.
pub fn clause_pool<R: Rng + ?Sized>(planted: &BitString, draws: usize, rng: &mut R) -> Vec<Clause> {
    draw_pool(&valid_triples(planted), draws, rng)
}

fn draw_pool<R: Rng + ?Sized>(valid: &[Clause], draws: usize, rng: &mut R) -> Vec<Clause> {
    if valid.is_empty() {
        return Vec::new();
    }
    let mut seen = vec![false; valid.len()];
    for _ in 0..draws {
        seen[rng.gen_range(0..valid.len())] = true;
    }
    valid.iter().zip(&seen).filter(|(_, s)| **s).map(|(c, _)| *c).collect()
}

/// Clauses that pass the `M`-locality restriction on a ring of `n`, in order.
pub fn restrict_clauses(clauses: &[Clause], m: usize, n: usize) -> Vec<Clause> {
    clauses.iter().copied().filter(|c| c.is_restricted(m, n)).collect()
}

/// Exhaustive scan over all `2^n` assignments. Returns whether exactly one
/// assignment satisfies every clause; otherwise a second solution (or the
/// first, if it is the only one) is returned as witness, and `None` when
/// there is no solution at all.
pub fn has_unique_solution(clauses: &[Clause], n: usize) -> Result<(bool, Option<BitString>)> {
    if n > MAX_SCAN_BITS {
        return Err(Error::Capacity { n, max: MAX_SCAN_BITS });
    }
    if let Some(c) = clauses.iter().find(|c| c.0[2] > n) {
        return Err(Error::SiteOutOfRange { i: c.0[2], n });
    }
    let masks: Vec<u32> = clauses.iter().map(Clause::mask).collect();
    let mut first = None;
    for x in 0..1u32 << n {
        if masks.iter().all(|m| (x & m).count_ones() == 1) {
            if first.is_some() {
                return Ok((false, Some(BitString::from_mask(x, n))));
            }
            first = Some(x);
        }
    }
    Ok((first.is_some(), first.map(|x| BitString::from_mask(x, n))))
}

/// Per-site occurrence counts `N_a` and per-pair counts `M_ab`, both
/// 0-based (`n_alpha[a - 1]`, `m_alpha_beta[a - 1][b - 1]` with `a < b`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseCounts {
    pub n_alpha: Vec<usize>,
    pub m_alpha_beta: Vec<Vec<usize>>,
}

pub fn clause_counts(clauses: &[Clause], n: usize) -> ClauseCounts {
    let mut n_alpha = vec![0; n];
    let mut m_alpha_beta = vec![vec![0; n]; n];
    for c in clauses {
        let [a, b, g] = c.0;
        for s in [a, b, g] {
            n_alpha[s - 1] += 1;
        }
        for (x, y) in [(a, b), (a, g), (b, g)] {
            m_alpha_beta[x - 1][y - 1] += 1;
        }
    }
    ClauseCounts { n_alpha, m_alpha_beta }
}

/// A planted string with restricted clauses it satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ec3Instance {
    pub m_restriction: usize,
    pub planted: BitString,
    pub clauses: Vec<Clause>,
}

impl Ec3Instance {
    pub fn new(m_restriction: usize, planted: BitString, mut clauses: Vec<Clause>) -> Result<Self> {
        let n = planted.len();
        clauses.sort_unstable();
        if clauses.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("duplicate clause".into()));
        }
        for c in &clauses {
            if c.0[2] > n {
                return Err(Error::SiteOutOfRange { i: c.0[2], n });
            }
            if !c.is_satisfied_by(&planted) {
                return Err(Error::Domain(format!("clause {c} is not satisfied by {planted}")));
            }
            if !c.is_restricted(m_restriction, n) {
                return Err(Error::Domain(format!("clause {c} violates the M={m_restriction} restriction")));
            }
        }
        Ok(Self { m_restriction, planted, clauses })
    }

    pub fn n_bits(&self) -> usize {
        self.planted.len()
    }

    /// `N M` header, one clause per line, then the planted bits.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_bits(), self.m_restriction);
        for c in &self.clauses {
            out.push_str(&format!("{c}\n"));
        }
        out.push_str(&format!("{}\n", self.planted));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let (header, rest) =
            lines.split_first().ok_or_else(|| Error::Parse("empty instance".into()))?;
        let (bits, body) = rest.split_last().ok_or_else(|| Error::Parse("missing bit string".into()))?;
        let nums = |line: &str| -> Result<Vec<usize>> {
            line.split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad integer `{t}`"))))
                .collect()
        };
        let head = nums(header)?;
        let [n, m] = head[..] else {
            return Err(Error::Parse(format!("header must be `N M`, got `{header}`")));
        };
        let planted: BitString = bits.parse()?;
        if planted.len() != n {
            return Err(Error::Parse(format!("bit string has {} bits, header says {n}", planted.len())));
        }
        let clauses = body
            .iter()
            .map(|line| match nums(line)?[..] {
                [a, b, c] => Clause::new(a, b, c),
                _ => Err(Error::Parse(format!("clause line must hold three sites, got `{line}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, planted, clauses)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub k: usize,
    pub runs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub params: SimParams,
    pub errors: usize,
    /// Runs that could not collect `K` restricted clauses; counted as errors.
    pub shortages: usize,
    /// Planted strings rejected for admitting no clause.
    pub redraws: usize,
    pub p_e: f64,
    pub half_width: f64,
}

/// Outcome of a single run.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Instance { instance: Ec3Instance, unique: bool },
    Shortage { planted: BitString, available: usize },
}

/// The generator for run `run_index`. Streams depend only on the seed and
/// the run index, so every `M` and `p` sees the same random numbers.
pub fn run_rng(seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// One run: plant, draw a clause pool, restrict, select `K`, check uniqueness.
/// Returns the outcome and the number of planted strings redrawn.
pub fn simulate_run<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    p: f64,
    k: usize,
    rng: &mut R,
) -> Result<(RunOutcome, usize)> {
    let mut redraws = 0;
    let planted = loop {
        let bits = plant_bitstring(n, p, rng)?;
        if bits.admits_clauses() {
            break bits;
        }
        redraws += 1;
    };
    let valid = valid_triples(&planted);
    let reachable = restrict_clauses(&valid, m, n).len();
    let mut draws = POOL_SIZE;
    let mut restricted = Vec::new();
    for attempt in 0..=MAX_POOL_DOUBLINGS {
        if attempt > 0 {
            draws *= 2;
        }
        restricted = restrict_clauses(&draw_pool(&valid, draws, rng), m, n);
        // A pool holding every restricted clause cannot grow further.
        if restricted.len() >= k || restricted.len() == reachable {
            break;
        }
    }
    if restricted.len() < k {
        return Ok((RunOutcome::Shortage { planted, available: restricted.len() }, redraws));
    }
    let chosen: Vec<Clause> =
        index::sample(rng, restricted.len(), k).into_iter().map(|i| restricted[i]).collect();
    assert!(chosen.iter().all(|c| c.is_satisfied_by(&planted)));
    let instance = Ec3Instance::new(m, planted, chosen)?;
    let (unique, _) = has_unique_solution(&instance.clauses, n)?;
    Ok((RunOutcome::Instance { instance, unique }, redraws))
}

/// Fraction of runs in which the planted string is not the unique solution.
pub fn estimate_pe(params: SimParams) -> Result<SimReport> {
    let SimParams { n, m, p, k, runs, seed } = params;
    if runs == 0 || k == 0 {
        return Err(Error::Domain("runs and K must be at least 1".into()));
    }
    if n > MAX_SCAN_BITS {
        return Err(Error::Capacity { n, max: MAX_SCAN_BITS });
    }
    let outcomes = (0..runs as u64)
        .into_par_iter()
        .map(|r| simulate_run(n, m, p, k, &mut run_rng(seed, r)))
        .collect::<Result<Vec<_>>>()?;
    let mut errors = 0;
    let mut shortages = 0;
    let mut redraws = 0;
    for (outcome, redrawn) in &outcomes {
        redraws += redrawn;
        match outcome {
            RunOutcome::Instance { unique, .. } => errors += usize::from(!unique),
            RunOutcome::Shortage { .. } => {
                shortages += 1;
                errors += 1;
            }
        }
    }
    let p_e = errors as f64 / runs as f64;
    Ok(SimReport {
        params,
        errors,
        shortages,
        redraws,
        p_e,
        half_width: Z95 * (p_e * (1.0 - p_e) / runs as f64).sqrt(),
    })
}
