//! Word-metric balls of marked free groups.
//!
//! Letters are encoded as `2i` for the generator `g_i` and `2i + 1` for its
//! inverse; words print as `a, b, c, ...` with capitals for inverses and `e`
//! for the identity. Enumeration is depth-first by prefix and yields every
//! reduced word of length at most the radius exactly once.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cartan::{opposition_involution, AmbientGroup, CartanVector};
use crate::config::{DEFAULT_BUDGET, DEFAULT_LOGSCALE_BOUND};
use crate::error::{Error, Result};
use crate::scaled::CompoundProduct;

const MAX_GENERATORS: usize = 26;

/// A reduced word in the generators and their formal inverses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1] ^ 1)
    }

    /// The inverse word: reversed, each letter inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l ^ 1).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for &l in &self.0 {
            let base = b'a' + l / 2;
            let c = if l % 2 == 0 { base } else { base.to_ascii_uppercase() };
            write!(f, "{}", c as char)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        if s == "e" || s.is_empty() {
            return Ok(Word::identity());
        }
        s.chars()
            .map(|c| match c {
                'a'..='z' => Ok((c as u8 - b'a') * 2),
                'A'..='Z' => Ok((c as u8 - b'A') * 2 + 1),
                _ => Err(Error::invalid(format!("bad letter {c:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

/// Ambient group plus generator matrices; inverses and the compound matrices
/// of every letter are computed once at construction.
#[derive(Debug, Clone)]
pub struct MarkedGroup {
    ambient: AmbientGroup,
    generators: Vec<DMatrix<f64>>,
    assume_free: bool,
    letters: Vec<DMatrix<f64>>,
    letter_products: Vec<CompoundProduct>,
}

/// Tolerance on `|det g - 1|` accepted for generators.
pub const GENERATOR_DET_TOL: f64 = 1e-6;

impl MarkedGroup {
    pub fn new(generators: Vec<DMatrix<f64>>, assume_free: bool) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::invalid("a marked group needs at least one generator"));
        };
        if generators.len() > MAX_GENERATORS {
            return Err(Error::invalid(format!("at most {MAX_GENERATORS} generators")));
        }
        if !assume_free {
            return Err(Error::invalid(
                "only free marked groups are supported (assume_free must be true)",
            ));
        }
        let ambient = AmbientGroup::new(first.nrows())?;
        let n = ambient.n();
        let mut letters = Vec::with_capacity(2 * generators.len());
        for (i, g) in generators.iter().enumerate() {
            crate::cartan::check_square_finite(g)?;
            if g.nrows() != n {
                return Err(Error::invalid(format!("generator {i} is not {n}x{n}")));
            }
            let det = g.determinant();
            if (det - 1.0).abs() > GENERATOR_DET_TOL {
                return Err(Error::invalid(format!(
                    "generator {i} has determinant {det}, expected 1"
                )));
            }
            let inv = g
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::invalid(format!("generator {i} is not invertible")))?;
            letters.push(g.clone());
            letters.push(inv);
        }
        let letter_products = letters
            .iter()
            .map(CompoundProduct::from_matrix)
            .collect::<Result<Vec<_>>>()?;
        Ok(MarkedGroup {
            ambient,
            generators,
            assume_free,
            letters,
            letter_products,
        })
    }

    pub fn ambient(&self) -> AmbientGroup {
        self.ambient
    }

    pub fn n(&self) -> usize {
        self.ambient.n()
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn assume_free(&self) -> bool {
        self.assume_free
    }

    /// Matrix of a letter (`2i` generator, `2i + 1` inverse).
    pub fn letter_matrix(&self, letter: u8) -> &DMatrix<f64> {
        &self.letters[letter as usize]
    }

    /// Direct double-precision product of a word; overflows for long words.
    pub fn evaluate(&self, word: &Word) -> DMatrix<f64> {
        let n = self.n();
        word.letters()
            .iter()
            .fold(DMatrix::identity(n, n), |acc, &l| acc * &self.letters[l as usize])
    }

    /// Scaled compound product of a word.
    pub fn evaluate_scaled(&self, word: &Word) -> Result<CompoundProduct> {
        word.letters().iter().try_fold(CompoundProduct::identity(self.n()), |acc, &l| {
            acc.multiply(&self.letter_products[l as usize])
        })
    }

    fn num_letters(&self) -> u8 {
        self.letters.len() as u8
    }
}

/// Number of reduced words of length `m` in a free group of rank `k`.
pub fn sphere_size(k: usize, m: usize) -> u128 {
    if m == 0 {
        return 1;
    }
    let k = k as u128;
    (2 * k) * (2 * k - 1).saturating_pow(m as u32 - 1)
}

/// Number of reduced words of length at most `radius`.
pub fn ball_size(k: usize, radius: usize) -> u128 {
    (0..=radius).fold(0u128, |acc, m| acc.saturating_add(sphere_size(k, m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationOptions {
    pub radius: usize,
    pub budget: u128,
    pub with_lambda: bool,
    pub logscale_bound: f64,
    /// Worker threads; 1 runs on the calling thread.
    pub workers: usize,
}

impl EnumerationOptions {
    pub fn new(radius: usize) -> Self {
        EnumerationOptions {
            radius,
            budget: DEFAULT_BUDGET,
            with_lambda: false,
            logscale_bound: DEFAULT_LOGSCALE_BOUND,
            workers: 1,
        }
    }

    pub fn with_lambda(mut self, yes: bool) -> Self {
        self.with_lambda = yes;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }
}

/// One element of the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElementRecord {
    pub word: Word,
    pub length: usize,
    pub mu: CartanVector,
    pub lambda: Option<CartanVector>,
}

impl GroupElementRecord {
    /// CSV row `word,length,mu_1..mu_n[,lambda_1..lambda_n]`.
    pub fn csv_row(&self) -> String {
        let mut row = format!("{},{}", self.word, self.length);
        for x in self.mu.coords() {
            row.push_str(&format!(",{x:.12e}"));
        }
        if let Some(l) = &self.lambda {
            for x in l.coords() {
                row.push_str(&format!(",{x:.12e}"));
            }
        }
        row
    }

    /// Consistency of `mu(g^-1) = i(mu(g))` against a separately computed inverse.
    pub fn inverse_defect(&self, inverse: &GroupElementRecord) -> f64 {
        opposition_involution(&self.mu).distance(&inverse.mu)
    }
}

pub fn csv_header(n: usize, with_lambda: bool) -> String {
    let mut h = String::from("word,length");
    for i in 1..=n {
        h.push_str(&format!(",mu_{i}"));
    }
    if with_lambda {
        for i in 1..=n {
            h.push_str(&format!(",lambda_{i}"));
        }
    }
    h
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    pub emitted: u64,
    /// Elements (and their subtrees) dropped because the log-scale bound was hit.
    pub dropped: u64,
}

struct Frame {
    product: CompoundProduct,
    next_letter: u8,
}

/// Depth-first iterator over the ball (or over the subtree of one first letter).
pub struct BallIter<'a> {
    group: &'a MarkedGroup,
    opts: EnumerationOptions,
    word: Vec<u8>,
    stack: Vec<Frame>,
    pending_root: bool,
    /// When set, only the subtree below this first letter is visited.
    subtree: Option<u8>,
    stats: EnumerationStats,
    error: Option<Error>,
}

impl<'a> BallIter<'a> {
    fn new(group: &'a MarkedGroup, opts: EnumerationOptions, subtree: Option<u8>) -> Self {
        BallIter {
            group,
            opts,
            word: Vec::new(),
            stack: Vec::new(),
            pending_root: true,
            subtree,
            stats: EnumerationStats::default(),
            error: None,
        }
    }

    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    /// First error hit during enumeration (projection failures), if any.
    pub fn error(&self) -> Option<&Error> {
        self.error.as_ref()
    }

    fn record(&mut self, product: &CompoundProduct) -> Option<GroupElementRecord> {
        let mu = match product.cartan_projection() {
            Ok(mu) => mu,
            Err(e) => {
                self.error.get_or_insert(e);
                return None;
            }
        };
        let lambda = if self.opts.with_lambda {
            match product.jordan_projection() {
                Ok(l) => Some(l),
                Err(e) => {
                    self.error.get_or_insert(e);
                    return None;
                }
            }
        } else {
            None
        };
        self.stats.emitted += 1;
        Some(GroupElementRecord {
            word: Word(self.word.clone()),
            length: self.word.len(),
            mu,
            lambda,
        })
    }

    /// Pushes a child of the current top (or the root) and returns its record.
    fn descend(&mut self, letter: u8, parent: &CompoundProduct) -> Option<Option<GroupElementRecord>> {
        let child = match parent.multiply(&self.group.letter_products[letter as usize]) {
            Ok(c) if c.max_abs_logscale() <= self.opts.logscale_bound => c,
            _ => {
                self.stats.dropped += 1;
                return None;
            }
        };
        self.word.push(letter);
        let rec = self.record(&child);
        self.stack.push(Frame {
            product: child,
            next_letter: 0,
        });
        Some(rec)
    }
}

impl Iterator for BallIter<'_> {
    type Item = GroupElementRecord;

    fn next(&mut self) -> Option<GroupElementRecord> {
        if self.pending_root {
            self.pending_root = false;
            let root = CompoundProduct::identity(self.group.n());
            match self.subtree {
                None => {
                    let rec = self.record(&root);
                    self.stack.push(Frame {
                        product: root,
                        next_letter: 0,
                    });
                    return rec;
                }
                Some(letter) => {
                    if self.opts.radius == 0 {
                        return None;
                    }
                    return self.descend(letter, &root)?;
                }
            }
        }
        let num_letters = self.group.num_letters();
        loop {
            let depth = self.word.len();
            let top = self.stack.last_mut()?;
            let forbidden = self.word.last().map(|l| l ^ 1);
            let mut next = None;
            if depth < self.opts.radius {
                while top.next_letter < num_letters {
                    let l = top.next_letter;
                    top.next_letter += 1;
                    if Some(l) != forbidden {
                        next = Some(l);
                        break;
                    }
                }
            }
            match next {
                Some(letter) => {
                    let parent = top.product.clone();
                    if let Some(rec) = self.descend(letter, &parent) {
                        match rec {
                            Some(r) => return Some(r),
                            None => continue,
                        }
                    }
                }
                None => {
                    self.stack.pop();
                    if self.subtree.is_some() && self.stack.is_empty() {
                        return None;
                    }
                    self.word.pop();
                }
            }
        }
    }
}

fn check_budget(group: &MarkedGroup, opts: &EnumerationOptions) -> Result<()> {
    let requested = ball_size(group.rank(), opts.radius);
    if requested > opts.budget {
        return Err(Error::BudgetExceeded {
            requested,
            budget: opts.budget,
        });
    }
    Ok(())
}

/// Streams the ball on the calling thread, identity first.
pub fn enumerate_ball(group: &MarkedGroup, opts: EnumerationOptions) -> Result<BallIter<'_>> {
    check_budget(group, &opts)?;
    Ok(BallIter::new(group, opts, None))
}

/// Maps every ball element through `f`, dropping `None`s, in the same order as
/// [`enumerate_ball`]. Subtrees of the first letters run on `opts.workers`
/// threads and are concatenated in letter order, so output is identical for
/// any worker count.
pub fn map_ball<T, F>(group: &MarkedGroup, opts: EnumerationOptions, f: F) -> Result<(Vec<T>, EnumerationStats)>
where
    T: Send,
    F: Fn(&GroupElementRecord) -> Option<T> + Sync,
{
    use rayon::prelude::*;

    check_budget(group, &opts)?;
    let run_subtree = |letter: Option<u8>| -> Result<(Vec<T>, EnumerationStats)> {
        let mut it = BallIter::new(group, opts, letter);
        let out: Vec<T> = match letter {
            // the identity alone
            None => {
                let root = it.next();
                root.as_ref().and_then(&f).into_iter().collect()
            }
            Some(_) => it.by_ref().filter_map(|r| f(&r)).collect(),
        };
        if let Some(e) = it.error() {
            return Err(e.clone());
        }
        Ok((out, it.stats()))
    };

    let jobs: Vec<Option<u8>> = std::iter::once(None)
        .chain((0..group.num_letters()).map(Some))
        .collect();
    let parts: Vec<Result<(Vec<T>, EnumerationStats)>> = if opts.workers <= 1 {
        jobs.into_iter().map(run_subtree).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
        pool.install(|| jobs.into_par_iter().map(run_subtree).collect())
    };

    let mut all = Vec::new();
    let mut stats = EnumerationStats::default();
    for part in parts {
        let (items, s) = part?;
        all.extend(items);
        stats.emitted += s.emitted;
        stats.dropped += s.dropped;
    }
    Ok((all, stats))
}

/// Collects the full records of the ball.
pub fn collect_ball(group: &MarkedGroup, opts: EnumerationOptions) -> Result<Vec<GroupElementRecord>> {
    map_ball(group, opts, |r| Some(r.clone())).map(|(v, _)| v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_sl2(t: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[t.exp(), 0.0, 0.0, (-t).exp()])
    }

    fn rotated(t: f64, phi: f64) -> DMatrix<f64> {
        let (s, c) = phi.sin_cos();
        let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        &r * diag_sl2(t) * r.transpose()
    }

    fn f2() -> MarkedGroup {
        MarkedGroup::new(vec![diag_sl2(1.0), rotated(1.0, 0.7)], true).unwrap()
    }

    #[test]
    fn word_display_round_trip() {
        let w: Word = "abAB".parse().unwrap();
        assert_eq!(w.letters(), &[0, 2, 1, 3]);
        assert_eq!(w.to_string(), "abAB");
        assert_eq!(w.inverse().to_string(), "baBA");
        assert_eq!("e".parse::<Word>().unwrap(), Word::identity());
        assert!("a1".parse::<Word>().is_err());
        assert!(!"aA".parse::<Word>().unwrap().is_reduced());
    }

    #[test]
    fn ball_counts_f2() {
        let g = f2();
        assert_eq!(enumerate_ball(&g, EnumerationOptions::new(3)).unwrap().count(), 53);
        assert_eq!(ball_size(2, 3), 53);
        let only_root: Vec<_> = enumerate_ball(&g, EnumerationOptions::new(0)).unwrap().collect();
        assert_eq!(only_root.len(), 1);
        assert_eq!(only_root[0].mu, CartanVector::zero(2));
        assert_eq!(only_root[0].word, Word::identity());
    }

    #[test]
    fn words_are_reduced_unique_and_prefix_ordered() {
        let g = f2();
        let recs: Vec<_> = enumerate_ball(&g, EnumerationOptions::new(4)).unwrap().collect();
        let mut words: Vec<_> = recs.iter().map(|r| r.word.clone()).collect();
        assert!(recs.iter().all(|r| r.word.is_reduced() && r.length == r.word.len()));
        // depth-first preorder is lexicographic order on letter codes
        assert!(words.windows(2).all(|w| w[0] < w[1]));
        words.dedup();
        assert_eq!(words.len() as u128, ball_size(2, 4));
    }

    #[test]
    fn budget_is_checked_up_front() {
        let g = f2();
        let err = enumerate_ball(&g, EnumerationOptions::new(10).budget(1000)).err().unwrap();
        assert!(matches!(err, Error::BudgetExceeded { requested: 118097, budget: 1000 }));
    }

    #[test]
    fn parallel_map_is_identical_to_serial() {
        let g = f2();
        let serial: Vec<_> = enumerate_ball(&g, EnumerationOptions::new(5)).unwrap().collect();
        let (par, stats) = map_ball(&g, EnumerationOptions::new(5).workers(3), |r| Some(r.clone())).unwrap();
        assert_eq!(serial, par);
        assert_eq!(stats.emitted as usize, serial.len());
    }

    #[test]
    fn generators_are_validated() {
        let bad = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(MarkedGroup::new(vec![bad], true).is_err());
        assert!(MarkedGroup::new(vec![], true).is_err());
        assert!(MarkedGroup::new(vec![diag_sl2(1.0)], false).is_err());
        let mixed = vec![diag_sl2(1.0), DMatrix::identity(3, 3)];
        assert!(MarkedGroup::new(mixed, true).is_err());
    }

    #[test]
    fn lambda_on_demand() {
        let g = f2();
        let recs: Vec<_> = enumerate_ball(&g, EnumerationOptions::new(2).with_lambda(true))
            .unwrap()
            .collect();
        assert!(recs.iter().all(|r| r.lambda.is_some()));
        let a = &recs[1];
        assert_eq!(a.word.to_string(), "a");
        assert!((a.lambda.as_ref().unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        assert_eq!(csv_header(2, true), "word,length,mu_1,mu_2,lambda_1,lambda_2");
        let rec = GroupElementRecord {
            word: "aB".parse().unwrap(),
            length: 2,
            mu: CartanVector::zero(2),
            lambda: None,
        };
        assert!(rec.csv_row().starts_with("aB,2,"));
        assert_eq!(rec.csv_row().split(',').count(), 4);
    }
}
