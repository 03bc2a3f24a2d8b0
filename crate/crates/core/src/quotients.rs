//! Finite quotients, nested normal-subgroup chains, and the finite-index
//! Betti ratio estimator.
//!
//! A quotient is stored as the right regular action of its image group,
//! so normalized dimensions over it match von Neumann dimensions without
//! multiplicity bookkeeping. Chains are built by cumulative kernel
//! intersections; whether the intersection of the whole chain is trivial
//! is not certifiable here, so estimates are reported as lower-bound
//! evidence only.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::cosets::{subgroup_betti1, CosetTable};
use crate::presentations::{Letter, Presentation, Word};

/// Hard ceiling on the search degree; everything here is desk scale.
pub const MAX_SEARCH_DEGREE: usize = 12;
/// Default ceiling on the order of a materialized quotient.
pub const DEFAULT_ORDER_CAP: usize = 5000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuotientError {
    #[error("search degree {0} exceeds the desk-scale guard {MAX_SEARCH_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("quotient order exceeds the configured cap {cap}")]
    OrderCapExceeded { cap: usize },
    #[error("generator images do not satisfy relator {index}")]
    RelatorNotSatisfied { index: usize },
    #[error("quotients come from different presentations")]
    SourceMismatch,
    #[error("image degree mismatch")]
    DegreeMismatch,
}

fn compose(first: &[usize], then: &[usize]) -> Vec<usize> {
    first.iter().map(|&x| then[x]).collect()
}

fn identity_perm(degree: usize) -> Vec<usize> {
    (0..degree).collect()
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &img) in p.iter().enumerate() {
        inv[img] = i;
    }
    inv
}

fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &img)| i == img)
}

fn eval_word_on(images: &[Vec<usize>], inverses: &[Vec<usize>], w: &Word) -> Vec<usize> {
    let degree = images.first().map_or(0, |p| p.len());
    let mut out = identity_perm(degree);
    for l in w.letters() {
        let step = if l.inverse {
            &inverses[l.gen]
        } else {
            &images[l.gen]
        };
        out = compose(&out, step);
    }
    out
}

/// A surjection of a presentation onto a finite group, stored as the right
/// regular action of the image.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteQuotient {
    source: Presentation,
    order: usize,
    /// `regular_action[g][i]` is the index of `e_i · g`.
    regular_action: Vec<Vec<usize>>,
    inverse_action: Vec<Vec<usize>>,
    /// A word over the source generators mapping onto element `i`;
    /// element 0 is the identity.
    element_words: Vec<Word>,
}

impl FiniteQuotient {
    /// The trivial quotient of order 1.
    pub fn trivial(p: &Presentation) -> Self {
        FiniteQuotient {
            source: p.clone(),
            order: 1,
            regular_action: vec![vec![0]; p.rank()],
            inverse_action: vec![vec![0]; p.rank()],
            element_words: vec![Word::identity(p.rank())],
        }
    }

    /// Builds a quotient from explicit permutation images of the
    /// generators, verifying the relators and converting to regular form.
    pub fn from_permutation_images(
        p: &Presentation,
        images: &[Vec<usize>],
        order_cap: usize,
    ) -> Result<Self, QuotientError> {
        assert_eq!(images.len(), p.rank(), "one image per generator");
        let degree = images.first().map_or(1, |p| p.len());
        if images.iter().any(|im| im.len() != degree) {
            return Err(QuotientError::DegreeMismatch);
        }
        let inverses: Vec<Vec<usize>> = images.iter().map(|p| invert(p)).collect();
        for (index, r) in p.relators().iter().enumerate() {
            if !is_identity(&eval_word_on(images, &inverses, r)) {
                return Err(QuotientError::RelatorNotSatisfied { index });
            }
        }
        Self::regularize(p, images, order_cap)
    }

    /// Closure of the image group with element words, then regular form.
    fn regularize(
        p: &Presentation,
        images: &[Vec<usize>],
        order_cap: usize,
    ) -> Result<Self, QuotientError> {
        let rank = p.rank();
        let degree = images.first().map_or(1, |p| p.len());
        let inverses: Vec<Vec<usize>> = images.iter().map(|p| invert(p)).collect();

        let mut elements: Vec<Vec<usize>> = vec![identity_perm(degree)];
        let mut words: Vec<Word> = vec![Word::identity(rank)];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(elements[0].clone(), 0);
        let mut at = 0;
        while at < elements.len() {
            for g in 0..rank {
                for inverse in [false, true] {
                    let step = if inverse { &inverses[g] } else { &images[g] };
                    let next = compose(&elements[at], step);
                    if !index.contains_key(&next) {
                        if elements.len() >= order_cap {
                            return Err(QuotientError::OrderCapExceeded { cap: order_cap });
                        }
                        index.insert(next.clone(), elements.len());
                        words.push(words[at].mul_letter(Letter::new(g, inverse)));
                        elements.push(next);
                    }
                }
            }
            at += 1;
        }

        let order = elements.len();
        let mut regular_action = vec![vec![0usize; order]; rank];
        for (g, action) in regular_action.iter_mut().enumerate() {
            for (i, e) in elements.iter().enumerate() {
                action[i] = index[&compose(e, &images[g])];
            }
        }
        let inverse_action = regular_action.iter().map(|p| invert(p)).collect();
        Ok(FiniteQuotient {
            source: p.clone(),
            order,
            regular_action,
            inverse_action,
            element_words: words,
        })
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Index of the kernel, which equals the order of the image.
    pub fn index(&self) -> usize {
        self.order
    }

    pub fn regular_action(&self) -> &[Vec<usize>] {
        &self.regular_action
    }

    pub fn element_word(&self, i: usize) -> &Word {
        &self.element_words[i]
    }

    /// Element index of the image of a word.
    pub fn word_index(&self, w: &Word) -> usize {
        let mut at = 0;
        for l in w.letters() {
            at = if l.inverse {
                self.inverse_action[l.gen][at]
            } else {
                self.regular_action[l.gen][at]
            };
        }
        at
    }

    pub fn is_in_kernel(&self, w: &Word) -> bool {
        self.word_index(w) == 0
    }

    /// The regular permutation of element `i`.
    pub fn element_perm(&self, i: usize) -> Vec<usize> {
        eval_word_on(
            &self.regular_action,
            &self.inverse_action,
            &self.element_words[i],
        )
    }

    /// Index of the inverse of element `i`.
    pub fn inverse_index(&self, i: usize) -> usize {
        invert(&self.element_perm(i))[0]
    }

    /// Order of element `i` in the image group.
    pub fn element_order(&self, i: usize) -> usize {
        let p = self.element_perm(i);
        let mut seen = vec![false; self.order];
        let mut result = 1usize;
        for start in 0..self.order {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            loop {
                seen[x] = true;
                len += 1;
                x = p[x];
                if x == start {
                    break;
                }
            }
            result = num_integer::lcm(result, len);
        }
        result
    }

    /// Order of the image of a word.
    pub fn word_order(&self, w: &Word) -> usize {
        self.element_order(self.word_index(w))
    }

    /// The coset table of the kernel: the regular action itself, with the
    /// kernel as the stabilizer of coset 0.
    pub fn kernel_coset_table(&self) -> CosetTable {
        CosetTable::from_action(
            self.source.generator_names().to_vec(),
            self.regular_action.clone(),
        )
    }

    /// True when `ker(self)` is contained in `ker(coarser)`, certified by
    /// the diagonal orbit having exactly `self.order` elements.
    pub fn refines(&self, coarser: &FiniteQuotient) -> bool {
        if self.source.generator_names() != coarser.source.generator_names() {
            return false;
        }
        match diagonal_orbit(self, coarser, self.order) {
            Some(orbit) => orbit.len() == self.order,
            None => false,
        }
    }

    /// True when the two quotients have the same kernel.
    pub fn same_kernel(&self, other: &FiniteQuotient) -> bool {
        self.order == other.order && self.refines(other)
    }
}

/// BFS orbit of `(0,0)` under the diagonal action; `None` once the orbit
/// exceeds `cap`. The orbit is the subdirect image of the pair.
fn diagonal_orbit(
    a: &FiniteQuotient,
    b: &FiniteQuotient,
    cap: usize,
) -> Option<Vec<(usize, usize)>> {
    let rank = a.source.rank();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut orbit = vec![(0usize, 0usize)];
    seen.insert((0, 0), 0);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((x, y)) = queue.pop_front() {
        for g in 0..rank {
            for inverse in [false, true] {
                let nx = if inverse {
                    a.inverse_action[g][x]
                } else {
                    a.regular_action[g][x]
                };
                let ny = if inverse {
                    b.inverse_action[g][y]
                } else {
                    b.regular_action[g][y]
                };
                if !seen.contains_key(&(nx, ny)) {
                    if orbit.len() >= cap {
                        return None;
                    }
                    seen.insert((nx, ny), orbit.len());
                    orbit.push((nx, ny));
                    queue.push_back((nx, ny));
                }
            }
        }
    }
    Some(orbit)
}

/// Quotient whose kernel is the intersection of the two kernels: the
/// subdirect image inside the direct product, in regular form.
pub fn intersect_quotients(
    a: &FiniteQuotient,
    b: &FiniteQuotient,
    order_cap: usize,
) -> Result<FiniteQuotient, QuotientError> {
    if a.source.generator_names() != b.source.generator_names() {
        return Err(QuotientError::SourceMismatch);
    }
    let rank = a.source.rank();
    let orbit =
        diagonal_orbit(a, b, order_cap).ok_or(QuotientError::OrderCapExceeded { cap: order_cap })?;
    let index: HashMap<(usize, usize), usize> = orbit
        .iter()
        .enumerate()
        .map(|(i, &pair)| (pair, i))
        .collect();
    let order = orbit.len();
    let mut regular_action = vec![vec![0usize; order]; rank];
    for (g, action) in regular_action.iter_mut().enumerate() {
        for (i, &(x, y)) in orbit.iter().enumerate() {
            action[i] = index[&(a.regular_action[g][x], b.regular_action[g][y])];
        }
    }
    let inverse_action: Vec<Vec<usize>> = regular_action.iter().map(|p| invert(p)).collect();
    // Rebuild short element words over the new action.
    let mut words = vec![Word::identity(rank); order];
    let mut seen = vec![false; order];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in 0..rank {
            for inverse in [false, true] {
                let j = if inverse {
                    inverse_action[g][i]
                } else {
                    regular_action[g][i]
                };
                if !seen[j] {
                    seen[j] = true;
                    words[j] = words[i].mul_letter(Letter::new(g, inverse));
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(FiniteQuotient {
        source: a.source.clone(),
        order,
        regular_action,
        inverse_action,
        element_words: words,
    })
}

/// Lexicographic iterator over all permutations of a given degree.
struct PermIter {
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl PermIter {
    fn new(degree: usize) -> Self {
        PermIter {
            current: identity_perm(degree),
            started: false,
            done: false,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let n = self.current.len();
        if n < 2 {
            self.done = true;
            return None;
        }
        let Some(i) = (0..n - 1).rev().find(|&i| self.current[i] < self.current[i + 1]) else {
            self.done = true;
            return None;
        };
        let j = (i + 1..n).rev().find(|&j| self.current[j] > self.current[i]).unwrap();
        self.current.swap(i, j);
        self.current[i + 1..].reverse();
        Some(&self.current)
    }
}

/// Backtracking search for surjections onto permutation groups of degree
/// at most `max_degree`, returned in regular form with kernel-distinct
/// results only. Deterministic: degrees ascend and images are tried in
/// lexicographic order.
pub fn search_finite_quotients(
    p: &Presentation,
    max_degree: usize,
    max_count: usize,
) -> Result<Vec<FiniteQuotient>, QuotientError> {
    if max_degree > MAX_SEARCH_DEGREE {
        return Err(QuotientError::DegreeTooLarge(max_degree));
    }
    let rank = p.rank();
    // For each relator, the largest generator index it mentions; the
    // relator can be checked as soon as that generator is assigned.
    let max_gen: Vec<usize> = p
        .relators()
        .iter()
        .map(|r| r.letters().iter().map(|l| l.gen).max().unwrap_or(0))
        .collect();

    let mut found: Vec<FiniteQuotient> = Vec::new();
    for degree in 1..=max_degree.max(1) {
        if found.len() >= max_count {
            break;
        }
        let mut images: Vec<Vec<usize>> = Vec::with_capacity(rank);
        assign_images(
            p,
            degree,
            &max_gen,
            &mut images,
            &mut found,
            max_count,
        );
    }
    Ok(found)
}

fn assign_images(
    p: &Presentation,
    degree: usize,
    max_gen: &[usize],
    images: &mut Vec<Vec<usize>>,
    found: &mut Vec<FiniteQuotient>,
    max_count: usize,
) {
    if found.len() >= max_count {
        return;
    }
    let rank = p.rank();
    if images.len() == rank {
        let Ok(q) = FiniteQuotient::regularize(p, images, DEFAULT_ORDER_CAP) else {
            return;
        };
        if found.iter().all(|existing| !existing.same_kernel(&q)) {
            found.push(q);
        }
        return;
    }
    let level = images.len();
    let mut it = PermIter::new(degree);
    while let Some(perm) = it.next() {
        images.push(perm.to_vec());
        let inverses: Vec<Vec<usize>> = images.iter().map(|p| invert(p)).collect();
        let ok = p
            .relators()
            .iter()
            .zip(max_gen)
            .filter(|(_, &mg)| mg == level)
            .all(|(r, _)| is_identity(&eval_word_on(images, &inverses, r)));
        if ok {
            assign_images(p, degree, max_gen, images, found, max_count);
        }
        images.pop();
        if found.len() >= max_count {
            return;
        }
    }
}

/// A nested chain of finite quotients with strictly increasing indices.
#[derive(Clone, Debug)]
pub struct QuotientChain {
    pub quotients: Vec<FiniteQuotient>,
    pub indices: Vec<usize>,
}

impl QuotientChain {
    /// Verifies the nesting certificates pairwise.
    pub fn verify_nesting(&self) -> bool {
        self.quotients
            .windows(2)
            .all(|w| w[1].refines(&w[0]))
    }
}

/// Builds a chain by cumulative intersections over the pool, ordered by
/// ascending quotient order. Stagnating intersections are dropped, and a
/// pool element whose intersection would exceed the order cap is skipped.
pub fn build_chain(
    p: &Presentation,
    pool: &[FiniteQuotient],
    length: usize,
    order_cap: usize,
) -> QuotientChain {
    let mut ordered: Vec<&FiniteQuotient> = pool.iter().collect();
    ordered.sort_by_key(|q| q.order());
    let mut quotients: Vec<FiniteQuotient> = Vec::new();
    let mut current: Option<FiniteQuotient> = None;
    for q in ordered {
        if quotients.len() >= length {
            break;
        }
        if q.order() <= 1 || q.source().generator_names() != p.generator_names() {
            continue;
        }
        let candidate = match &current {
            None => q.clone(),
            Some(c) => match intersect_quotients(c, q, order_cap) {
                Ok(next) => next,
                Err(_) => continue,
            },
        };
        let prev_order = current.as_ref().map_or(1, |c| c.order());
        if candidate.order() > prev_order {
            quotients.push(candidate.clone());
            current = Some(candidate);
        }
    }
    let indices = quotients.iter().map(|q| q.index()).collect();
    QuotientChain { quotients, indices }
}

/// One sampled ratio of the estimator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BettiSample {
    pub index: usize,
    pub betti1: usize,
    pub ratio: BigRational,
}

/// Sampled finite-index Betti ratios along a chain.
///
/// The ratios are lower-bound evidence for the first L2-Betti number;
/// equality needs a residual chain and finite presentability, neither of
/// which is certified here.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BettiEstimate {
    pub samples: Vec<BettiSample>,
    /// Maximum sampled ratio over the tail half of the chain; a computable
    /// stand-in for the limsup at finite depth.
    pub limsup_lower_bound: BigRational,
    /// Always false: triviality of the chain intersection is not certified.
    pub intersection_trivial_certified: bool,
}

/// Computes `β₁(N_i) / [G:N_i]` for every kernel in the chain.
pub fn luck_estimate(p: &Presentation, chain: &QuotientChain) -> BettiEstimate {
    assert!(!chain.quotients.is_empty(), "chain must be nonempty");
    let samples: Vec<BettiSample> = chain
        .quotients
        .par_iter()
        .map(|q| {
            let table = q.kernel_coset_table();
            let b = subgroup_betti1(p, &table);
            BettiSample {
                index: q.index(),
                betti1: b,
                ratio: BigRational::new(BigInt::from(b), BigInt::from(q.index())),
            }
        })
        .collect();
    let tail_start = samples.len() / 2;
    let limsup_lower_bound = samples[tail_start..]
        .iter()
        .map(|s| s.ratio.clone())
        .max()
        .expect("nonempty tail");
    BettiEstimate {
        samples,
        limsup_lower_bound,
        intersection_trivial_certified: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_presentation;

    fn pres(text: &str) -> Presentation {
        parse_presentation(text).unwrap().into_presentation()
    }

    #[test]
    fn cyclic_quotients_of_f1() {
        let f1 = Presentation::free(1);
        let pool = search_finite_quotients(&f1, 5, 32).unwrap();
        let mut orders: Vec<usize> = pool.iter().map(|q| q.order()).collect();
        orders.sort();
        // Cyclic quotients of orders 1..5 and nothing else at degree <= 5
        // except Z/6 from a (2,3)-cycle pattern at degree 5.
        assert!(orders.starts_with(&[1, 2, 3, 4, 5]));
    }

    #[test]
    fn pslz_has_the_order_six_quotient() {
        let pslz = pres("< a, b | a^2, b^3 >");
        let pool = search_finite_quotients(&pslz, 3, 32).unwrap();
        assert!(pool.iter().any(|q| q.order() == 6));
    }

    #[test]
    fn kropholler_thurston_has_no_small_quotients() {
        let kt = pres("< y, z | z*y*z*y^-2, y*z*y*z^-6 >");
        let pool = search_finite_quotients(&kt, 4, 8).unwrap();
        let orders: Vec<usize> = pool.iter().map(|q| q.order()).collect();
        assert_eq!(orders, vec![1]);
    }

    #[test]
    fn regular_action_is_free_and_transitive() {
        let pslz = pres("< a, b | a^2, b^3 >");
        let pool = search_finite_quotients(&pslz, 3, 32).unwrap();
        for q in &pool {
            for i in 1..q.order() {
                let p = q.element_perm(i);
                assert!(p.iter().enumerate().all(|(x, &y)| x != y), "free action");
            }
            // transitivity: element words reach every point from 0
            for i in 0..q.order() {
                assert_eq!(q.word_index(q.element_word(i)), i);
            }
        }
    }

    #[test]
    fn intersection_of_coprime_cyclic_kernels() {
        let f1 = Presentation::free(1);
        let z2 = FiniteQuotient::from_permutation_images(&f1, &[vec![1, 0]], 100).unwrap();
        let z3 = FiniteQuotient::from_permutation_images(&f1, &[vec![1, 2, 0]], 100).unwrap();
        let q = intersect_quotients(&z2, &z3, 100).unwrap();
        assert_eq!(q.order(), 6);
        assert!(q.refines(&z2));
        assert!(q.refines(&z3));

        // idempotence and identity
        assert!(intersect_quotients(&z2, &z2, 100).unwrap().same_kernel(&z2));
        let triv = FiniteQuotient::trivial(&f1);
        assert!(intersect_quotients(&triv, &z3, 100).unwrap().same_kernel(&z3));
    }

    #[test]
    fn chain_of_cyclic_quotients() {
        let f1 = Presentation::free(1);
        let pool: Vec<FiniteQuotient> = [2usize, 3, 5]
            .iter()
            .map(|&n| {
                let mut shift: Vec<usize> = (1..n).collect();
                shift.push(0);
                FiniteQuotient::from_permutation_images(&f1, &[shift], 100).unwrap()
            })
            .collect();
        let chain = build_chain(&f1, &pool, 10, 1000);
        assert_eq!(chain.indices, vec![2, 6, 30]);
        assert!(chain.verify_nesting());

        let single = build_chain(&f1, &pool[..1], 10, 1000);
        assert_eq!(single.indices, vec![2]);
    }

    #[test]
    fn luck_samples_for_pslz() {
        let pslz = pres("< a, b | a^2, b^3 >");
        // S3: a -> (0 1), b -> (0 1 2)
        let s3 =
            FiniteQuotient::from_permutation_images(&pslz, &[vec![1, 0, 2], vec![1, 2, 0]], 100)
                .unwrap();
        assert_eq!(s3.order(), 6);
        // A5: a -> (0 1)(2 3), b -> (0 2 4)
        let a5 = FiniteQuotient::from_permutation_images(
            &pslz,
            &[vec![1, 0, 3, 2, 4], vec![2, 1, 4, 3, 0]],
            100,
        )
        .unwrap();
        assert_eq!(a5.order(), 60);

        let chain = QuotientChain {
            indices: vec![6, 60],
            quotients: vec![s3, a5],
        };
        let est = luck_estimate(&pslz, &chain);
        let expect = |b: i64, m: i64| BigRational::new(BigInt::from(b), BigInt::from(m));
        assert_eq!(est.samples[0].betti1, 2);
        assert_eq!(est.samples[0].ratio, expect(1, 3));
        assert_eq!(est.samples[1].betti1, 11);
        assert_eq!(est.samples[1].ratio, expect(11, 60));
        // ratio - 1/6 = 1/index, exactly
        for s in &est.samples {
            let idx = BigInt::from(s.index as i64);
            assert_eq!(
                &s.ratio - expect(1, 6),
                BigRational::new(BigInt::from(1), idx)
            );
        }
        assert!(!est.intersection_trivial_certified);
    }

    #[test]
    fn finite_group_kernel_has_zero_betti() {
        let p = pres("< x | x^2 >");
        let q = FiniteQuotient::from_permutation_images(&p, &[vec![1, 0]], 100).unwrap();
        let chain = QuotientChain {
            indices: vec![2],
            quotients: vec![q],
        };
        let est = luck_estimate(&p, &chain);
        assert_eq!(est.samples[0].betti1, 0);
        assert_eq!(
            est.samples[0].ratio,
            BigRational::new(BigInt::from(0), BigInt::from(2))
        );
    }

    #[test]
    fn degree_guard() {
        let f1 = Presentation::free(1);
        assert_eq!(
            search_finite_quotients(&f1, 13, 1).unwrap_err(),
            QuotientError::DegreeTooLarge(13)
        );
    }
}
