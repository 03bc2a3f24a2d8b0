//! Lower and upper bounds for the first L2-Betti number, normal-rank
//! witnesses, and the metric on marked groups.
//!
//! Torsion lower bounds are only reported as certified when the relator
//! orders are witnessed in an explicit finite quotient: the relator
//! `R_i^{n_i}` forces the order of `R_i` to divide `n_i`, so a quotient
//! where the image order is exactly `n_i` settles it.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::cosets::{trivial_quotient_check, TrivialityCheck};
use crate::presentations::{reduced_words_of_length, Presentation, TorsionPresentation, Word};
use crate::quotients::{search_finite_quotients, FiniteQuotient};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// What a bound report is about.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundQuantity {
    FirstL2Betti,
    NormalRank,
}

/// Evidence attached to a bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Evidence {
    /// A finite quotient witnessing relator orders.
    RelatorOrders {
        quotient_order: usize,
        /// `(relator root, exponent, witnessed order)` per torsion relator.
        relators: Vec<(String, u64, usize)>,
    },
    /// The generator count behind `d(G) <= n`.
    GeneratorCount { generators: usize },
    /// A certified trivial quotient by the normal closure of witnesses.
    TrivialQuotient {
        killed: Vec<String>,
        cosets_defined: usize,
    },
}

/// A one- or two-sided bound with its certification state.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundReport {
    pub quantity: BoundQuantity,
    pub lower: Option<BigRational>,
    pub upper: Option<BigRational>,
    pub certified: bool,
    /// Set when a lower bound is non-positive and thus carries no content.
    pub vacuous: bool,
    pub evidence: Vec<Evidence>,
}

/// `σ(P) = Σ 1/n_i` over the torsion exponents, exact.
pub fn sigma(tp: &TorsionPresentation) -> BigRational {
    tp.torsion_relators()
        .iter()
        .map(|(_, n)| ratio(1, *n as i64))
        .sum()
}

/// Per-relator irreducibility status.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Irreducibility {
    /// Some quotient maps the root to an element of order exactly `n_i`.
    Certified { quotient_index: usize, order: usize },
    /// No witness found; the order in the group may still equal `n_i`.
    Unknown,
}

/// Looks for order witnesses for each torsion relator among the quotients.
/// Never refutes: the relator already forces the order to divide `n_i`.
pub fn check_irreducibility(
    tp: &TorsionPresentation,
    quotients: &[FiniteQuotient],
) -> Vec<Irreducibility> {
    tp.torsion_relators()
        .iter()
        .map(|(root, n)| {
            for (quotient_index, q) in quotients.iter().enumerate() {
                let order = q.word_order(root);
                if order as u64 == *n {
                    return Irreducibility::Certified {
                        quotient_index,
                        order,
                    };
                }
            }
            Irreducibility::Unknown
        })
        .collect()
}

/// Lower bound `|X| - 1 - σ(P)`, certified only when a quotient witnesses
/// every relator order.
pub fn pt_lower_bound(
    tp: &TorsionPresentation,
    certificate: Option<&FiniteQuotient>,
) -> BoundReport {
    let n = tp.rank() as i64;
    let lower = ratio(n - 1, 1) - sigma(tp);
    let mut certified = false;
    let mut evidence = Vec::new();
    if let Some(q) = certificate {
        let names = tp.base().generator_names();
        let mut relators = Vec::new();
        let mut all = true;
        for (root, exp) in tp.torsion_relators() {
            let order = q.word_order(root);
            all &= order as u64 == *exp;
            relators.push((root.format_with(names), *exp, order));
        }
        certified = all;
        evidence.push(Evidence::RelatorOrders {
            quotient_order: q.order(),
            relators,
        });
    }
    let vacuous = lower <= ratio(0, 1);
    BoundReport {
        quantity: BoundQuantity::FirstL2Betti,
        lower: Some(lower),
        upper: None,
        certified,
        vacuous,
        evidence,
    }
}

/// Upper bound `d(G) - 1 <= n - 1` from the generator count.
pub fn generator_bound(p: &Presentation) -> BoundReport {
    let n = p.rank();
    BoundReport {
        quantity: BoundQuantity::FirstL2Betti,
        lower: None,
        upper: Some(ratio(n as i64 - 1, 1)),
        certified: true,
        vacuous: false,
        evidence: vec![Evidence::GeneratorCount { generators: n }],
    }
}

/// Attempts to certify `nrk(G) <= |witnesses|` by collapsing the quotient
/// by the witnesses' normal closure.
pub fn normal_rank_witness(p: &Presentation, witnesses: &[Word], budget: usize) -> BoundReport {
    assert!(budget >= 1, "budget must be at least 1");
    let names = p.generator_names();
    let killed: Vec<String> = witnesses.iter().map(|w| w.format_with(names)).collect();
    match trivial_quotient_check(p, witnesses, budget) {
        TrivialityCheck::CertifiedTrivial { cosets_defined } => BoundReport {
            quantity: BoundQuantity::NormalRank,
            lower: None,
            upper: Some(ratio(witnesses.len() as i64, 1)),
            certified: true,
            vacuous: false,
            evidence: vec![Evidence::TrivialQuotient {
                killed,
                cosets_defined,
            }],
        },
        TrivialityCheck::Inconclusive { .. } => BoundReport {
            quantity: BoundQuantity::NormalRank,
            lower: None,
            upper: None,
            certified: false,
            vacuous: false,
            evidence: Vec::new(),
        },
    }
}

/// A normal subgroup of `F_n` given by relator words, together with the
/// search depth used by the membership semidecision.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MarkedGroup {
    pub rank: usize,
    pub relators: Vec<Word>,
    pub membership_budget: usize,
}

impl MarkedGroup {
    pub fn new(rank: usize, relators: Vec<Word>, membership_budget: usize) -> Self {
        assert!(rank >= 1);
        assert!(relators.iter().all(|r| r.rank() == rank));
        MarkedGroup {
            rank,
            relators,
            membership_budget,
        }
    }

    pub fn from_presentation(p: &Presentation, membership_budget: usize) -> Self {
        Self::new(p.rank(), p.relators().to_vec(), membership_budget)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Membership {
    In,
    Out,
    Unknown,
}

/// Semidecision machinery for membership in a normal closure:
/// bounded products of conjugates for the positive side, finite-quotient
/// separation for the negative side.
struct MembershipOracle {
    members: BTreeSet<Word>,
    quotients: Vec<FiniteQuotient>,
}

const SEPARATION_DEGREE: usize = 5;
const SEPARATION_COUNT: usize = 16;
const CLOSURE_STATE_CAP: usize = 200_000;

impl MembershipOracle {
    fn build(marked: &MarkedGroup, word_length_cap: usize) -> Self {
        let rank = marked.rank;
        // Conjugates u r^{±1} u^{-1} with |u| <= budget.
        let conj_len = marked.membership_budget.min(4);
        let mut generators: BTreeSet<Word> = BTreeSet::new();
        for len in 0..=conj_len {
            for u in reduced_words_of_length(rank, len) {
                for r in &marked.relators {
                    let c = u.mul(r).mul(&u.inverse());
                    generators.insert(c.inverse());
                    generators.insert(c);
                }
            }
        }
        // Breadth-first products, pruned by word length.
        let mut members: BTreeSet<Word> = BTreeSet::new();
        members.insert(Word::identity(rank));
        let mut queue: std::collections::VecDeque<Word> =
            std::collections::VecDeque::from([Word::identity(rank)]);
        while let Some(w) = queue.pop_front() {
            for s in &generators {
                let v = w.mul(s);
                if v.len() <= word_length_cap
                    && members.len() < CLOSURE_STATE_CAP
                    && members.insert(v.clone())
                {
                    queue.push_back(v);
                }
            }
        }
        // Separation pool: kernels of small quotients of <gens | relators>.
        let names: Vec<String> = (1..=rank).map(|i| format!("x{i}")).collect();
        let relators: Vec<Word> = marked
            .relators
            .iter()
            .filter(|r| !r.is_identity())
            .cloned()
            .collect();
        let p = Presentation::new(names, relators).expect("marked-group presentation");
        let quotients =
            search_finite_quotients(&p, SEPARATION_DEGREE, SEPARATION_COUNT).unwrap_or_default();
        MembershipOracle { members, quotients }
    }

    fn decide(&self, w: &Word) -> Membership {
        if w.is_identity() || self.members.contains(w) {
            return Membership::In;
        }
        if self.quotients.iter().any(|q| !q.is_in_kernel(w)) {
            return Membership::Out;
        }
        Membership::Unknown
    }
}

/// Outcome of a marked-groups distance computation.
///
/// The metric is `2^{-k}` for the largest `k` with
/// `N_1 ∩ B(k) = N_2 ∩ B(k)`; the infimum over all radii is not computable
/// in general, so indeterminacy is a value here, not an error.
#[derive(Clone, PartialEq, Debug)]
pub enum DistanceResult {
    /// Balls agree exactly through `agreement_radius` and provably differ
    /// at the next radius: the distance is exactly `2^{-agreement_radius}`.
    Exact {
        agreement_radius: usize,
        witness: Word,
        witness_in_first: bool,
    },
    /// Balls agree through `max_radius`; distance at most
    /// `2^{-max_radius}`, reported as 0 but not a proof of equality.
    AgreementUpTo { max_radius: usize },
    /// Some memberships were undecided: the distance lies between the two
    /// dyadic bounds.
    Interval {
        /// `2^{-k}` lower bound from a decided disagreement, if any.
        lower_exponent: Option<usize>,
        /// `2^{-k}` upper bound from the last fully decided equal radius.
        upper_exponent: usize,
        undecided: Vec<Word>,
    },
}

impl DistanceResult {
    /// Numeric value when exactly determined.
    pub fn exact_distance(&self) -> Option<f64> {
        match self {
            DistanceResult::Exact {
                agreement_radius, ..
            } => Some(2f64.powi(-(*agreement_radius as i32))),
            _ => None,
        }
    }
}

/// Computes the marked-groups distance up to a radius cutoff.
pub fn marked_distance(a: &MarkedGroup, b: &MarkedGroup, max_radius: usize) -> DistanceResult {
    assert_eq!(a.rank, b.rank, "marked groups must share the rank");
    let set_a: BTreeSet<&Word> = a.relators.iter().collect();
    let set_b: BTreeSet<&Word> = b.relators.iter().collect();
    if set_a == set_b {
        // Identical relator sets define the same subgroup syntactically.
        return DistanceResult::AgreementUpTo { max_radius };
    }

    let max_rel = a
        .relators
        .iter()
        .chain(&b.relators)
        .map(|r| r.len())
        .max()
        .unwrap_or(0);
    let cap = max_radius + max_rel + 2 * a.membership_budget.max(b.membership_budget).min(4);
    let oracle_a = MembershipOracle::build(a, cap);
    let oracle_b = MembershipOracle::build(b, cap);

    let mut undecided: Vec<Word> = Vec::new();
    let mut last_fully_decided_equal = 0usize;
    for radius in 1..=max_radius {
        let mut radius_clean = true;
        for w in reduced_words_of_length(a.rank, radius) {
            let da = oracle_a.decide(&w);
            let db = oracle_b.decide(&w);
            match (da, db) {
                (Membership::In, Membership::Out) | (Membership::Out, Membership::In) => {
                    // Agreement fails from this radius on.
                    if undecided.is_empty() {
                        return DistanceResult::Exact {
                            agreement_radius: radius - 1,
                            witness: w,
                            witness_in_first: da == Membership::In,
                        };
                    }
                    return DistanceResult::Interval {
                        lower_exponent: Some(radius - 1),
                        upper_exponent: last_fully_decided_equal,
                        undecided,
                    };
                }
                (Membership::Unknown, _) | (_, Membership::Unknown) => {
                    radius_clean = false;
                    undecided.push(w);
                }
                _ => {}
            }
        }
        if radius_clean && undecided.is_empty() {
            last_fully_decided_equal = radius;
        }
    }
    if undecided.is_empty() {
        DistanceResult::AgreementUpTo { max_radius }
    } else {
        DistanceResult::Interval {
            lower_exponent: None,
            upper_exponent: last_fully_decided_equal,
            undecided,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{parse_presentation, parse_word};

    fn torsion(text: &str) -> TorsionPresentation {
        parse_presentation(text).unwrap().torsion().unwrap().clone()
    }

    fn pres(text: &str) -> Presentation {
        parse_presentation(text).unwrap().into_presentation()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&torsion("< a, b | a^2, b^3 >")), ratio(5, 6));
        assert_eq!(
            sigma(&torsion("< x1, x2, x3 | x1^5, x2^5, x3^5 >")),
            ratio(3, 5)
        );
        assert_eq!(sigma(&torsion("< x | x^2 >")), ratio(1, 2));
    }

    #[test]
    fn pslz_lower_bound_is_one_sixth() {
        let tp = torsion("< a, b | a^2, b^3 >");
        let s3 = FiniteQuotient::from_permutation_images(
            tp.base(),
            &[vec![1, 0, 2], vec![1, 2, 0]],
            100,
        )
        .unwrap();
        let report = pt_lower_bound(&tp, Some(&s3));
        assert_eq!(report.lower, Some(ratio(1, 6)));
        assert!(report.certified);
        assert!(!report.vacuous);
    }

    #[test]
    fn vacuous_lower_bound_is_flagged() {
        let tp = torsion("< x | x^2 >");
        let report = pt_lower_bound(&tp, None);
        assert_eq!(report.lower, Some(ratio(-1, 2)));
        assert!(report.vacuous);
        assert!(!report.certified);
    }

    #[test]
    fn irreducibility_with_insufficient_witness() {
        let tp = torsion("< x | x^4 >");
        // Z/2 image: order 2 < 4, no certificate.
        let z2 =
            FiniteQuotient::from_permutation_images(tp.base(), &[vec![1, 0]], 100).unwrap();
        let status = check_irreducibility(&tp, &[z2]);
        assert_eq!(status, vec![Irreducibility::Unknown]);
    }

    #[test]
    fn irreducibility_of_pslz_under_the_order_six_quotient() {
        let tp = torsion("< a, b | a^2, b^3 >");
        let s3 = FiniteQuotient::from_permutation_images(
            tp.base(),
            &[vec![1, 0, 2], vec![1, 2, 0]],
            100,
        )
        .unwrap();
        let status = check_irreducibility(&tp, &[s3]);
        assert!(status
            .iter()
            .all(|s| matches!(s, Irreducibility::Certified { order: 2..=3, .. })));
    }

    #[test]
    fn generator_bound_examples() {
        assert_eq!(
            generator_bound(&pres("< a, b | a^2, b^3 >")).upper,
            Some(ratio(1, 1))
        );
        assert_eq!(
            generator_bound(&Presentation::free(1)).upper,
            Some(ratio(0, 1))
        );
    }

    #[test]
    fn nrk_witness_for_pslz() {
        let p = pres("< a, b | a^2, b^3 >");
        let ab = parse_word("a*b", p.generator_names()).unwrap();
        let report = normal_rank_witness(&p, &[ab], 200);
        assert!(report.certified);
        assert_eq!(report.upper, Some(ratio(1, 1)));
    }

    #[test]
    fn nrk_witness_inconclusive_for_free_group() {
        let p = Presentation::free(2);
        let a = Word::generator(2, 0);
        let report = normal_rank_witness(&p, &[a], 1000);
        assert!(!report.certified);
        assert!(report.upper.is_none());
    }

    #[test]
    fn distance_of_identical_lists() {
        let p = pres("< a, b | a^2, b^3 >");
        let m1 = MarkedGroup::from_presentation(&p, 2);
        let m2 = MarkedGroup::from_presentation(&p, 2);
        assert_eq!(
            marked_distance(&m1, &m2, 4),
            DistanceResult::AgreementUpTo { max_radius: 4 }
        );
    }

    #[test]
    fn distance_of_the_fixture_pair() {
        let p1 = pres("< a, b | a^2, b^3 >");
        let p2 = pres("< a, b | a^2, b^4 >");
        let m1 = MarkedGroup::from_presentation(&p1, 2);
        let m2 = MarkedGroup::from_presentation(&p2, 2);
        let d = marked_distance(&m1, &m2, 3);
        match d {
            DistanceResult::Exact {
                agreement_radius,
                ref witness,
                ..
            } => {
                assert_eq!(agreement_radius, 2);
                assert_eq!(witness.len(), 3);
            }
            other => panic!("expected exact distance, got {other:?}"),
        }
        // Stability: raising the cutoff does not change the result.
        for r in 4..=6 {
            let d2 = marked_distance(&m1, &m2, r);
            assert_eq!(d2.exact_distance(), d.exact_distance());
        }
    }

    #[test]
    fn distance_of_coordinate_closures() {
        // N1 = <<a>>, N2 = <<b>> in F2: disagreement at radius 1.
        let m1 = MarkedGroup::new(2, vec![Word::generator(2, 0)], 2);
        let m2 = MarkedGroup::new(2, vec![Word::generator(2, 1)], 2);
        let d = marked_distance(&m1, &m2, 3);
        match d {
            DistanceResult::Exact {
                agreement_radius,
                ref witness,
                ..
            } => {
                assert_eq!(agreement_radius, 0);
                assert_eq!(witness.len(), 1);
            }
            other => panic!("expected exact distance, got {other:?}"),
        }
    }
}
