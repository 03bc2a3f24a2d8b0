//! Evaluation of group-ring matrices in finite quotients: normalized
//! kernel dimensions, spectral measures, moment checks, and the
//! `C·|log ε|^{-1}` small-spectrum bound.
//!
//! Dimensions at zero are computed by exact rational elimination; the
//! eigensolver is only trusted away from zero, where nothing needs to be
//! exact. Rational arithmetic suffices for kernel questions over a finite
//! quotient, so no complex or operator-level computation is attempted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::foxcalc::{extend_jacobian, fox_jacobian};
use crate::presentations::{GroupRingMatrix, Presentation, Word};
use crate::quotients::FiniteQuotient;
use crate::zlinalg::{rank as matrix_rank, IntegerMatrix};

/// Relative tolerance for eigenvalue clustering and moment comparison.
pub const EIGEN_TOLERANCE: f64 = 1e-9;
pub const MOMENT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpectralError {
    #[error("matrix is not self-adjoint over the quotient group ring")]
    NotSelfAdjoint,
    #[error("alphabet of the matrix does not match the quotient source")]
    AlphabetMismatch,
}

/// Induces a group-ring matrix in the regular representation of a finite
/// quotient: each entry becomes a `|Q| x |Q|` integer block.
pub fn induce_regular_matrix(m: &GroupRingMatrix, q: &FiniteQuotient) -> IntegerMatrix {
    assert_eq!(
        m.rank(),
        q.source().rank(),
        "alphabet of the matrix does not match the quotient source"
    );
    let n = q.order();
    let mut out = IntegerMatrix::zero(m.rows() * n, m.cols() * n);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            for (w, c) in m.get(i, j).terms() {
                let perm = q.element_perm(q.word_index(w));
                for (s, &t) in perm.iter().enumerate() {
                    let cur = out.get(i * n + s, j * n + t).clone();
                    out.set(i * n + s, j * n + t, cur + c);
                }
            }
        }
    }
    out
}

/// `dim ker / |Q|` of the induced matrix, exact.
pub fn normalized_kernel_dimension(m: &GroupRingMatrix, q: &FiniteQuotient) -> BigRational {
    let induced = induce_regular_matrix(m, q);
    let nullity = induced.cols() - matrix_rank(&induced);
    BigRational::new(BigInt::from(nullity), BigInt::from(q.order()))
}

/// A finite atomic spectral measure.
///
/// Masses are exact rationals summing to the block-row count; the atom at
/// zero carries the exact normalized nullity rather than a float count.
#[derive(Clone, PartialEq, Debug)]
pub struct SpectralMeasure {
    pub atoms: Vec<(f64, BigRational)>,
    pub total_mass: BigRational,
    /// True when the input was not self-adjoint over the quotient and the
    /// measure is that of `m* m`.
    pub squared: bool,
}

impl SpectralMeasure {
    /// Mass of `{0}`.
    pub fn zero_mass(&self) -> BigRational {
        self.atoms
            .iter()
            .find(|(e, _)| *e == 0.0)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Mass of `[0, eps)`, counting the exact zero atom.
    pub fn mass_below(&self, eps: f64) -> BigRational {
        self.atoms
            .iter()
            .filter(|(e, _)| *e < eps)
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// `∫ t^n dμ`.
    pub fn moment(&self, n: u32) -> f64 {
        self.atoms
            .iter()
            .map(|(e, m)| e.powi(n as i32) * m.to_f64().unwrap_or(f64::NAN))
            .sum()
    }
}

/// Spectral measure of a group-ring matrix in a finite quotient.
///
/// A matrix that is not self-adjoint over the quotient is replaced by
/// `m* m`, recorded in `squared`. The zero atom always carries the exact
/// normalized nullity of the original matrix.
pub fn spectral_measure(m: &GroupRingMatrix, q: &FiniteQuotient) -> SpectralMeasure {
    let induced = induce_regular_matrix(m, q);
    // Exact nullity; over the rationals ker(m* m) = ker(m), so the
    // original matrix decides the zero atom in the squared case too.
    let nullity = induced.cols() - matrix_rank(&induced);
    let (matrix, squared) = if induced.rows() == induced.cols() && induced.is_symmetric() {
        (induced, false)
    } else {
        let sq = induce_regular_matrix(&(&m.adjoint_transpose() * m), q);
        debug_assert!(sq.is_symmetric());
        (sq, true)
    };
    measure_from_symmetric(&matrix, nullity, q.order(), squared)
}

fn measure_from_symmetric(
    matrix: &IntegerMatrix,
    exact_nullity: usize,
    order: usize,
    squared: bool,
) -> SpectralMeasure {
    let dim = matrix.rows();
    let total_mass = BigRational::new(BigInt::from(dim), BigInt::from(order));
    if dim == 0 {
        return SpectralMeasure {
            atoms: Vec::new(),
            total_mass,
            squared,
        };
    }
    let dm = nalgebra::DMatrix::<f64>::from_fn(dim, dim, |i, j| {
        matrix.get(i, j).to_f64().expect("entry fits in f64")
    });
    let mut eigen: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    // Drop the `exact_nullity` eigenvalues nearest zero; they are the true
    // kernel and get the exact atom instead.
    eigen.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    let mut nonzero: Vec<f64> = eigen.split_off(exact_nullity);
    nonzero.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let scale = nonzero.iter().fold(1.0f64, |acc, e| acc.max(e.abs()));
    let mut atoms: Vec<(f64, BigRational)> = Vec::new();
    if exact_nullity > 0 {
        atoms.push((
            0.0,
            BigRational::new(BigInt::from(exact_nullity), BigInt::from(order)),
        ));
    }
    let mut i = 0;
    while i < nonzero.len() {
        let mut j = i + 1;
        while j < nonzero.len() && (nonzero[j] - nonzero[j - 1]).abs() <= EIGEN_TOLERANCE * scale {
            j += 1;
        }
        let count = j - i;
        let mean = nonzero[i..j].iter().sum::<f64>() / count as f64;
        atoms.push((
            mean,
            BigRational::new(BigInt::from(count), BigInt::from(order)),
        ));
        i = j;
    }
    debug_assert_eq!(
        atoms.iter().map(|(_, m)| m.clone()).sum::<BigRational>(),
        total_mass
    );
    SpectralMeasure {
        atoms,
        total_mass,
        squared,
    }
}

/// Result of a symbolic-versus-numeric moment comparison.
#[derive(Clone, PartialEq, Debug)]
pub struct MomentCheck {
    /// Normalized trace of `m^n` computed in the quotient group ring.
    pub symbolic: BigRational,
    /// `∫ t^n dμ` from the spectral measure.
    pub numeric: f64,
}

impl MomentCheck {
    pub fn within_tolerance(&self) -> bool {
        let s = self.symbolic.to_f64().unwrap_or(f64::NAN);
        (s - self.numeric).abs() <= MOMENT_TOLERANCE * (1.0 + s.abs())
    }
}

/// Elements of `Z[Q]` as dense coefficient vectors indexed by element.
struct QuotientRing<'a> {
    q: &'a FiniteQuotient,
    /// Right-translation permutation of each element, built on demand.
    perms: Vec<Option<Vec<usize>>>,
    inverse_of: Vec<usize>,
}

type QElem = Vec<BigInt>;

impl<'a> QuotientRing<'a> {
    fn new(q: &'a FiniteQuotient) -> Self {
        let inverse_of = (0..q.order()).map(|i| q.inverse_index(i)).collect();
        QuotientRing {
            q,
            perms: vec![None; q.order()],
            inverse_of,
        }
    }

    fn order(&self) -> usize {
        self.q.order()
    }

    fn perm(&mut self, i: usize) -> Vec<usize> {
        if self.perms[i].is_none() {
            self.perms[i] = Some(self.q.element_perm(i));
        }
        self.perms[i].clone().unwrap()
    }

    fn zero(&self) -> QElem {
        vec![BigInt::zero(); self.order()]
    }

    fn one(&self) -> QElem {
        let mut e = self.zero();
        e[0] = BigInt::from(1);
        e
    }

    fn reduce(&self, e: &crate::presentations::GroupRingElement) -> QElem {
        let mut out = self.zero();
        for (w, c) in e.terms() {
            out[self.q.word_index(w)] += c;
        }
        out
    }

    fn adjoint(&self, a: &QElem) -> QElem {
        let mut out = self.zero();
        for (i, c) in a.iter().enumerate() {
            out[self.inverse_of[i]] += c;
        }
        out
    }

    fn mul(&mut self, a: &QElem, b: &QElem) -> QElem {
        let mut out = self.zero();
        for j in 0..b.len() {
            if b[j].is_zero() {
                continue;
            }
            let perm = self.perm(j);
            for i in 0..a.len() {
                if a[i].is_zero() {
                    continue;
                }
                let k = perm[i];
                let v = &a[i] * &b[j];
                out[k] += v;
            }
        }
        out
    }

    fn add_assign(&self, a: &mut QElem, b: &QElem) {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
    }
}

/// Compares the symbolic trace of `m^n` in `Z[Q]` with the spectral
/// measure's `n`-th moment. The matrix must be self-adjoint over the
/// quotient group ring.
pub fn moment_check(
    m: &GroupRingMatrix,
    q: &FiniteQuotient,
    n: u32,
) -> Result<MomentCheck, SpectralError> {
    if m.rank() != q.source().rank() {
        return Err(SpectralError::AlphabetMismatch);
    }
    if m.rows() != m.cols() {
        return Err(SpectralError::NotSelfAdjoint);
    }
    let mut ring = QuotientRing::new(q);
    let p = m.rows();
    let reduced: Vec<Vec<QElem>> = (0..p)
        .map(|i| (0..p).map(|j| ring.reduce(m.get(i, j))).collect())
        .collect();
    for i in 0..p {
        for j in 0..p {
            if reduced[i][j] != ring.adjoint(&reduced[j][i]) {
                return Err(SpectralError::NotSelfAdjoint);
            }
        }
    }

    // power = reduced^n in M_p(Z[Q])
    let mut power: Vec<Vec<QElem>> = (0..p)
        .map(|i| (0..p).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect();
    for _ in 0..n {
        let mut next: Vec<Vec<QElem>> = (0..p).map(|_| (0..p).map(|_| ring.zero()).collect()).collect();
        for i in 0..p {
            for k in 0..p {
                let mut acc = ring.zero();
                for (j, reduced_row) in reduced.iter().enumerate() {
                    let prod = ring.mul(&power[i][j], &reduced_row[k]);
                    ring.add_assign(&mut acc, &prod);
                }
                next[i][k] = acc;
            }
        }
        power = next;
    }
    let trace: BigInt = (0..p).map(|i| power[i][i][0].clone()).sum();
    let symbolic = BigRational::from_integer(trace);
    let numeric = spectral_measure(m, q).moment(n);
    Ok(MomentCheck { symbolic, numeric })
}

/// One `(measure, eps)` evaluation of the small-spectrum bound.
#[derive(Clone, PartialEq, Debug)]
pub struct LogBoundRow {
    pub measure_index: usize,
    pub eps: f64,
    /// `μ([0, eps))`
    pub mass_below: BigRational,
    /// `μ({0})`
    pub zero_mass: BigRational,
    /// Smallest `C` making `μ([0,eps)) <= μ({0}) + C/|log eps|` hold here.
    pub required_c: f64,
    /// True when the supplied constant fails on this row.
    pub violates_supplied: bool,
}

/// Evaluation of `μ([0,ε)) <= μ({0}) + C·|log ε|^{-1}` over a family.
#[derive(Clone, PartialEq, Debug)]
pub struct LogBoundReport {
    pub supplied_c: f64,
    /// Smallest constant that makes the bound hold across the family.
    pub minimal_c: f64,
    pub rows: Vec<LogBoundRow>,
}

impl LogBoundReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violates_supplied).count()
    }
}

/// Evaluates both sides of the small-spectrum bound on an eps grid.
/// Epsilon values must lie in `(0, 1)`.
pub fn log_bound_report(
    measures: &[SpectralMeasure],
    supplied_c: f64,
    eps_grid: &[f64],
) -> LogBoundReport {
    assert!(
        eps_grid.iter().all(|&e| 0.0 < e && e < 1.0),
        "eps values must lie in (0,1)"
    );
    let mut rows = Vec::with_capacity(measures.len() * eps_grid.len());
    let mut minimal_c = 0.0f64;
    for (measure_index, mu) in measures.iter().enumerate() {
        for &eps in eps_grid {
            let mass_below = mu.mass_below(eps);
            let zero_mass = mu.zero_mass();
            let excess = (&mass_below - &zero_mass).to_f64().unwrap_or(f64::NAN);
            let log_abs = eps.ln().abs();
            let required_c = (excess * log_abs).max(0.0);
            minimal_c = minimal_c.max(required_c);
            let rhs = zero_mass.to_f64().unwrap_or(f64::NAN) + supplied_c / log_abs;
            let violates_supplied =
                mass_below.to_f64().unwrap_or(f64::NAN) > rhs + 1e-12;
            rows.push(LogBoundRow {
                measure_index,
                eps,
                mass_below,
                zero_mass,
                required_c,
                violates_supplied,
            });
        }
    }
    LogBoundReport {
        supplied_c,
        minimal_c,
        rows,
    }
}

/// Normalized kernel dimensions of the Fox matrix and its extension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Z1Estimate {
    /// `dim ker(A*) / |Q|`, the cocycle-space dimension over the quotient.
    pub z1_dimension: BigRational,
    /// `dim ker(B') / |Q|` when extension words were supplied; its
    /// vanishing exhibits the injectivity mechanism at the quotient level.
    pub extended_kernel_dimension: Option<BigRational>,
}

/// Estimates `dim Z^1` over a finite quotient via the Fox matrix, plus the
/// kernel of the extended matrix when extension words are given.
pub fn z1_dimension_estimate(
    p: &Presentation,
    extension_words: &[Word],
    q: &FiniteQuotient,
) -> Z1Estimate {
    let jac = fox_jacobian(p);
    let z1_dimension = normalized_kernel_dimension(&jac, q);
    let extended_kernel_dimension = if extension_words.is_empty() {
        None
    } else {
        let bundle = extend_jacobian(p, extension_words);
        Some(normalized_kernel_dimension(&bundle.extended, q))
    };
    Z1Estimate {
        z1_dimension,
        extended_kernel_dimension,
    }
}
