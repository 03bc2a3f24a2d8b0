//! Fox derivatives and presentation Jacobians.
//!
//! The derivation rules are the standard ones: `∂x_j/∂x_j = 1`,
//! `∂x_i/∂x_j = 0` for `i ≠ j`, and the product rule
//! `∂(uv)/∂x_j = ∂u/∂x_j + u·∂v/∂x_j`, which forces
//! `∂(x_j^{-1})/∂x_j = -x_j^{-1}`.

use num_bigint::BigInt;
use num_traits::One;

use crate::presentations::{GroupRingElement, GroupRingMatrix, Presentation, Word};
use crate::zlinalg::IntegerMatrix;

/// Fox derivative of a word with respect to generator `j`.
pub fn fox_derivative(w: &Word, j: usize) -> GroupRingElement {
    let rank = w.rank();
    assert!(j < rank, "generator index {j} out of range for rank {rank}");
    let mut out = GroupRingElement::zero(rank);
    let mut prefix = Word::identity(rank);
    for &letter in w.letters() {
        if letter.gen == j {
            if letter.inverse {
                // prefix · (-x_j^{-1}) contributes -(prefix consumed through this letter)
                out -= &GroupRingElement::from_word(prefix.mul_letter(letter));
            } else {
                out += &GroupRingElement::from_word(prefix.clone());
            }
        }
        prefix = prefix.mul_letter(letter);
    }
    out
}

/// The `r x n` matrix of Fox derivatives of the relators.
///
/// Rows are relators, columns are generators; this is the matrix the
/// augmentation sends to the abelianized relation matrix.
pub fn fox_jacobian(p: &Presentation) -> GroupRingMatrix {
    let n = p.rank();
    if p.relators().is_empty() {
        return GroupRingMatrix::zero(n, 0, n);
    }
    let rows = p
        .relators()
        .iter()
        .map(|r| (0..n).map(|j| fox_derivative(r, j)).collect())
        .collect();
    GroupRingMatrix::from_rows(n, rows)
}

/// A presentation Jacobian together with its extension by extra rows.
#[derive(Clone, Debug)]
pub struct JacobianBundle {
    pub presentation: Presentation,
    pub jacobian: GroupRingMatrix,
    pub extension_words: Vec<Word>,
    pub extended: GroupRingMatrix,
}

/// Extends the Jacobian by the Fox derivative rows of `extra`.
pub fn extend_jacobian(p: &Presentation, extra: &[Word]) -> JacobianBundle {
    let n = p.rank();
    let jacobian = fox_jacobian(p);
    let extra_rows: Vec<Vec<GroupRingElement>> = extra
        .iter()
        .map(|w| {
            assert_eq!(w.rank(), n, "alphabet-size mismatch");
            (0..n).map(|j| fox_derivative(w, j)).collect()
        })
        .collect();
    let extended = if extra_rows.is_empty() {
        jacobian.clone()
    } else {
        jacobian.stack(&GroupRingMatrix::from_rows(n, extra_rows))
    };
    JacobianBundle {
        presentation: p.clone(),
        jacobian,
        extension_words: extra.to_vec(),
        extended,
    }
}

/// Entrywise augmentation of a group-ring matrix.
pub fn augment_matrix(m: &GroupRingMatrix) -> IntegerMatrix {
    IntegerMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).augmentation())
}

/// Sum `Σ_j (∂w/∂x_j)(x_j - 1)`, equal to `w - 1` by the fundamental formula.
pub fn fundamental_formula_lhs(w: &Word) -> GroupRingElement {
    let rank = w.rank();
    let mut acc = GroupRingElement::zero(rank);
    for j in 0..rank {
        let xj = GroupRingElement::from_word(Word::generator(rank, j));
        let factor = &xj - &GroupRingElement::scalar(rank, BigInt::one());
        acc += &(&fox_derivative(w, j) * &factor);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::parse_presentation;

    fn word(text: &str, names: &[&str]) -> Word {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        crate::presentations::parse_word(text, &names).unwrap()
    }

    #[test]
    fn derivative_of_xy_wrt_x_is_one() {
        let w = word("x*y", &["x", "y"]);
        let d = fox_derivative(&w, 0);
        assert_eq!(d, GroupRingElement::one(2));
    }

    #[test]
    fn derivative_of_inverse() {
        let w = word("x^-1", &["x"]);
        let d = fox_derivative(&w, 0);
        let expected = -&GroupRingElement::from_word(Word::generator(1, 0).inverse());
        assert_eq!(d, expected);
    }

    #[test]
    fn kropholler_thurston_entry() {
        // ∂(zyzy^-2)/∂y augments to -1
        let w = word("z*y*z*y^-2", &["y", "z"]);
        let d = fox_derivative(&w, 0);
        assert_eq!(d.augmentation(), (-1).into());
    }

    #[test]
    fn jacobian_of_two_torsion_relators() {
        let p = parse_presentation("< a, b | a^2, b^3 >")
            .unwrap()
            .into_presentation();
        let jac = fox_jacobian(&p);
        let a = Word::generator(2, 0);
        let b = Word::generator(2, 1);
        // [[1+a, 0], [0, 1+b+b^2]]
        let one = GroupRingElement::one(2);
        assert_eq!(jac.get(0, 0), &(&one + &GroupRingElement::from_word(a)));
        assert!(jac.get(0, 1).is_zero());
        assert!(jac.get(1, 0).is_zero());
        let expected = &(&one + &GroupRingElement::from_word(b.clone()))
            + &GroupRingElement::from_word(b.pow(2));
        assert_eq!(jac.get(1, 1), &expected);
    }

    #[test]
    fn jacobian_of_free_presentation_has_no_rows() {
        let p = Presentation::free(1);
        let jac = fox_jacobian(&p);
        assert_eq!((jac.rows(), jac.cols()), (0, 1));
    }

    #[test]
    fn augmented_kropholler_thurston_jacobian() {
        let p = parse_presentation("< y, z | z*y*z*y^-2, y*z*y*z^-6 >")
            .unwrap()
            .into_presentation();
        let m = augment_matrix(&fox_jacobian(&p));
        let expect = [[-1i64, 2], [2, -5]];
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.get(i, j), &BigInt::from(expect[i][j]));
            }
        }
    }

    #[test]
    fn augmenting_a_zero_matrix_gives_a_zero_matrix() {
        let z = GroupRingMatrix::zero(2, 2, 3);
        let m = augment_matrix(&z);
        assert_eq!((m.rows(), m.cols()), (2, 3));
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), &BigInt::from(0));
            }
        }
    }

    #[test]
    fn augmented_torsion_jacobian() {
        let p = parse_presentation("< a, b | a^2, b^3 >")
            .unwrap()
            .into_presentation();
        let m = augment_matrix(&fox_jacobian(&p));
        assert_eq!(m.get(0, 0), &BigInt::from(2));
        assert_eq!(m.get(1, 1), &BigInt::from(3));
        assert_eq!(m.get(0, 1), &BigInt::from(0));
        assert_eq!(m.get(1, 0), &BigInt::from(0));
    }

    #[test]
    fn extension_rows() {
        let p = parse_presentation("< a, b | a^2, b^3 >")
            .unwrap()
            .into_presentation();
        // no extra words: extended == jacobian
        let bundle = extend_jacobian(&p, &[]);
        assert_eq!(bundle.extended, bundle.jacobian);

        // extra = [ab]: last row is (1, a)
        let ab = word("a*b", &["a", "b"]);
        let bundle = extend_jacobian(&p, &[ab]);
        assert_eq!(bundle.extended.rows(), 3);
        assert_eq!(bundle.extended.get(2, 0), &GroupRingElement::one(2));
        assert_eq!(
            bundle.extended.get(2, 1),
            &GroupRingElement::from_word(Word::generator(2, 0))
        );

        // extra = [x_j] over a free group: standard basis row
        let f2 = Presentation::free(2);
        let bundle = extend_jacobian(&f2, &[Word::generator(2, 1)]);
        assert_eq!(bundle.extended.rows(), 1);
        assert!(bundle.extended.get(0, 0).is_zero());
        assert_eq!(bundle.extended.get(0, 1), &GroupRingElement::one(2));
    }

    #[test]
    fn fundamental_formula_on_fixed_words() {
        for text in ["z*y*z*y^-2", "y^-3*z*y*z^2", "(y*z)^4"] {
            let w = word(text, &["y", "z"]);
            let lhs = fundamental_formula_lhs(&w);
            let rhs = &GroupRingElement::from_word(w.clone()) - &GroupRingElement::one(2);
            assert_eq!(lhs, rhs, "fundamental formula fails for {text}");
        }
    }
}
