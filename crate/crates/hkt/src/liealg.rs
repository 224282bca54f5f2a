//! Lie algebras given by structure constants: Jacobi validation, the
//! Chevalley–Eilenberg differential on invariant forms, structural
//! classification and direct sums.
//!
//! The differential acts on *left-invariant* forms only, so it carries no
//! Lie-derivative term:
//! `dα(X_0,…,X_k) = Σ_{i<j} (−1)^{i+j} α([X_i,X_j], X_0,…,X̂_i,…,X̂_j,…,X_k)`.
//! In particular `dα(X,Y) = −α([X,Y])` for a 1-form.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{vis_zero, vzero, Mat, Span, Vector};
use crate::multilinear::Form;
use crate::par;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("bracket index out of range in entry {entry}: [{i},{j}] -> {k} (dimension {dim})")]
    IndexOutOfRange {
        entry: usize,
        i: usize,
        j: usize,
        k: usize,
        dim: usize,
    },
    #[error("bracket [e{i},e{i}] must vanish (entry {entry})")]
    DiagonalBracket { entry: usize, i: usize },
    #[error("duplicate bracket coefficient for [e{i},e{j}] on e{k} (entry {entry})")]
    Duplicate {
        entry: usize,
        i: usize,
        j: usize,
        k: usize,
    },
    #[error("Jacobi identity fails for (e{i},e{j},e{k}) in component e{l}")]
    Jacobi { i: usize, j: usize, k: usize, l: usize },
}

/// Structure constants `c^k_{ij}` with `[e_i, e_j] = Σ_k c^k_{ij} e_k`,
/// antisymmetric in `(i, j)`.
#[derive(Clone, Debug)]
pub struct LieAlgebra<S> {
    n: usize,
    c: Vec<S>,
}

impl<S: Scalar> LieAlgebra<S> {
    pub fn abelian(n: usize) -> Self {
        LieAlgebra {
            n,
            c: vec![S::zero(); n * n * n],
        }
    }

    /// Builds the algebra from sparse entries `(i, j, k, value)` meaning
    /// `[e_i, e_j] ∋ value·e_k` (0-based). The antisymmetric completion is
    /// automatic; repeated `(i, j, k)` — in either order of `i, j` — is
    /// rejected. The Jacobi identity is *not* enforced here.
    pub fn from_brackets(n: usize, entries: &[(usize, usize, usize, S)]) -> Result<Self, LieError> {
        let mut alg = Self::abelian(n);
        let mut seen = vec![false; n * n * n];
        for (entry, (i, j, k, v)) in entries.iter().enumerate() {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(LieError::IndexOutOfRange { entry, i, j, k, dim: n });
            }
            if i == j {
                if v.is_zero() {
                    continue;
                }
                return Err(LieError::DiagonalBracket { entry, i });
            }
            let (a, b, s) = if i < j { (i, j, v.clone()) } else { (j, i, -v.clone()) };
            let slot = (a * n + b) * n + k;
            if seen[slot] {
                return Err(LieError::Duplicate { entry, i, j, k });
            }
            seen[slot] = true;
            alg.c[slot] = s.clone();
            alg.c[(b * n + a) * n + k] = -s;
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `c^k_{ij}`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> &S {
        &self.c[(i * self.n + j) * self.n + k]
    }

    /// `[e_i, e_j]` as a coefficient vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &[S] {
        let start = (i * self.n + j) * self.n;
        &self.c[start..start + self.n]
    }

    /// `[x, y]`.
    pub fn bracket(&self, x: &[S], y: &[S]) -> Vector<S> {
        let n = self.n;
        let mut out: Vector<S> = vzero(n);
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let f = x[i].clone() * y[j].clone();
                for (k, c) in self.bracket_basis(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].clone() + f.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// `ad_x` as a matrix (column `j` = `[x, e_j]`).
    pub fn ad(&self, x: &[S]) -> Mat<S> {
        let n = self.n;
        let cols: Vec<Vector<S>> = (0..n)
            .map(|j| self.bracket(x, &crate::linalg::basis(n, j)))
            .collect();
        Mat::from_columns(&cols, n)
    }

    /// `ad_{e_i}`.
    pub fn ad_basis(&self, i: usize) -> Mat<S> {
        let n = self.n;
        Mat::from_fn(n, n, |k, j| self.c(i, j, k).clone())
    }

    /// Non-zero structure constants `(i, j, k, c^k_{ij})` with `i < j`.
    pub fn sparse_brackets(&self) -> Vec<(usize, usize, usize, S)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.c(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra {
            n: self.n,
            c: self.c.iter().map(f).collect(),
        }
    }

    /// First failing Jacobi quadruple `(i, j, k, l)`, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize)> {
        let n = self.n;
        let rows = par::map_range(n * n * n, |t| {
            let (i, j, k) = (t / (n * n), (t / n) % n, t % n);
            if !(i < j && j < k) {
                return None;
            }
            let a = self.bracket(self.bracket_basis(i, j), &crate::linalg::basis(n, k));
            let b = self.bracket(self.bracket_basis(j, k), &crate::linalg::basis(n, i));
            let c = self.bracket(self.bracket_basis(k, i), &crate::linalg::basis(n, j));
            (0..n)
                .find(|&l| !(a[l].clone() + b[l].clone() + c[l].clone()).is_zero())
                .map(|l| (i, j, k, l))
        });
        rows.into_iter().flatten().next()
    }

    /// True iff the Jacobi sum vanishes for all index quadruples.
    pub fn jacobi_check(&self) -> bool {
        self.jacobi_violation().is_none()
    }

    /// Validates the Jacobi identity, naming the failing quadruple.
    pub fn validate(&self) -> Result<(), LieError> {
        match self.jacobi_violation() {
            None => Ok(()),
            Some((i, j, k, l)) => Err(LieError::Jacobi { i, j, k, l }),
        }
    }

    /// Chevalley–Eilenberg differential of an invariant form.
    pub fn d(&self, a: &Form<S>) -> Form<S> {
        assert_eq!(a.dim(), self.n, "dimension mismatch in differential");
        let n = self.n;
        let k = a.degree();
        if k + 1 > n {
            return Form::zero(n, k + 1);
        }
        Form::from_fn(n, k + 1, |t| {
            let mut acc = S::zero();
            let mut args = Vec::with_capacity(k);
            for i in 0..t.len() {
                for j in i + 1..t.len() {
                    let br = self.bracket_basis(t[i], t[j]);
                    if vis_zero(br) {
                        continue;
                    }
                    let rest: Vec<usize> = t
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != i && *p != j)
                        .map(|(_, &x)| x)
                        .collect();
                    let mut term = S::zero();
                    for (m, c) in br.iter().enumerate() {
                        if c.is_zero() || rest.contains(&m) {
                            continue;
                        }
                        args.clear();
                        args.push(m);
                        args.extend_from_slice(&rest);
                        term = term + c.clone() * a.eval_indices(&args);
                    }
                    if (i + j) % 2 == 1 {
                        term = -term;
                    }
                    acc = acc + term;
                }
            }
            acc
        })
    }

    /// Killing form `B(e_i, e_j) = tr(ad_i ad_j)`.
    pub fn killing_form(&self) -> Mat<S> {
        let ads: Vec<Mat<S>> = (0..self.n).map(|i| self.ad_basis(i)).collect();
        Mat::from_fn(self.n, self.n, |i, j| ads[i].mul(&ads[j]).trace())
    }

    /// Span of `[A, B]` for subspaces given by bases.
    fn bracket_span(&self, a: &[Vector<S>], b: &[Vector<S>]) -> Vec<Vector<S>> {
        let mut sp = Span::new(self.n);
        for x in a {
            for y in b {
                sp.insert(&self.bracket(x, y));
            }
        }
        sp.basis().to_vec()
    }

    fn full_basis(&self) -> Vec<Vector<S>> {
        (0..self.n).map(|i| crate::linalg::basis(self.n, i)).collect()
    }

    /// Dimensions of the derived series `g ⊇ [g,g] ⊇ …` until it stabilises.
    pub fn derived_series(&self) -> Vec<usize> {
        let mut cur = self.full_basis();
        let mut dims = vec![cur.len()];
        loop {
            let next = self.bracket_span(&cur, &cur);
            if next.len() == cur.len() {
                break;
            }
            dims.push(next.len());
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        dims
    }

    /// Dimensions of the lower central series `g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ …`.
    pub fn lower_central_series(&self) -> Vec<usize> {
        let all = self.full_basis();
        let mut cur = all.clone();
        let mut dims = vec![cur.len()];
        loop {
            let next = self.bracket_span(&all, &cur);
            if next.len() == cur.len() {
                break;
            }
            dims.push(next.len());
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        dims
    }

    /// Structural flags.
    pub fn classify(&self) -> AlgebraFlags {
        let abelian = self.c.iter().all(|x| x.is_zero());
        let solvable = *self.derived_series().last().unwrap_or(&0) == 0;
        let nilpotent = *self.lower_central_series().last().unwrap_or(&0) == 0;
        let semisimple = self.n > 0 && !self.killing_form().det().is_zero();
        let unimodular = (0..self.n).all(|i| self.ad_basis(i).trace().is_zero());
        AlgebraFlags {
            abelian,
            nilpotent,
            solvable,
            semisimple,
            unimodular,
        }
    }

    /// Direct sum `A ⊕ B` (basis of `A` first, cross brackets zero).
    pub fn direct_sum(&self, other: &LieAlgebra<S>) -> LieAlgebra<S> {
        let (na, nb) = (self.n, other.n);
        let n = na + nb;
        let mut out = LieAlgebra::abelian(n);
        for i in 0..na {
            for j in 0..na {
                for k in 0..na {
                    out.c[(i * n + j) * n + k] = self.c(i, j, k).clone();
                }
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                for k in 0..nb {
                    out.c[((i + na) * n + j + na) * n + k + na] = other.c(i, j, k).clone();
                }
            }
        }
        out
    }
}

/// Structural classification of a Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraFlags {
    pub abelian: bool,
    pub nilpotent: bool,
    pub solvable: bool,
    pub semisimple: bool,
    pub unimodular: bool,
}

/// Free-function form of [`LieAlgebra::jacobi_check`].
pub fn jacobi_check<S: Scalar>(l: &LieAlgebra<S>) -> bool {
    l.jacobi_check()
}

/// Free-function form of [`LieAlgebra::d`].
pub fn ce_differential<S: Scalar>(l: &LieAlgebra<S>, a: &Form<S>) -> Form<S> {
    l.d(a)
}

/// Free-function form of [`LieAlgebra::classify`].
pub fn classify_algebra<S: Scalar>(l: &LieAlgebra<S>) -> AlgebraFlags {
    l.classify()
}

/// Free-function form of [`LieAlgebra::direct_sum`].
pub fn direct_sum<S: Scalar>(a: &LieAlgebra<S>, b: &LieAlgebra<S>) -> LieAlgebra<S> {
    a.direct_sum(b)
}

/// `su(2)` with `[e1,e2]=e3`, `[e2,e3]=e1`, `[e3,e1]=e2`.
pub fn su2<S: Scalar>() -> LieAlgebra<S> {
    LieAlgebra::from_brackets(
        3,
        &[(0, 1, 2, S::one()), (1, 2, 0, S::one()), (2, 0, 1, S::one())],
    )
    .expect("valid su(2) brackets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn e(n: usize, idx: &[usize]) -> Form<Exact> {
        Form::basis(n, &idx.iter().map(|i| i - 1).collect::<Vec<_>>())
    }

    #[test]
    fn jacobi_examples() {
        assert!(LieAlgebra::<Exact>::abelian(4).jacobi_check());
        assert!(su2::<Exact>().jacobi_check());
        // [e1,e2]=e1, [e1,e3]=e2, [e2,e3]=0
        let bad = LieAlgebra::from_brackets(
            3,
            &[(0, 1, 0, Exact::int(1)), (0, 2, 1, Exact::int(1))],
        )
        .unwrap();
        assert!(!bad.jacobi_check());
    }

    #[test]
    fn differential_examples() {
        let ab = LieAlgebra::<Exact>::abelian(4);
        assert!(ab.d(&e(4, &[1])).is_zero());
        let s = su2::<Exact>();
        assert!(s.d(&e(3, &[3])).approx_eq(&e(3, &[1, 2]).neg()));
        let heis = LieAlgebra::from_brackets(3, &[(0, 1, 2, Exact::int(1))]).unwrap();
        assert!(heis.d(&e(3, &[3])).approx_eq(&e(3, &[1, 2]).neg()));
        assert!(heis.d(&e(3, &[1])).is_zero());
        assert!(heis.d(&e(3, &[2])).is_zero());
    }

    #[test]
    fn classification_examples() {
        let f = LieAlgebra::<Exact>::abelian(4).classify();
        assert!(f.abelian && f.nilpotent && f.solvable && f.unimodular && !f.semisimple);
        let f = su2::<Exact>().classify();
        assert!(f.semisimple && f.unimodular && !f.solvable);
        assert_eq!(su2::<Exact>().killing_form().get(0, 0), &Exact::int(-2));
    }

    #[test]
    fn direct_sum_examples() {
        let s = su2::<Exact>().direct_sum(&LieAlgebra::abelian(1));
        assert_eq!(s.dim(), 4);
        assert_eq!(s.c(0, 1, 2), &Exact::int(1));
        assert!(s.bracket_basis(3, 0).iter().all(|x| x.is_zero()));
        let r8 = LieAlgebra::<Exact>::abelian(4).direct_sum(&LieAlgebra::abelian(4));
        assert!(r8.classify().abelian);
        let hh = s.direct_sum(&s);
        assert_eq!(hh.dim(), 8);
        assert_eq!(hh.c(4, 5, 6), &Exact::int(1));
        assert!(hh.bracket_basis(0, 4).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn rejects_bad_entries() {
        let dup = LieAlgebra::from_brackets(3, &[(0, 1, 2, Exact::int(1)), (1, 0, 2, Exact::int(1))]);
        assert!(matches!(dup, Err(LieError::Duplicate { .. })));
        let oob = LieAlgebra::from_brackets(3, &[(0, 3, 2, Exact::int(1))]);
        assert!(matches!(oob, Err(LieError::IndexOutOfRange { .. })));
    }
}
