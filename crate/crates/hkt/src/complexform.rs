//! Complex-valued invariant forms, stored as a pair `(re, im)` of real
//! forms, together with type decomposition relative to a complex structure.
//!
//! Type convention: a `(1,0)`-form satisfies `β(IX) = i β(X)`; the derivation
//! action `X ↦ IX` then acts on `(p,q)`-forms by multiplication with
//! `i(p − q)`, and type components are the corresponding eigenprojections.

use crate::linalg::Vector;
use crate::liealg::LieAlgebra;
use crate::multilinear::{Endomorphism, Form};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct ComplexForm<S: Scalar> {
    pub re: Form<S>,
    pub im: Form<S>,
}

impl<S: Scalar> ComplexForm<S> {
    pub fn new(re: Form<S>, im: Form<S>) -> Self {
        assert_eq!((re.dim(), re.degree()), (im.dim(), im.degree()));
        ComplexForm { re, im }
    }

    pub fn real(re: Form<S>) -> Self {
        let im = Form::zero(re.dim(), re.degree());
        ComplexForm { re, im }
    }

    pub fn zero(n: usize, k: usize) -> Self {
        ComplexForm {
            re: Form::zero(n, k),
            im: Form::zero(n, k),
        }
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    pub fn degree(&self) -> usize {
        self.re.degree()
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexForm::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexForm::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    /// Multiplication by the complex number `a + ib`.
    pub fn scale(&self, a: &S, b: &S) -> Self {
        ComplexForm::new(
            self.re.scale(a).sub(&self.im.scale(b)),
            self.re.scale(b).add(&self.im.scale(a)),
        )
    }

    pub fn scale_real(&self, c: &S) -> Self {
        ComplexForm::new(self.re.scale(c), self.im.scale(c))
    }

    pub fn conj(&self) -> Self {
        ComplexForm::new(self.re.clone(), self.im.neg())
    }

    pub fn wedge(&self, o: &Self) -> Self {
        ComplexForm::new(
            self.re.wedge(&o.re).sub(&self.im.wedge(&o.im)),
            self.re.wedge(&o.im).add(&self.im.wedge(&o.re)),
        )
    }

    pub fn wedge_power(&self, p: usize) -> Self {
        let mut acc = ComplexForm::real(Form::constant(self.dim(), S::one()));
        for _ in 0..p {
            acc = acc.wedge(self);
        }
        acc
    }

    /// Pullback by a real endomorphism.
    pub fn pullback(&self, m: &Endomorphism<S>) -> Self {
        ComplexForm::new(self.re.pullback(m), self.im.pullback(m))
    }

    /// Signed action `(Jα)(X_1,…) = α(−JX_1,…)`.
    pub fn j_act(&self, j: &Endomorphism<S>) -> Self {
        ComplexForm::new(self.re.j_act(j), self.im.j_act(j))
    }

    /// Derivation action of a real endomorphism.
    pub fn derivation(&self, m: &Endomorphism<S>) -> Self {
        ComplexForm::new(self.re.derivation(m), self.im.derivation(m))
    }

    /// Chevalley–Eilenberg differential.
    pub fn d(&self, alg: &LieAlgebra<S>) -> Self {
        ComplexForm::new(alg.d(&self.re), alg.d(&self.im))
    }

    /// Interior product with the complex vector `u + iv`.
    pub fn interior(&self, u: &[S], v: &[S]) -> Self {
        let (ru, iu) = (self.re.interior(u), self.im.interior(u));
        let (rv, iv) = (self.re.interior(v), self.im.interior(v));
        ComplexForm::new(ru.sub(&iv), iu.add(&rv))
    }

    /// Lie derivative along the invariant complex vector field `u + iv`,
    /// via Cartan's formula `L_X = d ι_X + ι_X d`.
    pub fn lie_derivative(&self, alg: &LieAlgebra<S>, u: &[S], v: &[S]) -> Self {
        if self.degree() == 0 {
            return self.interior_free_lie(alg, u, v);
        }
        let a = self.interior(u, v).d(alg);
        let b = self.d(alg).interior(u, v);
        a.add(&b)
    }

    fn interior_free_lie(&self, alg: &LieAlgebra<S>, u: &[S], v: &[S]) -> Self {
        self.d(alg).interior(u, v)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.re.max_abs().max(self.im.max_abs())
    }

    pub fn max_diff(&self, o: &Self) -> f64 {
        self.sub(o).max_abs()
    }

    /// The `(p, q)` component with respect to `i` (`p + q` = degree).
    pub fn type_component(&self, i: &Endomorphism<S>, p: usize, q: usize) -> Self {
        let k = self.degree();
        assert_eq!(p + q, k, "type must match degree");
        let target = p as i64 - q as i64;
        let mut acc = self.clone();
        for pp in 0..=k {
            let m = 2 * pp as i64 - k as i64;
            if m == target {
                continue;
            }
            // (D − i m) / (i(target − m)) with D the derivation action of I.
            let dm = acc.derivation(i);
            let shifted = ComplexForm::new(
                dm.re.add(&acc.im.scale(&S::from_i64(m))),
                dm.im.sub(&acc.re.scale(&S::from_i64(m))),
            );
            // divide by i·c: multiply by −i/c
            let c = S::from_i64(target - m);
            acc = shifted.scale(&S::zero(), &(-(S::one() / c)));
        }
        acc
    }

    /// `∂` relative to `i`: the `(p+1, q)` part of `d` applied to a form
    /// that is assumed to be of pure type `(p, q)`.
    pub fn del(&self, alg: &LieAlgebra<S>, i: &Endomorphism<S>, p: usize, q: usize) -> Self {
        self.d(alg).type_component(i, p + 1, q)
    }

    /// Whether `α(IX, …) = i α(X, …)` in every slot, i.e. pure type `(k, 0)`.
    pub fn is_type_k0(&self, i: &Endomorphism<S>) -> bool {
        let k = self.degree();
        self.sub(&self.type_component(i, k, 0)).is_zero()
    }
}

/// `(1,0)`-part of a real 1-form: `β^{1,0}(X) = ½(β(X) − iβ(IX))`.
pub fn one_zero_part<S: Scalar>(beta: &Form<S>, i: &Endomorphism<S>) -> ComplexForm<S> {
    let bi = beta.pullback(i);
    ComplexForm::new(beta.scale(&S::half()), bi.scale(&(-S::half())))
}

/// `(1,0)`-part of a real vector: `X^{1,0} = ½(X − iIX)`, returned as
/// `(re, im)`.
pub fn vector_one_zero<S: Scalar>(x: &[S], i: &Endomorphism<S>) -> (Vector<S>, Vector<S>) {
    let half = S::half();
    let re = x.iter().map(|c| half.clone() * c.clone()).collect();
    let im = i.apply(x).iter().map(|c| -(half.clone() * c.clone())).collect();
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternionic::standard_triple;
    use crate::scalar::Exact;

    #[test]
    fn one_zero_forms_have_type_10() {
        let (i, _, _) = standard_triple::<Exact>();
        for a in 0..4 {
            let beta = Form::basis(4, &[a]);
            let b10 = one_zero_part(&beta, &i);
            assert!(b10.is_type_k0(&i));
            let proj = ComplexForm::real(beta.clone()).type_component(&i, 1, 0);
            assert!(proj.sub(&b10).is_zero());
            let back = b10.add(&b10.conj());
            assert!(back.sub(&ComplexForm::real(beta)).is_zero());
        }
    }

    #[test]
    fn type_components_sum_to_form() {
        let (i, _, _) = standard_triple::<Exact>();
        let a = Form::basis(4, &[0, 2]).add(&Form::basis(4, &[1, 3]).scale(&Exact::int(3)));
        let c = ComplexForm::real(a);
        let s = c
            .type_component(&i, 2, 0)
            .add(&c.type_component(&i, 1, 1))
            .add(&c.type_component(&i, 0, 2));
        assert!(s.sub(&c).is_zero());
    }
}
