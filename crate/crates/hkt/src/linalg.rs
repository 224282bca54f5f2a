//! Dense linear algebra over a generic [`Scalar`]: matrices, Gaussian
//! elimination (rank, kernel, solve, inverse, determinant), characteristic
//! polynomials and incrementally grown spans.

use crate::scalar::Scalar;

/// Vector of scalar coordinates.
pub type Vector<S> = Vec<S>;

pub fn vzero<S: Scalar>(n: usize) -> Vector<S> {
    vec![S::zero(); n]
}

/// Standard basis vector `e_i` in dimension `n`.
pub fn basis<S: Scalar>(n: usize, i: usize) -> Vector<S> {
    let mut v = vzero(n);
    v[i] = S::one();
    v
}

pub fn vadd<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vsub<S: Scalar>(a: &[S], b: &[S]) -> Vector<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vscale<S: Scalar>(c: &S, a: &[S]) -> Vector<S> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn vis_zero<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn vapprox_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y))
}

/// Maximum absolute entry, as `f64`.
pub fn vmax_abs<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
}

/// Row-major dense matrix. As an endomorphism, column `j` holds the image
/// of the basis vector `e_j`.
#[derive(Clone, Debug)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from rows.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector<S>], rows: usize) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vector<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out: Mat<S> = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vector<S> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    pub fn add(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Mat<S> {
        self.map(|x| c.clone() * x.clone())
    }

    pub fn neg(&self) -> Mat<S> {
        self.map(|x| -x.clone())
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, o: &Mat<S>) -> Mat<S> {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn approx_eq(&self, o: &Mat<S>) -> bool {
        self.rows == o.rows && self.cols == o.cols && vapprox_eq(&self.data, &o.data)
    }

    pub fn max_abs(&self) -> f64 {
        vmax_abs(&self.data)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j).approx_eq(self.get(j, i))))
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat<S>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // pivot of largest magnitude among non-zero candidates
            let mut best: Option<(usize, f64)> = None;
            for i in r..m.rows {
                let x = m.get(i, c);
                if !x.is_zero() {
                    let mag = x.magnitude();
                    if best.is_none_or(|(_, b)| mag > b) {
                        best = Some((i, mag));
                    }
                }
            }
            let Some((p, _)) = best else { continue };
            m.swap_rows(r, p);
            let inv = S::one() / m.get(r, c).clone();
            for j in 0..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            m.set(r, c, S::one());
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
                m.set(i, c, S::zero());
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : Mx = 0}`.
    pub fn kernel(&self) -> Vec<Vector<S>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vzero(self.cols);
                v[f] = S::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// A solution of `Mx = b` if one exists (free variables set to zero).
    pub fn solve(&self, b: &[S]) -> Option<Vector<S>> {
        assert_eq!(b.len(), self.rows);
        let aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vzero(self.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat<S>> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                S::one()
            } else {
                S::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r.get(i, j + n).clone()))
    }

    pub fn det(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return S::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = det * piv.clone();
            for i in c + 1..n {
                let f = m.get(i, c).clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).clone() - f.clone() * m.get(c, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Coefficients `c_0, …, c_n` of `det(λ·Id − M) = Σ c_k λ^k`
    /// (Faddeev–LeVerrier).
    pub fn charpoly(&self) -> Vec<S> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[n] = S::one();
        let id = Mat::identity(n);
        let mut mk = Mat::zeros(n, n);
        for k in 1..=n {
            // M_k = A·M_{k-1} + c_{n-k+1}·I ; c_{n-k} = −tr(A·M_k)/k
            mk = self.mul(&mk).add(&id.scale(&coeffs[n - k + 1]));
            let c = -(self.mul(&mk).trace()) / S::from_i64(k as i64);
            coeffs[n - k] = c;
        }
        coeffs
    }

    /// Leading principal minors are all positive.
    pub fn is_positive_definite(&self) -> bool {
        self.is_square()
            && self.is_symmetric()
            && (1..=self.rows).all(|k| {
                Mat::from_fn(k, k, |i, j| self.get(i, j).clone()).det().sign()
                    == std::cmp::Ordering::Greater
            })
    }
}

/// A subspace of `S^dim` grown one vector at a time, stored in reduced
/// echelon form.
#[derive(Clone, Debug)]
pub struct Span<S> {
    dim: usize,
    rows: Vec<Vector<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Span<S> {
    pub fn new(dim: usize) -> Self {
        Span {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` modulo the span.
    pub fn reduce(&self, v: &[S]) -> Vector<S> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = v[p].clone();
            if !f.is_zero() {
                for j in 0..self.dim {
                    if !row[j].is_zero() {
                        v[j] = v[j].clone() - f.clone() * row[j].clone();
                    }
                }
                v[p] = S::zero();
            }
        }
        v
    }

    pub fn contains(&self, v: &[S]) -> bool {
        vis_zero(&self.reduce(v))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[S]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = (0..self.dim)
            .filter(|&j| !r[j].is_zero())
            .max_by(|&a, &b| r[a].magnitude().total_cmp(&r[b].magnitude()))
        else {
            return false;
        };
        let inv = S::one() / r[p].clone();
        r = r.iter().map(|x| x.clone() * inv.clone()).collect();
        r[p] = S::one();
        for row in &mut self.rows {
            let f = row[p].clone();
            if !f.is_zero() {
                for j in 0..self.dim {
                    row[j] = row[j].clone() - f.clone() * r[j].clone();
                }
                row[p] = S::zero();
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }

    /// Echelon basis of the span.
    pub fn basis(&self) -> &[Vector<S>] {
        &self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn m(rows: &[&[i64]]) -> Mat<Exact> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Exact::int(x)).collect()).collect())
    }

    #[test]
    fn inverse_det_and_kernel() {
        let a = m(&[&[2, 1], &[1, 1]]);
        assert_eq!(a.det(), Exact::int(1));
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).approx_eq(&Mat::identity(2)));
        let s = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(s.rank(), 1);
        let k = s.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(vis_zero(&s.apply(&v)));
        }
        assert!(m(&[&[1, 1], &[1, 1]]).inverse().is_none());
    }

    #[test]
    fn charpoly_of_rotation() {
        let r = m(&[&[0, -1], &[1, 0]]);
        assert_eq!(r.charpoly(), vec![Exact::int(1), Exact::int(0), Exact::int(1)]);
    }

    #[test]
    fn span_growth() {
        let mut sp = Span::<Exact>::new(3);
        assert!(sp.insert(&[Exact::int(1), Exact::int(1), Exact::int(0)]));
        assert!(!sp.insert(&[Exact::int(2), Exact::int(2), Exact::int(0)]));
        assert!(sp.insert(&[Exact::int(0), Exact::int(1), Exact::int(0)]));
        assert!(sp.contains(&[Exact::int(5), Exact::int(-3), Exact::int(0)]));
        assert!(!sp.contains(&[Exact::int(0), Exact::int(0), Exact::int(1)]));
    }

    #[test]
    fn positive_definite() {
        assert!(m(&[&[2, 1], &[1, 2]]).is_positive_definite());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_positive_definite());
    }
}
