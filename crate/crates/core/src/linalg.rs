//! Small dense square matrices over a [`Ring`].

use alloc::vec::Vec;

use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<R> {
    n: usize,
    data: Vec<R>,
}

impl<R: Ring> Mat<R> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: alloc::vec![R::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, R::one())
    }

    pub fn scalar(n: usize, c: R) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let n = rows.len();
        let data: Vec<R> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), n * n, "matrix must be square");
        Mat { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.n + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut R {
        &mut self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn add(&self, o: &Mat<R>) -> Mat<R> {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn sub(&self, o: &Mat<R>) -> Mat<R> {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn add_assign(&mut self, o: &Mat<R>) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b;
        }
    }

    pub fn scale(&self, c: &R) -> Mat<R> {
        Mat {
            n: self.n,
            data: self.data.iter().map(|a| a.clone() * c).collect(),
        }
    }

    pub fn neg(&self) -> Mat<R> {
        Mat {
            n: self.n,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn mul(&self, o: &Mat<R>) -> Mat<R> {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += &(a.clone() * &o.data[k * n + j]);
                }
            }
        }
        out
    }

    /// `acc += self * v`.
    pub fn mul_vec_into(&self, v: &[R], acc: &mut [R]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let a = &self.data[i * n + j];
                if a.is_zero() || v[j].is_zero() {
                    continue;
                }
                acc[i] += &(a.clone() * &v[j]);
            }
        }
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        let mut out = alloc::vec![R::zero(); self.n];
        self.mul_vec_into(v, &mut out);
        out
    }

    /// Gauss-Jordan inverse with pivoting by [`Ring::pivot_score`].
    pub fn inverse(&self) -> Option<Mat<R>> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (best, score) = (col..n)
                .map(|r| (r, a.get(r, col).pivot_score()))
                .fold((col, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if score <= 0.0 {
                return None;
            }
            if best != col {
                for j in 0..n {
                    a.data.swap(best * n + j, col * n + j);
                    inv.data.swap(best * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).try_inv()?;
            for j in 0..n {
                a.data[col * n + j] = a.data[col * n + j].clone() * &p;
                inv.data[col * n + j] = inv.data[col * n + j].clone() * &p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let da = a.data[col * n + j].clone() * &f;
                    a.data[r * n + j] -= &da;
                    let di = inv.data[col * n + j].clone() * &f;
                    inv.data[r * n + j] -= &di;
                }
            }
        }
        Some(inv)
    }
}
