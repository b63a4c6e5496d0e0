//! Truncated univariate and bivariate power series with vector or matrix
//! coefficients.
//!
//! Binary operations return a result truncated at the smaller of the two
//! operand orders, so every coefficient that is kept is correct.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::ring::Ring;

/// `sum_{k=0}^{order} c_k t^k` with `c_k` in `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series1<R> {
    dim: usize,
    order: usize,
    coeffs: Vec<R>,
}

impl<R: Ring> Series1<R> {
    pub fn zeros(dim: usize, order: usize) -> Self {
        Series1 { dim, order, coeffs: alloc::vec![R::zero(); (order + 1) * dim] }
    }

    pub fn from_scalars(c: Vec<R>) -> Self {
        assert!(!c.is_empty(), "a series needs at least one coefficient");
        Series1 { dim: 1, order: c.len() - 1, coeffs: c }
    }

    pub fn from_vectors(dim: usize, c: Vec<Vec<R>>) -> Self {
        assert!(!c.is_empty(), "a series needs at least one coefficient");
        let order = c.len() - 1;
        let coeffs: Vec<R> = c.into_iter().flatten().collect();
        assert_eq!(coeffs.len(), (order + 1) * dim);
        Series1 { dim, order, coeffs }
    }

    pub fn from_fn(dim: usize, order: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut coeffs = Vec::with_capacity((order + 1) * dim);
        for k in 0..=order {
            for c in 0..dim {
                coeffs.push(f(k, c));
            }
        }
        Series1 { dim, order, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> &[R] {
        &self.coeffs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut [R] {
        &mut self.coeffs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn get(&self, k: usize, c: usize) -> &R {
        &self.coeffs[k * self.dim + c]
    }

    pub fn set(&mut self, k: usize, c: usize, v: R) {
        self.coeffs[k * self.dim + c] = v;
    }

    pub fn resized(&self, order: usize) -> Self {
        Series1::from_fn(self.dim, order, |k, c| {
            if k <= self.order {
                self.get(k, c).clone()
            } else {
                R::zero()
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_zero())
    }

    /// Index of the first coefficient that is not negligible.
    pub fn valuation(&self, scale: f64) -> Option<usize> {
        (0..=self.order).find(|&k| self.coeff(k).iter().any(|x| !x.is_negligible(scale)))
    }

    fn zip_with(&self, o: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        let order = self.order.min(o.order);
        let len = (order + 1) * self.dim;
        Series1 {
            dim: self.dim,
            order,
            coeffs: self.coeffs[..len].iter().zip(&o.coeffs[..len]).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a.clone() + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a.clone() - b)
    }

    pub fn neg(&self) -> Self {
        Series1 { dim: self.dim, order: self.order, coeffs: self.coeffs.iter().map(|a| -a.clone()).collect() }
    }

    /// In-place `self += o`, truncating to the smaller order.
    pub fn add_assign(&mut self, o: &Self) {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        if o.order < self.order {
            self.order = o.order;
            self.coeffs.truncate((o.order + 1) * self.dim);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, o: &Self) {
        self.add_assign(&o.neg());
    }

    pub fn scale(&self, s: &R) -> Self {
        Series1 { dim: self.dim, order: self.order, coeffs: self.coeffs.iter().map(|a| a.clone() * s).collect() }
    }

    /// Cauchy product of a scalar series `self` with a vector series `g`.
    pub fn mul_scalar(&self, g: &Self) -> Self {
        assert_eq!(self.dim, 1, "left factor must be scalar");
        let order = self.order.min(g.order);
        let mut out = Series1::zeros(g.dim, order);
        for i in 0..=order {
            let a = &self.coeffs[i];
            if a.is_zero() {
                continue;
            }
            for j in 0..=order - i {
                for c in 0..g.dim {
                    let b = g.get(j, c);
                    if !b.is_zero() {
                        out.coeffs[(i + j) * g.dim + c] += &(a.clone() * b);
                    }
                }
            }
        }
        out
    }

    /// Multiplies by `t^s`, keeping the order.
    pub fn shift_up(&self, s: usize) -> Self {
        Series1::from_fn(self.dim, self.order, |k, c| if k >= s { self.get(k - s, c).clone() } else { R::zero() })
    }

    pub fn component(&self, c: usize) -> Self {
        Series1::from_fn(1, self.order, |k, _| self.get(k, c).clone())
    }

    pub fn from_components(parts: &[Series1<R>]) -> Self {
        let order = parts.iter().map(|p| p.order).min().unwrap_or(0);
        Series1::from_fn(parts.len(), order, |k, c| parts[c].get(k, 0).clone())
    }

    /// Jackson derivative `t^k -> [k]_q t^{k-1}`.
    pub fn dq(&self, q: &R) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::OrderExhausted);
        }
        let mut bracket = R::one();
        let mut qk = R::one();
        let mut out = Series1::zeros(self.dim, self.order - 1);
        for k in 1..=self.order {
            for c in 0..self.dim {
                out.coeffs[(k - 1) * self.dim + c] = self.get(k, c).clone() * &bracket;
            }
            qk = qk * q;
            bracket += &qk;
        }
        Ok(out)
    }

    /// Dilation `t^k -> q^k t^k`.
    pub fn sigmaq(&self, q: &R) -> Self {
        let mut qk = R::one();
        let mut out = self.clone();
        for k in 0..=self.order {
            for c in 0..self.dim {
                out.coeffs[k * self.dim + c] = self.get(k, c).clone() * &qk;
            }
            qk = qk * q;
        }
        out
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }
}

/// `sum_{k=0}^{order} A_k t^k` with square matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatSeries1<R> {
    dim: usize,
    coeffs: Vec<Mat<R>>,
}

impl<R: Ring> MatSeries1<R> {
    pub fn zeros(dim: usize, order: usize) -> Self {
        MatSeries1 { dim, coeffs: alloc::vec![Mat::zeros(dim); order + 1] }
    }

    pub fn from_mats(dim: usize, coeffs: Vec<Mat<R>>) -> Self {
        assert!(!coeffs.is_empty());
        MatSeries1 { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Mat<R> {
        &self.coeffs[k]
    }

    pub fn coeff_mut(&mut self, k: usize) -> &mut Mat<R> {
        &mut self.coeffs[k]
    }

    pub fn resized(&self, order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|k| self.coeffs.get(k).cloned().unwrap_or_else(|| Mat::zeros(self.dim)))
            .collect();
        MatSeries1 { dim: self.dim, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|m| m.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let order = self.order().min(o.order());
        MatSeries1 { dim: self.dim, coeffs: (0..=order).map(|k| self.coeffs[k].add(&o.coeffs[k])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let order = self.order().min(o.order());
        MatSeries1 { dim: self.dim, coeffs: (0..=order).map(|k| self.coeffs[k].sub(&o.coeffs[k])).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order().min(o.order());
        let mut out = Self::zeros(self.dim, order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                let p = self.coeffs[i].mul(&o.coeffs[j]);
                out.coeffs[i + j].add_assign(&p);
            }
        }
        out
    }

    /// Accumulates `self * v` into `acc`, truncated at `acc`'s order.
    pub fn mul_vec_into(&self, v: &Series1<R>, acc: &mut Series1<R>) {
        let order = acc.order().min(self.order()).min(v.order());
        if acc.order() > order {
            *acc = acc.resized(order);
        }
        for i in 0..=order {
            let m = &self.coeffs[i];
            if m.is_zero() {
                continue;
            }
            for j in 0..=order - i {
                let src = v.coeff(j);
                if src.iter().all(|x| x.is_zero()) {
                    continue;
                }
                m.mul_vec_into(src, acc.coeff_mut(i + j));
            }
        }
    }

    pub fn mul_vec(&self, v: &Series1<R>) -> Series1<R> {
        let mut acc = Series1::zeros(self.dim, self.order().min(v.order()));
        self.mul_vec_into(v, &mut acc);
        acc
    }

    /// Formal inverse; the constant term must be invertible.
    pub fn inverse(&self) -> Result<Self> {
        let lead = self.coeffs[0].inverse().ok_or(Error::NotAUnit)?;
        let order = self.order();
        let mut g: Vec<Mat<R>> = Vec::with_capacity(order + 1);
        g.push(lead.clone());
        for k in 1..=order {
            let mut s = Mat::zeros(self.dim);
            for i in 1..=k {
                if !self.coeffs[i].is_zero() {
                    s.add_assign(&self.coeffs[i].mul(&g[k - i]));
                }
            }
            g.push(lead.mul(&s).neg());
        }
        Ok(MatSeries1 { dim: self.dim, coeffs: g })
    }

    /// Solves `self * x = rhs` as a truncated series.
    pub fn solve(&self, rhs: &Series1<R>) -> Result<Series1<R>> {
        let lead = self.coeffs[0].inverse().ok_or(Error::NotAUnit)?;
        let order = self.order().min(rhs.order());
        let mut x = Series1::zeros(self.dim, order);
        for k in 0..=order {
            let mut r = rhs.coeff(k).to_vec();
            for i in 1..=k {
                let neg: Vec<R> = self.coeffs[i].mul_vec(x.coeff(k - i));
                for (a, b) in r.iter_mut().zip(&neg) {
                    *a -= b;
                }
            }
            let xk = lead.mul_vec(&r);
            x.coeff_mut(k).clone_from_slice(&xk);
        }
        Ok(x)
    }
}

/// Dense truncated bivariate series `sum a[n][m] x^n eps^m`, `a[n][m]` in `R^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series2<R> {
    nx: usize,
    ne: usize,
    dim: usize,
    data: Vec<R>,
}

impl<R: Ring> Series2<R> {
    pub fn zeros(dim: usize, nx: usize, ne: usize) -> Self {
        Series2 { nx, ne, dim, data: alloc::vec![R::zero(); (nx + 1) * (ne + 1) * dim] }
    }

    pub fn from_fn(dim: usize, nx: usize, ne: usize, mut f: impl FnMut(usize, usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity((nx + 1) * (ne + 1) * dim);
        for n in 0..=nx {
            for m in 0..=ne {
                for c in 0..dim {
                    data.push(f(n, m, c));
                }
            }
        }
        Series2 { nx, ne, dim, data }
    }

    /// The scalar monomial `c x^n eps^m`.
    pub fn monomial(nx: usize, ne: usize, n: usize, m: usize, c: R) -> Self {
        let mut s = Self::zeros(1, nx, ne);
        if n <= nx && m <= ne {
            s.set(n, m, 0, c);
        }
        s
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ne(&self) -> usize {
        self.ne
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, n: usize, m: usize) -> usize {
        (n * (self.ne + 1) + m) * self.dim
    }

    pub fn get(&self, n: usize, m: usize) -> &[R] {
        let i = self.idx(n, m);
        &self.data[i..i + self.dim]
    }

    pub fn get_mut(&mut self, n: usize, m: usize) -> &mut [R] {
        let i = self.idx(n, m);
        &mut self.data[i..i + self.dim]
    }

    pub fn at(&self, n: usize, m: usize, c: usize) -> &R {
        &self.data[self.idx(n, m) + c]
    }

    pub fn set(&mut self, n: usize, m: usize, c: usize, v: R) {
        let i = self.idx(n, m) + c;
        self.data[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Zero-pads or crops to the given orders.
    pub fn resized(&self, nx: usize, ne: usize) -> Self {
        Series2::from_fn(self.dim, nx, ne, |n, m, c| {
            if n <= self.nx && m <= self.ne {
                self.at(n, m, c).clone()
            } else {
                R::zero()
            }
        })
    }

    fn check_dim(&self, o: &Self) -> Result<()> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: o.dim });
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let (nx, ne) = (self.nx.min(o.nx), self.ne.min(o.ne));
        Ok(Series2::from_fn(self.dim, nx, ne, |n, m, c| self.at(n, m, c).clone() + o.at(n, m, c)))
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_dim(o)?;
        let (nx, ne) = (self.nx.min(o.nx), self.ne.min(o.ne));
        Ok(Series2::from_fn(self.dim, nx, ne, |n, m, c| self.at(n, m, c).clone() - o.at(n, m, c)))
    }

    pub fn neg(&self) -> Self {
        Series2 { nx: self.nx, ne: self.ne, dim: self.dim, data: self.data.iter().map(|a| -a.clone()).collect() }
    }

    pub fn scale(&self, s: &R) -> Self {
        Series2 { nx: self.nx, ne: self.ne, dim: self.dim, data: self.data.iter().map(|a| a.clone() * s).collect() }
    }

    /// In-place `self += o` on the overlap of the two windows.
    pub fn add_assign_overlap(&mut self, o: &Self) {
        assert_eq!(self.dim, o.dim, "dimension mismatch");
        for n in 0..=self.nx.min(o.nx) {
            for m in 0..=self.ne.min(o.ne) {
                let src = o.get(n, m);
                for (a, b) in self.get_mut(n, m).iter_mut().zip(src) {
                    *a += b;
                }
            }
        }
    }

    /// Multiplies by `x^sx eps^se`, keeping the orders.
    pub fn shifted(&self, sx: usize, se: usize) -> Self {
        Series2::from_fn(self.dim, self.nx, self.ne, |n, m, c| {
            if n >= sx && m >= se {
                self.at(n - sx, m - se, c).clone()
            } else {
                R::zero()
            }
        })
    }

    pub fn component(&self, c: usize) -> Self {
        Series2::from_fn(1, self.nx, self.ne, |n, m, _| self.at(n, m, c).clone())
    }

    pub fn from_components(parts: &[Series2<R>]) -> Self {
        let nx = parts.iter().map(|p| p.nx).min().unwrap_or(0);
        let ne = parts.iter().map(|p| p.ne).min().unwrap_or(0);
        Series2::from_fn(parts.len(), nx, ne, |n, m, c| parts[c].at(n, m, 0).clone())
    }

    /// `y_n(eps)`, the coefficient of `x^n` as a series in `eps`.
    pub fn slice_x(&self, n: usize) -> Result<Series1<R>> {
        if n > self.nx {
            return Err(Error::IndexOutOfRange { index: n, max: self.nx });
        }
        Ok(Series1::from_fn(self.dim, self.ne, |m, c| self.at(n, m, c).clone()))
    }

    /// `u_m(x)`, the coefficient of `eps^m` as a series in `x`.
    pub fn slice_e(&self, m: usize) -> Result<Series1<R>> {
        if m > self.ne {
            return Err(Error::IndexOutOfRange { index: m, max: self.ne });
        }
        Ok(Series1::from_fn(self.dim, self.nx, |n, c| self.at(n, m, c).clone()))
    }

    /// Assembles a table from x-major slices; missing coefficients are zero.
    pub fn from_x_slices(dim: usize, ne: usize, slices: &[Series1<R>]) -> Self {
        let nx = slices.len() - 1;
        Series2::from_fn(dim, nx, ne, |n, m, c| {
            if m <= slices[n].order() {
                slices[n].get(m, c).clone()
            } else {
                R::zero()
            }
        })
    }

    pub fn from_e_slices(dim: usize, nx: usize, slices: &[Series1<R>]) -> Self {
        let ne = slices.len() - 1;
        Series2::from_fn(dim, nx, ne, |n, m, c| {
            if n <= slices[m].order() {
                slices[m].get(n, c).clone()
            } else {
                R::zero()
            }
        })
    }

    /// Truncated double Cauchy product of a scalar series with `g`.
    pub fn mul(&self, g: &Self) -> Result<Self> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.dim });
        }
        let (nx, ne) = (self.nx.min(g.nx), self.ne.min(g.ne));
        let mut out = Series2::zeros(g.dim, nx, ne);
        for i in 0..=nx {
            for j in 0..=ne {
                let a = self.at(i, j, 0);
                if a.is_zero() {
                    continue;
                }
                for n in i..=nx {
                    for m in j..=ne {
                        let src = g.get(n - i, m - j);
                        let base = out.idx(n, m);
                        for (c, b) in src.iter().enumerate() {
                            if !b.is_zero() {
                                out.data[base + c] += &(a.clone() * b);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Series2::monomial(self.nx, self.ne, 0, 0, R::one());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Formal reciprocal of a scalar series with invertible constant term.
    pub fn invert_unit(&self) -> Result<Self> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: self.dim });
        }
        let lead = self.at(0, 0, 0).try_inv().ok_or(Error::NotAUnit)?;
        let mut g = Series2::zeros(1, self.nx, self.ne);
        for n in 0..=self.nx {
            for m in 0..=self.ne {
                if n == 0 && m == 0 {
                    g.set(0, 0, 0, lead.clone());
                    continue;
                }
                let mut s = R::zero();
                for i in 0..=n {
                    for j in 0..=m {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        let a = self.at(i, j, 0);
                        if !a.is_zero() {
                            s += &(a.clone() * g.at(n - i, m - j, 0));
                        }
                    }
                }
                g.set(n, m, 0, -(s * &lead));
            }
        }
        Ok(g)
    }

    /// Jackson derivative in `x`; drops `nx` by one.
    pub fn dq_x(&self, q: &R) -> Result<Self> {
        if self.nx == 0 {
            return Err(Error::OrderExhausted);
        }
        let brackets = brackets_upto(q, self.nx);
        Ok(Series2::from_fn(self.dim, self.nx - 1, self.ne, |n, m, c| {
            self.at(n + 1, m, c).clone() * &brackets[n + 1]
        }))
    }

    /// Dilation `x -> qx`.
    pub fn sigmaq_x(&self, q: &R) -> Self {
        let mut powers = Vec::with_capacity(self.nx + 1);
        let mut p = R::one();
        for _ in 0..=self.nx {
            powers.push(p.clone());
            p = p * q;
        }
        Series2::from_fn(self.dim, self.nx, self.ne, |n, m, c| self.at(n, m, c).clone() * &powers[n])
    }

    pub fn data(&self) -> &[R] {
        &self.data
    }
}

/// `[0]_q, [1]_q, ..., [n]_q`.
pub(crate) fn brackets_upto<R: Ring>(q: &R, n: usize) -> Vec<R> {
    let mut out = Vec::with_capacity(n + 1);
    let mut b = R::zero();
    let mut qk = R::one();
    out.push(b.clone());
    for _ in 1..=n {
        b += &qk;
        qk = qk * q;
        out.push(b.clone());
    }
    out
}

/// Dense truncated bivariate series with square matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSeries2<R> {
    nx: usize,
    ne: usize,
    dim: usize,
    data: Vec<Mat<R>>,
}

impl<R: Ring> MatrixSeries2<R> {
    pub fn zeros(dim: usize, nx: usize, ne: usize) -> Self {
        MatrixSeries2 { nx, ne, dim, data: alloc::vec![Mat::zeros(dim); (nx + 1) * (ne + 1)] }
    }

    /// The constant matrix `c`.
    pub fn constant(c: Mat<R>, nx: usize, ne: usize) -> Self {
        let mut s = Self::zeros(c.dim(), nx, ne);
        s.data[0] = c;
        s
    }

    pub fn from_fn(dim: usize, nx: usize, ne: usize, mut f: impl FnMut(usize, usize) -> Mat<R>) -> Self {
        let mut data = Vec::with_capacity((nx + 1) * (ne + 1));
        for n in 0..=nx {
            for m in 0..=ne {
                data.push(f(n, m));
            }
        }
        MatrixSeries2 { nx, ne, dim, data }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ne(&self) -> usize {
        self.ne
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, m: usize) -> &Mat<R> {
        &self.data[n * (self.ne + 1) + m]
    }

    pub fn get_mut(&mut self, n: usize, m: usize) -> &mut Mat<R> {
        &mut self.data[n * (self.ne + 1) + m]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|m| m.is_zero())
    }

    pub fn resized(&self, nx: usize, ne: usize) -> Self {
        MatrixSeries2::from_fn(self.dim, nx, ne, |n, m| {
            if n <= self.nx && m <= self.ne {
                self.get(n, m).clone()
            } else {
                Mat::zeros(self.dim)
            }
        })
    }

    /// `A_{n*}(eps)`.
    pub fn slice_x(&self, n: usize) -> MatSeries1<R> {
        MatSeries1::from_mats(self.dim, (0..=self.ne).map(|m| self.get(n, m).clone()).collect())
    }

    /// `A_{*m}(x)`.
    pub fn slice_e(&self, m: usize) -> MatSeries1<R> {
        MatSeries1::from_mats(self.dim, (0..=self.nx).map(|n| self.get(n, m).clone()).collect())
    }

    pub fn mul_vec(&self, y: &Series2<R>) -> Result<Series2<R>> {
        if y.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: y.dim() });
        }
        let (nx, ne) = (self.nx.min(y.nx()), self.ne.min(y.ne()));
        let mut out = Series2::zeros(self.dim, nx, ne);
        for i in 0..=nx {
            for j in 0..=ne {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for n in i..=nx {
                    for m in j..=ne {
                        let src = y.get(n - i, m - j);
                        a.mul_vec_into(src, out.get_mut(n, m));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Formal inverse by undetermined coefficients.
    pub fn invert_unit(&self) -> Result<Self> {
        let lead = self.get(0, 0).inverse().ok_or(Error::NotAUnit)?;
        let mut g = MatrixSeries2::zeros(self.dim, self.nx, self.ne);
        for n in 0..=self.nx {
            for m in 0..=self.ne {
                if n == 0 && m == 0 {
                    *g.get_mut(0, 0) = lead.clone();
                    continue;
                }
                let mut s = Mat::zeros(self.dim);
                for i in 0..=n {
                    for j in 0..=m {
                        if (i, j) == (0, 0) || self.get(i, j).is_zero() {
                            continue;
                        }
                        s.add_assign(&self.get(i, j).mul(g.get(n - i, m - j)));
                    }
                }
                *g.get_mut(n, m) = lead.mul(&s).neg();
            }
        }
        Ok(g)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (nx, ne) = (self.nx.min(o.nx), self.ne.min(o.ne));
        let mut out = MatrixSeries2::zeros(self.dim, nx, ne);
        for i in 0..=nx {
            for j in 0..=ne {
                if self.get(i, j).is_zero() {
                    continue;
                }
                for n in i..=nx {
                    for m in j..=ne {
                        let p = self.get(i, j).mul(o.get(n - i, m - j));
                        out.get_mut(n, m).add_assign(&p);
                    }
                }
            }
        }
        out
    }
}

/// One nonlinear term `A_I(x, eps) y^I` with `|I| >= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearTerm<R> {
    pub index: Vec<u32>,
    pub coeff: Series2<R>,
}

/// Polynomial data of `F = b + A y + sum_I A_I y^I`.
#[derive(Clone, Debug, PartialEq)]
pub struct FData<R> {
    pub b: Series2<R>,
    pub a: MatrixSeries2<R>,
    pub nonlinear: Vec<NonlinearTerm<R>>,
}

impl<R: Ring> FData<R> {
    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn resized(&self, nx: usize, ne: usize) -> Self {
        FData {
            b: self.b.resized(nx, ne),
            a: self.a.resized(nx, ne),
            nonlinear: self
                .nonlinear
                .iter()
                .map(|t| NonlinearTerm { index: t.index.clone(), coeff: t.coeff.resized(nx, ne) })
                .collect(),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.nonlinear.iter().all(|t| t.coeff.is_zero())
    }
}

/// `y^I` for a vector series `y`, via cached component powers.
pub(crate) fn monomial_power<R: Ring>(
    powers: &mut Vec<Vec<Series2<R>>>,
    y: &Series2<R>,
    index: &[u32],
) -> Result<Series2<R>> {
    let mut acc = Series2::monomial(y.nx(), y.ne(), 0, 0, R::one());
    for (l, &k) in index.iter().enumerate() {
        if k == 0 {
            continue;
        }
        while powers[l].len() <= k as usize {
            let next = match powers[l].last() {
                Some(last) => last.mul(&y.component(l))?,
                None => Series2::monomial(y.nx(), y.ne(), 0, 0, R::one()),
            };
            powers[l].push(next);
        }
        acc = acc.mul(&powers[l][k as usize])?;
    }
    Ok(acc)
}

/// Evaluates `F(x, eps, y)` on truncated data.
pub fn substitute_y<R: Ring>(f: &FData<R>, y: &Series2<R>) -> Result<Series2<R>> {
    if y.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: y.dim() });
    }
    if y.get(0, 0).iter().any(|c| !c.is_zero()) {
        return Err(Error::InvalidArgument(alloc::string::String::from(
            "substituted series must have zero constant term",
        )));
    }
    let mut out = f.b.add(&f.a.mul_vec(y)?)?;
    let mut powers = alloc::vec![Vec::new(); y.dim()];
    for term in &f.nonlinear {
        let p = monomial_power(&mut powers, y, &term.index)?;
        out = out.add(&p.mul(&term.coeff)?)?;
    }
    Ok(out)
}
