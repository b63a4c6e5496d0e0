use core::f64::consts::PI;

use alloc::vec::Vec;
use num_complex::Complex64;

use super::{recenter_e, recenter_x, EquationSpec, Operator, SolvePath, SolveResult};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::nagumo::NagumoContext;
use crate::qcalc::ln_factorial;
use crate::ring::Ring;
use crate::series::{MatSeries1, Series1};

/// The normalizing sequence `M_n` dividing the coefficient norms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MChoice {
    /// `([n]!_{|q|})^{1/p}`
    QFactorialRoot,
    /// `|q|^{n^2/2p}`
    GaussianPower,
    /// `1`
    One,
    /// `|q|^n |q|^{n^2/2}`
    ShiftedGaussian,
}

impl MChoice {
    pub fn ln_m(self, n: usize, p: i32, q_modulus: f64) -> f64 {
        let lq = libm::log(q_modulus);
        let nf = n as f64;
        match self {
            MChoice::QFactorialRoot => ln_factorial(n as u32, q_modulus) / p.max(1) as f64,
            MChoice::GaussianPower => nf * nf / (2.0 * p.max(1) as f64) * lq,
            MChoice::One => 0.0,
            MChoice::ShiftedGaussian => (nf + nf * nf / 2.0) * lq,
        }
    }
}

/// `w_n` dominating `z_n / M_n`, with the per-index verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorantCertificate {
    pub m_choice: MChoice,
    pub path: SolvePath,
    pub c: f64,
    /// `w[k]` is `w_{k+1}`.
    pub w: Vec<f64>,
    pub z_over_m: Vec<f64>,
    pub holds: Vec<bool>,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateOptions {
    pub m_choice: MChoice,
    pub path: SolvePath,
    pub r: f64,
    pub samples: usize,
    /// Numeric value substituted for `q`.
    pub q_point: Complex64,
    pub tolerance: f64,
}

impl CertificateOptions {
    pub fn new(m_choice: MChoice, path: SolvePath, r: f64, q_point: Complex64) -> Self {
        CertificateOptions { m_choice, path, r, samples: 64, q_point, tolerance: 1e-6 }
    }
}

fn to_c<R: Ring>(v: &R, q: Complex64) -> Complex64 {
    v.scaled_at(q).to_complex()
}

fn poly_of<R: Ring>(s: &Series1<R>, c: usize, q: Complex64) -> Vec<Complex64> {
    (0..=s.order()).map(|k| to_c(s.get(k, c), q)).collect()
}

fn horner(f: &[Complex64], x: Complex64) -> Complex64 {
    f.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// How coefficient norms are measured for one step of the recursion.
enum Gauge {
    /// Sup on the circle of the given radius.
    Circle(f64),
    /// q-Nagumo norm of the given index.
    Nagumo(usize),
}

struct Measure<'a> {
    samples: usize,
    q: Complex64,
    nagumo: &'a NagumoContext,
}

impl Measure<'_> {
    fn angles(&self) -> impl Iterator<Item = Complex64> + '_ {
        let k = self.samples;
        (0..k).map(move |i| {
            let th = 2.0 * PI * i as f64 / k as f64;
            Complex64::new(libm::cos(th), libm::sin(th))
        })
    }

    fn vector<R: Ring>(&self, s: &Series1<R>, gauge: &Gauge) -> f64 {
        (0..s.dim())
            .map(|c| {
                let f = poly_of(s, c, self.q);
                match *gauge {
                    Gauge::Circle(rad) => self.angles().map(|w| horner(&f, w * rad).norm()).fold(0.0, f64::max),
                    Gauge::Nagumo(n) => self.nagumo.norm(&f, n),
                }
            })
            .fold(0.0, f64::max)
    }

    fn matrix<R: Ring>(&self, a: &MatSeries1<R>, gauge: &Gauge) -> f64 {
        let dim = a.dim();
        let polys: Vec<Vec<Vec<Complex64>>> = (0..dim)
            .map(|i| {
                (0..dim).map(|j| (0..=a.order()).map(|k| to_c(a.coeff(k).get(i, j), self.q)).collect()).collect()
            })
            .collect();
        match *gauge {
            Gauge::Circle(rad) => self
                .angles()
                .map(|w| {
                    let x = w * rad;
                    polys.iter().map(|row| row.iter().map(|f| horner(f, x).norm()).sum::<f64>()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max),
            Gauge::Nagumo(n) => self.nagumo.matrix_norm(&polys, n),
        }
    }

    /// Sup over the circle of the row-sum norm of `(lead(t))^{-1}`, inverted pointwise.
    fn inverse_bound<R: Ring>(&self, lead: &MatSeries1<R>, shift: Complex64, rad: f64) -> Result<f64> {
        let dim = lead.dim();
        let mut best = 0.0f64;
        for w in self.angles() {
            let t = w * rad;
            let mut m: Mat<Complex64> = Mat::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    let f: Vec<Complex64> = (0..=lead.order()).map(|k| to_c(lead.coeff(k).get(i, j), self.q)).collect();
                    m.set(i, j, horner(&f, t));
                }
                *m.get_mut(i, i) -= shift * t;
            }
            let inv = m.inverse().ok_or(Error::NotAUnit)?;
            let norm = (0..dim).map(|i| (0..dim).map(|j| inv.get(i, j).norm()).sum::<f64>()).fold(0.0, f64::max);
            best = best.max(norm);
        }
        Ok(best)
    }
}

/// Builds `w_n` by the majorant recursion and compares with the measured
/// `z_n / M_n` of a solved table.
///
/// The spec must have `alpha = 1`. Norms are sampled (a lower bound of the
/// analytic suprema), so the result is a consistency check.
pub fn majorant_certificate<R: Ring>(
    spec: &EquationSpec<R>,
    result: &SolveResult<R>,
    opts: &CertificateOptions,
) -> Result<MajorantCertificate> {
    if spec.alpha != 1 {
        return Err(Error::InvalidArgument(alloc::string::String::from("rank-reduce to alpha = 1 first")));
    }
    if !(opts.r > 0.0) || opts.samples == 0 {
        return Err(Error::InvalidArgument(alloc::string::String::from("need r > 0 and at least one sample")));
    }
    let qm = opts.q_point.norm();
    let nagumo = NagumoContext::with_grid(opts.r, qm, 64, opts.samples)?;
    let measure = Measure { samples: opts.samples, q: opts.q_point, nagumo: &nagumo };
    let table = &result.table;
    let (nx, ne) = (table.nx(), table.ne());
    let p = spec.p;
    let ln_m = |n: usize| opts.m_choice.ln_m(n, p, qm);

    let (prepared, slices, count) = match opts.path {
        SolvePath::XMajor => {
            if p < 0 {
                return Err(Error::Unsupported(alloc::string::String::from("p=-1 has no x-major recursion")));
            }
            let s = recenter_x(&spec.resized(nx, ne), &result.y0)?;
            let slices: Vec<Series1<R>> = (0..=nx).map(|n| table.slice_x(n)).collect::<Result<_>>()?;
            (s, slices, nx)
        }
        SolvePath::EMajor => {
            let s = recenter_e(&spec.resized(nx, ne), &result.u0)?;
            let slices: Vec<Series1<R>> = (0..=ne).map(|m| table.slice_e(m)).collect::<Result<_>>()?;
            (s, slices, ne)
        }
    };
    if count == 0 {
        return Err(Error::InvalidArgument(alloc::string::String::from("window has no slices beyond the initial one")));
    }
    let f = &prepared.f;
    let (bs, as_, terms): (Vec<Series1<R>>, Vec<MatSeries1<R>>, Vec<(u32, Vec<Series1<R>>)>) = match opts.path {
        SolvePath::XMajor => (
            (0..=count.min(f.b.nx())).map(|n| f.b.slice_x(n)).collect::<Result<_>>()?,
            (0..=count.min(f.a.nx())).map(|n| f.a.slice_x(n)).collect(),
            f.nonlinear
                .iter()
                .map(|t| {
                    let deg = t.index.iter().sum();
                    Ok((deg, (0..=count.min(t.coeff.nx())).map(|n| t.coeff.slice_x(n)).collect::<Result<_>>()?))
                })
                .collect::<Result<_>>()?,
        ),
        SolvePath::EMajor => (
            (0..=count).map(|m| f.b.slice_e(m)).collect::<Result<_>>()?,
            (0..=count).map(|m| f.a.slice_e(m)).collect(),
            f.nonlinear
                .iter()
                .map(|t| {
                    let deg = t.index.iter().sum();
                    Ok((deg, (0..=count).map(|m| t.coeff.slice_e(m)).collect::<Result<_>>()?))
                })
                .collect::<Result<_>>()?,
        ),
    };

    let lambda_modulus = |n: usize| -> f64 {
        match prepared.operator {
            Operator::Dq => crate::qcalc::bracket::<Complex64>(n as u32, &opts.q_point).norm(),
            Operator::SigmaQ => libm::pow(qm, n as f64),
        }
    };
    let gauge = |step: usize, index: usize| -> Gauge {
        match opts.path {
            SolvePath::XMajor if p == 0 => Gauge::Circle(opts.r / lambda_modulus(step)),
            SolvePath::XMajor => Gauge::Circle(opts.r),
            SolvePath::EMajor => Gauge::Nagumo(index),
        }
    };
    let lead_bound = |step: usize| -> Result<f64> {
        match opts.path {
            SolvePath::XMajor if p == 0 => {
                let lam = match prepared.operator {
                    Operator::Dq => crate::qcalc::bracket::<Complex64>(step as u32, &opts.q_point),
                    Operator::SigmaQ => opts.q_point.powu(step as u32),
                };
                measure.inverse_bound(&as_[0], lam, opts.r / lambda_modulus(step))
            }
            _ => measure.inverse_bound(&as_[0], Complex64::new(0.0, 0.0), opts.r),
        }
    };
    let fixed_c = if opts.path == SolvePath::XMajor && p == 0 { None } else { Some(lead_bound(1)?) };

    let mut w: Vec<f64> = alloc::vec![0.0; count + 1];
    let mut z_over_m: Vec<f64> = alloc::vec![0.0; count + 1];
    let mut c_max = fixed_c.unwrap_or(0.0);
    for n in 1..=count {
        let g = gauge(n, n);
        let z = measure.vector(&slices[n], &g);
        z_over_m[n] = libm::exp(libm::log(z) - ln_m(n));
        if n == 1 {
            w[1] = z;
            continue;
        }
        let c = match fixed_c {
            Some(c) => c,
            None => {
                let c = lead_bound(n)?;
                c_max = c_max.max(c);
                c
            }
        };
        let mut acc = 0.0;
        if n < bs.len() {
            acc += libm::exp(libm::log(measure.vector(&bs[n], &g)) - ln_m(n));
        }
        acc += match (opts.path, prepared.operator) {
            (SolvePath::XMajor, _) if p > 0 && n > p as usize => opts.r * w[n - p as usize],
            (SolvePath::XMajor, _) => 0.0,
            (SolvePath::EMajor, _) if p == -1 => 2.0 * w[n - 1],
            (SolvePath::EMajor, Operator::Dq) => 2.0 * libm::pow(opts.r, (p + 1) as f64) * w[n - 1],
            (SolvePath::EMajor, Operator::SigmaQ) => libm::pow(opts.r, (p + 1) as f64) * w[n - 1],
        };
        for j in 1..n {
            if n - j < as_.len() {
                let alpha = measure.matrix(&as_[n - j], &gauge(n, n - j));
                acc += libm::exp(libm::log(alpha) - ln_m(n - j)) * w[j];
            }
        }
        for (deg, coeffs) in &terms {
            // [tau^n] A~_I(tau) W(tau)^deg with W = sum_{j<n} w_j tau^j
            let mut power = alloc::vec![0.0; n + 1];
            power[0] = 1.0;
            for _ in 0..*deg {
                let mut next = alloc::vec![0.0; n + 1];
                for (i, &a) in power.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    for j in 1..n {
                        if i + j <= n {
                            next[i + j] += a * w[j];
                        }
                    }
                }
                power = next;
            }
            for m in 0..=n {
                if m < coeffs.len() && power[n - m] != 0.0 {
                    let gamma = measure.vector(&coeffs[m], &gauge(n, m));
                    acc += libm::exp(libm::log(gamma) - ln_m(m)) * power[n - m];
                }
            }
        }
        w[n] = c * acc;
    }
    let holds: Vec<bool> = (1..=count).map(|n| z_over_m[n] <= w[n] * (1.0 + opts.tolerance)).collect();
    Ok(MajorantCertificate {
        m_choice: opts.m_choice,
        path: opts.path,
        c: c_max,
        valid: holds.iter().all(|&h| h),
        w: w[1..].to_vec(),
        z_over_m: z_over_m[1..].to_vec(),
        holds,
    })
}
