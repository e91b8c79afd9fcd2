//! Real-coordinate expansion of conjugate-flattening polynomials and the
//! interval arithmetic used by the branch-and-bound checker.
//!
//! Substituting `z_j = x_j + i·y_j` into a conjugate-flattening polynomial
//! makes every imaginary contribution cancel; the result is an ordinary real
//! polynomial in `2N` variables, usable for fast point evaluation, interval
//! bounds and SMT-LIB export.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cpoly::CPolynomial;
use crate::C64;

#[derive(Debug, Error)]
pub enum RealExpandError {
    #[error("imaginary residue {0:.3e} survives real expansion; input is not conjugate-flattening")]
    ImaginaryResidue(f64),
}

/// Closed interval with outward widening after every operation, so that
/// floating-point rounding cannot shrink the enclosure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Relative outward-rounding padding applied per arithmetic operation.
pub const DEFAULT_OUTWARD_EPS: f64 = 1e-12;

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn widen(self, eps: f64) -> Self {
        let scale = self.lo.abs().max(self.hi.abs()).max(1.0);
        Self {
            lo: self.lo - eps * scale,
            hi: self.hi + eps * scale,
        }
    }

    pub fn add(self, other: Self, eps: f64) -> Self {
        Self::new(self.lo + other.lo, self.hi + other.hi).widen(eps)
    }

    pub fn mul(self, other: Self, eps: f64) -> Self {
        let candidates = [
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        ];
        let lo = candidates.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo, hi).widen(eps)
    }

    pub fn scale(self, c: f64, eps: f64) -> Self {
        let (lo, hi) = if c >= 0.0 {
            (self.lo * c, self.hi * c)
        } else {
            (self.hi * c, self.lo * c)
        };
        Self::new(lo, hi).widen(eps)
    }

    /// Integer power with the even-power tightening at zero.
    pub fn pow(self, e: u32, eps: f64) -> Self {
        match e {
            0 => Self::point(1.0),
            1 => self,
            _ => {
                if e % 2 == 0 && self.lo < 0.0 && self.hi > 0.0 {
                    let m = self.lo.abs().max(self.hi.abs());
                    let mut acc = Self::new(0.0, m.powi(e as i32));
                    acc = acc.widen(eps);
                    acc
                } else {
                    let mut acc = self;
                    for _ in 1..e {
                        acc = acc.mul(self, eps);
                    }
                    acc
                }
            }
        }
    }
}

/// Sparse real polynomial over `2N` variables ordered `x_0..x_{N-1},
/// y_0..y_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl RealPoly {
    /// Expands a conjugate-flattening polynomial into real coordinates.
    /// Fails if an imaginary residue above 1e−10 survives.
    pub fn from_cpoly(p: &CPolynomial) -> Result<Self, RealExpandError> {
        let n = p.dimension();
        let nvars = 2 * n;
        let mut acc: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (key, coeff) in p.terms() {
            // Multiply out Π (x_j + i y_j)^{α_j} (x_j − i y_j)^{β_j}.
            let mut partial: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
            partial.insert(vec![0; nvars], *coeff);
            for (j, &e) in key.alpha().iter().enumerate() {
                for _ in 0..e {
                    partial = mul_linear(&partial, j, n, C64::new(0.0, 1.0));
                }
            }
            for (j, &e) in key.beta().iter().enumerate() {
                for _ in 0..e {
                    partial = mul_linear(&partial, j, n, C64::new(0.0, -1.0));
                }
            }
            for (mono, c) in partial {
                let slot = acc.entry(mono).or_insert(C64::new(0.0, 0.0));
                *slot += c;
            }
        }
        let mut terms = BTreeMap::new();
        let mut max_imag: f64 = 0.0;
        for (mono, c) in acc {
            max_imag = max_imag.max(c.im.abs());
            if c.re.abs() >= 1e-14 {
                terms.insert(mono, c.re);
            }
        }
        if max_imag > 1e-10 {
            return Err(RealExpandError::ImaginaryResidue(max_imag));
        }
        Ok(Self { nvars, terms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.nvars);
        let mut acc = 0.0;
        for (mono, c) in &self.terms {
            let mut m = *c;
            for (j, &e) in mono.iter().enumerate() {
                for _ in 0..e {
                    m *= v[j];
                }
            }
            acc += m;
        }
        acc
    }

    /// Interval enclosure over a box, with outward rounding per operation.
    pub fn eval_interval(&self, bx: &[Interval], eps: f64) -> Interval {
        debug_assert_eq!(bx.len(), self.nvars);
        let mut acc = Interval::point(0.0);
        for (mono, c) in &self.terms {
            let mut m = Interval::point(1.0);
            for (j, &e) in mono.iter().enumerate() {
                if e > 0 {
                    m = m.mul(bx[j].pow(e, eps), eps);
                }
            }
            acc = acc.add(m.scale(*c, eps), eps);
        }
        acc
    }
}

fn mul_linear(
    poly: &BTreeMap<Vec<u32>, C64>,
    var: usize,
    n: usize,
    y_coeff: C64,
) -> BTreeMap<Vec<u32>, C64> {
    let mut out: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
    for (mono, c) in poly {
        let mut mx = mono.clone();
        mx[var] += 1;
        let slot = out.entry(mx).or_insert(C64::new(0.0, 0.0));
        *slot += c;
        let mut my = mono.clone();
        my[n + var] += 1;
        let slot = out.entry(my).or_insert(C64::new(0.0, 0.0));
        *slot += c * y_coeff;
    }
    out
}
