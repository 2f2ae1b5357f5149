//! Rational inner functions: a unimodular constant times a finite Blaschke
//! product, with `z^m` represented as `m` zeros at the origin.
//!
//! Several-variable inner functions are coordinate products
//! `eta_1(z_1) ... eta_m(z_m)` of one-variable factors.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::C64;

/// Tolerance on `|c| = 1` for the unimodular constant.
pub const UNIMODULAR_TOL: f64 = 1e-12;
/// Zeros must satisfy `|a| <= 1 - ZERO_MARGIN`.
pub const ZERO_MARGIN: f64 = 1e-9;
/// Two zeros closer than this are the same point of the multiset.
pub const ZERO_MATCH_TOL: f64 = 1e-12;
/// Default squared l2 tail used to pick an effective degree for Blaschke factors.
pub const DEFAULT_TAIL_EPS: f64 = 1e-6;

fn cmp_complex(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// `c * prod_a (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerFunction1D {
    constant: C64,
    zeros: Vec<C64>,
}

/// Truncated Maclaurin series with a bound on the discarded part.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    pub coeffs: Vec<C64>,
    /// Upper bound on `sum_{k > order} |c_k|`; zero when every zero is at the origin.
    pub tail_bound: f64,
}

impl InnerFunction1D {
    pub fn new(constant: C64, mut zeros: Vec<C64>) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular {
                re: constant.re,
                im: constant.im,
            });
        }
        if let Some(a) = zeros.iter().find(|a| a.norm() > 1.0 - ZERO_MARGIN) {
            return Err(Error::ZeroOutsideDisc { re: a.re, im: a.im });
        }
        zeros.sort_by(cmp_complex);
        Ok(InnerFunction1D { constant, zeros })
    }

    pub fn one() -> Self {
        InnerFunction1D {
            constant: C64::new(1.0, 0.0),
            zeros: Vec::new(),
        }
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        InnerFunction1D {
            constant: C64::new(1.0, 0.0),
            zeros: vec![C64::new(0.0, 0.0); m],
        }
    }

    /// Single Blaschke factor `(z - a) / (1 - conj(a) z)`.
    pub fn blaschke(a: C64) -> Result<Self> {
        Self::new(C64::new(1.0, 0.0), vec![a])
    }

    pub fn constant(&self) -> C64 {
        self.constant
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_constant(&self) -> bool {
        self.zeros.is_empty()
    }

    /// True when the function is `c z^m`, so its coefficients are exact.
    pub fn is_monomial(&self) -> bool {
        self.zeros.iter().all(|a| *a == C64::new(0.0, 0.0))
    }

    pub fn max_zero_modulus(&self) -> f64 {
        self.zeros.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn multiply(&self, other: &InnerFunction1D) -> InnerFunction1D {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&other.zeros);
        zeros.sort_by(cmp_complex);
        InnerFunction1D {
            constant: self.constant * other.constant,
            zeros,
        }
    }

    /// Quotient `g / self` when it is inner, i.e. when the zero multiset of
    /// `self` is contained in that of `g`.
    pub fn divides(&self, g: &InnerFunction1D) -> Option<InnerFunction1D> {
        let mut remaining: Vec<Option<C64>> = g.zeros.iter().copied().map(Some).collect();
        for a in &self.zeros {
            let slot = remaining
                .iter_mut()
                .find(|b| b.is_some_and(|b| (b - a).norm() <= ZERO_MATCH_TOL))?;
            *slot = None;
        }
        let zeros = remaining.into_iter().flatten().collect();
        Some(InnerFunction1D {
            constant: g.constant / self.constant,
            zeros,
        })
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros.iter().fold(self.constant, |acc, a| {
            acc * (z - a) / (C64::new(1.0, 0.0) - a.conj() * z)
        })
    }

    /// Maclaurin coefficients `c_0..=c_order` with a tail bound.
    ///
    /// One factor with zero `a` has `c_0 = -a`, `c_k = conj(a)^(k-1) (1 - |a|^2)`.
    pub fn taylor_coeffs(&self, order: usize) -> TaylorSeries {
        let len = order + 1;
        let mut acc = vec![C64::new(0.0, 0.0); len];
        acc[0] = self.constant;
        let mut factor = vec![C64::new(0.0, 0.0); len];
        for a in &self.zeros {
            factor[0] = -a;
            let w = 1.0 - a.norm_sqr();
            let mut pow = C64::new(1.0, 0.0);
            for f in factor.iter_mut().skip(1) {
                *f = pow * w;
                pow *= a.conj();
            }
            acc = convolve_truncated(&acc, &factor);
        }
        TaylorSeries {
            coeffs: acc,
            tail_bound: self.tail_bound(order),
        }
    }

    /// Rigorous bound on `sum_{k > order} |c_k|` from Cauchy estimates on
    /// circles of radius `1 < r < 1/rho`:
    /// `|c_k| <= M(r) r^-k`, `M(r) <= prod (r + |a|) / (1 - |a| r)`.
    pub fn tail_bound(&self, order: usize) -> f64 {
        let rho = self.max_zero_modulus();
        if rho == 0.0 {
            return 0.0;
        }
        let r_max = 1.0 / rho;
        const GRID: usize = 400;
        let mut best = f64::INFINITY;
        for i in 1..=GRID {
            let t = i as f64 / (GRID + 1) as f64;
            let r = 1.0 + (r_max - 1.0) * t;
            let mut log_m = 0.0;
            for a in &self.zeros {
                let m = a.norm();
                log_m += (r + m).ln() - (1.0 - m * r).ln();
            }
            let log_tail = log_m - (order as f64 + 1.0) * r.ln() - (1.0 - 1.0 / r).ln();
            best = best.min(log_tail);
        }
        best.exp()
    }

    /// `1 - sum_{k <= order} |c_k|^2`: the squared l2 mass beyond `order`
    /// (an inner function has unit H^2 norm).
    pub fn l2_tail_sq(&self, order: usize) -> f64 {
        let s: f64 = self
            .taylor_coeffs(order)
            .coeffs
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        (1.0 - s).max(0.0)
    }

    /// Degree for monomials; otherwise the smallest truncation order whose
    /// squared l2 tail is at most `eps`.
    pub fn effective_degree(&self, eps: f64) -> usize {
        if self.is_monomial() {
            return self.degree();
        }
        let rho = self.max_zero_modulus();
        let mut order = self.degree().max(1);
        loop {
            if self.l2_tail_sq(order) <= eps {
                return order;
            }
            order += 1;
            if order > 100_000 || rho >= 1.0 {
                return order;
            }
        }
    }

    /// Coefficients of the polynomial `c prod (z - a)`: the numerator whose
    /// multiples of degree <= d are exactly the box polynomials in `f H^2`.
    pub fn numerator_coeffs(&self) -> Vec<C64> {
        let mut p = vec![self.constant];
        for a in &self.zeros {
            let mut next = vec![C64::new(0.0, 0.0); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * a;
            }
            p = next;
        }
        p
    }
}

impl fmt::Display for InnerFunction1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_monomial() && self.constant == C64::new(1.0, 0.0) {
            return match self.degree() {
                0 => write!(f, "1"),
                1 => write!(f, "z"),
                m => write!(f, "z^{m}"),
            };
        }
        write!(f, "({}{:+}i)B[", self.constant.re, self.constant.im)?;
        for (i, a) in self.zeros.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", a.re, a.im)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn convolve_truncated(a: &[C64], b: &[C64]) -> Vec<C64> {
    let len = a.len();
    let mut out = vec![C64::new(0.0, 0.0); len];
    for (i, ai) in a.iter().enumerate() {
        if *ai == C64::new(0.0, 0.0) {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Coordinate product `prod_i eta_i(z_i)`; factor `i` acts on variable `i`
/// of the block it is attached to.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerFunctionProd {
    factors: Vec<InnerFunction1D>,
}

impl InnerFunctionProd {
    pub fn new(factors: Vec<InnerFunction1D>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::TooFewVariables { needed: 1, got: 0 });
        }
        Ok(InnerFunctionProd { factors })
    }

    pub fn one(m: usize) -> Self {
        InnerFunctionProd {
            factors: vec![InnerFunction1D::one(); m],
        }
    }

    /// `z^k` on `k.len()` variables.
    pub fn monomial(exponents: &[usize]) -> Self {
        InnerFunctionProd {
            factors: exponents
                .iter()
                .map(|&m| InnerFunction1D::monomial(m))
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[InnerFunction1D] {
        &self.factors
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(InnerFunction1D::degree).collect()
    }

    pub fn total_degree(&self) -> usize {
        self.factors.iter().map(InnerFunction1D::degree).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.factors.iter().all(InnerFunction1D::is_constant)
    }

    pub fn is_monomial(&self) -> bool {
        self.factors.iter().all(InnerFunction1D::is_monomial)
    }

    pub fn effective_degrees(&self, eps: f64) -> Vec<usize> {
        self.factors
            .iter()
            .map(|f| f.effective_degree(eps))
            .collect()
    }

    pub fn multiply(&self, other: &InnerFunctionProd) -> Result<InnerFunctionProd> {
        if self.m() != other.m() {
            return Err(Error::LengthMismatch {
                expected: self.m(),
                got: other.m(),
            });
        }
        Ok(InnerFunctionProd {
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a.multiply(b))
                .collect(),
        })
    }

    /// Per-coordinate divisibility; `None` if any coordinate fails or the
    /// variable counts differ.
    pub fn divides(&self, g: &InnerFunctionProd) -> Option<InnerFunctionProd> {
        if self.m() != g.m() {
            return None;
        }
        let factors = self
            .factors
            .iter()
            .zip(&g.factors)
            .map(|(f, g)| f.divides(g))
            .collect::<Option<Vec<_>>>()?;
        Some(InnerFunctionProd { factors })
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        self.factors
            .iter()
            .zip(z)
            .map(|(f, &zi)| f.eval(zi))
            .product()
    }
}

impl From<InnerFunction1D> for InnerFunctionProd {
    fn from(f: InnerFunction1D) -> Self {
        InnerFunctionProd { factors: vec![f] }
    }
}

impl fmt::Display for InnerFunctionProd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Finite inner sequence with a declared direction.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerSeq {
    pub direction: Direction,
    pub terms: Vec<InnerFunctionProd>,
}

/// First consecutive pair that breaks the declared direction (1-based).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceViolation {
    pub pair: (usize, usize),
    pub reason: String,
}

impl fmt::Display for SequenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pair ({},{}): {}", self.pair.0, self.pair.1, self.reason)
    }
}

impl InnerSeq {
    pub fn new(direction: Direction, terms: Vec<InnerFunctionProd>) -> Self {
        InnerSeq { direction, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variable count shared by the terms (0 for an empty sequence).
    pub fn nvars(&self) -> usize {
        self.terms.first().map_or(0, InnerFunctionProd::m)
    }

    pub fn reversed(&self) -> InnerSeq {
        InnerSeq {
            direction: match self.direction {
                Direction::Increasing => Direction::Decreasing,
                Direction::Decreasing => Direction::Increasing,
            },
            terms: self.terms.iter().rev().cloned().collect(),
        }
    }

    /// Checks every listed consecutive pair: the ratio in the declared
    /// direction must be inner and non-constant (quotient degree >= 1).
    /// Only listed pairs are examined; the sequence is finite.
    pub fn validate(&self) -> std::result::Result<(), SequenceViolation> {
        if self.terms.is_empty() {
            return Err(SequenceViolation {
                pair: (0, 0),
                reason: "empty sequence".into(),
            });
        }
        let m = self.nvars();
        for (j, pair) in self.terms.windows(2).enumerate() {
            let pair_id = (j + 1, j + 2);
            if pair[1].m() != m {
                return Err(SequenceViolation {
                    pair: pair_id,
                    reason: format!("variable count {} differs from {m}", pair[1].m()),
                });
            }
            let (small, big) = match self.direction {
                Direction::Increasing => (&pair[0], &pair[1]),
                Direction::Decreasing => (&pair[1], &pair[0]),
            };
            match small.divides(big) {
                None => {
                    return Err(SequenceViolation {
                        pair: pair_id,
                        reason: "ratio is not inner".into(),
                    })
                }
                Some(q) if q.is_constant() => {
                    return Err(SequenceViolation {
                        pair: pair_id,
                        reason: "quotient constant".into(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()
            .map_err(|v| Error::InvalidSequence(v.to_string()))?;
        Ok(self)
    }
}
