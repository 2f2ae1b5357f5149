//! Box-truncated model of the Hardy space over the polydisc.
//!
//! A [`BoxTruncation`] with caps `d = (d_1, ..., d_n)` keeps the monomials
//! `z^k` with `0 <= k_i <= d_i`. Basis positions are colexicographic with
//! variable 1 varying fastest:
//!
//! ```text
//! position(k) = k_1 + (d_1 + 1) * (k_2 + (d_2 + 1) * (k_3 + ...))
//! ```
//!
//! Every serialization in the workspace uses this order. Variable slots are
//! zero-based in code (slot 0 is `z_1`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Exponent tuple `k = (k_1, ..., k_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// Per-variable degree caps defining the finite monomial basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxTruncation {
    caps: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl BoxTruncation {
    pub fn new(caps: Vec<usize>) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::TooFewVariables { needed: 1, got: 0 });
        }
        let mut strides = Vec::with_capacity(caps.len());
        let mut dim = 1usize;
        for &d in &caps {
            strides.push(dim);
            dim *= d + 1;
        }
        Ok(BoxTruncation { caps, strides, dim })
    }

    pub fn n(&self) -> usize {
        self.caps.len()
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn cap(&self, slot: usize) -> usize {
        self.caps[slot]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stride(&self, slot: usize) -> usize {
        self.strides[slot]
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        k.n() == self.n() && k.0.iter().zip(&self.caps).all(|(ki, di)| ki <= di)
    }

    /// Basis position of `k`, or `None` when `k` lies outside the box.
    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        Some(k.0.iter().zip(&self.strides).map(|(ki, s)| ki * s).sum())
    }

    /// Exponent of variable `slot` at basis position `p`.
    pub fn exponent_at(&self, p: usize, slot: usize) -> usize {
        (p / self.strides[slot]) % (self.caps[slot] + 1)
    }

    pub fn index_at(&self, p: usize) -> MultiIndex {
        debug_assert!(p < self.dim);
        MultiIndex((0..self.n()).map(|s| self.exponent_at(p, s)).collect())
    }

    /// All basis indices in the documented order.
    pub fn enumerate_basis(&self) -> Vec<MultiIndex> {
        (0..self.dim).map(|p| self.index_at(p)).collect()
    }

    /// Position reached from `p` by raising variable `slot` by `by`, if it stays in the box.
    pub fn raise(&self, p: usize, slot: usize, by: usize) -> Option<usize> {
        let e = self.exponent_at(p, slot);
        (e + by <= self.caps[slot]).then(|| p + by * self.strides[slot])
    }

    /// Position reached by lowering variable `slot` by one, if the exponent is positive.
    pub fn lower(&self, p: usize, slot: usize) -> Option<usize> {
        (self.exponent_at(p, slot) > 0).then(|| p - self.strides[slot])
    }

    /// Split into the first `k` variables and the remaining `n - k`.
    pub fn split(&self, k: usize) -> Result<(BoxTruncation, BoxTruncation)> {
        if k == 0 || k >= self.n() {
            return Err(Error::TooFewVariables {
                needed: k + 1,
                got: self.n(),
            });
        }
        Ok((
            BoxTruncation::new(self.caps[..k].to_vec())?,
            BoxTruncation::new(self.caps[k..].to_vec())?,
        ))
    }

    /// Box over the concatenated variables of `self` followed by `rest`.
    pub fn join(&self, rest: &BoxTruncation) -> BoxTruncation {
        let mut caps = self.caps.clone();
        caps.extend_from_slice(&rest.caps);
        BoxTruncation::new(caps).expect("non-empty caps")
    }

    pub(crate) fn check_same(&self, other: &BoxTruncation) -> Result<()> {
        if self.caps != other.caps {
            return Err(Error::SpaceMismatch {
                left: self.caps.clone(),
                right: other.caps.clone(),
            });
        }
        Ok(())
    }
}

/// Element of the truncated Hardy space: Taylor coefficients over the box basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyVector {
    space: BoxTruncation,
    coeffs: DVector<C64>,
}

impl HardyVector {
    pub fn zeros(space: &BoxTruncation) -> Self {
        HardyVector {
            space: space.clone(),
            coeffs: DVector::zeros(space.dim()),
        }
    }

    /// The monomial `z^k`.
    pub fn monomial(space: &BoxTruncation, k: &MultiIndex) -> Result<Self> {
        let p = space.position(k).ok_or_else(|| Error::IndexOutOfBox {
            index: k.0.clone(),
            caps: space.caps.clone(),
        })?;
        let mut v = Self::zeros(space);
        v.coeffs[p] = C64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_coeffs(space: &BoxTruncation, coeffs: DVector<C64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::LengthMismatch {
                expected: space.dim(),
                got: coeffs.len(),
            });
        }
        Ok(HardyVector {
            space: space.clone(),
            coeffs,
        })
    }

    pub fn space(&self) -> &BoxTruncation {
        &self.space
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<C64> {
        self.coeffs
    }

    pub fn coeff(&self, k: &MultiIndex) -> C64 {
        self.space
            .position(k)
            .map_or(C64::new(0.0, 0.0), |p| self.coeffs[p])
    }

    /// `sum_k conj(u_k) v_k`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &HardyVector) -> Result<C64> {
        self.space.check_same(&other.space)?;
        Ok(self.coeffs.dotc(&other.coeffs))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn scale(&self, c: C64) -> HardyVector {
        HardyVector {
            space: self.space.clone(),
            coeffs: &self.coeffs * c,
        }
    }

    pub fn add(&self, other: &HardyVector) -> Result<HardyVector> {
        self.space.check_same(&other.space)?;
        Ok(HardyVector {
            space: self.space.clone(),
            coeffs: &self.coeffs + &other.coeffs,
        })
    }
}

/// Coefficient grid of `v` under `H^2(D^n) = H^2(D^k) (x) H^2(D^{n-k})`.
///
/// Row index is the position in the first-`k` box, column index the position
/// in the remaining box. With variable 1 fastest this is the column-major
/// reshape of the coefficient vector.
pub fn tensor_split_at(v: &HardyVector, k: usize) -> Result<DMatrix<C64>> {
    let (first, rest) = v.space.split(k)?;
    Ok(DMatrix::from_column_slice(
        first.dim(),
        rest.dim(),
        v.coeffs.as_slice(),
    ))
}

/// `tensor_split_at(v, 1)`: grid indexed by `(k_1, k')`.
pub fn tensor_split(v: &HardyVector) -> Result<DMatrix<C64>> {
    tensor_split_at(v, 1)
}

/// Inverse of [`tensor_split_at`].
pub fn tensor_join(
    grid: &DMatrix<C64>,
    first: &BoxTruncation,
    rest: &BoxTruncation,
) -> Result<HardyVector> {
    if grid.nrows() != first.dim() || grid.ncols() != rest.dim() {
        return Err(Error::LengthMismatch {
            expected: first.dim() * rest.dim(),
            got: grid.nrows() * grid.ncols(),
        });
    }
    let space = first.join(rest);
    HardyVector::from_coeffs(&space, DVector::from_column_slice(grid.as_slice()))
}

/// Basis indices at least `m_i` below every cap: `{ k : k_i <= d_i - m_i }`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorMask {
    space: BoxTruncation,
    margins: Vec<usize>,
    positions: Vec<usize>,
    member: Vec<bool>,
}

impl InteriorMask {
    pub fn new(space: &BoxTruncation, margins: &[usize]) -> Result<Self> {
        if margins.len() != space.n() {
            return Err(Error::LengthMismatch {
                expected: space.n(),
                got: margins.len(),
            });
        }
        let member: Vec<bool> = (0..space.dim())
            .map(|p| (0..space.n()).all(|s| space.exponent_at(p, s) + margins[s] <= space.cap(s)))
            .collect();
        let positions = member
            .iter()
            .enumerate()
            .filter_map(|(p, &m)| m.then_some(p))
            .collect();
        Ok(InteriorMask {
            space: space.clone(),
            margins: margins.to_vec(),
            positions,
            member,
        })
    }

    /// Mask with no margin: the whole basis.
    pub fn full(space: &BoxTruncation) -> Self {
        Self::new(space, &vec![0; space.n()]).expect("matching length")
    }

    /// Margin 1 in every variable, the minimum for shift identities.
    pub fn unit(space: &BoxTruncation) -> Self {
        Self::new(space, &vec![1; space.n()]).expect("matching length")
    }

    pub fn space(&self) -> &BoxTruncation {
        &self.space
    }

    pub fn margins(&self) -> &[usize] {
        &self.margins
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.member.get(p).copied().unwrap_or(false)
    }

    pub fn indices(&self) -> Vec<MultiIndex> {
        self.positions
            .iter()
            .map(|&p| self.space.index_at(p))
            .collect()
    }
}
