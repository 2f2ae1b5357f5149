//! Multiplication and shift operators on a box truncation, subspaces with
//! orthonormal frames, and the invariance / doubly-commuting residuals.
//!
//! Operators are codomain-truncated: coefficients pushed past a cap are
//! dropped. Identities of the infinite-dimensional space are therefore
//! checked on an [`InteriorMask`] pulled back through the subspace frame:
//! the test vectors are `S ∩ span{e_k : k in mask}`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner::{InnerFunction1D, InnerFunctionProd, DEFAULT_TAIL_EPS};
use crate::linalg::{hstack, null_space, orthonormal_basis, select_rows, spectral_norm, CMat};
use crate::space::{BoxTruncation, HardyVector, InteriorMask, MultiIndex, C64};

/// Relative singular-value threshold for every rank decision.
pub const TAU_RANK: f64 = 1e-9;
/// Residual threshold for "holds".
pub const DEFAULT_TOL: f64 = 1e-8;
const ORTHONORMAL_TOL: f64 = 1e-11;

/// Matrix of an operator between two truncations, with the degrees by which
/// it can raise each variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LinOp {
    domain: BoxTruncation,
    codomain: BoxTruncation,
    matrix: CMat,
    margins: Vec<usize>,
}

impl LinOp {
    pub fn new(
        domain: BoxTruncation,
        codomain: BoxTruncation,
        matrix: CMat,
        margins: Vec<usize>,
    ) -> Result<Self> {
        if matrix.nrows() != codomain.dim() || matrix.ncols() != domain.dim() {
            return Err(Error::LengthMismatch {
                expected: codomain.dim() * domain.dim(),
                got: matrix.nrows() * matrix.ncols(),
            });
        }
        if margins.len() != codomain.n() {
            return Err(Error::LengthMismatch {
                expected: codomain.n(),
                got: margins.len(),
            });
        }
        Ok(LinOp {
            domain,
            codomain,
            matrix,
            margins,
        })
    }

    pub fn identity(space: &BoxTruncation) -> Self {
        LinOp {
            domain: space.clone(),
            codomain: space.clone(),
            matrix: CMat::identity(space.dim(), space.dim()),
            margins: vec![0; space.n()],
        }
    }

    pub fn domain(&self) -> &BoxTruncation {
        &self.domain
    }

    pub fn codomain(&self) -> &BoxTruncation {
        &self.codomain
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn margins(&self) -> &[usize] {
        &self.margins
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LinOp) -> Result<LinOp> {
        other.codomain.check_same(&self.domain)?;
        Ok(LinOp {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &other.matrix,
            margins: self
                .margins
                .iter()
                .zip(&other.margins)
                .map(|(a, b)| a.saturating_add(*b))
                .collect(),
        })
    }

    /// Conjugate transpose; adjoints only lower degrees, so margins are zero.
    pub fn adjoint(&self) -> LinOp {
        LinOp {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.adjoint(),
            margins: vec![0; self.domain.n()],
        }
    }

    pub fn apply(&self, v: &HardyVector) -> Result<HardyVector> {
        v.space().check_same(&self.domain)?;
        HardyVector::from_coeffs(&self.codomain, &self.matrix * v.coeffs())
    }
}

/// Lower-triangular Toeplitz matrix of a coefficient list (finite section of
/// multiplication by the series).
pub fn toeplitz_lower(coeffs: &[C64], size: usize) -> CMat {
    CMat::from_fn(size, size, |r, c| {
        if r >= c {
            coeffs.get(r - c).copied().unwrap_or(C64::new(0.0, 0.0))
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Kronecker assembly of per-variable matrices (slot 0 fastest).
pub(crate) fn kron_slots(per_slot: &[CMat]) -> CMat {
    let mut acc = per_slot[0].clone();
    for m in &per_slot[1..] {
        acc = m.kronecker(&acc);
    }
    acc
}

/// Multiplication by a coordinate-product inner function whose factor `i`
/// acts on variable `first_slot + i`.
pub fn mult_op(f: &InnerFunctionProd, first_slot: usize, space: &BoxTruncation) -> Result<LinOp> {
    let n = space.n();
    if first_slot + f.m() > n {
        return Err(Error::SlotOutOfRange {
            slot: first_slot + f.m(),
            n,
        });
    }
    let mut per_slot = Vec::with_capacity(n);
    let mut margins = vec![0; n];
    for slot in 0..n {
        let size = space.cap(slot) + 1;
        if slot >= first_slot && slot < first_slot + f.m() {
            let factor = &f.factors()[slot - first_slot];
            let series = factor.taylor_coeffs(space.cap(slot));
            per_slot.push(toeplitz_lower(&series.coeffs, size));
            margins[slot] = factor.effective_degree(DEFAULT_TAIL_EPS);
        } else {
            per_slot.push(CMat::identity(size, size));
        }
    }
    LinOp::new(space.clone(), space.clone(), kron_slots(&per_slot), margins)
}

/// One-variable inner function acting on `slot`.
pub fn mult_op_1d(f: &InnerFunction1D, slot: usize, space: &BoxTruncation) -> Result<LinOp> {
    mult_op(&InnerFunctionProd::from(f.clone()), slot, space)
}

/// `M_{z_i}` with `i = slot + 1`.
pub fn shift_op(slot: usize, space: &BoxTruncation) -> Result<LinOp> {
    if slot >= space.n() {
        return Err(Error::SlotOutOfRange { slot, n: space.n() });
    }
    let dim = space.dim();
    let mut m = CMat::zeros(dim, dim);
    for p in 0..dim {
        if let Some(q) = space.raise(p, slot, 1) {
            m[(q, p)] = C64::new(1.0, 0.0);
        }
    }
    let mut margins = vec![0; space.n()];
    margins[slot] = 1;
    LinOp::new(space.clone(), space.clone(), m, margins)
}

/// Closed subspace of the truncation, held as an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    space: BoxTruncation,
    frame: CMat,
    projection: CMat,
}

impl Subspace {
    /// Wrap a frame, verifying `F* F = I` within 1e-11.
    pub fn from_frame(space: &BoxTruncation, frame: CMat) -> Result<Self> {
        if frame.nrows() != space.dim() {
            return Err(Error::LengthMismatch {
                expected: space.dim(),
                got: frame.nrows(),
            });
        }
        let gram = frame.adjoint() * &frame;
        let defect = (gram - CMat::identity(frame.ncols(), frame.ncols())).camax();
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Self::from_frame_unchecked(space, frame))
    }

    pub(crate) fn from_frame_unchecked(space: &BoxTruncation, frame: CMat) -> Self {
        let projection = &frame * frame.adjoint();
        Subspace {
            space: space.clone(),
            frame,
            projection,
        }
    }

    /// Orthonormalized column span of `vectors` (columns are coefficient vectors).
    pub fn span(space: &BoxTruncation, vectors: &CMat, tau_rank: f64) -> Self {
        Self::from_frame_unchecked(space, orthonormal_basis(vectors, tau_rank))
    }

    /// Orthonormalize a list of vectors; an empty list gives the zero subspace.
    pub fn orthonormalize(
        space: &BoxTruncation,
        vectors: &[HardyVector],
        tau_rank: f64,
    ) -> Result<Self> {
        let mut m = CMat::zeros(space.dim(), vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            v.space().check_same(space)?;
            m.set_column(j, v.coeffs());
        }
        Ok(Self::span(space, &m, tau_rank))
    }

    pub fn zero(space: &BoxTruncation) -> Self {
        Self::from_frame_unchecked(space, CMat::zeros(space.dim(), 0))
    }

    pub fn full(space: &BoxTruncation) -> Self {
        Self::from_frame_unchecked(space, CMat::identity(space.dim(), space.dim()))
    }

    /// Span of the monomials at the given basis positions (ascending order).
    pub fn coordinate(space: &BoxTruncation, positions: &[usize]) -> Self {
        let mut pos = positions.to_vec();
        pos.sort_unstable();
        pos.dedup();
        let mut f = CMat::zeros(space.dim(), pos.len());
        for (j, &p) in pos.iter().enumerate() {
            f[(p, j)] = C64::new(1.0, 0.0);
        }
        Self::from_frame_unchecked(space, f)
    }

    /// Span of the monomials whose indices satisfy `pred`.
    pub fn coordinate_where(space: &BoxTruncation, pred: impl Fn(&MultiIndex) -> bool) -> Self {
        let pos: Vec<usize> = (0..space.dim())
            .filter(|&p| pred(&space.index_at(p)))
            .collect();
        Self::coordinate(space, &pos)
    }

    pub fn space(&self) -> &BoxTruncation {
        &self.space
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    pub fn projection(&self) -> &CMat {
        &self.projection
    }

    pub fn rank(&self) -> usize {
        self.frame.ncols()
    }

    /// `self ⊖ sub`: the part of `self` orthogonal to `sub`.
    pub fn complement_in(&self, sub: &Subspace, tau_rank: f64) -> Subspace {
        if self.rank() == 0 {
            return self.clone();
        }
        let residual = &self.frame - &sub.projection * &self.frame;
        Subspace::span(&self.space, &residual, tau_rank)
    }

    /// `(whole space) ⊖ self`.
    pub fn orthogonal_complement(&self, tau_rank: f64) -> Subspace {
        Subspace::full(&self.space).complement_in(self, tau_rank)
    }

    /// Closed span of several subspaces.
    pub fn join(space: &BoxTruncation, parts: &[&Subspace], tau_rank: f64) -> Subspace {
        let blocks: Vec<CMat> = parts.iter().map(|s| s.frame.clone()).collect();
        Subspace::span(space, &hstack(space.dim(), &blocks), tau_rank)
    }

    /// Frame coordinates `N` (orthonormal columns) of `S ∩ span{e_k : k in mask}`;
    /// the corresponding vectors are `F N`.
    pub fn mask_coordinates(&self, mask: &InteriorMask) -> CMat {
        let outside: Vec<usize> = (0..self.space.dim())
            .filter(|&p| !mask.contains(p))
            .collect();
        let a = select_rows(&self.frame, &outside);
        null_space(&a, TAU_RANK)
    }

    /// Distance of `v` from the subspace.
    pub fn distance(&self, v: &DVector<C64>) -> f64 {
        (v - &self.projection * v).norm()
    }
}

/// Per-variable invariance residuals `‖(I - P_S) M_{z_i} P_S‖` on the mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceCheck {
    pub holds: bool,
    pub residuals: Vec<f64>,
}

impl InvarianceCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn is_invariant(s: &Subspace, tol: f64, mask: &InteriorMask) -> Result<InvarianceCheck> {
    mask.space().check_same(s.space())?;
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let space = s.space();
    let test = s.frame() * s.mask_coordinates(mask);
    let mut residuals = Vec::with_capacity(space.n());
    for slot in 0..space.n() {
        let shifted = shift_op(slot, space)?.matrix() * &test;
        let escape = &shifted - s.projection() * &shifted;
        residuals.push(spectral_norm(&escape));
    }
    let holds = residuals.iter().all(|&r| r <= tol);
    Ok(InvarianceCheck { holds, residuals })
}

/// `R_{z_i} = P_S M_{z_i}|_S` in frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedShift {
    pub slot: usize,
    pub matrix: CMat,
}

pub fn compress_shift(s: &Subspace, slot: usize) -> Result<CompressedShift> {
    let m = shift_op(slot, s.space())?;
    Ok(CompressedShift {
        slot,
        matrix: s.frame().adjoint() * m.matrix() * s.frame(),
    })
}

/// Residual of `R_i R_j* - R_j* R_i` for one ordered pair (1-based variables).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairResidual {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublyCommutingCheck {
    pub holds: bool,
    pub residuals: Vec<PairResidual>,
}

impl DoublyCommutingCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }
}

pub fn is_doubly_commuting(
    s: &Subspace,
    tol: f64,
    mask: &InteriorMask,
) -> Result<DoublyCommutingCheck> {
    let n = s.space().n();
    if n < 2 {
        return Err(Error::TooFewVariables { needed: 2, got: n });
    }
    mask.space().check_same(s.space())?;
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let coords = s.mask_coordinates(mask);
    let r: Vec<CMat> = (0..n)
        .map(|slot| compress_shift(s, slot).map(|c| c.matrix))
        .collect::<Result<_>>()?;
    let mut residuals = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rj_adj = r[j].adjoint();
            let d = &r[i] * &rj_adj - &rj_adj * &r[i];
            residuals.push(PairResidual {
                i: i + 1,
                j: j + 1,
                value: spectral_norm(&(d * &coords)),
            });
        }
    }
    let holds = residuals.iter().all(|r| r.value <= tol);
    Ok(DoublyCommutingCheck { holds, residuals })
}

/// Outcome of extracting `W = S ⊖ sum_i z_i S`.
#[derive(Debug, Clone, PartialEq)]
pub enum Wandering {
    Zero,
    Generator(HardyVector),
    Rank(usize),
}

/// `S ⊖ sum_i z_i S` on the truncation.
///
/// `z_i S` is formed from `S ∩ {k_i <= d_i - 1}` so that no shifted vector
/// loses coefficients at the cap.
pub fn wandering_subspace(s: &Subspace, tau_rank: f64) -> Result<Subspace> {
    let space = s.space();
    if s.rank() == 0 {
        return Ok(s.clone());
    }
    let mut blocks = Vec::with_capacity(space.n());
    for slot in 0..space.n() {
        let mut margins = vec![0; space.n()];
        margins[slot] = 1;
        let mask = InteriorMask::new(space, &margins)?;
        let inner = s.frame() * s.mask_coordinates(&mask);
        blocks.push(shift_op(slot, space)?.matrix() * inner);
    }
    let shifted = Subspace::span(space, &hstack(space.dim(), &blocks), tau_rank);
    Ok(s.complement_in(&shifted, tau_rank))
}

/// Unit generator of a one-dimensional wandering subspace, phase-normalized
/// so that its first nonzero coefficient (basis order) is positive real.
pub fn wandering_generator(s: &Subspace, tau_rank: f64) -> Result<Wandering> {
    let w = wandering_subspace(s, tau_rank)?;
    match w.rank() {
        0 => Ok(Wandering::Zero),
        1 => {
            let mut v: DVector<C64> = w.frame().column(0).into_owned();
            let vmax = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
            if let Some(first) = v.iter().find(|x| x.norm() > tau_rank * vmax).copied() {
                let phase = first.conj() / first.norm();
                v *= phase;
            }
            // snap rounding noise so monomial generators come out exact
            for x in v.iter_mut() {
                if x.norm() <= 1e-14 {
                    *x = C64::new(0.0, 0.0);
                }
            }
            let norm = v.norm();
            v /= C64::new(norm, 0.0);
            Ok(Wandering::Generator(HardyVector::from_coeffs(
                s.space(),
                v,
            )?))
        }
        r => Ok(Wandering::Rank(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(caps: &[usize]) -> BoxTruncation {
        BoxTruncation::new(caps.to_vec()).unwrap()
    }

    fn mi(k: &[usize]) -> MultiIndex {
        MultiIndex(k.to_vec())
    }

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn mult_by_z_is_truncated_shift() {
        let b = space(&[2]);
        let m = mult_op_1d(&InnerFunction1D::monomial(1), 0, &b).unwrap();
        let e = |k| HardyVector::monomial(&b, &mi(&[k])).unwrap();
        assert_eq!(m.apply(&e(0)).unwrap(), e(1));
        assert_eq!(m.apply(&e(1)).unwrap(), e(2));
        assert_eq!(m.apply(&e(2)).unwrap(), HardyVector::zeros(&b));
        assert_eq!(m.margins(), &[1]);
    }

    #[test]
    fn mult_by_blaschke_first_column() {
        let b = space(&[2]);
        let f = InnerFunction1D::blaschke(C64::new(0.5, 0.0)).unwrap();
        let m = mult_op_1d(&f, 0, &b).unwrap();
        let col = m.matrix().column(0);
        let want = [-0.5, 0.75, 0.375];
        for (x, w) in col.iter().zip(want) {
            assert!((x - C64::new(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn mult_by_one_is_identity() {
        let b = space(&[3, 2]);
        let m = mult_op(&InnerFunctionProd::one(2), 0, &b).unwrap();
        assert_eq!(m.matrix(), LinOp::identity(&b).matrix());
    }

    #[test]
    fn mult_op_rejects_bad_slot() {
        let b = space(&[3]);
        assert!(mult_op_1d(&InnerFunction1D::monomial(1), 1, &b).is_err());
        assert!(shift_op(1, &b).is_err());
    }

    #[test]
    fn shifts_commute_and_adjoint_kills_degree_zero() {
        let b = space(&[3, 3]);
        let m1 = shift_op(0, &b).unwrap();
        let m2 = shift_op(1, &b).unwrap();
        let e00 = HardyVector::monomial(&b, &mi(&[0, 0])).unwrap();
        assert_eq!(
            m1.apply(&e00).unwrap(),
            HardyVector::monomial(&b, &mi(&[1, 0])).unwrap()
        );
        let a = m1.apply(&m2.apply(&e00).unwrap()).unwrap();
        let c = m2.apply(&m1.apply(&e00).unwrap()).unwrap();
        assert_eq!(a, c);
        assert_eq!(a, HardyVector::monomial(&b, &mi(&[1, 1])).unwrap());
        let adj = m1.adjoint();
        for k in 0..=3 {
            let v = HardyVector::monomial(&b, &mi(&[0, k])).unwrap();
            assert_eq!(adj.apply(&v).unwrap(), HardyVector::zeros(&b));
        }
        assert_eq!(m1.compose(&m2).unwrap().margins(), &[1, 1]);
        assert_eq!(adj.margins(), &[0, 0]);
    }

    #[test]
    fn orthonormalize_examples() {
        let b = space(&[1]);
        let e0 = HardyVector::monomial(&b, &mi(&[0])).unwrap();
        let e1 = HardyVector::monomial(&b, &mi(&[1])).unwrap();
        let s = Subspace::orthonormalize(&b, &[e0.clone(), e0.clone()], TAU_RANK).unwrap();
        assert_eq!(s.rank(), 1);
        let s = Subspace::orthonormalize(
            &b,
            &[e0.add(&e1).unwrap(), e0.add(&e1.scale(-one())).unwrap()],
            TAU_RANK,
        )
        .unwrap();
        assert_eq!(s.rank(), 2);
        assert!((s.projection() - CMat::identity(2, 2)).camax() < 1e-14);
        assert_eq!(
            Subspace::orthonormalize(&b, &[], TAU_RANK).unwrap().rank(),
            0
        );
    }

    #[test]
    fn invariance_examples() {
        let b = space(&[4, 4]);
        let mask = InteriorMask::unit(&b);
        let z1h2 = Subspace::coordinate_where(&b, |k| k[0] >= 1);
        let r = is_invariant(&z1h2, DEFAULT_TOL, &mask).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_residual(), 0.0);

        let span_z2 = Subspace::coordinate(&b, &[b.position(&mi(&[0, 1])).unwrap()]);
        assert!(!is_invariant(&span_z2, DEFAULT_TOL, &mask).unwrap().holds);

        let nonconst = Subspace::coordinate_where(&b, |k| k.total_degree() > 0);
        assert!(is_invariant(&nonconst, DEFAULT_TOL, &mask).unwrap().holds);

        let empty = InteriorMask::new(&b, &[5, 0]).unwrap();
        assert_eq!(
            is_invariant(&nonconst, DEFAULT_TOL, &empty).unwrap_err(),
            Error::EmptyMask
        );
    }

    #[test]
    fn compress_shift_examples() {
        let b = space(&[3, 2]);
        let full = Subspace::full(&b);
        let r = compress_shift(&full, 0).unwrap();
        assert_eq!(r.matrix, *shift_op(0, &b).unwrap().matrix());
        let zero = Subspace::zero(&b);
        let r = compress_shift(&zero, 1).unwrap();
        assert_eq!(r.matrix.shape(), (0, 0));
    }

    #[test]
    fn compressed_shift_on_z1_model_has_shift_spectrum() {
        // R_{z_1} on z_1 H^2 is a shifted copy of M_{z_1}: nilpotent with the
        // same singular values as the truncated shift on the smaller box.
        let b = space(&[4]);
        let s = Subspace::coordinate_where(&b, |k| k[0] >= 1);
        let r = compress_shift(&s, 0).unwrap().matrix;
        let small = shift_op(0, &space(&[3])).unwrap();
        let sv = |m: &CMat| crate::linalg::singular_values(m);
        let a = sv(&r);
        let c = sv(small.matrix());
        for (x, y) in a.iter().zip(&c) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn doubly_commuting_examples() {
        let b = space(&[4, 4]);
        let mask = InteriorMask::unit(&b);
        let z1sq = Subspace::coordinate_where(&b, |k| k[0] >= 2);
        assert!(
            is_doubly_commuting(&z1sq, DEFAULT_TOL, &mask)
                .unwrap()
                .holds
        );
        let z1z2 = Subspace::coordinate_where(&b, |k| k[0] >= 1 && k[1] >= 1);
        let r = is_doubly_commuting(&z1z2, DEFAULT_TOL, &mask).unwrap();
        assert!(r.max_residual() <= 1e-12);

        let b6 = space(&[6, 6]);
        let nonconst = Subspace::coordinate_where(&b6, |k| k.total_degree() > 0);
        let r = is_doubly_commuting(&nonconst, DEFAULT_TOL, &InteriorMask::unit(&b6)).unwrap();
        assert!(!r.holds);
        assert!(r.max_residual() >= 0.5);

        let one_var = space(&[3]);
        assert!(is_doubly_commuting(
            &Subspace::full(&one_var),
            DEFAULT_TOL,
            &InteriorMask::unit(&one_var)
        )
        .is_err());
    }

    #[test]
    fn wandering_examples() {
        let b = space(&[4, 4]);
        let z1sq = Subspace::coordinate_where(&b, |k| k[0] >= 2);
        match wandering_generator(&z1sq, TAU_RANK).unwrap() {
            Wandering::Generator(g) => {
                assert_eq!(g, HardyVector::monomial(&b, &mi(&[2, 0])).unwrap())
            }
            other => panic!("unexpected {other:?}"),
        }
        let z1z2 = Subspace::coordinate_where(&b, |k| k[0] >= 1 && k[1] >= 1);
        match wandering_generator(&z1z2, TAU_RANK).unwrap() {
            Wandering::Generator(g) => {
                assert_eq!(g, HardyVector::monomial(&b, &mi(&[1, 1])).unwrap())
            }
            other => panic!("unexpected {other:?}"),
        }
        let nonconst = Subspace::coordinate_where(&b, |k| k.total_degree() > 0);
        assert_eq!(
            wandering_generator(&nonconst, TAU_RANK).unwrap(),
            Wandering::Rank(2)
        );
        let w = wandering_subspace(&nonconst, TAU_RANK).unwrap();
        let e10 = HardyVector::monomial(&b, &mi(&[1, 0])).unwrap();
        let e01 = HardyVector::monomial(&b, &mi(&[0, 1])).unwrap();
        assert!(w.distance(e10.coeffs()) < 1e-14);
        assert!(w.distance(e01.coeffs()) < 1e-14);
        assert_eq!(
            wandering_generator(&Subspace::zero(&b), TAU_RANK).unwrap(),
            Wandering::Zero
        );
    }

    #[test]
    fn wandering_generator_phase_is_positive() {
        let b = space(&[3]);
        let v = HardyVector::monomial(&b, &mi(&[1]))
            .unwrap()
            .scale(C64::new(0.0, -1.0));
        let s = Subspace::orthonormalize(&b, &[v], TAU_RANK).unwrap();
        let s = Subspace::join(
            &b,
            &[&s, &Subspace::coordinate_where(&b, |k| k[0] >= 2)],
            TAU_RANK,
        );
        match wandering_generator(&s, TAU_RANK).unwrap() {
            Wandering::Generator(g) => assert_eq!(g.coeff(&mi(&[1])), one()),
            other => panic!("unexpected {other:?}"),
        }
    }
}
