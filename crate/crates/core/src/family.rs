//! Families of orthogonal complementary projections, the block multiplier
//! `Theta = sum_j phi_j P_j`, and the subspaces it produces.
//!
//! The multiplier lives on `H^2(D^k) (x) H^2(D^{n-k})`: the inner functions
//! act on the first `k` variables and the projections on the remaining ones.
//! Basis positions of the joined box factor as `first + dim(first) * rest`,
//! so block operators are `kron(P_j, M_{phi_j})`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inner::{Direction, InnerFunction1D, InnerFunctionProd, InnerSeq, DEFAULT_TAIL_EPS};
use crate::linalg::{hstack, principal_submatrix, spectral_norm, CMat};
use crate::operators::{kron_slots, mult_op, toeplitz_lower, LinOp, Subspace};
use crate::space::{BoxTruncation, InteriorMask, MultiIndex, C64};

/// Tolerance on pairwise orthogonality and completeness of a family.
pub const FAMILY_TOL: f64 = 1e-10;

/// Pairwise-orthogonal projections summing to the identity, held by their ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionFamily {
    space: BoxTruncation,
    members: Vec<Subspace>,
}

impl ProjectionFamily {
    pub fn new(space: &BoxTruncation, members: Vec<Subspace>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidFamily("no members".into()));
        }
        for m in &members {
            m.space().check_same(space)?;
        }
        let dim = space.dim();
        let mut sum = CMat::zeros(dim, dim);
        for (j, a) in members.iter().enumerate() {
            sum += a.projection();
            for (k, b) in members.iter().enumerate().skip(j + 1) {
                let overlap = spectral_norm(&(a.frame().adjoint() * b.frame()));
                if overlap > FAMILY_TOL {
                    return Err(Error::InvalidFamily(format!(
                        "P{} and P{} are not orthogonal (‖P_j P_k‖ = {overlap:e})",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        let defect = spectral_norm(&(sum - CMat::identity(dim, dim)));
        if defect > FAMILY_TOL {
            return Err(Error::InvalidFamily(format!(
                "projections do not sum to the identity (defect {defect:e})"
            )));
        }
        Ok(ProjectionFamily {
            space: space.clone(),
            members,
        })
    }

    /// Coordinate projections onto the spans of disjoint monomial blocks.
    pub fn from_partition(space: &BoxTruncation, blocks: &[Vec<MultiIndex>]) -> Result<Self> {
        let mut owner = vec![None; space.dim()];
        let mut members = Vec::with_capacity(blocks.len());
        for (j, block) in blocks.iter().enumerate() {
            let mut positions = Vec::with_capacity(block.len());
            for k in block {
                let p = space.position(k).ok_or_else(|| Error::IndexOutOfBox {
                    index: k.0.clone(),
                    caps: space.caps().to_vec(),
                })?;
                if owner[p].is_some() {
                    return Err(Error::PartitionOverlap { index: k.0.clone() });
                }
                owner[p] = Some(j);
                positions.push(p);
            }
            members.push(Subspace::coordinate(space, &positions));
        }
        if let Some(p) = owner.iter().position(Option::is_none) {
            return Err(Error::PartitionIncomplete {
                index: space.index_at(p).0,
            });
        }
        if members.is_empty() {
            return Err(Error::InvalidFamily("no blocks".into()));
        }
        Ok(ProjectionFamily {
            space: space.clone(),
            members,
        })
    }

    /// Ranges `phi_j H^2 ⊖ phi_{j+1} H^2` of an increasing chain, preceded by
    /// `H^2 ⊖ phi_1 H^2` when `phi_1` is not constant and closed by `phi_J H^2`.
    pub fn from_inner_chain(
        space: &BoxTruncation,
        chain: &InnerSeq,
        tau_rank: f64,
    ) -> Result<Self> {
        if chain.direction != Direction::Increasing {
            return Err(Error::InvalidSequence("chain must be increasing".into()));
        }
        chain
            .validate()
            .map_err(|v| Error::InvalidSequence(v.to_string()))?;
        if chain.nvars() != space.n() {
            return Err(Error::LengthMismatch {
                expected: space.n(),
                got: chain.nvars(),
            });
        }
        let principals: Vec<Subspace> = chain
            .terms
            .iter()
            .map(|phi| principal_subspace(phi, 0, space, tau_rank))
            .collect::<Result<_>>()?;
        let mut members = Vec::with_capacity(principals.len() + 1);
        if !chain.terms[0].is_constant() {
            members.push(principals[0].orthogonal_complement(tau_rank));
        }
        for pair in principals.windows(2) {
            members.push(pair[0].complement_in(&pair[1], tau_rank));
        }
        members.push(principals.last().expect("non-empty chain").clone());
        Self::new(space, members)
    }

    /// Ranges given as orthonormal frames.
    pub fn explicit(space: &BoxTruncation, frames: Vec<CMat>) -> Result<Self> {
        let members = frames
            .into_iter()
            .map(|f| Subspace::from_frame(space, f))
            .collect::<Result<_>>()?;
        Self::new(space, members)
    }

    pub fn space(&self) -> &BoxTruncation {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    /// Range of `P_j` (1-based).
    pub fn member(&self, j: usize) -> Result<&Subspace> {
        self.check_index(j)?;
        Ok(&self.members[j - 1])
    }

    pub fn reversed(&self) -> ProjectionFamily {
        ProjectionFamily {
            space: self.space.clone(),
            members: self.members.iter().rev().cloned().collect(),
        }
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.members.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.members.len(),
            });
        }
        Ok(())
    }

    fn direct_sum(&self, range: std::ops::RangeInclusive<usize>) -> Subspace {
        let blocks: Vec<CMat> = self.members[range]
            .iter()
            .map(|s| s.frame().clone())
            .collect();
        Subspace::span(
            &self.space,
            &hstack(self.space.dim(), &blocks),
            crate::operators::TAU_RANK,
        )
    }

    /// `S_j = Ran P_j ⊕ ... ⊕ Ran P_J`.
    pub fn tail_space(&self, j: usize) -> Result<Subspace> {
        self.check_index(j)?;
        Ok(self.direct_sum(j - 1..=self.members.len() - 1))
    }

    /// `S_j = Ran P_1 ⊕ ... ⊕ Ran P_j`.
    pub fn head_space(&self, j: usize) -> Result<Subspace> {
        self.check_index(j)?;
        Ok(self.direct_sum(0..=j - 1))
    }
}

/// Polynomials of the box lying in `phi H^2` for a one-variable inner
/// function: multiples `num(z) z^k`, `k <= d - deg`, of its numerator.
fn principal_vectors_1d(f: &InnerFunction1D, cap: usize) -> CMat {
    let size = cap + 1;
    let deg = f.degree();
    if deg > cap {
        return CMat::zeros(size, 0);
    }
    toeplitz_lower(&f.numerator_coeffs(), size)
        .columns(0, size - deg)
        .into_owned()
}

/// Model of `phi H^2` on the box: `phi H^2 ∩ polynomials of the box`.
///
/// For a coordinate product the intersection factors over variables, so the
/// frame is a Kronecker product of one-variable frames. For monomials this
/// is the span of `{ z^k : k >= deg phi }`.
pub fn principal_subspace(
    phi: &InnerFunctionProd,
    first_slot: usize,
    space: &BoxTruncation,
    tau_rank: f64,
) -> Result<Subspace> {
    let n = space.n();
    if first_slot + phi.m() > n {
        return Err(Error::SlotOutOfRange {
            slot: first_slot + phi.m(),
            n,
        });
    }
    let mut frames = Vec::with_capacity(n);
    for slot in 0..n {
        let size = space.cap(slot) + 1;
        if slot >= first_slot && slot < first_slot + phi.m() {
            let f = &phi.factors()[slot - first_slot];
            let v = principal_vectors_1d(f, space.cap(slot));
            if v.ncols() == 0 {
                return Ok(Subspace::zero(space));
            }
            frames.push(crate::linalg::orthonormal_basis(&v, tau_rank));
        } else {
            frames.push(CMat::identity(size, size));
        }
    }
    Ok(Subspace::from_frame_unchecked(space, kron_slots(&frames)))
}

/// `Theta = sum_j phi_j P_j` with inner functions on `k` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaMultiplier {
    seq: InnerSeq,
    family: ProjectionFamily,
}

impl ThetaMultiplier {
    pub fn new(seq: InnerSeq, family: ProjectionFamily) -> Result<Self> {
        if seq.len() != family.len() {
            return Err(Error::LengthMismatch {
                expected: family.len(),
                got: seq.len(),
            });
        }
        seq.validate()
            .map_err(|v| Error::InvalidSequence(v.to_string()))?;
        Ok(ThetaMultiplier { seq, family })
    }

    pub fn seq(&self) -> &InnerSeq {
        &self.seq
    }

    pub fn family(&self) -> &ProjectionFamily {
        &self.family
    }

    /// Number of variables the inner functions act on.
    pub fn k(&self) -> usize {
        self.seq.nvars()
    }

    pub fn is_monomial(&self) -> bool {
        self.seq.terms.iter().all(InnerFunctionProd::is_monomial)
    }

    /// Largest effective degree per variable over the terms.
    pub fn effective_margins(&self) -> Vec<usize> {
        let mut out = vec![0; self.k()];
        for t in &self.seq.terms {
            for (o, d) in out.iter_mut().zip(t.effective_degrees(DEFAULT_TAIL_EPS)) {
                *o = (*o).max(d);
            }
        }
        out
    }

    /// Full space `first (x) family space`.
    pub fn full_space(&self, first: &BoxTruncation) -> Result<BoxTruncation> {
        if first.n() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: first.n(),
            });
        }
        Ok(first.join(self.family.space()))
    }
}

/// Matrix of `Theta` on the joined box, `sum_j kron(P_j, M_{phi_j})`.
pub fn build_theta(theta: &ThetaMultiplier, first: &BoxTruncation) -> Result<LinOp> {
    let space = theta.full_space(first)?;
    let mut m = CMat::zeros(space.dim(), space.dim());
    for (phi, p) in theta.seq.terms.iter().zip(theta.family.members()) {
        let mp = mult_op(phi, 0, first)?;
        m += p.projection().kronecker(mp.matrix());
    }
    let mut margins = theta.effective_margins();
    margins.resize(space.n(), 0);
    LinOp::new(space.clone(), space, m, margins)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryCheck {
    pub holds: bool,
    pub residual: f64,
}

/// `‖(Theta* Theta - I)‖` on the principal submatrix of the mask.
pub fn check_isometry(op: &LinOp, mask: &InteriorMask, tol: f64) -> Result<IsometryCheck> {
    mask.space().check_same(op.domain())?;
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let dim = op.domain().dim();
    let gram = op.matrix().adjoint() * op.matrix() - CMat::identity(dim, dim);
    let residual = spectral_norm(&principal_submatrix(&gram, mask.positions()));
    Ok(IsometryCheck {
        holds: residual <= tol,
        residual,
    })
}

/// `‖(M_{z_i} Theta - Theta M_{z_i})‖` on the mask.
pub fn shift_commutator(op: &LinOp, slot: usize, mask: &InteriorMask) -> Result<f64> {
    let s = crate::operators::shift_op(slot, op.domain())?;
    let c = s.matrix() * op.matrix() - op.matrix() * s.matrix();
    Ok(spectral_norm(&principal_submatrix(&c, mask.positions())))
}

/// Polynomial vectors spanning `Theta H^2 ∩ box`: per block,
/// `(numerator_j * z^k) (x) Ran P_j` for `k <= d - deg phi_j`.
///
/// For monomial terms these are exactly the nonzero columns of [`build_theta`].
fn range_vectors(theta: &ThetaMultiplier, first: &BoxTruncation) -> Result<CMat> {
    let space = theta.full_space(first)?;
    let mut blocks = Vec::with_capacity(theta.seq.len());
    for (phi, p) in theta.seq.terms.iter().zip(theta.family.members()) {
        let per_slot: Vec<CMat> = phi
            .factors()
            .iter()
            .enumerate()
            .map(|(slot, f)| principal_vectors_1d(f, first.cap(slot)))
            .collect();
        if per_slot.iter().any(|m| m.ncols() == 0) || p.rank() == 0 {
            continue;
        }
        blocks.push(p.frame().kronecker(&kron_slots(&per_slot)));
    }
    Ok(hstack(space.dim(), &blocks))
}

/// `S = Theta (H^2(D^k) (x) H^2(D^{n-k}))` on the truncation.
pub fn range_subspace(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    tau_rank: f64,
) -> Result<Subspace> {
    let space = theta.full_space(first)?;
    Ok(Subspace::span(
        &space,
        &range_vectors(theta, first)?,
        tau_rank,
    ))
}

/// Orthogonal decomposition of the range through the head/tail spaces.
///
/// Decreasing terms: `sum_j P_{(psi_j H^2 ⊖ psi_{j-1} H^2) (x) S_j}` with
/// tails `S_j` and `psi_0 H^2 = {0}`. Increasing terms:
/// `sum_j P_{(phi_j H^2 ⊖ phi_{j+1} H^2) (x) S_j}` with heads `S_j` and
/// `phi_{J+1} H^2 = {0}`.
pub fn decomposition_projection(
    theta: &ThetaMultiplier,
    first: &BoxTruncation,
    tau_rank: f64,
) -> Result<CMat> {
    let space = theta.full_space(first)?;
    let fam = &theta.family;
    let principals: Vec<Subspace> = theta
        .seq
        .terms
        .iter()
        .map(|phi| principal_subspace(phi, 0, first, tau_rank))
        .collect::<Result<_>>()?;
    let zero = Subspace::zero(first);
    let big = fam.len();
    let mut out = CMat::zeros(space.dim(), space.dim());
    for j in 1..=big {
        let (layer, block) = match theta.seq.direction {
            Direction::Decreasing => {
                let prev = if j == 1 { &zero } else { &principals[j - 2] };
                (
                    principals[j - 1].complement_in(prev, tau_rank),
                    fam.tail_space(j)?,
                )
            }
            Direction::Increasing => {
                let next = if j == big { &zero } else { &principals[j] };
                (
                    principals[j - 1].complement_in(next, tau_rank),
                    fam.head_space(j)?,
                )
            }
        };
        out += block.projection().kronecker(layer.projection());
    }
    Ok(out)
}

/// Lifts a one-variable coefficient list to `C64` zeros for convenience in tests.
#[doc(hidden)]
pub fn monomial_seq(direction: Direction, degrees: &[usize]) -> InnerSeq {
    InnerSeq::new(
        direction,
        degrees
            .iter()
            .map(|&d| InnerFunction1D::monomial(d).into())
            .collect(),
    )
}

#[doc(hidden)]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::TAU_RANK;

    fn space(caps: &[usize]) -> BoxTruncation {
        BoxTruncation::new(caps.to_vec()).unwrap()
    }

    fn mi(k: &[usize]) -> MultiIndex {
        MultiIndex(k.to_vec())
    }

    fn blocks_1d(groups: &[&[usize]]) -> Vec<Vec<MultiIndex>> {
        groups
            .iter()
            .map(|g| g.iter().map(|&k| mi(&[k])).collect())
            .collect()
    }

    #[test]
    fn partition_family_ranks() {
        let b = space(&[4]);
        let f = ProjectionFamily::from_partition(&b, &blocks_1d(&[&[0], &[1, 2, 3, 4]])).unwrap();
        assert_eq!(f.member(1).unwrap().rank(), 1);
        assert_eq!(f.member(2).unwrap().rank(), 4);
    }

    #[test]
    fn partition_overlap_and_gap_are_errors() {
        let b = space(&[4]);
        let err = ProjectionFamily::from_partition(&b, &blocks_1d(&[&[0], &[0, 1, 2, 3, 4]]))
            .unwrap_err();
        assert_eq!(err, Error::PartitionOverlap { index: vec![0] });
        let err =
            ProjectionFamily::from_partition(&b, &blocks_1d(&[&[0], &[1, 2, 3]])).unwrap_err();
        assert_eq!(err, Error::PartitionIncomplete { index: vec![4] });
    }

    #[test]
    fn parity_partition_sums_to_identity() {
        let b = space(&[2, 2]);
        let (even, odd): (Vec<_>, Vec<_>) = b
            .enumerate_basis()
            .into_iter()
            .partition(|k| k.total_degree() % 2 == 0);
        let f = ProjectionFamily::from_partition(&b, &[even, odd]).unwrap();
        let sum = f.members()[0].projection() + f.members()[1].projection();
        assert_eq!(sum, CMat::identity(9, 9));
    }

    #[test]
    fn chain_family_examples() {
        let b = space(&[4]);
        let chain = monomial_seq(Direction::Increasing, &[0, 1, 2]);
        let f = ProjectionFamily::from_inner_chain(&b, &chain, TAU_RANK).unwrap();
        let ranks: Vec<usize> = f.members().iter().map(Subspace::rank).collect();
        assert_eq!(ranks, vec![1, 1, 3]);

        let chain = monomial_seq(Direction::Increasing, &[1]);
        let f = ProjectionFamily::from_inner_chain(&b, &chain, TAU_RANK).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.member(1).unwrap().rank(), 1);
        let m = crate::operators::mult_op_1d(&InnerFunction1D::monomial(1), 0, &b).unwrap();
        let mm = m.matrix() * m.matrix().adjoint();
        assert!((f.member(2).unwrap().projection() - &mm).camax() < 1e-15);
        assert!((f.member(1).unwrap().projection() - (CMat::identity(5, 5) - mm)).camax() < 1e-15);

        let b2 = space(&[3, 3]);
        let chain = InnerSeq::new(
            Direction::Increasing,
            vec![
                InnerFunctionProd::one(2),
                InnerFunctionProd::monomial(&[1, 1]),
            ],
        );
        let f = ProjectionFamily::from_inner_chain(&b2, &chain, TAU_RANK).unwrap();
        let sum = f.members()[0].projection() + f.members()[1].projection();
        assert!((sum - CMat::identity(16, 16)).camax() < 1e-15);
    }

    #[test]
    fn chain_family_matches_degree_partition() {
        let b = space(&[3, 3]);
        let chain = InnerSeq::new(
            Direction::Increasing,
            vec![
                InnerFunctionProd::one(2),
                InnerFunctionProd::monomial(&[1, 0]),
                InnerFunctionProd::monomial(&[1, 2]),
            ],
        );
        let f = ProjectionFamily::from_inner_chain(&b, &chain, TAU_RANK).unwrap();
        let basis = b.enumerate_basis();
        let blocks: Vec<Vec<MultiIndex>> = vec![
            basis.iter().filter(|k| k[0] < 1).cloned().collect(),
            basis
                .iter()
                .filter(|k| k[0] >= 1 && k[1] < 2)
                .cloned()
                .collect(),
            basis
                .iter()
                .filter(|k| k[0] >= 1 && k[1] >= 2)
                .cloned()
                .collect(),
        ];
        let g = ProjectionFamily::from_partition(&b, &blocks).unwrap();
        for (a, c) in f.members().iter().zip(g.members()) {
            assert!((a.projection() - c.projection()).camax() <= 1e-15);
        }
    }

    #[test]
    fn tail_and_head_spaces() {
        let b = space(&[4]);
        let f = ProjectionFamily::from_partition(&b, &blocks_1d(&[&[0], &[1, 2, 3, 4]])).unwrap();
        assert!((f.tail_space(1).unwrap().projection() - CMat::identity(5, 5)).camax() < 1e-14);
        let t2 = f.tail_space(2).unwrap();
        assert_eq!(t2.rank(), 4);
        assert!(
            t2.distance(
                &crate::space::HardyVector::monomial(&b, &mi(&[0]))
                    .unwrap()
                    .into_coeffs()
            ) > 0.99
        );
        assert!(
            (f.head_space(1).unwrap().projection() - f.member(1).unwrap().projection()).camax()
                < 1e-14
        );
        assert!(f.tail_space(3).is_err());
        assert!(f.head_space(0).is_err());
    }

    fn worked_theta(caps_rest: usize) -> ThetaMultiplier {
        let rest = space(&[caps_rest]);
        let fam = ProjectionFamily::from_partition(
            &rest,
            &[vec![mi(&[0])], (1..=caps_rest).map(|k| mi(&[k])).collect()],
        )
        .unwrap();
        ThetaMultiplier::new(monomial_seq(Direction::Decreasing, &[2, 1]), fam).unwrap()
    }

    #[test]
    fn theta_trivial_cases() {
        let first = space(&[3]);
        let rest = space(&[2]);
        let fam = ProjectionFamily::new(&rest, vec![Subspace::full(&rest)]).unwrap();
        let id =
            ThetaMultiplier::new(monomial_seq(Direction::Decreasing, &[0]), fam.clone()).unwrap();
        let op = build_theta(&id, &first).unwrap();
        assert_eq!(op.matrix(), &CMat::identity(12, 12));
        let sh = ThetaMultiplier::new(monomial_seq(Direction::Decreasing, &[1]), fam).unwrap();
        let op = build_theta(&sh, &first).unwrap();
        let full = first.join(&rest);
        assert_eq!(
            op.matrix(),
            crate::operators::shift_op(0, &full).unwrap().matrix()
        );
    }

    #[test]
    fn theta_matches_entrywise_definition() {
        // oracle: Theta e_{(k1,k2)} = z1^{2+k1} z2^{k2} if k2 == 0, else z1^{1+k1} z2^{k2}
        let theta = worked_theta(4);
        let first = space(&[5]);
        let op = build_theta(&theta, &first).unwrap();
        let full = first.join(&space(&[4]));
        let mut oracle = CMat::zeros(full.dim(), full.dim());
        for p in 0..full.dim() {
            let k = full.index_at(p);
            let shift = if k[1] == 0 { 2 } else { 1 };
            if let Some(q) = full.position(&mi(&[k[0] + shift, k[1]])) {
                oracle[(q, p)] = C64::new(1.0, 0.0);
            }
        }
        assert_eq!(op.matrix(), &oracle);
        assert_eq!(op.margins(), &[2, 0]);
    }

    #[test]
    fn isometry_exact_for_monomials() {
        let theta = worked_theta(4);
        let first = space(&[6]);
        let op = build_theta(&theta, &first).unwrap();
        let mask = InteriorMask::new(op.domain(), &[2, 0]).unwrap();
        let r = check_isometry(&op, &mask, 1e-13).unwrap();
        assert!(r.holds);
        assert_eq!(r.residual, 0.0);
        let id = LinOp::identity(op.domain());
        assert_eq!(check_isometry(&id, &mask, 1e-13).unwrap().residual, 0.0);
    }

    #[test]
    fn isometry_residual_for_half_blaschke() {
        let first = space(&[12]);
        let rest = space(&[1]);
        let fam = ProjectionFamily::new(&rest, vec![Subspace::full(&rest)]).unwrap();
        let f = InnerFunction1D::blaschke(C64::new(0.5, 0.0)).unwrap();
        let theta = ThetaMultiplier::new(InnerSeq::new(Direction::Decreasing, vec![f.into()]), fam)
            .unwrap();
        assert_eq!(theta.effective_margins(), vec![10]);
        let op = build_theta(&theta, &first).unwrap();
        let mask = InteriorMask::new(op.domain(), &[10, 0]).unwrap();
        let r = check_isometry(&op, &mask, 1e-6).unwrap();
        let analytic = 0.75 * 0.5f64.powi(20);
        assert!(
            r.residual <= 2.0 * analytic && r.residual >= analytic / 2.0,
            "{}",
            r.residual
        );
    }

    #[test]
    fn range_of_worked_theta() {
        let theta = worked_theta(5);
        let first = space(&[5]);
        let s = range_subspace(&theta, &first, TAU_RANK).unwrap();
        // z1^2 H^2 (x) C  plus  z1 H^2 (x) z2 H^2 on caps (5,5)
        assert_eq!(s.rank(), 4 + 5 * 5);
        let op = build_theta(&theta, &first).unwrap();
        let col = Subspace::span(op.domain(), op.matrix(), TAU_RANK);
        assert!((col.projection() - s.projection()).camax() < 1e-12);
    }

    #[test]
    fn range_trivial_cases() {
        let first = space(&[3]);
        let rest = space(&[2]);
        let fam = ProjectionFamily::new(&rest, vec![Subspace::full(&rest)]).unwrap();
        let id =
            ThetaMultiplier::new(monomial_seq(Direction::Decreasing, &[0]), fam.clone()).unwrap();
        assert_eq!(range_subspace(&id, &first, TAU_RANK).unwrap().rank(), 12);
        let sh = ThetaMultiplier::new(monomial_seq(Direction::Decreasing, &[1]), fam).unwrap();
        let s = range_subspace(&sh, &first, TAU_RANK).unwrap();
        let want = Subspace::coordinate_where(s.space(), |k| k[0] >= 1);
        assert!((s.projection() - want.projection()).camax() < 1e-14);
    }

    #[test]
    fn decomposition_matches_range_for_worked_instance() {
        let theta = worked_theta(5);
        let first = space(&[5]);
        let s = range_subspace(&theta, &first, TAU_RANK).unwrap();
        let d = decomposition_projection(&theta, &first, TAU_RANK).unwrap();
        assert!(spectral_norm(&(s.projection() - d)) <= 1e-10);
    }

    #[test]
    fn theta_commutes_with_first_shift() {
        let theta = worked_theta(4);
        let first = space(&[6]);
        let op = build_theta(&theta, &first).unwrap();
        let mask = InteriorMask::unit(op.domain());
        assert!(shift_commutator(&op, 0, &mask).unwrap() <= 1e-14);
    }

    #[test]
    fn theta_length_mismatch() {
        let rest = space(&[2]);
        let fam = ProjectionFamily::new(&rest, vec![Subspace::full(&rest)]).unwrap();
        assert!(matches!(
            ThetaMultiplier::new(monomial_seq(Direction::Decreasing, &[2, 1]), fam),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
