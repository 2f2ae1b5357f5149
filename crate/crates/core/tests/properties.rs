use nalgebra::DVector;
use proptest::prelude::*;

use polydisc_core::family::{
    build_theta, check_isometry, decomposition_projection, principal_subspace, range_subspace,
    ProjectionFamily, ThetaMultiplier,
};
use polydisc_core::inner::{Direction, InnerFunction1D, InnerFunctionProd, InnerSeq};
use polydisc_core::linalg::{spectral_norm, CMat};
use polydisc_core::operators::{is_invariant, mult_op, shift_op, Subspace, TAU_RANK};
use polydisc_core::space::{
    tensor_join, tensor_split_at, BoxTruncation, HardyVector, InteriorMask, MultiIndex, C64,
};

fn zero() -> impl Strategy<Value = C64> {
    (0.0f64..0.9, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn caps(max_n: usize, max_cap: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..=max_cap, 1..=max_n)
}

fn vector(space: &BoxTruncation, re: &[f64], im: &[f64]) -> HardyVector {
    let c = DVector::from_iterator(
        space.dim(),
        re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)),
    );
    HardyVector::from_coeffs(space, c).unwrap()
}

/// Caps and the real and imaginary parts of two vectors on that box.
type BoxVectors = (Vec<usize>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

fn box_and_vectors() -> impl Strategy<Value = BoxVectors> {
    caps(3, 3).prop_flat_map(|c| {
        let dim: usize = c.iter().map(|d| d + 1).product();
        let v = || prop::collection::vec(-1.0f64..1.0, dim);
        (Just(c), v(), v(), v(), v())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divisibility_is_transitive(
        a in prop::collection::vec(zero(), 0..3),
        b in prop::collection::vec(zero(), 0..3),
        c in prop::collection::vec(zero(), 0..3),
        w in zero(),
    ) {
        let one = C64::new(1.0, 0.0);
        let f = InnerFunction1D::new(one, a).unwrap();
        let g = f.multiply(&InnerFunction1D::new(one, b).unwrap());
        let h = g.multiply(&InnerFunction1D::new(one, c).unwrap());
        prop_assert!(f.divides(&g).is_some());
        prop_assert!(g.divides(&h).is_some());
        let q = f.divides(&h).expect("transitivity");
        prop_assert_eq!(f.degree() + q.degree(), h.degree());
        prop_assert!((f.multiply(&q).eval(w) - h.eval(w)).norm() < 1e-12);
    }

    #[test]
    fn adjoint_contract((c, xr, xi, yr, yi) in box_and_vectors(), e in prop::collection::vec(0usize..3, 3)) {
        let space = BoxTruncation::new(c).unwrap();
        let x = vector(&space, &xr, &xi);
        let y = vector(&space, &yr, &yi);
        let n = space.n();
        let ops = [
            mult_op(&InnerFunctionProd::monomial(&e[..n]), 0, &space).unwrap(),
            shift_op(n - 1, &space).unwrap(),
        ];
        for op in &ops {
            let lhs = op.apply(&x).unwrap().inner_product(&y).unwrap();
            let rhs = x.inner_product(&op.adjoint().apply(&y).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn tensor_split_is_unitary((c, xr, xi, yr, yi) in box_and_vectors(), k in 1usize..3) {
        prop_assume!(k < c.len());
        let space = BoxTruncation::new(c).unwrap();
        let x = vector(&space, &xr, &xi);
        let y = vector(&space, &yr, &yi);
        let (first, rest) = space.split(k).unwrap();
        let gx = tensor_split_at(&x, k).unwrap();
        let gy = tensor_split_at(&y, k).unwrap();
        prop_assert!((gx.norm() - x.norm()).abs() < 1e-12);
        let grid_inner: C64 = gx.iter().zip(gy.iter()).map(|(a, b)| a.conj() * b).sum();
        let direct = x.inner_product(&y).unwrap();
        prop_assert!((grid_inner - direct).norm() < 1e-12);
        prop_assert_eq!(tensor_join(&gx, &first, &rest).unwrap(), x);
    }

    #[test]
    fn spans_give_orthogonal_projections(
        (c, re) in caps(3, 3).prop_flat_map(|c| {
            let dim: usize = c.iter().map(|d| d + 1).product();
            (Just(c), prop::collection::vec(-1.0f64..1.0, dim * 3))
        })
    ) {
        let space = BoxTruncation::new(c).unwrap();
        let dim = space.dim();
        let cols = (dim).min(3);
        let m = CMat::from_fn(dim, cols, |i, j| C64::new(re[i + dim * j], re[(i * 7 + j) % re.len()]));
        let s = Subspace::span(&space, &m, TAU_RANK);
        let p = s.projection();
        prop_assert!(spectral_norm(&(p * p - p)) < 1e-12);
        prop_assert!(spectral_norm(&(p.adjoint() - p)) < 1e-12);
        let trace: f64 = (0..dim).map(|i| p[(i, i)].re).sum();
        prop_assert!((trace - s.rank() as f64).abs() < 1e-10);
        for j in 0..cols {
            prop_assert!(s.distance(&m.column(j).into_owned()) < 1e-10 * (1.0 + m.column(j).norm()));
        }
    }

    #[test]
    fn principal_monomial_subspaces_are_invariant(c in caps(3, 4), e in prop::collection::vec(0usize..4, 3)) {
        let space = BoxTruncation::new(c).unwrap();
        let phi = InnerFunctionProd::monomial(&e[..space.n()]);
        let s = principal_subspace(&phi, 0, &space, TAU_RANK).unwrap();
        let expect = space
            .enumerate_basis()
            .iter()
            .filter(|k| k.0.iter().zip(&e).all(|(x, y)| x >= y))
            .count();
        prop_assert_eq!(s.rank(), expect);
        let mask = InteriorMask::new(&space, &vec![0; space.n()]).unwrap();
        if s.rank() > 0 {
            prop_assert!(is_invariant(&s, 1e-12, &mask).unwrap().max_residual() < 1e-12);
        }
    }
}

/// Decreasing monomial degrees over a random partition of the remaining box.
fn monomial_scenario() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
    (2usize..=3, 3usize..=6)
        .prop_flat_map(|(n, d1)| {
            (
                Just(d1),
                prop::collection::vec(2usize..=4, n - 1),
                prop::collection::btree_set(0..=d1, 1..=3),
            )
        })
        .prop_flat_map(|(d1, rest, degrees)| {
            let dim: usize = rest.iter().map(|d| d + 1).product();
            let j = degrees.len();
            (
                Just(vec![d1]),
                Just(rest),
                Just(degrees.into_iter().rev().collect::<Vec<_>>()),
                prop::collection::vec(0..j, dim),
            )
        })
        .prop_map(|(first, rest, degrees, mut labels)| {
            // every block keeps at least one index
            for (b, l) in labels.iter_mut().enumerate().take(degrees.len()) {
                *l = b;
            }
            let mut caps = first;
            caps.extend(rest);
            (caps, degrees, labels)
        })
}

fn family_from_labels(rest: &BoxTruncation, labels: &[usize], blocks: usize) -> ProjectionFamily {
    let groups: Vec<Vec<MultiIndex>> = (0..blocks)
        .map(|b| {
            (0..rest.dim())
                .filter(|&p| labels[p] == b)
                .map(|p| rest.index_at(p))
                .collect()
        })
        .collect();
    ProjectionFamily::from_partition(rest, &groups).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn decomposition_identity_on_monomial_scenarios((caps, degrees, labels) in monomial_scenario()) {
        let space = BoxTruncation::new(caps).unwrap();
        let (first, rest) = space.split(1).unwrap();
        let fam = family_from_labels(&rest, &labels, degrees.len());
        let seq = InnerSeq::new(
            Direction::Decreasing,
            degrees.iter().map(|&d| InnerFunction1D::monomial(d).into()).collect(),
        );
        let theta = ThetaMultiplier::new(seq, fam).unwrap();
        let range = range_subspace(&theta, &first, TAU_RANK).unwrap();
        let d = decomposition_projection(&theta, &first, TAU_RANK).unwrap();
        prop_assert!(spectral_norm(&(range.projection() - d)) <= 1e-10);

        let op = build_theta(&theta, &first).unwrap();
        let mask = InteriorMask::new(op.domain(), op.margins()).unwrap();
        prop_assert!(check_isometry(&op, &mask, 1e-13).unwrap().holds);
    }
}
