//! Dense complex helpers: rank-revealing orthonormalization, null spaces,
//! spectral norms and Kronecker products.

use nalgebra::DMatrix;

use crate::space::C64;

pub type CMat = DMatrix<C64>;

/// Singular value decomposition `m = u diag(s) vt` with `s` in decreasing order.
///
/// `u` is thin (`rows x min`) when requested; `vt` is the full `cols x cols`
/// unitary when requested.
pub struct Svd {
    pub s: Vec<f64>,
    pub u: Option<CMat>,
    pub vt: Option<CMat>,
}

/// Complex SVD through LAPACK `zgesvd`.
pub fn svd(m: &CMat, want_u: bool, want_vt: bool) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            s: Vec::new(),
            u: want_u.then(|| CMat::zeros(rows, 0)),
            vt: want_vt.then(|| CMat::identity(cols, cols)),
        };
    }
    let zero = C64::new(0.0, 0.0);
    let mut a = m.as_slice().to_vec();
    let mut s = vec![0.0; k];
    let (jobu, ldu, usize_) = if want_u {
        (b'S', rows, rows * k)
    } else {
        (b'N', 1, 1)
    };
    let (jobvt, ldvt, vtsize) = if want_vt {
        (b'A', cols, cols * cols)
    } else {
        (b'N', 1, 1)
    };
    let mut u = vec![zero; usize_];
    let mut vt = vec![zero; vtsize];
    let mut rwork = vec![0.0; 5 * k];
    let mut info = 0;
    let mut query = [zero];
    let dims = |x: usize| i32::try_from(x).expect("matrix dimension fits in i32");
    // SAFETY: every buffer is sized per the LAPACK contract for these job codes
    unsafe {
        lapack::zgesvd(
            jobu,
            jobvt,
            dims(rows),
            dims(cols),
            &mut a,
            dims(rows),
            &mut s,
            &mut u,
            dims(ldu),
            &mut vt,
            dims(ldvt),
            &mut query,
            -1,
            &mut rwork,
            &mut info,
        );
    }
    let lwork = (query[0].re as usize).max(1);
    let mut work = vec![zero; lwork];
    unsafe {
        lapack::zgesvd(
            jobu,
            jobvt,
            dims(rows),
            dims(cols),
            &mut a,
            dims(rows),
            &mut s,
            &mut u,
            dims(ldu),
            &mut vt,
            dims(ldvt),
            &mut work,
            dims(lwork),
            &mut rwork,
            &mut info,
        );
    }
    assert!(info >= 0, "zgesvd: illegal argument {}", -info);
    assert!(info == 0, "zgesvd did not converge ({info} superdiagonals)");
    Svd {
        s,
        u: want_u.then(|| CMat::from_vec(rows, k, u)),
        vt: want_vt.then(|| CMat::from_vec(cols, cols, vt)),
    }
}

/// Largest singular value; 0 for an empty matrix.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() || m.iter().all(|x| *x == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    svd(m, false, false).s[0]
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    svd(m, false, false).s
}

/// Orthonormal basis of the column span of `m`.
///
/// Singular values below `tau_rank * sigma_max` are discarded. Columns come
/// out in decreasing singular-value order.
pub fn orthonormal_basis(m: &CMat, tau_rank: f64) -> CMat {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 || m.iter().all(|x| *x == C64::new(0.0, 0.0)) {
        return CMat::zeros(rows, 0);
    }
    let d = svd(m, true, false);
    let keep = d.s.iter().take_while(|&&x| x > tau_rank * d.s[0]).count();
    d.u.expect("u requested").columns(0, keep).into_owned()
}

/// Orthonormal basis of `{ x : m x ≈ 0 }`, singular values at most `tol`
/// (absolute) counted as zero.
pub fn null_space(m: &CMat, tol: f64) -> CMat {
    let cols = m.ncols();
    if cols == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(cols, cols);
    }
    let d = svd(m, false, true);
    let vt = d.vt.expect("v requested");
    let rank = d.s.iter().take_while(|&&x| x > tol).count();
    vt.rows(rank, cols - rank).adjoint()
}

/// `a (x) b` with `b`'s index varying fastest.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Principal submatrix on the given positions.
pub fn principal_submatrix(m: &CMat, positions: &[usize]) -> CMat {
    CMat::from_fn(positions.len(), positions.len(), |i, j| {
        m[(positions[i], positions[j])]
    })
}

/// Columns of `m` at the given positions.
pub fn select_columns(m: &CMat, positions: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), positions.len(), |i, j| m[(i, positions[j])])
}

/// Rows of `m` at the given positions.
pub fn select_rows(m: &CMat, positions: &[usize]) -> CMat {
    CMat::from_fn(positions.len(), m.ncols(), |i, j| m[(positions[i], j)])
}

/// Horizontal concatenation.
pub fn hstack(rows: usize, blocks: &[CMat]) -> CMat {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), rows);
        out.view_mut((0, at), (rows, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}
