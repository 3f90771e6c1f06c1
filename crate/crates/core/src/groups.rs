//! Example groups used by tests, experiments and the command line.

use crate::ring::{GroupSpec, Mat, RingCtx};

fn integral(t: usize) -> RingCtx {
    RingCtx::with_vars(2, t).expect("valid context")
}

fn build(ctx: RingCtx, d: usize, gens: Vec<(&str, Mat)>) -> GroupSpec {
    let gens = gens.into_iter().map(|(n, m)| (n.to_string(), m)).collect();
    GroupSpec::from_generators(ctx, d, gens, true).expect("determinant-one generators")
}

/// `A = [[1,2],[0,1]]`, `B = [[1,0],[2,1]]` over `Z[1/2]`: a free group of rank 2.
pub fn free_pair() -> GroupSpec {
    let ctx = integral(0);
    let a = Mat::from_ints(&ctx, &[&[1, 2], &[0, 1]]).unwrap();
    let b = Mat::from_ints(&ctx, &[&[1, 0], &[2, 1]]).unwrap();
    build(ctx, 2, vec![("A", a), ("B", b)])
}

/// `A_s = [[1,x1],[0,1]]`, `B = [[1,0],[2,1]]` with `s = x1` a free parameter.
pub fn family() -> GroupSpec {
    let ctx = integral(1);
    let a = Mat::from_rows(vec![vec![ctx.one(), ctx.var(0)], vec![ctx.zero(), ctx.one()]]).unwrap();
    let b = Mat::from_ints(&ctx, &[&[1, 0], &[2, 1]]).unwrap();
    build(ctx, 2, vec![("A", a), ("B", b)])
}

/// The free pair with the central element `Z = -I` adjoined.
pub fn with_minus_identity() -> GroupSpec {
    let ctx = integral(0);
    let a = Mat::from_ints(&ctx, &[&[1, 2], &[0, 1]]).unwrap();
    let b = Mat::from_ints(&ctx, &[&[1, 0], &[2, 1]]).unwrap();
    let z = Mat::from_ints(&ctx, &[&[-1, 0], &[0, -1]]).unwrap();
    build(ctx, 2, vec![("A", a), ("B", b), ("Z", z)])
}

/// Upper triangular `T = [[1,1],[0,1]]`, `D = [[2,0],[0,1/2]]` over `Z[1/2]`.
/// Its unipotent elements form an infinite abelian normal subgroup.
pub fn borel() -> GroupSpec {
    let ctx = integral(0);
    let t = Mat::from_ints(&ctx, &[&[1, 1], &[0, 1]]).unwrap();
    let half = crate::ring::parse_poly("1/2", &ctx).unwrap();
    let d = Mat::from_rows(vec![vec![ctx.int(2), ctx.zero()], vec![ctx.zero(), half]]).unwrap();
    build(ctx, 2, vec![("T", t), ("D", d)])
}

/// `P = diag(A, I)`, `Q = diag(B, I)`, `U = diag(I, A)`, `V = diag(I, B)` in
/// `SL_4`: a product of two free groups whose factors centralize each other.
pub fn block_diagonal() -> GroupSpec {
    let ctx = integral(0);
    let block = |first: bool, lower: bool| {
        let mut rows = [[1i64, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        let o = if first { 0 } else { 2 };
        if lower {
            rows[o + 1][o] = 2;
        } else {
            rows[o][o + 1] = 2;
        }
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Mat::from_ints(&ctx, &refs).unwrap()
    };
    let gens = vec![("P", block(true, false)), ("Q", block(true, true)), ("U", block(false, false)), ("V", block(false, true))];
    build(ctx.clone(), 4, gens)
}
