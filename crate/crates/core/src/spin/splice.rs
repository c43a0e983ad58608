use super::clifford::CliffordSubspace;
use crate::error::{CfsError, Result};
use crate::linalg::{
    c64, diagonalize_real, eigenvalues, frobenius, identity, indefinite_adjoint, CMatrix,
};

/// Tolerance of the intertwining relation `U e_a U^* = f_a` (relative).
pub const SPLICE_TOL: f64 = 1e-8;

/// Frame of a subspace reordered so that the `+1` squares come first;
/// the relative order within each sign is kept.
fn sorted_frame(k: &CliffordSubspace) -> (Vec<CMatrix>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..k.dim()).collect();
    idx.sort_by(|&a, &b| k.eta()[b].total_cmp(&k.eta()[a]).then(a.cmp(&b)));
    (
        idx.iter().map(|&i| k.frame()[i].clone()).collect(),
        idx.iter().map(|&i| k.eta()[i]).collect(),
    )
}

/// Products `e_I` over all index subsets (bit masks) and their inverses.
fn monomials(frame: &[CMatrix], eta: &[f64]) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let d = frame[0].nrows();
    let k = frame.len();
    let mut prods = Vec::with_capacity(1 << k);
    let mut invs = Vec::with_capacity(1 << k);
    for mask in 0..(1usize << k) {
        let mut p = identity(d);
        let mut inv = identity(d);
        for a in 0..k {
            if mask & (1 << a) != 0 {
                p *= &frame[a];
                // (e_1 ... e_m)^{-1} = e_m^{-1} ... e_1^{-1}, e_a^{-1} = eta_a e_a
                inv = frame[a].scale(eta[a]) * inv;
            }
        }
        prods.push(p);
        invs.push(inv);
    }
    (prods, invs)
}

/// Unitary `U` on the spin space with Gram matrix `gram` such that
/// `U e_a U^* = f_a` for the pseudo-orthonormal frames `e` of `from` and `f`
/// of `to`. Built as the group average `sum_I f_I X e_I^{-1}` (with `X = 1`
/// unless that average vanishes), normalized by `(U^* U)^{-1/2}`, with the
/// largest-modulus entry made real and positive.
pub fn splice_map(
    from: &CliffordSubspace,
    to: &CliffordSubspace,
    gram: &CMatrix,
) -> Result<CMatrix> {
    if from.signature() != to.signature() {
        return Err(CfsError::Clifford(format!(
            "signatures {:?} and {:?} differ",
            from.signature(),
            to.signature()
        )));
    }
    let d = gram.nrows();
    let (e, eta) = sorted_frame(from);
    let (f, _) = sorted_frame(to);
    let (e_prod, e_inv) = monomials(&e, &eta);
    let (f_prod, _) = monomials(&f, &eta);
    let mut best_residual = f64::INFINITY;
    let seeds = std::iter::once(None).chain((0..d).flat_map(|i| (0..d).map(move |j| Some((i, j)))));
    for seed in seeds {
        let mut u = CMatrix::zeros(d, d);
        for (fp, ei) in f_prod.iter().zip(&e_inv) {
            u += match seed {
                None => fp * ei,
                Some((i, j)) => fp.column(i) * ei.row(j),
            };
        }
        if frobenius(&u) < 1e-8 * e_prod.len() as f64 {
            continue;
        }
        let Some(u) = normalize(&u, gram)? else {
            continue;
        };
        let u_adj = indefinite_adjoint(&u, gram, gram)?;
        let residual = e
            .iter()
            .zip(&f)
            .map(|(ea, fa)| frobenius(&(&u * ea * &u_adj - fa)) / frobenius(fa))
            .fold(0.0_f64, f64::max);
        if residual <= SPLICE_TOL {
            return Ok(u);
        }
        best_residual = best_residual.min(residual);
    }
    Err(CfsError::NoIntertwiner {
        residual: best_residual,
    })
}

fn normalize(u: &CMatrix, gram: &CMatrix) -> Result<Option<CMatrix>> {
    let m = indefinite_adjoint(u, gram, gram)? * u;
    let spec = eigenvalues(&m)?;
    let scale = spec.first().map_or(0.0, |z| z.norm());
    if scale == 0.0
        || spec
            .iter()
            .any(|z| z.im.abs() > 1e-9 * scale || z.re <= 1e-9 * scale)
    {
        return Ok(None);
    }
    let values: Vec<f64> = spec.iter().map(|z| z.re).collect();
    let Some(diag) = diagonalize_real(&m, &values, 1e-9 * scale)? else {
        return Ok(None);
    };
    let mut w = u * diag.apply(|v| c64(v.sqrt().recip(), 0.0));
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in w.iter().enumerate() {
        if z.norm() > best_norm * (1.0 + 1e-12) {
            best = i;
            best_norm = z.norm();
        }
    }
    let phase = w[best] / best_norm;
    w *= phase.conj();
    Ok(Some(w))
}
