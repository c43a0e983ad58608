use super::kernel::{closed_chain, ClosedChain, Definiteness};
use crate::error::{CfsError, Result, UNINDEXED};
use crate::linalg::{c64, real_diag, CMatrix};
use crate::operator::OperatorPoint;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignKind {
    Euclidean,
    Directional,
}

/// An involution on `S_x` that is symmetric for the spin scalar product.
#[derive(Debug, Clone)]
pub struct SignOperator {
    pub kind: SignKind,
    pub matrix: CMatrix,
}

/// `s_x`: `+1` on the positive spectral subspace of `-x`, `-1` on the negative one.
pub fn euclidean_sign(x: &OperatorPoint, n: usize) -> Result<SignOperator> {
    if !x.is_regular(n) {
        return Err(CfsError::SingularPoint {
            index: UNINDEXED,
            rank: x.rank(),
            expected: 2 * n,
        });
    }
    let signs: Vec<f64> = x
        .eigenvalues()
        .iter()
        .map(|v| if *v < 0.0 { 1.0 } else { -1.0 })
        .collect();
    Ok(SignOperator {
        kind: SignKind::Euclidean,
        matrix: real_diag(&signs),
    })
}

/// `v_xy` from a closed chain: `+1` on the positive definite eigenspaces,
/// `-1` on the negative definite ones. Needs the `(2, 2)` splitting of spin
/// dimension two.
pub fn directional_sign_of(chain: &ClosedChain, n: usize) -> std::result::Result<CMatrix, String> {
    if !chain.properly_timelike {
        return Err("not properly timelike".into());
    }
    let diag = chain
        .diagonalization
        .as_ref()
        .expect("properly timelike chains are diagonalized");
    let dim_of = |d: Definiteness| -> usize {
        chain
            .eigenspaces
            .iter()
            .filter(|e| e.definiteness == d)
            .map(|e| e.dim)
            .sum()
    };
    let (plus, minus) = (
        dim_of(Definiteness::Positive),
        dim_of(Definiteness::Negative),
    );
    if plus != n || minus != n {
        return Err(format!(
            "eigenspace splitting is ({plus}, {minus}), expected ({n}, {n})"
        ));
    }
    Ok(diag.apply_per_cluster(|k, _| {
        c64(
            if chain.eigenspaces[k].definiteness == Definiteness::Positive {
                1.0
            } else {
                -1.0
            },
            0.0,
        )
    }))
}

pub fn directional_sign(
    x: &OperatorPoint,
    y: &OperatorPoint,
    n: usize,
    tol: &Tolerances,
) -> Result<SignOperator> {
    if n != 2 {
        return Err(CfsError::UnsupportedSpinDimension(n));
    }
    let chain = closed_chain(x, y, n, tol)?;
    let matrix = directional_sign_of(&chain, n).map_err(|reason| CfsError::NotSpinConnectable {
        x: UNINDEXED,
        y: UNINDEXED,
        reason,
    })?;
    Ok(SignOperator {
        kind: SignKind::Directional,
        matrix,
    })
}
