"""Fidelity measures for pure and mixed states.

The mixed-state fidelity comes in two equivalent forms that this package
keeps deliberately separate so they can check each other: the matrix
square-root form on density matrices, and the purification form where a
maximization over auxiliary-space unitaries collapses to a trace norm.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import BipartitePureState, DensityMatrix, PureState, matrix_sqrt
from .povm import CutPovm, SubsetIndex, _validate_subset

_CLAMP = 1e-10


def _clamp_unit(value: float) -> float:
    """Snap round-off just outside [0, 1] back onto the interval."""
    if -_CLAMP <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + _CLAMP:
        return 1.0
    return value


def overlap_fidelity(a, b) -> float:
    """Squared overlap of two pure states (plain or bipartite)."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        if a.dim != b.dim:
            raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    elif isinstance(a, BipartitePureState) and isinstance(b, BipartitePureState):
        if (a.dim_sys, a.dim_aux) != (b.dim_sys, b.dim_aux):
            raise ValueError("bipartite dimension mismatch")
    else:
        raise TypeError("overlap_fidelity expects two states of the same kind")
    return _clamp_unit(abs(np.vdot(a.amps, b.amps)) ** 2)


def bures_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Transition probability (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Evaluated as the squared nuclear norm of sqrt(rho) @ sqrt(sigma), which
    is the same quantity but does not square the conditioning the way an
    eigendecomposition of the triple product would.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    singulars = np.linalg.svd(matrix_sqrt(rho) @ matrix_sqrt(sigma), compute_uv=False)
    return _clamp_unit(float(singulars.sum()) ** 2)


def uhlmann_fidelity(phi0: BipartitePureState, phi1: BipartitePureState) -> float:
    """Maximal squared overlap over auxiliary-space unitaries.

    max over U of |<phi0| (1 x U) |phi1>|^2 equals the squared trace norm
    of the auxiliary cross matrix X[k', k] = sum_j conj(a[j, k]) b[j, k'],
    so the maximization is done analytically through singular values.
    Equals the square-root fidelity of the reduced system states.
    """
    if (phi0.dim_sys, phi0.dim_aux) != (phi1.dim_sys, phi1.dim_aux):
        raise ValueError("purifications must share both dimensions")
    cross = phi1.matrix.T @ phi0.matrix.conj()
    return _clamp_unit(float(np.linalg.svd(cross, compute_uv=False).sum()) ** 2)


def per_outcome_mixed_fidelity(
    povm: CutPovm, subset: SubsetIndex, purification: BipartitePureState
) -> float:
    """Single-shot mixed-state fidelity of one cut, from a purification.

    For elements diagonal in a common basis the purification maximum sits
    at U = identity, so the value reduces to
    |<psi|(A x 1)|psi>|^2 / Tr(A rho A^dag) = norm_const * probability.
    Tests confirm the reduction against ``bures_fidelity`` on the reduced
    density matrices.
    """
    if purification.dim_sys != povm.n:
        raise ValueError(f"system dimension {purification.dim_sys} != povm n={povm.n}")
    idx = _validate_subset(povm, subset)
    kept_weight = float(np.sum(np.abs(purification.matrix[idx, :]) ** 2))
    if kept_weight <= 0.0:
        raise ValueError(f"outcome {subset.indices} has zero probability")
    overlap = kept_weight / povm.norm_const  # <psi|(A x 1)|psi>
    denominator = kept_weight / povm.norm_const**2  # Tr(A rho A^dag)
    return _clamp_unit(overlap**2 / denominator)


def purify(rho: DensityMatrix, dim_aux: int | None = None) -> BipartitePureState:
    """Canonical purification of a density matrix on system x auxiliary.

    Uses the eigendecomposition: sum_i sqrt(lambda_i) |i> x |i_aux>.  The
    auxiliary dimension defaults to the system dimension and must be at
    least the rank.
    """
    if dim_aux is None:
        dim_aux = rho.dim
    evals, vecs = np.linalg.eigh(rho.entries)
    evals = np.clip(evals, 0.0, None)
    rank = int(np.sum(evals > 0.0))
    if dim_aux < rank:
        raise ValueError(f"auxiliary dimension {dim_aux} below rank {rank}")
    c = np.zeros((rho.dim, dim_aux), dtype=complex)
    # Descending order keeps the largest weights on the lowest aux indices.
    order = np.argsort(evals)[::-1]
    for k, i in enumerate(order[:dim_aux]):
        c[:, k] = math.sqrt(evals[i]) * vecs[:, i]
    return BipartitePureState(rho.dim, dim_aux, c.ravel())
