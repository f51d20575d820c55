"""The dimension-cutting POVM.

The measurement family is indexed by the M-element subsets of the N basis
states.  Each element is the uniform projector mixture over one subset,
scaled by 1/norm_const with norm_const = C(N-1, M-1), which is exactly what
makes the family resolve the identity: every basis index appears in
C(N-1, M-1) subsets.

Elements are kept implicit as index subsets; dense matrices are only
materialized on demand, and outcome sampling never enumerates the C(N, M)
subsets.  Instead a pivot index j is drawn with probability equal to the
state's j-th squared-amplitude weight and the remaining M-1 indices are
drawn uniformly among the other N-1.  Each subset is reached once per
contained pivot, so its total probability is (1/norm_const) * sum of its
weights, the Born probability of the corresponding element.  A brute-force
enumeration test discharges this equivalence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .linalg import BipartitePureState, DensityMatrix, PureState

ENUMERATION_CAP = 10**6
_FIDELITY_IDENTITY_ATOL = 1e-10


@dataclass(frozen=True)
class SubsetIndex:
    """Strictly increasing tuple of basis indices defining one POVM element."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(idx) == 0:
            raise ValueError("subset must be nonempty")
        if idx[0] < 0 or any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be nonnegative and strictly increasing")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class CutPovm:
    """Cutting POVM from dimension n down to m, with its normalization."""

    n: int
    m: int
    norm_const: int = field(init=False)

    def __post_init__(self):
        if not 1 <= self.m <= self.n:
            raise ValueError("need 1 <= m <= n")
        object.__setattr__(self, "norm_const", math.comb(self.n - 1, self.m - 1))

    def subset_count(self) -> int:
        return math.comb(self.n, self.m)


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """One sampled cut: the subset, its probability, the post-measurement
    state, and the single-shot fidelity of that state to the input."""

    subset: SubsetIndex
    probability: float
    post_state: PureState | BipartitePureState | DensityMatrix
    shot_fidelity: float

    def __post_init__(self):
        if not -1e-12 <= self.probability <= 1.0 + 1e-12:
            raise ValueError(f"probability {self.probability} outside [0, 1]")
        if not -1e-12 <= self.shot_fidelity <= 1.0 + 1e-12:
            raise ValueError(f"shot fidelity {self.shot_fidelity} outside [0, 1]")


def _validate_subset(povm: CutPovm, subset: SubsetIndex) -> np.ndarray:
    if len(subset) != povm.m or subset.indices[-1] >= povm.n:
        raise ValueError(f"subset {subset.indices} invalid for n={povm.n}, m={povm.m}")
    return np.asarray(subset.indices, dtype=np.intp)


def _weights(state) -> np.ndarray:
    """Per-basis-index weights: the diagonal of the state in the cut basis."""
    if isinstance(state, PureState):
        return np.abs(state.amps) ** 2
    if isinstance(state, BipartitePureState):
        return np.sum(np.abs(state.matrix) ** 2, axis=1)
    if isinstance(state, DensityMatrix):
        return np.clip(np.real(np.diagonal(state.entries)), 0.0, None)
    raise TypeError(f"unsupported state type {type(state).__name__}")


def _system_dim(state) -> int:
    return state.dim_sys if isinstance(state, BipartitePureState) else state.dim


def element_matrix(povm: CutPovm, subset: SubsetIndex) -> np.ndarray:
    """Dense matrix of one POVM element: 1/norm_const on the subset diagonal."""
    idx = _validate_subset(povm, subset)
    mat = np.zeros((povm.n, povm.n), dtype=complex)
    mat[idx, idx] = 1.0 / povm.norm_const
    return mat


def subsets(povm: CutPovm, cap: int = ENUMERATION_CAP):
    """Iterate over all subsets in lexicographic order (exact sums only)."""
    total = povm.subset_count()
    if total > cap:
        raise ValueError(f"{total} subsets exceed the enumeration cap {cap}")
    for combo in itertools.combinations(range(povm.n), povm.m):
        yield SubsetIndex(combo)


def outcome_probability(povm: CutPovm, subset: SubsetIndex, state) -> float:
    """Born probability of one element: (1/norm_const) * sum of subset weights.

    Accepts pure, bipartite (system marginal) and density-matrix inputs.
    """
    if _system_dim(state) != povm.n:
        raise ValueError(f"state dimension {_system_dim(state)} != povm n={povm.n}")
    idx = _validate_subset(povm, subset)
    return float(_weights(state)[idx].sum() / povm.norm_const)


def project_pure(povm: CutPovm, subset: SubsetIndex, state: PureState) -> tuple[PureState, float]:
    """Renormalized projection onto the subset, with its single-shot fidelity.

    The fidelity is the squared overlap between input and projected state,
    computed from the vectors themselves; it must reproduce
    norm_const * probability, which tests assert.
    """
    if state.dim != povm.n:
        raise ValueError(f"state dimension {state.dim} != povm n={povm.n}")
    idx = _validate_subset(povm, subset)
    if povm.m == povm.n:
        # The single full subset scales the state by a positive constant.
        return state, 1.0
    kept = state.amps[idx]
    kept_weight = float(np.sum(np.abs(kept) ** 2))
    if kept_weight <= 0.0:
        raise ValueError(f"outcome {subset.indices} has zero probability")
    post_amps = np.zeros(povm.n, dtype=complex)
    post_amps[idx] = kept / math.sqrt(kept_weight)
    post = PureState._trusted(povm.n, post_amps)
    fidelity = abs(np.vdot(state.amps, post.amps)) ** 2
    return post, float(fidelity)


def project_bipartite(
    povm: CutPovm, subset: SubsetIndex, state: BipartitePureState
) -> tuple[BipartitePureState, float]:
    """Project the system half onto the subset, leaving the auxiliary alone."""
    if state.dim_sys != povm.n:
        raise ValueError(f"system dimension {state.dim_sys} != povm n={povm.n}")
    idx = _validate_subset(povm, subset)
    if povm.m == povm.n:
        return state, 1.0
    c = state.matrix
    kept_weight = float(np.sum(np.abs(c[idx, :]) ** 2))
    if kept_weight <= 0.0:
        raise ValueError(f"outcome {subset.indices} has zero probability")
    post_c = np.zeros_like(c)
    post_c[idx, :] = c[idx, :] / math.sqrt(kept_weight)
    post = BipartitePureState._trusted(state.dim_sys, state.dim_aux, post_c.ravel())
    fidelity = abs(np.vdot(state.amps, post.amps)) ** 2
    return post, float(fidelity)


def apply_cut_density(
    povm: CutPovm, subset: SubsetIndex, rho: DensityMatrix
) -> tuple[DensityMatrix, float]:
    """Conditional post-measurement density matrix and the outcome probability.

    The element is proportional to a projector, so the returned probability
    Tr(A rho) also fixes Tr(A rho A^dag) = Tr(A rho) / norm_const.
    """
    if rho.dim != povm.n:
        raise ValueError(f"density dimension {rho.dim} != povm n={povm.n}")
    idx = _validate_subset(povm, subset)
    if povm.m == povm.n:
        return rho, 1.0
    diag_weight = float(np.real(np.diagonal(rho.entries)[idx].sum()))
    if diag_weight <= 0.0:
        raise ValueError(f"outcome {subset.indices} has zero probability")
    post = np.zeros_like(rho.entries)
    post[np.ix_(idx, idx)] = rho.entries[np.ix_(idx, idx)] / diag_weight
    return DensityMatrix(povm.n, post), diag_weight / povm.norm_const


def sample_outcome(povm: CutPovm, state, rng: np.random.Generator) -> MeasurementOutcome:
    """Draw one measurement outcome with its exact Born probability.

    Pivot sampling: draw index j with probability weight_j, then complete
    the subset with M-1 uniform partners among the other N-1 indices
    (implemented by ranking random keys, with the pivot's key forced
    smallest).  Runs in O(N) per draw for any subset count.
    """
    n, m = povm.n, povm.m
    if _system_dim(state) != n:
        raise ValueError(f"state dimension {_system_dim(state)} != povm n={n}")
    if m == n:
        subset = SubsetIndex(tuple(range(n)))
        probability = outcome_probability(povm, subset, state)
    else:
        w = _weights(state)
        total = float(w.sum())
        if total <= 0.0:
            raise ValueError("state has no weight to measure")
        edges = np.cumsum(w)
        pivot = int(np.searchsorted(edges, rng.random() * total, side="right"))
        pivot = min(pivot, n - 1)
        keys = rng.random(n)
        keys[pivot] = -1.0
        chosen = np.sort(np.argpartition(keys, m - 1)[:m])
        subset = SubsetIndex(tuple(int(i) for i in chosen))
        probability = float(w[chosen].sum()) / povm.norm_const
    if isinstance(state, PureState):
        post, fidelity = project_pure(povm, subset, state)
    elif isinstance(state, BipartitePureState):
        post, fidelity = project_bipartite(povm, subset, state)
    else:
        post, probability = apply_cut_density(povm, subset, state)
        fidelity = min(povm.norm_const * probability, 1.0)
    if abs(fidelity - povm.norm_const * probability) > _FIDELITY_IDENTITY_ATOL:
        raise AssertionError("shot fidelity violates norm_const * probability")
    return MeasurementOutcome(subset, probability, post, fidelity)


def _max_completeness_deviation(n: int, m: int, norm, cap: int):
    counts = [0] * n
    if math.comb(n, m) > cap:
        raise ValueError(f"{math.comb(n, m)} subsets exceed the enumeration cap {cap}")
    for combo in itertools.combinations(range(n), m):
        for j in combo:
            counts[j] += 1
    if isinstance(norm, int):
        return max(abs(Fraction(c, norm) - 1) for c in counts)
    return max(abs(c / norm - 1.0) for c in counts)


def completeness_check(povm: CutPovm, cap: int = ENUMERATION_CAP) -> float:
    """Max deviation of the summed POVM elements from the identity.

    The sum is diagonal, so the deviation is the worst diagonal entry,
    computed in exact rational arithmetic over an explicit enumeration.
    """
    return float(_max_completeness_deviation(povm.n, povm.m, povm.norm_const, cap))
