"""Restricted isometry constants, certified or sampled.

The order-s constant of a matrix is the largest spectral deviation of a
size-s column Gram block from the identity:

    delta_s = max over supports S, |S| = s, of  || phi_S^T phi_S - I ||_2.

``exact_ric`` certifies it by enumerating every support (restricting to
|S| = s suffices: any smaller block is a principal submatrix of a size-s
block, whose deviation dominates).  ``sampled_ric_lower_bound`` scans a
random subset of supports and therefore never exceeds the exact value.

Values above 1 are reported as-is: they simply mean the matrix has no
restricted isometry at that order (some block is singular or worse).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector, spectral_norm_symmetric
from .seeding import derive_seed
from .supports import SupportSet

DEFAULT_ENUMERATION_BUDGET = 10_000_000

# Supports per batched eigenvalue call in the enumeration loop.
_CHUNK = 4096

# Absolute-relative slack for the isometry sandwich test at the boundary.
SANDWICH_SLACK = 1e-12


class EnumerationBudgetError(ValueError):
    """Exhaustive certification would exceed the enumeration budget."""

    def __init__(self, needed: int, budget: int):
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"exact certification needs {needed} support evaluations, over the "
            f"budget of {budget}; use sampled_ric_lower_bound for a lower bound"
        )


@dataclass(frozen=True)
class RicEstimate:
    """A certified ('exact') or sampled ('lower-bound') constant of order s.

    ``witness`` is a support attaining ``value``; for exact mode the witness
    is the lexicographically smallest maximizer and ``supports_examined``
    equals the full count C(N, s).
    """

    s: int
    value: float
    mode: str
    witness: SupportSet
    supports_examined: int

    @property
    def rip_holds(self) -> bool:
        """Whether the matrix has a restricted isometry at this order."""
        return self.value < 1.0


def _gram_deviations(gram: np.ndarray, combos: np.ndarray) -> np.ndarray:
    """Batched || G[S, S] - I ||_2 for each row S of ``combos``."""
    s = combos.shape[1]
    blocks = gram[combos[:, :, None], combos[:, None, :]] - np.eye(s)
    return np.abs(np.linalg.eigvalsh(blocks)).max(axis=1)


def exact_ric(
    phi: np.ndarray,
    s: int,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> RicEstimate:
    """Certify the order-s constant by exhaustive support enumeration.

    Supports are visited in lexicographic order and the maximum is updated
    on strict improvement only, so among exactly tied maximizers the
    reported witness is the lexicographically smallest.
    """
    phi = as_matrix(phi)
    n = phi.shape[1]
    if not (1 <= s <= n):
        raise ValueError(f"order s={s} out of range for {n} columns")
    total = math.comb(n, s)
    if total > budget:
        raise EnumerationBudgetError(total, budget)

    gram = phi.T @ phi
    best = -np.inf
    witness: tuple[int, ...] = tuple(range(s))
    combo_iter = itertools.combinations(range(n), s)
    while True:
        chunk = list(itertools.islice(combo_iter, _CHUNK))
        if not chunk:
            break
        combos = np.asarray(chunk, dtype=np.intp)
        values = _gram_deviations(gram, combos)
        i = int(np.argmax(values))
        if values[i] > best:
            best = float(values[i])
            witness = chunk[i]
    return RicEstimate(
        s=s,
        value=best,
        mode="exact",
        witness=SupportSet(witness, n),
        supports_examined=total,
    )


def sampled_ric_lower_bound(
    phi: np.ndarray,
    s: int,
    trials: int,
    seed: int,
) -> RicEstimate:
    """Lower-bound the order-s constant from ``trials`` random supports.

    Each trial draws its support from a sub-seed derived from
    (seed, trial index), so results do not depend on evaluation order.
    """
    phi = as_matrix(phi)
    n = phi.shape[1]
    if not (1 <= s <= n):
        raise ValueError(f"order s={s} out of range for {n} columns")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")

    gram = phi.T @ phi
    best = -np.inf
    witness: tuple[int, ...] = tuple(range(s))
    for trial in range(trials):
        rng = np.random.Generator(np.random.PCG64(derive_seed(seed, trial)))
        support = tuple(int(i) for i in np.sort(rng.choice(n, size=s, replace=False)))
        value = spectral_norm_symmetric(
            gram[np.ix_(support, support)] - np.eye(s)
        )
        if value > best:
            best = value
            witness = support
    return RicEstimate(
        s=s,
        value=best,
        mode="lower-bound",
        witness=SupportSet(witness, n),
        supports_examined=trials,
    )


def rip_sandwich_check(phi: np.ndarray, x: np.ndarray, delta: float) -> bool:
    """Test (1-delta)||x||^2 <= ||phi x||^2 <= (1+delta)||x||^2 for this x.

    A relative slack of 1e-12 keeps the test honest under floating point
    when x sits exactly on the boundary.
    """
    phi = as_matrix(phi)
    x = as_vector(x)
    if x.shape[0] != phi.shape[1]:
        raise ValueError(f"vector dim {x.shape[0]} != matrix columns {phi.shape[1]}")
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    n2 = float(x @ x)
    p2 = float(np.linalg.norm(phi @ x) ** 2)
    slack = SANDWICH_SLACK * n2
    return (1.0 - delta) * n2 <= p2 + slack and p2 <= (1.0 + delta) * n2 + slack
