"""Subspace Pursuit and CoSaMP with full per-iteration instrumentation.

Both algorithms start from a zero estimate and an empty support and repeat:

1. identification - pick the largest-magnitude entries of the correlation
   ``phi^T (y - phi x)`` (s of them for SP, 2s for CoSaMP) and merge their
   indices into the previous support,
2. debiasing - least squares restricted to the merged support,
3. pruning - keep the s largest-magnitude entries of the debiased vector;
   SP then re-solves least squares on the pruned support while CoSaMP
   keeps the truncation as-is,

until the residual criterion fires or ``n_max`` iterations have run.
Top-k selections break magnitude ties toward the smaller index, so runs
are deterministic.

``audit_iteration`` re-measures, on an instrumented run, every
per-iteration inequality that is provable from a certified isometry
constant; with a certified constant below the algorithm's threshold a
reported violation means a bug, not bad luck.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import COSAMP, SP, bounds_for
from .linalg import SingularSupportError, as_matrix, as_vector, least_squares_on_support
from .ric import RicEstimate
from .signals import SparseInstance, best_s_term, restrict, top_k_magnitude
from .supports import SupportSet

TRACE_LEVELS = ("none", "norms", "full")

# Relative slack when comparing measured lhs <= rhs on proved inequalities;
# keeps exact-arithmetic theorems from "failing" by one ulp of solver noise.
AUDIT_SLACK = 1e-10


@dataclass(frozen=True)
class StoppingRule:
    """Residual-based stopping with an iteration cap.

    If the perturbation norm ||e'|| is known, pass it as
    ``e_prime_norm_hint`` and the run stops once the residual drops to
    ``epsilon`` times it.  A hint of 0 means unknown; the absolute
    fallback threshold ``epsilon_abs`` is used instead.
    """

    epsilon: float = 1.0
    n_max: int = 100
    e_prime_norm_hint: float = 0.0
    epsilon_abs: float = 1e-10

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if min(self.epsilon, self.e_prime_norm_hint, self.epsilon_abs) < 0:
            raise ValueError("stopping-rule fields must be >= 0")

    @property
    def residual_threshold(self) -> float:
        if self.e_prime_norm_hint > 0:
            return self.epsilon * self.e_prime_norm_hint
        return self.epsilon_abs


@dataclass(frozen=True)
class IterationRecord:
    """State captured at the end of one iteration.

    Vector fields are retained only in full-trace mode (automatic whenever
    ground truth is supplied); ``signal_error`` and ``tail_energy`` are the
    distances ||x_s - x^n|| and ||x_s outside the pruned support|| and are
    present only with ground truth.
    """

    n: int
    delta_support: SupportSet
    merged_support: SupportSet
    pruned_support: SupportSet
    residual_norm: float
    intermediate: np.ndarray | None = None
    estimate: np.ndarray | None = None
    signal_error: float | None = None
    tail_energy: float | None = None


@dataclass(frozen=True)
class RecoveryResult:
    estimate: np.ndarray
    support: SupportSet
    iterations: list[IterationRecord] = field(default_factory=list)
    converged: bool = False
    algorithm: str = SP

    @property
    def residual_history(self) -> list[float]:
        return [rec.residual_norm for rec in self.iterations]


@dataclass(frozen=True)
class InequalityCheck:
    """One measured inequality: ``holds`` iff lhs <= rhs (+ float slack)."""

    name: str
    lhs: float
    rhs: float
    holds: bool


def _run(
    algorithm: str,
    phi: np.ndarray,
    y: np.ndarray,
    s: int,
    stop: StoppingRule,
    truth: np.ndarray | None,
    trace: str,
) -> RecoveryResult:
    phi = as_matrix(phi)
    y = as_vector(y)
    m, n = phi.shape
    if y.shape[0] != m:
        raise ValueError(f"measurement length {y.shape[0]} != matrix rows {m}")
    pick = s if algorithm == SP else 2 * s
    merged_cap = 2 * s if algorithm == SP else 3 * s
    if not 1 <= s <= n:
        raise ValueError(f"sparsity s={s} out of range for {n} columns")
    if merged_cap > m:
        raise ValueError(
            f"{algorithm} needs {merged_cap} <= m for full-rank least squares, "
            f"got s={s}, m={m}"
        )
    if trace not in TRACE_LEVELS:
        raise ValueError(f"trace must be one of {TRACE_LEVELS}, got {trace!r}")

    x_s = None
    if truth is not None:
        truth = as_vector(truth)
        if truth.shape[0] != n:
            raise ValueError(f"truth dim {truth.shape[0]} != matrix columns {n}")
        _, x_s = best_s_term(truth, s)
        trace = "full"
    keep_vectors = trace == "full"

    estimate = np.zeros(n)
    support = SupportSet.empty(n)
    records: list[IterationRecord] = []
    converged = False
    threshold = stop.residual_threshold

    for it in range(1, stop.n_max + 1):
        proxy = phi.T @ (y - phi @ estimate)
        delta_support = top_k_magnitude(proxy, pick)
        merged = support.union(delta_support)
        try:
            intermediate = least_squares_on_support(phi, y, merged)
        except SingularSupportError as err:
            raise SingularSupportError(err.support, iteration=it) from err
        support = top_k_magnitude(intermediate, s)
        if algorithm == SP:
            try:
                estimate = least_squares_on_support(phi, y, support)
            except SingularSupportError as err:
                raise SingularSupportError(err.support, iteration=it) from err
        else:
            estimate = restrict(intermediate, support)
        residual_norm = float(np.linalg.norm(y - phi @ estimate))

        records.append(
            IterationRecord(
                n=it,
                delta_support=delta_support,
                merged_support=merged,
                pruned_support=support,
                residual_norm=residual_norm,
                intermediate=intermediate if keep_vectors else None,
                estimate=estimate.copy() if keep_vectors else None,
                signal_error=float(np.linalg.norm(x_s - estimate)) if x_s is not None else None,
                tail_energy=float(np.linalg.norm(restrict(x_s, support.complement())))
                if x_s is not None
                else None,
            )
        )
        if residual_norm <= threshold:
            converged = True
            break

    return RecoveryResult(
        estimate=estimate,
        support=support,
        iterations=records,
        converged=converged,
        algorithm=algorithm,
    )


def subspace_pursuit(
    phi: np.ndarray,
    y: np.ndarray,
    s: int,
    stop: StoppingRule | None = None,
    truth: np.ndarray | None = None,
    trace: str = "norms",
) -> RecoveryResult:
    """Recover an s-sparse estimate of y = phi x by subspace pursuit.

    Adds s candidates per iteration and solves two restricted least-squares
    problems (after merging and after pruning).  A rank-deficient block
    raises ``SingularSupportError`` carrying the iteration and support; it
    is never silently regularized.
    """
    return _run(SP, phi, y, s, stop or StoppingRule(), truth, trace)


def cosamp(
    phi: np.ndarray,
    y: np.ndarray,
    s: int,
    stop: StoppingRule | None = None,
    truth: np.ndarray | None = None,
    trace: str = "norms",
) -> RecoveryResult:
    """Recover an s-sparse estimate by compressive sampling matching pursuit.

    Adds 2s candidates per iteration, solves one restricted least-squares
    problem, and prunes by plain truncation to the s largest entries.
    """
    return _run(COSAMP, phi, y, s, stop or StoppingRule(), truth, trace)


def _restricted_norm(v: np.ndarray, t: SupportSet) -> float:
    return float(np.linalg.norm(v[t.as_array()])) if len(t) else 0.0


def audit_iteration(
    record: IterationRecord,
    prev: IterationRecord | None,
    instance: SparseInstance,
    delta: RicEstimate,
    algorithm: str,
) -> list[InequalityCheck]:
    """Measure every provable inequality at one iteration of a traced run.

    ``delta`` must be an exactly certified constant of order >= 3s (SP) or
    4s (CoSaMP); ``prev`` is the previous iteration's record, or None for
    the first iteration (zero estimate).  The run must have been made with
    ground truth so vectors and error norms are on the records.

    Returned checks:

    * ``identification``   - energy of x_s missed by the merged support,
    * ``debiasing``        - error of the restricted least-squares solution
                             on the merged support,
    * ``metric-relation``  - signal error against tail energy (needs the
                             certified constant < 1),
    * ``pruning``          - x_s energy dropped by pruning,
    * ``contraction``      - one-step decrease of the signal error (needs
                             a contracting rate, i.e. delta below the
                             algorithm's threshold),
    * ``orthogonality-merged`` / ``orthogonality-pruned`` - residual
      correlation left on the solved support (the pruned check applies to
      SP only, whose last step is a least-squares solve).

    Comparisons allow a relative slack of 1e-10 so machine-precision ties
    do not read as violations of exact-arithmetic theorems.
    """
    if algorithm not in (SP, COSAMP):
        raise ValueError(f"algorithm must be {SP!r} or {COSAMP!r}, got {algorithm!r}")
    if record.intermediate is None or record.estimate is None:
        raise ValueError("audit needs a full trace (run with ground truth)")
    if prev is not None and prev.estimate is None:
        raise ValueError("audit needs a full trace for the previous iteration")
    order = 3 * instance.s if algorithm == SP else 4 * instance.s
    if delta.mode != "exact":
        raise ValueError("audit requires an exactly certified constant")
    if delta.s < order:
        raise ValueError(
            f"certified order {delta.s} too small: {algorithm} with s={instance.s} "
            f"needs order >= {order}"
        )

    phi, y = instance.phi, instance.y
    n = phi.shape[1]
    x_s = restrict(instance.x, instance.s_support)
    e_norm = instance.e_prime_norm
    d = delta.value
    prev_estimate = prev.estimate if prev is not None else np.zeros(n)
    prev_error = float(np.linalg.norm(x_s - prev_estimate))

    slack = AUDIT_SLACK * max(1.0, float(np.linalg.norm(x_s)))
    checks: list[InequalityCheck] = []

    def add(name: str, lhs: float, rhs: float) -> None:
        checks.append(InequalityCheck(name, lhs, rhs, lhs <= rhs + slack))

    merged = record.merged_support
    dropped = merged.difference(record.pruned_support)
    mid_error = float(np.linalg.norm(x_s - record.intermediate))
    end_error = float(np.linalg.norm(x_s - record.estimate))

    add(
        "identification",
        float(np.linalg.norm(restrict(x_s, merged.complement()))),
        np.sqrt(2.0) * d * prev_error + np.sqrt(2.0 * (1.0 + d)) * e_norm,
    )
    add(
        "debiasing",
        _restricted_norm(x_s - record.intermediate, merged),
        d * mid_error + np.sqrt(1.0 + d) * e_norm,
    )
    if d < 1.0:
        add(
            "metric-relation",
            mid_error,
            np.sqrt(1.0 / (1.0 - d * d))
            * float(np.linalg.norm(restrict(x_s, merged.complement())))
            + np.sqrt(1.0 + d) / (1.0 - d) * e_norm,
        )
    add(
        "pruning",
        _restricted_norm(x_s, dropped),
        np.sqrt(2.0) * d * mid_error + np.sqrt(2.0 * (1.0 + d)) * e_norm,
    )
    report = bounds_for(algorithm, d) if d < 1.0 else None
    if report is not None and report.valid:
        add(
            "contraction",
            end_error,
            report.rho * prev_error + (1.0 - report.rho) * report.tau * e_norm,
        )

    # Residual-correlation checks: exact zeros in exact arithmetic, so the
    # ceiling is pure float noise scaled by the problem.
    ortho_scale = AUDIT_SLACK * float(np.linalg.norm(phi, 2)) * float(np.linalg.norm(y))
    mid_corr = phi.T @ (y - phi @ record.intermediate)
    add("orthogonality-merged", float(np.abs(mid_corr[merged.as_array()]).max()), ortho_scale)
    if algorithm == SP:
        end_corr = phi.T @ (y - phi @ record.estimate)
        add(
            "orthogonality-pruned",
            float(np.abs(end_corr[record.pruned_support.as_array()]).max()),
            ortho_scale,
        )
    return checks


def audit_run(
    result: RecoveryResult,
    instance: SparseInstance,
    delta: RicEstimate,
) -> list[tuple[int, InequalityCheck]]:
    """Audit every iteration of a traced run; returns (iteration, check) pairs."""
    out: list[tuple[int, InequalityCheck]] = []
    prev: IterationRecord | None = None
    for record in result.iterations:
        for check in audit_iteration(record, prev, instance, delta, result.algorithm):
            out.append((record.n, check))
        prev = record
    return out
