"""Thresholding greedy algorithm on coefficient vectors.

A greedy set of order m for v is any m-element index set whose smallest
coefficient modulus dominates every modulus outside the set.  Ties make
greedy sets non-unique; :func:`greedy_sets` enumerates all of them, and
:func:`tga_run` resolves ties canonically by preferring smaller indices,
which yields the lexicographically smallest greedy set at every order.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Sequence

import numpy as np

from .core import Space, as_vector, project

__all__ = [
    "greedy_sets",
    "is_greedy_set",
    "greedy_sum",
    "tga_run",
    "truncate",
    "TraceStep",
    "GreedyTrace",
]


def is_greedy_set(v: Sequence[float] | np.ndarray, A: Sequence[int]) -> bool:
    """True when min_{n in A} |v_n| >= max_{n not in A} |v_n|."""
    v = as_vector(v)
    A = tuple(sorted(int(i) for i in A))
    for i in A:
        if i < 1 or i > v.size:
            return False
    if len(set(A)) != len(A):
        return False
    mods = np.abs(v)
    inside = [mods[i - 1] for i in A]
    outside = [mods[i] for i in range(v.size) if (i + 1) not in set(A)]
    lo = min(inside) if inside else np.inf
    hi = max(outside) if outside else -np.inf
    return bool(lo >= hi)


def greedy_sets(v: Sequence[float] | np.ndarray, m: int) -> list[tuple[int, ...]]:
    """All greedy sets of order m, sorted lexicographically.

    For the zero vector every m-element subset qualifies.  The unique
    order-0 greedy set is the empty set.
    """
    v = as_vector(v)
    m = int(m)
    if m < 0 or m > v.size:
        raise ValueError(f"greedy order {m} out of range 0..{v.size}")
    if m == 0:
        return [()]
    mods = np.abs(v)
    # Threshold value: the m-th largest modulus.  Indices strictly above it
    # are mandatory; the remaining slots are filled from the tie class.
    order = np.argsort(-mods, kind="stable")
    threshold = mods[order[m - 1]]
    mandatory = [int(i) + 1 for i in np.flatnonzero(mods > threshold)]
    ties = [int(i) + 1 for i in np.flatnonzero(mods == threshold)]
    slots = m - len(mandatory)
    out = [tuple(sorted(mandatory + list(combo))) for combo in itertools.combinations(ties, slots)]
    return sorted(out)


def greedy_sum(v: Sequence[float] | np.ndarray, A: Sequence[int]) -> np.ndarray:
    """Projection onto A, requiring A to be a greedy set of order |A|."""
    v = as_vector(v)
    if not is_greedy_set(v, A):
        raise ValueError(f"{tuple(A)} is not a greedy set for this vector")
    return project(v, A)


@dataclasses.dataclass(frozen=True)
class TraceStep:
    m: int
    index_set: tuple[int, ...]
    threshold: float | None
    residual_norm: float

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "set": list(self.index_set),
            "threshold": self.threshold,
            "residual_norm": self.residual_norm,
        }


@dataclasses.dataclass(frozen=True)
class GreedyTrace:
    input: tuple[float, ...]
    space: dict
    steps: tuple[TraceStep, ...]

    def to_dict(self) -> dict:
        return {
            "input": list(self.input),
            "space": self.space,
            "steps": [s.to_dict() for s in self.steps],
        }

    def csv_rows(self) -> list[tuple[int, float]]:
        return [(s.m, s.residual_norm) for s in self.steps]


def tga_run(space: Space, v: Sequence[float] | np.ndarray, M: int | None = None) -> GreedyTrace:
    """Run the thresholding greedy algorithm for M steps (default: dim).

    Step m records the canonical order-m greedy set (ties resolved toward
    smaller indices), its threshold min_{n in A} |v_n| (None at m = 0) and
    the residual norm of v minus the greedy sum.  At m = dim the residual
    is zero.
    """
    v = as_vector(v, space.dim)
    if M is None:
        M = space.dim
    M = int(M)
    if M < 0 or M > space.dim:
        raise ValueError(f"step count {M} out of range 0..{space.dim}")
    mods = np.abs(v)
    # Sorting by (-modulus, index) makes every prefix the lexicographically
    # smallest greedy set of its order.
    order = sorted(range(v.size), key=lambda i: (-mods[i], i))
    residual_rows = np.empty((M + 1, space.dim))
    sets: list[tuple[int, ...]] = []
    thresholds: list[float | None] = []
    for m in range(M + 1):
        chosen = sorted(order[:m])
        mask = np.zeros(space.dim)
        for i in chosen:
            mask[i] = 1.0
        residual_rows[m] = v * (1.0 - mask)
        sets.append(tuple(i + 1 for i in chosen))
        thresholds.append(float(min(mods[i] for i in chosen)) if m > 0 else None)
    norms = space.norm_rows(residual_rows)
    steps = tuple(
        TraceStep(m=m, index_set=sets[m], threshold=thresholds[m], residual_norm=float(norms[m]))
        for m in range(M + 1)
    )
    return GreedyTrace(input=tuple(float(x) for x in v), space=space.spec.to_dict(), steps=steps)


def truncate(v: Sequence[float] | np.ndarray, alpha: float) -> np.ndarray:
    """Clip every coefficient with modulus above alpha to alpha times its sign.

    Entries with |v_n| <= alpha are unchanged, so the support is preserved
    and truncation commutes with sign flips.  alpha must be positive.
    """
    v = as_vector(v)
    alpha = float(alpha)
    if not alpha > 0.0:
        raise ValueError(f"truncation level must be positive, got {alpha}")
    clipped = np.where(np.abs(v) > alpha, alpha * np.sign(v), v)
    return clipped
