"""Coefficient-space model of a finite semi-normalized basis.

Conventions used across the package:

* a coefficient vector is a plain 1-D ``numpy`` array of finite floats,
  entry ``v[i]`` holding the coefficient of basis element ``i + 1``;
* an index set is a strictly increasing tuple of 1-based indices;
* a sign pattern is a tuple of ``+1`` / ``-1`` ints aligned with the
  sorted indices of the set it decorates;
* a :class:`Space` couples a dimension with a norm evaluator and is the
  only object that ever computes norms.

All user-visible I/O (JSON, CSV, CLI) is 1-based.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "as_vector",
    "coeff_sup",
    "support",
    "index_set",
    "sign_pattern",
    "project",
    "partial_sum",
    "indicator",
    "Space",
    "SpaceCheck",
    "SpaceValidation",
    "validate_space",
]


def as_vector(entries: Sequence[float] | np.ndarray, dim: int | None = None) -> np.ndarray:
    """Validate and normalize a coefficient vector to a float64 array.

    Rejects non-finite entries, empty vectors and, when ``dim`` is given,
    any length mismatch.
    """
    v = np.asarray(entries, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"coefficient vector must be 1-D, got shape {v.shape}")
    if v.size == 0:
        raise ValueError("coefficient vector must have at least one entry")
    if not np.all(np.isfinite(v)):
        raise ValueError("coefficient vector entries must be finite")
    if dim is not None and v.size != dim:
        raise ValueError(f"expected dimension {dim}, got vector of length {v.size}")
    return v


def coeff_sup(v: Sequence[float] | np.ndarray) -> float:
    """Largest coefficient modulus, 0.0 for the zero vector."""
    v = as_vector(v)
    return float(np.max(np.abs(v)))


def support(v: Sequence[float] | np.ndarray) -> tuple[int, ...]:
    """1-based indices of the nonzero entries, increasing."""
    v = as_vector(v)
    return tuple(int(i) + 1 for i in np.flatnonzero(v))


def index_set(indices: Iterable[int], dim: int) -> tuple[int, ...]:
    """Normalize an iterable of 1-based indices to a sorted tuple.

    Duplicates and out-of-range indices are rejected.
    """
    idx = [int(i) for i in indices]
    out = tuple(sorted(idx))
    for i in out:
        if i < 1 or i > dim:
            raise ValueError(f"index {i} out of range 1..{dim}")
    if len(set(out)) != len(out):
        raise ValueError(f"duplicate indices in {idx}")
    return out


def sign_pattern(signs: Sequence[int] | Mapping[int, int] | None, A: tuple[int, ...]) -> tuple[int, ...]:
    """Normalize a sign assignment for the index set ``A``.

    Accepts a sequence aligned with sorted ``A``, a mapping from index to
    sign, or ``None`` for all ``+1``.  The domain must equal ``A``.
    """
    if signs is None:
        return (1,) * len(A)
    if isinstance(signs, Mapping):
        if set(signs.keys()) != set(A):
            raise ValueError(f"sign pattern domain {sorted(signs)} does not match set {list(A)}")
        seq = [signs[i] for i in A]
    else:
        seq = list(signs)
        if len(seq) != len(A):
            raise ValueError(f"sign pattern length {len(seq)} does not match set size {len(A)}")
    out = []
    for s in seq:
        f = float(s)
        if f not in (1.0, -1.0):
            raise ValueError(f"signs must be +1 or -1, got {s}")
        out.append(int(f))
    return tuple(out)


def project(v: Sequence[float] | np.ndarray, A: Iterable[int]) -> np.ndarray:
    """Coordinate projection onto the 1-based index set ``A``."""
    v = as_vector(v)
    A = index_set(A, v.size)
    out = np.zeros_like(v)
    for i in A:
        out[i - 1] = v[i - 1]
    return out


def partial_sum(v: Sequence[float] | np.ndarray, k: int) -> np.ndarray:
    """Projection onto the first ``k`` coordinates, ``k = 0`` giving zero."""
    v = as_vector(v)
    k = int(k)
    if k < 0 or k > v.size:
        raise ValueError(f"partial sum order {k} out of range 0..{v.size}")
    out = np.zeros_like(v)
    out[:k] = v[:k]
    return out


def indicator(A: Iterable[int], signs: Sequence[int] | Mapping[int, int] | None, dim: int) -> np.ndarray:
    """Signed indicator vector of ``A`` inside dimension ``dim``."""
    A = index_set(A, dim)
    eps = sign_pattern(signs, A)
    out = np.zeros(dim, dtype=float)
    for i, s in zip(A, eps):
        out[i - 1] = float(s)
    return out


class Space:
    """A dimension plus a norm, with optional analytic metadata.

    ``rows_fn`` evaluates norms of the rows of a 2-D array in one call;
    scalar ``norm`` is derived from it.  ``analytic`` maps constant kind
    tokens (for example ``"cq"``, ``"dd"``) to exactly known values for
    this space.  Instances are immutable in use: nothing in the package
    mutates a space after construction.
    """

    def __init__(
        self,
        spec,
        rows_fn: Callable[[np.ndarray], np.ndarray],
        analytic: Mapping[str, float] | None = None,
        unconditional: bool = False,
        name: str | None = None,
    ):
        self.spec = spec
        self.dim = int(spec.dim)
        if self.dim < 1:
            raise ValueError("space dimension must be >= 1")
        self._rows_fn = rows_fn
        self.analytic = dict(analytic or {})
        self.unconditional = bool(unconditional)
        self.name = name or getattr(spec, "kind", "space")
        e_norms = self.norm_rows(np.eye(self.dim))
        if np.any(e_norms <= 0.0):
            raise ValueError("every basis element must have positive norm")
        self.element_norms = tuple(float(x) for x in e_norms)
        self.c1 = float(min(self.element_norms))
        self.c2 = float(max(self.element_norms))

    def norm(self, v: Sequence[float] | np.ndarray) -> float:
        v = as_vector(v, self.dim)
        return float(self._rows_fn(v[None, :])[0])

    def norm_rows(self, rows: np.ndarray) -> np.ndarray:
        """Norms of each row of a (r, dim) array."""
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != self.dim:
            raise ValueError(f"expected rows of shape (r, {self.dim}), got {rows.shape}")
        out = np.asarray(self._rows_fn(rows), dtype=float)
        if out.shape != (rows.shape[0],):
            raise ValueError("norm evaluator returned a malformed result")
        return out

    def __repr__(self):
        return f"Space({self.name}, dim={self.dim})"


@dataclasses.dataclass(frozen=True)
class SpaceCheck:
    name: str
    ok: bool
    detail: str

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class SpaceValidation:
    ok: bool
    checks: tuple[SpaceCheck, ...]
    element_norms: tuple[float, ...]
    c1: float
    c2: float
    dual_lower_bounds: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
            "element_norms": list(self.element_norms),
            "c1": self.c1,
            "c2": self.c2,
            "dual_lower_bounds": list(self.dual_lower_bounds),
        }


def validate_space(space: Space, cfg=None, samples: int = 64, seed: int = 0) -> SpaceValidation:
    """Spot-check the norm axioms and semi-normalization of a space.

    Homogeneity, the triangle inequality, definiteness and the basis
    norm range are tested on seeded random vectors; failures are reported
    rather than raised so that a broken custom norm can be inspected.
    ``cfg`` may supply ``samples`` and ``seed`` attributes.
    """
    if cfg is not None:
        samples = int(getattr(cfg, "samples", samples))
        seed = int(getattr(cfg, "seed", seed))
    rng = np.random.default_rng(seed)
    n = space.dim
    vecs = rng.standard_normal((max(4, samples), n))
    vecs[0] = 0.0
    vecs[1] = 1.0
    vecs[2] = -1.0
    checks: list[SpaceCheck] = []

    norms = space.norm_rows(vecs)
    scale = float(np.max(np.abs(norms))) or 1.0
    tol = 1e-9 * max(scale, 1.0)

    zero_ok = abs(float(norms[0])) <= tol
    checks.append(SpaceCheck("zero_vector", zero_ok, f"norm(0) = {norms[0]!r}"))

    nonzero = vecs[3:]
    nz_norms = norms[3:]
    pos_bad = int(np.sum(nz_norms <= 0.0))
    checks.append(
        SpaceCheck("positivity", pos_bad == 0, f"{pos_bad} sampled nonzero vectors with norm <= 0")
    )

    ts = rng.uniform(-3.0, 3.0, size=nonzero.shape[0])
    scaled = space.norm_rows(nonzero * ts[:, None])
    hom_err = float(np.max(np.abs(scaled - np.abs(ts) * nz_norms))) if nonzero.size else 0.0
    checks.append(SpaceCheck("homogeneity", hom_err <= tol, f"max |norm(t v) - |t| norm(v)| = {hom_err:.3e}"))

    u = vecs[rng.integers(0, vecs.shape[0], size=vecs.shape[0])]
    tri = space.norm_rows(vecs + u) - (norms + space.norm_rows(u))
    tri_err = float(np.max(tri))
    checks.append(SpaceCheck("triangle", tri_err <= tol, f"max norm(u+v) - norm(u) - norm(v) = {tri_err:.3e}"))

    declared = (space.c1, space.c2)
    rng_ok = all(declared[0] - tol <= e <= declared[1] + tol for e in space.element_norms)
    checks.append(
        SpaceCheck(
            "semi_normalization",
            rng_ok and declared[0] > 0,
            f"basis norms in [{min(space.element_norms):.6g}, {max(space.element_norms):.6g}]",
        )
    )

    # Grid lower bound for each coordinate functional norm: sup |v_n| / norm(v)
    # over the sampled vectors.  Exact duals are not computed for custom norms.
    safe = np.where(norms > 0, norms, np.inf)
    dual_lb = np.max(np.abs(vecs) / safe[:, None], axis=0)
    ok = all(c.ok for c in checks)
    return SpaceValidation(
        ok=ok,
        checks=tuple(checks),
        element_norms=space.element_norms,
        c1=space.c1,
        c2=space.c2,
        dual_lower_bounds=tuple(float(x) for x in dual_lb),
    )
