"""Catalog of concrete sequence-space norms.

Available kinds:

* ``lp``                    (sum |v|^p)^(1/p), max |v| for p = inf
* ``weighted_l1``           sum w_n |v_n|
* ``weighted_lp``           (sum w_n |v_n|^p)^(1/p), max w_n |v_n| for p = inf
* ``direct_sum``            max of summand norms over round-robin index classes
* ``lindenstrauss_l1``      l1 norm in the dyadic-cascade coordinates
                            c_1 = a_1, c_k = a_k - a_{floor(k/2)} / 2,
                            children with index beyond the dimension dropped
* ``custom_weights_file``   weighted_l1 with weights read from a text file,
                            one positive decimal per line

Every kind except ``lindenstrauss_l1`` has a coordinatewise-monotone norm,
so those spaces carry analytic quasi-greedy and unconditionality constants
equal to 1.  The lp kind is fully symmetric (norms depend only on the
multiset of moduli), which pins all its greedy-type constants at 1; a
nondecreasing weighted_l1 additionally has exact democracy-type values
(largest over smallest weight, conservative variants equal to 1, and
partially-greedy constant 1, since prefix projections only ever drop
cheaper coordinates than the greedy set keeps).
"""

from __future__ import annotations

import dataclasses
import functools
import json
import math
import os
from typing import Sequence

import numpy as np

from .core import Space

__all__ = [
    "SpaceSpec",
    "make_space",
    "lindenstrauss_norm",
    "direct_sum_spec",
    "space_from_dict",
    "catalog_entries",
    "KINDS",
]

KINDS = (
    "lp",
    "weighted_l1",
    "weighted_lp",
    "direct_sum",
    "lindenstrauss_l1",
    "custom_weights_file",
)

# Constant kind tokens shared with greedykit.constants; duplicated here as
# plain strings to keep the catalog import-free of the search machinery.
_ALL_CONSTANT_TOKENS = (
    "cq", "k", "cg", "cal", "cp",
    "dd", "dc", "ds", "dsc",
    "slc", "pslc",
    "f", "fp", "fstar", "fpstar", "q", "c1", "c2",
)


@dataclasses.dataclass(frozen=True)
class SpaceSpec:
    """Serializable description of a catalog space.

    ``p`` uses ``math.inf`` for the sup-norm case and serializes as the
    string ``"inf"``.  ``weights`` rides along even for kinds that ignore
    it; ``summands`` is a tuple of nested specs whose dims partition the
    ambient dimension by round-robin interleaving (summand j of k owns the
    1-based indices j+1, j+1+k, j+1+2k, ...).
    """

    kind: str
    dim: int
    p: float | None = None
    weights: tuple[float, ...] | None = None
    summands: tuple["SpaceSpec", ...] | None = None
    path: str | None = None

    def __post_init__(self) -> None:
        # Accept "2", 2, 2.0 or "inf" for p; store a float.
        object.__setattr__(self, "p", _parse_p(self.p))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "dim": self.dim}
        if self.p is not None:
            out["p"] = "inf" if math.isinf(self.p) else self.p
        if self.weights is not None:
            out["weights"] = list(self.weights)
        if self.summands is not None:
            out["summands"] = [s.to_dict() for s in self.summands]
        if self.path is not None:
            out["path"] = self.path
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(data: dict) -> "SpaceSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise ValueError("space spec must be an object with a 'kind' field")
        kind = data["kind"]
        dim = int(data.get("dim", 0))
        p = _parse_p(data.get("p"))
        weights = data.get("weights")
        weights = tuple(float(w) for w in weights) if weights is not None else None
        summands = None
        if data.get("summands") is not None:
            raw = data["summands"]
            counts = _interleave_counts(dim, len(raw))
            summands = tuple(
                SpaceSpec.from_dict({**sub, "dim": sub.get("dim", counts[j])})
                for j, sub in enumerate(raw)
            )
        return SpaceSpec(
            kind=kind,
            dim=dim,
            p=p,
            weights=weights,
            summands=summands,
            path=data.get("path"),
        )

    @staticmethod
    def from_json(text: str) -> "SpaceSpec":
        return SpaceSpec.from_dict(json.loads(text))


def _parse_p(raw) -> float | None:
    if raw is None:
        return None
    if isinstance(raw, str):
        if raw.lower() in ("inf", "infinity", "oo"):
            return math.inf
        raw = float(raw)
    p = float(raw)
    if p < 1.0:
        raise ValueError(f"exponent p must satisfy p >= 1, got {p}")
    return p


def _interleave_counts(dim: int, k: int) -> tuple[int, ...]:
    """Sizes of the k round-robin index classes of {1..dim}."""
    if k < 1:
        raise ValueError("direct_sum needs at least one summand")
    return tuple(len(range(j, dim, k)) for j in range(k))


def interleave_classes(dim: int, k: int) -> tuple[tuple[int, ...], ...]:
    """1-based round-robin index classes: class j is {j+1, j+1+k, ...}."""
    return tuple(tuple(range(j + 1, dim + 1, k)) for j in range(k))


def direct_sum_spec(dim: int, parts: Sequence[tuple] ) -> SpaceSpec:
    """Build a direct_sum spec from (kind, p) or (kind, p, weights) tuples.

    Summand dims are derived from the interleaving, so callers only give
    the per-summand norm parameters.
    """
    counts = _interleave_counts(dim, len(parts))
    summands = []
    for j, part in enumerate(parts):
        kind = part[0]
        p = _parse_p(part[1]) if len(part) > 1 else None
        weights = tuple(float(w) for w in part[2]) if len(part) > 2 and part[2] is not None else None
        summands.append(SpaceSpec(kind=kind, dim=counts[j], p=p, weights=weights))
    return SpaceSpec(kind="direct_sum", dim=dim, summands=tuple(summands))


# ---------------------------------------------------------------------------
# row-norm evaluators (top-level functions so spaces pickle cleanly)

def _lp_rows(p: float, rows: np.ndarray) -> np.ndarray:
    a = np.abs(rows)
    if math.isinf(p):
        return a.max(axis=1)
    if p == 1.0:
        return a.sum(axis=1)
    if p == 2.0:
        return np.sqrt((rows * rows).sum(axis=1))
    return (a ** p).sum(axis=1) ** (1.0 / p)


def _weighted_lp_rows(weights: np.ndarray, p: float, rows: np.ndarray) -> np.ndarray:
    a = np.abs(rows)
    if math.isinf(p):
        return (a * weights).max(axis=1)
    if p == 1.0:
        return (a * weights).sum(axis=1)
    return ((a ** p) * weights).sum(axis=1) ** (1.0 / p)


def _direct_sum_rows(parts, rows: np.ndarray) -> np.ndarray:
    out = np.zeros(rows.shape[0])
    for cols, fn in parts:
        np.maximum(out, fn(rows[:, cols]), out=out)
    return out


def _lindenstrauss_rows(parents: np.ndarray, rows: np.ndarray) -> np.ndarray:
    c = rows.copy()
    if rows.shape[1] > 1:
        c[:, 1:] -= 0.5 * rows[:, parents]
    return np.abs(c).sum(axis=1)


def _lindenstrauss_parents(dim: int) -> np.ndarray:
    # 0-based parent of 0-based coordinate i >= 1 is floor((i + 1) / 2) - 1.
    return ((np.arange(1, dim) + 1) // 2) - 1


def lindenstrauss_norm(entries: Sequence[float] | np.ndarray) -> float:
    """Norm of one vector in the truncated dyadic-cascade l1 coordinates."""
    v = np.asarray(entries, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a nonempty 1-D coefficient vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("coefficient vector entries must be finite")
    return float(_lindenstrauss_rows(_lindenstrauss_parents(v.size), v[None, :])[0])


# ---------------------------------------------------------------------------
# construction

def _validate_weights(weights, dim: int) -> tuple[float, ...]:
    if weights is None:
        raise ValueError("this kind requires weights")
    w = tuple(float(x) for x in weights)
    if len(w) != dim:
        raise ValueError(f"expected {dim} weights, got {len(w)}")
    if any(not math.isfinite(x) or x <= 0.0 for x in w):
        raise ValueError("weights must be positive finite reals")
    return w


def load_weights_file(path: str) -> tuple[float, ...]:
    """Read one positive decimal per line; blank lines are rejected."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    vals = []
    for i, ln in enumerate(lines, start=1):
        if not ln:
            raise ValueError(f"{path}: line {i} is blank")
        try:
            vals.append(float(ln))
        except ValueError:
            raise ValueError(f"{path}: line {i} is not a decimal number: {ln!r}") from None
    if not vals:
        raise ValueError(f"{path}: no weights found")
    return tuple(vals)


def _weighted_l1_analytic(w: tuple[float, ...]) -> dict:
    analytic = {"cq": 1.0, "k": 1.0}
    ratio = max(w) / min(w)
    analytic["dd"] = ratio
    analytic["ds"] = ratio
    if all(w[i] <= w[i + 1] for i in range(len(w) - 1)):
        analytic["dc"] = 1.0
        analytic["dsc"] = 1.0
        analytic["cp"] = 1.0
    return analytic


def make_space(spec: SpaceSpec) -> Space:
    """Construct a Space from a spec, attaching analytic metadata.

    Raises ValueError for malformed specs (unknown kind, missing or
    nonpositive weights, dims that do not partition, p < 1).
    """
    if spec.dim < 1:
        raise ValueError("space dimension must be >= 1")
    kind = spec.kind

    if kind == "lp":
        p = _parse_p(spec.p)
        if p is None:
            raise ValueError("lp requires p")
        rows_fn = functools.partial(_lp_rows, p)
        analytic = {tok: 1.0 for tok in _ALL_CONSTANT_TOKENS}
        return Space(spec, rows_fn, analytic=analytic, unconditional=True, name=f"lp(p={spec.p}, dim={spec.dim})")

    if kind in ("weighted_l1", "custom_weights_file"):
        if kind == "custom_weights_file":
            if not spec.path:
                raise ValueError("custom_weights_file requires a path")
            weights = load_weights_file(spec.path)
            if len(weights) != spec.dim:
                raise ValueError(
                    f"{spec.path}: {len(weights)} weights but dim = {spec.dim}"
                )
        else:
            weights = _validate_weights(spec.weights, spec.dim)
        w = np.asarray(weights, dtype=float)
        rows_fn = functools.partial(_weighted_lp_rows, w, 1.0)
        return Space(
            spec,
            rows_fn,
            analytic=_weighted_l1_analytic(tuple(weights)),
            unconditional=True,
            name=f"{kind}(dim={spec.dim})",
        )

    if kind == "weighted_lp":
        p = _parse_p(spec.p)
        if p is None:
            raise ValueError("weighted_lp requires p")
        weights = _validate_weights(spec.weights, spec.dim)
        w = np.asarray(weights, dtype=float)
        rows_fn = functools.partial(_weighted_lp_rows, w, p)
        return Space(
            spec,
            rows_fn,
            analytic={"cq": 1.0, "k": 1.0},
            unconditional=True,
            name=f"weighted_lp(p={spec.p}, dim={spec.dim})",
        )

    if kind == "direct_sum":
        if not spec.summands:
            raise ValueError("direct_sum requires summands")
        classes = interleave_classes(spec.dim, len(spec.summands))
        parts = []
        for j, sub in enumerate(spec.summands):
            if sub.dim != len(classes[j]):
                raise ValueError(
                    f"summand {j} has dim {sub.dim}, interleaving gives {len(classes[j])}"
                )
            if sub.kind not in ("lp", "weighted_l1", "weighted_lp"):
                raise ValueError(f"direct_sum summand kind {sub.kind!r} not supported")
            sub_space = make_space(sub)
            cols = np.asarray([i - 1 for i in classes[j]], dtype=int)
            parts.append((cols, sub_space._rows_fn))
        rows_fn = functools.partial(_direct_sum_rows, tuple(parts))
        return Space(
            spec,
            rows_fn,
            analytic={"cq": 1.0, "k": 1.0},
            unconditional=True,
            name=f"direct_sum(dim={spec.dim})",
        )

    if kind == "lindenstrauss_l1":
        parents = _lindenstrauss_parents(spec.dim)
        rows_fn = functools.partial(_lindenstrauss_rows, parents)
        return Space(spec, rows_fn, analytic={}, unconditional=False, name=f"lindenstrauss_l1(dim={spec.dim})")

    raise ValueError(f"unknown space kind {kind!r}; known kinds: {', '.join(KINDS)}")


def space_from_dict(data: dict) -> Space:
    return make_space(SpaceSpec.from_dict(data))


def catalog_entries() -> list[dict]:
    """One row per kind for the CLI listing: token plus parameter schema."""
    return [
        {"kind": "lp", "params": "p in [1, inf]"},
        {"kind": "weighted_l1", "params": "weights: dim positive reals"},
        {"kind": "weighted_lp", "params": "p in [1, inf], weights: dim positive reals"},
        {"kind": "direct_sum", "params": "summands: norm specs on round-robin index classes"},
        {"kind": "lindenstrauss_l1", "params": "none (dim fixes the truncation)"},
        {"kind": "custom_weights_file", "params": "path: text file, one positive decimal per line"},
    ]
