"""Admissible-instance families for the greedy-type constants.

Every constant is the supremum of a left/right norm ratio over a family of
instances: vectors, index sets and sign patterns subject to combinatorial
side conditions that never involve the norm.  This module owns those
families: grid construction, exhaustive enumeration, exact instance
counting, seeded sampling, and the validity predicates.

Coefficient grids use magnitudes j / levels for j = 1 .. levels with both
signs.  Dominating vectors (the ``g`` of the exchange properties and the
off-unit part of ``y``) draw from magnitudes j / levels for j up to
2 * levels, restricted to j at or above the largest level used by ``f`` so
that the domination condition holds by construction.  Entries of ``y``
equal to 1 in modulus are placed exactly on a chosen set D and the rest of
the pool excludes modulus 1, so D really is the unit-modulus set.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Iterator, Sequence

import numpy as np

from .core import as_vector, coeff_sup, support
from .greedy import greedy_sets, is_greedy_set

__all__ = [
    "SearchConfig",
    "Instance",
    "CapExceededError",
    "enumerate_instances",
    "count_instances",
    "sample_instances",
    "valid_F_instance",
    "valid_Fstar_instance",
    "instance_is_valid",
    "RESIDUAL_KINDS",
    "INDICATOR_KINDS",
    "SLC_KINDS",
    "F_KINDS",
    "FSTAR_KINDS",
    "ALL_KINDS",
]

RESIDUAL_KINDS = ("cq", "k", "cg", "cal", "cp")
INDICATOR_KINDS = ("dd", "dc", "ds", "dsc")
SLC_KINDS = ("slc", "pslc")
F_KINDS = ("f", "fp", "q", "c1")
FSTAR_KINDS = ("fstar", "fpstar", "c2")
ALL_KINDS = RESIDUAL_KINDS + INDICATOR_KINDS + SLC_KINDS + F_KINDS + FSTAR_KINDS


class CapExceededError(RuntimeError):
    """Exhaustive enumeration would exceed the configured instance cap."""


@dataclasses.dataclass(frozen=True)
class SearchConfig:
    """Search parameters shared by enumeration, sampling and estimation.

    ``max_support`` caps the size of every enumerated support and index
    set (None means the ambient dimension).  ``cap`` bounds the exhaustive
    instance count; exceeding it raises :class:`CapExceededError`.
    """

    levels: int = 2
    max_support: int | None = None
    mode: str = "exhaustive"
    samples: int = 256
    seed: int = 0
    cap: int = 20_000_000

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {self.mode!r}")
        if self.max_support is not None and self.max_support < 0:
            raise ValueError("max_support must be >= 0")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.cap < 1:
            raise ValueError("cap must be >= 1")

    def support_cap(self, dim: int) -> int:
        return dim if self.max_support is None else min(self.max_support, dim)

    def to_dict(self) -> dict:
        return {
            "levels": self.levels,
            "max_support": self.max_support,
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
            "cap": self.cap,
        }


@dataclasses.dataclass(frozen=True)
class Instance:
    """One admissible instance of a constant's quantifier family.

    ``vectors`` holds the named coefficient vectors (keys among f, g, z, y),
    ``sets`` the named index sets (A, B), ``signs`` the sign patterns
    aligned with the sorted sets, and ``m`` the greedy order where the
    family has one.
    """

    kind: str
    vectors: dict
    sets: dict
    signs: dict
    m: int | None = None

    def to_dict(self) -> dict:
        # Index sets are 1-based, here and everywhere else.
        return {
            "kind": self.kind,
            "vectors": {k: [float(x) for x in v] for k, v in sorted(self.vectors.items())},
            "sets": {k: list(s) for k, s in sorted(self.sets.items())},
            "signs": {k: list(s) for k, s in sorted(self.signs.items())},
            "m": self.m,
        }


# ---------------------------------------------------------------------------
# grids

def signed_values(level_list: Sequence[int], levels: int) -> tuple[tuple[int, int], ...]:
    """(level, sign) pairs in canonical order: magnitude ascending, + first."""
    return tuple((j, s) for j in level_list for s in (1, -1))


def unit_levels(levels: int) -> tuple[int, ...]:
    return tuple(range(1, levels + 1))


def dominating_levels(levels: int, min_level: int) -> tuple[int, ...]:
    """Levels available to a vector that must dominate f with max level min_level."""
    return tuple(range(max(1, min_level), 2 * levels + 1))


def off_unit_levels(levels: int, min_level: int) -> tuple[int, ...]:
    """Dominating levels with the exact-unit level removed (reserved for D)."""
    return tuple(j for j in dominating_levels(levels, min_level) if j != levels)


def _values_array(pairs: Sequence[tuple[int, int]], levels: int) -> np.ndarray:
    return np.asarray([s * j / levels for j, s in pairs], dtype=float)


_COMBO_CACHE: dict = {}


def pool_combos(pairs: tuple[tuple[int, int], ...], size: int, levels: int) -> np.ndarray:
    """(len(pairs) ** size, size) array of value combinations, product order."""
    key = (pairs, size, levels)
    hit = _COMBO_CACHE.get(key)
    if hit is not None:
        return hit
    vals = _values_array(pairs, levels)
    if size == 0:
        out = np.zeros((1, 0))
    else:
        grids = np.meshgrid(*([vals] * size), indexing="ij")
        out = np.stack(grids, axis=-1).reshape(-1, size)
    _COMBO_CACHE[key] = out
    return out


_GRADED_CACHE: dict = {}


def graded_unit_combos(levels: int, size: int) -> tuple[tuple[int, np.ndarray], ...]:
    """Unit-grid combos grouped by their largest magnitude level.

    Returns (j, rows) pairs with j ascending; rows keep the canonical
    product order within each group.  Size 0 gives the single empty row at
    level 0.
    """
    key = (levels, size)
    hit = _GRADED_CACHE.get(key)
    if hit is not None:
        return hit
    if size == 0:
        out = ((0, np.zeros((1, 0))),)
        _GRADED_CACHE[key] = out
        return out
    pairs = signed_values(unit_levels(levels), levels)
    vals = _values_array(pairs, levels)
    levs = np.asarray([j for j, _ in pairs], dtype=int)
    idx_grids = np.meshgrid(*([np.arange(len(pairs))] * size), indexing="ij")
    idx = np.stack(idx_grids, axis=-1).reshape(-1, size)
    rows = vals[idx]
    row_levels = levs[idx].max(axis=1)
    out = tuple((int(j), rows[row_levels == j]) for j in range(1, levels + 1))
    _GRADED_CACHE[key] = out
    return out


# ---------------------------------------------------------------------------
# support-tuple generators (shared by streams, counters and estimators)

def subsets_by_size(pool: Sequence[int], max_size: int) -> Iterator[tuple[int, ...]]:
    """Subsets of pool, size ascending, lexicographic within each size."""
    pool = tuple(pool)
    for s in range(0, min(len(pool), max_size) + 1):
        yield from itertools.combinations(pool, s)


def _precedes(A: Sequence[int], rest: Sequence[int]) -> bool:
    """max(A) < min(rest), vacuously true when either side is empty."""
    if not A or not rest:
        return True
    return max(A) < min(rest)


def indicator_pairs(dim: int, cfg: SearchConfig, left: bool) -> Iterator[tuple[tuple, tuple]]:
    """(A, B) with |A| <= |B|, both capped; left adds max(A) < min(B)."""
    cap = cfg.support_cap(dim)
    all_idx = tuple(range(1, dim + 1))
    for A in subsets_by_size(all_idx, cap):
        for B in subsets_by_size(all_idx, cap):
            if len(A) > len(B):
                continue
            if left and not _precedes(A, B):
                continue
            yield A, B


def disjoint_pairs(dim: int, cfg: SearchConfig, equal_size: bool = False,
                   left: bool = False) -> Iterator[tuple[tuple, tuple]]:
    """Disjoint (A, B) with |A| <= |B| (or equal sizes); left adds A < B."""
    cap = cfg.support_cap(dim)
    all_idx = tuple(range(1, dim + 1))
    for A in subsets_by_size(all_idx, cap):
        rest = tuple(i for i in all_idx if i not in A)
        for B in subsets_by_size(rest, cap):
            if equal_size:
                if len(A) != len(B):
                    continue
            elif len(A) > len(B):
                continue
            if left and not _precedes(A, B):
                continue
            yield A, B


def slc_rest(dim: int, A: tuple, B: tuple, partial: bool) -> tuple[int, ...]:
    """Indices available to f's support for an (A, B) exchange pair."""
    used = set(A) | set(B)
    lo = max(A) if (partial and A) else 0
    return tuple(i for i in range(1, dim + 1) if i not in used and i > lo)


def f_family_splits(dim: int, cfg: SearchConfig, A: tuple, B: tuple,
                    partial: bool) -> Iterator[tuple[tuple, tuple]]:
    """(Sf, Sg) disjoint supports off A and B; partial keeps Sg right of A."""
    cap = cfg.support_cap(dim)
    used = set(A) | set(B)
    rest = tuple(i for i in range(1, dim + 1) if i not in used)
    lo = max(A) if (partial and A) else 0
    for Sf in subsets_by_size(rest, cap):
        left_over = tuple(i for i in rest if i not in Sf and i > lo)
        for Sg in subsets_by_size(left_over, cap):
            yield Sf, Sg


def fstar_tuples(dim: int, cfg: SearchConfig, partial: bool
                 ) -> Iterator[tuple[tuple, tuple, tuple, tuple]]:
    """(Sf, Sz, Sy, D) with D inside Sy and |D| >= |Sz|.

    partial adds max(Sz) < min(Sf union Sy).
    """
    cap = cfg.support_cap(dim)
    all_idx = tuple(range(1, dim + 1))
    for Sf in subsets_by_size(all_idx, cap):
        rest1 = tuple(i for i in all_idx if i not in Sf)
        for Sz in subsets_by_size(rest1, cap):
            rest2 = tuple(i for i in rest1 if i not in Sz)
            for Sy in subsets_by_size(rest2, cap):
                if len(Sy) < len(Sz):
                    continue
                if partial and not _precedes(Sz, Sf + Sy):
                    continue
                # D runs over all admissible sizes, |Sz| .. |Sy|.
                for d in range(len(Sz), len(Sy) + 1):
                    for D in itertools.combinations(Sy, d):
                        yield Sf, Sz, Sy, D


def c2_tuples(dim: int, cfg: SearchConfig) -> Iterator[tuple[tuple, tuple, tuple, tuple]]:
    """(Sf, A, Sy, D) with A inside Sf, D inside Sy, |D| >= |A|."""
    cap = cfg.support_cap(dim)
    all_idx = tuple(range(1, dim + 1))
    for Sf in subsets_by_size(all_idx, cap):
        rest = tuple(i for i in all_idx if i not in Sf)
        for A in subsets_by_size(Sf, len(Sf)):
            for Sy in subsets_by_size(rest, cap):
                if len(Sy) < len(A):
                    continue
                for d in range(len(A), len(Sy) + 1):
                    for D in itertools.combinations(Sy, d):
                        yield Sf, A, Sy, D


# ---------------------------------------------------------------------------
# validity predicates

def _disjoint(*sets) -> bool:
    seen: set = set()
    for s in sets:
        s = set(s)
        if seen & s:
            return False
        seen |= s
    return True


def valid_F_instance(f, g, A: Sequence[int], B: Sequence[int], partial: bool = False) -> bool:
    """Admissibility of (f, g, A, B) for the indicator-exchange inequality.

    Conditions: |A| <= |B|; A and B disjoint; f and g disjointly supported;
    neither support meets A or B; coefficients of f bounded by 1 in
    modulus; every coefficient of g at least as large in modulus as the
    largest of f.  With ``partial``, A lies entirely left of supp(g) and B.
    """
    f = as_vector(f)
    g = as_vector(g, f.size)
    A = tuple(sorted(int(i) for i in A))
    B = tuple(sorted(int(i) for i in B))
    for i in A + B:
        if i < 1 or i > f.size:
            return False
    if len(set(A)) != len(A) or len(set(B)) != len(B):
        return False
    if len(A) > len(B):
        return False
    if not _disjoint(A, B):
        return False
    sf, sg = support(f), support(g)
    if not _disjoint(sf, sg):
        return False
    if (set(sf) | set(sg)) & (set(A) | set(B)):
        return False
    t = coeff_sup(f)
    if t > 1.0:
        return False
    if sg and min(abs(float(g[i - 1])) for i in sg) < t:
        return False
    if partial and not _precedes(A, tuple(sg) + B):
        return False
    return True


def valid_Fstar_instance(f, z, y, partial: bool = False) -> bool:
    """Admissibility of (f, z, y) for the unit-exchange inequality.

    Conditions: pairwise disjoint supports; coefficients of f and z bounded
    by 1 in modulus; the set D of exactly-unit coefficients of y at least
    as large as supp(z); every coefficient of y dominating the largest of
    f.  With ``partial``, supp(z) lies entirely left of supp(f) and
    supp(y).
    """
    f = as_vector(f)
    z = as_vector(z, f.size)
    y = as_vector(y, f.size)
    sf, sz, sy = support(f), support(z), support(y)
    if not _disjoint(sf, sz, sy):
        return False
    if max(coeff_sup(f), coeff_sup(z)) > 1.0:
        return False
    D = tuple(i for i in sy if abs(float(y[i - 1])) == 1.0)
    if len(D) < len(sz):
        return False
    t = coeff_sup(f)
    if sy and min(abs(float(y[i - 1])) for i in sy) < t:
        return False
    if partial and not _precedes(sz, sf + sy):
        return False
    return True


def instance_is_valid(inst: Instance, dim: int) -> bool:
    """Dispatch the per-kind admissibility conditions."""
    kind = inst.kind
    v = inst.vectors
    s = inst.sets
    if kind in ("cq", "cg", "cal", "cp"):
        f = as_vector(v["f"], dim)
        A = s["A"]
        return inst.m == len(A) and 0 <= inst.m <= dim and is_greedy_set(f, A)
    if kind == "k":
        A = s["A"]
        return all(1 <= i <= dim for i in A) and len(set(A)) == len(A)
    if kind in INDICATOR_KINDS:
        A, B = tuple(s["A"]), tuple(s["B"])
        if len(A) > len(B):
            return False
        if kind in ("dc", "dsc") and not _precedes(A, B):
            return False
        if kind in ("ds", "dsc"):
            if len(inst.signs.get("A", ())) != len(A) or len(inst.signs.get("B", ())) != len(B):
                return False
        return True
    if kind in SLC_KINDS:
        f = as_vector(v["f"], dim)
        A, B = tuple(s["A"]), tuple(s["B"])
        if len(A) > len(B) or not _disjoint(A, B):
            return False
        sf = support(f)
        if set(sf) & (set(A) | set(B)):
            return False
        if coeff_sup(f) > 1.0:
            return False
        if kind == "pslc" and not _precedes(A, tuple(sf) + B):
            return False
        return True
    if kind in ("f", "fp"):
        return valid_F_instance(v["f"], v["g"], s["A"], s["B"], partial=(kind == "fp"))
    if kind == "q":
        f = as_vector(v["f"], dim)
        g = as_vector(v["g"], dim)
        A, B = tuple(s["A"]), tuple(s["B"])
        if len(A) != len(B) or not _disjoint(A, B):
            return False
        sf, sg = support(f), support(g)
        if not _disjoint(sf, sg):
            return False
        if (set(sf) | set(sg)) & (set(A) | set(B)):
            return False
        return coeff_sup(f) <= 1.0
    if kind == "c1":
        if len(inst.signs.get("A", ())) != len(s["A"]) or len(inst.signs.get("B", ())) != len(s["B"]):
            return False
        return valid_F_instance(v["f"], v["g"], s["A"], s["B"], partial=False)
    if kind in ("fstar", "fpstar"):
        return valid_Fstar_instance(v["f"], v["z"], v["y"], partial=(kind == "fpstar"))
    if kind == "c2":
        f = as_vector(v["f"], dim)
        y = as_vector(v["y"], dim)
        A = tuple(s["A"])
        sf, sy = support(f), support(y)
        if not set(A) <= set(sf):
            return False
        if not _disjoint(sf, sy):
            return False
        if coeff_sup(f) > 1.0:
            return False
        t = coeff_sup(f)
        if sy and min(abs(float(y[i - 1])) for i in sy) < t:
            return False
        D = tuple(i for i in sy if abs(float(y[i - 1])) == 1.0)
        return len(D) >= len(A)
    raise ValueError(f"unknown constant kind {kind!r}")


# ---------------------------------------------------------------------------
# helpers shared with the counters

def _count_greedy_sets(mods: Sequence[float], m: int) -> int:
    if m == 0:
        return 1
    srt = sorted(mods, reverse=True)
    thr = srt[m - 1]
    mandatory = sum(1 for x in mods if x > thr)
    ties = sum(1 for x in mods if x == thr)
    return math.comb(ties, m - mandatory)


def _vector_from(dim: int, Sf: Sequence[int], values: Sequence[float]) -> np.ndarray:
    out = np.zeros(dim)
    for i, val in zip(Sf, values):
        out[i - 1] = float(val)
    return out


def _level_products(level_pairs: tuple[tuple[int, int], ...], size: int):
    """Iterate (values tuple, max level) over the signed pool product."""
    if size == 0:
        yield (), 0
        return
    for combo in itertools.product(level_pairs, repeat=size):
        yield combo, max(j for j, _ in combo)


def _combo_values(combo, levels: int) -> tuple[float, ...]:
    return tuple(s * j / levels for j, s in combo)


def _sign_product(size: int):
    return itertools.product((1, -1), repeat=size)


# ---------------------------------------------------------------------------
# exhaustive streams

def _iter_residual(kind: str, dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    L = cfg.levels
    cap = cfg.support_cap(dim)
    pairs = signed_values(unit_levels(L), L)
    all_idx = tuple(range(1, dim + 1))
    for Sf in subsets_by_size(all_idx, cap):
        for combo, _ in _level_products(pairs, len(Sf)):
            f = _vector_from(dim, Sf, _combo_values(combo, L))
            if kind == "k":
                for A in subsets_by_size(all_idx, cap):
                    yield Instance("k", {"f": f}, {"A": A}, {})
            else:
                for m in range(0, dim + 1):
                    for A in greedy_sets(f, m):
                        yield Instance(kind, {"f": f}, {"A": A}, {}, m=m)


def _iter_indicator(kind: str, dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    left = kind in ("dc", "dsc")
    signed = kind in ("ds", "dsc")
    for A, B in indicator_pairs(dim, cfg, left):
        eps_list = list(_sign_product(len(A))) if signed else [(1,) * len(A)]
        eta_list = list(_sign_product(len(B))) if signed else [(1,) * len(B)]
        for eps in eps_list:
            for eta in eta_list:
                yield Instance(kind, {}, {"A": A, "B": B}, {"A": eps, "B": eta})


def _iter_slc(kind: str, dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    L = cfg.levels
    cap = cfg.support_cap(dim)
    partial = kind == "pslc"
    pairs = signed_values(unit_levels(L), L)
    for A, B in disjoint_pairs(dim, cfg, left=partial):
        rest = slc_rest(dim, A, B, partial)
        for Sf in subsets_by_size(rest, cap):
            for combo, _ in _level_products(pairs, len(Sf)):
                f = _vector_from(dim, Sf, _combo_values(combo, L))
                for eps in _sign_product(len(A)):
                    for eta in _sign_product(len(B)):
                        yield Instance(kind, {"f": f}, {"A": A, "B": B}, {"A": eps, "B": eta})


def _iter_f_family(kind: str, dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    L = cfg.levels
    partial = kind == "fp"
    equal = kind == "q"
    signed = kind == "c1"
    f_pairs = signed_values(unit_levels(L), L)
    for A, B in disjoint_pairs(dim, cfg, equal_size=equal, left=False):
        if partial and not _precedes(A, B):
            continue
        for Sf, Sg in f_family_splits(dim, cfg, A, B, partial):
            for combo, jf in _level_products(f_pairs, len(Sf)):
                f = _vector_from(dim, Sf, _combo_values(combo, L))
                if kind == "q":
                    g_levels = dominating_levels(L, 1)
                else:
                    g_levels = dominating_levels(L, max(jf, 1))
                g_pairs = signed_values(g_levels, L)
                for g_combo, _ in _level_products(g_pairs, len(Sg)):
                    g = _vector_from(dim, Sg, _combo_values(g_combo, L))
                    if signed:
                        for eps in _sign_product(len(A)):
                            for eta in _sign_product(len(B)):
                                yield Instance(kind, {"f": f, "g": g}, {"A": A, "B": B},
                                               {"A": eps, "B": eta})
                    else:
                        yield Instance(kind, {"f": f, "g": g}, {"A": A, "B": B}, {})


def _iter_y_vectors(dim: int, Sy: tuple, D: tuple, jf: int, L: int) -> Iterator[np.ndarray]:
    offd = tuple(i for i in Sy if i not in D)
    off_pairs = signed_values(off_unit_levels(L, max(jf, 1)), L)
    for d_signs in _sign_product(len(D)):
        for off_combo, _ in _level_products(off_pairs, len(offd)):
            y = np.zeros(dim)
            for i, sgn in zip(D, d_signs):
                y[i - 1] = float(sgn)
            for i, val in zip(offd, _combo_values(off_combo, L)):
                y[i - 1] = val
            yield y


def _iter_fstar(kind: str, dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    L = cfg.levels
    partial = kind == "fpstar"
    f_pairs = signed_values(unit_levels(L), L)
    for Sf, Sz, Sy, D in fstar_tuples(dim, cfg, partial):
        for combo, jf in _level_products(f_pairs, len(Sf)):
            f = _vector_from(dim, Sf, _combo_values(combo, L))
            for z_combo, _ in _level_products(f_pairs, len(Sz)):
                z = _vector_from(dim, Sz, _combo_values(z_combo, L))
                for y in _iter_y_vectors(dim, Sy, D, jf, L):
                    yield Instance(kind, {"f": f, "z": z, "y": y}, {}, {})


def _iter_c2(dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    L = cfg.levels
    f_pairs = signed_values(unit_levels(L), L)
    for Sf, A, Sy, D in c2_tuples(dim, cfg):
        for combo, jf in _level_products(f_pairs, len(Sf)):
            f = _vector_from(dim, Sf, _combo_values(combo, L))
            for y in _iter_y_vectors(dim, Sy, D, jf, L):
                yield Instance("c2", {"f": f, "y": y}, {"A": A}, {})


# ---------------------------------------------------------------------------
# exact counting (no vectors are materialized)

def _count_residual(kind: str, dim: int, cfg: SearchConfig) -> int:
    L = cfg.levels
    cap = cfg.support_cap(dim)
    n_sets = sum(math.comb(dim, a) for a in range(0, cap + 1))
    pairs = signed_values(unit_levels(L), L)
    total = 0
    all_idx = tuple(range(1, dim + 1))
    for Sf in subsets_by_size(all_idx, cap):
        if kind == "k":
            total += (2 * L) ** len(Sf) * n_sets
            continue
        for combo, _ in _level_products(pairs, len(Sf)):
            mods = [abs(j / L * s) for j, s in combo] + [0.0] * (dim - len(Sf))
            total += sum(_count_greedy_sets(mods, m) for m in range(0, dim + 1))
    return total


def _count_indicator(kind: str, dim: int, cfg: SearchConfig) -> int:
    signed = kind in ("ds", "dsc")
    total = 0
    for A, B in indicator_pairs(dim, cfg, kind in ("dc", "dsc")):
        total += (2 ** (len(A) + len(B))) if signed else 1
    return total


def _count_slc(kind: str, dim: int, cfg: SearchConfig) -> int:
    L = cfg.levels
    cap = cfg.support_cap(dim)
    partial = kind == "pslc"
    total = 0
    for A, B in disjoint_pairs(dim, cfg, left=partial):
        rest = slc_rest(dim, A, B, partial)
        f_count = sum(math.comb(len(rest), s) * (2 * L) ** s
                      for s in range(0, min(len(rest), cap) + 1))
        total += f_count * (2 ** (len(A) + len(B)))
    return total


def _graded_counts(L: int, size: int) -> list[tuple[int, int]]:
    """(max level, row count) for the signed unit grid of a given size."""
    if size == 0:
        return [(0, 1)]
    return [(j, (2 * j) ** size - (2 * (j - 1)) ** size) for j in range(1, L + 1)]


def _count_f_family(kind: str, dim: int, cfg: SearchConfig) -> int:
    L = cfg.levels
    partial = kind == "fp"
    equal = kind == "q"
    signed = kind == "c1"
    total = 0
    for A, B in disjoint_pairs(dim, cfg, equal_size=equal, left=False):
        if partial and not _precedes(A, B):
            continue
        sign_factor = 2 ** (len(A) + len(B)) if signed else 1
        for Sf, Sg in f_family_splits(dim, cfg, A, B, partial):
            for jf, f_rows in _graded_counts(L, len(Sf)):
                if kind == "q":
                    pool = len(dominating_levels(L, 1))
                else:
                    pool = len(dominating_levels(L, max(jf, 1)))
                total += f_rows * (2 * pool) ** len(Sg) * sign_factor
    return total


def _count_y(Sy: tuple, D: tuple, jf: int, L: int) -> int:
    offd = len(Sy) - len(D)
    pool = len(off_unit_levels(L, max(jf, 1)))
    return (2 ** len(D)) * (2 * pool) ** offd


def _count_fstar(kind: str, dim: int, cfg: SearchConfig) -> int:
    L = cfg.levels
    total = 0
    for Sf, Sz, Sy, D in fstar_tuples(dim, cfg, kind == "fpstar"):
        for jf, f_rows in _graded_counts(L, len(Sf)):
            total += f_rows * (2 * L) ** len(Sz) * _count_y(Sy, D, jf, L)
    return total


def _count_c2(dim: int, cfg: SearchConfig) -> int:
    L = cfg.levels
    total = 0
    for Sf, A, Sy, D in c2_tuples(dim, cfg):
        for jf, f_rows in _graded_counts(L, len(Sf)):
            total += f_rows * _count_y(Sy, D, jf, L)
    return total


def count_instances(kind: str, dim: int, cfg: SearchConfig) -> int:
    """Exact size of the exhaustive family for a kind at this config."""
    if kind not in ALL_KINDS:
        raise ValueError(f"unknown constant kind {kind!r}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if kind in RESIDUAL_KINDS:
        return _count_residual(kind, dim, cfg)
    if kind in INDICATOR_KINDS:
        return _count_indicator(kind, dim, cfg)
    if kind in SLC_KINDS:
        return _count_slc(kind, dim, cfg)
    if kind in F_KINDS:
        return _count_f_family(kind, dim, cfg)
    if kind == "c2":
        return _count_c2(dim, cfg)
    return _count_fstar(kind, dim, cfg)


def check_cap(kind: str, dim: int, cfg: SearchConfig) -> int:
    total = count_instances(kind, dim, cfg)
    if total > cfg.cap:
        raise CapExceededError(
            f"{kind} at dim {dim} has {total} instances, above the cap {cfg.cap}"
        )
    return total


# ---------------------------------------------------------------------------
# sampling

def _rng_for(cfg: SearchConfig, kind: str, i: int) -> np.random.Generator:
    # Seeding by (seed, kind, index) keeps draws independent of worker
    # partitioning and of which other kinds run in the same process.
    return np.random.default_rng([cfg.seed, ALL_KINDS.index(kind), i])


def _sample_subset(rng, pool: Sequence[int], size: int) -> tuple[int, ...]:
    pool = tuple(pool)
    if size > len(pool):
        size = len(pool)
    if size == 0:
        return ()
    picked = rng.choice(len(pool), size=size, replace=False)
    return tuple(sorted(pool[int(i)] for i in picked))


def _sample_values(rng, level_list: Sequence[int], size: int, L: int) -> tuple[tuple[float, ...], int]:
    if size == 0:
        return (), 0
    levels = [int(level_list[int(i)]) for i in rng.integers(0, len(level_list), size=size)]
    signs = [1 if b else -1 for b in rng.integers(0, 2, size=size)]
    vals = tuple(s * j / L for j, s in zip(levels, signs))
    return vals, max(levels)


def _sample_one(kind: str, dim: int, cfg: SearchConfig, rng) -> Instance:
    L = cfg.levels
    cap = cfg.support_cap(dim)
    all_idx = tuple(range(1, dim + 1))

    if kind in RESIDUAL_KINDS:
        s = int(rng.integers(1, max(cap, 1) + 1))
        Sf = _sample_subset(rng, all_idx, s)
        vals, _ = _sample_values(rng, unit_levels(L), len(Sf), L)
        f = _vector_from(dim, Sf, vals)
        if kind == "k":
            A = _sample_subset(rng, all_idx, int(rng.integers(0, cap + 1)))
            return Instance("k", {"f": f}, {"A": A}, {})
        m = int(rng.integers(0, dim + 1))
        sets = greedy_sets(f, m)
        A = sets[int(rng.integers(0, len(sets)))]
        return Instance(kind, {"f": f}, {"A": A}, {}, m=m)

    if kind in INDICATOR_KINDS:
        left = kind in ("dc", "dsc")
        signed = kind in ("ds", "dsc")
        for _ in range(64):
            b = int(rng.integers(1, cap + 1))
            a = int(rng.integers(0, b + 1))
            A = _sample_subset(rng, all_idx, a)
            B = _sample_subset(rng, all_idx, b)
            if len(A) > len(B):
                continue
            if left and not _precedes(A, B):
                continue
            eps = tuple(1 if x else -1 for x in rng.integers(0, 2, len(A))) if signed else (1,) * len(A)
            eta = tuple(1 if x else -1 for x in rng.integers(0, 2, len(B))) if signed else (1,) * len(B)
            return Instance(kind, {}, {"A": A, "B": B}, {"A": eps, "B": eta})
        return Instance(kind, {}, {"A": (), "B": (1,)}, {"A": (), "B": (1,)})

    if kind in SLC_KINDS:
        partial = kind == "pslc"
        for _ in range(64):
            b = int(rng.integers(0, cap + 1))
            a = int(rng.integers(0, b + 1))
            if a + b > dim:
                continue
            AB = _sample_subset(rng, all_idx, a + b)
            if partial:
                A, B = AB[:a], AB[a:]
            else:
                order = rng.permutation(a + b)
                A = tuple(sorted(AB[int(i)] for i in order[:a]))
                B = tuple(sorted(AB[int(i)] for i in order[a:]))
            rest = slc_rest(dim, A, B, partial)
            if not rest and a + b == 0:
                continue
            Sf = _sample_subset(rng, rest, int(rng.integers(0, min(cap, len(rest)) + 1)) if rest else 0)
            vals, _ = _sample_values(rng, unit_levels(L), len(Sf), L)
            f = _vector_from(dim, Sf, vals)
            eps = tuple(1 if x else -1 for x in rng.integers(0, 2, len(A)))
            eta = tuple(1 if x else -1 for x in rng.integers(0, 2, len(B)))
            return Instance(kind, {"f": f}, {"A": A, "B": B}, {"A": eps, "B": eta})
        raise RuntimeError("sampler failed to draw an admissible exchange pair")

    if kind in F_KINDS:
        partial = kind == "fp"
        equal = kind == "q"
        signed = kind == "c1"
        for _ in range(128):
            b = int(rng.integers(0, cap + 1))
            a = b if equal else int(rng.integers(0, b + 1))
            if a + b > dim:
                continue
            AB = _sample_subset(rng, all_idx, a + b)
            if partial:
                A, B = AB[:a], AB[a:]
            else:
                order = rng.permutation(a + b)
                A = tuple(sorted(AB[int(i)] for i in order[:a]))
                B = tuple(sorted(AB[int(i)] for i in order[a:]))
            used = set(A) | set(B)
            lo = max(A) if (partial and A) else 0
            rest = tuple(i for i in all_idx if i not in used)
            sf = int(rng.integers(0, min(cap, len(rest)) + 1)) if rest else 0
            Sf = _sample_subset(rng, rest, sf)
            g_rest = tuple(i for i in rest if i not in Sf and i > lo)
            sg = int(rng.integers(0, min(cap, len(g_rest)) + 1)) if g_rest else 0
            Sg = _sample_subset(rng, g_rest, sg)
            f_vals, jf = _sample_values(rng, unit_levels(L), len(Sf), L)
            pool = dominating_levels(L, 1) if equal else dominating_levels(L, max(jf, 1))
            g_vals, _ = _sample_values(rng, pool, len(Sg), L)
            f = _vector_from(dim, Sf, f_vals)
            g = _vector_from(dim, Sg, g_vals)
            signs = {}
            if signed:
                signs = {
                    "A": tuple(1 if x else -1 for x in rng.integers(0, 2, len(A))),
                    "B": tuple(1 if x else -1 for x in rng.integers(0, 2, len(B))),
                }
            return Instance(kind, {"f": f, "g": g}, {"A": A, "B": B}, signs)
        raise RuntimeError("sampler failed to draw an admissible exchange pair")

    if kind in ("fstar", "fpstar"):
        partial = kind == "fpstar"
        for _ in range(128):
            sz = int(rng.integers(0, cap + 1))
            sy = int(rng.integers(sz, cap + 1))
            sf = int(rng.integers(0, cap + 1))
            if sz + sy + sf > dim:
                continue
            chosen = _sample_subset(rng, all_idx, sz + sy + sf)
            if partial:
                Sz = chosen[:sz]
                tail = chosen[sz:]
                order = rng.permutation(len(tail))
                Sf = tuple(sorted(tail[int(i)] for i in order[:sf]))
                Sy = tuple(sorted(tail[int(i)] for i in order[sf:]))
            else:
                order = rng.permutation(len(chosen))
                Sf = tuple(sorted(chosen[int(i)] for i in order[:sf]))
                Sz = tuple(sorted(chosen[int(i)] for i in order[sf:sf + sz]))
                Sy = tuple(sorted(chosen[int(i)] for i in order[sf + sz:]))
            d = int(rng.integers(sz, len(Sy) + 1)) if Sy else 0
            if d < sz:
                continue
            D = _sample_subset(rng, Sy, d)
            f_vals, jf = _sample_values(rng, unit_levels(L), len(Sf), L)
            z_vals, _ = _sample_values(rng, unit_levels(L), len(Sz), L)
            f = _vector_from(dim, Sf, f_vals)
            z = _vector_from(dim, Sz, z_vals)
            offd = tuple(i for i in Sy if i not in D)
            pool = off_unit_levels(L, max(jf, 1))
            off_vals, _ = _sample_values(rng, pool, len(offd), L) if pool or not offd else ((), 0)
            if offd and not pool:
                continue
            y = np.zeros(dim)
            for i in D:
                y[i - 1] = float(1 if rng.integers(0, 2) else -1)
            for i, val in zip(offd, off_vals):
                y[i - 1] = val
            return Instance(kind, {"f": f, "z": z, "y": y}, {}, {})
        raise RuntimeError("sampler failed to draw an admissible unit-exchange triple")

    if kind == "c2":
        for _ in range(128):
            sf = int(rng.integers(0, cap + 1))
            Sf = _sample_subset(rng, all_idx, sf)
            A = _sample_subset(rng, Sf, int(rng.integers(0, len(Sf) + 1)) if Sf else 0)
            rest = tuple(i for i in all_idx if i not in Sf)
            sy = int(rng.integers(len(A), min(cap, len(rest)) + 1)) if len(A) <= min(cap, len(rest)) else -1
            if sy < len(A):
                continue
            Sy = _sample_subset(rng, rest, sy)
            d = int(rng.integers(len(A), len(Sy) + 1)) if Sy else 0
            if d < len(A):
                continue
            D = _sample_subset(rng, Sy, d)
            f_vals, jf = _sample_values(rng, unit_levels(L), len(Sf), L)
            f = _vector_from(dim, Sf, f_vals)
            offd = tuple(i for i in Sy if i not in D)
            pool = off_unit_levels(L, max(jf, 1))
            if offd and not pool:
                continue
            off_vals, _ = _sample_values(rng, pool, len(offd), L)
            y = np.zeros(dim)
            for i in D:
                y[i - 1] = float(1 if rng.integers(0, 2) else -1)
            for i, val in zip(offd, off_vals):
                y[i - 1] = val
            return Instance("c2", {"f": f, "y": y}, {"A": A}, {})
        raise RuntimeError("sampler failed to draw an admissible projection-exchange instance")

    raise ValueError(f"unknown constant kind {kind!r}")


def sample_instances(kind: str, dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    """cfg.samples seeded draws; draw i depends only on (seed, kind, i)."""
    for i in range(cfg.samples):
        yield _sample_one(kind, dim, cfg, _rng_for(cfg, kind, i))


def enumerate_instances(kind: str, dim: int, cfg: SearchConfig) -> Iterator[Instance]:
    """Stream the admissible instances of a kind.

    Exhaustive mode enumerates the whole grid family in a fixed canonical
    order after checking the instance cap; sampled mode yields
    cfg.samples seeded draws.
    """
    if kind not in ALL_KINDS:
        raise ValueError(f"unknown constant kind {kind!r}")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if cfg.mode == "sampled":
        return sample_instances(kind, dim, cfg)
    check_cap(kind, dim, cfg)
    if kind in RESIDUAL_KINDS:
        return _iter_residual(kind, dim, cfg)
    if kind in INDICATOR_KINDS:
        return _iter_indicator(kind, dim, cfg)
    if kind in SLC_KINDS:
        return _iter_slc(kind, dim, cfg)
    if kind in F_KINDS:
        return _iter_f_family(kind, dim, cfg)
    if kind == "c2":
        return _iter_c2(dim, cfg)
    return _iter_fstar(kind, dim, cfg)
