"""Greedy-type constant estimation.

Each constant is the supremum of a norm ratio over the admissible family
described in :mod:`greedykit.instances`.  Exhaustive estimates sweep the
whole grid family with vectorized per-family kernels; sampled estimates
draw seeded instances one at a time.  Either way the reported value is a
certified lower bound for the constant on that grid, normalized so that a
family whose ratios never exceed 1 reports exactly 1.

Determinism contract: for a fixed space, kind and config the estimate is
bit-identical regardless of the worker count.  Work is split into units
(support tuples or set pairs) that are always processed whole; the global
reduction visits units in their canonical order, keeping the first
maximizer on ties.

Ratio conventions:

* a ratio whose numerator and denominator both vanish is skipped;
* a vanishing denominator with a positive numerator is a norm-axiom
  violation and raises :class:`NormAxiomError`;
* the greedy approximation ratio ``cg`` divides by the best projection
  error over index sets of the given size, which upper-bounds the true
  best approximation by arbitrary coefficients, so the reported number is
  a lower bound for the constant (and equals it on 1-unconditional
  spaces).
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import itertools
import multiprocessing
from typing import Iterable, Sequence

import numpy as np

from .core import Space, as_vector, indicator, project
from .greedy import greedy_sets
from .instances import (
    ALL_KINDS,
    F_KINDS,
    FSTAR_KINDS,
    INDICATOR_KINDS,
    RESIDUAL_KINDS,
    SLC_KINDS,
    CapExceededError,
    Instance,
    SearchConfig,
    c2_tuples,
    check_cap,
    disjoint_pairs,
    dominating_levels,
    f_family_splits,
    graded_unit_combos,
    off_unit_levels,
    pool_combos,
    sample_instances,
    signed_values,
    slc_rest,
    subsets_by_size,
    unit_levels,
    enumerate_instances,
    fstar_tuples,
)

__all__ = [
    "ConstantKind",
    "ConstantEstimate",
    "NormAxiomError",
    "estimate_constant",
    "estimate_constants",
    "reference_estimate",
    "instance_ratio",
    "projection_error_min",
    "prefix_error_min",
    "kind_label",
]


class NormAxiomError(RuntimeError):
    """A ratio denominator vanished while its numerator did not."""


class ConstantKind(enum.Enum):
    """The constant tokens accepted everywhere a kind is named."""

    CQ = "cq"
    K = "k"
    CG = "cg"
    CAL = "cal"
    CP = "cp"
    DD = "dd"
    DC = "dc"
    DS = "ds"
    DSC = "dsc"
    SLC = "slc"
    PSLC = "pslc"
    F = "f"
    FP = "fp"
    Q = "q"
    C1 = "c1"
    FSTAR = "fstar"
    FPSTAR = "fpstar"
    C2 = "c2"

    @property
    def token(self) -> str:
        return self.value


_LABELS = {
    "cq": "quasi-greedy projection bound",
    "k": "suppression unconditionality",
    "cg": "greedy approximation ratio",
    "cal": "almost-greedy approximation ratio",
    "cp": "partial-sum greedy ratio",
    "dd": "democracy",
    "dc": "left-conservative democracy",
    "ds": "signed democracy",
    "dsc": "signed left-conservative democracy",
    "slc": "background indicator exchange",
    "pslc": "left-ordered background indicator exchange",
    "f": "dominated indicator exchange",
    "fp": "left-ordered dominated indicator exchange",
    "q": "equal-size indicator exchange",
    "c1": "signed dominated indicator exchange",
    "fstar": "unit-part exchange",
    "fpstar": "left-ordered unit-part exchange",
    "c2": "projected unit-part exchange",
}


def kind_label(token: str) -> str:
    return _LABELS[token]


def coerce_kind(kind) -> str:
    if isinstance(kind, ConstantKind):
        return kind.value
    kind = str(kind)
    if kind not in ALL_KINDS:
        raise ValueError(f"unknown constant kind {kind!r}")
    return kind


@dataclasses.dataclass(frozen=True)
class ConstantEstimate:
    """Result of estimating one constant on one space.

    ``value`` is 0 only when the family produced no ratio at all
    (``vacuous``); otherwise it is max(1, best ratio).  ``witness_ratio``
    keeps the raw best ratio so the maximizing instance can be replayed
    even when normalization lifted the value to 1 (``clamped``).
    """

    kind: str
    value: float
    exactness: str
    clamped: bool
    vacuous: bool
    witness: Instance | None
    witness_ratio: float | None
    search: dict | None
    space: dict | None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": kind_label(self.kind),
            "value": self.value,
            "exactness": self.exactness,
            "clamped": self.clamped,
            "vacuous": self.vacuous,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "witness_ratio": self.witness_ratio,
            "search": self.search,
            "space": self.space,
        }


# ---------------------------------------------------------------------------
# single-instance ratio semantics (the reference route)

@functools.lru_cache(maxsize=8)
def _mask_table(dim: int):
    if dim > 22:
        raise ValueError("exhaustive subset tables need dim <= 22")
    ids = np.arange(1 << dim)
    bits = ((ids[:, None] >> np.arange(dim)[None, :]) & 1).astype(float)
    pop = bits.sum(axis=1).astype(int)
    prefix_ids = np.array([(1 << k) - 1 for k in range(dim + 1)])
    return bits, pop, prefix_ids


def _chunked_norms(space: Space, rows: np.ndarray, chunk: int = 1 << 18) -> np.ndarray:
    n = rows.shape[0]
    if n <= chunk:
        return space.norm_rows(rows)
    out = np.empty(n)
    for lo in range(0, n, chunk):
        out[lo:lo + chunk] = space.norm_rows(rows[lo:lo + chunk])
    return out


def projection_error_min(space: Space, f, m: int) -> float:
    """min over |B| <= m of the norm of f with B zeroed out."""
    f = as_vector(f, space.dim)
    bits, pop, _ = _mask_table(space.dim)
    keep = pop <= m
    rows = f[None, :] * (1.0 - bits[keep])
    return float(_chunked_norms(space, rows).min())


def prefix_error_min(space: Space, f, m: int) -> float:
    """min over 0 <= k <= m of the norm of f with its first k entries zeroed."""
    f = as_vector(f, space.dim)
    rows = np.repeat(f[None, :], m + 1, axis=0)
    for k in range(m + 1):
        rows[k, :k] = 0.0
    return float(space.norm_rows(rows).min())


def _ratio(num: float, den: float, kind: str) -> float | None:
    if den == 0.0:
        if num == 0.0:
            return None
        raise NormAxiomError(
            f"{kind}: denominator vanished on a nonzero numerator ({num})"
        )
    return num / den


def instance_ratio(space: Space, inst: Instance) -> float | None:
    """The instance's norm ratio, or None when it is vacuous (0/0)."""
    dim = space.dim
    kind = inst.kind
    v = inst.vectors
    s = inst.sets
    if kind in ("cq", "cg", "cal", "cp"):
        f = as_vector(v["f"], dim)
        num = space.norm(f - project(f, s["A"]))
        if kind == "cq":
            den = space.norm(f)
        elif kind == "cp":
            den = prefix_error_min(space, f, inst.m)
        else:
            den = projection_error_min(space, f, inst.m)
        return _ratio(num, den, kind)
    if kind == "k":
        f = as_vector(v["f"], dim)
        return _ratio(space.norm(project(f, s["A"])), space.norm(f), kind)
    if kind in INDICATOR_KINDS:
        num = space.norm(indicator(s["A"], inst.signs.get("A"), dim))
        den = space.norm(indicator(s["B"], inst.signs.get("B"), dim))
        return _ratio(num, den, kind)
    if kind in SLC_KINDS:
        f = as_vector(v["f"], dim)
        num = space.norm(f + indicator(s["A"], inst.signs.get("A"), dim))
        den = space.norm(f + indicator(s["B"], inst.signs.get("B"), dim))
        return _ratio(num, den, kind)
    if kind in ("f", "fp", "q", "c1"):
        f = as_vector(v["f"], dim)
        g = as_vector(v["g"], dim)
        eps = inst.signs.get("A") if kind == "c1" else None
        eta = inst.signs.get("B") if kind == "c1" else None
        num = space.norm(f + indicator(s["A"], eps, dim))
        den = space.norm(f + g + indicator(s["B"], eta, dim))
        return _ratio(num, den, kind)
    if kind in ("fstar", "fpstar"):
        f = as_vector(v["f"], dim)
        z = as_vector(v["z"], dim)
        y = as_vector(v["y"], dim)
        return _ratio(space.norm(f + z), space.norm(f + y), kind)
    if kind == "c2":
        f = as_vector(v["f"], dim)
        y = as_vector(v["y"], dim)
        num = space.norm(f)
        den = space.norm(f - project(f, s["A"]) + y)
        return _ratio(num, den, kind)
    raise ValueError(f"unknown constant kind {kind!r}")


# ---------------------------------------------------------------------------
# shared kernel helpers

def _embed(rows: np.ndarray, where: Sequence[int], dim: int) -> np.ndarray:
    out = np.zeros((rows.shape[0], dim))
    if where:
        out[:, [i - 1 for i in where]] = rows
    return out


def _signed_indicator_rows(A: Sequence[int], dim: int) -> np.ndarray:
    """Indicator vectors of A under every sign pattern, product order."""
    signs = pool_combos(signed_values((1,), 1), len(A), 1)
    return _embed(signs, A, dim)


def _sign_tuple(idx: int, size: int) -> tuple[int, ...]:
    out = []
    for pos in range(size):
        shift = size - 1 - pos
        out.append(1 if ((idx >> shift) & 1) == 0 else -1)
    return tuple(out)


def _mask_id(A: Iterable[int]) -> int:
    out = 0
    for i in A:
        out |= 1 << (i - 1)
    return out


def _set_of_mask(mask: int, dim: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(dim) if (mask >> i) & 1)


def _y_rows(dim: int, Sy: tuple, D: tuple, jf: int, levels: int) -> np.ndarray:
    """All admissible y vectors: exact units on D, dominating values off D."""
    offd = tuple(i for i in Sy if i not in D)
    sgn = pool_combos(signed_values((1,), 1), len(D), 1)
    off = pool_combos(signed_values(off_unit_levels(levels, max(jf, 1)), levels),
                      len(offd), levels)
    S, P = sgn.shape[0], off.shape[0]
    out = np.zeros((S * P, dim))
    if D:
        out[:, [i - 1 for i in D]] = np.repeat(sgn, P, axis=0)
    if offd:
        out[:, [i - 1 for i in offd]] = np.tile(off, (S, 1))
    return out


class _Best:
    """Running (ratio, witness) maximum; first maximizer wins ties."""

    __slots__ = ("ratio", "witness", "evaluated")

    def __init__(self):
        self.ratio = None
        self.witness = None
        self.evaluated = False

    def offer(self, ratio: float, witness_fn):
        self.evaluated = True
        if self.ratio is None or ratio > self.ratio:
            self.ratio = float(ratio)
            self.witness = witness_fn()

    def as_tuple(self):
        return (self.ratio, self.witness, self.evaluated)


def _den_guard(kind: str, num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Boolean mask of usable entries; raises on num > 0 over a zero den."""
    zero = den == 0.0
    if np.any(zero & (num > 0.0)):
        raise NormAxiomError(f"{kind}: denominator vanished on a nonzero numerator")
    return ~zero


# ---------------------------------------------------------------------------
# family kernels (one call = one whole unit of work)

def _residual_unit(space: Space, cfg: SearchConfig, Sf: tuple) -> dict:
    dim = space.dim
    L = cfg.levels
    cap = cfg.support_cap(dim)
    bits, pop, prefix_ids = _mask_table(dim)
    M = bits.shape[0]
    combos = pool_combos(signed_values(unit_levels(L), L), len(Sf), L)
    V = _embed(combos, Sf, dim)
    F = V.shape[0]

    res = np.empty((F, M))
    block = max(1, (1 << 21) // (M * dim))
    for lo in range(0, F, block):
        part = V[lo:lo + block]
        rows = (part[:, None, :] * (1.0 - bits[None, :, :])).reshape(-1, dim)
        res[lo:lo + block] = _chunked_norms(space, rows).reshape(part.shape[0], M)
    normf = res[:, 0]

    out = {}

    # Unconditionality: P_A f is f minus the projection on the complement.
    cand = np.flatnonzero(pop >= dim - cap)
    kmat = res[:, cand] / normf[:, None]
    flat = int(np.argmax(kmat))
    r_idx, c_idx = divmod(flat, cand.size)
    a_mask = (M - 1) ^ int(cand[c_idx])
    k_best = _Best()
    k_best.offer(float(kmat.flat[flat]), lambda: Instance(
        "k", {"f": V[r_idx].copy()}, {"A": _set_of_mask(a_mask, dim)}, {}))
    out["k"] = k_best.as_tuple()

    # Best projection error by size class, cumulative over sizes.
    cls = np.empty((F, dim + 1))
    for p in range(dim + 1):
        cols = np.flatnonzero(pop == p)
        cls[:, p] = res[:, cols].min(axis=1)
    cls_cum = np.minimum.accumulate(cls, axis=1)
    pref_cum = np.minimum.accumulate(res[:, prefix_ids], axis=1)

    bests = {tok: _Best() for tok in ("cq", "cg", "cal", "cp")}
    for r in range(F):
        frow = V[r]
        nf = normf[r]
        # Greedy sets of order above the support size drop all of f, so
        # every ratio they generate is 0 or skipped; they are not swept.
        for m in range(0, len(Sf) + 1):
            for A in greedy_sets(frow, m):
                num = res[r, _mask_id(A)]

                def wit(tok=None, A=A, m=m, r=r):
                    return Instance(tok, {"f": V[r].copy()}, {"A": A}, {}, m=m)

                bests["cq"].offer(num / nf, functools.partial(wit, "cq"))
                dal = cls_cum[r, m]
                if dal > 0.0:
                    bests["cg"].offer(num / dal, functools.partial(wit, "cg"))
                    bests["cal"].offer(num / dal, functools.partial(wit, "cal"))
                dp = pref_cum[r, m]
                if dp > 0.0:
                    bests["cp"].offer(num / dp, functools.partial(wit, "cp"))
    for tok in ("cq", "cg", "cal", "cp"):
        out[tok] = bests[tok].as_tuple()
    return out


def _indicator_unit(space: Space, cfg: SearchConfig, _unit) -> dict:
    dim = space.dim
    cap = cfg.support_cap(dim)
    all_idx = tuple(range(1, dim + 1))

    unsigned = [(A, (1,) * len(A)) for A in subsets_by_size(all_idx, cap)]
    signed_items: list[tuple[tuple, tuple]] = []
    for A, _ones in unsigned:
        for eps in itertools.product((1, -1), repeat=len(A)):
            signed_items.append((A, eps))

    def norms_of(items):
        rows = np.zeros((len(items), dim))
        for i, (A, eps) in enumerate(items):
            for j, sg in zip(A, eps):
                rows[i, j - 1] = float(sg)
        return _chunked_norms(space, rows)

    u_norms = norms_of(unsigned)
    s_norms = norms_of(signed_items)

    def classes(items, norms, key_fn):
        """First max and first min per key, in enumeration order."""
        hi: dict = {}
        lo: dict = {}
        for i, item in enumerate(items):
            key = key_fn(item[0])
            n = float(norms[i])
            if key not in hi or n > hi[key][0]:
                hi[key] = (n, item)
            if key not in lo or n < lo[key][0]:
                lo[key] = (n, item)
        return hi, lo

    def sweep(kind: str, items, norms, left: bool) -> tuple:
        # Size is all that matters for pairing; the left variants also
        # need the extreme index that the order condition compares.
        hi, _ = classes(items, norms, lambda A: (len(A), max(A) if A else 0))
        _, lo = classes(items, norms, lambda A: (len(A), min(A) if A else 0))
        best = _Best()
        for (a, amax), (num, a_item) in sorted(hi.items()):
            for (b, bmin), (den, b_item) in sorted(lo.items()):
                if a > b:
                    continue
                if left and a > 0 and amax >= bmin:
                    continue
                r = _ratio(num, den, kind)
                if r is None:
                    continue
                best.offer(r, functools.partial(
                    Instance, kind, {}, {"A": a_item[0], "B": b_item[0]},
                    {"A": a_item[1], "B": b_item[1]}))
        return best.as_tuple()

    return {
        "dd": sweep("dd", unsigned, u_norms, left=False),
        "dc": sweep("dc", unsigned, u_norms, left=True),
        "ds": sweep("ds", signed_items, s_norms, left=False),
        "dsc": sweep("dsc", signed_items, s_norms, left=True),
    }


def _slc_unit(space: Space, cfg: SearchConfig, unit, kind: str) -> dict:
    A, B = unit
    dim = space.dim
    L = cfg.levels
    cap = cfg.support_cap(dim)
    partial = kind == "pslc"
    UA = _signed_indicator_rows(A, dim)
    UB = _signed_indicator_rows(B, dim)
    best = _Best()
    for Sf in subsets_by_size(slc_rest(dim, A, B, partial), cap):
        combos = pool_combos(signed_values(unit_levels(L), L), len(Sf), L)
        V = _embed(combos, Sf, dim)
        F = V.shape[0]
        nmat = _chunked_norms(space, (V[:, None, :] + UA[None]).reshape(-1, dim))
        nmat = nmat.reshape(F, UA.shape[0])
        dmat = _chunked_norms(space, (V[:, None, :] + UB[None]).reshape(-1, dim))
        dmat = dmat.reshape(F, UB.shape[0])
        num = nmat.max(axis=1)
        den = dmat.min(axis=1)
        ok = _den_guard(kind, num, den)
        if not ok.any():
            continue
        ratios = np.where(ok, num / np.where(ok, den, 1.0), -np.inf)
        r = int(np.argmax(ratios))
        best.evaluated = True
        if best.ratio is None or ratios[r] > best.ratio:
            eps = _sign_tuple(int(nmat[r].argmax()), len(A))
            eta = _sign_tuple(int(dmat[r].argmin()), len(B))
            best.offer(float(ratios[r]), lambda: Instance(
                kind, {"f": V[r].copy()}, {"A": A, "B": B}, {"A": eps, "B": eta}))
    return {kind: best.as_tuple()}


def _f_unit(space: Space, cfg: SearchConfig, unit, kind: str) -> dict:
    A, B = unit
    dim = space.dim
    L = cfg.levels
    partial = kind == "fp"
    free_g = kind == "q"
    signed = kind == "c1"
    iA = indicator(A, None, dim)
    iB = indicator(B, None, dim)
    UA = _signed_indicator_rows(A, dim) if signed else None
    UB = _signed_indicator_rows(B, dim) if signed else None
    best = _Best()
    for Sf, Sg in f_family_splits(dim, cfg, A, B, partial):
        for jf, f_rows in graded_unit_combos(L, len(Sf)):
            Vf = _embed(f_rows, Sf, dim)
            F = Vf.shape[0]
            pool = dominating_levels(L, 1) if free_g else dominating_levels(L, max(jf, 1))
            g_rows = pool_combos(signed_values(pool, L), len(Sg), L)
            Vg = _embed(g_rows, Sg, dim)
            G = Vg.shape[0]
            if signed:
                nmat = _chunked_norms(space, (Vf[:, None, :] + UA[None]).reshape(-1, dim))
                nmat = nmat.reshape(F, UA.shape[0])
                num = nmat.max(axis=1)
            else:
                num = _chunked_norms(space, Vf + iA[None, :])
            if signed:
                dbase = (Vg[:, None, :] + UB[None]).reshape(-1, dim)
            else:
                dbase = Vg + iB[None, :]
            Dn = dbase.shape[0]
            block = max(1, (1 << 21) // max(1, Dn * dim))
            den = np.empty(F)
            darg = np.empty(F, dtype=int)
            for lo in range(0, F, block):
                part = Vf[lo:lo + block]
                rows = (part[:, None, :] + dbase[None, :, :]).reshape(-1, dim)
                dm = _chunked_norms(space, rows).reshape(part.shape[0], Dn)
                den[lo:lo + block] = dm.min(axis=1)
                darg[lo:lo + block] = dm.argmin(axis=1)
            ok = _den_guard(kind, num, den)
            if not ok.any():
                continue
            ratios = np.where(ok, num / np.where(ok, den, 1.0), -np.inf)
            r = int(np.argmax(ratios))
            best.evaluated = True
            if best.ratio is None or ratios[r] > best.ratio:
                signs = {}
                if signed:
                    g_idx, b_idx = divmod(int(darg[r]), UB.shape[0])
                    signs = {"A": _sign_tuple(int(nmat[r].argmax()), len(A)),
                             "B": _sign_tuple(b_idx, len(B))}
                    gvec = Vg[g_idx].copy()
                else:
                    gvec = Vg[int(darg[r])].copy()
                best.offer(float(ratios[r]), lambda: Instance(
                    kind, {"f": Vf[r].copy(), "g": gvec}, {"A": A, "B": B}, signs))
    return {kind: best.as_tuple()}


def _fstar_unit(space: Space, cfg: SearchConfig, unit, kind: str) -> dict:
    Sf, Sz, Sy, D = unit
    dim = space.dim
    L = cfg.levels
    z_rows = pool_combos(signed_values(unit_levels(L), L), len(Sz), L)
    Vz = _embed(z_rows, Sz, dim)
    best = _Best()
    for jf, f_rows in graded_unit_combos(L, len(Sf)):
        Vf = _embed(f_rows, Sf, dim)
        F = Vf.shape[0]
        Y = _y_rows(dim, Sy, D, jf, L)
        nmat = _chunked_norms(space, (Vf[:, None, :] + Vz[None]).reshape(-1, dim))
        nmat = nmat.reshape(F, Vz.shape[0])
        dmat = _chunked_norms(space, (Vf[:, None, :] + Y[None]).reshape(-1, dim))
        dmat = dmat.reshape(F, Y.shape[0])
        num = nmat.max(axis=1)
        den = dmat.min(axis=1)
        ok = _den_guard(kind, num, den)
        if not ok.any():
            continue
        ratios = np.where(ok, num / np.where(ok, den, 1.0), -np.inf)
        r = int(np.argmax(ratios))
        best.evaluated = True
        if best.ratio is None or ratios[r] > best.ratio:
            zvec = Vz[int(nmat[r].argmax())].copy()
            yvec = Y[int(dmat[r].argmin())].copy()
            best.offer(float(ratios[r]), lambda: Instance(
                kind, {"f": Vf[r].copy(), "z": zvec, "y": yvec}, {}, {}))
    return {kind: best.as_tuple()}


def _c2_unit(space: Space, cfg: SearchConfig, unit) -> dict:
    Sf, A, Sy, D = unit
    dim = space.dim
    L = cfg.levels
    drop = np.ones(dim)
    for i in A:
        drop[i - 1] = 0.0
    best = _Best()
    for jf, f_rows in graded_unit_combos(L, len(Sf)):
        Vf = _embed(f_rows, Sf, dim)
        F = Vf.shape[0]
        Y = _y_rows(dim, Sy, D, jf, L)
        num = _chunked_norms(space, Vf)
        proj = Vf * drop[None, :]
        dmat = _chunked_norms(space, (proj[:, None, :] + Y[None]).reshape(-1, dim))
        dmat = dmat.reshape(F, Y.shape[0])
        den = dmat.min(axis=1)
        ok = _den_guard("c2", num, den)
        if not ok.any():
            continue
        ratios = np.where(ok, num / np.where(ok, den, 1.0), -np.inf)
        r = int(np.argmax(ratios))
        best.evaluated = True
        if best.ratio is None or ratios[r] > best.ratio:
            yvec = Y[int(dmat[r].argmin())].copy()
            best.offer(float(ratios[r]), lambda: Instance(
                "c2", {"f": Vf[r].copy(), "y": yvec}, {"A": A}, {}))
    return {"c2": best.as_tuple()}


# ---------------------------------------------------------------------------
# unit scheduling

def _family_of(kind: str) -> str:
    if kind in RESIDUAL_KINDS:
        return "residual"
    if kind in INDICATOR_KINDS:
        return "indicator"
    if kind in SLC_KINDS:
        return "slc"
    if kind in F_KINDS:
        return "f"
    if kind == "c2":
        return "c2"
    return "fstar"


def _units_for(family: str, kind: str | None, dim: int, cfg: SearchConfig) -> list:
    all_idx = tuple(range(1, dim + 1))
    if family == "residual":
        return [Sf for Sf in subsets_by_size(all_idx, cfg.support_cap(dim)) if Sf]
    if family == "indicator":
        return [0]
    if family == "slc":
        return list(disjoint_pairs(dim, cfg, left=(kind == "pslc")))
    if family == "f":
        return list(disjoint_pairs(dim, cfg, equal_size=(kind == "q"),
                                   left=(kind == "fp")))
    if family == "fstar":
        return list(fstar_tuples(dim, cfg, partial=(kind == "fpstar")))
    if family == "c2":
        return list(c2_tuples(dim, cfg))
    raise ValueError(family)


def _run_unit(space: Space, family: str, kind: str | None, cfg: SearchConfig, unit) -> dict:
    if family == "residual":
        return _residual_unit(space, cfg, unit)
    if family == "indicator":
        return _indicator_unit(space, cfg, unit)
    if family == "slc":
        return _slc_unit(space, cfg, unit, kind)
    if family == "f":
        return _f_unit(space, cfg, unit, kind)
    if family == "fstar":
        return _fstar_unit(space, cfg, unit, kind)
    if family == "c2":
        return _c2_unit(space, cfg, unit)
    raise ValueError(family)


def _worker_main(args):
    space, family, kind, cfg, units, ids = args
    return [(i, _run_unit(space, family, kind, cfg, units[i])) for i in ids]


def _sweep_family(space: Space, family: str, kind: str | None, cfg: SearchConfig,
                  workers: int) -> dict:
    units = _units_for(family, kind, space.dim, cfg)
    results: list[tuple[int, dict]] = []
    if workers <= 1 or len(units) <= 1:
        results = [(i, _run_unit(space, family, kind, cfg, u))
                   for i, u in enumerate(units)]
    else:
        parts = [list(range(w, len(units), workers)) for w in range(workers)]
        parts = [p for p in parts if p]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=len(parts)) as pool:
            chunks = pool.map(
                _worker_main,
                [(space, family, kind, cfg, units, ids) for ids in parts],
            )
        for chunk in chunks:
            results.extend(chunk)
        results.sort(key=lambda t: t[0])
    merged: dict = {}
    for _idx, per_kind in results:
        for tok, (ratio, witness, evaluated) in per_kind.items():
            slot = merged.setdefault(tok, _Best())
            slot.evaluated = slot.evaluated or evaluated
            if ratio is not None and (slot.ratio is None or ratio > slot.ratio):
                slot.ratio = ratio
                slot.witness = witness
    return {tok: b.as_tuple() for tok, b in merged.items()}


# ---------------------------------------------------------------------------
# public estimation API

def _finish(kind: str, raw, witness, evaluated: bool, cfg: SearchConfig,
            space: Space) -> ConstantEstimate:
    spec = getattr(space, "spec", None)
    spec_dict = spec.to_dict() if hasattr(spec, "to_dict") else None
    if not evaluated:
        return ConstantEstimate(kind, 0.0, "grid-lower-bound", False, True,
                                None, None, cfg.to_dict(), spec_dict)
    value = max(1.0, raw)
    return ConstantEstimate(kind, float(value), "grid-lower-bound",
                            bool(raw < 1.0), False, witness, float(raw),
                            cfg.to_dict(), spec_dict)


def _analytic_estimate(space: Space, kind: str, cfg: SearchConfig) -> ConstantEstimate:
    spec = getattr(space, "spec", None)
    spec_dict = spec.to_dict() if hasattr(spec, "to_dict") else None
    return ConstantEstimate(kind, float(space.analytic[kind]), "analytic-exact",
                            False, False, None, None, cfg.to_dict(), spec_dict)


def _estimate_sampled(space: Space, kind: str, cfg: SearchConfig) -> ConstantEstimate:
    best = _Best()
    for inst in sample_instances(kind, space.dim, cfg):
        r = instance_ratio(space, inst)
        if r is None:
            continue
        best.offer(r, lambda inst=inst: inst)
    return _finish(kind, best.ratio, best.witness, best.evaluated, cfg, space)


def _search_cache(space: Space) -> dict:
    # Searched estimates are worker-count independent, so they memoize on
    # the space object keyed by (kind, cfg) alone.
    cache = getattr(space, "_estimate_cache", None)
    if cache is None:
        cache = {}
        space._estimate_cache = cache
    return cache


def estimate_constant(space: Space, kind, cfg: SearchConfig | None = None,
                      workers: int = 1, prefer_analytic: bool = True) -> ConstantEstimate:
    """Estimate one constant; see :func:`estimate_constants` for batches."""
    kind = coerce_kind(kind)
    cfg = cfg or SearchConfig()
    if prefer_analytic and kind in space.analytic:
        return _analytic_estimate(space, kind, cfg)
    cache = _search_cache(space)
    hit = cache.get((kind, cfg))
    if hit is not None:
        return hit
    if cfg.mode == "sampled":
        est = _estimate_sampled(space, kind, cfg)
    else:
        check_cap(kind, space.dim, cfg)
        family = _family_of(kind)
        swept = _sweep_family(space, family, kind, cfg, workers)
        raw, witness, evaluated = swept[kind]
        est = _finish(kind, raw, witness, evaluated, cfg, space)
    cache[(kind, cfg)] = est
    return est


def estimate_constants(space: Space, kinds: Sequence | None = None,
                       cfg: SearchConfig | None = None, workers: int = 1,
                       prefer_analytic: bool = True) -> dict[str, ConstantEstimate]:
    """Estimate several constants, sharing sweeps where families allow.

    The residual-family kinds (cq, k, cg, cal, cp) come out of a single
    sweep, so asking for all five costs one pass.  Results are keyed by
    token and each equals the single-kind estimate exactly.
    """
    cfg = cfg or SearchConfig()
    tokens = [coerce_kind(k) for k in (kinds if kinds is not None else ALL_KINDS)]
    seen: set = set()
    tokens = [t for t in tokens if not (t in seen or seen.add(t))]
    out: dict[str, ConstantEstimate] = {}
    searched = [t for t in tokens
                if not (prefer_analytic and t in space.analytic)]
    residual_batch = [t for t in searched if t in RESIDUAL_KINDS]
    if cfg.mode == "exhaustive" and len(residual_batch) > 1:
        cache = _search_cache(space)
        if any((t, cfg) not in cache for t in residual_batch):
            for t in residual_batch:
                check_cap(t, space.dim, cfg)
            swept = _sweep_family(space, "residual", None, cfg, workers)
            for t in residual_batch:
                raw, witness, evaluated = swept[t]
                cache[(t, cfg)] = _finish(t, raw, witness, evaluated, cfg, space)
        for t in residual_batch:
            out[t] = cache[(t, cfg)]
    for t in tokens:
        if t in out:
            continue
        out[t] = estimate_constant(space, t, cfg, workers, prefer_analytic)
    return {t: out[t] for t in tokens}


def reference_estimate(space: Space, kind, cfg: SearchConfig | None = None) -> ConstantEstimate:
    """Slow single-instance sweep; the independent check for the kernels.

    Walks :func:`greedykit.instances.enumerate_instances` and scores each
    instance with :func:`instance_ratio`.  Shares no reduction code with
    the vectorized path on purpose.
    """
    kind = coerce_kind(kind)
    cfg = cfg or SearchConfig()
    best_ratio = None
    best_witness = None
    evaluated = False
    for inst in enumerate_instances(kind, space.dim, cfg):
        r = instance_ratio(space, inst)
        if r is None:
            continue
        evaluated = True
        if best_ratio is None or r > best_ratio:
            best_ratio = r
            best_witness = inst
    return _finish(kind, best_ratio, best_witness, evaluated, cfg, space)
