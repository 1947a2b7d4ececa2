"""Checks for the inequality lattice between the greedy constants.

Two modes.  Pointwise checks enumerate concrete vectors and assert a
bound instance by instance: the convex-domination bound, the
signed-vs-subset exchange bound (factor 3), the truncation bound and the
sign-invariance bound, plus each characterization row whose bound side is
known analytically.  Chain checks compare searched estimates against a
closed-form expression in other constants.  A chain row whose bound uses
estimated constants is advisory: both sides are lower bounds of the true
constants, so a failure there flags an inconsistency under the given
search configuration (an implementation bug), never a refuted
inequality.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Iterator, Sequence

import numpy as np

from .catalog import SpaceSpec, direct_sum_spec, make_space
from .constants import estimate_constant, estimate_constants
from .core import Space
from .greedy import truncate
from .instances import (
    SearchConfig,
    pool_combos,
    signed_values,
    subsets_by_size,
    unit_levels,
)

TOL = 1e-9

CHAIN_IDS = (
    "thm_greedy_char",
    "thm_almost_char",
    "thm_partial_char",
    "thm_p1",
    "thm_p2",
    "thm_main",
    "thm_maintwo",
    "thm_new",
    "prop1",
)
LEMMA_IDS = ("lemma_convex", "lemma_guau", "lemma_trunc", "sign_invariance")
THEOREM_IDS = CHAIN_IDS + LEMMA_IDS

ADVISORY_NOTE = "inconsistent under cfg"


@dataclasses.dataclass(frozen=True)
class CheckResult:
    """One inequality row: observed value against its bound."""

    desc: str
    mode: str
    bound: float
    observed: float
    passed: bool
    advisory: bool = False
    witness: dict | None = None

    @property
    def note(self) -> str | None:
        if self.advisory and not self.passed:
            return ADVISORY_NOTE
        return None

    def to_dict(self) -> dict:
        return {
            "desc": self.desc,
            "mode": self.mode,
            "bound": self.bound,
            "observed": self.observed,
            "pass": self.passed,
            "advisory": self.advisory,
            "note": self.note,
            "witness": self.witness,
        }


@dataclasses.dataclass(frozen=True)
class VerificationReport:
    theorem: str
    space: dict | None
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        """Hard verdict: advisory rows never fail the report."""
        return all(c.passed or c.advisory for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "space": self.space,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }


# ---------------------------------------------------------------------------
# chain registry

@dataclasses.dataclass(frozen=True)
class _Row:
    desc: str
    target: str
    direction: str  # "upper": target <= formula; "lower": target >= formula
    consts: tuple[str, ...]
    formula: Callable[[dict], float]


def _row(desc: str, target: str, direction: str, consts: Sequence[str],
         formula: Callable[[dict], float]) -> _Row:
    return _Row(desc, target, direction, tuple(consts), formula)


_CHAINS: dict[str, tuple[_Row, ...]] = {
    "thm_greedy_char": (
        _row("cg >= max(k, dd)", "cg", "lower", ("k", "dd"),
             lambda c: max(c["k"], c["dd"])),
        _row("cg <= k + k^2*dd", "cg", "upper", ("k", "dd"),
             lambda c: c["k"] + c["k"] ** 2 * c["dd"]),
        _row("cg >= max(k, ds)", "cg", "lower", ("k", "ds"),
             lambda c: max(c["k"], c["ds"])),
        _row("cg <= k + k*ds", "cg", "upper", ("k", "ds"),
             lambda c: c["k"] + c["k"] * c["ds"]),
        _row("cg <= k*slc", "cg", "upper", ("k", "slc"),
             lambda c: c["k"] * c["slc"]),
    ),
    "thm_almost_char": (
        _row("cal >= max(cq, dd)", "cal", "lower", ("cq", "dd"),
             lambda c: max(c["cq"], c["dd"])),
        _row("cal <= 8*cq^4*dd + cq + 1", "cal", "upper", ("cq", "dd"),
             lambda c: 8 * c["cq"] ** 4 * c["dd"] + c["cq"] + 1),
        _row("cal >= max(cq, ds)", "cal", "lower", ("cq", "ds"),
             lambda c: max(c["cq"], c["ds"])),
        _row("cal <= cq + cq*ds", "cal", "upper", ("cq", "ds"),
             lambda c: c["cq"] + c["cq"] * c["ds"]),
        _row("cal <= cq*slc", "cal", "upper", ("cq", "slc"),
             lambda c: c["cq"] * c["slc"]),
    ),
    "thm_partial_char": (
        _row("cp >= max(cq, dc)", "cp", "lower", ("cq", "dc"),
             lambda c: max(c["cq"], c["dc"])),
        _row("cp <= cq + cq^2*(1+cq)*dc", "cp", "upper", ("cq", "dc"),
             lambda c: c["cq"] + c["cq"] ** 2 * (1 + c["cq"]) * c["dc"]),
        _row("cp >= max(cq, dsc)", "cp", "lower", ("cq", "dsc"),
             lambda c: max(c["cq"], c["dsc"])),
        _row("cp <= cq + cq*(1+cq)*dsc", "cp", "upper", ("cq", "dsc"),
             lambda c: c["cq"] + c["cq"] * (1 + c["cq"]) * c["dsc"]),
        _row("cp <= cq*pslc", "cp", "upper", ("cq", "pslc"),
             lambda c: c["cq"] * c["pslc"]),
    ),
    "thm_p1": (
        _row("f >= max(cq, dd)", "f", "lower", ("cq", "dd"),
             lambda c: max(c["cq"], c["dd"])),
        _row("slc <= 5*(f + 4*f^2 + 4*f^3)", "slc", "upper", ("f",),
             lambda c: 5 * (c["f"] + 4 * c["f"] ** 2 + 4 * c["f"] ** 3)),
        _row("f <= cq*(1 + (1+cq)*dd)", "f", "upper", ("cq", "dd"),
             lambda c: c["cq"] * (1 + (1 + c["cq"]) * c["dd"])),
        _row("f <= 3*slc*cq", "f", "upper", ("slc", "cq"),
             lambda c: 3 * c["slc"] * c["cq"]),
    ),
    "thm_p2": (
        _row("f <= fstar", "f", "upper", ("fstar",), lambda c: c["fstar"]),
        _row("fstar <= 5*f*(1 + 2*f + 8*f^2)", "fstar", "upper", ("f",),
             lambda c: 5 * c["f"] * (1 + 2 * c["f"] + 8 * c["f"] ** 2)),
    ),
    "thm_main": (
        _row("fstar <= cal*(1 + 2*cal)", "fstar", "upper", ("cal",),
             lambda c: c["cal"] * (1 + 2 * c["cal"])),
        _row("cal <= fstar^2", "cal", "upper", ("fstar",),
             lambda c: c["fstar"] ** 2),
    ),
    "thm_maintwo": (
        _row("fpstar <= cp*(1 + 2*cp)", "fpstar", "upper", ("cp",),
             lambda c: c["cp"] * (1 + 2 * c["cp"])),
        _row("cp <= fpstar^2", "cp", "upper", ("fpstar",),
             lambda c: c["fpstar"] ** 2),
    ),
    "thm_new": (
        _row("fp >= max(dc, cq)", "fp", "lower", ("dc", "cq"),
             lambda c: max(c["dc"], c["cq"])),
        _row("fp <= 2 + cq + 2*cq*dc", "fp", "upper", ("cq", "dc"),
             lambda c: 2 + c["cq"] + 2 * c["cq"] * c["dc"]),
    ),
    "prop1": (
        _row("fstar <= c1", "fstar", "upper", ("c1",), lambda c: c["c1"]),
        _row("c2 <= fstar", "c2", "upper", ("fstar",), lambda c: c["fstar"]),
        _row("c1 <= c2", "c1", "upper", ("c2",), lambda c: c["c2"]),
    ),
}


def _verify_chain(space: Space, theorem_id: str, cfg: SearchConfig,
                  workers: int) -> VerificationReport:
    rows = _CHAINS[theorem_id]
    tokens = sorted({t for r in rows for t in (r.target, *r.consts)})
    searched = estimate_constants(space, tokens, cfg, workers=workers,
                                  prefer_analytic=False)
    analytic = space.analytic

    def bound_value(token: str) -> float:
        if token in analytic:
            return float(analytic[token])
        return searched[token].value

    checks = []
    for row in rows:
        bound = float(row.formula({t: bound_value(t) for t in row.consts}))
        est = searched[row.target]
        witness = est.witness.to_dict() if est.witness is not None else None
        if row.direction == "upper":
            # The searched sup ratio must sit under the bound.  With every
            # bound-side constant analytic this is the instance-wise check.
            observed = 0.0 if est.witness_ratio is None else est.witness_ratio
            hard = all(t in analytic for t in row.consts)
            mode = "pointwise" if hard else "chain"
            ok = observed <= bound + TOL
        else:
            if row.target in analytic:
                observed = float(analytic[row.target])
            else:
                observed = est.value
            hard = row.target in analytic and all(t in analytic for t in row.consts)
            mode = "chain"
            ok = observed >= bound - TOL
        checks.append(CheckResult(row.desc, mode, bound, float(observed), ok,
                                  advisory=not hard, witness=witness))
    return VerificationReport(theorem_id, _space_dict(space), tuple(checks))


# ---------------------------------------------------------------------------
# pointwise sweeps

def _space_dict(space: Space) -> dict | None:
    return space.spec.to_dict() if getattr(space, "spec", None) is not None else None


def _embed(rows: np.ndarray, where: Sequence[int], dim: int) -> np.ndarray:
    out = np.zeros((len(rows), dim))
    if where:
        out[:, [i - 1 for i in where]] = rows
    return out


def _cube(values: Sequence[float], size: int) -> np.ndarray:
    """(len(values) ** size, size) grid, product order."""
    if size == 0:
        return np.zeros((1, 0))
    vals = np.asarray(values, dtype=float)
    grids = np.meshgrid(*([vals] * size), indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, size)


def _grid_vectors(dim: int, cfg: SearchConfig,
                  skip_empty: bool = False) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """(support, full-dimension rows) over the unit grid, sizes ascending."""
    pool = signed_values(unit_levels(cfg.levels), cfg.levels)
    for s in subsets_by_size(range(1, dim + 1), cfg.support_cap(dim)):
        if skip_empty and not s:
            continue
        yield s, _embed(pool_combos(pool, len(s), cfg.levels), s, dim)


class _Argmax:
    """Running maximum with a strict-improvement witness (first wins ties)."""

    def __init__(self) -> None:
        self.value = 0.0
        self.witness: dict | None = None
        self.seen = False

    def offer_block(self, ratios: np.ndarray, make_witness) -> None:
        if ratios.size == 0:
            return
        i = int(np.argmax(ratios))
        r = float(ratios[i])
        self.seen = True
        if self.witness is None or r > self.value:
            self.value = r
            self.witness = make_witness(i)


def _max_norm_blocks(space: Space, base: np.ndarray, add: np.ndarray) -> np.ndarray:
    """max_j ||base_i + add_j|| for every row of base, chunked over base."""
    dim = base.shape[1]
    out = np.empty(len(base))
    step = max(1, (1 << 20) // max(1, len(add) * dim))
    for ofs in range(0, len(base), step):
        blk = base[ofs:ofs + step]
        stacked = (blk[:, None, :] + add[None, :, :]).reshape(-1, dim)
        out[ofs:ofs + len(blk)] = space.norm_rows(stacked).reshape(len(blk), -1).max(axis=1)
    return out


def _check_convex(space: Space, cfg: SearchConfig) -> list[CheckResult]:
    """Grid coefficients never beat the best vertex row.

    Row one: a in [0,1]^J against the subset rows g + 1_A, A inside J.
    Row two: |a_j| <= 1 against the full-J sign rows g + 1_eps(J).
    """
    dim = space.dim
    cap = cfg.support_cap(dim)
    quarter = np.linspace(0.0, 1.0, 5)
    signed_quarter = np.linspace(-1.0, 1.0, 9)
    best = (_Argmax(), _Argmax())
    for Sg, gfull in _grid_vectors(dim, cfg):
        rest = tuple(i for i in range(1, dim + 1) if i not in Sg)
        for J in subsets_by_size(rest, cap):
            if not J:
                continue
            k = len(J)
            cases = (
                (0, _cube(quarter, k), _cube((0.0, 1.0), k)),
                (1, _cube(signed_quarter, k), _cube((-1.0, 1.0), k)),
            )
            for which, interior, vertices in cases:
                lhs = _max_norm_blocks(space, gfull, _embed(interior, J, dim))
                rhs = _max_norm_blocks(space, gfull, _embed(vertices, J, dim))
                # rhs > 0: some vertex row differs from -g on J.
                per_g = lhs / rhs

                def witness(i, Sg=Sg, J=J, gfull=gfull, interior=interior,
                            rhs=rhs, lhs=lhs, which=which):
                    g = gfull[i]
                    adds = space.norm_rows(
                        g[None, :] + _embed(interior, J, dim))
                    j = int(np.argmax(adds))
                    return {
                        "g": [float(x) for x in g],
                        "J": list(J),
                        "coefficients": [float(x) for x in interior[j]],
                        "grid_norm": float(lhs[i]),
                        "vertex_norm": float(rhs[i]),
                    }

                best[which].offer_block(per_g, witness)
    descs = (
        "||g + sum_j a_j e_j|| <= max_{A in J} ||g + 1_A||, a in [0,1]^J",
        "||g + sum_j a_j e_j|| <= max_eps ||g + 1_eps(J)||, |a_j| <= 1",
    )
    out = []
    for which, desc in enumerate(descs):
        b = best[which]
        out.append(CheckResult(desc, "pointwise", 1.0, b.value,
                               b.value <= 1.0 + TOL, witness=b.witness))
    return out


def _check_exchange(space: Space, cfg: SearchConfig) -> list[CheckResult]:
    """Every sign pattern on A is within factor 3 of the best subset row."""
    dim = space.dim
    cap = cfg.support_cap(dim)
    best = _Argmax()
    for Sf, ffull in _grid_vectors(dim, cfg):
        rest = tuple(i for i in range(1, dim + 1) if i not in Sf)
        for A in subsets_by_size(rest, cap):
            if not A:
                continue
            signs = _embed(_cube((-1.0, 1.0), len(A)), A, dim)
            subsets = _embed(_cube((0.0, 1.0), len(A)), A, dim)
            num = _max_norm_blocks(space, ffull, signs)
            den = _max_norm_blocks(space, ffull, subsets)
            ratios = num / den

            def witness(i, Sf=Sf, A=A, ffull=ffull, num=num, den=den):
                return {
                    "f": [float(x) for x in ffull[i]],
                    "A": list(A),
                    "signed_max": float(num[i]),
                    "subset_max": float(den[i]),
                }

            best.offer_block(ratios, witness)
    desc = "max_eps ||f + 1_eps(A)|| <= 3 * max_{B in A} ||f + 1_B||, supp(f) disjoint from A"
    return [CheckResult(desc, "pointwise", 3.0, best.value,
                        best.value <= 3.0 + TOL, witness=best.witness)]


def _bound_factor(space: Space, token: str, cfg: SearchConfig,
                  workers: int) -> tuple[float, bool]:
    """Analytic value when the space has one, else a searched estimate.

    The second slot says whether the factor is estimated (advisory)."""
    if token in space.analytic:
        return float(space.analytic[token]), False
    est = estimate_constant(space, token, cfg, workers=workers,
                            prefer_analytic=False)
    return est.value, True


def _check_sign_spread(space: Space, cfg: SearchConfig,
                       workers: int) -> list[CheckResult]:
    """Any two sign patterns on one set have norms within factor 2*cq."""
    dim = space.dim
    cap = cfg.support_cap(dim)
    factor, advisory = _bound_factor(space, "cq", cfg, workers)
    best = _Argmax()
    for A in subsets_by_size(range(1, dim + 1), cap):
        if not A:
            continue
        rows = _embed(_cube((-1.0, 1.0), len(A)), A, dim)
        norms = space.norm_rows(rows)
        hi = int(np.argmax(norms))
        lo = int(np.argmin(norms))
        ratio = np.asarray([norms[hi] / norms[lo]])

        def witness(_i, A=A, rows=rows, hi=hi, lo=lo, norms=norms):
            sel = [i - 1 for i in A]
            return {
                "A": list(A),
                "eps": [int(s) for s in np.sign(rows[hi][sel])],
                "eta": [int(s) for s in np.sign(rows[lo][sel])],
                "high_norm": float(norms[hi]),
                "low_norm": float(norms[lo]),
            }

        best.offer_block(ratio, witness)
    desc = "||1_eps(A)|| <= 2*cq * ||1_eta(A)||"
    return [CheckResult(desc, "pointwise", 2.0 * factor, best.value,
                        best.value <= 2.0 * factor + TOL,
                        advisory=advisory, witness=best.witness)]


def _truncation_levels(values: np.ndarray) -> list[float]:
    """Thresholds where clamping changes: the moduli and their midpoints."""
    mods = sorted(set(float(abs(v)) for v in values if v != 0.0))
    out = list(mods)
    out.extend((a + b) / 2.0 for a, b in zip(mods, mods[1:]))
    return sorted(out)


def _check_truncation(space: Space, cfg: SearchConfig,
                      workers: int) -> list[CheckResult]:
    """Clamping the large coefficients never grows the norm past cq."""
    dim = space.dim
    factor, advisory = _bound_factor(space, "cq", cfg, workers)
    best = _Argmax()
    for Sf, ffull in _grid_vectors(dim, cfg, skip_empty=True):
        base_norms = space.norm_rows(ffull)
        rows = []
        meta = []
        for i, f in enumerate(ffull):
            for alpha in _truncation_levels(f[[i - 1 for i in Sf]]):
                rows.append(truncate(f, alpha))
                meta.append((i, alpha))
        if not rows:
            continue
        tnorms = space.norm_rows(np.asarray(rows))
        ratios = tnorms / base_norms[[i for i, _ in meta]]

        def witness(j, Sf=Sf, ffull=ffull, meta=meta, tnorms=tnorms,
                    base_norms=base_norms):
            i, alpha = meta[j]
            return {
                "f": [float(x) for x in ffull[i]],
                "alpha": float(alpha),
                "truncated_norm": float(tnorms[j]),
                "norm": float(base_norms[i]),
            }

        best.offer_block(ratios, witness)
    desc = "||trunc(f, alpha)|| <= cq * ||f||, alpha over the clamp breakpoints"
    return [CheckResult(desc, "pointwise", factor, best.value,
                        best.value <= factor + TOL,
                        advisory=advisory, witness=best.witness)]


_LEMMA_CHECKS = {
    "lemma_convex": lambda space, cfg, workers: _check_convex(space, cfg),
    "lemma_guau": lambda space, cfg, workers: _check_exchange(space, cfg),
    "lemma_trunc": _check_truncation,
    "sign_invariance": _check_sign_spread,
}


# ---------------------------------------------------------------------------
# entry points

def verify(space: Space, theorem_id: str, cfg: SearchConfig | None = None,
           workers: int = 1) -> VerificationReport:
    """Run one registered check suite against a space."""
    cfg = cfg or SearchConfig()
    if theorem_id in _CHAINS:
        return _verify_chain(space, theorem_id, cfg, workers)
    if theorem_id in _LEMMA_CHECKS:
        checks = _LEMMA_CHECKS[theorem_id](space, cfg, workers)
        return VerificationReport(theorem_id, _space_dict(space), tuple(checks))
    raise ValueError(f"unknown theorem id: {theorem_id!r}")


def verify_all(space: Space, cfg: SearchConfig | None = None,
               workers: int = 1) -> list[VerificationReport]:
    return [verify(space, tid, cfg, workers=workers) for tid in THEOREM_IDS]


GROWTH_FAMILIES = ("lp", "weighted-l1-linear", "direct-sum-l1-l2")


def _family_spec(family: str, dim: int, p) -> SpaceSpec:
    if family == "lp":
        if p is None:
            raise ValueError("family 'lp' needs p")
        return SpaceSpec(kind="lp", dim=dim, p=p)
    if family == "weighted-l1-linear":
        return SpaceSpec(kind="weighted_l1", dim=dim,
                         weights=tuple(float(n) for n in range(1, dim + 1)))
    if family == "direct-sum-l1-l2":
        return direct_sum_spec(dim, (("lp", 1), ("lp", 2)))
    raise ValueError(f"unknown growth family: {family!r}")


def growth_curve(family: str, dims: Sequence[int], kind, cfg: SearchConfig | None = None,
                 p=None, workers: int = 1, prefer_analytic: bool = True) -> list[dict]:
    """Estimate one constant along a family of growing dimensions.

    Rows come back as dicts with dim, value and the maximizing witness
    (None when the value is analytic).  dims must be ascending.
    """
    if list(dims) != sorted(set(dims)):
        raise ValueError("dims must be strictly ascending")
    cfg = cfg or SearchConfig()
    rows = []
    for n in dims:
        space = make_space(_family_spec(family, int(n), p))
        est = estimate_constant(space, kind, cfg, workers=workers,
                                prefer_analytic=prefer_analytic)
        rows.append({
            "dim": int(n),
            "value": est.value,
            "witness": est.witness.to_dict() if est.witness is not None else None,
        })
    return rows
