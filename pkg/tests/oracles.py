"""Independent brute-force references used by the tests.

Nothing here imports the package's information or polytope code: joints are
plain dicts keyed by assignment tuples, logs are taken cell by cell, and LPs
go through scipy.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


def joint_dict(spec) -> tuple[tuple[str, ...], dict[tuple, Fraction]]:
    """Multiply every factor entry for every full assignment."""
    cards: dict[str, int] = {}
    tables = list(spec.factors) + list(spec.encoders) + [spec.channel]
    for f in tables:
        for n, k in zip(f.parents + f.child, f.table.shape):
            cards[n] = k
    names = tuple(sorted(cards))
    out = {}
    for assign in itertools.product(*[range(cards[n]) for n in names]):
        val = dict(zip(names, assign))
        p = Fraction(1)
        for f in tables:
            p *= Fraction(f.table[tuple(val[n] for n in f.parents + f.child)])
            if p == 0:
                break
        if p:
            out[assign] = p
    return names, out


def marginal(names, pmf, keep) -> dict[tuple, Fraction]:
    idx = [names.index(k) for k in keep]
    out: dict[tuple, Fraction] = {}
    for a, p in pmf.items():
        key = tuple(a[i] for i in idx)
        out[key] = out.get(key, 0) + p
    return out


def H(names, pmf, keep) -> float:
    return -sum(float(p) * math.log2(float(p)) for p in marginal(names, pmf, keep).values() if p > 0)


def I(names, pmf, left, right, given=()) -> float:
    """I(left; right | given) = H(L,G) + H(R,G) - H(L,R,G) - H(G)."""
    left, right, given = tuple(left), tuple(right), tuple(given)
    return (
        H(names, pmf, left + given)
        + H(names, pmf, right + given)
        - H(names, pmf, left + right + given)
        - H(names, pmf, given)
    )


def _fmt(pattern: str, i: int) -> str:
    j = 3 - i
    return pattern.replace("@", str(i)).replace("#", str(j))


# definitions written out in full, "@" = own user, "#" = the other user
HK_DEFS = {
    "a": ("Y@", "U@", "W@ W# Q"),
    "b": ("Y@", "W@", "U@ W# Q"),
    "c": ("Y@", "W#", "U@ W@ Q"),
    "d": ("Y@", "U@ W@", "W# Q"),
    "e": ("Y@", "U@ W#", "W@ Q"),
    "f": ("Y@", "W@ W#", "U@ Q"),
    "g": ("Y@", "U@ W@ W#", "Q"),
}
PRIMED_DEFS = {
    "a": ("Y@", "X@", "W@ W# Q"),
    "d": ("Y@", "X@", "W# Q"),
    "e": ("Y@", "X@ W#", "W@ Q"),
    "g": ("Y@", "X@ W#", "Q"),
}


def _mi(names, pmf, spec_triple, i):
    y, a, g = (_fmt(s, i).split() for s in spec_triple)
    g = [x for x in g if x in names]
    return I(names, pmf, y, a, g)


def constants(family: str, names, pmf) -> dict[str, float]:
    out = {}
    for i in (1, 2):
        q = ["Q"] if "Q" in names else []
        if family in ("HK", "HOD"):
            corr = I(names, pmf, [f"U{i}"], [f"W{i}"], q) if family == "HOD" else 0.0
            for letter, trip in HK_DEFS.items():
                v = _mi(names, pmf, trip, i)
                if letter in "bcf":
                    v += corr
                out[(letter.upper() if family == "HOD" else letter) + str(i)] = v
        else:
            for letter, trip in PRIMED_DEFS.items():
                v = _mi(names, pmf, trip, i)
                stem = letter.upper() + "p" if family == "HOD_CMG" else letter + "p"
                out[f"{stem}{i}"] = v
            b = "Bp" if family == "HOD_CMG" else "bp"
            f = "Fp" if family == "HOD_CMG" else "fp"
            d = "Dp" if family == "HOD_CMG" else "dp"
            g = "Gp" if family == "HOD_CMG" else "gp"
            out[f"{b}{i}"] = out[f"{d}{i}"]
            out[f"{f}{i}"] = out[f"{g}{i}"]
            if family == "MOD_CMG":
                out[f"cp{i}"] = I(names, pmf, [f"Y{i}"], [f"W{3 - i}"], [f"X{i}"] + q)
    return out


# -- LP / polytope references -----------------------------------------------------

def lp_max(c, A, b):
    """max c.x s.t. A x <= b, x >= 0 via scipy; returns (status, value)."""
    from scipy.optimize import linprog

    res = linprog(-np.asarray(c, float), A_ub=np.asarray(A, float), b_ub=np.asarray(b, float),
                  bounds=[(0, None)] * len(c), method="highs")
    if res.status == 2:
        return "infeasible", None
    if res.status == 3:
        return "unbounded", None
    return "optimal", -res.fun


def support(system, direction) -> float | None:
    """Support function of a numeric system (variables >= 0) in a direction."""
    A = [[float(r.coeff(v)) for v in system.variables] for r in system.rows]
    b = [r.rhs for r in system.rows]
    status, val = lp_max(direction, A, b)
    return val if status == "optimal" else None


def projected_support(ts_system, direction_r) -> float | None:
    """Support of the (R1,R2) projection of a (S1,T1,S2,T2) system, computed
    directly in four dimensions with R_i = S_i + T_i."""
    c = []
    for v in ts_system.variables:
        c.append(direction_r[0] if v.endswith("1") else direction_r[1])
    return support(ts_system, c)
