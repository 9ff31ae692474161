"""Bound constants of the interference-channel regions and relations among them.

Constant names are canonical strings: ``a1..g2`` (independent auxiliaries),
``ap1..gp2`` (superposition collapse, plus ``cp1, cp2`` for the modified
variant), ``A1..G2`` (dependent auxiliaries) and ``Ap1..Gp2`` (collapse of
the dependent family).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

from .polytope.system import AxiomSet, SymExpr
from .probspace import (
    INFO_TOL,
    DistributionError,
    Family,
    JointDist,
    collapse,
    entropy,
    mutual_info,
)

SIG_DIGITS = 12

# receiver i decodes its own (U_i, W_i) and the other sender's W_j
_INDEP_DEFS = {
    "a": (("U{i}",), ("W{i}", "W{j}")),
    "b": (("W{i}",), ("U{i}", "W{j}")),
    "c": (("W{j}",), ("U{i}", "W{i}")),
    "d": (("U{i}", "W{i}"), ("W{j}",)),
    "e": (("U{i}", "W{j}"), ("W{i}",)),
    "f": (("W{i}", "W{j}"), ("U{i}",)),
    "g": (("U{i}", "W{i}", "W{j}"), ()),
}
# the dependent family pays the private/common correlation on these three
_CORRELATED = ("b", "c", "f")

_COLLAPSED_DEFS = {
    "a": (("X{i}",), ("W{i}", "W{j}")),
    "d": (("X{i}",), ("W{j}",)),
    "e": (("X{i}", "W{j}"), ("W{i}",)),
    "g": (("X{i}", "W{j}"), ()),
}
_CROSS_DEF = (("W{j}",), ("X{i}",))


class ConformanceError(DistributionError):
    """The distribution does not have the factorization the family requires."""


def constant_names(family: Family | str) -> tuple[str, ...]:
    family = Family(family)
    letters = "abcdefg"
    if family == Family.HK:
        return tuple(f"{x}{i}" for i in (1, 2) for x in letters)
    if family == Family.HOD:
        return tuple(f"{x.upper()}{i}" for i in (1, 2) for x in letters)
    if family == Family.CMG:
        return tuple(f"{x}p{i}" for i in (1, 2) for x in "abdefg")
    if family == Family.MOD_CMG:
        return tuple(f"{x}p{i}" for i in (1, 2) for x in letters)
    if family == Family.HOD_CMG:
        return tuple(f"{x.upper()}p{i}" for i in (1, 2) for x in "abdefg")
    raise ValueError(f"no bound constants for family {family.value}")


@dataclass(frozen=True)
class ConstantSet:
    family: Family
    values: Mapping[str, float]
    correlation: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        vals = {k: float(v) for k, v in dict(self.values).items()}
        expected = set(constant_names(self.family))
        if set(vals) != expected:
            missing, extra = expected - set(vals), set(vals) - expected
            raise ValueError(f"{self.family.value} constants: missing {sorted(missing)}, unexpected {sorted(extra)}")
        if any(v < 0 for v in vals.values()):
            raise ValueError("bound constants must be nonnegative")
        object.__setattr__(self, "values", MappingProxyType(vals))

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    @property
    def names(self) -> tuple[str, ...]:
        return constant_names(self.family)

    def replace(self, **updates: float) -> "ConstantSet":
        vals = dict(self.values)
        vals.update(updates)
        return ConstantSet(self.family, vals, self.correlation)

    @classmethod
    def zeros(cls, family: Family | str) -> "ConstantSet":
        return cls(family, {n: 0.0 for n in constant_names(family)})

    def to_text(self) -> str:
        lines = [f"# family: {self.family.value}"]
        lines += [f"{n} = {self.values[n]:.{SIG_DIGITS}g}" for n in self.names]
        if self.family == Family.HOD:
            lines += [f"# correlation{i} = {v:.{SIG_DIGITS}g}" for i, v in enumerate(self.correlation, 1)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ConstantSet":
        family, vals, corr = None, {}, [0.0, 0.0]
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            m = re.match(r"#\s*family:\s*(\w+)", line)
            if m:
                family = m.group(1)
                continue
            m = re.match(r"#\s*correlation([12])\s*=\s*(\S+)", line)
            if m:
                corr[int(m.group(1)) - 1] = float(m.group(2))
                continue
            if line.startswith("#"):
                continue
            name, _, val = line.partition("=")
            vals[name.strip()] = float(val)
        if family is None:
            raise ValueError("constant file lacks a '# family:' header")
        return cls(family, vals, tuple(corr))


def _fmt(template: Sequence[str], i: int) -> tuple[str, ...]:
    j = 3 - i
    return tuple(t.format(i=i, j=j) for t in template)


def _given(dist: JointDist, extra: Sequence[str]) -> tuple[str, ...]:
    return tuple(extra) + (("Q",) if "Q" in dist.names else ())


def _require(dist: JointDist, names: Sequence[str], family: Family):
    missing = [n for n in names if n not in dist.names]
    if missing:
        raise ConformanceError(f"{family.value} distribution lacks variables {missing}")


def _q(dist):
    return ("Q",) if "Q" in dist.names else ()


def conformance_residuals(family: Family | str, dist: JointDist) -> dict[str, float]:
    """Information residuals that vanish exactly when dist has the family's
    factorization (independence across senders, deterministic encoders,
    memoryless channel)."""
    family = Family(family)
    q = _q(dist)
    res: dict[str, float] = {}
    if family in (Family.HK, Family.HOD, Family.GENERAL_IC):
        _require(dist, ("U1", "W1", "U2", "W2", "X1", "X2", "Y1", "Y2"), family)
        res["senders independent"] = mutual_info(dist, ("U1", "W1"), ("U2", "W2"), q)
        if family == Family.HK:
            res["U1,W1 independent"] = mutual_info(dist, "U1", "W1", q)
            res["U2,W2 independent"] = mutual_info(dist, "U2", "W2", q)
        if family != Family.GENERAL_IC:
            res["X1 deterministic"] = entropy(dist, "X1", ("U1", "W1") + q)
            res["X2 deterministic"] = entropy(dist, "X2", ("U2", "W2") + q)
        else:
            res["X1 local"] = mutual_info(dist, "X1", ("U2", "W2", "X2"), ("U1", "W1") + q)
        res["memoryless channel"] = mutual_info(dist, q + ("U1", "W1", "U2", "W2"), ("Y1", "Y2"), ("X1", "X2"))
    else:
        _require(dist, ("W1", "W2", "X1", "X2", "Y1", "Y2"), family)
        res["senders independent"] = mutual_info(dist, ("W1", "X1"), ("W2", "X2"), q)
        res["W1 - Q W2 X1 - Y1"] = mutual_info(dist, "W1", "Y1", q + ("W2", "X1"))
        res["W2 - Q W1 X2 - Y2"] = mutual_info(dist, "W2", "Y2", q + ("W1", "X2"))
        res["memoryless channel"] = mutual_info(dist, q + ("W1", "W2"), ("Y1", "Y2"), ("X1", "X2"))
    return res


def check_conformance(family: Family | str, dist: JointDist, tol: float = INFO_TOL) -> None:
    bad = {k: v for k, v in conformance_residuals(family, dist).items() if v > tol}
    if bad:
        detail = ", ".join(f"{k} (residual {v:.3g})" for k, v in bad.items())
        raise ConformanceError(f"distribution is not {Family(family).value}-conforming: {detail}")


def bound_constants(family: Family | str, dist: JointDist, validate: bool = True) -> ConstantSet:
    """Every bound constant of ``family`` evaluated on ``dist``.

    Collapsed families accept either the collapsed joint or a joint that still
    carries U1, U2 (which are then marginalized out).
    """
    family = Family(family)
    if family in (Family.CMG, Family.MOD_CMG, Family.HOD_CMG):
        if "U1" in dist.names or "U2" in dist.names:
            dist = collapse(dist)
    if validate:
        check_conformance(family, dist)
    vals: dict[str, float] = {}
    corr = (0.0, 0.0)
    if family in (Family.HK, Family.HOD):
        capital = family == Family.HOD
        corr_terms = []
        for i in (1, 2):
            ci = mutual_info(dist, f"U{i}", f"W{i}", _q(dist)) if capital else 0.0
            corr_terms.append(ci)
            for letter, (left, given) in _INDEP_DEFS.items():
                v = mutual_info(dist, _fmt(left, i), f"Y{i}", _given(dist, _fmt(given, i)))
                if capital and letter in _CORRELATED:
                    v += ci
                vals[f"{letter.upper() if capital else letter}{i}"] = v
        corr = tuple(corr_terms)
    else:
        capital = family == Family.HOD_CMG
        for i in (1, 2):
            base = {}
            for letter, (left, given) in _COLLAPSED_DEFS.items():
                base[letter] = mutual_info(dist, _fmt(left, i), f"Y{i}", _given(dist, _fmt(given, i)))
            base["b"], base["f"] = base["d"], base["g"]
            if family == Family.MOD_CMG:
                left, given = _CROSS_DEF
                base["c"] = mutual_info(dist, _fmt(left, i), f"Y{i}", _given(dist, _fmt(given, i)))
            for letter, v in base.items():
                vals[f"{letter.upper() if capital else letter}p{i}"] = v
    return ConstantSet(family, vals, corr)


# -- relations ----------------------------------------------------------------

_POLYMATROID_HK = (
    "a <= d", "d <= a + b", "b <= d", "a <= e", "e <= a + c", "c <= e", "c <= f", "b <= f",
    "f <= b + c", "e <= g", "d <= g", "g <= c + d", "g <= b + e", "g <= a + f", "f <= g",
)
_INDEPENDENCE_HK = ("c + g <= e + f",)
_POLYMATROID_CMG = (
    "a <= d", "d <= a + b", "b == d", "a <= e", "b <= f", "e <= g", "d <= g", "g <= b + e",
    "g <= a + f", "f == g",
)
_MOD_CMG_EXTRA = ("e <= a + c", "c <= e", "f <= b + c")
_HOD_ASSERTED = (
    "a <= d", "d <= a + b", "a <= e", "e <= a + c", "b <= f", "c <= f", "f <= b + c",
    "d <= g", "e <= g", "g <= c + d", "g <= b + e", "g <= a + f",
)
# relations that hold for independent auxiliaries but are not claimed once
# the private and common parts are correlated
_HOD_EXCLUDED = ("b <= d", "c <= e", "f <= g")

_LETTER = re.compile(r"\b([a-g])\b")
_STYLES = {
    "lower": lambda x, i: f"{x}{i}",
    "upper": lambda x, i: f"{x.upper()}{i}",
    "primed": lambda x, i: f"{x}p{i}",
    "upper_primed": lambda x, i: f"{x.upper()}p{i}",
}


def _instantiate(templates: Sequence[str], style: str) -> list[str]:
    """Single-letter templates for both receivers in one naming style."""
    fn = _STYLES[style]
    return [_LETTER.sub(lambda m: fn(m.group(1), i), t) for i in (1, 2) for t in templates]


def _pair(templates: Sequence[str]) -> list[str]:
    """Templates already spelled in full names, e.g. ``A == Ap``; adds the index."""
    return [re.sub(r"\b([A-Za-z]p?)\b", lambda m: f"{m.group(1)}{i}", t) for i in (1, 2) for t in templates]


_CMG_LIKE = frozenset({"CMG", "MOD_CMG"})

# name -> (accepted constant families per input set, relations)
RELATION_FAMILIES: dict[str, tuple[tuple[frozenset, ...], list[str]]] = {
    "HK": ((frozenset({"HK"}),), _instantiate(_POLYMATROID_HK, "lower")),
    "HK_INDEPENDENCE": ((frozenset({"HK"}),), _instantiate(_INDEPENDENCE_HK, "lower")),
    "CMG": ((_CMG_LIKE,), _instantiate(_POLYMATROID_CMG, "primed")),
    "MOD_CMG": ((frozenset({"MOD_CMG"}),), _instantiate(_POLYMATROID_CMG + _MOD_CMG_EXTRA, "primed")),
    "MOD_CMG_INDEPENDENCE": ((frozenset({"MOD_CMG"}),), _instantiate(_INDEPENDENCE_HK, "primed")),
    "HOD": ((frozenset({"HOD"}),), _instantiate(_HOD_ASSERTED, "upper")),
    "HOD_CMG": ((frozenset({"HOD_CMG"}),), _instantiate(_POLYMATROID_CMG, "upper_primed")),
    # the superposition collapse keeps a, d, e, g (and c) under deterministic encoders
    "HK_VS_CMG": ((frozenset({"HK"}), _CMG_LIKE), _pair(("a == ap", "d == dp", "e == ep", "g == gp"))),
    "HK_VS_MOD_CMG": (
        (frozenset({"HK"}), frozenset({"MOD_CMG"})),
        _pair(("a == ap", "c == cp", "d == dp", "e == ep", "g == gp")),
    ),
    "HOD_VS_HOD_CMG": (
        (frozenset({"HOD"}), frozenset({"HOD_CMG"})),
        _pair(("A == Ap", "D == Dp", "E == Ep", "G == Gp")),
    ),
    # constants of a lifted distribution dominate those of its base
    "LIFT": ((frozenset({"HK"}), frozenset({"HOD"})), _pair(tuple(f"{x.upper()} >= {x}" for x in "abcdefg"))),
}
EXCLUDED = {"HOD": _instantiate(_HOD_EXCLUDED, "upper")}


@dataclass(frozen=True)
class RelationCheck:
    name: str
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class RelationReport:
    relation_family: str
    checks: tuple[RelationCheck, ...]
    excluded: tuple[RelationCheck, ...] = field(default=())

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    @property
    def worst(self) -> float:
        """Largest violation (positive means some check fails)."""
        return max((_violation(c) for c in self.checks), default=0.0)

    def to_text(self) -> str:
        lines = [f"# relations: {self.relation_family}  all_hold={self.all_hold}"]
        for c in self.checks:
            lines.append(f"{'ok  ' if c.holds else 'FAIL'}  {c.name:<22} {c.lhs:.{SIG_DIGITS}g}  vs  {c.rhs:.{SIG_DIGITS}g}")
        for c in self.excluded:
            lines.append(f"{'holds' if c.holds else 'fails'} (not asserted)  {c.name}")
        return "\n".join(lines) + "\n"


def _violation(c: RelationCheck) -> float:
    if "==" in c.name:
        return abs(c.lhs - c.rhs)
    return c.lhs - c.rhs


def _evaluate(rel: str, values: Mapping[str, float], tol: float) -> RelationCheck:
    for op in ("==", "<=", ">="):
        if op in rel:
            left, right = rel.split(op)
            break
    else:
        raise ValueError(f"bad relation {rel!r}")
    lo = SymExpr.parse(left).evaluate(values)
    hi = SymExpr.parse(right).evaluate(values)
    if op == ">=":
        lo, hi = hi, lo
        name = f"{right.strip()} <= {left.strip()}"
    else:
        name = rel
    holds = abs(lo - hi) <= tol if op == "==" else lo <= hi + tol
    return RelationCheck(name, lo, hi, holds)


def constant_relations(
    relation_family: str,
    c: ConstantSet | Sequence[ConstantSet],
    tol: float = INFO_TOL,
) -> RelationReport:
    """Evaluate a named relation family on one constant set or a matched pair."""
    if relation_family not in RELATION_FAMILIES:
        raise ValueError(f"unknown relation family {relation_family!r}; have {sorted(RELATION_FAMILIES)}")
    accepted, rels = RELATION_FAMILIES[relation_family]
    sets = [c] if isinstance(c, ConstantSet) else list(c)
    got = [s.family.value for s in sets]
    ok = len(sets) == len(accepted) and any(
        all(g in a for g, a in zip(perm, accepted)) for perm in itertools.permutations(got)
    )
    if not ok:
        want = " + ".join("/".join(sorted(a)) for a in accepted)
        raise ValueError(f"relation family {relation_family} needs constant sets {want}, got {got}")
    values: dict[str, float] = {}
    for s in sets:
        values.update(s.values)
    checks = tuple(_evaluate(r, values, tol) for r in rels)
    excluded = tuple(_evaluate(r, values, tol) for r in EXCLUDED.get(relation_family, ()))
    return RelationReport(relation_family, checks, excluded)


def axioms(*relation_families: str) -> AxiomSet:
    """AxiomSet for symbolic reduction from named relation families."""
    out = AxiomSet()
    for name in relation_families:
        out = out + AxiomSet.parse(RELATION_FAMILIES[name][1])
    return out


# -- single-receiver sub-channel bounds ---------------------------------------

@dataclass(frozen=True)
class RateBound:
    coeffs: tuple[tuple[str, int], ...]
    value: float

    def __str__(self):
        lhs = " + ".join(v for v, _ in self.coeffs)
        return f"{lhs} <= {self.value:.{SIG_DIGITS}g}"


def subchannel_rates(
    scheme: str,
    dist: JointDist,
    u: str = "U",
    w: str = "W",
    x: str = "X",
    y: str = "Y",
    q: str = "Q",
    tol: float = INFO_TOL,
) -> list[RateBound]:
    """Rate bounds (private rate S, common rate T) for one receiver decoding
    both layers of a single sender.

    ``separate`` and ``superposition`` need U, W independent given Q;
    ``binning`` allows them to be dependent and pays I(U;W|Q) on T.
    """
    qs = (q,) if q in dist.names else ()
    for n in (u, w, y):
        dist.axis(n)
    if scheme in ("separate", "superposition"):
        dep = mutual_info(dist, u, w, qs)
        if dep > tol:
            raise ConformanceError(f"{scheme} coding needs independent {u}, {w} (I = {dep:.3g} bits)")
    if scheme == "separate":
        return [
            RateBound((("S", 1),), mutual_info(dist, u, y, (w,) + qs)),
            RateBound((("T", 1),), mutual_info(dist, w, y, (u,) + qs)),
            RateBound((("S", 1), ("T", 1)), mutual_info(dist, (u, w), y, qs)),
        ]
    if scheme == "superposition":
        dist.axis(x)
        return [
            RateBound((("S", 1),), mutual_info(dist, x, y, (w,) + qs)),
            RateBound((("S", 1), ("T", 1)), mutual_info(dist, x, y, qs)),
        ]
    if scheme == "binning":
        corr = mutual_info(dist, u, w, qs)
        return [
            RateBound((("S", 1),), mutual_info(dist, u, y, (w,) + qs)),
            RateBound((("T", 1),), corr + mutual_info(dist, w, y, (u,) + qs)),
            RateBound((("S", 1), ("T", 1)), mutual_info(dist, (u, w), y, qs)),
        ]
    raise ValueError(f"unknown scheme {scheme!r}; use separate, superposition or binning")
