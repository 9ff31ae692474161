"""Discrete joint distributions over named finite-alphabet variables.

Masses are exact: integer numerators over one common denominator. Information
measures are computed in double precision, in bits.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

MAX_CELLS = 10_000_000
INFO_TOL = 1e-9
CLAMP_TOL = 1e-12

CANONICAL_ORDER = ("Q", "U1", "W1", "U2", "W2", "X1", "X2", "Y1", "Y2")


class DistributionError(ValueError):
    """Malformed distribution, factor, or information query."""


class Family(str, enum.Enum):
    GENERAL_IC = "GENERAL_IC"
    HK = "HK"
    CMG = "CMG"
    MOD_CMG = "MOD_CMG"
    HOD = "HOD"
    HOD_CMG = "HOD_CMG"


@dataclass(frozen=True)
class VariableDecl:
    name: str
    cardinality: int

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name.isidentifier():
            raise DistributionError(f"invalid variable name {self.name!r}")
        if int(self.cardinality) != self.cardinality or self.cardinality < 1:
            raise DistributionError(f"variable {self.name}: cardinality must be a positive integer")


def _names(x: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(x, str):
        return (x,)
    return tuple(x)


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DistributionError(f"not a rational number: {x!r}") from exc
    raise DistributionError(f"probabilities must be exact rationals (int, Fraction or string), got {x!r}")


def _as_int_array(flat: Sequence, shape: tuple[int, ...]) -> np.ndarray:
    out = np.empty(len(flat), dtype=object)
    out[:] = [int(v) for v in flat]
    return out.reshape(shape)


class JointDist:
    """Dense exact joint distribution.

    ``numerators`` is an integer table over the Cartesian product of the
    variable alphabets; mass of a cell is ``numerators[idx] / denominator``.
    """

    __slots__ = ("variables", "_num", "_den", "_probs", "_hcache")

    def __init__(self, variables: Sequence[VariableDecl], numerators, denominator: int = 1):
        variables = tuple(variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise DistributionError(f"duplicate variable names in {names}")
        shape = tuple(v.cardinality for v in variables)
        if math.prod(shape) > MAX_CELLS:
            raise DistributionError(f"joint table of {math.prod(shape)} cells exceeds the {MAX_CELLS} cell cap")
        num = np.asarray(numerators, dtype=object)
        if num.shape != shape:
            raise DistributionError(f"table shape {num.shape} does not match alphabets {shape}")
        flat = num.ravel().tolist()
        if any(int(v) != v or v < 0 for v in flat):
            raise DistributionError("masses must be nonnegative")
        den = int(denominator)
        if den <= 0:
            raise DistributionError("denominator must be positive")
        total = sum(int(v) for v in flat)
        if total != den:
            raise DistributionError(f"masses sum to {Fraction(total, den)}, not 1")
        g = math.gcd(den, *[int(v) for v in flat]) if flat else den
        num = _as_int_array([int(v) // g for v in flat], shape)
        num.flags.writeable = False
        self.variables = variables
        self._num = num
        self._den = den // g
        self._probs = None
        self._hcache: dict[frozenset, float] = {}

    @classmethod
    def from_table(cls, variables: Sequence[VariableDecl], table) -> "JointDist":
        """Build from a nested table of exact rationals (ints, Fractions or strings)."""
        arr = np.asarray(table, dtype=object)
        flat = [_to_fraction(v) for v in arr.ravel().tolist()]
        den = math.lcm(*[f.denominator for f in flat]) if flat else 1
        nums = [f.numerator * (den // f.denominator) for f in flat]
        return cls(variables, _as_int_array(nums, arr.shape), den)

    @classmethod
    def unit(cls) -> "JointDist":
        return cls((), np.array(1, dtype=object), 1)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(v.cardinality for v in self.variables)

    @property
    def numerators(self) -> np.ndarray:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DistributionError(f"unknown variable {name!r}; have {self.names}") from None

    def card(self, name: str) -> int:
        return self.variables[self.axis(name)].cardinality

    def mass(self, idx: Sequence[int]) -> Fraction:
        return Fraction(int(self._num[tuple(idx)]), self._den)

    @property
    def probs(self) -> np.ndarray:
        if self._probs is None:
            p = np.array([v / self._den for v in self._num.ravel().tolist()], dtype=float)
            p = p.reshape(self.shape)
            p.flags.writeable = False
            self._probs = p
        return self._probs

    def marginal(self, names: str | Iterable[str]) -> "JointDist":
        names = _names(names)
        axes = [self.axis(n) for n in names]
        if len(set(axes)) != len(axes):
            raise DistributionError(f"repeated names in {names}")
        drop = tuple(i for i in range(len(self.variables)) if i not in axes)
        summed = self._num.sum(axis=drop) if drop else self._num
        kept = [i for i in range(len(self.variables)) if i in axes]
        perm = [kept.index(a) for a in axes]
        summed = np.asarray(summed, dtype=object).transpose(perm) if perm else np.asarray(summed, dtype=object)
        return JointDist([self.variables[a] for a in axes], summed, self._den)

    def reorder(self, names: Sequence[str]) -> "JointDist":
        if sorted(names) != sorted(self.names):
            raise DistributionError("reorder must name every variable exactly once")
        return self.marginal(names)

    def entropy(self, names: str | Iterable[str]) -> float:
        """Joint entropy H(names) in bits; 0 log 0 = 0."""
        key = frozenset(_names(names))
        if key in self._hcache:
            return self._hcache[key]
        for n in key:
            self.axis(n)
        drop = tuple(i for i, v in enumerate(self.variables) if v.name not in key)
        p = self.probs.sum(axis=drop) if drop else self.probs
        p = np.asarray(p, dtype=float).ravel()
        p = p[p > 0]
        h = float(-(p * np.log2(p)).sum())
        self._hcache[key] = h
        return h

    def __eq__(self, other):
        if not isinstance(other, JointDist):
            return NotImplemented
        return (
            self.variables == other.variables
            and self._den == other._den
            and bool(np.all(self._num == other._num))
        )

    def __hash__(self):
        return hash((self.variables, self._den, tuple(self._num.ravel().tolist())))

    def __repr__(self):
        vs = ", ".join(f"{v.name}:{v.cardinality}" for v in self.variables)
        return f"JointDist({vs}; denominator={self._den})"


@dataclass(frozen=True)
class InfoQuery:
    left: frozenset
    right: frozenset
    given: frozenset = frozenset()

    def __post_init__(self):
        for f in ("left", "right", "given"):
            object.__setattr__(self, f, frozenset(_names(getattr(self, f))))
        if not self.left or not self.right:
            raise DistributionError("left and right sets must be nonempty")
        if self.left & self.right or self.left & self.given or self.right & self.given:
            raise DistributionError("query sets overlap")

    def validate(self, dist: JointDist) -> None:
        for n in self.left | self.right | self.given:
            dist.axis(n)


def cond_mutual_info(dist: JointDist, q: InfoQuery) -> float:
    """I(left; right | given) in bits."""
    q.validate(dist)
    h = dist.entropy
    val = h(q.left | q.given) + h(q.right | q.given) - h(q.left | q.right | q.given) - h(q.given)
    if -CLAMP_TOL < val < 0:
        val = 0.0
    return val


def mutual_info(dist: JointDist, left, right, given=()) -> float:
    return cond_mutual_info(dist, InfoQuery(_names(left), _names(right), _names(given)))


def entropy(dist: JointDist, names, given=()) -> float:
    """H(names | given) in bits."""
    a, g = set(_names(names)), set(_names(given))
    if a & g:
        raise DistributionError("query sets overlap")
    return max(dist.entropy(a | g) - dist.entropy(g), 0.0) if g else dist.entropy(a)


@dataclass(frozen=True)
class MarkovCheck:
    holds: bool
    violation: float

    def __bool__(self):
        return self.holds


def verify_markov(dist: JointDist, a, b, c, tol: float = INFO_TOL) -> MarkovCheck:
    """Check the chain a -> b -> c, i.e. I(a; c | b) <= tol."""
    v = mutual_info(dist, a, c, b)
    return MarkovCheck(v <= tol, v)


class Factor:
    """Conditional table p(child | parents) with exact entries.

    The table has shape ``parent cards + child cards``; rows (one per parent
    configuration) must sum to 1 exactly.
    """

    __slots__ = ("child", "parents", "table", "_nums", "_den")

    def __init__(self, child, parents, table):
        self.child = _names(child)
        self.parents = _names(parents)
        if not self.child:
            raise DistributionError("factor needs at least one child variable")
        if set(self.child) & set(self.parents):
            raise DistributionError(f"factor p({','.join(self.child)}|...) lists a variable as both child and parent")
        arr = np.asarray(table, dtype=object)
        if arr.ndim != len(self.child) + len(self.parents):
            raise DistributionError(
                f"factor {self.label}: table has {arr.ndim} axes, expected {len(self.child) + len(self.parents)}"
            )
        if 0 in arr.shape:
            raise DistributionError(f"factor {self.label}: empty alphabet")
        fr = np.empty(arr.size, dtype=object)
        fr[:] = [_to_fraction(v) for v in arr.ravel().tolist()]
        fr = fr.reshape(arr.shape)
        if any(v < 0 for v in fr.ravel()):
            raise DistributionError(f"factor {self.label}: negative entry")
        npar = len(self.parents)
        rows = fr.reshape((math.prod(arr.shape[:npar]), -1))
        for r, row in enumerate(rows):
            s = sum(row)
            if s != 1:
                pidx = np.unravel_index(r, arr.shape[:npar]) if npar else ()
                raise DistributionError(
                    f"factor {self.label}: row not summing to 1 (row sum ≠ 1: {s} at parents {tuple(int(i) for i in pidx)})"
                )
        fr.flags.writeable = False
        self.table = fr
        den = math.lcm(*[v.denominator for v in fr.ravel()])
        nums = _as_int_array([v.numerator * (den // v.denominator) for v in fr.ravel()], fr.shape)
        nums.flags.writeable = False
        self._nums, self._den = nums, den

    @classmethod
    def from_function(cls, child, parents, parent_cards, child_cards, fn) -> "Factor":
        """Deterministic table: ``fn(*parent_values)`` returns the child index (int or tuple)."""
        child, parents = _names(child), _names(parents)
        parent_cards, child_cards = tuple(parent_cards), tuple(child_cards)
        t = np.zeros(parent_cards + child_cards, dtype=object)
        for pv in itertools.product(*[range(k) for k in parent_cards]):
            out = fn(*pv)
            out = (out,) if isinstance(out, (int, np.integer)) else tuple(out)
            t[pv + out] = 1
        return cls(child, parents, t)

    @property
    def label(self) -> str:
        return f"p({','.join(self.child)}|{','.join(self.parents)})"

    @property
    def parent_cards(self) -> tuple[int, ...]:
        return self.table.shape[: len(self.parents)]

    @property
    def child_cards(self) -> tuple[int, ...]:
        return self.table.shape[len(self.parents):]

    def cards(self) -> dict[str, int]:
        return dict(zip(self.parents + self.child, self.table.shape))

    @property
    def is_deterministic(self) -> bool:
        return all(v == 0 or v == 1 for v in self.table.ravel())

    def lookup(self) -> np.ndarray:
        """For deterministic tables: flat child index per parent configuration."""
        if not self.is_deterministic:
            raise DistributionError(f"{self.label} is not deterministic")
        rows = self.table.reshape(self.parent_cards + (-1,))
        return np.argmax(rows.astype(int), axis=-1)

    def float_table(self) -> np.ndarray:
        return np.array([float(v) for v in self.table.ravel()]).reshape(self.table.shape)

    def __eq__(self, other):
        if not isinstance(other, Factor):
            return NotImplemented
        return (self.child, self.parents) == (other.child, other.parents) and self.table.shape == other.table.shape and bool(
            np.all(self.table == other.table)
        )

    def __repr__(self):
        return f"Factor{self.label}{list(self.table.shape)}"


def extend(dist: JointDist, factor: Factor) -> JointDist:
    """Append factor's child variables to dist: p(x, c) = p(x) p(c | parents)."""
    for p in factor.parents:
        if dist.card(p) != factor.cards()[p]:
            raise DistributionError(
                f"dimension mismatch: {p} has cardinality {dist.card(p)} but {factor.label} uses {factor.cards()[p]}"
            )
    for c in factor.child:
        if c in dist.names:
            raise DistributionError(f"variable {c} defined twice")
    order = sorted(range(len(factor.parents)), key=lambda i: dist.axis(factor.parents[i]))
    nch = len(factor.child)
    t = factor._nums.transpose(order + list(range(len(factor.parents), len(factor.parents) + nch)))
    sorted_parents = [factor.parents[i] for i in order]
    bshape = [v.cardinality if v.name in sorted_parents else 1 for v in dist.variables] + list(factor.child_cards)
    t = t.reshape(bshape)
    num = dist.numerators.reshape(dist.shape + (1,) * nch) * t
    decls = dist.variables + tuple(VariableDecl(c, k) for c, k in zip(factor.child, factor.child_cards))
    return JointDist(decls, num, dist.denominator * factor._den)


def apply_map(dist: JointDist, encoders: Factor | Sequence[Factor]) -> JointDist:
    """Extend dist with deterministic functions of existing variables."""
    if isinstance(encoders, Factor):
        encoders = [encoders]
    for enc in encoders:
        if not enc.is_deterministic:
            raise DistributionError(f"encoder {enc.label} is not deterministic (entries must be 0/1)")
        dist = extend(dist, enc)
    return dist


# Allowed parent sets per variable, by family. A factor p(C|P) is admissible
# when its children can be ordered so that each child's parents (P plus the
# earlier children) stay inside the allowed set.
_SOURCES = {
    Family.HK: {"Q": set(), "U1": {"Q"}, "W1": {"Q"}, "U2": {"Q"}, "W2": {"Q"}},
    Family.HOD: {"Q": set(), "U1": {"Q", "W1"}, "W1": {"Q", "U1"}, "U2": {"Q", "W2"}, "W2": {"Q", "U2"}},
    Family.CMG: {"Q": set(), "W1": {"Q"}, "W2": {"Q"}, "X1": {"Q", "W1"}, "X2": {"Q", "W2"}},
}
_SOURCES[Family.GENERAL_IC] = dict(_SOURCES[Family.HOD], X1={"Q", "U1", "W1"}, X2={"Q", "U2", "W2"})
_SOURCES[Family.MOD_CMG] = _SOURCES[Family.CMG]
_SOURCES[Family.HOD_CMG] = _SOURCES[Family.CMG]

_ENCODER_INPUTS = {"X1": {"Q", "U1", "W1"}, "X2": {"Q", "U2", "W2"}}
_CMG_ENCODER_INPUTS = {"X1": {"Q", "W1"}, "X2": {"Q", "W2"}}


def family_variables(family: Family) -> tuple[str, ...]:
    if family in (Family.CMG, Family.MOD_CMG, Family.HOD_CMG):
        return ("Q", "W1", "W2", "X1", "X2", "Y1", "Y2")
    return CANONICAL_ORDER


def _admissible(factor: Factor, allowed: Mapping[str, set]) -> bool:
    for perm in itertools.permutations(factor.child):
        seen = set(factor.parents)
        ok = True
        for c in perm:
            if c not in allowed or not seen <= allowed[c]:
                ok = False
                break
            seen.add(c)
        if ok:
            return True
    return False


@dataclass(frozen=True, eq=False)
class FactorSpec:
    """A factorized channel-plus-inputs distribution of a declared family."""

    family: Family
    factors: tuple[Factor, ...]
    encoders: tuple[Factor, ...] = ()
    channel: Factor | None = None
    variables: tuple[VariableDecl, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "encoders", tuple(self.encoders))
        object.__setattr__(self, "variables", tuple(self.variables))
        self._validate()

    def all_factors(self) -> tuple[Factor, ...]:
        return self.factors + self.encoders + ((self.channel,) if self.channel is not None else ())

    def cards(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for f in self.all_factors():
            for n, k in f.cards().items():
                if out.setdefault(n, k) != k:
                    raise DistributionError(f"dimension mismatch: {n} has cardinalities {out[n]} and {k}")
        return out

    def _validate(self):
        cards = self.cards()
        for d in self.variables:
            if d.name in cards and cards[d.name] != d.cardinality:
                raise DistributionError(
                    f"dimension mismatch: {d.name} declared with cardinality {d.cardinality}, tables use {cards[d.name]}"
                )
        for enc in self.encoders:
            if not enc.is_deterministic:
                raise DistributionError(f"encoder table not deterministic: {enc.label}")
        children = [c for f in self.all_factors() for c in f.child]
        dup = {c for c in children if children.count(c) > 1}
        if dup:
            raise DistributionError(f"variables defined by more than one factor: {sorted(dup)}")
        expected = set(family_variables(self.family))
        if set(children) != expected:
            raise DistributionError(
                f"family {self.family.value} needs factors for {sorted(expected)}, got {sorted(children)}"
            )
        allowed = _SOURCES[self.family]
        enc_in = _CMG_ENCODER_INPUTS if self.family in (Family.CMG, Family.MOD_CMG, Family.HOD_CMG) else _ENCODER_INPUTS
        for f in self.factors:
            if not _admissible(f, allowed):
                raise DistributionError(f"factor {f.label} does not match the {self.family.value} factorization")
        for e in self.encoders:
            if len(e.child) != 1 or e.child[0] not in enc_in or not set(e.parents) <= enc_in[e.child[0]]:
                raise DistributionError(f"encoder {e.label} does not match the {self.family.value} factorization")
        if self.family in (Family.HK, Family.HOD):
            if {c for e in self.encoders for c in e.child} != {"X1", "X2"}:
                raise DistributionError(f"family {self.family.value} requires deterministic encoders for X1 and X2")
        ch = self.channel
        if ch is None or set(ch.child) != {"Y1", "Y2"} or set(ch.parents) != {"X1", "X2"}:
            raise DistributionError("channel must be a table p(Y1,Y2|X1,X2)")


_SWAP = str.maketrans("12", "21")


def swap_senders(spec: FactorSpec) -> FactorSpec:
    """The same distribution with the roles of users 1 and 2 exchanged."""

    def ren(names):
        return tuple(n.translate(_SWAP) if n != "Q" else n for n in names)

    def rf(f: Factor) -> Factor:
        return Factor(ren(f.child), ren(f.parents), f.table)

    return FactorSpec(
        spec.family,
        tuple(rf(f) for f in spec.factors),
        tuple(rf(f) for f in spec.encoders),
        rf(spec.channel) if spec.channel is not None else None,
        tuple(VariableDecl(ren((d.name,))[0], d.cardinality) for d in spec.variables),
    )


def build_joint(spec: FactorSpec) -> JointDist:
    """Multiply the factors out into the full joint, in canonical variable order."""
    cells = math.prod(spec.cards().values())
    if cells > MAX_CELLS:
        raise DistributionError(f"joint table of {cells} cells exceeds the {MAX_CELLS} cell cap")
    dist = JointDist.unit()
    pending = list(spec.all_factors())
    while pending:
        for f in pending:
            if set(f.parents) <= set(dist.names):
                dist = extend(dist, f)
                pending.remove(f)
                break
        else:
            raise DistributionError("factors do not form an acyclic chain: " + ", ".join(f.label for f in pending))
    return dist.reorder([n for n in CANONICAL_ORDER if n in dist.names])


@dataclass(frozen=True, eq=False)
class CommonPart:
    """Common randomness K shared by the pair (u, w) of one sender.

    ``table`` is p(K | parents); parents must already be in the base joint.
    """

    u: str
    w: str
    table: Factor

    @classmethod
    def uniform(cls, u: str, w: str, size: int, name: str = "K") -> "CommonPart":
        return cls(u, w, Factor((name,), (), [Fraction(1, size)] * size))

    @classmethod
    def from_probs(cls, u: str, w: str, probs, name: str = "K") -> "CommonPart":
        return cls(u, w, Factor((name,), (), list(probs)))

    @property
    def name(self) -> str:
        return self.table.child[0]


def wyner_lift(dist: JointDist, parts: Sequence[CommonPart], tol: float = INFO_TOL) -> JointDist:
    """Replace U, W by (U, K), (W, K) for each common part.

    Composite index of (x, k) is ``x * |K| + k``. Other variables keep their
    relation to the original U, W (encoders and channel are blind to K).
    """
    for part in parts:
        if len(part.table.child) != 1:
            raise DistributionError("a common part must be a single variable")
        k = part.name
        dist = extend(dist, part.table)
        given = ("Q",) if "Q" in dist.names and k != "Q" else ()
        given = tuple(g for g in given if g not in (part.u, part.w))
        dep = mutual_info(dist, k, (part.u, part.w), given)
        if dep > tol:
            raise DistributionError(
                f"common part {k} is not independent of ({part.u},{part.w}) given Q (I = {dep:.3g} bits)"
            )
        dist = _merge_common(dist, part.u, part.w, k)
    return dist


def _merge_common(dist: JointDist, u: str, w: str, k: str) -> JointDist:
    names = list(dist.names)
    rest = [n for n in names if n not in (u, w, k)]
    d = dist.reorder(rest + [u, w, k])
    nu, nw, nk = d.card(u), d.card(w), d.card(k)
    src = d.numerators
    out = np.zeros(src.shape[:-3] + (nu, nk, nw, nk), dtype=object)
    for kk in range(nk):
        out[..., :, kk, :, kk] = src[..., :, :, kk]
    out = out.reshape(src.shape[:-3] + (nu * nk, nw * nk))
    decls = [dist.variables[dist.axis(n)] for n in rest] + [VariableDecl(u, nu * nk), VariableDecl(w, nw * nk)]
    lifted = JointDist(decls, out, d.denominator)
    final = [n for n in names if n != k]
    return lifted.reorder(final)


def collapse(dist: JointDist, drop: Sequence[str] = ("U1", "U2")) -> JointDist:
    """Marginalize out the listed variables (the superposition collapse)."""
    return dist.marginal([n for n in dist.names if n not in drop])
