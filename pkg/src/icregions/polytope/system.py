"""Linear inequality systems over rate variables.

Right-hand sides are either symbolic (linear combinations of named bound
constants) or numeric (doubles). Left sides are always exact rationals.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .lp import LPSolver, OPTIMAL, UNBOUNDED

SYMBOLIC = "symbolic"
NUMERIC = "numeric"

NUMERIC_TOL = 1e-7
INCLUSION_TOL = 1e-9


class SystemError_(ValueError):
    """Malformed inequality system."""


class UnboundedRegionError(ValueError):
    """An LP over a region was unbounded where a bounded region is required."""


def _canon(items: Iterable[tuple[str, Fraction]]) -> tuple[tuple[str, Fraction], ...]:
    acc: dict[str, Fraction] = defaultdict(Fraction)
    for k, v in items:
        acc[k] += Fraction(v)
    return tuple(sorted((k, v) for k, v in acc.items() if v != 0))


def _fmt_coef(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_linear(terms: Sequence[tuple[str, Fraction]], offset=None) -> str:
    parts = []
    for name, c in terms:
        mag = abs(c)
        body = name if mag == 1 else f"{_fmt_coef(mag)}*{name}"
        parts.append(("-" if c < 0 else "+", body))
    if offset:
        if isinstance(offset, Fraction):
            parts.append(("-" if offset < 0 else "+", _fmt_coef(abs(offset))))
        else:
            parts.append(("-" if offset < 0 else "+", format(abs(offset), ".12g")))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


@dataclass(frozen=True)
class SymExpr:
    """Linear combination of constant symbols plus a rational offset."""

    terms: tuple[tuple[str, Fraction], ...] = ()
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "terms", _canon(self.terms))
        object.__setattr__(self, "offset", Fraction(self.offset))

    @classmethod
    def of(cls, mapping: Mapping[str, object] | None = None, offset=0) -> "SymExpr":
        return cls(tuple((k, Fraction(v)) for k, v in (mapping or {}).items()), Fraction(offset))

    @classmethod
    def symbol(cls, name: str) -> "SymExpr":
        return cls(((name, Fraction(1)),))

    @classmethod
    def parse(cls, text: str) -> "SymExpr":
        terms, offset = parse_linear(text)
        return cls(tuple(terms.items()), offset)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.terms)

    @property
    def symbols(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.terms)

    def __add__(self, other: "SymExpr") -> "SymExpr":
        return SymExpr(self.terms + other.terms, self.offset + other.offset)

    def __neg__(self) -> "SymExpr":
        return SymExpr(tuple((k, -v) for k, v in self.terms), -self.offset)

    def __sub__(self, other: "SymExpr") -> "SymExpr":
        return self + (-other)

    def __mul__(self, f) -> "SymExpr":
        f = Fraction(f)
        return SymExpr(tuple((k, v * f) for k, v in self.terms), self.offset * f)

    __rmul__ = __mul__

    def evaluate(self, values: Mapping[str, float]) -> float:
        try:
            return float(self.offset) + sum(float(c) * float(values[k]) for k, c in self.terms)
        except KeyError as exc:
            raise KeyError(f"missing constant {exc.args[0]!r}") from None

    def __str__(self):
        return _fmt_linear(self.terms, self.offset)


Rhs = Union[SymExpr, float]

# exponents need a decimal point or a signed exponent so that "2E2" reads as 2*E2
_NUM = r"\d+/\d+|(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|\d+[eE][-+]\d+|\d+"
_TERM = re.compile(rf"\s*(?P<sign>[+-])?\s*(?:(?P<coef>{_NUM})\s*(?P<star>\*)?\s*)?(?P<name>[A-Za-z_]\w*)?\s*")


def parse_linear(text: str) -> tuple[dict[str, Fraction], Fraction | float]:
    """Parse ``2*R1 - R2 + 3/2*A1 + 0.5`` into (terms, offset).

    A coefficient may precede a name directly (``2A1``) or via ``*``.
    Decimal literals make the offset a float; everything else stays exact.
    """
    terms: dict[str, Fraction] = defaultdict(Fraction)
    offset: Fraction | float = Fraction(0)
    pos, first = 0, True
    if not text.strip():
        raise SystemError_("empty expression")
    while pos < len(text):
        m = _TERM.match(text, pos)
        coef, name, sign = m.group("coef"), m.group("name"), m.group("sign")
        if m.end() == pos or (coef is None and name is None) or (sign is None and not first):
            raise SystemError_(f"cannot parse expression {text!r} at column {pos + 1}")
        first = False
        pos = m.end()
        sgn = -1 if sign == "-" else 1
        is_float = coef is not None and "/" not in coef and any(ch in coef for ch in ".eE")
        if name is None:
            offset = offset + sgn * (float(coef) if is_float else Fraction(coef))
            continue
        if is_float:
            raise SystemError_(f"coefficients must be exact rationals in {text!r}")
        terms[name] += sgn * (Fraction(coef) if coef else Fraction(1))
    return {k: v for k, v in terms.items() if v != 0}, offset


@dataclass(frozen=True)
class LinIneq:
    """coeffs . vars <= rhs."""

    coeffs: tuple[tuple[str, Fraction], ...]
    rhs: Rhs
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _canon(self.coeffs))
        if not isinstance(self.rhs, SymExpr):
            object.__setattr__(self, "rhs", float(self.rhs))

    @classmethod
    def of(cls, coeffs: Mapping[str, object], rhs, label: str = "") -> "LinIneq":
        return cls(tuple((k, Fraction(v)) for k, v in coeffs.items()), rhs, label)

    @property
    def symbolic(self) -> bool:
        return isinstance(self.rhs, SymExpr)

    def coeff(self, var: str) -> Fraction:
        for k, v in self.coeffs:
            if k == var:
                return v
        return Fraction(0)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    @property
    def is_nonneg(self) -> bool:
        """Row of the form -c*v <= 0."""
        zero = self.rhs == SymExpr() if self.symbolic else self.rhs == 0.0
        return len(self.coeffs) == 1 and self.coeffs[0][1] < 0 and zero

    def scaled(self, f: Fraction) -> "LinIneq":
        rhs = self.rhs * f if self.symbolic else self.rhs * float(f)
        return LinIneq(tuple((k, v * f) for k, v in self.coeffs), rhs, self.label)

    def normalized(self) -> "LinIneq":
        """Scale by a positive factor so the coefficients are coprime integers."""
        vals = [v for _, v in self.coeffs]
        if not vals and self.symbolic:
            vals = [v for _, v in self.rhs.terms] + ([self.rhs.offset] if self.rhs.offset else [])
        if not vals:
            return self
        den = math.lcm(*[v.denominator for v in vals])
        g = math.gcd(*[int(v * den) for v in vals])
        f = Fraction(den, g)
        return self if f == 1 else self.scaled(f)

    def key(self):
        return (self.coeffs, self.rhs)

    def evaluate(self, values: Mapping[str, float]) -> "LinIneq":
        rhs = self.rhs.evaluate(values) if self.symbolic else self.rhs
        return LinIneq(self.coeffs, rhs, self.label)

    def lhs_value(self, point: Mapping[str, float]) -> float:
        return sum(float(c) * float(point[k]) for k, c in self.coeffs)

    def __str__(self):
        rhs = str(self.rhs) if self.symbolic else format(self.rhs, ".12g")
        return f"{_fmt_linear(self.coeffs)} <= {rhs}"


def _combine(p: LinIneq, n: LinIneq, var: str) -> LinIneq:
    a, b = p.coeff(var), -n.coeff(var)
    coeffs = tuple((k, v * b) for k, v in p.coeffs) + tuple((k, v * a) for k, v in n.coeffs)
    if p.symbolic:
        rhs = p.rhs * b + n.rhs * a
    else:
        rhs = p.rhs * float(b) + n.rhs * float(a)
    return LinIneq(coeffs, rhs).normalized()


@dataclass(frozen=True)
class IneqSystem:
    variables: tuple[str, ...]
    rows: tuple[LinIneq, ...]
    mode: str = SYMBOLIC

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.mode not in (SYMBOLIC, NUMERIC):
            raise SystemError_(f"unknown mode {self.mode!r}")
        vs = set(self.variables)
        for r in self.rows:
            if r.symbolic != (self.mode == SYMBOLIC):
                raise SystemError_(f"row {r} does not match {self.mode} mode")
            extra = {k for k, _ in r.coeffs} - vs
            if extra:
                raise SystemError_(f"row {r} uses variables {sorted(extra)} outside {self.variables}")

    @property
    def symbolic(self) -> bool:
        return self.mode == SYMBOLIC

    def __len__(self):
        return len(self.rows)

    def body(self) -> tuple[LinIneq, ...]:
        """Rows other than plain nonnegativity rows."""
        return tuple(r for r in self.rows if not r.is_nonneg)

    def evaluate(self, values: Mapping[str, float]) -> "IneqSystem":
        if not self.symbolic:
            return self
        return IneqSystem(self.variables, tuple(r.evaluate(values) for r in self.rows), NUMERIC)

    def substitute(self, mapping: Mapping[str, Mapping[str, object]], variables: Sequence[str]) -> "IneqSystem":
        """Replace each variable in ``mapping`` by a linear expression in other variables."""
        rows = []
        for r in self.rows:
            items = []
            for k, v in r.coeffs:
                if k in mapping:
                    items += [(k2, v * Fraction(c)) for k2, c in mapping[k].items()]
                else:
                    items.append((k, v))
            rows.append(LinIneq(tuple(items), r.rhs, r.label))
        return IneqSystem(tuple(variables), tuple(rows), self.mode)

    def without(self, labels: Iterable[str]) -> "IneqSystem":
        drop = set(labels)
        return IneqSystem(self.variables, tuple(r for r in self.rows if r.label not in drop), self.mode)

    def to_text(self) -> str:
        lines = [f"# variables: {' '.join(self.variables)}", f"# mode: {self.mode}"]
        for r in self.rows:
            lines.append(str(r) + (f"  # {r.label}" if r.label else ""))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, variables: Sequence[str] | None = None, mode: str | None = None) -> "IneqSystem":
        rows = []
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("#"):
                m = re.match(r"#\s*(variables|mode):\s*(.*)", line)
                if m and m.group(1) == "variables" and variables is None:
                    variables = tuple(m.group(2).split())
                elif m and m.group(1) == "mode" and mode is None:
                    mode = m.group(2).strip()
                continue
            if not line:
                continue
            line, _, label = line.partition("#")
            rows.append(parse_row(line, label.strip()))
        if mode is None:
            mode = SYMBOLIC if all(r.symbolic for r in rows) else NUMERIC
        if mode == NUMERIC:
            rows = [r if not r.symbolic else _to_numeric(r) for r in rows]
        if variables is None:
            variables = tuple(sorted({k for r in rows for k, _ in r.coeffs}))
        return cls(tuple(variables), tuple(rows), mode)

    def __str__(self):
        return self.to_text()


def _to_numeric(r: LinIneq) -> LinIneq:
    if r.rhs.terms:
        raise SystemError_(f"row {r} has symbols in a numeric system")
    return LinIneq(r.coeffs, float(r.rhs.offset), r.label)


def parse_row(text: str, label: str = "") -> LinIneq:
    """Parse ``2*R1 + R2 <= A1 + G1 + E2`` (symbolic) or ``R1 <= 1.5`` (numeric)."""
    if "<=" not in text:
        raise SystemError_(f"row must contain '<=': {text!r}")
    lhs_txt, rhs_txt = text.split("<=", 1)
    lhs, lhs_off = parse_linear(lhs_txt)
    rhs, rhs_off = parse_linear(rhs_txt)
    rhs_off = rhs_off - lhs_off
    if isinstance(rhs_off, float) and not rhs:
        return LinIneq(tuple(lhs.items()), rhs_off, label)
    if isinstance(rhs_off, float):
        raise SystemError_(f"mixing decimals and symbols in {text!r}")
    return LinIneq(tuple(lhs.items()), SymExpr(tuple(rhs.items()), rhs_off), label)


def system_from_rows(variables: Sequence[str], lines: Iterable[str], mode: str = SYMBOLIC) -> IneqSystem:
    rows = []
    for line in lines:
        line, _, label = line.partition("#")
        r = parse_row(line, label.strip())
        if mode == NUMERIC and r.symbolic:
            r = _to_numeric(r)
        rows.append(r)
    return IneqSystem(tuple(variables), tuple(rows), mode)


@dataclass(frozen=True)
class AxiomSet:
    """Known facts lhs <= rhs between constant expressions."""

    relations: tuple[tuple[SymExpr, SymExpr], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))

    @classmethod
    def parse(cls, lines: Iterable[str]) -> "AxiomSet":
        rels = []
        for line in lines:
            if "==" in line:
                a, b = (SymExpr.parse(s) for s in line.split("=="))
                rels += [(a, b), (b, a)]
            elif "<=" in line:
                a, b = (SymExpr.parse(s) for s in line.split("<="))
                rels.append((a, b))
            elif ">=" in line:
                a, b = (SymExpr.parse(s) for s in line.split(">="))
                rels.append((b, a))
            else:
                raise SystemError_(f"axiom needs <=, >= or ==: {line!r}")
        return cls(tuple(rels))

    def __add__(self, other: "AxiomSet") -> "AxiomSet":
        return AxiomSet(self.relations + other.relations)

    def gaps(self) -> list[SymExpr]:
        """rhs - lhs of every relation; each is a nonnegative quantity."""
        return [b - a for a, b in self.relations]


def _dedupe(rows: Iterable[LinIneq], numeric: bool) -> list[LinIneq]:
    if not numeric:
        seen: dict = {}
        for r in rows:
            seen.setdefault(r.key(), r)
        return list(seen.values())
    best: dict = {}
    for r in rows:
        k = r.coeffs
        if k not in best or r.rhs < best[k].rhs:
            best[k] = r
    return list(best.values())


def eliminate(sys: IneqSystem, var: str) -> IneqSystem:
    """Fourier-Motzkin elimination of ``var``.

    Output rows are scaled to coprime integer coefficients. Structurally equal
    rows are merged; in numeric mode parallel rows keep only the tightest rhs.
    """
    if var not in sys.variables:
        raise SystemError_(f"{var} is not a variable of the system")
    pos = [r for r in sys.rows if r.coeff(var) > 0]
    neg = [r for r in sys.rows if r.coeff(var) < 0]
    out = [r for r in sys.rows if r.coeff(var) == 0]
    out += [_combine(p, n, var) for p in pos for n in neg]
    variables = tuple(v for v in sys.variables if v != var)
    return IneqSystem(variables, tuple(_dedupe(out, not sys.symbolic)), sys.mode)


# -- symbolic implication -----------------------------------------------------

def _symbol_axes(exprs: Iterable[SymExpr]) -> list[str]:
    names = set()
    for e in exprs:
        names |= e.symbols
    return sorted(names)


def provably_le(lo: SymExpr, hi: SymExpr, axioms: AxiomSet) -> bool:
    """True when hi - lo is a nonnegative combination of axiom gaps plus
    nonnegative constants (every constant symbol is >= 0)."""
    return implied_by(LinIneq((), hi - lo), [], axioms)


def implied_by(row: LinIneq, others: Sequence[LinIneq], axioms: AxiomSet) -> bool:
    """Whether ``row`` follows from ``others`` for all rate values >= 0 and
    all constant values satisfying ``axioms``.

    Certificate: lambda >= 0 over rows and mu >= 0 over axioms with
    sum(lambda * coeffs) >= row coeffs (rates are nonnegative) and
    sum(lambda * rhs) + sum(mu * gap) <= row rhs symbol by symbol.
    """
    gaps = axioms.gaps()
    syms = _symbol_axes([row.rhs] + [o.rhs for o in others] + gaps)
    rate_vars = sorted({k for r in [row, *others] for k, _ in r.coeffs})
    ncols = len(others) + len(gaps)
    if ncols == 0:
        return all(c <= 0 for _, c in row.coeffs) and all(v >= 0 for _, v in row.rhs.terms) and row.rhs.offset >= 0
    A, b = [], []
    for v in rate_vars:
        A.append([-o.coeff(v) for o in others] + [0] * len(gaps))
        b.append(-row.coeff(v))
    for s in syms + [None]:
        def part(e: SymExpr):
            return e.offset if s is None else e.as_dict().get(s, 0)
        A.append([part(o.rhs) for o in others] + [part(g) for g in gaps])
        b.append(part(row.rhs))
    return LPSolver(A, b).feasible


def prune(sys: IneqSystem, axioms: AxiomSet) -> IneqSystem:
    """Cheap symbolic pruning: constant rows with provably nonnegative rhs, and
    rows dominated by a row with identical coefficients."""
    rows = list(sys.rows)
    keep = []
    for i, r in enumerate(rows):
        if r.is_constant and provably_le(SymExpr(), r.rhs, axioms):
            continue
        dominated = False
        for j, s in enumerate(rows):
            if i == j or s.coeffs != r.coeffs:
                continue
            if provably_le(s.rhs, r.rhs, axioms):
                if j > i and provably_le(r.rhs, s.rhs, axioms):
                    continue
                dominated = True
                break
        if not dominated:
            keep.append(r)
    return IneqSystem(sys.variables, tuple(keep), sys.mode)


def reduce(sys: IneqSystem, axioms: AxiomSet | None = None) -> IneqSystem:
    """Remove redundant rows; nonnegativity rows are always kept.

    Symbolic mode needs axioms and removes a row when it is implied by the
    remaining rows under them. Numeric mode removes a row when maximizing its
    left side over the remaining rows stays within NUMERIC_TOL of its rhs.
    """
    if sys.symbolic:
        if axioms is None:
            raise SystemError_("symbolic reduction needs an axiom set")
        rows = list(prune(sys, axioms).rows)
        i = 0
        while i < len(rows):
            r = rows[i]
            if not r.is_nonneg and implied_by(r, rows[:i] + rows[i + 1:], axioms):
                rows.pop(i)
            else:
                i += 1
        return IneqSystem(sys.variables, tuple(rows), sys.mode)

    rows = []
    for r in sys.rows:
        if r.is_constant:
            if r.rhs >= -NUMERIC_TOL:
                continue
        rows.append(r)
    i = 0
    while i < len(rows):
        r = rows[i]
        if r.is_nonneg or r.is_constant:
            i += 1
            continue
        rest = rows[:i] + rows[i + 1:]
        res = _maximize_over(sys.variables, rest, r)
        if res.status == OPTIMAL and float(res.value) <= r.rhs + NUMERIC_TOL:
            rows.pop(i)
        elif res.status != OPTIMAL and res.status != UNBOUNDED:
            # remaining rows infeasible: the system is empty whatever r says
            rows.pop(i)
        else:
            i += 1
    return IneqSystem(sys.variables, tuple(rows), sys.mode)


def _matrix(variables: Sequence[str], rows: Sequence[LinIneq]):
    A = [[r.coeff(v) for v in variables] for r in rows]
    b = [r.rhs for r in rows]
    return A, b


def _maximize_over(variables, rows, target: LinIneq):
    A, b = _matrix(variables, rows)
    c = [target.coeff(v) for v in variables]
    if not A:
        A, b = [[Fraction(0)] * len(variables)], [0.0]
    return LPSolver(A, b).maximize(c)


def project_rates(sys: IneqSystem, axioms: AxiomSet | None = None) -> IneqSystem:
    """Project a system over (S1,T1,S2,T2) to (R1,R2) with R_i = S_i + T_i.

    With axioms (symbolic mode) the intermediate system is pruned between the
    two eliminations; the result is not reduced.
    """
    need = {"S1", "T1", "S2", "T2"}
    if not need <= set(sys.variables):
        raise SystemError_(f"projection needs variables {sorted(need)}")
    sub = sys.substitute(
        {"S1": {"R1": 1, "T1": -1}, "S2": {"R2": 1, "T2": -1}},
        ("R1", "T1", "R2", "T2"),
    )
    step = eliminate(sub, "T1")
    if axioms is not None and sys.symbolic:
        step = prune(step, axioms)
    return eliminate(step, "T2")


# -- inclusion ----------------------------------------------------------------

@dataclass(frozen=True)
class InclusionResult:
    holds: bool
    witness: tuple[float, ...] | None = None
    violated_row: LinIneq | None = None
    violation: float = 0.0

    def __bool__(self):
        return self.holds


def includes(a: IneqSystem, b: IneqSystem, tol: float = INCLUSION_TOL) -> InclusionResult:
    """Whether every point of a (with variables >= 0) satisfies every row of b."""
    if a.symbolic or b.symbolic:
        raise SystemError_("inclusion needs numeric systems")
    if a.variables != b.variables:
        raise SystemError_(f"variable mismatch {a.variables} vs {b.variables}")
    A, rhs = _matrix(a.variables, a.rows)
    if not A:
        A, rhs = [[Fraction(0)] * len(a.variables)], [0.0]
    solver = LPSolver(A, rhs)
    if not solver.feasible:
        return InclusionResult(True)
    worst = InclusionResult(True)
    for r in b.rows:
        res = solver.maximize([r.coeff(v) for v in a.variables])
        if res.status == UNBOUNDED:
            raise UnboundedRegionError(f"region is unbounded in direction of {r}")
        gap = float(res.value) - r.rhs
        if gap > tol and gap > worst.violation:
            worst = InclusionResult(False, tuple(float(x) for x in res.x), r, gap)
    return worst


def equal(a: IneqSystem, b: IneqSystem, tol: float = INCLUSION_TOL) -> bool:
    return bool(includes(a, b, tol)) and bool(includes(b, a, tol))
