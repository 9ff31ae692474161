"""Named rate regions, FME cross-checks and the lifted-vs-base comparison suite."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Sequence

from .bounds import ConstantSet, axioms, bound_constants, constant_relations
from .polytope.geometry import Region2D, geometry2d
from .polytope.system import (
    NUMERIC,
    SYMBOLIC,
    IneqSystem,
    LinIneq,
    SymExpr,
    equal,
    includes,
    parse_row,
    project_rates,
    reduce,
)
from .probspace import CommonPart, Family, JointDist, wyner_lift

TS_VARS = ("S1", "T1", "S2", "T2")
R_VARS = ("R1", "R2")


class RegionId(str, enum.Enum):
    S_HK = "S_HK"
    R_HK = "R_HK"
    R_HK_EQUI = "R_HK_EQUI"
    S_HK_MOD = "S_HK_MOD"
    R_HK_MOD = "R_HK_MOD"
    S_CMG = "S_CMG"
    S_CMG_COMP = "S_CMG_COMP"
    S_MODCMG = "S_MODCMG"
    R_CMG = "R_CMG"
    R_CMG_EQUI = "R_CMG_EQUI"
    R_MODCMG = "R_MODCMG"
    COMPACT = "COMPACT"
    S_HOD = "S_HOD"
    S_HOD_MOD = "S_HOD_MOD"
    R_HOD = "R_HOD"
    R_HOD_MOD = "R_HOD_MOD"
    S_HODCMG = "S_HODCMG"
    R_HODCMG = "R_HODCMG"
    R_HODCMG_EQUI = "R_HODCMG_EQUI"


# Templates are written with lowercase letters a..g and receiver digits; a
# naming style maps them onto a constant family.
_STYLE = {
    "lower": lambda x, i: f"{x}{i}",
    "upper": lambda x, i: f"{x.upper()}{i}",
    "primed": lambda x, i: f"{x}p{i}",
    "upper_primed": lambda x, i: f"{x.upper()}p{i}",
}
_SYMBOL = re.compile(r"(?<![A-Za-z])([a-g])([12])\b")


def _style(lines: Sequence[str], style: str) -> list[str]:
    fn = _STYLE[style]
    return [_SYMBOL.sub(lambda m: fn(m.group(1), m.group(2)), line) for line in lines]


def _per_receiver(lines: Sequence[str]) -> list[str]:
    out = []
    for i, j in ((1, 2), (2, 1)):
        out += [line.format(i=i, j=j) for line in lines]
    return out


# (T,S) systems; the trailing comment is the row label (its bound constant)
_TS_FULL = _per_receiver([
    "S{i} <= a{i}  # a{i}",
    "T{i} <= b{i}  # b{i}",
    "T{j} <= c{i}  # c{i}",
    "S{i} + T{i} <= d{i}  # d{i}",
    "S{i} + T{j} <= e{i}  # e{i}",
    "T{i} + T{j} <= f{i}  # f{i}",
    "S{i} + T{i} + T{j} <= g{i}  # g{i}",
])
_TS_SUPERPOSITION = _per_receiver([
    "S{i} <= a{i}  # a{i}",
    "S{i} + T{i} <= d{i}  # d{i}",
    "S{i} + T{j} <= e{i}  # e{i}",
    "S{i} + T{i} + T{j} <= g{i}  # g{i}",
])
_TS_MOD_SUPERPOSITION = _per_receiver([
    "S{i} <= a{i}  # a{i}",
    "T{j} <= c{i}  # c{i}",
    "S{i} + T{i} <= d{i}  # d{i}",
    "S{i} + T{j} <= e{i}  # e{i}",
    "S{i} + T{i} + T{j} <= g{i}  # g{i}",
])
# superposition system written with all seven single-receiver rows; the rows
# without S are implied by the others
_TS_SUPERPOSITION_COMPLETE = _per_receiver([
    "S{i} <= a{i}  # a{i}",
    "T{i} <= d{i}  # b{i}",
    "T{j} <= e{i}  # c{i}",
    "S{i} + T{i} <= d{i}  # d{i}",
    "S{i} + T{j} <= e{i}  # e{i}",
    "T{i} + T{j} <= g{i}  # f{i}",
    "S{i} + T{i} + T{j} <= g{i}  # g{i}",
])

_R_BASE = [
    "R1 <= d1", "R1 <= a1 + c2", "R2 <= d2", "R2 <= a2 + c1",
    "R1 + R2 <= a1 + g2", "R1 + R2 <= a2 + g1", "R1 + R2 <= e1 + e2",
    "2*R1 + R2 <= a1 + g1 + e2", "R1 + 2*R2 <= a2 + g2 + e1",
]
_R_EXTRA_EQUI = [
    "2*R1 + R2 <= 2*a1 + e2 + f2", "R1 + 2*R2 <= 2*a2 + e1 + f1", "R1 <= a1 + e2", "R2 <= a2 + e1",
]
_R_MOD = [
    "R1 <= d1", "R1 <= a1 + e2", "R1 <= a1 + f2", "R2 <= d2", "R2 <= a2 + e1", "R2 <= a2 + f1",
    "R1 + R2 <= a1 + g2", "R1 + R2 <= a2 + g1", "R1 + R2 <= e1 + e2",
    "2*R1 + R2 <= a1 + g1 + e2", "2*R1 + R2 <= 2*a1 + e2 + f2",
    "R1 + 2*R2 <= a2 + g2 + e1", "R1 + 2*R2 <= 2*a2 + e1 + f1",
]
_R_SUPERPOSITION = [
    "R1 <= d1", "R1 <= a1 + e2", "R2 <= d2", "R2 <= a2 + e1",
    "R1 + R2 <= a1 + g2", "R1 + R2 <= a2 + g1", "R1 + R2 <= e1 + e2",
    "2*R1 + R2 <= a1 + g1 + e2", "R1 + 2*R2 <= a2 + g2 + e1",
]
_R_SUPERPOSITION_EQUI = _R_SUPERPOSITION + [
    "R1 <= a1 + f2", "R2 <= a2 + f1", "2*R1 + R2 <= 2*a1 + e2 + f2", "R1 + 2*R2 <= 2*a2 + e1 + f1",
]
_R_COMPACT = [
    "R1 <= d1", "R2 <= d2", "R1 + R2 <= a1 + g2", "R1 + R2 <= a2 + g1", "R1 + R2 <= e1 + e2",
    "2*R1 + R2 <= a1 + g1 + e2", "R1 + 2*R2 <= a2 + g2 + e1",
]
_R_DEPENDENT = [
    "R1 <= d1", "R1 <= a1 + c2", "R1 <= a1 + e2", "R2 <= d2", "R2 <= a2 + c1", "R2 <= a2 + e1",
    "R1 + R2 <= a2 + g1", "R1 + R2 <= a1 + g2", "R1 + R2 <= e1 + e2",
    "2*R1 + R2 <= a1 + g1 + e2", "2*R1 + R2 <= 2*a1 + e2 + f2",
    "R1 + 2*R2 <= a2 + g2 + e1", "R1 + 2*R2 <= 2*a2 + e1 + f1",
]

_HK, _HOD = frozenset({Family.HK}), frozenset({Family.HOD})
_CMG = frozenset({Family.CMG, Family.MOD_CMG})
_MODCMG = frozenset({Family.MOD_CMG})
_HODCMG = frozenset({Family.HOD_CMG})


@dataclass(frozen=True)
class _Template:
    variables: tuple[str, ...]
    lines: tuple[str, ...]
    style: str
    families: frozenset


_TEMPLATES: dict[RegionId, _Template] = {}


def _t(rid, variables, lines, style, families):
    _TEMPLATES[rid] = _Template(variables, tuple(lines), style, families)


_t(RegionId.S_HK, TS_VARS, _TS_FULL, "lower", _HK)
_t(RegionId.S_HK_MOD, TS_VARS, [x for x in _TS_FULL if "# c" not in x], "lower", _HK)
_t(RegionId.R_HK, R_VARS, _R_BASE, "lower", _HK)
_t(RegionId.R_HK_EQUI, R_VARS, _R_BASE + _R_EXTRA_EQUI, "lower", _HK)
_t(RegionId.R_HK_MOD, R_VARS, _R_MOD, "lower", _HK)
_t(RegionId.S_CMG, TS_VARS, _TS_SUPERPOSITION, "primed", _CMG)
_t(RegionId.S_CMG_COMP, TS_VARS, _TS_SUPERPOSITION_COMPLETE, "primed", _CMG)
_t(RegionId.S_MODCMG, TS_VARS, _TS_MOD_SUPERPOSITION, "primed", _MODCMG)
_t(RegionId.R_CMG, R_VARS, _R_SUPERPOSITION, "primed", _CMG)
_t(RegionId.R_CMG_EQUI, R_VARS, _R_SUPERPOSITION_EQUI, "primed", _CMG)
_t(RegionId.R_MODCMG, R_VARS, _R_BASE, "primed", _MODCMG)
_t(RegionId.COMPACT, R_VARS, _R_COMPACT, "lower", _HK | _CMG)
_t(RegionId.S_HOD, TS_VARS, _TS_FULL, "upper", _HOD)
_t(RegionId.S_HOD_MOD, TS_VARS, [x for x in _TS_FULL if "# c" not in x], "upper", _HOD)
_t(RegionId.R_HOD, R_VARS, _R_DEPENDENT, "upper", _HOD)
_t(RegionId.R_HOD_MOD, R_VARS, _R_MOD, "upper", _HOD)
_t(RegionId.S_HODCMG, TS_VARS, _TS_SUPERPOSITION, "upper_primed", _HODCMG)
_t(RegionId.R_HODCMG, R_VARS, _R_SUPERPOSITION, "upper_primed", _HODCMG)
_t(RegionId.R_HODCMG_EQUI, R_VARS, _R_SUPERPOSITION_EQUI, "upper_primed", _HODCMG)

# symbolic reductions: which relation families justify each projection
PROJECTIONS: dict[RegionId, tuple[RegionId, tuple[str, ...]]] = {
    RegionId.S_HK: (RegionId.R_HK, ("HK", "HK_INDEPENDENCE")),
    RegionId.S_HK_MOD: (RegionId.R_HK_MOD, ("HK",)),
    RegionId.S_CMG: (RegionId.R_CMG, ("CMG",)),
    RegionId.S_CMG_COMP: (RegionId.R_CMG, ("CMG",)),
    RegionId.S_MODCMG: (RegionId.R_MODCMG, ("MOD_CMG", "MOD_CMG_INDEPENDENCE")),
    RegionId.S_HOD: (RegionId.R_HOD, ("HOD",)),
    RegionId.S_HOD_MOD: (RegionId.R_HOD_MOD, ("HOD",)),
    RegionId.S_HODCMG: (RegionId.R_HODCMG, ("HOD_CMG",)),
}


def region_families(rid: RegionId | str) -> frozenset:
    """Constant families a region's closed form can be instantiated with."""
    return _TEMPLATES[RegionId(rid)].families


def region_variables(rid: RegionId | str) -> tuple[str, ...]:
    return _TEMPLATES[RegionId(rid)].variables


def template_lines(rid: RegionId | str, family: Family | str | None = None) -> list[str]:
    rid = RegionId(rid)
    t = _TEMPLATES[rid]
    style = t.style
    if rid == RegionId.COMPACT and family is not None and Family(family) in _CMG:
        style = "primed"
    return _style(t.lines, style)


def build(rid: RegionId | str, c: ConstantSet | None = None) -> IneqSystem:
    """Instantiate a region's rows (plus nonnegativity of every rate).

    With ``c=None`` the system is symbolic in the canonical constant names.
    """
    rid = RegionId(rid)
    t = _TEMPLATES[rid]
    if c is not None and c.family not in t.families:
        raise ValueError(
            f"{rid.value} needs {'/'.join(sorted(f.value for f in t.families))} constants, got {c.family.value}"
        )
    rows = []
    for line in template_lines(rid, c.family if c is not None else None):
        body, _, label = line.partition("#")
        rows.append(parse_row(body, label.strip()))
    rows += [LinIneq.of({v: -1}, SymExpr(), f"{v}>=0") for v in t.variables]
    sym = IneqSystem(t.variables, tuple(rows), SYMBOLIC)
    if c is None:
        return sym
    missing = {s for r in sym.rows for s in r.rhs.symbols} - set(c.values)
    if missing:
        raise ValueError(f"missing constants {sorted(missing)}")
    return sym.evaluate(c.values)


def symbolic_projection(rid: RegionId | str) -> tuple[IneqSystem, IneqSystem]:
    """(raw FME output, reduced system) for a (T,S) region id."""
    rid = RegionId(rid)
    if rid not in PROJECTIONS:
        raise ValueError(f"{rid.value} is not a (T,S) region")
    _, fams = PROJECTIONS[rid]
    ax = axioms(*fams)
    raw = project_rates(build(rid), ax)
    return raw, reduce(raw, ax)


# -- reports ------------------------------------------------------------------

PASS, FAIL, INFO = "pass", "fail", "info"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    value: float = 0.0
    tolerance: float = 0.0
    detail: str = ""


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple[Check, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self) -> tuple[Check, ...]:
        return tuple(c for c in self.checks if c.status == FAIL)

    def __add__(self, other: "SuiteReport") -> "SuiteReport":
        return SuiteReport(self.checks + other.checks)

    def to_text(self) -> str:
        width = max([len(c.name) for c in self.checks] + [5])
        lines = [f"{'check':<{width}}  status  {'value':>14}  tolerance"]
        for c in self.checks:
            line = f"{c.name:<{width}}  {c.status:<6}  {c.value:>14.6g}  {c.tolerance:.0e}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line)
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        import csv
        import io

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "status", "value", "tolerance"])
        for c in self.checks:
            w.writerow([c.name, c.status, f"{c.value:.12g}", f"{c.tolerance:.12g}"])
        return buf.getvalue()


def _inclusion_check(name, a, b, tol=1e-9) -> Check:
    res = includes(a, b, tol)
    detail = "" if res.holds else f"witness {res.witness} violates {res.violated_row}"
    return Check(name, PASS if res.holds else FAIL, res.violation, tol, detail)


def _equality_check(name, a, b, tol=1e-9) -> Check:
    ab, ba = includes(a, b, tol), includes(b, a, tol)
    ok = ab.holds and ba.holds
    bad = ab if not ab.holds else ba
    detail = "" if ok else f"witness {bad.witness} violates {bad.violated_row}"
    return Check(name, PASS if ok else FAIL, max(ab.violation, ba.violation), tol, detail)


def _fmt_vertices(reg: Region2D) -> str:
    return " ".join(f"({x:.6g},{y:.6g})" for x, y in reg.vertices)


_CROSSCHECKS = {
    Family.HK: ((RegionId.S_HK, RegionId.R_HK), (RegionId.S_HK_MOD, RegionId.R_HK_MOD)),
    Family.HOD: ((RegionId.S_HOD, RegionId.R_HOD), (RegionId.S_HOD_MOD, RegionId.R_HOD_MOD)),
    Family.CMG: ((RegionId.S_CMG, RegionId.R_CMG), (RegionId.S_CMG_COMP, RegionId.R_CMG)),
    Family.MOD_CMG: ((RegionId.S_MODCMG, RegionId.R_MODCMG),),
    Family.HOD_CMG: ((RegionId.S_HODCMG, RegionId.R_HODCMG),),
}
# rows that stay essential once the private and common parts are correlated
_DEPENDENT_ONLY_ROWS = ("2*R1 + R2 <= 2*A1 + E2 + F2", "R1 + 2*R2 <= 2*A2 + E1 + F1")


def crosscheck_constants(c: ConstantSet, tol: float = 1e-7) -> SuiteReport:
    checks = []
    for s_id, r_id in _CROSSCHECKS[c.family]:
        projected = project_rates(build(s_id, c))
        closed = build(r_id, c)
        name = f"project({s_id.value}) == {r_id.value}"
        chk = _equality_check(name, projected, closed, tol)
        g1, g2 = geometry2d(projected), geometry2d(closed)
        same = g1.matches(g2, tol)
        if not same and chk.status == PASS:
            chk = Check(name, FAIL, chk.value, tol, "vertex sets differ")
        checks.append(Check(chk.name, chk.status, chk.value, tol, chk.detail or _fmt_vertices(g2)))
    if c.family == Family.HOD:
        full = build(RegionId.R_HOD, c)
        for row in _DEPENDENT_ONLY_ROWS:
            key = parse_row(row).coeffs
            target = parse_row(row).rhs.evaluate(c.values)
            rest = IneqSystem(
                full.variables,
                tuple(r for r in full.rows if not (r.coeffs == key and abs(r.rhs - target) < 1e-15)),
                NUMERIC,
            )
            active = not equal(rest, full, 1e-9)
            checks.append(Check(f"active: {row}", INFO, float(active), 1e-9))
    return SuiteReport(tuple(checks))


def crosscheck_fme(dist: JointDist, family: Family | str, tol: float = 1e-7) -> SuiteReport:
    """Numeric projection of each (T,S) system against its closed form."""
    return crosscheck_constants(bound_constants(family, dist), tol)


def _relation_checks(label: str, report) -> list[Check]:
    out = []
    for c in report.checks:
        viol = abs(c.lhs - c.rhs) if "==" in c.name else max(c.lhs - c.rhs, 0.0)
        out.append(Check(f"{label}: {c.name}", PASS if c.holds else FAIL, viol, 1e-9))
    return out


@dataclass(frozen=True)
class MatchedConstants:
    hk: ConstantSet
    cmg: ConstantSet
    mod_cmg: ConstantSet
    hod: ConstantSet
    hod_cmg: ConstantSet


def matched_constants(base: JointDist, parts: Sequence[CommonPart]) -> MatchedConstants:
    lifted = wyner_lift(base, parts)
    return MatchedConstants(
        hk=bound_constants(Family.HK, base),
        cmg=bound_constants(Family.CMG, base),
        mod_cmg=bound_constants(Family.MOD_CMG, base),
        hod=bound_constants(Family.HOD, lifted),
        hod_cmg=bound_constants(Family.HOD_CMG, lifted),
    )


def compare_constants(m: MatchedConstants, trivial_common: bool = False) -> SuiteReport:
    checks: list[Check] = []
    checks += _relation_checks("lift dominance", constant_relations("LIFT", (m.hk, m.hod)))
    checks += _relation_checks("dependent collapse", constant_relations("HOD_VS_HOD_CMG", (m.hod, m.hod_cmg)))
    checks += _relation_checks("independent collapse", constant_relations("HK_VS_CMG", (m.hk, m.cmg)))

    s_hk, s_hod = build(RegionId.S_HK, m.hk), build(RegionId.S_HOD, m.hod)
    worst = max((a.rhs - b.rhs for a, b in zip(s_hk.rows, s_hod.rows)), default=0.0)
    checks.append(Check("S_HK rows <= S_HOD rows", PASS if worst <= 1e-9 else FAIL, max(worst, 0.0), 1e-9))
    checks.append(_inclusion_check("S_HK in S_HOD", s_hk, s_hod))

    regions = {rid: build(rid, m.hk) for rid in (RegionId.R_HK, RegionId.R_HK_MOD)}
    regions.update({rid: build(rid, m.cmg) for rid in (RegionId.S_CMG, RegionId.R_CMG)})
    regions.update({rid: build(rid, m.hod) for rid in (RegionId.R_HOD, RegionId.R_HOD_MOD)})
    regions.update(
        {rid: build(rid, m.hod_cmg) for rid in (RegionId.S_HODCMG, RegionId.R_HODCMG, RegionId.R_HODCMG_EQUI)}
    )
    regions[RegionId.R_MODCMG] = build(RegionId.R_MODCMG, m.mod_cmg)
    R = regions
    checks.append(_inclusion_check("R_HK in R_HOD", R[RegionId.R_HK], R[RegionId.R_HOD]))
    checks.append(_inclusion_check("R_HK_MOD in R_HOD_MOD", R[RegionId.R_HK_MOD], R[RegionId.R_HOD_MOD]))
    checks.append(_inclusion_check("S_CMG in S_HODCMG", R[RegionId.S_CMG], R[RegionId.S_HODCMG]))
    checks.append(_inclusion_check("R_CMG in R_HODCMG", R[RegionId.R_CMG], R[RegionId.R_HODCMG]))
    checks.append(_equality_check("R_HOD_MOD == R_HODCMG_EQUI", R[RegionId.R_HOD_MOD], R[RegionId.R_HODCMG_EQUI]))
    checks.append(_equality_check("R_HK == R_MODCMG", R[RegionId.R_HK], R[RegionId.R_MODCMG]))

    status = PASS if trivial_common else INFO
    if trivial_common:
        diff = max(abs(m.hod[n.upper()] - m.hk[n]) for n in m.hk.names)
        checks.append(Check("trivial common part: constants equal", PASS if diff <= 1e-9 else FAIL, diff, 1e-9))
    for big, small in (
        (RegionId.R_HOD, RegionId.R_HK),
        (RegionId.R_HOD_MOD, RegionId.R_HK_MOD),
        (RegionId.R_HODCMG, RegionId.R_CMG),
    ):
        delta = geometry2d(R[big]).area - geometry2d(R[small]).area
        st = status
        if trivial_common and abs(delta) > 1e-6:
            st = FAIL
        checks.append(Check(f"area {big.value} - area {small.value}", st, delta, 1e-6))
    return SuiteReport(tuple(checks))


def compare_suite(base: JointDist, parts: Sequence[CommonPart]) -> SuiteReport:
    """All lifted-versus-base checks for one base distribution and common parts."""
    m = matched_constants(base, parts)
    trivial = all(p.table.table.size == 1 for p in parts) if parts else True
    return compare_constants(m, trivial)
