"""Command-line front end.

Exit status: 0 when every check passes, 1 when a check fails, 2 for bad
input (unreadable or malformed files, unknown region ids, bad flags).
The default comparison tolerance can be overridden with ICREGIONS_TOL.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bounds import ConformanceError, ConstantSet, bound_constants, constant_relations
from .distfile import DistFile, DistFileError, load
from .polytope import SystemError_, UnboundedRegionError, equal, geometry2d, project_rates, svg_overlay
from .probspace import DistributionError, Family, build_joint, mutual_info, wyner_lift
from .regions import (
    PROJECTIONS,
    RegionId,
    build,
    compare_suite,
    region_families,
    region_variables,
    symbolic_projection,
)

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2
_PREFERENCE = (Family.HK, Family.CMG, Family.MOD_CMG, Family.HOD, Family.HOD_CMG)
_LIFTED_FAMILIES = (Family.HOD, Family.HOD_CMG)
_RELATIONS_FOR = {
    Family.HK: ("HK", "HK_INDEPENDENCE"),
    Family.CMG: ("CMG",),
    Family.MOD_CMG: ("CMG", "MOD_CMG", "MOD_CMG_INDEPENDENCE"),
    Family.HOD: ("HOD",),
    Family.HOD_CMG: ("HOD_CMG",),
}


class InputError(Exception):
    pass


def default_tol() -> float:
    raw = os.environ.get("ICREGIONS_TOL")
    if raw is None:
        return 1e-7
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"ICREGIONS_TOL={raw!r} is not a number") from None


def _stamp(seed: int | None = None) -> str:
    extra = f" seed={seed}" if seed is not None else ""
    return f"# icregions {__version__}{extra}"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _region(text: str) -> RegionId:
    try:
        return RegionId(text.strip())
    except ValueError:
        raise InputError(f"unknown region id {text!r}; choose from {', '.join(r.value for r in RegionId)}") from None


def _floats(text: str, count: int | None, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise InputError(f"{what}: expected {count} values, got {len(vals)}")
    return vals


# -- constants for a file -------------------------------------------------------

def _joint_for(df: DistFile, family: Family):
    base = build_joint(df.spec)
    if df.common and family in _LIFTED_FAMILIES:
        return wyner_lift(base, df.common)
    return base


def constants_for(df: DistFile, family: Family | str) -> ConstantSet:
    return bound_constants(Family(family), _joint_for(df, Family(family)))


def _constants_for_region(df: DistFile, rid: RegionId) -> ConstantSet:
    fams = region_families(rid)
    order = [df.spec.family] if df.spec.family in fams and not df.common else []
    order += [f for f in _PREFERENCE if f in fams and f not in order]
    errors = []
    for fam in order:
        try:
            return constants_for(df, fam)
        except ConformanceError as e:
            errors.append(str(e))
    raise InputError(f"{rid.value}: distribution conforms to none of {[f.value for f in order]}: {errors[-1]}")


def _rate_region(df: DistFile, rid: RegionId):
    sys_ = build(rid, _constants_for_region(df, rid))
    if region_variables(rid) != ("R1", "R2"):
        sys_ = project_rates(sys_)
    return sys_


# -- verbs ---------------------------------------------------------------------

def cmd_eval(args) -> int:
    df = load(args.dist)
    fam = Family(args.family) if args.family else df.spec.family
    if fam == Family.GENERAL_IC:
        raise InputError("GENERAL_IC has no bound constants; pass --family")
    c = constants_for(df, fam)
    if args.format == "csv":
        text = "name,value\n" + "".join(f"{n},{v:.12g}\n" for n, v in c.values.items())
    else:
        text = c.to_text()
    status = EXIT_OK
    if args.relations:
        for rel in _RELATIONS_FOR[fam]:
            rep = constant_relations(rel, c)
            text += rep.to_text()
            if not rep.all_hold:
                status = EXIT_CHECK
    _emit(text, args.out)
    return status


def cmd_project(args) -> int:
    rid = _region(args.region)
    if rid not in PROJECTIONS:
        raise InputError(f"{rid.value} is not a (T,S) region; choose from {', '.join(r.value for r in PROJECTIONS)}")
    target, _ = PROJECTIONS[rid]
    tol = args.tol if args.tol is not None else default_tol()
    if args.dist is None:
        raw, reduced = symbolic_projection(rid)
        closed = build(target)
        same = {r.normalized().key() for r in reduced.rows} == {r.normalized().key() for r in closed.rows}
        count = lambda s: sum(not r.is_nonneg for r in s.rows)  # noqa: E731
        lines = [
            f"# symbolic projection of {rid.value}: {len(raw.rows)} distinct rows after elimination "
            f"(nonnegativity and constant-only rows included), {count(reduced)} rate rows after reduction",
            reduced.to_text().rstrip("\n"),
            f"# closed form {target.value}",
            closed.to_text().rstrip("\n"),
            f"# match: {'yes' if same else 'NO'}",
        ]
        _emit("\n".join(lines) + "\n", args.out)
        return EXIT_OK if same else EXIT_CHECK
    df = load(args.dist)
    c = _constants_for_region(df, rid)
    projected = project_rates(build(rid, c))
    closed = build(target, c)
    g1, g2 = geometry2d(projected), geometry2d(closed)
    same = equal(projected, closed, tol) and g1.matches(g2, tol)
    if args.format == "csv":
        text = "".join(f"projected,{line}\n" for line in g1.to_csv().splitlines()[1:])
        text += "".join(f"closed,{line}\n" for line in g2.to_csv().splitlines()[1:])
        text = "system,R1,R2\n" + text
    else:
        lines = [
            f"# constants: {c.family.value}",
            f"# projection of {rid.value}",
            projected.to_text().rstrip("\n"),
            f"# closed form {target.value}",
            closed.to_text().rstrip("\n"),
            "# projected vertices: " + " ".join(f"({x:.12g},{y:.12g})" for x, y in g1.vertices),
            "# closed-form vertices: " + " ".join(f"({x:.12g},{y:.12g})" for x, y in g2.vertices),
            f"# match within {tol:g}: {'yes' if same else 'NO'}",
        ]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if same else EXIT_CHECK


def cmd_compare(args) -> int:
    df = load(args.dist)
    if not df.common:
        raise InputError(f"{args.dist}: compare needs a 'common' section describing the lifted pair")
    rep = compare_suite(build_joint(df.spec), df.common)
    _emit(rep.to_csv() if args.format == "csv" else rep.to_text(), args.out)
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_verify(args) -> int:
    from .sweeps import verify

    rep = verify(args.seed, args.sweeps)
    head = f"{_stamp(args.seed)} sweeps={args.sweeps}\n"
    if args.format == "csv":
        body = "check,runs,failures,worst,status\n" + "".join(
            f"{t.name.replace(',', ';')},{t.runs},{t.failures},{t.worst:.12g},"
            f"{'info' if t.informational else ('pass' if t.passed else 'fail')}\n"
            for t in rep.tallies.values()
        )
    else:
        body = rep.summary_text() + f"overall: {'pass' if rep.passed else 'FAIL'}\n"
    _emit(head + body, args.out)
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_example(args) -> int:
    from .demo import example_spec, example_values

    spec = load(args.dist).spec if args.dist else example_spec()
    v = example_values(spec)
    expected = ((v.h_shared, 1), (v.h_u_dep, 3), (v.h_w_dep, 3), (v.h_pair_dep, 5), (v.h_pair_base, 4),
                (v.mi_pair_dep, 1))
    ok = all(abs(a - b) <= 1e-12 for a, b in expected) and v.lemma_strict
    _emit("\n".join(v.lines()) + "\n", args.out)
    return EXIT_OK if ok else EXIT_CHECK


def cmd_simulate(args) -> int:
    from . import binning_sim as bs

    spec = load(args.dist).spec if args.dist else bs.identity_channel_spec()
    joint = build_joint(spec)
    given = ("Q",) if "Q" in joint.names else ()
    extra = _floats(args.slack, 2, "--slack") if args.slack else (0.0, 0.0)
    # default pool rate: private rate plus the binning cost I(U;W|Q) plus any extra slack
    slack = tuple(mutual_info(joint, f"U{i}", f"W{i}", given) + e for i, e in zip((1, 2), extra))
    results = []
    for n in (int(x) for x in _floats(args.n, None, "--n")):
        common = dict(n=n, eps=args.eps, trials=args.trials, seed=args.seed, modified_error=args.modified)
        if args.rates:
            r = _floats(args.rates, 4, "--rates")
            configs = [bs.TrialConfig(rates=r, pool_rates=(r[1] + slack[0], r[3] + slack[1]), **common)]
        else:
            region = build(RegionId.S_HOD, bound_constants(Family.HOD, joint))
            direction = _direction(args.direction)
            configs = [
                bs.config_at(region, direction, f, slack, **common) for f in _floats(args.fraction, None, "--fraction")
            ]
        if args.pool:
            pools = _floats(args.pool, 2, "--pool")
            configs = [dataclasses.replace(c, pool_rates=pools) for c in configs]
        results += [bs.simulate(spec, c) for c in configs]
    _emit(bs.results_csv(results, f"icregions {__version__} seed={args.seed}"), args.out)
    return EXIT_OK


def _direction(text: str) -> dict[str, float]:
    out = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        name = name.strip()
        if name not in ("T1", "S1", "T2", "S2"):
            raise InputError(f"--direction: unknown rate {name!r}")
        try:
            out[name] = float(value) if value else 1.0
        except ValueError:
            raise InputError(f"--direction: bad value in {part!r}") from None
    return out


def cmd_plot(args) -> int:
    ids = [_region(r) for r in args.regions.split(",") if r.strip()]
    if not 1 <= len(ids) <= 4:
        raise InputError("plot takes between one and four regions")
    df = load(args.dist)
    regs = [geometry2d(_rate_region(df, rid)) for rid in ids]
    svg = svg_overlay(regs, [r.value for r in ids])
    _emit(svg, args.out)
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="icregions", description="Rate-region tools for two-user interference channels.")
    p.add_argument("--version", action="version", version=f"icregions {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    def fmt(sp, choices=("text", "csv")):
        sp.add_argument("--format", choices=choices, default="text")
        sp.add_argument("--out", help="write to this file instead of stdout")

    sp = sub.add_parser("eval", help="bound constants of a distribution file")
    sp.add_argument("dist")
    sp.add_argument("--family", choices=[f.value for f in _PREFERENCE])
    sp.add_argument("--relations", action="store_true", help="also check the family's constant relations")
    fmt(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("project", help="project a (T,S) region and compare with its closed form")
    sp.add_argument("--region", required=True)
    sp.add_argument("--dist", help="numeric projection for this distribution (symbolic when omitted)")
    sp.add_argument("--tol", type=float)
    fmt(sp)
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("compare", help="base versus lifted checks for a file with a common section")
    sp.add_argument("--dist", required=True)
    fmt(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("verify", help="run every seeded sweep")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sweeps", type=int, default=50)
    fmt(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("example", help="the shared-bit worked example")
    sp.add_argument("--dist", help="distribution file of the example (packaged copy by default)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_example)

    sp = sub.add_parser("simulate", help="Monte-Carlo binning code, CSV output")
    sp.add_argument("--dist", help="HK or HOD distribution file (identity-channel instance by default)")
    sp.add_argument("--n", default="10", help="blocklength(s), comma-separated")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--eps", type=float, default=0.1)
    sp.add_argument("--rates", help="T1,S1,T2,S2")
    sp.add_argument("--fraction", default="0.7,1.3", help="fractions of the boundary along --direction")
    sp.add_argument("--direction", default="S1=1", help="e.g. S1=1,T1=0.5")
    sp.add_argument("--pool", help="pool rates s1,s2 (default: private rate plus binning cost plus --slack)")
    sp.add_argument("--slack", help="extra pool rate per sender beyond the binning cost")
    sp.add_argument("--modified", action="store_true", help="ignore errors on the other sender's common message")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("plot", help="SVG overlay of up to four regions")
    sp.add_argument("--regions", required=True, help="comma-separated region ids")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DistFileError, DistributionError, UnboundedRegionError, SystemError_) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
