"""Batch front door: problem descriptors in, reports out.

One descriptor file describes one germ: ambient coordinates, strata with
Morse tables, the functions f and L, and options. Each subcommand fronts
one operation family; reports are printed as a transcript and optionally
as deterministic JSON.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from typing import Mapping, Sequence

from .cycles import (
    AmbientSpace,
    GenericInjectivityFailure,
    GradedEnrichedCycle,
    ImproperIntersection,
    to_ordinary,
)
from .conormal import (
    FConstantOnStratum,
    RankAnomaly,
    StratificationError,
    StratifiedComplex,
    Stratum,
    conormal_variety,
    gecc_assemble,
    relative_conormal_cycle,
)
from .decompose import PrimeWitness
from .hypersurface import (
    AssertionRecord,
    CurveBranch,
    GenericityFailure,
    MorseAtPoint,
    PolarNotCurve,
    analyze_curve_branches,
    cc_of_tables,
    check_complement_restriction,
    check_polar_genericity,
    check_shift_identity,
    check_triangle,
    curve_gecc_oracle,
    nearby_gecc,
    nearby_morse_at_origin,
    polar_curve,
    shriek_morse_at_origin,
    star_equals_shriek,
    vanishing_morse_at_origin,
)
from .ideal import (
    CertificationFailure,
    DEFAULT_LIMITS,
    EngineLimits,
    Ideal,
    NotZeroDimensional,
    ResourceLimitExceeded,
)
from .modclass import ModClass
from .polyring import ParseError, Polynomial, parse_polynomial
from .vanishing import (
    ImproperStep,
    InconsistencyError,
    isolating_check,
    microsupport_phi_bound,
    vanishing_pipeline,
)

EXIT_OK = 0
EXIT_DIAGNOSTIC = 2
EXIT_RESOURCE = 3

_DIAGNOSTIC_ERRORS = (
    ImproperIntersection,
    GenericInjectivityFailure,
    GenericityFailure,
    PolarNotCurve,
    ImproperStep,
    InconsistencyError,
    StratificationError,
    FConstantOnStratum,
    RankAnomaly,
    ParseError,
)
_RESOURCE_ERRORS = (CertificationFailure, ResourceLimitExceeded, NotZeroDimensional)


@dataclass
class ProblemDescriptor:
    ambient: AmbientSpace
    complex: StratifiedComplex
    f: Polynomial | None
    L: Polynomial | None
    seed: int
    raw: dict

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def _parse_morse(table: Mapping) -> dict:
    return {int(k): ModClass.from_json(v) for k, v in table.items()}


def load_descriptor(path: str, limits: EngineLimits | None = None) -> ProblemDescriptor:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return descriptor_from_json(data, limits)


def descriptor_from_json(data: Mapping, limits: EngineLimits | None = None) -> ProblemDescriptor:
    amb_data = data["ambient"]
    ambient = AmbientSpace("U", int(amb_data["n"]), tuple(amb_data["coords"]))
    ctx = ambient.context()
    strata = []
    for s in data.get("strata", []):
        ideal = Ideal(ctx, [parse_polynomial(t, ctx) for t in s["ideal"]])
        strata.append(
            Stratum(s["name"], ideal, int(s["dim"]), _parse_morse(s.get("morse", {})))
        )
    SC = StratifiedComplex(ambient, strata, data.get("label", "F"), limits=limits)
    f = parse_polynomial(data["f"], ctx) if data.get("f") else None
    L = parse_polynomial(data["L"], ctx) if data.get("L") else None
    return ProblemDescriptor(ambient, SC, f, L, int(data.get("seed", 12345)), dict(data))


def _morse_json(m: MorseAtPoint) -> dict:
    return m.to_json()


def _emit(report: dict, transcript: list, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in transcript:
            print(line)


def _cycle_lines(label: str, cyc: GradedEnrichedCycle) -> list:
    lines = [f"{label}:"]
    if not cyc:
        lines.append("  0")
    for k in sorted(cyc.degrees):
        for comp, m in cyc.degrees[k]._sorted():
            lines.append(f"  deg {k}: ({m}) [{', '.join(comp.gen_strings())}]")
    return lines


def cmd_gecc(desc: ProblemDescriptor, args) -> tuple:
    cyc = gecc_assemble(desc.complex)
    report = {"gecc": cyc.to_json(), "cc": to_ordinary(cyc).to_json()}
    return EXIT_OK, report, _cycle_lines("gecc(F)", cyc)


def cmd_conormal(desc: ProblemDescriptor, args) -> tuple:
    if desc.f is None:
        raise StratificationError("descriptor must supply f for the relative conormal")
    cyc = relative_conormal_cycle(desc.complex, desc.f)
    report = {"relative_conormal": cyc.to_json()}
    return EXIT_OK, report, _cycle_lines(f"relative conormal cycle of {desc.f}", cyc)


def cmd_polar(desc: ProblemDescriptor, args) -> tuple:
    rep = polar_curve(desc.complex, desc.f, desc.L, desc.rng())
    lines = _cycle_lines(f"polar curve of ({desc.f}; {desc.L})", rep.polar)
    return EXIT_OK, {"polar": rep.to_json()}, lines


def cmd_nearby(desc: ProblemDescriptor, args) -> tuple:
    rng = desc.rng()
    psi = nearby_gecc(desc.complex, desc.f, rng)
    report = {"gecc_nearby": psi.to_json(), "cc_nearby": to_ordinary(psi).to_json()}
    lines = _cycle_lines("gecc(nearby cycles, shifted)", psi)
    if desc.L is not None:
        prep = polar_curve(desc.complex, desc.f, desc.L, rng)
        morse = nearby_morse_at_origin(prep, desc.f)
        report["morse_at_origin"] = _morse_json(morse)
        lines.append(f"Morse modules at origin: { {k: str(v) for k, v in morse.table.items()} }")
    return EXIT_OK, report, lines


def cmd_shriek(desc: ProblemDescriptor, args) -> tuple:
    rng = desc.rng()
    rep = polar_curve(desc.complex, desc.f, desc.L, rng)
    morse = shriek_morse_at_origin(rep, desc.L)
    nearby = nearby_morse_at_origin(rep, desc.f)
    records = star_equals_shriek(desc.complex, desc.f, morse, nearby)
    report = {
        "morse_at_origin": _morse_json(morse),
        "assertions": [r.to_json() for r in records],
    }
    lines = [f"i_!i^! Morse modules at origin: { {k: str(v) for k, v in morse.table.items()} }"]
    lines += [f"  [{'pass' if r.passed else 'FAIL'}] {r.name}" for r in records]
    ok = all(r.passed for r in records)
    return (EXIT_OK if ok else EXIT_DIAGNOSTIC), report, lines


def cmd_vanishing(desc: ProblemDescriptor, args) -> tuple:
    rng = desc.rng()
    onthefly = getattr(args, "experimental_onthefly", False)
    rep = vanishing_pipeline(
        desc.complex, desc.f, rng, route=args.route, require_isolating=not onthefly
    )
    report = rep.to_json()
    lines = [f"isolating coordinates: {rep.isolating['per_j']} (s = {rep.isolating['s']})"]
    if not rep.isolating["pass"]:
        if not onthefly:
            lines.append("isolating check FAILED for this coordinate order")
            return EXIT_DIAGNOSTIC, report, lines
        report["certified"] = False
        lines.append(
            "isolating check FAILED; proceeding on per-step properness only "
            "(experimental, result not certified)"
        )
    if rep.trace is not None:
        for k, steps in sorted(rep.trace.by_degree.items()):
            for step in steps:
                lines.append(f"degree {k}, cut by V({step.divisor}):")
                lines.append(f"  Pi^{step.j}    = {step.pi!r}")
                lines.append(f"  Delta^{step.j} = {step.delta!r}")
    if rep.lambdas is not None:
        for (k, j), cyc in sorted(rep.lambdas.cycles.items()):
            lines.append(f"Lambda^{j} (degree {k}) = {cyc!r}")
    if rep.gecc_phi is not None:
        if args.degree is not None:
            piece = rep.gecc_phi.degree(args.degree)
            lines.append(f"gecc^{args.degree}(vanishing cycles, shifted) = {piece!r}")
        lines += _cycle_lines("gecc(vanishing cycles, shifted)", rep.gecc_phi)
        lines.append(f"CC = {rep.cc_phi!r}")
    if rep.agreement is not None:
        lines.append(f"two-route agreement (blow-up vs iteration): {rep.agreement}")
        if not rep.agreement:
            return EXIT_DIAGNOSTIC, report, lines
    return EXIT_OK, report, lines


def cmd_check(desc: ProblemDescriptor, args) -> tuple:
    rng = desc.rng()
    rep = polar_curve(desc.complex, desc.f, desc.L, rng)
    bound_map = microsupport_phi_bound(desc.complex, desc.f, rng)
    gen = check_polar_genericity(rep, desc.f, desc.L, bound_map.upper_components())
    iso = isolating_check(desc.complex, desc.f, bound_map.upper_components())
    ok = gen.all_pass() and iso["pass"]
    report = {"genericity": gen.to_json(), "isolating": {
        "s": iso["s"], "pass": iso["pass"],
        "per_j": {str(j): v for j, v in iso["per_j"].items()},
    }}
    lines = [
        f"dim_0 |polar| meet V(f) <= 0: {gen.dim_vf}",
        f"dim_0 |polar| meet V(L) <= 0: {gen.dim_vl}",
        f"componentwise (C.V(f))_0 >= (C.V(L))_0: {gen.componentwise}",
        f"covector avoids bound: {gen.covector}",
        f"isolating coordinates: {iso['per_j']}",
    ]
    return (EXIT_OK if ok else EXIT_DIAGNOSTIC), report, lines


def cmd_cc(desc: ProblemDescriptor, args) -> tuple:
    data = desc.raw
    tables = {}
    for name, per_stratum in data.get("complexes", {}).items():
        tables[name] = {
            sname: _parse_morse(tbl) for sname, tbl in per_stratum.items()
        }
    ccs = {
        name: cc_of_tables(desc.complex, tbl) for name, tbl in tables.items()
    }
    records = []
    for check in data.get("checks", []):
        kind = check["type"]
        if kind == "triangle":
            a, b, c = (ccs[x] for x in check["terms"])
            records.append(check_triangle(check.get("name", "triangle"), a, b, c))
        elif kind == "complement-restriction":
            f, shriek, jstar = (ccs[x] for x in check["terms"])
            records.append(check_complement_restriction(f, shriek, jstar))
        elif kind == "equal":
            a, b = (ccs[x] for x in check["terms"])
            records.append(
                AssertionRecord(check.get("name", "equality"), a == b, repr(a), repr(b))
            )
        else:
            raise StratificationError(f"unknown check type {kind!r}")
    report = {
        "cc": {name: cc.to_json() for name, cc in sorted(ccs.items())},
        "assertions": [r.to_json() for r in records],
    }
    lines = [f"CC({name}) = {cc!r}" for name, cc in sorted(ccs.items())]
    lines += [f"  [{'pass' if r.passed else 'FAIL'}] {r.name}" for r in records]
    ok = all(r.passed for r in records)
    return (EXIT_OK if ok else EXIT_DIAGNOSTIC), report, lines


def cmd_oracle_curve(desc_data: Mapping, args) -> tuple:
    branches = [
        CurveBranch(b["name"], int(b["mult"]), bool(b["in_vf"]), int(b.get("eta", 0)))
        for b in desc_data.get("branches", [])
    ]
    oracle = curve_gecc_oracle(branches)
    report = {
        "point": {k: v.to_json() for k, v in oracle["point"].items()},
        "cc_point": oracle["cc_point"],
        "branches": {
            name: {b: m.to_json() for b, m in tbl.items()}
            for name, tbl in oracle["branches"].items()
        },
        "m": oracle["m"],
        "e": oracle["e"],
        "m_sub": oracle["m_sub"],
        "eta": oracle["eta"],
    }
    lines = [
        f"m = {oracle['m']}, e = {oracle['e']}, m_sub = {oracle['m_sub']}, eta = {oracle['eta']}"
    ] + [f"point coefficient {name}: {m}" for name, m in oracle["point"].items()]
    return EXIT_OK, report, lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gecc-kit",
        description="exact graded enriched characteristic cycle engine",
    )
    parser.add_argument("command", choices=[
        "gecc", "conormal", "polar", "nearby", "shriek", "vanishing", "cc",
        "check", "oracle-curve",
    ])
    parser.add_argument("descriptor", help="problem descriptor JSON file")
    parser.add_argument("--degree", type=int, default=None, help="focus degree k")
    parser.add_argument("--json", action="store_true", help="emit the JSON report")
    parser.add_argument("--route", choices=["pidelta", "blowup", "both"], default="pidelta")
    parser.add_argument("--seed", type=int, default=None, help="override descriptor seed")
    parser.add_argument("--f", dest="f_override", default=None, help="override f")
    parser.add_argument("--L", dest="l_override", default=None, help="override L")
    parser.add_argument("--max-sat-exp", type=int, default=None)
    parser.add_argument("--spair-budget", type=int, default=None)
    parser.add_argument(
        "--experimental-onthefly",
        action="store_true",
        help="run the vanishing iteration even when the isolating check "
        "fails, relying on per-step properness; result is recorded as "
        "uncertified",
    )
    return parser


_COMMANDS = {
    "gecc": cmd_gecc,
    "conormal": cmd_conormal,
    "polar": cmd_polar,
    "nearby": cmd_nearby,
    "shriek": cmd_shriek,
    "vanishing": cmd_vanishing,
    "cc": cmd_cc,
    "check": cmd_check,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    limits = EngineLimits()
    if args.max_sat_exp is not None:
        limits.saturation_cap = args.max_sat_exp
    if args.spair_budget is not None:
        limits.spair_budget = args.spair_budget
    try:
        if args.command == "oracle-curve":
            with open(args.descriptor, "r", encoding="utf-8") as fh:
                data = json.load(fh)
            code, report, transcript = cmd_oracle_curve(data, args)
        else:
            from .ideal import ENGINE_COUNTERS, engine_counters

            ENGINE_COUNTERS["groebner_runs"] = 0
            ENGINE_COUNTERS["spairs"] = 0
            desc = load_descriptor(args.descriptor, limits)
            if args.seed is not None:
                desc.seed = args.seed
            ctx = desc.ambient.context()
            if args.f_override:
                desc.f = parse_polynomial(args.f_override, ctx)
            if args.l_override:
                desc.L = parse_polynomial(args.l_override, ctx)
            code, report, transcript = _COMMANDS[args.command](desc, args)
            report["seed"] = desc.seed
            report["engine"] = engine_counters()
    except json.JSONDecodeError as exc:
        print(f"descriptor parse error (line {exc.lineno}, col {exc.colno}): {exc.msg}",
              file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except _DIAGNOSTIC_ERRORS as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except _RESOURCE_ERRORS as exc:
        print(f"certification/resource failure: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _emit(report, transcript, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
