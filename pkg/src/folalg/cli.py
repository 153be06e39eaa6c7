"""Command line entry point: ``folalg <suite> --input FILE``.

Exit codes: 0 all applicable checks pass, 1 a check fails, 2 input error,
3 a check is indeterminate.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable

from .algebroid import check_dsquared, check_lie_algebroid
from .charclasses import AConnection, BottError, FoliatedBundle, check_bott_vanishing, check_char_closed, check_transgression
from .cohomology import DegreeClosureError, check_bigraded_identities, check_xi_closed, dpp_cohomology
from .courant import (
    CourantError,
    check_courant,
    check_courant_foliation,
    check_dirac,
    check_partial_compatible,
    check_reduction_setting,
    check_splitting,
    check_transversal_courant,
    exactness_check,
    quotient_transversal_courant,
    reduce_to_submanifold,
)
from .definition import DefinitionError, DefinitionFile, parse_definition
from .dualpoisson import check_foliated_dual, check_poisson, dual_poisson, vaintrob_conditions
from .foliation import (
    QuotientError,
    check_family_closed,
    check_foliation,
    check_transversal_lie,
    deformation_form,
    family_basis,
    quotient_transversal,
)
from .report import Report
from .tangent import TangentLift, tangent_foliation


class SuiteError(ValueError):
    """The suite cannot run on the given input."""


def _need(d: DefinitionFile, *blocks: str):
    for b in blocks:
        if getattr(d, b) in (None, ()):
            raise SuiteError(f"this suite needs the '{b}' block")


def _lie(d):
    _need(d, "algebroid")
    if d.courant is not None:
        raise SuiteError("this suite runs on Lie algebroid files")
    return d.lie_algebroid()


def _pair(d):
    _lie(d)
    _need(d, "foliation")
    return d.foliated_pair()


def _courant(d):
    _need(d, "courant")
    return d.courant_algebroid()


def _cfol(d):
    _courant(d)
    _need(d, "foliation")
    return d.courant_foliation()


def suite_check_lie(d, opts) -> Report:
    A = _lie(d)
    report = Report("Lie algebroid")
    report.merge(check_lie_algebroid(A))
    report.merge(check_dsquared(A, opts.degree_cap, opts.poly_cap))
    return report


def suite_check_foliation(d, opts) -> Report:
    return check_foliation(_pair(d))


def suite_tangent(d, opts) -> Report:
    A = _lie(d)
    T = TangentLift(A)
    report = Report("tangent algebroid")
    report.merge(check_lie_algebroid(T.TA), "TA:")
    report.merge(T.check_flip())
    if d.foliation is not None:
        report.merge(check_foliation(tangent_foliation(d.foliated_pair())), "TB:")
    return report


def suite_dual_poisson(d, opts) -> Report:
    A = _lie(d)
    M = dual_poisson(A)
    report = Report("dual Poisson structure")
    report.data["Pi"] = str(M.bivector)
    report.merge(check_poisson(M))
    if d.foliation is not None:
        report.merge(check_foliated_dual(d.foliated_pair()), "foliated:")
    return report


def suite_vaintrob(d, opts) -> Report:
    return vaintrob_conditions(_pair(d))


def suite_bigraded(d, opts) -> Report:
    return check_bigraded_identities(_pair(d), opts.poly_cap)


def suite_cohomology(d, opts) -> Report:
    pair = _pair(d)
    report = Report("d''-cohomology")
    if opts.slot is not None:
        slots = [opts.slot]
    else:
        slots = [(s, r) for s in range(pair.q + 1) for r in range(1, pair.p + 1)]
    for s, r in slots:
        if not (0 <= s <= pair.q and 0 <= r <= pair.p):
            raise SuiteError(f"slot ({s},{r}) is outside 0..{pair.q} x 0..{pair.p}")
        report.merge(dpp_cohomology(pair, (s, r), opts.poly_cap), f"{s},{r}:")
    if d.deformation is not None:
        dfm = d.deformation
        xi = deformation_form(pair, dfm.theta, dfm.parameter)
        report.data["deformation form"] = str(xi)
        report.merge(check_family_closed(pair, family_basis(pair, dfm.theta)))
        report.merge(check_xi_closed(pair, xi))
    return report


def _connection(d, spec) -> AConnection:
    return AConnection(d.lie_algebroid(), spec.rank, spec.gamma)


def suite_charclass(d, opts) -> Report:
    A = _lie(d)
    _need(d, "connections")
    conns = [_connection(d, c) for c in d.connections]
    powers = [opts.power] if opts.power else [1, 2, 3]
    report = Report("characteristic forms")
    for spec, nabla in zip(d.connections, conns):
        for k in powers:
            report.merge(check_char_closed(A, nabla, k), f"{spec.name}:k={k}:")
    if len(conns) >= 2:
        if conns[0].rank != conns[1].rank:
            raise SuiteError("transgression needs two connections on bundles of the same rank")
        for k in powers:
            report.merge(check_transgression(A, conns[0], conns[1], k), f"k={k}:")
    return report


def suite_bott(d, opts) -> Report:
    pair = _pair(d)
    if d.bundle is not None:
        V = FoliatedBundle(d.bundle.kind, d.bundle.rank)
        nabla = d.bundle.nabla or None
    else:
        V, nabla = FoliatedBundle("C", pair.q), None
    k = opts.power or pair.q + 1
    return check_bott_vanishing(pair, V, k, nabla)


def suite_check_courant(d, opts) -> Report:
    return check_courant(_courant(d))


def suite_check_dirac(d, opts) -> Report:
    A = _courant(d)
    _need(d, "foliation")
    return check_dirac(A, d.foliation.B)


def suite_check_courant_foliation(d, opts) -> Report:
    return check_courant_foliation(_cfol(d))


def suite_quotient(d, opts) -> Report:
    if d.courant is None:
        pair = _pair(d)
        E = quotient_transversal(pair)
        report = check_transversal_lie(E)
        report.data["anchor"] = str([[str(c) for c in row] for row in E.anchor])
        report.data["structure"] = str({f"{h + 1},{k + 1}": [str(c) for c in v] for (h, k), v in sorted(E.structure.items())})
        return report
    fol = _cfol(d)
    report = Report("transversal-Courant quotient")
    report.merge(check_courant_foliation(fol), "foliation:")
    report.merge(check_splitting(fol), "splitting:")
    if not report.passed:
        return report
    E = quotient_transversal_courant(fol)
    report.merge(check_transversal_courant(E), "E:")
    report.merge(check_partial_compatible(fol, E))
    report.data["E rank"] = str(E.rank)
    return report


def suite_reduce(d, opts) -> Report:
    fol = _cfol(d)
    removed = opts.submanifold if opts.submanifold is not None else d.submanifold
    if removed is None:
        raise SuiteError("this suite needs a 'submanifold' block or --submanifold")
    for x in removed:
        if x not in d.chart:
            raise SuiteError(f"unknown coordinate {x!r} in the submanifold")
    report = Report("reduction to a submanifold")
    report.merge(check_courant_foliation(fol), "foliation:")
    setting = check_reduction_setting(fol, removed, opts.strict_transversality)
    report.merge(setting)
    if not report.passed:
        return report
    try:
        E = reduce_to_submanifold(fol, removed, opts.strict_transversality)
    except CourantError as exc:
        report.add("reduction-hypothesis", "anchor of C on N is tangent to N", False, [str(exc)])
        return report
    report.add("reduction-hypothesis", "anchor of C on N is tangent to N", True)
    report.merge(check_transversal_courant(E), "E_N:")
    report.data["E_N rank"] = str(E.rank)
    report.data["N"] = str(E.chart)
    return report


def suite_exactness(d, opts) -> Report:
    fol = _cfol(d)
    return exactness_check(quotient_transversal_courant(fol))


SUITES: dict[str, Callable] = {
    "check-lie": suite_check_lie,
    "check-foliation": suite_check_foliation,
    "tangent": suite_tangent,
    "dual-poisson": suite_dual_poisson,
    "vaintrob": suite_vaintrob,
    "bigraded": suite_bigraded,
    "cohomology": suite_cohomology,
    "charclass": suite_charclass,
    "bott-vanishing": suite_bott,
    "check-courant": suite_check_courant,
    "check-dirac": suite_check_dirac,
    "check-courant-foliation": suite_check_courant_foliation,
    "quotient": suite_quotient,
    "reduce": suite_reduce,
    "exactness": suite_exactness,
}


def _slot(text: str) -> tuple[int, int]:
    try:
        s, r = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("slot must be 's,r'") from None
    return s, r


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="folalg", description="Verify foliated Lie and Courant algebroid data.")
    parser.add_argument("suite", choices=list(SUITES))
    parser.add_argument("--input", required=True, help="definition file")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--format", choices=["text", "json"], default="text")
    parser.add_argument("--degree-cap", type=_nonneg, default=3, help="form degree cap for d_A squared")
    parser.add_argument("--poly-cap", type=_nonneg, default=2, help="coefficient degree cap")
    parser.add_argument("--slot", type=_slot, help="bigraded type s,r")
    parser.add_argument("--power", type=int, help="power sum order k")
    parser.add_argument("--submanifold", type=_names, help="coordinates set to zero, e.g. x1,x3")
    parser.add_argument("--strict-transversality", action="store_true", help="fail when N is not transversal to the leaves")
    return parser


def run_suite(d: DefinitionFile, suite: str, opts: argparse.Namespace) -> Report:
    return SUITES[suite](d, opts)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        opts = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        d = parse_definition(opts.input)
        report = run_suite(d, opts.suite, opts)
    except DefinitionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SuiteError, CourantError, QuotientError, BottError, DegreeClosureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report.to_json() if opts.format == "json" else report.to_text()
    if opts.output:
        with open(opts.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
