"""Command-line entry point: ``ruelle-kit <subcommand> --map file.json ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as rio
from .config import RunConfig, load_config
from .errors import RuelleKitError, SpectrumError
from .maps import INFINITY, is_normalized, normalize_fixed
from .measures import convergence_report
from .series import forward_series, identity_residuals, modified_series, rs_series, s_series
from .span import SpanFunction
from .spectral import postcritical_set, spectrum, transfer_matrix
from .strong_convergence import bn, hyperbolicity_check, instability_diagnostic, residue_table
from .transfer import pushforward_point, span_iterates


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def parse_complex(text: str) -> complex:
    t = text.strip().lower().replace(" ", "")
    if t in ("inf", "infinity", "oo"):
        return INFINITY
    try:
        return complex(t.replace("i", "j") if "j" not in t else t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _triple(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("--normalize takes three comma-separated points f0,f1,finf")
    return tuple(parse_complex(p) for p in parts)


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _term(text: str):
    pole, _, coef = text.partition(":")
    return parse_complex(pole), (parse_complex(coef) if coef else 1 + 0j)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--map", required=True, help="map JSON file")
    p.add_argument("--config", help="run-config JSON file")
    p.add_argument("--out", help="write output here instead of standard output")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--normalize", type=_triple, metavar="F0,F1,FINF",
                   help="conjugate so these fixed points move to 0, 1 and infinity")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ruelle-kit", description="Transfer operators of rational maps.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("map-info", help="critical data and fixed points")
    _common(p)

    p = sub.add_parser("pushforward", help="evaluate R*_{n,m} pointwise or iterate on the span")
    _common(p)
    p.add_argument("--gamma", type=_term, action="append", default=[], metavar="A[:COEF]")
    p.add_argument("--tau", type=_term, action="append", default=[], metavar="A[:COEF]")
    p.add_argument("--const", type=parse_complex, default=0j)
    p.add_argument("--at", type=parse_complex, action="append", default=[], metavar="Z",
                   help="evaluate pointwise at Z (repeatable); without it the span iterates are printed")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--iterations", type=int, default=1)

    p = sub.add_parser("series", help="series ledgers")
    _common(p)
    p.add_argument("--x", type=parse_complex, required=True)
    p.add_argument("--a", type=parse_complex, default=None)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--kind", default="rp,s", help="comma list from rp, rs, s, modified, residuals")

    p = sub.add_parser("bn", help="residue sums B_n two ways")
    _common(p)
    p.add_argument("--n", type=int, required=True, help="largest n")
    p.add_argument("--entries", action="store_true", help="print the residue table for n instead")

    p = sub.add_parser("measures", help="Cesaro-averaged measures paired with monomials")
    _common(p)
    p.add_argument("--index", type=int, default=0, help="critical index")
    p.add_argument("--l", type=_int_list, default=[1, 2, 4, 8, 16])
    p.add_argument("--powers", type=_int_list, default=[0, 1, 2], help="test functions z^k")

    p = sub.add_parser("stability", help="instability diagnostic and hyperbolicity check")
    _common(p)
    p.add_argument("--N", type=int, default=30)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--budget", type=int, default=None)

    p = sub.add_parser("spectrum", help="finite transfer matrix and its eigenvalues")
    _common(p)
    p.add_argument("--budget", type=int, default=None)
    return parser


# -- subcommands -------------------------------------------------------------------


def _map_info(R, args):
    crit = R.critical
    data = {
        "degree": R.degree,
        "normalized": is_normalized(R),
        "numerator": R.numerator.coefficients,
        "denominator": R.denominator.coefficients,
        "omega": crit.omega,
        "infinity_critical_multiplicity": crit.infinity_multiplicity,
        "critical": [
            {"point": c, "multiplicity": m, "value": v, "residue": b}
            for c, m, v, b in zip(crit.points, crit.multiplicities, crit.values, crit.residues)
        ],
        "fixed_points": [
            {"point": f.point, "multiplier": f.multiplier, "multiplicity": f.multiplicity}
            for f in R.fixed_points()
        ],
    }
    if args.format == "csv":
        rows = [(c.real, c.imag, m, v.real, v.imag, b.real, b.imag)
                for c, m, v, b in zip(crit.points, crit.multiplicities, crit.values, crit.residues)]
        return rio.csv_text(["c_re", "c_im", "multiplicity", "d_re", "d_im", "b_re", "b_im"], rows)
    return rio.dumps(data)


def _span_from_args(R, args) -> SpanFunction:
    if not (args.gamma or args.tau or args.const):
        raise UsageError("give at least one of --gamma, --tau, --const")
    return SpanFunction.build(args.gamma, args.tau, args.const, R.config)


def _pushforward(R, args):
    f = _span_from_args(R, args)
    if args.at:
        vals = [(z, pushforward_point(R, f, args.n, args.m, z)) for z in args.at]
        if args.format == "csv":
            return rio.csv_text(["z_re", "z_im", "value_re", "value_im"],
                                [(z.real, z.imag, v.real, v.imag) for z, v in vals])
        return rio.dumps({"n": args.n, "m": args.m, "values": [{"z": z, "value": v} for z, v in vals]})
    its = span_iterates(R, f, args.iterations)
    if args.format == "csv":
        rows = []
        for k, g in enumerate(its):
            rows += [(k, "gamma", a.real, a.imag, c.real, c.imag) for a, c in g.gamma_terms]
            rows += [(k, "tau", a.real, a.imag, c.real, c.imag) for a, c in g.tau_terms]
            if g.constant_term != 0:
                rows.append((k, "const", 0.0, 0.0, g.constant_term.real, g.constant_term.imag))
        return rio.csv_text(["iterate", "kind", "pole_re", "pole_im", "coef_re", "coef_im"], rows)
    return rio.dumps({"iterates": [g.to_json() for g in its]})


def _series(R, args):
    a = args.x if args.a is None else args.a
    kinds = [k.strip() for k in args.kind.split(",") if k.strip()]
    ledgers = {}
    residuals = None
    for k in kinds:
        if k == "rp":
            ledgers[k] = forward_series(R, args.x, args.L)
        elif k == "rs":
            ledgers[k] = rs_series(R, args.x, a, args.L)
        elif k == "s":
            ledgers[k] = s_series(R, args.x, args.L)
        elif k == "modified":
            ledgers[k] = modified_series(R, args.x, a, args.L)
        elif k == "residuals":
            residuals = [identity_residuals(R, a, args.x, L) for L in range(args.L + 1)]
        else:
            raise UsageError(f"unknown series kind {k!r}")
    if args.format == "json":
        out = {k: {"terms": l.terms, "partials": l.partials, "escaped": l.escaped} for k, l in ledgers.items()}
        if residuals is not None:
            out["residuals"] = [{"L": r.L, "forward": r.residual_forward, "backward": r.residual_backward}
                                for r in residuals]
        return rio.dumps(out)
    rows = []
    for k, l in ledgers.items():
        for n, (t, p) in enumerate(zip(l.terms, l.partials)):
            rows.append((k, n, t.real, t.imag, p.real, p.imag))
    for r in residuals or ():
        rows.append(("residual-forward", r.L, r.residual_forward, 0.0, float("nan"), float("nan")))
        rows.append(("residual-backward", r.L, r.residual_backward, 0.0, float("nan"), float("nan")))
    return rio.csv_text(["series", "n", "term_re", "term_im", "partial_re", "partial_im"], rows)


def _bn(R, args):
    if args.entries:
        t = residue_table(R, args.n)
        rows = [(e.level, e.point.real, e.point.imag, e.source.real, e.source.imag,
                 e.residue.real, e.residue.imag, int(e.flagged)) for e in t.entries]
        if args.format == "json":
            return rio.dumps({"n": t.n, "B_n": t.B_n, "flagged": t.flagged, "entries": [
                {"level": e.level, "point": e.point, "source": e.source, "residue": e.residue, "flagged": e.flagged}
                for e in t.entries]})
        return rio.csv_text(["level", "d_re", "d_im", "c_re", "c_im", "b_re", "b_im", "flagged"], rows)
    results = [bn(R, n) for n in range(1, args.n + 1)]
    if args.format == "json":
        return rio.dumps([{"n": r.n, "B_n_direct": r.direct, "B_n_c1": r.triple_sum,
                           "B_n_c1_levels_from_1": r.triple_sum_levels_1, "discrepancy": r.discrepancy,
                           "flagged": r.flagged} for r in results])
    return rio.csv_text(["n", "B_n_direct", "B_n_c1", "B_n_c1_levels_from_1", "discrepancy", "flagged"],
                        [(r.n, r.direct, r.triple_sum, r.triple_sum_levels_1, r.discrepancy, r.flagged)
                         for r in results])


def _measures(R, args):
    tests = [(lambda k: (lambda z: z ** k))(k) for k in args.powers]
    rep = convergence_report(R, args.index, args.l, tests)
    if args.format == "json":
        return rio.dumps({
            "powers": args.powers,
            "truncated": rep.truncated,
            "total_variation": [{"l": l, "tv": tv} for l, tv in rep.total_variation],
            "rows": [{"l": r.l, "power": args.powers[r.test], "pairing": r.pairing, "delta": r.delta}
                     for r in rep.rows],
        })
    return rep.to_csv()


def _stability(R, args):
    crit = R.critical
    diags = []
    for c in crit.points:
        d = instability_diagnostic(R, c, args.N, args.window, args.radius)
        diags.append({
            "critical_point": d.critical_point,
            "verdict": d.verdict,
            "derivative_trend": d.derivative_trend,
            "postcritically_finite": d.postcritically_finite,
            "hypothesis_growth": d.hypothesis_growth,
            "hypothesis_constant": d.hypothesis_constant,
            "subsequence": list(d.subsequence),
            "derivative_moduli": list(d.derivative_moduli),
            "partial_sums": list(d.partial_sums),
            "notes": list(d.notes),
        })
    out = {"instability": diags}
    if R.is_polynomial:
        h = hyperbolicity_check(R, args.budget)
        out["hyperbolicity"] = {
            "verdict": h.verdict,
            "orbits": [{"critical_point": o.critical_point, "verdict": o.verdict, "period": o.period,
                        "multiplier": o.multiplier} for o in h.orbits],
        }
    return rio.dumps(out)


def _spectrum(R, args):
    pcs = postcritical_set(R, args.budget)
    if not pcs.finite:
        raise SpectrumError("postcritical set is not finite within the orbit budget")
    T = transfer_matrix(R, pcs.points)
    eig = spectrum(T)
    if args.format == "csv":
        return rio.csv_text(["eigenvalue_re", "eigenvalue_im"], [(v.real, v.imag) for v in eig])
    data = T.to_json()
    data["eigenvalues"] = [[v.real, v.imag] for v in eig]
    return rio.dumps(data)


COMMANDS = {
    "map-info": (_map_info, "json"),
    "pushforward": (_pushforward, "json"),
    "series": (_series, "csv"),
    "bn": (_bn, "csv"),
    "measures": (_measures, "csv"),
    "stability": (_stability, "json"),
    "spectrum": (_spectrum, "json"),
}


def _fail(code: str, message: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 2
        func, default_format = COMMANDS[args.command]
        args.format = args.format or default_format
        config = load_config(args.config) if args.config else RunConfig()
        R = rio.load_map(args.map, config)
        if args.normalize:
            R, _ = normalize_fixed(R, *args.normalize)
        text = func(R, args)
    except UsageError as err:
        return _fail("usage", str(err), 2)
    except RuelleKitError as err:
        return _fail(err.code, str(err), 1)
    except (OSError, ValueError, KeyError, IndexError) as err:
        return _fail("input", str(err), 1)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
