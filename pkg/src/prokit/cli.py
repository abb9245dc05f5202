"""Command line interface: ``prokit <command> [options]``.

Exit status is 0 on success, 1 when the input is outside the domain of the
requested operation (failed validation, non-invertible function, ...) and 2 for
I/O and parse errors.
"""

import argparse
import sys
from importlib import resources

import numpy as np

from prokit import io, matlin
from prokit.core import (
    SAMPLE_SEED,
    DescriptorRealization,
    FosterForm,
    StateSpaceRealization,
    ValidationReport,
    check_pro_sampling,
    default_axis_samples,
    default_samples,
    evaluate,
    validate_foster,
    validate_realization,
)
from prokit.errors import PoleProximityError, ProError
from prokit.generate import DEFAULT_SEED, random_foster
from prokit.invert import (
    inverse_descriptor_minimal,
    inverse_descriptor_raw,
    inverse_state_space,
    inverse_weierstrass,
    invertibility_witness,
)
from prokit.realize import (
    foster_to_state_space,
    pencil_is_regular,
    state_space_to_foster,
    state_space_to_weierstrass,
)
from prokit.spectra import interlace_verify, pole_zero_report

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2
PROBE_COUNT = 5


class Failure(Exception):
    """A command finished with a domain failure; the message is already printed."""


def fixture_path(name="two-port.json"):
    """Path of a bundled example document."""
    return resources.files("prokit") / "data" / name


def _tolerances(args):
    base = matlin.DEFAULT_TOL
    try:
        return matlin.ToleranceConfig(
            rank_rel=args.tol_rank if args.tol_rank is not None else base.rank_rel,
            psd_abs=args.tol_psd if args.tol_psd is not None else base.psd_abs,
            eq_rel=args.tol_eq if args.tol_eq is not None else base.eq_rel,
            ctrb_rel=args.tol_ctrb if args.tol_ctrb is not None else base.ctrb_rel,
        )
    except ProError as exc:
        raise io.DocumentError(str(exc)) from exc


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise io.DocumentError(f"{path}: {exc.strerror}") from exc


def _write_json(value, path):
    if path is not None:
        _write(io.dumps_json(value), path)


def _as_state_space(obj, tol):
    if isinstance(obj, StateSpaceRealization):
        return obj
    if isinstance(obj, FosterForm):
        return foster_to_state_space(obj, tol)
    raise ProError("this command needs a Foster or state-space document")


def _probe_points(seed):
    return default_samples(PROBE_COUNT, seed)


def _max_deviation(f, g, points, tol):
    worst = 0.0
    for z in points:
        try:
            a, b = evaluate(f, z, tol), evaluate(g, z, tol)
        except PoleProximityError:
            continue
        worst = max(worst, float(np.linalg.norm(a - b, 2) / (1.0 + np.linalg.norm(a, 2))))
    return worst


def _fmt_complex(z):
    z = complex(z)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real:.6f}{sign}{abs(z.imag):.6f}i"


def parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise io.DocumentError(f"--at: cannot parse {text!r} as a complex number") from exc


# -- commands -------------------------------------------------------------


def cmd_validate(args, tol):
    doc = io.load(args.input)
    obj = doc.obj
    if isinstance(obj, FosterForm):
        report = validate_foster(obj, tol)
    elif isinstance(obj, StateSpaceRealization):
        report = validate_realization(obj, tol)
    else:
        report = ValidationReport()
        if not pencil_is_regular(obj.E, obj.A, tol):
            report.add("pencil (E, A) regular", "E, A", 0.0)
    if report.passed:
        seed = SAMPLE_SEED if args.seed is None else args.seed
        report.extend(
            check_pro_sampling(
                lambda z: evaluate(obj, z, tol),
                default_samples(seed=seed),
                default_axis_samples(seed=seed),
                tol,
            )
        )
    out = report.to_dict()
    out["kind"] = doc.kind
    _write_json(out, args.json)
    print(f"{doc.kind} document with {doc.m} ports: {report}")
    if not report.passed:
        raise Failure()


def cmd_convert(args, tol):
    doc = io.load(args.input)
    obj = doc.obj
    if isinstance(obj, DescriptorRealization):
        raise ProError("conversion from a descriptor document is not supported")
    if args.to == "foster":
        out = obj if isinstance(obj, FosterForm) else state_space_to_foster(obj, tol)
    elif args.to == "ss":
        out = _as_state_space(obj, tol)
    else:
        out = state_space_to_weierstrass(_as_state_space(obj, tol), tol)
    seed = SAMPLE_SEED if args.seed is None else args.seed
    points = _probe_points(seed)
    meta = dict(doc.meta)
    meta.update(
        {
            "converted_from": doc.kind,
            "probe_seed": seed,
            "probe_points": [io.encode_complex(z) for z in points],
            "probe_max_rel_error": _max_deviation(obj, out, points, tol),
        }
    )
    _write(io.dumps(out, meta), args.output)


INVERSES = {
    "raw": inverse_descriptor_raw,
    "minimal": lambda r, tol: inverse_descriptor_minimal(r, tol=tol).descriptor(),
    "weierstrass": lambda r, tol: inverse_weierstrass(r, tol=tol),
    "ss": inverse_state_space,
}


def cmd_invert(args, tol):
    doc = io.load(args.input)
    r = _as_state_space(doc.obj, tol)
    witness = invertibility_witness(r, tol)
    if witness is not None:
        vec = " ".join(f"{x:.6f}" for x in witness)
        print(f"not invertible: F(z) u = 0 for all z with u = [{vec}]", file=sys.stderr)
        _write_json({"invertible": False, "witness": witness.tolist()}, args.json)
        raise Failure()
    inv = INVERSES[args.form](r, tol)
    meta = dict(doc.meta)
    meta.update({"inverse_of": doc.kind, "form": args.form})
    _write(io.dumps(inv, meta), args.output)


def cmd_polezero(args, tol):
    doc = io.load(args.input)
    report = pole_zero_report(_as_state_space(doc.obj, tol), tol)
    _write_json(report.to_dict(), args.json)
    print(report)


def cmd_interlace(args, tol):
    doc = io.load(args.input)
    report = interlace_verify(_as_state_space(doc.obj, tol), tol)
    _write_json(report.to_dict(), args.json)
    print(report)
    if not report.passed:
        raise Failure()


def cmd_eval(args, tol):
    doc = io.load(args.input)
    points = [parse_complex(s) for s in args.at]
    values = []
    for z in points:
        Fz = evaluate(doc.obj, z, tol)
        values.append({"z": io.encode_complex(z), "value": io.encode_complex_matrix(Fz)})
        print(f"F({_fmt_complex(z)}) =")
        for row in Fz:
            print("  " + "  ".join(_fmt_complex(x) for x in row))
    _write_json({"values": values}, args.json)


def cmd_generate(args, tol):
    seed = DEFAULT_SEED if args.seed is None else args.seed
    if args.m < 1 or args.terms < 0:
        raise io.DocumentError("--m must be positive and --terms nonnegative")
    f = random_foster(args.m, args.terms, seed)
    _write(io.dumps(f, {"generator": "random_foster", "seed": seed}), args.output)


# -- entry point ----------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="also write a machine-readable report")
    common.add_argument("--tol-rank", type=float, help="relative rank cutoff")
    common.add_argument("--tol-psd", type=float, help="semidefiniteness floor")
    common.add_argument("--tol-eq", type=float, help="relative equality threshold")
    common.add_argument("--tol-ctrb", type=float, help="relative cutoff for Hautus-type ranks")
    common.add_argument("--seed", type=int, help="seed for probe points and generation")
    common.add_argument("-o", "--output", metavar="PATH", help="output document (default stdout)")

    parser = argparse.ArgumentParser(
        prog="prokit", description="Lossless positive real matrix functions."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a document")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", parents=[common], help="change representation")
    p.add_argument("input")
    p.add_argument("--to", choices=["foster", "ss", "weierstrass"], required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("invert", parents=[common], help="realize the inverse")
    p.add_argument("input")
    p.add_argument("--form", choices=sorted(INVERSES), default="ss")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("polezero", parents=[common], help="poles and zeros")
    p.add_argument("input")
    p.set_defaults(func=cmd_polezero)

    p = sub.add_parser("interlace", parents=[common], help="check pole/zero interlacing")
    p.add_argument("input")
    p.set_defaults(func=cmd_interlace)

    p = sub.add_parser("eval", parents=[common], help="evaluate at complex points")
    p.add_argument("input")
    p.add_argument("--at", nargs="+", required=True, metavar="Z", help="points such as 2 or 1+2j")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("generate", parents=[common], help="random Foster document")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--terms", type=int, default=2)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args, _tolerances(args))
    except io.DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Failure:
        return EXIT_DOMAIN
    except ProError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
