"""Command line for the reconstruction, J-series, and period pipelines.

Exit codes: 0 success, 1 verification mismatch, 2 configuration or
input error.  All output is deterministic: identical invocations give
byte-identical files and stdout.
"""

import argparse
import os
import sys

from qfano import lefschetz, qde
from qfano import seeds as seedlib
from qfano.fixtures_io import fixture_lines, load_named_expressions
from qfano.reconstruct import QuantumMatrix, reconstruct
from qfano.ring import format_rational, load_bundle_config, make_bundle

BUILTIN_BUNDLES = {
    "flagship": (4, 6, (-3, 5, -5)),
    "p1-trivial": (1, 2, ()),
}

FIXTURE_MATRICES = {
    "flagship": ("flagship_mp.triplets", "flagship_mxi.triplets"),
    "p1-trivial": ("p1p1_mp.triplets", "p1p1_mxi.triplets"),
}


class CliError(Exception):
    """Configuration or input problem; maps to exit code 2."""


def _bundle(args):
    name = args.bundle
    if name in BUILTIN_BUNDLES:
        return make_bundle(*BUILTIN_BUNDLES[name])
    if os.path.exists(name):
        try:
            return load_bundle_config(name)
        except ValueError as exc:
            raise CliError(str(exc))
    raise CliError(
        "unknown bundle %r; expected 'flagship', 'p1-trivial', or a "
        "config file path" % name)


def _seed_source(args, spec):
    if args.seeds:
        try:
            return seedlib.load_seeds(args.seeds, spec)
        except ValueError as exc:
            raise CliError(str(exc))
    try:
        return seedlib.builtin_source(spec)
    except ValueError as exc:
        raise CliError(str(exc))


def _matrices(args, spec):
    try:
        return reconstruct(spec, _seed_source(args, spec))
    except seedlib.MissingSeedError as exc:
        raise CliError(str(exc))


def _read_lines(path):
    with open(path) as fh:
        return fh.read().splitlines()


def _emit(args, outputs):
    """Write (name, body) pairs into --out, or print them to stdout."""
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for name, body in outputs:
            path = os.path.join(args.out, name)
            with open(path, "w") as fh:
                fh.write(body)
            print("wrote %s" % path)
    else:
        for idx, (name, body) in enumerate(outputs):
            if idx:
                print()
            print("# ==> %s <==" % name)
            sys.stdout.write(body)
    return 0


def cmd_reconstruct(args):
    spec = _bundle(args)
    mp, mxi = _matrices(args, spec)
    if args.verify_fixture:
        names = FIXTURE_MATRICES.get(args.bundle)
        if names is None:
            raise CliError(
                "no packaged fixture matrices for bundle %r" % args.bundle)
        status = 0
        for mat, fixture_name in ((mp, names[0]), (mxi, names[1])):
            ref = QuantumMatrix.from_triplet_lines(
                spec, mat.label, fixture_lines(fixture_name))
            spot = mat.first_mismatch(ref)
            if spot is None:
                print("%s matrix matches %s (%d columns)"
                      % (mat.label, fixture_name, spec.size))
            else:
                i, j = spot
                print("%s matrix mismatch at entry (%d,%d): computed %s, "
                      "fixture %s" % (mat.label, i + 1, j + 1,
                                      mat.entry_string(i, j),
                                      ref.entry_string(i, j)))
                status = 1
        return status
    outputs = []
    for mat, stem in ((mp, "mp"), (mxi, "mxi")):
        outputs.append((stem + ".triplets",
                        "\n".join(mat.triplet_lines()) + "\n"))
        outputs.append((stem + "_dense.csv",
                        "\n".join(mat.dense_lines()) + "\n"))
    return _emit(args, outputs)


def cmd_jfun(args):
    spec = _bundle(args)
    mp, mxi = _matrices(args, spec)
    if args.order < 0:
        raise CliError("--order must be >= 0")
    try:
        js = qde.j_series(mp, mxi, spec, args.order)
    except qde.FlatnessError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    bad = qde.check_homogeneity(js)
    if bad is not None:
        print("error: homogeneity failure: %s" % bad, file=sys.stderr)
        return 1
    ctable = qde.identity_coefficients(js)
    lines = ["i,j,c"]
    lines += ["%d,%d,%s" % (a, b, format_rational(val))
              for (a, b), val in sorted(ctable.items())]
    outputs = [("coefficients.csv", "\n".join(lines) + "\n")]
    if args.apery:
        try:
            table = qde.apery_table(ctable, args.apery, spec)
        except ValueError as exc:
            if "not an integer" in str(exc):
                print("error: %s" % exc, file=sys.stderr)
                return 1
            raise CliError(str(exc))
        outputs.append(("apery.csv",
                        "\n".join(",".join(str(x) for x in row)
                                  for row in table) + "\n"))
    status = 0
    if args.check_operators is not None:
        source = (fixture_lines("qde_operators.txt")
                  if args.check_operators == ""
                  else _read_lines(args.check_operators))
        try:
            named = load_named_expressions(source)
            parsed = {name: qde.parse_operator(text)
                      for name, text in named.items()}
        except ValueError as exc:
            raise CliError(str(exc))
        report = []
        for name in sorted(parsed):
            failure = qde.check_operator(parsed[name], js)
            if failure is None:
                report.append("%s: residual zero at all %d indices"
                              % (name, len(js.frames)))
            else:
                report.append("%s: %s" % (name, failure))
                status = 1
        outputs.append(("operator_report.txt", "\n".join(report) + "\n"))
    _emit(args, outputs)
    return status


def cmd_periods(args):
    spec = _bundle(args)
    mp, mxi = _matrices(args, spec)
    if args.terms < 0:
        raise CliError("--terms must be >= 0")
    try:
        bundles = lefschetz.parse_cut(args.cut)
    except ValueError as exc:
        raise CliError(str(exc))
    ctable = qde.identity_series(mp, mxi, spec, max(args.terms - 1, 0))
    try:
        dtable = lefschetz.hypergeometric_modify(ctable, bundles)
        multiplier = lefschetz.mirror_map_correction(dtable, spec, bundles)
        seq = lefschetz.period_sequence(dtable, multiplier, args.terms)
    except ValueError as exc:
        raise CliError(str(exc))
    if args.regularized:
        seq = lefschetz.regularize(seq)
    status = 0
    report = []
    if args.pf_verify is not None:
        source = (fixture_lines("pf_operator.txt") if args.pf_verify == ""
                  else _read_lines(args.pf_verify))
        try:
            op = lefschetz.operator_from_lines(source)
        except ValueError as exc:
            raise CliError(str(exc))
        residual = lefschetz.pf_apply(op, seq)
        bad = next((pos for pos, val in enumerate(residual) if val), None)
        if bad is None:
            report.append("operator annihilates all %d certified positions"
                          % len(seq))
        else:
            report.append("operator residual %s at position %d"
                          % (format_rational(residual[bad]), bad))
            status = 1
    if args.pf_search:
        try:
            search_order, search_degree = (
                int(tok) for tok in args.pf_search.split(","))
        except ValueError:
            raise CliError("--pf-search expects ORDER,DEGREE")
        try:
            found = lefschetz.find_annihilator(seq, search_order,
                                               search_degree)
        except ValueError as exc:
            raise CliError(str(exc))
        if found is None:
            report.append("no annihilator within order %d, degree %d"
                          % (search_order, search_degree))
            status = 1
        else:
            report.append(lefschetz.format_pf_operator(found))
    body = "".join(format_rational(val) + "\n" for val in seq)
    outputs = [("periods.txt", body)]
    if report:
        outputs.append(("pf_report.txt", "\n".join(report) + "\n"))
    _emit(args, outputs)
    return status


def cmd_seeds(args):
    spec = _bundle(args)
    source = _seed_source(args, spec)
    try:
        lines = seedlib.dump_seed_lines(spec, source)
    except seedlib.MissingSeedError as exc:
        raise CliError(str(exc))
    return _emit(args, [("seeds.txt",
                         "".join(line + "\n" for line in lines))])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qfano",
        description="Exact quantum cohomology pipelines for projectivized "
                    "bundles over projective space.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--bundle", default="flagship",
                       help="builtin name (flagship, p1-trivial) or a "
                            "key=value config file (default: flagship)")
        p.add_argument("--seeds", metavar="FILE",
                       help="seed invariant file; defaults to the builtin "
                            "geometric source for the bundle")
        p.add_argument("--out", metavar="DIR",
                       help="directory for output files; stdout when omitted")

    p = sub.add_parser("reconstruct",
                       help="reconstruct both quantum product matrices")
    common(p)
    p.add_argument("--verify-fixture", action="store_true",
                   help="compare against the packaged matrices instead of "
                        "writing them")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("jfun",
                       help="solve the differential system and export the "
                            "coefficient table")
    common(p)
    p.add_argument("--order", type=int, default=16,
                   help="total Novikov order of the series (default 16)")
    p.add_argument("--apery", type=int, metavar="SIZE",
                   help="also export the SIZE x SIZE normalized integer "
                        "table")
    p.add_argument("--check-operators", nargs="?", const="", metavar="FILE",
                   help="verify annihilating operators from a name = "
                        "expression file (packaged set when FILE omitted)")
    p.set_defaults(func=cmd_jfun)

    p = sub.add_parser("periods",
                       help="period sequence of a nef complete-intersection "
                            "cut")
    common(p)
    p.add_argument("--cut", default="p,xi^5",
                   help='line bundles of the cut (default "p,xi^5")')
    p.add_argument("--terms", type=int, default=10,
                   help="number of sequence terms (default 10)")
    p.add_argument("--regularized", action="store_true",
                   help="multiply term m by m!")
    p.add_argument("--pf-verify", nargs="?", const="", metavar="FILE",
                   help="apply an operator file to the sequence (packaged "
                        "operator when FILE omitted)")
    p.add_argument("--pf-search", metavar="ORDER,DEGREE",
                   help="search for an annihilating operator within the "
                        "bounds")
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("seeds",
                       help="dump the seed invariants the reconstruction "
                            "demands, in the loadable format")
    common(p)
    p.set_defaults(func=cmd_seeds)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
