"""
Command line for exact distance and volume spectra.

Exit codes: 0 success or affirmative verdict, 1 negative verdict,
2 indeterminate, 3 usage, input or computation error.
"""
import argparse
import json
import logging
import sys
from itertools import combinations

from pointspectra.algebra import relideal
from pointspectra.algebra.permact import certify_reconstructible
from pointspectra.algebra.volrel import alternating_sum
from pointspectra.config import settings
from pointspectra.errors import BudgetExceededError, DegenerateFrameError, PointSpectraError
from pointspectra.geometry.configuration import SpectrumKind, histogram, spectra_match
from pointspectra.services import storage
from pointspectra.services.fixtures import get_fixture, list_fixtures
from pointspectra.tools import congruence
from pointspectra.tools.miner import mine
from pointspectra.tools.recon import local_reconstructibility_radius, realize_from_distances, realize_from_volumes

logger = logging.getLogger("pointspectra.cli")

EXIT_OK, EXIT_NEGATIVE, EXIT_INDETERMINATE, EXIT_ERROR = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_model(model, fmt: str) -> None:
    if fmt == "text":
        for key, value in model.model_dump(mode="json", exclude_none=True).items():
            _emit(f"{key}: {json.dumps(value) if isinstance(value, (list, dict)) else value}")
    else:
        _emit(model.model_dump_json(indent=2, exclude_none=True))


def _spectra(P, kind: str):
    if kind == "both":
        return [P.distance_spectrum(), P.volume_spectrum()]
    return [P.spectrum(kind)]


# commands ---------------------------------------------------------------


def cmd_spectrum(args) -> int:
    P = storage.load_configuration(args.file)
    spectra = _spectra(P, args.kind)
    fmt = args.format or "csv"
    if fmt == "csv":
        if len(spectra) == 1:
            _emit(storage.write_spectrum_csv(spectra[0]))
        else:
            frames = [storage.spectrum_frame(S).assign(kind=S.kind.value) for S in spectra]
            _emit(
                "".join(
                    frame[["kind", "value", "approx"]].to_csv(index=False, header=i == 0, float_format="%.17g")
                    for i, frame in enumerate(frames)
                )
            )
    elif fmt == "json":
        _emit(json.dumps({S.kind.value: [str(v) for v in S.values] for S in spectra}, indent=2))
    else:
        for S in spectra:
            _emit(f"{S.kind.value}: {' '.join(str(v) for v in S.values)}")

    if args.compare is None:
        return EXIT_OK
    Q = storage.load_configuration(args.compare)
    others = _spectra(Q, args.kind)
    if args.tol is None:
        same = spectra == others
    else:
        same = all(spectra_match(S, T, args.tol) for S, T in zip(spectra, others))
    logger.info(f"Spectra {'match' if same else 'differ'}")
    return EXIT_OK if same else EXIT_NEGATIVE


def cmd_hist(args) -> int:
    P = storage.load_configuration(args.file)
    H = histogram(P.spectrum(args.kind), args.bin, take_sqrt=args.sqrt)
    if (args.format or "csv") == "json":
        _emit(json.dumps({"bin_size": H.bin_size, "counts": [list(c) for c in H.counts]}, indent=2))
    else:
        _emit(storage.write_histogram_csv(H))
    return EXIT_OK


def cmd_equiv(args) -> int:
    P = storage.load_configuration(args.first)
    Q = storage.load_configuration(args.second)
    if args.group == "rigid":
        decide = congruence.labeled_congruent if args.labeled else congruence.orbit_congruent
    else:
        decide = congruence.labeled_volume_equivalent if args.labeled else congruence.orbit_volume_equivalent
    try:
        report = storage.EquivalenceReport.from_result(args.group, decide(P, Q))
    except DegenerateFrameError as e:
        report = storage.EquivalenceReport(group=args.group, equivalent=None, reason=str(e))
    _emit_model(report, args.format or "json")
    return report.exit_code


def cmd_certify(args) -> int:
    P = storage.load_configuration(args.file)
    report = certify_reconstructible(P, budget=args.budget)
    _emit_model(report, args.format or "json")
    return report.exit_code


def cmd_reconstruct(args) -> int:
    S = storage.read_spectrum_csv(args.spectrum, args.kind, d=args.sqrt_base)
    if args.kind == SpectrumKind.DISTANCE.value:
        result = realize_from_distances(S, args.n, args.m, tol=args.tol, budget=args.budget)
    else:
        result = realize_from_volumes(S, args.n, args.m, budget=args.budget)
    report = storage.ReconstructionReport.from_result(result)
    _emit_model(report, args.format or "json")
    return report.exit_code


def cmd_check_relations(args) -> int:
    P = storage.load_configuration(args.file)
    subsets = list(combinations(range(1, P.n + 1), P.m + 2))
    violated = [list(s) for s in subsets if not alternating_sum(P, s).is_zero()]
    report = storage.RelationCheckReport(n=P.n, m=P.m, checked=len(subsets), violated=violated)
    _emit_model(report, args.format or "json")
    return report.exit_code


def cmd_mine(args) -> int:
    try:
        width, height = (int(x) for x in args.grid.lower().split("x"))
    except ValueError:
        raise PointSpectraError(f"grid must look like WxH, got {args.grid!r}")
    code = EXIT_OK
    try:
        result = mine(width, height, args.n, kind=args.kind, budget=args.budget, jobs=args.jobs)
    except BudgetExceededError as e:
        logger.warning(str(e))
        result, code = e.partial, EXIT_INDETERMINATE
    report = storage.MiningReport.from_result(result)
    if args.format == "text":
        for pair in report.pairs:
            _emit(json.dumps(pair.model_dump(mode="json")))
    else:
        _emit_model(report, "json")
    return code


def cmd_probe(args) -> int:
    P = storage.load_configuration(args.file)
    result = local_reconstructibility_radius(
        P, samples=args.samples, noise=args.noise, levels=args.levels, tol=args.tol
    )
    report = storage.LocalProbeReport.from_result(result)
    _emit_model(report, args.format or "json")
    if result.vacuous:
        logger.warning("no sample had nearly equal distances, the violation counts say nothing")
    if not result.hypothesis_met:
        return EXIT_INDETERMINATE
    return EXIT_OK if result.violations[0] == 0 else EXIT_NEGATIVE


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for fixture in list_fixtures():
            _emit(f"{fixture.name}\t{len(fixture.points)}\t{fixture.description}")
        return EXIT_OK
    if not args.name:
        raise PointSpectraError("fixtures show needs a fixture name")
    fixture = get_fixture(args.name)
    configurations = fixture.configurations
    if args.index is not None:
        configurations = (configurations[args.index],)
    for P in configurations:
        _emit(storage.dump_configuration(P, name=fixture.name, provenance=fixture.provenance))
    return EXIT_OK



def cmd_relideal_minor(args) -> int:
    F = relideal.minor(relideal.symbolic_relation_matrix(args.n), args.rows, args.cols)
    if (args.format or "text") == "text":
        _emit(str(F))
    else:
        payload = {
            "n": args.n,
            "rows": list(args.rows),
            "cols": list(args.cols),
            "degree": F.degree(),
            "terms": len(F.terms),
            "polynomial": str(F),
        }
        _emit(json.dumps(payload, indent=2))
    return EXIT_OK


# parser -----------------------------------------------------------------


def _indices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated indices, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pointspectra", description="Exact distance and volume spectra of point configurations")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes for sharded searches")
    parser.add_argument("--tol", type=float, default=None, help="tolerance for floating-point comparisons")
    parser.add_argument("--format", choices=["json", "csv", "text"], default=None)
    parser.add_argument("--log-level", default=None, help="logging level on stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("spectrum", help="print the exact spectrum of a configuration")
    p.add_argument("file")
    p.add_argument("--kind", choices=["distance", "volume", "both"], default="distance")
    p.add_argument("--compare", metavar="OTHER", help="exit 0 iff OTHER has the same spectrum")
    p.set_defaults(handler=cmd_spectrum)

    p = subparsers.add_parser("hist", help="histogram of a spectrum")
    p.add_argument("file")
    p.add_argument("--bin", type=float, required=True, help="bin size")
    p.add_argument("--sqrt", action="store_true", help="bin square roots of the values")
    p.add_argument("--kind", choices=["distance", "volume"], default="distance")
    p.set_defaults(handler=cmd_hist)

    p = subparsers.add_parser("equiv", help="decide equivalence of two configurations")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--group", choices=["rigid", "affine"], default="rigid")
    p.add_argument("--labeled", action="store_true", help="do not relabel the points")
    p.set_defaults(handler=cmd_equiv)

    p = subparsers.add_parser("certify", help="certify reconstructibility from distances")
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=None, help="candidates tried per double coset")
    p.set_defaults(handler=cmd_certify)

    p = subparsers.add_parser("reconstruct", help="enumerate the classes realizing a spectrum")
    p.add_argument("spectrum", help="spectrum CSV with a 'value' column")
    p.add_argument("--kind", choices=["distance", "volume"], default="distance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--sqrt-base", type=int, default=1)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(handler=cmd_reconstruct)

    p = subparsers.add_parser("check-relations", help="check every alternating volume sum vanishes")
    p.add_argument("file")
    p.set_defaults(handler=cmd_check_relations)

    p = subparsers.add_parser("mine", help="search an integer grid for collision pairs")
    p.add_argument("--grid", required=True, help="WxH")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=["distance", "volume", "both"], default="distance")
    p.add_argument("--budget", type=int, default=None, help="grid subsets to enumerate")
    p.set_defaults(handler=cmd_mine)

    p = subparsers.add_parser("probe", help="probe local reconstructibility under noise")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--noise", type=float, default=1e-6)
    p.add_argument("--levels", type=int, default=None)
    p.set_defaults(handler=cmd_probe)

    p = subparsers.add_parser("fixtures", help="bundled example configurations")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.add_argument("--index", type=int, default=None)
    p.set_defaults(handler=cmd_fixtures)

    p = subparsers.add_parser("relideal", help="polynomials of the relation ideal")
    actions = p.add_subparsers(dest="action", required=True)
    q = actions.add_parser("minor", help="minor of the symbolic relation matrix")
    q.add_argument("--n", type=int, required=True, help="number of points")
    q.add_argument("--rows", type=_indices, required=True, help="1-based rows, e.g. 1,2,3")
    q.add_argument("--cols", type=_indices, required=True, help="1-based columns")
    q.set_defaults(handler=cmd_relideal_minor)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=(args.log_level or settings.log_level).upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.jobs is None:
        args.jobs = settings.jobs
    try:
        return args.handler(args)
    except (PointSpectraError, OSError, KeyError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
