"""Command-line interface: baltrunc <command> [options]."""
import argparse
import logging
import sys

from . import model_io
from .analysis import frequency_sweep, simulate, verify_bound
from .config import load_settings
from .debug_utils import log_command
from .errors import (
    AsymmetricMatrix,
    DimensionMismatch,
    InvalidMatrix,
    ModelParseError,
    ModelValidationError,
    NumericalFailure,
    UnknownExampleKind,
)
from .generators import EXAMPLES, gen_example
from .logging_config import setup_logging
from .realization import minimal_realization
from .reduction import (
    ErrorBudget,
    ExplicitOrder,
    ReductionOptions,
    RelativeFloor,
    balanced_truncation,
    hankel_singular_values,
)
from .statespace import is_stable
from .version import __app_name__, __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY_FAILED = 4

fmt = model_io.format_float


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2."""
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _param(text):
    key, sep, value = text.partition('=')
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"value of {key!r} must be a number, got {value!r}")


def _options(args, settings):
    rank_tol = args.tol if getattr(args, 'tol', None) is not None else settings.rank_tol
    return ReductionOptions(rank_tol=rank_tol, gap_tol=settings.gap_tol, dedup_tol=settings.dedup_tol,
                            hsv_floor=settings.hsv_floor, shift_tol=settings.cholesky_shift_tol)


@log_command
def cmd_info(args, settings, out):
    model = model_io.load_model(args.model)
    stable, abscissa = is_stable(model)
    if model.label is not None:
        print(f"label: {model.label}", file=out)
    print(f"order: {model.n}", file=out)
    print(f"inputs: {model.m}", file=out)
    print(f"outputs: {model.p}", file=out)
    print(f"stable: {'yes' if stable else 'no'}", file=out)
    print(f"spectral_abscissa: {fmt(abscissa) if model.n else '-inf'}", file=out)
    return EXIT_OK


@log_command
def cmd_minreal(args, settings, out):
    model = model_io.load_model(args.model)
    minimal, decomposition = minimal_realization(model, _options(args, settings).rank_tol)
    model_io.save_model(minimal, args.output)
    co, cno, nco, ncno = decomposition.dims
    print(f"kalman_dims: co={co} cno={cno} nco={nco} ncno={ncno}", file=out)
    print(f"order: {model.n} -> {minimal.n}", file=out)
    return EXIT_OK


@log_command
def cmd_hsv(args, settings, out):
    model = model_io.load_model(args.model)
    options = _options(args, settings)
    hsv = hankel_singular_values(model, options.hsv_floor, options.shift_tol)
    print("index  hsv", file=out)
    for k, value in enumerate(hsv, start=1):
        print(f"{k}  {fmt(value)}", file=out)
    if args.csv:
        model_io.save_hsv(hsv, args.csv)
    if args.plot:
        from .plots import plot_hsv
        plot_hsv(hsv, args.plot)
    return EXIT_OK


def _criterion(args):
    if args.order is not None:
        return ExplicitOrder(args.order)
    if args.error is not None:
        return ErrorBudget(args.error)
    return RelativeFloor(args.floor)


@log_command
def cmd_reduce(args, settings, out):
    model = model_io.load_model(args.model)
    reduced, report, decomposition = balanced_truncation(model, _criterion(args), _options(args, settings))
    model_io.save_model(reduced, args.output)
    if args.report:
        model_io.save_report(report, args.report)
    print(f"original_order: {report.original_order}", file=out)
    print(f"minimal_order: {report.minimal_order}", file=out)
    print(f"reduced_order: {report.reduced_order}", file=out)
    print(f"lower_bound: {fmt(report.lower_bound)}", file=out)
    print(f"upper_bound: {fmt(report.upper_bound)}", file=out)
    if args.plot:
        from .plots import plot_hsv
        plot_hsv(report.hsv_kept + report.hsv_truncated, args.plot, order=report.reduced_order)
    return EXIT_OK


@log_command
def cmd_bode(args, settings, out):
    model = model_io.load_model(args.model)
    response = frequency_sweep(model, args.wmin, args.wmax, args.points)
    model_io.write_frame(response.to_frame(), args.output)
    print(f"points: {response.omegas.size}", file=out)
    if args.plot:
        from .plots import plot_bode
        responses, labels = [response], [model.label or args.model]
        if args.compare:
            other = model_io.load_model(args.compare)
            responses.append(frequency_sweep(other, args.wmin, args.wmax, args.points))
            labels.append(other.label or args.compare)
        plot_bode(responses, labels, args.plot)
    return EXIT_OK


@log_command
def cmd_simulate(args, settings, out):
    model = model_io.load_model(args.model)
    u = model_io.load_signal(args.input)
    x0 = model_io.load_state(args.x0, model.n) if args.x0 else None
    y, x_final = simulate(model, u, x0)
    model_io.save_signal(y, args.output)
    print(f"steps: {y.num_steps}", file=out)
    print("x_final: " + " ".join(fmt(v) for v in x_final), file=out)
    return EXIT_OK


@log_command
def cmd_verify(args, settings, out):
    full = model_io.load_model(args.full)
    reduced = model_io.load_model(args.reduced)
    report = model_io.load_report(args.report)
    result = verify_bound(full, reduced, report, trials=args.trials, seed=args.seed, workers=args.workers)
    for key, value in result.to_dict().items():
        if isinstance(value, bool):
            value = 'yes' if value else 'no'
        elif isinstance(value, float):
            value = fmt(value) if value != float('inf') else 'inf'
        print(f"{key}: {value}", file=out)
    return EXIT_OK if result.passed else EXIT_VERIFY_FAILED


@log_command
def cmd_gen(args, settings, out):
    params = dict(args.param or [])
    if args.inputs is not None:
        params['inputs'] = args.inputs
    if args.outputs is not None:
        params['outputs'] = args.outputs
    model = gen_example(args.kind, args.size, params, args.seed)
    model_io.save_model(model, args.output)
    print(f"order: {model.n}", file=out)
    return EXIT_OK


def build_parser():
    parser = ArgumentParser(prog=__app_name__, description="Balanced truncation of LTI state-space models")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v for info, -vv for debug logs")
    commands = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    info = commands.add_parser('info', help="order, dimensions and stability")
    info.add_argument('model')
    info.set_defaults(handler=cmd_info)

    minreal = commands.add_parser('minreal', help="write the minimal realization")
    minreal.add_argument('model')
    minreal.add_argument('-o', '--output', required=True)
    minreal.add_argument('--tol', type=float, help="relative rank tolerance")
    minreal.set_defaults(handler=cmd_minreal)

    hsv = commands.add_parser('hsv', help="Hankel singular values")
    hsv.add_argument('model')
    hsv.add_argument('--csv', help="also write the values as CSV")
    hsv.add_argument('--plot', help="save an HSV bar chart")
    hsv.set_defaults(handler=cmd_hsv)

    reduce = commands.add_parser('reduce', help="balanced truncation")
    reduce.add_argument('model')
    reduce.add_argument('-o', '--output', required=True)
    criterion = reduce.add_mutually_exclusive_group(required=True)
    criterion.add_argument('--order', type=int, help="requested order r")
    criterion.add_argument('--error', type=float, help="upper error bound budget")
    criterion.add_argument('--floor', type=float, help="keep HSVs >= floor * h1")
    reduce.add_argument('--report', help="write the reduction report")
    reduce.add_argument('--tol', type=float, help="relative rank tolerance")
    reduce.add_argument('--plot', help="save an HSV chart with the chosen order")
    reduce.set_defaults(handler=cmd_reduce)

    bode = commands.add_parser('bode', help="frequency response sweep")
    bode.add_argument('model')
    bode.add_argument('--wmin', type=float, required=True)
    bode.add_argument('--wmax', type=float, required=True)
    bode.add_argument('--points', type=int, default=200)
    bode.add_argument('-o', '--output', required=True)
    bode.add_argument('--plot', help="save a magnitude/phase chart")
    bode.add_argument('--compare', help="second model drawn on the chart")
    bode.set_defaults(handler=cmd_bode)

    sim = commands.add_parser('simulate', help="zero-order-hold simulation")
    sim.add_argument('model')
    sim.add_argument('--input', required=True, help="input signal CSV")
    sim.add_argument('--x0', help="initial state JSON")
    sim.add_argument('-o', '--output', required=True)
    sim.set_defaults(handler=cmd_simulate)

    verify = commands.add_parser('verify', help="check a reduction against its error bounds")
    verify.add_argument('full')
    verify.add_argument('reduced')
    verify.add_argument('--report', required=True)
    verify.add_argument('--trials', type=int, default=5)
    verify.add_argument('--seed', type=int, default=0)
    verify.add_argument('--workers', type=int, help="threads for the time-domain trials")
    verify.set_defaults(handler=cmd_verify)

    gen = commands.add_parser('gen', help="generate an example model")
    gen.add_argument('--kind', required=True, choices=sorted(EXAMPLES))
    gen.add_argument('--size', type=int, required=True)
    gen.add_argument('--seed', type=int, default=0)
    gen.add_argument('--param', type=_param, action='append', metavar='KEY=VALUE')
    gen.add_argument('--inputs', type=int)
    gen.add_argument('--outputs', type=int)
    gen.add_argument('-o', '--output', required=True)
    gen.set_defaults(handler=cmd_gen)
    return parser


def cli_main(argv=None, out=None):
    """Run one command and return its exit code."""
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE

    setup_logging(args.verbose)
    try:
        settings = load_settings()
        return args.handler(args, settings, out)
    except (ModelParseError, ModelValidationError, InvalidMatrix, DimensionMismatch, AsymmetricMatrix) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UnknownExampleKind, ValueError) as e:
        print(f"usage: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


def main():
    sys.exit(cli_main())
