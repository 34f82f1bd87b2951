"""
The ``qfeyn`` command.

::

    $ qfeyn verify --q 0.5 --seed 7
    $ qfeyn pairings --n 2
    $ qfeyn moments --q 0.5 --n 2 --output text
    $ qfeyn expand --J 4 --D 3 --M 12 --mode exact
    $ qfeyn graphsum --cmax 2 --dmax 2
    $ qfeyn compare --q 0.5 --g 3=0.1

Reports go to standard output, logs to standard error. The exit code is
0 on success, 1 when a verification fails and 2 on a usage error.
"""

from __future__ import annotations

__all__ = ['UsageError', 'RunConfig', 'run', 'main', 'build_parser', 'COMMANDS']


import argparse
import concurrent.futures
import dataclasses
import logging
import sys
from collections.abc import Sequence
from typing import Any, BinaryIO, Literal

from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveFloat, PositiveInt, ValidationError

from . import __version__
from .combinat import SizeGuardError, enumerate_pairings, pairing_weight_exponent
from .jackson import gamma_q2_integral, gamma_small_q2, normalized_moment
from .perturb import CouplingSpec, Exact, Float, expand_action, expand_cells, graph_sum, verify_against_integration
from .qarith import eval_float, pochhammer_qk, qrat_limit_at_one
from .qfunc import ConvergenceError, LambdaKind, LambdaTable, QContext, QDomainError, c_factor, gamma_q2_closed
from .report import IdentityReport, RunReport, SuiteReport
from .suites import SuiteSettings, run_suite, suite_names
from .util.logging import add_console_handler, level_from_env, set_level
from .util.serializer import CsvSerializer, JsonLinesSerializer, JsonSerializer, format_float
from .util.timer import timer

logger = logging.getLogger(__name__)


Command = Literal['verify', 'gamma', 'moments', 'pairings', 'lambda', 'expand', 'graphsum', 'compare']

# Float commands run at this q unless --q is given.
DEFAULT_Q = 0.5
# `graphsum` keeps c + j within this bound unless --max-pairs is given.
DEFAULT_GRAPH_PAIRS = 4


class UsageError(ValueError):
    pass


class RunConfig(BaseModel):
    """
    One invocation of the command, validated field by field on construction
    and for mutual consistency by :meth:`check`.
    """

    model_config = ConfigDict(frozen=True, extra='forbid')

    command: Command
    q: float | Literal['exact'] | None = None
    tol: PositiveFloat | None = None
    max_terms: PositiveInt | None = None
    J: PositiveInt = 4
    D: NonNegativeInt = 2
    M: NonNegativeInt = 8
    cmax: NonNegativeInt | None = None
    dmax: NonNegativeInt | None = None
    max_pairs: NonNegativeInt | None = None
    n: NonNegativeInt | None = None
    t: list[PositiveFloat] = [1.0, 2.0, 3.0, 5.0]
    a: list[PositiveFloat] = [1.0, 2.0]
    kind: Literal['lambda', 'kappa'] = 'lambda'
    mode: Literal['exact', 'float'] | None = None
    g_values: dict[int, float] = {}
    output: Literal['json', 'csv', 'text'] = 'json'
    seed: int = 0
    suites: list[str] | None = None
    workers: PositiveInt = 1
    progress: bool = False
    log_level: str | None = None

    @property
    def numeric_q(self) -> float | None:
        return self.q if isinstance(self.q, float) else None

    @property
    def exact(self) -> bool:
        if self.mode is not None:
            return self.mode == 'exact'
        return self.numeric_q is None

    @property
    def degree(self) -> int:
        """``--dmax`` when given, else ``--D``."""
        return self.D if self.dmax is None else self.dmax

    def check(self) -> None:
        """Raise :class:`UsageError` if the flags contradict each other."""
        q = self.numeric_q
        if q is not None and not 0.0 < q < 1.0:
            raise UsageError(f'--q must be in (0, 1) or "exact"; got {q}')
        if self.q == 'exact' and (self.tol is not None or self.max_terms is not None):
            raise UsageError('exact mode (--q exact) forbids --tol and --max-terms')
        if self.mode == 'exact' and q is not None:
            raise UsageError('--mode exact contradicts a numeric --q')
        if self.mode == 'float' and q is None:
            raise UsageError('--mode float needs a numeric --q')
        if self.mode is not None and self.command != 'expand':
            raise UsageError('--mode applies to the expand command only')
        if self.command in ('gamma', 'moments', 'compare', 'verify') and self.q == 'exact':
            raise UsageError(f'{self.command} is numeric and needs a numeric --q')
        if self.command in ('moments', 'pairings') and self.n is None:
            raise UsageError(f'{self.command} needs --n')
        if self.command == 'compare':
            if q is None:
                raise UsageError('compare needs a numeric --q')
            if not self.g_values:
                raise UsageError('compare needs at least one --g j=value')
        bad = [j for j in self.g_values if not 1 <= j <= self.J]
        if bad:
            raise UsageError(f'--g orders must lie in 1..{self.J}; got {bad}')
        if self.suites:
            unknown = sorted(set(self.suites) - set(suite_names()))
            if unknown:
                raise UsageError(f'unknown suites {unknown}; choose from {suite_names()}')

    def context(self) -> QContext:
        return QContext.from_env(self.numeric_q or DEFAULT_Q, tol=self.tol, max_terms=self.max_terms)


@dataclasses.dataclass
class _Output:
    rows: list[dict[str, Any]]
    # The JSON document when it is not simply `rows`.
    document: Any = None
    lines: bool = False
    passed: bool = True


def _verify(config: RunConfig) -> _Output:
    ctx = config.context()
    settings = SuiteSettings(q=ctx.q, seed=config.seed, tol=ctx.tol, max_terms=ctx.max_terms)
    names = sorted(config.suites or suite_names())

    def work(name: str) -> SuiteReport:
        with timer(f'suite {name}', print_func=logger.info):
            return SuiteReport.from_identity(name, run_suite(name, settings))

    if config.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.workers) as pool:
            suites = list(pool.map(work, names))
    else:
        suites = [work(name) for name in names]
    report = RunReport.from_suites(suites, q=settings.q, seed=settings.seed, tol=settings.tol)
    for s in report.suites:
        if not s.passed:
            logger.error('suite %s failed %d of %d checks', s.name, s.failed, s.checked)
    rows = [{'name': s.name, 'identity': s.identity, 'checked': s.checked, 'failed': s.failed, 'passed': s.passed} for s in report.suites]
    return _Output(rows, document=report.model_dump(mode='json'), passed=report.passed)


def _gamma(config: RunConfig) -> _Output:
    ctx = config.context()
    rows = []
    for t in config.t:
        closed = gamma_q2_closed(ctx, t)
        integral = gamma_q2_integral(ctx, t)
        for a in config.a:
            c = c_factor(ctx, a, t)
            small = gamma_small_q2(ctx, a, t)
            rows.append(
                {
                    'q': ctx.q,
                    't': t,
                    'a': a,
                    'closed': closed,
                    'integral': integral,
                    'rel_diff': abs(closed - integral) / abs(closed),
                    'c_factor': c,
                    'gamma_small': small,
                    'bridge_rel_diff': abs(closed - c * small) / abs(closed),
                }
            )
    return _Output(rows)


def _moments(config: RunConfig) -> _Output:
    ctx = config.context()
    exact = pochhammer_qk(1, config.n, 2)
    row = {
        'q': ctx.q,
        'n': config.n,
        'moment': normalized_moment(ctx, config.n),
        'exact': str(exact),
        'expected': eval_float(exact, ctx.q),
    }
    return _Output([row])


def _pairings(config: RunConfig) -> _Output:
    rows = [{'pairs': a.to_json(), 'weight_exp': pairing_weight_exponent(a)} for a in enumerate_pairings(config.n)]
    return _Output(rows, lines=True)


def _lambda(config: RunConfig) -> _Output:
    table = LambdaTable(LambdaKind(config.kind))
    cmax = 3 if config.cmax is None else config.cmax
    dmax = 3 if config.dmax is None else config.dmax
    q = config.numeric_q
    rows = []
    for c in range(cmax + 1):
        for d in range(dmax + 1):
            f = table.get(c, d)
            row = {'kind': config.kind, 'c': c, 'd': d, 'num': str(f.num), 'den': str(f.den), 'limit_at_one': str(qrat_limit_at_one(f))}
            if q is not None:
                row['value'] = eval_float(f, q)
            rows.append(row)
    return _Output(rows)


def _spec(config: RunConfig, **kwargs) -> CouplingSpec:
    args = {'J': config.J, 'D': config.degree, 'M': config.M, 'cmax': config.cmax, 'max_pairs': config.max_pairs}
    if not config.exact:
        args['tol'] = config.context().tol
    args.update(kwargs)
    return CouplingSpec(**args)


def _expand(config: RunConfig) -> _Output:
    spec = _spec(config)
    mode = Exact() if config.exact else Float(config.numeric_q)
    series = expand_action(spec, mode, workers=config.workers)
    return _Output(series.to_json())


def _graphsum(config: RunConfig) -> _Output:
    cmax = 2 if config.cmax is None else config.cmax
    pairs = DEFAULT_GRAPH_PAIRS if config.max_pairs is None else config.max_pairs
    spec = _spec(config, M=2 * cmax, cmax=cmax, max_pairs=pairs)
    with timer('graph sum', print_func=logger.info):
        graphs = graph_sum(spec, workers=config.workers, progress=config.progress)
    cells = expand_cells(spec, workers=config.workers)
    q = config.numeric_q
    rows = []
    for (m, c), f in graphs.items():
        row = {'monomial': list(m), 'c': c, 'num': str(f.num), 'den': str(f.den), 'matches_series': cells.get((m, c)) == f}
        if q is not None:
            row['value'] = eval_float(f, q)
        rows.append(row)
    passed = all(r['matches_series'] for r in rows) and set(cells) == set(graphs)
    if not passed:
        logger.error('graph sum and series cells disagree')
    return _Output(rows, passed=passed)


def _compare(config: RunConfig) -> _Output:
    spec = _spec(config)
    report: IdentityReport = verify_against_integration(spec, config.numeric_q, config.g_values)
    row = {'passed': report.passed, **report.details}
    document = {'identity': report.theorem, 'passed': report.passed, 'details': report.details}
    return _Output([row], document=document, passed=report.passed)


COMMANDS = {
    'verify': _verify,
    'gamma': _gamma,
    'moments': _moments,
    'pairings': _pairings,
    'lambda': _lambda,
    'expand': _expand,
    'graphsum': _graphsum,
    'compare': _compare,
}


def _text(v: Any) -> str:
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, (list, dict)):
        return JsonLinesSerializer.serialize([v]).decode('utf-8').strip()
    return str(v)


def render(output: _Output, fmt: str) -> bytes:
    if fmt == 'csv':
        return CsvSerializer.serialize(output.rows)
    if fmt == 'text':
        return ''.join('  '.join(f'{k}={_text(v)}' for k, v in row.items()) + '\n' for row in output.rows).encode('utf-8')
    if output.lines:
        return JsonLinesSerializer.serialize(output.rows)
    return JsonSerializer.serialize(output.rows if output.document is None else output.document)


def run(config: RunConfig, out: BinaryIO | None = None) -> int:
    """
    Execute one command and write its report to ``out`` (standard output by default).

    Returns the exit code: 0 on success, 1 if a verification failed
    (or a computation did not converge), 2 on a usage error.
    """
    out = out or sys.stdout.buffer
    try:
        config.check()
        output = COMMANDS[config.command](config)
    except (UsageError, SizeGuardError, QDomainError) as e:
        print(f'qfeyn {config.command}: error: {e}', file=sys.stderr)
        return 2
    except ConvergenceError as e:
        logger.error('%s', e)
        print(f'qfeyn {config.command}: computation failed: {e}', file=sys.stderr)
        return 1
    out.write(render(output, config.output))
    out.flush()
    return 0 if output.passed else 1


def _parse_q(s: str) -> float | str:
    if s == 'exact':
        return s
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected a number in (0, 1) or "exact"; got {s!r}') from None


def _parse_coupling(s: str) -> tuple[int, float]:
    j, sep, g = s.partition('=')
    try:
        if not sep:
            raise ValueError
        return int(j), float(g)
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected j=value, e.g. 3=0.1; got {s!r}') from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='qfeyn', description='Exact and numeric q-calculus for Feynman-Jackson integrals.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('command', choices=list(COMMANDS), help='what to compute')
    parser.add_argument('--q', type=_parse_q, help='deformation parameter in (0, 1), or "exact"')
    parser.add_argument('--tol', type=float, help='truncation tolerance (default: $QFEYN_TOL or 1e-13)')
    parser.add_argument('--max-terms', type=int, help='term budget (default: $QFEYN_MAX_TERMS or 200000)')
    parser.add_argument('--J', type=int, default=4, help='largest interaction order')
    parser.add_argument('--D', type=int, default=2, help='largest g-degree')
    parser.add_argument('--M', type=int, default=8, help='q-adic truncation order of exact series')
    parser.add_argument('--cmax', type=int, help='largest number c of 2-valent vertices')
    parser.add_argument('--dmax', type=int, help='largest number d of interaction vertices (overrides --D)')
    parser.add_argument('--max-pairs', type=int, help='largest c + j')
    parser.add_argument('--n', type=int, help='size parameter of pairings and moments')
    parser.add_argument('--t', type=float, action='append', help='gamma argument; repeatable')
    parser.add_argument('--a', type=float, action='append', help='scale of the improper domain; repeatable')
    parser.add_argument('--kind', choices=['lambda', 'kappa'], default='lambda')
    parser.add_argument('--mode', choices=['exact', 'float'])
    parser.add_argument('--g', type=_parse_coupling, action='append', default=[], metavar='J=VALUE', help='coupling value; repeatable')
    parser.add_argument('--output', '-o', choices=['json', 'csv', 'text'], default='json')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--suite', action='append', dest='suites', help='run only this verification suite; repeatable')
    parser.add_argument('--workers', type=int, default=1)
    parser.add_argument('--progress', action='store_true', help='progress bar on stderr for graph enumeration')
    parser.add_argument('--log-level', help='debug, info, warning, ... (default: $QFEYN_LOG_LEVEL or warning)')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if k != 'g' and v is not None}
    fields['g_values'] = dict(args.g)
    try:
        return RunConfig(**fields)
    except ValidationError as e:
        raise UsageError(str(e)) from None


_console_handler = None


def _setup_logging(level: str | None) -> None:
    global _console_handler
    set_level(level or level_from_env())
    if _console_handler is None:
        _console_handler = add_console_handler()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _setup_logging(args.log_level)
        config = config_from_args(args)
    except ValueError as e:
        print(f'qfeyn: error: {e}', file=sys.stderr)
        return 2
    return run(config)
