"""
Parameter Sweeps Comparing LP, LPLDE and the Exact Duffing Frequency

Subcommands:
    sweep-amplitude   Omega^2 against the amplitude (fixed omega, mu)
    sweep-mu          period against mu (fixed omega, A)
    sweep-error       relative period error against mu > 0
    show              every method at a single (omega, mu, A)

Sweeps are written as CSV: param,exact,<method>...,err_<method>...,flags
"""

import argparse
import logging
import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

import closed_forms
import exact_oracle
import lple_engine
from duffing_model import FrequencyResult, MethodTag, ModelSpec, ORDER_CAP
from errors import InvalidSpecError, LpldeError, SweepConfigError

logger = logging.getLogger(__name__)

METHODS = ('LP1', 'LP3', 'LPLDE_PMS', 'LPLDE_PRINTED', 'ENGINE_N', 'EXACT')
DEFAULT_METHODS = ('LP1', 'LP3', 'LPLDE_PMS', 'ENGINE_N')

DEFAULT_OMEGA = 1.0
DEFAULT_MU = 1.0
DEFAULT_AMPLITUDE = 1.0
DEFAULT_ORDER = 3
DEFAULT_STEPS = 100

CSV_FLOAT_FORMAT = '%.12g'

FLAG_PMS_FALLBACK = 'pms_fallback_lambda0'
FLAG_UNBOUNDED = 'unbounded'
FLAG_ORACLE_FAILED = 'oracle_failed'
FLAG_INVALID_SPEC = 'invalid_spec'

EXIT_OK = 0
EXIT_INVALID_CONFIG = 1
EXIT_ALL_FAILED = 2


class SweepMode(str, Enum):
    AMPLITUDE = 'AMPLITUDE'
    MU = 'MU'
    ERROR = 'ERROR'


DEFAULT_RANGES = {
    SweepMode.AMPLITUDE: (0.1, 10.0),
    SweepMode.MU: (-0.99, 10.0),
    SweepMode.ERROR: (0.1, 10.0),
}


@dataclass(frozen=True)
class SweepConfig:
    """
    One sweep: the swept parameter follows the mode (A for AMPLITUDE, mu
    otherwise), the other two model parameters stay fixed.
    """
    mode: SweepMode
    omega: float = DEFAULT_OMEGA
    mu: float = DEFAULT_MU
    amplitude: float = DEFAULT_AMPLITUDE
    min: float = None
    max: float = None
    steps: int = DEFAULT_STEPS
    methods: Tuple[str, ...] = DEFAULT_METHODS
    engine_order: int = DEFAULT_ORDER
    engine_lambda: Optional[float] = None
    use_printed_pms: bool = False
    output_path: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'mode', SweepMode(self.mode))
        low, high = DEFAULT_RANGES[self.mode]
        if self.min is None:
            object.__setattr__(self, 'min', low)
        if self.max is None:
            object.__setattr__(self, 'max', high)
        object.__setattr__(self, 'methods', tuple(m.strip().upper() for m in self.methods))
        self.validate()

    def validate(self):
        if self.steps < 2:
            raise SweepConfigError(f"steps must be at least 2, got {self.steps}")
        if not self.min < self.max:
            raise SweepConfigError(f"min must be below max, got [{self.min}, {self.max}]")
        if not self.methods:
            raise SweepConfigError("at least one method must be selected")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise SweepConfigError(f"unknown methods {unknown}, choose from {list(METHODS)}")
        if not 0 <= self.engine_order <= ORDER_CAP:
            raise SweepConfigError(f"order must lie in [0, {ORDER_CAP}], got {self.engine_order}")
        if self.omega <= 0:
            raise SweepConfigError(f"omega must be positive, got {self.omega}")
        if self.engine_lambda is not None and self.engine_lambda < 0:
            raise SweepConfigError(f"lambda must be non-negative, got {self.engine_lambda}")
        if self.mode is SweepMode.AMPLITUDE and self.min <= 0:
            raise SweepConfigError("amplitude range must be positive")
        if self.mode is not SweepMode.AMPLITUDE and self.amplitude <= 0:
            raise SweepConfigError(f"amplitude must be positive, got {self.amplitude}")
        if self.mode is SweepMode.ERROR and self.min < 0:
            raise SweepConfigError("error sweeps cover mu >= 0 only")

    @property
    def method_columns(self) -> Tuple[str, ...]:
        """Selected methods with a column of their own (exact is always present)"""
        return tuple(m for m in self.methods if m != 'EXACT')

    def grid(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)

    def spec_at(self, param: float) -> ModelSpec:
        if self.mode is SweepMode.AMPLITUDE:
            return ModelSpec(self.omega, self.mu, param, order=self.engine_order)
        return ModelSpec(self.omega, param, self.amplitude, order=self.engine_order)


def method_frequency(method: str, spec: ModelSpec,
                     config: SweepConfig) -> Tuple[FrequencyResult, List[str]]:
    """Omega^2 of one method at one point, with the flags it raised"""
    flags = []
    lp_spec = spec.with_lambda(0.0)

    if method == 'LP1':
        return closed_forms.omega2_order1(lp_spec), flags
    if method == 'LP3':
        return closed_forms.omega2_order3(lp_spec), flags

    if method in ('LPLDE_PMS', 'LPLDE_PRINTED'):
        if spec.mu < 0:
            return closed_forms.omega2_order3(lp_spec), [FLAG_PMS_FALLBACK]
        if method == 'LPLDE_PRINTED' or config.use_printed_pms:
            return closed_forms.omega2_pms_printed(spec), flags
        return closed_forms.omega2_pms_derived(spec), flags

    if method == 'ENGINE_N':
        engine_spec = spec.with_order(config.engine_order)
        if config.engine_lambda is not None:
            state = lple_engine.run(engine_spec.with_lambda(config.engine_lambda))
            return lple_engine.frequency_squared(state), flags
        result = lple_engine.engine_pms_frequency(engine_spec)
        if result.method_tag is MethodTag.LP and spec.mu != 0:
            flags.append(FLAG_PMS_FALLBACK)
        return result, flags

    raise SweepConfigError(f"unknown method {method!r}")


def _relative_error(value: float, reference: float) -> float:
    if math.isnan(value) or math.isnan(reference):
        return math.nan
    return abs(value - reference) / abs(reference)


def compute_row(config: SweepConfig, param: float) -> Tuple[Dict, bool]:
    """
    One CSV row. AMPLITUDE rows hold Omega^2 and the relative error of Omega;
    MU and ERROR rows hold periods and their relative error.

    Returns:
        Tuple of (row, failed) where failed means no exact reference
    """
    columns = config.method_columns
    row = {'param': float(param), 'exact': math.nan}
    row.update({m: math.nan for m in columns})
    row.update({f'err_{m}': math.nan for m in columns})
    flags: List[str] = []

    def finish(failed: bool) -> Tuple[Dict, bool]:
        row['flags'] = ';'.join(dict.fromkeys(flags))
        return row, failed

    try:
        spec = config.spec_at(param)
    except InvalidSpecError as e:
        logger.warning("param %g: %s", param, e)
        flags.append(FLAG_INVALID_SPEC)
        return finish(True)

    if not spec.is_bounded:
        flags.append(FLAG_UNBOUNDED)
        return finish(True)

    in_frequency = config.mode is SweepMode.AMPLITUDE
    failed = False
    try:
        exact = exact_oracle.exact_period(spec)
        row['exact'] = exact.omega ** 2 if in_frequency else exact.period
        exact_omega = exact.omega
    except LpldeError as e:
        logger.warning("param %g: exact oracle failed: %s", param, e)
        flags.append(FLAG_ORACLE_FAILED)
        exact_omega = math.nan
        failed = True

    for method in columns:
        try:
            result, method_flags = method_frequency(method, spec, config)
        except LpldeError as e:
            logger.warning("param %g: %s failed: %s", param, method, e)
            flags.append(f'failed_{method}')
            continue
        flags.extend(method_flags)
        if result.is_negative:
            flags.append(f'negative_omega2_{method}')
            continue
        if in_frequency:
            row[method] = result.omega_squared
            row[f'err_{method}'] = _relative_error(result.omega, exact_omega)
        else:
            row[method] = result.period
            row[f'err_{method}'] = _relative_error(result.period, row['exact'])
    return finish(failed)


def _sweep(config: SweepConfig, progress: bool = False) -> pd.DataFrame:
    columns = (['param', 'exact'] + list(config.method_columns)
               + [f'err_{m}' for m in config.method_columns] + ['flags'])
    rows = []
    failures = 0
    for param in tqdm(config.grid(), desc=config.mode.value.lower(), disable=not progress):
        row, failed = compute_row(config, param)
        rows.append(row)
        failures += failed
    if failures:
        logger.warning("%d of %d rows have no exact reference", failures, len(rows))
    return pd.DataFrame(rows, columns=columns)


def _require_mode(config: SweepConfig, mode: SweepMode):
    if config.mode is not mode:
        raise SweepConfigError(f"expected a {mode.value} sweep, got {config.mode.value}")


def sweep_amplitude(config: SweepConfig, progress: bool = False) -> pd.DataFrame:
    """Omega^2 against the amplitude"""
    _require_mode(config, SweepMode.AMPLITUDE)
    return _sweep(config, progress)


def sweep_mu(config: SweepConfig, progress: bool = False) -> pd.DataFrame:
    """Period against mu; mu < 0 rows fall back to lambda = 0 for PMS methods"""
    _require_mode(config, SweepMode.MU)
    return _sweep(config, progress)


def sweep_error(config: SweepConfig, progress: bool = False) -> pd.DataFrame:
    """Relative period error against mu >= 0"""
    _require_mode(config, SweepMode.ERROR)
    return _sweep(config, progress)


SWEEPS = {
    SweepMode.AMPLITUDE: sweep_amplitude,
    SweepMode.MU: sweep_mu,
    SweepMode.ERROR: sweep_error,
}


def all_rows_failed(table: pd.DataFrame) -> bool:
    return bool(table['exact'].isna().all())


def write_csv(table: pd.DataFrame, output_path: Optional[str] = None) -> str:
    """Write the sweep table (stdout when no path is given) and return the text"""
    text = table.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, na_rep='nan',
                        lineterminator='\n')
    if output_path:
        with open(output_path, 'w', newline='') as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return text


def show_report(spec: ModelSpec, config: SweepConfig) -> Dict:
    """Every method and every exact route at one point"""
    report = {
        'spec': {'omega': spec.omega, 'mu': spec.mu, 'amplitude': spec.amplitude,
                 'order': config.engine_order},
        'exact': {},
        'methods': {},
        'pms_lambda': None,
        'pms_lambda_numeric': None,
    }

    exact_omega = math.nan
    if spec.is_bounded:
        routes = {
            'elliptic': exact_oracle.period_elliptic,
            'quadrature': exact_oracle.period_quadrature,
            'ode': exact_oracle.period_ode,
        }
        for name, route in routes.items():
            try:
                result = route(spec)
                report['exact'][name] = {'period': result.period, 'est_error': result.est_error}
            except LpldeError as e:
                logger.debug("%s route unavailable: %s", name, e)
        exact_omega = exact_oracle.omega_exact(spec)
        report['exact']['omega_squared'] = exact_omega ** 2
        report['exact']['period'] = 2 * math.pi / exact_omega

    if spec.mu >= 0:
        report['pms_lambda'] = closed_forms.pms_lambda(spec)
    for method in config.method_columns:
        result, flags = method_frequency(method, spec, config)
        if method == 'ENGINE_N' and config.engine_lambda is None and not flags:
            report['pms_lambda_numeric'] = result.lambda_used
        report['methods'][method] = {
            'omega_squared': result.omega_squared,
            'period': result.period,
            'lambda': result.lambda_used,
            'tag': result.method_tag.value,
            'err_omega_squared': _relative_error(result.omega_squared, exact_omega ** 2),
            'err_period': _relative_error(result.period, 2 * math.pi / exact_omega),
            'flags': flags,
        }
    return report


def print_report(report: Dict):
    spec = report['spec']
    print(f"\n LPLDE comparison: omega = {spec['omega']:g}, mu = {spec['mu']:g}, "
          f"A = {spec['amplitude']:g}, engine order {spec['order']}")

    exact = report['exact']
    if not exact:
        print("   Exact: motion is unbounded (omega^2 + mu A^2 <= 0)")
    for name in ('elliptic', 'quadrature', 'ode'):
        if name in exact:
            print(f"   T exact ({name:<10}): {exact[name]['period']:.12f}"
                  f"  (+/- {exact[name]['est_error']:.2e})")
    if 'omega_squared' in exact:
        print(f"   Omega^2 exact        : {exact['omega_squared']:.12f}")

    if report['pms_lambda'] is not None:
        print(f"   PMS lambda (closed)  : {report['pms_lambda']:.12f}")
    if report['pms_lambda_numeric'] is not None:
        print(f"   PMS lambda (numeric) : {report['pms_lambda_numeric']:.12f}")

    print("   --------------------------------------")
    print(f"   {'method':<14}{'Omega^2':>16}{'T':>16}{'err Omega^2':>14}{'err T':>12}  flags")
    for name, m in report['methods'].items():
        print(f"   {name:<14}{m['omega_squared']:>16.10f}{m['period']:>16.10f}"
              f"{m['err_omega_squared']:>13.4%}{m['err_period']:>12.4%}  {';'.join(m['flags'])}")


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as invalid configuration instead of exiting"""

    def error(self, message):
        raise SweepConfigError(message)


def _method_list(text: str) -> Tuple[str, ...]:
    return tuple(m for m in (part.strip().upper() for part in text.split(',')) if m)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument('--omega', type=float, default=DEFAULT_OMEGA)
    common.add_argument('--mu', type=float, default=DEFAULT_MU)
    common.add_argument('--amplitude', type=float, default=DEFAULT_AMPLITUDE)
    common.add_argument('--min', type=float, default=None, help='start of the swept range')
    common.add_argument('--max', type=float, default=None, help='end of the swept range')
    common.add_argument('--steps', type=int, default=DEFAULT_STEPS)
    common.add_argument('--order', type=int, default=DEFAULT_ORDER, help='engine order N')
    common.add_argument('--methods', type=_method_list, default=None,
                        help=f"comma separated subset of {','.join(METHODS)}")
    common.add_argument('--lambda', dest='engine_lambda', type=float, default=None,
                        help='fixed lambda for ENGINE_N instead of the numeric PMS point')
    common.add_argument('--use-printed-pms', action='store_true',
                        help='LPLDE_PMS uses the 64 a^2 numerator form')
    common.add_argument('--out', default=None, help='CSV path (stdout when omitted)')
    common.add_argument('--progress', action='store_true', help='progress bar on stderr')
    common.add_argument('-v', '--verbose', action='store_true')

    parser = _Parser(prog='sweep_cli', description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)
    sub.add_parser('sweep-amplitude', parents=[common], help='Omega^2 against A')
    sub.add_parser('sweep-mu', parents=[common], help='period against mu')
    sub.add_parser('sweep-error', parents=[common], help='period error against mu > 0')
    sub.add_parser('show', parents=[common], help='all methods at one point')
    return parser


COMMAND_MODES = {
    'sweep-amplitude': SweepMode.AMPLITUDE,
    'sweep-mu': SweepMode.MU,
    'sweep-error': SweepMode.ERROR,
    'show': SweepMode.AMPLITUDE,
}


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    methods = args.methods
    if methods is None:
        methods = METHODS if args.command == 'show' else DEFAULT_METHODS
    return SweepConfig(
        mode=COMMAND_MODES[args.command],
        omega=args.omega,
        mu=args.mu,
        amplitude=args.amplitude,
        min=args.min,
        max=args.max,
        steps=args.steps,
        methods=methods,
        engine_order=args.order,
        engine_lambda=args.engine_lambda,
        use_printed_pms=args.use_printed_pms,
        output_path=args.out,
    )


def main(argv: Sequence[str] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SweepConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr)

    try:
        config = config_from_args(args)
        if args.command == 'show':
            spec = ModelSpec(config.omega, config.mu, config.amplitude,
                             order=config.engine_order)
            print_report(show_report(spec, config))
            return EXIT_OK
        table = SWEEPS[config.mode](config, progress=args.progress)
    except (SweepConfigError, InvalidSpecError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_CONFIG

    write_csv(table, config.output_path)
    if all_rows_failed(table):
        logger.error("every row failed")
        return EXIT_ALL_FAILED
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
