"""
Flask Backend API for LPLDE Frequency Comparisons
"""

import math
import time

from flask import Flask, jsonify, request
from flask_cors import CORS

from duffing_model import ModelSpec
from errors import InvalidSpecError, SweepConfigError
from sweep_cli import DEFAULT_METHODS, METHODS, SWEEPS, SweepConfig, all_rows_failed, show_report

app = Flask(__name__)
CORS(app)


def _clean(value):
    """JSON has no NaN: map non-finite floats to None, recursively"""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _config_from_request(data, mode, default_methods):
    methods = data.get('methods', default_methods)
    if isinstance(methods, str):
        methods = methods.split(',')
    return SweepConfig(
        mode=mode,
        omega=float(data.get('omega', 1.0)),
        mu=float(data.get('mu', 1.0)),
        amplitude=float(data.get('amplitude', 1.0)),
        min=data.get('min'),
        max=data.get('max'),
        steps=int(data.get('steps', 100)),
        methods=tuple(methods),
        engine_order=int(data.get('order', 3)),
        engine_lambda=data.get('lambda'),
        use_printed_pms=bool(data.get('use_printed_pms', False)),
    )


@app.route('/api/show', methods=['POST'])
def show():
    """All methods at one (omega, mu, A)"""
    try:
        data = request.get_json(silent=True) or {}
        config = _config_from_request(data, 'AMPLITUDE', METHODS)
        spec = ModelSpec(config.omega, config.mu, config.amplitude, order=config.engine_order)

        start_time = time.time()
        report = show_report(spec, config)
        execution_time = time.time() - start_time

        return jsonify({
            'success': True,
            'report': _clean(report),
            'execution_time': float(execution_time)
        })

    except (SweepConfigError, InvalidSpecError, ValueError, TypeError) as e:
        return jsonify({
            'success': False,
            'error': str(e)
        }), 400

    except Exception as e:
        import traceback
        traceback.print_exc()
        return jsonify({
            'success': False,
            'error': str(e)
        }), 500


@app.route('/api/sweep', methods=['POST'])
def sweep():
    """Run one sweep and return its rows"""
    try:
        data = request.get_json(silent=True) or {}
        mode = str(data.get('mode', 'AMPLITUDE')).upper()
        config = _config_from_request(data, mode, DEFAULT_METHODS)

        start_time = time.time()
        table = SWEEPS[config.mode](config)
        execution_time = time.time() - start_time

        return jsonify({
            'success': True,
            'mode': config.mode.value,
            'columns': list(table.columns),
            'rows': _clean(table.to_dict('records')),
            'all_failed': all_rows_failed(table),
            'execution_time': float(execution_time)
        })

    except (SweepConfigError, InvalidSpecError, ValueError, TypeError) as e:
        return jsonify({
            'success': False,
            'error': str(e)
        }), 400

    except Exception as e:
        import traceback
        traceback.print_exc()
        return jsonify({
            'success': False,
            'error': str(e)
        }), 500


if __name__ == '__main__':
    app.run(debug=True, host='0.0.0.0', port=5000)
