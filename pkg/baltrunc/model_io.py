"""Model, report, state and signal files."""
import json
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd

from .analysis import Signal
from .errors import ModelParseError, ModelValidationError
from .reduction import ReductionReport
from .statespace import StateSpaceModel, validate

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.17g'
TIME_COLUMN = 'time'


def format_float(value):
    """17 significant digits; NaN/Inf become null."""
    value = float(value)
    if not math.isfinite(value):
        return 'null'
    return FLOAT_FORMAT % value


def _dump(value, indent=0):
    pad = '  ' * indent
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f'{pad}  {json.dumps(str(k))}: {_dump(v, indent + 1)}' for k, v in value.items()]
        return '{\n' + ',\n'.join(items) + f'\n{pad}}}'
    if isinstance(value, (list, tuple, np.ndarray)):
        return '[' + ', '.join(_dump(v, indent) for v in value) + ']'
    if value is None:
        return 'null'
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return json.dumps(value)


def dumps(data):
    """Deterministic JSON text with 17-digit floats."""
    return _dump(data) + '\n'


def _read_json(path, what):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ModelParseError(f"Cannot read {what} file {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelParseError(f"{path}:{e.lineno}: {e.msg}", line=e.lineno) from e


def model_to_dict(model):
    data = {'schema_version': SCHEMA_VERSION}
    if model.label is not None:
        data['label'] = model.label
    data.update({
        'n': model.n,
        'm': model.m,
        'p': model.p,
        'a': model.a.ravel(),
        'b': model.b.ravel(),
        'c': model.c.ravel(),
        'd': model.d.ravel(),
    })
    return data


def _int_field(data, name):
    value = data.get(name)
    numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
    if not numeric or not math.isfinite(value) or value != int(value) or value < 0:
        raise ModelParseError(f"Field '{name}' must be a non-negative integer, got {value!r}", field=name)
    return int(value)


def _array_field(data, name):
    value = data.get(name)
    if not isinstance(value, list):
        raise ModelParseError(f"Field '{name}' must be an array of numbers", field=name)
    try:
        return np.array([float('nan') if v is None else float(v) for v in value], dtype=float)
    except (TypeError, ValueError) as e:
        raise ModelParseError(f"Field '{name}' holds a non-numeric entry", field=name) from e


def model_from_dict(data):
    """Rebuild a model; violations of the shape rules raise ModelValidationError."""
    if not isinstance(data, dict):
        raise ModelParseError("Model file must hold a JSON object")
    version = data.get('schema_version')
    if version != SCHEMA_VERSION:
        raise ModelParseError(f"Unsupported schema_version {version!r} (expected {SCHEMA_VERSION})",
                              field='schema_version')
    n, m, p = (_int_field(data, name) for name in ('n', 'm', 'p'))
    expected = {'a': (n, n), 'b': (n, m), 'c': (p, n), 'd': (p, m)}
    arrays = {name: _array_field(data, name) for name in expected}

    violations = [f"{name}: expected {rows * cols} entries for {rows}x{cols}, got {arrays[name].size}"
                  for name, (rows, cols) in expected.items() if arrays[name].size != rows * cols]
    if violations:
        raise ModelValidationError(violations)

    label = data.get('label')
    if label is not None and not isinstance(label, str):
        raise ModelParseError("Field 'label' must be a string", field='label')
    model = StateSpaceModel(*(arrays[name].reshape(shape) for name, shape in expected.items()), label=label)
    violations = validate(model)
    if violations:
        raise ModelValidationError(violations)
    return model


def save_model(model, path):
    violations = validate(model)
    if violations:
        raise ModelValidationError(violations)
    Path(path).write_text(dumps(model_to_dict(model)), encoding='utf-8')
    logger.debug(f"Wrote order-{model.n} model to {path}")


def load_model(path):
    model = model_from_dict(_read_json(path, 'model'))
    logger.debug(f"Loaded order-{model.n} model from {path}")
    return model


def save_report(report, path):
    Path(path).write_text(dumps(report.to_dict()), encoding='utf-8')


def load_report(path):
    data = _read_json(path, 'report')
    try:
        return ReductionReport.from_dict(data)
    except (KeyError, TypeError, ValueError) as e:
        raise ModelParseError(f"Malformed report file {path}: {e}") from e


def load_state(path, n):
    """Initial state from a JSON array or an object with an 'x0' array."""
    data = _read_json(path, 'state')
    if isinstance(data, dict):
        data = data.get('x0')
    if not isinstance(data, list):
        raise ModelParseError(f"State file {path} must hold an array or {{\"x0\": [...]}}", field='x0')
    x0 = _array_field({'x0': data}, 'x0')
    if x0.size != n:
        raise ModelValidationError([f"x0: expected {n} entries, got {x0.size}"])
    if not np.all(np.isfinite(x0)):
        raise ModelValidationError(["x0: has non-finite entries"])
    return x0


def signal_to_frame(signal, prefix):
    columns = {TIME_COLUMN: signal.times}
    for k in range(signal.channels):
        columns[f'{prefix}{k + 1}'] = signal.samples[:, k]
    return pd.DataFrame(columns)


def save_signal(signal, path, prefix='y'):
    write_frame(signal_to_frame(signal, prefix), path)


def write_frame(frame, path):
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def save_hsv(hsv, path):
    write_frame(pd.DataFrame({'index': np.arange(1, len(hsv) + 1), 'hsv': np.asarray(hsv, dtype=float)}), path)


def load_signal(path):
    """Read a CSV with a uniform time column followed by one column per channel."""
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ModelParseError(f"Cannot parse signal file {path}: {e}") from e
    if frame.shape[1] < 2:
        raise ModelParseError(f"Signal file {path} needs a time column and at least one channel")
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError as e:
        raise ModelParseError(f"Signal file {path} holds non-numeric values") from e
    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        row, col = bad[0]
        # header is line 1
        raise ModelParseError(f"{path}:{row + 2}: non-finite value in column {frame.columns[col]!r}",
                              line=int(row + 2), field=str(frame.columns[col]))
    if values.shape[0] < 2:
        raise ModelParseError(f"Signal file {path} needs at least two samples")

    times = values[:, 0]
    steps = np.diff(times)
    dt = float(steps.mean())
    if not np.all(steps > 0):
        raise ModelParseError(f"Time column of {path} is not strictly increasing", field=TIME_COLUMN)
    if np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise ModelParseError(f"Time column of {path} is not uniform within 1e-9 relative",
                              field=TIME_COLUMN)
    return Signal(dt, values[:, 1:], float(times[0]))
