import hashlib
import logging
import math
from typing import IO, Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
import yaml


def format_float(value: float, digits: int = 17) -> str:
    """
    Format a float with a fixed number of significant digits.

    Args:
        value (float): Number to format
        digits (int): Significant digits

    Returns:
        String that parses back to the same float when digits >= 17
    """
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return f"{value:.{digits}g}"


def to_builtin(value: Any) -> Any:
    """
    Convert numpy scalars/arrays and nested containers to plain Python objects.

    Args:
        value: Any value produced by the library

    Returns:
        Structure made of dict, list, float, int, str, bool and None
    """
    if isinstance(value, dict):
        return {str(key): to_builtin(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, pd.DataFrame):
        return to_builtin(value.to_dict(orient='records'))
    return value


def digest_rows(rows: Iterable[Iterable[float]]) -> str:
    """
    SHA-256 digest of a family's coordinates in 17-digit text form.

    Args:
        rows: Vectors, one per row

    Returns:
        Hex digest that identifies the input of a run
    """
    text = '\n'.join(','.join(format_float(float(x)) for x in row) for row in rows)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def yaml_float(value: float, digits: int = 17) -> str:
    """YAML 1.1 spelling of a float: always a mantissa dot, .inf/.nan for specials."""
    if math.isnan(value):
        return '.nan'
    if math.isinf(value):
        return '.inf' if value > 0 else '-.inf'
    text = format_float(value, digits)
    mantissa, _, exponent = text.partition('e')
    if '.' not in mantissa:
        mantissa += '.0'
    return f"{mantissa}e{exponent}" if exponent else mantissa


class ReportDumper(yaml.SafeDumper):
    """SafeDumper writing floats with 17 significant digits."""


def _represent_float(dumper: yaml.SafeDumper, value: float):
    return dumper.represent_scalar('tag:yaml.org,2002:float', yaml_float(float(value)))


ReportDumper.add_representer(float, _represent_float)


def dump_yaml(data: Any, stream: Optional[IO[str]] = None) -> Optional[str]:
    """
    Serialize a document with sorted keys and round-trip float precision.

    Args:
        data: any structure; numpy and pandas values are converted first
        stream: optional text stream; when omitted the YAML text is returned
    """
    return yaml.dump(to_builtin(data), stream, Dumper=ReportDumper, sort_keys=True,
                     default_flow_style=None, allow_unicode=True)


def setup_logging(level: str = 'INFO', log_file: Optional[str] = None) -> None:
    """
    Set up logging configuration.

    Args:
        level (str): Log level name
        log_file (str): Optional log file name
    """
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def summarize_margins(frame: pd.DataFrame, by: List[str], column: str = 'margin') -> pd.DataFrame:
    """
    Minimum, median and count of a margin column per group.

    Args:
        frame (DataFrame): One row per evaluated check
        by (List[str]): Grouping columns
        column (str): Margin column

    Returns:
        DataFrame indexed by the grouping columns
    """
    if frame.empty:
        return pd.DataFrame(columns=by + ['min_margin', 'median_margin', 'evaluations'])
    grouped = frame.groupby(by, dropna=False)[column]
    summary = grouped.agg(['min', 'median', 'count']).reset_index()
    return summary.rename(columns={'min': 'min_margin', 'median': 'median_margin', 'count': 'evaluations'})


def merge_dicts(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge override into a copy of base."""
    merged = dict(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_dicts(merged[key], value)
        else:
            merged[key] = value
    return merged
