"""
Reading and writing vector families.

Two formats are accepted:

* a YAML document with fields ``dim``, ``count`` and ``vectors`` (one row per
  vector, either a list of numbers or a comma-separated string);
* a table with one vector per line, coordinates separated by commas or
  whitespace; ``#`` starts a comment.
"""

import io
import logging
import re
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
import pandas as pd
import yaml

from .exceptions import InputParseError, InvalidFamily
from .linalg import VectorFamily
from .utils import dump_yaml, format_float

logger = logging.getLogger(__name__)

YAML_SUFFIXES = ('.yaml', '.yml')
DOCUMENT_FIELDS = ('dim', 'count', 'vectors')
TABLE_SEPARATOR = r'[,\s]+'


def _looks_like_document(text: str) -> bool:
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        return stripped.split(':', 1)[0].strip() in DOCUMENT_FIELDS + ('---',) or stripped == '---'
    return False


def _mapping_lines(text: str) -> dict:
    """1-based line of every top-level key and of every item under 'vectors'."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return {}
    lines = {}
    if isinstance(root, yaml.MappingNode):
        for key_node, value_node in root.value:
            lines[key_node.value] = key_node.start_mark.line + 1
            if key_node.value == 'vectors' and isinstance(value_node, yaml.SequenceNode):
                lines['rows'] = [item.start_mark.line + 1 for item in value_node.value]
    return lines


def _parse_row(row: Any, index: int, line: Optional[int]) -> List[float]:
    cells = row.split(',') if isinstance(row, str) else row
    if not isinstance(cells, (list, tuple)):
        raise InputParseError(f"vector {index} must be a list or comma-separated string", line, 'vectors')
    values = []
    for position, cell in enumerate(cells):
        try:
            values.append(float(cell))
        except (TypeError, ValueError):
            raise InputParseError(f"vector {index}, coordinate {position}: cannot parse {cell!r} as a number",
                                  line, 'vectors') from None
    return values


def parse_document(text: str) -> VectorFamily:
    """
    Parse a YAML family document.

    Raises:
        InputParseError: with the line and field of the first problem
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise InputParseError(f"invalid YAML: {getattr(e, 'problem', e)}",
                              mark.line + 1 if mark else None) from e
    if not isinstance(data, dict):
        raise InputParseError("document must be a mapping with dim, count and vectors", 1)

    lines = _mapping_lines(text)
    for name in DOCUMENT_FIELDS:
        if name not in data:
            raise InputParseError("missing required field", None, name)
    for name in ('dim', 'count'):
        if not isinstance(data[name], int) or isinstance(data[name], bool) or data[name] < 1:
            raise InputParseError(f"must be a positive integer, got {data[name]!r}", lines.get(name), name)
    if not isinstance(data['vectors'], list):
        raise InputParseError("must be a list of vectors", lines.get('vectors'), 'vectors')

    row_lines = lines.get('rows', [])
    rows = []
    for index, row in enumerate(data['vectors']):
        line = row_lines[index] if index < len(row_lines) else lines.get('vectors')
        values = _parse_row(row, index, line)
        if len(values) != data['dim']:
            raise InputParseError(f"vector {index} has {len(values)} coordinates, expected dim={data['dim']}",
                                  line, 'vectors')
        rows.append(values)
    if len(rows) != data['count']:
        raise InputParseError(f"count={data['count']} but {len(rows)} vectors given", lines.get('count'), 'count')
    try:
        return VectorFamily(np.array(rows, dtype=float))
    except InvalidFamily as e:
        raise InputParseError(str(e), lines.get('vectors'), 'vectors') from e


def _cell_value(cell: Any) -> float:
    try:
        return float(cell)
    except (TypeError, ValueError):
        return np.nan


def parse_table(text: str) -> VectorFamily:
    """
    Parse a table with one vector per line.

    Raises:
        InputParseError: naming the line and column of the first bad cell
    """
    numbered = [(number, line.split('#', 1)[0].strip()) for number, line in enumerate(text.splitlines(), 1)]
    numbered = [(number, line) for number, line in numbered if line]
    if not numbered:
        raise InputParseError("no vectors found", 1)

    width = max(len(re.split(TABLE_SEPARATOR, line)) for _, line in numbered)
    try:
        frame = pd.read_csv(io.StringIO('\n'.join(line for _, line in numbered)), header=None,
                            names=list(range(width)), sep=TABLE_SEPARATOR, engine='python', dtype=str)
    except pd.errors.ParserError as e:
        raise InputParseError(f"malformed table: {e}") from e
    frame.index = [number for number, _ in numbered]

    numeric = frame.apply(lambda column: column.map(_cell_value))
    bad = numeric.isna()
    if bad.to_numpy().any():
        line, column = next((idx, col) for idx, row in bad.iterrows() for col in bad.columns if row[col])
        cell = frame.at[line, column]
        if pd.isna(cell):
            raise InputParseError(f"missing coordinate {column}", int(line), f"column {column}")
        raise InputParseError(f"cannot parse {cell!r} as a number", int(line), f"column {column}")
    try:
        return VectorFamily(numeric.to_numpy(dtype=float))
    except InvalidFamily as e:
        raise InputParseError(str(e)) from e


def read_family(path: Union[str, Path]) -> VectorFamily:
    """
    Read a vector family from a YAML document or a table.

    Args:
        path: file path; '-' is not supported here, the CLI handles stdin

    Returns:
        VectorFamily
    """
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    return parse_family_text(text, yaml_hint=path.suffix.lower() in YAML_SUFFIXES)


def parse_family_text(text: str, yaml_hint: bool = False) -> VectorFamily:
    """Parse family text, choosing the format from the hint or the first content line."""
    if yaml_hint or _looks_like_document(text):
        family = parse_document(text)
    else:
        family = parse_table(text)
    logger.debug("Parsed family with m=%d, d=%d", family.count, family.dim)
    return family


def family_document(family: VectorFamily) -> dict:
    return {'dim': family.dim, 'count': family.count, 'vectors': family.to_list()}


def write_family(family: VectorFamily, path: Union[str, Path], fmt: Optional[str] = None) -> Path:
    """
    Write a family so that read_family returns an identical family.

    Args:
        family (VectorFamily): the family
        path: destination
        fmt (str): 'yaml' or 'table'; inferred from the suffix when omitted

    Returns:
        The written path
    """
    path = Path(path)
    if fmt is None:
        fmt = 'yaml' if path.suffix.lower() in YAML_SUFFIXES else 'table'
    if fmt == 'yaml':
        text = dump_yaml(family_document(family))
    elif fmt == 'table':
        text = ''.join(','.join(format_float(float(x)) for x in row) + '\n' for row in family.vectors)
    else:
        raise ValueError(f"Unknown family format '{fmt}'")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding='utf-8')
    return path
