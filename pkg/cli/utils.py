import csv
import io
import logging
from pathlib import Path

import numpy as np
from rest_framework.renderers import JSONRenderer

from common.constants import CSV_FORMAT
from common.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format(float(value), CSV_FORMAT)
    return str(value)


def rows_to_csv(rows, header=None):
    """rows is a list of dicts (header is the union of their keys) or of sequences."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if rows and isinstance(rows[0], dict):
        header = header or list(dict.fromkeys(key for row in rows for key in row))
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(row.get(key)) for key in header])
    else:
        if header:
            writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def array_to_csv(values, header=None):
    return rows_to_csv([list(map(float, row)) for row in np.atleast_2d(values)], header)


def to_json(payload):
    return JSONRenderer().render(payload).decode()


def read_csv_array(path):
    """Numeric CSV as a 2-D float array; a non-numeric first row is taken as a header."""
    path = Path(path)
    try:
        with path.open(newline="") as handle:
            rows = [row for row in csv.reader(handle) if row]
    except OSError as e:
        logger.error(f"Cannot read {path}: {str(e)}")
        raise ConfigurationError(f"cannot read {path}") from e
    if rows:
        try:
            float(rows[0][0])
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise ConfigurationError(f"{path} holds no points")
    try:
        values = np.array([[float(v) for v in row] for row in rows])
    except ValueError as e:
        raise ConfigurationError(f"{path}: {str(e)}") from e
    if values.ndim != 2:
        raise ConfigurationError(f"{path}: rows have different lengths")
    return values


def write_output(text, output, stdout):
    if output:
        Path(output).write_text(text)
        logger.info(f"Wrote {output}")
    else:
        stdout.write(text, ending="" if text.endswith("\n") else "\n")


def point_header(dim, polar=False):
    """`x1,...,xd` for cartesian rows, `radius,y1,...,yd` for polar ones."""
    if polar:
        return ["radius"] + [f"y{i}" for i in range(1, dim + 1)]
    return [f"x{i}" for i in range(1, dim + 1)]
