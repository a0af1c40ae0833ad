"""Touchstone v1 (.sNp) reader and writer.

Only scattering parameters are handled.  The classic v1 layout rules apply:
an option line ``# <unit> S <RI|MA|DB> R <resistance>``, ``!`` comments,
2-port data in S11 S21 S12 S22 order on one line per frequency, and
row-major wrapped matrices for three ports and up with at most four complex
pairs per line.  Version-2 files (``[Version]`` keywords) are rejected.

Port convention used throughout this package: port 1 is the RF input,
port 2 the RF output, and any further port sits across one series junction
branch of the exported block (one single-ended port per branch, referenced
to ground).  Attaching the branch means terminating that port with the
branch impedance; see device.close_junction_ports.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

import numpy as np

from .netcore import FrequencyGrid, Network

FREQ_MULTIPLIER = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
FORMATS = ("ri", "ma", "db")
_UNSUPPORTED_PARAMS = ("y", "z", "g", "h")
_SUFFIX_RE = re.compile(r"\.s(\d+)p$", re.IGNORECASE)

# Matrices with more columns than this wrap onto continuation lines.
_PAIRS_PER_LINE = 4


class TouchstoneError(ValueError):
    """Malformed Touchstone content; carries the 1-based source line."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class TouchstoneDocument:
    """Parsed .sNp content: option-line settings, comments, and the network."""

    unit: str
    fmt: str
    resistance: float
    comments: tuple
    data: Network

    def __post_init__(self):
        if self.unit not in FREQ_MULTIPLIER:
            raise ValueError(f"unknown frequency unit {self.unit!r}")
        if self.fmt not in FORMATS:
            raise ValueError(f"unknown format {self.fmt!r}; use one of {FORMATS}")
        if not self.resistance > 0.0:
            raise ValueError("reference resistance must be positive")
        object.__setattr__(self, "comments", tuple(self.comments))

    @property
    def n_ports(self) -> int:
        return self.data.n_ports


def _decode(fmt: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if fmt == "ri":
        return a + 1j * b
    if fmt == "ma":
        return a * np.exp(1j * np.deg2rad(b))
    # db
    return 10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))


def _encode(fmt: str, s: np.ndarray):
    if fmt == "ri":
        return s.real, s.imag
    mag = np.abs(s)
    ang = np.rad2deg(np.angle(s))
    if fmt == "ma":
        return mag, ang
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(mag), ang


def _parse_option_line(tokens: list, line_no: int):
    unit = "ghz"
    fmt = "ma"
    resistance = 50.0
    i = 0
    while i < len(tokens):
        t = tokens[i].lower()
        if t in FREQ_MULTIPLIER:
            unit = t
        elif t in FORMATS:
            fmt = t
        elif t == "s":
            pass
        elif t in _UNSUPPORTED_PARAMS:
            raise TouchstoneError(
                f"parameter type {t.upper()!r} is not supported; only S", line_no
            )
        elif t == "r":
            if i + 1 >= len(tokens):
                raise TouchstoneError("option 'R' without a resistance value", line_no)
            try:
                resistance = float(tokens[i + 1])
            except ValueError:
                raise TouchstoneError(
                    f"invalid resistance {tokens[i + 1]!r}", line_no
                ) from None
            i += 1
        else:
            raise TouchstoneError(f"unknown option token {tokens[i]!r}", line_no)
        i += 1
    return unit, fmt, resistance


def _floats(tokens: list, line_no: int) -> list:
    out = []
    for t in tokens:
        try:
            out.append(float(t))
        except ValueError:
            raise TouchstoneError(f"invalid number {t!r}", line_no) from None
    return out


def _expected_chunks(n_ports: int):
    """Per frequency point: (row, first-column, n_pairs) of each data line.

    One- and two-port files keep the whole point on a single line; larger
    matrices are row-major with at most four pairs per line.
    """
    if n_ports <= 2:
        return [(0, 0, n_ports * n_ports)]
    chunks = []
    for row in range(n_ports):
        for col in range(0, n_ports, _PAIRS_PER_LINE):
            chunks.append((row, col, min(_PAIRS_PER_LINE, n_ports - col)))
    return chunks


def parse_touchstone(text: str, n_ports: int) -> TouchstoneDocument:
    """Parse v1 .sNp content for a known port count.

    Raises TouchstoneError (with 1-based line numbers) on malformed input.
    """
    if n_ports < 1:
        raise ValueError("n_ports must be >= 1")
    option = None
    option_line_no = None
    comments = []
    data_rows = []  # (line_no, [floats])
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw
        if "!" in line:
            comment = line[line.index("!") + 1 :].strip()
            if comment:
                comments.append(comment)
            line = line[: line.index("!")]
        line = line.strip()
        if not line:
            continue
        if line.startswith("["):
            raise TouchstoneError(
                "Touchstone v2 keyword found; only v1 files are supported", line_no
            )
        if line.startswith("#"):
            if option is not None:
                raise TouchstoneError("second option line", line_no)
            option = _parse_option_line(line[1:].split(), line_no)
            option_line_no = line_no
            continue
        if option is None:
            raise TouchstoneError(
                "data before option line (missing '# <unit> S <fmt> R <n>')", line_no
            )
        data_rows.append((line_no, _floats(line.split(), line_no)))
    if option is None:
        raise TouchstoneError("missing option line '# <unit> S <fmt> R <n>'")
    unit, fmt, resistance = option

    chunks = _expected_chunks(n_ports)
    freqs = []
    matrices = []
    current = None
    chunk_idx = 0
    i = 0
    while i < len(data_rows):
        line_no, values = data_rows[i]
        row, col, ncols = chunks[chunk_idx]
        lead = 1 if chunk_idx == 0 else 0
        expected = lead + 2 * ncols
        if len(values) != expected:
            # a 2-port noise-parameter section (5 numbers per line) may follow
            if n_ports == 2 and chunk_idx == 0 and len(values) == 5 and freqs:
                warnings.warn(
                    f"ignoring noise-parameter section starting at line {line_no}",
                    stacklevel=2,
                )
                break
            raise TouchstoneError(
                f"expected {expected} values, got {len(values)}", line_no
            )
        if chunk_idx == 0:
            f = values[0]
            if freqs and f <= freqs[-1]:
                raise TouchstoneError(
                    f"non-monotonic frequency {f:g} after {freqs[-1]:g}", line_no
                )
            freqs.append(f)
            current = np.empty((n_ports, n_ports), dtype=complex)
        pairs = np.asarray(values[lead:], dtype=float).reshape(ncols, 2)
        s_vals = _decode(fmt, pairs[:, 0], pairs[:, 1])
        if n_ports == 1:
            current[0, 0] = s_vals[0]
        elif n_ports == 2:
            # v1 quirk: 2-port data is S11 S21 S12 S22 (column-major)
            current[0, 0], current[1, 0], current[0, 1], current[1, 1] = s_vals
        else:
            current[row, col : col + ncols] = s_vals
        chunk_idx += 1
        if chunk_idx == len(chunks):
            matrices.append(current)
            current = None
            chunk_idx = 0
        i += 1
    if chunk_idx != 0:
        raise TouchstoneError(
            f"file ends mid-point: {len(chunks) - chunk_idx} data lines missing",
            data_rows[-1][0],
        )
    if not matrices:
        raise TouchstoneError("no data points", option_line_no)

    grid = FrequencyGrid(np.asarray(freqs) * FREQ_MULTIPLIER[unit])
    net = Network(grid, np.stack(matrices), z_ref=resistance)
    return TouchstoneDocument(
        unit=unit, fmt=fmt, resistance=resistance, comments=tuple(comments), data=net
    )


def ports_from_path(path: str) -> int:
    """Port count from the .sNp suffix; raises if the suffix is malformed."""
    m = _SUFFIX_RE.search(str(path))
    if str(path).lower().endswith(".ts"):
        raise TouchstoneError("'.ts' (Touchstone v2) files are not supported")
    if not m:
        raise TouchstoneError(f"cannot infer port count from {path!r}")
    return int(m.group(1))


def read_touchstone(path, n_ports: int | None = None) -> TouchstoneDocument:
    """Read a .sNp file; the port count defaults to the filename suffix."""
    if n_ports is None:
        n_ports = ports_from_path(path)
    with open(path, "r", encoding="ascii") as fh:
        return parse_touchstone(fh.read(), n_ports)


def write_touchstone(
    doc: TouchstoneDocument, fmt: str | None = None, precision: int = 12
) -> str:
    """Serialize back to v1 text.

    precision is the significant-digit count; a parse of the output
    reproduces the network within about 10**(1 - precision) relative.
    """
    fmt = doc.fmt if fmt is None else fmt.lower()
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; use one of {FORMATS}")
    if not 2 <= precision <= 17:
        raise ValueError("precision must lie in 2..17")
    num = f"{{:.{precision - 1}e}}".format

    lines = [f"! {c}" for c in doc.comments]
    lines.append(f"# {doc.unit.upper()} S {fmt.upper()} R {doc.resistance:g}")
    n = doc.n_ports
    freqs = doc.data.grid.f_hz / FREQ_MULTIPLIER[doc.unit]
    a, b = _encode(fmt, doc.data.s)
    for k, f in enumerate(freqs):
        if n == 2:
            order = [(0, 0), (1, 0), (0, 1), (1, 1)]
            vals = []
            for i, j in order:
                vals += [num(a[k, i, j]), num(b[k, i, j])]
            lines.append(" ".join([num(f)] + vals))
        else:
            for row, col, ncols in _expected_chunks(n):
                vals = []
                for j in range(col, col + ncols):
                    vals += [num(a[k, row, j]), num(b[k, row, j])]
                lead = [num(f)] if (row, col) == (0, 0) else []
                lines.append(" ".join(lead + vals))
    return "\n".join(lines) + "\n"
