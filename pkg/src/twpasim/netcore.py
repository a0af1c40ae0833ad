"""Two-port chain and scattering-parameter algebra on a shared frequency grid.

Conventions
-----------
* Frequencies are in Hz, strictly increasing, DC excluded.
* Per-frequency matrices are stacked along the leading axis: chain (ABCD)
  matrices have shape ``(n_freq, 2, 2)``, scattering matrices
  ``(n_freq, n_ports, n_ports)``.
* Scattering parameters are the internal representation; ABCD matrices are
  used only to assemble two-port ladders.
* Port numbers in user-facing maps are 1-based, matching the .sNp column
  convention.  Array axes are 0-based as usual.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce as _reduce

import numpy as np

DEFAULT_Z0 = 50.0

# Terminations that leave (I - S*Gamma) with a condition number above this
# are reported as singular instead of silently returning garbage.
MAX_TERMINATION_COND = 1e13


class SingularElementError(ValueError):
    """An element value is non-finite or sits on a model pole at a grid point."""

    def __init__(self, message: str, frequency_hz: float):
        super().__init__(f"{message} at {frequency_hz / 1e9:.9g} GHz")
        self.frequency_hz = float(frequency_hz)


class SingularNetworkError(ValueError):
    """A matrix conversion or termination is singular at a grid point."""

    def __init__(self, message: str, frequency_hz: float):
        super().__init__(f"{message} at {frequency_hz / 1e9:.9g} GHz")
        self.frequency_hz = float(frequency_hz)


def _frozen_array(a, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing, strictly positive frequency points in Hz."""

    f_hz: np.ndarray

    def __post_init__(self):
        f = np.array(self.f_hz, dtype=float)
        if f.ndim != 1 or f.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-D array")
        if not np.all(np.isfinite(f)):
            raise ValueError("frequency grid contains non-finite values")
        if f[0] <= 0.0:
            raise ValueError("frequency grid must be strictly positive (no DC point)")
        if np.any(np.diff(f) <= 0.0):
            raise ValueError("frequency grid must be strictly increasing")
        f.setflags(write=False)
        object.__setattr__(self, "f_hz", f)

    @property
    def n_points(self) -> int:
        return self.f_hz.size

    def __len__(self) -> int:
        return self.f_hz.size

    def same_as(self, other: "FrequencyGrid") -> bool:
        return np.array_equal(self.f_hz, other.f_hz)


@dataclass(frozen=True)
class Network:
    """Multiport scattering parameters with per-port reference impedances.

    Parameters
    ----------
    grid : FrequencyGrid
    s : ndarray, shape (n_freq, n_ports, n_ports)
        Complex scattering matrix per frequency point.
    z_ref : float or ndarray, shape (n_ports,)
        Real positive reference impedance per port, default 50 ohm.
    """

    grid: FrequencyGrid
    s: np.ndarray
    z_ref: np.ndarray = DEFAULT_Z0

    def __post_init__(self):
        s = np.array(self.s, dtype=complex)
        if s.ndim != 3 or s.shape[1] != s.shape[2]:
            raise ValueError("s must have shape (n_freq, n_ports, n_ports)")
        if s.shape[0] != len(self.grid):
            raise ValueError(
                f"s has {s.shape[0]} frequency points, grid has {len(self.grid)}"
            )
        if not np.all(np.isfinite(s)):
            raise ValueError("s contains non-finite entries")
        z = np.broadcast_to(np.asarray(self.z_ref, dtype=float), (s.shape[1],))
        if np.any(~np.isfinite(z)) or np.any(z <= 0.0):
            raise ValueError("reference impedances must be real, finite and positive")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "z_ref", _frozen_array(z, float))

    @property
    def n_ports(self) -> int:
        return self.s.shape[1]


@dataclass(frozen=True)
class AbcdTwoPort:
    """Chain (ABCD) matrix of a two-port per frequency point.

    For passive reciprocal elements det(ABCD) = 1; element factories and
    cascades preserve this up to rounding.
    """

    grid: FrequencyGrid
    abcd: np.ndarray

    def __post_init__(self):
        a = np.array(self.abcd, dtype=complex)
        if a.ndim != 3 or a.shape[1:] != (2, 2):
            raise ValueError("abcd must have shape (n_freq, 2, 2)")
        if a.shape[0] != len(self.grid):
            raise ValueError(
                f"abcd has {a.shape[0]} frequency points, grid has {len(self.grid)}"
            )
        if not np.all(np.isfinite(a)):
            raise ValueError("abcd contains non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "abcd", a)

    def det(self) -> np.ndarray:
        a = self.abcd
        return a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]


def _eval_on_grid(value, grid: FrequencyGrid, what: str) -> np.ndarray:
    """Evaluate a callable-or-array element law on the grid and vet the result."""
    if callable(value):
        v = np.asarray(value(grid.f_hz), dtype=complex)
    else:
        v = np.asarray(value, dtype=complex)
    v = np.broadcast_to(v, grid.f_hz.shape).copy()
    bad = ~np.isfinite(v)
    if np.any(bad):
        raise SingularElementError(
            f"{what} is singular", grid.f_hz[np.argmax(bad)]
        )
    return v


def series_two_port(grid: FrequencyGrid, z) -> AbcdTwoPort:
    """Chain matrix [[1, z], [0, 1]] of a series impedance.

    Parameters
    ----------
    z : callable or array_like
        Impedance law in ohm; a callable receives the frequency array in Hz
        and must return a complex array of the same shape.
    """
    zv = _eval_on_grid(z, grid, "series impedance")
    abcd = np.zeros((len(grid), 2, 2), dtype=complex)
    abcd[:, 0, 0] = 1.0
    abcd[:, 1, 1] = 1.0
    abcd[:, 0, 1] = zv
    return AbcdTwoPort(grid, abcd)


def shunt_two_port(grid: FrequencyGrid, y) -> AbcdTwoPort:
    """Chain matrix [[1, 0], [y, 1]] of a shunt admittance.

    A non-finite admittance value (for example a lossless resonator evaluated
    exactly on resonance) raises SingularElementError naming the frequency.
    """
    yv = _eval_on_grid(y, grid, "shunt admittance")
    abcd = np.zeros((len(grid), 2, 2), dtype=complex)
    abcd[:, 0, 0] = 1.0
    abcd[:, 1, 1] = 1.0
    abcd[:, 1, 0] = yv
    return AbcdTwoPort(grid, abcd)


def cascade(*elements: AbcdTwoPort) -> AbcdTwoPort:
    """Chain several two-ports; signal passes through arguments left to right."""
    if not elements:
        raise ValueError("cascade requires at least one element")
    grid = elements[0].grid
    for e in elements[1:]:
        if not grid.same_as(e.grid):
            raise ValueError("frequency-grid mismatch between cascaded elements")
    abcd = _reduce(np.matmul, (e.abcd for e in elements))
    return AbcdTwoPort(grid, abcd)


def abcd_to_s(tp: AbcdTwoPort, z_ref: float = DEFAULT_Z0) -> Network:
    """Convert a chain matrix to scattering parameters at a real reference."""
    z0 = float(z_ref)
    if not z0 > 0.0:
        raise ValueError("z_ref must be positive")
    a = tp.abcd[:, 0, 0]
    b = tp.abcd[:, 0, 1]
    c = tp.abcd[:, 1, 0]
    d = tp.abcd[:, 1, 1]
    den = a + b / z0 + c * z0 + d
    bad = (den == 0) | ~np.isfinite(den)
    if np.any(bad):
        raise SingularNetworkError(
            "ABCD to S conversion is singular", tp.grid.f_hz[np.argmax(bad)]
        )
    s = np.empty((len(tp.grid), 2, 2), dtype=complex)
    s[:, 0, 0] = (a + b / z0 - c * z0 - d) / den
    s[:, 0, 1] = 2.0 * (a * d - b * c) / den
    s[:, 1, 0] = 2.0 / den
    s[:, 1, 1] = (-a + b / z0 - c * z0 + d) / den
    return Network(tp.grid, s, z_ref=z0)


def s_to_abcd(net: Network) -> AbcdTwoPort:
    """Convert a two-port Network back to its chain matrix.

    The network must be a two-port with equal reference impedance on both
    ports.  A transmission zero (S21 = 0) has no chain representation and
    raises SingularNetworkError.
    """
    if net.n_ports != 2:
        raise ValueError("s_to_abcd requires a two-port network")
    if net.z_ref[0] != net.z_ref[1]:
        raise ValueError("s_to_abcd requires equal reference impedance on both ports")
    z0 = net.z_ref[0]
    s11 = net.s[:, 0, 0]
    s12 = net.s[:, 0, 1]
    s21 = net.s[:, 1, 0]
    s22 = net.s[:, 1, 1]
    bad = s21 == 0
    if np.any(bad):
        raise SingularNetworkError(
            "S to ABCD conversion is singular (S21 = 0)",
            net.grid.f_hz[np.argmax(bad)],
        )
    den = 2.0 * s21
    abcd = np.empty((len(net.grid), 2, 2), dtype=complex)
    abcd[:, 0, 0] = ((1 + s11) * (1 - s22) + s12 * s21) / den
    abcd[:, 0, 1] = z0 * ((1 + s11) * (1 + s22) - s12 * s21) / den
    abcd[:, 1, 0] = ((1 - s11) * (1 - s22) - s12 * s21) / (z0 * den)
    abcd[:, 1, 1] = ((1 - s11) * (1 + s22) + s12 * s21) / den
    return AbcdTwoPort(net.grid, abcd)


def chain_networks(*nets: Network) -> Network:
    """Cascade two-port Networks in the scattering domain (Redheffer star).

    Unlike an ABCD product, the star product keeps all intermediate values
    bounded for passive blocks, so long chains stay representable even deep
    inside a stopband.  Reference impedances must agree at every joint.
    """
    if not nets:
        raise ValueError("chain_networks requires at least one network")
    for n in nets:
        if n.n_ports != 2:
            raise ValueError("chain_networks operates on two-port networks")
        if not nets[0].grid.same_as(n.grid):
            raise ValueError("frequency-grid mismatch between chained networks")
    acc = nets[0]
    for nxt in nets[1:]:
        if acc.z_ref[1] != nxt.z_ref[0]:
            raise ValueError(
                "reference-impedance mismatch at chained joint: "
                f"{acc.z_ref[1]} vs {nxt.z_ref[0]} ohm"
            )
        a, b = acc.s, nxt.s
        d = 1.0 - a[:, 1, 1] * b[:, 0, 0]
        bad = (d == 0) | ~np.isfinite(d)
        if np.any(bad):
            raise SingularNetworkError(
                "singular joint in network chain", acc.grid.f_hz[np.argmax(bad)]
            )
        s = np.empty_like(a)
        s[:, 0, 0] = a[:, 0, 0] + a[:, 0, 1] * b[:, 0, 0] * a[:, 1, 0] / d
        s[:, 0, 1] = a[:, 0, 1] * b[:, 0, 1] / d
        s[:, 1, 0] = a[:, 1, 0] * b[:, 1, 0] / d
        s[:, 1, 1] = b[:, 1, 1] + b[:, 1, 0] * a[:, 1, 1] * b[:, 0, 1] / d
        acc = Network(acc.grid, s, z_ref=[acc.z_ref[0], nxt.z_ref[1]])
    return acc


def _termination_gamma(value, grid: FrequencyGrid) -> np.ndarray:
    if isinstance(value, str):
        try:
            scalar = {"open": 1.0, "short": -1.0, "match": 0.0}[value]
        except KeyError:
            raise ValueError(
                f"unknown termination {value!r}; use 'open', 'short', 'match' "
                "or a complex reflection coefficient"
            ) from None
        return np.full(len(grid), scalar, dtype=complex)
    g = np.asarray(value, dtype=complex)
    g = np.broadcast_to(g, grid.f_hz.shape).copy()
    if not np.all(np.isfinite(g)):
        raise ValueError("termination reflection coefficient must be finite")
    return g


def reduce_ports(net: Network, terminations: dict) -> Network:
    """Close a subset of ports on reflective terminations.

    Parameters
    ----------
    terminations : dict
        Maps 1-based port numbers to ``'open'``, ``'short'``, ``'match'``,
        a complex reflection coefficient, or an array of one coefficient per
        grid point.  Reflections are defined against that port's z_ref.

    Returns
    -------
    Network over the remaining ports, original order preserved.
    """
    p = net.n_ports
    for port in terminations:
        if not isinstance(port, (int, np.integer)) or not 1 <= port <= p:
            raise ValueError(f"termination port {port!r} out of range 1..{p}")
    closed = sorted(int(k) - 1 for k in terminations)
    if len(closed) == 0:
        return net
    kept = [i for i in range(p) if i not in closed]
    if not kept:
        raise ValueError("cannot terminate every port; at least one must remain")

    gam = np.stack(
        [_termination_gamma(terminations[i + 1], net.grid) for i in closed], axis=-1
    )  # (n_freq, m)
    s = net.s
    s_kk = s[:, kept][:, :, kept]
    s_kt = s[:, kept][:, :, closed]
    s_tk = s[:, closed][:, :, kept]
    s_tt = s[:, closed][:, :, closed]

    m = len(closed)
    x = np.eye(m, dtype=complex) - s_tt * gam[:, None, :]
    cond = np.linalg.cond(x)
    bad = ~np.isfinite(cond) | (cond > MAX_TERMINATION_COND)
    if np.any(bad):
        raise SingularNetworkError(
            "ill-conditioned termination", net.grid.f_hz[np.argmax(bad)]
        )
    b_t = np.linalg.solve(x, s_tk)
    s_red = s_kk + s_kt @ (gam[:, :, None] * b_t)
    return Network(net.grid, s_red, z_ref=net.z_ref[kept])


def renormalize(net: Network, z_new) -> Network:
    """Re-express scattering parameters against new real port references."""
    z0 = net.z_ref
    z1 = np.broadcast_to(np.asarray(z_new, dtype=float), (net.n_ports,))
    if np.any(~np.isfinite(z1)) or np.any(z1 <= 0.0):
        raise ValueError("new reference impedances must be real, finite and positive")
    # Per-port wave change of basis: a' = alpha*a + beta*b, b' = beta*a + alpha*b.
    alpha = (z0 + z1) / (2.0 * np.sqrt(z0 * z1))
    beta = (z0 - z1) / (2.0 * np.sqrt(z0 * z1))
    s = net.s
    num = beta[None, :, None] * np.eye(net.n_ports) + alpha[None, :, None] * s
    den = alpha[None, :, None] * np.eye(net.n_ports) + beta[None, :, None] * s
    det = np.linalg.det(den)
    bad = (det == 0) | ~np.isfinite(det)
    if np.any(bad):
        raise SingularNetworkError(
            "singular renormalization", net.grid.f_hz[np.argmax(bad)]
        )
    # num @ inv(den) via a transposed solve
    s_new = np.linalg.solve(np.swapaxes(den, 1, 2), np.swapaxes(num, 1, 2))
    s_new = np.swapaxes(s_new, 1, 2)
    return Network(net.grid, s_new, z_ref=z1)


def interpolate(net: Network, new_grid: FrequencyGrid) -> Network:
    """Linear interpolation of Re/Im per matrix entry onto a new grid.

    Points of the new grid must lie inside the span of the old one;
    extrapolation raises ValueError.  Original points reproduce exactly.
    """
    f_old = net.grid.f_hz
    f_new = new_grid.f_hz
    if f_new[0] < f_old[0] or f_new[-1] > f_old[-1]:
        raise ValueError(
            f"interpolation target [{f_new[0]:.6g}, {f_new[-1]:.6g}] Hz exceeds "
            f"source span [{f_old[0]:.6g}, {f_old[-1]:.6g}] Hz"
        )
    p = net.n_ports
    s_new = np.empty((len(new_grid), p, p), dtype=complex)
    for i in range(p):
        for j in range(p):
            s_new[:, i, j] = np.interp(
                f_new, f_old, net.s[:, i, j].real
            ) + 1j * np.interp(f_new, f_old, net.s[:, i, j].imag)
    return Network(new_grid, s_new, z_ref=net.z_ref)
