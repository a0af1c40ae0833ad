"""Shared fixtures and builders for the test suite."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from twpasim import (
    DeviceSpec,
    FrequencyGrid,
    JunctionParams,
    abcd_to_s,
    cascade,
    dbm_to_source_amplitude,
    series_two_port,
    shunt_two_port,
)

TWO_PI = 2.0 * np.pi
PHI0 = 2.067833848e-15


def random_grid(rng, n_points=3, f_lo=1e9, f_hi=20e9):
    """A strictly increasing random frequency grid."""
    f = np.sort(rng.uniform(f_lo, f_hi, size=n_points))
    while np.any(np.diff(f) <= 0.0):
        f = np.sort(rng.uniform(f_lo, f_hi, size=n_points))
    return FrequencyGrid(f)


def random_reactive_elements(rng, grid, n_min=3, n_max=8):
    """A random chain of series/shunt L and C elements.

    Purely reactive, so the cascade is reciprocal and lossless by
    construction -- the reference behavior the property tests check against.
    """
    w = TWO_PI * grid.f_hz
    parts = []
    for _ in range(int(rng.integers(n_min, n_max + 1))):
        kind = int(rng.integers(0, 4))
        if kind == 0:
            parts.append(series_two_port(grid, 1j * w * rng.uniform(0.1e-9, 5e-9)))
        elif kind == 1:
            parts.append(
                series_two_port(grid, 1.0 / (1j * w * rng.uniform(0.05e-12, 2e-12)))
            )
        elif kind == 2:
            parts.append(shunt_two_port(grid, 1j * w * rng.uniform(0.05e-12, 2e-12)))
        else:
            parts.append(
                shunt_two_port(grid, 1.0 / (1j * w * rng.uniform(0.1e-9, 5e-9)))
            )
    return parts


def abcd_rel_error(a, b, z0=50.0):
    """Scale-free relative error between two chain-matrix stacks.

    The off-diagonal entries carry units (ohms and siemens); normalizing by
    z0 puts all four on a common footing before comparing.
    """
    norm = np.array([[1.0, 1.0 / z0], [z0, 1.0]])
    da = np.abs(a.abcd - b.abcd) * norm
    ref = np.maximum(np.abs(a.abcd) * norm, np.abs(b.abcd) * norm).max()
    return da.max() / ref


def random_passive_two_port(rng):
    """One randomized lossless reciprocal two-port on a random grid."""
    grid = random_grid(rng)
    parts = random_reactive_elements(rng, grid)
    return grid, parts, cascade(*parts)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260821)


@pytest.fixture(scope="session")
def full_device():
    """The full reference device used by the end-to-end checks."""
    from twpasim import default_spec

    return default_spec()


def s_of(parts_or_tp, z_ref=50.0):
    if isinstance(parts_or_tp, (list, tuple)):
        parts_or_tp = cascade(*parts_or_tp)
    return abcd_to_s(parts_or_tp, z_ref=z_ref)


def guarded_spec(n_cells):
    """A line built so the photon-flux identity is clean to measure.

    The junction capacitance puts the branch self-resonance between the
    signal band and twice the pump, so every sideband slot beyond signal
    and idler is evanescent, and the shunt capacitance matches the loaded
    line to the system impedance at the pump frequency rather than at DC.
    """
    i_c = 40e-6
    f_self = 17e9
    l_j = PHI0 / (TWO_PI * i_c)
    c_j = 1.0 / ((TWO_PI * f_self) ** 2 * l_j)
    l_branch = 3 * l_j
    c_g = l_branch / (1.0 - (7.5e9 / f_self) ** 2) / 50.0**2
    return DeviceSpec(
        junction=JunctionParams(i_c=i_c, c_j=c_j),
        c_ground=c_g,
        n_unit_cells=n_cells,
    )


def transient_steady_state_phasors(spec, f_p, p_dbm, n_harm):
    """Periodic steady state of a one-cell line by direct time integration.

    Independent of the frequency-domain solver: the three circuit states
    (both node voltages and the branch phase) are integrated with an
    explicit Runge-Kutta method until transients have decayed, then the
    last period is projected onto the harmonic basis.
    """
    assert spec.n_unit_cells == 1
    j = spec.junction
    scale = j.n_series * j.l_scale
    c_par = j.c_j / j.n_series
    z0 = spec.z_system
    amp = dbm_to_source_amplitude(p_dbm, z0)
    w = TWO_PI * f_p
    period = 1.0 / f_p

    c_mat = np.array([[c_par, -c_par], [-c_par, c_par + spec.c_ground]])
    c_inv = np.linalg.inv(c_mat)

    def rhs(t, x):
        v0, v1, phi = x
        i_j = j.i_c * np.sin(phi / scale)
        f0 = (amp * np.cos(w * t) - v0) / z0 - i_j
        f1 = i_j - v1 / z0
        dv = c_inv @ (f0, f1)
        return (dv[0], dv[1], (TWO_PI / PHI0) * (v0 - v1))

    n_settle = 60
    sol = solve_ivp(
        rhs,
        (0.0, (n_settle + 1) * period),
        (0.0, 0.0, 0.0),
        method="DOP853",
        rtol=1e-12,
        atol=1e-16,
        dense_output=True,
    )
    n_s = 4096
    ts = n_settle * period + np.arange(n_s) * period / n_s
    states = sol.sol(ts)
    ks = np.arange(1, n_harm + 1)
    basis = np.exp(-1j * ks[:, None] * w * ts[None, :])
    return (2.0 / n_s) * (states[:2] @ basis.T)
