"""Pump steady state and small-signal conversion gain of the junction ladder.

Two-stage frequency-domain treatment:

1. ``solve_pump``: harmonic balance for the strong pump alone.  Unknowns are
   node-voltage phasors at pump harmonics 1..K (no DC component develops for
   a single-tone drive of the odd junction nonlinearity).  Kirchhoff current
   residuals are driven to zero by a damped Newton iteration with an
   analytic Jacobian; the pump amplitude is ramped geometrically so each
   step starts near the previous solution.

2. ``conversion_gain``: the junction current is linearized around the pump
   waveform, giving a periodically time-varying conductance that couples a
   small signal to its parametric sidebands ``f_s + 2 k f_p``.  Signed
   sideband frequencies keep the coupling linear in the complex amplitudes;
   negative entries are the conjugated mirror of physical positive-frequency
   tones (the idler at 2 f_p - f_s appears as the k = -1 member).

Both stages assemble block-tridiagonal systems over the ladder nodes, so
cost grows linearly with the cell count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .device import (
    PHI0,
    DeviceSpec,
    branch_inductance,
    ladder_layout,
    linear_s21,
    resonator_admittance,
)
from .netcore import FrequencyGrid
from .tridiag import solve_block_tridiagonal

TWO_PI = 2.0 * math.pi

# Time samples per pump period: at least 16 per retained harmonic, rounded
# up to a power of two so the projection is a plain FFT.
SAMPLES_PER_HARMONIC = 16

MAX_STEP_HALVINGS = 8

# A single junction driven to phase pi/2 carries its critical current; the
# series expansion behind the solver loses meaning beyond that.
PHASE_VALIDITY_LIMIT = math.pi / 2.0

# Relative distance to a pump harmonic below which a signal frequency is
# treated as degenerate and skipped.
COLLISION_RTOL = 1e-9


class SolverError(RuntimeError):
    """Base class for pump/sideband solver failures."""


class DivergenceError(SolverError):
    def __init__(self, residual: float, amplitude_fraction: float):
        super().__init__(
            f"pump iteration diverged (residual {residual:.3e} at "
            f"{amplitude_fraction:.0%} drive amplitude)"
        )
        self.residual = residual


class OverdriveError(SolverError):
    def __init__(self, cell: int, phase: float):
        super().__init__(
            f"junction driven beyond critical current at cell {cell} "
            f"(peak single-junction phase {phase:.3f} rad >= pi/2)"
        )
        self.cell = cell
        self.phase = phase


class InstabilityError(SolverError):
    def __init__(self, f_signal: float):
        super().__init__(
            "sideband system is singular (parametric oscillation threshold) "
            f"near {f_signal / 1e9:.6f} GHz"
        )
        self.f_signal = f_signal


@dataclass(frozen=True)
class PumpDrive:
    """Pump tone: frequency in Hz, available power in dBm, harmonic count."""

    f_p: float
    p_dbm: float
    n_harmonics: int = 3

    def __post_init__(self):
        if not self.f_p > 0.0:
            raise ValueError("f_p must be positive")
        if not math.isfinite(self.p_dbm):
            raise ValueError("p_dbm must be finite")
        if int(self.n_harmonics) != self.n_harmonics or self.n_harmonics < 1:
            raise ValueError("n_harmonics must be an integer >= 1")


@dataclass(frozen=True)
class HbOptions:
    """Newton/continuation controls for the pump solve."""

    tol: float = 1e-9
    max_iter: int = 50
    n_steps: int = 5
    start_fraction: float = 0.1

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1 or self.n_steps < 1:
            raise ValueError("max_iter and n_steps must be >= 1")
        if not 0.0 < self.start_fraction <= 1.0:
            raise ValueError("start_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class PumpSolution:
    """Converged pump state.

    node_phasors[n, k] is the node-n voltage phasor at harmonic k+1 (volts,
    v(t) = Re sum V_k e^{j k w_p t}); branch_phase_harmonics holds the
    branch-phase phasors of every junction branch in cell order.
    peak_junction_phase is max_t |phi(t)| per single junction, the validity
    measure of the solution (must stay below pi/2).
    """

    drive: PumpDrive
    node_phasors: np.ndarray
    branch_phase_harmonics: np.ndarray
    residual_norm: float
    iterations: int
    peak_junction_phase: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.node_phasors.shape[0]


def dbm_to_power(p_dbm: float) -> float:
    """Available power in W."""
    return 1e-3 * 10.0 ** (p_dbm / 10.0)


def dbm_to_source_amplitude(p_dbm: float, z0: float = 50.0) -> float:
    """Peak Thevenin source voltage delivering the stated available power.

    P_avail = V_s^2 / (8 z0) for a peak-amplitude sinusoidal source behind
    a z0 generator impedance, hence V_s = sqrt(8 z0 P).
    """
    return math.sqrt(8.0 * z0 * dbm_to_power(p_dbm))


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


class _LadderSystem:
    """Precomputed nodal description of one device for the solvers."""

    def __init__(self, spec: DeviceSpec):
        self.spec = spec
        self.layout = ladder_layout(spec)
        j = spec.junction
        self.n_nodes = self.layout.n_nodes
        self.i_c = j.i_c
        # Effective phase scale of the branch: the sin argument per junction,
        # folding the kinetic-inductance surcharge into the same saturating
        # law so the small-signal limit matches the linear branch exactly.
        self.phase_scale = j.n_series * j.l_scale
        self.c_par = j.c_j / j.n_series
        self.l_branch = branch_inductance(j)
        self.z0 = spec.z_system
        self.ja = self.layout.junction_nodes[:, 0]
        self.jb = self.layout.junction_nodes[:, 1]
        self.n_junctions = self.ja.size

    def linear_tridiagonal(self, w):
        """Linear-element admittance stamps at angular frequencies ``w``.

        Includes ground capacitors, resonators, junction shunt capacitance,
        corner lines and the source/load conductances; the Josephson element
        itself is left to the nonlinear terms.  ``w`` may carry any batch
        shape and may be negative (conjugate-frequency sidebands).
        Returns (diag, off) with shapes (*w.shape, n_nodes) and
        (*w.shape, n_nodes - 1); the off-diagonal is symmetric.
        """
        w = np.asarray(w, dtype=float)
        m = self.n_nodes
        diag = np.zeros(w.shape + (m,), dtype=complex)
        off = np.zeros(w.shape + (m - 1,), dtype=complex)
        spec = self.spec

        y_g = 1j * w[..., None] * spec.c_ground
        diag[..., self.layout.cap_nodes] += y_g

        if self.layout.resonator_nodes.size:
            y_r = resonator_admittance(spec.resonator, w / TWO_PI)
            if not np.all(np.isfinite(y_r)):
                raise ValueError(
                    "resonator branch is singular on the requested frequencies"
                )
            diag[..., self.layout.resonator_nodes] += y_r[..., None]

        y_j = 1j * w * self.c_par
        diag[..., self.ja] += y_j[..., None]
        diag[..., self.jb] += y_j[..., None]
        off[..., self.ja] -= y_j[..., None]

        for a, b in self.layout.line_nodes:
            theta = spec.corner_extra_phase * w / (TWO_PI * spec.corner_phase_ref_hz)
            den = 1j * self.z0 * np.sin(theta)
            diag[..., a] += np.cos(theta) / den
            diag[..., b] += np.cos(theta) / den
            off[..., a] -= 1.0 / den

        diag[..., 0] += 1.0 / self.z0
        diag[..., m - 1] += 1.0 / self.z0
        return diag, off

    def branch_phasors(self, v: np.ndarray, wp: float) -> np.ndarray:
        """Branch-phase phasors from node-voltage phasors (pump harmonics)."""
        k = np.arange(1, v.shape[1] + 1)
        dv = v[self.ja] - v[self.jb]
        return (TWO_PI / PHI0) * dv / (1j * k * wp)


def _harmonic_matrix(n_harm: int, n_t: int) -> np.ndarray:
    """e^{j k theta_m} for harmonics 1..K over one period."""
    k = np.arange(1, n_harm + 1)[:, None]
    theta = TWO_PI * np.arange(n_t)[None, :] / n_t
    return np.exp(1j * k * theta)


def _complex_embed(blocks: np.ndarray, y: np.ndarray, k: int):
    """Add complex scalar admittances as 2x2 real blocks at harmonic k."""
    r, i = 2 * k, 2 * k + 1
    blocks[..., r, r] += y.real
    blocks[..., r, i] -= y.imag
    blocks[..., i, r] += y.imag
    blocks[..., i, i] += y.real


class _PumpProblem:
    """Residual and Jacobian of the pump harmonic-balance system."""

    def __init__(self, system: _LadderSystem, drive: PumpDrive):
        self.sys = system
        self.k_harm = drive.n_harmonics
        self.wp = TWO_PI * drive.f_p
        self.n_t = _next_pow2(SAMPLES_PER_HARMONIC * self.k_harm)
        self.e_mat = _harmonic_matrix(self.k_harm, self.n_t)
        w_harm = self.wp * np.arange(1, self.k_harm + 1)
        self.lin_diag, self.lin_off = system.linear_tridiagonal(w_harm)
        # phase/voltage chain factors per harmonic
        self.gamma = (TWO_PI / PHI0) / (np.arange(1, self.k_harm + 1) * self.wp)

    def branch_phase_time(self, v: np.ndarray) -> np.ndarray:
        """phi(t) per junction branch, shape (n_junctions, n_t)."""
        phi = self.sys.branch_phasors(v, self.wp)
        return (phi @ self.e_mat).real

    def residual(self, v: np.ndarray, v_source: float) -> np.ndarray:
        """KCL current residual per node and harmonic, complex (m, K)."""
        sys = self.sys
        r = self.lin_diag.T * v
        r[:-1] += self.lin_off.T * v[1:]
        r[1:] += self.lin_off.T * v[:-1]

        phi_t = self.branch_phase_time(v)
        i_t = sys.i_c * np.sin(phi_t / sys.phase_scale)
        i_h = 2.0 / self.n_t * np.fft.rfft(i_t, axis=-1)[:, 1 : self.k_harm + 1]
        r[sys.ja] += i_h
        r[sys.jb] -= i_h

        r[0, 0] -= v_source / sys.z0
        return r

    def jacobian(self, v: np.ndarray):
        """Real block-tridiagonal Jacobian w.r.t. interleaved Re/Im unknowns."""
        sys = self.sys
        m = sys.n_nodes
        kk = self.k_harm
        b = 2 * kk
        diag = np.zeros((m, b, b))
        up = np.zeros((m - 1, b, b))
        lo = np.zeros((m - 1, b, b))
        for k in range(kk):
            _complex_embed(diag, self.lin_diag[k], k)
            _complex_embed(up, self.lin_off[k], k)
            _complex_embed(lo, self.lin_off[k], k)

        # conversion blocks of cos(phi(t)): Toeplitz-plus-Hankel in (k, l)
        phi_t = self.branch_phase_time(v)
        g_t = (sys.i_c / sys.phase_scale) * np.cos(phi_t / sys.phase_scale)
        g_h = np.fft.rfft(g_t, axis=-1) / self.n_t  # (n_j, n_t/2 + 1)

        k_idx = np.arange(1, kk + 1)
        dif = k_idx[:, None] - k_idx[None, :]
        tot = k_idx[:, None] + k_idx[None, :]
        g_dif = np.where(
            dif >= 0,
            g_h[:, np.abs(dif)],
            np.conj(g_h[:, np.abs(dif)]),
        )
        g_tot = g_h[:, tot]
        t_block = np.empty((sys.n_junctions, b, b))
        t_block[:, 0::2, 0::2] = (g_dif + g_tot).real
        t_block[:, 0::2, 1::2] = (-g_dif + g_tot).imag
        t_block[:, 1::2, 0::2] = (g_dif + g_tot).imag
        t_block[:, 1::2, 1::2] = (g_dif - g_tot).real

        chain = np.zeros((b, b))
        chain[0::2, 1::2] = np.diag(self.gamma)
        chain[1::2, 0::2] = -np.diag(self.gamma)
        j_block = t_block @ chain

        diag[sys.ja] += j_block
        diag[sys.jb] += j_block
        up[sys.ja] -= j_block
        lo[sys.ja] -= j_block
        return diag, lo, up

    def linear_guess(self, v_source: float) -> np.ndarray:
        """Solve the linearized ladder at the fundamental for a start vector."""
        sys = self.sys
        m = sys.n_nodes
        y_l = 1.0 / (1j * self.wp * sys.l_branch)
        diag = self.lin_diag[0].copy()
        off = self.lin_off[0].copy()
        diag[sys.ja] += y_l
        diag[sys.jb] += y_l
        off[sys.ja] -= y_l
        ab = np.zeros((3, m), dtype=complex)
        ab[0, 1:] = off
        ab[1, :] = diag
        ab[2, :-1] = off
        rhs = np.zeros(m, dtype=complex)
        rhs[0] = v_source / sys.z0
        v = np.zeros((m, self.k_harm), dtype=complex)
        v[:, 0] = solve_banded((1, 1), ab, rhs)
        return v


def _real_view(v: np.ndarray) -> np.ndarray:
    """(m, K) complex -> (m, 2K) real with interleaved Re/Im."""
    m, k = v.shape
    out = np.empty((m, 2 * k))
    out[:, 0::2] = v.real
    out[:, 1::2] = v.imag
    return out


def _complex_view(x: np.ndarray) -> np.ndarray:
    return x[:, 0::2] + 1j * x[:, 1::2]


def solve_pump(
    spec: DeviceSpec,
    drive: PumpDrive,
    opts: HbOptions | None = None,
    initial: PumpSolution | None = None,
) -> PumpSolution:
    """Find the pump-only periodic steady state of the ladder.

    The drive amplitude is ramped over ``opts.n_steps`` geometric steps
    (single-shot when warm-started from ``initial``); each step runs damped
    Newton until the KCL residual falls below ``opts.tol`` relative to the
    drive current scale.  Raises DivergenceError when Newton stalls and
    OverdriveError when a junction is pushed past its critical current.
    """
    opts = HbOptions() if opts is None else opts
    system = _LadderSystem(spec)
    problem = _PumpProblem(system, drive)
    v_full = dbm_to_source_amplitude(drive.p_dbm, spec.z_system)

    if initial is not None:
        v_init = dbm_to_source_amplitude(initial.drive.p_dbm, spec.z_system)
        if initial.node_phasors.shape != (system.n_nodes, drive.n_harmonics):
            raise ValueError("warm-start solution does not match this problem")
        try:
            v = initial.node_phasors * (v_full / v_init)
            v, res, iters = _newton(problem, v, v_full, opts, 1.0)
            return _package(problem, drive, v, res, iters)
        except DivergenceError:
            pass  # fall through to the cold ramp

    if opts.n_steps == 1:
        fractions = np.array([1.0])
    else:
        fractions = np.geomspace(opts.start_fraction, 1.0, opts.n_steps)
    v = None
    total_iters = 0
    for frac in fractions:
        amp = v_full * frac
        if v is None:
            v = problem.linear_guess(amp)
        else:
            v = v * (amp / prev_amp)
        v, res, iters = _newton(problem, v, amp, opts, frac)
        total_iters += iters
        prev_amp = amp
    return _package(problem, drive, v, res, total_iters)


def _newton(problem, v, amp, opts, fraction):
    i_scale = amp / (2.0 * problem.sys.z0)
    res = problem.residual(v, amp)
    rnorm = np.max(np.abs(res)) / i_scale
    for it in range(1, opts.max_iter + 1):
        if rnorm <= opts.tol:
            return v, rnorm, it - 1
        diag, lo, up = problem.jacobian(v)
        rhs = -_real_view(res)
        try:
            step = solve_block_tridiagonal(diag, lo, up, rhs)
        except np.linalg.LinAlgError:
            raise DivergenceError(rnorm, fraction) from None
        dv = _complex_view(step)
        scale = 1.0
        for _ in range(MAX_STEP_HALVINGS + 1):
            v_try = v + scale * dv
            res_try = problem.residual(v_try, amp)
            rnorm_try = np.max(np.abs(res_try)) / i_scale
            if np.isfinite(rnorm_try) and rnorm_try < rnorm:
                break
            scale *= 0.5
        else:
            raise DivergenceError(rnorm, fraction)
        v, res, rnorm = v_try, res_try, rnorm_try
    if rnorm <= opts.tol:
        return v, rnorm, opts.max_iter
    raise DivergenceError(rnorm, fraction)


def _package(problem, drive, v, res, iterations) -> PumpSolution:
    sys = problem.sys
    phi_t = problem.branch_phase_time(v)
    peak = np.max(np.abs(phi_t), axis=-1) / sys.phase_scale
    worst = int(np.argmax(peak))
    if peak[worst] >= PHASE_VALIDITY_LIMIT:
        raise OverdriveError(worst, float(peak[worst]))
    return PumpSolution(
        drive=drive,
        node_phasors=v.copy(),
        branch_phase_harmonics=sys.branch_phasors(v, TWO_PI * drive.f_p),
        residual_norm=float(res),
        iterations=int(iterations),
        peak_junction_phase=peak,
    )


@dataclass(frozen=True)
class SidebandGrid:
    """Mixing products of one signal with the pump: f_s + 2 k f_p.

    Entries with negative signed frequency represent the conjugate of the
    physical tone at |f|; the idler 2 f_p - f_s is the k = -1 member.
    """

    f_s: float
    f_p: float
    k_sb: int
    f_signed: np.ndarray

    @property
    def f_abs(self) -> np.ndarray:
        return np.abs(self.f_signed)

    @property
    def conjugated(self) -> np.ndarray:
        return self.f_signed < 0


def make_sideband_grid(f_s: float, f_p: float, k_sb: int = 1) -> SidebandGrid:
    """Build the sideband set, rejecting degenerate signal frequencies."""
    if k_sb < 1:
        raise ValueError("k_sb must be >= 1")
    if not f_s > 0.0:
        raise ValueError("f_s must be positive")
    if _collides_with_pump(f_s, f_p):
        raise ValueError(
            f"signal frequency {f_s:g} Hz is degenerate with a pump harmonic"
        )
    k = np.arange(-k_sb, k_sb + 1)
    return SidebandGrid(f_s=f_s, f_p=f_p, k_sb=k_sb, f_signed=f_s + 2.0 * k * f_p)


def _collides_with_pump(f_s, f_p) -> np.ndarray:
    """True where f_s sits on a multiple of f_p (degenerate conversion)."""
    f_s = np.asarray(f_s, dtype=float)
    ratio = f_s / f_p
    return np.abs(ratio - np.round(ratio)) <= COLLISION_RTOL * np.maximum(ratio, 1.0)


@dataclass(frozen=True)
class GainSpectrum:
    """Pumped transmission versus signal frequency.

    s21_pumped is the signal-to-signal wave transmission with the pump on;
    s_idler the signal-to-idler conversion (output wave at 2 f_p - f_s per
    incident signal wave, both against z_system).  gain_db follows the
    chosen normalization; skipped (degenerate) points hold NaN.
    """

    grid: FrequencyGrid
    s21_pumped: np.ndarray
    gain_db: np.ndarray
    s_idler: np.ndarray
    normalization: str = "absolute"

    @property
    def idler_db(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return 20.0 * np.log10(np.abs(self.s_idler))


def conversion_gain(
    sol: PumpSolution,
    spec: DeviceSpec,
    f_signal: FrequencyGrid,
    k_sb: int = 1,
    normalization: str = "absolute",
    batch_size: int = 64,
) -> GainSpectrum:
    """Small-signal transmission of the pumped ladder over a signal grid.

    normalization 'absolute' reports 20 log10 |S21,pumped|;
    'relative-to-linear' subtracts the pump-off response of the same device.
    Signal points degenerate with a pump harmonic are skipped (NaN) with a
    warning.  Raises InstabilityError if the sideband system is singular.
    """
    if normalization not in ("absolute", "relative-to-linear"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if k_sb < 1:
        raise ValueError("k_sb must be >= 1")
    system = _LadderSystem(spec)
    if sol.node_phasors.shape[0] != system.n_nodes:
        raise ValueError("pump solution does not belong to this device spec")
    f_p = sol.drive.f_p
    wp = TWO_PI * f_p
    k_harm = sol.drive.n_harmonics

    # conversion coefficients of cos(phi_p(t)) per branch, even offsets only
    n_t = _next_pow2(SAMPLES_PER_HARMONIC * max(k_harm, 2 * k_sb))
    e_mat = _harmonic_matrix(k_harm, n_t)
    phi_t = (sol.branch_phase_harmonics @ e_mat).real
    g_t = (system.i_c / system.phase_scale) * np.cos(phi_t / system.phase_scale)
    g_h = np.fft.rfft(g_t, axis=-1) / n_t

    nb_side = 2 * k_sb + 1
    offsets = np.arange(-k_sb, k_sb + 1)
    dif = 2 * (offsets[:, None] - offsets[None, :])
    gamma_blocks = np.where(
        dif >= 0, g_h[:, np.abs(dif)], np.conj(g_h[:, np.abs(dif)])
    )  # (n_junctions, nb_side, nb_side)

    f_all = f_signal.f_hz
    n_pts = f_all.size
    s21 = np.full(n_pts, np.nan + 0j)
    s_idl = np.full(n_pts, np.nan + 0j)
    degenerate = _collides_with_pump(f_all, f_p)
    if np.any(degenerate):
        warnings.warn(
            f"skipping {int(np.sum(degenerate))} signal point(s) degenerate "
            "with a pump harmonic",
            stacklevel=2,
        )
    valid = np.nonzero(~degenerate)[0]

    for start in range(0, valid.size, batch_size):
        idx = valid[start : start + batch_size]
        try:
            s21[idx], s_idl[idx] = _sideband_solve(
                system, gamma_blocks, f_all[idx], f_p, k_sb
            )
        except np.linalg.LinAlgError:
            # isolate the offending point for a meaningful error
            for i in idx:
                try:
                    s21[[i]], s_idl[[i]] = _sideband_solve(
                        system, gamma_blocks, f_all[[i]], f_p, k_sb
                    )
                except np.linalg.LinAlgError:
                    raise InstabilityError(float(f_all[i])) from None

    with np.errstate(divide="ignore", invalid="ignore"):
        gain_db = 20.0 * np.log10(np.abs(s21))
        if normalization == "relative-to-linear":
            gain_db = gain_db - linear_s21(spec, f_signal).s21_db
    return GainSpectrum(
        grid=f_signal,
        s21_pumped=s21,
        gain_db=gain_db,
        s_idler=s_idl,
        normalization=normalization,
    )


def _sideband_solve(system, gamma_blocks, f_batch, f_p, k_sb):
    """Assemble and solve the conversion system for a batch of signal points."""
    nb = f_batch.size
    b = 2 * k_sb + 1
    m = system.n_nodes
    offsets = np.arange(-k_sb, k_sb + 1)
    w = TWO_PI * (f_batch[:, None] + 2.0 * offsets[None, :] * f_p)  # (nb, b)

    lin_diag, lin_off = system.linear_tridiagonal(w)  # (nb, b, m±)
    rng = np.arange(b)
    diag = np.zeros((nb, m, b, b), dtype=complex)
    up = np.zeros((nb, m - 1, b, b), dtype=complex)
    lo = np.zeros((nb, m - 1, b, b), dtype=complex)
    diag[:, :, rng, rng] = lin_diag.transpose(0, 2, 1)
    up[:, :, rng, rng] = lin_off.transpose(0, 2, 1)
    lo[:, :, rng, rng] = lin_off.transpose(0, 2, 1)

    # junction conversion blocks: di_j = sum_l Gamma_{j-l} dphi_l with
    # dphi_l = (2 pi / Phi0) dv_l / (j w_l)
    # every junction branch owns distinct start/end nodes, so plain fancy
    # indexing accumulates correctly (and much faster than ufunc.at)
    chain = (TWO_PI / PHI0) / (1j * w)  # (nb, b)
    j_blocks = gamma_blocks[None, :, :, :] * chain[:, None, None, :]
    diag[:, system.ja] += j_blocks
    diag[:, system.jb] += j_blocks
    up[:, system.ja] -= j_blocks
    lo[:, system.ja] -= j_blocks

    rhs = np.zeros((nb, m, b), dtype=complex)
    v_sig = 1.0
    rhs[:, 0, k_sb] = v_sig / system.z0

    x = solve_block_tridiagonal(
        diag.transpose(1, 0, 2, 3),
        lo.transpose(1, 0, 2, 3),
        up.transpose(1, 0, 2, 3),
        rhs.transpose(1, 0, 2),
    )
    if not np.all(np.isfinite(x[-1])):
        raise np.linalg.LinAlgError("non-finite sideband solution")
    v_out = x[-1]  # (nb, b)
    s21 = 2.0 * v_out[:, k_sb] / v_sig
    s_idler = 2.0 * np.conj(v_out[:, k_sb - 1]) / v_sig
    return s21, s_idler


def manley_rowe_defect(gain: GainSpectrum, f_p: float) -> np.ndarray:
    """|S_ss|^2 - |S_si*|^2 - 1 with photon-flux normalized idler waves.

    Zero for a lossless phase-insensitive amplifier: each signal photon
    gained pairs with one idler photon at f_i = 2 f_p - f_s.
    """
    f_s = gain.grid.f_hz
    f_i = 2.0 * f_p - f_s
    return (
        np.abs(gain.s21_pumped) ** 2
        - (f_s / f_i) * np.abs(gain.s_idler) ** 2
        - 1.0
    )


@dataclass(frozen=True)
class SweepPoint:
    """One pump detuning/power offset: outcome plus the gain spectrum."""

    df: float
    dp: float
    drive: PumpDrive
    status: str
    message: str = ""
    gain: GainSpectrum | None = None
    iterations: int = 0
    residual: float = math.nan


@dataclass(frozen=True)
class SweepResult:
    base_drive: PumpDrive
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    @property
    def n_failed(self) -> int:
        return sum(1 for p in self.points if p.status != "ok")

    @property
    def all_failed(self) -> bool:
        return self.n_failed == len(self.points)


def sweep(
    spec: DeviceSpec,
    drive: PumpDrive,
    df_list,
    dp_list,
    f_signal: FrequencyGrid,
    opts: HbOptions | None = None,
    k_sb: int = 1,
    normalization: str = "absolute",
) -> SweepResult:
    """Pump frequency/power robustness map.

    Every (df, dp) offset is solved independently; failures are recorded on
    the point instead of aborting the sweep.  Within one detuning column the
    powers run in ascending order and warm-start from the previous solution.
    """
    points = []
    for df in df_list:
        warm = None
        for dp in sorted(dp_list):
            d = replace(drive, f_p=drive.f_p + df, p_dbm=drive.p_dbm + dp)
            try:
                sol = solve_pump(spec, d, opts, initial=warm)
                warm = sol
                gain = conversion_gain(
                    sol, spec, f_signal, k_sb=k_sb, normalization=normalization
                )
                points.append(
                    SweepPoint(
                        df=df,
                        dp=dp,
                        drive=d,
                        status="ok",
                        gain=gain,
                        iterations=sol.iterations,
                        residual=sol.residual_norm,
                    )
                )
            except (SolverError, ValueError) as exc:
                points.append(
                    SweepPoint(df=df, dp=dp, drive=d, status="failed", message=str(exc))
                )
    return SweepResult(base_drive=drive, points=tuple(points))
