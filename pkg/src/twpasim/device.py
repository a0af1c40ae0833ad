"""Lumped-element model of a junction-loaded traveling-wave amplifier line.

The device is an LC ladder: every unit cell is a series branch of
``n_series`` identical Josephson junctions (each shunted by its own
capacitance) followed by a capacitor to ground.  Cells are grouped into
supercells; a standard supercell carries one phase-matching shunt resonator,
while corner supercells trade the resonator for a short ideal line section
that models the extra electrical length of a bend.

Two views of the same circuit are produced here: 2-port blocks for linear
frequency sweeps, and a flat node/branch layout consumed by the nonlinear
pump solver.  Both are derived from one supercell plan so they cannot drift
apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import physical_constants

from .netcore import (
    AbcdTwoPort,
    FrequencyGrid,
    Network,
    SingularElementError,
    abcd_to_s,
    cascade,
    chain_networks,
    interpolate,
    reduce_ports,
    renormalize,
    series_two_port,
    shunt_two_port,
)

PHI0 = physical_constants["mag. flux quantum"][0]

# Reference design values: measured junction parameters plus a resonator
# tuned for this idealized model.  With every resonator identical, the
# collective stopband is far stronger than in hardware (where fabrication
# spread staggers the resonances), so the coupling capacitance is chosen
# much smaller than a physical layout would use: large enough that the
# dispersion kink phase-matches four-wave mixing at a 7.5 GHz pump, small
# enough that the line stays transparent there.  The series loss keeps the
# on-resonance transmission finite so the dip stays resolvable.
REF_I_C = 5.36e-6
REF_C_J = 201.8e-15
REF_N_SERIES = 3
REF_N_UNIT_CELLS = 1648
REF_CELLS_PER_SUPERCELL = 8
REF_F_RESONATOR = 7.62e9
REF_C_RESONATOR = 0.2e-15
REF_R_RESONATOR = 100.0
REF_N_CORNERS = 9
REF_CORNER_PHASE = 0.05
REF_CORNER_PHASE_REF = 7.5e9


@dataclass(frozen=True)
class JunctionParams:
    """Parameters of one series junction branch.

    Parameters
    ----------
    i_c : float
        Critical current per junction in A.
    c_j : float
        Shunt capacitance per junction in F.
    n_series : int
        Number of identical junctions chained in the branch.
    l_scale : float
        Factor >= 1 multiplying the Josephson inductance; stands in for
        kinetic-inductance loading of the branch.
    """

    i_c: float
    c_j: float
    n_series: int = REF_N_SERIES
    l_scale: float = 1.0

    def __post_init__(self):
        if not self.i_c > 0.0:
            raise ValueError("i_c must be positive")
        if not self.c_j > 0.0:
            raise ValueError("c_j must be positive")
        if int(self.n_series) != self.n_series or self.n_series < 1:
            raise ValueError("n_series must be an integer >= 1")
        if not self.l_scale >= 1.0:
            raise ValueError("l_scale must be >= 1")


@dataclass(frozen=True)
class ResonatorParams:
    """Series-LC shunt resonator with optional series loss resistance."""

    f_r: float
    c_r: float
    r_loss: float = 0.0

    def __post_init__(self):
        if not self.f_r > 0.0:
            raise ValueError("f_r must be positive")
        if not self.c_r > 0.0:
            raise ValueError("c_r must be positive")
        if self.r_loss < 0.0:
            raise ValueError("r_loss must be >= 0")

    @property
    def l_r(self) -> float:
        """Inductance fixing the resonance at f_r."""
        return 1.0 / ((2.0 * math.pi * self.f_r) ** 2 * self.c_r)


@dataclass(frozen=True)
class DeviceSpec:
    """Complete description of one amplifier line.

    ``corner_positions`` lists 0-based supercell indices realized as bent
    segments: those supercells drop their resonator and append an ideal line
    with electrical length ``corner_extra_phase`` (radians) at
    ``corner_phase_ref_hz``.  A trailing partial supercell (when
    n_unit_cells is not a multiple of cells_per_supercell) carries no
    resonator.
    """

    junction: JunctionParams
    c_ground: float
    resonator: ResonatorParams | None = None
    n_unit_cells: int = REF_N_UNIT_CELLS
    cells_per_supercell: int = REF_CELLS_PER_SUPERCELL
    resonator_after_cell: int = 4
    corner_positions: tuple = ()
    corner_extra_phase: float = REF_CORNER_PHASE
    corner_phase_ref_hz: float = REF_CORNER_PHASE_REF
    z_system: float = 50.0

    def __post_init__(self):
        if not self.c_ground > 0.0:
            raise ValueError("c_ground must be positive")
        if int(self.n_unit_cells) != self.n_unit_cells or self.n_unit_cells < 1:
            raise ValueError("n_unit_cells must be an integer >= 1")
        if (
            int(self.cells_per_supercell) != self.cells_per_supercell
            or self.cells_per_supercell < 1
        ):
            raise ValueError("cells_per_supercell must be an integer >= 1")
        if not 0 <= self.resonator_after_cell <= self.cells_per_supercell:
            raise ValueError(
                "resonator_after_cell must lie in 0..cells_per_supercell"
            )
        if not self.z_system > 0.0:
            raise ValueError("z_system must be positive")
        if self.corner_extra_phase < 0.0:
            raise ValueError("corner_extra_phase must be >= 0")
        if not self.corner_phase_ref_hz > 0.0:
            raise ValueError("corner_phase_ref_hz must be positive")
        pos = tuple(int(p) for p in self.corner_positions)
        if len(set(pos)) != len(pos):
            raise ValueError("corner_positions contains duplicates")
        for p in pos:
            if not 0 <= p < self.n_supercells:
                raise ValueError(
                    f"corner position {p} outside 0..{self.n_supercells - 1}"
                )
        object.__setattr__(self, "corner_positions", pos)

    @property
    def n_supercells(self) -> int:
        return -(-self.n_unit_cells // self.cells_per_supercell)


@dataclass(frozen=True)
class LinearSpectrum:
    """Reflection and transmission of the assembled line versus frequency."""

    grid: FrequencyGrid
    s11: np.ndarray
    s21: np.ndarray

    @property
    def s21_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(np.abs(self.s21))

    @property
    def s11_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(np.abs(self.s11))


def junction_linear_inductance(junction: JunctionParams) -> float:
    """Small-signal inductance of a single junction, Phi0 / (2 pi i_c)."""
    return PHI0 / (2.0 * math.pi * junction.i_c)


def branch_inductance(junction: JunctionParams) -> float:
    """Small-signal inductance of the whole series branch."""
    return junction.n_series * junction.l_scale * junction_linear_inductance(junction)


def branch_plasma_frequency(junction: JunctionParams) -> float:
    """Pole of the branch impedance: the (scaled) junction plasma resonance."""
    l_eff = junction.l_scale * junction_linear_inductance(junction)
    return 1.0 / (2.0 * math.pi * math.sqrt(l_eff * junction.c_j))


def unit_cell_branch_impedance(
    junction: JunctionParams, grid: FrequencyGrid
) -> np.ndarray:
    """Series-branch impedance per unit cell: n_series junctions, each an
    effective inductance in parallel with its capacitance.

    The lumped model holds only below the junction plasma resonance; grid
    points at or above it raise SingularElementError.
    """
    f_pl = branch_plasma_frequency(junction)
    bad = grid.f_hz >= f_pl * (1.0 - 1e-12)
    if np.any(bad):
        raise SingularElementError(
            "junction branch at or above the plasma resonance "
            f"({f_pl / 1e9:.4g} GHz)",
            grid.f_hz[np.argmax(bad)],
        )
    w = 2.0 * np.pi * grid.f_hz
    l_eff = junction.l_scale * junction_linear_inductance(junction)
    y_single = 1.0 / (1j * w * l_eff) + 1j * w * junction.c_j
    return junction.n_series / y_single


def matched_shunt_capacitance(junction: JunctionParams, z_system: float = 50.0) -> float:
    """Ground capacitance giving the ladder a z_system image impedance."""
    return branch_inductance(junction) / z_system**2


def resonator_admittance(res: ResonatorParams, f_hz) -> np.ndarray:
    """Shunt admittance of the series r-l-c resonator branch.

    Diverges on resonance when r_loss = 0; callers that cannot tolerate the
    pole must keep that frequency off the grid.
    """
    w = 2.0 * np.pi * np.asarray(f_hz, dtype=float)
    z = res.r_loss + 1j * w * res.l_r + 1.0 / (1j * w * res.c_r)
    return 1.0 / z


def _line_abcd(grid: FrequencyGrid, z0: float, phase_rad: float, f_ref: float) -> AbcdTwoPort:
    """Ideal transmission-line two-port, electrical length linear in f."""
    theta = phase_rad * grid.f_hz / f_ref
    abcd = np.empty((len(grid), 2, 2), dtype=complex)
    abcd[:, 0, 0] = np.cos(theta)
    abcd[:, 0, 1] = 1j * z0 * np.sin(theta)
    abcd[:, 1, 0] = 1j * np.sin(theta) / z0
    abcd[:, 1, 1] = np.cos(theta)
    return AbcdTwoPort(grid, abcd)


def build_unit_cell(spec: DeviceSpec, grid: FrequencyGrid) -> AbcdTwoPort:
    """One unit cell: series junction branch, then c_ground to ground."""
    z_branch = unit_cell_branch_impedance(spec.junction, grid)
    series = series_two_port(grid, z_branch)
    shunt = shunt_two_port(grid, 1j * 2.0 * np.pi * grid.f_hz * spec.c_ground)
    return cascade(series, shunt)


def _supercell_abcd(
    spec: DeviceSpec,
    grid: FrequencyGrid,
    n_cells: int,
    with_resonator: bool,
    with_line: bool,
) -> AbcdTwoPort:
    cell = build_unit_cell(spec, grid)
    parts = []
    if with_resonator:
        k = min(spec.resonator_after_cell, n_cells)
        y_res = resonator_admittance(spec.resonator, grid.f_hz)
        res = shunt_two_port(grid, y_res)
        if k > 0:
            parts.append(AbcdTwoPort(grid, np.linalg.matrix_power(cell.abcd, k)))
        parts.append(res)
        if n_cells - k > 0:
            parts.append(
                AbcdTwoPort(grid, np.linalg.matrix_power(cell.abcd, n_cells - k))
            )
    else:
        parts.append(AbcdTwoPort(grid, np.linalg.matrix_power(cell.abcd, n_cells)))
    if with_line:
        parts.append(
            _line_abcd(
                grid,
                spec.z_system,
                spec.corner_extra_phase,
                spec.corner_phase_ref_hz,
            )
        )
    return cascade(*parts)


def build_supercell(
    spec: DeviceSpec,
    grid: FrequencyGrid,
    kind: str = "standard",
    n_cells: int | None = None,
) -> AbcdTwoPort:
    """Chain matrix of one supercell.

    kind 'standard' includes the resonator (if the spec carries one and the
    supercell is full-length); kind 'corner' drops the resonator and appends
    the bend line.  With corner_extra_phase = 0 a corner reduces exactly to
    a resonator-free standard supercell.
    """
    if kind not in ("standard", "corner"):
        raise ValueError(f"unknown supercell kind {kind!r}")
    n = spec.cells_per_supercell if n_cells is None else int(n_cells)
    if not 1 <= n <= spec.cells_per_supercell:
        raise ValueError("n_cells must lie in 1..cells_per_supercell")
    with_res = (
        kind == "standard"
        and spec.resonator is not None
        and n == spec.cells_per_supercell
    )
    with_line = kind == "corner" and spec.corner_extra_phase != 0.0
    return _supercell_abcd(spec, grid, n, with_res, with_line)


def _supercell_plan(spec: DeviceSpec) -> list:
    """(kind, n_cells) per supercell; trailing partial supercells lose the
    resonator, corner supercells always do."""
    plan = []
    remaining = spec.n_unit_cells
    for index in range(spec.n_supercells):
        n = min(spec.cells_per_supercell, remaining)
        kind = "corner" if index in spec.corner_positions else "standard"
        plan.append((kind, n))
        remaining -= n
    return plan


def _prepare_override(net: Network, spec: DeviceSpec, grid: FrequencyGrid) -> Network:
    if net.n_ports != 2:
        raise ValueError(
            f"override network has {net.n_ports} ports; close internal ports "
            "first (see close_junction_ports)"
        )
    if not (net.z_ref[0] == spec.z_system and net.z_ref[1] == spec.z_system):
        net = renormalize(net, spec.z_system)
    if not net.grid.same_as(grid):
        net = interpolate(net, grid)
    return net


def build_device_chain(
    spec: DeviceSpec,
    grid: FrequencyGrid,
    overrides: dict | None = None,
) -> list:
    """Ordered list of supercell blocks as 2-port Networks at z_system.

    overrides maps 0-based supercell indices to imported Networks that
    replace the analytic block; they are renormalized to z_system and
    interpolated onto the evaluation grid.
    """
    overrides = {} if overrides is None else dict(overrides)
    for key in overrides:
        if not 0 <= int(key) < spec.n_supercells:
            raise ValueError(
                f"override index {key} outside 0..{spec.n_supercells - 1}"
            )
    cache: dict = {}
    blocks = []
    for index, (kind, n) in enumerate(_supercell_plan(spec)):
        if index in overrides:
            blocks.append(_prepare_override(overrides[index], spec, grid))
            continue
        if (kind, n) not in cache:
            abcd = build_supercell(spec, grid, kind, n_cells=n)
            cache[(kind, n)] = abcd_to_s(abcd, z_ref=spec.z_system)
        blocks.append(cache[(kind, n)])
    return blocks


def linear_s21(
    spec: DeviceSpec,
    grid: FrequencyGrid,
    overrides: dict | None = None,
) -> LinearSpectrum:
    """Small-signal response of the full line between z_system terminations."""
    blocks = build_device_chain(spec, grid, overrides)
    net = chain_networks(*blocks)
    return LinearSpectrum(grid, s11=net.s[:, 0, 0], s21=net.s[:, 1, 0])


def close_junction_ports(net: Network, junction: JunctionParams) -> Network:
    """Terminate the junction ports of an imported multiport block.

    Ports 1 and 2 are the through line; every further port sits across one
    series junction branch.  Closing a port on the branch's small-signal
    impedance restores the passive two-port block.
    """
    if net.n_ports <= 2:
        return net
    z_branch = unit_cell_branch_impedance(junction, net.grid)
    terminations = {}
    for port in range(3, net.n_ports + 1):
        z_ref = net.z_ref[port - 1]
        terminations[port] = (z_branch - z_ref) / (z_branch + z_ref)
    return reduce_ports(net, terminations)


@dataclass(frozen=True)
class LadderLayout:
    """Flat node/branch picture of the line for nodal (pump) analysis.

    Nodes are numbered from the input port (0) to the output port
    (n_nodes - 1).  Every segment joins consecutive nodes and is either a
    junction branch or an ideal line section (corner bends).  Shunt
    attachments are recorded as node indices.
    """

    n_nodes: int
    junction_nodes: np.ndarray  # (n_junctions, 2) int, left/right node
    line_nodes: np.ndarray  # (n_lines, 2) int
    cap_nodes: np.ndarray  # nodes carrying c_ground
    resonator_nodes: np.ndarray  # nodes carrying the resonator branch

    def __post_init__(self):
        for name in ("junction_nodes", "line_nodes", "cap_nodes", "resonator_nodes"):
            arr = np.asarray(getattr(self, name), dtype=int)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def ladder_layout(spec: DeviceSpec) -> LadderLayout:
    """Enumerate nodes and branches following the supercell plan."""
    node = 0
    junctions = []
    lines = []
    caps = []
    resonators = []
    for kind, n in _supercell_plan(spec):
        with_res = (
            kind == "standard"
            and spec.resonator is not None
            and n == spec.cells_per_supercell
        )
        if with_res and spec.resonator_after_cell == 0:
            resonators.append(node)
        for cell in range(1, n + 1):
            junctions.append((node, node + 1))
            node += 1
            caps.append(node)
            if with_res and cell == spec.resonator_after_cell:
                resonators.append(node)
        if kind == "corner" and spec.corner_extra_phase != 0.0:
            lines.append((node, node + 1))
            node += 1
    layout = LadderLayout(
        n_nodes=node + 1,
        junction_nodes=np.array(junctions, dtype=int).reshape(-1, 2),
        line_nodes=np.array(lines, dtype=int).reshape(-1, 2),
        cap_nodes=np.array(caps, dtype=int),
        resonator_nodes=np.array(resonators, dtype=int),
    )
    assert layout.junction_nodes.shape[0] == spec.n_unit_cells
    return layout


def _even_corner_positions(n_supercells: int, n_corners: int) -> tuple:
    return tuple(
        round((i + 1) * n_supercells / (n_corners + 1)) for i in range(n_corners)
    )


def default_spec() -> DeviceSpec:
    """The reference design: measured junction values, matched ground
    capacitance, resonator dip at 7.62 GHz, nine evenly spaced corners."""
    junction = JunctionParams(i_c=REF_I_C, c_j=REF_C_J, n_series=REF_N_SERIES)
    n_supercells = -(-REF_N_UNIT_CELLS // REF_CELLS_PER_SUPERCELL)
    return DeviceSpec(
        junction=junction,
        c_ground=matched_shunt_capacitance(junction, 50.0),
        resonator=ResonatorParams(
            f_r=REF_F_RESONATOR, c_r=REF_C_RESONATOR, r_loss=REF_R_RESONATOR
        ),
        n_unit_cells=REF_N_UNIT_CELLS,
        cells_per_supercell=REF_CELLS_PER_SUPERCELL,
        corner_positions=_even_corner_positions(n_supercells, REF_N_CORNERS),
        corner_extra_phase=REF_CORNER_PHASE,
        corner_phase_ref_hz=REF_CORNER_PHASE_REF,
        z_system=50.0,
    )
