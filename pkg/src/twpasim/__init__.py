"""Frequency-domain simulation of Josephson traveling-wave amplifiers.

The package splits into four layers:

- ``netcore``: two-port/ n-port microwave network algebra (cascades,
  renormalization, port reduction) on shared frequency grids.
- ``touchstone``: reader/writer for version-1 Touchstone S-parameter files.
- ``device``: the nonlinear-ladder circuit description — junction branches,
  shunt capacitors, phase-matching resonators — with both a cascaded
  two-port view and a flat nodal layout for the solvers.
- ``hbsolver``: harmonic-balance pump steady state plus the linearized
  sideband (conversion-matrix) gain calculation.

``cli`` wraps the above in a command-line tool (``twpa``).
"""

from .device import (
    DeviceSpec,
    JunctionParams,
    LadderLayout,
    LinearSpectrum,
    ResonatorParams,
    branch_inductance,
    branch_plasma_frequency,
    build_device_chain,
    build_supercell,
    build_unit_cell,
    close_junction_ports,
    default_spec,
    junction_linear_inductance,
    ladder_layout,
    linear_s21,
    matched_shunt_capacitance,
)
from .hbsolver import (
    DivergenceError,
    GainSpectrum,
    HbOptions,
    InstabilityError,
    OverdriveError,
    PumpDrive,
    PumpSolution,
    SolverError,
    SweepPoint,
    SweepResult,
    conversion_gain,
    dbm_to_power,
    dbm_to_source_amplitude,
    make_sideband_grid,
    manley_rowe_defect,
    solve_pump,
    sweep,
)
from .netcore import (
    AbcdTwoPort,
    FrequencyGrid,
    Network,
    SingularElementError,
    SingularNetworkError,
    abcd_to_s,
    cascade,
    chain_networks,
    interpolate,
    reduce_ports,
    renormalize,
    s_to_abcd,
    series_two_port,
    shunt_two_port,
)
from .touchstone import (
    TouchstoneDocument,
    TouchstoneError,
    parse_touchstone,
    ports_from_path,
    read_touchstone,
    write_touchstone,
)

__version__ = "0.1.0"

__all__ = [
    "AbcdTwoPort",
    "DeviceSpec",
    "DivergenceError",
    "FrequencyGrid",
    "GainSpectrum",
    "HbOptions",
    "InstabilityError",
    "JunctionParams",
    "LadderLayout",
    "LinearSpectrum",
    "Network",
    "OverdriveError",
    "PumpDrive",
    "PumpSolution",
    "ResonatorParams",
    "SingularElementError",
    "SingularNetworkError",
    "SolverError",
    "SweepPoint",
    "SweepResult",
    "TouchstoneDocument",
    "TouchstoneError",
    "abcd_to_s",
    "branch_inductance",
    "branch_plasma_frequency",
    "build_device_chain",
    "build_supercell",
    "build_unit_cell",
    "cascade",
    "chain_networks",
    "close_junction_ports",
    "conversion_gain",
    "dbm_to_power",
    "dbm_to_source_amplitude",
    "default_spec",
    "interpolate",
    "junction_linear_inductance",
    "ladder_layout",
    "linear_s21",
    "make_sideband_grid",
    "manley_rowe_defect",
    "matched_shunt_capacitance",
    "parse_touchstone",
    "ports_from_path",
    "read_touchstone",
    "reduce_ports",
    "renormalize",
    "s_to_abcd",
    "series_two_port",
    "shunt_two_port",
    "solve_pump",
    "sweep",
    "write_touchstone",
]
