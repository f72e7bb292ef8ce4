from sehs.peh.bspline import basis_functions, open_knot_vector
from sehs.peh.modal import (
    ReducedPeh,
    reduce_model,
    solve_modes,
    voltage_frf,
    voltage_frf_full,
)
from sehs.peh.plate import (
    DEFAULT_THICKNESS,
    PehDesign,
    PehSystem,
    PiezoMaterial,
    SubstrateMaterial,
    assemble_peh,
)
from sehs.peh.response import (
    VoltageTrace,
    export_frf_csv,
    fundamental_frequency_map,
    harvested_energy,
    load_voltage_trace,
    save_voltage_trace,
    select_load_resistance,
    simulate_voltage,
)

__all__ = [
    "basis_functions",
    "open_knot_vector",
    "PehDesign",
    "PehSystem",
    "SubstrateMaterial",
    "PiezoMaterial",
    "DEFAULT_THICKNESS",
    "assemble_peh",
    "ReducedPeh",
    "solve_modes",
    "reduce_model",
    "voltage_frf",
    "voltage_frf_full",
    "VoltageTrace",
    "simulate_voltage",
    "harvested_energy",
    "select_load_resistance",
    "fundamental_frequency_map",
    "save_voltage_trace",
    "load_voltage_trace",
    "export_frf_csv",
]
