from sehs.bridge.beam import (
    BeamModel,
    BeamSystem,
    CrackSpec,
    assemble_beam,
    beam_modal_frequencies,
    free_vibration,
    static_deflection,
)
from sehs.bridge.passage import PassageRecord, load_passage, save_passage, simulate_passage
from sehs.bridge.road import RoadProfile, generate_road_profile
from sehs.bridge.vehicle import (
    TABLE_VEHICLE_FIXED,
    VehicleModel,
    VehicleRanges,
    sample_vehicle_params,
)

__all__ = [
    "BeamModel",
    "BeamSystem",
    "CrackSpec",
    "assemble_beam",
    "beam_modal_frequencies",
    "free_vibration",
    "static_deflection",
    "RoadProfile",
    "generate_road_profile",
    "VehicleModel",
    "VehicleRanges",
    "TABLE_VEHICLE_FIXED",
    "sample_vehicle_params",
    "PassageRecord",
    "simulate_passage",
    "save_passage",
    "load_passage",
]
