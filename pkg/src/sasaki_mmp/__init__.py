"""Foliation minimal model program for quasi-regular Sasakian 5-manifolds.

Exact lattice engine over the leaf orbifold, Hirzebruch-Jung resolution
data, surgery scheduling along the cohomology-level Sasaki-Ricci flow, and
a numerical checker for the local resolution model.
"""
from .engine import FlowState, RunLog, SurgeryEvent, SurgeryKind, nef_threshold, run_mmp
from .hj import (
    CyclicQuotientType,
    HJChain,
    SingularityClass,
    classify_singularity,
    contract_through_chain,
    discrepancies,
    hj_evaluate,
    hj_expand,
)
from .lattice import CurveRecord, SurfaceModel, validate_model
from .manifest import parse_manifest, serialize_manifest
from .topology import EndType, TopologyState

__all__ = [
    "CurveRecord",
    "CyclicQuotientType",
    "EndType",
    "FlowState",
    "HJChain",
    "RunLog",
    "SingularityClass",
    "SurfaceModel",
    "SurgeryEvent",
    "SurgeryKind",
    "TopologyState",
    "classify_singularity",
    "contract_through_chain",
    "discrepancies",
    "hj_evaluate",
    "hj_expand",
    "nef_threshold",
    "parse_manifest",
    "run_mmp",
    "serialize_manifest",
    "validate_model",
]
