"""Diffeomorphism bookkeeping for the total space across surgeries.

Simply connected 5-manifolds here are S^5, #k(S^2 x S^3) and the non-spin
twisted variants; a blow-up along a regular fibre adds one S^2 x S^3-type
summand, with a Z_2 choice of gluing (pi_1 SO(4) = Z_2).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .engine import RunLog, SurgeryEvent, SurgeryKind
from .errors import EngineError


@dataclass(frozen=True)
class TopologyState:
    simply_connected: bool = True
    s2xs3_summands: int = 0
    twisted: bool = False
    base_genus: int | None = None
    regular: bool = True

    def __post_init__(self):
        if self.s2xs3_summands < 0:
            raise ValueError("summand count must be non-negative")
        if self.base_genus is not None and self.base_genus < 0:
            raise ValueError("base genus must be non-negative")


class EndTag(enum.Enum):
    Sphere5 = "Sphere5"
    ConnectedSumS2xS3 = "ConnectedSumS2xS3"
    TwistedS2xS3 = "TwistedS2xS3"
    RuledOverGenus = "RuledOverGenus"
    TwistedRuledOverGenus = "TwistedRuledOverGenus"
    QuasiRegularNefModel = "QuasiRegularNefModel"
    FanoOrbibundle = "FanoOrbibundle"


@dataclass(frozen=True)
class EndType:
    tag: EndTag
    param: int | None = None

    def __str__(self) -> str:
        if self.param is None:
            return self.tag.value
        return f"{self.tag.value}({self.param})"


def apply_blowup(topo: TopologyState, twisted_gluing: bool = False) -> TopologyState:
    return replace(
        topo,
        s2xs3_summands=topo.s2xs3_summands + 1,
        twisted=topo.twisted or twisted_gluing,
    )


def apply_contraction(topo: TopologyState, event: SurgeryEvent, regular_after: bool | None = None) -> TopologyState:
    """Remove one summand per contracted curve.

    ``regular_after`` says whether singular fibres survive an extremal
    contraction; it defaults to all chain updates resolving to smooth points.
    The twisted flag is sticky.
    """
    if event.kind not in (SurgeryKind.DivisorialFloating, SurgeryKind.ExtremalThroughSingularity):
        raise EngineError(f"{event.kind} is not a contraction")
    n = len(event.contracted)
    if n > topo.s2xs3_summands:
        raise EngineError(
            f"summand underflow: contracting {n} curve(s) with {topo.s2xs3_summands} S2xS3 summand(s)"
        )
    out = replace(topo, s2xs3_summands=topo.s2xs3_summands - n)
    if event.kind is SurgeryKind.ExtremalThroughSingularity:
        if regular_after is None:
            regular_after = all(u.outcome.result.is_smooth for u in event.chain_updates)
        out = replace(out, regular=regular_after)
    return out


def classify_end(topo: TopologyState, verdict: str) -> EndType:
    if verdict == "NefModel":
        return EndType(EndTag.QuasiRegularNefModel)
    if verdict == "RuledFibration":
        if topo.base_genus is None:
            raise EngineError("ruled end state needs base_genus in the topology metadata")
        tag = EndTag.TwistedRuledOverGenus if topo.twisted else EndTag.RuledOverGenus
        return EndType(tag, topo.base_genus)
    if verdict == "FanoCollapse":
        if not (topo.regular and topo.simply_connected):
            return EndType(EndTag.FanoOrbibundle)
        k = topo.s2xs3_summands
        if k == 0:
            return EndType(EndTag.Sphere5)
        if topo.twisted:
            return EndType(EndTag.TwistedS2xS3, k)
        return EndType(EndTag.ConnectedSumS2xS3, k)
    raise EngineError(f"unknown verdict {verdict!r}")


def replay(topo: TopologyState, log: RunLog) -> tuple[TopologyState, EndType]:
    """Push the topology through every contraction of a finished run."""
    contractions = 0
    for event in log.events:
        if event.kind.terminal:
            break
        contractions += 1
        regular_after = log.singular_trace[contractions] == 0
        topo = apply_contraction(topo, event, regular_after)
    return topo, classify_end(topo, log.verdict)
