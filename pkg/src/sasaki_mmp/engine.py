"""Minimal model program with scaling, driven by the linear cohomology flow.

The transverse Kähler class moves as ``H + t K`` (``c_1^B = -[K^T]``). At
each nef threshold the killed face of the declared Mori cone is contracted,
or the flow ends in a collapse / nef model.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import NamedTuple, Union

from .errors import EngineError, InternalConsistencyError
from .hj import ChainContractionOutcome, CyclicQuotientType, contract_through_chain, hj_expand
from .lattice import (
    CurveRecord,
    DivisorClass,
    SurfaceModel,
    adjunction_genus,
    contract_curve,
    contract_minus_one_class,
    expected_curve_numbers,
    is_floating,
    pair,
)
from .qmath import denominator_lcm, fmt_q, fmt_vec

INFINITY = math.inf
Threshold = Union[Fraction, float]


class SurgeryKind(enum.Enum):
    DivisorialFloating = "DivisorialFloating"
    ExtremalThroughSingularity = "ExtremalThroughSingularity"
    FiberToCurve = "FiberToCurve"
    FiberToPoint = "FiberToPoint"
    NefTermination = "NefTermination"

    @property
    def terminal(self) -> bool:
        return self in (SurgeryKind.FiberToCurve, SurgeryKind.FiberToPoint, SurgeryKind.NefTermination)

    def __str__(self) -> str:
        return self.value


VERDICTS = {
    SurgeryKind.FiberToPoint: "FanoCollapse",
    SurgeryKind.FiberToCurve: "RuledFibration",
    SurgeryKind.NefTermination: "NefModel",
}


class ChainUpdate(NamedTuple):
    sing_id: str
    before: CyclicQuotientType
    outcome: ChainContractionOutcome

    def __str__(self) -> str:
        b, a = self.before, self.outcome.result
        return f"{self.sing_id}:{b.r}/{b.a}→{a.r}/{a.a}"


@dataclass(frozen=True)
class FlowState:
    model: SurfaceModel
    t_elapsed: Fraction = Fraction(0)
    H_current: DivisorClass | None = None
    terminal: bool = False

    def __post_init__(self):
        if self.H_current is None:
            object.__setattr__(self, "H_current", self.model.H)
        object.__setattr__(self, "t_elapsed", Fraction(self.t_elapsed))


@dataclass(frozen=True)
class SurgeryEvent:
    kind: SurgeryKind
    time: Threshold
    step: Threshold
    contracted: tuple[str, ...] = ()
    chain_updates: tuple[ChainUpdate, ...] = ()
    limit_class: DivisorClass = ()

    def format(self) -> str:
        fields = [
            str(self.kind),
            "inf" if self.time == INFINITY else fmt_q(self.time),
            ",".join(self.contracted) or "-",
            ",".join(str(u) for u in self.chain_updates) or "-",
            fmt_vec(self.limit_class) or "-",
        ]
        return "\t".join(fields)


@dataclass(frozen=True)
class NefCertificate:
    step: int
    threshold: Fraction
    pairings: tuple[tuple[str, Fraction], ...]
    overshoot: Fraction
    violators: tuple[str, ...]

    def format(self) -> str:
        pairs = ",".join(f"{n}:{fmt_q(v)}" for n, v in self.pairings) or "-"
        return (
            f"trace\tstep={self.step}\tthreshold={fmt_q(self.threshold)}\tpairings={pairs}"
            f"\tovershoot={fmt_q(self.overshoot)}\tnegative={','.join(self.violators)}"
        )


@dataclass
class RunLog:
    events: list[SurgeryEvent] = field(default_factory=list)
    picard_trace: list[int] = field(default_factory=list)
    volume_breakpoints: list[tuple[Fraction, Fraction]] = field(default_factory=list)
    singular_trace: list[int] = field(default_factory=list)
    certificates: list[NefCertificate] = field(default_factory=list)
    verdict: str = ""
    final_state: FlowState | None = None

    def lines(self, trace: bool = False) -> list[str]:
        out = []
        certs = {c.step: c for c in self.certificates}
        for n, event in enumerate(self.events, start=1):
            if trace and n in certs:
                out.append(certs[n].format())
            out.append(event.format())
        out.append("picard\t" + ",".join(str(r) for r in self.picard_trace))
        out.append("volume\t" + ",".join(f"{fmt_q(t)}:{fmt_q(v)}" for t, v in self.volume_breakpoints))
        out.append(f"verdict\t{self.verdict}")
        return out


def _flow(state: FlowState, s) -> DivisorClass:
    return tuple(h + s * k for h, k in zip(state.H_current, state.model.K))


def nef_threshold(state: FlowState) -> Threshold:
    """Largest ``s`` with ``H + sK`` nef on the declared curves (exact)."""
    model = state.model
    best: Threshold = INFINITY
    for c in model.curves:
        kc = pair(model, model.K, c.cls)
        if kc < 0:
            ratio = pair(model, state.H_current, c.cls) / -kc
            if ratio < best:
                best = ratio
    return best


def extremal_face(state: FlowState, t0: Fraction) -> list[CurveRecord]:
    model = state.model
    limit = _flow(state, t0)
    face = [
        c
        for c in model.curves
        if pair(model, limit, c.cls) == 0 and pair(model, model.K, c.cls) < 0
    ]
    if not face:
        raise EngineError(f"no declared curve attains the threshold t={t0}")
    return sorted(face, key=lambda c: c.name)


def classify_step(state: FlowState, t0: Threshold, face) -> SurgeryEvent:
    model = state.model
    if t0 == INFINITY:
        return SurgeryEvent(SurgeryKind.NefTermination, INFINITY, INFINITY, limit_class=state.H_current)
    limit = _flow(state, t0)
    time = state.t_elapsed + t0
    names = tuple(sorted(c.name for c in face))
    if not face:
        raise EngineError("empty extremal face")

    def event(kind, updates=()):
        return SurgeryEvent(kind, time, t0, names, tuple(updates), limit)

    if all(x == 0 for x in limit):
        return event(SurgeryKind.FiberToPoint)
    volume = pair(model, limit, limit)
    if volume < 0:
        raise EngineError(f"limit class is nef on the declared cone but has negative square {volume}")
    if volume == 0:
        for c in face:
            if not c.sing_incidence and adjunction_genus(model, c) != 0:
                raise EngineError(f"fibre curve {c.name} is not rational")
        return event(SurgeryKind.FiberToCurve)

    floating = [c for c in face if not c.sing_incidence]
    singular = [c for c in face if c.sing_incidence]
    if floating and singular:
        raise EngineError(
            "unsupported configuration: face mixes floating and singular curves "
            f"({','.join(names)})"
        )
    if floating:
        for c in floating:
            if not is_floating(model, c):
                raise EngineError(f"face curve {c.name} is not a floating (-1)-curve")
        for a, b in itertools.combinations(floating, 2):
            if pair(model, a.cls, b.cls) != 0:
                raise EngineError(f"input inconsistency: floating curves {a.name}, {b.name} meet")
        return event(SurgeryKind.DivisorialFloating)

    if len(singular) > 1:
        raise EngineError(f"unsupported configuration: several singular curves in one face ({','.join(names)})")
    gamma = singular[0]
    expected = expected_curve_numbers(model, gamma)
    actual = (pair(model, gamma.cls, gamma.cls), pair(model, model.K, gamma.cls))
    if actual != expected:
        raise EngineError(
            f"curve {gamma.name}: (C.C, K.C) = ({actual[0]}, {actual[1]}) but the resolution "
            f"lattice forces ({expected[0]}, {expected[1]})"
        )
    updates = []
    for sid in sorted(gamma.sing_incidence):
        sing = model.singularity(sid)
        outcome = contract_through_chain(hj_expand(sing), gamma.attach_index(sid))
        updates.append(ChainUpdate(sid, sing, outcome))
    return event(SurgeryKind.ExtremalThroughSingularity, updates)


def perform_step(state: FlowState, event: SurgeryEvent) -> FlowState:
    if state.terminal:
        raise EngineError(f"state is terminal; cannot apply {event.kind}")
    if event.kind.terminal:
        t = state.t_elapsed if event.time == INFINITY else Fraction(event.time)
        return replace(state, t_elapsed=t, terminal=True)
    model = state.model
    limit = _flow(state, event.step)
    if event.kind is SurgeryKind.DivisorialFloating:
        for name in event.contracted:
            curve = model.curve(name)
            model = contract_minus_one_class(model, curve, limit)
            limit = model.H
    else:
        gamma = model.curve(event.contracted[0])
        old = model
        model = contract_curve(model, gamma, limit)
        model = _update_singularities(old, gamma, model, event.chain_updates)
        limit = model.H
    model = replace(model, H=limit)
    return FlowState(model, state.t_elapsed + event.step, limit)


def _update_singularities(old: SurfaceModel, gamma: CurveRecord, new: SurfaceModel, updates) -> SurfaceModel:
    results = {u.sing_id: u.outcome.result for u in updates}
    sings = tuple(
        (sid, results.get(sid, sing))
        for sid, sing in new.sings
        if not results.get(sid, sing).is_smooth
    )
    meets_gamma = {c.name for c in old.curves if c.name != gamma.name and pair(old, c.cls, gamma.cls) != 0}
    curves = []
    for c in new.curves:
        incidence = [s for s in c.sing_incidence if s not in results]
        for sid, res in results.items():
            if not res.is_smooth and (sid in c.sing_incidence or c.name in meets_gamma):
                incidence.append(sid)
        attach = tuple((s, j) for s, j in c.attach if s not in results)
        curves.append(replace(c, sing_incidence=tuple(sorted(incidence)), attach=attach))
    return replace(new, sings=sings, curves=tuple(curves))


def nef_certificate(state: FlowState, t0: Fraction, step: int) -> NefCertificate:
    model = state.model
    limit = _flow(state, t0)
    eps = Fraction(1, Fraction(t0).denominator)
    over = _flow(state, t0 + eps)
    curves = sorted(model.curves, key=lambda c: c.name)
    pairings = tuple((c.name, pair(model, limit, c.cls)) for c in curves)
    violators = tuple(c.name for c in curves if pair(model, over, c.cls) < 0)
    return NefCertificate(step, t0, pairings, t0 + eps, violators)


def run_mmp(initial: FlowState) -> RunLog:
    state = initial
    log = RunLog()
    log.picard_trace.append(state.model.rank)
    log.singular_trace.append(len(state.model.sings))
    log.volume_breakpoints.append((state.t_elapsed, pair(state.model, state.H_current, state.H_current)))
    budget = state.model.rank + sum(len(hj_expand(s)) for _, s in state.model.sings) + 1
    while True:
        if len(log.events) >= budget:
            raise InternalConsistencyError(f"MMP did not terminate within {budget} events")
        t0 = nef_threshold(state)
        if t0 == INFINITY:
            event = classify_step(state, t0, [])
        else:
            log.certificates.append(nef_certificate(state, t0, len(log.events) + 1))
            event = classify_step(state, t0, extremal_face(state, t0))
        log.events.append(event)
        if event.kind.terminal:
            if event.kind is not SurgeryKind.NefTermination:
                log.volume_breakpoints.append((event.time, pair(state.model, event.limit_class, event.limit_class)))
            state = perform_step(state, event)
            log.verdict = VERDICTS[event.kind]
            log.final_state = state
            return log
        state = perform_step(state, event)
        log.picard_trace.append(state.model.rank)
        log.singular_trace.append(len(state.model.sings))
        log.volume_breakpoints.append((state.t_elapsed, pair(state.model, state.H_current, state.H_current)))


def flow_class(state: FlowState, s) -> DivisorClass:
    s = Fraction(s)
    if s < 0:
        raise EngineError(f"flow time must be non-negative, got {s}")
    t0 = nef_threshold(state)
    if s > t0:
        raise EngineError(f"class leaves nef cone at t={t0}")
    return _flow(state, s)


def transverse_volume(state: FlowState, s) -> Fraction:
    d = flow_class(state, s)
    return pair(state.model, d, d)


def canonical_index(model: SurfaceModel) -> int:
    """Least ``a`` with ``a K`` pairing integrally against every declared class."""
    declared = [model.K, model.H] + [c.cls for c in model.curves]
    return denominator_lcm(pair(model, model.K, d) for d in declared)
