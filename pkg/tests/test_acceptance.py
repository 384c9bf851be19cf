"""Acceptance criteria, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the report lines.
"""
import random
import subprocess
import sys
import time
from fractions import Fraction as Q

from conftest import MANIFESTS, load
from oracles import cascade_oracle, coprime_pairs, random_geometric_model
from sasaki_mmp.engine import (
    INFINITY,
    FlowState,
    SurgeryKind,
    canonical_index,
    classify_step,
    extremal_face,
    nef_threshold,
    perform_step,
    run_mmp,
)
from sasaki_mmp.errors import EngineError
from sasaki_mmp.hj import (
    CyclicQuotientType,
    SingularityClass,
    chain_gram,
    classify_singularity,
    contract_through_chain,
    discrepancies,
    hj_evaluate,
    hj_expand,
)
from sasaki_mmp.lattice import CurveRecord, SurfaceModel, validate_model
from sasaki_mmp.local_model import run_suite
from sasaki_mmp.topology import replay


def report(n, ok, detail):
    print(f"ACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_01_hj_round_trip():
    start = time.perf_counter()
    cases = bad = 0
    for r, a in coprime_pairs(200):
        cases += 1
        sing = CyclicQuotientType(r, a)
        bad += hj_evaluate(hj_expand(sing)) != sing
    elapsed = time.perf_counter() - start
    report(1, bad == 0 and elapsed < 2.0, f"round trip r<=200: {cases} cases, {bad} failures, {elapsed:.2f}s (limit 2s)")


def test_02_k_over_one():
    bad = []
    for k in range(1, 51):
        # 1/1 is the smooth point: its expansion is empty, the identity [1] = 1/1
        # is checked through evaluation and the single-curve discrepancy solve
        chain = (k,) if k == 1 else hj_expand(CyclicQuotientType(k, 1)).entries
        value = hj_evaluate(chain)
        if chain != (k,) or (value.r, value.a) != (k, 1) or discrepancies(chain) != (Q(2 - k, k),):
            bad.append(k)
    report(2, not bad, f"k/1 = [k], disc (2-k)/k for k=1..50: mismatches {bad}")


def test_03_du_val():
    bad = []
    for r in range(2, 51):
        chain = hj_expand(CyclicQuotientType(r, r - 1)).entries
        disc = discrepancies(chain)
        if chain != (2,) * (r - 1) or any(disc) or classify_singularity(disc) != SingularityClass.Canonical:
            bad.append(r)
    report(3, not bad, f"1/r(1,r-1) -> [2,...,2], disc 0, Canonical for r<=50: mismatches {bad}")


def test_04_klt():
    violations = cases = zero_mismatch = 0
    for r, a in coprime_pairs(100):
        cases += 1
        chain = hj_expand(CyclicQuotientType(r, a)).entries
        disc = discrepancies(chain)
        violations += sum(not (-1 < x <= 0) for x in disc)
        zero_mismatch += all(x == 0 for x in disc) != all(b == 2 for b in chain)
    report(4, violations == 0 and zero_mismatch == 0,
           f"disc in (-1,0] for r<=100: {cases} singularities, {violations} violations, {zero_mismatch} Du Val mismatches")


def test_05_cascade_oracle():
    start = time.perf_counter()
    cases = contractible = mismatches = 0
    for r, a in coprime_pairs(60):
        chain = hj_expand(CyclicQuotientType(r, a)).entries
        for j in range(1, len(chain) + 1):
            cases += 1
            expected = cascade_oracle(chain, j)
            try:
                out = contract_through_chain(chain, j)
            except EngineError:
                mismatches += expected is not None
                continue
            contractible += 1
            ok = expected is not None and chain_gram(out.chain) == expected and out.result.r < r
            mismatches += not ok
    elapsed = time.perf_counter() - start
    report(5, mismatches == 0 and elapsed < 30.0,
           f"cascade vs lattice oracle r<=60: {cases} cases ({contractible} contractible), "
           f"{mismatches} mismatches, {elapsed:.2f}s (limit 30s)")


def _events(log):
    return [(e.kind, e.time, e.contracted) for e in log.events]


def test_06_worked_run():
    model, topo = load("blowup_cp2.json")
    log = run_mmp(FlowState(model))
    _, end = replay(topo, log)
    ok = (
        _events(log) == [
            (SurgeryKind.DivisorialFloating, Q(1), ("E",)),
            (SurgeryKind.FiberToPoint, Q(4, 3), ("L", "l")),
        ]
        and log.picard_trace == [2, 1]
        and log.volume_breakpoints == [(0, 15), (1, 1), (Q(4, 3), 0)]
        and str(end) == "Sphere5"
    )
    report(6, ok, f"worked run: {[(k.value, str(t), c) for k, t, c in _events(log)]}, "
           f"picard {log.picard_trace}, volume {[(str(t), str(v)) for t, v in log.volume_breakpoints]}, end {end}")


def test_07_ruled_run():
    model, topo = load("ruled_f1.json")
    assert model.H == (2, -1)
    log = run_mmp(FlowState(model))
    _, end = replay(topo, log)
    [event] = log.events
    ok = (
        event.kind is SurgeryKind.FiberToCurve
        and event.time == Q(1, 2)
        and event.limit_class == (Q(1, 2), Q(-1, 2))
        and log.volume_breakpoints[-1] == (Q(1, 2), 0)
        and str(end) == "RuledOverGenus(0)"
    )
    report(7, ok, f"ruled run: {event.kind.value} at t={event.time}, limit {[str(x) for x in event.limit_class]}, "
           f"final volume {log.volume_breakpoints[-1][1]}, end {end}")


def test_08_rationality_bound():
    rng = random.Random(20261014)
    models = thresholds = violations = 0
    while models < 500:
        model = random_geometric_model(rng)
        if validate_model(model):
            continue
        models += 1
        state = FlowState(model)
        # every step of the run is itself a model the bound applies to
        while not state.terminal:
            t0 = nef_threshold(state)
            if t0 == INFINITY:
                break
            thresholds += 1
            violations += not (0 < t0.denominator <= 3 * canonical_index(state.model))
            state = perform_step(state, classify_step(state, t0, extremal_face(state, t0)))
    report(8, violations == 0, f"q <= 3 a(Z): {models} models, {thresholds} finite thresholds, {violations} violations")


def test_09_extremal_bound():
    model = SurfaceModel(
        basis_labels=("D",),
        gram=((Q(1, 5),),),
        K=(Q(-1),),
        H=(Q(1),),
        curves=(CurveRecord("C", (Q(25),)),),
    )
    msgs = validate_model(model)
    ok = any("0 < -K.C <= 4" in m and "-K.C = 5" in m for m in msgs)
    report(9, ok, f"-K.C = 5 rejected: {msgs}")


def test_10_local_model():
    start = time.perf_counter()
    serial = {k: run_suite(k, 10_000, seed=0, workers=1) for k in (1, 2, 3)}
    elapsed = time.perf_counter() - start
    threaded = {k: run_suite(k, 10_000, seed=0, workers=4) for k in (1, 2, 3)}
    limits = {
        "chart_consistency": 1e-12,
        "involution": 1e-12,
        "equivariance": 1e-9,
        "pullback_identity": 1e-9,
        "membership": 1e-9,
    }
    failed = [
        f"k={k} {c.name}={c.residual:.2e}"
        for k, results in serial.items()
        for c in results
        if c.name in limits and not c.residual < limits[c.name]
    ]
    seen = {c.name for c in serial[1]}
    missing = sorted(set(limits) - seen)
    independent = all(
        [(c.name, c.residual) for c in serial[k]] == [(c.name, c.residual) for c in threaded[k]] for k in serial
    )
    worst = max(c.residual for results in serial.values() for c in results)
    report(10, not failed and not missing and independent and elapsed < 5.0,
           f"local model k=1,2,3 x 1e4 samples: worst residual {worst:.2e}, failures {failed}, missing {missing}, "
           f"worker-independent {independent}, {elapsed:.2f}s (limit 5s)")


def test_11_determinism():
    outputs = {}
    for path in sorted(MANIFESTS.glob("*.json")):
        runs = [
            subprocess.run([sys.executable, "-m", "sasaki_mmp", "mmp", str(path), "--trace"], capture_output=True)
            for _ in range(2)
        ]
        outputs[path.name] = (
            runs[0].returncode == 0 and runs[0].stdout == runs[1].stdout and runs[0].stderr == runs[1].stderr
        )
    report(11, len(outputs) > 0 and all(outputs.values()), f"mmp --trace byte-identical: {outputs}")
