import pytest

from conftest import load
from sasaki_mmp.engine import FlowState, SurgeryEvent, SurgeryKind, run_mmp
from sasaki_mmp.errors import EngineError
from sasaki_mmp.topology import (
    EndTag,
    TopologyState,
    apply_blowup,
    apply_contraction,
    classify_end,
    replay,
)

S5 = TopologyState()


def floating(*names):
    return SurgeryEvent(SurgeryKind.DivisorialFloating, 1, 1, names)


def test_blowup_of_sphere():
    assert apply_blowup(S5) == TopologyState(s2xs3_summands=1)
    assert apply_blowup(S5, twisted_gluing=True) == TopologyState(s2xs3_summands=1, twisted=True)
    assert apply_blowup(apply_blowup(S5)).s2xs3_summands == 2


def test_contraction():
    assert apply_contraction(apply_blowup(S5), floating("E")) == S5
    assert apply_contraction(TopologyState(s2xs3_summands=2), floating("A", "B")).s2xs3_summands == 0
    with pytest.raises(EngineError, match="underflow"):
        apply_contraction(S5, floating("E"))


@pytest.mark.parametrize("twisted", [False, True])
def test_blowup_contraction_inverse(twisted):
    start = TopologyState(s2xs3_summands=3, twisted=twisted)
    assert apply_contraction(apply_blowup(start, twisted), floating("E")) == start


def test_twisted_flag_is_sticky():
    out = apply_contraction(apply_blowup(S5, True), floating("E"))
    assert out.twisted and out.s2xs3_summands == 0
    assert classify_end(out, "FanoCollapse").tag is EndTag.Sphere5


def test_not_a_contraction():
    with pytest.raises(EngineError):
        apply_contraction(S5, SurgeryEvent(SurgeryKind.FiberToPoint, 1, 1))


def test_classify():
    assert str(classify_end(S5, "FanoCollapse")) == "Sphere5"
    assert str(classify_end(TopologyState(s2xs3_summands=2), "FanoCollapse")) == "ConnectedSumS2xS3(2)"
    assert str(classify_end(TopologyState(s2xs3_summands=1, twisted=True), "FanoCollapse")) == "TwistedS2xS3(1)"
    assert str(classify_end(TopologyState(regular=False), "FanoCollapse")) == "FanoOrbibundle"
    assert str(classify_end(TopologyState(base_genus=0), "RuledFibration")) == "RuledOverGenus(0)"
    assert str(classify_end(TopologyState(base_genus=2, twisted=True), "RuledFibration")) == "TwistedRuledOverGenus(2)"
    assert str(classify_end(S5, "NefModel")) == "QuasiRegularNefModel"
    with pytest.raises(EngineError, match="base_genus"):
        classify_end(S5, "RuledFibration")


@pytest.mark.parametrize(
    "fixture,end",
    [
        ("blowup_cp2.json", "Sphere5"),
        ("ruled_f1.json", "RuledOverGenus(0)"),
        ("a1_through_curve.json", "Sphere5"),
        ("abelian_nef.json", "QuasiRegularNefModel"),
    ],
)
def test_replay_fixtures(fixture, end):
    model, topo = load(fixture)
    log = run_mmp(FlowState(model))
    final, got = replay(topo, log)
    assert str(got) == end


def test_summands_track_picard_on_worked_example():
    model, topo = load("blowup_cp2.json")
    log = run_mmp(FlowState(model))
    minimal_rho = log.picard_trace[-1]
    counts = [topo.s2xs3_summands]
    for event in log.events[:-1]:
        topo = apply_contraction(topo, event)
        counts.append(topo.s2xs3_summands)
    assert counts == [rho - minimal_rho for rho in log.picard_trace]


def test_regular_fano_ends_are_smale_barden():
    for k in range(5):
        for twisted in (False, True):
            end = classify_end(TopologyState(s2xs3_summands=k, twisted=twisted), "FanoCollapse")
            assert end.tag in {EndTag.Sphere5, EndTag.ConnectedSumS2xS3, EndTag.TwistedS2xS3}
