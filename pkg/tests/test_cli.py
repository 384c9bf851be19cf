import json
import subprocess
import sys

import pytest

from conftest import MANIFESTS
from sasaki_mmp.cli import dispatch
from sasaki_mmp.errors import ManifestError, ValidationError
from sasaki_mmp.manifest import parse_manifest, serialize_manifest

FIXTURES = sorted(p.name for p in MANIFESTS.glob("*.json"))


def doc(name="blowup_cp2.json"):
    return json.loads((MANIFESTS / name).read_text())


def write(tmp_path, d):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(d, indent=2))
    return str(path)


class TestManifest:
    def test_worked_fixture(self, blowup):
        assert blowup.basis_labels == ("L", "E")
        assert blowup.K == (-3, 1) and blowup.H == (4, -1)

    @pytest.mark.parametrize("name", FIXTURES)
    def test_round_trip(self, name):
        model, topo = parse_manifest((MANIFESTS / name).read_text())
        again = parse_manifest(serialize_manifest(model, topo))
        assert again == (model, topo)

    def test_zero_denominator(self):
        d = doc()
        d["H"] = ["1/0", "1"]
        with pytest.raises(ManifestError, match="zero denominator"):
            parse_manifest(json.dumps(d, indent=2))

    def test_float_rejected(self):
        d = doc()
        d["H"] = [4.0, -1]
        with pytest.raises(ManifestError, match="floating-point"):
            parse_manifest(json.dumps(d))
        d["H"] = ["0.5", "1"]
        with pytest.raises(ManifestError, match="floating-point"):
            parse_manifest(json.dumps(d))

    def test_line_anchor(self):
        d = doc()
        d["K"] = ["-3", "1/0"]
        text = json.dumps(d, indent=2)
        line = next(n for n, l in enumerate(text.splitlines(), 1) if '"1/0"' in l)
        with pytest.raises(ManifestError, match=f"line {line}: K\\[1\\]"):
            parse_manifest(text)

    def test_malformed_json(self):
        with pytest.raises(ManifestError, match="line 2"):
            parse_manifest('{\n  "basis": [,]\n}')

    def test_asymmetric(self):
        d = doc()
        d["form"][0][1] = "1"
        with pytest.raises(ValidationError, match="intersection form not symmetric"):
            parse_manifest(json.dumps(d))

    def test_regular_flag_consistency(self):
        d = doc("a1_through_curve.json")
        d["topology"]["regular"] = True
        with pytest.raises(ValidationError, match="regular"):
            parse_manifest(json.dumps(d))


class TestDispatch:
    def test_hj(self):
        res = dispatch(["hj", "5/2"])
        assert res.exit_code == 0
        assert res.lines == ["chain=[3,2] disc=[-2/5,-1/5] class=LogTerminal"]

    def test_hj_du_val(self):
        assert dispatch(["hj", "4/3"]).lines == ["chain=[2,2,2] disc=[0,0,0] class=Canonical"]

    def test_resolve(self):
        res = dispatch(["resolve", str(MANIFESTS / "a1_through_curve.json")])
        assert res.lines == ["p\t1/2(1,1)\tchain=[2]\tdisc=[0]\tclass=Canonical", "klt\tyes"]

    def test_mmp_worked(self):
        res = dispatch(["mmp", str(MANIFESTS / "blowup_cp2.json")])
        assert res.exit_code == 0
        events = [l for l in res.lines if l.split("\t")[0] in ("DivisorialFloating", "FiberToPoint")]
        assert events == ["DivisorialFloating\t1/1\tE\t-\t1/1,0/1", "FiberToPoint\t4/3\tL,l\t-\t0/1"]
        assert res.lines[-1] == "end\tSphere5"

    def test_mmp_singular_chain_update(self):
        res = dispatch(["mmp", str(MANIFESTS / "a1_through_curve.json")])
        assert res.lines[0] == "ExtremalThroughSingularity\t1/1\tGamma\tp:2/1→1/1\t1/1,0/1"

    def test_flow(self):
        res = dispatch(["flow", str(MANIFESTS / "blowup_cp2.json"), "--t", "1/1"])
        assert res.lines == ["flow_class\t1/1,0/1", "volume\t1/1"]

    def test_flow_beyond_threshold(self):
        res = dispatch(["flow", str(MANIFESTS / "blowup_cp2.json"), "--t", "2/1"])
        assert res.exit_code == 2
        assert res.lines == ["error: class leaves nef cone at t=1"]

    def test_unknown_command(self):
        assert dispatch(["frobnicate"]).exit_code == 3

    def test_parse_error_exit(self, tmp_path):
        d = doc()
        d["H"] = ["1/0", "1"]
        res = dispatch(["mmp", write(tmp_path, d)])
        assert res.exit_code == 3 and "zero denominator" in res.lines[0]

    def test_validation_exit(self, tmp_path):
        d = doc()
        d["form"][0][1] = "1"
        res = dispatch(["mmp", write(tmp_path, d)])
        assert res.exit_code == 1
        assert "invalid: intersection form not symmetric" in res.lines

    def test_extremal_bound_exit(self, tmp_path):
        d = {
            "basis": ["D"], "form": [["1/2"]], "K": ["-10"], "H": ["2"],
            "curves": [{"name": "C", "coords": ["1"], "sings": []}],
            "singularities": [],
            "topology": {"simply_connected": True, "k": 0, "twisted": False, "regular": True},
        }
        res = dispatch(["mmp", write(tmp_path, d)])
        assert res.exit_code == 1
        assert any("0 < -K.C <= 4" in l for l in res.lines)

    def test_missing_genus_is_engine_error(self, tmp_path):
        d = doc("ruled_f1.json")
        d["topology"]["base_genus"] = None
        res = dispatch(["mmp", write(tmp_path, d)])
        assert res.exit_code == 2 and "base_genus" in res.lines[0]

    def test_local_model(self):
        res = dispatch(["local-model", "--k", "2", "--samples", "500", "--seed", "3"])
        assert res.exit_code == 0
        assert res.lines[0] == "local-model\tk=2\tsamples=500\tseed=3"
        assert all(l.endswith("\tpass") for l in res.lines[1:])

    def test_seed_env_override(self, monkeypatch):
        monkeypatch.setenv("SASAKI_MMP_SEED", "11")
        res = dispatch(["local-model", "--k", "1", "--samples", "100", "--seed", "3"])
        assert "seed=11" in res.lines[0]


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "sasaki_mmp", "mmp", str(MANIFESTS / "blowup_cp2.json")],
        capture_output=True, check=True,
    )
    assert out.stdout.decode("utf-8").endswith("end\tSphere5\n")
    assert b"\r" not in out.stdout
