from pathlib import Path

import pytest

from sasaki_mmp.manifest import parse_manifest

ROOT = Path(__file__).resolve().parents[1]
MANIFESTS = ROOT / "manifests"


def load(name):
    return parse_manifest((MANIFESTS / name).read_text(encoding="utf-8"))


@pytest.fixture
def blowup():
    return load("blowup_cp2.json")[0]


@pytest.fixture
def ruled():
    return load("ruled_f1.json")[0]


@pytest.fixture
def a1_model():
    return load("a1_through_curve.json")[0]
