"""JSON manifests: a surface model plus topology metadata, all rationals exact.

Schema (keys in this order when serialized)::

    basis         list of labels
    form          rho x rho matrix of rationals ("p/q" strings or integers)
    K, H          coordinate lists
    curves        [{name, coords, sings: [ids], attach?: {id: chain index}}]
    singularities [{id, r, a}]
    topology      {simply_connected, k, twisted, base_genus?, regular}
"""
from __future__ import annotations

import json
from fractions import Fraction

from .errors import ManifestError, ValidationError
from .hj import CyclicQuotientType
from .lattice import CurveRecord, SurfaceModel, validate_model
from .qmath import parse_rational
from .topology import TopologyState


def _line_of(text: str, token) -> int | None:
    needle = json.dumps(token) if isinstance(token, str) else str(token)
    for n, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return n
    return None


class _Reader:
    def __init__(self, text: str):
        self.text = text

    def fail(self, path: str, message: str, token=None):
        line = _line_of(self.text, token) if token is not None else None
        where = f"line {line}: " if line else ""
        raise ManifestError(f"{where}{path}: {message}")

    def rational(self, value, path: str) -> Fraction:
        try:
            return parse_rational(value)
        except ManifestError as exc:
            self.fail(path, str(exc), value)

    def vector(self, value, path: str) -> tuple[Fraction, ...]:
        if not isinstance(value, list):
            self.fail(path, "expected a list of rationals")
        return tuple(self.rational(x, f"{path}[{i}]") for i, x in enumerate(value))

    def key(self, obj: dict, name: str, path: str):
        if not isinstance(obj, dict) or name not in obj:
            self.fail(path, f"missing key {name!r}")
        return obj[name]

    def integer(self, value, path: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, f"expected an integer, got {value!r}", value)
        return value

    def boolean(self, value, path: str) -> bool:
        if not isinstance(value, bool):
            self.fail(path, f"expected true/false, got {value!r}", value)
        return value


def parse_manifest(text: str) -> tuple[SurfaceModel, TopologyState]:
    """Parse and validate; raises ManifestError or ValidationError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"line {exc.lineno}: malformed JSON: {exc.msg}") from None
    rd = _Reader(text)
    if not isinstance(doc, dict):
        rd.fail("$", "top level must be an object")

    basis = rd.key(doc, "basis", "$")
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        rd.fail("basis", "expected a list of labels")
    form = rd.key(doc, "form", "$")
    if not isinstance(form, list):
        rd.fail("form", "expected a matrix")
    gram = tuple(rd.vector(row, f"form[{i}]") for i, row in enumerate(form))
    K = rd.vector(rd.key(doc, "K", "$"), "K")
    H = rd.vector(rd.key(doc, "H", "$"), "H")

    sings = []
    for i, entry in enumerate(doc.get("singularities", [])):
        path = f"singularities[{i}]"
        sid = rd.key(entry, "id", path)
        r = rd.integer(rd.key(entry, "r", path), f"{path}.r")
        a = rd.integer(rd.key(entry, "a", path), f"{path}.a")
        try:
            sings.append((str(sid), CyclicQuotientType(r, a)))
        except ValueError as exc:
            raise ValidationError([f"{path}: {exc}"]) from None

    curves = []
    for i, entry in enumerate(rd.key(doc, "curves", "$")):
        path = f"curves[{i}]"
        name = rd.key(entry, "name", path)
        coords = rd.vector(rd.key(entry, "coords", path), f"{path}.coords")
        incidence = entry.get("sings", [])
        if not isinstance(incidence, list):
            rd.fail(f"{path}.sings", "expected a list of singularity ids")
        attach = entry.get("attach", {})
        if not isinstance(attach, dict):
            rd.fail(f"{path}.attach", "expected an object {id: index}")
        attach_pairs = tuple(
            (str(s), rd.integer(j, f"{path}.attach.{s}")) for s, j in sorted(attach.items())
        )
        curves.append(CurveRecord(str(name), coords, tuple(str(s) for s in incidence), attach_pairs))

    topo_doc = rd.key(doc, "topology", "$")
    _check_topology(rd, topo_doc)
    base_genus = topo_doc.get("base_genus")
    topo = TopologyState(
        simply_connected=rd.boolean(rd.key(topo_doc, "simply_connected", "topology"), "topology.simply_connected"),
        s2xs3_summands=rd.integer(rd.key(topo_doc, "k", "topology"), "topology.k"),
        twisted=rd.boolean(rd.key(topo_doc, "twisted", "topology"), "topology.twisted"),
        base_genus=None if base_genus is None else rd.integer(base_genus, "topology.base_genus"),
        regular=rd.boolean(rd.key(topo_doc, "regular", "topology"), "topology.regular"),
    )

    model = SurfaceModel(tuple(basis), gram, K, H, tuple(curves), tuple(sings))
    report = validate_model(model)
    if topo.regular and sings:
        report.append("topology.regular is true but singular fibres are declared")
    if not topo.regular and not sings:
        report.append("topology.regular is false but no singular fibres are declared")
    if report:
        raise ValidationError(report)
    return model, topo


def _check_topology(rd: _Reader, topo_doc) -> None:
    if not isinstance(topo_doc, dict):
        rd.fail("topology", "expected an object")
    k = rd.integer(rd.key(topo_doc, "k", "topology"), "topology.k")
    if k < 0:
        rd.fail("topology.k", "summand count must be non-negative", k)
    genus = topo_doc.get("base_genus")
    if genus is not None and rd.integer(genus, "topology.base_genus") < 0:
        rd.fail("topology.base_genus", "genus must be non-negative", genus)


def _q(x: Fraction) -> str:
    return str(Fraction(x))


def serialize_manifest(model: SurfaceModel, topo: TopologyState) -> str:
    doc = {
        "basis": list(model.basis_labels),
        "form": [[_q(x) for x in row] for row in model.gram],
        "K": [_q(x) for x in model.K],
        "H": [_q(x) for x in model.H],
        "curves": [],
        "singularities": [{"id": sid, "r": s.r, "a": s.a} for sid, s in model.sings],
        "topology": {
            "simply_connected": topo.simply_connected,
            "k": topo.s2xs3_summands,
            "twisted": topo.twisted,
            "base_genus": topo.base_genus,
            "regular": topo.regular,
        },
    }
    for c in model.curves:
        entry = {"name": c.name, "coords": [_q(x) for x in c.cls], "sings": list(c.sing_incidence)}
        if c.attach:
            entry["attach"] = dict(c.attach)
        doc["curves"].append(entry)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
