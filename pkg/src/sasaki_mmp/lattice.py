"""Exact intersection theory on the leaf orbifold of a quasi-regular structure.

Classes are tuples of Fractions in the model's basis; the form is a rational
Gram matrix (orbifold surfaces have fractional intersection numbers).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from .errors import EngineError, ValidationError
from .hj import CyclicQuotientType, chain_gram, discrepancies, hj_expand
from .qmath import as_vector, bilinear, independent_subset, inertia, is_symmetric, solve

DivisorClass = tuple  # tuple[Fraction, ...], one entry per basis element

# 0 < -K.C <= 2 dim Z for K-negative extremal curves on a surface
EXTREMAL_BOUND = 4


@dataclass(frozen=True)
class CurveRecord:
    name: str
    cls: DivisorClass
    sing_incidence: tuple[str, ...] = ()
    # (singularity id, chain index) where the curve's strict transform
    # meets the resolution chain; index 1 when absent
    attach: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cls", as_vector(self.cls))
        object.__setattr__(self, "sing_incidence", tuple(self.sing_incidence))
        object.__setattr__(self, "attach", tuple((str(s), int(j)) for s, j in self.attach))

    def attach_index(self, sing_id: str) -> int:
        return dict(self.attach).get(sing_id, 1)


@dataclass(frozen=True)
class SurfaceModel:
    basis_labels: tuple[str, ...]
    gram: tuple[tuple[Fraction, ...], ...]
    K: DivisorClass
    H: DivisorClass
    curves: tuple[CurveRecord, ...] = ()
    sings: tuple[tuple[str, CyclicQuotientType], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "basis_labels", tuple(self.basis_labels))
        object.__setattr__(self, "gram", tuple(as_vector(row) for row in self.gram))
        object.__setattr__(self, "K", as_vector(self.K))
        object.__setattr__(self, "H", as_vector(self.H))
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "sings", tuple(self.sings))

    @property
    def rank(self) -> int:
        return len(self.basis_labels)

    def curve(self, name: str) -> CurveRecord:
        for c in self.curves:
            if c.name == name:
                return c
        raise KeyError(name)

    def singularity(self, sid: str) -> CyclicQuotientType:
        return dict(self.sings)[sid]


@dataclass(frozen=True)
class LatticeFragment:
    """Gram matrix of a resolution chain, optionally with an attached (-1)-class."""

    labels: tuple[str, ...]
    gram: tuple[tuple[Fraction, ...], ...] = field(default=())


def _check_dim(model: SurfaceModel, *classes) -> None:
    for d in classes:
        if len(d) != model.rank:
            raise EngineError(f"class of length {len(d)} in a lattice of rank {model.rank}")


def pair(model: SurfaceModel, d1, d2) -> Fraction:
    _check_dim(model, d1, d2)
    return bilinear(model.gram, as_vector(d1), as_vector(d2))


def is_nef(model: SurfaceModel, d) -> bool:
    return all(pair(model, d, c.cls) >= 0 for c in model.curves)


def is_big(model: SurfaceModel, d) -> bool:
    return pair(model, d, d) > 0


def is_floating(model: SurfaceModel, curve: CurveRecord) -> bool:
    return (
        not curve.sing_incidence
        and pair(model, curve.cls, curve.cls) == -1
        and pair(model, model.K, curve.cls) == -1
    )


def adjunction_genus(model: SurfaceModel, curve: CurveRecord) -> Fraction:
    if curve.sing_incidence:
        raise EngineError(
            f"curve {curve.name} meets singular fibre(s) {','.join(curve.sing_incidence)}; "
            "adjunction genus undefined"
        )
    return 1 + (pair(model, curve.cls, curve.cls) + pair(model, model.K, curve.cls)) / 2


def validate_model(model: SurfaceModel) -> list[str]:
    """Return one line per violated invariant; empty means valid."""
    report: list[str] = []
    rho = model.rank
    if len(model.gram) != rho or any(len(row) != rho for row in model.gram):
        return [f"intersection form is not {rho}x{rho}"]
    if not is_symmetric(model.gram):
        report.append("intersection form not symmetric")
    for label, d in (("K", model.K), ("H", model.H)):
        if len(d) != rho:
            report.append(f"class {label} has length {len(d)}, expected {rho}")
    bad_curves = [c.name for c in model.curves if len(c.cls) != rho]
    for name in bad_curves:
        report.append(f"curve {name}: class has wrong length, expected {rho}")
    if report:
        return report

    names = [c.name for c in model.curves]
    for dup in sorted({n for n in names if names.count(n) > 1}):
        report.append(f"duplicate curve name {dup}")
    sing_ids = [s for s, _ in model.sings]
    for dup in sorted({s for s in sing_ids if sing_ids.count(s) > 1}):
        report.append(f"duplicate singularity id {dup}")

    hh = pair(model, model.H, model.H)
    if hh <= 0:
        report.append(f"H.H = {hh} is not positive")
    known = dict(model.sings)
    for c in model.curves:
        hc = pair(model, model.H, c.cls)
        if hc <= 0:
            report.append(f"H not ample on declared cone: H.{c.name} = {hc}")
        kc = pair(model, model.K, c.cls)
        if kc < 0 and -kc > EXTREMAL_BOUND:
            report.append(
                f"curve {c.name}: extremal bound 0 < -K.C <= {EXTREMAL_BOUND} violated (-K.C = {-kc})"
            )
        for s in c.sing_incidence:
            if s not in known:
                report.append(f"curve {c.name}: unknown singularity id {s}")
        for s, j in c.attach:
            if s not in c.sing_incidence:
                report.append(f"curve {c.name}: attach entry for {s} which it does not meet")
            elif s in known and not 1 <= j <= len(hj_expand(known[s])):
                report.append(f"curve {c.name}: attach index {j} out of range for {s}")

    declared = [model.K, model.H] + [c.cls for c in model.curves]
    idx = independent_subset(declared)
    sub = [[pair(model, declared[i], declared[k]) for k in idx] for i in idx]
    pos, _, _ = inertia(sub)
    if pos != 1:
        report.append(f"Hodge index violated: {pos} positive directions on the declared span")

    report.extend(_disjointness_report(model))
    return report


def _disjointness_report(model: SurfaceModel) -> list[str]:
    ratios = []
    for c in model.curves:
        kc = pair(model, model.K, c.cls)
        if kc < 0:
            ratios.append(pair(model, model.H, c.cls) / -kc)
    if not ratios:
        return []
    t0 = min(ratios)
    limit = tuple(h + t0 * k for h, k in zip(model.H, model.K))
    if pair(model, limit, limit) <= 0:
        return []
    face = [c for c in model.curves if pair(model, limit, c.cls) == 0 and is_floating(model, c)]
    out = []
    for a, b in itertools.combinations(face, 2):
        ab = pair(model, a.cls, b.cls)
        if ab != 0:
            out.append(f"floating curves {a.name}, {b.name} both killed by a big class but meet ({ab})")
    return out


def check_model(model: SurfaceModel) -> SurfaceModel:
    report = validate_model(model)
    if report:
        raise ValidationError(report)
    return model


def blow_up_regular_fiber(model: SurfaceModel, m: int, name: str = "E") -> SurfaceModel:
    """Blow up a generic regular fibre, polarizing by ``m*H - E``."""
    if m < 1:
        raise EngineError(f"multiplier m must be positive, got {m}")
    labels = set(model.basis_labels) | {c.name for c in model.curves}
    base, n = name, 1
    while name in labels:
        n += 1
        name = f"{base}{n}"
    z = Fraction(0)
    gram = [row + (z,) for row in model.gram] + [(z,) * model.rank + (Fraction(-1),)]
    e = (z,) * model.rank + (Fraction(1),)
    new = SurfaceModel(
        basis_labels=model.basis_labels + (name,),
        gram=gram,
        K=model.K + (Fraction(1),),
        H=tuple(m * h for h in model.H) + (Fraction(-1),),
        curves=tuple(replace(c, cls=c.cls + (z,)) for c in model.curves)
        + (CurveRecord(name, e),),
        sings=model.sings,
    )
    return check_model(new)


def _pivot(cls: DivisorClass) -> int:
    best = max(abs(x) for x in cls)
    if best == 0:
        raise EngineError("cannot contract the zero class")
    return next(i for i, x in enumerate(cls) if abs(x) == best)


def pushforward(model: SurfaceModel, curve: CurveRecord, d) -> DivisorClass:
    """Image of ``d`` under the contraction of ``curve``, in the reduced basis."""
    g = curve.cls
    gg = pair(model, g, g)
    if gg >= 0:
        raise EngineError(f"curve {curve.name} has {curve.name}^2 = {gg}; only negative curves contract")
    p = _pivot(g)
    lam = pair(model, d, g) / gg
    v = [x - lam * y for x, y in zip(d, g)]
    return tuple(v[i] - v[p] * g[i] / g[p] for i in range(len(v)) if i != p)


def contract_curve(model: SurfaceModel, curve: CurveRecord, polarization) -> SurfaceModel:
    """Contract a negative curve; the lattice becomes its orthogonal complement.

    ``polarization`` (in the old basis) is pushed forward and becomes the new H.
    Singularity records are left untouched.
    """
    g = curve.cls
    gg = pair(model, g, g)
    if gg >= 0:
        raise EngineError(f"curve {curve.name} is not a negative curve ({curve.name}^2 = {gg})")
    p = _pivot(g)
    keep = [i for i in range(model.rank) if i != p]
    basis_dot_g = [pair(model, _unit(model.rank, i), g) for i in range(model.rank)]
    gram = [
        [model.gram[i][k] - basis_dot_g[i] * basis_dot_g[k] / gg for k in keep] for i in keep
    ]
    curves = tuple(
        replace(c, cls=pushforward(model, curve, c.cls)) for c in model.curves if c.name != curve.name
    )
    return SurfaceModel(
        basis_labels=tuple(model.basis_labels[i] for i in keep),
        gram=gram,
        K=pushforward(model, curve, model.K),
        H=pushforward(model, curve, polarization),
        curves=curves,
        sings=model.sings,
    )


def contract_minus_one_class(model: SurfaceModel, curve: CurveRecord, polarization) -> SurfaceModel:
    """Castelnuovo contraction of a floating (-1)-curve: ``D -> D + (D.E) E``."""
    if pair(model, curve.cls, curve.cls) != -1:
        raise EngineError(f"{curve.name} is not a (-1)-class")
    if not is_floating(model, curve):
        raise EngineError(f"{curve.name} is not a floating (-1)-curve")
    return contract_curve(model, curve, polarization)


def _unit(n: int, i: int) -> DivisorClass:
    return tuple(Fraction(int(k == i)) for k in range(n))


def resolution_lattice(sing: CyclicQuotientType, attach_j: int | None = None) -> LatticeFragment:
    entries = hj_expand(sing).entries
    gram = chain_gram(entries)
    labels = [f"V{i + 1}" for i in range(len(entries))]
    if attach_j is not None:
        if not 1 <= attach_j <= len(entries):
            raise EngineError(f"attach index {attach_j} out of range 1..{len(entries)}")
        for i, row in enumerate(gram):
            row.append(Fraction(int(i == attach_j - 1)))
        gram.append([Fraction(int(i == attach_j - 1)) for i in range(len(entries))] + [Fraction(-1)])
        labels.append("Gamma")
    return LatticeFragment(tuple(labels), tuple(tuple(r) for r in gram))


def expected_curve_numbers(model: SurfaceModel, curve: CurveRecord) -> tuple[Fraction, Fraction]:
    """(C.C, K.C) forced on a curve whose strict transform is a (-1)-curve.

    With chain Gram ``M`` and attachment ``j``, the pull-back adds
    ``c_j = -(M^-1)_jj`` to the square and the discrepancy ``a_j`` shifts
    the canonical degree: ``C^2 = -1 + sum c_j``, ``K.C = -1 - sum a_j``.
    """
    square, kdeg = Fraction(-1), Fraction(-1)
    for sid in curve.sing_incidence:
        entries = hj_expand(model.singularity(sid)).entries
        j = curve.attach_index(sid)
        e_j = [Fraction(int(i == j - 1)) for i in range(len(entries))]
        col = solve(chain_gram(entries), e_j)
        square += -col[j - 1]
        kdeg -= discrepancies(entries)[j - 1]
    return square, kdeg
