"""Numerical checks of the explicit local model around a 1/k(1,1) singular fibre.

The resolution replaces a neighbourhood of the fibre by
``S(-k) = {(z, u) in C^2 x S^3 : z1 u2^k = z2 u1^k}``, covered by two charts
``(x_i, v_i, s_i)``. Kernels below operate elementwise on numpy arrays, so
the same code serves single points and the vectorised sampling suite.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EngineError

UNIT_TOL = 1e-12
CHUNK = 1000


@dataclass(frozen=True)
class ChartPoint:
    chart: int
    x: complex
    v: complex
    s: complex
    k: int

    def __post_init__(self):
        if self.chart not in (1, 2):
            raise ValueError(f"chart must be 1 or 2, got {self.chart}")
        if abs(abs(self.s) - 1) > UNIT_TOL:
            raise ValueError(f"|s| = {abs(self.s)} is not 1")
        if self.k < 1:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class NeighborhoodPoint:
    u: complex
    v1: complex
    v2: complex
    r: int
    a: int = 1

    def __post_init__(self):
        if abs(abs(self.u) - 1) > UNIT_TOL:
            raise ValueError(f"|u| = {abs(self.u)} is not 1")


@dataclass(frozen=True)
class AmbientPoint:
    z1: complex
    z2: complex
    w1: complex
    w2: complex

    def __post_init__(self):
        norm = np.hypot(abs(self.w1), abs(self.w2))
        if abs(norm - 1) > UNIT_TOL:
            raise ValueError(f"|w| = {norm} is not 1")


# -- elementwise kernels ---------------------------------------------------


def _transition(x, v, s, k):
    """Same formulas both ways: ``x' = 1/x, v' = v x^k, s' = s x/|x|``."""
    return 1 / x, v * x**k, s * x / np.abs(x)


def _norm(x, v, k):
    return (1 + np.abs(x) ** (2 * k)) * np.abs(v) ** 2


def _chart_to_ambient(chart, x, v, s, k):
    n = np.sqrt(1 + np.abs(x) ** 2)
    if chart == 1:
        return v, v * x**k, s / n, s * x / n
    return v * x**k, v, s * x / n, s / n


def _dist(z1, z2, k):
    return np.abs(z1) ** (2 * k) + np.abs(z2) ** (2 * k)


def _embed(s, z1, z2, k):
    r = np.sqrt(np.abs(z1) ** 2 + np.abs(z2) ** 2)
    return s * z1**k, s * z2**k, z1 / r, z2 / r


def _ambient_to_chart(z1, z2, w1, w2, k):
    """Chart coordinates, using chart 1 where ``|w1| >= |w2|``."""
    first = np.abs(w1) >= np.abs(w2)
    safe1 = np.where(first, w1, 1)
    safe2 = np.where(first, 1, w2)
    x = np.where(first, w2 / safe1, w1 / safe2)
    v = np.where(first, z1, z2)
    s = np.where(first, w1 / np.abs(safe1), w2 / np.abs(safe2))
    return first, x, v, s


def _ambient_to_bundle(z1, z2, w1, w2, k):
    """``C x S^3`` coordinates ``(z, w)`` with ``(z1, z2) = z (w1^k, w2^k)``."""
    first = np.abs(w1) >= np.abs(w2)
    z = np.where(first, z1 / np.where(first, w1, 1) ** k, z2 / np.where(first, 1, w2) ** k)
    return z, w1, w2


def _act_neighborhood(t, u, v1, v2, r, a):
    return t**r * u, v1 / t, v2 / t**a


def _act_bundle(t, z, w1, w2, k):
    return t**k * z, w1 / t, w2 / t


# -- point API -------------------------------------------------------------


def chart_transition(p: ChartPoint) -> ChartPoint:
    if p.x == 0:
        raise EngineError("x = 0 is not covered by the other chart")
    x, v, s = _transition(complex(p.x), complex(p.v), complex(p.s), p.k)
    return ChartPoint(3 - p.chart, complex(x), complex(v), complex(s), p.k)


def section_norm(p: ChartPoint) -> float:
    return float(_norm(complex(p.x), complex(p.v), p.k))


def chart_to_ambient(p: ChartPoint) -> AmbientPoint:
    return AmbientPoint(*(complex(c) for c in _chart_to_ambient(p.chart, complex(p.x), complex(p.v), complex(p.s), p.k)))


def dist_to_singular_fiber(x, k: int) -> float:
    _, z1, z2 = x
    return float(_dist(complex(z1), complex(z2), k))


def embed_resolution(x, k: int) -> AmbientPoint:
    s, z1, z2 = (complex(c) for c in x)
    if z1 == 0 and z2 == 0:
        raise EngineError("the embedding is undefined on the singular fibre (z1, z2) = (0, 0)")
    return AmbientPoint(*(complex(c) for c in _embed(s, z1, z2, k)))


def ambient_to_chart(q: AmbientPoint, k: int) -> ChartPoint:
    first, x, v, s = _ambient_to_chart(q.z1, q.z2, q.w1, q.w2, k)
    return ChartPoint(1 if bool(first) else 2, complex(x), complex(v), complex(s), k)


def ambient_to_bundle(q: AmbientPoint, k: int) -> tuple[complex, complex, complex]:
    return tuple(complex(c) for c in _ambient_to_bundle(q.z1, q.z2, q.w1, q.w2, k))


def act_neighborhood(t: complex, p: NeighborhoodPoint) -> NeighborhoodPoint:
    if abs(abs(t) - 1) > UNIT_TOL:
        raise EngineError(f"|t| = {abs(t)} is not 1")
    u, v1, v2 = _act_neighborhood(complex(t), p.u, p.v1, p.v2, p.r, p.a)
    return NeighborhoodPoint(complex(u), complex(v1), complex(v2), p.r, p.a)


def act_bundle(t: complex, point, k: int):
    z, w1, w2 = (complex(c) for c in point)
    if abs(abs(t) - 1) > UNIT_TOL:
        raise EngineError(f"|t| = {abs(t)} is not 1")
    if abs(np.hypot(abs(w1), abs(w2)) - 1) > UNIT_TOL:
        raise EngineError("|w| is not 1")
    return tuple(complex(c) for c in _act_bundle(complex(t), z, w1, w2, k))


def check_pullback_identity(sample, k: int) -> float:
    """``|(1 + |x|^2k)|v|^2 - (|z1|^2k + |z2|^2k)|`` at the embedded point."""
    q = embed_resolution(sample, k)
    lhs = section_norm(ambient_to_chart(q, k))
    return abs(lhs - dist_to_singular_fiber(sample, k))


# -- sampling suite --------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual < self.tolerance)

    def format(self) -> str:
        return f"{self.name}\t{self.residual:.2e}\t{'pass' if self.passed else 'fail'}"


TOLERANCES = {
    "chart_consistency": 1e-12,
    "involution": 1e-12,
    "equivariance": 1e-9,
    "pullback_identity": 1e-9,
    "membership": 1e-9,
    "neighborhood_action": 1e-12,
    "bundle_action": 1e-12,
}


def _rel(a, b):
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)


def _unit(rng, n):
    return np.exp(2j * np.pi * rng.random(n))


def _logmod(rng, n):
    # |z| log-uniform in [0.1, 10] keeps clear of the chart singularity and overflow
    return 10.0 ** rng.uniform(-1, 1, n) * _unit(rng, n)


def _chunk_residuals(k: int, seed: int, index: int, n: int) -> dict[str, float]:
    rng = np.random.default_rng([seed, index])
    x, v, s = _logmod(rng, n), _logmod(rng, n), _unit(rng, n)
    z1, z2, sf = _logmod(rng, n), _logmod(rng, n), _unit(rng, n)
    t1, t2 = _unit(rng, n), _unit(rng, n)
    out: dict[str, float] = {}

    x2, v2, s2 = _transition(x, v, s, k)
    amb1 = _chart_to_ambient(1, x, v, s, k)
    amb2 = _chart_to_ambient(2, x2, v2, s2, k)
    chart = [_rel(_norm(x2, v2, k), _norm(x, v, k))]
    chart += [np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-300) for a, b in zip(amb1, amb2)]
    out["chart_consistency"] = max(float(np.max(c)) for c in chart)
    xb, vb, sb = _transition(x2, v2, s2, k)
    out["involution"] = max(float(np.max(_rel(a, b))) for a, b in ((xb, x), (vb, v), (sb, s)))

    amb = _embed(sf, z1, z2, k)
    bundle = _ambient_to_bundle(*amb, k)
    moved = _act_neighborhood(t1, sf, z1, z2, k, 1)
    lhs = _ambient_to_bundle(*_embed(*moved, k), k)
    rhs = _act_bundle(t1, *bundle, k)
    out["equivariance"] = max(float(np.max(_rel(a, b))) for a, b in zip(lhs, rhs))

    _, cx, cv, _ = _ambient_to_chart(*amb, k)
    out["pullback_identity"] = float(np.max(_rel(_norm(cx, cv, k), _dist(z1, z2, k))))

    def member(a1, a2, w1, w2):
        return np.abs(a1 * w2**k - a2 * w1**k) / (np.abs(a1) * np.abs(w2) ** k + np.abs(a2) * np.abs(w1) ** k)

    out["membership"] = max(float(np.max(member(*amb))), float(np.max(member(*amb1))))

    pr, pa = max(k, 2), 1 if k < 3 else 2
    once = _act_neighborhood(t1 * t2, sf, z1, z2, pr, pa)
    twice = _act_neighborhood(t1, *_act_neighborhood(t2, sf, z1, z2, pr, pa), pr, pa)
    out["neighborhood_action"] = max(float(np.max(_rel(a, b))) for a, b in zip(twice, once))

    once = _act_bundle(t1 * t2, *bundle, k)
    twice = _act_bundle(t1, *_act_bundle(t2, *bundle, k), k)
    res = [float(np.max(_rel(a, b))) for a, b in zip(twice, once)]
    z, w1, w2 = once
    res.append(float(np.max(np.abs(np.hypot(np.abs(w1), np.abs(w2)) - 1))))
    before = np.abs(bundle[0]) ** 2 * _dist(bundle[1], bundle[2], k)
    after = np.abs(z) ** 2 * _dist(w1, w2, k)
    res.append(float(np.max(_rel(after, before))))
    out["bundle_action"] = max(res)
    return out


def run_suite(k: int, samples: int, seed: int, workers: int = 1) -> list[CheckResult]:
    """Evaluate every check on ``samples`` random points.

    Samples are drawn in fixed chunks seeded by ``(seed, chunk index)``, so
    the residuals do not depend on ``workers``.
    """
    if k < 1:
        raise EngineError("k must be positive")
    if samples < 1:
        raise EngineError("need at least one sample")
    sizes = [min(CHUNK, samples - i) for i in range(0, samples, CHUNK)]
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_residuals(k, seed, *job), jobs))
    else:
        parts = [_chunk_residuals(k, seed, *job) for job in jobs]
    return [
        CheckResult(name, max(p[name] for p in parts), tol) for name, tol in TOLERANCES.items()
    ]
