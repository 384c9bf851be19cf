"""Hirzebruch-Jung continued fractions and cyclic quotient surface singularities.

A singularity ``1/r(1,a)`` resolves to a chain of rational curves with
self-intersections ``-b_1, ..., -b_l`` where ``r/a = [b_1, ..., b_l]``.
Everything here is exact; thresholds on discrepancies are sign decisions.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import NamedTuple

from .errors import EngineError, InternalConsistencyError
from .qmath import solve


@dataclass(frozen=True, order=True)
class CyclicQuotientType:
    """The singularity ``C^2 / Z_r`` with weights ``(1, a)``.

    Any ``a`` coprime to ``r`` is accepted and reduced into ``[1, r-1]``;
    ``r = 1`` is a smooth point and carries ``a = 1``.
    """

    r: int
    a: int = 1

    def __post_init__(self):
        r, a = int(self.r), int(self.a)
        if r < 1:
            raise ValueError(f"order must be positive, got r={r}")
        if gcd(r, a) != 1:
            raise ValueError(f"weight a={a} is not coprime to r={r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "a", 1 if r == 1 else a % r)

    @property
    def is_smooth(self) -> bool:
        return self.r == 1

    def __str__(self) -> str:
        return f"1/{self.r}(1,{self.a})"


@dataclass(frozen=True)
class HJChain:
    entries: tuple[int, ...] = ()

    def __post_init__(self):
        entries = tuple(int(b) for b in self.entries)
        if any(b < 2 for b in entries):
            raise ValueError(f"chain entries must be >= 2: {list(entries)}")
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __str__(self) -> str:
        return "[" + ",".join(str(b) for b in self.entries) + "]"


class SingularityClass(enum.Enum):
    Terminal = "Terminal"
    Canonical = "Canonical"
    LogTerminal = "LogTerminal"
    LogCanonical = "LogCanonical"
    Worse = "Worse"

    def __str__(self) -> str:
        return self.value


class CascadeStep(NamedTuple):
    """One blow-down.

    The first step of a cascade blows down the attached (-1)-curve, which
    lowers the entry at ``position``; later steps blow down the chain
    entry at ``position`` (1-based, indices of ``before``).
    """

    position: int
    before: tuple[int, ...]


@dataclass(frozen=True)
class ChainContractionOutcome:
    result: CyclicQuotientType
    chain: tuple[int, ...]
    cascade: tuple[CascadeStep, ...] = field(default=())


def hj_expand(sing: CyclicQuotientType) -> HJChain:
    """Continued fraction ``r/a = b1 - 1/(b2 - ...)`` via ``r = a*b1 - a1``."""
    r, a = sing.r, sing.a
    if r == 1:
        return HJChain(())
    out = []
    while a:
        b = -(-r // a)
        out.append(b)
        r, a = a, a * b - r
    return HJChain(tuple(out))


def hj_evaluate(chain) -> CyclicQuotientType:
    entries = tuple(chain)
    if not entries:
        return CyclicQuotientType(1, 1)
    # fold from the tail: value = b_i - 1/value
    num, den = entries[-1], 1
    for b in reversed(entries[:-1]):
        num, den = b * num - den, num
    return CyclicQuotientType(num, den)


def chain_gram(entries) -> list[list[Fraction]]:
    entries = tuple(entries)
    n = len(entries)
    gram = [[Fraction(0)] * n for _ in range(n)]
    for i, b in enumerate(entries):
        gram[i][i] = Fraction(-b)
        if i + 1 < n:
            gram[i][i + 1] = gram[i + 1][i] = Fraction(1)
    return gram


def discrepancies(chain) -> tuple[Fraction, ...]:
    """Discrepancies of the exceptional curves of the minimal resolution.

    Solves ``sum_j a_j (E_i . E_j) = b_i - 2``, the adjunction condition
    for rational exceptional curves.
    """
    entries = tuple(chain)
    if not entries:
        raise EngineError("discrepancies of a smooth point are undefined (empty chain)")
    rhs = [Fraction(b - 2) for b in entries]
    return solve(chain_gram(entries), rhs)


def classify_singularity(disc) -> SingularityClass:
    disc = [Fraction(x) for x in disc]
    if all(x > 0 for x in disc):
        return SingularityClass.Terminal
    if all(x >= 0 for x in disc):
        return SingularityClass.Canonical
    if all(x > -1 for x in disc):
        return SingularityClass.LogTerminal
    if all(x >= -1 for x in disc):
        return SingularityClass.LogCanonical
    return SingularityClass.Worse


def contract_through_chain(chain, j: int) -> ChainContractionOutcome:
    """Contract a (-1)-curve meeting the ``j``-th chain curve, then blow down.

    After the attached curve goes, ``b_j`` drops by one; every entry that
    reaches 1 is blown down in turn, lowering its surviving neighbours.
    Raises ``EngineError`` when the configuration is not negative definite
    (two adjacent (-1)-curves appear), i.e. no contraction to a point exists.
    """
    entries = list(chain)
    if not entries:
        raise EngineError("cannot contract through a smooth point (empty chain)")
    if not 1 <= j <= len(entries):
        raise EngineError(f"attachment index {j} out of range 1..{len(entries)}")
    cascade = [CascadeStep(j, tuple(entries))]
    entries[j - 1] -= 1
    while 1 in entries:
        i = entries.index(1)
        cascade.append(CascadeStep(i + 1, tuple(entries)))
        if (i > 0 and entries[i - 1] == 1) or (i + 1 < len(entries) and entries[i + 1] == 1):
            raise EngineError(
                f"chain {list(chain)} with a (-1)-curve at position {j} is not contractible"
            )
        if i > 0:
            entries[i - 1] -= 1
        if i + 1 < len(entries):
            entries[i + 1] -= 1
        del entries[i]
    if any(b < 2 for b in entries):
        raise InternalConsistencyError(f"cascade left invalid chain {entries}")
    return ChainContractionOutcome(hj_evaluate(entries), tuple(entries), tuple(cascade))


def replay_cascade(chain, cascade) -> tuple[int, ...]:
    """Apply recorded blow-downs to ``chain``; used to audit an outcome."""
    entries = list(chain)
    for n, step in enumerate(cascade):
        if tuple(entries) != tuple(step.before):
            raise InternalConsistencyError(f"cascade step {n} expected {step.before}, found {entries}")
        i = step.position - 1
        if n == 0:
            entries[i] -= 1
            continue
        if i > 0:
            entries[i - 1] -= 1
        if i + 1 < len(entries):
            entries[i + 1] -= 1
        del entries[i]
    return tuple(entries)
