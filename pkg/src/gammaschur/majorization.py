"""Majorization and weak majorization of weight vectors, and T-transform chains."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .dist import WeightVector
from .errors import NotMajorized

REL_TOL = 1e-12


class RelationKind(enum.Enum):
    STRICT = "Strict"
    WEAK = "Weak"
    EQUAL = "Equal"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class MajorizationRelation:
    kind: RelationKind
    partial_sum_gaps: tuple  # sum_{i<=k} lambda_i - sum_{i<=k} mu_i, k = 1..n

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "partial_sum_gaps": list(self.partial_sum_gaps)}

    @classmethod
    def from_dict(cls, d: dict) -> "MajorizationRelation":
        return cls(RelationKind(d["kind"]), tuple(d["partial_sum_gaps"]))


def _coerce(v) -> WeightVector:
    return v if isinstance(v, WeightVector) else WeightVector(v)


def _aligned(mu, lam):
    mu, lam = _coerce(mu), _coerce(lam)
    n = max(len(mu), len(lam))
    return mu.padded(n), lam.padded(n)


def _tolerance(mu: WeightVector, lam: WeightVector) -> float:
    return REL_TOL * max(mu.sum, lam.sum, 1e-300)


def _gaps(mu: WeightVector, lam: WeightVector) -> tuple:
    gaps, acc_l, acc_m = [], [], []
    for lv, mv in zip(lam.entries, mu.entries):
        acc_l.append(lv)
        acc_m.append(mv)
        gaps.append(math.fsum(acc_l) - math.fsum(acc_m))
    return tuple(gaps)


def _coincide(mu: WeightVector, lam: WeightVector, tol: float) -> bool:
    return all(abs(a - b) <= tol for a, b in zip(mu.entries, lam.entries))


def is_majorized(mu, lam) -> MajorizationRelation:
    """Does ``lam`` majorize ``mu`` (``mu ≺ lam``)?

    The shorter vector is zero-padded.  ``Equal`` when the sorted vectors
    coincide, ``Strict`` for a proper majorization, and ``Incomparable``
    whenever ``mu ≺ lam`` fails (including the reverse order and unequal
    totals).
    """
    mu, lam = _aligned(mu, lam)
    tol = _tolerance(mu, lam)
    gaps = _gaps(mu, lam)
    if _coincide(mu, lam, tol):
        kind = RelationKind.EQUAL
    elif all(g >= -tol for g in gaps) and abs(gaps[-1]) <= tol:
        kind = RelationKind.STRICT
    else:
        kind = RelationKind.INCOMPARABLE
    return MajorizationRelation(kind, gaps)


def is_weakly_majorized(mu, lam) -> MajorizationRelation:
    """Weak order ``mu ≺_w lam``: every partial sum of ``mu`` is dominated.

    Reports ``Strict`` when the totals also agree, since the ordinary order
    then holds as well.
    """
    mu, lam = _aligned(mu, lam)
    tol = _tolerance(mu, lam)
    gaps = _gaps(mu, lam)
    if _coincide(mu, lam, tol):
        kind = RelationKind.EQUAL
    elif all(g >= -tol for g in gaps):
        kind = RelationKind.STRICT if abs(gaps[-1]) <= tol else RelationKind.WEAK
    else:
        kind = RelationKind.INCOMPARABLE
    return MajorizationRelation(kind, gaps)


def t_transform_chain(mu, lam) -> list[WeightVector]:
    """Vectors ``lam = eta_1 ≻ eta_2 ≻ ... ≻ eta_r = mu``, each step a T-transform.

    Each step takes ``j``, the largest index with ``eta_j > mu_j``, and ``k``,
    the first index after ``j`` with ``eta_k < mu_k``, and moves
    ``min(eta_j - mu_j, mu_k - eta_k)`` from ``j`` to ``k``.  Every step
    matches at least one more coordinate of ``mu``, so ``r <= n``.
    """
    mu, lam = _aligned(mu, lam)
    rel = is_majorized(mu, lam)
    if rel.kind is RelationKind.EQUAL:
        return [lam]
    if rel.kind is not RelationKind.STRICT:
        raise NotMajorized("t_transform_chain needs mu ≺ lam")

    tol = _tolerance(mu, lam)
    target = list(mu.entries)
    current = list(lam.entries)
    chain = [lam]
    n = len(current)
    for _ in range(n):
        above = [i for i in range(n) if current[i] - target[i] > tol]
        if not above:
            break
        j = above[-1]
        k = next((i for i in range(j + 1, n) if target[i] - current[i] > tol), None)
        if k is None:
            break
        step = min(current[j] - target[j], target[k] - current[k])
        current[j] -= step
        current[k] += step
        # snap coordinates that now agree to the target to stop drift
        for i in (j, k):
            if abs(current[i] - target[i]) <= tol:
                current[i] = target[i]
        chain.append(WeightVector(current))
    chain[-1] = mu
    return chain
