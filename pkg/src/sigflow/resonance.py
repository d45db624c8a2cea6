"""Integer resonance relations among eigenvalues.

``resonance_scan`` looks for relations ``s1*e1 + s2*e2 + s3 = target`` with
target one of ``e1``, ``e2`` or ``1`` (and, for complex pairs, the same relation
on real parts). ``spectrum_resonances`` and ``center_resonances`` are the
general and the two-eigenvalue (center manifold) variants.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

__all__ = [
    "Relation",
    "ResonanceReport",
    "resonance_scan",
    "spectrum_resonances",
    "center_resonances",
]

EXACT = "exact"
REAL_PART = "real_part"


@dataclass(frozen=True)
class Relation:
    s: tuple[int, ...]
    target: str
    residual: float
    kind: str = EXACT

    @property
    def order(self) -> int:
        return sum(self.s)

    def __str__(self) -> str:
        pre = "Re " if self.kind == REAL_PART else ""
        return f"{pre}{self.s}->{self.target} (|s|={self.order}, res={self.residual:.2e})"


@dataclass
class ResonanceReport:
    relations: list[Relation] = field(default_factory=list)
    order_bound: int = 0
    tol: float = 0.0

    def find(self, s: Sequence[int], target: str, kind: str | None = None) -> Relation | None:
        s = tuple(s)
        for r in self.relations:
            if r.s == s and r.target == target and (kind is None or r.kind == kind):
                return r
        return None

    def of_order(self, order: int, kind: str | None = None) -> list[Relation]:
        return [r for r in self.relations if r.order == order and (kind is None or r.kind == kind)]

    def __bool__(self) -> bool:
        return bool(self.relations)


_TRIVIAL = {((1, 0, 0), "eps1"), ((0, 1, 0), "eps2"), ((0, 0, 1), "1")}


def _triples(order_bound: int):
    for total in range(1, order_bound + 1):
        for s1 in range(total, -1, -1):
            for s2 in range(total - s1, -1, -1):
                yield (s1, s2, total - s1 - s2)


def resonance_scan(spectrum, order_bound: int, tol: float = 1e-9) -> ResonanceReport:
    """Exhaustive scan of nonnegative triples with ``1 <= |s| <= order_bound``."""
    if order_bound < 1:
        raise ValueError("order_bound must be at least 1")
    e1, e2 = (complex(v) for v in spectrum)
    is_complex = abs(e1.imag) > tol or abs(e2.imag) > tol
    targets = {"eps1": e1, "eps2": e2, "1": 1.0 + 0j}
    report = ResonanceReport(order_bound=order_bound, tol=tol)
    for s in _triples(order_bound):
        value = s[0] * e1 + s[1] * e2 + s[2]
        for name, t in targets.items():
            if (s, name) in _TRIVIAL:
                continue
            res = abs(value - t)
            if res <= tol:
                report.relations.append(Relation(s, name, res, EXACT))
            elif is_complex:
                res_re = abs(value.real - t.real)
                if res_re <= tol:
                    report.relations.append(Relation(s, name, res_re, REAL_PART))
    return report


def spectrum_resonances(
    lams: Sequence[complex], order_bound: int, tol: float = 1e-9, min_order: int = 2
) -> ResonanceReport:
    """Relations ``lam_j = (s, lam)`` and their real-part variant for any spectrum."""
    lams = [complex(v) for v in lams]
    n = len(lams)
    report = ResonanceReport(order_bound=order_bound, tol=tol)
    for total in range(min_order, order_bound + 1):
        for s in _compositions(total, n):
            value = sum(si * li for si, li in zip(s, lams))
            for j, lj in enumerate(lams):
                if total == 1 and s[j] == 1:
                    continue
                res = abs(lj - value)
                if res <= tol:
                    report.relations.append(Relation(s, f"lambda{j + 1}", res, EXACT))
                elif abs(lj.real - value.real) <= tol:
                    report.relations.append(
                        Relation(s, f"lambda{j + 1}", abs(lj.real - value.real), REAL_PART)
                    )
    return report


def center_resonances(l1: complex, l2: complex, order_bound: int, tol: float = 1e-9) -> ResonanceReport:
    """Relations ``s1*l1 + s2*l2 = 0`` (target ``"0"``) and ``= l_j``, trivial ones excluded."""
    l1, l2 = complex(l1), complex(l2)
    report = ResonanceReport(order_bound=order_bound, tol=tol)
    for total in range(1, order_bound + 1):
        for s1 in range(total, -1, -1):
            s = (s1, total - s1)
            value = s[0] * l1 + s[1] * l2
            if abs(value) <= tol:
                report.relations.append(Relation(s, "0", abs(value)))
            for name, t in (("lambda1", l1), ("lambda2", l2)):
                if (name == "lambda1" and s == (1, 0)) or (name == "lambda2" and s == (0, 1)):
                    continue
                if abs(value - t) <= tol:
                    report.relations.append(Relation(s, name, abs(value - t)))
    return report


def _compositions(total: int, n: int):
    for cut in itertools.combinations(range(total + n - 1), n - 1):
        parts = []
        prev = -1
        for c in cut + (total + n - 1,):
            parts.append(c - prev - 1)
            prev = c
        yield tuple(parts)
