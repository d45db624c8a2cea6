"""Singular points of the lifted geodesic flow on the discriminant curve.

At a point ``q`` with ``Delta(q) = 0`` the lifted field ``(2Delta, 2pDelta, M)``
vanishes at the roots of the cubic ``M(q, p)``. Those roots (admissible
directions), the isotropic double root ``p0 = -b/c`` and the linear data of the
isotropic field decide the class tag.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metric import (
    DISC_BAND,
    DiscriminantError,
    Direction,
    Jet,
    Metric,
    MetricError,
    _quadratic_roots,
    brioschi_K1,
    trace_discriminant,
)
from .resonance import ResonanceReport, resonance_scan

__all__ = [
    "CubicM",
    "SpectrumPair",
    "PointClassification",
    "SingularError",
    "TangencyError",
    "cubic_M",
    "cubic_M_jet",
    "admissible_directions",
    "check_factorization",
    "lambda_spectrum",
    "epsilon_spectrum",
    "tangency_verdict",
    "classify",
    "isotropic_root",
    "CLASSES",
]

CLASSES = ("C1", "C2", "C3", "Ds", "Dn", "Df", "Z", "NonGeneric")

TRANSVERSE = "transverse"
ORDER1 = "order1"
HIGHER = "higher"
IDENTICAL = "identical"

MERGE_BAND = 1e-6
TANGENCY_BAND = 1e-9
K1_BAND = 1e-9
EPS_ZERO_BAND = 1e-6
EPS_SPLIT_BAND = 1e-9
SINGULAR_BAND = 1e-7


class SingularError(ValueError):
    """A precondition about the singular point does not hold."""


class TangencyError(SingularError):
    """The isotropic direction is transverse to the discriminant."""


@dataclass(frozen=True)
class CubicM:
    """``M(q, p) = mu0 + mu1 p + mu2 p^2 + mu3 p^3``."""

    mu0: float
    mu1: float
    mu2: float
    mu3: float

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.mu0, self.mu1, self.mu2, self.mu3)

    def __call__(self, p: float) -> float:
        return ((self.mu3 * p + self.mu2) * p + self.mu1) * p + self.mu0

    def derivative(self, p: float) -> float:
        return (3.0 * self.mu3 * p + 2.0 * self.mu2) * p + self.mu1

    def inverted(self, q: float) -> float:
        """``q^3 M(1/q)``, the cubic in the chart around ``p = inf``."""
        return ((self.mu0 * q + self.mu1) * q + self.mu2) * q + self.mu3

    def inverted_derivative(self, q: float) -> float:
        return (3.0 * self.mu0 * q + 2.0 * self.mu1) * q + self.mu2

    def at(self, d: Direction) -> float:
        return self.inverted(0.0) if d.infinite else self(d.p)

    @property
    def scale(self) -> float:
        return max(abs(v) for v in self.coefficients)


@dataclass(frozen=True)
class SpectrumPair:
    eps1: complex
    eps2: complex

    @property
    def is_complex(self) -> bool:
        return abs(self.eps1.imag) > 0.0

    @property
    def trace(self) -> float:
        return (self.eps1 + self.eps2).real

    @property
    def product(self) -> float:
        return (self.eps1 * self.eps2).real

    def normalized(self) -> "SpectrumPair":
        """Rescaled so that ``eps1 + eps2 = 1/2`` (the normal-form convention)."""
        t = self.trace
        if t == 0.0:
            raise SingularError("spectrum with zero trace cannot be normalized")
        k = 0.5 / t
        return SpectrumPair(self.eps1 * k, self.eps2 * k)

    def as_tuple(self) -> tuple[complex, complex]:
        return (self.eps1, self.eps2)


@dataclass
class RootInfo:
    direction: Direction
    multiplicity: int
    isotropic: bool
    lambdas: tuple[float, float] | None = None


@dataclass
class PointClassification:
    tag: str
    point: tuple[float, float]
    K1: float
    roots: list[RootInfo]
    tangency: str
    eps: SpectrumPair | None = None
    resonances: ResonanceReport | None = None
    p0: Direction | None = None
    negated: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def directions(self) -> list[tuple[Direction, int]]:
        return [(r.direction, r.multiplicity) for r in self.roots]

    @property
    def lambdas(self) -> list[tuple[Direction, tuple[float, float] | None]]:
        return [(r.direction, r.lambdas) for r in self.roots]

    def roots_text(self) -> str:
        return ";".join(
            f"{r.direction}" + (f"x{r.multiplicity}" if r.multiplicity > 1 else "")
            for r in self.roots
        )


def _mu(j: Jet) -> tuple[float, float, float, float]:
    a, b, c = j.a, j.b, j.c
    mu0 = a * (j.a_y - 2.0 * j.b_x) + j.a_x * b
    mu1 = b * (3.0 * j.a_y - 2.0 * j.b_x) + j.a_x * c - 2.0 * a * j.c_x
    mu2 = b * (2.0 * j.b_y - 3.0 * j.c_x) + 2.0 * j.a_y * c - a * j.c_y
    mu3 = c * (2.0 * j.b_y - j.c_x) - b * j.c_y
    return mu0, mu1, mu2, mu3


def cubic_M(m: Metric, q) -> CubicM:
    x, y = float(q[0]), float(q[1])
    return CubicM(*_mu(m.jet(x, y)))


def cubic_M_jet(m: Metric, q, h: float = 1e-6) -> tuple[CubicM, CubicM, CubicM]:
    """``M`` and its x- and y-partials (coefficientwise, central differences)."""
    x, y = float(q[0]), float(q[1])
    mx = [(u - v) / (2 * h) for u, v in zip(_mu(m.jet(x + h, y)), _mu(m.jet(x - h, y)))]
    my = [(u - v) / (2 * h) for u, v in zip(_mu(m.jet(x, y + h)), _mu(m.jet(x, y - h)))]
    return cubic_M(m, q), CubicM(*mx), CubicM(*my)


def _require_on_discriminant(j: Jet, band: float = DISC_BAND) -> None:
    if abs(j.delta) > band * j.scale**2:
        raise DiscriminantError(f"point is off the discriminant (Delta = {j.delta:.3e})")


def isotropic_root(j: Jet) -> Direction:
    """The double isotropic direction at a discriminant point."""
    if abs(j.c) > abs(j.b) * 1e-12 and j.c != 0.0:
        return Direction.affine(-j.b / j.c)
    if j.a != 0.0:
        return Direction.at_infinity()
    raise MetricError("metric coefficients vanish simultaneously")


def _merge(roots: list[tuple[Direction, int]], band: float) -> list[tuple[Direction, int]]:
    out: list[list] = []
    for d, k in roots:
        for slot in out:
            if slot[0].distance(d) <= band:
                slot[1] += k
                break
        else:
            out.append([d, k])
    out.sort(key=lambda s: (s[0].infinite, s[0].p))
    return [(d, k) for d, k in out]


def _quotient_roots(cm: CubicM, p0: Direction, band: float) -> list[tuple[Direction, int]]:
    mu0, mu1, mu2, mu3 = cm.coefficients
    if not p0.infinite:
        r = p0.p
        # synthetic division by (p - r)
        A = mu3
        B = mu2 + r * A
        C = mu1 + r * B
        roots = _quadratic_roots(A, B, C, band) if max(abs(A), abs(B), abs(C)) > 0 else []
        return [(Direction.at_infinity() if math.isinf(t) else Direction.affine(t), k) for t, k in roots]
    # inverted chart: mu3 + mu2 s + mu1 s^2 + mu0 s^3 has the root s = 0
    A, B, C = mu0, mu1, mu2
    out = []
    for s, k in _quadratic_roots(A, B, C, band):
        if math.isinf(s):
            out.append((Direction.affine(0.0), k))
        elif s == 0.0:
            out.append((Direction.at_infinity(), k))
        else:
            out.append((Direction.affine(1.0 / s), k))
    return out


def admissible_directions(
    m: Metric, q, *, merge_band: float = MERGE_BAND, band: float = DISC_BAND
) -> list[tuple[Direction, int]]:
    """Real roots of ``M(q, .)`` over RP^1 with multiplicity; ``p0`` is always among them."""
    j = m.jet(float(q[0]), float(q[1]))
    _require_on_discriminant(j, band)
    p0 = isotropic_root(j)
    cm = CubicM(*_mu(j))
    roots = [(p0, 1)] + _quotient_roots(cm, p0, 1e-12)
    return _merge(roots, merge_band)


def check_factorization(m: Metric, q, p_samples: Sequence[float]) -> float:
    """Max of ``|M - (p - p0)(2(Delta_x + p Delta_y) + M_p)/3|`` over the samples."""
    j = m.jet(float(q[0]), float(q[1]))
    _require_on_discriminant(j)
    if j.c == 0.0:
        raise SingularError("isotropic direction is vertical; use the inverted chart")
    p0 = -j.b / j.c
    cm = CubicM(*_mu(j))
    worst = 0.0
    for p in p_samples:
        p = float(p)
        rhs = (p - p0) * (2.0 * (j.delta_x + p * j.delta_y) + cm.derivative(p)) / 3.0
        worst = max(worst, abs(cm(p) - rhs))
    return worst


def lambda_spectrum(m: Metric, q, p: Direction | float, *, band: float = SINGULAR_BAND) -> tuple[float, float]:
    """Nonzero eigenvalues of the lifted field at the singular point ``(q, p)``."""
    if not isinstance(p, Direction):
        p = Direction.affine(p)
    j = m.jet(float(q[0]), float(q[1]))
    _require_on_discriminant(j)
    cm = CubicM(*_mu(j))
    if p.infinite or abs(p.p) > 1.0:
        s = p.q
        val = cm.inverted(s)
        lam = (2.0 * (s * j.delta_x + j.delta_y), -cm.inverted_derivative(s))
        scale = cm.scale * (1.0 + abs(s) ** 3)
    else:
        pp = p.p
        val = cm(pp)
        lam = (2.0 * (j.delta_x + pp * j.delta_y), cm.derivative(pp))
        scale = cm.scale * (1.0 + abs(pp) ** 3)
    if abs(val) > band * max(scale, j.scale**2):
        raise SingularError(f"direction {p} is not a root of M (M = {val:.3e})")
    return lam


def _reduced_jacobian(j: Jet, p: float) -> np.ndarray:
    """Jacobian of the isotropic field restricted to ``F = 0`` at ``(q, p)``.

    Uses ``x' = G1 = cp + b``, ``y' = p G1``, ``p' = G2`` and the implicit
    function theorem on ``F`` to drop ``y`` (or ``x``).
    """
    s = j.second
    c_xx, c_xy, c_yy = s["c_xx"], s["c_xy"], s["c_yy"]
    b_xx, b_xy, b_yy = s["b_xx"], s["b_xy"], s["b_yy"]
    a_xx, a_xy, a_yy = s["a_xx"], s["a_xy"], s["a_yy"]
    G1 = j.c * p + j.b
    G1x = j.c_x * p + j.b_x
    G1y = j.c_y * p + j.b_y
    G1p = j.c
    G2x = -0.5 * (c_xy * p**3 + (c_xx + 2 * b_xy) * p**2 + (2 * b_xx + a_xy) * p + a_xx)
    G2y = -0.5 * (c_yy * p**3 + (c_xy + 2 * b_yy) * p**2 + (2 * b_xy + a_yy) * p + a_xy)
    G2p = -0.5 * (3 * j.c_y * p**2 + 2 * (j.c_x + 2 * j.b_y) * p + 2 * j.b_x + j.a_y)
    Fx, Fy, Fp = j.F_x(p), j.F_y(p), j.F_p(p)
    if max(abs(Fx), abs(Fy)) <= 1e-12 * j.scale:
        raise SingularError("isotropic surface is singular here (grad F = 0)")
    if abs(Fy) >= abs(Fx):
        yx, yp = -Fx / Fy, -Fp / Fy
        return np.array([
            [G1x + G1y * yx, G1p + G1y * yp],
            [G2x + G2y * yx, G2p + G2y * yp],
        ])
    xy, xp = -Fy / Fx, -Fp / Fx
    H1y, H1x, H1p = p * G1y, p * G1x, G1 + p * G1p
    return np.array([
        [H1y + H1x * xy, H1p + H1x * xp],
        [G2y + G2x * xy, G2p + G2x * xp],
    ])


def _eig2(J: np.ndarray) -> SpectrumPair:
    tr = float(J[0, 0] + J[1, 1])
    det = float(J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0])
    disc = tr * tr / 4.0 - det
    root = cmath.sqrt(disc)
    e1, e2 = complex(tr / 2.0 + root), complex(tr / 2.0 - root)
    if disc >= 0:
        e1, e2 = complex(e1.real, 0.0), complex(e2.real, 0.0)
        if e2.real > e1.real:
            e1, e2 = e2, e1
    else:
        if e1.imag < 0:
            e1, e2 = e2, e1
    return SpectrumPair(e1, e2)


def _tangency_value(j: Jet, p0: float) -> float:
    return j.F_x(p0) + p0 * j.F_y(p0)


def epsilon_spectrum(m: Metric, q, *, band: float = TANGENCY_BAND) -> SpectrumPair:
    """Eigenvalues of the isotropic field on the isotropic surface at ``(q, p0)``.

    Ordering: real pairs descend; complex pairs put positive imaginary part first.
    """
    j = m.jet(float(q[0]), float(q[1]), order=2)
    _require_on_discriminant(j)
    p0 = isotropic_root(j)
    if p0.infinite:
        raise SingularError("vertical isotropic direction; rotate coordinates first")
    t = _tangency_value(j, p0.p)
    if abs(t) > band * j.scale:
        raise TangencyError(f"isotropic direction is transverse to the discriminant (F_x + p F_y = {t:.3e})")
    return _eig2(_reduced_jacobian(j, p0.p))


def _spectrum_split(sp: SpectrumPair) -> float:
    """Relative size of ``tr^2/4 - det`` (zero when eps1 = eps2)."""
    tr, det = sp.trace, sp.product
    disc = tr * tr / 4.0 - det
    return disc / max(tr * tr / 4.0, abs(det), 1e-300)


def _eps_has_zero(sp: SpectrumPair, band: float = EPS_ZERO_BAND) -> bool:
    big = max(abs(sp.eps1), abs(sp.eps2))
    if big == 0.0:
        return True
    return min(abs(sp.eps1), abs(sp.eps2)) <= band * big


def tangency_verdict(
    m: Metric, q, *, N: int = 9, span: float = 0.1, band: float = TANGENCY_BAND
) -> str:
    """``transverse``, ``order1``, ``higher`` or ``identical`` for the isotropic direction at ``q``."""
    j = m.jet(float(q[0]), float(q[1]), order=2)
    _require_on_discriminant(j)
    p0 = isotropic_root(j)
    if p0.infinite:
        raise SingularError("vertical isotropic direction; rotate coordinates first")
    if abs(_tangency_value(j, p0.p)) > band * j.scale:
        return TRANSVERSE
    if N >= 2 and _identically_tangent(m, q, N, span, band):
        return IDENTICAL
    sp = _eig2(_reduced_jacobian(j, p0.p))
    return HIGHER if _eps_has_zero(sp) else ORDER1


def _identically_tangent(m: Metric, q, N: int, span: float, band: float) -> bool:
    half = max(N // 2, 1)
    step = 0.5 * span / half
    try:
        pts = trace_discriminant(m, q, 0.5 * span, step, both_ways=True)
    except DiscriminantError:
        return False
    if len(pts) < min(N, 3):
        return False
    for x, y in pts:
        jj = m.jet(x, y)
        d = isotropic_root(jj)
        if d.infinite or abs(_tangency_value(jj, d.p)) > band * jj.scale:
            return False
    return True


def classify(
    m: Metric,
    q,
    *,
    k1_band: float = K1_BAND,
    tangency_band: float = TANGENCY_BAND,
    resonance_order: int = 6,
    resonance_tol: float = 1e-9,
    N: int = 9,
    span: float = 0.1,
) -> PointClassification:
    """Class tag of a discriminant point following the K1 / tangency decision tree.

    Points where ``c < 0`` are classified for the negated metric (same
    geodesics), so that the working convention ``c > 0`` holds.
    """
    x, y = float(q[0]), float(q[1])
    j = m.jet(x, y, order=2)
    _require_on_discriminant(j)
    if math.hypot(j.delta_x, j.delta_y) <= 1e-12 * j.scale**2:
        raise DiscriminantError("discriminant is not regular at this point")
    notes: list[str] = []
    negated = False
    if abs(j.c) <= 1e-12 * j.scale:
        raise SingularError("c vanishes at the point; the isotropic direction is vertical")
    if j.c < 0:
        m = m.scaled(-1.0)
        j = m.jet(x, y, order=2)
        negated = True
        notes.append("classified the negated metric (c < 0)")

    K1 = brioschi_K1(m, (x, y))
    p0 = isotropic_root(j)
    dirs = admissible_directions(m, (x, y))
    cm = CubicM(*_mu(j))
    roots = []
    for d, k in dirs:
        iso = d.distance(p0) <= MERGE_BAND
        lam = None
        if k == 1:
            try:
                lam = lambda_spectrum(m, (x, y), d)
            except SingularError:
                lam = None
        roots.append(RootInfo(d, k, iso, lam))

    verdict = tangency_verdict(m, (x, y), N=N, span=span, band=tangency_band)
    mult0 = next(r.multiplicity for r in roots if r.isotropic)
    others = [r for r in roots if not r.isotropic]
    k1_scale = j.scale**4
    k1_sign = 0 if abs(K1) <= k1_band * k1_scale else (1 if K1 > 0 else -1)

    eps = None
    res = None
    tag = "NonGeneric"
    if verdict == TRANSVERSE:
        if mult0 != 1:
            notes.append("transverse isotropic direction but p0 is not a simple root")
        elif k1_sign < 0:
            tag = "C1" if not others else "NonGeneric"
        elif k1_sign > 0:
            tag = "C3" if len(others) == 2 and all(r.multiplicity == 1 for r in others) else "NonGeneric"
        else:
            # near-double non-isotropic root: accept one double root or a barely split pair
            q_mu = _quotient_split(cm, p0)
            tag = "C2" if q_mu <= 1e-6 else "NonGeneric"
        if tag == "NonGeneric" and not notes:
            notes.append("root structure of M disagrees with the sign of K1")
    else:
        eps = _eig2(_reduced_jacobian(j, p0.p))
        res = resonance_scan(eps.normalized().as_tuple(), resonance_order, resonance_tol) if eps.trace != 0 else None
        if k1_sign <= 0:
            notes.append("tangent isotropic direction with K1 <= 0")
        elif mult0 != 2 or len(others) != 1 or others[0].multiplicity != 1:
            notes.append("tangent isotropic direction without the root pattern p0 = p1 != p2")
        elif verdict == IDENTICAL:
            tag = "Z"
        elif verdict == ORDER1:
            if eps.is_complex:
                tag = "Df" if abs(_spectrum_split(eps)) > EPS_SPLIT_BAND else "NonGeneric"
            elif abs(_spectrum_split(eps)) <= EPS_SPLIT_BAND:
                notes.append("eps1 = eps2")
            elif eps.product < 0:
                tag = "Ds"
            else:
                tag = "Dn"
            if tag == "NonGeneric" and not notes:
                notes.append("eps1 = eps2")
        else:
            notes.append("tangency of order higher than one")
    return PointClassification(
        tag=tag,
        point=(x, y),
        K1=K1,
        roots=roots,
        tangency=verdict,
        eps=eps,
        resonances=res,
        p0=p0,
        negated=negated,
        notes=notes,
    )


def _quotient_split(cm: CubicM, p0: Direction) -> float:
    mu0, mu1, mu2, mu3 = cm.coefficients
    if p0.infinite:
        A, B, C = mu0, mu1, mu2
    else:
        r = p0.p
        A = mu3
        B = mu2 + r * A
        C = mu1 + r * B
    scale = max(B * B, abs(4 * A * C), 1e-300)
    return abs(B * B - 4 * A * C) / scale
