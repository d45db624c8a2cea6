"""Families of geodesics leaving a discriminant point, and fits of their asymptotics.

Launches start at a small offset ``delta`` from the singular point along the
class-specific asymptotic data and integrate away from it:

* simple non-isotropic roots: one smooth geodesic through ``q`` (both halves);
* transverse isotropic root (C classes): the semicubic family, seeded as
  ``P + B e_fibre + kappa B^2 e1``;
* Z: leaves ``y = x^2/4 + alpha x^4`` in Clairaut coordinates;
* Ds, Dn, Df: seeds in the blow-up chart ``y = eps x^2 + u p^2`` on leaves
  ``u = 1 + alpha * (...)`` built from the eps-spectrum.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import linregress

from .flow import (
    AFFINE,
    INVERTED,
    LiftedState,
    LiftedTrace,
    _F_chart,
    _lifted,
    blowdown,
    field_blowup,
    integrate_blowup,
    integrate_lifted,
    singular_eigenvector,
)
from .expr import as_expr
from .integrator import IntegrationError, IntegratorConfig, Trace
from .metric import (
    ISOTROPIC,
    SPACELIKE,
    TIMELIKE,
    TOL_ISO,
    Direction,
    Metric,
    causal_label,
)
from .singular import PointClassification, SingularError, classify

__all__ = [
    "FamilyError",
    "FitError",
    "GeodesicTrace",
    "FitResult",
    "FamilyParams",
    "launch_family",
    "launch_simple_root",
    "fit_exponent",
    "fit_family_Z",
    "fit_quadratic",
    "causal_census",
    "lemma_PL2_check",
    "winding_number",
    "family_manifest",
    "UZeroRun",
    "u_zero_probe",
]


# relative |F| below which a whole member counts as isotropic; per-sample labels
# use the much tighter TOL_ISO, which the seeding error near a degenerate base exceeds
CURVE_ISO_TOL = 1e-5


class FamilyError(ValueError):
    pass


class FitError(ValueError):
    pass


@dataclass
class GeodesicTrace:
    """Planar samples of one family member, ordered away from the base point."""

    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    F: np.ndarray
    delta: np.ndarray
    causal: list[str]
    base: tuple[float, float]
    origin_class: str
    role: str
    param: dict = field(default_factory=dict)
    offset: float = 1e-3
    parent: object = None
    member_id: int = 0
    extra: dict = field(default_factory=dict)
    F_rel: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.x)

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    @property
    def radius(self) -> np.ndarray:
        return np.hypot(self.x - self.base[0], self.y - self.base[1])

    def label(self, exclude: float | None = None, curve_tol: float = CURVE_ISO_TOL) -> str:
        """Causal label of the curve outside ``exclude`` (default ``2 * offset``) of the base.

        The curve is isotropic when the median relative ``F`` stays within
        ``curve_tol``; otherwise the majority of the per-sample labels wins.
        """
        r = 2.0 * self.offset if exclude is None else exclude
        far = self.radius > r
        if not far.any():
            far = np.ones(len(self.x), dtype=bool)
        if self.F_rel is not None and float(np.median(np.abs(self.F_rel[far]))) <= curve_tol:
            return ISOTROPIC
        keep = [c for c, k in zip(self.causal, far) if k]
        counts = Counter(keep)
        return max((TIMELIKE, SPACELIKE, ISOTROPIC), key=lambda k: (counts.get(k, 0), k == ISOTROPIC))


@dataclass
class FitResult:
    model: str
    values: dict
    stderr: dict
    window: tuple[float, float]
    rms: float
    n: int

    @property
    def value(self) -> float:
        return next(iter(self.values.values()))

    @property
    def error(self) -> float:
        return next(iter(self.stderr.values()))


@dataclass
class FamilyParams:
    delta: float = 1e-3
    leaves: Sequence[float] = (-1.0, 0.0, 1.0)
    phases: Sequence[float] | None = None
    kappas: Sequence[float] = (-2.0, -0.5, 0.5, 2.0)
    extent: float = 1.0
    config: IntegratorConfig = field(default_factory=lambda: IntegratorConfig(rtol=1e-11, atol=1e-14))
    simple_roots: bool = True
    sides: Sequence[int] = (1, -1)
    tol_iso: float = TOL_ISO
    # generic node members start closer in so the fast component has time to
    # dominate before the fit window; the exceptional member keeps ``delta``
    node_delta: float = 1e-5
    # Z members read their parameter off (p^2 - y) / y^2, whose error goes like
    # rtol / offset^2; a wider offset and tighter rtol keep it near 1e-9
    z_delta: float = 3e-3


# helpers -------------------------------------------------------------------


def _labels(m: Metric, xs, ys, ps, tol_iso: float):
    Fs, Ds, Rs, labs = [], [], [], []
    for x, y, p in zip(xs, ys, ps):
        j = m.jet(x, y)
        if math.isinf(p):
            val, scale = _F_chart(j, 0.0, INVERTED)
        elif abs(p) > 1.0:
            val, scale = _F_chart(j, 1.0 / p, INVERTED)
        else:
            val, scale = _F_chart(j, p, AFFINE)
        Fs.append(val)
        Ds.append(j.delta)
        Rs.append(val / scale if scale > 0 else 0.0)
        labs.append(causal_label(val, scale, tol_iso))
    return np.array(Fs), np.array(Ds), labs, np.array(Rs)


def _member_from_lifted(
    m: Metric, tr: LiftedTrace, base, cls: str, role: str, param: dict, params: FamilyParams
) -> GeodesicTrace:
    p = tr.p
    F, D, lab, R = _labels(m, tr.x, tr.y, p, params.tol_iso)
    return GeodesicTrace(tr.x.copy(), tr.y.copy(), p, F, D, lab, (float(base[0]), float(base[1])),
                         cls, role, dict(param), params.delta, tr, F_rel=R)


def _join(a: GeodesicTrace, b: GeodesicTrace) -> GeodesicTrace:
    """Glue two halves leaving the same base point into one curve through it."""
    cat = lambda u, v: np.concatenate([u[::-1], v])
    out = GeodesicTrace(
        cat(a.x, b.x), cat(a.y, b.y), cat(a.p, b.p), cat(a.F, b.F), cat(a.delta, b.delta),
        a.causal[::-1] + b.causal, a.base, a.origin_class, a.role, dict(a.param), a.offset, (a.parent, b.parent),
        F_rel=cat(a.F_rel, b.F_rel) if a.F_rel is not None and b.F_rel is not None else None,
    )
    return out


def _outward_sense(v: np.ndarray, disp: np.ndarray) -> int:
    return 1 if float(v @ disp) >= 0.0 else -1


def _radius_stop(base, extent: float):
    bx, by = base

    def stop(y, ch):
        if math.hypot(y[0] - bx, y[1] - by) >= extent:
            return "extent"
        return None
    return stop


def _run_lifted(m: Metric, seed: LiftedState, P: np.ndarray, base, params: FamilyParams) -> LiftedTrace:
    j = m.jet(seed.x, seed.y)
    v = _lifted(j, seed.s, seed.chart)
    sense = _outward_sense(v, seed.array() - P)
    return integrate_lifted(m, seed, params.config, sense=sense, stop=_radius_stop(base, params.extent),
                            arclength=True)


# simple roots --------------------------------------------------------------


def launch_simple_root(
    m: Metric, q, d: Direction, params: FamilyParams = FamilyParams(), cls: str = ""
) -> GeodesicTrace:
    """The smooth geodesic through ``q`` in the simple admissible direction ``d``."""
    e1, lam1, chart = singular_eigenvector(m, q, d)
    st = LiftedState.from_direction(float(q[0]), float(q[1]), d)
    P = st.array()
    halves = []
    for sgn in (-1.0, 1.0):
        s = P + sgn * params.delta * e1
        seed = LiftedState(s[0], s[1], s[2], chart)
        tr = integrate_lifted(m, seed, params.config, sense=1 if lam1 > 0 else -1,
                              stop=_radius_stop(q, params.extent), arclength=True)
        halves.append(_member_from_lifted(m, tr, q, cls, "simple_root", {"direction": str(d)}, params))
    out = _join(halves[0], halves[1])
    out.extra["lambda1"] = lam1
    return out


# class dispatch ------------------------------------------------------------


def launch_family(
    m: Metric, q, params: FamilyParams = FamilyParams(), classification: PointClassification | None = None
) -> list[GeodesicTrace]:
    """Launch the family of geodesics leaving the discriminant point ``q``."""
    pc = classification if classification is not None else classify(m, q)
    cls = pc.tag
    if cls == "NonGeneric":
        raise FamilyError("no family is defined at a non-generic point")
    q = pc.point
    out: list[GeodesicTrace] = []
    if cls in ("C1", "C2", "C3"):
        out.extend(_launch_C(m, pc, params))
    elif cls == "Z":
        out.extend(_launch_Z(m, pc, params))
    else:
        out.extend(_launch_D(m, pc, params))
    if params.simple_roots:
        for r in pc.roots:
            if r.multiplicity == 1 and not r.isotropic:
                try:
                    out.append(launch_simple_root(m, q, r.direction, params, cls))
                except SingularError:
                    continue
    for k, g in enumerate(out):
        g.member_id = k
        _settle_isotropic(g)
    return out


def _settle_isotropic(g: GeodesicTrace) -> None:
    """On a curve judged isotropic, samples within the curve tolerance are isotropic too.

    Integration drift moves ``F`` off zero by a few ``rtol`` relative to its
    terms, which the per-sample band would read as a causal character.
    """
    if g.F_rel is None or g.label() != ISOTROPIC:
        return
    g.causal = [ISOTROPIC if abs(r) <= CURVE_ISO_TOL else c for c, r in zip(g.causal, g.F_rel)]


def _launch_C(m: Metric, pc: PointClassification, params: FamilyParams) -> list[GeodesicTrace]:
    q = pc.point
    p0 = pc.p0
    e1, lam1, chart = singular_eigenvector(m, q, p0)
    st = LiftedState.from_direction(q[0], q[1], p0)
    P = st.array()
    # scale e1 so that its planar part has unit length
    e1 = e1 / math.hypot(e1[0], e1[1])
    fibre = np.array([0.0, 0.0, 1.0])
    members = []
    for kappa in params.kappas:
        for B in (params.delta, -params.delta):
            s = P + B * fibre + kappa * B * B * e1
            seed = LiftedState(s[0], s[1], s[2], chart)
            tr = _run_lifted(m, seed, P, q, params)
            members.append(_member_from_lifted(
                m, tr, q, pc.tag, "member", {"kappa": kappa, "branch": 1 if B > 0 else -1}, params))
    return members


def _launch_Z(m: Metric, pc: PointClassification, params: FamilyParams) -> list[GeodesicTrace]:
    q = pc.point
    j = m.jet(*q)
    if pc.p0 is None or pc.p0.infinite or abs(pc.p0.p) > 1e-9 or abs(j.delta_x) > 1e-9 * j.scale**2:
        raise FamilyError("Z launches need Clairaut coordinates at q (discriminant along x, p0 = 0)")
    d = params.z_delta
    # relative error control only: the seed state is of size d^2
    zp = replace(params, delta=d, config=params.config.with_(rtol=min(params.config.rtol, 1e-13), atol=1e-12 * d**4))
    members = []
    for alpha in params.leaves:
        halves = []
        for sgn in (-1.0, 1.0):
            x = sgn * d
            y = d * d / 4.0 + alpha * d**4
            p = sgn * (d / 2.0 + 4.0 * alpha * d**3)
            seed = LiftedState(q[0] + x, q[1] + y, p, AFFINE)
            tr = _run_lifted(m, seed, np.array([q[0], q[1], 0.0]), q, zp)
            halves.append(_member_from_lifted(m, tr, q, "Z", "member", {"alpha": alpha}, zp))
        g = _join(halves[0], halves[1])
        g.role = "isotropic" if alpha == 0 else "member"
        members.append(g)
    return members


def _normal_data(m: Metric, pc: PointClassification):
    if m.normal_form is None:
        raise FamilyError("D-class launches need the metric in normal form (omega, eps)")
    if abs(pc.point[0]) > 1e-12 or abs(pc.point[1]) > 1e-12:
        raise FamilyError("D-class launches are defined at the origin of the normal form")
    om, eps = m.normal_form
    sp = pc.eps.normalized()
    return om, eps, sp


def _blowup_member(
    m: Metric, om, eps: float, seed: np.ndarray, params: FamilyParams, cls: str, role: str, param: dict,
    sense: int | None = None, offset: float | None = None,
) -> GeodesicTrace:
    if sense is None:
        v = field_blowup(om, eps, seed)
        sense = _outward_sense(v[[0, 2]], seed[[0, 2]])
    ext = params.extent

    def stop(s):
        x, y, p = blowdown(s, eps)
        if math.hypot(x, y) >= ext or abs(p) >= 10.0 * ext or abs(s[1]) > 1e8:
            return "extent"
        return None

    tr = integrate_blowup(om, eps, seed, params.config, sense=sense, stop=stop)
    xyp = np.array([blowdown(s, eps) for s in tr.y])
    x, y, p = xyp[:, 0], xyp[:, 1], xyp[:, 2]
    F, D, lab, R = _labels(m, x, y, p, params.tol_iso)
    g = GeodesicTrace(x, y, p, F, D, lab, (0.0, 0.0), cls, role, param,
                      params.delta if offset is None else offset, tr, F_rel=R)
    g.extra["u"] = tr.y[:, 1].copy()
    g.extra["sense"] = sense
    return g


def _launch_D(m: Metric, pc: PointClassification, params: FamilyParams) -> list[GeodesicTrace]:
    om, eps, sp = _normal_data(m, pc)
    d = params.delta
    out = []
    if pc.tag == "Ds":
        e1, e2 = sp.eps1.real, sp.eps2.real
        for side in params.sides:
            for alpha in params.leaves:
                x = side * d
                p = e1 * x
                seed = np.array([x, 1.0 + alpha * abs(p) ** (1.0 / e1), p])
                out.append(_blowup_member(m, om, eps, seed, params, "Ds", "member",
                                          {"leaf": alpha, "side": side}))
            seed = np.array([side * d, 1.0, e2 * side * d])
            out.append(_blowup_member(m, om, eps, seed, params, "Ds", "separatrix",
                                      {"leaf": 0.0, "side": side}))
        return out
    # node and focus: the planar rates are 2 omega(0) eps_i with Re eps_i > 0
    w0 = om.eval(0.0, 0.0)
    outward = 1 if w0 > 0 else -1
    phases = params.phases
    if phases is None:
        phases = tuple(np.linspace(0.0, 2.0 * math.pi, 12, endpoint=False))
    if pc.tag == "Dn":
        e1, e2 = sp.eps1.real, sp.eps2.real
        for alpha in params.leaves:
            for th in phases:
                th = float(th)
                role = "exceptional" if abs(math.cos(th)) < 1e-12 else "member"
                r = d if role == "exceptional" else params.node_delta
                eta, zeta = r * math.cos(th), r * math.sin(th)
                x = eta + zeta
                p = e1 * eta + e2 * zeta
                u = 1.0 + alpha * (abs(eta) ** (1.0 / e1) + abs(zeta) ** (1.0 / e2))
                out.append(_blowup_member(m, om, eps, np.array([x, u, p]), params, "Dn", role,
                                          {"leaf": alpha, "phase": th}, sense=outward, offset=r))
        return out
    # Df: real Jordan coordinates of the (x, p) block, eigenvector (1, eps1)
    a, b = sp.eps1.real, sp.eps1.imag
    for alpha in params.leaves:
        for th in phases:
            th = float(th)
            xi1, xi2 = d * math.cos(th), d * math.sin(th)
            x = xi1
            p = a * xi1 + b * xi2
            u = 1.0 + alpha * (xi1 * xi1 + xi2 * xi2) ** (1.0 / (2.0 * a))
            out.append(_blowup_member(m, om, eps, np.array([x, u, p]), params, "Df", "member",
                                      {"leaf": alpha, "phase": th}, sense=outward))
    return out


# fits ----------------------------------------------------------------------


def _window_mask(r: np.ndarray, window) -> np.ndarray:
    lo, hi = window
    return (r >= lo) & (r <= hi)


def fit_exponent(trace_or_indep, dep=None, window: tuple[float, float] = (1e-2, 1e-1)) -> FitResult:
    """Slope of ``log|dep|`` against ``log|indep|`` over ``window`` (on ``|indep|``).

    Given a :class:`GeodesicTrace`, fits ``|y - y_q|`` against ``|x - x_q|``.
    """
    if isinstance(trace_or_indep, GeodesicTrace):
        g = trace_or_indep
        indep, dep = g.x - g.base[0], g.y - g.base[1]
    else:
        indep = np.asarray(trace_or_indep, dtype=float)
        dep = np.asarray(dep, dtype=float)
    a, b = np.abs(indep), np.abs(dep)
    w = _window_mask(a, window) & (b > 0)
    if int(w.sum()) < 20:
        raise FitError(f"only {int(w.sum())} samples in window {window}; need 20")
    lx, ly = np.log(a[w]), np.log(b[w])
    r = linregress(lx, ly)
    resid = ly - (r.intercept + r.slope * lx)
    return FitResult(
        "power_exponent",
        {"exponent": float(r.slope), "log_prefactor": float(r.intercept)},
        {"exponent": float(r.stderr), "log_prefactor": float(r.intercept_stderr)},
        tuple(window), float(np.sqrt(np.mean(resid**2))), int(w.sum()),
    )


def _lstsq(A: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    resid = rhs - A @ coef
    dof = max(len(rhs) - A.shape[1], 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.pinv(A.T @ A)
    return coef, np.sqrt(np.abs(np.diag(cov))), float(np.sqrt(np.mean(resid**2)))


def _resample(x: np.ndarray, y: np.ndarray, window) -> tuple[np.ndarray, np.ndarray]:
    """Raw samples with ``lo <= |x| <= hi``, both signs kept, deduplicated in ``x``."""
    lo, hi = window
    sel = (np.abs(x) >= lo) & (np.abs(x) <= hi)
    xs, idx = np.unique(x[sel], return_index=True)
    return xs, y[sel][idx]


def fit_family_Z(trace: GeodesicTrace, window: tuple[float, float] | None = None,
                 nuisance: int = 2) -> FitResult:
    """Least-squares ``alpha`` in ``y - x^2/4 = alpha x^4 + b6 x^6 + ...`` relative to the base.

    ``nuisance`` even powers beyond the quartic absorb the curvature of the
    member so the window can sit where the quartic term is well above noise.
    """
    x = trace.x - trace.base[0]
    y = trace.y - trace.base[1]
    if window is None:
        reach = float(np.max(np.abs(x)))
        window = (max(trace.offset, 0.05 * reach), 0.5 * reach)
    xs, ys = _resample(x, y, window)
    if len(xs) < 20:
        raise FitError("window lies outside the trace")
    A = np.column_stack([xs ** (4 + 2 * k) for k in range(nuisance + 1)])
    coef, err, rms = _lstsq(A, ys - xs * xs / 4.0)
    return FitResult("quadratic_plus_quartic", {"alpha": float(coef[0])}, {"alpha": float(err[0])},
                     tuple(window), rms, len(xs))


def fit_quadratic(trace: GeodesicTrace, window: tuple[float, float] = (1e-2, 1e-1)) -> FitResult:
    """Least-squares ``y = c2 x^2 + c3 x^3`` relative to the base point."""
    x = trace.x - trace.base[0]
    y = trace.y - trace.base[1]
    xs, ys = _resample(x, y, window)
    if len(xs) < 20:
        raise FitError("window lies outside the trace")
    A = np.column_stack([xs**2, xs**3])
    coef, err, rms = _lstsq(A, ys)
    return FitResult("quadratic_coefficient", {"c2": float(coef[0]), "c3": float(coef[1])},
                     {"c2": float(err[0]), "c3": float(err[1])}, tuple(window), rms, len(xs))


@dataclass
class UZeroRun:
    seed: tuple[float, float, float]
    sense: int
    status: str
    u_end: float
    r_end: float

    @property
    def reaches_base(self) -> bool:
        """True when the run tends to the base with ``u`` still near zero."""
        return self.u_end < 0.1 * abs(self.seed[1]) and self.r_end < abs(self.seed[1])


def u_zero_probe(
    omega, eps: float, delta: float = 1e-3,
    config: IntegratorConfig = IntegratorConfig(rtol=1e-10, atol=1e-14, t_max=200.0),
) -> list[UZeroRun]:
    """Blow-up runs seeded at ``u = p = delta`` (``x`` in ``{0, +-delta}``), both senses.

    No geodesic leaves the base with ``u -> 0``: runs where ``u`` decreases drift
    off to ``p -> oo`` away from the base, and runs where it increases join the
    isotropic sheet ``u = 1``.
    """
    om = as_expr(omega)

    def escape(st):
        x, y, p = blowdown(st, eps)
        return "escape" if math.hypot(x, y) > 1.0 or abs(p) > 1e6 else None

    out = []
    for sx in (0.0, 1.0, -1.0):
        for sp in (1.0, -1.0):
            seed = (sx * delta, delta, sp * delta)
            for sense in (1, -1):
                try:
                    tr = integrate_blowup(om, eps, seed, config, sense=sense, stop=escape)
                    status, last = tr.status, tr.y[-1]
                except IntegrationError as e:
                    status, last = type(e).__name__, np.array(seed)
                x, y, _ = blowdown(last, eps)
                out.append(UZeroRun(seed, sense, status, float(last[1]), float(math.hypot(x, y))))
    return out


# census and invariants -----------------------------------------------------


def causal_census(family: Iterable[GeodesicTrace]) -> dict[str, int]:
    counts = {TIMELIKE: 0, SPACELIKE: 0, ISOTROPIC: 0}
    for g in family:
        counts[g.label()] += 1
    return counts


def winding_number(x: np.ndarray, p: np.ndarray, radius: float | None = None) -> float:
    """Signed turns of ``(x, p)`` about the origin, up to the first exit from ``radius``."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if radius is not None:
        out = np.nonzero(np.hypot(x, p) >= radius)[0]
        if len(out):
            x, p = x[: out[0] + 1], p[: out[0] + 1]
    ang = np.unwrap(np.arctan2(p, x))
    return float((ang[-1] - ang[0]) / (2.0 * math.pi))


def lemma_PL2_check(
    lambdas: Sequence[float], constants: Sequence[float], samples: int = 100, seed: int = 0
) -> float:
    """Max relative Lie-derivative defect of the invariant-surface function on its zero set.

    Three ``lambdas`` select the diagonal field ``xi_i' = lambda_i xi_i`` and
    ``G = c1|xi1|^(1/l1) + c2|xi2|^(1/l2) + c3 sgn(xi3)|xi3|^(1/l3)``. Two values
    ``(alpha, beta)`` select the rotation field with ``xi3' = xi3`` and
    ``G = c1 (xi1^2 + xi2^2)^(1/(2 alpha)) + c3 xi3`` (``constants = (c1, c3)``).
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    if len(lambdas) == 3:
        l = np.asarray(lambdas, dtype=float)
        c = np.asarray(constants, dtype=float)
        if np.any(l == 0):
            raise ValueError("eigenvalues must be non-zero")
        for _ in range(samples):
            xi = _surface_point_real(l, c, rng)
            grad = c / l * np.abs(xi) ** (1.0 / l - 1.0)
            grad[:2] *= np.sign(xi[:2])
            V = l * xi
            worst = max(worst, _defect(grad, V))
        return worst
    if len(lambdas) == 2:
        al, be = (float(v) for v in lambdas)
        c1, c3 = (float(v) for v in constants)
        if al == 0 or be == 0:
            raise ValueError("alpha and beta must be non-zero")
        for _ in range(samples):
            r = rng.uniform(0.2, 1.5)
            th = rng.uniform(0, 2 * math.pi)
            xi1, xi2 = r * math.cos(th), r * math.sin(th)
            rho2 = r * r
            if c3 != 0:
                xi3 = -c1 * rho2 ** (1.0 / (2 * al)) / c3
            elif c1 != 0:
                raise ValueError("surface is empty off the xi3-axis")
            else:
                raise ValueError("all constants vanish")
            k = c1 / al * rho2 ** (1.0 / (2 * al) - 1.0)
            grad = np.array([k * xi1, k * xi2, c3])
            V = np.array([al * xi1 + be * xi2, al * xi2 - be * xi1, xi3])
            worst = max(worst, _defect(grad, V))
        return worst
    raise ValueError("expected three eigenvalues or an (alpha, beta) pair")


def _defect(grad: np.ndarray, V: np.ndarray) -> float:
    den = float(np.linalg.norm(grad) * np.linalg.norm(V))
    if den == 0.0:
        return 0.0
    return abs(float(grad @ V)) / den


def _surface_point_real(l: np.ndarray, c: np.ndarray, rng) -> np.ndarray:
    """A random point of ``G = 0`` away from the coordinate planes where possible."""
    if not np.any(c):
        raise ValueError("all constants vanish")
    for _ in range(1000):
        xi = rng.uniform(0.2, 1.5, 3) * rng.choice([-1.0, 1.0], 3)
        terms = c * np.abs(xi) ** (1.0 / l)
        if c[2] != 0:
            t = -(terms[0] + terms[1]) / c[2]
            xi[2] = math.copysign(abs(t) ** l[2], t) if t != 0 else 0.0
            return xi
        if c[1] != 0:
            t = -terms[0] / c[1]
            if t < 0 or (t == 0 and c[0] != 0):
                continue
            xi[1] = math.copysign(t ** l[1], xi[1])
            return xi
        # only c1 non-zero: the surface is the plane xi1 = 0
        xi[0] = 0.0
        return xi
    raise ValueError("could not sample the surface (constants of equal sign?)")


def family_manifest(family: Sequence[GeodesicTrace], fits: dict[int, FitResult] | None = None) -> list[dict]:
    """Rows ``member_id, role, parameter, fitted coefficients, causal label``."""
    rows = []
    for g in family:
        fit = (fits or {}).get(g.member_id)
        rows.append({
            "member_id": g.member_id,
            "role": g.role,
            "parameter": ";".join(f"{k}={_fmt(v)}" for k, v in g.param.items()),
            "fit_model": fit.model if fit else "",
            "fit_values": ";".join(f"{k}={_fmt(v)}" for k, v in fit.values.items()) if fit else "",
            "fit_stderr": ";".join(f"{k}={_fmt(v)}" for k, v in fit.stderr.items()) if fit else "",
            "causal": g.label(),
        })
    return rows


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)
