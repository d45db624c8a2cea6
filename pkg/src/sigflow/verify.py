"""Named verification suites run by ``sigflow verify``.

Each suite is a list of checks against closed-form oracles on exactly solvable
metrics (the slit metric ``dy^2 - y dx^2``, the normal form with constant
``omega`` and the transverse example ``x dx^2 + (1 + x) dy^2``) or against
identities that hold for any metric.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .families import (
    FamilyParams,
    fit_exponent,
    fit_family_Z,
    fit_quadratic,
    launch_family,
    lemma_PL2_check,
    winding_number,
)
from .flow import el_integrate, line_restriction
from .integrator import IntegratorConfig
from .metric import Metric, brioschi_K1, trace_discriminant
from .resonance import REAL_PART, resonance_scan
from .singular import admissible_directions, check_factorization, classify, epsilon_spectrum

__all__ = ["Check", "SUITES", "run_suite", "random_metric", "random_diagonal_metric", "slit_metric"]


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{tag} {self.name}: value={self.value:.6g} tol={self.tol:.3g}{extra}"


def slit_metric() -> Metric:
    return Metric("-y", "0", "1", name="dy^2 - y dx^2")


def _poly(rng, const: float, scale: float) -> str:
    k = [float(v) for v in rng.normal(scale=scale, size=5)]
    return f"{const!r} + {k[0]!r}*x + {k[1]!r}*y + {k[2]!r}*x^2 + {k[3]!r}*x*y + {k[4]!r}*y^2"


def random_metric(rng) -> Metric:
    """Quadratic coefficients with the discriminant through the origin."""
    b0 = float(rng.normal(scale=0.5))
    c0 = float(rng.uniform(1.0, 2.0))
    b = _poly(rng, b0, 0.3)
    c = _poly(rng, c0, 0.3)
    # a(0) = b0^2 / c0 puts the origin on Delta = 0
    a = _poly(rng, b0 * b0 / c0, 1.0)
    return Metric(a, b, c)


def random_diagonal_metric(rng) -> Metric:
    k = [float(v) for v in rng.normal(size=5)]
    a = f"{k[0]!r}*x + {k[1]!r}*y + {k[2]!r}*x^2 + {k[3]!r}*x*y + {k[4]!r}*y^2"
    c = _poly(rng, float(rng.uniform(0.5, 2.0)), 0.5)
    return Metric(a, "0", c)


def _disc_points(m: Metric, n: int) -> np.ndarray:
    pts = trace_discriminant(m, (0.0, 0.0), 0.3, 0.01, both_ways=True)
    idx = np.linspace(0, len(pts) - 1, n).round().astype(int)
    return pts[idx]


# suites --------------------------------------------------------------------


def check_factorization_suite(seed: int = 0, tol: float = 1e-9, n_metrics: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_metrics):
        m = random_metric(rng)
        for q in _disc_points(m, 10):
            worst = max(worst, check_factorization(m, q, rng.uniform(-2.0, 2.0, 10)))
    return [Check("factorization identity", worst <= tol, worst, tol, f"{n_metrics} metrics x 10 points x 10 p")]


def check_brioschi_suite(seed: int = 0, tol: float = 1e-9, n_metrics: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_metrics):
        m = random_diagonal_metric(rng)
        j = m.jet(0.0, 0.0)
        expect = j.c * (j.a_x * j.c_x + j.a_y * j.a_y) / 4.0
        worst = max(worst, abs(brioschi_K1(m, (0.0, 0.0)) - expect))
    return [Check("diagonal K1 formula", worst <= tol, worst, tol, f"{n_metrics} metrics")]


def z_family(delta: float | None = None, extent: float = 1.2):
    p = FamilyParams(leaves=(-1.0 / 48.0, 0.0, 1.0 / 48.0), extent=extent, simple_roots=False)
    if delta is not None:
        p.z_delta = delta
    return launch_family(slit_metric(), (0.0, 0.0), p)


def check_z_suite(seed: int = 0, tol: float = 1e-6) -> list[Check]:
    m = slit_metric()
    pc = classify(m, (0.0, 0.0))
    roots = sorted((str(d), k) for d, k in pc.directions)
    ok_a = pc.tag == "Z" and abs(pc.K1 - 0.25) <= 1e-9 and roots == [("0", 2), ("inf", 1)]
    out = [Check("Z classification", ok_a, abs(pc.K1 - 0.25), 1e-9, f"class {pc.tag}, roots {pc.roots_text()}")]
    fam = z_family()
    err = 0.0
    alpha_err = 0.0
    drift = 0.0
    for g in fam:
        al = g.param["alpha"]
        exact = np.sin(g.x / 2.0) ** 2 if al < 0 else (np.sinh(g.x / 2.0) ** 2 if al > 0 else g.x**2 / 4.0)
        w = np.abs(g.x) <= 1.0
        err = max(err, float(np.max(np.abs(g.y - exact)[w])))
        alpha_err = max(alpha_err, abs(fit_family_Z(g).value - al))
        for half in g.parent:
            Q = (half.p**2 - half.y) / half.y**2
            drift = max(drift, float(np.ptp(Q)) / max(float(half.t[-1] - half.t[0]), 1e-300))
    out.append(Check("Z members vs sin^2/sinh^2/parabola", err <= tol, err, tol))
    out.append(Check("Z quartic coefficient -+1/48", alpha_err <= 1e-3, alpha_err, 1e-3))
    out.append(Check("Z first integral drift per unit parameter", drift <= 1e-6, drift, 1e-6))
    return out


def eps_closed_form(eps: float) -> tuple[complex, complex]:
    d = complex(1.0 - 16.0 * eps) ** 0.5
    return 0.25 + d / 4.0, 0.25 - d / 4.0


def check_d_spectra_suite(seed: int = 0, tol: float = 1e-5) -> list[Check]:
    out = []
    for eps, tag in ((-1.0, "Ds"), (1.0 / 32.0, "Dn"), (1.0, "Df")):
        m = Metric.normal_form("-1", eps)
        sp = epsilon_spectrum(m, (0.0, 0.0)).normalized()
        e1, e2 = eps_closed_form(eps)
        got = sorted([sp.eps1, sp.eps2], key=lambda z: (z.real, z.imag))
        want = sorted([e1, e2], key=lambda z: (z.real, z.imag))
        err = max(abs(g - w) for g, w in zip(got, want))
        cls = classify(m, (0.0, 0.0)).tag
        out.append(Check(f"spectrum eps={eps:g}", err <= tol and cls == tag, err, tol, f"class {cls}"))
    for eps, tag in ((1e-4, "Dn"), (1.0 / 16.0 - 1e-4, "Dn"), (1.0 / 16.0 + 1e-4, "Df"), (1.0 / 16.0, "NonGeneric")):
        cls = classify(Metric.normal_form("-1", eps), (0.0, 0.0)).tag
        out.append(Check(f"boundary eps={eps:.6g}", cls == tag, 0.0, 0.0, f"class {cls}, expected {tag}"))
    return out


def _rel(v: float, target: float) -> float:
    return abs(v - target) / abs(target)


def check_ds_suite(seed: int = 0, tol: float = 0.02) -> list[Check]:
    e1, e2 = (z.real for z in eps_closed_form(-1.0))
    fam = launch_family(Metric.normal_form("-1", -1.0), (0.0, 0.0), FamilyParams(extent=0.5, simple_roots=False))
    gen = max(_rel(fit_quadratic(g).value, e1 / 2.0) for g in fam if g.role == "member")
    sep = max(_rel(fit_quadratic(g).value, e2 / 2.0) for g in fam if g.role == "separatrix")
    return [
        Check("Ds generic coefficient eps1/2", gen <= tol, gen, tol, f"target {e1 / 2:.6f}"),
        Check("Ds separatrix coefficient eps2/2", sep <= tol, sep, tol, f"target {e2 / 2:.6f}"),
    ]


def check_dn_df_suite(seed: int = 0, tol: float = 0.02) -> list[Check]:
    e1, e2 = (z.real for z in eps_closed_form(1.0 / 32.0))
    fam = launch_family(Metric.normal_form("-1", 1.0 / 32.0), (0.0, 0.0),
                        FamilyParams(extent=0.5, simple_roots=False, leaves=(-1.0, 0.0, 1.0)))
    gen = max(_rel(fit_quadratic(g).value, e1 / 2.0) for g in fam if g.role == "member")
    exc = max(_rel(fit_quadratic(g).value, e2 / 2.0) for g in fam if g.role == "exceptional")
    fam_f = launch_family(Metric.normal_form("-1", 1.0), (0.0, 0.0),
                          FamilyParams(extent=0.5, simple_roots=False, leaves=(0.0,)))
    wind = min(abs(winding_number(g.x, g.p, 0.1)) for g in fam_f)
    return [
        Check("Dn generic coefficient eps1/2", gen <= tol, gen, tol, f"target {e1 / 2:.6f}"),
        Check("Dn exceptional coefficient eps2/2", exc <= tol, exc, tol, f"target {e2 / 2:.6f}"),
        Check("Df winding before radius 0.1", wind >= 2.0, wind, 2.0, "minimum over members"),
    ]


def confinement(family) -> float:
    """Largest Delta over samples farther than 2 delta from the base (Gamma_0 members only)."""
    worst = -math.inf
    for g in family:
        if g.role == "simple_root":
            continue
        far = g.radius > 2.0 * g.offset
        if far.any():
            worst = max(worst, float(np.max(g.delta[far])))
    return worst


def check_confinement_suite(seed: int = 0, tol: float = 1e-6) -> list[Check]:
    wz = confinement(z_family())
    out = [Check("confinement Z", wz <= tol, wz, tol)]
    for eps, tag in ((-1.0, "Ds"), (1.0 / 32.0, "Dn"), (1.0, "Df")):
        fam = launch_family(Metric.normal_form("-1", eps), (0.0, 0.0), FamilyParams(extent=0.5, simple_roots=False))
        w = confinement(fam)
        out.append(Check(f"confinement {tag}", w <= tol, w, tol))
    return out


def c3_metric() -> Metric:
    return Metric("x", "0", "1 + x", name="x dx^2 + (1+x) dy^2")


def check_c3_suite(seed: int = 0, tol: float = 0.05) -> list[Check]:
    m = c3_metric()
    dirs = sorted(float(d.p) for d, _ in admissible_directions(m, (0.0, 0.0)))
    ok = len(dirs) == 3 and max(abs(a - b) for a, b in zip(dirs, (-1.0, 0.0, 1.0))) <= 1e-9
    out = [Check("C3 admissible directions", ok, 0.0, 1e-9, f"{dirs}")]
    fam = launch_family(m, (0.0, 0.0), FamilyParams(extent=0.5))
    crossings = [g for g in fam if g.role == "simple_root"]
    smooth = all(float(np.min(g.x)) < -0.1 and float(np.max(g.x)) > 0.1 for g in crossings) and len(crossings) == 2
    out.append(Check("C3 simple-root geodesics cross", smooth, float(len(crossings)), 2.0))
    worst = max(abs(fit_exponent(g, window=(1e-3, 1e-1)).value - 1.5) for g in fam if g.role == "member")
    out.append(Check("C3 semicubic exponent", worst <= tol, worst, tol))
    return out


def check_natural_param_suite(seed: int = 0, tol: float = 1e-3) -> list[Check]:
    m = slit_metric()
    cfg = IntegratorConfig(rtol=1e-12, atol=1e-15, max_steps=400_000)
    t0 = 1e-2
    x0 = t0 ** (1.0 / 3.0)
    start = (x0, x0 * x0 / 4.0, x0 / (3.0 * t0), x0 * x0 / (6.0 * t0))
    tr = el_integrate(m, start, t0, 1e-6, cfg)
    fit = fit_exponent(tr.t, tr.y[:, 0], window=(1e-6, 1e-2))
    err = abs(fit.value - 1.0 / 3.0)
    forced = float(np.max(line_restriction(m, np.linspace(-1.0, 1.0, 21))))
    return [
        Check("natural parametrization exponent 1/3", err <= tol, err, tol),
        Check("y = 0 admits only constant solutions", forced <= 1e-12, forced, 1e-12),
    ]


def _planted_spectrum(rng):
    while True:
        s = tuple(int(v) for v in rng.integers(0, 4, size=3))
        if s[0] == 0 or sum(s) < 2:
            continue
        target = ("eps2", "1")[int(rng.integers(0, 2))]
        e2 = float(rng.uniform(-1.0, 1.0))
        t = e2 if target == "eps2" else 1.0
        e1 = (t - s[1] * e2 - s[2]) / s[0]
        return s, target, (e1, e2)


def check_resonance_suite(seed: int = 0, tol: float = 1e-10) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(10):
        lams = rng.uniform(0.2, 3.0, 3) * rng.choice([-1.0, 1.0], 3)
        worst = max(worst, lemma_PL2_check(lams, rng.normal(size=3), seed=seed + k))
    for k in range(5):
        worst = max(worst, lemma_PL2_check(rng.uniform(0.1, 2.0, 2), rng.normal(size=2), seed=seed + 10 + k))
    out = [Check("invariant-surface defect", worst <= tol, worst, tol, "10 real, 5 complex")]
    found = 0
    for _ in range(20):
        s, target, sp = _planted_spectrum(rng)
        if resonance_scan(sp, max(sum(s), 2), 1e-9).find(s, target):
            found += 1
    out.append(Check("planted resonances found", found == 20, float(found), 20.0))
    df_ok = 0
    for eps in (0.1, 0.5, 1.0, 2.0):
        sp = epsilon_spectrum(Metric.normal_form("-1", eps), (0.0, 0.0)).normalized()
        rep = resonance_scan(sp.as_tuple(), 4, 1e-9)
        if rep.find((2, 2, 0), "1") and rep.of_order(4, REAL_PART):
            df_ok += 1
    out.append(Check("Df order-4 resonances", df_ok == 4, float(df_ok), 4.0))
    return out


SUITES: dict[str, Callable[..., list[Check]]] = {
    "factorization": check_factorization_suite,
    "brioschi": check_brioschi_suite,
    "z-oracle": check_z_suite,
    "d-spectra": check_d_spectra_suite,
    "ds": check_ds_suite,
    "dn-df": check_dn_df_suite,
    "confinement": check_confinement_suite,
    "c3": check_c3_suite,
    "natural-param": check_natural_param_suite,
    "resonance": check_resonance_suite,
}
QUICK = ("factorization", "brioschi", "d-spectra", "natural-param", "resonance")


def run_suite(name: str, seed: int = 0, tol: float | None = None) -> list[Check]:
    """Run a suite by name (``all`` and ``quick`` run several). ``tol`` overrides the check tolerance."""
    if name == "all":
        names = list(SUITES)
    elif name == "quick":
        names = list(QUICK)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(name)
    out: list[Check] = []
    for n in names:
        fn = SUITES[n]
        out.extend(fn(seed=seed) if tol is None else fn(seed=seed, tol=tol))
    return out
