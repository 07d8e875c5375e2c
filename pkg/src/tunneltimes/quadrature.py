"""Quadrature engines for the traversal-time integrals.

Three integral families appear throughout this package:

* endpoint-singular integrals      int_kappa^U f(k) / sqrt(k^2 - kappa^2) dk,
* Gaussian-damped oscillatory      k0 * int_0^inf phi(z) J0(kappa z) e^{i k0 z} dz,
* the double integral over barrier position x and wavenumber k used for
  smooth barrier profiles.

The singular family is handled with the substitution k = kappa*cosh(u):
dk / sqrt(k^2 - kappa^2) = du exactly, so the transformed integrand
f(kappa*cosh(u)) is smooth up to the endpoint and one scheme covers both
finite and semi-infinite upper limits. For kappa = 0 the analogous map is
k = e^t, which doubles as the graded mesh toward k = 0: an integrand with
f(0) > 0 is logarithmically divergent there, and shows up as block
contributions that stop decaying (the result is flagged non-converged
instead of silently truncated).

Oscillatory integrals rely on the Gaussian decay of the envelope rather
than Levin/Filon machinery; the initial panelization places at least 30
nodes per oscillation period before adaptive refinement starts.

Everything is built on a single adaptive Gauss-Kronrod (7,15) bisection
core with deterministic panel ordering, so results are bit-for-bit
reproducible for a fixed QuadSpec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import bessel_j0

__all__ = [
    "QuadSpec",
    "QuadResult",
    "integrate",
    "integrate_sqrt_singular",
    "integrate_oscillatory_damped",
    "integrate_2d_xk",
]


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and budgets shared by all integration routines."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 400
    tail_eps: float = 1e-14

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.tail_eps <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    """Value, error estimate and bookkeeping of one integral."""

    value: complex | float
    error_estimate: float
    evaluations: int
    converged: bool

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            self.converged and other.converged,
        )


DEFAULT_SPEC = QuadSpec()

_ZERO = QuadResult(0.0, 0.0, 0, True)

# Gauss-Kronrod (7,15): positive Kronrod abscissae and weights, plus the
# embedded 7-point Gauss weights (QUADPACK values).
_XGK = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
])

# 15 nodes in ascending order and matching weight vectors.
_NODES = np.concatenate((-_XGK[:7], _XGK[7:], _XGK[6::-1]))
_WK = np.concatenate((_WGK[:7], _WGK[7:], _WGK[6::-1]))
_WGFULL = np.zeros(15)
_WGFULL[1:14:2] = np.concatenate((_WG[:3], _WG[3:], _WG[2::-1]))


def _gk15(f, a: float, b: float):
    """One Gauss-Kronrod panel: (kronrod value, |K - G|, max |f| sample)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = np.asarray(f(mid + half * _NODES))
    kron = half * np.dot(_WK, y)
    gauss = half * np.dot(_WGFULL, y)
    return kron, abs(kron - gauss), float(np.max(np.abs(y)))


def _adaptive(f, a: float, b: float, spec: QuadSpec, seeds=()) -> QuadResult:
    """Adaptive bisection over [a, b], optionally pre-split at `seeds`.

    Panels are refined worst-error-first; ties break on position, keeping
    the subdivision sequence (and thus the result) deterministic.
    """
    if not b > a:
        return _ZERO
    edges = sorted({float(a), float(b), *(s for s in seeds if a < s < b)})
    panels = []
    neval = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err, _ = _gk15(f, lo, hi)
        panels.append([err, lo, hi, val])
        neval += 15

    def tol(total):
        return max(spec.abs_tol, spec.rel_tol * abs(total))

    splits = 0
    while splits < spec.max_subdivisions:
        total = sum(p[3] for p in panels)
        toterr = sum(p[0] for p in panels)
        if toterr <= tol(total):
            break
        worst = max(range(len(panels)), key=lambda i: (panels[i][0], -panels[i][1]))
        err, lo, hi, _ = panels[worst]
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at floating-point resolution
            panels[worst][0] = 0.0
            continue
        left = _gk15(f, lo, mid)
        right = _gk15(f, mid, hi)
        neval += 30
        panels[worst] = [left[1], lo, mid, left[0]]
        panels.append([right[1], mid, hi, right[0]])
        splits += 1

    panels.sort(key=lambda p: p[1])
    vals = [p[3] for p in panels]
    if any(isinstance(v, complex) or np.iscomplexobj(v) for v in vals):
        value = complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))
    else:
        value = math.fsum(vals)
    toterr = math.fsum(p[0] for p in panels)
    return QuadResult(value, toterr, neval, toterr <= tol(value))


def integrate(f, a: float, b: float, spec: QuadSpec = DEFAULT_SPEC, *, breakpoints=()) -> QuadResult:
    """Adaptive integral of a vectorized integrand over a finite interval."""
    return _adaptive(f, a, b, spec, seeds=breakpoints)


def _tail_blocks(g, start: float, width0: float, cap: float, acc: QuadResult,
                 spec: QuadSpec, gmax: float) -> tuple[QuadResult, bool]:
    """Append doubling-width blocks of g beyond `start` until they stop mattering.

    Returns the updated accumulator and a flag telling whether the tail was
    resolved (two consecutive negligible blocks, with the integrand itself
    below tail_eps relative to its running maximum).
    """
    lo = start
    width = width0
    quiet = 0
    while lo < cap:
        hi = min(lo + width, cap)
        block = _adaptive(g, lo, hi, spec)
        acc = acc + block
        probes = np.abs(np.asarray(g(np.linspace(lo, hi, 9))))
        gmax = max(gmax, float(probes.max()))
        negligible = (
            abs(block.value) <= 0.25 * max(spec.abs_tol, spec.rel_tol * abs(acc.value))
            and float(probes[-1]) <= spec.tail_eps * max(gmax, 1e-300)
        )
        quiet = quiet + 1 if negligible else 0
        if quiet >= 2:
            return acc, True
        lo = hi
        width *= 2.0
    return acc, False


def integrate_sqrt_singular(f, kappa: float, upper: float = math.inf,
                            spec: QuadSpec = DEFAULT_SPEC, *,
                            lower: float | None = None,
                            breakpoints=()) -> QuadResult:
    """int f(k) / sqrt(k^2 - kappa^2) dk from max(kappa, lower) to upper.

    For kappa > 0 the substitution k = kappa*cosh(u) removes the endpoint
    singularity exactly. For kappa = 0 the integrand is f(k)/k and the map
    k = e^t plays the same role; the caller should supply an integrand
    vanishing at 0 or a positive `lower`, otherwise the integral is
    log-divergent and comes back flagged non-converged.

    `breakpoints` are k-values where the integrand has structure (support
    edges, sharp peaks); semi-infinite upper limits are truncated where
    |f| falls below tail_eps relative to its running maximum. Integrands
    must accept numpy arrays.
    """
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    lo_k = kappa if lower is None else max(lower, kappa)
    if math.isfinite(upper) and upper <= lo_k:
        return _ZERO

    if kappa > 0.0:
        # u-space: k = kappa*cosh(u)
        def g(u):
            return f(kappa * np.cosh(u))

        def to_u(k):
            return math.acosh(max(k / kappa, 1.0))

        u_lo = to_u(lo_k)
        u_cap = 300.0  # k/kappa ~ 1e130 here; squaring k must stay finite
        seeds = [to_u(k) for k in breakpoints if lo_k < k < min(upper, kappa * 1e125)]
        if math.isfinite(upper):
            return _adaptive(g, u_lo, to_u(upper), spec, seeds=seeds)
        u_core = max([u_lo + 1.0, *(s + 0.5 for s in seeds)])
        acc = _adaptive(g, u_lo, u_core, spec, seeds=seeds)
        acc, resolved = _tail_blocks(g, u_core, 1.0, u_cap, acc, spec, 0.0)
        if not resolved:
            acc = QuadResult(acc.value, acc.error_estimate, acc.evaluations, False)
        return acc

    # kappa == 0: t-space, k = e^t
    def h(t):
        return f(np.exp(t))

    def to_t(k):
        return math.log(k)

    scale = upper if math.isfinite(upper) else max([*(k for k in breakpoints if k > 0), 1.0])
    seeds = [to_t(k) for k in breakpoints if k > max(lo_k, 0.0) and (not math.isfinite(upper) or k < upper)]

    if lo_k > 0.0:
        t_lo = to_t(lo_k)
        if math.isfinite(upper):
            return _adaptive(h, t_lo, to_t(upper), spec, seeds=seeds)
        t_core = max([t_lo + 1.0, *(s + 0.5 for s in seeds)])
        acc = _adaptive(h, t_lo, t_core, spec, seeds=seeds)
        acc, resolved = _tail_blocks(h, t_core, 1.0, 300.0, acc, spec, 0.0)
        if not resolved:
            acc = QuadResult(acc.value, acc.error_estimate, acc.evaluations, False)
        return acc

    # lower edge at k = 0: graded (geometric) mesh toward 0
    t_hi = to_t(upper) if math.isfinite(upper) else to_t(scale)
    acc = _ZERO
    if not math.isfinite(upper):
        acc, resolved = _tail_blocks(h, t_hi, 1.0, 300.0, acc, spec, 0.0)
        if not resolved:
            return QuadResult(acc.value, acc.error_estimate, acc.evaluations, False)
    t = t_hi
    width = 2.0
    quiet = 0
    converged = False
    prev = math.inf
    for _ in range(40):
        block = _adaptive(h, t - width, t, spec, seeds=[s for s in seeds if t - width < s < t])
        acc = acc + block
        mag = abs(block.value)
        if mag <= 0.25 * max(spec.abs_tol, spec.rel_tol * abs(acc.value)):
            quiet += 1
            if quiet >= 2:
                converged = True
                break
        else:
            quiet = 0
            if mag > 0.5 * prev and t < t_hi - 20.0:
                break  # contributions not decaying: log divergence at k -> 0
        prev = max(mag, 1e-300)
        t -= width
        width *= 2.0
    return QuadResult(acc.value, acc.error_estimate, acc.evaluations,
                      converged and acc.converged)


def integrate_oscillatory_damped(phi, k0: float, kappa: float = 0.0,
                                 spec: QuadSpec = DEFAULT_SPEC) -> QuadResult:
    """k0 * int_0^inf phi(z) * J0(kappa*z) * exp(i*k0*z) dz.

    `phi` is a decaying (Gaussian-damped) envelope with phi(0) = O(1);
    kappa = 0 reduces J0 to 1 exactly. The envelope is truncated where it
    falls below tail_eps of its maximum, and the initial panels resolve
    the combined oscillation rate k0 + kappa with >= 30 nodes per period.
    """
    if k0 <= 0:
        raise ValueError("k0 must be positive")
    if kappa < 0:
        raise ValueError("kappa must be non-negative")

    # locate the envelope cutoff by doubling
    phimax = float(abs(phi(0.0)))
    z_max = 1.0
    for _ in range(80):
        val = float(abs(phi(z_max)))
        phimax = max(phimax, val)
        if val < spec.tail_eps * phimax:
            break
        z_max *= 2.0

    if kappa == 0.0:
        def integrand(z):
            return phi(z) * np.exp(1j * k0 * z)
    else:
        def integrand(z):
            return phi(z) * bessel_j0(kappa * z) * np.exp(1j * k0 * z)

    period = 2.0 * math.pi / (k0 + kappa)
    n_panels = max(8, int(math.ceil(z_max / (0.5 * period))))
    seeds = np.linspace(0.0, z_max, n_panels + 1)[1:-1]
    res = _adaptive(integrand, 0.0, z_max, spec, seeds=seeds)
    return QuadResult(k0 * res.value, k0 * res.error_estimate,
                      res.evaluations, res.converged)


def _kappa_level_crossings(profile, levels, n_scan: int = 513) -> list[float]:
    """x-positions where the profile wavenumber kappa(x) crosses each level.

    The outer integrand of the double integral switches on and off at
    these crossings (only positions with kappa(x) below a density's
    support contribute), so they must become panel edges: for densities
    far below the barrier peak the active strips can be orders of
    magnitude narrower than the support and plain adaptive panels would
    sample right past them.
    """
    b, a = profile.support
    xs = np.linspace(b, a, n_scan)
    ks = np.asarray(profile.kappa(xs), dtype=float)
    seeds = [float(xs[int(np.argmax(ks))])]
    for lev in levels:
        g = ks - lev
        for i in np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]:
            lo, hi = float(xs[i]), float(xs[i + 1])
            g_lo = g[i]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                g_mid = float(profile.kappa(mid)) - lev
                if g_mid == 0.0:
                    lo = hi = mid
                    break
                if (g_mid > 0) == (g_lo > 0):
                    lo, g_lo = mid, g_mid
                else:
                    hi = mid
            seeds.append(0.5 * (lo + hi))
    return seeds


def integrate_2d_xk(profile, density, k_band: tuple[float, float],
                    spec: QuadSpec = DEFAULT_SPEC) -> QuadResult:
    """Double integral over barrier position x and wavenumber k.

    Computes  int_b^a dx  int f(k) / sqrt(k^2 - kappa(x)^2) dk  with the
    inner range [max(k_band[0], kappa(x)), k_band[1]]. `profile` must
    expose `support` (b, a) and a vectorized `kappa(x)`; `density` is the
    integrand f, ideally carrying `landmarks` (k-values of its support
    edges and peak) so the inner quadrature cannot miss narrow structures.

    The outer integral uses adaptive panels seeded at every x where
    kappa(x) crosses a density landmark or band edge; the inner one
    reuses integrate_sqrt_singular at a tighter tolerance. Inner
    non-convergence propagates into the returned flag.
    """
    b, a = profile.support
    lo_band, hi_band = k_band
    inner_spec = QuadSpec(
        rel_tol=spec.rel_tol * 0.05,
        abs_tol=spec.abs_tol * 0.05,
        max_subdivisions=spec.max_subdivisions,
        tail_eps=spec.tail_eps,
    )
    landmarks = tuple(getattr(density, "landmarks", ()))
    state = {"neval": 0, "inner_err": 0.0, "ok": True}

    def outer_integrand(xs):
        xs = np.atleast_1d(xs)
        out = np.empty(len(xs))
        for i, x in enumerate(xs):
            kap = float(profile.kappa(x))
            res = integrate_sqrt_singular(
                density, kap, hi_band, inner_spec,
                lower=lo_band if lo_band > 0 else None,
                breakpoints=landmarks,
            )
            state["neval"] += res.evaluations
            state["inner_err"] = max(state["inner_err"], res.error_estimate)
            state["ok"] = state["ok"] and res.converged
            out[i] = res.value
        return out

    levels = sorted({lv for lv in (*landmarks, lo_band, hi_band)
                     if math.isfinite(lv) and lv > 0})
    x_seeds = _kappa_level_crossings(profile, levels)
    outer = _adaptive(outer_integrand, b, a, spec, seeds=x_seeds)
    err = outer.error_estimate + (a - b) * state["inner_err"]
    return QuadResult(outer.value, err, state["neval"],
                      outer.converged and state["ok"])
