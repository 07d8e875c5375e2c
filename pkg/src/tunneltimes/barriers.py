"""Barrier geometries: square-segment stacks, smooth profiles, tilted Coulomb.

All barriers sit strictly left of the arrival point at the origin. A
stack occupies q in [-a, -b] with b > 0, listed segment by segment from
the far (left) edge toward the arrival point; a smooth profile lives on
the distance coordinate x in [b, a] (x = -q). Heights are expressed
interchangeably as energies V and wavenumbers kappa = sqrt(2*m*V)/hbar.

The strong-field barrier is the Coulomb potential of an effective charge
tilted by a static field, V_eff(q) = -z_eff/q - field*q. Shifting it by
the ionization potential puts the bound electron at zero energy and makes
the profile non-negative between its turning points, so the same
traversal machinery applies unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .wavepackets import UnitSystem

__all__ = [
    "Segment",
    "BarrierStack",
    "SmoothBarrier",
    "AttoclockBarrier",
    "TurningPoints",
    "kappa",
    "discretize",
    "attoclock_geometry",
    "attoclock_to_smooth",
    "gaussian_bump_barrier",
    "cos2_bump_barrier",
    "sampled_barrier",
]


@dataclass(frozen=True)
class Segment:
    """One square-barrier slab: height (energy) and width (length)."""

    height: float
    width: float

    def __post_init__(self):
        if self.height < 0:
            raise ValueError("segment height must be non-negative")
        if self.width <= 0:
            raise ValueError("segment width must be positive")


@dataclass(frozen=True)
class BarrierStack:
    """Piecewise-constant barrier on q in [-a, -b], far edge first.

    `right_edge` is b, the potential-free gap between the barrier and the
    arrival point at the origin; the total extent is a = b + sum(widths).
    """

    segments: tuple[Segment, ...]
    right_edge: float
    units: UnitSystem = UnitSystem()

    def __post_init__(self):
        if not self.segments:
            raise ValueError("stack needs at least one segment")
        if self.right_edge <= 0:
            raise ValueError("right_edge must be positive (barrier left of detector)")
        object.__setattr__(self, "segments", tuple(
            s if isinstance(s, Segment) else Segment(*s) for s in self.segments
        ))

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]], right_edge: float,
                   units: UnitSystem = UnitSystem()) -> "BarrierStack":
        """Build from (height, width) pairs, listed far edge first."""
        return cls(tuple(Segment(v, w) for v, w in pairs), right_edge, units)

    @property
    def heights(self) -> np.ndarray:
        return np.array([s.height for s in self.segments])

    @property
    def widths(self) -> np.ndarray:
        return np.array([s.width for s in self.segments])

    @property
    def total_width(self) -> float:
        return float(self.widths.sum())

    @property
    def extent(self) -> float:
        """Distance a from the arrival point to the barrier's far edge."""
        return self.right_edge + self.total_width

    @property
    def comparison_length(self) -> float:
        """Free-flight length L used in report normalizations (fixed to a)."""
        return self.extent

    @property
    def kappas(self) -> np.ndarray:
        return np.array([self.units.kappa_of(s.height) for s in self.segments])

    @property
    def kappa_max(self) -> float:
        return float(self.kappas.max())

    @property
    def kappa_min(self) -> float:
        return float(self.kappas.min())

    @property
    def kappa21_sq(self) -> float:
        """Signed squared-wavenumber difference 2*m*(V_far - V_near)/hbar^2.

        Defined for two-segment stacks; "near" is the segment adjacent to
        the arrival-side gap, matching the index convention of the
        contiguous-barrier kernel pieces.
        """
        if len(self.segments) != 2:
            raise ValueError("kappa21_sq is defined for two-segment stacks")
        v_far, v_near = self.segments[0].height, self.segments[1].height
        return 2.0 * self.units.mass * (v_far - v_near) / self.units.hbar**2

    def edges(self) -> np.ndarray:
        """Segment boundary positions in q, from -a up to -b."""
        cuts = np.concatenate(([0.0], np.cumsum(self.widths)))
        return -self.extent + cuts

    def potential(self, q):
        """V(q), vectorized; zero outside [-a, -b]."""
        q = np.asarray(q, dtype=float)
        out = np.zeros_like(q)
        edges = self.edges()
        for lo, hi, seg in zip(edges[:-1], edges[1:], self.segments):
            out = np.where((q >= lo) & (q < hi), seg.height, out)
        return out if out.ndim else float(out)


def kappa(stack: BarrierStack, n: int) -> float:
    """Wavenumber sqrt(2*m*V_n)/hbar of segment n."""
    return stack.units.kappa_of(stack.segments[n].height)


@dataclass(frozen=True)
class SmoothBarrier:
    """Continuous non-negative profile V(x) on the distance interval [b, a].

    The profile callable is evaluated only inside the support; outside it
    the barrier is identically zero. `v_max` must be the maximum of the
    profile (factories compute it; supply it exactly when known).
    """

    profile: Callable
    support: tuple[float, float]
    v_max: float
    units: UnitSystem = UnitSystem()

    def __post_init__(self):
        b, a = self.support
        if not (0 < b < a):
            raise ValueError("support must satisfy 0 < b < a")
        if self.v_max < 0:
            raise ValueError("v_max must be non-negative")

    def v(self, x):
        """Profile value, clamped non-negative, zero outside the support."""
        x = np.asarray(x, dtype=float)
        b, a = self.support
        inside = (x >= b) & (x <= a)
        vals = np.where(inside, np.clip(self.profile(x), 0.0, None), 0.0)
        return vals if vals.ndim else float(vals)

    def kappa(self, x):
        """Local wavenumber sqrt(2*m*V(x))/hbar, vectorized."""
        scale = math.sqrt(2.0 * self.units.mass) / self.units.hbar
        return scale * np.sqrt(self.v(x))

    @property
    def kappa_max(self) -> float:
        return self.units.kappa_of(self.v_max)

    @property
    def extent(self) -> float:
        return self.support[1]

    @property
    def comparison_length(self) -> float:
        return self.extent

    @property
    def total_width(self) -> float:
        return self.support[1] - self.support[0]


def discretize(smooth: SmoothBarrier, n_segments: int) -> BarrierStack:
    """Approximate a smooth profile by n equal-width midpoint-sampled slabs.

    Slabs are listed far edge first (descending x), so the stack occupies
    the same q-interval as the smooth barrier. Midpoint sampling keeps the
    barrier area correct to O(1/n^2), and stack traversal times converge
    to the smooth-profile ones as n grows.
    """
    if n_segments < 1:
        raise ValueError("n_segments must be >= 1")
    b, a = smooth.support
    h = (a - b) / n_segments
    mids = a - (np.arange(n_segments) + 0.5) * h
    heights = np.clip(smooth.profile(mids), 0.0, None)
    segs = tuple(Segment(float(v), h) for v in heights)
    return BarrierStack(segs, right_edge=b, units=smooth.units)


def gaussian_bump_barrier(height: float, b: float, a: float,
                          center: float | None = None,
                          width: float | None = None,
                          units: UnitSystem = UnitSystem()) -> SmoothBarrier:
    """Gaussian bump on [b, a]; default width (a-b)/8 keeps edge values ~3e-4 of the peak."""
    if height < 0:
        raise ValueError("height must be non-negative")
    c = 0.5 * (a + b) if center is None else center
    w = (a - b) / 8.0 if width is None else width
    profile = lambda x: height * np.exp(-((np.asarray(x, float) - c) ** 2) / (2.0 * w**2))
    v_max = height if b <= c <= a else float(max(profile(b), profile(a)))
    return SmoothBarrier(profile, (b, a), v_max, units)


def cos2_bump_barrier(height: float, b: float, a: float,
                      units: UnitSystem = UnitSystem()) -> SmoothBarrier:
    """cos^2 arch vanishing exactly at both edges of [b, a]."""
    if height < 0:
        raise ValueError("height must be non-negative")
    span = a - b

    def profile(x):
        x = np.asarray(x, dtype=float)
        return height * np.sin(math.pi * (x - b) / span) ** 2

    return SmoothBarrier(profile, (b, a), height, units)


def sampled_barrier(x: Sequence[float], v: Sequence[float],
                    units: UnitSystem = UnitSystem()) -> SmoothBarrier:
    """Piecewise-linear profile through sample points (x ascending, v >= 0)."""
    xs = np.asarray(x, dtype=float)
    vs = np.asarray(v, dtype=float)
    if xs.ndim != 1 or xs.shape != vs.shape or len(xs) < 2:
        raise ValueError("need matching 1-d arrays with at least two samples")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("sample positions must be strictly increasing")
    if np.any(vs < 0):
        raise ValueError("sampled heights must be non-negative")
    profile = lambda q: np.interp(np.asarray(q, float), xs, vs)
    return SmoothBarrier(profile, (float(xs[0]), float(xs[-1])), float(vs.max()), units)


@dataclass(frozen=True)
class AttoclockBarrier:
    """Tilted-Coulomb effective barrier of strong-field ionization.

    z_eff: effective nuclear charge, i_p: ionization potential, field:
    static field strength, all in atomic units. The barrier exists while
    field <= i_p^2 / (4*z_eff); geometry calls raise beyond that.
    """

    z_eff: float
    i_p: float
    field: float

    def __post_init__(self):
        if self.z_eff <= 0 or self.i_p <= 0 or self.field <= 0:
            raise ValueError("z_eff, i_p and field must be positive")

    @property
    def threshold_field(self) -> float:
        """Field strength at which the two turning points merge."""
        return self.i_p**2 / (4.0 * self.z_eff)

    def v_eff(self, q):
        """Effective potential -z_eff/q - field*q for q > 0."""
        q = np.asarray(q, dtype=float)
        return -self.z_eff / q - self.field * q


@dataclass(frozen=True)
class TurningPoints:
    d_minus: float
    d_plus: float
    d_exit: float


def attoclock_geometry(bar: AttoclockBarrier) -> TurningPoints:
    """Turning points of V_eff(q) = -i_p and the classical exit i_p/field.

    d-/d+ are the roots of field*q^2 - i_p*q + z_eff = 0; the classical
    exit d = i_p/field always lies at or beyond d+.
    """
    disc = bar.i_p**2 - 4.0 * bar.field * bar.z_eff
    if disc < 0:
        raise ValueError("over-barrier field; no tunneling geometry")
    root = math.sqrt(disc)
    d_minus = (bar.i_p - root) / (2.0 * bar.field)
    d_plus = (bar.i_p + root) / (2.0 * bar.field)
    return TurningPoints(d_minus, d_plus, bar.i_p / bar.field)


def attoclock_to_smooth(bar: AttoclockBarrier,
                        units: UnitSystem = UnitSystem()) -> SmoothBarrier:
    """Shifted barrier V_eff + i_p on [d-, d+], measured from the bound energy.

    The shift places the bound electron at zero energy, so the profile is
    non-negative with exact zeros at both turning points; its maximum
    i_p - 2*sqrt(z_eff*field) sits at x = sqrt(z_eff/field).
    """
    geo = attoclock_geometry(bar)

    def profile(x):
        x = np.asarray(x, dtype=float)
        return np.clip(bar.i_p - bar.z_eff / x - bar.field * x, 0.0, None)

    v_max = bar.i_p - 2.0 * math.sqrt(bar.z_eff * bar.field)
    return SmoothBarrier(profile, (geo.d_minus, geo.d_plus), v_max, units)
