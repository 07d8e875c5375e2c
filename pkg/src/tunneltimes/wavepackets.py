"""Incident wave packets, their momentum densities, and regime classification.

The incident state is psi(q) = exp(i*k0*q) * phi(q) with a unit-norm
Gaussian envelope

    phi(q) = (2*pi*sigma^2)^(-1/4) * exp(-(q - q0)^2 / (4*sigma^2)),

so both the momentum density |psi~(k)|^2 and the envelope autocorrelation
Phi(z) have closed forms that the rest of the package (and its test
oracles) can lean on:

    |psi~(k)|^2 = sigma * sqrt(2/pi) * exp(-2*sigma^2*(k - k0)^2)
    Phi(z)      = exp(-z^2 / (8*sigma^2))

k0 is stored as a wavenumber (phase exp(i*k0*q)), which puts it on the
same axis as the barrier wavenumbers kappa = sqrt(2*m*V)/hbar.

Because a Gaussian never vanishes exactly, "support" means the smallest
interval where the density stays above norm_tail_eps of its maximum; hard
truncation (`truncate`) realizes genuinely compact supports for the
tunneling-regime classification.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np

from .quadrature import DEFAULT_SPEC, QuadSpec, integrate

__all__ = [
    "UnitSystem",
    "GaussianPacket",
    "MomentumDensity",
    "TruncatedMomentumDensity",
    "Regime",
    "momentum_density",
    "autocorrelation",
    "density_of",
    "signed_density_pair",
    "truncate",
    "classify_regime",
    "packet_clears_barrier",
]

DEFAULT_TAIL_EPS = 1e-12
DEFAULT_CLEARANCE_SIGMAS = 8.0


@dataclass(frozen=True)
class UnitSystem:
    """Action scale and particle mass; defaults are natural/atomic-style units."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0:
            raise ValueError("hbar and mass must be positive")

    def kappa_of(self, v: float) -> float:
        """Barrier height expressed as a wavenumber, sqrt(2*m*V)/hbar."""
        if v < 0:
            raise ValueError("potential height must be non-negative")
        return math.sqrt(2.0 * self.mass * v) / self.hbar

    def velocity(self, k: float) -> float:
        """Group speed hbar*k/m for wavenumber k."""
        return self.hbar * k / self.mass


@dataclass(frozen=True)
class GaussianPacket:
    """Gaussian envelope at q0 with position width sigma and carrier k0."""

    q0: float
    sigma: float
    k0: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.k0 <= 0:
            raise ValueError("k0 must be positive")

    @property
    def sigma_k(self) -> float:
        """Momentum-space standard deviation of |psi~|^2."""
        return 1.0 / (2.0 * self.sigma)

    def envelope(self, q):
        q = np.asarray(q, dtype=float)
        norm = (2.0 * math.pi * self.sigma**2) ** -0.25
        return norm * np.exp(-((q - self.q0) ** 2) / (4.0 * self.sigma**2))

    def psi(self, q):
        q = np.asarray(q, dtype=float)
        return np.exp(1j * self.k0 * q) * self.envelope(q)


def momentum_density(packet: GaussianPacket, k):
    """|psi~(k)|^2 of the full incident state, vectorized in k."""
    k = np.asarray(k, dtype=float)
    amp = packet.sigma * math.sqrt(2.0 / math.pi)
    return amp * np.exp(-2.0 * packet.sigma**2 * (k - packet.k0) ** 2)


def autocorrelation(packet: GaussianPacket, zeta):
    """Envelope overlap Phi(z); even in z, Phi(0) = 1, independent of q0."""
    zeta = np.asarray(zeta, dtype=float)
    return np.exp(-(zeta**2) / (8.0 * packet.sigma**2))


class Regime(str, Enum):
    """Traversal process taxonomy by density support vs. barrier wavenumbers."""

    NON_TUNNELING = "non-tunneling"
    FULL_TUNNELING = "full-tunneling"
    PARTIAL_TUNNELING = "partial-tunneling"
    MIXED = "mixed"


@dataclass(frozen=True, eq=False)
class MomentumDensity:
    """A momentum density k -> |psi~(k)|^2, zero outside `support`.

    `mass` is the expected integral (1 for a full density; the two halves
    of a signed +/-k pair are jointly normalized instead). `landmarks`
    are k-values marking support edges and peaks, used to seed quadrature
    panels. `carrier_k0` is the packet carrier wavenumber entering speed
    prefactors; `origin` optionally keeps the generating packet for
    geometry diagnostics.
    """

    density: Callable
    support: tuple[float, float]
    norm_tail_eps: float = DEFAULT_TAIL_EPS
    mass: float = 1.0
    carrier_k0: float | None = None
    landmarks: tuple[float, ...] = ()
    origin: GaussianPacket | None = None

    def __post_init__(self):
        lo, hi = self.support
        if hi < lo:
            raise ValueError("support interval is reversed")

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        lo, hi = self.support
        inside = (k >= lo) & (k <= hi)
        vals = np.where(inside, self.density(k), 0.0)
        return vals if vals.ndim else float(vals)

    def integral(self, spec: QuadSpec = DEFAULT_SPEC) -> float:
        lo, hi = self.support
        res = integrate(self, lo, hi, spec, breakpoints=self.landmarks)
        return float(res.value)


def density_of(packet: GaussianPacket,
               tail_eps: float = DEFAULT_TAIL_EPS) -> MomentumDensity:
    """Momentum density of a packet, support set by the tail threshold.

    The support may dip below k = 0 for broad/slow packets; transmission
    analyses warn in that case and use only the k >= 0 content.
    """
    half_width = packet.sigma_k * math.sqrt(2.0 * math.log(1.0 / tail_eps))
    lo = packet.k0 - half_width
    hi = packet.k0 + half_width
    return MomentumDensity(
        density=lambda k: momentum_density(packet, k),
        support=(lo, hi),
        norm_tail_eps=tail_eps,
        mass=1.0,
        carrier_k0=packet.k0,
        landmarks=(lo, packet.k0 - packet.sigma_k, packet.k0,
                   packet.k0 + packet.sigma_k, hi),
        origin=packet,
    )


def signed_density_pair(packet: GaussianPacket,
                        tail_eps: float = DEFAULT_TAIL_EPS
                        ) -> tuple[MomentumDensity, MomentumDensity]:
    """(positive, negative) momentum content as densities on k >= 0.

    The first entry is |psi~(k)|^2 and the second |psi~(-k)|^2, both for
    k >= 0; their masses add to 1 exactly (each half carries the
    analytically known error-function weight).
    """
    full = density_of(packet, tail_eps)
    lo, hi = full.support
    arg = math.sqrt(2.0) * packet.sigma * packet.k0
    pos_mass = 0.5 * (1.0 + math.erf(arg))
    neg_mass = 0.5 * math.erfc(arg)

    pos = replace(full, support=(max(lo, 0.0), max(hi, 0.0)), mass=pos_mass)
    neg_hi = max(-lo, 0.0)
    neg = MomentumDensity(
        density=lambda k: momentum_density(packet, -np.asarray(k, dtype=float)),
        support=(0.0, neg_hi),
        norm_tail_eps=tail_eps,
        mass=neg_mass,
        carrier_k0=packet.k0,
        landmarks=(0.0, neg_hi),
        origin=packet,
    )
    return pos, neg


@dataclass(frozen=True, eq=False)
class TruncatedMomentumDensity(MomentumDensity):
    """Hard-truncated, renormalized density on a compact band."""

    base: MomentumDensity | None = None
    band: tuple[float, float] = (0.0, 0.0)
    renorm: float = 1.0


def truncate(density: MomentumDensity, band: tuple[float, float],
             spec: QuadSpec = DEFAULT_SPEC) -> TruncatedMomentumDensity:
    """Restrict a density to `band` and renormalize it to unit integral."""
    lo, hi = float(band[0]), float(band[1])
    if not hi > lo:
        raise ValueError("empty truncation: band has no interior")
    cut_lo = max(lo, density.support[0])
    cut_hi = min(hi, density.support[1])
    if not cut_hi > cut_lo:
        raise ValueError("empty truncation: band lies outside the density support")
    tail = integrate(density, cut_lo, cut_hi, spec, breakpoints=density.landmarks)
    mass = float(tail.value)
    if mass <= 0.0:
        raise ValueError("empty truncation: no density mass inside the band")
    renorm = 1.0 / mass
    base_fn = density.density

    return TruncatedMomentumDensity(
        density=lambda k: renorm * base_fn(k),
        support=(cut_lo, cut_hi),
        norm_tail_eps=density.norm_tail_eps,
        mass=1.0,
        carrier_k0=density.carrier_k0,
        landmarks=tuple(sorted({cut_lo, cut_hi,
                                *(p for p in density.landmarks if cut_lo < p < cut_hi)})),
        origin=density.origin,
        base=density,
        band=(lo, hi),
        renorm=renorm,
    )


def classify_regime(density: MomentumDensity, kappa_min: float,
                    kappa_max: float) -> Regime:
    """Sort a density into the traversal taxonomy by its support alone.

    Non-tunneling: support entirely above kappa_max. Full tunneling:
    entirely below kappa_min. Partial tunneling: some weight between
    kappa_min and kappa_max, none above kappa_max. Anything else is mixed.
    Classification only looks at the support interval, so it is invariant
    under rescaling the density values.
    """
    if kappa_min > kappa_max:
        raise ValueError("kappa_min must not exceed kappa_max")
    lo, hi = density.support
    if lo > kappa_max:
        return Regime.NON_TUNNELING
    if hi < kappa_min:
        return Regime.FULL_TUNNELING
    if hi <= kappa_max and hi > kappa_min and lo < kappa_max:
        return Regime.PARTIAL_TUNNELING
    return Regime.MIXED


def packet_clears_barrier(packet: GaussianPacket, barrier_far_edge: float,
                          n_sigmas: float = DEFAULT_CLEARANCE_SIGMAS) -> bool:
    """True when the packet sits left of the barrier by n_sigmas widths.

    `barrier_far_edge` is the distance a from the arrival point to the far
    edge of the barrier, i.e. the barrier starts at q = -a.
    """
    return packet.q0 + n_sigmas * packet.sigma < -barrier_far_edge


def warn_if_overlapping(packet: GaussianPacket, barrier_far_edge: float,
                        n_sigmas: float = DEFAULT_CLEARANCE_SIGMAS) -> None:
    if not packet_clears_barrier(packet, barrier_far_edge, n_sigmas):
        warnings.warn(
            f"packet at q0={packet.q0} is within {n_sigmas} sigma of the "
            f"barrier edge at q={-barrier_far_edge}; initial-leakage "
            "assumption is violated",
            stacklevel=3,
        )
