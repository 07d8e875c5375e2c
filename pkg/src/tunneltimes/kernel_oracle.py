"""Independent arrival-time oracle built on the quantized time kernel.

The traversal results elsewhere in this package come from closed-form
wavenumber integrals. This module re-derives the same physics from the
operator side and is used to cross-check those closed forms:

* `weyl_tkf_numeric` evaluates the time-kernel factor

      T(eta, zeta) = 1/2 * int_0^eta 0F1(;1; m*(V(eta)-V(s))*zeta^2 / (2*hbar^2)) ds

  by direct quadrature, for any potential. It is the ground truth here.

* `contiguous_tkf` evaluates the published closed-form kernel pieces for
  a two-slab barrier. Their region labels and one width coefficient are
  ambiguous in print, so `region_map_calibration` matches each spatial
  interval against candidate parameterizations of the printed templates
  numerically and reports which substitutions actually reproduce the
  integral (discrepancies are reported, never silently patched).

* `delta_tau_zeta` assembles the free-vs-barrier arrival-time difference
  from damped oscillatory integrals of the envelope autocorrelation,

      Q*   = k0 * int_0^inf Phi(z) e^{i k0 z} dz
      R_n* = k0 * int_0^inf Phi(z) J0(kappa_n z) e^{i k0 z} dz,

  whose barrier term sum_n (w_n/v0) Im R_n* must equal the k-space dwell
  time. That equality ties the operator route to the wavenumber route and
  is the central oracle test of the package.

* `free_toa_expectation` evaluates the free time-of-arrival operator
  expectation on a position grid (kernel (q+q')/4 with a sign flip across
  the diagonal) and checks it against the classical flight time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .barriers import BarrierStack
from .quadrature import DEFAULT_SPEC, QuadSpec, integrate, integrate_oscillatory_damped
from .special import bessel_i0, bessel_j0, hyp0f1_unit
from .wavepackets import (
    DEFAULT_CLEARANCE_SIGMAS,
    GaussianPacket,
    UnitSystem,
    autocorrelation,
    packet_clears_barrier,
)

__all__ = [
    "Region",
    "KernelParams",
    "KernelPiece",
    "DeltaTauBreakdown",
    "CalibrationEntry",
    "CalibrationReport",
    "weyl_tkf_numeric",
    "contiguous_tkf",
    "region_map_calibration",
    "delta_tau_zeta",
    "free_toa_expectation",
]


class Region(str, Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class KernelParams:
    """Symbol table for the printed kernel pieces of a two-slab barrier.

    Index 1 is the slab adjacent to the arrival-side gap, index 2 the far
    slab; this is the only assignment under which the printed region-III
    piece is internally consistent. kappa21_sq = 2*m*(V_2 - V_1)/hbar^2
    keeps its sign, and L is the free-flight comparison length carried by
    the stack.
    """

    kappa1: float
    kappa2: float
    kappa21_sq: float
    w1: float
    w2: float
    b: float
    L: float

    @classmethod
    def from_stack(cls, stack: BarrierStack) -> "KernelParams":
        if len(stack.segments) != 2:
            raise ValueError("kernel pieces are defined for two-segment stacks")
        far, near = stack.segments
        return cls(
            kappa1=stack.units.kappa_of(near.height),
            kappa2=stack.units.kappa_of(far.height),
            kappa21_sq=stack.kappa21_sq,
            w1=near.width,
            w2=far.width,
            b=stack.right_edge,
            L=stack.comparison_length,
        )


@dataclass(frozen=True)
class KernelPiece:
    """One printed closed-form kernel piece, evaluated verbatim."""

    region: Region
    params: KernelParams

    def eval(self, eta, zeta):
        """Kernel value; even in zeta by construction (all pieces use |zeta|)."""
        eta = np.asarray(eta, dtype=float)
        az = np.abs(np.asarray(zeta, dtype=float))
        p = self.params
        if self.region is Region.I:
            out = eta / 2.0 + 0.0 * az
        elif self.region is Region.II:
            out = (eta + p.b) / 2.0 - (p.w1 / 2.0) * bessel_i0(p.kappa1 * az)
        elif self.region is Region.III:
            out = ((eta + p.b + p.w1) / 2.0
                   - (p.b / 2.0) * bessel_i0(p.kappa2 * az)
                   - (p.w1 / 2.0) * hyp0f1_unit(p.kappa21_sq * az**2 / 4.0))
        else:
            out = ((eta + p.L) / 2.0
                   - (p.w1 / 2.0) * bessel_j0(p.kappa1 * az)
                   - (p.w2 / 2.0) * bessel_j0(p.kappa2 * az))
        return out if out.ndim else float(out)


def contiguous_tkf(piece: KernelPiece, eta, zeta):
    """Evaluate a printed kernel piece at (eta, zeta)."""
    return piece.eval(eta, zeta)


def weyl_tkf_numeric(potential: Callable, eta: float, zeta: float,
                     units: UnitSystem = UnitSystem(),
                     spec: QuadSpec = DEFAULT_SPEC,
                     breakpoints: Sequence[float] | None = None) -> float:
    """Direct quadrature of the time-kernel factor for any potential.

    `potential` must be vectorized over positions; `breakpoints` may list
    positions where it jumps (slab edges) so the quadrature splits there.
    For V = 0 (or zeta = 0) the value is exactly eta/2.
    """
    v_eta = float(np.asarray(potential(eta)))
    scale = units.mass * zeta**2 / (2.0 * units.hbar**2)

    def integrand(s):
        return hyp0f1_unit(scale * (v_eta - np.asarray(potential(s), dtype=float)))

    lo, hi = min(0.0, eta), max(0.0, eta)
    if lo == hi:
        return 0.0
    edges = () if breakpoints is None else breakpoints
    seeds = tuple(float(p) for p in edges if lo < p < hi)
    res = integrate(integrand, lo, hi, spec, breakpoints=seeds)
    if not res.converged:
        warnings.warn("time-kernel quadrature did not converge to tolerance")
    return 0.5 * float(res.value) * (1.0 if eta >= 0 else -1.0)


# --- region-map calibration -------------------------------------------------

@dataclass(frozen=True)
class _Candidate:
    """One concrete parameterization of a printed kernel template."""

    region: Region
    label: str
    fn: Callable

    def eval(self, eta, zeta):
        return self.fn(eta, zeta)


def _named_lengths(p: KernelParams) -> dict[str, float]:
    return {"b": p.b, "w1": p.w1, "w2": p.w2}


def _named_offsets(p: KernelParams) -> dict[str, float]:
    base = _named_lengths(p)
    base.update({
        "b+w1": p.b + p.w1,
        "b+w2": p.b + p.w2,
        "w1+w2": p.w1 + p.w2,
        "b+w1+w2": p.b + p.w1 + p.w2,
    })
    return base


def _candidates(p: KernelParams) -> dict[Region, list[_Candidate]]:
    lengths = _named_lengths(p)
    offsets = _named_offsets(p)
    kappas = {"kappa1": p.kappa1, "kappa2": p.kappa2}
    signs = {"+kappa21^2": p.kappa21_sq, "-kappa21^2": -p.kappa21_sq}

    out: dict[Region, list[_Candidate]] = {
        Region.I: [_Candidate(Region.I, "eta/2", lambda e, z: e / 2.0)]
    }

    cands_ii = []
    for (on, ov), (wn, wv), (kn, kv) in product(offsets.items(), lengths.items(), kappas.items()):
        def fn(e, z, ov=ov, wv=wv, kv=kv):
            return (e + ov) / 2.0 - (wv / 2.0) * bessel_i0(kv * abs(z))
        cands_ii.append(_Candidate(Region.II, f"offset={on}, width={wn}, {kn}", fn))
    out[Region.II] = cands_ii

    cands_iii = []
    for (on, ov), (an, av), (kn, kv), (bn, bv), (sn, sv) in product(
            offsets.items(), lengths.items(), kappas.items(), lengths.items(), signs.items()):
        def fn(e, z, ov=ov, av=av, kv=kv, bv=bv, sv=sv):
            return ((e + ov) / 2.0 - (av / 2.0) * bessel_i0(kv * abs(z))
                    - (bv / 2.0) * hyp0f1_unit(sv * z**2 / 4.0))
        cands_iii.append(_Candidate(
            Region.III, f"offset={on}, i0-width={an}, {kn}, 0f1-width={bn}, arg {sn}", fn))
    out[Region.III] = cands_iii

    cands_iv = []
    for on, ov in offsets.items():
        def fn(e, z, ov=ov):
            return ((e + ov) / 2.0 - (p.w1 / 2.0) * bessel_j0(p.kappa1 * abs(z))
                    - (p.w2 / 2.0) * bessel_j0(p.kappa2 * abs(z)))
        cands_iv.append(_Candidate(Region.IV, f"offset={on}", fn))
    out[Region.IV] = cands_iv
    return out


_PRINTED_LABELS = {
    Region.I: "eta/2",
    Region.II: "offset=b, width=w1, kappa1",
    Region.III: "offset=b+w1, i0-width=b, kappa2, 0f1-width=w1, arg +kappa21^2",
    Region.IV: "offset=b+w1+w2",  # printed constant is L = a
}


@dataclass(frozen=True)
class CalibrationEntry:
    """Best-matching kernel piece for one spatial interval."""

    interval: tuple[float, float]
    region: Region
    best_label: str
    best_max_err: float
    printed_label: str
    printed_max_err: float
    printed_matches: bool
    note: str
    eval_fn: Callable


@dataclass(frozen=True)
class CalibrationReport:
    entries: tuple[CalibrationEntry, ...]
    tolerance: float

    def piece_for(self, eta: float) -> CalibrationEntry:
        for entry in self.entries:
            lo, hi = entry.interval
            if lo <= eta < hi:
                return entry
        raise ValueError(f"eta={eta} outside all calibrated intervals")


def region_map_calibration(stack: BarrierStack,
                           spec: QuadSpec = DEFAULT_SPEC,
                           tolerance: float = 1e-8) -> CalibrationReport:
    """Assign each spatial interval its best-matching printed kernel piece.

    Samples the numeric kernel on an (eta, zeta) lattice inside each of
    the four intervals cut by the slab edges, scores every candidate
    parameterization of the printed templates by worst relative
    deviation, and records where the printed parameters themselves fail
    (a width coefficient and the far-region constant are known suspects).
    """
    params = KernelParams.from_stack(stack)
    edges = stack.edges()  # [-a, -l, -b]
    a = stack.extent
    span = a
    intervals = [
        (float(edges[2]), 0.0),            # gap between barrier and detector
        (float(edges[1]), float(edges[2])),  # near slab
        (float(edges[0]), float(edges[1])),  # far slab
        (float(edges[0]) - span, float(edges[0])),  # left of the barrier
    ]
    kap_scale = max(stack.kappa_max, 1.0 / a)
    zetas = np.array([0.3, 0.8, 1.4, 2.2, 3.1]) / kap_scale
    candidates = _candidates(params)
    printed_pieces = {r: KernelPiece(r, params) for r in Region}
    bp = tuple(edges)

    entries = []
    for lo, hi in intervals:
        etas = lo + (hi - lo) * np.array([0.12, 0.37, 0.63, 0.88])
        lattice = [(float(e), float(z)) for e in etas for z in zetas]
        numeric = {pt: weyl_tkf_numeric(stack.potential, pt[0], pt[1],
                                        stack.units, spec, breakpoints=bp)
                   for pt in lattice}

        def score(fn):
            return max(abs(fn(e, z) - numeric[(e, z)]) / (1.0 + abs(numeric[(e, z)]))
                       for e, z in lattice)

        best_region = None
        best_cand = None
        best_err = math.inf
        for region, cands in candidates.items():
            for cand in cands:
                err = score(cand.eval)
                if err < best_err:
                    best_region, best_cand, best_err = region, cand, err

        printed_err = score(lambda e, z: printed_pieces[best_region].eval(e, z))
        printed_ok = printed_err < tolerance
        if best_err >= tolerance:
            note = "no candidate parameterization matches; possible typo beyond the search set"
        elif printed_ok:
            note = "printed form matches as published"
        else:
            note = (f"printed parameters fail (err {printed_err:.2e}); "
                    f"calibrated: {best_cand.label}")
        entries.append(CalibrationEntry(
            interval=(lo, hi), region=best_region, best_label=best_cand.label,
            best_max_err=best_err, printed_label=_PRINTED_LABELS[best_region],
            printed_max_err=printed_err, printed_matches=printed_ok, note=note,
            eval_fn=best_cand.eval,
        ))
    return CalibrationReport(tuple(entries), tolerance)


# --- arrival-time difference in the relative coordinate ----------------------

@dataclass(frozen=True)
class DeltaTauBreakdown:
    """Free-vs-barrier arrival-time difference and its pieces.

    delta_tau = (L/v0)*Im(q_star) - sum_n (w_n/v0)*Im(r_star[n]); the
    second term is the zeta-space dwell time that the k-space route must
    reproduce.
    """

    q_star: complex
    r_star: tuple[complex, ...]
    delta_tau: float
    tau_free_part: float
    tau_barrier_part: float
    converged: bool = True


def delta_tau_zeta(packet: GaussianPacket, stack: BarrierStack,
                   units: UnitSystem | None = None,
                   spec: QuadSpec = DEFAULT_SPEC,
                   n_sigmas: float = DEFAULT_CLEARANCE_SIGMAS) -> DeltaTauBreakdown:
    """Arrival-time difference from damped oscillatory envelope integrals."""
    units = units or stack.units
    if not packet_clears_barrier(packet, stack.extent, n_sigmas):
        raise ValueError(
            f"packet must sit at least {n_sigmas} sigma left of the barrier edge "
            f"q={-stack.extent}; got q0={packet.q0}, sigma={packet.sigma}")

    phi = lambda z: autocorrelation(packet, z)
    q_res = integrate_oscillatory_damped(phi, packet.k0, 0.0, spec)
    r_res = [integrate_oscillatory_damped(phi, packet.k0, float(kap), spec)
             for kap in stack.kappas]

    v0 = units.velocity(packet.k0)
    L = stack.comparison_length
    tau_free = (L / v0) * q_res.value.imag
    tau_barrier = sum((seg.width / v0) * r.value.imag
                      for seg, r in zip(stack.segments, r_res))
    ok = q_res.converged and all(r.converged for r in r_res)
    if not ok:
        warnings.warn("oscillatory quadrature did not converge to tolerance")
    return DeltaTauBreakdown(
        q_star=complex(q_res.value),
        r_star=tuple(complex(r.value) for r in r_res),
        delta_tau=float(tau_free - tau_barrier),
        tau_free_part=float(tau_free),
        tau_barrier_part=float(tau_barrier),
        converged=ok,
    )


# --- free-operator grid expectation ------------------------------------------

def _free_toa_on_grid(packet: GaussianPacket, units: UnitSystem,
                      window: float, n: int) -> complex:
    """Trapezoid double integral of the free arrival-time kernel.

    The kernel factor is (q + q')/4 with a sign flip across q = q'; the
    q'-integral is split exactly at the diagonal, which makes the j = i
    term drop out and reduces the double sum to prefix/suffix cumulants.
    """
    q = np.linspace(packet.q0 - window, packet.q0 + window, n)
    h = q[1] - q[0]
    psi = packet.psi(q)
    c = np.ones(n)
    c[0] = c[-1] = 0.5
    cpsi = c * psi
    cqpsi = c * q * psi
    prefix_a = np.cumsum(cpsi) - cpsi
    prefix_b = np.cumsum(cqpsi) - cqpsi
    suffix_a = np.sum(cpsi) - prefix_a - cpsi
    suffix_b = np.sum(cqpsi) - prefix_b - cqpsi
    inner = (q * (prefix_a - suffix_a) + (prefix_b - suffix_b)) / 4.0
    total = np.sum(c * np.conj(psi) * inner) * h * h
    return complex(units.mass / (1j * units.hbar) * total)


def free_toa_expectation(packet: GaussianPacket,
                         units: UnitSystem = UnitSystem(),
                         spec: QuadSpec = DEFAULT_SPEC,
                         window_sigmas: float = 8.0,
                         points_per_wavelength: float = 24.0) -> float:
    """Expectation of the free arrival-time operator for a Gaussian packet.

    Uses two uniform grid resolutions with Richardson extrapolation; for
    a packet launched at q0 < 0 toward the origin this approaches the
    classical flight time |q0| * m / (hbar * k0) as the packet narrows in
    momentum.
    """
    window = window_sigmas * packet.sigma
    wavelength = 2.0 * math.pi / packet.k0
    h_target = min(wavelength / points_per_wavelength, packet.sigma / 8.0)
    n = int(math.ceil(2.0 * window / h_target)) + 1
    coarse = _free_toa_on_grid(packet, units, window, n)
    fine = _free_toa_on_grid(packet, units, window, 2 * n - 1)
    value = (4.0 * fine - coarse) / 3.0
    if abs(value.imag) > 1e-6 * max(abs(value.real), 1.0):
        warnings.warn(f"free arrival-time expectation has imaginary residue "
                      f"{value.imag:.2e}; grid may be under-resolved")
    if abs(fine - coarse) > 0.05 * abs(fine):
        warnings.warn("free arrival-time grids differ by more than 5%; "
                      "increase resolution")
    return float(value.real)
