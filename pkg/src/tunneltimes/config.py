"""Scenario configuration: strict YAML schema, validation, round-trip emit.

A scenario file describes units, one incident packet, exactly one barrier
and the computations to run on it. Validation is strict -- unknown keys
are rejected so unit mistakes cannot slip through silently -- and all
problems are reported at once with their key paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import yaml

from .quadrature import QuadSpec
from .wavepackets import DEFAULT_CLEARANCE_SIGMAS, UnitSystem

__all__ = [
    "ConfigError",
    "PacketConfig",
    "StackConfig",
    "SmoothConfig",
    "AttoclockConfig",
    "ScanConfig",
    "ScenarioConfig",
    "parse_config",
    "emit_config",
]

TASKS = ("traverse", "dwell", "decompose", "scan", "oracle", "classify")
SMOOTH_PROFILES = ("gaussian_bump", "cos2_bump", "sampled")


class ConfigError(ValueError):
    """Carries every validation problem found in a config document."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


@dataclass(frozen=True)
class PacketConfig:
    q0: float
    sigma: float
    k0: float
    kind: str = "gaussian"
    truncation: tuple[float, float] | None = None
    n_sigmas: float = DEFAULT_CLEARANCE_SIGMAS


@dataclass(frozen=True)
class StackConfig:
    segments: tuple[tuple[float, float], ...]  # (height, width), far edge first
    b: float
    kind: str = "stack"


@dataclass(frozen=True)
class SmoothConfig:
    profile: str
    support: tuple[float, float]
    height: float | None = None
    center: float | None = None
    width: float | None = None
    x: tuple[float, ...] = ()
    v: tuple[float, ...] = ()
    kind: str = "smooth"


@dataclass(frozen=True)
class AttoclockConfig:
    z_eff: float
    i_p: float
    field: float
    kind: str = "attoclock"


@dataclass(frozen=True)
class ScanConfig:
    param: str
    start: float
    stop: float
    steps: int


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    units: UnitSystem
    packet: PacketConfig
    barrier: StackConfig | SmoothConfig | AttoclockConfig
    tasks: tuple[str, ...]
    quad: QuadSpec = QuadSpec()
    scan: ScanConfig | None = None


class _Checker:
    """Accumulates validation problems instead of failing on the first."""

    def __init__(self):
        self.problems: list[str] = []

    def fail(self, path: str, message: str):
        self.problems.append(f"{path}: {message}")

    def known_keys(self, mapping: dict, path: str, allowed: set[str]):
        for key in mapping:
            if key not in allowed:
                self.fail(f"{path}.{key}" if path else str(key), "unknown key")

    def number(self, mapping: dict, path: str, key: str, *, required=True,
               positive=False, default=None):
        if key not in mapping:
            if required:
                self.fail(f"{path}.{key}", "missing required field")
            return default
        value = mapping[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            self.fail(f"{path}.{key}", f"expected a number, got {value!r}")
            return default
        if positive and value <= 0:
            self.fail(f"{path}.{key}", "must be positive")
            return default
        return float(value)


def _parse_packet(raw: Any, check: _Checker) -> PacketConfig | None:
    if not isinstance(raw, dict):
        check.fail("packet", "expected a mapping")
        return None
    check.known_keys(raw, "packet", {"kind", "q0", "sigma", "k0", "truncation", "n_sigmas"})
    kind = raw.get("kind", "gaussian")
    if kind != "gaussian":
        check.fail("packet.kind", f"unsupported packet kind {kind!r}")
    q0 = check.number(raw, "packet", "q0")
    sigma = check.number(raw, "packet", "sigma", positive=True)
    k0 = check.number(raw, "packet", "k0", positive=True)
    n_sigmas = check.number(raw, "packet", "n_sigmas", required=False,
                            positive=True, default=DEFAULT_CLEARANCE_SIGMAS)
    trunc = None
    if "truncation" in raw:
        t = raw["truncation"]
        if (not isinstance(t, (list, tuple)) or len(t) != 2
                or not all(isinstance(v, (int, float)) for v in t)):
            check.fail("packet.truncation", "expected [k_min, k_max]")
        elif not t[1] > t[0]:
            check.fail("packet.truncation", "k_max must exceed k_min")
        elif t[0] < 0:
            check.fail("packet.truncation", "band must lie in k >= 0")
        else:
            trunc = (float(t[0]), float(t[1]))
    if check.problems:
        return None
    return PacketConfig(q0=q0, sigma=sigma, k0=k0, truncation=trunc, n_sigmas=n_sigmas)


def _parse_barrier(raw: Any, check: _Checker):
    if not isinstance(raw, dict):
        check.fail("barrier", "expected a mapping")
        return None
    kind = raw.get("kind")
    if kind == "stack":
        check.known_keys(raw, "barrier", {"kind", "segments", "b"})
        b = check.number(raw, "barrier", "b", positive=True)
        segs = raw.get("segments")
        pairs = []
        if not isinstance(segs, list) or not segs:
            check.fail("barrier.segments", "expected a non-empty list of {V, w}")
        else:
            for i, s in enumerate(segs):
                if not isinstance(s, dict) or set(s) != {"V", "w"}:
                    check.fail(f"barrier.segments[{i}]", "expected keys V and w")
                    continue
                v = s["V"]
                w = s["w"]
                if not isinstance(v, (int, float)) or v < 0:
                    check.fail(f"barrier.segments[{i}].V", "must be a number >= 0")
                elif not isinstance(w, (int, float)) or w <= 0:
                    check.fail(f"barrier.segments[{i}].w", "must be a number > 0")
                else:
                    pairs.append((float(v), float(w)))
        if check.problems:
            return None
        return StackConfig(segments=tuple(pairs), b=b)
    if kind == "smooth":
        check.known_keys(raw, "barrier",
                         {"kind", "profile", "support", "height", "center", "width", "x", "v"})
        profile = raw.get("profile")
        if profile not in SMOOTH_PROFILES:
            check.fail("barrier.profile", f"expected one of {SMOOTH_PROFILES}")
            return None
        sup = raw.get("support")
        if profile != "sampled":
            if (not isinstance(sup, (list, tuple)) or len(sup) != 2
                    or not all(isinstance(v, (int, float)) for v in sup)
                    or not 0 < sup[0] < sup[1]):
                check.fail("barrier.support", "expected [b, a] with 0 < b < a")
                return None
            height = check.number(raw, "barrier", "height", positive=True)
            center = check.number(raw, "barrier", "center", required=False)
            width = check.number(raw, "barrier", "width", required=False, positive=True)
            if check.problems:
                return None
            return SmoothConfig(profile=profile, support=(float(sup[0]), float(sup[1])),
                                height=height, center=center, width=width)
        xs = raw.get("x")
        vs = raw.get("v")
        ok = (isinstance(xs, list) and isinstance(vs, list) and len(xs) == len(vs)
              and len(xs) >= 2 and all(isinstance(u, (int, float)) for u in xs)
              and all(isinstance(u, (int, float)) for u in vs))
        if not ok:
            check.fail("barrier.x", "sampled profile needs matching x/v lists (>= 2 points)")
            return None
        if check.problems:
            return None
        return SmoothConfig(profile="sampled", support=(float(xs[0]), float(xs[-1])),
                            x=tuple(float(u) for u in xs), v=tuple(float(u) for u in vs))
    if kind == "attoclock":
        check.known_keys(raw, "barrier", {"kind", "z_eff", "i_p", "field"})
        z = check.number(raw, "barrier", "z_eff", positive=True)
        ip = check.number(raw, "barrier", "i_p", positive=True)
        f = check.number(raw, "barrier", "field", positive=True)
        if check.problems:
            return None
        return AttoclockConfig(z_eff=z, i_p=ip, field=f)
    check.fail("barrier.kind", "expected one of stack, smooth, attoclock")
    return None


def _parse_compute(raw: Any, check: _Checker) -> tuple[tuple[str, ...], QuadSpec, ScanConfig | None]:
    tasks: tuple[str, ...] = ()
    quad = QuadSpec()
    scan = None
    if not isinstance(raw, dict):
        check.fail("compute", "expected a mapping")
        return tasks, quad, scan
    check.known_keys(raw, "compute", {"tasks", "quad", "scan"})
    t = raw.get("tasks")
    if not isinstance(t, list) or not t:
        check.fail("compute.tasks", f"expected a non-empty list from {TASKS}")
    else:
        bad = [x for x in t if x not in TASKS]
        for x in bad:
            check.fail("compute.tasks", f"unknown task {x!r}")
        tasks = tuple(dict.fromkeys(t))  # dedupe, keep order
    if "quad" in raw:
        q = raw["quad"]
        if not isinstance(q, dict):
            check.fail("compute.quad", "expected a mapping")
        else:
            check.known_keys(q, "compute.quad",
                             {"rel_tol", "abs_tol", "max_subdivisions", "tail_eps"})
            kwargs = {}
            for key in ("rel_tol", "abs_tol", "tail_eps"):
                val = check.number(q, "compute.quad", key, required=False, positive=True)
                if val is not None:
                    kwargs[key] = val
            if "max_subdivisions" in q:
                m = q["max_subdivisions"]
                if not isinstance(m, int) or m < 1:
                    check.fail("compute.quad.max_subdivisions", "must be an integer >= 1")
                else:
                    kwargs["max_subdivisions"] = m
            if not check.problems:
                quad = QuadSpec(**kwargs)
    if "scan" in raw:
        s = raw["scan"]
        if not isinstance(s, dict):
            check.fail("compute.scan", "expected a mapping")
        else:
            check.known_keys(s, "compute.scan", {"param", "from", "to", "steps"})
            param = s.get("param")
            if param != "field":
                check.fail("compute.scan.param", "only 'field' scans are supported")
            start = check.number(s, "compute.scan", "from", positive=True)
            stop = check.number(s, "compute.scan", "to", positive=True)
            steps = s.get("steps")
            if not isinstance(steps, int) or steps < 2:
                check.fail("compute.scan.steps", "must be an integer >= 2")
            if start is not None and stop is not None and not stop > start:
                check.fail("compute.scan", "'to' must exceed 'from'")
            if not check.problems:
                scan = ScanConfig(param=param, start=start, stop=stop, steps=steps)
    if "scan" in tasks and scan is None and not check.problems:
        check.fail("compute.scan", "task 'scan' requested but no scan block given")
    if scan is not None and "scan" not in tasks:
        check.fail("compute.scan", "scan block given but task 'scan' not requested")
    return tasks, quad, scan


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a YAML scenario document.

    Raises ConfigError listing every problem (unknown keys, missing or
    out-of-range fields) with its key path.
    """
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"document: not valid YAML ({exc})"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["document: expected a mapping at the top level"])

    check = _Checker()
    check.known_keys(raw, "", {"scenario", "units", "packet", "barrier", "compute"})

    scenario = raw.get("scenario", "scenario")
    if not isinstance(scenario, str) or not scenario:
        check.fail("scenario", "expected a non-empty string")

    units = UnitSystem()
    if "units" in raw:
        u = raw["units"]
        if not isinstance(u, dict):
            check.fail("units", "expected a mapping")
        else:
            check.known_keys(u, "units", {"hbar", "mass"})
            hbar = check.number(u, "units", "hbar", required=False, positive=True, default=1.0)
            mass = check.number(u, "units", "mass", required=False, positive=True, default=1.0)
            if hbar and mass:
                units = UnitSystem(hbar=hbar, mass=mass)

    packet = _parse_packet(raw.get("packet"), check) if "packet" in raw else None
    if "packet" not in raw:
        check.fail("packet", "missing required section")
    barrier = _parse_barrier(raw.get("barrier"), check) if "barrier" in raw else None
    if "barrier" not in raw:
        check.fail("barrier", "missing required section")
    if "compute" not in raw:
        check.fail("compute", "missing required section")
        tasks, quad, scan = (), QuadSpec(), None
    else:
        tasks, quad, scan = _parse_compute(raw["compute"], check)

    if not check.problems:
        if "scan" in tasks and not isinstance(barrier, AttoclockConfig):
            check.fail("compute.scan", "field scans require an attoclock barrier")
        if "oracle" in tasks and not isinstance(barrier, StackConfig):
            check.fail("compute.tasks", "the oracle task requires a stack barrier")
        if "dwell" in tasks and not isinstance(barrier, StackConfig):
            check.fail("compute.tasks", "the dwell task requires a stack barrier")

    if check.problems:
        raise ConfigError(check.problems)
    return ScenarioConfig(scenario=scenario, units=units, packet=packet,
                          barrier=barrier, tasks=tasks, quad=quad, scan=scan)


def _as_dict(cfg: ScenarioConfig) -> dict:
    doc: dict[str, Any] = {
        "scenario": cfg.scenario,
        "units": {"hbar": cfg.units.hbar, "mass": cfg.units.mass},
        "packet": {
            "kind": cfg.packet.kind,
            "q0": cfg.packet.q0,
            "sigma": cfg.packet.sigma,
            "k0": cfg.packet.k0,
            "n_sigmas": cfg.packet.n_sigmas,
        },
    }
    if cfg.packet.truncation is not None:
        doc["packet"]["truncation"] = list(cfg.packet.truncation)
    bar = cfg.barrier
    if isinstance(bar, StackConfig):
        doc["barrier"] = {"kind": "stack", "b": bar.b,
                          "segments": [{"V": v, "w": w} for v, w in bar.segments]}
    elif isinstance(bar, SmoothConfig):
        entry: dict[str, Any] = {"kind": "smooth", "profile": bar.profile}
        if bar.profile == "sampled":
            entry["x"] = list(bar.x)
            entry["v"] = list(bar.v)
        else:
            entry["support"] = list(bar.support)
            entry["height"] = bar.height
            if bar.center is not None:
                entry["center"] = bar.center
            if bar.width is not None:
                entry["width"] = bar.width
        doc["barrier"] = entry
    else:
        doc["barrier"] = {"kind": "attoclock", "z_eff": bar.z_eff,
                          "i_p": bar.i_p, "field": bar.field}
    compute: dict[str, Any] = {
        "tasks": list(cfg.tasks),
        "quad": {
            "rel_tol": cfg.quad.rel_tol,
            "abs_tol": cfg.quad.abs_tol,
            "max_subdivisions": cfg.quad.max_subdivisions,
            "tail_eps": cfg.quad.tail_eps,
        },
    }
    if cfg.scan is not None:
        compute["scan"] = {"param": cfg.scan.param, "from": cfg.scan.start,
                           "to": cfg.scan.stop, "steps": cfg.scan.steps}
    doc["compute"] = compute
    return doc


def emit_config(cfg: ScenarioConfig) -> str:
    """Serialize a config so that parsing the output reproduces it exactly."""
    return yaml.safe_dump(_as_dict(cfg), sort_keys=False)
