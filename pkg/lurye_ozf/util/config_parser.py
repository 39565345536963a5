"""JSON analysis config -> frozen dataclasses, with schema checks.

Unknown keys and out-of-range values raise ``ConfigError``; every default
is explicit so the resolved config can be echoed back verbatim.
"""

from dataclasses import dataclass, field, fields
from typing import Any, Dict, Optional

import info
from lurye_ozf.analysis.multiplier_search import ClassMode, FirMultiplier
from lurye_ozf.analysis.nonlinearity import PiecewiseLinearMonotone, SectorNonlinearity
from lurye_ozf.core.exceptions import ConfigError, OzfError
from lurye_ozf.signal.plant import RationalPlant
from lurye_ozf.signal.signals import Signal
from lurye_ozf.util.serialization import load_json


def _check_keys(raw: Any, cls, section: str) -> Dict[str, Any]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"section '{section}' must be an object")
    unknown = sorted(set(raw) - {f.name for f in fields(cls)})
    if unknown:
        raise ConfigError(f"unknown key(s) in '{section}': {', '.join(unknown)}")
    return dict(raw)


def _domain(section: str, build, raw):
    """Build a domain object, turning its validation errors into config errors."""
    if raw is None:
        return None
    try:
        return build(raw)
    except OzfError as e:
        raise ConfigError(f"{section}: {e.message}")
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"{section}: {e}")


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


@dataclass(frozen=True)
class SearchParams:
    B: int = 2
    mode: str = ClassMode.HYPERDOMINANT.value
    grid_points: Optional[int] = None
    eps_freq: float = info.EPS_FREQ

    def __post_init__(self):
        _require(int(self.B) >= 0, "search.B must be >= 0")
        _require(self.mode in {m.value for m in ClassMode}, f"search.mode must be one of {[m.value for m in ClassMode]}")
        _require(self.grid_points is None or int(self.grid_points) >= 4, "search.grid_points must be >= 4")
        _require(float(self.eps_freq) >= 0.0, "search.eps_freq must be >= 0")


@dataclass(frozen=True)
class CertificateParams:
    T: int = 3
    B: int = 1
    gamma: float = 10.0
    H: Optional[int] = None
    max_iter: int = info.MAX_ITER
    alpha_max: float = 1e3
    enum_cap: int = info.ENUM_CAP

    def __post_init__(self):
        _require(self.T >= 2 * self.B + 1, "certificate needs T >= 2B+1")
        _require(self.gamma > 0.0, "certificate.gamma must be positive")
        _require(self.horizon % self.T == 0, "certificate.H must be a multiple of T")
        _require(self.max_iter >= 1, "certificate.max_iter must be >= 1")

    @property
    def horizon(self) -> int:
        return self.H if self.H is not None else self.T


@dataclass(frozen=True)
class SimulationParams:
    H: int = 128
    nonlinearity: PiecewiseLinearMonotone = field(default_factory=lambda: PiecewiseLinearMonotone.linear(0.5))
    input: Optional[Signal] = None
    allow_unstable: bool = False
    n_bursts: int = 4
    n_sinusoids: int = 4

    def __post_init__(self):
        _require(self.H >= 1, "simulation.H must be >= 1")


@dataclass(frozen=True)
class HuntParams:
    budget: int = 32
    H: int = 64
    n_breakpoints: int = 6
    x_range: float = 3.0
    slope_cap: float = 1.0
    refine_rounds: int = 2
    probe_H: int = 32
    n_random: int = 64
    eps: float = 0.0
    phi0: Optional[PiecewiseLinearMonotone] = None
    psi: Optional[SectorNonlinearity] = None

    def __post_init__(self):
        _require(self.budget >= 1, "hunt.budget must be >= 1")
        _require(self.slope_cap >= 0.0, "hunt.slope_cap must be >= 0")
        _require(self.H >= 1 and self.probe_H >= 1, "hunt horizons must be >= 1")


@dataclass(frozen=True)
class AnalysisConfig:
    plant: Optional[RationalPlant] = None
    multiplier: Optional[FirMultiplier] = None
    search: SearchParams = field(default_factory=SearchParams)
    certificate: CertificateParams = field(default_factory=CertificateParams)
    simulation: SimulationParams = field(default_factory=SimulationParams)
    hunt: HuntParams = field(default_factory=HuntParams)
    seed: int = info.SEED
    jobs: int = info.JOBS
    out: str = info.OUT_DIR

    def require_plant(self) -> RationalPlant:
        if self.plant is None:
            raise ConfigError("this command needs a 'plant' section")
        return self.plant

    def to_json(self) -> dict:
        def section(obj):
            return {f.name: _plain(getattr(obj, f.name)) for f in fields(obj)}

        return {
            "plant": _plain(self.plant),
            "multiplier": _plain(self.multiplier),
            "search": section(self.search),
            "certificate": section(self.certificate),
            "simulation": section(self.simulation),
            "hunt": section(self.hunt),
            "seed": self.seed,
            "jobs": self.jobs,
            "out": self.out,
        }


def _plain(value):
    return value.to_json() if hasattr(value, "to_json") else value


def _typed(raw: Dict[str, Any], section: str, **types) -> Dict[str, Any]:
    out = dict(raw)
    for key, kind in types.items():
        if key in out and out[key] is not None:
            try:
                out[key] = kind(out[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{section}.{key} must be {kind.__name__}, got {out[key]!r}")
    return out


class ConfigParser:
    def __init__(self, config_file: Optional[str] = None):
        self.config_file = config_file
        self.raw: Dict[str, Any] = {}

    def parse(self, overrides: Optional[Dict[str, Any]] = None) -> AnalysisConfig:
        raw = load_json(self.config_file) if self.config_file else {}
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
        self.raw = raw
        top = _check_keys(raw, AnalysisConfig, "config")
        top = _typed(top, "config", seed=int, jobs=int, out=str)
        try:
            return AnalysisConfig(
                plant=_domain("plant", RationalPlant.from_json, top.pop("plant", None)),
                multiplier=_domain("multiplier", FirMultiplier.from_json, top.pop("multiplier", None)),
                search=self._search(top.pop("search", None)),
                certificate=self._certificate(top.pop("certificate", None)),
                simulation=self._simulation(top.pop("simulation", None)),
                hunt=self._hunt(top.pop("hunt", None)),
                **top,
            )
        except TypeError as e:
            raise ConfigError(str(e))

    @staticmethod
    def _search(raw) -> SearchParams:
        raw = _typed(_check_keys(raw, SearchParams, "search"), "search", B=int, grid_points=int, eps_freq=float)
        return SearchParams(**raw)

    @staticmethod
    def _certificate(raw) -> CertificateParams:
        raw = _typed(
            _check_keys(raw, CertificateParams, "certificate"), "certificate",
            T=int, B=int, gamma=float, H=int, max_iter=int, alpha_max=float, enum_cap=int,
        )
        return CertificateParams(**raw)

    @staticmethod
    def _simulation(raw) -> SimulationParams:
        raw = _typed(_check_keys(raw, SimulationParams, "simulation"), "simulation",
                     H=int, allow_unstable=bool, n_bursts=int, n_sinusoids=int)
        if "nonlinearity" in raw:
            raw["nonlinearity"] = _domain("simulation.nonlinearity", PiecewiseLinearMonotone.from_json, raw["nonlinearity"])
        if "input" in raw:
            raw["input"] = _domain("simulation.input", Signal.from_json, raw["input"])
        return SimulationParams(**raw)

    @staticmethod
    def _hunt(raw) -> HuntParams:
        raw = _typed(
            _check_keys(raw, HuntParams, "hunt"), "hunt",
            budget=int, H=int, n_breakpoints=int, x_range=float, slope_cap=float,
            refine_rounds=int, probe_H=int, n_random=int, eps=float,
        )
        if "phi0" in raw:
            raw["phi0"] = _domain("hunt.phi0", PiecewiseLinearMonotone.from_json, raw["phi0"])
        if "psi" in raw:
            raw["psi"] = _domain("hunt.psi", SectorNonlinearity.from_json, raw["psi"])
        return HuntParams(**raw)
