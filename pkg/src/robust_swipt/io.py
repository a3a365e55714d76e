"""JSON configuration files and solution serialisation.

A configuration file holds one simulation setup in the units used on the
command line (dB, dBm, metres, hertz)::

    {
      "schema_version": 1,
      "M": 6, "U": 2, "N": 2,
      "gamma_dB": 18, "gamma_leak_dB": -5, "P_req_dBm": -10,
      "noise_I_dBm": -70, "noise_E_dBm": -70,
      "rho": 0.1, "rho_leak": 0.1, "varrho": 0.1,
      "epsilon": 0.001,
      "geometry": {"l_I": 100, "l_E": 9, "fc": 9e8, "kappa": 2.7},
      "seed": 0
    }

Every key is optional; omitted keys take the values above. Per-receiver
quantities accept a scalar or a list.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .quadforms import BeamformerSet
from .scenario import Geometry, Scenario, SystemConfig, generate_scenario
from .conic.solver import Status
from .solution import BeamformingSolution, Method

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    M: int = 6
    U: int = 2
    N: int = 2
    gamma_dB: float | list = 18.0
    gamma_leak_dB: float | list = -5.0
    P_req_dBm: float | list = -10.0
    noise_I_dBm: float | list = -70.0
    noise_E_dBm: float | list = -70.0
    rho: float | list = 0.1
    rho_leak: float | list = 0.1
    varrho: float | list = 0.1
    epsilon: float = 1e-3
    geometry: dict = field(default_factory=dict)
    seed: int = 0

    def system_config(self) -> SystemConfig:
        return SystemConfig.from_db(
            self.M, self.U, self.N, gamma_dB=self.gamma_dB, gamma_leak_dB=self.gamma_leak_dB,
            P_req_dBm=self.P_req_dBm, noise_I_dBm=self.noise_I_dBm, noise_E_dBm=self.noise_E_dBm,
            rho=self.rho, rho_leak=self.rho_leak, varrho=self.varrho,
        )

    def geometry_obj(self) -> Geometry:
        return Geometry(**self.geometry)

    def scenario(self, seed: int | None = None) -> Scenario:
        return generate_scenario(self.system_config(), self.seed if seed is None else seed,
                                 epsilon=self.epsilon, geometry=self.geometry_obj())

    def with_changes(self, **changes) -> RunConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, **asdict(self)}


_GEOMETRY_KEYS = {"l_I", "l_E", "fc", "kappa"}


def parse_config(data: dict) -> RunConfig:
    """Validate a decoded JSON object and build a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    data = dict(data)
    version = data.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    known = set(RunConfig.__dataclass_fields__)
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    geometry = data.get("geometry", {})
    if not isinstance(geometry, dict) or set(geometry) - _GEOMETRY_KEYS:
        raise ConfigError(f"geometry must be an object with keys among {sorted(_GEOMETRY_KEYS)}")
    for key in ("M", "U", "N", "seed"):
        if key in data and (isinstance(data[key], bool) or not isinstance(data[key], int)):
            raise ConfigError(f"{key} must be an integer")
    eps = data.get("epsilon", 1e-3)
    if not isinstance(eps, (int, float)) or eps < 0:
        raise ConfigError("epsilon must be a non-negative number")
    cfg = RunConfig(**data)
    try:
        cfg.system_config()
        cfg.geometry_obj()
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(data)


def _complex_to_json(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def _complex_from_json(d) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


def solution_to_dict(sol: BeamformingSolution) -> dict:
    out = {
        "method": sol.method.value,
        "status": sol.status.value,
        "total_power": sol.total_power,
        "total_power_dBm": float(10.0 * np.log10(sol.total_power) + 30.0) if sol.total_power > 0 else None,
        "rank_ratios": sol.rank_ratios,
        "rank_one": sol.rank_one,
        "solver": sol.solver,
        "aux": sol.aux,
        "meta": {k: v for k, v in sol.meta.items() if isinstance(v, (int, float, str, type(None)))},
    }
    if sol.W is not None:
        out["W"] = _complex_to_json(sol.W.W)
        out["V"] = _complex_to_json(sol.W.V)
    if sol.rank_one:
        out["w"] = _complex_to_json(sol.w)
        out["v"] = _complex_to_json(sol.v)
    return out


def solution_from_dict(d: dict) -> BeamformingSolution:
    W = w = v = None
    if "W" in d:
        Wm = _complex_from_json(d["W"])
        Vm = _complex_from_json(d["V"]).reshape(-1, Wm.shape[-1], Wm.shape[-1])
        W = BeamformerSet(Wm, Vm, check=False)
    if "w" in d:
        w = _complex_from_json(d["w"]).reshape(len(W.W), -1)
        v = _complex_from_json(d["v"]).reshape(len(W.V), -1)
    return BeamformingSolution(
        method=Method(d["method"]), status=Status(d["status"]), W=W, w=w, v=v,
        total_power=float(d["total_power"]) if d.get("total_power") is not None else float("nan"),
        rank_ratios=dict(d.get("rank_ratios", {})), solver=dict(d.get("solver", {})),
        aux=dict(d.get("aux", {})), meta=dict(d.get("meta", {})),
    )


def _clean(o):
    # JSON has no NaN/inf; they become null
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.ndarray):
        return _clean(o.tolist())
    if isinstance(o, np.generic):
        o = o.item()
    if isinstance(o, float) and not np.isfinite(o):
        return None
    return o


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))
