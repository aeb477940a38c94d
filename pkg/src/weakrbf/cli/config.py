"""Run configuration: flat ``key = value`` files plus flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

from weakrbf.errors import ConfigError
from weakrbf.fluxes import FLUX_NAMES
from weakrbf.problems import PROBLEM_NAMES

METHODS = ("strong", "weak-analytical", "weak-collocation")


@dataclass(frozen=True)
class RunConfig:
    problem: str = "advect-gauss"
    bc: str = "periodic"
    method: str = "weak-collocation"
    kernel: str = "cubic"
    eps: float | None = None
    P: int = 1
    N: int = 20
    nodes: str = "equidistant"
    quadrature: str = "default"
    flux: str = "auto"
    cfl: float = 0.1
    tend: float = 1.0
    snapshots: tuple = ()
    scheme: str = "ssprk33"
    boundary_mode: str = "auto"
    out: str = "out"
    Ns: tuple = ()

    def validate(self) -> RunConfig:
        if self.problem not in PROBLEM_NAMES:
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.bc not in ("periodic", "inflow"):
            raise ConfigError(f"unknown bc {self.bc!r}")
        if self.flux != "auto" and self.flux not in FLUX_NAMES:
            raise ConfigError(f"unknown flux {self.flux!r}")
        if self.eps is not None and not self.eps > 0:
            raise ConfigError("eps must be positive")
        if self.P < 0 or self.N < 1:
            raise ConfigError("need P >= 0 and N >= 1")
        if not self.cfl > 0 or self.tend < 0:
            raise ConfigError("need cfl > 0 and tend >= 0")
        if self.boundary_mode not in ("auto", "none", "inflow", "periodic"):
            raise ConfigError(f"unknown boundary_mode {self.boundary_mode!r}")
        if self.scheme not in ("ssprk33", "euler"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.method != "strong" and self.P < 1 and self.problem == "euler-smooth":
            raise ConfigError("the Euler run needs P >= 1")
        return self


_FIELDS = {f.name: f for f in fields(RunConfig)}
_ALIASES = {"p": "P", "n": "N", "ns": "Ns", "t_end": "tend", "c": "cfl", "boundary-mode": "boundary_mode"}


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key in ("P", "N"):
        return int(raw)
    if key in ("cfl", "tend"):
        return float(raw)
    if key == "eps":
        return None if raw.lower() in ("", "none") else float(raw)
    if key == "snapshots":
        return tuple(float(v) for v in raw.replace(",", " ").split())
    if key == "Ns":
        return tuple(int(v) for v in raw.replace(",", " ").split())
    return raw


def normalize_key(key: str) -> str:
    key = key.strip()
    key = _ALIASES.get(key.lower(), _ALIASES.get(key, key))
    key = key.replace("-", "_")
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    return key


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = line.split("=", 1)
        key = normalize_key(key)
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {raw.strip()!r}") from exc
    return values


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    values = {}
    if path is not None:
        try:
            values.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for k, v in (overrides or {}).items():
        if v is not None:
            values[normalize_key(k)] = v
    return RunConfig(**values).validate()


def preset_names() -> list[str]:
    files = resources.files("weakrbf.presets").iterdir()
    return sorted(p.name[:-4] for p in files if p.name.endswith(".cfg"))


def preset_path(name: str):
    path = resources.files("weakrbf.presets") / f"{name}.cfg"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return path


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **kw).validate()
