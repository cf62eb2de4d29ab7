"""Run configuration: TOML loading, CLI overrides, validation."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import sympy
import tomli

from .chars import DirichletCharacter, parse_character
from .errors import ParameterError
from .qseries import QExpansion

__all__ = ["RunConfig", "load_config", "load_basis"]


@dataclass
class RunConfig:
    p: int = 5
    N: int = 3
    chi: str = "3:quad"
    c: list = field(default_factory=lambda: [2])
    a: int | None = None
    b: int = 1
    K: int = 12
    Q: int = 16
    M: int = 6
    D: int = 8
    r_max: int = 4
    cache_dir: str | None = None
    basis: list = field(default_factory=list)
    out: str | None = None
    base_dir: str = "."

    @property
    def character(self) -> DirichletCharacter:
        return parse_character(self.chi)

    def validate(self, need_odd: bool = False, need_odd_p: bool = False) -> "RunConfig":
        if not sympy.isprime(self.p):
            raise ParameterError(f"p={self.p} is not prime")
        chi = self.character
        if chi.modulus != self.N:
            raise ParameterError(f"character {self.chi} has modulus {chi.modulus}, config says N={self.N}")
        L = chi.natural_ring().L
        if (self.N * L) % self.p == 0:
            raise ParameterError(f"p={self.p} divides N*L={self.N * L}")
        if need_odd and (chi.parity != -1 or chi.is_trivial):
            raise ParameterError(f"{self.chi} is not a nontrivial odd character")
        if need_odd_p and self.p == 2:
            raise ParameterError("p must be odd here")
        if not self.c:
            raise ParameterError("c must be a nonempty list")
        for c in self.c + ([self.a] if self.a is not None else []):
            if c % self.p == 0:
                raise ParameterError(f"{c} is not a unit mod p={self.p}")
        if math.gcd(self.b, self.N) != 1:
            raise ParameterError(f"b={self.b} is not prime to N={self.N}")
        for name in ("K", "M", "D"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be positive")
        if self.Q < 0 or self.r_max < 0:
            raise ParameterError("Q and r_max must be nonnegative")
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        d.pop("out")
        d.pop("cache_dir")
        return d


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    data: dict = {}
    base = "."
    if path:
        try:
            with open(path, "rb") as fh:
                data = tomli.load(fh)
        except (OSError, tomli.TOMLDecodeError) as e:
            raise ParameterError(f"cannot read config {path}: {e}") from None
        base = str(Path(path).resolve().parent)
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    if "chi" in data and "N" not in data:
        data["N"] = parse_character(data["chi"]).modulus
    if isinstance(data.get("c"), int):
        data["c"] = [data["c"]]
    return RunConfig(base_dir=base, **data)


def load_basis(cfg: RunConfig) -> dict:
    """Basis files: JSON lists of serialized q-expansions, grouped by weight tag."""
    out: dict = {}
    for rel in cfg.basis:
        path = Path(cfg.base_dir) / rel
        try:
            items = json.loads(path.read_text())
        except (OSError, ValueError) as e:
            raise ParameterError(f"cannot read basis file {path}: {e}") from None
        for obj in items:
            f = QExpansion.from_json(obj)
            if f.weight is None:
                raise ParameterError(f"basis element in {path} lacks a weight tag")
            out.setdefault(f.weight, []).append(f)
    return out
