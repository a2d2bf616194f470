"""JSON workspace configuration: named fields, codes, graphs, AEL compositions and experiments."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .ael import AelCode
from .css import (
    CssCode,
    code_422,
    css_from_classical,
    parity_code,
    qgrs_code,
    random_css,
    steane_code,
    trivial_code,
)
from .duality import field_downgrade
from .errors import SpecError
from .fqlinalg import Subspace
from .gf import FieldSpec, field_make
from .graph import BipartiteGraph, graph_from_spec

DEFAULT_CONFIG = {
    "fields": {"F2": {"p": 2, "m": 1}, "F4": {"p": 2, "m": 2}},
    "codes": {
        "steane": {"builtin": "steane"},
        "c422": {"builtin": "code_422"},
        "trivial4": {"builtin": "trivial", "n": 4},
        "trivial2": {"builtin": "trivial", "n": 2},
        "outer4": {"builtin": "qgrs", "field": "F4", "n": 4, "kx": 3, "kz": 3, "downgrade": True},
        "outer2": {"builtin": "qgrs", "field": "F4", "n": 2, "kx": 2, "kz": 1, "downgrade": True},
    },
    "graphs": {
        "K4": {"type": "complete", "n": 4},
        "K2": {"type": "complete", "n": 2},
        "R84": {"type": "random_regular", "n": 8, "d": 4, "seed": 3},
    },
    "ael": {
        "main": {"outer": "outer4", "inner": "c422", "graph": "K4"},
        "tiny": {"outer": "outer2", "inner": "trivial2", "graph": "K2"},
    },
    "experiments": {
        "main": {"ael": "main", "eps": 0.02, "gamma": 0.1, "trials": 20, "seed": 0},
    },
    "out": "aelq-out",
}


def _field(spec, fields: dict) -> FieldSpec:
    if spec is None:
        return field_make(2, 1)
    if isinstance(spec, str):
        if spec not in fields:
            raise SpecError(f"unknown field {spec!r}")
        spec = fields[spec]
    try:
        return field_make(int(spec["p"]), int(spec.get("m", 1)))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"bad field spec {spec!r}") from exc


def code_from_spec(spec: dict, fields: dict | None = None) -> CssCode:
    """Build a CssCode from a builtin name or explicit generator matrices."""
    fields = fields or {}
    if not isinstance(spec, dict):
        raise SpecError(f"code spec must be an object, got {spec!r}")
    F = _field(spec.get("field"), fields)
    kind = spec.get("builtin")
    try:
        if kind == "steane":
            code = steane_code()
        elif kind == "code_422":
            code = code_422()
        elif kind == "trivial":
            code = trivial_code(int(spec["n"]), F, int(spec.get("b", 1)))
        elif kind == "parity":
            code = parity_code(int(spec["n"]), F)
        elif kind == "qgrs":
            code = qgrs_code(F, int(spec["n"]), int(spec["kx"]), int(spec["kz"]), spec.get("alphas"), spec.get("multipliers"))
        elif kind == "random_css":
            code = random_css(F, int(spec["n"]), int(spec["stab_dim"]), int(spec["code_dim"]), int(spec.get("b", 1)), int(spec.get("seed", 0)))
        elif kind == "css_from_classical":
            n = int(spec["n"])
            code = css_from_classical(Subspace(F, n, spec["c1"]), Subspace(F, n, spec["c2"]), int(spec.get("b", 1)))
        elif kind is None:
            n = int(spec["n"])
            code = CssCode(Subspace(F, n, spec["cx"]), Subspace(F, n, spec["cz"]), int(spec.get("b", 1)))
        else:
            raise SpecError(f"unknown builtin code {kind!r}")
    except KeyError as exc:
        raise SpecError(f"code spec missing {exc}") from exc
    down = spec.get("downgrade")
    if down:
        base = None if down is True else _field(down, fields)
        code = field_downgrade(code, base)
    return code


@dataclass
class WorkspaceConfig:
    fields: dict = dc_field(default_factory=dict)
    codes: dict = dc_field(default_factory=dict)
    graphs: dict = dc_field(default_factory=dict)
    ael: dict = dc_field(default_factory=dict)
    experiments: dict = dc_field(default_factory=dict)
    cap: int | None = None
    out: str = "aelq-out"
    _built: dict = dc_field(default_factory=dict, repr=False)

    @classmethod
    def default(cls) -> "WorkspaceConfig":
        return cls.from_dict(copy.deepcopy(DEFAULT_CONFIG))

    @classmethod
    def from_dict(cls, data: dict) -> "WorkspaceConfig":
        if not isinstance(data, dict):
            raise SpecError("config must be a JSON object")
        unknown = set(data) - {"fields", "codes", "graphs", "ael", "experiments", "cap", "out"}
        if unknown:
            raise SpecError(f"unknown config keys {sorted(unknown)}")
        cfg = cls(
            data.get("fields", {}),
            data.get("codes", {}),
            data.get("graphs", {}),
            data.get("ael", {}),
            data.get("experiments", {}),
            None if data.get("cap") is None else int(data["cap"]),
            str(data.get("out", "aelq-out")),
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "WorkspaceConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "fields": self.fields,
            "codes": self.codes,
            "graphs": self.graphs,
            "ael": self.ael,
            "experiments": self.experiments,
            "cap": self.cap,
            "out": self.out,
        }

    def validate(self) -> None:
        if self.cap is not None and self.cap <= 0:
            raise SpecError("cap must be positive")
        for name, a in self.ael.items():
            for key, table in (("outer", self.codes), ("inner", self.codes), ("graph", self.graphs)):
                if a.get(key) not in table:
                    raise SpecError(f"ael {name!r}: unknown {key} {a.get(key)!r}")
        for name, e in self.experiments.items():
            if e.get("ael") not in self.ael:
                raise SpecError(f"experiment {name!r}: unknown ael {e.get('ael')!r}")

    def code(self, name: str) -> CssCode:
        key = ("code", name)
        if key not in self._built:
            if name not in self.codes:
                raise SpecError(f"unknown code {name!r}")
            self._built[key] = code_from_spec(self.codes[name], self.fields)
        return self._built[key]

    def graph(self, name: str) -> BipartiteGraph:
        key = ("graph", name)
        if key not in self._built:
            if name not in self.graphs:
                raise SpecError(f"unknown graph {name!r}")
            self._built[key] = graph_from_spec(self.graphs[name])
        return self._built[key]

    def ael_code(self, name: str) -> AelCode:
        key = ("ael", name)
        if key not in self._built:
            if name not in self.ael:
                raise SpecError(f"unknown ael composition {name!r}")
            a = self.ael[name]
            self._built[key] = AelCode(self.code(a["outer"]), self.code(a["inner"]), self.graph(a["graph"]))
        return self._built[key]

    def resolve(self, name: str):
        """Whatever ``name`` refers to: an AEL composition, a code or a graph."""
        if name in self.ael:
            return self.ael_code(name)
        if name in self.codes:
            return self.code(name)
        if name in self.graphs:
            return self.graph(name)
        raise SpecError(f"nothing named {name!r} in the config")


def json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    return str(o)


__all__ = ["DEFAULT_CONFIG", "WorkspaceConfig", "code_from_spec", "json_default"]
