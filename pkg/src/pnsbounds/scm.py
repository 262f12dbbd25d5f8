"""The binary treatment/outcome SCM family with 20 independent binary confounders.

    Z_i = U_{Z_i}
    X   = 1 iff M_X + U_X > 0.5
    Y   = 1 iff 0 < C X + M_Y + U_Y < 1  or  1 < C X + M_Y + U_Y < 2

with M_X = a . Z, M_Y = b . Z and every U a Bernoulli bit. All comparisons are
strict; a value landing exactly on a threshold takes the 0 branch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

N_CONFOUNDERS = 20
N_EXOGENOUS = N_CONFOUNDERS + 2
MODEL_KEYS = ("name", "a", "b", "c", "theta_x", "theta_y", "theta_z")
PRESETS = ("model1", "model2")


class ModelFileError(ValueError):
    """A model document does not follow the model schema."""


@dataclass(frozen=True)
class ScmModel:
    a: tuple[float, ...]
    b: tuple[float, ...]
    c: float
    theta_x: float
    theta_y: float
    theta_z: tuple[float, ...]
    name: str = "model"

    def __post_init__(self) -> None:
        for field in ("a", "b", "theta_z"):
            vec = tuple(float(v) for v in getattr(self, field))
            if len(vec) != N_CONFOUNDERS:
                raise ValueError(f"{field} must have {N_CONFOUNDERS} entries, got {len(vec)}")
            if not all(math.isfinite(v) for v in vec):
                raise ValueError(f"{field} contains a non-finite value")
            object.__setattr__(self, field, vec)
        object.__setattr__(self, "c", float(self.c))
        if not math.isfinite(self.c):
            raise ValueError("c must be finite")
        for name, theta in [("theta_x", self.theta_x), ("theta_y", self.theta_y)] + [
            (f"theta_z[{i}]", t) for i, t in enumerate(self.theta_z)
        ]:
            if not 0.0 <= theta <= 1.0:
                raise ValueError(f"{name}={theta!r} is not a Bernoulli parameter")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "a": list(self.a),
            "b": list(self.b),
            "c": self.c,
            "theta_x": self.theta_x,
            "theta_y": self.theta_y,
            "theta_z": list(self.theta_z),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> ScmModel:
        if not isinstance(doc, dict):
            raise ModelFileError("model document must be a JSON object")
        missing = [k for k in MODEL_KEYS if k not in doc]
        extra = [k for k in doc if k not in MODEL_KEYS]
        if missing or extra:
            raise ModelFileError(f"model keys mismatch: missing={missing} unexpected={extra}")
        if not isinstance(doc["name"], str):
            raise ModelFileError("name must be a string")
        for key in ("a", "b", "theta_z"):
            vec = doc[key]
            if not isinstance(vec, list) or len(vec) != N_CONFOUNDERS:
                raise ModelFileError(f"{key} must be an array of {N_CONFOUNDERS} numbers")
            if not all(_is_number(v) for v in vec):
                raise ModelFileError(f"{key} must contain only numbers")
        for key in ("c", "theta_x", "theta_y"):
            if not _is_number(doc[key]):
                raise ModelFileError(f"{key} must be a number")
        try:
            return cls(
                a=tuple(doc["a"]),
                b=tuple(doc["b"]),
                c=doc["c"],
                theta_x=float(doc["theta_x"]),
                theta_y=float(doc["theta_y"]),
                theta_z=tuple(doc["theta_z"]),
                name=doc["name"],
            )
        except ValueError as exc:
            raise ModelFileError(str(exc)) from exc


def _is_number(v: object) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


@dataclass(frozen=True)
class ExogenousState:
    u_x: int
    u_y: int
    u_z: tuple[int, ...]

    def __post_init__(self) -> None:
        bits = (self.u_x, self.u_y, *self.u_z)
        if len(self.u_z) != N_CONFOUNDERS or any(b not in (0, 1) for b in bits):
            raise ValueError(f"exogenous state must be {N_EXOGENOUS} bits")

    @property
    def index(self) -> int:
        """Position in the enumeration counter: u_z in bits 0-19, u_x bit 20, u_y bit 21."""
        z = sum(bit << i for i, bit in enumerate(self.u_z))
        return z | (self.u_x << 20) | (self.u_y << 21)

    @classmethod
    def from_index(cls, index: int) -> ExogenousState:
        return cls(
            u_x=(index >> 20) & 1,
            u_y=(index >> 21) & 1,
            u_z=tuple((index >> i) & 1 for i in range(N_CONFOUNDERS)),
        )

    def weight(self, model: ScmModel) -> float:
        w = _bern(model.theta_x, self.u_x) * _bern(model.theta_y, self.u_y)
        for theta, bit in zip(model.theta_z, self.u_z):
            w *= _bern(theta, bit)
        return w


def _bern(theta: float, bit: int) -> float:
    return theta if bit else 1.0 - theta


def _linear(coef: Sequence[float], z: Sequence[int]) -> float:
    total = 0.0
    for c, bit in zip(coef, z):
        if bit:
            total += c
    return total


def m_x(model: ScmModel, z: Sequence[int]) -> float:
    return _linear(model.a, z)


def m_y(model: ScmModel, z: Sequence[int]) -> float:
    return _linear(model.b, z)


def f_x_value(mx: float, u_x: int) -> int:
    return 1 if mx + u_x > 0.5 else 0


def f_y_value(c: float, x: int, my: float, u_y: int) -> int:
    v = c * x + my + u_y
    return 1 if (0.0 < v < 1.0) or (1.0 < v < 2.0) else 0


def f_x(model: ScmModel, z: Sequence[int], u_x: int) -> int:
    return f_x_value(m_x(model, z), u_x)


def f_y(model: ScmModel, x: int, z: Sequence[int], u_y: int) -> int:
    return f_y_value(model.c, x, m_y(model, z), u_y)


def f_y_array(c: float, x: np.ndarray | int, my: np.ndarray, u_y: np.ndarray | int) -> np.ndarray:
    """Vectorised f_y with the same operation order as :func:`f_y_value`."""
    v = c * x + my + u_y
    return ((v > 0.0) & (v < 1.0)) | ((v > 1.0) & (v < 2.0))


def f_x_array(mx: np.ndarray, u_x: np.ndarray | int) -> np.ndarray:
    return mx + u_x > 0.5


def _subset_sums(coef: Sequence[float]) -> np.ndarray:
    # Entry k holds the sum of coef[i] over the set bits i of k, accumulated in
    # ascending index order, so it is bit-identical to _linear.
    table = np.zeros(1, dtype=np.float64)
    for c in coef:
        table = np.concatenate((table, table + c))
    return table


def _subset_products(theta: Sequence[float]) -> np.ndarray:
    table = np.ones(1, dtype=np.float64)
    for t in theta:
        table = np.concatenate((table * (1.0 - t), table * t))
    return table


@lru_cache(maxsize=8)
def confounder_tables(model: ScmModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(M_X, M_Y, P(Z=z)) for every confounder configuration z, indexed by the
    integer whose bit i is Z_{i+1}. Arrays are read-only and shared."""
    tables = (_subset_sums(model.a), _subset_sums(model.b), _subset_products(model.theta_z))
    for t in tables:
        t.setflags(write=False)
    return tables


def generate_model(seed: int, name: str | None = None) -> ScmModel:
    """Random model: a, b, c ~ U[-1, 1] and all 22 Bernoulli parameters ~ U[0, 1].

    Draw order from a PCG64 stream seeded with ``seed``: a (20), b (20), c,
    theta_x, theta_y, theta_z (20).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.uniform(-1.0, 1.0, N_CONFOUNDERS)
    b = rng.uniform(-1.0, 1.0, N_CONFOUNDERS)
    c = rng.uniform(-1.0, 1.0)
    theta_x, theta_y = rng.uniform(0.0, 1.0, 2)
    theta_z = rng.uniform(0.0, 1.0, N_CONFOUNDERS)
    return ScmModel(
        a=tuple(a.tolist()),
        b=tuple(b.tolist()),
        c=float(c),
        theta_x=float(theta_x),
        theta_y=float(theta_y),
        theta_z=tuple(theta_z.tolist()),
        name=name if name is not None else f"random-{seed}",
    )


def load_model(path: str | Path) -> ScmModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not valid JSON ({exc})") from exc
    return ScmModel.from_dict(doc)


def save_model(model: ScmModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


def preset(which: str) -> ScmModel:
    """One of the two published models, ``"model1"`` or ``"model2"``."""
    if which not in PRESETS:
        raise ValueError(f"unknown preset {which!r}; choose from {PRESETS}")
    text = resources.files("pnsbounds").joinpath(f"data/{which}.json").read_text()
    return ScmModel.from_dict(json.loads(text))


def preset_path(which: str) -> Path:
    if which not in PRESETS:
        raise ValueError(f"unknown preset {which!r}; choose from {PRESETS}")
    return Path(str(resources.files("pnsbounds").joinpath(f"data/{which}.json")))
