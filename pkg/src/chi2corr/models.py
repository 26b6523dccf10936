"""Builders and JSON persistence for cumulant models.

The multinomial builder gives the standardized cell counts
``X_i = (N_i - n p_i) / sqrt(n p_i)`` of a Pearson goodness-of-fit test. Raw
multinomial cumulants are exactly ``n`` times the cumulants of one categorical
draw, so every expansion terminates after its leading term.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .corrections import CumulantModel
from .errors import ModelError, SchemaError

FIELDS = ("n", "p", "mu1", "v0", "v1", "k3", "k4")


@dataclass(frozen=True)
class MultinomialSpec:
    probs: tuple[float, ...]
    n: int

    def __post_init__(self):
        probs = tuple(float(x) for x in self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 2:
            raise ModelError("a multinomial needs at least 2 cells")
        if any(not math.isfinite(x) or x <= 0 for x in probs):
            raise ModelError(f"cell probabilities must be positive, got {probs}")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ModelError(f"cell probabilities sum to {math.fsum(probs)!r}, not 1")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ModelError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def m(self) -> int:
        return len(self.probs)


def categorical_cumulant3(probs) -> np.ndarray:
    """Third joint cumulant of the indicator vector of one categorical draw."""
    p = np.asarray(probs, dtype=float)
    m = p.size
    eye = np.eye(m)
    diag3 = np.einsum("ij,jk->ijk", eye, eye)
    pp = np.outer(p, p)
    t = diag3 * p[:, None, None]
    t -= np.einsum("ij,ik->ijk", eye, pp)   # i = j
    t -= np.einsum("ik,ij->ijk", eye, pp)   # i = k
    t -= np.einsum("jk,ij->ijk", eye, pp)   # j = k
    t += 2 * np.einsum("i,j,k->ijk", p, p, p)
    return t


def categorical_cumulant4(probs) -> np.ndarray:
    """Fourth joint cumulant of the indicator vector of one categorical draw.

    Sum over set partitions of the four index slots: the moment of a block is
    ``p_i`` if all its indices equal ``i`` (else 0), and a partition with
    ``b`` blocks carries weight ``(-1)^(b-1) (b-1)!``.
    """
    p = np.asarray(probs, dtype=float)
    m = p.size
    eye = np.eye(m)
    diag3 = np.einsum("ij,jk->ijk", eye, eye)
    diag4 = np.einsum("ij,jk,kl->ijkl", eye, eye, eye)
    t = diag4 * p[:, None, None, None]
    # one triple block + one singleton
    t -= np.einsum("ijk,i,l->ijkl", diag3, p, p)
    t -= np.einsum("ijl,i,k->ijkl", diag3, p, p)
    t -= np.einsum("ikl,i,j->ijkl", diag3, p, p)
    t -= np.einsum("jkl,j,i->ijkl", diag3, p, p)
    # two pair blocks
    t -= np.einsum("ij,kl,i,k->ijkl", eye, eye, p, p)
    t -= np.einsum("ik,jl,i,j->ijkl", eye, eye, p, p)
    t -= np.einsum("il,jk,i,j->ijkl", eye, eye, p, p)
    # one pair block + two singletons
    letters = "ijkl"
    for x, y in combinations(range(4), 2):
        rest = [letters[z] for z in range(4) if z not in (x, y)]
        spec = f"{letters[x]}{letters[y]},{letters[x]},{rest[0]},{rest[1]}->ijkl"
        t += 2 * np.einsum(spec, eye, p, p, p)
    t -= 6 * np.einsum("i,j,k,l->ijkl", p, p, p, p)
    return t


def multinomial_model(spec: MultinomialSpec) -> CumulantModel:
    p = np.asarray(spec.probs)
    s = 1.0 / np.sqrt(p)
    root = np.sqrt(p)
    v0 = np.eye(spec.m) - np.outer(root, root)
    k3 = np.einsum("ijk,i,j,k->ijk", categorical_cumulant3(p), s, s, s)
    k4 = np.einsum("ijkl,i,j,k,l->ijkl", categorical_cumulant4(p), s, s, s, s)
    zeros = np.zeros(spec.m)
    return CumulantModel(spec.n, zeros, v0, np.zeros((spec.m, spec.m)), k3, k4)


def model_to_dict(model: CumulantModel) -> dict:
    return {
        "n": model.n,
        "p": model.p,
        "mu1": model.mu1.tolist(),
        "v0": model.v0.tolist(),
        "v1": model.v1.tolist(),
        "k3": model.k3.tolist(),
        "k4": model.k4.tolist(),
    }


def _shape_of(value, name: str, rank: int, p: int, source: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{source}: field {name!r} is not a nested array of numbers: {exc}") from None
    if arr.shape != (p,) * rank:
        raise SchemaError(f"{source}: field {name!r} must have shape {(p,) * rank}, got {arr.shape}")
    return arr


def model_from_dict(doc: dict, source: str = "model") -> CumulantModel:
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: top level must be a JSON object")
    missing = [f for f in FIELDS if f not in doc]
    if missing:
        raise SchemaError(f"{source}: missing field(s) {', '.join(missing)}")
    p = doc["p"]
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise SchemaError(f"{source}: field 'p' must be a positive integer, got {p!r}")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError(f"{source}: field 'n' must be a positive integer, got {n!r}")
    arrays = {name: _shape_of(doc[name], name, rank, p, source)
              for name, rank in (("mu1", 1), ("v0", 2), ("v1", 2), ("k3", 3), ("k4", 4))}
    try:
        return CumulantModel(n, **arrays)
    except ModelError as exc:
        exc.args = (f"{source}: {exc.args[0]}",) + exc.args[1:]
        raise


def save_model(model: CumulantModel, path) -> None:
    # json writes floats with repr(), the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n")


def load_model(path) -> CumulantModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return model_from_dict(doc, source=str(path))
