"""Trained-model value types, decision functions, and model-file serialization.

Model files are UTF-8 JSON with schema keys {"format", "version", "type", "n",
"w", "b", "h", "C", "kernel", "lambda", "support_vectors", "classes",
"members"}; numbers round-trip exactly because floats are rendered with their
shortest repr.  The conventional extension is ".mcm.json".
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, McmError, ParseError, VersionMismatch
from .kernels import KernelSpec, cross_gram

FORMAT_NAME = "mcm-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class LinearModel:
    w: np.ndarray
    b: float
    h: float
    variant: str = "hard-linear"
    C: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float))

    @property
    def n(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True)
class KernelModel:
    lam: np.ndarray                 # coefficients of the retained support vectors
    support_vectors: np.ndarray     # rows are the retained training samples
    b: float
    h: float
    kernel: KernelSpec
    n: int
    C: float | None = None

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        sv = np.asarray(self.support_vectors, dtype=float).reshape(-1, self.n)
        if lam.shape[0] != sv.shape[0]:
            raise McmError(
                f"{lam.shape[0]} coefficients for {sv.shape[0]} support vectors")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "support_vectors", sv)

    @property
    def sv_count(self) -> int:
        return self.lam.shape[0]


@dataclass(frozen=True)
class OvrModel:
    """One-versus-rest bundle: one binary model per class, argmax decides."""

    class_labels: tuple[str, ...]
    members: tuple

    def __post_init__(self):
        if len(self.class_labels) != len(self.members):
            raise McmError("one member model per class label required")
        dims = {member.n for member in self.members}
        if len(dims) > 1:
            raise McmError(f"member models disagree on feature count: {dims}")
        kinds = {type(member) for member in self.members}
        if len(kinds) > 1:
            raise McmError("member models must share one variant")

    @property
    def n(self) -> int:
        return self.members[0].n


def decision_many(model, X) -> np.ndarray:
    """Decision values for a batch of rows."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n:
        raise DimensionMismatch(f"{X.shape[1]} features, model expects {model.n}")
    if isinstance(model, LinearModel):
        return X @ model.w + model.b
    if isinstance(model, KernelModel):
        if model.sv_count == 0:
            return np.full(X.shape[0], model.b)
        return cross_gram(model.kernel, X, model.support_vectors) @ model.lam + model.b
    raise McmError(f"no decision function for {type(model).__name__}")


def decision(model, x) -> float:
    return float(decision_many(model, np.asarray(x, dtype=float)[None, :])[0])


def predict_many(model, X) -> np.ndarray:
    """Signs of the decision values; a decision of exactly zero maps to +1."""
    values = decision_many(model, X)
    return np.where(values >= 0.0, 1, -1)


def predict(model, x) -> int:
    return int(predict_many(model, np.asarray(x, dtype=float)[None, :])[0])


def predict_ovr_many(ovr: OvrModel, X) -> list:
    """Argmax over class decisions; ties go to the earliest class label."""
    stacked = np.vstack([decision_many(member, X) for member in ovr.members])
    winners = np.argmax(stacked, axis=0)
    return [ovr.class_labels[k] for k in winners]


def predict_ovr(ovr: OvrModel, x):
    return predict_ovr_many(ovr, np.asarray(x, dtype=float)[None, :])[0]


def negated(model):
    """Model with the opposite decision function (the optimum under flipped
    labels, by the sign symmetry of the training programs)."""
    if isinstance(model, LinearModel):
        return LinearModel(-model.w, -model.b, model.h, model.variant, model.C)
    if isinstance(model, KernelModel):
        return KernelModel(-model.lam, model.support_vectors, -model.b, model.h,
                           model.kernel, model.n, model.C)
    raise McmError(f"cannot negate {type(model).__name__}")


# --- serialization ---

def _kernel_dict(kernel: KernelSpec) -> dict:
    return {
        "kind": kernel.kind,
        "gamma": kernel.gamma,
        "degree": kernel.degree,
        "coef0": kernel.coef0,
    }


def _model_dict(model) -> dict:
    if isinstance(model, LinearModel):
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "type": "linear",
            "n": model.n,
            "w": [float(v) for v in model.w],
            "b": float(model.b),
            "h": float(model.h),
            "C": None if model.C is None else float(model.C),
        }
    if isinstance(model, KernelModel):
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "type": "kernel",
            "n": model.n,
            "b": float(model.b),
            "h": float(model.h),
            "C": None if model.C is None else float(model.C),
            "kernel": _kernel_dict(model.kernel),
            "lambda": [float(v) for v in model.lam],
            "support_vectors": [[float(v) for v in row] for row in model.support_vectors],
        }
    if isinstance(model, OvrModel):
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "type": "ovr",
            "classes": list(model.class_labels),
            "members": [_model_dict(member) for member in model.members],
        }
    raise McmError(f"cannot serialize {type(model).__name__}")


def model_to_json(model) -> str:
    return json.dumps(_model_dict(model), indent=2) + "\n"


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ParseError(f"{context}: missing field {key!r}")
    return obj[key]


def _model_from_dict(obj: dict, context: str = "model"):
    if not isinstance(obj, dict):
        raise ParseError(f"{context}: expected a JSON object")
    if obj.get("format", FORMAT_NAME) != FORMAT_NAME:
        raise ParseError(f"{context}: not a {FORMAT_NAME} file")
    version = obj.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{context}: file version {version}, expected {FORMAT_VERSION}")
    kind = _require(obj, "type", context)
    try:
        if kind == "linear":
            w = np.asarray(_require(obj, "w", context), dtype=float)
            n = int(_require(obj, "n", context))
            if w.shape != (n,):
                raise ParseError(f"{context}: w has length {w.shape[0]}, n says {n}")
            C = obj.get("C")
            return LinearModel(
                w=w,
                b=float(_require(obj, "b", context)),
                h=float(_require(obj, "h", context)),
                variant="hard-linear" if C is None else "soft-linear",
                C=None if C is None else float(C),
            )
        if kind == "kernel":
            spec = _require(obj, "kernel", context)
            kernel = KernelSpec(
                kind=_require(spec, "kind", f"{context}.kernel"),
                gamma=spec.get("gamma"),
                degree=int(spec.get("degree", 3)),
                coef0=float(spec.get("coef0", 1.0)),
            )
            n = int(_require(obj, "n", context))
            return KernelModel(
                lam=np.asarray(_require(obj, "lambda", context), dtype=float),
                support_vectors=np.asarray(_require(obj, "support_vectors", context),
                                           dtype=float).reshape(-1, n),
                b=float(_require(obj, "b", context)),
                h=float(_require(obj, "h", context)),
                kernel=kernel,
                n=n,
                C=None if obj.get("C") is None else float(obj["C"]),
            )
        if kind == "ovr":
            classes = _require(obj, "classes", context)
            members = _require(obj, "members", context)
            return OvrModel(
                class_labels=tuple(classes),
                members=tuple(
                    _model_from_dict(member, f"{context}.members[{i}]")
                    for i, member in enumerate(members)
                ),
            )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{context}: {exc}") from exc
    raise ParseError(f"{context}: unknown model type {kind!r}")


def model_from_json(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return _model_from_dict(obj)


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(model_to_json(model))


def load_model(path):
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_json(handle.read())
