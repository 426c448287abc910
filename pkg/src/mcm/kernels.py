"""Kernel functions K(p, q) = phi(p).phi(q) and Gram-matrix construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, McmError

LINEAR = "linear"
RBF = "rbf"
POLY = "poly"
_KINDS = (LINEAR, RBF, POLY)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameters.

    linear: p.q
    rbf:    exp(-gamma * ||p - q||^2), gamma > 0
    poly:   (p.q + coef0) ** degree, degree >= 1
    """

    kind: str
    gamma: float | None = None
    degree: int = 3
    coef0: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise McmError(f"unknown kernel kind {self.kind!r}")
        if self.kind == RBF:
            if self.gamma is None or self.gamma <= 0:
                raise McmError("rbf kernel requires gamma > 0")
        if self.kind == POLY and (int(self.degree) != self.degree or self.degree < 1):
            raise McmError("poly kernel requires integer degree >= 1")

    def describe(self) -> str:
        if self.kind == RBF:
            return f"rbf(gamma={self.gamma:g})"
        if self.kind == POLY:
            return f"poly(degree={self.degree}, coef0={self.coef0:g})"
        return "linear"


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    kernel: KernelSpec
    sample_count: int


def kernel_eval(kernel: KernelSpec, p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionMismatch(f"kernel arguments of length {p.shape} vs {q.shape}")
    if kernel.kind == LINEAR:
        return float(np.dot(p, q))
    if kernel.kind == RBF:
        d = p - q
        return float(np.exp(-kernel.gamma * np.dot(d, d)))
    return float((np.dot(p, q) + kernel.coef0) ** kernel.degree)


def cross_gram(kernel: KernelSpec, X, Y) -> np.ndarray:
    """Rectangular kernel matrix K[i, j] = K(X[i], Y[j])."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(
            f"samples with {X.shape[1]} features against {Y.shape[1]}")
    if kernel.kind == LINEAR:
        return X @ Y.T
    if kernel.kind == RBF:
        sq = (X[:, None, :] - Y[None, :, :]) ** 2
        return np.exp(-kernel.gamma * sq.sum(axis=2))
    return (X @ Y.T + kernel.coef0) ** kernel.degree


def gram(kernel: KernelSpec, samples) -> GramMatrix:
    """Full M x M kernel matrix; the upper triangle is mirrored so the result
    is exactly symmetric, and the rbf diagonal is exactly one."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    entries = cross_gram(kernel, samples, samples)
    entries = np.triu(entries) + np.triu(entries, 1).T
    if kernel.kind == RBF:
        np.fill_diagonal(entries, 1.0)
    return GramMatrix(entries, kernel, samples.shape[0])
