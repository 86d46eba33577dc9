"""Roots of unity, tolerances and the dense tensor value type.

A ``Tensor`` stores its entries as an ndarray of shape ``(d,) * (out_legs + in_legs)``
with the output indices first.  Flattened row-major, that is the matrix of shape
``(d**out_legs, d**in_legs)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidDimension, ShapeError

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class RootSystem:
    d: int
    q: complex
    zeta: complex
    omega: complex
    sqrt_d: float

    def qpow(self, k: int) -> complex:
        """q**k computed from the reduced exponent (no drift for large k)."""
        return cmath.exp(2j * math.pi * (k % self.d) / self.d)

    def zpow(self, k: int) -> complex:
        """zeta**k; zeta has order dividing 2d, so reduce mod 2d."""
        return self._zeta_table[k % (2 * self.d)]

    @property
    def _zeta_table(self) -> np.ndarray:
        return _zeta_powers(self.d, self.zeta)


def _zeta_powers(d: int, zeta: complex) -> np.ndarray:
    ang = cmath.phase(zeta)
    return np.exp(1j * ang * np.arange(2 * d))


def roots(d: int) -> RootSystem:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise InvalidDimension(f"qudit dimension must be a positive integer, got {d!r}")
    d = int(d)
    q = cmath.exp(2j * math.pi * (1 % d) / d)
    if d % 2:
        zeta = cmath.exp(2j * math.pi * ((d + 1) // 2 % d) / d)
    else:
        zeta = cmath.exp(1j * math.pi / d)
    omega = sum(_zeta_powers(d, zeta)[(j * j) % (2 * d)] for j in range(d)) / math.sqrt(d)
    return RootSystem(d=d, q=q, zeta=zeta, omega=complex(omega), sqrt_d=math.sqrt(d))


@dataclass(frozen=True)
class Tolerance:
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True, eq=False)
class Tensor:
    d: int
    out_legs: int
    in_legs: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.d < 1:
            raise InvalidDimension(f"bad dimension {self.d}")
        if self.out_legs < 0 or self.in_legs < 0:
            raise ShapeError("negative leg count")
        arr = np.asarray(self.entries, dtype=complex)
        n = self.out_legs + self.in_legs
        if arr.size != self.d ** n:
            raise ShapeError(f"expected {self.d ** n} entries, got {arr.size}")
        arr = arr.reshape((self.d,) * n).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    # constructors
    @classmethod
    def from_matrix(cls, d: int, mat, out_legs: int, in_legs: int) -> "Tensor":
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (d ** out_legs, d ** in_legs):
            raise ShapeError(f"matrix shape {mat.shape} does not fit {out_legs} out / {in_legs} in legs")
        return cls(d, out_legs, in_legs, mat)

    @classmethod
    def identity(cls, d: int, k: int = 1) -> "Tensor":
        return cls(d, k, k, np.eye(d ** k))

    @classmethod
    def scalar(cls, d: int, value: complex) -> "Tensor":
        return cls(d, 0, 0, np.array([value]))

    @classmethod
    def ket(cls, d: int, *indices: int) -> "Tensor":
        v = np.zeros((d,) * len(indices), dtype=complex)
        v[tuple(i % d for i in indices)] = 1
        return cls(d, len(indices), 0, v)

    # views
    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.d, self.out_legs, self.in_legs)

    @property
    def matrix(self) -> np.ndarray:
        return self.entries.reshape(self.d ** self.out_legs, self.d ** self.in_legs)

    @property
    def vector(self) -> np.ndarray:
        return self.entries.reshape(-1)

    # algebra
    def compose(self, other: "Tensor") -> "Tensor":
        """self after other."""
        return tensor_compose(self, other)

    def __matmul__(self, other: "Tensor") -> "Tensor":
        return tensor_compose(self, other)

    def kron(self, other: "Tensor") -> "Tensor":
        return tensor_kron(self, other)

    def scale(self, c: complex) -> "Tensor":
        return Tensor(self.d, self.out_legs, self.in_legs, self.entries * c)

    def __add__(self, other: "Tensor") -> "Tensor":
        _same_shape(self, other)
        return Tensor(self.d, self.out_legs, self.in_legs, self.entries + other.entries)

    def __sub__(self, other: "Tensor") -> "Tensor":
        _same_shape(self, other)
        return Tensor(self.d, self.out_legs, self.in_legs, self.entries - other.entries)

    def dagger(self) -> "Tensor":
        return Tensor.from_matrix(self.d, self.matrix.conj().T, self.in_legs, self.out_legs)

    def power(self, k: int) -> "Tensor":
        if self.out_legs != self.in_legs:
            raise ShapeError("power needs a square tensor")
        return Tensor.from_matrix(self.d, np.linalg.matrix_power(self.matrix, k), self.out_legs, self.in_legs)

    def max_dev(self, other: "Tensor") -> float:
        _same_shape(self, other)
        if self.entries.size == 0:
            return 0.0
        return float(np.max(np.abs(self.entries - other.entries)))

    def allclose(self, other: "Tensor", tol: float = DEFAULT_EPS) -> bool:
        return self.shape == other.shape and self.max_dev(other) <= tol

    def __eq__(self, other):
        return isinstance(other, Tensor) and self.shape == other.shape and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def to_pairs(self, digits: int = 12) -> list[list[float]]:
        """Flat [re, im] pairs in row-major order, rounded for stable text output."""
        out = []
        for z in self.vector:
            re, im = round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0
            out.append([re, im])
        return out


def _same_shape(a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")


def tensor_compose(a: Tensor, b: Tensor) -> Tensor:
    if a.d != b.d:
        raise ShapeError(f"dimension mismatch {a.d} vs {b.d}")
    if a.in_legs != b.out_legs:
        raise ShapeError(f"cannot compose: {a.in_legs} inputs against {b.out_legs} outputs")
    return Tensor.from_matrix(a.d, a.matrix @ b.matrix, a.out_legs, b.in_legs)


def tensor_kron(a: Tensor, b: Tensor) -> Tensor:
    if a.d != b.d:
        raise ShapeError(f"dimension mismatch {a.d} vs {b.d}")
    d = a.d
    oa, ia, ob, ib = a.out_legs, a.in_legs, b.out_legs, b.in_legs
    t = np.multiply.outer(a.entries, b.entries)
    # (oa, ia, ob, ib) -> (oa, ob, ia, ib)
    perm = list(range(oa)) + list(range(oa + ia, oa + ia + ob)) + list(range(oa, oa + ia)) + list(
        range(oa + ia + ob, oa + ia + ob + ib)
    )
    return Tensor(d, oa + ob, ia + ib, np.transpose(t, perm) if perm else t)


def kron_all(*ts: Tensor) -> Tensor:
    out = ts[0]
    for t in ts[1:]:
        out = tensor_kron(out, t)
    return out


def compare_up_to_scalar(a: Tensor, b: Tensor, tol: Tolerance | float = DEFAULT_EPS) -> Optional[complex]:
    eps = tol.eps if isinstance(tol, Tolerance) else float(tol)
    _same_shape(a, b)
    av, bv = a.vector, b.vector
    i = int(np.argmax(np.abs(bv))) if bv.size else 0
    if bv.size == 0 or abs(bv[i]) <= eps:
        if av.size == 0 or np.max(np.abs(av)) <= eps:
            return 1.0 + 0j
        return None
    lam = av[i] / bv[i]
    if np.max(np.abs(av - lam * bv)) <= eps:
        return complex(lam)
    return None
