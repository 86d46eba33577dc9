"""Dense realizations on (C^d)^n: gates, spiders, resource states,
the one-qudit Clifford census and the teleportation simulator."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, ImpossibleOutcome, ShapeError
from .numerics import Tensor, kron_all, roots

GATE_NAMES = ("X", "Y", "Z", "F", "G", "F2", "CNOT")


def gate(d: int, name: str) -> Tensor:
    rs = roots(d)
    ks = np.arange(d)
    if name == "X":
        m = np.roll(np.eye(d), 1, axis=0)
    elif name == "Z":
        m = np.diag([rs.qpow(k) for k in ks])
    elif name == "Y":
        m = np.zeros((d, d), dtype=complex)
        for k in ks:
            m[(k - 1) % d, k] = rs.zpow(1 - 2 * k)
    elif name == "F":
        m = np.array([[rs.qpow(k * l) for k in ks] for l in ks]) / rs.sqrt_d
    elif name == "G":
        m = np.diag([rs.zpow(k * k) for k in ks])
    elif name == "F2":
        m = gate(d, "F").matrix @ gate(d, "F").matrix
    elif name == "CNOT":
        m = np.zeros((d * d, d * d))
        for k, j in itertools.product(ks, ks):
            m[((k + j) % d) * d + j, k * d + j] = 1
        return Tensor.from_matrix(d, m, 2, 2)
    else:
        raise KeyError(f"unknown gate {name!r}")
    return Tensor.from_matrix(d, m, 1, 1)


@dataclass(frozen=True)
class SpiderSpec:
    color: str
    in_legs: int
    out_legs: int

    def __post_init__(self):
        if self.color not in ("black", "white"):
            raise ValueError(f"unknown spider colour {self.color!r}")
        if self.in_legs < 0 or self.out_legs < 0:
            raise ShapeError("negative leg count")


def spider(d: int, spec: SpiderSpec | str, in_legs: int | None = None, out_legs: int | None = None) -> Tensor:
    if isinstance(spec, str):
        spec = SpiderSpec(spec, in_legs, out_legs)
    n = spec.in_legs + spec.out_legs
    if spec.color == "black":
        t = np.zeros((d,) * n, dtype=complex)
        if n == 0:
            t = np.array(float(d), dtype=complex)
        else:
            for k in range(d):
                t[(k,) * n] = 1
    else:
        idx = np.indices((d,) * n).reshape(n, -1) if n else np.zeros((0, 1), dtype=int)
        signs = np.array([1] * spec.out_legs + [-1] * spec.in_legs).reshape(n, 1) if n else np.zeros((0, 1))
        tot = (idx * signs).sum(axis=0) % d
        t = (tot == 0).astype(complex).reshape((d,) * n) if n else np.array(1.0 + 0j)
    return Tensor(d, spec.out_legs, spec.in_legs, t)


def resource_state(d: int, name: str, n: int = 2) -> Tensor:
    rs = roots(d)
    if name == "BellPlus":
        return spider(d, SpiderSpec("black", 0, 2)).scale(1 / rs.sqrt_d)
    if name == "BellMinus":
        return spider(d, SpiderSpec("white", 0, 2)).scale(1 / rs.sqrt_d)
    if n < 1:
        raise ShapeError("GHZ/Max need at least one qudit")
    if name == "GHZ":
        return spider(d, SpiderSpec("black", 0, n)).scale(1 / rs.sqrt_d)
    if name == "Max":
        return spider(d, SpiderSpec("white", 0, n)).scale(d ** ((1 - n) / 2))
    raise KeyError(f"unknown resource state {name!r}")


# Clifford census ---------------------------------------------------------------

def canonical_phase(m: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    flat = m.reshape(-1)
    i = int(np.argmax(np.abs(flat) > eps))
    ph = flat[i] / abs(flat[i])
    return m / ph


def _key(m: np.ndarray, digits: int = 6) -> bytes:
    r = np.round(canonical_phase(m), digits) + 0.0
    return r.tobytes()


def clifford_order(d: int, cap: int = 100_000, gens: Sequence[str] = ("X", "Z", "F", "G")) -> int:
    mats = [gate(d, g).matrix for g in gens]
    start = np.eye(d, dtype=complex)
    seen = {_key(start)}
    frontier = deque([start])
    while frontier:
        m = frontier.popleft()
        for g in mats:
            nxt = canonical_phase(g @ m)
            k = _key(nxt)
            if k not in seen:
                seen.add(k)
                if len(seen) > cap:
                    raise CapExceeded(f"closure exceeded cap {cap}")
                frontier.append(nxt)
    return len(seen)


def expected_clifford_order(d: int) -> int:
    """d^2 |SL(2, Z_d)| = d^5 prod_{p | d} (1 - p^-2)."""
    n = d ** 5
    for p in range(2, d + 1):
        if d % p == 0 and all(p % r for r in range(2, p)):
            n = n * (p * p - 1) // (p * p)
    return n


# Teleportation ------------------------------------------------------------------

@dataclass(frozen=True)
class CorrectionFamily:
    """W(a,b) = X^(xa*a + xb*b) Z^(za*a + zb*b) (F^2)^c, rightmost applied first."""
    xa: int
    xb: int
    za: int
    zb: int
    c: int

    def describe(self, a: int, b: int, d: int) -> str:
        x = (self.xa * a + self.xb * b) % d
        z = (self.za * a + self.zb * b) % d
        return f"X^{x} Z^{z} F2^{self.c}"

    def matrix(self, d: int, a: int, b: int) -> np.ndarray:
        X, Z, F2 = (gate(d, n).matrix for n in ("X", "Z", "F2"))
        x = (self.xa * a + self.xb * b) % d
        z = (self.za * a + self.zb * b) % d
        return np.linalg.matrix_power(X, x) @ np.linalg.matrix_power(Z, z) @ np.linalg.matrix_power(F2, self.c)


# Frozen by calibrate_teleport(); see docs/conventions.md.
TELEPORT_CORRECTION = CorrectionFamily(xa=0, xb=1, za=-1, zb=0, c=0)


@dataclass(frozen=True)
class TeleportReport:
    d: int
    outcome: tuple[int, int]
    fidelity: float
    probability: float
    correction: str


def _bob_state(d: int, psi: np.ndarray, a: int, b: int) -> tuple[np.ndarray, float]:
    """Alice holds (input, half of B-); returns Bob's unnormalized state and its norm^2."""
    bell = resource_state(d, "BellMinus").vector.reshape(d, d)
    state = np.einsum("i,jk->ijk", psi, bell)  # wires: A0 input, A1, B
    cnot = gate(d, "CNOT").entries  # (target_out, control_out, target_in, control_in)
    state = np.einsum("tcTC,CTk->ctk", cnot, state)  # control A0, target A1
    F = gate(d, "F").matrix
    state = np.einsum("ai,itk->atk", F, state)
    bob = state[a % d, b % d, :]
    return bob, float(np.vdot(bob, bob).real)


def teleport_run(d: int, input_state, outcome: tuple[int, int], family: CorrectionFamily = TELEPORT_CORRECTION) -> TeleportReport:
    psi = np.asarray(input_state.vector if isinstance(input_state, Tensor) else input_state, dtype=complex).reshape(-1)
    if psi.shape != (d,):
        raise ShapeError(f"input must be a single qudit of dimension {d}")
    if abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ShapeError("input state must be unit norm")
    a, b = outcome
    bob, p = _bob_state(d, psi, a, b)
    if p < 1e-15:
        raise ImpossibleOutcome(f"outcome {outcome} has zero probability")
    bob = bob / np.sqrt(p)
    out = family.matrix(d, a, b) @ bob
    fid = float(abs(np.vdot(psi, out)) ** 2)
    return TeleportReport(d, (a % d, b % d), min(fid, 1.0), p, family.describe(a, b, d))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def calibrate_teleport(dims: Iterable[int] = range(2, 8), trials: int = 3, seed: int = 0) -> list[CorrectionFamily]:
    """All affine correction families with coefficients in {-1,0,1} that teleport perfectly."""
    rng = np.random.default_rng(seed)
    dims = list(dims)
    states = {d: [random_state(d, rng) for _ in range(trials)] for d in dims}
    good = []
    for xa, xb, za, zb in itertools.product((-1, 0, 1), repeat=4):
        for c in (0, 1):
            fam = CorrectionFamily(xa, xb, za, zb, c)
            if all(
                teleport_run(d, s, (a, b), fam).fidelity >= 1 - 1e-9
                for d in dims
                for s in states[d]
                for a in range(d)
                for b in range(d)
            ):
                good.append(fam)
    return good
