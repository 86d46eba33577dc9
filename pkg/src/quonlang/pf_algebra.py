"""Symbolic parafermion algebra PF_n of order d.

Elements are finite sums of normal-ordered monomials c_1^a1 ... c_n^an stored
as a mapping from exponent tuples to coefficients.  Reordering uses

    c_m c_m' = q c_m' c_m        (m < m')

so moving c_m'^a to the right of c_m^b (m < m') costs q^(-ab).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

import numpy as np

from .errors import AlgebraMismatch, OddSiteError, SiteError, TwistError
from .numerics import Tensor, roots

PRUNE = 1e-14

Exponents = tuple[int, ...]


class _NonHomogeneous:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NonHomogeneous"


NonHomogeneous = _NonHomogeneous()
ChargeValue = Union[int, _NonHomogeneous]


@dataclass(frozen=True, eq=False)
class PFElement:
    d: int
    n_sites: int
    terms: Mapping[Exponents, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean: dict[Exponents, complex] = {}
        for alpha, c in self.terms.items():
            if len(alpha) != self.n_sites:
                raise SiteError(f"exponent vector {alpha} has wrong length for {self.n_sites} sites")
            key = tuple(int(a) % self.d for a in alpha)
            clean[key] = clean.get(key, 0j) + complex(c)
        clean = {k: v for k, v in clean.items() if abs(v) >= PRUNE}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    # arithmetic sugar
    def __mul__(self, other):
        if isinstance(other, PFElement):
            return pf_mul(self, other)
        return pf_scale(self, other)

    def __rmul__(self, other):
        return pf_scale(self, other)

    def __add__(self, other: "PFElement") -> "PFElement":
        return pf_add(self, other)

    def __sub__(self, other: "PFElement") -> "PFElement":
        return pf_add(self, pf_scale(other, -1))

    def is_zero(self) -> bool:
        return not self.terms

    def close_to(self, other: "PFElement", tol: float = 1e-12) -> bool:
        diff = pf_add(self, pf_scale(other, -1))
        return all(abs(c) <= tol for c in diff.terms.values())

    def __eq__(self, other):
        return isinstance(other, PFElement) and self.d == other.d and self.n_sites == other.n_sites and self.close_to(other)

    __hash__ = None

    def __repr__(self):
        return f"PFElement(d={self.d}, {render(self)})"


def _check_pair(a: PFElement, b: PFElement) -> None:
    if a.d != b.d or a.n_sites != b.n_sites:
        raise AlgebraMismatch(f"PF({a.d},{a.n_sites}) vs PF({b.d},{b.n_sites})")


def pf_unit(d: int, n_sites: int) -> PFElement:
    return PFElement(d, n_sites, {(0,) * n_sites: 1.0})


def pf_zero(d: int, n_sites: int) -> PFElement:
    return PFElement(d, n_sites, {})


def pf_generator(d: int, n_sites: int, m: int, k: int = 1) -> PFElement:
    if not 1 <= m <= n_sites:
        raise SiteError(f"site {m} outside 1..{n_sites}")
    alpha = [0] * n_sites
    alpha[m - 1] = k % d
    return PFElement(d, n_sites, {tuple(alpha): 1.0})


def pf_monomial(d: int, alpha, coeff: complex = 1.0) -> PFElement:
    return PFElement(d, len(alpha), {tuple(alpha): coeff})


def pf_scale(a: PFElement, c: complex) -> PFElement:
    return PFElement(a.d, a.n_sites, {k: v * c for k, v in a.terms.items()})


def pf_add(a: PFElement, b: PFElement) -> PFElement:
    _check_pair(a, b)
    out = dict(a.terms)
    for k, v in b.terms.items():
        out[k] = out.get(k, 0j) + v
    return PFElement(a.d, a.n_sites, out)


def _mono_phase(alpha: Exponents, beta: Exponents, d: int) -> int:
    """Exponent e with c^alpha c^beta = q^e c^(alpha+beta)."""
    e = 0
    n = len(alpha)
    suffix = 0  # sum of alpha_m' for m' > m
    for m in range(n - 1, -1, -1):
        e -= beta[m] * suffix
        suffix += alpha[m]
    return e % d


def pf_mul(a: PFElement, b: PFElement) -> PFElement:
    _check_pair(a, b)
    rs = roots(a.d)
    out: dict[Exponents, complex] = {}
    for alpha, ca in a.terms.items():
        for beta, cb in b.terms.items():
            gamma = tuple((x + y) % a.d for x, y in zip(alpha, beta))
            out[gamma] = out.get(gamma, 0j) + ca * cb * rs.qpow(_mono_phase(alpha, beta, a.d))
    return PFElement(a.d, a.n_sites, out)


def pf_adjoint(a: PFElement) -> PFElement:
    """Reverse each monomial factor by factor, conjugate, then re-normal-order."""
    d, n = a.d, a.n_sites
    total = pf_zero(d, n)
    for alpha, c in a.terms.items():
        acc = pf_unit(d, n)
        for m in range(n - 1, -1, -1):
            if alpha[m]:
                acc = pf_mul(acc, pf_generator(d, n, m + 1, d - alpha[m]))
        total = pf_add(total, pf_scale(acc, np.conj(c)))
    return total


def pf_charge(a: PFElement) -> ChargeValue:
    if not a.terms:
        return 0
    totals = {sum(alpha) % a.d for alpha in a.terms}
    if len(totals) == 1:
        return totals.pop()
    return NonHomogeneous


def _support(a: PFElement) -> set[int]:
    return {m for alpha in a.terms for m, x in enumerate(alpha) if x}


def pf_twisted_mul(a: PFElement, b: PFElement) -> PFElement:
    """zeta^(-|a||b|) a b for a supported strictly left of b.

    Charges enter through their reduced representatives in 0..d-1.
    """
    _check_pair(a, b)
    ka, kb = pf_charge(a), pf_charge(b)
    if ka is NonHomogeneous or kb is NonHomogeneous:
        raise TwistError("twisted product needs charge-homogeneous factors")
    sa, sb = _support(a), _support(b)
    if sa and sb and max(sa) >= min(sb):
        raise TwistError("twisted product needs the left factor strictly left of the right one")
    rs = roots(a.d)
    return pf_scale(pf_mul(a, b), rs.zpow(-ka * kb))


# Jordan-Wigner representation -------------------------------------------------

def _clock_shift(d: int):
    rs = roots(d)
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag([rs.qpow(k) for k in range(d)])
    return X, Z, rs


def jw_generators(d: int, n_pairs: int) -> list[np.ndarray]:
    """Matrices of c_1..c_2n on (C^d)^n.

    c_(2j-1) = Z^-1 x..x Z^-1 x X       x 1 x..
    c_(2j)   = zeta Z^-1 x..x Z^-1 x X Z^-1 x 1 x..
    """
    X, Z, rs = _clock_shift(d)
    Zi = Z.conj()
    eye = np.eye(d)
    gens = []
    for j in range(n_pairs):
        for local, phase in ((X, 1.0), (X @ Zi, rs.zeta)):
            mats = [Zi] * j + [local] + [eye] * (n_pairs - j - 1)
            out = np.array([[1.0 + 0j]])
            for m in mats:
                out = np.kron(out, m)
            gens.append(phase * out)
    return gens


def jw_rep(a: PFElement) -> Tensor:
    if a.n_sites % 2:
        raise OddSiteError(f"Jordan-Wigner needs an even site count, got {a.n_sites}")
    d, n_pairs = a.d, a.n_sites // 2
    dim = d ** n_pairs
    gens = jw_generators(d, n_pairs)
    powers = [[np.linalg.matrix_power(g, k) for k in range(d)] for g in gens]
    out = np.zeros((dim, dim), dtype=complex)
    for alpha, c in a.terms.items():
        m = np.eye(dim, dtype=complex)
        for site, k in enumerate(alpha):
            if k:
                m = m @ powers[site][k]
        out += c * m
    return Tensor.from_matrix(d, out, n_pairs, n_pairs)


def all_monomials(d: int, n_sites: int):
    for alpha in np.ndindex(*((d,) * n_sites)):
        yield pf_monomial(d, alpha)


def render(a: PFElement, digits: int = 6) -> str:
    if not a.terms:
        return "0"
    parts = []
    for alpha, c in a.terms.items():
        coeff = _fmt_complex(c, digits)
        gens = " ".join(f"c{m + 1}^{k}" for m, k in enumerate(alpha) if k)
        parts.append(f"{coeff} * {gens}" if gens else coeff)
    return " + ".join(parts)


def _fmt_complex(c: complex, digits: int) -> str:
    re, im = round(c.real, digits) + 0.0, round(c.imag, digits) + 0.0
    return f"({re:g}{im:+g}i)"
