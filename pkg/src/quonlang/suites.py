"""Built-in verification suites, one per checked property family.

Each suite returns ``CheckRecord`` rows.  Oracles are computed independently of
the code under test wherever that is possible (explicit index formulas, BFS
counts against the SL(2, Z_d) order, dense matrix identities).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import pf_algebra as pf
from . import quon_calculus as qc
from . import spider_engine as se
from .errors import QuonError
from .numerics import DEFAULT_EPS, Tensor, compare_up_to_scalar, roots
from .qudit_core import (
    TELEPORT_CORRECTION,
    calibrate_teleport,
    clifford_order,
    expected_clifford_order,
    gate,
    random_state,
    resource_state,
    teleport_run,
)


@dataclass(frozen=True)
class CheckRecord:
    name: str
    status: str  # pass | fail | error
    max_error: float
    scalar: Optional[complex] = None
    runtime_ms: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class _Recorder:
    def __init__(self, tol: float):
        self.tol = tol
        self.rows: list[CheckRecord] = []

    def add(self, name: str, err: float, scalar=None, tol: Optional[float] = None, detail: str = "", t0: float = 0.0):
        tol = self.tol if tol is None else tol
        ok = bool(np.isfinite(err) and err <= tol)
        ms = (time.perf_counter() - t0) * 1000 if t0 else 0.0
        self.rows.append(CheckRecord(name, "pass" if ok else "fail", float(err), scalar, ms, detail))

    def flag(self, name: str, ok: bool, detail: str = "", scalar=None, t0: float = 0.0):
        ms = (time.perf_counter() - t0) * 1000 if t0 else 0.0
        self.rows.append(CheckRecord(name, "pass" if ok else "fail", 0.0 if ok else 1.0, scalar, ms, detail))

    def run(self, name: str, fn: Callable[[], None]):
        t0 = time.perf_counter()
        try:
            fn()
        except QuonError as exc:
            self.rows.append(CheckRecord(name, "error", math.inf, None, (time.perf_counter() - t0) * 1000, f"{type(exc).__name__}: {exc}"))


def _pf_dev(a: pf.PFElement, b: pf.PFElement) -> float:
    diff = pf.pf_add(a, pf.pf_scale(b, -1))
    return max((abs(c) for c in diff.terms.values()), default=0.0)


def _random_element(d: int, n: int, rng: np.random.Generator, terms: int = 3) -> pf.PFElement:
    out = pf.pf_zero(d, n)
    for _ in range(terms):
        alpha = tuple(int(x) for x in rng.integers(0, d, size=n))
        out = pf.pf_add(out, pf.pf_monomial(d, alpha, complex(rng.normal(), rng.normal())))
    return out


def _random_homogeneous(d: int, n: int, charge: int, rng: np.random.Generator) -> pf.PFElement:
    out = pf.pf_zero(d, n)
    for _ in range(3):
        alpha = [int(x) for x in rng.integers(0, d, size=n)]
        alpha[-1] = (charge - sum(alpha[:-1])) % d
        out = pf.pf_add(out, pf.pf_monomial(d, alpha, complex(rng.normal(), rng.normal())))
    return out


# ---------------------------------------------------------------------------
# 1, 2: parafermions and Jordan-Wigner


def parafermion_suite(dims: Iterable[int], tol: float = DEFAULT_EPS, seed: int = 0, samples: int = 20) -> list[CheckRecord]:
    rec = _Recorder(tol)
    rng = np.random.default_rng(seed)
    for d in dims:
        rs = roots(d)
        for n in (1, 2, 3, 4):
            t0 = time.perf_counter()
            one = pf.pf_unit(d, n)
            err = 0.0
            for m in range(1, n + 1):
                c = pf.pf_generator(d, n, m)
                cd = one
                for _ in range(d):
                    cd = pf.pf_mul(cd, c)
                err = max(err, _pf_dev(cd, one), _pf_dev(pf.pf_mul(c, pf.pf_adjoint(c)), one))
                for mm in range(m + 1, n + 1):
                    c2 = pf.pf_generator(d, n, mm)
                    err = max(err, _pf_dev(pf.pf_mul(c, c2), pf.pf_scale(pf.pf_mul(c2, c), rs.q)))
            rec.add(f"pf/relations/d={d}/n={n}", err, t0=t0)

            t0 = time.perf_counter()
            err = 0.0
            for m, mm in itertools.combinations(range(1, n + 1), 2):
                for k, l in itertools.product(range(d), repeat=2):
                    a, b = pf.pf_generator(d, n, m, k), pf.pf_generator(d, n, mm, l)
                    err = max(err, _pf_dev(pf.pf_mul(a, b), pf.pf_scale(pf.pf_mul(b, a), rs.qpow(k * l))))
            rec.add(f"pf/para-isotopy/d={d}/n={n}", err, t0=t0)

            if n >= 2:
                t0 = time.perf_counter()
                err = 0.0
                for split in range(1, n):
                    for k, l in itertools.product(range(d), repeat=2):
                        left = pf.pf_generator(d, n, split, k)
                        right = pf.pf_generator(d, n, split + 1, l)
                        tw = pf.pf_twisted_mul(left, right)
                        # equal-height product is symmetric: zeta^-kl ab = zeta^kl ba
                        err = max(err, _pf_dev(tw, pf.pf_scale(pf.pf_mul(right, left), rs.zpow(k * l))))
                        err = max(err, _pf_dev(tw, pf.pf_scale(pf.pf_mul(left, right), rs.zpow(-k * l))))
                rec.add(f"pf/twisted-product/d={d}/n={n}", err, t0=t0)

            t0 = time.perf_counter()
            err, charge_ok = 0.0, True
            for _ in range(samples):
                a, b = _random_element(d, n, rng), _random_element(d, n, rng)
                err = max(err, _pf_dev(pf.pf_adjoint(pf.pf_adjoint(a)), a))
                err = max(err, _pf_dev(pf.pf_adjoint(pf.pf_mul(a, b)), pf.pf_mul(pf.pf_adjoint(b), pf.pf_adjoint(a))))
                ka, kb = (int(x) for x in rng.integers(0, d, size=2))
                ha, hb = _random_homogeneous(d, n, ka, rng), _random_homogeneous(d, n, kb, rng)
                prod = pf.pf_mul(ha, hb)
                charge_ok &= prod.is_zero() or pf.pf_charge(prod) == (ka + kb) % d
            rec.add(f"pf/adjoint/d={d}/n={n}", err, t0=t0)
            rec.flag(f"pf/charge-additivity/d={d}/n={n}", charge_ok)

            if n % 2 == 0:
                t0 = time.perf_counter()
                err = 0.0
                for _ in range(samples // 2):
                    a, b = _random_element(d, n, rng), _random_element(d, n, rng)
                    ja, jb = pf.jw_rep(a).matrix, pf.jw_rep(b).matrix
                    err = max(err, float(np.max(np.abs(pf.jw_rep(pf.pf_mul(a, b)).matrix - ja @ jb))))
                    err = max(err, float(np.max(np.abs(pf.jw_rep(pf.pf_adjoint(a)).matrix - ja.conj().T))))
                rec.add(f"pf/jw-rep/d={d}/n={n}", err, t0=t0)
    return rec.rows


def jordan_wigner_suite(dims: Iterable[int] = (2, 3), pairs: Sequence[int] = (1, 2), tol: float = DEFAULT_EPS) -> list[CheckRecord]:
    rec = _Recorder(tol)
    for d in dims:
        for npairs in pairs:
            t0 = time.perf_counter()
            n = 2 * npairs
            monos = list(pf.all_monomials(d, n))
            mats = [pf.jw_rep(m).matrix for m in monos]
            rank = np.linalg.matrix_rank(np.stack([m.reshape(-1) for m in mats]), tol=1e-9)
            rec.flag(f"jw/independence/d={d}/pairs={npairs}", rank == d ** n, detail=f"rank {rank} of {d ** n}", t0=t0)
            t0 = time.perf_counter()
            index = {next(iter(m.terms)): i for i, m in enumerate(monos)}
            err = 0.0
            for a, ma in zip(monos, mats):
                for b, mb in zip(monos, mats):
                    ab = pf.pf_mul(a, b)
                    (key, coeff), = ab.terms.items()
                    err = max(err, float(np.max(np.abs(coeff * mats[index[key]] - ma @ mb))))
            rec.add(f"jw/multiplicativity/d={d}/pairs={npairs}", err, t0=t0)
    return rec.rows


# ---------------------------------------------------------------------------
# 3: Clifford census


def clifford_suite(dims: Iterable[int] = (2, 3), cap: int = 100_000) -> list[CheckRecord]:
    rec = _Recorder(0.0)
    for d in dims:
        t0 = time.perf_counter()
        try:
            got = clifford_order(d, cap)
        except QuonError as exc:
            rec.rows.append(CheckRecord(f"clifford/order/d={d}", "error", math.inf, None, 0.0, str(exc)))
            continue
        want = expected_clifford_order(d)
        rec.flag(f"clifford/order/d={d}", got == want, detail=f"{got} (expected {want})", scalar=complex(got), t0=t0)
    return rec.rows


# ---------------------------------------------------------------------------
# 4: quon bases, Pauli pictures, braids, word search

PAULI_WORDS = {"Z": "c1:1 c2:-1", "X": "c1:1 c4:-1", "Y": "c1:-1 c3:1"}


def quon_suite(dims: Iterable[int], tol: float = DEFAULT_EPS) -> list[CheckRecord]:
    rec = _Recorder(tol)
    for d in dims:
        eye = np.eye(d)
        for axis in ("Z", "X", "Y"):
            t0 = time.perf_counter()
            B = qc.basis_matrix(d, axis)
            gram = float(np.max(np.abs(B.conj().T @ B - eye)))
            D = B.conj().T @ gate(d, axis).matrix @ B
            offdiag = float(np.max(np.abs(D - np.diag(np.diag(D)))))
            rec.add(f"quon/basis-{axis}/d={d}", max(gram, offdiag), t0=t0)
        for name, word in PAULI_WORDS.items():
            t0 = time.perf_counter()
            w = qc.eval_word(qc.parse_word(d, word))
            lam = compare_up_to_scalar(w, gate(d, name), tol)
            err = math.inf if lam is None else abs(abs(lam) - 1)
            rec.add(f"quon/pauli-{name}/d={d}", err, scalar=lam, t0=t0)
        t0 = time.perf_counter()
        b = {(i, s): qc.braid_matrix(d, i, s).matrix for i in (1, 2, 3) for s in (1, -1)}
        unit = max(float(np.max(np.abs(m.conj().T @ m - eye))) for m in b.values())
        r2 = max(float(np.max(np.abs(b[(i, 1)] @ b[(i, -1)] - eye))) for i in (1, 2, 3))
        yb = max(
            float(np.max(np.abs(b[(i, 1)] @ b[(i + 1, 1)] @ b[(i, 1)] - b[(i + 1, 1)] @ b[(i, 1)] @ b[(i + 1, 1)]))) for i in (1, 2)
        )
        rec.add(f"quon/braid-unitary/d={d}", unit, t0=t0)
        rec.add(f"quon/reidemeister-2/d={d}", r2)
        rec.add(f"quon/yang-baxter/d={d}", yb)
        for target, limit in (("F", 4), ("G", 2)):
            t0 = time.perf_counter()
            try:
                word = qc.find_word(d, gate(d, target), limit, tol)
                lam = compare_up_to_scalar(qc.eval_word(word), gate(d, target), tol)
                rec.flag(f"quon/word-{target}/d={d}", len(word) <= limit, detail=str(word), scalar=lam, t0=t0)
            except QuonError as exc:
                rec.rows.append(CheckRecord(f"quon/word-{target}/d={d}", "fail", math.inf, None, 0.0, str(exc)))
        t0 = time.perf_counter()
        fs = qc.string_fourier(d)
        lam = compare_up_to_scalar(fs, gate(d, "F"), tol)
        lam2 = compare_up_to_scalar(fs @ fs, gate(d, "F2"), tol)
        rec.add(f"quon/string-fourier/d={d}", math.inf if lam is None else abs(abs(lam) - 1), scalar=lam, t0=t0)
        rec.add(f"quon/string-fourier-squared/d={d}", math.inf if lam2 is None else abs(abs(lam2) - 1), scalar=lam2)
        t0 = time.perf_counter()
        total = sum(qc.eval_network(qc.completeness_network(d, j)).matrix for j in range(d)) / math.sqrt(d)
        rec.add(f"quon/completeness/d={d}", float(np.max(np.abs(total - eye))), t0=t0)
    return rec.rows


# ---------------------------------------------------------------------------
# 5: joint relation


def joint_suite(dims: Iterable[int] = (2, 3), sizes: Sequence[int] = (1, 2), trials: int = 50, tol: float = DEFAULT_EPS, seed: int = 0) -> list[CheckRecord]:
    rec = _Recorder(tol)
    rng = np.random.default_rng(seed)
    for d in dims:
        for m, n in itertools.product(sizes, repeat=2):
            t0 = time.perf_counter()
            worst = 0.0
            for t in range(trials):
                T = Tensor.from_matrix(d, rng.normal(size=(d ** n, d ** m)) + 1j * rng.normal(size=(d ** n, d ** m)), n, m)
                r = qc.joint_check(d, m, n, T, qc.random_basis(d, m, rng), qc.random_basis(d, n, rng), seed=int(rng.integers(1 << 31)))
                worst = max(worst, r.deviation, r.invariance)
            rec.add(f"joint/d={d}/m={m}/n={n}", worst, t0=t0)
    return rec.rows


# ---------------------------------------------------------------------------
# 6: circles and genus


def genus_suite(dims: Iterable[int], tol: float = DEFAULT_EPS) -> list[CheckRecord]:
    rec = _Recorder(tol)
    for d in dims:
        sd = math.sqrt(d)
        ev = lambda net: qc.eval_network(net)
        circle = ev(qc.StringNetwork(d, loops=(qc.Loop(),))).vector[0]
        rec.add(f"genus/neutral-circle/d={d}", abs(circle - sd), scalar=circle)
        charged = max(abs(ev(qc.StringNetwork(d, loops=(qc.Loop((g,)),))).vector[0]) for g in range(1, d))
        rec.add(f"genus/charged-circle/d={d}", charged)
        ident = np.eye(d)
        for strands in (1, 3):
            v = ev(qc.genus_network(d, strands)).matrix
            rec.add(f"genus/odd-{strands}/d={d}", float(np.max(np.abs(v - ident / sd))), scalar=1 / sd)
        for strands in (2, 4):
            v = ev(qc.genus_network(d, strands)).matrix
            rec.add(f"genus/even-{strands}/d={d}", float(np.max(np.abs(v))))
        t0 = time.perf_counter()
        sq, _ = se.hopf_square(d)
        ratio = se.hopf_top_view_ratio(d)
        rec.add(f"genus/hopf-top-view/d={d}", abs(ratio - 1 / sd), scalar=ratio, t0=t0)
        rec.add(f"genus/hopf-tensor/d={d}", se.eval_tensor(sq).max_dev(se.eval_tensor(se.hopf_path(d))))
    return rec.rows


# ---------------------------------------------------------------------------
# 7: Hopf / Frobenius rules


def hopf_suite(dims: Iterable[int], tol: float = DEFAULT_EPS) -> list[CheckRecord]:
    rec = _Recorder(tol)
    for r in se.rule_suite(list(dims), tol):
        rec.add(f"hopf/{r.rule}/{r.case}/d={r.d}", r.deviation, scalar=r.scalar)
    return rec.rows


# ---------------------------------------------------------------------------
# 8, 9: CNOT and resource states


def cnot_oracle(d: int) -> np.ndarray:
    m = np.zeros((d * d, d * d))
    for k, j in itertools.product(range(d), repeat=2):
        m[((k + j) % d) * d + j, k * d + j] = 1
    return m


def _top_view(rec: _Recorder, name: str, diag: se.SpiderDiagram):
    def go():
        t0 = time.perf_counter()
        a = se.top_view_exponent(diag)
        rec.flag(name, True, detail=f"a = {a}", scalar=complex(diag.d ** (a / 2)), t0=t0)

    rec.run(name, go)


def cnot_suite(dims: Iterable[int], top_dims: Iterable[int] = (2, 3)) -> list[CheckRecord]:
    rec = _Recorder(1e-12)
    for d in dims:
        t0 = time.perf_counter()
        got = se.eval_tensor(se.cnot_diagram(d)).matrix
        rec.add(f"cnot/spider/d={d}", float(np.max(np.abs(got - cnot_oracle(d)))), t0=t0)
    for d in top_dims:
        _top_view(rec, f"cnot/top-view/d={d}", se.cnot_diagram(d))
    return rec.rows


def resource_suite(dims: Iterable[int], top_dims: Iterable[int] = (2, 3), tol: float = DEFAULT_EPS) -> list[CheckRecord]:
    rec = _Recorder(tol)
    for d in dims:
        bp, bm = resource_state(d, "BellPlus"), resource_state(d, "BellMinus")
        f2 = Tensor.identity(d).kron(gate(d, "F2"))
        rec.add(f"resource/bell-minus/d={d}", (f2 @ bp).max_dev(bm))
        rec.add(f"resource/max2/d={d}", resource_state(d, "Max", 2).max_dev(bm))
        # GHZ(3) and Max(3) against explicit index formulas
        ghz = np.zeros((d,) * 3)
        mx = np.zeros((d,) * 3)
        for a, b, c in itertools.product(range(d), repeat=3):
            ghz[a, b, c] = float(a == b == c) / math.sqrt(d)
            mx[a, b, c] = float((a + b + c) % d == 0) / d
        rec.add(f"resource/ghz3/d={d}", float(np.max(np.abs(resource_state(d, "GHZ", 3).entries - ghz))))
        rec.add(f"resource/max3/d={d}", float(np.max(np.abs(resource_state(d, "Max", 3).entries - mx))))
    for d in top_dims:
        _top_view(rec, f"resource/top-view-ghz3/d={d}", se.with_scalar(se.black(d, 0, 3), d ** -0.5))
        _top_view(rec, f"resource/top-view-max3/d={d}", se.with_scalar(se.white(d, 0, 3), 1 / d))
        _top_view(rec, f"resource/top-view-copy/d={d}", se.black(d, 1, 2))
    return rec.rows


# ---------------------------------------------------------------------------
# 10: teleportation


def teleport_suite(dims: Iterable[int] = range(2, 8), trials: int = 20, seed: int = 0, tol: float = DEFAULT_EPS) -> list[CheckRecord]:
    rec = _Recorder(tol)
    rng = np.random.default_rng(seed)
    for d in dims:
        t0 = time.perf_counter()
        worst = 0.0
        for _ in range(trials):
            psi = random_state(d, rng)
            for a, b in itertools.product(range(d), repeat=2):
                worst = max(worst, 1 - teleport_run(d, psi, (a, b)).fidelity)
        rec.add(f"teleport/fidelity/d={d}", worst, t0=t0)
    t0 = time.perf_counter()
    fams = [calibrate_teleport(range(2, 6), trials=2, seed=s) for s in (seed, seed + 1)]
    ok = all(f == [TELEPORT_CORRECTION] for f in fams)
    rec.flag("teleport/correction-family", ok, detail=str(fams[0]), t0=t0)
    return rec.rows


# ---------------------------------------------------------------------------
# registry

SUITES = ("pf", "jw", "clifford", "quon", "joint", "genus", "hopf", "cnot", "resource", "teleport")
DEFAULT_DIMS = (2, 3, 4, 5)


def run_suite(name: str, dims: Optional[Sequence[int]] = None, tol: float = DEFAULT_EPS, seed: int = 0, cap: int = 100_000) -> list[CheckRecord]:
    """Run one suite.  ``dims=None`` uses the dimensions fixed for that property."""
    sweep = list(dims) if dims else list(DEFAULT_DIMS)
    small = [d for d in sweep if d in (2, 3)] or [2, 3]
    if name == "pf":
        return parafermion_suite(sweep, tol, seed)
    if name == "jw":
        return jordan_wigner_suite(small, tol=tol)
    if name == "clifford":
        return clifford_suite(list(dims) if dims else [2, 3], cap)
    if name == "quon":
        return quon_suite(sweep, tol)
    if name == "joint":
        return joint_suite(small, tol=tol, seed=seed)
    if name == "genus":
        return genus_suite(sweep, tol)
    if name == "hopf":
        return hopf_suite(sweep, tol)
    if name == "cnot":
        return cnot_suite(sweep, small)
    if name == "resource":
        return resource_suite(sweep, small, tol)
    if name == "teleport":
        return teleport_suite(sorted(set(range(2, 8)) | set(dims or [])), seed=seed, tol=tol)
    raise KeyError(f"unknown suite {name!r}")
