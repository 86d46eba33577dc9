"""The four-string quon model on the 1-quon space.

Two charts are used.

* The charged chart W = C^d x C^d is the Jordan-Wigner module of PF_4.  The
  basis vector |a, b> means the cap over strands (1,2) carries charge a and the
  cap over (3,4) carries b.  Charges and braids act here.
* Z-pairing coordinates are the neutral vectors e_k = q^(2k) |k, -k>.  The
  phase q^(2k) is the recorded basis convention (docs/conventions.md); with it
  the rotation word b1 b2 b3 equals F up to a global phase.

Braids come from the algebraic expansion of a crossing in charged strings:
b_i = omega^(1/2) d^(-1/2) sum_k zeta^(-k^2) u_i^k with u_i = zeta c_(i+1)^-1 c_i.

``eval_network`` is a phase-free planar evaluator for networks whose charges
cancel without reordering.  It covers bases, norms, circles, genus marks,
crossings inside a cup pair and the spider pictures.
"""

from __future__ import annotations

import cmath
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import BasisError, GraphError, NonCancellingCharges, NonNeutralWord, NotFound, ShapeError
from .numerics import DEFAULT_EPS, Tensor, compare_up_to_scalar, roots
from .pf_algebra import PFElement, jw_rep, pf_add, pf_adjoint, pf_generator, pf_mul, pf_scale, pf_unit
from .qudit_core import gate

# ---------------------------------------------------------------------------
# charts


def neutral_index(d: int, k: int) -> int:
    return (k % d) * d + (-k) % d


def basis_phases(d: int) -> np.ndarray:
    """Diagonal of the charged-chart phase convention, indexed like W."""
    rs = roots(d)
    return np.array([rs.qpow(2 * a) for a in range(d) for _ in range(d)])


def neutral_embedding(d: int) -> np.ndarray:
    """d^2 x d matrix sending Z-pairing coordinates into the charged chart."""
    P = np.zeros((d * d, d))
    for k in range(d):
        P[neutral_index(d, k), k] = 1
    return P


def _to_chart(d: int, m: np.ndarray) -> np.ndarray:
    s = basis_phases(d)
    return (s.conj()[:, None] * m) * s[None, :]


def charge_element(d: int, strand: int, g: int) -> PFElement:
    return pf_generator(d, 4, strand, g)


def braid_element(d: int, i: int, sign: int = 1) -> PFElement:
    """The crossing of strands (i, i+1) as an element of PF_4."""
    if i not in (1, 2, 3):
        raise ShapeError(f"braid position {i} outside 1..3")
    rs = roots(d)
    u = pf_scale(pf_mul(pf_generator(d, 4, i + 1, -1), pf_generator(d, 4, i, 1)), rs.zeta)
    b = pf_scale(pf_unit(d, 4), 0)
    power = pf_unit(d, 4)
    for k in range(d):
        b = pf_add(b, pf_scale(power, rs.zpow(-k * k)))
        power = pf_mul(power, u)
    b = pf_scale(b, cmath.sqrt(rs.omega) / rs.sqrt_d)
    return b if sign > 0 else pf_adjoint(b)


def charge_matrix(d: int, strand: int, g: int) -> Tensor:
    """Charge g at the bottom of a strand, acting on the charged chart (2 legs)."""
    if strand not in (1, 2, 3, 4):
        raise ShapeError(f"strand {strand} outside 1..4")
    m = jw_rep(charge_element(d, strand, g)).matrix
    return Tensor.from_matrix(d, _to_chart(d, m), 2, 2)


def braid_operator(d: int, i: int, sign: int = 1) -> Tensor:
    """Crossing of strands (i, i+1) on the charged chart (2 legs)."""
    m = jw_rep(braid_element(d, i, sign)).matrix
    return Tensor.from_matrix(d, _to_chart(d, m), 2, 2)


def restrict_neutral(d: int, op: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    P = neutral_embedding(d)
    r = P.T @ op @ P
    if np.max(np.abs(op @ P - P @ r)) > tol:
        raise NonNeutralWord("operator does not preserve the neutral 1-quon subspace")
    return r


def braid_matrix(d: int, i: int, sign: int = 1) -> Tensor:
    return Tensor.from_matrix(d, restrict_neutral(d, braid_operator(d, i, sign).matrix), 1, 1)


# ---------------------------------------------------------------------------
# strand words


@dataclass(frozen=True)
class Braid:
    i: int
    sign: int = 1

    def __post_init__(self):
        if self.i not in (1, 2, 3) or self.sign not in (1, -1):
            raise ShapeError(f"bad braid generator ({self.i}, {self.sign})")

    def token(self) -> str:
        return f"b{self.i}" + ("" if self.sign > 0 else "'")


@dataclass(frozen=True)
class Charge:
    strand: int
    g: int

    def __post_init__(self):
        if self.strand not in (1, 2, 3, 4):
            raise ShapeError(f"bad charge strand {self.strand}")

    def token(self) -> str:
        return f"c{self.strand}:{self.g}"


Generator = Union[Braid, Charge]


@dataclass(frozen=True)
class StrandWord:
    d: int
    gens: tuple[Generator, ...] = ()

    def __post_init__(self):
        gens = tuple(Charge(g.strand, g.g % self.d) if isinstance(g, Charge) else g for g in self.gens)
        object.__setattr__(self, "gens", gens)

    def __str__(self):
        return " ".join(g.token() for g in self.gens)

    def __len__(self):
        return len(self.gens)


_TOKEN = re.compile(r"^(?:b([123])('?)|c([1-4]):([+-]?\d+))$")


def parse_word(d: int, text: str) -> StrandWord:
    gens: list[Generator] = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"bad strand-word token {tok!r}")
        if m.group(1):
            gens.append(Braid(int(m.group(1)), -1 if m.group(2) else 1))
        else:
            gens.append(Charge(int(m.group(3)), int(m.group(4))))
    return StrandWord(d, tuple(gens))


def _generator_operator(d: int, g: Generator) -> np.ndarray:
    if isinstance(g, Braid):
        return braid_operator(d, g.i, g.sign).matrix
    return charge_matrix(d, g.strand, g.g).matrix


def word_operator(word: StrandWord) -> np.ndarray:
    d = word.d
    m = np.eye(d * d, dtype=complex)
    for g in word.gens:
        m = _generator_operator(d, g) @ m
    return m


def eval_word(word: StrandWord) -> Tensor:
    """First generator applied first; the product must be neutral overall."""
    return Tensor.from_matrix(word.d, restrict_neutral(word.d, word_operator(word)), 1, 1)


BRAID_ALPHABET = (Braid(1, 1), Braid(1, -1), Braid(2, 1), Braid(2, -1), Braid(3, 1), Braid(3, -1))


def find_word(d: int, target: Tensor, max_len: int, tol: float = DEFAULT_EPS) -> StrandWord:
    """Shortest braid word matching target up to a global phase (fixed enumeration order)."""
    if target.shape != (d, 1, 1):
        raise ShapeError("target must be a one-qudit operator")
    P = neutral_embedding(d)
    ops = [braid_operator(d, g.i, g.sign).matrix for g in BRAID_ALPHABET]
    for length in range(max_len + 1):
        for combo in itertools.product(range(len(ops)), repeat=length):
            m = np.eye(d * d, dtype=complex)
            for j in combo:
                m = ops[j] @ m
            r = P.T @ m @ P
            if np.max(np.abs(m @ P - P @ r)) > tol:
                continue
            lam = compare_up_to_scalar(Tensor.from_matrix(d, r, 1, 1), target, tol)
            if lam is not None and abs(abs(lam) - 1) <= 1e-6:
                return StrandWord(d, tuple(BRAID_ALPHABET[j] for j in combo))
    raise NotFound(f"no braid word of length <= {max_len} matches the target")


ROTATION_WORD = "b1 b2 b3"


def string_fourier(d: int) -> Tensor:
    """The 90 degree rotation: strand 1 carried across to position 4."""
    return eval_word(parse_word(d, ROTATION_WORD))


def string_fourier_phase(d: int) -> complex:
    lam = compare_up_to_scalar(string_fourier(d), gate(d, "F"))
    if lam is None:
        raise NotFound("rotation does not match F")
    return lam


# ---------------------------------------------------------------------------
# string networks

Endpoint = tuple


@dataclass(frozen=True)
class Arc:
    a: Endpoint
    b: Endpoint
    charges: tuple[int, ...] = ()  # oriented a -> b


@dataclass(frozen=True)
class Loop:
    """A free closed string.  ``genus`` is the number of strands through the
    handle it encircles, or None for a contractible circle."""
    charges: tuple[int, ...] = ()
    genus: Optional[int] = None


@dataclass(frozen=True)
class Crossing:
    sign: int = 1


@dataclass(frozen=True)
class Twist:
    """A boxed 1-quon operator standing between two quon slots (F-boxes)."""
    power: int = 1


@dataclass(frozen=True)
class StringNetwork:
    d: int
    outputs: tuple[int, ...] = ()
    inputs: tuple[int, ...] = ()
    arcs: tuple[Arc, ...] = ()
    loops: tuple[Loop, ...] = ()
    crossings: tuple[Crossing, ...] = ()
    twists: tuple[Twist, ...] = ()
    scalar: complex = 1.0
    genus_marks: int = 0  # standalone annotations, d^(-1/2) each
    handles: int = 0  # label-free loops that encircle a handle of the manifold

    def quons(self) -> tuple[int, ...]:
        return self.outputs + self.inputs

    def validate(self) -> None:
        ends: dict[Endpoint, int] = {}
        for arc in self.arcs:
            for e in (arc.a, arc.b):
                ends[e] = ends.get(e, 0) + 1
        expected = {("q", t, c) for t in self.quons() for c in (1, 2, 3, 4)}
        expected |= {("x", x, p) for x in range(len(self.crossings)) for p in ("bl", "br", "tl", "tr")}
        expected |= {("w", w, s, c) for w in range(len(self.twists)) for s in ("in", "out") for c in (1, 2, 3, 4)}
        # internal joints ("j", ...) glue two pieces and are met exactly twice
        joints = {k: v for k, v in ends.items() if k[0] == "j"}
        ends = {k: v for k, v in ends.items() if k[0] != "j"}
        if any(v != 2 for v in joints.values()):
            raise GraphError("internal joint endpoints must be used exactly twice")
        if set(ends) != expected or any(v != 1 for v in ends.values()):
            missing = sorted(map(str, expected - set(ends)))
            extra = sorted(map(str, set(ends) - expected))
            bad = sorted(str(k) for k, v in ends.items() if v != 1)
            raise GraphError(f"endpoints not used exactly once (missing {missing}, extra {extra}, repeated {bad})")
        if len(set(self.quons())) != len(self.quons()):
            raise GraphError("quon listed twice")


def z_picture(d: int, k: int = 0, quon: int = 0) -> StringNetwork:
    """The (unnormalized) Z-basis picture: cups (1,2) and (4,3) both carrying flow k."""
    arcs = (Arc(("q", quon, 1), ("q", quon, 2), (k % d,)), Arc(("q", quon, 4), ("q", quon, 3), (k % d,)))
    return StringNetwork(d, outputs=(quon,), arcs=arcs)


def x_picture(d: int, quon: int = 0) -> StringNetwork:
    """Neutral X-pairing picture: arcs (1,4) and (2,3)."""
    return StringNetwork(d, outputs=(quon,), arcs=(Arc(("q", quon, 1), ("q", quon, 4)), Arc(("q", quon, 2), ("q", quon, 3))))


def y_picture(d: int, quon: int = 0, sign: int = 1) -> StringNetwork:
    """Neutral Y-pairing picture: the X pairing with strands 1 and 2 crossed."""
    arcs = (
        Arc(("q", quon, 1), ("x", 0, "bl")),
        Arc(("q", quon, 2), ("x", 0, "br")),
        Arc(("x", 0, "tl"), ("q", quon, 4)),
        Arc(("x", 0, "tr"), ("q", quon, 3)),
    )
    return StringNetwork(d, outputs=(quon,), arcs=arcs, crossings=(Crossing(sign),))


def identity_network(d: int, out: int = 0, inp: int = 1) -> StringNetwork:
    arcs = tuple(Arc(("q", inp, c), ("q", out, c)) for c in (1, 2, 3, 4))
    return StringNetwork(d, outputs=(out,), inputs=(inp,), arcs=arcs)


def completeness_network(d: int, j: int, out: int = 0, inp: int = 1) -> StringNetwork:
    """Strands (1,2) replaced by a cap and a cup carrying flow j; strands 3, 4 straight."""
    arcs = (
        Arc(("q", inp, 1), ("q", inp, 2), (j % d,)),
        Arc(("q", out, 1), ("q", out, 2), (j % d,)),
        Arc(("q", inp, 3), ("q", out, 3)),
        Arc(("q", inp, 4), ("q", out, 4)),
    )
    return StringNetwork(d, outputs=(out,), inputs=(inp,), arcs=arcs)


def crossing_network(d: int, i: int, sign: int = 1, out: int = 0, inp: int = 1) -> StringNetwork:
    """One crossing of strands (i, i+1) between an input and an output quon."""
    arcs = [
        Arc(("q", inp, i), ("x", 0, "bl")),
        Arc(("q", inp, i + 1), ("x", 0, "br")),
        Arc(("x", 0, "tl"), ("q", out, i)),
        Arc(("x", 0, "tr"), ("q", out, i + 1)),
    ]
    arcs += [Arc(("q", inp, c), ("q", out, c)) for c in (1, 2, 3, 4) if c not in (i, i + 1)]
    return StringNetwork(d, outputs=(out,), inputs=(inp,), arcs=tuple(arcs), crossings=(Crossing(sign),))


def genus_network(d: int, strands: int, out: int = 0, inp: int = 1) -> StringNetwork:
    """Identity on one quon with a neutral circle around a handle pierced by ``strands`` strings."""
    base = identity_network(d, out, inp)
    return StringNetwork(d, base.outputs, base.inputs, base.arcs, loops=(Loop((), genus=strands),))


def _reduce_cyclic(forms: list[tuple[int, ...]], d: int) -> list[tuple[int, ...]]:
    seq = [f for f in forms if any(f)]
    changed = True
    while changed and len(seq) > 1:
        changed = False
        n = len(seq)
        for i in range(n):
            j = (i + 1) % n
            if all((x + y) % d == 0 for x, y in zip(seq[i], seq[j])):
                seq = [s for t, s in enumerate(seq) if t not in (i, j)]
                changed = True
                break
    return seq


def check_cancellable(forms: list[tuple[int, ...]], d: int) -> None:
    """Partner charges must meet by adjacent cancellation."""
    rest = _reduce_cyclic(forms, d)
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            if all((x + y) % d == 0 for x, y in zip(rest[i], rest[j])):
                raise NonCancellingCharges(
                    "opposite charges on a loop are separated; their para-isotopy phase is not tracked"
                )


def twist_matrix(d: int, power: int) -> np.ndarray:
    """Rotation matrix normalized to F exactly, raised to ``power``."""
    fs = string_fourier(d).matrix / string_fourier_phase(d)
    return np.linalg.matrix_power(fs, power % 4)


def eval_network(net: StringNetwork) -> Tensor:
    net.validate()
    d = net.d
    rs = roots(d)
    quons = net.quons()
    n_x, n_w = len(net.crossings), len(net.twists)
    # label layout: boundary quons, crossings, twist (in, out) pairs
    L = len(quons) + n_x + 2 * n_w
    lab_q = {t: i for i, t in enumerate(quons)}
    lab_x = {x: len(quons) + x for x in range(n_x)}
    lab_w = {(w, s): len(quons) + n_x + 2 * w + (0 if s == "in" else 1) for w in range(n_w) for s in ("in", "out")}

    def form(label: Optional[int] = None, const: int = 0, sign: int = 1) -> tuple[int, ...]:
        v = [0] * (L + 1)
        if label is not None:
            v[label] = sign % d
        v[L] = const % d
        return tuple(v)

    arcs: list[tuple[Endpoint, Endpoint, tuple[int, ...]]] = []
    for arc in net.arcs:
        arcs.append((arc.a, arc.b, form(const=sum(arc.charges))))

    def glue(slot, label):
        # Z-picture on a slot: flow label along 1->2 and 4->3
        arcs.append((slot(1), slot(2), form(label)))
        arcs.append((slot(4), slot(3), form(label)))

    for t in quons:
        glue(lambda c, t=t: ("q", t, c), lab_q[t])
    for w in range(n_w):
        for s in ("in", "out"):
            glue(lambda c, w=w, s=s: ("w", w, s, c), lab_w[(w, s)])
    for x in range(n_x):
        arcs.append((("x", x, "bl"), ("x", x, "br"), form(lab_x[x])))
        arcs.append((("x", x, "tl"), ("x", x, "tr"), form(lab_x[x])))

    incident: dict[Endpoint, list[int]] = {}
    for idx, (a, b, _) in enumerate(arcs):
        incident.setdefault(a, []).append(idx)
        incident.setdefault(b, []).append(idx)
    if any(len(v) != 2 for v in incident.values()):
        raise GraphError("network does not close into loops")

    cycles: list[list[tuple[int, ...]]] = []
    used = [False] * len(arcs)
    for start in range(len(arcs)):
        if used[start]:
            continue
        seq = []
        idx, at = start, arcs[start][0]
        while not used[idx]:
            used[idx] = True
            a, b, f = arcs[idx]
            if at == a:
                seq.append(f)
                at = b
            else:
                seq.append(tuple((-x) % d for x in f))
                at = a
            nxt = [j for j in incident[at] if j != idx]
            idx = nxt[0] if nxt else idx
        cycles.append(seq)

    grid = np.indices((d,) * L).reshape(L, -1) if L else np.zeros((0, 1), dtype=int)
    value = np.full(grid.shape[1], complex(net.scalar) * rs.sqrt_d ** -net.genus_marks)
    handles = net.handles
    for seq in cycles:
        check_cancellable(seq, d)
        net_form = np.sum(np.array(seq), axis=0) % d
        charge = (net_form[:L] @ grid + net_form[L]) % d if L else np.full(1, net_form[L])
        circle = rs.sqrt_d
        if handles and not any(any(f[:L]) for f in seq):
            # neutral circle around a handle pierced by one strand: joint relation
            circle, handles = 1 / rs.sqrt_d, handles - 1
        value = value * np.where(charge == 0, circle, 0.0)
    if handles:
        raise GraphError(f"{handles} handle(s) have no encircling label-free loop")
    for loop in net.loops:
        check_cancellable([form(const=c) for c in loop.charges], d)
        neutral = sum(loop.charges) % d == 0
        if loop.genus is None:
            value = value * (rs.sqrt_d if neutral else 0.0)
        elif not neutral or loop.genus % 2 == 0:
            value = value * 0.0
        else:
            value = value / rs.sqrt_d
    value = value * rs.sqrt_d ** -(len(quons) + 2 * n_w)
    for x, cr in enumerate(net.crossings):
        j = grid[lab_x[x]]
        ph = np.array([rs.zpow(cr.sign * v * v) for v in range(d)])[j]
        norm = 1 / (cmath.sqrt(rs.omega) * rs.sqrt_d)
        value = value * ph * (norm if cr.sign > 0 else np.conj(norm))
    for w, tw in enumerate(net.twists):
        m = twist_matrix(d, tw.power)
        value = value * m[grid[lab_w[(w, "out")]], grid[lab_w[(w, "in")]]]
    t = value.reshape((d,) * L) if L else value.reshape(())
    if L > len(quons):
        t = t.reshape((d,) * len(quons) + (-1,)).sum(axis=-1)
    return Tensor(d, len(net.outputs), len(net.inputs), t)


def network_vector(net: StringNetwork) -> np.ndarray:
    return eval_network(net).vector


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class QuonVector:
    d: int
    n_quons: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.size != self.d ** self.n_quons:
            raise ShapeError(f"expected {self.d ** self.n_quons} coordinates")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def tensor(self) -> Tensor:
        return Tensor(self.d, self.n_quons, 0, self.coeffs)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def quon_basis(d: int, axis: str, k: int) -> QuonVector:
    """|k_Z> = e_k; |0_X>, |0_Y> from the neutral pictures, |k_X>, |k_Y> by the
    charge word c1:k c2:-k acting on them."""
    if axis == "Z":
        return QuonVector(d, 1, np.eye(d)[k % d])
    if axis == "X":
        v0 = _unit(network_vector(x_picture(d)))
    elif axis == "Y":
        v0 = _unit(network_vector(y_picture(d)))
    else:
        raise ValueError(f"unknown axis {axis!r}")
    shift = eval_word(StrandWord(d, (Charge(1, k), Charge(2, -k)))).matrix
    return QuonVector(d, 1, _unit(shift @ v0))


def basis_matrix(d: int, axis: str) -> np.ndarray:
    return np.stack([quon_basis(d, axis, k).coeffs for k in range(d)], axis=1)


# ---------------------------------------------------------------------------
# joint relation


@dataclass(frozen=True)
class BasisSet:
    d: int
    m: int
    vectors: tuple[Tensor, ...]

    def __post_init__(self):
        for v in self.vectors:
            if v.shape != (self.d, self.m, self.m):
                raise BasisError("basis element has the wrong shape")
        gram = self.gram()
        if gram.shape[0] != self.d ** (2 * self.m) or np.max(np.abs(gram - np.eye(gram.shape[0]))) > 1e-9:
            raise BasisError("basis is not orthonormal and complete")

    def gram(self) -> np.ndarray:
        if not self.vectors:
            return np.zeros((0, 0))
        V = np.stack([v.vector for v in self.vectors], axis=1)
        return V.conj().T @ V

    @classmethod
    def matrix_units(cls, d: int, m: int) -> "BasisSet":
        n = d ** m
        vs = []
        for i in range(n * n):
            e = np.zeros(n * n)
            e[i] = 1
            vs.append(Tensor.from_matrix(d, e.reshape(n, n), m, m))
        return cls(d, m, tuple(vs))

    def rotated(self, u: np.ndarray) -> "BasisSet":
        V = np.stack([v.vector for v in self.vectors], axis=1) @ u
        n = self.d ** self.m
        return BasisSet(self.d, self.m, tuple(Tensor.from_matrix(self.d, V[:, i].reshape(n, n), self.m, self.m) for i in range(V.shape[1])))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    qm, r = np.linalg.qr(z)
    return qm * (np.diag(r) / np.abs(np.diag(r)))


def random_basis(d: int, m: int, rng: np.random.Generator) -> BasisSet:
    return BasisSet.matrix_units(d, m).rotated(random_unitary(d ** (2 * m), rng))


@dataclass(frozen=True)
class JointReport:
    d: int
    m: int
    n: int
    deviation: float
    invariance: float

    @property
    def passed(self) -> bool:
        return self.deviation < 1e-9 and self.invariance < 1e-9


def _joint_sides(T: np.ndarray, left: BasisSet, right: BasisSet) -> tuple[np.ndarray, np.ndarray]:
    """Both expansions with the handle closed: sum_a conj(tr a) T a and sum_b conj(tr b) b T.

    When m = n the open four-index forms sum_a vec(T a) vec(a)^* and
    sum_b vec(b) vec(T^+ b)^* are compared as well (stacked below)."""
    lhs = sum(np.conj(np.trace(a.matrix)) * (T @ a.matrix) for a in left.vectors)
    rhs = sum(np.conj(np.trace(b.matrix)) * (b.matrix @ T) for b in right.vectors)
    if left.m == right.m:
        lo = sum(np.outer((T @ a.matrix).reshape(-1), a.vector.conj()) for a in left.vectors)
        ro = sum(np.outer(b.vector, (T.conj().T @ b.matrix).reshape(-1).conj()) for b in right.vectors)
        lhs, rhs = np.concatenate([lhs.reshape(-1), lo.reshape(-1)]), np.concatenate([rhs.reshape(-1), ro.reshape(-1)])
    return lhs, rhs


def joint_check(d: int, m: int, n: int, T: Tensor, left: BasisSet, right: BasisSet, seed: int = 0) -> JointReport:
    if T.shape != (d, n, m) or left.m != m or right.m != n or left.d != d or right.d != d:
        raise ShapeError("operator and bases do not fit")
    lhs, rhs = _joint_sides(T.matrix, left, right)
    rng = np.random.default_rng(seed)
    l2 = left.rotated(random_unitary(len(left.vectors), rng))
    r2 = right.rotated(random_unitary(len(right.vectors), rng))
    lhs2, rhs2 = _joint_sides(T.matrix, l2, r2)
    dev = float(np.max(np.abs(lhs - rhs)))
    inv = float(max(np.max(np.abs(lhs2 - lhs)), np.max(np.abs(rhs2 - rhs))))
    return JointReport(d, m, n, dev, inv)
