"""Spider-diagram IR, rewrite rules, tensor evaluation and top-view compilation.

A diagram is a set of nodes with stable integer ids and directed edges from an
output port of one node to an input port of another.  Boundary wires are
``in`` nodes (one output port) and ``out`` nodes (one input port), numbered by
their ``index``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import GraphError, NoMatch, NotCompilable
from .numerics import DEFAULT_EPS, Tensor, compare_up_to_scalar, kron_all, roots
from .qudit_core import SpiderSpec, gate, spider
from .quon_calculus import Arc, Loop, StringNetwork, Twist, eval_network

SPIDERS = ("black", "white")
RULES = ("FuseBlack", "FuseWhite", "UnitCancel", "Bialgebra", "AntipodeLoop", "HopfLaw", "ColorChange", "GenusCancel")
TERMINATING = ("FuseBlack", "FuseWhite", "UnitCancel", "GenusCancel")


@dataclass(frozen=True)
class Node:
    kind: str  # black | white | fbox | box | in | out
    n_in: int
    n_out: int
    power: int = 0  # fbox
    name: str = ""  # box
    tensor: Optional[Tensor] = field(default=None, compare=False)  # box
    index: int = 0  # in/out

    def label(self) -> str:
        if self.kind in SPIDERS:
            return f"{self.kind}({self.n_in},{self.n_out})"
        if self.kind == "fbox":
            return f"F^{self.power}"
        if self.kind == "box":
            return self.name
        return f"{self.kind}{self.index}"


Port = tuple[int, int]  # (node id, port number)


@dataclass(frozen=True)
class Edge:
    src: Port  # output port
    dst: Port  # input port


@dataclass(frozen=True)
class SpiderDiagram:
    d: int
    nodes: tuple[tuple[int, Node], ...] = ()
    edges: tuple[Edge, ...] = ()
    scalar: complex = 1.0
    genus_marks: int = 0

    # views
    @property
    def node_map(self) -> dict[int, Node]:
        return dict(self.nodes)

    def inputs(self) -> list[int]:
        return [i for i, n in sorted(self.nodes, key=lambda p: p[1].index) if n.kind == "in"]

    def outputs(self) -> list[int]:
        return [i for i, n in sorted(self.nodes, key=lambda p: p[1].index) if n.kind == "out"]

    @property
    def n_inputs(self) -> int:
        return len(self.inputs())

    @property
    def n_outputs(self) -> int:
        return len(self.outputs())

    def next_id(self) -> int:
        return max((i for i, _ in self.nodes), default=-1) + 1

    def edge_from(self, port: Port) -> Edge:
        for e in self.edges:
            if e.src == port:
                return e
        raise GraphError(f"no edge leaves {port}")

    def edge_into(self, port: Port) -> Edge:
        for e in self.edges:
            if e.dst == port:
                return e
        raise GraphError(f"no edge enters {port}")

    def signature(self) -> tuple:
        """Node multiset plus scalar data; used for confluence comparisons."""
        return tuple(sorted(n.label() for _, n in self.nodes)), self.genus_marks

    def validate(self) -> None:
        nm = self.node_map
        if len(nm) != len(self.nodes):
            raise GraphError("duplicate node id")
        outs, ins = set(), set()
        for e in self.edges:
            (u, i), (v, j) = e.src, e.dst
            if u not in nm or v not in nm:
                raise GraphError(f"edge {e} references a missing node")
            if not (0 <= i < nm[u].n_out and 0 <= j < nm[v].n_in):
                raise GraphError(f"edge {e} uses a missing port")
            if e.src in outs or e.dst in ins:
                raise GraphError(f"port used twice in {e}")
            outs.add(e.src)
            ins.add(e.dst)
        for u, n in self.nodes:
            for i in range(n.n_out):
                if (u, i) not in outs:
                    raise GraphError(f"dangling output port {(u, i)} on {n.label()}")
            for j in range(n.n_in):
                if (u, j) not in ins:
                    raise GraphError(f"dangling input port {(u, j)} on {n.label()}")
        for kind in ("in", "out"):
            idx = sorted(n.index for _, n in self.nodes if n.kind == kind)
            if idx != list(range(len(idx))):
                raise GraphError(f"{kind} ports must be numbered 0..n-1")


# ---------------------------------------------------------------------------
# construction helpers


class Builder:
    """Small imperative helper for assembling diagrams."""

    def __init__(self, d: int, n_in: int = 0, n_out: int = 0):
        self.d = d
        self.nodes: dict[int, Node] = {}
        self.edges: list[Edge] = []
        self.scalar: complex = 1.0
        self.genus = 0
        self._next = 0
        self.ins = [self.add(Node("in", 0, 1, index=i)) for i in range(n_in)]
        self.outs = [self.add(Node("out", 1, 0, index=i)) for i in range(n_out)]

    def add(self, node: Node) -> int:
        i = self._next
        self._next += 1
        self.nodes[i] = node
        return i

    def black(self, n_in: int, n_out: int) -> int:
        return self.add(Node("black", n_in, n_out))

    def white(self, n_in: int, n_out: int) -> int:
        return self.add(Node("white", n_in, n_out))

    def fbox(self, power: int = 1) -> int:
        return self.add(Node("fbox", 1, 1, power=power % 4))

    def box(self, name: str, t: Tensor) -> int:
        return self.add(Node("box", t.in_legs, t.out_legs, name=name, tensor=t))

    def wire(self, u: int, i: int, v: int, j: int) -> None:
        self.edges.append(Edge((u, i), (v, j)))

    def build(self) -> SpiderDiagram:
        diag = SpiderDiagram(self.d, tuple(sorted(self.nodes.items())), tuple(self.edges), self.scalar, self.genus)
        diag.validate()
        return diag


def single(d: int, node: Node, scalar: complex = 1.0) -> SpiderDiagram:
    """One node with all its ports wired to the boundary."""
    b = Builder(d, node.n_in, node.n_out)
    u = b.add(node)
    for j, src in enumerate(b.ins):
        b.wire(src, 0, u, j)
    for i, dst in enumerate(b.outs):
        b.wire(u, i, dst, 0)
    b.scalar = scalar
    return b.build()


def black(d: int, n_in: int, n_out: int) -> SpiderDiagram:
    return single(d, Node("black", n_in, n_out))


def white(d: int, n_in: int, n_out: int) -> SpiderDiagram:
    return single(d, Node("white", n_in, n_out))


def fbox(d: int, power: int = 1) -> SpiderDiagram:
    return single(d, Node("fbox", 1, 1, power=power % 4))


def named_box(d: int, name: str, t: Tensor) -> SpiderDiagram:
    return single(d, Node("box", t.in_legs, t.out_legs, name=name, tensor=t))


def identity(d: int, n: int = 1) -> SpiderDiagram:
    b = Builder(d, n, n)
    for i in range(n):
        b.wire(b.ins[i], 0, b.outs[i], 0)
    return b.build()


def _relabel(diag: SpiderDiagram, offset: int) -> tuple[dict[int, Node], list[Edge]]:
    nodes = {i + offset: n for i, n in diag.nodes}
    edges = [Edge((e.src[0] + offset, e.src[1]), (e.dst[0] + offset, e.dst[1])) for e in diag.edges]
    return nodes, edges


def _assemble(d, nodes, edges, scalar, genus) -> SpiderDiagram:
    # renumber ids densely, keeping order
    order = sorted(nodes)
    remap = {old: new for new, old in enumerate(order)}
    ns = tuple((remap[i], nodes[i]) for i in order)
    es = tuple(Edge((remap[e.src[0]], e.src[1]), (remap[e.dst[0]], e.dst[1])) for e in edges)
    diag = SpiderDiagram(d, ns, es, scalar, genus)
    diag.validate()
    return diag


def tensor_product(a: SpiderDiagram, b: SpiderDiagram) -> SpiderDiagram:
    """Horizontal juxtaposition: a's wires first."""
    if a.d != b.d:
        raise GraphError("dimension mismatch")
    na, ea = _relabel(a, 0)
    nb, eb = _relabel(b, a.next_id())
    ka, ka_out = a.n_inputs, a.n_outputs
    for i, n in list(nb.items()):
        if n.kind == "in":
            nb[i] = replace(n, index=n.index + ka)
        elif n.kind == "out":
            nb[i] = replace(n, index=n.index + ka_out)
    return _assemble(a.d, {**na, **nb}, ea + eb, a.scalar * b.scalar, a.genus_marks + b.genus_marks)


def compose(first: SpiderDiagram, then: SpiderDiagram) -> SpiderDiagram:
    """Vertical composition: ``first`` below, ``then`` on top."""
    if first.d != then.d:
        raise GraphError("dimension mismatch")
    if first.n_outputs != then.n_inputs:
        raise GraphError(f"cannot stack {first.n_outputs} outputs onto {then.n_inputs} inputs")
    na, ea = _relabel(first, 0)
    nb, eb = _relabel(then, first.next_id())
    outs = {n.index: i for i, n in na.items() if n.kind == "out"}
    ins = {n.index: i for i, n in nb.items() if n.kind == "in"}
    edges = []
    into_out = {e.dst[0]: e for e in ea if e.dst[0] in outs.values()}
    from_in = {e.src[0]: e for e in eb if e.src[0] in ins.values()}
    edges += [e for e in ea if e.dst[0] not in outs.values()]
    edges += [e for e in eb if e.src[0] not in ins.values()]
    for k in outs:
        e1, e2 = into_out[outs[k]], from_in[ins[k]]
        edges.append(Edge(e1.src, e2.dst))
    nodes = {i: n for i, n in {**na, **nb}.items() if i not in outs.values() and i not in ins.values()}
    return _assemble(first.d, nodes, edges, first.scalar * then.scalar, first.genus_marks + then.genus_marks)


def compose_all(*layers: SpiderDiagram) -> SpiderDiagram:
    out = layers[0]
    for layer in layers[1:]:
        out = compose(out, layer)
    return out


def tensor_all(*parts: SpiderDiagram) -> SpiderDiagram:
    out = parts[0]
    for p in parts[1:]:
        out = tensor_product(out, p)
    return out


def with_scalar(diag: SpiderDiagram, c: complex) -> SpiderDiagram:
    return replace(diag, scalar=diag.scalar * c)


def with_genus(diag: SpiderDiagram, k: int) -> SpiderDiagram:
    return replace(diag, genus_marks=diag.genus_marks + k)


# ---------------------------------------------------------------------------
# evaluation


def node_tensor(d: int, n: Node) -> np.ndarray:
    if n.kind in SPIDERS:
        return spider(d, SpiderSpec(n.kind, n.n_in, n.n_out)).entries
    if n.kind == "fbox":
        return gate(d, "F").power(n.power).entries
    if n.kind == "box":
        if n.tensor is None or n.tensor.d != d:
            raise GraphError(f"box {n.name!r} has no tensor for d={d}")
        return n.tensor.entries
    raise GraphError(f"no tensor for {n.kind}")


def eval_tensor(diag: SpiderDiagram) -> Tensor:
    diag.validate()
    d = diag.d
    var: dict[tuple[str, Port], int] = {}
    for k, e in enumerate(diag.edges):
        var[("o", e.src)] = k
        var[("i", e.dst)] = k
    nxt = len(diag.edges)
    nm = diag.node_map
    leg_out, leg_in = [], []
    operands: list = []
    eye = np.eye(d)
    for u, n in diag.nodes:
        if n.kind == "out":
            leg_out.append((n.index, nxt))
            operands += [eye, [nxt, var[("i", (u, 0))]]]
            nxt += 1
        elif n.kind == "in":
            leg_in.append((n.index, nxt))
            operands += [eye, [var[("o", (u, 0))], nxt]]
            nxt += 1
        else:
            idx = [var[("o", (u, i))] for i in range(n.n_out)] + [var[("i", (u, j))] for j in range(n.n_in)]
            operands += [node_tensor(d, n), idx]
    out_idx = [v for _, v in sorted(leg_out)] + [v for _, v in sorted(leg_in)]
    if operands:
        t = np.einsum(*operands, out_idx, optimize="greedy")
    else:
        t = np.array(1.0 + 0j)
    factor = diag.scalar * d ** (-diag.genus_marks / 2)
    return Tensor(d, len(leg_out), len(leg_in), np.asarray(t) * factor)


# ---------------------------------------------------------------------------
# rewrite rules


def _remove(diag: SpiderDiagram, drop: Iterable[int], add_nodes: dict[int, Node], add_edges: list[Edge],
            keep_edges: Optional[Sequence[Edge]] = None, scalar: complex = 1.0, genus: int = 0) -> SpiderDiagram:
    drop = set(drop)
    nodes = {i: n for i, n in diag.nodes if i not in drop}
    nodes.update(add_nodes)
    if keep_edges is None:
        keep_edges = [e for e in diag.edges if e.src[0] not in drop and e.dst[0] not in drop]
    edges = list(keep_edges) + add_edges
    out = SpiderDiagram(diag.d, tuple(sorted(nodes.items())), tuple(edges), diag.scalar * scalar, diag.genus_marks + genus)
    out.validate()
    return out


def _edges_between(diag: SpiderDiagram, u: int, v: int) -> list[Edge]:
    return [e for e in diag.edges if {e.src[0], e.dst[0]} == {u, v}]


def _fuse(diag: SpiderDiagram, site, color: str) -> SpiderDiagram:
    """Merge two same-colour spiders along every wire joining them.

    With k joining wires the black scalar is 1 and the white scalar d^(k-1)
    (k-1 of the internal sums are unconstrained)."""
    u, v = site
    nm = diag.node_map
    if u not in nm or v not in nm or nm[u].kind != color or nm[v].kind != color or u == v:
        raise NoMatch(f"{site} is not a pair of {color} spiders")
    between = _edges_between(diag, u, v)
    if not between:
        raise NoMatch("fusion needs a connecting edge")
    lo, hi = between[0].src[0], between[0].dst[0]
    inner_src = {e.src for e in between}
    inner_dst = {e.dst for e in between}
    new = diag.next_id()
    in_map, out_map = {}, {}
    for node in (lo, hi):
        for j in range(nm[node].n_in):
            if (node, j) not in inner_dst:
                in_map[(node, j)] = (new, len(in_map))
        for i in range(nm[node].n_out):
            if (node, i) not in inner_src:
                out_map[(node, i)] = (new, len(out_map))
    fused = Node(color, len(in_map), len(out_map))
    edges = [Edge(out_map.get(f.src, f.src), in_map.get(f.dst, f.dst)) for f in diag.edges if f not in between]
    scalar = diag.d ** (len(between) - 1) if color == "white" else 1
    return _remove(diag, {lo, hi}, {new: fused}, [], keep_edges=edges, scalar=scalar)


def _unit_cancel(diag: SpiderDiagram, site) -> SpiderDiagram:
    nm = diag.node_map
    if isinstance(site, int):
        n = nm.get(site)
        if n is not None and n.kind in SPIDERS and (n.n_in, n.n_out) == (0, 0):
            # a closed spider is a number: d for black, 1 for white
            return _remove(diag, {site}, {}, [], scalar=diag.d if n.kind == "black" else 1.0)
        if n is None or n.kind not in SPIDERS or (n.n_in, n.n_out) != (1, 1):
            raise NoMatch("identity removal needs a 1->1 or 0->0 spider")
        e_in, e_out = diag.edge_into((site, 0)), diag.edge_from((site, 0))
        keep = [e for e in diag.edges if e not in (e_in, e_out)]
        return _remove(diag, {site}, {}, [Edge(e_in.src, e_out.dst)], keep_edges=keep)
    u, v = site
    if u not in nm or v not in nm:
        raise NoMatch("missing node")
    a, b = nm[u], nm[v]
    if a.kind not in SPIDERS or b.kind not in SPIDERS:
        raise NoMatch("unit cancel needs two spiders")
    between = _edges_between(diag, u, v)
    if len(between) != 1 or a.n_in + a.n_out != 1 or b.n_in + b.n_out != 1:
        raise NoMatch("unit cancel needs two degree-1 spiders joined by their edge")
    # <counit|unit>: black-black = sum_k 1 = d; any pair with a white end = 1
    scalar = diag.d if a.kind == b.kind == "black" else 1.0
    return _remove(diag, {u, v}, {}, [], scalar=scalar)


def _bialgebra(diag: SpiderDiagram, site) -> SpiderDiagram:
    """Copy rules: white counit after black(m->1) -> m white counits, and the
    colour/direction dual: white(1->n) after a black unit -> n black units."""
    u, v = site
    nm = diag.node_map
    if u not in nm or v not in nm:
        raise NoMatch("missing node")
    a, b = nm[u], nm[v]
    between = _edges_between(diag, u, v)
    if len(between) != 1 or between[0].src[0] != u:
        raise NoMatch("bialgebra copy needs an edge from the first node to the second")
    d = diag.d
    new = diag.next_id()
    if a.kind == "black" and a.n_out == 1 and b.kind == "white" and (b.n_in, b.n_out) == (1, 0):
        add = {new + j: Node("white", 1, 0) for j in range(a.n_in)}
        edges = [Edge(diag.edge_into((u, j)).src, (new + j, 0)) for j in range(a.n_in)]
    elif a.kind == "black" and (a.n_in, a.n_out) == (0, 1) and b.kind == "white" and b.n_in == 1:
        add = {new + j: Node("black", 0, 1) for j in range(b.n_out)}
        edges = [Edge((new + j, 0), diag.edge_from((v, j)).dst) for j in range(b.n_out)]
    else:
        raise NoMatch("no copy pattern at site")
    return _remove(diag, {u, v}, add, edges)


def _hopf_law(diag: SpiderDiagram, site) -> SpiderDiagram:
    """Two white splits feeding two black merges crosswise -> black merge then white split."""
    w1, w2, b1, b2 = site
    nm = diag.node_map
    try:
        ok = all(nm[w].kind == "white" and (nm[w].n_in, nm[w].n_out) == (1, 2) for w in (w1, w2))
        ok = ok and all(nm[b].kind == "black" and (nm[b].n_in, nm[b].n_out) == (2, 1) for b in (b1, b2))
    except KeyError:
        raise NoMatch("missing node") from None
    if not ok:
        raise NoMatch("HopfLaw needs white(1,2) x2 and black(2,1) x2")
    inner = {frozenset((e.src[0], e.dst[0])) for e in diag.edges if e.src[0] in (w1, w2) and e.dst[0] in (b1, b2)}
    if inner != {frozenset(p) for p in ((w1, b1), (w1, b2), (w2, b1), (w2, b2))}:
        raise NoMatch("the four spiders are not wired as a square")
    # which input of each black comes from w1 vs w2 is irrelevant: black is commutative
    new = diag.next_id()
    edges = [
        Edge(diag.edge_into((w1, 0)).src, (new, 0)),
        Edge(diag.edge_into((w2, 0)).src, (new, 1)),
        Edge((new, 0), (new + 1, 0)),
        Edge((new + 1, 0), diag.edge_from((b1, 0)).dst),
        Edge((new + 1, 1), diag.edge_from((b2, 0)).dst),
    ]
    return _remove(diag, {w1, w2, b1, b2}, {new: Node("black", 2, 1), new + 1: Node("white", 1, 2)}, edges)


def _antipode_loop(diag: SpiderDiagram, site) -> SpiderDiagram:
    """white(1->2) -> (wire, F^2) -> black(2->1)  ==>  black unit . white counit."""
    w, f, b = site
    nm = diag.node_map
    try:
        ok = nm[w].kind == "white" and (nm[w].n_in, nm[w].n_out) == (1, 2)
        ok = ok and nm[b].kind == "black" and (nm[b].n_in, nm[b].n_out) == (2, 1)
        ok = ok and nm[f].kind == "fbox" and nm[f].power == 2
    except KeyError:
        raise NoMatch("missing node") from None
    if not ok or len(_edges_between(diag, w, b)) != 1 or len(_edges_between(diag, w, f)) != 1 or len(_edges_between(diag, f, b)) != 1:
        raise NoMatch("AntipodeLoop pattern not present")
    new = diag.next_id()
    edges = [Edge(diag.edge_into((w, 0)).src, (new, 0)), Edge((new + 1, 0), diag.edge_from((b, 0)).dst)]
    return _remove(diag, {w, f, b}, {new: Node("white", 1, 0), new + 1: Node("black", 0, 1)}, edges)


def _color_change(diag: SpiderDiagram, site) -> SpiderDiagram:
    """white(m->n) = d^((m+n)/2-1) F^(x n) black F^(-1 x m), and the inverse."""
    nm = diag.node_map
    n = nm.get(site)
    if n is None or n.kind not in SPIDERS:
        raise NoMatch("ColorChange needs a spider")
    legs = n.n_in + n.n_out
    d = diag.d
    if n.kind == "white":
        target, f_out, f_in, scalar = "black", 1, 3, d ** (legs / 2 - 1)
    else:
        target, f_out, f_in, scalar = "white", 3, 1, d ** (1 - legs / 2)
    new = diag.next_id()
    add = {new: Node(target, n.n_in, n.n_out)}
    edges = []
    k = new + 1
    for j in range(n.n_in):
        add[k] = Node("fbox", 1, 1, power=f_in)
        edges += [Edge(diag.edge_into((site, j)).src, (k, 0)), Edge((k, 0), (new, j))]
        k += 1
    for i in range(n.n_out):
        add[k] = Node("fbox", 1, 1, power=f_out)
        edges += [Edge((new, i), (k, 0)), Edge((k, 0), diag.edge_from((site, i)).dst)]
        k += 1
    return _remove(diag, {site}, add, edges, scalar=scalar)


def _genus_cancel(diag: SpiderDiagram, site=None) -> SpiderDiagram:
    if diag.genus_marks < 1:
        raise NoMatch("no genus mark to remove")
    return replace(diag, genus_marks=diag.genus_marks - 1, scalar=diag.scalar * diag.d ** -0.5)


_RULES = {
    "FuseBlack": lambda dg, s: _fuse(dg, s, "black"),
    "FuseWhite": lambda dg, s: _fuse(dg, s, "white"),
    "UnitCancel": _unit_cancel,
    "Bialgebra": _bialgebra,
    "HopfLaw": _hopf_law,
    "AntipodeLoop": _antipode_loop,
    "ColorChange": _color_change,
    "GenusCancel": _genus_cancel,
}


def apply_rule(diag: SpiderDiagram, rule: str, site=None) -> SpiderDiagram:
    if rule not in _RULES:
        raise NoMatch(f"unknown rule {rule!r}")
    return _RULES[rule](diag, site)


def matches(diag: SpiderDiagram, rule: str) -> list:
    """All sites where a terminating rule applies, in stable id order."""
    nm = diag.node_map
    sites: list = []
    if rule in ("FuseBlack", "FuseWhite"):
        color = "black" if rule == "FuseBlack" else "white"
        for e in diag.edges:
            u, v = e.src[0], e.dst[0]
            if u != v and nm[u].kind == color and nm[v].kind == color:
                sites.append((u, v))
    elif rule == "UnitCancel":
        for u, n in diag.nodes:
            if n.kind in SPIDERS and (n.n_in, n.n_out) in ((1, 1), (0, 0)):
                sites.append(u)
        for e in diag.edges:
            u, v = e.src[0], e.dst[0]
            if nm[u].kind in SPIDERS and nm[v].kind in SPIDERS and nm[u].n_in + nm[u].n_out == 1 and nm[v].n_in + nm[v].n_out == 1:
                sites.append((u, v))
    elif rule == "GenusCancel":
        if diag.genus_marks:
            sites.append(None)
    else:
        raise NoMatch(f"{rule} is not matched automatically")
    return sorted(set(sites), key=lambda s: (s is None, str(s)))


def normalize(diag: SpiderDiagram, rng: Optional[random.Random] = None, trace: Optional[list] = None) -> SpiderDiagram:
    """Apply FuseBlack, FuseWhite, UnitCancel and GenusCancel to a fixed point.

    Each step lowers (node count, genus marks) lexicographically.  With ``rng``
    the rule and site are chosen at random (for confluence testing).
    """
    while True:
        options = [(r, s) for r in TERMINATING for s in matches(diag, r)]
        if not options:
            return diag
        rule, site = rng.choice(options) if rng else options[0]
        diag = apply_rule(diag, rule, site)
        if trace is not None:
            trace.append((rule, site))


# ---------------------------------------------------------------------------
# canonical instances and the rule suite


@dataclass(frozen=True)
class RuleReport:
    rule: str
    d: int
    case: str
    deviation: float
    scalar: complex
    passed: bool


def copy_(d):
    return black(d, 1, 2)


def sum_(d):
    return white(d, 2, 1)


def cnot_diagram(d: int) -> SpiderDiagram:
    """COPY on the control wire (input 1) feeding SUM on the target wire (input 0)."""
    b = Builder(d, 2, 2)
    cp = b.black(1, 2)
    sm = b.white(2, 1)
    b.wire(b.ins[0], 0, sm, 0)
    b.wire(b.ins[1], 0, cp, 0)
    b.wire(cp, 0, b.outs[1], 0)
    b.wire(cp, 1, sm, 1)
    b.wire(sm, 0, b.outs[0], 0)
    return b.build()


def hopf_square(d: int) -> tuple[SpiderDiagram, tuple[int, int, int, int]]:
    b = Builder(d, 2, 2)
    w1, w2 = b.white(1, 2), b.white(1, 2)
    b1, b2 = b.black(2, 1), b.black(2, 1)
    b.wire(b.ins[0], 0, w1, 0)
    b.wire(b.ins[1], 0, w2, 0)
    b.wire(w1, 0, b1, 0)
    b.wire(w1, 1, b2, 0)
    b.wire(w2, 0, b1, 1)
    b.wire(w2, 1, b2, 1)
    b.wire(b1, 0, b.outs[0], 0)
    b.wire(b2, 0, b.outs[1], 0)
    return b.build(), (w1, w2, b1, b2)


def hopf_path(d: int) -> SpiderDiagram:
    return compose(black(d, 2, 1), white(d, 1, 2))


def hopf2(d: int) -> tuple[SpiderDiagram, SpiderDiagram, tuple]:
    lhs = compose(black(d, 2, 1), white(d, 1, 0))
    rhs = tensor_product(white(d, 1, 0), white(d, 1, 0))
    bl = [i for i, n in lhs.nodes if n.kind == "black"][0]
    wh = [i for i, n in lhs.nodes if n.kind == "white"][0]
    return lhs, rhs, (bl, wh)


def hopf3(d: int) -> tuple[SpiderDiagram, SpiderDiagram, tuple]:
    lhs = compose(black(d, 0, 1), white(d, 1, 2))
    rhs = tensor_product(black(d, 0, 1), black(d, 0, 1))
    bl = [i for i, n in lhs.nodes if n.kind == "black"][0]
    wh = [i for i, n in lhs.nodes if n.kind == "white"][0]
    return lhs, rhs, (bl, wh)


def hopf1(d: int) -> tuple[SpiderDiagram, SpiderDiagram, tuple]:
    lhs = compose_all(white(d, 1, 2), tensor_product(identity(d), fbox(d, 2)), black(d, 2, 1))
    rhs = compose(white(d, 1, 0), black(d, 0, 1))
    nm = lhs.node_map
    w = [i for i, n in nm.items() if n.kind == "white"][0]
    f = [i for i, n in nm.items() if n.kind == "fbox"][0]
    b = [i for i, n in nm.items() if n.kind == "black"][0]
    return lhs, rhs, (w, f, b)


def antipode_diagram(d: int) -> SpiderDiagram:
    """White cup on the left, then a black cap closing it with the input wire."""
    cup = tensor_product(white(d, 0, 2), identity(d))
    cap = tensor_product(identity(d), black(d, 2, 0))
    return compose(cup, cap)


def _report(rule, d, case, lhs: Tensor, rhs: Tensor, scalar=1.0, tol=DEFAULT_EPS) -> RuleReport:
    dev = lhs.max_dev(rhs)
    return RuleReport(rule, d, case, dev, complex(scalar), dev <= tol)


def rule_suite(dims: Iterable[int], tol: float = DEFAULT_EPS) -> list[RuleReport]:
    out: list[RuleReport] = []
    for d in dims:
        ev = eval_tensor
        # Frobenius fusion, both colours
        for color, rule in (("black", "FuseBlack"), ("white", "FuseWhite")):
            base = compose(tensor_product(single(d, Node(color, 1, 2)), identity(d)), tensor_product(identity(d), single(d, Node(color, 2, 1))))
            site = tuple(i for i, n in base.nodes if n.kind == color)
            after = apply_rule(base, rule, site)
            out.append(_report(rule, d, "fusion", ev(base), ev(after)))
            lhs = compose(tensor_product(single(d, Node(color, 2, 1)), identity(d)), single(d, Node(color, 2, 1)))
            rhs = compose(tensor_product(identity(d), single(d, Node(color, 2, 1))), single(d, Node(color, 2, 1)))
            out.append(_report(rule, d, "associativity", ev(lhs), ev(rhs)))
            counit = compose(single(d, Node(color, 1, 2)), tensor_product(single(d, Node(color, 1, 0)), identity(d)))
            out.append(_report(rule, d, "counit", ev(counit), ev(identity(d))))
        # unit / counit cancellation and identity removal
        for ca, cb in (("black", "black"), ("white", "white"), ("black", "white")):
            pair = compose(single(d, Node(ca, 0, 1)), single(d, Node(cb, 1, 0)))
            site = tuple(i for i, n in pair.nodes)
            after = apply_rule(pair, "UnitCancel", site)
            out.append(_report("UnitCancel", d, f"{ca}-{cb}", ev(pair), ev(after), after.scalar))
        ident = black(d, 1, 1)
        out.append(_report("UnitCancel", d, "identity-spider", ev(ident), ev(apply_rule(ident, "UnitCancel", ident.nodes[-1][0]))))
        # copy rules
        for case, build in (("hopf2", hopf2), ("hopf3", hopf3)):
            lhs, rhs, site = build(d)
            out.append(_report("Bialgebra", d, case, ev(lhs), ev(rhs)))
            out.append(_report("Bialgebra", d, case + "-rewrite", ev(lhs), ev(apply_rule(lhs, "Bialgebra", site))))
        # antipode loop
        lhs, rhs, site = hopf1(d)
        out.append(_report("AntipodeLoop", d, "hopf1", ev(lhs), ev(rhs)))
        out.append(_report("AntipodeLoop", d, "hopf1-rewrite", ev(lhs), ev(apply_rule(lhs, "AntipodeLoop", site))))
        # Hopf law on the square
        sq, site = hopf_square(d)
        out.append(_report("HopfLaw", d, "hopf4", ev(sq), ev(hopf_path(d))))
        out.append(_report("HopfLaw", d, "hopf4-rewrite", ev(sq), ev(apply_rule(sq, "HopfLaw", site))))
        # the antipode is F2
        out.append(_report("AntipodeLoop", d, "antipode-F2", ev(antipode_diagram(d)), gate(d, "F2")))
        # colour duality for every split of n = 1..4 boundary points
        for n in range(1, 5):
            for m in range(n + 1):
                w = white(d, m, n - m)
                site = [i for i, nd in w.nodes if nd.kind == "white"][0]
                after = apply_rule(w, "ColorChange", site)
                out.append(_report("ColorChange", d, f"duality-{m}-{n - m}", ev(w), ev(after), after.scalar))
                back = apply_rule(black(d, m, n - m), "ColorChange", [i for i, nd in black(d, m, n - m).nodes if nd.kind == "black"][0])
                out.append(_report("ColorChange", d, f"inverse-{m}-{n - m}", ev(black(d, m, n - m)), ev(back), back.scalar))
        # GenusCancel against the top-view Hopf identity
        g = with_genus(sq, 1)
        out.append(_report("GenusCancel", d, "genus-mark", ev(g), ev(apply_rule(g, "GenusCancel"))))
        ratio = hopf_top_view_ratio(d)
        expected = d ** -0.5
        out.append(RuleReport("GenusCancel", d, "hopf-top-view", abs(ratio - expected), ratio, abs(ratio - expected) <= tol))
    return out


# ---------------------------------------------------------------------------
# top-view compilation


def compile_to_quon(diag: SpiderDiagram) -> StringNetwork:
    """Top view: each wire is a quon slot with corners 1=TL, 2=TR, 3=BR, 4=BL.

    Black spiders join their legs in a cycle (2 of one leg to 3 of the next, 1
    to 4).  White spiders chain the (1,2) cups of their legs and the (4,3)
    cups, with input legs traversed backwards so their charge enters negatively.
    F-boxes become twists between two slots.
    """
    diag.validate()
    d = diag.d
    nm = diag.node_map
    outs = {u: nm[u].index for u in diag.outputs()}
    ins = {u: nm[u].index for u in diag.inputs()}
    n_out = len(outs)

    def slot(e_idx: int) -> tuple:
        e = diag.edges[e_idx]
        if e.dst[0] in outs:
            return ("q", outs[e.dst[0]])
        if e.src[0] in ins:
            return ("q", n_out + ins[e.src[0]])
        return ("j", e_idx)

    def corner(s: tuple, c: int) -> tuple:
        return (*s, c)

    edge_of_out = {e.src: k for k, e in enumerate(diag.edges)}
    edge_of_in = {e.dst: k for k, e in enumerate(diag.edges)}
    arcs: list[Arc] = []
    loops: list[Loop] = []
    twists: list[Twist] = []
    for k, e in enumerate(diag.edges):
        if e.src[0] in ins and e.dst[0] in outs:
            a, b = ("q", n_out + ins[e.src[0]]), ("q", outs[e.dst[0]])
            arcs += [Arc(corner(a, c), corner(b, c)) for c in (1, 2, 3, 4)]
    for u, n in diag.nodes:
        if n.kind in ("in", "out"):
            continue
        legs = [(slot(edge_of_out[(u, i)]), +1) for i in range(n.n_out)]
        legs += [(slot(edge_of_in[(u, j)]), -1) for j in reversed(range(n.n_in))]
        if n.kind == "black":
            if not legs:
                loops += [Loop(), Loop()]
            for t in range(len(legs)):
                s, s2 = legs[t][0], legs[(t + 1) % len(legs)][0]
                arcs += [Arc(corner(s, 1), corner(s2, 4)), Arc(corner(s, 2), corner(s2, 3))]
        elif n.kind == "white":
            for t in range(len(legs)):
                (s, sg), (s2, sg2) = legs[t], legs[(t + 1) % len(legs)]
                exit12, entry12 = (2 if sg > 0 else 1), (1 if sg2 > 0 else 2)
                exit43, entry43 = (3 if sg > 0 else 4), (4 if sg2 > 0 else 3)
                arcs += [Arc(corner(s, exit12), corner(s2, entry12)), Arc(corner(s, exit43), corner(s2, entry43))]
        elif n.kind == "fbox":
            w = len(twists)
            twists.append(Twist(n.power))
            s_in, s_out = slot(edge_of_in[(u, 0)]), slot(edge_of_out[(u, 0)])
            arcs += [Arc(corner(s_in, c), ("w", w, "in", c)) for c in (1, 2, 3, 4)]
            arcs += [Arc(("w", w, "out", c), corner(s_out, c)) for c in (1, 2, 3, 4)]
        else:
            raise NotCompilable(f"{n.label()} has no top-view picture")
    return StringNetwork(
        d,
        outputs=tuple(range(n_out)),
        inputs=tuple(range(n_out, n_out + len(ins))),
        arcs=tuple(arcs),
        loops=tuple(loops),
        twists=tuple(twists),
        scalar=diag.scalar,
        genus_marks=diag.genus_marks,
        handles=cycle_rank(diag),
    )


def cycle_rank(diag: SpiderDiagram) -> int:
    """Independent cycles among internal wires: each one is a handle in the 3D picture."""
    nm = diag.node_map
    inner = [u for u, n in diag.nodes if n.kind not in ("in", "out")]
    parent = {u: u for u in inner}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    rank = 0
    for e in diag.edges:
        u, v = e.src[0], e.dst[0]
        if nm[u].kind in ("in", "out") or nm[v].kind in ("in", "out"):
            continue
        ru, rv = find(u), find(v)
        if ru == rv:
            rank += 1
        else:
            parent[ru] = rv
    return rank


def top_view_exponent(diag: SpiderDiagram, tol: float = 1e-9) -> int:
    """The integer a with eval_network(compile(diag)) = d^(a/2) eval_tensor(diag)."""
    lhs = eval_network(compile_to_quon(diag))
    rhs = eval_tensor(diag)
    lam = compare_up_to_scalar(lhs, rhs, tol)
    if lam is None or abs(lam.imag) > tol or lam.real <= 0:
        raise NotCompilable(f"top view differs from the tensor by {lam}")
    a = round(2 * math.log(lam.real) / math.log(diag.d))
    if abs(diag.d ** (a / 2) - lam.real) > tol * max(1.0, lam.real):
        raise NotCompilable(f"scalar {lam.real} is not a half-integer power of d")
    return a


def hopf_top_view_ratio(d: int) -> complex:
    """Top-view value of the Hopf square divided by that of the path.

    The square encloses one handle; its neutral circle around the handle is
    removed at cost d^(-1/2), so the ratio should be exactly d^(-1/2).
    """
    sq, _ = hopf_square(d)
    lhs = eval_network(compile_to_quon(sq))
    rhs = eval_network(compile_to_quon(hopf_path(d)))
    lam = compare_up_to_scalar(lhs, rhs)
    return complex("nan") if lam is None else lam
