"""Abstract crystals: the elementary crystals ``B_i``, tensor products and morphism checks.

This is an independent model of the crystal axioms, used to cross-check the
operators on sequences in :mod:`crystal_cone.zinf`.  ``None`` is the zero
element; ``NEG_INF`` stands for minus infinity.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from . import zinf
from .cartan import CartanMatrix, IndexSequence
from .zinf import NEG_INF, ExtInt, WeightVector, ZSeq


class CrystalElement(ABC):
    cartan: CartanMatrix

    @abstractmethod
    def wt(self) -> WeightVector: ...

    @abstractmethod
    def eps(self, i: int) -> ExtInt: ...

    @abstractmethod
    def phi(self, i: int) -> ExtInt: ...

    @abstractmethod
    def e(self, i: int) -> Optional["CrystalElement"]: ...

    @abstractmethod
    def f(self, i: int) -> Optional["CrystalElement"]: ...

    def labels(self) -> tuple:
        n = self.cartan.n
        return (
            self.wt(),
            tuple(self.eps(i) for i in range(1, n + 1)),
            tuple(self.phi(i) for i in range(1, n + 1)),
        )


@dataclass(frozen=True)
class BiElement(CrystalElement):
    """``(x)_i``: weight ``x alpha_i``, ``eps_i = -x``, ``phi_i = x``."""

    cartan: CartanMatrix = field(compare=False, repr=False)
    i: int
    x: int

    def wt(self):
        c = [0] * self.cartan.n
        c[self.i - 1] = -self.x
        return WeightVector(tuple(c))

    def eps(self, j):
        return -self.x if j == self.i else NEG_INF

    def phi(self, j):
        return self.x if j == self.i else NEG_INF

    def e(self, j):
        return BiElement(self.cartan, self.i, self.x + 1) if j == self.i else None

    def f(self, j):
        return BiElement(self.cartan, self.i, self.x - 1) if j == self.i else None


@dataclass(frozen=True)
class ZinfElement(CrystalElement):
    """A sequence viewed through the generic crystal interface."""

    iota: IndexSequence = field(repr=False)
    cartan: CartanMatrix = field(repr=False)
    x: ZSeq

    def wt(self):
        return zinf.wt(self.iota, self.x)

    def eps(self, i):
        return zinf.eps_i(self.iota, self.cartan, self.x, i)

    def phi(self, i):
        return zinf.phi_i(self.iota, self.cartan, self.x, i)

    def e(self, i):
        y = zinf.e_tilde(self.iota, self.cartan, self.x, i)
        return None if y is None else ZinfElement(self.iota, self.cartan, y)

    def f(self, i):
        return ZinfElement(self.iota, self.cartan, zinf.f_tilde(self.iota, self.cartan, self.x, i))


@dataclass(frozen=True)
class TensorElement(CrystalElement):
    left: CrystalElement
    right: CrystalElement

    @property
    def cartan(self):
        return self.left.cartan

    def wt(self):
        return self.left.wt() + self.right.wt()

    def eps(self, i):
        return tensor_eps(self.left, self.right, i)

    def phi(self, i):
        return tensor_phi(self.left, self.right, i)

    def e(self, i):
        return tensor_e(self.left, self.right, i)

    def f(self, i):
        return tensor_f(self.left, self.right, i)


def tensor(*factors: CrystalElement) -> Optional[CrystalElement]:
    """Right-nested ``b_1 (x) (b_2 (x) (... (x) b_r))``; any ``None`` factor gives ``None``."""
    if not factors or any(b is None for b in factors):
        return None
    out = factors[-1]
    for b in reversed(factors[:-1]):
        out = TensorElement(b, out)
    return out


def tensor_eps(b1: CrystalElement, b2: CrystalElement, i: int) -> ExtInt:
    return max(b1.eps(i), b2.eps(i) - b1.wt().pairing(b1.cartan, i))


def tensor_phi(b1: CrystalElement, b2: CrystalElement, i: int) -> ExtInt:
    return max(b2.phi(i), b1.phi(i) + b2.wt().pairing(b2.cartan, i))


def tensor_e(b1: CrystalElement, b2: CrystalElement, i: int) -> Optional[CrystalElement]:
    if b1.phi(i) >= b2.eps(i):
        a = b1.e(i)
        return None if a is None else TensorElement(a, b2)
    a = b2.e(i)
    return None if a is None else TensorElement(b1, a)


def tensor_f(b1: CrystalElement, b2: CrystalElement, i: int) -> Optional[CrystalElement]:
    if b1.phi(i) > b2.eps(i):
        a = b1.f(i)
        return None if a is None else TensorElement(a, b2)
    a = b2.f(i)
    return None if a is None else TensorElement(b1, a)


def axiom_violations(b: CrystalElement) -> list[str]:
    """Crystal axioms checked at a single element."""
    out = []
    w = b.wt()
    for i in range(1, b.cartan.n + 1):
        eps, phi = b.eps(i), b.phi(i)
        if eps == NEG_INF:
            if b.e(i) is not None or b.f(i) is not None:
                out.append(f"eps_{i} = -inf but e_{i} or f_{i} is nonzero")
            continue
        if phi != eps + w.pairing(b.cartan, i):
            out.append(f"phi_{i} = {phi} != eps_{i} + <h_{i}, wt> = {eps + w.pairing(b.cartan, i)}")
        up, down = b.e(i), b.f(i)
        if up is not None:
            if up.wt() != w.shift(i, -1):
                out.append(f"wt(e_{i} b) != wt(b) + alpha_{i}")
            if up.f(i) != b:
                out.append(f"f_{i} e_{i} b != b")
        if down is not None:
            if down.wt() != w.shift(i, 1):
                out.append(f"wt(f_{i} b) != wt(b) - alpha_{i}")
            if down.e(i) != b:
                out.append(f"e_{i} f_{i} b != b")
    return out


# ---------------------------------------------------------------- fragments and morphisms


@dataclass
class Fragment:
    """A finite colored graph with ``(wt, eps, phi)`` labels on its nodes."""

    labels: dict
    edges: set  # (source, color, target)

    @classmethod
    def from_graph(cls, g: zinf.CrystalGraph) -> "Fragment":
        return cls({x: g.labels(x) for x in g.nodes}, {(a, i, b) for a, i, b in g.edges})


@dataclass
class MorphismReport:
    violations: list[str]

    @property
    def passed(self) -> bool:
        return not self.violations


def check_strict_morphism(domain: Fragment, codomain: Fragment, vertex_map: dict) -> MorphismReport:
    """Label equality at mapped nodes and edge commutation, listing every violation."""
    bad = []
    for b, img in vertex_map.items():
        if b not in domain.labels:
            bad.append(f"{b} is not a domain node")
            continue
        if img is None:
            continue
        if img not in codomain.labels:
            bad.append(f"image {img} of {b} is not a codomain node")
        elif domain.labels[b] != codomain.labels[img]:
            bad.append(f"labels differ at {b} -> {img}")
    for a, i, b in sorted(domain.edges, key=repr):
        pa, pb = vertex_map.get(a), vertex_map.get(b)
        if pa is None or pb is None:
            continue
        if (pa, i, pb) not in codomain.edges:
            bad.append(f"edge {a} -{i}-> {b} not carried to {pa} -{i}-> {pb}")
    return MorphismReport(bad)


def rebracket_left(b: CrystalElement) -> CrystalElement:
    """``b1 (x) (b2 (x) b3)`` -> ``(b1 (x) b2) (x) b3``."""
    return TensorElement(TensorElement(b.left, b.right.left), b.right.right)


def rebracket_right(b: CrystalElement) -> CrystalElement:
    return TensorElement(b.left.left, TensorElement(b.left.right, b.right))


@dataclass
class AssociativityReport:
    violations: list[str]
    visited: int

    @property
    def passed(self) -> bool:
        return not self.violations


def check_associativity(b1: CrystalElement, b2: CrystalElement, b3: CrystalElement, depth: int) -> AssociativityReport:
    """Compare ``(b1 (x) b2) (x) b3`` with ``b1 (x) (b2 (x) b3)`` on the e/f orbit of the seed."""
    n = b1.cartan.n
    start = TensorElement(TensorElement(b1, b2), b3)
    seen = {start}
    queue = deque([(start, 0)])
    bad = []
    while queue:
        L, d = queue.popleft()
        R = rebracket_right(L)
        if L.labels() != R.labels():
            bad.append(f"labels differ at {L}")
        if d == depth:
            continue
        for i in range(1, n + 1):
            for op in ("e", "f"):
                Lo, Ro = getattr(L, op)(i), getattr(R, op)(i)
                if (Lo is None) != (Ro is None):
                    bad.append(f"{op}_{i} is zero on one bracketing only at {L}")
                    continue
                if Lo is None:
                    continue
                if rebracket_right(Lo) != Ro:
                    bad.append(f"{op}_{i} does not commute with rebracketing at {L}")
                    continue
                if Lo not in seen:
                    seen.add(Lo)
                    queue.append((Lo, d + 1))
    return AssociativityReport(bad, len(seen))


def identify_as_tensor(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, k: int) -> CrystalElement:
    """``u (x) (-x_k)_{i_k} (x) ... (x) (-x_1)_{i_1}`` with ``u`` the zero of a fresh sequence crystal."""
    if x.support_max > k:
        raise ValueError(f"support {x.support_max} exceeds k = {k}")
    u = ZinfElement(iota, cartan, ZSeq.zero())
    factors = [u] + [BiElement(cartan, iota[j], -x[j]) for j in range(k, 0, -1)]
    return tensor(*factors)


def check_identification(iota: IndexSequence, cartan: CartanMatrix, depth: int, k: Optional[int] = None) -> MorphismReport:
    """Sequences of the depth-``depth`` fragment against their tensor-product models.

    Checks equal ``wt``, ``eps_i``, ``phi_i`` and that ``e_i``, ``f_i`` commute
    with the identification.
    """
    if k is None:
        k = (depth + 1) * iota.period + len(iota.prefix)
    g = zinf.enumerate_image(iota, cartan, depth)
    bad = []
    for x in g.nodes:
        T = identify_as_tensor(iota, cartan, x, k)
        if T.labels() != ZinfElement(iota, cartan, x).labels():
            bad.append(f"labels differ at {x}")
        for i in range(1, cartan.n + 1):
            fx = zinf.f_tilde(iota, cartan, x, i)
            fT = T.f(i)
            if fx.support_max > k or fT is None or fT != identify_as_tensor(iota, cartan, fx, k):
                bad.append(f"f_{i} does not commute at {x}")
            ex = zinf.e_tilde(iota, cartan, x, i)
            eT = T.e(i)
            if (ex is None) != (eT is None) or (ex is not None and eT != identify_as_tensor(iota, cartan, ex, k)):
                bad.append(f"e_{i} does not commute at {x}")
    return MorphismReport(bad)
