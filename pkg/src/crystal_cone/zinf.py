"""The crystal structure on finitely supported integer sequences.

A sequence ``x = (..., x_3, x_2, x_1)`` is stored as the tuple
``(x_1, x_2, ..., x_m)`` with trailing zeros trimmed, so position ``k`` of the
sequence is ``x[k]`` (1-based) and two sequences are equal exactly when their
tuples are.  ``None`` plays the role of the crystal's zero element.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import Optional, Union

from .cartan import CartanMatrix, IndexSequence, check_compatible, k_minus, k_plus

NEG_INF = -math.inf
ExtInt = Union[int, float]  # an int, or NEG_INF


@dataclass(frozen=True, order=False)
class ZSeq:
    coords: tuple[int, ...] = ()

    def __post_init__(self):
        c = tuple(int(v) for v in self.coords)
        end = len(c)
        while end and c[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coords", c[:end])

    @classmethod
    def zero(cls) -> "ZSeq":
        return cls(())

    @classmethod
    def unit(cls, k: int, value: int = 1) -> "ZSeq":
        return cls((0,) * (k - 1) + (value,))

    @classmethod
    def from_dict(cls, entries: Mapping[int, int]) -> "ZSeq":
        entries = {k: v for k, v in entries.items() if v}
        if not entries:
            return cls(())
        if min(entries) < 1:
            raise ValueError("positions start at 1")
        m = max(entries)
        return cls(tuple(entries.get(k, 0) for k in range(1, m + 1)))

    def __getitem__(self, k: int) -> int:
        if k < 1:
            raise IndexError(f"positions start at 1, got {k}")
        return self.coords[k - 1] if k <= len(self.coords) else 0

    def __len__(self) -> int:
        return len(self.coords)

    @property
    def support_max(self) -> int:
        """Largest position with a nonzero entry (0 for the zero sequence)."""
        return len(self.coords)

    @property
    def total(self) -> int:
        return sum(self.coords)

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.coords)

    def add(self, k: int, delta: int) -> "ZSeq":
        c = list(self.coords)
        if k > len(c):
            c.extend([0] * (k - len(c)))
        c[k - 1] += delta
        return ZSeq(tuple(c))

    def padded(self, length: int) -> tuple[int, ...]:
        return self.coords + (0,) * (length - len(self.coords))

    def items(self) -> Iterable[tuple[int, int]]:
        return ((k, v) for k, v in enumerate(self.coords, start=1) if v)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.coords)) + ")"


@dataclass(frozen=True)
class WeightVector:
    """``wt = -sum_i c[i] alpha_i``; ``c`` is 0-based storage for colors 1..n."""

    c: tuple[int, ...]

    def pairing(self, cartan: CartanMatrix, i: int) -> int:
        """``<h_i, wt>``."""
        row = cartan.rows[i - 1]
        return -sum(a * cj for a, cj in zip(row, self.c))

    def __add__(self, other: "WeightVector") -> "WeightVector":
        return WeightVector(tuple(a + b for a, b in zip(self.c, other.c)))

    def shift(self, i: int, delta: int) -> "WeightVector":
        """Weight ``wt - delta * alpha_i``."""
        c = list(self.c)
        c[i - 1] += delta
        return WeightVector(tuple(c))


def sigma_values(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq) -> list[int]:
    """``[sigma_1(x), ..., sigma_m(x)]`` for ``m = x.support_max``; later ones vanish."""
    m = x.support_max
    n = cartan.n
    tail = [0] * n  # tail[c-1] = sum of x_j over j > k with i_j = c
    out = [0] * m
    for k in range(m, 0, -1):
        ik = iota[k]
        row = cartan.rows[ik - 1]
        out[k - 1] = x[k] + sum(row[c] * tail[c] for c in range(n))
        tail[ik - 1] += x[k]
    return out


def sigma_k(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, k: int) -> int:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ik = iota[k]
    return x[k] + sum(cartan(ik, iota[j]) * x[j] for j in range(k + 1, x.support_max + 1))


@dataclass(frozen=True)
class MSet:
    """The positions of color ``i`` where ``sigma_k`` attains its maximum.

    When ``value == 0`` the set is infinite; ``members`` then lists the finite
    part up to and including the first such position beyond the support.
    """

    value: int
    members: tuple[int, ...]

    @property
    def infinite(self) -> bool:
        return self.value == 0

    @property
    def first(self) -> int:
        return self.members[0]

    @property
    def last(self) -> int:
        if self.infinite:
            raise ValueError("M is infinite; it has no maximum")
        return self.members[-1]


def m_set(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, i: int) -> MSet:
    m = x.support_max
    sig = sigma_values(iota, cartan, x)
    best = 0  # sigma_k = 0 for every k > m of color i
    for k in range(1, m + 1):
        if iota[k] == i and sig[k - 1] > best:
            best = sig[k - 1]
    members = [k for k in range(1, m + 1) if iota[k] == i and sig[k - 1] == best]
    if best == 0:
        members.append(iota.next_occurrence(i, m))
    return MSet(best, tuple(members))


def eps_i(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, i: int) -> int:
    return m_set(iota, cartan, x, i).value


def wt(iota: IndexSequence, x: ZSeq) -> WeightVector:
    c = [0] * iota.n
    for k, v in x.items():
        c[iota[k] - 1] += v
    return WeightVector(tuple(c))


def phi_i(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, i: int) -> int:
    return wt(iota, x).pairing(cartan, i) + eps_i(iota, cartan, x, i)


def f_tilde(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, i: int) -> ZSeq:
    return x.add(m_set(iota, cartan, x, i).first, 1)


def e_tilde(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, i: int) -> Optional[ZSeq]:
    ms = m_set(iota, cartan, x, i)
    if ms.value <= 0:
        return None
    return x.add(ms.last, -1)


def beta_value(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, k: int) -> int:
    """``beta_k(x) = sigma_k(x) - sigma_{k+}(x)``; ``beta_0 = 0``."""
    if k == 0:
        return 0
    kp = k_plus(iota, k)
    ik = iota[k]
    return x[k] + sum(cartan(ik, iota[j]) * x[j] for j in range(k + 1, kp)) + x[kp]


def E_k(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, k: int) -> Optional[ZSeq]:
    if beta_value(iota, cartan, x, k) > 0:
        return x.add(k, -1)
    return None


def F_k(iota: IndexSequence, cartan: CartanMatrix, x: ZSeq, k: int) -> Optional[ZSeq]:
    km = k_minus(iota, k)
    if km == 0 or beta_value(iota, cartan, x, km) < 0:
        return x.add(k, 1)
    return None


def canonical_key(x: ZSeq, length: int):
    """Sort key: total, then the sequence read from its highest position down."""
    return (x.total, tuple(reversed(x.padded(length))))


def canonical_order(xs: Iterable[ZSeq]) -> list[ZSeq]:
    xs = list(xs)
    length = max((x.support_max for x in xs), default=0)
    return sorted(xs, key=lambda x: canonical_key(x, length))


@dataclass
class CrystalGraph:
    """A finite piece of a crystal graph with nodes in canonical order."""

    iota: IndexSequence
    cartan: CartanMatrix
    depth: int
    nodes: list[ZSeq]
    edges: list[tuple[ZSeq, int, ZSeq]]
    truncated: bool = False  # a node cap stopped the search before ``depth``

    def __post_init__(self):
        self._index = {x: pos for pos, x in enumerate(self.nodes)}
        self._succ = {(a, i): b for a, i, b in self.edges}

    def index(self, x: ZSeq) -> int:
        return self._index[x]

    def __contains__(self, x: ZSeq) -> bool:
        return x in self._index

    def node_set(self) -> frozenset[ZSeq]:
        return frozenset(self.nodes)

    def layer_counts(self) -> list[int]:
        counts = [0] * (self.depth + 1)
        for x in self.nodes:
            counts[x.total] += 1
        return counts

    def labels(self, x: ZSeq) -> tuple[WeightVector, tuple[int, ...], tuple[int, ...]]:
        n = self.cartan.n
        eps = tuple(eps_i(self.iota, self.cartan, x, i) for i in range(1, n + 1))
        w = wt(self.iota, x)
        phi = tuple(w.pairing(self.cartan, i) + eps[i - 1] for i in range(1, n + 1))
        return w, eps, phi

    def successor(self, x: ZSeq, i: int) -> Optional[ZSeq]:
        """Target of the ``i``-edge out of ``x`` if it lies in this piece."""
        return self._succ.get((x, i))


def enumerate_image(
    iota: IndexSequence, cartan: CartanMatrix, depth: int, max_nodes: Optional[int] = None
) -> CrystalGraph:
    """Everything reachable from the zero sequence by at most ``depth`` f-operators.

    If the next layer would push the node count past ``max_nodes`` the search
    stops after the last complete layer and the graph is marked truncated.
    """
    check_compatible(cartan, iota)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    zero = ZSeq.zero()
    seen = {zero}
    layer = [zero]
    edges = []
    reached, truncated = 0, False
    for _ in range(depth):
        nxt, fresh, new_edges = [], set(), []
        for x in layer:
            for i in range(1, cartan.n + 1):
                y = f_tilde(iota, cartan, x, i)
                new_edges.append((x, i, y))
                if y not in seen and y not in fresh:
                    fresh.add(y)
                    nxt.append(y)
        if max_nodes is not None and len(seen) + len(nxt) > max_nodes:
            truncated = True
            break
        seen.update(nxt)
        edges.extend(new_edges)
        layer = nxt
        reached += 1
    depth = reached
    nodes = canonical_order(seen)
    pos = {x: p for p, x in enumerate(nodes)}
    edges.sort(key=lambda e: (pos[e[0]], e[1]))
    return CrystalGraph(iota, cartan, depth, nodes, edges, truncated)


def _f_candidates(iota: IndexSequence, x: ZSeq) -> range:
    m = x.support_max
    bound = max(iota.first_occurrence(i) for i in range(1, iota.n + 1))
    if m:
        bound = max(bound, max(k_plus(iota, j) for j in range(1, m + 1)))
    return range(1, bound + 1)


def _closure(iota, cartan, depth, use_e: bool) -> set[ZSeq]:
    check_compatible(cartan, iota)
    if depth < 0:
        raise ValueError("depth must be >= 0")
    zero = ZSeq.zero()
    seen = {zero}
    layer = [zero]
    for _ in range(depth):
        nxt = []
        for x in layer:
            # F_k with k beyond these candidates needs beta of an empty window: never fires
            out = [F_k(iota, cartan, x, k) for k in _f_candidates(iota, x)]
            if use_e:
                out += [E_k(iota, cartan, x, k) for k in range(1, x.support_max + 1)]
            for y in out:
                if y is not None and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        layer = nxt
    return seen


def enumerate_phi_plus(iota: IndexSequence, cartan: CartanMatrix, depth: int) -> set[ZSeq]:
    """Closure of the zero sequence under the local operators ``F_k`` (at most ``depth`` steps)."""
    return _closure(iota, cartan, depth, use_e=False)


def enumerate_phi(iota: IndexSequence, cartan: CartanMatrix, depth: int) -> set[ZSeq]:
    """Closure of the zero sequence under both ``E_k`` and ``F_k`` (at most ``depth`` steps)."""
    return _closure(iota, cartan, depth, use_e=True)
