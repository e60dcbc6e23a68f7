"""Cartan matrices and infinite index sequences.

Indices of simple roots are 1-based throughout, as are positions ``k`` in an
index sequence ``iota = (..., i_3, i_2, i_1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence


class CartanError(ValueError):
    """The supplied matrix is not a symmetrizable generalized Cartan matrix."""


class InvalidFamilyParams(ValueError):
    pass


class InvalidIndexSequence(ValueError):
    pass


@dataclass(frozen=True)
class CartanMatrix:
    """Generalized Cartan matrix ``a[i][j] = <h_i, alpha_j>``.

    Construction validates the generalized Cartan conditions and
    symmetrizability; a failure raises :class:`CartanError` naming the
    violated condition.
    """

    rows: tuple[tuple[int, ...], ...]
    name: str = ""
    symmetrizer: tuple[Fraction, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows)
        if n == 0:
            raise CartanError("Cartan matrix must have rank >= 1")
        for i, r in enumerate(rows, start=1):
            if len(r) != n:
                raise CartanError(f"row {i} has length {len(r)}, expected {n} (matrix must be square)")
        for i in range(n):
            if rows[i][i] != 2:
                raise CartanError(f"diagonal entry a[{i + 1},{i + 1}] = {rows[i][i]}, must be 2")
            for j in range(n):
                if i == j:
                    continue
                if rows[i][j] > 0:
                    raise CartanError(f"off-diagonal entry a[{i + 1},{j + 1}] = {rows[i][j]} must be <= 0")
                if (rows[i][j] == 0) != (rows[j][i] == 0):
                    raise CartanError(
                        f"a[{i + 1},{j + 1}] = {rows[i][j]} but a[{j + 1},{i + 1}] = {rows[j][i]}: "
                        "zero pattern must be symmetric"
                    )
        object.__setattr__(self, "symmetrizer", _symmetrize(rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __call__(self, i: int, j: int) -> int:
        """Return ``<h_i, alpha_j>`` for 1-based ``i, j``."""
        return self.rows[i - 1][j - 1]

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def _symmetrize(rows) -> tuple[Fraction, ...]:
    # propagate d_j = d_i a_ij / a_ji along nonzero entries, one component at a time
    n = len(rows)
    d: list[Fraction | None] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j == i or rows[i][j] == 0:
                    continue
                want = d[i] * rows[i][j] / rows[j][i]
                if d[j] is None:
                    d[j] = want
                    stack.append(j)
                elif d[j] != want:
                    raise CartanError(
                        f"matrix is not symmetrizable: inconsistent ratio d_{j + 1}/d_{i + 1} "
                        f"({d[j]} vs {want})"
                    )
    return tuple(d)  # type: ignore[arg-type]


def cartan_A(n: int) -> CartanMatrix:
    if n < 1:
        raise InvalidFamilyParams(f"A(n) needs n >= 1, got {n}")
    rows = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    return CartanMatrix(tuple(map(tuple, rows)), name=f"A{n}")


def cartan_rank2(c1: int, c2: int) -> CartanMatrix:
    """``<h_1, alpha_2> = -c1`` and ``<h_2, alpha_1> = -c2``."""
    if c1 < 0 or c2 < 0 or (c1 == 0) != (c2 == 0):
        raise InvalidFamilyParams(f"rank2 needs c1 = c2 = 0 or both >= 1, got ({c1}, {c2})")
    return CartanMatrix(((2, -c1), (-c2, 2)), name=f"rank2:{c1},{c2}")


def cartan_affine_A(n: int) -> CartanMatrix:
    """Cartan matrix of type A^(1)_{n-1} (size n, n >= 3)."""
    if n < 3:
        raise InvalidFamilyParams(f"affineA(n) needs n >= 3, got {n}")
    rows = [
        [2 if i == j else (-1 if abs(i - j) in (1, n - 1) else 0) for j in range(n)]
        for i in range(n)
    ]
    return CartanMatrix(tuple(map(tuple, rows)), name=f"affineA{n}")


@dataclass(frozen=True)
class FamilySpec:
    kind: str  # "A" | "rank2" | "affineA"
    params: tuple[int, ...]

    def __str__(self):
        if self.kind == "rank2":
            return f"rank2:{self.params[0]},{self.params[1]}"
        return f"{self.kind}{self.params[0]}"


def builtin_family(spec: FamilySpec | str) -> CartanMatrix:
    if isinstance(spec, str):
        spec = parse_family(spec)
    if spec.kind == "A":
        return cartan_A(*spec.params)
    if spec.kind == "rank2":
        return cartan_rank2(*spec.params)
    if spec.kind == "affineA":
        return cartan_affine_A(*spec.params)
    raise InvalidFamilyParams(f"unknown family kind {spec.kind!r}")


def parse_family(text: str) -> FamilySpec:
    """Parse ``A3``, ``rank2:2,2`` or ``affineA3``."""
    t = text.strip()
    try:
        if t.lower().startswith("rank2:"):
            c1, c2 = (int(v) for v in t.split(":", 1)[1].split(","))
            return FamilySpec("rank2", (c1, c2))
        if t.lower().startswith("affinea"):
            return FamilySpec("affineA", (int(t[7:].lstrip(":")),))
        if t[:1] in "Aa":
            return FamilySpec("A", (int(t[1:].lstrip(":")),))
    except ValueError as exc:
        raise InvalidFamilyParams(f"cannot parse family {text!r}") from exc
    raise InvalidFamilyParams(f"unknown family {text!r}; expected An, rank2:c1,c2 or affineAn")


@dataclass(frozen=True)
class IndexSequence:
    """An infinite index sequence ``k -> i_k`` given by a finite prefix and a cycle.

    ``IndexSequence.periodic((1, 2, 3))`` is ``i_1 = 1, i_2 = 2, i_3 = 3, i_4 = 1, ...``.
    """

    n: int
    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(int(v) for v in self.prefix))
        object.__setattr__(self, "cycle", tuple(int(v) for v in self.cycle))
        if not self.cycle:
            raise InvalidIndexSequence("cycle must be nonempty")
        for v in self.prefix + self.cycle:
            if not 1 <= v <= self.n:
                raise InvalidIndexSequence(f"index {v} outside [1, {self.n}]")
        missing = set(range(1, self.n + 1)) - set(self.cycle)
        if missing:
            raise InvalidIndexSequence(f"indices {sorted(missing)} do not recur (absent from cycle)")
        # rank 1 cannot avoid equal neighbours; every other rank must
        if self.n > 1:
            window = self.prefix + self.cycle + self.cycle[:1]
            for k in range(len(window) - 1):
                if window[k] == window[k + 1]:
                    raise InvalidIndexSequence(
                        f"equal neighbours i_{k + 1} = i_{k + 2} = {window[k]}"
                    )

    @classmethod
    def periodic(cls, order: Sequence[int]) -> "IndexSequence":
        order = tuple(order)
        if sorted(order) != list(range(1, len(order) + 1)):
            raise InvalidIndexSequence(f"periodic order {order} is not a permutation of [1..{len(order)}]")
        return cls(len(order), (), order)

    @classmethod
    def standard(cls, n: int) -> "IndexSequence":
        return cls.periodic(range(1, n + 1))

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def is_periodic(self) -> bool:
        return not self.prefix and sorted(self.cycle) == list(range(1, self.n + 1))

    def __getitem__(self, k: int) -> int:
        if k < 1:
            raise IndexError(f"positions start at 1, got {k}")
        p = len(self.prefix)
        if k <= p:
            return self.prefix[k - 1]
        return self.cycle[(k - p - 1) % len(self.cycle)]

    def first_occurrence(self, i: int) -> int:
        return self.next_occurrence(i, 0)

    def next_occurrence(self, i: int, after: int) -> int:
        """Smallest ``j > after`` with ``i_j = i``."""
        return _next_occurrence(self, i, after)

    def describe(self) -> dict:
        if self.is_periodic:
            return {"periodic": list(self.cycle)}
        return {"prefix": list(self.prefix), "cycle": list(self.cycle)}


@lru_cache(maxsize=None)
def _next_occurrence(iota: IndexSequence, i: int, after: int) -> int:
    j = after + 1
    while iota[j] != i:
        j += 1
    return j


def k_plus(iota: IndexSequence, k: int) -> int:
    """Minimal ``j > k`` with ``i_j = i_k``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if iota.is_periodic:
        return k + iota.n
    return iota.next_occurrence(iota[k], k)


@lru_cache(maxsize=None)
def _k_minus_scan(iota: IndexSequence, k: int) -> int:
    i = iota[k]
    for j in range(k - 1, 0, -1):
        if iota[j] == i:
            return j
    return 0


def k_minus(iota: IndexSequence, k: int) -> int:
    """Maximal ``j < k`` with ``i_j = i_k``, or 0 when ``k`` is a first occurrence."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if iota.is_periodic:
        return k - iota.n if k > iota.n else 0
    return _k_minus_scan(iota, k)


def check_compatible(cartan: CartanMatrix, iota: IndexSequence) -> None:
    if cartan.n != iota.n:
        raise InvalidIndexSequence(f"index sequence has rank {iota.n}, Cartan matrix has rank {cartan.n}")
