"""Explicit inequality systems for rank 2, type A_n and affine type A.

Double indices ``(j, i)`` are kept as pairs; the two flat conventions are
:func:`an_flat` (stride ``n``) and :func:`affine_flat` (stride ``n - 1`` plus
the shift ``k - 1``).
"""
from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Optional, Union

from .forms import LinearForm

UNBOUNDED = float("inf")


class PartitionNotAdmissible(ValueError):
    pass


# ---------------------------------------------------------------- rank 2


def chebyshev_P(lam: int, k: int) -> int:
    """``P_k(lam)`` from ``P_k = lam P_{k-1} - P_{k-2}``, ``P_0 = 1``, ``P_{-1} = 0``."""
    if k < -1:
        raise ValueError(f"k must be >= -1, got {k}")
    prev, cur = 0, 1
    if k == -1:
        return 0
    for _ in range(k):
        prev, cur = cur, lam * cur - prev
    return cur


def rank2_a(c1: int, c2: int, length: int) -> list[int]:
    """``[a_0, ..., a_length]`` by the alternating two-term recursion."""
    a = [0, 1]
    while len(a) <= length:
        l = len(a)  # computing a_l
        c = c1 if l % 2 == 0 else c2
        a.append(c * a[l - 1] - a[l - 2])
    return a[: length + 1]


def rank2_a_chebyshev(c1: int, c2: int, l: int) -> int:
    """``a_l`` from the Chebyshev closed form (cross-check for :func:`rank2_a`)."""
    lam = c1 * c2 - 2
    if l == 0:
        return 0
    if l == 1:
        return 1
    if l % 2 == 0:
        return c1 * chebyshev_P(lam, l // 2 - 1)
    k = (l - 1) // 2
    return chebyshev_P(lam, k) + chebyshev_P(lam, k - 1)


def rank2_lmax(c1: int, c2: int) -> Union[int, float]:
    """Minimal ``l`` with ``a_{l+1} < 0``, or :data:`UNBOUNDED` when ``c1 c2 >= 4``."""
    if c1 * c2 >= 4:
        return UNBOUNDED
    a = rank2_a(c1, c2, 8)
    return next(l for l in range(8) if a[l + 1] < 0)


@dataclass(frozen=True)
class Rank2Coefficients:
    c1: int
    c2: int
    a: tuple[int, ...]
    a_prime: tuple[int, ...]
    l_max: Union[int, float]

    @property
    def lam(self) -> int:
        return self.c1 * self.c2 - 2

    @classmethod
    def build(cls, c1: int, c2: int, length: int = 12) -> "Rank2Coefficients":
        lm = rank2_lmax(c1, c2)
        L = max(length, int(lm) + 1) if lm != UNBOUNDED else length
        return cls(c1, c2, tuple(rank2_a(c1, c2, L)), tuple(rank2_a(c2, c1, L)), lm)


@dataclass(frozen=True)
class InequalitySystem:
    """Forms required ``>= 0`` plus positions forced to vanish.

    ``vanish_from`` means ``x_k = 0`` for every ``k >= vanish_from``;
    ``vanishing`` lists further individual positions (within a box).
    """

    forms: tuple[LinearForm, ...]
    vanish_from: Optional[int] = None
    vanishing: tuple[int, ...] = ()

    def admits(self, x) -> bool:
        if any(v < 0 for _, v in x.items()):
            return False
        if self.vanish_from is not None and x.support_max >= self.vanish_from:
            return False
        if any(x[k] for k in self.vanishing):
            return False
        return all(f(x) >= 0 for f in self.forms)

    def free_positions(self, box: int) -> list[int]:
        top = box if self.vanish_from is None else min(box, self.vanish_from - 1)
        banned = set(self.vanishing)
        return [k for k in range(1, top + 1) if k not in banned]


def rank2_generators(c1: int, c2: int, length: int) -> InequalitySystem:
    """``a_l x_l - a_{l-1} x_{l+1} >= 0`` for ``1 <= l < min(l_max, length + 1)``."""
    lm = rank2_lmax(c1, c2)
    top = length if lm == UNBOUNDED else min(int(lm) - 1, length)
    a = rank2_a(c1, c2, top + 1)
    forms = tuple(LinearForm(((l, a[l]), (l + 1, -a[l - 1]))) for l in range(1, top + 1))
    return InequalitySystem(forms, None if lm == UNBOUNDED else int(lm) + 1)


# ---------------------------------------------------------------- type A_n


def an_flat(n: int, j: int, i: int) -> Optional[int]:
    """``(j; i) -> (j - 1) n + i``, or ``None`` outside ``j >= 1, 1 <= i <= n``."""
    if j < 1 or not 1 <= i <= n:
        return None
    return (j - 1) * n + i


def an_double(n: int, k: int) -> tuple[int, int]:
    return (k - 1) // n + 1, (k - 1) % n + 1


def _x(n: int, j: int, i: int, coeff: int):
    k = an_flat(n, j, i)
    return [] if k is None else [(k, coeff)]


def is_admissible_partition(n: int, i: int, lam: tuple[int, ...]) -> bool:
    if len(lam) != i:
        return False
    bound = n + 1 - i
    return all(bound >= lam[0] if t == 0 else lam[t - 1] >= lam[t] for t in range(i)) and lam[-1] >= 0


def admissible_partitions(n: int, i: int) -> Iterator[tuple[int, ...]]:
    """All weakly decreasing ``i``-tuples in ``[0, n + 1 - i]``."""
    for combo in itertools.combinations_with_replacement(range(n + 1 - i, -1, -1), i):
        yield tuple(combo)


def phi_lambda(n: int, j: int, i: int, lam: tuple[int, ...]) -> LinearForm:
    lam = tuple(lam)
    if not is_admissible_partition(n, i, lam):
        raise PartitionNotAdmissible(f"{lam} is not a {i}-admissible partition for n = {n}")
    terms = []
    for k in range(1, i + 1):
        lk = lam[k - 1]
        terms += _x(n, j + k - 1, i - k + 1 + lk, 1)
        terms += _x(n, j + k, i - k + lk, -1)
    return LinearForm(tuple(terms))


def an_s_chain_form(n: int, j: int, i: int, lam: tuple[int, ...], apply_s) -> LinearForm:
    """The same form built as a composition of ``S`` maps.

    ``apply_s(phi, k)`` must apply ``S_k`` (flat index); double indices
    outside ``[1, n]`` act as the identity.
    """
    phi = LinearForm(tuple(_x(n, j, i, 1)))
    for k in range(1, i + 1):
        jj, ii = j + k - 1, i - k + 1
        for t in range(lam[k - 1]):
            flat = an_flat(n, jj, ii + t)
            if flat is not None:
                phi = apply_s(phi, flat)
    return phi


def an_theorem_system(n: int, box: int) -> InequalitySystem:
    """Chains ``x_{1;i} >= x_{2;i-1} >= ... >= x_{i;1} >= 0`` and vanishing for ``i + j > n + 1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    forms = []
    for i in range(1, n + 1):
        for m in range(1, i):
            forms.append(
                LinearForm(tuple(_x(n, m, i - m + 1, 1) + _x(n, m + 1, i - m, -1)))
            )
        forms.append(LinearForm(tuple(_x(n, i, 1, 1))))
    vanishing = tuple(k for k in range(1, box + 1) if sum(an_double(n, k)) > n + 1)
    return InequalitySystem(tuple(forms), None, vanishing)


def partition_S_action(
    n: int, j: int, i: int, lam: tuple[int, ...], target: tuple[int, int]
) -> tuple[int, ...]:
    """The partition indexing ``S_{target} phi^(lam)_{j;i}``."""
    lam = tuple(lam)
    if not is_admissible_partition(n, i, lam):
        raise PartitionNotAdmissible(f"{lam} is not a {i}-admissible partition for n = {n}")
    for k in range(1, i + 1):
        lk = lam[k - 1]
        if target == (j + k - 1, i - k + 1 + lk):
            return _bump(n, i, lam, k, +1)
        if target == (j + k, i - k + lk):
            return _bump(n, i, lam, k, -1)
    return lam


def _bump(n, i, lam, k, delta):
    out = list(lam)
    out[k - 1] += delta
    out = tuple(out)
    return out if is_admissible_partition(n, i, out) else lam


# ---------------------------------------------------------------- affine type A


def affine_flat(n: int, j: int, i: int, k: int = 1) -> int:
    """``j;i[k] = k - 1 + (j - 1)(n - 1) + i``; ``i = n`` wraps to ``(j + 1; 1)``."""
    return k - 1 + (j - 1) * (n - 1) + i


def affine_double(n: int, pos: int, k: int = 1) -> tuple[int, int]:
    r = pos - k
    if r < 0:
        raise ValueError(f"position {pos} lies before {k}")
    return r // (n - 1) + 1, r % (n - 1) + 1


def _norm(n: int, j: int, i: int) -> tuple[int, int]:
    # (j; 0) = (j - 1; n - 1) and (j; n) = (j + 1; 1)
    while i < 1:
        j, i = j - 1, i + (n - 1)
    while i > n - 1:
        j, i = j + 1, i - (n - 1)
    return j, i


@dataclass(frozen=True)
class AdmissibleMatrix:
    """Integer matrix ``c[j; i]`` on rows ``j >= 1``, columns ``1..n-1``.

    Stored as the finite rows ``1..J``; every row past ``J`` is zero.
    """

    n: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = [tuple(int(v) for v in r) for r in self.rows]
        for r in rows:
            if len(r) != self.n - 1:
                raise ValueError(f"rows must have length n - 1 = {self.n - 1}")
        while rows and not any(rows[-1]):
            rows.pop()
        object.__setattr__(self, "rows", tuple(rows))

    @classmethod
    def from_entries(cls, n: int, entries: Mapping[tuple[int, int], int]) -> "AdmissibleMatrix":
        J = max((j for (j, _), v in entries.items() if v), default=0)
        rows = [[0] * (n - 1) for _ in range(J)]
        for (j, i), v in entries.items():
            if v:
                rows[j - 1][i - 1] += v
        return cls(n, tuple(map(tuple, rows)))

    @classmethod
    def from_partial_sums(cls, n: int, s_rows: Iterable[Iterable[int]]) -> "AdmissibleMatrix":
        """Difference a partial-sum array (rows ``1..J``) back into entries."""
        s_rows = [tuple(r) for r in s_rows]
        prev = (0,) * (n - 1)
        rows = []
        for r in s_rows:
            rows.append(tuple(a - b for a, b in zip(r, prev)))
            prev = r
        # beyond the last given row the partial sums settle at delta_{i,1}
        tail = tuple(int(i == 0) - p for i, p in enumerate(prev))
        if any(tail):
            rows.append(tail)
        return cls(n, tuple(rows))

    @classmethod
    def c0(cls, n: int) -> "AdmissibleMatrix":
        return cls(n, ((1,) + (0,) * (n - 2),))

    @property
    def height(self) -> int:
        """Index of the last nonzero row."""
        return len(self.rows)

    def c(self, j: int, i: int) -> int:
        j, i = _norm(self.n, j, i)
        if j < 1 or j > len(self.rows):
            return 0
        return self.rows[j - 1][i - 1]

    def s(self, j: int, i: int) -> int:
        """Partial sum ``c[1; i] + ... + c[j; i]`` (settles at ``delta_{i,1}``)."""
        j, i = _norm(self.n, j, i)
        if j < 1:
            return 0
        return sum(self.rows[t][i - 1] for t in range(min(j, len(self.rows))))

    def s_rows(self, J: int) -> list[list[int]]:
        return [[self.s(j, i) for i in range(1, self.n)] for j in range(1, J + 1)]

    def entries(self) -> dict[tuple[int, int], int]:
        return {
            (j, i): v
            for j, row in enumerate(self.rows, start=1)
            for i, v in enumerate(row, start=1)
            if v
        }


def affine_is_admissible(C: AdmissibleMatrix) -> tuple[bool, Optional[str]]:
    """Check the four partial-sum conditions; returns ``(ok, violated condition)``."""
    n, J = C.n, C.height
    cols = n - 1
    rows = C.s_rows(J + 2)
    for j in range(J + 2):
        for i in range(cols):
            if rows[j][i] < 0:
                return False, f"nonnegativity: s[{j + 1};{i + 1}] = {rows[j][i]} < 0"
    # partial sums are constant past J, so the tail condition is a check on row J
    for i in range(cols):
        if rows[J][i] != int(i == 0):
            return False, f"tail: s[j;{i + 1}] settles at {rows[J][i]}, expected {int(i == 0)}"
    running = 0
    for j in range(J + 1):
        for i in range(cols):
            running += rows[j][i]
            if running > j + 1:
                return False, f"running sum {running} > {j + 1} at ({j + 1};{i + 1})"
    # past row J+1 the running sum through row j is running + (j - J - 1)
    if running != J + 1:
        return False, f"running sum through row {J + 1} is {running}, must equal {J + 1} for large j"
    for j in range(J + 1):
        for i in range(cols):
            if rows[j][i] > 0:
                later = [rows[j][t] for t in range(i + 1, cols)] + [rows[j + 1][t] for t in range(i + 1)]
                if not any(v > 0 for v in later):
                    return False, f"successor: s[{j + 1};{i + 1}] > 0 but no later positive entry up to ({j + 2};{i + 1})"
    return True, None


def affine_form(C: AdmissibleMatrix, k: int = 1) -> LinearForm:
    """``sum c[j; i] x_{j;i[k]}``."""
    n = C.n
    return LinearForm(tuple((affine_flat(n, j, i, k), v) for (j, i), v in C.entries().items()))


def affine_matrix_of_form(phi: LinearForm, n: int, k: int = 1) -> AdmissibleMatrix:
    if phi.terms and phi.support_min < k:
        raise ValueError(f"form has support below position {k}")
    return AdmissibleMatrix.from_entries(n, {affine_double(n, p, k): c for p, c in phi.terms})


@dataclass(frozen=True)
class TypeI:
    j: int
    i: int


@dataclass(frozen=True)
class TypeII:
    j: int
    i: int


def affine_move(C: AdmissibleMatrix, move: Union[TypeI, TypeII]) -> Optional[AdmissibleMatrix]:
    """Partial-sum update realizing ``S_{j;i[k]}`` on ``phi_{C[k]}``.

    A zero entry at ``(j; i)`` leaves ``C`` unchanged.  ``None`` means the move
    does not apply: the entry has the wrong sign for the move type, or a
    type II move would reach above the first row.
    """
    n = C.n
    j, i = move.j, move.i
    if not (j >= 1 and 1 <= i <= n - 1):
        raise ValueError(f"({j};{i}) is not a valid index for n = {n}")
    cji = C.c(j, i)
    if cji == 0:
        return C
    entries = dict(C.entries())

    def bump(jj, ii, delta):
        jj, ii = _norm(n, jj, ii)
        if jj < 1:
            raise _OutOfRange
        entries[(jj, ii)] = entries.get((jj, ii), 0) + delta

    # shifting s at one position by d adds d to c there and -d one row below
    try:
        if isinstance(move, TypeI):
            if cji < 0:
                return None
            bump(j, i, -cji); bump(j + 1, i, cji)
            bump(j, i + 1, cji); bump(j + 1, i + 1, -cji)
        else:
            if cji > 0:
                return None
            if i == 1 and j <= 2:
                return None
            bump(j - 1, i - 1, -cji); bump(j, i - 1, cji)
            bump(j - 1, i, cji); bump(j, i, -cji)
    except _OutOfRange:
        return None
    return AdmissibleMatrix.from_entries(n, entries)


class _OutOfRange(Exception):
    pass


def _admissible_rows(n: int, J: int):
    cols = n - 1
    last = (1,) + (0,) * (cols - 1)

    def rec(j, prefix, running):
        # prefix: s rows 1..j-1; choose row j
        if j == J:
            row = last
            run = running + 1
            if run > j or run != J:
                return
            yield prefix + [row]
            return
        for row in itertools.product(range(j + 1), repeat=cols):
            run, ok = running, True
            for v in row:
                run += v
                if run > j:
                    ok = False
                    break
            if not ok:
                continue
            yield from rec(j + 1, prefix + [row], run)

    if J < 1:
        return
    yield from rec(1, [], 0)


def enumerate_admissible_direct(n: int, J: int, total_bound: Optional[int] = None) -> set[AdmissibleMatrix]:
    """Admissible matrices with rows past ``J`` zero, by enumerating partial sums.

    ``total_bound`` keeps only matrices with ``sum |c| <= total_bound``.
    """
    out = set()
    for s_rows in _admissible_rows(n, J):
        C = AdmissibleMatrix.from_partial_sums(n, s_rows)
        if C.height > J or not affine_is_admissible(C)[0]:
            continue
        if total_bound is not None and sum(abs(v) for v in C.entries().values()) > total_bound:
            continue
        out.add(C)
    return out


def enumerate_admissible_type1(n: int, J: int) -> set[AdmissibleMatrix]:
    """Closure of ``C_0`` under type I moves, keeping matrices with rows past ``J`` zero."""
    start = AdmissibleMatrix.c0(n)
    seen = {start}
    queue = deque([start])
    while queue:
        C = queue.popleft()
        for (j, i), v in C.entries().items():
            if v <= 0:
                continue
            D = affine_move(C, TypeI(j, i))
            if D is not None and D.height <= J and D not in seen:
                seen.add(D)
                queue.append(D)
    return seen


def enumerate_admissible(
    n: int, J: int, total_bound: Optional[int] = None, strategy: str = "direct"
) -> set[AdmissibleMatrix]:
    if J < 1:
        raise ValueError("J must be >= 1")
    if strategy == "direct":
        return enumerate_admissible_direct(n, J, total_bound)
    if strategy == "type1":
        found = enumerate_admissible_type1(n, J)
        if total_bound is not None:
            found = {C for C in found if sum(abs(v) for v in C.entries().values()) <= total_bound}
        return found
    raise ValueError(f"unknown strategy {strategy!r}")


def beta_decomposition(C: AdmissibleMatrix) -> dict[tuple[int, int], int]:
    """Nonzero ``d[j; i] = j - sum_{(j';i') <= (j;i)} s[j';i']``."""
    n = C.n
    out = {}
    running = 0
    for j in range(1, C.height + 2):
        for i in range(1, n):
            running += C.s(j, i)
            d = j - running
            if d:
                out[(j, i)] = d
    return out


def affine_beta(n: int, j: int, i: int, k: int = 1) -> LinearForm:
    """``x_{j;i} - x_{j;i+1} - x_{j+1;i} + x_{j+1;i+1}`` at shift ``k``."""
    f = lambda jj, ii: affine_flat(n, jj, ii, k)
    return LinearForm(((f(j, i), 1), (f(j, i + 1), -1), (f(j + 1, i), -1), (f(j + 1, i + 1), 1)))


def reconstruct_from_beta(C: AdmissibleMatrix, k: int = 1) -> LinearForm:
    """``x_k - sum d[j; i] beta_{j;i[k]}``."""
    phi = LinearForm.coordinate(k)
    for (j, i), d in beta_decomposition(C).items():
        phi = phi - affine_beta(C.n, j, i, k).scale(d)
    return phi
