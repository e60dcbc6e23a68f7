"""Integer linear forms on sequences and the piecewise-linear maps ``S_k``.

``xi_closure`` closes a set of coordinate forms under every ``S_k`` inside a
finite window of positions; ``check_positivity`` scans that closure for a
negative coefficient at a first-occurrence position.
"""
from __future__ import annotations

import json
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .cartan import CartanMatrix, IndexSequence, check_compatible, k_minus, k_plus
from .zinf import ZSeq

DEFAULT_MAX_COEFFICIENT = 10**6
DEFAULT_MAX_FORMS = 10**5


class WindowTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class LinearForm:
    """A finitely supported form ``sum_j c_j x_j`` with integer coefficients.

    ``terms`` holds ``(j, c_j)`` pairs sorted by ``j`` with no zero ``c_j``.
    """

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        acc: dict[int, int] = {}
        for j, c in self.terms:
            if j < 1:
                raise ValueError(f"positions start at 1, got {j}")
            acc[j] = acc.get(j, 0) + int(c)
        object.__setattr__(self, "terms", tuple(sorted((j, c) for j, c in acc.items() if c)))

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, int]) -> "LinearForm":
        return cls(tuple(coeffs.items()))

    @classmethod
    def coordinate(cls, j: int) -> "LinearForm":
        return cls(((j, 1),))

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def coeff(self, j: int) -> int:
        for jj, c in self.terms:
            if jj == j:
                return c
            if jj > j:
                break
        return 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.terms)

    @property
    def support_max(self) -> int:
        return self.terms[-1][0] if self.terms else 0

    @property
    def support_min(self) -> int:
        return self.terms[0][0] if self.terms else 0

    @property
    def max_abs_coeff(self) -> int:
        return max((abs(c) for _, c in self.terms), default=0)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(self.terms + other.terms)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.scale(-1)

    def __neg__(self) -> "LinearForm":
        return self.scale(-1)

    def scale(self, s: int) -> "LinearForm":
        return LinearForm(tuple((j, s * c) for j, c in self.terms))

    def __call__(self, x: ZSeq) -> int:
        return sum(c * x[j] for j, c in self.terms)

    def shift(self, offset: int) -> "LinearForm":
        return LinearForm(tuple((j + offset, c) for j, c in self.terms))

    def __str__(self) -> str:
        return format_form(self)


def format_form(phi: LinearForm, relation: str = ">=") -> str:
    """``3*x2 - 1*x5 >= 0``; the zero form prints as ``0 >= 0``."""
    if not phi.terms:
        return f"0 {relation} 0"
    parts = []
    for pos, (j, c) in enumerate(phi.terms):
        mag = f"{abs(c)}*x{j}"
        if pos == 0:
            parts.append(mag if c > 0 else f"-{mag}")
        else:
            parts.append(("+ " if c > 0 else "- ") + mag)
    return " ".join(parts) + f" {relation} 0"


def form_to_json(phi: LinearForm) -> list[list[int]]:
    return [[j, c] for j, c in phi.terms]


def form_from_json(data) -> LinearForm:
    return LinearForm(tuple((int(j), int(c)) for j, c in data))


def dumps_forms(forms: Iterable[LinearForm]) -> str:
    return json.dumps([form_to_json(f) for f in forms])


def beta_k(iota: IndexSequence, cartan: CartanMatrix, k: int) -> LinearForm:
    """``x_k + sum_{k<j<k+} <h_{i_k}, alpha_{i_j}> x_j + x_{k+}``; ``beta_0 = 0``."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k == 0:
        return LinearForm()
    return _beta_cached(iota, cartan, k)


@lru_cache(maxsize=None)
def _beta_cached(iota, cartan, k):
    kp = k_plus(iota, k)
    ik = iota[k]
    terms = [(k, 1)] + [(j, cartan(ik, iota[j])) for j in range(k + 1, kp)] + [(kp, 1)]
    return LinearForm(tuple(terms))


def sigma_form(iota: IndexSequence, cartan: CartanMatrix, k: int, upto: int) -> LinearForm:
    """``sigma_k`` truncated to positions ``<= upto``."""
    ik = iota[k]
    return LinearForm(((k, 1),) + tuple((j, cartan(ik, iota[j])) for j in range(k + 1, upto + 1)))


def apply_S_k(iota: IndexSequence, cartan: CartanMatrix, phi: LinearForm, k: int) -> LinearForm:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    c = phi.coeff(k)
    if c == 0:
        return phi
    if c > 0:
        return phi - beta_k(iota, cartan, k).scale(c)
    km = k_minus(iota, k)
    if km == 0:
        return phi
    return phi - beta_k(iota, cartan, km).scale(c)


@dataclass
class FormClosure:
    """Result of a windowed closure; behaves like a set of forms.

    ``truncated`` is set when a cap stopped the search: the forms are then a
    sound subset of the windowed closure, not all of it.
    """

    forms: frozenset[LinearForm]
    window: int
    truncated: bool = False
    reason: str = ""
    dropped_by_window: int = field(default=0, repr=False)

    def __iter__(self):
        return iter(self.forms)

    def __len__(self):
        return len(self.forms)

    def __contains__(self, phi):
        return phi in self.forms

    def sorted(self) -> list[LinearForm]:
        return sorted(self.forms, key=lambda f: (f.support_min, f.support_max, f.terms))


def _closure(
    iota, cartan, window, seed_indices, positive_only, max_coefficient, max_forms
) -> FormClosure:
    check_compatible(cartan, iota)
    if window < iota.period:
        raise WindowTooSmall(f"window {window} is smaller than the period {iota.period}")
    seeds = range(1, window + 1) if seed_indices is None else sorted(seed_indices)
    for j in seeds:
        if not 1 <= j <= window:
            raise WindowTooSmall(f"seed x_{j} lies outside the window [1, {window}]")
    seen = {LinearForm.coordinate(j) for j in seeds}
    queue = deque(seen)
    truncated, reason, dropped = False, "", 0
    while queue:
        phi = queue.popleft()
        for k, c in phi.terms:
            if positive_only and c <= 0:
                continue
            psi = apply_S_k(iota, cartan, phi, k)
            if psi == phi or psi in seen:
                continue
            if psi.support_max > window:
                dropped += 1
                continue
            if psi.max_abs_coeff > max_coefficient:
                truncated, reason = True, f"coefficient cap {max_coefficient} exceeded"
                continue
            if len(seen) >= max_forms:
                truncated, reason = True, f"form cap {max_forms} reached"
                queue.clear()
                break
            seen.add(psi)
            queue.append(psi)
    return FormClosure(frozenset(seen), window, truncated, reason, dropped)


def xi_closure(
    iota: IndexSequence,
    cartan: CartanMatrix,
    window: int,
    seed_indices: Optional[Iterable[int]] = None,
    max_coefficient: int = DEFAULT_MAX_COEFFICIENT,
    max_forms: int = DEFAULT_MAX_FORMS,
) -> FormClosure:
    """Close coordinate forms under every ``S_k`` whose result stays inside ``[1, window]``.

    Seeds default to ``x_1, ..., x_window``.
    """
    return _closure(iota, cartan, window, seed_indices, False, max_coefficient, max_forms)


def xi_plus_closure(
    iota: IndexSequence,
    cartan: CartanMatrix,
    window: int,
    seed_indices: Optional[Iterable[int]] = None,
    max_coefficient: int = DEFAULT_MAX_COEFFICIENT,
    max_forms: int = DEFAULT_MAX_FORMS,
) -> FormClosure:
    """Like :func:`xi_closure` but ``S_k`` is applied only where the coefficient at ``k`` is positive."""
    return _closure(iota, cartan, window, seed_indices, True, max_coefficient, max_forms)


@dataclass
class PositivityReport:
    holds: bool
    window: int
    n_forms: int
    witnesses: list[tuple[LinearForm, int]]  # (form, first-occurrence position with negative coefficient)
    truncated: bool = False


def first_occurrences(iota: IndexSequence, window: int) -> list[int]:
    return [k for k in range(1, window + 1) if k_minus(iota, k) == 0]


def check_positivity(
    iota: IndexSequence,
    cartan: CartanMatrix,
    window: int,
    closure: Optional[FormClosure] = None,
    **caps,
) -> PositivityReport:
    if closure is None:
        closure = xi_closure(iota, cartan, window, **caps)
    firsts = first_occurrences(iota, window)
    witnesses = []
    for phi in closure.sorted():
        for k in firsts:
            if phi.coeff(k) < 0:
                witnesses.append((phi, k))
                break
    return PositivityReport(not witnesses, window, len(closure), witnesses, closure.truncated)


def cone_member(x: ZSeq, forms: Iterable[LinearForm]) -> tuple[bool, Optional[LinearForm]]:
    """Whether ``x >= 0`` and every form is ``>= 0`` on ``x``; also the first violated form.

    A negative coordinate is reported as the violated coordinate form.
    """
    for k, v in x.items():
        if v < 0:
            return False, LinearForm.coordinate(k)
    for phi in forms:
        if phi(x) < 0:
            return False, phi
    return True, None
