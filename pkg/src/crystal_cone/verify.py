"""Exhaustive desk-scale checks tying the enumeration, the closures and the closed forms together."""
from __future__ import annotations

import json
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import closed_forms as cf
from .cartan import (
    CartanMatrix,
    FamilySpec,
    IndexSequence,
    builtin_family,
    check_compatible,
    parse_family,
)
from .forms import LinearForm, check_positivity, xi_closure, xi_plus_closure
from .zinf import ZSeq, enumerate_image, enumerate_phi, enumerate_phi_plus

PASS, FAIL, TRUNCATED = "pass", "fail", "truncated"


@dataclass
class VerificationReport:
    name: str
    parameters: dict
    status: str
    counterexamples: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status == FAIL and not self.counterexamples:
            raise ValueError("a failing report needs counterexamples")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["counterexamples"] = [_jsonable(c) for c in self.counterexamples]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"[{self.status.upper()}] {self.name}"]
        for k, v in sorted(self.parameters.items()):
            lines.append(f"  {k}: {v}")
        for k, v in self.counts.items():
            lines.append(f"  counts[{k}]: {v}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        for c in self.counterexamples[:20]:
            lines.append(f"  counterexample: {c}")
        if len(self.counterexamples) > 20:
            lines.append(f"  ... {len(self.counterexamples) - 20} more")
        return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, ZSeq):
        return list(obj.coords)
    if isinstance(obj, LinearForm):
        return [[j, c] for j, c in obj.terms]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(o) for o in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    return obj if isinstance(obj, (int, float, str, bool, type(None))) else str(obj)


def graded_counts(xs: Iterable[ZSeq], depth: int) -> list[int]:
    counts = [0] * (depth + 1)
    for x in xs:
        if 0 <= x.total <= depth:
            counts[x.total] += 1
    return counts


# ---------------------------------------------------------------- lattice points


def box_points(positions: Sequence[int], total: int) -> list[ZSeq]:
    """Nonnegative sequences supported on ``positions`` with coordinate sum at most ``total``."""
    positions = list(positions)
    out = []

    def rec(t, left, acc):
        if t == len(positions):
            out.append(ZSeq.from_dict(dict(zip(positions, acc))))
            return
        for v in range(left + 1):
            acc.append(v)
            rec(t + 1, left - v, acc)
            acc.pop()

    rec(0, total, [])
    return out


def _form_matrix(forms: Iterable[LinearForm], width: int) -> np.ndarray:
    rows = []
    for f in forms:
        r = [0] * width
        for j, c in f.terms:
            if j <= width:
                r[j - 1] = c
        rows.append(tuple(r))
    rows = sorted(set(rows))
    return np.array(rows, dtype=np.float64).reshape(len(rows), width)


def filter_points(points: Sequence[ZSeq], forms: Iterable[LinearForm], width: int) -> list[ZSeq]:
    """Points (supported in ``[1, width]``) on which every form is nonnegative."""
    if not points:
        return []
    F = _form_matrix(forms, width)
    if F.shape[0] == 0:
        return list(points)
    P = np.array([x.padded(width) for x in points], dtype=np.float64)
    ok = np.ones(len(points), dtype=bool)
    # chunked to bound memory; entries are small integers, exact in float64
    for start in range(0, F.shape[0], 4096):
        vals = P @ F[start : start + 4096].T
        ok &= (vals > -0.5).all(axis=1)
    return [x for x, keep in zip(points, ok) if keep]


def violated_forms(x: ZSeq, forms: Iterable[LinearForm]) -> list[LinearForm]:
    return [f for f in forms if f(x) < 0]


# ---------------------------------------------------------------- inclusion chain


def verify_inclusion_chain(
    cartan: CartanMatrix,
    iota: IndexSequence,
    depth: int,
    window: Optional[int] = None,
    **caps,
) -> VerificationReport:
    """The nested sets Sigma, Sigma+, Im, Phi+, Phi restricted to coordinate sum ``<= depth``.

    Sigma and Sigma+ are computed inside the box of nonnegative sequences whose
    support does not exceed that of the enumerated sets.
    """
    check_compatible(cartan, iota)
    im = enumerate_image(iota, cartan, depth).node_set()
    phi_plus = frozenset(enumerate_phi_plus(iota, cartan, depth))
    phi = frozenset(enumerate_phi(iota, cartan, depth))
    B = max((x.support_max for x in im | phi_plus | phi), default=0)
    K = window if window is not None else max(B + 2 * iota.period, iota.period)
    xi = xi_closure(iota, cartan, K, **caps)
    xi_plus = xi_plus_closure(iota, cartan, K, **caps)
    box = box_points(range(1, B + 1), depth)
    sigma = frozenset(filter_points(box, xi, B))
    sigma_plus = frozenset(filter_points(box, xi_plus, B))
    positivity = check_positivity(iota, cartan, K, closure=xi)

    sets = [("Sigma", sigma), ("Sigma+", sigma_plus), ("Im", im), ("Phi+", phi_plus), ("Phi", phi)]
    bad = []
    for (na, a), (nb, b) in zip(sets, sets[1:]):
        for x in sorted(a - b, key=lambda z: z.coords):
            bad.append({"inclusion": f"{na} <= {nb}", "element": x})
    negatives = sorted((x for x in phi if not x.is_nonnegative()), key=lambda z: z.coords)
    notes = [f"box support {B}, form window {K}, |Xi| = {len(xi)}, |Xi+| = {len(xi_plus)}"]
    if positivity.holds:
        for na, a in sets:
            for x in sorted(a ^ im, key=lambda z: z.coords):
                bad.append({"equality": f"{na} = Im", "element": x})
        for x in negatives:
            bad.append({"nonnegativity": "Phi in Z>=0", "element": x})
        notes.append("positivity holds: all five sets must coincide")
    else:
        notes.append(f"positivity fails ({len(positivity.witnesses)} witnesses): only inclusions checked")
    status = FAIL if bad else (TRUNCATED if xi.truncated or xi_plus.truncated else PASS)
    counts = {name: graded_counts(s, depth) for name, s in sets}
    counts["Phi_negative"] = [len(negatives)]
    return VerificationReport(
        "inclusion_chain",
        {"cartan": cartan.name or cartan.to_lists(), "iota": iota.describe(), "depth": depth, "window": K},
        status,
        bad,
        counts,
        notes,
    )


# ---------------------------------------------------------------- closed-form theorems


def _theorem_system(spec: FamilySpec, width: int, J: Optional[int]):
    """Forms (on positions <= width) and allowed positions for the family's closed-form cone."""
    if spec.kind == "rank2":
        c1, c2 = spec.params
        system = cf.rank2_generators(c1, c2, width)
        return list(system.forms), system.free_positions(width), []
    if spec.kind == "A":
        system = cf.an_theorem_system(spec.params[0], width)
        return list(system.forms), system.free_positions(width), []
    n = spec.params[0]
    if J is None:
        raise ValueError("affine family needs a row bound J")
    mats = cf.enumerate_admissible(n, J)
    forms = {cf.affine_form(C, k) for C in mats for k in range(1, width + 1)}
    note = (
        f"assumption: admissible forms with rows <= J = {J} ({len(mats)} matrices) decide "
        f"membership for sequences supported in [1, {width}]"
    )
    return list(forms), list(range(1, width + 1)), [note]


def verify_theorem(
    family: FamilySpec | str,
    depth: int,
    box_support: Optional[int] = None,
    J: Optional[int] = None,
) -> VerificationReport:
    """f-enumeration to ``depth`` against the closed-form cone.

    Forward: every enumerated element satisfies the closed-form system.
    Backward: every box point (sum ``<= depth``, support ``<= box_support``)
    satisfying the system is enumerated.  With the default box, which contains
    every enumerated element, this is set equality.
    """
    spec = parse_family(family) if isinstance(family, str) else family
    cartan = builtin_family(spec)
    iota = IndexSequence.standard(cartan.n)
    im = enumerate_image(iota, cartan, depth).node_set()
    B = box_support if box_support is not None else depth * cartan.n + cartan.n
    if spec.kind == "affineA" and J is None:
        J = depth + 2
    width = max(B, max((x.support_max for x in im), default=0)) + 1
    forms, free, notes = _theorem_system(spec, width, J)
    free_set = set(free)

    bad = []
    for x in sorted(im, key=lambda z: z.coords):
        off = [k for k, _ in x.items() if k not in free_set]
        viol = violated_forms(x, forms)
        if off or viol:
            bad.append({"direction": "Im outside cone", "element": x, "forms": viol[:3], "vanishing": off})
    cone = filter_points(box_points([k for k in free if k <= B], depth), forms, width)
    for x in sorted(set(cone) - im, key=lambda z: z.coords):
        bad.append({"direction": "cone point not reachable", "element": x})
    return VerificationReport(
        "theorem",
        {"family": str(spec), "depth": depth, "box_support": B, "J": J},
        FAIL if bad else PASS,
        bad,
        {"Im": graded_counts(im, depth), "cone_box": graded_counts(cone, depth)},
        notes + [f"{len(forms)} forms, {len(cone)} cone points in box"],
    )


# ---------------------------------------------------------------- cross-iota isomorphism


def cross_iota_isomorphism(
    cartan: CartanMatrix,
    iota1: IndexSequence,
    iota2: IndexSequence,
    depth: int,
    cartan2: Optional[CartanMatrix] = None,
) -> VerificationReport:
    """Follow f-paths from the two roots to build the only candidate map, then test it."""
    cartan2 = cartan if cartan2 is None else cartan2
    g1 = enumerate_image(iota1, cartan, depth)
    g2 = enumerate_image(iota2, cartan2, depth)
    bad = []
    if cartan.rows != cartan2.rows:
        bad.append({"cartan": "matrices differ", "left": cartan.to_lists(), "right": cartan2.to_lists()})
    psi = {ZSeq.zero(): ZSeq.zero()}
    for a, i, b in g1.edges:  # edges are ordered by source, so sources are mapped first
        target = g2.successor(psi[a], i)
        if target is None:
            bad.append({"edge": (a, i, b), "problem": "no matching edge"})
            continue
        if b in psi and psi[b] != target:
            bad.append({"edge": (a, i, b), "problem": f"paths disagree: {psi[b]} vs {target}"})
        psi.setdefault(b, target)
    if len(set(psi.values())) != len(psi):
        bad.append({"map": "not injective"})
    if len(psi) != len(g2.nodes) or len(g1.nodes) != len(g2.nodes):
        bad.append({"map": f"sizes differ: {len(g1.nodes)} vs {len(g2.nodes)}"})
    for x, y in psi.items():
        if g1.labels(x) != g2.labels(y):
            bad.append({"labels": (x, y)})
    image_edges = {(psi.get(a), i, psi.get(b)) for a, i, b in g1.edges}
    if image_edges != set(g2.edges):
        bad.append({"edges": f"{len(image_edges ^ set(g2.edges))} edges do not correspond"})
    c1, c2 = g1.layer_counts(), g2.layer_counts()
    if c1 != c2:
        bad.append({"graded counts": (c1, c2)})
    return VerificationReport(
        "cross_iota",
        {"iota1": iota1.describe(), "iota2": iota2.describe(), "depth": depth},
        FAIL if bad else PASS,
        bad,
        {"iota1": c1, "iota2": c2},
    )


# ---------------------------------------------------------------- affine closure against admissible forms


def verify_lemma_61(n: int, window: int, J: int, k: int = 1, **caps) -> VerificationReport:
    """Closure of ``x_k`` under ``S`` against the admissible forms with rows ``<= J``.

    Compared on forms supported in ``[k, k - 1 + J (n - 1)]``.
    """
    region = k - 1 + J * (n - 1)
    params = {"n": n, "window": window, "J": J, "k": k, "region": region}
    if window < region + n:
        return VerificationReport(
            "lemma61", params, TRUNCATED,
            notes=[f"window {window} is below region + n = {region + n}; comparison not meaningful"],
        )
    cartan = builtin_family(FamilySpec("affineA", (n,)))
    iota = IndexSequence.standard(n)
    closure = xi_closure(iota, cartan, window, {k}, **caps)
    direct = cf.enumerate_admissible(n, J, strategy="direct")
    by_moves = cf.enumerate_admissible(n, J, strategy="type1")
    bad = []
    for C in sorted(direct ^ by_moves, key=lambda c: c.rows):
        bad.append({"strategies disagree": C.rows})
    admissible_forms = {cf.affine_form(C, k) for C in direct}
    comparable = {f for f in closure if f.support_max <= region}
    for f in sorted(comparable - admissible_forms, key=lambda f: f.terms):
        bad.append({"closure form not admissible": f})
    for f in sorted(admissible_forms - comparable, key=lambda f: f.terms):
        bad.append({"admissible form missing from closure": f})
    status = FAIL if bad else (TRUNCATED if closure.truncated else PASS)
    return VerificationReport(
        "lemma61",
        params,
        status,
        bad,
        {"closure": [len(closure)], "comparable": [len(comparable)], "admissible": [len(direct)]},
        [f"cartan {cartan.name}"],
    )


def verify_positivity(cartan: CartanMatrix, iota: IndexSequence, window: int, **caps) -> VerificationReport:
    rep = check_positivity(iota, cartan, window, **caps)
    bad = [{"form": f, "position": k} for f, k in rep.witnesses]
    status = FAIL if bad else (TRUNCATED if rep.truncated else PASS)
    return VerificationReport(
        "positivity",
        {"cartan": cartan.name or cartan.to_lists(), "iota": iota.describe(), "window": window},
        status,
        bad,
        {"forms": [rep.n_forms]},
    )


# ---------------------------------------------------------------- running several checks


def max_workers() -> int:
    raw = os.environ.get("CRYSTAL_CONE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _call(task):
    fn, kwargs = task
    return fn(**kwargs)


def run_reports(tasks: Sequence[tuple[Callable[..., VerificationReport], dict[str, Any]]],
                workers: Optional[int] = None) -> list[VerificationReport]:
    """Run independent checks, possibly in parallel; results keep the task order."""
    workers = max_workers() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [_call(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_call, tasks))
