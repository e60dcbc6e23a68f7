"""``crystal-cone``: enumerate crystal graphs, generate cone forms and run verification checks.

Exit codes: 0 pass, 1 fail, 2 configuration error, 3 truncated by a cap.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import closed_forms as cf
from .cartan import (
    CartanError,
    CartanMatrix,
    FamilySpec,
    IndexSequence,
    InvalidFamilyParams,
    InvalidIndexSequence,
    builtin_family,
    check_compatible,
    parse_family,
)
from .forms import (
    DEFAULT_MAX_COEFFICIENT,
    DEFAULT_MAX_FORMS,
    LinearForm,
    WindowTooSmall,
    form_to_json,
    format_form,
    xi_closure,
)
from . import verify as vf
from .zinf import CrystalGraph, ZSeq, enumerate_image

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_TRUNCATED = 0, 1, 2, 3
TARGETS = ("positivity", "chain", "theorem", "lemma61", "cross-iota")
GRAPH_SCHEMA = "crystal-cone/graph/1"


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    cartan: CartanMatrix
    iota: IndexSequence
    family: Optional[FamilySpec] = None
    depth: int = 3
    window: Optional[int] = None
    length: int = 6
    max_forms: int = DEFAULT_MAX_FORMS
    max_coefficient: int = DEFAULT_MAX_COEFFICIENT
    max_nodes: Optional[int] = None
    fmt: str = "text"
    allow_truncated: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def caps(self) -> dict:
        return {"max_forms": self.max_forms, "max_coefficient": self.max_coefficient}


# ---------------------------------------------------------------- parsing


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    text = str(text).strip()
    if not text:
        return []
    try:
        return [int(v) for v in text.replace(" ", "").split(",")]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def parse_matrix(text) -> list[list[int]]:
    """``"2,-1;-1,2"`` or a JSON list of rows."""
    if isinstance(text, list):
        return [[int(v) for v in r] for r in text]
    text = str(text).strip()
    if text.startswith("["):
        try:
            return [[int(v) for v in r] for r in json.loads(text)]
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"malformed matrix {text!r}") from exc
    return [_int_list(r) for r in text.split(";")]


def _parse_iota(n: int, order, prefix, cycle) -> IndexSequence:
    if cycle is not None:
        return IndexSequence(n, tuple(_int_list(prefix or "")), tuple(_int_list(cycle)))
    if prefix:
        raise ConfigError("--prefix needs --cycle")
    if order is not None:
        return IndexSequence.periodic(_int_list(order))
    return IndexSequence.standard(n)


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge command-line flags over an optional JSON config file and validate everything."""
    settings = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                settings = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(settings, dict):
            raise ConfigError("config file must hold a JSON object")
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command", "func"):
            settings[key.replace("-", "_")] = value

    try:
        family = None
        if settings.get("matrix") is not None:
            cartan = CartanMatrix(tuple(tuple(r) for r in parse_matrix(settings["matrix"])), "custom")
            if settings.get("family"):
                raise ConfigError("give either --family or --matrix, not both")
        elif settings.get("family"):
            family = parse_family(str(settings["family"]))
            cartan = builtin_family(family)
        else:
            raise ConfigError("one of --family or --matrix is required")
        iota = _parse_iota(cartan.n, settings.get("order"), settings.get("prefix"), settings.get("cycle"))
        check_compatible(cartan, iota)
        order2 = settings.get("order2")
        extra = {
            "target": settings.get("target", "positivity"),
            "closed_form": bool(settings.get("closed_form", False)),
            "box_support": settings.get("box_support"),
            "J": settings.get("J"),
            "k": int(settings.get("k", 1)),
            "output": settings.get("output"),
            "iota2": None if order2 is None else IndexSequence.periodic(_int_list(order2)),
        }
        if extra["iota2"] is not None:
            check_compatible(cartan, extra["iota2"])
    except (CartanError, InvalidFamilyParams, InvalidIndexSequence, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    cfg = RunConfig(
        cartan,
        iota,
        family,
        depth=int(settings.get("depth", 3)),
        window=None if settings.get("window") is None else int(settings["window"]),
        length=int(settings.get("length", 6)),
        max_forms=int(settings.get("max_forms", DEFAULT_MAX_FORMS)),
        max_coefficient=int(settings.get("max_coefficient", DEFAULT_MAX_COEFFICIENT)),
        max_nodes=None if settings.get("max_nodes") is None else int(settings["max_nodes"]),
        fmt=settings.get("format", "text"),
        allow_truncated=bool(settings.get("allow_truncated", False)),
        extra=extra,
    )
    if cfg.depth < 0:
        raise ConfigError("depth must be >= 0")
    if cfg.window is not None and cfg.window < iota.period:
        raise ConfigError(f"window {cfg.window} is smaller than the period {iota.period}")
    if cfg.length < 1:
        raise ConfigError("length must be >= 1")
    return cfg


# ---------------------------------------------------------------- index rendering


def double_index(family: Optional[FamilySpec], k: int) -> Optional[str]:
    """``x[j;i]`` name of flat position ``k`` for the A and affine A families."""
    if family is None or family.kind == "rank2":
        return None
    n = family.params[0]
    j, i = cf.an_double(n, k) if family.kind == "A" else cf.affine_double(n, k)
    return f"x[{j};{i}]"


def format_form_double(family: FamilySpec, phi: LinearForm) -> str:
    text = format_form(phi)
    for j, _ in sorted(phi.terms, reverse=True):
        text = text.replace(f"*x{j} ", f"*{double_index(family, j)} ")
    return text


# ---------------------------------------------------------------- graph serialization


def graph_to_dict(g: CrystalGraph, family: Optional[FamilySpec] = None) -> dict:
    nodes = []
    for pos, x in enumerate(g.nodes):
        w, eps, phi = g.labels(x)
        node = {"id": pos, "x": list(x.coords), "total": x.total, "wt": list(w.c), "eps": list(eps), "phi": list(phi)}
        if family is not None and family.kind != "rank2":
            node["double"] = {double_index(family, k): v for k, v in x.items()}
        nodes.append(node)
    return {
        "schema": GRAPH_SCHEMA,
        "cartan": g.cartan.to_lists(),
        "family": None if family is None else str(family),
        "iota": {"prefix": list(g.iota.prefix), "cycle": list(g.iota.cycle)},
        "depth": g.depth,
        "truncated": g.truncated,
        "nodes": nodes,
        "edges": [[g.index(a), i, g.index(b)] for a, i, b in g.edges],
    }


def dumps_graph(g: CrystalGraph, family: Optional[FamilySpec] = None) -> str:
    return json.dumps(graph_to_dict(g, family), sort_keys=True, indent=1) + "\n"


def loads_graph(text: str) -> tuple[CrystalGraph, Optional[FamilySpec]]:
    """Inverse of :func:`dumps_graph`."""
    data = json.loads(text)
    if data.get("schema") != GRAPH_SCHEMA:
        raise ValueError(f"unknown schema {data.get('schema')!r}")
    cartan = CartanMatrix(tuple(tuple(r) for r in data["cartan"]))
    if data["family"] is not None:
        family = parse_family(data["family"])
        cartan = builtin_family(family)
        if cartan.to_lists() != data["cartan"]:
            raise ValueError("family and matrix disagree")
    else:
        family = None
    iota = IndexSequence(cartan.n, tuple(data["iota"]["prefix"]), tuple(data["iota"]["cycle"]))
    nodes = [ZSeq(tuple(nd["x"])) for nd in data["nodes"]]
    edges = [(nodes[a], i, nodes[b]) for a, i, b in data["edges"]]
    return CrystalGraph(iota, cartan, data["depth"], nodes, edges, data["truncated"]), family


def dot_name(x: ZSeq) -> str:
    return f'"{x}"' if x.coords else '"(0)"'


def graph_to_dot(g: CrystalGraph) -> str:
    lines = ["digraph crystal {"]
    for x in g.nodes:
        lines.append(f"  {dot_name(x)};")
    for a, i, b in g.edges:
        lines.append(f"  {dot_name(a)} -> {dot_name(b)} [label={i}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_text(g: CrystalGraph, family: Optional[FamilySpec]) -> str:
    lines = [f"depth {g.depth}: {len(g.nodes)} nodes, {len(g.edges)} edges; per depth {g.layer_counts()}"]
    for x in g.nodes:
        w, eps, phi = g.labels(x)
        extra = ""
        if family is not None and family.kind != "rank2" and x.coords:
            extra = "  " + " ".join(f"{double_index(family, k)}={v}" for k, v in x.items())
        lines.append(f"{x}  wt={list(w.c)} eps={list(eps)} phi={list(phi)}{extra}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- commands


def _emit(cfg: RunConfig, text: str) -> None:
    out = cfg.extra.get("output")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(cfg: RunConfig) -> int:
    g = enumerate_image(cfg.iota, cfg.cartan, cfg.depth, max_nodes=cfg.max_nodes)
    if cfg.fmt == "json":
        text = dumps_graph(g, cfg.family)
    elif cfg.fmt == "dot":
        text = graph_to_dot(g)
    else:
        text = graph_to_text(g, cfg.family)
    _emit(cfg, text)
    if g.truncated and not cfg.allow_truncated:
        print(f"truncated: node cap {cfg.max_nodes} reached after depth {g.depth}", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_PASS


def _closed_form_system(cfg: RunConfig) -> tuple[list[LinearForm], dict]:
    fam = cfg.family
    if fam is None:
        raise ConfigError("--closed-form needs a built-in --family")
    if fam.kind == "rank2":
        system = cf.rank2_generators(*fam.params, cfg.length)
        return list(system.forms), {"vanish_from": system.vanish_from}
    if fam.kind == "A":
        system = cf.an_theorem_system(fam.params[0], cfg.length)
        return list(system.forms), {"vanishing": list(system.vanishing)}
    n = fam.params[0]
    J = int(cfg.extra["J"] or 3)
    k = cfg.extra["k"]
    mats = sorted(cf.enumerate_admissible(n, J), key=lambda C: C.rows)
    return [cf.affine_form(C, k) for C in mats], {"J": J, "k": k}


def cmd_forms(cfg: RunConfig) -> int:
    truncated, meta = False, {}
    if cfg.extra["closed_form"]:
        forms, meta = _closed_form_system(cfg)
    else:
        window = cfg.window if cfg.window is not None else cfg.length
        try:
            closure = xi_closure(cfg.iota, cfg.cartan, window, **cfg.caps)
        except WindowTooSmall as exc:
            raise ConfigError(str(exc)) from exc
        forms = closure.sorted()
        truncated = closure.truncated
        meta = {"window": window, "reason": closure.reason}
    if cfg.fmt == "json":
        payload = {
            "mode": "closed-form" if cfg.extra["closed_form"] else "closure",
            "family": None if cfg.family is None else str(cfg.family),
            "truncated": truncated,
            "forms": [form_to_json(f) for f in forms],
            **meta,
        }
        text = json.dumps(payload, sort_keys=True) + "\n"
    else:
        lines = []
        for f in forms:
            line = format_form(f)
            if cfg.family is not None and cfg.family.kind != "rank2" and f.terms:
                line += "    # " + format_form_double(cfg.family, f)
            lines.append(line)
        if meta.get("vanish_from"):
            lines.append(f"x_k = 0 for k >= {meta['vanish_from']}")
        if meta.get("vanishing"):
            lines.append("vanishing: " + ", ".join(f"x{k}" for k in meta["vanishing"]))
        text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    if truncated and not cfg.allow_truncated:
        print(f"truncated: {meta.get('reason')}", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_PASS


def _verify_task(cfg: RunConfig, target: str):
    if target == "positivity":
        window = cfg.window if cfg.window is not None else 5 * cfg.iota.period
        return vf.verify_positivity, {"cartan": cfg.cartan, "iota": cfg.iota, "window": window, **cfg.caps}
    if target == "chain":
        return vf.verify_inclusion_chain, {
            "cartan": cfg.cartan, "iota": cfg.iota, "depth": cfg.depth, "window": cfg.window, **cfg.caps,
        }
    if target == "theorem":
        if cfg.family is None:
            raise ConfigError("--target theorem needs a built-in --family")
        if cfg.iota != IndexSequence.standard(cfg.cartan.n):
            raise ConfigError("--target theorem uses the standard order 1, 2, ..., n")
        return vf.verify_theorem, {
            "family": cfg.family, "depth": cfg.depth,
            "box_support": cfg.extra["box_support"], "J": cfg.extra["J"],
        }
    if target == "lemma61":
        if cfg.family is None or cfg.family.kind != "affineA":
            raise ConfigError("--target lemma61 needs --family affineAn")
        return vf.verify_lemma_61, {
            "n": cfg.family.params[0], "window": cfg.window if cfg.window is not None else 12,
            "J": int(cfg.extra["J"] or 3), "k": cfg.extra["k"], **cfg.caps,
        }
    if target == "cross-iota":
        if cfg.extra["iota2"] is None:
            raise ConfigError("--target cross-iota needs --order2")
        return vf.cross_iota_isomorphism, {
            "cartan": cfg.cartan, "iota1": cfg.iota, "iota2": cfg.extra["iota2"], "depth": cfg.depth,
        }
    raise ConfigError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")


def cmd_verify(cfg: RunConfig) -> int:
    targets = [t.strip() for t in str(cfg.extra["target"]).split(",") if t.strip()]
    tasks = [_verify_task(cfg, t) for t in targets]
    reports = vf.run_reports(tasks)
    if cfg.fmt == "json":
        body = [r.to_dict() for r in reports]
        text = json.dumps(body[0] if len(body) == 1 else body, indent=2, sort_keys=True) + "\n"
    else:
        text = "\n".join(r.to_text() for r in reports) + "\n"
    _emit(cfg, text)
    statuses = {r.status for r in reports}
    if vf.FAIL in statuses:
        return EXIT_FAIL
    if vf.TRUNCATED in statuses and not cfg.allow_truncated:
        return EXIT_TRUNCATED
    return EXIT_PASS


# ---------------------------------------------------------------- entry point


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="JSON file with the same fields as the flags")
    g.add_argument("--family", help="A<n>, rank2:<c1>,<c2> or affineA<n>")
    g.add_argument("--matrix", help='explicit Cartan matrix, e.g. "2,-1;-1,2"')
    g.add_argument("--order", help="periodic order, e.g. 1,2,3")
    g.add_argument("--prefix", help="finite prefix of an eventually periodic sequence")
    g.add_argument("--cycle", help="repeating part of an eventually periodic sequence")
    g.add_argument("--depth", type=int)
    g.add_argument("--window", type=int, help="largest position a closure form may use")
    g.add_argument("--length", type=int, help="number of positions for closed forms")
    g.add_argument("--max-forms", dest="max_forms", type=int)
    g.add_argument("--max-coefficient", dest="max_coefficient", type=int)
    g.add_argument("--max-nodes", dest="max_nodes", type=int)
    g.add_argument("--format", choices=("json", "dot", "text"))
    g.add_argument("--output", help="write here instead of stdout")
    g.add_argument("--allow-truncated", dest="allow_truncated", action="store_true", default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crystal-cone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="f-operator breadth-first enumeration")
    _common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("forms", help="closure forms or closed-form inequalities")
    _common(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--closure", dest="closed_form", action="store_false", default=None)
    mode.add_argument("--closed-form", dest="closed_form", action="store_true", default=None)
    p.add_argument("--J", dest="J", type=int, help="row bound for affine admissible matrices")
    p.add_argument("--k", dest="k", type=int, help="base position of affine forms")
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("verify", help="run verification checks")
    _common(p)
    p.add_argument("--target", help=f"comma-separated subset of {', '.join(TARGETS)}")
    p.add_argument("--order2", help="second periodic order for cross-iota")
    p.add_argument("--box-support", dest="box_support", type=int)
    p.add_argument("--J", dest="J", type=int)
    p.add_argument("--k", dest="k", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return args.func(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
