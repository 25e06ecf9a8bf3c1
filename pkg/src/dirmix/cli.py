"""``dirmix <verb> --config <file> [--out <dir>]``: run one experiment, write reports.

Exit codes: 0 success, 2 config error, 3 atom cap exceeded, 4 search
exhaustion (greedy plan or density-one certificate), 5 unsupported
Kronecker pair.  Failures print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import ast
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .lattice import DirectionVector, StripSpec, strip_cardinalities, sumset_search
from .mixing_analysis import (
    DensityCertificateError,
    ObservableExpr,
    UnsupportedKronecker,
    correlation_average,
    extract_density_one_set,
    inner,
    integral,
    kvn_decompose,
    mean_ergodic_norm,
    observable_correlation_average,
    wm_average,
)
from .partition_entropy import (
    AtomCapExceeded,
    DEFAULT_ATOM_CAP,
    InvalidPartition,
    Partition,
    SearchExhausted,
    SequencePlan,
    check_partition,
    construct_full_entropy_sequence,
    coordinate_partition,
    sequence_entropy_partial,
    set_partition,
)
from .reports import ConvergenceReport, emit_report, exact_row, jsonable
from .scalar import as_scalar, format_scalar, parse_scalar
from .suspension import suspension_correlation
from .systems import (
    LEFT,
    RIGHT,
    Bernoulli2D,
    Counterexample,
    EventExpr,
    Product,
    Rotation2D,
    System,
    box,
    complement,
    cylinder,
    intersect,
    measure,
    rectangle,
    system_digest,
    union,
    whole,
)

log = logging.getLogger("dirmix")

VERBS = (
    "strip",
    "correlate",
    "wmavg",
    "entropy",
    "fullseq",
    "densityone",
    "ergodic",
    "suspend",
    "sumset",
    "kvn",
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_EXHAUSTED = 4
EXIT_UNSUPPORTED = 5


class ConfigError(ValueError):
    pass


# -- config parsing -----------------------------------------------------------------


def _scalar(x, what: str):
    try:
        if isinstance(x, float):
            raise ValueError("write non-integer scalars as strings, e.g. \"1/2\"")
        return as_scalar(x) if isinstance(x, int) else parse_scalar(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def _int(cfg: dict, key: str, default=None, minimum: int = 1) -> int:
    value = cfg.get(key, default)
    if value is None:
        raise ConfigError(f"missing integer parameter {key!r}")
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{key!r} must be an integer >= {minimum}, got {value!r}")
    return value


def parse_system(node: dict) -> System:
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError("system must be an object with a 'kind'")
    kind = node["kind"]
    try:
        if kind == "bernoulli2d":
            weights = [_scalar(w, "system.weights") for w in node.get("weights", ["1/2", "1/2"])]
            return Bernoulli2D(weights, node.get("alphabet"), node.get("q", 2))
        if kind == "counterexample":
            weights = [_scalar(w, "system.weights") for w in node.get("weights", ["1/2", "1/2"])]
            return Counterexample(weights, node.get("alphabet"))
        if kind == "product":
            return Product(parse_system(node["left"]), parse_system(node["right"]))
        if kind == "rotation2d":
            return Rotation2D([_scalar(a, "system.angles") for a in node["angles"]])
    except KeyError as exc:
        raise ConfigError(f"system {kind!r} is missing field {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"system {kind!r}: {exc}") from exc
    raise ConfigError(f"unknown system kind {kind!r}")


def parse_strip(node: dict, what: str = "strip") -> StripSpec:
    if not isinstance(node, dict):
        raise ConfigError(f"{what} must be an object with 'direction' and 'widths'")
    direction = node.get("direction")
    widths = node.get("widths")
    if not direction or widths is None:
        raise ConfigError(f"{what} needs 'direction' and 'widths'")
    lead = _scalar(direction[0], f"{what}.direction")
    if lead != 1:
        raise ConfigError(f"{what}: the leading direction coordinate must be 1 (got {direction[0]!r})")
    try:
        return StripSpec(
            DirectionVector(tuple(_scalar(b, f"{what}.direction") for b in direction[1:])),
            tuple(_scalar(b, f"{what}.widths") for b in widths),
        )
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def _symbol(sys: System, text: str):
    for s in sys.alphabet:
        if str(s) == text.strip():
            return s
    raise ConfigError(f"symbol {text!r} not in alphabet {list(sys.alphabet)}")


def _constraint(sys: System, text: str):
    coord, _, sym = text.partition("=")
    coord = coord.strip()
    if isinstance(sys, Counterexample):
        side = {"L": LEFT, "R": RIGHT}.get(coord[:1].upper())
        try:
            index = int(coord[1:])
        except ValueError:
            index = None
        if side is None or index is None:
            raise ConfigError(f"counterexample constraint {text!r} must look like 'L3=0' or 'R0=1'")
        return (side, index), _symbol(sys, sym)
    try:
        key = ast.literal_eval(coord)
    except (ValueError, SyntaxError) as exc:
        raise ConfigError(f"cannot read coordinate in {text!r}") from exc
    if isinstance(key, int):
        key = (key,)
    if not isinstance(key, tuple) or not all(isinstance(c, int) for c in key):
        raise ConfigError(f"coordinate in {text!r} must be an integer tuple")
    return key, _symbol(sys, sym)


class EventTable:
    """Resolves named events, allowing references between names."""

    def __init__(self, sys: System, named: dict):
        self.sys = sys
        self.named = dict(named or {})
        self._done: dict[str, EventExpr] = {}
        self._active: set[str] = set()

    def __getitem__(self, name: str) -> EventExpr:
        if name in self._done:
            return self._done[name]
        if name not in self.named:
            raise ConfigError(f"unknown event {name!r}")
        if name in self._active:
            raise ConfigError(f"event {name!r} refers to itself")
        self._active.add(name)
        self._done[name] = self.build(self.named[name])
        self._active.discard(name)
        return self._done[name]

    def build(self, node) -> EventExpr:
        sys = self.sys
        if isinstance(node, str):
            if node == "X":
                return whole(sys)
            if "=" in node:
                return self._cylinder([node])
            return self[node]
        if isinstance(node, list):
            return self._cylinder(node)
        if not isinstance(node, dict):
            raise ConfigError(f"cannot read event {node!r}")
        try:
            if "and" in node:
                out = whole(sys)
                for part in node["and"]:
                    out = intersect(sys, out, self.build(part))
                return out
            if "or" in node:
                out = EventExpr()
                for part in node["or"]:
                    out = union(sys, out, self.build(part))
                return out
            if "not" in node:
                return complement(sys, self.build(node["not"]))
            if isinstance(sys, Product) and ("left" in node or "right" in node):
                left = EventTable(sys.left, {}).build(node.get("left", "X"))
                right = EventTable(sys.right, {}).build(node.get("right", "X"))
                return rectangle(sys, left, right)
            if isinstance(sys, Rotation2D) and ("x" in node or "y" in node):
                arc = lambda a: tuple(_scalar(v, "event arc") for v in a)  # noqa: E731
                return box(sys, arc(node.get("x", [0, 1])), arc(node.get("y", [0, 1])))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"event {node!r}: {exc}") from exc
        raise ConfigError(f"cannot read event {node!r} for a {type(sys).__name__} system")

    def _cylinder(self, constraints) -> EventExpr:
        try:
            return cylinder(self.sys, [_constraint(self.sys, c) for c in constraints])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"constraints {constraints!r}: {exc}") from exc


def parse_partition(sys: System, events: EventTable, node) -> Partition:
    if isinstance(node, dict) and "coordinate" in node:
        key, _ = _constraint(sys, f"{node['coordinate']}={sys.alphabet[0]}")
        alpha = coordinate_partition(sys, key)
    elif isinstance(node, dict) and "set" in node:
        alpha = set_partition(sys, events.build(node["set"]))
    elif isinstance(node, dict) and "atoms" in node:
        alpha = Partition(tuple(events.build(a) for a in node["atoms"]))
    elif node == "trivial":
        alpha = Partition((whole(sys),))
    else:
        raise ConfigError(f"cannot read partition {node!r}")
    try:
        check_partition(sys, alpha)
    except InvalidPartition as exc:
        raise ConfigError(f"partition {node!r}: {exc}") from exc
    return alpha


def parse_observable(events: EventTable, node) -> ObservableExpr:
    """``[[coef, event], ...]``; ``{"centered": event}`` means ``1_E - mu(E)``."""
    sys = events.sys
    if isinstance(node, dict) and "centered" in node:
        e = events.build(node["centered"])
        return ObservableExpr.build([(1, e), (-measure(sys, e), whole(sys))])
    if isinstance(node, str):
        return ObservableExpr.build([(1, events.build(node))])
    if not isinstance(node, list):
        raise ConfigError(f"cannot read observable {node!r}")
    terms = []
    for term in node:
        if not (isinstance(term, list) and len(term) == 2):
            raise ConfigError(f"observable term {term!r} must be [coefficient, event]")
        terms.append((_scalar(term[0], "observable coefficient"), events.build(term[1])))
    return ObservableExpr.build(terms)


def parse_plan(node, strip: StripSpec) -> SequencePlan:
    if not isinstance(node, list) or not node:
        raise ConfigError("plan must be a non-empty list of points")
    try:
        return SequencePlan(tuple(tuple(p) for p in node), strip)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"plan: {exc}") from exc


@dataclass
class Experiment:
    verb: str
    raw: dict
    params: dict
    system: System | None = None
    strip: StripSpec | None = None
    events: EventTable | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_config(cls, verb: str, raw: dict) -> "Experiment":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if "verb" in raw and raw["verb"] != verb:
            raise ConfigError(f"config is for verb {raw['verb']!r}, not {verb!r}")
        exp = cls(verb, raw, raw.get("params", {}))
        if "system" in raw:
            exp.system = parse_system(raw["system"])
            exp.events = EventTable(exp.system, raw.get("events", {}))
        if "strip" in raw:
            exp.strip = parse_strip(raw["strip"])
        return exp

    def need_system(self) -> System:
        if self.system is None:
            raise ConfigError(f"verb {self.verb!r} needs a 'system'")
        return self.system

    def need_strip(self) -> StripSpec:
        if self.strip is None:
            raise ConfigError(f"verb {self.verb!r} needs a 'strip'")
        return self.strip

    def event(self, key: str) -> EventExpr:
        self.need_system()
        name = self.params.get(key)
        if name is None:
            raise ConfigError(f"missing event parameter {key!r}")
        return self.events.build(name)

    def observable(self, key: str) -> ObservableExpr:
        self.need_system()
        node = self.params.get(key)
        if node is None:
            raise ConfigError(f"missing observable parameter {key!r}")
        named = self.raw.get("observables", {})
        if isinstance(node, str) and node in named:
            node = named[node]
        return parse_observable(self.events, node)

    def partition(self, node) -> Partition:
        named = self.raw.get("partitions", {})
        if isinstance(node, str) and node in named:
            node = named[node]
        return parse_partition(self.need_system(), self.events, node)


# -- verbs --------------------------------------------------------------------------

Outputs = dict[str, Any]  # filename stem -> ConvergenceReport or JSON-able payload


def _base_meta(exp: Experiment) -> dict:
    meta: dict[str, Any] = {"verb": exp.verb}
    if exp.system is not None:
        meta["system"] = exp.system.describe()
        meta["system_digest"] = system_digest(exp.system)
    if exp.strip is not None:
        meta["strip"] = exp.strip.to_json()
    return meta


def run_strip(exp: Experiment) -> Outputs:
    strip = exp.need_strip()
    kmax = _int(exp.params, "k")
    stride = _int(exp.params, "stride", max(1, kmax // 1000))
    counts = strip_cardinalities(strip, kmax)
    rows = [
        exact_row(k, as_scalar(counts[k - 1]) / k, {"strip_points": counts[k - 1]})
        for k in range(1, kmax + 1)
        if k % stride == 0 or k == kmax
    ]
    return {"strip_density": ConvergenceReport("strip_density", rows, {"kmax": kmax})}


def run_correlate(exp: Experiment) -> Outputs:
    sys, strip = exp.need_system(), exp.need_strip()
    kmax = _int(exp.params, "k")
    stride = _int(exp.params, "stride", 1)
    B, C = exp.event("B"), exp.event("C")
    report = correlation_average(sys, B, C, strip, kmax, stride)
    report.meta["events"] = {"B": exp.params["B"], "C": exp.params["C"]}
    return {"correlation_average": report}


def run_wmavg(exp: Experiment) -> Outputs:
    sys, strip = exp.need_system(), exp.need_strip()
    kmax = _int(exp.params, "k")
    stride = _int(exp.params, "stride", 1)
    f, g = exp.observable("f"), exp.observable("g")
    out = {"wm_average": wm_average(sys, f, g, strip, kmax, stride)}
    if exp.params.get("centered_correlation", False):
        out["observable_correlation_average"] = observable_correlation_average(
            sys, f, g, strip, kmax, stride
        )
    return out


def _log_base(exp: Experiment):
    base = exp.params.get("log_base", "e")
    if base == "e":
        return None
    if base == 2 or base == "2":
        return 2.0
    raise ConfigError(f"log_base must be 'e' or 2, got {base!r}")


def _cap(exp: Experiment) -> int:
    return _int(exp.params, "atom_cap", DEFAULT_ATOM_CAP)


def run_entropy(exp: Experiment) -> Outputs:
    sys, strip = exp.need_system(), exp.need_strip()
    alpha = exp.partition(exp.params.get("partition"))
    plan = parse_plan(exp.params.get("plan"), strip)
    kmax = _int(exp.params, "k", len(plan))
    return {
        "sequence_entropy": sequence_entropy_partial(
            sys, alpha, plan, kmax, _log_base(exp), _cap(exp), _int(exp.params, "window", 8)
        )
    }


def _plan_payload(plan: SequencePlan) -> dict:
    return {"strip": plan.strip.to_json(), "points": [list(p) for p in plan.points]}


def run_fullseq(exp: Experiment) -> Outputs:
    sys, strip = exp.need_system(), exp.need_strip()
    specs = exp.params.get("partitions")
    if not specs:
        raise ConfigError("fullseq needs a non-empty 'partitions' list")
    alphas = [exp.partition(s) for s in specs]
    length = _int(exp.params, "length")
    horizon = _int(exp.params, "horizon", 1000)
    plan = construct_full_entropy_sequence(sys, alphas, strip, length, horizon=horizon, cap=_cap(exp))
    out: Outputs = {"plan": _plan_payload(plan)}
    for i, alpha in enumerate(alphas):
        out[f"sequence_entropy_{i}"] = sequence_entropy_partial(
            sys, alpha, plan, length, _log_base(exp), _cap(exp)
        )
    return out


def run_densityone(exp: Experiment) -> Outputs:
    sys, strip = exp.need_system(), exp.need_strip()
    B, C = exp.event("B"), exp.event("C")
    pmax = _int(exp.params, "pmax", 10)
    horizon = _int(exp.params, "horizon", 1000, minimum=2)
    q = extract_density_one_set(sys, B, C, strip, pmax, horizon)
    counts = strip_cardinalities(strip, horizon)
    stride = _int(exp.params, "stride", 1)
    rows = []
    hit = 0
    excluded = sorted(q.excluded)
    idx = 0
    for k in range(1, horizon + 1):
        while idx < len(excluded) and excluded[idx][0] < k:
            hit += 1
            idx += 1
        if k % stride == 0 or k == horizon:
            rows.append(exact_row(k, 1 - as_scalar(hit) / counts[k - 1], {"level": q.level(k - 1)}))
    return {
        "relative_density": ConvergenceReport("relative_density", rows, {"horizon": horizon}),
        "density_one_set": {
            "thresholds": [list(t) for t in q.thresholds],
            "excluded": [list(w) for w in excluded],
            "certificates": q.certificates,
            "horizon": horizon,
        },
    }


def run_ergodic(exp: Experiment) -> Outputs:
    sys, strip = exp.need_system(), exp.need_strip()
    B = exp.event("B")
    plan = parse_plan(exp.params.get("plan"), strip)
    N = _int(exp.params, "N", len(plan))
    return {"mean_ergodic_norm": mean_ergodic_norm(sys, B, plan, N)}


def run_suspend(exp: Experiment) -> Outputs:
    sys = exp.need_system()
    B, C = exp.event("B"), exp.event("C")
    beta = _scalar(exp.params.get("beta"), "beta")
    D = tuple(_scalar(x, "D") for x in exp.params.get("D", [0, 1]))
    if len(D) != 2:
        raise ConfigError("D must be a pair [c, d]")
    nmax = _int(exp.params, "n")
    rows = [exact_row(n, suspension_correlation(sys, B, C, D, beta, n)) for n in range(1, nmax + 1)]
    meta = {"beta": format_scalar(beta), "D": [format_scalar(x) for x in D]}
    return {"suspension_correlation": ConvergenceReport("suspension_correlation", rows, meta)}


def run_sumset(exp: Experiment) -> Outputs:
    if "strip_w" not in exp.raw:
        raise ConfigError("sumset needs 'strip' and 'strip_w'")
    spec_v, spec_w = exp.need_strip(), parse_strip(exp.raw["strip_w"], "strip_w")
    if spec_v.q != 2 or spec_w.q != 2:
        raise ConfigError("sumset works on planar strips only")
    window = _int(exp.params, "window", minimum=0)
    res = sumset_search(spec_v, spec_w, window)
    return {
        "sumset": {
            "covers": res.covers,
            "window": res.window,
            "search_bound": res.search_bound,
            "missing": list(res.missing) if res.missing else None,
            "reason": res.reason,
            "strip_w": spec_w.to_json(),
        }
    }


def _coordinate_text(sys: System, key) -> str:
    if isinstance(sys, Counterexample):
        side, i = key
        return f"{'L' if side == LEFT else 'R'}{i}"
    return "(" + ",".join(str(c) for c in key) + ")"


def atom_to_config(sys: System, atom):
    """Render one atom in the config event syntax, so outputs can be fed back in."""
    if isinstance(sys, Product):
        return {"left": atom_to_config(sys.left, atom[0]), "right": atom_to_config(sys.right, atom[1])}
    if isinstance(sys, Rotation2D):
        (a1, b1), (a2, b2) = atom
        return {"x": [format_scalar(a1), format_scalar(b1)], "y": [format_scalar(a2), format_scalar(b2)]}
    if not atom:
        return "X"
    return [f"{_coordinate_text(sys, k)}={s}" for k, s in atom]


def event_to_config(sys: System, e: EventExpr):
    atoms = [atom_to_config(sys, a) for a in e.atoms]
    return atoms[0] if len(atoms) == 1 else {"or": atoms}


def _observable_payload(sys: System, f: ObservableExpr) -> list:
    return [[format_scalar(c), event_to_config(sys, e)] for c, e in f.terms]


def run_kvn(exp: Experiment) -> Outputs:
    sys = exp.need_system()
    f = exp.observable("f")
    direction = exp.params.get("direction")
    if not direction:
        raise ConfigError("kvn needs a 'direction'")
    if _scalar(direction[0], "direction") != 1:
        raise ConfigError("the leading direction coordinate must be 1")
    v = DirectionVector(tuple(_scalar(b, "direction") for b in direction[1:]))
    kron, wm = kvn_decompose(sys, f, v)
    out: Outputs = {
        "kvn": {
            "direction": v.to_json(),
            "kronecker_part": _observable_payload(sys, kron),
            "wm_part": _observable_payload(sys, wm),
            "inner_kron_wm": format_scalar(inner(sys, kron, wm)),
            "integral_f": format_scalar(integral(sys, f)),
        }
    }
    if exp.strip is not None and "k" in exp.params:
        kmax = _int(exp.params, "k")
        stride = _int(exp.params, "stride", 1)
        out["wm_average_wm_part"] = wm_average(sys, wm, wm, exp.strip, kmax, stride)
        out["wm_average_kronecker_part"] = wm_average(sys, kron, kron, exp.strip, kmax, stride)
    return out


RUNNERS = {
    "strip": run_strip,
    "correlate": run_correlate,
    "wmavg": run_wmavg,
    "entropy": run_entropy,
    "fullseq": run_fullseq,
    "densityone": run_densityone,
    "ergodic": run_ergodic,
    "suspend": run_suspend,
    "sumset": run_sumset,
    "kvn": run_kvn,
}


# -- output -------------------------------------------------------------------------


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def config_hash(raw: dict) -> str:
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_outputs(exp: Experiment, outputs: Outputs, out_dir: Path) -> list[dict]:
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for stem, payload in outputs.items():
        if isinstance(payload, ConvergenceReport):
            payload.meta = {**_base_meta(exp), **payload.meta}
            for path in emit_report(payload, out_dir / f"{stem}.csv"):
                entry = {"path": path.name, "sha256": _sha256(path)}
                if path.suffix == ".csv":
                    entry["rows"] = len(payload.rows)
                    entry["inexact_rows"] = [r.k for r in payload.rows if r.exact is None]
                entries.append(entry)
        else:
            path = out_dir / f"{stem}.json"
            body = {**_base_meta(exp), **jsonable(payload)}
            path.write_text(json.dumps(body, sort_keys=True, indent=2) + "\n", encoding="utf-8")
            entries.append({"path": path.name, "sha256": _sha256(path)})
    return entries


def run(verb: str, raw: dict, out_dir: Path) -> dict:
    """Run one experiment and write its files plus ``manifest.json``.

    Everything in the manifest except the ``volatile`` block is a pure
    function of the config and the tool version.
    """
    started = time.perf_counter()
    exp = Experiment.from_config(verb, raw)
    outputs = RUNNERS[verb](exp)
    files = write_outputs(exp, outputs, out_dir)
    manifest = {
        "tool": "dirmix",
        "version": __version__,
        "verb": verb,
        "config_sha256": config_hash(raw),
        "files": files,
        "volatile": {"wall_time_seconds": round(time.perf_counter() - started, 6)},
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


def _fail(code: int, kind: str, reason: str, **extra) -> int:
    print(json.dumps({"exit": code, "error": kind, "reason": reason, **extra}, sort_keys=True), file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirmix", description=__doc__.splitlines()[0])
    parser.add_argument("verb", choices=VERBS)
    parser.add_argument("--config", required=True, type=Path, help="JSON experiment file")
    parser.add_argument("--out", type=Path, default=Path("dirmix-out"), help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"dirmix {__version__}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        raw = json.loads(args.config.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_CONFIG, "config_error", f"cannot read {args.config}: {exc}")
    try:
        manifest = run(args.verb, raw, args.out)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config_error", str(exc))
    except AtomCapExceeded as exc:
        return _fail(EXIT_CAP, "cap_exceeded", str(exc), atoms=exc.atoms, cap=exc.cap)
    except SearchExhausted as exc:
        return _fail(
            EXIT_EXHAUSTED,
            "search_exhausted",
            str(exc),
            step=exc.step,
            horizon=exc.horizon,
            partial=[list(p) for p in exc.partial.points],
        )
    except DensityCertificateError as exc:
        return _fail(
            EXIT_EXHAUSTED,
            "search_exhausted",
            str(exc),
            failed_p=exc.failed_p,
            largest_certified=exc.largest_certified,
        )
    except UnsupportedKronecker as exc:
        return _fail(EXIT_UNSUPPORTED, "unsupported_kvn", str(exc))
    log.info("wrote %d files to %s", len(manifest["files"]), args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
