"""System-spec files: a YAML document holding one system and one lifetime model.

Grammar (all keys lower case; subsets are space-separated 1-based indices,
with "" or "{}" for the empty set; "inf" stands for +infinity)::

    n: 5
    structure:            # exactly one of the keys below
      path_sets: ["1 4", "2 5", "1 3 5", "2 3 4"]
      cut_sets: [...]
      truth_table: "0001..."          # 2^n bits in ascending mask order
      kofn: {k: 2}
      series: {}
      parallel: {}
      weights: [["1 4", inf], ["1 5", 1.0]]   # or a mapping subset -> value
      weighted_min: {bounds: [...]}
      weighted_max: {bounds: [...]}
      symmetric: {w_tilde: [...]}           # n + 1 values
    lifetimes:            # optional; exactly one of
      independent: [{exponential: {rate: 1.0}}, {weibull: {shape: 2, scale: 1}}, ...]
      comonotone: [...same marginal declarations...]
      discrete_joint: {atoms: [[1, 2], [3, 0.5]], probs: [0.4, 0.6]}

Unlisted weights inherit the largest listed weight below them, with
w({}) = 0 by default. Syntax problems raise ``ParseError``; well-formed
documents describing an invalid system raise ``ValidationError``. Both carry
the line of the offending node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Union

import numpy as np
import yaml

from .errors import ParseError, RelilatError, ValidationError
from .latpoly import (
    INF,
    SymmetricProfile,
    WeightedLatticePolynomial,
    make_symmetric,
    make_weighted_max,
    make_weighted_min,
)
from .lifetimes import (
    Comonotone,
    DiscreteJoint,
    Exponential,
    Independent,
    JointLifetimeModel,
    MarginalLifetime,
    PiecewiseEmpirical,
    Weibull,
)
from .setfun import MAX_N, SetFunction, format_subset, set_repr
from .structure import (
    SystemStructure,
    from_path_sets,
    from_cut_sets,
    make_kofn,
    parallel,
    series,
)

System = Union[SystemStructure, WeightedLatticePolynomial]

STRUCTURE_KINDS = (
    "path_sets", "cut_sets", "truth_table", "kofn", "series", "parallel",
    "weights", "weighted_min", "weighted_max", "symmetric",
)
LIFETIME_KINDS = ("independent", "comonotone", "discrete_joint")
MARGINAL_KINDS = ("exponential", "weibull", "empirical")
INF_WORDS = {"inf", "+inf", "infinity", "+infinity", ".inf", "∞"}

_constructor = yaml.constructor.SafeConstructor()


@dataclass
class SystemSpec:
    n: int
    system: System
    lifetimes: Optional[JointLifetimeModel]
    structure_kind: str

    @property
    def weighted(self) -> bool:
        return isinstance(self.system, WeightedLatticePolynomial)


class _Node:
    """A YAML node together with the key path that led to it."""

    def __init__(self, node: yaml.Node, path: str):
        self.node = node
        self.path = path

    @property
    def line(self) -> int:
        return self.node.start_mark.line + 1

    def parse_error(self, msg: str) -> ParseError:
        return ParseError(f"{self.path}: {msg}", self.line)

    def invalid(self, msg: str) -> ValidationError:
        return ValidationError(f"{self.path}: {msg}", self.line)

    def mapping(self) -> Dict[str, "_Node"]:
        if not isinstance(self.node, yaml.MappingNode):
            raise self.parse_error("expected a mapping")
        out: Dict[str, _Node] = {}
        for knode, vnode in self.node.value:
            key = str(_constructor.construct_object(knode, deep=True))
            if key in out:
                raise ParseError(f"{self.path}: duplicate key {key!r}", knode.start_mark.line + 1)
            out[key] = _Node(vnode, f"{self.path}.{key}" if self.path else key)
        return out

    def items(self) -> List[tuple]:
        """(key node, value node) pairs of a mapping, in document order."""
        if not isinstance(self.node, yaml.MappingNode):
            raise self.parse_error("expected a mapping")
        return [(_Node(k, self.path), _Node(v, self.path)) for k, v in self.node.value]

    def seq(self) -> List["_Node"]:
        if not isinstance(self.node, yaml.SequenceNode):
            raise self.parse_error("expected a list")
        return [_Node(v, f"{self.path}[{i}]") for i, v in enumerate(self.node.value)]

    def scalar(self):
        if not isinstance(self.node, yaml.ScalarNode):
            raise self.parse_error("expected a scalar")
        return _constructor.construct_object(self.node, deep=True)

    def is_null(self) -> bool:
        return isinstance(self.node, yaml.ScalarNode) and self.node.tag.endswith(":null")


def _only_key(node: _Node, allowed) -> tuple:
    entries = node.mapping()
    unknown = [k for k in entries if k not in allowed]
    if unknown:
        raise entries[unknown[0]].parse_error(
            f"unknown key {unknown[0]!r} (expected one of {', '.join(allowed)})"
        )
    if len(entries) != 1:
        raise node.parse_error(f"expected exactly one of {', '.join(allowed)}, got {len(entries)}")
    return next(iter(entries.items()))


def _number(node: _Node, what: str = "value") -> float:
    val = node.scalar()
    if isinstance(val, bool) or val is None:
        raise node.parse_error(f"{what} must be a number, got {val!r}")
    if isinstance(val, (int, float)):
        out = float(val)
    else:
        text = str(val).strip()
        if text.lower() in INF_WORDS:
            return INF
        try:
            out = float(text)
        except ValueError:
            raise node.parse_error(f"{what} must be a number or 'inf', got {text!r}") from None
    if math.isnan(out):
        raise node.invalid(f"{what} must not be NaN")
    return out


def _integer(node: _Node, what: str) -> int:
    val = node.scalar()
    if isinstance(val, bool) or not isinstance(val, int):
        raise node.parse_error(f"{what} must be an integer, got {val!r}")
    return val


def _numbers(node: _Node, what: str) -> List[float]:
    return [_number(item, what) for item in node.seq()]


def _subset(node: _Node, n: int) -> int:
    if isinstance(node.node, yaml.MappingNode) and not node.node.value:
        parts = []
    elif isinstance(node.node, yaml.SequenceNode):
        parts = [_integer(item, "component index") for item in node.seq()]
    else:
        val = node.scalar()
        if isinstance(val, bool):
            raise node.parse_error(f"subset expected, got {val!r}")
        if isinstance(val, int):
            parts = [val]
        elif val is None:
            parts = []
        else:
            text = str(val).strip()
            if text in ("", "{}"):
                parts = []
            else:
                try:
                    parts = [int(tok) for tok in text.replace(",", " ").split()]
                except ValueError:
                    raise node.parse_error(f"subset must list integers, got {text!r}") from None
    mask = 0
    for i in parts:
        if not 1 <= i <= n:
            raise node.invalid(f"component index {i} outside 1..{n}")
        if mask >> (i - 1) & 1:
            raise node.invalid(f"component {i} listed twice")
        mask |= 1 << (i - 1)
    return mask


def _wrap(node: _Node, fn, *args):
    try:
        return fn(*args)
    except ParseError:
        raise
    except (RelilatError, ValueError) as exc:
        raise node.invalid(str(exc)) from None


# -- structure ----------------------------------------------------------------

def _subset_list(node: _Node, n: int) -> List[int]:
    items = node.seq()
    if not items:
        raise node.invalid("at least one subset is required")
    return [_subset(item, n) for item in items]


def _truth_table(node: _Node, n: int) -> SystemStructure:
    if isinstance(node.node, yaml.SequenceNode):
        bits = [_integer(item, "truth-table bit") for item in node.seq()]
    else:
        text = "".join(str(node.scalar()).split())
        if any(c not in "01" for c in text):
            raise node.parse_error("truth table must consist of 0/1 bits")
        bits = [int(c) for c in text]
    if len(bits) != 1 << n:
        raise node.invalid(f"truth table needs {1 << n} bits for n={n}, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise node.parse_error("truth table must consist of 0/1 bits")
    return _wrap(node, SystemStructure.from_table, bits)


def _weight_pairs(node: _Node, n: int) -> List[tuple]:
    """(mask, value, node) triples from a pair list or a subset -> value mapping."""
    out = []
    if isinstance(node.node, yaml.MappingNode):
        for knode, vnode in node.items():
            out.append((_subset(knode, n), _number(vnode, "weight"), knode))
        return out
    for item in node.seq():
        pair = item.seq()
        if len(pair) != 2:
            raise item.parse_error("weight entries are [subset, value] pairs")
        out.append((_subset(pair[0], n), _number(pair[1], "weight"), item))
    return out


def weights_from_pairs(n: int, pairs) -> np.ndarray:
    """Monotone closure of explicitly listed weights; w({}) defaults to 0.

    ``pairs`` holds (mask, value) tuples. Raises ``ValueError`` naming the
    first listed pair (B, A), B a proper subset of A, with w(B) > w(A).
    """
    listed: Dict[int, float] = {}
    for mask, value in pairs:
        if mask in listed:
            raise ValueError(f"subset {set_repr(mask)} listed twice")
        if value < 0:
            raise ValueError(f"weight of {set_repr(mask)} is negative ({value!r})")
        listed[mask] = value
    for a in sorted(listed):
        for b in sorted(listed):
            if b != a and b & a == b and listed[b] > listed[a]:
                raise ValueError(
                    f"weights must be nondecreasing: ({set_repr(b)},{set_repr(a)}) has "
                    f"w({set_repr(b)})={listed[b]!r} > w({set_repr(a)})={listed[a]!r}"
                )
    seed = np.zeros(1 << n)
    for mask, value in listed.items():
        seed[mask] = value
    masks = np.arange(1 << n)
    for i in range(n):
        bit = 1 << i
        has = (masks & bit) != 0
        seed[has] = np.maximum(seed[has], seed[masks[has] ^ bit])
    return seed


def _weights(node: _Node, n: int) -> WeightedLatticePolynomial:
    pairs = _weight_pairs(node, n)
    if not pairs:
        raise node.invalid("at least one weight is required")
    table = _wrap(node, weights_from_pairs, n, [(m, v) for m, v, _ in pairs])
    return _wrap(node, WeightedLatticePolynomial, SetFunction(n, table))


def _vector_arg(node: _Node, key: str) -> _Node:
    if isinstance(node.node, yaml.MappingNode):
        entries = node.mapping()
        if set(entries) != {key}:
            raise node.parse_error(f"expected a mapping with the single key {key!r}")
        return entries[key]
    return node


def _structure(node: _Node, n: int) -> tuple:
    kind, body = _only_key(node, STRUCTURE_KINDS)
    if kind == "path_sets":
        return _wrap(body, from_path_sets, n, _subset_list(body, n)), kind
    if kind == "cut_sets":
        return _wrap(body, from_cut_sets, n, _subset_list(body, n)), kind
    if kind == "truth_table":
        return _truth_table(body, n), kind
    if kind == "kofn":
        k = _integer(_vector_arg(body, "k"), "k")
        return _wrap(body, make_kofn, n, k), kind
    if kind in ("series", "parallel"):
        empty_map = isinstance(body.node, yaml.MappingNode) and not body.node.value
        flag = isinstance(body.node, yaml.ScalarNode) and body.scalar() is True
        if not (body.is_null() or empty_map or flag):
            raise body.parse_error(f"{kind} takes no arguments (write {kind}: {{}})")
        return (series(n) if kind == "series" else parallel(n)), kind
    if kind == "weights":
        return _weights(body, n), kind
    if kind in ("weighted_min", "weighted_max"):
        vec = _vector_arg(body, "bounds")
        bounds = _numbers(vec, "bound")
        if len(bounds) != n:
            raise vec.invalid(f"expected {n} bounds, got {len(bounds)}")
        fn = make_weighted_min if kind == "weighted_min" else make_weighted_max
        return _wrap(vec, fn, bounds), kind
    vec = _vector_arg(body, "w_tilde")
    profile = _numbers(vec, "profile value")
    if len(profile) != n + 1:
        raise vec.invalid(f"expected n + 1 = {n + 1} profile values, got {len(profile)}")
    prof = _wrap(vec, SymmetricProfile, tuple(profile))
    return _wrap(vec, make_symmetric, prof), kind


# -- lifetimes ----------------------------------------------------------------

def _marginal(node: _Node) -> MarginalLifetime:
    kind, body = _only_key(node, MARGINAL_KINDS)
    if kind == "exponential":
        if isinstance(body.node, yaml.MappingNode):
            rate = _number(_vector_arg(body, "rate"), "rate")
        else:
            rate = _number(body, "rate")
        return _wrap(body, Exponential, rate)
    if kind == "weibull":
        args = body.mapping()
        if set(args) != {"shape", "scale"}:
            raise body.parse_error("weibull needs exactly the keys shape and scale")
        return _wrap(body, Weibull, _number(args["shape"], "shape"), _number(args["scale"], "scale"))
    knots_node = _vector_arg(body, "knots")
    knots = []
    for item in knots_node.seq():
        pair = item.seq()
        if len(pair) != 2:
            raise item.parse_error("knots are [time, survival] pairs")
        knots.append((_number(pair[0], "knot time"), _number(pair[1], "knot survival")))
    return _wrap(knots_node, PiecewiseEmpirical, tuple(knots))


def _lifetimes(node: _Node, n: int) -> JointLifetimeModel:
    kind, body = _only_key(node, LIFETIME_KINDS)
    if kind in ("independent", "comonotone"):
        items = body.seq()
        if len(items) != n:
            raise body.invalid(f"expected {n} marginal declarations, got {len(items)}")
        marginals = [_marginal(item) for item in items]
        return Independent(marginals) if kind == "independent" else Comonotone(marginals)
    args = body.mapping()
    if set(args) != {"atoms", "probs"}:
        raise body.parse_error("discrete_joint needs exactly the keys atoms and probs")
    atoms = []
    for item in args["atoms"].seq():
        row = _numbers(item, "atom lifetime")
        if len(row) != n:
            raise item.invalid(f"atom needs {n} lifetimes, got {len(row)}")
        atoms.append(row)
    probs = _numbers(args["probs"], "probability")
    return _wrap(body, DiscreteJoint, atoms, probs)


# -- entry points -------------------------------------------------------------

def _root(text: str) -> _Node:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ParseError(f"malformed document: {exc.problem or exc.context}",
                         mark.line + 1 if mark else None) from None
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed document: {exc}") from None
    if node is None:
        raise ParseError("empty document")
    return _Node(node, "")


def parse_spec(text: str) -> SystemSpec:
    root = _root(text)
    entries = root.mapping()
    for key, val in entries.items():
        if key not in ("n", "structure", "lifetimes"):
            raise val.parse_error(f"unknown top-level key {key!r}")
    for key in ("n", "structure"):
        if key not in entries:
            raise ParseError(f"missing required key {key!r}", root.line)
    n = _integer(entries["n"], "n")
    if not 1 <= n <= MAX_N:
        raise entries["n"].invalid(f"n must lie in 1..{MAX_N}, got {n}")
    system, kind = _structure(entries["structure"], n)
    lifetimes = _lifetimes(entries["lifetimes"], n) if "lifetimes" in entries else None
    return SystemSpec(n, system, lifetimes, kind)


def parse_spec_file(path: str) -> SystemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_spec(text)


# -- canonical emitter -----------------------------------------------------------

def _num(x: float) -> str:
    return "inf" if x == INF else repr(float(x))


def _marginal_yaml(m: MarginalLifetime) -> str:
    if isinstance(m, Exponential):
        return f"{{exponential: {{rate: {_num(m.rate)}}}}}"
    if isinstance(m, Weibull):
        return f"{{weibull: {{shape: {_num(m.shape)}, scale: {_num(m.scale)}}}}}"
    if isinstance(m, PiecewiseEmpirical):
        knots = ", ".join(f"[{_num(a)}, {_num(b)}]" for a, b in m.knots)
        return f"{{empirical: {{knots: [{knots}]}}}}"
    raise TypeError(f"cannot serialize {type(m).__name__}")


def emit_canonical(spec: SystemSpec) -> str:
    """Canonical text that re-parses to a bit-identical system and lifetime model.

    Plain structures are written as truth tables, weighted ones as the full
    weight list.
    """
    lines = [f"n: {spec.n}", "structure:"]
    system = spec.system
    if isinstance(system, SystemStructure):
        bits = "".join(str(int(b)) for b in system.table)
        lines.append(f'  truth_table: "{bits}"')
    else:
        lines.append("  weights:")
        for mask, value in enumerate(system.weights):
            lines.append(f'    - ["{format_subset(mask)}", {_num(value)}]')
    j = spec.lifetimes
    if j is not None:
        lines.append("lifetimes:")
        if isinstance(j, DiscreteJoint):
            lines.append("  discrete_joint:")
            lines.append("    atoms:")
            for row in j.atoms:
                lines.append("      - [" + ", ".join(_num(x) for x in row) + "]")
            lines.append("    probs: [" + ", ".join(_num(p) for p in j.probs) + "]")
        else:
            lines.append(f"  {j.kind}:")
            for m in j.marginals:
                lines.append(f"    - {_marginal_yaml(m)}")
    return "\n".join(lines) + "\n"


def describe(spec: SystemSpec) -> List[str]:
    """Validation report lines for the ``check`` command."""
    out = ["valid: yes", f"n: {spec.n}", f"structure: {spec.structure_kind}"]
    system = spec.system
    if isinstance(system, SystemStructure):
        out.append(f"minimal_paths: {len(system.minimal_paths)}")
        out.append(f"minimal_cuts: {len(system.minimal_cuts)}")
        irrelevant = system.irrelevant_components
        if irrelevant:
            out.append("irrelevant_components: " + " ".join(map(str, irrelevant)))
    else:
        out.append("weighted: " + ("no" if system.is_unweighted else "yes"))
        out.append(f"minimal_terms: {len(system.minimal_terms)}")
        bps = system.breakpoints()
        out.append("breakpoints: " + (" ".join(format(b, ".17g") for b in bps) if len(bps) else "none"))
    out.append(f"lifetimes: {spec.lifetimes.kind if spec.lifetimes is not None else 'none'}")
    return out


__all__ = [
    "SystemSpec",
    "parse_spec",
    "parse_spec_file",
    "emit_canonical",
    "describe",
    "weights_from_pairs",
]
