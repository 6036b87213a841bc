"""Deterministic random-graph generators for experiments.

A generator spec names a family and its options, e.g.
``erdos-renyi(n=10, p=0.3)``, plus a weight model, e.g.
``uniform(0.1, 10)``.  Generation is fully determined by the spec and
its seed: edges are decided first, sorted into canonical order, and
weights drawn per edge in that order from a separate substream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .graph import StochasticGraph
from .realization import GENERATOR_DRAWS, RngSeed

__all__ = ["GeneratorSpec", "parse_generator", "parse_weights", "generate_graph", "FAMILIES"]

FAMILIES = ("path", "cycle", "star", "complete", "erdos-renyi", "bipartite")

WEIGHT_MODELS = ("unit", "uniform", "exponential")


@dataclass
class GeneratorSpec:
    """A graph family plus weight model and seed.

    Attributes:
        family: one of FAMILIES.
        options: family options (e.g. n, p, a, b) as floats/ints.
        weights: "unit", "uniform" (args lo, hi) or "exponential" (arg mean).
        weight_args: numeric arguments of the weight model.
        seed: generation seed; same spec, same graph.
    """

    family: str
    options: dict[str, float] = field(default_factory=dict)
    weights: str = "unit"
    weight_args: tuple[float, ...] = ()
    seed: int = 0

    def label(self) -> str:
        """Stable human-readable identifier used as graph_id."""
        opts = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.options.items()))
        parts = [f"{self.family}({opts})"]
        if self.weights != "unit":
            parts.append(f"{self.weights}({','.join(_fmt(a) for a in self.weight_args)})")
        parts.append(f"s{self.seed}")
        return ":".join(parts)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


_CALL_RE = re.compile(r"^\s*([a-z-]+)\s*\(([^)]*)\)\s*$")


def parse_generator(text: str) -> GeneratorSpec:
    """Parse "family(k=v, ...)" into a spec (weight model left at unit)."""
    m = _CALL_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse generator spec {text!r}; expected family(k=v,...)")
    family, body = m.group(1), m.group(2)
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")
    options: dict[str, float] = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        if "=" not in part:
            raise ValueError(f"generator option {part!r} is not k=v")
        k, v = part.split("=", 1)
        options[k.strip()] = float(v)
    return GeneratorSpec(family, options)


def parse_weights(text: str) -> tuple[str, tuple[float, ...]]:
    """Parse "unit", "uniform(lo,hi)" or "exponential(mean)"."""
    text = text.strip()
    if text == "unit":
        return "unit", ()
    m = _CALL_RE.match(text)
    if not m or m.group(1) not in WEIGHT_MODELS:
        raise ValueError(f"cannot parse weight model {text!r}")
    kind = m.group(1)
    args = tuple(float(p) for p in filter(None, (p.strip() for p in m.group(2).split(","))))
    if kind == "uniform" and (len(args) != 2 or args[0] >= args[1] or args[0] < 0):
        raise ValueError("uniform weights need 0 <= lo < hi")
    if kind == "exponential" and (len(args) != 1 or args[0] <= 0):
        raise ValueError("exponential weights need one positive mean")
    return kind, args


def _int_option(spec: GeneratorSpec, name: str, minimum: int = 0) -> int:
    if name not in spec.options:
        raise ValueError(f"family {spec.family!r} needs option {name!r}")
    v = spec.options[name]
    if v != int(v) or int(v) < minimum:
        raise ValueError(f"option {name}={v!r} must be an integer >= {minimum}")
    return int(v)


def generate_graph(spec: GeneratorSpec, p_v: float = 1.0, p_e: float = 1.0) -> StochasticGraph:
    """Materialize the spec into a graph with the given probabilities."""
    rng = RngSeed(spec.seed)
    family = spec.family
    if family == "path":
        n = _int_option(spec, "n", 1)
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif family == "cycle":
        n = _int_option(spec, "n", 3)
        pairs = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    elif family == "star":
        n = _int_option(spec, "n", 1)
        pairs = [(0, i) for i in range(1, n)]
    elif family == "complete":
        n = _int_option(spec, "n", 1)
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    elif family == "erdos-renyi":
        n = _int_option(spec, "n", 1)
        p = spec.options.get("p")
        if p is None or not (0.0 <= p <= 1.0):
            raise ValueError("erdos-renyi needs option p in [0, 1]")
        gen = rng.generator(GENERATOR_DRAWS, 0)
        draws = gen.random(n * (n - 1) // 2)
        all_pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        pairs = [pq for pq, d in zip(all_pairs, draws) if d < p]
    elif family == "bipartite":
        a = _int_option(spec, "a", 1)
        b = _int_option(spec, "b", 1)
        p = spec.options.get("p", 1.0)
        if not (0.0 <= p <= 1.0):
            raise ValueError("bipartite needs option p in [0, 1]")
        n = a + b
        gen = rng.generator(GENERATOR_DRAWS, 0)
        draws = gen.random(a * b)
        all_pairs = [(u, a + v) for u in range(a) for v in range(b)]
        pairs = [pq for pq, d in zip(all_pairs, draws) if d < p]
    else:  # pragma: no cover - parse_generator already rejects
        raise ValueError(f"unknown family {spec.family!r}")

    pairs = sorted((min(u, v), max(u, v)) for u, v in pairs)
    if spec.weights == "unit":
        edges = [(u, v, 1.0) for u, v in pairs]
        weighted = False
    else:
        wgen = rng.generator(GENERATOR_DRAWS, 1)
        if spec.weights == "uniform":
            lo, hi = spec.weight_args
            ws = wgen.uniform(lo, hi, size=len(pairs))
        elif spec.weights == "exponential":
            ws = wgen.exponential(spec.weight_args[0], size=len(pairs))
        else:
            raise ValueError(f"unknown weight model {spec.weights!r}")
        edges = [(u, v, float(w)) for (u, v), w in zip(pairs, ws)]
        weighted = True
    return StochasticGraph(n, tuple(edges), p_v, p_e, weighted)  # type: ignore[arg-type]
