""" Algebra documents: YAML files describing an algebra with named effects, states and contexts.

    backend: hilbertian        # classical (n) | hilbertian (d, optional generators) | direct_sum (parts)
    d: 2
    seed: 7
    tolerance: {eq: 1.0e-9}
    effects:
      b: [[[0.5, 0], [0.25, 0]], [[0.25, 0], [0.5, 0]]]
    states:
      rho: [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]
    contexts:
      rotated: {vectors: [[[0.7071067811865476, 0], [0.7071067811865476, 0]], ...]}

Complex entries are always [re, im] pairs; classical effects and states are arrays of reals. Direct-sum effects list
one payload per summand, direct-sum states are {weights, parts}. Context vectors are columns in the block-diagonal
embedding, given either as `vectors` or as the columns of a `unitary`.
"""
import hashlib
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import yaml

from src.effects import errors
from src.effects.core import Algebra, Effect, ToleranceConfig
from src.backends.contexts import Context, context_from_unitary, context_from_vectors
from src.backends.states import State
from src.utils import registry
from src.utils.config import instantiate
from src.utils.run import get_logger

log = get_logger(__name__)

TOP_LEVEL = {"backend", "n", "d", "generators", "parts", "seed", "tolerance", "effects", "states", "contexts"}


@dataclass(eq=False)
class AlgebraDocument:
    algebra: Algebra
    spec: Dict
    effects: Dict[str, Effect] = field(default_factory=dict)
    states: Dict[str, State] = field(default_factory=dict)
    contexts: Dict[str, Context] = field(default_factory=dict)
    tolerance: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None
    digest: str = ""

    def _lookup(self, table, kind, name):
        if name not in table:
            raise errors.UnknownName(f"no {kind} named '{name}' (have {sorted(table)})", name=name)
        return table[name]

    def effect(self, name) -> Effect:
        return self._lookup(self.effects, "effect", name)

    def state(self, name) -> State:
        return self._lookup(self.states, "state", name)

    def context(self, name) -> Context:
        return self._lookup(self.contexts, "context", name)


""" Numeric coercion """


def _real(x, name):
    # PyYAML reads exponents without a dot (1e-9) as strings
    if isinstance(x, bool):
        raise errors.ValidationError(f"expected a number, got {x!r}", name=name)
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(x)
        except ValueError:
            pass
    raise errors.ValidationError(f"expected a number, got {x!r}", name=name)


def _array(raw, name):
    def convert(x):
        if isinstance(x, (list, tuple)):
            return [convert(y) for y in x]
        return _real(x, name)
    try:
        return np.array(convert(raw), dtype=float)
    except ValueError as e:
        raise errors.ValidationError(f"ragged array ({e})", name=name)


def real_array(raw, shape, name):
    arr = _array(raw, name)
    if arr.shape != tuple(shape):
        raise errors.ValidationError(f"expected an array of shape {tuple(shape)}, got {arr.shape}", name=name)
    return arr


def complex_array(raw, shape, name):
    """Array of [re, im] pairs"""
    arr = _array(raw, name)
    if arr.shape != tuple(shape) + (2,):
        raise errors.ValidationError(
            f"expected {tuple(shape)} entries written as [re, im] pairs, got an array of shape {arr.shape}", name=name
        )
    return arr[..., 0] + 1j * arr[..., 1]


def to_pairs(M):
    M = np.asarray(M, dtype=complex)
    return np.stack([M.real, M.imag], axis=-1).tolist()


""" Algebra """


def _integer(raw, key, name):
    value = _real(raw.get(key), f"{name}.{key}" if name else key) if key in raw else None
    if value is None or value != int(value) or value < 1:
        raise errors.ValidationError(f"'{key}' must be a positive integer", name=name or key)
    return int(value)


def build_algebra(raw, tol: ToleranceConfig, name="") -> Algebra:
    """Algebra from the backend part of a document, resolved by backend name through the registry"""
    if not isinstance(raw, dict) or "backend" not in raw:
        raise errors.ValidationError("missing 'backend'", name=name or "backend")
    backend = raw["backend"]
    if backend == "classical":
        kwargs = dict(n=_integer(raw, "n", name))
    elif backend == "hilbertian":
        d = _integer(raw, "d", name)
        generators = raw.get("generators") or []
        kwargs = dict(d=d, generators=tuple(
            complex_array(g, (d, d), f"{name or 'generators'}[{i}]") for i, g in enumerate(generators)
        ))
    elif backend == "direct_sum":
        parts = raw.get("parts")
        if not isinstance(parts, list) or len(parts) < 2:
            raise errors.ValidationError("a direct sum needs a list of at least 2 parts", name=name or "parts")
        kwargs = dict(parts=[build_algebra(p, tol, f"parts[{i}]") for i, p in enumerate(parts)])
    else:
        kwargs = {}
    try:
        return instantiate(registry.backend, {"_name_": backend, **kwargs}, tol=tol)
    except errors.UnknownName:
        raise
    except errors.CoseaError as e:
        raise errors.ValidationError(str(e), name=name or "backend") from e


def algebra_spec(E: Algebra) -> Dict:
    if E.name == "classical":
        return dict(backend="classical", n=E.n)
    if E.name == "hilbertian":
        spec = dict(backend="hilbertian", d=E.d)
        if E.generators:
            spec["generators"] = [to_pairs(g) for g in E.generators]
        return spec
    return dict(backend="direct_sum", parts=[algebra_spec(P) for P in E.parts])


""" Named objects """


def effect_payload(E: Algebra, raw, name):
    if E.name == "classical":
        return real_array(raw, (E.n,), name)
    if E.name == "hilbertian":
        return complex_array(raw, (E.d, E.d), name)
    if not isinstance(raw, list) or len(raw) != len(E.parts):
        raise errors.ValidationError(f"expected one payload per summand ({len(E.parts)})", name=name)
    return tuple(effect_payload(P, x, f"{name}[{i}]") for i, (P, x) in enumerate(zip(E.parts, raw)))


def dump_effect(E: Algebra, a: Effect):
    if E.name == "classical":
        return np.asarray(a.payload, dtype=float).tolist()
    if E.name == "hilbertian":
        return to_pairs(a.payload)
    return [dump_effect(P, x) for P, x in zip(E.parts, a.payload)]


def state_payload(E: Algebra, raw, name):
    if E.name == "classical":
        return real_array(raw, (E.n,), name)
    if E.name == "hilbertian":
        return complex_array(raw, (E.d, E.d), name)
    if not isinstance(raw, dict) or set(raw) != {"weights", "parts"}:
        raise errors.ValidationError("a direct-sum state is {weights, parts}", name=name)
    weights = real_array(raw["weights"], (len(E.parts),), f"{name}.weights")
    parts = raw["parts"]
    if not isinstance(parts, list) or len(parts) != len(E.parts):
        raise errors.ValidationError(f"expected one part state per summand ({len(E.parts)})", name=name)
    return weights, [P.state(state_payload(P, x, f"{name}.parts[{i}]")) for i, (P, x) in enumerate(zip(E.parts, parts))]


def dump_state(E: Algebra, s: State):
    if E.name == "classical":
        return np.asarray(s.payload, dtype=float).tolist()
    if E.name == "hilbertian":
        return to_pairs(s.payload)
    return dict(weights=np.asarray(s.weights, dtype=float).tolist(),
                parts=[dump_state(P, x) for P, x in zip(E.parts, s.parts)])


def build_context(E: Algebra, raw, name) -> Context:
    if not isinstance(raw, dict) or len(set(raw) & {"vectors", "unitary"}) != 1:
        raise errors.ValidationError("a context is given by exactly one of 'vectors' or 'unitary'", name=name)
    if "unitary" in raw:
        return context_from_unitary(E, complex_array(raw["unitary"], (E.dim, E.dim), name))
    vectors = raw["vectors"]
    if not isinstance(vectors, list):
        raise errors.ValidationError("'vectors' must be a list", name=name)
    columns = complex_array(vectors, (len(vectors), E.dim), name)
    return context_from_vectors(E, columns.T)


def _construct(kind, name, fn, *args):
    """Run a backend constructor, reporting any failure against the named object"""
    try:
        return fn(*args)
    except errors.ValidationError:
        raise
    except errors.CoseaError as e:
        raise errors.ValidationError(f"{kind}: {e}", name=name) from e


def _mapping(raw, key):
    section = raw.get(key) or {}
    if not isinstance(section, dict):
        raise errors.ValidationError(f"'{key}' must map names to values", name=key)
    return section


""" Parsing and dumping """


def parse_algebra_text(text: str, defaults=None, overrides=None) -> AlgebraDocument:
    """Tolerance precedence: `defaults` < the document's `tolerance:` block < `overrides`"""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line, column = (mark.line + 1, mark.column + 1) if mark is not None else (None, None)
        raise errors.ParseError(getattr(e, "problem", None) or str(e), line=line, column=column) from e
    if not isinstance(raw, dict):
        raise errors.ParseError("a document must be a mapping at the top level", line=1, column=1)
    unknown = set(raw) - TOP_LEVEL
    if unknown:
        raise errors.ValidationError(f"unknown keys {sorted(unknown)}", name=sorted(unknown)[0])

    written = {k: _real(v, f"tolerance.{k}") for k, v in _mapping(raw, "tolerance").items()}
    try:
        tol = ToleranceConfig.from_config(defaults or {}, **{**written, **dict(overrides or {})})
    except errors.InvalidTolerance as e:
        raise errors.ValidationError(str(e), name="tolerance") from e

    seed = raw.get("seed")
    if seed is not None:
        seed = _real(seed, "seed")
        if seed != int(seed) or seed < 0:
            raise errors.ValidationError("seed must be a non-negative integer", name="seed")
        seed = int(seed)

    E = build_algebra(raw, tol)
    doc = AlgebraDocument(E, algebra_spec(E), tolerance=written, seed=seed,
                          digest=hashlib.sha256(text.encode("utf-8")).hexdigest())
    for name, x in _mapping(raw, "effects").items():
        doc.effects[str(name)] = _construct("effect", str(name), E.effect, effect_payload(E, x, str(name)))
    for name, x in _mapping(raw, "states").items():
        doc.states[str(name)] = _construct("state", str(name), E.state, state_payload(E, x, str(name)))
    for name, x in _mapping(raw, "contexts").items():
        doc.contexts[str(name)] = _construct("context", str(name), build_context, E, x, str(name))
    log.debug(f"parsed {E.signature} with {len(doc.effects)} effects, {len(doc.states)} states, "
              f"{len(doc.contexts)} contexts")
    return doc


def parse_algebra_file(path, defaults=None, overrides=None) -> AlgebraDocument:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise errors.IoError(f"cannot read {path}: {e.strerror}", name=str(path)) from e
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise errors.ParseError(f"{path} is not UTF-8 ({e.reason})") from e
    return parse_algebra_text(text, defaults, overrides)


def dump_algebra_document(doc: AlgebraDocument) -> str:
    E = doc.algebra
    out = dict(doc.spec)
    if doc.seed is not None:
        out["seed"] = doc.seed
    if doc.tolerance:
        out["tolerance"] = dict(doc.tolerance)
    if doc.effects:
        out["effects"] = {name: dump_effect(E, a) for name, a in doc.effects.items()}
    if doc.states:
        out["states"] = {name: dump_state(E, s) for name, s in doc.states.items()}
    if doc.contexts:
        out["contexts"] = {name: dict(vectors=[to_pairs(v) for v in ctx.vectors.T]) for name, ctx in doc.contexts.items()}
    return yaml.safe_dump(out, sort_keys=False, allow_unicode=True)
