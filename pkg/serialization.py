"""
Serialization - JSON / YAML форматы liedeform
Каноническая эмиссия (ключи отсортированы, отступ 2, перевод строки в конце),
разбор с номерами строк, кодеки алгебр и скрещенных модулей со ссылками "@key".
"""

import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Union

from errors import CatalogError, DimensionError, ParseError
from exact_linalg import Matrix, Subspace, to_vector
from lie_core import LieAlgebra, LinearMap
from products import (
    Action,
    CrossedModule,
    adjoint_crmod,
    identity_crmod,
    inclusion_crmod,
    quotient_crmod,
    zero_crmod,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
YAML_SUFFIXES = (".yaml", ".yml")

Resolver = Callable[[str], Any]


# ============================================================
# TEXT LEVEL
# ============================================================

def dumps(obj: Any) -> str:
    """Каноническая эмиссия: повторный разбор и эмиссия дают те же байты"""
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Malformed JSON: {e.msg}", e.lineno, e.colno)


def loads_yaml(text: str) -> Any:
    import yaml
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        if mark is not None:
            raise ParseError(f"Malformed YAML: {getattr(e, 'problem', e)}", mark.line + 1, mark.column + 1)
        raise ParseError(f"Malformed YAML: {e}")


def load_document(path: Union[str, Path]) -> Any:
    """Файл .json / .yaml / .yml; FileNotFoundError пробрасывается наверх"""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in YAML_SUFFIXES:
        return loads_yaml(text)
    return loads(text)


def write_document(path: Union[str, Path], obj: Any):
    Path(path).write_text(dumps(obj), encoding="utf-8")


# ============================================================
# ALGEBRAS
# ============================================================

def algebra_to_dict(L: LieAlgebra) -> Dict:
    return L.to_dict()


def algebra_from_dict(data: Mapping) -> LieAlgebra:
    return LieAlgebra.from_dict(data)


def _resolve_algebra(data: Any, resolver: Optional[Resolver]) -> LieAlgebra:
    if isinstance(data, str):
        if not data.startswith("@"):
            raise ParseError(f"Algebra reference must look like '@key', got '{data}'")
        if resolver is None:
            raise CatalogError(f"No catalog available to resolve '{data}'")
        value = resolver(data[1:])
        if not isinstance(value, LieAlgebra):
            raise ParseError(f"'{data}' does not name a Lie algebra")
        return value
    if isinstance(data, Mapping):
        return algebra_from_dict(data)
    raise ParseError(f"Expected an algebra object or '@key', got {type(data).__name__}")


def _matrix(data: Any, rows: int, cols: int, what: str) -> Matrix:
    try:
        m = Matrix.from_lists(data, cols=cols)
    except (TypeError, DimensionError) as e:
        raise ParseError(f"Malformed {what}: {e}")
    if m.shape != (rows, cols):
        raise ParseError(f"{what} must be {rows}x{cols}, got {m.rows}x{m.cols}")
    return m


# ============================================================
# CROSSED MODULES
# ============================================================

def crossed_module_to_dict(cm: CrossedModule) -> Dict:
    return cm.to_dict()


def _ideal(data: Any, n: int) -> Subspace:
    try:
        vectors = [to_vector(v) for v in data]
        return Subspace.span(n, vectors)
    except (TypeError, DimensionError) as e:
        raise ParseError(f"Malformed ideal: {e}")


def _builtin_crossed_module(data: Mapping, resolver: Optional[Resolver]) -> CrossedModule:
    kind = data["builtin"]
    g = _resolve_algebra(data["of"], resolver)
    name = data.get("name")
    if kind == "identity":
        return identity_crmod(g)
    if kind == "adjoint":
        return adjoint_crmod(g)
    if kind == "inclusion":
        return inclusion_crmod(g, _ideal(data["ideal"], g.dim), name=name)
    if kind == "quotient":
        return quotient_crmod(g, _ideal(data["ideal"], g.dim), name=name)
    if kind == "zero":
        if "action" in data:
            matrices = data["action"]
            size = len(matrices[0]) if matrices else int(data.get("dim", 0))
            rho = tuple(_matrix(m, size, size, "action matrix") for m in matrices)
        else:
            size = int(data.get("dim", 1))
            rho = tuple(Matrix.zeros(size, size) for _ in range(g.dim))
        return zero_crmod(Action(g, size, rho), name=name)
    raise ParseError(f"Unknown builtin crossed module '{kind}'")


def crossed_module_from_dict(data: Mapping, resolver: Optional[Resolver] = None) -> CrossedModule:
    """Inline-данные, {"builtin": ...} или алгебры по ссылке "@key" """
    try:
        if "builtin" in data:
            return _builtin_crossed_module(data, resolver)
        h = _resolve_algebra(data["h"], resolver)
        g = _resolve_algebra(data["g"], resolver)
        mu = _matrix(data["mu"], g.dim, h.dim, "mu")
        action = data["action"]
        if len(action) != g.dim:
            raise ParseError(f"action needs {g.dim} matrices, got {len(action)}")
        rho = tuple(_matrix(m, h.dim, h.dim, "action matrix") for m in action)
        return CrossedModule(h, g, LinearMap(h, g, mu), Action(g, h.dim, rho), name=data.get("name", "crossed_module"))
    except KeyError as e:
        raise ParseError(f"Crossed module data lacks field {e}")
    except (TypeError, AttributeError) as e:
        raise ParseError(f"Malformed crossed module data: {e!r}")


def looks_like_crossed_module(data: Any) -> bool:
    return isinstance(data, Mapping) and ("builtin" in data or ("mu" in data and "action" in data))


def object_from_dict(data: Any, resolver: Optional[Resolver] = None) -> Union[LieAlgebra, CrossedModule]:
    if looks_like_crossed_module(data):
        return crossed_module_from_dict(data, resolver)
    if isinstance(data, Mapping):
        return algebra_from_dict(data)
    raise ParseError(f"Expected a JSON object, got {type(data).__name__}")


def object_to_dict(obj: Union[LieAlgebra, CrossedModule]) -> Dict:
    return obj.to_dict()


def report(command: str, result: Any) -> Dict:
    """Отчёт CLI в схеме {"schema_version", "command", "result"}"""
    return {"schema_version": SCHEMA_VERSION, "command": command, "result": result}
