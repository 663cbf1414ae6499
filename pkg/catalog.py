"""
Catalog - встроенный каталог алгебр Ли и скрещенных модулей
Реестр записей с ленивой сборкой и проверкой при загрузке, параметрические ключи
(abelian(n), exndim(n), heisenberg_{2n+1}) и дополнительные записи из
директории LIEDEFORM_CATALOG_PATH (.json / .yaml / .yml).
"""

import logging
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from errors import CatalogError, CatalogLookupError, LieDeformError, ValidationError
from exact_linalg import Matrix, Subspace, unit_vector
from lie_core import LieAlgebra, direct_sum, jacobi_check
from products import (
    Action,
    CrossedModule,
    adjoint_crmod,
    check_crossed_module,
    identity_crmod,
    inclusion_crmod,
    quotient_crmod,
    semidirect,
    zero_crmod,
)
from serialization import YAML_SUFFIXES, load_document, looks_like_crossed_module, object_from_dict

logger = logging.getLogger(__name__)

# Конфигурация из окружения
EXNDIM_DEFAULT = int(os.getenv("LIEDEFORM_EXNDIM_DEFAULT", "5"))

CatalogObject = Union[LieAlgebra, CrossedModule]


# ============================================================
# ALGEBRA BUILDERS
# ============================================================

def r2() -> LieAlgebra:
    return LieAlgebra.from_brackets("r2", ["x", "y"], {("x", "y"): {"x": 1}})


def r31() -> LieAlgebra:
    return LieAlgebra.from_brackets("r31", ["e1", "e2", "e3"], {
        ("e1", "e2"): {"e2": 1},
        ("e1", "e3"): {"e3": 1},
    })


def heisenberg(n: int) -> LieAlgebra:
    """h_{2n+1}: базис (e_1..e_2n, z), [e_i, e_{n+i}] = z"""
    if n < 1:
        raise CatalogError(f"Heisenberg algebra needs n >= 1, got {n}")
    labels = [f"e{k + 1}" for k in range(2 * n)] + ["z"]
    brackets = {(f"e{i + 1}", f"e{n + i + 1}"): {"z": 1} for i in range(n)}
    return LieAlgebra.from_brackets(f"heisenberg_{2 * n + 1}", labels, brackets)


def free2step3() -> LieAlgebra:
    labels = ["x1", "x2", "x3", "x12", "x13", "x23"]
    return LieAlgebra.from_brackets("free2step3", labels, {
        ("x1", "x2"): {"x12": 1},
        ("x1", "x3"): {"x13": 1},
        ("x2", "x3"): {"x23": 1},
    })


def ex4dim() -> LieAlgebra:
    return LieAlgebra.from_brackets("ex4dim", ["e1", "e2", "e3", "e4"], {
        ("e1", "e3"): {"e3": 1},
        ("e2", "e4"): {"e4": 1},
    })


def exndim(n: int = EXNDIM_DEFAULT) -> LieAlgebra:
    """[e_1, e_i] = e_i для i = 4..n и [e_2, e_3] = e_3"""
    if n < 4:
        raise CatalogError(f"exndim(n) needs n >= 4, got {n}")
    labels = [f"e{k + 1}" for k in range(n)]
    brackets = {("e2", "e3"): {"e3": 1}}
    for i in range(4, n + 1):
        brackets[("e1", f"e{i}")] = {f"e{i}": 1}
    return LieAlgebra.from_brackets(f"exndim({n})", labels, brackets)


def sl2() -> LieAlgebra:
    """Расщепимая форма: [h, e] = 2e, [h, f] = −2f, [e, f] = h"""
    return LieAlgebra.from_brackets("sl2", ["e", "h", "f"], {
        ("h", "e"): {"e": 2},
        ("h", "f"): {"f": -2},
        ("e", "f"): {"h": 1},
    })


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra.abelian(n, name=f"abelian({n})")


def heisenberg_3_plus_line() -> LieAlgebra:
    return direct_sum(heisenberg(1), LieAlgebra.abelian(1, labels=["a"]), name="heisenberg_3_plus_line")


def _span(n: int, indices: List[int]) -> Subspace:
    return Subspace.span(n, [unit_vector(n, i) for i in indices])


def _sl2_standard() -> Action:
    g = sl2()
    e = Matrix.from_rows([[0, 1], [0, 0]])
    h = Matrix.from_rows([[1, 0], [0, -1]])
    f = Matrix.from_rows([[0, 0], [1, 0]])
    return Action(g, 2, (e, h, f))


# ============================================================
# ENTRIES
# ============================================================

class EntryKind(Enum):
    ALGEBRA = "algebra"
    CROSSED_MODULE = "crossed_module"


@dataclass
class CatalogEntry:
    """Запись каталога: ключ, вид и ленивый конструктор"""
    key: str
    kind: EntryKind
    builder: Callable[[], CatalogObject]
    description: str = ""
    params: Dict[str, Any] = field(default_factory=dict)
    source: str = "builtin"

    def to_dict(self) -> Dict:
        return {
            "key": self.key,
            "kind": self.kind.value,
            "description": self.description,
            "params": self.params,
            "source": self.source,
        }


_PARAMETRIC = [
    (re.compile(r"^abelian\((\d+)\)$"), lambda m: abelian(int(m.group(1))), "abelian algebra of dimension n"),
    (re.compile(r"^exndim\((\d+)\)$"), lambda m: exndim(int(m.group(1))), "[e1, ei] = ei (i >= 4), [e2, e3] = e3"),
    (re.compile(r"^heisenberg_(\d+)$"), None, "Heisenberg algebra of dimension 2n+1"),
]


class Catalog:
    """Реестр записей каталога; объекты собираются и проверяются при первом обращении"""

    def __init__(self, extra_path: Optional[Union[str, Path]] = None, builtins: bool = True):
        self.entries: Dict[str, CatalogEntry] = {}
        self._cache: Dict[str, CatalogObject] = {}
        if builtins:
            self._register_builtins()
        if extra_path:
            self.load_directory(Path(extra_path))

    # --------------------------------------------------------
    # registration
    # --------------------------------------------------------

    def register(self, entry: CatalogEntry):
        if entry.key in self.entries:
            existing = self.entries[entry.key]
            raise CatalogError(f"Catalog key '{entry.key}' from {entry.source} collides with {existing.source}")
        self.entries[entry.key] = entry
        logger.debug(f"Registered catalog entry: {entry.key} ({entry.kind.value})")

    def _algebra(self, key: str, builder: Callable[[], LieAlgebra], description: str):
        self.register(CatalogEntry(key, EntryKind.ALGEBRA, builder, description))

    def _crossed(self, key: str, builder: Callable[[], CrossedModule], description: str):
        def named() -> CrossedModule:
            cm = builder()
            return CrossedModule(cm.h, cm.g, cm.mu, cm.action, name=key)
        self.register(CatalogEntry(key, EntryKind.CROSSED_MODULE, named, description))

    def _register_builtins(self):
        self._algebra("r2", r2, "[x, y] = x")
        self._algebra("r31", r31, "[e1, e2] = e2, [e1, e3] = e3")
        self._algebra("heisenberg_3", lambda: heisenberg(1), "[e1, e2] = z")
        self._algebra("heisenberg_5", lambda: heisenberg(2), "[e1, e3] = [e2, e4] = z")
        self._algebra("free2step3", free2step3, "free 2-step nilpotent algebra of rank 3")
        self._algebra("ex4dim", ex4dim, "[e1, e3] = e3, [e2, e4] = e4")
        self._algebra("exndim", lambda: exndim(EXNDIM_DEFAULT), f"exndim({EXNDIM_DEFAULT})")
        self._algebra("sl2", sl2, "split sl2: [h, e] = 2e, [h, f] = -2f, [e, f] = h")
        self._algebra("heisenberg_3_plus_line", heisenberg_3_plus_line, "heisenberg_3 + abelian(1)")
        self._algebra("r2_direct_square", lambda: direct_sum(r2(), r2(), name="r2+r2"), "r2 + r2")
        self._algebra("r2_semidirect_square", lambda: semidirect(identity_crmod(r2()), name="r2><r2"), "r2 >< r2")
        self._algebra("sl2_direct_square", lambda: direct_sum(sl2(), sl2(), name="sl2+sl2"), "sl2 + sl2")
        self._algebra("sl2_semidirect_square", lambda: semidirect(identity_crmod(sl2()), name="sl2><sl2"),
                      "sl2 >< sl2")

        for key, builder in (("r2", r2), ("r31", r31), ("heisenberg_3", lambda: heisenberg(1)), ("sl2", sl2)):
            self._crossed(f"identity_{key}", lambda b=builder: identity_crmod(b()), f"id: {key} -> {key}")
        adjoint_sources = (
            ("heisenberg_3", lambda: heisenberg(1)),
            ("heisenberg_5", lambda: heisenberg(2)),
            ("r31", r31),
            ("free2step3", free2step3),
            ("sl2", sl2),
            ("r2", r2),
            ("abelian_1", lambda: abelian(1)),
        )
        for key, builder in adjoint_sources:
            self._crossed(f"adjoint_{key}", lambda b=builder: adjoint_crmod(b()), f"ad: {key} -> Der({key})")

        self._crossed("inclusion_r2_first_factor",
                      lambda: inclusion_crmod(direct_sum(r2(), r2(), name="r2+r2"), _span(4, [0, 1])),
                      "r2 -> r2 + r2 into the first factor")
        self._crossed("inclusion_sl2_first_factor",
                      lambda: inclusion_crmod(direct_sum(sl2(), sl2(), name="sl2+sl2"), _span(6, [0, 1, 2])),
                      "sl2 -> sl2 + sl2 into the first factor")
        self._crossed("inclusion_r2_line", lambda: inclusion_crmod(r2(), _span(2, [0])), "Qx -> r2")
        self._crossed("inclusion_ex4dim", lambda: inclusion_crmod(ex4dim(), _span(4, [0, 2, 3])),
                      "<e1, e3, e4> -> ex4dim")
        self._crossed("inclusion_exndim5", lambda: inclusion_crmod(exndim(5), _span(5, [0, 2, 3, 4])),
                      "<e1, e3, e4, e5> -> exndim(5)")
        self._crossed("quotient_free2step3", lambda: quotient_crmod(free2step3(), _span(6, [3, 4])),
                      "free2step3 -> free2step3 / <x12, x13>")
        self._crossed("zero_r2_adjoint", lambda: zero_crmod(Action.adjoint(r2())), "0: r2 (adjoint module) -> r2")
        self._crossed("zero_r2_trivial", lambda: zero_crmod(Action.trivial(r2(), 1)), "0: Q (trivial) -> r2")
        self._crossed("zero_sl2_standard", lambda: zero_crmod(_sl2_standard()), "0: Q^2 (standard) -> sl2")

    # --------------------------------------------------------
    # lookup
    # --------------------------------------------------------

    def list_keys(self) -> List[str]:
        return sorted(self.entries)

    def list_entries(self) -> List[CatalogEntry]:
        return [self.entries[key] for key in self.list_keys()]

    def _parametric(self, key: str) -> Optional[CatalogEntry]:
        for pattern, builder, description in _PARAMETRIC:
            match = pattern.match(key)
            if not match:
                continue
            if builder is None:
                size = int(match.group(1))
                if size < 3 or size % 2 == 0:
                    return None
                n = (size - 1) // 2
                return CatalogEntry(key, EntryKind.ALGEBRA, lambda: heisenberg(n), description, {"n": n})
            return CatalogEntry(key, EntryKind.ALGEBRA, lambda m=match, b=builder: b(m), description,
                                {"n": int(match.group(1))})
        return None

    def entry(self, key: str) -> CatalogEntry:
        if key in self.entries:
            return self.entries[key]
        entry = self._parametric(key)
        if entry is None:
            raise CatalogLookupError(key, self.list_keys())
        return entry

    def get(self, key: str) -> CatalogObject:
        if key in self._cache:
            return self._cache[key]
        entry = self.entry(key)
        obj = entry.builder()
        self._validate(key, obj)
        self._cache[key] = obj
        return obj

    def _validate(self, key: str, obj: CatalogObject):
        if isinstance(obj, LieAlgebra):
            violations = jacobi_check(obj)
            if violations:
                raise ValidationError(f"Catalog entry '{key}' violates the Jacobi identity on {violations[0]}",
                                      violations)
        else:
            report = check_crossed_module(obj)
            if not report.ok:
                raise ValidationError(f"Catalog entry '{key}' is not a crossed module: {report.summary()}", report)

    def validate_all(self) -> Dict[str, bool]:
        results = {}
        for key in self.list_keys():
            try:
                self.get(key)
                results[key] = True
            except LieDeformError as e:
                logger.warning(f"Catalog entry {key} failed validation: {e}")
                results[key] = False
        return results

    # --------------------------------------------------------
    # extra entries
    # --------------------------------------------------------

    def load_directory(self, path: Path) -> int:
        """Загрузить записи из .json / .yaml / .yml; битые файлы пропускаются"""
        if not path.is_dir():
            logger.warning(f"Catalog directory not found: {path}")
            return 0
        loaded = 0
        for file_path in sorted(path.iterdir()):
            if file_path.suffix.lower() not in (".json",) + YAML_SUFFIXES:
                continue
            try:
                entry = self._entry_from_file(file_path)
            except (LieDeformError, OSError) as e:
                logger.warning(f"Skipping catalog file {file_path.name}: {e}")
                continue
            self.register(entry)
            loaded += 1
            logger.info(f"Loaded catalog entry: {entry.key} from {file_path.name}")
        return loaded

    def _entry_from_file(self, file_path: Path) -> CatalogEntry:
        document = load_document(file_path)
        if not isinstance(document, dict):
            raise ValidationError(f"{file_path.name}: top level must be an object")
        data = document.get("data", document)
        key = str(document.get("key", file_path.stem))
        kind_value = document.get("kind")
        if kind_value is None:
            kind = EntryKind.CROSSED_MODULE if looks_like_crossed_module(data) else EntryKind.ALGEBRA
        else:
            try:
                kind = EntryKind(kind_value)
            except ValueError:
                raise ValidationError(f"{file_path.name}: unknown kind '{kind_value}'")
        if kind is EntryKind.ALGEBRA:
            # алгебры разбираем сразу, чтобы битые файлы отсеивались при загрузке
            algebra = object_from_dict(data)
            if not isinstance(algebra, LieAlgebra):
                raise ValidationError(f"{file_path.name}: kind 'algebra' but data is a crossed module")
            builder = lambda a=algebra: a
        else:
            def builder(d=data, k=key) -> CrossedModule:
                cm = object_from_dict(d, resolver=self.get)
                return CrossedModule(cm.h, cm.g, cm.mu, cm.action, name=k)
        return CatalogEntry(key, kind, builder, str(document.get("description", "")), source=str(file_path))


# ============================================================
# GLOBAL INSTANCE
# ============================================================

_catalog: Optional[Catalog] = None


def get_catalog() -> Catalog:
    """Глобальный каталог; LIEDEFORM_CATALOG_PATH читается при первом обращении"""
    global _catalog
    if _catalog is None:
        _catalog = Catalog(extra_path=os.getenv("LIEDEFORM_CATALOG_PATH") or None)
        logger.info(f"Catalog ready with {len(_catalog.entries)} entries")
    return _catalog


def reset_catalog():
    global _catalog
    _catalog = None


def catalog_get(key: str) -> CatalogObject:
    return get_catalog().get(key)
