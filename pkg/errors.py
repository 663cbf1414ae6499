"""
Errors - иерархия исключений liedeform
Все ошибки наследуются от ValueError, чтобы вызывающий код мог ловить их одной веткой
"""

from typing import Any, List, Optional


class LieDeformError(ValueError):
    """Базовая ошибка библиотеки"""


class DimensionError(LieDeformError):
    """Несовпадение размерностей векторов, матриц или пространств"""


class SingularityError(LieDeformError):
    """Необратимая матрица там, где нужна обратимая"""


class IdealError(LieDeformError):
    """Подпространство не является идеалом (или подалгеброй)"""


class ActionError(LieDeformError):
    """Матрицы не задают действие алгебры Ли"""


class CrossedModuleError(LieDeformError):
    """Нарушены аксиомы скрещенного модуля"""


class ApplicabilityError(LieDeformError):
    """Утверждение не применимо к данному объекту"""


class PreconditionError(LieDeformError):
    """Нарушено предусловие операции"""


class DegreeError(LieDeformError):
    """Неподдерживаемая степень коцепи"""


class ParseError(LieDeformError):
    """Ошибка разбора JSON / YAML"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class CatalogError(LieDeformError):
    """Ошибка каталога (коллизия ключей, невалидная запись)"""


class CatalogLookupError(CatalogError):
    """Неизвестный ключ каталога"""

    def __init__(self, key: str, available: List[str]):
        self.key = key
        self.available = list(available)
        super().__init__(f"Unknown catalog key '{key}'. Available: {', '.join(self.available)}")


class ValidationError(LieDeformError):
    """Объект не прошёл проверку; report содержит список нарушений"""

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message)


class TheoremViolation(LieDeformError):
    """Проверяемое утверждение не выполнилось на конкретном примере"""
