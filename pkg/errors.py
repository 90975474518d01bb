"""Исключения вычислений гомологий квадрик."""


class QuadricError(ValueError):
    """Базовая ошибка библиотеки"""


class TorsionPresent(QuadricError):
    """Градуированная группа содержит кручение там, где нужна свободная"""


class KernelNotPreserved(QuadricError):
    """Отображение выводит образующую ядра аугментации за пределы ядра"""


class NotInvolution(QuadricError):
    """Отображение не является инволюцией"""


class NotDegenerate(QuadricError):
    """Сигнатура не относится к вырожденному случаю"""


class NotNonDegenerate(QuadricError):
    """Сигнатура не относится к невырожденному случаю n = p + q"""


class Inconsistent(QuadricError):
    """Рекурсия для целочисленных гомологий дала отрицательное число слагаемых"""


class InvalidSignature(QuadricError):
    """Недопустимая тройка (p, q, n)"""


class ProjectiveSpaceReferral(InvalidSignature):
    """Случай p = 0 или q = 0: квадрика является проективным пространством"""

    def __init__(self, message: str, dimension: int):
        super().__init__(message)
        self.dimension = dimension


class EmptyQuadric(InvalidSignature):
    """Квадрика пуста"""


class NotSimplicial(QuadricError):
    """Отображение вершин не переводит симплексы в симплексы"""


class NotFree(QuadricError):
    """Инволюция имеет неподвижную вершину"""


class NotRegular(QuadricError):
    """Действие инволюции не регулярно, нужно барицентрическое подразделение"""


class UnsupportedModel(QuadricError):
    """Модель сферы не допускает симплициального антипода"""


class RegularityUnreachable(QuadricError):
    """Регулярность не достигнута после допустимого числа подразделений"""


class OracleInfeasible(QuadricError):
    """Построение превышает предел числа граней"""

    def __init__(self, message: str, projected_faces: int, face_cap: int):
        super().__init__(message)
        self.projected_faces = projected_faces
        self.face_cap = face_cap
