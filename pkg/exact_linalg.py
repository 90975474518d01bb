"""Точная разреженная целочисленная линейная алгебра: нормальная форма Смита, ранг над GF(2) и над Q."""
import logging
from collections import defaultdict
from dataclasses import dataclass
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict, model_validator
from sympy import factorint
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

MATRIX_MARKET_HEADER = "%%MatrixMarket matrix coordinate integer general"


class SparseIntMatrix:
    """Разреженная целочисленная матрица произвольной точности (хранятся только ненулевые элементы)"""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Optional[Dict[Tuple[int, int], int]] = None):
        if rows < 0 or cols < 0:
            raise ValueError(f"Недопустимые размеры матрицы: {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.entries: Dict[Tuple[int, int], int] = {}
        for (i, j), value in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"Индекс ({i}, {j}) вне матрицы {rows}x{cols}")
            if value:
                self.entries[(i, j)] = int(value)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {(i, j): v for i, row in enumerate(data) for j, v in enumerate(row) if v}
        return cls(rows, cols, entries)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Dict[int, int]]) -> "SparseIntMatrix":
        entries = {(i, j): v for j, column in enumerate(columns) for i, v in column.items()}
        return cls(rows, len(columns), entries)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def to_dense(self) -> List[List[int]]:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), value in self.entries.items():
            dense[i][j] = value
        return dense

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def row_dicts(self) -> Dict[int, Dict[int, int]]:
        rows: Dict[int, Dict[int, int]] = defaultdict(dict)
        for (i, j), value in self.entries.items():
            rows[i][j] = value
        return dict(rows)

    def columns(self) -> List[Dict[int, int]]:
        columns: List[Dict[int, int]] = [{} for _ in range(self.cols)]
        for (i, j), value in self.entries.items():
            columns[j][i] = value
        return columns

    def to_matrix_market(self) -> str:
        """Экспорт в текстовый формат троек (индексы с единицы)"""
        lines = [MATRIX_MARKET_HEADER, f"{self.rows} {self.cols} {self.nnz}"]
        for (i, j), value in sorted(self.entries.items()):
            lines.append(f"{i + 1} {j + 1} {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_matrix_market(cls, text: str) -> "SparseIntMatrix":
        """Импорт из текстового формата троек"""
        lines = [line.strip() for line in text.splitlines()]
        lines = [line for line in lines if line and not line.startswith("%")]
        if not lines:
            raise ValueError("Пустой файл матрицы")
        rows, cols, nnz = (int(token) for token in lines[0].split())
        if len(lines) - 1 != nnz:
            raise ValueError(f"Ожидалось {nnz} элементов, получено {len(lines) - 1}")
        entries = {}
        for line in lines[1:]:
            i, j, value = (int(token) for token in line.split())
            entries[(i - 1, j - 1)] = value
        return cls(rows, cols, entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.entries) == (other.rows, other.cols, other.entries)

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


class SmithForm(BaseModel):
    """Инвариантные множители d_1 | d_2 | ... | d_r"""
    model_config = ConfigDict(frozen=True)

    invariants: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def _check_chain(self):
        for d in self.invariants:
            if d < 1:
                raise ValueError(f"Инвариантный множитель должен быть положительным: {d}")
        for a, b in zip(self.invariants, self.invariants[1:]):
            if b % a:
                raise ValueError(f"Нарушена цепочка делимости: {a} не делит {b}")
        return self

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def torsion(self) -> Tuple[int, ...]:
        return tuple(d for d in self.invariants if d > 1)


def invariant_factors_of_diagonal(values: Iterable[int]) -> Tuple[int, ...]:
    """Приводит диагональ после исключения к цепочке инвариантных множителей (единицы сохраняются)"""
    diagonal = [abs(v) for v in values if v]
    exponents: Dict[int, List[int]] = defaultdict(list)
    for value in diagonal:
        for prime, power in factorint(value).items():
            exponents[prime].append(power)
    factors = [1] * len(diagonal)
    for prime, powers in exponents.items():
        powers.sort(reverse=True)
        for offset, power in enumerate(powers):
            factors[len(diagonal) - 1 - offset] *= prime ** power
    return tuple(factors)


class _EliminationState:
    """Строки и индекс столбцов для разреженного исключения"""

    def __init__(self, m: SparseIntMatrix):
        self.rows = m.row_dicts()
        self.cols: Dict[int, Set[int]] = defaultdict(set)
        for (i, j) in m.entries:
            self.cols[j].add(i)

    def set(self, i: int, j: int, value: int):
        row = self.rows.setdefault(i, {})
        if value:
            row[j] = value
            self.cols[j].add(i)
        else:
            row.pop(j, None)
            self.cols[j].discard(i)
            if not self.cols[j]:
                del self.cols[j]
            if not row:
                del self.rows[i]

    def add_row_multiple(self, target: int, source: int, factor: int):
        """row_target -= factor * row_source"""
        if not factor:
            return
        target_row = self.rows.get(target, {})
        for j, value in list(self.rows[source].items()):
            self.set(target, j, target_row.get(j, 0) - factor * value)
            target_row = self.rows.get(target, {})

    def remove(self, i: int, j: int):
        for col in list(self.rows.get(i, {})):
            self.set(i, col, 0)
        for row in list(self.cols.get(j, ())):
            self.set(row, j, 0)

    def markowitz(self, i: int, j: int) -> int:
        return (len(self.rows[i]) - 1) * (len(self.cols[j]) - 1)


def _eliminate_pivot(state: _EliminationState, i: int, j: int) -> int:
    """Обнуляет строку и столбец ведущего элемента; при ненулевых остатках переходит к меньшему"""
    while True:
        pivot = state.rows[i][j]
        for row in sorted(state.cols[j] - {i}):
            state.add_row_multiple(row, i, state.rows[row][j] // pivot)
        leftovers = [(abs(state.rows[row][j]), row) for row in state.cols.get(j, ()) if row != i]
        if leftovers:
            i = min(leftovers)[1]
            continue
        # столбец j содержит только ведущий элемент, операции со столбцами меняют лишь строку i
        for col in sorted(set(state.rows[i]) - {j}):
            state.set(i, col, state.rows[i][col] - (state.rows[i][col] // pivot) * pivot)
        remainders = [(abs(v), col) for col, v in state.rows[i].items() if col != j]
        if remainders:
            j = min(remainders)[1]
            continue
        state.remove(i, j)
        return abs(pivot)


def smith_normal_form(m: SparseIntMatrix) -> SmithForm:
    """Нормальная форма Смита: сначала единичные ведущие элементы по столбцам, затем минимальные по модулю"""
    state = _EliminationState(m)
    diagonal: List[int] = []

    progress = True
    while progress:
        progress = False
        for j in sorted(state.cols, key=lambda c: len(state.cols[c])):
            if j not in state.cols:
                continue
            units = [row for row in state.cols[j] if abs(state.rows[row][j]) == 1]
            if not units:
                continue
            i = min(units, key=lambda row: (state.markowitz(row, j), row))
            diagonal.append(_eliminate_pivot(state, i, j))
            progress = True

    while state.cols:
        _, _, i, j = min(
            (abs(value), state.markowitz(i, j), i, j)
            for i, row in state.rows.items()
            for j, value in row.items()
        )
        diagonal.append(_eliminate_pivot(state, i, j))

    invariants = invariant_factors_of_diagonal(diagonal)
    logger.debug(f"SNF {m.rows}x{m.cols}: ранг {len(invariants)}")
    return SmithForm(invariants=invariants)


def rank_mod2(m: SparseIntMatrix) -> int:
    """Ранг приведения по модулю 2: исключение на упакованных битовых строках"""
    packed: Dict[int, int] = defaultdict(int)
    for (i, j), value in m.entries.items():
        if value & 1:
            packed[i] |= 1 << j
    pivots: Dict[int, int] = {}
    for row in packed.values():
        while row:
            lead = row.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = row
                break
            row ^= pivots[lead]
    return len(pivots)


def rank_rational(m: SparseIntMatrix) -> int:
    """Точный ранг над Q через безфракционное приведение sympy"""
    if not m.entries:
        return 0
    rows: Dict[int, Dict[int, object]] = defaultdict(dict)
    for (i, j), value in m.entries.items():
        rows[i][j] = ZZ(value)
    matrix = DomainMatrix(dict(rows), (m.rows, m.cols), ZZ)
    _, _, pivots = matrix.rref_den()
    return len(pivots)


def rational_matrix_rank(rows: Sequence[Sequence]) -> int:
    """Ранг матрицы с рациональными элементами (знаменатели очищаются построчно)"""
    entries = {}
    for i, row in enumerate(rows):
        denominator = 1
        for value in row:
            value_denominator = getattr(value, "denominator", 1)
            denominator = denominator * value_denominator // gcd(denominator, value_denominator)
        for j, value in enumerate(row):
            if value:
                entries[(i, j)] = int(value * denominator)
    cols = len(rows[0]) if rows else 0
    return rank_rational(SparseIntMatrix(len(rows), cols, entries))


@dataclass(frozen=True)
class ColumnReduction:
    """Результат стандартной редукции столбцов"""

    lows: Dict[int, int]
    reduced: Dict[int, Dict[int, int]]
    transforms: Dict[int, Dict[int, int]]
    zero_columns: Tuple[int, ...]


def _content(*vectors: Dict[int, int]) -> int:
    g = 0
    for vector in vectors:
        for value in vector.values():
            g = gcd(g, value)
    return g


def column_reduce(m: SparseIntMatrix, skip: Iterable[int] = (), track: bool = True) -> ColumnReduction:
    """Безфракционная редукция столбцов по нижнему элементу с сохранением преобразований

    Для каждого ненулевого приведённого столбца j: reduced[j] = m * transforms[j],
    нижние индексы приведённых столбцов попарно различны. Столбцы из skip считаются нулевыми
    и в zero_columns не попадают.
    """
    skipped = set(skip)
    columns = m.columns()
    lows: Dict[int, int] = {}
    reduced: Dict[int, Dict[int, int]] = {}
    transforms: Dict[int, Dict[int, int]] = {}
    zero_columns: List[int] = []

    for j, column in enumerate(columns):
        if j in skipped:
            continue
        column = dict(column)
        transform = {j: 1} if track else {}
        while column:
            low = max(column)
            owner = lows.get(low)
            if owner is None:
                break
            a = reduced[owner][low]
            b = column[low]
            column = _combine(column, a, reduced[owner], b)
            if track:
                transform = _combine(transform, a, transforms[owner], b)
            content = _content(column, transform)
            if content > 1:
                column = {i: v // content for i, v in column.items()}
                transform = {i: v // content for i, v in transform.items()}
        if column:
            lows[max(column)] = j
            reduced[j] = column
        else:
            zero_columns.append(j)
        if track:
            transforms[j] = transform

    return ColumnReduction(lows=lows, reduced=reduced, transforms=transforms, zero_columns=tuple(zero_columns))


def _combine(left: Dict[int, int], a: int, right: Dict[int, int], b: int) -> Dict[int, int]:
    """a * left - b * right без нулевых элементов"""
    result = {i: a * v for i, v in left.items()}
    for i, v in right.items():
        value = result.get(i, 0) - b * v
        if value:
            result[i] = value
        else:
            result.pop(i, None)
    return result
