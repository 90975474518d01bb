"""Гомологии джойна и индуцированные отображения на уровне градуированных групп.

Базисы в степени k произведения и джойна упорядочены по возрастанию степени первого
сомножителя, внутри них в кронекеровом порядке. Нулевая степень отмеченных гомологий
задана базисом из классов компонент связности.
"""
import logging
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from errors import KernelNotPreserved, NotInvolution, TorsionPresent
from exact_linalg import rational_matrix_rank
from graded import (Coefficients, FgAbelianGroup, GradedHomology, PointedGradedHomology,
                    augmentation_kernel, tensor_degree)

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[Fraction, ...], ...]


class GradedMap(BaseModel):
    """Отображение свободных градуированных групп, заданное матрицами по степеням"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source: GradedHomology
    target: GradedHomology
    blocks: Dict[int, Matrix]

    @field_validator("blocks", mode="before")
    @classmethod
    def _exact_entries(cls, blocks):
        return {int(k): tuple(tuple(Fraction(v) for v in row) for row in matrix)
                for k, matrix in dict(blocks).items()}

    @model_validator(mode="after")
    def _check_shapes(self):
        if not (self.source.is_free and self.target.is_free):
            raise TorsionPresent("Градуированное отображение определено только между свободными группами")
        degrees = set(self.source.groups) | set(self.target.groups) | set(self.blocks)
        for k in degrees:
            rows, cols = self.target.rank(k), self.source.rank(k)
            block = self.blocks.get(k)
            if block is None:
                if rows and cols:
                    raise ValueError(f"Нет матрицы в степени {k}")
                continue
            if len(block) != rows or any(len(row) != cols for row in block):
                raise ValueError(f"Матрица в степени {k} должна иметь размер {rows}x{cols}")
        return self

    def block(self, k: int) -> Matrix:
        if k in self.blocks:
            return self.blocks[k]
        return _zeros(self.target.rank(k), self.source.rank(k))

    def to_json_blocks(self) -> List[dict]:
        return [{"degree": k, "matrix": [[_render_entry(v) for v in row] for row in matrix]}
                for k, matrix in sorted(self.blocks.items())]

    @classmethod
    def from_json_blocks(cls, source: GradedHomology, target: GradedHomology,
                         data: Sequence[dict]) -> "GradedMap":
        return cls(source=source, target=target, blocks={item["degree"]: item["matrix"] for item in data})


def _render_entry(value: Fraction):
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _zeros(rows: int, cols: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))


def _identity(size: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(size)) for i in range(size))


def _multiply(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(sum((a[i][l] * b[l][j] for l in range(len(b))), Fraction(0))
                       for j in range(len(b[0]) if b else 0)) for i in range(len(a)))


def _kronecker(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x * y for x in row_a for y in row_b) for row_a in a for row_b in b)


def _direct_sum(parts: Sequence[Matrix]) -> Matrix:
    width = sum(len(part[0]) if part else 0 for part in parts)
    rows: List[Tuple[Fraction, ...]] = []
    offset = 0
    for part in parts:
        cols = len(part[0]) if part else 0
        for row in part:
            rows.append((Fraction(0),) * offset + tuple(row) + (Fraction(0),) * (width - offset - cols))
        offset += cols
    return tuple(rows)


def identity_map(h: GradedHomology) -> GradedMap:
    return GradedMap(source=h, target=h, blocks={k: _identity(g.free_rank) for k, g in h.groups.items()})


def _tensor_graded(h1: GradedHomology, h2: GradedHomology) -> GradedHomology:
    top = h1.top_degree + h2.top_degree
    return GradedHomology(coeff=h1.coeff, groups={k: tensor_degree(h1, h2, k) for k in range(top + 1)})


def product_homology(x: PointedGradedHomology, y: PointedGradedHomology) -> PointedGradedHomology:
    """Формула Кюннета для свободных гомологий произведения"""
    return PointedGradedHomology(homology=_tensor_graded(x.homology, y.homology),
                                 component_count=x.component_count * y.component_count)


def product_map(f: GradedMap, g: GradedMap) -> GradedMap:
    """Отображение f x g на гомологиях произведения"""
    source = _tensor_graded(f.source, g.source)
    target = _tensor_graded(f.target, g.target)
    blocks = {}
    for k in source.groups:
        parts = [_kronecker(f.block(i), g.block(k - i)) for i in range(k + 1)
                 if f.source.rank(i) and g.source.rank(k - i)]
        blocks[k] = _direct_sum(parts)
    return GradedMap(source=source, target=target, blocks=blocks)


def antipode_action(k: int) -> Tuple[PointedGradedHomology, GradedMap]:
    """Гомологии S^k и действие антипода: степень антипода равна (-1)^(k+1)"""
    if k < 0:
        raise ValueError(f"Размерность сферы должна быть неотрицательной: {k}")
    if k == 0:
        h = GradedHomology.from_ranks({0: 2})
        return PointedGradedHomology(homology=h, component_count=2), GradedMap(
            source=h, target=h, blocks={0: ((0, 1), (1, 0))})
    h = GradedHomology.from_ranks({0: 1, k: 1})
    return PointedGradedHomology.connected(h), GradedMap(
        source=h, target=h, blocks={0: ((1,),), k: (((-1) ** (k + 1),),)})


def cover_join_factors(p: int, q: int, n: int) -> Tuple[PointedGradedHomology, PointedGradedHomology, GradedMap, GradedMap]:
    """Данные двулистного накрытия (S^{p-1} x S^{q-1}) * S^{n-p-q-1} с антиподальными действиями"""
    if p < 1 or q < 1 or n <= p + q:
        raise ValueError(f"Разложение в джойн требует p, q >= 1 и n > p + q, получено ({p}, {q}, {n})")
    first, first_action = antipode_action(p - 1)
    second, second_action = antipode_action(q - 1)
    y, g = antipode_action(n - p - q - 1)
    return product_homology(first, second), y, product_map(first_action, second_action), g


def join_homology(x: PointedGradedHomology, y: PointedGradedHomology) -> GradedHomology:
    """H_n(X * Y) = (Ker i_X (x) Ker i_Y)_{n-1} при n >= 1, H_0 = Z"""
    kernel_x = augmentation_kernel(x)
    kernel_y = augmentation_kernel(y)
    groups = {0: FgAbelianGroup.free(1)}
    for n in range(1, kernel_x.top_degree + kernel_y.top_degree + 2):
        groups[n] = tensor_degree(kernel_x, kernel_y, n - 1)
    return GradedHomology(groups=groups)


def _kernel_blocks(f: GradedMap, x: PointedGradedHomology) -> Dict[int, Matrix]:
    """Матрицы f, ограниченного на ядро аугментации (базис e_i - e_{i+1} в степени 0)"""
    if f.source != x.homology or f.target != x.homology:
        raise ValueError("Отображение должно действовать на гомологиях данного пространства")
    blocks = {k: f.block(k) for k in x.homology.groups if k > 0}
    c = x.component_count
    if c == 1:
        return blocks
    degree_zero = f.block(0)
    column_sums = {sum(degree_zero[i][j] for i in range(c)) for j in range(c)}
    if len(column_sums) != 1:
        raise KernelNotPreserved(f"Суммы столбцов в степени 0 различны: {sorted(column_sums)}")
    restricted = [[Fraction(0)] * (c - 1) for _ in range(c - 1)]
    for j in range(c - 1):
        image = [degree_zero[i][j] - degree_zero[i][j + 1] for i in range(c)]
        partial = Fraction(0)
        for m in range(c - 1):
            partial += image[m]
            restricted[m][j] = partial
    blocks[0] = tuple(tuple(row) for row in restricted)
    return blocks


def join_induced_map(f: GradedMap, g: GradedMap, x: PointedGradedHomology,
                     y: PointedGradedHomology) -> GradedMap:
    """(f * g)_* = f_* (x) g_* на Ker i_X (x) Ker i_Y со сдвигом степени на единицу"""
    kernel_x, kernel_y = augmentation_kernel(x), augmentation_kernel(y)
    restricted_f, restricted_g = _kernel_blocks(f, x), _kernel_blocks(g, y)
    homology = join_homology(x, y)
    blocks = {0: ((1,),)}
    for degree in homology.groups:
        if degree == 0:
            continue
        total = degree - 1
        parts = [_kronecker(restricted_f[i], restricted_g[total - i]) for i in range(total + 1)
                 if kernel_x.rank(i) and kernel_y.rank(total - i)]
        blocks[degree] = _direct_sum(parts)
    return GradedMap(source=homology, target=homology, blocks=blocks)


def invariant_subgroup(m: GradedMap) -> GradedHomology:
    """Размерности неподвижных подпространств инволюции по степеням (над Q)"""
    if m.source != m.target:
        raise NotInvolution("Инволюция должна быть отображением группы в себя")
    ranks = {}
    for k, group in m.source.groups.items():
        block = m.block(k)
        size = group.free_rank
        if _multiply(block, block) != _identity(size):
            raise NotInvolution(f"Квадрат матрицы в степени {k} не равен единичной")
        shifted = [[block[i][j] - (1 if i == j else 0) for j in range(size)] for i in range(size)]
        ranks[k] = size - rational_matrix_rank(shifted)
        logger.debug(f"Степень {k}: неподвижная размерность {ranks[k]} из {size}")
    return GradedHomology.from_ranks(ranks, Coefficients.RATIONAL)
