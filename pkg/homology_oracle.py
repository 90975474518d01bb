"""Симплициальные гомологии из первых принципов: сборка X_{p,q}^n, Q_{p,q}^n и индуцированные отображения."""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, model_validator

from closed_forms import QuadricSignature, SignatureClass
from errors import EmptyQuadric, OracleInfeasible, RegularityUnreachable
from exact_linalg import SparseIntMatrix, column_reduce, rank_mod2, rank_rational, smith_normal_form
from graded import Coefficients, FgAbelianGroup, GradedHomology
from join_theory import GradedMap, invariant_subgroup
from simplicial import (Simplex, SimplicialComplex, SimplicialMap, barycentric_subdivide, induced_involution,
                        is_regular, join, product, quotient_by_involution, sphere, subdivision_face_count)

load_dotenv()

ORACLE_FACE_CAP = int(os.getenv("QUADRIC_ORACLE_FACE_CAP", "5000000"))  # предел числа граней построения
ORACLE_WORKERS = int(os.getenv("QUADRIC_ORACLE_WORKERS", "1"))  # процессы для граничных матриц
MAX_SUBDIVISIONS = 2

logger = logging.getLogger(__name__)


class ChainComplexZ:
    """Симплициальный цепной комплекс над Z с ориентацией по глобальному порядку вершин"""

    def __init__(self, bases: Sequence[Tuple[Simplex, ...]], boundaries: Dict[int, SparseIntMatrix]):
        self.bases = tuple(bases)
        self.boundaries = boundaries

    @property
    def dimension(self) -> int:
        return len(self.bases) - 1

    def rank(self, k: int) -> int:
        return len(self.bases[k]) if 0 <= k <= self.dimension else 0

    def boundary(self, k: int) -> SparseIntMatrix:
        if k in self.boundaries:
            return self.boundaries[k]
        return SparseIntMatrix(self.rank(k - 1), self.rank(k))

    def check_boundary_squares(self):
        """Проверка тождества d_{k-1} d_k = 0"""
        for k in range(2, self.dimension + 1):
            lower = self.boundary(k - 1).columns()
            for j, column in enumerate(self.boundary(k).columns()):
                total: Dict[int, int] = {}
                for face, sign in column.items():
                    for row, value in lower[face].items():
                        total[row] = total.get(row, 0) + sign * value
                if any(total.values()):
                    raise ValueError(f"d_{k - 1} d_{k} != 0 на симплексе {self.bases[k][j]}")


def chain_complex(c: SimplicialComplex) -> ChainComplexZ:
    bases = [c.simplices(k) for k in range(c.dimension + 1)]
    boundaries = {}
    for k in range(1, c.dimension + 1):
        face_index = {face: i for i, face in enumerate(bases[k - 1])}
        columns = [{face_index[simplex[:i] + simplex[i + 1:]]: (-1) ** i for i in range(k + 1)}
                   for simplex in bases[k]]
        boundaries[k] = SparseIntMatrix.from_columns(len(bases[k - 1]), columns)
    return ChainComplexZ(bases, boundaries)


class OracleResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    homology: GradedHomology
    f_vector: Tuple[int, ...]
    build_trace: Tuple[str, ...]

    @model_validator(mode="after")
    def _euler_characteristics_agree(self):
        chi = sum((-1) ** k * f for k, f in enumerate(self.f_vector))
        if chi != self.homology.euler_characteristic():
            raise ValueError(f"Эйлерова характеристика по f-вектору {chi} != "
                             f"{self.homology.euler_characteristic()} по гомологиям")
        return self


def _map_reductions(function: Callable, matrices: List[SparseIntMatrix], workers: int) -> list:
    if workers > 1 and len(matrices) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(function, matrices))
    return [function(matrix) for matrix in matrices]


def homology_of_complex(c: SimplicialComplex, coeff: Coefficients = Coefficients.INTEGER,
                        workers: Optional[int] = None) -> OracleResult:
    """H_k = Z^{n_k - r_k - r_{k+1}} + кручение d_{k+1}; над Q и Z/2 только ранги"""
    if workers is None:
        workers = ORACLE_WORKERS
    chain = chain_complex(c)
    matrices = [chain.boundary(k) for k in range(1, chain.dimension + 1)]
    ranks = {0: 0, chain.dimension + 1: 0}
    torsion: Dict[int, Tuple[int, ...]] = {}
    if coeff == Coefficients.INTEGER:
        for k, form in enumerate(_map_reductions(smith_normal_form, matrices, workers), start=1):
            ranks[k] = form.rank
            torsion[k - 1] = form.torsion
    else:
        # над полем только ранги
        rank = rank_mod2 if coeff == Coefficients.MOD2 else rank_rational
        for k, value in enumerate(_map_reductions(rank, matrices, workers), start=1):
            ranks[k] = value
    groups = {}
    for k in range(chain.dimension + 1):
        groups[k] = FgAbelianGroup(free_rank=chain.rank(k) - ranks[k] - ranks[k + 1], torsion=torsion.get(k, ()))
        logger.debug(f"{c.trace}: степень {k}, n_k = {chain.rank(k)}, r_k = {ranks[k]}")
    return OracleResult(homology=GradedHomology(coeff=coeff, groups=groups), f_vector=c.f_vector,
                        build_trace=(c.trace,))


def _check_cap(c: SimplicialComplex, faces: int, face_cap: int, what: str):
    if faces > face_cap:
        raise OracleInfeasible(f"{what} {c.trace}: {faces} граней превышает предел {face_cap} "
                               f"(QUADRIC_ORACLE_FACE_CAP или --face-cap)", faces, face_cap)


def build_X(sig: QuadricSignature, face_cap: Optional[int] = None) -> Tuple[SimplicialComplex, SimplicialMap]:
    """(S^{p-1} x S^{q-1}) * S^{n-p-q-1} на кросс-политопах вместе с антиподом"""
    if face_cap is None:
        face_cap = ORACLE_FACE_CAP
    if sig.signature_class == SignatureClass.PROJECTIVE_SPACE:
        if sig.defect == 0:
            raise EmptyQuadric(f"Квадрика {sig.label()} пуста, накрытие не строится")
        cover = sphere(sig.defect - 1)
    else:
        cover = product(sphere(sig.p - 1), sphere(sig.q - 1))
        if sig.defect > 0:
            cover = join(cover, sphere(sig.defect - 1))
    _check_cap(cover, cover.face_count, face_cap, "Накрытие")
    involution = induced_involution(cover)
    logger.info(f"Накрытие {sig.label()}: {cover.trace}, f = {cover.f_vector}")
    return cover, involution


def build_Q(sig: QuadricSignature, face_cap: Optional[int] = None) -> SimplicialComplex:
    """Фактор накрытия по антиподу после минимального числа подразделений"""
    if face_cap is None:
        face_cap = ORACLE_FACE_CAP
    cover, involution = build_X(sig, face_cap)
    subdivisions = 0
    while not is_regular(cover, involution):
        if subdivisions == MAX_SUBDIVISIONS:
            raise RegularityUnreachable(f"{sig.label()}: действие не регулярно после {subdivisions} подразделений")
        _check_cap(cover, subdivision_face_count(cover), face_cap, "Подразделение")
        cover = barycentric_subdivide(cover)
        involution = induced_involution(cover)
        subdivisions += 1
        logger.info(f"{sig.label()}: подразделение {subdivisions}, f = {cover.f_vector}")
    quotient = quotient_by_involution(cover, involution,
                                      trace=f"quotient({cover.trace}) [subdivisions={subdivisions}]")
    logger.info(f"Квадрика {sig.label()}: регулярность после {subdivisions} подразделений")
    return quotient


def chain_map_image(t: SimplicialMap, simplex: Simplex) -> Optional[Tuple[int, Simplex]]:
    """Знак и образ ориентированного симплекса; None, если образ вырожден"""
    mapped = [t.indices[v] for v in simplex]
    if len(set(mapped)) < len(mapped):
        return None
    inversions = sum(1 for i in range(len(mapped)) for j in range(i + 1, len(mapped)) if mapped[i] > mapped[j])
    return (-1) ** inversions, tuple(sorted(mapped))


def _coordinates(vector: Dict[int, Fraction], table: Dict[int, Tuple[Dict[int, int], Optional[int]]],
                 size: int) -> List[Fraction]:
    """Разложение цикла по эшелонированному базису границ и выбранных циклов"""
    coordinates = [Fraction(0)] * size
    vector = dict(vector)
    while vector:
        low = max(vector)
        if low not in table:
            raise ValueError("Образ цикла не является циклом: отображение не цепное")
        pivot, generator = table[low]
        factor = Fraction(vector[low], pivot[low])
        for i, value in pivot.items():
            updated = vector.get(i, 0) - factor * value
            if updated:
                vector[i] = updated
            else:
                vector.pop(i, None)
        if generator is not None:
            coordinates[generator] += factor
    return coordinates


def induced_map_on_homology(c: SimplicialComplex, t: SimplicialMap,
                            coeff: Coefficients = Coefficients.RATIONAL) -> GradedMap:
    """Матрицы t_* на H_k(c; Q) в базисе существенных циклов стандартной редукции"""
    if coeff != Coefficients.RATIONAL:
        raise ValueError("Индуцированное отображение вычисляется только над Q")
    if t.domain != c or t.codomain != c:
        raise ValueError("Ожидается симплициальное отображение комплекса в себя")
    chain = chain_complex(c)
    ranks: Dict[int, int] = {}
    blocks: Dict[int, List[List[Fraction]]] = {}
    upper = None
    # сверху вниз: нижние индексы d_{k+1} отмечают парные k-симплексы, их столбцы пропускаются
    for k in range(chain.dimension, -1, -1):
        paired = set(upper.lows) if upper else set()
        if k >= 1:
            reduction = column_reduce(chain.boundary(k), skip=paired, track=True)
            cycles = {j: reduction.transforms[j] for j in reduction.zero_columns}
        else:
            reduction = None
            cycles = {j: {j: 1} for j in range(chain.rank(0)) if j not in paired}
        essential = sorted(cycles)
        table: Dict[int, Tuple[Dict[int, int], Optional[int]]] = {}
        if upper:
            for low, column in upper.lows.items():
                table[low] = (upper.reduced[column], None)
        for generator, j in enumerate(essential):
            table[j] = (cycles[j], generator)

        index = {simplex: i for i, simplex in enumerate(chain.bases[k])}
        matrix = [[Fraction(0)] * len(essential) for _ in essential]
        for column, j in enumerate(essential):
            image: Dict[int, Fraction] = {}
            for position, value in cycles[j].items():
                mapped = chain_map_image(t, chain.bases[k][position])
                if mapped is None:
                    continue
                sign, simplex = mapped
                target = index[simplex]
                image[target] = image.get(target, 0) + sign * value
            image = {i: v for i, v in image.items() if v}
            for row, value in enumerate(_coordinates(image, table, len(essential))):
                matrix[row][column] = value
        ranks[k] = len(essential)
        if essential:
            blocks[k] = matrix
        logger.debug(f"{c.trace}: H_{k} размерности {len(essential)}")
        upper = reduction
    homology = GradedHomology.from_ranks(ranks, Coefficients.RATIONAL)
    return GradedMap(source=homology, target=homology, blocks=blocks)


def rational_Q_via_invariants(sig: QuadricSignature, face_cap: Optional[int] = None) -> GradedHomology:
    """H_*(Q; Q) как инварианты антипода на H_*(X; Q), без фактор-комплекса"""
    cover, involution = build_X(sig, face_cap)
    return invariant_subgroup(induced_map_on_homology(cover, involution))


def export_complex(c: SimplicialComplex, path: str):
    """Запись комплекса в формате списка граней"""
    with open(path, "w", encoding="utf-8") as f:
        f.write(c.to_facet_list())
    logger.info(f"Комплекс {c.trace} записан в {path}")
