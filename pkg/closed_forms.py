"""Гомологии квадрик Q_{p,q}^n и их двулистных накрытий X_{p,q}^n в замкнутом виде.

Все формулы записаны для нормализованной сигнатуры q >= p; квадрики Q_{p,q}^n и Q_{q,p}^n
гомеоморфны, поэтому результат не зависит от порядка p и q.
"""
import logging
from collections import Counter
from enum import Enum
from typing import Dict, Iterable

from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import (EmptyQuadric, Inconsistent, InvalidSignature, NotDegenerate, NotNonDegenerate,
                    ProjectiveSpaceReferral)
from graded import Coefficients, FgAbelianGroup, GradedHomology

logger = logging.getLogger(__name__)


class SignatureClass(str, Enum):
    DEGENERATE = "degenerate"
    NON_DEGENERATE = "non-degenerate"
    PROJECTIVE_SPACE = "projective-space"


class CaseTag(str, Enum):
    """Шесть случаев по (p, q, D), D = n - p - q, после нормализации q >= p"""
    PQbig_Dbig = "PQbig_Dbig"
    PQbig_D1 = "PQbig_D1"
    POne_Dbig = "POne_Dbig"
    POne_D1 = "POne_D1"
    PQ1_Dbig = "PQ1_Dbig"
    PQ1_D1 = "PQ1_D1"


class QuadricSignature(BaseModel):
    """Сигнатура (p, q) квадратичной формы от n переменных"""
    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=0)
    q: int = Field(ge=0)
    n: int = Field(ge=1)

    @model_validator(mode="after")
    def _enough_variables(self):
        if self.n < self.p + self.q:
            raise ValueError(f"n = {self.n} меньше p + q = {self.p + self.q}")
        return self

    @property
    def defect(self) -> int:
        return self.n - self.p - self.q

    @property
    def signature_class(self) -> SignatureClass:
        if self.p == 0 or self.q == 0:
            return SignatureClass.PROJECTIVE_SPACE
        if self.defect == 0:
            return SignatureClass.NON_DEGENERATE
        return SignatureClass.DEGENERATE

    def normalized(self) -> "QuadricSignature":
        if self.q >= self.p:
            return self
        return QuadricSignature(p=self.q, q=self.p, n=self.n)

    def label(self) -> str:
        return f"({self.p},{self.q},{self.n})"


def _reject_projective(sig: QuadricSignature):
    if sig.signature_class != SignatureClass.PROJECTIVE_SPACE:
        return
    if sig.defect == 0:
        raise EmptyQuadric(f"Q_{{{sig.p},{sig.q}}}^{sig.n} пуста: форма знакоопределена на R^{sig.n}")
    dimension = sig.defect - 1
    raise ProjectiveSpaceReferral(
        f"Q_{{{sig.p},{sig.q}}}^{sig.n} гомеоморфна RP^{dimension}; "
        f"используйте homology_real_projective_space({dimension})", dimension)


def require_degenerate(sig: QuadricSignature) -> QuadricSignature:
    """Проверка вырожденного случая; возвращает нормализованную сигнатуру"""
    _reject_projective(sig)
    if sig.signature_class != SignatureClass.DEGENERATE:
        raise NotDegenerate(f"Сигнатура {sig.label()} невырождена (n = p + q)")
    return sig.normalized()


def classify(sig: QuadricSignature) -> CaseTag:
    sig = require_degenerate(sig)
    if sig.p > 1:
        return CaseTag.PQbig_D1 if sig.defect == 1 else CaseTag.PQbig_Dbig
    if sig.q > 1:
        return CaseTag.POne_D1 if sig.defect == 1 else CaseTag.POne_Dbig
    return CaseTag.PQ1_D1 if sig.defect == 1 else CaseTag.PQ1_Dbig


def _from_degrees(degrees: Iterable[int], coeff: Coefficients) -> GradedHomology:
    return GradedHomology.from_ranks(dict(Counter(degrees)), coeff)


def homology_X(sig: QuadricSignature, coeff: Coefficients = Coefficients.INTEGER) -> GradedHomology:
    """Гомологии накрытия X_{p,q}^n = (S^{p-1} x S^{q-1}) * S^{n-p-q-1}; все группы свободны"""
    tag = classify(sig)
    p, q, n = sig.normalized().p, sig.normalized().q, sig.n
    if tag in (CaseTag.PQbig_Dbig, CaseTag.PQbig_D1):
        degrees = [0, n - q - 1, n - p - 1, n - 2]
    elif tag in (CaseTag.POne_Dbig, CaseTag.POne_D1):
        degrees = [0, n - q - 1, n - 2, n - 2]
    else:
        degrees = [0, n - 2, n - 2, n - 2]
    return _from_degrees(degrees, coeff)


def rational_homology_Q(sig: QuadricSignature) -> GradedHomology:
    """Инварианты антипода на H_*(X; Q)"""
    tag = classify(sig)
    p, q, n = sig.normalized().p, sig.normalized().q, sig.n
    degrees = [0]
    if tag in (CaseTag.PQbig_Dbig, CaseTag.PQbig_D1):
        if (n - q) % 2 == 0:
            degrees.append(n - q - 1)
        if (n - p) % 2 == 0:
            degrees.append(n - p - 1)
        # старшая образующая b_{p-1} (x) b_{q-1} (x) b_{D-1} меняет знак как (-1)^n
        if n % 2 == 0:
            degrees.append(n - 2)
    elif tag in (CaseTag.POne_Dbig, CaseTag.POne_D1):
        if (n - q) % 2 == 0:
            degrees.append(n - q - 1)
        degrees.append(n - 2)
    else:
        degrees += [n - 2] * (2 if (n - 1) % 2 == 0 else 1)
    return _from_degrees(degrees, Coefficients.RATIONAL)


def _sphere_mod2_ranks(k: int) -> Dict[int, int]:
    if k == 0:
        return {0: 2}
    return {0: 1, k: 1}


def mod2_homology_Q_nondegenerate(sig: QuadricSignature) -> GradedHomology:
    """H_*(S^{q-1}; Z/2) (x) H_*(RP^{p-1}; Z/2)"""
    _reject_projective(sig)
    if sig.signature_class != SignatureClass.NON_DEGENERATE:
        raise NotNonDegenerate(f"Сигнатура {sig.label()} вырождена (n > p + q)")
    sig = sig.normalized()
    ranks: Counter = Counter()
    for degree, rank in _sphere_mod2_ranks(sig.q - 1).items():
        for shift in range(sig.p):
            ranks[degree + shift] += rank
    return GradedHomology.from_ranks(dict(ranks), Coefficients.MOD2)


def mod2_homology_Q(sig: QuadricSignature) -> GradedHomology:
    """Z/2 в степенях 0..n-q-1 и n-p-1..n-2; на пересечении (p = q) ранги складываются"""
    _reject_projective(sig)
    if sig.signature_class == SignatureClass.NON_DEGENERATE:
        return mod2_homology_Q_nondegenerate(sig)
    classify(sig)
    p, q, n = sig.normalized().p, sig.normalized().q, sig.n
    degrees = list(range(0, n - q)) + list(range(n - p - 1, n - 1))
    return _from_degrees(degrees, Coefficients.MOD2)


def integer_homology_Q(sig: QuadricSignature) -> GradedHomology:
    """H_k = Z^{m_k} + (Z/2)^{l_k}: m_k = b_k(Q), l_k = b_k(Z/2) - m_k - l_{k-1}"""
    classify(sig)
    rational = rational_homology_Q(sig)
    mod2 = mod2_homology_Q(sig)
    groups = {}
    previous = 0
    # одна степень сверх размерности: там l обязано обратиться в ноль
    for k in range(sig.n):
        free = rational.rank(k)
        twos = mod2.rank(k) - free - previous
        if twos < 0:
            raise Inconsistent(f"{sig.label()}: в степени {k} получено l = {twos}")
        groups[k] = FgAbelianGroup(free_rank=free, torsion=(2,) * twos)
        previous = twos
    logger.debug(f"{sig.label()}: целочисленные гомологии {[g.render() for g in groups.values()]}")
    return GradedHomology(groups=groups)


def integer_homology_Q_even_case(sig: QuadricSignature) -> GradedHomology:
    """Таблица для q > p > 1, n > p + q + 1 и чётных p, q, n без рекурсии

    Z в степенях 0, n-q-1, n-p-1, n-2; Z/2 в нечётных степенях между 0 и n-q-1 и в чётных между n-p-1 и n-2.
    """
    sig = require_degenerate(sig)
    p, q, n = sig.p, sig.q, sig.n
    if not (q > p > 1 and sig.defect > 1 and p % 2 == 0 and q % 2 == 0 and n % 2 == 0):
        raise NotDegenerate(f"Сигнатура {sig.label()} вне чётного случая q > p > 1, n > p + q + 1")
    groups = {k: FgAbelianGroup.free(1) for k in (0, n - q - 1, n - p - 1, n - 2)}
    torsion_degrees = [k for k in range(1, n - q - 1) if k % 2] + [k for k in range(n - p, n - 2) if k % 2 == 0]
    for k in torsion_degrees:
        groups[k] = FgAbelianGroup(torsion=(2,))
    return GradedHomology(groups=groups)


def homology_real_projective_space(k: int, coeff: Coefficients = Coefficients.INTEGER) -> GradedHomology:
    """Гомологии RP^k: цель переадресации для случаев p = 0 или q = 0"""
    if k < 0:
        raise InvalidSignature(f"Размерность проективного пространства должна быть неотрицательной: {k}")
    if coeff == Coefficients.MOD2:
        return GradedHomology.from_ranks([1] * (k + 1), coeff)
    if coeff == Coefficients.RATIONAL:
        ranks = {0: 1}
        if k % 2:
            ranks[k] = 1
        return GradedHomology.from_ranks(ranks, coeff)
    groups = {0: FgAbelianGroup.free(1)}
    for i in range(1, k, 2):
        groups[i] = FgAbelianGroup(torsion=(2,))
    if k % 2:
        groups[k] = FgAbelianGroup.free(1)
    return GradedHomology(groups=groups)
