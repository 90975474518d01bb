"""Градуированные конечно порождённые абелевы группы: значения всех вычислений гомологий."""
import logging
from enum import Enum
from itertools import groupby
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import TorsionPresent
from exact_linalg import invariant_factors_of_diagonal

logger = logging.getLogger(__name__)


class Coefficients(str, Enum):
    INTEGER = "integer"
    RATIONAL = "rational"
    MOD2 = "mod2"

    @classmethod
    def from_flag(cls, flag: str) -> "Coefficients":
        """Разбор флагов командной строки z | q | z2"""
        flags = {"z": cls.INTEGER, "q": cls.RATIONAL, "z2": cls.MOD2}
        try:
            return flags[flag.lower()]
        except KeyError:
            raise ValueError(f"Неизвестные коэффициенты: {flag} (ожидается z, q или z2)")


_SYMBOLS = {
    Coefficients.INTEGER: ("Z", r"\mathbb{Z}"),
    Coefficients.RATIONAL: ("Q", r"\mathbb{Q}"),
    Coefficients.MOD2: ("Z/2", r"\mathbb{Z}/2"),
}


def _power(symbol: str, count: int, latex: bool = False) -> str:
    if count == 1:
        return symbol
    if "/" in symbol:
        symbol = f"({symbol})"
    return f"{symbol}^{{{count}}}" if latex else f"{symbol}^{count}"


class FgAbelianGroup(BaseModel):
    """Свободный ранг и инвариантные множители кручения d_1 | ... | d_t"""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    free_rank: int = Field(0, ge=0, alias="rank")
    torsion: Tuple[int, ...] = ()

    @field_validator("torsion", mode="before")
    @classmethod
    def _normalize_torsion(cls, value):
        values = list(value or ())
        for d in values:
            if int(d) < 1:
                raise ValueError(f"Порядок циклического слагаемого должен быть положительным: {d}")
        return tuple(d for d in invariant_factors_of_diagonal(values) if d > 1)

    @classmethod
    def zero(cls) -> "FgAbelianGroup":
        return cls(free_rank=0)

    @classmethod
    def free(cls, rank: int) -> "FgAbelianGroup":
        return cls(free_rank=rank)

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def _parts(self, coeff: Coefficients, latex: bool) -> List[str]:
        symbol = _SYMBOLS[coeff][1 if latex else 0]
        parts = [_power(symbol, self.free_rank, latex)] if self.free_rank else []
        for d, run in groupby(self.torsion):
            cyclic = rf"\mathbb{{Z}}/{d}" if latex else f"Z/{d}"
            parts.append(_power(cyclic, len(list(run)), latex))
        return parts

    def render(self, coeff: Coefficients = Coefficients.INTEGER) -> str:
        return " + ".join(self._parts(coeff, latex=False)) or "0"

    def render_latex(self, coeff: Coefficients = Coefficients.INTEGER) -> str:
        return r" \oplus ".join(self._parts(coeff, latex=True)) or "0"


class GradedHomology(BaseModel):
    """Гомологии по степеням с тегом коэффициентов; нулевые степени не хранятся"""
    model_config = ConfigDict(frozen=True)

    coeff: Coefficients = Coefficients.INTEGER
    groups: Dict[int, FgAbelianGroup] = Field(default_factory=dict)

    @field_validator("groups")
    @classmethod
    def _drop_zero_degrees(cls, groups: Dict[int, FgAbelianGroup]):
        for degree in groups:
            if degree < 0:
                raise ValueError(f"Отрицательная степень: {degree}")
        return {k: groups[k] for k in sorted(groups) if not groups[k].is_zero}

    @model_validator(mode="after")
    def _fields_have_no_torsion(self):
        if self.coeff != Coefficients.INTEGER:
            for degree, group in self.groups.items():
                if group.torsion:
                    raise ValueError(f"Кручение в степени {degree} при коэффициентах {self.coeff.value}")
        return self

    @classmethod
    def from_ranks(cls, ranks: Union[Mapping[int, int], Sequence[int]],
                   coeff: Coefficients = Coefficients.INTEGER) -> "GradedHomology":
        items = ranks.items() if isinstance(ranks, Mapping) else enumerate(ranks)
        return cls(coeff=coeff, groups={k: FgAbelianGroup.free(r) for k, r in items if r})

    def group(self, k: int) -> FgAbelianGroup:
        return self.groups.get(k, FgAbelianGroup.zero())

    def rank(self, k: int) -> int:
        return self.group(k).free_rank

    @property
    def top_degree(self) -> int:
        return max(self.groups, default=-1)

    @property
    def is_free(self) -> bool:
        return all(group.is_free for group in self.groups.values())

    def betti_numbers(self, length: Optional[int] = None) -> List[int]:
        if length is None:
            length = self.top_degree + 1
        return [self.rank(k) for k in range(length)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * group.free_rank for k, group in self.groups.items())

    def change_coefficients(self, target: Coefficients) -> "GradedHomology":
        """Формула универсальных коэффициентов для целочисленных гомологий"""
        if self.coeff != Coefficients.INTEGER:
            if target == self.coeff:
                return self
            raise ValueError(f"Смена коэффициентов возможна только из целочисленных, а не из {self.coeff.value}")
        if target == Coefficients.INTEGER:
            return self
        if target == Coefficients.RATIONAL:
            return GradedHomology.from_ranks({k: g.free_rank for k, g in self.groups.items()}, target)
        even = {k: sum(1 for d in g.torsion if d % 2 == 0) for k, g in self.groups.items()}
        ranks = {k: self.rank(k) + even.get(k, 0) + even.get(k - 1, 0)
                 for k in range(self.top_degree + 2)}
        return GradedHomology.from_ranks(ranks, target)

    def to_json(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)

    @classmethod
    def from_json(cls, data: dict) -> "GradedHomology":
        return cls.model_validate(data)


class PointedGradedHomology(BaseModel):
    """Целочисленные гомологии вместе с числом компонент связности"""
    model_config = ConfigDict(frozen=True)

    homology: GradedHomology
    component_count: int = Field(ge=1)

    @model_validator(mode="after")
    def _degree_zero_counts_components(self):
        if self.homology.coeff != Coefficients.INTEGER:
            raise ValueError("Отмеченные гомологии задаются над Z")
        if self.homology.group(0) != FgAbelianGroup.free(self.component_count):
            raise ValueError(
                f"H_0 = {self.homology.group(0).render()} не согласуется с числом компонент {self.component_count}")
        return self

    @classmethod
    def connected(cls, homology: GradedHomology) -> "PointedGradedHomology":
        return cls(homology=homology, component_count=1)


def _require_free(*graded: GradedHomology):
    for h in graded:
        for degree, group in h.groups.items():
            if group.torsion:
                raise TorsionPresent(f"Кручение {group.render()} в степени {degree}: формула Кюннета без Tor неприменима")


def tensor_degree(h1: GradedHomology, h2: GradedHomology, k: int) -> FgAbelianGroup:
    """Степень k тензорного произведения свободных градуированных групп"""
    _require_free(h1, h2)
    return FgAbelianGroup.free(sum(r * h2.rank(k - i) for i, r in
                                   ((i, g.free_rank) for i, g in h1.groups.items()) if i <= k))


def augmentation_kernel(h: PointedGradedHomology) -> GradedHomology:
    """Ядро отображения в конус: приведённая H_0 и все положительные степени"""
    groups = dict(h.homology.groups)
    groups[0] = FgAbelianGroup.free(h.component_count - 1)
    return GradedHomology(coeff=h.homology.coeff, groups=groups)
