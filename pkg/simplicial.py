"""Абстрактные симплициальные комплексы и конструкции для моделей X_{p,q}^n и Q_{p,q}^n."""
import json
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from itertools import combinations, permutations, product as cartesian
from math import comb
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from errors import NotFree, NotInvolution, NotRegular, NotSimplicial, UnsupportedModel

logger = logging.getLogger(__name__)

Simplex = Tuple[int, ...]


class SphereModel(str, Enum):
    SIMPLEX_BOUNDARY = "simplex-boundary"
    CROSS_POLYTOPE = "cross-polytope"


# Метки вершин: структурированные, чтобы антипод переносился по построению

@dataclass(frozen=True)
class PointVertex:
    index: int


@dataclass(frozen=True)
class SphereVertex:
    """Вершина +e_axis или -e_axis кросс-политопа"""
    axis: int
    sign: int


@dataclass(frozen=True)
class BoundaryVertex:
    index: int


@dataclass(frozen=True)
class PairVertex:
    left: Hashable
    right: Hashable


@dataclass(frozen=True)
class JoinVertex:
    side: str
    label: Hashable


@dataclass(frozen=True)
class ChainVertex:
    """Барицентр симплекса исходного комплекса"""
    simplex: FrozenSet[Hashable]


@dataclass(frozen=True)
class OrbitVertex:
    members: FrozenSet[Hashable]


def encode_label(label) -> list:
    """Каноническая сериализация метки в список с тегом"""
    if isinstance(label, PointVertex):
        return ["V", label.index]
    if isinstance(label, SphereVertex):
        return ["S", label.axis, label.sign]
    if isinstance(label, BoundaryVertex):
        return ["B", label.index]
    if isinstance(label, PairVertex):
        return ["P", encode_label(label.left), encode_label(label.right)]
    if isinstance(label, JoinVertex):
        return ["J", label.side, encode_label(label.label)]
    if isinstance(label, (ChainVertex, OrbitVertex)):
        members = label.simplex if isinstance(label, ChainVertex) else label.members
        tag = "C" if isinstance(label, ChainVertex) else "O"
        return [tag, sorted((encode_label(m) for m in members), key=json.dumps)]
    raise ValueError(f"Неизвестный тип метки: {label!r}")


def decode_label(data: list):
    tag = data[0]
    if tag == "V":
        return PointVertex(data[1])
    if tag == "S":
        return SphereVertex(data[1], data[2])
    if tag == "B":
        return BoundaryVertex(data[1])
    if tag == "P":
        return PairVertex(decode_label(data[1]), decode_label(data[2]))
    if tag == "J":
        return JoinVertex(data[1], decode_label(data[2]))
    if tag == "C":
        return ChainVertex(frozenset(decode_label(m) for m in data[1]))
    if tag == "O":
        return OrbitVertex(frozenset(decode_label(m) for m in data[1]))
    raise ValueError(f"Неизвестный тег метки: {tag}")


class SimplicialComplex:
    """Комплекс, заданный упорядоченными вершинами и максимальными гранями

    Порядок вершин глобальный: по нему ориентируются симплексы и строятся произведения.
    """

    def __init__(self, facets: Iterable[Sequence[Hashable]], vertices: Optional[Sequence[Hashable]] = None,
                 trace: str = "complex"):
        facet_list = [tuple(facet) for facet in facets]
        if vertices is None:
            seen: Dict[Hashable, None] = {}
            for facet in facet_list:
                for label in facet:
                    seen.setdefault(label, None)
            vertices = list(seen)
        self.vertices: Tuple[Hashable, ...] = tuple(vertices)
        self.trace = trace
        self._index = {label: i for i, label in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise ValueError("Повторяющиеся метки вершин")

        indexed: Set[Simplex] = set()
        for facet in facet_list:
            if not facet:
                raise ValueError("Пустая грань")
            try:
                indexed.add(tuple(sorted({self._index[label] for label in facet})))
            except KeyError as e:
                raise ValueError(f"Вершина {e} грани отсутствует в списке вершин")
        self.facets: Tuple[Simplex, ...] = tuple(sorted(_maximal(indexed)))

        used = {v for facet in self.facets for v in facet}
        if len(used) != len(self.vertices):
            raise ValueError(f"{len(self.vertices) - len(used)} вершин не лежат ни в одной грани")

    def index_of(self, label: Hashable) -> int:
        return self._index[label]

    def facet_labels(self) -> List[Tuple[Hashable, ...]]:
        return [tuple(self.vertices[v] for v in facet) for facet in self.facets]

    @property
    def dimension(self) -> int:
        return max(len(facet) for facet in self.facets) - 1

    @cached_property
    def _simplices(self) -> Tuple[Tuple[Simplex, ...], ...]:
        by_dimension: List[Set[Simplex]] = [set() for _ in range(self.dimension + 1)]
        for facet in self.facets:
            for size in range(1, len(facet) + 1):
                by_dimension[size - 1].update(combinations(facet, size))
        return tuple(tuple(sorted(simplices)) for simplices in by_dimension)

    def simplices(self, k: int) -> Tuple[Simplex, ...]:
        """Симплексы размерности k в лексикографическом порядке индексов вершин"""
        if 0 <= k <= self.dimension:
            return self._simplices[k]
        return ()

    @cached_property
    def simplex_set(self) -> FrozenSet[Simplex]:
        return frozenset(s for layer in self._simplices for s in layer)

    @property
    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(layer) for layer in self._simplices)

    @property
    def face_count(self) -> int:
        return sum(self.f_vector)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * f for k, f in enumerate(self.f_vector))

    def to_facet_list(self) -> str:
        """Экспорт: строка с вершинами, затем по грани в строке (JSON-массивы меток)"""
        lines = ["# vertices " + json.dumps([encode_label(v) for v in self.vertices])]
        for facet in self.facet_labels():
            lines.append(json.dumps([encode_label(label) for label in facet]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_facet_list(cls, text: str, trace: str = "imported") -> "SimplicialComplex":
        vertices = None
        facets = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("# vertices "):
                vertices = [decode_label(item) for item in json.loads(line[len("# vertices "):])]
            elif not line.startswith("#"):
                facets.append([decode_label(item) for item in json.loads(line)])
        return cls(facets, vertices, trace)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.vertices == other.vertices and self.facets == other.facets

    def __hash__(self) -> int:
        return hash((self.vertices, self.facets))

    def __repr__(self) -> str:
        return f"SimplicialComplex({self.trace}, f={self.f_vector})"


def _maximal(simplices: Set[Simplex]) -> List[Simplex]:
    sizes = {len(s) for s in simplices}
    if len(sizes) <= 1:
        return list(simplices)
    kept: List[Simplex] = []
    by_vertex: Dict[int, List[FrozenSet[int]]] = {}
    for simplex in sorted(simplices, key=len, reverse=True):
        as_set = frozenset(simplex)
        if any(as_set <= other for other in by_vertex.get(simplex[0], ())):
            continue
        kept.append(simplex)
        for v in simplex:
            by_vertex.setdefault(v, []).append(as_set)
    return kept


class SimplicialMap:
    """Симплициальное отображение, заданное на вершинах"""

    def __init__(self, domain: SimplicialComplex, codomain: SimplicialComplex,
                 vertex_map: Mapping[Hashable, Hashable]):
        self.domain = domain
        self.codomain = codomain
        try:
            self.indices: Tuple[int, ...] = tuple(codomain.index_of(vertex_map[v]) for v in domain.vertices)
        except KeyError as e:
            raise NotSimplicial(f"Вершина {e} не отображается или её образ вне комплекса")
        for facet in domain.facets:
            image = tuple(sorted({self.indices[v] for v in facet}))
            if image not in codomain.simplex_set:
                raise NotSimplicial(f"Образ грани {facet} не является симплексом")

    def image_label(self, label: Hashable) -> Hashable:
        return self.codomain.vertices[self.indices[self.domain.index_of(label)]]

    @classmethod
    def identity(cls, c: SimplicialComplex) -> "SimplicialMap":
        return cls(c, c, {v: v for v in c.vertices})

    def compose(self, other: "SimplicialMap") -> "SimplicialMap":
        """self после other"""
        return SimplicialMap(other.domain, self.codomain,
                             {v: self.image_label(other.image_label(v)) for v in other.domain.vertices})

    def is_identity(self) -> bool:
        return self.domain == self.codomain and all(i == v for v, i in enumerate(self.indices))


def point() -> SimplicialComplex:
    return SimplicialComplex([[PointVertex(0)]], trace="point")


def discrete(count: int) -> SimplicialComplex:
    return SimplicialComplex([[PointVertex(i)] for i in range(count)], trace=f"discrete({count})")


def path(length: int) -> SimplicialComplex:
    """Путь из length рёбер"""
    if length < 1:
        return point()
    return SimplicialComplex([[PointVertex(i), PointVertex(i + 1)] for i in range(length)],
                             [PointVertex(i) for i in range(length + 1)], trace=f"path({length})")


def cycle(length: int) -> SimplicialComplex:
    """Граница length-угольника"""
    return SimplicialComplex([[PointVertex(i), PointVertex((i + 1) % length)] for i in range(length)],
                             [PointVertex(i) for i in range(length)], trace=f"cycle({length})")


def sphere(k: int, model: SphereModel = SphereModel.CROSS_POLYTOPE) -> SimplicialComplex:
    if k < 0:
        raise ValueError(f"Размерность сферы должна быть неотрицательной: {k}")
    trace = f"sphere({k}, {model.value})"
    if model == SphereModel.SIMPLEX_BOUNDARY:
        vertices = [BoundaryVertex(i) for i in range(k + 2)]
        return SimplicialComplex(combinations(vertices, k + 1), vertices, trace)
    # вершины +e_i, -e_i идут парами, поэтому антипод сохраняет порядок внутри грани
    vertices = [SphereVertex(axis, sign) for axis in range(k + 1) for sign in (1, -1)]
    facets = ([SphereVertex(axis, sign) for axis, sign in enumerate(signs)]
              for signs in cartesian((1, -1), repeat=k + 1))
    return SimplicialComplex(facets, vertices, trace)


def _staircases(s: int, t: int):
    """Монотонные пути из (0, 0) в (s, t)"""
    for rights in combinations(range(s + t), s):
        i = j = 0
        path = [(0, 0)]
        right_steps = set(rights)
        for step in range(s + t):
            if step in right_steps:
                i += 1
            else:
                j += 1
            path.append((i, j))
        yield path


def product(a: SimplicialComplex, b: SimplicialComplex, a_order: Optional[Sequence[Hashable]] = None,
            b_order: Optional[Sequence[Hashable]] = None) -> SimplicialComplex:
    """Лестничная триангуляция |a| x |b| при заданных порядках вершин"""
    a_order = list(a_order or a.vertices)
    b_order = list(b_order or b.vertices)
    a_rank = {label: i for i, label in enumerate(a_order)}
    b_rank = {label: i for i, label in enumerate(b_order)}
    facets = []
    for sigma in a.facet_labels():
        sigma = sorted(sigma, key=a_rank.__getitem__)
        for tau in b.facet_labels():
            tau = sorted(tau, key=b_rank.__getitem__)
            for path in _staircases(len(sigma) - 1, len(tau) - 1):
                facets.append([PairVertex(sigma[i], tau[j]) for i, j in path])
    vertices = [PairVertex(u, v) for u in a_order for v in b_order]
    return SimplicialComplex(facets, vertices, f"product({a.trace}, {b.trace})")


def join(a: SimplicialComplex, b: SimplicialComplex) -> SimplicialComplex:
    vertices = [JoinVertex("L", v) for v in a.vertices] + [JoinVertex("R", v) for v in b.vertices]
    facets = ([JoinVertex("L", u) for u in sigma] + [JoinVertex("R", v) for v in tau]
              for sigma in a.facet_labels() for tau in b.facet_labels())
    return SimplicialComplex(facets, vertices, f"join({a.trace}, {b.trace})")


def barycentric_subdivide(a: SimplicialComplex) -> SimplicialComplex:
    """Вершины: симплексы a (по размерности, затем лексикографически). Грани: максимальные цепи"""
    simplices = [s for k in range(a.dimension + 1) for s in a.simplices(k)]
    chain_label = {s: ChainVertex(frozenset(a.vertices[v] for v in s)) for s in simplices}
    facets = []
    for facet in a.facets:
        for order in permutations(facet):
            facets.append([chain_label[tuple(sorted(order[:size]))] for size in range(1, len(order) + 1)])
    result = SimplicialComplex(facets, [chain_label[s] for s in simplices], f"subdivide({a.trace})")
    logger.debug(f"Подразделение: f-вектор {a.f_vector} -> {result.f_vector}")
    return result


def antipode_label(label: Hashable) -> Hashable:
    """Перенос отрицания на сферах через пары, стороны джойна и цепи подразделения"""
    if isinstance(label, SphereVertex):
        return SphereVertex(label.axis, -label.sign)
    if isinstance(label, PairVertex):
        return PairVertex(antipode_label(label.left), antipode_label(label.right))
    if isinstance(label, JoinVertex):
        return JoinVertex(label.side, antipode_label(label.label))
    if isinstance(label, ChainVertex):
        return ChainVertex(frozenset(antipode_label(m) for m in label.simplex))
    raise UnsupportedModel(f"Вершина {label!r} не допускает симплициального антипода "
                           f"(нужны сферы-кросс-политопы)")


def induced_involution(c: SimplicialComplex) -> SimplicialMap:
    """Антиподальная инволюция комплекса, собранного из кросс-политопов"""
    return SimplicialMap(c, c, {v: antipode_label(v) for v in c.vertices})


def _check_free_involution(c: SimplicialComplex, t: SimplicialMap) -> Tuple[int, ...]:
    if t.domain != c or t.codomain != c:
        raise NotInvolution("Инволюция должна действовать на данном комплексе")
    image = t.indices
    for v, w in enumerate(image):
        if image[w] != v:
            raise NotInvolution(f"t(t({c.vertices[v]!r})) != {c.vertices[v]!r}")
        if w == v:
            raise NotFree(f"Вершина {c.vertices[v]!r} неподвижна")
    return image


def _orbit_key(simplex: Simplex, image: Tuple[int, ...]) -> Simplex:
    return tuple(sorted({min(v, image[v]) for v in simplex}))


def is_regular(c: SimplicialComplex, t: SimplicialMap) -> bool:
    """Каждый образ орбиты имеет ровно два прообраза: sigma и t(sigma)"""
    image = _check_free_involution(c, t)
    preimages: Dict[Simplex, int] = {}
    for simplex in c.simplex_set:
        key = _orbit_key(simplex, image)
        if len(key) != len(simplex):
            return False
        preimages[key] = preimages.get(key, 0) + 1
    return all(count == 2 for count in preimages.values())


def quotient_by_involution(a: SimplicialComplex, t: SimplicialMap, trace: Optional[str] = None) -> SimplicialComplex:
    if not is_regular(a, t):
        raise NotRegular(f"Действие на {a.trace} не регулярно: выполните барицентрическое подразделение")
    image = t.indices
    orbit_label = {}
    for v in range(len(a.vertices)):
        first = min(v, image[v])
        orbit_label.setdefault(first, OrbitVertex(frozenset({a.vertices[v], a.vertices[image[v]]})))
    facets = {_orbit_key(facet, image) for facet in a.facets}
    quotient = SimplicialComplex([[orbit_label[v] for v in facet] for facet in sorted(facets)],
                                 [orbit_label[v] for v in sorted(orbit_label)], trace or f"quotient({a.trace})")
    logger.info(f"Фактор-комплекс: {len(a.vertices)} -> {len(quotient.vertices)} вершин, f = {quotient.f_vector}")
    return quotient


@lru_cache(maxsize=None)
def _fubini(m: int) -> int:
    """Число упорядоченных разбиений m-элементного множества"""
    if m == 0:
        return 1
    return sum(comb(m, i) * _fubini(m - i) for i in range(1, m + 1))


def subdivision_face_count(c: SimplicialComplex) -> int:
    """Точное число граней барицентрического подразделения без его построения"""
    return sum(f * _fubini(k + 1) for k, f in enumerate(c.f_vector))
