"""Сверка замкнутых формул с оракулом и проверка структурных тождеств."""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from functools import partial
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, computed_field, field_serializer, model_validator

from closed_forms import (QuadricSignature, SignatureClass, homology_real_projective_space, homology_X,
                          integer_homology_Q, integer_homology_Q_even_case, mod2_homology_Q,
                          mod2_homology_Q_nondegenerate, rational_homology_Q)
from errors import OracleInfeasible, QuadricError
from graded import Coefficients, FgAbelianGroup, GradedHomology
from homology_oracle import ORACLE_WORKERS, build_Q, build_X, homology_of_complex, induced_map_on_homology
from join_theory import (antipode_action, cover_join_factors, invariant_subgroup, join_homology,
                         join_induced_map, product_homology)

logger = logging.getLogger(__name__)


class Budget(str, Enum):
    FORMULA = "formula"
    X_ONLY = "x-only"
    FULL = "full"


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped-infeasible"


class DegreeMismatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    degree: int
    expected: FgAbelianGroup
    actual: FgAbelianGroup


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    status: CheckStatus
    detail: str = ""
    expected: Optional[GradedHomology] = None
    actual: Optional[GradedHomology] = None
    mismatches: Tuple[DegreeMismatch, ...] = ()
    error: Optional[str] = None
    seconds: float = 0.0

    @model_validator(mode="after")
    def _failures_carry_values(self):
        if self.status == CheckStatus.FAIL and self.error is None and (self.expected is None or self.actual is None):
            raise ValueError(f"Проверка {self.name} провалена без пары значений для сравнения")
        return self

    @field_serializer("seconds")
    def _round_seconds(self, seconds: float) -> float:
        return round(seconds, 6)

    def to_json(self, timings: bool = False) -> dict:
        exclude = set() if self.status == CheckStatus.FAIL else {"expected", "actual", "mismatches", "error"}
        if not timings:
            exclude.add("seconds")
        return self.model_dump(mode="json", by_alias=True, exclude=exclude)


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    signature: QuadricSignature
    budget: Budget
    checks: Tuple[CheckResult, ...]

    @computed_field(alias="class")
    @property
    def signature_class(self) -> SignatureClass:
        return self.signature.signature_class

    @computed_field
    @property
    def passed(self) -> bool:
        return all(check.status != CheckStatus.FAIL for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if check.status == CheckStatus.FAIL]

    @property
    def skipped(self) -> List[CheckResult]:
        return [check for check in self.checks if check.status == CheckStatus.SKIPPED]

    def to_json(self, timings: bool = False) -> dict:
        data = self.model_dump(mode="json", by_alias=True, exclude={"checks"})
        data["checks"] = [check.to_json(timings) for check in self.checks]
        return data


def _mismatches(expected: GradedHomology, actual: GradedHomology) -> Tuple[DegreeMismatch, ...]:
    degrees = sorted(set(expected.groups) | set(actual.groups))
    return tuple(DegreeMismatch(degree=k, expected=expected.group(k), actual=actual.group(k))
                 for k in degrees if expected.group(k) != actual.group(k))


class _CheckRunner:
    """Выполняет проверки с замером времени; нехватка ресурсов оракула означает пропуск"""

    def __init__(self, sig: QuadricSignature):
        self.sig = sig
        self.results: List[CheckResult] = []

    def _run(self, name: str, body: Callable[[], CheckResult]):
        started = time.perf_counter()
        try:
            result = body()
        except OracleInfeasible as e:
            logger.warning(f"{self.sig.label()} {name}: пропуск, {e}")
            result = CheckResult(name=name, status=CheckStatus.SKIPPED, detail=str(e))
        except QuadricError as e:
            logger.error(f"{self.sig.label()} {name}: ошибка {e}")
            result = CheckResult(name=name, status=CheckStatus.FAIL, error=str(e))
        self.results.append(result.model_copy(update={"seconds": time.perf_counter() - started}))
        logger.info(f"{self.sig.label()} {name}: {result.status.value}")

    def compare(self, name: str, expected: Callable[[], GradedHomology], actual: Callable[[], GradedHomology]):
        def body():
            left, right = expected(), actual()
            mismatches = _mismatches(left, right)
            ok = not mismatches and left.coeff == right.coeff
            return CheckResult(name=name, status=CheckStatus.PASS if ok else CheckStatus.FAIL,
                               expected=left, actual=right, mismatches=mismatches)
        self._run(name, body)

    def identity(self, name: str, left: Callable[[], GradedHomology], right: Callable[[], GradedHomology],
                 holds: Callable[[GradedHomology, GradedHomology], bool], detail: str):
        def body():
            x, q = left(), right()
            status = CheckStatus.PASS if holds(x, q) else CheckStatus.FAIL
            return CheckResult(name=name, status=status, detail=detail, expected=x, actual=q)
        self._run(name, body)

    def skip(self, names: List[str], reason: str):
        for name in names:
            self.results.append(CheckResult(name=name, status=CheckStatus.SKIPPED, detail=reason))


class _Oracle:
    """Ленивые и однократные построения оракула для одной сигнатуры (ошибки тоже запоминаются)"""

    def __init__(self, sig: QuadricSignature, face_cap: Optional[int]):
        self.sig = sig
        self.face_cap = face_cap
        self._values: Dict[str, object] = {}

    def _memo(self, key: str, compute: Callable):
        if key not in self._values:
            try:
                self._values[key] = compute()
            except QuadricError as e:
                self._values[key] = e
        value = self._values[key]
        if isinstance(value, Exception):
            raise value
        return value

    def cover(self):
        return self._memo("cover", lambda: build_X(self.sig, self.face_cap))

    def quotient(self):
        return self._memo("quotient", lambda: build_Q(self.sig, self.face_cap))

    def cover_homology(self, coeff: Coefficients) -> GradedHomology:
        if coeff == Coefficients.RATIONAL:
            return self.cover_homology(Coefficients.INTEGER).change_coefficients(coeff)
        return self._memo(f"cover-{coeff.value}", lambda: homology_of_complex(self.cover()[0], coeff).homology)

    def quotient_homology(self, coeff: Coefficients) -> GradedHomology:
        if coeff == Coefficients.RATIONAL:
            return self.quotient_homology(Coefficients.INTEGER).change_coefficients(coeff)
        return self._memo(f"quotient-{coeff.value}", lambda: homology_of_complex(self.quotient(), coeff).homology)

    def invariants(self) -> GradedHomology:
        return self._memo("invariants", lambda: invariant_subgroup(induced_map_on_homology(*self.cover())))


def _euler_doubles(x: GradedHomology, q: GradedHomology) -> bool:
    return x.euler_characteristic() == 2 * q.euler_characteristic()


def _cover_rank_bound(x: GradedHomology, q: GradedHomology) -> bool:
    return all(x.rank(k) <= 2 * q.rank(k) for k in range(max(x.top_degree, q.top_degree) + 1))


def _formula_checks(sig: QuadricSignature, runner: _CheckRunner):
    p, q, n = sig.normalized().p, sig.normalized().q, sig.n

    def joined():
        x, y, _, _ = cover_join_factors(p, q, n)
        return join_homology(x, y)

    def joined_invariants():
        x, y, f, g = cover_join_factors(p, q, n)
        return invariant_subgroup(join_induced_map(f, g, x, y))

    runner.compare("join_derivation", lambda: homology_X(sig), joined)
    runner.compare("invariant_derivation", lambda: rational_homology_Q(sig), joined_invariants)
    runner.compare("uct_consistency_rational", lambda: rational_homology_Q(sig),
                   lambda: integer_homology_Q(sig).change_coefficients(Coefficients.RATIONAL))
    runner.compare("uct_consistency_mod2", lambda: mod2_homology_Q(sig),
                   lambda: integer_homology_Q(sig).change_coefficients(Coefficients.MOD2))
    runner.identity("euler_doubling_rational", lambda: homology_X(sig, Coefficients.RATIONAL),
                    lambda: rational_homology_Q(sig), _euler_doubles, "chi(X) = 2 chi(Q) над Q")
    runner.identity("euler_doubling_mod2", lambda: homology_X(sig, Coefficients.MOD2),
                    lambda: mod2_homology_Q(sig), _euler_doubles, "chi(X) = 2 chi(Q) над Z/2")
    runner.identity("cover_rank_bound", lambda: homology_X(sig, Coefficients.MOD2),
                    lambda: mod2_homology_Q(sig), _cover_rank_bound, "b_k(X; Z/2) <= 2 b_k(Q; Z/2)")
    if q > p > 1 and sig.defect > 1 and p % 2 == 0 and q % 2 == 0 and n % 2 == 0:
        runner.compare("even_case_closed_form", lambda: integer_homology_Q_even_case(sig),
                       lambda: integer_homology_Q(sig))


def _degenerate_oracle_checks(sig: QuadricSignature, budget: Budget, oracle: _Oracle, runner: _CheckRunner):
    x_checks = {"X_integer": Coefficients.INTEGER, "X_rational": Coefficients.RATIONAL, "X_mod2": Coefficients.MOD2}
    q_names = ["Q_integer", "Q_rational", "Q_mod2", "Q_rational_two_oracles", "transfer_euler",
               "oracle_cover_rank_bound"]
    if budget == Budget.FORMULA:
        runner.skip(list(x_checks) + ["Q_rational_invariants"] + q_names, "бюджет: только формулы")
        return
    for name, coeff in x_checks.items():
        runner.compare(name, partial(homology_X, sig, coeff), partial(oracle.cover_homology, coeff))
    runner.compare("Q_rational_invariants", lambda: rational_homology_Q(sig), oracle.invariants)
    if budget == Budget.X_ONLY:
        runner.skip(q_names, "бюджет: только накрытие")
        return
    runner.compare("Q_integer", lambda: integer_homology_Q(sig), partial(oracle.quotient_homology, Coefficients.INTEGER))
    runner.compare("Q_rational", lambda: rational_homology_Q(sig),
                   partial(oracle.quotient_homology, Coefficients.RATIONAL))
    runner.compare("Q_mod2", lambda: mod2_homology_Q(sig), partial(oracle.quotient_homology, Coefficients.MOD2))
    runner.compare("Q_rational_two_oracles", oracle.invariants,
                   partial(oracle.quotient_homology, Coefficients.RATIONAL))
    runner.identity("transfer_euler", partial(oracle.cover_homology, Coefficients.MOD2),
                    partial(oracle.quotient_homology, Coefficients.MOD2), _euler_doubles,
                    "chi(X) = 2 chi(Q) над Z/2 по оракулу")
    runner.identity("oracle_cover_rank_bound", partial(oracle.cover_homology, Coefficients.MOD2),
                    partial(oracle.quotient_homology, Coefficients.MOD2), _cover_rank_bound,
                    "b_k(X; Z/2) <= 2 b_k(Q; Z/2) по оракулу")


def _nondegenerate_checks(sig: QuadricSignature, budget: Budget, oracle: _Oracle, runner: _CheckRunner):
    def kunneth():
        first, _ = antipode_action(sig.p - 1)
        second, _ = antipode_action(sig.q - 1)
        return product_homology(first, second).homology

    if budget == Budget.FORMULA:
        runner.skip(["product_kunneth", "nondegenerate_mod2"], "бюджет: только формулы")
        return
    runner.compare("product_kunneth", kunneth, partial(oracle.cover_homology, Coefficients.INTEGER))
    if budget == Budget.X_ONLY:
        runner.skip(["nondegenerate_mod2"], "бюджет: только накрытие")
        return
    runner.compare("nondegenerate_mod2", lambda: mod2_homology_Q_nondegenerate(sig),
                   partial(oracle.quotient_homology, Coefficients.MOD2))


def _projective_checks(sig: QuadricSignature, budget: Budget, oracle: _Oracle, runner: _CheckRunner):
    checks = {"projective_referral_integer": Coefficients.INTEGER, "projective_referral_mod2": Coefficients.MOD2}
    if budget != Budget.FULL or sig.defect == 0:
        runner.skip(list(checks), "бюджет: без фактор-комплекса" if sig.defect else "квадрика пуста")
        return
    for name, coeff in checks.items():
        runner.compare(name, partial(homology_real_projective_space, sig.defect - 1, coeff),
                       partial(oracle.quotient_homology, coeff))


def verify_signature(sig: QuadricSignature, budget: Budget = Budget.FULL,
                     face_cap: Optional[int] = None) -> VerificationReport:
    runner = _CheckRunner(sig)
    oracle = _Oracle(sig, face_cap)
    signature_class = sig.signature_class
    if signature_class == SignatureClass.DEGENERATE:
        _formula_checks(sig, runner)
        _degenerate_oracle_checks(sig, budget, oracle, runner)
    elif signature_class == SignatureClass.NON_DEGENERATE:
        _nondegenerate_checks(sig, budget, oracle, runner)
    else:
        _projective_checks(sig, budget, oracle, runner)
    report = VerificationReport(signature=sig, budget=budget, checks=tuple(runner.results))
    logger.info(f"{sig.label()}: {'успех' if report.passed else 'расхождения'}, "
                f"провалено {len(report.failures)}, пропущено {len(report.skipped)}")
    return report


def degenerate_signatures(max_n: int) -> List[QuadricSignature]:
    """Все (p, q, n) с q >= p >= 1 и p + q < n <= max_n в порядке n, p, q"""
    if max_n < 3:
        raise ValueError(f"max_n должно быть не меньше 3, получено {max_n}")
    return [QuadricSignature(p=p, q=q, n=n)
            for n in range(3, max_n + 1)
            for p in range(1, n)
            for q in range(p, n - p)]


def sweep(max_n: int, budget: Budget = Budget.FULL, workers: Optional[int] = None,
          face_cap: Optional[int] = None) -> List[VerificationReport]:
    """Проверка всех вырожденных сигнатур; отчёты в порядке перечисления"""
    if workers is None:
        workers = ORACLE_WORKERS
    signatures = degenerate_signatures(max_n)
    logger.info(f"Проверка {len(signatures)} сигнатур до n = {max_n}, бюджет {budget.value}")
    check = partial(verify_signature, budget=budget, face_cap=face_cap)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(check, signatures))
    return [check(sig) for sig in signatures]
