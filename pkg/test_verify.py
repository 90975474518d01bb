import pytest
from pydantic import ValidationError

import verify
from closed_forms import QuadricSignature
from graded import Coefficients, GradedHomology
from verify import Budget, CheckResult, CheckStatus, degenerate_signatures, sweep, verify_signature


def sig(p, q, n):
    return QuadricSignature(p=p, q=q, n=n)


def statuses(report):
    return {check.name: check.status for check in report.checks}


def test_smallest_quadric_passes_everything():
    report = verify_signature(sig(1, 1, 3), Budget.FULL)
    assert report.passed
    assert report.skipped == []
    names = statuses(report)
    for name in ("join_derivation", "invariant_derivation", "X_integer", "X_mod2", "Q_rational_invariants",
                 "Q_integer", "Q_rational_two_oracles", "transfer_euler", "oracle_cover_rank_bound"):
        assert names[name] == CheckStatus.PASS


def test_formula_budget_skips_oracle_checks():
    report = verify_signature(sig(2, 4, 8), Budget.FORMULA)
    assert report.passed
    names = statuses(report)
    assert names["even_case_closed_form"] == CheckStatus.PASS
    assert names["X_integer"] == CheckStatus.SKIPPED
    assert names["Q_integer"] == CheckStatus.SKIPPED


def test_cover_budget_skips_quotient_checks():
    report = verify_signature(sig(1, 2, 4), Budget.X_ONLY)
    names = statuses(report)
    assert report.passed
    assert names["X_integer"] == CheckStatus.PASS
    assert names["Q_rational_invariants"] == CheckStatus.PASS
    assert names["Q_mod2"] == CheckStatus.SKIPPED


def test_face_cap_turns_quotient_checks_into_skips():
    report = verify_signature(sig(1, 2, 5), Budget.FULL, face_cap=200)
    names = statuses(report)
    assert report.passed
    assert names["X_integer"] == CheckStatus.PASS
    assert names["Q_integer"] == CheckStatus.SKIPPED
    assert "200" in next(c.detail for c in report.checks if c.name == "Q_integer")


def test_nondegenerate_and_projective_signatures():
    report = verify_signature(sig(1, 2, 3))
    assert statuses(report) == {"product_kunneth": CheckStatus.PASS, "nondegenerate_mod2": CheckStatus.PASS}
    report = verify_signature(sig(0, 1, 4))
    assert report.passed
    assert statuses(report)["projective_referral_integer"] == CheckStatus.PASS


def test_broken_formula_is_reported_with_both_values(monkeypatch):
    monkeypatch.setattr(verify, "rational_homology_Q",
                        lambda s: GradedHomology.from_ranks({0: 1}, Coefficients.RATIONAL))
    report = verify_signature(sig(2, 3, 7), Budget.FORMULA)
    assert not report.passed
    failure = next(c for c in report.failures if c.name == "invariant_derivation")
    assert [m.degree for m in failure.mismatches] == [3]
    assert failure.expected.rank(3) == 0
    assert failure.actual.rank(3) == 1
    assert report.to_json()["checks"][1]["mismatches"][0]["degree"] == 3


def test_failures_must_carry_values():
    with pytest.raises(ValidationError):
        CheckResult(name="X_integer", status=CheckStatus.FAIL)
    assert CheckResult(name="X_integer", status=CheckStatus.FAIL, error="Inconsistent").error


def test_json_omits_timings_unless_requested():
    report = verify_signature(sig(1, 1, 4), Budget.FORMULA)
    assert all("seconds" not in check for check in report.to_json()["checks"])
    assert all("seconds" in check for check in report.to_json(timings=True)["checks"])
    assert report.to_json()["signature"] == {"p": 1, "q": 1, "n": 4}


def test_signature_enumeration():
    assert len(degenerate_signatures(7)) == 22
    assert degenerate_signatures(3) == [sig(1, 1, 3)]
    assert [s.label() for s in degenerate_signatures(4)] == ["(1,1,3)", "(1,1,4)", "(1,2,4)"]
    with pytest.raises(ValueError):
        degenerate_signatures(2)


def test_sweep_is_ordered_and_parallel_safe():
    serial = sweep(5, Budget.FORMULA, workers=1)
    parallel = sweep(5, Budget.FORMULA, workers=2)
    assert [r.signature for r in serial] == degenerate_signatures(5)
    assert [r.to_json() for r in serial] == [r.to_json() for r in parallel]
    assert all(r.passed for r in serial)


def test_report_json_comes_from_model_fields():
    report = verify_signature(sig(1, 1, 3), Budget.X_ONLY)
    data = report.to_json()
    assert list(data) == ["signature", "budget", "class", "passed", "checks"]
    assert data["class"] == "degenerate"
    assert data["budget"] == "x-only"
    passing = data["checks"][0]
    assert set(passing) == {"name", "status", "detail"}


def test_failed_check_json_carries_values_and_rounded_timing():
    h = GradedHomology.from_ranks({0: 1, 1: 2})
    failed = CheckResult(name="X_integer", status=CheckStatus.FAIL, expected=h,
                         actual=GradedHomology.from_ranks({0: 1}), seconds=0.12345678)
    data = failed.to_json(timings=True)
    assert data["expected"] == h.to_json()
    assert data["actual"]["groups"] == {"0": {"rank": 1, "torsion": []}}
    assert data["error"] is None
    assert data["seconds"] == 0.123457


def test_cover_checks_use_matching_coefficients():
    report = verify_signature(sig(1, 1, 4), Budget.X_ONLY)
    actual = {check.name: check.actual.coeff for check in report.checks if check.actual is not None}
    assert actual["X_integer"] == Coefficients.INTEGER
    assert actual["X_rational"] == Coefficients.RATIONAL
    assert actual["X_mod2"] == Coefficients.MOD2
    assert actual["Q_rational_invariants"] == Coefficients.RATIONAL


@pytest.mark.slow
def test_full_sweep_through_n_six():
    reports = sweep(6, Budget.FULL)
    assert [r.signature for r in reports] == degenerate_signatures(6)
    assert [r.signature.label() for r in reports if not r.passed] == []
    assert [r.signature.label() for r in reports if r.skipped] == []
