"""Командная строка: замкнутые формулы, оракул и сверка для квадрик Q_{p,q}^n и накрытий X_{p,q}^n."""
import argparse
import csv
import io
import json
import logging
import os
import sys
from enum import Enum
from typing import Dict, List, Optional, Sequence

from dotenv import load_dotenv

from closed_forms import (QuadricSignature, homology_X, integer_homology_Q, mod2_homology_Q,
                          rational_homology_Q)
from errors import OracleInfeasible, QuadricError, RegularityUnreachable
from graded import Coefficients, GradedHomology
from homology_oracle import build_Q, build_X, export_complex, homology_of_complex
from verify import Budget, CheckStatus, VerificationReport, degenerate_signatures, sweep

# Загрузка переменных окружения
load_dotenv()

LOG_LEVEL = os.getenv("QUADRIC_LOG_LEVEL", "INFO")  # уровень логирования

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID_SIGNATURE = 2
EXIT_INFEASIBLE = 3
EXIT_MISMATCH = 4

logger = logging.getLogger(__name__)


class OutputFormat(str, Enum):
    TABLE = "table"
    JSON = "json"
    CSV = "csv"
    LATEX = "latex"


def formula_homology(sig: QuadricSignature, space: str, coeff: Coefficients) -> GradedHomology:
    if space == "X":
        return homology_X(sig, coeff)
    if coeff == Coefficients.INTEGER:
        return integer_homology_Q(sig)
    if coeff == Coefficients.RATIONAL:
        return rational_homology_Q(sig)
    return mod2_homology_Q(sig)


def oracle_homology(sig: QuadricSignature, space: str, coeff: Coefficients, face_cap: Optional[int] = None,
                    workers: Optional[int] = None, dump_complex: Optional[str] = None) -> GradedHomology:
    """Гомологии по симплициальной модели"""
    complex_ = build_X(sig, face_cap)[0] if space == "X" else build_Q(sig, face_cap)
    if dump_complex:
        export_complex(complex_, dump_complex)
    return homology_of_complex(complex_, coeff, workers).homology


def _space_label(sig: QuadricSignature, space: str) -> str:
    return f"{space}_{{{sig.p},{sig.q}}}^{sig.n}"


def _csv_text(header: Sequence[str], rows: List[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def render_homology(sig: QuadricSignature, space: str, results: Dict[str, GradedHomology],
                    fmt: OutputFormat) -> str:
    """Вывод гомологий одного пространства; при двух методах добавляется вердикт"""
    verdict = None
    if len(results) == 2:
        verdict = "match" if results["formula"] == results["oracle"] else "mismatch"
    if fmt == OutputFormat.JSON:
        data = {"signature": sig.model_dump(), "space": space,
                "results": {method: h.to_json() for method, h in results.items()}}
        if verdict:
            data["verdict"] = verdict
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    # при двух методах строки CSV и LaTeX берутся из формулы, расхождение видно по вердикту и коду выхода
    primary = results.get("formula") or results["oracle"]
    degrees = sorted(primary.groups)
    if fmt == OutputFormat.CSV:
        rows = [(sig.p, sig.q, sig.n, k, primary.rank(k), ";".join(map(str, primary.group(k).torsion)))
                for k in degrees]
        return _csv_text(("p", "q", "n", "degree", "rank", "torsion"), rows)
    if fmt == OutputFormat.LATEX:
        lines = [r"\begin{tabular}{rl}", r"$k$ & $H_k$ \\", r"\hline"]
        lines += [f"{k} & ${primary.group(k).render_latex(primary.coeff)}$ \\\\" for k in degrees]
        lines.append(r"\end{tabular}")
        return "\n".join(lines) + "\n"
    lines = []
    for method, h in results.items():
        lines.append(f"{_space_label(sig, space)} [{method}, {h.coeff.value}]")
        lines += [f"  H_{k} = {h.group(k).render(h.coeff)}" for k in sorted(h.groups)] or ["  0"]
    if verdict:
        lines.append(verdict)
    return "\n".join(lines) + "\n"


def cmd_homology(args) -> int:
    """Гомологии одной сигнатуры по формуле, оракулу или обоими способами"""
    coeff = Coefficients.from_flag(args.coeff)
    try:
        sig = QuadricSignature(p=args.p, q=args.q, n=args.n)
        results: Dict[str, GradedHomology] = {}
        if args.method in ("formula", "both"):
            results["formula"] = formula_homology(sig, args.space, coeff)
        if args.method in ("oracle", "both"):
            results["oracle"] = oracle_homology(sig, args.space, coeff, args.face_cap, args.workers,
                                                args.dump_complex)
    except (OracleInfeasible, RegularityUnreachable) as e:
        logger.error(f"Оракул не может быть построен: {e}")
        return EXIT_INFEASIBLE
    except (QuadricError, ValueError) as e:
        logger.error(f"Некорректная сигнатура ({args.p}, {args.q}, {args.n}): {e}")
        return EXIT_INVALID_SIGNATURE
    sys.stdout.write(render_homology(sig, args.space, results, OutputFormat(args.format)))
    if len(results) == 2 and results["formula"] != results["oracle"]:
        logger.error(f"{sig.label()}: формула и оракул расходятся")
        return EXIT_MISMATCH
    return EXIT_OK


def render_table(signatures: Sequence[QuadricSignature], space: str, coeff: Coefficients,
                 fmt: OutputFormat) -> str:
    """Одна строка на сигнатуру, столбцы H_0..H_max по формулам"""
    rows = [(sig, formula_homology(sig, space, coeff)) for sig in signatures]
    width = max(h.top_degree for _, h in rows) + 1
    if fmt == OutputFormat.JSON:
        data = [{"signature": sig.model_dump(), "homology": h.to_json()} for sig, h in rows]
        return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
    if fmt == OutputFormat.LATEX:
        lines = [r"\begin{tabular}{" + "c" * (3 + width) + "}",
                 "$p$ & $q$ & $n$ & " + " & ".join(f"$H_{{{k}}}$" for k in range(width)) + r" \\", r"\hline"]
        for sig, h in rows:
            cells = [f"${h.group(k).render_latex(coeff)}$" for k in range(width)]
            lines.append(f"{sig.p} & {sig.q} & {sig.n} & " + " & ".join(cells) + r" \\")
        lines.append(r"\end{tabular}")
        return "\n".join(lines) + "\n"
    header = ["p", "q", "n"] + [f"H_{k}" for k in range(width)]
    body = [[sig.p, sig.q, sig.n] + [h.group(k).render(coeff) for k in range(width)] for sig, h in rows]
    if fmt == OutputFormat.CSV:
        return _csv_text(header, body)
    widths = [max(len(str(row[i])) for row in [header] + body) for i in range(len(header))]
    return "".join("  ".join(str(cell).rjust(w) for cell, w in zip(row, widths)).rstrip() + "\n"
                   for row in [header] + body)


def cmd_table(args) -> int:
    coeff = Coefficients.from_flag(args.coeff)
    try:
        signatures = degenerate_signatures(args.max_n)
    except ValueError as e:
        logger.error(f"Некорректный диапазон: {e}")
        return EXIT_INVALID_SIGNATURE
    sys.stdout.write(render_table(signatures, args.space, coeff, OutputFormat(args.format)))
    return EXIT_OK


def render_reports(reports: Sequence[VerificationReport], fmt: OutputFormat, timings: bool = False) -> str:
    if fmt == OutputFormat.JSON:
        return json.dumps([report.to_json(timings) for report in reports], indent=2, ensure_ascii=False) + "\n"
    lines = []
    for report in reports:
        counts = {status: sum(1 for c in report.checks if c.status == status) for status in CheckStatus}
        lines.append(f"{report.signature.label()} " + " ".join(f"{s.value}={counts[s]}" for s in CheckStatus))
        for check in report.checks:
            if check.status == CheckStatus.FAIL:
                reason = check.error or "; ".join(
                    f"H_{m.degree}: {m.expected.render()} != {m.actual.render()}" for m in check.mismatches)
                lines.append(f"  {check.name}: {reason or check.detail}")
            if timings:
                lines.append(f"  {check.name}: {check.seconds:.3f} s")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    """Сверка по всем вырожденным сигнатурам до max_n; код 1 при провалах (или пропусках с --strict)"""
    try:
        reports = sweep(args.max_n, Budget(args.budget), args.workers, args.face_cap)
    except ValueError as e:
        logger.error(f"Некорректный диапазон: {e}")
        return EXIT_INVALID_SIGNATURE
    sys.stdout.write(render_reports(reports, OutputFormat(args.format), args.timings))
    failed = [r.signature.label() for r in reports if not r.passed]
    skipped = sum(len(r.skipped) for r in reports)
    if failed:
        logger.error(f"Провалены проверки для {', '.join(failed)}")
        return EXIT_VERIFY_FAILED
    if args.strict and skipped:
        logger.error(f"Пропущено проверок: {skipped} (--strict)")
        return EXIT_VERIFY_FAILED
    logger.info(f"Все проверки пройдены, пропущено {skipped}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Гомологии вырожденных вещественных проективных квадрик")
    commands = parser.add_subparsers(dest="command", required=True)

    def oracle_flags(sub):
        sub.add_argument("--face-cap", type=int, default=None,
                         help="предел числа граней (иначе QUADRIC_ORACLE_FACE_CAP)")
        sub.add_argument("--workers", type=int, default=None,
                         help="число процессов (иначе QUADRIC_ORACLE_WORKERS)")

    homology = commands.add_parser("homology", help="гомологии одной сигнатуры")
    homology.add_argument("--p", type=int, required=True)
    homology.add_argument("--q", type=int, required=True)
    homology.add_argument("--n", type=int, required=True)
    homology.add_argument("--space", choices=["X", "Q"], default="Q")
    homology.add_argument("--coeff", choices=["z", "q", "z2"], default="z")
    homology.add_argument("--method", choices=["formula", "oracle", "both"], default="formula")
    homology.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TABLE.value)
    homology.add_argument("--dump-complex", metavar="PATH", default=None,
                          help="записать построенный комплекс списком граней")
    oracle_flags(homology)
    homology.set_defaults(handler=cmd_homology)

    table = commands.add_parser("table", help="таблица формул по всем вырожденным сигнатурам")
    table.add_argument("--max-n", type=int, required=True)
    table.add_argument("--space", choices=["X", "Q"], default="Q")
    table.add_argument("--coeff", choices=["z", "q", "z2"], default="z")
    table.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.TABLE.value)
    table.set_defaults(handler=cmd_table)

    verify = commands.add_parser("verify", help="сверка формул с оракулом")
    verify.add_argument("--max-n", type=int, required=True)
    verify.add_argument("--budget", choices=[b.value for b in Budget], default=Budget.FULL.value)
    verify.add_argument("--format", choices=[OutputFormat.JSON.value, OutputFormat.TABLE.value],
                        default=OutputFormat.TABLE.value)
    verify.add_argument("--timings", action="store_true", help="добавить время проверок")
    verify.add_argument("--strict", action="store_true", help="считать пропуски провалом")
    oracle_flags(verify)
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Точка входа командной строки"""
    logging.basicConfig(
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        level=getattr(logging, LOG_LEVEL.upper(), logging.INFO)
    )
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
