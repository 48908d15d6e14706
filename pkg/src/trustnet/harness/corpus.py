"""Canonicalization corpus checks.

A corpus is a TSV file of ``input<TAB>expected-key`` lines (``#`` starts a
comment). Every input is canonicalized and compared against the
expectation; differences are reported with line numbers. A 40-case corpus
covering the known per-site parameter rules and folding behaviors ships
with the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from trustnet.urlcanon import PolicyTable, canonicalize


@dataclass(frozen=True)
class CorpusFailure:
    line_no: int
    input_url: str
    expected: str
    actual: str  # canonical key, or "error: ..." when canonicalization raised

    def describe(self) -> str:
        return (
            f"line {self.line_no}: {self.input_url}\n"
            f"    expected: {self.expected}\n"
            f"    actual:   {self.actual}"
        )


@dataclass
class CorpusReport:
    path: str
    total: int = 0
    failures: list[CorpusFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        return json.dumps(
            {
                "path": self.path,
                "total": self.total,
                "failed": len(self.failures),
                "passed": self.passed,
                "failures": [
                    {
                        "line": f.line_no,
                        "input": f.input_url,
                        "expected": f.expected,
                        "actual": f.actual,
                    }
                    for f in self.failures
                ],
            },
            indent=2,
            sort_keys=True,
        )

    def describe(self) -> str:
        lines = [f"{self.path}: {self.total - len(self.failures)}/{self.total} passed"]
        if self.total == 0:
            lines.append("warning: corpus is empty")
        lines += [f.describe() for f in self.failures]
        return "\n".join(lines)


def shipped_corpus_path() -> Path:
    return Path(str(resources.files("trustnet") / "data" / "url_corpus.tsv"))


def run_corpus(path: str | Path, table: PolicyTable | None = None) -> CorpusReport:
    """Check every corpus line; unreadable files raise OSError."""
    text = Path(path).read_text(encoding="utf-8")
    report = CorpusReport(path=str(path))
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        report.total += 1
        parts = line.split("\t")
        if len(parts) != 2:
            report.failures.append(
                CorpusFailure(line_no, raw, "<input TAB expected>", "error: malformed line")
            )
            continue
        input_url, expected = parts
        try:
            actual = canonicalize(input_url, table)
        except Exception as exc:
            actual = f"error: {exc}"
        if actual != expected:
            report.failures.append(CorpusFailure(line_no, input_url, expected, actual))
    return report
