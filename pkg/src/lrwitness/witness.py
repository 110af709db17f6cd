"""Order classification and verification of the improperness certificate."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterator

from .exact import ProjectiveMatrix, canonicalize
from .family import RepFamily, evaluate_word, long_reid_family
from .tree import DEFAULT_PRIMES, DomainError, displacement, is_vertex_stabilizer
from .words import Word, is_reduced, paper_witness_word

INFINITE = 0  # sentinel order value


@dataclass(frozen=True, order=True)
class OrderClass:
    """Order of a projective class: ``n`` in {1, 2, 3, 4, 6}, or 0 for infinite."""

    n: int

    @property
    def is_finite(self) -> bool:
        return self.n != INFINITE

    def __str__(self) -> str:
        return f"finite({self.n})" if self.is_finite else "infinite"

    @classmethod
    def parse(cls, text: str) -> OrderClass:
        if text == "infinite":
            return cls(INFINITE)
        if text.startswith("finite(") and text.endswith(")"):
            n = int(text[7:-1])
            if n in (1, 2, 3, 4, 6):
                return cls(n)
        raise ValueError(f"bad order class {text!r}")


def finite(n: int) -> OrderClass:
    return OrderClass(n)


INFINITE_ORDER = OrderClass(INFINITE)


def classify_order(g: ProjectiveMatrix) -> OrderClass:
    """Order of ``g`` in PGL_2(Q), read off from trace^2 / det.

    Elliptic classes over Q have trace^2/det in {0, 1, 2, 3}, giving orders
    2, 3, 4, 6; ratio 4 without being scalar is parabolic.
    """
    if g.is_identity():
        return OrderClass(1)
    tr, d = g.trace, g.det
    if tr == 0:
        return OrderClass(2)
    if d > 0:
        t2 = tr * tr
        if t2 == d:
            return OrderClass(3)
        if t2 == 2 * d:
            return OrderClass(4)
        if t2 == 3 * d:
            return OrderClass(6)
    return INFINITE_ORDER


@dataclass(frozen=True)
class WitnessRecord:
    word: Word
    matrix: ProjectiveMatrix
    det: int
    trace: int
    order: OrderClass
    displacement2: int
    displacement3: int

    @property
    def is_witness(self) -> bool:
        return (
            self.displacement2 == 0
            and self.displacement3 == 0
            and abs(self.det) == 1
            and not self.order.is_finite
        )

    def to_dict(self) -> dict[str, Any]:
        m = self.matrix
        return {
            "word": self.word,
            "length": len(self.word),
            "matrix": [[str(m.m11), str(m.m12)], [str(m.m21), str(m.m22)]],
            "det": str(self.det),
            "trace": str(self.trace),
            "order": str(self.order),
            "displacement2": self.displacement2,
            "displacement3": self.displacement3,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> WitnessRecord:
        rows = [[int(x) for x in row] for row in data["matrix"]]
        matrix = ProjectiveMatrix(*rows[0], *rows[1])
        if canonicalize(rows) != matrix:
            raise ValueError("matrix in record is not canonical")
        if data["length"] != len(data["word"]):
            raise ValueError("length field disagrees with word")
        return cls(
            word=data["word"],
            matrix=matrix,
            det=int(data["det"]),
            trace=int(data["trace"]),
            order=OrderClass.parse(data["order"]),
            displacement2=int(data["displacement2"]),
            displacement3=int(data["displacement3"]),
        )

    @classmethod
    def from_json(cls, line: str) -> WitnessRecord:
        return cls.from_dict(json.loads(line))


def record_for(word: Word, matrix: ProjectiveMatrix) -> WitnessRecord:
    """Build a record for an already evaluated ``matrix``."""
    return WitnessRecord(
        word=word,
        matrix=matrix,
        det=matrix.det,
        trace=matrix.trace,
        order=classify_order(matrix),
        displacement2=displacement(matrix, 2),
        displacement3=displacement(matrix, 3),
    )


def build_record(w: Word, fam: RepFamily | None = None) -> WitnessRecord:
    return record_for(w, evaluate_word(w, fam or long_reid_family()))


# --- certificate -----------------------------------------------------------

# displayed matrix, one tuple per printed row
CERTIFICATE_MATRIX_ROWS = (
    (-646279884109511971664607, 6162511442411222450262052),
    (-4193268331567764626734, 39984323680432243295081),
)
# the same rows as printed text, transcribed separately; decimal digit sums per row
CERTIFICATE_MATRIX_TEXT = (
    "-646279884109511971664607 & 6162511442411222450262052",
    "-4193268331567764626734 & 39984323680432243295081",
)
CERTIFICATE_ROW_CHECKSUMS = (187, 201)
CERTIFICATE_ABS_TRACE = 606295560429079728369526
EXPECTED_WORD_LENGTH = 82


class VerificationFailure(Exception):
    """A named check of the certificate failed."""

    def __init__(self, check: CheckResult) -> None:
        super().__init__(
            f"check {check.index} ({check.name}) failed: expected {check.expected}, got {check.actual}"
        )
        self.check = check


@dataclass(frozen=True)
class CheckResult:
    index: int
    name: str
    expected: str
    actual: str
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "expected": self.expected, "actual": self.actual, "pass": self.passed}


CHECK_NAMES = (
    "word_length",
    "freely_reduced",
    "matrix_matches_certificate",
    "determinant_one",
    "trace_exceeds_two",
    "infinite_order",
    "vertex_stabilizer",
)


@dataclass
class VerificationReport:
    word: Word
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return len(self.checks) == len(CHECK_NAMES) and all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> CheckResult | None:
        return next((c for c in self.checks if not c.passed), None)

    def to_text(self) -> str:
        lines = [f"word ({len(self.word)} letters): {self.word}"]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"[{mark}] {c.index}. {c.name}: expected {c.expected}; actual {c.actual}")
        f = self.first_failure
        if f is None:
            lines.append(
                "conclusion: an infinite-order element lies in the vertex stabilizer PGL_2(Z), "
                "so the action on T_3 x T_4 is not proper"
            )
        else:
            lines.append(f"conclusion: certificate rejected at check {f.index} ({f.name})")
        return "\n".join(lines)

    def to_records(self) -> Iterator[str]:
        for c in self.checks:
            yield json.dumps(c.to_dict(), separators=(",", ":"))


def certificate_matrix() -> ProjectiveMatrix:
    return canonicalize(CERTIFICATE_MATRIX_ROWS)


def verify_certificate(
    word: Word | None = None,
    *,
    fam: RepFamily | None = None,
    raise_on_failure: bool = False,
) -> VerificationReport:
    """Run the seven certificate checks against ``word`` (default: the built-in one).

    Every check is evaluated and reported.  With ``raise_on_failure`` the first
    failing check, in order, is raised as :class:`VerificationFailure` instead.
    """
    word = paper_witness_word() if word is None else word
    m = evaluate_word(word, fam or long_reid_family())
    target = certificate_matrix()
    order = classify_order(m)
    d2, d3 = displacement(m, 2), displacement(m, 3)
    try:
        stabilizer = is_vertex_stabilizer(m, DEFAULT_PRIMES)
    except DomainError:
        stabilizer = False

    rows: list[tuple[object, object, bool]] = [
        (EXPECTED_WORD_LENGTH, len(word), len(word) == EXPECTED_WORD_LENGTH),
        (True, is_reduced(word), is_reduced(word)),
        (target, m, m == target),
        (1, m.det, m.det == 1),
        (
            f"|trace| = {CERTIFICATE_ABS_TRACE} > 2",
            f"|trace| = {abs(m.trace)}",
            abs(m.trace) == CERTIFICATE_ABS_TRACE and abs(m.trace) > 2,
        ),
        (INFINITE_ORDER, order, not order.is_finite),
        ("displacements (0, 0)", f"displacements ({d2}, {d3})", d2 == 0 and d3 == 0 and stabilizer),
    ]
    report = VerificationReport(word)
    for i, (name, (expected, actual, ok)) in enumerate(zip(CHECK_NAMES, rows), start=1):
        result = CheckResult(i, name, str(expected), str(actual), ok)
        if not ok and raise_on_failure:
            raise VerificationFailure(result)
        report.checks.append(result)
    return report


def verify_paper_certificate() -> VerificationReport:
    """Verify the built-in certificate; raises :class:`VerificationFailure` on any miss."""
    return verify_certificate(raise_on_failure=True)
