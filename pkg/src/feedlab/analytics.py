"""Pre/post survey evaluation toolkit.

Likert item summaries, paired t-test with Cohen's d, category transition
matrices with chi-square tests and Pearson residuals, and inter-rater
kappa.  Inputs are coded survey rows (we consume already-coded categories);
the toolkit never touches free text.

Pre/post matching is an explicit inner join on student_id; matched and
dropped counts are part of every output so the matching rule is never
hidden.  All percentage outputs round half-up to two decimals.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DegenerateDataError, InputError, ValidationError
from .pvalues import chi_square_sf, student_t_two_tailed

PHASES = ("pre", "post")
GRADES = (5, 8)
N_LIKERT_ITEMS = 11

# coded category ranges per open-ended question
QUESTION_CATEGORIES = {1: (0, 1, 2), 2: (0, 1, 2, 3, 4), 3: (0, 1, 2, 3, 4)}

SURVEY_HEADER = (
    ["student_id", "phase", "grade"]
    + [f"l{i}" for i in range(1, N_LIKERT_ITEMS + 1)]
    + ["q1", "q2", "q3"]
)


def round_half_up(value: float, decimals: int = 2) -> float:
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class SurveyRow:
    """One student's answers in one phase; blank cells stay None."""

    student_id: str
    phase: str
    grade: Optional[int]
    likert: tuple[Optional[int], ...]
    open_cats: tuple[Optional[int], ...]

    def __post_init__(self):
        if not self.student_id:
            raise ValidationError("student_id", "must be non-empty")
        if self.phase not in PHASES:
            raise ValidationError("phase", f"must be one of {PHASES}")
        if self.grade is not None and self.grade not in GRADES:
            raise ValidationError("grade", f"must be one of {GRADES}")
        object.__setattr__(self, "likert", tuple(self.likert))
        object.__setattr__(self, "open_cats", tuple(self.open_cats))
        if len(self.likert) != N_LIKERT_ITEMS:
            raise ValidationError("likert", f"needs {N_LIKERT_ITEMS} items")
        for i, v in enumerate(self.likert, start=1):
            if v is not None and not 1 <= v <= 5:
                raise ValidationError(f"l{i}", "must lie in 1..5")
        if len(self.open_cats) != 3:
            raise ValidationError("open_cats", "needs 3 coded categories")
        for q, v in enumerate(self.open_cats, start=1):
            cats = QUESTION_CATEGORIES[q]
            if v is not None and v not in cats:
                raise ValidationError(f"q{q}", f"must lie in {cats[0]}..{cats[-1]}")


def _parse_cell(raw: str) -> Optional[int]:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"non-integer survey cell {raw!r}") from exc


def load_survey_csv(path) -> list[SurveyRow]:
    """Read rows from the ``student_id,phase,grade,l1..l11,q1,q2,q3`` format."""
    rows: list[SurveyRow] = []
    seen: set[tuple[str, str]] = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != SURVEY_HEADER:
            raise InputError(
                f"unexpected header {header!r}; expected {','.join(SURVEY_HEADER)}"
            )
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(SURVEY_HEADER):
                raise InputError(f"line {lineno}: wrong number of columns")
            student_id = record[0].strip()
            phase = record[1].strip()
            grade = _parse_cell(record[2])
            likert = tuple(_parse_cell(c) for c in record[3:14])
            open_cats = tuple(_parse_cell(c) for c in record[14:17])
            row = SurveyRow(
                student_id=student_id,
                phase=phase,
                grade=grade,
                likert=likert,
                open_cats=open_cats,
            )
            key = (row.student_id, row.phase)
            if key in seen:
                raise InputError(f"duplicate (student_id, phase) {key}")
            seen.add(key)
            rows.append(row)
    return rows


def likert_summary(rows: Sequence[SurveyRow], item: int) -> dict:
    """Response distribution and share of positive (>= 4) answers per phase."""
    if not 1 <= item <= N_LIKERT_ITEMS:
        raise InputError(f"item must lie in 1..{N_LIKERT_ITEMS}")
    out: dict = {"item": item}
    for phase in PHASES:
        values = [
            r.likert[item - 1]
            for r in rows
            if r.phase == phase and r.likert[item - 1] is not None
        ]
        if not values:
            raise InputError(f"no responses for phase {phase!r}")
        distribution = {k: values.count(k) for k in range(1, 6)}
        positive = sum(1 for v in values if v >= 4)
        out[phase] = {
            "n": len(values),
            "distribution": distribution,
            "pct_positive": round_half_up(100.0 * positive / len(values)),
        }
    return out


def item_values(rows: Sequence[SurveyRow], item: int, phase: str) -> dict[str, int]:
    """student_id -> Likert value for one item and phase (missing dropped)."""
    if phase not in PHASES:
        raise InputError(f"phase must be one of {PHASES}")
    return {
        r.student_id: r.likert[item - 1]
        for r in rows
        if r.phase == phase and r.likert[item - 1] is not None
    }


EFFECT_BINS = ((0.8, "large"), (0.5, "medium"), (0.2, "small"))


def effect_size_label(d: float) -> str:
    magnitude = abs(d)
    for cutoff, label in EFFECT_BINS:
        if magnitude >= cutoff:
            return label
    return "negligible"


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p_two_tailed: float
    cohen_d: float
    label: str
    n_matched: int
    n_pre_only: int
    n_post_only: int

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "df": self.df,
            "p_two_tailed": self.p_two_tailed,
            "cohen_d": self.cohen_d,
            "label": self.label,
            "n_matched": self.n_matched,
            "n_pre_only": self.n_pre_only,
            "n_post_only": self.n_post_only,
        }


def paired_t(pre: Mapping[str, float], post: Mapping[str, float]) -> TTestResult:
    """Paired t-test on post - pre differences after an inner join by student.

    Cohen's d for paired samples is mean(diff) / sd(diff) with the sample
    (n - 1) standard deviation, so d = t / sqrt(n) holds as an identity.
    """
    matched = sorted(set(pre) & set(post))
    n = len(matched)
    if n < 2:
        raise InputError("need at least 2 matched pairs")
    diffs = np.array([post[s] - pre[s] for s in matched], dtype=float)
    mean = float(diffs.mean())
    sd = float(diffs.std(ddof=1))
    if sd == 0.0:
        if mean != 0.0:
            raise DegenerateDataError(
                "zero variance with nonzero mean difference: t undefined"
            )
        t = 0.0
        d = 0.0
    else:
        t = mean / (sd / np.sqrt(n))
        d = mean / sd
    return TTestResult(
        t=float(t),
        df=n - 1,
        p_two_tailed=student_t_two_tailed(float(t), n - 1),
        cohen_d=float(d),
        label=effect_size_label(float(d)),
        n_matched=n,
        n_pre_only=len(set(pre) - set(post)),
        n_post_only=len(set(post) - set(pre)),
    )


def category_values(
    rows: Sequence[SurveyRow], question: int, phase: str
) -> dict[str, int]:
    if question not in QUESTION_CATEGORIES:
        raise InputError("question must lie in 1..3")
    if phase not in PHASES:
        raise InputError(f"phase must be one of {PHASES}")
    return {
        r.student_id: r.open_cats[question - 1]
        for r in rows
        if r.phase == phase and r.open_cats[question - 1] is not None
    }


def category_summary(rows: Sequence[SurveyRow], question: int) -> dict:
    """Per-phase category counts with appendix-style percentages."""
    cats = QUESTION_CATEGORIES.get(question)
    if cats is None:
        raise InputError("question must lie in 1..3")
    out: dict = {"question": question, "categories": list(cats)}
    for phase in PHASES:
        values = list(category_values(rows, question, phase).values())
        if not values:
            raise InputError(f"no coded responses for phase {phase!r}")
        counts = {c: values.count(c) for c in cats}
        total = len(values)
        out[phase] = {
            "n": total,
            "counts": counts,
            "percents": {c: round_half_up(100.0 * counts[c] / total) for c in cats},
        }
    return out


@dataclass(frozen=True)
class TransitionResult:
    question: int
    categories: tuple[int, ...]
    counts: tuple[tuple[int, ...], ...]  # counts[pre_cat][post_cat]
    n_matched: int
    n_pre_only: int
    n_post_only: int

    def row_sums(self) -> list[int]:
        return [sum(row) for row in self.counts]

    def col_sums(self) -> list[int]:
        return [sum(col) for col in zip(*self.counts)]

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "categories": list(self.categories),
            "counts": [list(row) for row in self.counts],
            "n_matched": self.n_matched,
            "n_pre_only": self.n_pre_only,
            "n_post_only": self.n_post_only,
        }


def transition_matrix(rows: Sequence[SurveyRow], question: int) -> TransitionResult:
    """Counts of students moving from pre category r to post category c.

    Students coded in only one phase are dropped (inner join) and reported
    in the n_*_only fields.
    """
    cats = QUESTION_CATEGORIES.get(question)
    if cats is None:
        raise InputError("question must lie in 1..3")
    pre = category_values(rows, question, "pre")
    post = category_values(rows, question, "post")
    matched = sorted(set(pre) & set(post))
    if not matched:
        raise InputError("no matched students between phases")
    counts = [[0] * len(cats) for _ in cats]
    for student in matched:
        counts[pre[student]][post[student]] += 1
    return TransitionResult(
        question=question,
        categories=tuple(cats),
        counts=tuple(tuple(row) for row in counts),
        n_matched=len(matched),
        n_pre_only=len(set(pre) - set(post)),
        n_post_only=len(set(post) - set(pre)),
    )


@dataclass(frozen=True)
class ContingencyTable:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(self, "counts", tuple(tuple(r) for r in self.counts))
        if len(self.rows) < 2 or len(self.cols) < 2:
            raise ValidationError("counts", "table must be at least 2x2")
        if len(self.counts) != len(self.rows) or any(
            len(r) != len(self.cols) for r in self.counts
        ):
            raise ValidationError("counts", "shape must match row/col labels")
        total = 0
        for row in self.counts:
            for value in row:
                if not isinstance(value, int) or value < 0:
                    raise ValidationError("counts", "must be non-negative integers")
                total += value
        if total <= 0:
            raise ValidationError("counts", "total must be positive")

    @classmethod
    def from_transitions(
        cls, result: TransitionResult, drop_empty: bool = True
    ) -> "ContingencyTable":
        """Transition counts as a contingency table.

        Categories empty in a margin are dropped by default so expected
        counts stay positive; set drop_empty=False to keep the full range.
        """
        counts = [list(row) for row in result.counts]
        cats = list(result.categories)
        row_labels = [str(c) for c in cats]
        col_labels = [str(c) for c in cats]
        if drop_empty:
            keep_rows = [i for i, row in enumerate(counts) if sum(row) > 0]
            keep_cols = [
                j for j in range(len(cats)) if sum(row[j] for row in counts) > 0
            ]
            counts = [[counts[i][j] for j in keep_cols] for i in keep_rows]
            row_labels = [row_labels[i] for i in keep_rows]
            col_labels = [col_labels[j] for j in keep_cols]
        return cls(rows=tuple(row_labels), cols=tuple(col_labels), counts=counts)


@dataclass(frozen=True)
class Chi2Result:
    chi2: float
    df: int
    p: float
    expected: tuple[tuple[float, ...], ...]
    residuals: tuple[tuple[float, ...], ...]

    def to_dict(self) -> dict:
        return {
            "chi2": self.chi2,
            "df": self.df,
            "p": self.p,
            "expected": [list(r) for r in self.expected],
            "residuals": [list(r) for r in self.residuals],
        }


def chi_square(table: ContingencyTable) -> Chi2Result:
    """Pearson chi-square test of independence with cell residuals.

    Residual (O - E) / sqrt(E) per cell; signs drive the mosaic-plot
    shading (positive above expected, negative below).
    """
    observed = np.array(table.counts, dtype=float)
    row_tot = observed.sum(axis=1, keepdims=True)
    col_tot = observed.sum(axis=0, keepdims=True)
    grand = observed.sum()
    expected = row_tot @ col_tot / grand
    if (expected <= 0).any():
        raise DegenerateDataError("expected count of zero: drop empty categories")
    chi2 = float(((observed - expected) ** 2 / expected).sum())
    df = (observed.shape[0] - 1) * (observed.shape[1] - 1)
    residuals = (observed - expected) / np.sqrt(expected)
    return Chi2Result(
        chi2=chi2,
        df=df,
        p=chi_square_sf(chi2, df),
        expected=tuple(tuple(float(v) for v in row) for row in expected),
        residuals=tuple(tuple(float(v) for v in row) for row in residuals),
    )


KAPPA_BINS = (
    (0.8, "almost perfect"),
    (0.6, "substantial"),
    (0.4, "moderate"),
    (0.2, "fair"),
    (0.0, "slight"),
)


def landis_koch_label(kappa: float) -> str:
    if kappa <= 0:
        return "poor"
    for cutoff, label in KAPPA_BINS:
        if kappa > cutoff:
            return label
    return "poor"


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    agreement_pct: float
    landis_koch_label: str
    n: int

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "agreement_pct": self.agreement_pct,
            "landis_koch_label": self.landis_koch_label,
            "n": self.n,
        }


def cohens_kappa(rater_a: Sequence, rater_b: Sequence) -> KappaResult:
    """Chance-corrected agreement between two label sequences.

    When both raters are constant and identical, chance agreement is 1 and
    kappa is defined as 1.0 by convention.
    """
    if len(rater_a) != len(rater_b):
        raise InputError("rater sequences must have equal length")
    n = len(rater_a)
    if n == 0:
        raise InputError("rater sequences must be non-empty")
    po = sum(1 for a, b in zip(rater_a, rater_b) if a == b) / n
    labels = sorted(set(rater_a) | set(rater_b), key=repr)
    counts_a = {lab: 0 for lab in labels}
    counts_b = {lab: 0 for lab in labels}
    for a in rater_a:
        counts_a[a] += 1
    for b in rater_b:
        counts_b[b] += 1
    pe = sum((counts_a[lab] / n) * (counts_b[lab] / n) for lab in labels)
    if pe >= 1.0 - 1e-12:
        kappa = 1.0
    else:
        kappa = (po - pe) / (1.0 - pe)
    return KappaResult(
        kappa=kappa,
        agreement_pct=round_half_up(100.0 * po),
        landis_koch_label=landis_koch_label(kappa),
        n=n,
    )


def build_report(
    rows: Sequence[SurveyRow],
    items: Sequence[int] | None = None,
    questions: Sequence[int] | None = None,
) -> dict:
    """Full survey report mirroring each operation's output field-for-field."""
    items = list(items) if items else list(range(1, N_LIKERT_ITEMS + 1))
    questions = list(questions) if questions else [1, 2, 3]
    report: dict = {"likert": {}, "open_questions": {}}
    for item in items:
        summary = likert_summary(rows, item)
        pre = item_values(rows, item, "pre")
        post = item_values(rows, item, "post")
        entry: dict = {"summary": summary}
        try:
            entry["paired_t"] = paired_t(pre, post).to_dict()
        except (InputError, DegenerateDataError) as exc:
            entry["paired_t"] = {"error": exc.message}
        report["likert"][str(item)] = entry
    for question in questions:
        transitions = transition_matrix(rows, question)
        entry = {
            "summary": category_summary(rows, question),
            "transitions": transitions.to_dict(),
        }
        try:
            table = ContingencyTable.from_transitions(transitions)
            entry["chi_square"] = chi_square(table).to_dict()
            entry["chi_square"]["rows"] = list(table.rows)
            entry["chi_square"]["cols"] = list(table.cols)
        except (ValidationError, DegenerateDataError) as exc:
            entry["chi_square"] = {"error": exc.message}
        report["open_questions"][str(question)] = entry
    return report
