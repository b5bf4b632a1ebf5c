"""Regenerate the synthetic survey cohort fixtures under tests/fixtures/.

The cohort is built so that per-phase category counts, the grade split and
the headline question-1 transition flow match the published classroom
study's marginals, while every individual row is synthetic.  Re-running
this script reproduces the committed CSVs byte-for-byte.
"""

from __future__ import annotations

import csv
import random
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

N_PRE = 183
N_POST = 191
N_MATCHED = 183  # every pre respondent also answered post
PRE_G5 = 117  # students s001..s117 are grade 5, the rest grade 8
EXTRA_G5 = 4  # 8 post-only students: 4 per grade

# question 1 (three categories): per-grade pre/post counts
Q1_PRE_G5 = [17, 93, 7]
Q1_PRE_G8 = [11, 44, 11]
# matched-student transition joint; row sums = pre totals [28, 137, 18],
# column sums + the extras below = post totals [31, 101, 59].
Q1_JOINT = [
    [15, 8, 5],
    [13, 85, 39],  # 39 students moved from category 1 to category 2
    [2, 4, 12],
]
Q1_EXTRAS = [1, 4, 3]

# questions 2 and 3 (five categories): phase totals only
Q2_PRE = [105, 42, 1, 30, 5]
Q2_POST = [68, 54, 4, 34, 31]
Q2_EXTRAS = [2, 2, 1, 2, 1]
Q3_PRE = [41, 49, 75, 17, 1]
Q3_POST = [25, 48, 88, 12, 18]
Q3_EXTRAS = [1, 2, 3, 1, 1]

# Likert item 1: positive (>=4) answers go 119/183 -> 174/191, i.e. 65% -> 91%
L1_PRE_DIST = {1: 10, 2: 20, 3: 34, 4: 80, 5: 39}
L1_POST_DIST = {1: 3, 2: 5, 3: 9, 4: 90, 5: 84}


def northwest_joint(row_totals, col_totals):
    rows = list(row_totals)
    cols = list(col_totals)
    joint = [[0] * len(cols) for _ in rows]
    i = j = 0
    while i < len(rows) and j < len(cols):
        take = min(rows[i], cols[j])
        joint[i][j] = take
        rows[i] -= take
        cols[j] -= take
        if rows[i] == 0:
            i += 1
        else:
            j += 1
    return joint


def expand_counts(counts):
    out = []
    for category, count in enumerate(counts):
        out.extend([category] * count)
    return out


def expand_joint(joint):
    pairs = []
    for pre_cat, row in enumerate(joint):
        for post_cat, count in enumerate(row):
            pairs.extend([(pre_cat, post_cat)] * count)
    return pairs


def expand_dist(dist):
    out = []
    for value in sorted(dist):
        out.extend([value] * dist[value])
    return out


def main() -> None:
    rng = random.Random(20240901)
    students = [f"s{i:03d}" for i in range(1, N_MATCHED + 1)]
    extras = [f"x{i:03d}" for i in range(1, N_POST - N_MATCHED + 1)]
    grade = {
        s: (5 if i < PRE_G5 else 8) for i, s in enumerate(students)
    }
    for i, s in enumerate(extras):
        grade[s] = 5 if i < EXTRA_G5 else 8

    # question 1 honors the per-grade pre counts and the published joint
    q1_pre = {}
    g5 = [s for s in students if grade[s] == 5]
    g8 = [s for s in students if grade[s] == 8]
    for bucket, counts in ((g5, Q1_PRE_G5), (g8, Q1_PRE_G8)):
        cats = expand_counts(counts)
        rng.shuffle(cats)
        for s, c in zip(bucket, cats):
            q1_pre[s] = c
    q1_post = {}
    by_pre_cat = {0: [], 1: [], 2: []}
    for s in students:
        by_pre_cat[q1_pre[s]].append(s)
    for pre_cat, row in enumerate(Q1_JOINT):
        pool = by_pre_cat[pre_cat]
        rng.shuffle(pool)
        post_cats = expand_counts(row)
        for s, c in zip(pool, post_cats):
            q1_post[s] = c
    extra_cats = expand_counts(Q1_EXTRAS)
    for s, c in zip(extras, extra_cats):
        q1_post[s] = c

    def phase_cats(pre_totals, post_totals, extra_totals):
        matched_post = [p - e for p, e in zip(post_totals, extra_totals)]
        joint = northwest_joint(pre_totals, matched_post)
        pairs = expand_joint(joint)
        rng.shuffle(pairs)
        pre_map = {s: pre for s, (pre, _) in zip(students, pairs)}
        post_map = {s: post for s, (_, post) in zip(students, pairs)}
        for s, c in zip(extras, expand_counts(extra_totals)):
            post_map[s] = c
        return pre_map, post_map

    q2_pre, q2_post = phase_cats(Q2_PRE, Q2_POST, Q2_EXTRAS)
    q3_pre, q3_post = phase_cats(Q3_PRE, Q3_POST, Q3_EXTRAS)

    l1_pre_vals = expand_dist(L1_PRE_DIST)
    rng.shuffle(l1_pre_vals)
    l1_pre = dict(zip(students, l1_pre_vals))
    l1_post_vals = expand_dist(L1_POST_DIST)
    rng.shuffle(l1_post_vals)
    l1_post = dict(zip(students + extras, l1_post_vals))

    def likert_row(student, phase):
        values = [l1_pre[student] if phase == "pre" else l1_post[student]]
        for item in range(2, 12):
            base = rng.randint(1, 4)
            lift = rng.random() < 0.45 if phase == "post" else rng.random() < 0.15
            values.append(min(5, base + (1 if lift else 0)))
        return values

    header = (
        ["student_id", "phase", "grade"]
        + [f"l{i}" for i in range(1, 12)]
        + ["q1", "q2", "q3"]
    )

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    with open(OUT_DIR / "survey_pre.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in students:
            writer.writerow(
                [s, "pre", grade[s]]
                + likert_row(s, "pre")
                + [q1_pre[s], q2_pre[s], q3_pre[s]]
            )
    with open(OUT_DIR / "survey_post.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in students + extras:
            writer.writerow(
                [s, "post", grade[s]]
                + likert_row(s, "post")
                + [q1_post[s], q2_post[s], q3_post[s]]
            )
    print(f"wrote {OUT_DIR / 'survey_pre.csv'} ({N_PRE} rows)")
    print(f"wrote {OUT_DIR / 'survey_post.csv'} ({N_POST} rows)")


if __name__ == "__main__":
    main()
