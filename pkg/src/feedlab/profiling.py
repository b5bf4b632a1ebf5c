"""Turn engagement cells into normalized topic-affinity profiles.

An image's score is split evenly across its topic labels, so multi-label
images do not inflate totals.  Affinities are normalized to sum to 1, which
makes profiles scale-invariant: only ``total_engagement`` remembers how much
a user interacted, the affinity shares say what they interacted with.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import UnknownReferenceError
from .model import AffinityProfile, EngagementCell, Manifest


def compute_profile(
    user: str, cells: Iterable[EngagementCell], manifest: Manifest
) -> AffinityProfile:
    """Normalized topic affinities of one user from their engagement cells."""
    topics_by_image = {img.id: img.topics for img in manifest.images}
    raw: dict[str, float] = {}
    total = 0.0
    for cell in sorted(cells, key=lambda c: c.image):
        topics = topics_by_image.get(cell.image)
        if topics is None:
            raise UnknownReferenceError(f"unknown image {cell.image!r}")
        total += cell.score
        credit = cell.score / len(topics)
        for topic in topics:
            raw[topic] = raw.get(topic, 0.0) + credit
    if total <= 0:
        return AffinityProfile(user=user, affinities={}, total_engagement=0.0)
    norm = sum(raw[t] for t in sorted(raw))
    affinities = {t: raw[t] / norm for t in sorted(raw)}
    return AffinityProfile(user=user, affinities=affinities, total_engagement=total)


def word_cloud(profile: AffinityProfile, max_terms: int) -> list[tuple[str, float]]:
    """Top ``max_terms`` topics by affinity, ties broken by label ascending."""
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    ranked = sorted(profile.affinities.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:max_terms]


def cosine_similarity(p: AffinityProfile, q: AffinityProfile) -> float:
    """Cosine of two affinity vectors over the union of their topics.

    Zero when either vector is empty, so brand-new users never produce NaN.
    All affinities are non-negative, hence the result lies in [0, 1].
    """
    if not p.affinities or not q.affinities:
        return 0.0
    dot = 0.0
    for topic in sorted(p.affinities):
        qv = q.affinities.get(topic)
        if qv is not None:
            dot += p.affinities[topic] * qv
    norm_p = math.sqrt(sum(v * v for _, v in sorted(p.affinities.items())))
    norm_q = math.sqrt(sum(v * v for _, v in sorted(q.affinities.items())))
    if norm_p == 0.0 or norm_q == 0.0:
        return 0.0
    return min(dot / (norm_p * norm_q), 1.0)
