"""Precision, recall, F-score and Jaccard accuracy against ground-truth blocks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .detect import CommunityAssignment
from .graph import GroundTruth

CSV_FIELDS = ["n_c", "r", "p", "q", "seed", "aggregate_f", "aggregate_jaccard", "rounds", "messages"]


def _as_set(a) -> set:
    return set(np.asarray(a).ravel().tolist()) if not isinstance(a, set) else a


def precision_recall(detected, truth) -> tuple[float, float]:
    d, t = _as_set(detected), _as_set(truth)
    if not d:
        raise ValueError("precision is undefined for an empty detected set")
    if not t:
        raise ValueError("recall is undefined for an empty ground-truth set")
    hit = len(d & t)
    return hit / len(d), hit / len(t)


def f_score(detected, truth) -> float:
    prec, rec = precision_recall(detected, truth)
    if prec + rec == 0:
        return 0.0
    return 2 * prec * rec / (prec + rec)


def jaccard(a, b) -> float:
    a, b = _as_set(a), _as_set(b)
    union = a | b
    if not union:
        raise ValueError("jaccard of two empty sets is undefined")
    return len(a & b) / len(union)


@dataclass
class ScoreReport:
    per_community: list[dict]
    aggregate_f: float
    aggregate_jaccard: float


def evaluate_assignment(assignment: CommunityAssignment, truth: GroundTruth,
                        view: str = "detected") -> ScoreReport:
    """Score each community against the ground-truth block of its seed vertex.

    ``view="detected"`` scores the set each seed's run returned (the default,
    falling back to ``communities`` when no raw detections are stored);
    ``view="assigned"`` scores the disjoint pool-intersected communities.
    """
    if view not in ("detected", "assigned"):
        raise ValueError(f"unknown view {view!r}")
    sets = assignment.detected if view == "detected" and assignment.detected else assignment.communities
    rows = []
    for members, s in zip(sets, assignment.seeds):
        block = truth.block_of(s)
        prec, rec = precision_recall(members, block)
        rows.append({
            "seed": int(s),
            "size": int(len(members)),
            "precision": prec,
            "recall": rec,
            "f_score": 0.0 if prec + rec == 0 else 2 * prec * rec / (prec + rec),
            "jaccard": jaccard(members, block),
        })
    if not rows:
        return ScoreReport([], 0.0, 0.0)
    return ScoreReport(
        rows,
        float(np.mean([r["f_score"] for r in rows])),
        float(np.mean([r["jaccard"] for r in rows])),
    )
