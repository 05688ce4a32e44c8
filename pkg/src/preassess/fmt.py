"""Boundary formatting: exact rationals to display and wire shapes."""

from __future__ import annotations

from fractions import Fraction

__all__ = ["decimal4", "percent", "weight_payload", "recommendation_payload"]


def decimal4(value: "Fraction | float") -> str:
    """Decimal string rounded to at most 4 places, trailing zeros trimmed."""
    text = f"{float(value):.4f}".rstrip("0").rstrip(".")
    return text if text else "0"


def percent(value: Fraction) -> str:
    text = f"{float(value) * 100:.2f}".rstrip("0").rstrip(".")
    return (text if text else "0") + "%"


def weight_payload(value: Fraction) -> dict:
    """Wire shape for one probability weight.

    Carries the exact fraction plus ready-to-render strings so clients never
    have to do arithmetic of their own.
    """
    return {
        "exact": str(value),
        "value": float(value),
        "display": decimal4(value),
        "percent": percent(value),
    }


def recommendation_payload(rec) -> dict:
    """Wire shape for a progress or relearn recommendation."""
    from .probability import Progress, Relearn

    if isinstance(rec, Progress):
        return {
            "kind": "progress",
            "target": rec.target,
            "curriculum_complete": rec.curriculum_complete,
        }
    assert isinstance(rec, Relearn)
    return {
        "kind": "relearn",
        "leaves": list(rec.leaves),
        "weight": weight_payload(rec.weight),
        "per_parent": [
            {"parent": parent, "weight": weight_payload(weight)}
            for parent, weight in rec.per_parent
        ],
    }
