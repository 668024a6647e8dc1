"""Labelling stable-group transitions with the eight SGCI change types."""

from __future__ import annotations

from collections import defaultdict

from .model import SGCI, EvolutionEvent

# Highest first. Only addition > split_merge is fixed by the method itself.
DEFAULT_PRIORITY = ("addition", "split_merge", "deletion", "split", "merge")


def _largest(communities):
    return min(communities, key=lambda c: (-len(c), c.sort_key))


def _fan_out_label(a, b, successors, size_ratio):
    if len(successors) < 2:
        return None
    top = _largest(successors)
    if len(top) >= size_ratio * len(b):
        return "deletion"
    if top.id == b.id:
        return None
    return "split"


def _fan_in_label(a, b, predecessors, size_ratio):
    if len(predecessors) < 2:
        return None
    top = _largest(predecessors)
    if len(top) >= size_ratio * len(a):
        return "addition"
    if top.id == a.id:
        return None
    return "merge"


def label_transition(a, b, successors, predecessors, size_ratio=10.0, constancy_delta=3,
                     priority=DEFAULT_PRIORITY) -> str:
    """Event type for the accepted transition ``a -> b``.

    ``successors`` are all accepted successors of ``a`` and ``predecessors``
    all accepted predecessors of ``b`` (each including the other end).
    """
    out_label = _fan_out_label(a, b, successors, size_ratio)
    in_label = _fan_in_label(a, b, predecessors, size_ratio)
    candidates = {out_label, in_label} - {None}
    if out_label and in_label:
        candidates.add("split_merge")
    for label in priority:
        if label in candidates:
            return label
    if abs(len(a) - len(b)) <= constancy_delta:
        return "constancy"
    return "change_size"


def classify_sgci(
    transitions,
    stable,
    prev=(),
    *,
    size_ratio: float = 10.0,
    constancy_delta: int = 3,
    priority=DEFAULT_PRIORITY,
) -> list[EvolutionEvent]:
    """Classify the accepted transitions of one slot pair ``(t, t+1)``.

    Every transition with at least one end in ``stable`` (a set of community
    ids on stable timelines) is labelled; fan-out and fan-in are counted over
    all accepted transitions given. Each stable community of ``prev`` with no
    accepted successor yields a decay.
    """
    if size_ratio <= 0 or constancy_delta < 0:
        raise ValueError("size_ratio must be positive and constancy_delta non-negative")
    successors = defaultdict(list)
    predecessors = defaultdict(list)
    for t in transitions:
        if not t.accepted:
            raise ValueError(f"transition {t.source.id}->{t.target.id} was not accepted")
        successors[t.source.id].append(t.target)
        predecessors[t.target.id].append(t.source)

    events = []
    for t in transitions:
        a, b = t.source, t.target
        if a.id not in stable and b.id not in stable:
            continue
        label = label_transition(
            a, b, successors[a.id], predecessors[b.id], size_ratio, constancy_delta, priority
        )
        events.append(EvolutionEvent(
            SGCI, label, a.slot_index, a.slot_index + 1, (a.id,), (b.id,),
            {"mj": t.mj, "jaccard": t.jaccard},
        ))
    for a in prev:
        if a.id in stable and a.id not in successors:
            events.append(EvolutionEvent(SGCI, "decay", a.slot_index, a.slot_index + 1, (a.id,), ()))
    return sorted(events, key=lambda e: e.sort_key)
