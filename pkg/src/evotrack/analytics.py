"""Descriptive statistics over communities and the SGCI / GED comparison tables."""

from __future__ import annotations

import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .model import GED, GED_TYPES, SGCI, SGCI_TYPES, id_k

SIZE_BINS = list(range(3, 22))  # exact sizes 3..20, then 21+
PERCENT_EDGES = [10.0 * i for i in range(11)]

# Correspondence rows: label, SGCI types, GED types. split_merge and forming have no counterpart.
CORRESPONDENCE = (
    ("merge+addition/merging", ("merge", "addition"), ("merging",)),
    ("split+deletion/splitting", ("split", "deletion"), ("splitting",)),
    ("decay/dissolving", ("decay",), ("dissolving",)),
    ("change_size/growing+shrinking", ("change_size",), ("growing", "shrinking")),
    ("constancy/continuing", ("constancy",), ("continuing",)),
)
FAMILY = {t: row[0] for row in CORRESPONDENCE for t in row[1] + row[2]}

FORMING = "forming"
REJECTED_UNSTABLE = "rejected-unstable"
BELOW_CONTINUATION = "below-continuation-threshold"
CONTINUED_IN_SGCI = "continued-in-sgci"
UNATTRIBUTED = "unattributed"


@dataclass
class HistogramSpec:
    bin_edges: list
    counts: list
    n_slots: int = 1

    def __post_init__(self):
        if len(self.counts) != len(self.bin_edges) - 1:
            raise ValueError("need exactly one count per bin")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative histogram count")

    @property
    def total(self):
        return sum(self.counts)

    def averages(self):
        n = max(self.n_slots, 1)
        return [c / n for c in self.counts]


def _percent_bin(part: int, whole: int) -> int:
    # ten 10%-wide bins, the last one closed at 100%
    return min(10 * part // whole, 9)


def group_size_distribution(communities_by_slot, n_slots: int | None = None) -> HistogramSpec:
    """Community counts per size bin; ``averages()`` gives the per-slot mean."""
    counts = [0] * len(SIZE_BINS)
    for comms in communities_by_slot.values():
        for c in comms:
            counts[min(max(len(c), 3), 21) - 3] += 1
    n = n_slots if n_slots is not None else len(communities_by_slot)
    return HistogramSpec(SIZE_BINS + [float("inf")], counts, n)


def transition_overlap_distribution(transitions, accepted_only: bool = False) -> HistogramSpec:
    """How much of the earlier group (|A∩B|/|A|, in percent) each transition carries over."""
    counts = [0] * 10
    for t in transitions:
        if accepted_only and not t.accepted:
            continue
        counts[_percent_bin(t.intersection, len(t.source))] += 1
    return HistogramSpec(list(PERCENT_EDGES), counts)


def within_slot_overlap(communities_by_slot) -> HistogramSpec:
    """Ordered pairs (A, B) of distinct same-slot communities binned by |A∩B|/|A|."""
    counts = [0] * 10
    for comms in communities_by_slot.values():
        holders = defaultdict(list)
        for j, c in enumerate(comms):
            for m in c.members:
                holders[m].append(j)
        overlapping = 0
        for i, a in enumerate(comms):
            inter = Counter(j for m in a.members for j in holders[m] if j != i)
            for j, n in inter.items():
                counts[_percent_bin(n, len(a))] += 1
            overlapping += len(inter)
        counts[0] += len(comms) * (len(comms) - 1) - overlapping
    return HistogramSpec(list(PERCENT_EDGES), counts)


def membership_counts(stable_by_slot, n_slots: int | None = None, max_groups: int = 3):
    """Users in exactly m stable groups, per slot, with first/second-half summaries.

    Halves are slots [0, n/2) and [n/2, n); std is the population standard
    deviation.
    """
    n = n_slots if n_slots is not None else (max(stable_by_slot, default=-1) + 1)
    rows = []
    for slot in range(n):
        per_user = Counter(u for c in stable_by_slot.get(slot, ()) for u in c.members)
        hist = Counter(per_user.values())
        rows.append([hist.get(m, 0) for m in range(1, max_groups + 1)])
    half = n // 2
    summary = {}
    for m in range(1, max_groups + 1):
        first = [r[m - 1] for r in rows[:half]]
        second = [r[m - 1] for r in rows[half:]]
        summary[m] = {
            "first_mean": statistics.fmean(first) if first else 0.0,
            "first_std": statistics.pstdev(first) if first else 0.0,
            "second_mean": statistics.fmean(second) if second else 0.0,
            "second_std": statistics.pstdev(second) if second else 0.0,
        }
    return {"per_slot": rows, "summary": summary}


def event_counts(events, method: str) -> dict:
    types = SGCI_TYPES if method == SGCI else GED_TYPES
    counts = dict.fromkeys(types, 0)
    for e in events:
        if e.method == method:
            counts[e.event_type] += 1
    return counts


def match_events(left, right):
    """Pair events of two methods describing the same transition.

    Returns (matched pairs, left-only, right-only). Swapping the inputs swaps
    the one-sided lists and mirrors the pairs.
    """
    right_by_key = {}
    for e in right:
        if e.key in right_by_key:
            raise ValueError(f"duplicate event for transition {e.key}")
        right_by_key[e.key] = e
    matched, left_only = [], []
    seen = set()
    for e in left:
        if e.key in seen:
            raise ValueError(f"duplicate event for transition {e.key}")
        seen.add(e.key)
        other = right_by_key.get(e.key)
        if other is None:
            left_only.append(e)
        else:
            matched.append((e, other))
    right_only = [e for e in right if e.key not in seen]
    return matched, left_only, right_only


def _ks(events):
    return {id_k(cid) for e in events for cid in e.from_ids + e.to_ids}


@dataclass
class TrackingContext:
    """What the SGCI side knew, used to explain GED events it did not report."""

    stable: set = field(default_factory=set)
    accepted: set = field(default_factory=set)  # (from id, to id)
    inclusions: dict = field(default_factory=dict)  # (from id, to id) -> (i_forward, i_backward)


@dataclass
class ComparisonReport:
    sgci_counts: dict
    ged_counts: dict
    correspondence: list  # (label, sgci count, ged count)
    matched: list  # (sgci event, ged event)
    ged_misses: list  # (ged event, reason)
    sgci_misses: list  # (sgci event, i_forward, i_backward)

    @property
    def distinct_union(self):
        return len(self.matched) + len(self.ged_misses) + len(self.sgci_misses)

    @property
    def totals(self):
        return {
            "GED": sum(self.ged_counts.values()),
            "SGCI": sum(self.sgci_counts.values()),
            "missed_by_SGCI": len(self.ged_misses),
            "missed_by_GED": len(self.sgci_misses),
            "matched": len(self.matched),
            "matched_same_family": sum(
                1 for s, g in self.matched
                if FAMILY.get(s.event_type) is not None and FAMILY.get(s.event_type) == FAMILY.get(g.event_type)
            ),
            "distinct_union": self.distinct_union,
        }

    def reason_counts(self):
        return dict(sorted(Counter(r for _, r in self.ged_misses).items()))


def _miss_reason(e, ctx: TrackingContext | None):
    if e.event_type == "forming":
        return FORMING
    if ctx is None:
        return UNATTRIBUTED
    ids = e.from_ids + e.to_ids
    if not any(cid in ctx.stable for cid in ids):
        return REJECTED_UNSTABLE
    if e.event_type == "dissolving":
        a = e.from_ids[0]
        if any(src == a for src, _ in ctx.accepted):
            return CONTINUED_IN_SGCI
        return UNATTRIBUTED
    if (e.from_ids[0], e.to_ids[0]) not in ctx.accepted:
        return BELOW_CONTINUATION
    return UNATTRIBUTED


def _recorded_inclusions(e, ctx: TrackingContext | None):
    if ctx is None:
        return (None, None)
    if e.to_ids:
        return ctx.inclusions.get((e.from_ids[0], e.to_ids[0]), (0.0, 0.0))
    a = e.from_ids[0]
    pairs = [v for (src, _), v in ctx.inclusions.items() if src == a]
    return (max((f for f, _ in pairs), default=0.0), max((b for _, b in pairs), default=0.0))


def compare_methods(sgci_events, ged_events, context: TrackingContext | None = None) -> ComparisonReport:
    """Cross-tabulate both methods' events for one k.

    Events pair up when they describe the same transition (slot pair, source
    ids, target ids); the type correspondence is reported through the
    aggregated rows and ``matched_same_family``, not used to veto a pair.
    """
    ks = _ks(sgci_events) | _ks(ged_events)
    if len(ks) > 1:
        raise ValueError(f"event lists mix communities extracted with different k: {sorted(ks)}")
    sgci_counts = event_counts(sgci_events, SGCI)
    ged_counts = event_counts(ged_events, GED)
    correspondence = [
        (label, sum(sgci_counts[t] for t in s_types), sum(ged_counts[t] for t in g_types))
        for label, s_types, g_types in CORRESPONDENCE
    ]
    matched, sgci_only, ged_only = match_events(sgci_events, ged_events)
    ged_misses = [(e, _miss_reason(e, context)) for e in ged_only]
    sgci_misses = [(e, *_recorded_inclusions(e, context)) for e in sgci_only]
    return ComparisonReport(sgci_counts, ged_counts, correspondence, matched, ged_misses, sgci_misses)
