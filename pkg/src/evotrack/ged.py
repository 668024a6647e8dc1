"""Group evolution discovery: inclusion measure and per-pair event rules."""

from __future__ import annotations

from collections import defaultdict

from .model import GED, EvolutionEvent

IMPORTANCE_METRICS = ("uniform", "in_degree", "total_degree")


def node_importance(graph, community, metric: str = "uniform") -> dict:
    """Importance of each member within ``community``.

    Degrees are counted on the subgraph induced by the members. When that
    subgraph has no edges the metric falls back to uniform.
    """
    if metric not in IMPORTANCE_METRICS:
        raise ValueError(f"unknown importance metric {metric!r}")
    members = community.members
    missing = members - graph.nodes if graph is not None else set()
    if missing:
        raise ValueError(f"members {sorted(missing)[:5]} of {community.id} are not in slot {graph.slot_index}")
    if metric == "uniform":
        return dict.fromkeys(members, 1.0)
    values = dict.fromkeys(members, 0.0)
    for u in members:
        for v in members:
            if (u, v) in graph.edges:
                values[v] += 1.0
                if metric == "total_degree":
                    values[u] += 1.0
    if not any(values.values()):
        return dict.fromkeys(members, 1.0)
    return values


def inclusion(g1, g2, ni) -> float:
    """Share of ``g1`` contained in ``g2``, by head count times by importance."""
    a = g1.members if hasattr(g1, "members") else g1
    b = g2.members if hasattr(g2, "members") else g2
    if not a:
        raise ValueError("inclusion of an empty group is undefined")
    common = a & b
    if not common:
        return 0.0
    total = sum(ni[x] for x in a)
    if total == 0:
        return 0.0
    return (len(common) / len(a)) * (sum(ni[x] for x in common) / total)


def ged_rule(i_forward, i_backward, size_from, size_to, alpha=0.5, beta=0.5, continuity_delta=0):
    """Event type for one (G1, G2) pair, or None."""
    if i_forward >= alpha and i_backward >= beta:
        if abs(size_to - size_from) <= continuity_delta:
            return "continuing"
        return "growing" if size_to > size_from else "shrinking"
    if i_forward < alpha and i_backward >= beta and size_from >= size_to:
        return "splitting"
    if i_forward >= alpha and i_backward < beta and size_from <= size_to:
        return "merging"
    return None


def pair_inclusions(prev, nxt, importance) -> dict:
    """Both inclusions for every overlapping pair, keyed by (from id, to id).

    ``importance`` maps community id to its importance values.
    """
    holders = defaultdict(list)
    for b in nxt:
        for m in b.members:
            holders[m].append(b)
    out = {}
    for a in prev:
        touched = {b.id: b for m in a.members for b in holders.get(m, ())}
        for bid in sorted(touched):
            b = touched[bid]
            out[(a.id, b.id)] = (inclusion(a, b, importance[a.id]), inclusion(b, a, importance[b.id]))
    return out


def classify_ged(
    prev,
    nxt,
    graphs=None,
    alpha: float = 0.5,
    beta: float = 0.5,
    metric: str = "uniform",
    continuity_delta: int = 0,
    importance=None,
) -> list[EvolutionEvent]:
    """Events between slot ``t`` (``prev``) and ``t+1`` (``nxt``).

    ``graphs`` maps slot index to snapshot and is only needed for
    degree-based importance. Disjoint pairs have zero inclusions and never
    match a rule, so only overlapping pairs are scored.
    """
    if not (0 < alpha <= 1 and 0 < beta <= 1):
        raise ValueError(f"alpha and beta must lie in (0, 1], got {alpha}, {beta}")
    if importance is None:
        importance = {}
        for c in list(prev) + list(nxt):
            g = graphs[c.slot_index] if graphs is not None else None
            if g is None and metric != "uniform":
                raise ValueError(f"metric {metric!r} needs the snapshot of slot {c.slot_index}")
            importance[c.id] = node_importance(g, c, metric)
    by_id = {c.id: c for c in list(prev) + list(nxt)}
    slot = prev[0].slot_index if prev else (nxt[0].slot_index - 1 if nxt else 0)

    events = []
    matched = set()
    for (aid, bid), (fwd, bwd) in pair_inclusions(prev, nxt, importance).items():
        a, b = by_id[aid], by_id[bid]
        label = ged_rule(fwd, bwd, len(a), len(b), alpha, beta, continuity_delta)
        if label is None:
            continue
        matched.update((aid, bid))
        events.append(EvolutionEvent(
            GED, label, slot, slot + 1, (aid,), (bid,), {"i_forward": fwd, "i_backward": bwd}
        ))
    for a in prev:
        if a.id not in matched:
            events.append(EvolutionEvent(GED, "dissolving", slot, slot + 1, (a.id,), ()))
    for b in nxt:
        if b.id not in matched:
            events.append(EvolutionEvent(GED, "forming", slot, slot + 1, (), (b.id,)))
    return sorted(events, key=lambda e: e.sort_key)
