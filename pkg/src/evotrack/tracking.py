"""Linking communities of adjacent slots into timelines and picking out stable groups."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .model import Community

MJ_ONLY = "mj_only"
MJ_AND_JACCARD = "mj_and_jaccard"
CONDITION_MODES = (MJ_ONLY, MJ_AND_JACCARD)


def modified_jaccard(a, b) -> float:
    if not a or not b:
        return 0.0
    inter = len(a & b)
    return max(inter / len(a), inter / len(b))


def jaccard(a, b) -> float:
    union = len(a | b)
    if not union:
        return 0.0
    return len(a & b) / union


@dataclass(frozen=True)
class TransitionCandidate:
    source: Community
    target: Community
    mj: float
    jaccard: float
    intersection: int
    accepted: bool

    @property
    def slot(self) -> int:
        return self.source.slot_index


@dataclass
class GroupTimeline:
    id: str
    states: list = field(default_factory=list)
    stable: bool = False

    @property
    def start(self) -> int:
        return self.states[0].slot_index

    @property
    def end(self) -> int:
        return self.states[-1].slot_index


def _check_pair(prev, nxt):
    slots = {c.slot_index for c in prev}
    next_slots = {c.slot_index for c in nxt}
    ks = {c.k for c in prev} | {c.k for c in nxt}
    if len(slots) > 1 or len(next_slots) > 1:
        raise ValueError("each side of a slot pair must come from a single slot")
    if slots and next_slots and next_slots != {s + 1 for s in slots}:
        raise ValueError(f"slots {sorted(slots)} -> {sorted(next_slots)} are not consecutive")
    if len(ks) > 1:
        raise ValueError(f"communities extracted with different k: {sorted(ks)}")


def match_continuations(
    prev,
    nxt,
    mj_threshold: float = 0.5,
    jaccard_min: float = 0.01,
    condition_mode: str = MJ_AND_JACCARD,
    include_disjoint: bool = False,
) -> list[TransitionCandidate]:
    """Score every (prev, next) community pair and flag accepted continuations.

    Disjoint pairs always score zero and are rejected; they are only
    materialised when ``include_disjoint`` is set, since a dense slot pair
    would otherwise produce a quadratic number of useless rows.
    """
    if condition_mode not in CONDITION_MODES:
        raise ValueError(f"unknown condition mode {condition_mode!r}")
    _check_pair(prev, nxt)
    holders = defaultdict(list)
    for j, b in enumerate(nxt):
        for m in b.members:
            holders[m].append(j)
    out = []
    for a in prev:
        overlap = defaultdict(int)
        for m in a.members:
            for j in holders.get(m, ()):
                overlap[j] += 1
        for j, b in enumerate(nxt):
            inter = overlap.get(j, 0)
            if not inter and not include_disjoint:
                continue
            mj = max(inter / len(a), inter / len(b)) if inter else 0.0
            jac = inter / (len(a) + len(b) - inter)
            ok = mj >= mj_threshold and (condition_mode == MJ_ONLY or jac >= jaccard_min)
            out.append(TransitionCandidate(a, b, mj, jac, inter, ok))
    return out


def _link_priority(t: TransitionCandidate):
    return (-t.mj, -t.intersection, t.source.sort_key, t.target.sort_key)


def assemble_timelines(transitions, communities, stability_min_slots: int = 3) -> list[GroupTimeline]:
    """Thread communities into maximal chains over accepted transitions.

    Per slot pair, accepted links are taken greedily in order of highest
    modified Jaccard, then larger intersection, then member order, skipping
    links whose source already has a successor or whose target already has
    a predecessor. Every community lands in exactly one timeline; links not
    taken stay available to the event classifiers as branches.
    """
    succ = {}
    pred = {}
    for t in sorted((t for t in transitions if t.accepted), key=lambda t: (t.slot, *_link_priority(t))):
        a, b = t.source.id, t.target.id
        if a in succ or b in pred:
            continue
        succ[a] = t.target
        pred[b] = t.source
    chains = []
    for c in sorted(communities, key=lambda c: (c.slot_index, c.sort_key)):
        if c.id in pred:
            continue
        chain = [c]
        while chain[-1].id in succ:
            chain.append(succ[chain[-1].id])
        chains.append(chain)
    k = communities[0].k if communities else 0
    return [
        GroupTimeline(f"k{k}-g{i}", chain, len(chain) >= stability_min_slots)
        for i, chain in enumerate(chains)
    ]


def stable_ids(timelines) -> set:
    return {c.id for tl in timelines if tl.stable for c in tl.states}


def track(communities_by_slot, n_slots: int, **match_kwargs):
    """Match every adjacent slot pair; returns all candidates in slot order."""
    transitions = []
    for t in range(n_slots - 1):
        transitions.extend(
            match_continuations(communities_by_slot.get(t, []), communities_by_slot.get(t + 1, []), **match_kwargs)
        )
    return transitions
