"""Core records shared by every pipeline stage."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

SGCI = "SGCI"
GED = "GED"

SGCI_TYPES = (
    "split",
    "deletion",
    "merge",
    "addition",
    "split_merge",
    "decay",
    "constancy",
    "change_size",
)
GED_TYPES = (
    "continuing",
    "growing",
    "shrinking",
    "merging",
    "splitting",
    "dissolving",
    "forming",
)
EVENT_TYPES = {SGCI: SGCI_TYPES, GED: GED_TYPES}


@dataclass(frozen=True)
class InteractionRecord:
    """One comment written by ``source`` under a post authored by ``target``."""

    source: str
    target: str
    timestamp: int


@dataclass
class SnapshotGraph:
    slot_index: int
    nodes: set = field(default_factory=set)
    edges: dict = field(default_factory=dict)  # (source, target) -> weight

    def successors(self):
        out = {}
        for (u, v) in self.edges:
            out.setdefault(u, set()).add(v)
        return out


@dataclass(frozen=True)
class Community:
    id: str
    slot_index: int
    k: int
    members: frozenset

    @property
    def sort_key(self):
        return tuple(sorted(self.members))

    def __len__(self):
        return len(self.members)


def community_id(slot_index: int, k: int, rank: int) -> str:
    return f"s{slot_index}-k{k}-c{rank}"


def make_communities(member_sets, slot_index: int, k: int) -> list[Community]:
    """Wrap raw member sets as communities, ranked by sorted member list."""
    ordered = sorted({tuple(sorted(m)) for m in member_sets})
    return [
        Community(community_id(slot_index, k, rank), slot_index, k, frozenset(members))
        for rank, members in enumerate(ordered)
    ]


@dataclass(frozen=True)
class EvolutionEvent:
    method: str
    event_type: str
    slot_from: int
    slot_to: int
    from_ids: tuple
    to_ids: tuple
    measures: Mapping[str, float] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.event_type not in EVENT_TYPES.get(self.method, ()):
            raise ValueError(f"{self.event_type!r} is not a {self.method} event type")

    @property
    def key(self):
        """Transition identity used to pair events across methods."""
        return (self.slot_from, self.slot_to, self.from_ids, self.to_ids)

    @property
    def sort_key(self):
        return (self.slot_from, self.from_ids, self.to_ids, self.event_type)


def id_k(cid: str) -> int:
    """The extraction parameter encoded in a community id."""
    return int(cid.split("-")[1][1:])


def id_slot(cid: str) -> int:
    return int(cid.split("-")[0][1:])
