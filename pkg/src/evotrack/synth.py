"""Synthetic interaction logs with planted group timelines, plus their ground-truth events.

A scenario fixes, per slot, the member set of every planted group. Rendering
turns each group into a transitive tournament of comments (every ordered pair
earlier -> later in a per-slot shuffled order, ``min_edge_weight`` times), so
CPM recovers each group exactly as long as groups sharing a slot overlap in
fewer than ``k - 1`` members. ``expected_events`` applies both rule sets
directly to the planted sets and is kept independent of the graph pipeline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations

from .ingest import DAY
from .model import GED, SGCI, EvolutionEvent, InteractionRecord, community_id


class ScenarioError(ValueError):
    pass


@dataclass
class PlantedGroup:
    name: str
    members: dict  # slot -> frozenset of user ids


@dataclass
class PlantedEvent:
    method: str
    event_type: str
    slot: int  # transition slot -> slot + 1
    sources: tuple = ()
    targets: tuple = ()


@dataclass
class ScenarioScript:
    slots: int
    groups: list = field(default_factory=list)
    events: list = field(default_factory=list)
    seed: int = 0
    k: int = 3
    min_edge_weight: int = 2
    noise: float = 0.0
    background_users: int = 0
    origin: int = 0
    slot_days: float = 30
    slot_step_days: float = 30
    name: str = ""

    def members_at(self, slot):
        return [(g.name, g.members[slot]) for g in self.groups if slot in g.members]

    def validate(self):
        for g in self.groups:
            for slot, members in g.members.items():
                if not 0 <= slot < self.slots:
                    raise ScenarioError(f"group {g.name}: slot {slot} outside 0..{self.slots - 1}")
                if len(members) < self.k:
                    raise ScenarioError(
                        f"group {g.name} has {len(members)} members in slot {slot}, fewer than k={self.k}"
                    )
        for slot in range(self.slots):
            for (n1, m1), (n2, m2) in combinations(self.members_at(slot), 2):
                if len(m1 & m2) >= self.k - 1:
                    raise ScenarioError(
                        f"groups {n1} and {n2} share {len(m1 & m2)} members in slot {slot}; "
                        f"they would percolate into one community at k={self.k}"
                    )
        return self

    def to_dict(self):
        return {
            "name": self.name,
            "seed": self.seed,
            "slots": self.slots,
            "k": self.k,
            "min_edge_weight": self.min_edge_weight,
            "noise": self.noise,
            "background_users": self.background_users,
            "origin": self.origin,
            "slot_days": self.slot_days,
            "slot_step_days": self.slot_step_days,
            "groups": [
                {"name": g.name, "members": {str(s): sorted(m) for s, m in sorted(g.members.items())}}
                for g in self.groups
            ],
            "events": [
                {"method": e.method, "type": e.event_type, "slot": e.slot,
                 "from": list(e.sources), "to": list(e.targets)}
                for e in self.events
            ],
        }

    @classmethod
    def from_dict(cls, data):
        groups = [
            PlantedGroup(g["name"], {int(s): frozenset(m) for s, m in g["members"].items()})
            for g in data.get("groups", [])
        ]
        events = [
            PlantedEvent(e["method"], e["type"], int(e["slot"]), tuple(e.get("from", ())), tuple(e.get("to", ())))
            for e in data.get("events", [])
        ]
        keys = ("seed", "k", "min_edge_weight", "noise", "background_users", "origin",
                "slot_days", "slot_step_days", "name")
        return cls(slots=int(data["slots"]), groups=groups, events=events,
                   **{key: data[key] for key in keys if key in data})

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _window(script, slot):
    start = script.origin + int(round(slot * script.slot_step_days * DAY))
    return start, start + int(round(script.slot_days * DAY))


def all_users(script):
    users = {u for g in script.groups for m in g.members.values() for u in m}
    users.update(f"b{i:05d}" for i in range(script.background_users))
    return sorted(users)


def render_slot(script, slot, users=None):
    rng = random.Random(f"{script.seed}:{slot}")
    start, end = _window(script, slot)
    records = []
    placed = script.members_at(slot)
    for _, members in placed:
        order = sorted(members)
        rng.shuffle(order)
        for i, u in enumerate(order):
            for v in order[i + 1:]:
                for _ in range(script.min_edge_weight):
                    records.append(InteractionRecord(u, v, rng.randrange(start, end)))
    if script.noise > 0:
        users = users if users is not None else all_users(script)
        membership = {}
        for gi, (_, members) in enumerate(placed):
            for u in members:
                membership.setdefault(u, set()).add(gi)
        n = len(users)
        n_noise = round(script.noise * n * (n - 1))
        for _ in range(n_noise):
            u, v = rng.sample(users, 2)
            if membership.get(u, set()) & membership.get(v, set()):
                continue
            for _ in range(rng.randint(1, script.min_edge_weight)):
                records.append(InteractionRecord(u, v, rng.randrange(start, end)))
    return records


def render_scenario(script: ScenarioScript) -> list[InteractionRecord]:
    """Comment log realising the script; identical seeds give identical logs."""
    script.validate()
    users = all_users(script) if script.noise > 0 else None
    records = []
    for slot in range(script.slots):
        records.extend(render_slot(script, slot, users))
    records.sort(key=lambda r: (r.timestamp, r.source, r.target))
    return records


def write_interactions(records, fh):
    fh.write("source,target,timestamp\n")
    for r in records:
        fh.write(f"{r.source},{r.target},{r.timestamp}\n")


# ---------------------------------------------------------------- oracle

def planted_communities(script):
    """Per slot: list of (id, member set, group names), ranked like the pipeline ranks them."""
    out = {}
    for slot in range(script.slots):
        by_members = {}
        for name, members in script.members_at(slot):
            by_members.setdefault(tuple(sorted(members)), []).append(name)
        out[slot] = [
            (community_id(slot, script.k, rank), frozenset(key), tuple(by_members[key]))
            for rank, key in enumerate(sorted(by_members))
        ]
    return out


def expected_events(
    script: ScenarioScript,
    mj_threshold=0.5,
    jaccard_min=0.01,
    condition_mode="mj_and_jaccard",
    stability_min_slots=3,
    size_ratio=10.0,
    constancy_delta=3,
    alpha=0.5,
    beta=0.5,
    continuity_delta=0,
):
    """Ground truth for both methods from the planted sets alone (uniform importance)."""
    comms = planted_communities(script)
    size = {cid: len(m) for slot in comms.values() for cid, m, _ in slot}
    order = {cid: tuple(sorted(m)) for slot in comms.values() for cid, m, _ in slot}

    accepted = {}  # slot -> list of (a, b, mj, jac, inter)
    for t in range(script.slots - 1):
        rows = []
        for a, ma, _ in comms[t]:
            for b, mb, _ in comms[t + 1]:
                inter = len(ma & mb)
                if inter == 0:
                    continue
                mj = max(inter / len(ma), inter / len(mb))
                jac = inter / len(ma | mb)
                if mj >= mj_threshold and (condition_mode == "mj_only" or jac >= jaccard_min):
                    rows.append((a, b, mj, jac, inter))
        accepted[t] = rows

    # timelines: greedy one-to-one linking per slot pair
    nxt, prv = {}, {}
    for t in range(script.slots - 1):
        for a, b, mj, _, inter in sorted(accepted[t], key=lambda r: (-r[2], -r[4], order[r[0]], order[r[1]])):
            if a not in nxt and b not in prv:
                nxt[a], prv[b] = b, a
    stable = set()
    for t in range(script.slots):
        for cid, _, _ in comms[t]:
            if cid in prv:
                continue
            chain = [cid]
            while chain[-1] in nxt:
                chain.append(nxt[chain[-1]])
            if len(chain) >= stability_min_slots:
                stable.update(chain)

    def biggest(ids):
        return min(ids, key=lambda c: (-size[c], order[c]))

    sgci = []
    for t in range(script.slots - 1):
        succ, pred = {}, {}
        for a, b, *_ in accepted[t]:
            succ.setdefault(a, []).append(b)
            pred.setdefault(b, []).append(a)
        for a, b, mj, jac, _ in accepted[t]:
            if a not in stable and b not in stable:
                continue
            labels = set()
            if len(succ[a]) > 1:
                top = biggest(succ[a])
                if size[top] >= size_ratio * size[b]:
                    labels.add("deletion")
                elif top != b:
                    labels.add("split")
            if len(pred[b]) > 1:
                top = biggest(pred[b])
                if size[top] >= size_ratio * size[a]:
                    labels.add("addition")
                elif top != a:
                    labels.add("merge")
            if "addition" in labels:
                label = "addition"
            elif len(labels) == 2:
                label = "split_merge"
            elif labels:
                label = labels.pop()
            elif abs(size[a] - size[b]) <= constancy_delta:
                label = "constancy"
            else:
                label = "change_size"
            sgci.append(EvolutionEvent(SGCI, label, t, t + 1, (a,), (b,), {"mj": mj, "jaccard": jac}))
        for a, _, _ in comms[t]:
            if a in stable and a not in succ:
                sgci.append(EvolutionEvent(SGCI, "decay", t, t + 1, (a,), ()))

    ged = []
    for t in range(script.slots - 1):
        hit = set()
        for a, ma, _ in comms[t]:
            for b, mb, _ in comms[t + 1]:
                inter = len(ma & mb)
                if not inter:
                    continue
                fwd = (inter / len(ma)) * (inter / len(ma))
                bwd = (inter / len(mb)) * (inter / len(mb))
                label = None
                if fwd >= alpha and bwd >= beta:
                    if abs(len(mb) - len(ma)) <= continuity_delta:
                        label = "continuing"
                    else:
                        label = "growing" if len(mb) > len(ma) else "shrinking"
                elif fwd < alpha and bwd >= beta and len(ma) >= len(mb):
                    label = "splitting"
                elif fwd >= alpha and bwd < beta and len(ma) <= len(mb):
                    label = "merging"
                if label:
                    hit.update((a, b))
                    ged.append(EvolutionEvent(GED, label, t, t + 1, (a,), (b,),
                                              {"i_forward": fwd, "i_backward": bwd}))
        ged += [EvolutionEvent(GED, "dissolving", t, t + 1, (a,), ()) for a, _, _ in comms[t] if a not in hit]
        ged += [EvolutionEvent(GED, "forming", t, t + 1, (), (b,)) for b, _, _ in comms[t + 1] if b not in hit]

    return {SGCI: sorted(sgci, key=_event_order), GED: sorted(ged, key=_event_order)}


def _event_order(e):
    return (e.slot_from, e.from_ids, e.to_ids, e.event_type)


def resolve_planted_event(script, event: PlantedEvent):
    """Translate a scripted event over group names into community ids."""
    comms = planted_communities(script)

    def ids(slot, names):
        out = []
        for name in names:
            found = [cid for cid, _, owners in comms[slot] if name in owners]
            if not found:
                raise ScenarioError(f"group {name!r} is not present in slot {slot}")
            out.append(found[0])
        return tuple(sorted(out))

    return (event.method, event.event_type, event.slot, event.slot + 1,
            ids(event.slot, event.sources), ids(event.slot + 1, event.targets))


# ---------------------------------------------------------------- random scripts

def random_script(
    seed: int = 0,
    users: int = 5000,
    slots: int = 20,
    groups_per_slot: int = 180,
    min_size: int = 5,
    max_size: int = 12,
    noise: float = 0.0,
    k: int = 3,
    min_edge_weight: int = 2,
    slot_days: float = 30,
    slot_step_days: float = 15,
) -> ScenarioScript:
    """Evolving node-disjoint groups with random continue/grow/shrink/split/merge/death/birth moves."""
    rng = random.Random(seed)
    pool = [f"u{i:05d}" for i in range(users)]
    groups = []
    active = []  # (group, members)
    counter = 0

    def new_group(members, slot):
        nonlocal counter
        g = PlantedGroup(f"g{counter}", {slot: frozenset(members)})
        counter += 1
        groups.append(g)
        return g

    for slot in range(slots):
        taken = set()
        nxt = []
        if slot > 0:
            rng.shuffle(active)
            i = 0
            while i < len(active):
                g, members = active[i]
                roll = rng.random()
                if roll < 0.08:
                    pass  # death
                elif roll < 0.16 and len(members) >= 2 * min_size:
                    cut = len(members) // 2
                    ordered = sorted(members)
                    for part in (ordered[:cut], ordered[cut:]):
                        if not taken & set(part):
                            nxt.append((new_group(part, slot), set(part)))
                            taken.update(part)
                elif roll < 0.24 and i + 1 < len(active) and len(members) + len(active[i + 1][1]) <= max_size:
                    merged = (members | active[i + 1][1]) - taken
                    i += 1
                    if len(merged) >= min_size:
                        g.members[slot] = frozenset(merged)
                        nxt.append((g, set(merged)))
                        taken.update(merged)
                else:
                    members = set(members) - taken
                    if members and rng.random() < 0.5:
                        members.discard(rng.choice(sorted(members)))
                    while rng.random() < 0.4 and len(members) < max_size:
                        u = rng.choice(pool)
                        if u not in taken:
                            members.add(u)
                    if len(members) >= min_size:
                        g.members[slot] = frozenset(members)
                        nxt.append((g, members))
                        taken.update(members)
                i += 1
        while len(nxt) < groups_per_slot:
            size = rng.randint(min_size, max_size)
            members = set()
            for _ in range(size * 3):
                u = rng.choice(pool)
                if u not in taken:
                    members.add(u)
                if len(members) == size:
                    break
            if len(members) < min_size:
                break
            nxt.append((new_group(members, slot), members))
            taken.update(members)
        active = nxt
    used = {u for g in groups for m in g.members.values() for u in m}
    return ScenarioScript(
        slots=slots, groups=groups, seed=seed, k=k, min_edge_weight=min_edge_weight, noise=noise,
        background_users=max(0, users - len(used)), slot_days=slot_days,
        slot_step_days=slot_step_days, name=f"random-{seed}",
    )
