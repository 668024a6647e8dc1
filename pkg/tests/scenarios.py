"""Hand-built scenario suite.

Each script declares the events worked out by hand for it; tests check that
the synthetic oracle reproduces them and that the graph pipeline reproduces
the oracle.
"""

from evotrack.synth import PlantedEvent, PlantedGroup, ScenarioScript


def users(prefix, lo, hi):
    return frozenset(f"{prefix}{i:02d}" for i in range(lo, hi))


def group(name, **slots):
    """group("A", s0=members, s1=members, ...)"""
    return PlantedGroup(name, {int(key[1:]): frozenset(m) for key, m in slots.items()})


def steady(name, members, slots):
    return PlantedGroup(name, {s: frozenset(members) for s in slots})


def ev(method, event_type, slot, sources=(), targets=()):
    def names(x):
        return (x,) if isinstance(x, str) else tuple(x)
    return PlantedEvent(method, event_type, slot, names(sources), names(targets))


def constancy_decay():
    return ScenarioScript(
        name="constancy_decay", slots=5, seed=1,
        groups=[steady("G", users("u", 0, 5), range(4))],
        events=[
            ev("SGCI", "constancy", 0, "G", "G"),
            ev("SGCI", "constancy", 1, "G", "G"),
            ev("SGCI", "constancy", 2, "G", "G"),
            ev("SGCI", "decay", 3, "G"),
            ev("GED", "continuing", 0, "G", "G"),
            ev("GED", "dissolving", 3, "G"),
        ],
    )


def change_size():
    return ScenarioScript(
        name="change_size", slots=4, seed=2,
        groups=[group("G", s0=users("u", 0, 10), s1=users("u", 0, 14), s2=users("u", 0, 10), s3=users("u", 0, 10))],
        events=[
            ev("SGCI", "change_size", 0, "G", "G"),
            ev("SGCI", "change_size", 1, "G", "G"),
            ev("SGCI", "constancy", 2, "G", "G"),
            ev("GED", "growing", 0, "G", "G"),     # (10/14)^2 = 0.51
            ev("GED", "shrinking", 1, "G", "G"),
            ev("GED", "continuing", 2, "G", "G"),
        ],
    )


def split_even():
    # equal halves: the lexicographically first child counts as the largest
    a = users("u", 0, 12)
    return ScenarioScript(
        name="split_even", slots=4, seed=3,
        groups=[steady("A", a, range(3)), group("B1", s3=users("u", 0, 6)), group("B2", s3=users("u", 6, 12))],
        events=[
            ev("SGCI", "change_size", 2, "A", "B1"),
            ev("SGCI", "split", 2, "A", "B2"),
            ev("GED", "splitting", 2, "A", "B1"),
            ev("GED", "splitting", 2, "A", "B2"),
        ],
    )


def split_six():
    # {a..f} over three slots, then {a,b,c} and {d,e,f}
    return ScenarioScript(
        name="split_six", slots=4, seed=4,
        groups=[steady("A", set("abcdef"), range(3)), group("L", s3=set("abc")), group("R", s3=set("def"))],
        events=[
            ev("SGCI", "constancy", 2, "A", "L"),  # |6 - 3| = 3
            ev("SGCI", "split", 2, "A", "R"),
            ev("GED", "splitting", 2, "A", "L"),
            ev("GED", "splitting", 2, "A", "R"),
        ],
    )


def deletion():
    # 50 members -> 48 + a 4-member fragment sharing 2 of them
    return ScenarioScript(
        name="deletion", slots=4, seed=5,
        groups=[
            steady("A", users("u", 0, 50), range(3)),
            group("B1", s3=users("u", 0, 48)),
            group("B2", s3={"u48", "u49", "x00", "x01"}),
        ],
        events=[
            ev("SGCI", "constancy", 2, "A", "B1"),
            ev("SGCI", "deletion", 2, "A", "B2"),  # 48 / 4 = 12
            ev("GED", "shrinking", 2, "A", "B1"),
            ev("GED", "forming", 2, (), "B2"),
        ],
    )


def merge():
    a1, a2 = users("a", 0, 8), users("b", 0, 6)
    return ScenarioScript(
        name="merge", slots=4, seed=6,
        groups=[steady("A1", a1, range(3)), steady("A2", a2, range(3)), group("B", s3=a1 | a2)],
        events=[
            ev("SGCI", "change_size", 2, "A1", "B"),
            ev("SGCI", "merge", 2, "A2", "B"),
            ev("GED", "merging", 2, "A1", "B"),
            ev("GED", "merging", 2, "A2", "B"),
        ],
    )


def addition():
    a1, a2 = users("a", 0, 40), users("b", 0, 3)
    return ScenarioScript(
        name="addition", slots=4, seed=7,
        groups=[steady("A1", a1, range(3)), steady("A2", a2, range(3)), group("B", s3=a1 | a2)],
        events=[
            ev("SGCI", "constancy", 2, "A1", "B"),
            ev("SGCI", "addition", 2, "A2", "B"),  # 40 / 3 >= 10
            ev("GED", "growing", 2, "A1", "B"),
            ev("GED", "merging", 2, "A2", "B"),
        ],
    )


def split_merge():
    a = users("a", 0, 8)
    c = users("c", 0, 12)
    return ScenarioScript(
        name="split_merge", slots=4, seed=8,
        groups=[
            steady("A", a, range(3)),
            steady("C", c, range(3)),
            group("D", s3=users("a", 0, 4) | users("n", 0, 14)),
            group("B", s3=users("a", 4, 8) | c),
        ],
        events=[
            ev("SGCI", "split_merge", 2, "A", "B"),
            ev("SGCI", "change_size", 2, "A", "D"),
            ev("SGCI", "change_size", 2, "C", "B"),
            ev("GED", "growing", 2, "C", "B"),
            ev("GED", "dissolving", 2, "A"),
            ev("GED", "forming", 2, (), "D"),
        ],
    )


def addition_priority():
    # the small group's edge is both a split branch and a 10x-smaller merge input
    x = {"x0", "x1", "x2"}
    big = users("u", 0, 30)
    return ScenarioScript(
        name="addition_priority", slots=4, seed=9,
        groups=[
            steady("A", x, range(3)),
            steady("P", big, range(3)),
            group("B", s3=big | {"x0", "x1"}),
            group("Q", s3=users("v", 0, 40) | {"x1", "x2"}),
        ],
        events=[
            ev("SGCI", "addition", 2, "A", "B"),
            ev("SGCI", "change_size", 2, "A", "Q"),
            ev("SGCI", "constancy", 2, "P", "B"),
            ev("GED", "growing", 2, "P", "B"),
            ev("GED", "dissolving", 2, "A"),
            ev("GED", "forming", 2, (), "Q"),
        ],
    )


def short_lived():
    return ScenarioScript(
        name="short_lived", slots=4, seed=10,
        groups=[steady("S", users("s", 0, 6), range(4)), steady("T", users("t", 0, 5), (1, 2))],
        events=[
            ev("SGCI", "constancy", 0, "S", "S"),
            ev("GED", "forming", 0, (), "T"),
            ev("GED", "continuing", 1, "T", "T"),
            ev("GED", "dissolving", 2, "T"),
        ],
    )


def short_split():
    # a group living one slot splits into two fragments that vanish at once
    return ScenarioScript(
        name="short_split", slots=4, seed=11,
        groups=[
            steady("S", users("s", 0, 7), range(4)),
            group("T", s1=users("t", 0, 8)),
            group("T1", s2=users("t", 0, 4)),
            group("T2", s2=users("t", 4, 8)),
        ],
        events=[
            ev("GED", "forming", 0, (), "T"),
            ev("GED", "splitting", 1, "T", "T1"),
            ev("GED", "splitting", 1, "T", "T2"),
            ev("GED", "dissolving", 2, "T1"),
            ev("SGCI", "constancy", 2, "S", "S"),
        ],
    )


def split_k4():
    a = users("u", 0, 12)
    return ScenarioScript(
        name="split_k4", slots=4, seed=12, k=4,
        groups=[steady("A", a, range(3)), group("B1", s3=users("u", 0, 6)), group("B2", s3=users("u", 6, 12))],
        events=[
            ev("SGCI", "change_size", 2, "A", "B1"),
            ev("SGCI", "split", 2, "A", "B2"),
            ev("GED", "splitting", 2, "A", "B2"),
        ],
    )


def busy():
    g1 = users("g", 0, 10)
    g2 = users("h", 0, 6)
    g3 = {"g09", "m01", "m02", "m03"}  # shares one member with G1
    g4 = users("n", 0, 6)
    return ScenarioScript(
        name="busy", slots=6, seed=13,
        groups=[
            steady("G1", g1, range(6)),
            steady("G2", g2, range(3)),
            steady("H1", users("h", 0, 3), range(3, 6)),
            steady("H2", users("h", 3, 6), range(3, 6)),
            steady("G3", g3, range(1, 4)),
            steady("G4", g4, range(1, 4)),
            steady("M", g3 | g4, range(4, 6)),
            steady("G5", users("p", 0, 5), range(3)),
            group("T", s2=users("t", 0, 4)),
        ],
        events=[
            ev("SGCI", "constancy", 0, "G1", "G1"),
            ev("SGCI", "constancy", 2, "G2", "H1"),
            ev("SGCI", "split", 2, "G2", "H2"),
            ev("SGCI", "merge", 3, "G3", "M"),
            ev("SGCI", "change_size", 3, "G4", "M"),
            ev("SGCI", "decay", 2, "G5"),
            ev("GED", "splitting", 2, "G2", "H1"),
            ev("GED", "merging", 3, "G3", "M"),
            ev("GED", "merging", 3, "G4", "M"),
            ev("GED", "forming", 0, (), "G3"),
            ev("GED", "forming", 1, (), "T"),
            ev("GED", "dissolving", 2, "T"),
            ev("GED", "dissolving", 2, "G5"),
        ],
    )


def growth_boundary():
    return ScenarioScript(
        name="growth_boundary", slots=4, seed=14,
        groups=[group("G", s0=users("u", 0, 10), s1=users("u", 0, 13), s2=users("u", 0, 13), s3=users("u", 0, 13))],
        events=[
            ev("SGCI", "constancy", 0, "G", "G"),  # |10 - 13| = 3
            ev("GED", "growing", 0, "G", "G"),     # (10/13)^2 = 0.59
            ev("GED", "continuing", 1, "G", "G"),
        ],
    )


SUITE = [
    constancy_decay, change_size, split_even, split_six, deletion, merge, addition,
    split_merge, addition_priority, short_lived, short_split, split_k4, busy, growth_boundary,
]
SHORT_LIVED_SUITE = [short_lived, short_split, busy]
