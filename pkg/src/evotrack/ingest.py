"""Interaction log parsing, time slotting and snapshot construction."""

from __future__ import annotations

import csv
import io
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime, timezone

from .model import InteractionRecord, SnapshotGraph

logger = logging.getLogger(__name__)

DAY = 86400
EVENT_HEADER = ("source", "target", "timestamp")
AGGREGATED_HEADER = ("source", "target", "slot_index", "weight")


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class SlotSpec:
    origin: int
    slot_length: int = 30 * DAY
    slot_step: int = 15 * DAY

    def __post_init__(self):
        if not 0 < self.slot_step <= self.slot_length:
            raise ValueError(
                f"need 0 < slot_step <= slot_length, got step={self.slot_step} length={self.slot_length}"
            )

    @classmethod
    def from_days(cls, origin: int, slot_days: float = 30, step_days: float = 15) -> "SlotSpec":
        return cls(origin, int(round(slot_days * DAY)), int(round(step_days * DAY)))

    def window(self, slot_index: int) -> tuple[int, int]:
        start = self.origin + slot_index * self.slot_step
        return start, start + self.slot_length

    def slots_of(self, timestamp: int) -> range:
        """Indices of every half-open window containing ``timestamp``."""
        offset = timestamp - self.origin
        if offset < 0:
            return range(0)
        last = offset // self.slot_step
        # first i with i*step + length > offset
        first = max(0, (offset - self.slot_length) // self.slot_step + 1)
        return range(first, last + 1)


def _parse_iso(text: str) -> int:
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True


def _text_stream(stream):
    if isinstance(stream, (bytes, bytearray)):
        return io.StringIO(stream.decode("utf-8"))
    if isinstance(stream, io.IOBase) and "b" in getattr(stream, "mode", ""):
        return io.TextIOWrapper(stream, encoding="utf-8", newline="")
    if isinstance(stream, (io.BufferedIOBase, io.RawIOBase)):
        return io.TextIOWrapper(stream, encoding="utf-8", newline="")
    return stream


def _reader(stream, header):
    reader = csv.reader(_text_stream(stream))
    first = next(reader, None)
    if first is None:
        return iter(())
    if tuple(c.strip() for c in first) != header:
        raise IngestError(f"row 1: expected header {','.join(header)!r}, got {','.join(first)!r}")
    return reader


def parse_interactions(stream) -> list[InteractionRecord]:
    """Read a ``source,target,timestamp`` CSV.

    Timestamps are either integer UTC seconds or ISO-8601; the format is
    detected once, from the first data row, and enforced for the rest.
    Row numbers in errors count the header as row 1.
    """
    records = []
    numeric = None
    for row_no, row in enumerate(_reader(stream, EVENT_HEADER), start=2):
        if not row:
            continue
        if len(row) != 3:
            raise IngestError(f"row {row_no}: expected 3 fields, got {len(row)}")
        source, target, raw_ts = (c.strip() for c in row)
        if not source:
            raise IngestError(f"row {row_no}: empty field 'source'")
        if not target:
            raise IngestError(f"row {row_no}: empty field 'target'")
        if numeric is None:
            numeric = _is_int(raw_ts)
        try:
            ts = int(raw_ts) if numeric else _parse_iso(raw_ts)
        except ValueError:
            kind = "integer seconds" if numeric else "ISO-8601"
            raise IngestError(f"row {row_no}: field 'timestamp' is not {kind}: {raw_ts!r}") from None
        records.append(InteractionRecord(source, target, ts))
    logger.info("parsed %d interaction records", len(records))
    return records


def parse_aggregated(stream, min_edge_weight: int = 2) -> dict[int, SnapshotGraph]:
    """Read pre-aggregated ``source,target,slot_index,weight`` rows into snapshots."""
    counts = defaultdict(Counter)
    for row_no, row in enumerate(_reader(stream, AGGREGATED_HEADER), start=2):
        if not row:
            continue
        if len(row) != 4:
            raise IngestError(f"row {row_no}: expected 4 fields, got {len(row)}")
        source, target, raw_slot, raw_weight = (c.strip() for c in row)
        for name, value in (("slot_index", raw_slot), ("weight", raw_weight)):
            if not _is_int(value) or int(value) < 0:
                raise IngestError(f"row {row_no}: field {name!r} is not a non-negative integer: {value!r}")
        if source != target:
            counts[int(raw_slot)][(source, target)] += int(raw_weight)
    return {s: _threshold(s, c, min_edge_weight) for s, c in sorted(counts.items())}


def default_origin(records) -> int:
    """Earliest timestamp truncated to UTC midnight."""
    first = min(r.timestamp for r in records)
    return first - first % DAY


def assign_slots(records, spec: SlotSpec, n_slots: int | None = None) -> dict[int, list[InteractionRecord]]:
    """Distribute records over every window they fall in.

    Slots at or beyond ``n_slots`` are dropped when it is given. A record
    before the origin is an error.
    """
    slots = defaultdict(list)
    for r in records:
        if r.timestamp < spec.origin:
            raise IngestError(
                f"record {r.source}->{r.target} at {r.timestamp} precedes slot origin {spec.origin}"
            )
        for i in spec.slots_of(r.timestamp):
            if n_slots is None or i < n_slots:
                slots[i].append(r)
    return dict(sorted(slots.items()))


def _threshold(slot_index: int, counts: Counter, min_edge_weight: int) -> SnapshotGraph:
    edges = {pair: w for pair, w in sorted(counts.items()) if w >= min_edge_weight}
    nodes = {u for pair in edges for u in pair}
    return SnapshotGraph(slot_index, nodes, edges)


def build_snapshot(records, slot_index: int, min_edge_weight: int = 2) -> SnapshotGraph:
    if min_edge_weight < 1:
        raise ValueError("min_edge_weight must be >= 1")
    counts = Counter((r.source, r.target) for r in records if r.source != r.target)
    return _threshold(slot_index, counts, min_edge_weight)


def build_snapshots(records, spec: SlotSpec, min_edge_weight: int = 2, n_slots: int | None = None):
    """Return one snapshot per slot index in ``range(n_slots)``.

    Without ``n_slots`` the range ends at the last slot holding a record.
    """
    assigned = assign_slots(records, spec, n_slots)
    if n_slots is None:
        n_slots = max(assigned, default=-1) + 1
    return [build_snapshot(assigned.get(i, ()), i, min_edge_weight) for i in range(n_slots)]
