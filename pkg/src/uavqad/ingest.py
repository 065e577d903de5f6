"""Working-table reconstruction from raw per-sensor files.

Raw format: one delimiter-separated text file per sensor with a header row;
a TimeUS integer column (microseconds, strictly increasing), numeric
channels, and an optional per-row ``label`` column in {0..4}.  Streams are
aligned onto a base stream with a backward as-of join (most recent sample
at or before the base timestamp, no tolerance window); rows preceding any
stream's first sample are dropped.  Per-sensor labels are voted into one
per-row label and tied rows are discarded.

The canonical table file is delimited text with TimeUS first and the
multiclass label last; floats are written with repr so re-serialisation is
byte-stable.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

LABEL_COLUMN = "label"
TIME_COLUMN = "TimeUS"
NO_LABEL = -1


@dataclass
class SensorStream:
    """One sensor's time-ordered samples."""

    name: str
    time_us: np.ndarray
    channels: dict[str, np.ndarray]
    labels: np.ndarray | None = None  # per-row {0..4}, or None

    def __post_init__(self):
        self.time_us = np.asarray(self.time_us, dtype=np.int64)
        if self.time_us.ndim != 1 or self.time_us.size == 0:
            raise DataError(f"stream {self.name}: empty time axis")
        if not np.all(np.diff(self.time_us) > 0):
            raise DataError(f"stream {self.name}: TimeUS must be strictly increasing")
        for ch, vals in self.channels.items():
            self.channels[ch] = np.asarray(vals, dtype=np.float64)
            if self.channels[ch].shape != self.time_us.shape:
                raise DataError(f"stream {self.name}: channel {ch} misaligned")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)

    def __len__(self) -> int:
        return int(self.time_us.size)


@dataclass
class JoinedRows:
    """As-of join result: base-aligned channel columns plus per-stream label
    votes (NO_LABEL where a stream carries no labels)."""

    time_us: np.ndarray
    columns: list[tuple[str, str, np.ndarray]]  # (sensor, channel, values)
    label_votes: np.ndarray  # (n_rows, n_streams), NO_LABEL for unlabeled


@dataclass
class TelemetryTable:
    """Time-sorted rows of numeric features with multiclass labels."""

    time_us: np.ndarray
    feature_names: list[str]
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.time_us = np.asarray(self.time_us, dtype=np.int64)
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = self.time_us.size
        if self.features.shape != (n, len(self.feature_names)):
            raise DataError("feature matrix shape does not match names/rows")
        if self.labels.shape != (n,):
            raise DataError("labels misaligned")

    @property
    def n_rows(self) -> int:
        return int(self.time_us.size)

    @property
    def binary_labels(self) -> np.ndarray:
        """1 iff any fault is present."""
        return (self.labels != 0).astype(np.int64)

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.feature_names.index(name)
        except ValueError:
            raise DataError(f"unknown feature {name!r}") from None
        return self.features[:, j]

    def select(self, names: list[str]) -> "TelemetryTable":
        idx = []
        for name in names:
            if name not in self.feature_names:
                raise DataError(f"unknown feature {name!r}")
            idx.append(self.feature_names.index(name))
        return TelemetryTable(
            time_us=self.time_us,
            feature_names=list(names),
            features=self.features[:, idx],
            labels=self.labels,
        )

    def filter_labels(self, keep: set[int]) -> "TelemetryTable":
        mask = np.isin(self.labels, sorted(keep))
        if not mask.any():
            raise DataError(f"no rows with labels {sorted(keep)}")
        return TelemetryTable(
            time_us=self.time_us[mask],
            feature_names=list(self.feature_names),
            features=self.features[mask],
            labels=self.labels[mask],
        )


def asof_align(base: SensorStream, others: list[SensorStream]) -> JoinedRows:
    """Backward as-of join of every other stream onto the base timestamps.

    For each base row, the most recent other-stream row with
    TimeUS <= base TimeUS is taken (equal timestamps match).  Base rows
    preceding any stream's first sample are dropped.
    """
    streams = [base] + list(others)
    keep = np.ones(len(base), dtype=bool)
    positions = []
    for stream in others:
        pos = np.searchsorted(stream.time_us, base.time_us, side="right") - 1
        keep &= pos >= 0
        positions.append(pos)
    if not keep.any():
        raise DataError("as-of join left no rows")

    columns: list[tuple[str, str, np.ndarray]] = []
    for ch, vals in base.channels.items():
        columns.append((base.name, ch, vals[keep]))
    for stream, pos in zip(others, positions):
        take = pos[keep]
        for ch, vals in stream.channels.items():
            columns.append((stream.name, ch, vals[take]))

    votes = np.full((int(keep.sum()), len(streams)), NO_LABEL, dtype=np.int64)
    if base.labels is not None:
        votes[:, 0] = base.labels[keep]
    for j, (stream, pos) in enumerate(zip(others, positions), start=1):
        if stream.labels is not None:
            votes[:, j] = stream.labels[pos[keep]]
    return JoinedRows(time_us=base.time_us[keep], columns=columns, label_votes=votes)


def vote_labels(votes) -> int | None:
    """Strict-majority label; None (discard) on a tie for the maximum count
    or when no labels are present."""
    present = [int(v) for v in votes if int(v) != NO_LABEL]
    if not present:
        return None
    values, counts = np.unique(present, return_counts=True)
    top = counts.max()
    winners = values[counts == top]
    if winners.size > 1:
        return None
    return int(winners[0])


def resolve_collisions(columns: list[tuple[str, str, np.ndarray]]) -> list[tuple[str, np.ndarray]]:
    """Channel names shared by several sensors get sensor-prefixed."""
    seen: dict[str, int] = {}
    for _, ch, _ in columns:
        seen[ch] = seen.get(ch, 0) + 1
    out = []
    for sensor, ch, vals in columns:
        name = f"{sensor}_{ch}" if seen[ch] > 1 else ch
        out.append((name, vals))
    return out


def finalize(joined: JoinedRows) -> TelemetryTable:
    """Vote labels row-wise (ties discarded), prefix colliding channel
    names, drop zero-variance columns, sort by TimeUS."""
    voted = np.array(
        [NO_LABEL if (v := vote_labels(row)) is None else v for row in joined.label_votes],
        dtype=np.int64,
    )
    keep = voted != NO_LABEL
    if not keep.any():
        raise DataError("label voting discarded every row")

    named = resolve_collisions(joined.columns)
    names = [name for name, _ in named]
    matrix = np.column_stack([vals[keep] for _, vals in named])
    time_us = joined.time_us[keep]
    labels = voted[keep]

    order = np.argsort(time_us, kind="mergesort")
    time_us, matrix, labels = time_us[order], matrix[order], labels[order]

    variable = matrix.std(axis=0) > 0.0
    if not variable.any():
        raise DataError("all columns have zero variance")
    names = [n for n, v in zip(names, variable) if v]
    return TelemetryTable(
        time_us=time_us,
        feature_names=names,
        features=matrix[:, variable],
        labels=labels,
    )


# ---------------------------------------------------------------------------
# stream / table file IO


def read_stream(path: Path) -> SensorStream:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)
    if TIME_COLUMN not in header:
        raise DataError(f"{path}: missing {TIME_COLUMN} column")
    if not rows:
        raise DataError(f"{path}: no data rows")
    data = np.array(rows, dtype=np.float64)
    cols = {name: data[:, j] for j, name in enumerate(header)}
    labels = None
    if LABEL_COLUMN in cols:
        labels = cols.pop(LABEL_COLUMN).astype(np.int64)
    time_us = cols.pop(TIME_COLUMN).astype(np.int64)
    return SensorStream(
        name=path.stem, time_us=time_us, channels=cols, labels=labels
    )


def reconstruct(raw_dir: Path, base_name: str | None = None) -> TelemetryTable:
    """Align every sensor file in a directory and build the working table.

    The base stream defaults to the one with the most rows.
    """
    raw_dir = Path(raw_dir)
    paths = sorted(raw_dir.glob("*.csv"))
    if not paths:
        raise DataError(f"no sensor files (*.csv) in {raw_dir}")
    streams = [read_stream(p) for p in paths]
    if base_name is not None:
        matches = [s for s in streams if s.name == base_name]
        if not matches:
            raise DataError(f"base stream {base_name!r} not found")
        base = matches[0]
    else:
        base = max(streams, key=len)
    others = [s for s in streams if s is not base]
    return finalize(asof_align(base, others))


def write_table(table: TelemetryTable, path: Path):
    path = Path(path)
    buf = io.StringIO()
    buf.write(TIME_COLUMN + "," + ",".join(table.feature_names) + f",{LABEL_COLUMN}\n")
    for i in range(table.n_rows):
        cells = [str(int(table.time_us[i]))]
        cells.extend(repr(float(v)) for v in table.features[i])
        cells.append(str(int(table.labels[i])))
        buf.write(",".join(cells) + "\n")
    path.write_text(buf.getvalue())


def read_table(path: Path) -> TelemetryTable:
    path = Path(path)
    if not path.exists():
        raise DataError(f"table file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = list(reader)
    if not header or header[0] != TIME_COLUMN or header[-1] != LABEL_COLUMN:
        raise DataError(f"{path}: expected {TIME_COLUMN} first and {LABEL_COLUMN} last")
    if not rows:
        raise DataError(f"{path}: no data rows")
    data = np.array(rows, dtype=np.float64)
    return TelemetryTable(
        time_us=data[:, 0].astype(np.int64),
        feature_names=header[1:-1],
        features=data[:, 1:-1],
        labels=data[:, -1].astype(np.int64),
    )


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def verify_checksums(raw_dir: Path, checksum_file: Path):
    """Check user-supplied raw files against a 'sha256  filename' manifest."""
    raw_dir = Path(raw_dir)
    mismatches = []
    for line in Path(checksum_file).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DataError(f"bad checksum line: {line!r}")
        expected, name = parts
        target = raw_dir / name
        if not target.exists():
            mismatches.append(f"{name}: missing")
        elif sha256_of(target) != expected.lower():
            mismatches.append(f"{name}: checksum mismatch")
    if mismatches:
        raise DataError("checksum verification failed: " + "; ".join(mismatches))
