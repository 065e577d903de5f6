"""Synthetic telemetry generator: a test double for the withheld flight data.

The generated table mirrors the real schema (72 features over 12 sensor
groups) and its two evaluation hazards:

  * physical channels carry the fault signal: per-fault-type mean shifts on
    attitude, rate, gyro-bias, IMU, magnetometer, and vibration channels,
    on top of a smooth flight profile and autocorrelated sensor noise;
  * proxy channels carry the mission context instead: per-segment constant
    offsets plus cumulative ramps, so a model can score well by memorising
    *where* a fault happened rather than *what* it looks like.

The timeline has three episodes separated by large TimeUS gaps.  Anomaly
windows are contiguous segments inside episodes; the motor fault (label 3)
is planted in every episode so the label-{0,3} secondary task survives
group-aware splitting.  `proxy_strength = 0` degrades every contextual
channel to stationary noise; `placement = "iid"` produces a structureless
table with row-independent labels and noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .ingest import TelemetryTable

# --- schema ---------------------------------------------------------------

# Instantaneous physical channels (the strict audit set, 22 names).
STRICT_FEATURES = [
    "Roll", "Pitch", "Yaw",                    # attitude
    "R", "P", "Y", "A",                        # body-frame rates
    "GX", "GY", "GZ",                          # gyro-bias estimates
    "GyrX", "GyrY", "GyrZ",                    # IMU angular rates
    "AccX", "AccY", "AccZ",                    # IMU accelerations
    "MagX", "MagY", "MagZ",                    # magnetometer
    "VibeX", "VibeY", "VibeZ",                 # vibration
]

# Accumulators and state flags (the nine dropped by the loose mode).
PROXY_FEATURES = [
    "abT", "EnrgTot", "CurrTot", "Res", "BatRes",
    "Offset", "Rout", "POut", "YOut",
]
_CUMULATIVE_PROXIES = ("abT", "EnrgTot", "CurrTot")

# Trajectory / position-estimator outputs: context-laden but kept by loose.
TRAJECTORY_FEATURES = [
    "Lat", "Lng", "Spd", "GCrs",
    "PN", "PE", "PD", "VN", "VE", "VD",
    "TPD", "DVD",
]

# Controller echoes of physical channels (clean profile + noise).
ECHO_FEATURES = {
    "DesRoll": "Roll", "DesPitch": "Pitch", "DesYaw": "Yaw",
    "RDes": "R", "PDes": "P", "YDes": "Y", "ADes": "A",
    "AOut": "A", "ThI": "A", "ThO": "A", "ThH": "A", "DAlt": "A",
    "OfsX": "MagX", "OfsY": "MagY", "OfsZ": "MagZ",
}
ERROR_FEATURES = ["ErrRP", "ErrYaw"]

# Uninformative housekeeping channels.
NOISE_FEATURES = [
    "Alt", "Press", "Temp", "Volt", "VoltR", "Curr",
    "LiftMax", "BatVolt", "ThLimit", "TAlt", "NSats", "HDop",
]

FEATURE_NAMES = (
    STRICT_FEATURES
    + PROXY_FEATURES
    + TRAJECTORY_FEATURES
    + list(ECHO_FEATURES)
    + ERROR_FEATURES
    + NOISE_FEATURES
)

# Per-fault mean-shift patterns on physical channels.
FAULT_PATTERNS: dict[int, dict[str, float]] = {
    1: {"Yaw": 0.9, "GX": 1.1, "GY": 0.8, "MagY": 0.7, "MagX": 0.4, "GZ": 0.5},
    2: {"AccX": 1.0, "AccY": 0.8, "AccZ": 1.1, "VibeX": 0.5, "GyrX": 0.5, "GZ": 0.3},
    3: {"VibeX": 1.1, "VibeY": 1.0, "VibeZ": 0.9, "A": 0.8, "R": 0.5, "P": 0.4, "GZ": 0.3},
    4: {"Roll": 0.9, "Pitch": 0.8, "GyrY": 0.7, "GyrZ": 0.6, "Y": 0.5, "GZ": 0.4},
}

# Fault type of the j-th anomaly window in each episode (label 3 everywhere).
FAULT_PLAN = [[1, 3, 2], [3, 4, 1], [2, 3, 4]]


@dataclass(frozen=True)
class SynthSpec:
    """Knobs for the generator; defaults mirror the real table's shape."""

    n_rows: int = 4817
    n_episodes: int = 3
    dt_us: int = 20_000
    episode_gap_us: int = 60_000_000
    placement: str = "segment"  # or "iid"
    segments_per_episode: int = 3
    segment_rows: tuple[int, int] = (120, 260)
    anomaly_fraction: float = 0.30  # iid placement only
    proxy_strength: float = 1.0
    signal_strength: float = 1.0
    smoothness: float = 0.9

    def __post_init__(self):
        if self.n_rows < 10:
            raise DataError("n_rows too small")
        if self.n_episodes < 1:
            raise DataError("need at least one episode")
        if self.placement not in ("segment", "iid"):
            raise DataError(f"unknown placement {self.placement!r}")
        if not 0.0 <= self.smoothness < 1.0:
            raise DataError("smoothness must be in [0, 1)")
        lo, hi = self.segment_rows
        if not 1 <= lo <= hi:
            raise DataError("invalid segment_rows range")


def _episode_sizes(n_rows: int, n_episodes: int) -> list[int]:
    base = n_rows // n_episodes
    extra = n_rows % n_episodes
    return [base + (1 if e < extra else 0) for e in range(n_episodes)]


def _ar1(rng: np.random.Generator, n: int, rho: float) -> np.ndarray:
    """Unit-variance AR(1) noise; rho=0 degenerates to white noise."""
    eps = rng.normal(0.0, 1.0, n)
    if rho == 0.0:
        return eps
    out = np.empty(n)
    scale = np.sqrt(1.0 - rho * rho)
    out[0] = eps[0]
    for i in range(1, n):
        out[i] = rho * out[i - 1] + scale * eps[i]
    return out


def _place_segments(
    rng: np.random.Generator, spec: SynthSpec, sizes: list[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Per-row multiclass labels and episode ids for segment placement."""
    labels = np.zeros(spec.n_rows, dtype=np.int64)
    episode = np.zeros(spec.n_rows, dtype=np.int64)
    lo, hi = spec.segment_rows
    offset = 0
    for ep, ep_len in enumerate(sizes):
        episode[offset : offset + ep_len] = ep
        spe = spec.segments_per_episode
        slot = ep_len // spe
        if slot <= hi + 2:
            raise DataError(
                "episodes too short for the requested anomaly segments"
            )
        for j in range(spe):
            seg_len = int(rng.integers(lo, hi + 1))
            start_max = slot - seg_len - 1
            start = int(rng.integers(1, start_max)) if start_max > 1 else 1
            a = offset + j * slot + start
            plan = FAULT_PLAN[ep % len(FAULT_PLAN)]
            labels[a : a + seg_len] = plan[j % len(plan)]
        offset += ep_len
    return labels, episode


def _segment_ids(labels: np.ndarray, episode: np.ndarray) -> np.ndarray:
    """Contiguous runs of constant (label, episode) get one id each."""
    change = np.empty(labels.size, dtype=bool)
    change[0] = True
    change[1:] = (labels[1:] != labels[:-1]) | (episode[1:] != episode[:-1])
    return np.cumsum(change) - 1


def synth_generate(spec: SynthSpec, seed: int) -> TelemetryTable:
    """Deterministic synthetic telemetry table for the given seed."""
    rng = np.random.default_rng(seed)
    n = spec.n_rows
    sizes = _episode_sizes(n, spec.n_episodes)

    # timeline with gap-separated episodes
    time_us = np.empty(n, dtype=np.int64)
    t = 1_000_000
    offset = 0
    for ep_len in sizes:
        time_us[offset : offset + ep_len] = t + spec.dt_us * np.arange(ep_len)
        t = int(time_us[offset + ep_len - 1]) + spec.episode_gap_us
        offset += ep_len

    iid = spec.placement == "iid"
    if iid:
        anom = rng.random(n) < spec.anomaly_fraction
        labels = np.where(anom, rng.integers(1, 5, size=n), 0).astype(np.int64)
        episode = np.zeros(n, dtype=np.int64)
        offset = 0
        for ep, ep_len in enumerate(sizes):
            episode[offset : offset + ep_len] = ep
            offset += ep_len
    else:
        labels, episode = _place_segments(rng, spec, sizes)
    segments = _segment_ids(labels, episode)
    n_segments = int(segments.max()) + 1
    anomalous = labels != 0

    rho = 0.0 if iid else spec.smoothness
    sig = spec.signal_strength
    px = spec.proxy_strength

    columns: dict[str, np.ndarray] = {}

    # physical channels: profile + AR noise + fault shifts
    profiles: dict[str, np.ndarray] = {}
    phase = rng.uniform(0.0, 2 * np.pi, len(STRICT_FEATURES))
    period = rng.uniform(500.0, 1400.0, len(STRICT_FEATURES))
    row_in_ep = np.concatenate([np.arange(ep_len) for ep_len in sizes]).astype(np.float64)
    for j, name in enumerate(STRICT_FEATURES):
        prof = 0.0 if iid else 0.6 * np.sin(2 * np.pi * row_in_ep / period[j] + phase[j])
        profiles[name] = np.broadcast_to(prof, (n,)).astype(np.float64) if iid else prof
        shift = np.zeros(n)
        for fault, pattern in FAULT_PATTERNS.items():
            coeff = pattern.get(name)
            if coeff:
                shift[labels == fault] = sig * coeff
        columns[name] = profiles[name] + shift + _ar1(rng, n, rho)

    # strong proxies: per-segment constants, a consistent anomaly shift, and
    # cumulative mission ramps; strength 0 leaves white noise only
    seg_anom = np.zeros(n_segments, dtype=bool)
    np.logical_or.at(seg_anom, segments, anomalous)
    for name in PROXY_FEATURES:
        noise = rng.normal(0.0, 1.0, n)
        if iid or px == 0.0:
            columns[name] = noise
            continue
        seg_offsets = rng.normal(0.0, 2.0, n_segments)
        consistent = rng.uniform(0.6, 1.0) * seg_anom
        per_row = (seg_offsets + 0.8 * consistent)[segments]
        if name in _CUMULATIVE_PROXIES:
            inc = 1.0 + 0.5 * anomalous + rng.normal(0.0, 0.1, n)
            ramp = np.empty(n)
            off = 0
            for ep_len in sizes:
                part = np.cumsum(inc[off : off + ep_len])
                ramp[off : off + ep_len] = (part - part.mean()) / (part.std() + 1e-12)
                off += ep_len
            per_row = 1.2 * ramp + 0.8 * per_row
        columns[name] = px * per_row + 0.4 * noise

    # trajectory group: slow per-episode drifts plus weaker segment offsets
    for name in TRAJECTORY_FEATURES:
        noise = rng.normal(0.0, 1.0, n)
        if iid or px == 0.0:
            columns[name] = noise
            continue
        drift_rate = rng.uniform(0.5, 1.5)
        drift = drift_rate * (2.0 * row_in_ep / np.maximum(1, max(sizes)) - 1.0)
        drift = drift + rng.normal(0.0, 0.8, spec.n_episodes)[episode]
        seg_offsets = rng.normal(0.0, 1.0, n_segments)[segments]
        columns[name] = px * 0.5 * (drift + seg_offsets) + 0.6 * noise

    # controller echoes follow the clean profile of their source channel
    for name, source in ECHO_FEATURES.items():
        columns[name] = profiles[source] + 0.5 * rng.normal(0.0, 1.0, n)

    # attitude-error channels: mildly fault-responsive
    for name in ERROR_FEATURES:
        columns[name] = 0.25 * sig * anomalous + _ar1(rng, n, rho)

    for name in NOISE_FEATURES:
        columns[name] = rng.normal(0.0, 1.0, n)

    features = np.column_stack([columns[name] for name in FEATURE_NAMES])
    return TelemetryTable(
        time_us=time_us,
        feature_names=list(FEATURE_NAMES),
        features=features,
        labels=labels,
    )


def plant_fusion_artifacts(table: TelemetryTable) -> TelemetryTable:
    """Copy of the table with the fusion-export defect: two exact duplicate
    column pairs (ErrYaw := ErrRP, MagZ := MagY), for audit demonstrations."""
    features = table.features.copy()
    names = table.feature_names
    features[:, names.index("ErrYaw")] = features[:, names.index("ErrRP")]
    features[:, names.index("MagZ")] = features[:, names.index("MagY")]
    return TelemetryTable(
        time_us=table.time_us.copy(),
        feature_names=list(names),
        features=features,
        labels=table.labels.copy(),
    )
