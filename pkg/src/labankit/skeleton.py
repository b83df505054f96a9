"""Skeleton sequences, fragment slicing, and dataset manifests.

The input unit is a 24-joint SMPL skeleton trajectory in world meters
(gravity along -y, floor at y = 0), stored one sequence per JSON file.
Fragments are contiguous slices of a sequence and are the unit that the
descriptor and classification stages operate on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

SMPL_JOINT_COUNT = 24

# SMPL 24-joint convention. Indices into the second positions axis.
SMPL_JOINT_NAMES = (
    "pelvis", "hip_l", "hip_r", "spine1", "knee_l", "knee_r", "spine2",
    "ankle_l", "ankle_r", "spine3", "foot_l", "foot_r", "neck",
    "collar_l", "collar_r", "head", "shoulder_l", "shoulder_r",
    "elbow_l", "elbow_r", "wrist_l", "wrist_r", "hand_l", "hand_r",
)

VALID_TIERS = (0, 1, 2, 3)

# Fragments shorter than this are not meaningful units of classification.
MIN_FRAGMENT_SECONDS = 3.0

_DURATION_TOL = 1e-9


class SkeletonError(ValueError):
    """A skeleton file, sequence, or manifest violates the format contract."""


def _validate_tier(tier, context: str):
    if tier is None:
        return None
    if not isinstance(tier, (int, np.integer)) or isinstance(tier, bool):
        raise SkeletonError(f"{context}: tier must be an integer in {VALID_TIERS}, got {tier!r}")
    tier = int(tier)
    if tier not in VALID_TIERS:
        raise SkeletonError(f"{context}: tier {tier} not in {VALID_TIERS}")
    return tier


def _check_positions(positions: np.ndarray, context: str):
    if positions.ndim != 3 or positions.shape[2] != 3:
        raise SkeletonError(
            f"{context}: positions must have shape (T, {SMPL_JOINT_COUNT}, 3), got {positions.shape}"
        )
    if positions.shape[1] != SMPL_JOINT_COUNT:
        raise SkeletonError(
            f"{context}: joint count {positions.shape[1]} != {SMPL_JOINT_COUNT}"
        )
    if not np.isfinite(positions).all():
        t, j = np.argwhere(~np.isfinite(positions).all(axis=2))[0]
        raise SkeletonError(f"{context}: non-finite coordinate at frame {t}, joint {j}")


@dataclass(frozen=True)
class SkeletonSequence:
    """A time-indexed array of 24 world-space 3D joint positions.

    positions has shape (T, 24, 3) in meters; fps is the sampling rate.
    tier, when present, is the ordinal class label in {0, 1, 2, 3}.
    Instances are immutable and safe to share across threads.
    """

    source_id: str
    fps: float
    positions: np.ndarray
    tier: int | None = None

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=np.float64)
        object.__setattr__(self, "positions", positions)
        context = f"sequence {self.source_id!r}"
        if not (isinstance(self.fps, (int, float)) and math.isfinite(self.fps) and self.fps > 0):
            raise SkeletonError(f"{context}: fps must be positive and finite, got {self.fps!r}")
        object.__setattr__(self, "fps", float(self.fps))
        _check_positions(positions, context)
        if positions.shape[0] < 2:
            raise SkeletonError(f"{context}: need at least 2 frames, got {positions.shape[0]}")
        object.__setattr__(self, "tier", _validate_tier(self.tier, context))
        positions.setflags(write=False)

    @property
    def frame_count(self) -> int:
        return self.positions.shape[0]

    @property
    def joints_per_frame(self) -> int:
        return self.positions.shape[1]

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps


@dataclass(frozen=True)
class Fragment:
    """A contiguous >= 3 s slice of a parent sequence, the unit of classification.

    positions is a view into the parent array covering frames
    [start_frame, end_frame).
    """

    parent_id: str
    fps: float
    start_frame: int
    end_frame: int
    tier: int
    positions: np.ndarray

    def __post_init__(self):
        context = f"fragment {self.parent_id!r}[{self.start_frame}:{self.end_frame}]"
        if self.end_frame <= self.start_frame:
            raise SkeletonError(f"{context}: end_frame must exceed start_frame")
        n = self.end_frame - self.start_frame
        if n / self.fps < MIN_FRAGMENT_SECONDS - _DURATION_TOL:
            raise SkeletonError(
                f"{context}: duration {n / self.fps:.3f} s is below the "
                f"{MIN_FRAGMENT_SECONDS} s floor"
            )
        _check_positions(self.positions, context)
        if self.positions.shape[0] != n:
            raise SkeletonError(
                f"{context}: positions cover {self.positions.shape[0]} frames, expected {n}"
            )
        tier = _validate_tier(self.tier, context)
        if tier is None:
            raise SkeletonError(f"{context}: fragments require a tier label")
        object.__setattr__(self, "tier", tier)

    @property
    def frame_count(self) -> int:
        return self.end_frame - self.start_frame

    @property
    def duration_s(self) -> float:
        return self.frame_count / self.fps


def load_sequence(path) -> SkeletonSequence:
    """Load and validate one skeleton JSON file.

    Expected layout: {"source_id": str, "fps": number, "tier": int|null,
    "frames": [[[x, y, z] * 24], ...]} with coordinates in meters.
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SkeletonError(f"{path}: invalid JSON: {exc}") from exc
    except OSError as exc:
        raise SkeletonError(f"{path}: {exc}") from exc

    if not isinstance(raw, dict):
        raise SkeletonError(f"{path}: top-level value must be a JSON object")
    for key in ("source_id", "fps", "frames"):
        if key not in raw:
            raise SkeletonError(f"{path}: missing required key {key!r}")
    frames = raw["frames"]
    if not isinstance(frames, list) or not frames:
        raise SkeletonError(f"{path}: 'frames' must be a non-empty list")

    # Fast path: a well-formed file converts directly to a (T, 24, 3) array.
    # Only walk the structure to locate the offending frame/joint on failure.
    try:
        positions = np.asarray(frames, dtype=np.float64)
    except (TypeError, ValueError):
        positions = None
    if positions is None or positions.ndim != 3 or positions.shape[1:] != (SMPL_JOINT_COUNT, 3):
        _locate_frame_error(path, frames)
        raise SkeletonError(f"{path}: frames do not form a (T, {SMPL_JOINT_COUNT}, 3) array")

    try:
        return SkeletonSequence(
            source_id=str(raw["source_id"]),
            fps=raw["fps"],
            positions=positions,
            tier=raw.get("tier"),
        )
    except SkeletonError as exc:
        raise SkeletonError(f"{path}: {exc}") from exc


def _locate_frame_error(path: Path, frames: list):
    for t, frame in enumerate(frames):
        if not isinstance(frame, list):
            raise SkeletonError(f"{path}: frame {t} is not a list of joints")
        if len(frame) != SMPL_JOINT_COUNT:
            raise SkeletonError(
                f"{path}: frame {t}: joint count {len(frame)} != {SMPL_JOINT_COUNT}"
            )
        for j, joint in enumerate(frame):
            if not isinstance(joint, list) or len(joint) != 3:
                raise SkeletonError(
                    f"{path}: frame {t}, joint {j}: expected 3 coordinates"
                )
            for value in joint:
                if not isinstance(value, (int, float)):
                    raise SkeletonError(
                        f"{path}: frame {t}, joint {j}: non-numeric coordinate {value!r}"
                    )


def save_sequence(seq: SkeletonSequence, path) -> None:
    """Write a sequence as skeleton JSON; load_sequence round-trips it bit-exactly."""
    path = Path(path)
    payload = {
        "source_id": seq.source_id,
        "fps": seq.fps,
        "tier": seq.tier,
        "frames": seq.positions.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, separators=(",", ":"))


def slice_fragments(seq: SkeletonSequence, length_s: float = 5.0,
                    stride_s: float = 5.0) -> list[Fragment]:
    """Cut a sequence into fixed-length fragments ordered by start frame.

    Fragments are round(length_s * fps) frames at stride round(stride_s * fps);
    a trailing remainder shorter than one fragment is discarded. A sequence
    shorter than one fragment yields an empty list.
    """
    if length_s < MIN_FRAGMENT_SECONDS:
        raise ValueError(
            f"fragment length {length_s} s is below the {MIN_FRAGMENT_SECONDS} s floor"
        )
    if stride_s <= 0:
        raise ValueError(f"stride must be positive, got {stride_s}")
    if seq.tier is None:
        raise ValueError(f"sequence {seq.source_id!r} has no tier; fragments require one")

    n_frames = int(round(length_s * seq.fps))
    # round() can land half a frame under the 3 s floor at fractional fps.
    min_frames = math.ceil(MIN_FRAGMENT_SECONDS * seq.fps - _DURATION_TOL)
    n_frames = max(n_frames, min_frames)
    stride = max(1, int(round(stride_s * seq.fps)))

    fragments = []
    for start in range(0, seq.frame_count - n_frames + 1, stride):
        fragments.append(Fragment(
            parent_id=seq.source_id,
            fps=seq.fps,
            start_frame=start,
            end_frame=start + n_frames,
            tier=seq.tier,
            positions=seq.positions[start:start + n_frames],
        ))
    return fragments


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    source_id: str
    tier: int


@dataclass(frozen=True)
class DatasetManifest:
    """An ordered collection of (file, source_id, tier) entries."""

    entries: tuple[ManifestEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for entry in self.entries:
            _validate_tier(entry.tier, f"manifest entry {entry.source_id!r}")
            if entry.tier is None:
                raise SkeletonError(f"manifest entry {entry.source_id!r} has no tier")
            if entry.source_id in seen:
                raise SkeletonError(f"duplicate source_id {entry.source_id!r} in manifest")
            seen.add(entry.source_id)

    def __len__(self) -> int:
        return len(self.entries)

    def tier_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for entry in self.entries:
            counts[entry.tier] = counts.get(entry.tier, 0) + 1
        return counts


def load_manifest(path) -> DatasetManifest:
    """Read a JSON-lines manifest: one {"path": str, "tier": int} per line.

    An optional "source_id" key overrides the default (the path stem).
    Relative paths resolve against the manifest's directory.
    """
    path = Path(path)
    base = path.parent
    entries = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise SkeletonError(f"{path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SkeletonError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(record, dict) or "path" not in record or "tier" not in record:
            raise SkeletonError(f"{path}:{lineno}: expected keys 'path' and 'tier'")
        entry_path = Path(record["path"])
        if not entry_path.is_absolute():
            entry_path = base / entry_path
        tier = _validate_tier(record["tier"], f"{path}:{lineno}")
        if tier is None:
            raise SkeletonError(f"{path}:{lineno}: tier must not be null")
        entries.append(ManifestEntry(
            path=entry_path,
            source_id=str(record.get("source_id", entry_path.stem)),
            tier=tier,
        ))
    return DatasetManifest(tuple(entries))


def save_manifest(manifest: DatasetManifest, path) -> None:
    """Write a manifest as JSON lines, with paths relative to the output file."""
    path = Path(path)
    base = path.parent.resolve()
    lines = []
    for entry in manifest.entries:
        try:
            rel = entry.path.resolve().relative_to(base)
            record: dict = {"path": str(rel), "tier": entry.tier}
        except ValueError:
            record = {"path": str(entry.path), "tier": entry.tier}
        if entry.source_id != entry.path.stem:
            record["source_id"] = entry.source_id
        lines.append(json.dumps(record, separators=(", ", ": ")))
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def balance_dataset(manifest: DatasetManifest, per_class: int, seed: int) -> DatasetManifest:
    """Seeded uniform subsample of exactly per_class entries per tier.

    Selected entries keep their original manifest order, which makes the
    operation idempotent on an already-balanced manifest.
    """
    if per_class < 1:
        raise ValueError(f"per_class must be >= 1, got {per_class}")
    if not manifest.entries:
        raise SkeletonError("manifest has no entries")
    rng = np.random.default_rng(seed)
    counts = manifest.tier_counts()
    keep: list[int] = []
    for tier in sorted(counts):
        indices = [i for i, entry in enumerate(manifest.entries) if entry.tier == tier]
        if len(indices) < per_class:
            raise SkeletonError(
                f"tier {tier} has {len(indices)} entries, fewer than per_class={per_class}"
            )
        chosen = rng.choice(len(indices), size=per_class, replace=False)
        keep.extend(indices[int(c)] for c in chosen)
    return DatasetManifest(tuple(manifest.entries[i] for i in sorted(keep)))


def with_tier(seq: SkeletonSequence, tier: int) -> SkeletonSequence:
    """Return a copy of the sequence relabeled with the given tier."""
    return replace(seq, tier=tier)
