"""Deterministic synthetic dataset generators and an IDX-format loader."""
from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "LabeledDataset",
    "LineSpec",
    "TWO_LINE_DEFAULT",
    "FOUR_LINE_DEFAULT",
    "gen_gaussian",
    "gen_circle",
    "gen_spiral",
    "gen_halfplane_region",
    "split",
    "stratified_subset",
    "dataset_to_csv",
    "IdxFormatError",
    "IdxMagicError",
    "IdxTruncatedError",
    "IdxCountMismatchError",
    "read_idx_images",
    "read_idx_labels",
    "write_idx_images",
    "write_idx_labels",
    "load_idx",
]

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


@dataclass
class LabeledDataset:
    """Feature matrix with integer class labels and generator provenance."""

    features: np.ndarray
    labels: np.ndarray
    n_classes: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("features must be (n, d) with one label per row")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            raise ValueError(f"labels outside [0, {self.n_classes})")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)


def dataset_to_csv(dataset: LabeledDataset, path) -> Path:
    """Write `x1,...,xd,label` rows, floats with 9 significant digits."""
    path = Path(path)
    header = ",".join(f"x{i + 1}" for i in range(dataset.dim)) + ",label"
    lines = [header]
    for row, label in zip(dataset.features, dataset.labels):
        lines.append(",".join(f"{v:.9g}" for v in row) + f",{int(label)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def gen_gaussian(
    n_per_class: int = 250,
    seed: int = 0,
    centers: Tuple[Tuple[float, float], Tuple[float, float]] = ((1.5, 1.5), (-1.5, -1.5)),
    sigma: float = 0.5,
) -> LabeledDataset:
    """Two isotropic Gaussian blobs, linearly separable at the defaults."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    rng = np.random.default_rng(seed)
    parts, labels = [], []
    for cls, center in enumerate(centers):
        pts = rng.normal(0.0, sigma, size=(n_per_class, 2)) + np.asarray(center, dtype=float)
        parts.append(pts)
        labels.append(np.full(n_per_class, cls, dtype=np.int64))
    return LabeledDataset(
        np.vstack(parts),
        np.concatenate(labels),
        n_classes=2,
        provenance={
            "generator": "gaussian",
            "seed": seed,
            "n_per_class": n_per_class,
            "centers": [list(c) for c in centers],
            "sigma": sigma,
        },
    )


def gen_circle(
    n_per_class: int = 250,
    seed: int = 0,
    inner_radius: float = 1.0,
    ring: Tuple[float, float] = (1.3, 2.0),
) -> LabeledDataset:
    """Inner disk (class 0) against a surrounding annulus (class 1).

    The radial gap between `inner_radius` and `ring[0]` keeps the classes
    separable by construction.
    """
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if not 0 < inner_radius < ring[0] < ring[1]:
        raise ValueError("need 0 < inner_radius < ring[0] < ring[1]")
    rng = np.random.default_rng(seed)

    def sample(r_lo, r_hi):
        # radius via sqrt of uniform: uniform density over the area
        radius = np.sqrt(rng.uniform(r_lo ** 2, r_hi ** 2, n_per_class))
        angle = rng.uniform(0.0, 2.0 * np.pi, n_per_class)
        return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

    inner = sample(0.0, inner_radius)
    outer = sample(ring[0], ring[1])
    return LabeledDataset(
        np.vstack([inner, outer]),
        np.concatenate([np.zeros(n_per_class, np.int64), np.ones(n_per_class, np.int64)]),
        n_classes=2,
        provenance={
            "generator": "circle",
            "seed": seed,
            "n_per_class": n_per_class,
            "inner_radius": inner_radius,
            "ring": list(ring),
        },
    )


def gen_spiral(
    n_per_class: int = 250,
    turns: float = 1.75,
    noise: float = 0.1,
    seed: int = 0,
    r_start: float = 0.25,
    r_end: float = 2.0,
) -> LabeledDataset:
    """Two intertwined Archimedean spiral arms offset by pi."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be >= 1")
    if not turns > 0:
        raise ValueError("turns must be positive")
    if noise < 0:
        raise ValueError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n_per_class)
    radius = r_start + t * (r_end - r_start)
    parts, labels = [], []
    for cls in (0, 1):
        angle = 2.0 * np.pi * turns * t + np.pi * cls
        pts = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
        pts += rng.normal(0.0, noise, size=pts.shape) if noise > 0 else 0.0
        parts.append(pts)
        labels.append(np.full(n_per_class, cls, dtype=np.int64))
    return LabeledDataset(
        np.vstack(parts),
        np.concatenate(labels),
        n_classes=2,
        provenance={
            "generator": "spiral",
            "seed": seed,
            "n_per_class": n_per_class,
            "turns": turns,
            "noise": noise,
            "r_start": r_start,
            "r_end": r_end,
        },
    )


@dataclass(frozen=True)
class LineSpec:
    """One half-plane constraint `b*y >= m*x + c` (or <= for sense '<=')."""

    m: float
    b: float
    c: float
    sense: str = ">="

    def __post_init__(self) -> None:
        if self.m == 0 and self.b == 0:
            raise ValueError("m and b cannot both be zero")
        if self.sense not in (">=", "<="):
            raise ValueError(f"sense must be '>=' or '<=', got {self.sense!r}")

    def halfplane(self) -> Tuple[float, float, float]:
        """Coefficients (wx, wy, w0) with the constraint wx*x + wy*y + w0 >= 0."""
        if self.sense == ">=":
            return (-self.m, self.b, -self.c)
        return (self.m, -self.b, self.c)

    def satisfied(self, points) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        wx, wy, w0 = self.halfplane()
        return wx * points[..., 0] + wy * points[..., 1] + w0 >= 0.0

    def to_dict(self) -> dict:
        return {"m": self.m, "b": self.b, "c": self.c, "sense": self.sense}


# Open wedge with apex (0, 0.5): above y = x + 0.5 and below y = -x + 0.5.
TWO_LINE_DEFAULT = (
    LineSpec(m=1.0, b=1.0, c=0.5, sense=">="),
    LineSpec(m=-1.0, b=1.0, c=0.5, sense="<="),
)

# Trapezoid with vertices (+-1.5, -0.8) and (+-0.8, 0.8).
FOUR_LINE_DEFAULT = (
    LineSpec(m=0.0, b=1.0, c=-0.8, sense=">="),
    LineSpec(m=0.0, b=1.0, c=0.8, sense="<="),
    LineSpec(m=-1.6, b=0.7, c=1.84, sense="<="),
    LineSpec(m=1.6, b=0.7, c=1.84, sense="<="),
)


def gen_halfplane_region(
    lines: Sequence[LineSpec],
    n: int = 500,
    box: Tuple[float, float, float, float] = (-2.0, 2.0, -2.0, 2.0),
    seed: int = 0,
    max_attempts: int = 20,
) -> LabeledDataset:
    """Uniform points over the box, label 1 iff every inequality holds."""
    lines = tuple(lines)
    if not lines:
        raise ValueError("need at least one line")
    if n < 1:
        raise ValueError("n must be >= 1")
    x_lo, x_hi, y_lo, y_hi = box
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        points = np.column_stack([
            rng.uniform(x_lo, x_hi, n),
            rng.uniform(y_lo, y_hi, n),
        ])
        inside = np.ones(n, dtype=bool)
        for line in lines:
            inside &= line.satisfied(points)
        if inside.any():
            return LabeledDataset(
                points,
                inside.astype(np.int64),
                n_classes=2,
                provenance={
                    "generator": "halfplane_region",
                    "seed": seed,
                    "n": n,
                    "box": list(box),
                    "lines": [line.to_dict() for line in lines],
                },
            )
    raise ValueError(
        f"positive region is empty within box {box} after {max_attempts} samples of {n}"
    )


def split(dataset: LabeledDataset, test_fraction: float, seed: int = 0):
    """Disjoint, exhaustive, class-stratified train/test split."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for cls in range(dataset.n_classes):
        members = np.flatnonzero(dataset.labels == cls)
        if members.size < 2:
            raise ValueError(f"class {cls} has fewer than 2 items")
        members = rng.permutation(members)
        n_test = int(round(test_fraction * members.size))
        test_idx.append(members[:n_test])
        train_idx.append(members[n_test:])
    train_idx = np.concatenate(train_idx)
    test_idx = np.concatenate(test_idx)

    def take(idx, role):
        prov = dict(dataset.provenance)
        prov.update({"split": role, "test_fraction": test_fraction, "split_seed": seed})
        return LabeledDataset(
            dataset.features[idx], dataset.labels[idx], dataset.n_classes, prov
        )

    return take(train_idx, "train"), take(test_idx, "test")


def stratified_subset(dataset: LabeledDataset, n_total: int, seed: int = 0) -> LabeledDataset:
    """Take n_total items spread evenly over the classes, seeded."""
    per_class = n_total // dataset.n_classes
    if per_class < 1:
        raise ValueError("n_total too small for the class count")
    rng = np.random.default_rng(seed)
    picked = []
    for cls in range(dataset.n_classes):
        members = np.flatnonzero(dataset.labels == cls)
        if members.size < per_class:
            raise ValueError(f"class {cls} has only {members.size} items, need {per_class}")
        picked.append(rng.permutation(members)[:per_class])
    idx = np.concatenate(picked)
    prov = dict(dataset.provenance)
    prov.update({"subset": per_class * dataset.n_classes, "subset_seed": seed})
    return LabeledDataset(dataset.features[idx], dataset.labels[idx], dataset.n_classes, prov)


class IdxFormatError(ValueError):
    """Malformed IDX container."""


class IdxMagicError(IdxFormatError):
    """Unexpected magic number."""


class IdxTruncatedError(IdxFormatError):
    """File ends before the declared payload."""


class IdxCountMismatchError(IdxFormatError):
    """Image and label files disagree on the item count."""


def _open_binary(path):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _read_exact(fh, count: int, path, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise IdxTruncatedError(f"{path}: truncated while reading {what}")
    return data


def read_idx_images(path) -> np.ndarray:
    """Read an IDX image file into a (n, rows, cols) uint8 array."""
    with _open_binary(path) as fh:
        header = _read_exact(fh, 16, path, "image header")
        magic, count, rows, cols = struct.unpack(">IIII", header)
        if magic != IDX_IMAGES_MAGIC:
            raise IdxMagicError(
                f"{path}: bad image magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}"
            )
        payload = _read_exact(fh, count * rows * cols, path, "pixel data")
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path) -> np.ndarray:
    """Read an IDX label file into a (n,) uint8 array."""
    with _open_binary(path) as fh:
        header = _read_exact(fh, 8, path, "label header")
        magic, count = struct.unpack(">II", header)
        if magic != IDX_LABELS_MAGIC:
            raise IdxMagicError(
                f"{path}: bad label magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}"
            )
        payload = _read_exact(fh, count, path, "label data")
    return np.frombuffer(payload, dtype=np.uint8)


def write_idx_images(path, images: np.ndarray) -> None:
    images = np.ascontiguousarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise ValueError("images must be (n, rows, cols)")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGES_MAGIC, *images.shape))
        fh.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    if labels.ndim != 1:
        raise ValueError("labels must be 1-D")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABELS_MAGIC, labels.shape[0]))
        fh.write(labels.tobytes())


def load_idx(images_path, labels_path, limit: int = 0) -> LabeledDataset:
    """Load an IDX image/label pair as flattened features scaled to [0, 1].

    ``limit`` > 0 keeps only the first ``min(limit, count)`` items.
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IdxCountMismatchError(
            f"{images_path} holds {images.shape[0]} images but "
            f"{labels_path} holds {labels.shape[0]} labels"
        )
    if limit > 0:
        images = images[:limit]
        labels = labels[:limit]
    features = images.reshape(images.shape[0], -1).astype(float) / 255.0
    labels = labels.astype(np.int64)
    n_classes = int(labels.max()) + 1 if labels.size else 1
    return LabeledDataset(
        features,
        labels,
        n_classes=n_classes,
        provenance={
            "generator": "idx",
            "images": str(images_path),
            "labels": str(labels_path),
            "limit": limit,
        },
    )
