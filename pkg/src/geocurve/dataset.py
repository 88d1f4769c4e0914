"""Class-partitioned feature collections."""
from dataclasses import dataclass, field
import zlib

import numpy as np

from .errors import DimensionMismatch


def label_key(label):
    """Stable 32-bit key for a class label, independent of hash randomization."""
    return zlib.crc32(str(label).encode("utf-8"))


def class_rng(seed, label, stream=0):
    """Generator for one (seed, label, stream) triple; independent of class order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), label_key(label), stream]))


@dataclass
class LabeledFeatureSet:
    """Row-per-sample features with labels.

    ``kind`` is ``"raw"`` for extractor outputs and ``"preshape"`` for
    projected or generated pre-shape vectors. ``augmented`` flags rows that
    carry pseudo-labels from a fitted curve.
    """

    vectors: np.ndarray
    labels: np.ndarray
    augmented: np.ndarray = None
    kind: str = "raw"

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim == 1 and self.vectors.size == 0:
            self.vectors = self.vectors.reshape(0, 0)
        self.labels = np.asarray(self.labels)
        if self.vectors.ndim != 2 or self.labels.shape != (self.vectors.shape[0],):
            raise DimensionMismatch(f"vectors {self.vectors.shape} vs labels {self.labels.shape}")
        if self.augmented is None:
            self.augmented = np.zeros(len(self.labels), dtype=bool)
        self.augmented = np.asarray(self.augmented, dtype=bool)

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def dim(self):
        return self.vectors.shape[1]

    def classes(self):
        return sorted(set(self.labels.tolist()), key=_sort_key)

    def of_class(self, label):
        return self.vectors[self.labels == label]

    def counts(self):
        return {lab: int(np.sum(self.labels == lab)) for lab in self.classes()}

    def subset(self, mask):
        return LabeledFeatureSet(self.vectors[mask], self.labels[mask], self.augmented[mask], self.kind)

    def concat(self, other):
        if len(self) == 0:
            return other
        if len(other) == 0:
            return self
        if other.dim != self.dim or other.kind != self.kind:
            raise DimensionMismatch("cannot concatenate sets of different dimension or kind")
        return LabeledFeatureSet(
            np.vstack([self.vectors, other.vectors]),
            np.concatenate([self.labels, other.labels]),
            np.concatenate([self.augmented, other.augmented]),
            self.kind,
        )


def _sort_key(label):
    # numeric labels sort numerically, everything else lexically after them
    if isinstance(label, (int, float, np.integer, np.floating)):
        return (0, float(label), "")
    return (1, 0.0, str(label))
