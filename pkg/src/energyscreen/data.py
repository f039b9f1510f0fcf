"""Labelled two-class training data."""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import DataError, PreconditionError


@dataclass(frozen=True)
class TwoClassSample:
    """Observations (rows) by features (columns) for classes 1 and 2.

    Both matrices are stored as read-only C-contiguous float64 arrays.
    """

    class1: np.ndarray
    class2: np.ndarray
    feature_names: Optional[Sequence[str]] = field(default=None, compare=False)

    def __post_init__(self):
        x = np.array(self.class1, dtype=np.float64, order="C", ndmin=2)
        y = np.array(self.class2, dtype=np.float64, order="C", ndmin=2)
        if x.ndim != 2 or y.ndim != 2:
            raise PreconditionError("class matrices must be two-dimensional")
        if x.shape[1] != y.shape[1]:
            raise PreconditionError(
                f"column counts differ: class1 has {x.shape[1]}, class2 has {y.shape[1]}")
        if x.shape[0] < 2 or y.shape[0] < 2:
            raise PreconditionError(
                f"each class needs at least 2 rows (got n1={x.shape[0]}, n2={y.shape[0]})")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise DataError("sample contains NaN or infinite entries")
        if self.feature_names is not None and len(self.feature_names) != x.shape[1]:
            raise PreconditionError("feature_names length does not match column count")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "class1", x)
        object.__setattr__(self, "class2", y)
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n1(self):
        return self.class1.shape[0]

    @property
    def n2(self):
        return self.class2.shape[0]

    @property
    def d(self):
        return self.class1.shape[1]

    def columns(self, idx):
        """Sample restricted to the given column indices (0-based)."""
        idx = np.asarray(idx, dtype=np.intp)
        names = None
        if self.feature_names is not None:
            names = [self.feature_names[i] for i in idx]
        return TwoClassSample(self.class1[:, idx], self.class2[:, idx], names)

    def swapped(self):
        return TwoClassSample(self.class2, self.class1, self.feature_names)

    def pooled(self):
        """Stacked rows (class 1 first) and the matching labels in {1, 2}."""
        z = np.vstack([self.class1, self.class2])
        labels = np.concatenate([np.ones(self.n1, dtype=np.int64),
                                 np.full(self.n2, 2, dtype=np.int64)])
        return z, labels

    @classmethod
    def from_labeled(cls, z, labels, feature_names=None):
        """Build from a pooled matrix and labels taking values 1 and 2."""
        z = np.asarray(z, dtype=np.float64)
        labels = np.asarray(labels)
        values = set(np.unique(labels).tolist())
        if values != {1, 2}:
            raise DataError(f"labels must take exactly the values 1 and 2, got {sorted(values)}")
        return cls(z[labels == 1], z[labels == 2], feature_names)
