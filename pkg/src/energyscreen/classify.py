"""gSAVG / bgSAVG classification on a screened feature set.

The dissimilarity between two observations averages ``gamma`` over the
screened singletons and, separately, over the screened pairs. The two block
averages are then added; an empty block is simply left out. A new point is
assigned to the class whose average dissimilarity, corrected for that class's
own spread, is smaller.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from . import _energy_kernels as _k
from .data import TwoClassSample
from .exceptions import DataError, PreconditionError
from .kernels import GammaKernel, get_kernel
from .screening import ScreenedSet


@dataclass(frozen=True)
class DiscriminantModel:
    """Training data restricted to the screened columns plus within-class means.

    ``columns`` maps restricted positions back to original column indices;
    ``marg``, ``pi`` and ``pj`` index the restricted matrices.
    """

    train: TwoClassSample
    screened: ScreenedSet
    kernel: GammaKernel
    within1: float
    within2: float
    d: int
    columns: np.ndarray = field(repr=False)
    marg: np.ndarray = field(repr=False)
    pi: np.ndarray = field(repr=False)
    pj: np.ndarray = field(repr=False)

    def swapped(self):
        """The same model with the class roles exchanged."""
        return DiscriminantModel(self.train.swapped(), self.screened, self.kernel,
                                 self.within2, self.within1, self.d, self.columns,
                                 self.marg, self.pi, self.pj)


def _layout(screened):
    if screened.is_empty():
        raise PreconditionError("the screened set is empty; nothing to classify with")
    columns = np.array(screened.retained(), dtype=np.int64)
    pos = {int(c): k for k, c in enumerate(columns)}
    marg = np.array([pos[k] for k in screened.marginal], dtype=np.int64)
    pi = np.array([pos[i] for i, _ in screened.pairs], dtype=np.int64)
    pj = np.array([pos[j] for _, j in screened.pairs], dtype=np.int64)
    return columns, marg, pi, pj


def _compiled(kernel):
    return _backend.use_numba() and kernel.is_builtin


def h_dissimilarity(u, v, screened: ScreenedSet, kernel) -> float:
    """Block-averaged dissimilarity between two full-dimensional vectors."""
    kernel = get_kernel(kernel)
    _, marg, pi, pj = _layout(screened)
    columns = np.array(screened.retained(), dtype=np.int64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise PreconditionError("u and v must be vectors of equal length")
    if u.shape[0] < screened.d:
        raise PreconditionError(f"vectors have {u.shape[0]} entries, screened set needs {screened.d}")
    return float(_k._h_blocks((u[columns] - v[columns])[None, :], marg, pi, pj, kernel)[0])


def _within(x, marg, pi, pj, kernel):
    if _compiled(kernel):
        return float(_k.h_within_mean_numba(x, marg, pi, pj, kernel.code))
    return _k.h_within_mean_numpy(x, marg, pi, pj, kernel)


def _cross(z, x, marg, pi, pj, kernel):
    if _compiled(kernel):
        return _k.h_cross_mean_numba(z, x, marg, pi, pj, kernel.code)
    return _k.h_cross_mean_numpy(z, x, marg, pi, pj, kernel)


def fit_discriminant(sample: TwoClassSample, screened: ScreenedSet, kernel) -> DiscriminantModel:
    """Store the screened training columns and the within-class mean dissimilarities."""
    kernel = get_kernel(kernel)
    if screened.d != sample.d:
        raise PreconditionError(
            f"screened set was built for d={screened.d}, sample has d={sample.d}")
    columns, marg, pi, pj = _layout(screened)
    train = sample.columns(columns)
    w1 = _within(train.class1, marg, pi, pj, kernel)
    w2 = _within(train.class2, marg, pi, pj, kernel)
    return DiscriminantModel(train, screened, kernel, w1, w2, sample.d, columns, marg, pi, pj)


def _restrict(model, z):
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 1:
        z = z[None, :]
    if z.ndim != 2 or z.shape[1] != model.d:
        raise DataError(f"expected observations with {model.d} features, got shape {z.shape}")
    return np.ascontiguousarray(z[:, model.columns])


def discriminant_scores(model: DiscriminantModel, z) -> np.ndarray:
    """Scores for every row of ``z``; positive values favour class 1."""
    zr = _restrict(model, z)
    m1 = _cross(zr, model.train.class1, model.marg, model.pi, model.pj, model.kernel)
    m2 = _cross(zr, model.train.class2, model.marg, model.pi, model.pj, model.kernel)
    return (m2 - model.within2 / 2.0) - (m1 - model.within1 / 2.0)


def discriminant_score(model: DiscriminantModel, z) -> float:
    """Score of a single full-dimensional observation."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1:
        raise DataError("discriminant_score takes one observation; use discriminant_scores")
    return float(discriminant_scores(model, z)[0])


def predict_many(model: DiscriminantModel, z) -> np.ndarray:
    """Labels for every row of ``z``: 1 when the score is positive, else 2."""
    return np.where(discriminant_scores(model, z) > 0.0, 1, 2)


def predict(model: DiscriminantModel, z) -> int:
    return 1 if discriminant_score(model, z) > 0.0 else 2


def misclassification_rate(model: DiscriminantModel, test: TwoClassSample) -> float:
    """Fraction of test rows assigned to the wrong class."""
    z, labels = test.pooled()
    return error_rate(model, z, labels)


def error_rate(model: DiscriminantModel, z, labels) -> float:
    labels = np.asarray(labels)
    if labels.size == 0:
        raise PreconditionError("test set is empty")
    return float(np.mean(predict_many(model, z) != labels))


__all__ = [
    "DiscriminantModel", "h_dissimilarity", "fit_discriminant", "discriminant_score",
    "discriminant_scores", "predict", "predict_many", "misclassification_rate", "error_rate",
]
