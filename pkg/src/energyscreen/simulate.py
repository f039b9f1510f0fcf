"""Seeded generators for the eight two-class simulation designs.

Every design puts its signal columns first and fills the remaining columns
with i.i.d. noise: standard normal, or standard Cauchy for designs 5 and 6.
Indices below are 0-based.

====  =====================================  ==================================
id    class 1 signal columns                 class 2 signal columns
====  =====================================  ==================================
1     N(0, 1) x 4                            N(1, 1) x 4
2     (0,1), (2,3) bivariate normal, r=0.9   same pairs with r=-0.9
3     (0,1) with r=0.9, column 2 ~ N(1, 1)   (0,1) with r=-0.9, column 2 noise
4     N(0, 1) x 4                            N(0, sd 1/3) x 4
5     Cauchy(0, 1) x 4                       Cauchy(2, 1) x 4
6     Cauchy(0, 1) x 4                       Cauchy(0, 5) x 4
7     N(0, 4) x 4                            .5 N(-1.95, 4-1.95^2) + .5 N(1.95, .)
8     N(0, 1) x 4                            pairs (0,1), (2,3) from a plug-in
====  =====================================  ==================================

Design 8 needs a bivariate sampler with standard normal marginals registered
through :func:`register_sampler`; none is bundled.
"""

from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from .data import TwoClassSample
from .exceptions import ConfigurationError, PreconditionError

EXAMPLE_IDS = tuple(range(1, 9))
MIXTURE_MU = 1.95
RHO = 0.9

_SAMPLERS: Dict[int, Callable] = {}


@dataclass(frozen=True)
class ExampleSpec:
    id: int
    n1: int = 100
    n2: int = 100
    d: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.id not in EXAMPLE_IDS:
            raise ConfigurationError(f"example id must be in 1..8, got {self.id!r}")
        if self.n1 < 2 or self.n2 < 2:
            raise ConfigurationError("each class needs at least 2 observations")
        if self.d < min_dimension(self.id):
            raise ConfigurationError(
                f"example {self.id} needs d >= {min_dimension(self.id)}, got {self.d}")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ConfigurationError("seed must be a non-negative 64-bit integer")


def min_dimension(example_id):
    return 3 if example_id == 3 else 4


def true_signals(example_id):
    """``(marginal, pairs)`` of the design as 0-based index tuples."""
    if example_id in (2, 8):
        return (), ((0, 1), (2, 3))
    if example_id == 3:
        return (2,), ((0, 1),)
    if example_id in EXAMPLE_IDS:
        return (0, 1, 2, 3), ()
    raise ConfigurationError(f"unknown example id {example_id!r}")


def signal_indices(example_id):
    marginal, pairs = true_signals(example_id)
    return tuple(sorted(set(marginal).union(k for p in pairs for k in p)))


def register_sampler(sampler, example_id=8):
    """Register ``sampler(rng, n) -> (n, 2) array`` for the plug-in design."""
    if example_id != 8:
        raise ConfigurationError("only example 8 takes a plug-in sampler")
    if not callable(sampler):
        raise ConfigurationError("sampler must be callable")
    _SAMPLERS[example_id] = sampler


def unregister_sampler(example_id=8):
    _SAMPLERS.pop(example_id, None)


def cauchy(rng, loc, scale, size):
    """Cauchy draws by inverting the distribution function."""
    return loc + scale * np.tan(np.pi * (rng.random(size) - 0.5))


def _bivariate(rng, n, rho):
    z = rng.standard_normal((n, 2))
    return np.column_stack([z[:, 0], rho * z[:, 0] + np.sqrt(1.0 - rho * rho) * z[:, 1]])


def _mixture(rng, n, k):
    sign = np.where(rng.random((n, k)) < 0.5, -1.0, 1.0)
    sd = np.sqrt(4.0 - MIXTURE_MU ** 2)
    return sign * MIXTURE_MU + sd * rng.standard_normal((n, k))


def _plugin_pairs(rng, n):
    sampler = _SAMPLERS.get(8)
    if sampler is None:
        raise ConfigurationError(
            "example 8 needs a bivariate sampler; call register_sampler() first")
    out = np.empty((n, 4))
    for c in (0, 2):
        block = np.asarray(sampler(rng, n), dtype=np.float64)
        if block.shape != (n, 2):
            raise ConfigurationError(f"sampler returned shape {block.shape}, expected ({n}, 2)")
        out[:, c:c + 2] = block
    return out


def _signals(example_id, rng, n1, n2):
    """Signal blocks for both classes (columns before the noise)."""
    if example_id == 1:
        return rng.standard_normal((n1, 4)), 1.0 + rng.standard_normal((n2, 4))
    if example_id == 2:
        x = np.hstack([_bivariate(rng, n1, RHO), _bivariate(rng, n1, RHO)])
        y = np.hstack([_bivariate(rng, n2, -RHO), _bivariate(rng, n2, -RHO)])
        return x, y
    if example_id == 3:
        x = np.hstack([_bivariate(rng, n1, RHO), 1.0 + rng.standard_normal((n1, 1))])
        y = np.hstack([_bivariate(rng, n2, -RHO), rng.standard_normal((n2, 1))])
        return x, y
    if example_id == 4:
        # 1/3 is the scale, not the variance
        return rng.standard_normal((n1, 4)), rng.standard_normal((n2, 4)) / 3.0
    if example_id == 5:
        return cauchy(rng, 0.0, 1.0, (n1, 4)), cauchy(rng, 2.0, 1.0, (n2, 4))
    if example_id == 6:
        return cauchy(rng, 0.0, 1.0, (n1, 4)), cauchy(rng, 0.0, 5.0, (n2, 4))
    if example_id == 7:
        return 2.0 * rng.standard_normal((n1, 4)), _mixture(rng, n2, 4)
    x = rng.standard_normal((n1, 4))
    return x, _plugin_pairs(rng, n2)


def generate(spec: ExampleSpec) -> TwoClassSample:
    """Draw one training sample for ``spec``; identical specs give identical data."""
    if spec.id == 8 and 8 not in _SAMPLERS:
        raise ConfigurationError(
            "example 8 needs a bivariate sampler; call register_sampler() first")
    rng = np.random.default_rng(int(spec.seed))
    xs, ys = _signals(spec.id, rng, spec.n1, spec.n2)
    rest = spec.d - xs.shape[1]
    if rest < 0:
        raise PreconditionError(f"d={spec.d} is smaller than the signal block")
    if spec.id in (5, 6):
        xn = cauchy(rng, 0.0, 1.0, (spec.n1, rest))
        yn = cauchy(rng, 0.0, 1.0, (spec.n2, rest))
    else:
        xn = rng.standard_normal((spec.n1, rest))
        yn = rng.standard_normal((spec.n2, rest))
    return TwoClassSample(np.hstack([xs, xn]), np.hstack([ys, yn]))


__all__ = [
    "ExampleSpec", "generate", "true_signals", "signal_indices", "register_sampler",
    "unregister_sampler", "min_dimension", "cauchy", "EXAMPLE_IDS",
]
