"""Gamma kernels applied to squared differences.

Every admissible kernel maps ``[0, inf)`` to ``[0, inf)`` with
``gamma(0) == 0``. The three built-ins are encoded by small integer codes so
compiled kernels can branch on them; a custom kernel is any vectorised
callable and always runs on the numpy path.
"""

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Optional

import numpy as np

from .exceptions import ConfigurationError, PreconditionError


class GammaKind(IntEnum):
    GAMMA1 = 1  # 1 - exp(-t), bounded
    GAMMA2 = 2  # log(1 + t), Lipschitz
    GAMMA3 = 3  # sqrt(t), unbounded
    CUSTOM = 0


@dataclass(frozen=True)
class GammaKernel:
    """A gamma function ``t -> gamma(t)`` used inside ``gamma(|u - v|^2)``.

    Parameters
    ----------
    kind : GammaKind
        Which built-in map to use, or ``GammaKind.CUSTOM``.
    func : callable, optional
        Vectorised map for ``CUSTOM`` kernels. It must accept a float ndarray
        and return an array of the same shape. Complete monotonicity of its
        derivative is not checked.
    name : str, optional
        Label used in reports; defaults to ``g1``/``g2``/``g3``/``custom``.
    """

    kind: GammaKind
    func: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.kind == GammaKind.CUSTOM:
            if self.func is None:
                raise ConfigurationError("a custom gamma kernel needs a callable")
            at_zero = np.asarray(self.func(np.zeros(1)), dtype=np.float64)
            if at_zero.shape != (1,) or at_zero[0] != 0.0:
                raise ConfigurationError("a custom gamma kernel must map 0 to 0")
        if not self.name:
            label = {1: "g1", 2: "g2", 3: "g3"}.get(int(self.kind), "custom")
            object.__setattr__(self, "name", label)

    @property
    def code(self):
        """Integer code consumed by compiled kernels (0 for custom)."""
        return int(self.kind)

    @property
    def is_builtin(self):
        return self.kind != GammaKind.CUSTOM

    def __call__(self, t):
        return apply_gamma(self, t)

    def __repr__(self):
        return f"GammaKernel({self.name})"


GAMMA1 = GammaKernel(GammaKind.GAMMA1)
GAMMA2 = GammaKernel(GammaKind.GAMMA2)
GAMMA3 = GammaKernel(GammaKind.GAMMA3)

_BY_NAME = {"g1": GAMMA1, "g2": GAMMA2, "g3": GAMMA3,
            "gamma1": GAMMA1, "gamma2": GAMMA2, "gamma3": GAMMA3}


def get_kernel(spec):
    """Resolve ``"g1"``/``"g2"``/``"g3"``, an int code, or a kernel instance."""
    if isinstance(spec, GammaKernel):
        return spec
    if isinstance(spec, (int, np.integer)) and int(spec) in (1, 2, 3):
        return _BY_NAME[f"g{int(spec)}"]
    if isinstance(spec, str) and spec.lower() in _BY_NAME:
        return _BY_NAME[spec.lower()]
    if callable(spec):
        return GammaKernel(GammaKind.CUSTOM, func=spec)
    raise ConfigurationError(f"unknown gamma kernel {spec!r}; use g1, g2 or g3")


def custom_kernel(func, name="custom"):
    return GammaKernel(GammaKind.CUSTOM, func=func, name=name)


def apply_gamma(kernel, t):
    """Vectorised gamma on a non-negative array (no domain check)."""
    t = np.asarray(t, dtype=np.float64)
    code = kernel.code
    if code == 1:
        return -np.expm1(-t)
    if code == 2:
        return np.log1p(t)
    if code == 3:
        return np.sqrt(t)
    return np.asarray(kernel.func(t), dtype=np.float64)


def gamma_eval(kernel, t):
    """Evaluate ``gamma(t)`` for a single non-negative real ``t``.

    Raises
    ------
    PreconditionError
        If ``t`` is negative or NaN.
    """
    kernel = get_kernel(kernel)
    t = float(t)
    if math.isnan(t) or t < 0:
        raise PreconditionError(f"gamma is defined on t >= 0, got {t}")
    return float(apply_gamma(kernel, np.array([t]))[0])
