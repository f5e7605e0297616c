"""Scalar kernel and density functions shared by the classifiers.

Two kernel families operate on nonnegative Euclidean distances:

* Gaussian:      K(d) = exp(-d^2 / (2 sigma^2))
* skew-normal:   K(d) = 2 exp(-d^2 / (2 sigma^2)) Phi(alpha d / sigma)

The factor 2 in the skew-normal kernel makes the alpha = 0 case collapse
exactly onto the Gaussian kernel; being a positive constant it never changes
which class wins the argmax, so classifier decisions are unaffected by it.

The module also provides the skew-normal density (location/scale/shape), the
standard normal CDF, and a closed-form approximation of the skew-normal mode
used by the density-estimate sanity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


class KernelFamily(str, Enum):
    GAUSSIAN = "gaussian"
    SKEW_NORMAL = "skew-normal"

    @classmethod
    def parse(cls, value) -> "KernelFamily":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        if key in ("gaussian", "gauss", "normal"):
            return cls.GAUSSIAN
        if key in ("skew-normal", "skewnormal", "skew"):
            return cls.SKEW_NORMAL
        raise ValueError(f"unknown kernel family: {value!r}")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameters.

    Parameters
    ----------
    family : KernelFamily
        Gaussian or skew-normal.
    sigma : float
        Smoothing (scale) parameter, > 0, in feature-space units.
    alpha : float
        Skewness (shape) parameter. Carried but inert for the Gaussian
        family.
    """

    family: KernelFamily
    sigma: float
    alpha: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily.parse(self.family))
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not math.isfinite(self.sigma) or self.sigma <= 0.0:
            raise ValueError(f"sigma must be finite and > 0, got {self.sigma}")
        if not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be finite, got {self.alpha}")

    def evaluate(self, d):
        """Evaluate the kernel at distance(s) ``d``."""
        if self.family is KernelFamily.GAUSSIAN:
            return gaussian_kernel(d, self.sigma)
        return skew_normal_kernel(d, self.sigma, self.alpha)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "sigma": self.sigma, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(family=d["family"], sigma=d["sigma"], alpha=d.get("alpha", 0.0))


@dataclass(frozen=True)
class SkewNormalParams:
    """Location ``xi``, scale ``sigma`` (> 0) and shape ``alpha``."""

    xi: float
    sigma: float
    alpha: float

    def __post_init__(self):
        for name in ("xi", "sigma", "alpha"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


def _as_finite_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _scalar_or_array(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def std_normal_cdf(z):
    """Standard normal CDF Phi(z), evaluated via the complementary error
    function: Phi(z) = erfc(-z / sqrt(2)) / 2.  Absolute error <= 1e-12.
    """
    arr = _as_finite_array(z, "z")
    return _scalar_or_array(0.5 * special.erfc(-arr / _SQRT2))


def gaussian_kernel(d, sigma):
    """Gaussian similarity exp(-d^2 / (2 sigma^2)) of a distance ``d >= 0``."""
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise ValueError(f"sigma must be finite and > 0, got {sigma}")
    arr = _as_finite_array(d, "d")
    if np.any(arr < 0.0):
        raise ValueError("d must be nonnegative")
    return _scalar_or_array(np.exp(-(arr * arr) / (2.0 * sigma * sigma)))


def skew_normal_kernel(d, sigma, alpha):
    """Skew-normal similarity 2 exp(-d^2/(2 sigma^2)) Phi(alpha d / sigma).

    Reduces exactly to :func:`gaussian_kernel` at ``alpha = 0`` since
    2 Phi(0) = 1.  Output lies in [0, 2).
    """
    sigma = float(sigma)
    alpha = float(alpha)
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise ValueError(f"sigma must be finite and > 0, got {sigma}")
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    arr = _as_finite_array(d, "d")
    if np.any(arr < 0.0):
        raise ValueError("d must be nonnegative")
    gauss = np.exp(-(arr * arr) / (2.0 * sigma * sigma))
    tilt = 0.5 * special.erfc(-(alpha * arr / sigma) / _SQRT2)
    return _scalar_or_array(2.0 * gauss * tilt)


def skew_normal_pdf(x, params: SkewNormalParams):
    """Skew-normal density

        f(x) = 2 / (sigma sqrt(2 pi)) exp(-(x-xi)^2 / (2 sigma^2))
               Phi(alpha (x - xi) / sigma)

    which integrates to 1 over the real line for any valid parameters.
    """
    if not isinstance(params, SkewNormalParams):
        raise ValueError("params must be a SkewNormalParams instance")
    arr = _as_finite_array(x, "x")
    z = (arr - params.xi) / params.sigma
    dens = (2.0 / (params.sigma * _SQRT2PI)) * np.exp(-0.5 * z * z)
    tilt = 0.5 * special.erfc(-(params.alpha * z) / _SQRT2)
    return _scalar_or_array(dens * tilt)


def skew_normal_mode(alpha) -> float:
    """Approximate mode location m0(alpha) of the skew-normal with xi = 0,
    sigma = 1:

        m0(alpha) ~= mu_z - gamma1 sigma_z / 2 - sgn(alpha)/2 exp(-2 pi/|alpha|)

    with delta = alpha / sqrt(1 + alpha^2), mu_z = sqrt(2/pi) delta,
    sigma_z = sqrt(1 - mu_z^2) and gamma1 the skewness coefficient
    ((4 - pi)/2) mu_z^3 / (1 - mu_z^2)^(3/2).  Exact at alpha = 0 (mode 0),
    and within 0.01 of the true maximiser for |alpha| <= 10.  Odd in alpha.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    if alpha == 0.0:
        return 0.0
    delta = alpha / math.sqrt(1.0 + alpha * alpha)
    mu_z = math.sqrt(2.0 / math.pi) * delta
    var_z = 1.0 - mu_z * mu_z
    sigma_z = math.sqrt(var_z)
    gamma1 = (4.0 - math.pi) / 2.0 * mu_z**3 / var_z**1.5
    correction = 0.5 * math.copysign(1.0, alpha) * math.exp(-2.0 * math.pi / abs(alpha))
    return mu_z - gamma1 * sigma_z / 2.0 - correction
