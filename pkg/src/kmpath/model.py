"""Polynomial dictionary and the drift/diffusion model of a 1-D SDE.

The SDE is ``dX = f(X) dt + sigma(X) dW`` with ``f`` and ``sigma**2`` both
expanded over monomials ``1, x, x**2, ...`` (ascending degree).
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError, EmptyInputError, ModelDomainError

MAX_DEGREE = 12
WARN_DEGREE = 6


@dataclass(frozen=True)
class PolynomialDictionary:
    """Monomial basis ``{1, x, ..., x**max_degree}``."""

    max_degree: int

    def __post_init__(self):
        if int(self.max_degree) != self.max_degree or self.max_degree < 0:
            raise ConfigError(f"max_degree must be a non-negative integer, got {self.max_degree!r}")
        if self.max_degree > MAX_DEGREE:
            raise ConfigError(f"max_degree {self.max_degree} exceeds the supported maximum {MAX_DEGREE}")

    @property
    def size(self) -> int:
        return self.max_degree + 1

    def names(self) -> list[str]:
        return ["1", "x"] + [f"x^{j}" for j in range(2, self.max_degree + 1)]


def eval_poly(coeffs, x):
    """Evaluate ``sum_j coeffs[j] * x**j`` by Horner's rule.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise DomainError("coefficient vector must be one-dimensional and non-empty")
    xa = np.asarray(x, dtype=float)
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(xa))):
        raise DomainError("eval_poly received non-finite input")
    out = np.full(xa.shape, c[-1])
    for a in c[-2::-1]:
        out = out * xa + a
    if out.ndim == 0:
        return float(out)
    return out


def eval_poly_deriv(coeffs, x):
    """First derivative of the polynomial with coefficients ``coeffs``."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 1:
        return eval_poly([0.0], x)
    return eval_poly(c[1:] * np.arange(1, c.size), x)


def build_design_matrix(samples, dictionary: PolynomialDictionary) -> np.ndarray:
    """Return the ``N x (max_degree + 1)`` Vandermonde matrix of ``samples``.

    Row ``i`` is ``[1, x_i, x_i**2, ...]``; column ``j`` is the sample vector
    raised elementwise to the power ``j``.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInputError("cannot build a design matrix from zero samples")
    if not np.all(np.isfinite(x)):
        raise DomainError("samples must be finite")
    if dictionary.max_degree > WARN_DEGREE:
        warnings.warn(
            f"monomial dictionary of degree {dictionary.max_degree} is badly conditioned",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.vander(x, dictionary.size, increasing=True)


@dataclass(frozen=True)
class SdeModel:
    """Drift and squared diffusion as monomial coefficient vectors.

    Parameters
    ----------
    drift : array_like
        Coefficients of ``f`` in ascending degree.
    diff2 : array_like
        Coefficients of ``sigma**2`` in ascending degree.
    domain : (float, float), optional
        Working interval on which ``sigma**2 >= 0`` is checked (on a uniform
        grid of ``check_points`` nodes). Omit it for learned models whose
        squared diffusion may dip below zero outside the data range.
    """

    drift: np.ndarray
    diff2: np.ndarray
    domain: tuple[float, float] | None = None
    check_points: int = field(default=1001, repr=False)

    def __post_init__(self):
        for name in ("drift", "diff2"):
            arr = np.array(getattr(self, name), dtype=float).ravel()
            if arr.size == 0:
                raise ConfigError(f"{name} coefficients must be non-empty")
            if arr.size > MAX_DEGREE + 1:
                raise ConfigError(f"{name} has degree {arr.size - 1} > {MAX_DEGREE}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} coefficients must be finite")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.domain is not None:
            lo, hi = map(float, self.domain)
            if not lo < hi:
                raise ConfigError(f"empty model domain [{lo}, {hi}]")
            object.__setattr__(self, "domain", (lo, hi))
            self.check_diffusion(lo, hi)

    @property
    def max_degree_drift(self) -> int:
        return self.drift.size - 1

    @property
    def max_degree_diff(self) -> int:
        return self.diff2.size - 1

    def f(self, x):
        return eval_poly(self.drift, x)

    def sigma2(self, x):
        return eval_poly(self.diff2, x)

    def check_diffusion(self, lo, hi, n=None):
        """Raise :class:`ModelDomainError` if ``sigma**2 < 0`` somewhere on ``[lo, hi]``."""
        grid = np.linspace(lo, hi, n or self.check_points)
        s2 = self.sigma2(grid)
        bad = s2 < 0
        if np.any(bad):
            raise ModelDomainError(
                f"squared diffusion is negative on [{grid[bad][0]:.4g}, {grid[bad][-1]:.4g}]"
                f" (min {s2.min():.4g})"
            )

    def to_dict(self) -> dict:
        return {
            "drift": [float(c) for c in self.drift],
            "diff2": [float(c) for c in self.diff2],
            "max_degree_drift": self.max_degree_drift,
            "max_degree_diff": self.max_degree_diff,
        }

    @classmethod
    def from_dict(cls, d: dict, domain=None) -> "SdeModel":
        unknown = set(d) - {"drift", "diff2", "max_degree_drift", "max_degree_diff"}
        if unknown:
            raise ConfigError(f"unknown model keys: {sorted(unknown)}")
        try:
            model = cls(d["drift"], d["diff2"], domain=domain)
        except KeyError as exc:
            raise ConfigError(f"model is missing key {exc}") from None
        for key, deg in (("max_degree_drift", model.max_degree_drift),
                         ("max_degree_diff", model.max_degree_diff)):
            if key in d and int(d[key]) != deg:
                raise ConfigError(f"{key}={d[key]} does not match coefficient length")
        return model

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str, domain=None) -> "SdeModel":
        return cls.from_dict(json.loads(text), domain=domain)

    def __eq__(self, other):
        if not isinstance(other, SdeModel):
            return NotImplemented
        return np.array_equal(self.drift, other.drift) and np.array_equal(self.diff2, other.diff2)

    def __hash__(self):
        return hash((self.drift.tobytes(), self.diff2.tobytes()))


def double_well(noise="additive") -> SdeModel:
    """The two reference systems: ``f = 4x - x**3`` with ``sigma = 1`` or ``sigma = x + 1``."""
    drift = [0.0, 4.0, 0.0, -1.0]
    if noise == "additive":
        return SdeModel(drift, [1.0])
    if noise == "multiplicative":
        return SdeModel(drift, [1.0, 2.0, 1.0])
    raise ValueError(f"unknown noise type {noise!r}")


def ornstein_uhlenbeck(theta=1.0, s=1.0) -> SdeModel:
    return SdeModel([0.0, -theta], [s])
