"""Transmitter codebook: Gaussian mixture classes, the Cayley covariance family, sampling."""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .exceptions import InvalidSpecError, SubspaceCollisionWarning
from .numerics import (
    as_matrix,
    cayley_transform,
    orthogonality_error,
    polish_orthogonal,
    skew_matrix,
)

_RANK_TOL = 1e-10
_WEIGHT_TOL = 1e-12
_POWER_SLACK = 1e-9
_POLISH_TOL = 1e-12
_MIN_ANGLE = 1e-8


@dataclass(frozen=True)
class GaussianClass:
    """One mixture component ``N(mean, L L^T)`` stored through its factor ``L`` (n x s)."""

    mean: np.ndarray
    cov_factor: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).ravel()
        L = np.asarray(self.cov_factor, dtype=float)
        if L.ndim == 1:
            L = L[:, None]
        if L.size == 0:
            L = np.zeros((mean.size, 0))
        L = as_matrix(L, "cov_factor")
        if L.shape[0] != mean.size:
            raise ValueError(f"cov_factor has {L.shape[0]} rows, mean has {mean.size} entries")
        if not np.all(np.isfinite(mean)):
            raise ValueError("mean contains NaN or Inf")
        if L.shape[1]:
            sv = np.linalg.svd(L, compute_uv=False)
            if sv[-1] <= _RANK_TOL * max(sv[0], 1.0):
                raise ValueError("cov_factor columns are not linearly independent")
        mean.setflags(write=False)
        L.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov_factor", L)

    @property
    def dim(self):
        return self.mean.size

    @property
    def rank(self):
        return self.cov_factor.shape[1]

    @property
    def cov(self):
        return self.cov_factor @ self.cov_factor.T


@dataclass(frozen=True)
class GmmSource:
    """K Gaussian classes with prior weights and a transmit-power budget.

    Parameters
    ----------
    classes : sequence of GaussianClass
        All of the same dimension.
    weights : array-like of shape (K,)
        Class probabilities, summing to one.
    power_budget : float
        Average power ``P`` with ``E[x^T x] <= P``.
    """

    classes: tuple
    weights: np.ndarray
    power_budget: float

    def __post_init__(self):
        classes = tuple(self.classes)
        if not classes:
            raise ValueError("a source needs at least one class")
        dims = {c.dim for c in classes}
        if len(dims) != 1:
            raise ValueError(f"classes have mixed dimensions {sorted(dims)}")
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size != len(classes):
            raise ValueError(f"{w.size} weights for {len(classes)} classes")
        if np.any(w < 0) or abs(w.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError("weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "power_budget", float(self.power_budget))
        used = source_power(self)
        if used > self.power_budget * (1 + _POWER_SLACK):
            raise ValueError(f"power {used:.6g} exceeds budget {self.power_budget:.6g}")

    @property
    def n_classes(self):
        return len(self.classes)

    @property
    def dim(self):
        return self.classes[0].dim

    @property
    def max_rank(self):
        return max(c.rank for c in self.classes)

    @property
    def means(self):
        return np.stack([c.mean for c in self.classes])

    def class_entropy(self):
        """Entropy of the class index in bits."""
        p = self.weights[self.weights > 0]
        return float(-np.sum(p * np.log2(p)))

    def to_dict(self):
        return {
            "power_budget": self.power_budget,
            "weights": self.weights.tolist(),
            "classes": [
                {
                    "mean": c.mean.tolist(),
                    "cov_factor_shape": list(c.cov_factor.shape),
                    "cov_factor": c.cov_factor.ravel(order="C").tolist(),
                }
                for c in self.classes
            ],
        }

    @classmethod
    def from_dict(cls, d):
        classes = [
            GaussianClass(
                np.asarray(c["mean"], dtype=float),
                np.asarray(c["cov_factor"], dtype=float).reshape(c["cov_factor_shape"]),
            )
            for c in d["classes"]
        ]
        return cls(classes, d["weights"], d["power_budget"])

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CayleyFamilySpec:
    n: int
    mb: int
    K: int
    P: float = 1.0
    eps: float = 0.01

    def __post_init__(self):
        if self.mb < 2:
            raise InvalidSpecError(f"mb must be >= 2 so each class has rank mb - 1 >= 1, got {self.mb}")
        if self.K < 2:
            raise InvalidSpecError(f"K must be >= 2, got {self.K}")
        if self.n < self.mb:
            raise InvalidSpecError(f"need n >= mb, got n={self.n}, mb={self.mb}")
        if not self.P > 0:
            raise InvalidSpecError(f"power budget must be positive, got {self.P}")


def cayley_powers(W, K):
    """``[W, W^2, ..., W^K]``, re-orthogonalized whenever drift exceeds 1e-12."""
    out = []
    Wk = np.eye(W.shape[0])
    for _ in range(K):
        Wk = Wk @ W
        if orthogonality_error(Wk) > _POLISH_TOL:
            Wk = polish_orthogonal(Wk)
        out.append(Wk)
    return out


def check_distinct_subspaces(src, min_angle=_MIN_ANGLE):
    """Pairs ``(k, l)`` (1-based) whose shifted range spaces coincide numerically.

    Two classes collide when their means agree and the largest principal angle
    between their column spaces is at most ``min_angle``.
    """
    collisions = []
    for a in range(src.n_classes):
        for b in range(a + 1, src.n_classes):
            ca, cb = src.classes[a], src.classes[b]
            if np.linalg.norm(ca.mean - cb.mean) > min_angle:
                continue
            if ca.rank != cb.rank:
                continue
            if ca.rank == 0 or np.max(subspace_angles(ca.cov_factor, cb.cov_factor)) <= min_angle:
                collisions.append((a + 1, b + 1))
    return collisions


def build_cayley_family(spec, W=None):
    """Zero-mean, equiprobable K-class source with rotated rank-(mb-1) covariances.

    Class ``k`` (1-based) has covariance ``P/(mb-1) W^k diag(I_{mb-1}, 0) (W^k)^T``
    with ``W`` the Cayley transform of ``skew_matrix(n, eps)``. Only the factor
    ``sqrt(P/(mb-1))`` times the first ``mb-1`` columns of ``W^k`` is stored.

    ``W`` overrides the rotation; it exists so validation can inject faults.
    For ``eps != 0`` a :class:`SubspaceCollisionWarning` is emitted when two
    classes share a range space.
    """
    if W is None:
        W = cayley_transform(skew_matrix(spec.n, spec.eps))
    s = spec.mb - 1
    scale = np.sqrt(spec.P / s)
    classes = [
        GaussianClass(np.zeros(spec.n), scale * Wk[:, :s]) for Wk in cayley_powers(W, spec.K)
    ]
    src = GmmSource(classes, np.full(spec.K, 1.0 / spec.K), spec.P)
    if spec.eps != 0:
        collisions = check_distinct_subspaces(src)
        if collisions:
            warnings.warn(
                f"classes {collisions} share a range space; the legitimate receiver cannot separate them",
                SubspaceCollisionWarning,
                stacklevel=2,
            )
    return src


def source_power(src):
    """Average transmit power ``sum_k p_k (tr Sigma_k + |mu_k|^2)``."""
    return float(
        sum(
            p * (np.sum(c.cov_factor**2) + c.mean @ c.mean)
            for p, c in zip(src.weights, src.classes)
        )
    )


def sample_classes(src, rng, size):
    """Draw ``size`` 0-based class indices by inverse CDF on the cumulative weights."""
    cdf = np.cumsum(src.weights)
    cdf[-1] = 1.0
    u = rng.random(size)
    return np.searchsorted(cdf, u, side="right")


def sample_class(src, rng):
    """One class index in ``{1, ..., K}``."""
    return int(sample_classes(src, rng, 1)[0]) + 1


def sample_signal(src, c, rng, size=None):
    """Draw ``x = mu_c + L_c g`` for the 1-based class ``c``.

    Returns a vector, or an array of shape ``(size, n)`` when ``size`` is given.
    """
    if not 1 <= c <= src.n_classes:
        raise ValueError(f"class index {c} outside 1..{src.n_classes}")
    cls = src.classes[c - 1]
    if size is None:
        return cls.mean + cls.cov_factor @ rng.standard_normal(cls.rank)
    return cls.mean + rng.standard_normal((size, cls.rank)) @ cls.cov_factor.T


def sample_source(src, rng, size):
    """Joint draws ``(c, X)``; ``c`` is 0-based, ``X`` has shape ``(size, n)``."""
    c = sample_classes(src, rng, size)
    X = np.empty((size, src.dim))
    g_cols = src.max_rank
    G = rng.standard_normal((size, g_cols))
    for k, cls in enumerate(src.classes):
        idx = c == k
        X[idx] = cls.mean + G[idx, : cls.rank] @ cls.cov_factor.T
    return c, X
