"""Legitimate/eavesdropper channels and the receiver-side mixture they induce."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .numerics import as_matrix, cholesky_lower, dct_rows, symmetrize

SNR_CONVENTIONS = ("per-antenna", "total")


def noise_var_from_snr(snr_db, power=1.0, n=1, convention="per-antenna"):
    """Per-receive-antenna noise variance for a given SNR in dB.

    ``"per-antenna"`` divides the budget evenly over the ``n`` transmit antennas,
    ``sigma^2 = (P / n) / 10^(snr/10)``. ``"total"`` uses ``sigma^2 = P / 10^(snr/10)``.
    """
    if convention == "per-antenna":
        signal = power / n
    elif convention == "total":
        signal = power
    else:
        raise ValueError(f"unknown SNR convention {convention!r}; expected one of {SNR_CONVENTIONS}")
    return float(signal * 10.0 ** (-snr_db / 10.0))


@dataclass(frozen=True)
class ChannelPair:
    phi_b: np.ndarray
    phi_e: np.ndarray
    noise_var: float

    def __post_init__(self):
        phi_b = as_matrix(self.phi_b, "phi_b")
        phi_e = as_matrix(self.phi_e, "phi_e")
        if phi_b.shape[1] != phi_e.shape[1]:
            raise ValueError("phi_b and phi_e must have the same number of columns")
        n = phi_b.shape[1]
        if phi_b.shape[0] >= n or phi_e.shape[0] >= n:
            raise ValueError(
                f"receivers need fewer antennas than the transmitter (n={n}, "
                f"mb={phi_b.shape[0]}, me={phi_e.shape[0]})"
            )
        if not self.noise_var >= 0:
            raise ValueError(f"noise_var must be >= 0, got {self.noise_var}")
        object.__setattr__(self, "phi_b", phi_b)
        object.__setattr__(self, "phi_e", phi_e)
        object.__setattr__(self, "noise_var", float(self.noise_var))

    def to_dict(self):
        return {
            "noise_var": self.noise_var,
            "phi_b_shape": list(self.phi_b.shape),
            "phi_b": self.phi_b.ravel().tolist(),
            "phi_e_shape": list(self.phi_e.shape),
            "phi_e": self.phi_e.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            np.asarray(d["phi_b"], dtype=float).reshape(d["phi_b_shape"]),
            np.asarray(d["phi_e"], dtype=float).reshape(d["phi_e_shape"]),
            d["noise_var"],
        )


@dataclass(frozen=True)
class InducedGmm:
    """Mixture observed at a receiver: class ``k`` is ``N(means[k], F_k F_k^T + noise_var I)``."""

    means: np.ndarray
    factors: tuple
    weights: np.ndarray
    noise_var: float

    @property
    def n_classes(self):
        return len(self.factors)

    @property
    def dim(self):
        return self.means.shape[1]

    @cached_property
    def covs(self):
        eye = np.eye(self.dim)
        return np.stack([symmetrize(F @ F.T) + self.noise_var * eye for F in self.factors])

    @cached_property
    def chol(self):
        """Lower Cholesky factors of ``covs``; raises ``SingularMatrixError`` if any is singular."""
        return np.stack([cholesky_lower(C) for C in self.covs])

    def class_entropy(self):
        p = self.weights[self.weights > 0]
        return float(-np.sum(p * np.log2(p)))


def make_bob_dct(n, mb):
    return dct_rows(mb, n)


def make_eve_gaussian(n, me, rng):
    """``me x n`` matrix of i.i.d. standard normal gains."""
    if me > n:
        raise ValueError(f"me={me} exceeds n={n}")
    return rng.standard_normal((me, n))


def induce(src, phi, noise_var):
    """Push ``src`` through ``y = phi x + w`` with ``w ~ N(0, noise_var I)``."""
    phi = as_matrix(phi, "phi")
    if phi.shape[1] != src.dim:
        raise ValueError(f"channel has {phi.shape[1]} columns but the source has dimension {src.dim}")
    if noise_var < 0:
        raise ValueError(f"noise_var must be >= 0, got {noise_var}")
    means = np.stack([phi @ c.mean for c in src.classes])
    factors = tuple(phi @ c.cov_factor for c in src.classes)
    return InducedGmm(means, factors, src.weights.copy(), float(noise_var))


def sample_observation(igmm, c, rng, size=None):
    """Draw from class ``c`` (1-based) of an induced mixture.

    Uses the Cholesky factor of the full covariance when ``noise_var > 0`` and
    the signal factor alone when the channel is noiseless.
    """
    if not 1 <= c <= igmm.n_classes:
        raise ValueError(f"class index {c} outside 1..{igmm.n_classes}")
    k = c - 1
    T = igmm.chol[k] if igmm.noise_var > 0 else igmm.factors[k]
    shape = (T.shape[1],) if size is None else (size, T.shape[1])
    g = rng.standard_normal(shape)
    return igmm.means[k] + g @ T.T


def sample_induced(igmm, rng, size):
    """Joint draws ``(c, Y)`` from the induced mixture; ``c`` is 0-based."""
    cdf = np.cumsum(igmm.weights)
    cdf[-1] = 1.0
    c = np.searchsorted(cdf, rng.random(size), side="right")
    G = rng.standard_normal((size, igmm.dim))
    Y = igmm.means[c] + np.einsum("nij,nj->ni", igmm.chol[c], G)
    return c, Y
