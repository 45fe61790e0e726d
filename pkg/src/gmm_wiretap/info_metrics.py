"""Entropies, mutual informations, MAP error and secrecy rates for GMM signaling.

All quantities are returned in bits. Internally every log-determinant and
log-density is computed in nats and converted once, at return.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .channel_model import induce, sample_induced
from .exceptions import RankDeficiencyError, SingularMatrixError
from .numerics import logdet_psd, sym_eig, symmetrize

LN2 = np.log(2.0)
_LOG_2PIE = np.log(2.0 * np.pi * np.e)
_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class Estimate:
    value: float
    std_err: float
    n_samples: int

    def __float__(self):
        return float(self.value)


def _mean_estimate(terms):
    n = terms.size
    se = terms.std(ddof=1) / np.sqrt(n) if n > 1 else np.inf
    return Estimate(float(terms.mean()), float(se), int(n))


def gaussian_entropy(cov):
    """Differential entropy ``1/2 log2((2 pi e)^m det cov)``."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    m = cov.shape[0]
    return 0.5 * (m * _LOG_2PIE + logdet_psd(cov)) / LN2


def cond_entropy_given_class(igmm):
    """``h(z | c) = sum_k p_k h(N(., cov_k))``."""
    total = 0.0
    for k, (p, C) in enumerate(zip(igmm.weights, igmm.covs)):
        if p == 0:
            continue
        try:
            total += p * gaussian_entropy(C)
        except SingularMatrixError as exc:
            raise SingularMatrixError(
                f"class {k + 1} covariance is singular: {exc}", pivot=exc.pivot, index=k
            ) from exc
    return total


def mixture_covariance(igmm):
    """Covariance of the whole mixture: ``sum_k p_k (C_k + mu_k mu_k^T) - mu mu^T``."""
    p = igmm.weights
    mu = p @ igmm.means
    second = np.einsum("k,kij->ij", p, igmm.covs) + np.einsum("k,ki,kj->ij", p, igmm.means, igmm.means)
    return symmetrize(second - np.outer(mu, mu))


def mi_eve_upper(igmm):
    """Upper bound on ``I(z; c)`` from the Gaussian max-entropy bound on ``h(z)``."""
    return gaussian_entropy(mixture_covariance(igmm)) - cond_entropy_given_class(igmm)


def component_log_densities(igmm, Y):
    """``log p_k + log N(y; mu_k, C_k)`` in nats, shape ``(N, K)``."""
    Y = np.atleast_2d(Y)
    m = igmm.dim
    out = np.empty((Y.shape[0], igmm.n_classes))
    with np.errstate(divide="ignore"):
        log_w = np.log(igmm.weights)
    for k in range(igmm.n_classes):
        L = igmm.chol[k]
        Z = solve_triangular(L, (Y - igmm.means[k]).T, lower=True)
        half_logdet = np.sum(np.log(np.diag(L)))
        out[:, k] = log_w[k] - 0.5 * np.sum(Z * Z, axis=0) - half_logdet - 0.5 * m * np.log(2 * np.pi)
    return out


def mc_entropy(igmm, n_samples, rng):
    """Monte-Carlo estimate of the mixture's differential entropy ``-E[log2 p(z)]``."""
    _, Y = sample_induced(igmm, rng, n_samples)
    log_p = logsumexp(component_log_densities(igmm, Y), axis=1)
    return _mean_estimate(-log_p / LN2)


def _mi_terms(igmm, c, Y):
    lp = component_log_densities(igmm, Y)
    log_post = lp[np.arange(c.size), c] - logsumexp(lp, axis=1)
    with np.errstate(divide="ignore"):
        log_prior = np.log(igmm.weights)[c]
    return (log_post - log_prior) / LN2, lp


def mi_mc(igmm, n_samples, rng, method="posterior"):
    """Monte-Carlo estimate of ``I(y; c)``.

    ``method="posterior"`` averages ``log2 p(c|y) - log2 p(c)`` over joint draws.
    ``method="entropy"`` subtracts the closed-form ``h(y|c)`` from
    :func:`mc_entropy`. Both are unbiased; the first has far lower variance
    when the classes overlap heavily, because it cancels the spread of
    ``log p(y)`` that both terms share.
    """
    if method == "entropy":
        h = mc_entropy(igmm, n_samples, rng)
        return Estimate(h.value - cond_entropy_given_class(igmm), h.std_err, h.n_samples)
    if method != "posterior":
        raise ValueError(f"unknown method {method!r}")
    c, Y = sample_induced(igmm, rng, n_samples)
    terms, _ = _mi_terms(igmm, c, Y)
    return _mean_estimate(terms)


def _error_estimate(errors):
    n = errors.size
    p = errors.mean()
    return Estimate(float(p), float(np.sqrt(p * (1 - p) / n)), int(n))


def map_error_rate(igmm, n_samples, rng):
    """Empirical misclassification rate of the MAP rule on ``n_samples`` draws."""
    c, Y = sample_induced(igmm, rng, n_samples)
    lp = component_log_densities(igmm, Y)
    return _error_estimate(np.argmax(lp, axis=1) != c)


def mi_and_map_error(igmm, n_samples, rng):
    """``I(y; c)`` and the MAP error rate from one shared set of draws."""
    c, Y = sample_induced(igmm, rng, n_samples)
    terms, lp = _mi_terms(igmm, c, Y)
    return _mean_estimate(terms), _error_estimate(np.argmax(lp, axis=1) != c)


def pushed_mean_covariance(src, phi, noise_var):
    """``Sigma_z - (sum_k p_k phi Sigma_k phi^T + noise_var I)``; the covariance of the pushed means."""
    igmm = induce(src, phi, noise_var)
    zero_mean = np.einsum("k,kij->ij", igmm.weights, igmm.covs)
    return symmetrize(mixture_covariance(igmm) - zero_mean)


def lemma1_gap(src, phi, noise_var):
    """Smallest eigenvalue of the mixture covariance minus its zero-mean counterpart (nonnegative up to rounding)."""
    return float(sym_eig(pushed_mean_covariance(src, phi, noise_var)).eigenvalues[0])


def _checked_logdet(C, what):
    w = sym_eig(symmetrize(C)).eigenvalues
    if w[-1] <= 0 or w[0] <= _RANK_RTOL * w[-1]:
        raise RankDeficiencyError(
            f"{what} is rank deficient (eigenvalues {w[0]:.3e} .. {w[-1]:.3e}); "
            "the eavesdropper needs no more antennas than the class rank",
            pivot=w[0],
        )
    return logdet_psd(C)


def low_noise_rate(src, phi_e):
    """Noiseless-limit achievable secrecy rate for zero-mean classes, in bits.

    ``H(c) - 1/2 log2 det(sum_k p_k G_k) + 1/2 sum_k p_k log2 det(G_k)``
    with ``G_k = phi_e Sigma_k phi_e^T``.
    """
    if np.any(src.means != 0):
        raise ValueError("the noiseless rate formula requires zero-mean classes")
    igmm = induce(src, phi_e, 0.0)
    cond = 0.0
    for k, (p, G) in enumerate(zip(igmm.weights, igmm.covs)):
        if p > 0:
            cond += p * _checked_logdet(G, f"class {k + 1} eavesdropper covariance")
    mix = _checked_logdet(np.einsum("k,kij->ij", igmm.weights, igmm.covs), "eavesdropper mixture covariance")
    return src.class_entropy() - 0.5 * (mix - cond) / LN2


def low_noise_mi_bob(src, phi_b, min_angle=1e-8):
    """Noiseless ``I(y; c)``: ``H(c)`` when Bob's shifted range spaces are pairwise distinct."""
    from .signal_model import GaussianClass, GmmSource, check_distinct_subspaces

    pushed = []
    for cls in src.classes:
        F = phi_b @ cls.cov_factor
        if F.shape[1] and np.linalg.matrix_rank(F) < F.shape[1]:
            raise RankDeficiencyError("the legitimate channel collapses a class range space")
        pushed.append(GaussianClass(phi_b @ cls.mean, F))
    seen = GmmSource(pushed, src.weights, np.inf)
    collisions = check_distinct_subspaces(seen, min_angle)
    if collisions:
        raise SingularMatrixError(f"classes {collisions} are indistinguishable at the legitimate receiver")
    if src.max_rank >= phi_b.shape[0]:
        raise RankDeficiencyError(
            f"the legitimate receiver needs more antennas ({phi_b.shape[0]}) than the class rank ({src.max_rank})"
        )
    return src.class_entropy()


def binary_entropy(p):
    p = np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
    return float(np.nan_to_num(h))


def fano_lower_bound(class_entropy, p_err, K):
    """Lower bound on ``I(y; c)`` implied by Fano's inequality."""
    return class_entropy - binary_entropy(p_err) - p_err * np.log2(max(K - 1, 1))


CSV_COLUMNS = (
    "mi_bob",
    "mi_bob_se",
    "mi_eve_mc",
    "mi_eve_mc_se",
    "mi_eve_upper",
    "equivocation",
    "code_rate",
    "ratio",
    "map_error",
)


@dataclass(frozen=True)
class RateReport:
    """Rates of one (source, channel) instance, in bits per channel use."""

    mi_bob: Estimate
    mi_eve_mc: Estimate
    mi_eve_upper: float
    rs_lower: float
    equivocation: Estimate
    code_rate: float
    map_error: Estimate

    @property
    def ratio(self):
        """Secure fraction ``R_e / R_c`` (``nan`` when the code rate is not positive)."""
        return self.equivocation.value / self.code_rate if self.code_rate > 0 else float("nan")

    def csv_values(self):
        return (
            self.mi_bob.value,
            self.mi_bob.std_err,
            self.mi_eve_mc.value,
            self.mi_eve_mc.std_err,
            self.mi_eve_upper,
            self.equivocation.value,
            self.code_rate,
            self.ratio,
            self.map_error.value,
        )

    def to_dict(self):
        d = asdict(self)
        d["ratio"] = self.ratio
        return d

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def rate_report(src, chans, n_samples, rng):
    """Estimate every rate of a finite-noise instance.

    The equivocation rate ``[I(y;c) - I(z;c)]^+`` uses the Monte-Carlo
    estimate for Eve; the Gaussian bound is reported alongside, and
    ``rs_lower = I(y;c) - bound`` is left unclamped.
    """
    if not chans.noise_var > 0:
        raise ValueError("rate_report needs noise_var > 0; use low_noise_rate for the noiseless limit")
    bob = induce(src, chans.phi_b, chans.noise_var)
    eve = induce(src, chans.phi_e, chans.noise_var)
    mi_bob, p_err = mi_and_map_error(bob, n_samples, rng)
    mi_eve = mi_mc(eve, n_samples, rng)
    upper = mi_eve_upper(eve)
    diff = mi_bob.value - mi_eve.value
    equiv = Estimate(
        max(0.0, diff),
        float(np.hypot(mi_bob.std_err, mi_eve.std_err)),
        n_samples,
    )
    return RateReport(
        mi_bob=mi_bob,
        mi_eve_mc=mi_eve,
        mi_eve_upper=upper,
        rs_lower=mi_bob.value - upper,
        equivocation=equiv,
        code_rate=mi_bob.value,
        map_error=p_err,
    )
