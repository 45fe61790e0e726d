"""Invariant checks run by ``gmm-wiretap validate``.

Each check takes ``(rng, faults)`` and returns ``(passed, detail)``.
"""

import numpy as np
from scipy.stats import norm

from .channel_model import InducedGmm, induce, make_bob_dct, make_eve_gaussian
from .info_metrics import (
    fano_lower_bound,
    gaussian_entropy,
    lemma1_gap,
    low_noise_rate,
    map_error_rate,
    mc_entropy,
    mi_and_map_error,
    mi_eve_upper,
    mi_mc,
    mixture_covariance,
)
from .numerics import cayley_transform, dct_rows, logdet_psd, orthogonality_error, skew_matrix
from .signal_model import (
    CayleyFamilySpec,
    GaussianClass,
    GmmSource,
    build_cayley_family,
    source_power,
)

N_MC = 20_000


def _rotation(n, eps, faults):
    W = cayley_transform(skew_matrix(n, eps))
    if "nonorthogonal_w" in faults:
        W = W + 1e-3 * np.triu(np.ones((n, n)))
    return W


def _isotropic(means, variances, weights=None):
    means = np.atleast_2d(np.asarray(means, dtype=float))
    K, m = means.shape
    factors = tuple(np.sqrt(v) * np.eye(m) for v in variances)
    w = np.full(K, 1.0 / K) if weights is None else np.asarray(weights, dtype=float)
    return InducedGmm(means, factors, w, 0.0)


def cayley_orthogonality(rng, faults):
    worst = 0.0
    for n in (2, 5, 10, 16):
        for eps in (0.0, 1e-3, 0.01, 0.1, 0.5, rng.uniform(-2, 2)):
            worst = max(worst, orthogonality_error(_rotation(n, eps, faults)))
    return worst <= 1e-10, f"max |W^T W - I|_F = {worst:.2e}"


def cayley_trace_and_power(rng, faults):
    worst = 0.0
    for K in (2, 8, 16):
        for eps in (0.0, 0.005, 0.1, 0.5):
            spec = CayleyFamilySpec(10, 6, K, 1.0, eps)
            src = build_cayley_family(spec, W=_rotation(10, eps, faults))
            traces = [np.trace(c.cov) for c in src.classes]
            worst = max(worst, np.max(np.abs(np.array(traces) - 1.0)), abs(source_power(src) - 1.0))
    return worst <= 1e-10, f"max |tr Sigma_k - P| = {worst:.2e}"


def dct_orthonormal_rows(rng, faults):
    worst = max(np.linalg.norm(dct_rows(m, 10) @ dct_rows(m, 10).T - np.eye(m)) for m in range(1, 11))
    return worst <= 1e-10, f"max |Phi Phi^T - I|_F = {worst:.2e}"


def logdet_rotation_invariance(rng, faults):
    W = _rotation(8, 0.3, faults)
    B = rng.standard_normal((8, 8))
    M = B @ B.T + np.eye(8)
    gap = abs(logdet_psd(W @ M @ W.T) - logdet_psd(M))
    return gap <= 1e-8, f"|logdet(W M W^T) - logdet(M)| = {gap:.2e}"


def mean_spread_psd_fuzz(rng, faults):
    worst = np.inf
    for _ in range(100):
        n, m, K = 6, int(rng.integers(1, 5)), int(rng.integers(2, 6))
        classes = [
            GaussianClass(rng.standard_normal(n), rng.standard_normal((n, int(rng.integers(1, n)))))
            for _ in range(K)
        ]
        w = rng.dirichlet(np.ones(K))
        src = GmmSource(classes, w / w.sum(), 1e9)
        phi = rng.standard_normal((m, n))
        s2 = float(rng.uniform(0, 1))
        igmm = induce(src, phi, s2)
        scale = max(1.0, np.linalg.norm(mixture_covariance(igmm), 2))
        worst = min(worst, lemma1_gap(src, phi, s2) / scale)
    return worst >= -1e-9, f"min relative gap = {worst:.2e}"


def mc_entropy_gaussian(rng, faults):
    igmm = _isotropic([[0.0, 0.0, 0.0]], [2.0])
    est = mc_entropy(igmm, N_MC, rng)
    exact = gaussian_entropy(igmm.covs[0])
    z = abs(est.value - exact) / est.std_err
    return z <= 3, f"{est.value:.4f} vs {exact:.4f} ({z:.2f} se)"


def mc_entropy_separated(rng, faults):
    igmm = _isotropic([[-100.0, 0.0], [100.0, 0.0]], [1.0, 1.0])
    est = mc_entropy(igmm, N_MC, rng)
    exact = gaussian_entropy(np.eye(2)) + 1.0
    z = abs(est.value - exact) / est.std_err
    return z <= 3, f"{est.value:.4f} vs {exact:.4f} ({z:.2f} se)"


def max_entropy_bound(rng, faults):
    worst = -np.inf
    for _ in range(10):
        K, m = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        means = 2 * rng.standard_normal((K, m))
        factors = tuple(rng.standard_normal((m, m)) for _ in range(K))
        igmm = InducedGmm(means, factors, rng.dirichlet(np.ones(K)), 0.1)
        est = mc_entropy(igmm, 5_000, rng)
        worst = max(worst, (est.value - gaussian_entropy(mixture_covariance(igmm))) / est.std_err)
    return worst <= 3, f"max (h_mc - h_gauss)/se = {worst:.2f}"


def map_error_q_oracle(rng, faults):
    igmm = _isotropic([[0.0], [2.0]], [1.0, 1.0])
    est = map_error_rate(igmm, N_MC, rng)
    exact = norm.sf(1.0)
    z = abs(est.value - exact) / est.std_err
    return z <= 3, f"{est.value:.4f} vs Q(1) = {exact:.4f} ({z:.2f} se)"


def fano_consistency(rng, faults):
    src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.1), W=_rotation(10, 0.1, faults))
    worst = np.inf
    for s2 in (1e-2, 1e-3, 1e-4):
        mi, pe = mi_and_map_error(induce(src, make_bob_dct(10, 6), s2), N_MC, rng)
        bound = fano_lower_bound(src.class_entropy(), pe.value, 2)
        worst = min(worst, (mi.value - bound) / mi.std_err)
    return worst >= -3, f"min (I - Fano bound)/se = {worst:.2f}"


def eve_bound_consistency(rng, faults):
    src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, 0.05), W=_rotation(10, 0.05, faults))
    worst = -np.inf
    for _ in range(5):
        eve = induce(src, make_eve_gaussian(10, 4, rng), 1e-3)
        est = mi_mc(eve, 5_000, rng)
        worst = max(worst, (est.value - mi_eve_upper(eve)) / est.std_err)
    return worst <= 3, f"max (I_mc - bound)/se = {worst:.2f}"


def eps_limit(rng, faults):
    phi_e = make_eve_gaussian(10, 4, rng)
    vals = []
    for eps in (1e-2, 1e-3, 1e-4):
        src = build_cayley_family(CayleyFamilySpec(10, 6, 2, 1.0, eps), W=_rotation(10, eps, faults))
        vals.append(mi_eve_upper(induce(src, phi_e, 1e-4)))
    ok = vals[0] > vals[1] > vals[2] and vals[2] < 1e-3
    return ok, "I_upper at eps=1e-2,1e-3,1e-4: " + ", ".join(f"{v:.2e}" for v in vals)


def low_noise_cancellation(rng, faults):
    phi_e = make_eve_gaussian(10, 4, rng)
    worst = max(
        abs(low_noise_rate(build_cayley_family(CayleyFamilySpec(10, 6, K, 1.0, 0.0)), phi_e) - np.log2(K))
        for K in (2, 8)
    )
    return worst <= 1e-9, f"max |R_LN(eps=0) - log2 K| = {worst:.2e}"


CHECKS = (
    cayley_orthogonality,
    cayley_trace_and_power,
    dct_orthonormal_rows,
    logdet_rotation_invariance,
    mean_spread_psd_fuzz,
    mc_entropy_gaussian,
    mc_entropy_separated,
    max_entropy_bound,
    map_error_q_oracle,
    fano_consistency,
    eve_bound_consistency,
    eps_limit,
    low_noise_cancellation,
)
