"""scikit-learn compatible wrappers: Cayley source sampler, channel transformer, MAP classifier."""

import numpy as np
from scipy.special import logsumexp
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_random_state, check_X_y, validate_data

from .channel_model import InducedGmm
from .info_metrics import component_log_densities
from .numerics import as_matrix
from .signal_model import CayleyFamilySpec, build_cayley_family, sample_source


class CayleyGmmSampler(BaseEstimator):
    """Draws labelled transmit vectors from the Cayley-rotated Gaussian mixture.

    Parameters
    ----------
    n : int
        Transmit dimension.
    mb : int
        Legitimate receive antennas; each class has rank ``mb - 1``.
    n_classes : int
    power : float
    eps : float
        Rotation parameter of the Cayley generator.

    Attributes
    ----------
    source_ : GmmSource
    classes_ : ndarray of shape (n_classes,)
        Labels ``1..n_classes``.
    """

    def __init__(self, n=10, mb=6, n_classes=2, power=1.0, eps=0.01):
        self.n = n
        self.mb = mb
        self.n_classes = n_classes
        self.power = power
        self.eps = eps

    def fit(self, X=None, y=None):
        spec = CayleyFamilySpec(self.n, self.mb, self.n_classes, self.power, self.eps)
        self.source_ = build_cayley_family(spec)
        self.classes_ = np.arange(1, self.n_classes + 1)
        return self

    def sample(self, n_samples=1, random_state=None):
        """Return ``(X, y)`` with ``X`` of shape ``(n_samples, n)`` and 1-based labels ``y``."""
        check_is_fitted(self, "source_")
        c, X = sample_source(self.source_, check_random_state(random_state), n_samples)
        return X, c + 1


class ChannelTransformer(TransformerMixin, BaseEstimator):
    """Applies ``y = phi x + w`` row-wise, with ``w ~ N(0, noise_var I)``.

    ``random_state`` is consumed statefully across ``transform`` calls once
    fitted, so repeated calls draw fresh noise.
    """

    def __init__(self, phi=None, noise_var=0.0, random_state=None):
        self.phi = phi
        self.noise_var = noise_var
        self.random_state = random_state

    def fit(self, X, y=None):
        X = validate_data(self, X)
        self.phi_ = as_matrix(self.phi, "phi")
        if self.phi_.shape[1] != X.shape[1]:
            raise ValueError(f"phi expects {self.phi_.shape[1]} features, X has {X.shape[1]}")
        if self.noise_var < 0:
            raise ValueError("noise_var must be >= 0")
        self.rng_ = check_random_state(self.random_state)
        return self

    def transform(self, X):
        check_is_fitted(self, "phi_")
        X = validate_data(self, X, reset=False)
        Y = X @ self.phi_.T
        if self.noise_var > 0:
            Y = Y + np.sqrt(self.noise_var) * self.rng_.standard_normal(Y.shape)
        return Y


class GmmMapClassifier(ClassifierMixin, BaseEstimator):
    """Maximum a posteriori classifier for Gaussian classes.

    ``fit`` estimates priors, means and full covariances per label by maximum
    likelihood, with ``reg_covar`` added to each diagonal. Use
    :meth:`from_induced` to classify with known parameters instead.
    """

    def __init__(self, reg_covar=1e-9):
        self.reg_covar = reg_covar

    def fit(self, X, y):
        X, y = validate_data(self, X, y)
        self.classes_ = unique_labels(y)
        m = X.shape[1]
        means, factors, weights = [], [], []
        for label in self.classes_:
            Xk = X[y == label]
            mu = Xk.mean(axis=0)
            C = np.atleast_2d(np.cov(Xk, rowvar=False, bias=True)) if len(Xk) > 1 else np.zeros((m, m))
            means.append(mu)
            factors.append(np.linalg.cholesky(C + self.reg_covar * np.eye(m)))
            weights.append(len(Xk) / len(X))
        self.gmm_ = InducedGmm(np.array(means), tuple(factors), np.array(weights), 0.0)
        return self

    @classmethod
    def from_induced(cls, igmm, classes=None):
        """A fitted classifier using the known receiver-side mixture ``igmm``."""
        clf = cls(reg_covar=0.0)
        clf.gmm_ = igmm
        clf.classes_ = np.arange(1, igmm.n_classes + 1) if classes is None else np.asarray(classes)
        clf.n_features_in_ = igmm.dim
        return clf

    def _joint_log_likelihood(self, X):
        check_is_fitted(self, "gmm_")
        X = check_array(X)
        if X.shape[1] != self.gmm_.dim:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.gmm_.dim}")
        return component_log_densities(self.gmm_, X)

    def predict_log_proba(self, X):
        jll = self._joint_log_likelihood(X)
        return jll - logsumexp(jll, axis=1, keepdims=True)

    def predict_proba(self, X):
        return np.exp(self.predict_log_proba(X))

    def predict(self, X):
        return self.classes_[np.argmax(self._joint_log_likelihood(X), axis=1)]
