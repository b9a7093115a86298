"""Summary statistics over Monte Carlo replicates."""
from dataclasses import dataclass, field, fields

import numpy as np
from scipy import stats as sps

from ..errors import InvalidArgumentError


def _list(a):
    return np.asarray(a, dtype=float).tolist()


@dataclass
class SummaryStats:
    """Moments, normality diagnostics and cross-domain covariance of one statistic.

    ``values`` has shape ``(replicates, domains)``.  ``standardized_*`` refer to
    centering and scaling by the supplied theoretical mean and variance; the
    other moments use the empirical standardization.
    """

    stat: str
    E: float
    n: int
    mean: list
    var: list
    se_mean: list
    se_var: list
    skewness: list
    excess_kurtosis: list
    ks_distance: list
    cov: list
    corr: list
    predicted_mean: list = field(default_factory=list)
    predicted_var: list = field(default_factory=list)
    standardized_mean: list = field(default_factory=list)
    standardized_var: list = field(default_factory=list)

    @classmethod
    def from_values(cls, stat, E, values, predicted_mean=None, predicted_var=None):
        x = np.asarray(values, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        n = x.shape[0]
        if n < 2:
            raise InvalidArgumentError("need at least two replicates")
        mean = x.mean(0)
        var = x.var(0, ddof=1)
        c = x - mean
        m4 = (c ** 4).mean(0)
        # standard error of the sample variance from the fourth central moment
        se_var = np.sqrt(np.maximum(m4 - var ** 2 * (n - 3) / (n - 1), 0.0) / n)
        sd = np.sqrt(var)
        with np.errstate(invalid="ignore", divide="ignore"):
            z = np.where(sd > 0, c / np.where(sd > 0, sd, 1.0), 0.0)
            skew = np.where(sd > 0, sps.skew(x, axis=0), 0.0)
            kurt = np.where(sd > 0, sps.kurtosis(x, axis=0), 0.0)
        ks = np.array([sps.kstest(z[:, j], "norm").statistic if sd[j] > 0 else 1.0
                       for j in range(x.shape[1])])
        cov = np.atleast_2d(np.cov(x, rowvar=False))
        corr = correlation_from_cov(cov)
        out = cls(stat, float(E), int(n), _list(mean), _list(var), _list(sd / np.sqrt(n)),
                  _list(se_var), _list(skew), _list(kurt), _list(ks), _list(cov), _list(corr))
        if predicted_mean is not None and predicted_var is not None:
            pm = np.broadcast_to(np.asarray(predicted_mean, float), mean.shape)
            pv = np.broadcast_to(np.asarray(predicted_var, float), mean.shape)
            t = (x - pm) / np.sqrt(pv)
            out.predicted_mean = _list(pm)
            out.predicted_var = _list(pv)
            out.standardized_mean = _list(t.mean(0))
            out.standardized_var = _list(t.var(0, ddof=1))
        return out

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def correlation_from_cov(cov):
    """Correlation matrix with exact unit diagonal; zero-variance rows give 0."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    sd = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = cov / np.outer(sd, sd)
    corr = np.where(np.outer(sd, sd) > 0, corr, 0.0)
    corr = np.clip(0.5 * (corr + corr.T), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def weighted_line_fit(x, y, se):
    """Weighted least-squares line ``y = a + b x``.

    Returns slope, intercept, slope standard error and the 95% normal
    confidence interval of the slope.
    """
    x, y, se = (np.asarray(v, dtype=float) for v in (x, y, se))
    w = 1.0 / np.maximum(se, 1e-300) ** 2
    A = np.c_[np.ones_like(x), x]
    cov = np.linalg.inv(A.T @ (w[:, None] * A))
    a, b = cov @ (A.T @ (w * y))
    sb = float(np.sqrt(cov[1, 1]))
    q = sps.norm.ppf(0.975)
    return {"slope": float(b), "intercept": float(a), "slope_se": sb,
            "ci": [float(b - q * sb), float(b + q * sb)]}
