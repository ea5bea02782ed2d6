"""Localization scaling tools: IPR_q, finite mass exponents, MFA, r-statistic.

The generalized inverse participation ratio of a probability vector p over a
basis is IPR_q = sum_i p_i^q.  When IPR_q(N) follows a power law N^(-tau_q),
the mass exponents tau_q = D_q (q-1) define the Renyi dimensions D_q; a
q-independent D_q is a monofractal.  The finite mass exponent generalizes
tau to consecutive dimensions (the local log-log slope) and is the tool used
to decide whether the power-law regime has been reached at all.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (AllDegenerate, DegenerateStep, DomainError, NotNormalized,
                     TooFewLevels, TooFewPoints, WindowTooLarge)

#: q = 1 is the normalization sum; D_q = tau_q/(q-1) is excluded this close to it
Q_ONE_EXCLUSION = 0.05

#: minimum fit quality for declaring power-law scaling
R2_THRESHOLD = 0.995

#: below this rms deviation a -ln(IPR) sequence counts as exactly flat
_FLAT_RMS = 1e-10

#: mean spacing ratio of a Poisson (regular) spectrum, 2 ln 2 - 1
POISSON_MEAN_R = 0.38629436111989063
#: mean spacing ratio of the COE (chaotic, time-reversal invariant) ensemble
COE_MEAN_R = 0.5307


def ipr_q(p, q: float) -> float:
    """Generalized inverse participation ratio sum_i p_i^q.

    Requires a normalized probability vector and q in (0, 4]; zero entries
    are skipped (0^q = 0).
    """
    if not 0.0 < q <= 4.0:
        raise DomainError(f"q must be in (0, 4], got {q}")
    p = np.asarray(p, dtype=float)
    if p.size and p.min() < -1e-12:
        raise ValueError(f"negative probability {p.min()}")
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1")
    return float(np.sum(p[p > 0.0] ** q))


def finite_tau(n, ipr):
    """Local log-log slopes between consecutive (N, IPR) points.

    Returns (n_mid, tau) with tau = -ln(IPR2/IPR1)/ln(N2/N1) (positive for
    decaying IPR) and n_mid the geometric mean of each pair.
    """
    n = np.asarray(n, dtype=float)
    ipr = np.asarray(ipr, dtype=float)
    if len(n) < 2:
        raise TooFewPoints("need at least two (N, IPR) points")
    dn = np.diff(n)
    if np.any(dn == 0):
        raise DegenerateStep("consecutive dimensions coincide")
    if np.any(dn < 0):
        raise ValueError("dimensions must be increasing")
    tau = -np.diff(np.log(ipr)) / np.diff(np.log(n))
    return np.sqrt(n[:-1] * n[1:]), tau


def moving_average(values, window: int = 5) -> np.ndarray:
    """Rolling mean over `window` entries; output length n - window + 1."""
    values = np.asarray(values, dtype=float)
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if window > len(values):
        raise WindowTooLarge(f"window {window} exceeds length {len(values)}")
    return np.convolve(values, np.full(window, 1.0 / window), mode="valid")


def cumulative_mean(values) -> np.ndarray:
    """Running mean: element k is the mean of the first k+1 values."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty sequence")
    return np.cumsum(values) / np.arange(1, len(values) + 1)


@dataclass(frozen=True)
class ScalingSeries:
    """IPR values of one probe state over increasing Hilbert-space dimensions."""

    meta: dict
    n: np.ndarray = field(repr=False)
    ipr: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        ipr = np.asarray(self.ipr, dtype=float)
        if np.any(np.diff(n) <= 0):
            raise ValueError("dimensions must be strictly increasing")
        if ipr.size and ipr.min() <= 0:
            raise ValueError("IPR values must be positive")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "ipr", ipr)


@dataclass(frozen=True)
class TauSeries:
    """Finite mass exponents of one IPR series, with smoothed variants.

    `smoothed` is the window-sized moving average, aligned with n_mid at the
    centered-as-possible offset (window-1)//2; `cumulative` is the running
    mean of tau.
    """

    meta: dict
    n_mid: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    window: int = 5
    smoothed: np.ndarray = field(repr=False, default=None)
    cumulative: np.ndarray = field(repr=False, default=None)

    @property
    def smoothed_n_mid(self) -> np.ndarray:
        off = (self.window - 1) // 2
        return self.n_mid[off:off + len(self.smoothed)]


def tau_series(n, ipr, window: int = 5, meta: dict | None = None) -> TauSeries:
    """Finite-tau sequence plus moving-average and running-mean views."""
    n_mid, tau = finite_tau(n, ipr)
    smoothed = moving_average(tau, window) if len(tau) >= window else np.empty(0)
    return TauSeries(meta=dict(meta or {}), n_mid=n_mid, tau=tau, window=window,
                     smoothed=smoothed, cumulative=cumulative_mean(tau))


@dataclass(frozen=True)
class PowerLawFit:
    tau: float
    r2: float
    n_points: int
    window: tuple


def fit_power_law(n, ipr, window=None) -> PowerLawFit:
    """Least-squares slope of -ln(IPR) against ln(N) inside a ln N window.

    A sequence that is flat to below 1e-10 rms is reported as a perfect fit
    (tau from the regression, R^2 = 1): the normalization sum at q = 1 and
    pinned states would otherwise divide noise by noise.
    """
    n = np.asarray(n, dtype=float)
    x = np.log(n)
    y = -np.log(np.asarray(ipr, dtype=float))
    if window is not None:
        lo, hi = window
        keep = (x >= lo - 1e-12) & (x <= hi + 1e-12)
        x, y = x[keep], y[keep]
    else:
        lo, hi = (x.min(), x.max()) if len(x) else (np.nan, np.nan)
    if len(x) < 3:
        raise TooFewPoints(f"{len(x)} points inside the fit window {(lo, hi)}")
    coef = np.polyfit(x, y, 1)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= len(y) * _FLAT_RMS ** 2:
        return PowerLawFit(tau=float(coef[0]), r2=1.0, n_points=len(x), window=(lo, hi))
    ss_res = float(np.sum((y - np.polyval(coef, x)) ** 2))
    return PowerLawFit(tau=float(coef[0]), r2=1.0 - ss_res / ss_tot,
                       n_points=len(x), window=(lo, hi))


@dataclass(frozen=True)
class MfaResult:
    """Mass exponents over a q grid with fit diagnostics and the verdict."""

    q: np.ndarray = field(repr=False)
    tau_q: np.ndarray = field(repr=False)
    r2: np.ndarray = field(repr=False)
    d_q: np.ndarray = field(repr=False)  # nan within the q=1 exclusion band
    d0: float = np.nan
    verdict: str = "no-power-law"
    window: tuple = ()
    r2_threshold: float = R2_THRESHOLD


def mfa(n, ipr_by_q, q_grid, window=None, r2_threshold: float = R2_THRESHOLD,
        mono_tol: float = 0.05) -> MfaResult:
    """Multifractal analysis of IPR_q(N) curves sharing one N grid.

    tau_q comes from fit_power_law per q; D_q = tau_q/(q-1) away from the
    q = 1 exclusion band; D0 is the slope of the through-origin weighted fit
    of tau_q against (q-1) (tau_1 = 0 exactly, so the line is anchored
    there).  Verdict: 'no-power-law' if any q fits below the R^2 threshold,
    otherwise 'monofractal' when max_q |D_q - D0| < mono_tol, else
    'multifractal'.
    """
    q_grid = np.asarray(q_grid, dtype=float)
    ipr_by_q = np.asarray(ipr_by_q, dtype=float)
    if ipr_by_q.shape[0] != len(q_grid):
        raise ValueError("ipr_by_q must have one row per q")
    taus = np.empty(len(q_grid))
    r2s = np.empty(len(q_grid))
    ses = np.empty(len(q_grid))
    for i in range(len(q_grid)):
        fit = fit_power_law(n, ipr_by_q[i], window)
        taus[i], r2s[i] = fit.tau, fit.r2
        x = np.log(np.asarray(n, dtype=float))
        y = -np.log(ipr_by_q[i])
        if window is not None:
            keep = (x >= window[0] - 1e-12) & (x <= window[1] + 1e-12)
            x, y = x[keep], y[keep]
        resid = y - np.polyval(np.polyfit(x, y, 1), x)
        denom = np.sum((x - x.mean()) ** 2)
        ses[i] = np.sqrt(np.sum(resid ** 2) / max(len(x) - 2, 1) / denom)
    far = np.abs(q_grid - 1.0) > Q_ONE_EXCLUSION
    d_q = np.where(far, taus / np.where(far, q_grid - 1.0, 1.0), np.nan)
    x1 = q_grid[far] - 1.0
    w = 1.0 / (ses[far] ** 2 + 1e-24)
    d0 = float(np.sum(w * x1 * taus[far]) / np.sum(w * x1 * x1))
    if np.any(r2s < r2_threshold):
        verdict = "no-power-law"
    elif np.nanmax(np.abs(d_q - d0)) < mono_tol:
        verdict = "monofractal"
    else:
        verdict = "multifractal"
    used_window = fit_power_law(n, ipr_by_q[0], window).window
    return MfaResult(q=q_grid, tau_q=taus, r2=r2s, d_q=d_q, d0=d0,
                     verdict=verdict, window=used_window, r2_threshold=r2_threshold)


def r_statistic(levels, return_counts: bool = False):
    """Mean spacing-ratio statistic <min(delta, 1/delta)> of a sorted spectrum.

    delta_i is the ratio of consecutive spacings of the (ascending) levels;
    interior points adjacent to an exactly zero spacing are excluded.
    Returns the mean, or (mean, n_used, n_excluded) with return_counts.
    """
    levels = np.asarray(levels, dtype=float)
    if len(levels) < 3:
        raise TooFewLevels(f"need >= 3 levels, got {len(levels)}")
    d = np.diff(levels)
    if np.any(d < 0):
        raise ValueError("levels must be sorted ascending")
    valid = (d[:-1] > 0.0) & (d[1:] > 0.0)
    n_excluded = int(np.count_nonzero(~valid))
    if not np.any(valid):
        raise AllDegenerate("every spacing ratio involves a zero spacing")
    ratio = d[1:][valid] / d[:-1][valid]
    mean = float(np.mean(np.minimum(ratio, 1.0 / ratio)))
    if return_counts:
        return mean, int(np.count_nonzero(valid)), n_excluded
    return mean
