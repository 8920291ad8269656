"""Orientation of a cause-effect pair from grouped data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from enci.dataset import DataError, GroupedDataset
from enci.hsic import DEFAULT_ALPHA, hsic_ratio
from enci.kernels import KernelConfig
from enci.trace import DEFAULT_ESTIMATOR, TauProfile, normalize_groups, tau_profile

X_TO_Y = "XtoY"
Y_TO_X = "YtoX"
UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Residuals:
    slope: float
    intercept: float
    residuals: np.ndarray


@dataclass(frozen=True)
class PairDecision:
    direction: str
    r_xy: float
    r_yx: float
    slope_xy: float
    slope_yx: float
    variables: tuple[str, str] = ("X", "Y")

    @property
    def cause(self) -> str | None:
        if self.direction == X_TO_Y:
            return self.variables[0]
        if self.direction == Y_TO_X:
            return self.variables[1]
        return None


def _values(t) -> np.ndarray:
    return np.asarray(t.values if isinstance(t, TauProfile) else t, dtype=float)


def ols_fit(tau_x, tau_y) -> Residuals:
    """Least-squares fit of tau_y on tau_x with an intercept."""
    x = _values(tau_x)
    y = _values(tau_y)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"profiles must be equal-length vectors, got {x.shape} and {y.shape}")
    if x.size < 3:
        raise DataError(f"need at least 3 groups for regression, got {x.size}")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if not sxx > 0:
        raise DataError("regressor has no variation across groups")
    slope = float(xc @ (y - y.mean())) / sxx
    intercept = float(y.mean() - slope * x.mean())
    return Residuals(slope, intercept, y - slope * x - intercept)


def decide(r_xy: float, r_yx: float) -> str:
    if r_xy < r_yx:
        return X_TO_Y
    if r_xy > r_yx:
        return Y_TO_X
    return UNDECIDED


def decide_from_tau(tau_x, tau_y, alpha: float = DEFAULT_ALPHA, variables=("X", "Y"),
                    hsic_cfg: KernelConfig | None = None) -> PairDecision:
    """Regress in both directions and keep the one whose residual looks independent.

    HSIC bandwidths default to the plain median heuristic on each input; the
    kernel used for the trace statistics is not reused here.
    """
    x = _values(tau_x)
    y = _values(tau_y)
    fit_xy = ols_fit(x, y)
    fit_yx = ols_fit(y, x)
    r_xy = hsic_ratio(x, fit_xy.residuals, hsic_cfg, alpha)
    r_yx = hsic_ratio(y, fit_yx.residuals, hsic_cfg, alpha)
    return PairDecision(decide(r_xy, r_yx), r_xy, r_yx, fit_xy.slope, fit_yx.slope, tuple(variables))


def infer_pair(data: GroupedDataset, cfg: KernelConfig | None = None,
               alpha: float = DEFAULT_ALPHA, estimator: str = DEFAULT_ESTIMATOR) -> PairDecision:
    """Decide whether the first variable of ``data`` causes the second or vice versa."""
    if data.n_vars != 2:
        raise DataError(f"pair inference needs exactly 2 variables, got {data.n_vars}")
    data.validate(min_groups=8, min_size=2)
    cfg = cfg or KernelConfig()
    z = normalize_groups(data)
    tau_x = tau_profile(z, 0, cfg, estimator=estimator)
    tau_y = tau_profile(z, 1, cfg, estimator=estimator)
    return decide_from_tau(tau_x, tau_y, alpha, data.variables)
