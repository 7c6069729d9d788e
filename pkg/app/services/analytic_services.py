import math
from collections.abc import Callable

import numpy as np
from cachetools import cached
from scipy.integrate import simpson

import settings
from app.exceptions import AnalyticDomainError
from app.schemas.analytic_schemas import (
    ConstantsReport,
    DBar,
    DomainConstants,
    RBreakpoints,
    RTableRow
)

DOMAIN = DomainConstants()
BETA_LO = DOMAIN.beta_lo
BETA_MID = DOMAIN.beta_mid
BETA_HI = DOMAIN.beta_hi
LOG_RATIO = DOMAIN.log_ratio


def _check(name: str, x: float, lo: float, hi: float) -> None:
    if not lo <= x <= hi:
        raise AnalyticDomainError(name, x, lo, hi)


def density_g(x: float) -> float:
    _check('density_g', x, BETA_LO, BETA_HI)
    return 1 / (LOG_RATIO * x)


def cdf_x(x: float) -> float:
    _check('cdf_x', x, BETA_LO, BETA_HI)
    return math.log(x / BETA_LO) / LOG_RATIO


def inverse_cdf(t: float | np.ndarray) -> float | np.ndarray:
    return BETA_LO * (BETA_HI / BETA_LO) ** t


def sample_x(rng: np.random.Generator,
             size: int | None = None) -> float | np.ndarray:
    """Draws X with density g on [1.1, 2.9] by inverting its CDF."""
    return inverse_cdf(rng.random(size))


@cached(cache={})
def breakpoints() -> RBreakpoints:
    ratio = BETA_HI / BETA_LO
    return RBreakpoints(a1=BETA_HI / ratio ** 0.95,
                        a2=BETA_HI / ratio ** 0.45)


def _r_first(x):
    return (x - 1) / 2


def _r_middle(x):
    return ((x - 1) / 2
            - np.log(BETA_HI / (1 + 2 * np.log(BETA_HI / x) / LOG_RATIO))
            / LOG_RATIO)


def _r_last(x):
    return (x - 1) / 2 - math.log(BETA_HI / BETA_MID) / LOG_RATIO


def r_value(x: float) -> float:
    _check('r_value', x, BETA_LO, BETA_MID)
    bounds = breakpoints()
    if x < bounds.a1:
        return float(_r_first(x))
    if x <= bounds.a2:
        return float(_r_middle(x))
    return float(_r_last(x))


def r_array(xs: np.ndarray) -> np.ndarray:
    """Vectorised r; entries outside [1.1, 1.9] come back as nan."""
    xs = np.asarray(xs, dtype=np.float64)
    bounds = breakpoints()
    inside = (xs >= BETA_LO) & (xs <= BETA_MID)
    safe = np.where(inside, xs, BETA_LO)
    values = np.select(
        [safe < bounds.a1, safe <= bounds.a2],
        [_r_first(safe), _r_middle(safe)],
        default=_r_last(safe)
    )
    return np.where(inside, values, np.nan)


@cached(cache={})
def dbar_closed_form() -> DBar:
    head = math.log(BETA_HI / BETA_MID) / LOG_RATIO + 0.5
    return DBar(value=head ** 2 - 0.1 / LOG_RATIO - 0.75)


def integrate(function: Callable[[np.ndarray], np.ndarray],
              lo: float, hi: float, subintervals: int) -> float:
    """Composite Simpson rule with an even number of panels."""
    panels = max(2, subintervals + subintervals % 2)
    xs = np.linspace(lo, hi, panels + 1)
    return float(simpson(function(xs), x=xs))


def _rg(xs: np.ndarray) -> np.ndarray:
    return r_array(xs) / (LOG_RATIO * xs)


def integrate_rg(lo: float, hi: float, subintervals: int) -> float:
    return integrate(_rg, lo, hi, subintervals)


@cached(cache={})
def dbar_quadrature(subintervals: int = settings.QUADRATURE_SUBINTERVALS
                    ) -> float:
    """∫ r·g over [1.1, 1.9], split where r changes branch."""
    if subintervals < 1:
        raise ValueError('subintervals must be positive')
    bounds = breakpoints()
    cuts = [BETA_LO, bounds.a1, bounds.a2, BETA_MID]
    width = BETA_MID - BETA_LO
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        share = max(2, round(subintervals * (hi - lo) / width))
        total += integrate_rg(lo, hi, share)
    return total


def heavy_threshold(x_large: float | np.ndarray) -> float | np.ndarray:
    """Least X_u that makes an edge heavy once X_v ≥ 1.9."""
    return BETA_HI / (BETA_HI / BETA_LO) ** ((x_large - 1) / 2)


def heavy_edge_mask(x_a: np.ndarray, x_b: np.ndarray,
                    x_edge: np.ndarray) -> np.ndarray:
    """
    Weight-3 rule for inner edges. Endpoints are ordered internally so the
    comparison uses the smaller and larger X value.
    """
    x_a = np.asarray(x_a, dtype=np.float64)
    x_b = np.asarray(x_b, dtype=np.float64)
    small = np.minimum(x_a, x_b)
    large = np.maximum(x_a, x_b)
    dbar = dbar_closed_form().value
    upper = large >= BETA_MID
    by_threshold = upper & (small >= heavy_threshold(large))
    lower_product = np.where(upper, 0.0,
                             r_array(np.where(upper, BETA_LO, small))
                             * r_array(np.where(upper, BETA_LO, large)))
    by_coin = ~upper & (np.asarray(x_edge) <= lower_product / dbar)
    return by_threshold | by_coin


def _survival(x: float) -> float:
    return math.log(BETA_HI / x) / LOG_RATIO


def weight3_probability(alpha: float) -> float:
    """
    Probability that an inner edge is heavy given X_v = alpha, integrating
    the rule over X_u and the edge coin. Four regimes by alpha.
    """
    _check('weight3_probability', alpha, BETA_LO, BETA_HI)
    if alpha >= BETA_MID:
        return _survival(heavy_threshold(alpha))

    bounds = breakpoints()
    if alpha > bounds.a2:
        upper = _survival(BETA_MID)
    elif alpha >= bounds.a1:
        upper = _survival(1 + 2 * math.log(BETA_HI / alpha) / LOG_RATIO)
    else:
        upper = 0.0
    coin = r_value(alpha) * dbar_quadrature() / dbar_closed_form().value
    return upper + coin


def simulate_weight3_frequency(alpha: float, trials: int,
                               rng: np.random.Generator) -> float:
    x_other = sample_x(rng, trials)
    coins = rng.random(trials)
    fixed = np.full(trials, alpha)
    return float(heavy_edge_mask(fixed, x_other, coins).mean())


def r_table(points: int = 17) -> list[RTableRow]:
    xs = np.linspace(BETA_LO, BETA_MID, points)
    return [RTableRow(x=float(x), r=r_value(float(x))) for x in xs]


def constants_report(points: int = 17) -> ConstantsReport:
    bounds = breakpoints()
    return ConstantsReport(
        beta_lo=BETA_LO,
        beta_mid=BETA_MID,
        beta_hi=BETA_HI,
        log_ratio=LOG_RATIO,
        a1=bounds.a1,
        a2=bounds.a2,
        dbar=dbar_closed_form().value,
        dbar_quadrature=dbar_quadrature(),
        r_table=r_table(points)
    )
