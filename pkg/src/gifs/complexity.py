"""Closed-form point-count cost models for the deterministic and grid algorithms.

All costs are carried as natural logarithms in ``mpmath.mpf`` numbers: the
deterministic cost is a tower (x0 L^(1/(p-1)))^((1/eps)^gamma) whose logarithm
already leaves the double range for C close to 1 (gamma = ln p / ln(1/C)).
mpf keeps 53-bit mantissas but has an unbounded exponent.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable

import mpmath
from mpmath import mpf

from .core import GifsError

MATERIALIZE_LIMIT = 700  # raw values are produced only below exp(700)


class UnsupportedOrder(GifsError, ValueError):
    pass


@dataclass(frozen=True)
class CostParams:
    x0: int
    L: int
    p: int
    M: int
    C: float

    def __post_init__(self):
        if self.x0 < 1 or self.L < 1 or self.p < 1 or self.M < 1:
            raise ValueError("x0, L, p and M must be positive integers")
        if not 0 < self.C < 1:
            raise ValueError(f"C must lie in (0, 1), got {self.C!r}")

    @property
    def beta(self) -> int:
        return self.p * self.M


@dataclass(frozen=True)
class Cost:
    ln: mpf

    @property
    def value(self) -> float:
        if self.ln >= MATERIALIZE_LIMIT:
            raise OverflowError(f"cost exp({mpmath.nstr(self.ln, 8)}) does not fit a float")
        return math.exp(float(self.ln))


@dataclass(frozen=True)
class DeterministicCost(Cost):
    base: float       # x0 L^(1/(p-1))
    exponent: float   # gamma = log_{1/C} p; the cost is base^((1/eps)^gamma)


@dataclass(frozen=True)
class GridCost(Cost):
    coefficient: float  # (1 - C^(beta/(beta+1)))^-(beta+1)
    power: int          # pM; the cost is coefficient * (1/eps)^power


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")


def cost_deterministic(eps: float, params: CostParams) -> DeterministicCost:
    """C_c(eps) = (x0 L^(1/(p-1)))^((1/eps)^(log_{1/C} p))."""
    _check_eps(eps)
    if params.p < 2:
        raise UnsupportedOrder("the deterministic GIFS cost needs p >= 2; use cost_ifs for p = 1")
    ln_base = math.log(params.x0) + math.log(params.L) / (params.p - 1)
    gamma = math.log(params.p) / -math.log(params.C)
    # the exponent gamma ln(1/eps) reaches ~1e4 for C near 1; extra bits keep exp() accurate
    with mpmath.workprec(113):
        z = mpmath.log(params.p) / -mpmath.log(mpf(params.C)) * -mpmath.log(mpf(eps))
        ln = mpmath.exp(z) * (mpmath.log(params.x0) + mpmath.log(params.L) / (params.p - 1))
    return DeterministicCost(+ln, math.exp(ln_base), gamma)


def cost_grid(eps: float, params: CostParams) -> GridCost:
    """C_g(eps) = (1 - C^(beta/(beta+1)))^-(beta+1) (1/eps)^(pM)."""
    _check_eps(eps)
    b = params.beta
    ln_coef = -(b + 1) * math.log(-math.expm1(b / (b + 1) * math.log(params.C)))
    ln = mpf(ln_coef) + params.p * params.M * mpf(math.log(1 / eps))
    return GridCost(ln, math.exp(ln_coef), params.p * params.M)


@dataclass(frozen=True)
class IfsCost(Cost):
    exponent: float   # ln L / ln(1/C)
    inv_eps: float

    @property
    def value(self) -> float:
        super().value  # overflow check
        return self.inv_eps ** self.exponent


def cost_ifs(eps: float, L: int, C: float) -> IfsCost:
    """Classical IFS cost (1/eps)^(ln L / ln(1/C)); the value is taken as a power, not exp(ln)."""
    _check_eps(eps)
    if not 0 < C < 1:
        raise ValueError(f"C must lie in (0, 1), got {C!r}")
    exponent = math.log(L) / -math.log(C)
    return IfsCost(mpf(-math.log(eps)) * mpf(exponent), exponent, 1 / eps)


def xk_bound(k: int, params: CostParams) -> mpf:
    """ln of L^(-1/(p-1)) (x0 L^(1/(p-1)))^(p^k), an upper bound on x_k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if params.p < 2:
        raise UnsupportedOrder("the point-count bound needs p >= 2")
    c = mpf(math.log(params.L)) / (params.p - 1)
    return mpf(params.p) ** k * (mpf(math.log(params.x0)) + c) - c


def accuracy_factor(system, K0=None) -> float:
    """h(K0, G(K0)) / (1 - C): the scale of the deterministic accuracy statement."""
    from .algorithms import g_step
    from .metrics import hausdorff

    K0 = system.center() if K0 is None else K0
    return hausdorff(K0, g_step(system, K0)).h / (1 - system.C)


@dataclass(frozen=True)
class RatioRow:
    eps: float
    ln_cost_grid: mpf
    ln_cost_det: mpf

    @property
    def ln_ratio(self) -> mpf:
        return self.ln_cost_grid - self.ln_cost_det


def ratio_table(eps_list: Iterable[float], params: CostParams) -> list[RatioRow]:
    """ln C_g - ln C_c for each eps."""
    return [RatioRow(e, cost_grid(e, params).ln, cost_deterministic(e, params).ln)
            for e in eps_list]


def geometric_eps(eps_max: float, eps_min: float, per_decade: int = 1) -> list[float]:
    """eps_max, eps_max / 10^(1/per_decade), ... down to eps_min (inclusive)."""
    if not 0 < eps_min <= eps_max:
        raise ValueError("need 0 < eps_min <= eps_max")
    count = round(per_decade * math.log10(eps_max / eps_min))
    return [eps_max * 10.0 ** (-i / per_decade) for i in range(count + 1)]


def format_number(x) -> str:
    """17 significant digits; mpf values beyond the double range keep their exponent."""
    x = mpf(x)
    if abs(x) < mpf("1e300"):
        return format(float(x), ".17g")
    return mpmath.nstr(x, 17)


def ratio_csv(rows: Iterable[RatioRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eps", "ln_cost_grid", "ln_cost_det", "ln_ratio"])
    for r in rows:
        w.writerow([format_number(r.eps), format_number(r.ln_cost_grid),
                    format_number(r.ln_cost_det), format_number(r.ln_ratio)])
    return buf.getvalue()
