"""Grid resolution schedules and a priori error bounds for the grid algorithm.

The optimal schedule minimises the number of computed points
sum_k (1/eps_k)^beta subject to the accumulated error reaching a target eps:

    eps_N + C eps_{N-1} + ... + C^{N-1} eps_1 + C^N D sqrt(M) = eps.

Its solution is geometric, eps_k = k_N C^(k/(beta+1)), with N chosen where the
cost as a function of y = C^-N is minimal (y = a^(beta+1), a = D sqrt(M)/eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import GifsError


class EpsilonTooLarge(GifsError, ValueError):
    pass


@dataclass(frozen=True)
class GridSchedule:
    n: tuple[int, ...]
    D: float
    M: int
    provenance: str = "custom"  # "quadratic", "optimal(<eps>)", "constant(<n>)", "custom"

    def __post_init__(self):
        n = tuple(int(x) for x in self.n)
        if not n:
            raise ValueError("a schedule needs at least one step")
        if min(n) < 1:
            raise ValueError("grid resolutions must be >= 1")
        object.__setattr__(self, "n", n)

    @property
    def eps(self) -> tuple[float, ...]:
        diam = self.D * math.sqrt(self.M)
        return tuple(diam / k for k in self.n)

    def __len__(self):
        return len(self.n)

    def __iter__(self):
        return iter(self.n)

    def to_text(self) -> str:
        return "".join(f"{k}\n" for k in self.n)

    @classmethod
    def from_text(cls, text: str, D: float, M: int) -> GridSchedule:
        n = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if not line.isdigit():
                raise ValueError(f"line {lineno}: expected a positive integer, got {line!r}")
            n.append(int(line))
        return cls(tuple(n), D, M, "custom")

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path, D: float, M: int) -> GridSchedule:
        return cls.from_text(Path(path).read_text(), D, M)


def quadratic_schedule(steps: int, D: float, M: int) -> GridSchedule:
    """n_k = k^2 for k = 1..steps."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return GridSchedule(tuple(k * k for k in range(1, steps + 1)), D, M, "quadratic")


def constant_schedule(steps: int, n: int, D: float, M: int) -> GridSchedule:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return GridSchedule((n,) * steps, D, M, f"constant({n})")


@dataclass(frozen=True)
class OptimalPlan:
    target_eps: float
    C: float
    D: float
    M: int
    p: int
    N: int
    k_N: float
    eps0: tuple[float, ...]
    t: float
    K1: float
    K2: float
    K3: float
    a: float
    y: float

    @property
    def beta(self) -> int:
        return self.p * self.M

    def constraint(self, eps: Sequence[float] | None = None) -> float:
        """g(eps) = eps_N + C eps_{N-1} + ... + C^N D sqrt(M) - target."""
        eps = self.eps0 if eps is None else eps
        return accumulated_error(eps, self.C, self.D, self.M) - self.target_eps

    def cost(self, eps: Sequence[float] | None = None) -> float:
        """f(eps) = sum_k eps_k^-beta."""
        eps = np.asarray(self.eps0 if eps is None else eps, dtype=np.float64)
        return float(np.sum(eps ** -self.beta))

    def closed_form_cost(self) -> float:
        """K3 (y^(beta/(beta+1)) - 1)^(beta+1) (y - a)^-beta."""
        return cost_in_y(self.y, self.a, self.K3, self.beta)


def cost_in_y(y: float, a: float, K3: float, beta: int) -> float:
    """Optimal cost after fixing y = C^-N, for y > a."""
    return math.exp(log_cost_in_y(y, a, K3, beta))


def log_cost_in_y(y: float, a: float, K3: float, beta: int) -> float:
    r = beta / (beta + 1)
    return (math.log(K3) + (beta + 1) * math.log(math.expm1(r * math.log(y)))
            - beta * math.log(y - a))


def optimal_plan(target_eps: float, C: float, D: float, M: int, p: int) -> OptimalPlan:
    """Lagrange-optimal per-step errors eps_k^0 for reaching ``target_eps``."""
    if not 0 < C < 1:
        raise ValueError(f"contraction constant must be in (0, 1), got {C!r}")
    diam = D * math.sqrt(M)
    if not 0 < target_eps < diam:
        raise EpsilonTooLarge(f"target {target_eps!r} must lie in (0, D sqrt(M) = {diam!r})")
    beta = p * M
    b1 = beta + 1
    lnC = math.log(C)
    N = math.floor(b1 * math.log(target_eps / diam) / lnC) + 1
    a = diam / target_eps
    # ln y = -N ln C; y must exceed a for the constraint to be solvable
    ln_y = -N * lnC
    if not ln_y > math.log(a):
        raise EpsilonTooLarge(f"N = {N} leaves no slack for target {target_eps!r}")
    y = math.exp(ln_y)
    t = math.expm1(-beta / b1 * N * lnC)
    K1 = -math.expm1(beta / b1 * lnC)
    K2 = K1 ** (-b1)
    K3 = K2 * target_eps ** (-beta)
    k_N = K1 / t * (target_eps * y - diam)
    eps0 = tuple(k_N * math.exp(k * lnC / b1) for k in range(1, N + 1))
    plan = OptimalPlan(target_eps, C, D, M, p, N, k_N, eps0, t, K1, K2, K3, a, y)
    resid = plan.constraint()
    if abs(resid) > 1e-9 * target_eps:
        raise EpsilonTooLarge(f"constraint residual {resid!r} after integer N = {N}")
    return plan


def schedule_from_plan(plan: OptimalPlan) -> GridSchedule:
    """n_k = [D sqrt(M) / eps_k^0] + 1, so every actual eps_k <= eps_k^0."""
    diam = plan.D * math.sqrt(plan.M)
    n = tuple(math.floor(diam / e) + 1 for e in plan.eps0)
    return GridSchedule(n, plan.D, plan.M, f"optimal({plan.target_eps!r})")


def optimal_schedule(target_eps: float, C: float, D: float, M: int, p: int) -> GridSchedule:
    return schedule_from_plan(optimal_plan(target_eps, C, D, M, p))


def accumulated_error(eps: Sequence[float], C: float, D: float, M: int) -> float:
    """sum_{j=0}^{N-1} C^j eps_{N-j} + C^N D sqrt(M), smallest powers of C added last."""
    eps = list(eps)
    N = len(eps)
    total = C ** N * D * math.sqrt(M)
    for j in range(N - 1, -1, -1):
        total += C ** j * eps[N - 1 - j]
    return total


def error_bound(schedule, C: float, D: float | None = None, M: int | None = None) -> float:
    """Bound on h(A~_N, attractor) after running ``schedule`` (GridSchedule or ints)."""
    if isinstance(schedule, GridSchedule):
        D = schedule.D if D is None else D
        M = schedule.M if M is None else M
    if D is None or M is None:
        raise ValueError("D and M are required for a bare list of resolutions")
    ns = list(getattr(schedule, "n", schedule))
    if not ns:
        raise ValueError("schedule is empty")
    diam = D * math.sqrt(M)
    return accumulated_error([diam / n for n in ns], C, D, M)
