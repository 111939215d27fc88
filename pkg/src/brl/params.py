"""Problem parameters (N, p), derived constants and regime classification.

The equation under study is the radial biharmonic problem -Lap^2 u = u^(-p)
on R^N.  It has the exact power solution U_s(r) = L * r^alpha with
alpha = 4/(p+1) and L^(-(p+1)) = alpha*(2-alpha)*(N-2+alpha)*(N-4+alpha).
Everything downstream (characteristic quartics, shooting, rate fits) hangs
off the constants computed here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import InadmissibleParameters

#: Margin by which p must sit inside the admissible interval.  At the
#: endpoints (e.g. N=3, p->3) one of the factors in L^(-(p+1)) vanishes
#: and L diverges.
EPS_ADM = 1e-6


@dataclass(frozen=True)
class Parameters:
    """Dimension N >= 3 and nonlinearity exponent p > 1."""

    N: int
    p: float

    def __post_init__(self):
        if not isinstance(self.N, int):
            object.__setattr__(self, "N", int(self.N))


class TheoremBranch(enum.Enum):
    Thm1_main = "Thm1_main"
    Thm2_eps_condition = "Thm2_eps_condition"
    Thm3_little_o_condition = "Thm3_little_o_condition"


class Beta34Branch(enum.Enum):
    RealDistinct = "RealDistinct"
    RealAtMostMinus1 = "RealAtMostMinus1"
    ComplexPair = "ComplexPair"


@dataclass(frozen=True)
class Regime:
    theorem_branch: TheoremBranch
    beta34_branch: Beta34Branch
    # Real and imaginary part of the complex pair; None in the real branches.
    ell: Optional[float] = None
    q: Optional[float] = None


@dataclass(frozen=True)
class DerivedConstants:
    alpha: float
    L: float
    p_star: Optional[float] = None       # N in {3,4,5}; +inf for N=5
    p_threshold: Optional[float] = None  # (N+2)/(6-N), N in {3,4,5}
    p_c: Optional[float] = None          # 5 <= N <= 12
    p3: Optional[tuple[float, float, float, float]] = None  # N == 3


def admissible(params: Parameters, eps: float = EPS_ADM) -> bool:
    """True iff (N, p) is strictly inside the admissible region.

    N = 3 requires 1 < p < 3; N >= 4 only p > 1.  A margin of ``eps``
    keeps L finite.
    """
    N, p = params.N, params.p
    if N < 3:
        return False
    if N == 3:
        return 1.0 + eps < p < 3.0 - eps
    return p > 1.0 + eps


def require_admissible(params: Parameters) -> None:
    if not admissible(params):
        raise InadmissibleParameters(
            f"(N={params.N}, p={params.p}) outside admissible region"
        )


def alpha_of(p: float) -> float:
    return 4.0 / (p + 1.0)


def L_of(N: int, p: float) -> float:
    a = alpha_of(p)
    prod = a * (2.0 - a) * (N - 2.0 + a) * (N - 4.0 + a)
    if prod <= 0.0:
        raise InadmissibleParameters(
            f"L undefined: alpha-product {prod} <= 0 for (N={N}, p={p})"
        )
    return prod ** (-1.0 / (p + 1.0))


def p_c_of(N: int) -> float:
    """Real/complex crossover of the mean-mode root pair, 5 <= N <= 12."""
    H = (N * (N - 4) / 4.0) ** 2
    s = math.sqrt(4.0 + N * N - 4.0 * math.sqrt(N * N + H))
    return (N + 2.0 - s) / (6.0 - N + s)


def p3_of() -> tuple[float, float, float, float]:
    """The four N=3 crossover exponents (p3^1, p3^2, p3^3, p3^4)."""
    s17 = math.sqrt(17.0)
    sm = math.sqrt(13.0 - 3.0 * s17)
    sp = math.sqrt(13.0 + 3.0 * s17)
    p1 = (5.0 - sm) / (3.0 + sm)
    p2 = (5.0 + sm) / (3.0 - sm)
    p3 = (5.0 + sp) / (3.0 - sp)
    p4 = (5.0 - sp) / (3.0 + sp)
    return (p1, p2, p3, p4)


def derive_constants(params: Parameters) -> DerivedConstants:
    require_admissible(params)
    N, p = params.N, params.p
    out = {
        "alpha": alpha_of(p),
        "L": L_of(N, p),
    }
    if N in (3, 4, 5):
        out["p_star"] = math.inf if N == 5 else (N + 3.0) / (5.0 - N)
        out["p_threshold"] = (N + 2.0) / (6.0 - N)
    if 5 <= N <= 12:
        out["p_c"] = p_c_of(N)
    if N == 3:
        out["p3"] = p3_of()
    return DerivedConstants(**out)


def rho0_of(N: int, p: float) -> float:
    """rho_0 = (N-2)^2 + p * L^(-(p+1))."""
    a = alpha_of(p)
    return (N - 2.0) ** 2 + p * a * (2.0 - a) * (N - 2.0 + a) * (N - 4.0 + a)


def hbar(p: float, N: int) -> float:
    """Discriminant-like function deciding realness of the mean root pair.

    Nonnegative iff beta_3, beta_4 are real.
    """
    return (4.0 + (N - 2.0) ** 2) ** 2 - 16.0 * rho0_of(N, p)


def classify_theorem_regime(params: Parameters) -> TheoremBranch:
    require_admissible(params)
    N, p = params.N, params.p
    if N >= 6:
        return TheoremBranch.Thm1_main
    thr = (N + 2.0) / (6.0 - N)
    if N in (3, 5):
        return (
            TheoremBranch.Thm1_main
            if p <= thr
            else TheoremBranch.Thm3_little_o_condition
        )
    # N == 4: (1,3] u (7,inf) main; exactly 7 epsilon-condition; (3,7) little-o
    if abs(p - 7.0) <= 1e-12:
        return TheoremBranch.Thm2_eps_condition
    if p <= 3.0 or p > 7.0:
        return TheoremBranch.Thm1_main
    return TheoremBranch.Thm3_little_o_condition


def classify_beta_branch(params: Parameters) -> Regime:
    """Branch of the mean-mode pair (beta_3, beta_4) following the sign of hbar."""
    require_admissible(params)
    N, p = params.N, params.p
    a = alpha_of(p)
    h = hbar(p, N)
    if h >= 0.0:
        # beta_3 from the closed form decides which real subcase applies.
        rho0 = rho0_of(N, p)
        inner = 4.0 + (N - 2.0) ** 2 - 4.0 * math.sqrt(rho0)
        beta3 = 0.5 * (4.0 - N - 2.0 * a + math.sqrt(max(inner, 0.0)))
        branch = (
            Beta34Branch.RealAtMostMinus1
            if beta3 <= -1.0
            else Beta34Branch.RealDistinct
        )
        return Regime(classify_theorem_regime(params), branch)
    ell = 2.0 - a - N / 2.0
    q = 0.5 * math.sqrt(4.0 * math.sqrt(rho0_of(N, p)) - 4.0 - (N - 2.0) ** 2)
    return Regime(
        classify_theorem_regime(params), Beta34Branch.ComplexPair, ell=ell, q=q
    )
