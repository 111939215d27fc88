"""Characteristic quartics of the transformed radial equation and their roots.

Four quartic families appear:

* the mode quartic (one per spherical mode k) governing perturbations of the
  Kelvin-transformed minimal profile, with closed-form roots beta_j^(k);
* the mean quartic, its k = 0 member, governing the radial mean;
* two integer-root families ("nm" below) that arise in the analysis of
  non-minimal solutions, whose roots are small integers in N and i.

Closed forms are cross-checked against a companion-matrix quartic solver.
"""

from __future__ import annotations

import cmath
import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import spectra
from .errors import DomainError, NumericalFailure
from .params import (
    Parameters,
    TheoremBranch,
    alpha_of,
    classify_theorem_regime,
    require_admissible,
)

RESIDUAL_TOL = 1e-9
DEGENERATE_TOL = 1e-6
#: Roots closer than this (pairwise) are treated as a numerically double root.
DEGENERATE_GAP = 1e-5
SNAP_TOL = 1e-10


class Family(enum.Enum):
    Mode = "mode"        # one quartic per spherical mode k
    Mean = "mean"        # radial mean (k = 0)
    NmMode = "nm-mode"   # non-minimal, per-mode
    NmMean = "nm-mean"   # non-minimal, radial mean
    NmTilde = "nm-tilde" # non-minimal, shifted profile


@dataclass(frozen=True)
class Quartic:
    """Monic quartic c4*x^4 + ... + c0 with c4 = 1."""

    c3: float
    c2: float
    c1: float
    c0: float
    c4: float = 1.0

    def coeffs(self) -> tuple[float, float, float, float, float]:
        return (self.c4, self.c3, self.c2, self.c1, self.c0)

    def __call__(self, x: complex) -> complex:
        return (((x + self.c3) * x + self.c2) * x + self.c1) * x + self.c0


@dataclass(frozen=True)
class RootSet:
    roots: tuple[complex, complex, complex, complex]
    family: Family
    index: Optional[int] = None   # k for mode families, i for nm families
    rho: Optional[float] = None   # rho_k where applicable
    degenerate: bool = False


@dataclass
class ClaimCheck:
    claim: str
    description: str
    passed: bool
    margin: float  # worst margin over the grid; > 0 means strictly satisfied


@dataclass
class ClaimReport:
    N: int
    p: float
    k_max: int
    checks: list[ClaimCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst_margin(self) -> float:
        return min((c.margin for c in self.checks), default=math.inf)


def _snap_real(z: complex) -> complex:
    """Clamp a root to the real axis when its imaginary part is roundoff."""
    if abs(z.imag) < SNAP_TOL * (1.0 + abs(z.real)):
        return complex(z.real, 0.0)
    return z


def rho_k(params: Parameters, k: int) -> float:
    a = alpha_of(params.p)
    N = params.N
    return (N - 2.0 + 2.0 * k) ** 2 + params.p * a * (2.0 - a) * (
        N - 2.0 + a
    ) * (N - 4.0 + a)


def mode_quartic(params: Parameters, k: int) -> Quartic:
    """Characteristic quartic of the log-radius mode-k perturbation equation."""
    require_admissible(params)
    if k < 0:
        raise DomainError(f"k={k} must be >= 0")
    N, p = params.N, params.p
    a = alpha_of(p)
    lam = spectra.eigenvalue(k, N)
    Lp = a * (2.0 - a) * (N - 2.0 + a) * (N - 4.0 + a)  # L^(-(p+1))
    c3 = 2.0 * (N - 4.0 + 2.0 * a)
    c2 = (
        N * N + 6.0 * a * N + 6.0 * a * a - 10.0 * N - 24.0 * a + 20.0
        - 2.0 * lam
    )
    c1 = 2.0 * (N - 4.0 + 2.0 * a) * (
        N * a - N - 4.0 * a + a * a + 2.0 - lam
    )
    c0 = (
        lam * lam
        - 2.0 * (N * a + a * a - N - 4.0 * a + 4.0) * lam
        - (p + 1.0) * Lp
    )
    return Quartic(c3=c3, c2=c2, c1=c1, c0=c0)


def mean_quartic(params: Parameters) -> Quartic:
    """The k = 0 quartic governing the radial mean of the Kelvin profile."""
    return mode_quartic(params, 0)


def mode_roots_closed(params: Parameters, k: int) -> RootSet:
    """Closed-form roots beta_j^(k), ordered (beta_1, beta_2, beta_3, beta_4)."""
    require_admissible(params)
    if k < 0:
        raise DomainError(f"k={k} must be >= 0")
    N = params.N
    a = alpha_of(params.p)
    rho = rho_k(params, k)
    base = 4.0 - N - 2.0 * a
    outer = 4.0 + (N - 2.0 + 2.0 * k) ** 2
    sqrt_rho = math.sqrt(rho)
    s_plus = cmath.sqrt(outer + 4.0 * sqrt_rho)
    s_minus = cmath.sqrt(outer - 4.0 * sqrt_rho)
    roots = tuple(
        _snap_real(0.5 * (base + s))
        for s in (s_plus, -s_plus, s_minus, -s_minus)
    )
    degenerate = abs(outer - 4.0 * sqrt_rho) < DEGENERATE_GAP
    fam = Family.Mean if k == 0 else Family.Mode
    return RootSet(roots=roots, family=fam, index=k, rho=rho, degenerate=degenerate)


def mean_roots_closed(params: Parameters) -> RootSet:
    return mode_roots_closed(params, 0)


def nonminimal_quartic(N: int, i: int, family: Family) -> Quartic:
    """One of the two non-minimal quartic families, or their mean member."""
    if N < 3:
        raise DomainError(f"N={N} must be >= 3")
    if family == Family.NmMean:
        lam = 0
    else:
        if i < 1:
            raise DomainError(f"i={i} must be >= 1 for mode families")
        lam = spectra.eigenvalue(i, N)
    if family in (Family.NmMode, Family.NmMean):
        return Quartic(
            c3=2.0 * N,
            c2=N * N + 2.0 * N - 4.0 - 2.0 * lam,
            c1=2.0 * N * (N - 2.0 - lam),
            c0=-lam * (2.0 * N - lam),
        )
    if family == Family.NmTilde:
        return Quartic(
            c3=2.0 * (N - 2.0),
            c2=N * N - 4.0 * N + 2.0 - 2.0 * lam,
            c1=-2.0 * (N - 2.0 + (N - 2.0) * lam),
            c0=-(N - 1.0) * (N - 3.0) - 2.0 * lam + lam * lam,
        )
    raise DomainError(f"family {family} is not a non-minimal family")


def nonminimal_roots_closed(N: int, i: int, family: Family) -> RootSet:
    """Integer closed-form roots of the non-minimal quartics."""
    if N < 3:
        raise DomainError(f"N={N} must be >= 3")
    if family == Family.NmMean:
        roots = (0.0, 2.0 - N, -2.0, float(-N))
        idx = None
    elif family == Family.NmMode:
        if i < 1:
            raise DomainError(f"i={i} must be >= 1")
        roots = (float(i), 2.0 - N - i, float(i - 2), float(-N - i))
        idx = i
    elif family == Family.NmTilde:
        if i < 1:
            raise DomainError(f"i={i} must be >= 1")
        roots = (float(i + 1), 3.0 - N - i, float(i - 1), float(1 - N - i))
        idx = i
    else:
        raise DomainError(f"family {family} is not a non-minimal family")
    return RootSet(
        roots=tuple(complex(r, 0.0) for r in roots), family=family, index=idx
    )


def solve_quartic(q: Quartic, degenerate_ok: bool = False) -> RootSet:
    """Numeric roots via the companion matrix, polished by Newton steps."""
    coeffs = q.coeffs()
    if not all(math.isfinite(c) for c in coeffs):
        raise NumericalFailure("non-finite quartic coefficients")
    raw = np.roots(coeffs)
    polished = []
    for z in raw:
        z = complex(z)
        for _ in range(3):
            fz = q(z)
            dz = ((4.0 * z + 3.0 * q.c3) * z + 2.0 * q.c2) * z + q.c1
            if dz == 0:
                break
            step = fz / dz
            if abs(step) < 1e-17 * (1.0 + abs(z)):
                break
            z -= step
        polished.append(_snap_real(z))
    # Conjugate pairing: rebuild exact conjugates from the positive-imag members.
    polished = _pair_conjugates(polished)
    polished = _refine_double_roots(q, polished)
    gaps = [abs(a - b) for a, b in itertools.combinations(polished, 2)]
    degenerate = min(gaps) < DEGENERATE_GAP
    tol = DEGENERATE_TOL if (degenerate or degenerate_ok) else RESIDUAL_TOL
    for z in polished:
        if abs(q(z)) > tol * (1.0 + abs(z) ** 4):
            raise NumericalFailure(
                f"root residual {abs(q(z)):.3e} above tolerance for root {z}"
            )
    return RootSet(roots=tuple(polished), family=Family.Mean, degenerate=degenerate)


def _refine_double_roots(q: Quartic, roots: list[complex]) -> list[complex]:
    """Recover full accuracy at (near-)double roots.

    Plain Newton stalls at a double root (error ~ sqrt(machine eps)); a
    double root of q is a simple root of q', so clusters of two are
    re-polished by Newton on the derivative.
    """
    out = list(roots)
    for i, j in itertools.combinations(range(len(out)), 2):
        zi, zj = out[i], out[j]
        if not 0.0 < abs(zi - zj) < 1e-4 * (1.0 + abs(zi)):
            continue
        z = 0.5 * (zi + zj)
        for _ in range(6):
            dq = ((4.0 * z + 3.0 * q.c3) * z + 2.0 * q.c2) * z + q.c1
            ddq = (12.0 * z + 6.0 * q.c3) * z + 2.0 * q.c2
            if ddq == 0:
                break
            step = dq / ddq
            z -= step
            if abs(step) < 1e-16 * (1.0 + abs(z)):
                break
        # Accept only if the refined point still resolves the quartic; the
        # original pair may have residuals that underflow to zero exactly.
        if abs(q(z)) <= RESIDUAL_TOL * (1.0 + abs(z) ** 4):
            z = _snap_real(z)
            out[i] = z
            out[j] = z.conjugate() if z.imag != 0.0 else z
    return out


def _pair_conjugates(roots: list[complex]) -> list[complex]:
    out = list(roots)
    used = set()
    for idx, z in enumerate(out):
        if idx in used or z.imag <= 0:
            continue
        best, best_d = None, math.inf
        for jdx, w in enumerate(out):
            if jdx == idx or jdx in used or w.imag >= 0:
                continue
            d = abs(w - z.conjugate())
            if d < best_d:
                best, best_d = jdx, d
        if best is not None:
            out[best] = z.conjugate()
            used.update((idx, best))
    return out


def match_roots(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Best bijective pairing distance between two 4-root sets.

    Brute force over the 24 permutations; returns the largest matched
    pairwise distance under the optimal assignment.
    """
    best = math.inf
    for perm in itertools.permutations(range(len(b))):
        worst = max(abs(a[i] - b[j]) for i, j in enumerate(perm))
        if worst < best:
            best = worst
    return best


def decaying_exponents(rs: RootSet) -> list[complex]:
    """Roots with negative real part, sorted by descending real part."""
    neg = [z for z in rs.roots if z.real < 0.0]
    return sorted(neg, key=lambda z: (-z.real, z.imag))


def verify_claims(params: Parameters, k_max: int) -> ClaimReport:
    """Check the root-structure claims for modes 1..k_max at one (N, p)."""
    require_admissible(params)
    if k_max < 2:
        raise DomainError(f"k_max={k_max} must be >= 2")
    N, p = params.N, params.p
    a = alpha_of(p)
    report = ClaimReport(N=N, p=p, k_max=k_max)
    sets = {k: mode_roots_closed(params, k) for k in range(1, k_max + 1)}

    def add(claim, desc, margin, strict=True):
        passed = margin > 0.0 if strict else margin >= 0.0
        report.checks.append(ClaimCheck(claim, desc, passed, margin))

    def eq(err, tol=1e-10):
        # Equality assertion margin: positive when |err| is within roundoff.
        return tol - abs(err)

    # Realness of every mode root for k >= 1.
    realness = min(
        -abs(z.imag) for k in sets for z in sets[k].roots
    )
    add("claim1-real", "mode roots real for k >= 1", realness, strict=False)

    # Claim 1 ordering b2 < b4 <= b3 < b1 (weak in the middle).
    m_edges = math.inf
    m_mid = math.inf
    for k, rs in sets.items():
        b1, b2, b3, b4 = (z.real for z in rs.roots)
        m_edges = min(m_edges, b4 - b2, b1 - b3)
        m_mid = min(m_mid, b3 - b4)
    add("claim1-order", "b2 < b4 <= b3 < b1 for k >= 1", m_edges)
    add("claim1-order-mid", "b4 <= b3 for k >= 1", m_mid, strict=False)

    # Claims 2 and 3 plus the full k >= 2 ordering chain.
    m_chain = math.inf
    for k in range(2, k_max + 1):
        b1, b2, b3, b4 = (z.real for z in sets[k].roots)
        m_chain = min(m_chain, b4 - b2, -1.0 - b4, b3, b1 - b3)
    add("claim2-3-order", "b2 < b4 < -1 < 0 < b3 < b1 for k >= 2", m_chain)

    # Claim 4: the k = 1 table, split by regime.
    b1, b2, b3, b4 = (z.real for z in sets[1].roots)
    regime = classify_theorem_regime(params)
    thr = (N + 2.0) / (6.0 - N) if N in (3, 4, 5) else None
    boundary = thr is not None and abs(p - thr) < 1e-12
    if regime == TheoremBranch.Thm2_eps_condition:
        desc = "k=1: b4 = -1 < b3 = 0 < b1"
        margin = min(eq(b4 + 1.0), eq(b3), b1, b3 - b4, b4 - b2)
        add("claim4", desc, margin, strict=False)
    elif regime == TheoremBranch.Thm3_little_o_condition:
        desc = "k=1: b4 = -1 < b3 < 0 < b1"
        margin = min(eq(b4 + 1.0), -b3 if not boundary else 0.0, b1)
        add("claim4", desc, margin, strict=False)
        # hat-beta = |b3^(1)| = N + 2 alpha - 5 lies in (0, 1) here.
        hat_beta = N + 2.0 * a - 5.0
        add(
            "claim4-hatbeta",
            "hat-beta = N + 2 alpha - 5 in (0, 1)",
            min(hat_beta, 1.0 - hat_beta, eq(abs(b3) - hat_beta)),
            strict=False,
        )
    elif N == 4 and p > 7.0:
        desc = "k=1: b4 = -1 < 0 < b3 < b1"
        margin = min(eq(b4 + 1.0), b3, b1 - b3)
        add("claim4", desc, margin, strict=False)
    else:
        desc = "k=1: b4 = 5 - N - 2 alpha <= -1 = b3"
        target = 5.0 - N - 2.0 * a
        margin = min(eq(b3 + 1.0), eq(b4 - target),
                     -1.0 - b4 if not boundary else 0.0)
        add("claim4", desc, margin, strict=False)

    # Identity sqrt(4 + N^2 - 4 sqrt(rho_1)) = |N - 6 + 2 alpha|.
    rho1 = rho_k(params, 1)
    lhs_sq = 4.0 + N * N - 4.0 * math.sqrt(rho1)
    ident = math.sqrt(max(lhs_sq, 0.0)) - abs(N - 6.0 + 2.0 * a)
    add("claim4-identity", "sqrt(4+N^2-4 sqrt(rho_1)) = |N-6+2a|",
        eq(ident, tol=1e-12), strict=False)

    # Monotonicity in k of each root branch.
    m_mono = math.inf
    for k in range(1, k_max):
        c1, c2, c3, c4 = (z.real for z in sets[k].roots)
        d1, d2, d3, d4 = (z.real for z in sets[k + 1].roots)
        m_mono = min(m_mono, d1 - c1, c2 - d2, d3 - c3, c4 - d4)
    add("remark-monotone", "b1,b3 increase and b2,b4 decrease in k", m_mono)

    # Increment limits: successive differences approach +-1.
    if k_max >= 100:
        c = [z.real for z in sets[k_max - 1].roots]
        d = [z.real for z in sets[k_max].roots]
        drift = max(
            abs(d[0] - c[0] - 1.0),
            abs(d[1] - c[1] + 1.0),
            abs(d[2] - c[2] - 1.0),
            abs(d[3] - c[3] + 1.0),
        )
        add("remark-increments", "root increments approach +-1", 0.05 - drift,
            strict=False)

    return report
