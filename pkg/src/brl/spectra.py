"""Spectrum of the Laplace-Beltrami operator on the unit sphere S^(N-1).

Eigenvalues lambda_k = k(N+k-2) with multiplicities
m_k = (N-2+2k)(N-3+k)! / (k!(N-2)!), all in exact integer arithmetic.
The bilaplacian on the sphere has eigenvalues lambda_k^2 with the same
multiplicities.
"""

from __future__ import annotations

import math

from .errors import DomainError


def _check(k: int, N: int) -> None:
    if k < 0:
        raise DomainError(f"mode index k={k} must be >= 0")
    if N < 3:
        raise DomainError(f"dimension N={N} must be >= 3")


def eigenvalue(k: int, N: int) -> int:
    """lambda_k = k(N+k-2)."""
    _check(k, N)
    return k * (N + k - 2)


def multiplicity(k: int, N: int) -> int:
    """Dimension of the spherical-harmonic eigenspace, as an exact integer."""
    _check(k, N)
    # Difference of binomials avoids the factorial blow-up of the raw formula.
    first = math.comb(N + k - 1, k)
    second = math.comb(N + k - 3, k - 2) if k >= 2 else 0
    return first - second


def bilap_eigenvalue(k: int, N: int) -> int:
    """Eigenvalue of the squared operator: lambda_k^2, same multiplicity."""
    _check(k, N)
    return eigenvalue(k, N) ** 2
