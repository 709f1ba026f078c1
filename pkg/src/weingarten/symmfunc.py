"""Elementary symmetric function algebra on real eigenvalue vectors.

Evaluates sigma_k and its gradient without subset enumeration, tests
membership in the positivity cones Gamma_k, and checks the classical
inequalities between normalized symmetric functions that certify
admissibility of curvature vectors.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "SingularQuotientError",
    "sigma",
    "sigma_all",
    "sigma_gradient",
    "in_gamma_cone",
    "newton_maclaurin_holds",
    "quotient_monotone_holds",
    "sigma_quotient",
]

#: relative slack for the inequality checks
INEQUALITY_SLACK = 1e-10


class SingularQuotientError(ZeroDivisionError):
    """Denominator sigma_l vanished; the vector sits on a cone boundary."""


def _as_vector(values):
    lam = np.asarray(values, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("eigenvalue vector must be 1-D and nonempty")
    if not np.all(np.isfinite(lam)):
        raise ValueError("eigenvalue vector entries must be finite")
    return lam


def sigma_all(values):
    """All elementary symmetric polynomials sigma_0..sigma_n of a vector.

    Expands prod_i (1 + lam_i x) one factor at a time; coefficient j of
    the expansion is sigma_j.  O(n^2) and numerically stable, no subset
    enumeration.
    """
    lam = _as_vector(values)
    n = lam.size
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    for i in range(n):
        for j in range(i + 1, 0, -1):
            coeffs[j] += lam[i] * coeffs[j - 1]
    return coeffs


def sigma(values, k):
    """sigma_k of the vector; sigma_0 = 1 by convention."""
    lam = _as_vector(values)
    if not 0 <= k <= lam.size:
        raise ValueError(f"order k={k} outside 0..{lam.size}")
    return float(sigma_all(lam)[k])


def sigma_gradient(values, k):
    """Gradient of sigma_k: component i equals sigma_{k-1} of the vector
    with entry i removed."""
    lam = _as_vector(values)
    n = lam.size
    if not 1 <= k <= n:
        raise ValueError(f"order k={k} outside 1..{n}")
    grad = np.empty(n)
    for i in range(n):
        grad[i] = sigma_all(np.delete(lam, i))[k - 1]
    return grad


def in_gamma_cone(values, k):
    """Strict membership test for the cone Gamma_k = {sigma_j > 0, j <= k}."""
    lam = _as_vector(values)
    if not 1 <= k <= lam.size:
        raise ValueError(f"cone order k={k} outside 1..{lam.size}")
    sig = sigma_all(lam)
    return bool(np.all(sig[1 : k + 1] > 0.0))


def newton_maclaurin_holds(values, k, l):
    """Check k(n-l+1) sigma_{l-1} sigma_k <= l(n-k+1) sigma_l sigma_{k-1}
    up to a relative slack of 1e-10 on the scale of both sides."""
    lam = _as_vector(values)
    n = lam.size
    if not (1 <= l < k <= n):
        raise ValueError(f"need 1 <= l < k <= n, got l={l}, k={k}, n={n}")
    sig = sigma_all(lam)
    lhs = k * (n - l + 1) * sig[l - 1] * sig[k]
    rhs = l * (n - k + 1) * sig[l] * sig[k - 1]
    slack = INEQUALITY_SLACK * max(abs(lhs), abs(rhs), 1.0)
    return bool(lhs <= rhs + slack)


def quotient_monotone_holds(values, k, l, r, s):
    """Monotonicity of normalized quotients for a vector in Gamma_k:

        [(sigma_k/C(n,k)) / (sigma_l/C(n,l))]^(1/(k-l))
            <= [(sigma_r/C(n,r)) / (sigma_s/C(n,s))]^(1/(r-s))

    for k >= r > s >= 0 and l >= s.
    """
    lam = _as_vector(values)
    n = lam.size
    if not (0 <= l < k <= n and 0 <= s < r <= k and s <= l):
        raise ValueError(
            f"need 0 <= l < k <= n, k >= r > s >= 0, l >= s; "
            f"got k={k}, l={l}, r={r}, s={s}, n={n}"
        )
    if not in_gamma_cone(lam, k):
        raise ValueError("quotient monotonicity requires a Gamma_k vector")
    sig = sigma_all(lam)

    def normalized(j):
        return sig[j] / math.comb(n, j)

    lhs = (normalized(k) / normalized(l)) ** (1.0 / (k - l))
    rhs = (normalized(r) / normalized(s)) ** (1.0 / (r - s))
    slack = INEQUALITY_SLACK * max(abs(lhs), abs(rhs), 1.0)
    return bool(lhs <= rhs + slack)


def sigma_quotient(values, k, l):
    """Quotient sigma_k / sigma_l with 0 <= l < k <= n."""
    lam = _as_vector(values)
    if not (0 <= l < k <= lam.size):
        raise ValueError(f"need 0 <= l < k <= n, got l={l}, k={k}, n={lam.size}")
    sig = sigma_all(lam)
    if sig[l] == 0.0:
        raise SingularQuotientError(
            f"sigma_{l} vanished; vector left the admissible cone"
        )
    return float(sig[k] / sig[l])
