"""Matrix-free kernels for the rotation and rigid-motion Lie algebras.

An angular-velocity-like element of so(3) is a plain 3-vector; an element
of se(3) is a 6-vector ``(xi, eta)`` with ``xi`` the angular block and
``eta`` the translational block.  Rigid transforms are pairs ``(R, r)`` of
a 3x3 rotation and a 3-vector; 4x4 homogeneous matrices are never built
here (they appear only in test oracles).

All kernels broadcast over leading axes, so an N-component product element
is simply the ``(N, 6)`` stack and every operation applies componentwise.
The ``product_*`` wrappers add the explicit shape/length validation wanted
at module boundaries.

Everything in this module is a pure function of immutable inputs and is
safe to call concurrently.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli

# Below this angle the closed-form Rodrigues coefficients lose digits to
# cancellation; switch to 4th-order Taylor polynomials.
SMALL_ANGLE = 1e-4

_EYE3 = np.eye(3)


def hat(v: np.ndarray) -> np.ndarray:
    """Skew matrix of a 3-vector, so that ``hat(v) @ w == cross(v, w)``.

    Accepts stacks: shape (..., 3) maps to (..., 3, 3).
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise ValueError(f"expected trailing axis of length 3, got shape {v.shape}")
    out = np.zeros(v.shape[:-1] + (3, 3))
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    out[..., 0, 1] = -z
    out[..., 0, 2] = y
    out[..., 1, 0] = z
    out[..., 1, 2] = -x
    out[..., 2, 0] = -y
    out[..., 2, 1] = x
    return out


def vee(S: np.ndarray, skew_tol: float = 1e-9) -> np.ndarray:
    """Inverse of :func:`hat` for a single 3x3 skew-symmetric matrix.

    Rejects input whose symmetric part has Frobenius norm above
    ``skew_tol``; the result is read off the three independent entries, so
    ``hat(vee(S))`` reproduces them exactly.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {S.shape}")
    sym = 0.5 * (S + S.T)
    defect = float(np.linalg.norm(sym))
    if defect > skew_tol:
        raise ValueError(f"matrix is not skew-symmetric (symmetric part norm {defect:.3e})")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def bracket_se3(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Lie bracket on se(3): ``[(xi_a, eta_a), (xi_b, eta_b)]``.

    Returns ``(xi_a x xi_b, xi_a x eta_b - xi_b x eta_a)``.  Broadcasts
    over leading axes.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    xi_a, eta_a = a[..., :3], a[..., 3:]
    xi_b, eta_b = b[..., :3], b[..., 3:]
    xi = np.cross(xi_a, xi_b)
    eta = np.cross(xi_a, eta_b) - np.cross(xi_b, eta_a)
    return np.concatenate([xi, eta], axis=-1)


def _rotation_coefficients(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rodrigues coefficients sin(t)/t and (1-cos t)/t^2.

    The second is evaluated as 2*(sin(t/2)/t)^2, which is free of the
    1-cos cancellation, so the closed form stays accurate right down to
    the Taylor switch.
    """
    t2 = theta * theta
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(safe) / safe)
    s_half = np.sin(0.5 * safe) / safe
    b = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, 2.0 * s_half * s_half)
    return a, b


def _translation_coefficient(theta: np.ndarray) -> np.ndarray:
    """(t - sin t)/t^3 with Taylor fallback below the small-angle switch."""
    t2 = theta * theta
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    return np.where(
        small,
        1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
        (safe - np.sin(safe)) / (safe * safe * safe),
    )


def exp_so3(xi: np.ndarray) -> np.ndarray:
    """Rotation exponential (Rodrigues): shape (..., 3) -> (..., 3, 3)."""
    xi = np.asarray(xi, dtype=float)
    theta = np.linalg.norm(xi, axis=-1)
    a, b = _rotation_coefficients(theta)
    K = hat(xi)
    K2 = K @ K
    return _EYE3 + a[..., None, None] * K + b[..., None, None] * K2


def exp_se3(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rigid-motion exponential of a 6-vector ``(xi, eta)``.

    Returns the pair ``(R, r)`` with ``R = exp_so3(xi)`` and
    ``r = V(xi) @ eta`` where ``V`` is the left Jacobian of the rotation
    exponential,

        V = I + (1-cos t)/t^2 * hat(xi) + (t - sin t)/t^3 * hat(xi)^2.

    Agrees with the matrix exponential of the homogeneous representation.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != 6:
        raise ValueError(f"expected trailing axis of length 6, got shape {a.shape}")
    xi, eta = a[..., :3], a[..., 3:]
    theta = np.linalg.norm(xi, axis=-1)
    coef_a, coef_b = _rotation_coefficients(theta)
    coef_c = _translation_coefficient(theta)
    K = hat(xi)
    K2 = K @ K
    R = _EYE3 + coef_a[..., None, None] * K + coef_b[..., None, None] * K2
    V = _EYE3 + coef_b[..., None, None] * K + coef_c[..., None, None] * K2
    r = np.einsum("...ij,...j->...i", V, eta)
    return R, r


@lru_cache(maxsize=None)
def _dexpinv_coefficients(terms: int) -> tuple[float, ...]:
    # B_k / k! for k = 0..terms, Bernoulli numbers with B_1 = -1/2.
    bern = bernoulli(terms)
    return tuple(float(bern[k]) / math.factorial(k) for k in range(terms + 1))


def dexpinv_se3(sigma: np.ndarray, v: np.ndarray, terms: int = 4) -> np.ndarray:
    """Inverse differential of the exponential, truncated after ``terms`` brackets.

    Evaluates the Bernoulli-number series

        sum_{k=0}^{terms} B_k/k! * ad_sigma^k (v)
          = v - 1/2 [sigma, v] + 1/12 [sigma, [sigma, v]] - ...

    ``terms=4`` keeps coefficients (1, -1/2, 1/12, 0, -1/720), which is
    accurate enough for a 5th-order step (the first omitted nonzero term
    is the 6th bracket, since the 5th Bernoulli number vanishes).
    """
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    sigma = np.asarray(sigma, dtype=float)
    v = np.asarray(v, dtype=float)
    coeffs = _dexpinv_coefficients(terms)
    acc = v.copy()
    nested = v
    for k in range(1, terms + 1):
        nested = bracket_se3(sigma, nested)
        if coeffs[k] != 0.0:
            acc += coeffs[k] * nested
    return acc


def compose_se3(
    g: tuple[np.ndarray, np.ndarray], k: tuple[np.ndarray, np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Group product ``(R1, r1) * (R2, r2) = (R1 R2, r1 + R1 r2)``.

    This is the convention under which the tangent-sphere action in
    :mod:`rkmk.actions` is compatible: acting with the product equals
    acting twice.
    """
    rot_g, tr_g = g
    rot_k, tr_k = k
    rot = np.einsum("...ij,...jk->...ik", rot_g, rot_k)
    tr = tr_g + np.einsum("...ij,...j->...i", rot_g, tr_k)
    return rot, tr


def identity_se3(n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Identity transform, or a stack of ``n`` identities when ``n`` is given."""
    if n is None:
        return np.eye(3), np.zeros(3)
    return np.tile(np.eye(3), (n, 1, 1)), np.zeros((n, 3))


def is_rotation(R: np.ndarray, tol: float = 1e-12) -> bool:
    """True when ``R^T R = I`` and ``det R = 1`` to within ``tol``."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    orth = float(np.linalg.norm(R.T @ R - _EYE3))
    return orth <= tol and abs(float(np.linalg.det(R)) - 1.0) <= tol


def _check_product(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[1] != 6 or a.shape[0] < 1:
        raise ValueError(f"{name}: expected an (N, 6) stack with N >= 1, got shape {a.shape}")
    return a


def product_exp(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise exponential of an ``(N, 6)`` stack -> ``((N,3,3), (N,3))``."""
    return exp_se3(_check_product(a, "product_exp"))


def product_bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Componentwise bracket of two ``(N, 6)`` stacks of equal length."""
    a = _check_product(a, "product_bracket")
    b = _check_product(b, "product_bracket")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return bracket_se3(a, b)


def product_dexpinv(sigma: np.ndarray, v: np.ndarray, terms: int = 4) -> np.ndarray:
    """Componentwise :func:`dexpinv_se3` on ``(N, 6)`` stacks of equal length."""
    sigma = _check_product(sigma, "product_dexpinv")
    v = _check_product(v, "product_dexpinv")
    if sigma.shape[0] != v.shape[0]:
        raise ValueError(f"length mismatch: {sigma.shape[0]} vs {v.shape[0]}")
    return dexpinv_se3(sigma, v, terms)
