"""Transitive group actions driving the integrator.

Rotations act on the unit sphere by ``q -> R q``; rigid transforms
``(R, r)`` act on tangent-sphere points ``(q, w)`` by

    (q, w) -> (R q, R w + r x R q),

which preserves both the unit norm of ``q`` and the tangency ``q . w = 0``
(the transported inner product equals the original one exactly).  The
N-component versions act componentwise on ``(N, 6)`` state stacks, with
group elements stored as ``((N, 3, 3), (N, 3))``.

Compatibility with the group product from :mod:`rkmk.algebra`
(``compose_se3``) is what pins the semidirect-product convention; the
test suite checks the identity and compatibility axioms on random input.
"""

from __future__ import annotations

import numpy as np

# Construction-time tolerance on | |q| - 1 | and the looser one on |q . w|,
# which accumulates roundoff faster along a trajectory.
NORM_TOL = 1e-12
TANGENCY_TOL = 1e-10

GroupElement = tuple[np.ndarray, np.ndarray]


def act_s2(R: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Rotate points of the unit sphere; broadcasts over leading axes."""
    return np.einsum("...ij,...j->...i", np.asarray(R, float), np.asarray(q, float))


def act_ts2(g: GroupElement, m: np.ndarray) -> np.ndarray:
    """Rigid-transform action on tangent-sphere points ``(q, w)`` as 6-vectors."""
    R, r = g
    m = np.asarray(m, dtype=float)
    q, w = m[..., :3], m[..., 3:]
    Rq = np.einsum("...ij,...j->...i", R, q)
    Rw = np.einsum("...ij,...j->...i", R, w)
    return np.concatenate([Rq, Rw + np.cross(r, Rq)], axis=-1)


def generator_ts2(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Infinitesimal version of :func:`act_ts2` along the algebra direction ``a``.

    For ``a = (xi, eta)`` and ``m = (q, w)`` this is the derivative at
    t = 0 of ``act_ts2(exp_se3(t a), m)``:

        (xi x q, xi x w + eta x q).
    """
    a = np.asarray(a, dtype=float)
    m = np.asarray(m, dtype=float)
    xi, eta = a[..., :3], a[..., 3:]
    q, w = m[..., :3], m[..., 3:]
    return np.concatenate([np.cross(xi, q), np.cross(xi, w) + np.cross(eta, q)], axis=-1)


def _check_lengths(n_group: int, m: np.ndarray, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[1] != 6 or m.shape[0] < 1:
        raise ValueError(f"{name}: expected an (N, 6) state, got shape {m.shape}")
    if m.shape[0] != n_group:
        raise ValueError(f"{name}: length mismatch: {n_group} vs {m.shape[0]}")
    return m


def act_product(g: GroupElement, m: np.ndarray) -> np.ndarray:
    """Componentwise :func:`act_ts2` of an N-fold transform on an ``(N, 6)`` state."""
    R, r = g
    R = np.asarray(R, dtype=float)
    r = np.asarray(r, dtype=float)
    if R.ndim != 3 or R.shape[1:] != (3, 3) or r.shape != (R.shape[0], 3):
        raise ValueError(
            f"act_product: expected ((N,3,3), (N,3)) group element, got {R.shape}, {r.shape}"
        )
    m = _check_lengths(R.shape[0], m, "act_product")
    return act_ts2((R, r), m)


def generator_product(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Componentwise :func:`generator_ts2` for ``(N, 6)`` stacks."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[1] != 6:
        raise ValueError(f"generator_product: expected (N, 6) algebra stack, got {a.shape}")
    m = _check_lengths(a.shape[0], m, "generator_product")
    return generator_ts2(a, m)


def state_violations(m: np.ndarray) -> tuple[float, float]:
    """Worst deviations (| |q|-1 |, |q . w|) over the components of a state."""
    m = np.asarray(m, dtype=float)
    q, w = m[..., :3], m[..., 3:]
    norm_dev = np.abs(np.linalg.norm(q, axis=-1) - 1.0)
    tang_dev = np.abs(np.einsum("...i,...i->...", q, w))
    return float(np.max(norm_dev)), float(np.max(tang_dev))


def validate_state(
    m: np.ndarray, norm_tol: float = NORM_TOL, tangency_tol: float = TANGENCY_TOL
) -> np.ndarray:
    """Check the tangent-bundle invariants, returning the state unchanged."""
    m = np.asarray(m, dtype=float)
    if m.shape[-1] != 6:
        raise ValueError(f"expected trailing axis of length 6, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("state contains non-finite entries")
    norm_dev, tang_dev = state_violations(m)
    if norm_dev > norm_tol:
        raise ValueError(f"direction not on the unit sphere: | |q|-1 | = {norm_dev:.3e}")
    if tang_dev > tangency_tol:
        raise ValueError(f"velocity not tangent: |q . w| = {tang_dev:.3e}")
    return m


def tangent_state(q: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Build a validated state from stacked directions and velocities."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    w = np.atleast_2d(np.asarray(w, dtype=float))
    if q.shape != w.shape or q.shape[-1] != 3:
        raise ValueError(f"expected matching (N, 3) arrays, got {q.shape} and {w.shape}")
    return validate_state(np.concatenate([q, w], axis=-1))


def project_state(m: np.ndarray) -> np.ndarray:
    """Nearest valid state: renormalize each q and remove the w component along it."""
    m = np.asarray(m, dtype=float)
    q, w = m[..., :3], m[..., 3:]
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w = w - np.einsum("...i,...i->...", q, w)[..., None] * q
    return np.concatenate([q, w], axis=-1)
