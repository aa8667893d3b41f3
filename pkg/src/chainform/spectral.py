"""The matrix zoo of the analysis and its numerically verified spectra.

Matrices:
  A1  - n x n stochastic matrix of the one-dimensional opposed dynamics on
        the augmented edge vector (first coordinate absorbing).
  A2  - n x n doubly stochastic tridiagonal matrix of the displacement
        dynamics (self-loops of weight 1/2 at both ends).
  A3  - (n-1) x (n-1) symmetric substochastic matrix of the dynamics with
        one stationary endpoint (first row sums to 1/2).
  Jacobian - derivative of the go-to-midpoint vector map in the stacked
        coordinates (x_2..x_n, y_2..y_n); evaluated either at an arbitrary
        configuration or in closed form at the marching chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from chainform.chain import ETA_ZERO, ChainError, Configuration, ZeroOuterEdge


class NonConvergence(RuntimeError):
    """The eigensolver failed to converge within its iteration budget."""


@dataclass(frozen=True)
class MatrixSpec:
    """A named dense real matrix. ``kind`` is one of
    {"A1", "A2", "A3", "jacobian-at", "jacobian-marching", "strategy"}."""

    kind: str
    dim: int
    entries: np.ndarray = field()

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.shape != (self.dim, self.dim):
            raise ChainError(f"expected ({self.dim},{self.dim}), got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def symmetric(self) -> bool:
        return bool(np.allclose(self.entries, self.entries.T, atol=1e-12, rtol=0.0))


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray  # sorted descending (real part; see method tag)
    residuals: np.ndarray  # ||A x - lambda x|| / ||x|| per pair
    method: str


def _tridiagonal_half(m: int) -> np.ndarray:
    a = np.zeros((m, m))
    for i in range(m - 1):
        a[i, i + 1] = 0.5
        a[i + 1, i] = 0.5
    return a


def a1(n: int) -> MatrixSpec:
    """Stochastic matrix of the opposed dynamics with one absorbing state.

    Row 1 is absorbing; rows for the two outer edges place weight 1/2 on the
    absorbing coordinate (the virtual unit edge)."""
    if n < 3:
        raise ChainError("need n >= 3")
    a = np.zeros((n, n))
    a[0, 0] = 1.0
    a[1, 0] = 0.5
    a[1, 2] = 0.5
    for i in range(2, n - 1):
        a[i, i - 1] = 0.5
        a[i, i + 1] = 0.5
    a[n - 1, 0] = 0.5
    a[n - 1, n - 2] = 0.5
    assert np.allclose(a.sum(axis=1), 1.0)
    return MatrixSpec("A1", n, a)


def a2(n: int) -> MatrixSpec:
    """Doubly stochastic tridiagonal matrix of the displacement dynamics."""
    if n < 3:
        raise ChainError("need n >= 3")
    a = _tridiagonal_half(n)
    a[0, 0] = 0.5
    a[n - 1, n - 1] = 0.5
    assert np.allclose(a.sum(axis=1), 1.0) and np.allclose(a.sum(axis=0), 1.0)
    return MatrixSpec("A2", n, a)


def a3(n: int) -> MatrixSpec:
    """Symmetric substochastic matrix of the one-stationary-endpoint
    dynamics; (n-1) x (n-1), first row sums to 1/2."""
    if n < 3:
        raise ChainError("need n >= 3")
    m = n - 1
    a = _tridiagonal_half(m)
    a[m - 1, m - 1] = 0.5
    sums = a.sum(axis=1)
    assert math.isclose(sums[0], 0.5) and np.allclose(sums[1:], 1.0)
    return MatrixSpec("A3", m, a)


def jacobian_at(config: Configuration) -> MatrixSpec:
    """Jacobian of the one-round vector map at a configuration, in the
    stacked coordinates (x_2..x_n, y_2..y_n).

    Inner coordinates contribute the 1/2-tridiagonal pattern in each block;
    the outer-edge normalization contributes the four corner entries
    y^2/(2 r^3), -xy/(2 r^3), x^2/(2 r^3) with r = ||w||."""
    w = config.vectors()
    lens = np.linalg.norm(w, axis=1)
    if lens[0] <= ETA_ZERO:
        raise ZeroOuterEdge("w_2")
    if lens[-1] <= ETA_ZERO:
        raise ZeroOuterEdge("w_n")
    m = config.n - 1
    j = np.zeros((2 * m, 2 * m))
    j[:m, :m] = _tridiagonal_half(m)
    j[m:, m:] = _tridiagonal_half(m)

    def corner(k: int):
        x, y = w[k]
        r3 = 2.0 * lens[k] ** 3
        j[k, k] = y * y / r3
        j[k, m + k] = -x * y / r3
        j[m + k, m + k] = x * x / r3
        j[m + k, k] = -x * y / r3

    corner(0)
    corner(m - 1)
    return MatrixSpec("jacobian-at", 2 * m, j)


def jacobian_marching(n: int) -> MatrixSpec:
    """Closed-form Jacobian at the marching chain (chain laid along the
    second axis, so the corners n/(2(n-2)) sit in the first block)."""
    if n < 3:
        raise ChainError("need n >= 3")
    m = n - 1
    j = np.zeros((2 * m, 2 * m))
    j[:m, :m] = _tridiagonal_half(m)
    j[m:, m:] = _tridiagonal_half(m)
    c = n / (2.0 * (n - 2.0))
    j[0, 0] = c
    j[m - 1, m - 1] = c
    return MatrixSpec("jacobian-marching", 2 * m, j)


def build(kind: str, n: Optional[int] = None, config: Optional[Configuration] = None) -> MatrixSpec:
    """Dispatch by kind name; see the module docstring for the zoo."""
    if kind == "A1":
        return a1(n)
    if kind == "A2":
        return a2(n)
    if kind == "A3":
        return a3(n)
    if kind == "jacobian-marching":
        return jacobian_marching(n)
    if kind == "jacobian-at":
        if config is None:
            raise ChainError("jacobian-at needs a configuration")
        return jacobian_at(config)
    raise ChainError(f"unknown matrix kind {kind!r}")


def eigenvalues(m: MatrixSpec, tol: float = 1e-8) -> SpectrumResult:
    """All eigenvalues with per-pair residuals ||A x - lambda x|| / ||x||.

    Symmetric matrices use the symmetric solver (real spectrum); general
    matrices report real parts when the spectrum is numerically real, else
    moduli (tagged in ``method``)."""
    if m.dim > 512:
        raise ChainError("dimension cap is 512")
    a = m.entries
    try:
        if m.symmetric:
            vals, vecs = np.linalg.eigh(a)
            method = "symmetric"
        else:
            vals, vecs = np.linalg.eig(a)
            method = "general"
    except np.linalg.LinAlgError as exc:  # pragma: no cover - solver failure
        raise NonConvergence(str(exc)) from exc
    res = np.linalg.norm(a @ vecs - vecs * vals, axis=0) / np.linalg.norm(vecs, axis=0)
    if method == "general":
        if np.abs(vals.imag).max(initial=0.0) <= tol:
            vals = vals.real
        else:
            vals = np.abs(vals)
            method = "general-modulus"
    order = np.argsort(vals)[::-1]
    return SpectrumResult(vals[order], np.real(res[order]), method)


def verify_eigenpair(m: MatrixSpec, lam: float, x: np.ndarray) -> float:
    """Relative residual ||A x - lambda x|| / ||x|| of a claimed pair."""
    x = np.asarray(x, dtype=float)
    if x.shape != (m.dim,):
        raise ChainError(f"vector must have shape ({m.dim},)")
    return float(np.linalg.norm(m.entries @ x - lam * x) / np.linalg.norm(x))


def rayleigh_bound(m: MatrixSpec) -> float:
    """Rayleigh quotient of the all-ones vector: a lower bound on the
    largest eigenvalue of a symmetric matrix (equals sum(A)/dim)."""
    if not m.symmetric:
        raise ChainError("Rayleigh lower bound requires a symmetric matrix")
    return float(m.entries.sum() / m.dim)


def spectral_radius(m: MatrixSpec) -> float:
    """Maximum eigenvalue modulus."""
    if m.dim > 512:
        raise ChainError("dimension cap is 512")
    try:
        if m.symmetric:
            vals = np.linalg.eigvalsh(m.entries)
        else:
            vals = np.linalg.eigvals(m.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NonConvergence(str(exc)) from exc
    return float(np.abs(vals).max())


def mixing_time_bounds(
    m: MatrixSpec, eps: float, pi_min: Optional[float] = None
) -> tuple[float, float]:
    """Relaxation-time bounds on the mixing time from the spectral gap.

    lower = (1/(1-lambda_2) - 1) * ln(1/(2 eps))   (0 at eps = 1/2)
    upper = (1/(1-lambda_2) - 1) * ln(1/(eps * pi_min))

    lambda_2 is the second-largest eigenvalue modulus. pi_min defaults to
    the uniform 1/n for A2; for A1 (absorbing chain) only the lower bound
    is meaningful and upper is +inf unless pi_min is supplied.
    """
    if m.kind not in ("A1", "A2"):
        raise ChainError("mixing-time bounds apply to A1/A2 only")
    if not 0.0 < eps <= 0.5:
        raise ChainError("eps must lie in (0, 1/2]")
    vals = np.sort(np.abs(np.linalg.eigvals(m.entries)))[::-1]
    lam2 = float(vals[1])
    rel = 1.0 / (1.0 - lam2) - 1.0
    lower = 0.0 if eps == 0.5 else rel * math.log(1.0 / (2.0 * eps))
    if pi_min is None:
        pi_min = 1.0 / m.dim if m.kind == "A2" else 0.0
    upper = math.inf if pi_min <= 0.0 else rel * math.log(1.0 / (eps * pi_min))
    return lower, upper
