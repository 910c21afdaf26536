"""Chebyshev collocation grids for radial boundary-value work.

Two grid flavors:

* annulus grid on [r0, r1]: standard Chebyshev-Lobatto collocation with
  both endpoints on the grid.
* cap grid on (0, R]: nodes are the positive half of a Chebyshev-Lobatto
  grid on the doubled interval [-R, R] built with an odd number of
  intervals, so r = 0 is never a node.  Differentiation acts through
  even/odd extension across the pole, which keeps radial operators with
  1/r-type coefficients regular without one-sided stencils.

All public arrays are ordered by ascending r.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import DomainError

__all__ = ["RadialGrid", "cheb_lobatto", "clenshaw_curtis_weights"]


def _negative_sum_trick(M: np.ndarray) -> np.ndarray:
    # enforce exact annihilation of constants (Baltensperger-Trummer):
    # the analytic diagonal equals minus the off-diagonal row sum
    out = M.copy()
    np.fill_diagonal(out, 0.0)
    np.fill_diagonal(out, -out.sum(axis=1))
    return out


def cheb_lobatto(N: int):
    """Chebyshev-Lobatto nodes (descending) and differentiation matrix.

    Returns x with x[j] = cos(pi j / N) and the (N+1) x (N+1) matrix D
    with (D f)[j] = f'(x[j]) for polynomial interpolants.
    """
    if N == 0:
        return np.array([1.0]), np.zeros((1, 1))
    j = np.arange(N + 1)
    x = np.cos(np.pi * j / N)
    c = np.hstack([2.0, np.ones(N - 1), 2.0]) * (-1.0) ** j
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def clenshaw_curtis_weights(N: int) -> np.ndarray:
    """Clenshaw-Curtis weights on cheb_lobatto(N) nodes for [-1, 1]."""
    if N == 0:
        return np.array([2.0])
    j = np.arange(N + 1)
    theta = np.pi * j / N
    w = np.ones(N + 1)
    v = np.zeros(N + 1)
    for k in range(1, N // 2 + 1):
        b = 1.0 if 2 * k == N else 2.0
        v += b * np.cos(2.0 * k * theta) / (4.0 * k * k - 1.0)
    w -= v
    w *= 2.0 / N
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _bary_weights(x: np.ndarray) -> np.ndarray:
    # Chebyshev-Lobatto barycentric weights: (-1)^j, halved at the ends.
    N = len(x) - 1
    lam = (-1.0) ** np.arange(N + 1)
    lam[0] *= 0.5
    lam[-1] *= 0.5
    return lam


def _bary_eval(x: np.ndarray, lam: np.ndarray, f: np.ndarray, xq: np.ndarray):
    xq = np.atleast_1d(np.asarray(xq, dtype=float))
    out = np.empty_like(xq)
    for i, xv in enumerate(xq):
        d = xv - x
        hit = np.nonzero(np.abs(d) < 1e-14)[0]
        if hit.size:
            out[i] = f[hit[0]]
        else:
            t = lam / d
            out[i] = (t @ f) / t.sum()
    return out


class RadialGrid:
    """Collocation grid on a radial interval, pole-aware when capped."""

    def __init__(self, r0: float, r1: float, nodes: int, cap: bool):
        if r1 <= r0:
            raise DomainError(f"empty radial interval [{r0}, {r1}]")
        if nodes < 8:
            raise DomainError("need at least 8 collocation nodes")
        if cap and r0 != 0.0:
            raise DomainError("cap grids start at r0 = 0")
        self.r0 = float(r0)
        self.r1 = float(r1)
        self.nodes = int(nodes)
        self.cap = bool(cap)
        self._d_cache: dict = {}
        if cap:
            self._build_cap()
        else:
            self._build_annulus()

    # -- constructors ---------------------------------------------------

    @classmethod
    def annulus(cls, r0: float, r1: float, nodes: int) -> "RadialGrid":
        return cls(r0, r1, nodes, cap=False)

    @classmethod
    def cap(cls, R: float, nodes: int) -> "RadialGrid":
        return cls(0.0, R, nodes, cap=True)

    # -- assembly -------------------------------------------------------

    def _build_annulus(self):
        N = self.nodes - 1
        x, D = cheb_lobatto(N)
        half = 0.5 * (self.r1 - self.r0)
        mid = 0.5 * (self.r1 + self.r0)
        # ascending order
        self.r = (mid + half * x)[::-1].copy()
        Dr = D / half
        self._D1 = Dr[::-1, ::-1].copy()
        self._D2 = _negative_sum_trick(Dr @ Dr)[::-1, ::-1].copy()
        self._w_even = (clenshaw_curtis_weights(N) * half)[::-1].copy()
        self._x_full = x
        self._lam_full = _bary_weights(x)
        self._scale = half
        self._mid = mid

    def _build_cap(self):
        h = self.nodes
        M = 2 * h - 1  # odd: no node at r = 0
        x, D = cheb_lobatto(M)
        R = self.r1
        xr = R * x
        Dr = D / R
        self._x_full = x
        self._lam_full = _bary_weights(x)
        self._xr_full = xr
        pos = np.arange(h)            # descending positive nodes
        mirror = M - pos              # indices of -x[pos]
        self._pos_desc = pos
        self._mirror_desc = mirror
        self.r = xr[pos][::-1].copy()  # ascending
        self._Dr_full = Dr
        self._D2r_full = _negative_sum_trick(Dr @ Dr)
        wfull = clenshaw_curtis_weights(M) * R
        # int_0^R f dr for even f equals sum over positive nodes of w_j f_j
        self._w_even = wfull[pos][::-1].copy()
        self._odd_quad = None

    def _parity_matrix(self, full: np.ndarray, parity: int) -> np.ndarray:
        pos, mirror = self._pos_desc, self._mirror_desc
        Mh = full[np.ix_(pos, pos)] + parity * full[np.ix_(pos, mirror)]
        return Mh[::-1, ::-1].copy()

    # -- differentiation ------------------------------------------------

    def d1(self, parity: int = 1) -> np.ndarray:
        """First-derivative matrix acting on samples of the given parity."""
        if not self.cap:
            return self._D1
        key = ("d1", int(parity))
        if key not in self._d_cache:
            self._d_cache[key] = self._parity_matrix(self._Dr_full, parity)
        return self._d_cache[key]

    def d2(self, parity: int = 1) -> np.ndarray:
        if not self.cap:
            return self._D2
        key = ("d2", int(parity))
        if key not in self._d_cache:
            self._d_cache[key] = self._parity_matrix(self._D2r_full, parity)
        return self._d_cache[key]

    def deriv(self, f: np.ndarray, order: int = 1, parity: int = 1) -> np.ndarray:
        """Spectral derivative of sampled f with the given pole parity.

        Even-parity input is centered before differentiation so constants
        are annihilated exactly (matvec row sums only cancel to roundoff).
        """
        f = np.asarray(f, dtype=float)
        M = self.d1(parity) if order == 1 else self.d2(parity)
        if parity == 1:
            return M @ (f - f[0])
        return M @ f

    # -- quadrature -----------------------------------------------------

    def integrate(self, f: np.ndarray, parity: int = 1) -> float:
        """Integral of f over the radial interval.

        On cap grids the parity of the integrand about the pole must be
        declared; odd integrands are integrated through a spectral
        antiderivative (even extension would lose accuracy to the kink).
        """
        f = np.asarray(f, dtype=float)
        if not self.cap or parity == 1:
            return float(self._w_even @ f)
        return float(self._odd_weights() @ f)

    def _odd_weights(self) -> np.ndarray:
        if self._odd_quad is None:
            h = self.nodes
            De = self.d1(parity=1)  # derivative of even functions
            A = De.copy()
            A[-1, :] = 0.0
            A[-1, -1] = 1.0  # pin F(R) = 0
            piv = lu_factor(A)
            W = np.zeros(h)
            # weight vector: integral of odd f = F(R) - F(0+) with F' = f
            ev0 = self._interp_row(0.0, parity=1)
            for j in range(h):
                rhs = np.zeros(h)
                if j != h - 1:
                    rhs[j] = 1.0
                F = lu_solve(piv, rhs)
                W[j] = F[-1] - ev0 @ F
            # the collocation row dropped at r=R is redundant for odd
            # polynomial data, so W[-1] = 0 is a consistent exact choice
            self._odd_quad = W
        return self._odd_quad

    # -- interpolation --------------------------------------------------

    def _full_values(self, f: np.ndarray, parity: int) -> np.ndarray:
        if not self.cap:
            return f[::-1]
        h = self.nodes
        full = np.empty(2 * h)
        full[self._pos_desc] = f[::-1]
        full[self._mirror_desc] = parity * f[::-1]
        return full

    def _interp_row(self, r_point: float, parity: int = 1) -> np.ndarray:
        """Row vector v with v @ f = interpolant of f at r_point."""
        x = self._x_full
        lam = self._lam_full
        if self.cap:
            xq = r_point / self.r1
        else:
            xq = (r_point - self._mid) / self._scale
        d = xq - x
        hit = np.nonzero(np.abs(d) < 1e-14)[0]
        n_full = len(x)
        row_full = np.zeros(n_full)
        if hit.size:
            row_full[hit[0]] = 1.0
        else:
            t = lam / d
            row_full = t / t.sum()
        if not self.cap:
            return row_full[::-1]
        h = self.nodes
        row = row_full[self._pos_desc] + parity * row_full[self._mirror_desc]
        return row[::-1]

    def interpolate(self, f: np.ndarray, r_eval, parity: int = 1):
        f = np.asarray(f, dtype=float)
        full = self._full_values(f, parity)
        x = self._x_full
        if self.cap:
            xq = np.asarray(r_eval, dtype=float) / self.r1
        else:
            xq = (np.asarray(r_eval, dtype=float) - self._mid) / self._scale
        return _bary_eval(x, self._lam_full, full, xq)

    # -- misc -----------------------------------------------------------

    @property
    def quad_weights_even(self) -> np.ndarray:
        return self._w_even

    def __repr__(self):
        kind = "cap" if self.cap else "annulus"
        return f"RadialGrid({kind}, [{self.r0}, {self.r1}], {self.nodes} nodes)"
