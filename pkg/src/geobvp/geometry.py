"""Radial model metrics and their curvature data.

The workhorse geometry is g = A(r) dr^2 + B(r) g_N on [r0, r1] x N where
(N, g_N) is an (n-1)-dimensional space form of curvature eps in {+1,0,-1}.
Warped products dr^2 + phi(r)^2 g_N are the special case A = 1, B = phi^2.
Every curvature quantity reduces to closed-form expressions in A, B and
their radial derivatives, evaluated spectrally on a Chebyshev grid.

Conventions: nu is the outward unit normal, Pi(X,Y) = <grad_X nu, Y>, and
H = tr Pi, so the unit Euclidean ball has H = n-1.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleRegularityError
from .grids import RadialGrid

__all__ = [
    "WarpedMetric",
    "GeneralRadialMetric",
    "CurvatureReport",
    "FlatSurfaceDomain",
    "curvature_report",
    "gauss_identity_residual",
    "volume_area",
    "cross_section_area",
    "cross_section_eigenvalues",
    "metric_from_config",
]

_POLE_TOL = 1e-10


def cross_section_area(n: int, epsilon: int, hyperbolic_area: float | None = None) -> float:
    """Riemannian volume of the (n-1)-dimensional cross-section.

    Unit round sphere for eps=+1, unit square torus for eps=0; compact
    hyperbolic quotients carry no canonical volume, so eps=-1 requires a
    user-supplied constant.
    """
    m = n - 1
    if epsilon == 1:
        return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)
    if epsilon == 0:
        return 1.0
    if epsilon == -1:
        if hyperbolic_area is None:
            return 1.0
        return float(hyperbolic_area)
    raise DomainError(f"cross-section sign must be one of +1, 0, -1, got {epsilon}")


def cross_section_eigenvalues(n: int, epsilon: int, k_max: int) -> np.ndarray:
    """First k_max+1 distinct Laplacian eigenvalues of the cross-section.

    Sphere: k(k+n-2).  Unit square torus: 4 pi^2 |z|^2 over the integer
    lattice, listed as distinct values ascending.  Hyperbolic quotients
    have no closed-form spectrum and are rejected.
    """
    m = n - 1
    if epsilon == 1:
        k = np.arange(k_max + 1, dtype=float)
        return k * (k + n - 2)
    if epsilon == 0:
        bound = int(np.ceil(np.sqrt(k_max + 1))) + 2
        vals = set()
        for z in np.ndindex(*([2 * bound + 1] * m)):
            zz = np.array(z) - bound
            vals.add(int(zz @ zz))
        distinct = sorted(vals)[: k_max + 1]
        return 4.0 * np.pi**2 * np.asarray(distinct, dtype=float)
    raise DomainError("hyperbolic cross-sections need user-supplied eigenvalues")


_WARP_FORMS = {
    "sin": (np.sin, np.cos, lambda r: -np.sin(r)),
    "sinh": (np.sinh, np.cosh, np.sinh),
    "identity": (lambda r: np.asarray(r, dtype=float),
                 lambda r: np.ones_like(np.asarray(r, dtype=float)),
                 lambda r: np.zeros_like(np.asarray(r, dtype=float))),
}


@dataclass
class WarpedMetric:
    """Rotationally symmetric metric dr^2 + phi(r)^2 g_N on [r0, r1] x N.

    phi is one of the closed-form tags 'sin', 'sinh', 'identity',
    ('const', c), or ('cheb', coefficients on the radial domain).
    r0 = 0 means a smooth cap through the pole and requires phi(0) = 0,
    phi'(0) = 1.
    """

    n: int
    epsilon: int
    warp: object
    r0: float
    r1: float
    nodes: int = 48
    hyperbolic_area: float | None = None

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("dimension must be at least 2")
        if self.epsilon not in (-1, 0, 1):
            raise DomainError("epsilon must be one of +1, 0, -1")
        if self.r0 < 0:
            raise DomainError("radial domain must start at r0 >= 0")
        self.grid = (RadialGrid.cap(self.r1, self.nodes) if self.r0 == 0.0
                     else RadialGrid.annulus(self.r0, self.r1, self.nodes))
        self._eval_warp()
        self._validate()

    def _eval_warp(self):
        r = self.grid.r
        w = self.warp
        if isinstance(w, str) and w in _WARP_FORMS:
            f, df, d2f = _WARP_FORMS[w]
            self.phi, self.dphi, self.d2phi = f(r), df(r), d2f(r)
            self._phi_at = f
            self._dphi_at = df
        elif isinstance(w, (tuple, list)) and len(w) == 2 and w[0] == "const":
            c = float(w[1])
            self.phi = np.full_like(r, c)
            self.dphi = np.zeros_like(r)
            self.d2phi = np.zeros_like(r)
            self._phi_at = lambda rr: np.full_like(np.asarray(rr, dtype=float), c)
            self._dphi_at = lambda rr: np.zeros_like(np.asarray(rr, dtype=float))
        elif isinstance(w, (tuple, list)) and len(w) == 2 and w[0] == "cheb":
            coeffs = np.asarray(w[1], dtype=float)
            lo, hi = self.r0, self.r1
            to_x = lambda rr: 2.0 * (np.asarray(rr, dtype=float) - lo) / (hi - lo) - 1.0
            cder = np.polynomial.chebyshev.chebder(coeffs) * (2.0 / (hi - lo))
            cder2 = np.polynomial.chebyshev.chebder(cder) * (2.0 / (hi - lo))
            chebval = np.polynomial.chebyshev.chebval
            self.phi = chebval(to_x(r), coeffs)
            self.dphi = chebval(to_x(r), cder)
            self.d2phi = chebval(to_x(r), cder2)
            self._phi_at = lambda rr: chebval(to_x(rr), coeffs)
            self._dphi_at = lambda rr: chebval(to_x(rr), cder)
        else:
            raise DomainError(f"unknown warp specification {w!r}")

    def _validate(self):
        if np.any(self.phi <= 0):
            raise DomainError("warping function must be positive on (r0, r1]")
        if self.is_cap:
            if self.epsilon == -1:
                raise DomainError("caps close smoothly only over sphere or torus sections")
            p0 = float(self._phi_at(0.0))
            dp0 = float(self._dphi_at(0.0))
            if abs(p0) > _POLE_TOL or abs(dp0 - 1.0) > _POLE_TOL:
                raise PoleRegularityError(
                    f"cap closure needs phi(0)=0, phi'(0)=1; got ({p0:.2e}, {dp0:.6f})")

    @property
    def is_cap(self) -> bool:
        return self.r0 == 0.0

    @property
    def cross_area(self) -> float:
        return cross_section_area(self.n, self.epsilon, self.hyperbolic_area)

    def general(self) -> "GeneralRadialMetric":
        """View as a general radial metric with A = 1, B = phi^2."""
        r = self.grid.r
        return GeneralRadialMetric(
            n=self.n, epsilon=self.epsilon, grid=self.grid,
            A=np.ones_like(r), dA=np.zeros_like(r), d2A=np.zeros_like(r),
            B=self.phi**2,
            dB=2.0 * self.phi * self.dphi,
            d2B=2.0 * (self.dphi**2 + self.phi * self.d2phi),
            hyperbolic_area=self.hyperbolic_area,
        )


@dataclass
class GeneralRadialMetric:
    """Metric A(r) dr^2 + B(r) g_N with A, B > 0 sampled on a grid.

    WarpedMetric embeds via A = 1, B = phi^2.  Derivative samples may be
    passed explicitly (closed forms) or are generated spectrally.
    """

    n: int
    epsilon: int
    grid: RadialGrid
    A: np.ndarray
    B: np.ndarray
    dA: np.ndarray | None = None
    d2A: np.ndarray | None = None
    dB: np.ndarray | None = None
    d2B: np.ndarray | None = None
    hyperbolic_area: float | None = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        if np.any(self.A <= 0) or np.any(self.B <= 0):
            raise DomainError("metric coefficients must be positive")
        d1 = self.grid.d1(+1)
        d2 = self.grid.d2(+1)
        if self.dA is None:
            self.dA = d1 @ self.A
        if self.d2A is None:
            self.d2A = d2 @ self.A
        if self.dB is None:
            self.dB = d1 @ self.B
        if self.d2B is None:
            self.d2B = d2 @ self.B

    @property
    def is_cap(self) -> bool:
        return self.grid.cap

    @property
    def cross_area(self) -> float:
        return cross_section_area(self.n, self.epsilon, self.hyperbolic_area)

    # -- pointwise curvature --------------------------------------------

    def ricci_rr(self) -> np.ndarray:
        m = self.n - 1
        A, B, dA, dB, d2B = self.A, self.B, self.dA, self.dB, self.d2B
        return -m * (d2B / (2 * B) - dB**2 / (4 * B**2) - dA * dB / (4 * A * B))

    def ricci_tangential(self) -> np.ndarray:
        """Coefficient rho with Ric|_tan = rho * g_N."""
        m = self.n - 1
        A, B, dA, dB, d2B = self.A, self.B, self.dA, self.dB, self.d2B
        return ((m - 1) * self.epsilon - d2B / (2 * A)
                - (m - 2) * dB**2 / (4 * A * B) + dA * dB / (4 * A**2))

    def scalar_curvature(self) -> np.ndarray:
        A, B = self.A, self.B
        return self.ricci_rr() / A + (self.n - 1) * self.ricci_tangential() / B

    # -- volume element and integrals -----------------------------------

    def volume_element(self) -> np.ndarray:
        """sqrt(A) B^{(n-1)/2}, the radial density of dv (per unit N-area)."""
        return np.sqrt(self.A) * self.B ** ((self.n - 1) / 2.0)

    def _element_parity(self) -> int:
        # caps: sqrt(B) ~ phi is odd, A even, so the density has parity (-1)^(n-1)
        return -1 if (self.is_cap and (self.n - 1) % 2 == 1) else 1

    def interior_integral(self, scalar: np.ndarray) -> float:
        """Integral of an even radial scalar against dv over M."""
        dens = self.volume_element() * np.asarray(scalar, dtype=float)
        return self.cross_area * self.grid.integrate(dens, parity=self._element_parity())

    # -- boundary data ---------------------------------------------------

    def boundary_indices(self):
        """(index, orientation) pairs; orientation +1 at outer, -1 at inner."""
        out = [(len(self.grid.r) - 1, +1)]
        if not self.is_cap:
            out.append((0, -1))
        return out

    def boundary_area(self, idx: int) -> float:
        return self.cross_area * self.B[idx] ** ((self.n - 1) / 2.0)

    def pi0(self, idx: int, orientation: int) -> float:
        """Umbilicity factor: Pi = pi0 * (induced metric)."""
        return orientation * self.dB[idx] / (2.0 * self.B[idx] * np.sqrt(self.A[idx]))

    def normal_derivative_row(self, idx: int, orientation: int) -> np.ndarray:
        """Row vector evaluating dV/dnu at a boundary node for even V."""
        return orientation * self.grid.d1(+1)[idx, :] / np.sqrt(self.A[idx])

    # -- conformal change -------------------------------------------------

    def conformal(self, u: np.ndarray, exponent: float) -> "GeneralRadialMetric":
        """Metric u^exponent * g for a positive even radial factor u."""
        u = np.asarray(u, dtype=float)
        if np.any(u <= 0):
            raise DomainError("conformal factor must be positive")
        w = u**exponent
        return GeneralRadialMetric(
            n=self.n, epsilon=self.epsilon, grid=self.grid,
            A=w * self.A, B=w * self.B,
            hyperbolic_area=self.hyperbolic_area,
        )

    def rescaled(self, c2: float) -> "GeneralRadialMetric":
        """Homothety c^2 g."""
        return GeneralRadialMetric(
            n=self.n, epsilon=self.epsilon, grid=self.grid,
            A=c2 * self.A, dA=c2 * self.dA, d2A=c2 * self.d2A,
            B=c2 * self.B, dB=c2 * self.dB, d2B=c2 * self.d2B,
            hyperbolic_area=self.hyperbolic_area,
        )


@dataclass
class BoundaryData:
    component: str
    r: float
    H: float
    pi0: float
    ric_nn: float
    R_sigma: float
    area: float


@dataclass
class CurvatureReport:
    """All pointwise curvature quantities of a radial metric."""

    r: np.ndarray
    scalar: np.ndarray
    ric_rr: np.ndarray
    ric_tan: np.ndarray
    boundary: list
    volume: float
    area: float

    @property
    def H(self) -> float:
        """Mean curvature at the outer boundary component."""
        return self.boundary[0].H

    def to_json(self) -> str:
        payload = {
            "volume": self.volume,
            "area": self.area,
            "boundary": [vars(b) for b in self.boundary],
            "nodes": [
                {"r": float(r), "scalar": float(s), "ric_rr": float(a), "ric_tan": float(b)}
                for r, s, a, b in zip(self.r, self.scalar, self.ric_rr, self.ric_tan)
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "scalar_curvature", "ric_rr", "ric_tan"])
        for row in zip(self.r, self.scalar, self.ric_rr, self.ric_tan):
            w.writerow([f"{v:.16e}" for v in row])
        return buf.getvalue()


def _as_general(metric) -> GeneralRadialMetric:
    if isinstance(metric, WarpedMetric):
        return metric.general()
    if isinstance(metric, GeneralRadialMetric):
        return metric
    raise DomainError(f"not a radial metric: {type(metric).__name__}")


def curvature_report(metric) -> CurvatureReport:
    """Populate every curvature field of a warped or general radial metric."""
    g = _as_general(metric)
    m = g.n - 1
    ric_rr = g.ricci_rr() / g.A          # orthonormal Ric(e_r, e_r)
    rho = g.ricci_tangential()
    ric_tan = rho / g.B                  # orthonormal tangential Ricci
    scalar = ric_rr + m * ric_tan
    boundary = []
    for idx, orient in g.boundary_indices():
        p0 = g.pi0(idx, orient)
        bd = BoundaryData(
            component="outer" if orient > 0 else "inner",
            r=float(g.grid.r[idx]),
            H=float(m * p0),
            pi0=float(p0),
            ric_nn=float(ric_rr[idx]),
            R_sigma=float(m * (m - 1) * g.epsilon / g.B[idx]),
            area=float(g.boundary_area(idx)),
        )
        boundary.append(bd)
    vol = g.interior_integral(np.ones_like(g.A))
    area = sum(b.area for b in boundary)
    if vol <= 0 or area <= 0:
        raise DomainError("volume and boundary area must be positive")
    return CurvatureReport(
        r=g.grid.r.copy(), scalar=scalar, ric_rr=ric_rr, ric_tan=ric_tan,
        boundary=boundary, volume=float(vol), area=float(area),
    )


def gauss_identity_residual(metric) -> float:
    """|R_Sigma - (n-2)/(n-1) H^2 - (R - 2 Ric(nu,nu))| at the boundary.

    Exact identity for umbilical boundaries, which the radial class always
    has; returns the worst residual over boundary components.
    """
    g = _as_general(metric)
    rep = curvature_report(g)
    n = g.n
    worst = 0.0
    for b, (idx, _) in zip(rep.boundary, g.boundary_indices()):
        lhs = b.R_sigma - (n - 2) / (n - 1) * b.H**2
        rhs = rep.scalar[idx] - 2.0 * b.ric_nn
        worst = max(worst, abs(lhs - rhs))
    return worst


def volume_area(metric):
    """(volume, total boundary area) by Clenshaw-Curtis quadrature."""
    rep = curvature_report(metric)
    return rep.volume, rep.area


@dataclass
class FlatSurfaceDomain:
    """Flat 2D model: the unit disk or the cylinder [0,1] x S^1.

    The disk carries the Euclidean metric (chi = 1); the cylinder carries
    dt^2 + dtheta^2 with theta of period 2 pi (chi = 0).
    """

    variant: str
    modes: int = 64
    axial_nodes: int = 48

    def __post_init__(self):
        if self.variant not in ("disk", "cylinder"):
            raise DomainError("variant must be 'disk' or 'cylinder'")
        if self.modes < 2 or (self.modes & (self.modes - 1)) != 0:
            raise DomainError("mode count must be a positive power of two")

    @property
    def euler_characteristic(self) -> int:
        return 1 if self.variant == "disk" else 0

    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.modes) / self.modes


_NAMED_METRICS = {
    "unit-ball": lambda n, nodes: WarpedMetric(n, 1, "identity", 0.0, 1.0, nodes),
    "hemisphere": lambda n, nodes: WarpedMetric(n, 1, "sin", 0.0, np.pi / 2, nodes),
    "flat-cylinder": lambda n, nodes: WarpedMetric(n, 0, ("const", 1.0), 0.5, 1.5, nodes),
    "hyperbolic-cap": lambda n, nodes: WarpedMetric(n, 1, "sinh", 0.0, 1.0, nodes),
}


def metric_from_config(cfg) -> WarpedMetric:
    """Build a WarpedMetric from a configuration mapping or named shortcut.

    Keys: n, epsilon, warp, domain = [r0, r1], nodes; warp is a tag string
    or ["const", c] / ["cheb", [...]] pair.
    """
    if isinstance(cfg, str):
        if cfg not in _NAMED_METRICS:
            raise DomainError(f"unknown named metric {cfg!r}")
        return _NAMED_METRICS[cfg](3, 48)
    if not isinstance(cfg, dict):
        raise DomainError("metric config must be a name or a mapping")
    missing = {"n", "epsilon", "warp", "domain"} - set(cfg)
    if missing:
        raise DomainError(f"metric config missing keys {sorted(missing)}")
    warp = cfg["warp"]
    if isinstance(warp, list):
        warp = tuple(warp) if warp and warp[0] in ("const", "cheb") else warp
    r0, r1 = cfg["domain"]
    return WarpedMetric(
        n=int(cfg["n"]), epsilon=int(cfg["epsilon"]), warp=warp,
        r0=float(r0), r1=float(r1), nodes=int(cfg.get("nodes", 48)),
        hyperbolic_area=cfg.get("hyperbolic_area"),
    )
