"""Linearized curvature operators and their formal adjoints.

Everything acts on the radial class: perturbations h = a dr^2 + b B g_N of
a base metric A dr^2 + B g_N.  The linearizations delta R, delta H are
evaluated along two independent paths (closed-form reduction and
Richardson-extrapolated finite differences of the curvature report) and
cross-checked; disagreement raises ConsistencyError.

Symmetric radial 2-tensors are stored in the same (rr, tan) shape as
perturbations: T = rr * dr^2 + tan * (B g_N).  The metric itself is
(A, 1) in this representation.

Pole care: the divergence one-form of h behaves like m/r (a/A - b) near a
cap pole, so derivatives of it are expanded analytically through
S = m B'/(2B); differentiation matrices only ever act on functions that
are regular through the pole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .geometry import GeneralRadialMetric, WarpedMetric, curvature_report

__all__ = [
    "RadialPerturbation",
    "PotentialTriple",
    "SymmetricRadialTensor",
    "OperatorResidual",
    "perturbed_metric",
    "delta_apply",
    "delta_matrices",
    "linearize_curvatures",
    "adjoints",
    "green_identity_residual",
    "vstatic_residual",
    "weighted_functional",
]

_FD_STEPS = (1e-3, 5e-4)  # centered steps, Richardson-combined


def _general(g):
    if isinstance(g, WarpedMetric):
        return g.general()
    return g


@dataclass
class RadialPerturbation:
    """Symmetric radial (0,2)-tensor h = a dr^2 + b B g_N.

    a, b are samples on the metric grid (even through the pole on caps).
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        if self.a.shape != self.b.shape:
            raise DomainError("perturbation components must share the grid")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise DomainError("perturbation must be finite")

    @classmethod
    def metric_direction(cls, g) -> "RadialPerturbation":
        """h = g itself (a = A, b = 1)."""
        g = _general(g)
        return cls(a=g.A.copy(), b=np.ones_like(g.A))

    def trace(self, g) -> np.ndarray:
        g = _general(g)
        return self.a / g.A + (g.n - 1) * self.b

    def scaled(self, s: float) -> "RadialPerturbation":
        return RadialPerturbation(self.a * s, self.b * s)


@dataclass
class SymmetricRadialTensor:
    """T = rr * dr^2 + tan * (B g_N) on the metric grid."""

    rr: np.ndarray
    tan: np.ndarray

    def orthonormal_components(self, g):
        g = _general(g)
        return self.rr / g.A, self.tan


@dataclass
class PotentialTriple:
    """Candidate (V, kappa, tau) for the static-potential system.

    dV, d2V may carry closed-form derivative samples; without them the
    potential is differentiated spectrally on the metric grid.
    """

    V: np.ndarray
    kappa: float = 0.0
    tau: float = 0.0
    dV: np.ndarray | None = None
    d2V: np.ndarray | None = None

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=float)
        self.kappa = float(self.kappa)
        self.tau = float(self.tau)

    @property
    def trivial(self) -> bool:
        """Flags a numerically vanishing potential."""
        return float(np.max(np.abs(self.V))) < 1e-14

    def derivatives(self, g):
        g = _general(g)
        dV = self.dV if self.dV is not None else g.grid.deriv(self.V, 1)
        d2V = self.d2V if self.d2V is not None else g.grid.deriv(self.V, 2)
        return np.asarray(dV, dtype=float), np.asarray(d2V, dtype=float)


@dataclass
class OperatorResidual:
    """Interior/boundary sup-norm residuals with per-node profiles."""

    interior: float
    boundary: float
    interior_profile_rr: np.ndarray
    interior_profile_tan: np.ndarray
    boundary_values: list
    trace_interior: float
    trace_boundary: float

    def to_dict(self):
        return {
            "interior": self.interior,
            "boundary": self.boundary,
            "trace_interior": self.trace_interior,
            "trace_boundary": self.trace_boundary,
            "boundary_values": [float(v) for v in self.boundary_values],
        }


# -- metric deformation ------------------------------------------------


def perturbed_metric(g, h: RadialPerturbation, t: float) -> GeneralRadialMetric:
    """g + t h as a general radial metric with spectral derivative data."""
    g = _general(g)
    da, d2a = g.grid.deriv(h.a, 1), g.grid.deriv(h.a, 2)
    db, d2b = g.grid.deriv(h.b, 1), g.grid.deriv(h.b, 2)
    A = g.A + t * h.a
    B = g.B * (1.0 + t * h.b)
    return GeneralRadialMetric(
        n=g.n, epsilon=g.epsilon, grid=g.grid,
        A=A, dA=g.dA + t * da, d2A=g.d2A + t * d2a,
        B=B,
        dB=g.dB * (1.0 + t * h.b) + g.B * t * db,
        d2B=g.d2B * (1.0 + t * h.b) + 2.0 * g.dB * t * db + g.B * t * d2b,
        hyperbolic_area=g.hyperbolic_area,
    )


# -- closed-form linearization ------------------------------------------


def _radial_pieces(g):
    g = _general(g)
    m = g.n - 1
    S = m * g.dB / (2.0 * g.B)                    # odd, ~ m/r at a pole
    dS = m * g.d2B / (2.0 * g.B) - 2.0 * S**2 / m  # analytic derivative of S
    return m, S, dS


def delta_apply(g, h: RadialPerturbation):
    """Closed-form (delta R, delta H list) for the radial class."""
    g = _general(g)
    m, S, dS = _radial_pieces(g)
    A, dA = g.A, g.dA

    u = h.a / A
    w = u - h.b
    T = u + m * h.b
    dT = g.grid.deriv(T, 1)
    d2T = g.grid.deriv(T, 2)
    lapT = (d2T - dA / (2.0 * A) * dT) / A + S * dT / A

    q = (g.grid.deriv(h.a, 1) - dA / A * h.a) / A  # regular odd part of div h
    dq = g.grid.deriv(q, 1, parity=-1)
    dw = g.grid.deriv(w, 1)
    omega = q + S * w
    divdiv = (dq + dS * w + S * dw - dA / (2.0 * A) * omega) / A + S * omega / A

    ric_rr = g.ricci_rr()
    rho = g.ricci_tangential()
    hric = u * ric_rr / A + m * h.b * rho / g.B

    dR = -lapT + divdiv - hric

    dH = []
    for idx, orient in g.boundary_indices():
        sqA = np.sqrt(A[idx])
        pi0 = g.pi0(idx, orient)
        # the div_{T Sigma} X term vanishes identically here: h(e_i, nu) = 0
        # in the radial class; kept explicit for future tensor classes
        div_X = 0.0
        dH.append(0.5 * (orient * (dT[idx] - omega[idx]) / sqA
                         - div_X - m * pi0 * h.b[idx]))
    return dR, dH


def delta_matrices(g):
    """Jacobian blocks: delta R = La a + Lb b, delta H rows per component.

    Same reduction as delta_apply assembled as dense matrices; useful for
    Newton systems.  Evaluation should prefer delta_apply, which keeps the
    exact cancellations of trivial directions.
    """
    g = _general(g)
    m, S, dS = _radial_pieces(g)
    A, dA = g.A, g.dA
    D1e, D2e = g.grid.d1(+1), g.grid.d2(+1)
    D1o = g.grid.d1(-1)
    N = len(A)
    I = np.eye(N)
    dg = np.diag

    U = dg(1.0 / A)
    Wa, Wb = U, -I                    # w = u - b
    Ta, Tb = U, m * I                 # T = u + m b

    lap = dg(1.0 / A) @ D2e + dg((S - dA / (2.0 * A)) / A) @ D1e
    Qa = dg(1.0 / A) @ (D1e - dg(dA / A))          # q from a
    dd_of = lambda Q, W: (dg(1.0 / A) @ (D1o @ Q + dg(dS) @ W + dg(S) @ (D1e @ W)
                                         - dg(dA / (2.0 * A)) @ (Q + dg(S) @ W))
                          + dg(S / A) @ (Q + dg(S) @ W))
    ric_rr = g.ricci_rr()
    rho = g.ricci_tangential()

    La = -lap @ Ta + dd_of(Qa, Wa) - dg(ric_rr / A**2)
    Lb = -lap @ Tb + dd_of(np.zeros((N, N)), Wb) - dg(m * rho / g.B)

    rows = []
    for idx, orient in g.boundary_indices():
        sqA = np.sqrt(A[idx])
        pi0 = g.pi0(idx, orient)
        e = np.zeros(N)
        e[idx] = 1.0
        om_a = Qa[idx, :] + S[idx] * U[idx, :]
        om_b = -S[idx] * e
        row_a = 0.5 * orient * ((D1e @ Ta)[idx, :] - om_a) / sqA
        row_b = 0.5 * (orient * ((D1e @ Tb)[idx, :] - om_b) / sqA - m * pi0 * e)
        rows.append((row_a, row_b))
    return La, Lb, rows


def _linearize_fd(g, h: RadialPerturbation):
    def probe(t):
        rp = curvature_report(perturbed_metric(g, h, t))
        rm = curvature_report(perturbed_metric(g, h, -t))
        dR = (rp.scalar - rm.scalar) / (2 * t)
        dH = [(bp.H - bm.H) / (2 * t) for bp, bm in zip(rp.boundary, rm.boundary)]
        return dR, np.array(dH)

    t1, t2 = _FD_STEPS
    dR1, dH1 = probe(t1)
    dR2, dH2 = probe(t2)
    # Richardson: centered differences have O(t^2) error
    w = (t1 / t2) ** 2
    dR = (w * dR2 - dR1) / (w - 1.0)
    dH = (w * dH2 - dH1) / (w - 1.0)
    return dR, list(dH)


def linearize_curvatures(g, h: RadialPerturbation, rtol: float = 1e-6):
    """(delta R, delta H per boundary component), dual-path checked.

    Path (i) is the closed-form radial reduction; path (ii) differentiates
    curvature_report(g + t h) with Richardson extrapolation.  The paths
    must agree to rtol relative or a ConsistencyError is raised.
    """
    g = _general(g)
    dR, dH = delta_apply(g, h)
    dR_fd, dH_fd = _linearize_fd(g, h)
    scale = max(1.0, float(np.max(np.abs(dR))), *[abs(v) for v in dH])
    gap = max(float(np.max(np.abs(dR - dR_fd))),
              *[abs(x - y) for x, y in zip(dH, dH_fd)])
    if gap > rtol * scale:
        raise ConsistencyError(
            f"closed-form and finite-difference linearizations disagree: "
            f"gap {gap:.3e} vs scale {scale:.3e}")
    return dR, dH


# -- adjoints -----------------------------------------------------------


def adjoints(g, p: PotentialTriple):
    """A*V as a radial tensor and B*V boundary coefficients.

    A*V = -(Lap V) g + Hess V - V Ric, returned in (rr, tan) shape.
    B*V = (dV/dnu) g - V Pi on each boundary component, returned as the
    scalar coefficient against the induced metric.
    """
    g = _general(g)
    m = g.n - 1
    V = p.V
    dV, d2V = p.derivatives(g)
    A, B, dA, dB = g.A, g.B, g.dA, g.dB
    lapV = (d2V + ((m / 2.0) * dB / B - dA / (2.0 * A)) * dV) / A
    hess_rr = d2V - dA / (2.0 * A) * dV
    ric_rr = g.ricci_rr()
    rho = g.ricci_tangential()
    Astar = SymmetricRadialTensor(
        rr=-lapV * A + hess_rr - V * ric_rr,
        tan=-lapV + dB / (2.0 * A * B) * dV - V * rho / B,
    )
    Bstar = []
    for idx, orient in g.boundary_indices():
        Vnu = orient * dV[idx] / np.sqrt(A[idx])
        Bstar.append(float(Vnu - V[idx] * g.pi0(idx, orient)))
    return Astar, Bstar


def _pairing_interior(g, h: RadialPerturbation, T: SymmetricRadialTensor) -> float:
    g = _general(g)
    m = g.n - 1
    integrand = h.a * T.rr / g.A**2 + m * h.b * T.tan
    return g.interior_integral(integrand)


def green_identity_residual(g, h: RadialPerturbation, p: PotentialTriple):
    """Residual of the integration-by-parts identity linking the operators.

    Returns (absolute residual, relative residual) of
    <dR h, V>_M - <A*V, h>_M - <B*V, h>_S + <2 dH h, V>_S.
    """
    g = _general(g)
    m = g.n - 1
    dR, dH = delta_apply(g, h)
    Astar, Bstar = adjoints(g, p)
    term_dR = g.interior_integral(dR * p.V)
    term_A = _pairing_interior(g, h, Astar)
    term_B = 0.0
    term_H = 0.0
    for (idx, orient), beta, dh in zip(g.boundary_indices(), Bstar, dH):
        area = g.boundary_area(idx)
        term_B += area * beta * m * h.b[idx]
        term_H += area * 2.0 * dh * p.V[idx]
    resid = term_dR - term_A - term_B + term_H
    scale = max(abs(term_dR), abs(term_A), abs(term_B), abs(term_H), 1e-30)
    return abs(resid), abs(resid) / scale


def vstatic_residual(g, p: PotentialTriple) -> OperatorResidual:
    """Sup-norm residuals of A*V = kappa g and B*V = tau g, plus traces."""
    g = _general(g)
    n = g.n
    Astar, Bstar = adjoints(g, p)
    prr, ptan = Astar.orthonormal_components(g)
    prof_rr = prr - p.kappa
    prof_tan = ptan - p.kappa
    interior = max(float(np.max(np.abs(prof_rr))), float(np.max(np.abs(prof_tan))))
    bvals = [beta - p.tau for beta in Bstar]
    boundary = max(abs(v) for v in bvals)

    # traced system
    dV, d2V = p.derivatives(g)
    m = n - 1
    lapV = (d2V + ((m / 2.0) * g.dB / g.B - g.dA / (2.0 * g.A)) * dV) / g.A
    R = curvature_report(g)
    tr_int = float(np.max(np.abs(lapV + R.scalar / (n - 1) * p.V
                                 + p.kappa * n / (n - 1))))
    tr_bd = 0.0
    for (idx, orient), b in zip(g.boundary_indices(), R.boundary):
        Vnu = orient * dV[idx] / np.sqrt(g.A[idx])
        tr_bd = max(tr_bd, abs(Vnu - b.H / (n - 1) * p.V[idx] - p.tau))
    return OperatorResidual(
        interior=interior, boundary=boundary,
        interior_profile_rr=prof_rr, interior_profile_tan=prof_tan,
        boundary_values=bvals, trace_interior=tr_int, trace_boundary=tr_bd,
    )


def weighted_functional(g, p: PotentialTriple, h: RadialPerturbation | None = None):
    """Total-curvature functional weighted by a fixed potential.

    F(g') = int R_g' V dv + 2 int_S H_g' V da - 2 kappa Vol(g') - 2 tau Area(g'),
    where the curvature integrals are taken against the measures of the
    base metric g (first-variation reading; with g'-dependent measures the
    criticality of static triples would pick up uncompensated trace terms).
    With a perturbation supplied, also returns the centered-difference
    derivative d/dt F(g + t h) at t = 0 (Richardson over two steps).
    """
    g = _general(g)
    base_areas = [g.boundary_area(idx) for idx, _ in g.boundary_indices()]

    def F(metric):
        rep = curvature_report(metric)
        val = g.interior_integral(rep.scalar * p.V)
        for (idx, orient), area0 in zip(metric.boundary_indices(), base_areas):
            val += 2.0 * rep.boundary[0 if orient > 0 else 1].H * p.V[idx] * area0
        val -= 2.0 * p.kappa * rep.volume + 2.0 * p.tau * rep.area
        return val

    value = F(g)
    if h is None:
        return value
    t1, t2 = _FD_STEPS
    d1 = (F(perturbed_metric(g, h, t1)) - F(perturbed_metric(g, h, -t1))) / (2 * t1)
    d2 = (F(perturbed_metric(g, h, t2)) - F(perturbed_metric(g, h, -t2))) / (2 * t2)
    w = (t1 / t2) ** 2
    return value, (w * d2 - d1) / (w - 1.0)
