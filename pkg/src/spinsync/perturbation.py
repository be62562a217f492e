"""Order-by-order expansion of the steady state in the Hamiltonian.

Each order solves  L_diss(rho^(n+1)) = i [H, rho^(n)]  with the pseudo-inverse
of the dissipator, fixed to the traceless subspace by adding a multiple of
its kernel (the H = 0 steady state).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .liouvillian import (
    DEGENERACY_RATIO,
    DegenerateSteadyState,
    SystemConfig,
    build_dissipator,
    build_hamiltonian,
    commutator_superop,
    set_field,
    unvec,
    vec,
)
from .measures import moment_operator

PINV_RCOND = 1e-12
RANGE_TOL = 1e-9
MAX_ORDER = 8
COND_LIMIT = 1e10


class RhsNotInRange(RuntimeError):
    pass


class IllConditioned(RuntimeError):
    pass


@dataclass(frozen=True)
class PerturbationSeries:
    orders: tuple[np.ndarray, ...] = field(repr=False)
    config: SystemConfig
    residuals: tuple[float, ...] = ()

    @property
    def max_order(self) -> int:
        return len(self.orders) - 1

    def partial_sum(self, k: int | None = None) -> np.ndarray:
        k = self.max_order if k is None else k
        return sum(self.orders[: k + 1])

    def expect(self, op: np.ndarray) -> np.ndarray:
        """Contribution of each order to <op>."""
        return np.array([np.trace(op @ r) for r in self.orders])


@dataclass(frozen=True)
class _DissipatorInverse:
    pinv: np.ndarray
    kernel: np.ndarray  # unit-trace H = 0 steady state, vectorized
    matrix: np.ndarray


def _dissipator_inverse(config: SystemConfig) -> _DissipatorInverse:
    d = config.dim
    ld = build_dissipator(config)
    u, s, vh = scipy.linalg.svd(ld)
    if s[-2] < DEGENERACY_RATIO * s[0]:
        raise DegenerateSteadyState("dissipator has more than one steady state")
    kernel = unvec(vh[-1].conj(), d)
    kernel = kernel / np.trace(kernel)
    keep = s > PINV_RCOND * s[0]
    pinv = (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T
    return _DissipatorInverse(pinv=pinv, kernel=vec(kernel), matrix=ld)


def perturb_expand(config: SystemConfig, max_order: int) -> PerturbationSeries:
    if not 0 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must be in 0..{MAX_ORDER}, got {max_order}")
    d = config.dim
    inv = _dissipator_inverse(config)
    # i[H, rho] = -(-i[H, rho])
    rhs_op = -commutator_superop(build_hamiltonian(config))
    trace_row = vec(np.eye(d))

    x = inv.kernel.copy()
    orders = [unvec(x, d)]
    residuals = [float(np.linalg.norm(inv.matrix @ x))]
    for _ in range(max_order):
        b = rhs_op @ x
        y = inv.pinv @ b
        y = y - (trace_row @ y) * inv.kernel
        res = float(np.linalg.norm(inv.matrix @ y - b))
        if res > RANGE_TOL * max(1.0, np.linalg.norm(b)):
            raise RhsNotInRange(f"order {len(orders)}: residual {res:.3e}")
        residuals.append(res)
        orders.append(unvec(y, d))
        x = y
    return PerturbationSeries(orders=tuple(orders), config=config, residuals=tuple(residuals))


@dataclass(frozen=True)
class CoefficientFit:
    coefficients: dict[tuple[int, int], complex]
    condition: dict[int, float]  # per total degree


def _homogeneous_monomials(degree: int) -> list[tuple[int, int]]:
    return [(a, degree - a) for a in range(degree, -1, -1)]


def extract_coefficients(config_template: SystemConfig, monomials, target,
                         scale: float = 1e-3, axes=("omega.0", "g.0")) -> CoefficientFit:
    """Polynomial coefficients of a moment in two Hamiltonian parameters.

    ``axes`` names the two config entries (default: drive on site 0 and the
    0-1 coupling); monomial ``(a, b)`` is ``axes[0]**a * axes[1]**b``.
    All other Hamiltonian entries of the template are set to zero.

    ``target`` is a moment spec ``(label, order)`` as accepted by
    :func:`spinsync.measures.moment_operator` or an operator matrix. The
    order-d term of the series is a homogeneous polynomial of degree d, so
    each requested degree is fitted on its own from the full set of degree-d
    monomials, evaluated at points (k, d + 2 - k) * scale.
    """
    monomials = [tuple(int(p) for p in m) for m in monomials]
    if not monomials:
        raise ValueError("no monomials requested")
    degrees = sorted({a + b for a, b in monomials})
    top = degrees[-1]
    if top > MAX_ORDER:
        raise ValueError(f"monomial degree {top} exceeds {MAX_ORDER}")
    base = config_template.without_hamiltonian()

    if isinstance(target, np.ndarray):
        op = target
    else:
        label, order = target
        op = moment_operator(label, order, config_template.n_spins)

    npts = top + 1
    contributions = []
    points = []
    for k in range(1, npts + 1):
        w, g = k * scale, (npts + 1 - k) * scale
        cfg = set_field(set_field(base, axes[0], w), axes[1], g)
        series = perturb_expand(cfg, top)
        contributions.append(series.expect(op))
        points.append((w, g))

    coeffs: dict[tuple[int, int], complex] = {}
    conds: dict[int, float] = {}
    for d in degrees:
        basis = _homogeneous_monomials(d)
        pts = points[: len(basis)]
        design = np.array([[w**a * g**b for a, b in basis] for w, g in pts])
        # column scaling leaves the fit unchanged but keeps the condition number meaningful
        col = np.max(np.abs(design), axis=0)
        cond = float(np.linalg.cond(design / col))
        conds[d] = cond
        if cond > COND_LIMIT:
            raise IllConditioned(f"degree {d}: condition number {cond:.3e}")
        rhs = np.array([contributions[i][d] for i in range(len(basis))])
        sol = np.linalg.solve(design / col, rhs) / col
        for m, c in zip(basis, sol):
            if m in monomials:
                coeffs[m] = complex(c)
    return CoefficientFit(coefficients={m: coeffs[m] for m in monomials}, condition=conds)


def moment_series(config: SystemConfig, label, order: int, max_order: int) -> np.ndarray:
    """Per-order contributions to a moment."""
    series = perturb_expand(config, max_order)
    return series.expect(moment_operator(label, order, config.n_spins))
