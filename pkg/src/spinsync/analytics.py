"""Closed-form two-spin moments and blockade loci.

Rates follow the inverted convention of :func:`spinsync.liouvillian.inverted_rates`:
gamma_g^A = gamma_d^B = gamma_g and gamma_d^A = gamma_g^B = gamma_d. The
asymptotic forms are leading order in the drive; they warn, rather than
fail, when evaluated outside their nominal domain.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .liouvillian import inverted_rates, solve
from .measures import moments

PI = np.pi


class NoSignChange(RuntimeError):
    pass


class AsymptoticDomainWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RateConfigTwoSpin:
    gamma_g: float
    gamma_d: float
    g: float = 0.0
    omega_a: float = 0.0

    def __post_init__(self):
        if not (self.gamma_g > 0 and self.gamma_d > 0):
            raise ValueError("gamma_g and gamma_d must be positive")
        if self.g < 0 or self.omega_a < 0:
            raise ValueError("g and omega_a must be non-negative")

    def swapped(self) -> "RateConfigTwoSpin":
        return RateConfigTwoSpin(self.gamma_d, self.gamma_g, self.g, self.omega_a)

    def system(self):
        return inverted_rates(self.gamma_g, self.gamma_d, self.omega_a, self.g)


def _warn_if(cond: bool, msg: str):
    if cond:
        warnings.warn(msg, AsymptoticDomainWarning, stacklevel=3)


def m1A_asym(cfg: RateConfigTwoSpin) -> complex:
    gg, gd, g, w = cfg.gamma_g, cfg.gamma_d, cfg.g, cfg.omega_a
    _warn_if(g > 0.3 * gd, "m1A_asym: bracket is a small-g expansion")
    bracket = 1 - 4 * g**2 * (gg**2 + 4 * gg * gd + gd**2) / (gg**2 * gd**2)
    return 1j * (3 * w / 16) * (gg - gd) / (gg * gd) * bracket


def m1B_asym(cfg: RateConfigTwoSpin) -> float:
    gg, gd, g, w = cfg.gamma_g, cfg.gamma_d, cfg.g, cfg.omega_a
    _warn_if(g > 0.3 * gd, "m1B_asym: bracket is a small-g expansion")
    num = (320 * gg**3 * gd**3 + 23 * (gg**4 * gd**2 + gg**2 * gd**4)
           - 32 * (gg**6 + gd**6) - 106 * (gg**5 * gd + gg * gd**5))
    den = 3 * gg**3 * gd**3 * (2 * gg + gd) * (gg + 2 * gd)
    return (3 * w * g / (8 * gg * gd)) * ((gd - gg) ** 2 / (gg * gd) + g**2 * num / den)


def _m1AB_denominator(gg, gd, g):
    return (32 * g**6 + gg**3 * gd**3 + 4 * g**4 * (2 * gg**2 + 7 * gg * gd + 2 * gd**2)
            + g**2 * gg * gd * (4 * gg**2 + 5 * gg * gd + 4 * gd**2))


def m1AB_asym(cfg: RateConfigTwoSpin) -> complex:
    gg, gd, g = cfg.gamma_g, cfg.gamma_d, cfg.g
    num = (gd - gg) * (4 * g**4 + g**2 * gg * gd - gg**2 * gd**2)
    return 1j * (9 * PI * g / 256) * num / _m1AB_denominator(gg, gd, g)


def m1AB_asym_by_coherence(cfg: RateConfigTwoSpin) -> dict[str, complex]:
    """Split of m1AB_asym into the coherences that feed it."""
    gg, gd, g = cfg.gamma_g, cfg.gamma_d, cfg.g
    pref = 1j * (9 * PI * g / 256) / _m1AB_denominator(gg, gd, g)
    return {
        "|0,1><1,0|": pref * 2 * (gd - gg) * g**2 * gg * gd,
        "|-1,0><0,-1|": pref * 2 * (gd - gg) * g**2 * gg * gd,
        "|0,0><1,-1|": pref * (4 * g**2 + gg * gd) * (g**2 + gg**2) * gd,
        "|-1,1><0,0|": -pref * (4 * g**2 + gg * gd) * (g**2 + gd**2) * gg,
    }


# --- equal rates -------------------------------------------------------------

def _common_den(g, gamma):
    return (8 * g**2 + gamma**2) * (4 * g**2 + 9 * gamma**2) * (16 * g**4 + 72 * g**2 * gamma**2 + 9 * gamma**4)


def m1B_equal(g, omega_a, gamma=1.0):
    num = 64 * g**4 + 348 * g**2 * gamma**2 + 135 * gamma**4
    return 0.75 * g**3 * omega_a * num / _common_den(g, gamma)


def m1B_equal_strong(g, omega_a, gamma=1.0):
    return 3 * omega_a / (32 * g)


def m1B_equal_weak(g, omega_a, gamma=1.0):
    return 5 * g**3 * omega_a / (4 * gamma**4)


def m2B_equal(g, omega_a, gamma=1.0):
    poly = (96 * g**8 + 656 * g**6 * gamma**2 + 518 * g**4 * gamma**4
            + 108 * g**2 * gamma**6 + 81 * gamma**8)
    pre = 3 / (2 * PI) * g**2 * omega_a**2 / ((g**2 + gamma**2) * (4 * g**2 + gamma**2))
    return pre * poly / _common_den(g, gamma)


def m2B_equal_strong(g, omega_a, gamma=1.0):
    return 9 * omega_a**2 / (128 * PI * g**2)


def m2B_equal_weak(g, omega_a, gamma=1.0):
    return 3 * g**2 * omega_a**2 / (2 * PI * gamma**4)


def m2AB_equal(g, omega_a, gamma=1.0):
    poly = 848 * g**6 + 4600 * g**4 * gamma**2 + 1905 * g**2 * gamma**4 + 702 * gamma**6
    return g**2 / (8 * PI * (8 * g**2 + gamma**2)) * (1 - omega_a**2 * poly / _common_den(g, gamma))


def m2AB_equal_strong(g, omega_a, gamma=1.0):
    return 1 / (64 * PI) - (53 * omega_a**2 + 4 * gamma**2) / (2048 * PI * g**2)


def m2AB_equal_weak(g, omega_a, gamma=1.0):
    return g**2 / (8 * PI * gamma**2) * (1 - (26 * omega_a**2 + 24 * g**2) / (3 * gamma**2))


def m2A_equal(g, omega_a, gamma=1.0):
    w = omega_a
    # the gamma^4 in the last numerator term keeps the expression dimensionless
    num = 448 * w**4 + 456 * w**2 * gamma**2 + 189 * gamma**4
    den = (8 * w**2 + gamma**2) * (16 * w**4 + 30 * w**2 * gamma**2 + 9 * gamma**4)
    return w**2 / (2 * PI * (8 * w**2 + gamma**2)) * (1 - g**2 * num / den)


def m2A_equal_strong(g, omega_a, gamma=1.0):
    return 1 / (16 * PI) - (28 * g**2 + gamma**2) / (128 * PI * omega_a**2)


def m2A_equal_weak(g, omega_a, gamma=1.0):
    return omega_a**2 / (2 * PI * gamma**2) * (1 - (21 * g**2 + 8 * omega_a**2) / gamma**2)


def equal_rate_forms(g, omega_a, gamma=1.0) -> dict[str, float]:
    return {
        "m1B": m1B_equal(g, omega_a, gamma),
        "m2B": m2B_equal(g, omega_a, gamma),
        "m2AB": m2AB_equal(g, omega_a, gamma),
        "m2A": m2A_equal(g, omega_a, gamma),
    }


# --- blockade loci -------------------------------------------------------------

def blockade_width(g, gamma_d=1.0) -> tuple[float, float]:
    """gamma_g/gamma_d endpoints where |m1_A / m1_B| = 1, small-g estimate."""
    d = 20 * g**3 / (3 * gamma_d**3)
    return 1 - d, 1 + d


def m1AB_blockade_ratio(g, gamma_d=1.0) -> float:
    """gamma_g/gamma_d on the coupling-induced m1_AB blockade (g, gamma_g << gamma_d)."""
    return 0.5 * (1 + np.sqrt(17)) * g**2 / gamma_d**2


def m1AB_blockade_ratio_exact(g, total=1.0) -> float:
    """Root of m1AB_asym in gamma_g/gamma_d at fixed gamma_g + gamma_d.

    The numerator factor vanishes at gamma_g gamma_d = (1 + sqrt 17) g^2 / 2.
    """
    p = 0.5 * (1 + np.sqrt(17)) * g**2 / total**2
    # r / (1 + r)^2 = p, small root
    return ((1 - 2 * p) - np.sqrt(1 - 4 * p)) / (2 * p)


M1A_BRANCH_A_COUPLING = 0.5 * np.sqrt(1 + np.sqrt(10))
M1A_BRANCH_B_COUPLING = 1.323
M1A_BRANCH_B_SLOPE = 0.7561


def _rates(ratio, scale):
    if scale == "sum":
        return ratio / (1 + ratio), 1 / (1 + ratio)
    if scale == "damping":
        return ratio, 1.0
    raise ValueError(f"scale must be 'sum' or 'damping', got {scale!r}")


def numerical_first_moment(target: str, ratio: float, g: float, omega_a: float,
                           scale: str = "damping") -> complex:
    gg, gd = _rates(ratio, scale)
    rho = solve(inverted_rates(gg, gd, omega_a, g))
    spec = {"m1A": 0, "m1B": 1, "m1AB": (0, 1)}[target]
    return moments(rho, spec, 1).value


def _scan_sign_changes(f, lo, hi, points):
    rs = np.geomspace(lo, hi, points)
    vals = np.array([f(r) for r in rs])
    out = []
    for i in range(points - 1):
        if vals[i] == 0:
            out.append((rs[i], rs[i]))
        elif np.sign(vals[i]) != np.sign(vals[i + 1]):
            out.append((rs[i], rs[i + 1]))
    return out


def locate_blockade_locus(target: str, g: float, omega_a: float = 1e-4, scale: str = "damping",
                          bracket: tuple[float, float] | None = None, solver=None,
                          scan=(1e-4, 1e4), points: int = 161, xtol: float = 1e-10) -> float:
    """gamma_g/gamma_d where the chosen first moment vanishes.

    Without ``bracket`` the ratio is scanned on a log grid and the first sign
    change not enclosing the interference blockade at ratio 1 is refined by
    bisection. ``solver(ratio) -> complex`` overrides the full steady-state
    moment. The imaginary part is used since these moments are imaginary
    away from equal rates.
    """
    if target not in ("m1A", "m1AB"):
        raise ValueError(f"target must be 'm1A' or 'm1AB', got {target!r}")
    if solver is None:
        solver = lambda r: numerical_first_moment(target, r, g, omega_a, scale)
    f = lambda r: solver(r).imag

    if bracket is not None:
        lo, hi = bracket
        if np.sign(f(lo)) == np.sign(f(hi)):
            raise NoSignChange(f"{target}: no sign change on [{lo}, {hi}]")
        candidates = [(lo, hi)]
    else:
        candidates = [(a, b) for a, b in _scan_sign_changes(f, *scan, points)
                      if not (a <= 1.0 <= b)]
        if not candidates:
            raise NoSignChange(f"{target}: no sign change away from ratio 1 in {scan}")
    a, b = candidates[0]
    if a == b:
        return float(a)
    return float(scipy.optimize.bisect(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps))


def blockade_width_numerical(g: float, omega_a: float = 1e-4, gamma_d: float = 1.0,
                             search: float = 0.5, xtol: float = 1e-12) -> tuple[float, float]:
    """Endpoints of |m1_A / m1_B| = 1 around ratio 1 from the full solver."""
    def f(r):
        rho = solve(inverted_rates(r * gamma_d, gamma_d, omega_a, g))
        return abs(moments(rho, 0, 1).value) / abs(moments(rho, 1, 1).value) - 1

    guess = 20 * (g / gamma_d) ** 3 / 3
    step = max(guess, 1e-6)
    ends = []
    for sign in (-1, 1):
        inner = 1 + sign * step * 1e-3
        outer = 1 + sign * step
        while f(outer) < 0:
            outer = 1 + sign * (abs(outer - 1) * 2)
            if abs(outer - 1) > search:
                raise NoSignChange("blockade width: ratio never exceeds 1")
        lo, hi = sorted((inner, outer))
        ends.append(scipy.optimize.bisect(f, lo, hi, xtol=xtol))
    return float(ends[0]), float(ends[1])
