"""Phase-distribution synchronization measures built on spin coherent states.

Closed forms go through the operator c^S(phi) whose expectation value is
the theta-integrated Husimi Q function. ``quadrature_oracle`` evaluates the
same integrals numerically from explicit coherent states and is kept
independent of the closed-form path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial, gamma

import numpy as np
import scipy.linalg

from .spin_algebra import SPIN1

SUPPORTED_SPINS = (0.5, 1.0, 1.5)

# c^1(phi) = 1/2pi + sum_k e^{ik phi} C_k; prefactors of S+ and (S+)^2
C1_PREFACTOR = 3 / 32
C2_PREFACTOR = 1 / (8 * np.pi)

# moment prefactors: m_j^(n) = <(S+_j)^n> x SITE, m_ij^(n) = <(S+_i S-_j)^n> x PAIR
SITE_PREFACTOR = {1: C1_PREFACTOR, 2: C2_PREFACTOR}
PAIR_PREFACTOR = {1: 2 * np.pi * C1_PREFACTOR**2, 2: 2 * np.pi * C2_PREFACTOR**2}

SITE_NAMES = "ABC"


def _as_matrix(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho))


def _n_spins(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = int(round(np.log(d) / np.log(3)))
    if 3**n != d:
        raise ValueError(f"dimension {d} is not a power of 3")
    return n


def _mvalues(S: float) -> np.ndarray:
    return S - np.arange(int(round(2 * S)) + 1)


def wigner_d_little(S: float, n: float, theta: float) -> float:
    """d^S_{n,S}(theta) for the extremal column m = S."""
    if abs(n) > S + 1e-12:
        raise ValueError(f"|n| = {abs(n)} exceeds S = {S}")
    a, b = int(round(S + n)), int(round(S - n))
    pref = np.sqrt(factorial(int(round(2 * S))) / (factorial(a) * factorial(b)))
    return float(pref * np.cos(theta / 2) ** a * np.sin(theta / 2) ** b)


def c_operator(S: float, phi: float) -> np.ndarray:
    """c^S(phi) with entries from the Gamma-function closed form."""
    if not any(np.isclose(S, s) for s in SUPPORTED_SPINS):
        raise ValueError(f"spin {S} not supported; use one of {SUPPORTED_SPINS}")
    ms = _mvalues(S)
    c = np.empty((ms.size, ms.size), dtype=complex)
    for i, n in enumerate(ms):
        for j, m in enumerate(ms):
            num = gamma(1 + S + (n + m) / 2) * gamma(1 + S - (n + m) / 2)
            den = np.sqrt(
                factorial(round(S + n)) * factorial(round(S - n))
                * factorial(round(S + m)) * factorial(round(S - m))
            )
            c[i, j] = np.exp(1j * (n - m) * phi) * num / den / (2 * np.pi)
    return c


def fourier_components() -> dict[int, np.ndarray]:
    """C_k such that c^1(phi) = sum_k e^{i k phi} C_k, k in -2..2."""
    sp = SPIN1.s_plus
    comps = {0: np.eye(3, dtype=complex) / (2 * np.pi),
             1: C1_PREFACTOR * sp,
             2: C2_PREFACTOR * sp @ sp}
    comps[-1] = comps[1].conj().T
    comps[-2] = comps[2].conj().T
    return comps


_FOURIER = fourier_components()


@dataclass(frozen=True)
class MomentRecord:
    label: tuple[int, ...]
    order: int
    value: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def locking_phase(self) -> float:
        """Angle of the distribution maximum, -arg(m), folded into (-pi, pi]."""
        p = -np.angle(self.value)
        return float(np.pi if p <= -np.pi else p)

    @property
    def name(self) -> str:
        return f"m{self.order}_" + "".join(SITE_NAMES[i] for i in self.label)


def _site_op(op: np.ndarray, site: int, n: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(3**site), op), np.eye(3 ** (n - site - 1)))


def moment_operator(spec, order: int, n_spins: int) -> np.ndarray:
    """Operator whose expectation is the moment (prefactor included)."""
    if order not in (1, 2):
        raise ValueError(f"moment order must be 1 or 2, got {order}")
    label = (spec,) if np.isscalar(spec) else tuple(spec)
    sp = SPIN1.s_plus
    if len(label) == 1:
        op = _site_op(np.linalg.matrix_power(sp, order), label[0], n_spins)
        return SITE_PREFACTOR[order] * op
    if len(label) == 2:
        i, j = label
        if i == j:
            raise ValueError("pair moment needs two distinct sites")
        x = _site_op(sp, i, n_spins) @ _site_op(sp.conj().T, j, n_spins)
        return PAIR_PREFACTOR[order] * np.linalg.matrix_power(x, order)
    raise ValueError(f"moment label must be a site or a pair, got {spec!r}")


def moments(rho, spec, n: int) -> MomentRecord:
    """m^(n) for a site j or ordered pair (i, j)."""
    r = _as_matrix(rho)
    op = moment_operator(spec, n, _n_spins(r))
    label = (spec,) if np.isscalar(spec) else tuple(spec)
    return MomentRecord(label=label, order=n, value=complex(np.trace(op @ r)))


def s1(rho, site: int, phi):
    """Single-site distribution S_1(phi) from its two Fourier moments."""
    m1 = moments(rho, site, 1).value
    m2 = moments(rho, site, 2).value
    phi = np.asarray(phi, dtype=float)
    return 2 * np.real(m1 * np.exp(1j * phi)) + 2 * np.real(m2 * np.exp(2j * phi))


def _kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def joint_distribution(rho, phis) -> np.ndarray:
    """S_N(phi_1, ..., phi_N) = <(x)_j c^1(phi_j)> - (2 pi)^-N.

    ``phis`` has shape (..., N); the result has shape (...).
    """
    r = _as_matrix(rho)
    n = _n_spins(r)
    phis = np.asarray(phis, dtype=float)
    if phis.shape[-1] != n:
        raise ValueError(f"need {n} angles per point, got {phis.shape[-1]}")
    flat = phis.reshape(-1, n)
    out = np.empty(flat.shape[0])
    for idx, p in enumerate(flat):
        c = _kron_all(c_operator(1.0, x) for x in p)
        out[idx] = np.real(np.trace(c @ r)) - (2 * np.pi) ** (-n)
    return out.reshape(phis.shape[:-1])


def _reduced_expectations(r: np.ndarray, sites: tuple[int, ...]) -> dict:
    """<(x)_{s in sites} C_{k_s}> for all winding tuples with zero total."""
    from .correlations import partial_trace  # local: avoid import cycle

    red = partial_trace(r, sites)
    m = len(sites)
    out = {}
    for ks in itertools.product(range(-2, 3), repeat=m):
        if sum(ks) != 0:
            continue
        op = _kron_all(_FOURIER[k] for k in ks)
        out[ks] = complex(np.trace(op @ red))
    return out


def relative_marginal(rho, offsets, sites=None) -> np.ndarray:
    """Distribution of relative phases with the global phase integrated out.

    The kept ``sites`` take angles ``psi + offsets[..., s]``; ``psi`` runs over
    [0, 2 pi) and every other site's angle is integrated individually.
    Evaluated exactly by keeping only winding tuples with zero total.
    """
    r = _as_matrix(rho)
    n = _n_spins(r)
    if n not in (2, 3):
        raise ValueError(f"relative marginals need 2 or 3 spins, got {n}")
    sites = tuple(range(n)) if sites is None else tuple(sites)
    if len(sites) < 2 or len(set(sites)) != len(sites) or not all(0 <= s < n for s in sites):
        raise ValueError(f"invalid site selection {sites} for {n} spins")
    offsets = np.asarray(offsets, dtype=float)
    if offsets.shape[-1] != len(sites):
        raise ValueError(f"need {len(sites)} offsets per point, got {offsets.shape[-1]}")

    terms = _reduced_expectations(r, sites)
    m = len(sites)
    # integrated sites contribute 2 pi * (1/2pi) = identity; the psi integral adds 2 pi
    val = np.zeros(offsets.shape[:-1], dtype=complex)
    for ks, e in terms.items():
        val = val + e * np.exp(1j * offsets @ np.asarray(ks, dtype=float))
    return 2 * np.pi * np.real(val) - (2 * np.pi) ** (1 - m)


def pair_marginal(rho, i: int, j: int, phi_ij) -> np.ndarray:
    """S_2(phi_ij) with phi_ij = phi_i - phi_j."""
    phi = np.asarray(phi_ij, dtype=float)
    off = np.stack([phi, np.zeros_like(phi)], axis=-1)
    return relative_marginal(rho, off, sites=(i, j))


def s3_ab_bc(rho, phi_ab, phi_bc) -> np.ndarray:
    phi_ab, phi_bc = np.broadcast_arrays(np.asarray(phi_ab, float), np.asarray(phi_bc, float))
    off = np.stack([phi_ab, np.zeros_like(phi_ab), -phi_bc], axis=-1)
    return relative_marginal(rho, off)


def s3_ab_ca(rho, phi_ab, phi_ca) -> np.ndarray:
    phi_ab, phi_ca = np.broadcast_arrays(np.asarray(phi_ab, float), np.asarray(phi_ca, float))
    off = np.stack([np.zeros_like(phi_ab), -phi_ab, phi_ca], axis=-1)
    return relative_marginal(rho, off)


@dataclass(frozen=True)
class PhaseDistribution:
    kind: str
    angles: np.ndarray
    values: np.ndarray
    label: str = ""

    def local_maxima(self) -> np.ndarray:
        """Angles of strict local maxima on a periodic 1-D grid."""
        v = self.values
        if v.ndim != 1:
            raise ValueError("local_maxima is only defined for 1-D samples")
        peak = (v > np.roll(v, 1)) & (v >= np.roll(v, -1))
        return self.angles[peak]


def phase_grid(samples: int = 360) -> np.ndarray:
    return -np.pi + 2 * np.pi * np.arange(samples) / samples


def s1_distribution(rho, site: int, samples: int = 360) -> PhaseDistribution:
    phi = phase_grid(samples)
    return PhaseDistribution("S1", phi, s1(rho, site, phi), SITE_NAMES[site])


def pair_distribution(rho, i: int, j: int, samples: int = 360) -> PhaseDistribution:
    phi = phase_grid(samples)
    return PhaseDistribution("S2_relative", phi, pair_marginal(rho, i, j, phi),
                             SITE_NAMES[i] + SITE_NAMES[j])


# --- numerical oracle -------------------------------------------------------

THETA_NODES = 64
PHI_NODES = 256


def spin_matrices(S: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(S_z, S_+, S_y) for spin S in the descending-m basis."""
    ms = _mvalues(S)
    sz = np.diag(ms).astype(complex)
    sp = np.zeros((ms.size, ms.size), dtype=complex)
    for i in range(1, ms.size):
        m = ms[i]
        sp[i - 1, i] = np.sqrt(S * (S + 1) - m * (m + 1))
    sy = (sp - sp.conj().T) / 2j
    return sz, sp, sy


def coherent_state(S: float, theta: float, phi: float) -> np.ndarray:
    """exp(-i phi S_z) exp(-i theta S_y)|S, S> by matrix exponentials."""
    sz, _, sy = spin_matrices(S)
    top = np.zeros(sz.shape[0], dtype=complex)
    top[0] = 1.0
    return scipy.linalg.expm(-1j * phi * sz) @ (scipy.linalg.expm(-1j * theta * sy) @ top)


def husimi_q(rho, thetas, phis, S: float = 1.0) -> float:
    """Q(theta, phi, rho) for a tensor product of spin coherent states."""
    r = _as_matrix(rho)
    thetas, phis = np.atleast_1d(thetas), np.atleast_1d(phis)
    if thetas.size != phis.size:
        raise ValueError("need one theta and one phi per spin")
    psi = _kron_all(coherent_state(S, t, p)[:, None] for t, p in zip(thetas, phis))[:, 0]
    if psi.size != r.shape[0]:
        raise ValueError(f"{thetas.size} angles do not match dimension {r.shape[0]}")
    norm = ((2 * S + 1) / (4 * np.pi)) ** thetas.size
    return float(norm * np.real(np.vdot(psi, r @ psi)))


@lru_cache(maxsize=None)
def _theta_integral(S: float, nodes: int) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = np.pi / 2 * (x + 1)
    w = w * np.pi / 2
    dim = int(round(2 * S)) + 1
    acc = np.zeros((dim, dim), dtype=complex)
    for t, wt in zip(theta, w):
        k = coherent_state(S, t, 0.0)
        acc += wt * np.sin(t) * np.outer(k, k.conj())
    return (2 * S + 1) / (4 * np.pi) * acc


def theta_integrated_projector(S: float, phi: float, nodes: int = THETA_NODES) -> np.ndarray:
    """(2S+1)/4pi * int_0^pi sin(theta) |theta,phi><theta,phi| by Gauss-Legendre."""
    sz, _, _ = spin_matrices(S)
    u = scipy.linalg.expm(-1j * phi * sz)
    return u @ _theta_integral(float(S), nodes) @ u.conj().T


def quadrature_oracle(rho, angles, integrate=(), S: float = 1.0, mirror: bool = True,
                      theta_nodes: int = THETA_NODES, phi_nodes: int = PHI_NODES) -> float:
    """Numerical S_N(phi) or one of its marginals.

    ``angles`` gives phi_j for every site as a function of integration
    variables: either a sequence of fixed angles, or a callable
    ``angles(*u) -> sequence`` whose arguments ``u`` (one per entry of
    ``integrate``) are integrated over [0, 2 pi) by the trapezoid rule.
    ``integrate`` is a tuple of labels, only its length matters.

    The theta-integrated coherent-state projector equals c^S(phi) transposed,
    i.e. c^S(-phi). With ``mirror`` (default) the coherent states are taken
    at -phi so the result is in the convention of :func:`s1` and the moments;
    ``mirror=False`` integrates the Husimi function at phi as written.
    """
    r = _as_matrix(rho)
    dim = int(round(2 * S)) + 1
    n = int(round(np.log(r.shape[0]) / np.log(dim)))
    n_int = len(integrate)
    grid = 2 * np.pi * np.arange(phi_nodes) / phi_nodes
    h = 2 * np.pi / phi_nodes
    sign = -1.0 if mirror else 1.0
    cache: dict[float, np.ndarray] = {}

    def proj(phi):
        key = float(np.mod(sign * phi, 2 * np.pi))
        if key not in cache:
            cache[key] = theta_integrated_projector(S, key, theta_nodes)
        return cache[key]

    def value(phis):
        op = _kron_all(proj(p) for p in phis)
        return float(np.real(np.trace(op @ r)))

    if n_int == 0:
        phis = angles() if callable(angles) else angles
        return value(phis) - (2 * np.pi) ** (-n)
    total = 0.0
    for u in itertools.product(grid, repeat=n_int):
        total += value(angles(*u))
    total *= h**n_int
    return total - (2 * np.pi) ** (n_int - n)
