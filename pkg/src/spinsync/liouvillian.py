"""Lindblad generator for a chain of driven, coupled spin-1 oscillators.

Superoperators act on column-stacked density matrices,
``vec(A rho B) = (B.T kron A) vec(rho)``; in numpy terms
``vec(rho) = rho.reshape(-1, order="F")``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .spin_algebra import DIM, SPIN1, basis_state, site_ops

DEGENERACY_RATIO = 1e-9


class DegenerateSteadyState(RuntimeError):
    """More than one (numerically) zero singular value in the generator."""


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SystemConfig:
    """Physical parameters of an open chain of spin-1 oscillators.

    All rates are pure numbers in units of a reference rate. ``g[j]``
    couples site ``j`` to ``j + 1``.
    """

    n_spins: int
    gamma_g: tuple[float, ...]
    gamma_d: tuple[float, ...]
    omega: tuple[float, ...] = ()
    g: tuple[float, ...] = ()

    def __post_init__(self):
        n = self.n_spins
        if not isinstance(n, (int, np.integer)) or not 1 <= n <= 3:
            raise ConfigError(f"n_spins must be 1, 2 or 3, got {n!r}")
        omega = self.omega if len(self.omega) else (0.0,) * n
        g = self.g if len(self.g) else (0.0,) * (n - 1)
        object.__setattr__(self, "gamma_g", tuple(float(x) for x in self.gamma_g))
        object.__setattr__(self, "gamma_d", tuple(float(x) for x in self.gamma_d))
        object.__setattr__(self, "omega", tuple(float(x) for x in omega))
        object.__setattr__(self, "g", tuple(float(x) for x in g))
        for name, expected in (("gamma_g", n), ("gamma_d", n), ("omega", n), ("g", n - 1)):
            values = getattr(self, name)
            if len(values) != expected:
                raise ConfigError(f"{name}: expected {expected} values, got {len(values)}")
            for v in values:
                if not np.isfinite(v) or v < 0:
                    raise ConfigError(f"{name}: values must be finite and >= 0, got {v}")
        for j, (gg, gd) in enumerate(zip(self.gamma_g, self.gamma_d)):
            if gg == 0 and gd == 0:
                raise ConfigError(f"gamma_g/gamma_d: spin {j} has no stabilizing process")

    @property
    def dim(self) -> int:
        return DIM**self.n_spins

    @property
    def equal_rates(self) -> bool:
        rates = set(self.gamma_g) | set(self.gamma_d)
        return len(rates) == 1

    def replace(self, **changes) -> "SystemConfig":
        kw = dict(n_spins=self.n_spins, gamma_g=self.gamma_g, gamma_d=self.gamma_d,
                  omega=self.omega, g=self.g)
        kw.update(changes)
        return SystemConfig(**kw)

    def without_hamiltonian(self) -> "SystemConfig":
        return self.replace(omega=(0.0,) * self.n_spins, g=(0.0,) * (self.n_spins - 1))


def two_spin(omega_a: float = 0.0, g: float = 0.0, gamma: float = 1.0) -> SystemConfig:
    """Two spins at equal rates with a drive on spin A."""
    return SystemConfig(2, (gamma, gamma), (gamma, gamma), (omega_a, 0.0), (g,))


def inverted_rates(gamma_g: float, gamma_d: float, omega_a: float = 0.0, g: float = 0.0) -> SystemConfig:
    """Two spins with gain/damping swapped between A and B."""
    return SystemConfig(2, (gamma_g, gamma_d), (gamma_d, gamma_g), (omega_a, 0.0), (g,))


def three_spin(g_ab: float, g_bc: float, gamma: float = 1.0) -> SystemConfig:
    return SystemConfig(3, (gamma,) * 3, (gamma,) * 3, (0.0,) * 3, (g_ab, g_bc))


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape((dim, dim), order="F")


def build_hamiltonian(config: SystemConfig) -> np.ndarray:
    ops = site_ops(config.n_spins)
    h = np.zeros((config.dim, config.dim), dtype=complex)
    for j, w in enumerate(config.omega):
        if w:
            h += (w / 2) * ops[j].s_plus
    for j, gj in enumerate(config.g):
        if gj:
            h += (gj / 2) * ops[j].s_plus @ ops[j + 1].s_minus
    return h + h.conj().T


def commutator_superop(h: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i[H, rho]."""
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(op: np.ndarray) -> np.ndarray:
    """Matrix of D[L](rho) = L rho L^+ - {L^+ L, rho}/2."""
    eye = np.eye(op.shape[0])
    ldl = op.conj().T @ op
    return np.kron(op.conj(), op) - 0.5 * (np.kron(eye, ldl) + np.kron(ldl.T, eye))


def jump_operators(config: SystemConfig) -> list[tuple[float, np.ndarray]]:
    """(rate, L) pairs; the generator contains (rate/2) D[L] for each."""
    ops = site_ops(config.n_spins)
    jumps = []
    for j, o in enumerate(ops):
        if config.gamma_g[j]:
            jumps.append((config.gamma_g[j], o.s_plus @ o.s_z))
        if config.gamma_d[j]:
            jumps.append((config.gamma_d[j], o.s_minus @ o.s_z))
    return jumps


def build_dissipator(config: SystemConfig) -> np.ndarray:
    d2 = config.dim**2
    out = np.zeros((d2, d2), dtype=complex)
    for rate, op in jump_operators(config):
        out += (rate / 2) * dissipator_superop(op)
    return out


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray = field(repr=False)
    config: SystemConfig

    @property
    def dim(self) -> int:
        return self.config.dim

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)


def build_liouvillian(config: SystemConfig) -> Liouvillian:
    h = build_hamiltonian(config)
    m = commutator_superop(h) + build_dissipator(config)
    m.setflags(write=False)
    return Liouvillian(matrix=m, config=config)


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray = field(repr=False)
    n_spins: int

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(op @ self.matrix))

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))


def _hermitize(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def steady_state(L: Liouvillian) -> DensityMatrix:
    """Null vector of the generator from its SVD, normalized to unit trace."""
    _, s, vh = scipy.linalg.svd(L.matrix, lapack_driver="gesdd")
    # singular values come sorted descending
    if s[-2] < DEGENERACY_RATIO * s[0]:
        raise DegenerateSteadyState(
            f"two smallest singular values {s[-2]:.3e}, {s[-1]:.3e} below "
            f"{DEGENERACY_RATIO:g} x {s[0]:.3e}"
        )
    v = vh[-1].conj()
    rho = unvec(v, L.dim)
    return DensityMatrix(_hermitize(rho), L.config.n_spins)


def steady_state_trace_row(L: Liouvillian) -> DensityMatrix:
    """Steady state by replacing one row of the generator with the trace constraint."""
    d = L.dim
    a = np.array(L.matrix, dtype=complex)
    b = np.zeros(d * d, dtype=complex)
    a[0, :] = vec(np.eye(d))
    b[0] = 1.0
    rho = unvec(scipy.linalg.solve(a, b), d)
    return DensityMatrix(_hermitize(rho), L.config.n_spins)


def solve(config: SystemConfig) -> DensityMatrix:
    return steady_state(build_liouvillian(config))


def ground_state(n_spins: int) -> np.ndarray:
    """The H = 0 dark state |0...0><0...0|."""
    k = basis_state(*([0] * n_spins))
    return np.outer(k, k.conj())


def symmetry_transform_Z(n_spins: int) -> np.ndarray:
    """Z = exp(i pi sum_j S^x_j), exchanging |m> <-> |-m> on every site."""
    z1 = scipy.linalg.expm(1j * np.pi * SPIN1.s_x)
    z = np.eye(1, dtype=complex)
    for _ in range(n_spins):
        z = np.kron(z, z1)
    return z


def symmetry_defect(rho: np.ndarray, n_spins: int) -> float:
    """max |Z rho Z^+ - rho|."""
    z = symmetry_transform_Z(n_spins)
    return float(np.max(np.abs(z @ rho @ z.conj().T - rho)))


FIELD_ALIASES = {"omega_a": "omega.0", "g_ab": "g.0", "g_bc": "g.1"}


def set_field(config: SystemConfig, path: str, value: float) -> SystemConfig:
    """Copy of ``config`` with one list entry replaced, e.g. ``"omega.0"``.

    A bare list name (``"g"``) sets every entry of that list.
    """
    path = FIELD_ALIASES.get(path, path)
    name, _, idx = path.partition(".")
    if name not in ("gamma_g", "gamma_d", "omega", "g"):
        raise ConfigError(f"unknown field {path!r}")
    values = list(getattr(config, name))
    if idx == "":
        values = [float(value)] * len(values)
    else:
        try:
            values[int(idx)] = float(value)
        except (ValueError, IndexError):
            raise ConfigError(f"field {path!r} has no entry {idx!r}") from None
    return config.replace(**{name: tuple(values)})
