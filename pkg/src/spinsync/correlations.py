"""Correlation and entanglement diagnostics for spin-1 chains."""

from __future__ import annotations

import numpy as np

from .spin_algebra import DIM, SPIN1

EIG_CLIP = 1e-14


class UndefinedCorrelation(ArithmeticError):
    pass


def _as_matrix(rho) -> np.ndarray:
    return np.asarray(getattr(rho, "matrix", rho))


def _n_sites(dim: int) -> int:
    n = int(round(np.log(dim) / np.log(DIM)))
    if DIM**n != dim:
        raise ValueError(f"dimension {dim} is not a power of {DIM}")
    return n


def _check_sites(keep, n: int) -> tuple[int, ...]:
    keep = tuple(int(k) for k in keep)
    if len(set(keep)) != len(keep):
        raise ValueError(f"repeated sites in {keep}")
    for k in keep:
        if not 0 <= k < n:
            raise IndexError(f"site {k} out of range for {n} spins")
    return keep


def partial_trace(rho, keep) -> np.ndarray:
    """Reduced density matrix on the ordered ``keep`` sites."""
    r = _as_matrix(rho)
    n = _n_sites(r.shape[0])
    keep = _check_sites(keep, n)
    traced = [k for k in range(n) if k not in keep]
    t = r.reshape([DIM] * (2 * n))
    # move kept ket axes, then traced ket axes, then the matching bra axes
    perm = list(keep) + traced + [n + k for k in keep] + [n + k for k in traced]
    t = t.transpose(perm)
    dk, dt = DIM ** len(keep), DIM ** len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def partial_transpose(rho, site: int) -> np.ndarray:
    r = _as_matrix(rho)
    n = _n_sites(r.shape[0])
    _check_sites([site], n)
    t = r.reshape([DIM] * (2 * n))
    axes = list(range(2 * n))
    axes[site], axes[n + site] = axes[n + site], axes[site]
    return t.transpose(axes).reshape(r.shape)


def von_neumann_entropy(rho, base: float | None = None) -> float:
    """-sum lambda ln lambda in nats, or in ``base`` units if given."""
    lam = np.linalg.eigvalsh(_as_matrix(rho))
    lam = lam[lam > EIG_CLIP]
    s = float(-np.sum(lam * np.log(lam)))
    return s / np.log(base) if base else s


def mutual_information(rho, i: int, j: int, base: float | None = None) -> float:
    if i == j:
        raise ValueError("mutual information needs two distinct sites")
    return (von_neumann_entropy(partial_trace(rho, [i]), base)
            + von_neumann_entropy(partial_trace(rho, [j]), base)
            - von_neumann_entropy(partial_trace(rho, [i, j]), base))


def negativity(rho, transposed_site: int, pair: tuple[int, int] | None = None) -> float:
    """Sum of |negative eigenvalues| of the partial transpose.

    With more than two spins, pass ``pair`` to evaluate on that two-site
    reduced state; ``transposed_site`` then refers to the full chain.
    """
    r = _as_matrix(rho)
    site = transposed_site
    if pair is not None:
        if transposed_site not in pair:
            raise ValueError(f"site {transposed_site} not in pair {pair}")
        r = partial_trace(r, pair)
        site = list(pair).index(transposed_site)
    lam = np.linalg.eigvalsh(partial_transpose(r, site))
    return float(np.sum(np.abs(lam) - lam) / 2)


def _site_op(op, site, n):
    return np.kron(np.kron(np.eye(DIM**site), op), np.eye(DIM ** (n - site - 1)))


def covariance(rho, i: int, j: int, n: int) -> complex:
    """<(S-_i S+_j)^n> - <(S-_i)^n><(S+_j)^n>."""
    r = _as_matrix(rho)
    ns = _n_sites(r.shape[0])
    sm_i = _site_op(SPIN1.s_minus, i, ns)
    sp_j = _site_op(SPIN1.s_plus, j, ns)
    ev = lambda op: complex(np.trace(op @ r))
    mp = np.linalg.matrix_power
    return ev(mp(sm_i @ sp_j, n)) - ev(mp(sm_i, n)) * ev(mp(sp_j, n))


def correlation(rho, i: int, j: int, n: int, tol: float = 1e-14) -> complex:
    """Normalized correlation C^(n)_ij."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    vi = covariance(rho, i, i, n).real
    vj = covariance(rho, j, j, n).real
    if abs(vi) < tol or abs(vj) < tol:
        raise UndefinedCorrelation(f"variance below {tol:g} (COV_ii={vi:.3e}, COV_jj={vj:.3e})")
    return covariance(rho, i, j, n) / np.sqrt(complex(vi * vj))


def p_max(rho_ss, reference) -> float:
    """Largest change of a basis-state population relative to ``reference``."""
    a, b = _as_matrix(rho_ss), _as_matrix(reference)
    return float(np.max(np.abs(np.real(np.diag(a)) - np.real(np.diag(b)))))
