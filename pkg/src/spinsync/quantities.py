"""Named scalar observables of a steady state, as used by the CLI outputs.

Names: ``m1_A``, ``m2_AB`` (moments), ``p_max`` (vs the H = 0 state),
``p_max_inf`` (vs rho_infinity, two spins), ``S_A`` (entropy), ``I_AB``,
``N_AB`` (negativity of the first site of the pair), ``C1_AB``, ``C2_AB``,
``sym_defect`` and ``residual``.
"""

from __future__ import annotations

import re

import numpy as np

from . import correlations as corr
from .liouvillian import Liouvillian, ground_state, symmetry_defect, vec
from .measures import SITE_NAMES, moments
from .spin_algebra import rho_infinity

COMPLEX = "complex"
REAL = "real"

_PATTERN = re.compile(r"^(m[12]|S|I|N|C[12])_([ABC]{1,2})$|^(p_max|p_max_inf|sym_defect|residual)$")


def _sites(letters: str, n: int) -> tuple[int, ...]:
    idx = tuple(SITE_NAMES.index(c) for c in letters)
    if any(i >= n for i in idx):
        raise ValueError(f"site label {letters!r} out of range for {n} spins")
    if len(set(idx)) != len(idx):
        raise ValueError(f"repeated site in {letters!r}")
    return idx


def kind(name: str, n_spins: int) -> str:
    """Validate ``name`` for an ``n_spins`` chain and return its value kind."""
    m = _PATTERN.match(name)
    if not m:
        raise ValueError(f"unknown quantity {name!r}")
    if m.group(3):
        if name == "p_max_inf" and n_spins != 2:
            raise ValueError("p_max_inf is defined for two spins only")
        return REAL
    head, letters = m.group(1), m.group(2)
    idx = _sites(letters, n_spins)
    if head in ("I", "N", "C1", "C2") and len(idx) != 2:
        raise ValueError(f"{name}: needs a pair of sites")
    if head == "S" and len(idx) != 1:
        raise ValueError(f"{name}: entropy takes a single site")
    return COMPLEX if head[0] in "mC" else REAL


def default_outputs(mode: str, n_spins: int) -> list[str]:
    pairs = {1: [], 2: ["AB"], 3: ["AB", "BC", "CA"]}[n_spins]
    sites = list(SITE_NAMES[:n_spins])
    if mode == "entangle":
        out = [f"S_{s}" for s in sites]
        out += [f"I_{p}" for p in pairs] + [f"N_{p}" for p in pairs] + [f"C2_{p}" for p in pairs]
        return out
    out = [f"m1_{s}" for s in sites] + [f"m1_{p}" for p in pairs]
    out += [f"m2_{s}" for s in sites] + [f"m2_{p}" for p in pairs]
    out.append("p_max")
    if mode == "steady":
        out += ["sym_defect", "residual"]
    return out


def evaluate(name: str, rho: np.ndarray, L: Liouvillian | None = None, entropy_base=None):
    n = int(round(np.log(rho.shape[0]) / np.log(3)))
    kind(name, n)
    if name == "p_max":
        return corr.p_max(rho, ground_state(n))
    if name == "p_max_inf":
        return corr.p_max(rho, rho_infinity())
    if name == "sym_defect":
        return symmetry_defect(rho, n)
    if name == "residual":
        if L is None:
            raise ValueError("residual needs the Liouvillian")
        return float(np.linalg.norm(L.matrix @ vec(rho)) / np.linalg.norm(L.matrix))
    head, letters = name.split("_")
    idx = _sites(letters, n)
    if head in ("m1", "m2"):
        spec = idx[0] if len(idx) == 1 else idx
        return moments(rho, spec, int(head[1])).value
    if head == "S":
        return corr.von_neumann_entropy(corr.partial_trace(rho, idx), entropy_base)
    if head == "I":
        return corr.mutual_information(rho, *idx, base=entropy_base)
    if head == "N":
        pair = idx if n > 2 else None
        return corr.negativity(rho, idx[0], pair=pair)
    return corr.correlation(rho, idx[0], idx[1], int(head[1]))


def columns(name: str, n_spins: int) -> list[str]:
    if kind(name, n_spins) == COMPLEX:
        return [f"{name}_re", f"{name}_im", f"{name}_abs", f"{name}_phase"]
    return [name]


def split_complex(z) -> list[float]:
    """re, im, abs and locking phase -arg(z) in (-pi, pi]."""
    if z is None:
        return [float("nan")] * 4
    z = complex(z)
    phase = -np.angle(z)
    if phase <= -np.pi:
        phase = np.pi
    return [z.real, z.imag, abs(z), float(phase) + 0.0]


def flatten(name: str, value, n_spins: int) -> list[float]:
    if kind(name, n_spins) == COMPLEX:
        return split_complex(value)
    return [float("nan") if value is None else float(value)]
