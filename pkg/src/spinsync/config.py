"""Job description files for the command-line front end.

The grammar is INI-like: ``[section]`` headers, ``key = value`` lines,
``#`` comments, and lists written as comma-separated numbers::

    [system]
    n_spins = 2
    gamma = 1            # shorthand: every gain and damping rate
    omega = 0.1, 0
    g = 0.15

    [job]
    mode = sweep2d
    outputs = m1_A, m1_B, p_max

    [grid]
    x = omega.0 log 0.01 10 50     # field scale min max count
    y = g.0 log 0.01 10 50

Other sections: ``[locus]`` (target, g, omega_a, scale, bracket) and
``[perturb]`` (max_order, targets, monomials, axes). Unknown sections or
keys are rejected.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import quantities
from .liouvillian import ConfigError, FIELD_ALIASES, SystemConfig, set_field

MODES = ("steady", "dist", "sweep2d", "locus", "perturb", "entangle")
FORMATS = ("csv", "json")

DEFAULT_AXIS = ("log", 1e-2, 10.0, 50)

_KEYS = {
    "system": {"n_spins", "gamma", "gamma_g", "gamma_d", "omega", "g"},
    "job": {"mode", "outputs", "format", "workers", "samples", "entropy_base",
            "joint", "joint_samples", "out"},
    "grid": {"x", "y"},
    "locus": {"target", "g", "omega_a", "scale", "bracket"},
    "perturb": {"max_order", "targets", "monomials", "axes"},
}


class ConfigParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(key)
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class Axis:
    field: str
    scale: str = "log"
    min: float = 1e-2
    max: float = 10.0
    count: int = 50

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)

    def to_text(self) -> str:
        return f"{self.field} {self.scale} {self.min!r} {self.max!r} {self.count}"


@dataclass(frozen=True)
class LocusSpec:
    target: str = "m1AB"
    g: tuple[float, ...] = (0.05,)
    omega_a: float = 1e-3
    scale: str = "sum"
    bracket: tuple[float, float] | None = None


@dataclass(frozen=True)
class PerturbSpec:
    max_order: int = 4
    targets: tuple[str, ...] = ()
    monomials: tuple[tuple[int, int], ...] = ()
    axes: tuple[str, str] = ("omega.0", "g.0")


@dataclass(frozen=True)
class JobSpec:
    mode: str = "steady"
    system: SystemConfig = field(default_factory=lambda: SystemConfig(2, (1.0, 1.0), (1.0, 1.0)))
    grid: tuple[Axis, ...] = ()
    outputs: tuple[str, ...] = ()
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    samples: int = 360
    entropy_base: str = "e"
    joint: bool = False
    joint_samples: int = 72
    locus: LocusSpec = field(default_factory=LocusSpec)
    perturb: PerturbSpec = field(default_factory=PerturbSpec)

    def resolved_outputs(self) -> tuple[str, ...]:
        if self.outputs:
            return self.outputs
        return tuple(quantities.default_outputs(self.mode, self.system.n_spins))

    def with_mode(self, mode: str) -> "JobSpec":
        return validate(replace(self, mode=mode))

    def to_text(self) -> str:
        s = self.system
        fmt = lambda xs: ", ".join(repr(float(x)) for x in xs)
        lines = ["[system]", f"n_spins = {s.n_spins}", f"gamma_g = {fmt(s.gamma_g)}",
                 f"gamma_d = {fmt(s.gamma_d)}", f"omega = {fmt(s.omega)}"]
        if s.n_spins > 1:
            lines.append(f"g = {fmt(s.g)}")
        lines += ["", "[job]", f"mode = {self.mode}", f"format = {self.format}",
                  f"workers = {self.workers}", f"samples = {self.samples}",
                  f"entropy_base = {self.entropy_base}", f"joint = {str(self.joint).lower()}",
                  f"joint_samples = {self.joint_samples}"]
        if self.outputs:
            lines.append(f"outputs = {', '.join(self.outputs)}")
        if self.out:
            lines.append(f"out = {self.out}")
        if self.grid:
            lines += ["", "[grid]"]
            lines += [f"{k} = {a.to_text()}" for k, a in zip("xy", self.grid)]
        lo = self.locus
        lines += ["", "[locus]", f"target = {lo.target}", f"g = {fmt(lo.g)}",
                  f"omega_a = {lo.omega_a!r}", f"scale = {lo.scale}"]
        if lo.bracket:
            lines.append(f"bracket = {fmt(lo.bracket)}")
        p = self.perturb
        lines += ["", "[perturb]", f"max_order = {p.max_order}", f"axes = {', '.join(p.axes)}"]
        if p.targets:
            lines.append(f"targets = {', '.join(p.targets)}")
        if p.monomials:
            lines.append("monomials = " + ", ".join(f"{a}:{b}" for a, b in p.monomials))
        return "\n".join(lines) + "\n"


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    current = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        m = re.match(r"^\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return no
            continue
        if current == section and key is not None and re.match(rf"^{re.escape(key)}\s*[=:]", line):
            return no
    return None


def _floats(raw: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ValueError(f"{key}: expected comma-separated numbers, got {raw!r}") from None


def _int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{key}: expected an integer, got {raw!r}") from None


def _bool(raw: str, key: str) -> bool:
    v = raw.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{key}: expected true/false, got {raw!r}")


def _axis(raw: str, key: str) -> Axis:
    parts = raw.split()
    if len(parts) != 5:
        raise ValueError(f"{key}: expected 'field scale min max count', got {raw!r}")
    fld, scale, lo, hi, count = parts
    return Axis(FIELD_ALIASES.get(fld, fld), scale, float(lo), float(hi), _int(count, key))


def _system(sec: dict[str, str]) -> SystemConfig:
    n = _int(sec.get("n_spins", "2"), "n_spins")
    gamma = _floats(sec.get("gamma", "1"), "gamma")
    if len(gamma) != 1:
        raise ValueError("gamma: expected a single number")
    gg = _floats(sec["gamma_g"], "gamma_g") if "gamma_g" in sec else gamma * n
    gd = _floats(sec["gamma_d"], "gamma_d") if "gamma_d" in sec else gamma * n
    omega = _floats(sec["omega"], "omega") if "omega" in sec else (0.0,) * n
    g = _floats(sec["g"], "g") if "g" in sec else (0.0,) * max(n - 1, 0)
    return SystemConfig(n, gg, gd, omega, g)


def validate(spec: JobSpec) -> JobSpec:
    if spec.mode not in MODES:
        raise ConfigError(f"mode: must be one of {', '.join(MODES)}, got {spec.mode!r}")
    if spec.format not in FORMATS:
        raise ConfigError(f"format: must be csv or json, got {spec.format!r}")
    if spec.workers < 1:
        raise ConfigError("workers: must be >= 1")
    if spec.samples < 1 or spec.joint_samples < 1:
        raise ConfigError("samples: must be >= 1")
    if spec.entropy_base not in ("e", "2"):
        raise ConfigError(f"entropy_base: must be e or 2, got {spec.entropy_base!r}")
    if spec.mode == "sweep2d" and not spec.grid and spec.system.n_spins > 1:
        spec = replace(spec, grid=(Axis("omega.0", *DEFAULT_AXIS), Axis("g.0", *DEFAULT_AXIS)))
    for a in spec.grid:
        if a.count < 1:
            raise ConfigError(f"grid: count must be >= 1 for {a.field}")
        if a.scale not in ("log", "linear"):
            raise ConfigError(f"grid: scale must be log or linear, got {a.scale!r}")
        if a.scale == "log" and (a.min <= 0 or a.max <= 0):
            raise ConfigError(f"grid: log axis {a.field} needs positive bounds")
        try:
            set_field(spec.system, a.field, a.min)
        except ConfigError as exc:
            raise ConfigError(f"grid: {exc}") from None
    if spec.mode == "sweep2d" and len(spec.grid) != 2:
        raise ConfigError("grid: sweep2d needs both x and y axes")
    for name in spec.outputs:
        try:
            quantities.kind(name, spec.system.n_spins)
        except ValueError as exc:
            raise ConfigError(f"outputs: {exc}") from None
    lo = spec.locus
    if lo.target not in ("m1A", "m1AB"):
        raise ConfigError(f"target: must be m1A or m1AB, got {lo.target!r}")
    if lo.scale not in ("sum", "damping"):
        raise ConfigError(f"scale: must be sum or damping, got {lo.scale!r}")
    if not lo.g or any(x < 0 for x in lo.g) or lo.omega_a < 0:
        raise ConfigError("g: locus couplings and omega_a must be >= 0")
    if lo.bracket is not None and (len(lo.bracket) != 2 or min(lo.bracket) <= 0):
        raise ConfigError("bracket: expected two positive ratios")
    p = spec.perturb
    if not 0 <= p.max_order <= 8:
        raise ConfigError("max_order: must be in 0..8")
    for t in p.targets:
        if not re.match(r"^m[12]_[ABC]{1,2}$", t):
            raise ConfigError(f"targets: {t!r} is not a moment name")
        try:
            quantities.kind(t, spec.system.n_spins)
        except ValueError as exc:
            raise ConfigError(f"targets: {exc}") from None
    for a, b in p.monomials:
        if a < 0 or b < 0 or a + b > p.max_order:
            raise ConfigError(f"monomials: {a}:{b} exceeds max_order {p.max_order}")
    if spec.mode == "perturb":
        for ax in p.axes:
            try:
                set_field(spec.system, ax, 0.0)
            except ConfigError as exc:
                raise ConfigError(f"axes: {exc}") from None
    return spec


def parse_config(text: str) -> JobSpec:
    """Parse and validate a job description; unknown keys are errors."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None,
                                   default_section="__defaults__")
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigParseError(str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None

    sections = {}
    for name in cp.sections():
        if name not in _KEYS:
            raise ConfigParseError(f"unknown section [{name}]", _line_of(text, name))
        sec = dict(cp.items(name))
        for key in sec:
            if key not in _KEYS[name]:
                raise ConfigParseError(f"unknown key {key!r} in [{name}]", _line_of(text, name, key), key)
        sections[name] = sec

    def guarded(section, fn):
        sec = sections.get(section, {})
        try:
            return fn(sec)
        except (ValueError, ConfigError) as exc:
            msg = str(exc)
            key = next((k for k in sorted(sec, key=len, reverse=True) if msg.startswith(k + ":")), None)
            if key is None:
                key = next((k for k in sec if k in msg), None)
            line = _line_of(text, section, key) if key else _line_of(text, section)
            raise ConfigParseError(msg, line, key) from None

    system = guarded("system", _system)

    def job(sec):
        kw = {}
        if "mode" in sec:
            kw["mode"] = sec["mode"].strip()
        if "outputs" in sec:
            kw["outputs"] = tuple(x.strip() for x in sec["outputs"].split(",") if x.strip())
        if "format" in sec:
            kw["format"] = sec["format"].strip()
        if "out" in sec:
            kw["out"] = sec["out"].strip()
        for k in ("workers", "samples", "joint_samples"):
            if k in sec:
                kw[k] = _int(sec[k], k)
        if "entropy_base" in sec:
            kw["entropy_base"] = sec["entropy_base"].strip()
        if "joint" in sec:
            kw["joint"] = _bool(sec["joint"], "joint")
        return kw

    def grid(sec):
        return tuple(_axis(sec[k], k) for k in ("x", "y") if k in sec)

    def locus(sec):
        kw = {}
        if "target" in sec:
            kw["target"] = sec["target"].strip()
        if "g" in sec:
            kw["g"] = _floats(sec["g"], "g")
        if "omega_a" in sec:
            kw["omega_a"] = _floats(sec["omega_a"], "omega_a")[0]
        if "scale" in sec:
            kw["scale"] = sec["scale"].strip()
        if "bracket" in sec:
            kw["bracket"] = _floats(sec["bracket"], "bracket")
        return LocusSpec(**kw)

    def perturb(sec):
        kw = {}
        if "max_order" in sec:
            kw["max_order"] = _int(sec["max_order"], "max_order")
        if "targets" in sec:
            kw["targets"] = tuple(x.strip() for x in sec["targets"].split(",") if x.strip())
        if "monomials" in sec:
            mons = []
            for tok in sec["monomials"].split(","):
                a, sep, b = tok.strip().partition(":")
                if not sep:
                    raise ValueError(f"monomials: expected 'a:b' pairs, got {tok.strip()!r}")
                mons.append((_int(a, "monomials"), _int(b, "monomials")))
            kw["monomials"] = tuple(mons)
        if "axes" in sec:
            axes = tuple(FIELD_ALIASES.get(x.strip(), x.strip()) for x in sec["axes"].split(","))
            if len(axes) != 2:
                raise ValueError("axes: expected two field names")
            kw["axes"] = axes
        return PerturbSpec(**kw)

    spec = JobSpec(
        system=system,
        grid=guarded("grid", grid),
        locus=guarded("locus", locus),
        perturb=guarded("perturb", perturb),
        **guarded("job", job),
    )
    # validation errors name the offending key; map them back to a line
    section_of = {k: s for s, keys in _KEYS.items() for k in keys if s != "system"}
    try:
        return validate(spec)
    except ConfigError as exc:
        msg = str(exc)
        key = msg.split(":", 1)[0] if ":" in msg else None
        sec = key if key in _KEYS else section_of.get(key, "job")
        raise ConfigParseError(msg, _line_of(text, sec, key) or _line_of(text, sec), key) from None
