"""Experiment configuration: strict TOML ingestion and lossless round-trip.

One structured-text file per experiment, with sections [freq], [initial],
[scheme], [grid], [run], [output].  Unknown keys anywhere are errors, so a
typo like "trucated" fails fast instead of silently running the default.
Values that are mathematically pi-like (the cut-off K) accept strings such
as "pi/3" or "inf".
"""

import math
import os
import re
from dataclasses import dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:        # 3.10: stdlib tomllib arrived in 3.11
    import tomli as tomllib

from .freqlat import FrequencyModel, K_INF
from .integrators import SchemeConfig, SCHEMES
from .spectral import InitialSpec
from .tableio import format_float

OUTDIR_ENV = "RESONLAB_OUTDIR"


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


_PI_FORM = re.compile(r"(?:([0-9]+(?:\.[0-9]+)?)\s*\*?\s*)?pi(?:\s*/\s*([0-9]+(?:\.[0-9]+)?))?")


def parse_real(value, where=""):
    """Float from a TOML value; strings may use inf / pi / pi/3 / 2*pi forms."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        s = value.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        m = _PI_FORM.fullmatch(s)
        if m:
            coef = float(m.group(1)) if m.group(1) else 1.0
            div = float(m.group(2)) if m.group(2) else 1.0
            return coef * math.pi / div
        try:
            return float(s)
        except ValueError:
            pass
    raise ConfigError(f"cannot parse real number {value!r}{where}")


def real_to_toml(x: float) -> str:
    if x == K_INF:
        return "inf"
    if x == math.pi:
        return '"pi"'
    for d in (2, 3, 4, 6):
        if x == math.pi / d:
            return f'"pi/{d}"'
    return format_float(x)


@dataclass(frozen=True)
class RunSection:
    n_steps: int = 0            # exactly one of n_steps / T is set
    T: float = 0.0
    record_every: int = 1
    sobolev_s: float = 0.0

    def resolved_steps(self, h: float) -> int:
        if self.n_steps:
            return self.n_steps
        return int(round(self.T / h))


@dataclass(frozen=True)
class OutputSection:
    csv: str = ""
    svg: str = ""
    svg_modes: tuple = ()
    state_csv: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    freq: FrequencyModel
    initial: InitialSpec
    scheme: str
    h: float
    K: float = K_INF
    fixed_point_tol: float = 1e-12
    fixed_point_max_iters: int = 200
    grid_n: int = 100
    run: RunSection = field(default_factory=RunSection)
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme kind {self.scheme!r}")
        if bool(self.run.n_steps) == bool(self.run.T):
            raise ConfigError("exactly one of run.n_steps / run.T must be set")
        if self.grid_n % 2 or self.grid_n < 16:
            raise ConfigError("grid.n must be even and >= 16")

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(scheme=self.scheme, h=self.h, freq=self.freq,
                            K=self.K, fixed_point_tol=self.fixed_point_tol,
                            fixed_point_max_iters=self.fixed_point_max_iters)

    def n_steps(self) -> int:
        return self.run.resolved_steps(self.h)


_ALLOWED = {
    "freq": {"kind", "potential_scale", "k_max", "overrides"},
    "initial": {"formula", "amplitude", "shifted_grid", "coefficients",
                "scale", "scale_to_sobolev"},
    "scheme": {"kind", "h", "K", "fixed_point_tol", "fixed_point_max_iters"},
    "grid": {"n"},
    "run": {"n_steps", "T", "record_every", "sobolev_s"},
    "output": {"csv", "svg", "svg_modes", "state_csv"},
}


def _check_keys(section, data):
    unknown = set(data) - _ALLOWED[section]
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in [{section}] "
            f"(allowed: {sorted(_ALLOWED[section])})")


def config_from_dict(doc: dict) -> ExperimentConfig:
    unknown = set(doc) - set(_ALLOWED)
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)} "
                          f"(allowed: {sorted(_ALLOWED)})")
    for required in ("freq", "initial", "scheme", "run"):
        if required not in doc:
            raise ConfigError(f"missing required section [{required}]")

    f = dict(doc["freq"])
    _check_keys("freq", f)
    overrides = tuple((int(a), parse_real(v, " in [freq].overrides"))
                      for a, v in f.get("overrides", ()))
    freq = FrequencyModel(kind=f.get("kind", "nls-convolution"),
                          potential_scale=parse_real(f.get("potential_scale", 1.0)),
                          overrides=overrides,
                          index_bound=int(f.get("k_max", 50)))

    ini = dict(doc["initial"])
    _check_keys("initial", ini)
    coeff_rows = ini.get("coefficients", ())
    coeffs = tuple((int(row[0]), complex(float(row[1]), float(row[2])))
                   for row in coeff_rows)
    run_raw = dict(doc["run"])
    _check_keys("run", run_raw)
    run = RunSection(n_steps=int(run_raw.get("n_steps", 0)),
                     T=parse_real(run_raw.get("T", 0.0), " in [run].T"),
                     record_every=int(run_raw.get("record_every", 1)),
                     sobolev_s=parse_real(run_raw.get("sobolev_s", 0.0)))
    try:
        initial = InitialSpec(
            formula=ini.get("formula", ""),
            coefficients=coeffs,
            amplitude=parse_real(ini.get("amplitude", 1.0)),
            shifted_grid=bool(ini.get("shifted_grid", True)),
            scale=parse_real(ini.get("scale", 1.0)),
            scale_to_sobolev=parse_real(ini.get("scale_to_sobolev", 0.0)),
            sobolev_s=run.sobolev_s)
    except ValueError as err:
        raise ConfigError(f"[initial]: {err}") from err

    sch = dict(doc["scheme"])
    _check_keys("scheme", sch)
    if "kind" not in sch or "h" not in sch:
        raise ConfigError("[scheme] requires kind and h")

    out_raw = dict(doc.get("output", {}))
    _check_keys("output", out_raw)
    output = OutputSection(csv=str(out_raw.get("csv", "")),
                           svg=str(out_raw.get("svg", "")),
                           svg_modes=tuple(int(m) for m in out_raw.get("svg_modes", ())),
                           state_csv=str(out_raw.get("state_csv", "")))

    grid = dict(doc.get("grid", {"n": 100}))
    _check_keys("grid", grid)

    try:
        return ExperimentConfig(
            freq=freq, initial=initial,
            scheme=str(sch["kind"]), h=parse_real(sch["h"], " in [scheme].h"),
            K=parse_real(sch.get("K", K_INF), " in [scheme].K"),
            fixed_point_tol=parse_real(sch.get("fixed_point_tol", 1e-12)),
            fixed_point_max_iters=int(sch.get("fixed_point_max_iters", 200)),
            grid_n=int(grid.get("n", 100)),
            run=run, output=output)
    except (ValueError, TypeError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(str(err)) from err


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        try:
            doc = tomllib.load(fh)
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"{path}: {err}") from err
    return config_from_dict(doc)


def config_to_toml(cfg: ExperimentConfig) -> str:
    """Deterministic serialization; parsing it back reproduces the config."""
    out = []
    out.append("[freq]")
    out.append(f'kind = "{cfg.freq.kind}"')
    out.append(f"potential_scale = {format_float(cfg.freq.potential_scale)}")
    out.append(f"k_max = {cfg.freq.index_bound}")
    if cfg.freq.overrides:
        rows = ", ".join(f"[{a}, {format_float(v)}]" for a, v in cfg.freq.overrides)
        out.append(f"overrides = [{rows}]")
    out.append("")
    out.append("[initial]")
    ini = cfg.initial
    if ini.formula:
        out.append(f'formula = "{ini.formula}"')
        out.append(f"amplitude = {format_float(ini.amplitude)}")
        out.append(f"shifted_grid = {'true' if ini.shifted_grid else 'false'}")
    else:
        rows = ", ".join(
            f"[{k}, {format_float(v.real)}, {format_float(v.imag)}]"
            for k, v in ini.coefficients)
        out.append(f"coefficients = [{rows}]")
    if ini.scale != 1.0:
        out.append(f"scale = {format_float(ini.scale)}")
    if ini.scale_to_sobolev:
        out.append(f"scale_to_sobolev = {format_float(ini.scale_to_sobolev)}")
    out.append("")
    out.append("[scheme]")
    out.append(f'kind = "{cfg.scheme}"')
    out.append(f"h = {format_float(cfg.h)}")
    if cfg.K != K_INF:
        out.append(f"K = {real_to_toml(cfg.K)}")
    if cfg.fixed_point_tol != 1e-12:
        out.append(f"fixed_point_tol = {format_float(cfg.fixed_point_tol)}")
    if cfg.fixed_point_max_iters != 200:
        out.append(f"fixed_point_max_iters = {cfg.fixed_point_max_iters}")
    out.append("")
    out.append("[grid]")
    out.append(f"n = {cfg.grid_n}")
    out.append("")
    out.append("[run]")
    if cfg.run.n_steps:
        out.append(f"n_steps = {cfg.run.n_steps}")
    else:
        out.append(f"T = {format_float(cfg.run.T)}")
    out.append(f"record_every = {cfg.run.record_every}")
    out.append(f"sobolev_s = {format_float(cfg.run.sobolev_s)}")
    if any((cfg.output.csv, cfg.output.svg, cfg.output.state_csv)):
        out.append("")
        out.append("[output]")
        if cfg.output.csv:
            out.append(f'csv = "{cfg.output.csv}"')
        if cfg.output.svg:
            out.append(f'svg = "{cfg.output.svg}"')
            modes = ", ".join(str(m) for m in cfg.output.svg_modes)
            out.append(f"svg_modes = [{modes}]")
        if cfg.output.state_csv:
            out.append(f'state_csv = "{cfg.output.state_csv}"')
    return "\n".join(out) + "\n"


def with_parameter(cfg: ExperimentConfig, parameter: str, value: float) -> ExperimentConfig:
    """Config copy with one swept parameter replaced (h, K or epsilon)."""
    if parameter == "h":
        return replace(cfg, h=float(value))
    if parameter == "K":
        return replace(cfg, K=float(value))
    if parameter == "epsilon":
        initial = replace(cfg.initial, scale_to_sobolev=float(value),
                          sobolev_s=cfg.run.sobolev_s)
        return replace(cfg, initial=initial)
    raise ConfigError(f"unknown sweep parameter {parameter!r} "
                      "(expected h, K or epsilon)")


def resolve_out_dir(explicit=None) -> str:
    """Output directory: explicit flag > RESONLAB_OUTDIR > cwd."""
    if explicit:
        return explicit
    return os.environ.get(OUTDIR_ENV, "") or os.getcwd()
