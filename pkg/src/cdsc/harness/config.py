"""Experiment configuration files.

An INI-style file with section headers.  Every key below is optional unless
the experiment needs it; any other section or key is rejected::

    [experiment]
    kind = subthreshold      ; logical_rate | threshold | subthreshold | dprime_sweep |
                             ; phase_scan | percolation | cluster_threshold | small_code_sweep
    seed = 1                 ; master seed
    trials = 20000           ; Monte Carlo trials per point
    out = results.csv
    jobs = 1                 ; worker processes (never changes the output)

    [code]
    preset = xzzx            ; CSS | XY | XZZX
    family = 0.25, 0.5       ; IID (pi_xz, pi_yz) family
    unit_cell = YIY/HYH/IYI  ; tiled cell (ti = the built-in cell)
    pattern = IHY...         ; explicit row-major pattern
    pattern_file = p.txt     ; the same, read from a file (relative to the config)
    codes = family:0.25,0.5; xzzx; xy; ti   ; several codes at once

    [lattice]
    L = 9, 13

    [noise]
    p = 0.2                  ; list allowed
    eta = 100                ; list allowed; inf for pure dephasing

    [decoder]
    name = tn                ; exact | tn | transfer | enumerate
    chi = 20
    check_convergence = yes

    [phase_scan]
    points = 0.5,0; 0.1,0.1  ; (pi_xz, pi_yz) points; also used by dprime_sweep

    [dprime]
    samples = 500            ; realisations per point

    [percolation]
    realizations = 20

    [cluster]
    levels = 0, 1, 2
    mc_samples = 200000
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..code import FamilyParams
from ..decode.tn import DEFAULT_CHI
from ..noise import parse_eta
from .rates import CodeSpec, DecoderSpec

KINDS = (
    "logical_rate",
    "threshold",
    "subthreshold",
    "dprime_sweep",
    "phase_scan",
    "percolation",
    "cluster_threshold",
    "small_code_sweep",
)
DEFAULT_TRIALS = 20_000

ALLOWED = {
    "experiment": {"kind", "seed", "trials", "out", "jobs"},
    "code": {"preset", "family", "unit_cell", "pattern", "pattern_file", "codes"},
    "lattice": {"l"},
    "noise": {"p", "eta"},
    "decoder": {"name", "chi", "check_convergence"},
    "phase_scan": {"points"},
    "dprime": {"samples"},
    "percolation": {"realizations"},
    "cluster": {"levels", "mc_samples"},
}


class ConfigError(ValueError):
    """Invalid or unknown configuration content."""


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    codes: tuple[CodeSpec, ...] = ()
    Ls: tuple[int, ...] = ()
    ps: tuple[float, ...] = ()
    etas: tuple[float, ...] = ()
    decoder: DecoderSpec = DecoderSpec()
    trials: int = DEFAULT_TRIALS
    master_seed: int = 0
    out: str | None = None
    jobs: int = 1
    points: tuple[FamilyParams, ...] = ()
    samples: int = 500
    realizations: int = 20
    levels: tuple[int, ...] = (0, 1, 2)
    mc_samples: int = 200_000
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.trials < 1 or self.jobs < 1 or self.samples < 1 or self.realizations < 1:
            raise ConfigError("trials, jobs, samples and realizations must be positive")

    def with_overrides(self, **kw) -> "ExperimentConfig":
        """Copy with the non-``None`` keyword values replaced."""
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _list(text: str, conv, sep: str = ","):
    return tuple(conv(v.strip()) for v in text.split(sep) if v.strip())


def _points(text: str) -> tuple[FamilyParams, ...]:
    out = []
    for chunk in text.split(";"):
        if chunk.strip():
            a, b = _list(chunk, float)
            out.append(FamilyParams(a, b))
    return tuple(out)


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    for sec in cp.sections():
        if sec not in ALLOWED:
            raise ConfigError(f"unknown section [{sec}]")
        unknown = set(cp[sec]) - ALLOWED[sec]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{sec}]: {', '.join(sorted(unknown))}")

    def get(sec, key, default=None):
        return cp.get(sec, key, fallback=default) if cp.has_section(sec) else default

    kind = get("experiment", "kind")
    if kind is None:
        raise ConfigError("[experiment] kind is required")
    kw: dict = {"kind": kind.strip()}
    try:
        for key, conv in (("seed", int), ("trials", int), ("jobs", int)):
            v = get("experiment", key)
            if v is not None:
                kw["master_seed" if key == "seed" else key] = conv(v)
        if get("experiment", "out") is not None:
            kw["out"] = get("experiment", "out").strip()

        codes = []
        if get("code", "preset"):
            codes.append(CodeSpec.parse(get("code", "preset")))
        if get("code", "family"):
            a, b = _list(get("code", "family"), float)
            codes.append(CodeSpec.from_family(FamilyParams(a, b)))
        if get("code", "unit_cell"):
            cell = get("code", "unit_cell").strip()
            codes.append(CodeSpec.parse(cell if cell.lower() == "ti" else f"cell:{cell}"))
        if get("code", "pattern"):
            codes.append(CodeSpec.parse("pattern:" + get("code", "pattern")))
        if get("code", "pattern_file"):
            path = Path(get("code", "pattern_file").strip())
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            codes.append(CodeSpec.parse("pattern:" + path.read_text()))
        if get("code", "codes"):
            codes.extend(CodeSpec.parse(c) for c in get("code", "codes").split(";") if c.strip())
        kw["codes"] = tuple(codes)

        if get("lattice", "l"):
            kw["Ls"] = _list(get("lattice", "l"), int)
        if get("noise", "p"):
            kw["ps"] = _list(get("noise", "p"), float)
        if get("noise", "eta"):
            kw["etas"] = _list(get("noise", "eta"), parse_eta)

        name = get("decoder", "name", "tn").strip()
        chi = int(get("decoder", "chi", DEFAULT_CHI))
        check = cp.getboolean("decoder", "check_convergence", fallback=True) if cp.has_section("decoder") else True
        kw["decoder"] = DecoderSpec(name, chi, check)

        if get("phase_scan", "points"):
            kw["points"] = _points(get("phase_scan", "points"))
        if get("dprime", "samples"):
            kw["samples"] = int(get("dprime", "samples"))
        if get("percolation", "realizations"):
            kw["realizations"] = int(get("percolation", "realizations"))
        if get("cluster", "levels"):
            kw["levels"] = _list(get("cluster", "levels"), int)
        if get("cluster", "mc_samples"):
            kw["mc_samples"] = int(get("cluster", "mc_samples"))
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.parent)


__all__ = ["ConfigError", "DEFAULT_TRIALS", "ExperimentConfig", "KINDS", "load_config", "parse_config"]
