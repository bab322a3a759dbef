"""Drivers for every experiment kind; each returns CSV-ready rows keyed by schema."""

from __future__ import annotations

import itertools
import logging
import math

import numpy as np

from ..code import FamilyParams, build_layout, iter_all_patterns
from ..decode.exact import exact_failure_probability
from ..metrics import delta_dprime
from ..noise import BiasedNoiseParams, field_for, hashing_bound
from ..statmech.cluster import cluster_threshold
from ..statmech.percolation import percolation_scan
from .config import ExperimentConfig
from .fss import FssFit, fss_fit
from .rates import CodeSpec, RunSpec, estimate_logical_rate

log = logging.getLogger(__name__)


def _need(cfg: ExperimentConfig, *names: str) -> None:
    from .config import ConfigError

    for name in names:
        if not getattr(cfg, name):
            raise ConfigError(f"{cfg.kind} needs a non-empty {name}")


def rate_rows(cfg: ExperimentConfig, experiment: str, codes=None) -> list[dict]:
    """One logical-rate estimate per (code, L, p, eta), in that nesting order."""
    codes = tuple(codes) if codes is not None else cfg.codes
    rows = []
    for code, L, p, eta in itertools.product(codes, cfg.Ls, cfg.ps, cfg.etas):
        run = RunSpec(code, L, p, eta, cfg.decoder, cfg.trials, cfg.master_seed)
        est = estimate_logical_rate(run, cfg.jobs)
        log.info("%s L=%d p=%g eta=%g: %.5g +- %.2g", code.label, L, p, eta, est.p_logical, est.std_error)
        fam = code.family
        backend = cfg.decoder.backend(L)
        rows.append(
            {
                "experiment": experiment,
                "code": code.label,
                "pi_xz": fam.pi_xz if fam else None,
                "pi_yz": fam.pi_yz if fam else None,
                "L": L,
                "p": float(p),
                "eta": eta,
                "decoder": backend,
                "chi": cfg.decoder.chi if backend == "tn" else None,
                "trials": est.trials,
                "master_seed": cfg.master_seed,
                "p_logical": est.p_logical,
                "std_error": est.std_error,
                "converged_fraction": est.converged_fraction,
            }
        )
    return rows


def run_logical_rate(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    _need(cfg, "codes", "Ls", "ps", "etas")
    return {"rates": rate_rows(cfg, "logical_rate")}


def run_subthreshold(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    _need(cfg, "codes", "Ls", "ps", "etas")
    return {"rates": rate_rows(cfg, "subthreshold")}


def fit_threshold_rows(rows: list[dict]) -> list[tuple[str, float, FssFit]]:
    """Finite-size-scaling fit per (code, eta) group of rate rows."""
    groups: dict[tuple[str, float], list] = {}
    for r in rows:
        groups.setdefault((r["code"], r["eta"]), []).append(
            (r["p"], r["L"], r["p_logical"], max(r["std_error"], 1.0 / r["trials"]))
        )
    return [(code, eta, fss_fit(pts)) for (code, eta), pts in groups.items()]


def run_threshold(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    _need(cfg, "codes", "Ls", "ps", "etas")
    rows = rate_rows(cfg, "threshold")
    fits = []
    for code, _eta, fit in fit_threshold_rows(rows):
        fits.append(
            {
                "code": code,
                "p_th": fit.p_th,
                "nu": fit.nu,
                "A": fit.A,
                "B": fit.B,
                "C": fit.C,
                "residual": fit.residual,
                "reduced_chi2": fit.reduced_chi2,
                "p_th_err": fit.p_th_err,
                "nu_err": fit.nu_err,
                "low_confidence": fit.low_confidence,
            }
        )
    return {"rates": rows, "fss": fits}


def run_phase_scan(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    """Rate-versus-p curves for each family point (and any extra codes) at fixed bias."""
    codes = tuple(CodeSpec.from_family(pt) for pt in cfg.points) + cfg.codes
    if not codes:
        from .config import ConfigError

        raise ConfigError("phase_scan needs [phase_scan] points or codes")
    _need(cfg, "Ls", "ps", "etas")
    return {"rates": rate_rows(cfg, "phase_scan", codes)}


def run_small_code_sweep(p: float, etas, L: int = 3, patterns=None) -> list[dict]:
    """Exact logical error rate of every deformation pattern of the ``3 x 3`` code.

    Each rate is ``1 - sum_s max_c P(s, c)`` over the full ``4**9`` error
    table, so no sampling is involved.  ``patterns`` restricts the sweep.
    """
    if L != 3:
        raise ValueError("the exhaustive sweep is defined for L = 3")
    lay = build_layout(L)
    if patterns is None:
        patterns = list(iter_all_patterns(lay.n))
    rows = []
    for eta in etas:
        params = BiasedNoiseParams(p, eta)
        for pat in patterns:
            rate = exact_failure_probability(lay, field_for(params, pat))
            rows.append({"pattern": str(pat), "L": L, "p": float(p), "eta": params.eta, "p_logical": rate})
    return rows


def run_dprime_sweep(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    """Mean ``d'(L+2) - d'(L)`` per family point; every point reuses the seed."""
    _need(cfg, "ps", "etas")
    base_L = cfg.Ls[0] if cfg.Ls else 3
    rows = []
    for pt, p, eta in itertools.product(_family_points(cfg), cfg.ps, cfg.etas):
        mean, se = delta_dprime(pt, p, eta, cfg.samples, cfg.master_seed, base_L)
        rows.append(
            {
                "pi_xz": pt.pi_xz, "pi_yz": pt.pi_yz, "L": base_L, "p": float(p), "eta": eta,
                "samples": cfg.samples, "master_seed": cfg.master_seed, "delta_dprime": mean, "std_error": se,
            }
        )
    return {"dprime": rows}


def _family_points(cfg: ExperimentConfig) -> tuple[FamilyParams, ...]:
    pts = list(cfg.points) + [c.family for c in cfg.codes if c.family is not None]
    if not pts:
        from .config import ConfigError

        raise ConfigError(f"{cfg.kind} needs family points")
    return tuple(pts)


def run_percolation(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    _need(cfg, "Ls")
    rows = []
    for pt in _family_points(cfg):
        summ = percolation_scan(pt, cfg.Ls, cfg.realizations, cfg.master_seed)
        for k, L in enumerate(summ.Ls):
            rows.append(
                {
                    "pi_xz": pt.pi_xz, "pi_yz": pt.pi_yz, "L": L, "realizations": summ.realizations,
                    "master_seed": cfg.master_seed, "spanning_prob": summ.spanning_prob[k],
                    "largest_cluster": summ.mean_largest[k], "mean_path": summ.mean_path[k],
                    "tau_fit": summ.tau_fit, "tau_hist": summ.tau_hist, "path_exponent": summ.path_exponent,
                }
            )
    return {"percolation": rows}


def run_cluster_thresholds(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    _need(cfg, "etas", "levels")
    rows = []
    for i, eta in enumerate(cfg.etas):
        hb = hashing_bound(eta)
        for c in cfg.levels:
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.master_seed, spawn_key=(i, c))))
            pth = cluster_threshold(eta, c, cfg.mc_samples, rng)
            rows.append({"eta": eta, "c": c, "p_th": pth, "hashing_bound": hb})
    return {"cluster": rows}


def hashing_rows(etas) -> list[dict]:
    return [{"eta": eta, "p_hb": hashing_bound(eta)} for eta in etas]


def run_experiment(cfg: ExperimentConfig) -> dict[str, list[dict]]:
    """Dispatch on ``cfg.kind``; the result maps CSV schema names to rows."""
    if cfg.kind == "small_code_sweep":
        _need(cfg, "ps", "etas")
        rows = []
        for p in cfg.ps:
            rows += run_small_code_sweep(p, cfg.etas)
        return {"sweep3x3": rows}
    runners = {
        "logical_rate": run_logical_rate,
        "subthreshold": run_subthreshold,
        "threshold": run_threshold,
        "phase_scan": run_phase_scan,
        "dprime_sweep": run_dprime_sweep,
        "percolation": run_percolation,
        "cluster_threshold": run_cluster_thresholds,
    }
    return runners[cfg.kind](cfg)


def histogram_bins(rates, per_decade: int = 5) -> np.ndarray:
    """Log-spaced bin edges covering the positive rates, ``per_decade`` bins per decade."""
    r = np.asarray([v for v in rates if v > 0], dtype=float)
    if r.size == 0:
        return np.array([1e-6, 1.0])
    lo = math.floor(math.log10(r.min()) * per_decade) / per_decade
    hi = math.ceil(math.log10(r.max()) * per_decade) / per_decade
    if hi <= lo:
        hi = lo + 1.0 / per_decade
    return 10.0 ** np.linspace(lo, hi, int(round((hi - lo) * per_decade)) + 1)


__all__ = [
    "fit_threshold_rows",
    "hashing_rows",
    "histogram_bins",
    "rate_rows",
    "run_cluster_thresholds",
    "run_dprime_sweep",
    "run_experiment",
    "run_logical_rate",
    "run_percolation",
    "run_phase_scan",
    "run_small_code_sweep",
    "run_subthreshold",
    "run_threshold",
]
