"""Monte Carlo logical error rates with jackknife error bars.

Every trial owns its random stream::

    SeedSequence(master_seed, spawn_key=(stream, trial))  ->  PCG64

where ``stream`` is the CRC-32 of the run's canonical point string (code,
size, error rate, bias).  Results therefore do not depend on how trials are
split across worker processes, and runs that differ only in the decoder see
the same errors.

All decoding happens in the undeformed frame: a sampled error is already a
standard-frame operator, its syndrome is the CSS syndrome, and only the
per-qubit channel depends on the deformation pattern.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field as dc_field
from multiprocessing import get_context

import numpy as np

from ..code import (
    ENUMERATION_MAX_QUBITS,
    TI_UNIT_CELL,
    FamilyParams,
    make_code,
    preset,
    sample_pattern,
    tiled_pattern,
)
from ..decode.core import choose_classes, standard_pure_error
from ..decode.exact import exact_coset_logs, syndrome_class_table
from ..decode.tn import CONVERGENCE_STEP, DEFAULT_CHI, tn_coset_logs_batch
from ..decode.transfer import TRANSFER_MAX_L, transfer_coset_logs
from ..noise import BiasedNoiseParams, field_for, format_eta, parse_eta, sample_error_bits
from ..pauli import DeformationPattern

RNG_NAME = "PCG64"
BLOCK_SIZE = 64  # trials decoded together; fixed so output never depends on --jobs
PRESETS = ("CSS", "XY", "XZZX")


class TrialError(RuntimeError):
    """A decoder refused or failed on a specific trial."""

    def __init__(self, trial: int, message: str):
        super().__init__(f"trial {trial}: {message}")
        self.trial = trial


@dataclass(frozen=True)
class CodeSpec:
    """Which code a run uses.

    ``kind`` is ``"preset"`` (CSS, XY, XZZX), ``"family"`` (IID random
    deformations, a new realisation per trial), ``"pattern"`` (explicit
    row-major letters over ``I, H, Y``) or ``"unit_cell"`` (tiled cell).
    """

    kind: str
    value: str
    family: FamilyParams | None = dc_field(default=None, compare=False)

    @classmethod
    def parse(cls, text: str) -> "CodeSpec":
        """Parse ``xzzx``, ``family:0.25,0.5``, ``cell:YIY/HYH/IYI``, ``pattern:IHY...`` or ``ti``."""
        t = text.strip()
        head, _, rest = t.partition(":")
        key = head.strip().lower()
        if not rest:
            if t.upper() in PRESETS:
                return cls("preset", t.upper())
            if key == "ti":
                return cls("unit_cell", "/".join(TI_UNIT_CELL))
            raise ValueError(f"unrecognised code spec {text!r}")
        if key == "family":
            a, b = (float(v) for v in rest.split(","))
            return cls.from_family(FamilyParams(a, b))
        if key in ("cell", "unit_cell"):
            rows = [r.strip().upper() for r in rest.replace(",", "/").split("/") if r.strip()]
            tiled_pattern(rows, len(rows[0]))  # validates letters and shape
            return cls("unit_cell", "/".join(rows))
        if key == "pattern":
            letters = "".join(rest.split()).upper()
            DeformationPattern.from_string(letters)
            return cls("pattern", letters)
        if key == "preset":
            return cls.parse(rest)
        raise ValueError(f"unrecognised code spec {text!r}")

    @classmethod
    def from_family(cls, params: FamilyParams) -> "CodeSpec":
        return cls("family", f"{params.pi_xz!r},{params.pi_yz!r}", params)

    def __post_init__(self):
        if self.kind == "family" and self.family is None:
            a, b = (float(v) for v in self.value.split(","))
            object.__setattr__(self, "family", FamilyParams(a, b))

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.value}"

    @property
    def is_random(self) -> bool:
        return self.kind == "family"

    def pattern(self, L: int, rng: np.random.Generator | None = None) -> DeformationPattern:
        if self.kind == "preset":
            return preset(self.value, L)
        if self.kind == "family":
            if rng is None:
                raise ValueError("family codes need an rng to draw a realisation")
            return sample_pattern(self.family, L * L, rng)
        if self.kind == "unit_cell":
            return tiled_pattern(self.value.split("/"), L)
        pat = DeformationPattern.from_string(self.value)
        if pat.n != L * L:
            raise ValueError(f"pattern has {pat.n} qubits, L={L} needs {L * L}")
        return pat


@dataclass(frozen=True)
class DecoderSpec:
    """``exact`` picks enumeration (n <= 13) or transfer matrices (L <= 11); ``tn`` is approximate."""

    name: str = "tn"
    chi: int = DEFAULT_CHI
    check_convergence: bool = True

    def __post_init__(self):
        if self.name not in ("exact", "enumerate", "transfer", "tn"):
            raise ValueError(f"unknown decoder {self.name!r}")
        if self.chi < 1:
            raise ValueError("chi must be positive")

    def backend(self, L: int) -> str:
        if self.name == "exact":
            if L * L <= ENUMERATION_MAX_QUBITS:
                return "enumerate"
            if L <= TRANSFER_MAX_L:
                return "transfer"
            raise ValueError(f"no exact decoder for L={L}; use the tensor-network decoder")
        return self.name


@dataclass(frozen=True)
class RunSpec:
    code: CodeSpec
    L: int
    p: float
    eta: float
    decoder: DecoderSpec = DecoderSpec()
    trials: int = 20_000
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "eta", parse_eta(self.eta))
        if self.L < 3 or self.L % 2 == 0:
            raise ValueError(f"L must be odd and >= 3, got {self.L}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        BiasedNoiseParams(self.p, self.eta)  # validates p and eta

    @property
    def point(self) -> str:
        """Canonical description of the sampled distribution (decoder and trial count excluded)."""
        return f"{self.code.label}|L={self.L}|p={float(self.p)!r}|eta={format_eta(self.eta)}"

    @property
    def stream(self) -> int:
        return zlib.crc32(self.point.encode())

    def trial_rng(self, trial: int) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream, trial))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class RateEstimate:
    p_logical: float
    std_error: float
    trials: int
    converged_fraction: float

    def __post_init__(self):
        if not 0.0 <= self.p_logical <= 1.0:
            raise ValueError("p_logical outside [0, 1]")
        if not self.std_error >= 0.0:
            raise ValueError("std_error must be non-negative")


def jackknife_mean(samples) -> tuple[float, float]:
    """Mean and leave-one-out jackknife standard error.

    For the mean the delete-one estimates are ``(S - x_i) / (n - 1)``, so the
    whole resampling costs one pass.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n == 0:
        raise ValueError("no samples")
    mean = float(x.mean())
    if n == 1:
        return mean, 0.0
    loo = (x.sum() - x) / (n - 1)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return mean, se


def _run_block(args: tuple[RunSpec, int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Decode trials ``start..stop-1``; returns failures and convergence flags (-1 = not checked)."""
    run, start, stop = args
    L = run.L
    noise = BiasedNoiseParams(run.p, run.eta)
    layout_code = make_code(L)
    lay = layout_code.layout
    fixed_field = None if run.code.is_random else field_for(noise, run.code.pattern(L))
    fields, syndromes, classes = [], [], []
    for i in range(start, stop):
        rng = run.trial_rng(i)
        f = fixed_field if fixed_field is not None else field_for(noise, run.code.pattern(L, rng))
        x, z = sample_error_bits(f, rng)
        s = lay.css_syndrome_bits(x, z)
        pe = standard_pure_error(layout_code, s)
        classes.append(int(lay.css_class_bits(x ^ pe.x_bits, z ^ pe.z_bits)))
        fields.append(f)
        syndromes.append(s)

    backend = run.decoder.backend(L)
    conv = np.full(stop - start, -1, dtype=np.int8)
    if backend == "tn":
        chi = run.decoder.chi
        try:
            logs = tn_coset_logs_batch(layout_code, fields, syndromes, chi)
            if run.decoder.check_convergence and chi > CONVERGENCE_STEP:
                coarse = tn_coset_logs_batch(layout_code, fields, syndromes, chi - CONVERGENCE_STEP)
                conv[:] = choose_classes(coarse) == choose_classes(logs)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise TrialError(start, f"tensor-network decoding of trials {start}..{stop - 1} failed: {exc}") from exc
        dead = ~np.isfinite(logs).any(axis=1)
        conv[dead] = 0
    elif backend == "enumerate" and fixed_field is not None:
        # one exhaustive (syndrome, class) table serves the whole block
        with np.errstate(divide="ignore"):
            table = np.log(syndrome_class_table(lay, fixed_field))
        weights = 1 << np.arange(lay.num_generators)
        logs = table[np.array([int(s @ weights) for s in syndromes])]
        conv[:] = 1
    else:
        coset = exact_coset_logs if backend == "enumerate" else transfer_coset_logs
        rows = []
        for k, (f, s) in enumerate(zip(fields, syndromes)):
            try:
                rows.append(coset(layout_code, f, s))
            except ValueError as exc:
                raise TrialError(start + k, str(exc)) from exc
        logs = np.array(rows)
        conv[:] = 1
    chosen = choose_classes(logs)
    return (chosen != np.array(classes)).astype(np.int8), conv


def run_trials(run: RunSpec, jobs: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Failure indicators and convergence flags for every trial, in trial order."""
    blocks = [(run, a, min(a + BLOCK_SIZE, run.trials)) for a in range(0, run.trials, BLOCK_SIZE)]
    if jobs > 1 and len(blocks) > 1:
        with get_context("fork").Pool(jobs) as pool:
            parts = pool.map(_run_block, blocks, chunksize=1)
    else:
        parts = [_run_block(b) for b in blocks]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def estimate_logical_rate(run: RunSpec, jobs: int = 1) -> RateEstimate:
    """Failure fraction over ``run.trials`` decoded samples with a jackknife error bar.

    ``converged_fraction`` is the share of trials on which the tensor-network
    decoder agreed with its ``chi - 8`` rerun; exact backends report 1 and an
    unchecked TN run reports ``nan``.
    """
    fails, conv = run_trials(run, jobs)
    mean, se = jackknife_mean(fails)
    checked = conv >= 0
    frac = float(conv[checked].mean()) if checked.any() else math.nan
    return RateEstimate(mean, se, run.trials, frac)


__all__ = [
    "BLOCK_SIZE",
    "CodeSpec",
    "DecoderSpec",
    "RNG_NAME",
    "RateEstimate",
    "RunSpec",
    "TrialError",
    "estimate_logical_rate",
    "jackknife_mean",
    "run_trials",
]
