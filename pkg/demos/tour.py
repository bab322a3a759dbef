"""A short tour: effective distances, exact small-code rates and a TN-decoded estimate.

Run with ``python3 demos/tour.py``; it finishes in well under a minute.
"""

from __future__ import annotations

from cdsc.code import build_layout, make_code
from cdsc.decode import exact_failure_probability
from cdsc.harness import CodeSpec, DecoderSpec, RunSpec, estimate_logical_rate
from cdsc.metrics import effective_distance
from cdsc.noise import BiasedNoiseParams, field_for, hashing_bound


def main() -> None:
    p = 0.01
    print("L=3 presets at p=0.01")
    print(f"{'eta':>8} {'code':>5} {'d_prime':>8} {'t_prime':>8} {'exact rate':>11}")
    for eta in (0.5, 100, 1e4):
        params = BiasedNoiseParams(p, eta)
        for name in ("CSS", "XZZX", "XY"):
            code = make_code(3, name)
            rep = effective_distance(code, params)
            rate = exact_failure_probability(build_layout(3), field_for(params, code.pattern))
            print(f"{eta:>8g} {name:>5} {rep.d_prime:8.3f} {rep.t_prime:8.3f} {rate:11.3e}")

    print("\nhashing bound:", ", ".join(f"eta={e:g}: {hashing_bound(e):.4f}" for e in (0.5, 10, 100, 1e4)))

    run = RunSpec(CodeSpec.parse("family:0.25,0.5"), 5, 0.2, 100, DecoderSpec("tn", 16), trials=500, master_seed=1)
    est = estimate_logical_rate(run)
    print(f"\n(0.25,0.5) family, L=5, p=0.2, eta=100: {est.p_logical:.4f} +- {est.std_error:.4f}")


if __name__ == "__main__":
    main()
