"""Throwaway calibration probe (deleted before delivery)."""
import json
import time

import numpy as np

import ibmi

P = 4096
results = {}


def log(key, value):
    results[key] = value
    print(key, "=>", value, flush=True)
    with open("/root/pkg/probe1.json", "w") as fh:
        json.dump(results, fh, indent=2, default=str)


pts = ibmi.grid_1d(P)
half = ibmi.contiguous_partition(P, 2, 0.0)

specs = {
    "exp": ibmi.KernelSpec("exp"),
    "rbf03": ibmi.KernelSpec("rbf", sigma=0.3),
    "rbf05": ibmi.KernelSpec("rbf", sigma=0.5),
    "rbf07": ibmi.KernelSpec("rbf", sigma=0.7),
    "iquad": ibmi.KernelSpec("iquad"),
    "m52t3": ibmi.KernelSpec("matern52", tau=3.0),
}

mats = {}
for name, spec in specs.items():
    t0 = time.perf_counter()
    mats[name] = ibmi.kernel_matrix(spec, pts)
    log(f"gen_{name}_seconds", time.perf_counter() - t0)

for name in ("exp", "rbf03", "rbf05", "rbf07", "iquad", "m52t3"):
    t0 = time.perf_counter()
    f = ibmi.contraction_factor(mats[name], half.sets[0], half.sets[1])
    log(f"factor2_{name}", f * f)
    log(f"factor_seconds_{name}", time.perf_counter() - t0)

for name in ("exp", "rbf03", "rbf05", "iquad", "m52t3", "rbf07"):
    t0 = time.perf_counter()
    rep = ibmi.solve(mats[name], half, ibmi.IbmiConfig(max_iterations=160))
    log(
        f"iters_f0_{name}",
        dict(iters=rep.iterations, conv=rep.converged,
             first=rep.error_trace[0], last=rep.error_trace[-1],
             secs=time.perf_counter() - t0, per_sweep=rep.wall_times[-1]),
    )

# overlap effect at 5% for the criterion-5 candidates
p5 = ibmi.contiguous_partition(P, 2, 0.05)
for name in ("rbf05", "rbf07"):
    rep = ibmi.solve(mats[name], p5, ibmi.IbmiConfig())
    log(f"iters_f05_{name}", dict(iters=rep.iterations, conv=rep.converged))

print("done")
