"""Timing comparison of the compiled and pure-numpy kernel backends.

Times the three hot spots on their own: Hamiltonian triplet assembly, the
real-CSR x complex-vector product, and a full 801-sample entanglement trace
run once per backend in a subprocess (backend choice is fixed at import).

Run:  python benchmarks/compare_backends.py [n_half]
"""

import os
import subprocess
import sys
import time

import numpy as np
import scipy.sparse as sp


def bench(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_timings(n_half):
    from modchain import _assembly_py, kernels
    from modchain.basis import build_sector_basis
    from modchain.hamiltonian import ChainSpec, ModuleSpec, build_total_hamiltonian

    mod = ModuleSpec(n_half, 1.0, 0.5, 0.0)
    chain = ChainSpec(mod, mod, 0.75)
    n = chain.n_sites
    basis = build_sector_basis(n, n // 2)
    si = np.arange(n - 1, dtype=np.int64)
    w = chain.bond_strengths()

    impls = {"python": _assembly_py}
    if kernels.BACKEND == "cython":
        from modchain import _assembly_cy

        impls["cython"] = _assembly_cy

    print(f"sector dim {basis.dim} (N = {n})")
    print(f"{'kernel':<28}" + "".join(f"{k:>12}" for k in impls))

    rows = {}
    for name, m in impls.items():
        rows.setdefault("assembly", {})[name] = bench(
            m.xxz_triplets, basis.states, si, si + 1, w, 0.5
        )

    h = build_total_hamiltonian(chain, basis).matrix
    rng = np.random.default_rng(0)
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    for name, m in impls.items():
        rows.setdefault("csr matvec (complex)", {})[name] = bench(
            m.csr_matvec_complex, h.indptr, h.indices, h.data, v, repeat=20
        )

    for label, r in rows.items():
        print(f"{label:<28}" + "".join(f"{r[k] * 1e3:>10.2f}ms" for k in impls))


TRACE_SNIPPET = """
import time
import numpy as np
from modchain import kernels
from modchain import experiments as ex
from modchain.hamiltonian import ChainSpec, ModuleSpec
mod = ModuleSpec({n_half}, 1.0, 0.5, 0.0)
t0 = time.perf_counter()
tr = ex.entanglement_trace(ChainSpec(mod, mod, 0.75))
print(f"  {{kernels.BACKEND:<8}} {{time.perf_counter() - t0:8.2f}}s  "
      f"(e_max {{tr.e.max():.4f}})")
"""


def trace_timings(n_half):
    print(f"\nfull 801-sample trace, N = {2 * n_half}:", flush=True)
    for pure in ("0", "1"):
        env = dict(os.environ, MODCHAIN_PURE_PYTHON=pure)
        subprocess.run(
            [sys.executable, "-c", TRACE_SNIPPET.format(n_half=n_half)],
            env=env, check=True,
        )


if __name__ == "__main__":
    n_half = int(sys.argv[1]) if len(sys.argv) > 1 else 6
    kernel_timings(n_half)
    trace_timings(n_half)
