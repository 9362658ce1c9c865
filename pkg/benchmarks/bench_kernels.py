"""Compare the compiled and numpy implementations of the hot kernels.

Run ``python3 benchmarks/bench_kernels.py`` after an editable install.  Each
kernel is timed on the same inputs for both backends; the table lists the
best of ``--repeat`` runs and checks that the results agree.
"""

import argparse
import timeit

import numpy as np

from bergman_lab import _pykernels, backend
from bergman_lab.geometry import make_lattice, pseudo_disk_params
from bergman_lab.quadrature import QuadratureSpec, hyperbolic_cells


def disk_points(rng, count, radius):
    return radius * np.sqrt(rng.random(count)) * np.exp(2j * np.pi * rng.random(count))


def cases(scale, seed):
    rng = np.random.default_rng(seed)
    q = QuadratureSpec()
    pts, areas = hyperbolic_cells(q.cell_size, q.cloud_cutoff)
    cloud = backend.PointCloud(pts, areas)
    probes = disk_points(rng, 2000 * scale, 0.999)
    centers, radii = pseudo_disk_params(disk_points(rng, 2000 * scale, 0.999), 0.5)
    lat = make_lattice(0.5, 0.999, audit_samples=1000)
    lc, lr = pseudo_disk_params(lat.nodes, 0.75)
    samples = disk_points(rng, 20000 * scale, 0.999)
    return [
        (f"disk_sums ({centers.size} disks x {len(cloud)} pts)",
         lambda impl: backend.disk_sums(centers, radii, cloud, impl=impl)),
        (f"kernel_sums ({probes.size} probes x {len(cloud)} pts)",
         lambda impl: backend.kernel_sums(probes, cloud, 4.0, impl=impl)),
        (f"cover_counts ({samples.size} samples x {lc.size} disks)",
         lambda impl: backend.cover_counts(samples, lc, lr, impl=impl)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=int, default=1, help="multiply problem sizes")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not backend.HAVE_COMPILED:
        print("compiled extension not built; only the numpy backend is available")
    impls = [("numpy", _pykernels)]
    if backend.HAVE_COMPILED:
        impls.append(("cython", backend._ckernels))
    print(f"threads: {backend.thread_count()}")
    header = f"{'kernel':<52}" + "".join(f"{name:>12}" for name, _ in impls) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, run in cases(args.scale, args.seed):
        times, outputs = [], []
        for _, impl in impls:
            outputs.append(run(impl))
            times.append(min(timeit.repeat(lambda: run(impl), number=1, repeat=args.repeat)))
        if len(outputs) == 2:
            np.testing.assert_allclose(outputs[0], outputs[1], rtol=1e-10, atol=1e-12)
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) == 2 else f"{'-':>10}"
        print(f"{label:<52}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
