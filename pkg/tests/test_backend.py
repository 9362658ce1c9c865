import numpy as np
import pytest

from bergman_lab import _pykernels, backend

pytestmark = pytest.mark.skipif(not backend.HAVE_COMPILED, reason="compiled extension not built")


@pytest.fixture
def cloud(rng):
    pts = 0.999 * np.sqrt(rng.random(3000)) * np.exp(2j * np.pi * rng.random(3000))
    return backend.PointCloud(pts, rng.random(3000))


def test_disk_sums_parity(cloud, rng):
    centers = 0.9 * np.sqrt(rng.random(200)) * np.exp(2j * np.pi * rng.random(200))
    radii = 0.05 + 0.1 * rng.random(200)
    a = backend.disk_sums(centers, radii, cloud, impl=_pykernels)
    b = backend.disk_sums(centers, radii, cloud, impl=backend._ckernels)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("expo", [2.0, 4.0, 5.5])
def test_kernel_sums_parity(cloud, rng, expo):
    probes = 0.99 * np.sqrt(rng.random(300)) * np.exp(2j * np.pi * rng.random(300))
    a = backend.kernel_sums(probes, cloud, expo, impl=_pykernels)
    b = backend.kernel_sums(probes, cloud, expo, impl=backend._ckernels)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_cover_counts_parity(rng):
    samples = 0.99 * np.sqrt(rng.random(2000)) * np.exp(2j * np.pi * rng.random(2000))
    centers = 0.9 * np.sqrt(rng.random(100)) * np.exp(2j * np.pi * rng.random(100))
    radii = 0.2 * rng.random(100)
    a = backend.cover_counts(samples, centers, radii, impl=_pykernels)
    b = backend.cover_counts(samples, centers, radii, impl=backend._ckernels)
    np.testing.assert_array_equal(a, b)


def test_disk_sums_brute_force(cloud):
    centers = np.array([0.0, 0.5j, -0.7])
    radii = np.array([0.3, 0.2, 0.25])
    pts = cloud.points
    expected = [cloud.w[np.abs(pts - c) < r].sum() for c, r in zip(centers, radii)]
    np.testing.assert_allclose(backend.disk_sums(centers, radii, cloud), expected, rtol=1e-12)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("BERGMAN_LAB_THREADS", "3")
    assert backend.thread_count() == 3
    monkeypatch.setenv("BERGMAN_LAB_THREADS", "x")
    assert backend.thread_count() >= 1
