"""Ortak test fixture'ları: küçük sentetik bundle'lar ve küçük encoder konfigürasyonları."""

import numpy as np
import pytest

from encoder import functional_config, geometric_config
from fiberset_io import EndpointSignals, Fiber, FiberSet
from synthetic import SynthConfig, generate


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_synth_cfg():
    """2 geo × 2 func × 6 fiber, kısa sinyaller"""
    return SynthConfig(
        n_geo_clusters=2,
        n_func_per_geo=2,
        fibers_per_cluster=6,
        signal_length=120,
        points_per_fiber=20,
        seed=3,
        bundle_name="tiny",
    )


@pytest.fixture
def tiny_set(tiny_synth_cfg):
    return generate(tiny_synth_cfg)


@pytest.fixture
def small_geo_cfg():
    return geometric_config(n_points=12, knn_k=4, layer_widths=(8, 8), embedding_dim=4)


@pytest.fixture
def small_func_cfg():
    return functional_config(signal_len=40, knn_k=1, layer_widths=(8, 8), embedding_dim=4)


def make_fiberset(rng, n_fibers=4, n_points=5, signal_length=0, labels=None, name="handmade"):
    """Rastgele polyline'lar ve opsiyonel rastgele sinyallerle FiberSet"""
    fibers = [Fiber(i, np.cumsum(rng.normal(size=(n_points, 3)), axis=0)) for i in range(n_fibers)]
    signals = None
    if signal_length:
        signals = [EndpointSignals(i, rng.normal(size=signal_length), rng.normal(size=signal_length))
                   for i in range(n_fibers)]
    return FiberSet(fibers=fibers, signals=signals, bundle_name=name, true_labels=labels)
