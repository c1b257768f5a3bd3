# functional_kernels.py
# -*- coding: utf-8 -*-
"""
Endpoint fMRI sinyal işlemleri: downsampling, PCA, (Öklid) SRVF dönüşümü,
fonksiyonel pseudo-label S² ve cluster içi Pearson korelasyonu.
"""
import logging
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from sklearn.decomposition import PCA

from errors import DegenerateSignalError, ParameterError, RankError
from fiberset_io import EndpointSignals, read_matrix, write_matrix

logger = logging.getLogger(__name__)

DEFAULT_TARGET_LEN = 600
DEFAULT_COMPONENTS = 30
SRVF_EPS = 1e-12
_BLOCK_ROWS = 64

PCA_MEAN_FILE = "pca_mean.txt"
PCA_COMPONENTS_FILE = "pca_components.txt"
PCA_VARIANCE_FILE = "pca_variance.txt"


@dataclass(frozen=True, eq=False)
class FunctionalInput:
    """Ağ girdisi x²: 2 × T_d downsample edilmiş endpoint sinyalleri"""
    fiber_id: int
    matrix: np.ndarray
    time_indices: np.ndarray


@dataclass(frozen=True, eq=False)
class PCAModel:
    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    @property
    def n_components(self) -> int:
        return int(self.components.shape[0])

    @property
    def signal_length(self) -> int:
        return int(self.mean.shape[0])


@dataclass(frozen=True, eq=False)
class SRVFCurve:
    values: np.ndarray


def per_fiber_seed(seed: int, fiber_id: int, set_index: int = 0) -> int:
    """Run seed'inden (set, fiber) başına bağımsız seed"""
    return int(np.random.SeedSequence([int(seed), int(set_index), int(fiber_id)]).generate_state(1)[0])


def downsample_signals(s: EndpointSignals, target_len: int = DEFAULT_TARGET_LEN, seed: int = 0) -> FunctionalInput:
    """İki satır için ortak, sıralı rastgele zaman indeksi alt kümesi"""
    T = s.length
    if target_len < 2:
        raise ParameterError(f"target_len must be >= 2, got {target_len}")
    if target_len > T:
        raise ParameterError(f"target_len {target_len} exceeds signal length {T}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(T, size=target_len, replace=False))
    matrix = np.stack([s.series_a[idx], s.series_b[idx]])
    return FunctionalInput(fiber_id=s.fiber_id, matrix=matrix, time_indices=idx)


def fit_pca(signals: Sequence[np.ndarray], n_c: int = DEFAULT_COMPONENTS) -> PCAModel:
    """
    Ortalaması çıkarılmış örnek kovaryansının en büyük n_c özvektörü.
    İşaret kuralı: her bileşenin mutlak değerce en büyük girdisi pozitif.
    """
    if n_c < 1:
        raise ParameterError(f"n_c must be >= 1, got {n_c}")
    X = np.vstack([np.asarray(v, dtype=np.float64) for v in signals])
    n, T = X.shape
    if n < n_c + 1:
        raise ParameterError(f"fit_pca needs at least {n_c + 1} signals, got {n}")
    if n_c > T:
        raise RankError(f"n_c={n_c} exceeds signal length {T}")

    pca = PCA(n_components=n_c, svd_solver="full")
    with warnings.catch_warnings(), np.errstate(divide="ignore", invalid="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        pca.fit(X)

    sv = pca.singular_values_
    tol = (sv[0] if sv.size else 0.0) * max(n, T) * np.finfo(np.float64).eps
    if sv.size == 0 or sv[0] <= 0.0 or sv[-1] <= tol:
        rank = int(np.sum(sv > tol)) if sv.size and sv[0] > 0 else 0
        raise RankError(f"n_c={n_c} exceeds data rank {rank}")

    components = np.array(pca.components_, dtype=np.float64)
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(n_c), pivots])
    components *= signs[:, None]

    model = PCAModel(
        mean=np.array(pca.mean_, dtype=np.float64),
        components=components,
        explained_variance=np.array(pca.explained_variance_, dtype=np.float64),
    )
    logger.info(f"📉 PCA: {n} sinyal × T={T} → {n_c} bileşen")
    return model


def project_pca(model: PCAModel, signal: np.ndarray) -> np.ndarray:
    signal = np.asarray(signal, dtype=np.float64)
    if signal.shape[-1] != model.signal_length:
        raise ParameterError(f"signal length {signal.shape[-1]} does not match PCA length {model.signal_length}")
    return (signal - model.mean) @ model.components.T


def srvf_array(reduced: np.ndarray) -> np.ndarray:
    """Son eksen boyunca SRVF: q_k = ḟ_k / sqrt(|ḟ_k|), |ḟ_k| <= ε ise 0"""
    d = np.diff(np.asarray(reduced, dtype=np.float64), axis=-1)
    mag = np.abs(d)
    q = np.zeros_like(d)
    mask = mag > SRVF_EPS
    q[mask] = d[mask] / np.sqrt(mag[mask])
    return q


def srvf_transform(reduced: np.ndarray) -> SRVFCurve:
    reduced = np.asarray(reduced, dtype=np.float64)
    if reduced.ndim != 1 or reduced.shape[0] < 2:
        raise ParameterError(f"srvf_transform needs a vector of length >= 2, got shape {reduced.shape}")
    return SRVFCurve(srvf_array(reduced))


def endpoint_features(signals: Sequence[EndpointSignals], model: PCAModel) -> np.ndarray:
    """(N, 2, n_c - 1): her endpoint için SRVF(PCA(sinyal))"""
    raw = np.stack([np.stack([s.series_a, s.series_b]) for s in signals])
    return srvf_array(project_pca(model, raw))


def functional_cost(fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """
    İki endpoint eşleştirmesinin küçüğü; fa, fb (..., 2, L).
    Toplama sırası (a, b) ↔ (b, a) değişiminde aynı kalır, sonuç bit düzeyinde simetrik.
    """
    def mse(x, y):
        return np.mean((x - y) ** 2, axis=-1)

    direct = (mse(fa[..., 0, :], fb[..., 0, :]) + mse(fa[..., 1, :], fb[..., 1, :])) / 2.0
    swapped = (mse(fa[..., 0, :], fb[..., 1, :]) + mse(fa[..., 1, :], fb[..., 0, :])) / 2.0
    return np.minimum(direct, swapped)


def functional_pseudolabel(a: EndpointSignals, b: EndpointSignals, model: PCAModel) -> float:
    """S²: SRVF dönüşümlü PCA projeksiyonları arasındaki MSE, endpoint eşleştirmesi üzerinden minimum"""
    for s in (a, b):
        if s.length != model.signal_length:
            raise ParameterError(
                f"signal {s.fiber_id} has length {s.length}, PCA model expects {model.signal_length}"
            )
    feats = endpoint_features([a, b], model)
    return float(functional_cost(feats[0], feats[1]))


def pairwise_functional(signals: Sequence[EndpointSignals], model: PCAModel) -> np.ndarray:
    """Simetrik N×N S² matrisi"""
    feats = endpoint_features(signals, model)
    n = feats.shape[0]
    full = np.vstack([
        functional_cost(feats[s:s + _BLOCK_ROWS, None], feats[None, :])
        for s in range(0, n, _BLOCK_ROWS)
    ])
    upper = np.triu(full, k=1)
    return upper + upper.T


def pairwise_pearson(signals: Sequence[EndpointSignals]) -> np.ndarray:
    """
    N×N matris: her fiber çifti için iki endpoint eşleştirmesinden ortalama korelasyonu
    büyük olanı (ham, downsample edilmemiş sinyaller).
    """
    n = len(signals)
    stacked = np.stack([row for s in signals for row in (s.series_a, s.series_b)])
    flat = np.ptp(stacked, axis=1) == 0
    if np.any(flat):
        bad = signals[int(np.argmax(flat)) // 2].fiber_id
        raise DegenerateSignalError(f"fiber {bad} has a constant endpoint signal")
    corr = np.corrcoef(stacked).reshape(n, 2, n, 2)
    direct = (corr[:, 0, :, 0] + corr[:, 1, :, 1]) / 2.0
    swapped = (corr[:, 0, :, 1] + corr[:, 1, :, 0]) / 2.0
    return np.maximum(direct, swapped)


def cluster_pearson(cluster_signals: Sequence[EndpointSignals]) -> float:
    """Cluster içindeki tüm sırasız fiber çiftleri üzerinden ortalama endpoint Pearson korelasyonu"""
    if len(cluster_signals) < 2:
        raise ParameterError("cluster_pearson needs at least 2 fibers")
    corr = pairwise_pearson(cluster_signals)
    iu = np.triu_indices(len(cluster_signals), k=1)
    return float(np.clip(corr[iu].mean(), -1.0, 1.0))


def fiber_coherence(cluster_signals: Sequence[EndpointSignals]) -> np.ndarray:
    """Her fiber'ın cluster'daki diğer fiber'larla ortalama korelasyonu (plot renkleri için)"""
    n = len(cluster_signals)
    if n < 2:
        raise ParameterError("fiber_coherence needs at least 2 fibers")
    corr = pairwise_pearson(cluster_signals)
    np.fill_diagonal(corr, 0.0)
    return corr.sum(axis=1) / (n - 1)


def save_pca(model: PCAModel, directory: Union[str, Path]) -> None:
    root = Path(directory)
    write_matrix(root / PCA_MEAN_FILE, model.mean)
    write_matrix(root / PCA_COMPONENTS_FILE, model.components)
    write_matrix(root / PCA_VARIANCE_FILE, model.explained_variance)


def load_pca(directory: Union[str, Path]) -> PCAModel:
    root = Path(directory)
    mean = read_matrix(root / PCA_MEAN_FILE, ndmin=1)
    components = read_matrix(root / PCA_COMPONENTS_FILE, ndmin=2)
    variance = read_matrix(root / PCA_VARIANCE_FILE, ndmin=1)
    if components.shape != (variance.shape[0], mean.shape[0]):
        raise ParameterError(
            f"inconsistent PCA files in {root}: components {components.shape}, mean {mean.shape}, variance {variance.shape}"
        )
    return PCAModel(mean=mean, components=components, explained_variance=variance)
