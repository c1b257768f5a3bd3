# geometry_kernels.py
# -*- coding: utf-8 -*-
"""
Geometrik streamline işlemleri: arc-length resampling, MDF mesafesi (S¹),
α dağılım metriği ve QuickBundles baseline.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
from dipy.tracking.streamline import set_number_of_points
from joblib import Parallel, delayed

import config
from errors import DegenerateInputError, ParameterError
from fiberset_io import Fiber

logger = logging.getLogger(__name__)

DEFAULT_N_POINTS = 25
_BLOCK_ROWS = 32


@dataclass(frozen=True, eq=False)
class ResampledFiber:
    """n_p eşit arc-length noktasına örneklenmiş fiber"""
    id: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
            raise ParameterError(f"resampled fiber {self.id}: bad shape {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    def reversed(self) -> "ResampledFiber":
        return ResampledFiber(self.id, self.points[::-1])


@dataclass(frozen=True)
class QBModel:
    threshold: float
    centroids: Tuple[ResampledFiber, ...]
    member_ids: Tuple[Tuple[int, ...], ...]

    @property
    def n_clusters(self) -> int:
        return len(self.centroids)

    def labels(self, fiber_ids: Sequence[int]) -> np.ndarray:
        """Fiber id sırasına göre cluster etiketleri"""
        lookup: Dict[int, int] = {}
        for label, members in enumerate(self.member_ids):
            for fid in members:
                lookup[fid] = label
        try:
            return np.array([lookup[int(fid)] for fid in fiber_ids], dtype=np.int64)
        except KeyError as e:
            raise ParameterError(f"fiber {e.args[0]} is not part of this QuickBundles model") from e


def resample(f: Fiber, n_p: int = DEFAULT_N_POINTS) -> ResampledFiber:
    """Parçalı-doğrusal eğri üzerinde n_p eşit aralıklı arc-length noktası; uç noktalar korunur"""
    if n_p < 2:
        raise ParameterError(f"n_p must be >= 2, got {n_p}")
    pts = np.ascontiguousarray(f.points, dtype=np.float64)
    arc = float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    if arc <= 0.0:
        raise DegenerateInputError(f"fiber {f.id} has zero arc length")
    out = np.array(set_number_of_points(pts, nb_points=n_p), dtype=np.float64)
    # uçlar birebir
    out[0], out[-1] = pts[0], pts[-1]
    return ResampledFiber(f.id, out)


def resample_all(fibers: Sequence[Fiber], n_p: int = DEFAULT_N_POINTS) -> List[ResampledFiber]:
    return [resample(f, n_p) for f in fibers]


def stack_points(fibers: Sequence[ResampledFiber]) -> np.ndarray:
    """(N, n_p, 3) dizisi; nokta sayıları eşit olmalı"""
    if len(fibers) == 0:
        raise ParameterError("empty fiber list")
    counts = {f.n_points for f in fibers}
    if len(counts) != 1:
        raise ParameterError(f"fibers have different point counts: {sorted(counts)}")
    return np.stack([f.points for f in fibers])


def mdf_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vektörize MDF; a, b (..., n_p, 3) yayınlanabilir diziler"""
    direct = np.linalg.norm(a - b, axis=-1).mean(axis=-1)
    flipped = np.linalg.norm(a - b[..., ::-1, :], axis=-1).mean(axis=-1)
    return np.minimum(direct, flipped)


def mdf_distance(a: ResampledFiber, b: ResampledFiber) -> float:
    """Minimum average direct-flip distance (mm)"""
    if a.n_points != b.n_points:
        raise ParameterError(f"point-count mismatch: {a.n_points} vs {b.n_points}")
    return float(mdf_arrays(a.points, b.points))


def _mdf_rows(points: np.ndarray, start: int, stop: int) -> np.ndarray:
    return mdf_arrays(points[start:stop, None], points[None, :])


def pairwise_mdf(fibers: Sequence[ResampledFiber]) -> np.ndarray:
    """Simetrik N×N MDF matrisi; satır blokları paralel hesaplanır, sonuç zamanlamadan bağımsız"""
    points = stack_points(fibers)
    n = points.shape[0]
    bounds = [(s, min(s + _BLOCK_ROWS, n)) for s in range(0, n, _BLOCK_ROWS)]
    n_jobs = min(config.resolve_threads(config.THREADS), len(bounds))
    blocks = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_mdf_rows)(points, s, e) for s, e in bounds
    )
    full = np.vstack(blocks)
    upper = np.triu(full, k=1)
    return upper + upper.T


def alpha_metric(cluster: Sequence[ResampledFiber]) -> float:
    """Cluster içi tüm sırasız çiftlerin ortalama MDF'i; tek fiber için 0"""
    if len(cluster) == 0:
        raise ParameterError("alpha_metric of an empty cluster")
    if len(cluster) == 1:
        return 0.0
    dist = pairwise_mdf(cluster)
    iu = np.triu_indices(len(cluster), k=1)
    return float(dist[iu].mean())


def quickbundles(fibers: Sequence[ResampledFiber], threshold: float) -> QBModel:
    """
    Tek geçişli QuickBundles.
    Fiber en yakın centroid'e (MDF < threshold) katılır; flip daha yakınsa ters çevrilmiş hali
    centroid'in running mean'ine eklenir. Aksi halde yeni centroid açar. Giriş sırasına göre deterministik.
    """
    if not threshold > 0:
        raise ParameterError(f"threshold must be > 0, got {threshold}")
    sums: List[np.ndarray] = []
    counts: List[int] = []
    members: List[List[int]] = []
    centroids = np.empty((0, 0, 3))

    for fib in fibers:
        x = fib.points
        if sums:
            direct = np.linalg.norm(centroids - x, axis=-1).mean(axis=-1)
            flipped = np.linalg.norm(centroids - x[::-1], axis=-1).mean(axis=-1)
            dist = np.minimum(direct, flipped)
            j = int(np.argmin(dist))
            if dist[j] < threshold:
                aligned = x[::-1] if flipped[j] < direct[j] else x
                sums[j] = sums[j] + aligned
                counts[j] += 1
                members[j].append(fib.id)
                centroids[j] = sums[j] / counts[j]
                continue
        sums.append(np.array(x, dtype=np.float64))
        counts.append(1)
        members.append([fib.id])
        centroids = np.stack([s / c for s, c in zip(sums, counts)])

    model = QBModel(
        threshold=float(threshold),
        centroids=tuple(ResampledFiber(k, s / c) for k, (s, c) in enumerate(zip(sums, counts))),
        member_ids=tuple(tuple(m) for m in members),
    )
    logger.info(f"🧩 QuickBundles: {len(fibers)} fiber → {model.n_clusters} cluster (threshold={threshold} mm)")
    return model
