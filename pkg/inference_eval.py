# inference_eval.py
# -*- coding: utf-8 -*-
"""
Yeni fiber setleri üzerinde birleşik (iki görünüm ortalaması) cluster tahmini
ve değerlendirme: cluster içi Pearson, α dağılımı, ARI / NMI, yöntem karşılaştırma tablosu.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np
import pandas as pd
from matplotlib.collections import LineCollection
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score

from encoder import embed
from errors import DegenerateSignalError, InputError, ModelError, ParameterError
from fiberset_io import FiberSet, read_matrix, write_matrix
from functional_kernels import cluster_pearson, fiber_coherence
from geometry_kernels import alpha_metric, resample_all
from training import (
    ROW_SUM_TOL,
    ViewModel,
    functional_inputs,
    geometric_inputs,
    soft_assign,
)

logger = logging.getLogger(__name__)

PREDICT_VIEWS = ("fused", "geometric", "functional")
REPORT_COLUMNS = ["method", "bundle", "mean_pearson", "mean_alpha", "ari", "nmi"]
LABELS_FILE = "labels.txt"
FUSED_Q_FILE = "fused_q.txt"


@dataclass(frozen=True, eq=False)
class ClusterPrediction:
    labels: np.ndarray
    fused_q: np.ndarray
    per_view_q: Tuple[np.ndarray, np.ndarray]

    def __post_init__(self):
        q = np.asarray(self.fused_q, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if q.ndim != 2 or labels.shape != (q.shape[0],):
            raise ParameterError(f"prediction: {labels.shape} labels vs fused_q {q.shape}")
        if q.shape[0] and np.max(np.abs(q.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ParameterError("fused_q rows must sum to 1")
        if q.shape[0] and not np.array_equal(labels, np.argmax(q, axis=1)):
            raise ParameterError("labels must equal the row argmax of fused_q")
        object.__setattr__(self, "fused_q", q)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def k(self) -> int:
        return int(self.fused_q.shape[1])

    @classmethod
    def from_labels(cls, labels: Sequence[int], k: Optional[int] = None) -> "ClusterPrediction":
        """Sert etiketlerden tek-sıcak (one-hot) olasılıklarla tahmin (ör. QuickBundles)"""
        labels = np.asarray(labels, dtype=np.int64)
        if labels.size and labels.min() < 0:
            raise ParameterError("labels must be non-negative")
        k = int(k if k is not None else (labels.max() + 1 if labels.size else 1))
        if labels.size and labels.max() >= k:
            raise ParameterError(f"label {labels.max()} out of range for K={k}")
        q = np.zeros((labels.size, k), dtype=np.float64)
        q[np.arange(labels.size), labels] = 1.0
        return cls(labels, q, (q, q))


@dataclass(frozen=True)
class EvalReport:
    per_cluster_pearson: List[Optional[float]]
    per_cluster_alpha: List[Optional[float]]
    mean_pearson: float
    mean_alpha: float
    ari: Optional[float] = None
    nmi: Optional[float] = None
    cluster_sizes: List[int] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Tahmin
# ---------------------------------------------------------------------------

def predict(
    vm1: ViewModel,
    vm2: ViewModel,
    fiberset: FiberSet,
    *,
    seed: int = 0,
    view: str = "fused",
) -> ClusterPrediction:
    """
    Q¹ ve Q² soft assignment'larının ortalaması; etiket = satır argmax, eşitlikte küçük indeks.
    view="geometric" yalnız Q¹ (DFC benzeri baseline), view="functional" yalnız Q².
    """
    if view not in PREDICT_VIEWS:
        raise ParameterError(f"unknown view '{view}', expected one of {PREDICT_VIEWS}")
    if vm1.k != vm2.k:
        raise ModelError(f"views disagree on K: {vm1.k} vs {vm2.k}")
    if not fiberset.has_signals:
        raise InputError(f"bundle '{fiberset.bundle_name}' has no endpoint signals")
    if len(fiberset) == 0:
        raise ParameterError("cannot predict on an empty FiberSet")

    ids = fiberset.fiber_ids
    x1 = geometric_inputs(fiberset, vm1.encoder.cfg.num_points)
    x2 = functional_inputs(fiberset, vm2.encoder.cfg.input_channels, seed)
    q1 = soft_assign(embed(vm1.encoder, x1, ids), vm1.centroids).q
    q2 = soft_assign(embed(vm2.encoder, x2, ids), vm2.centroids).q

    fused = {"fused": (q1 + q2) / 2.0, "geometric": q1, "functional": q2}[view]
    pred = ClusterPrediction(np.argmax(fused, axis=1), fused, (q1, q2))
    logger.info(f"🔮 Tahmin [{view}] '{fiberset.bundle_name}': {len(pred)} fiber → {len(np.unique(pred.labels))} dolu cluster")
    return pred


def save_prediction(pred: ClusterPrediction, directory: Union[str, Path]) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    write_matrix(root / LABELS_FILE, pred.labels)
    write_matrix(root / FUSED_Q_FILE, pred.fused_q)
    logger.info(f"💾 Tahmin kaydedildi: {root}")


def load_prediction(directory: Union[str, Path]) -> ClusterPrediction:
    root = Path(directory)
    labels = read_matrix(root / LABELS_FILE, ndmin=1, dtype=np.int64)
    q_path = root / FUSED_Q_FILE
    if q_path.is_file():
        q = read_matrix(q_path, ndmin=2)
        return ClusterPrediction(labels, q, (q, q))
    return ClusterPrediction.from_labels(labels)


# ---------------------------------------------------------------------------
# Değerlendirme
# ---------------------------------------------------------------------------

def _check_aligned(pred: ClusterPrediction, fiberset: FiberSet) -> None:
    if len(pred) == 0:
        raise ParameterError("empty prediction")
    if len(pred) != len(fiberset):
        raise ParameterError(
            f"prediction has {len(pred)} labels but bundle '{fiberset.bundle_name}' has {len(fiberset)} fibers"
        )


def _mean_or_nan(values: Sequence[Optional[float]]) -> float:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else float("nan")


def evaluate(pred: ClusterPrediction, fiberset: FiberSet, n_points: int = 25) -> EvalReport:
    """
    Cluster başına α (yeniden örneklenmiş üyeler üzerinde ortalama MDF) ve Pearson
    (üye endpoint sinyalleri). Tekil cluster: α = 0, Pearson yok. Boş cluster: ikisi de yok.
    """
    _check_aligned(pred, fiberset)
    resampled = resample_all(fiberset.fibers, n_points)
    pearsons: List[Optional[float]] = []
    alphas: List[Optional[float]] = []
    sizes: List[int] = []

    for j in range(pred.k):
        members = np.flatnonzero(pred.labels == j)
        sizes.append(int(members.size))
        if members.size == 0:
            pearsons.append(None)
            alphas.append(None)
            continue
        alphas.append(alpha_metric([resampled[i] for i in members]))
        if members.size < 2 or not fiberset.has_signals:
            pearsons.append(None)
            continue
        try:
            pearsons.append(cluster_pearson([fiberset.signals[i] for i in members]))
        except DegenerateSignalError as e:
            logger.warning(f"⚠️ Cluster {j}: Pearson hesaplanamadı ({e})")
            pearsons.append(None)

    ari = nmi = None
    if fiberset.true_labels is not None:
        truth = np.asarray(fiberset.true_labels)
        ari = float(adjusted_rand_score(truth, pred.labels))
        nmi = float(normalized_mutual_info_score(truth, pred.labels))

    report = EvalReport(
        per_cluster_pearson=pearsons,
        per_cluster_alpha=alphas,
        mean_pearson=_mean_or_nan(pearsons),
        mean_alpha=_mean_or_nan(alphas),
        ari=ari,
        nmi=nmi,
        cluster_sizes=sizes,
    )
    logger.info(
        f"📊 '{fiberset.bundle_name}': mean Pearson={report.mean_pearson:.4f}, mean α={report.mean_alpha:.3f} mm"
        + (f", ARI={ari:.4f}, NMI={nmi:.4f}" if ari is not None else "")
    )
    return report


def compare_methods(
    fiberset: FiberSet,
    predictions: Mapping[str, ClusterPrediction],
    n_points: int = 25,
) -> pd.DataFrame:
    """Yöntem başına bir satır; gerçek etiket yoksa ari / nmi sütunları düşer"""
    if not predictions:
        raise ParameterError("compare_methods needs at least one prediction")
    rows = []
    for method, pred in predictions.items():
        report = evaluate(pred, fiberset, n_points)
        rows.append({
            "method": method,
            "bundle": fiberset.bundle_name,
            "mean_pearson": report.mean_pearson,
            "mean_alpha": report.mean_alpha,
            "ari": report.ari,
            "nmi": report.nmi,
        })
    table = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    if fiberset.true_labels is None:
        table = table.drop(columns=["ari", "nmi"])
    return table


def write_report(table: pd.DataFrame, directory: Union[str, Path]) -> Tuple[Path, Path]:
    """report.csv + hizalanmış metin tablosu report.txt"""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    csv_path, txt_path = root / "report.csv", root / "report.txt"
    table.to_csv(csv_path, index=False, float_format="%.6f")
    txt_path.write_text(render_table(table) + "\n", encoding="utf-8")
    logger.info(f"💾 Rapor yazıldı: {csv_path}")
    return csv_path, txt_path


def render_table(table: pd.DataFrame) -> str:
    return table.to_string(index=False, float_format=lambda v: f"{v:.4f}", na_rep="-")


# ---------------------------------------------------------------------------
# Görselleştirme
# ---------------------------------------------------------------------------

def _projection_axes(fiberset: FiberSet) -> Tuple[int, int]:
    """En geniş uzanıma sahip iki koordinat ekseni"""
    pts = np.vstack([f.points for f in fiberset.fibers])
    spread = np.ptp(pts, axis=0)
    a, b = sorted(np.argsort(spread)[::-1][:2])
    return int(a), int(b)


def plot_clusters(pred: ClusterPrediction, fiberset: FiberSet, directory: Union[str, Path]) -> List[Path]:
    """
    Dolu her cluster için bir PNG: fiber'lar 2B izdüşümde, cluster içi ortalama
    endpoint korelasyonuna göre renklendirilmiş.
    """
    _check_aligned(pred, fiberset)
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    ax_a, ax_b = _projection_axes(fiberset)
    names = "xyz"
    written: List[Path] = []

    for j in range(pred.k):
        members = np.flatnonzero(pred.labels == j)
        if members.size == 0:
            continue
        coherence = None
        if members.size >= 2 and fiberset.has_signals:
            try:
                coherence = fiber_coherence([fiberset.signals[i] for i in members])
            except DegenerateSignalError as e:
                logger.warning(f"⚠️ Cluster {j}: renklendirme yok ({e})")

        fig, ax = plt.subplots(figsize=(6, 5))
        segments = [fiberset.fibers[i].points[:, [ax_a, ax_b]] for i in members]
        lines = LineCollection(segments, linewidths=0.8)
        if coherence is not None:
            lines.set_array(coherence)
            lines.set_cmap("viridis")
            lines.set_clim(-1.0, 1.0)
            fig.colorbar(lines, ax=ax, label="endpoint correlation")
        else:
            lines.set_color("0.4")
        ax.add_collection(lines)
        ax.autoscale()
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel(f"{names[ax_a]} (mm)")
        ax.set_ylabel(f"{names[ax_b]} (mm)")
        ax.set_title(f"{fiberset.bundle_name}: cluster {j} ({members.size} fibers)")
        path = root / f"cluster_{j:03d}.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    logger.info(f"🖼️ {len(written)} cluster görseli yazıldı: {root}")
    return written
