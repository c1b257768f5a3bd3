# training.py
# -*- coding: utf-8 -*-
"""
İki eğitim aşaması:
  1) Görünüm başına siamese pretraining: embedding mesafesi → pseudo-label regresyonu
  2) Collaborative fine-tuning: Student-t soft assignment, keskinleştirilmiş hedef,
     tek/çift epoch'ta dönüşümlü KL çapası ve L_f = L_s + γ L_c
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import torch
from scipy.optimize import linear_sum_assignment
from scipy.special import rel_entr
from sklearn.cluster import KMeans
from torch import nn

from encoder import (
    EmbeddingBatch,
    EncoderConfig,
    FiberEncoder,
    embed,
    encode,
    load_encoder,
    save_encoder,
)
from errors import (
    DegenerateClusterError,
    DivergenceError,
    InfiniteLossError,
    InputError,
    ModelError,
    ParameterError,
)
from fiberset_io import FiberSet, read_matrix, write_matrix
from functional_kernels import (
    PCAModel,
    downsample_signals,
    endpoint_features,
    fit_pca,
    functional_cost,
    per_fiber_seed,
)
from geometry_kernels import mdf_arrays, resample_all, stack_points

logger = logging.getLogger(__name__)

MIN_CLUSTER_MASS = 1e-8
MONITOR_PAIRS = 256
ROW_SUM_TOL = 1e-9

_STAGE_PRETRAIN = 1
_STAGE_FINETUNE = 2
_STAGE_MONITOR = 3


# ---------------------------------------------------------------------------
# Veri tipleri
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairSample:
    i: int
    j: int
    s1: float
    s2: float

    def __post_init__(self):
        if self.i == self.j:
            raise ParameterError(f"pair needs two distinct fibers, got ({self.i}, {self.j})")
        for name in ("s1", "s2"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ParameterError(f"pair ({self.i}, {self.j}): {name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class TrainConfig:
    pretrain_lr: float = 3e-3
    pretrain_epochs: int = 450
    lr_decay_every: int = 200
    lr_decay_factor: float = 0.1
    finetune_lr: float = 1e-5
    finetune_epochs: int = 20
    batch_size: int = 1024
    gamma: float = 0.1
    k: int = 0
    seed: int = 0
    pairs_per_fiber: int = 10

    def __post_init__(self):
        for name in ("pretrain_lr", "finetune_lr", "lr_decay_factor"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if min(self.batch_size, self.lr_decay_every, self.pairs_per_fiber) < 1:
            raise ParameterError("batch_size, lr_decay_every and pairs_per_fiber must be >= 1")
        if self.pretrain_epochs < 0 or self.finetune_epochs < 0:
            raise ParameterError("epoch counts must be >= 0")


@dataclass(frozen=True, eq=False)
class SoftAssignment:
    """N × K satır-stokastik üyelik olasılıkları"""
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 2 or q.shape[1] < 1:
            raise ParameterError(f"soft assignment must be N×K, got {q.shape}")
        if np.any(q < 0) or np.any(q > 1) or not np.all(np.isfinite(q)):
            raise ParameterError("soft assignment entries must lie in [0, 1]")
        if q.shape[0] and np.max(np.abs(q.sum(axis=1) - 1.0)) > ROW_SUM_TOL:
            raise ParameterError("soft assignment rows must sum to 1")
        object.__setattr__(self, "q", q)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.q.shape


@dataclass(eq=False)
class ViewModel:
    """Tek görünümün encoder'ı + embedding uzayındaki K centroid"""
    encoder: FiberEncoder
    centroids: np.ndarray

    def __post_init__(self):
        mu = np.array(self.centroids, dtype=np.float64)
        if mu.ndim != 2 or mu.shape[0] < 2:
            raise ParameterError(f"view model needs K >= 2 centroids, got shape {mu.shape}")
        if mu.shape[1] != self.encoder.cfg.embedding_dim:
            raise ModelError(
                f"centroid dim {mu.shape[1]} != embedding_dim {self.encoder.cfg.embedding_dim}"
            )
        if not np.all(np.isfinite(mu)):
            raise ParameterError("centroids must be finite")
        gaps = np.linalg.norm(mu[:, None] - mu[None], axis=-1)[np.triu_indices(mu.shape[0], k=1)]
        if np.any(gaps == 0):
            raise DegenerateClusterError("centroids must be pairwise distinct; try a smaller K")
        self.centroids = mu

    @property
    def k(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def view(self) -> str:
        return self.encoder.cfg.view


# ---------------------------------------------------------------------------
# Girdi hazırlama ve pseudo-label'lar
# ---------------------------------------------------------------------------

def _derive_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def geometric_inputs(fs: FiberSet, n_points: int) -> np.ndarray:
    """x¹: (N, n_p, 3)"""
    return stack_points(resample_all(fs.fibers, n_points))


def functional_inputs(fs: FiberSet, signal_len: int, seed: int, set_index: int = 0) -> np.ndarray:
    """x²: (N, 2, T_d); her fiber kendi (run seed, set sırası, fiber id) türevli alt kümesini kullanır"""
    if fs.signals is None:
        raise InputError(f"bundle '{fs.bundle_name}' has no endpoint signals")
    return np.stack([
        downsample_signals(s, signal_len, per_fiber_seed(seed, s.fiber_id, set_index)).matrix for s in fs.signals
    ])


class GeometricLabeler:
    """S¹: çift dizileri için vektörize MDF"""

    def __init__(self, points: np.ndarray):
        self.points = points

    def __call__(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return mdf_arrays(self.points[i], self.points[j])


class FunctionalLabeler:
    """S²: önceden hesaplanmış SRVF(PCA) endpoint özellikleri üzerinden"""

    def __init__(self, features: np.ndarray):
        self.features = features

    def __call__(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return functional_cost(self.features[i], self.features[j])


PairLabeler = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(eq=False)
class TrainingCorpus:
    """Havuzlanmış eğitim seti: iki görünümün girdileri, etiketleyicileri ve ortak PCA"""
    x1: np.ndarray
    x2: np.ndarray
    geometric_labels: GeometricLabeler
    functional_labels: FunctionalLabeler
    pca: PCAModel
    n_per_set: List[int] = field(default_factory=list)

    @property
    def n_fibers(self) -> int:
        return int(self.x1.shape[0])

    @classmethod
    def from_fibersets(
        cls,
        fibersets: Sequence[FiberSet],
        n_points: int = 25,
        signal_len: int = 600,
        n_components: int = 30,
        seed: int = 0,
        pca: Optional[PCAModel] = None,
    ) -> "TrainingCorpus":
        if not fibersets:
            raise ParameterError("training corpus needs at least one FiberSet")
        for fs in fibersets:
            if fs.signals is None:
                raise InputError(f"bundle '{fs.bundle_name}' has no endpoint signals")
        signals = [s for fs in fibersets for s in fs.signals]
        if pca is None:
            pca = fit_pca([row for s in signals for row in (s.series_a, s.series_b)], n_components)
        x1 = np.concatenate([geometric_inputs(fs, n_points) for fs in fibersets])
        x2 = np.concatenate([functional_inputs(fs, signal_len, seed, i) for i, fs in enumerate(fibersets)])
        corpus = cls(
            x1=x1,
            x2=x2,
            geometric_labels=GeometricLabeler(x1),
            functional_labels=FunctionalLabeler(endpoint_features(signals, pca)),
            pca=pca,
            n_per_set=[len(fs) for fs in fibersets],
        )
        logger.info(f"🗂️ Eğitim korpusu: {len(fibersets)} set, {corpus.n_fibers} fiber")
        return corpus


def sample_pairs(n_fibers: int, n_pairs: int, seed: int) -> np.ndarray:
    """(n_pairs, 2) düzgün rastgele farklı indeks çiftleri; çiftler arası iadeli"""
    if n_fibers < 2:
        raise ParameterError(f"sample_pairs needs n_fibers >= 2, got {n_fibers}")
    if n_pairs < 0:
        raise ParameterError(f"n_pairs must be >= 0, got {n_pairs}")
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n_fibers, size=n_pairs)
    j = rng.integers(0, n_fibers - 1, size=n_pairs)
    j = j + (j >= i)
    return np.stack([i, j], axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# Kayıplar
# ---------------------------------------------------------------------------

def embedding_distance(za: torch.Tensor, zb: torch.Tensor) -> torch.Tensor:
    """Satır bazında Öklid mesafesi; sıfır mesafede gradyan 0"""
    sq = ((za - zb) ** 2).sum(dim=-1)
    positive = sq > 0
    safe = torch.where(positive, sq, torch.ones_like(sq))
    return torch.where(positive, torch.sqrt(safe), torch.zeros_like(sq))


def pair_loss(enc: FiberEncoder, x: torch.Tensor, pairs: np.ndarray, s: torch.Tensor) -> torch.Tensor:
    """L_s: çift başına (d(f(x_i), f(x_j)) − S)² ortalaması"""
    zi = encode(enc, x[pairs[:, 0]])
    zj = encode(enc, x[pairs[:, 1]])
    return ((embedding_distance(zi, zj) - s) ** 2).mean()


def student_t(z: torch.Tensor, mu: torch.Tensor) -> torch.Tensor:
    """q_ij ∝ (1 + ‖z_i − μ_j‖²)^(−1)"""
    d2 = ((z.unsqueeze(1) - mu.unsqueeze(0)) ** 2).sum(dim=-1)
    kernel = 1.0 / (1.0 + d2)
    return kernel / kernel.sum(dim=1, keepdim=True)


def kl_batchmean(p: torch.Tensor, q: torch.Tensor) -> torch.Tensor:
    return (torch.special.xlogy(p, p) - p * torch.log(q)).sum(dim=1).mean()


def soft_assign(z: Union[EmbeddingBatch, np.ndarray], centroids: np.ndarray) -> SoftAssignment:
    matrix = z.matrix if isinstance(z, EmbeddingBatch) else np.asarray(z, dtype=np.float64)
    mu = np.asarray(centroids, dtype=np.float64)
    if matrix.ndim != 2 or mu.ndim != 2 or matrix.shape[1] != mu.shape[1]:
        raise ParameterError(f"embedding dim {matrix.shape} does not match centroids {mu.shape}")
    q = student_t(torch.from_numpy(matrix), torch.from_numpy(mu)).numpy()
    return SoftAssignment(q)


def _as_q(q: Union[SoftAssignment, np.ndarray]) -> np.ndarray:
    return q.q if isinstance(q, SoftAssignment) else np.asarray(q, dtype=np.float64)


def target_distribution(q: Union[SoftAssignment, np.ndarray]) -> SoftAssignment:
    """p_ij = (q_ij² / f_j) / Σ_j' (q_ij'² / f_j'), f_j = Σ_i q_ij"""
    q = _as_q(q)
    mass = q.sum(axis=0)
    if np.any(mass == 0):
        raise DegenerateClusterError(f"cluster {int(np.argmin(mass))} has zero soft mass")
    weight = q ** 2 / mass
    return SoftAssignment(weight / weight.sum(axis=1, keepdims=True))


def kl_clustering_loss(p: Union[SoftAssignment, np.ndarray], q: Union[SoftAssignment, np.ndarray]) -> float:
    """KL(P ‖ Q) = Σ_i Σ_j p_ij log(p_ij / q_ij), 0·log(0/q) = 0"""
    p, q = _as_q(p), _as_q(q)
    if p.shape != q.shape:
        raise ParameterError(f"shape mismatch: P {p.shape} vs Q {q.shape}")
    terms = rel_entr(p, q)
    if np.any(np.isinf(terms)):
        raise InfiniteLossError("q_ij = 0 where p_ij > 0")
    return float(terms.sum())


def collaborative_loss(
    enc: FiberEncoder,
    mu: torch.Tensor,
    x: torch.Tensor,
    pairs: np.ndarray,
    s: torch.Tensor,
    anchor: torch.Tensor,
    gamma: float,
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(L_s, L_c, L_f): çift regresyonu + çapa P'ye karşı batch KL"""
    zi = encode(enc, x[pairs[:, 0]])
    zj = encode(enc, x[pairs[:, 1]])
    l_s = ((embedding_distance(zi, zj) - s) ** 2).mean()
    z = torch.cat([zi, zj])
    idx = torch.from_numpy(np.concatenate([pairs[:, 0], pairs[:, 1]]))
    l_c = kl_batchmean(anchor[idx], student_t(z, mu))
    return l_s, l_c, l_s + gamma * l_c


# ---------------------------------------------------------------------------
# Aşama 1: pretraining
# ---------------------------------------------------------------------------

def pretrain_view(
    enc: FiberEncoder,
    inputs: np.ndarray,
    labels: PairLabeler,
    cfg: TrainConfig,
    *,
    history: Optional[List[Dict]] = None,
    n_pairs: Optional[int] = None,
) -> FiberEncoder:
    """Adam + step-decay ile L_s'i minimize eder; eğitilmiş encoder'ı döner"""
    view = enc.cfg.view
    n = int(inputs.shape[0])
    n_pairs = n_pairs or cfg.pairs_per_fiber * n
    x = torch.from_numpy(np.ascontiguousarray(inputs)).to(enc.dtype)
    view_id = 1 if view == "geometric" else 2

    monitor = sample_pairs(n, min(MONITOR_PAIRS, n_pairs), _derive_seed(cfg.seed, _STAGE_MONITOR, view_id))
    monitor_s = torch.from_numpy(labels(monitor[:, 0], monitor[:, 1])).to(enc.dtype)

    def monitor_loss() -> float:
        with torch.no_grad():
            return float(pair_loss(enc, x, monitor, monitor_s))

    optimizer = torch.optim.Adam(enc.parameters(), lr=cfg.pretrain_lr)
    scheduler = torch.optim.lr_scheduler.StepLR(optimizer, step_size=cfg.lr_decay_every, gamma=cfg.lr_decay_factor)
    start_monitor = monitor_loss()
    enc.train()

    for epoch in range(1, cfg.pretrain_epochs + 1):
        pairs = sample_pairs(n, n_pairs, _derive_seed(cfg.seed, _STAGE_PRETRAIN, view_id, epoch))
        targets = torch.from_numpy(labels(pairs[:, 0], pairs[:, 1])).to(enc.dtype)
        total = 0.0
        for start in range(0, n_pairs, cfg.batch_size):
            batch = pairs[start:start + cfg.batch_size]
            loss = pair_loss(enc, x, batch, targets[start:start + cfg.batch_size])
            if not torch.isfinite(loss):
                raise DivergenceError(f"{view} pretraining diverged at epoch {epoch} (loss={loss.item()})")
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            total += loss.item() * len(batch)
        scheduler.step()
        mean_loss = total / max(n_pairs, 1)
        if history is not None:
            history.append({"epoch": epoch, "stage": "pretrain", "view": view,
                            "L_s": mean_loss, "L_c": None, "L_f": mean_loss})
        logger.info(f"🧠 pretrain [{view}] epoch {epoch}/{cfg.pretrain_epochs} L_s={mean_loss:.6f}")

    enc.eval()
    logger.info(f"✅ pretrain [{view}] monitor loss {start_monitor:.6f} → {monitor_loss():.6f}")
    return enc


# ---------------------------------------------------------------------------
# Centroid başlatma
# ---------------------------------------------------------------------------

def init_centroids(embeddings: Union[EmbeddingBatch, np.ndarray], k: int, seed: int) -> np.ndarray:
    """k-means (k-means++ seeding, en fazla 100 iterasyon, tol 1e-6); seed'e göre deterministik"""
    matrix = embeddings.matrix if isinstance(embeddings, EmbeddingBatch) else np.asarray(embeddings, dtype=np.float64)
    if k < 1:
        raise ParameterError(f"K must be >= 1, got {k}")
    if matrix.shape[0] < k:
        raise ParameterError(f"need at least K={k} embeddings, got {matrix.shape[0]}")
    km = KMeans(n_clusters=k, init="k-means++", n_init=1, max_iter=100, tol=1e-6, random_state=seed)
    km.fit(matrix)
    return np.array(km.cluster_centers_, dtype=np.float64)


def hard_labels(z: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    return np.argmin(((z[:, None] - centroids[None]) ** 2).sum(-1), axis=1)


def align_centroids(reference: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """
    Centroid sırasını referans etiketlerle örtüşmeyi en çoklayacak şekilde yeniden dizer
    (Hungarian). Sonuçta j indeksi iki görünümde aynı cluster'ı gösterir.
    """
    k = centroids.shape[0]
    overlap = np.zeros((k, k), dtype=np.int64)
    np.add.at(overlap, (reference, labels), 1)
    rows, cols = linear_sum_assignment(-overlap)
    order = np.empty(k, dtype=np.int64)
    order[rows] = cols
    return centroids[order]


def initialize_view_models(
    enc1: FiberEncoder, enc2: FiberEncoder, x1: np.ndarray, x2: np.ndarray, k: int, seed: int
) -> Tuple[ViewModel, ViewModel]:
    """Görünüm başına k-means; ikinci görünümün indeksleri birinciye hizalanır"""
    if k < 2:
        raise ParameterError(f"K must be >= 2 for fine-tuning, got {k}")
    z1, z2 = embed(enc1, x1).matrix, embed(enc2, x2).matrix
    mu1 = init_centroids(z1, k, seed)
    mu2 = init_centroids(z2, k, seed)
    mu2 = align_centroids(hard_labels(z1, mu1), hard_labels(z2, mu2), mu2)
    logger.info(f"🎯 Centroid'ler başlatıldı: K={k}")
    return ViewModel(enc1, mu1), ViewModel(enc2, mu2)


# ---------------------------------------------------------------------------
# Aşama 2: collaborative fine-tuning
# ---------------------------------------------------------------------------

def finetune_collaborative(
    vm1: ViewModel,
    vm2: ViewModel,
    inputs: Tuple[np.ndarray, np.ndarray],
    labels: Tuple[PairLabeler, PairLabeler],
    cfg: TrainConfig,
    *,
    history: Optional[List[Dict]] = None,
    anchor_hook: Optional[Callable[[int, int, int], None]] = None,
    n_pairs: Optional[int] = None,
) -> Tuple[ViewModel, ViewModel]:
    """
    Epoch e (1 tabanlı) tekse çapa P¹, çiftse P². Her görünüm L_s^v + γ KL(P^çapa ‖ Q^v)'yi
    minimize eder; encoder'lar ve centroid'ler birlikte güncellenir. P epoch başında hesaplanır.
    anchor_hook(epoch, view_index, anchor_index) enstrümantasyon içindir.
    """
    if vm1.k != vm2.k:
        raise ModelError(f"views disagree on K: {vm1.k} vs {vm2.k}")
    models = [vm1, vm2]
    n = int(inputs[0].shape[0])
    if inputs[1].shape[0] != n:
        raise ParameterError("both views need the same number of fibers")
    n_pairs = n_pairs or cfg.pairs_per_fiber * n

    xs = [torch.from_numpy(np.ascontiguousarray(arr)).to(vm.encoder.dtype) for arr, vm in zip(inputs, models)]
    mus = [nn.Parameter(torch.from_numpy(vm.centroids.copy()).to(vm.encoder.dtype)) for vm in models]
    optimizers = [
        torch.optim.Adam(list(vm.encoder.parameters()) + [mu], lr=cfg.finetune_lr)
        for vm, mu in zip(models, mus)
    ]

    for epoch in range(1, cfg.finetune_epochs + 1):
        targets = []
        for vm, arr, mu in zip(models, inputs, mus):
            z = torch.from_numpy(embed(vm.encoder, arr).matrix).to(mu.dtype)
            with torch.no_grad():
                q = student_t(z, mu).double().numpy()
            mass = q.sum(axis=0)
            if mass.min() < MIN_CLUSTER_MASS:
                raise DegenerateClusterError(
                    f"{vm.view}: cluster {int(np.argmin(mass))} lost its soft mass at epoch {epoch}; try a smaller K"
                )
            targets.append(target_distribution(q).q)
        anchor_index = 0 if epoch % 2 == 1 else 1
        anchor = torch.from_numpy(targets[anchor_index])

        pairs = sample_pairs(n, n_pairs, _derive_seed(cfg.seed, _STAGE_FINETUNE, epoch))
        pair_targets = [torch.from_numpy(lab(pairs[:, 0], pairs[:, 1])) for lab in labels]
        sums = [np.zeros(3), np.zeros(3)]

        for v, (vm, x, mu, opt) in enumerate(zip(models, xs, mus, optimizers)):
            if anchor_hook is not None:
                anchor_hook(epoch, v, anchor_index)
            vm.encoder.train()
            view_anchor = anchor.to(mu.dtype)
            for start in range(0, n_pairs, cfg.batch_size):
                batch = pairs[start:start + cfg.batch_size]
                s = pair_targets[v][start:start + cfg.batch_size].to(mu.dtype)
                l_s, l_c, l_f = collaborative_loss(vm.encoder, mu, x, batch, s, view_anchor, cfg.gamma)
                if not torch.isfinite(l_f):
                    raise DivergenceError(f"{vm.view} fine-tuning diverged at epoch {epoch}")
                opt.zero_grad()
                l_f.backward()
                opt.step()
                sums[v] += np.array([l_s.item(), l_c.item(), l_f.item()]) * len(batch)
            vm.encoder.eval()

        for v, vm in enumerate(models):
            l_s, l_c, l_f = sums[v] / max(n_pairs, 1)
            if history is not None:
                history.append({"epoch": epoch, "stage": "finetune", "view": vm.view,
                                "L_s": l_s, "L_c": l_c, "L_f": l_f})
            logger.info(
                f"🔁 finetune [{vm.view}] epoch {epoch}/{cfg.finetune_epochs} anchor=P{anchor_index + 1} "
                f"L_s={l_s:.6f} L_c={l_c:.6f} L_f={l_f:.6f}"
            )

    return tuple(ViewModel(vm.encoder, mu.detach().double().numpy()) for vm, mu in zip(models, mus))


def train_dmvfc(
    corpus: TrainingCorpus,
    enc1: FiberEncoder,
    enc2: FiberEncoder,
    cfg: TrainConfig,
    *,
    history: Optional[List[Dict]] = None,
) -> Tuple[ViewModel, ViewModel]:
    """Uçtan uca: iki görünüm pretraining → centroid başlatma → collaborative fine-tuning"""
    pretrain_view(enc1, corpus.x1, corpus.geometric_labels, cfg, history=history)
    pretrain_view(enc2, corpus.x2, corpus.functional_labels, cfg, history=history)
    vm1, vm2 = initialize_view_models(enc1, enc2, corpus.x1, corpus.x2, cfg.k, cfg.seed)
    return finetune_collaborative(
        vm1, vm2, (corpus.x1, corpus.x2), (corpus.geometric_labels, corpus.functional_labels), cfg,
        history=history,
    )


# ---------------------------------------------------------------------------
# Checkpoint'ler
# ---------------------------------------------------------------------------

def save_view_model(vm: ViewModel, directory: Union[str, Path]) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    save_encoder(vm.encoder, root / f"{vm.view}.pt")
    write_matrix(root / f"{vm.view}_centroids.txt", vm.centroids)


def load_view_model(
    directory: Union[str, Path], view: str, expected: Optional[EncoderConfig] = None
) -> ViewModel:
    root = Path(directory)
    enc = load_encoder(root / f"{view}.pt", expected)
    centroids_path = root / f"{view}_centroids.txt"
    if not centroids_path.is_file():
        raise ModelError(f"missing centroids for {view} view in {root}")
    return ViewModel(enc, read_matrix(centroids_path))


LOG_COLUMNS = ["epoch", "stage", "view", "L_s", "L_c", "L_f"]


def write_log(history: Sequence[Dict], path: Union[str, Path]) -> None:
    """Epoch başına görünüm kayıpları; pretraining satırlarında L_c boş"""
    pd.DataFrame(list(history), columns=LOG_COLUMNS).to_csv(path, index=False, float_format="%.10g")
