# encoder.py
# -*- coding: utf-8 -*-
"""
Point-cloud embedding ağları (DGCNN tarzı edge-convolution).
Geometrik görünüm: n_p × 3 nokta bulutu; fonksiyonel görünüm: 2 × T_d endpoint bulutu.
"""
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import torch
from torch import nn
import torch.nn.functional as F

import config
from errors import ModelError, ParameterError

logger = logging.getLogger(__name__)

VIEWS = ("geometric", "functional")
LEAKY_SLOPE = 0.2


@dataclass(frozen=True)
class EncoderConfig:
    view: str
    input_channels: int
    num_points: int
    knn_k: int
    layer_widths: Tuple[int, ...] = (64, 64, 128)
    embedding_dim: int = 10

    def __post_init__(self):
        object.__setattr__(self, "layer_widths", tuple(int(w) for w in self.layer_widths))
        if self.view not in VIEWS:
            raise ParameterError(f"unknown view '{self.view}', expected one of {VIEWS}")
        if self.input_channels < 1 or self.num_points < 2:
            raise ParameterError(f"{self.view}: input_channels >= 1 and num_points >= 2 required")
        if not 1 <= self.knn_k < self.num_points:
            raise ParameterError(f"{self.view}: knn_k must be in [1, num_points), got {self.knn_k}")
        if self.embedding_dim < 2:
            raise ParameterError(f"{self.view}: embedding_dim must be >= 2")
        if not self.layer_widths or min(self.layer_widths) < 1:
            raise ParameterError(f"{self.view}: layer_widths must be nonempty and positive")


def geometric_config(n_points: int = 25, knn_k: int = 5, layer_widths=(64, 64, 128), embedding_dim: int = 10) -> EncoderConfig:
    return EncoderConfig("geometric", 3, n_points, knn_k, tuple(layer_widths), embedding_dim)


def functional_config(signal_len: int = 600, knn_k: int = 1, layer_widths=(64, 64, 128), embedding_dim: int = 10) -> EncoderConfig:
    return EncoderConfig("functional", signal_len, 2, knn_k, tuple(layer_widths), embedding_dim)


@dataclass(frozen=True, eq=False)
class EmbeddingBatch:
    matrix: np.ndarray
    fiber_ids: np.ndarray = field(default=None)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=np.float64)
        ids = np.arange(matrix.shape[0]) if self.fiber_ids is None else np.asarray(self.fiber_ids, dtype=np.int64)
        if matrix.ndim != 2 or ids.shape != (matrix.shape[0],):
            raise ParameterError(f"embedding batch: {matrix.shape} rows vs {ids.shape} ids")
        if not np.all(np.isfinite(matrix)):
            raise ParameterError("embedding batch contains non-finite values")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "fiber_ids", ids)

    def __len__(self) -> int:
        return int(self.matrix.shape[0])


def knn_indices(x: torch.Tensor, k: int) -> torch.Tensor:
    """(B, N, C) → (B, N, k): her nokta için kendisi hariç en yakın k komşu"""
    with torch.no_grad():
        dist = torch.cdist(x, x)
        eye = torch.eye(x.shape[1], dtype=torch.bool, device=x.device)
        dist = dist.masked_fill(eye, float("inf"))
        return dist.topk(k, dim=-1, largest=False).indices


def edge_features(x: torch.Tensor, idx: torch.Tensor) -> torch.Tensor:
    """(B, N, C) ve (B, N, k) → (B, N, k, 2C): [x_i, x_j - x_i]"""
    batch = torch.arange(x.shape[0], device=x.device).view(-1, 1, 1)
    neighbors = x[batch, idx]
    center = x.unsqueeze(2).expand_as(neighbors)
    return torch.cat([center, neighbors - center], dim=-1)


class EdgeConvBlock(nn.Module):
    """Özellik uzayında kNN → kenar başına affine + LeakyReLU → komşular üzerinde max"""

    def __init__(self, in_dim: int, out_dim: int, k: int):
        super().__init__()
        self.k = k
        self.linear = nn.Linear(2 * in_dim, out_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        idx = knn_indices(x, self.k)
        edges = F.leaky_relu(self.linear(edge_features(x, idx)), negative_slope=LEAKY_SLOPE)
        return edges.max(dim=2).values


class FiberEncoder(nn.Module):
    def __init__(self, cfg: EncoderConfig):
        super().__init__()
        self.cfg = cfg
        dims = (cfg.input_channels,) + cfg.layer_widths
        self.blocks = nn.ModuleList(
            EdgeConvBlock(d_in, d_out, cfg.knn_k) for d_in, d_out in zip(dims[:-1], dims[1:])
        )
        self.head = nn.Linear(sum(cfg.layer_widths), cfg.embedding_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # x: (B, num_points, input_channels)
        features = []
        for block in self.blocks:
            x = block(x)
            features.append(x)
        pooled = torch.cat(features, dim=-1).max(dim=1).values
        return self.head(pooled)

    @property
    def dtype(self) -> torch.dtype:
        return self.head.weight.dtype


def _torch_dtype(name: str) -> torch.dtype:
    try:
        return {"float32": torch.float32, "float64": torch.float64}[name]
    except KeyError:
        raise ParameterError(f"unsupported dtype '{name}'")


def build_encoder(cfg: EncoderConfig, seed: int = 0, dtype: Optional[str] = None) -> FiberEncoder:
    """Seed'e bağlı deterministik başlatma; global torch RNG durumu değişmez"""
    if not isinstance(cfg, EncoderConfig):
        raise ParameterError("build_encoder needs an EncoderConfig")
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(int(seed))
        enc = FiberEncoder(cfg)
    enc = enc.to(_torch_dtype(dtype or config.DTYPE))
    enc.eval()
    return enc


def _check_batch(enc: FiberEncoder, batch: np.ndarray) -> np.ndarray:
    arr = np.asarray(batch)
    expected = (enc.cfg.num_points, enc.cfg.input_channels)
    if arr.ndim != 3 or arr.shape[1:] != expected:
        raise ParameterError(f"{enc.cfg.view} encoder expects B×{expected[0]}×{expected[1]}, got {arr.shape}")
    return arr


def encode(enc: FiberEncoder, batch: Union[np.ndarray, torch.Tensor]) -> torch.Tensor:
    """Gradyanlı ileri geçiş (eğitim için)"""
    if isinstance(batch, np.ndarray):
        batch = torch.from_numpy(np.ascontiguousarray(_check_batch(enc, batch)))
    return enc(batch.to(enc.dtype))


def embed(
    enc: FiberEncoder,
    batch: np.ndarray,
    fiber_ids: Optional[Sequence[int]] = None,
    chunk: Optional[int] = None,
) -> EmbeddingBatch:
    """Değerlendirme modunda embedding; aynı girdi ve parametrelerle sonuç birebir aynı"""
    arr = _check_batch(enc, batch)
    chunk = chunk or config.EMBED_BATCH
    was_training = enc.training
    enc.eval()
    outputs = []
    with torch.no_grad():
        for start in range(0, arr.shape[0], chunk):
            outputs.append(encode(enc, arr[start:start + chunk]).cpu().numpy())
    enc.train(was_training)
    matrix = np.concatenate(outputs) if outputs else np.zeros((0, enc.cfg.embedding_dim))
    return EmbeddingBatch(matrix, fiber_ids)


def pairwise_embedding_distance(e: EmbeddingBatch, i: int, j: int) -> float:
    n = len(e)
    for idx in (i, j):
        if not 0 <= idx < n:
            raise ParameterError(f"index {idx} out of range for {n} embeddings")
    return float(np.linalg.norm(e.matrix[i] - e.matrix[j]))


def save_encoder(enc: FiberEncoder, path: Union[str, Path]) -> None:
    """Tek arşiv: config alanları + isimli parametre tensörleri"""
    torch.save({"config": asdict(enc.cfg), "state_dict": enc.state_dict()}, str(path))


def load_encoder(path: Union[str, Path], expected: Optional[EncoderConfig] = None) -> FiberEncoder:
    p = Path(path)
    if not p.is_file():
        raise ModelError(f"encoder checkpoint not found: {p}")
    archive = torch.load(str(p), map_location="cpu", weights_only=True)
    try:
        cfg = EncoderConfig(**{**archive["config"], "layer_widths": tuple(archive["config"]["layer_widths"])})
    except (KeyError, TypeError, ParameterError) as e:
        raise ModelError(f"{p}: invalid encoder config ({e})") from e
    if expected is not None and cfg != expected:
        raise ModelError(f"{p}: checkpoint config {cfg} does not match expected {expected}")
    state = archive["state_dict"]
    dtype = next(iter(state.values())).dtype
    enc = FiberEncoder(cfg).to(dtype)
    try:
        enc.load_state_dict(state)
    except RuntimeError as e:
        raise ModelError(f"{p}: parameter mismatch ({e})") from e
    enc.eval()
    logger.info(f"📦 Encoder yüklendi: {p} ({cfg.view}, dim={cfg.embedding_dim})")
    return enc
