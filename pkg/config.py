# config.py
# -*- coding: utf-8 -*-
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Tuple, Union

from dotenv import load_dotenv

from errors import ConfigError

load_dotenv()

# Application Settings
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
THREADS = os.getenv("DMVFC_THREADS", "0")
DTYPE = os.getenv("DMVFC_DTYPE", "float64")
EMBED_BATCH = int(os.getenv("DMVFC_EMBED_BATCH", "1024"))

PRESETS = ("easy", "func-only", "geo-only")


def resolve_threads(value) -> int:
    """DMVFC_THREADS: 0 tüm çekirdekler, pozitif tamsayı sabit sayı"""
    try:
        n = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"DMVFC_THREADS must be an integer, got {value!r}")
    if n < 0:
        raise ConfigError(f"DMVFC_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


def parse_values(text: str, source: str = "<text>") -> Dict[str, str]:
    """key=value satırları; anahtarlar alt çizgili biçime çevrilir"""
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def read_values(path: Union[str, Path]) -> Dict[str, str]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse_values(p.read_text(encoding="utf-8"), source=str(p))


def _parse_floats(text: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in text.replace(" ", "").split(",") if v)


def _parse_ints(text: str) -> Tuple[int, ...]:
    return tuple(int(v) for v in text.replace(" ", "").split(",") if v)


def _format(value) -> str:
    if isinstance(value, tuple):
        return ",".join(repr(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """
    Pipeline'ın tüm çözülmüş hiperparametreleri.
    key=value metin olarak config.txt'ye yazılır; bilinmeyen anahtar reddedilir.
    """
    # training
    pretrain_lr: float = 3e-3
    pretrain_epochs: int = 450
    lr_decay_every: int = 200
    lr_decay_factor: float = 0.1
    finetune_lr: float = 1e-5
    finetune_epochs: int = 20
    batch_size: int = 1024
    gamma: float = 0.1
    k: int = 0
    pairs_per_fiber: int = 10
    seed: int = 0

    # encoders
    n_points: int = 25
    signal_len: int = 600
    geo_knn_k: int = 5
    func_knn_k: int = 1
    layer_widths: Tuple[int, ...] = (64, 64, 128)
    embedding_dim: int = 10

    # functional pseudo-labels
    pca_components: int = 30

    # synthetic data
    preset: str = ""
    n_geo_clusters: int = 2
    n_func_per_geo: int = 2
    fibers_per_cluster: int = 50
    geo_separation: float = 20.0
    geo_jitter: float = 1.0
    signal_length: int = 1200
    func_base_freqs: Tuple[float, ...] = field(default=(0.006, 0.012, 0.018, 0.024))
    signal_noise_sd: float = 0.2

    # baseline
    qb_threshold: float = 0.0

    @classmethod
    def from_text(cls, text: str, source: str = "<text>") -> "RunConfig":
        return cls().with_overrides(**parse_values(text, source))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunConfig":
        return cls().with_overrides(**read_values(path))

    def with_overrides(self, **overrides) -> "RunConfig":
        """String ya da tipli değerlerle yeni config üretir (None değerler atlanır)."""
        known = {f.name: f for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(f"unknown config key: {key}")
            changes[name] = self._coerce(name, value)
        return replace(self, **changes)

    def _coerce(self, name: str, value):
        current = getattr(self, name)
        try:
            if isinstance(current, tuple):
                if isinstance(value, str):
                    return _parse_ints(value) if name == "layer_widths" else _parse_floats(value)
                return tuple(value)
            if isinstance(current, bool):
                return str(value).lower() in ("1", "true", "yes")
            if isinstance(current, int):
                return int(value)
            if isinstance(current, float):
                return float(value)
            return str(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid value for {name}: {value!r} ({e})") from e

    def validate(self) -> "RunConfig":
        positive = ("pretrain_lr", "finetune_lr", "lr_decay_factor", "batch_size", "pretrain_epochs",
                    "lr_decay_every", "pairs_per_fiber", "n_points", "signal_len", "embedding_dim",
                    "pca_components", "n_geo_clusters", "n_func_per_geo", "fibers_per_cluster",
                    "geo_separation", "signal_length")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.finetune_epochs < 0:
            raise ConfigError("finetune_epochs must be >= 0")
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if self.k < 0:
            raise ConfigError("k must be >= 0 (0 = unset)")
        if self.geo_jitter < 0 or self.signal_noise_sd < 0:
            raise ConfigError("geo_jitter and signal_noise_sd must be >= 0")
        if self.qb_threshold < 0:
            raise ConfigError("qb_threshold must be >= 0 (0 = unset)")
        if not self.layer_widths or any(w <= 0 for w in self.layer_widths):
            raise ConfigError("layer_widths must be a nonempty list of positive integers")
        if self.preset and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset '{self.preset}', expected one of {', '.join(PRESETS)}")
        if self.n_points < 2 or self.signal_len < 2:
            raise ConfigError("n_points and signal_len must be >= 2")
        return self

    def to_text(self) -> str:
        lines = [f"{f.name}={_format(getattr(self, f.name))}" for f in fields(self)]
        return "\n".join(sorted(lines)) + "\n"

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")
