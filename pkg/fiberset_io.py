# fiberset_io.py
# -*- coding: utf-8 -*-
"""
Fiber dataset modeli ve FSET v1 dizin formatı.

Dizin yapısı:
    meta.txt     format fset-v1 / bundle <ad> / n_fibers <N> / signal_length <T|0>
    fibers.txt   'fiber <id> <m>' başlığı + m satır 'x y z'
    signals.txt  (opsiyonel) 'signal <fiber_id>' + series_a satırı + series_b satırı
    labels.txt   (opsiyonel) N satır tamsayı etiket
'#' ile başlayan satırlar yorumdur.
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np

from errors import DatasetError, FormatError, ParameterError

logger = logging.getLogger(__name__)

FORMAT_TAG = "fset-v1"
META_FILE = "meta.txt"
FIBERS_FILE = "fibers.txt"
SIGNALS_FILE = "signals.txt"
LABELS_FILE = "labels.txt"
NUMBER_FORMAT = "%.17g"

PathLike = Union[str, Path]
T = TypeVar("T")


def _frozen(arr, ndim: int, what: str) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    if out.ndim != ndim:
        raise ParameterError(f"{what}: expected {ndim}-d array, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ParameterError(f"{what}: non-finite values")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Fiber:
    """Tek streamline: RAS mm koordinatlarında sıralı 3B polyline"""
    id: int
    points: np.ndarray

    def __post_init__(self):
        if int(self.id) < 0:
            raise ParameterError(f"fiber id must be non-negative, got {self.id}")
        pts = _frozen(self.points, 2, f"fiber {self.id} points")
        if pts.shape[1] != 3 or pts.shape[0] < 2:
            raise ParameterError(f"fiber {self.id}: need m >= 2 points of 3 coordinates, got {pts.shape}")
        object.__setattr__(self, "id", int(self.id))
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True, eq=False)
class EndpointSignals:
    """Fiber'ın iki ucundaki BOLD zaman serileri (series_a = points[0], series_b = points[-1])"""
    fiber_id: int
    series_a: np.ndarray
    series_b: np.ndarray

    def __post_init__(self):
        a = _frozen(self.series_a, 1, f"signal {self.fiber_id} series_a")
        b = _frozen(self.series_b, 1, f"signal {self.fiber_id} series_b")
        if a.shape != b.shape or a.shape[0] < 2:
            raise ParameterError(
                f"signal {self.fiber_id}: series must share length T >= 2, got {a.shape[0]} and {b.shape[0]}"
            )
        object.__setattr__(self, "fiber_id", int(self.fiber_id))
        object.__setattr__(self, "series_a", a)
        object.__setattr__(self, "series_b", b)

    @property
    def length(self) -> int:
        return int(self.series_a.shape[0])

    def swapped(self) -> "EndpointSignals":
        return EndpointSignals(self.fiber_id, self.series_b, self.series_a)


@dataclass(frozen=True, eq=False)
class FiberSet:
    """Bir bundle: fiber'lar, opsiyonel endpoint sinyalleri ve sentetik etiketler"""
    fibers: Tuple[Fiber, ...]
    signals: Optional[Tuple[EndpointSignals, ...]] = None
    bundle_name: str = "bundle"
    true_labels: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.bundle_name, str) or "\n" in self.bundle_name or "\r" in self.bundle_name:
            raise ParameterError(f"bundle name must be a single-line string, got {self.bundle_name!r}")
        fibers = tuple(self.fibers)
        ids = [f.id for f in fibers]
        if len(set(ids)) != len(ids):
            raise ParameterError(f"bundle '{self.bundle_name}': fiber ids are not unique")
        object.__setattr__(self, "fibers", fibers)

        if self.signals is not None:
            signals = tuple(self.signals)
            if len(signals) != len(fibers):
                raise ParameterError(
                    f"bundle '{self.bundle_name}': {len(signals)} signal records for {len(fibers)} fibers"
                )
            for fiber, sig in zip(fibers, signals):
                if sig.fiber_id != fiber.id:
                    raise ParameterError(
                        f"bundle '{self.bundle_name}': signal for fiber {sig.fiber_id} out of order (expected {fiber.id})"
                    )
            if len({s.length for s in signals}) > 1:
                raise ParameterError(f"bundle '{self.bundle_name}': signals have unequal lengths")
            object.__setattr__(self, "signals", signals)

        if self.true_labels is not None:
            labels = np.array(self.true_labels, dtype=np.int64)
            if labels.shape != (len(fibers),):
                raise ParameterError(
                    f"bundle '{self.bundle_name}': {labels.size} labels for {len(fibers)} fibers"
                )
            labels.setflags(write=False)
            object.__setattr__(self, "true_labels", labels)

    def __len__(self) -> int:
        return len(self.fibers)

    @property
    def fiber_ids(self) -> List[int]:
        return [f.id for f in self.fibers]

    @property
    def signal_length(self) -> int:
        if not self.signals:
            return 0
        return self.signals[0].length

    @property
    def has_signals(self) -> bool:
        return self.signals is not None

    def subset(self, indices: Sequence[int]) -> "FiberSet":
        idx = [int(i) for i in indices]
        return FiberSet(
            fibers=tuple(self.fibers[i] for i in idx),
            signals=None if self.signals is None else tuple(self.signals[i] for i in idx),
            bundle_name=self.bundle_name,
            true_labels=None if self.true_labels is None else self.true_labels[idx],
        )


# ---------------------------------------------------------------------------
# Okuma
# ---------------------------------------------------------------------------

def _records(path: Path) -> Iterator[Tuple[int, List[str]]]:
    """Yorum ve boş satırları atlayarak (satır no, token listesi) üretir"""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line.split()


def _floats(tokens: List[str], where: str) -> np.ndarray:
    try:
        values = np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as e:
        raise FormatError(f"{where}: non-numeric value ({e})") from e
    if not np.all(np.isfinite(values)):
        raise FormatError(f"{where}: NaN or infinite value")
    return values


def _int(token: str, where: str) -> int:
    try:
        return int(token)
    except ValueError as e:
        raise FormatError(f"{where}: expected integer, got '{token}'") from e


def _read_meta(path: Path) -> Tuple[str, int, int]:
    meta = {}
    bundle = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            # bundle adı satırın ham kalanıdır; boşluklar korunur
            key, sep, rest = raw.rstrip("\n").partition(" ")
            if key == "bundle" and sep:
                bundle = rest
                continue
            line = raw.strip()
            if line and not line.startswith("#"):
                tokens = line.split()
                meta[tokens[0]] = (lineno, tokens[1:])
    where = f"{path.name}"
    if meta.get("format", (0, []))[1] != [FORMAT_TAG]:
        raise FormatError(f"{where}: missing or unsupported 'format' line (expected {FORMAT_TAG})")
    if bundle is None:
        raise FormatError(f"{where}: missing 'bundle' line")
    for key in ("n_fibers", "signal_length"):
        if key not in meta or not meta[key][1]:
            raise FormatError(f"{where}: missing '{key}' line")
    n_fibers = _int(meta["n_fibers"][1][0], f"{where}:{meta['n_fibers'][0]}")
    signal_length = _int(meta["signal_length"][1][0], f"{where}:{meta['signal_length'][0]}")
    if n_fibers < 0 or signal_length < 0:
        raise FormatError(f"{where}: negative count")
    return bundle, n_fibers, signal_length


def _read_fibers(path: Path) -> List[Fiber]:
    fibers: List[Fiber] = []
    records = _records(path)
    for lineno, tokens in records:
        where = f"{path.name}:{lineno}"
        if len(tokens) != 3 or tokens[0] != "fiber":
            raise FormatError(f"{where}: expected 'fiber <id> <m>' header")
        fid, m = _int(tokens[1], where), _int(tokens[2], where)
        if m < 2:
            raise FormatError(f"{where}: fiber {fid} has {m} points, need >= 2")
        rows = []
        for _ in range(m):
            try:
                plineno, ptokens = next(records)
            except StopIteration:
                raise FormatError(f"{where}: fiber {fid} truncated, expected {m} points")
            if len(ptokens) != 3:
                raise FormatError(f"{path.name}:{plineno}: fiber {fid} point needs 3 coordinates")
            rows.append(_floats(ptokens, f"{path.name}:{plineno} (fiber {fid})"))
        try:
            fibers.append(Fiber(fid, np.vstack(rows)))
        except ParameterError as e:
            raise FormatError(f"{where}: {e}") from e
    return fibers


def _read_signals(path: Path, signal_length: int) -> dict:
    signals = {}
    records = _records(path)
    for lineno, tokens in records:
        where = f"{path.name}:{lineno}"
        if len(tokens) != 2 or tokens[0] != "signal":
            raise FormatError(f"{where}: expected 'signal <fiber_id>' header")
        fid = _int(tokens[1], where)
        if fid in signals:
            raise FormatError(f"{where}: duplicate signal record for fiber {fid}")
        series = []
        for name in ("series_a", "series_b"):
            try:
                slineno, stokens = next(records)
            except StopIteration:
                raise FormatError(f"{where}: signal {fid} missing {name}")
            values = _floats(stokens, f"{path.name}:{slineno} (signal {fid} {name})")
            if values.shape[0] != signal_length:
                raise FormatError(
                    f"{path.name}:{slineno}: signal {fid} {name} has {values.shape[0]} values, expected {signal_length}"
                )
            series.append(values)
        signals[fid] = EndpointSignals(fid, series[0], series[1])
    return signals


def load_fiberset(path: PathLike) -> FiberSet:
    """FSET v1 dizinini okur; tip kurallarını ihlal eden dataset'i reddeder (onarmaz)"""
    root = Path(path)
    meta_path, fibers_path = root / META_FILE, root / FIBERS_FILE
    if not root.is_dir() or not meta_path.is_file() or not fibers_path.is_file():
        raise DatasetError(f"not a dataset: {root} (needs {META_FILE} and {FIBERS_FILE})")

    bundle, n_fibers, signal_length = _read_meta(meta_path)
    fibers = _read_fibers(fibers_path)
    if len(fibers) != n_fibers:
        raise FormatError(f"{FIBERS_FILE}: {len(fibers)} fibers, meta declares {n_fibers}")
    ids = [f.id for f in fibers]
    if len(set(ids)) != len(ids):
        raise FormatError(f"{FIBERS_FILE}: duplicate fiber ids")

    signals = None
    signals_path = root / SIGNALS_FILE
    if signals_path.is_file():
        if signal_length < 2:
            raise FormatError(f"{SIGNALS_FILE} present but meta signal_length is {signal_length}")
        by_id = _read_signals(signals_path, signal_length)
        if len(by_id) != len(fibers):
            raise FormatError(f"{SIGNALS_FILE}: {len(by_id)} signal records for {len(fibers)} fibers")
        unknown = set(by_id) - set(ids)
        if unknown:
            raise FormatError(f"{SIGNALS_FILE}: signal for unknown fiber {min(unknown)}")
        signals = tuple(by_id[fid] for fid in ids)
    elif signal_length > 0:
        raise FormatError(f"meta declares signal_length {signal_length} but {SIGNALS_FILE} is missing")

    labels = None
    labels_path = root / LABELS_FILE
    if labels_path.is_file():
        values = []
        for lineno, tokens in _records(labels_path):
            if len(tokens) != 1:
                raise FormatError(f"{LABELS_FILE}:{lineno}: expected one integer label")
            values.append(_int(tokens[0], f"{LABELS_FILE}:{lineno}"))
        if len(values) != len(fibers):
            raise FormatError(f"{LABELS_FILE}: {len(values)} labels for {len(fibers)} fibers")
        labels = np.array(values, dtype=np.int64)

    fs = FiberSet(fibers=tuple(fibers), signals=signals, bundle_name=bundle, true_labels=labels)
    logger.info(f"📂 Dataset yüklendi: {root} ({len(fs)} fiber, bundle='{bundle}', T={fs.signal_length})")
    return fs


def load_fibersets(paths: Sequence[PathLike]) -> List[FiberSet]:
    return [load_fiberset(p) for p in paths]


# ---------------------------------------------------------------------------
# Yazma
# ---------------------------------------------------------------------------

def _row(values: np.ndarray) -> str:
    return " ".join(NUMBER_FORMAT % v for v in values)


def save_fiberset(fs: FiberSet, path: PathLike) -> None:
    """FSET v1 olarak yazar; aynı dizine ikinci kayıt eskisinin üzerine yazar"""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    (root / META_FILE).write_text(
        f"format {FORMAT_TAG}\n"
        f"bundle {fs.bundle_name}\n"
        f"n_fibers {len(fs)}\n"
        f"signal_length {fs.signal_length}\n",
        encoding="utf-8",
    )

    with open(root / FIBERS_FILE, "w", encoding="utf-8") as fh:
        for fiber in fs.fibers:
            fh.write(f"fiber {fiber.id} {fiber.points.shape[0]}\n")
            for point in fiber.points:
                fh.write(_row(point) + "\n")

    signals_path = root / SIGNALS_FILE
    if fs.signals is not None:
        with open(signals_path, "w", encoding="utf-8") as fh:
            for sig in fs.signals:
                fh.write(f"signal {sig.fiber_id}\n")
                fh.write(_row(sig.series_a) + "\n")
                fh.write(_row(sig.series_b) + "\n")
    elif signals_path.exists():
        signals_path.unlink()

    labels_path = root / LABELS_FILE
    if fs.true_labels is not None:
        labels_path.write_text("".join(f"{int(v)}\n" for v in fs.true_labels), encoding="utf-8")
    elif labels_path.exists():
        labels_path.unlink()

    logger.info(f"💾 Dataset kaydedildi: {root} ({len(fs)} fiber)")


def write_matrix(path: PathLike, matrix: np.ndarray) -> None:
    """Sayısal matrisi FSET metin kodlamasıyla (17 anlamlı basamak) yazar"""
    arr = np.asarray(matrix)
    fmt = "%d" if np.issubdtype(arr.dtype, np.integer) else NUMBER_FORMAT
    np.savetxt(path, arr.reshape(arr.shape[0], -1) if arr.ndim > 1 else arr, fmt=fmt)


def read_matrix(path: PathLike, ndmin: int = 2, dtype=np.float64) -> np.ndarray:
    p = Path(path)
    if not p.is_file():
        raise DatasetError(f"missing matrix file: {p}")
    try:
        return np.loadtxt(p, dtype=dtype, ndmin=ndmin, comments="#")
    except ValueError as e:
        raise FormatError(f"{p.name}: {e}") from e


# ---------------------------------------------------------------------------
# Train / test ayrımı
# ---------------------------------------------------------------------------

def split_dataset(
    fs_list: Sequence[T], train_fraction: float, seed: int
) -> Tuple[List[T], List[T]]:
    """
    Subject-bundle düzeyinde deterministik ayrım.
    train boyutu round(train_fraction * n) (yarımlar yukarı yuvarlanır); her iki liste giriş sırasını korur.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ParameterError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if len(fs_list) == 0:
        raise ParameterError("split_dataset needs at least one FiberSet")

    n = len(fs_list)
    n_train = int(math.floor(train_fraction * n + 0.5))
    order = np.random.default_rng(seed).permutation(n)
    train_idx = set(int(i) for i in order[:n_train])
    train = [fs for i, fs in enumerate(fs_list) if i in train_idx]
    test = [fs for i, fs in enumerate(fs_list) if i not in train_idx]
    logger.info(f"✂️ Split: {len(train)} train / {len(test)} test (seed={seed})")
    return train, test
