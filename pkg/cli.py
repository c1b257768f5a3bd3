# cli.py
# -*- coding: utf-8 -*-
"""
DMVFC komut satırı: generate / split / pretrain / finetune / cluster / qb / evaluate.
Çıkış kodları: 0 başarı, 1 çalışma zamanı / veri hatası, 2 kullanım hatası.
"""
import argparse
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd
import torch

import config
from config import RunConfig
from encoder import build_encoder, functional_config, geometric_config, load_encoder, save_encoder
from errors import ConfigError, DMVFCError, ParameterError
from fiberset_io import load_fiberset, load_fibersets, save_fiberset, split_dataset
from functional_kernels import load_pca, save_pca
from geometry_kernels import quickbundles, resample_all
from inference_eval import (
    ClusterPrediction,
    compare_methods,
    load_prediction,
    plot_clusters,
    predict,
    save_prediction,
    write_report,
)
from synthetic import SynthConfig, generate, preset
from training import (
    TrainConfig,
    TrainingCorpus,
    finetune_collaborative,
    initialize_view_models,
    load_view_model,
    pretrain_view,
    save_view_model,
    write_log,
)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
RUN_KEYS = {f.name for f in fields(RunConfig)}
SYNTH_KEYS = ("n_geo_clusters", "n_func_per_geo", "fibers_per_cluster", "geo_separation",
              "geo_jitter", "signal_length", "func_base_freqs", "signal_noise_sd")
TRAIN_KEYS = {f.name for f in fields(TrainConfig)}
CONFIG_FILE = "config.txt"


# ---------------------------------------------------------------------------
# Yardımcılar
# ---------------------------------------------------------------------------

def _run_config(args: argparse.Namespace) -> RunConfig:
    """Öncelik: varsayılanlar < --config dosyası < komut satırı bayrakları"""
    file_values = config.read_values(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if k in RUN_KEYS and v is not None}
    args.explicit_keys = set(file_values) | set(flags)
    return RunConfig().with_overrides(**file_values).with_overrides(**flags).validate()


def train_config(rc: RunConfig) -> TrainConfig:
    return TrainConfig(**{k: getattr(rc, k) for k in TRAIN_KEYS})


def encoder_configs(rc: RunConfig):
    geo = geometric_config(rc.n_points, rc.geo_knn_k, rc.layer_widths, rc.embedding_dim)
    func = functional_config(rc.signal_len, rc.func_knn_k, rc.layer_widths, rc.embedding_dim)
    return geo, func


def _synth_config(rc: RunConfig, args: argparse.Namespace) -> SynthConfig:
    """Preset verilmişse taban odur; config dosyasında ya da komut satırında açıkça verilen sentetik değerler üzerine yazar"""
    try:
        if rc.preset:
            explicit = {k: getattr(rc, k) for k in SYNTH_KEYS if k in args.explicit_keys}
            return replace(preset(rc.preset, rc.seed), **explicit)
        return SynthConfig(seed=rc.seed, **{k: getattr(rc, k) for k in SYNTH_KEYS})
    except ParameterError as e:
        raise ConfigError(str(e)) from e


def _dataset_paths(items: Sequence[str]) -> List[Path]:
    """Dataset dizinleri; .txt dosyası verilirse satır başına bir dizin okunur (split çıktısı)"""
    paths: List[Path] = []
    for item in items:
        p = Path(item)
        if p.is_file() and p.suffix == ".txt":
            paths.extend(Path(line.strip()) for line in p.read_text(encoding="utf-8").splitlines() if line.strip())
        else:
            paths.append(p)
    return paths


def _target_dir(root: Path, dataset: Path, multi: bool) -> Path:
    return root / dataset.name if multi else root


def _parse_pred_flags(items: Sequence[str]) -> Dict[str, Path]:
    methods: Dict[str, Path] = {}
    for item in items:
        name, sep, directory = item.partition("=")
        if not sep or not name or not directory:
            raise ConfigError(f"--pred expects name=dir, got '{item}'")
        if name in methods:
            raise ConfigError(f"duplicate --pred method '{name}'")
        methods[name] = Path(directory)
    return methods


# ---------------------------------------------------------------------------
# Komutlar
# ---------------------------------------------------------------------------

def cmd_generate(args: argparse.Namespace, rc: RunConfig) -> None:
    if args.n_sets < 1:
        raise ConfigError(f"--n-sets must be >= 1, got {args.n_sets}")
    synth = _synth_config(rc, args)
    out = Path(args.out)
    if args.n_sets == 1:
        save_fiberset(generate(synth), out)
        return
    for i in range(args.n_sets):
        cfg = replace(synth, seed=synth.seed + i, bundle_name=f"{synth.bundle_name}-{i:03d}")
        save_fiberset(generate(cfg), out / f"set_{i:03d}")
    logger.info(f"✅ {args.n_sets} dataset üretildi: {out}")


def cmd_split(args: argparse.Namespace, rc: RunConfig) -> None:
    if not 0.0 < args.train_fraction < 1.0:
        raise ConfigError(f"--train-fraction must be in (0, 1), got {args.train_fraction}")
    paths = _dataset_paths(args.data)
    for p in paths:
        load_fiberset(p)
    train, test = split_dataset(paths, args.train_fraction, rc.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "train.txt").write_text("".join(f"{p}\n" for p in train), encoding="utf-8")
    (out / "test.txt").write_text("".join(f"{p}\n" for p in test), encoding="utf-8")


def cmd_pretrain(args: argparse.Namespace, rc: RunConfig) -> None:
    cfg = train_config(rc)
    geo_cfg, func_cfg = encoder_configs(rc)
    fibersets = load_fibersets(_dataset_paths(args.data))
    corpus = TrainingCorpus.from_fibersets(fibersets, rc.n_points, rc.signal_len, rc.pca_components, rc.seed)

    history: List[dict] = []
    enc1 = pretrain_view(build_encoder(geo_cfg, rc.seed), corpus.x1, corpus.geometric_labels, cfg, history=history)
    enc2 = pretrain_view(build_encoder(func_cfg, rc.seed + 1), corpus.x2, corpus.functional_labels, cfg, history=history)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rc.save(out / CONFIG_FILE)
    save_encoder(enc1, out / "geometric.pt")
    save_encoder(enc2, out / "functional.pt")
    save_pca(corpus.pca, out)
    write_log(history, out / "log.csv")
    logger.info(f"✅ Pretraining tamamlandı: {out}")


def cmd_finetune(args: argparse.Namespace, rc: RunConfig) -> None:
    if rc.k < 2:
        raise ConfigError("finetune needs --k >= 2")
    cfg = train_config(rc)
    pretrained = Path(args.pretrained)
    enc1 = load_encoder(pretrained / "geometric.pt")
    enc2 = load_encoder(pretrained / "functional.pt")
    pca = load_pca(pretrained)
    # config.txt checkpoint'larla çelişmemeli
    rc = rc.with_overrides(
        n_points=enc1.cfg.num_points, signal_len=enc2.cfg.input_channels, pca_components=pca.n_components,
        geo_knn_k=enc1.cfg.knn_k, func_knn_k=enc2.cfg.knn_k,
        layer_widths=enc1.cfg.layer_widths, embedding_dim=enc1.cfg.embedding_dim,
    )

    fibersets = load_fibersets(_dataset_paths(args.data))
    corpus = TrainingCorpus.from_fibersets(fibersets, rc.n_points, rc.signal_len, seed=rc.seed, pca=pca)
    vm1, vm2 = initialize_view_models(enc1, enc2, corpus.x1, corpus.x2, rc.k, rc.seed)

    history: List[dict] = []
    vm1, vm2 = finetune_collaborative(
        vm1, vm2, (corpus.x1, corpus.x2), (corpus.geometric_labels, corpus.functional_labels), cfg,
        history=history,
    )

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rc.save(out / CONFIG_FILE)
    save_view_model(vm1, out)
    save_view_model(vm2, out)
    save_pca(pca, out)
    write_log(history, out / "log.csv")
    logger.info(f"✅ Fine-tuning tamamlandı: {out}")


def cmd_cluster(args: argparse.Namespace, rc: RunConfig) -> None:
    model_dir = Path(args.model)
    vm1 = load_view_model(model_dir, "geometric")
    vm2 = load_view_model(model_dir, "functional")
    paths = _dataset_paths(args.data)
    fibersets = load_fibersets(paths)
    predictions = [predict(vm1, vm2, fs, seed=rc.seed, view=args.view) for fs in fibersets]

    out = Path(args.out)
    multi = len(paths) > 1
    for path, pred in zip(paths, predictions):
        save_prediction(pred, _target_dir(out, path, multi))
    rc.save(out / CONFIG_FILE)


def cmd_qb(args: argparse.Namespace, rc: RunConfig) -> None:
    if not rc.qb_threshold > 0:
        raise ConfigError("qb needs --threshold > 0 (mm)")
    paths = _dataset_paths(args.data)
    fibersets = load_fibersets(paths)
    out = Path(args.out)
    multi = len(paths) > 1
    for path, fs in zip(paths, fibersets):
        model = quickbundles(resample_all(fs.fibers, rc.n_points), rc.qb_threshold)
        pred = ClusterPrediction.from_labels(model.labels(fs.fiber_ids), model.n_clusters)
        save_prediction(pred, _target_dir(out, path, multi))
    rc.save(out / CONFIG_FILE)


def cmd_evaluate(args: argparse.Namespace, rc: RunConfig) -> None:
    methods = _parse_pred_flags(args.pred)
    paths = _dataset_paths(args.data)
    fibersets = load_fibersets(paths)
    multi = len(paths) > 1
    out = Path(args.out)

    tables = []
    plots = []
    for path, fs in zip(paths, fibersets):
        preds = {name: load_prediction(_target_dir(root, path, multi)) for name, root in methods.items()}
        tables.append(compare_methods(fs, preds, rc.n_points))
        if args.plot:
            plots.extend((pred, fs, out / "plots" / name / path.name) for name, pred in preds.items())

    write_report(pd.concat(tables, ignore_index=True), out)
    for pred, fs, directory in plots:
        plot_clusters(pred, fs, directory)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="run seed (varsayılan 0)")
    common.add_argument("--config", help="key=value config dosyası")
    common.add_argument("--out", required=True, help="çıktı dizini")
    common.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"))

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", nargs="+", required=True, help="dataset dizinleri veya dizin listesi (.txt)")

    parser = argparse.ArgumentParser(prog="dmvfc", description="Deep multi-view fiber clustering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="sentetik bundle üret")
    p.add_argument("--preset", choices=config.PRESETS)
    p.add_argument("--n-sets", type=int, default=1)
    p.add_argument("--n-geo-clusters", type=int)
    p.add_argument("--n-func-per-geo", type=int)
    p.add_argument("--fibers-per-cluster", type=int)
    p.add_argument("--geo-separation", type=float)
    p.add_argument("--geo-jitter", type=float)
    p.add_argument("--signal-length", type=int)
    p.add_argument("--func-base-freqs", help="virgülle ayrılmış frekanslar (Hz)")
    p.add_argument("--signal-noise-sd", type=float)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("split", parents=[common, data], help="subject düzeyinde train/test ayrımı")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("pretrain", parents=[common, data], help="iki görünüm için siamese pretraining")
    p.add_argument("--epochs", dest="pretrain_epochs", type=int)
    p.add_argument("--lr", dest="pretrain_lr", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--n-points", type=int)
    p.add_argument("--signal-len", type=int)
    p.add_argument("--pca-components", type=int)
    p.add_argument("--pairs-per-fiber", type=int)
    p.add_argument("--embedding-dim", type=int)
    p.set_defaults(handler=cmd_pretrain)

    p = sub.add_parser("finetune", parents=[common, data], help="collaborative fine-tuning")
    p.add_argument("--pretrained", required=True, help="pretrain çıktı dizini")
    p.add_argument("--k", type=int)
    p.add_argument("--epochs", dest="finetune_epochs", type=int)
    p.add_argument("--lr", dest="finetune_lr", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--pairs-per-fiber", type=int)
    p.set_defaults(handler=cmd_finetune)

    p = sub.add_parser("cluster", parents=[common, data], help="eğitilmiş modellerle tahmin")
    p.add_argument("--model", required=True, help="finetune çıktı dizini")
    p.add_argument("--view", choices=("fused", "geometric", "functional"), default="fused")
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("qb", parents=[common, data], help="QuickBundles baseline")
    p.add_argument("--threshold", dest="qb_threshold", type=float)
    p.add_argument("--n-points", type=int)
    p.set_defaults(handler=cmd_qb)

    p = sub.add_parser("evaluate", parents=[common, data], help="Pearson / α / ARI / NMI raporu")
    p.add_argument("--pred", action="append", required=True, help="name=dir (tekrarlanabilir)")
    p.add_argument("--plot", action="store_true", help="cluster başına PNG")
    p.add_argument("--n-points", type=int)
    p.set_defaults(handler=cmd_evaluate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=args.log_level or config.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        torch.set_num_threads(config.resolve_threads(config.THREADS))
        rc = _run_config(args)
        args.handler(args, rc)
    except ConfigError as e:
        logger.error(f"❌ {e}")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (DMVFCError, OSError) as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
