"""Sentetik benchmark'larda uçtan uca kabul koşuları (yavaş; `pytest -m slow`)."""

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from encoder import build_encoder, functional_config, geometric_config
from geometry_kernels import quickbundles, resample_all
from inference_eval import ClusterPrediction, evaluate, predict, save_prediction
from synthetic import generate, preset
from training import TrainConfig, TrainingCorpus, train_dmvfc

pytestmark = pytest.mark.slow

SEED = 0
QB_GRID = (2.5, 5.0, 10.0, 20.0, 40.0)
REDUCED = dict(pretrain_epochs=30, finetune_epochs=10, batch_size=64)


def run_pipeline(fs, k, seed=SEED):
    corpus = TrainingCorpus.from_fibersets([fs], seed=seed)
    cfg = TrainConfig(k=k, seed=seed, **REDUCED)
    vm1, vm2 = train_dmvfc(
        corpus, build_encoder(geometric_config(), seed), build_encoder(functional_config(), seed + 1), cfg
    )
    return vm1, vm2


def qb_prediction(fs, threshold):
    model = quickbundles(resample_all(fs.fibers, 25), threshold)
    return ClusterPrediction.from_labels(model.labels(fs.fiber_ids), model.n_clusters)


@pytest.fixture(scope="module")
def easy_run():
    fs = generate(preset("easy", SEED))
    return fs, run_pipeline(fs, k=4)


def test_easy_preset_is_recovered(easy_run):
    fs, (vm1, vm2) = easy_run
    pred = predict(vm1, vm2, fs, seed=SEED)
    assert adjusted_rand_score(fs.true_labels, pred.labels) >= 0.9


def test_functional_view_adds_what_geometry_cannot():
    fs = generate(preset("func-only", SEED))
    vm1, vm2 = run_pipeline(fs, k=4)
    fused = predict(vm1, vm2, fs, seed=SEED)
    geometric = predict(vm1, vm2, fs, seed=SEED, view="geometric")
    fused_ari = adjusted_rand_score(fs.true_labels, fused.labels)
    geo_ari = adjusted_rand_score(fs.true_labels, geometric.labels)
    assert fused_ari >= geo_ari + 0.3

    dmvfc_pearson = evaluate(fused, fs).mean_pearson
    qb_pearson = [evaluate(qb_prediction(fs, t), fs).mean_pearson for t in QB_GRID]
    assert dmvfc_pearson > np.nanmax(qb_pearson)


def test_geometry_is_preserved():
    cfg = preset("geo-only", SEED)
    fs = generate(cfg)
    vm1, vm2 = run_pipeline(fs, k=cfg.k)
    dmvfc_alpha = evaluate(predict(vm1, vm2, fs, seed=SEED), fs).mean_alpha
    # kemerler arası mesafenin yarısı: QuickBundles dört geometrik cluster'ı ayırır
    qb = qb_prediction(fs, cfg.geo_separation / 2)
    assert qb.k == cfg.n_geo_clusters
    assert dmvfc_alpha <= 1.25 * evaluate(qb, fs).mean_alpha


def test_identical_seeds_give_identical_label_files(easy_run, tmp_path):
    fs, (vm1, vm2) = easy_run
    save_prediction(predict(vm1, vm2, fs, seed=SEED), tmp_path / "first")
    again1, again2 = run_pipeline(fs, k=4)
    save_prediction(predict(again1, again2, fs, seed=SEED), tmp_path / "second")
    assert (tmp_path / "first" / "labels.txt").read_bytes() == (tmp_path / "second" / "labels.txt").read_bytes()
