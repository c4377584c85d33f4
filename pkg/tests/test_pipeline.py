import numpy as np
import pytest

from newsmarket.config import RunConfig, apply_overrides, load_config
from newsmarket.indicators import REPORT_METHODS, IndicatorParams
from newsmarket.pipeline import compare_methods
from newsmarket.synth import SynthConfig, random_walk_prices, synth_corpus


@pytest.fixture(scope="module")
def small():
    rng = np.random.default_rng(5)
    prices = random_walk_prices(rng, n_days=200)
    return prices, synth_corpus(rng, prices, SynthConfig(n_docs=200))


def test_defaults():
    cfg = RunConfig()
    assert cfg.methods == list(REPORT_METHODS) and len(cfg.methods) == 10
    assert (cfg.min_count, cfg.top_k, cfg.knn_k, cfg.folds) == (30, 300, 5, 10)
    assert cfg.params_for("rsi") == IndicatorParams()


def test_load_config(tmp_path):
    (tmp_path / "p.csv").write_text("date,close\n2011-01-03,1\n")
    path = tmp_path / "run.ini"
    path.write_text("[run]\nprices = p.csv\nmethods = rsi, momentum\ntop_k = 50\n"
                    "rmse_variant = standard\n\n[method.rsi]\nn = 9\nalpha = 0.3\n"
                    "[method.momentum]\nwalk-length = 2\n")
    cfg = load_config(path).validate()
    assert cfg.prices == tmp_path / "p.csv"
    assert cfg.methods == ["rsi", "momentum"] and cfg.top_k == 50
    assert cfg.params_for("rsi") == IndicatorParams(n=9, alpha=0.3)
    assert cfg.params_for("momentum").L == 2
    assert apply_overrides(cfg, top_k=None, knn_k=3).knn_k == 3
    assert apply_overrides(cfg, top_k=None).top_k == 50


@pytest.mark.parametrize("bad", ["[run]\nknn_k = 0\n", "[run]\nmethods = stochastic\n",
                                 "[method.rsi]\nwidth = 3\n", "[run]\nprices = missing.csv\n"])
def test_invalid_config(tmp_path, bad):
    path = tmp_path / "run.ini"
    path.write_text(bad)
    with pytest.raises((ValueError, FileNotFoundError)):
        load_config(path).validate()


def test_compare_methods_order_and_echo(small):
    prices, docs = small
    comp = compare_methods(docs, prices, RunConfig(methods=["rsi", "random_walk", "bollinger"]))
    assert [r.method for r in comp.reports] == ["rsi", "random_walk", "bollinger"]
    echo = comp.reports[2].params
    assert echo["base_method"] == "bollinger" and echo["n"] == 20 and echo["band"] == "middle"
    assert echo["knn_k"] == 5 and echo["folds"] == 10
    for r in comp.reports:
        assert r.n_instances == 200
        assert any(f.startswith("only ") for f in r.flags)


def test_failed_method_is_recorded(small):
    prices, docs = small
    cfg = RunConfig(methods=["random_walk", "bollinger"], method_params={"bollinger": IndicatorParams(n=500)},
                    knn_k=500)
    comp = compare_methods(docs, prices, cfg)
    assert len(comp.failures) == 2
    cfg = RunConfig(methods=["random_walk", "sma"], method_params={"sma": IndicatorParams(n=1000)})
    comp = compare_methods(docs, prices, cfg)
    assert [r.method for r in comp.reports] == ["random_walk", "sma"]


def test_parallel_matches_serial(small):
    prices, docs = small
    a = compare_methods(docs, prices, RunConfig(jobs=1)).reports
    b = compare_methods(docs, prices, RunConfig(jobs=4)).reports
    assert a == b
