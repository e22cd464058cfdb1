import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrnn.config import RunConfig, load_config, parse_items, read_pairs
from lrnn.errors import ConfigError


def test_file_and_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("example = 3  # nested\nm = 64\nbeta = 1, 2, 3, 4\nsampling.N = 900\nsolver.method = qr\n")
    cfg = load_config(p, [("m", "32"), ("gamma.dirichlet", "0")])
    assert (cfg.example, cfg.m, cfg.N, cfg.solver) == (3, 32, 900, "qr")
    assert cfg.beta == (1.0, 2.0, 3.0, 4.0)
    assert cfg.gamma_dirichlet == 0.0 and cfg.gamma == 50.0


def test_defaults():
    cfg = RunConfig()
    assert (cfg.gamma, cfg.h1, cfg.h2, cfg.rcond, cfg.trials, cfg.solver) == (50.0, 1e-6, 5e-4, 1e-12, 10, "svd")


@pytest.mark.parametrize("text", ["nonsense", "bogus.key = 1", "m = ten", "trials = 0", "error.rule = simpson",
                                  "assembly.flux_beta = maybe", "grid.resolution = 1"])
def test_bad_input(text):
    with pytest.raises(ConfigError):
        RunConfig(**parse_items(read_pairs(text)))


def test_round_trip():
    cfg = RunConfig(example=5, beta=(1.0, 3.5), ratios=(14, 3, 3), gamma_flux=10.0, flux_beta=False, dump_system="s.bin")
    assert RunConfig(**parse_items(cfg.to_items())) == cfg


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-300, 1e300), st.integers(1, 10_000), st.floats(1e-9, 1e-1))
def test_round_trip_floats(gamma, m, h2):
    cfg = RunConfig(gamma=gamma, m=m, h2=h2)
    assert RunConfig(**parse_items(cfg.to_items())) == cfg
