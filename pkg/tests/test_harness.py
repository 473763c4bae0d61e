from __future__ import annotations

import json

import pytest

from doflab.harness import (
    SCHEMA,
    ExperimentConfig,
    TrialLog,
    ratio_greater,
    replay_trial,
    run_experiment,
    run_trial,
    splitmix64,
    trial_seed,
)


def test_splitmix_reference():
    # first outputs of the reference splitmix64 generator seeded with 0
    state = 0
    outs = []
    for _ in range(3):
        outs.append(splitmix64(state))
        state = (state + 0x9E3779B97F4A7C15) & (2**64 - 1)
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_trial_seeds_distinct():
    seeds = {trial_seed(5, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert trial_seed(5, 0) != trial_seed(6, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(checks=())
    with pytest.raises(ValueError):
        ExperimentConfig(checks=("nonsense",))
    with pytest.raises(ValueError):
        ExperimentConfig(fmt="xml")
    cfg = ExperimentConfig(scheme="random", trials=3, complexities=(1,))
    assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_gmk_1000_trials():
    log = run_experiment(ExperimentConfig(scheme="gmk", trials=1000, base_seed=1))
    for name in ("condi1", "condi2", "condi3", "condi4", "eq4.1.1", "eq4.2.2"):
        assert log.count(name) == 1000
    assert log.aggregates["findings"] == 0
    assert len({t["realization_hash"] for t in log.trials}) == 1000


def test_byte_identical_logs(tmp_path):
    cfg = ExperimentConfig(scheme="random", trials=40, base_seed=99)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.to_json() == b.to_json()
    assert a.to_csv() == b.to_csv()
    a.write(tmp_path / "a.json")
    assert TrialLog.load(tmp_path / "a.json").to_json() == a.to_json()


def test_parallel_matches_serial():
    cfg = ExperimentConfig(scheme="random", trials=24, base_seed=4)
    assert run_experiment(cfg, workers=2).to_json() == run_experiment(cfg, workers=1).to_json()


def test_trial_independence():
    big = run_experiment(ExperimentConfig(scheme="random", trials=30, base_seed=8))
    small = run_experiment(ExperimentConfig(scheme="random", trials=10, base_seed=8))
    assert big.trials[:10] == small.trials
    assert run_trial(ExperimentConfig(scheme="random", trials=30, base_seed=8), 17) == big.trials[17]


def test_replay():
    cfg = ExperimentConfig(scheme="random", trials=20, base_seed=3)
    log = run_experiment(cfg)
    rec, rep = replay_trial(cfg, 12)
    assert rec == log.trials[12]
    assert {k: c.to_dict() for k, c in rep.checks.items()} == rec["checks"]
    with pytest.raises(IndexError):
        replay_trial(cfg, 20)


def test_replay_wrong_seed_changes_hash():
    cfg = ExperimentConfig(scheme="gmk", trials=5, base_seed=3)
    other = ExperimentConfig(scheme="gmk", trials=5, base_seed=4)
    assert replay_trial(cfg, 2)[0]["realization_hash"] != replay_trial(other, 2)[0]["realization_hash"]


def test_adversarial_replay():
    cfg = ExperimentConfig(scheme="lemma6-probe", trials=3, base_seed=0, tamper="lemma6-adversary")
    log = run_experiment(cfg)
    assert log.aggregates["status_counts"]["lemma6.count"] == {"fail": 3}
    assert log.aggregates["failures"]["lemma6.count"] == [t["seed"] for t in log.trials]
    rec, rep = replay_trial(cfg, 1)
    assert rep["lemma6.count"].lhs == 1
    assert rec == log.trials[1]


def test_log_layout():
    log = run_experiment(ExperimentConfig(scheme="ratio-witness", trials=2))
    d = json.loads(log.to_json())
    assert d["schema"] == SCHEMA
    assert d["aggregates"]["max_ratio"]["pair"] == [3, 2]
    assert len(d["trials"]) == d["aggregates"]["trials"] == 2
    rows = log.to_csv().splitlines()
    assert rows[0] == "trial,seed,check,holds,lhs,rhs,status"
    assert len(rows) == 1 + sum(len(t["checks"]) for t in log.trials)
    with pytest.raises(ValueError):
        TrialLog.from_dict({**d, "schema": "other/0"})


def test_ratio_greater():
    assert ratio_greater([3, 2], [4, 3])
    assert not ratio_greater([6, 4], [3, 2])


def test_ic_configs():
    log = run_experiment(ExperimentConfig(scheme="ic-tdma", trials=6, checks=("ic3",)))
    assert log.count("ic.bound97") == 6
    log = run_experiment(ExperimentConfig(scheme="ic-random", trials=20, m=1, n=4, checks=("ic3",)))
    assert log.aggregates["findings"] == 0
    assert all(t["info"]["sizes"] == {"11": 1, "22": 1, "33": 1} for t in log.trials)
