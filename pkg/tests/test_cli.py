import json
import math

import pytest

from postedprice.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# myerson


def test_myerson_uniform(capsys):
    code, out, _ = run(capsys, "myerson", "--dist", "uniform:0,1")
    assert code == 0
    payload = json.loads(out)
    assert payload["p_star"] == pytest.approx(0.5, abs=1e-6)
    assert payload["h_star"] == pytest.approx(0.25, abs=1e-9)


def test_myerson_beta_oracle_value(capsys):
    code, out, _ = run(capsys, "myerson", "--dist", "beta:4,2")
    assert code == 0
    assert json.loads(out)["h_star"] == pytest.approx(0.409648251967, abs=1e-9)


def test_malformed_dist_is_usage_error(capsys):
    code, _, err = run(capsys, "myerson", "--dist", "nope:1,2")
    assert code == 2
    assert "usage error" in err


def test_unknown_flag_is_usage_error(capsys):
    code, _, _ = run(capsys, "myerson", "--dist", "uniform:0,1", "--bogus")
    assert code == 2


def test_no_command_prints_usage(capsys):
    assert run(capsys)[0] == 2


# ---------------------------------------------------------------------------
# optimize


def test_optimize_beats_baseline(capsys):
    code, out, _ = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "0.8",
                       "--gb", "0.2", "--horizon", "2", "--starts", "6")
    assert code == 0
    payload = json.loads(out)
    assert payload["ratio"] > 1.0
    assert payload["value"] == pytest.approx(0.484033613445, abs=1e-6)
    assert payload["tree"]["horizon"] == 2
    assert payload["converged"] is True


def test_optimize_equal_rates_ratio_one(capsys):
    code, out, _ = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "0.5",
                       "--gb", "0.5", "--horizon", "2", "--starts", "6")
    assert code == 0
    assert json.loads(out)["ratio"] == pytest.approx(1.0, abs=1e-6)


def test_optimize_requires_horizon_or_tau(capsys):
    code, _, err = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "0.8",
                       "--gb", "0.2")
    assert code == 2 and "usage error" in err


def test_optimize_tau_mode_reports_bounds(capsys):
    code, out, _ = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "0.8",
                       "--gb", "0.2", "--tau", "2", "--starts", "6")
    assert code == 0
    payload = json.loads(out)
    assert payload["opt_lower"] <= payload["opt_upper"]
    assert payload["opt_upper"] == pytest.approx(
        payload["opt_lower"] + 0.8**2 / 0.2 * 0.5)


def test_optimize_regularity_violation_is_domain_error(capsys):
    golden = (math.sqrt(5) - 1) / 2
    code, _, err = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "0.9",
                       "--gb", f"{golden!r}", "--horizon", "3", "--starts", "2")
    assert code == 3
    assert "not regular" in err


def test_perturb_restores_regularity(capsys):
    golden = (math.sqrt(5) - 1) / 2
    code, out, _ = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "0.9",
                       "--gb", f"{golden!r}", "--horizon", "3", "--starts", "2",
                       "--perturb")
    assert code == 0
    assert json.loads(out)["value"] > 0


def test_rate_out_of_range_is_usage_error(capsys):
    code, _, _ = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "1.2",
                     "--gb", "0.2", "--horizon", "2")
    assert code == 2


# ---------------------------------------------------------------------------
# sweep


def test_sweep_finite_mode(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--dist", "uniform:0,1", "--fix", "gs",
                     "--fixed-value", "0.8", "--grid-start", "0.1",
                     "--grid-step", "0.05", "--grid-count", "12",
                     "--horizon", "2", "--starts", "6", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == "gb,e,0,1,value,ratio"
    assert len(lines) == 13
    rows = [line.split(",") for line in lines[1:]]
    ratios = [float(r[-1]) for r in rows]
    assert all(r > 1.0 for r in ratios)
    # prices vary continuously along the grid
    for col in range(1, 4):
        prices = [float(r[col]) for r in rows]
        assert max(abs(a - b) for a, b in zip(prices, prices[1:])) < 0.05


def test_sweep_empty_grid_writes_header_only(tmp_path, capsys):
    out_file = tmp_path / "empty.csv"
    code, _, _ = run(capsys, "sweep", "--dist", "uniform:0,1", "--fix", "gs",
                     "--fixed-value", "0.8", "--grid-count", "0",
                     "--horizon", "2", "--out", str(out_file))
    assert code == 0
    assert out_file.read_text() == "gb,e,0,1,value,ratio\n"


def test_sweep_tau_mode_ratios_monotone(tmp_path, capsys):
    out_file = tmp_path / "tau.csv"
    code, _, _ = run(capsys, "sweep", "--dist", "uniform:0,1", "--fix", "gs",
                     "--fixed-value", "0.8", "--grid-start", "0.2",
                     "--grid-step", "0.1", "--grid-count", "2",
                     "--tau-list", "2,3,4", "--starts", "6", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    header = lines[0].split(",")
    assert header[0] == "gb"
    assert "ratio_tau2" in header and "ratio_tau4" in header
    for line in lines[1:]:
        row = dict(zip(header, line.split(",")))
        assert float(row["ratio_tau2"]) <= float(row["ratio_tau3"]) + 1e-6
        assert float(row["ratio_tau3"]) <= float(row["ratio_tau4"]) + 1e-6
        assert float(row["ratio_tau4"]) > 1.0


def test_sweep_determinism(tmp_path, capsys):
    args = ("sweep", "--dist", "uniform:0,1", "--fix", "gb", "--fixed-value",
            "0.2", "--grid-start", "0.3", "--grid-step", "0.1", "--grid-count",
            "3", "--horizon", "2", "--starts", "6", "--seed", "7")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_grid_outside_unit_interval_is_usage_error(capsys):
    code, _, _ = run(capsys, "sweep", "--dist", "uniform:0,1", "--fix", "gs",
                     "--fixed-value", "0.8", "--grid-start", "0.9",
                     "--grid-step", "0.1", "--grid-count", "3", "--horizon", "2")
    assert code == 2


def test_sweep_unwritable_path_is_io_error(capsys):
    code, _, err = run(capsys, "sweep", "--dist", "uniform:0,1", "--fix", "gs",
                       "--fixed-value", "0.8", "--grid-count", "0", "--horizon",
                       "2", "--out", "/nonexistent-dir/x.csv")
    assert code == 4
    assert "I/O" in err


# ---------------------------------------------------------------------------
# simulate


def write_tree(path, horizon, prices):
    path.write_text(json.dumps({"horizon": horizon, "prices": prices}))


def test_simulate_constant_tree(tmp_path, capsys):
    tree_file = tmp_path / "tree.json"
    write_tree(tree_file, 2, {"": 0.5, "0": 0.5, "1": 0.5})
    code, out, _ = run(capsys, "simulate", "--tree", str(tree_file), "--dist",
                       "uniform:0,1", "--gs", "0.5", "--gb", "0.5",
                       "--grid-size", "21", "--out", str(tmp_path / "sim.csv"))
    assert code == 0
    expected = (1 + 0.5) * 0.25  # Gamma^S at horizon 2 times H*
    assert json.loads(out)["expected_revenue"] == pytest.approx(expected, abs=1e-6)
    lines = (tmp_path / "sim.csv").read_text().splitlines()
    assert lines[0] == "v,strategy,S,R,Q"
    assert len(lines) == 22
    first = lines[1].split(",")
    assert first[1] == "00"  # v=0 rejects everything
    last = lines[-1].split(",")
    assert last[1] == "11"


def test_simulate_rejects_negative_price_tree(tmp_path, capsys):
    tree_file = tmp_path / "bad.json"
    write_tree(tree_file, 2, {"": 0.5, "0": -0.1, "1": 0.5})
    code, _, err = run(capsys, "simulate", "--tree", str(tree_file), "--dist",
                       "uniform:0,1", "--gs", "0.5", "--gb", "0.5")
    assert code == 3
    assert "/prices/0" in err


def test_simulate_rejects_incomplete_tree(tmp_path, capsys):
    tree_file = tmp_path / "bad.json"
    write_tree(tree_file, 2, {"": 0.5, "0": 0.5})
    code, _, err = run(capsys, "simulate", "--tree", str(tree_file), "--dist",
                       "uniform:0,1", "--gs", "0.5", "--gb", "0.5")
    assert code == 3


def test_simulate_missing_file_is_io_error(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "--tree", str(tmp_path / "none.json"),
                     "--dist", "uniform:0,1", "--gs", "0.5", "--gb", "0.5")
    assert code == 4


# ---------------------------------------------------------------------------
# bigdeal / truncate


def test_bigdeal_revenue(capsys):
    code, out, _ = run(capsys, "bigdeal", "--dist", "uniform:0,1", "--gb", "0.5",
                       "--gs", "0.5", "--tau", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["expected_revenue"] == pytest.approx(0.5, abs=1e-9)
    assert payload["first_price"] == pytest.approx(1.0, abs=1e-6)
    assert payload["penalty_price"] == pytest.approx(2.0, abs=1e-6)


def test_truncate_outputs_weights(capsys):
    code, out, _ = run(capsys, "truncate", "--gb", "0.5", "--gs", "0.8",
                       "--tau", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["buyer_weights"] == pytest.approx([1.0, 1.0])
    assert payload["seller_weights"] == pytest.approx([1.0, 4.0])
    assert payload["seller_tail"] == pytest.approx(0.8**2 / 0.2)


# ---------------------------------------------------------------------------
# config file


def test_config_supplies_defaults_and_flags_override(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"dist": "uniform:0,1", "gs": 0.8, "gb": 0.2,
                                  "horizon": 2, "starts": 6}))
    code, out, _ = run(capsys, "optimize", "--config", str(config))
    assert code == 0
    assert json.loads(out)["gb"] == 0.2
    code, out, _ = run(capsys, "optimize", "--config", str(config), "--gb", "0.3")
    assert code == 0
    assert json.loads(out)["gb"] == 0.3


def test_json_output_deterministic(capsys):
    args = ("optimize", "--dist", "uniform:0,1", "--gs", "0.7", "--gb", "0.3",
            "--horizon", "2", "--starts", "6", "--seed", "3")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_sweep_full_fig_protocol_row_count_and_continuity(tmp_path, capsys):
    # the two-round protocol: gs fixed at 0.8, gb on 0.01 + i*0.005, i < 149
    out_file = tmp_path / "protocol.csv"
    code, _, _ = run(capsys, "sweep", "--dist", "uniform:0,1", "--fix", "gs",
                     "--fixed-value", "0.8", "--grid-start", "0.01",
                     "--grid-step", "0.005", "--grid-count", "149",
                     "--horizon", "2", "--starts", "4", "--out", str(out_file))
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert len(lines) == 150
    rows = [line.split(",") for line in lines[1:]]
    assert float(rows[0][0]) == pytest.approx(0.01)
    assert float(rows[-1][0]) == pytest.approx(0.75)
    for col in range(1, 4):  # each node price moves continuously in gb
        prices = [float(r[col]) for r in rows]
        assert max(abs(a - b) for a, b in zip(prices, prices[1:])) < 0.05
    assert all(float(r[-1]) > 1.0 for r in rows)


def test_rate_order_warning_does_not_fail(capsys, recwarn):
    code, out, _ = run(capsys, "optimize", "--dist", "uniform:0,1", "--gs", "0.2",
                       "--gb", "0.8", "--horizon", "2", "--starts", "4")
    assert code == 0
    assert json.loads(out)["value"] > 0
