import csv
import io
import math
import re
import subprocess
import sys

import pytest
import yaml

from noisytele import cli


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else yaml.safe_dump(doc), encoding="utf-8")
    return str(path)


def _values(out, prefix):
    """(F, Delta) from the first report line starting with ``prefix``."""
    line = next(l for l in out.splitlines() if l.startswith(prefix))
    m = re.search(r"F = ([^,]+), Delta = (\S+)", line)
    return float(m.group(1)), float(m.group(2))


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def pure09(tmp_path):
    return _write(tmp_path, "pure.yaml", {"pure": {"a": math.sqrt(0.9)}})


class TestAnalyze:
    def test_worked_example(self, capsys, pure09):
        code, out, _ = _run(capsys, "analyze", pure09, "--p", f"{1 - 0.3 - 1 / 60},0.15,0.15,{1 / 60}")
        assert code == 0
        F, D = _values(out, "strategy")
        assert F == pytest.approx(0.7, abs=1e-6) and D <= 1e-10
        assert "non-classical (F > 2/3): yes" in out
        assert "dispersion-free" in out and ": yes" in out.split("dispersion-free")[1].splitlines()[0]

    def test_werner_noiseless(self, capsys, tmp_path):
        path = _write(tmp_path, "w.yaml", {"state": {"werner": {"epsilon": 0.5}}})
        code, out, _ = _run(capsys, "analyze", path)
        F, D = _values(out, "strategy")
        assert code == 0 and F == pytest.approx(0.75, abs=1e-6) and D <= 1e-10

    def test_dense_maximally_mixed(self, capsys, tmp_path):
        entries = [[0.25 if i == j else 0.0, 0.0] for i in range(4) for j in range(4)]
        path = _write(tmp_path, "d.yaml", {"dense": {"matrix": entries}})
        code, out, _ = _run(capsys, "analyze", path, "--p", "0.6,0.2,0.15,0.05")
        F, D = _values(out, "strategy")
        assert code == 0 and F == pytest.approx(0.5, abs=1e-6) and D <= 1e-10
        assert "non-classical (F > 2/3): no" in out
        assert "not applicable" in out  # the conditions are out of scope for det T = 0

    def test_model_II(self, capsys, pure09):
        code, out, _ = _run(capsys, "analyze", pure09, "--eta", "0.9", "--eta-prime", "0.8")
        assert code == 0 and "Model II" in out and "Model I image" in out

    def test_named_strategy(self, capsys, pure09):
        code, out, _ = _run(capsys, "analyze", pure09, "--strategy", "table4")
        assert code == 0 and "strategy table4:" in out


class TestInputErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = _run(capsys, "analyze", str(tmp_path / "nope.yaml"))
        assert code == 1 and "cannot read" in err

    def test_yaml_syntax(self, capsys, tmp_path):
        path = _write(tmp_path, "bad.yaml", "pure: {a: [1,\n")
        code, _, err = _run(capsys, "analyze", path)
        assert code == 1 and "line" in err

    def test_two_kinds(self, capsys, tmp_path):
        path = _write(tmp_path, "two.yaml", {"pure": {"a": 0.9}, "werner": {"epsilon": 0.5}})
        code, _, err = _run(capsys, "analyze", path)
        assert code == 1 and "exactly one" in err

    def test_field_type(self, capsys, tmp_path):
        path = _write(tmp_path, "t.yaml", {"pure": {"a": "big"}})
        code, _, err = _run(capsys, "analyze", path)
        assert code == 1 and "pure.a" in err

    def test_parameter_range(self, capsys, tmp_path):
        path = _write(tmp_path, "r.yaml", {"werner": {"epsilon": 1.5}})
        code, _, _ = _run(capsys, "analyze", path)
        assert code == 1

    @pytest.mark.parametrize(
        "flags",
        [("--p", "0.5,0.5,0.5,0"), ("--p", "a,b"), ("--eta", "0.9"), ("--p", "1,0,0,0", "--eta", "0.9", "--eta-prime", "1"),
         ("--strategy", "bogus")],
    )
    def test_bad_channel_flags(self, capsys, pure09, flags):
        code, _, err = _run(capsys, "analyze", pure09, *flags)
        assert code == 1 and err.startswith("error:")

    def test_unknown_command(self, capsys):
        assert _run(capsys, "frobnicate")[0] == 1

    def test_verify_sample_floor(self, capsys, pure09):
        code, _, err = _run(capsys, "verify", pure09, "--samples", "10")
        assert code == 1 and "at least 1000" in err


class TestSweep:
    def _sweep(self, tmp_path):
        return _write(tmp_path, "s.yaml", {
            "variable": "concurrence", "range": [0.5, 0.8, 31], "channel": {"p": [0.6, 0.2, 0.15, 0.05]},
        })

    def test_csv_content(self, capsys, tmp_path):
        code, out, _ = _run(capsys, "sweep", self._sweep(tmp_path))
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["concurrence", "F", "Delta", "nonClassical"]
        assert len(rows) == 32
        flags = [int(r[3]) for r in rows[1:]]
        xs = [float(r[0]) for r in rows[1:]]
        first = xs[flags.index(1)]
        assert 0.63 <= first <= 0.645 and flags == sorted(flags)
        for x, F in ((float(r[0]), float(r[1])) for r in rows[1:]):
            assert F == pytest.approx((1.65 + 0.55 * x) / 3, abs=1e-11)

    def test_deterministic_file_output(self, capsys, tmp_path):
        spec = self._sweep(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert _run(capsys, "sweep", spec, "--out", str(a))[0] == 0
        assert _run(capsys, "sweep", spec, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes() and b"\r\n" not in a.read_bytes()

    @pytest.mark.parametrize(
        "doc",
        [
            {"variable": "epsilon", "range": [0.4, 1.0, 13]},
            {"variable": "p0", "range": [0.25, 1.0, 16], "channel": {"p": [0.7, 0.1, 0.1, 0.1]},
             "state": {"werner": {"epsilon": 0.8}}},
            {"variable": "eta", "range": [0.5, 1.0, 11], "channel": {"eta": 1, "eta_prime": 0.9},
             "state": {"pure": {"a": 0.9}}},
        ],
    )
    def test_other_variables(self, capsys, tmp_path, doc):
        code, out, _ = _run(capsys, "sweep", _write(tmp_path, "s.yaml", doc))
        assert code == 0 and len(out.strip().splitlines()) == doc["range"][2] + 1

    @pytest.mark.parametrize(
        "doc, message",
        [
            ({"variable": "temperature", "range": [0, 1, 3]}, "variable"),
            ({"variable": "epsilon", "range": [1, 0.5, 3]}, "lo < hi"),
            ({"variable": "epsilon", "range": [0.5, 1, 1]}, "at least 2"),
            ({"variable": "p0", "range": [0.5, 1, 3]}, "state"),
        ],
    )
    def test_bad_sweeps(self, capsys, tmp_path, doc, message):
        code, _, err = _run(capsys, "sweep", _write(tmp_path, "s.yaml", doc))
        assert code == 1 and message in err


class TestOtherCommands:
    def test_verify_passes(self, capsys, tmp_path):
        path = _write(tmp_path, "t.yaml", {"tdiag": {"t": [-0.7, -0.5, -0.3]}})
        code, out, _ = _run(capsys, "verify", path, "--p", "0.6,0.2,0.15,0.05", "--samples", "20000", "--seed", "3")
        assert code == 0 and out.count("pass") == 2

    def test_optimize_cost(self, capsys, pure09):
        code, out, _ = _run(capsys, "optimize-cost", pure09)
        assert code == 0 and "status: solved" in out and "cost: 0.364738 bits" in out
        code, out, _ = _run(capsys, "optimize-cost", pure09, "--model", "II")
        assert code == 0 and "Model II" in out

    def test_optimize_cost_infeasible(self, capsys, tmp_path):
        path = _write(tmp_path, "w.yaml", {"werner": {"epsilon": 0.3}})
        code, out, _ = _run(capsys, "optimize-cost", path)
        assert code == 2 and "infeasible" in out

    def test_find_channel(self, capsys, pure09):
        code, out, _ = _run(capsys, "find-channel", pure09, "--p1", "0.15", "--p2", "0.15")
        assert code == 0 and "0.0166667" in out and "F = 0.7" in out

    def test_find_channel_infeasible(self, capsys, pure09):
        code, out, _ = _run(capsys, "find-channel", pure09, "--p1", "0.5")
        assert code == 2 and "p0 = -0.833333 < 0" in out


def test_module_entry_point(pure09):
    proc = subprocess.run([sys.executable, "-m", "noisytele", "analyze", pure09], capture_output=True, text=True)
    assert proc.returncode == 0 and "canonical form" in proc.stdout
