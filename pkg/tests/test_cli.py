"""Command-line interface: instance files, CSV reports, exit codes."""

import csv
import io
import os
import subprocess
import sys

import numpy as np
import pytest

from altproj import InstanceSpec, ParseError
from altproj import cli
from altproj.acceptance import CriterionResult
from altproj.cli import main, parse_instance_text, serialize_instance

LINES = "altproj-instance v1\nkind two_lines\ntheta 1.0471975511965976\n"

BLOCKS12 = "altproj-instance v1\nkind block_aligned\nk_blocks 12\nangle_rule 1/k\n"

MIX = (
    "altproj-instance v1\n"
    "kind convex_combination\n"
    "weights 0.25 0.75\n"
    "component two_lines theta=0.9\n"
    "component two_lines theta=1.3\n"
)

SPECS = [
    InstanceSpec("two_lines", {"theta": np.pi / 3}),
    InstanceSpec("random", {"d": 6, "dims": (2, 3)}, seed=11),
    InstanceSpec("block_aligned", {"k_blocks": 12, "angle_rule": "1/k"}),
    InstanceSpec("block_aligned", {"k_blocks": 2, "angle_rule": (0.9, 0.3)}),
    InstanceSpec(
        "convex_combination",
        {
            "components": (
                {"kind": "two_lines", "parameters": {"theta": 0.9}},
                {"kind": "block_aligned", "parameters": {"k_blocks": 1, "angle_rule": "1/k"}},
                {"kind": "random", "parameters": {"d": 2, "dims": (1, 1)}, "seed": 5},
            ),
            "weights": (0.5, 0.25, 0.25),
        },
    ),
]


def _path(tmp_path, text, name="inst.txt"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


@pytest.mark.parametrize("spec", SPECS, ids=[s.kind for s in SPECS])
def test_serialize_parse_round_trip(spec):
    text = serialize_instance(spec)
    assert serialize_instance(parse_instance_text(text)) == text


def test_canonical_two_lines_text():
    assert serialize_instance(SPECS[0]) == LINES


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("kind two_lines\ntheta 1.0\n", "version header"),
        ("", "version header"),
        ("altproj-instance v1\nkind pentagon\n", "unknown kind"),
        ("altproj-instance v1\nkind two_lines\n", "is required"),
        ("altproj-instance v1\nkind two_lines\ntheta abc\n", "needs a number"),
        ("altproj-instance v1\nkind two_lines\ntheta 1.0\ntheta 2.0\n", "duplicate field"),
        ("altproj-instance v1\nkind two_lines\ntheta 1.0\nspin 3\n", "unknown field"),
        (LINES + "component two_lines theta=1.0\n", "only valid"),
        ("altproj-instance v1\nkind random\nseed 1\nd x\ndims 2 2\n", "needs an integer"),
        ("altproj-instance v1\nkind random\nseed 1\nd 4\ndims 2\n", "at least two ranks"),
        (
            "altproj-instance v1\nkind convex_combination\nweights 0.5 0.5\n"
            "component two_lines theta=1.0\n",
            "weights for",
        ),
        ("altproj-instance v1\nkind block_aligned\nk_blocks 3\nangle_rule cubic\n", "angle_rule"),
        # structurally fine, semantically impossible: surfaces as a parse error
        ("altproj-instance v1\nkind two_lines\ntheta 0.0\n", "invalid parameters"),
    ],
)
def test_parse_errors_name_the_problem(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_instance_text(text)


def test_geometry_command_writes_deterministic_csv(tmp_path, capsys):
    inst = _path(tmp_path, LINES)
    out_a = str(tmp_path / "a.csv")
    out_b = str(tmp_path / "b.csv")
    assert main(["geometry", "--instance", inst, "--seed", "7", "--out", out_a]) == 0
    assert "c = 0.5" in capsys.readouterr().out
    assert main(["geometry", "--instance", inst, "--seed", "7", "--out", out_b]) == 0
    with open(out_a, "rb") as fa, open(out_b, "rb") as fb:
        assert fa.read() == fb.read()
    rows = _rows(open(out_a).read())
    assert rows[0] == ["N", "c", "ell2", "ell2_direct", "iota2", "ell_est",
                       "iota_est", "theta0", "rate_base"]
    record = dict(zip(rows[0], rows[1]))
    assert record["N"] == "2"
    assert float(record["c"]) == pytest.approx(0.5, abs=1e-12)
    assert float(record["ell2"]) == pytest.approx(np.sqrt(0.5), abs=1e-12)
    assert float(record["theta0"]) == pytest.approx(1.122963929865964, abs=1e-12)


def test_iterate_follows_the_two_line_law(tmp_path, capsys):
    inst = _path(tmp_path, LINES)
    assert main(["iterate", "--instance", inst, "--n-max", "12"]) == 0
    captured = capsys.readouterr()
    assert "final error" in captured.err
    rows = _rows(captured.out)
    assert rows[0] == ["n", "error", "bound_c", "bound_iota2"]
    data = rows[1:]
    assert len(data) == 13
    assert float(data[0][1]) == pytest.approx(1.0, abs=1e-12)
    for n in range(1, 13):
        # canonical start on the first line: errors follow cos(theta)^(2n-1)
        assert float(data[n][1]) == pytest.approx(0.5 ** (2 * n - 1), abs=1e-12)
        assert float(data[n][2]) >= float(data[n][1]) - 1e-9


def test_numrange_reports_containment(tmp_path, capsys):
    inst = _path(tmp_path, LINES)
    assert main(["numrange", "--instance", inst, "--angles", "64"]) == 0
    captured = capsys.readouterr()
    assert "contained" in captured.err and "NOT" not in captured.err
    rows = _rows(captured.out)
    assert rows[0] == ["phi", "h", "re_z", "im_z", "in_omega", "in_stolz", "margin"]
    assert len(rows) == 65
    assert all(r[4] == "1" and r[5] == "1" for r in rows[1:])


def test_numrange_accepts_convex_combinations(tmp_path):
    inst = _path(tmp_path, MIX)
    assert main(["numrange", "--instance", inst, "--angles", "32"]) == 0


def test_ritt_sections(tmp_path, capsys):
    inst = _path(tmp_path, LINES)
    assert main(["ritt", "--instance", inst, "--n-max", "20"]) == 0
    rows = _rows(capsys.readouterr().out)[1:]
    power = [r for r in rows if r[0] == "power"]
    resolvent = [r for r in rows if r[0] == "resolvent"]
    assert len(power) == 20 and len(resolvent) == 10
    assert power[0][1] == "1"
    assert resolvent[0][1] == "1.5"  # radii 1 + 2^-k, k = 1..10
    assert all(float(r[2]) >= 0.0 for r in rows)


def test_fracpow_reports_slopes_per_alpha(tmp_path, capsys):
    inst = _path(tmp_path, BLOCKS12)
    assert main(["fracpow", "--instance", inst, "--alpha", "0.5,1.0",
                 "--n-max", "200", "--seed", "3"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["alpha", "window", "slope", "sup_n_alpha_e_n"]
    assert [r[0] for r in rows[1:]] == ["0.5", "1"]
    assert all(r[1] == "20:200" for r in rows[1:])
    assert all(float(r[3]) > 0.0 for r in rows[1:])


def test_slowvec_sections_and_norm_note(tmp_path, capsys):
    spec = InstanceSpec("block_aligned", {"k_blocks": 400, "angle_rule": "1/k"})
    inst = _path(tmp_path, serialize_instance(spec))
    assert main(["slowvec", "--instance", inst, "--n-max", "400", "--eps", "0.5"]) == 0
    captured = capsys.readouterr()
    assert "||x||" in captured.err
    rows = _rows(captured.out)[1:]
    counts = {}
    for r in rows:
        counts[r[0]] = counts.get(r[0], 0) + 1
    assert counts == {"vector": 800, "target": 401, "error": 401}


def test_slowvec_infeasible_horizon_exits_4(tmp_path, capsys):
    inst = _path(tmp_path, BLOCKS12)
    out = str(tmp_path / "slow.csv")
    assert main(["slowvec", "--instance", inst, "--n-max", "1000", "--out", out]) == 4
    assert "smallest sufficient K: 144" in capsys.readouterr().err
    assert not os.path.exists(out)


def test_slowvec_rejects_other_instance_kinds(tmp_path):
    inst = _path(tmp_path, LINES)
    assert main(["slowvec", "--instance", inst]) == 2


def test_iterate_needs_a_subspace_family(tmp_path, capsys):
    inst = _path(tmp_path, MIX)
    assert main(["iterate", "--instance", inst]) == 2
    assert "no subspace family" in capsys.readouterr().err


def test_malformed_instance_exits_2_without_output(tmp_path):
    inst = _path(tmp_path, "altproj-instance v1\nkind two_lines\n")
    out = str(tmp_path / "geo.csv")
    assert main(["geometry", "--instance", inst, "--seed", "1", "--out", out]) == 2
    assert not os.path.exists(out)


def test_missing_instance_file_exits_2(tmp_path):
    missing = str(tmp_path / "nope.txt")
    assert main(["geometry", "--instance", missing, "--seed", "1"]) == 2


def test_unwritable_output_exits_2(tmp_path):
    inst = _path(tmp_path, LINES)
    out = str(tmp_path / "no" / "dir" / "x.csv")
    assert main(["iterate", "--instance", inst, "--n-max", "2", "--out", out]) == 2


def test_bad_flags_exit_2(tmp_path):
    inst = _path(tmp_path, LINES)
    assert main(["geometry", "--instance", inst]) == 2  # --seed is required
    assert main(["suite", "--criteria", "0,5"]) == 2  # 0 is not a criterion id
    assert main(["iterate", "--instance", inst, "--n-max", "0"]) == 2
    assert main(["fracpow", "--instance", inst, "--alpha", "-1", "--seed", "1"]) == 2


def test_suite_subset_passes_and_writes_summary(tmp_path, capsys):
    out = str(tmp_path / "suite.csv")
    assert main(["suite", "--criteria", "1,11", "--out", out]) == 0
    stdout = capsys.readouterr().out
    assert "criterion 01 two_subspace_law: PASS" in stdout
    assert "criterion 11 stolz_angle_recursion: PASS" in stdout
    assert "2/2 criteria passed" in stdout
    rows = _rows(open(out).read())
    assert rows[0] == ["cid", "name", "passed", "detail"]
    assert [(r[0], r[2]) for r in rows[1:]] == [("1", "1"), ("11", "1")]


def test_suite_failure_exits_3(monkeypatch, capsys):
    def fake(pool=None, ids=None):
        yield CriterionResult(cid=1, name="two_subspace_law", passed=True, detail="ok")
        yield CriterionResult(cid=2, name="exponential_rate_bounds", passed=False,
                              detail="bound exceeded")
    monkeypatch.setattr(cli, "iter_results", fake)
    assert main(["suite"]) == 3
    stdout = capsys.readouterr().out
    assert "FAIL" in stdout
    assert "1/2 criteria passed" in stdout


def test_help_exits_zero_and_documents_exit_codes(capsys):
    assert main(["--help"]) == 0
    assert "exit codes" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "altproj.cli", "--help"],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert "geometry" in proc.stdout and "suite" in proc.stdout
