import json

import numpy as np
import pytest

from qspf import build_grid, forward_spf, inverse_spf, random_staircase_signal, synthesize_on_grid
from qspf.cli import (
    CliError,
    descriptor_from_grid,
    format_coefficients_csv,
    grid_from_descriptor,
    main,
    parse_coefficients_csv,
    parse_queries,
    parse_samples,
)


@pytest.fixture(scope="module")
def grid():
    return build_grid(4, 8000.0, (3, 5, 9, 11))


def write_default_descriptor(tmp_path, grid):
    path = tmp_path / "scheme.json"
    path.write_text(json.dumps(descriptor_from_grid(grid), indent=2) + "\n")
    return path


def test_grid_bvec_output(tmp_path):
    prefix = tmp_path / "scheme"
    assert main(["grid", "--format", "bvec", "--output", str(prefix)]) == 0
    bvals = np.loadtxt(prefix.with_suffix(".bvals"))
    bvecs = np.loadtxt(prefix.with_suffix(".bvecs"))
    assert bvals.shape == (132,)
    assert bvecs.shape == (3, 132)
    unique, counts = np.unique(bvals, return_counts=True)
    assert np.max(np.abs(unique - [411.3, 1694.4, 4036.3, 8000.0])) < 0.05
    assert list(counts) == [6, 15, 45, 66]
    norms = np.linalg.norm(bvecs, axis=0)
    assert np.max(np.abs(norms - 1.0)) < 2e-6


def test_descriptor_regenerates_byte_identical_files(tmp_path, grid):
    desc_path = write_default_descriptor(tmp_path, grid)
    first = tmp_path / "a"
    second = tmp_path / "b"
    assert main(["grid", "--format", "bvec", "--output", str(first)]) == 0
    assert main([
        "grid", "--from-descriptor", str(desc_path), "--format", "bvec",
        "--output", str(second),
    ]) == 0
    assert first.with_suffix(".bvals").read_bytes() == second.with_suffix(".bvals").read_bytes()
    assert first.with_suffix(".bvecs").read_bytes() == second.with_suffix(".bvecs").read_bytes()


def test_descriptor_round_trip_rebuilds_grid(grid):
    desc = json.loads(json.dumps(descriptor_from_grid(grid)))
    rebuilt = grid_from_descriptor(desc)
    assert np.array_equal(rebuilt.points, grid.points)
    assert np.array_equal(rebuilt.bvalues, grid.bvalues)
    assert rebuilt.radial.zeta == grid.radial.zeta


def test_grid_csv_mirror(tmp_path):
    out = tmp_path / "points.csv"
    assert main(["grid", "--format", "csv", "--mirror", "--output", str(out)]) == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0] == "shell,b,x,y,z"
    assert len(rows) == 1 + 264
    data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
    assert np.max(np.abs(data[:132, 2:] + data[132:, 2:])) == 0.0


def test_mirror_requires_csv_format(capsys):
    with pytest.raises(SystemExit):
        main(["grid", "--format", "bvec", "--mirror"])


def test_forward_then_evaluate_round_trip(tmp_path, grid):
    desc_path = write_default_descriptor(tmp_path, grid)
    coeffs = random_staircase_signal(3, grid.bandlimits, 4, grid.radial.zeta)
    values = synthesize_on_grid(coeffs, grid).real
    samples_path = tmp_path / "samples.txt"
    samples_path.write_text(
        "# samples\n" + "\n".join(repr(float(v)) for v in values) + "\n"
    )
    coeffs_path = tmp_path / "coeffs.csv"
    assert main([
        "forward", "--scheme", str(desc_path), "--samples", str(samples_path),
        "--output", str(coeffs_path),
    ]) == 0
    parsed = parse_coefficients_csv(coeffs_path.read_text())
    assert np.max(np.abs(parsed.values - coeffs.values)) < 1e-9

    queries_path = tmp_path / "queries.txt"
    rng = np.random.default_rng(4)
    dirs = rng.standard_normal((20, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    b = rng.uniform(0.0, 8000.0, 20)
    lines = [f"{b[i]} {dirs[i, 0]} {dirs[i, 1]} {dirs[i, 2]}" for i in range(20)]
    queries_path.write_text("\n".join(lines) + "\n")
    values_path = tmp_path / "values.txt"
    assert main([
        "evaluate", "--coefficients", str(coeffs_path), "--queries", str(queries_path),
        "--output", str(values_path),
    ]) == 0
    got = np.array([float(line) for line in values_path.read_text().splitlines()])
    expected = inverse_spf(coeffs, dirs, b=b).real
    assert np.max(np.abs(got - expected)) < 1e-9


def test_forward_counts_mismatch_message(tmp_path, grid, capsys):
    desc_path = write_default_descriptor(tmp_path, grid)
    samples_path = tmp_path / "short.txt"
    samples_path.write_text("\n".join(["1.0"] * 50) + "\n")
    code = main(["forward", "--scheme", str(desc_path), "--samples", str(samples_path)])
    assert code == 1
    err = capsys.readouterr().err
    assert "132" in err and "50" in err


def test_zero_samples_give_zero_csv(tmp_path, grid, capsys):
    desc_path = write_default_descriptor(tmp_path, grid)
    samples_path = tmp_path / "zeros.txt"
    samples_path.write_text("\n".join(["0.0"] * 132) + "\n")
    assert main(["forward", "--scheme", str(desc_path), "--samples", str(samples_path)]) == 0
    parsed = parse_coefficients_csv(capsys.readouterr().out)
    assert np.max(np.abs(parsed.values)) == 0.0


def test_query_parse_errors_carry_line_numbers():
    with pytest.raises(CliError, match="line 2"):
        parse_queries("1000 1 0 0\n2000 0 0\n")
    with pytest.raises(CliError, match="line 3"):
        parse_queries("# c\n1000 1 0 0\n2000 0 zero 0\n")
    with pytest.raises(CliError, match="line 1"):
        parse_queries("-3 1 0 0\n")
    with pytest.raises(CliError, match="zero length"):
        parse_queries("1000 0 0 0\n")
    with pytest.raises(CliError):
        parse_queries("# only comments\n")


def test_sample_parse_accepts_comments_and_complex():
    values = parse_samples("# header\n1.5\n\n2.5+0.5j\n")
    assert values.dtype == complex
    assert values[0] == 1.5 and values[1] == 2.5 + 0.5j
    real = parse_samples("1.0\n2.0\n")
    assert real.dtype == float
    with pytest.raises(CliError, match="line 2"):
        parse_samples("1.0\nnope\n")


def test_coefficients_csv_round_trip(grid):
    coeffs = random_staircase_signal(9, grid.bandlimits, 4, grid.radial.zeta)
    text = format_coefficients_csv(coeffs)
    parsed = parse_coefficients_csv(text)
    assert np.array_equal(parsed.values, coeffs.values)
    assert parsed.zeta == coeffs.zeta
    assert parsed.index.bandlimits == coeffs.index.bandlimits
    with pytest.raises(CliError, match="missing"):
        parse_coefficients_csv("n,l,m,re,im\n")
    with pytest.raises(CliError, match="rows"):
        parse_coefficients_csv(text.rsplit("\n", 2)[0] + "\n")


def test_evaluate_prints_complex_for_non_real_tables(tmp_path, grid, capsys):
    coeffs = random_staircase_signal(9, grid.bandlimits, 4, grid.radial.zeta)
    coeffs.set(0, 2, 0, 1.0 + 0.7j)
    coeffs_path = tmp_path / "c.csv"
    coeffs_path.write_text(format_coefficients_csv(coeffs))
    queries_path = tmp_path / "q.txt"
    queries_path.write_text("1000 0 0 1\n")
    assert main([
        "evaluate", "--coefficients", str(coeffs_path), "--queries", str(queries_path),
    ]) == 0
    out = capsys.readouterr().out.strip()
    assert "j" in out
    complex(out)


def test_validate_default_passes(tmp_path):
    report_path = tmp_path / "report.json"
    code = main(["validate", "--draws", "5", "--output", str(report_path)])
    assert code == 0
    report = json.loads(report_path.read_text())
    assert report["passed"] is True
    assert set(report["checks"]) == {
        "radial_orthonormality",
        "gaussian_moments",
        "quadrature_sharpness",
        "sht_conditioning",
        "sht_round_trip",
        "spf_round_trip",
    }


def test_validate_flags_degenerate_descriptor(tmp_path, grid):
    desc = descriptor_from_grid(grid)
    lats = desc["shells"][3]["ring_latitudes"]
    lats[1] = lats[0]
    desc_path = tmp_path / "degenerate.json"
    desc_path.write_text(json.dumps(desc))
    report_path = tmp_path / "report.json"
    code = main([
        "validate", "--from-descriptor", str(desc_path), "--draws", "3",
        "--output", str(report_path),
    ])
    assert code == 1
    report = json.loads(report_path.read_text())
    assert report["passed"] is False
    assert report["checks"]["sht_conditioning"]["passed"] is False
    assert report["checks"]["spf_round_trip"]["passed"] is False


def test_validate_micro_scheme(tmp_path):
    code = main([
        "validate", "--shells", "1", "--bmax", "1000", "--bandlimits", "1",
        "--draws", "3", "--output", str(tmp_path / "r.json"),
    ])
    assert code == 0


def test_physical_convention_needs_tau(capsys):
    assert main(["grid", "--convention", "physical"]) == 1
    assert "tau" in capsys.readouterr().err


def test_cli_outputs_are_deterministic(tmp_path, grid):
    first = tmp_path / "one.json"
    second = tmp_path / "two.json"
    for out in (first, second):
        assert main(["grid", "--format", "json", "--output", str(out)]) == 0
    assert first.read_bytes() == second.read_bytes()
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    for out in (r1, r2):
        assert main(["validate", "--draws", "5", "--seed", "3", "--output", str(out)]) == 0
    assert r1.read_bytes() == r2.read_bytes()
