"""Tests for the config-driven experiment runner and its CLI."""

from __future__ import annotations

import math

import pytest

from nnlswedge.harness import (
    ConfigError,
    cmd_compare,
    cmd_match,
    cmd_predict,
    cmd_scatter,
    load_config,
    main,
)
from nnlswedge.scattering import CaseTag, load_spectral_data
from nnlswedge.wedge import Side


def _write(tmp_path, text, name="exp.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="ascii")
    return path


def _table(path):
    """Split a CSV report into (comment lines, header, data rows)."""
    comments, header, rows = [], None, []
    for line in path.read_text(encoding="ascii").splitlines():
        if line.startswith("#"):
            comments.append(line)
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return comments, header, rows


# ---------------------------------------------------------------------------
# configuration loading


def test_load_config_defaults(tmp_path):
    ini = _write(tmp_path, "[profile]\nkind = pure-step\n")
    cfg = load_config(ini, out_dir=tmp_path / "out")
    assert cfg.profile is not None and cfg.synthetic_kind is None
    assert cfg.kgrid_n == 400
    assert cfg.kgrid_min == 1e-3 and cfg.kgrid_max == 100.0
    assert cfg.wedge.alphas == (0.5, 0.75, 0.9)
    assert cfg.wedge.s_values == (1.0,)
    assert cfg.wedge.t_ladder == (1e4, 1e6, 1e8)
    assert cfg.wedge.sides == (Side.PLUS_X, Side.MINUS_X)
    assert cfg.pde is None and cfg.match is None
    assert cfg.output.directory == tmp_path / "out"
    assert cfg.tolerances["psi_fit_rel"] == 0.05
    assert cfg.tolerances["gap_exponent_margin"] == 0.06


def test_load_config_synthetic_params(tmp_path):
    ini = _write(
        tmp_path,
        "[profile]\nkind = synthetic-case-ii\nk1 = 0.7\ncoupling = 0.25\n",
    )
    cfg = load_config(ini)
    assert cfg.profile is None
    assert cfg.synthetic_kind == "synthetic-case-ii"
    assert cfg.synthetic_params == {"k1": 0.7, "pole": 1.0, "coupling": 0.25}


@pytest.mark.parametrize(
    "body",
    [
        "[profile]\nkind = pure-step\n[bogus]\nx = 1\n",  # unknown section
        "[profile]\nkind = no-such-shape\n",  # unknown kind
        "[profile]\nkind = pure-step\nvelocity = 3\n",  # unknown profile key
        "[kgrid]\nn_per_sign = 10\n",  # missing [profile]
        "[profile]\nkind = pure-step\n[wedge]\nt_ladder = 10, 10\n",
        "[profile]\nkind = pure-step\n[wedge]\nt_ladder = 0.5, 2\n",
        "[profile]\nkind = pure-step\n[wedge]\nalphas = 1.5\n",
        "[profile]\nkind = pure-step\n[wedge]\ns_values = -1\n",
        "[profile]\nkind = pure-step\n[wedge]\nsides = up\n",
        "[profile]\nkind = pure-step\n[kgrid]\nk_min = 5\nk_max = 1\n",
        "[profile]\nkind = pure-step\n[match]\ns = 1\n",  # neither mode
        "[profile]\nkind = pure-step\n[match]\nhold_product = 1\ntime = 100\n",
        "[profile]\nkind = pure-step\n[tolerances]\nbogus = 1\n",
    ],
)
def test_load_config_rejections(tmp_path, body):
    ini = _write(tmp_path, body)
    with pytest.raises(ConfigError):
        load_config(ini)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.ini")


def test_tolerance_overrides(tmp_path):
    ini = _write(
        tmp_path,
        "[profile]\nkind = pure-step\n[tolerances]\npsi_fit_rel = 0.1\n",
    )
    cfg = load_config(ini, tol_overrides=("psi_fit_rel=0.5",))
    assert cfg.tolerances["psi_fit_rel"] == 0.5  # CLI beats file
    with pytest.raises(ConfigError):
        load_config(ini, tol_overrides=("not_a_tolerance=1",))
    with pytest.raises(ConfigError):
        load_config(ini, tol_overrides=("psi_fit_rel",))  # missing value


# ---------------------------------------------------------------------------
# predict


_PREDICT_INI = """\
[profile]
kind = synthetic-case-i

[wedge]
alphas = 0.5, 0.75
s_values = 1.0
t_ladder = 1e3, 1e4, 1e5, 1e6, 1e7
sides = +x, -x
"""


def test_predict_table_layout_and_regimes(tmp_path):
    ini = _write(tmp_path, _PREDICT_INI)
    cfg = load_config(ini, out_dir=tmp_path / "out")
    path = cmd_predict(cfg)
    comments, header, rows = _table(path)
    assert comments[0] == "# schema: nnlswedge-predictions v1"
    assert header[0] == "branch" and header[-1] == "in_band"
    assert len(rows) == 2 * 1 * 5 * 2  # alphas x s x ladder x sides
    branches = {r[0] for r in rows}
    assert branches == {
        "I+x/explicit-correction",  # alpha = 0.5 plus side
        "I+x/leading-only",  # alpha = 0.75 plus side
        "I-x/bound-only",  # alpha = 0.5 minus side
        "I-x/explicit-correction",  # alpha = 0.75 minus side
    }
    for r in rows:
        assert r[1] == "I"
        assert r[-1] == "1"  # s = 1 sits inside the expansion band
        if r[2] == "+x":
            # the coarse magnitude of a plateau row is the plateau itself
            assert float(r[13]) == pytest.approx(1.2, abs=1e-12)
    # ladder long enough for the squared-log regression self-check
    fit_lines = [c for c in comments if c.startswith("# logsq-fit")]
    assert len(fit_lines) == 2  # one per alpha
    assert all(line.endswith("status=ok") for line in fit_lines)


def test_predict_output_is_deterministic(tmp_path):
    ini = _write(tmp_path, _PREDICT_INI)
    cfg = load_config(ini, out_dir=tmp_path / "out")
    first = cmd_predict(cfg).read_bytes()
    second = cmd_predict(cfg).read_bytes()
    assert first == second


def test_predict_reflectionless_rows_sit_on_the_plateau(tmp_path):
    ini = _write(
        tmp_path,
        "[profile]\nkind = synthetic-case-ii\ncoupling = 0\n"
        "[wedge]\nalphas = 0.6\nt_ladder = 1e4, 1e6\n",
    )
    cfg = load_config(ini, out_dir=tmp_path / "out")
    _, _, rows = _table(cmd_predict(cfg))
    plus = [r for r in rows if r[2] == "+x"]
    assert plus
    for r in plus:
        assert abs(float(r[12]) - 1.2) < 1e-10  # modulus = 2 k1 exactly
    for r in rows:
        if r[2] == "-x":
            assert float(r[12]) < 1e-10  # no reflected tail at all


def test_predict_flags_out_of_band_scale(tmp_path):
    ini = _write(
        tmp_path,
        "[profile]\nkind = synthetic-case-i\n"
        "[wedge]\nalphas = 0.5\ns_values = 30\nt_ladder = 1e4\n",
    )
    cfg = load_config(ini, out_dir=tmp_path / "out")
    _, _, rows = _table(cmd_predict(cfg))
    assert rows and all(r[-1] == "0" for r in rows)


# ---------------------------------------------------------------------------
# scatter


def test_scatter_cache_roundtrip(tmp_path):
    ini = _write(
        tmp_path,
        "[profile]\nkind = pure-step\namplitude = 1.0\n"
        "[kgrid]\nn_per_sign = 40\nk_min = 1e-2\nk_max = 10\n",
    )
    cfg = load_config(ini, out_dir=tmp_path / "out")
    cache = cmd_scatter(cfg)
    assert cache.exists()
    sd = load_spectral_data(cache)
    assert sd.case is CaseTag.CASE_I
    assert sd.k1 == pytest.approx(0.5, abs=1e-6)  # half the amplitude
    # second run reuses the cache byte for byte
    before = cache.read_bytes()
    assert cmd_scatter(cfg) == cache
    assert cache.read_bytes() == before


# ---------------------------------------------------------------------------
# compare


def test_compare_geometry_rejections(tmp_path):
    soliton = "[profile]\nkind = soliton-snapshot\nphase = 3.14159265\n"
    base = "[wedge]\nalphas = 0.75\nt_ladder = 3, 4\n"
    pde = "[pde]\nhalf_width = 16\nstep = 0.05\nt_final = 4\n"
    cases = [
        # synthetic families cannot be sampled on a grid
        "[profile]\nkind = synthetic-case-i\n" + base + pde,
        # no [pde] section at all
        soliton + base,
        # ladder reaches past the evolution horizon
        soliton + base + "[pde]\nhalf_width = 16\nstep = 0.05\nt_final = 3.5\n",
        # wedge point too close to the boundary
        soliton + base + "[pde]\nhalf_width = 8\nstep = 0.05\nt_final = 4\n",
    ]
    for body in cases:
        cfg = load_config(_write(tmp_path, body), out_dir=tmp_path / "out")
        with pytest.raises(ConfigError):
            cmd_compare(cfg)


def test_compare_abort_yields_partial_report(tmp_path):
    # carrier phase pi drives the field into a finite-time singularity
    # between the two ladder times: the run must keep the reached rows,
    # mark the report partial, and carry NaN columns for the rest
    ini = _write(
        tmp_path,
        "[profile]\nkind = soliton-snapshot\namplitude = 1.0\n"
        "phase = 3.141592653589793\n"
        "[kgrid]\nn_per_sign = 60\n"
        "[wedge]\nalphas = 0.75\ns_values = 1.0\nt_ladder = 3, 4\n"
        "sides = +x, -x\n"
        "[pde]\nhalf_width = 16.0\nstep = 0.05\nt_final = 4.0\n",
    )
    cfg = load_config(ini, out_dir=tmp_path / "out")
    csv_path, summary_path, snap_path = cmd_compare(cfg)

    comments, _, rows = _table(csv_path)
    assert any(c.startswith("# aborted: FieldBlowUpError") for c in comments)
    assert len(rows) == 4  # 2 times x 2 sides
    by_key = {(r[3], r[4]): r for r in rows}
    reached = by_key[("3", "+x")]
    assert float(reached[16]) < 1e-3  # plateau gap at the reached time
    assert float(reached[17]) < 1e-3  # phase residual likewise
    for side in ("+x", "-x"):
        missing = by_key[("4", side)]
        assert missing[10] == "nan" and missing[11] == "nan"
        assert missing[14] == "nan"  # no evolution gap either
        # both prediction routes still agree on the unreached rows
        assert float(missing[12]) < 1e-6

    summary = summary_path.read_text(encoding="ascii")
    assert "partial=yes" in summary
    assert "abort_reason=FieldBlowUpError" in summary
    assert "fallback_fitted_exponents=yes" in summary

    # snapshots hold exactly the reached times
    times = {
        line.split(",")[0]
        for line in snap_path.read_text(encoding="ascii").splitlines()
        if not line.startswith("#")
    }
    assert times == {"3"}


# ---------------------------------------------------------------------------
# match


def test_match_report_fixed_product(tmp_path):
    ini = _write(
        tmp_path,
        "[profile]\nkind = synthetic-case-i\n"
        "[match]\nhold_product = 1.0\ns = 1.0\nalphas = 0.9, 0.99, 0.999\n",
    )
    cfg = load_config(ini, out_dir=tmp_path / "out")
    comments, header, rows = _table(cmd_match(cfg))
    assert header[0] == "alpha" and header[2] == "phase_residual"
    residuals = [float(r[2]) for r in rows]
    assert len(residuals) == 3
    assert residuals[0] > residuals[1] > residuals[2]
    assert "# residual-trend: decreasing" in comments
    assert any(
        c.startswith("# fast-coefficient-limit") and c.endswith("status=ok")
        for c in comments
    )
    decay = [c for c in comments if c.startswith("# mirror-decay-exponent")]
    assert len(decay) == 1
    fitted = float(decay[0].split("fitted=")[1].split()[0])
    assert fitted == pytest.approx(-0.5, abs=0.02)


def test_match_requires_section(tmp_path):
    ini = _write(tmp_path, "[profile]\nkind = synthetic-case-i\n")
    cfg = load_config(ini, out_dir=tmp_path / "out")
    with pytest.raises(ConfigError):
        cmd_match(cfg)


# ---------------------------------------------------------------------------
# command line


def test_cli_predict_end_to_end(tmp_path, capsys):
    ini = _write(
        tmp_path,
        "[profile]\nkind = synthetic-case-i\n"
        "[wedge]\nalphas = 0.5\nt_ladder = 1e4, 1e6\n",
    )
    out = tmp_path / "out"
    code = main(
        ["predict", "--config", str(ini), "--out", str(out), "--tol",
         "gap_exponent_margin=0.1"]
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert "wrote" in printed and "predictions.csv" in printed
    assert (out / "predictions.csv").exists()


def test_cli_rejects_bad_config_with_exit_2(tmp_path):
    ini = _write(tmp_path, "[profile]\nkind = pure-step\n[bogus]\nx = 1\n")
    with pytest.raises(SystemExit) as err:
        main(["predict", "--config", str(ini)])
    assert err.value.code == 2


def test_cli_compare_announces_all_reports(tmp_path, capsys):
    ini = _write(
        tmp_path,
        "[profile]\nkind = soliton-snapshot\namplitude = 1.0\n"
        "phase = 3.141592653589793\n"
        "[kgrid]\nn_per_sign = 60\n"
        "[wedge]\nalphas = 0.75\nt_ladder = 3\nsides = +x\n"
        "[pde]\nhalf_width = 16.0\nstep = 0.1\nt_final = 3.0\n",
    )
    out = tmp_path / "out"
    code = main(["compare", "--config", str(ini), "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    for name in ("comparison.csv", "comparison-summary.txt", "snapshots.csv"):
        assert name in printed
        assert (out / name).exists()
    summary = (out / "comparison-summary.txt").read_text(encoding="ascii")
    assert "partial=no" in summary
