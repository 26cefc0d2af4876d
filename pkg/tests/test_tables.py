import csv
import io
import json

import pytest

from bkapprox import benchmarks as ref
from bkapprox.app.output import Table
from bkapprox.app.tables import (
    COMPARISON_WARNING,
    TableSettings,
    comparison_params,
    default_bond_grid,
    default_swaption_grid,
    run_bond_table,
    run_compare_table5,
    run_parity_table,
    run_swaption_table,
    with_overrides,
)
from bkapprox.model import ModelParams
from bkapprox.oracles.montecarlo import McConfig

SMALL = TableSettings(mc=McConfig(paths=4000))


def params(r0, b, sigma):
    return ModelParams.with_mean_level(sigma, b, r0, 0.03)


class TestTable:
    def test_csv_layout(self):
        t = Table("x", ("a", "b"), notes=["careful"])
        t.add(a=1.5, b=None)
        text = t.to_csv()
        assert text == "# careful\na,b\n1.5,\n"
        assert "\r" not in text

    def test_unknown_column(self):
        with pytest.raises(KeyError):
            Table("x", ("a",)).add(b=1)

    def test_json_round_trip(self):
        t = Table("x", ("a", "b"), notes=["n"], meta={"k": 1})
        t.add(a=1, b="s")
        again = Table.from_dict(json.loads(t.to_json()))
        assert again.rows == t.rows and again.notes == t.notes and again.meta == t.meta

    def test_render_rejects_format(self):
        with pytest.raises(ValueError):
            Table("x", ("a",)).render("xml")


class TestGrids:
    def test_bond_grid(self):
        grid = default_bond_grid()
        assert len(grid) == 12
        published = {(p.r0, p.b, p.sigma) for p in default_swaption_grid()}
        extra = {(r0, 0.02, 0.5) for r0 in (0.01, 0.03, 0.06)}
        assert {(p.r0, p.b, p.sigma) for p in grid} == published | extra

    def test_swaption_grid_published(self):
        assert [(p.r0, p.b, p.sigma) for p in default_swaption_grid()] == list(ref.SWAPTION_PARAMS)


class TestBondTable:
    def test_published_first_row(self):
        t = run_bond_table(SMALL, [params(0.01, 0.1, 0.25)], [1.0])
        row = t.rows[0]
        assert row["a2_yield"] == 1.071
        assert row["published_a2"] == 1.071 and row["suspect"] is False

    def test_high_vol_row(self):
        t = run_bond_table(SMALL, [params(0.06, 0.1, 0.5)], [10.0])
        assert abs(t.rows[0]["a2_yield_raw"] - 5.774) <= 0.01

    def test_deterministic_grid_has_no_error(self):
        grid = [params(r0, 0.1, 1e-12) for r0 in (0.01, 0.06)]
        # Fine time steps so the trapezoid bias on the sloped mean curve is negligible.
        t = run_bond_table(with_overrides(SMALL, steps=1024, paths=64), grid, [1.0, 5.0, 10.0])
        assert all(abs(e) / 100 <= 1e-8 for e in t.column("error_raw"))

    def test_error_is_difference_of_raw_columns(self):
        t = run_bond_table(SMALL, [params(0.03, 0.02, 0.5)], [1.0, 2.0, 5.0])
        for row in t.rows:
            assert row["error_raw"] == pytest.approx(row["a2_yield_raw"] - row["mc_yield_raw"], abs=1e-12)
            assert row["error"] == round(row["error_raw"], 3) + 0.0

    def test_suspect_rows_flagged(self):
        t = run_bond_table(SMALL, [params(0.01, 0.1, 0.25)], [10.0, 20.0])
        assert t.column("suspect") == [False, True]
        assert any("20y" in n for n in t.notes)

    def test_byte_identical_reruns(self):
        a = run_bond_table(SMALL, [params(0.03, 0.1, 0.25)], [1.0, 5.0])
        b = run_bond_table(SMALL, [params(0.03, 0.1, 0.25)], [1.0, 5.0])
        assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()

    def test_seed_recorded(self):
        t = run_bond_table(with_overrides(SMALL, seed=5), [params(0.03, 0.1, 0.25)], [1.0])
        assert t.meta["seed"] == 5


class TestSwaptionTable:
    def test_first_block_is_flat(self):
        t = run_swaption_table(SMALL, [params(0.01, 0.1, 0.25)], "moneyness", [1.0], [1.0])
        assert len(t.rows) == len(ref.RECEIVER_MONEYNESS) + len(ref.PAYER_MONEYNESS)
        assert all(e == 0.0 for e in t.column("error"))

    def test_otm_only_convention(self):
        t = run_swaption_table(SMALL, [params(0.03, 0.1, 0.25)], "moneyness", [2.0], [2.0])
        for row in t.rows:
            assert row["side"] == ("receiver" if row["moneyness"] < 1 else "payer") or row["moneyness"] == 1.0

    def test_deterministic_grid(self):
        t = run_swaption_table(SMALL, [params(0.03, 0.1, 1e-12)], "moneyness", [1.0], [1.0])
        assert all(e == 0.0 for e in t.column("error"))

    def test_atm_published_on_receiver_rows(self):
        t = run_swaption_table(SMALL, [params(0.03, 0.1, 0.25)], "atm", [5.0], [5.0])
        rows = {r["side"]: r for r in t.rows}
        assert rows["payer"]["published_error"] is None
        assert rows["receiver"]["published_error"] == 0.01
        assert rows["receiver"]["error"] == 0.01

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            run_swaption_table(SMALL, [params(0.03, 0.1, 0.25)], "smile", [1.0], [1.0])


class TestParityTable:
    @pytest.mark.parametrize(
        "key, expiry, tenor, expected",
        [((0.01, 0.1, 0.25), 1.0, 1.0, 0.0), ((0.06, 0.1, 0.5), 1.0, 10.0, 1.10), ((0.03, 0.02, 0.25), 10.0, 1.0, -0.01)],
    )
    def test_published_cells(self, key, expiry, tenor, expected):
        t = run_parity_table(SMALL, [params(*key)], [expiry], [tenor])
        row = t.rows[0]
        assert abs(row["payer_vol_minus_receiver_vol"] - expected) <= max(0.05, 0.3 * abs(expected))
        assert row["published"] == expected
        assert abs(row["lattice_parity_gap"]) <= 1e-12


class TestComparisonTable:
    def test_structure(self):
        t = run_compare_table5(TableSettings(mc=McConfig(paths=20_000)))
        assert t.notes[0] == COMPARISON_WARNING
        assert t.column("maturity") == list(ref.COMPARISON_MATURITIES)
        by_mat = {r["maturity"]: r for r in t.rows}
        assert by_mat[3]["a2_published"] == -0.08 and by_mat[0.1]["a2_published"] == -0.02
        lines = t.to_csv().splitlines()
        assert lines[0].startswith("# WARNING")
        header = next(csv.reader(io.StringIO(lines[1])))
        assert "a2_vs_mc_error" in header and "parameter_note" in header

    def test_parameters(self):
        p = comparison_params()
        assert p.sigma == 0.85 and p.r0 == 0.06 and p.b > 0
