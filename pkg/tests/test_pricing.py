import math

import pytest

from bkapprox.app import pricing
from bkapprox.app.pricing import BondRequest, PriceResult, SwaptionRequest, price_bond, price_swaption
from bkapprox.bonds import bond_price_fast
from bkapprox.oracles.lattice import LatticeConfig, LatticeOracle
from bkapprox.oracles.montecarlo import McConfig


class TestPriceBond:
    def test_fast_matches_bond_module(self, base_params):
        res = price_bond(base_params, BondRequest(0.0, 5.0))
        assert res.price == bond_price_fast(base_params, base_params.r0, 0.0, 5.0).price
        assert res.yield_ == pytest.approx(-math.log(res.price) / 5.0, rel=1e-15)
        assert res.diagnostics["method"] == "fast" and res.diagnostics["time_nodes"] >= 64

    def test_full_reports_grid_size(self, base_params):
        res = price_bond(base_params, BondRequest(0.0, 5.0), "full", gh_points=10, n=2)
        assert res.diagnostics["quadrature_points"] == 1000
        fast = price_bond(base_params, BondRequest(0.0, 5.0)).price
        assert abs(res.price - fast) < 1e-4

    def test_methods_agree(self, base_params):
        req = BondRequest(0.0, 3.0)
        fast = price_bond(base_params, req).price
        lat = price_bond(base_params, req, "lattice").price
        mc = price_bond(base_params, req, "mc", mc=McConfig(paths=20000, seed=3))
        assert abs(fast - lat) < 2e-5
        assert abs(mc.price - lat) <= 4 * mc.diagnostics["stderr"] + 2e-5

    def test_mc_deterministic(self, base_params):
        req = BondRequest(1.0, 2.0, r_start=0.04)
        a = price_bond(base_params, req, "mc", mc=McConfig(paths=2000, seed=11))
        b = price_bond(base_params, req, "mc", mc=McConfig(paths=2000, seed=11))
        assert a.to_dict() == b.to_dict()
        assert a.diagnostics["seed"] == 11

    def test_lattice_rejects_other_start_rate(self, base_params):
        with pytest.raises(ValueError, match="r0"):
            price_bond(base_params, BondRequest(1.0, 1.0, r_start=0.05), "lattice")

    def test_unknown_method(self, base_params):
        with pytest.raises(ValueError):
            price_bond(base_params, BondRequest(0.0, 1.0), "tree")


class TestPriceSwaption:
    def test_zero_strike_payer_is_bond_spread(self, base_params):
        cfg = LatticeConfig()
        res = price_swaption(base_params, SwaptionRequest(2.0, 1.0, 3, "payer", strike=0.0), "lattice", lattice=cfg)
        oracle = LatticeOracle.build(base_params, 5.0, cfg)
        assert res.price == pytest.approx(oracle.bond_price(0.0, 2.0) - oracle.bond_price(0.0, 5.0), abs=1e-12)
        fast = price_swaption(base_params, SwaptionRequest(2.0, 1.0, 3, "payer", strike=0.0))
        assert fast.price == pytest.approx(res.price, abs=2e-5)

    def test_atm_diagnostics(self, base_params):
        res = price_swaption(base_params, SwaptionRequest(5.0, 1.0, 5, "receiver", moneyness=1.0))
        d = res.diagnostics
        assert d["strike"] == d["forward"]
        assert d["regime"] in ("interior", "deep_itm", "deep_otm")
        assert len(d["node_values"]) == d["k"] == 5
        assert d["boundary_z"] is not None
        assert 0.15 < res.implied_vol < 0.35

    def test_fast_close_to_lattice_vol(self, base_params):
        req = SwaptionRequest(5.0, 1.0, 5, "receiver", moneyness=1.0)
        fast = price_swaption(base_params, req).implied_vol
        lat = price_swaption(base_params, req, "lattice")
        assert abs(fast - lat.implied_vol) < 5e-4
        assert abs(lat.diagnostics["parity_gap"]) <= 1e-12

    def test_fast_forward_source(self, base_params):
        res = price_swaption(base_params, SwaptionRequest(2.0, 1.0, 2, moneyness=1.0), forward_source="fast")
        assert res.diagnostics["forward_source"] == "fast"
        assert res.implied_vol is not None

    def test_implied_vol_failure_reported(self, base_params, monkeypatch):
        def refuse(*args, **kwargs):
            raise pricing.ImpliedVolError("outside bounds")

        monkeypatch.setattr(pricing, "implied_vol", refuse)
        res = price_swaption(base_params, SwaptionRequest(1.0, 1.0, 1, "payer", moneyness=1.0))
        assert res.implied_vol is None
        assert res.diagnostics["implied_vol_error"] == "outside bounds"
        assert "implied_vol" in res.to_dict()

    def test_strike_and_moneyness_exclusive(self):
        with pytest.raises(ValueError):
            SwaptionRequest(1.0, 1.0, 1, strike=0.03, moneyness=1.0)
        with pytest.raises(ValueError):
            SwaptionRequest(1.0, 1.0, 1)

    def test_rejects_full_method(self, base_params):
        with pytest.raises(ValueError):
            price_swaption(base_params, SwaptionRequest(1.0, 1.0, 1, moneyness=1.0), "full")

    def test_deep_otm_regime(self, base_params):
        res = price_swaption(base_params, SwaptionRequest(1.0, 1.0, 1, "payer", strike=10.0))
        assert res.price == 0.0 and res.diagnostics["regime"] == "deep_otm"
        assert res.diagnostics["boundary_z"] is None


class TestPriceResult:
    def test_bond_dict_has_no_vol(self):
        assert PriceResult(0.9, 0.02).to_dict() == {"price": 0.9, "yield": 0.02, "diagnostics": {}}

