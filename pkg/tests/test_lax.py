from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from catalan_frobenius.givental import DescendentPotential
from catalan_frobenius.lax import (
    LaxCaps,
    LaxError,
    TauFrame,
    eps_orders,
    fundamental_lemma_sides,
    lax_data,
    lax_frame,
    verify_nls,
    verify_toda,
)

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def symbolic_frame() -> TauFrame:
    return lax_frame(3, 4, None)


def failing(report) -> list[str]:
    return [c.name for c in report.checks if not c.ok]


def test_toda_checks_symbolic_psi(symbolic_frame):
    report = verify_toda(symbolic_frame)
    assert report.ok, failing(report)
    names = {c.name for c in report.checks}
    assert {"exp_u_from_Q", "w0_from_Q", "w_minus1_lowest_two_orders", "toda_flow_1:0",
            "toda_flow_1:1", "toda_flow_2:0"} <= names


def test_nls_checks_symbolic_psi(symbolic_frame):
    report = verify_nls(symbolic_frame)
    assert report.ok, failing(report)
    names = {c.name for c in report.checks}
    assert {"eps_v_X", "eps_u_X", "lax_vs_T_S_inverse", "nls_sato_1:0", "nls_sato_1:1",
            "flows_1:0_2:1_commute_on_v"} <= names


def test_symbolic_psi_specialises(symbolic_frame):
    numeric = lax_frame(3, 4, 0)
    assert symbolic_frame.u.coefficient({}) == 0
    for name in ("u", "v", "phi", "rho"):
        sym = getattr(symbolic_frame, name).set_variable("psi", 0)
        assert sym.to_json_obj() == getattr(numeric, name).to_json_obj()


def test_low_eps_orders_present(symbolic_frame):
    assert eps_orders(symbolic_frame.v)[0] <= 0


@pytest.mark.parametrize("slots,genus,expected", [
    ([(1, 0), (1, 0), (2, 0)], 0, {"toda_flow_1:0", "eps_v_X", "lax_vs_T_S_inverse"}),
    ([(1, 0), (1, 1)], 0, {"toda_sato_1:0", "lax_vs_T_S_inverse"}),
    ([(1, 0), (1, 0)], 1, {"toda_sato_1:0", "lax_vs_T_S_inverse"}),
])
def test_perturbed_potential_is_rejected(slots, genus, expected):
    caps = LaxCaps(2, 3, 0)
    D = DescendentPotential(caps.genus_max, caps.chi_max, 0)
    D.perturb(genus, slots, Fraction(1, 3))
    frame = TauFrame(caps, D)
    bad = set(failing(verify_toda(frame))) | set(failing(verify_nls(frame)))
    assert expected <= bad


def test_lax_data_golden():
    expected = json.loads((GOLDEN / "lax_data_w2_d3_psi0.json").read_text())
    got = json.loads(json.dumps(lax_data(lax_frame(2, 3, 0)), sort_keys=True))
    assert got == expected


@pytest.mark.parametrize("k,l", [(-1, -1), (-2, 0), (0, -3), (1, -3), (2, -4)])
def test_fundamental_lemma(k, l):
    lhs, rhs = fundamental_lemma_sides(k, l, {0: 1, 1: Fraction(1, 2), 2: 3})
    assert lhs == rhs


def test_fundamental_lemma_domain():
    with pytest.raises(LaxError):
        fundamental_lemma_sides(1, 0, {0: 1})
