"""Relation suites: exhaustive checks, fault sensitivity, the gap-4 scan."""

from fractions import Fraction

import pytest

from qeslab.generators import MixSpec
from qeslab.verify import (
    default_scan_grid,
    default_suite,
    delta4_scan,
    failures,
    leakage_reports,
    perturb,
    scan_point,
    verify_q2,
    verify_q2_matrix,
    verify_sl2,
    verify_tensor,
    verify_triplets,
)
from qeslab.weyl import DiffOp, MatOp

F = Fraction


def test_default_suite_holds_on_medium_box():
    reports = default_suite(n_max=8, delta_max=3)
    assert reports
    assert not failures(reports)


def test_report_line_wire_format():
    lines = [r.line() for r in verify_sl2(3, 1)]
    assert lines[0] == "EQ4 n=3 delta=1 which=pm status=holds"
    assert "EQ4J n=3 delta=1 which=p status=holds" in lines
    q2_lines = [r.line() for r in verify_q2(4)]
    assert "EQ19 n=4 delta=2 alpha=1 beta=3 metric=-1 status=holds" in q2_lines
    assert "EQ19 n=4 delta=2 alpha=2 beta=2 metric=1/2 status=holds" in q2_lines
    assert "EQ26 n=4 delta=2 status=holds" in q2_lines


def test_atypical_gap_one_pairing_table():
    lines = [r.line() for r in verify_tensor(4, 1) if r.tag == "OSP22"]
    assert lines == [
        "EQOSP22 n=4 delta=1 alpha=1 beta=1 span=1:0,T+:0,T0:1,T-:0,J:-1 status=holds",
        "EQOSP22 n=4 delta=1 alpha=1 beta=2 span=1:0,T+:0,T0:0,T-:1,J:0 status=holds",
        "EQOSP22 n=4 delta=1 alpha=2 beta=1 span=1:0,T+:1,T0:0,T-:0,J:0 status=holds",
        "EQOSP22 n=4 delta=1 alpha=2 beta=2 span=1:0,T+:0,T0:1,T-:0,J:1 status=holds",
    ]


def test_triplet_suite_covers_all_members():
    reports = verify_triplets(5)
    assert not failures(reports)
    tags = {tuple(r.fields) for r in reports if r.tag == "15"}
    assert len(tags) == 27  # three families x three members x three actions


@pytest.mark.parametrize(
    "name", ["T+", "T0", "T-", "J", "Q1", "QBAR2"]
)
def test_fault_injection_is_detected(name):
    reports = default_suite(n_max=5, delta_max=2, inject_fault=name)
    assert failures(reports)


def test_unknown_fault_name_rejected():
    with pytest.raises(ValueError):
        default_suite(n_max=4, delta_max=1, inject_fault="NOPE")


def test_perturb_changes_first_populated_entry():
    op = MatOp.diag(DiffOp.zero(), DiffOp.euler())
    bumped = perturb(op)
    assert bumped != op
    assert bumped[0][0].is_zero
    assert bumped[1][1] != DiffOp.euler()


def test_wrong_mix_constant_fails():
    reports = verify_q2(4, mix=MixSpec(F(1), F(1), F(-1)))
    assert failures(reports)


def test_wrong_sign_matrix_fails():
    reports = verify_q2(4, mix=MixSpec(F(-1), F(1), F(1)))
    assert failures(reports)


def test_matrix_shadow_consistency():
    reports = verify_q2_matrix(5)
    assert reports
    assert not failures(reports)
    assert any(r.tag == "19SHADOW" for r in reports)


def test_generator_leakage_certificates_empty():
    for n, delta in ((4, 1), (6, 2), (7, 4)):
        reports = leakage_reports(n, delta)
        assert reports
        assert not failures(reports)


def test_scan_point_frozen_residuals():
    r = scan_point(6, F(-1), F(1), F(-1))
    assert r.residual_quadratic_norm == 70
    assert r.worst_pair == (1, 3)
    assert scan_point(5, F(-1), F(1), F(-1)).residual_quadratic_norm == 64
    disabled = scan_point(6, F(1), F(0), F(0))
    assert disabled.residual_quadratic_norm == 96


def test_scan_report_line_format():
    r = scan_point(6, F(-1), F(1), F(-1))
    assert r.line() == (
        "point c=-1 d=diag(1,-1) residual_quadratic_norm=70 worst_pair=13"
    )


def test_default_grid_shape():
    grid = default_scan_grid()
    assert len(grid) == 25
    assert grid[0] == F(-3) and grid[-1] == F(3)
    assert grid[13] - grid[12] == F(1, 4)


def test_small_scan_has_no_counterexamples():
    reports = delta4_scan(n=5, c_values=(F(-1), F(0), F(1)))
    assert len(reports) == 12
    assert all(r.residual_quadratic_norm > 0 for r in reports)
