import json

import pytest

import qkahler


def test_version():
    assert qkahler.__version__


def test_q_integer():
    assert qkahler.q_integer("4/5", 1) == "1"
    assert qkahler.q_integer("4/5", 2) == "41/20"  # 4/5 + 5/4


def test_verify_small_config_passes():
    rep = qkahler.verify(q="4/5", lmax="1", bundle_lo=-1, bundle_hi=1)
    assert rep["version"] == "1"
    assert all(c["status"] == "pass" for c in rep["checks"])
    assert all(c["max_residual"] == "0" for c in rep["checks"])


def test_cohomology_dimensions():
    rows = qkahler.cohomology_table(q="4/5", lmax="3", bundle_lo=0, bundle_hi=3)
    # rows are [h00, h10, h01, h11]; holomorphic sections grow as k+1
    for k, row in enumerate(rows):
        assert row[0] == k + 1
        assert row[1] == max(k - 1, 0)
        assert row[2] == 0
        assert row[3] == (0 if k > 0 else 1)


def test_report_determinism():
    a = qkahler.run("cohomology", q="4/5", lmax="2", bundle_lo=-2, bundle_hi=2)
    b = qkahler.run("cohomology", q="4/5", lmax="2", bundle_lo=-2, bundle_hi=2)
    assert a == b
    json.loads(a)  # valid JSON


def test_serre_report():
    rep = qkahler.serre(q="4/5", lmax="2", bundle_lo=-2, bundle_hi=2)
    assert all(c["status"] == "pass" for c in rep["checks"])
    serre_entries = [c for c in rep["certificates"] if c["kind"] == "serre"]
    assert serre_entries
    for entry in serre_entries:
        assert entry["data"]["nondegenerate"]


def test_invalid_q_raises():
    with pytest.raises(ValueError):
        qkahler.verify(q="1", lmax="1", bundle_lo=0, bundle_hi=0)


def test_approx_mode():
    rep = qkahler.verify(q="4/5", lmax="1", bundle_lo=0, bundle_hi=1,
                         mode="approx", tol="1e-25")
    assert all(c["status"] == "pass" for c in rep["checks"])
