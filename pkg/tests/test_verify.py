import numpy as np

from hybridmsd import cli, verify
from hybridmsd.maps import MapTable, Protocol, get_table


def test_perturbed_table_fails_oracle_equivalence():
    good = get_table(Protocol.T5)
    bad = MapTable(Protocol.T5, good.p_in, good.p_out + 1e-4 * np.sin(7 * good.p_in), good.theta)
    result = verify.check_oracle(tables={Protocol.T5: bad})
    assert result.name == "oracle-equivalence"
    assert result.status == "fail"


def test_cached_and_rebuilt_tables_give_same_verdict():
    cached = {pr: get_table(pr) for pr in (Protocol.T5, Protocol.H7)}
    rebuilt = {pr: MapTable.from_simulation(pr) for pr in (Protocol.T5, Protocol.H7)}
    a = verify.check_oracle(tables=cached)
    b = verify.check_oracle(tables=rebuilt)
    assert a.status == b.status == "pass"
    for pr in cached:
        np.testing.assert_array_equal(cached[pr].p_out, rebuilt[pr].p_out)


def test_verify_command_exit_code(capsys):
    code = cli.main(["verify", "--format", "json"])
    out = capsys.readouterr().out
    import json

    payload = json.loads(out)
    statuses = {r["criterion"]: r["status"] for r in payload["rows"]}
    assert len(statuses) == 12
    expected = 1 if "fail" in statuses.values() else 0
    assert code == expected
