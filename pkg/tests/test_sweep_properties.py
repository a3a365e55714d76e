"""Sweep-level properties: monotone power in the QoS targets, benefit of more antennas."""
import numpy as np
import pytest

from robust_swipt.experiments import SweepSpec, run_sweep
from robust_swipt.io import RunConfig

BASE = RunConfig(M=4, gamma_dB=10.0)


def per_realization(records, method):
    out = {}
    for value, results in records:
        out[value] = [r[method]["power"] if r[method]["status"] == "Optimal" else np.nan for r in results]
    return out


@pytest.mark.parametrize("parameter,values", [("gamma_dB", (4.0, 8.0, 12.0)), ("P_req_dBm", (-20.0, -12.0, -6.0))])
def test_power_monotone_per_realization(tmp_path, parameter, values):
    spec = SweepSpec(parameter, values, realizations=4, methods=("Method1", "Method2-soc"), base=BASE, seed=3)
    records = []
    assert run_sweep(spec, tmp_path / "s.csv", keep_records=records)
    for m in spec.methods:
        table = np.array(list(per_realization(records, m).values()))  # [value, realization]
        checked = 0
        for col in table.T:
            ok = ~np.isnan(col)
            seq = col[ok]
            if len(seq) == len(col):
                assert np.all(np.diff(seq) >= -1e-6 * seq[:-1])
                checked += 1
        assert checked >= 1
