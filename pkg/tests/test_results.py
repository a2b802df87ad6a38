import io
import json
import math

import numpy as np
import pytest

from msopt.results import CSV_COLUMNS, AlgorithmResult, ConvergenceLog, Status


def test_log_gap_and_order():
    log = ConvergenceLog()
    log.record(1, -math.inf, 5.0)
    log.record(2, 1.0, 4.0)
    assert math.isinf(log.entries[0].gap) and log.entries[1].gap == 3.0
    with pytest.raises(ValueError):
        log.record(2, 1.0, 4.0)


def test_csv_format():
    log = ConvergenceLog()
    log.record(1, 0.5, 1.5)
    buf = io.StringIO()
    log.write_csv(buf, timing=False)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "1,0.5,1.5,1.0,0"


def test_summary_nulls_nonfinite():
    res = AlgorithmResult(Status.ITERATION_LIMIT, x=np.array([1.0]), lower_bound=-math.inf)
    d = json.loads(json.dumps(res.summary()))
    assert d["lower_bound"] is None and d["objective"] is None and d["x"] == [1.0]
    assert d["status"] == "IterationLimit"
