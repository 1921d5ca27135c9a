"""The examples in docs/formats.md must load with the package's own readers."""

import json
import re
from pathlib import Path

import numpy as np
import pytest

from fastent.cli import state_from_json, summarize_trace
from fastent.measure import MeasurementRecord
from fastent.mub import MubFamily, verify_mub
from fastent.qlin import matrix_from_json

DOC = Path(__file__).resolve().parents[1] / "docs" / "formats.md"


@pytest.fixture(scope="module")
def examples():
    blocks = [json.loads(b) for b in re.findall(r"```json\n(.*?)```", DOC.read_text(), re.S)]
    assert len(blocks) == 8
    return blocks


def test_matrix(examples):
    assert matrix_from_json(examples[0]).shape == (2, 2)


def test_mubs(examples):
    vecs = np.array([[matrix_from_json(v)[:, 0] for v in basis] for basis in examples[1]["bases"]])
    assert verify_mub(MubFamily(vecs)).passed


def test_states(examples):
    pure = state_from_json(examples[2])
    assert abs(np.linalg.norm(pure.amplitudes) - 1) <= 1e-12
    mixed = state_from_json(examples[3])
    assert np.allclose(mixed.mat, np.eye(9) / 9)


def test_records_trace_tomography_index(examples):
    recs = [MeasurementRecord.from_json(d) for d in examples[4]]
    assert len(recs) == 18 and all(r.p_hat == r.raw_count / r.shots for r in recs)
    assert summarize_trace("doc", examples[5]).first_detection == 18
    tomo = examples[6]
    assert tomo["kind"] == "tomography" and matrix_from_json(tomo["rho_linear"]).shape == (9, 9)
    assert examples[7]["kind"] == "pipeline_index"
