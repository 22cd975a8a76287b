import json

import numpy as np
import pytest

from stochtune import (
    ContinuousParameters,
    ControlPolicy,
    DiscreteParameters,
    TuningModel,
    validate_chain,
)


def make_chain(rng, n, exit_floor=0.02):
    """Random stable absorbing chain: every internal state exits directly
    to both boundaries, so absorption at either side has positive
    probability from everywhere and (I - P00) is well conditioned."""
    raw00 = rng.uniform(size=(n, n))
    raw01 = rng.uniform(exit_floor, 1.0, size=(n, 2))
    internal_mass = rng.uniform(0.2, 0.75, size=(n, 1))
    p00 = raw00 / raw00.sum(axis=1, keepdims=True) * internal_mass
    p01 = raw01 / raw01.sum(axis=1, keepdims=True) * (1.0 - internal_mass)
    return validate_chain(p00, p01)


def make_continuous_model(rng, n):
    chain = make_chain(rng, n)
    params = ContinuousParameters(
        tau=rng.uniform(0.5, 2.0, n),
        c=rng.uniform(-2.0, 5.0, n),
        d0=-rng.uniform(0.0, 3.0, n),
        d1=-rng.uniform(0.0, 3.0, n),
        mu0=rng.uniform(0.0, 1.5, n),
        mu1=rng.uniform(0.0, 1.5, n),
    )
    return TuningModel(chain, params)


def make_discrete_model(rng, n):
    chain = make_chain(rng, n)
    params = DiscreteParameters(
        c=rng.uniform(-2.0, 5.0, n),
        d0=-rng.uniform(0.0, 3.0, n),
        d1=-rng.uniform(0.0, 3.0, n),
    )
    return TuningModel(chain, params)


def make_model(rng, n):
    """Alternate between the two time versions."""
    if rng.random() < 0.5:
        return make_continuous_model(rng, n)
    return make_discrete_model(rng, n)


def make_policy(rng, n):
    return ControlPolicy(alpha0=rng.dirichlet(np.ones(n)), alpha1=rng.dirichlet(np.ones(n)))


def neumann_series(p00, tail_bound=1e-10, max_terms=100_000):
    """Independent oracle for the fundamental matrix: partial sums of
    I + P00 + P00^2 + ... truncated once the sup-norm tail bound
    q^(K+1) / (1 - q) drops below ``tail_bound``."""
    p00 = np.asarray(p00, dtype=np.float64)
    n = p00.shape[0]
    q = np.abs(p00).sum(axis=1).max()
    assert q < 1.0, "oracle needs a substochastic block"
    total = np.eye(n)
    term = np.eye(n)
    k = 0
    while q ** (k + 1) / (1.0 - q) >= tail_bound:
        term = term @ p00
        total += term
        k += 1
        assert k < max_terms
    return total


def reference_chain():
    return validate_chain([[0.5]], [[0.25, 0.25]])


def reference_continuous_model():
    """Single internal state with a p = 0.5 self-loop; the index works
    out to 4.5 / 2.5 = 1.8 by hand."""
    params = ContinuousParameters(
        tau=[1.0], c=[3.0], d0=[-1.0], d1=[-2.0], mu0=[0.5], mu1=[0.5]
    )
    return TuningModel(reference_chain(), params)


def reference_discrete_model():
    params = DiscreteParameters(c=[3.0], d0=[-1.0], d1=[-2.0])
    return TuningModel(reference_chain(), params)


REFERENCE_MODEL_DOC = {
    "name": "reference",
    "time_model": "continuous",
    "P00": [[0.5]],
    "P01": [[0.25, 0.25]],
    "tau": [1.0],
    "c": [3.0],
    "d0": [-1.0],
    "d1": [-2.0],
    "mu0": [0.5],
    "mu1": [0.5],
}

REFERENCE_POLICY_DOC = {"alpha0": [1.0], "alpha1": [1.0]}


def write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return str(path)


@pytest.fixture
def reference_model():
    return reference_continuous_model()


@pytest.fixture
def reference_policy():
    return ControlPolicy(alpha0=[1.0], alpha1=[1.0])


@pytest.fixture
def reference_model_file(tmp_path):
    return write_json(tmp_path / "model.json", REFERENCE_MODEL_DOC)


@pytest.fixture
def reference_policy_file(tmp_path):
    return write_json(tmp_path / "policy.json", REFERENCE_POLICY_DOC)
