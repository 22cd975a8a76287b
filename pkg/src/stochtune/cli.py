"""Command-line surface and the model/policy file formats.

Model files are JSON documents; this module is the single source of
truth for their schema::

    {
      "name": "reference",              # optional display name
      "time_model": "continuous",       # or "discrete"
      "P00": [[0.5]],                   # n x n internal transition block
      "P01": [[0.25, 0.25]],            # n x 2 exits to [boundary 0, boundary 1]
      "tau":  [1.0],                    # continuous only: mean sojourn times
      "c":    [3.0],                    # mean income per stay (both versions)
      "d0":   [-1.0],                   # reinsertion costs from boundary 0
      "d1":   [-2.0],                   # reinsertion costs from boundary 1
      "mu0":  [0.5],                    # continuous only: reinsertion durations
      "mu1":  [0.5],
      "strict_cost_signs": true         # optional, default true
    }

Policy files carry the two reinsertion distributions::

    {"alpha0": [1.0], "alpha1": [1.0]}

Exit codes: 0 on success, 2 when a valid model is unstable (and no
override was given), 1 on any error.  All numbers print with 12
significant digits and all output is byte-deterministic for identical
inputs and flags.

Environment: ``TUNE_BACKEND`` selects the simulation kernels
(auto/numba/numpy) and ``TUNE_NUM_THREADS`` caps worker parallelism.
"""

import argparse
import json
import sys

import numpy as np

from . import functional
from .chain import state_label, validate_chain
from .errors import (
    DimensionMismatch,
    ModelFileError,
    NegativeEntry,
    NotAbsorbing,
    RowSumViolation,
    TuningError,
    UnstableModel,
)
from .functional import ControlPolicy, evaluate_index, test_function
from .model import ContinuousParameters, DiscreteParameters, TimeModel, TuningModel
from .optimizer import Sense, optimize
from .simulate import HoldingTimeLaw, SimulationConfig, simulate_index

_CONTINUOUS_KEYS = ("tau", "c", "d0", "d1", "mu0", "mu1")
_DISCRETE_KEYS = ("c", "d0", "d1")
_LAWS = {"det": HoldingTimeLaw.DETERMINISTIC_MEAN, "exp": HoldingTimeLaw.EXPONENTIAL_MEAN}


def fmt(x):
    """Format a float in positional notation with 12 significant digits."""
    x = float(x)
    if x == 0.0:
        return "0.00000000000"
    if not np.isfinite(x):
        return str(x)
    # decimal exponent of the *rounded* value, so boundary cases like
    # 0.99999999999995 keep exactly 12 digits
    exponent = int(
        np.format_float_scientific(x, precision=11, unique=False).split("e")[1]
    )
    fraction_digits = 11 - exponent
    if fraction_digits <= 0:
        return np.format_float_positional(
            x, precision=12, unique=False, fractional=False
        )
    return np.format_float_positional(
        x, precision=fraction_digits, unique=False, fractional=True
    )


def _read_json(path, what):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ModelFileError(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{what} file {path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ModelFileError(f"{what} file {path}: top level must be an object")
    return doc


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _matrix(doc, key):
    value = doc.get(key)
    if value is None:
        raise ModelFileError(f'missing key "{key}"')
    if not isinstance(value, list) or not value or not all(
        isinstance(row, list) for row in value
    ):
        raise ModelFileError(f'key "{key}" must be a non-empty array of arrays')
    width = len(value[0])
    for i, row in enumerate(value):
        if len(row) != width:
            raise ModelFileError(
                f'key "{key}": row {i} has length {len(row)}, expected {width}'
            )
        for j, entry in enumerate(row):
            if not _is_number(entry):
                raise ModelFileError(f'key "{key}": row {i}, index {j} is not a number')
    return np.asarray(value, dtype=np.float64)


def _vector(doc, key, n):
    value = doc.get(key)
    if value is None:
        raise ModelFileError(f'missing key "{key}"')
    if not isinstance(value, list):
        raise ModelFileError(f'key "{key}" must be an array of numbers')
    if len(value) != n:
        raise ModelFileError(f'key "{key}" has length {len(value)}, expected {n}')
    for j, entry in enumerate(value):
        if not _is_number(entry):
            raise ModelFileError(f'key "{key}": index {j} is not a number')
    return np.asarray(value, dtype=np.float64)


def load_model_file(path):
    """Parse and fully validate a model file into a :class:`TuningModel`."""
    doc = _read_json(path, "model")
    raw_time = doc.get("time_model")
    if raw_time not in ("continuous", "discrete"):
        raise ModelFileError(
            'key "time_model" must be "continuous" or "discrete", '
            f"got {raw_time!r}"
        )
    p00 = _matrix(doc, "P00")
    p01 = _matrix(doc, "P01")
    n = p00.shape[0]
    try:
        chain = validate_chain(p00, p01)
    except NegativeEntry as exc:
        if exc.col < n:
            where = f'key "P00": row {exc.row}, column {exc.col}'
        else:
            where = f'key "P01": row {exc.row}, column {exc.col - n}'
        raise ModelFileError(f"{where} is negative ({exc.value})") from None
    except RowSumViolation as exc:
        raise ModelFileError(
            f'keys "P00"/"P01": row {exc.row} sums to {exc.total}, expected 1'
        ) from None
    except (DimensionMismatch, NotAbsorbing) as exc:
        raise ModelFileError(f'chain blocks "P00"/"P01": {exc}') from None

    if raw_time == "continuous":
        vectors = {key: _vector(doc, key, n) for key in _CONTINUOUS_KEYS}
        params = ContinuousParameters(**vectors)
    else:
        vectors = {key: _vector(doc, key, n) for key in _DISCRETE_KEYS}
        params = DiscreteParameters(**vectors)
    strict = doc.get("strict_cost_signs", True)
    if not isinstance(strict, bool):
        raise ModelFileError('key "strict_cost_signs" must be a boolean')
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise ModelFileError('key "name" must be a string')
    try:
        return TuningModel(chain, params, strict_cost_signs=strict, name=name)
    except (ValueError, DimensionMismatch) as exc:
        raise ModelFileError(str(exc)) from None


def save_model_file(model, path):
    """Serialize a model so it reloads bit-identically (floats round-trip
    through their shortest decimal representation)."""
    doc = {}
    if model.name is not None:
        doc["name"] = model.name
    doc["time_model"] = model.time_model.value
    doc["P00"] = model.chain.p00.tolist()
    doc["P01"] = model.chain.p01.tolist()
    keys = (
        _CONTINUOUS_KEYS if model.time_model is TimeModel.CONTINUOUS else _DISCRETE_KEYS
    )
    for key in keys:
        doc[key] = getattr(model.params, key).tolist()
    doc["strict_cost_signs"] = model.strict_cost_signs
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_policy_file(path):
    """Parse a policy file into a :class:`ControlPolicy`."""
    doc = _read_json(path, "policy")
    for key in ("alpha0", "alpha1"):
        value = doc.get(key)
        if value is None:
            raise ModelFileError(f'policy file {path}: missing key "{key}"')
        if not isinstance(value, list) or not all(_is_number(v) for v in value):
            raise ModelFileError(
                f'policy file {path}: key "{key}" must be an array of numbers'
            )
    try:
        return ControlPolicy(
            alpha0=np.asarray(doc["alpha0"], dtype=np.float64),
            alpha1=np.asarray(doc["alpha1"], dtype=np.float64),
        )
    except (ValueError, DimensionMismatch) as exc:
        raise ModelFileError(f"policy file {path}: {exc}") from None


def _print_vector(label, vec):
    print(f"{label}: " + " ".join(fmt(v) for v in vec))


def _cmd_validate(args):
    model = load_model_file(args.model)
    n = model.n_internal
    print(f"name: {model.name if model.name is not None else '-'}")
    print(f"time_model: {model.time_model.value}")
    print(f"n_internal: {n}")
    print(f"state_labels: {state_label(0)}..{state_label(n - 1)}")
    for i in range(n):
        _print_vector(f"fundamental_matrix row {i}", model.fundamental.m[i])
    for i in range(n):
        _print_vector(f"absorption row {i}", model.absorption.b[i])
    _print_vector("expected_time_to_absorption", model.time_to_absorption)
    _print_vector("expected_reward_to_absorption", model.reward_to_absorption)
    stable = model.stability.stable
    print(f"stable: {'true' if stable else 'false'}")
    for state, boundary in model.stability.violations:
        print(
            f"unstable_state: index {state} label {state_label(state)} "
            f"cannot reach boundary {boundary}"
        )
    return 0 if stable else 2


def _cmd_evaluate(args):
    model = load_model_file(args.model)
    policy = load_policy_file(args.policy)
    result = evaluate_index(model, policy, allow_unstable=args.allow_unstable)
    print(f"value: {fmt(result.value)}")
    print(f"numerator: {fmt(result.numerator)}")
    print(f"denominator: {fmt(result.denominator)}")
    return 0


def _cmd_optimize(args):
    model = load_model_file(args.model)
    result = optimize(model, Sense(args.sense), allow_unstable=args.allow_unstable)
    print(f"sense: {result.sense.value}")
    print(f"best_point_indices: ({result.best_point[0]}, {result.best_point[1]})")
    print(f"best_point_labels: ({result.best_labels[0]}, {result.best_labels[1]})")
    print(f"best_value: {fmt(result.best_value)}")
    print(f"tie_count: {len(result.ties)}")
    labels = "; ".join(
        f"({state_label(p[0])}, {state_label(p[1])})" for p in result.ties
    )
    print(f"ties_labels: {labels}")
    return 0


def _cmd_simulate(args):
    model = load_model_file(args.model)
    policy = load_policy_file(args.policy)
    config = SimulationConfig(
        n_cycles=args.cycles, seed=args.seed, holding_time_law=_LAWS[args.law]
    )
    estimate = simulate_index(
        model, policy, config, allow_unstable=args.allow_unstable
    )
    analytic = evaluate_index(model, policy, allow_unstable=args.allow_unstable)
    print(f"cycles: {estimate.n_cycles}")
    print(f"seed: {args.seed}")
    print(f"law: {args.law}")
    print(f"point_estimate: {fmt(estimate.point_estimate)}")
    print(f"standard_error: {fmt(estimate.standard_error)}")
    print(f"total_reward: {fmt(estimate.total_reward)}")
    print(f"total_time: {fmt(estimate.total_time)}")
    if estimate.reward_per_step is not None:
        print(f"reward_per_step: {fmt(estimate.reward_per_step)}")
    print(f"analytic_value: {fmt(analytic.value)}")
    if estimate.standard_error > 0.0:
        z = abs(analytic.value - estimate.point_estimate) / estimate.standard_error
        print(f"z_score: {fmt(z)}")
    else:
        print("z_score: n/a")
    if estimate.insufficient_batches:
        print("note: insufficient batches for a standard error")
    return 0


def _cmd_surface(args):
    model = load_model_file(args.model)
    coeffs = functional.coefficients(model, allow_unstable=args.allow_unstable)
    n = model.n_internal
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("l0,l1,A,B,C\n")
        for l0 in range(n):
            for l1 in range(n):
                fh.write(
                    f"{state_label(l0)},{state_label(l1)},"
                    f"{fmt(coeffs.a[l0, l1])},{fmt(coeffs.b[l0, l1])},"
                    f"{fmt(test_function(coeffs, (l0, l1)))}\n"
                )
    print(f"wrote {args.out} ({n * n} rows)")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="stochtune",
        description=(
            "Stationary profit-rate solver for absorbing-chain models with "
            "randomized boundary controls"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_text, policy=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model", help="model JSON file")
        if policy:
            p.add_argument("policy", help="policy JSON file")
        if name != "validate":
            p.add_argument(
                "--allow-unstable",
                action="store_true",
                help="proceed even if some state misses a boundary",
            )
        p.set_defaults(handler=handler)
        return p

    add("validate", _cmd_validate, "validate a model file and report derived data")
    add("evaluate", _cmd_evaluate, "evaluate the stationary index", policy=True)

    p_opt = add("optimize", _cmd_optimize, "find the optimal deterministic policy")
    p_opt.add_argument(
        "--sense", choices=["max", "min"], default="max", help="optimization sense"
    )

    p_sim = add(
        "simulate", _cmd_simulate, "Monte Carlo estimate of the index", policy=True
    )
    p_sim.add_argument("--cycles", type=int, default=100_000, help="control cycles")
    p_sim.add_argument("--seed", type=int, default=2024, help="stream seed")
    p_sim.add_argument(
        "--law",
        choices=["det", "exp"],
        default="det",
        help="holding-time law (continuous models)",
    )

    p_surf = add("surface", _cmd_surface, "export the test-function grid as CSV")
    p_surf.add_argument("--out", required=True, help="output CSV path")
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.handler(args)
    except UnstableModel as exc:
        print(f"error: unstable model: {exc}", file=sys.stderr)
        return 2
    except TuningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
