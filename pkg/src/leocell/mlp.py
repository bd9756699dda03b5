"""Feedforward sigmoid network trained by online backpropagation.

Everything is deterministic: seeded initialization, fixed pattern order
(or a seeded shuffle), and a pinned update rule, so identical inputs give
bit-identical weights. The numeric kernels live in leocell._backend.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, replace
from pathlib import Path

from . import _backend
from .dataset import (
    CyclingDataset,
    CyclingRecord,
    NormalizationSpec,
    TARGETS,
    denormalize,
    normalize,
    target_value,
)
from .errors import (
    DivergenceError,
    ModelFileError,
    ModelMismatchError,
    StatisticUndefinedError,
    ValidationError,
)
from .kvconfig import parse_kv, require
from .rng import Xoshiro256StarStar

ACTIVATIONS = ("sigmoid",)

DEFAULT_TOPOLOGY_SIZES = (3, 9, 9, 1)
DEFAULT_LEARNING_RATE = 0.4

MODEL_SCHEMA_VERSION = 1

# substream of the training config seed used for per-epoch shuffling
# (substream 0 of the model seed is taken by weight initialization)
_SHUFFLE_STREAM = 1


@dataclass(frozen=True)
class NetworkTopology:
    """Layer widths, inputs first. Three inputs (temperature, DOD, cycle),
    one output, at least one hidden layer."""

    layer_sizes: tuple[int, ...] = DEFAULT_TOPOLOGY_SIZES
    activation: str = "sigmoid"

    def __post_init__(self):
        sizes = self.layer_sizes
        if len(sizes) < 3:
            raise ValidationError(
                f"need at least one hidden layer, got layer sizes {sizes}")
        if any(not isinstance(s, int) or s < 1 for s in sizes):
            raise ValidationError(f"layer sizes must be positive integers, got {sizes}")
        if sizes[0] != 3:
            raise ValidationError(f"input layer must have 3 neurons, got {sizes[0]}")
        if sizes[-1] != 1:
            raise ValidationError(f"output layer must have 1 neuron, got {sizes[-1]}")
        if self.activation not in ACTIVATIONS:
            raise ValidationError(
                f"unknown activation {self.activation!r}, expected one of {ACTIVATIONS}")

    def weight_count(self) -> int:
        sizes = self.layer_sizes
        return sum(sizes[i] * sizes[i - 1] for i in range(1, len(sizes)))

    def bias_count(self) -> int:
        return sum(self.layer_sizes[1:])

    def parameter_count(self) -> int:
        return self.weight_count() + self.bias_count()


@dataclass
class MlpModel:
    """Network state. weights/biases are flat arrays, layer by layer,
    weights row-major (row = destination neuron)."""

    topology: NetworkTopology
    weights: array
    biases: array
    normalization: NormalizationSpec
    target: str
    epochs_trained: int = 0
    seed: int = 0
    learning_rate: float = DEFAULT_LEARNING_RATE

    def weight_matrices(self) -> list[list[list[float]]]:
        """Per-layer weight matrices as nested lists (to-size x from-size)."""
        sizes = self.topology.layer_sizes
        matrices = []
        pos = 0
        for li in range(1, len(sizes)):
            rows = []
            for _ in range(sizes[li]):
                rows.append(list(self.weights[pos:pos + sizes[li - 1]]))
                pos += sizes[li - 1]
            matrices.append(rows)
        return matrices

    def bias_vectors(self) -> list[list[float]]:
        sizes = self.topology.layer_sizes
        vectors = []
        pos = 0
        for li in range(1, len(sizes)):
            vectors.append(list(self.biases[pos:pos + sizes[li]]))
            pos += sizes[li]
        return vectors


@dataclass(frozen=True)
class TrainingConfig:
    error_target_pct: float
    learning_rate: float = DEFAULT_LEARNING_RATE
    momentum: float = 0.0
    max_epochs: int = 200000
    seed: int = 0
    shuffle_each_epoch: bool = False
    eval_every: int = 100

    def __post_init__(self):
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValidationError(f"learning_rate must be > 0, got {self.learning_rate!r}")
        if not (math.isfinite(self.momentum) and 0.0 <= self.momentum < 1.0):
            raise ValidationError(f"momentum must be in [0, 1), got {self.momentum!r}")
        if not (math.isfinite(self.error_target_pct) and self.error_target_pct > 0):
            raise ValidationError(
                f"error_target_pct must be > 0, got {self.error_target_pct!r}")
        if self.max_epochs <= 0:
            raise ValidationError(f"max_epochs must be > 0, got {self.max_epochs}")
        if self.eval_every <= 0:
            raise ValidationError(f"eval_every must be > 0, got {self.eval_every}")


@dataclass(frozen=True)
class TrainingReport:
    epochs_run: int
    final_train_mape_pct: float
    error_history: tuple[tuple[int, float], ...]  # (cumulative epoch, MAPE %)
    converged: bool


def init_network(topology: NetworkTopology, seed: int, target: str,
                 normalization: NormalizationSpec,
                 learning_rate: float = DEFAULT_LEARNING_RATE) -> MlpModel:
    """Seeded uniform [-0.5, 0.5) initialization.

    Draw order is fixed: substream 0 of the seed, layer by layer, each
    layer's weights row-major and then its biases.
    """
    if target not in TARGETS:
        raise ValidationError(f"unknown target {target!r}, expected one of {TARGETS}")
    rng = Xoshiro256StarStar(seed, stream=0)
    sizes = topology.layer_sizes
    weights = array("d")
    biases = array("d")
    for li in range(1, len(sizes)):
        for _ in range(sizes[li] * sizes[li - 1]):
            weights.append(rng.uniform(-0.5, 0.5))
        for _ in range(sizes[li]):
            biases.append(rng.uniform(-0.5, 0.5))
    return MlpModel(
        topology=topology,
        weights=weights,
        biases=biases,
        normalization=normalization,
        target=target,
        epochs_trained=0,
        seed=seed,
        learning_rate=learning_rate,
    )


def _sizes_array(topology: NetworkTopology) -> array:
    return array("i", topology.layer_sizes)


def _normalized_input(model: MlpModel, t: float, dod: float, cycle: float) -> array:
    spec = model.normalization
    return array("d", (
        normalize(spec, t, "temperature_c"),
        normalize(spec, dod, "dod_pct"),
        normalize(spec, float(cycle), "cycle"),
    ))


def forward(model: MlpModel, t: float, dod: float, cycle: float
            ) -> tuple[float, list[list[float]]]:
    """Prediction in target units plus all layer activations.

    Inputs outside the fitted normalization ranges extrapolate linearly
    (with ExtrapolationWarning); the sigmoid output keeps every prediction
    strictly inside the denormalized image of (0, 1).
    """
    sizes = model.topology.layer_sizes
    acts = array("d", bytes(8 * sum(sizes)))
    out = _backend.forward_single(
        _sizes_array(model.topology), model.weights, model.biases,
        _normalized_input(model, t, dod, cycle), acts)
    layers = []
    pos = 0
    for s in sizes:
        layers.append(list(acts[pos:pos + s]))
        pos += s
    return denormalize(model.normalization, out, "target"), layers


def _training_arrays(model: MlpModel, dataset: CyclingDataset
                     ) -> tuple[array, array, list[float]]:
    """Normalized inputs/targets plus raw observed values for the MAPE."""
    spec = model.normalization
    xs = array("d")
    ys = array("d")
    observed = []
    for i, r in enumerate(dataset.records):
        y = target_value(r, model.target)
        if y is None:
            raise ModelMismatchError(
                f"record {i} has no {model.target} value; dataset does not "
                f"match the model target")
        if y == 0.0:
            raise StatisticUndefinedError(
                f"record {i} has {model.target} value 0; the percentage error "
                f"target is undefined there. Use data bounded away from zero.")
        xs.extend((
            normalize(spec, r.temperature_c, "temperature_c"),
            normalize(spec, r.dod_pct, "dod_pct"),
            normalize(spec, float(r.cycle), "cycle"),
        ))
        ys.append(normalize(spec, y, "target"))
        observed.append(y)
    return xs, ys, observed


def _dataset_mape(model: MlpModel, sizes: array, weights: array, biases: array,
                  xs: array, observed: list[float], out: array) -> float:
    _backend.predict_batch(sizes, weights, biases, xs, out)
    spec = model.normalization
    total = 0.0
    for i, obs in enumerate(observed):
        pred = denormalize(spec, out[i], "target")
        total += abs(obs - pred) / abs(obs)
    return total / len(observed) * 100.0


def train(model: MlpModel, dataset: CyclingDataset,
          config: TrainingConfig) -> tuple[MlpModel, TrainingReport]:
    """Online per-pattern backpropagation to a percentage-error target.

    Patterns are visited in dataset order, or in a seeded shuffle when
    configured. Every eval_every epochs the dataset MAPE (denormalized
    units) is evaluated; training stops when it reaches the target or the
    epoch budget runs out. The input model is not modified.
    """
    if not dataset.records:
        raise ValidationError("cannot train on an empty dataset")
    sizes = _sizes_array(model.topology)
    xs, ys, observed = _training_arrays(model, dataset)
    n = len(observed)

    weights = array("d", model.weights)
    biases = array("d", model.biases)
    vw = array("d", bytes(8 * len(weights)))
    vb = array("d", bytes(8 * len(biases)))
    out = array("d", bytes(8 * n))

    mape = _dataset_mape(model, sizes, weights, biases, xs, observed, out)
    if not math.isfinite(mape):
        raise DivergenceError(0, "initial model produces a non-finite error")
    history = [(0, mape)]
    converged = mape <= config.error_target_pct
    epochs_done = 0

    order = list(range(n))
    shuffle_rng = (Xoshiro256StarStar(config.seed, stream=_SHUFFLE_STREAM)
                   if config.shuffle_each_epoch else None)

    while not converged and epochs_done < config.max_epochs:
        chunk = min(config.eval_every, config.max_epochs - epochs_done)
        if shuffle_rng is not None:
            # fresh pattern order every epoch, one kernel call per epoch
            bad = -1
            for e in range(chunk):
                shuffle_rng.shuffle(order)
                bad = _backend.train_epochs(
                    sizes, weights, biases, vw, vb, xs, ys,
                    array("i", order), config.learning_rate, config.momentum, 1)
                if bad >= 0:
                    bad = e
                    break
        else:
            bad = _backend.train_epochs(
                sizes, weights, biases, vw, vb, xs, ys,
                array("i", order), config.learning_rate, config.momentum, chunk)
        if bad >= 0:
            raise DivergenceError(epochs_done + bad + 1)
        epochs_done += chunk
        mape = _dataset_mape(model, sizes, weights, biases, xs, observed, out)
        if not math.isfinite(mape):
            raise DivergenceError(epochs_done)
        history.append((epochs_done, mape))
        converged = mape <= config.error_target_pct

    trained = replace(
        model,
        weights=weights,
        biases=biases,
        epochs_trained=model.epochs_trained + epochs_done,
        learning_rate=config.learning_rate,
    )
    report = TrainingReport(
        epochs_run=epochs_done,
        final_train_mape_pct=history[-1][1],
        error_history=tuple(history),
        converged=converged,
    )
    return trained, report


def resume_train(path, dataset: CyclingDataset,
                 config: TrainingConfig) -> tuple[MlpModel, TrainingReport]:
    """Continue training from a saved model file.

    Equivalent to train() starting from the stored weights;
    epochs_trained accumulates across sessions.
    """
    model = load_model(path)
    return train(model, dataset, config)


def gradient_check(model: MlpModel, record: CyclingRecord, epsilon: float) -> float:
    """Worst relative disagreement between the analytic gradient and
    central finite differences, over every weight and bias.

    Relative error per parameter: |a - n| / max(|a| + |n|, 1e-12).
    """
    if not (0.0 < epsilon <= 1e-2):
        raise ValidationError(f"epsilon must be in (0, 1e-2], got {epsilon!r}")
    y_raw = target_value(record, model.target)
    if y_raw is None:
        raise ValidationError(f"record has no {model.target} value")
    x = _normalized_input(model, record.temperature_c, record.dod_pct,
                          float(record.cycle))
    y = normalize(model.normalization, y_raw, "target")
    sizes = _sizes_array(model.topology)
    weights = array("d", model.weights)
    biases = array("d", model.biases)
    gw = array("d", bytes(8 * len(weights)))
    gb = array("d", bytes(8 * len(biases)))
    _backend.grad_single(sizes, weights, biases, x, y, gw, gb)

    worst = 0.0

    def central(params: array, grads: array) -> None:
        nonlocal worst
        for i in range(len(params)):
            orig = params[i]
            params[i] = orig + epsilon
            hi = _backend.loss_single(sizes, weights, biases, x, y)
            params[i] = orig - epsilon
            lo = _backend.loss_single(sizes, weights, biases, x, y)
            params[i] = orig
            numeric = (hi - lo) / (2.0 * epsilon)
            analytic = grads[i]
            rel = abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-12)
            if rel > worst:
                worst = rel

    central(weights, gw)
    central(biases, gb)
    return worst


_NORM_FIELDS = (
    ("norm_temperature_min", "temperature_min"),
    ("norm_temperature_max", "temperature_max"),
    ("norm_dod_min", "dod_min"),
    ("norm_dod_max", "dod_max"),
    ("norm_cycle_min", "cycle_min"),
    ("norm_cycle_max", "cycle_max"),
    ("norm_target_min", "target_min"),
    ("norm_target_max", "target_max"),
    ("norm_output_low", "output_low"),
    ("norm_output_high", "output_high"),
)


def save_model(model: MlpModel, path) -> None:
    """Versioned plain-text format: a key=value header, then one line per
    layer of weights (row-major, space-separated) and one per layer of
    biases. Numbers round-trip binary64 exactly; see docs/formats.md."""
    lines = [
        f"schema_version={MODEL_SCHEMA_VERSION}",
        "kind=mlp",
        f"target={model.target}",
        f"activation={model.topology.activation}",
        "layer_sizes=" + ",".join(str(s) for s in model.topology.layer_sizes),
        f"learning_rate={model.learning_rate!r}",
        f"epochs_trained={model.epochs_trained}",
        f"seed={model.seed}",
    ]
    for key, field in _NORM_FIELDS:
        lines.append(f"{key}={getattr(model.normalization, field)!r}")
    sizes = model.topology.layer_sizes
    pos = 0
    for li in range(1, len(sizes)):
        count = sizes[li] * sizes[li - 1]
        lines.append(" ".join(repr(v) for v in model.weights[pos:pos + count]))
        pos += count
    pos = 0
    for li in range(1, len(sizes)):
        count = sizes[li]
        lines.append(" ".join(repr(v) for v in model.biases[pos:pos + count]))
        pos += count
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def _parse_value_line(line: str, expected: int, what: str) -> array:
    values = array("d")
    fields = line.split()
    if len(fields) != expected:
        raise ModelFileError(f"{what}: expected {expected} values, got {len(fields)}")
    for f in fields:
        try:
            v = float(f)
        except ValueError:
            raise ModelFileError(f"{what}: not a number: {f!r}") from None
        if not math.isfinite(v):
            raise ModelFileError(f"{what}: non-finite value {f!r}")
        values.append(v)
    return values


def load_model(path) -> MlpModel:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ModelFileError(f"cannot read {path}: {e}") from e
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header_lines = []
    body_lines = []
    for ln in lines:
        # weight/bias lines are bare numbers and contain no '='
        if not body_lines and "=" in ln:
            header_lines.append(ln)
        else:
            body_lines.append(ln)
    header = parse_kv("\n".join(header_lines))

    version = require(header, "schema_version")
    if version != str(MODEL_SCHEMA_VERSION):
        raise ModelFileError(f"unsupported schema_version {version!r}")
    kind = require(header, "kind")
    if kind != "mlp":
        raise ModelFileError(f"expected kind=mlp, got {kind!r}")
    target = require(header, "target")
    if target not in TARGETS:
        raise ModelFileError(f"unknown target {target!r}")
    activation = require(header, "activation")
    try:
        sizes = tuple(int(s) for s in require(header, "layer_sizes").split(","))
    except ValueError:
        raise ModelFileError("layer_sizes must be comma-separated integers") from None
    try:
        topology = NetworkTopology(layer_sizes=sizes, activation=activation)
    except ValidationError as e:
        raise ModelFileError(str(e)) from e

    try:
        learning_rate = float(require(header, "learning_rate"))
        epochs_trained = int(require(header, "epochs_trained"))
        seed = int(require(header, "seed"))
        norm_kwargs = {field: float(require(header, key))
                       for key, field in _NORM_FIELDS}
    except ValueError as e:
        raise ModelFileError(f"bad header value: {e}") from None
    try:
        normalization = NormalizationSpec(**norm_kwargs)
    except ValidationError as e:
        raise ModelFileError(str(e)) from e

    n_layers = len(sizes)
    expected_body = 2 * (n_layers - 1)
    if len(body_lines) != expected_body:
        raise ModelFileError(
            f"expected {expected_body} weight/bias lines, got {len(body_lines)}")
    weights = array("d")
    for li in range(1, n_layers):
        weights.extend(_parse_value_line(
            body_lines[li - 1], sizes[li] * sizes[li - 1], f"layer {li} weights"))
    biases = array("d")
    for li in range(1, n_layers):
        biases.extend(_parse_value_line(
            body_lines[n_layers - 2 + li], sizes[li], f"layer {li} biases"))

    return MlpModel(
        topology=topology,
        weights=weights,
        biases=biases,
        normalization=normalization,
        target=target,
        epochs_trained=epochs_trained,
        seed=seed,
        learning_rate=learning_rate,
    )
