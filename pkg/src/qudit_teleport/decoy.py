"""Decoy-qudit checking of the channel distribution step.

The sender mixes random single-qudit decoys, each drawn uniformly from the
2d eigenvectors of the Z and X bases, into the sequences sent to the
controllers and the receiver.  Receivers later measure every decoy in the
basis it was prepared in; a mismatch between outcome and prepared value is
an error.  The channel is noiseless, so any error comes from the
eavesdropper.

Decoys are product states, so batches are simulated as a ``(count, d)``
amplitude array rather than as one joint register.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, UnsupportedModel
from .gates import Basis, basis_matrix
from .measurement import ZERO_PROB


class EveModel(enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept-resend"


@dataclass(frozen=True)
class DecoyRecord:
    basis: Basis
    value: int
    position: int


@dataclass
class DecoyBatch:
    d: int
    records: list[DecoyRecord]
    # row i is the state of decoy i
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.records)

    @property
    def bases(self) -> np.ndarray:
        return np.array([r.basis is Basis.X for r in self.records], dtype=bool)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records], dtype=np.int64)


def _eigenstates(d: int, is_x: np.ndarray, values: np.ndarray) -> np.ndarray:
    z = basis_matrix(d, Basis.Z).T
    x = basis_matrix(d, Basis.X).T
    return np.where(is_x[:, None], x[values], z[values])


def _sample_rows(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draw of one outcome per row of ``probs``."""
    p = np.where(probs < ZERO_PROB, 0.0, probs)
    cdf = np.cumsum(p, axis=1)
    cdf /= cdf[:, -1:]
    u = rng.random(len(p))
    idx = (cdf <= u[:, None]).sum(axis=1)
    return np.minimum(idx, p.shape[1] - 1)


def _measure_rows(states: np.ndarray, is_x: np.ndarray, d: int, rng: np.random.Generator) -> np.ndarray:
    """Measure each row of ``states`` in Z or X (per ``is_x``); return outcomes."""
    amps_z = states
    amps_x = states @ basis_matrix(d, Basis.X).conj()
    amps = np.where(is_x[:, None], amps_x, amps_z)
    return _sample_rows(np.abs(amps) ** 2, rng)


def generate_decoys(d: int, count: int, rng, host_length: int = 0) -> DecoyBatch:
    """Draw ``count`` decoys and random insertion slots in a sequence that
    ends up ``host_length + count`` long."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(rng)
    is_x = rng.integers(0, 2, size=count).astype(bool)
    values = rng.integers(0, d, size=count)
    positions = np.sort(rng.choice(host_length + count, size=count, replace=False))
    records = [
        DecoyRecord(Basis.X if bx else Basis.Z, int(v), int(pos))
        for bx, v, pos in zip(is_x, values, positions)
    ]
    states = _eigenstates(d, is_x, values) if count else np.zeros((0, d), dtype=np.complex128)
    return DecoyBatch(d, records, states)


def transmit(batch: DecoyBatch, eve: EveModel | str, rng) -> np.ndarray:
    """States arriving at the receivers after passing the eavesdropper."""
    eve = _model(eve)
    if eve is EveModel.NONE or len(batch) == 0:
        return batch.states.copy()
    rng = np.random.default_rng(rng)
    eve_x = rng.integers(0, 2, size=len(batch)).astype(bool)
    seen = _measure_rows(batch.states, eve_x, batch.d, rng)
    return _eigenstates(batch.d, eve_x, seen)


def check_decoys(transmitted: np.ndarray, batch: DecoyBatch, rng) -> tuple[int, float]:
    """Measure every decoy in its preparation basis; return (errors, error rate)."""
    if len(transmitted) != len(batch):
        raise LengthMismatch(f"{len(transmitted)} states for {len(batch)} decoy records")
    if len(batch) == 0:
        return 0, 0.0
    rng = np.random.default_rng(rng)
    outcomes = _measure_rows(np.asarray(transmitted), batch.bases, batch.d, rng)
    errors = int(np.count_nonzero(outcomes != batch.values))
    return errors, errors / len(batch)


def _model(eve) -> EveModel:
    try:
        return EveModel(eve)
    except ValueError:
        raise UnsupportedModel(f"unknown eavesdropper model {eve!r}") from None


def detection_probability_analytic(d: int, eve: EveModel | str) -> float:
    """Per-decoy error probability.

    Intercept-resend: Eve guesses the preparation basis half the time and then
    resends the right state; otherwise the resent conjugate-basis state
    reproduces the prepared value with probability 1/d.
    """
    eve = _model(eve)
    if eve is EveModel.NONE:
        return 0.0
    return 0.5 * (1 - 1 / d)


@dataclass
class DecoyReport:
    d: int
    count: int
    eve_model: str
    errors: int
    rate: float
    analytic_rate: float
    seed: int | None

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "count": self.count,
            "eve_model": self.eve_model,
            "errors": self.errors,
            "rate": self.rate,
            "analytic_rate": self.analytic_rate,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def run_decoy_check(d: int, count: int, eve: EveModel | str, seed: int | None) -> DecoyReport:
    """Generate, transmit and check ``count`` decoys with independent
    generator streams for each stage."""
    eve = _model(eve)
    gen_rng, eve_rng, check_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    batch = generate_decoys(d, count, gen_rng)
    errors, rate = check_decoys(transmit(batch, eve, eve_rng), batch, check_rng)
    return DecoyReport(d, count, eve.value, errors, rate, detection_probability_analytic(d, eve), seed)
