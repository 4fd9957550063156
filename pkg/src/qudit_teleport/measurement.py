"""Projective measurements with Born-rule sampling, collapse and exhaustive
branch enumeration.

Measured particles are removed from the register: a collapsed state only
describes the particles that were not measured.  Sampling draws one uniform
double from the caller's generator and inverts the cumulative outcome
distribution, so a fixed seed gives a fixed outcome sequence.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import BranchCapExceeded, DimensionMismatch, LengthMismatch, SameParticle
from .gates import Basis, basis_matrix, bell_matrix
from .register import LabelLike, ParticleRegistry, StateVector, as_label

ZERO_PROB = 1e-15
DEFAULT_BRANCH_CAP = 10**6


class SingleOutcome(NamedTuple):
    value: int
    basis: Basis = Basis.X


class BellOutcome(NamedTuple):
    u: int
    v: int


Outcome = Union[SingleOutcome, BellOutcome]


@dataclass(frozen=True)
class SingleMeasurement:
    label: LabelLike
    basis: Basis = Basis.X

    @property
    def labels(self):
        return (as_label(self.label),)


@dataclass(frozen=True)
class BellMeasurement:
    first: LabelLike
    second: LabelLike

    def __post_init__(self):
        if as_label(self.first) == as_label(self.second):
            raise SameParticle(f"Bell measurement needs two distinct particles, got {self.first} twice")

    @property
    def labels(self):
        return (as_label(self.first), as_label(self.second))


Measurement = Union[SingleMeasurement, BellMeasurement]


@dataclass(frozen=True)
class Branch:
    """One measurement record: outcomes in plan order, joint probability and
    the normalized post-measurement state (``None`` when the branch has
    probability below 1e-15)."""

    outcomes: tuple[Outcome, ...]
    probability: float
    state: StateVector | None

    @property
    def outcome(self) -> Outcome:
        return self.outcomes[-1]

    @property
    def absent(self) -> bool:
        return self.state is None


def _rng(rng) -> np.random.Generator:
    return np.random.default_rng(rng)


def _measurement_basis(d: int, meas: Measurement) -> np.ndarray:
    if isinstance(meas, BellMeasurement):
        return bell_matrix(d)
    return basis_matrix(d, meas.basis)


def _outcome_of(meas: Measurement, index: int, d: int) -> Outcome:
    if isinstance(meas, BellMeasurement):
        return BellOutcome(*divmod(index, d))
    return SingleOutcome(index, Basis(meas.basis))


def _partial_amplitudes(
    s: StateVector, labels: Sequence[LabelLike], vectors: np.ndarray
) -> tuple[np.ndarray, ParticleRegistry]:
    """Contract ``<vector_i|`` over ``labels`` for every column ``i`` of ``vectors``.

    Returns the unnormalized residual amplitudes, shape (columns, d^rest),
    and the registry of the remaining particles.
    """
    positions = [s.registry.position(lab) for lab in labels]
    t = np.moveaxis(s.as_tensor(), positions, list(range(len(positions))))
    t = t.reshape(s.d ** len(positions), -1)
    return vectors.conj().T @ t, s.registry.without(labels)


def outcome_amplitudes(s: StateVector, meas: Measurement) -> tuple[np.ndarray, ParticleRegistry]:
    return _partial_amplitudes(s, meas.labels, _measurement_basis(s.d, meas))


def outcome_probabilities(s: StateVector, meas: Measurement) -> np.ndarray:
    amps, _ = outcome_amplitudes(s, meas)
    return np.einsum("ij,ij->i", amps.conj(), amps).real


def sample_index(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw from a (possibly slightly unnormalized) probability vector."""
    p = np.where(probs < ZERO_PROB, 0.0, probs)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    idx = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(idx, len(p) - 1)


def project_onto(
    s: StateVector, labels: Sequence[LabelLike], vector: StateVector
) -> tuple[float, StateVector | None]:
    """Project the particles ``labels`` of ``s`` onto ``vector``.

    Returns the Born probability and the normalized state of the remaining
    particles, or ``None`` in place of the state when the probability is
    below 1e-15.
    """
    labels = [as_label(lab) for lab in labels]
    if vector.d != s.d:
        raise DimensionMismatch(f"vector has d={vector.d}, state has d={s.d}")
    if vector.num_qudits != len(labels):
        raise LengthMismatch(
            f"vector lives on {vector.num_qudits} particles, {len(labels)} labels given"
        )
    amps, rest = _partial_amplitudes(s, labels, vector.amplitudes.reshape(-1, 1))
    amps = amps[0]
    prob = float(np.vdot(amps, amps).real)
    if prob < ZERO_PROB:
        return prob, None
    return prob, StateVector(rest, amps / np.sqrt(prob))


def measure(s: StateVector, meas: Measurement, rng=None) -> Branch:
    amps, rest = outcome_amplitudes(s, meas)
    probs = np.einsum("ij,ij->i", amps.conj(), amps).real
    idx = sample_index(probs, _rng(rng))
    prob = float(probs[idx])
    return Branch((_outcome_of(meas, idx, s.d),), prob, StateVector(rest, amps[idx] / np.sqrt(prob)))


def measure_single(s: StateVector, label: LabelLike, basis: Basis | str, rng=None) -> Branch:
    return measure(s, SingleMeasurement(as_label(label), Basis(basis)), rng)


def measure_bell(s: StateVector, a: LabelLike, b: LabelLike, rng=None) -> Branch:
    """Generalized Bell-state measurement on ``(a, b)``; outcome ``(u, v)`` labels ``psi_uv``."""
    return measure(s, BellMeasurement(as_label(a), as_label(b)), rng)


def _outcome_count(d: int, meas: Measurement) -> int:
    return d * d if isinstance(meas, BellMeasurement) else d


def branch_count(d: int, plan: Sequence[Measurement]) -> int:
    total = 1
    for meas in plan:
        total *= _outcome_count(d, meas)
    return total


def _check_plan(s: StateVector, plan: Sequence[Measurement]) -> None:
    seen = set()
    for meas in plan:
        for lab in meas.labels:
            s.registry.position(lab)
            if lab in seen:
                raise SameParticle(f"particle {lab} is measured twice in the plan")
            seen.add(lab)


def enumerate_branches(
    s: StateVector, plan: Sequence[Measurement], *, branch_cap: int = DEFAULT_BRANCH_CAP
) -> list[Branch]:
    """Every outcome sequence of ``plan`` applied to ``s``, in lexicographic
    outcome order, with joint probabilities and collapsed states."""
    plan = list(plan)
    _check_plan(s, plan)
    total = branch_count(s.d, plan)
    if total > branch_cap:
        raise BranchCapExceeded(f"{total} branches exceeds the enumeration cap of {branch_cap}")

    out: list[Branch] = []

    def absent_tail(prefix, prob, step):
        tails = [
            [_outcome_of(meas, i, s.d) for i in range(_outcome_count(s.d, meas))]
            for meas in plan[step:]
        ]
        combos = list(itertools.product(*tails))
        # conditional probabilities are undefined past a vanished branch; spread
        # the residual mass evenly so the total stays exact
        for tail in combos:
            out.append(Branch(prefix + tail, prob / len(combos), None))

    def walk(state, prefix, prob, step):
        if step == len(plan):
            out.append(Branch(prefix, prob, state))
            return
        meas = plan[step]
        amps, rest = outcome_amplitudes(state, meas)
        probs = np.einsum("ij,ij->i", amps.conj(), amps).real
        for idx, p in enumerate(probs):
            outcome = (_outcome_of(meas, idx, s.d),)
            joint = prob * float(p)
            if joint < ZERO_PROB:
                absent_tail(prefix + outcome, joint, step + 1)
            else:
                walk(StateVector(rest, amps[idx] / np.sqrt(p)), prefix + outcome, joint, step + 1)

    walk(s, (), 1.0, 0)
    return out
