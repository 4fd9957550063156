"""Controlled teleportation of an m-qudit state through m GHZ channels.

Particle naming: the message occupies ``x1..xm``.  Channel ``k`` is a GHZ
state on ``p{k}_0 .. p{k}_{n+1}``: ``p{k}_0`` belongs to the sender,
``p{k}_j`` (1 <= j <= n) to controller ``j`` and ``p{k}_{n+1}`` to the
receiver.  A run proceeds as

1. the sender makes a generalized Bell measurement on ``(x_k, p{k}_0)`` for
   k = 1..m, giving ``alpha[k] = (a1, a2)``;
2. every controller measures each of their particles in the Fourier basis,
   in (k, j) order, giving ``beta[k][j]``;
3. the receiver applies ``U_{p_k q_k}`` to ``p{k}_{n+1}`` with
   ``p_k = a1 + sum_j beta[k][j]`` and ``q_k = -a2`` (both mod d).

The receiver then holds the message up to the global phase
``exp(2 pi i / d * sum_k a1 * a2)``.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BranchCapExceeded,
    CapExceeded,
    DimensionMismatch,
    IndexOutOfRange,
    OutOfOrder,
    RegistryMismatch,
    ShapeMismatch,
    UnknownLabel,
)
from .gates import Basis, generalized_pauli, ghz_state
from .measurement import (
    DEFAULT_BRANCH_CAP,
    BellMeasurement,
    Branch,
    SingleMeasurement,
    enumerate_branches,
    measure,
)
from .register import (
    DEFAULT_AMP_CAP,
    ParticleLabel,
    Role,
    StateVector,
    apply_single_qudit_unitary,
    channel,
    fidelity,
    inner_product,
    message,
    relabel,
    tensor,
    tensor_all,
)

FIDELITY_TOL = 1e-9
PROB_SUM_TOL = 1e-9
PHASE_TOL = 1e-6


@dataclass(frozen=True)
class ProtocolConfig:
    d: int
    m: int
    n: int
    amp_cap: int = DEFAULT_AMP_CAP
    branch_cap: int = DEFAULT_BRANCH_CAP

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.composite_size > self.amp_cap:
            raise CapExceeded(
                f"composite state needs {self.d}^{self.composite_qudits} = {self.composite_size} "
                f"amplitudes, cap is {self.amp_cap}"
            )

    @property
    def composite_qudits(self) -> int:
        return self.m * (self.n + 3)

    @property
    def composite_size(self) -> int:
        return self.d**self.composite_qudits

    @property
    def num_branches(self) -> int:
        return self.d ** (self.m * (self.n + 2))

    def message_labels(self) -> list[ParticleLabel]:
        return [message(k) for k in range(1, self.m + 1)]

    def ghz_labels(self, k: int) -> list[ParticleLabel]:
        return [channel(k, j) for j in range(self.n + 2)]

    def receiver_labels(self) -> list[ParticleLabel]:
        return [channel(k, self.n + 1) for k in range(1, self.m + 1)]

    def sender_plan(self) -> list[BellMeasurement]:
        return [BellMeasurement(message(k), channel(k, 0)) for k in range(1, self.m + 1)]

    def controller_plan(self) -> list[SingleMeasurement]:
        return [
            SingleMeasurement(channel(k, j), Basis.X)
            for k in range(1, self.m + 1)
            for j in range(1, self.n + 1)
        ]

    def to_dict(self) -> dict:
        return {"d": self.d, "m": self.m, "n": self.n,
                "amp_cap": self.amp_cap, "branch_cap": self.branch_cap}


@dataclass(frozen=True)
class Transcript:
    """Classical messages of one run: sender outcomes, controller outcomes and
    the receiver's correction indices."""

    alpha: tuple[tuple[int, int], ...]
    beta: tuple[tuple[int, ...], ...]
    corrections: tuple[tuple[int, int], ...]

    @classmethod
    def from_outcomes(cls, alpha, beta, d: int) -> "Transcript":
        alpha = tuple((int(a1), int(a2)) for a1, a2 in alpha)
        beta = tuple(tuple(int(b) for b in row) for row in beta)
        return cls(alpha, beta, tuple(compute_correction(alpha, beta, d)))

    def global_phase(self, d: int) -> float:
        """Expected relative phase in [0, 2 pi) between corrected and input state."""
        return 2 * math.pi * (sum(a1 * a2 for a1, a2 in self.alpha) % d) / d


def eta_q(m: int, n: int, decoy_count: int = 0) -> float:
    """Fraction of transmitted qudits that carry the teleported state."""
    useful = m * (n + 2)
    return useful / (useful + decoy_count)


def compute_correction(alpha, beta, d: int) -> list[tuple[int, int]]:
    """Correction indices ``(p_k, q_k)`` for every message qudit.

    ``alpha`` is m x 2, ``beta`` is m x n (rows may be empty when n = 0).
    """
    if len(alpha) != len(beta):
        raise ShapeMismatch(f"alpha has {len(alpha)} rows, beta has {len(beta)}")
    widths = {len(row) for row in beta}
    if len(widths) > 1:
        raise ShapeMismatch("beta rows have different lengths")
    out = []
    for pair, row in zip(alpha, beta):
        if len(pair) != 2:
            raise ShapeMismatch("each alpha row holds exactly two outcomes")
        for value in (*pair, *row):
            if not 0 <= value < d:
                raise IndexOutOfRange(f"outcome {value} outside [0, {d})")
        a1, a2 = pair
        out.append(((a1 + sum(row)) % d, (d - a2) % d))
    return out


def build_channel(config: ProtocolConfig) -> StateVector:
    """The m GHZ states, tensored in k order."""
    return tensor_all(
        (ghz_state(config.d, config.n + 2, config.ghz_labels(k)) for k in range(1, config.m + 1)),
        amp_cap=config.amp_cap,
    )


def _check_input(config: ProtocolConfig, state: StateVector) -> None:
    if state.d != config.d:
        raise DimensionMismatch(f"input has d={state.d}, config has d={config.d}")
    if list(state.labels) != config.message_labels():
        raise RegistryMismatch(
            f"input must live on {[str(x) for x in config.message_labels()]}, "
            f"got {[str(x) for x in state.labels]}"
        )


def prepare(config: ProtocolConfig, state: StateVector) -> StateVector:
    """Message state tensored with the full channel (message particles first)."""
    _check_input(config, state)
    return tensor(state, build_channel(config), amp_cap=config.amp_cap)


def alice_measure(s: StateVector, config: ProtocolConfig, rng) -> tuple[list[tuple[int, int]], StateVector, float]:
    """Sample the sender's m Bell measurements.

    Returns the outcomes, the collapsed state of the remaining particles and
    the joint probability of the sampled outcomes.
    """
    rng = np.random.default_rng(rng)
    alpha, prob = [], 1.0
    for meas in config.sender_plan():
        branch = measure(s, meas, rng)
        alpha.append(tuple(branch.outcome))
        prob *= branch.probability
        s = branch.state
    return alpha, s, prob


def alice_branches(s: StateVector, config: ProtocolConfig) -> list[Branch]:
    return enumerate_branches(s, config.sender_plan(), branch_cap=config.branch_cap)


def _require_sender_done(s: StateVector, config: ProtocolConfig) -> None:
    if any(lab in s.registry for lab in config.message_labels()):
        raise OutOfOrder("controllers measure only after the sender's Bell measurements")


def controllers_measure(s: StateVector, config: ProtocolConfig, rng) -> tuple[list[list[int]], StateVector, float]:
    _require_sender_done(s, config)
    rng = np.random.default_rng(rng)
    beta = [[] for _ in range(config.m)]
    prob = 1.0
    for meas in config.controller_plan():
        branch = measure(s, meas, rng)
        beta[meas.label.k - 1].append(branch.outcome.value)
        prob *= branch.probability
        s = branch.state
    return beta, s, prob


def controller_branches(s: StateVector, config: ProtocolConfig) -> list[Branch]:
    _require_sender_done(s, config)
    return enumerate_branches(s, config.controller_plan(), branch_cap=config.branch_cap)


def _receiver_label(s: StateVector, k: int) -> ParticleLabel:
    for lab in s.labels:
        if lab.role is Role.CHANNEL and lab.k == k:
            return lab
    raise UnknownLabel(f"no channel particle for message qudit {k} in the register")


def charlie_correct(s: StateVector, corrections: Sequence[tuple[int, int]]) -> StateVector:
    """Apply ``U_{p_k q_k}`` to the receiver's particle of channel k for each k."""
    if len(corrections) != s.num_qudits:
        raise ShapeMismatch(
            f"{len(corrections)} corrections for a register of {s.num_qudits} particles"
        )
    for k, (p, q) in enumerate(corrections, start=1):
        s = apply_single_qudit_unitary(s, _receiver_label(s, k), generalized_pauli(s.d, p, q))
    return s


def corrupt_corrections(corrections: Sequence[tuple[int, int]], d: int) -> list[tuple[int, int]]:
    """Deliberately wrong corrections: shift both indices of the first pair by one."""
    out = list(corrections)
    p, q = out[0]
    out[0] = ((p + 1) % d, (q + 1) % d)
    return out


def phase_error(overlap: complex, expected: float) -> float:
    """Signed angle in (-pi, pi] between ``arg(overlap)`` and ``expected``."""
    return cmath.phase(overlap * cmath.exp(-1j * expected))


@dataclass
class BranchRecord:
    alpha: list[list[int]]
    beta: list[list[int]]
    p: list[int]
    q: list[int]
    probability: float
    fidelity: float
    phase_ok: bool

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "p": self.p,
            "q": self.q,
            "probability": self.probability,
            "fidelity": self.fidelity,
            "phase_ok": self.phase_ok,
        }


@dataclass
class RunReport:
    config: ProtocolConfig
    mode: str
    seed: int | None
    branches: list[BranchRecord] = field(default_factory=list)
    eta_q: float = 1.0

    @property
    def min_fidelity(self) -> float:
        return min(b.fidelity for b in self.branches)

    @property
    def prob_sum(self) -> float:
        return math.fsum(b.probability for b in self.branches)

    @property
    def all_phase_ok(self) -> bool:
        return all(b.phase_ok for b in self.branches)

    @property
    def ok(self) -> bool:
        good = self.min_fidelity >= 1 - FIDELITY_TOL and self.all_phase_ok
        if self.mode == "all-branch":
            good = good and abs(self.prob_sum - 1) <= PROB_SUM_TOL
        return good

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "mode": self.mode,
            "seed": self.seed,
            "branches": [b.to_dict() for b in self.branches],
            "aggregate": {
                "min_fidelity": self.min_fidelity,
                "prob_sum": self.prob_sum,
                "eta_q": self.eta_q,
                "all_phase_ok": self.all_phase_ok,
                "num_branches": len(self.branches),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _record(
    config: ProtocolConfig,
    transcript: Transcript,
    probability: float,
    receiver: StateVector,
    state: StateVector,
    corrections: Sequence[tuple[int, int]],
) -> BranchRecord:
    corrected = relabel(charlie_correct(receiver, corrections), config.message_labels())
    overlap = inner_product(state, corrected)
    phase_ok = abs(phase_error(overlap, transcript.global_phase(config.d))) <= PHASE_TOL
    return BranchRecord(
        alpha=[list(a) for a in transcript.alpha],
        beta=[list(b) for b in transcript.beta],
        p=[int(p) for p, _ in corrections],
        q=[int(q) for _, q in corrections],
        probability=probability,
        fidelity=fidelity(state, corrected),
        phase_ok=phase_ok,
    )


def _receiver_in_k_order(s: StateVector, config: ProtocolConfig) -> StateVector:
    if list(s.labels) != config.receiver_labels():
        raise RegistryMismatch(
            f"expected only the receiver's particles, got {[str(x) for x in s.labels]}"
        )
    return s


def run_sampled(
    config: ProtocolConfig,
    state: StateVector,
    seed: int,
    *,
    decoy_count: int = 0,
    corrupt: bool = False,
) -> RunReport:
    """One seeded run of the whole protocol on ``state`` (labels ``x1..xm``)."""
    rng = np.random.default_rng(seed)
    s = prepare(config, state)
    alpha, s, p_alice = alice_measure(s, config, rng)
    beta, s, p_ctrl = controllers_measure(s, config, rng)
    transcript = Transcript.from_outcomes(alpha, beta, config.d)
    corrections = transcript.corrections
    if corrupt:
        corrections = corrupt_corrections(corrections, config.d)
    record = _record(config, transcript, p_alice * p_ctrl,
                     _receiver_in_k_order(s, config), state, corrections)
    return RunReport(config, "sampled", seed, [record], eta_q(config.m, config.n, decoy_count))


def _split_outcomes(branch: Branch, config: ProtocolConfig):
    alpha = [tuple(o) for o in branch.outcomes[: config.m]]
    flat = [o.value for o in branch.outcomes[config.m:]]
    beta = [flat[k * config.n:(k + 1) * config.n] for k in range(config.m)]
    return alpha, beta


def verify_all_branches(
    config: ProtocolConfig,
    state: StateVector,
    *,
    decoy_count: int = 0,
    corrupt: bool = False,
) -> RunReport:
    """Enumerate every sender/controller outcome and check the receiver's
    corrected state against ``state`` on each branch."""
    if config.num_branches > config.branch_cap:
        raise BranchCapExceeded(
            f"{config.num_branches} branches exceeds the enumeration cap of {config.branch_cap}"
        )
    composite = prepare(config, state)
    plan = [*config.sender_plan(), *config.controller_plan()]
    records = []
    for branch in enumerate_branches(composite, plan, branch_cap=config.branch_cap):
        alpha, beta = _split_outcomes(branch, config)
        transcript = Transcript.from_outcomes(alpha, beta, config.d)
        corrections = transcript.corrections
        if corrupt:
            corrections = corrupt_corrections(corrections, config.d)
        if branch.state is None:
            records.append(BranchRecord(
                alpha=[list(a) for a in transcript.alpha],
                beta=[list(b) for b in transcript.beta],
                p=[p for p, _ in corrections], q=[q for _, q in corrections],
                probability=branch.probability, fidelity=0.0, phase_ok=False,
            ))
            continue
        records.append(_record(config, transcript, branch.probability,
                               _receiver_in_k_order(branch.state, config), state, corrections))
    report = RunReport(config, "all-branch", None, records, eta_q(config.m, config.n, decoy_count))
    if abs(report.prob_sum - 1) > PROB_SUM_TOL:
        raise AssertionError(f"branch probabilities sum to {report.prob_sum!r}")
    return report
