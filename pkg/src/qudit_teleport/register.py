"""Dense state vectors over labelled registers of d-level particles.

Tensor-order convention: the first label of a registry is the most
significant base-``d`` digit of the flat amplitude index, so a state on
``(a, b)`` stores the amplitude of ``|i>_a |j>_b`` at ``i * d + j``.
States are treated as immutable values; every operation returns a new one.
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    CapExceeded,
    DimensionMismatch,
    DuplicateLabel,
    LabelCollision,
    LengthMismatch,
    NotNormalized,
    NotUnitary,
    RegistryMismatch,
    UnknownLabel,
)

DEFAULT_AMP_CAP = 2**26
INPUT_NORM_TOL = 1e-6
UNITARY_TOL = 1e-9


class Role(enum.Enum):
    MESSAGE = "message"
    CHANNEL = "channel"
    DECOY = "decoy"


_LABEL_RE = re.compile(r"^(?:(x)(\d+)|(p)(\d+)[_,](\d+)|(y)(\d+))$")


@dataclass(frozen=True)
class ParticleLabel:
    """Name of one particle: ``x<k>`` (message), ``p<k>_<j>`` (channel), ``y<k>`` (decoy)."""

    role: Role
    k: int
    j: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"particle index k must be >= 1, got {self.k}")
        if (self.role is Role.CHANNEL) != (self.j is not None):
            raise ValueError("only channel particles carry a second index")
        if self.j is not None and self.j < 0:
            raise ValueError(f"channel index j must be >= 0, got {self.j}")

    def __str__(self) -> str:
        if self.role is Role.MESSAGE:
            return f"x{self.k}"
        if self.role is Role.CHANNEL:
            return f"p{self.k}_{self.j}"
        return f"y{self.k}"

    @classmethod
    def parse(cls, text: str) -> "ParticleLabel":
        m = _LABEL_RE.match(text.strip())
        if m is None:
            raise ValueError(f"cannot parse particle label {text!r}")
        if m.group(1):
            return cls(Role.MESSAGE, int(m.group(2)))
        if m.group(3):
            return cls(Role.CHANNEL, int(m.group(4)), int(m.group(5)))
        return cls(Role.DECOY, int(m.group(7)))


def message(k: int) -> ParticleLabel:
    return ParticleLabel(Role.MESSAGE, k)


def channel(k: int, j: int) -> ParticleLabel:
    return ParticleLabel(Role.CHANNEL, k, j)


LabelLike = Union[ParticleLabel, str]


def as_label(label: LabelLike) -> ParticleLabel:
    if isinstance(label, ParticleLabel):
        return label
    return ParticleLabel.parse(label)


def index_of_digits(digits: Sequence[int], d: int) -> int:
    """Flat amplitude index of the basis state ``|digits>`` (first digit most significant)."""
    index = 0
    for digit in digits:
        index = index * d + int(digit)
    return index


def digits_of_index(index: int, d: int, count: int) -> tuple[int, ...]:
    out = []
    for _ in range(count):
        index, digit = divmod(index, d)
        out.append(digit)
    return tuple(reversed(out))


@dataclass(frozen=True)
class ParticleRegistry:
    """Ordered particle labels of a register, all of local dimension ``d``."""

    d: int
    labels: tuple[ParticleLabel, ...]

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if len(set(self.labels)) != len(self.labels):
            seen, dupes = set(), []
            for lab in self.labels:
                if lab in seen:
                    dupes.append(str(lab))
                seen.add(lab)
            raise DuplicateLabel(f"duplicate labels: {', '.join(dupes)}")

    @classmethod
    def of(cls, d: int, labels: Iterable[LabelLike]) -> "ParticleRegistry":
        return cls(d, tuple(as_label(lab) for lab in labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label) -> bool:
        return as_label(label) in self._positions

    @property
    def _positions(self) -> dict[ParticleLabel, int]:
        # frozen dataclass: cache through object.__setattr__
        try:
            return self.__dict__["_pos_cache"]
        except KeyError:
            pos = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_pos_cache", pos)
            return pos

    def position(self, label: LabelLike) -> int:
        try:
            return self._positions[as_label(label)]
        except KeyError:
            raise UnknownLabel(f"particle {label} is not in the register") from None

    def without(self, labels: Iterable[LabelLike]) -> "ParticleRegistry":
        drop = {as_label(lab) for lab in labels}
        for lab in drop:
            self.position(lab)
        return ParticleRegistry(self.d, tuple(lab for lab in self.labels if lab not in drop))

    def size(self) -> int:
        return self.d ** len(self.labels)


class StateVector:
    """A normalized pure state on a :class:`ParticleRegistry`.

    The amplitude array is read-only; build new states through the module
    functions instead of mutating.
    """

    __slots__ = ("registry", "amplitudes")

    def __init__(self, registry: ParticleRegistry, amplitudes: np.ndarray):
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != registry.size():
            raise LengthMismatch(
                f"{amps.size} amplitudes given for {len(registry)} qudits of d={registry.d} "
                f"(expected {registry.size()})"
            )
        amps.flags.writeable = False
        self.registry = registry
        self.amplitudes = amps

    @property
    def d(self) -> int:
        return self.registry.d

    @property
    def labels(self) -> tuple[ParticleLabel, ...]:
        return self.registry.labels

    @property
    def num_qudits(self) -> int:
        return len(self.registry)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def as_tensor(self) -> np.ndarray:
        """View the amplitudes as a rank-T tensor with one axis per particle."""
        return self.amplitudes.reshape((self.d,) * self.num_qudits)

    def amplitude(self, digits: Sequence[int]) -> complex:
        if len(digits) != self.num_qudits:
            raise LengthMismatch("one digit per particle is required")
        return complex(self.amplitudes[index_of_digits(digits, self.d)])

    def __repr__(self) -> str:
        labels = ",".join(str(lab) for lab in self.labels)
        return f"StateVector(d={self.d}, labels=[{labels}], norm={self.norm():.12g})"


def check_cap(d: int, num_qudits: int, amp_cap: int = DEFAULT_AMP_CAP) -> None:
    if d**num_qudits > amp_cap:
        raise CapExceeded(
            f"{d}^{num_qudits} = {d**num_qudits} amplitudes exceeds the cap of {amp_cap}"
        )


def from_amplitudes(
    d: int,
    labels: Sequence[LabelLike],
    amps: Sequence[complex] | np.ndarray,
    *,
    amp_cap: int = DEFAULT_AMP_CAP,
) -> StateVector:
    """Build a state from explicit amplitudes in registry order.

    Raises :class:`NotNormalized` when the L2 norm is off by more than 1e-6;
    the input is never silently renormalized.
    """
    registry = ParticleRegistry.of(d, labels)
    check_cap(d, len(registry), amp_cap)
    state = StateVector(registry, np.asarray(amps, dtype=np.complex128))
    norm = state.norm()
    if abs(norm - 1.0) > INPUT_NORM_TOL:
        raise NotNormalized(f"state norm is {norm!r}, expected 1")
    return state


def basis_state(d: int, labels: Sequence[LabelLike], digits: Sequence[int]) -> StateVector:
    registry = ParticleRegistry.of(d, labels)
    if len(digits) != len(registry):
        raise LengthMismatch("one digit per label is required")
    if any(not 0 <= x < d for x in digits):
        raise ValueError(f"digits must lie in [0, {d}): {list(digits)}")
    amps = np.zeros(registry.size(), dtype=np.complex128)
    amps[index_of_digits(digits, d)] = 1.0
    return StateVector(registry, amps)


def random_state(d: int, labels: Sequence[LabelLike], rng: np.random.Generator) -> StateVector:
    """Haar-like random state: complex Gaussian amplitudes, then normalized."""
    registry = ParticleRegistry.of(d, labels)
    size = registry.size()
    amps = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return StateVector(registry, amps / np.linalg.norm(amps))


def tensor(a: StateVector, b: StateVector, *, amp_cap: int = DEFAULT_AMP_CAP) -> StateVector:
    if a.d != b.d:
        raise DimensionMismatch(f"cannot combine d={a.d} with d={b.d}")
    clash = set(a.labels) & set(b.labels)
    if clash:
        raise LabelCollision(f"labels on both sides: {sorted(str(x) for x in clash)}")
    check_cap(a.d, a.num_qudits + b.num_qudits, amp_cap)
    registry = ParticleRegistry(a.d, a.labels + b.labels)
    return StateVector(registry, np.kron(a.amplitudes, b.amplitudes))


def tensor_all(states: Iterable[StateVector], *, amp_cap: int = DEFAULT_AMP_CAP) -> StateVector:
    states = list(states)
    if not states:
        raise ValueError("need at least one state")
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s, amp_cap=amp_cap)
    return out


def _same_registry(a: StateVector, b: StateVector) -> None:
    if a.registry != b.registry:
        raise RegistryMismatch(
            f"registries differ: d={a.d} {[str(x) for x in a.labels]} "
            f"vs d={b.d} {[str(x) for x in b.labels]}"
        )


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    _same_registry(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """Pure-state fidelity |<a|b>|^2; blind to global phase."""
    return float(abs(inner_product(a, b)) ** 2)


def relabel(s: StateVector, labels: Sequence[LabelLike]) -> StateVector:
    """Rename the particles of ``s`` position by position; amplitudes are untouched."""
    if len(labels) != s.num_qudits:
        raise LengthMismatch("relabel needs one new label per particle")
    return StateVector(ParticleRegistry.of(s.d, labels), s.amplitudes)


def apply_on_axis(s: StateVector, position: int, matrix: np.ndarray) -> StateVector:
    """Apply a d x d matrix to the tensor slot at ``position`` without checks."""
    t = s.as_tensor()
    t = np.tensordot(matrix, t, axes=([1], [position]))
    t = np.moveaxis(t, 0, position)
    return StateVector(s.registry, t)


def apply_single_qudit_unitary(s: StateVector, label: LabelLike, unitary) -> StateVector:
    U = np.asarray(getattr(unitary, "matrix", unitary), dtype=np.complex128)
    if U.shape != (s.d, s.d):
        raise DimensionMismatch(f"expected a {s.d}x{s.d} matrix, got shape {U.shape}")
    if not np.allclose(U.conj().T @ U, np.eye(s.d), rtol=0.0, atol=UNITARY_TOL):
        raise NotUnitary("matrix fails U^dagger U = I within 1e-9")
    return apply_on_axis(s, s.registry.position(label), U)


# -- JSON state-spec files ---------------------------------------------------

def state_to_spec(s: StateVector) -> dict:
    return {
        "d": s.d,
        "labels": [str(lab) for lab in s.labels],
        "amplitudes": [[float(z.real), float(z.imag)] for z in s.amplitudes],
    }


def state_from_spec(spec: dict, *, amp_cap: int = DEFAULT_AMP_CAP) -> StateVector:
    try:
        d = int(spec["d"])
        labels = list(spec["labels"])
        raw = spec["amplitudes"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state spec: {exc}") from None
    amps = []
    for entry in raw:
        if isinstance(entry, (int, float)):
            amps.append(complex(entry))
        else:
            re_, im_ = entry
            amps.append(complex(re_, im_))
    return from_amplitudes(d, labels, amps, amp_cap=amp_cap)


def load_state(path: str | Path, *, amp_cap: int = DEFAULT_AMP_CAP) -> StateVector:
    with open(path) as fh:
        return state_from_spec(json.load(fh), amp_cap=amp_cap)


def save_state(s: StateVector, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_spec(s), fh, indent=2)
        fh.write("\n")
