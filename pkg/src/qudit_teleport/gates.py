"""Computational and Fourier bases, generalized Bell states, shift-and-phase
unitaries and GHZ states for d-level systems.

All roots of unity are evaluated as ``exp(2j*pi*(a % d)/d)`` so the exponent is
reduced before the complex exponential is taken.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import IndexOutOfRange, LengthMismatch
from .register import LabelLike, ParticleRegistry, StateVector


class Basis(enum.Enum):
    Z = "Z"
    X = "X"


def _check_index(name: str, value: int, d: int) -> None:
    if not 0 <= value < d:
        raise IndexOutOfRange(f"{name}={value} outside [0, {d})")


def root_of_unity(exponent, d: int):
    """exp(2*pi*i*exponent/d) with ``exponent`` reduced mod d first (array-friendly)."""
    return np.exp(2j * np.pi * (np.asarray(exponent) % d) / d)


@lru_cache(maxsize=None)
def _basis_matrix(d: int, basis: Basis) -> np.ndarray:
    if basis is Basis.Z:
        m = np.eye(d, dtype=np.complex128)
    else:
        l = np.arange(d)
        # column u holds |u>_x
        m = root_of_unity(np.outer(l, l), d) / np.sqrt(d)
    m.flags.writeable = False
    return m


def basis_matrix(d: int, basis: Basis | str) -> np.ndarray:
    """d x d matrix whose column ``u`` is the ``u``-th vector of ``basis``."""
    return _basis_matrix(d, Basis(basis))


def z_basis_vector(d: int, k: int, label: LabelLike = "y1") -> StateVector:
    _check_index("k", k, d)
    return StateVector(ParticleRegistry.of(d, [label]), basis_matrix(d, Basis.Z)[:, k])


def x_basis_vector(d: int, u: int, label: LabelLike = "y1") -> StateVector:
    """Fourier-basis vector ``|u>_x = d^{-1/2} sum_l w^{ul} |l>`` with ``w = exp(2 pi i/d)``."""
    _check_index("u", u, d)
    return StateVector(ParticleRegistry.of(d, [label]), basis_matrix(d, Basis.X)[:, u])


def basis_vector(d: int, basis: Basis | str, value: int, label: LabelLike = "y1") -> StateVector:
    if Basis(basis) is Basis.Z:
        return z_basis_vector(d, value, label)
    return x_basis_vector(d, value, label)


@lru_cache(maxsize=None)
def _bell_matrix(d: int) -> np.ndarray:
    m = np.zeros((d * d, d * d), dtype=np.complex128)
    l = np.arange(d)
    for u in range(d):
        for v in range(d):
            m[l * d + (l + v) % d, u * d + v] = root_of_unity(l * u, d) / np.sqrt(d)
    m.flags.writeable = False
    return m


def bell_matrix(d: int) -> np.ndarray:
    """d^2 x d^2 matrix whose column ``u*d + v`` is the Bell vector ``psi_uv``."""
    return _bell_matrix(d)


def bell_state(d: int, u: int, v: int, labels: Sequence[LabelLike] = ("y1", "y2")) -> StateVector:
    """``psi_uv = d^{-1/2} sum_l w^{lu} |l> (x) |l+v mod d>``.

    The first label carries the ``|l>`` slot and the second the shifted slot.
    """
    _check_index("u", u, d)
    _check_index("v", v, d)
    if len(labels) != 2:
        raise LengthMismatch("a Bell state needs exactly two labels")
    return StateVector(ParticleRegistry.of(d, labels), bell_matrix(d)[:, u * d + v])


@dataclass(frozen=True)
class GeneralizedPauli:
    d: int
    u: int
    v: int
    matrix: np.ndarray

    @property
    def dagger(self) -> np.ndarray:
        return self.matrix.conj().T


def generalized_pauli(d: int, u: int, v: int) -> GeneralizedPauli:
    """``U_uv = sum_l w^{ul} |l+v mod d><l|``: phase by ``u`` then cyclic shift by ``v``.

    For d=2, ``U_01`` is the bit flip and ``U_10`` the phase flip.
    """
    _check_index("u", u, d)
    _check_index("v", v, d)
    l = np.arange(d)
    m = np.zeros((d, d), dtype=np.complex128)
    m[(l + v) % d, l] = root_of_unity(u * l, d)
    m.flags.writeable = False
    return GeneralizedPauli(d, u, v, m)


def ghz_state(d: int, parties: int, labels: Sequence[LabelLike]) -> StateVector:
    if parties < 2:
        raise ValueError(f"a GHZ state needs at least 2 parties, got {parties}")
    if len(labels) != parties:
        raise LengthMismatch(f"{parties} parties but {len(labels)} labels")
    registry = ParticleRegistry.of(d, labels)
    amps = np.zeros(registry.size(), dtype=np.complex128)
    # |l,l,...,l> sits at l * (d^T - 1)/(d - 1)
    stride = (d**parties - 1) // (d - 1)
    amps[np.arange(d) * stride] = 1 / np.sqrt(d)
    return StateVector(registry, amps)
