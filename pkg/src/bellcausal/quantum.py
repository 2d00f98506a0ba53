"""Two-qubit Bell experiments as joint distributions over S, T, A, B.

The state is sqrt(p)|+z,+z> + sqrt(1-p)|-z,-z>. Each wing measures spin
along one of two unit axes chosen by its setting bit; outcome +1 is recorded
as bit 0 and -1 as bit 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DEFAULT_TOL, FLOAT, JointDistribution

Axis = tuple[float, float, float]

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

Z_AXIS: Axis = (0.0, 0.0, 1.0)
X_AXIS: Axis = (1.0, 0.0, 0.0)


class BellSpecError(ValueError):
    pass


def check_axis(n: Axis) -> Axis:
    n = tuple(float(c) for c in n)
    if len(n) != 3 or abs(math.sqrt(sum(c * c for c in n)) - 1) > 1e-12:
        raise BellSpecError(f"measurement axis {n} is not a unit vector")
    return n  # type: ignore[return-value]


@dataclass(frozen=True)
class BellSpec:
    p: float
    left: tuple[Axis, Axis]
    right: tuple[Axis, Axis]
    settings_prior: tuple[tuple[float, float], tuple[float, float]] = ((0.25, 0.25), (0.25, 0.25))
    kind: str = field(default="custom", compare=False)

    def __post_init__(self) -> None:
        if not 0 <= self.p <= 1:
            raise BellSpecError(f"state weight p={self.p} outside [0, 1]")
        object.__setattr__(self, "left", tuple(check_axis(a) for a in self.left))
        object.__setattr__(self, "right", tuple(check_axis(a) for a in self.right))
        prior = np.asarray(self.settings_prior, dtype=float)
        if prior.shape != (2, 2) or np.any(prior < 0) or abs(prior.sum() - 1) > 1e-12:
            raise BellSpecError("settings prior must be a normalized 2x2 table")

    @property
    def state(self) -> np.ndarray:
        return np.array([math.sqrt(self.p), 0, 0, math.sqrt(1 - self.p)], dtype=complex)


def preset_spec(kind: str, p: float = 0.5) -> BellSpec:
    """EPR: z or x on both wings. CHSH: z or x on the left, (z+x)/sqrt2 or (z-x)/sqrt2 on the right."""
    if not 0 <= p <= 1:
        raise BellSpecError(f"state weight p={p} outside [0, 1]")
    if kind == "epr":
        return BellSpec(p, (Z_AXIS, X_AXIS), (Z_AXIS, X_AXIS), kind="epr")
    if kind == "chsh":
        r = 1 / math.sqrt(2)
        return BellSpec(p, (Z_AXIS, X_AXIS), ((r, 0.0, r), (-r, 0.0, r)), kind="chsh")
    raise BellSpecError(f"unknown preset {kind!r}; expected 'epr' or 'chsh'")


def _projector(n: Axis, outcome_bit: int) -> np.ndarray:
    sign = 1 if outcome_bit == 0 else -1
    n_sigma = sum(c * s for c, s in zip(n, _PAULI))
    return 0.5 * (np.eye(2, dtype=complex) + sign * n_sigma)


def outcome_distribution(spec: BellSpec, s: int, t: int) -> np.ndarray:
    """P(A, B | S=s, T=t) as a 2x2 array indexed [a, b]."""
    psi = spec.state
    out = np.empty((2, 2))
    for a in (0, 1):
        for b in (0, 1):
            op = np.kron(_projector(spec.left[s], a), _projector(spec.right[t], b))
            out[a, b] = float(np.real(np.vdot(psi, op @ psi)))
    # expectations of projectors are nonnegative; drop round-off below zero
    return np.clip(out, 0.0, None)


def bell_joint(spec: BellSpec, tol: float = DEFAULT_TOL) -> JointDistribution:
    probs = np.empty((2, 2, 2, 2))
    for s in (0, 1):
        for t in (0, 1):
            probs[s, t] = spec.settings_prior[s][t] * outcome_distribution(spec, s, t)
    return JointDistribution(("S", "T", "A", "B"), (2, 2, 2, 2), probs, FLOAT, tol)


def correlator(spec: BellSpec, s: int, t: int) -> float:
    """E(s, t) = P(A = B) - P(A != B)."""
    table = outcome_distribution(spec, s, t)
    return float(table[0, 0] + table[1, 1] - table[0, 1] - table[1, 0])


def chsh_value(spec: BellSpec) -> float:
    """E00 + E01 + E10 - E11."""
    return correlator(spec, 0, 0) + correlator(spec, 0, 1) + correlator(spec, 1, 0) - correlator(spec, 1, 1)
