"""Two-qubit X-states: construction, canonical form, spectra and entropies.

An X-state has non-zero entries only on the diagonal and anti-diagonal of its
4x4 density matrix in the computational basis ``|00>, |01>, |10>, |11>``.
Local phase rotations remove the phases of ``rho03`` and ``rho12``, so every
downstream computation works on :class:`CanonicalXState`, whose off-diagonal
entries are real and non-negative.

All entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

# Tolerances for positivity/trace checks.
CONSTRUCT_TOL = 1e-12
INPUT_TOL = 1e-9


class InvalidState(ValueError):
    """Raised when a state violates the trace or positivity invariants."""


class DomainError(ValueError):
    """Raised when an argument lies outside a function's domain."""


def _as_complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise InvalidState(f"complex entry must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


@dataclass(frozen=True)
class RawXState:
    """X-state with complex anti-diagonal coherences, as supplied by a user."""

    rho00: float
    rho11: float
    rho22: float
    rho33: float
    rho03: complex = 0j
    rho12: complex = 0j

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0], m[1, 1], m[2, 2], m[3, 3] = self.rho00, self.rho11, self.rho22, self.rho33
        m[0, 3] = self.rho03
        m[3, 0] = np.conj(self.rho03)
        m[1, 2] = self.rho12
        m[2, 1] = np.conj(self.rho12)
        return m

    @classmethod
    def from_dict(cls, data: dict) -> "RawXState":
        return cls(
            rho00=float(data["rho00"]),
            rho11=float(data["rho11"]),
            rho22=float(data["rho22"]),
            rho33=float(data["rho33"]),
            rho03=_as_complex(data.get("rho03", 0.0)),
            rho12=_as_complex(data.get("rho12", 0.0)),
        )


@dataclass(frozen=True)
class CanonicalXState:
    """Real X-state with ``rho03 >= 0`` and ``rho12 >= 0``.

    Construct through :func:`canonicalize`, :func:`from_bloch_params` or
    :meth:`checked`; the bare constructor does not validate.
    """

    rho00: float
    rho11: float
    rho22: float
    rho33: float
    rho03: float
    rho12: float

    @classmethod
    def checked(cls, rho00, rho11, rho22, rho33, rho03, rho12, tol=CONSTRUCT_TOL) -> "CanonicalXState":
        if rho03 < -tol or rho12 < -tol:
            raise InvalidState(
                f"canonical coherences must be non-negative (rho03={rho03}, rho12={rho12})"
            )
        _check_invariants(rho00, rho11, rho22, rho33, abs(rho03), abs(rho12), tol)
        return cls(rho00, rho11, rho22, rho33, max(rho03, 0.0), max(rho12, 0.0))

    def matrix(self) -> np.ndarray:
        """Dense 4x4 density matrix (real)."""
        m = np.diag([self.rho00, self.rho11, self.rho22, self.rho33]).astype(float)
        m[0, 3] = m[3, 0] = self.rho03
        m[1, 2] = m[2, 1] = self.rho12
        return m

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict, tol: float = INPUT_TOL) -> "CanonicalXState":
        return cls.checked(*(float(data[k]) for k in _STATE_FIELDS), tol=tol)


_STATE_FIELDS = ("rho00", "rho11", "rho22", "rho33", "rho03", "rho12")


@dataclass(frozen=True)
class BlochParams:
    """Correlation coefficients of an X-state.

    ``x = <Z_A>``, ``y = <Z_B>``, ``t = <Z_A Z_B>``, ``s = <X_A X_B>``,
    ``u = <Y_A Y_B>``.
    """

    x: float
    y: float
    t: float
    s: float
    u: float

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.t, self.s, self.u)

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> "BlochParams":
        return cls(*(float(data[k]) for k in ("x", "y", "t", "s", "u")))


@dataclass(frozen=True)
class Spectrum:
    """Four eigenvalues, sorted descending."""

    eigenvalues: tuple

    def __iter__(self):
        return iter(self.eigenvalues)

    def __getitem__(self, i):
        return self.eigenvalues[i]


def _check_invariants(r00, r11, r22, r33, a03, a12, tol):
    diag = (r00, r11, r22, r33)
    if any(d < -tol for d in diag):
        raise InvalidState(f"diagonal entries must be non-negative, got {diag}")
    trace = r00 + r11 + r22 + r33
    if abs(trace - 1.0) > tol:
        raise InvalidState(f"trace must be 1, got {trace!r}")
    if a03 * a03 > r00 * r33 + tol:
        raise InvalidState(
            f"positivity violated: |rho03|^2 = {a03 * a03!r} > rho00*rho33 = {r00 * r33!r}"
        )
    if a12 * a12 > r11 * r22 + tol:
        raise InvalidState(
            f"positivity violated: |rho12|^2 = {a12 * a12!r} > rho11*rho22 = {r11 * r22!r}"
        )


def canonicalize(raw: RawXState, tol: float = INPUT_TOL) -> CanonicalXState:
    """Bring an X-state to canonical form by local phase rotations.

    Rotations ``exp(i phi Z)`` on each qubit shift the phases of ``rho03`` and
    ``rho12`` independently, so replacing both coherences by their moduli
    yields a locally-equivalent state with identical discord.

    Raises:
        InvalidState: if the trace or positivity invariants fail beyond ``tol``.
    """
    a03, a12 = abs(raw.rho03), abs(raw.rho12)
    _check_invariants(raw.rho00, raw.rho11, raw.rho22, raw.rho33, a03, a12, tol)
    return CanonicalXState(
        float(raw.rho00), float(raw.rho11), float(raw.rho22), float(raw.rho33), a03, a12
    )


def bloch_params(state: CanonicalXState) -> BlochParams:
    r00, r11, r22, r33 = state.rho00, state.rho11, state.rho22, state.rho33
    return BlochParams(
        x=r00 + r11 - r22 - r33,
        y=r00 - r11 + r22 - r33,
        t=r00 - r11 - r22 + r33,
        s=2 * (state.rho12 + state.rho03),
        u=2 * (state.rho12 - state.rho03),
    )


def positivity_margins(p: BlochParams) -> tuple:
    """Return ``(1+t)^2 - (x+y)^2 - (s-u)^2`` and ``(1-t)^2 - (x-y)^2 - (s+u)^2``."""
    x, y, t, s, u = p.as_tuple()
    return (
        (1 + t) ** 2 - (x + y) ** 2 - (s - u) ** 2,
        (1 - t) ** 2 - (x - y) ** 2 - (s + u) ** 2,
    )


def is_physical(p: BlochParams, tol: float = CONSTRUCT_TOL) -> bool:
    if any(abs(v) > 1 + tol for v in p.as_tuple()):
        return False
    plus, minus = positivity_margins(p)
    return plus >= -tol and minus >= -tol


def from_bloch_params(p: BlochParams, tol: float = CONSTRUCT_TOL) -> CanonicalXState:
    """Invert :func:`bloch_params`, returning the canonical representative.

    When ``s < |u|`` one of the coherences comes out negative; taking its
    modulus is a local phase rotation, so the result has ``s' >= |u'|``.

    Raises:
        InvalidState: if the parameters describe no valid density matrix.
    """
    x, y, t, s, u = p.as_tuple()
    if any(abs(v) > 1 + tol for v in (x, y, t, s, u)):
        raise InvalidState(f"Bloch parameters must lie in [-1, 1], got {p.as_tuple()}")
    plus, minus = positivity_margins(p)
    if plus < -tol or minus < -tol:
        raise InvalidState(
            "positivity violated: (1+t)^2 >= (x+y)^2+(s-u)^2 and "
            f"(1-t)^2 >= (x-y)^2+(s+u)^2 require margins >= 0, got ({plus!r}, {minus!r})"
        )
    r00 = (1 + x + y + t) / 4
    r11 = (1 + x - y - t) / 4
    r22 = (1 - x + y - t) / 4
    r33 = (1 - x - y + t) / 4
    r03 = abs(s - u) / 4
    r12 = abs(s + u) / 4
    # Margins already validated; re-check in matrix-element form with slack for rounding.
    _check_invariants(r00, r11, r22, r33, r03, r12, tol + 1e-15)
    return CanonicalXState(r00, r11, r22, r33, r03, r12)


def binary_entropy(w):
    """Entropy in bits of a qubit whose Bloch vector has length ``|w|``.

    ``h(w) = -(1+w)/2 log2((1+w)/2) - (1-w)/2 log2((1-w)/2)``.

    Accepts scalars or arrays. Values with ``|w|`` up to ``1 + 1e-9`` are
    clamped to the unit interval.

    Raises:
        DomainError: if any ``|w| > 1 + 1e-9``.
    """
    w = np.abs(np.asarray(w, dtype=float))
    if np.any(w > 1 + INPUT_TOL):
        raise DomainError(f"binary_entropy needs |w| <= 1, got max |w| = {np.max(w)!r}")
    out = _h(w)
    return float(out) if out.ndim == 0 else out


def _h(w):
    # Unchecked, vectorised h for internal hot loops; w is |w|, possibly slightly > 1.
    w = np.minimum(w, 1.0)
    a = 0.5 * (1.0 + w)
    b = 0.5 * (1.0 - w)
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.where(a > 0, a * np.log2(np.where(a > 0, a, 1.0)), 0.0)
        lb = np.where(b > 0, b * np.log2(np.where(b > 0, b, 1.0)), 0.0)
    return -(la + lb)


def _block_eigs(a, b, c):
    q = math.sqrt((a - b) ** 2 + 4 * c * c)
    return (a + b + q) / 2, (a + b - q) / 2


def spectrum(state: CanonicalXState) -> Spectrum:
    """Closed-form eigenvalues from the two 2x2 blocks, sorted descending."""
    ev = _block_eigs(state.rho00, state.rho33, state.rho03) + _block_eigs(
        state.rho11, state.rho22, state.rho12
    )
    # Rounding can push a zero eigenvalue to -1e-17.
    ev = [0.0 if -CONSTRUCT_TOL <= e < 0 else e for e in ev]
    return Spectrum(tuple(sorted(ev, reverse=True)))


def shannon_bits(probs) -> float:
    """``-sum p log2 p`` with ``0 log 0 = 0``."""
    total = 0.0
    for p in probs:
        if p > 0:
            total -= p * math.log2(p)
    return total


def entropy(state: CanonicalXState) -> float:
    return shannon_bits(spectrum(state))


def entropy_a(state: CanonicalXState) -> float:
    return binary_entropy(state.rho00 + state.rho11 - state.rho22 - state.rho33)


def entropy_b(state: CanonicalXState) -> float:
    return binary_entropy(state.rho00 - state.rho11 + state.rho22 - state.rho33)


def mutual_information(state: CanonicalXState) -> float:
    """``I = S(A) + S(B) - S(AB)``; clipped at zero against rounding."""
    return max(entropy_a(state) + entropy_b(state) - entropy(state), 0.0)


def as_state(obj) -> CanonicalXState:
    """Coerce a :class:`CanonicalXState`, :class:`RawXState` or :class:`BlochParams`."""
    if isinstance(obj, CanonicalXState):
        return obj
    if isinstance(obj, RawXState):
        return canonicalize(obj)
    if isinstance(obj, BlochParams):
        return from_bloch_params(obj, tol=INPUT_TOL)
    raise TypeError(f"cannot interpret {type(obj).__name__} as an X-state")


def as_params(obj) -> BlochParams:
    """Coerce to canonical :class:`BlochParams` (``s >= |u|``)."""
    if isinstance(obj, BlochParams):
        x, y, t, s, u = obj.as_tuple()
        if s >= abs(u):
            if not is_physical(obj, INPUT_TOL):
                raise InvalidState(
                    f"positivity violated for Bloch parameters {obj.as_tuple()}"
                )
            return obj
    return bloch_params(as_state(obj))
