"""Domain model for unit commitment with an aggregated EV fleet.

Time steps are indexed 0..T-1. Power is in MW, energy in MWh. EV
flexibility is kept in reduced form: per-step power bounds plus bounds on
the cumulative injected energy. All types are immutable after
construction; validation functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp


class ValidationError(ValueError):
    """Base class for instance validation failures."""


class BoundOrderViolation(ValidationError):
    """A lower bound exceeds the matching upper bound."""


class EmptyFlexibilitySet(ValidationError):
    """The power/energy bounds of an EV profile admit no schedule."""


class LengthMismatch(ValidationError):
    """A per-step vector does not have length T."""


def _vec(values, name: str, length: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a one-dimensional vector")
    if length is not None and arr.shape[0] != length:
        raise LengthMismatch(f"{name} has length {arr.shape[0]}, expected {length}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SubsetMask:
    """Subset of a fixed ground set {0, ..., size-1} stored as a bit mask.

    For border evaluations the ground set is the T time steps; for the
    base-polyhedron extension it is the T steps plus one extension element
    at index T. All set algebra stays closed over the declared capacity.
    """

    bits: int
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("mask size must be nonnegative")
        if self.bits < 0 or self.bits >> self.size:
            raise ValueError("mask bits fall outside the ground set")

    @classmethod
    def empty(cls, size: int) -> "SubsetMask":
        return cls(0, size)

    @classmethod
    def full(cls, size: int) -> "SubsetMask":
        return cls((1 << size) - 1, size)

    @classmethod
    def from_indices(cls, size: int, indices) -> "SubsetMask":
        bits = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < size:
                raise ValueError(f"index {i} outside ground set of size {size}")
            bits |= 1 << i
        return cls(bits, size)

    def indices(self) -> tuple[int, ...]:
        out = []
        bits = self.bits
        while bits:
            low = bits & -bits
            out.append(low.bit_length() - 1)
            bits ^= low
        return tuple(out)

    def indicator(self) -> np.ndarray:
        ind = np.zeros(self.size)
        for i in self.indices():
            ind[i] = 1.0
        return ind

    def _check(self, other: "SubsetMask") -> None:
        if self.size != other.size:
            raise ValueError("masks over different ground sets")

    def union(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.bits | other.bits, self.size)

    def intersection(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.bits & other.bits, self.size)

    def difference(self, other: "SubsetMask") -> "SubsetMask":
        self._check(other)
        return SubsetMask(self.bits & ~other.bits, self.size)

    def complement(self) -> "SubsetMask":
        return SubsetMask(~self.bits & ((1 << self.size) - 1), self.size)

    def add(self, index: int) -> "SubsetMask":
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} outside ground set of size {self.size}")
        return SubsetMask(self.bits | (1 << index), self.size)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.size and bool(self.bits >> index & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.indices())

    @property
    def is_empty(self) -> bool:
        return self.bits == 0


@dataclass(frozen=True)
class TimeHorizon:
    """Number of time steps and the duration of one step in hours."""

    T: int
    step_hours: float = 1.0

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise ValidationError("T must be a positive integer")
        if not (self.step_hours > 0 and np.isfinite(self.step_hours)):
            raise ValidationError("step_hours must be positive and finite")


@dataclass(frozen=True, eq=False)
class EVProfileRaw:
    """EV flexibility in state-of-charge form.

    p_min/p_max bound the charging power per step (MW, both zero while the
    vehicle is unplugged), soc_min/soc_max bound the stored energy at the
    end of each step (MWh), soc_init is the initial stored energy and
    drive is the energy consumed by driving during each step.
    """

    p_min: np.ndarray
    p_max: np.ndarray
    soc_min: np.ndarray
    soc_max: np.ndarray
    soc_init: float
    drive: np.ndarray

    def __post_init__(self):
        T = len(np.atleast_1d(self.p_min))
        for name in ("p_min", "p_max", "soc_min", "soc_max", "drive"):
            object.__setattr__(self, name, _vec(getattr(self, name), name, T))
        object.__setattr__(self, "soc_init", float(self.soc_init))

    @property
    def T(self) -> int:
        return self.p_min.shape[0]

    def __eq__(self, other):
        if not isinstance(other, EVProfileRaw):
            return NotImplemented
        return self.soc_init == other.soc_init and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("p_min", "p_max", "soc_min", "soc_max", "drive")
        )


@dataclass(frozen=True, eq=False)
class EVProfile:
    """Reduced EV flexibility set for a class of `count` identical vehicles.

    The per-vehicle admissible schedules are the vectors p with
    p_min <= p <= p_max and s_min[t] <= sum_{t'<=t} tau * p[t'] <= s_max[t].
    """

    p_min: np.ndarray
    p_max: np.ndarray
    s_min: np.ndarray
    s_max: np.ndarray
    count: int = 1

    def __post_init__(self):
        T = len(np.atleast_1d(self.p_min))
        for name in ("p_min", "p_max", "s_min", "s_max"):
            object.__setattr__(self, name, _vec(getattr(self, name), name, T))
        if int(self.count) != self.count or self.count < 1:
            raise ValidationError("count must be a positive integer")
        object.__setattr__(self, "count", int(self.count))

    @property
    def T(self) -> int:
        return self.p_min.shape[0]

    def __eq__(self, other):
        if not isinstance(other, EVProfile):
            return NotImplemented
        return self.count == other.count and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("p_min", "p_max", "s_min", "s_max")
        )


@dataclass(frozen=True)
class LinearRow:
    """Sparse linear constraint over the T production variables of one unit."""

    coeffs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in ("<=", ">=", "="):
            raise ValidationError(f"unknown row sense {self.sense!r}")
        coeffs = tuple(sorted((int(i), float(v)) for i, v in self.coeffs))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", float(self.rhs))

    @classmethod
    def from_dict(cls, coeffs: dict, sense: str, rhs: float) -> "LinearRow":
        return cls(tuple((int(k), float(v)) for k, v in coeffs.items()), sense, rhs)


@dataclass(frozen=True, eq=False)
class ProductionUnit:
    """One production unit: linear cost plus a convex polyhedral constraint set."""

    name: str
    cost: np.ndarray
    p_min: np.ndarray
    p_max: np.ndarray
    ramp_up: float | None = None
    ramp_down: float | None = None
    extra_rows: tuple[LinearRow, ...] = ()

    def __post_init__(self):
        T = len(np.atleast_1d(self.cost))
        for name in ("cost", "p_min", "p_max"):
            object.__setattr__(self, name, _vec(getattr(self, name), name, T))
        for name in ("ramp_up", "ramp_down"):
            val = getattr(self, name)
            object.__setattr__(self, name, None if val is None else float(val))
        object.__setattr__(self, "extra_rows", tuple(self.extra_rows))

    @property
    def T(self) -> int:
        return self.cost.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ProductionUnit):
            return NotImplemented
        return (
            self.name == other.name
            and self.ramp_up == other.ramp_up
            and self.ramp_down == other.ramp_down
            and self.extra_rows == other.extra_rows
            and all(
                np.array_equal(getattr(self, f), getattr(other, f))
                for f in ("cost", "p_min", "p_max")
            )
        )


@dataclass(frozen=True, eq=False)
class Instance:
    """A unit-commitment instance: horizon, residual demand, units, EV fleet."""

    horizon: TimeHorizon
    demand: np.ndarray
    units: tuple[ProductionUnit, ...] = ()
    fleet: tuple[EVProfile, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "demand", _vec(self.demand, "demand"))
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "fleet", tuple(self.fleet))

    @property
    def T(self) -> int:
        return self.horizon.T

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.horizon == other.horizon
            and np.array_equal(self.demand, other.demand)
            and self.units == other.units
            and self.fleet == other.fleet
        )


def flexibility_rows(profile: EVProfile, step_hours: float = 1.0,
                     var_offset: int = 0) -> list[lp.Row]:
    """Cumulative-energy window rows of one EV profile's flexibility set.

    The power box bounds are not included; they are variable bounds.
    """
    rows = []
    for t in range(profile.T):
        coeffs = {var_offset + k: step_hours for k in range(t + 1)}
        rows.append(lp.Row(coeffs, "<=", float(profile.s_max[t])))
        rows.append(lp.Row(dict(coeffs), ">=", float(profile.s_min[t])))
    return rows


def validate_raw_profile(raw: EVProfileRaw) -> None:
    """Check the raw-form invariants; raises on the first violation."""
    if np.any(raw.p_min > raw.p_max):
        t = int(np.argmax(raw.p_min > raw.p_max))
        raise BoundOrderViolation(f"p_min > p_max at step {t}")
    if np.any(raw.drive < 0):
        t = int(np.argmax(raw.drive < 0))
        raise ValidationError(f"negative driving consumption at step {t}")
    if np.any(raw.soc_min < 0):
        t = int(np.argmax(raw.soc_min < 0))
        raise ValidationError(f"negative soc_min at step {t}")
    if np.any(raw.soc_min > raw.soc_max):
        t = int(np.argmax(raw.soc_min > raw.soc_max))
        raise BoundOrderViolation(f"soc_min > soc_max at step {t}")
    for name in ("p_min", "p_max", "soc_min", "soc_max", "drive"):
        if not np.all(np.isfinite(getattr(raw, name))):
            raise ValidationError(f"{name} contains non-finite entries")
    if not np.isfinite(raw.soc_init):
        raise ValidationError("soc_init must be finite")


def reduce_profile(raw: EVProfileRaw, count: int = 1) -> EVProfile:
    """Rewrite state-of-charge windows as cumulative-energy windows.

    s_min[t] = soc_min[t] - soc_init + sum_{t'<=t} drive[t'], and the same
    shift for s_max. Power bounds are copied verbatim.
    """
    validate_raw_profile(raw)
    cum_drive = np.cumsum(raw.drive)
    return EVProfile(
        p_min=raw.p_min,
        p_max=raw.p_max,
        s_min=raw.soc_min - raw.soc_init + cum_drive,
        s_max=raw.soc_max - raw.soc_init + cum_drive,
        count=count,
    )


def validate_profile(profile: EVProfile, step_hours: float = 1.0) -> None:
    """Check bound ordering and nonemptiness of the flexibility set.

    Nonemptiness is decided by a feasibility LP over the power box and the
    cumulative-energy windows. Raises BoundOrderViolation or
    EmptyFlexibilitySet; returns None when the profile is valid.
    """
    for name in ("p_min", "p_max", "s_min", "s_max"):
        if not np.all(np.isfinite(getattr(profile, name))):
            raise ValidationError(f"{name} contains non-finite entries")
    if np.any(profile.p_min > profile.p_max):
        t = int(np.argmax(profile.p_min > profile.p_max))
        raise BoundOrderViolation(f"p_min > p_max at step {t}")
    if np.any(profile.s_min > profile.s_max):
        t = int(np.argmax(profile.s_min > profile.s_max))
        raise BoundOrderViolation(f"s_min > s_max at step {t}")
    problem = lp.LinearProgram(
        num_vars=profile.T,
        objective=np.zeros(profile.T),
        lower=profile.p_min,
        upper=profile.p_max,
        rows=flexibility_rows(profile, step_hours),
    )
    sol = lp.solve_lp(problem)
    if sol.status == lp.LpStatus.INFEASIBLE:
        raise EmptyFlexibilitySet("power and cumulative-energy bounds admit no schedule")
    if sol.status != lp.LpStatus.OPTIMAL:
        raise RuntimeError(f"feasibility solve failed with status {sol.status.value}")


def validate_unit(unit: ProductionUnit, T: int) -> None:
    for name in ("cost", "p_min", "p_max"):
        arr = getattr(unit, name)
        if arr.shape[0] != T:
            raise LengthMismatch(f"unit {unit.name!r}: {name} has length {arr.shape[0]}, expected {T}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"unit {unit.name!r}: {name} contains non-finite entries")
    if np.any(unit.p_min > unit.p_max):
        t = int(np.argmax(unit.p_min > unit.p_max))
        raise BoundOrderViolation(f"unit {unit.name!r}: p_min > p_max at step {t}")
    for name in ("ramp_up", "ramp_down"):
        val = getattr(unit, name)
        if val is not None and not (val >= 0 and np.isfinite(val)):
            raise ValidationError(f"unit {unit.name!r}: {name} must be nonnegative and finite")
    for k, row in enumerate(unit.extra_rows):
        for idx, val in row.coeffs:
            if not 0 <= idx < T:
                raise ValidationError(f"unit {unit.name!r}: row {k} references step {idx}")
            if not np.isfinite(val):
                raise ValidationError(f"unit {unit.name!r}: row {k} has a non-finite coefficient")
        if not np.isfinite(row.rhs):
            raise ValidationError(f"unit {unit.name!r}: row {k} has a non-finite right-hand side")


def validate_instance(instance: Instance) -> None:
    """Validate all lengths, units and fleet profiles of an instance."""
    T = instance.T
    if instance.demand.shape[0] != T:
        raise LengthMismatch(f"demand has length {instance.demand.shape[0]}, expected {T}")
    if not np.all(np.isfinite(instance.demand)):
        raise ValidationError("demand contains non-finite entries")
    for unit in instance.units:
        validate_unit(unit, T)
    for n, profile in enumerate(instance.fleet):
        if profile.T != T:
            raise LengthMismatch(f"fleet[{n}] has length {profile.T}, expected {T}")
        validate_profile(profile, instance.horizon.step_hours)
