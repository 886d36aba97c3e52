"""Base measures and seed-deterministic i.i.d. sampling.

The single-realization experiments (one sequence Z_1, Z_2, ... examined at
growing n) need *prefix stability*: asking for more samples must never
change the ones already drawn.  Sampling is therefore keyed by a
counter-based generator (Philox) with key (master_seed, stream_id), and
every sample consumes exactly two uniforms, so sample k is a pure function
of (measure, seed, k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

from .errors import ContractError, ParameterError

_KINDS = ("FiniteSupport", "UniformCircle", "UniformDisk", "ComplexGaussian", "ComplexCauchy")

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _mix64(*values: int) -> int:
    acc = 0
    for v in values:
        acc = _splitmix64((acc ^ (v & _MASK64)) & _MASK64)
    return acc


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one reproducible random stream.

    Distinct stream_ids under the same master_seed give statistically
    independent streams (distinct Philox keys).
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)):
                raise ParameterError(f"{name} must be an integer, got {type(v).__name__}")
            if not 0 <= int(v) <= _MASK64:
                raise ParameterError(f"{name} must fit in 64 bits, got {v}")

    def generator(self) -> Generator:
        return Generator(Philox(key=[self.master_seed, self.stream_id]))

    def substream(self, purpose: int, index: int = 0) -> "SeedSpec":
        """Derive an independent stream for a named purpose.

        The derivation hashes (stream_id, purpose, index), so adjacent user
        stream ids never collide with internally derived ones.
        """
        return SeedSpec(self.master_seed, _mix64(self.stream_id, purpose, index))

    def to_json(self) -> dict:
        return {"master_seed": self.master_seed, "stream_id": self.stream_id}

    @classmethod
    def from_json(cls, obj) -> "SeedSpec":
        if isinstance(obj, int):
            return cls(obj, 0)
        if isinstance(obj, dict):
            extra = set(obj) - {"master_seed", "stream_id"}
            if extra:
                raise ParameterError(f"unknown seed fields: {sorted(extra)}")
            if "master_seed" not in obj:
                raise ParameterError("seed object requires 'master_seed'")
            return cls(int(obj["master_seed"]), int(obj.get("stream_id", 0)))
        raise ParameterError("seed must be an integer or {master_seed, stream_id}")


@dataclass(frozen=True)
class BaseMeasure:
    """The common distribution mu of the i.i.d. roots.

    Construct through the classmethods; `params` layout depends on `kind`.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ParameterError(f"unknown measure kind {self.kind!r}; expected one of {_KINDS}")
        p = self.params
        if self.kind == "FiniteSupport":
            atoms = np.asarray(p.get("atoms", ()), dtype=complex)
            weights = np.asarray(p.get("weights", ()), dtype=float)
            if atoms.ndim != 1 or atoms.size == 0:
                raise ParameterError("FiniteSupport needs a nonempty 1-d atom list")
            if weights.shape != atoms.shape:
                raise ParameterError("atoms and weights must have equal length")
            if np.any(weights <= 0):
                raise ParameterError("FiniteSupport weights must be strictly positive")
            if abs(weights.sum() - 1.0) > 1e-12:
                raise ParameterError(f"weights must sum to 1 within 1e-12, got {weights.sum()!r}")
            if len(np.unique(atoms)) != atoms.size:
                raise ParameterError("FiniteSupport atoms must be pairwise distinct")
        elif self.kind in ("UniformCircle", "UniformDisk"):
            if not float(p.get("radius", 0)) > 0:
                raise ParameterError(f"{self.kind} radius must be strictly positive")
        elif self.kind == "ComplexGaussian":
            if not float(p.get("scale", 0)) > 0:
                raise ParameterError("ComplexGaussian scale must be strictly positive")
        elif self.kind == "ComplexCauchy":
            if not float(p.get("scale", 0)) > 0:
                raise ParameterError("ComplexCauchy scale must be strictly positive")

    # ---- constructors -------------------------------------------------

    @classmethod
    def finite_support(cls, atoms, weights) -> "BaseMeasure":
        return cls("FiniteSupport", {
            "atoms": np.asarray(atoms, dtype=complex),
            "weights": np.asarray(weights, dtype=float),
        })

    @classmethod
    def uniform_circle(cls, center=0j, radius=1.0) -> "BaseMeasure":
        return cls("UniformCircle", {"center": complex(center), "radius": float(radius)})

    @classmethod
    def uniform_disk(cls, center=0j, radius=1.0) -> "BaseMeasure":
        return cls("UniformDisk", {"center": complex(center), "radius": float(radius)})

    @classmethod
    def complex_gaussian(cls, mean=0j, scale=1.0) -> "BaseMeasure":
        return cls("ComplexGaussian", {"mean": complex(mean), "scale": float(scale)})

    @classmethod
    def complex_cauchy(cls, location=0j, scale=1.0) -> "BaseMeasure":
        return cls("ComplexCauchy", {"location": complex(location), "scale": float(scale)})

    # ---- helpers -------------------------------------------------------

    @property
    def has_finite_support(self) -> bool:
        return self.kind == "FiniteSupport"

    def atoms_and_weights(self):
        if not self.has_finite_support:
            raise ParameterError(f"{self.kind} has no atom list")
        return (np.asarray(self.params["atoms"], dtype=complex),
                np.asarray(self.params["weights"], dtype=float))

    # ---- JSON ----------------------------------------------------------

    def to_json(self) -> dict:
        p = self.params
        if self.kind == "FiniteSupport":
            atoms, weights = self.atoms_and_weights()
            params = {"atoms": [[z.real, z.imag] for z in atoms],
                      "weights": [float(w) for w in weights]}
        elif self.kind in ("UniformCircle", "UniformDisk"):
            c = complex(p["center"])
            params = {"center": [c.real, c.imag], "radius": float(p["radius"])}
        elif self.kind == "ComplexGaussian":
            c = complex(p["mean"])
            params = {"mean": [c.real, c.imag], "scale": float(p["scale"])}
        else:
            c = complex(p["location"])
            params = {"location": [c.real, c.imag], "scale": float(p["scale"])}
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_json(cls, obj: dict) -> "BaseMeasure":
        if not isinstance(obj, dict):
            raise ParameterError("measure must be a JSON object")
        extra = set(obj) - {"kind", "params"}
        if extra:
            raise ParameterError(f"unknown measure fields: {sorted(extra)}")
        kind = obj.get("kind")
        params = obj.get("params", {})
        if kind not in _KINDS:
            raise ParameterError(f"unknown measure kind {kind!r}")

        def as_complex(v):
            if isinstance(v, (list, tuple)) and len(v) == 2:
                return complex(float(v[0]), float(v[1]))
            if isinstance(v, (int, float)):
                return complex(v)
            raise ParameterError(f"expected [re, im] pair, got {v!r}")

        if kind == "FiniteSupport":
            allowed = {"atoms", "weights"}
            if set(params) - allowed:
                raise ParameterError(f"unknown params: {sorted(set(params) - allowed)}")
            atoms = [as_complex(a) for a in params.get("atoms", [])]
            return cls.finite_support(atoms, params.get("weights", []))
        if kind in ("UniformCircle", "UniformDisk"):
            allowed = {"center", "radius"}
            if set(params) - allowed:
                raise ParameterError(f"unknown params: {sorted(set(params) - allowed)}")
            ctor = cls.uniform_circle if kind == "UniformCircle" else cls.uniform_disk
            return ctor(as_complex(params.get("center", 0)), params.get("radius", 0))
        if kind == "ComplexGaussian":
            allowed = {"mean", "scale"}
            if set(params) - allowed:
                raise ParameterError(f"unknown params: {sorted(set(params) - allowed)}")
            return cls.complex_gaussian(as_complex(params.get("mean", 0)), params.get("scale", 0))
        allowed = {"location", "scale"}
        if set(params) - allowed:
            raise ParameterError(f"unknown params: {sorted(set(params) - allowed)}")
        return cls.complex_cauchy(as_complex(params.get("location", 0)), params.get("scale", 0))


@dataclass(frozen=True)
class Trajectory:
    """One realized prefix Z_1..Z_n of a sample path, regenerable from its seed."""

    measure: BaseMeasure
    seed: SeedSpec
    samples: np.ndarray

    def __len__(self):
        return len(self.samples)


def _uniform_pairs(seed: SeedSpec, count: int) -> np.ndarray:
    # row-major fill makes row k depend only on (seed, k): prefix stable
    return seed.generator().random((count, 2))


def _finite_support_indices(measure: BaseMeasure, seed: SeedSpec, count: int) -> np.ndarray:
    atoms, weights = measure.atoms_and_weights()
    cum = np.cumsum(weights)
    u = _uniform_pairs(seed, count)[:, 0]
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, len(atoms) - 1)


def sample(measure: BaseMeasure, seed: SeedSpec, count: int) -> Trajectory:
    """Draw count i.i.d. samples from measure on the stream named by seed."""
    if not isinstance(count, (int, np.integer)) or count < 1:
        raise ParameterError(f"count must be a positive integer, got {count!r}")
    count = int(count)
    kind = measure.kind
    if kind == "FiniteSupport":
        atoms, _ = measure.atoms_and_weights()
        z = atoms[_finite_support_indices(measure, seed, count)]
    else:
        u = _uniform_pairs(seed, count)
        p = measure.params
        if kind == "UniformCircle":
            z = p["center"] + p["radius"] * np.exp(2j * np.pi * u[:, 0])
        elif kind == "UniformDisk":
            z = p["center"] + p["radius"] * np.sqrt(u[:, 0]) * np.exp(2j * np.pi * u[:, 1])
        elif kind == "ComplexGaussian":
            z = p["mean"] + p["scale"] * (ndtri(u[:, 0]) + 1j * ndtri(u[:, 1]))
        else:  # ComplexCauchy: no finite moments by design
            z = p["location"] + p["scale"] * (np.tan(np.pi * (u[:, 0] - 0.5))
                                              + 1j * np.tan(np.pi * (u[:, 1] - 0.5)))
    z = np.ascontiguousarray(z, dtype=complex)
    z.setflags(write=False)
    return Trajectory(measure, seed, z)


def extend(traj: Trajectory, new_count: int) -> Trajectory:
    """Grow a trajectory; existing entries are reproduced bit-for-bit."""
    if new_count < len(traj):
        raise ContractError(f"cannot shrink a trajectory: {new_count} < {len(traj)}")
    if new_count == len(traj):
        return traj
    return sample(traj.measure, traj.seed, new_count)


def multinomial_counts(measure: BaseMeasure, seed: SeedSpec, n: int):
    """Atom occurrence counts (N_1, ..., N_r) of n finite-support samples.

    Matches the atom counts of sample(measure, seed, n) exactly.
    """
    if not measure.has_finite_support:
        raise ParameterError("multinomial_counts requires a FiniteSupport measure")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    atoms, _ = measure.atoms_and_weights()
    idx = _finite_support_indices(measure, seed, int(n))
    return np.bincount(idx, minlength=len(atoms)).astype(int)
