"""Truncated harmonic-map series with certified tail bounds.

A planar harmonic map f = h + conj(g) is stored through the coefficients of
its two power series,

    h(z) = a_0 + a_1 z + ... + a_N z^N,      g(z) = b_1 z + ... + b_N z^N,

together with a tail_bound: a certified bound on sum_{n>N} (|a_n| + |b_n|) *
reference_radius**n for the underlying (possibly infinite) series.  A
polynomial map simply carries tail_bound = 0.  Maps are immutable; the
coefficient arrays are frozen at construction, so instances may be shared
freely across worker threads.

Evaluation runs a fixed-order Horner recurrence (highest stored degree down to
the constant), identically for scalars and ndarrays, so results are
bit-reproducible for a given coefficient vector.  Wirtinger derivatives come
from the term-differentiated series, never from finite differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .constants import DistortionBound, growth_rate
from .distortion import EllipticityParams

__all__ = ["HarmonicMap", "truncate_with_tail"]


def _coeff_array(values, name: str) -> np.ndarray:
    arr = np.asarray(list(values), dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a flat coefficient sequence")
    if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise ValueError(f"{name} must contain only finite coefficients")
    return arr


def _horner(coeffs: np.ndarray, z):
    # Fixed evaluation order: do not replace with np.polyval or vectorized
    # schemes with a different reduction order; bit-reproducibility is part of
    # the contract.
    acc = np.zeros_like(z, dtype=complex) + coeffs[-1]
    for k in range(coeffs.size - 2, -1, -1):
        acc = acc * z + coeffs[k]
    return acc


@dataclass(frozen=True, eq=False)
class HarmonicMap:
    """Immutable truncated harmonic map h + conj(g) on the unit disk.

    analytic_coeffs lists a_0..a_N; antianalytic_coeffs lists b_1..b_N (the
    degree-1-based convention of the on-disk format).  Shorter inputs are
    zero-padded to a common truncation degree N >= 1.
    """

    analytic_coeffs: np.ndarray = field(repr=False)
    antianalytic_coeffs: np.ndarray = field(default=(), repr=False)
    tail_bound: float = 0.0
    reference_radius: float = 0.9
    truncation_degree: int = field(init=False)

    def __post_init__(self) -> None:
        a = _coeff_array(self.analytic_coeffs, "analytic_coeffs")
        b1 = _coeff_array(self.antianalytic_coeffs, "antianalytic_coeffs")
        n = max(a.size - 1, b1.size, 1)
        a = np.concatenate([a, np.zeros(n + 1 - a.size, dtype=complex)])
        b1 = np.concatenate([b1, np.zeros(n - b1.size, dtype=complex)])
        if not (math.isfinite(self.tail_bound) and self.tail_bound >= 0.0):
            raise ValueError("tail_bound must be finite and >= 0")
        if not (0.0 < self.reference_radius < 1.0):
            raise ValueError("reference_radius must lie in (0, 1)")
        # Degree-aligned copy of g's coefficients (index = degree) for Horner.
        b_full = np.concatenate([[0.0 + 0.0j], b1])
        for name, value in (
            ("analytic_coeffs", a),
            ("antianalytic_coeffs", b1),
            ("_b_full", b_full),
            ("truncation_degree", n),
        ):
            object.__setattr__(self, name, value)
        a.setflags(write=False)
        b1.setflags(write=False)
        b_full.setflags(write=False)

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def identity(cls) -> "HarmonicMap":
        return cls([0.0, 1.0], [])

    @classmethod
    def from_json_dict(cls, data: dict) -> "HarmonicMap":
        try:
            a = [complex(re, im) for re, im in data["a"]]
            b = [complex(re, im) for re, im in data["b"]]
            tail = float(data["tail_bound"])
            r_ref = float(data["r_ref"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed harmonic-map record: {exc}") from exc
        return cls(a, b, tail_bound=tail, reference_radius=r_ref)

    @classmethod
    def load(cls, path) -> "HarmonicMap":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))

    def to_json_dict(self) -> dict:
        return {
            "a": [[float(c.real), float(c.imag)] for c in self.analytic_coeffs],
            "b": [[float(c.real), float(c.imag)] for c in self.antianalytic_coeffs],
            "tail_bound": float(self.tail_bound),
            "r_ref": float(self.reference_radius),
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    # ------------------------------------------------------------------
    # coefficient access
    # ------------------------------------------------------------------

    def a_n(self, n: int) -> complex:
        if n < 0:
            raise ValueError("degree must be >= 0")
        return complex(self.analytic_coeffs[n]) if n <= self.truncation_degree else 0j

    def b_n(self, n: int) -> complex:
        if n < 1:
            raise ValueError("degree must be >= 1")
        return complex(self._b_full[n]) if n <= self.truncation_degree else 0j

    def coeff_abs_sum(self, n: int) -> float:
        """|a_n| + |b_n|, the quantity the growth bound caps for n >= 2."""
        return abs(self.a_n(n)) + (abs(self.b_n(n)) if n >= 1 else 0.0)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    def _check_domain(self, z) -> None:
        if np.any(np.abs(z) >= 1.0):
            raise ValueError("evaluation requires |z| < 1")

    def eval(self, z):
        """f(z) for scalar or ndarray z with |z| < 1."""
        self._check_domain(z)
        value = _horner(self.analytic_coeffs, z) + np.conj(_horner(self._b_full, z))
        return complex(value) if np.isscalar(z) or np.ndim(z) == 0 else value

    def partials(self, z):
        """Wirtinger pair (f_z, f_zbar) from the differentiated series."""
        self._check_domain(z)
        n = self.truncation_degree
        degrees = np.arange(1, n + 1)
        if n >= 1:
            hp = _horner(degrees * self.analytic_coeffs[1:], z)
            gp = _horner(degrees * self._b_full[1:], z)
        else:  # pragma: no cover - padding guarantees n >= 1
            hp = np.zeros_like(z, dtype=complex)
            gp = np.zeros_like(z, dtype=complex)
        fzb = np.conj(gp)
        if np.isscalar(z) or np.ndim(z) == 0:
            return complex(hp), complex(fzb)
        return hp, fzb

    def eval_hp(self, z: complex, dps: int = 50):
        """High-precision f(z) (mpmath, `dps` decimal digits), scalar only."""
        if abs(z) >= 1.0:
            raise ValueError("evaluation requires |z| < 1")
        with mpmath.workdps(dps):
            zz = mpmath.mpc(z)
            acc_h = mpmath.mpc(0)
            for d in range(self.truncation_degree, -1, -1):
                acc_h = acc_h * zz + mpmath.mpc(self.analytic_coeffs[d])
            acc_g = mpmath.mpc(0)
            for d in range(self.truncation_degree, 0, -1):
                acc_g = acc_g * zz + mpmath.mpc(self._b_full[d])
            acc_g = acc_g * zz
            return acc_h + acc_g.conjugate()

    # ------------------------------------------------------------------
    # derived maps
    # ------------------------------------------------------------------

    def remainder_map(self) -> "HarmonicMap":
        """The map with its affine data removed: a_0 = a_1 = b_1 = 0.

        Applying it twice is exactly idempotent (same coefficients, same tail).
        """
        a = self.analytic_coeffs.copy()
        b = self.antianalytic_coeffs.copy()
        a[0] = 0
        a[1] = 0
        if b.size:
            b[0] = 0
        return HarmonicMap(a, b, tail_bound=self.tail_bound, reference_radius=self.reference_radius)

    def __add__(self, other: "HarmonicMap") -> "HarmonicMap":
        if not isinstance(other, HarmonicMap):
            return NotImplemented
        if other.reference_radius != self.reference_radius:
            raise ValueError("coefficient-wise sum requires matching reference_radius")
        n = max(self.truncation_degree, other.truncation_degree)
        a = np.zeros(n + 1, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: self.truncation_degree + 1] += self.analytic_coeffs
        a[: other.truncation_degree + 1] += other.analytic_coeffs
        b[: self.truncation_degree] += self.antianalytic_coeffs
        b[: other.truncation_degree] += other.antianalytic_coeffs
        return HarmonicMap(
            a,
            b,
            tail_bound=self.tail_bound + other.tail_bound,
            reference_radius=self.reference_radius,
        )

    def scale_output(self, c: complex) -> "HarmonicMap":
        """The map c*f (post-composition with a linear scaling).

        The antianalytic side stores g with f = h + conj(g), and
        c*conj(g) = conj(conj(c)*g), so those coefficients pick up conj(c).
        """
        return HarmonicMap(
            c * self.analytic_coeffs,
            np.conj(c) * self.antianalytic_coeffs,
            tail_bound=abs(c) * self.tail_bound,
            reference_radius=self.reference_radius,
        )

    def precompose_rotation(self, theta: float) -> "HarmonicMap":
        """The map z -> f(e^{i*theta} z); coefficient moduli are unchanged."""
        n = self.truncation_degree
        twist = np.exp(1j * theta * np.arange(n + 1))
        return HarmonicMap(
            self.analytic_coeffs * twist,
            self.antianalytic_coeffs * twist[1:],
            tail_bound=self.tail_bound,
            reference_radius=self.reference_radius,
        )

    def precompose_scale(self, rho: float) -> "HarmonicMap":
        """The map z -> f(rho*z) for 0 < rho <= 1; tail bound stays valid."""
        if not (0.0 < rho <= 1.0):
            raise ValueError("rho must lie in (0, 1]")
        n = self.truncation_degree
        shrink = rho ** np.arange(n + 1)
        return HarmonicMap(
            self.analytic_coeffs * shrink,
            self.antianalytic_coeffs * shrink[1:],
            tail_bound=self.tail_bound,
            reference_radius=self.reference_radius,
        )


def truncate_with_tail(
    f: HarmonicMap,
    N: int,
    params: EllipticityParams,
    bound: DistortionBound,
    r_ref: float,
) -> HarmonicMap:
    """Truncate to degree N, certifying the dropped tail by the growth bound.

    For a normalized map satisfying the (K, Kp) hypotheses with lambda_f <=
    lam, every discarded degree obeys |a_n| + |b_n| <= T/n, so the geometric
    sum past N is at most T * r_ref**(N+1) / ((N+1) * (1 - r_ref)).  That value
    becomes the new tail_bound at reference radius r_ref; the caller asserts
    the hypotheses.
    """
    if not (isinstance(N, int) and N >= 1):
        raise ValueError("N must be an integer >= 1")
    if not (0.0 < r_ref < 1.0):
        raise ValueError("r_ref must lie in (0, 1)")
    T = growth_rate(params, bound)
    tail = T * r_ref ** (N + 1) / ((N + 1) * (1.0 - r_ref))
    keep = min(N, f.truncation_degree)
    return HarmonicMap(
        f.analytic_coeffs[: keep + 1],
        f.antianalytic_coeffs[:keep],
        tail_bound=tail,
        reference_radius=r_ref,
    )
