"""Domain types shared by the selection, sampling and inference code.

Indices are 0-based everywhere inside the package; conversion to the
1-based labels used in files and on the command line happens only in
:mod:`bayes_screen.io` and the CLI.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


class ValidationError(ValueError):
    """Raised when a dataset, prior or config fails validation."""


@dataclass(frozen=True)
class ModelIndicator:
    """A candidate model: the set of included column indices.

    ``included`` is a sorted tuple of distinct 0-based indices in [0, p).
    """

    included: tuple
    p: int
    _members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = tuple(sorted(int(j) for j in self.included))
        if len(set(idx)) != len(idx):
            raise ValidationError("duplicate indices in model indicator")
        if idx and (idx[0] < 0 or idx[-1] >= self.p):
            raise ValidationError(f"index out of range [0, {self.p})")
        object.__setattr__(self, "included", idx)
        object.__setattr__(self, "_members", frozenset(idx))

    def __len__(self):
        return len(self.included)

    def __contains__(self, j):
        return j in self._members

    def __iter__(self):
        return iter(self.included)

    def __hash__(self):
        return hash((self.included, self.p))

    @classmethod
    def from_mask(cls, mask) -> "ModelIndicator":
        mask = np.asarray(mask)
        return cls(tuple(np.flatnonzero(mask)), p=mask.shape[0])

    def to_mask(self) -> np.ndarray:
        mask = np.zeros(self.p, dtype=bool)
        if self.included:
            mask[list(self.included)] = True
        return mask

    def label(self) -> str:
        """1-based '+'-joined label; empty string for the null model."""
        return "+".join(str(j + 1) for j in self.included)

    @classmethod
    def from_label(cls, label: str, p: int) -> "ModelIndicator":
        if label.strip() == "":
            return cls((), p=p)
        return cls(tuple(int(tok) - 1 for tok in label.split("+")), p=p)


@dataclass(frozen=True)
class Dataset:
    """Response vector and design matrix. ``x`` is stored Fortran-ordered
    so that the sampler's column accesses are contiguous."""

    y: np.ndarray
    x: np.ndarray
    n: int
    p: int

    @classmethod
    def from_arrays(cls, y, x) -> "Dataset":
        y = np.ascontiguousarray(y, dtype=np.float64).ravel()
        x = np.asfortranarray(x, dtype=np.float64)
        if x.ndim != 2:
            raise ValidationError("x must be a 2-d matrix")
        d = cls(y=y, x=x, n=x.shape[0], p=x.shape[1])
        problems = validate_dataset(d)
        if problems:
            raise ValidationError("; ".join(problems))
        return d


def validate_dataset(d: Dataset) -> list:
    """Report-style validation: returns a list of violations (empty = ok)."""
    problems = []
    if d.y.shape != (d.n,):
        problems.append(f"dimension mismatch: y has length {d.y.shape[0]}, n={d.n}")
    if d.x.shape != (d.n, d.p):
        problems.append(f"dimension mismatch: x has shape {d.x.shape}, expected ({d.n}, {d.p})")
    if not np.all(np.isfinite(d.y)):
        problems.append("non-finite entries in y")
    if not np.all(np.isfinite(d.x)):
        problems.append("non-finite entries in x")
    else:
        sq = np.einsum("ij,ij->j", d.x, d.x)
        for j in np.flatnonzero(sq == 0.0):
            problems.append(f"zero-norm column {j + 1}")
    return problems


@dataclass(frozen=True)
class GroundTruth:
    """True coefficients and derived summaries used by the experiment metrics."""

    beta0: np.ndarray
    gamma0: ModelIndicator
    s_n: int
    sigma0_sq: float
    k_n: float
    psi_n: float | None


def derive_ground_truth(beta0, sigma0_sq: float) -> GroundTruth:
    """Build a GroundTruth from the true coefficient vector.

    The support of ``beta0`` defines the true model; ``psi_n`` is the
    smallest nonzero magnitude and is absent for an all-zero beta0.
    """
    beta0 = np.asarray(beta0, dtype=np.float64).ravel()
    if not np.all(np.isfinite(beta0)):
        raise ValidationError("non-finite entries in beta0")
    if sigma0_sq <= 0:
        raise ValidationError("sigma0_sq must be positive")
    support = np.flatnonzero(beta0)
    gamma0 = ModelIndicator(tuple(support), p=beta0.shape[0])
    s_n = len(gamma0)
    if s_n == 0:
        warnings.warn("true model empty (all-zero beta0)", stacklevel=2)
        return GroundTruth(beta0, gamma0, 0, float(sigma0_sq), 0.0, None)
    nz = beta0[support]
    return GroundTruth(
        beta0=beta0,
        gamma0=gamma0,
        s_n=s_n,
        sigma0_sq=float(sigma0_sq),
        k_n=float(nz @ nz),
        psi_n=float(np.min(np.abs(nz))),
    )


# --- prior configuration ----------------------------------------------------

@dataclass(frozen=True)
class FixedC:
    """Fixed variance-control parameter (BIC/RIC/benchmark presets)."""

    c: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValidationError("Fixed c must be positive and finite")


@dataclass(frozen=True)
class GZS:
    """Inverse-gamma prior on c with scale p^b_n (size-adapted Zellner-Siow).

    a = 0 gives the improper variant used in the simulations; it is allowed
    in MCMC but rejected by the quadrature-based marginal.
    """

    a: float = 0.0
    b_n: float = 3.0

    def __post_init__(self):
        if self.a < 0 or self.b_n <= 0:
            raise ValidationError("GZS requires a >= 0 and b_n > 0")

    def log_scale(self, p: int) -> float:
        """log of the IG scale parameter p^b_n, with overflow guard."""
        ls = self.b_n * math.log(p)
        if ls > 700.0:
            raise ValidationError(f"p^b_n overflows double precision (log = {ls:.1f})")
        return ls


@dataclass(frozen=True)
class GHG:
    """Hyper-g style prior: c/(1+c) ~ Beta(p^d + 1, b). b = 0 is the
    improper variant, allowed only in the MH update."""

    d: float = 3.0
    b: float = 0.0

    def __post_init__(self):
        if self.d <= 0 or self.b < 0:
            raise ValidationError("GHG requires d > 0 and b >= 0")

    def alpha_n(self, p: int) -> float:
        la = self.d * math.log(p)
        if la > 700.0:
            raise ValidationError(f"p^d overflows double precision (log = {la:.1f})")
        return math.exp(la) + 1.0


@dataclass(frozen=True)
class PriorConfig:
    """Hyperpriors: inverse-chi^2 dof, size cap prior, and the c prior.

    The model-space prior is the indifference prior (constant over models
    with size <= t_n), so all prior ratios between admissible models are 1.
    """

    nu: float = 6.0
    m_n: int = 1
    c_prior: object = FixedC(1.0)

    def __post_init__(self):
        if self.nu <= 0:
            raise ValidationError("nu must be positive")
        if self.m_n < 1:
            raise ValidationError("m_n must be >= 1")

    def validate_for(self, d: Dataset) -> None:
        if self.m_n > d.n:
            raise ValidationError(f"m_n={self.m_n} exceeds n={d.n}")
        if isinstance(self.c_prior, GZS):
            self.c_prior.log_scale(d.p)
        elif isinstance(self.c_prior, GHG):
            self.c_prior.alpha_n(d.p)

    @staticmethod
    def default_m_n(n: int) -> int:
        return max(1, n // 2)


# --- sampler state and caches ------------------------------------------------

@dataclass
class SamplerState:
    """One MCMC state. ``gamma_mask[j] != 0`` iff ``beta[j] != 0``; the
    residual cache equals y - x @ beta up to accumulated-update tolerance."""

    beta: np.ndarray
    gamma_mask: np.ndarray
    sigma_sq: float
    t_n: int
    c: float
    residual: np.ndarray

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.gamma_mask))

    @property
    def gamma(self) -> ModelIndicator:
        return ModelIndicator(tuple(np.flatnonzero(self.gamma_mask)), p=self.beta.shape[0])

    def copy(self) -> "SamplerState":
        return SamplerState(
            beta=self.beta.copy(),
            gamma_mask=self.gamma_mask.copy(),
            sigma_sq=self.sigma_sq,
            t_n=self.t_n,
            c=self.c,
            residual=self.residual.copy(),
        )

    def check_invariants(self, d: Dataset, m_n: int) -> None:
        support = np.flatnonzero(self.beta)
        active = np.flatnonzero(self.gamma_mask)
        if not np.array_equal(support, active):
            raise AssertionError("support(beta) != gamma")
        if not (self.n_active <= self.t_n <= m_n):
            raise AssertionError(f"size cap violated: |gamma|={self.n_active}, t_n={self.t_n}, m_n={m_n}")
        drift = np.max(np.abs(self.residual - (d.y - d.x @ self.beta)))
        if drift >= 1e-8 * (1.0 + np.max(np.abs(d.y))):
            raise AssertionError(f"residual cache drifted by {drift:.3e}")


@dataclass(frozen=True)
class Precomputed:
    """Per-dataset caches: squared column norms and y'y."""

    col_sq_norms: np.ndarray
    yty: float

    @classmethod
    def from_dataset(cls, d: Dataset) -> "Precomputed":
        sq = np.einsum("ij,ij->j", d.x, d.x)
        return cls(col_sq_norms=sq, yty=float(d.y @ d.y))
