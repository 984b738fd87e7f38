"""Rank-2 lattice arithmetic in the Euclidean plane.

Lagrange-Gauss reduction, successive minima with witness vectors, the
reduced modulus tau in the standard fundamental domain of the modular
group, and the Hermite ratio lambda1^2 / covolume.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

# Hermite constant for rank 2; attained exactly on the hexagonal lattice.
GAMMA_2 = 2.0 / math.sqrt(3.0)

# Absolute tolerance for geometric predicates on unit-covolume-normalized data.
FD_TOL = 1e-9

_DEGENERACY_RTOL = 1e-12
_MAX_REDUCTION_STEPS = 512


class DegenerateLatticeError(ValueError):
    """Basis vectors are (numerically) linearly dependent."""


@dataclass(frozen=True, eq=False)
class Lattice:
    """Rank-2 lattice spanned by the rows of ``basis``."""

    basis: np.ndarray  # shape (2, 2); rows are the basis vectors b1, b2

    def __post_init__(self) -> None:
        b = np.array(self.basis, dtype=float)
        if b.shape != (2, 2) or not np.all(np.isfinite(b)):
            raise ValueError("basis must be a finite 2x2 array (rows = basis vectors)")
        scale = max(float(np.linalg.norm(b[0])), float(np.linalg.norm(b[1])))
        det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
        if scale == 0.0 or abs(det) < _DEGENERACY_RTOL * scale * scale:
            raise DegenerateLatticeError("degenerate lattice")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def covolume(self) -> float:
        b = self.basis
        return abs(float(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]))

    def unit_covolume(self) -> Lattice:
        """Rescale the basis so the fundamental domain has unit area."""
        return Lattice(self.basis / math.sqrt(self.covolume))

    def vector(self, p: int, q: int) -> np.ndarray:
        """The lattice vector p*b1 + q*b2."""
        return p * self.basis[0] + q * self.basis[1]

    @staticmethod
    def square() -> Lattice:
        return Lattice(np.eye(2))

    @staticmethod
    def eisenstein() -> Lattice:
        """Hexagonal lattice spanned by 1 and e^{i pi/3} (covolume sqrt(3)/2)."""
        return Lattice(np.array([[1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]]))

    @staticmethod
    def rectangular(a: float, b: float) -> Lattice:
        return Lattice(np.array([[a, 0.0], [0.0, b]]))

    @staticmethod
    def from_tau(tau: complex) -> Lattice:
        """Unit-covolume lattice spanned by {tau/sigma, 1/sigma}, sigma = sqrt(Im tau)."""
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        s = math.sqrt(tau.imag)
        return Lattice(np.array([[tau.real / s, tau.imag / s], [1.0 / s, 0.0]]))


@dataclass(frozen=True)
class ReducedModulus:
    """Canonical modulus of a lattice.

    The input lattice equals scale * e^{i rotation} * (Z + Z tau) as a point
    set, with tau in the closure of the standard fundamental domain.
    """

    tau: complex
    sigma_sq: float  # Im(tau)
    scale: float     # modulus of the shortest vector used to normalize
    rotation: float  # angle of that vector, in (-pi, pi]

    def as_dict(self) -> dict:
        return {
            "tau": [self.tau.real, self.tau.imag],
            "sigma_sq": self.sigma_sq,
            "scale": self.scale,
            "rotation": self.rotation,
        }


@dataclass(frozen=True, eq=False)
class SuccessiveMinima:
    lambda1: float
    lambda2: float
    v1: np.ndarray            # witness with ||v1|| = lambda1
    v2: np.ndarray            # independent witness with ||v2|| = lambda2
    coeffs1: tuple[int, int]  # v1 = coeffs1[0]*b1 + coeffs1[1]*b2
    coeffs2: tuple[int, int]


def _gauss_reduce(basis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lagrange-Gauss reduction of a rank-2 basis.

    Returns (reduced, U) with reduced = U @ basis, |det U| = 1,
    ||r1|| <= ||r2|| and |<r1, r2>| <= ||r1||^2 / 2, so r1 is a shortest
    nonzero lattice vector and r2 realizes the second minimum.
    """
    b = np.array(basis, dtype=float)
    u = np.eye(2, dtype=np.int64)
    for _ in range(_MAX_REDUCTION_STEPS):
        if b[1] @ b[1] < b[0] @ b[0]:
            b = b[::-1].copy()
            u = u[::-1].copy()
        mu = round(float(b[1] @ b[0]) / float(b[0] @ b[0]))
        if mu == 0:
            return b, u
        b[1] -= mu * b[0]
        u[1] -= mu * u[0]
    raise RuntimeError("Lagrange-Gauss reduction did not terminate")  # pragma: no cover


def successive_minima(lattice: Lattice) -> SuccessiveMinima:
    """First and second minima of the lattice with explicit witnesses."""
    red, u = _gauss_reduce(lattice.basis)
    return SuccessiveMinima(
        lambda1=float(np.linalg.norm(red[0])),
        lambda2=float(np.linalg.norm(red[1])),
        v1=red[0],
        v2=red[1],
        coeffs1=(int(u[0, 0]), int(u[0, 1])),
        coeffs2=(int(u[1, 0]), int(u[1, 1])),
    )


def reduce(lattice: Lattice) -> ReducedModulus:
    """Reduce a lattice to its canonical modulus tau.

    Picks a shortest vector z via Lagrange-Gauss reduction, divides the
    lattice by z so it becomes Z + Z tau, and translates Re(tau) into
    [-1/2, 1/2].  Boundary ties are broken canonically: Re(tau) = -1/2
    maps to tau + 1, and |tau| = 1 with Re(tau) < 0 maps to -1/tau, so the
    hexagonal corner is always reported as e^{i pi/3}.
    """
    red, _ = _gauss_reduce(lattice.basis)
    z1 = complex(red[0, 0], red[0, 1])
    z2 = complex(red[1, 0], red[1, 1])
    mult = z1
    tau = z2 / z1
    if tau.imag < 0:
        tau = -tau  # Z + Z*(-tau) is the same point set
    tau -= round(tau.real)
    if abs(tau.real + 0.5) <= FD_TOL:
        tau += 1.0
    if abs(abs(tau) - 1.0) <= FD_TOL and tau.real < 0:
        # lattice(Z + Z tau) = (-tau) * lattice(Z + Z(-1/tau))
        mult *= -tau
        tau = -1.0 / tau
    return ReducedModulus(
        tau=tau,
        sigma_sq=tau.imag,
        scale=abs(mult),
        rotation=cmath.phase(mult),
    )


def hermite_ratio(lattice: Lattice) -> float:
    """lambda1^2 / covolume; at most 2/sqrt(3), with equality on hexagonal lattices."""
    sm = successive_minima(lattice)
    return sm.lambda1 ** 2 / lattice.covolume


def lattice_from_json(obj: dict) -> Lattice:
    """Parse {"basis": [[x1,y1],[x2,y2]]} or {"tau": [re, im]}."""
    if not isinstance(obj, dict):
        raise ValueError("lattice spec must be a JSON object")
    if "basis" in obj:
        basis = np.asarray(obj["basis"], dtype=float)
        if basis.shape != (2, 2):
            raise ValueError("lattice 'basis' must be a 2x2 array")
        return Lattice(basis)
    if "tau" in obj:
        re, im = (float(v) for v in obj["tau"])
        return Lattice.from_tau(complex(re, im))
    raise ValueError("lattice spec needs a 'basis' or 'tau' entry")
