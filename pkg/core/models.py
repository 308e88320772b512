"""
Built-in model families: the Wick-square boson model, BCS pairing and
external-field pair creation.

Momenta live on the integer lattice Z^3. Points are enumerated band by
band (band b holds the points with ceil|p| = b), lexicographically within
a band, so the j-th lattice point is the same for every sweep.
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from multiprocessing.pool import ThreadPool
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import expm

from core.bogoliubov import BogoliubovMap, Statistics
from core.diagonalizer import (
    NormalOrderingConstant,
    QuadraticHamiltonian,
    hamiltonian_to_blocks,
    normal_ordering_constant,
)
from core.errors import BadParameter, BadSteps, ConstraintViolated, ZeroGap
from core.implementability import ModeFamily
from core.mode_decomposition import BosonicMode, FermionicMode
from core.ren_sequence import Tail

logger = logging.getLogger(__name__)

Momentum = Union[float, Sequence[float], np.ndarray]


def _band(b: int) -> np.ndarray:
    """Lattice points with ceil|p| = b in lexicographic order."""
    if b == 0:
        return np.zeros((1, 3), dtype=int)
    axis = np.arange(-b, b + 1)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    r2 = np.sum(grid ** 2, axis=1)
    return grid[(r2 > (b - 1) ** 2) & (r2 <= b * b)]


class ShellLattice:
    """Points p in Z^3 with |p| <= radius, in band order."""

    # Shared enumeration; _points and _norms are rebuilt once per extension
    _bands: List[np.ndarray] = []
    _offsets: List[int] = [0]
    _points: np.ndarray = np.zeros((0, 3), dtype=int)
    _norms: np.ndarray = np.zeros(0)
    _lock = threading.RLock()

    def __init__(self, radius: int):
        if int(radius) != radius or radius < 0:
            raise BadParameter(f"Shell radius must be a non-negative integer, got {radius}")
        self.radius = int(radius)

    @property
    def points(self) -> np.ndarray:
        points, _, count = self._snapshot(radius=self.radius)
        return points[:count].copy()

    @property
    def norms(self) -> np.ndarray:
        _, norms, count = self._snapshot(radius=self.radius)
        return norms[:count]

    def __len__(self) -> int:
        return self._snapshot(radius=self.radius)[2]

    @classmethod
    def _snapshot(cls, radius: Optional[int] = None, count: int = 0) -> tuple:
        """(points, norms, size) covering `radius` bands or the first `count` points."""
        with cls._lock:
            grew = False
            while (radius is not None and len(cls._bands) <= radius) or cls._offsets[-1] < count:
                band = _band(len(cls._bands))
                cls._bands.append(band)
                cls._offsets.append(cls._offsets[-1] + len(band))
                grew = True
            if grew:
                cls._points = np.concatenate(cls._bands)
                cls._norms = np.sqrt(np.sum(cls._points.astype(float) ** 2, axis=1))
                logger.debug(f"Lattice enumeration extended to {len(cls._bands) - 1} bands, "
                             f"{cls._offsets[-1]} points")
            size = cls._offsets[radius + 1] if radius is not None else cls._offsets[-1]
            return cls._points, cls._norms, size

    @classmethod
    def clear(cls):
        """Drop the cached enumeration."""
        with cls._lock:
            cls._bands = []
            cls._offsets = [0]
            cls._points = np.zeros((0, 3), dtype=int)
            cls._norms = np.zeros(0)

    @classmethod
    def point(cls, j: int) -> np.ndarray:
        """The j-th lattice point (1-based) of the infinite enumeration."""
        if j < 1:
            raise BadParameter(f"Lattice index starts at 1, got {j}")
        points, _, _ = cls._snapshot(count=j)
        return points[j - 1].copy()

    @classmethod
    def norms_at(cls, indices) -> np.ndarray:
        """|p_j| for an array of 1-based indices."""
        indices = np.asarray(indices, dtype=int)
        if indices.size and int(np.min(indices)) < 1:
            raise BadParameter("Lattice index starts at 1")
        _, norms, _ = cls._snapshot(count=int(np.max(indices, initial=1)))
        return norms[indices - 1]


def _momentum_norm(p: Momentum) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        return np.abs(arr)
    if arr.shape[-1] == 3:
        return np.sqrt(np.sum(arr ** 2, axis=-1))
    return np.abs(arr)


@dataclass(frozen=True)
class WickModelParams:
    m: float
    kappa: float

    def __post_init__(self):
        if not self.m > 0:
            raise ConstraintViolated(f"Mass must be positive, got {self.m}")
        if not self.kappa > -self.m / 2 or self.kappa == 0:
            raise ConstraintViolated(f"Coupling must satisfy kappa > -m/2 and kappa != 0, got {self.kappa}")


@dataclass(frozen=True)
class WickMode:
    h: float
    k: float
    G: float
    u: float
    v: float
    E: float

    def as_mode(self, index: int = 0) -> BosonicMode:
        return BosonicMode(index, self.u, abs(self.v))

    def bogoliubov_map(self) -> BogoliubovMap:
        return BogoliubovMap([[self.u]], [[self.v]], Statistics.BOSONIC)

    def hamiltonian(self) -> QuadraticHamiltonian:
        return QuadraticHamiltonian([[self.h]], [[self.k]], Statistics.BOSONIC)


def _wick_arrays(params: WickModelParams, pnorm: np.ndarray) -> Dict[str, np.ndarray]:
    h = np.sqrt(pnorm ** 2 + params.m ** 2) + params.kappa
    k = np.full_like(h, params.kappa)
    if np.any(np.abs(k) >= h):
        raise ConstraintViolated("Need |k_p| < h_p for every momentum")
    g = k / h
    root = np.sqrt(1 - g * g)
    c = np.sqrt(0.5 + 1 / (2 * root))
    return {"h": h, "k": k, "G": g, "u": c, "v": -c * g / (1 + root), "E": np.sqrt(h * h - k * k)}


def wick_mode(params: WickModelParams, p: Momentum) -> WickMode:
    """Closed-form diagonalization of the single-momentum Wick-square Hamiltonian."""
    values = _wick_arrays(params, np.atleast_1d(_momentum_norm(p)).astype(float))
    return WickMode(**{key: float(val[0]) for key, val in values.items()})


def wick_divergence_probe(params: WickModelParams, radii: Iterable[int]) -> List[tuple]:
    """
    Rows (R, sum_{|p| <= R} v_p^2), the Shale-Stinespring partial sums per shell.

    Returns:
        List of (radius, partial sum) in the order given
    """
    radii = [int(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise BadParameter(f"Radii must be strictly increasing, got {radii}")
    if not radii:
        return []
    norms = ShellLattice(radii[-1]).norms
    weights = _wick_arrays(params, norms)["v"] ** 2
    order = np.argsort(norms, kind="stable")
    sorted_norms = norms[order]
    cumulative = np.cumsum(weights[order])
    rows = []
    for radius in radii:
        count = int(np.searchsorted(sorted_norms, radius, side="right"))
        rows.append((radius, float(cumulative[count - 1]) if count else 0.0))
    logger.info(f"Wick divergence probe over radii {radii}")
    return rows


def wick_family(params: WickModelParams) -> ModeFamily:
    """
    Infinite family of Wick modes over the lattice enumeration.

    v_p^2 ~ kappa^2 / (4|p|^2) and |p| ~ (3j/4pi)^(1/3) give the declared
    tail kappa^2/4 (4pi/3)^(2/3) j^(-2/3).
    """
    def generator(j: int) -> BosonicMode:
        return wick_mode(params, ShellLattice.point(j)).as_mode(j)

    coefficient = params.kappa ** 2 / 4 * (4 * np.pi / 3) ** (2 / 3)
    return ModeFamily(Statistics.BOSONIC, generator, None, Tail.power(2 / 3, coefficient),
                      name=f"wick(m={params.m}, kappa={params.kappa})")


def wick_normal_ordering(params: WickModelParams, horizon: int = 20_000) -> NormalOrderingConstant:
    """1/2 sum (E_p - h_p) over the lattice; terms ~ -kappa^2/(4|p|)."""
    def h_rule(j):
        return _wick_arrays(params, np.atleast_1d(ShellLattice.norms_at(j)))["h"]

    def e_rule(j):
        return _wick_arrays(params, np.atleast_1d(ShellLattice.norms_at(j)))["E"]

    coefficient = -params.kappa ** 2 / 4 * (4 * np.pi / 3) ** (1 / 3)
    return normal_ordering_constant(h_rule, e_rule, Tail.power(1 / 3, coefficient), horizon,
                                    name="wick-normal-ordering")


def wick_lower_bound_radius(params: WickModelParams, d: float = 0.9, limit: int = 1000) -> float:
    """
    Smallest radius beyond which v_p^2 >= kappa^2 d^2 / (4|p|^2).

    Checks every attainable lattice norm sqrt(n) up to `limit`.
    """
    if not 0 < d < 1:
        raise BadParameter(f"d must lie in (0, 1), got {d}")
    norms = np.sqrt(np.arange(1, limit * limit + 1, dtype=float))
    ratio = 4 * norms ** 2 * _wick_arrays(params, norms)["v"] ** 2 / params.kappa ** 2
    failing = np.where(ratio < d * d)[0]
    if failing.size == 0:
        return 0.0
    if failing[-1] == norms.size - 1:
        raise BadParameter(f"Lower bound with d={d} does not hold below radius {limit}")
    return float(norms[failing[-1] + 1])


@dataclass(frozen=True)
class BCSModelParams:
    """delta is a constant gap or a rule p -> complex gap."""
    m: float
    mu: float
    delta: Union[complex, Callable] = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ConstraintViolated(f"Mass must be positive, got {self.m}")

    def gap(self, p: Momentum) -> complex:
        return complex(self.delta(p) if callable(self.delta) else self.delta)


@dataclass(frozen=True, eq=False)
class BCSMode:
    eps: float
    delta: complex
    E: float
    u: complex
    v: float

    @property
    def blocks(self) -> np.ndarray:
        """4x4 A_H of the (up, down) pair at one momentum."""
        return hamiltonian_to_blocks(self.hamiltonian())

    def hamiltonian(self) -> QuadraticHamiltonian:
        return QuadraticHamiltonian(self.eps * np.eye(2), [[0, self.delta], [-self.delta, 0]],
                                    Statistics.FERMIONIC)

    def bogoliubov_map(self) -> BogoliubovMap:
        return BogoliubovMap(self.u * np.eye(2), [[0, self.v], [-self.v, 0]], Statistics.FERMIONIC)

    def cooper(self, index: int = 0) -> FermionicMode:
        return FermionicMode.cooper_pair(abs(self.u), self.v, index)


def bcs_mode(params: BCSModelParams, p: Momentum) -> BCSMode:
    """
    Quasiparticle data E = sqrt(eps^2 + |Delta|^2), u = Delta/N, v = (E - eps)/N.

    Raises:
        ZeroGap: Delta_p = 0
    """
    delta = params.gap(p)
    if delta == 0:
        raise ZeroGap(f"Gap vanishes at p = {p}")
    eps = float(_momentum_norm(p)) ** 2 / (2 * params.m) - params.mu
    return bcs_from_gap(eps, delta)


def bcs_from_gap(eps: float, delta: complex) -> BCSMode:
    if delta == 0:
        raise ZeroGap("Gap vanishes")
    energy = math.sqrt(eps * eps + abs(delta) ** 2)
    norm = math.sqrt((energy - eps) ** 2 + abs(delta) ** 2)
    return BCSMode(eps, complex(delta), energy, complex(delta) / norm, (energy - eps) / norm)


def bcs_family(params: BCSModelParams, tail: Optional[Tail] = None) -> ModeFamily:
    """
    Cooper pairs over the lattice enumeration.

    A constant gap gives 2 v_p^2 ~ 2|Delta|^2 m^2 / |p|^4, declared in the
    lattice index as exponent 4/3; gap rules need an explicit `tail`.
    """
    def generator(j: int) -> FermionicMode:
        return bcs_mode(params, ShellLattice.point(j)).cooper(j)

    if tail is None:
        if callable(params.delta):
            tail = Tail.unknown()
        else:
            coefficient = 2 * abs(params.delta) ** 2 * params.m ** 2 * (4 * np.pi / 3) ** (4 / 3)
            tail = Tail.power(4 / 3, coefficient)
    return ModeFamily(Statistics.FERMIONIC, generator, None, tail, particle_holes=0,
                      name=f"bcs(m={params.m}, mu={params.mu})")


def bcs_normal_ordering(modes: Sequence[BCSMode]) -> NormalOrderingConstant:
    """Finite constant over the listed momenta; each contributes two modes."""
    h_diag = np.repeat([mode.eps for mode in modes], 2)
    energies = np.repeat([mode.E for mode in modes], 2)
    return normal_ordering_constant(h_diag, energies)


@dataclass(frozen=True)
class QEDModelParams:
    """Rules (p, t) -> real for the two band energies and the real pair-creation coupling."""
    eps_plus: Callable
    eps_minus: Callable
    f: Callable

    @classmethod
    def constant(cls, eps_plus: float, eps_minus: float, f: float) -> "QEDModelParams":
        return cls(lambda p, t: eps_plus, lambda p, t: eps_minus, lambda p, t: f)

    def values(self, p, t: float) -> tuple:
        return float(self.eps_plus(p, t)), float(self.eps_minus(p, t)), float(self.f(p, t))


def qed_mode_matrix(params: QEDModelParams, p, t: float) -> np.ndarray:
    """A_H(p, t) with h = diag(eps+, eps-) and k = ((0, f), (-f, 0))."""
    eps_plus, eps_minus, f = params.values(p, t)
    return np.array([
        [eps_plus, 0.0, 0.0, -f],
        [0.0, eps_minus, f, 0.0],
        [0.0, f, -eps_plus, 0.0],
        [-f, 0.0, 0.0, -eps_minus],
    ], dtype=complex)


def qed_subblocks(a_h: np.ndarray) -> tuple:
    """The two decoupled 2x2 blocks on modes (0, 3) and (1, 2)."""
    first, second = [0, 3], [1, 2]
    return a_h[np.ix_(first, first)], a_h[np.ix_(second, second)]


@dataclass(frozen=True)
class QEDDynamics:
    u_blocks: tuple
    v_blocks: tuple
    shale_term: float
    residuals: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def pack(z):
            return {"re": float(np.real(z)), "im": float(np.imag(z))}
        return {
            "U": [pack(z) for z in self.u_blocks],
            "V": [pack(z) for z in self.v_blocks],
            "shale_term": self.shale_term,
            "residuals": dict(self.residuals),
        }


def _propagator_entries(propagator: np.ndarray) -> tuple:
    return (propagator[0, 0], propagator[1, 1]), (propagator[0, 3], propagator[1, 2])


def qed_closed_form(eps_plus: float, eps_minus: float, f: float, tau: float) -> tuple:
    """
    (U1, V1, U2, V2) of exp(-i tau A) for constant coefficients.

    With delta = (eps+ - eps-)/2, eps = (eps+ + eps-)/2, E = sqrt(eps^2 + f^2):
    V1 = e^(-i tau delta) i f sin(tau E)/E and V2 = -e^(i tau delta) i f sin(tau E)/E.
    """
    delta = (eps_plus - eps_minus) / 2
    eps = (eps_plus + eps_minus) / 2
    energy = math.hypot(eps, f)
    if energy == 0:
        return 1.0 + 0j, 0j, 1.0 + 0j, 0j
    c, s = math.cos(tau * energy), math.sin(tau * energy)
    diag = c - 1j * s * eps / energy
    u1 = np.exp(-1j * tau * delta) * diag
    u2 = np.exp(1j * tau * delta) * diag
    v1 = np.exp(-1j * tau * delta) * 1j * f * s / energy
    v2 = -np.exp(1j * tau * delta) * 1j * f * s / energy
    return complex(u1), complex(v1), complex(u2), complex(v2)


def qed_dynamics(params: QEDModelParams, p, s: float, t: float, steps: int = 1024,
                 nodes: int = 4, constant: bool = False) -> QEDDynamics:
    """
    One-particle propagator from s to t at momentum p.

    The unordered exponential exp(-i int_s^t A) uses composite
    Gauss-Legendre quadrature (`steps` panels of `nodes` points); the
    time-ordered product uses `steps` midpoint exponentials. Both are
    reported; blocks come from the unordered one.

    Raises:
        BadSteps: steps < 1
    """
    if int(steps) != steps or steps < 1:
        raise BadSteps(f"Need at least one time step, got {steps}")
    steps = int(steps)
    x, w = np.polynomial.legendre.leggauss(nodes)
    width = (t - s) / steps
    integral = np.zeros((4, 4), dtype=complex)
    for panel in range(steps):
        centre = s + (panel + 0.5) * width
        for xi, wi in zip(x, w):
            integral += wi * width / 2 * qed_mode_matrix(params, p, centre + xi * width / 2)
    unordered = expm(-1j * integral)

    ordered = np.eye(4, dtype=complex)
    for panel in range(steps):
        midpoint = s + (panel + 0.5) * width
        ordered = expm(-1j * width * qed_mode_matrix(params, p, midpoint)) @ ordered

    (u1, u2), (v1, v2) = _propagator_entries(unordered)
    residuals = {
        "ordering": float(np.max(np.abs(ordered - unordered))),
        "unitarity": float(max(abs(abs(u1) ** 2 + abs(v1) ** 2 - 1),
                               abs(abs(u2) ** 2 + abs(v2) ** 2 - 1))),
    }
    if constant:
        closed = qed_closed_form(*params.values(p, s), t - s)
        residuals["closed_form"] = float(max(abs(a - b) for a, b in zip((u1, v1, u2, v2), closed)))
    shale = float(abs(v1) ** 2 + abs(v2) ** 2)
    logger.debug(f"QED dynamics p={p} [{s}, {t}]: shale term {shale:.6g}, residuals {residuals}")
    return QEDDynamics((complex(u1), complex(u2)), (complex(v1), complex(v2)), shale, residuals)


def qed_sweep(params: QEDModelParams, momenta: Sequence, times: Sequence[float], s: float = 0.0,
              steps: int = 1024, threads: int = 1, constant: bool = False) -> List[dict]:
    """Dynamics over a (p, t) grid, rows in grid order regardless of `threads`."""
    grid = [(p, t) for p in momenta for t in times]

    def row(item):
        p, t = item
        result = qed_dynamics(params, p, s, t, steps, constant=constant)
        u1, u2 = result.u_blocks
        v1, v2 = result.v_blocks
        return {
            "p": p, "t": t,
            "abs_u1_sq": abs(u1) ** 2, "abs_v1_sq": abs(v1) ** 2,
            "abs_u2_sq": abs(u2) ** 2, "abs_v2_sq": abs(v2) ** 2,
            "unitarity": abs(u1) ** 2 + abs(v1) ** 2,
            "shale_term": result.shale_term,
            "ordering_residual": result.residuals["ordering"],
        }

    if threads > 1:
        with ThreadPool(processes=threads) as pool:
            return pool.map(row, grid)
    return [row(item) for item in grid]


def wick_sweep(params: WickModelParams, radius: int) -> List[dict]:
    lattice = ShellLattice(radius)
    values = _wick_arrays(params, lattice.norms)
    rows = []
    for i, point in enumerate(lattice.points):
        rows.append({"px": int(point[0]), "py": int(point[1]), "pz": int(point[2]),
                     **{key: float(values[key][i]) for key in ("h", "k", "u", "v", "E")}})
    return rows


def bcs_sweep(params: BCSModelParams, radius: int) -> List[dict]:
    rows = []
    for point in ShellLattice(radius).points:
        mode = bcs_mode(params, point)
        rows.append({"px": int(point[0]), "py": int(point[1]), "pz": int(point[2]),
                     "eps": mode.eps, "delta": abs(mode.delta), "u": abs(mode.u), "v": mode.v,
                     "E": mode.E})
    return rows
