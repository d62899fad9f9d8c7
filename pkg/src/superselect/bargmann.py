"""Galilei arithmetic, the mass multiplier, and the extended classical model.

Units: hbar = 1, masses in arbitrary positive units.  A group element is
(R, v, a, b): rotation, boost velocity, spatial translation, time
translation.  The multiplier exponent M (v1 . R1 a2 + v1^2 b2 / 2) obstructs
any phase redefinition -- on the abelian boost/translation subgroup a
coboundary is symmetric while the exponent is not -- and the obstruction is
linear in the total mass M, so different masses carry inequivalent
multipliers and no common ray representation exists on their direct sum.

Promoting the masses to momenta with conjugate positions lambda_i makes the
centrally extended group act as a proper symmetry of the classical flow;
(x, p) evolve by velocity Verlet and the lambda_i by trapezoidal quadrature
of dV/dm_i - p_i^2 / (2 m_i^2), which never feeds back into (x, p).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSample,
    ShiftNotOnGrid,
    SupportClipped,
    UnstableStep,
)
__all__ = [
    "GalileiElement",
    "ExtendedElement",
    "ExtendedPhasePoint",
    "HarmonicPairPotential",
    "Trajectory",
    "galilei_identity",
    "galilei_multiply",
    "galilei_inverse",
    "rotation_from_axis_angle",
    "random_galilei_element",
    "bargmann_exponent",
    "bargmann_cocycle_check",
    "mass_superselection_report",
    "ray_compose_check",
    "extended_multiply",
    "extended_action",
    "extended_dynamics",
    "dynamics_symmetry_check",
]


def rotation_from_axis_angle(axis, angle: float) -> np.ndarray:
    """Rotation matrix about a (not necessarily unit) axis, re-orthonormalized."""
    u = np.asarray(axis, dtype=float)
    nu = np.linalg.norm(u)
    if nu == 0.0:
        return np.eye(3)
    u = u / nu
    k = np.array([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]])
    r = np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
    uu, _, vv = np.linalg.svd(r)  # polar projection keeps the 1e-12 orthogonality invariant
    r = uu @ vv
    if np.linalg.det(r) < 0:
        r = -r
    return r


@dataclass(frozen=True)
class GalileiElement:
    """(R, v, a, b): rotation, boost velocity, space translation, time translation."""

    R: np.ndarray = field(default_factory=lambda: np.eye(3))
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    a: np.ndarray = field(default_factory=lambda: np.zeros(3))
    b: float = 0.0

    def __post_init__(self):
        r = np.asarray(self.R, dtype=float)
        object.__setattr__(self, "R", r)
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).reshape(3))
        object.__setattr__(self, "b", float(self.b))
        if np.linalg.norm(r.T @ r - np.eye(3)) > 1e-12 or np.linalg.det(r) <= 0:
            raise ValueError("R must be a proper rotation (orthogonal, det +1) to 1e-12")


def galilei_identity() -> GalileiElement:
    return GalileiElement()


def galilei_multiply(g1: GalileiElement, g2: GalileiElement) -> GalileiElement:
    """(R1 R2, v1 + R1 v2, a1 + R1 a2 + v1 b2, b1 + b2)."""
    return GalileiElement(
        R=g1.R @ g2.R,
        v=g1.v + g1.R @ g2.v,
        a=g1.a + g1.R @ g2.a + g1.v * g2.b,
        b=g1.b + g2.b,
    )


def galilei_inverse(g: GalileiElement) -> GalileiElement:
    """(R^-1, -R^-1 v, -R^-1 (a - v b), -b)."""
    rt = g.R.T
    return GalileiElement(R=rt, v=-(rt @ g.v), a=-(rt @ (g.a - g.v * g.b)), b=-g.b)


def random_galilei_element(rng: np.random.Generator) -> GalileiElement:
    """Seeded generic element: axis-angle rotation, components in [-2, 2]."""
    axis = rng.standard_normal(3)
    angle = rng.uniform(-np.pi, np.pi)
    return GalileiElement(
        R=rotation_from_axis_angle(axis, angle),
        v=rng.uniform(-2.0, 2.0, size=3),
        a=rng.uniform(-2.0, 2.0, size=3),
        b=float(rng.uniform(-2.0, 2.0)),
    )


def bargmann_exponent(mass: float, g1: GalileiElement, g2: GalileiElement) -> float:
    """Multiplier exponent M (v1 . R1 a2 + v1^2 b2 / 2) of the mass-M ray representation."""
    if mass <= 0:
        raise ValueError("mass must be positive")
    return mass * (float(g1.v @ (g1.R @ g2.a)) + 0.5 * float(g1.v @ g1.v) * g2.b)


def bargmann_cocycle_check(mass: float, samples: int = 1000, seed: int = 0) -> float:
    """Max cocycle-identity residual of the mass multiplier over seeded triples."""
    rng = np.random.default_rng([seed, 401])
    worst = 0.0
    for _ in range(samples):
        g1, g2, g3 = (random_galilei_element(rng) for _ in range(3))
        delta = (bargmann_exponent(mass, g1, g2)
                 - bargmann_exponent(mass, g1, galilei_multiply(g2, g3))
                 + bargmann_exponent(mass, galilei_multiply(g1, g2), g3)
                 - bargmann_exponent(mass, g2, g3))
        worst = max(worst, abs(delta))
    return worst


def _boost_translation_pairs(rng: np.random.Generator, count: int):
    """Commuting pairs from the abelian subgroup of boosts and space translations."""
    pairs = []
    for _ in range(count):
        g1 = GalileiElement(v=rng.uniform(-2.0, 2.0, size=3),
                            a=rng.uniform(-2.0, 2.0, size=3))
        g2 = GalileiElement(v=rng.uniform(-2.0, 2.0, size=3),
                            a=rng.uniform(-2.0, 2.0, size=3))
        pairs.append((g1, g2))
    return pairs


def mass_superselection_report(m1: float, m2: float, samples: int = 100,
                               seed: int = 0) -> dict:
    """Antisymmetry obstructions certifying the mass multipliers inequivalent.

    Evaluates |xi(g1, g2) - xi(g2, g1)| for the mass-m1 exponent, the
    mass-m2 exponent, and their difference over commuting boost/translation
    pairs (plus the canonical x-boost / x-translation pair).  All three must
    exceed 0.1; since coboundaries are symmetric on an abelian subgroup,
    this rules out any common ray representation on the direct sum.
    """
    if m1 <= 0 or m2 <= 0:
        raise ValueError("masses must be positive")
    if m1 == m2:
        raise ValueError("mass_superselection_report needs two distinct masses")
    rng = np.random.default_rng([seed, 402])
    pairs = _boost_translation_pairs(rng, samples)
    skew = [abs(float(g1.v @ g2.a) - float(g2.v @ g1.a)) for g1, g2 in pairs]
    if max(skew) < 1e-6:
        raise DegenerateSample(
            "all sampled boost/translation pairs are symmetric to 1e-6; "
            "retry with a different seed")
    canonical = (GalileiElement(v=[1.0, 0.0, 0.0]), GalileiElement(a=[1.0, 0.0, 0.0]))
    pairs = [canonical] + pairs

    def obstruction(xi):
        return max(abs(xi(g1, g2) - xi(g2, g1)) for g1, g2 in pairs)

    ob1 = obstruction(lambda x, y: bargmann_exponent(m1, x, y))
    ob2 = obstruction(lambda x, y: bargmann_exponent(m2, x, y))
    obd = obstruction(lambda x, y: bargmann_exponent(m1, x, y) - bargmann_exponent(m2, x, y))
    canonical_triple = (
        abs(bargmann_exponent(m1, *canonical) - bargmann_exponent(m1, *reversed(canonical))),
        abs(bargmann_exponent(m2, *canonical) - bargmann_exponent(m2, *reversed(canonical))),
        abs(bargmann_exponent(m1, *canonical) - bargmann_exponent(m2, *canonical)
            - bargmann_exponent(m1, *reversed(canonical))
            + bargmann_exponent(m2, *reversed(canonical))),
    )
    return {
        "m1": m1,
        "m2": m2,
        "obstruction_m1": ob1,
        "obstruction_m2": ob2,
        "obstruction_difference": obd,
        "canonical_pair_obstructions": canonical_triple,
        "inequivalent": bool(min(ob1, ob2, obd) > 0.1),
        "consequence": (
            "multipliers of distinct total mass are inequivalent on the abelian "
            "boost/translation subgroup; no single ray representation exists on the "
            "direct sum, so superpositions across masses are excluded"),
    }


def _apply_boost_translation(mass: float, v: float, a: float, grid: np.ndarray,
                             psi: np.ndarray, support_tol: float) -> np.ndarray:
    """One-particle t = 0 transformation: multiply by exp(i M v (x - a)), shift by a."""
    h = grid[1] - grid[0]
    shift = a / h
    steps = int(round(shift))
    if abs(shift - steps) > 1e-9:
        raise ShiftNotOnGrid(f"translation {a} is not an integer multiple of spacing {h}")
    out = np.zeros_like(psi)
    if steps >= 0:
        if steps and np.any(np.abs(psi[len(psi) - steps:]) > support_tol):
            raise SupportClipped("wavefunction support would shift past the grid edge")
        out[steps:] = psi[:len(psi) - steps]
    else:
        if np.any(np.abs(psi[:-steps]) > support_tol):
            raise SupportClipped("wavefunction support would shift past the grid edge")
        out[:steps] = psi[-steps:]
    return np.exp(1j * mass * v * (grid - a)) * out


def ray_compose_check(mass: float, grid, g1: GalileiElement, g2: GalileiElement,
                      psi) -> dict:
    """Composition of two boost/translation transformations on a sampled line.

    Applies the transformation for g2 then g1 and compares with the single
    transformation for g1 g2 times exp(i xi), xi = M v1 a2.  Both elements
    must be pure boost/translations along x (b = 0, R = 1) with shifts on
    the grid; the comparison is exact up to roundoff (1e-12).
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("grid must be a 1-d array with at least two samples")
    h = np.diff(x)
    if np.max(np.abs(h - h[0])) > 1e-12 * abs(h[0]):
        raise ValueError("grid must be uniform")
    wave = np.asarray(psi, dtype=complex)
    if wave.shape != x.shape:
        raise ValueError("psi must be sampled on the grid")
    for g in (g1, g2):
        if g.b != 0.0 or np.linalg.norm(g.R - np.eye(3)) > 1e-12 \
                or np.any(g.v[1:] != 0.0) or np.any(g.a[1:] != 0.0):
            raise ValueError("elements must be boost/translations along x with b = 0")
    support_tol = 1e-14 * float(np.max(np.abs(wave)) or 1.0)

    v1, a1 = float(g1.v[0]), float(g1.a[0])
    v2, a2 = float(g2.v[0]), float(g2.a[0])
    lhs = _apply_boost_translation(
        mass, v1, a1, x,
        _apply_boost_translation(mass, v2, a2, x, wave, support_tol), support_tol)
    xi = mass * v1 * a2
    rhs = np.exp(1j * xi) * _apply_boost_translation(
        mass, v1 + v2, a1 + a2, x, wave, support_tol)
    deviation = float(np.max(np.abs(lhs - rhs)))
    return {
        "exponent": xi,
        "phase": complex(np.exp(1j * xi)),
        "max_deviation": deviation,
        "ok": deviation <= 1e-12,
    }


@dataclass(frozen=True)
class ExtendedElement:
    """(theta, g): element of the central extension by the reals."""

    theta: float
    g: GalileiElement


def extended_multiply(e1: ExtendedElement, e2: ExtendedElement,
                      mass: float) -> ExtendedElement:
    """Product with the mass multiplier: (theta1 + theta2 + xi(g1, g2), g1 g2)."""
    return ExtendedElement(
        theta=e1.theta + e2.theta + bargmann_exponent(mass, e1.g, e2.g),
        g=galilei_multiply(e1.g, e2.g),
    )


def extended_action(e: ExtendedElement, xs, lambdas, t: float, masses):
    """Action of the extension on configurations ({x_i}, {lambda_i}, t).

    Positions map to R x_i + v t + a, time to t + b, and each mass-conjugate
    position picks up -(theta / M + v . R x_i + v^2 t / 2), with M the total
    mass.  Composes exactly with :func:`extended_multiply`.
    """
    x = np.asarray(xs, dtype=float).reshape(-1, 3)
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    m = np.asarray(masses, dtype=float).reshape(-1)
    if not (len(x) == len(lam) == len(m)):
        raise ValueError("xs, lambdas and masses must have one entry per particle")
    if np.any(m <= 0):
        raise ValueError("masses must be positive")
    total = float(m.sum())
    g = e.g
    x_new = x @ g.R.T + g.v * t + g.a
    lam_new = lam - (e.theta / total + (x @ g.R.T) @ g.v + 0.5 * float(g.v @ g.v) * t)
    return x_new, lam_new, t + g.b


@dataclass(frozen=True)
class ExtendedPhasePoint:
    """Point of the extended phase space: (x_i, p_i, m_i, lambda_i, t)."""

    x: np.ndarray        # (n, 3)
    p: np.ndarray        # (n, 3)
    m: np.ndarray        # (n,)
    lam: np.ndarray      # (n,)
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(-1, 3))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float).reshape(-1, 3))
        object.__setattr__(self, "m", np.asarray(self.m, dtype=float).reshape(-1))
        object.__setattr__(self, "lam", np.asarray(self.lam, dtype=float).reshape(-1))
        n = self.x.shape[0]
        if self.p.shape[0] != n or self.m.shape[0] != n or self.lam.shape[0] != n:
            raise ValueError("x, p, m, lambda must agree on the particle count")
        if np.any(self.m <= 0) or not all(
                np.all(np.isfinite(f)) for f in (self.x, self.p, self.m, self.lam)):
            raise ValueError("masses must be positive and all fields finite")


@dataclass(frozen=True)
class HarmonicPairPotential:
    """V = sum_{i<j} k (|x_i - x_j| - L)^2; mass-independent, Galilei-invariant."""

    k: float = 1.0
    L: float = 1.0

    def energy(self, x: np.ndarray) -> float:
        n = x.shape[0]
        e = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                r = float(np.linalg.norm(x[i] - x[j]))
                e += self.k * (r - self.L) ** 2
        return e

    def forces(self, x: np.ndarray) -> np.ndarray:
        n = x.shape[0]
        f = np.zeros_like(x)
        for i in range(n):
            for j in range(i + 1, n):
                dx = x[i] - x[j]
                r = float(np.linalg.norm(dx))
                pull = -2.0 * self.k * (r - self.L) * dx / r
                f[i] += pull
                f[j] -= pull
        return f


def _potential_energy(potential, x: np.ndarray) -> float:
    return 0.0 if potential is None else potential.energy(x)


def _potential_forces(potential, x: np.ndarray) -> np.ndarray:
    return np.zeros_like(x) if potential is None else potential.forces(x)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray     # (steps + 1,)
    x: np.ndarray         # (steps + 1, n, 3)
    p: np.ndarray         # (steps + 1, n, 3)
    lam: np.ndarray       # (steps + 1, n)
    m: np.ndarray         # (n,), exactly constant
    energy: np.ndarray    # (steps + 1,), (x, p)-sector energy

    def final(self) -> ExtendedPhasePoint:
        return ExtendedPhasePoint(x=self.x[-1], p=self.p[-1], m=self.m,
                                  lam=self.lam[-1], t=float(self.times[-1]))


def extended_dynamics(initial: ExtendedPhasePoint, potential, dt: float,
                      steps: int) -> Trajectory:
    """Integrate the extended system: velocity Verlet for (x, p), quadrature for lambda.

    The built-in potentials carry no mass dependence, so the lambda
    integrand is -p_i^2 / (2 m_i^2), accumulated by the trapezoidal rule on
    the Verlet grid; the masses are constants of motion by construction.
    Raises :class:`UnstableStep` when the (x, p) energy drifts by more than
    1e-2 relative.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if potential is not None and not isinstance(potential, HarmonicPairPotential):
        raise ValueError("potential must be None or a HarmonicPairPotential")
    n = initial.x.shape[0]
    x = np.empty((steps + 1, n, 3))
    p = np.empty((steps + 1, n, 3))
    lam = np.empty((steps + 1, n))
    energy = np.empty(steps + 1)
    x[0], p[0], lam[0] = initial.x, initial.p, initial.lam
    m = initial.m
    minv = 1.0 / m[:, None]

    def lam_rate(pk):
        # dV/dm_i vanishes for the built-in family
        return -np.sum(pk * pk, axis=1) / (2.0 * m * m)

    f = _potential_forces(potential, x[0])
    energy[0] = float(np.sum(p[0] * p[0] * minv) / 2.0 + _potential_energy(potential, x[0]))
    for k in range(steps):
        x[k + 1] = x[k] + dt * p[k] * minv + 0.5 * dt * dt * f * minv
        f_new = _potential_forces(potential, x[k + 1])
        p[k + 1] = p[k] + 0.5 * dt * (f + f_new)
        lam[k + 1] = lam[k] + 0.5 * dt * (lam_rate(p[k]) + lam_rate(p[k + 1]))
        f = f_new
        energy[k + 1] = float(np.sum(p[k + 1] * p[k + 1] * minv) / 2.0
                              + _potential_energy(potential, x[k + 1]))
    scale = abs(energy[0]) if abs(energy[0]) > 1e-12 else 1.0
    drift = float(np.max(np.abs(energy - energy[0]))) / scale
    if not (drift <= 1e-2):  # catches NaN from blown-up trajectories too
        raise UnstableStep(f"relative energy drift {drift:.3e} exceeds 1e-2; reduce dt")
    times = initial.t + dt * np.arange(steps + 1)
    return Trajectory(times=times, x=x, p=p, lam=lam, m=m.copy(), energy=energy)


def transform_phase_point(e: ExtendedElement, point: ExtendedPhasePoint) -> ExtendedPhasePoint:
    """Extended action on a phase-space point; momenta map to R p_i + m_i v."""
    x_new, lam_new, t_new = extended_action(e, point.x, point.lam, point.t, point.m)
    p_new = point.p @ e.g.R.T + point.m[:, None] * e.g.v
    return ExtendedPhasePoint(x=x_new, p=p_new, m=point.m, lam=lam_new, t=t_new)


def dynamics_symmetry_check(initial: ExtendedPhasePoint, element: ExtendedElement,
                            potential, dt: float, steps: int) -> float:
    """Max deviation between transform-then-evolve and evolve-then-transform.

    The initial point is transformed (configuration by the extended action
    at t = 0, momenta by R p + m v) and evolved for the same number of
    steps; the result is compared with the transformed final state of the
    untransformed evolution.  Time translations are matched automatically
    because the built-in potentials are autonomous.
    """
    traj = extended_dynamics(initial, potential, dt, steps)
    moved = extended_dynamics(transform_phase_point(element, initial),
                              potential, dt, steps)
    expected = transform_phase_point(element, traj.final())
    got = moved.final()
    return float(max(
        np.max(np.abs(got.x - expected.x)),
        np.max(np.abs(got.p - expected.p)),
        np.max(np.abs(got.lam - expected.lam)),
    ))
