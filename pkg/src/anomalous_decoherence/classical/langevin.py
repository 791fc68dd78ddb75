"""
Langevin dynamics of the classical bath coordinate.

The rescaled equation of motion is

    x'' = F(x) - gamma1 x' + sqrt(2 gamma1 T) eta(t)

with F(x) = x - x^3 for the double-well bath and F(x) = -x for the linear
(harmonic) bath. A dephasing probe accumulates the phase 2 eps int_0^t x dt'.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import integrate
from typing_extensions import Literal

from ..core.errors import CapacityError, EstimationError, IntegrationError, InvalidParameterError

logger = logging.getLogger(__name__)

PotentialKind = Literal["double_well", "harmonic"]
POTENTIALS = ("double_well", "harmonic")

DEFAULT_DT = 0.01
DEFAULT_RECORD_EVERY = 10
DEFAULT_BLOCK_SIZE = 250
DEFAULT_MAX_BYTES = 2 * 1024**3

# Steps of noise drawn per generator call; any value gives the same stream.
NOISE_CHUNK = 1024

PROPOSAL_HALF_WIDTH = 3.0
PROPOSAL_BATCH = 64
HOP_THRESHOLD = 0.5

# Minimum of the double-well potential, V(+-1) = -1/4.
DOUBLE_WELL_MINIMUM = -0.25
BARRIER_HEIGHT = 0.25
# |V''| at the barrier top and at the well bottoms
BARRIER_CURVATURE = 1.0
WELL_CURVATURE = 2.0

SeedLike = Union[int, np.integer, np.random.Generator]


@dataclass(frozen=True)
class PhysicalParams:
    """Bath parameters in physical units.

    Attributes:
        mass: Particle mass m
        a: Quadratic potential coefficient (energy/length^2)
        b: Quartic potential coefficient (energy/length^4)
        gamma_bar: Dissipation coefficient (1/time)
        temperature: Bath temperature (kelvin)
        k_b: Boltzmann constant (energy/kelvin)
    """
    mass: float
    a: float
    b: float
    gamma_bar: float
    temperature: float
    k_b: float = 1.0

    def __post_init__(self) -> None:
        for name in ("mass", "a", "b", "k_b"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)}")
        if self.gamma_bar < 0:
            raise InvalidParameterError(f"gamma_bar must be non-negative, got {self.gamma_bar}")
        if self.temperature < 0:
            raise InvalidParameterError(f"temperature must be non-negative, got {self.temperature}")

    @property
    def diffusion(self) -> float:
        """Fluctuation-dissipation diffusion coefficient D = gamma_bar m k_b T."""
        return self.gamma_bar * self.mass * self.k_b * self.temperature

    @property
    def length_unit(self) -> float:
        """Physical length of one rescaled unit, (a/b)^(1/2)."""
        return math.sqrt(self.a / self.b)

    @property
    def time_unit(self) -> float:
        """Physical time of one rescaled unit, (m/a)^(1/2)."""
        return math.sqrt(self.mass / self.a)


@dataclass(frozen=True)
class ClassicalBathParams:
    """Dimensionless bath and probe parameters.

    Attributes:
        gamma1: Rescaled dissipation
        temperature: Rescaled temperature
        epsilon: Probe coupling
        omega: Probe bare frequency (the dephasing probe requires 0)
        potential: "double_well" (non-linear bath) or "harmonic" (linear bath)
    """
    gamma1: float
    temperature: float
    epsilon: float = 0.0
    omega: float = 0.0
    potential: PotentialKind = "double_well"

    def __post_init__(self) -> None:
        if self.gamma1 < 0:
            raise InvalidParameterError(f"gamma1 must be non-negative, got {self.gamma1}")
        if self.temperature < 0:
            raise InvalidParameterError(f"temperature must be non-negative, got {self.temperature}")
        if self.epsilon < 0:
            raise InvalidParameterError(f"epsilon must be non-negative, got {self.epsilon}")
        if self.potential not in POTENTIALS:
            raise InvalidParameterError(f"Unknown potential: {self.potential}")

    @property
    def noise_amplitude(self) -> float:
        """sqrt(2 gamma1 T); exactly zero at T = 0."""
        return math.sqrt(2.0 * self.gamma1 * self.temperature)


@dataclass(frozen=True)
class TrajectoryState:
    """Position, velocity and accumulated probe phase at time t."""
    x: float
    v: float
    phase: float = 0.0
    t: float = 0.0

    def is_finite(self) -> bool:
        return all(math.isfinite(value) for value in (self.x, self.v, self.phase, self.t))


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Independent realizations recorded on a uniform time grid.

    ``x`` and ``phase`` have shape (n_realizations, n_records).
    """
    params: ClassicalBathParams
    dt: float
    t_max: float
    record_every: int
    master_seed: int
    x: np.ndarray
    phase: Optional[np.ndarray]
    equilibrium_start: bool

    @property
    def n_realizations(self) -> int:
        return int(self.x.shape[0])

    @property
    def record_dt(self) -> float:
        return self.dt * self.record_every

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.x.shape[1]) * self.record_dt

    @property
    def has_phases(self) -> bool:
        return self.phase is not None


@dataclass(frozen=True)
class HoppingRate:
    """Measured well-to-well transition rate."""
    rate: float
    stderr: float
    n_transitions: int
    duration: float


def rescale(params: PhysicalParams) -> ClassicalBathParams:
    """Map physical parameters onto the dimensionless equation of motion.

    gamma1 = gamma_bar (m/a)^(1/2) and T = (b k_b / a^2) T_phys.
    """
    if params.mass <= 0 or params.a <= 0 or params.b <= 0:
        raise InvalidParameterError("mass, a and b must be positive")
    gamma1 = params.gamma_bar * math.sqrt(params.mass / params.a)
    temperature = params.b * params.k_b * params.temperature / params.a**2
    return ClassicalBathParams(gamma1=gamma1, temperature=temperature)


def potential_energy(x: Union[float, np.ndarray],
                     potential: PotentialKind = "double_well") -> Union[float, np.ndarray]:
    """V(x) = -x^2/2 + x^4/4 (double well) or x^2/2 (harmonic)."""
    x2 = x * x
    if potential == "harmonic":
        return 0.5 * x2
    return -0.5 * x2 + 0.25 * x2 * x2


def force(x: Union[float, np.ndarray],
          potential: PotentialKind = "double_well") -> Union[float, np.ndarray]:
    """F(x) = -V'(x)."""
    if potential == "harmonic":
        return -x
    return x - x * x * x


def _heun_update(x, v, phase, params: ClassicalBathParams, dt: float, noise):
    """One stochastic Heun step on scalars or arrays.

    Drift is integrated by predictor-corrector; the additive noise kick
    enters the velocity once, as in Euler-Maruyama.
    """
    kick = params.noise_amplitude * math.sqrt(dt) * noise
    gamma1 = params.gamma1
    accel = force(x, params.potential) - gamma1 * v
    x_pred = x + v * dt
    v_pred = v + accel * dt + kick
    accel_pred = force(x_pred, params.potential) - gamma1 * v_pred
    x_new = x + 0.5 * dt * (v + v_pred)
    v_new = v + 0.5 * dt * (accel + accel_pred) + kick
    # 2 eps * trapezoid of x over the step
    phase_new = phase + params.epsilon * dt * (x + x_new)
    return x_new, v_new, phase_new


def step(state: TrajectoryState, params: ClassicalBathParams, dt: float,
         noise: float) -> TrajectoryState:
    """Advance a single trajectory by dt given a standard Gaussian draw."""
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    x, v, phase = _heun_update(state.x, state.v, state.phase, params, dt, noise)
    return TrajectoryState(x=float(x), v=float(v), phase=float(phase), t=state.t + dt)


def evolve(state: TrajectoryState, params: ClassicalBathParams, dt: float, n_steps: int,
           rng: Optional[np.random.Generator] = None) -> TrajectoryState:
    """Apply ``step`` n_steps times; noise is drawn from rng when T > 0."""
    noisy = params.temperature > 0
    if noisy and rng is None:
        raise InvalidParameterError("a random generator is required when T > 0")
    for _ in range(n_steps):
        noise = float(rng.standard_normal()) if noisy else 0.0
        state = step(state, params, dt, noise)
    return state


def realization_generator(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one realization, a pure function of (seed, index)."""
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(master_seed: int, *keys: int) -> int:
    """64-bit seed for an independent sub-experiment."""
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


def sample_equilibrium(params: ClassicalBathParams, seed: SeedLike) -> TrajectoryState:
    """Draw (x, v) from the Boltzmann distribution exp(-(v^2/2 + V(x))/T).

    The double-well position is drawn by rejection from a uniform proposal on
    [-3, 3], where exp(-V/T) is negligible outside for T <= 5. At T = 0 the
    particle sits at rest in one of the minima.
    """
    rng = _as_generator(seed)
    temperature = params.temperature
    if temperature == 0:
        if params.potential == "harmonic":
            return TrajectoryState(x=0.0, v=0.0)
        x = 1.0 if rng.random() < 0.5 else -1.0
        return TrajectoryState(x=x, v=0.0)

    scale = math.sqrt(temperature)
    if params.potential == "harmonic":
        x = float(rng.normal(0.0, scale))
    else:
        while True:
            proposal = rng.uniform(-PROPOSAL_HALF_WIDTH, PROPOSAL_HALF_WIDTH, PROPOSAL_BATCH)
            draw = rng.random(PROPOSAL_BATCH)
            weight = np.exp(-(potential_energy(proposal) - DOUBLE_WELL_MINIMUM) / temperature)
            accepted = np.nonzero(draw < weight)[0]
            if accepted.size:
                x = float(proposal[accepted[0]])
                break
    v = float(rng.normal(0.0, scale))
    return TrajectoryState(x=x, v=v)


def boltzmann_moment(params: ClassicalBathParams, power: int = 2) -> float:
    """<x^power> under exp(-V(x)/T), by one-dimensional quadrature."""
    temperature = params.temperature
    if temperature == 0:
        if params.potential == "harmonic":
            return 1.0 if power == 0 else 0.0
        return 1.0 if power % 2 == 0 else 0.0

    offset = 0.0 if params.potential == "harmonic" else DOUBLE_WELL_MINIMUM
    limit = max(6.0, 12.0 * math.sqrt(temperature)) if params.potential == "harmonic" else 6.0

    def weight(x: float) -> float:
        return math.exp(-(potential_energy(x, params.potential) - offset) / temperature)

    points = (-1.0, 0.0, 1.0)
    norm, _ = integrate.quad(weight, -limit, limit, points=points, limit=200)
    moment, _ = integrate.quad(lambda x: x**power * weight(x), -limit, limit,
                               points=points, limit=200)
    return moment / norm


def kramers_rate(params: ClassicalBathParams) -> float:
    """Kramers hopping rate R = (sqrt(2) pi gamma1)^-1 exp[-(4 gamma1 T)^-1]."""
    if params.potential != "double_well":
        raise InvalidParameterError("the Kramers rate is defined for the double-well bath only")
    if not params.gamma1 > 0:
        raise InvalidParameterError(f"gamma1 must be positive, got {params.gamma1}")
    prefactor = 1.0 / (math.sqrt(2.0) * math.pi * params.gamma1)
    if params.temperature == 0:
        return 0.0
    if math.isinf(params.temperature):
        return prefactor
    return prefactor * math.exp(-1.0 / (4.0 * params.gamma1 * params.temperature))


def kramers_escape_rate(params: ClassicalBathParams) -> float:
    """Kramers escape rate at moderate damping from the curvatures of V.

    R = (sqrt(gamma1^2/4 + w_b^2) - gamma1/2) / w_b * w_0 / (2 pi) * exp(-dV/T)

    with w_0 = sqrt(2) in the wells, w_b = 1 at the barrier and dV = 1/4.
    Measured hopping rates follow this form. ``kramers_rate`` keeps gamma1
    in the exponent and sets the pi R scale of the spectral side peaks.
    """
    if params.potential != "double_well":
        raise InvalidParameterError("the Kramers rate is defined for the double-well bath only")
    if not params.gamma1 > 0:
        raise InvalidParameterError(f"gamma1 must be positive, got {params.gamma1}")
    half = 0.5 * params.gamma1
    transmission = math.sqrt(half * half + BARRIER_CURVATURE) - half
    prefactor = transmission / math.sqrt(BARRIER_CURVATURE) * math.sqrt(WELL_CURVATURE) / (2.0 * math.pi)
    if params.temperature == 0:
        return 0.0
    if math.isinf(params.temperature):
        return prefactor
    return prefactor * math.exp(-BARRIER_HEIGHT / params.temperature)


def linear_bath_spectrum(params: ClassicalBathParams,
                         omega: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Spectrum of the harmonic bath, 2 gamma1 T / ((1 - w^2)^2 + gamma1^2 w^2).

    Grows linearly with T at every frequency.
    """
    omega = np.asarray(omega, dtype=float)
    gamma1 = params.gamma1
    result = 2.0 * gamma1 * params.temperature / ((1.0 - omega**2) ** 2 + (gamma1 * omega) ** 2)
    return float(result) if result.ndim == 0 else result


def ensemble_nbytes(n: int, n_records: int, record_phase: bool) -> int:
    return n * n_records * 8 * (2 if record_phase else 1)


def simulate_ensemble(params: ClassicalBathParams, n: int, dt: float = DEFAULT_DT,
                      t_max: float = 200.0, master_seed: int = 0, *,
                      record_every: int = DEFAULT_RECORD_EVERY,
                      record_phase: bool = True,
                      initial_state: Optional[TrajectoryState] = None,
                      n_workers: Optional[int] = None,
                      block_size: int = DEFAULT_BLOCK_SIZE,
                      max_bytes: int = DEFAULT_MAX_BYTES) -> TrajectoryEnsemble:
    """Simulate n independent realizations.

    Each realization starts from ``sample_equilibrium`` (or from
    ``initial_state`` when given) and draws its noise from its own generator,
    so the result does not depend on n_workers or block_size.

    Raises:
        InvalidParameterError: on n < 1, dt <= 0, t_max < dt, or a t_max that
            is not a whole number of record strides (record_every * dt)
        CapacityError: if the recorded grid exceeds max_bytes
    """
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt}")
    if t_max < dt:
        raise InvalidParameterError(f"t_max ({t_max}) must be at least dt ({dt})")
    if record_every < 1:
        raise InvalidParameterError(f"record_every must be at least 1, got {record_every}")

    n_steps = int(round(t_max / dt))
    if n_steps % record_every or not math.isclose(n_steps * dt, t_max, rel_tol=1e-9, abs_tol=1e-12):
        raise InvalidParameterError(
            f"t_max ({t_max}) must be a whole number of records of {record_every} steps of dt ({dt})")
    n_records = n_steps // record_every + 1
    required = ensemble_nbytes(n, n_records, record_phase)
    if required > max_bytes:
        raise CapacityError(required, max_bytes)

    x_out = np.empty((n, n_records))
    phase_out = np.empty((n, n_records)) if record_phase else None
    blocks: List[Tuple[int, int]] = [(lo, min(lo + block_size, n)) for lo in range(0, n, block_size)]
    logger.debug(f"Simulating {n} realizations in {len(blocks)} blocks, {n_steps} steps each")

    def run_block(bounds: Tuple[int, int]) -> None:
        lo, hi = bounds
        _simulate_block(params, lo, hi, dt, n_steps, record_every, master_seed,
                        initial_state, x_out, phase_out)

    workers = n_workers or 1
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for future in [pool.submit(run_block, b) for b in blocks]:
                future.result()
    else:
        for bounds in blocks:
            run_block(bounds)

    return TrajectoryEnsemble(
        params=params,
        dt=dt,
        t_max=n_steps * dt,
        record_every=record_every,
        master_seed=master_seed,
        x=x_out,
        phase=phase_out,
        equilibrium_start=initial_state is None,
    )


def _simulate_block(params: ClassicalBathParams, lo: int, hi: int, dt: float, n_steps: int,
                    record_every: int, master_seed: int, initial_state: Optional[TrajectoryState],
                    x_out: np.ndarray, phase_out: Optional[np.ndarray]) -> None:
    size = hi - lo
    generators = [realization_generator(master_seed, i) for i in range(lo, hi)]
    if initial_state is None:
        starts = [sample_equilibrium(params, g) for g in generators]
        x = np.array([s.x for s in starts])
        v = np.array([s.v for s in starts])
    else:
        x = np.full(size, float(initial_state.x))
        v = np.full(size, float(initial_state.v))
    phase = np.zeros(size)

    x_out[lo:hi, 0] = x
    if phase_out is not None:
        phase_out[lo:hi, 0] = phase

    noisy = params.temperature > 0
    noise = np.zeros((NOISE_CHUNK, size))
    record = 1
    for s in range(n_steps):
        offset = s % NOISE_CHUNK
        if noisy and offset == 0:
            length = min(NOISE_CHUNK, n_steps - s)
            for j, generator in enumerate(generators):
                noise[:length, j] = generator.standard_normal(length)
        x, v, phase = _heun_update(x, v, phase, params, dt, noise[offset])
        if (s + 1) % record_every == 0:
            x_out[lo:hi, record] = x
            if phase_out is not None:
                phase_out[lo:hi, record] = phase
            record += 1

    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise IntegrationError(f"Langevin integration diverged in realizations {lo}..{hi - 1}; reduce dt")


def hopping_rate(ensemble: TrajectoryEnsemble, threshold: float = HOP_THRESHOLD) -> HoppingRate:
    """Well-to-well transition rate with hysteresis at +-threshold.

    A transition is counted when the trajectory, last seen beyond one
    threshold, next reaches beyond the opposite one.
    """
    x = ensemble.x
    duration = float(ensemble.times[-1])
    if duration <= 0:
        raise EstimationError("ensemble must span a positive duration")
    side = np.where(x[:, 0] > threshold, 1, np.where(x[:, 0] < -threshold, -1, 0))
    counts = np.zeros(x.shape[0], dtype=np.int64)
    for k in range(1, x.shape[1]):
        column = x[:, k]
        new_side = np.where(column > threshold, 1, np.where(column < -threshold, -1, side))
        counts += (side != 0) & (new_side != side)
        side = new_side
    per_realization = counts / duration
    n = per_realization.size
    stderr = float(per_realization.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return HoppingRate(rate=float(per_realization.mean()), stderr=stderr,
                       n_transitions=int(counts.sum()), duration=duration)
