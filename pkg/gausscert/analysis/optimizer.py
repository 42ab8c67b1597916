"""
Genetic-algorithm search for test operators
Minimizes the significance of a partition over positive definite operators
"""
from dataclasses import asdict, dataclass, field
import hashlib
import json
import logging
from pathlib import Path
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from gausscert.exceptions import ConditioningError, ConfigValidationError, StorageError
from gausscert.models.witness import TestOperator, significance
from gausscert.utils.linalg import psd_sqrt, stable_seed, symmetrize
from gausscert.utils.validators import GaConfigForm, validate_mapping

# Configure logging
logger = logging.getLogger(__name__)

TOURNAMENT_SIZE = 3
BLEND_RANGE = (0.25, 0.75)
STALL_SHRINK = 0.7
PROGRESS_GROWTH = 1.3
MIN_MUTATION_SCALE = 1e-6
MAX_MUTATION_SCALE = 1.0
RELATIVE_IMPROVEMENT = 1e-6


@dataclass(frozen=True)
class GaConfig:
    """Genetic algorithm settings; loadable from TOML/JSON with the same field names"""
    population: int = 48
    max_generations: int = 400
    stall_generations: int = 60
    mutation_scale: float = 0.1
    crossover_rate: float = 0.6
    elitism: int = 2
    seed: int = 0

    def __post_init__(self):
        validate_mapping(GaConfigForm, asdict(self), 'GA configuration')

    @classmethod
    def from_mapping(cls, payload, source='GA configuration'):
        data = validate_mapping(GaConfigForm, payload, source)
        return cls(
            population=int(data['population']),
            max_generations=int(data['max_generations']),
            stall_generations=int(data['stall_generations']),
            mutation_scale=float(data['mutation_scale']),
            crossover_rate=float(data['crossover_rate']),
            elitism=int(data['elitism']),
            seed=int(data['seed']),
        )

    def with_seed(self, seed):
        return GaConfig(**{**asdict(self), 'seed': int(seed)})

    def to_dict(self):
        return asdict(self)

    def digest(self):
        """Short SHA-256 digest of the settings"""
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()[:16]


def load_ga_config(path):
    """
    Load GA settings from a TOML or JSON file

    Args:
        path (str): Path ending in .toml or .json

    Returns:
        tuple: (GaConfig, bool) where the flag tells whether the file set a seed
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise StorageError(f'Cannot read GA configuration {path}: {e.strerror or e}')
    try:
        if path.suffix.lower() == '.toml':
            payload = tomllib.loads(raw.decode('utf-8'))
        else:
            payload = json.loads(raw.decode('utf-8'))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ConfigValidationError({'file': [str(e)]}, str(path))
    config = GaConfig.from_mapping(payload, str(path))
    return config, isinstance(payload, dict) and 'seed' in payload


def partition_seed(seed, partition):
    """Per-partition RNG seed, stable across processes and scheduling"""
    return stable_seed(seed, ''.join(str(value) for value in partition.rgs))


def _pd_shift(gram, n):
    return 1e-9 * float(np.trace(gram)) / n + 1e-12


@dataclass
class Genome:
    """Lower-triangular factors whose Gram matrices define a positive definite operator"""
    l_xx: np.ndarray
    l_pp: np.ndarray

    @property
    def n(self):
        return self.l_xx.shape[0]

    def to_vector(self):
        rows, cols = np.tril_indices(self.n)
        return np.concatenate([self.l_xx[rows, cols], self.l_pp[rows, cols]])

    @classmethod
    def from_vector(cls, vector, n):
        rows, cols = np.tril_indices(n)
        size = rows.size
        l_xx, l_pp = np.zeros((n, n)), np.zeros((n, n))
        l_xx[rows, cols] = vector[:size]
        l_pp[rows, cols] = vector[size:]
        return cls(l_xx, l_pp)

    @classmethod
    def from_operator(cls, op):
        return cls(np.linalg.cholesky(op.m_xx), np.linalg.cholesky(op.m_pp))

    def decode(self):
        """Operator with m = l l^T + eps_pd I, normalized to Tr(m_xx + m_pp) = 2N"""
        blocks = []
        for factor in (self.l_xx, self.l_pp):
            gram = symmetrize(factor @ factor.T)
            blocks.append(gram + _pd_shift(gram, self.n) * np.eye(self.n))
        return TestOperator(self.n, *blocks).normalized()


def _pd_projected(matrix):
    matrix = symmetrize(matrix)
    eigvals, eigvecs = np.linalg.eigh(matrix)
    floor = 1e-9 * max(float(np.max(np.abs(eigvals))), 1e-300)
    return (eigvecs * np.maximum(eigvals, floor)) @ eigvecs.T


def _pair_form(n, first, second, eps=None):
    # x-difference / p-sum quadratic form coupling two sets of modes
    difference, total = np.zeros(n), np.zeros(n)
    difference[list(first)] = 1.0
    difference[list(second)] = -1.0
    total[list(first) + list(second)] = 1.0
    m_xx = 0.5 * np.outer(difference, difference)
    m_pp = 0.5 * np.outer(total, total)
    shift = _pd_shift(m_xx, n) if eps is None else eps
    return TestOperator(n, m_xx + shift * np.eye(n), m_pp + shift * np.eye(n))


def _adapted_pair_form(state, modes, flipped):
    """
    Optimal single-mode quadratic form of the partially transposed reduced state

    On the reduced state of `modes`, p-quadratures in `flipped` change sign. The
    canonical pair X = a.x, P = b.p (a.b = 1) with the smallest X^2 + P^2 is
    built from the weakest symplectic mode, then mapped back to the original frame.
    """
    n = state.n_modes
    index = np.ix_(modes, modes)
    signs = np.array([-1.0 if mode in flipped else 1.0 for mode in modes])
    c_xx = state.c_xx[index]
    c_pp = signs[:, None] * state.c_pp[index] * signs[None, :]

    root_xx = psd_sqrt(c_xx, 'reduced c_xx')
    eigvals, eigvecs = np.linalg.eigh(symmetrize(root_xx @ c_pp @ root_xx))
    weakest = eigvecs[:, 0]
    nu = float(np.sqrt(max(eigvals[0], 0.0)))
    if nu <= 0:
        raise ConditioningError('reduced state has a vanishing symplectic eigenvalue')
    a = np.linalg.solve(root_xx, weakest) * np.sqrt(nu)
    b = root_xx @ weakest / np.sqrt(nu)

    full_a, full_b = np.zeros(n), np.zeros(n)
    full_a[list(modes)] = a
    full_b[list(modes)] = signs * b
    m_xx, m_pp = np.outer(full_a, full_a), np.outer(full_b, full_b)
    return TestOperator(n, m_xx + _pd_shift(m_xx, n) * np.eye(n), m_pp + _pd_shift(m_pp, n) * np.eye(n))


def default_seeds(state, partition):
    """
    Deterministic heuristic operators placed in the initial population

    Order: identity; inverse covariance blocks; state-adapted forms of each block
    against the rest; state-adapted forms of each block pair; plain
    x-difference/p-sum forms of each block pair.

    Args:
        state (CovarianceState): Regularized state
        partition (Partition): Partition under test

    Returns:
        list: TestOperator seeds
    """
    n = state.n_modes
    seeds = [TestOperator.identity(n)]
    if n == 1:
        return seeds

    try:
        inverse_xx = _pd_projected(np.linalg.inv(state.c_xx))
        inverse_pp = _pd_projected(np.linalg.inv(state.c_pp))
        seeds.append(TestOperator(n, inverse_xx, inverse_pp))
    except (np.linalg.LinAlgError, ValueError):
        logger.debug('Singular covariance block; skipping inverse seed')

    blocks = partition.blocks
    adapted = []
    if len(blocks) > 1:
        everything = list(range(n))
        adapted.extend((everything, set(block)) for block in blocks)
    pairs = [(blocks[i], blocks[j]) for i in range(len(blocks)) for j in range(i + 1, len(blocks))]
    adapted.extend((sorted(first + second), set(second)) for first, second in pairs)
    for modes, flipped in adapted:
        try:
            seeds.append(_adapted_pair_form(state, modes, flipped))
        except (ConditioningError, np.linalg.LinAlgError):
            logger.debug(f'Skipping adapted seed on modes {modes}')
    seeds.extend(_pair_form(n, first, second) for first, second in pairs)
    return seeds


@dataclass(frozen=True)
class OptimizationOutcome:
    """Best witness found for one partition"""
    best: object
    best_operator: TestOperator
    generations_run: int
    evaluations: int
    seed_used: int
    history: tuple = field(default=(), repr=False)


class _Evaluator:
    """Counts evaluations of genome vectors"""

    def __init__(self, state, partition, added_noise):
        self.state = state
        self.partition = partition
        self.added_noise = added_noise
        self.evaluations = 0

    def __call__(self, vector):
        self.evaluations += 1
        op = Genome.from_vector(vector, self.state.n_modes).decode()
        try:
            result = significance(op, self.state, self.partition, self.added_noise)
        except ConditioningError as e:
            logger.debug(f'Discarding ill-conditioned operator: {e}')
            return np.inf, None, op
        return result.significance, result, op


def _normalize(vector, rng):
    norm = np.linalg.norm(vector)
    if not np.isfinite(norm) or norm == 0:
        vector = rng.standard_normal(vector.size)
        norm = np.linalg.norm(vector)
    return vector / norm


def _random_vector(n, rng):
    genome = Genome(np.tril(rng.standard_normal((n, n))), np.tril(rng.standard_normal((n, n))))
    for factor in (genome.l_xx, genome.l_pp):
        np.fill_diagonal(factor, np.abs(np.diag(factor)) + 0.1)
    return genome.to_vector()


def _tournament(fitness, rng):
    contenders = rng.choice(fitness.size, size=min(TOURNAMENT_SIZE, fitness.size), replace=False)
    # Ties go to the lowest index so selection stays deterministic
    return int(min(contenders, key=lambda index: (fitness[index], index)))


def _crossover(first, second, size, rng):
    child = np.empty_like(first)
    for start, stop in ((0, size), (size, 2 * size)):
        weight = rng.uniform(*BLEND_RANGE)
        child[start:stop] = weight * first[start:stop] + (1.0 - weight) * second[start:stop]
    return child


def optimize_witness(state, partition, config=None, added_noise=0.0, on_generation=None):
    """
    Minimize the significance of a partition with a genetic algorithm

    Args:
        state (CovarianceState): Regularized state
        partition (Partition): Partition with partition.n == state.n_modes
        config (GaConfig): Algorithm settings
        added_noise (float): Regularization noise carried into the result
        on_generation (callable): Optional observer called as on_generation(generation, population, fitness)
            for the initial population (generation 0) and after every generation

    Returns:
        OptimizationOutcome: Best witness, normalized operator and run statistics
    """
    config = config or GaConfig()
    if partition.n != state.n_modes:
        raise ConfigValidationError({'partition': [f'has {partition.n} modes, state has {state.n_modes}']},
                                    'optimizer input')
    n = state.n_modes
    seed_used = partition_seed(config.seed, partition)
    rng = np.random.default_rng(seed_used)
    evaluate = _Evaluator(state, partition, added_noise)
    size = n * (n + 1) // 2

    vectors = []
    for op in default_seeds(state, partition):
        if len(vectors) == config.population:
            break
        try:
            vectors.append(_normalize(Genome.from_operator(op).to_vector(), rng))
        except np.linalg.LinAlgError:
            logger.debug('Seed operator lost definiteness in Cholesky factorization; skipped')
    while len(vectors) < config.population:
        vectors.append(_normalize(_random_vector(n, rng), rng))

    population = np.array(vectors)
    scored = [evaluate(vector) for vector in population]
    fitness = np.array([score for score, _, _ in scored])

    if on_generation is not None:
        on_generation(0, population.copy(), fitness.copy())

    best_index = int(np.argmin(fitness))
    best_fitness, best_result, best_operator = scored[best_index]
    history = [best_fitness]
    scale = config.mutation_scale
    stall = 0
    generation = 0

    while generation < config.max_generations and stall < config.stall_generations:
        generation += 1
        order = np.argsort(fitness, kind='stable')
        next_vectors = [population[index] for index in order[:config.elitism]]
        next_scores = [scored[index] for index in order[:config.elitism]]

        while len(next_vectors) < config.population:
            parent = population[_tournament(fitness, rng)]
            if rng.random() < config.crossover_rate:
                mate = population[_tournament(fitness, rng)]
                child = _crossover(parent, mate, size, rng)
            else:
                child = parent.copy()
            child = _normalize(child + rng.normal(0.0, scale, child.size), rng)
            next_vectors.append(child)
            next_scores.append(evaluate(child))

        population = np.array(next_vectors)
        scored = next_scores
        fitness = np.array([score for score, _, _ in scored])
        if on_generation is not None:
            on_generation(generation, population.copy(), fitness.copy())

        index = int(np.argmin(fitness))
        if fitness[index] < best_fitness - RELATIVE_IMPROVEMENT * abs(best_fitness):
            stall = 0
            scale = min(scale * PROGRESS_GROWTH, MAX_MUTATION_SCALE)
        else:
            stall += 1
            scale = max(scale * STALL_SHRINK, MIN_MUTATION_SCALE)
        if fitness[index] < best_fitness:
            best_fitness, best_result, best_operator = scored[index]
        history.append(best_fitness)

    logger.debug(f'Partition {partition.format()}: sigma={best_fitness:.4f} after {generation} generations')
    return OptimizationOutcome(
        best=best_result,
        best_operator=best_operator,
        generations_run=generation,
        evaluations=evaluate.evaluations,
        seed_used=seed_used,
        history=tuple(history),
    )
