"""NSGA-II bi-objective search (both objectives maximized).

Elitist (mu + lambda) generational loop: binary tournament selection on
(front rank, crowding distance), simulated-binary crossover, polynomial
mutation, and a final non-dominated filter over the archive of every design
evaluated during the run.
"""

from dataclasses import dataclass, field

import numpy as np

from sehs.errors import DomainError, NumericalError


def dominates(a, b) -> bool:
    """a dominates b under maximization of every objective."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return bool(np.all(a >= b) and np.any(a > b))


def fast_nondominated_sort(objectives: np.ndarray) -> list:
    """Lists of indices per front; front 0 is the non-dominated set."""
    objs = np.atleast_2d(np.asarray(objectives, dtype=float))
    n = objs.shape[0]
    if n == 0:
        raise DomainError("cannot sort an empty point set")
    dominated_by = [[] for _ in range(n)]
    n_dominating = np.zeros(n, dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(objs[i], objs[j]):
                dominated_by[i].append(j)
                n_dominating[j] += 1
            elif dominates(objs[j], objs[i]):
                dominated_by[j].append(i)
                n_dominating[i] += 1
    fronts = [list(np.nonzero(n_dominating == 0)[0])]
    while True:
        nxt = []
        for i in fronts[-1]:
            for j in dominated_by[i]:
                n_dominating[j] -= 1
                if n_dominating[j] == 0:
                    nxt.append(j)
        if not nxt:
            return fronts
        fronts.append(sorted(nxt))


def crowding_distance(objectives: np.ndarray) -> np.ndarray:
    """Per-point crowding distance; boundary points get infinity."""
    objs = np.atleast_2d(np.asarray(objectives, dtype=float))
    n, m = objs.shape
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for k in range(m):
        order = np.argsort(objs[:, k], kind="stable")
        span = objs[order[-1], k] - objs[order[0], k]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span <= 0:
            continue
        gaps = (objs[order[2:], k] - objs[order[:-2], k]) / span
        dist[order[1:-1]] += gaps
    return dist


@dataclass(frozen=True)
class ParetoSet:
    """Non-dominated designs with their objective values and run metadata."""

    designs: np.ndarray      # (m, d)
    objectives: np.ndarray   # (m, 2)
    seed: int
    generations: int
    population: int
    archive_designs: np.ndarray = field(repr=False, default=None)
    archive_objectives: np.ndarray = field(repr=False, default=None)


def _tournament(rng, ranks, crowd):
    i, j = rng.integers(0, ranks.size, 2)
    if ranks[i] != ranks[j]:
        return i if ranks[i] < ranks[j] else j
    if crowd[i] != crowd[j]:
        return i if crowd[i] > crowd[j] else j
    return i


def _sbx(rng, p1, p2, lo, hi, eta=15.0):
    u = rng.random(p1.size)
    beta = np.where(u <= 0.5, (2.0 * u)**(1.0 / (eta + 1.0)),
                    (1.0 / (2.0 * (1.0 - u)))**(1.0 / (eta + 1.0)))
    c1 = 0.5 * ((1 + beta) * p1 + (1 - beta) * p2)
    c2 = 0.5 * ((1 - beta) * p1 + (1 + beta) * p2)
    return np.clip(c1, lo, hi), np.clip(c2, lo, hi)


def _poly_mutate(rng, x, lo, hi, prob, eta=20.0):
    y = x.copy()
    for k in range(x.size):
        if rng.random() >= prob or hi[k] <= lo[k]:
            continue
        u = rng.random()
        delta = ((2.0 * u)**(1.0 / (eta + 1.0)) - 1.0 if u < 0.5
                 else 1.0 - (2.0 * (1.0 - u))**(1.0 / (eta + 1.0)))
        y[k] = np.clip(y[k] + delta * (hi[k] - lo[k]), lo[k], hi[k])
    return y


def _rank_and_crowd(objs):
    fronts = fast_nondominated_sort(objs)
    ranks = np.empty(objs.shape[0], dtype=int)
    crowd = np.empty(objs.shape[0])
    for r, front in enumerate(fronts):
        ranks[front] = r
        crowd[front] = crowding_distance(objs[front])
    return fronts, ranks, crowd


def nsga2(evaluator, bounds, population: int = 100, generations: int = 100,
          seed: int = 0, sbx_eta: float = 15.0,
          mutation_eta: float = 20.0, initial=None) -> ParetoSet:
    """Maximize both components of ``evaluator(design) -> (f1, f2)``.

    The returned front is the non-dominated filter of *every* evaluated
    design, so no archive point dominates a returned one.

    ``initial`` optionally lists designs to inject into the starting
    population (clipped to the bounds). Warm-starting with designs whose
    objectives are already known keeps them in the archive, so when the
    evaluator is an interpolating surrogate, measured optima cannot be
    lost to surrogate error between its support points.
    """
    bounds = np.atleast_2d(np.asarray(bounds, dtype=float))
    lo, hi = bounds[:, 0], bounds[:, 1]
    d = lo.size
    if population < 8 or population % 2:
        raise DomainError("population must be even and >= 8")
    if np.any(hi <= lo):
        raise DomainError("bounds must satisfy lo < hi")
    rng = np.random.default_rng(seed)
    mut_prob = 1.0 / d

    def evaluate(design):
        try:
            f = np.asarray(evaluator(design), dtype=float)
        except Exception as exc:
            raise NumericalError(
                f"objective evaluation failed at design {design}") from exc
        if f.shape != (2,) or not np.all(np.isfinite(f)):
            raise NumericalError(
                f"objective evaluation invalid at design {design}: {f}")
        return f

    pop = rng.uniform(lo, hi, size=(population, d))
    if initial is not None:
        warm = np.clip(np.atleast_2d(np.asarray(initial, dtype=float)),
                       lo, hi)
        if warm.shape[1] != d:
            raise DomainError("initial designs disagree with bounds in "
                              "dimension")
        m = min(warm.shape[0], population)
        pop[:m] = warm[:m]
    objs = np.array([evaluate(x) for x in pop])
    archive_x, archive_f = [pop.copy()], [objs.copy()]
    _, ranks, crowd = _rank_and_crowd(objs)

    for _ in range(generations):
        children = []
        while len(children) < population:
            a = pop[_tournament(rng, ranks, crowd)]
            b = pop[_tournament(rng, ranks, crowd)]
            c1, c2 = _sbx(rng, a, b, lo, hi, sbx_eta)
            children.append(_poly_mutate(rng, c1, lo, hi, mut_prob,
                                         mutation_eta))
            children.append(_poly_mutate(rng, c2, lo, hi, mut_prob,
                                         mutation_eta))
        children = np.array(children[:population])
        child_objs = np.array([evaluate(x) for x in children])
        archive_x.append(children.copy())
        archive_f.append(child_objs.copy())

        merged = np.vstack([pop, children])
        merged_objs = np.vstack([objs, child_objs])
        fronts, _, _ = _rank_and_crowd(merged_objs)
        keep = []
        for front in fronts:
            if len(keep) + len(front) <= population:
                keep.extend(front)
            else:
                cd = crowding_distance(merged_objs[front])
                order = np.argsort(-cd, kind="stable")
                keep.extend(np.asarray(front)[order[:population - len(keep)]])
                break
        keep = np.asarray(keep)
        pop, objs = merged[keep], merged_objs[keep]
        _, ranks, crowd = _rank_and_crowd(objs)

    all_x = np.vstack(archive_x)
    all_f = np.vstack(archive_f)
    first = fast_nondominated_sort(all_f)[0]
    # collapse duplicate designs on the front
    uniq = []
    seen = set()
    for i in first:
        key = tuple(np.round(all_x[i], 12))
        if key not in seen:
            seen.add(key)
            uniq.append(i)
    return ParetoSet(designs=all_x[uniq], objectives=all_f[uniq], seed=seed,
                     generations=generations, population=population,
                     archive_designs=all_x, archive_objectives=all_f)


def hypervolume_2d(objectives: np.ndarray, reference) -> float:
    """Dominated hypervolume w.r.t. ``reference`` (maximization, 2-D)."""
    objs = np.atleast_2d(np.asarray(objectives, dtype=float))
    ref = np.asarray(reference, dtype=float)
    pts = objs[np.all(objs > ref, axis=1)]
    if pts.size == 0:
        return 0.0
    order = np.argsort(-pts[:, 0], kind="stable")
    pts = pts[order]
    hv, level = 0.0, ref[1]
    for x, y in pts:
        if y > level:
            hv += (x - ref[0]) * (y - level)
            level = y
    return float(hv)
