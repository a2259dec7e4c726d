"""Straight-from-the-definition evaluators used as independent oracles.

Everything here works on plain tuples and Fractions, written directly from
the utility and potential definitions.  Nothing imports the package's
evaluation paths, so these stay independent of the code they check.
"""

from fractions import Fraction
from itertools import product


def mean(vectors):
    n = len(vectors)
    dims = len(vectors[0])
    return tuple(Fraction(sum(v[k] for v in vectors), n) for k in range(dims))


def sq_dist(x, m):
    return sum((Fraction(c) - mc) ** 2 for c, mc in zip(x, m))


def naive_utility_wellmixed(profile, i, weight):
    """Quadratic distance to the population mean (self included) plus the
    uniqueness penalty over everyone else."""
    xbar = mean(profile)
    shared = sum(1 for j, x in enumerate(profile) if j != i and x == profile[i])
    return -sq_dist(profile[i], xbar) - weight * shared


def naive_utility_network(profile, i, out_neighbors, weight):
    nbrs = out_neighbors[i]
    assert nbrs, "oracle utility needs a nonempty neighbor set"
    xbar = mean([profile[j] for j in nbrs])
    shared = sum(1 for j in nbrs if profile[j] == profile[i])
    return -sq_dist(profile[i], xbar) - weight * shared


def naive_utility(profile, i, weight, out_neighbors=None):
    if out_neighbors is None:
        return naive_utility_wellmixed(profile, i, weight)
    return naive_utility_network(profile, i, out_neighbors, weight)


def naive_potential(profile, weight):
    n = len(profile)
    xbar = mean(profile)
    total = Fraction(0)
    for i in range(n):
        shared = sum(1 for j, x in enumerate(profile) if j != i and x == profile[i])
        total += Fraction(n - 1, n) * sq_dist(profile[i], xbar) + Fraction(1, 2) * weight * shared
    return -total


def domain(lo, hi, dims):
    return list(product(range(lo, hi + 1), repeat=dims))


def naive_better_replies(profile, i, lo, hi, dims, weight, out_neighbors=None):
    """Exhaustive scan: every identity strictly beating the current one."""
    current = naive_utility(profile, i, weight, out_neighbors)
    replies = set()
    for cand in domain(lo, hi, dims):
        if cand == profile[i]:
            continue
        deviated = profile[:i] + (cand,) + profile[i + 1 :]
        if naive_utility(deviated, i, weight, out_neighbors) > current:
            replies.add(cand)
    return replies


def naive_best_responses(profile, i, lo, hi, dims, weight, out_neighbors=None):
    best_value = None
    best = set()
    for cand in domain(lo, hi, dims):
        deviated = profile[:i] + (cand,) + profile[i + 1 :]
        value = naive_utility(deviated, i, weight, out_neighbors)
        if best_value is None or value > best_value:
            best_value = value
            best = {cand}
        elif value == best_value:
            best.add(cand)
    return best


def naive_is_nash(profile, lo, hi, dims, weight, out_neighbors=None):
    for i in range(len(profile)):
        if out_neighbors is not None and not out_neighbors[i]:
            continue
        if naive_better_replies(profile, i, lo, hi, dims, weight, out_neighbors):
            return False
    return True


def naive_nash_set(n_agents, lo, hi, dims, weight, out_neighbors=None):
    """Brute force over the entire profile space."""
    return [
        profile
        for profile in product(domain(lo, hi, dims), repeat=n_agents)
        if naive_is_nash(profile, lo, hi, dims, weight, out_neighbors)
    ]
