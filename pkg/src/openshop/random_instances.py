"""Reproducible pseudo-random open shop systems.

The generator is a 64-bit linear congruential generator with Knuth's MMIX
constants::

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64

seeded with ``state = seed mod 2**64`` and advanced once before the first
draw.  ``below(k)`` takes the high 32 bits of the new state modulo ``k``.

A system is drawn as follows, each call consuming draws in this order:
for every machine a capacity ``1 + below(max_cap)``; then for every job a
requirement size ``min_req + below(max_req - min_req + 1)`` followed by a
partial Fisher-Yates shuffle of the machine indices, keeping the first
``size`` entries.
"""

from __future__ import annotations

from .shop_model import OpenShopSystem

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK = (1 << 64) - 1


class Lcg64:
    def __init__(self, seed: int):
        self.state = seed & MASK

    def next(self) -> int:
        self.state = (MULTIPLIER * self.state + INCREMENT) & MASK
        return self.state

    def below(self, k: int) -> int:
        if k < 1:
            raise ValueError("bound must be positive")
        return (self.next() >> 32) % k

    def between(self, lo: int, hi: int) -> int:
        """Uniform draw from the closed interval [lo, hi]."""
        return lo + self.below(hi - lo + 1)


class ProfileError(ValueError):
    pass


def random_system(rng: Lcg64, machines: int, jobs: int, max_cap: int = 1,
                  min_req: int = 0, max_req: int | None = None) -> OpenShopSystem:
    if max_req is None:
        max_req = machines
    if machines < 0 or jobs < 0:
        raise ProfileError("machine and job counts must be non-negative")
    if max_cap < 1:
        raise ProfileError("max_cap must be at least 1")
    if not 0 <= min_req <= max_req <= machines:
        raise ProfileError(
            f"need 0 <= min_req ({min_req}) <= max_req ({max_req}) <= machines ({machines})")
    caps = [1 + rng.below(max_cap) for _ in range(machines)]
    requirements = []
    for _ in range(jobs):
        size = rng.between(min_req, max_req)
        pool = list(range(machines))
        for k in range(size):
            pick = k + rng.below(machines - k)
            pool[k], pool[pick] = pool[pick], pool[k]
        requirements.append(pool[:size])
    return OpenShopSystem.build(caps, requirements)


def seeded_system(seed: int, machines: int, jobs: int, max_cap: int = 1,
                  min_req: int = 0, max_req: int | None = None) -> OpenShopSystem:
    return random_system(Lcg64(seed), machines, jobs, max_cap, min_req, max_req)


def family_system(seed: int, max_machines: int, max_jobs: int, max_cap: int,
                  max_req: int, min_req: int = 0) -> OpenShopSystem:
    """Draw the machine and job counts too (1..max each), then the system."""
    rng = Lcg64(seed)
    m = rng.between(max(1, min_req), max_machines)
    n = rng.between(1, max_jobs)
    return random_system(rng, m, n, max_cap, min_req, min(max_req, m))
