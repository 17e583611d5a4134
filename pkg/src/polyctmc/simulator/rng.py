"""Counter-based uniforms keyed by (seed, trial, jump index, sub-draw).

Every uniform is a pure function of its key, so a trial's randomness does
not depend on which worker runs it or on what ran before.  The mixer is the
SplitMix64 finalizer; the compiled kernel implements the same arithmetic.
"""

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
M1 = 0xBF58476D1CE4E5B9
M2 = 0x94D049BB133111EB
TWO_M53 = 2.0**-53


def mix(z: int) -> int:
    z = (z + GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * M1) & MASK
    z = ((z ^ (z >> 27)) * M2) & MASK
    return z ^ (z >> 31)


def trial_key(seed: int, trial: int) -> int:
    return mix(mix(seed & MASK) ^ (trial & MASK))


def step_key(key: int, step: int) -> int:
    return mix(key ^ (step & MASK))


def uniform(base: int, sub: int) -> float:
    """A double in (0, 1]; never 0, so log(u) is finite."""
    z = mix((base + sub * GOLDEN) & MASK)
    return ((z >> 11) + 1) * TWO_M53


def uniforms(seed: int, trial: int, step: int, n: int) -> list:
    base = step_key(trial_key(seed, trial), step)
    return [uniform(base, i) for i in range(n)]
