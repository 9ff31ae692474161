"""Seeded random conforming distributions for sweeps and property tests."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence

import numpy as np

from .probspace import CommonPart, Factor, FactorSpec, Family

WEIGHT_MAX = 6


def random_pmf(rng: np.random.Generator, size: int, sparsity: float = 0.25) -> list[Fraction]:
    """Exact pmf with small integer weights; some entries may be zero."""
    while True:
        w = rng.integers(1, WEIGHT_MAX + 1, size)
        w = np.where(rng.random(size) < sparsity, 0, w)
        if w.sum() > 0:
            break
    total = int(w.sum())
    return [Fraction(int(x), total) for x in w]


def random_conditional(rng, child, parents, cards: dict[str, int], sparsity: float = 0.25) -> Factor:
    pc = [cards[p] for p in parents]
    cc = [cards[c] for c in child]
    size = int(np.prod(cc))
    rows = [random_pmf(rng, size, sparsity) for _ in itertools.product(*[range(k) for k in pc])]
    table = np.empty(len(rows) * size, dtype=object)
    table[:] = [v for row in rows for v in row]
    return Factor(child, parents, table.reshape(tuple(pc) + tuple(cc)))


def random_function(rng, child: str, parents: Sequence[str], cards: dict[str, int]) -> Factor:
    pc = [cards[p] for p in parents]
    out = rng.integers(0, cards[child], int(np.prod(pc)) if pc else 1)
    it = iter(out.tolist())
    lookup = {pv: next(it) for pv in itertools.product(*[range(k) for k in pc])}
    return Factor.from_function(child, parents, pc, [cards[child]], lambda *pv: lookup[pv])


def _cards(rng, max_card: int, names: Sequence[str], low: int = 1) -> dict[str, int]:
    return {n: int(rng.integers(low, max_card + 1)) for n in names}


def random_spec(family: Family | str, rng: np.random.Generator, max_card: int = 3) -> FactorSpec:
    """A random distribution with the factorization of ``family``.

    Alphabets: |Q| <= 2, auxiliaries <= max_card, inputs and outputs in
    2..max_card.
    """
    family = Family(family)
    cards = {"Q": int(rng.integers(1, 3))}
    cards.update(_cards(rng, max_card, ("X1", "X2", "Y1", "Y2"), low=2))
    factors = [random_conditional(rng, ("Q",), (), cards)]
    encoders = []
    if family in (Family.HK, Family.HOD, Family.GENERAL_IC):
        cards.update(_cards(rng, max_card, ("U1", "W1", "U2", "W2")))
        for i in (1, 2):
            if family == Family.HK:
                factors.append(random_conditional(rng, (f"W{i}",), ("Q",), cards))
                factors.append(random_conditional(rng, (f"U{i}",), ("Q",), cards))
            else:
                factors.append(random_conditional(rng, (f"U{i}", f"W{i}"), ("Q",), cards))
            if family == Family.GENERAL_IC:
                factors.append(random_conditional(rng, (f"X{i}",), ("Q", f"U{i}", f"W{i}"), cards))
            else:
                encoders.append(random_function(rng, f"X{i}", ("Q", f"U{i}", f"W{i}"), cards))
    else:
        cards.update(_cards(rng, max_card, ("W1", "W2")))
        for i in (1, 2):
            factors.append(random_conditional(rng, (f"W{i}",), ("Q",), cards))
            factors.append(random_conditional(rng, (f"X{i}",), ("Q", f"W{i}"), cards))
    channel = random_conditional(rng, ("Y1", "Y2"), ("X1", "X2"), cards, sparsity=0.3)
    return FactorSpec(family, tuple(factors), tuple(encoders), channel)


def random_common_parts(rng: np.random.Generator, max_k: int = 2, allow_trivial: bool = True) -> list[CommonPart]:
    parts = []
    for i in (1, 2):
        k = int(rng.integers(1 if allow_trivial else 2, max_k + 1))
        parts.append(CommonPart(f"U{i}", f"W{i}", Factor((f"K{i}",), (), random_pmf(rng, k, sparsity=0.0))))
    return parts


def trivial_common_parts() -> list[CommonPart]:
    return [CommonPart(f"U{i}", f"W{i}", Factor((f"K{i}",), (), [1])) for i in (1, 2)]


def seeded(seed: int, index: int) -> np.random.Generator:
    """Independent generator for item ``index`` of a sweep."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))
