"""Worked example: a dependent pair built from a shared bit.

U and W are independent and uniform over {0,1,2,3}; K is an independent
fair bit.  Sender 1 uses U1 = (U, K) and W1 = (W, K) (index 2*u + k), sends
X1 = (U + W, K), and the channel is noiseless.  Sender 2 is silent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import numpy as np

from .probspace import (
    Factor,
    FactorSpec,
    Family,
    JointDist,
    apply_map,
    build_joint,
    entropy,
    mutual_info,
)

ALPHABET = 4
SHARED = 2


def example_spec() -> FactorSpec:
    n, k = ALPHABET, SHARED
    pair = np.empty((1, n * k, n * k), dtype=object)
    for a in range(n * k):
        for b in range(n * k):
            pair[0, a, b] = Fraction(1, n * n * k) if a % k == b % k else Fraction(0)
    sums = 2 * n - 1
    return FactorSpec(
        Family.HOD,
        factors=(
            Factor(("Q",), (), [1]),
            Factor(("U1", "W1"), ("Q",), pair),
            Factor(("U2", "W2"), ("Q",), np.array([[[Fraction(1)]]], dtype=object)),
        ),
        encoders=(
            Factor.from_function(
                "X1", ("Q", "U1", "W1"), (1, n * k, n * k), (sums * k,),
                lambda q, a, b: (a // k + b // k) * k + a % k,
            ),
            Factor.from_function("X2", ("Q", "U2", "W2"), (1, 1, 1), (1,), lambda q, a, b: 0),
        ),
        channel=Factor.from_function(("Y1", "Y2"), ("X1", "X2"), (sums * k, 1), (sums * k, 1), lambda x, z: (x, 0)),
    )


def shipped_spec() -> FactorSpec:
    """The same example as read from the packaged distribution file."""
    from .distfile import loads

    text = resources.files("icregions").joinpath("data/example_pair.json").read_text(encoding="utf-8")
    return loads(text, "example_pair.json").spec


def _split(dist: JointDist, keep: tuple[str, ...]) -> JointDist:
    """Marginal on ``keep`` (which holds U1 and W1) plus columns K, U, W."""
    n, k = ALPHABET, SHARED
    return apply_map(dist.marginal(keep), [
        Factor.from_function("K", ("U1",), (n * k,), (k,), lambda a: a % k),
        Factor.from_function("U", ("U1",), (n * k,), (n,), lambda a: a // k),
        Factor.from_function("W", ("W1",), (n * k,), (n,), lambda b: b // k),
    ])


@dataclass(frozen=True)
class ExampleValues:
    h_shared: float
    h_u_dep: float
    h_w_dep: float
    h_pair_dep: float
    h_pair_base: float
    mi_pair_dep: float
    mi_base_sum: float
    mi_dep_output: float
    mi_base_output: float

    @property
    def lemma_strict(self) -> bool:
        return self.mi_dep_output > self.mi_base_output + 1e-9

    def lines(self) -> list[str]:
        return [
            f"H(K) = {self.h_shared:.12g}",
            f"H(U_d) = {self.h_u_dep:.12g}",
            f"H(W_d) = {self.h_w_dep:.12g}",
            f"H(U_d,W_d) = {self.h_pair_dep:.12g}",
            f"H(U,W) = {self.h_pair_base:.12g}",
            f"I(U_d;W_d) = {self.mi_pair_dep:.12g}",
            f"I(U,W;U+W) = {self.mi_base_sum:.12g}",
            f"I(U_d,W_d;Y) = {self.mi_dep_output:.12g}",
            f"I(U,W;Y) = {self.mi_base_output:.12g}",
            f"dependent pair strictly better: {self.lemma_strict}",
        ]


def example_values(spec: FactorSpec | None = None) -> ExampleValues:
    joint = build_joint(spec or example_spec())
    pair = _split(joint, ("U1", "W1"))
    out = _split(joint, ("U1", "W1", "Y1")).marginal(("U", "W", "Y1"))
    base = apply_map(pair.marginal(("U", "W")), Factor.from_function(
        "S", ("U", "W"), (ALPHABET, ALPHABET), (2 * ALPHABET - 1,), lambda a, b: a + b
    ))
    return ExampleValues(
        h_shared=entropy(pair, "K"),
        h_u_dep=entropy(joint, "U1"),
        h_w_dep=entropy(joint, "W1"),
        h_pair_dep=entropy(joint, ("U1", "W1")),
        h_pair_base=entropy(pair, ("U", "W")),
        mi_pair_dep=mutual_info(joint, "U1", "W1"),
        mi_base_sum=mutual_info(base, ("U", "W"), "S"),
        mi_dep_output=mutual_info(joint, ("U1", "W1"), "Y1"),
        mi_base_output=mutual_info(out, ("U", "W"), "Y1"),
    )
