"""Small hand-built distributions shared by several test modules."""

from fractions import Fraction

from icregions.probspace import CommonPart, Factor, FactorSpec, Family


def no_interference_hk(card: int = 2) -> FactorSpec:
    """Uniform U_i, W_i over ``card`` symbols, X_i = (U_i, W_i), Y_i = X_i."""
    half = [Fraction(1, card)] * card
    factors = [Factor(("Q",), (), [1])]
    encoders = []
    for i in (1, 2):
        factors.append(Factor((f"U{i}",), ("Q",), [half]))
        factors.append(Factor((f"W{i}",), ("Q",), [half]))
        encoders.append(Factor.from_function(
            f"X{i}", ("Q", f"U{i}", f"W{i}"), (1, card, card), (card * card,), lambda q, u, w: u * card + w
        ))
    sq = card * card
    channel = Factor.from_function(("Y1", "Y2"), ("X1", "X2"), (sq, sq), (sq, sq), lambda a, b: (a, b))
    return FactorSpec(Family.HK, tuple(factors), tuple(encoders), channel)


def blind_channel(spec: FactorSpec) -> FactorSpec:
    """Same inputs, outputs pinned to symbol 0 regardless of the inputs."""
    ch = spec.channel
    cx = ch.parent_cards
    cy = ch.child_cards
    out = Factor.from_function(ch.child, ch.parents, cx, cy, lambda *_: (0,) * len(cy))
    return FactorSpec(spec.family, spec.factors, spec.encoders, out, spec.variables)


def binary_common(i: int = 1) -> CommonPart:
    return CommonPart.uniform(f"U{i}", f"W{i}", 2, f"K{i}")
