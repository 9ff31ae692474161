"""Monte-Carlo random-binning codes with strong-typicality decoding at tiny n.

Each trial draws a time-sharing sequence, common-message codebooks, and a
pool of private-layer sequences per sender.  The pool is split into bins by
index (pool entry l belongs to bin l mod B), the encoder looks in the bin of
its private message for a sequence jointly typical with (q, w), maps (u, w)
through the deterministic encoder, and both receivers decode by exhaustive
joint-typicality search.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .bounds import check_conformance
from .polytope.system import IneqSystem
from .probspace import Factor, FactorSpec, Family, JointDist, build_joint, mutual_info

MAX_POOL = 1 << 16
MAX_CANDIDATES = 1 << 22
STREAMS = ("q", "w1", "w2", "pool1", "pool2", "msg", "chan")
RATE_NAMES = ("T1", "S1", "T2", "S2")


def codebook_size(n: int, rate: float) -> int:
    """floor(2^(n*rate)), never below one."""
    return max(1, int(math.floor(2.0 ** (n * rate) + 1e-9)))


@dataclass(frozen=True)
class TrialConfig:
    n: int
    rates: tuple[float, float, float, float]  # T1, S1, T2, S2
    pool_rates: tuple[float, float]
    eps: float = 0.1
    trials: int = 100
    seed: int = 0
    modified_error: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        object.__setattr__(self, "pool_rates", tuple(float(r) for r in self.pool_rates))
        if len(self.rates) != 4 or len(self.pool_rates) != 2:
            raise ValueError("rates are (T1, S1, T2, S2) and pool rates are (s1, s2)")
        if self.n < 1:
            raise ValueError("blocklength must be at least 1")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not self.eps > 0:
            raise ValueError("typicality eps must be positive")
        if min(self.rates + self.pool_rates) < 0:
            raise ValueError("rates must be nonnegative")
        for i, (s, S) in enumerate(zip(self.pool_rates, self.rates[1::2]), start=1):
            if s < S:
                raise ValueError(f"pool rate s{i}={s} is below the private rate S{i}={S}")

    @property
    def sizes(self) -> dict[str, int]:
        """Codebook, bin and pool sizes at this blocklength."""
        t1, s1, t2, s2 = self.rates
        out = {
            "M1": codebook_size(self.n, t1),
            "B1": codebook_size(self.n, s1),
            "M2": codebook_size(self.n, t2),
            "B2": codebook_size(self.n, s2),
            "P1": codebook_size(self.n, self.pool_rates[0]),
            "P2": codebook_size(self.n, self.pool_rates[1]),
        }
        out["P1"] = max(out["P1"], out["B1"])
        out["P2"] = max(out["P2"], out["B2"])
        return out

    def scaled(self, factor: float) -> "TrialConfig":
        """Same config with every rate (and the pool slack) multiplied by ``factor``."""
        rates = tuple(r * factor for r in self.rates)
        slack = (self.pool_rates[0] - self.rates[1], self.pool_rates[1] - self.rates[3])
        pools = (rates[1] + slack[0], rates[3] + slack[1])
        return TrialConfig(self.n, rates, pools, self.eps, self.trials, self.seed, self.modified_error)


@dataclass(frozen=True)
class ReceiverStats:
    errors: int
    trials: int
    ci_low: float
    ci_high: float

    @property
    def rate(self) -> float:
        return self.errors / self.trials


@dataclass(frozen=True)
class SimResult:
    config: TrialConfig
    receivers: tuple[ReceiverStats, ReceiverStats]
    encoder_failures: tuple[int, int]
    outcomes: tuple[tuple[bool, bool], ...] = field(repr=False)

    @property
    def encoder_failure_rate(self) -> tuple[float, float]:
        return tuple(f / self.config.trials for f in self.encoder_failures)

    def csv_row(self) -> dict[str, str]:
        c = self.config
        row = {"n": str(c.n)}
        row.update({k: f"{v:.12g}" for k, v in zip(RATE_NAMES, c.rates)})
        row.update({"s1": f"{c.pool_rates[0]:.12g}", "s2": f"{c.pool_rates[1]:.12g}"})
        row.update({"eps": f"{c.eps:.12g}", "trials": str(c.trials), "seed": str(c.seed)})
        for i, r in enumerate(self.receivers, start=1):
            row[f"err{i}"] = f"{r.rate:.12g}"
            row[f"err{i}_low"] = f"{r.ci_low:.12g}"
            row[f"err{i}_high"] = f"{r.ci_high:.12g}"
        for i, f in enumerate(self.encoder_failure_rate, start=1):
            row[f"enc_fail{i}"] = f"{f:.12g}"
        return row


def results_csv(results: Sequence[SimResult], header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    rows = [r.csv_row() for r in results]
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    from statsmodels.stats.proportion import proportion_confint

    lo, hi = proportion_confint(errors, trials, alpha=0.05, method="wilson")
    return float(lo), float(hi)


# -- typicality ----------------------------------------------------------------

def _typical_counts(counts: np.ndarray, n: int, p: np.ndarray, eps: float) -> np.ndarray:
    """Row-wise strong typicality of a (candidates, cells) count matrix."""
    dev = np.abs(counts / n - p[None, :])
    ok = (dev <= eps + 1e-12).all(axis=1)
    zero = p == 0
    if zero.any():
        ok &= (counts[:, zero] == 0).all(axis=1)
    return ok


def typical_set_test(dist: JointDist | np.ndarray, sequences: Sequence[Sequence[int]], eps: float) -> bool:
    """Strong typicality: every cell's empirical frequency is within eps of its
    mass and zero-mass cells never occur.

    ``sequences`` holds one integer sequence per variable of ``dist``, in order.
    """
    p = dist.probs if isinstance(dist, JointDist) else np.asarray(dist, dtype=float)
    if len(sequences) != p.ndim:
        raise ValueError(f"need {p.ndim} sequences, got {len(sequences)}")
    seqs = [np.asarray(s, dtype=np.int64) for s in sequences]
    lengths = {len(s) for s in seqs}
    if len(lengths) != 1:
        raise ValueError(f"sequence length mismatch: {sorted(lengths)}")
    n = lengths.pop()
    if n == 0:
        raise ValueError("empty sequences")
    for s, k in zip(seqs, p.shape):
        if s.min() < 0 or s.max() >= k:
            raise ValueError("sequence symbol outside the alphabet")
    idx = np.ravel_multi_index(tuple(seqs), p.shape)
    counts = np.bincount(idx, minlength=p.size)[None, :]
    return bool(_typical_counts(counts, n, p.ravel(), eps)[0])


# -- model ---------------------------------------------------------------------

def _to_axes(table: np.ndarray, own: Sequence[str], order: Sequence[str], cards: dict[str, int]) -> np.ndarray:
    """Broadcast an array over axes ``own`` to the full axis list ``order``."""
    perm = [own.index(n) for n in order if n in own]
    arr = np.transpose(table, perm) if perm else table
    shape = [cards[n] if n in own else 1 for n in order]
    return np.broadcast_to(arr.reshape(shape), tuple(cards[n] for n in order))


class _Model:
    """Float tables a trial needs, with Q always present (size 1 if absent)."""

    def __init__(self, spec: FactorSpec):
        if spec.family not in (Family.HK, Family.HOD):
            raise ValueError(f"simulation needs an HK or HOD distribution, got {spec.family.value}")
        joint = build_joint(spec)
        check_conformance(Family.HOD, joint)
        self.joint = joint
        cards = dict(zip(joint.names, joint.shape))
        cards.setdefault("Q", 1)
        self.cards = cards
        p = joint.probs
        if "Q" not in joint.names:
            p = p[None, ...]
        names = ["Q"] + [x for x in joint.names if x != "Q"]
        self.names = names

        def marg(keep):
            drop = tuple(i for i, n in enumerate(names) if n not in keep)
            m = p.sum(axis=drop)
            perm = [[n for n in names if n in keep].index(k) for k in keep]
            return np.transpose(m, perm)

        self.p_q = marg(["Q"])
        self.p_w = [_cond(marg(["Q", f"W{i}"])) for i in (1, 2)]
        self.p_u = [_cond(marg(["Q", f"U{i}"])) for i in (1, 2)]
        self.enc_ref = [marg(["Q", f"W{i}", f"U{i}"]) for i in (1, 2)]
        self.dec_ref = [
            marg(["Q", "W1", "U1", "W2", "Y1"]),
            marg(["Q", "W2", "U2", "W1", "Y2"]),
        ]
        order = ("Q", "U{i}", "W{i}")
        self.f = []
        for i in (1, 2):
            enc = next(e for e in spec.encoders if e.child == (f"X{i}",))
            own = list(enc.parents)
            ax = [a.format(i=i) for a in order]
            look = enc.lookup().reshape(enc.parent_cards) if own else np.asarray(enc.lookup()).reshape(())
            self.f.append(np.ascontiguousarray(_to_axes(look, own, ax, cards)))
        ch = spec.channel
        own = list(ch.parents) + list(ch.child)
        full = _to_axes(ch.float_table(), own, ["X1", "X2", "Y1", "Y2"], cards)
        cx1, cx2, cy1, cy2 = (cards[n] for n in ("X1", "X2", "Y1", "Y2"))
        self.chan_cdf = np.cumsum(full.reshape(cx1, cx2, cy1 * cy2), axis=-1)
        self.cy2 = cy2

    def binning_cost(self, i: int) -> float:
        names = ["Q"] if "Q" in self.joint.names else []
        return mutual_info(self.joint, f"U{i}", f"W{i}", names)


def _cond(m: np.ndarray) -> np.ndarray:
    tot = m.sum(axis=-1, keepdims=True)
    return np.divide(m, tot, out=np.zeros_like(m), where=tot > 0)


def _draw(rng: np.random.Generator, cond: np.ndarray, q_seq: np.ndarray, count: int) -> np.ndarray:
    """``count`` sequences with symbol t drawn from cond[q_t]; prefix-consistent in count."""
    n = len(q_seq)
    cdf = np.cumsum(cond, axis=-1)[q_seq]  # (n, card)
    u = rng.random((count, n))
    out = (u[:, :, None] >= cdf[None, :, :]).sum(axis=-1)
    return np.minimum(out, cond.shape[-1] - 1)


# -- one trial -----------------------------------------------------------------

def _streams(seed: int, trial: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence([seed, trial]).spawn(len(STREAMS))
    return {name: np.random.default_rng(s) for name, s in zip(STREAMS, children)}


def _encode_search(model: _Model, i: int, q, w_seq, pool, bins: int, b: int, eps: float) -> tuple[int, bool]:
    cand = np.arange(b, len(pool), bins)
    ref = model.enc_ref[i]
    cq, cw, cu = ref.shape
    base = (q * cw + w_seq) * cu
    idx = base[None, :] + pool[cand]
    p = ref.ravel()
    alive = (p[idx] > 0).all(axis=1)
    for pos in np.flatnonzero(alive):
        counts = np.bincount(idx[pos], minlength=p.size)[None, :]
        if _typical_counts(counts, len(q), p, eps)[0]:
            return int(cand[pos]), False
    return int(cand[0]), True


def _channel(model: _Model, rng, x1, x2) -> tuple[np.ndarray, np.ndarray]:
    cdf = model.chan_cdf[x1, x2]  # (n, cells)
    u = rng.random(len(x1))
    cell = np.minimum((u[:, None] >= cdf).sum(axis=-1), cdf.shape[-1] - 1)
    return cell // model.cy2, cell % model.cy2


def _run_codebooks(model: _Model, cfg: TrialConfig, trial: int, pool_sizes) -> _Trial:
    s = _streams(cfg.seed, trial)
    sz = cfg.sizes
    n = cfg.n
    q = np.minimum((s["q"].random(n)[:, None] >= np.cumsum(model.p_q)[None, :]).sum(-1), len(model.p_q) - 1)
    w = [_draw(s["w1"], model.p_w[0], q, sz["M1"]), _draw(s["w2"], model.p_w[1], q, sz["M2"])]
    pool = [_draw(s["pool1"], model.p_u[0], q, pool_sizes[0]), _draw(s["pool2"], model.p_u[1], q, pool_sizes[1])]
    msg = tuple(int(s["msg"].integers(0, k)) for k in (sz["M1"], sz["B1"], sz["M2"], sz["B2"]))
    return q, w, pool, msg, s["chan"]


def _survivors(ref: np.ndarray, axis: int, q, book, y) -> np.ndarray:
    """Indices of codewords never landing on a zero-mass (q, codeword, y) cell."""
    keep = [0, axis, ref.ndim - 1]
    drop = tuple(k for k in range(ref.ndim) if k not in keep)
    pair = ref.sum(axis=drop) > 0  # (q, codeword symbol, y)
    return np.flatnonzero(pair[q[None, :], book, y[None, :]].all(axis=1))


def _decode(model: _Model, i: int, q, w_own, pool, w_other, y, bins: int, eps: float, modified: bool) -> set:
    """All typical (j, bin, m) at receiver i (or (j, bin) under the modified error)."""
    ref = model.dec_ref[i]
    _, cw, cu, cv, cy = ref.shape
    p = ref.ravel()
    nz = p > 0
    # pairwise zero-mass filtering first; a joint cell has zero mass whenever
    # one of its pairwise marginals does
    js = _survivors(ref, 1, q, w_own, y)
    ls = _survivors(ref, 2, q, pool, y)
    ms = _survivors(ref, 3, q, w_other, y)
    out = set()
    if not (len(js) and len(ls) and len(ms)):
        return out
    a = (q[None, :] * cw + w_own[js]) * cu  # (J, n)
    bstride = cv * cy
    tail = w_other[ms] * cy + y[None, :]  # (V, n)
    u = pool[ls]
    chunk = max(1, MAX_CANDIDATES // max(1, len(ls) * len(ms) * len(q)))
    for j0 in range(0, len(js), chunk):
        sl = slice(j0, j0 + chunk)
        idx = ((a[sl][:, None, None, :] + u[None, :, None, :]) * bstride) + tail[None, None, :, :]
        alive = nz[idx].all(axis=-1)
        for jj, ll, mm in zip(*np.nonzero(alive)):
            counts = np.bincount(idx[jj, ll, mm], minlength=p.size)[None, :]
            if _typical_counts(counts, len(q), p, eps)[0]:
                j, l, m = int(js[j0 + jj]), int(ls[ll]), int(ms[mm])
                out.add((j, l % bins) if modified else (j, l % bins, m))
    return out


def _trial(model: _Model, cfg: TrialConfig, trial: int) -> tuple[bool, bool, bool, bool]:
    sz = cfg.sizes
    q, w, pool, msg, chan_rng = _run_codebooks(model, cfg, trial, (sz["P1"], sz["P2"]))
    j, b1, m, b2 = msg
    l1, flag1 = _encode_search(model, 0, q, w[0][j], pool[0], sz["B1"], b1, cfg.eps)
    l2, flag2 = _encode_search(model, 1, q, w[1][m], pool[1], sz["B2"], b2, cfg.eps)
    x1 = model.f[0][q, pool[0][l1], w[0][j]]
    x2 = model.f[1][q, pool[1][l2], w[1][m]]
    y1, y2 = _channel(model, chan_rng, x1, x2)
    errs = []
    for i, (own, bins, truth, other, y) in enumerate((
        (w[0], sz["B1"], (j, b1, m), w[1], y1),
        (w[1], sz["B2"], (m, b2, j), w[0], y2),
    )):
        if len(own) * bins * len(other) == 1:
            errs.append(False)
            continue
        found = _decode(model, i, q, own, pool[i], other, y, bins, cfg.eps, cfg.modified_error)
        want = truth[:2] if cfg.modified_error else truth
        errs.append(found != {want})
    return errs[0], errs[1], flag1, flag2


def _check_config(model: _Model, cfg: TrialConfig):
    for i in (1, 2):
        cost = model.binning_cost(i)
        slack = cfg.pool_rates[i - 1] - cfg.rates[2 * i - 1]
        if slack < cost - 1e-9:
            raise ValueError(
                f"infeasible config: pool slack s{i} - S{i} = {slack:.6g} is below I(U{i};W{i}|Q) = {cost:.6g}"
            )
    sz = cfg.sizes
    if max(sz["P1"], sz["P2"], sz["M1"], sz["M2"]) > MAX_POOL:
        raise ValueError(f"codebooks too large for desk-scale simulation: {sz}")


def _aggregate(cfg: TrialConfig, outcomes) -> SimResult:
    stats = []
    for i in (0, 1):
        e = sum(o[i] for o in outcomes)
        stats.append(ReceiverStats(e, cfg.trials, *wilson_interval(e, cfg.trials)))
    fails = (sum(o[2] for o in outcomes), sum(o[3] for o in outcomes))
    return SimResult(cfg, tuple(stats), fails, tuple((o[0], o[1]) for o in outcomes))


def simulate(spec: FactorSpec, cfg: TrialConfig) -> SimResult:
    """Error frequencies (with Wilson 95% intervals) of the binning scheme."""
    model = _Model(spec)
    _check_config(model, cfg)
    return _aggregate(cfg, [_trial(model, cfg, t) for t in range(cfg.trials)])


def encoder_success(spec: FactorSpec, cfg: TrialConfig) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial encoder success flags for both senders (no decoding)."""
    model = _Model(spec)
    _check_config(model, cfg)
    sz = cfg.sizes
    ok = np.zeros((2, cfg.trials), dtype=bool)
    for t in range(cfg.trials):
        q, w, pool, (j, b1, m, b2), _ = _run_codebooks(model, cfg, t, (sz["P1"], sz["P2"]))
        ok[0, t] = not _encode_search(model, 0, q, w[0][j], pool[0], sz["B1"], b1, cfg.eps)[1]
        ok[1, t] = not _encode_search(model, 1, q, w[1][m], pool[1], sz["B2"], b2, cfg.eps)[1]
    return ok[0], ok[1]


# -- direct construction (no binning) --------------------------------------------

def _typical_loop(p: np.ndarray, columns: Sequence[np.ndarray], eps: float) -> bool:
    n = len(columns[0])
    counts: dict[tuple, int] = {}
    for t in range(n):
        cell = tuple(int(c[t]) for c in columns)
        if p[cell] == 0:
            return False
        counts[cell] = counts.get(cell, 0) + 1
    for cell in itertools.product(*[range(k) for k in p.shape]):
        if abs(counts.get(cell, 0) / n - p[cell]) > eps + 1e-12:
            return False
    return True


def simulate_direct(spec: FactorSpec, cfg: TrialConfig) -> SimResult:
    """Independent private codewords, one per private message, decoded by a
    plain loop.  Uses the same per-trial streams as :func:`simulate`; with
    independent U, W and pool rate equal to the private rate the two agree
    trial by trial.
    """
    model = _Model(spec)
    if cfg.pool_rates != (cfg.rates[1], cfg.rates[3]):
        raise ValueError("direct construction has no pool: set pool rates equal to the private rates")
    _check_config(model, cfg)
    sz = cfg.sizes
    outcomes = []
    for t in range(cfg.trials):
        q, w, cw, (j, b1, m, b2), chan_rng = _run_codebooks(model, cfg, t, (sz["B1"], sz["B2"]))
        flags = [
            not _typical_loop(model.enc_ref[0], (q, w[0][j], cw[0][b1]), cfg.eps),
            not _typical_loop(model.enc_ref[1], (q, w[1][m], cw[1][b2]), cfg.eps),
        ]
        x1 = model.f[0][q, cw[0][b1], w[0][j]]
        x2 = model.f[1][q, cw[1][b2], w[1][m]]
        y1, y2 = _channel(model, chan_rng, x1, x2)
        errs = []
        for i, (own, other, truth, y) in enumerate(((w[0], w[1], (j, b1, m), y1), (w[1], w[0], (m, b2, j), y2))):
            if len(own) * len(cw[i]) * len(other) == 1:
                errs.append(False)
                continue
            found = set()
            for a, b, c in itertools.product(range(len(own)), range(len(cw[i])), range(len(other))):
                if _typical_loop(model.dec_ref[i], (q, own[a], cw[i][b], other[c], y), cfg.eps):
                    found.add((a, b) if cfg.modified_error else (a, b, c))
            want = truth[:2] if cfg.modified_error else truth
            errs.append(found != {want})
        outcomes.append((errs[0], errs[1], flags[0], flags[1]))
    return _aggregate(cfg, outcomes)


# -- helpers for building instances ------------------------------------------------

def boundary_scale(system: IneqSystem, direction: Mapping[str, float]) -> float:
    """Largest t with t*direction inside a numeric region; unnamed variables are 0."""
    if system.symbolic:
        raise ValueError("boundary_scale needs a numeric system")
    unknown = set(direction) - set(system.variables)
    if unknown:
        raise ValueError(f"unknown variables in direction: {sorted(unknown)}")
    best = math.inf
    for r in system.rows:
        slope = sum(float(c) * float(direction.get(v, 0.0)) for v, c in r.coeffs)
        if slope > 1e-15:
            best = min(best, r.rhs / slope)
        elif r.rhs < -1e-12:
            return 0.0
    if math.isinf(best):
        raise ValueError("direction is unbounded in this region")
    return max(best, 0.0)


def config_at(
    system: IneqSystem,
    direction: Mapping[str, float],
    fraction: float,
    slack: tuple[float, float],
    **kwargs,
) -> TrialConfig:
    """Config whose rates sit at ``fraction`` of the region boundary along
    ``direction``; pool rate = private rate + ``slack``.
    """
    t = boundary_scale(system, direction) * fraction
    rates = tuple(t * float(direction.get(v, 0.0)) for v in RATE_NAMES)
    pools = (rates[1] + slack[0], rates[3] + slack[1])
    return TrialConfig(rates=rates, pool_rates=pools, **kwargs)


def identity_channel_spec(pairs: Sequence[Sequence[Sequence[int]]] = (((4, 1), (1, 4)), ((1,),))) -> FactorSpec:
    """No-interference instance with Y_i = X_i = (U_i, W_i).

    ``pairs[i]`` holds integer weights of p(u, w) for sender i+1 (rows u,
    columns w); correlated weights make the sender pay for binning.  The
    default leaves sender 2 silent.
    """
    factors = [Factor(("Q",), (), [1])]
    encoders = []
    cx = []
    for i, weights in enumerate(pairs, start=1):
        w = np.array([[Fraction(int(v)) for v in row] for row in weights], dtype=object)
        w = w / w.sum()
        factors.append(Factor((f"U{i}", f"W{i}"), ("Q",), w.reshape((1,) + w.shape)))
        cu, cw = w.shape
        cx.append(cu * cw)
        encoders.append(Factor.from_function(
            f"X{i}", ("Q", f"U{i}", f"W{i}"), (1, cu, cw), (cu * cw,), lambda q, u, v, cw=cw: u * cw + v
        ))
    channel = Factor.from_function(("Y1", "Y2"), ("X1", "X2"), tuple(cx), tuple(cx), lambda x1, x2: (x1, x2))
    return FactorSpec(Family.HOD, tuple(factors), tuple(encoders), channel)
