"""Shallow-network yield curve with a composite smoothness/trend loss.

The curve is a single hidden layer of tanh units mapping maturity to spot
yield, ``y(t) = sum_i v_i * tanh(w_i * t + b_i) + c``. Training runs per-bond
stochastic gradient steps on

    loss_j = (p_j - p_hat_j)^2 + gamma1 * L_smooth + gamma2 * L_trend

where L_smooth is the largest absolute slope of the fitted curve over a fixed
tenor grid and L_trend the mean absolute slope gap to the benchmark curve over
the same grid. Gradients are hand-written backpropagation through the bond
present value, the discount map exp(-t*y), and the network; the max in
L_smooth uses the standard subgradient (only the argmax pair contributes, ties
to the lower index). Everything is deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, ValidationError
from .evaluation import DEFAULT_TENORS
from .market import BenchmarkCurve, MarketSnapshot, sort_bonds
from .pricing import YieldCurve, cashflow_schedule, yield_to_maturity

_REGULARIZER_MODES = ("per_bond", "per_epoch")


@dataclass(frozen=True)
class NnParams:
    """Network weights: input weights w, hidden biases b, output weights v, bias c."""

    w: tuple[float, ...]
    b: tuple[float, ...]
    v: tuple[float, ...]
    c: float

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(float(x) for x in self.w))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))
        if len(self.w) < 1 or not (len(self.w) == len(self.b) == len(self.v)):
            raise ValidationError("w, b, v must share a length >= 1")
        if not all(np.isfinite(list(self.w) + list(self.b) + list(self.v) + [self.c])):
            raise ValidationError("network parameters must all be finite")

    @property
    def hidden_count(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class TrainConfig:
    """Training protocol knobs; defaults follow the tuned reference setup."""

    learning_rate: float = 1e-8
    epochs: int = 1000
    gamma1: float = 1e3
    gamma2: float = 1e4
    grid: tuple[float, ...] = DEFAULT_TENORS
    seed: int = 0
    init_scale: float = 0.1
    hidden_count: int = 3
    regularizer: str = "per_bond"

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(t) for t in self.grid))
        if not (self.learning_rate > 0):
            raise ValidationError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValidationError("gamma1 and gamma2 must be >= 0")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValidationError("grid must be strictly increasing")
        if self.hidden_count < 1:
            raise ValidationError("hidden_count must be >= 1")
        if self.regularizer not in _REGULARIZER_MODES:
            raise ValidationError(f"regularizer must be one of {_REGULARIZER_MODES}")


def _tenors(grid) -> np.ndarray:
    return np.asarray(getattr(grid, "tenors", grid), dtype=float)


def _forward(w, b, v, ts):
    """tanh features and partials at times ts; returns (yhat_without_c, th, sech2)."""
    pre = w[:, None] * ts[None, :] + b[:, None]
    th = np.tanh(pre)
    return v @ th, th, 1.0 - th * th


def nn_yield(params: NnParams, t):
    """Network output at maturity ``t`` (scalar or array)."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    w, b, v = np.array(params.w), np.array(params.b), np.array(params.v)
    out = v @ np.tanh(w[:, None] * arr[None, :] + b[:, None]) + params.c
    return float(out[0]) if np.isscalar(t) or np.asarray(t).ndim == 0 else out


@dataclass(frozen=True)
class NnCurve(YieldCurve):
    """Adapter exposing NnParams as an evaluable spot curve."""

    params: NnParams

    def yield_at(self, t: float) -> float:
        return float(nn_yield(self.params, t))


# ---------------------------------------------------------------------------
# Loss components and their gradients
# ---------------------------------------------------------------------------

def _bond_arrays(snapshot: MarketSnapshot):
    bonds = sort_bonds(snapshot.bonds)
    return [(b.id,) + cashflow_schedule(b) + (b.market_price,) for b in bonds]


def _price_and_grad(w, b, v, c, times, amounts):
    """Present value under the network curve and its parameter gradient."""
    vh, th, sech2 = _forward(w, b, v, times)
    y = vh + c
    disc = amounts * np.exp(-times * y)
    price = float(disc.sum())
    coef = -times * disc                      # d price / d y(t_k)
    gw = (v[:, None] * sech2 * times[None, :]) @ coef
    gb = (v[:, None] * sech2) @ coef
    gv = th @ coef
    gc = float(coef.sum())
    return price, (gw, gb, gv, gc)


def _grid_state(w, b, v, c, tenors):
    """Curve slopes over the grid and slope gradients per parameter."""
    vh, th, sech2 = _forward(w, b, v, tenors)
    y = vh + c
    dt = np.diff(tenors)
    slopes = np.diff(y) / dt
    dy_dw = v[:, None] * sech2 * tenors[None, :]
    dy_db = v[:, None] * sech2
    dy_dv = th
    dsl_w = np.diff(dy_dw, axis=1) / dt
    dsl_b = np.diff(dy_db, axis=1) / dt
    dsl_v = np.diff(dy_dv, axis=1) / dt
    return slopes, dsl_w, dsl_b, dsl_v


def _smooth_from_state(slopes, dsl_w, dsl_b, dsl_v):
    i = int(np.argmax(np.abs(slopes)))       # first max wins on ties
    s = float(np.sign(slopes[i]))
    value = float(abs(slopes[i]))
    return value, (s * dsl_w[:, i], s * dsl_b[:, i], s * dsl_v[:, i], 0.0)


def _trend_from_state(slopes, bench_slopes, n_grid, dsl_w, dsl_b, dsl_v):
    e = slopes - bench_slopes
    value = float(np.sum(np.abs(e)) / n_grid)
    sg = np.sign(e) / n_grid
    return value, (dsl_w @ sg, dsl_b @ sg, dsl_v @ sg, 0.0)


def _benchmark_slopes(benchmark: BenchmarkCurve, tenors: np.ndarray) -> np.ndarray:
    rates = np.array([benchmark.yield_at(float(t)) for t in tenors])
    return np.diff(rates) / np.diff(tenors)


def loss_error(params: NnParams, snapshot: MarketSnapshot) -> float:
    """Mean squared price error of the network curve over the snapshot."""
    return grad_loss_error(params, snapshot)[0]


def grad_loss_error(params: NnParams, snapshot: MarketSnapshot):
    w, b, v, c = np.array(params.w), np.array(params.b), np.array(params.v), params.c
    m = len(snapshot.bonds)
    total = 0.0
    gw = np.zeros_like(w); gb = np.zeros_like(w); gv = np.zeros_like(w); gc = 0.0
    for _bid, times, amounts, price in _bond_arrays(snapshot):
        phat, (pw, pb, pv, pc) = _price_and_grad(w, b, v, c, times, amounts)
        err = phat - price
        total += err**2
        gw += 2.0 * err * pw
        gb += 2.0 * err * pb
        gv += 2.0 * err * pv
        gc += 2.0 * err * pc
    return total / m, (gw / m, gb / m, gv / m, gc / m)


def loss_smooth(params: NnParams, grid) -> float:
    """Largest absolute slope of the network curve between adjacent grid tenors."""
    return grad_loss_smooth(params, grid)[0]


def grad_loss_smooth(params: NnParams, grid):
    tenors = _tenors(grid)
    if len(tenors) < 2:
        raise ValidationError("grid needs at least 2 tenors")
    w, b, v, c = np.array(params.w), np.array(params.b), np.array(params.v), params.c
    state = _grid_state(w, b, v, c, tenors)
    return _smooth_from_state(*state)


def loss_trend(params: NnParams, benchmark: BenchmarkCurve, grid) -> float:
    """Mean absolute slope gap between the network curve and the benchmark."""
    return grad_loss_trend(params, benchmark, grid)[0]


def grad_loss_trend(params: NnParams, benchmark: BenchmarkCurve, grid):
    tenors = _tenors(grid)
    if len(tenors) < 2:
        raise ValidationError("grid needs at least 2 tenors")
    w, b, v, c = np.array(params.w), np.array(params.b), np.array(params.v), params.c
    slopes, dsl_w, dsl_b, dsl_v = _grid_state(w, b, v, c, tenors)
    return _trend_from_state(slopes, _benchmark_slopes(benchmark, tenors), len(tenors), dsl_w, dsl_b, dsl_v)


def total_loss(params: NnParams, snapshot: MarketSnapshot, config: TrainConfig) -> float:
    """Price error plus gamma-weighted smoothness and trend penalties."""
    return grad_total_loss(params, snapshot, config)[0]


def grad_total_loss(params: NnParams, snapshot: MarketSnapshot, config: TrainConfig):
    e, ge = grad_loss_error(params, snapshot)
    s, gs = grad_loss_smooth(params, config.grid)
    t, gt = grad_loss_trend(params, snapshot.benchmark, config.grid)
    value = e + config.gamma1 * s + config.gamma2 * t
    grads = tuple(
        np.asarray(a) + config.gamma1 * np.asarray(bb) + config.gamma2 * np.asarray(cc)
        for a, bb, cc in zip(ge, gs, gt)
    )
    return value, grads


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def train(snapshot: MarketSnapshot, config: TrainConfig | None = None) -> NnParams:
    """Fit the network to one day of bonds by per-bond gradient steps.

    Bonds are visited in ascending maturity order (ties by id); each visit
    takes one plain gradient step of size ``learning_rate`` on that bond's
    squared price error plus, in the default "per_bond" mode, the two
    gamma-weighted penalties. The "per_epoch" mode instead applies the
    penalties once after each full sweep. The output bias starts at the mean
    flat yield of the snapshot so the network learns shape, not level.
    Raises DivergenceError (with epoch and bond index) if a step loss turns
    non-finite.
    """
    config = config or TrainConfig()
    bonds = _bond_arrays(snapshot)
    tenors = _tenors(config.grid)
    bench_slopes = _benchmark_slopes(snapshot.benchmark, tenors)
    n_grid = len(tenors)
    per_bond_reg = config.regularizer == "per_bond"
    use_reg = config.gamma1 > 0 or config.gamma2 > 0

    maturities = [b.maturity for b in snapshot.bonds]
    span = max(max(maturities) - min(maturities), 1.0)
    rng = np.random.default_rng(config.seed)
    h = config.hidden_count
    w = rng.normal(0.0, config.init_scale / span, h)
    b = rng.normal(0.0, config.init_scale, h)
    v = rng.normal(0.0, config.init_scale, h)
    c = float(np.mean([yield_to_maturity(bond) for bond in snapshot.bonds]))

    lr = config.learning_rate
    for epoch in range(config.epochs):
        for j, (bond_id, times, amounts, price) in enumerate(bonds):
            phat, (pw, pb, pv, pc) = _price_and_grad(w, b, v, c, times, amounts)
            err = phat - price
            step_loss = err**2
            gw = 2.0 * err * pw
            gb = 2.0 * err * pb
            gv = 2.0 * err * pv
            gc = 2.0 * err * pc
            if use_reg and per_bond_reg:
                state = _grid_state(w, b, v, c, tenors)
                if config.gamma1 > 0:
                    s_val, (sw, sb, sv, _) = _smooth_from_state(*state)
                    step_loss += config.gamma1 * s_val
                    gw += config.gamma1 * sw
                    gb += config.gamma1 * sb
                    gv += config.gamma1 * sv
                if config.gamma2 > 0:
                    t_val, (tw, tb, tv, _) = _trend_from_state(state[0], bench_slopes, n_grid, *state[1:])
                    step_loss += config.gamma2 * t_val
                    gw += config.gamma2 * tw
                    gb += config.gamma2 * tb
                    gv += config.gamma2 * tv
            if not np.isfinite(step_loss):
                raise DivergenceError(
                    f"training diverged: non-finite loss at epoch {epoch}, bond {bond_id}",
                    epoch=epoch, bond_index=j,
                )
            w = w - lr * gw
            b = b - lr * gb
            v = v - lr * gv
            c = c - lr * gc
        if use_reg and not per_bond_reg:
            state = _grid_state(w, b, v, c, tenors)
            s_val, (sw, sb, sv, _) = _smooth_from_state(*state)
            t_val, (tw, tb, tv, _) = _trend_from_state(state[0], bench_slopes, n_grid, *state[1:])
            reg_loss = config.gamma1 * s_val + config.gamma2 * t_val
            if not np.isfinite(reg_loss):
                raise DivergenceError(
                    f"training diverged: non-finite penalty after epoch {epoch}",
                    epoch=epoch, bond_index=len(bonds) - 1,
                )
            w = w - lr * (config.gamma1 * sw + config.gamma2 * tw)
            b = b - lr * (config.gamma1 * sb + config.gamma2 * tb)
            v = v - lr * (config.gamma1 * sv + config.gamma2 * tv)

    params = NnParams(w=tuple(w), b=tuple(b), v=tuple(v), c=float(c))
    final = total_loss(params, snapshot, config)
    if not np.isfinite(final):
        raise DivergenceError(
            f"training diverged: non-finite total loss after epoch {config.epochs - 1}",
            epoch=config.epochs - 1, bond_index=len(bonds) - 1,
        )
    return params


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def nn_to_dict(params: NnParams, config: TrainConfig | None = None) -> dict:
    """JSON-ready dict {H, w, b, v, c, config_echo}; floats keep full precision."""
    echo = None
    if config is not None:
        echo = {
            "learning_rate": config.learning_rate,
            "epochs": config.epochs,
            "gamma1": config.gamma1,
            "gamma2": config.gamma2,
            "grid": list(config.grid),
            "seed": config.seed,
            "init_scale": config.init_scale,
            "hidden_count": config.hidden_count,
            "regularizer": config.regularizer,
        }
    return {
        "H": params.hidden_count,
        "w": list(params.w),
        "b": list(params.b),
        "v": list(params.v),
        "c": params.c,
        "config_echo": echo,
    }


def nn_from_dict(data: dict) -> NnParams:
    params = NnParams(w=tuple(data["w"]), b=tuple(data["b"]), v=tuple(data["v"]), c=float(data["c"]))
    if "H" in data and int(data["H"]) != params.hidden_count:
        raise ValidationError(f"H field ({data['H']}) disagrees with weight length ({params.hidden_count})")
    return params
