"""Discounting, bond pricing, yield solving, duration, and bootstrapping.

All rates are continuously compounded: the discount factor is
``d(t) = exp(-t * y(t))`` and a bond's present value is the sum of its
discounted coupons plus the discounted final coupon and face value.

The bootstrap builds an exact-fit curve knot by knot, shortest maturity
first, and serves as the baseline estimator and pricing oracle for the
model-based curves.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import NoSolutionError, ValidationError
from .market import Bond, MarketSnapshot, sort_bonds

# Flat-rate bracket for yield solves. Present value is strictly decreasing in
# the rate, so a sign change on this bracket guarantees a unique solution.
YTM_BRACKET = (-0.10, 1.00)
_PRICE_TOL_REL = 1e-10


class YieldCurve(ABC):
    """Evaluable spot curve: ``yield_at(t)`` for any t in (0, 30] at least."""

    @abstractmethod
    def yield_at(self, t: float) -> float:
        ...


@dataclass(frozen=True)
class FlatCurve(YieldCurve):
    """Constant spot yield at every maturity."""

    rate: float

    def yield_at(self, t: float) -> float:
        return self.rate


@dataclass(frozen=True)
class OffsetCurve(YieldCurve):
    """A base curve shifted by a constant spread. ``base`` needs ``yield_at``."""

    base: object
    spread: float

    def yield_at(self, t: float) -> float:
        return self.base.yield_at(t) + self.spread


@dataclass(frozen=True)
class BootstrapCurve(YieldCurve):
    """Piecewise-linear yield curve through bootstrapped knots.

    Interpolation is linear in yield, extrapolation flat beyond both ends.
    ``diagnostics`` lists bonds the bootstrap had to skip and why.
    """

    knot_times: tuple[float, ...]
    knot_yields: tuple[float, ...]
    diagnostics: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "knot_times", tuple(float(t) for t in self.knot_times))
        object.__setattr__(self, "knot_yields", tuple(float(y) for y in self.knot_yields))
        if len(self.knot_times) != len(self.knot_yields):
            raise ValidationError("knot_times and knot_yields must have equal length")
        if not self.knot_times:
            raise ValidationError("bootstrap curve needs at least one knot")
        if any(b <= a for a, b in zip(self.knot_times, self.knot_times[1:])):
            raise ValidationError("knot_times must be strictly increasing")

    def yield_at(self, t: float) -> float:
        return float(np.interp(t, self.knot_times, self.knot_yields))


def cashflow_schedule(bond: Bond) -> tuple[np.ndarray, np.ndarray]:
    """All payment times and amounts of ``bond``, face value included at maturity."""
    times = np.array([cf.time for cf in bond.cashflows] + [bond.maturity])
    amounts = np.array([cf.amount for cf in bond.cashflows] + [bond.face_value])
    return times, amounts


def cashflow_matrix(bonds, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Dense cashflow layout over the union of all payment dates.

    Returns ``(anchor_times, C)`` where anchor_times is the sorted union of
    every bond's payment dates (deduplicated within ``tol`` years) and
    ``C[j, l]`` is the total amount bond j pays at anchor l, face value
    included at maturity.
    """
    all_times = np.concatenate([cashflow_schedule(b)[0] for b in bonds])
    anchors: list[float] = []
    for t in np.sort(all_times):
        if not anchors or t - anchors[-1] > tol:
            anchors.append(float(t))
    anchor_times = np.array(anchors)
    C = np.zeros((len(bonds), len(anchor_times)))
    for j, bond in enumerate(bonds):
        times, amounts = cashflow_schedule(bond)
        idx = np.searchsorted(anchor_times, times - tol)
        np.add.at(C[j], idx, amounts)  # final coupon and face share the maturity slot
    return anchor_times, C


def discount_factor(curve: YieldCurve, t: float) -> float:
    """``exp(-t * y(t))`` under ``curve``; t must be positive."""
    if not (t > 0):
        raise ValueError(f"discount_factor requires t > 0, got {t}")
    return math.exp(-t * curve.yield_at(t))


def present_value(curve: YieldCurve, bond: Bond) -> float:
    """Sum of discounted coupons plus discounted final coupon and face value."""
    pv = 0.0
    for cf in bond.cashflows[:-1]:
        pv += cf.amount * discount_factor(curve, cf.time)
    final_coupon = bond.cashflows[-1].amount if bond.cashflows else 0.0
    pv += (final_coupon + bond.face_value) * discount_factor(curve, bond.maturity)
    return pv


def _pv_flat(times: np.ndarray, amounts: np.ndarray, rate: float) -> float:
    return float(np.sum(amounts * np.exp(-times * rate)))


def _solve_flat_rate(times: np.ndarray, amounts: np.ndarray, price: float, what: str) -> float:
    """Flat rate equating the discounted cashflows to ``price``.

    Bisection on the bracket, with a Newton polish once the residual is small.
    PV is strictly decreasing in the rate so the bracket test is exact.
    """
    lo, hi = YTM_BRACKET
    tol = _PRICE_TOL_REL * price
    f_lo = _pv_flat(times, amounts, lo) - price
    f_hi = _pv_flat(times, amounts, hi) - price
    if f_lo < -tol or f_hi > tol:
        raise NoSolutionError(
            f"{what}: price {price} outside attainable range "
            f"[{_pv_flat(times, amounts, hi):.6f}, {_pv_flat(times, amounts, lo):.6f}] "
            f"for rates in [{lo}, {hi}]"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = _pv_flat(times, amounts, mid) - price
        if abs(f_mid) <= tol:
            lo = hi = mid
            break
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    rate = 0.5 * (lo + hi)
    # Newton polish well past the contract tolerance; dPV/dr = -sum(t cf e^(-t r))
    best_rate, best_resid = rate, abs(_pv_flat(times, amounts, rate) - price)
    for _ in range(8):
        resid = _pv_flat(times, amounts, rate) - price
        if abs(resid) < best_resid:
            best_rate, best_resid = rate, abs(resid)
        if abs(resid) <= 1e-15 * price:
            break
        deriv = -float(np.sum(times * amounts * np.exp(-times * rate)))
        if deriv == 0:
            break
        rate -= resid / deriv
    return best_rate


def yield_to_maturity(bond: Bond) -> float:
    """Flat continuously-compounded rate that reprices ``bond`` to its market price."""
    times, amounts = cashflow_schedule(bond)
    return _solve_flat_rate(times, amounts, bond.market_price, f"bond {bond.id}")


def macaulay_duration(bond: Bond) -> float:
    """PV-weighted average payment time at the bond's own flat yield."""
    ytm = yield_to_maturity(bond)
    times, amounts = cashflow_schedule(bond)
    disc = amounts * np.exp(-times * ytm)
    return float(np.sum(times * disc) / np.sum(disc))


def duration_price_weights(bonds) -> np.ndarray:
    """Per-bond fitting weights ``1 / (M * (D_j * p_j)^2)``.

    Dividing squared price errors by (duration * price)^2 turns them into
    approximate squared yield errors, so short and long bonds contribute on
    comparable scales.
    """
    m = len(bonds)
    w = np.empty(m)
    for j, bond in enumerate(bonds):
        w[j] = 1.0 / (m * (macaulay_duration(bond) * bond.market_price) ** 2)
    return w


def forward_rate(curve: YieldCurve, t: float, h: float = 1e-4) -> float:
    """Instantaneous forward ``y(t) + t * dy/dt`` by central difference."""
    if not (t > h > 0):
        raise ValueError(f"forward_rate requires t > h > 0, got t={t}, h={h}")
    dy = (curve.yield_at(t + h) - curve.yield_at(t - h)) / (2.0 * h)
    return curve.yield_at(t) + t * dy


def bootstrap(snapshot: MarketSnapshot) -> BootstrapCurve:
    """Sequential exact-fit curve: one knot per bond, shortest maturity first.

    For each bond the single unknown is the yield at its maturity. Cashflows
    before the previous knots are discounted off the fixed earlier knots;
    cashflows between the last knot and the new maturity see the linear
    interpolation toward the candidate knot, so the solved bond reprices
    exactly under the final curve. Present value is strictly decreasing in the
    candidate yield, solved by bisection on the standard bracket.

    Bonds that cannot be repriced inside the bracket, and bonds sharing a
    maturity with an already-placed knot, are skipped and reported in the
    curve's diagnostics.
    """
    knot_times: list[float] = []
    knot_yields: list[float] = []
    diagnostics: list[str] = []

    for bond in sort_bonds(snapshot.bonds):
        if knot_times and abs(bond.maturity - knot_times[-1]) <= 1e-9:
            diagnostics.append(
                f"bond {bond.id}: maturity {bond.maturity} duplicates an existing knot; skipped"
            )
            continue
        times, amounts = cashflow_schedule(bond)

        def pv_with_candidate(y: float) -> float:
            ts = np.array(knot_times + [bond.maturity])
            ys = np.array(knot_yields + [y])
            rates = np.interp(times, ts, ys)
            return float(np.sum(amounts * np.exp(-times * rates)))

        lo, hi = YTM_BRACKET
        tol = _PRICE_TOL_REL * bond.market_price
        if pv_with_candidate(lo) - bond.market_price < -tol or pv_with_candidate(hi) - bond.market_price > tol:
            diagnostics.append(
                f"bond {bond.id}: no yield in [{lo}, {hi}] reprices {bond.market_price}; skipped"
            )
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f_mid = pv_with_candidate(mid) - bond.market_price
            if abs(f_mid) <= tol:
                lo = hi = mid
                break
            if f_mid > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-16:
                break
        knot_times.append(bond.maturity)
        knot_yields.append(0.5 * (lo + hi))

    if not knot_times:
        raise NoSolutionError("bootstrap failed for every bond: " + "; ".join(diagnostics))
    return BootstrapCurve(
        knot_times=tuple(knot_times),
        knot_yields=tuple(knot_yields),
        diagnostics=tuple(diagnostics),
    )
