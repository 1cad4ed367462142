#!/usr/bin/env python3
"""Builds the synthetic WTI-like daily close fixture used by the test suite.

Real WTI spot data is not redistributable, so the repo ships a synthetic
series calibrated to the same published summary statistics:

    mean/median/max/min daily change:   -0.0047 / 0.04399 / 7.62 / -8.90 USD
    mean/median/max/min daily change %:  0.01370 / 0.06521 / 12.32 / -10.53

and to fixed jump-cluster supports for the three split windows exercised by
the acceptance suite (start-index ranges [500,600], [2100,2200], [2300,2500]
with K = 2%):

    [500,600]   -> support(theta=0) = 57,  support(theta=1) = 44
    [2100,2200] -> 93 / 8
    [2300,2500] -> 154 / 47

The construction is deterministic. Output: data/wti_fixture.csv plus a JSON
summary (full-precision expected values frozen into the C++ tests).
"""

import datetime as dt
import hashlib
import json
import math
import random
import sys
from pathlib import Path

N_ROWS = 2530
N_CH = N_ROWS - 1          # 2529 daily changes
FIRST_CLOSE = 68.58
LAST_CLOSE = 56.70         # sum of changes -11.88, mean -0.0046975
MEDIAN_USD = 0.04399
MEDIAN_PCT_TARGET = 0.06521
MEAN_PCT_SUM_TARGET = 0.01370 * N_CH   # 34.64730
K_PERCENT = 2.0

# change-index ranges that must contain jumps only where engineered
ZONES = [(507, 613), (2107, 2213), (2307, 2513)]

FULL_BURSTS_R2 = [520, 534, 548, 562, 576, 590, 604]
EDGE_BURST_R2 = 508
FULL_BURSTS_R9 = [2120]
EDGE_BURST_R9 = 2108
FULL_BURSTS_R13 = [2325, 2339, 2353, 2367, 2381, 2395, 2409]
EDGE_BURST_R13 = 2311
TRAIN_BURSTS = [150, 210, 280, 350, 420, 470]

MAX_CHANGE_T, MAX_CHANGE_VAL = 700, 7.62     # prev close pinned to 66.00
MIN_CHANGE_T, MIN_CHANGE_VAL = 750, -8.90    # prev 84.52 -> pct -10.5300..
MAX_PCT_T, MAX_PCT_VAL = 800, 6.93           # prev 56.25 -> exactly +12.32%
MEDIAN_USD_T = 1900
MEDIAN_PCT_T, MEDIAN_PCT_VAL = 1920, 0.03590  # prev 55.05 -> 0.065213..%
PIN_DAYS = {699: 66.00, 749: 84.52, 799: 56.25, 1919: 55.05}
SLACK_T = 2529                                # absorbs the endpoint residual

FARM_A = list(range(1000, 1090, 2))   # 45 pairs, level ~88 (needs L > 77)
FARM_B = list(range(1560, 1650, 2))   # 45 pairs, level ~41 (needs L < 46)
PUMP = list(range(1660, 1720, 2))     # 30 pairs, level ~36

# spread endpoint residual over these days so the final slack stays small
ADJUSTERS = [820, 850, 880, 910, 940, 970, 1120, 1150, 1180, 1210,
             1240, 1270, 1310, 1340, 1370, 1400, 1430, 1460, 1490, 1520,
             1740, 1770, 1800, 1830, 1860, 1950, 1980, 2010, 2040, 2070]

WAYPOINTS = [
    (0, 68.58), (100, 62.0), (300, 78.0), (500, 95.0), (613, 92.0),
    (698, 66.3), (748, 84.3), (798, 56.4), (800, 63.2),
    (1000, 88.0), (1090, 88.0), (1100, 89.0), (1300, 74.0), (1500, 48.0),
    (1560, 42.0), (1652, 41.0), (1659, 37.0), (1720, 36.0),
    (1800, 45.0), (1895, 55.0), (1925, 55.0), (2000, 60.0),
    (2100, 68.0), (2213, 65.0), (2306, 62.0), (2410, 54.0),
    (2513, 50.0), (2528, 56.6), (2529, 56.7),
]


def easter(year):
    a = year % 19
    b, c = divmod(year, 100)
    d, e = divmod(b, 4)
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i, k = divmod(c, 4)
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month, day = divmod(h + l - 7 * m + 114, 31)
    return dt.date(year, month, day + 1)


def nth_weekday(year, month, weekday, n):
    d = dt.date(year, month, 1)
    off = (weekday - d.weekday()) % 7
    return d + dt.timedelta(days=off + 7 * (n - 1))


def last_weekday(year, month, weekday):
    d = dt.date(year, 12, 31) if month == 12 else dt.date(year, month + 1, 1) - dt.timedelta(days=1)
    off = (d.weekday() - weekday) % 7
    return d - dt.timedelta(days=off)


def observed(d):
    if d.weekday() == 5:
        return d - dt.timedelta(days=1)
    if d.weekday() == 6:
        return d + dt.timedelta(days=1)
    return d


def holiday_candidates(start, end):
    out = set()
    for y in range(start.year, end.year + 1):
        out.add(observed(dt.date(y, 1, 1)))
        out.add(nth_weekday(y, 1, 0, 3))             # MLK
        out.add(nth_weekday(y, 2, 0, 3))             # Presidents
        out.add(easter(y) - dt.timedelta(days=2))    # Good Friday
        out.add(last_weekday(y, 5, 0))               # Memorial
        out.add(observed(dt.date(y, 7, 4)))
        out.add(nth_weekday(y, 9, 0, 1))             # Labor
        out.add(nth_weekday(y, 11, 3, 4))            # Thanksgiving
        out.add(observed(dt.date(y, 12, 25)))
    return sorted(d for d in out if start < d < end and d.weekday() < 5)


def build_dates():
    start, end = dt.date(2009, 6, 1), dt.date(2019, 5, 30)
    days = []
    d = start
    while d <= end:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    need_drop = len(days) - N_ROWS
    cands = holiday_candidates(start, end)
    if need_drop < 0 or len(cands) < need_drop:
        raise SystemExit("date layout infeasible")
    drop = set()
    for j in range(need_drop):
        drop.add(cands[round(j * (len(cands) - 1) / max(1, need_drop - 1))])
    for c in cands:
        if len(drop) >= need_drop:
            break
        drop.add(c)
    days = [d for d in days if d not in drop]
    assert len(days) == N_ROWS, len(days)
    return days


def trend_logpct(t):
    for (t0, l0), (t1, l1) in zip(WAYPOINTS, WAYPOINTS[1:]):
        if t0 < t <= t1:
            return 100.0 * (math.log(l1) - math.log(l0)) / (t1 - t0)
    return 0.0


def in_zone(t):
    return any(a <= t <= b for a, b in ZONES)


def r5(x):
    return float(f"{x:.5f}")


class Builder:
    """Deterministic day-by-day path generator with repair knobs."""

    def __init__(self, seed):
        self.seed = seed
        self.vol = 1.0          # filler noise scale (mean-pct coarse knob)
        self.f_triple = 0.25    # share of zero-sum triples (below-count knob)
        self.pump_x = 0.30
        self.slack_change = 0.0
        self.adjust_delta = 0.0
        self.burst_days = {}
        for t0 in FULL_BURSTS_R2 + [EDGE_BURST_R2] + FULL_BURSTS_R9 + [EDGE_BURST_R9] \
                + FULL_BURSTS_R13 + [EDGE_BURST_R13]:
            self.burst_days[t0] = -2.5
            self.burst_days[t0 + 1] = -2.5
            for j, r in enumerate((1.70, 1.71, 1.72)):
                self.burst_days[t0 + 2 + j] = r
        for t0 in TRAIN_BURSTS:
            self.burst_days[t0] = -2.2
            self.burst_days[t0 + 1] = -2.4
            for j, r in enumerate((1.55, 1.60, 1.58)):
                self.burst_days[t0 + 2 + j] = r
        self.farm_x = {t: 0.50 for t in FARM_A + FARM_B}

    def build(self):
        rng = random.Random(self.seed)
        pending = []            # queued antithetic members (log-pct units)
        closes = [FIRST_CLOSE]
        farm_first = set(self.farm_x)
        farm_second = {t + 1 for t in self.farm_x}
        pump_first = set(PUMP)
        pump_second = {t + 1 for t in PUMP}
        adjusters = set(ADJUSTERS)
        for t in range(1, N_ROWS):
            prev = closes[-1]
            if t in PIN_DAYS:
                ch = PIN_DAYS[t] - prev
            elif t == MAX_CHANGE_T:
                ch = MAX_CHANGE_VAL
            elif t == MIN_CHANGE_T:
                ch = MIN_CHANGE_VAL
            elif t == MAX_PCT_T:
                ch = MAX_PCT_VAL
            elif t == MEDIAN_USD_T:
                ch = MEDIAN_USD
            elif t == MEDIAN_PCT_T:
                ch = MEDIAN_PCT_VAL
            elif t == SLACK_T:
                ch = self.slack_change
            elif t in self.burst_days:
                ch = prev * self.burst_days[t] / 100.0
            elif t in farm_first:
                ch = self.farm_x[t]
            elif t in farm_second:
                ch = -self.farm_x[t - 1]
            elif t in pump_first:
                ch = -self.pump_x
            elif t in pump_second:
                ch = self.pump_x
            else:
                if pending:
                    g = pending.pop(0)
                else:
                    g = rng.gauss(0.0, 1.55 * self.vol)
                    if rng.random() < 0.10:
                        g *= rng.uniform(1.7, 3.2)
                    if in_zone(t):
                        # keep both group members clear of the zone down-cap
                        g = max(-1.70, min(1.70, g))
                        pending = [-g]
                    elif rng.random() < self.f_triple:
                        g = min(4.2, abs(g))      # two rises, one double drop
                        pending = [g, -2.0 * g]
                    else:
                        g = max(-6.8, min(6.8, g))
                        pending = [-g]
                lr = (trend_logpct(t) + g) / 100.0
                pct = 100.0 * (math.expm1(lr))
                lo, hi = (-1.90, 2.60) if in_zone(t) else (-9.0, 11.0)
                pct = max(lo, min(hi, pct))
                ch = prev * pct / 100.0
                ch = max(-8.4, min(6.9, ch))
                if t in adjusters:
                    ch += self.adjust_delta
            closes.append(r5(prev + ch))
        return closes


def changes_pcts(closes):
    ch = [closes[t] - closes[t - 1] for t in range(1, N_ROWS)]
    pc = [100.0 * (closes[t] - closes[t - 1]) / closes[t - 1] for t in range(1, N_ROWS)]
    return ch, pc


def jump_indices(closes, k=K_PERCENT):
    return [t for t in range(1, N_ROWS)
            if 100.0 * (closes[t - 1] - closes[t]) / closes[t - 1] >= k]


def theta_counts(closes, lo, hi):
    js = set(jump_indices(closes))
    one = sum(1 for i in range(lo, hi + 1)
              if sum(1 for t in range(i + 7, i + 14) if t in js) >= 2)
    return (hi - lo + 1 - one, one)


def median_counts(closes):
    """(#strictly below, #equal) for the realized values of the two
    designated median days."""
    ch, pc = changes_pcts(closes)
    mu = ch[MEDIAN_USD_T - 1]
    mp = pc[MEDIAN_PCT_T - 1]
    bu = sum(1 for v in ch if v < mu - 1e-12)
    eu = sum(1 for v in ch if abs(v - mu) <= 1e-12)
    bp = sum(1 for v in pc if v < mp - 1e-12)
    ep = sum(1 for v in pc if abs(v - mp) <= 1e-12)
    return bu, eu, bp, ep, mu, mp


def solve(seed):
    b = Builder(seed)

    def settle():
        """Rebuild with the endpoint residual spread over the adjusters and
        the exact remainder on the slack day."""
        b.adjust_delta = 0.0
        b.slack_change = 0.0
        c = b.build()
        b.adjust_delta = r5((LAST_CLOSE - c[-1]) / len(ADJUSTERS))
        c = b.build()
        b.slack_change = r5(LAST_CLOSE - c[-1])
        return b.build()

    def pct_sum_now():
        return math.fsum(changes_pcts(settle())[1])

    farm_shift = 0.35   # estimate of sum(pct) lost when farm pairs shrink
    for attempt in range(8):
        # vol bisect: land sum(pct) so that the pump can reach the target
        # after the farm flips
        target = MEAN_PCT_SUM_TARGET - 0.50 + farm_shift
        lo_v, hi_v = 0.35, 1.8
        for _ in range(40):
            b.vol = 0.5 * (lo_v + hi_v)
            err = pct_sum_now() - target
            if abs(err) < 0.12:
                break
            if err < 0:
                lo_v = b.vol
            else:
                hi_v = b.vol
        else:
            return None
        closes = settle()
        if abs(closes[-1] - LAST_CLOSE) > 1e-9 or abs(b.slack_change) > 1.5:
            return None

        bu, eu, bp, ep, _, _ = median_counts(closes)
        e_u, e_p = 1264 - bu, 1264 - bp
        if not (5 <= e_u <= 55 and 5 <= e_p <= 55):
            step = (e_u + e_p) / 2.0 - 30.0
            b.f_triple = min(0.95, max(0.0, b.f_triple - step / 330.0))
            continue
        if abs(e_u - e_p) > 40:
            return None

        for t in b.farm_x:
            b.farm_x[t] = 0.50
        n_ss = min(e_u, e_p)
        n_aB = e_u - n_ss
        n_Ab = e_p - n_ss
        a_slots = list(FARM_A)
        b_slots = list(FARM_B)
        for _ in range(n_Ab):
            b.farm_x[a_slots.pop(0)] = 0.05
        for _ in range(n_aB):
            b.farm_x[b_slots.pop(0)] = 0.03
        for _ in range(n_ss):
            b.farm_x[(b_slots or a_slots).pop(0)] = 0.02
        closes = settle()

        bu, eu, bp, ep, _, _ = median_counts(closes)
        if not (bu == 1264 and eu == 1 and bp == 1264 and ep == 1):
            return None

        s1 = math.fsum(changes_pcts(closes)[1])
        if MEAN_PCT_SUM_TARGET - 1.02 <= s1 <= MEAN_PCT_SUM_TARGET - 0.03:
            break
        farm_shift += MEAN_PCT_SUM_TARGET - 0.50 - s1
        for t in b.farm_x:
            b.farm_x[t] = 0.50
    else:
        return None

    # pump bisect for the exact mean-pct bucket
    def pct_sum(x):
        b.pump_x = x
        return math.fsum(changes_pcts(settle())[1])

    lo_x, hi_x = 0.05, 0.68
    if pct_sum(lo_x) > MEAN_PCT_SUM_TARGET or pct_sum(hi_x) < MEAN_PCT_SUM_TARGET:
        return None
    for _ in range(60):
        mid = r5(0.5 * (lo_x + hi_x))
        if mid in (r5(lo_x), r5(hi_x)):
            break
        if pct_sum(mid) < MEAN_PCT_SUM_TARGET:
            lo_x = mid
        else:
            hi_x = mid
    best, best_err = None, None
    for x in (r5(lo_x), r5(hi_x)):
        err = abs(pct_sum(x) - MEAN_PCT_SUM_TARGET)
        if best is None or err < best_err:
            best, best_err = x, err
    b.pump_x = best
    closes = settle()
    if abs(math.fsum(changes_pcts(closes)[1]) / N_CH - 0.01370) > 4.5e-6:
        return None
    return b, closes


def verify(closes):
    ch, pc = changes_pcts(closes)
    sc, sp = sorted(ch), sorted(pc)
    out = {
        "mean_change": math.fsum(ch) / N_CH,
        "median_change": sc[N_CH // 2],
        "max_change": sc[-1],
        "min_change": sc[0],
        "mean_pct": math.fsum(pc) / N_CH,
        "median_pct": sp[N_CH // 2],
        "max_pct": sp[-1],
        "min_pct": sp[0],
    }
    disp = {
        "mean_change": f"{out['mean_change']:.4f}",
        "median_change": f"{out['median_change']:.5f}",
        "max_change": f"{out['max_change']:.2f}",
        "min_change": f"{out['min_change']:.2f}",
        "mean_pct": f"{out['mean_pct']:.5f}",
        "median_pct": f"{out['median_pct']:.5f}",
        "max_pct": f"{out['max_pct']:.2f}",
        "min_pct": f"{out['min_pct']:.2f}",
    }
    want = {"mean_change": "-0.0047", "median_change": "0.04399",
            "max_change": "7.62", "min_change": "-8.90",
            "mean_pct": "0.01370", "median_pct": "0.06521",
            "max_pct": "12.32", "min_pct": "-10.53"}
    ok = disp == want
    sup = {"table2": theta_counts(closes, 500, 600),
           "table9": theta_counts(closes, 2100, 2200),
           "table13": theta_counts(closes, 2300, 2500)}
    ok = ok and sup["table2"] == (57, 44) and sup["table9"] == (93, 8) \
        and sup["table13"] == (154, 47)
    ok = ok and all(c > 0 for c in closes)
    tr0, tr1 = theta_counts(closes, 100, 499)
    ok = ok and tr1 / (tr0 + tr1) <= 0.45
    return ok, out, disp, sup, tr1 / (tr0 + tr1)


def fnv1a64(data):
    h = 0xcbf29ce484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001b3) & 0xFFFFFFFFFFFFFFFF
    return h


def main():
    root = Path(__file__).resolve().parent.parent
    dates = build_dates()
    for seed in range(1, 400):
        got = solve(seed)
        if got is None:
            continue
        b, closes = got
        ok, stats, disp, sup, trfrac = verify(closes)
        if ok:
            break
    else:
        raise SystemExit("no seed converged")

    csv = "Date,Close\n" + "".join(
        f"{d.isoformat()},{c:.5f}\n" for d, c in zip(dates, closes))
    data = csv.encode()
    out = root / "data" / "wti_fixture.csv"
    out.parent.mkdir(exist_ok=True)
    out.write_bytes(data)
    (root / "data" / "wti_fixture.sha256").write_text(
        hashlib.sha256(data).hexdigest() + "  wti_fixture.csv\n")

    summary = {
        "seed": seed,
        "rows": N_ROWS,
        "first_date": dates[0].isoformat(),
        "last_date": dates[-1].isoformat(),
        "bytes": len(data),
        "fnv1a64": f"0x{fnv1a64(data):016x}",
        "sha256": hashlib.sha256(data).hexdigest(),
        "stats_full": {k: repr(v) for k, v in stats.items()},
        "stats_display": disp,
        "supports": {k: list(v) for k, v in sup.items()},
        "jumps_k2": len(jump_indices(closes)),
        "train_theta1_frac": round(trfrac, 4),
        "vol": b.vol, "f_triple": b.f_triple,
        "pump_x": b.pump_x, "slack_change": b.slack_change,
    }
    (root / "data" / "wti_fixture_summary.json").write_text(
        json.dumps(summary, indent=2) + "\n")
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    sys.exit(main())
