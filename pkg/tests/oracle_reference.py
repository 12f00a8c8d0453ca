"""A deliberately naive re-implementation of the R reference backtest.

Straight loops over plain Python lists and ``datetime.date``; nothing from
trendlab is imported. Mirrors:

    gtdata_mean = rollmeanr(gtdata, k)
    gtdata_mean_lagged = lag(gtdata_mean, -1)
    pos = 2*(gtdata > gtdata_mean_lagged) - 1
    perf = -pos * spy_rets          # spy_rets holds r_{t+1}
    t.test(perf[!is.na(perf)])$statistic
"""

import math
from datetime import timedelta


def weekly_returns(dates, closes):
    """{monday: close(last day <= Friday) / close(first day >= Monday) - 1} for weeks with >= 2 days."""
    out = {}
    i = 0
    while i < len(dates):
        d = dates[i]
        if d.weekday() > 4:
            i += 1
            continue
        monday = d - timedelta(days=d.weekday())
        friday = monday + timedelta(days=4)
        first_close = None
        last_close = None
        count = 0
        j = i
        while j < len(dates) and dates[j] <= monday + timedelta(days=6):
            if dates[j] <= friday:
                if first_close is None:
                    first_close = closes[j]
                last_close = closes[j]
                count += 1
            j += 1
        if count >= 2:
            out[monday] = last_close / first_close - 1.0
        i = j
    return out


def compute_perf(svi_dates, svi_values, price_dates, closes, k):
    """Return ``(trade_mondays, perf, t)`` where perf[j] is the held-position return."""
    rets = weekly_returns(price_dates, closes)
    n = len(svi_values)
    mean = [None] * n
    for t in range(k - 1, n):
        s = 0.0
        for j in range(t - k + 1, t + 1):
            s += svi_values[j]
        mean[t] = s / k
    lagged = [None] * n
    for t in range(1, n):
        lagged[t] = mean[t - 1]

    mondays, perf = [], []
    for t in range(n):
        if lagged[t] is None:
            continue
        monday = svi_dates[t] + timedelta(days=8)
        if monday not in rets:
            continue
        pos = 2 * (1 if svi_values[t] > lagged[t] else 0) - 1
        mondays.append(monday)
        perf.append(-pos * rets[monday])

    m = 0.0
    for x in perf:
        m += x
    m /= len(perf)
    ss = 0.0
    for x in perf:
        ss += (x - m) ** 2
    sd = math.sqrt(ss / (len(perf) - 1))
    return mondays, perf, m / (sd / math.sqrt(len(perf)))
