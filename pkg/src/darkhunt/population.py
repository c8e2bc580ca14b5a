"""Per-host scan-rate inference from always-on sources.

End-user machines hosting a scanner wink in and out as they are powered
on and off, so naive per-IP daily packet counts mix uptime with send
rate.  Restricting to "always-on" sources, seen in every one of the 144
equal time bins of a UTC day, isolates hosts that ran the full day; their
daily counts, divided through the telescope's coverage of IPv4 space,
estimate the per-host scanning speed:

    s = (r / t) * 2^32 / k

with r packets observed over t seconds by a k-address telescope.  A
kernel density over the per-host daily counts exposes the rate modes of
the population.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.signal import find_peaks

from .records import PacketRecord, day_of_ts
from .telescope import IPV4_SPACE, TelescopeSpec

__all__ = [
    "BINS_PER_DAY",
    "AlwaysOnReport",
    "RateEstimate",
    "DensityProfile",
    "always_on",
    "estimate_rate",
    "density_profile",
    "peaks_to_rates",
    "write_density_csv",
    "write_peaks_json",
]

# A day is cut into 144 equal bins aligned to 0000Z (600 s each); a source
# qualifies as always-on when every bin holds at least one of its packets.
BINS_PER_DAY = 144
_US_PER_DAY = 86_400_000_000
_BIN_US = _US_PER_DAY // BINS_PER_DAY

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class AlwaysOnReport:
    """Sources covering all 144 bins of one day, with their daily packet counts."""

    day: date
    always_on_ips: frozenset[int]
    per_ip_daily_packets: Mapping[int, int]


@dataclass(frozen=True)
class RateEstimate:
    """Scan-rate estimate from telescope counts.

    r packets over t seconds on a k-address telescope scale up to the full
    address space as s = (r/t) * 2^32 / k packets/second.
    """

    r: float
    t: float
    k_telescope: int
    s: float


@dataclass(frozen=True)
class DensityProfile:
    """Gaussian-kernel density of daily packet counts, with detected peaks."""

    sample: tuple[float, ...]
    bandwidth: float
    grid: np.ndarray
    density: np.ndarray
    peaks: tuple[float, ...]


def always_on(
    records: Iterable[PacketRecord], telescope: Optional[TelescopeSpec] = None
) -> AlwaysOnReport:
    """Find sources observed in every one of a day's 144 bins.

    `records` must span a single UTC day.  When a telescope is given,
    only packets destined to it are considered (a no-op for data captured
    at the telescope itself).
    """
    day = None
    bins: dict[int, set[int]] = {}
    counts: dict[int, int] = {}
    for rec in records:
        if telescope is not None and rec.dst_ip not in telescope:
            continue
        rec_day = day_of_ts(rec.ts_us)
        if day is None:
            day = rec_day
        elif rec_day != day:
            raise ValueError(
                f"records span multiple days: {day.isoformat()} and {rec_day.isoformat()}"
            )
        bins.setdefault(rec.src_ip, set()).add((rec.ts_us % _US_PER_DAY) // _BIN_US)
        counts[rec.src_ip] = counts.get(rec.src_ip, 0) + 1
    if day is None:
        raise ValueError("no records for the day")
    qualified = frozenset(ip for ip, b in bins.items() if len(b) == BINS_PER_DAY)
    return AlwaysOnReport(
        day=day,
        always_on_ips=qualified,
        per_ip_daily_packets={ip: counts[ip] for ip in sorted(qualified)},
    )


def estimate_rate(r: float, t: float, k_telescope: int) -> RateEstimate:
    """Scale observed packet counts up to a full-address-space send rate."""
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    if k_telescope < 1:
        raise ValueError(f"k_telescope must be >= 1, got {k_telescope}")
    return RateEstimate(
        r=r, t=t, k_telescope=k_telescope, s=(r / t) * IPV4_SPACE / k_telescope
    )


def _silverman_bandwidth(x: np.ndarray) -> float:
    """Silverman's rule of thumb: 0.9 * min(std, IQR/1.34) * n^(-1/5)."""
    std = float(np.std(x))
    q75, q25 = np.percentile(x, [75, 25])
    iqr = float(q75 - q25)
    scale = min(std, iqr / 1.34) if iqr > 0 else std
    if scale == 0:
        # Degenerate sample (all values equal): any positive width gives a
        # single peak at the common value.
        return max(1.0, abs(float(x[0])) * 1e-3)
    return 0.9 * scale * len(x) ** (-0.2)


_GRID_POINTS = 512
# Grid margin in bandwidths.  Six sigmas leave < 1e-8 of each kernel's
# mass outside the grid, so the trapezoid integral stays within 1e-6 of 1.
_GRID_MARGIN_BW = 6.0
# Peaks under 5% of the global maximum are numerical ripple, not modes.
_PEAK_FLOOR = 0.05


def density_profile(
    samples: Sequence[float], bandwidth: Optional[float] = None
) -> DensityProfile:
    """Gaussian-kernel KDE of daily packet counts on a 512-point grid.

    Bandwidth defaults to Silverman's rule.  Peaks are the strict local
    maxima of the gridded density, discarding any below 5% of the global
    maximum.
    """
    x = np.asarray(list(samples), dtype=float)
    if x.size < 2:
        raise ValueError(f"need at least 2 samples, got {x.size}")
    bw = float(bandwidth) if bandwidth is not None else _silverman_bandwidth(x)
    if bw <= 0:
        raise ValueError(f"bandwidth must be > 0, got {bw}")
    lo = x.min() - _GRID_MARGIN_BW * bw
    hi = x.max() + _GRID_MARGIN_BW * bw
    grid = np.linspace(lo, hi, _GRID_POINTS)
    z = (grid[:, None] - x[None, :]) / bw
    density = np.exp(-0.5 * z * z).sum(axis=1) / (x.size * bw * math.sqrt(2 * math.pi))
    idx, _ = find_peaks(density, height=_PEAK_FLOOR * float(density.max()))
    return DensityProfile(
        sample=tuple(float(v) for v in x),
        bandwidth=bw,
        grid=grid,
        density=density,
        peaks=tuple(float(grid[i]) for i in idx),
    )


def peaks_to_rates(profile: DensityProfile, k_telescope: int) -> list[float]:
    """Map density peaks (packets/day) to per-host send rates (pps)."""
    if not profile.peaks:
        raise ValueError("density profile has no peaks")
    return [
        estimate_rate(p, SECONDS_PER_DAY, k_telescope).s for p in profile.peaks
    ]


def write_density_csv(profile: DensityProfile, path) -> None:
    """Export the gridded density as `grid,density` CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["grid", "density"])
        for g, d in zip(profile.grid, profile.density):
            writer.writerow([f"{g:.6f}", f"{d:.10g}"])


def write_peaks_json(
    profile: DensityProfile, path, k_telescope: Optional[int] = None
) -> None:
    """Export peak locations (and mapped pps rates when k is given)."""
    payload: dict = {
        "bandwidth": profile.bandwidth,
        "peaks_packets_per_day": list(profile.peaks),
    }
    if k_telescope is not None and profile.peaks:
        payload["k_telescope"] = k_telescope
        payload["peaks_pps"] = peaks_to_rates(profile, k_telescope)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
