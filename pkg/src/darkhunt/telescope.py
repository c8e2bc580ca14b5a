"""Darkspace (network telescope) address sets and the analytic observability model.

A telescope is a set of routed-but-unused IPv4 blocks of total size k.
For a host scanning the whole address space uniformly at s packets/second
on one port for d seconds:

- collision probability per packet   p_collision = k / 2^32
- observation probability per host   p_observe  = 1 - (1 - p_collision)^(s*d)
- expected packets seen per host     expected_packets = p_collision * s * d

These drive how fast a coordinated scanner becomes visible as a function
of darkspace size.
"""

from __future__ import annotations

import bisect
import ipaddress
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TelescopeSpec",
    "ScanPopulation",
    "p_collision",
    "p_observe",
    "expected_packets",
    "expected_observed_hosts",
    "visible_rate",
    "days_to_coverage",
    "time_to_n_packets",
    "observability_table",
    "DEFAULT_TABLE_PREFIXES",
]

IPV4_SPACE = 2**32

# Classic reporting sizes: a single address, a /24, a small research
# telescope (/22) and a large institutional one (/16).
DEFAULT_TABLE_PREFIXES = (32, 24, 22, 16)


@dataclass(frozen=True)
class TelescopeSpec:
    """Normalized darkspace address set.

    Blocks are deduplicated and merged; k is the size of their union.
    Supports membership tests and indexed access (address_at) so the
    simulator can place hits uniformly over the telescope.
    """

    cidrs: tuple[ipaddress.IPv4Network, ...]
    k: int
    # Parallel arrays over the normalized blocks: inclusive address
    # ranges and the cumulative address count before each block.
    _starts: tuple[int, ...]
    _ends: tuple[int, ...]
    _cum: tuple[int, ...]

    @classmethod
    def from_cidrs(cls, cidrs: Iterable[str | ipaddress.IPv4Network]) -> "TelescopeSpec":
        nets = []
        for c in cidrs:
            if isinstance(c, ipaddress.IPv4Network):
                nets.append(c)
            else:
                nets.append(ipaddress.IPv4Network(str(c).strip(), strict=False))
        if not nets:
            raise ValueError("telescope needs at least one CIDR block")
        merged = tuple(ipaddress.collapse_addresses(nets))
        starts, ends, cum = [], [], []
        total = 0
        for net in merged:
            starts.append(int(net.network_address))
            ends.append(int(net.broadcast_address))
            cum.append(total)
            total += net.num_addresses
        return cls(
            cidrs=merged,
            k=total,
            _starts=tuple(starts),
            _ends=tuple(ends),
            _cum=tuple(cum),
        )

    @classmethod
    def from_prefix(cls, prefix_len: int, base: str = "10.0.0.0") -> "TelescopeSpec":
        """A single-block telescope of the given prefix length.

        The base address only matters for simulation output; the analytic
        model depends on k alone.
        """
        if not 0 <= prefix_len <= 32:
            raise ValueError(f"prefix length out of range: {prefix_len}")
        return cls.from_cidrs([f"{base}/{prefix_len}"])

    def __contains__(self, ip: int) -> bool:
        i = bisect.bisect_right(self._starts, ip) - 1
        return i >= 0 and ip <= self._ends[i]

    def address_at(self, index: int) -> int:
        """The index-th address of the telescope (0 <= index < k)."""
        if not 0 <= index < self.k:
            raise IndexError(f"address index {index} out of range 0..{self.k - 1}")
        i = bisect.bisect_right(self._cum, index) - 1
        return self._starts[i] + (index - self._cum[i])

    def contains_array(self, ips: np.ndarray) -> np.ndarray:
        """Vectorized membership test over an int array of addresses."""
        starts = np.asarray(self._starts, dtype=np.int64)
        ends = np.asarray(self._ends, dtype=np.int64)
        i = np.searchsorted(starts, ips, side="right") - 1
        return (i >= 0) & (ips <= ends[np.clip(i, 0, len(ends) - 1)])

    def addresses_at_array(self, indices: np.ndarray) -> np.ndarray:
        """Vectorized address_at over an int array of indices in [0, k)."""
        cum = np.asarray(self._cum, dtype=np.int64)
        starts = np.asarray(self._starts, dtype=np.int64)
        j = np.searchsorted(cum, indices, side="right") - 1
        return starts[j] + (indices - cum[j])

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.cidrs)


@dataclass(frozen=True)
class ScanPopulation:
    """A population of coordinated scanning hosts.

    host_count hosts, each probing uniform-random IPv4 addresses at
    rate_pps packets/second, staying on one destination port for
    duration_s seconds (one daily-port period by default).
    """

    host_count: int
    rate_pps: float = 10.0
    duration_s: float = 86400.0

    def __post_init__(self) -> None:
        if self.host_count < 0:
            raise ValueError(f"host_count must be >= 0, got {self.host_count}")
        if self.rate_pps < 0 or self.duration_s <= 0:
            raise ValueError("rate_pps must be >= 0 and duration_s > 0")


def p_collision(telescope: TelescopeSpec) -> float:
    """Probability that one uniform-random probe lands in the telescope."""
    return telescope.k / IPV4_SPACE


def p_observe(telescope: TelescopeSpec, pop: ScanPopulation) -> float:
    """Probability one host is seen at least once during its port period."""
    pc = p_collision(telescope)
    if pc >= 1.0:
        return 1.0
    # 1 - (1 - pc)^(s*d), via expm1/log1p to keep precision at tiny pc.
    return -math.expm1(pop.rate_pps * pop.duration_s * math.log1p(-pc))


def expected_packets(telescope: TelescopeSpec, pop: ScanPopulation) -> float:
    """Expected telescope-observed packets from one host over its port period."""
    return p_collision(telescope) * pop.rate_pps * pop.duration_s


def expected_observed_hosts(telescope: TelescopeSpec, pop: ScanPopulation) -> float:
    """Expected number of distinct hosts seen: host_count * p_observe."""
    return pop.host_count * p_observe(telescope, pop)


def visible_rate(telescope: TelescopeSpec, pop: ScanPopulation) -> float:
    """Aggregate packet arrival rate (pps) at the telescope from all hosts."""
    return pop.host_count * pop.rate_pps * p_collision(telescope)


def days_to_coverage(
    telescope: TelescopeSpec, pop: ScanPopulation, target_fraction: float
) -> int:
    """Smallest whole number of days until a host has been seen with
    probability >= target_fraction.

    Days are independent trials with per-day success p_observe (the port
    changes daily but the uniform scanning is memoryless).
    """
    if not 0 < target_fraction < 1:
        raise ValueError(f"target_fraction must be in (0, 1), got {target_fraction}")
    pc = p_collision(telescope)
    sd = pop.rate_pps * pop.duration_s
    if pc * sd == 0:
        raise ValueError("zero collision rate: coverage target unreachable")
    if pc >= 1.0:
        return 1
    # 1 - (1-pc)^(sd * D) >= target  <=>  D >= log(1-target) / (sd * log(1-pc))
    days = math.log1p(-target_fraction) / (sd * math.log1p(-pc))
    d = max(1, math.ceil(days))
    # Guard against float edge cases around the ceiling.
    while d > 1 and -math.expm1(sd * (d - 1) * math.log1p(-pc)) >= target_fraction:
        d -= 1
    return d


def time_to_n_packets(visible_rate_pps: float, n_packets: int) -> float:
    """Seconds of collection until n_packets have arrived at the telescope.

    visible_rate_pps is the aggregate telescope-visible rate, e.g. from
    visible_rate(); for coordinated scanners that is
    host_count * rate_pps * p_collision.
    """
    if n_packets < 0:
        raise ValueError(f"n_packets must be >= 0, got {n_packets}")
    if n_packets == 0:
        return 0.0
    if visible_rate_pps <= 0:
        raise ValueError("visible rate must be > 0 to accumulate packets")
    return n_packets / visible_rate_pps


def observability_table(
    prefixes: Sequence[int] = DEFAULT_TABLE_PREFIXES,
    rate_pps: float = 10.0,
    duration_s: float = 86400.0,
) -> list[dict]:
    """Per-host observability versus darkspace size.

    One row per prefix length: collision probability, observation
    probability over one port period, and expected packets per host.
    """
    rows = []
    for plen in prefixes:
        tel = TelescopeSpec.from_prefix(plen)
        pop = ScanPopulation(host_count=1, rate_pps=rate_pps, duration_s=duration_s)
        rows.append(
            {
                "size": f"/{plen}",
                "p_collision": p_collision(tel),
                "p_observe": p_observe(tel, pop),
                "expected_packets": expected_packets(tel, pop),
            }
        )
    return rows
