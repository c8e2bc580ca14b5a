"""Ground-truth traffic simulator.

Generates what a darkspace would capture from a Crackonosh-style botnet
(coordinated uniform IPv4 scanning on a shared daily port, padded payload
sizes) together with ordinary background scanners (modal packet sizes,
block-concentrated sources) and a long tail of one-off noise probes.

Scanning hosts probe uniform-random addresses, so per host and day the
telescope hit count is Binomial(packets_sent, k/2^32).  The default
"direct" mode samples that binomial and places the hits uniformly in time
and across telescope addresses, which is statistically identical to
drawing every target but runs at desk scale; the "naive" mode draws every
target and is kept for cross-validating the shortcut on tiny runs.

Output is deterministic for a fixed config: every (host, day) pair gets
an independent RNG substream keyed by (seed, host, day), so results are
byte-identical no matter how generation is parallelized or reordered.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .portgen import DailyPortOracle
from .records import (
    LabeledDataset,
    PacketRecord,
    day_start_us,
    write_csv,
)
from .telescope import IPV4_SPACE, TelescopeSpec

__all__ = [
    "BackgroundScanner",
    "CrackonoshConfig",
    "SimConfig",
    "default_background",
    "three_epoch_schedule",
    "population_at",
    "emit_ephemeral_src_port",
    "simulate",
    "write_dataset",
    "write_labels_csv",
    "read_labels_csv",
    "config_digest",
]

SECONDS_PER_DAY = 86400.0

# Ephemeral UDP source-port range used by the scanners.
EPHEMERAL_LO = 49152
EPHEMERAL_HI = 65535

# RNG substream kinds (first element of the stream key after the seed).
_K_PLACE = 0
_K_HOST = 1
_K_BG_SETUP = 2
_K_BG_DAY = 3
_K_NOISE = 4


def _stream(seed: int, kind: int, a: int = 0, b: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, kind, a, b))))


def emit_ephemeral_src_port(rng: np.random.Generator) -> int:
    """Uniform ephemeral UDP source port in [49152, 65535]."""
    return int(rng.integers(EPHEMERAL_LO, EPHEMERAL_HI + 1))


def _modal_entropy(probs: Sequence[float]) -> float:
    return -sum(p * math.log2(p) for p in probs if p > 0)


@dataclass(frozen=True)
class BackgroundScanner:
    """One ordinary scanning campaign observed by the telescope.

    rate_pps is the aggregate arrival rate at the telescope.  Sources are
    either one fixed address ("single") or up to 256 addresses inside one
    /24 ("block").  Packet sizes follow a modal distribution of at most 4
    fixed sizes, whose entropy is bounded by 2 bits by construction.
    """

    service_port: int
    source_mode: str  # "single" | "block"
    rate_pps: float
    sizes: tuple[int, ...]
    size_probs: tuple[float, ...]
    n_sources: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.service_port <= 65535:
            raise ValueError(f"service_port out of range: {self.service_port}")
        if self.source_mode not in ("single", "block"):
            raise ValueError(f"source_mode must be 'single' or 'block': {self.source_mode}")
        if self.rate_pps <= 0:
            raise ValueError("rate_pps must be > 0")
        if not 1 <= len(self.sizes) <= 4:
            raise ValueError("modal size distribution needs 1-4 distinct sizes")
        if len(self.sizes) != len(set(self.sizes)):
            raise ValueError("modal sizes must be distinct")
        if len(self.size_probs) != len(self.sizes):
            raise ValueError("size_probs must match sizes")
        if abs(sum(self.size_probs) - 1.0) > 1e-9 or any(p <= 0 for p in self.size_probs):
            raise ValueError("size_probs must be positive and sum to 1")
        if _modal_entropy(self.size_probs) > 2.0:
            raise ValueError("modal size distribution exceeds 2 bits of entropy")
        if self.source_mode == "single":
            if self.n_sources != 1:
                raise ValueError("single source mode means exactly 1 source")
        elif not 1 <= self.n_sources <= 256:
            raise ValueError("block mode supports 1-256 sources in one /24")


@dataclass(frozen=True)
class CrackonoshConfig:
    """Coordinated-scanner population for the simulator.

    population lists the live host count for each simulated day (the
    schedule length is the run length).  A fixed fraction of hosts are
    always on; the rest are up for a contiguous 8-16 h window each day.
    Payload lengths are padded uniformly over padding_sizes distinct
    values starting at payload_base; 128 sizes lands the partition
    entropy in the observed 6.8-7.0 bit band once enough packets accrue.
    Source addresses are uniform over public space with at most per24_cap
    hosts in any /24.
    """

    population: tuple[int, ...]
    rate_pps: float = 10.0
    padding_sizes: int = 128
    payload_base: int = 64
    always_on_fraction: float = 0.6
    per24_cap: int = 2

    def __post_init__(self) -> None:
        if not self.population:
            raise ValueError("population schedule must cover at least one day")
        if any(n < 0 for n in self.population):
            raise ValueError("population counts must be >= 0")
        if self.rate_pps < 0:
            raise ValueError("rate_pps must be >= 0")
        if self.padding_sizes < 1:
            raise ValueError("padding_sizes must be >= 1")
        if self.payload_base < 0 or self.payload_base + self.padding_sizes - 1 > 65507:
            raise ValueError("payload sizes exceed the UDP payload bound")
        if not 0.0 <= self.always_on_fraction <= 1.0:
            raise ValueError("always_on_fraction must be in [0, 1]")
        if self.per24_cap < 1:
            raise ValueError("per24_cap must be >= 1")


@dataclass(frozen=True)
class SimConfig:
    """Complete, hashable description of one simulator run."""

    seed: int
    start_day: date
    telescope: TelescopeSpec
    oracle: DailyPortOracle
    crackonosh: CrackonoshConfig
    background: tuple[BackgroundScanner, ...] = ()
    noise_ports_per_day: int = 0
    mode: str = "direct"  # "direct" | "naive"

    def __post_init__(self) -> None:
        if self.mode not in ("direct", "naive"):
            raise ValueError(f"mode must be 'direct' or 'naive': {self.mode}")
        if self.noise_ports_per_day < 0:
            raise ValueError("noise_ports_per_day must be >= 0")

    @property
    def days(self) -> int:
        return len(self.crackonosh.population)


def three_epoch_schedule(days_per_epoch: int, scale: float = 1.0) -> tuple[int, ...]:
    """Observed population trajectory: ~90k, then ~40k, then ~26k hosts.

    Scale it down (e.g. 0.01) for desk-size runs; counts are rounded.
    """
    if days_per_epoch < 1:
        raise ValueError("days_per_epoch must be >= 1")
    if scale < 0:
        raise ValueError("scale must be >= 0")
    schedule = []
    for count in (90000, 40000, 26000):
        schedule.extend([round(count * scale)] * days_per_epoch)
    return tuple(schedule)


def population_at(config: SimConfig, day: date | int) -> int:
    """Scheduled host count for a simulated day (index or calendar date)."""
    idx = day if isinstance(day, int) else (day - config.start_day).days
    if not 0 <= idx < config.days:
        raise ValueError(f"day {day} outside the simulated schedule")
    return config.crackonosh.population[idx]


# Service ports commonly scanned for vulnerabilities or DDoS reflection.
# SNMP sightings in the wild are reported against both 161 and 123 (the
# latter properly NTP), so the default set carries both.
_SIP_SIZES = ((412, 418, 382), (0.6, 0.25, 0.15))
_MDNS_SIZES = ((46, 50), (0.8, 0.2))
_BT_SIZES = ((103, 107, 111, 99), (0.4, 0.3, 0.2, 0.1))
_WSD_SIZES = ((656, 680), (0.7, 0.3))
_SSDP_SIZES = ((94, 98, 132), (0.5, 0.4, 0.1))
_MSSQL_SIZES = ((1,), (1.0,))
_NTP_SIZES = ((8, 48), (0.6, 0.4))
_SNMP_SIZES = ((40, 42), (0.75, 0.25))


def default_background() -> tuple[BackgroundScanner, ...]:
    """A fixed set of service scanners resembling everyday UDP background.

    Per-port source totals sit in the few-hundred range so that a shrinking
    coordinated population gradually loses address-count rank against them.
    """

    def block(port, n, pkts_per_day, dist):
        return BackgroundScanner(
            service_port=port,
            source_mode="block",
            rate_pps=pkts_per_day / SECONDS_PER_DAY,
            sizes=dist[0],
            size_probs=dist[1],
            n_sources=n,
        )

    def single(port, pkts_per_day, dist):
        return BackgroundScanner(
            service_port=port,
            source_mode="single",
            rate_pps=pkts_per_day / SECONDS_PER_DAY,
            sizes=dist[0],
            size_probs=dist[1],
        )

    return (
        # SIP: three campaign blocks plus one classic single-source sweeper.
        block(5060, 250, 1500, _SIP_SIZES),
        block(5060, 250, 1500, _SIP_SIZES),
        block(5060, 200, 1200, _SIP_SIZES),
        single(5060, 3000, _SIP_SIZES),
        # mDNS
        block(5353, 256, 1536, _MDNS_SIZES),
        block(5353, 256, 1536, _MDNS_SIZES),
        # BitTorrent
        block(6881, 200, 1200, _BT_SIZES),
        block(6881, 200, 1200, _BT_SIZES),
        block(6881, 150, 900, _BT_SIZES),
        # WS-Discovery
        block(3702, 215, 1300, _WSD_SIZES),
        block(3702, 215, 1300, _WSD_SIZES),
        # SSDP
        block(1900, 175, 1050, _SSDP_SIZES),
        block(1900, 175, 1050, _SSDP_SIZES),
        # MSSQL ping
        block(1433, 150, 900, _MSSQL_SIZES),
        block(1433, 150, 900, _MSSQL_SIZES),
        # NTP / SNMP
        block(123, 180, 1080, _NTP_SIZES),
        block(161, 90, 540, _SNMP_SIZES),
    )


def _reserved_mask(ips: np.ndarray) -> np.ndarray:
    """True for addresses outside ordinary public unicast space."""
    o1 = ips >> 24
    mask = (o1 == 0) | (o1 == 10) | (o1 == 127) | (o1 >= 224)
    mask |= (ips >> 16) == ((169 << 8) | 254)  # 169.254/16
    mask |= (ips >> 20) == ((172 << 4) | 1)  # 172.16/12
    mask |= (ips >> 16) == ((192 << 8) | 168)  # 192.168/16
    return mask


def _draw_public_ips(
    rng: np.random.Generator, n: int, telescope: TelescopeSpec
) -> np.ndarray:
    """n uniform public-unicast addresses outside the telescope (no cap)."""
    out = np.empty(n, dtype=np.int64)
    filled = 0
    while filled < n:
        batch = rng.integers(0, IPV4_SPACE, size=max(1024, 2 * (n - filled)), dtype=np.int64)
        ok = ~_reserved_mask(batch)
        ok &= ~telescope.contains_array(batch)
        good = batch[ok]
        take = min(n - filled, good.size)
        out[filled : filled + take] = good[:take]
        filled += take
    return out


def _place_hosts(
    rng: np.random.Generator, n: int, telescope: TelescopeSpec, cap: int
) -> np.ndarray:
    """Place n scanner hosts uniformly over public space, <= cap per /24."""
    out = np.empty(n, dtype=np.int64)
    block_counts: dict[int, int] = {}
    filled = 0
    while filled < n:
        for ip in _draw_public_ips(rng, max(256, n - filled), telescope):
            blk = int(ip) >> 8
            if block_counts.get(blk, 0) >= cap:
                continue
            block_counts[blk] = block_counts.get(blk, 0) + 1
            out[filled] = ip
            filled += 1
            if filled == n:
                break
    return out


def _records_from_arrays(
    day_us: int,
    offsets_s: np.ndarray,
    src: np.ndarray,
    sport: np.ndarray,
    dst: np.ndarray,
    dport: int,
    sizes: np.ndarray,
) -> list[PacketRecord]:
    ts = (day_us + np.floor(offsets_s * 1e6).astype(np.int64)).tolist()
    return [
        PacketRecord(
            ts_us=t,
            src_ip=s,
            src_port=sp,
            dst_ip=d,
            dst_port=dport,
            proto=17,
            payload_len=pl,
        )
        for t, s, sp, d, pl in zip(
            ts, src.tolist(), sport.tolist(), dst.tolist(), sizes.tolist()
        )
    ]


def _crackonosh_day(
    config: SimConfig,
    day_idx: int,
    port: int,
    host_ips: np.ndarray,
    host_always_on: np.ndarray,
) -> list[PacketRecord]:
    ck = config.crackonosh
    tel = config.telescope
    pc = tel.k / IPV4_SPACE
    day_us = day_start_us(config.start_day + timedelta(days=day_idx))
    n_hosts = ck.population[day_idx]
    records: list[PacketRecord] = []
    for host_id in range(n_hosts):
        rng = _stream(config.seed, _K_HOST, host_id, day_idx)
        if host_always_on[host_id]:
            t0, dur = 0.0, SECONDS_PER_DAY
        else:
            dur = rng.uniform(8 * 3600.0, 16 * 3600.0)
            t0 = rng.uniform(0.0, SECONDS_PER_DAY - dur)
        n_sent = int(round(ck.rate_pps * dur))
        if n_sent == 0:
            continue
        if config.mode == "direct":
            m = int(rng.binomial(n_sent, pc))
            if m == 0:
                continue
            offsets = rng.uniform(t0, t0 + dur, size=m)
            dst = tel.addresses_at_array(rng.integers(0, tel.k, size=m))
        else:
            targets = rng.integers(0, IPV4_SPACE, size=n_sent, dtype=np.int64)
            times = rng.uniform(t0, t0 + dur, size=n_sent)
            hit = tel.contains_array(targets)
            m = int(hit.sum())
            if m == 0:
                continue
            offsets = times[hit]
            dst = targets[hit]
        sport = rng.integers(EPHEMERAL_LO, EPHEMERAL_HI + 1, size=m)
        sizes = ck.payload_base + rng.integers(0, ck.padding_sizes, size=m)
        src = np.full(m, host_ips[host_id], dtype=np.int64)
        records.extend(
            _records_from_arrays(day_us, offsets, src, sport, dst, port, sizes)
        )
    return records


def _background_day(
    config: SimConfig,
    day_idx: int,
    scanner_idx: int,
    scanner: BackgroundScanner,
    sources: np.ndarray,
) -> list[PacketRecord]:
    tel = config.telescope
    day_us = day_start_us(config.start_day + timedelta(days=day_idx))
    rng = _stream(config.seed, _K_BG_DAY, scanner_idx, day_idx)
    n_pkts = int(rng.poisson(scanner.rate_pps * SECONDS_PER_DAY))
    if n_pkts == 0:
        return []
    # Every source speaks before any repeats, so daily per-port source
    # counts stay at the configured level.
    perm = rng.permutation(sources.size)
    if n_pkts >= sources.size:
        extra = rng.integers(0, sources.size, size=n_pkts - sources.size)
        src_idx = np.concatenate([perm, extra])
    else:
        src_idx = perm[:n_pkts]
    offsets = rng.uniform(0.0, SECONDS_PER_DAY, size=n_pkts)
    dst = tel.addresses_at_array(rng.integers(0, tel.k, size=n_pkts))
    sport = rng.integers(EPHEMERAL_LO, EPHEMERAL_HI + 1, size=n_pkts)
    sizes = np.array(scanner.sizes, dtype=np.int64)[
        rng.choice(len(scanner.sizes), size=n_pkts, p=scanner.size_probs)
    ]
    return _records_from_arrays(
        day_us, offsets, sources[src_idx], sport, dst, scanner.service_port, sizes
    )


def _noise_day(config: SimConfig, day_idx: int) -> list[PacketRecord]:
    """One-off probes: a long tail of low ports with one source and 1-3 packets.

    Ports stay below the coordinated-scanner range (they mimic service
    scanning), so the daily port is never polluted by noise.
    """
    n_ports = config.noise_ports_per_day
    if n_ports == 0:
        return []
    tel = config.telescope
    day_us = day_start_us(config.start_day + timedelta(days=day_idx))
    rng = _stream(config.seed, _K_NOISE, day_idx)
    ports = rng.choice(49107, size=n_ports, replace=False) + 1
    srcs = _draw_public_ips(rng, n_ports, tel)
    records: list[PacketRecord] = []
    for port, src in zip(ports.tolist(), srcs.tolist()):
        n = int(rng.integers(1, 4))
        offsets = rng.uniform(0.0, SECONDS_PER_DAY, size=n)
        dst = tel.addresses_at_array(rng.integers(0, tel.k, size=n))
        sport = rng.integers(EPHEMERAL_LO, EPHEMERAL_HI + 1, size=n)
        size = int(rng.integers(40, 401))
        records.extend(
            _records_from_arrays(
                day_us,
                offsets,
                np.full(n, src, dtype=np.int64),
                sport,
                dst,
                int(port),
                np.full(n, size, dtype=np.int64),
            )
        )
    return records


def simulate(config: SimConfig) -> LabeledDataset:
    """Run the simulator, returning time-ordered records plus ground truth."""
    ck = config.crackonosh
    max_pop = max(ck.population)
    place_rng = _stream(config.seed, _K_PLACE)
    host_ips = _place_hosts(place_rng, max_pop, config.telescope, ck.per24_cap)
    host_always_on = place_rng.random(max_pop) < ck.always_on_fraction

    labels = {}
    for day_idx in range(config.days):
        day = config.start_day + timedelta(days=day_idx)
        labels[day] = config.oracle.daily_port(day)

    # Background infrastructure is fixed for the whole run: each campaign
    # keeps the same source block across days.
    bg_sources = []
    for scanner_idx, scanner in enumerate(config.background):
        setup = _stream(config.seed, _K_BG_SETUP, scanner_idx)
        if scanner.source_mode == "single":
            sources = _draw_public_ips(setup, 1, config.telescope)
        else:
            base = (int(_draw_public_ips(setup, 1, config.telescope)[0]) >> 8) << 8
            sources = base + setup.choice(256, size=scanner.n_sources, replace=False)
        bg_sources.append(sources)

    records: list[PacketRecord] = []
    for day_idx, day in enumerate(sorted(labels)):
        records.extend(
            _crackonosh_day(config, day_idx, labels[day], host_ips, host_always_on)
        )
        for scanner_idx, scanner in enumerate(config.background):
            records.extend(
                _background_day(
                    config, day_idx, scanner_idx, scanner, bg_sources[scanner_idx]
                )
            )
        records.extend(_noise_day(config, day_idx))

    records.sort(
        key=lambda r: (r.ts_us, r.src_ip, r.dst_ip, r.src_port, r.dst_port, r.payload_len)
    )
    return LabeledDataset(records=tuple(records), labels=labels)


def write_labels_csv(labels, path) -> None:
    """Write the ground-truth `day,port` CSV."""
    with open(path, "w", newline="") as fh:
        fh.write("day,port\n")
        for day in sorted(labels):
            fh.write(f"{day.isoformat()},{labels[day]}\n")


def read_labels_csv(path) -> dict[date, int]:
    """Read a `day,port` CSV back into a labels map."""
    labels = {}
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip()
        if header != "day,port":
            raise ValueError(f"bad labels header: expected 'day,port', got {header!r}")
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                day_s, port_s = line.split(",")
                labels[date.fromisoformat(day_s)] = int(port_s)
            except ValueError as exc:
                raise ValueError(f"labels line {line_no}: {exc}") from None
    return labels


def config_from_dict(d: dict, secret_override: Optional[str] = None) -> SimConfig:
    """Build a SimConfig from a parsed JSON config (see README for the format).

    The oracle secret comes from, in order: secret_override, the
    DARKHUNT_SECRET environment variable, a `{"env": "NAME"}` reference,
    or a plain string in the file.  Secrets are never logged.
    """
    try:
        seed = int(d["seed"])
        start_day = date.fromisoformat(d["start_day"])
        tel_field = d["telescope"]
    except KeyError as exc:
        raise ValueError(f"config missing required key: {exc.args[0]}") from None
    cidrs = [tel_field] if isinstance(tel_field, str) else list(tel_field)
    telescope = TelescopeSpec.from_cidrs(cidrs)

    secret = secret_override if secret_override is not None else os.environ.get("DARKHUNT_SECRET")
    if secret is None:
        raw = d.get("secret")
        if raw is None:
            raise ValueError("config has no secret and DARKHUNT_SECRET is unset")
        if isinstance(raw, dict):
            env_name = raw.get("env", "")
            secret = os.environ.get(env_name)
            if secret is None:
                raise ValueError(f"secret environment variable {env_name!r} is unset")
        else:
            secret = str(raw)
    port_lo, port_hi = d.get("port_range", (49108, 65535))
    oracle = DailyPortOracle(secret=secret.encode(), port_lo=int(port_lo), port_hi=int(port_hi))

    ck_d = dict(d.get("crackonosh", {}))
    pop_field = ck_d.pop("population", None)
    if pop_field is None:
        raise ValueError("config missing crackonosh.population")
    if isinstance(pop_field, dict):
        if pop_field.get("schedule") != "three_epoch":
            raise ValueError(f"unknown population schedule: {pop_field.get('schedule')!r}")
        population = three_epoch_schedule(
            int(pop_field.get("days_per_epoch", 1)), float(pop_field.get("scale", 1.0))
        )
    else:
        population = tuple(int(n) for n in pop_field)
    crackonosh = CrackonoshConfig(population=population, **ck_d)

    bg_field = d.get("background", "none")
    if bg_field == "default":
        background = default_background()
    elif bg_field in ("none", None):
        background = ()
    else:
        background = tuple(
            BackgroundScanner(
                service_port=int(s["service_port"]),
                source_mode=s["source_mode"],
                rate_pps=float(s["rate_pps"]),
                sizes=tuple(int(v) for v in s["sizes"]),
                size_probs=tuple(float(v) for v in s["size_probs"]),
                n_sources=int(s.get("n_sources", 1)),
            )
            for s in bg_field
        )

    return SimConfig(
        seed=seed,
        start_day=start_day,
        telescope=telescope,
        oracle=oracle,
        crackonosh=crackonosh,
        background=background,
        noise_ports_per_day=int(d.get("noise_ports_per_day", 0)),
        mode=d.get("mode", "direct"),
    )


def load_config(
    path,
    secret_override: Optional[str] = None,
    seed_override: Optional[int] = None,
    scale_override: Optional[float] = None,
) -> SimConfig:
    """Read a JSON simulator config file."""
    with open(path, "r") as fh:
        d = json.load(fh)
    if seed_override is not None:
        d["seed"] = seed_override
    if scale_override is not None:
        pop = d.get("crackonosh", {}).get("population")
        if not isinstance(pop, dict):
            raise ValueError("--scale only applies to schedule-based populations")
        pop["scale"] = scale_override
    return config_from_dict(d, secret_override=secret_override)


def config_digest(config: SimConfig) -> str:
    """Stable hash of a config for run manifests.

    The oracle secret is folded in via its own digest so manifests never
    carry recoverable secret material.
    """
    payload = {
        "seed": config.seed,
        "start_day": config.start_day.isoformat(),
        "telescope": [str(c) for c in config.telescope.cidrs],
        "secret_sha256": hashlib.sha256(config.oracle.secret).hexdigest(),
        "port_range": [config.oracle.port_lo, config.oracle.port_hi],
        "crackonosh": {
            "population": list(config.crackonosh.population),
            "rate_pps": config.crackonosh.rate_pps,
            "padding_sizes": config.crackonosh.padding_sizes,
            "payload_base": config.crackonosh.payload_base,
            "always_on_fraction": config.crackonosh.always_on_fraction,
            "per24_cap": config.crackonosh.per24_cap,
        },
        "background": [
            {
                "service_port": s.service_port,
                "source_mode": s.source_mode,
                "rate_pps": s.rate_pps,
                "sizes": list(s.sizes),
                "size_probs": list(s.size_probs),
                "n_sources": s.n_sources,
            }
            for s in config.background
        ],
        "noise_ports_per_day": config.noise_ports_per_day,
        "mode": config.mode,
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def write_dataset(
    dataset: LabeledDataset,
    out_dir,
    config: SimConfig,
    command: str = "simulate",
    inputs: Optional[dict] = None,
) -> dict:
    """Write traffic.csv, labels.csv, and the run manifest; returns the manifest."""
    os.makedirs(out_dir, exist_ok=True)
    traffic_path = os.path.join(out_dir, "traffic.csv")
    labels_path = os.path.join(out_dir, "labels.csv")
    manifest_path = os.path.join(out_dir, "manifest.json")
    write_csv(dataset.records, traffic_path)
    write_labels_csv(dataset.labels, labels_path)
    manifest = {
        "tool": "darkhunt",
        "version": __version__,
        "command": command,
        "seed": config.seed,
        "config_sha256": config_digest(config),
        "inputs": inputs or {},
        "outputs": {
            "traffic": os.path.basename(traffic_path),
            "labels": os.path.basename(labels_path),
        },
        "records": len(dataset.records),
        "days": config.days,
    }
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
