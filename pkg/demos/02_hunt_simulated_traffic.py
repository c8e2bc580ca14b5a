# Hunting a coordinated scanner in simulated telescope traffic.
#
# The simulator plays three two-week-scale epochs of a declining botnet
# (900 -> 400 -> 260 hosts, mirroring a remediation campaign at 1% scale)
# against a fixed set of background service scanners plus one-off noise.
# We then do what a threat hunter does: partition each day's traffic by
# destination port, rank ports under each metric, and check where the
# ground-truth daily port lands.

from datetime import date

from darkhunt import (
    CrackonoshConfig,
    DailyPortOracle,
    SimConfig,
    TelescopeSpec,
    default_background,
    discoverability,
    partition_by_day_port,
    rank_of_labeled_port,
    rank_ports,
    simulate,
    three_epoch_schedule,
)
from darkhunt.metrics import METRIC_IDS

config = SimConfig(
    seed=7,
    start_day=date(2022, 10, 13),
    telescope=TelescopeSpec.from_prefix(17),
    oracle=DailyPortOracle(secret=b"demo-secret"),
    crackonosh=CrackonoshConfig(
        population=three_epoch_schedule(days_per_epoch=4, scale=0.01),
        always_on_fraction=0.6,
    ),
    background=default_background(),
    noise_ports_per_day=250,
)
dataset = simulate(config)
print(f"simulated {len(dataset.records)} packets over {len(dataset.labels)} days")

by_day = {}
for (day, port), part in partition_by_day_port(dataset.records).items():
    by_day.setdefault(day, {})[port] = part

# Daily rank of the labeled port under each metric.  Address-based metrics
# decay as the population shrinks; entropy keeps pinning the daily port at
# rank 1 because nothing else pads its payload sizes.
days = sorted(by_day)
ranks = {m: [] for m in METRIC_IDS}
for day in days:
    for metric_id in METRIC_IDS:
        ranked = rank_ports(by_day[day], metric_id)
        ranks[metric_id].append(rank_of_labeled_port(ranked, dataset.labels[day]))

print(f"\n{'day':>12} {'hosts':>6} " + " ".join(f"{m:>14}" for m in METRIC_IDS))
for i, day in enumerate(days):
    hosts = config.crackonosh.population[i]
    row = " ".join(f"{ranks[m][i]!s:>14}" for m in METRIC_IDS)
    print(f"{day.isoformat():>12} {hosts:>6} {row}")

# Discoverability: the chance the daily port shows up in a top-100 triage
# list.  This is the number an analyst cares about.
#
# Note how src_spread collapses here: every one-off noise probe (one
# source, one destination) scores a perfect ratio of 1.0, while on a
# telescope this large the daily port's destinations never saturate, so
# its ratio stays below 1.  The same metric shines on a small telescope
# where a coordinated scanner covers every internal address.  Metrics are
# situational; that is the point of measuring discoverability.
print(f"\ndiscoverability D_100 over all {len(days)} days")
for metric_id in METRIC_IDS:
    per_day = dict(zip(days, ranks[metric_id]))
    score = discoverability(per_day, n=100, metric_id=metric_id).score
    print(f"  {metric_id:>14}: {score:.2f}")

# What tops the address-count list on the last (weakest) day?  Service
# scanners: SIP, BitTorrent, mDNS...  The daily port hides among them for
# address counts but not for entropy.
print("\ntop 8 ports by address count on the final day:")
final = rank_ports(by_day[days[-1]], "address_count")
label = dataset.labels[days[-1]]
for entry in final.entries[:8]:
    marker = "  <- daily port" if entry.port == label else ""
    print(f"  rank {entry.rank:>2}  port {entry.port:>5}  {entry.value:>5.0f} sources{marker}")
