# How much darkspace do you need to see a slow coordinated scanner?
#
# A Crackonosh-style bot probes uniform-random IPv4 addresses at ~10
# packets/second on a shared daily port.  A telescope of k addresses
# catches each probe with probability k / 2^32, so telescope size decides
# whether you see a host many times a day or once a fortnight.

from darkhunt import (
    ScanPopulation,
    TelescopeSpec,
    days_to_coverage,
    expected_observed_hosts,
    observability_table,
    p_observe,
    time_to_n_packets,
    visible_rate,
)

one_host = ScanPopulation(host_count=1, rate_pps=10.0, duration_s=86400.0)

# Per-host view: collision probability, daily observation probability, and
# expected packets per day, across the classic telescope sizes.
print("per-host observability at 10 pps over one daily-port period")
print(f"{'size':>6} {'P_c':>12} {'P_o':>10} {'E[packets/day]':>16}")
for row in observability_table():
    print(
        f"{row['size']:>6} {row['p_collision']:>12.3g} "
        f"{row['p_observe']:>10.3g} {row['expected_packets']:>16.3g}"
    )

# A /16 sees essentially every host every day; a /22 sees a given host on
# fewer than one day in five.
print()
for prefix in (18, 19, 22):
    tel = TelescopeSpec.from_prefix(prefix)
    print(f"P_o(/{prefix}) = {p_observe(tel, one_host):.2f}", end="")
    days = days_to_coverage(tel, one_host, 0.95)
    print(f"; 95% chance of seeing a host needs {days} day(s)")

# Population view: how many of 5000 infected hosts does each size see in
# one day?
print()
pop = ScanPopulation(host_count=5000, rate_pps=10.0, duration_s=86400.0)
for prefix in (22, 18, 16):
    tel = TelescopeSpec.from_prefix(prefix)
    print(f"/{prefix}: expect {expected_observed_hosts(tel, pop):7.0f} of 5000 hosts in a day")

# Detection speed: payload-size entropy needs on the order of 128 packets
# before it means anything.  With 3000 live hosts, a /22 takes ~5 hours to
# collect that many; each doubling of the telescope halves the wait.
print()
print("time to accumulate 128 packets from 3000 hosts at 10 pps")
print(f"{'size':>6} {'visible pps':>12} {'hours':>8}")
for prefix in (24, 22, 20, 18, 16):
    tel = TelescopeSpec.from_prefix(prefix)
    rate = visible_rate(tel, ScanPopulation(host_count=3000, rate_pps=10.0))
    seconds = time_to_n_packets(rate, 128)
    print(f"/{prefix:<5} {rate:>12.5f} {seconds / 3600:>8.2f}")
