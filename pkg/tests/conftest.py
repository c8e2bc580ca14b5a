import pytest

from darkhunt.records import PacketRecord, ip_from_str


def make_record(
    ts_us=0,
    src="1.2.3.4",
    src_port=50000,
    dst="10.0.0.1",
    dst_port=51234,
    proto=17,
    payload_len=100,
):
    """Build a PacketRecord from friendly dotted-quad strings."""
    return PacketRecord(
        ts_us=ts_us,
        src_ip=src if isinstance(src, int) else ip_from_str(src),
        src_port=src_port,
        dst_ip=dst if isinstance(dst, int) else ip_from_str(dst),
        dst_port=dst_port,
        proto=proto,
        payload_len=payload_len,
    )


@pytest.fixture
def rec():
    return make_record
