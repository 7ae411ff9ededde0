from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from servostack.bus import (
    RegisterMapError,
    decode_sign_magnitude,
    encode_sign_magnitude,
    load_register_map,
    parse_register_table,
)

# Addresses the rest of the stack depends on; a map edit that moves one of
# these should fail loudly here.
EXPECTED_ADDRESSES = {
    "Min_Angle_Limit": 9,
    "Max_Angle_Limit": 11,
    "Max_Torque_Limit": 16,
    "Protection_Current": 28,
    "Over_Current_Protection_Time": 30,
    "Torque_Enable": 40,
    "Goal_Position": 42,
    "Goal_Speed": 46,
    "Torque_Limit": 48,
    "Present_Position": 56,
    "Present_Speed": 58,
    "Present_Current": 69,
}


@pytest.fixture(scope="module")
def regmap():
    return load_register_map()


def test_bundled_table_versioned(regmap):
    assert regmap.version == 1


@pytest.mark.parametrize("name,address", sorted(EXPECTED_ADDRESSES.items()))
def test_bundled_addresses(regmap, name, address):
    assert regmap[name].address == address


def test_present_current_is_two_byte_sign_magnitude(regmap):
    spec = regmap["Present_Current"]
    assert spec.width == 2
    assert spec.sign_magnitude
    assert spec.bank == "SRAM"


def test_banks_split_at_lock(regmap):
    assert regmap["Max_Torque_Limit"].bank == "EEPROM"
    assert regmap["Protection_Current"].bank == "EEPROM"
    assert regmap["Torque_Limit"].bank == "SRAM"
    assert regmap["Lock"].bank == "SRAM"


def test_sign_magnitude_examples():
    # 0x8014: direction bit set, magnitude 20
    assert decode_sign_magnitude(0x8014) == -20
    assert decode_sign_magnitude(0x0014) == 20
    assert decode_sign_magnitude(0x801E) == -30
    assert encode_sign_magnitude(-20) == 0x8014
    assert encode_sign_magnitude(20) == 0x0014


@given(st.integers(-32767, 32767))
def test_sign_magnitude_round_trip(value):
    assert decode_sign_magnitude(encode_sign_magnitude(value)) == value


def test_register_wire_coding(regmap):
    spec = regmap["Present_Current"]
    assert regmap.encode_value(spec, -20) == (0x8014).to_bytes(2, "little")
    assert regmap.decode_value(spec, (0x8014).to_bytes(2, "little")) == -20
    goal = regmap["Goal_Position"]
    assert regmap.encode_value(goal, 2048) == bytes([0x00, 0x08])


def test_overlapping_registers_rejected():
    bad = """# version 1
A 10 2 SRAM unsigned
B 11 1 SRAM unsigned
"""
    with pytest.raises(RegisterMapError):
        parse_register_table(bad)


def test_unknown_bank_rejected():
    with pytest.raises(RegisterMapError):
        parse_register_table("# version 1\nA 10 2 FLASH unsigned\n")


def test_missing_version_rejected():
    with pytest.raises(RegisterMapError):
        parse_register_table("A 10 2 SRAM unsigned\n")
