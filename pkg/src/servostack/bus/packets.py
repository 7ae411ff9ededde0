"""Half-duplex servo bus packet codec.

Wire frame, both directions:

    [0xFF, 0xFF, id, length, instruction, param_1 .. param_N, checksum]

``length`` counts the params plus two (instruction byte and checksum byte).
``checksum`` is the bitwise NOT of the low byte of the sum over id, length,
instruction and params.  Status packets reuse the same framing with the
servo's error-flag byte sitting in the instruction slot.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

HEADER = b"\xff\xff"
BROADCAST_ID = 0xFE
MAX_SERVO_ID = 0xFE
# length byte counts instruction + params + checksum, and itself fits in one
# byte, so params are capped at 250.
MAX_PARAMS = 250


class Instruction(enum.IntEnum):
    PING = 0x01
    READ = 0x02
    WRITE = 0x03
    SYNC_READ = 0x82
    SYNC_WRITE = 0x83


class ErrorFlags(enum.IntFlag):
    """Status-packet error bits (instruction slot of a reply).

    All eight bits are named so any raw error byte decodes cleanly.
    """

    NONE = 0x00
    VOLTAGE = 0x01
    ANGLE_LIMIT = 0x02
    OVER_TEMP = 0x04
    RANGE = 0x08
    CHECKSUM_FAULT = 0x10
    OVER_CURRENT = 0x20
    INSTRUCTION_ERROR = 0x40
    RESERVED = 0x80


class ProtocolError(Exception):
    """Base class for wire-level failures."""


class EncodeError(ProtocolError):
    pass


class NeedMoreData(ProtocolError):
    """The buffer ends before a complete frame; feed more bytes and retry."""


class ChecksumError(ProtocolError):
    """Frame failed integrity check.  ``offset`` is the frame start in the buffer."""

    def __init__(self, offset: int, expected: int, actual: int):
        super().__init__(
            f"checksum mismatch at byte offset {offset}: "
            f"expected 0x{expected:02X}, got 0x{actual:02X}"
        )
        self.offset = offset
        self.expected = expected
        self.actual = actual


class FrameError(ProtocolError):
    """Structurally invalid frame (bad id or impossible length byte)."""


@dataclass(frozen=True)
class InstructionPacket:
    servo_id: int
    instruction: Instruction
    params: bytes = b""

    def __post_init__(self):
        _check_id(self.servo_id)
        _check_params(self.params)


@dataclass(frozen=True)
class StatusPacket:
    servo_id: int
    error: ErrorFlags = ErrorFlags.NONE
    params: bytes = field(default=b"")

    def __post_init__(self):
        _check_id(self.servo_id)
        _check_params(self.params)


def _check_id(servo_id: int) -> None:
    if not 0 <= servo_id <= MAX_SERVO_ID:
        raise ValueError(f"servo id {servo_id} outside 0..{MAX_SERVO_ID}")


def _check_params(params: bytes) -> None:
    if len(params) > MAX_PARAMS:
        raise EncodeError(f"{len(params)} params exceed frame capacity ({MAX_PARAMS})")


def checksum(core: bytes) -> int:
    """Checksum over the frame bytes between header and checksum byte."""
    return ~sum(core) & 0xFF


def _encode_frame(servo_id: int, third_byte: int, params: bytes) -> bytes:
    _check_params(params)
    length = len(params) + 2
    core = bytes([servo_id, length, third_byte]) + params
    return HEADER + core + bytes([checksum(core)])


def encode(packet: InstructionPacket | StatusPacket) -> bytes:
    """Serialize a packet to its wire frame."""
    if isinstance(packet, InstructionPacket):
        return _encode_frame(packet.servo_id, int(packet.instruction), packet.params)
    return _encode_frame(packet.servo_id, int(packet.error), packet.params)


_INSTRUCTION_VALUES = {int(i) for i in Instruction}


def decode(
    data: bytes, expect: str | None = None
) -> InstructionPacket | StatusPacket:
    """Decode the first complete frame in ``data``.

    Leading garbage before the 0xFF 0xFF header is skipped.  Once a header
    candidate is locked, the frame must verify; a failed checksum raises
    ChecksumError carrying the frame's byte offset rather than silently
    scanning onward.

    Args:
        data: raw bytes from the bus.
        expect: "instruction" or "status" to force interpretation of the
            third byte; default guesses by opcode (an unknown opcode is read
            as a status error byte, which is the on-wire ambiguity of this
            frame format).

    Raises:
        NeedMoreData: no complete frame yet.
        ChecksumError / FrameError: corrupt frame.
    """
    start = data.find(HEADER)
    if start < 0:
        raise NeedMoreData("no frame header in buffer")
    # Align past a run of 0xFF fill so the id byte is never read as 0xFF.
    while data[start : start + 3] == b"\xff\xff\xff":
        start += 1
    frame = data[start:]
    if len(frame) < 4:
        raise NeedMoreData("frame truncated before length byte")
    servo_id = frame[2]
    length = frame[3]
    if servo_id > MAX_SERVO_ID:
        raise FrameError(f"invalid servo id 0x{servo_id:02X} at offset {start}")
    if length < 2:
        raise FrameError(f"impossible length byte {length} at offset {start}")
    end = 4 + length
    if len(frame) < end:
        raise NeedMoreData(f"frame needs {end - len(frame)} more bytes")
    core = frame[2 : end - 1]
    expected = checksum(core)
    actual = frame[end - 1]
    if expected != actual:
        raise ChecksumError(start, expected, actual)
    third = frame[4]
    params = bytes(frame[5 : end - 1])
    if expect == "status" or (expect is None and third not in _INSTRUCTION_VALUES):
        return StatusPacket(servo_id, ErrorFlags(third), params)
    if expect == "instruction" and third not in _INSTRUCTION_VALUES:
        raise FrameError(f"unknown instruction 0x{third:02X}")
    return InstructionPacket(servo_id, Instruction(third), params)


def build_read(servo_id: int, address: int, count: int) -> InstructionPacket:
    _check_byte(address, "address")
    _check_byte(count, "count")
    return InstructionPacket(servo_id, Instruction.READ, bytes([address, count]))


def build_write(servo_id: int, address: int, payload: bytes) -> InstructionPacket:
    _check_byte(address, "address")
    return InstructionPacket(servo_id, Instruction.WRITE, bytes([address]) + payload)


def build_sync_read(address: int, span: int, servo_ids: list[int]) -> InstructionPacket:
    """One broadcast read of ``span`` bytes from ``address`` on every listed servo."""
    _check_byte(address, "address")
    _check_byte(span, "span")
    if not servo_ids:
        raise ValueError("sync read needs at least one servo id")
    if len(set(servo_ids)) != len(servo_ids):
        raise ValueError(f"duplicate servo ids in sync read: {servo_ids}")
    for sid in servo_ids:
        _check_id(sid)
    params = bytes([address, span]) + bytes(servo_ids)
    return InstructionPacket(BROADCAST_ID, Instruction.SYNC_READ, params)


def build_sync_write(
    address: int, width: int, values: dict[int, int]
) -> InstructionPacket:
    """One broadcast write of a ``width``-byte value per servo, little-endian."""
    _check_byte(address, "address")
    if width not in (1, 2):
        raise ValueError(f"unsupported register width {width}")
    if not values:
        raise ValueError("sync write needs at least one servo")
    params = bytearray([address, width])
    for sid in sorted(values):
        _check_id(sid)
        value = values[sid]
        if not 0 <= value < (1 << (8 * width)):
            raise ValueError(f"value {value} overflows {width}-byte register")
        params.append(sid)
        params += value.to_bytes(width, "little")
    return InstructionPacket(BROADCAST_ID, Instruction.SYNC_WRITE, bytes(params))


def _check_byte(value: int, what: str) -> None:
    if not 0 <= value <= 0xFF:
        raise ValueError(f"{what} {value} outside 0..255")
