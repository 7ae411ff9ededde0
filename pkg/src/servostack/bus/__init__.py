from .packets import (
    BROADCAST_ID,
    ChecksumError,
    EncodeError,
    ErrorFlags,
    FrameError,
    Instruction,
    InstructionPacket,
    NeedMoreData,
    ProtocolError,
    StatusPacket,
    build_read,
    build_sync_read,
    build_sync_write,
    build_write,
    checksum,
    decode,
    encode,
)
from .registers import (
    CURRENT_SCALE_A,
    PROTECTION_CURRENT_SCALE_A,
    RegisterMap,
    RegisterMapError,
    RegisterSpec,
    decode_sign_magnitude,
    encode_sign_magnitude,
    load_register_map,
    parse_register_table,
)

__all__ = [
    "BROADCAST_ID",
    "ChecksumError",
    "CURRENT_SCALE_A",
    "EncodeError",
    "ErrorFlags",
    "FrameError",
    "Instruction",
    "InstructionPacket",
    "NeedMoreData",
    "ProtocolError",
    "PROTECTION_CURRENT_SCALE_A",
    "RegisterMap",
    "RegisterMapError",
    "RegisterSpec",
    "StatusPacket",
    "build_read",
    "build_sync_read",
    "build_sync_write",
    "build_write",
    "checksum",
    "decode",
    "decode_sign_magnitude",
    "encode",
    "encode_sign_magnitude",
    "load_register_map",
    "parse_register_table",
]
