"""Servo control-table definitions, loaded from a versioned text table.

The table ships with the package (``data/registers_v1.txt``) instead of being
hard-coded, so a corrected or extended map is a data edit, not a code change.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

# Telemetry scale of the current register: one raw unit is about 6.5 mA.
CURRENT_SCALE_A = 0.0065
# Scale the over-current comparator applies to Protection_Current.  The
# register value 450 corresponds to a 1.8 A trip threshold, which is a
# different unit than the telemetry register uses; both scales are kept
# literal and side by side on purpose.
PROTECTION_CURRENT_SCALE_A = 0.004

EEPROM = "EEPROM"
SRAM = "SRAM"
_ENCODINGS = ("unsigned", "sign15")


class RegisterMapError(ValueError):
    pass


@dataclass(frozen=True)
class RegisterSpec:
    name: str
    address: int
    width: int  # 1 or 2 bytes
    bank: str  # EEPROM or SRAM
    encoding: str  # "unsigned" or "sign15"

    @property
    def sign_magnitude(self) -> bool:
        return self.encoding == "sign15"


def decode_sign_magnitude(encoded: int, sign_bit: int = 15) -> int:
    """Sign-magnitude to signed int: bit ``sign_bit`` is direction, rest magnitude."""
    magnitude = encoded & ((1 << sign_bit) - 1)
    return -magnitude if encoded >> sign_bit & 1 else magnitude


def encode_sign_magnitude(value: int, sign_bit: int = 15) -> int:
    magnitude = abs(value)
    if magnitude >= 1 << sign_bit:
        raise ValueError(f"magnitude {magnitude} exceeds {sign_bit} bits")
    return magnitude | (1 << sign_bit) if value < 0 else magnitude


class RegisterMap:
    """Register table indexed by name and by address."""

    def __init__(self, specs: list[RegisterSpec], version: int):
        self.version = version
        self.by_name: dict[str, RegisterSpec] = {}
        self.by_address: dict[int, RegisterSpec] = {}
        claimed: dict[int, str] = {}
        for spec in specs:
            if spec.name in self.by_name:
                raise RegisterMapError(f"duplicate register name {spec.name}")
            for offset in range(spec.width):
                addr = spec.address + offset
                if addr in claimed:
                    raise RegisterMapError(
                        f"{spec.name} overlaps {claimed[addr]} at address {addr}"
                    )
                claimed[addr] = spec.name
            self.by_name[spec.name] = spec
            self.by_address[spec.address] = spec

    def __getitem__(self, name: str) -> RegisterSpec:
        try:
            return self.by_name[name]
        except KeyError:
            raise RegisterMapError(f"unknown register {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.by_name

    def names(self) -> list[str]:
        return list(self.by_name)

    def decode_value(self, spec: RegisterSpec, raw: bytes) -> int:
        value = int.from_bytes(raw[: spec.width], "little")
        return decode_sign_magnitude(value) if spec.sign_magnitude else value

    def encode_value(self, spec: RegisterSpec, value: int) -> bytes:
        if spec.sign_magnitude:
            value = encode_sign_magnitude(value)
        if not 0 <= value < 1 << (8 * spec.width):
            raise ValueError(
                f"{spec.name} value {value} overflows {spec.width}-byte register"
            )
        return value.to_bytes(spec.width, "little")


def parse_register_table(text: str) -> RegisterMap:
    """Parse the table format: ``name address width bank encoding`` per line.

    The first non-blank comment line must carry ``version N``.
    """
    version = None
    specs: list[RegisterSpec] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if version is None and "version" in stripped:
                tail = stripped.rsplit("version", 1)[1].strip().rstrip(".")
                if tail.isdigit():
                    version = int(tail)
            continue
        fields = stripped.split()
        if len(fields) != 5:
            raise RegisterMapError(f"line {lineno}: expected 5 columns, got {len(fields)}")
        name, address, width, bank, encoding = fields
        if not address.isdigit() or not width.isdigit():
            raise RegisterMapError(f"line {lineno}: address/width must be integers")
        if bank not in (EEPROM, SRAM):
            raise RegisterMapError(f"line {lineno}: unknown bank {bank!r}")
        if encoding not in _ENCODINGS:
            raise RegisterMapError(f"line {lineno}: unknown encoding {encoding!r}")
        if int(width) not in (1, 2):
            raise RegisterMapError(f"line {lineno}: width must be 1 or 2")
        specs.append(RegisterSpec(name, int(address), int(width), bank, encoding))
    if version is None:
        raise RegisterMapError("table missing version header")
    if not specs:
        raise RegisterMapError("table defines no registers")
    return RegisterMap(specs, version)


def load_register_map(path: str | Path | None = None) -> RegisterMap:
    """Load a register table from ``path``, or the bundled default."""
    if path is not None:
        return parse_register_table(Path(path).read_text())
    text = resources.files("servostack.data").joinpath("registers_v1.txt").read_text()
    return parse_register_table(text)
