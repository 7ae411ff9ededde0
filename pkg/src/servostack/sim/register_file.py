"""Byte-addressable register image with EEPROM/SRAM persistence semantics."""

from __future__ import annotations

from servostack.bus.registers import EEPROM, RegisterMap

IMAGE_SIZE = 128
# Addresses below this line belong to the persistent bank.
EEPROM_END = 40

# Values a servo ships with.  Protection is disabled from the factory: an
# unprovisioned servo will not save itself.
FACTORY_EEPROM = {
    "Min_Angle_Limit": 0,
    "Max_Angle_Limit": 4095,
    "Max_Torque_Limit": 1000,
    "Protection_Current": 0,
    "Over_Current_Protection_Time": 0,
}
SRAM_DEFAULTS = {
    "Torque_Enable": 0,
    "Goal_Speed": 0,
    "Lock": 1,
}


class RegisterFile:
    """One servo's register image.

    ``power_cycle`` keeps the EEPROM byte range and rebuilds the SRAM range
    from defaults; Torque_Limit is reseeded from Max_Torque_Limit the way the
    firmware does at boot.
    """

    def __init__(self, regmap: RegisterMap, initial_position: int = 2048):
        self.regmap = regmap
        self.image = bytearray(IMAGE_SIZE)
        # bumped on any wire-visible control write, so the servo model can
        # cache its decoded control values between writes
        self.mutation_count = 0
        self._present_specs = tuple(
            regmap[name] for name in ("Present_Position", "Present_Speed", "Present_Current")
        )
        for name, value in FACTORY_EEPROM.items():
            self.set(name, value)
        self.power_cycle(initial_position)

    # -- named access --

    def get(self, name: str) -> int:
        spec = self.regmap[name]
        return self.regmap.decode_value(spec, self.read_bytes(spec.address, spec.width))

    def set(self, name: str, value: int) -> None:
        spec = self.regmap[name]
        self.image[spec.address : spec.address + spec.width] = self.regmap.encode_value(
            spec, value
        )
        self.mutation_count += 1

    def store_present(self, position: int, speed: int, current: int) -> None:
        """Per-substep telemetry writeback; bypasses the mutation stamp."""
        for spec, value in zip(self._present_specs, (position, speed, current)):
            self.image[spec.address : spec.address + spec.width] = self.regmap.encode_value(
                spec, value
            )

    # -- byte access (what the wire sees) --

    def read_bytes(self, address: int, count: int) -> bytes:
        if address + count > IMAGE_SIZE:
            raise IndexError(f"read [{address}, {address + count}) beyond register image")
        return bytes(self.image[address : address + count])

    def write_bytes(self, address: int, payload: bytes) -> None:
        if address + len(payload) > IMAGE_SIZE:
            raise IndexError(f"write at {address} beyond register image")
        self.image[address : address + len(payload)] = payload
        self.mutation_count += 1

    def touches_eeprom(self, address: int, count: int) -> bool:
        return address < EEPROM_END

    @property
    def locked(self) -> bool:
        return self.get("Lock") != 0

    def power_cycle(self, present_position: int) -> None:
        """Reset the volatile bank; the persistent bank survives."""
        self.image[EEPROM_END:] = bytes(IMAGE_SIZE - EEPROM_END)
        for name, value in SRAM_DEFAULTS.items():
            self.set(name, value)
        self.set("Torque_Limit", self.get("Max_Torque_Limit"))
        self.set("Goal_Position", present_position)
        self.set("Present_Position", present_position)
        self.mutation_count += 1

    def eeprom_snapshot(self) -> bytes:
        return bytes(self.image[:EEPROM_END])
