"""Simulated half-duplex servo bus: frames in, status frames out.

The bus owns its servos, answers instruction packets against their register
images, and steps their physics.  Every exchange is recorded so tests can
audit exactly what traffic a control strategy generates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from servostack.bus import (
    BROADCAST_ID,
    ErrorFlags,
    Instruction,
    InstructionPacket,
    StatusPacket,
    decode,
    encode,
)
from servostack.bus.registers import RegisterMap, load_register_map

from .events import Event
from .loads import FreeLoad
from .register_file import EEPROM_END, RegisterFile
from .servo import INTERNAL_DT, SimServo


class BusTimeout(Exception):
    """Raised by transact when a scripted fault eats the exchange."""


@dataclass
class Transaction:
    kind: str  # "read", "write" or "ping"
    request_bytes: int
    reply_bytes: int

    @property
    def total_bytes(self) -> int:
        return self.request_bytes + self.reply_bytes


_READ_KINDS = {Instruction.READ: "read", Instruction.SYNC_READ: "read"}


class SimBus:
    def __init__(self, name: str = "bus", regmap: RegisterMap | None = None, seed: int = 0):
        self.name = name
        self.regmap = regmap or load_register_map()
        self.rng = random.Random(seed)
        self.servos: dict[int, SimServo] = {}
        self.now = 0.0
        self.events: list[Event] = []
        self.transactions: list[tuple[float, Transaction]] = []
        self._timeouts_pending = 0

    def add_servo(
        self, servo_id: int, load=None, initial_position: int = 2048
    ) -> SimServo:
        if servo_id in self.servos:
            raise ValueError(f"duplicate servo id {servo_id} on {self.name}")
        regs = RegisterFile(self.regmap, initial_position)
        servo = SimServo(servo_id, regs, load or FreeLoad(), self.rng)
        self.servos[servo_id] = servo
        self.servos = dict(sorted(self.servos.items()))
        return servo

    # --- physics ---

    def step(self, dt: float = INTERNAL_DT) -> None:
        self.now += dt
        for servo in self.servos.values():
            servo.step(dt, self.now, self.events)

    def run(self, seconds: float) -> None:
        steps = round(seconds / INTERNAL_DT)
        for _ in range(steps):
            self.step()

    def drain_events(self) -> list[Event]:
        events, self.events = self.events, []
        return events

    # --- scripted faults ---

    def inject_timeouts(self, count: int = 1) -> None:
        self._timeouts_pending += count

    # --- wire interface ---

    def transact(self, frame: bytes) -> tuple[list[bytes], Transaction]:
        """Handle one encoded instruction frame; returns reply frames.

        Also appends a Transaction record stamped with the current sim time.
        """
        if self._timeouts_pending > 0:
            self._timeouts_pending -= 1
            raise BusTimeout(f"{self.name}: transaction lost")
        packet = decode(frame, expect="instruction")
        replies = self.handle_packet(packet)
        reply_frames = [encode(r) for r in replies]
        record = Transaction(
            _READ_KINDS.get(packet.instruction, "write" if packet.instruction != Instruction.PING else "ping"),
            len(frame),
            sum(len(r) for r in reply_frames),
        )
        self.transactions.append((self.now, record))
        return reply_frames, record

    def handle_packet(self, packet: InstructionPacket) -> list[StatusPacket]:
        instr = packet.instruction
        if instr == Instruction.PING:
            return self._ping(packet)
        if instr == Instruction.READ:
            return self._read(packet)
        if instr == Instruction.WRITE:
            return self._write(packet)
        if instr == Instruction.SYNC_READ:
            return self._sync_read(packet)
        if instr == Instruction.SYNC_WRITE:
            return self._sync_write(packet)
        return []

    def _targets(self, servo_id: int) -> list[SimServo]:
        if servo_id == BROADCAST_ID:
            return list(self.servos.values())
        servo = self.servos.get(servo_id)
        return [servo] if servo else []

    def _ping(self, packet: InstructionPacket) -> list[StatusPacket]:
        return [StatusPacket(s.servo_id, ErrorFlags.NONE) for s in self._targets(packet.servo_id)]

    def _read(self, packet: InstructionPacket) -> list[StatusPacket]:
        servo = self.servos.get(packet.servo_id)
        if servo is None:
            return []
        address, count = packet.params[0], packet.params[1]
        try:
            payload = servo.regs.read_bytes(address, count)
        except IndexError:
            return [StatusPacket(servo.servo_id, ErrorFlags.INSTRUCTION_ERROR)]
        return [StatusPacket(servo.servo_id, ErrorFlags.NONE, payload)]

    def _write_registers(self, servo: SimServo, address: int, payload: bytes) -> ErrorFlags:
        if address + len(payload) > len(servo.regs.image):
            return ErrorFlags.INSTRUCTION_ERROR
        if address < EEPROM_END and servo.regs.locked:
            return ErrorFlags.INSTRUCTION_ERROR
        lock = self.regmap["Lock"]
        if servo.lock_stuck and address <= lock.address < address + len(payload):
            # scripted fault: the lock byte ignores writes and stays latched
            payload = bytearray(payload)
            payload[lock.address - address] = servo.regs.image[lock.address]
            payload = bytes(payload)
        servo.regs.write_bytes(address, payload)
        return ErrorFlags.NONE

    def _write(self, packet: InstructionPacket) -> list[StatusPacket]:
        address, payload = packet.params[0], packet.params[1:]
        if packet.servo_id == BROADCAST_ID:
            for servo in self.servos.values():
                self._write_registers(servo, address, payload)
            return []
        servo = self.servos.get(packet.servo_id)
        if servo is None:
            return []
        return [StatusPacket(servo.servo_id, self._write_registers(servo, address, payload))]

    def _sync_read(self, packet: InstructionPacket) -> list[StatusPacket]:
        address, span = packet.params[0], packet.params[1]
        replies = []
        for servo_id in packet.params[2:]:
            servo = self.servos.get(servo_id)
            if servo is None:
                continue
            try:
                payload = servo.regs.read_bytes(address, span)
            except IndexError:
                replies.append(StatusPacket(servo_id, ErrorFlags.INSTRUCTION_ERROR))
                continue
            replies.append(StatusPacket(servo_id, ErrorFlags.NONE, payload))
        return replies

    def _sync_write(self, packet: InstructionPacket) -> list[StatusPacket]:
        address, width = packet.params[0], packet.params[1]
        body = packet.params[2:]
        stride = 1 + width
        for i in range(0, len(body) - stride + 1, stride):
            servo = self.servos.get(body[i])
            if servo is not None:
                self._write_registers(servo, address, body[i + 1 : i + stride])
        return []
