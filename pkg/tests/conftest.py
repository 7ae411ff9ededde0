"""Shared fixtures: a one-bus robot bench with the skill runtime on top."""

import pytest

from servostack.bus import build_write, encode
from servostack.loop import LOOP_PERIOD_S, BusLane, ControlLoop, JointSpec
from servostack.sim import GripperContactModel, SimBus
from servostack.skills import Face, SkillRuntime, build_default_registry

ARM_IDS = [1, 2, 3, 4, 5]
GRIPPER_ID = 6
LIFT_ID = 11
ARM_JOINTS = [f"joint_{i}" for i in ARM_IDS] + ["gripper"]


def build_joints():
    joints = [JointSpec(f"joint_{i}", i, min_ticks=100, max_ticks=4000) for i in ARM_IDS]
    joints.append(JointSpec("gripper", GRIPPER_ID, min_ticks=900, max_ticks=3200, gripper=True))
    joints.append(JointSpec("lift", LIFT_ID, lift=True))
    return joints


class Bench:
    def __init__(self, seed=7, pick_episode_path=None):
        self.bus = SimBus("right", seed=seed)
        self.gripper_load = GripperContactModel()
        for servo_id in ARM_IDS:
            self.bus.add_servo(servo_id)
        self.bus.add_servo(GRIPPER_ID, load=self.gripper_load, initial_position=1000)
        self.bus.add_servo(LIFT_ID)
        self.lane = BusLane("right", self.bus, build_joints())
        self.loop = ControlLoop([self.lane])
        self.registry = build_default_registry(
            ARM_JOINTS, pick_episode_path=pick_episode_path
        )
        self.face = Face()
        self.runtime = SkillRuntime(self.loop, self.registry, face=self.face)
        self.k = 0
        for servo_id in ARM_IDS + [GRIPPER_ID, LIFT_ID]:
            self.poke(servo_id, "Torque_Enable", 1)

    @property
    def t(self):
        return self.k * LOOP_PERIOD_S

    def poke(self, servo_id, register, value):
        spec = self.bus.regmap[register]
        payload = self.bus.regmap.encode_value(spec, value)
        self.bus.transact(encode(build_write(servo_id, spec.address, payload)))

    def peek(self, servo_id, register):
        spec = self.bus.regmap[register]
        raw = self.bus.servos[servo_id].regs.read_bytes(spec.address, spec.width)
        return self.bus.regmap.decode_value(spec, raw)

    def place_object(self, at_position_ticks=2000.0):
        self.gripper_load.contact_aperture_mm = self.gripper_load.aperture_mm(
            at_position_ticks
        )

    def tick(self):
        report = self.loop.tick(self.t)
        self.runtime.on_tick()
        self.bus.run(LOOP_PERIOD_S)
        self.k += 1
        return report

    def run(self, ticks):
        return [self.tick() for _ in range(ticks)]

    def run_until(self, predicate, limit=1500):
        for _ in range(limit):
            self.tick()
            if predicate():
                return True
        return False


def record_pick_episode(path, seed=3):
    """A deterministic grasp recording whose first action is the open pose.

    The gripper goal ramps to a squeeze shallow enough to hold force
    without tripping current protection, the way a careful teleop
    demonstration would.
    """
    bench = Bench(seed=seed)
    bench.place_object(2000.0)
    bench.loop.start_episode(path, task="pick_demo")
    arm_hold = {f"joint_{i}": 2048 for i in ARM_IDS}
    for k in range(60):
        gripper_goal = min(1000 + 40 * k, 2200)
        bench.loop.submit_goals({**arm_hold, "gripper": gripper_goal})
        bench.tick()
    bench.loop.end_episode()
    return path


@pytest.fixture
def bench():
    return Bench()


@pytest.fixture
def pick_bench(tmp_path):
    episode = record_pick_episode(tmp_path / "pick_demo.jsonl")
    bench = Bench(pick_episode_path=episode)
    bench.place_object(2000.0)
    return bench
