"""Onboard software stack for serial-bus servo robots, with a register-accurate
bus simulator standing in for hardware.

Layers, bottom up: wire codec and register map (``bus``), servo physics and
bus simulation (``sim``), burn-out protection (``safety``), current-based grip
force (``force``), the 50 Hz control loop (``loop``), skill execution and the
operator socket (``skills``), time-based triggers (``scheduler``), and the
command-line front end (``cli``).
"""

__version__ = "0.1.0"
