# -------------------------------------------------------------
# @file          errors.py
# @author        qnoise contributors
# @created       2026-09-02
# @description   Exception hierarchy
# @license       MIT
# -------------------------------------------------------------


class QNoiseError(Exception):
    pass

class StateError(QNoiseError, ValueError):
    pass

class ChannelError(QNoiseError, ValueError):
    pass

class CircuitError(QNoiseError, ValueError):
    pass

class CalibrationError(QNoiseError, ValueError):
    pass

class SimulationError(QNoiseError, ValueError):
    pass

class WalkError(QNoiseError, ValueError):
    pass

class OptimizationError(QNoiseError, ValueError):
    pass
