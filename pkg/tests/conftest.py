import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from noisefit.benchmarks import demo_calibration, demo_hidden_params
from noisefit.calibration import DeviceCalibration, EdgeCal, GateCal, QubitCal


def make_ideal_calibration(num_qubits: int = 3, gate_tag_2q: str = "cx") -> DeviceCalibration:
    """Noiseless snapshot: zero errors, effectively infinite coherence."""
    qubits = tuple(
        QubitCal(
            t1=1e9,
            t2=2e9,  # T2 = 2 T1, so the pure dephasing time is infinite
            readout_p01=0.0,
            readout_p10=0.0,
            gates={
                "rz": GateCal(0.0, 0.0),
                "id": GateCal(0.0, 35e-9),
                "sx": GateCal(0.0, 35e-9),
                "x": GateCal(0.0, 35e-9),
            },
        )
        for _ in range(num_qubits)
    )
    edges = tuple(
        EdgeCal(qubits=(q, q + 1), gate_tag=gate_tag_2q, error=0.0, duration=400e-9)
        for q in range(num_qubits - 1)
    )
    return DeviceCalibration(
        num_qubits=num_qubits,
        qubits=qubits,
        edges=edges,
        t_char_1q=35e-9,
        t_char_2q=400e-9,
    )


@pytest.fixture
def ideal_cal() -> DeviceCalibration:
    return make_ideal_calibration(3)


@pytest.fixture
def small_cal() -> DeviceCalibration:
    return demo_calibration(4, seed=11)


@pytest.fixture
def hidden_params():
    return demo_hidden_params()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
