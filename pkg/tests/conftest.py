import numpy as np
import pytest

from hidden_angle.cli import ENV_HBAR, main as cli_main


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv(ENV_HBAR, raising=False)


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""

    def _run(*argv):
        code = cli_main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


def gaussian_table(n_points: int, sigma: float = 1.0, half_width: float = 8.0):
    """Sampled unit-norm Gaussian packet amplitudes on a uniform grid."""
    grid = np.linspace(-half_width * sigma, half_width * sigma, n_points)
    values = (2.0 * np.pi * sigma**2) ** -0.25 * np.exp(-grid**2 / (4.0 * sigma**2))
    return grid, values


@pytest.fixture
def write_events_csv(tmp_path):
    """Factory writing an `E,px,py,pz` CSV and returning its path."""

    counter = [0]

    def _write(rows, header="E,px,py,pz"):
        counter[0] += 1
        path = tmp_path / f"events_{counter[0]}.csv"
        lines = [header]
        for row in rows:
            lines.append(",".join(repr(float(v)) for v in row))
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write
