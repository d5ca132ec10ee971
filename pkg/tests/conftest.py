import numpy as np
import pytest

from emoprep.audio_io import AudioBuffer, write_wav
from emoprep.reference import reference_manifest


def multitone(seconds, sr, amp=1.0):
    t = np.arange(int(round(seconds * sr))) / sr
    x = np.sin(2 * np.pi * 300 * t) + np.sin(2 * np.pi * 1000 * t) + np.sin(2 * np.pi * 2500 * t)
    return amp * x / 3.0


def padded_utterance(lead, speech, tail, sr, amp=1.0):
    return np.concatenate([np.zeros(int(lead * sr)), multitone(speech, sr, amp), np.zeros(int(tail * sr))])


@pytest.fixture
def reference_corpus():
    return reference_manifest()


@pytest.fixture
def wav_factory(tmp_path):
    def make(name, samples, sr):
        path = tmp_path / name
        write_wav(AudioBuffer(samples, sr), path)
        return path
    return make


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail=""):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)


class criterion:
    """Context manager that records PASS when its body finishes cleanly and FAIL otherwise."""

    def __init__(self, number, title):
        self.number, self.title, self.detail = number, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        detail = self.detail if exc is None else f"{exc_type.__name__}: {exc}".splitlines()[0][:160]
        record_criterion(self.number, self.title, exc is None, detail)
        return False
